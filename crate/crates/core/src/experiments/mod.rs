//! Figure-reproduction pipelines and sweep orchestration behind the CLI.
//!
//! Every pipeline returns structured points plus a CSV rendering with a fixed
//! column order. Rows come out in sweep order regardless of how many workers
//! ran the Monte-Carlo trials.

pub mod config;
pub mod svg;

use num_complex::Complex64;

pub use config::{ExperimentConfig, StrategyKind};
use svg::{LinePlot, Series};

use crate::bounds::{mcrb, snr_db_to_noise_variance, BoundReport, Scenario, DEG2_PER_RAD2};
use crate::error::{Error, Result};
use crate::estimation::{compensated_sum, run_mse_with, GridSearch, McResult, SearchSpec};
use crate::spoofing::{
    random_phase_precoding_seeded, worst_case_precoding, AttackerConfig, PrecodingStrategy,
};
use crate::ula::ArrayGeometry;

pub const BOUNDS_COLUMNS: [&str; 12] = [
    "offset_deg", "snr_db", "sigma2", "gamma", "eta", "crb_rad2", "penalty_rad2", "mcrb_rad2",
    "crb_deg2", "penalty_deg2", "mcrb_deg2", "error",
];
pub const FIG1_COLUMNS: [&str; 12] = [
    "offset_deg", "snr_db", "sigma2", "mse_rad2", "standard_error_rad2", "crb_rad2", "mcrb_rad2",
    "mse_deg2", "crb_deg2", "mcrb_deg2", "trials", "seed",
];
pub const FIG2_COLUMNS: [&str; 6] = [
    "elements", "offset_deg", "gamma", "eta", "penalty_rad2", "penalty_deg2",
];
pub const FIG3_COLUMNS: [&str; 13] = [
    "count", "offset_deg", "snr_db", "sigma2", "crb_rad2", "penalty_avg_rad2",
    "penalty_worst_rad2", "mcrb_avg_rad2", "mcrb_worst_rad2", "crb_deg2", "mcrb_avg_deg2",
    "mcrb_worst_deg2", "realizations",
];
pub const MONTECARLO_COLUMNS: [&str; 9] = [
    "scenario", "offset_deg", "snr_db", "mse_rad2", "standard_error_rad2", "crb_rad2",
    "mcrb_rad2", "trials", "seed",
];

/// Worker-pool settings. `threads: None` uses the global rayon pool.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub threads: Option<usize>,
}

/// A rendered pipeline result.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub csv: String,
    pub svg: Option<String>,
    /// Rows that could not be evaluated (degenerate scenarios).
    pub failed_rows: usize,
}

impl Output {
    pub fn exit_code(&self) -> i32 {
        if self.failed_rows > 0 {
            3
        } else {
            0
        }
    }
}

/// Shortest round-trip decimal rendering, scientific for very small or large
/// magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn write_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

fn with_pool<T: Send>(opts: RunOptions, f: impl FnOnce() -> T + Send) -> Result<T> {
    match opts.threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Io(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// SplitMix64 finalizer over `(seed, variant, point)`.
pub fn point_seed(seed: u64, variant: u64, point: u64) -> u64 {
    let mut z = seed
        ^ variant.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ point.wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn geometry_of(cfg: &ExperimentConfig) -> Result<ArrayGeometry> {
    ArrayGeometry::new(cfg.geometry.elements, cfg.geometry.spacing_ratio)
        .map_err(|e| Error::config("geometry", e.to_string()))
}

fn theta_of(cfg: &ExperimentConfig) -> f64 {
    cfg.scenario.theta_deg.to_radians()
}

/// The attacker for one scenario variant: `count` components at
/// `theta + offset (+ per-component offsets)`, weights from the configured
/// strategy. Random-phase weights use realization `variant` of `mc.seed`.
pub fn build_attacker(
    cfg: &ExperimentConfig,
    geometry: &ArrayGeometry,
    offset_deg: f64,
    count: usize,
    variant: u64,
) -> Result<AttackerConfig> {
    let theta_deg = cfg.scenario.theta_deg;
    let angles: Vec<f64> = (0..count)
        .map(|l| {
            let extra = cfg.attacker.component_offsets_deg.get(l).copied().unwrap_or(0.0);
            (theta_deg + offset_deg + extra).to_radians()
        })
        .collect();
    let strategy = match cfg.attacker.strategy {
        StrategyKind::Explicit => {
            let q = if cfg.attacker.precoding.is_empty() || cfg.attacker.precoding.len() != count {
                vec![Complex64::new(1.0 / (count as f64).sqrt(), 0.0); count]
            } else {
                cfg.attacker
                    .precoding
                    .iter()
                    .map(|&[re, im]| Complex64::new(re, im))
                    .collect()
            };
            PrecodingStrategy::Explicit(q)
        }
        StrategyKind::RandomPhase => {
            return AttackerConfig::from_parts(
                &angles,
                &random_phase_precoding_seeded(count, cfg.mc.seed, variant),
            )
        }
        StrategyKind::WorstCase => PrecodingStrategy::WorstCase,
        StrategyKind::WorstCaseUnconstrainedMagnitudes => {
            PrecodingStrategy::WorstCaseUnconstrainedMagnitudes
        }
    };
    strategy.attacker(geometry, theta_of(cfg), &angles)
}

fn scenario_for(
    cfg: &ExperimentConfig,
    geometry: &ArrayGeometry,
    offset_deg: f64,
    variant: u64,
    snr_db: f64,
) -> Result<Scenario> {
    let attacker = build_attacker(cfg, geometry, offset_deg, cfg.attacker.count, variant)?;
    Scenario::new(*geometry, theta_of(cfg), attacker, snr_db_to_noise_variance(snr_db))
}

// ---------------------------------------------------------------- bounds

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsRow {
    pub offset_deg: f64,
    pub snr_db: f64,
    pub report: Result<BoundReport>,
}

pub fn bounds_rows(cfg: &ExperimentConfig) -> Result<Vec<BoundsRow>> {
    let geometry = geometry_of(cfg)?;
    let mut rows = Vec::new();
    for (v, &offset_deg) in cfg.attacker.offsets_deg.iter().enumerate() {
        for snr_db in cfg.snr_points() {
            let report = scenario_for(cfg, &geometry, offset_deg, v as u64, snr_db).map(|s| mcrb(&s));
            rows.push(BoundsRow {
                offset_deg,
                snr_db,
                report,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_bounds(cfg: &ExperimentConfig) -> Result<Output> {
    let rows = bounds_rows(cfg)?;
    let mut failed = 0;
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut rec = vec![format_float(row.offset_deg), format_float(row.snr_db)];
            match &row.report {
                Ok(r) => {
                    rec.push(format_float(snr_db_to_noise_variance(row.snr_db)));
                    rec.extend(
                        [
                            r.gamma,
                            r.eta,
                            r.crb,
                            r.penalty,
                            r.mcrb,
                            r.crb_deg2(),
                            r.penalty_deg2(),
                            r.mcrb_deg2(),
                        ]
                        .map(format_float),
                    );
                    rec.push(String::new());
                }
                Err(e) => {
                    failed += 1;
                    rec.extend(std::iter::repeat_n(String::new(), 9));
                    rec.push(e.to_string());
                }
            }
            rec
        })
        .collect();
    Ok(Output {
        csv: write_csv(&BOUNDS_COLUMNS, &records),
        svg: None,
        failed_rows: failed,
    })
}

// ---------------------------------------------------------------- fig1 / montecarlo

#[derive(Debug, Clone, PartialEq)]
pub struct MsePoint {
    pub variant: usize,
    pub offset_deg: f64,
    pub snr_db: f64,
    pub noise_variance: f64,
    pub mc: McResult,
    pub bounds: BoundReport,
}

/// Monte-Carlo MSE of the ML estimator over every `(offset, snr)` pair.
pub fn mse_sweep(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<MsePoint>> {
    let geometry = geometry_of(cfg)?;
    let grid = GridSearch::new(&geometry, SearchSpec::default());
    let snrs = cfg.snr_points();
    with_pool(opts, || {
        let mut points = Vec::new();
        for (v, &offset_deg) in cfg.attacker.offsets_deg.iter().enumerate() {
            for (i, &snr_db) in snrs.iter().enumerate() {
                let sc = scenario_for(cfg, &geometry, offset_deg, v as u64, snr_db)?;
                let seed = point_seed(cfg.mc.seed, v as u64, i as u64);
                let mc = run_mse_with(&sc, cfg.mc.trials, seed, &grid)?;
                points.push(MsePoint {
                    variant: v,
                    offset_deg,
                    snr_db,
                    noise_variance: sc.noise_variance(),
                    mc,
                    bounds: mcrb(&sc),
                });
            }
        }
        Ok(points)
    })?
}

fn fig1_plot(points: &[MsePoint], offsets: &[f64]) -> LinePlot {
    let mut series = Vec::new();
    for (v, &off) in offsets.iter().enumerate() {
        let pts: Vec<&MsePoint> = points.iter().filter(|p| p.variant == v).collect();
        series.push(
            Series::line(
                format!("MSE, Δ={off}°"),
                pts.iter().map(|p| (p.snr_db, p.mc.mse)).collect(),
            )
            .with_markers(),
        );
        series.push(
            Series::line(
                format!("MCRB, Δ={off}°"),
                pts.iter().map(|p| (p.snr_db, p.bounds.mcrb)).collect(),
            )
            .dashed(),
        );
    }
    let crb: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.variant == 0)
        .map(|p| (p.snr_db, p.bounds.crb))
        .collect();
    series.push(Series::line("CRB", crb));
    LinePlot {
        title: "ML AoA estimation under spoofing: MSE vs SNR".into(),
        x_label: "SNR [dB]".into(),
        y_label: "MSE [rad²]".into(),
        log_y: true,
        series,
    }
}

pub fn cmd_fig1(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Output> {
    let points = mse_sweep(cfg, opts)?;
    let records: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut rec: Vec<String> = [
                p.offset_deg,
                p.snr_db,
                p.noise_variance,
                p.mc.mse,
                p.mc.standard_error,
                p.bounds.crb,
                p.bounds.mcrb,
                p.mc.mse * DEG2_PER_RAD2,
                p.bounds.crb_deg2(),
                p.bounds.mcrb_deg2(),
            ]
            .map(format_float)
            .to_vec();
            rec.push(p.mc.trials.to_string());
            rec.push(p.mc.seed.to_string());
            rec
        })
        .collect();
    Ok(Output {
        csv: write_csv(&FIG1_COLUMNS, &records),
        svg: Some(fig1_plot(&points, &cfg.attacker.offsets_deg).render()),
        failed_rows: 0,
    })
}

pub fn cmd_montecarlo(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Output> {
    let points = mse_sweep(cfg, opts)?;
    let records: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut rec = vec![p.variant.to_string()];
            rec.extend(
                [
                    p.offset_deg,
                    p.snr_db,
                    p.mc.mse,
                    p.mc.standard_error,
                    p.bounds.crb,
                    p.bounds.mcrb,
                ]
                .map(format_float),
            );
            rec.push(p.mc.trials.to_string());
            rec.push(p.mc.seed.to_string());
            rec
        })
        .collect();
    Ok(Output {
        csv: write_csv(&MONTECARLO_COLUMNS, &records),
        svg: None,
        failed_rows: 0,
    })
}

// ---------------------------------------------------------------- fig2

#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyPoint {
    pub elements: usize,
    pub offset_deg: f64,
    pub report: BoundReport,
}

/// Mismatch penalty over the offset grid for each array size. The penalty does
/// not depend on the noise level, which is pinned at 1 here.
pub fn penalty_grid(cfg: &ExperimentConfig) -> Result<Vec<PenaltyPoint>> {
    let mut points = Vec::new();
    for &m in &cfg.fig2.elements {
        let geometry = ArrayGeometry::new(m, cfg.geometry.spacing_ratio)
            .map_err(|e| Error::config("fig2.elements", e.to_string()))?;
        for (v, offset_deg) in cfg.fig2_offsets().into_iter().enumerate() {
            let attacker = build_attacker(cfg, &geometry, offset_deg, cfg.attacker.count, v as u64)?;
            let sc = Scenario::new(geometry, theta_of(cfg), attacker, 1.0)?;
            points.push(PenaltyPoint {
                elements: m,
                offset_deg,
                report: mcrb(&sc),
            });
        }
    }
    Ok(points)
}

pub fn cmd_fig2(cfg: &ExperimentConfig) -> Result<Output> {
    let points = penalty_grid(cfg)?;
    let records: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut rec = vec![p.elements.to_string()];
            rec.extend(
                [
                    p.offset_deg,
                    p.report.gamma,
                    p.report.eta,
                    p.report.penalty,
                    p.report.penalty_deg2(),
                ]
                .map(format_float),
            );
            rec
        })
        .collect();
    let series = cfg
        .fig2
        .elements
        .iter()
        .map(|&m| {
            Series::line(
                format!("M={m}"),
                points
                    .iter()
                    .filter(|p| p.elements == m)
                    .map(|p| (p.offset_deg, p.report.penalty))
                    .collect(),
            )
        })
        .collect();
    let plot = LinePlot {
        title: "MCRB mismatch penalty vs angular offset".into(),
        x_label: "Δ [deg]".into(),
        y_label: "penalty [rad²]".into(),
        log_y: true,
        series,
    };
    Ok(Output {
        csv: write_csv(&FIG2_COLUMNS, &records),
        svg: Some(plot.render()),
        failed_rows: 0,
    })
}

// ---------------------------------------------------------------- fig3

#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingFloor {
    pub count: usize,
    pub offset_deg: f64,
    /// Mean penalty over the random-phase realizations.
    pub penalty_avg: f64,
    pub penalty_worst: f64,
    pub realizations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig3Point {
    pub count: usize,
    pub snr_db: f64,
    pub noise_variance: f64,
    pub crb: f64,
    pub penalty_avg: f64,
    pub penalty_worst: f64,
    pub mcrb_avg: f64,
    pub mcrb_worst: f64,
}

/// Average (random phase) and worst-case penalties for an `count`-antenna
/// attacker with every component at `theta + offset`.
pub fn precoding_floor(cfg: &ExperimentConfig, count: usize, opts: RunOptions) -> Result<PrecodingFloor> {
    use rayon::prelude::*;

    let geometry = geometry_of(cfg)?;
    let theta = theta_of(cfg);
    let offset_deg = cfg.fig3.offset_deg;
    let angles = vec![(cfg.scenario.theta_deg + offset_deg).to_radians(); count];
    let base = Scenario::new(geometry, theta, AttackerConfig::no_attack(theta)?, 1.0)?;
    let seed = point_seed(cfg.mc.seed, count as u64, u64::MAX);
    let realizations = cfg.attacker.realizations;
    let penalties: Vec<f64> = with_pool(opts, || {
        (0..realizations as u64)
            .into_par_iter()
            .map(|i| {
                let q = random_phase_precoding_seeded(count, seed, i);
                let att = AttackerConfig::from_parts(&angles, &q)?;
                Ok(mcrb(&base.with_attacker(att)).penalty)
            })
            .collect::<Result<Vec<f64>>>()
    })??;
    let worst = AttackerConfig::from_parts(&angles, &worst_case_precoding(&geometry, theta, &angles)?)?;
    Ok(PrecodingFloor {
        count,
        offset_deg,
        penalty_avg: compensated_sum(&penalties) / realizations as f64,
        penalty_worst: mcrb(&base.with_attacker(worst)).penalty,
        realizations,
    })
}

pub fn fig3_points(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Vec<Fig3Point>> {
    let geometry = geometry_of(cfg)?;
    let theta = theta_of(cfg);
    let mut points = Vec::new();
    for &count in &cfg.fig3.counts {
        let floor = precoding_floor(cfg, count, opts)?;
        for snr_db in cfg.snr_points() {
            let sc = Scenario::new(
                geometry,
                theta,
                AttackerConfig::no_attack(theta)?,
                snr_db_to_noise_variance(snr_db),
            )?;
            let crb = crate::bounds::crb(&sc);
            points.push(Fig3Point {
                count,
                snr_db,
                noise_variance: sc.noise_variance(),
                crb,
                penalty_avg: floor.penalty_avg,
                penalty_worst: floor.penalty_worst,
                mcrb_avg: crb + floor.penalty_avg,
                mcrb_worst: crb + floor.penalty_worst,
            });
        }
    }
    Ok(points)
}

pub fn cmd_fig3(cfg: &ExperimentConfig, opts: RunOptions) -> Result<Output> {
    let points = fig3_points(cfg, opts)?;
    let records: Vec<Vec<String>> = points
        .iter()
        .map(|p| {
            let mut rec = vec![p.count.to_string()];
            rec.extend(
                [
                    cfg.fig3.offset_deg,
                    p.snr_db,
                    p.noise_variance,
                    p.crb,
                    p.penalty_avg,
                    p.penalty_worst,
                    p.mcrb_avg,
                    p.mcrb_worst,
                    p.crb * DEG2_PER_RAD2,
                    p.mcrb_avg * DEG2_PER_RAD2,
                    p.mcrb_worst * DEG2_PER_RAD2,
                ]
                .map(format_float),
            );
            rec.push(cfg.attacker.realizations.to_string());
            rec
        })
        .collect();
    let mut series = Vec::new();
    for &count in &cfg.fig3.counts {
        let of = |f: fn(&Fig3Point) -> f64| -> Vec<(f64, f64)> {
            points
                .iter()
                .filter(|p| p.count == count)
                .map(|p| (p.snr_db, f(p)))
                .collect()
        };
        series.push(Series::line(format!("avg MCRB, L={count}"), of(|p| p.mcrb_avg)));
        series.push(Series::line(format!("worst MCRB, L={count}"), of(|p| p.mcrb_worst)).dashed());
    }
    if let Some(&first) = cfg.fig3.counts.first() {
        series.push(Series::line(
            "CRB",
            points
                .iter()
                .filter(|p| p.count == first)
                .map(|p| (p.snr_db, p.crb))
                .collect(),
        ));
    }
    let plot = LinePlot {
        title: format!("Average and worst-case MCRB vs SNR, Δ={}°", cfg.fig3.offset_deg),
        x_label: "SNR [dB]".into(),
        y_label: "bound [rad²]".into(),
        log_y: true,
        series,
    };
    Ok(Output {
        csv: write_csv(&FIG3_COLUMNS, &records),
        svg: Some(plot.render()),
        failed_rows: 0,
    })
}
