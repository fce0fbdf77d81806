//! Mismatched maximum-likelihood AoA estimation and the seeded Monte-Carlo
//! harness built on it.
//!
//! The estimator assumes `x = a(theta) + n` and maximizes `Re{a(theta)^H x}`,
//! which is equivalent to minimizing `||x - a(theta)||^2` because
//! `||a(theta)||^2 = M` does not depend on `theta`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::bounds::Scenario;
use crate::error::{Error, Result};
use crate::spoofing::spoofed_mean;
use crate::ula::ArrayGeometry;

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9;

/// One array snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub samples: Vec<Complex64>,
}

/// Coarse grid spacing and final refinement tolerance, both in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSpec {
    pub coarse_step: f64,
    pub tolerance: f64,
}

impl Default for SearchSpec {
    fn default() -> Self {
        Self {
            coarse_step: 0.02f64.to_radians(),
            tolerance: 1e-7,
        }
    }
}

/// Precomputed coarse grid for one array geometry. Build once, reuse across
/// snapshots.
#[derive(Debug, Clone)]
pub struct GridSearch {
    geometry: ArrayGeometry,
    spec: SearchSpec,
    angles: Vec<f64>,
    // conj(a(theta_i)) split into real and imaginary planes, row-major
    table_re: Vec<f64>,
    table_im: Vec<f64>,
}

impl GridSearch {
    pub fn new(geometry: &ArrayGeometry, spec: SearchSpec) -> Self {
        let intervals = (std::f64::consts::PI / spec.coarse_step).round().max(1.0) as usize;
        let step = std::f64::consts::PI / intervals as f64;
        let angles: Vec<f64> = (0..=intervals)
            .map(|i| (-FRAC_PI_2 + i as f64 * step).clamp(-FRAC_PI_2, FRAC_PI_2))
            .collect();
        let m = geometry.num_elements();
        let kappa = geometry.wavenumber();
        let mut table_re = Vec::with_capacity(angles.len() * m);
        let mut table_im = Vec::with_capacity(angles.len() * m);
        for &theta in &angles {
            let phase = kappa * theta.sin();
            for k in 0..m {
                let (s, c) = (phase * k as f64).sin_cos();
                table_re.push(c);
                table_im.push(s);
            }
        }
        Self {
            geometry: *geometry,
            spec,
            angles,
            table_re,
            table_im,
        }
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn grid_len(&self) -> usize {
        self.angles.len()
    }

    /// `Re{a(theta)^H x}`.
    pub fn objective(&self, x: &[Complex64], theta: f64) -> f64 {
        let phase = self.geometry.wavenumber() * theta.sin();
        x.iter()
            .enumerate()
            .map(|(k, xk)| {
                let (s, c) = (phase * k as f64).sin_cos();
                c * xk.re - s * xk.im
            })
            .sum()
    }

    fn coarse(&self, x: &[Complex64]) -> usize {
        let m = x.len();
        let (xr, xi): (Vec<f64>, Vec<f64>) = x.iter().map(|v| (v.re, v.im)).unzip();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (i, (cr, ci)) in self
            .table_re
            .chunks_exact(m)
            .zip(self.table_im.chunks_exact(m))
            .enumerate()
        {
            let mut val = 0.0;
            for k in 0..m {
                val += cr[k] * xr[k] - ci[k] * xi[k];
            }
            // strict comparison keeps the smallest angle among ties
            if val > best_val {
                best_val = val;
                best = i;
            }
        }
        best
    }

    /// Global maximizer of `Re{a(theta)^H x}`: coarse grid pass, then golden
    /// section refinement within one grid step of the best point.
    pub fn maximize(&self, x: &[Complex64]) -> f64 {
        let i = self.coarse(x);
        let grid_theta = self.angles[i];
        let lo_idx = i.saturating_sub(1);
        let hi_idx = (i + 1).min(self.angles.len() - 1);
        let (mut lo, mut hi) = (self.angles[lo_idx], self.angles[hi_idx]);

        let f = |t: f64| self.objective(x, t);
        let mut c = hi - INV_GOLDEN * (hi - lo);
        let mut d = lo + INV_GOLDEN * (hi - lo);
        let (mut fc, mut fd) = (f(c), f(d));
        while hi - lo > self.spec.tolerance {
            if fc >= fd {
                hi = d;
                d = c;
                fd = fc;
                c = hi - INV_GOLDEN * (hi - lo);
                fc = f(c);
            } else {
                lo = c;
                c = d;
                fc = fd;
                d = lo + INV_GOLDEN * (hi - lo);
                fd = f(d);
            }
        }
        let refined = 0.5 * (lo + hi);
        if f(refined) > f(grid_theta) {
            refined
        } else {
            grid_theta
        }
    }
}

/// Maximum-likelihood AoA estimate under the assumed single-path model.
pub fn ml_estimate(snapshot: &Snapshot, geometry: &ArrayGeometry, search: SearchSpec) -> Result<f64> {
    if snapshot.samples.len() != geometry.num_elements() {
        return Err(Error::SnapshotLength {
            expected: geometry.num_elements(),
            got: snapshot.samples.len(),
        });
    }
    Ok(GridSearch::new(geometry, search).maximize(&snapshot.samples))
}

/// Independent ChaCha stream for `(seed, trial_index)`.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn noisy(mean: &[Complex64], noise_variance: f64, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let scale = (0.5 * noise_variance).sqrt();
    mean.iter()
        .map(|s| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            s + Complex64::new(re * scale, im * scale)
        })
        .collect()
}

/// `x = s + n` with `n ~ CN(0, sigma² I)`.
pub fn draw_snapshot(scenario: &Scenario, trial_index: u64, seed: u64) -> Snapshot {
    let mean = spoofed_mean(scenario.geometry(), scenario.attacker());
    let mut rng = trial_rng(seed, trial_index);
    Snapshot {
        samples: noisy(&mean, scenario.noise_variance(), &mut rng),
    }
}

/// Empirical MSE of the ML estimate against the legitimate angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McResult {
    pub mse: f64,
    pub trials: usize,
    pub seed: u64,
    pub standard_error: f64,
    pub snr_db: f64,
}

/// Neumaier-compensated sum, in slice order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Runs `trials` independent single-snapshot trials on the current rayon
/// pool. Squared errors are collected in trial order before summation, so the
/// result is bit-identical for any worker count.
pub fn run_mse(scenario: &Scenario, trials: usize, seed: u64, search: SearchSpec) -> Result<McResult> {
    let grid = GridSearch::new(scenario.geometry(), search);
    run_mse_with(scenario, trials, seed, &grid)
}

pub fn run_mse_with(
    scenario: &Scenario,
    trials: usize,
    seed: u64,
    grid: &GridSearch,
) -> Result<McResult> {
    if trials == 0 {
        return Err(Error::config("mc.trials", "must be at least 1"));
    }
    if grid.geometry() != scenario.geometry() {
        return Err(Error::SnapshotLength {
            expected: scenario.geometry().num_elements(),
            got: grid.geometry().num_elements(),
        });
    }
    let mean = spoofed_mean(scenario.geometry(), scenario.attacker());
    let theta = scenario.theta();
    let sigma2 = scenario.noise_variance();
    let errors: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t);
            let x = noisy(&mean, sigma2, &mut rng);
            let e = grid.maximize(&x) - theta;
            e * e
        })
        .collect();
    let n = trials as f64;
    let mse = compensated_sum(&errors) / n;
    let deviations: Vec<f64> = errors.iter().map(|e| (e - mse) * (e - mse)).collect();
    let standard_error = if trials > 1 {
        (compensated_sum(&deviations) / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(McResult {
        mse,
        trials,
        seed,
        standard_error,
        snr_db: scenario.snr_db(),
    })
}
