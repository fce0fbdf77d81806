//! Browser bindings. Every function returns a flat `Vec<f64>` (row-major,
//! fixed column count documented per function) or throws a string error.

use aoa_mcrb::experiments::{build_attacker, ExperimentConfig, StrategyKind};
use aoa_mcrb::{
    mcrb, mismatch_penalty, run_mse, snr_db_to_noise_variance, ArrayGeometry, Scenario,
    SearchSpec, DEG2_PER_RAD2,
};
use wasm_bindgen::prelude::*;

fn js_err(e: aoa_mcrb::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn strategy_from(name: &str) -> Result<StrategyKind, aoa_mcrb::Error> {
    match name {
        "explicit" => Ok(StrategyKind::Explicit),
        "random_phase" => Ok(StrategyKind::RandomPhase),
        "worst_case" => Ok(StrategyKind::WorstCase),
        "worst_case_unconstrained_magnitudes" => Ok(StrategyKind::WorstCaseUnconstrainedMagnitudes),
        other => Err(aoa_mcrb::Error::Config {
            key: "attacker.strategy".into(),
            message: format!("unknown strategy `{other}`"),
        }),
    }
}

fn scenario(
    elements: usize,
    theta_deg: f64,
    offset_deg: f64,
    count: usize,
    strategy: &str,
    seed: u64,
    snr_db: f64,
) -> Result<Scenario, aoa_mcrb::Error> {
    let mut cfg = ExperimentConfig::default();
    cfg.geometry.elements = elements;
    cfg.scenario.theta_deg = theta_deg;
    cfg.attacker.count = count;
    cfg.attacker.strategy = strategy_from(strategy)?;
    cfg.mc.seed = seed;
    cfg.validate()?;
    let geometry = ArrayGeometry::half_wavelength(elements)?;
    let attacker = build_attacker(&cfg, &geometry, offset_deg, count, 0)?;
    Scenario::new(
        geometry,
        theta_deg.to_radians(),
        attacker,
        snr_db_to_noise_variance(snr_db),
    )
}

#[allow(clippy::too_many_arguments)]
/// CRB and MCRB (deg²) over an SNR sweep. Rows: `[snr_db, crb_deg2, mcrb_deg2]`.
pub fn bound_curve_native(
    elements: usize,
    theta_deg: f64,
    offset_deg: f64,
    count: usize,
    strategy: &str,
    snr_start: f64,
    snr_stop: f64,
    snr_step: f64,
) -> Result<Vec<f64>, aoa_mcrb::Error> {
    if snr_step.is_nan() || snr_step <= 0.0 || snr_stop < snr_start {
        return Err(aoa_mcrb::Error::Config {
            key: "sweep.snr_db".into(),
            message: "need start <= stop and step > 0".into(),
        });
    }
    let base = scenario(elements, theta_deg, offset_deg, count, strategy, 1, snr_start)?;
    let n = ((snr_stop - snr_start) / snr_step + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        let snr = snr_start + i as f64 * snr_step;
        let r = mcrb(&base.with_snr_db(snr)?);
        out.extend([snr, r.crb_deg2(), r.mcrb_deg2()]);
    }
    Ok(out)
}

/// Mismatch penalty (deg²) vs offset for one array size.
/// Rows: `[offset_deg, penalty_deg2]`, offsets in `(0, offset_stop]`.
pub fn penalty_curve_native(
    elements: usize,
    theta_deg: f64,
    offset_stop_deg: f64,
    points: usize,
) -> Result<Vec<f64>, aoa_mcrb::Error> {
    let points = points.max(2);
    let mut out = Vec::with_capacity(2 * points);
    for i in 1..=points {
        let offset = offset_stop_deg * i as f64 / points as f64;
        let s = scenario(elements, theta_deg, offset, 1, "explicit", 1, 0.0)?;
        out.extend([offset, mismatch_penalty(&s) * DEG2_PER_RAD2]);
    }
    Ok(out)
}

/// One Monte-Carlo point. Returns `[mse_deg2, standard_error_deg2, crb_deg2, mcrb_deg2]`.
pub fn mc_point_native(
    elements: usize,
    theta_deg: f64,
    offset_deg: f64,
    snr_db: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, aoa_mcrb::Error> {
    let s = scenario(elements, theta_deg, offset_deg, 1, "explicit", seed, snr_db)?;
    let mc = run_mse(&s, trials, seed, SearchSpec::default())?;
    let r = mcrb(&s);
    Ok(vec![
        mc.mse * DEG2_PER_RAD2,
        mc.standard_error * DEG2_PER_RAD2,
        r.crb_deg2(),
        r.mcrb_deg2(),
    ])
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn bound_curve(
    elements: usize,
    theta_deg: f64,
    offset_deg: f64,
    count: usize,
    strategy: &str,
    snr_start: f64,
    snr_stop: f64,
    snr_step: f64,
) -> Result<Vec<f64>, JsValue> {
    bound_curve_native(
        elements, theta_deg, offset_deg, count, strategy, snr_start, snr_stop, snr_step,
    )
    .map_err(js_err)
}

#[wasm_bindgen]
pub fn penalty_curve(
    elements: usize,
    theta_deg: f64,
    offset_stop_deg: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    penalty_curve_native(elements, theta_deg, offset_stop_deg, points).map_err(js_err)
}

#[wasm_bindgen]
pub fn mc_point(
    elements: usize,
    theta_deg: f64,
    offset_deg: f64,
    snr_db: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>, JsValue> {
    mc_point_native(elements, theta_deg, offset_deg, snr_db, trials, seed).map_err(js_err)
}
