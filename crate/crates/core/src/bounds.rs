//! Closed-form bound engine: score, Fisher information, the true-model score
//! moment, the mismatch scalar `eta`, and the classical and misspecified
//! Cramér-Rao bounds.
//!
//! Bounds are in rad². The per-antenna SNR is `1 / sigma²` (unit-modulus
//! pilots), so `snr_db = -10 log10(sigma²)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::estimation::{GridSearch, SearchSpec};
use crate::spoofing::{mismatch_vector, spoofed_mean, AttackerConfig};
use crate::ula::{check_angle, weighted_geometric_sum, ArrayGeometry};

/// Degrees² per rad².
pub const DEG2_PER_RAD2: f64 = (180.0 / std::f64::consts::PI) * (180.0 / std::f64::consts::PI);

pub fn snr_db_to_noise_variance(snr_db: f64) -> f64 {
    10f64.powf(-snr_db / 10.0)
}

pub fn noise_variance_to_snr_db(noise_variance: f64) -> f64 {
    -10.0 * noise_variance.log10()
}

/// Array, legitimate angle, attacker and noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    geometry: ArrayGeometry,
    theta: f64,
    attacker: AttackerConfig,
    noise_variance: f64,
}

impl Scenario {
    pub fn new(
        geometry: ArrayGeometry,
        theta: f64,
        attacker: AttackerConfig,
        noise_variance: f64,
    ) -> Result<Self> {
        check_angle("theta", theta)?;
        if theta.abs() == std::f64::consts::FRAC_PI_2 || theta.cos() <= 0.0 {
            return Err(Error::Degenerate(format!(
                "theta = {theta} rad is at endfire, Fisher information vanishes"
            )));
        }
        if !(noise_variance.is_finite() && noise_variance > 0.0) {
            return Err(Error::InvalidNoiseVariance(noise_variance));
        }
        Ok(Self {
            geometry,
            theta,
            attacker,
            noise_variance,
        })
    }

    pub fn geometry(&self) -> &ArrayGeometry {
        &self.geometry
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn attacker(&self) -> &AttackerConfig {
        &self.attacker
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }

    pub fn snr_db(&self) -> f64 {
        noise_variance_to_snr_db(self.noise_variance)
    }

    pub fn with_noise_variance(&self, noise_variance: f64) -> Result<Self> {
        Self::new(self.geometry, self.theta, self.attacker.clone(), noise_variance)
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Result<Self> {
        self.with_noise_variance(snr_db_to_noise_variance(snr_db))
    }

    pub fn with_attacker(&self, attacker: AttackerConfig) -> Self {
        Self {
            attacker,
            ..self.clone()
        }
    }

    fn gamma(&self) -> f64 {
        self.geometry
            .gamma(self.theta)
            .expect("theta validated at construction")
    }
}

/// Everything the bound engine knows about one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub gamma: f64,
    pub eta: f64,
    pub crb: f64,
    pub penalty: f64,
    pub mcrb: f64,
    pub j_info: f64,
    pub k_moment: f64,
}

impl BoundReport {
    pub fn crb_deg2(&self) -> f64 {
        self.crb * DEG2_PER_RAD2
    }

    pub fn penalty_deg2(&self) -> f64 {
        self.penalty * DEG2_PER_RAD2
    }

    pub fn mcrb_deg2(&self) -> f64 {
        self.mcrb * DEG2_PER_RAD2
    }

    /// The sandwich `K / J^2` rebuilt from the stored moments.
    pub fn sandwich(&self) -> f64 {
        self.k_moment / (self.j_info * self.j_info)
    }
}

/// Score of the assumed model, `(2/sigma²) Re{a'(theta)^H (x - a(theta))}`.
pub fn score(x: &[Complex64], theta: f64, scenario: &Scenario) -> Result<f64> {
    let geometry = scenario.geometry();
    if x.len() != geometry.num_elements() {
        return Err(Error::SnapshotLength {
            expected: geometry.num_elements(),
            got: x.len(),
        });
    }
    let a = geometry.steering(theta)?;
    let d = geometry.steering_derivative(theta)?;
    let inner: Complex64 = d
        .iter()
        .zip(x.iter().zip(a.elements()))
        .map(|(di, (xi, ai))| di.conj() * (xi - ai))
        .sum();
    Ok(2.0 / scenario.noise_variance() * inner.re)
}

/// `J(theta) = 2 Gamma(theta) / sigma²`.
pub fn fisher_information(scenario: &Scenario) -> f64 {
    2.0 * scenario.gamma() / scenario.noise_variance()
}

fn precoded_weighted_sum(scenario: &Scenario) -> Complex64 {
    let g = scenario.geometry();
    let m = g.num_elements();
    scenario
        .attacker()
        .components()
        .iter()
        .map(|c| {
            let r = g.phase_ratio(scenario.theta(), c.angle);
            c.precoding * weighted_geometric_sum(m, r)
        })
        .sum()
}

/// `eta(theta) = -kappa cos(theta) Im{sum_l q_l S_M(r_l)}` with
/// `r_l = exp(j kappa (sin(theta_l) - sin(theta)))`.
pub fn eta(scenario: &Scenario) -> f64 {
    let kc = scenario.geometry().wavenumber() * scenario.theta().cos();
    -kc * precoded_weighted_sum(scenario).im
}

/// `Re{a'(theta)^H Delta(theta)}` evaluated element by element. This is the
/// mean of the score under the spoofed model (times `sigma²/2`). It equals
/// `-eta` of the conjugate-precoded attacker, and `-eta` itself whenever the
/// precoding weights are real.
pub fn eta_elementwise(scenario: &Scenario) -> f64 {
    let g = scenario.geometry();
    let theta = scenario.theta();
    let d = g
        .steering_derivative(theta)
        .expect("theta validated at construction");
    let delta = mismatch_vector(g, scenario.attacker(), theta)
        .expect("theta validated at construction");
    d.iter()
        .zip(&delta.delta)
        .map(|(di, dl)| di.conj() * dl)
        .sum::<Complex64>()
        .re
}

/// Second moment of the score under the spoofed model,
/// `K = (2/sigma²) Gamma + ((2/sigma²) eta)^2`.
pub fn k_moment(scenario: &Scenario) -> f64 {
    let scale = 2.0 / scenario.noise_variance();
    let mean = scale * eta(scenario);
    scale * scenario.gamma() + mean * mean
}

/// `CRB = sigma² / (2 Gamma)`.
pub fn crb(scenario: &Scenario) -> f64 {
    scenario.noise_variance() / (2.0 * scenario.gamma())
}

/// `eta² / Gamma²`; independent of `sigma²`.
pub fn mismatch_penalty(scenario: &Scenario) -> f64 {
    let ratio = eta(scenario) / scenario.gamma();
    ratio * ratio
}

pub fn mcrb(scenario: &Scenario) -> BoundReport {
    let gamma = scenario.gamma();
    let eta = eta(scenario);
    let crb = scenario.noise_variance() / (2.0 * gamma);
    let ratio = eta / gamma;
    let penalty = ratio * ratio;
    let scale = 2.0 / scenario.noise_variance();
    let j_info = scale * gamma;
    let mean = scale * eta;
    BoundReport {
        gamma,
        eta,
        crb,
        penalty,
        mcrb: crb + penalty,
        j_info,
        k_moment: j_info + mean * mean,
    }
}

/// `J^-1 K J^-1`.
pub fn mcrb_sandwich(scenario: &Scenario) -> f64 {
    let j = fisher_information(scenario);
    k_moment(scenario) / (j * j)
}

/// The fully explicit ULA expression
/// `3 sigma² / (kappa² cos²(theta) (M-1)M(2M-1)) + Im{sum q_l S_M(r_l)}² / (kappa² cos²(theta) ((M-1)M(2M-1)/6)²)`.
pub fn mcrb_explicit(scenario: &Scenario) -> f64 {
    let g = scenario.geometry();
    let m = g.num_elements() as f64;
    let kc = g.wavenumber() * scenario.theta().cos();
    let kc2 = kc * kc;
    let cubic = (m - 1.0) * m * (2.0 * m - 1.0);
    let im = precoded_weighted_sum(scenario).im;
    let sixth = cubic / 6.0;
    3.0 * scenario.noise_variance() / (kc2 * cubic) + im * im / (kc2 * sixth * sixth)
}

/// `9 (sum_l |q_l|)^2 / (kappa² cos²(theta) (2M - 1)^2)`, which dominates the
/// mismatch penalty because `|S_M(r)| <= M(M-1)/2` on the unit circle.
pub fn penalty_upper_bound(scenario: &Scenario) -> f64 {
    let g = scenario.geometry();
    let kc = g.wavenumber() * scenario.theta().cos();
    let amplitude = scenario.attacker().amplitude_sum();
    let width = 2.0 * g.num_elements() as f64 - 1.0;
    9.0 * amplitude * amplitude / (kc * kc * width * width)
}

/// Angle minimizing the noiseless residual `||s - a(theta')||^2` over
/// `[-pi/2, pi/2]`, located to within `search_tolerance`.
pub fn pseudo_true_angle(scenario: &Scenario, search_tolerance: f64) -> f64 {
    let spec = SearchSpec {
        tolerance: search_tolerance,
        ..SearchSpec::default()
    };
    let s = spoofed_mean(scenario.geometry(), scenario.attacker());
    GridSearch::new(scenario.geometry(), spec).maximize(&s)
}
