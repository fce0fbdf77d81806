//! Cramér-Rao and misspecified Cramér-Rao bounds for angle-of-arrival
//! estimation at a uniform linear array facing an `L`-antenna spoofer, plus a
//! seeded Monte-Carlo harness for the mismatched ML estimator.
//!
//! ```
//! use aoa_mcrb::{ArrayGeometry, AttackerConfig, Scenario, mcrb};
//! use num_complex::Complex64;
//!
//! let geometry = ArrayGeometry::half_wavelength(16).unwrap();
//! let theta = 10f64.to_radians();
//! let attacker = AttackerConfig::single(10.5f64.to_radians(), Complex64::new(1.0, 0.0)).unwrap();
//! let report = mcrb(&Scenario::new(geometry, theta, attacker, 1e-3).unwrap());
//! assert!(report.mcrb > report.crb);
//! ```

pub mod bounds;
pub mod error;
pub mod estimation;
pub mod experiments;
pub mod spoofing;
pub mod ula;

pub use bounds::{
    crb, eta, eta_elementwise, fisher_information, k_moment, mcrb, mcrb_explicit, mcrb_sandwich,
    mismatch_penalty, noise_variance_to_snr_db, penalty_upper_bound, pseudo_true_angle, score,
    snr_db_to_noise_variance, BoundReport, Scenario, DEG2_PER_RAD2,
};
pub use error::{Error, Result};
pub use estimation::{draw_snapshot, ml_estimate, run_mse, GridSearch, McResult, SearchSpec, Snapshot};
pub use spoofing::{
    mismatch_vector, random_phase_precoding, random_phase_precoding_seeded, spoofed_mean,
    worst_case_precoding, worst_case_unconstrained_magnitudes, AttackerConfig, MismatchVector,
    PrecodingStrategy, SpoofComponent,
};
pub use ula::{weighted_geometric_sum, weighted_geometric_sum_closed, ArrayGeometry, SteeringVector};
