//! The spoofing adversary: an `L`-element transmitter whose mean signal at the
//! verifier is `s = sum_l q_l a(theta_l)`.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::error::{Error, Result};
use crate::ula::{check_angle, weighted_geometric_sum, ArrayGeometry};

/// One attacker antenna: where it transmits from and its complex precoding weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpoofComponent {
    pub angle: f64,
    pub precoding: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackerConfig {
    components: Vec<SpoofComponent>,
}

impl AttackerConfig {
    pub fn new(components: Vec<SpoofComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyAttacker);
        }
        for c in &components {
            check_angle("attacker angle", c.angle)?;
            if !(c.precoding.re.is_finite() && c.precoding.im.is_finite()) {
                return Err(Error::Degenerate(format!(
                    "non-finite precoding weight {}",
                    c.precoding
                )));
            }
        }
        Ok(Self { components })
    }

    /// Zips angles with precoding weights; lengths must match.
    pub fn from_parts(angles: &[f64], precoding: &[Complex64]) -> Result<Self> {
        if angles.len() != precoding.len() {
            return Err(Error::config(
                "attacker.precoding",
                format!(
                    "{} precoding weights for {} components",
                    precoding.len(),
                    angles.len()
                ),
            ));
        }
        Self::new(
            angles
                .iter()
                .zip(precoding)
                .map(|(&angle, &precoding)| SpoofComponent { angle, precoding })
                .collect(),
        )
    }

    pub fn single(angle: f64, precoding: Complex64) -> Result<Self> {
        Self::new(vec![SpoofComponent { angle, precoding }])
    }

    /// The attacker that reproduces the legitimate signal exactly.
    pub fn no_attack(theta: f64) -> Result<Self> {
        Self::single(theta, Complex64::new(1.0, 0.0))
    }

    pub fn components(&self) -> &[SpoofComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn angles(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.angle).collect()
    }

    pub fn precoding(&self) -> Vec<Complex64> {
        self.components.iter().map(|c| c.precoding).collect()
    }

    /// `sum_l |q_l|^2`.
    pub fn total_power(&self) -> f64 {
        self.components.iter().map(|c| c.precoding.norm_sqr()).sum()
    }

    /// `sum_l |q_l|`.
    pub fn amplitude_sum(&self) -> f64 {
        self.components.iter().map(|c| c.precoding.norm()).sum()
    }

    /// Every component transmits from `theta`.
    pub fn is_aligned_with(&self, theta: f64) -> bool {
        self.components.iter().all(|c| c.angle == theta)
    }

    /// Whether the aligned-attacker exemption (no mismatch contribution from
    /// components at the legitimate angle) applies. It needs both alignment
    /// and a real-valued effective gain `sum_l q_l`; aligned attackers with a
    /// complex net gain still produce a nonzero mismatch scalar.
    pub fn alignment_exemption_holds(&self, theta: f64) -> bool {
        let gain: Complex64 = self.components.iter().map(|c| c.precoding).sum();
        self.is_aligned_with(theta) && gain.im == 0.0
    }
}

/// The noiseless signal the attacker induces at the array.
pub fn spoofed_mean(geometry: &ArrayGeometry, attacker: &AttackerConfig) -> Vec<Complex64> {
    let mut acc = vec![Complex64::new(0.0, 0.0); geometry.num_elements()];
    for c in attacker.components() {
        // angles were validated when the attacker was built
        let a = geometry
            .steering(c.angle)
            .expect("attacker angles are validated at construction");
        for (s, e) in acc.iter_mut().zip(a.elements()) {
            *s += c.precoding * e;
        }
    }
    acc
}

/// `Delta(theta) = s - a(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MismatchVector {
    pub delta: Vec<Complex64>,
    pub evaluated_at: f64,
}

impl MismatchVector {
    pub fn norm(&self) -> f64 {
        self.delta.iter().map(|d| d.norm_sqr()).sum::<f64>().sqrt()
    }
}

pub fn mismatch_vector(
    geometry: &ArrayGeometry,
    attacker: &AttackerConfig,
    theta: f64,
) -> Result<MismatchVector> {
    let a = geometry.steering(theta)?;
    let mut delta = spoofed_mean(geometry, attacker);
    for (d, e) in delta.iter_mut().zip(a.elements()) {
        *d -= e;
    }
    Ok(MismatchVector {
        delta,
        evaluated_at: theta,
    })
}

/// How the attacker chooses its precoding weights.
#[derive(Debug, Clone, PartialEq)]
pub enum PrecodingStrategy {
    /// Caller-supplied weights.
    Explicit(Vec<Complex64>),
    /// `q_l = exp(j phi_l) / sqrt(L)` with `phi_l ~ U[0, 2pi)`.
    RandomPhase { seed: u64 },
    /// Magnitudes fixed at `1/sqrt(L)`, phases maximizing the mismatch penalty.
    WorstCase,
    /// Magnitudes and phases maximizing the penalty over `sum_l |q_l|^2 <= 1`.
    WorstCaseUnconstrainedMagnitudes,
}

impl PrecodingStrategy {
    pub fn precoding(
        &self,
        geometry: &ArrayGeometry,
        theta: f64,
        angles: &[f64],
    ) -> Result<Vec<Complex64>> {
        match self {
            PrecodingStrategy::Explicit(q) => Ok(q.clone()),
            PrecodingStrategy::RandomPhase { seed } => {
                Ok(random_phase_precoding_seeded(angles.len(), *seed, 0))
            }
            PrecodingStrategy::WorstCase => worst_case_precoding(geometry, theta, angles),
            PrecodingStrategy::WorstCaseUnconstrainedMagnitudes => {
                worst_case_unconstrained_magnitudes(geometry, theta, angles)
            }
        }
    }

    pub fn attacker(
        &self,
        geometry: &ArrayGeometry,
        theta: f64,
        angles: &[f64],
    ) -> Result<AttackerConfig> {
        let q = self.precoding(geometry, theta, angles)?;
        AttackerConfig::from_parts(angles, &q)
    }
}

/// Equal-power weights with independent uniform phases drawn from `rng`.
pub fn random_phase_precoding<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<Complex64> {
    let magnitude = 1.0 / (count as f64).sqrt();
    (0..count)
        .map(|_| Complex64::from_polar(magnitude, rng.random::<f64>() * TAU))
        .collect()
}

/// Random-phase weights for realization `stream` of the given seed. Each
/// `(seed, stream)` pair owns an independent ChaCha stream, so realizations
/// can be generated in any order.
pub fn random_phase_precoding_seeded(count: usize, seed: u64, stream: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    random_phase_precoding(count, &mut rng)
}

fn weighted_sums(geometry: &ArrayGeometry, theta: f64, angles: &[f64]) -> Result<Vec<Complex64>> {
    check_angle("theta", theta)?;
    if angles.is_empty() {
        return Err(Error::EmptyAttacker);
    }
    angles
        .iter()
        .map(|&phi| {
            check_angle("attacker angle", phi)?;
            Ok(weighted_geometric_sum(
                geometry.num_elements(),
                geometry.phase_ratio(theta, phi),
            ))
        })
        .collect()
}

/// Phases `phi_l = pi/2 - arg S_M(r_l)` at magnitude `1/sqrt(L)`, so that every
/// `q_l S_M(r_l)` lands on the positive imaginary axis. Components with
/// `S_M(r_l) = 0` get phase 0.
pub fn worst_case_precoding(
    geometry: &ArrayGeometry,
    theta: f64,
    angles: &[f64],
) -> Result<Vec<Complex64>> {
    let sums = weighted_sums(geometry, theta, angles)?;
    let magnitude = 1.0 / (sums.len() as f64).sqrt();
    Ok(sums
        .iter()
        .map(|s| {
            let phase = if s.norm() == 0.0 { 0.0 } else { FRAC_PI_2 - s.arg() };
            Complex64::from_polar(magnitude, phase)
        })
        .collect())
}

/// Cauchy-Schwarz optimum over the unit power ball: `|q_l| ∝ |S_M(r_l)|`
/// with the same phases as [`worst_case_precoding`]. Falls back to the
/// fixed-magnitude weights when every `S_M(r_l)` vanishes.
pub fn worst_case_unconstrained_magnitudes(
    geometry: &ArrayGeometry,
    theta: f64,
    angles: &[f64],
) -> Result<Vec<Complex64>> {
    let sums = weighted_sums(geometry, theta, angles)?;
    let norm = sums.iter().map(|s| s.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return worst_case_precoding(geometry, theta, angles);
    }
    Ok(sums
        .iter()
        .map(|s| {
            let phase = if s.norm() == 0.0 { 0.0 } else { FRAC_PI_2 - s.arg() };
            Complex64::from_polar(s.norm() / norm, phase)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_attacker_reproduces_steering() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let s = spoofed_mean(&g, &AttackerConfig::no_attack(theta).unwrap());
        assert_eq!(s, g.steering(theta).unwrap().into_elements());
    }

    #[test]
    fn split_attacker_is_linear() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let half = Complex64::new(0.5, 0.0);
        let att = AttackerConfig::from_parts(&[theta, theta], &[half, half]).unwrap();
        let s = spoofed_mean(&g, &att);
        assert!(max_abs_diff(&s, g.steering(theta).unwrap().elements()) < 1e-15);
    }

    #[test]
    fn offset_attacker_matches_per_element_sum() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let phi = deg(10.5);
        let s = spoofed_mean(&g, &AttackerConfig::single(phi, one()).unwrap());
        for (m, v) in s.iter().enumerate() {
            let p = -std::f64::consts::PI * m as f64 * phi.sin();
            assert!((v - Complex64::new(p.cos(), p.sin())).norm() < 1e-14);
        }
    }

    #[test]
    fn mismatch_cases() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let none = mismatch_vector(&g, &AttackerConfig::no_attack(theta).unwrap(), theta).unwrap();
        assert_eq!(none.norm(), 0.0);
        assert_eq!(none.evaluated_at, theta);

        let silent = AttackerConfig::single(deg(40.0), Complex64::new(0.0, 0.0)).unwrap();
        let d = mismatch_vector(&g, &silent, theta).unwrap();
        let a = g.steering(theta).unwrap();
        let neg: Vec<_> = a.elements().iter().map(|e| -e).collect();
        assert_eq!(d.delta, neg);

        let off = AttackerConfig::single(deg(10.5), one()).unwrap();
        assert!(mismatch_vector(&g, &off, theta).unwrap().norm() > 0.0);
    }

    #[test]
    fn attacker_validation() {
        assert_eq!(AttackerConfig::new(vec![]), Err(Error::EmptyAttacker));
        assert!(AttackerConfig::single(2.0, one()).is_err());
        assert!(AttackerConfig::from_parts(&[0.1, 0.2], &[one()]).is_err());
    }

    #[test]
    fn random_phase_power_and_determinism() {
        for count in 1..=8 {
            let q = random_phase_precoding_seeded(count, 42, 3);
            let power: f64 = q.iter().map(|x| x.norm_sqr()).sum();
            assert!((power - 1.0).abs() < 1e-12);
            assert_eq!(q, random_phase_precoding_seeded(count, 42, 3));
        }
        assert!((random_phase_precoding_seeded(1, 7, 0)[0].norm() - 1.0).abs() < 1e-15);
        assert_ne!(
            random_phase_precoding_seeded(4, 42, 0),
            random_phase_precoding_seeded(4, 42, 1)
        );
    }

    #[test]
    fn worst_case_aligned_components() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let q = worst_case_precoding(&g, theta, &[theta; 4]).unwrap();
        let s1 = weighted_geometric_sum(16, one());
        for qi in &q {
            let c = qi * s1;
            assert!((c.im - s1.norm() / 2.0).abs() < 1e-12);
            assert!(c.re.abs() < 1e-12);
        }
    }

    #[test]
    fn unconstrained_magnitudes_have_unit_power() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let angles = [deg(10.3), deg(11.0), deg(14.0)];
        let q = worst_case_unconstrained_magnitudes(&g, theta, &angles).unwrap();
        let power: f64 = q.iter().map(|x| x.norm_sqr()).sum();
        assert!((power - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exemption_needs_real_gain() {
        let theta = deg(10.0);
        assert!(AttackerConfig::no_attack(theta)
            .unwrap()
            .alignment_exemption_holds(theta));
        let complex = AttackerConfig::single(theta, Complex64::new(0.0, 1.0)).unwrap();
        assert!(complex.is_aligned_with(theta));
        assert!(!complex.alignment_exemption_holds(theta));
    }
}
