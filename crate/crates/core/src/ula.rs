//! Steering-vector algebra for a uniform linear array.
//!
//! Element `m` of the steering vector for an arrival angle `theta` is
//! `exp(-j * kappa * m * sin(theta))` with `kappa = 2*pi*d/lambda`. All angles
//! are radians, measured from broadside.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this magnitude of `M * (r - 1)` the closed-form weighted sum is
/// evaluated from its binomial expansion around `r = 1`.
const SERIES_RADIUS: f64 = 0.5;

pub(crate) fn check_angle(what: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && (-FRAC_PI_2..=FRAC_PI_2).contains(&value) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange { what, value })
    }
}

/// A uniform linear array of `M >= 2` isotropic elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    num_elements: usize,
    spacing_ratio: f64,
}

impl ArrayGeometry {
    /// `spacing_ratio` is the element spacing in wavelengths, `d / lambda`.
    pub fn new(num_elements: usize, spacing_ratio: f64) -> Result<Self> {
        if num_elements < 2 {
            return Err(Error::TooFewElements(num_elements));
        }
        if !(spacing_ratio.is_finite() && spacing_ratio > 0.0) {
            return Err(Error::InvalidSpacing(spacing_ratio));
        }
        Ok(Self {
            num_elements,
            spacing_ratio,
        })
    }

    /// Half-wavelength spacing, i.e. `kappa = pi`.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }

    pub fn num_elements(&self) -> usize {
        self.num_elements
    }

    pub fn spacing_ratio(&self) -> f64 {
        self.spacing_ratio
    }

    /// `kappa = 2*pi*d/lambda`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI * self.spacing_ratio
    }

    /// `sum_{m=0}^{M-1} m^2 = (M-1) M (2M-1) / 6`.
    pub fn sum_index_squares(&self) -> f64 {
        let m = self.num_elements as f64;
        (m - 1.0) * m * (2.0 * m - 1.0) / 6.0
    }

    pub fn steering(&self, theta: f64) -> Result<SteeringVector> {
        check_angle("theta", theta)?;
        let phase = self.wavenumber() * theta.sin();
        let elements = (0..self.num_elements)
            .map(|m| Complex64::from_polar(1.0, -phase * m as f64))
            .collect();
        Ok(SteeringVector {
            elements,
            angle: theta,
        })
    }

    /// Derivative of the steering vector with respect to `theta`:
    /// `-j kappa cos(theta) diag(0, 1, .., M-1) a(theta)`.
    pub fn steering_derivative(&self, theta: f64) -> Result<Vec<Complex64>> {
        let a = self.steering(theta)?;
        let scale = self.wavenumber() * theta.cos();
        Ok(a.elements
            .iter()
            .enumerate()
            .map(|(m, &e)| Complex64::new(0.0, -scale * m as f64) * e)
            .collect())
    }

    /// `Gamma(theta) = ||a'(theta)||^2 = kappa^2 cos^2(theta) (M-1)M(2M-1)/6`.
    ///
    /// Returns 0 at `|theta| = pi/2`; the bound engine rejects that case.
    pub fn gamma(&self, theta: f64) -> Result<f64> {
        check_angle("theta", theta)?;
        let kc = self.wavenumber() * theta.cos();
        Ok(kc * kc * self.sum_index_squares())
    }

    /// Phase ratio `r = exp(j kappa (sin(phi) - sin(theta)))`.
    pub fn phase_ratio(&self, theta: f64, phi: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.wavenumber() * (phi.sin() - theta.sin()))
    }

    /// `j kappa cos(theta) S_M(r)` with `r = exp(j kappa (sin(phi) - sin(theta)))`.
    ///
    /// This is the published closed form for `a'(theta)^H a(phi)`. Evaluating
    /// the inner product element by element yields the complex conjugate of the
    /// weighted sum instead, so the two differ by `x -> -conj(x)`.
    pub fn cross_inner_product(&self, theta: f64, phi: f64) -> Result<Complex64> {
        check_angle("theta", theta)?;
        check_angle("phi", phi)?;
        let r = self.phase_ratio(theta, phi);
        let s = weighted_geometric_sum(self.num_elements, r);
        Ok(Complex64::new(0.0, self.wavenumber() * theta.cos()) * s)
    }
}

/// A steering vector together with the angle it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    elements: Vec<Complex64>,
    angle: f64,
}

impl SteeringVector {
    pub fn elements(&self) -> &[Complex64] {
        &self.elements
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn into_elements(self) -> Vec<Complex64> {
        self.elements
    }
}

impl AsRef<[Complex64]> for SteeringVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.elements
    }
}

/// `S_M(r) = sum_{m=0}^{M-1} m r^m` by direct summation.
pub fn weighted_geometric_sum(num_terms: usize, r: Complex64) -> Complex64 {
    let mut power = Complex64::new(1.0, 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 1..num_terms {
        power *= r;
        acc += power * m as f64;
    }
    acc
}

/// `S_M(r)` from the closed form `r (1 - M r^(M-1) + (M-1) r^M) / (1 - r)^2`.
///
/// With `w = r - 1` and `E = r^(M-1) - 1` the numerator is rewritten as
/// `(M-1) w (1 + E) - E`, where `E` comes from a cancellation-free `expm1` of
/// `(M-1) log1p(w)`. When `M |w|` is small the quotient still cancels to
/// second order, so the same function is instead evaluated by its expansion
/// `sum_k w^k [(k+1) C(M, k+2) + k C(M, k+1)]`, which is exact at `r = 1`.
pub fn weighted_geometric_sum_closed(num_terms: usize, r: Complex64) -> Complex64 {
    let m = num_terms as f64;
    let w = r - 1.0;
    if num_terms < 2 {
        return Complex64::new(0.0, 0.0);
    }
    if m * w.norm() <= SERIES_RADIUS {
        return expansion_around_one(num_terms, w);
    }
    let e = complex_expm1(complex_log1p(w) * (m - 1.0));
    let numerator = w * (1.0 + e) * (m - 1.0) - e;
    r * numerator / (w * w)
}

fn expansion_around_one(num_terms: usize, w: Complex64) -> Complex64 {
    let m = num_terms as f64;
    // a_k = C(M, k+2) w^k, b_k = C(M, k+1) w^k
    let mut a = Complex64::new(m * (m - 1.0) / 2.0, 0.0);
    let mut b = Complex64::new(m, 0.0);
    let mut acc = a;
    for k in 1..num_terms {
        let kf = k as f64;
        a *= w * ((m - kf - 1.0) / (kf + 2.0));
        b *= w * ((m - kf) / (kf + 1.0));
        let term = a * (kf + 1.0) + b * kf;
        acc += term;
        if term.norm() <= 1e-18 * acc.norm() {
            break;
        }
    }
    acc
}

fn complex_log1p(w: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * w.re + w.norm_sqr()).ln_1p();
    let im = w.im.atan2(1.0 + w.re);
    Complex64::new(re, im)
}

fn complex_expm1(z: Complex64) -> Complex64 {
    let half = (0.5 * z.im).sin();
    let re = z.re.exp_m1() * z.im.cos() - 2.0 * half * half;
    let im = z.re.exp() * z.im.sin();
    Complex64::new(re, im)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn deg(x: f64) -> f64 {
        x.to_radians()
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn steering_at_broadside_is_all_ones() {
        let g = ArrayGeometry::new(3, 0.5).unwrap();
        for e in g.steering(0.0).unwrap().elements() {
            assert_eq!(*e, Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn steering_at_endfire() {
        let g = ArrayGeometry::new(2, 0.5).unwrap();
        let a = g.steering(FRAC_PI_2).unwrap();
        assert_eq!(a.elements()[0], Complex64::new(1.0, 0.0));
        assert!((a.elements()[1] - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn steering_matches_per_element_evaluation() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let a = g.steering(theta).unwrap();
        for (m, e) in a.elements().iter().enumerate() {
            let phase = -PI * m as f64 * theta.sin();
            assert!((e.re - phase.cos()).abs() < 1e-14);
            assert!((e.im - phase.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn angles_outside_range_are_rejected() {
        let g = ArrayGeometry::half_wavelength(4).unwrap();
        assert!(matches!(
            g.steering(2.0),
            Err(Error::AngleOutOfRange { .. })
        ));
        assert!(g.steering_derivative(-1.6).is_err());
        assert!(g.gamma(f64::NAN).is_err());
        assert!(g.cross_inner_product(0.0, 1.6).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert_eq!(ArrayGeometry::new(1, 0.5), Err(Error::TooFewElements(1)));
        assert!(ArrayGeometry::new(4, 0.0).is_err());
        assert!(ArrayGeometry::new(4, f64::INFINITY).is_err());
        let g = ArrayGeometry::new(8, 0.25).unwrap();
        assert!((g.wavenumber() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn derivative_two_elements_broadside() {
        let g = ArrayGeometry::half_wavelength(2).unwrap();
        let d = g.steering_derivative(0.0).unwrap();
        assert_eq!(d[0], Complex64::new(0.0, 0.0));
        assert!((d[1] - Complex64::new(0.0, -PI)).norm() < 1e-15);
    }

    #[test]
    fn derivative_first_element_is_zero() {
        let g = ArrayGeometry::new(7, 0.3).unwrap();
        for theta in [-1.2, -0.3, 0.0, 0.7, 1.5] {
            assert_eq!(g.steering_derivative(theta).unwrap()[0].norm(), 0.0);
        }
    }

    #[test]
    fn derivative_matches_central_difference() {
        let g = ArrayGeometry::half_wavelength(8).unwrap();
        let theta = deg(10.0);
        let h = 1e-6;
        let plus = g.steering(theta + h).unwrap();
        let minus = g.steering(theta - h).unwrap();
        let d = g.steering_derivative(theta).unwrap();
        for m in 1..8 {
            let fd = (plus.elements()[m] - minus.elements()[m]) / (2.0 * h);
            assert!(rel(d[m], fd) < 1e-6, "m={m}");
        }
    }

    #[test]
    fn gamma_values() {
        let g2 = ArrayGeometry::half_wavelength(2).unwrap();
        assert!((g2.gamma(0.0).unwrap() - PI * PI).abs() < 1e-12);

        let g16 = ArrayGeometry::half_wavelength(16).unwrap();
        let theta = deg(10.0);
        let expected = PI * PI * theta.cos().powi(2) * 1240.0;
        let got = g16.gamma(theta).unwrap();
        assert!((got - expected).abs() / expected < 1e-14);
        let direct: f64 = g16
            .steering_derivative(theta)
            .unwrap()
            .iter()
            .map(|e| e.norm_sqr())
            .sum();
        assert!((got - direct).abs() / direct < 1e-12);
    }

    #[test]
    fn gamma_vanishes_at_endfire() {
        let g = ArrayGeometry::half_wavelength(4).unwrap();
        assert!(g.gamma(FRAC_PI_2).unwrap() < 1e-28);
    }

    #[test]
    fn weighted_sum_small_cases() {
        assert_eq!(
            weighted_geometric_sum(4, Complex64::new(1.0, 0.0)),
            Complex64::new(6.0, 0.0)
        );
        assert_eq!(
            weighted_geometric_sum_closed(4, Complex64::new(1.0, 0.0)),
            Complex64::new(6.0, 0.0)
        );
        assert_eq!(
            weighted_geometric_sum(2, Complex64::new(-1.0, 0.0)),
            Complex64::new(-1.0, 0.0)
        );
        let closed = weighted_geometric_sum_closed(2, Complex64::new(-1.0, 0.0));
        assert!((closed - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert_eq!(weighted_geometric_sum(1, Complex64::new(0.3, 0.2)).norm(), 0.0);
    }

    #[test]
    fn weighted_sum_closed_form_at_half_degree_offset() {
        let g = ArrayGeometry::half_wavelength(16).unwrap();
        let r = g.phase_ratio(deg(10.0), deg(10.5));
        let direct = weighted_geometric_sum(16, r);
        let closed = weighted_geometric_sum_closed(16, r);
        assert!(rel(closed, direct) < 1e-10);
        // the textbook quotient agrees away from r = 1
        let m = 16.0;
        let naive = r * (1.0 - r.powu(15) * m + r.powu(16) * (m - 1.0)) / ((1.0 - r) * (1.0 - r));
        assert!(rel(naive, direct) < 1e-8);
    }

    #[test]
    fn cross_inner_product_self_term_is_imaginary() {
        let g = ArrayGeometry::half_wavelength(9).unwrap();
        let theta = deg(23.0);
        let v = g.cross_inner_product(theta, theta).unwrap();
        assert_eq!(v.re, 0.0);
        assert!((v.im - PI * theta.cos() * 36.0).abs() < 1e-12);
    }

    #[test]
    fn cross_inner_product_endfire_pair() {
        let g = ArrayGeometry::half_wavelength(2).unwrap();
        let v = g.cross_inner_product(0.0, FRAC_PI_2).unwrap();
        assert!((v - Complex64::new(0.0, -PI)).norm() < 1e-14);
    }

    #[test]
    fn cross_inner_product_conjugate_convention() {
        let g = ArrayGeometry::new(11, 0.45).unwrap();
        let (theta, phi) = (deg(-12.0), deg(31.0));
        let d = g.steering_derivative(theta).unwrap();
        let a = g.steering(phi).unwrap();
        let elementwise: Complex64 = d
            .iter()
            .zip(a.elements())
            .map(|(x, y)| x.conj() * y)
            .sum();
        let published = g.cross_inner_product(theta, phi).unwrap();
        assert!(rel(published, -elementwise.conj()) < 1e-10);
    }
}
