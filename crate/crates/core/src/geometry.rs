//! The unit disc model.
//!
//! # Metric convention
//!
//! The Bergman kernel of the disc is `K(z,w) = 1/(π(1 − z w̄)²)` and the
//! Bergman metric density is `g = ∂²log K/∂z∂z̄ = 2/(1 − |z|²)²`. Lengths are
//! measured with the line element `ds² = 2·g·|dz|² = 4|dz|²/(1 − |z|²)²`, the
//! curvature −1 Poincaré metric. Under this convention the distance
//!
//! ```text
//! ρ(z, w) = 2·asinh(|z − w| / sqrt((1 − |z|²)(1 − |w|²)))
//!         = 2·atanh|(z − w)/(1 − z̄ w)|
//! ```
//!
//! satisfies `2|∂̄ρ|²_ω = 1` with `|·|_ω` taken against `g`, so ρ is
//! 1-Lipschitz. Every radius in the crate (orbit balls, injectivity radii,
//! density radii) is measured in this ρ.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with `|z| ≥ 1 − BOUNDARY_GUARD` are rejected.
pub const BOUNDARY_GUARD: f64 = 1e-12;

/// Allowed drift of `|α|² − |β|²` away from 1.
pub const UNITARY_TOLERANCE: f64 = 1e-10;

/// A point of the open unit disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Complex64", into = "Complex64")]
pub struct DiscPoint(Complex64);

impl DiscPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        let modulus = z.norm();
        if !(modulus < 1.0 - BOUNDARY_GUARD) {
            return Err(Error::BoundaryPoint {
                re: z.re,
                im: z.im,
                modulus,
            });
        }
        Ok(DiscPoint(z))
    }

    pub fn from_re_im(re: f64, im: f64) -> Result<Self> {
        Self::new(Complex64::new(re, im))
    }

    pub const fn origin() -> Self {
        DiscPoint(Complex64::new(0.0, 0.0))
    }

    /// Point at hyperbolic distance `r` from the origin in direction `theta`.
    pub fn polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex64::from_polar((r / 2.0).tanh(), theta))
    }

    #[inline]
    pub fn z(self) -> Complex64 {
        self.0
    }

    /// `1 − |z|²`, computed without cancellation near the boundary.
    #[inline]
    pub fn one_minus_norm_sqr(self) -> f64 {
        one_minus_norm_sqr(self.0)
    }
}

impl TryFrom<Complex64> for DiscPoint {
    type Error = Error;
    fn try_from(z: Complex64) -> Result<Self> {
        DiscPoint::new(z)
    }
}

impl From<DiscPoint> for Complex64 {
    fn from(p: DiscPoint) -> Complex64 {
        p.0
    }
}

#[inline]
pub(crate) fn one_minus_norm_sqr(z: Complex64) -> f64 {
    let r = z.norm();
    (1.0 - r) * (1.0 + r)
}

/// A disc automorphism `z ↦ (αz + β)/(β̄z + ᾱ)` stored as an SU(1,1) pair.
///
/// Elements are compared in PSU(1,1): `(α, β)` and `(−α, −β)` act identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        alpha: Complex64::new(1.0, 0.0),
        beta: Complex64::new(0.0, 0.0),
    };

    /// Checked constructor; rejects pairs off the SU(1,1) hyperboloid.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let g = Isometry { alpha, beta };
        let residual = g.unitarity_residual();
        if !(residual.abs() <= UNITARY_TOLERANCE) {
            return Err(Error::NonUnitary { residual });
        }
        Ok(g)
    }

    /// Rotation `z ↦ e^{iθ} z`.
    pub fn rotation(theta: f64) -> Self {
        Isometry {
            alpha: Complex64::from_polar(1.0, theta / 2.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    /// Hyperbolic translation by distance `d` along the direction `theta`,
    /// mapping the origin to `tanh(d/2)·e^{iθ}`.
    pub fn translation(d: f64, theta: f64) -> Self {
        Isometry {
            alpha: Complex64::new((d / 2.0).cosh(), 0.0),
            beta: Complex64::from_polar((d / 2.0).sinh(), theta),
        }
    }

    /// The automorphism exchanging `0` and `a`, composed so that it maps 0 to `a`.
    pub fn moving_origin_to(a: DiscPoint) -> Self {
        let s = 1.0 / a.one_minus_norm_sqr().sqrt();
        Isometry {
            alpha: Complex64::new(s, 0.0),
            beta: a.z() * s,
        }
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr() - 1.0
    }

    pub fn renormalized(self) -> Self {
        let det = self.alpha.norm_sqr() - self.beta.norm_sqr();
        let s = 1.0 / det.sqrt();
        Isometry {
            alpha: self.alpha * s,
            beta: self.beta * s,
        }
    }

    pub fn inverse(&self) -> Self {
        Isometry {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    /// Matrix product `self · rhs` (apply `rhs` first), re-normalized.
    pub fn compose(&self, rhs: &Isometry) -> Isometry {
        Isometry {
            alpha: self.alpha * rhs.alpha + self.beta * rhs.beta.conj(),
            beta: self.alpha * rhs.beta + self.beta * rhs.alpha.conj(),
        }
        .renormalized()
    }

    /// Max-norm distance between the matrices, minimized over the global sign.
    pub fn psu_distance(&self, other: &Isometry) -> f64 {
        let plus = (self.alpha - other.alpha).norm().max((self.beta - other.beta).norm());
        let minus = (self.alpha + other.alpha).norm().max((self.beta + other.beta).norm());
        plus.min(minus)
    }

    /// `β̄z + ᾱ`, the denominator of the action.
    #[inline]
    pub(crate) fn denominator(&self, z: Complex64) -> Complex64 {
        self.beta.conj() * z + self.alpha.conj()
    }

    /// Action on a raw coordinate, no validation.
    #[inline]
    pub fn act(&self, z: Complex64) -> Complex64 {
        (self.alpha * z + self.beta) / self.denominator(z)
    }

    /// Jacobian `γ′(z) = 1/(β̄z + ᾱ)²` on a raw coordinate, no validation.
    #[inline]
    pub fn jac(&self, z: Complex64) -> Complex64 {
        let d = self.denominator(z);
        1.0 / (d * d)
    }

    /// Derivative of the Jacobian, `j′(z) = −2β̄/(β̄z + ᾱ)³`.
    #[inline]
    pub fn jac_derivative(&self, z: Complex64) -> Complex64 {
        let d = self.denominator(z);
        -2.0 * self.beta.conj() / (d * d * d)
    }

    /// ρ(x, γx).
    pub fn displacement(&self, x: DiscPoint) -> f64 {
        raw_distance(x.z(), self.act(x.z()))
    }

    fn check(&self) -> Result<()> {
        let residual = self.unitarity_residual();
        if !(residual.abs() <= UNITARY_TOLERANCE) {
            return Err(Error::NonUnitary { residual });
        }
        Ok(())
    }
}

impl Mul for Isometry {
    type Output = Isometry;
    fn mul(self, rhs: Isometry) -> Isometry {
        self.compose(&rhs)
    }
}

/// γ(z) for a unitary-normalized γ.
pub fn mobius_apply(g: &Isometry, z: DiscPoint) -> Result<DiscPoint> {
    g.check()?;
    DiscPoint::new(g.act(z.z()))
}

/// The complex Jacobian `j_γ(z)`.
pub fn jacobian(g: &Isometry, z: DiscPoint) -> Result<Complex64> {
    g.check()?;
    Ok(g.jac(z.z()))
}

/// `K(z, w) = 1/(π(1 − z w̄)²)`.
pub fn bergman_kernel(z: DiscPoint, w: DiscPoint) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - z.z() * w.z().conj();
    1.0 / (PI * d * d)
}

/// `K(z, z)`, real and positive.
pub fn bergman_kernel_diag(z: DiscPoint) -> f64 {
    let d = z.one_minus_norm_sqr();
    1.0 / (PI * d * d)
}

/// `g(z) = ∂²log K/∂z∂z̄ = 2/(1 − |z|²)²`.
pub fn bergman_metric(z: DiscPoint) -> f64 {
    let d = z.one_minus_norm_sqr();
    2.0 / (d * d)
}

/// Geodesic distance under the crate's metric convention.
pub fn distance(z: DiscPoint, w: DiscPoint) -> f64 {
    raw_distance(z.z(), w.z())
}

#[inline]
pub(crate) fn raw_distance(z: Complex64, w: Complex64) -> f64 {
    let num = (z - w).norm();
    if num == 0.0 {
        return 0.0;
    }
    let den = (one_minus_norm_sqr(z) * one_minus_norm_sqr(w)).sqrt();
    2.0 * (num / den).asinh()
}

/// `|∂̄ log K|²_ω(z) = |2z/(1 − |z|²)|² / g(z) = 2|z|²`.
pub fn dbar_log_kernel_norm_sqr(z: DiscPoint) -> f64 {
    let d = z.one_minus_norm_sqr();
    let dbar = 2.0 * z.z() / d;
    dbar.norm_sqr() / bergman_metric(z)
}

#[derive(Debug, Clone, Serialize)]
pub struct DfConstant {
    /// Maximum of `|∂̄ log K|²_ω` over the radial grid.
    pub grid_sup: f64,
    /// Closed-form supremum over the disc.
    pub analytic_sup: f64,
    /// The Siegel-domain bound `p + 2q` with `(p, q) = (0, 1)` for the disc.
    pub ishi_bound: f64,
    pub value_at_center: f64,
    pub grid_points: usize,
}

/// `C(Ω) = sup |∂̄ log K|²_ω` for the disc, by a radial grid scan.
///
/// The quantity is rotation invariant, so a scan over `r ∈ [0, 1 − guard)` on
/// the real axis is exhaustive up to grid resolution.
pub fn df_constant(grid_points: usize) -> DfConstant {
    let n = grid_points.max(2);
    let r_max = 1.0 - 2.0 * BOUNDARY_GUARD;
    let grid_sup = (0..n)
        .map(|i| {
            // cluster toward the boundary, where the supremum is approached
            let u = i as f64 / (n - 1) as f64;
            let r = r_max * (1.0 - (1.0 - u).powi(3));
            dbar_log_kernel_norm_sqr(DiscPoint(Complex64::new(r, 0.0)))
        })
        .fold(0.0, f64::max);
    DfConstant {
        grid_sup,
        analytic_sup: 2.0,
        ishi_bound: 2.0,
        value_at_center: dbar_log_kernel_norm_sqr(DiscPoint::origin()),
        grid_points: n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_isometry(d: f64, theta: f64, phi: f64) -> Isometry {
        Isometry::rotation(phi) * Isometry::translation(d, theta)
    }

    prop_compose! {
        fn disc_point()(r in 0.0..0.95f64, t in 0.0..std::f64::consts::TAU) -> DiscPoint {
            DiscPoint::new(Complex64::from_polar(r, t)).unwrap()
        }
    }

    prop_compose! {
        fn isometry()(d in 0.0..4.0f64, t in 0.0..6.3f64, p in 0.0..6.3f64) -> Isometry {
            random_isometry(d, t, p)
        }
    }

    #[test]
    fn identity_fixes_points() {
        let z = DiscPoint::from_re_im(0.3, 0.1).unwrap();
        let w = mobius_apply(&Isometry::IDENTITY, z).unwrap();
        assert_eq!(w.z(), c(0.3, 0.1));
        assert_eq!(jacobian(&Isometry::IDENTITY, z).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn sqrt2_example_sends_origin_to_inverse_sqrt2() {
        let g = Isometry::new(c(2f64.sqrt(), 0.0), c(1.0, 0.0)).unwrap();
        let w = mobius_apply(&g, DiscPoint::origin()).unwrap();
        assert!((w.z() - c(1.0 / 2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_and_boundary() {
        assert!(matches!(
            Isometry::new(c(1.0, 0.0), c(0.5, 0.0)),
            Err(Error::NonUnitary { .. })
        ));
        assert!(matches!(
            DiscPoint::from_re_im(1.0, 0.0),
            Err(Error::BoundaryPoint { .. })
        ));
        assert!(DiscPoint::from_re_im(1.0 - 1e-13, 0.0).is_err());
        assert!(DiscPoint::new(c(f64::NAN, 0.0)).is_err());
        let skewed = Isometry {
            alpha: c(1.0, 0.0),
            beta: c(0.1, 0.0),
        };
        assert!(mobius_apply(&skewed, DiscPoint::origin()).is_err());
    }

    #[test]
    fn kernel_and_metric_at_center() {
        let o = DiscPoint::origin();
        assert!((bergman_kernel(o, o).re - 1.0 / PI).abs() < 1e-16);
        assert!((bergman_kernel(o, o).re - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
        assert_eq!(bergman_metric(o), 2.0);
    }

    #[test]
    fn kernel_reproduces_constant_by_quadrature() {
        // ∫ K(0, w) dλ(w) = 1: K(0, w) = 1/π is constant, the disc has area π.
        // Polar midpoint rule, independent of any library quadrature.
        let (nr, nt) = (400, 64);
        let mut total = 0.0;
        for i in 0..nr {
            let r = (i as f64 + 0.5) / nr as f64;
            for j in 0..nt {
                let w = DiscPoint::new(Complex64::from_polar(r, j as f64 * 2.0 * PI / nt as f64)).unwrap();
                total += bergman_kernel(DiscPoint::origin(), w).re * r * (1.0 / nr as f64) * (2.0 * PI / nt as f64);
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distance_matches_line_element_quadrature() {
        // ∫₀^½ sqrt(2·g(t)) dt with g = 2/(1 − t²)², Simpson's rule.
        let n = 2000;
        let h = 0.5 / n as f64;
        let f = |t: f64| (2.0 * 2.0 / (1.0 - t * t).powi(2)).sqrt();
        let mut s = f(0.0) + f(0.5);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        let oracle = s * h / 3.0;
        let rho = distance(DiscPoint::origin(), DiscPoint::from_re_im(0.5, 0.0).unwrap());
        assert!((rho - oracle).abs() < 1e-12, "{rho} vs {oracle}");
        assert!((rho - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn laplacian_of_log_kernel_is_four_g() {
        let h = 1e-4;
        let log_k = |z: Complex64| bergman_kernel_diag(DiscPoint::new(z).unwrap()).ln();
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (-0.5, 0.4), (0.1, 0.7), (0.6, 0.6)] {
            let z = c(x, y);
            let lap =
                (log_k(z + h) + log_k(z - h) + log_k(z + c(0.0, h)) + log_k(z - c(0.0, h)) - 4.0 * log_k(z)) / (h * h);
            let g = bergman_metric(DiscPoint::new(z).unwrap());
            assert!((lap - 4.0 * g).abs() / (4.0 * g) < 1e-6, "{lap} vs {}", 4.0 * g);
        }
    }

    #[test]
    fn dbar_log_kernel_against_finite_differences() {
        // ∂/∂z̄ = (∂x + i∂y)/2, applied to log K by central differences.
        let h = 1e-6;
        let log_k = |z: Complex64| bergman_kernel_diag(DiscPoint::new(z).unwrap()).ln();
        for &(x, y) in &[(0.2, 0.1), (-0.6, 0.3), (0.0, -0.8)] {
            let z = c(x, y);
            let dx = (log_k(z + h) - log_k(z - h)) / (2.0 * h);
            let dy = (log_k(z + c(0.0, h)) - log_k(z - c(0.0, h))) / (2.0 * h);
            let dbar = c(dx, dy) * 0.5;
            let p = DiscPoint::new(z).unwrap();
            let oracle = dbar.norm_sqr() / bergman_metric(p);
            let v = dbar_log_kernel_norm_sqr(p);
            assert!((v - oracle).abs() < 1e-6, "{v} vs {oracle}");
        }
    }

    #[test]
    fn df_constant_respects_siegel_bound() {
        let c = df_constant(10_000);
        assert_eq!(c.value_at_center, 0.0);
        assert!(c.grid_sup <= c.ishi_bound);
        assert!(c.grid_sup <= c.analytic_sup);
        assert!(c.analytic_sup - c.grid_sup < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn jacobian_cocycle(g1 in isometry(), g2 in isometry(), z in disc_point()) {
            let lhs = (g1 * g2).jac(z.z());
            let rhs = g1.jac(g2.act(z.z())) * g2.jac(z.z());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
        }

        #[test]
        fn composition_acts_as_double_application(g1 in isometry(), g2 in isometry(), z in disc_point()) {
            let a = (g1 * g2).act(z.z());
            let b = g1.act(g2.act(z.z()));
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn jacobian_modulus_identity(g in isometry(), z in disc_point()) {
            let lhs = g.jac(z.z()).norm() * z.one_minus_norm_sqr();
            let rhs = one_minus_norm_sqr(g.act(z.z()));
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn kernel_and_metric_transform(g in isometry(), z in disc_point()) {
            let gz = mobius_apply(&g, z).unwrap();
            let j2 = g.jac(z.z()).norm_sqr();
            let k = bergman_kernel_diag(z);
            prop_assert!((bergman_kernel_diag(gz) * j2 - k).abs() <= 1e-12 * k);
            let m = bergman_metric(z);
            prop_assert!((bergman_metric(gz) * j2 - m).abs() <= 1e-12 * m);
        }

        #[test]
        fn distance_is_invariant(g in isometry(), z in disc_point(), w in disc_point()) {
            let d0 = distance(z, w);
            let d1 = distance(mobius_apply(&g, z).unwrap(), mobius_apply(&g, w).unwrap());
            prop_assert!((d0 - d1).abs() < 1e-10);
            prop_assert_eq!(distance(z, z), 0.0);
        }

        #[test]
        fn triangle_inequality(a in disc_point(), b in disc_point(), c in disc_point()) {
            prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-10);
        }

        #[test]
        fn kernel_is_radially_monotone(z in disc_point()) {
            let k = bergman_kernel_diag(z);
            for i in 1..=20 {
                let t = i as f64 / 20.0;
                let tz = DiscPoint::new(z.z() * t).unwrap();
                prop_assert!(bergman_kernel_diag(tz) <= k);
            }
        }
    }
}
