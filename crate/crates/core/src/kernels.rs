//! Weighted Bergman kernels of the disc and the relative Poincaré round trip.
//!
//! For integer `m ≥ 2` the space of holomorphic `f` with
//! `‖f‖²_{2,m−1} = ∫ |f|² K^{1−m} dλ < ∞` carries the weight
//! `K(z,z)^{1−m} = π^{m−1}(1 − |z|²)^{2m−2}`. Monomials are orthogonal and
//!
//! ```text
//! ‖z^k‖² = π^{m−1} ∫ |z|^{2k} (1 − |z|²)^{2m−2} dλ = π^m B(k + 1, 2m − 1)
//!        = π^m k! (2m − 2)! / (k + 2m − 1)!,
//! ```
//!
//! so `K_m(z,w) = Σ_k (z w̄)^k / ‖z^k‖² = (2m − 1)/π^m · (1 − z w̄)^{−2m}` by
//! the binomial series. [`WeightedKernel::eval_series`] keeps the sum as an
//! independent evaluator.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DiscPoint, Isometry};
use crate::group::{FuchsianGroup, OrbitBall, QuadNode};
use crate::quadrature::PolarGrid;
use crate::series::{self, kernel_power, poincare_eval, NormReport, Seed, MAX_DEGREE};
use crate::summation::{sum_complex, sum_f64, ComplexSum};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightedKernel {
    pub m: u32,
    /// Highest degree kept by the series evaluator.
    pub degree_cap: usize,
}

impl WeightedKernel {
    pub fn new(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!("weight m = {m} must be at least 2")));
        }
        Ok(WeightedKernel { m, degree_cap: 200 })
    }

    pub fn with_degree_cap(mut self, cap: usize) -> Self {
        self.degree_cap = cap;
        self
    }

    /// `(2m − 1)/π^m`, the value `K_m(z, 0)`.
    pub fn leading(&self) -> f64 {
        (2 * self.m - 1) as f64 / PI.powi(self.m as i32)
    }

    /// `‖z^k‖²` for `k = 0..=n`.
    pub fn monomial_norms(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut v = 1.0 / self.leading();
        for k in 0..=n {
            out.push(v);
            v *= (k + 1) as f64 / (k as f64 + 2.0 * self.m as f64);
        }
        out
    }

    pub fn eval(&self, z: DiscPoint, w: DiscPoint) -> Complex64 {
        self.eval_raw(z.z(), w.z())
    }

    pub(crate) fn eval_raw(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.leading() * (1.0 - z * w.conj()).powi(-2 * self.m as i32)
    }

    /// Truncated orthonormal expansion up to `degree_cap`.
    pub fn eval_series(&self, z: DiscPoint, w: DiscPoint) -> Complex64 {
        let t = z.z() * w.z().conj();
        let mut s = ComplexSum::new();
        let mut p = Complex64::new(1.0, 0.0);
        for n in self.monomial_norms(self.degree_cap) {
            s.add(p / n);
            p *= t;
        }
        s.value()
    }
}

/// Uniform random points of the disc `|z| ≤ r_max`.
pub fn sample_disc<R: Rng>(rng: &mut R, n: usize, r_max: f64) -> Vec<DiscPoint> {
    (0..n)
        .map(|_| {
            let r = r_max * rng.gen::<f64>().sqrt();
            let z = Complex64::from_polar(r, rng.gen_range(0.0..2.0 * PI));
            DiscPoint::new(z).expect("radius below one")
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelCheckReport {
    pub m: u32,
    pub samples: usize,
    /// Largest `|K_m(γz,γw) j(z)^m conj(j(w))^m − K_m(z,w)| / |K_m(z,w)|`.
    pub max_transformation_residual: f64,
    /// The same with each γ replaced by γ⁻¹.
    pub max_inverse_residual: f64,
    pub max_hermitian_residual: f64,
    /// Largest relative gap between the closed form and the series.
    pub max_series_relative_error: f64,
    /// Smallest eigenvalue of the Gram matrix over `gram_points`, divided by
    /// the largest.
    pub gram_min_eigenvalue_ratio: f64,
    pub gram_points: usize,
}

/// Transformation law, Hermitian symmetry, series agreement and Gram
/// positivity on the given elements and points.
pub fn kernel_check(
    kernel: &WeightedKernel,
    elements: &[Isometry],
    pairs: &[(DiscPoint, DiscPoint)],
    gram_points: &[DiscPoint],
) -> KernelCheckReport {
    let m = kernel.m as i32;
    let law = |g: &Isometry, z: DiscPoint, w: DiscPoint| {
        let (zc, wc) = (z.z(), w.z());
        let lhs = kernel.eval_raw(g.act(zc), g.act(wc)) * g.jac(zc).powi(m) * g.jac(wc).conj().powi(m);
        let rhs = kernel.eval(z, w);
        (lhs - rhs).norm() / rhs.norm()
    };
    let mut forward: f64 = 0.0;
    let mut backward: f64 = 0.0;
    let mut herm: f64 = 0.0;
    let mut series: f64 = 0.0;
    for (i, &(z, w)) in pairs.iter().enumerate() {
        if !elements.is_empty() {
            let g = &elements[i % elements.len()];
            forward = forward.max(law(g, z, w));
            backward = backward.max(law(&g.inverse(), z, w));
        }
        let k = kernel.eval(z, w);
        herm = herm.max((k - kernel.eval(w, z).conj()).norm() / k.norm());
        series = series.max((kernel.eval_series(z, w) - k).norm() / k.norm());
    }
    let n = gram_points.len();
    let (lo, hi) = if n == 0 {
        (0.0, 1.0)
    } else {
        let gram = DMatrix::from_fn(n, n, |i, j| kernel.eval(gram_points[i], gram_points[j]));
        gram.symmetric_eigenvalues()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)))
    };
    KernelCheckReport {
        m: kernel.m,
        samples: pairs.len(),
        max_transformation_residual: forward,
        max_inverse_residual: backward,
        max_hermitian_residual: herm,
        max_series_relative_error: series,
        gram_min_eigenvalue_ratio: lo / hi,
        gram_points: n,
    }
}

/// `∫ K_m(z,w) conj(h(z)) K(z,z)^{1−m} dλ(z)` on a polar grid.
fn reproduce(kernel: &WeightedKernel, h: &Seed, w: DiscPoint, grid: &PolarGrid) -> Complex64 {
    let s = 1.0 - kernel.m as f64;
    grid.integrate(|z| kernel.eval_raw(z, w.z()) * h.eval(z).conj() * kernel_power(z, s))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReproducingReport {
    pub m: u32,
    pub w: DiscPoint,
    #[serde(serialize_with = "series::serialize_display")]
    pub h: Seed,
    pub value: Complex64,
    /// `conj(h(w))`.
    pub expected: Complex64,
    pub relative_error: f64,
    /// Relative error at half the resolution in each direction.
    pub coarse_relative_error: f64,
    /// The fine error is below the coarse one, or both sit at rounding level.
    pub converging: bool,
}

pub fn reproducing_check(
    kernel: &WeightedKernel,
    h: &Seed,
    w: DiscPoint,
    grid: &PolarGrid,
) -> Result<ReproducingReport> {
    h.validate()?;
    let expected = h.eval(w.z()).conj();
    let scale = expected.norm().max(1e-300);
    let value = reproduce(kernel, h, w, grid);
    let coarse = reproduce(kernel, h, w, &grid.coarsened());
    let relative_error = (value - expected).norm() / scale;
    let coarse_relative_error = (coarse - expected).norm() / scale;
    Ok(ReproducingReport {
        m: kernel.m,
        w,
        h: h.clone(),
        value,
        expected,
        relative_error,
        coarse_relative_error,
        converging: relative_error <= coarse_relative_error || coarse_relative_error < 1e-12,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CmProbe {
    pub w: DiscPoint,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CmReport {
    pub m: u32,
    pub probes: Vec<CmProbe>,
    pub mean: f64,
    /// `(max − min)/mean` over the probes.
    pub spread: f64,
    /// `(2m − 1)/(m − 1)`, the value at the origin in closed form.
    pub analytic: f64,
}

/// `A(w) = K(w,w)^{−m/2} ∫ |K_m(z,w)| K(z,z)^{1−m/2} dλ(z)`.
pub fn cm_value(kernel: &WeightedKernel, w: DiscPoint, grid: &PolarGrid) -> f64 {
    let half = kernel.m as f64 / 2.0;
    let integral = grid.integrate_real(|z| kernel.eval_raw(z, w.z()).norm() * kernel_power(z, 1.0 - half));
    kernel_power(w.z(), -half) * integral
}

pub fn cm_constant(kernel: &WeightedKernel, probes: &[DiscPoint], grid: &PolarGrid) -> CmReport {
    let probes: Vec<CmProbe> = probes
        .iter()
        .map(|&w| CmProbe {
            w,
            value: cm_value(kernel, w, grid),
        })
        .collect();
    let mean = sum_f64(probes.iter().map(|p| p.value)) / probes.len().max(1) as f64;
    let (lo, hi) = probes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| {
        (a.min(p.value), b.max(p.value))
    });
    let m = kernel.m as f64;
    CmReport {
        m: kernel.m,
        spread: if probes.is_empty() { 0.0 } else { (hi - lo) / mean },
        probes,
        mean,
        analytic: (2.0 * m - 1.0) / (m - 1.0),
    }
}

/// `∫_F h(w) K_m(z,w) K(w,w)^{1−m} dλ(w)` with `h` given at the nodes.
pub fn relative_poincare(
    kernel: &WeightedKernel,
    nodes: &[QuadNode],
    h: &[Complex64],
    z: DiscPoint,
) -> Result<Complex64> {
    if nodes.len() != h.len() {
        return Err(Error::invalid("one value of h per quadrature node is required"));
    }
    let s = 1.0 - kernel.m as f64;
    let terms: Vec<Complex64> = nodes
        .par_iter()
        .zip(h.par_iter())
        .map(|(q, &v)| v * kernel.eval_raw(z.z(), q.z) * kernel_power(q.z, s) * q.weight)
        .collect();
    Ok(sum_complex(terms))
}

/// Taylor coefficients of [`relative_poincare`] as a polynomial seed:
/// `c_k = ‖z^k‖⁻² Σ_i ω_i h_i conj(w_i)^k K(w_i)^{1−m}`.
///
/// Terms are added until they fall below `tol` times the constant
/// coefficient's scale for 16 consecutive degrees, measured on the closed disc
/// where the polynomial will be evaluated.
pub fn relative_poincare_polynomial(
    kernel: &WeightedKernel,
    nodes: &[QuadNode],
    h: &[Complex64],
    tol: f64,
) -> Result<Seed> {
    if nodes.len() != h.len() {
        return Err(Error::invalid("one value of h per quadrature node is required"));
    }
    let s = 1.0 - kernel.m as f64;
    let base: Vec<(Complex64, Complex64)> = nodes
        .iter()
        .zip(h)
        .map(|(q, &v)| (v * kernel_power(q.z, s) * q.weight, q.z.conj()))
        .collect();
    let norms = kernel.monomial_norms(MAX_DEGREE);
    let chunk = 64;
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut scale = 0.0f64;
    let mut quiet = 0;
    'outer: for start in (0..=MAX_DEGREE).step_by(chunk) {
        let end = (start + chunk).min(MAX_DEGREE + 1);
        // moments Σ_i a_i conj(w_i)^k for k in start..end, per node in parallel
        let partial: Vec<Vec<Complex64>> = base
            .par_chunks(4096)
            .map(|block| {
                let mut acc = vec![ComplexSum::new(); end - start];
                for &(a, wc) in block {
                    let mut p = a * wc.powi(start as i32);
                    for slot in acc.iter_mut() {
                        slot.add(p);
                        p *= wc;
                    }
                }
                acc.iter().map(|s| s.value()).collect()
            })
            .collect();
        for k in start..end {
            let moment = sum_complex(partial.iter().map(|v| v[k - start]));
            let c = moment / norms[k];
            coeffs.push(c);
            scale = scale.max(c.norm());
            if c.norm() <= tol * scale {
                quiet += 1;
                if quiet >= 16 {
                    break 'outer;
                }
            } else {
                quiet = 0;
            }
        }
    }
    Seed::polynomial(coeffs)
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripPoint {
    pub z: DiscPoint,
    pub h: Complex64,
    pub reconstructed: Complex64,
    /// `|P_m(f)(z) − h(z)| / max_samples |h|`.
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub m: u32,
    #[serde(serialize_with = "series::serialize_display")]
    pub seed: Seed,
    pub radius: f64,
    pub nodes: usize,
    /// Degree of the polynomial expansion of the reconstructed seed.
    pub degree: usize,
    pub points: Vec<RoundtripPoint>,
    pub max_relative_error: f64,
    /// `‖f‖_{1,(m−2)/2}` of the reconstructed seed.
    pub reconstructed_norm: NormReport,
    /// `c_m ∫_F |h| K^{1−m/2} dλ`, the bound on that norm.
    pub norm_bound: f64,
    pub norm_bound_holds: bool,
}

/// Build `h = P_m(f₀)` on the nodes, reconstruct `f` by the relative Poincaré
/// integral, and compare `P_m(f)` with `h` at the sample points. The ball
/// must cover every node and sample point at radius `r`.
#[allow(clippy::too_many_arguments)]
pub fn roundtrip_check(
    kernel: &WeightedKernel,
    ball: &OrbitBall,
    nodes: &[QuadNode],
    f0: &Seed,
    r: f64,
    points: &[DiscPoint],
    norm_grid: &PolarGrid,
) -> Result<RoundtripReport> {
    let m = kernel.m;
    let h: Vec<Complex64> = nodes
        .par_iter()
        .map(|q| {
            let z = DiscPoint::new(q.z)?;
            Ok(poincare_eval(ball, f0, m, z, r)?.value)
        })
        .collect::<Result<_>>()?;
    let f = relative_poincare_polynomial(kernel, nodes, &h, 1e-17)?;
    let mut rows = Vec::with_capacity(points.len());
    for &z in points {
        let hz = poincare_eval(ball, f0, m, z, r)?.value;
        let pf = poincare_eval(ball, &f, m, z, r)?.value;
        rows.push((z, hz, pf));
    }
    let scale = rows.iter().map(|r| r.1.norm()).fold(0.0, f64::max).max(1e-300);
    let points: Vec<RoundtripPoint> = rows
        .into_iter()
        .map(|(z, h, reconstructed)| RoundtripPoint {
            z,
            h,
            reconstructed,
            relative_error: (reconstructed - h).norm() / scale,
        })
        .collect();
    let half = m as f64 / 2.0;
    let mass = sum_f64(
        nodes
            .iter()
            .zip(&h)
            .map(|(q, v)| v.norm() * kernel_power(q.z, 1.0 - half) * q.weight),
    );
    let c_m = (2.0 * m as f64 - 1.0) / (m as f64 - 1.0);
    let reconstructed_norm = series::norm_pl(&f, 1, half - 1.0, norm_grid)?;
    let norm_bound = c_m * mass;
    Ok(RoundtripReport {
        m,
        degree: f.degree().unwrap_or(0),
        seed: f0.clone(),
        radius: r,
        nodes: nodes.len(),
        max_relative_error: points.iter().map(|p| p.relative_error).fold(0.0, f64::max),
        points,
        norm_bound_holds: reconstructed_norm.value <= norm_bound * (1.0 + 1e-3),
        reconstructed_norm,
        norm_bound,
    })
}

/// Polar-grid nodes as quadrature nodes over the whole disc.
pub fn disc_nodes(grid: &PolarGrid) -> Vec<QuadNode> {
    grid.nodes()
        .into_iter()
        .map(|(z, weight)| QuadNode { z, weight })
        .collect()
}

/// Random non-identity elements of the ball for sampling the laws above.
pub fn sample_elements<R: Rng>(group: &FuchsianGroup, ball: &OrbitBall, rng: &mut R, n: usize) -> Vec<Isometry> {
    if group.generators.is_empty() || ball.len() < 2 {
        return vec![Isometry::IDENTITY; n.min(1)];
    }
    (0..n)
        .map(|_| ball.entries[rng.gen_range(1..ball.len())].element.iso)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dirichlet_domain, enumerate_ball, preset_genus2_octagon};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::from_re_im(re, im).unwrap()
    }

    #[test]
    fn kernel_at_zero_is_constant() {
        let k = WeightedKernel::new(3).unwrap();
        let a = k.eval(p(0.5, -0.2), DiscPoint::origin());
        let b = k.eval(p(-0.7, 0.1), DiscPoint::origin());
        assert_eq!(a, b);
        assert!((a.re - 5.0 / PI.powi(3)).abs() < 1e-15);
    }

    #[test]
    fn k2_at_origin_matches_series() {
        // only the k = 0 term survives at (0, 0): 1/‖1‖² with ‖1‖² = π²·∫(1−r²)²·2r dr·... = π²/3
        let k = WeightedKernel::new(2).unwrap();
        let o = DiscPoint::origin();
        let s = k.eval_series(o, o);
        let norm1 = PolarGrid::default().integrate_real(|z| kernel_power(z, -1.0));
        assert!((s.re - 1.0 / norm1).abs() / s.re < 1e-5);
        assert!((k.eval(o, o) - s).norm() < 1e-15);
    }

    #[test]
    fn monomial_norms_match_quadrature() {
        let k = WeightedKernel::new(3).unwrap();
        let norms = k.monomial_norms(6);
        for (j, n) in norms.iter().enumerate() {
            let q = PolarGrid::default().integrate_real(|z| z.norm_sqr().powi(j as i32) * kernel_power(z, -2.0));
            assert!((q - n).abs() / n < 1e-6, "k = {j}: {q} vs {n}");
        }
    }

    #[test]
    fn closed_form_matches_series_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for m in [2, 3, 4, 6] {
            let k = WeightedKernel::new(m).unwrap().with_degree_cap(400);
            let pts = sample_disc(&mut rng, 100, 0.8);
            for pair in pts.chunks(2) {
                let (a, b) = (k.eval(pair[0], pair[1]), k.eval_series(pair[0], pair[1]));
                assert!((a - b).norm() / a.norm() < 1e-10, "m = {m}");
            }
        }
    }

    #[test]
    fn transformation_law_and_gram() {
        let g = preset_genus2_octagon();
        let ball = enumerate_ball(&g, DiscPoint::origin(), 6.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let elems = sample_elements(&g, &ball, &mut rng, 20);
        let pts = sample_disc(&mut rng, 200, 0.8);
        let pairs: Vec<_> = pts.chunks(2).map(|c| (c[0], c[1])).collect();
        let gram = sample_disc(&mut rng, 5, 0.8);
        for m in [2, 4] {
            let k = WeightedKernel::new(m).unwrap().with_degree_cap(400);
            let r = kernel_check(&k, &elems, &pairs, &gram);
            assert!(r.max_transformation_residual < 1e-10, "{r:?}");
            assert!(r.max_inverse_residual < 1e-10);
            assert!(r.max_hermitian_residual < 1e-14);
            assert!(r.gram_min_eigenvalue_ratio >= -1e-10);
        }
        let id = kernel_check(&WeightedKernel::new(3).unwrap(), &[Isometry::IDENTITY], &pairs, &[]);
        assert_eq!(id.max_transformation_residual, 0.0);
    }

    #[test]
    fn reproducing_examples() {
        let k = WeightedKernel::new(3).unwrap();
        let one = reproducing_check(&k, &Seed::constant(1.0), DiscPoint::origin(), &PolarGrid::default()).unwrap();
        assert!(one.relative_error < 1e-6);
        let z2 = reproducing_check(&k, &Seed::monomial(2), p(0.3, 0.0), &PolarGrid::default()).unwrap();
        assert!(z2.relative_error < 5e-3 && z2.converging, "{z2:?}");
    }

    #[test]
    fn cm_at_origin_matches_radial_integral() {
        // |K_m(z,0)| is radial: A(0) = π^{m/2}·(2m−1)/π^m·2π ∫₀¹ (π(1−r²)²)^{m/2−1} r dr,
        // evaluated by composite Simpson in r
        for m in [2u32, 3, 4, 6] {
            let k = WeightedKernel::new(m).unwrap();
            let n = 20_000;
            let h = 1.0 / n as f64;
            let g = |r: f64| (PI * (1.0 - r * r).powi(2)).powf(m as f64 / 2.0 - 1.0) * r;
            let mut s = g(0.0) + g(1.0);
            for i in 1..n {
                s += g(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let radial = s * h / 3.0;
            let oracle = PI.powf(m as f64 / 2.0) * k.leading() * 2.0 * PI * radial;
            let a0 = cm_value(&k, DiscPoint::origin(), &PolarGrid::default());
            assert!((a0 - oracle).abs() / oracle < 1e-6, "m = {m}: {a0} vs {oracle}");
        }
    }

    #[test]
    fn cm_is_constant_across_probes() {
        let k = WeightedKernel::new(4).unwrap();
        let d0 = crate::group::octagon_translation_length();
        let g0 = DiscPoint::new(Isometry::translation(d0, 0.0).act(Complex64::new(0.0, 0.0))).unwrap();
        let probes = [DiscPoint::origin(), p(0.4, 0.0), p(0.0, -0.6), g0];
        let rep = cm_constant(&k, &probes, &PolarGrid::default());
        assert!(rep.spread < 0.01, "{rep:?}");
        assert!((rep.mean - 7.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn relative_poincare_is_linear_and_vanishes_on_zero() {
        let k = WeightedKernel::new(4).unwrap();
        let nodes = disc_nodes(&PolarGrid::new(50, 32));
        let z = p(0.2, 0.3);
        let zero = vec![Complex64::new(0.0, 0.0); nodes.len()];
        assert_eq!(
            relative_poincare(&k, &nodes, &zero, z).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        let a: Vec<Complex64> = nodes.iter().map(|q| q.z * q.z).collect();
        let b: Vec<Complex64> = nodes.iter().map(|q| Complex64::new(1.0, 0.0) + q.z).collect();
        let ab: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let lhs = relative_poincare(&k, &nodes, &ab, z).unwrap();
        let rhs =
            2.0 * relative_poincare(&k, &nodes, &a, z).unwrap() - 3.0 * relative_poincare(&k, &nodes, &b, z).unwrap();
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn polynomial_expansion_matches_direct_quadrature() {
        let g = preset_genus2_octagon();
        let dom = dirichlet_domain(&g, DiscPoint::origin()).unwrap().with_spacing(0.02, 4);
        let k = WeightedKernel::new(4).unwrap();
        let h: Vec<Complex64> = dom.quadrature.iter().map(|q| (q.z * 2.0).exp()).collect();
        let f = relative_poincare_polynomial(&k, &dom.quadrature, &h, 1e-17).unwrap();
        for z in [p(0.0, 0.0), p(0.5, 0.2), p(-0.9, 0.1)] {
            let direct = relative_poincare(&k, &dom.quadrature, &h, z).unwrap();
            assert!((f.eval(z.z()) - direct).norm() < 1e-10 * direct.norm().max(1.0));
        }
    }

    #[test]
    fn trivial_group_roundtrip_reproduces_seed() {
        let k = WeightedKernel::new(3).unwrap();
        let grid = PolarGrid::new(400, 128);
        let nodes = disc_nodes(&grid);
        let ball = OrbitBall::trivial(DiscPoint::origin(), 200.0);
        let f0: Seed = "poly 1 -0.5 0.25".parse().unwrap();
        let pts = [p(0.1, 0.1), p(-0.3, 0.4)];
        let rep = roundtrip_check(&k, &ball, &nodes, &f0, 100.0, &pts, &grid).unwrap();
        assert!(rep.max_relative_error < 1e-4, "{rep:?}");
        assert!(rep.norm_bound_holds);
    }
}
