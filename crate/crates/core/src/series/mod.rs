//! Truncated Poincaré series `P_m(f)(z) = Σ_γ f(γz) j_γ(z)^m`.
//!
//! A series about the base point `x` of an [`OrbitBall`] truncated at radius
//! `R` keeps the terms with `ρ(x, γz) ≤ R`. The selected set moves with `z`
//! (`γ ↦ γγ₀` maps the set at `z` onto the set at `γ₀⁻¹z`), so the truncated
//! series is exactly automorphic, and its integral over a fundamental domain
//! unfolds to an integral over the hyperbolic ball `B(x, R)`.
//!
//! Tails are estimated from the last two shells of width [`SHELL_WIDTH`]:
//! with shell sums `S₁` on `(R − 2, R − 1]` and `S₂` on `(R − 1, R]`, the
//! ratio `q = S₂/S₁` is extrapolated geometrically to `S₂·q/(1 − q)`. This is
//! an empirical estimate, not a bound. An empty or non-decaying pair of shells
//! gives an infinite estimate.

mod seed;

pub use seed::{CustomSeed, Seed, MAX_DEGREE, MIN_POLE_MODULUS};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{distance, raw_distance, DiscPoint, Isometry};
use crate::group::{enumerate_ball, FuchsianGroup, FundamentalDomain, OrbitBall};
use crate::quadrature::{integrate_with_estimate, PolarGrid};
use crate::summation::{ComplexSum, NeumaierSum};

pub const SHELL_WIDTH: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_estimate: f64,
    pub terms_used: usize,
    pub radius_used: f64,
}

/// One selected term: the ball entry, `γz`, `j_γ(z)` and `ρ(x, γz)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub index: usize,
    pub w: Complex64,
    pub jac: Complex64,
    pub dist: f64,
}

/// Terms with `ρ(x, γz) ≤ r` in increasing distance (ties by ball order).
pub(crate) fn select_terms(ball: &OrbitBall, z: DiscPoint, r: f64) -> Result<Vec<Term>> {
    if !(r > 0.0) {
        return Err(Error::invalid("truncation radius must be positive"));
    }
    let need = ball.require_cover(z, r)?;
    let x = ball.base.z();
    let zc = z.z();
    let mut terms: Vec<Term> = ball
        .within(need)
        .par_iter()
        .enumerate()
        .filter_map(|(index, e)| {
            let w = e.element.iso.act(zc);
            let dist = raw_distance(x, w);
            (dist <= r).then(|| Term {
                index,
                w,
                jac: e.element.iso.jac(zc),
                dist,
            })
        })
        .collect();
    terms.sort_by(|a, b| a.dist.total_cmp(&b.dist).then(a.index.cmp(&b.index)));
    Ok(terms)
}

/// Geometric extrapolation of nonnegative per-term weights from the last two
/// shells below `r`.
pub fn shell_tail<I>(terms: I, r: f64) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (mut s1, mut s2) = (NeumaierSum::new(), NeumaierSum::new());
    for (dist, weight) in terms {
        if dist > r - SHELL_WIDTH {
            s2.add(weight);
        } else if dist > r - 2.0 * SHELL_WIDTH {
            s1.add(weight);
        }
    }
    let (s1, s2) = (s1.value(), s2.value());
    if s2 == 0.0 {
        return if s1 == 0.0 { 0.0 } else { f64::INFINITY };
    }
    if s1 == 0.0 {
        return f64::INFINITY;
    }
    let q = s2 / s1;
    if q >= 1.0 {
        f64::INFINITY
    } else {
        s2 * q / (1.0 - q)
    }
}

/// Orbit ball about `x` large enough for a series at `z` truncated at `r`.
pub fn ball_for(group: &FuchsianGroup, x: DiscPoint, z: DiscPoint, r: f64) -> Result<OrbitBall> {
    enumerate_ball(group, x, r + distance(x, z))
}

fn check_weight(m: u32) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!("weight m = {m} must be at least 2")));
    }
    Ok(())
}

/// `Σ |j_γ(z)|²` over `ρ(x, γz) ≤ r`.
pub fn weight_sum(ball: &OrbitBall, z: DiscPoint, r: f64) -> Result<SeriesValue> {
    let terms = select_terms(ball, z, r)?;
    let mut s = NeumaierSum::new();
    s.extend(terms.iter().map(|t| t.jac.norm_sqr()));
    Ok(SeriesValue {
        value: Complex64::new(s.value(), 0.0),
        tail_estimate: shell_tail(terms.iter().map(|t| (t.dist, t.jac.norm_sqr())), r),
        terms_used: terms.len(),
        radius_used: r,
    })
}

/// Partial sums of the weight series at each radius of `radii`.
pub fn weight_sum_profile(ball: &OrbitBall, z: DiscPoint, radii: &[f64]) -> Result<Vec<SeriesValue>> {
    radii.iter().map(|&r| weight_sum(ball, z, r)).collect()
}

/// `Σ |j_γ(z)|^m` over the same truncation, the factor multiplying `sup|f|`
/// in every bound on `P_m(f)(z)`.
pub fn abs_jacobian_sum(ball: &OrbitBall, m: u32, z: DiscPoint, r: f64) -> Result<SeriesValue> {
    let terms = select_terms(ball, z, r)?;
    let weights: Vec<(f64, f64)> = terms.iter().map(|t| (t.dist, t.jac.norm().powi(m as i32))).collect();
    let mut s = NeumaierSum::new();
    s.extend(weights.iter().map(|w| w.1));
    Ok(SeriesValue {
        value: Complex64::new(s.value(), 0.0),
        tail_estimate: shell_tail(weights, r),
        terms_used: terms.len(),
        radius_used: r,
    })
}

/// `P_m(f)(z)` truncated at `r`.
pub fn poincare_eval(ball: &OrbitBall, f: &Seed, m: u32, z: DiscPoint, r: f64) -> Result<SeriesValue> {
    Ok(poincare_eval_with_derivative(ball, f, m, z, r)?.0)
}

/// `P_m(f)(z)` and its complex derivative, term by term:
/// `d/dz [f(γz) j^m] = f′(γz) j^{m+1} + m f(γz) j^{m−1} j′`.
pub fn poincare_eval_with_derivative(
    ball: &OrbitBall,
    f: &Seed,
    m: u32,
    z: DiscPoint,
    r: f64,
) -> Result<(SeriesValue, Complex64)> {
    check_weight(m)?;
    f.validate()?;
    let terms = select_terms(ball, z, r)?;
    let zc = z.z();
    let parts: Vec<(Complex64, Complex64)> = terms
        .par_iter()
        .map(|t| {
            let (v, dv) = f.eval_with_derivative(t.w);
            let jm1 = t.jac.powi(m as i32 - 1);
            let jm = jm1 * t.jac;
            let jp = ball.entries[t.index].element.iso.jac_derivative(zc);
            (v * jm, dv * jm * t.jac + (m as f64) * v * jm1 * jp)
        })
        .collect();
    let (mut value, mut deriv) = (ComplexSum::new(), ComplexSum::new());
    for (v, d) in &parts {
        value.add(*v);
        deriv.add(*d);
    }
    let tail = f.sup_bound() * shell_tail(terms.iter().map(|t| (t.dist, t.jac.norm().powi(m as i32))), r);
    Ok((
        SeriesValue {
            value: value.value(),
            tail_estimate: tail,
            terms_used: terms.len(),
            radius_used: r,
        },
        deriv.value(),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct AutomorphySample {
    pub word: Vec<i8>,
    pub z: DiscPoint,
    /// `|P(γz) j_γ(z)^m − P(z)|`.
    pub residual: f64,
    pub tail_estimate: f64,
    /// Rounding allowance: `64ε` times the absolute sums at `z` and `γz`,
    /// plus the error in `γz` times `|P′(γz)|`.
    pub rounding: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AutomorphyReport {
    pub m: u32,
    pub seed: String,
    pub radius: f64,
    pub samples: Vec<AutomorphySample>,
    pub max_residual: f64,
    pub max_ratio: f64,
    pub all_hold: bool,
}

/// Compare `P(γz)·j_γ(z)^m` with `P(z)` for each `(γ, z)`; a pair passes
/// when the residual is at most twice the tail estimate at `z` plus the
/// rounding allowance.
pub fn automorphy_check(
    group: &FuchsianGroup,
    x: DiscPoint,
    f: &Seed,
    m: u32,
    r: f64,
    pairs: &[(Vec<i8>, DiscPoint)],
) -> Result<AutomorphyReport> {
    let mut moved = Vec::with_capacity(pairs.len());
    let mut reach: f64 = 0.0;
    for (word, z) in pairs {
        let g = group.evaluate(word)?;
        let gz = DiscPoint::new(g.act(z.z()))?;
        reach = reach.max(distance(x, *z)).max(distance(x, gz));
        moved.push((g, gz));
    }
    let ball = enumerate_ball(group, x, r + reach)?;
    let eps = f64::EPSILON;
    let mut samples = Vec::with_capacity(pairs.len());
    for ((word, z), (g, gz)) in pairs.iter().zip(&moved) {
        let p = poincare_eval(&ball, f, m, *z, r)?;
        let (q, dq) = poincare_eval_with_derivative(&ball, f, m, *gz, r)?;
        let jm = g.jac(z.z()).powi(m as i32);
        let sup = f.sup_bound();
        let abs_z = abs_jacobian_sum(&ball, m, *z, r)?.value.re * sup;
        let abs_gz = abs_jacobian_sum(&ball, m, *gz, r)?.value.re * sup;
        // γz itself carries an error of order ε·(|α| + |β|)², amplified by P′(γz)
        let cond = (g.alpha.norm() + g.beta.norm()).powi(2);
        let residual = (q.value * jm - p.value).norm();
        let rounding =
            64.0 * eps * (abs_z.max(p.value.norm()) + jm.norm() * abs_gz) + 16.0 * eps * cond * jm.norm() * dq.norm();
        samples.push(AutomorphySample {
            word: word.clone(),
            z: *z,
            residual,
            tail_estimate: p.tail_estimate,
            rounding,
            holds: residual <= 2.0 * p.tail_estimate + rounding,
        });
    }
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let max_ratio = samples
        .iter()
        .map(|s| s.residual / (2.0 * s.tail_estimate + s.rounding))
        .fold(0.0, f64::max);
    Ok(AutomorphyReport {
        m,
        seed: f.to_string(),
        radius: r,
        all_hold: samples.iter().all(|s| s.holds),
        samples,
        max_residual,
        max_ratio,
    })
}

/// `K(z, z)^s = (π(1 − |z|²)²)^{−s}`.
pub(crate) fn kernel_power(z: Complex64, s: f64) -> f64 {
    let d = std::f64::consts::PI * (1.0 - z.norm_sqr()).powi(2);
    d.powf(-s)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormReport {
    pub p: u32,
    pub l: f64,
    pub value: f64,
    pub error_estimate: f64,
    /// Value at half the resolution in each direction.
    pub coarse_value: f64,
    pub grid: PolarGrid,
}

/// `‖f‖_{p,l} = ∫ |f|^p K^{−l} dλ` over the disc.
pub fn norm_pl(f: &Seed, p: u32, l: f64, grid: &PolarGrid) -> Result<NormReport> {
    if !(p == 1 || p == 2) {
        return Err(Error::invalid(format!("norm exponent p = {p} must be 1 or 2")));
    }
    if !(l >= 0.0) {
        return Err(Error::invalid(format!("weight exponent l = {l} must be nonnegative")));
    }
    f.validate()?;
    let r = integrate_with_estimate(grid, |z| f.eval(z).norm().powi(p as i32) * kernel_power(z, -l))?;
    Ok(NormReport {
        p,
        l,
        value: r.value,
        error_estimate: r.error_estimate,
        coarse_value: r.coarse_value,
        grid: *grid,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma22Row {
    pub radius: f64,
    /// `∫_F Σ |f(γz) j_γ(z)^m| K(z,z)^{(2−m)/2} dλ(z)` over the truncation.
    pub lhs: f64,
    /// `∫_{B(x,R)} |f| K^{(2−m)/2} dλ`, the unfolded form of `lhs`.
    pub unfolded: f64,
    pub unfolding_relative_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma22Report {
    pub m: u32,
    pub seed: String,
    pub rhs: NormReport,
    /// Relative quadrature slack allowed in `lhs ≤ rhs·(1 + slack)`.
    pub slack: f64,
    pub rows: Vec<Lemma22Row>,
    pub lhs_monotone: bool,
    pub all_hold: bool,
    pub max_unfolding_relative_error: f64,
}

/// ∫ over the hyperbolic ball `B(x, R)` by a polar grid about the origin
/// pulled back through the automorphism moving `0` to `x`.
pub fn integrate_over_ball<F>(x: DiscPoint, radius: f64, grid: &PolarGrid, f: F) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let phi = Isometry::moving_origin_to(x);
    let g = grid.with_radius((radius / 2.0).tanh());
    g.integrate_real(|u| f(phi.act(u)) * phi.jac(u).norm_sqr())
}

/// Both sides of `∫_X ‖P_m(f)‖ K^{(2−m)/2} ≤ ‖f‖_{1,(m−2)/2}` for each
/// truncation radius in `radii`, together with the unfolding cross-check.
pub fn lemma22_check(
    group: &FuchsianGroup,
    domain: &FundamentalDomain,
    f: &Seed,
    m: u32,
    radii: &[f64],
    grid: &PolarGrid,
    slack: f64,
) -> Result<Lemma22Report> {
    check_weight(m)?;
    f.validate()?;
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let r_max = *radii
        .last()
        .ok_or_else(|| Error::invalid("no truncation radius given"))?;
    let x = domain.center;
    let reach = domain
        .quadrature
        .iter()
        .map(|q| raw_distance(x.z(), q.z))
        .fold(0.0, f64::max);
    let ball = enumerate_ball(group, x, r_max + reach + 1e-9)?;
    let s = (2.0 - m as f64) / 2.0;

    let per_node: Vec<Vec<f64>> = domain
        .quadrature
        .par_iter()
        .map(|q| {
            let z = DiscPoint::new(q.z).expect("quadrature node inside the disc");
            let terms = select_terms(&ball, z, r_max).expect("ball covers the domain");
            let kz = kernel_power(q.z, s);
            let mut acc = vec![NeumaierSum::new(); radii.len()];
            for t in &terms {
                let v = f.eval(t.w).norm() * t.jac.norm().powi(m as i32) * kz;
                let first = radii.partition_point(|&r| r < t.dist);
                for a in &mut acc[first..] {
                    a.add(v);
                }
            }
            acc.iter().map(|a| a.value() * q.weight).collect()
        })
        .collect();

    let rhs = norm_pl(f, 1, -s, grid)?;
    let rows: Vec<Lemma22Row> = radii
        .iter()
        .enumerate()
        .map(|(i, &radius)| {
            let mut lhs = NeumaierSum::new();
            lhs.extend(per_node.iter().map(|v| v[i]));
            let lhs = lhs.value();
            let unfolded = integrate_over_ball(x, radius, grid, |w| f.eval(w).norm() * kernel_power(w, s));
            Lemma22Row {
                radius,
                lhs,
                unfolded,
                unfolding_relative_error: (lhs - unfolded).abs() / unfolded.abs().max(f64::MIN_POSITIVE),
                holds: lhs <= rhs.value * (1.0 + slack),
            }
        })
        .collect();
    Ok(Lemma22Report {
        m,
        seed: f.to_string(),
        rhs,
        slack,
        lhs_monotone: rows.windows(2).all(|w| w[0].lhs <= w[1].lhs),
        all_hold: rows.iter().all(|r| r.holds),
        max_unfolding_relative_error: rows.iter().map(|r| r.unfolding_relative_error).fold(0.0, f64::max),
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct ApproxOptions {
    pub max_degree: usize,
    pub grid: PolarGrid,
    /// Dilations tried, in order, for seeds not known to extend past the
    /// closed disc.
    pub dilations: Vec<f64>,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        ApproxOptions {
            max_degree: MAX_DEGREE,
            grid: PolarGrid::default(),
            dilations: vec![0.9, 0.95, 0.98, 0.99, 0.995, 0.998, 0.999],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Approximation {
    #[serde(serialize_with = "serialize_display")]
    pub polynomial: Seed,
    pub dilation: f64,
    pub degree: usize,
    /// `‖f − h‖_{1,l}` by [`norm_pl`].
    pub achieved: f64,
    pub target: f64,
    /// `‖f − f^t‖_{1,l}`, zero when no dilation was needed.
    pub dilation_error: f64,
}

pub(crate) fn serialize_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// A polynomial `h` with `‖f − h‖_{1,l} < delta`: the Taylor truncation of a
/// dilation `f^t`, choosing `t` first (so that `‖f − f^t‖ < delta/2`) and then
/// doubling the degree.
pub fn polynomial_approx(f: &Seed, l: f64, delta: f64, opts: &ApproxOptions) -> Result<Approximation> {
    if !(delta > 0.0) {
        return Err(Error::invalid("approximation target must be positive"));
    }
    f.validate()?;
    if let Seed::Polynomial(c) = f {
        return Ok(Approximation {
            polynomial: f.clone(),
            dilation: 1.0,
            degree: c.len() - 1,
            achieved: 0.0,
            target: delta,
            dilation_error: 0.0,
        });
    }
    let (t, dilation_error) = match f {
        Seed::Rational { .. } => (1.0, 0.0),
        _ => {
            let mut chosen = None;
            for &t in &opts.dilations {
                let e = norm_pl(&f.minus(&f.dilate(t)), 1, l, &opts.grid)?.value;
                if e < delta / 2.0 {
                    chosen = Some((t, e));
                    break;
                }
            }
            chosen.ok_or(Error::TargetNotReached {
                degree: 0,
                achieved: f64::NAN,
                target: delta,
            })?
        }
    };
    let ft = f.dilate(t);
    let mut n = 4usize;
    loop {
        let n_eff = n.min(opts.max_degree);
        let h = Seed::Polynomial(ft.taylor(n_eff));
        let achieved = norm_pl(&f.minus(&h), 1, l, &opts.grid)?.value;
        if achieved < delta {
            return Ok(Approximation {
                polynomial: h,
                dilation: t,
                degree: n_eff,
                achieved,
                target: delta,
                dilation_error,
            });
        }
        if n_eff >= opts.max_degree {
            return Err(Error::TargetNotReached {
                degree: opts.max_degree,
                achieved,
                target: delta,
            });
        }
        n *= 2;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferRow {
    pub z: DiscPoint,
    /// `|P_m(f)(z) − P_m(h)(z)|`.
    pub difference: f64,
    /// `sup|f − h| · Σ|j_γ(z)|^m` over the same truncation.
    pub bound: f64,
    pub holds: bool,
}

/// Compare `P_m(f) − P_m(h)` with the sup-norm bound at each point.
pub fn approximation_transfer_check(
    ball: &OrbitBall,
    f: &Seed,
    h: &Seed,
    m: u32,
    points: &[DiscPoint],
    r: f64,
) -> Result<Vec<TransferRow>> {
    let sup = f.minus(h).sampled_sup() * (1.0 + 1e-3);
    points
        .iter()
        .map(|&z| {
            let a = poincare_eval(ball, f, m, z, r)?.value;
            let b = poincare_eval(ball, h, m, z, r)?.value;
            let w = abs_jacobian_sum(ball, m, z, r)?.value.re;
            let difference = (a - b).norm();
            let bound = sup * w;
            Ok(TransferRow {
                z,
                difference,
                bound,
                holds: difference <= bound + 64.0 * f64::EPSILON * (a.norm() + b.norm()),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SchwarzReport {
    pub m: u32,
    pub z: DiscPoint,
    pub radius: f64,
    /// `|P_m(f)(z)|²`.
    pub value_sqr: f64,
    /// `(Σ |f(γz)| |j|^m)²`.
    pub lhs: f64,
    /// `Σ |f(γz)|² |j|^{2m−2} · Σ |j|²`.
    pub rhs: f64,
    pub holds: bool,
    pub prefixes_checked: usize,
    pub prefix_violations: usize,
}

/// `‖P_m(f)‖(z)² ≤ ‖P_{2m−2}(f²)‖(z)·Σ|j_γ(z)|²`, with the norms read as
/// absolute series, checked at the final truncation and at every prefix.
pub fn schwarz_bound_check(ball: &OrbitBall, f: &Seed, m: u32, z: DiscPoint, r: f64) -> Result<SchwarzReport> {
    check_weight(m)?;
    f.validate()?;
    let terms = select_terms(ball, z, r)?;
    let (mut a, mut b, mut c) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    let mut value = ComplexSum::new();
    let mut violations = 0;
    let slack = 1.0 + 1e-12;
    for t in &terms {
        let v = f.eval(t.w);
        let j = t.jac.norm();
        value.add(v * t.jac.powi(m as i32));
        a.add(v.norm() * j.powi(m as i32));
        b.add(v.norm_sqr() * j.powi(2 * m as i32 - 2));
        c.add(j * j);
        if a.value().powi(2) > b.value() * c.value() * slack {
            violations += 1;
        }
    }
    let (lhs, rhs) = (a.value().powi(2), b.value() * c.value());
    Ok(SchwarzReport {
        m,
        z,
        radius: r,
        value_sqr: value.value().norm_sqr(),
        lhs,
        rhs,
        holds: lhs <= rhs * slack && violations == 0,
        prefixes_checked: terms.len(),
        prefix_violations: violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dirichlet_domain, preset_genus2_octagon};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn octagon() -> FuchsianGroup {
        preset_genus2_octagon()
    }

    #[test]
    fn trivial_group_weight_sum_is_one() {
        let g = FuchsianGroup::trivial();
        let z = DiscPoint::from_re_im(0.3, 0.4).unwrap();
        let ball = ball_for(&g, DiscPoint::origin(), z, 5.0).unwrap();
        let w = weight_sum(&ball, z, 5.0).unwrap();
        // z itself is at distance ρ(0, z) ≤ 5, j = 1
        assert_eq!(w.value.re, 1.0);
        assert_eq!(w.terms_used, 1);
    }

    #[test]
    fn trivial_group_series_is_the_seed() {
        let g = FuchsianGroup::trivial();
        let f: Seed = "poly 1 2 0.5".parse().unwrap();
        let z = DiscPoint::from_re_im(-0.2, 0.6).unwrap();
        let ball = ball_for(&g, DiscPoint::origin(), z, 4.0).unwrap();
        for m in [2, 3, 7] {
            let p = poincare_eval(&ball, &f, m, z, 4.0).unwrap();
            assert_eq!(p.value, f.eval(z.z()));
        }
    }

    #[test]
    fn weight_sum_partial_sums_increase() {
        let g = octagon();
        let z = DiscPoint::from_re_im(0.1, -0.2).unwrap();
        let ball = ball_for(&g, DiscPoint::origin(), z, 9.0).unwrap();
        let radii: Vec<f64> = (1..=18).map(|k| 0.5 * k as f64).collect();
        let prof = weight_sum_profile(&ball, z, &radii).unwrap();
        for w in prof.windows(2) {
            assert!(w[0].value.re <= w[1].value.re);
            assert!(w[0].terms_used <= w[1].terms_used);
        }
    }

    #[test]
    fn shell_tail_edge_cases() {
        assert_eq!(shell_tail(Vec::<(f64, f64)>::new(), 5.0), 0.0);
        assert_eq!(shell_tail(vec![(4.5, 1.0)], 5.0), f64::INFINITY);
        assert_eq!(shell_tail(vec![(3.5, 1.0), (4.5, 2.0)], 5.0), f64::INFINITY);
        // q = 1/2: tail = 1·(1/2)/(1/2) = 1
        assert!((shell_tail(vec![(3.5, 2.0), (4.5, 1.0)], 5.0) - 1.0).abs() < 1e-15);
        // only the inner shell populated: the series stopped, but decay is unknown
        assert_eq!(shell_tail(vec![(3.5, 2.0)], 5.0), f64::INFINITY);
    }

    #[test]
    fn series_is_exactly_automorphic_under_truncation() {
        let g = octagon();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f: Seed = "poly 1 -0.5 0.25".parse().unwrap();
        let pairs: Vec<(Vec<i8>, DiscPoint)> = (0..6)
            .map(|_| {
                let l = rng.gen_range(1..=4i8) * if rng.gen_bool(0.5) { 1 } else { -1 };
                let z = DiscPoint::polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..2.0 * PI)).unwrap();
                (vec![l], z)
            })
            .collect();
        for m in [3, 4, 6] {
            let rep = automorphy_check(&g, DiscPoint::origin(), &f, m, 6.0, &pairs).unwrap();
            assert!(rep.all_hold, "{rep:?}");
            assert!(
                rep.max_residual < 1e-11 * (1.0 + rep.samples.len() as f64),
                "{}",
                rep.max_residual
            );
            // the allowance stays far below any real failure of the transformation law
            assert!(rep.samples.iter().all(|s| s.rounding < 1e-10), "{rep:?}");
        }
    }

    #[test]
    fn summation_order_does_not_matter() {
        let g = octagon();
        let z = DiscPoint::origin();
        let ball = ball_for(&g, z, z, 8.0).unwrap();
        let f = Seed::constant(1.0);
        let p = poincare_eval(&ball, &f, 4, z, 8.0).unwrap();
        // oracle: the same terms in a shuffled order, naive f64 accumulation
        let mut terms: Vec<Complex64> = ball
            .within(8.0)
            .iter()
            .map(|e| e.element.iso.jac(z.z()).powi(4))
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in (1..terms.len()).rev() {
            terms.swap(i, rng.gen_range(0..=i));
        }
        let naive: Complex64 = terms.iter().sum();
        assert_eq!(p.terms_used, terms.len());
        assert!((p.value - naive).norm() < 1e-13, "{}", (p.value - naive).norm());
    }

    #[test]
    fn derivative_matches_central_difference() {
        let g = octagon();
        let x = DiscPoint::origin();
        let f: Seed = "poly 0.3 1 -2 0.5".parse().unwrap();
        let ball = enumerate_ball(&g, x, 7.0).unwrap();
        for (re, im) in [(0.1, 0.2), (-0.35, 0.1), (0.0, -0.5)] {
            let z = DiscPoint::from_re_im(re, im).unwrap();
            let (_, d) = poincare_eval_with_derivative(&ball, &f, 4, z, 5.0).unwrap();
            // the truncation set is locally constant in z away from its edge
            let h = 1e-5;
            let zp = DiscPoint::from_re_im(re + h, im).unwrap();
            let zm = DiscPoint::from_re_im(re - h, im).unwrap();
            let fd = (poincare_eval(&ball, &f, 4, zp, 5.0).unwrap().value
                - poincare_eval(&ball, &f, 4, zm, 5.0).unwrap().value)
                / (2.0 * h);
            assert!((fd - d).norm() < 1e-6 * (1.0 + d.norm()), "{fd} vs {d}");
        }
    }

    #[test]
    fn norm_examples() {
        let grid = PolarGrid::default();
        let one = Seed::constant(1.0);
        let area = norm_pl(&one, 1, 0.0, &grid).unwrap();
        assert!((area.value - PI).abs() / PI < 1e-3);
        // ∫ π(1 − r²)² dλ = π²∫₀¹(1 − r²)² 2r dr = π²/3
        let n = norm_pl(&one, 1, 1.0, &grid).unwrap();
        assert!((n.value - PI * PI / 3.0).abs() / (PI * PI / 3.0) < 1e-5);
        let f: Seed = "poly 0.5 -1 0+0.25i".parse().unwrap();
        let f3: Seed = "poly 1.5 -3 0+0.75i".parse().unwrap();
        let a = norm_pl(&f, 1, 0.5, &grid).unwrap().value;
        let b = norm_pl(&f3, 1, 0.5, &grid).unwrap().value;
        assert!((b - 3.0 * a).abs() < 1e-12 * b);
        assert!(norm_pl(&one, 3, 0.0, &grid).is_err());
    }

    #[test]
    fn norm_is_stable_under_grid_halving() {
        let f: Seed = "rational 1 / 2 -1".parse().unwrap();
        for l in [0.0, 0.5, 1.0] {
            for p in [1, 2] {
                let n = norm_pl(&f, p, l, &PolarGrid::default()).unwrap();
                assert!((n.value - n.coarse_value).abs() / n.value < 5e-3);
            }
        }
    }

    #[test]
    fn lemma22_small_case() {
        let g = octagon();
        let dom = dirichlet_domain(&g, DiscPoint::origin()).unwrap().with_spacing(0.01, 4);
        let f = Seed::monomial(1);
        let rep = lemma22_check(&g, &dom, &f, 3, &[2.0, 4.0, 6.0], &PolarGrid::new(400, 256), 0.01).unwrap();
        assert!(rep.all_hold && rep.lhs_monotone, "{rep:?}");
        assert!(rep.max_unfolding_relative_error < 0.01, "{rep:?}");
    }

    #[test]
    fn polynomial_seed_is_its_own_approximation() {
        let f: Seed = "poly 1 2 3".parse().unwrap();
        let a = polynomial_approx(&f, 1.0, 1e-3, &ApproxOptions::default()).unwrap();
        assert_eq!(a.achieved, 0.0);
        assert_eq!(a.degree, 2);
    }

    #[test]
    fn rational_seed_approximation_meets_target() {
        let f: Seed = "rational 1 / 2 -1".parse().unwrap();
        let opts = ApproxOptions {
            grid: PolarGrid::new(400, 256),
            ..Default::default()
        };
        let a = polynomial_approx(&f, 1.0, 1e-3, &opts).unwrap();
        let check = norm_pl(&f.minus(&a.polynomial), 1, 1.0, &PolarGrid::default()).unwrap();
        assert!(check.value < 1e-3, "{a:?}");
    }

    #[test]
    fn custom_seed_uses_dilation() {
        // bounded on the disc, singular on the circle: log-type behaviour is avoided,
        // sqrt(1 − z) is continuous up to the boundary
        let f = Seed::Custom(CustomSeed::new("sqrt(1-z)", 2f64.sqrt(), |z: Complex64| {
            let s = (1.0 - z).sqrt();
            (s, -0.5 / s)
        }));
        let opts = ApproxOptions {
            grid: PolarGrid::new(200, 128),
            max_degree: 512,
            ..Default::default()
        };
        let a = polynomial_approx(&f, 1.0, 1e-2, &opts).unwrap();
        assert!(a.dilation < 1.0 && a.achieved < 1e-2, "{a:?}");
    }

    #[test]
    fn degree_cap_reports_target_not_reached() {
        let f: Seed = "rational 1 / 1.1 -1".parse().unwrap();
        let opts = ApproxOptions {
            grid: PolarGrid::new(100, 64),
            max_degree: 8,
            ..Default::default()
        };
        assert!(matches!(
            polynomial_approx(&f, 0.0, 1e-8, &opts),
            Err(Error::TargetNotReached { degree: 8, .. })
        ));
    }

    #[test]
    fn schwarz_bound_trivial_equality_and_preset() {
        let z = DiscPoint::from_re_im(0.2, 0.1).unwrap();
        let f: Seed = "poly 1 1".parse().unwrap();
        let tb = ball_for(&FuchsianGroup::trivial(), DiscPoint::origin(), z, 3.0).unwrap();
        let t = schwarz_bound_check(&tb, &f, 3, z, 3.0).unwrap();
        assert!((t.lhs - t.rhs).abs() <= 1e-14 * t.rhs);
        let g = octagon();
        let ball = ball_for(&g, DiscPoint::origin(), z, 7.0).unwrap();
        let r = schwarz_bound_check(&ball, &Seed::constant(1.0), 3, z, 7.0).unwrap();
        assert!(r.holds && r.prefix_violations == 0);
        assert!(r.value_sqr <= r.lhs * (1.0 + 1e-12));
    }

    #[test]
    fn transfer_bound_holds() {
        let g = octagon();
        let f: Seed = "rational 1 / 2 -1".parse().unwrap();
        let h = Seed::Polynomial(f.taylor(6));
        let pts: Vec<DiscPoint> = [(0.0, 0.0), (0.3, 0.2), (-0.4, 0.1)]
            .iter()
            .map(|&(a, b)| DiscPoint::from_re_im(a, b).unwrap())
            .collect();
        let ball = enumerate_ball(&g, DiscPoint::origin(), 7.0).unwrap();
        for row in approximation_transfer_check(&ball, &f, &h, 4, &pts, 6.0).unwrap() {
            assert!(row.holds, "{row:?}");
        }
    }
}
