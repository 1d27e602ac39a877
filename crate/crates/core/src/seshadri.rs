//! Orbit-geometric lower bounds for the Seshadri constant of the canonical
//! bundle of `Ω/Γ`.
//!
//! The potential `ψ^x(z) = Σ_γ a(log(ρ(γz, x)²/r²))` with the cut-off
//! `a(t) = 1 + t − e^t` for `t < 0` (zero otherwise) has a logarithmic pole
//! along `Γx` and satisfies `∂∂̄ψ ≥ −2·D(r, x)·g`: every orbit point within
//! `r` of `z` contributes at least `−(4/r²)|∂ρ|² = −2g/r²`, and there are at
//! most `D(r, x)·r²` of them. This yields `ε(K, x) ≥ 1/(2D(r, x))`, and at
//! `r = ρ_x` (where each such ball holds one orbit point) `ε(K, x) ≥ ρ_x²/2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{bergman_metric, distance, raw_distance, DiscPoint};
use crate::group::{enumerate_ball, FuchsianGroup, FundamentalDomain, OrbitBall, Word};

/// Orbit points closer than this make `ψ` singular.
pub const SINGULAR_DISTANCE: f64 = 1e-9;

/// `(a(t), a′(t))`.
pub fn cutoff_a(t: f64) -> (f64, f64) {
    if t >= 0.0 {
        (0.0, 0.0)
    } else {
        // 1 + t − e^t = t − (e^t − 1)
        (t - t.exp_m1(), -t.exp_m1())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityRadius {
    pub x: DiscPoint,
    /// `ρ_x = ½ min_{γ ≠ 1} ρ(x, γx)`.
    pub rho: f64,
    pub minimizer: Word,
    pub ball_radius: f64,
    pub ball_size: usize,
}

/// Half the smallest non-trivial displacement of `x`, searched in a ball of
/// radius `2·d + margin` with `d` the smallest generator displacement.
pub fn injectivity_radius(group: &FuchsianGroup, x: DiscPoint, margin: f64) -> Result<InjectivityRadius> {
    let d = group
        .min_generator_displacement(x)
        .ok_or_else(|| Error::invalid("the trivial group has no injectivity radius"))?;
    let radius = 2.0 * d + margin;
    let ball = enumerate_ball(group, x, radius)?;
    let e = ball
        .entries
        .get(1)
        .ok_or_else(|| Error::invalid("no non-trivial element found"))?;
    Ok(InjectivityRadius {
        x,
        rho: e.displacement / 2.0,
        minimizer: e.element.word.clone(),
        ball_radius: radius,
        ball_size: ball.len(),
    })
}

/// Options for the density search over a fundamental domain.
#[derive(Debug, Clone, Serialize)]
pub struct DensityOptions {
    /// Hyperbolic grid spacing is `r / points_per_radius`.
    pub points_per_radius: f64,
    /// Sub-grid factor of the local refinement pass (0 disables it).
    pub refinement: usize,
}

impl Default for DensityOptions {
    fn default() -> Self {
        DensityOptions {
            points_per_radius: 20.0,
            refinement: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub x: DiscPoint,
    pub r: f64,
    /// Largest orbit count found.
    pub count: usize,
    /// `count / r²`.
    pub density: f64,
    pub argmax: DiscPoint,
    pub grid_points: usize,
    pub refined_points: usize,
    /// Largest count before refinement.
    pub coarse_count: usize,
}

/// Orbit ball about `x` that covers counts and `ψ` at radius `r` for every
/// point of the domain.
pub fn ball_over_domain(group: &FuchsianGroup, x: DiscPoint, domain: &FundamentalDomain, r: f64) -> Result<OrbitBall> {
    enumerate_ball(group, x, r + domain_grid_reach(x, domain) + 1e-9)
}

fn domain_grid_reach(x: DiscPoint, domain: &FundamentalDomain) -> f64 {
    distance(x, domain.center) + domain.circumradius()
}

/// Regular grid points of the domain with Euclidean spacing `h`.
pub fn domain_grid(domain: &FundamentalDomain, h: f64) -> Vec<Complex64> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in domain.vertices.iter().chain(std::iter::once(&domain.center.z())) {
        lo = [lo[0].min(v.re), lo[1].min(v.im)];
        hi = [hi[0].max(v.re), hi[1].max(v.im)];
    }
    let (nx, ny) = (((hi[0] - lo[0]) / h).ceil() as i64, ((hi[1] - lo[1]) / h).ceil() as i64);
    let mut out = Vec::new();
    for i in 0..=nx {
        for j in 0..=ny {
            let z = Complex64::new(lo[0] + i as f64 * h, lo[1] + j as f64 * h);
            if domain.contains(z) {
                out.push(z);
            }
        }
    }
    out
}

/// Euclidean spacing giving hyperbolic spacing at most `s` on the domain.
fn euclidean_spacing(domain: &FundamentalDomain, s: f64) -> f64 {
    let far = domain
        .vertices
        .iter()
        .map(|v| v.norm_sqr())
        .fold(domain.center.z().norm_sqr(), f64::max);
    // ds = 2|dz|/(1 − |z|²)
    s * (1.0 - far) / 2.0
}

/// Orbit points `γx` with their displacements, sorted by displacement.
struct Orbit {
    base: Complex64,
    points: Vec<(f64, Complex64)>,
}

impl Orbit {
    fn new(ball: &OrbitBall) -> Self {
        let x = ball.base.z();
        Orbit {
            base: x,
            points: ball
                .entries
                .iter()
                .map(|e| (e.displacement, e.element.iso.act(x)))
                .collect(),
        }
    }

    fn count(&self, z: Complex64, r: f64) -> usize {
        let need = r + raw_distance(self.base, z) + 1e-12;
        let n = self.points.partition_point(|p| p.0 <= need);
        self.points[..n].iter().filter(|p| raw_distance(p.1, z) < r).count()
    }
}

#[cfg(test)]
fn count_at(ball: &OrbitBall, z: Complex64, r: f64) -> usize {
    Orbit::new(ball).count(z, r)
}

/// `D(r, x) = sup_z #{γx : ρ(γx, z) < r} / r²`, with the supremum taken over
/// a grid of the fundamental domain (the count is Γ-invariant in `z`) and one
/// local refinement around the best points.
pub fn density(
    group: &FuchsianGroup,
    x: DiscPoint,
    r: f64,
    domain: &FundamentalDomain,
    opts: &DensityOptions,
) -> Result<DensityReport> {
    if !(r > 0.0) {
        return Err(Error::invalid("density radius must be positive"));
    }
    let ball = ball_over_domain(group, x, domain, r)?;
    density_with_ball(&ball, r, domain, opts)
}

pub fn density_with_ball(
    ball: &OrbitBall,
    r: f64,
    domain: &FundamentalDomain,
    opts: &DensityOptions,
) -> Result<DensityReport> {
    let h = euclidean_spacing(domain, r / opts.points_per_radius);
    let grid = domain_grid(domain, h);
    if grid.is_empty() {
        return Err(Error::invalid("empty density grid"));
    }
    let reach = domain_grid_reach(ball.base, domain);
    if r + reach > ball.radius + 1e-9 {
        return Err(Error::InsufficientBall {
            radius: ball.radius,
            reason: format!("density at radius {r} needs {}", r + reach),
        });
    }
    let orbit = Orbit::new(ball);
    let counts: Vec<usize> = grid.par_iter().map(|&z| orbit.count(z, r)).collect();
    let coarse = *counts.iter().max().expect("nonempty");
    let mut best = (
        coarse,
        grid[counts.iter().position(|&c| c == coarse).expect("max exists")],
    );
    let mut refined_points = 0;
    if opts.refinement > 0 {
        let k = opts.refinement as i64;
        let sub = h / opts.refinement as f64;
        let centers: Vec<Complex64> = grid
            .iter()
            .zip(&counts)
            .filter(|(_, &c)| c + 1 >= coarse)
            .map(|(z, _)| *z)
            .collect();
        let local: Vec<(usize, Complex64)> = centers
            .par_iter()
            .flat_map_iter(|&c| {
                (-k..=k).flat_map(move |i| (-k..=k).map(move |j| c + Complex64::new(i as f64 * sub, j as f64 * sub)))
            })
            .filter(|z| domain.contains(*z))
            .map(|z| (orbit.count(z, r), z))
            .collect();
        refined_points = local.len();
        for (c, z) in local {
            if c > best.0 {
                best = (c, z);
            }
        }
    }
    Ok(DensityReport {
        x: ball.base,
        r,
        count: best.0,
        density: best.0 as f64 / (r * r),
        argmax: DiscPoint::new(best.1)?,
        grid_points: grid.len(),
        refined_points,
        coarse_count: coarse,
    })
}

/// `ψ^x(z)` from the orbit points of the ball's base within `r` of `z`.
pub fn psi_x(ball: &OrbitBall, r: f64, z: DiscPoint) -> Result<f64> {
    let need = ball.require_cover(z, r)?;
    let x = ball.base.z();
    let mut s = crate::summation::NeumaierSum::new();
    for e in ball.within(need) {
        let d = raw_distance(e.element.iso.act(x), z.z());
        if d < SINGULAR_DISTANCE {
            return Err(Error::OrbitSingularity { distance: d });
        }
        if d < r {
            s.add(cutoff_a(2.0 * (d / r).ln()).0);
        }
    }
    Ok(s.value())
}

/// Isotropic nine-point Laplacian of `f` at `z` with spacing `h`.
fn laplacian9<F: Fn(Complex64) -> f64>(f: &F, z: Complex64, h: f64) -> f64 {
    let at = |i: f64, j: f64| f(z + Complex64::new(i * h, j * h));
    let edge = at(1.0, 0.0) + at(-1.0, 0.0) + at(0.0, 1.0) + at(0.0, -1.0);
    let corner = at(1.0, 1.0) + at(1.0, -1.0) + at(-1.0, 1.0) + at(-1.0, -1.0);
    (4.0 * edge + corner - 20.0 * at(0.0, 0.0)) / (6.0 * h * h)
}

#[derive(Debug, Clone, Serialize)]
pub struct PshViolation {
    pub z: DiscPoint,
    /// Finite-difference `∂²ψ/∂z∂z̄`.
    pub value: f64,
    /// `−2·D·g(z)`.
    pub bound: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuasiPshReport {
    pub x: DiscPoint,
    pub r: f64,
    pub density: f64,
    pub h: f64,
    pub grid_points: usize,
    pub excluded: usize,
    /// Smallest `∂∂̄ψ / g` over the grid.
    pub min_ratio: f64,
    /// The asserted floor `−2D` for that ratio.
    pub floor: f64,
    /// Largest finite-difference error scale `|L_h − L_{2h}|/4 / g`.
    pub max_tau_ratio: f64,
    pub violations: Vec<PshViolation>,
    pub passes: bool,
}

/// Check `∂∂̄ψ ≥ −2·D(r, x)·g − τ` on `points`, skipping points within
/// `10h` of the orbit. `τ` is the gap between the spacing-`h` and
/// spacing-`2h` stencils at the same point plus a rounding allowance.
pub fn quasi_psh_check(ball: &OrbitBall, r: f64, density: f64, points: &[Complex64], h: f64) -> Result<QuasiPshReport> {
    let x = ball.base.z();
    let orbit: Vec<Complex64> = ball.entries.iter().map(|e| e.element.iso.act(x)).collect();
    let reach = 2.0 * h + 1e-9;
    let results: Vec<Option<(Complex64, f64, f64, f64)>> = points
        .par_iter()
        .map(|&z| {
            if orbit.iter().any(|p| (p - z).norm() < 10.0 * h) {
                return Ok(None);
            }
            let zp = DiscPoint::new(z)?;
            ball.require_cover(zp, r + reach)?;
            let f = |w: Complex64| {
                psi_x(ball, r, DiscPoint::new(w).expect("stencil inside the disc")).expect("away from the orbit")
            };
            let l1 = laplacian9(&f, z, h) / 4.0;
            let l2 = laplacian9(&f, z, 2.0 * h) / 4.0;
            let g = bergman_metric(zp);
            let rounding = 1e3 * f64::EPSILON * (1.0 + f(z).abs()) / (h * h);
            Ok(Some((z, l1, (l1 - l2).abs() + rounding, g)))
        })
        .collect::<Result<_>>()?;
    let mut min_ratio = f64::INFINITY;
    let mut max_tau_ratio: f64 = 0.0;
    let mut violations = Vec::new();
    let mut excluded = 0;
    for r in results {
        let Some((z, value, tau, g)) = r else {
            excluded += 1;
            continue;
        };
        min_ratio = min_ratio.min(value / g);
        max_tau_ratio = max_tau_ratio.max(tau / g);
        let bound = -2.0 * density * g;
        if value < bound - tau {
            violations.push(PshViolation {
                z: DiscPoint::new(z)?,
                value,
                bound,
                tau,
            });
        }
    }
    Ok(QuasiPshReport {
        x: ball.base,
        r,
        density,
        h,
        grid_points: points.len(),
        excluded,
        min_ratio,
        floor: -2.0 * density,
        max_tau_ratio,
        passes: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusCandidate {
    pub r: f64,
    pub count: usize,
    pub density: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeshadriReport {
    pub x: DiscPoint,
    pub rho_x: f64,
    pub best_r: f64,
    #[serde(rename = "D_best")]
    pub d_best: f64,
    /// `ρ_x²/2`.
    pub bound_inj: f64,
    /// `1/(2·D_best)`.
    pub bound_density: f64,
    pub epsilon_lower: f64,
    pub candidates: Vec<RadiusCandidate>,
}

/// Default candidate radii as multiples of `ρ_x`.
pub const DEFAULT_RADIUS_FACTORS: [f64; 5] = [1.0, 1.25, 1.5, 2.0, 3.0];

/// Both lower bounds at `x`, maximizing the density bound over
/// `ρ_x · factors`.
pub fn seshadri_lower_bound(
    group: &FuchsianGroup,
    x: DiscPoint,
    domain: &FundamentalDomain,
    factors: &[f64],
    opts: &DensityOptions,
) -> Result<SeshadriReport> {
    if factors.is_empty() {
        return Err(Error::invalid("no candidate radii"));
    }
    let rho = injectivity_radius(group, x, 0.5)?.rho;
    let r_max = factors.iter().fold(0.0f64, |a, &f| a.max(f)) * rho;
    let ball = ball_over_domain(group, x, domain, r_max)?;
    let mut candidates = Vec::with_capacity(factors.len());
    for &f in factors {
        let r = f * rho;
        let d = density_with_ball(&ball, r, domain, opts)?;
        candidates.push(RadiusCandidate {
            r,
            count: d.count,
            density: d.density,
            bound: 1.0 / (2.0 * d.density),
        });
    }
    let best = candidates
        .iter()
        .max_by(|a, b| a.bound.total_cmp(&b.bound).then(b.r.total_cmp(&a.r)))
        .expect("nonempty")
        .clone();
    let bound_inj = rho * rho / 2.0;
    Ok(SeshadriReport {
        x,
        rho_x: rho,
        best_r: best.r,
        d_best: best.density,
        bound_inj,
        bound_density: best.bound,
        epsilon_lower: bound_inj.max(best.bound),
        candidates,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GlobalSeshadri {
    pub reports: Vec<SeshadriReport>,
    /// Smallest `epsilon_lower` over the sampled points.
    pub epsilon_lower: f64,
    pub argmin: DiscPoint,
}

/// Infimum over sample points of the pointwise bounds.
pub fn global_lower_bound(
    group: &FuchsianGroup,
    domain: &FundamentalDomain,
    points: &[DiscPoint],
    factors: &[f64],
    opts: &DensityOptions,
) -> Result<GlobalSeshadri> {
    let reports: Vec<SeshadriReport> = points
        .iter()
        .map(|&x| seshadri_lower_bound(group, x, domain, factors, opts))
        .collect::<Result<_>>()?;
    let worst = reports
        .iter()
        .min_by(|a, b| a.epsilon_lower.total_cmp(&b.epsilon_lower))
        .ok_or_else(|| Error::invalid("no sample points"))?;
    Ok(GlobalSeshadri {
        epsilon_lower: worst.epsilon_lower,
        argmin: worst.x,
        reports,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub epsilon: f64,
    pub n: u32,
    /// Smallest `m ≥ 2` with `(m − 1)ε > 2n`.
    pub demailly: u32,
    /// Smallest `m ≥ 2` with `(m − 2)ε > 2n`.
    pub main: u32,
    /// Smallest `m ≥ 2` with `(m − 2 + 1/C)ε > 2n`, when `C` is given.
    pub donnelly_fefferman: Option<u32>,
    pub c: Option<f64>,
}

/// Smallest integer `m ≥ 2` with `(m − shift)·ε > 2n`, found by testing the
/// inequality itself.
fn smallest_m(epsilon: f64, n: u32, shift: f64) -> u32 {
    let target = 2.0 * n as f64;
    let holds = |m: u32| (m as f64 - shift) * epsilon > target;
    let guess = (target / epsilon + shift).floor();
    let mut m = if guess.is_finite() {
        (guess as i64 - 1).max(2) as u32
    } else {
        2
    };
    while !holds(m) {
        m += 1;
    }
    m
}

pub fn ampleness_thresholds(epsilon: f64, n: u32, c: Option<f64>) -> Result<Thresholds> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if n == 0 {
        return Err(Error::invalid("dimension n must be at least 1"));
    }
    if let Some(c) = c {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid("C must be positive and finite"));
        }
    }
    Ok(Thresholds {
        epsilon,
        n,
        demailly: smallest_m(epsilon, n, 1.0),
        main: smallest_m(epsilon, n, 2.0),
        donnelly_fefferman: c.map(|c| smallest_m(epsilon, n, 2.0 - 1.0 / c)),
        c,
    })
}
