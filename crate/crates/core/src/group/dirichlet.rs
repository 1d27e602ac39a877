//! Dirichlet fundamental domains and quadrature over them.
//!
//! Bisectors `{ρ(z, x) = ρ(z, γx)}` are geodesics, i.e. straight lines in the
//! Klein model, so the domain is built by clipping a convex polygon in Klein
//! coordinates against half-planes and then mapped back to the Poincaré disc.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::enumerate::{enumerate_ball_with, EnumerationOptions};
use super::{FuchsianGroup, GroupElement};
use crate::error::{Error, Result};
use crate::geometry::{distance, DiscPoint};
use crate::summation::NeumaierSum;

#[derive(Debug, Clone)]
pub struct DirichletOptions {
    /// Euclidean spacing of the quadrature grid.
    pub spacing: f64,
    /// Sub-samples per axis used to weigh cells cut by the boundary.
    pub boundary_subsamples: usize,
    /// Added to `2·d₀` for the first orbit ball.
    pub margin: f64,
    pub max_retries: usize,
    pub enumeration: EnumerationOptions,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        DirichletOptions {
            spacing: 0.004,
            boundary_subsamples: 8,
            margin: 0.5,
            max_retries: 3,
            enumeration: EnumerationOptions::default(),
        }
    }
}

/// A side of the domain: the bisector between the center and `γ·center`,
/// stored as the Klein half-plane `normal · k ≤ offset`.
#[derive(Debug, Clone, Serialize)]
pub struct Side {
    pub element: GroupElement,
    pub normal: [f64; 2],
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct QuadNode {
    pub z: Complex64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FundamentalDomain {
    pub center: DiscPoint,
    /// Poincaré coordinates, counterclockwise.
    pub vertices: Vec<Complex64>,
    /// `sides[i]` joins `vertices[i]` and `vertices[i + 1]`.
    pub sides: Vec<Side>,
    pub quadrature: Vec<QuadNode>,
    pub spacing: f64,
    /// Radius of the orbit ball the polygon was certified against.
    pub ball_radius: f64,
}

fn to_klein(p: Complex64) -> [f64; 2] {
    let s = 2.0 / (1.0 + p.norm_sqr());
    [p.re * s, p.im * s]
}

fn from_klein(k: [f64; 2]) -> Complex64 {
    let r2 = k[0] * k[0] + k[1] * k[1];
    let s = 1.0 / (1.0 + (1.0 - r2).max(0.0).sqrt());
    Complex64::new(k[0] * s, k[1] * s)
}

fn hyperboloid(p: Complex64) -> [f64; 3] {
    let d = 1.0 - p.norm_sqr();
    [(1.0 + p.norm_sqr()) / d, 2.0 * p.re / d, 2.0 * p.im / d]
}

/// Half-plane of Klein points closer to `x` than to `y`.
fn bisector(x: Complex64, y: Complex64) -> ([f64; 2], f64) {
    let (hx, hy) = (hyperboloid(x), hyperboloid(y));
    let n = [hy[1] - hx[1], hy[2] - hx[2]];
    let b = hy[0] - hx[0];
    let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
    ([n[0] / len, n[1] / len], b / len)
}

const NO_SIDE: usize = usize::MAX;

/// Clip a convex polygon (vertex, label of the outgoing edge) by `n·k ≤ b`.
fn clip(poly: &[([f64; 2], usize)], n: [f64; 2], b: f64, label: usize) -> Vec<([f64; 2], usize)> {
    let excess = |p: [f64; 2]| n[0] * p[0] + n[1] * p[1] - b;
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let (p, lp) = poly[i];
        let (q, _) = poly[(i + 1) % poly.len()];
        let (sp, sq) = (excess(p), excess(q));
        let cut = |sp: f64, sq: f64| {
            let t = sp / (sp - sq);
            [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
        };
        match (sp <= 0.0, sq <= 0.0) {
            (true, true) => out.push((p, lp)),
            (true, false) => {
                out.push((p, lp));
                out.push((cut(sp, sq), label));
            }
            (false, true) => out.push((cut(sp, sq), lp)),
            (false, false) => {}
        }
    }
    out
}

fn dedup_vertices(poly: Vec<([f64; 2], usize)>, tol: f64) -> Vec<([f64; 2], usize)> {
    let mut out: Vec<([f64; 2], usize)> = Vec::with_capacity(poly.len());
    for v in poly {
        if let Some(last) = out.last_mut() {
            if (last.0[0] - v.0[0]).hypot(last.0[1] - v.0[1]) < tol {
                // zero-length edge: keep the position, take the outgoing label
                last.1 = v.1;
                continue;
            }
        }
        out.push(v);
    }
    while out.len() > 1 {
        let (f, l) = (out[0].0, out[out.len() - 1].0);
        if (f[0] - l[0]).hypot(f[1] - l[1]) < tol {
            let label = out[0].1;
            out.remove(0);
            let n = out.len();
            out[n - 1].1 = label;
        } else {
            break;
        }
    }
    out
}

/// Dirichlet domain about `x` with default options.
pub fn dirichlet_domain(group: &FuchsianGroup, x: DiscPoint) -> Result<FundamentalDomain> {
    dirichlet_domain_with(group, x, &DirichletOptions::default())
}

pub fn dirichlet_domain_with(
    group: &FuchsianGroup,
    x: DiscPoint,
    opts: &DirichletOptions,
) -> Result<FundamentalDomain> {
    let d0 = group
        .min_generator_displacement(x)
        .ok_or_else(|| Error::invalid("the trivial group has no compact fundamental domain"))?;
    let mut radius = 2.0 * d0 + opts.margin;
    for _ in 0..=opts.max_retries {
        let ball = enumerate_ball_with(group, x, radius, &opts.enumeration)?;
        let mut poly: Vec<([f64; 2], usize)> = vec![
            ([-1.0, -1.0], NO_SIDE),
            ([1.0, -1.0], NO_SIDE),
            ([1.0, 1.0], NO_SIDE),
            ([-1.0, 1.0], NO_SIDE),
        ];
        let mut planes = Vec::with_capacity(ball.len());
        for (i, e) in ball.entries.iter().enumerate().skip(1) {
            let (n, b) = bisector(x.z(), e.element.iso.act(x.z()));
            planes.push((i, n, b));
            poly = clip(&poly, n, b, i);
            if poly.is_empty() {
                return Err(Error::invalid("empty Dirichlet polygon"));
            }
        }
        let poly = dedup_vertices(poly, 1e-10);
        let compact = poly.len() >= 3
            && poly
                .iter()
                .all(|(k, l)| *l != NO_SIDE && k[0] * k[0] + k[1] * k[1] < 1.0 - 1e-12);
        if !compact {
            radius += 2.0 * d0;
            continue;
        }
        let vertices: Vec<Complex64> = poly.iter().map(|(k, _)| from_klein(*k)).collect();
        let circumradius = vertices.iter().map(|&v| distance(x, inside(v))).fold(0.0, f64::max);
        // a bisector cutting the polygon has its orbit point within 2·circumradius
        if 2.0 * circumradius > radius {
            radius = 2.0 * circumradius + opts.margin;
            continue;
        }
        let sides = poly
            .iter()
            .map(|(_, l)| {
                let (_, n, b) = planes.iter().find(|(i, _, _)| i == l).copied().unwrap();
                Side {
                    element: ball.entries[*l].element.clone(),
                    normal: n,
                    offset: b,
                }
            })
            .collect();
        let mut domain = FundamentalDomain {
            center: x,
            vertices,
            sides,
            quadrature: Vec::new(),
            spacing: opts.spacing,
            ball_radius: radius,
        };
        domain.quadrature = domain.build_quadrature(opts.spacing, opts.boundary_subsamples);
        return Ok(domain);
    }
    Err(Error::InsufficientBall {
        radius,
        reason: "Dirichlet polygon did not stabilize".into(),
    })
}

/// For points already known to lie strictly inside the disc.
fn inside(z: Complex64) -> DiscPoint {
    DiscPoint::new(z).expect("vertex inside the disc")
}

impl FundamentalDomain {
    /// Signed Klein slack of the most violated side (≤ 0 inside).
    fn excess(&self, z: Complex64) -> f64 {
        let k = to_klein(z);
        self.sides
            .iter()
            .map(|s| s.normal[0] * k[0] + s.normal[1] * k[1] - s.offset)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Closed-domain membership.
    pub fn contains(&self, z: Complex64) -> bool {
        z.norm() < 1.0 && self.excess(z) <= 0.0
    }

    /// Membership with a Klein-coordinate margin from every side.
    pub fn contains_interior(&self, z: Complex64, margin: f64) -> bool {
        z.norm() < 1.0 && self.excess(z) < -margin
    }

    /// Largest ρ(center, vertex).
    pub fn circumradius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|&v| distance(self.center, inside(v)))
            .fold(0.0, f64::max)
    }

    /// Euclidean area of the region bounded by the geodesic sides: the
    /// straight polygon minus the circular segments cut off by each arc.
    pub fn euclidean_area(&self) -> f64 {
        let n = self.vertices.len();
        let mut shoelace = 0.0;
        let mut segments = 0.0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            shoelace += p.re * q.im - q.re * p.im;
            segments += geodesic_segment_area(p, q);
        }
        shoelace.abs() / 2.0 - segments
    }

    pub fn weight_sum(&self) -> f64 {
        let mut s = NeumaierSum::new();
        s.extend(self.quadrature.iter().map(|q| q.weight));
        s.value()
    }

    /// ∫_F f dλ by the clipped-grid rule.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(Complex64) -> Complex64 + Sync,
    {
        let values: Vec<Complex64> = self.quadrature.par_iter().map(|q| f(q.z) * q.weight).collect();
        crate::summation::sum_complex(values)
    }

    /// Rebuild the quadrature at another spacing.
    pub fn with_spacing(&self, spacing: f64, subsamples: usize) -> FundamentalDomain {
        let mut d = self.clone();
        d.spacing = spacing;
        d.quadrature = d.build_quadrature(spacing, subsamples);
        d
    }

    fn build_quadrature(&self, h: f64, sub: usize) -> Vec<QuadNode> {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in &self.vertices {
            lo = [lo[0].min(v.re), lo[1].min(v.im)];
            hi = [hi[0].max(v.re), hi[1].max(v.im)];
        }
        let i0 = (lo[0] / h).floor() as i64 - 1;
        let i1 = (hi[0] / h).ceil() as i64 + 1;
        let j0 = (lo[1] / h).floor() as i64 - 1;
        let j1 = (hi[1] / h).ceil() as i64 + 1;
        let sub = sub.max(1);
        let rows: Vec<Vec<QuadNode>> = (j0..j1)
            .into_par_iter()
            .map(|j| {
                let mut row = Vec::new();
                for i in i0..i1 {
                    let (x0, y0) = (i as f64 * h, j as f64 * h);
                    let center = Complex64::new(x0 + h / 2.0, y0 + h / 2.0);
                    let probes = [
                        center,
                        Complex64::new(x0, y0),
                        Complex64::new(x0 + h, y0),
                        Complex64::new(x0, y0 + h),
                        Complex64::new(x0 + h, y0 + h),
                    ];
                    let inside = probes.iter().filter(|&&p| self.contains(p)).count();
                    let has_vertex = self
                        .vertices
                        .iter()
                        .any(|v| v.re >= x0 && v.re <= x0 + h && v.im >= y0 && v.im <= y0 + h);
                    if !has_vertex && inside == probes.len() {
                        row.push(QuadNode {
                            z: center,
                            weight: h * h,
                        });
                    } else if has_vertex || inside > 0 {
                        if let Some(node) = self.partial_cell(x0, y0, h, sub) {
                            row.push(node);
                        }
                    }
                }
                row
            })
            .collect();
        rows.into_iter().flatten().collect()
    }

    fn partial_cell(&self, x0: f64, y0: f64, h: f64, sub: usize) -> Option<QuadNode> {
        let hs = h / sub as f64;
        let mut hits = Vec::new();
        for a in 0..sub {
            for b in 0..sub {
                let p = Complex64::new(x0 + (a as f64 + 0.5) * hs, y0 + (b as f64 + 0.5) * hs);
                if self.contains(p) {
                    hits.push(p);
                }
            }
        }
        if hits.is_empty() {
            return None;
        }
        let centroid = hits.iter().sum::<Complex64>() / hits.len() as f64;
        let z = if self.contains(centroid) {
            centroid
        } else {
            *hits
                .iter()
                .min_by(|p, q| (**p - centroid).norm().total_cmp(&(**q - centroid).norm()))
                .unwrap()
        };
        Some(QuadNode {
            z,
            weight: h * h * hits.len() as f64 / (sub * sub) as f64,
        })
    }

    /// Uniform (Euclidean) random points of the domain at Klein margin `margin`.
    pub fn sample_points<R: Rng>(&self, rng: &mut R, n: usize, margin: f64) -> Vec<DiscPoint> {
        let r = self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let z = Complex64::new(rng.gen_range(-r..r), rng.gen_range(-r..r));
            if self.contains_interior(z, margin) {
                out.push(inside(z));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TilingReport {
    pub points: usize,
    pub ball_radius: f64,
    /// Points with a number of images in the domain other than one.
    pub failures: Vec<(DiscPoint, usize)>,
    pub passes: bool,
}

/// For each point, count the elements of a large enough ball that map it
/// into the closed domain; a tiling gives exactly one (off the boundary).
pub fn tiling_check(group: &FuchsianGroup, domain: &FundamentalDomain, points: &[DiscPoint]) -> Result<TilingReport> {
    let reach = points.iter().map(|&z| distance(domain.center, z)).fold(0.0, f64::max);
    let radius = reach + 2.0 * domain.circumradius() + 0.5;
    let ball = super::enumerate_ball(group, domain.center, radius)?;
    let failures: Vec<(DiscPoint, usize)> = points
        .par_iter()
        .filter_map(|&z| {
            let hits = ball
                .entries
                .iter()
                .filter(|e| domain.contains(e.element.iso.act(z.z())))
                .count();
            (hits != 1).then_some((z, hits))
        })
        .collect();
    Ok(TilingReport {
        points: points.len(),
        ball_radius: radius,
        passes: failures.is_empty(),
        failures,
    })
}

/// Area between the chord `pq` and the geodesic arc through `p` and `q`.
fn geodesic_segment_area(p: Complex64, q: Complex64) -> f64 {
    let cross = p.re * q.im - p.im * q.re;
    if cross.abs() < 1e-14 {
        return 0.0; // diameter
    }
    // center c of the circle through p, q orthogonal to the unit circle:
    // 2 Re(c p̄) = 1 + |p|², 2 Re(c q̄) = 1 + |q|²
    let (a1, b1, r1) = (2.0 * p.re, 2.0 * p.im, 1.0 + p.norm_sqr());
    let (a2, b2, r2) = (2.0 * q.re, 2.0 * q.im, 1.0 + q.norm_sqr());
    let det = a1 * b2 - a2 * b1;
    let c = Complex64::new((r1 * b2 - r2 * b1) / det, (a1 * r2 - a2 * r1) / det);
    let s = (c - p).norm();
    let chord = (q - p).norm();
    let theta = 2.0 * (chord / (2.0 * s)).min(1.0).asin();
    s * s / 2.0 * (theta - theta.sin())
}
