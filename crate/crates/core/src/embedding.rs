//! Sampled very-ampleness certificates from Poincaré series of monomials.
//!
//! The sections are truncated `σ_k = P_m(z^k)`, `k = 0..=d`. A point `x`
//! has separated jets when the `2×(d+1)` matrix with rows `σ(x)` and
//! `σ′(x)` has rank two, and `x`, `y` are separated when the rows `σ(x)` and
//! `σ(y)` do. Rows are normalized before the singular value decomposition,
//! so decisions do not depend on the automorphy factor.
//!
//! A scan only samples finitely many points and pairs: it produces evidence,
//! never a proof that the sections embed the quotient.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{distance, raw_distance, DiscPoint};
use crate::group::{enumerate_ball, FuchsianGroup, FundamentalDomain, OrbitBall};
use crate::series::{select_terms, shell_tail};
use crate::seshadri::{ampleness_thresholds, Thresholds};
use crate::summation::ComplexSum;

/// Smallest-to-largest singular value ratio declaring rank two.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Default top seed degree.
pub const DEFAULT_DEGREE: usize = 6;

/// Points closer than this to each other's orbit count as equivalent.
pub const EQUIVALENCE_DISTANCE: f64 = 1e-6;

/// Values and derivatives of all basis sections at one point.
#[derive(Debug, Clone, Serialize)]
pub struct SectionJet {
    pub z: DiscPoint,
    pub values: Vec<Complex64>,
    pub derivatives: Vec<Complex64>,
    /// Shell estimate of the omitted `Σ|j|^m`, bounding each value's tail.
    pub tail_estimate: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone)]
pub struct SectionBasis {
    pub m: u32,
    pub degree: usize,
    pub radius: f64,
    pub group: FuchsianGroup,
    pub ball: OrbitBall,
    pub cache: Vec<SectionJet>,
}

/// Build `P_m(z^k)`, `k = 0..=d`, truncated at radius `r` about `base`, and
/// cache jets at `samples`. `reach` bounds `ρ(base, z)` for every point the
/// basis will be evaluated at.
pub fn build_basis(
    group: &FuchsianGroup,
    base: DiscPoint,
    m: u32,
    degree: usize,
    r: f64,
    reach: f64,
    samples: &[DiscPoint],
) -> Result<SectionBasis> {
    if m < 2 {
        return Err(Error::invalid(format!("weight m = {m} must be at least 2")));
    }
    if degree < 1 {
        return Err(Error::invalid("seed degree d must be at least 1"));
    }
    let reach = samples.iter().map(|&z| distance(base, z)).fold(reach, f64::max);
    let ball = enumerate_ball(group, base, r + reach + 1e-9)?;
    let mut basis = SectionBasis {
        m,
        degree,
        radius: r,
        group: group.clone(),
        ball,
        cache: Vec::new(),
    };
    basis.cache = samples.par_iter().map(|&z| basis.evaluate(z)).collect::<Result<_>>()?;
    Ok(basis)
}

impl SectionBasis {
    /// Jets of every section at `z`. Each term contributes
    /// `w^k j^m` and `k w^{k−1} j^{m+1} + m w^k j^{m−1} j′` with `w = γz`.
    pub fn evaluate(&self, z: DiscPoint) -> Result<SectionJet> {
        let terms = select_terms(&self.ball, z, self.radius)?;
        let n = self.degree + 1;
        let m = self.m as i32;
        let mut vals = vec![ComplexSum::new(); n];
        let mut ders = vec![ComplexSum::new(); n];
        let mut weights = Vec::with_capacity(terms.len());
        for t in &terms {
            let jp = self.ball.entries[t.index].element.iso.jac_derivative(z.z());
            let jm = t.jac.powi(m);
            let jm1 = t.jac.powi(m - 1);
            let jm_plus = jm * t.jac;
            let mut wk = Complex64::new(1.0, 0.0);
            let mut wk1 = Complex64::new(0.0, 0.0);
            for k in 0..n {
                vals[k].add(wk * jm);
                ders[k].add(wk1 * k as f64 * jm_plus + wk * m as f64 * jm1 * jp);
                wk1 = wk;
                wk *= t.w;
            }
            weights.push((t.dist, t.jac.norm().powi(m)));
        }
        Ok(SectionJet {
            z,
            values: vals.iter().map(|s| s.value()).collect(),
            derivatives: ders.iter().map(|s| s.value()).collect(),
            tail_estimate: shell_tail(weights, self.radius),
            terms_used: terms.len(),
        })
    }

    pub fn cached(&self, z: DiscPoint) -> Option<&SectionJet> {
        self.cache.iter().find(|j| j.z == z)
    }

    fn jet_at(&self, z: DiscPoint) -> Result<SectionJet> {
        match self.cached(z) {
            Some(j) => Ok(j.clone()),
            None => self.evaluate(z),
        }
    }
}

/// Singular values (largest first) of the two rows after scaling each to
/// unit length.
fn two_row_singular_values(a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    let norm = |r: &[Complex64]| r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return (na.max(nb).min(1.0), 0.0);
    }
    let mat = DMatrix::from_fn(2, a.len(), |i, j| if i == 0 { a[j] / na } else { b[j] / nb });
    let s = mat.singular_values();
    (s.max(), s.min())
}

#[derive(Debug, Clone, Serialize)]
pub struct JetTest {
    pub x: DiscPoint,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub ratio: f64,
    /// Largest `|σ_k(x)|`.
    pub max_value: f64,
    pub tail_estimate: f64,
    pub passes: bool,
}

/// Rank of `(σ(x); σ′(x))`.
pub fn jet_separation_test(basis: &SectionBasis, x: DiscPoint) -> Result<JetTest> {
    let jet = basis.jet_at(x)?;
    let max_value = jet.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !(max_value > jet.tail_estimate.max(1e-300) * 1e3) {
        return Err(Error::DegenerateBasis);
    }
    let (sigma_max, sigma_min) = two_row_singular_values(&jet.values, &jet.derivatives);
    let ratio = sigma_min / sigma_max;
    Ok(JetTest {
        x,
        sigma_max,
        sigma_min,
        ratio,
        max_value,
        tail_estimate: jet.tail_estimate,
        passes: ratio > RANK_TOLERANCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PointTest {
    pub x: DiscPoint,
    pub y: DiscPoint,
    /// `min_γ ρ(y, γx)` over the searched ball.
    pub orbit_distance: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub ratio: f64,
    pub passes: bool,
}

/// Singular value ratio of `(σ(x); σ(y))` without the equivalence check; it
/// is near zero exactly when the projective images coincide.
pub fn projective_separation(basis: &SectionBasis, x: DiscPoint, y: DiscPoint) -> Result<f64> {
    let (a, b) = (basis.jet_at(x)?, basis.jet_at(y)?);
    let (hi, lo) = two_row_singular_values(&a.values, &b.values);
    Ok(lo / hi)
}

/// `min_γ ρ(y, γx)`, searched over elements moving `x` by at most
/// `ρ(x, y) + EQUIVALENCE_DISTANCE`.
pub fn orbit_distance(group: &FuchsianGroup, x: DiscPoint, y: DiscPoint) -> Result<f64> {
    let ball = enumerate_ball(group, x, distance(x, y) + EQUIVALENCE_DISTANCE)?;
    Ok(ball
        .entries
        .iter()
        .map(|e| raw_distance(e.element.iso.act(x.z()), y.z()))
        .fold(f64::INFINITY, f64::min))
}

/// Rank of `(σ(x); σ(y))` for Γ-inequivalent `x`, `y`.
pub fn point_separation_test(basis: &SectionBasis, x: DiscPoint, y: DiscPoint) -> Result<PointTest> {
    let d = orbit_distance(&basis.group, x, y)?;
    if d <= EQUIVALENCE_DISTANCE {
        return Err(Error::EquivalentPoints { distance: d });
    }
    let (a, b) = (basis.jet_at(x)?, basis.jet_at(y)?);
    let (sigma_max, sigma_min) = two_row_singular_values(&a.values, &b.values);
    let ratio = sigma_min / sigma_max;
    Ok(PointTest {
        x,
        y,
        orbit_distance: d,
        sigma_max,
        sigma_min,
        ratio,
        passes: ratio > RANK_TOLERANCE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub m: u32,
    pub degree: usize,
    pub radius: f64,
    pub jet_tests: Vec<JetTest>,
    pub point_tests: Vec<PointTest>,
    /// Points whose sections all vanish numerically.
    pub degenerate_points: Vec<DiscPoint>,
    pub jet_pass_rate: f64,
    pub point_pass_rate: f64,
    pub min_jet_ratio: f64,
    pub min_point_ratio: f64,
    /// Thresholds predicted from the supplied Seshadri lower bound.
    pub prediction: Option<Thresholds>,
    /// Whether `m` reaches the predicted main threshold.
    pub predicted_very_ample: Option<bool>,
    pub note: &'static str,
}

pub const SCAN_NOTE: &str = "sampled evidence only: finitely many points and pairs cannot certify a global embedding";

/// Jet tests at `points` and point tests at `pairs`.
pub fn scan_with(
    basis: &SectionBasis,
    points: &[DiscPoint],
    pairs: &[(DiscPoint, DiscPoint)],
    epsilon: Option<f64>,
) -> Result<ScanReport> {
    let jets: Vec<Result<JetTest>> = points.par_iter().map(|&x| jet_separation_test(basis, x)).collect();
    let mut jet_tests = Vec::new();
    let mut degenerate_points = Vec::new();
    for (x, r) in points.iter().zip(jets) {
        match r {
            Ok(t) => jet_tests.push(t),
            Err(Error::DegenerateBasis) => degenerate_points.push(*x),
            Err(e) => return Err(e),
        }
    }
    let point_tests: Vec<PointTest> = pairs
        .par_iter()
        .map(|&(x, y)| point_separation_test(basis, x, y))
        .collect::<Result<_>>()?;
    let rate = |passed: usize, total: usize| if total == 0 { 1.0 } else { passed as f64 / total as f64 };
    let jet_passed = jet_tests.iter().filter(|t| t.passes).count();
    let prediction = epsilon.map(|e| ampleness_thresholds(e, 1, None)).transpose()?;
    Ok(ScanReport {
        m: basis.m,
        degree: basis.degree,
        radius: basis.radius,
        jet_pass_rate: rate(jet_passed, jet_tests.len() + degenerate_points.len()),
        point_pass_rate: rate(point_tests.iter().filter(|t| t.passes).count(), point_tests.len()),
        min_jet_ratio: jet_tests.iter().map(|t| t.ratio).fold(f64::INFINITY, f64::min),
        min_point_ratio: point_tests.iter().map(|t| t.ratio).fold(f64::INFINITY, f64::min),
        predicted_very_ample: prediction.map(|t| basis.m >= t.main),
        prediction,
        jet_tests,
        point_tests,
        degenerate_points,
        note: SCAN_NOTE,
    })
}

/// Sample `n` points and `n` pairs of the domain interior and scan them.
#[allow(clippy::too_many_arguments)]
pub fn very_ampleness_scan<R: Rng>(
    group: &FuchsianGroup,
    domain: &FundamentalDomain,
    m: u32,
    degree: usize,
    r: f64,
    n: usize,
    epsilon: Option<f64>,
    rng: &mut R,
) -> Result<ScanReport> {
    let margin = 1e-3;
    let points = domain.sample_points(rng, n, margin);
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let s = domain.sample_points(rng, 2, margin);
        if distance(s[0], s[1]) > 10.0 * EQUIVALENCE_DISTANCE {
            pairs.push((s[0], s[1]));
        }
    }
    let mut all: Vec<DiscPoint> = points.clone();
    all.extend(pairs.iter().flat_map(|&(a, b)| [a, b]));
    let basis = build_basis(group, domain.center, m, degree, r, domain.circumradius(), &all)?;
    scan_with(&basis, &points, &pairs, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{dirichlet_domain, preset_genus2_octagon};
    use crate::series::{poincare_eval_with_derivative, Seed};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(re: f64, im: f64) -> DiscPoint {
        DiscPoint::from_re_im(re, im).unwrap()
    }

    fn octagon_basis(m: u32, degree: usize, r: f64) -> SectionBasis {
        build_basis(&preset_genus2_octagon(), DiscPoint::origin(), m, degree, r, 4.5, &[]).unwrap()
    }

    #[test]
    fn trivial_group_gives_monomials() {
        let b = build_basis(
            &FuchsianGroup::trivial(),
            DiscPoint::origin(),
            3,
            4,
            5.0,
            3.0,
            &[p(0.3, 0.1)],
        )
        .unwrap();
        let z = p(0.3, 0.1);
        let jet = b.cached(z).unwrap();
        for k in 0..=4 {
            assert!((jet.values[k] - z.z().powi(k as i32)).norm() < 1e-15);
            let dk = if k == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                k as f64 * z.z().powi(k as i32 - 1)
            };
            assert!((jet.derivatives[k] - dk).norm() < 1e-14);
        }
        assert!(jet_separation_test(&b, z).unwrap().passes);
        assert!(point_separation_test(&b, z, p(-0.2, 0.4)).unwrap().passes);
    }

    #[test]
    fn sections_match_series_module() {
        let b = octagon_basis(4, 3, 6.0);
        let z = p(0.2, -0.35);
        let jet = b.evaluate(z).unwrap();
        for k in 0..=3 {
            let (v, d) = poincare_eval_with_derivative(&b.ball, &Seed::monomial(k), 4, z, 6.0).unwrap();
            assert!((jet.values[k] - v.value).norm() < 1e-12 * (1.0 + v.value.norm()));
            assert!((jet.derivatives[k] - d).norm() < 1e-11 * (1.0 + d.norm()));
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let b = octagon_basis(4, 6, 7.0);
        // the truncation set is constant near z, so the truncated sections are smooth there
        let z = p(0.15, 0.25);
        let h = 1e-5;
        let jet = b.evaluate(z).unwrap();
        let plus = b.evaluate(DiscPoint::new(z.z() + h).unwrap()).unwrap();
        let minus = b.evaluate(DiscPoint::new(z.z() - h).unwrap()).unwrap();
        for k in 0..=6 {
            let fd = (plus.values[k] - minus.values[k]) / (2.0 * h);
            let scale = 1.0 + jet.derivatives[k].norm();
            assert!((fd - jet.derivatives[k]).norm() < 1e-6 * scale, "k = {k}");
        }
    }

    #[test]
    fn jet_test_is_invariant_under_the_group() {
        let g = preset_genus2_octagon();
        let b = octagon_basis(4, 6, 7.0);
        let x = p(0.1, 0.2);
        let gx = DiscPoint::new(g.letter(1).act(x.z())).unwrap();
        let (a, c) = (
            jet_separation_test(&b, x).unwrap(),
            jet_separation_test(&b, gx).unwrap(),
        );
        assert_eq!(a.passes, c.passes);
        // automorphy mixes the rows by an invertible triangular matrix: the ratio moves by a bounded factor
        assert!((a.ratio.ln() - c.ratio.ln()).abs() < 5.0, "{} vs {}", a.ratio, c.ratio);
    }

    #[test]
    fn equivalent_points_have_equal_images() {
        let g = preset_genus2_octagon();
        let b = octagon_basis(4, 6, 7.0);
        let x = p(0.1, -0.3);
        let gx = DiscPoint::new(g.letter(2).act(x.z())).unwrap();
        assert!(projective_separation(&b, x, gx).unwrap() < 1e-6);
        assert!(matches!(
            point_separation_test(&b, x, gx),
            Err(Error::EquivalentPoints { .. })
        ));
        assert!(projective_separation(&b, x, p(0.3, 0.3)).unwrap() > 1e-4);
    }

    #[test]
    fn row_scaling_does_not_change_the_decision() {
        let a: Vec<Complex64> = (0..5).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let b: Vec<Complex64> = (0..5).map(|k| Complex64::new(1.0, -(k as f64))).collect();
        let s = Complex64::new(3e5, -2e5);
        let scaled: Vec<Complex64> = a.iter().map(|v| v * s).collect();
        let (h1, l1) = two_row_singular_values(&a, &b);
        let (h2, l2) = two_row_singular_values(&scaled, &b);
        assert!((l1 / h1 - l2 / h2).abs() < 1e-12);
        let (_, l) = two_row_singular_values(&a, &scaled);
        assert!(l < 1e-12);
    }

    #[test]
    fn gram_rank_is_at_most_the_basis_size() {
        let samples: Vec<DiscPoint> = (0..30)
            .map(|i| DiscPoint::polar(0.6 * (i as f64 / 30.0), 1.3 * i as f64).unwrap())
            .collect();
        let b = build_basis(&preset_genus2_octagon(), DiscPoint::origin(), 4, 3, 6.0, 0.0, &samples).unwrap();
        let mat = DMatrix::from_fn(samples.len(), 4, |i, k| b.cache[i].values[k]);
        let s = mat.singular_values();
        let rank = s.iter().filter(|&&v| v > 1e-10 * s.max()).count();
        assert!(rank <= 4);
    }

    #[test]
    fn trivial_group_scan_passes() {
        let g = FuchsianGroup::trivial();
        let pts: Vec<DiscPoint> = (0..10)
            .map(|i| DiscPoint::polar(0.05 + 0.08 * i as f64, i as f64).unwrap())
            .collect();
        let pairs: Vec<(DiscPoint, DiscPoint)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        for m in [2, 3] {
            let b = build_basis(&g, DiscPoint::origin(), m, 1, 4.0, 0.0, &pts).unwrap();
            let r = scan_with(&b, &pts, &pairs, None).unwrap();
            assert_eq!((r.jet_pass_rate, r.point_pass_rate), (1.0, 1.0));
        }
    }

    #[test]
    fn more_seeds_never_lower_the_pass_rate() {
        let g = preset_genus2_octagon();
        let dom = dirichlet_domain(&g, DiscPoint::origin()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts = dom.sample_points(&mut rng, 8, 1e-3);
        let pairs: Vec<(DiscPoint, DiscPoint)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
        let mut last = (0.0, 0.0);
        for d in 1..=4 {
            let b = build_basis(&g, dom.center, 4, d, 6.0, dom.circumradius(), &pts).unwrap();
            let r = scan_with(&b, &pts, &pairs, None).unwrap();
            assert!(r.jet_pass_rate >= last.0 && r.point_pass_rate >= last.1);
            last = (r.jet_pass_rate, r.point_pass_rate);
        }
    }
}
