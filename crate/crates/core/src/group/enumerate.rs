use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{FuchsianGroup, GroupElement, Word};
use crate::error::{Error, Result};
use crate::geometry::{distance, raw_distance, DiscPoint, Isometry};

#[derive(Debug, Clone)]
pub struct EnumerationOptions {
    /// Maximum number of stored elements during the search.
    pub budget: usize,
    /// Two matrices closer than this in PSU(1,1) max-norm, relative to
    /// `max(1, |α|²)`, are the same element.
    pub dedup_tolerance: f64,
    /// Extra search radius beyond the target. `None` uses the largest
    /// generator displacement of the origin.
    pub prune_slack: Option<f64>,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            budget: 5_000_000,
            dedup_tolerance: 1e-9,
            prune_slack: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BallEntry {
    pub element: GroupElement,
    /// ρ(x, γx) for the ball's base point x.
    pub displacement: f64,
}

/// All group elements moving the base point by at most `radius`,
/// sorted by displacement (ties broken by word).
#[derive(Debug, Clone, Serialize)]
pub struct OrbitBall {
    pub base: DiscPoint,
    pub radius: f64,
    pub entries: Vec<BallEntry>,
}

impl OrbitBall {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The ball of the trivial group.
    pub fn trivial(base: DiscPoint, radius: f64) -> Self {
        OrbitBall {
            base,
            radius,
            entries: vec![BallEntry {
                element: GroupElement::identity(),
                displacement: 0.0,
            }],
        }
    }

    /// Entries with displacement at most `r`, a prefix of `entries`.
    pub fn within(&self, r: f64) -> &[BallEntry] {
        let n = self.entries.partition_point(|e| e.displacement <= r);
        &self.entries[..n]
    }

    /// Fails unless every γ with ρ(x, γz) ≤ `r` is guaranteed to be present.
    pub fn require_cover(&self, z: DiscPoint, r: f64) -> Result<f64> {
        let need = r + distance(self.base, z);
        if need > self.radius + 1e-12 {
            return Err(Error::InsufficientBall {
                radius: self.radius,
                reason: format!("need {need} to cover radius {r} around the evaluation point"),
            });
        }
        Ok(need)
    }

    /// Number of orbit points γx with ρ(γx, z) < r.
    pub fn count_near(&self, z: DiscPoint, r: f64) -> Result<usize> {
        let need = self.require_cover(z, r)?;
        Ok(self
            .within(need)
            .iter()
            .filter(|e| raw_distance(e.element.iso.act(self.base.z()), z.z()) < r)
            .count())
    }

    /// Orbit points γx of all entries.
    pub fn orbit_points(&self) -> Vec<num_complex::Complex64> {
        self.entries.iter().map(|e| e.element.iso.act(self.base.z())).collect()
    }

    /// Smallest displacement of a non-identity element in the ball.
    pub fn min_nontrivial_displacement(&self) -> Option<f64> {
        self.entries.get(1).map(|e| e.displacement)
    }
}

struct Node {
    iso: Isometry,
    parent: u32,
    letter: i8,
}

type Key = [i64; 2];

/// Hash cell for the horizontal hyperboloid coordinates `2αβ` of the orbit
/// point γ(0). Distinct orbit points of a group with systole `s` are at
/// least `2·sinh(s/2)` apart in these coordinates, so unit cells with their
/// neighbors find every duplicate.
const CELL: f64 = 1.0;

fn primary_key(g: &Isometry) -> Key {
    let h = 2.0 * g.alpha * g.beta;
    [(h.re / CELL).floor() as i64, (h.im / CELL).floor() as i64]
}

fn candidate_keys(g: &Isometry, out: &mut Vec<Key>) {
    out.clear();
    let [a, b] = primary_key(g);
    for da in -1..=1 {
        for db in -1..=1 {
            out.push([a + da, b + db]);
        }
    }
}

/// Rounding drift of a product grows with the size of its entries, so
/// matrices are compared relative to `|α|²`.
fn same_element(a: &Isometry, b: &Isometry, tol: f64) -> bool {
    a.psu_distance(b) <= tol * a.alpha.norm_sqr().max(1.0)
}

/// Enumerate `{γ : ρ(x, γx) ≤ radius}` with default options.
pub fn enumerate_ball(group: &FuchsianGroup, x: DiscPoint, radius: f64) -> Result<OrbitBall> {
    enumerate_ball_with(group, x, radius, &EnumerationOptions::default())
}

/// Breadth-first search over reduced words, deduplicated in PSU(1,1).
///
/// The search runs about the origin `o` to radius `R + 2ρ(o, x)`, which
/// contains every γ with `ρ(x, γx) ≤ R` by the triangle inequality, and keeps
/// exploring through nodes up to `prune_slack` beyond that. The default slack
/// (largest generator displacement of `o`) dominates the covering radius of
/// the side-pairing tiling for groups generated by the side pairings of a
/// Dirichlet domain about `o`, such as the octagon preset, which makes the
/// pruned search exhaustive for them.
pub fn enumerate_ball_with(
    group: &FuchsianGroup,
    x: DiscPoint,
    radius: f64,
    opts: &EnumerationOptions,
) -> Result<OrbitBall> {
    if !(radius > 0.0) {
        return Err(Error::invalid("ball radius must be positive"));
    }
    if group.generators.is_empty() {
        return Ok(OrbitBall::trivial(x, radius));
    }
    let o = DiscPoint::origin();
    let reach = radius + 2.0 * distance(o, x);
    let slack = opts.prune_slack.unwrap_or_else(|| group.max_generator_displacement(o));
    let limit = reach + slack;
    let letters = group.symmetric_generators();
    let tol = opts.dedup_tolerance;

    let mut nodes = vec![Node {
        iso: Isometry::IDENTITY,
        parent: u32::MAX,
        letter: 0,
    }];
    let mut index: HashMap<Key, Vec<u32>> = HashMap::new();
    index.insert(primary_key(&Isometry::IDENTITY), vec![0]);
    let mut frontier: Vec<u32> = vec![0];
    let mut keys = Vec::with_capacity(32);

    while !frontier.is_empty() {
        let children: Vec<Vec<(u32, i8, Isometry)>> = frontier
            .par_iter()
            .map(|&p| {
                let node = &nodes[p as usize];
                letters
                    .iter()
                    .filter(|(l, _)| *l != -node.letter)
                    .filter_map(|(l, s)| {
                        let g = node.iso.compose(s);
                        (raw_distance(o.z(), g.act(o.z())) <= limit).then_some((p, *l, g))
                    })
                    .collect()
            })
            .collect();

        let mut next = Vec::new();
        for (parent, letter, g) in children.into_iter().flatten() {
            candidate_keys(&g, &mut keys);
            let seen = keys.iter().any(|k| {
                index
                    .get(k)
                    .is_some_and(|ids| ids.iter().any(|&i| same_element(&nodes[i as usize].iso, &g, tol)))
            });
            if seen {
                continue;
            }
            let id = nodes.len() as u32;
            if nodes.len() >= opts.budget {
                return Err(Error::BudgetExceeded { cap: opts.budget });
            }
            nodes.push(Node { iso: g, parent, letter });
            index.entry(primary_key(&g)).or_default().push(id);
            next.push(id);
        }
        frontier = next;
    }

    let word_of = |mut i: u32| -> Word {
        let mut w = Vec::new();
        while i != 0 {
            let n = &nodes[i as usize];
            w.push(n.letter);
            i = n.parent;
        }
        w.reverse();
        w
    };

    let mut entries: Vec<BallEntry> = nodes
        .par_iter()
        .enumerate()
        .filter_map(|(i, n)| {
            let d = if i == 0 { 0.0 } else { n.iso.displacement(x) };
            (d <= radius).then(|| BallEntry {
                element: GroupElement {
                    iso: n.iso,
                    word: word_of(i as u32),
                },
                displacement: d,
            })
        })
        .collect();
    entries.sort_by(|a, b| {
        a.displacement
            .total_cmp(&b.displacement)
            .then(a.element.word.len().cmp(&b.element.word.len()))
            .then_with(|| a.element.word.cmp(&b.element.word))
    });
    Ok(OrbitBall {
        base: x,
        radius,
        entries,
    })
}

/// `#{γx : ρ(γx, z) < r}`, from a ball of radius `ρ(x, z) + r`.
pub fn orbit_count(group: &FuchsianGroup, x: DiscPoint, z: DiscPoint, r: f64) -> Result<usize> {
    if !(r > 0.0) {
        return Err(Error::invalid("counting radius must be positive"));
    }
    let ball = enumerate_ball(group, x, distance(x, z) + r)?;
    ball.count_near(z, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{octagon_translation_length, preset_genus2_octagon};
    use num_complex::Complex64;

    fn octagon_ball(r: f64) -> OrbitBall {
        enumerate_ball(&preset_genus2_octagon(), DiscPoint::origin(), r).unwrap()
    }

    #[test]
    fn small_radius_gives_identity_only() {
        let ball = octagon_ball(octagon_translation_length() - 0.01);
        assert_eq!(ball.len(), 1);
        assert!(ball.entries[0].element.word.is_empty());
    }

    #[test]
    fn first_shell_is_the_eight_generators() {
        let ball = octagon_ball(octagon_translation_length() + 0.01);
        assert_eq!(ball.len(), 9);
        for e in &ball.entries[1..] {
            assert_eq!(e.element.word.len(), 1);
        }
    }

    #[test]
    fn ball_is_inverse_closed_and_deduplicated() {
        let ball = octagon_ball(6.0);
        for e in &ball.entries {
            assert!(e.displacement <= 6.0);
            let inv = e.element.iso.inverse();
            let hits = ball
                .entries
                .iter()
                .filter(|f| f.element.iso.psu_distance(&inv) <= 1e-9)
                .count();
            assert_eq!(hits, 1);
        }
        for (i, a) in ball.entries.iter().enumerate() {
            for b in &ball.entries[i + 1..] {
                assert!(a.element.iso.psu_distance(&b.element.iso) > 1e-9);
            }
        }
    }

    #[test]
    fn large_ball_matches_area_growth() {
        // Drift in long products must not defeat deduplication.
        let ball = octagon_ball(12.0);
        let expected = (12f64.cosh() - 1.0) / 2.0;
        let n = ball.len() as f64;
        assert!((n / expected - 1.0).abs() < 0.05, "{n} vs {expected}");
        let pts = ball.orbit_points();
        let mut min_sep = f64::INFINITY;
        for (i, p) in pts.iter().enumerate().take(200) {
            for q in &pts[i + 1..] {
                min_sep = min_sep.min(raw_distance(*p, *q));
            }
        }
        assert!(min_sep > octagon_translation_length() - 1e-6, "{min_sep}");
    }

    #[test]
    fn words_rebuild_matrices() {
        let g = preset_genus2_octagon();
        let ball = octagon_ball(7.0);
        for e in &ball.entries {
            let w = &e.element.word;
            assert!(w.windows(2).all(|p| p[0] != -p[1]), "unreduced {w:?}");
            let m = g.evaluate(w).unwrap();
            assert!(m.psu_distance(&e.element.iso) < 1e-9);
        }
    }

    #[test]
    fn wider_slack_finds_nothing_new() {
        let g = preset_genus2_octagon();
        for x in [DiscPoint::origin(), DiscPoint::from_re_im(0.4, 0.3).unwrap()] {
            let a = enumerate_ball(&g, x, 5.0).unwrap();
            let opts = EnumerationOptions {
                prune_slack: Some(7.0),
                ..Default::default()
            };
            let b = enumerate_ball_with(&g, x, 5.0, &opts).unwrap();
            assert_eq!(a.len(), b.len());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let opts = EnumerationOptions {
            budget: 100,
            ..Default::default()
        };
        let r = enumerate_ball_with(&preset_genus2_octagon(), DiscPoint::origin(), 8.0, &opts);
        assert_eq!(r.unwrap_err(), Error::BudgetExceeded { cap: 100 });
    }

    #[test]
    fn count_growth_is_exponential() {
        // N(R) ≈ (cosh R − 1)/2 for area 4π; consecutive ratios near e².
        let ball = octagon_ball(8.0);
        let n = |r: f64| ball.within(r).len() as f64;
        let (n4, n6, n8) = (n(4.0), n(6.0), n(8.0));
        let e2 = (2.0f64).exp();
        assert!(n6 / n4 > e2 / 2.0 && n6 / n4 < e2 * 2.0, "{n4} {n6}");
        assert!(n8 / n6 > e2 / 2.0 && n8 / n6 < e2 * 2.0, "{n6} {n8}");
    }

    #[test]
    fn orbit_counts() {
        let g = preset_genus2_octagon();
        let o = DiscPoint::origin();
        let d0 = octagon_translation_length();
        assert_eq!(orbit_count(&g, o, o, d0 - 0.1).unwrap(), 1);
        assert_eq!(orbit_count(&g, o, o, d0 + 1e-6).unwrap(), 9);
        let z = DiscPoint::from_re_im(0.35, -0.2).unwrap();
        let gz = DiscPoint::new(g.letter(2).act(z.z())).unwrap();
        for r in [0.5, 1.7, 2.9] {
            assert_eq!(orbit_count(&g, o, z, r).unwrap(), orbit_count(&g, o, gz, r).unwrap());
        }
        assert!(orbit_count(&g, o, z, 0.0).is_err());
    }

    #[test]
    fn trivial_group_ball() {
        let ball = enumerate_ball(&FuchsianGroup::trivial(), DiscPoint::origin(), 3.0).unwrap();
        assert_eq!(ball.len(), 1);
        assert_eq!(
            ball.count_near(DiscPoint::new(Complex64::new(0.1, 0.0)).unwrap(), 1.0)
                .unwrap(),
            1
        );
    }
}
