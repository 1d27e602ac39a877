//! Fuchsian groups acting on the disc.

mod dirichlet;
mod enumerate;

pub use dirichlet::{
    dirichlet_domain, dirichlet_domain_with, tiling_check, DirichletOptions, FundamentalDomain, QuadNode, Side,
    TilingReport,
};
pub use enumerate::{enumerate_ball, enumerate_ball_with, orbit_count, BallEntry, EnumerationOptions, OrbitBall};

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{DiscPoint, Isometry};

/// A word in the generators: letter `k > 0` is generator `k` (1-based),
/// `-k` its inverse.
pub type Word = Vec<i8>;

/// A group element together with the reduced word that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupElement {
    pub iso: Isometry,
    pub word: Word,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement {
            iso: Isometry::IDENTITY,
            word: Vec::new(),
        }
    }

    pub fn inverse(&self) -> Self {
        GroupElement {
            iso: self.iso.inverse(),
            word: self.word.iter().rev().map(|&l| -l).collect(),
        }
    }
}

/// Tolerance for a relator to count as `±identity`.
pub const RELATOR_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuchsianGroup {
    pub name: String,
    pub generators: Vec<Isometry>,
    pub relators: Vec<Word>,
}

impl FuchsianGroup {
    pub fn new(name: impl Into<String>, generators: Vec<Isometry>, relators: Vec<Word>) -> Result<Self> {
        if generators.len() > i8::MAX as usize {
            return Err(Error::invalid("too many generators"));
        }
        for g in &generators {
            Isometry::new(g.alpha, g.beta)?;
        }
        let group = FuchsianGroup {
            name: name.into(),
            generators,
            relators,
        };
        for w in &group.relators {
            group.check_word(w)?;
        }
        Ok(group)
    }

    /// The trivial group `{id}`.
    pub fn trivial() -> Self {
        FuchsianGroup {
            name: "trivial".into(),
            generators: Vec::new(),
            relators: Vec::new(),
        }
    }

    fn check_word(&self, word: &[i8]) -> Result<()> {
        for &l in word {
            if l == 0 || l.unsigned_abs() as usize > self.generators.len() {
                return Err(Error::invalid(format!("letter {l} names no generator")));
            }
        }
        Ok(())
    }

    /// Generator for a signed letter.
    pub fn letter(&self, l: i8) -> Isometry {
        let g = self.generators[l.unsigned_abs() as usize - 1];
        if l > 0 {
            g
        } else {
            g.inverse()
        }
    }

    /// Generators and their inverses, as `(letter, isometry)` in the order
    /// `1, -1, 2, -2, …`.
    pub fn symmetric_generators(&self) -> Vec<(i8, Isometry)> {
        (1..=self.generators.len() as i8)
            .flat_map(|k| [(k, self.letter(k)), (-k, self.letter(-k))])
            .collect()
    }

    pub fn evaluate(&self, word: &[i8]) -> Result<Isometry> {
        self.check_word(word)?;
        Ok(word
            .iter()
            .fold(Isometry::IDENTITY, |acc, &l| acc.compose(&self.letter(l))))
    }

    /// PSU(1,1) distance of each relator from the identity.
    pub fn relator_residuals(&self) -> Vec<f64> {
        self.relators
            .iter()
            .map(|w| {
                self.evaluate(w)
                    .map(|g| g.psu_distance(&Isometry::IDENTITY))
                    .unwrap_or(f64::INFINITY)
            })
            .collect()
    }

    /// Largest generator displacement ρ(x, gx).
    pub fn max_generator_displacement(&self, x: DiscPoint) -> f64 {
        self.generators.iter().map(|g| g.displacement(x)).fold(0.0, f64::max)
    }

    pub fn min_generator_displacement(&self, x: DiscPoint) -> Option<f64> {
        self.generators.iter().map(|g| g.displacement(x)).min_by(f64::total_cmp)
    }
}

/// Displacement of the origin under each generator of the genus-2 preset,
/// `2·arccosh(1 + √2)`: twice the inradius of the regular octagon with
/// interior angles π/4.
pub fn octagon_translation_length() -> f64 {
    2.0 * (1.0 + 2f64.sqrt()).acosh()
}

/// The genus-2 surface group of the regular hyperbolic octagon.
///
/// Generator `k` (k = 1..4) is the translation of length
/// [`octagon_translation_length`] in direction `(k − 1)π/4`; its inverse is
/// the translation in direction `(k + 3)π/4`. Together the eight elements pair
/// opposite sides of the octagon, and the single relator is
/// `g₁ g₂⁻¹ g₃ g₄⁻¹ g₁⁻¹ g₂ g₃⁻¹ g₄`.
pub fn preset_genus2_octagon() -> FuchsianGroup {
    let d = octagon_translation_length();
    let generators = (0..4).map(|k| Isometry::translation(d, k as f64 * PI / 4.0)).collect();
    FuchsianGroup {
        name: "genus2-octagon".into(),
        generators,
        relators: vec![vec![1, -2, 3, -4, -1, 2, -3, 4]],
    }
}

/// Look up a preset by name.
pub fn preset(name: &str) -> Option<FuchsianGroup> {
    match name {
        "genus2" | "genus2-octagon" | "octagon" => Some(preset_genus2_octagon()),
        "trivial" => Some(FuchsianGroup::trivial()),
        _ => None,
    }
}
