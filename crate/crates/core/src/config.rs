//! Plain-text `key = value` configuration.
//!
//! A group file holds `name = …`, one `generator.k = re(α) im(α) re(β) im(β)`
//! line per generator (k = 1, 2, … without gaps) and any number of
//! `relator = …` lines, where a word is a list of signed generator indices
//! such as `1 -2 3 -4`. Experiment files accept the same group keys plus the
//! experiment keys listed on [`ExperimentConfig`]. `#` starts a comment.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Isometry;
use crate::group::{preset, FuchsianGroup, Word};
use crate::series::Seed;

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Split text into entries, dropping blank lines and comments.
pub fn parse_key_values(text: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| parse_error(line, format!("expected `key = value`, found `{body}`")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(parse_error(line, "empty key"));
        }
        out.push(Entry {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Signed generator indices separated by spaces or commas; `id` or an empty
/// string is the empty word.
pub fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() || s == "id" {
        return Ok(Vec::new());
    }
    s.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<i8>() {
            Ok(0) | Err(_) => Err(Error::invalid(format!(
                "bad letter `{t}` (expected a nonzero signed index)"
            ))),
            Ok(l) => Ok(l),
        })
        .collect()
}

pub fn format_word(w: &[i8]) -> String {
    if w.is_empty() {
        return "id".into();
    }
    w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_f64(line: usize, key: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("{key}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("{key}: value must be finite")));
    }
    Ok(v)
}

fn parse_positive(line: usize, key: &str, s: &str) -> Result<f64> {
    let v = parse_f64(line, key, s)?;
    if v <= 0.0 {
        return Err(parse_error(line, format!("{key}: value must be positive")));
    }
    Ok(v)
}

fn parse_count<T: FromStr + PartialOrd + Default>(line: usize, key: &str, s: &str) -> Result<T> {
    let v: T = s
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("{key}: `{s}` is not a positive integer")))?;
    if v <= T::default() {
        return Err(parse_error(line, format!("{key}: value must be positive")));
    }
    Ok(v)
}

/// Collects the group keys of a file in order of appearance.
#[derive(Default)]
struct GroupKeys {
    name: Option<String>,
    generators: BTreeMap<usize, (usize, Isometry)>,
    relators: Vec<(usize, Word)>,
    first_line: Option<usize>,
}

impl GroupKeys {
    /// Consume `e` if it is a group key.
    fn accept(&mut self, e: &Entry) -> Result<bool> {
        let line = e.line;
        if e.key == "name" {
            self.name = Some(e.value.clone());
        } else if let Some(k) = e.key.strip_prefix("generator.") {
            let k: usize = k
                .parse()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| parse_error(line, format!("bad generator index in `{}`", e.key)))?;
            let nums: Vec<f64> = e
                .value
                .split_whitespace()
                .map(|t| parse_f64(line, &e.key, t))
                .collect::<Result<_>>()?;
            if nums.len() != 4 {
                return Err(parse_error(
                    line,
                    format!("{}: expected re(α) im(α) re(β) im(β)", e.key),
                ));
            }
            let g = Isometry::new(Complex64::new(nums[0], nums[1]), Complex64::new(nums[2], nums[3]))
                .map_err(|err| parse_error(line, format!("{}: {err}", e.key)))?;
            if self.generators.insert(k, (line, g)).is_some() {
                return Err(parse_error(line, format!("duplicate {}", e.key)));
            }
        } else if e.key == "relator" {
            let w = parse_word(&e.value).map_err(|err| parse_error(line, err.to_string()))?;
            self.relators.push((line, w));
        } else {
            return Ok(false);
        }
        self.first_line.get_or_insert(line);
        Ok(true)
    }

    fn is_empty(&self) -> bool {
        self.first_line.is_none()
    }

    fn build(self) -> Result<FuchsianGroup> {
        let line = self.first_line.unwrap_or(1);
        let mut generators = Vec::with_capacity(self.generators.len());
        for (i, (k, (gl, g))) in self.generators.into_iter().enumerate() {
            if k != i + 1 {
                return Err(parse_error(
                    gl,
                    format!("generator.{k} given but generator.{} missing", i + 1),
                ));
            }
            generators.push(g);
        }
        if generators.len() > i8::MAX as usize {
            return Err(parse_error(line, "too many generators"));
        }
        for (rl, w) in &self.relators {
            if let Some(l) = w.iter().find(|l| l.unsigned_abs() as usize > generators.len()) {
                return Err(parse_error(*rl, format!("letter {l} names no generator")));
            }
        }
        let name = self.name.unwrap_or_else(|| "custom".into());
        FuchsianGroup::new(name, generators, self.relators.into_iter().map(|r| r.1).collect())
            .map_err(|err| parse_error(line, err.to_string()))
    }
}

/// Parse a group file.
pub fn parse_group_config(text: &str) -> Result<FuchsianGroup> {
    let mut keys = GroupKeys::default();
    for e in parse_key_values(text)? {
        if !keys.accept(&e)? {
            return Err(parse_error(e.line, format!("unknown group key `{}`", e.key)));
        }
    }
    keys.build()
}

/// The group file for `g`; [`parse_group_config`] reads it back exactly.
pub fn group_to_config(g: &FuchsianGroup) -> String {
    let mut s = format!("name = {}\n", g.name);
    for (k, h) in g.generators.iter().enumerate() {
        s += &format!(
            "generator.{} = {:?} {:?} {:?} {:?}\n",
            k + 1,
            h.alpha.re,
            h.alpha.im,
            h.beta.re,
            h.beta.im
        );
    }
    for w in &g.relators {
        s += &format!("relator = {}\n", format_word(w));
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupSource {
    Preset(String),
    File(PathBuf),
    Inline(FuchsianGroup),
}

impl GroupSource {
    pub fn resolve(&self) -> Result<FuchsianGroup> {
        match self {
            GroupSource::Preset(name) => preset(name).ok_or_else(|| Error::invalid(format!("unknown preset `{name}`"))),
            GroupSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
                parse_group_config(&text)
            }
            GroupSource::Inline(g) => Ok(g.clone()),
        }
    }
}

/// Experiment settings; every field is optional so that command-line flags
/// and per-command defaults can fill the gaps.
///
/// Keys: `group` (preset name), `group_file`, the inline group keys, `m`,
/// `seed` (or `f`), `radius` (or `R`), `radii`, `grid_radial`,
/// `grid_angular`, `samples`, `degree`, `epsilon`, `n`, `C`, `x`, `r`,
/// `rng_seed`, `slack`, `fd_step`, `factors`, `delta`, `spacing`, `output`,
/// `csv`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub group: Option<GroupSource>,
    pub m: Option<u32>,
    pub seed: Option<String>,
    pub radius: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub grid_radial: Option<usize>,
    pub grid_angular: Option<usize>,
    pub samples: Option<usize>,
    pub degree: Option<usize>,
    pub epsilon: Option<f64>,
    pub n: Option<u32>,
    pub c: Option<f64>,
    pub x: Option<Complex64>,
    /// Counting or cut-off radius `r`.
    pub r: Option<f64>,
    pub rng_seed: Option<u64>,
    pub slack: Option<f64>,
    pub fd_step: Option<f64>,
    pub factors: Option<Vec<f64>>,
    /// Approximation target.
    pub delta: Option<f64>,
    /// Quadrature grid spacing over the fundamental domain.
    pub spacing: Option<f64>,
    pub output: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

fn parse_list(line: usize, key: &str, s: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_positive(line, key, t))
        .collect::<Result<_>>()?;
    if v.is_empty() {
        return Err(parse_error(line, format!("{key}: empty list")));
    }
    Ok(v)
}

pub fn parse_point(s: &str) -> Result<Complex64> {
    let z = Complex64::from_str(s.trim()).map_err(|_| Error::invalid(format!("`{s}` is not a complex number")))?;
    if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 {
        return Err(Error::invalid(format!("`{s}` is not a point of the unit disc")));
    }
    Ok(z)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        let mut keys = GroupKeys::default();
        let mut source_line = None;
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();
        for e in parse_key_values(text)? {
            if keys.accept(&e)? {
                continue;
            }
            let (line, key, v) = (e.line, e.key.as_str(), e.value.as_str());
            let canonical = match key {
                "f" => "seed",
                "R" => "radius",
                "C" => "c",
                k => k,
            };
            if let Some(prev) = seen.insert(canonical.to_string(), line) {
                return Err(parse_error(line, format!("`{key}` already set on line {prev}")));
            }
            match canonical {
                "group" => {
                    cfg.group = Some(GroupSource::Preset(v.to_string()));
                    source_line = Some(line);
                }
                "group_file" => {
                    cfg.group = Some(GroupSource::File(PathBuf::from(v)));
                    source_line = Some(line);
                }
                "m" => {
                    let m: u32 = parse_count(line, key, v)?;
                    if m < 2 {
                        return Err(parse_error(line, "m must be at least 2"));
                    }
                    cfg.m = Some(m);
                }
                "seed" => {
                    Seed::from_str(v).map_err(|err| parse_error(line, err.to_string()))?;
                    cfg.seed = Some(v.to_string());
                }
                "radius" => cfg.radius = Some(parse_positive(line, key, v)?),
                "radii" => cfg.radii = Some(parse_list(line, key, v)?),
                "grid_radial" => cfg.grid_radial = Some(parse_count(line, key, v)?),
                "grid_angular" => cfg.grid_angular = Some(parse_count(line, key, v)?),
                "samples" => cfg.samples = Some(parse_count(line, key, v)?),
                "degree" => cfg.degree = Some(parse_count(line, key, v)?),
                "epsilon" => cfg.epsilon = Some(parse_positive(line, key, v)?),
                "n" => cfg.n = Some(parse_count(line, key, v)?),
                "c" => cfg.c = Some(parse_positive(line, key, v)?),
                "x" => cfg.x = Some(parse_point(v).map_err(|err| parse_error(line, err.to_string()))?),
                "r" => cfg.r = Some(parse_positive(line, key, v)?),
                "rng_seed" => {
                    cfg.rng_seed = Some(
                        v.parse()
                            .map_err(|_| parse_error(line, format!("rng_seed: `{v}` is not an unsigned integer")))?,
                    )
                }
                "slack" => cfg.slack = Some(parse_positive(line, key, v)?),
                "fd_step" => cfg.fd_step = Some(parse_positive(line, key, v)?),
                "factors" => cfg.factors = Some(parse_list(line, key, v)?),
                "delta" => cfg.delta = Some(parse_positive(line, key, v)?),
                "spacing" => cfg.spacing = Some(parse_positive(line, key, v)?),
                "output" => cfg.output = Some(PathBuf::from(v)),
                "csv" => cfg.csv = Some(PathBuf::from(v)),
                _ => return Err(parse_error(line, format!("unknown key `{key}`"))),
            }
        }
        if !keys.is_empty() {
            if let Some(l) = source_line {
                return Err(parse_error(l, "group given both by name/file and inline"));
            }
            cfg.group = Some(GroupSource::Inline(keys.build()?));
        }
        Ok(cfg)
    }

    /// Fields set in `other` replace those of `self`.
    pub fn overridden_by(mut self, other: ExperimentConfig) -> ExperimentConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            group,
            m,
            seed,
            radius,
            radii,
            grid_radial,
            grid_angular,
            samples,
            degree,
            epsilon,
            n,
            c,
            x,
            r,
            rng_seed,
            slack,
            fd_step,
            factors,
            delta,
            spacing,
            output,
            csv
        );
        self
    }
}
