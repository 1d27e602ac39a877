use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Highest polynomial degree accepted for seeds and approximations.
pub const MAX_DEGREE: usize = 2000;

/// Rational seeds must keep their poles at least this far from the origin.
pub const MIN_POLE_MODULUS: f64 = 1.05;

/// Nodes on the unit circle used for sup-norm sampling.
const SUP_SAMPLES: usize = 4096;

type Callable = Arc<dyn Fn(Complex64) -> (Complex64, Complex64) + Send + Sync>;

/// A bounded holomorphic function given by a value-and-derivative callable
/// together with an upper bound for its modulus on the disc.
#[derive(Clone)]
pub struct CustomSeed {
    pub label: String,
    pub sup_bound: f64,
    eval: Callable,
}

impl CustomSeed {
    pub fn new<F>(label: impl Into<String>, sup_bound: f64, eval: F) -> Self
    where
        F: Fn(Complex64) -> (Complex64, Complex64) + Send + Sync + 'static,
    {
        CustomSeed {
            label: label.into(),
            sup_bound,
            eval: Arc::new(eval),
        }
    }
}

impl fmt::Debug for CustomSeed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomSeed")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .finish()
    }
}

/// The function `f` whose Poincaré series is formed.
///
/// Coefficient lists run from the constant term upward.
#[derive(Debug, Clone)]
pub enum Seed {
    Polynomial(Vec<Complex64>),
    Rational { num: Vec<Complex64>, den: Vec<Complex64> },
    Custom(CustomSeed),
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Value and derivative of a polynomial.
fn horner2(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    c.iter().rev().fold((zero, zero), |(p, dp), &a| (p * z + a, dp * z + p))
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.len() > 1 && c.last().is_some_and(|a| *a == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        c.push(Complex64::new(0.0, 0.0));
    }
    c
}

fn circle(n: usize, r: f64) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
}

impl Seed {
    pub fn constant(c: f64) -> Self {
        Seed::Polynomial(vec![Complex64::new(c, 0.0)])
    }

    /// The monomial `z^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Seed::Polynomial(c)
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        let s = Seed::Polynomial(trim(coeffs));
        s.validate()?;
        Ok(s)
    }

    pub fn rational(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let s = Seed::Rational {
            num: trim(num),
            den: trim(den),
        };
        s.validate()?;
        Ok(s)
    }

    /// Check degree limits, finiteness and, for rational seeds, that the
    /// denominator has no zero in `|z| ≤ 1.05`. Zeros are counted by the
    /// winding number of the denominator along that circle.
    pub fn validate(&self) -> Result<()> {
        let finite = |c: &[Complex64]| c.iter().all(|a| a.re.is_finite() && a.im.is_finite());
        match self {
            Seed::Polynomial(c) => {
                if c.len() > MAX_DEGREE + 1 {
                    return Err(Error::invalid(format!("degree above {MAX_DEGREE}")));
                }
                if !finite(c) {
                    return Err(Error::invalid("non-finite coefficient"));
                }
            }
            Seed::Rational { num, den } => {
                if num.len().max(den.len()) > MAX_DEGREE + 1 {
                    return Err(Error::invalid(format!("degree above {MAX_DEGREE}")));
                }
                if !finite(num) || !finite(den) {
                    return Err(Error::invalid("non-finite coefficient"));
                }
                let n = 64 * den.len().max(8);
                let values: Vec<Complex64> = circle(n, MIN_POLE_MODULUS).map(|z| horner(den, z)).collect();
                let scale = den.iter().map(|a| a.norm()).sum::<f64>();
                let smallest = values.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min);
                if !(smallest > 1e-12 * scale) {
                    return Err(Error::UnboundedSeed(format!(
                        "denominator vanishes near |z| = {MIN_POLE_MODULUS}"
                    )));
                }
                let mut winding = 0.0;
                for i in 0..n {
                    winding += (values[(i + 1) % n] / values[i]).arg();
                }
                let zeros = (winding / (2.0 * PI)).round() as i64;
                if zeros != 0 {
                    return Err(Error::UnboundedSeed(format!(
                        "denominator has {zeros} zero(s) with modulus below {MIN_POLE_MODULUS}"
                    )));
                }
            }
            Seed::Custom(c) => {
                if !(c.sup_bound.is_finite() && c.sup_bound >= 0.0) {
                    return Err(Error::UnboundedSeed(format!(
                        "custom seed {} has no finite sup bound",
                        c.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Seed::Polynomial(c) => horner(c, z),
            Seed::Rational { num, den } => horner(num, z) / horner(den, z),
            Seed::Custom(c) => (c.eval)(z).0,
        }
    }

    /// `(f(z), f′(z))`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        match self {
            Seed::Polynomial(c) => horner2(c, z),
            Seed::Rational { num, den } => {
                let (p, dp) = horner2(num, z);
                let (q, dq) = horner2(den, z);
                (p / q, (dp * q - p * dq) / (q * q))
            }
            Seed::Custom(c) => (c.eval)(z),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        matches!(self, Seed::Polynomial(_))
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Seed::Polynomial(c) => Some(c.len() - 1),
            _ => None,
        }
    }

    /// An upper bound for `sup |f|` on the disc. Polynomials use the sum of
    /// coefficient moduli, which is exact for nonnegative coefficients;
    /// rational seeds use the maximum over a fine sampling of the unit circle
    /// (maximum modulus principle) inflated for the sampling gap.
    pub fn sup_bound(&self) -> f64 {
        match self {
            Seed::Polynomial(c) => c.iter().map(|a| a.norm()).sum(),
            Seed::Rational { .. } => self.sampled_sup() * (1.0 + 1e-3),
            Seed::Custom(c) => c.sup_bound,
        }
    }

    /// `max |f|` over equispaced points of the unit circle.
    pub fn sampled_sup(&self) -> f64 {
        circle(SUP_SAMPLES, 1.0)
            .map(|z| self.eval(z).norm())
            .fold(0.0, f64::max)
    }

    /// The dilation `f^t(z) = f(tz)`.
    pub fn dilate(&self, t: f64) -> Seed {
        let scale = |c: &[Complex64]| -> Vec<Complex64> {
            let mut p = 1.0;
            c.iter()
                .map(|&a| {
                    let v = a * p;
                    p *= t;
                    v
                })
                .collect()
        };
        match self {
            Seed::Polynomial(c) => Seed::Polynomial(scale(c)),
            Seed::Rational { num, den } => Seed::Rational {
                num: scale(num),
                den: scale(den),
            },
            Seed::Custom(c) => {
                let inner = c.eval.clone();
                Seed::Custom(CustomSeed {
                    label: format!("{}(t = {t})", c.label),
                    sup_bound: c.sup_bound,
                    eval: Arc::new(move |z| {
                        let (v, d) = inner(z * t);
                        (v, d * t)
                    }),
                })
            }
        }
    }

    /// Taylor coefficients at the origin of degree `0..=n`.
    ///
    /// Rational seeds use power-series division; custom seeds use the
    /// trapezoid rule for the Cauchy integral on the circle of radius 0.9.
    pub fn taylor(&self, n: usize) -> Vec<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Seed::Polynomial(c) => {
                let mut out = c.clone();
                out.resize(n + 1, zero);
                out
            }
            Seed::Rational { num, den } => {
                let mut out = vec![zero; n + 1];
                for k in 0..=n {
                    let mut acc = num.get(k).copied().unwrap_or(zero);
                    for j in 1..den.len().min(k + 1) {
                        acc -= den[j] * out[k - j];
                    }
                    out[k] = acc / den[0];
                }
                out
            }
            Seed::Custom(_) => {
                let r = 0.9;
                let m = (4 * (n + 1)).max(64);
                let samples: Vec<Complex64> = circle(m, r).map(|z| self.eval(z)).collect();
                (0..=n)
                    .map(|k| {
                        let mut acc = zero;
                        for (i, v) in samples.iter().enumerate() {
                            let th = -2.0 * PI * (k * i % m) as f64 / m as f64;
                            acc += v * Complex64::from_polar(1.0, th);
                        }
                        acc / (m as f64 * r.powi(k as i32))
                    })
                    .collect()
            }
        }
    }

    /// Pointwise square `f²`.
    pub fn square(&self) -> Seed {
        fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
            let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            out
        }
        match self {
            Seed::Polynomial(c) => Seed::Polynomial(mul(c, c)),
            Seed::Rational { num, den } => Seed::Rational {
                num: mul(num, num),
                den: mul(den, den),
            },
            Seed::Custom(c) => {
                let inner = c.eval.clone();
                Seed::Custom(CustomSeed {
                    label: format!("({})^2", c.label),
                    sup_bound: c.sup_bound * c.sup_bound,
                    eval: Arc::new(move |z| {
                        let (v, d) = inner(z);
                        (v * v, 2.0 * v * d)
                    }),
                })
            }
        }
    }

    /// `self − other` as a callable seed.
    pub fn minus(&self, other: &Seed) -> Seed {
        if let (Seed::Polynomial(a), Seed::Polynomial(b)) = (self, other) {
            let n = a.len().max(b.len());
            let zero = Complex64::new(0.0, 0.0);
            let c = (0..n)
                .map(|k| a.get(k).copied().unwrap_or(zero) - b.get(k).copied().unwrap_or(zero))
                .collect();
            return Seed::Polynomial(trim(c));
        }
        let (a, b) = (self.clone(), other.clone());
        let sup = self.sup_bound() + other.sup_bound();
        Seed::Custom(CustomSeed::new(format!("({a}) - ({b})"), sup, move |z| {
            let (u, du) = a.eval_with_derivative(z);
            let (v, dv) = b.eval_with_derivative(z);
            (u - v, du - dv)
        }))
    }
}

fn fmt_coeffs(c: &[Complex64], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, a) in c.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        if a.im == 0.0 {
            write!(f, "{}", a.re)?;
        } else {
            write!(f, "{}", a)?;
        }
    }
    Ok(())
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Seed::Polynomial(c) => {
                f.write_str("poly ")?;
                fmt_coeffs(c, f)
            }
            Seed::Rational { num, den } => {
                f.write_str("rational ")?;
                fmt_coeffs(num, f)?;
                f.write_str(" / ")?;
                fmt_coeffs(den, f)
            }
            Seed::Custom(c) => write!(f, "custom {}", c.label),
        }
    }
}

fn parse_coeffs(s: &str) -> Result<Vec<Complex64>> {
    let c: Vec<Complex64> = s
        .split_whitespace()
        .map(|t| Complex64::from_str(t).map_err(|_| Error::invalid(format!("bad coefficient `{t}`"))))
        .collect::<Result<_>>()?;
    if c.is_empty() {
        return Err(Error::invalid("empty coefficient list"));
    }
    Ok(c)
}

impl FromStr for Seed {
    type Err = Error;

    /// `poly c0 c1 …` or `rational n0 n1 … / d0 d1 …`, coefficients low to
    /// high, each a real or complex literal such as `0.5` or `1+2i`.
    fn from_str(s: &str) -> Result<Seed> {
        let s = s.trim();
        let (kind, rest) = s.split_once(char::is_whitespace).unwrap_or((s, ""));
        match kind {
            "poly" => Seed::polynomial(parse_coeffs(rest)?),
            "rational" => {
                let (num, den) = rest
                    .split_once('/')
                    .ok_or_else(|| Error::invalid("rational seed needs `num / den`"))?;
                Seed::rational(parse_coeffs(num)?, parse_coeffs(den)?)
            }
            _ => Err(Error::invalid(format!(
                "unknown seed kind `{kind}` (expected poly or rational)"
            ))),
        }
    }
}
