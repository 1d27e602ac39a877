//! Compensated (Neumaier) summation.
//!
//! Every series and quadrature in the crate is reduced through these
//! accumulators in a fixed order, so results do not depend on how rayon
//! schedules the work that produced the terms.

use num_complex::Complex64;

/// Kahan-Babuška-Neumaier accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Componentwise compensated sum of complex numbers.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: NeumaierSum,
    im: NeumaierSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl Extend<Complex64> for ComplexSum {
    fn extend<I: IntoIterator<Item = Complex64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

pub fn sum_f64<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierSum::new();
    acc.extend(values);
    acc.value()
}

pub fn sum_complex<I: IntoIterator<Item = Complex64>>(values: I) -> Complex64 {
    let mut acc = ComplexSum::new();
    acc.extend(values);
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_f64(values), 2.0);
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn complex_components_are_independent() {
        let v = [
            Complex64::new(1e16, 1.0),
            Complex64::new(1.0, -1e16),
            Complex64::new(-1e16, 1e16),
        ];
        assert_eq!(sum_complex(v), Complex64::new(1.0, 1.0));
    }
}
