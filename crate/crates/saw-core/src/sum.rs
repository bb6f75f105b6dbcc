//! Compensated accumulators for long weighted sums.
//!
//! Walk enumeration adds up to billions of tiny signed terms; plain f64
//! accumulation loses digits long before the verification tolerances bite.
//! Kahan compensation keeps the error independent of the term count.

use num_complex::Complex64;

/// Kahan compensated sum of f64 terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64, // running compensation for lost low-order bits
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let y = value - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Componentwise Kahan sum of complex terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_cancelled_tail() {
        // 1e-16 added 10_000 times on top of 1.0 vanishes in plain f64.
        let mut k = Kahan::new();
        let mut naive = 1.0f64;
        k.add(1.0);
        for _ in 0..10_000 {
            k.add(1e-16);
            naive += 1e-16;
        }
        k.add(-1.0);
        naive += -1.0;
        assert_eq!(naive, 0.0);
        assert!((k.value() - 1e-12).abs() < 1e-15);
    }

    #[test]
    fn complex_components_independent() {
        let mut k = KahanComplex::new();
        k.add(Complex64::new(1.0, -2.0));
        k.add(Complex64::new(0.5, 0.25));
        let v = k.value();
        assert_eq!(v.re, 1.5);
        assert_eq!(v.im, -1.75);
    }
}
