//! Second-order jets in one variable.
//!
//! A [`Jet2`] carries `(g(r), g'(r), g''(r))` and propagates them exactly
//! through arithmetic and elementary functions, so profile functions such as
//! `1 - A/r^4` and their derivatives never go through finite differences.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet2<T> {
    pub fn new(value: T, d1: T, d2: T) -> Self {
        Self { value, d1, d2 }
    }

    pub fn constant(value: T) -> Self {
        Self::new(value, T::zero(), T::zero())
    }

    /// The independent variable itself, seeded at `x`.
    pub fn variable(x: T) -> Self {
        Self::new(x, T::one(), T::zero())
    }

    /// A jet whose second derivative is unknown.
    ///
    /// `d2` is set to zero. Value and `d1` of any expression built from such
    /// jets stay exact because neither depends on the inputs' `d2`.
    pub fn first_order(value: T, d1: T) -> Self {
        Self::new(value, d1, T::zero())
    }

    /// The jet of `r ↦ g'(r)` truncated to first order.
    pub fn derivative(self) -> Self {
        Self::first_order(self.d1, self.d2)
    }

    /// Chain rule for an outer function with value `g0`, derivative `g1` and
    /// second derivative `g2` evaluated at `self.value`.
    #[inline]
    pub fn apply(self, g0: T, g1: T, g2: T) -> Self {
        Self::new(g0, g1 * self.d1, g2 * self.d1 * self.d1 + g1 * self.d2)
    }

    pub fn recip(self) -> Self {
        let inv = self.value.recip();
        let inv2 = inv * inv;
        self.apply(inv, -inv2, T::lit(2.0) * inv2 * inv)
    }

    pub fn sqrt(self) -> Self {
        let s = self.value.sqrt();
        let g1 = T::lit(0.5) / s;
        let g2 = -T::lit(0.25) / (s * self.value);
        self.apply(s, g1, g2)
    }

    pub fn powi(self, n: i32) -> Self {
        let x = self.value;
        let nf = T::from_i32(n).unwrap();
        let g0 = x.powi(n);
        let g1 = if n == 0 { T::zero() } else { nf * x.powi(n - 1) };
        let g2 = if n == 0 || n == 1 { T::zero() } else { nf * (nf - T::one()) * x.powi(n - 2) };
        self.apply(g0, g1, g2)
    }

    pub fn powf(self, p: T) -> Self {
        let x = self.value;
        let g0 = x.powf(p);
        let g1 = p * x.powf(p - T::one());
        let g2 = p * (p - T::one()) * x.powf(p - T::lit(2.0));
        self.apply(g0, g1, g2)
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.apply(e, e, e)
    }

    pub fn ln(self) -> Self {
        let x = self.value;
        self.apply(x.ln(), x.recip(), -(x * x).recip())
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.apply(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.apply(c, -s, -c)
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.value * k, self.d1 * k, self.d2 * k)
    }
}

impl<T: Real> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.value + o.value, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl<T: Real> AddAssign for Jet2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.value - o.value, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl<T: Real> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.value, -self.d1, -self.d2)
    }
}

impl<T: Real> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::lit(2.0);
        Self::new(
            self.value * o.value,
            self.d1 * o.value + self.value * o.d1,
            self.d2 * o.value + two * self.d1 * o.d1 + self.value * o.d2,
        )
    }
}

impl<T: Real> Div for Jet2<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.recip()
    }
}

impl<T: Real> Add<T> for Jet2<T> {
    type Output = Self;
    fn add(self, k: T) -> Self {
        Self::new(self.value + k, self.d1, self.d2)
    }
}

impl<T: Real> Sub<T> for Jet2<T> {
    type Output = Self;
    fn sub(self, k: T) -> Self {
        Self::new(self.value - k, self.d1, self.d2)
    }
}

impl<T: Real> Mul<T> for Jet2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}

impl<T: Real> Div<T> for Jet2<T> {
    type Output = Self;
    fn div(self, k: T) -> Self {
        self.scale(k.recip())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    // p(r) = 3r^3 - 2r + 5, q(r) = r^2 + 1
    fn p(r: f64) -> (f64, f64, f64) {
        (3.0 * r.powi(3) - 2.0 * r + 5.0, 9.0 * r * r - 2.0, 18.0 * r)
    }
    fn q(r: f64) -> (f64, f64, f64) {
        (r * r + 1.0, 2.0 * r, 2.0)
    }

    #[test]
    fn product_rule_matches_symbolic_polynomial() {
        let r: f64 = 1.7;
        let x = Jet2::variable(r);
        let pj = x.powi(3) * 3.0 - x * 2.0 + 5.0;
        let qj = x * x + 1.0;
        let prod = pj * qj;
        // (pq)(r) = 3r^5 + 3r^3 - 2r^3 + 5r^2 - 2r + 5 = 3r^5 + r^3 + 5r^2 - 2r + 5
        let v = 3.0 * r.powi(5) + r.powi(3) + 5.0 * r * r - 2.0 * r + 5.0;
        let d1 = 15.0 * r.powi(4) + 3.0 * r * r + 10.0 * r - 2.0;
        let d2 = 60.0 * r.powi(3) + 6.0 * r + 10.0;
        assert!(close(prod.value, v, 1e-14));
        assert!(close(prod.d1, d1, 1e-14));
        assert!(close(prod.d2, d2, 1e-14));
        let (p0, p1, p2) = p(r);
        let (q0, q1, q2) = q(r);
        assert!(close(prod.d2, p2 * q0 + 2.0 * p1 * q1 + p0 * q2, 1e-14));
    }

    #[test]
    fn quotient_and_sqrt() {
        let r: f64 = 2.3;
        let x = Jet2::variable(r);
        // W = 1 - 1/r^4, c = r sqrt(W)
        let w = Jet2::constant(1.0) - x.powi(-4);
        let c = x * w.sqrt();
        // c = sqrt(r^2 - r^-2)
        let g = r * r - r.powi(-2);
        let g1 = 2.0 * r + 2.0 * r.powi(-3);
        let g2 = 2.0 - 6.0 * r.powi(-4);
        let c0 = g.sqrt();
        let c1 = g1 / (2.0 * c0);
        let c2 = g2 / (2.0 * c0) - g1 * g1 / (4.0 * g * c0);
        assert!(close(c.value, c0, 1e-14));
        assert!(close(c.d1, c1, 1e-14));
        assert!(close(c.d2, c2, 1e-13));
    }

    #[test]
    fn first_order_jets_keep_d1_exact() {
        // (a' / a)' = a''/a - a'^2/a^2 with a = r^3
        let r: f64 = 1.3;
        let a = Jet2::variable(r).powi(3);
        let ratio = a.derivative() / Jet2::first_order(a.value, a.d1);
        let expect = 6.0 * r / r.powi(3) - (3.0 * r * r).powi(2) / r.powi(6);
        assert!(close(ratio.d1, expect, 1e-14));
    }

    proptest! {
        #[test]
        fn chain_rule_exp_sin(r in 0.1f64..3.0) {
            let x = Jet2::variable(r);
            let g = (x.sin() * 2.0).exp();
            let e = (2.0 * r.sin()).exp();
            let d1 = e * 2.0 * r.cos();
            let d2 = e * (4.0 * r.cos().powi(2) - 2.0 * r.sin());
            prop_assert!(close(g.value, e, 1e-13));
            prop_assert!(close(g.d1, d1, 1e-13));
            prop_assert!(close(g.d2, d2, 1e-12));
        }

        #[test]
        fn ln_and_powf_agree(r in 0.2f64..5.0, p in -3.0f64..3.0) {
            let x = Jet2::variable(r);
            let a = x.powf(p);
            let b = (x.ln() * p).exp();
            prop_assert!(close(a.value, b.value, 1e-12));
            prop_assert!(close(a.d1, b.d1, 1e-12));
            prop_assert!(close(a.d2, b.d2, 1e-11));
        }
    }
}
