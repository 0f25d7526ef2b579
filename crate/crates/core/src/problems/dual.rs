//! Forward-mode dual numbers carrying a full gradient.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::problem::Vector;

/// `value + <derivative, ε>` with one infinitesimal per input coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct DualNumber {
    pub value: f64,
    pub derivative: Vector,
}

impl DualNumber {
    pub fn constant(value: f64, dim: usize) -> Self {
        DualNumber { value, derivative: Vector::zeros(dim) }
    }

    /// The `k`-th input coordinate (0-based) with unit derivative.
    pub fn variable(value: f64, k: usize, dim: usize) -> Self {
        let mut derivative = Vector::zeros(dim);
        derivative[k] = 1.0;
        DualNumber { value, derivative }
    }

    fn chain(&self, value: f64, slope: f64) -> Self {
        DualNumber { value, derivative: &self.derivative * slope }
    }

    pub fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }

    pub fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e)
    }

    /// `self^p` for a constant exponent.
    pub fn powf(&self, p: f64) -> Self {
        if p == 0.0 {
            return DualNumber::constant(1.0, self.derivative.len());
        }
        let value = pow(self.value, p);
        let slope = if p == 1.0 { 1.0 } else { p * pow(self.value, p - 1.0) };
        self.chain(value, slope)
    }
}

/// `powi` for integral exponents keeps negative bases well defined.
pub(crate) fn pow(base: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        base.powi(p as i32)
    } else {
        base.powf(p)
    }
}

impl Add for DualNumber {
    type Output = DualNumber;
    fn add(self, rhs: DualNumber) -> DualNumber {
        DualNumber { value: self.value + rhs.value, derivative: self.derivative + rhs.derivative }
    }
}

impl Sub for DualNumber {
    type Output = DualNumber;
    fn sub(self, rhs: DualNumber) -> DualNumber {
        DualNumber { value: self.value - rhs.value, derivative: self.derivative - rhs.derivative }
    }
}

impl Mul for DualNumber {
    type Output = DualNumber;
    fn mul(self, rhs: DualNumber) -> DualNumber {
        let derivative = &rhs.derivative * self.value + &self.derivative * rhs.value;
        DualNumber { value: self.value * rhs.value, derivative }
    }
}

impl Div for DualNumber {
    type Output = DualNumber;
    fn div(self, rhs: DualNumber) -> DualNumber {
        let value = self.value / rhs.value;
        let derivative = (&self.derivative - &rhs.derivative * value) / rhs.value;
        DualNumber { value, derivative }
    }
}

impl Neg for DualNumber {
    type Output = DualNumber;
    fn neg(self) -> DualNumber {
        DualNumber { value: -self.value, derivative: -self.derivative }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let a = DualNumber::variable(2.0, 0, 2);
        let b = DualNumber::variable(3.0, 1, 2);
        let p = a * b;
        assert_eq!(p.value, 6.0);
        assert_eq!(p.derivative, Vector::from_vec(vec![3.0, 2.0]));
    }

    #[test]
    fn quotient_and_chain() {
        let x = DualNumber::variable(0.5, 0, 1);
        let q = x.clone().sin() / x.clone().exp();
        let expected = (0.5f64.cos() - 0.5f64.sin()) / 0.5f64.exp();
        assert!((q.derivative[0] - expected).abs() < 1e-15);
        let c = x.powf(3.0);
        assert!((c.value - 0.125).abs() < 1e-15 && (c.derivative[0] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn integer_power_of_negative_base() {
        let x = DualNumber::variable(-2.0, 0, 1).powf(3.0);
        assert_eq!(x.value, -8.0);
        assert_eq!(x.derivative[0], 12.0);
    }
}
