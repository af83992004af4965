//! Truncated Taylor arithmetic: order-1 and order-2 jets in up to
//! [`MAX_DIM`] variables.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::linalg::MAX_DIM;

/// Value and gradient of a scalar field at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    n: usize,
    value: f64,
    grad: [f64; MAX_DIM],
}

/// Value, gradient and Hessian of a scalar field at a point.
///
/// The Hessian is stored as a full matrix but only the upper triangle is
/// ever computed; every write mirrors into the lower triangle, so the stored
/// matrix is symmetric bitwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    n: usize,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet1 {
    pub fn constant(n: usize, value: f64) -> Self {
        debug_assert!(n <= MAX_DIM);
        Self { n, value, grad: [0.0; MAX_DIM] }
    }

    pub fn from_parts(value: f64, grad: &[f64]) -> Self {
        let mut g = [0.0; MAX_DIM];
        g[..grad.len()].copy_from_slice(grad);
        Self { n: grad.len(), value, grad: g }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.n]
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad().iter().all(|g| g.is_finite())
    }

    pub fn scale(self, c: f64) -> Self {
        let mut out = self;
        out.value *= c;
        for g in &mut out.grad[..self.n] {
            *g *= c;
        }
        out
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..self.n {
            out.grad[i] += rhs.grad[i];
        }
        out
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        out.value -= rhs.value;
        for i in 0..self.n {
            out.grad[i] -= rhs.grad[i];
        }
        out
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut out = Jet1::constant(self.n, self.value * rhs.value);
        for i in 0..self.n {
            out.grad[i] = self.value * rhs.grad[i] + rhs.value * self.grad[i];
        }
        out
    }
}

impl From<Jet2> for Jet1 {
    fn from(j: Jet2) -> Self {
        Self { n: j.n, value: j.value, grad: j.grad }
    }
}

impl Jet2 {
    pub fn constant(n: usize, value: f64) -> Self {
        debug_assert!(n <= MAX_DIM);
        Self { n, value, grad: [0.0; MAX_DIM], hess: [[0.0; MAX_DIM]; MAX_DIM] }
    }

    /// The coordinate function `x^index` seeded at `value`.
    pub fn variable(n: usize, index: usize, value: f64) -> Self {
        let mut j = Self::constant(n, value);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.n]
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.hess[i][j]
    }

    pub fn hess_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.hess[i][..self.n].to_vec()).collect()
    }

    /// True when gradient and Hessian vanish identically.
    pub fn is_constant(&self) -> bool {
        self.grad().iter().all(|&g| g == 0.0) && (0..self.n).all(|i| self.hess[i][..self.n].iter().all(|&h| h == 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad().iter().all(|g| g.is_finite())
            && (0..self.n).all(|i| self.hess[i][..self.n].iter().all(|h| h.is_finite()))
    }

    #[inline]
    fn set_hess(&mut self, i: usize, j: usize, v: f64) {
        self.hess[i][j] = v;
        self.hess[j][i] = v;
    }

    /// Compose with a univariate function given its value and first two
    /// derivatives at `self.value()`.
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(self.n, f0);
        for i in 0..self.n {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..self.n {
            for j in i..self.n {
                out.set_hess(i, j, f1 * self.hess[i][j] + f2 * self.grad[i] * self.grad[j]);
            }
        }
        out
    }

    pub fn scale(self, c: f64) -> Self {
        let mut out = self;
        out.value *= c;
        for i in 0..self.n {
            out.grad[i] *= c;
            for j in i..self.n {
                out.set_hess(i, j, self.hess[i][j] * c);
            }
        }
        out
    }

    pub fn shift(self, c: f64) -> Self {
        let mut out = self;
        out.value += c;
        out
    }

    pub fn recip(self) -> Self {
        let r = 1.0 / self.value;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value += rhs.value;
        for i in 0..self.n {
            out.grad[i] += rhs.grad[i];
            for j in i..self.n {
                out.set_hess(i, j, self.hess[i][j] + rhs.hess[i][j]);
            }
        }
        out
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out.value -= rhs.value;
        for i in 0..self.n {
            out.grad[i] -= rhs.grad[i];
            for j in i..self.n {
                out.set_hess(i, j, self.hess[i][j] - rhs.hess[i][j]);
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (&self, &rhs);
        let mut out = Jet2::constant(self.n, a.value * b.value);
        for i in 0..self.n {
            out.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
        }
        for i in 0..self.n {
            for j in i..self.n {
                let h = a.value * b.hess[i][j] + b.value * a.hess[i][j] + a.grad[i] * b.grad[j] + a.grad[j] * b.grad[i];
                out.set_hess(i, j, h);
            }
        }
        out
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: Jet2) -> Jet2 {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_on_monomials() {
        // f = x*y at (2,3): grad (3,2), hess [[0,1],[1,0]]
        let x = Jet2::variable(2, 0, 2.0);
        let y = Jet2::variable(2, 1, 3.0);
        let f = x * y;
        assert_eq!(f.value(), 6.0);
        assert_eq!(f.grad(), &[3.0, 2.0]);
        assert_eq!(f.dd(0, 1), 1.0);
        assert_eq!(f.dd(0, 0), 0.0);
    }

    #[test]
    fn reciprocal_second_derivative() {
        // 1/x at x=2: -1/4, 2/8
        let r = Jet2::variable(1, 0, 2.0).recip();
        assert_eq!(r.value(), 0.5);
        assert_eq!(r.d(0), -0.25);
        assert_eq!(r.dd(0, 0), 0.25);
    }

    #[test]
    fn jet1_drops_hessian() {
        let j: Jet1 = (Jet2::variable(3, 1, 4.0) * Jet2::variable(3, 1, 4.0)).into();
        assert_eq!(j.value(), 16.0);
        assert_eq!(j.grad(), &[0.0, 8.0, 0.0]);
    }
}
