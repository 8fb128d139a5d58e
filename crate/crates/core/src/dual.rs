//! First-order dual numbers carrying gradients in the four chart variables.
//!
//! Used to push exact metric partials through Gram-Schmidt so the moving
//! frame and its derivatives stay at analytic accuracy.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Minimal scalar interface so frame construction can run on plain floats
/// or on dual numbers.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn sqrt_s(self) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn sqrt_s(self) -> Self {
        self.sqrt()
    }
}

impl Scalar for Dual4 {
    fn from_f64(v: f64) -> Self {
        Dual4::constant(v)
    }
    fn sqrt_s(self) -> Self {
        self.sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual4 {
    pub v: f64,
    pub d: [f64; 4],
}

impl Dual4 {
    pub fn constant(v: f64) -> Self {
        Dual4 { v, d: [0.0; 4] }
    }

    pub fn with_grad(v: f64, d: [f64; 4]) -> Self {
        Dual4 { v, d }
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        let f = 0.5 / r;
        Dual4 {
            v: r,
            d: self.d.map(|g| g * f),
        }
    }
}

impl Add for Dual4 {
    type Output = Dual4;
    fn add(self, o: Dual4) -> Dual4 {
        Dual4 {
            v: self.v + o.v,
            d: [
                self.d[0] + o.d[0],
                self.d[1] + o.d[1],
                self.d[2] + o.d[2],
                self.d[3] + o.d[3],
            ],
        }
    }
}

impl Sub for Dual4 {
    type Output = Dual4;
    fn sub(self, o: Dual4) -> Dual4 {
        Dual4 {
            v: self.v - o.v,
            d: [
                self.d[0] - o.d[0],
                self.d[1] - o.d[1],
                self.d[2] - o.d[2],
                self.d[3] - o.d[3],
            ],
        }
    }
}

impl Mul for Dual4 {
    type Output = Dual4;
    fn mul(self, o: Dual4) -> Dual4 {
        Dual4 {
            v: self.v * o.v,
            d: [
                self.d[0] * o.v + self.v * o.d[0],
                self.d[1] * o.v + self.v * o.d[1],
                self.d[2] * o.v + self.v * o.d[2],
                self.d[3] * o.v + self.v * o.d[3],
            ],
        }
    }
}

impl Div for Dual4 {
    type Output = Dual4;
    fn div(self, o: Dual4) -> Dual4 {
        let inv = 1.0 / o.v;
        let v = self.v * inv;
        Dual4 {
            v,
            d: [
                (self.d[0] - v * o.d[0]) * inv,
                (self.d[1] - v * o.d[1]) * inv,
                (self.d[2] - v * o.d[2]) * inv,
                (self.d[3] - v * o.d[3]) * inv,
            ],
        }
    }
}

impl Neg for Dual4 {
    type Output = Dual4;
    fn neg(self) -> Dual4 {
        Dual4 {
            v: -self.v,
            d: self.d.map(|g| -g),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn chain_rule_through_sqrt_and_division() {
        // f(x) = sqrt(a) / (a + b) with a = x0^2 + 1, b = 2 x1
        let x = [0.7, -0.3];
        let a = Dual4::with_grad(x[0] * x[0] + 1.0, [2.0 * x[0], 0.0, 0.0, 0.0]);
        let b = Dual4::with_grad(2.0 * x[1], [0.0, 2.0, 0.0, 0.0]);
        let f = a.sqrt() / (a + b);

        let g = |x0: f64, x1: f64| {
            let a = x0 * x0 + 1.0;
            a.sqrt() / (a + 2.0 * x1)
        };
        let h = 1e-6;
        let d0 = (g(x[0] + h, x[1]) - g(x[0] - h, x[1])) / (2.0 * h);
        let d1 = (g(x[0], x[1] + h) - g(x[0], x[1] - h)) / (2.0 * h);
        assert_relative_eq!(f.d[0], d0, epsilon = 1e-8);
        assert_relative_eq!(f.d[1], d1, epsilon = 1e-8);
    }
}
