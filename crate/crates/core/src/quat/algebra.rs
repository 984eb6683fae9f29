use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, rat, Rational};
use crate::error::{Error, Result};

/// The quaternion algebra `(alpha, beta)` over Q: basis `1, i, j, ij` with
/// `i^2 = alpha`, `j^2 = beta`, `ij = -ji`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuatAlgebra {
    #[serde(with = "arith::rational_str")]
    alpha: Rational,
    #[serde(with = "arith::rational_str")]
    beta: Rational,
}

impl QuatAlgebra {
    pub fn new(alpha: Rational, beta: Rational) -> Result<Arc<Self>> {
        if alpha.is_zero() || beta.is_zero() {
            return Err(Error::InvalidInput("alpha and beta must be nonzero".into()));
        }
        Ok(Arc::new(QuatAlgebra { alpha, beta }))
    }

    pub fn from_ints(alpha: i64, beta: i64) -> Result<Arc<Self>> {
        Self::new(rat(alpha), rat(beta))
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn beta(&self) -> &Rational {
        &self.beta
    }

    /// Parses the JSON literal `{"alpha": "p/q", "beta": "p/q"}`.
    pub fn from_json(s: &str) -> Result<Arc<Self>> {
        let a: QuatAlgebra =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        Self::new(a.alpha, a.beta)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("algebra serializes")
    }
}

impl fmt::Display for QuatAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// `x0 + x1 i + x2 j + x3 ij` with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct QuatElement {
    algebra: Arc<QuatAlgebra>,
    coeffs: [Rational; 4],
}

impl PartialEq for QuatElement {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.algebra, &other.algebra) && self.coeffs == other.coeffs
    }
}

impl Eq for QuatElement {}

fn same_algebra(a: &Arc<QuatAlgebra>, b: &Arc<QuatAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl QuatElement {
    pub fn new(algebra: &Arc<QuatAlgebra>, coeffs: [Rational; 4]) -> Self {
        QuatElement {
            algebra: Arc::clone(algebra),
            coeffs,
        }
    }

    pub fn from_ints(algebra: &Arc<QuatAlgebra>, c: [i64; 4]) -> Self {
        Self::new(algebra, c.map(rat))
    }

    pub fn scalar(algebra: &Arc<QuatAlgebra>, s: Rational) -> Self {
        Self::new(algebra, [s, Rational::zero(), Rational::zero(), Rational::zero()])
    }

    pub fn one(algebra: &Arc<QuatAlgebra>) -> Self {
        Self::scalar(algebra, Rational::one())
    }

    pub fn zero(algebra: &Arc<QuatAlgebra>) -> Self {
        Self::scalar(algebra, Rational::zero())
    }

    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_algebra(&self.algebra, &other.algebra) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    /// Product determined by `i^2 = alpha`, `j^2 = beta`, `ij = -ji`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let (a, b) = (&self.algebra.alpha, &self.algebra.beta);
        let ab = a * b;
        let [x0, x1, x2, x3] = &self.coeffs;
        let [y0, y1, y2, y3] = &other.coeffs;
        let c0 = x0 * y0 + a * x1 * y1 + b * x2 * y2 - &ab * x3 * y3;
        let c1 = x0 * y1 + x1 * y0 - b * x2 * y3 + b * x3 * y2;
        let c2 = x0 * y2 + x2 * y0 + a * x1 * y3 - a * x3 * y1;
        let c3 = x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1;
        Ok(Self::new(&self.algebra, [c0, c1, c2, c3]))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |x, y| x + y))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.zip(other, |x, y| x - y))
    }

    fn zip(&self, other: &Self, f: impl Fn(&Rational, &Rational) -> Rational) -> Self {
        let c = std::array::from_fn(|k| f(&self.coeffs[k], &other.coeffs[k]));
        Self::new(&self.algebra, c)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(&self.algebra, self.coeffs.clone().map(|c| c * s))
    }

    /// The canonical involution `a - bi - cj - dij`.
    pub fn conjugate(&self) -> Self {
        let [a, b, c, d] = self.coeffs.clone();
        Self::new(&self.algebra, [a, -b, -c, -d])
    }

    pub fn reduced_trace(&self) -> Rational {
        &self.coeffs[0] * rat(2)
    }

    /// `a^2 - alpha b^2 - beta c^2 + alpha beta d^2`.
    pub fn reduced_norm(&self) -> Rational {
        let (al, be) = (&self.algebra.alpha, &self.algebra.beta);
        let [a, b, c, d] = &self.coeffs;
        a * a - al * b * b - be * c * c + al * be * d * d
    }

    pub fn inverse(&self) -> Option<Self> {
        let n = self.reduced_norm();
        if n.is_zero() {
            None
        } else {
            Some(self.conjugate().scale(&n.recip()))
        }
    }

    /// Sign normalisation used for the `±1` quotient: first nonzero
    /// coefficient positive.
    pub fn sign_normalized(&self) -> Self {
        match self.coeffs.iter().find(|c| !c.is_zero()) {
            Some(c) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }

    pub fn to_f64(&self) -> [f64; 4] {
        std::array::from_fn(|k| arith::to_f64(&self.coeffs[k]))
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.coeffs;
        write!(f, "{a} + {b}*i + {c}*j + {d}*ij")
    }
}

// Operator sugar. These panic on mismatched algebras; use `try_*` when the
// operands come from untrusted input.
impl Mul for &QuatElement {
    type Output = QuatElement;
    fn mul(self, rhs: &QuatElement) -> QuatElement {
        self.try_mul(rhs).expect("quaternion algebras differ")
    }
}

impl Add for &QuatElement {
    type Output = QuatElement;
    fn add(self, rhs: &QuatElement) -> QuatElement {
        self.try_add(rhs).expect("quaternion algebras differ")
    }
}

impl Sub for &QuatElement {
    type Output = QuatElement;
    fn sub(self, rhs: &QuatElement) -> QuatElement {
        self.try_sub(rhs).expect("quaternion algebras differ")
    }
}

impl Neg for &QuatElement {
    type Output = QuatElement;
    fn neg(self) -> QuatElement {
        QuatElement::new(&self.algebra, self.coeffs.clone().map(|c| -c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamilton() -> Arc<QuatAlgebra> {
        QuatAlgebra::from_ints(-1, -1).unwrap()
    }

    #[test]
    fn defining_relations() {
        let h = hamilton();
        let i = QuatElement::from_ints(&h, [0, 1, 0, 0]);
        let j = QuatElement::from_ints(&h, [0, 0, 1, 0]);
        let ij = QuatElement::from_ints(&h, [0, 0, 0, 1]);
        assert_eq!(&i * &j, ij);
        assert_eq!(&j * &i, -&ij);
        assert_eq!(&i * &i, QuatElement::from_ints(&h, [-1, 0, 0, 0]));
    }

    #[test]
    fn split_algebra_zero_divisor() {
        let m = QuatAlgebra::from_ints(1, 1).unwrap();
        let a = QuatElement::from_ints(&m, [1, 1, 0, 0]);
        let b = QuatElement::from_ints(&m, [1, -1, 0, 0]);
        assert!((&a * &b).is_zero());
        assert!(a.reduced_norm().is_zero());
    }

    #[test]
    fn involution_trace_norm_examples() {
        let h = hamilton();
        let x = QuatElement::from_ints(&h, [1, 2, 3, 4]);
        assert_eq!(x.conjugate(), QuatElement::from_ints(&h, [1, -2, -3, -4]));
        assert_eq!(QuatElement::from_ints(&h, [3, 1, 0, 0]).reduced_trace(), rat(6));
        assert_eq!(QuatElement::from_ints(&h, [0, 1, 1, 1]).reduced_trace(), rat(0));
        assert_eq!(QuatElement::from_ints(&h, [1, 1, 1, 1]).reduced_norm(), rat(4));
        assert_eq!(QuatElement::one(&h).reduced_norm(), rat(1));
        assert_eq!(QuatElement::one(&h).conjugate(), QuatElement::one(&h));
    }

    #[test]
    fn mismatched_algebras_rejected() {
        let a = QuatElement::one(&hamilton());
        let b = QuatElement::one(&QuatAlgebra::from_ints(-1, 3).unwrap());
        assert_eq!(a.try_mul(&b), Err(Error::AlgebraMismatch));
        assert!(QuatAlgebra::from_ints(0, 3).is_err());
    }

    #[test]
    fn json_literal() {
        let a = QuatAlgebra::from_json(r#"{"alpha": "-1/1", "beta": "3"}"#).unwrap();
        assert_eq!(*a, *QuatAlgebra::from_ints(-1, 3).unwrap());
        assert_eq!(a.to_json(), r#"{"alpha":"-1/1","beta":"3/1"}"#);
    }

    #[test]
    fn inverse_and_sign() {
        let a = QuatAlgebra::from_ints(-1, 3).unwrap();
        let x = QuatElement::from_ints(&a, [2, 1, 1, 0]);
        assert_eq!(&x * &x.inverse().unwrap(), QuatElement::one(&a));
        let y = QuatElement::from_ints(&a, [0, -1, 2, 0]);
        assert_eq!(y.sign_normalized(), QuatElement::from_ints(&a, [0, 1, -2, 0]));
    }
}
