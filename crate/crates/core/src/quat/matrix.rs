//! 2x2 matrix representations of quaternion elements over an explicit
//! coefficient domain.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::algebra::{QuatAlgebra, QuatElement};
use super::hilbert;
use crate::arith::{self, Rational};
use crate::error::{Error, Result};

/// `u + v sqrt(d)` in `Q(sqrt d)`; the radicand is carried by the matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadNum {
    pub u: Rational,
    pub v: Rational,
}

impl QuadNum {
    pub fn new(u: Rational, v: Rational) -> Self {
        QuadNum { u, v }
    }

    pub fn from_rational(u: Rational) -> Self {
        QuadNum { u, v: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::from_rational(Rational::zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        QuadNum::new(&self.u + &o.u, &self.v + &o.v)
    }

    pub fn sub(&self, o: &Self) -> Self {
        QuadNum::new(&self.u - &o.u, &self.v - &o.v)
    }

    pub fn mul(&self, o: &Self, d: &Rational) -> Self {
        QuadNum::new(
            &self.u * &o.u + d * &self.v * &o.v,
            &self.u * &o.v + &self.v * &o.u,
        )
    }

    /// The Galois conjugate `u - v sqrt(d)`.
    pub fn conj(&self) -> Self {
        QuadNum::new(self.u.clone(), -&self.v)
    }
}

/// Integers mod a prime, 2x2, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModMat {
    pub p: u64,
    pub m: [u64; 4],
}

impl ModMat {
    pub fn new(p: u64, m: [u64; 4]) -> Self {
        ModMat { p, m: m.map(|x| x % p) }
    }

    pub fn identity(p: u64) -> Self {
        Self::new(p, [1, 0, 0, 1])
    }

    pub fn scalar(p: u64, s: u64) -> Self {
        Self::new(p, [s, 0, 0, s])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p;
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = o.m;
        Self::new(
            p,
            [
                (a * e + b * g) % p,
                (a * f + b * h) % p,
                (c * e + d * g) % p,
                (c * f + d * h) % p,
            ],
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.p, std::array::from_fn(|k| self.m[k] + o.m[k]))
    }

    pub fn scale(&self, s: u64) -> Self {
        Self::new(self.p, self.m.map(|x| x * (s % self.p)))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.p, self.m.map(|x| self.p - x))
    }

    pub fn det(&self) -> u64 {
        let [a, b, c, d] = self.m;
        (a * d % self.p + self.p - b * c % self.p) % self.p
    }

    pub fn trace(&self) -> u64 {
        (self.m[0] + self.m[3]) % self.p
    }

    pub fn inverse(&self) -> Option<Self> {
        let di = arith::inv_mod(self.det(), self.p)?;
        let [a, b, c, d] = self.m;
        let p = self.p;
        Some(Self::new(p, [d, p - b, p - c, a]).scale(di))
    }

    pub fn is_scalar(&self) -> bool {
        self.m[1] == 0 && self.m[2] == 0 && self.m[0] == self.m[3]
    }

    /// Canonical representative of the class modulo nonzero scalars: first
    /// nonzero entry scaled to 1.
    pub fn projective_key(&self) -> Self {
        let lead = *self.m.iter().find(|&&x| x != 0).expect("zero matrix has no projective class");
        self.scale(arith::inv_mod(lead, self.p).unwrap())
    }
}

/// A 2x2 matrix with an explicit coefficient domain. Arithmetic between
/// different domains is rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixRep2 {
    Rational([Rational; 4]),
    /// Entries in `Q(sqrt d)`.
    Quadratic { d: Rational, m: [QuadNum; 4] },
    Real([f64; 4]),
    ModP(ModMat),
}

impl MatrixRep2 {
    pub fn domain(&self) -> &'static str {
        match self {
            MatrixRep2::Rational(_) => "rational",
            MatrixRep2::Quadratic { .. } => "quadratic",
            MatrixRep2::Real(_) => "real",
            MatrixRep2::ModP(_) => "mod-p",
        }
    }

    fn mismatch(&self, o: &Self) -> Error {
        Error::DomainMismatch(self.domain(), o.domain())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        use MatrixRep2::*;
        Ok(match (self, o) {
            (Rational(a), Rational(b)) => Rational([
                &a[0] * &b[0] + &a[1] * &b[2],
                &a[0] * &b[1] + &a[1] * &b[3],
                &a[2] * &b[0] + &a[3] * &b[2],
                &a[2] * &b[1] + &a[3] * &b[3],
            ]),
            (Quadratic { d, m: a }, Quadratic { d: d2, m: b }) if d == d2 => {
                let f = |x: usize, y: usize, z: usize, w: usize| {
                    a[x].mul(&b[y], d).add(&a[z].mul(&b[w], d))
                };
                Quadratic {
                    d: d.clone(),
                    m: [f(0, 0, 1, 2), f(0, 1, 1, 3), f(2, 0, 3, 2), f(2, 1, 3, 3)],
                }
            }
            (Real(a), Real(b)) => Real(real_mul(a, b)),
            (ModP(a), ModP(b)) if a.p == b.p => ModP(a.mul(b)),
            _ => return Err(self.mismatch(o)),
        })
    }

    pub fn as_real(&self) -> Option<[f64; 4]> {
        match self {
            MatrixRep2::Real(m) => Some(*m),
            _ => None,
        }
    }

    pub fn as_quadratic(&self) -> Option<(&Rational, &[QuadNum; 4])> {
        match self {
            MatrixRep2::Quadratic { d, m } => Some((d, m)),
            _ => None,
        }
    }

    pub fn as_mod_p(&self) -> Option<ModMat> {
        match self {
            MatrixRep2::ModP(m) => Some(*m),
            _ => None,
        }
    }
}

impl fmt::Display for MatrixRep2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixRep2::Rational(m) => write!(f, "[[{}, {}], [{}, {}]]", m[0], m[1], m[2], m[3]),
            MatrixRep2::Quadratic { d, m } => {
                let s = |q: &QuadNum| format!("{}+{}*sqrt({})", q.u, q.v, d);
                write!(f, "[[{}, {}], [{}, {}]]", s(&m[0]), s(&m[1]), s(&m[2]), s(&m[3]))
            }
            MatrixRep2::Real(m) => write!(f, "[[{}, {}], [{}, {}]]", m[0], m[1], m[2], m[3]),
            MatrixRep2::ModP(m) => write!(
                f,
                "[[{}, {}], [{}, {}]] mod {}",
                m.m[0], m.m[1], m.m[2], m.m[3], m.p
            ),
        }
    }
}

pub fn real_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Determinant of a quadratic-domain matrix, as an element of `Q(sqrt d)`.
pub fn quadratic_det(d: &Rational, m: &[QuadNum; 4]) -> QuadNum {
    m[0].mul(&m[3], d).sub(&m[1].mul(&m[2], d))
}

pub fn quadratic_trace(m: &[QuadNum; 4]) -> QuadNum {
    m[0].add(&m[3])
}

/// Left multiplication by `x` on `D` viewed as a right `K`-module with basis
/// `1, j`, where `K = Q(sqrt alpha) = Q + Q i`.
///
/// Writing `x = z1 + z2 j` with `z1 = a + b i`, `z2 = c + d i`, and using
/// `j z = conj(z) j`, the action on `y = y1 + j y2` is
/// `[[z1, beta z2], [conj z2, conj z1]]`. Its determinant is the reduced norm
/// and its trace the reduced trace.
pub fn left_regular_rep(x: &QuatElement) -> Result<MatrixRep2> {
    let alg = x.algebra();
    if arith::is_rational_square(alg.alpha()) {
        return Err(Error::AlphaIsSquare(arith::format_rational(alg.alpha())));
    }
    let [a, b, c, d] = x.coeffs().clone();
    let z1 = QuadNum::new(a, b);
    let z2 = QuadNum::new(c, d);
    let beta = QuadNum::from_rational(alg.beta().clone());
    let m = [
        z1.clone(),
        beta.mul(&z2, alg.alpha()),
        z2.conj(),
        z1.conj(),
    ];
    Ok(MatrixRep2::Quadratic {
        d: alg.alpha().clone(),
        m,
    })
}

/// The deterministic real embedding `phi_D : D (x) R -> M_2(R)`.
///
/// When `alpha > 0` the regular representation is used with `sqrt alpha`
/// real. When `alpha < 0 < beta` the generators are exchanged first
/// (`i' = j`, `j' = i`, so `i'j' = -ij`). For `alpha = 1` this coincides
/// with [`split_form`].
#[derive(Clone, Debug)]
pub struct RealEmbedding {
    algebra: Arc<QuatAlgebra>,
    swapped: bool,
    sqrt_a: f64,
    b: f64,
}

impl RealEmbedding {
    pub fn new(algebra: &Arc<QuatAlgebra>) -> Result<Self> {
        if !hilbert::is_indefinite(algebra) {
            return Err(Error::Definite);
        }
        let (al, be) = (algebra.alpha(), algebra.beta());
        let swapped = !al.is_positive();
        let (a, b) = if swapped { (be, al) } else { (al, be) };
        Ok(RealEmbedding {
            algebra: Arc::clone(algebra),
            swapped,
            sqrt_a: arith::to_f64(a).sqrt(),
            b: arith::to_f64(b),
        })
    }

    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.algebra
    }

    /// Coordinates in the rotated presentation.
    fn rotated(&self, c: [f64; 4]) -> [f64; 4] {
        if self.swapped {
            [c[0], c[2], c[1], -c[3]]
        } else {
            c
        }
    }

    pub fn apply_f64(&self, c: [f64; 4]) -> [f64; 4] {
        let [a, b, c, d] = self.rotated(c);
        let s = self.sqrt_a;
        let z1 = (a + b * s, a - b * s);
        let z2 = (c + d * s, c - d * s);
        [z1.0, self.b * z2.0, z2.1, z1.1]
    }

    pub fn apply(&self, x: &QuatElement) -> MatrixRep2 {
        MatrixRep2::Real(self.apply_f64(x.to_f64()))
    }
}

/// Exact matrix form for `alpha = 1`: `i -> diag(1, -1)`,
/// `j -> [[0, beta], [1, 0]]`.
pub fn split_form(x: &QuatElement) -> Result<MatrixRep2> {
    let alg = x.algebra();
    if !alg.alpha().is_one() {
        return Err(Error::InvalidInput("split form requires alpha = 1".into()));
    }
    let [a, b, c, d] = x.coeffs().clone();
    let be = alg.beta();
    Ok(MatrixRep2::Rational([
        &a + &b,
        be * (&c + &d),
        &c - &d,
        &a - &b,
    ]))
}

pub fn real_det(m: &[f64; 4]) -> f64 {
    m[0] * m[3] - m[1] * m[2]
}

pub fn real_trace(m: &[f64; 4]) -> f64 {
    m[0] + m[3]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    #[test]
    fn regular_rep_of_one_is_identity() {
        let a = QuatAlgebra::from_ints(-1, 3).unwrap();
        let l = left_regular_rep(&QuatElement::one(&a)).unwrap();
        let (_, m) = l.as_quadratic().unwrap();
        assert_eq!(m[0], QuadNum::from_rational(rat(1)));
        assert_eq!(m[1], QuadNum::zero());
        assert_eq!(m[3], QuadNum::from_rational(rat(1)));
    }

    #[test]
    fn regular_rep_rejects_square_alpha() {
        let a = QuatAlgebra::from_ints(4, 3).unwrap();
        assert!(matches!(
            left_regular_rep(&QuatElement::one(&a)),
            Err(Error::AlphaIsSquare(_))
        ));
    }

    #[test]
    fn mixed_domains_rejected() {
        let r = MatrixRep2::Real([1.0, 0.0, 0.0, 1.0]);
        let q = MatrixRep2::ModP(ModMat::identity(5));
        assert!(matches!(r.try_mul(&q), Err(Error::DomainMismatch(..))));
        let q7 = MatrixRep2::ModP(ModMat::identity(7));
        assert!(q.try_mul(&q7).is_err());
    }

    #[test]
    fn real_embedding_identity_and_split() {
        let a = QuatAlgebra::from_ints(-1, 3).unwrap();
        let phi = RealEmbedding::new(&a).unwrap();
        assert_eq!(phi.apply(&QuatElement::one(&a)).as_real().unwrap(), [1.0, 0.0, 0.0, 1.0]);
        let m = QuatAlgebra::from_ints(1, 1).unwrap();
        let phi = RealEmbedding::new(&m).unwrap();
        let x = QuatElement::from_ints(&m, [1, 2, 3, 4]);
        assert_eq!(phi.apply(&x).as_real().unwrap(), [3.0, 7.0, -1.0, -1.0]);
        assert!(RealEmbedding::new(&QuatAlgebra::from_ints(-1, -1).unwrap()).is_err());
    }

    #[test]
    fn mod_mat_basics() {
        let m = ModMat::new(5, [2, 1, 1, 1]);
        assert_eq!(m.det(), 1);
        assert_eq!(m.mul(&m.inverse().unwrap()), ModMat::identity(5));
        assert_eq!(m.scale(3).projective_key(), m.projective_key());
    }
}
