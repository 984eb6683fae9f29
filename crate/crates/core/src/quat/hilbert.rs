//! Local Hilbert symbols and ramification of `(a, b)_Q`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::QuatAlgebra;
use crate::arith::{self, legendre, square_class, valuation, Rational};
use crate::error::{Error, Result};

/// A place of Q.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Place {
    Finite(u64),
    Infinite,
}

impl Place {
    pub fn finite(q: u64) -> Result<Self> {
        if arith::is_prime(q) {
            Ok(Place::Finite(q))
        } else {
            Err(Error::InvalidInput(format!("{q} is not prime")))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(q) => write!(f, "{q}"),
            Place::Infinite => write!(f, "inf"),
        }
    }
}

fn nonzero(a: &Rational, b: &Rational) -> Result<()> {
    if a.is_zero() || b.is_zero() {
        Err(Error::InvalidInput("Hilbert symbol needs nonzero arguments".into()))
    } else {
        Ok(())
    }
}

/// `(a, b)_v`: `+1` when `a x^2 + b y^2 = z^2` has a nontrivial solution over
/// `Q_v`, `-1` otherwise.
pub fn hilbert_symbol(a: &Rational, b: &Rational, v: Place) -> Result<i32> {
    nonzero(a, b)?;
    let (a, b) = (square_class(a), square_class(b));
    Ok(match v {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(q) => local_symbol(&a, &b, q),
    })
}

fn split_unit(n: &BigInt, q: u64) -> (u32, i64) {
    let e = valuation(n, q);
    let u = n / BigInt::from(q).pow(e);
    (e, u.to_i64().expect("unit part fits in i64"))
}

// Closed-form local symbol on squarefree integers.
fn local_symbol(a: &BigInt, b: &BigInt, q: u64) -> i32 {
    let (ea, u) = split_unit(a, q);
    let (eb, v) = split_unit(b, q);
    if q == 2 {
        let eps = |x: i64| (x.rem_euclid(4) == 3) as u32;
        let omega = |x: i64| matches!(x.rem_euclid(8), 3 | 5) as u32;
        let e = eps(u) * eps(v) + ea * omega(v) + eb * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let eps = ((q - 1) / 2) as u32;
        let mut s = if (ea * eb * eps) % 2 == 0 { 1 } else { -1 };
        if eb % 2 == 1 {
            s *= legendre(u, q);
        }
        if ea % 2 == 1 {
            s *= legendre(v, q);
        }
        s
    }
}

/// Decides `(a, b)_q` by exhaustive search for a primitive solution of
/// `a x^2 + b y^2 = z^2` modulo `q^k`, `k = 2 ord_q(4ab) + 1`, after reducing
/// `a, b` to squarefree representatives. Independent of the closed form used
/// by [`hilbert_symbol`]; practical for `q^k` up to a few thousand.
pub fn hilbert_symbol_bruteforce(a: &Rational, b: &Rational, q: u64) -> Result<i32> {
    nonzero(a, b)?;
    if !arith::is_prime(q) {
        return Err(Error::InvalidInput(format!("{q} is not prime")));
    }
    let (a, b) = (square_class(a), square_class(b));
    let k = 2 * valuation(&(BigInt::from(4) * &a * &b), q) + 1;
    let m = q.checked_pow(k).filter(|&m| m <= 20_000).ok_or_else(|| {
        Error::InvalidInput(format!("modulus {q}^{k} too large for exhaustive search"))
    })?;
    let mb = BigInt::from(m);
    let am = a.mod_floor(&mb).to_u64().unwrap();
    let bm = b.mod_floor(&mb).to_u64().unwrap();
    // squares[r]: some z with z^2 = r; unit_squares[r]: some unit z.
    let mut squares = vec![false; m as usize];
    let mut unit_squares = vec![false; m as usize];
    for z in 0..m {
        let r = (z * z % m) as usize;
        squares[r] = true;
        if z % q != 0 {
            unit_squares[r] = true;
        }
    }
    for x in 0..m {
        let ax = am * (x * x % m) % m;
        for y in 0..m {
            let r = ((ax + bm * (y * y % m)) % m) as usize;
            let found = if x % q != 0 || y % q != 0 {
                squares[r]
            } else {
                unit_squares[r]
            };
            if found {
                return Ok(1);
            }
        }
    }
    Ok(-1)
}

/// Places where `(alpha, beta)` is nonsplit. Only primes dividing
/// `2 * num * den` of alpha and beta can ramify.
pub fn ramified_places(algebra: &QuatAlgebra) -> BTreeSet<Place> {
    let (a, b) = (algebra.alpha(), algebra.beta());
    let mut candidates = BTreeSet::new();
    candidates.insert(2u64);
    for q in [a, b] {
        candidates.extend(arith::prime_divisors(q.numer()));
        candidates.extend(arith::prime_divisors(q.denom()));
    }
    let mut out: BTreeSet<Place> = candidates
        .into_iter()
        .map(Place::Finite)
        .filter(|&v| hilbert_symbol(a, b, v).unwrap() == -1)
        .collect();
    if hilbert_symbol(a, b, Place::Infinite).unwrap() == -1 {
        out.insert(Place::Infinite);
    }
    out
}

/// Product of the finite ramified primes.
pub fn discriminant(algebra: &QuatAlgebra) -> u64 {
    ramified_places(algebra)
        .into_iter()
        .filter_map(|v| match v {
            Place::Finite(q) => Some(q),
            Place::Infinite => None,
        })
        .product()
}

pub fn is_indefinite(algebra: &QuatAlgebra) -> bool {
    !ramified_places(algebra).contains(&Place::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn h(a: i64, b: i64, v: Place) -> i32 {
        hilbert_symbol(&rat(a), &rat(b), v).unwrap()
    }

    #[test]
    fn symbol_examples() {
        for v in [Place::Finite(2), Place::Finite(3), Place::Infinite] {
            assert_eq!(h(1, 1, v), 1);
        }
        assert_eq!(h(-1, -1, Place::Infinite), -1);
        assert_eq!(h(-1, 3, Place::Finite(2)), -1);
        assert_eq!(h(-1, 3, Place::Finite(3)), -1);
        assert_eq!(h(-1, 3, Place::Finite(5)), 1);
    }

    #[test]
    fn bruteforce_agrees_on_examples() {
        for (a, b, q, want) in [(-1, 3, 2, -1), (-1, 3, 3, -1), (-1, 3, 5, 1), (-1, -1, 2, -1)] {
            assert_eq!(hilbert_symbol_bruteforce(&rat(a), &rat(b), q).unwrap(), want);
        }
    }

    #[test]
    fn zero_rejected() {
        assert!(hilbert_symbol(&rat(0), &rat(1), Place::Infinite).is_err());
        assert!(Place::finite(4).is_err());
    }

    #[test]
    fn ramification_examples() {
        let split = QuatAlgebra::from_ints(1, 1).unwrap();
        assert!(ramified_places(&split).is_empty());
        assert_eq!(discriminant(&split), 1);
        let ham = QuatAlgebra::from_ints(-1, -1).unwrap();
        assert_eq!(
            ramified_places(&ham),
            BTreeSet::from([Place::Finite(2), Place::Infinite])
        );
        assert_eq!(discriminant(&ham), 2);
        let six = QuatAlgebra::from_ints(-1, 3).unwrap();
        assert_eq!(
            ramified_places(&six),
            BTreeSet::from([Place::Finite(2), Place::Finite(3)])
        );
        assert_eq!(discriminant(&six), 6);
        assert!(is_indefinite(&six));
    }

    #[test]
    fn rational_arguments_use_square_class() {
        let a = Rational::new(3.into(), 4.into());
        assert_eq!(
            hilbert_symbol(&a, &rat(-1), Place::Finite(3)).unwrap(),
            h(3, -1, Place::Finite(3))
        );
    }
}
