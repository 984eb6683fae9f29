//! Small exact-arithmetic helpers shared across modules: rationals, primes,
//! and arithmetic modulo a word-sized prime.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational literal: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Always emits the `"num/den"` form, even for integers.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Serde adapter storing a rational as a `"num/den"` string.
pub mod rational_str {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

/// Prime factorisation of `n > 0` as `(prime, exponent)` pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime divisors of a nonzero big integer. Trial division; fine for the
/// small parameters this crate works with.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let n = n.abs().to_u64().expect("integer too large for trial division");
    factor(n).into_iter().map(|(p, _)| p).collect()
}

/// q-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, q: u64) -> u32 {
    assert!(!n.is_zero());
    let q = BigInt::from(q);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (d, r) = n.div_rem(&q);
        if !r.is_zero() {
            return v;
        }
        n = d;
        v += 1;
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Inverse modulo a prime `p`; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

/// Legendre symbol for odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub fn mod_i64(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Reduces a rational modulo `p`; fails when `p` divides the denominator.
pub fn rational_mod(q: &Rational, p: u64) -> Result<u64> {
    let pb = BigInt::from(p);
    let n = q.numer().mod_floor(&pb).to_u64().unwrap();
    let d = q.denom().mod_floor(&pb).to_u64().unwrap();
    let di = inv_mod(d, p).ok_or_else(|| Error::NoSplitting {
        p,
        reason: format!("{p} divides the denominator of {}", format_rational(q)),
    })?;
    Ok(n * di % p)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

pub fn is_integer(q: &Rational) -> bool {
    q.denom().is_one()
}

/// Converts to `i64`, failing loudly on non-integers or overflow.
pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    n / d
}

/// Squarefree part of a nonzero integer, keeping its sign.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    let sign = if n.is_negative() { -1 } else { 1 };
    let m = n.abs().to_u64().expect("integer too large");
    let mut out: u64 = 1;
    for (p, e) in factor(m) {
        if e % 2 == 1 {
            out *= p;
        }
    }
    BigInt::from(out) * sign
}

/// Squarefree integer in the same square class as a nonzero rational.
pub fn square_class(q: &Rational) -> BigInt {
    squarefree_part(&(q.numer() * q.denom()))
}

pub fn is_rational_square(q: &Rational) -> bool {
    if q.is_negative() {
        return false;
    }
    if q.is_zero() {
        return true;
    }
    square_class(q).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals_round_trip() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(q, frac(-3, 2));
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn primes_and_factors() {
        assert_eq!(primes_in(1, 20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(valuation(&BigInt::from(48), 2), 4);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(legendre(-1, 5), 1);
        assert_eq!(legendre(-1, 7), -1);
        assert_eq!(rational_mod(&frac(1, 2), 5).unwrap(), 3);
        assert!(rational_mod(&frac(1, 5), 5).is_err());
    }

    #[test]
    fn square_classes() {
        assert_eq!(square_class(&frac(12, 5)), BigInt::from(15));
        assert!(is_rational_square(&frac(9, 4)));
        assert!(!is_rational_square(&rat(-1)));
    }
}
