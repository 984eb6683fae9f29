//! Exact-arithmetic invariants on seeded random inputs.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use shimura::arith::{factor, frac, Rational};
use shimura::quat::{hilbert_symbol, left_regular_rep, Place, QuatAlgebra, QuatElement};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub failures: usize,
    pub tolerance: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub pass: bool,
}

fn random_rational(rng: &mut impl Rng) -> Rational {
    frac(rng.gen_range(-40..=40), rng.gen_range(1..=9))
}

fn random_element(alg: &Arc<QuatAlgebra>, rng: &mut impl Rng) -> QuatElement {
    QuatElement::new(alg, std::array::from_fn(|_| random_rational(rng)))
}

fn same(x: &QuatElement, y: &QuatElement) -> bool {
    x.coeffs() == y.coeffs()
}

fn quaternion_checks(alg: &Arc<QuatAlgebra>, n: usize, rng: &mut impl Rng) -> shimura::Result<Vec<Check>> {
    let tag = format!("({},{})", alg.alpha(), alg.beta());
    let mut fails = [0usize; 5];
    for _ in 0..n {
        let x = random_element(alg, rng);
        let y = random_element(alg, rng);
        let xy = x.try_mul(&y)?;
        fails[0] += (xy.reduced_norm() != x.reduced_norm() * y.reduced_norm()) as usize;
        let nx = QuatElement::scalar(alg, x.reduced_norm());
        fails[1] += !same(&x.try_mul(&x.conjugate())?, &nx) as usize;
        fails[2] += (x.reduced_trace() != x.conjugate().reduced_trace()) as usize;
        fails[3] += !same(&xy.conjugate(), &y.conjugate().try_mul(&x.conjugate())?) as usize;
        let (lx, ly) = (left_regular_rep(&x)?, left_regular_rep(&y)?);
        fails[4] += (left_regular_rep(&xy)? != lx.try_mul(&ly)?) as usize;
    }
    let names = ["norm_multiplicative", "x_conj_x_is_norm", "trace_conj", "conj_anti_automorphism", "regular_rep_multiplicative"];
    Ok(names
        .iter()
        .zip(fails)
        .map(|(name, failures)| Check {
            name: format!("{name} {tag}"),
            cases: n,
            failures,
            tolerance: "exact",
        })
        .collect())
}

fn product_formula(n: usize, rng: &mut impl Rng) -> shimura::Result<Check> {
    let mut failures = 0;
    for _ in 0..n {
        let mut pick = || loop {
            let v: i64 = rng.gen_range(-30..=30);
            if v != 0 {
                return v;
            }
        };
        let (a, b) = (pick(), pick());
        let (qa, qb) = (Rational::from_integer(a.into()), Rational::from_integer(b.into()));
        let mut places = vec![Place::Infinite];
        places.extend(factor((2 * a * b).unsigned_abs()).into_iter().map(|(q, _)| Place::Finite(q)));
        let mut prod = 1;
        for v in places {
            prod *= hilbert_symbol(&qa, &qb, v)?;
        }
        failures += (prod != 1) as usize;
    }
    Ok(Check {
        name: "hilbert_product_formula".into(),
        cases: n,
        failures,
        tolerance: "exact",
    })
}

pub fn run(seed: u64, quick: bool) -> shimura::Result<SelftestReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = if quick { 100 } else { 1000 };
    let mut checks = Vec::new();
    for (a, b) in [(-1, 3), (-1, -1)] {
        checks.extend(quaternion_checks(&QuatAlgebra::from_ints(a, b)?, n, &mut rng)?);
    }
    checks.push(product_formula(if quick { 20 } else { 50 }, &mut rng)?);
    Ok(SelftestReport {
        seed,
        pass: checks.iter().all(|c| c.failures == 0),
        checks,
    })
}

#[cfg(test)]
mod tests {
    #[test]
    fn quick_suite_passes() {
        let rep = super::run(7, true).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.checks.len(), 11);
    }
}
