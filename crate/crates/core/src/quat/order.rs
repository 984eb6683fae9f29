use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::algebra::{QuatAlgebra, QuatElement};
use super::hilbert;
use super::matrix::{MatrixRep2, ModMat};
use crate::arith::{self, frac, rat, Rational};
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};

/// A full-rank lattice closed under multiplication, containing 1, with
/// integral trace and norm. Rows of `basis` are coordinates in `1, i, j, ij`.
#[derive(Clone, Debug)]
pub struct LatticeOrder {
    algebra: Arc<QuatAlgebra>,
    basis: [[Rational; 4]; 4],
    inverse: RatMatrix,
    gram: [[i64; 4]; 4],
    traces: [i64; 4],
    table: [[[i64; 4]; 4]; 4],
    conj: [[i64; 4]; 4],
    scaled: [[i64; 4]; 4],
    denom: i64,
}

#[derive(Serialize, Deserialize)]
struct OrderJson {
    algebra: QuatAlgebra,
    basis: Vec<String>,
}

fn small(q: &Rational, what: &str) -> Result<i64> {
    arith::to_i64(q).ok_or_else(|| Error::NotAnOrder(format!("{what} {q} is not a small integer")))
}

impl LatticeOrder {
    /// Validates rank, `1 ∈ O`, closure and integrality.
    pub fn new(algebra: &Arc<QuatAlgebra>, basis: [[Rational; 4]; 4]) -> Result<Self> {
        let rows: RatMatrix = basis.iter().map(|r| r.to_vec()).collect();
        let inverse = linalg::inverse(&rows)
            .ok_or_else(|| Error::NotAnOrder("basis is singular".into()))?;
        let mut order = LatticeOrder {
            algebra: Arc::clone(algebra),
            basis,
            inverse,
            gram: [[0; 4]; 4],
            traces: [0; 4],
            table: [[[0; 4]; 4]; 4],
            conj: [[0; 4]; 4],
            scaled: [[0; 4]; 4],
            denom: 1,
        };
        let den = arith::common_denominator(order.basis.iter().flatten());
        order.denom = small(&Rational::from_integer(den.clone()), "denominator")?;
        for a in 0..4 {
            for k in 0..4 {
                let v = &order.basis[a][k] * Rational::from_integer(den.clone());
                order.scaled[a][k] = small(&v, "basis entry")?;
            }
        }
        let one = QuatElement::one(algebra);
        if order.int_coords(&one).is_none() {
            return Err(Error::NotAnOrder("lattice does not contain 1".into()));
        }
        let elems: Vec<QuatElement> = (0..4).map(|a| order.basis_element(a)).collect();
        for a in 0..4 {
            order.traces[a] = small(&elems[a].reduced_trace(), "trace")?;
            small(&elems[a].reduced_norm(), "norm")?;
            order.conj[a] = order.int_coords(&elems[a].conjugate()).ok_or_else(|| {
                Error::NotAnOrder(format!("conjugate of basis element {a} escapes"))
            })?;
            for b in 0..4 {
                let prod = &elems[a] * &elems[b];
                order.table[a][b] = order.int_coords(&prod).ok_or_else(|| {
                    Error::NotAnOrder(format!("product of basis elements {a},{b} escapes"))
                })?;
                order.gram[a][b] =
                    small(&(&elems[a] * &elems[b].conjugate()).reduced_trace(), "trace form")?;
            }
        }
        Ok(order)
    }

    pub fn from_int_basis(algebra: &Arc<QuatAlgebra>, rows: [[(i64, i64); 4]; 4]) -> Result<Self> {
        Self::new(algebra, rows.map(|r| r.map(|(n, d)| frac(n, d))))
    }

    /// `Z<1, i, j, ij>`; requires integral alpha and beta.
    pub fn standard(algebra: &Arc<QuatAlgebra>) -> Result<Self> {
        let basis = std::array::from_fn(|a| std::array::from_fn(|k| rat((a == k) as i64)));
        Self::new(algebra, basis)
    }

    /// `M_2(Z)` inside `(1, 1)`, with basis the matrix units `E11, E12, E21, E22`
    /// under the splitting `a + bi + cj + dij -> [[a+b, c+d], [c-d, a-b]]`.
    /// Coordinates in this basis are the matrix entries in row-major order.
    pub fn matrix_ring() -> Self {
        let alg = QuatAlgebra::from_ints(1, 1).unwrap();
        Self::from_int_basis(
            &alg,
            [
                [(1, 2), (1, 2), (0, 1), (0, 1)],
                [(0, 1), (0, 1), (1, 2), (1, 2)],
                [(0, 1), (0, 1), (1, 2), (-1, 2)],
                [(1, 2), (-1, 2), (0, 1), (0, 1)],
            ],
        )
        .expect("matrix units form an order")
    }

    /// A maximal order of an algebra with integral parameters, obtained by
    /// maximalizing the standard order.
    pub fn maximal(algebra: &Arc<QuatAlgebra>) -> Result<Self> {
        Self::standard(algebra)?.maximalize()
    }

    pub fn algebra(&self) -> &Arc<QuatAlgebra> {
        &self.algebra
    }

    pub fn basis(&self) -> &[[Rational; 4]; 4] {
        &self.basis
    }

    pub fn basis_element(&self, a: usize) -> QuatElement {
        QuatElement::new(&self.algebra, self.basis[a].clone())
    }

    /// `Σ c_a e_a`.
    pub fn element(&self, c: &[i64; 4]) -> QuatElement {
        let coeffs = std::array::from_fn(|k| {
            (0..4).fold(Rational::zero(), |acc, a| acc + rat(c[a]) * &self.basis[a][k])
        });
        QuatElement::new(&self.algebra, coeffs)
    }

    /// Coordinates of `x` in the order basis (rational in general).
    pub fn coords(&self, x: &QuatElement) -> [Rational; 4] {
        let v = linalg::vec_mul(x.coeffs(), &self.inverse);
        std::array::from_fn(|k| v[k].clone())
    }

    pub fn int_coords(&self, x: &QuatElement) -> Option<[i64; 4]> {
        let c = self.coords(x);
        let mut out = [0i64; 4];
        for k in 0..4 {
            out[k] = arith::to_i64(&c[k])?;
        }
        Some(out)
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.coords(x).iter().all(arith::is_integer)
    }

    pub fn contains_order(&self, other: &LatticeOrder) -> bool {
        (0..4).all(|a| self.contains(&other.basis_element(a)))
    }

    /// `tr(e_a ē_b)`; the reduced norm in coordinates is `c^T G c / 2`.
    pub fn gram(&self) -> &[[i64; 4]; 4] {
        &self.gram
    }

    pub fn traces(&self) -> &[i64; 4] {
        &self.traces
    }

    pub fn norm_of(&self, c: &[i64; 4]) -> i64 {
        let mut s: i128 = 0;
        for a in 0..4 {
            for b in 0..4 {
                s += self.gram[a][b] as i128 * c[a] as i128 * c[b] as i128;
            }
        }
        (s / 2) as i64
    }

    pub fn trace_of(&self, c: &[i64; 4]) -> i64 {
        (0..4).map(|a| self.traces[a] * c[a]).sum()
    }

    /// Product in order coordinates, using integral structure constants.
    pub fn mul_coords(&self, x: &[i64; 4], y: &[i64; 4]) -> [i64; 4] {
        let mut out = [0i64; 4];
        for a in 0..4 {
            if x[a] == 0 {
                continue;
            }
            for b in 0..4 {
                if y[b] == 0 {
                    continue;
                }
                let s = x[a] * y[b];
                for k in 0..4 {
                    out[k] += s * self.table[a][b][k];
                }
            }
        }
        out
    }

    pub fn conj_coords(&self, x: &[i64; 4]) -> [i64; 4] {
        let mut out = [0i64; 4];
        for a in 0..4 {
            for k in 0..4 {
                out[k] += x[a] * self.conj[a][k];
            }
        }
        out
    }

    /// `D * (coefficients in 1, i, j, ij)` of `Σ c_a e_a`, with `D` the
    /// common denominator of the basis.
    pub fn scaled_coeffs(&self, c: &[i64; 4]) -> [i64; 4] {
        std::array::from_fn(|k| (0..4).map(|a| c[a] * self.scaled[a][k]).sum())
    }

    pub fn denominator(&self) -> i64 {
        self.denom
    }

    /// Coordinates of `1`.
    pub fn one_coords(&self) -> [i64; 4] {
        self.int_coords(&QuatElement::one(&self.algebra)).unwrap()
    }

    fn gram_det(&self) -> BigInt {
        let m: RatMatrix =
            self.gram.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        linalg::det(&m).to_integer()
    }

    /// Reduced discriminant: the positive square root of `|det tr(e_a ē_b)|`.
    pub fn reduced_discriminant(&self) -> BigInt {
        let d = self.gram_det().abs();
        let s = d.sqrt();
        debug_assert_eq!(&s * &s, d, "trace-form determinant of an order is a square");
        s
    }

    pub fn is_maximal(&self) -> bool {
        self.reduced_discriminant() == BigInt::from(hilbert::discriminant(&self.algebra))
    }

    /// Enlarges the order prime by prime until its reduced discriminant equals
    /// the algebra discriminant. At each step, for a prime `q` dividing the
    /// excess, the first `x = (Σ c_a e_a)/q` with `c ∈ {0..q-1}^4` (in
    /// lexicographic order) whose generated ring is still an order is adjoined.
    pub fn maximalize(&self) -> Result<Self> {
        let target = BigInt::from(hilbert::discriminant(&self.algebra));
        let mut cur = self.clone();
        loop {
            let disc = cur.reduced_discriminant();
            if disc == target {
                return Ok(cur);
            }
            let (excess, rem) = disc.div_rem(&target);
            if !rem.is_zero() {
                return Err(Error::NotAnOrder(format!(
                    "reduced discriminant {disc} is not a multiple of {target}"
                )));
            }
            let q = *arith::prime_divisors(&excess).first().expect("excess > 1");
            cur = cur.enlarge_at(q).ok_or_else(|| {
                Error::NotAnOrder(format!("no enlargement at {q} although disc is {disc}"))
            })?;
        }
    }

    fn enlarge_at(&self, q: u64) -> Option<Self> {
        let qi = q as i64;
        let qr = rat(qi);
        for idx in 1..q.pow(4) {
            let c: [i64; 4] = std::array::from_fn(|k| ((idx / q.pow(3 - k as u32)) % q) as i64);
            let x = self.element(&c).scale(&qr.recip());
            if !arith::is_integer(&x.reduced_trace()) || !arith::is_integer(&x.reduced_norm()) {
                continue;
            }
            if let Some(bigger) = self.adjoin(&x) {
                return Some(bigger);
            }
        }
        None
    }

    /// Ring generated by the order and `x`, if it is again an order.
    fn adjoin(&self, x: &QuatElement) -> Option<Self> {
        let mut gens: Vec<QuatElement> = (0..4).map(|a| self.basis_element(a)).collect();
        gens.push(x.clone());
        for _ in 0..16 {
            let basis = lattice_basis(&gens)?;
            let elems: Vec<QuatElement> =
                basis.iter().map(|r| QuatElement::new(&self.algebra, r.clone())).collect();
            for a in &elems {
                for b in &elems {
                    if !arith::is_integer(&(a * &b.conjugate()).reduced_trace()) {
                        return None;
                    }
                }
            }
            let candidate = LatticeOrder::new(&self.algebra, basis.clone()).ok();
            if let Some(o) = candidate {
                return Some(o);
            }
            let mut next = elems.clone();
            for a in &elems {
                for b in &elems {
                    next.push(a * b);
                }
            }
            gens = next;
        }
        None
    }

    /// `O ⊗ F_p -> M_2(F_p)`.
    pub fn split_mod_p(&self, p: u64) -> Result<ModPSplitting> {
        ModPSplitting::new(self, p)
    }

    pub fn to_json(&self) -> String {
        let j = OrderJson {
            algebra: (*self.algebra).clone(),
            basis: self.basis.iter().flatten().map(arith::format_rational).collect(),
        };
        serde_json::to_string(&j).expect("order serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: OrderJson = serde_json::from_str(s).map_err(|e| Error::InvalidInput(e.to_string()))?;
        if j.basis.len() != 16 {
            return Err(Error::InvalidInput(format!(
                "order basis needs 16 entries, got {}",
                j.basis.len()
            )));
        }
        let algebra = QuatAlgebra::new(j.algebra.alpha().clone(), j.algebra.beta().clone())?;
        let flat = j.basis.iter().map(|s| arith::parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let basis = std::array::from_fn(|a| std::array::from_fn(|k| flat[4 * a + k].clone()));
        Self::new(&algebra, basis)
    }
}

impl fmt::Display for LatticeOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "order in {} with basis", self.algebra)?;
        for a in 0..4 {
            write!(f, " [{}]", self.basis_element(a))?;
        }
        Ok(())
    }
}

/// HNF basis of the Z-span of `gens`, if it has rank 4.
fn lattice_basis(gens: &[QuatElement]) -> Option<[[Rational; 4]; 4]> {
    let den = arith::common_denominator(gens.iter().flat_map(|g| g.coeffs().iter()));
    let denr = Rational::from_integer(den.clone());
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| g.coeffs().iter().map(|c| (c * &denr).to_integer()).collect())
        .collect();
    let h = linalg::hnf(&rows);
    if h.len() != 4 {
        return None;
    }
    Some(std::array::from_fn(|a| {
        std::array::from_fn(|k| Rational::new(h[a][k].clone(), den.clone()))
    }))
}

/// Images of the order basis in `M_2(F_p)`.
#[derive(Clone, Debug)]
pub struct ModPSplitting {
    p: u64,
    images: [ModMat; 4],
}

impl ModPSplitting {
    /// Sends `i -> I = [[0, alpha], [1, 0]]` and `j -> J = [[x, -alpha z], [z, -x]]`
    /// where `(x, z)` is the first solution of `x^2 - alpha z^2 = beta` mod p
    /// found by exhaustive search, i.e. an isotropic vector of the ternary
    /// norm form on the pure quaternions.
    fn new(order: &LatticeOrder, p: u64) -> Result<Self> {
        let fail = |reason: String| Error::NoSplitting { p, reason };
        if p == 2 {
            return Err(fail("p = 2 is not supported".into()));
        }
        if !arith::is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        let alg = order.algebra();
        if hilbert::discriminant(alg) % p == 0 {
            return Err(fail("p divides the discriminant".into()));
        }
        let a = arith::rational_mod(alg.alpha(), p)?;
        let b = arith::rational_mod(alg.beta(), p)?;
        if a == 0 || b == 0 {
            return Err(fail("p divides alpha or beta; change presentation".into()));
        }
        let (x, z) = (0..p)
            .flat_map(|x| (0..p).map(move |z| (x, z)))
            .find(|&(x, z)| (x * x % p + p - a * (z * z % p) % p) % p == b)
            .ok_or_else(|| fail("no solution of x^2 - alpha z^2 = beta".into()))?;
        let one = ModMat::identity(p);
        let i = ModMat::new(p, [0, a, 1, 0]);
        let j = ModMat::new(p, [x, (p - a * z % p) % p, z, (p - x) % p]);
        let ij = i.mul(&j);
        let gens = [one, i, j, ij];
        let mut images = [ModMat::new(p, [0; 4]); 4];
        for (e, img) in images.iter_mut().enumerate() {
            let mut acc = ModMat::new(p, [0; 4]);
            for (k, g) in gens.iter().enumerate() {
                let c = arith::rational_mod(&order.basis()[e][k], p)?;
                acc = acc.add(&g.scale(c));
            }
            *img = acc;
        }
        let s = ModPSplitting { p, images };
        if !s.is_bijective() {
            return Err(fail("order basis does not span M_2(F_p)".into()));
        }
        Ok(s)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn images(&self) -> &[ModMat; 4] {
        &self.images
    }

    pub fn apply(&self, c: &[i64; 4]) -> ModMat {
        let p = self.p;
        self.images
            .iter()
            .zip(c)
            .fold(ModMat::new(p, [0; 4]), |acc, (m, &x)| acc.add(&m.scale(arith::mod_i64(x, p))))
    }

    pub fn apply_rep(&self, c: &[i64; 4]) -> MatrixRep2 {
        MatrixRep2::ModP(self.apply(c))
    }

    /// The 4x4 matrix of image entries is invertible mod p.
    pub fn is_bijective(&self) -> bool {
        let p = self.p as i64;
        let rows: Vec<Vec<BigInt>> =
            self.images.iter().map(|m| m.m.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let m: RatMatrix = rows
            .iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        let d = linalg::det(&m).to_integer();
        !d.mod_floor(&BigInt::from(p)).is_zero()
    }

    /// Number of `c ∈ F_p^4` whose image is invertible, by exhaustion.
    pub fn count_units(&self) -> u64 {
        let p = self.p as i64;
        let mut n = 0;
        for idx in 0..p.pow(4) {
            let c = [idx % p, (idx / p) % p, (idx / (p * p)) % p, idx / (p * p * p)];
            if self.apply(&c).det() != 0 {
                n += 1;
            }
        }
        n
    }
}

/// `tr(mu x ȳ)`. `mu^2` must be a negative rational scalar.
pub fn riemann_form(x: &QuatElement, y: &QuatElement, mu: &QuatElement) -> Result<Rational> {
    let sq = mu.try_mul(mu)?;
    if !sq.is_scalar() || !sq.coeffs()[0].is_negative() {
        return Err(Error::InvalidInput(format!("mu^2 = {sq} is not a negative scalar")));
    }
    Ok(mu.try_mul(x)?.try_mul(&y.conjugate())?.reduced_trace())
}

/// Smallest-height, then lexicographically smallest, element of the order
/// with trace 0 and norm `norm` (so `mu^2 = -norm`) inside `[-height, height]^4`.
pub fn find_mu(order: &LatticeOrder, norm: i64, height: i64) -> Option<[i64; 4]> {
    let mut best: Option<(i64, [i64; 4])> = None;
    let side = 2 * height + 1;
    for idx in 0..side.pow(4) {
        let c: [i64; 4] =
            std::array::from_fn(|k| (idx / side.pow(3 - k as u32)) % side - height);
        if order.trace_of(&c) != 0 || order.norm_of(&c) != norm {
            continue;
        }
        let h = c.iter().map(|x| x.abs()).max().unwrap();
        if best.map_or(true, |(bh, _)| h < bh) {
            best = Some((h, c));
        }
    }
    best.map(|(_, c)| c)
}
