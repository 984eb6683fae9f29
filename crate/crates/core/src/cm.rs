//! CM points, the Heegner/anti-Heegner split of pairs of them, Hecke element
//! sets, and the linear system behind the repulsion of Heegner pairs.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, Rational};
use crate::error::{Error, Result};
use crate::group::{
    canonical_sign, conjugate_by, elliptic_classes, enumerate_elements, height_of, Coords,
    GroupElement, TorsionKind,
};
use crate::hyper::{dist, moebius_act, HPoint, ProductPoint};
use crate::linalg::{self, RatMatrix};
use crate::quat::{LatticeOrder, ModMat, ModPSplitting, QuatElement, RealEmbedding};

const EIGEN_TOL: f64 = 1e-8;

/// Fixed point in the upper half-plane of an elliptic real matrix.
pub fn fixed_point_of(m: &[f64; 4]) -> Result<HPoint> {
    let [a, b, c, d] = *m;
    let det = a * d - b * c;
    let tr = a + d;
    if !(det > 0.0) || tr.abs() >= 2.0 * det.sqrt() {
        return Err(Error::WrongElementType(format!(
            "elliptic (trace {tr}, determinant {det})"
        )));
    }
    // c z^2 + (d - a) z - b = 0, discriminant tr^2 - 4 det < 0
    let im = (4.0 * det - tr * tr).sqrt() / (2.0 * c.abs());
    HPoint::uhp(Complex64::new((a - d) / (2.0 * c), im))
}

pub fn fixed_point(t: &GroupElement) -> Result<HPoint> {
    fixed_point_of(t.matrix())
}

/// `(c z + d)/|c z + d|`.
pub fn eigenvalue_at(m: &[f64; 4], z: Complex64) -> Complex64 {
    let v = m[2] * z + m[3];
    v / v.norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    Heegner,
    AntiHeegner,
}

impl Label {
    pub fn flipped(self) -> Self {
        match self {
            Label::Heegner => Label::AntiHeegner,
            Label::AntiHeegner => Label::Heegner,
        }
    }
}

/// A fixed point of a torsion unit `t` together with the tangent eigenvalue
/// of a chosen lift `±t`. With `conjugated` set the point is `z̄` in the
/// lower half-plane and the eigenvalue is conjugated.
#[derive(Clone, Debug)]
pub struct CMPoint {
    pub stabilizer: GroupElement,
    /// The lift is `lift_sign · stabilizer`.
    pub lift_sign: i64,
    /// Always stored in the upper half-plane.
    pub fixed_point: HPoint,
    pub eigenvalue: Complex64,
    pub conjugated: bool,
}

impl CMPoint {
    /// Lift chosen with eigenvalue in the upper half circle.
    pub fn new(t: GroupElement) -> Result<Self> {
        let p = Self::with_lift(t, 1)?;
        if p.eigenvalue.im < 0.0 {
            Self::with_lift(p.stabilizer, -1)
        } else {
            Ok(p)
        }
    }

    pub fn with_lift(t: GroupElement, lift_sign: i64) -> Result<Self> {
        if TorsionKind::of_trace(t.trace()).is_none() || t.norm() != 1 {
            return Err(Error::WrongElementType("a torsion unit".into()));
        }
        let z = fixed_point(&t)?;
        let m = t.matrix().map(|x| x * lift_sign as f64);
        Ok(CMPoint {
            eigenvalue: eigenvalue_at(&m, z.value()),
            stabilizer: t,
            lift_sign,
            fixed_point: z,
            conjugated: false,
        })
    }

    pub fn kind(&self) -> TorsionKind {
        TorsionKind::of_trace(self.stabilizer.trace()).expect("checked at construction")
    }

    pub fn lift_coords(&self) -> Coords {
        self.stabilizer.coords().map(|x| x * self.lift_sign)
    }

    /// The point as a complex number, in the lower half-plane if conjugated.
    pub fn value(&self) -> Complex64 {
        let z = self.fixed_point.value();
        if self.conjugated {
            z.conj()
        } else {
            z
        }
    }

    /// The same lift acting at `z̄`.
    pub fn flip(&self) -> Self {
        CMPoint {
            eigenvalue: self.eigenvalue.conj(),
            conjugated: !self.conjugated,
            ..self.clone()
        }
    }
}

/// Heegner iff the first eigenvalue equals the second raised to `exponent`.
pub fn classify_pair(first: &CMPoint, second: &CMPoint, exponent: i32) -> Result<Label> {
    if first.kind() != second.kind() {
        return Err(Error::InvalidInput("stabilizers of different orders".into()));
    }
    let target = match exponent {
        1 => second.eigenvalue,
        -1 => second.eigenvalue.conj(),
        e => return Err(Error::InvalidInput(format!("exponent must be ±1, got {e}"))),
    };
    if (first.eigenvalue - target).norm() < EIGEN_TOL {
        Ok(Label::Heegner)
    } else if (first.eigenvalue - target.conj()).norm() < EIGEN_TOL {
        Ok(Label::AntiHeegner)
    } else {
        Err(Error::EigenInconsistent {
            first: first.eigenvalue.to_string(),
            second: second.eigenvalue.to_string(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct CMPair {
    pub first: CMPoint,
    pub second: CMPoint,
    /// `u` with `second = u · first` and stabilizer `u t u^{-1}`.
    pub conjugator: GroupElement,
    pub level: u64,
    /// `u t u^{-1} ≡ t^exponent` exactly mod p.
    pub exponent: i32,
    pub label: Label,
    /// Index of the torsion class of the first stabilizer in the scan.
    pub class_index: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CMPairRecord {
    pub class_index: usize,
    pub kind: TorsionKind,
    pub t: Coords,
    pub u: Coords,
    pub exponent: i32,
    pub label: Label,
    pub level: u64,
    pub first: [f64; 2],
    pub second: [f64; 2],
    pub eigenvalue_first: [f64; 2],
    pub eigenvalue_second: [f64; 2],
}

impl CMPair {
    pub fn record(&self) -> CMPairRecord {
        let c = |z: Complex64| [z.re, z.im];
        CMPairRecord {
            class_index: self.class_index,
            kind: self.first.kind(),
            t: self.first.lift_coords(),
            u: *self.conjugator.coords(),
            exponent: self.exponent,
            label: self.label,
            level: self.level,
            first: c(self.first.value()),
            second: c(self.second.value()),
            eigenvalue_first: c(self.first.eigenvalue),
            eigenvalue_second: c(self.second.eigenvalue),
        }
    }

    /// Label of `(z̄, w)` with the same lifts.
    pub fn flipped_label(&self) -> Result<Label> {
        classify_pair(&self.first.flip(), &self.second, self.exponent)
    }
}

/// Second point of a pair: the stabilizer `u t u^{-1}` with the lift induced
/// from the lift of `t`.
fn conjugate_point(
    order: &Arc<LatticeOrder>,
    emb: &RealEmbedding,
    first: &CMPoint,
    u: &Coords,
) -> Result<CMPoint> {
    let s = conjugate_by(order, u, &first.lift_coords());
    let ge = GroupElement::new(order, emb, &s)?;
    let sign = if *ge.coords() == s { 1 } else { -1 };
    CMPoint::with_lift(ge, sign)
}

/// Powers `T^0, ..., T^{n-1}` of a torsion matrix mod p.
fn powers(t: &ModMat) -> Vec<ModMat> {
    let mut out = vec![ModMat::identity(t.p)];
    let mut x = *t;
    while !(x == ModMat::identity(t.p)) {
        out.push(x);
        x = x.mul(t);
    }
    out
}

/// Canonical key of the double coset `<T> U <T>` in `PGL_2(F_p)`.
fn double_coset_key(tp: &[ModMat], u: &ModMat) -> ModMat {
    tp.iter()
        .flat_map(|a| tp.iter().map(move |b| a.mul(u).mul(b).projective_key()))
        .min()
        .unwrap()
}

/// Exponent `e` with `u t u^{-1} ≡ t^e` mod p, if any.
fn congruence_exponent(order: &LatticeOrder, split: &ModPSplitting, t: &Coords, u: &Coords) -> Option<i32> {
    let s = split.apply(&conjugate_by(order, u, t));
    if s == split.apply(t) {
        Some(1)
    } else if s == split.apply(&order.conj_coords(t)) {
        Some(-1)
    } else {
        None
    }
}

/// Pairs `(z_t, u z_t)` with `u t u^{-1} ≡ t^{±1}` mod p, one for each
/// torsion class in the box and each double coset `<t> u <t>` mod p.
pub fn cm_pair_scan(order: &Arc<LatticeOrder>, p: u64, height: i64) -> Result<Vec<CMPair>> {
    let split = order.split_mod_p(p)?;
    let emb = RealEmbedding::new(order.algebra())?;
    let units = enumerate_elements(order, 1, height);
    let classes = elliptic_classes(order, height);
    let mut out = Vec::new();
    for (class_index, (_, members)) in classes.iter().enumerate() {
        let t = GroupElement::new(order, &emb, &members[0])?;
        let first = CMPoint::new(t)?;
        let lt = first.lift_coords();
        let tp = powers(&split.apply(&lt));
        let found: Vec<(ModMat, Coords, i32)> = units
            .par_iter()
            .filter_map(|u| {
                let e = congruence_exponent(order, &split, &lt, u)?;
                Some((double_coset_key(&tp, &split.apply(u)), *u, e))
            })
            .collect();
        let mut best: BTreeMap<ModMat, (Coords, i32)> = BTreeMap::new();
        for (key, u, e) in found {
            let entry = best.entry(key).or_insert((u, e));
            if (height_of(&u), u) < (height_of(&entry.0), entry.0) {
                *entry = (u, e);
            }
        }
        for (u, e) in best.into_values() {
            let second = conjugate_point(order, &emb, &first, &u)?;
            let label = classify_pair(&first, &second, e)?;
            out.push(CMPair {
                first: first.clone(),
                second,
                conjugator: GroupElement::new(order, &emb, &u)?,
                level: p,
                exponent: e,
                label,
                class_index,
            });
        }
    }
    Ok(out)
}

/// Norm-`m` elements of the box up to left multiplication by norm-1 units.
#[derive(Clone, Debug, Serialize)]
pub struct HeckeSet {
    pub m: i64,
    pub height: i64,
    pub elements: Vec<Coords>,
    /// Real matrices of the elements scaled to determinant 1.
    #[serde(skip)]
    pub matrices: Vec<[f64; 4]>,
    /// Degree of `T_m`.
    pub expected: u64,
}

impl HeckeSet {
    pub fn from_elements(order: &Arc<LatticeOrder>, m: i64, elements: Vec<Coords>) -> Result<Self> {
        let emb = RealEmbedding::new(order.algebra())?;
        let mut matrices = Vec::with_capacity(elements.len());
        for c in &elements {
            if order.norm_of(c) != m {
                return Err(Error::InvalidInput(format!("{c:?} does not have norm {m}")));
            }
            matrices.push(*GroupElement::new(order, &emb, c)?.matrix());
        }
        Ok(HeckeSet {
            m,
            height: elements.iter().map(height_of).max().unwrap_or(0),
            elements,
            matrices,
            expected: degree_law(m as u64),
        })
    }

    pub fn height_limited(&self) -> bool {
        (self.elements.len() as u64) < self.expected
    }
}

/// `x ~ y` iff `y x^{-1} = y x̄ / m` lies in the order.
pub fn left_unit_equivalent(order: &LatticeOrder, m: i64, x: &Coords, y: &Coords) -> bool {
    order
        .mul_coords(y, &order.conj_coords(x))
        .iter()
        .all(|v| v % m == 0)
}

pub fn hecke_elements(order: &Arc<LatticeOrder>, m: i64, height: i64) -> Result<HeckeSet> {
    if m < 1 {
        return Err(Error::InvalidInput(format!("m = {m} must be positive")));
    }
    let disc = order.reduced_discriminant();
    if !arith::to_i64(&Rational::from_integer(disc.clone()))
        .map_or(false, |d| d.gcd(&m) == 1)
    {
        return Err(Error::InvalidInput(format!("m = {m} is not coprime to {disc}")));
    }
    let mut elems = enumerate_elements(order, m, height);
    elems.sort_by_key(|c| (height_of(c), *c));
    let mut reps: Vec<Coords> = Vec::new();
    for c in elems {
        if !reps.iter().any(|r| left_unit_equivalent(order, m, r, &c)) {
            reps.push(c);
        }
    }
    let mut set = HeckeSet::from_elements(order, m, reps)?;
    set.height = height;
    Ok(set)
}

/// `∏_{q^e || n} (q^e + q^{e-1})`.
pub fn degree_law(n: u64) -> u64 {
    arith::factor(n)
        .into_iter()
        .map(|(q, e)| q.pow(e) + q.pow(e - 1))
        .product()
}

/// Number of left ideals of `M_2(Z/n)` that are free of rank 2 over `Z/n`,
/// counted through their row spaces: rank-one free direct summands of
/// `(Z/n)^2` generated by the rows of some matrix.
pub fn submodule_count(n: u64, disc: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} must be at least 2")));
    }
    if n.gcd(&disc) != 1 {
        return Err(Error::InvalidInput(format!("n = {n} shares a factor with {disc}")));
    }
    let nn = n as usize;
    let spaces: HashSet<Vec<u32>> = (0..nn * nn * nn * nn)
        .into_par_iter()
        .filter_map(|idx| {
            let r1 = (idx % nn, (idx / nn) % nn);
            let r2 = ((idx / (nn * nn)) % nn, idx / (nn * nn * nn));
            let mut span = BTreeSet::new();
            for a in 0..nn {
                for b in 0..nn {
                    let x = (a * r1.0 + b * r2.0) % nn;
                    let y = (a * r1.1 + b * r2.1) % nn;
                    span.insert((x * nn + y) as u32);
                }
            }
            if span.len() != nn {
                return None;
            }
            // free of rank one: generated by a vector of additive order n
            let free = span.iter().any(|&v| {
                let (x, y) = ((v as usize) / nn, (v as usize) % nn);
                x.gcd(&y).gcd(&nn) == 1
            });
            free.then(|| span.into_iter().collect())
        })
        .collect();
    Ok(spaces.len() as u64)
}

/// Whether some element `g` of the set moves `z` within `r` of `w`.
pub fn hecke_tube_contains(m: i64, r: f64, point: &ProductPoint, hecke: &HeckeSet) -> Result<bool> {
    if hecke.m != m {
        return Err(Error::InvalidInput(format!("Hecke set has m = {}, not {m}", hecke.m)));
    }
    if !(r > 0.0) {
        return Ok(false);
    }
    let z = point.first.to_uhp();
    let w = point.second.to_uhp();
    for g in &hecke.matrices {
        if dist(&moebius_act(g, &z)?, &w)? < r {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Solutions `g` of `g t = t g` and `h_z g h_w t = t h_z g h_w`.
#[derive(Clone, Debug)]
pub enum RepulsionSolution {
    /// A line: primitive generator in the order and its norm.
    Line { g: Coords, element: QuatElement, m: i64 },
    /// The second relation is implied by the first; basis of the common
    /// solution space.
    Redundant { basis: Vec<QuatElement> },
    /// Only `g = 0`.
    Degenerate { system: RatMatrix },
}

impl RepulsionSolution {
    pub fn solution_dim(&self) -> usize {
        match self {
            RepulsionSolution::Line { .. } => 1,
            RepulsionSolution::Redundant { basis } => basis.len(),
            RepulsionSolution::Degenerate { .. } => 0,
        }
    }
}

fn unit_check(x: &QuatElement, what: &str) -> Result<()> {
    if x.reduced_norm() != Rational::from_integer(1.into()) {
        return Err(Error::WrongElementType(format!("{what} of norm 1")));
    }
    Ok(())
}

pub fn commutator_residuals(
    t: &QuatElement,
    h_z: &QuatElement,
    h_w: &QuatElement,
    g: &QuatElement,
) -> Result<[QuatElement; 2]> {
    let a = g.try_mul(t)?.try_sub(&t.try_mul(g)?)?;
    let k = h_z.try_mul(g)?.try_mul(h_w)?;
    let b = k.try_mul(t)?.try_sub(&t.try_mul(&k)?)?;
    Ok([a, b])
}

pub fn repulsion_solve(
    order: &LatticeOrder,
    t: &QuatElement,
    h_z: &QuatElement,
    h_w: &QuatElement,
) -> Result<RepulsionSolution> {
    unit_check(t, "a torsion unit")?;
    let tr = t.reduced_trace();
    if !(tr.is_zero() || tr.abs() == Rational::from_integer(1.into())) {
        return Err(Error::WrongElementType("a torsion unit".into()));
    }
    unit_check(h_z, "a unit")?;
    unit_check(h_w, "a unit")?;
    let alg = t.algebra();
    let basis: Vec<QuatElement> = (0..4)
        .map(|k| {
            let mut c = [0i64; 4];
            c[k] = 1;
            QuatElement::from_ints(alg, c)
        })
        .collect();
    let mut system: RatMatrix = vec![Vec::with_capacity(4); 8];
    for e in &basis {
        let [a, b] = commutator_residuals(t, h_z, h_w, e)?;
        for k in 0..4 {
            system[k].push(a.coeffs()[k].clone());
            system[4 + k].push(b.coeffs()[k].clone());
        }
    }
    let null = linalg::nullspace(&system, 4);
    let to_element = |v: &[Rational]| {
        QuatElement::new(alg, std::array::from_fn(|k| v[k].clone()))
    };
    match null.len() {
        0 => Ok(RepulsionSolution::Degenerate { system }),
        1 => {
            let x = to_element(&null[0]);
            let oc = order.coords(&x);
            let den = arith::common_denominator(oc.iter());
            let ints: Vec<_> = oc.iter().map(|q| (q * &den).to_integer()).collect();
            let gcd = linalg::gcd_all(&ints);
            let mut g = [0i64; 4];
            for k in 0..4 {
                g[k] = arith::to_i64(&Rational::from_integer(&ints[k] / &gcd))
                    .ok_or_else(|| Error::InvalidInput("solution coefficients overflow".into()))?;
            }
            let g = canonical_sign(order, &g);
            Ok(RepulsionSolution::Line {
                element: order.element(&g),
                m: order.norm_of(&g),
                g,
            })
        }
        _ => Ok(RepulsionSolution::Redundant {
            basis: null.iter().map(|v| to_element(v)).collect(),
        }),
    }
}

/// One witness `(t, g, h_z, h_w)` of two close Heegner pairs
/// `(z, g z)` and `(h_z z, g h_w z)`.
#[derive(Clone, Debug, Serialize)]
pub struct RepulsionEntry {
    pub class_index: usize,
    pub t: Coords,
    pub g: Coords,
    pub h_z: Coords,
    pub h_w: Coords,
    pub solution_dim: usize,
    pub delta: Option<Coords>,
    pub m: Option<i64>,
    /// Both relations hold exactly for the returned generator.
    pub relations_exact: bool,
    /// `(z, g z)` lies on `T_m`.
    pub first_on_hecke: bool,
    /// `(h_z z, g h_w z)` lies on `T_m`.
    pub second_on_hecke: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RepulsionReport {
    pub p: u64,
    pub r: f64,
    pub height: i64,
    pub heegner_pairs: usize,
    pub entries: Vec<RepulsionEntry>,
    pub max_m: Option<i64>,
    pub redundant_hits: usize,
    pub degenerate_hits: usize,
    /// Line solutions with neither pair on `T_m`.
    pub off_hecke: usize,
}

const TUBE_TOL: f64 = 1e-6;
const LIFT_FACTOR: f64 = 4.0;

/// `k` realizes a point of `T_m` at `z`: `k` is a scalar mod p and
/// `k z = w` within the tube tolerance.
fn on_hecke(
    order: &Arc<LatticeOrder>,
    split: &ModPSplitting,
    k: &Coords,
    z: &HPoint,
    w: &HPoint,
) -> Result<bool> {
    let m = order.norm_of(k);
    let img = split.apply(k);
    if !img.is_scalar() || img.m[0] == 0 {
        return Ok(false);
    }
    let set = HeckeSet::from_elements(order, m, vec![*k])?;
    let point = ProductPoint {
        first: *z,
        second: *w,
        second_conjugated: false,
    };
    hecke_tube_contains(m, TUBE_TOL, &point, &set)
}

/// Close pairs of distinct Heegner CM points and the Hecke degrees the
/// repulsion system assigns to them. Lifts are taken within `4r` of each
/// other in each coordinate, which covers every pair whose `r`-balls meet.
pub fn repulsion_experiment(order: &Arc<LatticeOrder>, p: u64, r: f64, height: i64) -> Result<RepulsionReport> {
    let split = order.split_mod_p(p)?;
    let emb = RealEmbedding::new(order.algebra())?;
    let scan = cm_pair_scan(order, p, height)?;
    let units = enumerate_elements(order, 1, height);
    let heegner: Vec<&CMPair> = scan.iter().filter(|c| c.label == Label::Heegner).collect();
    let mut entries = Vec::new();
    let mut seen = BTreeSet::new();
    for pair in &heegner {
        let t = pair.first.lift_coords();
        let z = pair.first.fixed_point;
        let tp = powers(&split.apply(&t));
        let t_keys: BTreeSet<ModMat> = tp.iter().map(|x| x.projective_key()).collect();
        // right multiplication by the stabilizer does not move z
        let stab: Vec<Coords> = {
            let mut out = vec![order.one_coords()];
            let mut x = t;
            while x != order.one_coords() && x.map(|v| -v) != order.one_coords() {
                out.push(x);
                x = order.mul_coords(&x, &t);
            }
            out
        };
        let reduce = |h: &Coords| {
            stab.iter()
                .map(|s| canonical_sign(order, &order.mul_coords(h, s)))
                .min()
                .unwrap()
        };
        let mut near: Vec<Coords> = Vec::new();
        for u in &units {
            let ge = GroupElement::new(order, &emb, u)?;
            if dist(&moebius_act(ge.matrix(), &z)?, &z)? < LIFT_FACTOR * r {
                near.push(reduce(u));
            }
        }
        near.sort();
        near.dedup();
        let g = *pair.conjugator.coords();
        let t_el = order.element(&t);
        for hz in &near {
            for hw in &near {
                let in_stab = |h: &Coords| t_keys.contains(&split.apply(h).projective_key());
                if in_stab(hz) && in_stab(hw) {
                    continue;
                }
                let hz_inv = order.conj_coords(hz);
                let k = order.mul_coords(&order.mul_coords(&hz_inv, &g), hw);
                if congruence_exponent(order, &split, &t, &k) != Some(1) {
                    continue;
                }
                if !seen.insert((pair.class_index, g, *hz, *hw)) {
                    continue;
                }
                let sol = repulsion_solve(order, &t_el, &order.element(&hz_inv), &order.element(hw))?;
                let mut entry = RepulsionEntry {
                    class_index: pair.class_index,
                    t,
                    g,
                    h_z: *hz,
                    h_w: *hw,
                    solution_dim: sol.solution_dim(),
                    delta: None,
                    m: None,
                    relations_exact: false,
                    first_on_hecke: false,
                    second_on_hecke: false,
                };
                if let RepulsionSolution::Line { g: delta, element, m } = &sol {
                    let res = commutator_residuals(&t_el, &order.element(&hz_inv), &order.element(hw), element)?;
                    entry.relations_exact = res.iter().all(|x| x.is_zero());
                    entry.delta = Some(*delta);
                    entry.m = Some(*m);
                    let dbar = order.conj_coords(delta);
                    // (z, g z) is realized by g δ̄, which fixes nothing but maps z to g z
                    let k1 = order.mul_coords(&g, &dbar);
                    let gz = moebius_act(pair.conjugator.matrix(), &z)?;
                    entry.first_on_hecke = on_hecke(order, &split, &k1, &z, &gz)?;
                    // (h_z z, g h_w z) is realized by g h_w δ̄ h_z^{-1}
                    let k2 = order.mul_coords(&order.mul_coords(&order.mul_coords(&g, hw), &dbar), &hz_inv);
                    let hzm = GroupElement::new(order, &emb, hz)?;
                    let ghw = GroupElement::new(order, &emb, &order.mul_coords(&g, hw))?;
                    let z2 = moebius_act(hzm.matrix(), &z)?;
                    let w2 = moebius_act(ghw.matrix(), &z)?;
                    entry.second_on_hecke = on_hecke(order, &split, &k2, &z2, &w2)?;
                }
                entries.push(entry);
            }
        }
    }
    Ok(RepulsionReport {
        p,
        r,
        height,
        heegner_pairs: heegner.len(),
        max_m: entries.iter().filter_map(|e| e.m).max(),
        redundant_hits: entries.iter().filter(|e| e.solution_dim == 2).count(),
        degenerate_hits: entries.iter().filter(|e| e.solution_dim == 0).count(),
        off_hecke: entries
            .iter()
            .filter(|e| e.solution_dim == 1 && !(e.first_on_hecke || e.second_on_hecke))
            .count(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::QuatAlgebra;

    fn d6() -> Arc<LatticeOrder> {
        Arc::new(LatticeOrder::maximal(&QuatAlgebra::from_ints(-1, 3).unwrap()).unwrap())
    }

    #[test]
    fn classical_fixed_points() {
        let z = fixed_point_of(&[0.0, -1.0, 1.0, 0.0]).unwrap();
        assert!((z.value() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let z = fixed_point_of(&[1.0, -1.0, 1.0, 0.0]).unwrap();
        assert!((z.value() - Complex64::new(0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
        assert!(fixed_point_of(&[2.0, 1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn degree_law_values() {
        assert_eq!(degree_law(5), 6);
        assert_eq!(degree_law(6), 12);
        assert_eq!(degree_law(4), 6);
        assert_eq!(degree_law(1), 1);
    }

    #[test]
    fn submodules_small() {
        assert_eq!(submodule_count(5, 1).unwrap(), 6);
        assert_eq!(submodule_count(4, 1).unwrap(), 6);
        assert_eq!(submodule_count(6, 1).unwrap(), 12);
        assert!(submodule_count(5, 10).is_err());
    }

    #[test]
    fn repulsion_trivial_units() {
        let o = d6();
        let alg = o.algebra();
        let t = o.element(&elliptic_classes(&o, 6)[0].1[0]);
        let one = QuatElement::one(alg);
        let sol = repulsion_solve(&o, &t, &one, &one).unwrap();
        assert_eq!(sol.solution_dim(), 2);
        // t itself lies in the centralizer
        let sol = repulsion_solve(&o, &t, &t, &t.conjugate()).unwrap();
        assert_eq!(sol.solution_dim(), 2);
    }

    #[test]
    fn fixed_point_equivariance() {
        let o = d6();
        let emb = RealEmbedding::new(o.algebra()).unwrap();
        let units = enumerate_elements(&o, 1, 3);
        for (_, cl) in elliptic_classes(&o, 6) {
            let t = GroupElement::new(&o, &emb, &cl[0]).unwrap();
            let z = fixed_point(&t).unwrap();
            for u in &units {
                let s = GroupElement::new(&o, &emb, &conjugate_by(&o, u, &cl[0])).unwrap();
                let ug = GroupElement::new(&o, &emb, u).unwrap();
                let moved = moebius_act(ug.matrix(), &z).unwrap();
                assert!((fixed_point(&s).unwrap().value() - moved.value()).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn scan_has_both_labels_and_flips() {
        let o = d6();
        let scan = cm_pair_scan(&o, 5, 12).unwrap();
        assert!(scan.iter().any(|c| c.label == Label::Heegner));
        assert!(scan.iter().any(|c| c.label == Label::AntiHeegner));
        for c in &scan {
            assert_eq!(c.flipped_label().unwrap(), c.label.flipped());
            if c.conjugator.is_identity() {
                assert_eq!(c.label, Label::Heegner);
            }
        }
    }

    #[test]
    fn order3_inverse_exponent_is_anti() {
        let o = d6();
        let emb = RealEmbedding::new(o.algebra()).unwrap();
        let (_, cl) = elliptic_classes(&o, 6)
            .into_iter()
            .find(|(k, _)| *k == TorsionKind::Order6)
            .unwrap();
        let p = CMPoint::new(GroupElement::new(&o, &emb, &cl[0]).unwrap()).unwrap();
        assert_eq!(classify_pair(&p, &p, 1).unwrap(), Label::Heegner);
        assert_eq!(classify_pair(&p, &p, -1).unwrap(), Label::AntiHeegner);
    }

    #[test]
    fn repulsion_generic_line() {
        let o = d6();
        let t = elliptic_classes(&o, 6)[0].1[0];
        let h = enumerate_elements(&o, 1, 3)
            .into_iter()
            .find(|u| o.mul_coords(u, &t) != o.mul_coords(&t, u))
            .unwrap();
        let (te, he) = (o.element(&t), o.element(&h));
        // with h_w = 1 a solution g would force h_z into Q(t)
        let one = QuatElement::one(o.algebra());
        assert_eq!(repulsion_solve(&o, &te, &he, &one).unwrap().solution_dim(), 0);
        // h_w = h_z^{-1}: only scalars survive
        let hinv = he.conjugate();
        let sol = repulsion_solve(&o, &te, &he, &hinv).unwrap();
        let RepulsionSolution::Line { g, element, m } = sol else {
            panic!("expected a line, got {sol:?}");
        };
        assert_eq!((g, m), (o.one_coords(), 1));
        assert!(commutator_residuals(&te, &he, &hinv, &element)
            .unwrap()
            .iter()
            .all(|x| x.is_zero()));
    }

    #[test]
    fn tube_basics() {
        let o = d6();
        let one = HeckeSet::from_elements(&o, 1, vec![o.one_coords()]).unwrap();
        let pt = ProductPoint {
            first: HPoint::uhp(Complex64::new(0.0, 1.0)).unwrap(),
            second: HPoint::uhp(Complex64::new(0.0, 2.0)).unwrap(),
            second_conjugated: false,
        };
        assert!(hecke_tube_contains(1, 0.7, &pt, &one).unwrap());
        assert!(!hecke_tube_contains(1, 0.69, &pt, &one).unwrap());
        assert!(!hecke_tube_contains(1, 0.0, &pt, &one).unwrap());
    }

    #[test]
    fn hecke_identity_class() {
        let o = d6();
        let h = hecke_elements(&o, 1, 6).unwrap();
        assert_eq!(h.elements.len(), 1);
        assert!(hecke_elements(&o, 3, 6).is_err());
    }
}
