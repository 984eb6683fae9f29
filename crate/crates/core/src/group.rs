//! Units of an order modulo ±1, principal congruence subgroups, torsion and
//! elliptic classes, all found by box enumeration in order coordinates.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quat::{LatticeOrder, ModPSplitting, QuatElement, RealEmbedding};

pub type Coords = [i64; 4];

/// Elements of `O` with reduced norm `norm` and coordinates in
/// `[-height, height]^4`, one per `±` pair, sorted. Zero is never listed.
pub fn enumerate_elements(order: &LatticeOrder, norm: i64, height: i64) -> Vec<Coords> {
    if height < 1 {
        return Vec::new();
    }
    let g = order.gram();
    let mut out: Vec<Coords> = (-height..=height)
        .into_par_iter()
        .flat_map_iter(|c0| {
            let mut found = Vec::new();
            for c1 in -height..=height {
                for c2 in -height..=height {
                    let head = [c0, c1, c2];
                    // 2N = g33 c3^2 + 2 l c3 + q0
                    let mut q0: i128 = 0;
                    let mut l: i128 = 0;
                    for a in 0..3 {
                        l += g[3][a] as i128 * head[a] as i128;
                        for b in 0..3 {
                            q0 += g[a][b] as i128 * head[a] as i128 * head[b] as i128;
                        }
                    }
                    let g33 = g[3][3] as i128;
                    let rhs = q0 - 2 * norm as i128;
                    for c3 in solve_quadratic(g33, 2 * l, rhs) {
                        if c3.abs() <= height as i128 {
                            let c = [c0, c1, c2, c3 as i64];
                            if c != [0; 4] {
                                found.push(c);
                            }
                        }
                    }
                }
            }
            found
        })
        .collect();
    for c in out.iter_mut() {
        *c = canonical_sign(order, c);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Integer roots of `a x^2 + b x + c = 0`.
fn solve_quadratic(a: i128, b: i128, c: i128) -> Vec<i128> {
    if a == 0 {
        if b == 0 {
            return Vec::new();
        }
        return if c % b == 0 { vec![-c / b] } else { Vec::new() };
    }
    let disc = b * b - 4 * a * c;
    if disc < 0 {
        return Vec::new();
    }
    let s = isqrt(disc);
    if s * s != disc {
        return Vec::new();
    }
    let mut roots = Vec::with_capacity(2);
    for num in [-b + s, -b - s] {
        if num % (2 * a) == 0 {
            roots.push(num / (2 * a));
        }
    }
    roots.dedup();
    roots
}

fn isqrt(n: i128) -> i128 {
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Sign making the first nonzero coefficient in `1, i, j, ij` positive.
pub fn canonical_sign(order: &LatticeOrder, c: &Coords) -> Coords {
    let s = order.scaled_coeffs(c);
    match s.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => c.map(|v| -v),
        _ => *c,
    }
}

/// A unit of positive norm modulo `±1` with its normalized real matrix.
#[derive(Clone, Debug)]
pub struct GroupElement {
    order: Arc<LatticeOrder>,
    coords: Coords,
    rep: QuatElement,
    matrix: [f64; 4],
}

impl GroupElement {
    pub fn new(order: &Arc<LatticeOrder>, embedding: &RealEmbedding, c: &Coords) -> Result<Self> {
        let coords = canonical_sign(order, c);
        let rep = order.element(&coords);
        let n = order.norm_of(&coords);
        if n <= 0 {
            return Err(Error::WrongElementType(format!("norm {n} is not positive")));
        }
        let m = embedding.apply_f64(rep.to_f64());
        let s = (n as f64).sqrt();
        Ok(GroupElement {
            order: Arc::clone(order),
            coords,
            rep,
            matrix: m.map(|x| x / s),
        })
    }

    pub fn order(&self) -> &Arc<LatticeOrder> {
        &self.order
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    pub fn rep(&self) -> &QuatElement {
        &self.rep
    }

    /// Image under the real embedding, scaled to determinant 1.
    pub fn matrix(&self) -> &[f64; 4] {
        &self.matrix
    }

    pub fn trace(&self) -> i64 {
        self.order.trace_of(&self.coords)
    }

    pub fn norm(&self) -> i64 {
        self.order.norm_of(&self.coords)
    }

    pub fn is_identity(&self) -> bool {
        self.coords == self.order.one_coords()
    }

    pub fn tag(&self, split: &ModPSplitting) -> CongruenceTag {
        CongruenceTag {
            p: split.p(),
            in_kernel: in_congruence_kernel(split, &self.coords),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CongruenceTag {
    pub p: u64,
    pub in_kernel: bool,
}

/// Image mod p is `±` a scalar. For norm-1 elements the scalar is `±1`.
pub fn in_congruence_kernel(split: &ModPSplitting, c: &Coords) -> bool {
    split.apply(c).is_scalar()
}

pub fn congruence_filter(elems: &[GroupElement], split: &ModPSplitting) -> Vec<GroupElement> {
    elems
        .iter()
        .filter(|g| in_congruence_kernel(split, g.coords()))
        .cloned()
        .collect()
}

/// Norm-1 elements of the box, as group elements.
pub fn unit_group(
    order: &Arc<LatticeOrder>,
    embedding: &RealEmbedding,
    height: i64,
) -> Result<Vec<GroupElement>> {
    enumerate_elements(order, 1, height)
        .iter()
        .map(|c| GroupElement::new(order, embedding, c))
        .collect()
}

pub fn unit_norm_minus_one(order: &LatticeOrder, height: i64) -> Option<Coords> {
    enumerate_elements(order, -1, height).into_iter().next()
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceTraceReport {
    pub p: u64,
    pub height: i64,
    pub kernel_size: usize,
    /// Minimal `|tr|` over nontrivial kernel elements with its witness.
    pub min_abs_trace: Option<(i64, Coords)>,
    /// Nontrivial kernel elements whose trace, after choosing the sign with
    /// `γ ≡ 1 mod p`, is not `2 mod p^2`.
    pub law_violations: Vec<Coords>,
}

/// Scans `Γ(p)` in the box for the minimal `|tr|` and checks `tr ≡ 2 mod p^2`.
pub fn congruence_traces(
    order: &LatticeOrder,
    split: &ModPSplitting,
    height: i64,
) -> CongruenceTraceReport {
    let p = split.p();
    let one = order.one_coords();
    let kernel: Vec<Coords> = enumerate_elements(order, 1, height)
        .into_iter()
        .filter(|c| in_congruence_kernel(split, c))
        .collect();
    let p2 = (p * p) as i64;
    let mut min: Option<(i64, Coords)> = None;
    let mut violations = Vec::new();
    for c in &kernel {
        if *c == one {
            continue;
        }
        let m = split.apply(c);
        // scalar image is ±1; flip to +1
        let tr = if m.m[0] == 1 { order.trace_of(c) } else { -order.trace_of(c) };
        if (tr - 2).rem_euclid(p2) != 0 {
            violations.push(*c);
        }
        let a = tr.abs();
        if min.map_or(true, |(b, _)| a < b) {
            min = Some((a, *c));
        }
    }
    CongruenceTraceReport {
        p,
        height,
        kernel_size: kernel.len(),
        min_abs_trace: min,
        law_violations: violations,
    }
}

pub fn min_congruence_trace(order: &LatticeOrder, split: &ModPSplitting, height: i64) -> Option<i64> {
    congruence_traces(order, split, height).min_abs_trace.map(|(t, _)| t)
}

/// `arcosh(tr(γ^2)/2)` with `tr(γ^2) = tr(γ)^2 - 2` for norm-1 `γ`.
pub fn displacement_lower(trace: f64) -> Result<f64> {
    if trace.abs() <= 2.0 {
        return Err(Error::WrongElementType(format!(
            "|tr| = {} is not hyperbolic",
            trace.abs()
        )));
    }
    Ok(((trace * trace - 2.0) / 2.0).acosh())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TorsionKind {
    /// `t^2 = -1`: trace 0.
    Order4,
    /// `t^2 ∓ t + 1 = 0`: trace `±1`.
    Order6,
}

impl TorsionKind {
    pub fn of_trace(trace: i64) -> Option<Self> {
        match trace.abs() {
            0 => Some(TorsionKind::Order4),
            1 => Some(TorsionKind::Order6),
            _ => None,
        }
    }

    fn matches(self, trace: i64) -> bool {
        match self {
            TorsionKind::Order4 => trace == 0,
            TorsionKind::Order6 => trace.abs() == 1,
        }
    }

    pub fn order_in_group(self) -> u32 {
        match self {
            TorsionKind::Order4 => 2,
            TorsionKind::Order6 => 3,
        }
    }
}

pub fn torsion_coords(order: &LatticeOrder, kind: TorsionKind, height: i64) -> Vec<Coords> {
    enumerate_elements(order, 1, height)
        .into_iter()
        .filter(|c| kind.matches(order.trace_of(c)))
        .collect()
}

pub fn torsion_elements(
    order: &Arc<LatticeOrder>,
    embedding: &RealEmbedding,
    kind: TorsionKind,
    height: i64,
) -> Result<Vec<GroupElement>> {
    torsion_coords(order, kind, height)
        .iter()
        .map(|c| GroupElement::new(order, embedding, c))
        .collect()
}

/// Conjugation `u x u^{-1}` for a norm-1 `u`.
pub fn conjugate_by(order: &LatticeOrder, u: &Coords, x: &Coords) -> Coords {
    order.mul_coords(&order.mul_coords(u, x), &order.conj_coords(u))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Classes of maximal finite cyclic subgroups of `Γ` of order 2 and 3 under
/// conjugation by the norm-1 units of the box, each class given by its
/// sorted members. Torsion elements are taken from the same box, so the
/// classes stabilize once the box holds representatives of every class and
/// enough conjugators to connect them.
pub fn elliptic_classes(order: &LatticeOrder, height: i64) -> Vec<(TorsionKind, Vec<Coords>)> {
    let units = enumerate_elements(order, 1, height);
    let mut out = Vec::new();
    for kind in [TorsionKind::Order4, TorsionKind::Order6] {
        let tors: Vec<Coords> = units
            .iter()
            .filter(|c| kind.matches(order.trace_of(c)))
            .copied()
            .collect();
        let index: BTreeMap<Coords, usize> =
            tors.iter().enumerate().map(|(k, c)| (*c, k)).collect();
        let index = &index;
        let mut uf = UnionFind((0..tors.len()).collect());
        for (k, t) in tors.iter().enumerate() {
            // t and its inverse generate the same subgroup
            let inv = canonical_sign(order, &order.conj_coords(t));
            if let Some(&m) = index.get(&inv) {
                uf.union(k, m);
            }
        }
        let merges: Vec<(usize, usize)> = tors
            .par_iter()
            .enumerate()
            .flat_map_iter(|(k, t)| {
                units.iter().filter_map(move |u| {
                    let s = canonical_sign(order, &conjugate_by(order, u, t));
                    index.get(&s).map(|&m| (k, m))
                })
            })
            .collect();
        for (a, b) in merges {
            uf.union(a, b);
        }
        let mut classes: BTreeMap<usize, Vec<Coords>> = BTreeMap::new();
        for (k, t) in tors.iter().enumerate() {
            classes.entry(uf.find(k)).or_default().push(*t);
        }
        let mut classes: Vec<Vec<Coords>> = classes.into_values().collect();
        for c in classes.iter_mut() {
            c.sort_by_key(|x| (height_of(x), *x));
        }
        classes.sort_by_key(|c| (height_of(&c[0]), c[0]));
        out.extend(classes.into_iter().map(|c| (kind, c)));
    }
    out
}

/// Largest absolute coordinate.
pub fn height_of(c: &Coords) -> i64 {
    c.iter().map(|x| x.abs()).max().unwrap_or(0)
}

pub fn elliptic_class_counts(order: &LatticeOrder, height: i64) -> (usize, usize) {
    let classes = elliptic_classes(order, height);
    let n4 = classes.iter().filter(|(k, _)| *k == TorsionKind::Order4).count();
    (n4, classes.len() - n4)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentStructure {
    pub components: u32,
    pub norm_minus_one_witness: Option<Coords>,
    /// The answer 2 rests on not finding a norm -1 unit in the box.
    pub one_sided: bool,
}

/// One copy of `H±` when a norm -1 unit exists and -1 is not a square mod p,
/// two otherwise.
pub fn component_structure(order: &LatticeOrder, p: u64, height: i64) -> ComponentStructure {
    let witness = unit_norm_minus_one(order, height);
    let components = if witness.is_some() && p % 4 == 3 { 1 } else { 2 };
    ComponentStructure {
        components,
        norm_minus_one_witness: witness,
        one_sided: witness.is_none() && p % 4 == 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::QuatAlgebra;

    fn d6() -> Arc<LatticeOrder> {
        Arc::new(LatticeOrder::maximal(&QuatAlgebra::from_ints(-1, 3).unwrap()).unwrap())
    }

    #[test]
    fn quadratic_roots() {
        assert_eq!(solve_quadratic(1, 0, -4), vec![2, -2]);
        assert_eq!(solve_quadratic(0, 2, -4), vec![2]);
        assert!(solve_quadratic(1, 0, 2).is_empty());
    }

    #[test]
    fn enumeration_matches_bruteforce() {
        let o = d6();
        for n in [1, -1, 5] {
            let fast = enumerate_elements(&o, n, 3);
            let mut slow = Vec::new();
            for idx in 0..7i64.pow(4) {
                let c: Coords = std::array::from_fn(|k| (idx / 7i64.pow(k as u32)) % 7 - 3);
                if o.norm_of(&c) == n {
                    slow.push(canonical_sign(&o, &c));
                }
            }
            slow.sort_unstable();
            slow.dedup();
            assert_eq!(fast, slow, "norm {n}");
        }
    }

    #[test]
    fn no_norm_zero_in_division_algebra() {
        assert!(enumerate_elements(&d6(), 0, 3).is_empty());
        assert!(enumerate_elements(&d6(), 1, 0).is_empty());
    }

    #[test]
    fn displacement() {
        assert!((displacement_lower(27.0).unwrap() - 363.5f64.acosh()).abs() < 1e-12);
        assert!(displacement_lower(2.0).is_err());
    }

    #[test]
    fn matrix_ring_classes() {
        assert_eq!(elliptic_class_counts(&LatticeOrder::matrix_ring(), 4), (1, 1));
        assert_eq!(elliptic_class_counts(&LatticeOrder::matrix_ring(), 0), (0, 0));
    }
}
