//! Genus accounting for level-p Shimura curves and for curves on the
//! diagonal quotient: finite group orders, the bundled catalog of base
//! curves, level genera by multiplicativity of the orbifold Euler
//! characteristic, the two Riemann–Hurwitz bounds, surjectivity of the
//! mod-p monodromy and the threshold scan.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{frac, is_prime, mod_i64, primes_in, rat, Rational};
use crate::cm::degree_law;
use crate::error::{Error, Result};
use crate::group::{
    component_structure, elliptic_class_counts, enumerate_elements, unit_group, GroupElement, TorsionKind,
};
use crate::quat::{discriminant, is_indefinite, LatticeOrder, ModMat, ModPSplitting, QuatAlgebra, RealEmbedding};
use crate::volume::{incidence_budget_minus, incidence_budget_plus, BudgetConstants};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GroupOrders {
    pub gl2: u128,
    pub pgl2: u128,
    pub psl2: u128,
}

/// Orders of `GL_2`, `PGL_2` and `PSL_2` over `F_p`.
pub fn group_orders(p: u64) -> Result<GroupOrders> {
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let q = p as u128;
    let gl2 = (q * q - 1) * (q * q - q);
    let pgl2 = gl2 / (q - 1);
    let psl2 = pgl2 / if p == 2 { 1 } else { 2 };
    Ok(GroupOrders { gl2, pgl2, psl2 })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveInvariants {
    pub discriminant: i64,
    /// Presentation `(alpha, beta)` of the algebra, used for cross-checks.
    pub alpha: i64,
    pub beta: i64,
    pub genus: u32,
    pub e2: u32,
    pub e3: u32,
    /// Box height at which enumerated elliptic classes reach `(e2, e3)`.
    pub height: i64,
    pub source: String,
}

impl CurveInvariants {
    /// `2 - 2g - e2/2 - 2e3/3`.
    pub fn orbifold_euler(&self) -> Rational {
        rat(2 - 2 * self.genus as i64) - frac(self.e2 as i64, 2) - frac(2 * self.e3 as i64, 3)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.discriminant <= 1 {
            return Err("discriminant must exceed 1".into());
        }
        if !self.orbifold_euler().is_negative() {
            return Err("orbifold Euler characteristic is not negative".into());
        }
        if self.source.trim().is_empty() {
            return Err("missing source".into());
        }
        let alg = QuatAlgebra::from_ints(self.alpha, self.beta).map_err(|e| e.to_string())?;
        if !is_indefinite(&alg) || discriminant(&alg) as i64 != self.discriminant {
            return Err(format!(
                "({}, {}) is not an indefinite algebra of discriminant {}",
                self.alpha, self.beta, self.discriminant
            ));
        }
        Ok(())
    }
}

pub const CATALOG_JSON: &str = include_str!("../../../data/catalog.json");

#[derive(Clone, Debug, Serialize)]
pub struct Catalog {
    records: BTreeMap<i64, CurveInvariants>,
}

impl Catalog {
    /// Parses and validates every record; the error names each bad one.
    pub fn load(json: &str) -> Result<Self> {
        let raw: Vec<serde_json::Value> =
            serde_json::from_str(json).map_err(|e| Error::Catalog(format!("not a JSON array: {e}")))?;
        let mut records = BTreeMap::new();
        let mut bad = Vec::new();
        for (k, v) in raw.into_iter().enumerate() {
            let rec: CurveInvariants = match serde_json::from_value(v) {
                Ok(r) => r,
                Err(e) => {
                    bad.push(format!("record {k}: {e}"));
                    continue;
                }
            };
            if let Err(e) = rec.validate() {
                bad.push(format!("record {k} (d={}): {e}", rec.discriminant));
            } else if records.insert(rec.discriminant, rec).is_some() {
                bad.push(format!("record {k}: duplicate discriminant"));
            }
        }
        if !bad.is_empty() {
            return Err(Error::Catalog(bad.join("; ")));
        }
        Ok(Catalog { records })
    }

    pub fn bundled() -> Result<Self> {
        Self::load(CATALOG_JSON)
    }

    pub fn lookup(&self, d: i64) -> Result<&CurveInvariants> {
        self.records.get(&d).ok_or(Error::NotInCatalog(d))
    }

    pub fn records(&self) -> impl Iterator<Item = &CurveInvariants> {
        self.records.values()
    }
}

pub fn catalog_lookup(d: i64) -> Result<CurveInvariants> {
    Catalog::bundled()?.lookup(d).cloned()
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogCheck {
    pub discriminant: i64,
    pub declared: (u32, u32),
    pub enumerated: (usize, usize),
    pub height: i64,
    pub agrees: bool,
}

/// Elliptic class counts of the maximal order against the record.
pub fn catalog_cross_check(rec: &CurveInvariants) -> Result<CatalogCheck> {
    let alg = QuatAlgebra::from_ints(rec.alpha, rec.beta)?;
    let order = LatticeOrder::maximal(&alg)?;
    let enumerated = elliptic_class_counts(&order, rec.height);
    Ok(CatalogCheck {
        discriminant: rec.discriminant,
        declared: (rec.e2, rec.e3),
        enumerated,
        height: rec.height,
        agrees: enumerated == (rec.e2 as usize, rec.e3 as usize),
    })
}

/// A catalog record with its maximal order, reused across primes.
#[derive(Clone, Debug)]
pub struct GenusContext {
    pub record: CurveInvariants,
    pub order: Arc<LatticeOrder>,
    torsion_traces: BTreeSet<i64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelGenus {
    pub d: i64,
    pub p: u64,
    pub components: u32,
    pub genus_per_component: u64,
    /// Index of the level subgroup in the projective unit group.
    pub degree: u128,
    pub orbifold_euler: String,
    /// The component count rests on not finding a norm -1 unit.
    pub one_sided_components: bool,
}

impl GenusContext {
    pub fn new(record: &CurveInvariants) -> Result<Self> {
        let alg = QuatAlgebra::from_ints(record.alpha, record.beta)?;
        let order = Arc::new(LatticeOrder::maximal(&alg)?);
        let torsion_traces = enumerate_elements(&order, 1, record.height)
            .iter()
            .map(|c| order.trace_of(c))
            .filter(|&t| TorsionKind::of_trace(t).is_some())
            .collect();
        Ok(GenusContext {
            record: record.clone(),
            order,
            torsion_traces,
        })
    }

    pub fn from_catalog(d: i64) -> Result<Self> {
        Self::new(&catalog_lookup(d)?)
    }

    pub fn level_genus(&self, p: u64) -> Result<LevelGenus> {
        let d = self.record.discriminant;
        if p == 2 || !is_prime(p) || d % p as i64 == 0 {
            return Err(Error::InvalidInput(format!("need an odd prime p not dividing {d}, got {p}")));
        }
        // a level-p unit has trace ≡ ±2 (mod p); a torsion trace never is
        if let Some(t) = self
            .torsion_traces
            .iter()
            .find(|&&t| mod_i64(t - 2, p) == 0 || mod_i64(t + 2, p) == 0)
        {
            return Err(Error::InvalidInput(format!("torsion of trace {t} survives at level {p}")));
        }
        let degree = group_orders(p)?.psl2;
        let chi = self.record.orbifold_euler();
        // 2g - 2 = -deg · χ^orb
        let two_g_minus_two = -chi.clone() * Rational::from_integer(degree.into());
        if !two_g_minus_two.is_integer() || !(two_g_minus_two.numer() % 2u8).is_zero() {
            return Err(Error::Convention(format!(
                "2g - 2 = {two_g_minus_two} is not an even integer (d={d}, p={p}, deg={degree})"
            )));
        }
        let g = two_g_minus_two.to_integer() / 2u8 + 1u8;
        let cs = component_structure(&self.order, p, self.record.height);
        Ok(LevelGenus {
            d,
            p,
            components: cs.components,
            genus_per_component: u64::try_from(&g)
                .map_err(|_| Error::Convention(format!("genus {g} out of range")))?,
            degree,
            orbifold_euler: chi.to_string(),
            one_sided_components: cs.one_sided,
        })
    }
}

pub fn level_genus(d: i64, p: u64) -> Result<LevelGenus> {
    GenusContext::from_catalog(d)?.level_genus(p)
}

/// `½ (C·F)(g - 1)`.
pub fn genus_lower(c_dot_f: u128, genus_level: u64) -> Rational {
    Rational::from_integer(c_dot_f.into()) * (rat(genus_level as i64) - rat(1)) / rat(2)
}

/// `1 + deg(α)(g_V - 1) + mult_CM/2`.
pub fn genus_upper(deg_alpha: u128, g_v: u64, mult_cm: f64) -> f64 {
    1.0 + deg_alpha as f64 * (g_v as f64 - 1.0) + 0.5 * mult_cm
}

/// `C·F = |G|(C'·F')`.
pub fn bidegree_identity(c_prime_dot_f: u128, group_order: u128) -> u128 {
    c_prime_dot_f * group_order
}

#[derive(Clone, Debug, Serialize)]
pub struct NoriReport {
    pub p: u64,
    pub generators: usize,
    pub image_order: u64,
    /// `|PSL_2|` when every generator has square determinant, `|PGL_2|`
    /// otherwise.
    pub target_order: u64,
    pub surjective: bool,
}

/// Closure of the images of `gens` in `PGL_2(F_p)`, breadth first from the
/// identity.
pub fn nori_check(gens: &[GroupElement], split: &ModPSplitting) -> Result<NoriReport> {
    let p = split.p();
    let images: Vec<ModMat> = gens.iter().map(|g| split.apply(g.coords())).collect();
    let all_square = images
        .iter()
        .all(|m| crate::arith::legendre(m.det() as i64, p) == 1);
    let orders = group_orders(p)?;
    let target = if all_square { orders.psl2 } else { orders.pgl2 } as u64;
    let start = ModMat::identity(p).projective_key();
    let mut seen = BTreeSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in &images {
            let y = x.mul(g).projective_key();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let image_order = seen.len() as u64;
    Ok(NoriReport {
        p,
        generators: gens.len(),
        image_order,
        target_order: target,
        surjective: image_order == target,
    })
}

/// Units of height at most `height` other than `±1`.
pub fn unit_generators(order: &Arc<LatticeOrder>, height: i64) -> Result<Vec<GroupElement>> {
    let emb = RealEmbedding::new(order.algebra())?;
    Ok(unit_group(order, &emb, height)?
        .into_iter()
        .filter(|g| !g.is_identity())
        .collect())
}

/// Constants of the threshold scan. The budget constants stand in for the
/// implicit constants of the incidence bounds and are echoed in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdConstants {
    #[serde(flatten)]
    pub budget: BudgetConstants,
    /// Tube radius `R = radius_log_factor · ln p`, a multiple of the
    /// injectivity-radius lower bound.
    pub radius_log_factor: f64,
    /// `C'·F'` of the weakest non-Hecke curve.
    pub c_prime_dot_f: u128,
    pub p_max: u64,
}

impl Default for ThresholdConstants {
    fn default() -> Self {
        ThresholdConstants {
            budget: BudgetConstants::default(),
            radius_log_factor: 1.0,
            c_prime_dot_f: 1,
            p_max: 100_000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub k: u64,
    pub d: i64,
    pub p_threshold: u64,
    pub genus_level: u64,
    pub lower: f64,
    pub upper: f64,
    pub mult_cm: f64,
    /// Which finite group `|G(F_p)|` denotes.
    pub group_convention: &'static str,
    pub group_order: u128,
    pub assumptions: ThresholdConstants,
}

/// One prime of the scan: `(lower, upper, mult_CM, genus, |G|)`.
fn threshold_terms(
    ctx: &GenusContext,
    k: u64,
    p: u64,
    c: &ThresholdConstants,
) -> Result<(Rational, f64, f64, u64, u128)> {
    let d = ctx.record.discriminant;
    let lg = ctx.level_genus(p)?;
    let group = group_orders(p)?.pgl2;
    let cf = bidegree_identity(c.c_prime_dot_f, group);
    let lower = genus_lower(cf, lg.genus_per_component);
    // vol(C) is modeled by C·K = (2g - 2)(C·F)
    let vol_c = (2.0 * lg.genus_per_component as f64 - 2.0) * cf as f64;
    let big_r = c.radius_log_factor * (p as f64).ln();
    let deg_tm: Vec<u64> = (1..d.max(1) as u64).map(degree_law).collect();
    let mult = incidence_budget_plus(vol_c, big_r, d as u32, p, &c.budget)
        + incidence_budget_minus(vol_c, big_r, d as u32, p, &deg_tm, &c.budget);
    let upper = genus_upper(group, k - 1, mult);
    Ok((lower, upper, mult, lg.genus_per_component, group))
}

/// Smallest prime `p ≥ 5`, `p ∤ d`, with `genus_lower > genus_upper` for the
/// weakest non-Hecke curve of genus below `k`.
pub fn threshold_search(k: u64, d: i64, c: &ThresholdConstants) -> Result<ThresholdReport> {
    if k < 1 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let ctx = GenusContext::from_catalog(d)?;
    for p in primes_in(5, c.p_max) {
        if d % p as i64 == 0 {
            continue;
        }
        let (lower, upper, mult, g, group) = threshold_terms(&ctx, k, p, c)?;
        let lower = crate::arith::to_f64(&lower);
        if lower > upper {
            return Ok(ThresholdReport {
                k,
                d,
                p_threshold: p,
                genus_level: g,
                lower,
                upper,
                mult_cm: mult,
                group_convention: "pgl2",
                group_order: group,
                assumptions: c.clone(),
            });
        }
    }
    Err(Error::RangeExhausted(format!(
        "no p <= {} separates the bounds for k={k}, d={d}",
        c.p_max
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::QuatAlgebra;

    fn brute_gl2(p: u64) -> u128 {
        let mut n = 0;
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        if (a * d + p * p - b * c) % p != 0 {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    #[test]
    fn group_orders_small() {
        let o = group_orders(5).unwrap();
        assert_eq!((o.gl2, o.pgl2, o.psl2), (480, 120, 60));
        assert_eq!(group_orders(2).unwrap().gl2, 6);
        for p in [2, 3, 5, 7] {
            assert_eq!(group_orders(p).unwrap().gl2, brute_gl2(p));
        }
        assert!(group_orders(9).is_err());
        let ratios: Vec<f64> = [5u64, 7, 11, 13, 101, 1009]
            .iter()
            .map(|&p| group_orders(p).unwrap().pgl2 as f64 / (p as f64).powi(3))
            .collect();
        assert!(ratios.windows(2).all(|w| w[0] < w[1] && w[1] < 1.0));
    }

    #[test]
    fn catalog_guards() {
        let cat = Catalog::bundled().unwrap();
        assert_eq!(cat.lookup(6).unwrap().e2, 2);
        assert!(matches!(cat.lookup(1), Err(Error::NotInCatalog(1))));
        let bad = r#"[{"discriminant": 6, "alpha": -1, "beta": 3, "genus": 0, "e2": 2, "e3": 2, "height": 4, "source": "x"},
                      {"discriminant": 15, "alpha": -1, "beta": 3, "genus": 1, "e2": 0, "e3": 0, "height": 4, "source": "x"},
                      {"discriminant": 10}]"#;
        let Err(Error::Catalog(msg)) = Catalog::load(bad) else { panic!() };
        assert!(msg.contains("record 1") && msg.contains("record 2") && !msg.contains("record 0"), "{msg}");
    }

    #[test]
    fn level_genus_d6() {
        let ctx = GenusContext::from_catalog(6).unwrap();
        let g: Vec<u64> = [5, 7, 11, 13].iter().map(|&p| ctx.level_genus(p).unwrap().genus_per_component).collect();
        assert_eq!(g, vec![11, 29, 111, 183]);
        assert!(ctx.level_genus(3).is_err());
    }

    #[test]
    fn riemann_hurwitz_forms() {
        assert_eq!(genus_lower(2, 2), rat(1));
        assert_eq!(genus_lower(6, 5), rat(3) * genus_lower(2, 5));
        // ¼ C·K with K = (2g - 2)F
        let (cf, g) = (7u128, 9u64);
        assert_eq!(genus_lower(cf, g), rat(((2 * g - 2) as u128 * cf) as i64) / rat(4));
        assert_eq!(genus_upper(1, 1, 0.0), 1.0);
        assert_eq!(genus_upper(3, 2, 4.0) - genus_upper(3, 2, 0.0), 2.0);
        assert!(genus_upper(1, 0, 0.0) < 1.0);
        assert_eq!(bidegree_identity(1, 480), 480);
        assert_eq!(bidegree_identity(3, 2 * 480), 2 * bidegree_identity(3, 480));
    }

    #[test]
    fn nori_small_cases() {
        let alg = QuatAlgebra::from_ints(-1, 3).unwrap();
        let order = Arc::new(LatticeOrder::maximal(&alg).unwrap());
        let split = order.split_mod_p(5).unwrap();
        let gens = unit_generators(&order, 2).unwrap();
        let full = nori_check(&gens, &split).unwrap();
        assert!(full.surjective, "{full:?}");
        assert_eq!(full.image_order, 60);
        let elliptic: Vec<GroupElement> = gens.iter().filter(|g| g.trace() == 0).take(1).cloned().collect();
        let cyclic = nori_check(&elliptic, &split).unwrap();
        assert_eq!((cyclic.image_order, cyclic.surjective), (2, false));
        assert_eq!(nori_check(&[], &split).unwrap().image_order, 1);
    }

    #[test]
    fn threshold_zero_constants() {
        let c = ThresholdConstants {
            budget: BudgetConstants {
                c1: 0.0,
                c2: 0.0,
                c_r: 0.0,
            },
            ..Default::default()
        };
        // with no budget, ½|G|(g - 1) > 1 + |G|(k - 2) already at p = 5
        assert_eq!(threshold_search(2, 6, &c).unwrap().p_threshold, 5);
    }
}
