//! Volume inequalities for curves in `D x D`: closed-form bounds, numerical
//! harnesses on a small zoo of explicit curves, and the incidence budgets
//! built from them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cm::{hecke_elements, hecke_tube_contains, HeckeSet};
use crate::error::{Error, Result};
use crate::group::{height_of, GroupElement};
use crate::hyper::curve::{curve_volume, geodesic_point, Chart, CurveKind, ParamCurve, QuadratureOptions};
use crate::hyper::potential::psi;
use crate::hyper::{disk_dist, HPoint, Mobius, Normalization, ProductPoint};
use crate::quat::{LatticeOrder, QuatAlgebra, RealEmbedding};

/// `4π sinh²(r/2) · mult`.
pub fn ht_point_bound(r: f64, mult: u32) -> f64 {
    4.0 * PI * (r / 2.0).sinh().powi(2) * mult as f64
}

/// `8π sinh²(r/4) · (C·Δ)`.
pub fn ht_diagonal_bound(r: f64, intersections: u32) -> f64 {
    8.0 * PI * (r / 4.0).sinh().powi(2) * intersections as f64
}

/// Same constant as the diagonal bound; `m` only labels the correspondence.
pub fn ht_hecke_bound(r: f64, _m: i64, intersections: u32) -> f64 {
    ht_diagonal_bound(r, intersections)
}

/// `sinh(R/2)/sinh(r/2)`; `r = R` gives 1.
pub fn conj_ratio_bound(r: f64, big_r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= big_r) {
        return Err(Error::InvalidInput(format!("need 0 < r <= R, got r={r}, R={big_r}")));
    }
    Ok((big_r / 2.0).sinh() / (r / 2.0).sinh())
}

/// The implicit constants of the incidence budgets. None of them is derived;
/// all default to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BudgetConstants {
    /// Ball term.
    pub c1: f64,
    /// Hecke-curve term of the Heegner budget.
    pub c2: f64,
    /// `O_R(1)` of the conjugate-tube term.
    pub c_r: f64,
}

impl Default for BudgetConstants {
    fn default() -> Self {
        BudgetConstants {
            c1: 1.0,
            c2: 1.0,
            c_r: 1.0,
        }
    }
}

fn sinh_inv_sq(x: f64) -> f64 {
    x.sinh().powi(-2)
}

/// `vol_C · (c1 sinh^{-2}(R/2) + c2 d^3 sinh^{-2}(p/2))`.
pub fn incidence_budget_plus(vol_c: f64, big_r: f64, d: u32, p: u64, k: &BudgetConstants) -> f64 {
    vol_c * (k.c1 * sinh_inv_sq(big_r / 2.0) + k.c2 * (d as f64).powi(3) * sinh_inv_sq(p as f64 / 2.0))
}

/// `vol_C · (c1 sinh^{-2}(R/2) + c_R csch(log p) Σ_{m<d} deg(T_m)^2)`, using
/// `vol(T_m^* C) = deg(T_m) vol(C)`. `deg_tm[k]` is the degree of `T_{k+1}`.
pub fn incidence_budget_minus(
    vol_c: f64,
    big_r: f64,
    d: u32,
    p: u64,
    deg_tm: &[u64],
    k: &BudgetConstants,
) -> f64 {
    let hecke: f64 = deg_tm
        .iter()
        .take(d.saturating_sub(1) as usize)
        .map(|&g| (g * g) as f64)
        .sum();
    let decay = 1.0 / (p as f64).ln().sinh();
    vol_c * (k.c1 * sinh_inv_sq(big_r / 2.0) + k.c_r * decay * hecke)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ZooEntry {
    Fiber { tag: String, z0: [f64; 2] },
    /// Graph of `z -> e^{iθ} z`.
    Rotation { tag: String, angle_over_pi: f64 },
    /// Graph of the normalized image of a norm-`m` element of the maximal
    /// order of `(alpha, beta)`: the class representative of smallest
    /// `|trace|`, then smallest height.
    Hecke { tag: String, alpha: i64, beta: i64, m: i64 },
}

/// A curve of the zoo with its declared intersection data.
#[derive(Clone, Debug, Serialize)]
pub struct ZooCurve {
    pub tag: String,
    pub kind: CurveKind,
    /// `C·Δ`; `None` when the curve is the diagonal itself.
    pub diag_intersections: Option<u32>,
}

impl ZooCurve {
    pub fn is_fiber(&self) -> bool {
        matches!(self.kind, CurveKind::Fiber { .. })
    }

    /// The curve point over the parameter `u`.
    pub fn at(&self, u: Complex64) -> (Complex64, Complex64) {
        let (z, w, _, _) = self.kind.point(u);
        (z, w)
    }

    fn with_charts(&self, charts: Vec<Chart>) -> ParamCurve {
        ParamCurve {
            tag: self.tag.clone(),
            kind: self.kind.clone(),
            charts,
        }
    }
}

pub const ZOO_JSON: &str = include_str!("../../../data/zoo.json");

/// Fixed point in the disk of an elliptic disk automorphism.
fn disk_fixed_point(g: &Mobius) -> Option<Complex64> {
    let [a, b, c, d] = g.m;
    if c.norm() < 1e-14 {
        // fixes 0 when b = 0
        return (b.norm() < 1e-14 && (a - d).norm() > 1e-14).then(|| Complex64::new(0.0, 0.0));
    }
    let disc = ((d - a) * (d - a) + 4.0 * b * c).sqrt();
    [(a - d + disc) / (2.0 * c), (a - d - disc) / (2.0 * c)]
        .into_iter()
        .find(|u| u.norm() < 1.0 - 1e-12)
}

pub fn load_zoo(json: &str) -> Result<Vec<ZooCurve>> {
    let entries: Vec<ZooEntry> =
        serde_json::from_str(json).map_err(|e| Error::InvalidInput(format!("curve zoo: {e}")))?;
    entries.into_iter().map(build_zoo_curve).collect()
}

pub fn default_zoo() -> Result<Vec<ZooCurve>> {
    load_zoo(ZOO_JSON)
}

fn build_zoo_curve(entry: ZooEntry) -> Result<ZooCurve> {
    match entry {
        ZooEntry::Fiber { tag, z0 } => Ok(ZooCurve {
            tag,
            kind: CurveKind::Fiber { z0 },
            diag_intersections: Some(1),
        }),
        ZooEntry::Rotation { tag, angle_over_pi } => Ok(ZooCurve {
            tag,
            kind: CurveKind::Graph {
                g: Mobius::rotation(angle_over_pi * PI),
            },
            diag_intersections: (angle_over_pi.rem_euclid(2.0) != 0.0).then_some(1),
        }),
        ZooEntry::Hecke { tag, alpha, beta, m } => {
            let alg = QuatAlgebra::from_ints(alpha, beta)?;
            let order = Arc::new(LatticeOrder::maximal(&alg)?);
            let set = hecke_elements(&order, m, 4)?;
            let best = set
                .elements
                .iter()
                .min_by_key(|c| (order.trace_of(c).abs(), height_of(c), **c))
                .ok_or_else(|| Error::InvalidInput(format!("no norm-{m} elements")))?;
            let emb = RealEmbedding::new(&alg)?;
            let ge = GroupElement::new(&order, &emb, best)?;
            let g = Mobius::from_real_uhp(ge.matrix());
            let elliptic = order.trace_of(best).pow(2) < 4 * m;
            Ok(ZooCurve {
                tag,
                kind: CurveKind::Graph { g },
                diag_intersections: Some(elliptic as u32),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Point,
    Diag,
    Hecke,
    Conj,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub bound: BoundKind,
    pub curve: String,
    pub r: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub big_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    /// Declared multiplicity or intersection number.
    pub multiplicity: u32,
    pub bound_value: f64,
    pub measured_value: f64,
    pub margin: f64,
    /// Quadrature uncertainty of `measured_value`.
    pub tolerance: f64,
    pub holds: bool,
    pub normalization: Normalization,
    pub mesh: usize,
    /// Tube volumes `(r, R)` for ratio reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tube_volumes: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundReport {
    #[allow(clippy::too_many_arguments)]
    fn new(
        bound: BoundKind,
        curve: &str,
        r: f64,
        multiplicity: u32,
        bound_value: f64,
        measured_value: f64,
        tolerance: f64,
        normalization: Normalization,
        mesh: usize,
    ) -> Self {
        let margin = measured_value - bound_value;
        BoundReport {
            bound,
            curve: curve.to_string(),
            r,
            big_r: None,
            m: None,
            multiplicity,
            bound_value,
            measured_value,
            margin,
            tolerance,
            holds: margin >= -tolerance,
            normalization,
            mesh,
            tube_volumes: None,
            note: None,
        }
    }
}

const CHART_PAD: f64 = 0.05;

fn tolerance_of(delta: f64, value: f64) -> f64 {
    delta + 1e-12 * value.abs().max(1.0)
}

/// `vol(C ∩ B(center, r))` for the product distance `sqrt(d_1² + d_2²)`
/// against `4π sinh²(r/2) mult`.
pub fn verify_point_bound(
    curve: &ZooCurve,
    center: &ProductPoint,
    r: f64,
    mult: u32,
    norm: Normalization,
    opts: &QuadratureOptions,
) -> Result<BoundReport> {
    let (zc, wc) = center.coords();
    let r1 = r / norm.dist_scale();
    // the ball forces the free coordinate within r of the center
    let chart_center = if curve.is_fiber() { wc } else { zc };
    let pc = curve.with_charts(vec![Chart::polar(chart_center, r1 + CHART_PAD)]);
    let region = move |z: Complex64, w: Complex64| {
        norm.dist(z, zc).hypot(norm.dist(w, wc)) < r
    };
    let v = curve_volume(&pc, &region, norm, opts)?;
    Ok(BoundReport::new(
        BoundKind::Point,
        &curve.tag,
        r,
        mult,
        ht_point_bound(r, mult),
        v.value,
        tolerance_of(v.refinement_delta, v.value),
        norm,
        v.mesh,
    ))
}

/// `vol(C ∩ W_r)` with `W_r = {d(z, w) < r}` against `8π sinh²(r/4) (C·Δ)`,
/// for fibers and graphs of elliptic isometries.
pub fn verify_diag(curve: &ZooCurve, r: f64, norm: Normalization, opts: &QuadratureOptions) -> Result<BoundReport> {
    let n = curve
        .diag_intersections
        .ok_or_else(|| Error::InvalidInput(format!("{} lies in the diagonal", curve.tag)))?;
    let r1 = r / norm.dist_scale();
    let chart = match &curve.kind {
        CurveKind::Fiber { z0 } => Chart::polar(Complex64::new(z0[0], z0[1]), r1 + CHART_PAD),
        CurveKind::Graph { g } => {
            let Some(u) = disk_fixed_point(g) else {
                return Ok(BoundReport {
                    note: Some("no fixed point: C·Δ = 0 and the bound is 0".into()),
                    ..BoundReport::new(BoundKind::Diag, &curve.tag, r, 0, 0.0, 0.0, 0.0, norm, 0)
                });
            };
            // d(u, g u) = 2 asinh(sinh ρ sin(θ/2)) for a rotation by θ about u
            let theta = g.derivative(u).arg().abs();
            let rho = ((r1 / 2.0).sinh() / (theta / 2.0).sin()).asinh();
            Chart::polar(u, rho + CHART_PAD)
        }
    };
    let pc = curve.with_charts(vec![chart]);
    let region = move |z: Complex64, w: Complex64| norm.dist(z, w) < r;
    let v = curve_volume(&pc, &region, norm, opts)?;
    Ok(BoundReport::new(
        BoundKind::Diag,
        &curve.tag,
        r,
        n,
        ht_diagonal_bound(r, n),
        v.value,
        tolerance_of(v.refinement_delta, v.value),
        norm,
        v.mesh,
    ))
}

/// `vol(C ∩ W^m_r)` on a fiber `{z0} x D`, counted as a multiset: one disk
/// around each Hecke image of `z0`. The fiber meets `T_m` in `deg T_m`
/// points.
pub fn verify_hecke(
    curve: &ZooCurve,
    hecke: &HeckeSet,
    r: f64,
    norm: Normalization,
    opts: &QuadratureOptions,
) -> Result<BoundReport> {
    let CurveKind::Fiber { z0 } = curve.kind else {
        return Err(Error::InvalidInput("the Hecke harness takes fiber curves".into()));
    };
    let z0 = Complex64::new(z0[0], z0[1]);
    let r1 = r / norm.dist_scale();
    let zp = HPoint::disk(z0)?;
    let mut total = 0.0;
    let mut delta = 0.0;
    let mut mesh = 0;
    for (e, mat) in hecke.elements.iter().zip(&hecke.matrices) {
        let single = HeckeSet {
            elements: vec![*e],
            matrices: vec![*mat],
            ..hecke.clone()
        };
        let image = crate::hyper::moebius_act(mat, &zp)?.value();
        let pc = curve.with_charts(vec![Chart::polar(image, r1 + CHART_PAD)]);
        let m = hecke.m;
        let region = move |z: Complex64, w: Complex64| {
            let Ok(point) = ProductPoint::disk(z, w, false) else {
                return false;
            };
            hecke_tube_contains(m, r1, &point, &single).unwrap_or(false)
        };
        let v = curve_volume(&pc, &region, norm, opts)?;
        total += v.value;
        delta += v.refinement_delta;
        mesh = mesh.max(v.mesh);
    }
    let n = hecke.expected as u32;
    let mut rep = BoundReport::new(
        BoundKind::Hecke,
        &curve.tag,
        r,
        n,
        ht_hecke_bound(r, hecke.m, n),
        total,
        tolerance_of(delta, total),
        norm,
        mesh,
    );
    rep.m = Some(hecke.m);
    if hecke.height_limited() {
        rep.note = Some(format!(
            "{} of {} Hecke classes found at height {}",
            hecke.elements.len(),
            hecke.expected,
            hecke.height
        ));
    }
    Ok(rep)
}

/// Axis of the orientation-reversing isometry `u -> conj(g(u))`: the
/// midpoints of `u` and its image all lie on it.
fn conj_axis(g: &Mobius) -> Result<(Complex64, Complex64)> {
    let samples = [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.3, 0.0),
        Complex64::new(0.0, 0.3),
        Complex64::new(-0.3, 0.0),
        Complex64::new(0.0, -0.3),
        Complex64::new(0.2, 0.2),
    ];
    let mids: Vec<Complex64> = samples
        .iter()
        .map(|&u| geodesic_point(u, g.apply(u).conj(), 0.5))
        .collect();
    let mut best = (0.0, mids[0], mids[0]);
    for (k, a) in mids.iter().enumerate() {
        for b in &mids[k + 1..] {
            let d = disk_dist(*a, *b);
            if d > best.0 {
                best = (d, *a, *b);
            }
        }
    }
    if best.0 < 1e-3 {
        return Err(Error::Singular("could not locate the axis of the reflection".into()));
    }
    Ok((best.1, best.2))
}

/// Tube `{ψ < tanh²(r/2)}` around the conjugate diagonal, in curvature -1
/// units.
fn conj_tube(r1: f64) -> impl Fn(Complex64, Complex64) -> bool + Sync {
    let bound = (r1 / 2.0).tanh().powi(2);
    move |z, w| psi(z, w).map_or(false, |v| v < bound)
}

/// Ratio `vol(C ∩ B(Δ̄, R)) / vol(C ∩ B(Δ̄, r))` against
/// `sinh(R/2)/sinh(r/2)`. Graph tubes are infinite, so both are measured
/// over the same stretch of the axis of `u -> conj(g(u))`, along which they
/// are invariant.
pub fn verify_conj_ratio(
    curve: &ZooCurve,
    r: f64,
    big_r: f64,
    norm: Normalization,
    opts: &QuadratureOptions,
) -> Result<BoundReport> {
    let bound = conj_ratio_bound(r, big_r)?;
    let (r1, big_r1) = (r / norm.dist_scale(), big_r / norm.dist_scale());
    let (small, large) = match &curve.kind {
        CurveKind::Fiber { z0 } => {
            // each tube is a disc about conj(z0); a chart just inside its
            // rim keeps the edge off the quadrature grid
            let c = Complex64::new(z0[0], -z0[1]);
            let disc = |rho: f64| curve.with_charts(vec![Chart::polar(c, rho * (1.0 - 1e-9))]);
            (
                curve_volume(&disc(r1), &conj_tube(r1), norm, opts)?,
                curve_volume(&disc(big_r1), &conj_tube(big_r1), norm, opts)?,
            )
        }
        CurveKind::Graph { g } => {
            let (a, b) = conj_axis(g)?;
            // both endpoints of a chord of the tube sit at distance ≤ R/2 from the axis
            let pc = curve.with_charts(vec![Chart::strip(a, b, 1.0, big_r1 / 2.0 + CHART_PAD)]);
            (
                curve_volume(&pc, &conj_tube(r1), norm, opts)?,
                curve_volume(&pc, &conj_tube(big_r1), norm, opts)?,
            )
        }
    };
    let mesh = small.mesh.max(large.mesh);
    let mut rep = if small.value > 0.0 {
        let ratio = large.value / small.value;
        let tol = ratio * (small.refinement_delta / small.value + large.refinement_delta / large.value.max(1e-300));
        BoundReport::new(BoundKind::Conj, &curve.tag, r, 1, bound, ratio, tol, norm, mesh)
    } else {
        BoundReport {
            note: Some("the r-tube misses the curve; the inequality is vacuous".into()),
            ..BoundReport::new(BoundKind::Conj, &curve.tag, r, 1, bound, f64::INFINITY, 0.0, norm, mesh)
        }
    };
    rep.big_r = Some(big_r);
    rep.tube_volumes = Some([small.value, large.value]);
    Ok(rep)
}

/// Result of running the ratio harness on one curve under every
/// normalization: which of them make the ratio equal to the bound within
/// `rel_tol`.
#[derive(Clone, Debug, Serialize)]
pub struct SharpnessReport {
    pub curve: String,
    pub r: f64,
    pub big_r: f64,
    pub reports: Vec<BoundReport>,
    pub sharp_under: Vec<Normalization>,
}

pub fn conj_ratio_sharpness(
    curve: &ZooCurve,
    r: f64,
    big_r: f64,
    rel_tol: f64,
    opts: &QuadratureOptions,
) -> Result<SharpnessReport> {
    let mut reports = Vec::new();
    let mut sharp_under = Vec::new();
    for norm in Normalization::ALL {
        let rep = verify_conj_ratio(curve, r, big_r, norm, opts)?;
        if (rep.measured_value / rep.bound_value - 1.0).abs() <= rel_tol {
            sharp_under.push(norm);
        }
        reports.push(rep);
    }
    Ok(SharpnessReport {
        curve: curve.tag.clone(),
        r,
        big_r,
        reports,
        sharp_under,
    })
}

/// Centers for the point bound: two points on the curve.
pub fn point_centers(curve: &ZooCurve) -> Vec<ProductPoint> {
    let params = match curve.kind {
        CurveKind::Fiber { .. } => [Complex64::new(0.0, 0.0), Complex64::new(0.2, -0.1)],
        CurveKind::Graph { .. } => [Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.2)],
    };
    params
        .iter()
        .filter_map(|&u| {
            let (z, w) = curve.at(u);
            ProductPoint::disk(z, w, false).ok()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnessConfig {
    pub radii: Vec<f64>,
    pub hecke_m: Vec<i64>,
    pub conj_pairs: Vec<(f64, f64)>,
    pub quadrature: QuadratureOptions,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            radii: vec![0.4, 1.0],
            hecke_m: vec![1, 5, 7],
            conj_pairs: vec![(0.3, 0.6), (0.5, 1.0), (1.0, 2.0)],
            quadrature: QuadratureOptions::default(),
        }
    }
}

/// All cells of the point, diagonal and Hecke harnesses under one
/// normalization.
#[derive(Clone, Debug, Serialize)]
pub struct NormalizationRun {
    pub normalization: Normalization,
    pub cells: Vec<BoundReport>,
    pub all_hold: bool,
    /// `|diag - hecke(m = 1)|` against the summed tolerances, per fiber and
    /// radius.
    pub m1_consistency: Vec<(String, f64, f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HtHarnessReport {
    pub runs: Vec<NormalizationRun>,
    /// Normalizations under which every cell holds.
    pub consistent_with: Vec<Normalization>,
}

pub fn run_ht_harness(
    zoo: &[ZooCurve],
    hecke: &[HeckeSet],
    cfg: &HarnessConfig,
    norms: &[Normalization],
) -> Result<HtHarnessReport> {
    let opts = &cfg.quadrature;
    let mut runs = Vec::new();
    for &norm in norms {
        let mut cells = Vec::new();
        let mut m1 = Vec::new();
        for curve in zoo {
            for &r in &cfg.radii {
                for center in point_centers(curve) {
                    cells.push(verify_point_bound(curve, &center, r, 1, norm, opts)?);
                }
                if curve.diag_intersections.is_some() {
                    cells.push(verify_diag(curve, r, norm, opts)?);
                }
                if curve.is_fiber() {
                    for set in hecke {
                        let rep = verify_hecke(curve, set, r, norm, opts)?;
                        if set.m == 1 {
                            let diag = verify_diag(curve, r, norm, opts)?;
                            m1.push((
                                curve.tag.clone(),
                                r,
                                (diag.measured_value - rep.measured_value).abs(),
                                diag.tolerance + rep.tolerance,
                            ));
                        }
                        cells.push(rep);
                    }
                }
            }
        }
        runs.push(NormalizationRun {
            normalization: norm,
            all_hold: cells.iter().all(|c| c.holds),
            cells,
            m1_consistency: m1,
        });
    }
    Ok(HtHarnessReport {
        consistent_with: runs.iter().filter(|r| r.all_hold).map(|r| r.normalization).collect(),
        runs,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConjHarnessReport {
    pub sharpness: Vec<SharpnessReport>,
    /// The single normalization under which the reference curve is sharp
    /// for every radius pair, if there is one.
    pub resolved: Option<Normalization>,
    /// Every cell holds under `resolved`.
    pub all_hold: bool,
}

/// Runs the ratio harness on every zoo curve and pair of radii; `reference`
/// is the curve expected to realize the bound.
pub fn run_conj_harness(zoo: &[ZooCurve], reference: &str, cfg: &HarnessConfig, rel_tol: f64) -> Result<ConjHarnessReport> {
    let mut sharpness = Vec::new();
    for curve in zoo {
        for &(r, big_r) in &cfg.conj_pairs {
            sharpness.push(conj_ratio_sharpness(curve, r, big_r, rel_tol, &cfg.quadrature)?);
        }
    }
    let mut refs = sharpness.iter().filter(|s| s.curve == reference).peekable();
    if refs.peek().is_none() {
        return Err(Error::InvalidInput(format!("no curve tagged {reference}")));
    }
    let resolved = refs
        .map(|s| match s.sharp_under[..] {
            [n] => Some(n),
            _ => None,
        })
        .reduce(|a, b| if a == b { a } else { None })
        .flatten();
    let all_hold = resolved.is_some_and(|n| {
        sharpness
            .iter()
            .flat_map(|s| &s.reports)
            .filter(|rep| rep.normalization == n)
            .all(|rep| rep.holds)
    });
    Ok(ConjHarnessReport {
        sharpness,
        resolved,
        all_hold,
    })
}

/// Hecke sets for the harness; `m = 1` is the identity.
pub fn harness_hecke_sets(order: &Arc<LatticeOrder>, ms: &[i64], height: i64) -> Result<Vec<HeckeSet>> {
    ms.iter().map(|&m| hecke_elements(order, m, height)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fast() -> QuadratureOptions {
        QuadratureOptions {
            start: 32,
            max_refinements: 6,
            tolerance: 1e-5,
        }
    }

    fn zoo(tag: &str) -> ZooCurve {
        default_zoo().unwrap().into_iter().find(|c| c.tag == tag).unwrap()
    }

    #[test]
    fn closed_forms() {
        assert_eq!(ht_point_bound(0.0, 1), 0.0);
        assert!((ht_point_bound(1.0, 2) - 2.0 * ht_point_bound(1.0, 1)).abs() < 1e-15);
        assert!((ht_diagonal_bound(1.0, 1) - 8.0 * PI * (0.25f64).sinh().powi(2)).abs() < 1e-15);
        assert_eq!(ht_hecke_bound(0.7, 5, 3), ht_diagonal_bound(0.7, 3));
        assert_eq!(conj_ratio_bound(0.4, 0.4).unwrap(), 1.0);
        assert!((conj_ratio_bound(0.5, 1.0).unwrap() - 2.0629).abs() < 1e-4);
        assert!(conj_ratio_bound(1.0, 0.5).is_err());
    }

    #[test]
    fn fiber_conj_ratio_matches_disc_areas() {
        // a fiber meets each tube in a hyperbolic disc, of area ∝ sinh²(ρ/2)
        let f = zoo("fiber");
        for norm in Normalization::ALL {
            for (r, big_r) in [(0.3, 0.6), (1.0, 2.0)] {
                let (r1, big_r1) = (r / norm.dist_scale(), big_r / norm.dist_scale());
                let want = ((big_r1 / 2.0).sinh() / (r1 / 2.0).sinh()).powi(2);
                let got = verify_conj_ratio(&f, r, big_r, norm, &fast()).unwrap().measured_value;
                assert!((got - want).abs() < 1e-4 * want, "{norm:?} ({r},{big_r}): {got} vs {want}");
            }
        }
    }

    #[test]
    fn budgets() {
        let k = BudgetConstants::default();
        let ball = sinh_inv_sq(3.0);
        assert_eq!(incidence_budget_minus(2.0, 6.0, 1, 11, &[2, 3], &k), 2.0 * ball);
        assert_eq!(incidence_budget_minus(2.0, 6.0, 3, 11, &[0, 0], &k), 2.0 * ball);
        let far = incidence_budget_plus(1.0, 6.0, 2, 1000, &k);
        assert!((far - ball).abs() < 1e-12);
        assert_eq!(incidence_budget_plus(2.0, 6.0, 2, 7, &k), 2.0 * incidence_budget_plus(1.0, 6.0, 2, 7, &k));
    }

    #[test]
    fn zoo_loads() {
        let z = default_zoo().unwrap();
        assert_eq!(z.len(), 6);
        assert_eq!(zoo("graph_conj").diag_intersections, None);
    }

    #[test]
    fn fiber_point_bound_is_sharp_in_curvature_minus_one() {
        let c = zoo("fiber");
        let center = point_centers(&c)[0];
        let rep = verify_point_bound(&c, &center, 0.8, 1, Normalization::CurvatureMinus1, &fast()).unwrap();
        assert!(rep.margin.abs() < 1e-4 * rep.bound_value, "{rep:?}");
    }

    #[test]
    fn neg_z_diag_bound_is_sharp_in_curvature_minus_one() {
        let rep = verify_diag(&zoo("graph_neg_z"), 1.0, Normalization::CurvatureMinus1, &fast()).unwrap();
        assert!(rep.margin.abs() < 1e-4 * rep.bound_value, "{rep:?}");
    }

    #[test]
    fn ball_missing_curve_is_empty() {
        let c = zoo("fiber");
        let far = ProductPoint::disk(Complex64::new(-0.9, 0.0), Complex64::new(0.0, 0.0), false).unwrap();
        let rep = verify_point_bound(&c, &far, 0.5, 0, Normalization::CurvatureMinus1, &fast()).unwrap();
        assert_eq!((rep.measured_value, rep.bound_value), (0.0, 0.0));
        assert!(rep.holds);
    }

    #[test]
    fn conj_ratio_of_equal_radii_is_one() {
        let rep = verify_conj_ratio(&zoo("graph_rot3"), 0.5, 0.5, Normalization::CurvatureMinus1, &fast()).unwrap();
        assert!((rep.measured_value - 1.0).abs() < 1e-12);
    }
}
