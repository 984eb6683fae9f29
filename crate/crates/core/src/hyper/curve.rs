//! Holomorphic curves in `D x D` given by charts, and their volumes with
//! respect to the product Kähler form.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{disk_dist, Mobius, Normalization};
use crate::error::{Error, Result};

/// The analytic shape of a curve: `{z0} x D` or the graph of a Möbius map.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum CurveKind {
    Fiber { z0: [f64; 2] },
    Graph { g: Mobius },
}

impl CurveKind {
    /// Point of the curve over the parameter `u` with its `u`-derivative.
    pub fn point(&self, u: Complex64) -> (Complex64, Complex64, Complex64, Complex64) {
        match self {
            CurveKind::Fiber { z0 } => (
                Complex64::new(z0[0], z0[1]),
                u,
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ),
            CurveKind::Graph { g } => (u, g.apply(u), Complex64::new(1.0, 0.0), g.derivative(u)),
        }
    }
}

/// Parameter region of a chart. The outer variable is integrated on a fixed
/// interval; for each outer value the inner variable runs over the set where
/// the region predicate holds, located by scanning and bisection.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Base {
    /// `ζ = tanh(s/2) e^{iθ}`, `θ ∈ [0, 2π)`, hyperbolic radius `s ∈ [0, radius]`.
    Polar { radius: f64 },
    /// `ζ = tanh(t/2)`, `t = s + iy`, `s ∈ [-half_length, half_length]`,
    /// `y ∈ [-half_width, half_width]` (`half_width < π/2`). Lines `y = const`
    /// are equidistant from the real diameter and `s` is arclength along it.
    Strip { half_length: f64, half_width: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    /// Isometry applied after the base map.
    pub pre: Mobius,
    pub base: Base,
}

impl Chart {
    /// Hyperbolic (curvature -1) disk of radius `radius` around `center`.
    pub fn polar(center: Complex64, radius: f64) -> Self {
        Chart {
            pre: Mobius::to_origin(center).inverse(),
            base: Base::Polar { radius },
        }
    }

    /// Fermi rectangle around the geodesic through `a` and `b`, starting at
    /// `a`: arclength `|s| ≤ half_length`, distance to the geodesic `≤ width`.
    pub fn strip(a: Complex64, b: Complex64, half_length: f64, width: f64) -> Self {
        let to0 = Mobius::to_origin(a);
        let bb = to0.apply(b);
        let rot = Mobius::rotation(-bb.arg());
        Chart {
            pre: rot.compose(&to0).inverse(),
            base: Base::Strip {
                half_length,
                half_width: 2.0 * (width / 2.0).tanh().atan(),
            },
        }
    }

    fn outer_range(&self) -> (f64, f64) {
        match self.base {
            Base::Polar { .. } => (0.0, 2.0 * std::f64::consts::PI),
            Base::Strip { half_length, .. } => (-half_length, half_length),
        }
    }

    fn inner_range(&self) -> (f64, f64) {
        match self.base {
            Base::Polar { radius } => (0.0, radius),
            Base::Strip { half_width, .. } => (-half_width, half_width),
        }
    }

    /// Parameter `u` and the area factor `|du/dζ|^2 · dA_ζ / (da db)`.
    fn map(&self, outer: f64, inner: f64) -> (Complex64, f64) {
        let (zeta, jac) = match self.base {
            // hyperbolic radius: the density stays tame up to the rim
            Base::Polar { .. } => {
                let rho = (inner / 2.0).tanh();
                (Complex64::from_polar(rho, outer), rho * 0.5 / (inner / 2.0).cosh().powi(2))
            }
            Base::Strip { .. } => {
                let t = Complex64::new(outer, inner) / 2.0;
                let zeta = t.tanh();
                let dz = 0.5 / t.cosh().powi(2);
                (zeta, dz.norm_sqr())
            }
        };
        let u = self.pre.apply(zeta);
        (u, jac * self.pre.derivative(zeta).norm_sqr())
    }
}

/// A curve together with the charts used to integrate over it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParamCurve {
    pub tag: String,
    pub kind: CurveKind,
    pub charts: Vec<Chart>,
}

pub type Region<'a> = dyn Fn(Complex64, Complex64) -> bool + Sync + 'a;

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub value: f64,
    /// `|V_n - V_{n/2}|` at the final refinement.
    pub refinement_delta: f64,
    /// Cells per unit of each chart variable range at the final refinement.
    pub mesh: usize,
    pub normalization: Normalization,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct QuadratureOptions {
    pub start: usize,
    pub max_refinements: usize,
    /// Relative tolerance on successive refinements.
    pub tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        QuadratureOptions {
            start: 32,
            max_refinements: 6,
            tolerance: 1e-5,
        }
    }
}

const SCAN: usize = 96;

// Sub-intervals of [lo, hi] where `inside` holds, ends located by bisection.
fn inside_intervals(lo: f64, hi: f64, inside: impl Fn(f64) -> bool) -> Vec<(f64, f64)> {
    let xs: Vec<f64> = (0..=SCAN).map(|k| lo + (hi - lo) * k as f64 / SCAN as f64).collect();
    let flags: Vec<bool> = xs.iter().map(|&x| inside(x)).collect();
    let edge = |a: f64, b: f64, a_in: bool| {
        let (mut a, mut b) = (a, b);
        for _ in 0..60 {
            let m = 0.5 * (a + b);
            if inside(m) == a_in {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    };
    let mut out = Vec::new();
    let mut start = if flags[0] { Some(lo) } else { None };
    for k in 0..SCAN {
        if flags[k] != flags[k + 1] {
            let x = edge(xs[k], xs[k + 1], flags[k]);
            if flags[k] {
                out.push((start.take().unwrap(), x));
            } else {
                start = Some(x);
            }
        }
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out
}

fn chart_integral(
    kind: &CurveKind,
    chart: &Chart,
    region: &Region<'_>,
    norm: Normalization,
    n: usize,
) -> f64 {
    let (olo, ohi) = chart.outer_range();
    let (ilo, ihi) = chart.inner_range();
    let h = (ohi - olo) / n as f64;
    let density = |outer: f64, inner: f64| {
        let (u, jac) = chart.map(outer, inner);
        if !(u.norm() < 1.0) {
            return None;
        }
        let (z, w, dz, dw) = kind.point(u);
        if !(z.norm() < 1.0 && w.norm() < 1.0) {
            return None;
        }
        Some((z, w, jac * (norm.area_density(z) * dz.norm_sqr() + norm.area_density(w) * dw.norm_sqr())))
    };
    // fixed tile order keeps the sum bit-stable for a given n
    let columns: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            let outer = olo + (k as f64 + 0.5) * h;
            let inside = |inner: f64| {
                density(outer, inner).map_or(false, |(z, w, _)| region(z, w))
            };
            let mut col = 0.0;
            for (a, b) in inside_intervals(ilo, ihi, inside) {
                let m = n.max(2);
                let step = (b - a) / m as f64;
                for j in 0..m {
                    if let Some((_, _, d)) = density(outer, a + (j as f64 + 0.5) * step) {
                        col += d * step;
                    }
                }
            }
            col * h
        })
        .collect();
    columns.iter().sum()
}

fn volume_at(curve: &ParamCurve, region: &Region<'_>, norm: Normalization, n: usize) -> f64 {
    curve
        .charts
        .iter()
        .map(|c| chart_integral(&curve.kind, c, region, norm, n))
        .sum()
}

/// Volume of `curve ∩ region` for the product Kähler form, by the midpoint
/// rule in both chart variables with the inner variable fitted to the
/// region. The mesh is doubled until successive values agree to the
/// relative tolerance.
pub fn curve_volume(
    curve: &ParamCurve,
    region: &Region<'_>,
    norm: Normalization,
    opts: &QuadratureOptions,
) -> Result<VolumeReport> {
    let mut n = opts.start;
    let mut prev = volume_at(curve, region, norm, n);
    let mut delta = f64::INFINITY;
    for _ in 0..opts.max_refinements {
        n *= 2;
        let cur = volume_at(curve, region, norm, n);
        delta = (cur - prev).abs();
        prev = cur;
        if delta <= opts.tolerance * cur.abs() || cur == 0.0 && delta == 0.0 {
            return Ok(VolumeReport {
                value: cur,
                refinement_delta: delta,
                mesh: n,
                normalization: norm,
            });
        }
    }
    Err(Error::NoConvergence {
        refinements: opts.max_refinements,
        delta,
        value: prev,
    })
}

/// Point on the hyperbolic segment from `a` to `b` at fraction `t`.
pub fn geodesic_point(a: Complex64, b: Complex64, t: f64) -> Complex64 {
    let to0 = Mobius::to_origin(a);
    let v = to0.apply(b);
    if v.norm() == 0.0 {
        return a;
    }
    let d = disk_dist(a, b);
    let p = v / v.norm() * (t * d / 2.0).tanh();
    to0.inverse().apply(p)
}
