use num_complex::Complex64;
use serde::Serialize;

use super::potential::Potential;
use super::ProductPoint;
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct LelongEstimate {
    pub value: f64,
    /// Change of the extrapolated value over the last ladder step.
    pub convergence: f64,
    /// No logarithmic pole detected; `value` is reported as 0.
    pub no_singularity: bool,
}

/// Unit directions in C²: coordinate axes and a spread of mixed directions.
fn directions() -> Vec<(Complex64, Complex64)> {
    let mut out = Vec::new();
    for k in 0..12 {
        let t = std::f64::consts::PI * k as f64 / 12.0;
        let phase = Complex64::from_polar(1.0, 0.7 * k as f64);
        out.push((Complex64::new(t.cos(), 0.0), phase * t.sin()));
    }
    out.push((Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)));
    out
}

/// `min_u φ(x + εu)/log ε` over a ladder `ε = 2^{-k}`, extrapolated to
/// `ε -> 0` by fitting `ν + a/log ε` to the last two rungs.
pub fn lelong_estimate(pot: &dyn Potential, at: &ProductPoint) -> Result<LelongEstimate> {
    let (z, w) = at.coords();
    let ladder: Vec<f64> = (8..=40).step_by(4).map(|k| 2f64.powi(-k)).collect();
    let mut ratios = Vec::with_capacity(ladder.len());
    for &eps in &ladder {
        let mut best = f64::INFINITY;
        for (u, v) in directions() {
            let phi = pot.eval(z + u * eps, w + v * eps)?;
            let r = phi / eps.ln();
            if r.is_finite() {
                best = best.min(r);
            }
        }
        ratios.push(best);
    }
    let n = ladder.len();
    let extrapolate = |i: usize, j: usize| {
        let (xi, xj) = (1.0 / ladder[i].ln(), 1.0 / ladder[j].ln());
        ratios[j] - (ratios[j] - ratios[i]) / (xj - xi) * xj
    };
    let last = extrapolate(n - 2, n - 1);
    let prev = extrapolate(n - 3, n - 2);
    if last.abs() < 1e-3 {
        return Ok(LelongEstimate {
            value: 0.0,
            convergence: (last - prev).abs(),
            no_singularity: true,
        });
    }
    Ok(LelongEstimate {
        value: last,
        convergence: (last - prev).abs(),
        no_singularity: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> ProductPoint {
        ProductPoint::disk(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), false).unwrap()
    }

    #[test]
    fn log_poles() {
        for m in 1..=3 {
            let f = move |z: Complex64, w: Complex64| (z.powi(m) + w.powi(m + 1) * 0.5).norm().ln();
            let est = lelong_estimate(&f, &origin()).unwrap();
            assert!((est.value - m as f64).abs() < 0.02 * m as f64, "m={m}: {est:?}");
        }
    }

    #[test]
    fn smooth_is_zero() {
        let f = |z: Complex64, w: Complex64| (1.0 + z.norm_sqr() + w.re).ln();
        let est = lelong_estimate(&f, &origin()).unwrap();
        assert!(est.no_singularity);
        assert_eq!(est.value, 0.0);
    }
}
