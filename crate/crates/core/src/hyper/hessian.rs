use num_complex::Complex64;
use serde::Serialize;

use super::potential::{psi, Potential};
use super::ProductPoint;
use crate::error::{Error, Result};

/// A 2x2 Hermitian matrix `H_ab = ∂²φ/∂ζ_a∂ζ̄_b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HermitianForm2 {
    pub m: [[Complex64; 2]; 2],
}

impl HermitianForm2 {
    pub fn diag(a: f64, b: f64) -> Self {
        let z = Complex64::new(0.0, 0.0);
        HermitianForm2 {
            m: [[Complex64::new(a, 0.0), z], [z, Complex64::new(b, 0.0)]],
        }
    }

    /// `max |H - H^*|`.
    pub fn hermitian_defect(&self) -> f64 {
        let m = &self.m;
        (m[0][0].im.abs())
            .max(m[1][1].im.abs())
            .max((m[0][1] - m[1][0].conj()).norm())
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = 0.5 * (self.m[0][1] + self.m[1][0].conj());
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - rad, mean + rad]
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut m = self.m;
        for (a, row) in m.iter_mut().enumerate() {
            for (b, x) in row.iter_mut().enumerate() {
                *x -= o.m[a][b];
            }
        }
        HermitianForm2 { m }
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianForm2 {
            m: self.m.map(|r| r.map(|x| x * s)),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// `i∂∂̄` of `ω_std/2`: `diag((1-|z|²)^{-2}, (1-|w|²)^{-2})`.
pub fn half_std_form(z: Complex64, w: Complex64) -> HermitianForm2 {
    HermitianForm2::diag((1.0 - z.norm_sqr()).powi(-2), (1.0 - w.norm_sqr()).powi(-2))
}

fn shift(p: [f64; 4], k: usize, h: f64) -> [f64; 4] {
    let mut q = p;
    q[k] += h;
    q
}

fn eval4(pot: &dyn Potential, x: [f64; 4]) -> Result<f64> {
    pot.eval(Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]))
}

// Real Hessian in (x1, y1, x2, y2) by central differences with step h.
fn real_hessian(pot: &dyn Potential, p: [f64; 4], h: f64) -> Result<[[f64; 4]; 4]> {
    let f0 = eval4(pot, p)?;
    let mut out = [[0.0; 4]; 4];
    for a in 0..4 {
        let fp = eval4(pot, shift(p, a, h))?;
        let fm = eval4(pot, shift(p, a, -h))?;
        out[a][a] = (fp - 2.0 * f0 + fm) / (h * h);
        for b in a + 1..4 {
            let fpp = eval4(pot, shift(shift(p, a, h), b, h))?;
            let fpm = eval4(pot, shift(shift(p, a, h), b, -h))?;
            let fmp = eval4(pot, shift(shift(p, a, -h), b, h))?;
            let fmm = eval4(pot, shift(shift(p, a, -h), b, -h))?;
            out[a][b] = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            out[b][a] = out[a][b];
        }
    }
    Ok(out)
}

fn seam_check(pot: &dyn Potential, p: [f64; 4], step: f64) -> Result<()> {
    let seams = pot.seams();
    if seams.is_empty() {
        return Ok(());
    }
    let center = psi(Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]))?;
    // the whole stencil must stay on one side of every seam
    let mut lo = center;
    let mut hi = center;
    for k in 0..4 {
        for s in [-step, step] {
            let q = shift(p, k, s);
            let v = psi(Complex64::new(q[0], q[1]), Complex64::new(q[2], q[3]))?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    for seam in seams {
        if (center - seam).abs() < 10.0 * step || (lo - seam) * (hi - seam) <= 0.0 {
            return Err(Error::SeamProximity { psi: center, seam });
        }
    }
    Ok(())
}

/// `∂²φ/∂ζ_a∂ζ̄_b` by central differences at steps `h` and `h/2`, combined
/// by Richardson extrapolation.
pub fn complex_hessian(pot: &dyn Potential, at: &ProductPoint, step: f64) -> Result<HermitianForm2> {
    let (z, w) = at.coords();
    let p = [z.re, z.im, w.re, w.im];
    seam_check(pot, p, 2.0 * step)?;
    let coarse = real_hessian(pot, p, step)?;
    let fine = real_hessian(pot, p, step / 2.0)?;
    let mut r = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            r[a][b] = (4.0 * fine[a][b] - coarse[a][b]) / 3.0;
        }
    }
    // H_ab = ¼[(∂xa∂xb + ∂ya∂yb) + i(∂xa∂yb − ∂ya∂xb)]
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
            m[a][b] = Complex64::new(
                0.25 * (r[xa][xb] + r[ya][yb]),
                0.25 * (r[xa][yb] - r[ya][xb]),
            );
        }
    }
    Ok(HermitianForm2 { m })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::potential::{PotentialF, PotentialS};

    fn pt(z: (f64, f64), w: (f64, f64)) -> ProductPoint {
        ProductPoint::disk(Complex64::new(z.0, z.1), Complex64::new(w.0, w.1), true).unwrap()
    }

    #[test]
    fn hessian_of_s_at_origin_fiber() {
        let w = Complex64::new(0.3, -0.2);
        let h = complex_hessian(&PotentialS, &pt((0.0, 0.0), (w.re, w.im)), 1e-3).unwrap();
        let want = HermitianForm2::diag(1.0, (1.0 - w.norm_sqr()).powi(-2));
        assert!(h.sub(&want).max_abs() < 1e-7 * want.max_abs());
    }

    #[test]
    fn pluriharmonic_has_zero_hessian() {
        let f = |z: Complex64, w: Complex64| (z * z * w + (z - w).exp()).re;
        let h = complex_hessian(&f, &pt((0.1, 0.2), (-0.3, 0.1)), 1e-3).unwrap();
        assert!(h.max_abs() < 1e-8);
    }

    #[test]
    fn seam_refused() {
        let f = PotentialF::new(0.5, 1.5).unwrap();
        let t = (0.25f64).tanh();
        // ψ(0, w) = |w|², so |w| = tanh(r/2) sits on the inner seam
        let e = complex_hessian(&f, &pt((0.0, 0.0), (t, 0.0)), 1e-3);
        assert!(matches!(e, Err(Error::SeamProximity { .. })));
    }
}
