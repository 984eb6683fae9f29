//! The conjugate-diagonal potentials on `D x D`:
//! `ψ(z, w) = |(w̄ - z)/(1 - z w)|^2 = tanh^2(d(z, w̄)/2)`, `S = -log(1 - ψ)`,
//! and the cut-off potential `F = h(S)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A real function on `D x D` whose complex Hessian can be taken.
pub trait Potential: Sync {
    fn eval(&self, z: Complex64, w: Complex64) -> Result<f64>;

    /// Values of `ψ` where the potential is only piecewise smooth.
    fn seams(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<F: Fn(Complex64, Complex64) -> f64 + Sync> Potential for F {
    fn eval(&self, z: Complex64, w: Complex64) -> Result<f64> {
        Ok(self(z, w))
    }
}

pub fn psi(z: Complex64, w: Complex64) -> Result<f64> {
    let den = 1.0 - z * w;
    if den.norm() < 1e-14 {
        return Err(Error::Singular(format!("|1 - z w| = {:e} at z={z}, w={w}", den.norm())));
    }
    Ok(((w.conj() - z) / den).norm_sqr())
}

pub fn potential_s(z: Complex64, w: Complex64) -> Result<f64> {
    Ok(-(1.0 - psi(z, w)?).ln())
}

/// `s(ψ) = -log(1 - ψ)`.
pub fn s_of_psi(psi: f64) -> f64 {
    -(1.0 - psi).ln()
}

pub struct PotentialS;

impl Potential for PotentialS {
    fn eval(&self, z: Complex64, w: Complex64) -> Result<f64> {
        potential_s(z, w)
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// The cut-off potential with inner radius `r` and outer radius `big_r`:
/// constant for `ψ ≤ tanh²(r/2)`, equal to `S + const` for
/// `ψ ≥ tanh²(R/2)`, and `h(S)` in between with `h(c) = c` and the
/// prescribed `h'`.
#[derive(Clone, Debug)]
pub struct PotentialF {
    r: f64,
    big_r: f64,
    c: f64,
    big_c: f64,
    h_at_big_c: f64,
    nodes: Vec<(f64, f64)>,
}

const PANELS: usize = 16;

impl PotentialF {
    pub fn new(r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r) {
            return Err(Error::InvalidInput(format!("need 0 < r < R, got r={r}, R={big_r}")));
        }
        let c = s_of_psi((r / 2.0).tanh().powi(2));
        let big_c = s_of_psi((big_r / 2.0).tanh().powi(2));
        let mut f = PotentialF {
            r,
            big_r,
            c,
            big_c,
            h_at_big_c: 0.0,
            nodes: gauss_legendre(12),
        };
        f.h_at_big_c = f.h_middle(big_c);
        Ok(f)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    /// `c = s(tanh²(r/2))`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `C = s(tanh²(R/2))`.
    pub fn big_c(&self) -> f64 {
        self.big_c
    }

    pub fn seam_psi(&self) -> [f64; 2] {
        [(self.r / 2.0).tanh().powi(2), (self.big_r / 2.0).tanh().powi(2)]
    }

    /// `(1 - √((e^c - 1)/(e^s - 1))) / (1 - √((e^c - 1)/(e^C - 1)))`.
    pub fn h_prime(&self, s: f64) -> f64 {
        let ec = self.c.exp_m1();
        let num = 1.0 - (ec / s.exp_m1()).sqrt();
        let den = 1.0 - (ec / self.big_c.exp_m1()).sqrt();
        num / den
    }

    /// `h''(s)`.
    pub fn h_second(&self, s: f64) -> f64 {
        let ec = self.c.exp_m1();
        let es = s.exp_m1();
        let den = 1.0 - (ec / self.big_c.exp_m1()).sqrt();
        0.5 * ec.sqrt() * s.exp() * es.powf(-1.5) / den
    }

    /// Upper bound `(1 - √((e^c - 1)/(e^C - 1)))^{-1}` for the middle band.
    pub fn domination_constant(&self) -> f64 {
        1.0 / (1.0 - (self.c.exp_m1() / self.big_c.exp_m1()).sqrt())
    }

    fn h_middle(&self, s: f64) -> f64 {
        let (a, b) = (self.c, s);
        let width = (b - a) / PANELS as f64;
        let mut total = 0.0;
        for k in 0..PANELS {
            let lo = a + k as f64 * width;
            let mid = lo + width / 2.0;
            for &(x, wgt) in &self.nodes {
                total += wgt * self.h_prime(mid + x * width / 2.0);
            }
        }
        self.c + total * width / 2.0
    }

    /// `h(s)` on all three bands.
    pub fn h(&self, s: f64) -> f64 {
        if s <= self.c {
            self.c
        } else if s < self.big_c {
            self.h_middle(s)
        } else {
            self.h_at_big_c + (s - self.big_c)
        }
    }

    /// The constant value on the inner band.
    pub fn plateau(&self) -> f64 {
        self.c
    }

    /// `F - S` on the outer band.
    pub fn outer_offset(&self) -> f64 {
        self.h_at_big_c - self.big_c
    }

    pub fn eval_psi(&self, psi: f64) -> f64 {
        self.h(s_of_psi(psi))
    }
}

impl Potential for PotentialF {
    fn eval(&self, z: Complex64, w: Complex64) -> Result<f64> {
        Ok(self.eval_psi(psi(z, w)?))
    }

    fn seams(&self) -> Vec<f64> {
        self.seam_psi().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let rule = gauss_legendre(6);
        let int: f64 = rule.iter().map(|(x, w)| w * x.powi(10)).sum();
        assert!((int - 2.0 / 11.0).abs() < 1e-14);
    }

    #[test]
    fn psi_zero_on_conjugate_diagonal() {
        let z = Complex64::new(0.3, -0.4);
        assert!(psi(z, z.conj()).unwrap() < 1e-30);
        assert_eq!(psi(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn seam_values() {
        let f = PotentialF::new(0.5, 1.5).unwrap();
        assert!(f.h_prime(f.c()).abs() < 1e-12);
        assert!((f.h_prime(f.big_c()) - 1.0).abs() < 1e-12);
        assert!((f.c().exp_m1() - (0.25f64).sinh().powi(2)).abs() < 1e-14);
        assert!(PotentialF::new(1.0, 1.0).is_err());
    }

    #[test]
    fn h_matches_closed_form_integral() {
        // ∫ sqrt(k/(e^s - 1)) ds = 2 sqrt(k) atan(sqrt(e^s - 1))
        let f = PotentialF::new(0.4, 1.2).unwrap();
        let k = f.c().exp_m1();
        let den = 1.0 - (k / f.big_c().exp_m1()).sqrt();
        let anti = |s: f64| (s - 2.0 * k.sqrt() * s.exp_m1().sqrt().atan()) / den;
        let s = 0.5 * (f.c() + f.big_c());
        let want = f.c() + anti(s) - anti(f.c());
        assert!((f.h(s) - want).abs() < 1e-12);
    }
}
