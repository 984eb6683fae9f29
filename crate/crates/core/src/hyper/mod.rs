//! Hyperbolic plane in the disk and upper half-plane models, and the
//! products `D x D` where the volume and potential computations live.

pub mod curve;
pub mod hessian;
pub mod lelong;
pub mod potential;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Uhp,
    Disk,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    value: Complex64,
    model: Model,
}

impl HPoint {
    pub fn uhp(z: Complex64) -> Result<Self> {
        if !(z.im > 0.0) || !z.re.is_finite() {
            return Err(Error::InvalidInput(format!("{z} is not in the upper half-plane")));
        }
        Ok(HPoint { value: z, model: Model::Uhp })
    }

    pub fn disk(z: Complex64) -> Result<Self> {
        if !(z.norm() < 1.0) {
            return Err(Error::InvalidInput(format!("{z} is not in the unit disk")));
        }
        Ok(HPoint { value: z, model: Model::Disk })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Cayley transform `z -> (z - i)/(z + i)`.
    pub fn to_disk(&self) -> HPoint {
        match self.model {
            Model::Disk => *self,
            Model::Uhp => HPoint {
                value: uhp_to_disk(self.value),
                model: Model::Disk,
            },
        }
    }

    pub fn to_uhp(&self) -> HPoint {
        match self.model {
            Model::Uhp => *self,
            Model::Disk => HPoint {
                value: disk_to_uhp(self.value),
                model: Model::Uhp,
            },
        }
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:?})", self.value, self.model)
    }
}

pub fn uhp_to_disk(z: Complex64) -> Complex64 {
    (z - I) / (z + I)
}

pub fn disk_to_uhp(z: Complex64) -> Complex64 {
    I * (1.0 + z) / (1.0 - z)
}

/// A point of `D x D`; `second_conjugated` marks coordinates on `X x X̄`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductPoint {
    pub first: HPoint,
    pub second: HPoint,
    pub second_conjugated: bool,
}

impl ProductPoint {
    pub fn disk(z: Complex64, w: Complex64, second_conjugated: bool) -> Result<Self> {
        Ok(ProductPoint {
            first: HPoint::disk(z)?,
            second: HPoint::disk(w)?,
            second_conjugated,
        })
    }

    pub fn coords(&self) -> (Complex64, Complex64) {
        (self.first.to_disk().value, self.second.to_disk().value)
    }
}

/// Fractional linear map `z -> (a z + b)/(c z + d)` with complex entries.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    pub m: [Complex64; 4],
}

impl Mobius {
    pub fn new(m: [Complex64; 4]) -> Self {
        Mobius { m }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Mobius { m: [o, z, z, o] }
    }

    /// `z -> e^{i theta} z`.
    pub fn rotation(theta: f64) -> Self {
        let h = Complex64::from_polar(1.0, theta / 2.0);
        let z = Complex64::new(0.0, 0.0);
        Mobius { m: [h, z, z, h.conj()] }
    }

    /// Disk automorphism sending `a` to 0.
    pub fn to_origin(a: Complex64) -> Self {
        let o = Complex64::new(1.0, 0.0);
        Mobius { m: [o, -a, -a.conj(), o] }
    }

    /// A real matrix acting on the upper half-plane, transported to the disk by
    /// the Cayley transform.
    pub fn from_real_uhp(r: &[f64; 4]) -> Self {
        let c = |x: f64| Complex64::new(x, 0.0);
        let g = Mobius::new([c(r[0]), c(r[1]), c(r[2]), c(r[3])]);
        let cay = Mobius::new([c(1.0), -I, c(1.0), I]);
        cay.compose(&g).compose(&cay.inverse())
    }

    pub fn det(&self) -> Complex64 {
        self.m[0] * self.m[3] - self.m[1] * self.m[2]
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.m[0] * z + self.m[1]) / (self.m[2] * z + self.m[3])
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        let den = self.m[2] * z + self.m[3];
        self.det() / (den * den)
    }

    /// `self ∘ other`.
    pub fn compose(&self, o: &Self) -> Self {
        let [a, b, c, d] = self.m;
        let [e, f, g, h] = o.m;
        Mobius::new([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn inverse(&self) -> Self {
        let [a, b, c, d] = self.m;
        Mobius::new([d, -b, -c, a])
    }

    /// The map `z -> conj(g(conj z))`.
    pub fn conj_entries(&self) -> Self {
        Mobius::new(self.m.map(|x| x.conj()))
    }

    /// Scaled to determinant 1.
    pub fn normalized(&self) -> Self {
        let s = self.det().sqrt();
        Mobius::new(self.m.map(|x| x / s))
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0] + self.m[3]
    }
}

/// `(a z + b)/(c z + d)` on the upper half-plane for `det > 0`; disk points
/// are carried through the Cayley transform and returned in the disk model.
pub fn moebius_act(m: &[f64; 4], z: &HPoint) -> Result<HPoint> {
    let det = m[0] * m[3] - m[1] * m[2];
    if !(det > 0.0) {
        return Err(Error::InvalidInput(format!("determinant {det} is not positive")));
    }
    let w = z.to_uhp().value;
    let image = (m[0] * w + m[1]) / (m[2] * w + m[3]);
    let out = HPoint::uhp(image)?;
    Ok(match z.model {
        Model::Uhp => out,
        Model::Disk => out.to_disk(),
    })
}

/// Curvature -1 distance in the disk.
pub fn disk_dist(z: Complex64, w: Complex64) -> f64 {
    let q = ((z - w) / (1.0 - z * w.conj())).norm();
    2.0 * q.min(1.0 - f64::EPSILON).atanh()
}

/// Curvature -1 distance; both points must use the same model.
pub fn dist(z: &HPoint, w: &HPoint) -> Result<f64> {
    if z.model != w.model {
        return Err(Error::DomainMismatch(model_name(z.model), model_name(w.model)));
    }
    Ok(match z.model {
        Model::Disk => disk_dist(z.value, w.value),
        Model::Uhp => {
            let d = (z.value - w.value).norm_sqr();
            (1.0 + d / (2.0 * z.value.im * w.value.im)).acosh()
        }
    })
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Uhp => "upper half-plane",
        Model::Disk => "disk",
    }
}

/// Curvature convention for the Kähler form on each factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalization {
    /// Area form `4 |dz|^2 / (1 - |z|^2)^2`.
    #[serde(rename = "curvature-1")]
    CurvatureMinus1,
    /// Area form `|dz|^2 / (1 - |z|^2)^2`; distances are halved.
    #[serde(rename = "curvature-4")]
    CurvatureMinus4,
}

impl Normalization {
    pub const ALL: [Normalization; 2] = [Normalization::CurvatureMinus1, Normalization::CurvatureMinus4];

    pub fn dist_scale(self) -> f64 {
        match self {
            Normalization::CurvatureMinus1 => 1.0,
            Normalization::CurvatureMinus4 => 0.5,
        }
    }

    pub fn area_density(self, z: Complex64) -> f64 {
        let s = 1.0 - z.norm_sqr();
        let k = match self {
            Normalization::CurvatureMinus1 => 4.0,
            Normalization::CurvatureMinus4 => 1.0,
        };
        k / (s * s)
    }

    pub fn dist(self, z: Complex64, w: Complex64) -> f64 {
        self.dist_scale() * disk_dist(z, w)
    }

    pub fn tag(self) -> &'static str {
        match self {
            Normalization::CurvatureMinus1 => "curvature-1",
            Normalization::CurvatureMinus4 => "curvature-4",
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curvature-1" | "-1" => Ok(Normalization::CurvatureMinus1),
            "curvature-4" | "-4" => Ok(Normalization::CurvatureMinus4),
            _ => Err(Error::InvalidInput(format!("unknown normalization {s}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn uhp_distances() {
        let i = HPoint::uhp(c(0.0, 1.0)).unwrap();
        let d = dist(&i, &HPoint::uhp(c(0.0, 2.0)).unwrap()).unwrap();
        assert!((d - 2f64.ln()).abs() < 1e-14);
        let d = dist(&i, &HPoint::uhp(c(1.0, 1.0)).unwrap()).unwrap();
        assert!((d - 1.5f64.acosh()).abs() < 1e-14);
        assert_eq!(dist(&i, &i).unwrap(), 0.0);
        assert!(dist(&i, &i.to_disk()).is_err());
    }

    #[test]
    fn models_agree() {
        let z = HPoint::uhp(c(0.3, 0.7)).unwrap();
        let w = HPoint::uhp(c(-1.2, 2.5)).unwrap();
        let a = dist(&z, &w).unwrap();
        let b = dist(&z.to_disk(), &w.to_disk()).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn translation() {
        let i = HPoint::uhp(c(0.0, 1.0)).unwrap();
        let w = moebius_act(&[1.0, 1.0, 0.0, 1.0], &i).unwrap();
        assert!((w.value() - c(1.0, 1.0)).norm() < 1e-15);
        assert!(moebius_act(&[0.0, 1.0, 1.0, 0.0], &i).is_err());
    }

    #[test]
    fn real_matrix_on_disk() {
        let m = [2.0, 1.0, 1.0, 1.0];
        let z = HPoint::uhp(c(0.2, 0.9)).unwrap();
        let direct = moebius_act(&m, &z).unwrap().to_disk().value();
        let via = Mobius::from_real_uhp(&m).apply(z.to_disk().value());
        assert!((direct - via).norm() < 1e-14);
    }
}
