//! Computational companion for Shimura curves attached to indefinite
//! quaternion algebras over Q: exact quaternion arithmetic, unit groups and
//! their congruence subgroups, CM points and Hecke data, hyperbolic volume
//! bounds and Riemann–Hurwitz genus accounting.

pub mod arith;
pub mod cm;
pub mod error;
pub mod genus;
pub mod group;
pub mod hyper;
pub mod linalg;
pub mod quat;
pub mod volume;

pub use error::{Error, Result};
