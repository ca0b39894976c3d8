//! Torus geometry: coordinates, the minimum component distance (MCD), the
//! L-infinity baseline, and the exact volumes of their balls.
//!
//! Points live on the d-dimensional unit torus. The per-coordinate distance
//! is the circle distance `min(|a - b|, 1 - |a - b|)`. MCD takes the minimum
//! over coordinates and is deliberately not a metric for `d >= 2`: two points
//! at MCD zero can be far apart in every other coordinate, which is exactly
//! what lets the model form long-range social ties. L-infinity takes the
//! maximum and recovers an ordinary Euclidean-flavored geometry.
//!
//! Ball volumes are exact closed forms, not asymptotics:
//! `volume_min(d, r) = 1 - (1 - 2r)^d` and `volume_linf(d, r) = (2r)^d`,
//! both capped at 1 for `r > 1/2`.
//!
//! All functions are generic over [`num_traits::Float`]; the rest of the
//! crate instantiates them at [`crate::Real`].

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Real;

/// Which distance drives the connection kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    /// Minimum component distance on the torus.
    Mcd,
    /// L-infinity (maximum component) distance on the torus.
    Linf,
}

impl Geometry {
    /// Distance between two points of equal dimension under this geometry.
    pub fn distance<F: Float>(self, x: &[F], y: &[F]) -> Result<F> {
        match self {
            Geometry::Mcd => mcd_distance(x, y),
            Geometry::Linf => linf_distance(x, y),
        }
    }

    /// Volume of the radius-`r` ball under this geometry.
    pub fn volume<F: Float>(self, d: usize, r: F) -> Result<F> {
        match self {
            Geometry::Mcd => volume_min(d, r),
            Geometry::Linf => volume_linf(d, r),
        }
    }
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Geometry::Mcd => write!(f, "mcd"),
            Geometry::Linf => write!(f, "linf"),
        }
    }
}

/// A point on the d-dimensional unit torus with coordinates in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint<F = Real> {
    coords: Vec<F>,
}

impl<F: Float> TorusPoint<F> {
    /// Build a point from raw coordinates.
    ///
    /// Coordinates must lie in `[0, 1]`; a coordinate exactly at `1.0` wraps
    /// to `0.0`. Anything else is a domain error, as are NaNs.
    pub fn new(coords: Vec<F>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::domain("torus point needs dimension >= 1"));
        }
        let mut wrapped = coords;
        for c in wrapped.iter_mut() {
            if *c == F::one() {
                *c = F::zero();
            } else if !(*c >= F::zero() && *c < F::one()) {
                return Err(Error::domain(
                    "torus coordinate outside [0, 1) (only 1.0 wraps)",
                ));
            }
        }
        Ok(TorusPoint { coords: wrapped })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[F] {
        &self.coords
    }
}

impl<F> std::ops::Deref for TorusPoint<F> {
    type Target = [F];

    fn deref(&self) -> &[F] {
        &self.coords
    }
}

/// Circle distance between two coordinates in `[0, 1)`:
/// `min(|a - b|, 1 - |a - b|)`.
///
/// Always in `[0, 1/2]`.
pub fn torus_abs<F: Float>(a: F, b: F) -> Result<F> {
    let in_domain = |c: F| c >= F::zero() && c < F::one();
    if !in_domain(a) || !in_domain(b) {
        return Err(Error::domain("torus_abs arguments must lie in [0, 1)"));
    }
    let diff = (a - b).abs();
    Ok(diff.min(F::one() - diff))
}

fn check_dims<F>(x: &[F], y: &[F]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::domain("distance needs dimension >= 1"));
    }
    if x.len() != y.len() {
        return Err(Error::domain("dimension mismatch between points"));
    }
    Ok(())
}

/// Minimum component distance: the smallest per-coordinate circle distance.
///
/// Not a metric for `d >= 2` (the triangle inequality fails), which is a
/// feature of the model, not a bug of this function.
pub fn mcd_distance<F: Float>(x: &[F], y: &[F]) -> Result<F> {
    check_dims(x, y)?;
    let mut best = F::infinity();
    for (&a, &b) in x.iter().zip(y.iter()) {
        best = best.min(torus_abs(a, b)?);
    }
    Ok(best)
}

/// L-infinity distance: the largest per-coordinate circle distance.
pub fn linf_distance<F: Float>(x: &[F], y: &[F]) -> Result<F> {
    check_dims(x, y)?;
    let mut best = F::zero();
    for (&a, &b) in x.iter().zip(y.iter()) {
        best = best.max(torus_abs(a, b)?);
    }
    Ok(best)
}

fn check_volume_args<F: Float>(d: usize, r: F) -> Result<()> {
    if d == 0 {
        return Err(Error::domain("ball volume needs dimension >= 1"));
    }
    if !(r >= F::zero()) {
        return Err(Error::domain("ball radius must be >= 0"));
    }
    Ok(())
}

/// Exact volume of the MCD ball of radius `r` on the d-torus.
///
/// The ball is the union of d axis-aligned slabs of width `2r`, so by
/// inclusion-exclusion its volume is `1 - (1 - 2r)^d` for `r <= 1/2` and the
/// whole torus beyond. Satisfies `V(0) = 0` and, for `r <= 1/4`,
/// `r <= V(r) <= 2 d r`.
pub fn volume_min<F: Float>(d: usize, r: F) -> Result<F> {
    check_volume_args(d, r)?;
    let two = F::one() + F::one();
    if two * r >= F::one() {
        return Ok(F::one());
    }
    Ok(F::one() - (F::one() - two * r).powi(d as i32))
}

/// Exact volume of the L-infinity ball of radius `r` on the d-torus:
/// `min(1, (2r)^d)`.
pub fn volume_linf<F: Float>(d: usize, r: F) -> Result<F> {
    check_volume_args(d, r)?;
    let two = F::one() + F::one();
    if two * r >= F::one() {
        return Ok(F::one());
    }
    Ok((two * r).powi(d as i32))
}
