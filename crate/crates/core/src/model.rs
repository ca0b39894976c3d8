//! Model parameters, power-law weights, and the connection kernel.
//!
//! Weights follow an exact Pareto law on `[1, inf)` with density
//! `(tau - 1) x^(-tau)`, sampled by inverse CDF: `w = u^(-1/(tau - 1))`.
//! The tail satisfies `P(W >= w) = w^(1 - tau)` exactly, which is what the
//! subgraph-scaling experiments lean on.
//!
//! A pair `{u, v}` at distance `dist` connects with probability
//!
//! ```text
//! p = min(1, kernel_c * min(w_u * w_v / (n * V(dist)), 1)^alpha)
//! ```
//!
//! where `V` is the ball volume of the configured geometry. The pair is a
//! strong tie when the inner minimum saturates at 1, i.e. the weight product
//! alone pays for the ball around the pair; `V(0) = 0` counts as saturated.
//! The region where every edge is a strong tie is the ball of influence of
//! volume `w_v / n` around a vertex.

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, TorusPoint};
use crate::Real;

/// Full parameter set of one graph draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Number of vertices.
    pub n: usize,
    /// Torus dimension.
    pub d: usize,
    /// Power-law exponent of the weight distribution; must exceed 2.
    pub tau: Real,
    /// Kernel exponent; must exceed 1 (low-temperature regime).
    pub alpha: Real,
    /// Constant in front of the kernel; the probability stays capped at 1.
    pub kernel_c: Real,
    /// Distance driving the kernel.
    pub geometry: Geometry,
    /// Tape seed; the sampled graph is a pure function of this struct.
    pub seed: u64,
}

impl ModelParams {
    /// Convenience constructor using the default kernel constant 1.
    pub fn new(n: usize, d: usize, tau: Real, alpha: Real, geometry: Geometry, seed: u64) -> Self {
        ModelParams {
            n,
            d,
            tau,
            alpha,
            kernel_c: 1.0,
            geometry,
            seed,
        }
    }

    /// Check every field against its domain.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::param("n must be at least 2"));
        }
        if self.d == 0 {
            return Err(Error::param("d must be at least 1"));
        }
        if !(self.tau > 2.0) || !self.tau.is_finite() {
            return Err(Error::param("tau must be finite and > 2"));
        }
        if !(self.alpha > 1.0) || !self.alpha.is_finite() {
            return Err(Error::param("alpha must be finite and > 1"));
        }
        if !(self.kernel_c > 0.0) || !self.kernel_c.is_finite() {
            return Err(Error::param("kernel_c must be finite and > 0"));
        }
        Ok(())
    }
}

/// Weight and position of one vertex; the id is the index into the vector
/// returned by the sampler.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexData {
    pub weight: Real,
    pub position: TorusPoint<Real>,
}

/// Inverse-CDF sample of the Pareto weight law with exponent `tau`.
///
/// `u` must lie strictly inside `(0, 1)`; `u -> 1` gives weights near the
/// lower endpoint 1, `u -> 0` the heavy tail.
pub fn sample_weight<F: Float>(u: F, tau: F) -> Result<F> {
    let two = F::one() + F::one();
    if !(tau > two) {
        return Err(Error::param("tau must be > 2"));
    }
    if !(u > F::zero() && u < F::one()) {
        return Err(Error::domain("weight quantile must lie in (0, 1)"));
    }
    Ok(u.powf(-F::one() / (tau - F::one())))
}

/// Kernel evaluation: the connection probability together with the
/// strong-tie classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue<F = Real> {
    pub probability: F,
    /// True iff the inner minimum saturated, i.e. `w_u w_v >= n V(dist)`.
    pub strong_tie: bool,
}

/// Core kernel on raw values; `volume` is `V(dist)` for the chosen geometry.
pub fn kernel<F: Float>(w_u: F, w_v: F, n: F, volume: F, alpha: F, kernel_c: F) -> KernelValue<F> {
    let mass = n * volume;
    let product = w_u * w_v;
    if product >= mass {
        // Saturated inner minimum; covers volume == 0 (coincident points).
        return KernelValue {
            probability: kernel_c.min(F::one()),
            strong_tie: true,
        };
    }
    let ratio = product / mass;
    KernelValue {
        probability: (kernel_c * ratio.powf(alpha)).min(F::one()),
        strong_tie: false,
    }
}

/// Connection probability of a pair at distance `dist` under `params`.
pub fn connection_probability(
    params: &ModelParams,
    w_u: Real,
    w_v: Real,
    dist: Real,
) -> Result<Real> {
    Ok(kernel_eval(params, w_u, w_v, dist)?.probability)
}

/// Connection probability plus the strong-tie flag.
pub fn kernel_eval(
    params: &ModelParams,
    w_u: Real,
    w_v: Real,
    dist: Real,
) -> Result<KernelValue> {
    params.validate()?;
    if !(w_u >= 1.0) || !(w_v >= 1.0) {
        return Err(Error::domain("weights must be >= 1"));
    }
    if !(0.0..=0.5).contains(&dist) {
        return Err(Error::domain("distance must lie in [0, 1/2]"));
    }
    let volume = params.geometry.volume(params.d, dist)?;
    Ok(kernel(
        w_u,
        w_v,
        params.n as Real,
        volume,
        params.alpha,
        params.kernel_c,
    ))
}
