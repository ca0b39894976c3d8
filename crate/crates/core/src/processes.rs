//! Dynamic processes on graphs: the lazy random walk (stationary law, total
//! variation, mixing time) and two spreading processes (synchronous push
//! rumor and SI infection). Everything is deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::{Real, VertexId};

/// Sum tolerance of a probability vector.
const MASS_TOL: Real = 1e-12;

/// A probability distribution over the vertices of one graph.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    probs: Vec<Real>,
}

impl WalkDistribution {
    /// Nonnegative entries summing to 1 within 1e-12.
    pub fn new(probs: Vec<Real>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::param("distribution over zero vertices"));
        }
        if probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::domain("probabilities must be finite and >= 0"));
        }
        let mass: Real = probs.iter().sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(Error::domain("probabilities must sum to 1"));
        }
        Ok(WalkDistribution { probs })
    }

    pub fn probs(&self) -> &[Real] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Stationary law of the (lazy) random walk: pi(v) = deg(v) / 2|E|.
///
/// Needs a connected graph with at least one edge; otherwise the stationary
/// law is not unique (or undefined) and this errors.
pub fn stationary_distribution(g: &Graph) -> Result<WalkDistribution> {
    if g.edge_count() == 0 {
        return Err(Error::param("stationary law needs at least one edge"));
    }
    let comps = crate::graph::connected_components(g);
    if comps.members.len() > 1 {
        return Err(Error::param(
            "stationary law of a disconnected graph is not unique",
        ));
    }
    let two_m = (2 * g.edge_count()) as Real;
    let probs = (0..g.vertex_count())
        .map(|v| g.degree(v as VertexId) as Real / two_m)
        .collect();
    WalkDistribution::new(probs)
}

/// Total variation distance: half the L1 distance.
pub fn tv_distance(p: &WalkDistribution, q: &WalkDistribution) -> Result<Real> {
    if p.len() != q.len() {
        return Err(Error::param("distributions live on different vertex sets"));
    }
    let l1: Real = p
        .probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(l1 / 2.0)
}

/// Mixing estimate of the lazy walk. When the step budget runs out before
/// the tolerance is met, `converged` is false and `steps` holds the budget;
/// the caller decides whether that is fatal.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MixingEstimate {
    pub steps: usize,
    pub converged: bool,
    /// Worst-start total variation distance at `steps`.
    pub tv: Real,
}

/// Smallest t with max_u TV(W^t(u, .), pi) <= eps for the lazy walk
/// W = (I + D^-1 A) / 2, found by exact powering of every start row.
///
/// TV to stationarity never increases with t, so the first hit is the
/// mixing time. Exceeding `max_steps` is reported, not an error.
pub fn estimate_mixing_time(g: &Graph, eps: Real, max_steps: usize) -> Result<MixingEstimate> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("eps must lie in (0, 1)"));
    }
    if max_steps == 0 {
        return Err(Error::param("step budget must be positive"));
    }
    let pi = stationary_distribution(g)?; // rejects disconnected input
    let n = g.vertex_count();
    // rows[u] = distribution of the walk started at u after t steps.
    let mut rows: Vec<Vec<Real>> = (0..n)
        .map(|u| {
            let mut row = vec![0.0; n];
            row[u] = 1.0;
            row
        })
        .collect();
    let mut scratch: Vec<Vec<Real>> = vec![vec![0.0; n]; n];
    let mut last_tv = 1.0;
    for t in 1..=max_steps {
        rows.par_iter()
            .zip(scratch.par_iter_mut())
            .for_each(|(row, next)| {
                for v in 0..n {
                    let mut acc = 0.5 * row[v];
                    for &u in g.neighbors(v as VertexId) {
                        acc += 0.5 * row[u as usize] / g.degree(u) as Real;
                    }
                    next[v] = acc;
                }
            });
        std::mem::swap(&mut rows, &mut scratch);
        last_tv = rows
            .par_iter()
            .map(|row| {
                let l1: Real = row
                    .iter()
                    .zip(pi.probs())
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                l1 / 2.0
            })
            .reduce(|| 0.0, Real::max);
        if last_tv <= eps {
            return Ok(MixingEstimate {
                steps: t,
                converged: true,
                tv: last_tv,
            });
        }
    }
    Ok(MixingEstimate {
        steps: max_steps,
        converged: false,
        tv: last_tv,
    })
}

/// Outcome of a spreading process.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpreadState {
    /// Synchronous rounds executed.
    pub rounds: usize,
    /// Vertices informed / infected at the end.
    pub informed: usize,
    /// Whether the coverage target was reached within the budget.
    pub reached: bool,
}

fn coverage_target(n: usize, coverage: Real) -> Result<usize> {
    if !(coverage > 0.0 && coverage <= 1.0) {
        return Err(Error::param("coverage must lie in (0, 1]"));
    }
    Ok(((coverage * n as Real).ceil() as usize).clamp(1, n))
}

/// Synchronous push rumor: every informed vertex pushes to one uniformly
/// random neighbor per round until `coverage * n` vertices know the rumor.
/// A coverage target already met by the start vertex alone costs 0 rounds.
///
/// Informed vertices act in ascending id order, so the outcome is a pure
/// function of (graph, start, seed).
pub fn push_rumor_rounds(
    g: &Graph,
    start: VertexId,
    coverage: Real,
    seed: u64,
    max_rounds: usize,
) -> Result<SpreadState> {
    let n = g.vertex_count();
    if start as usize >= n {
        return Err(Error::reference("start vertex is out of range"));
    }
    let target = coverage_target(n, coverage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut informed = vec![false; n];
    informed[start as usize] = true;
    let mut informed_list = vec![start];
    let mut rounds = 0;
    while informed_list.len() < target && rounds < max_rounds {
        rounds += 1;
        let mut fresh = Vec::new();
        for &v in &informed_list {
            let nbrs = g.neighbors(v);
            if nbrs.is_empty() {
                continue;
            }
            let pick = nbrs[rng.gen_range(0..nbrs.len())];
            if !informed[pick as usize] {
                informed[pick as usize] = true;
                fresh.push(pick);
            }
        }
        informed_list.extend(fresh);
        informed_list.sort_unstable();
    }
    Ok(SpreadState {
        rounds,
        informed: informed_list.len(),
        reached: informed_list.len() >= target,
    })
}

/// Synchronous SI infection: each round, every infected vertex infects each
/// susceptible neighbor independently with probability `beta`. With
/// beta = 1 the round count is exactly the BFS depth to the coverage target.
pub fn si_spread_rounds(
    g: &Graph,
    start: VertexId,
    beta: Real,
    coverage: Real,
    seed: u64,
    max_rounds: usize,
) -> Result<SpreadState> {
    let n = g.vertex_count();
    if start as usize >= n {
        return Err(Error::reference("start vertex is out of range"));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::param("beta must lie in (0, 1]"));
    }
    let target = coverage_target(n, coverage)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut infected = vec![false; n];
    infected[start as usize] = true;
    let mut infected_list = vec![start];
    let mut rounds = 0;
    while infected_list.len() < target && rounds < max_rounds {
        rounds += 1;
        let mut fresh = Vec::new();
        for &v in &infected_list {
            for &u in g.neighbors(v) {
                if !infected[u as usize] && (beta >= 1.0 || rng.gen::<Real>() < beta) {
                    infected[u as usize] = true;
                    fresh.push(u);
                }
            }
        }
        if fresh.is_empty() {
            break; // saturated component; the target is unreachable
        }
        infected_list.extend(fresh);
        infected_list.sort_unstable();
    }
    Ok(SpreadState {
        rounds,
        informed: infected_list.len(),
        reached: infected_list.len() >= target,
    })
}
