//! Samplers for vertex data and edges.
//!
//! Two edge samplers share one random tape: `sample_graph_naive` scans every
//! unordered pair (the auditable oracle), `sample_graph_bucketed` reaches the
//! same edge set faster by splitting pairs along the strip partition. Every
//! pair still consults its own tape cell, because every pair has positive
//! connection probability; the speedup comes from rejecting almost all far
//! pairs with a single integer compare against a precomputed envelope of the
//! kernel, not from skipping tape cells. The two samplers are therefore
//! bit-identical by construction, and the equivalence is enforced by tests.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::TorusPoint;
use crate::graph::Graph;
use crate::model::{kernel, sample_weight, ModelParams, VertexData};
use crate::strips::StripIndex;
use crate::tape::{envelope_threshold, RandomTape};
use crate::{Real, VertexId};

/// Smallest positive tape cell; the cell 0.0 is lifted here so the weight
/// quantile stays inside the open interval (0, 1).
const MIN_UNIT: f64 = 1.0 / (1u64 << 53) as f64;

/// Multiplicative inflation of the far-pair envelope. The envelope must
/// dominate the exact probability even though `powf` may err by a few ulp
/// (relative 1e-16); 1e-9 buries that by seven orders of magnitude.
const ENVELOPE_INFLATE: f64 = 1.0 + 1e-9;

/// Margin of the weak-tie early reject: for alpha > 1 and x in [0, 1),
/// real arithmetic gives x^alpha <= x, and the margin absorbs the rounding
/// of `powf`, so a coin at or above `kernel_c * ratio * margin` can never
/// win the exact comparison.
const REJECT_MARGIN: f64 = 1.0 + 1e-12;

/// Edge coin of the unordered pair `{u, v}`, as an operation.
pub fn pair_coin(tape: &RandomTape, u: VertexId, v: VertexId) -> Result<f64> {
    if u == v {
        return Err(Error::param("pair coin requires two distinct vertices"));
    }
    Ok(tape.pair_coin(u, v))
}

/// Draw the weight and position of every vertex. Pure in `p` (incl. seed).
pub fn sample_vertices(p: &ModelParams) -> Result<Vec<VertexData>> {
    p.validate()?;
    let tape = RandomTape::new(p.seed);
    (0..p.n)
        .into_par_iter()
        .map(|v| {
            let v = v as VertexId;
            let u = tape.weight_unit(v).max(MIN_UNIT);
            let weight = sample_weight(u, p.tau)?;
            let coords: Vec<Real> = (0..p.d).map(|k| tape.position_unit(v, k)).collect();
            Ok(VertexData {
                weight,
                position: TorusPoint::new(coords)?,
            })
        })
        .collect()
}

/// Quadratic oracle sampler: every unordered pair is decided by
/// `coin < connection probability`. Intended for n up to a few 10^4.
pub fn sample_graph_naive(p: &ModelParams) -> Result<Graph> {
    p.validate()?;
    let vertices = sample_vertices(p)?;
    let tape = RandomTape::new(p.seed);
    let nf = p.n as Real;
    let rows: Vec<Vec<(VertexId, VertexId)>> = (0..p.n as VertexId)
        .into_par_iter()
        .map(|u| {
            let row = tape.edge_row(u);
            let wu = vertices[u as usize].weight;
            let xu = &vertices[u as usize].position;
            let mut out = Vec::new();
            for v in (u + 1)..p.n as VertexId {
                let other = &vertices[v as usize];
                let dist = p.geometry.distance(xu, &other.position)?;
                let volume = p.geometry.volume(p.d, dist)?;
                let kv = kernel(wu, other.weight, nf, volume, p.alpha, p.kernel_c);
                if row.coin(v) < kv.probability {
                    out.push((u, v));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Graph::from_edges(p.n, &rows.concat(), Some(vertices))
}

/// The subgraph induced by a weight band, sampled directly.
///
/// Only pairs inside the band are decided, against the same tape cells and
/// the same kernel (with the full n) as the full samplers, so the result
/// equals the induced subgraph of the full draw edge for edge. Returns the
/// graph on dense ids plus the original id of each new vertex.
pub fn sample_induced_by_weight(
    p: &ModelParams,
    lo: Real,
    hi: Real,
) -> Result<(Graph, Vec<VertexId>)> {
    p.validate()?;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::param("weight band must satisfy lo <= hi"));
    }
    let vertices = sample_vertices(p)?;
    let kept: Vec<VertexId> = (0..p.n as VertexId)
        .filter(|&v| {
            let w = vertices[v as usize].weight;
            w >= lo && w <= hi
        })
        .collect();
    let tape = RandomTape::new(p.seed);
    let nf = p.n as Real;
    let rows: Vec<Vec<(VertexId, VertexId)>> = (0..kept.len())
        .into_par_iter()
        .map(|a| {
            let u = kept[a];
            // kept is ascending, so kept[b] > u for b > a and the row view applies.
            let row = tape.edge_row(u);
            let wu = vertices[u as usize].weight;
            let xu = &vertices[u as usize].position;
            let mut out = Vec::new();
            for (b, &v) in kept.iter().enumerate().skip(a + 1) {
                let other = &vertices[v as usize];
                let dist = p.geometry.distance(xu, &other.position)?;
                let volume = p.geometry.volume(p.d, dist)?;
                let kv = kernel(wu, other.weight, nf, volume, p.alpha, p.kernel_c);
                if row.coin(v) < kv.probability {
                    out.push((a as VertexId, b as VertexId));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let data: Vec<VertexData> = kept.iter().map(|&v| vertices[v as usize].clone()).collect();
    let g = Graph::from_edges(kept.len(), &rows.concat(), Some(data))?;
    Ok((g, kept))
}

/// Vertices grouped by the dyadic class `floor(log2 w)`, with the exact
/// class maximum; drives the per-class far-pair envelope.
struct WeightClass {
    wmax: Real,
    members: Vec<VertexId>,
}

fn weight_classes(vertices: &[VertexData]) -> Vec<WeightClass> {
    let mut classes: Vec<WeightClass> = Vec::new();
    for (v, data) in vertices.iter().enumerate() {
        let t = data.weight.log2().floor() as usize;
        while classes.len() <= t {
            classes.push(WeightClass {
                wmax: 0.0,
                members: Vec::new(),
            });
        }
        classes[t].wmax = classes[t].wmax.max(data.weight);
        classes[t].members.push(v as VertexId);
    }
    classes
}

/// First coordinate in which the two vertices sit in the same or cyclically
/// adjacent strips, if any. Pairs with such a coordinate are "near" and are
/// owned by the near pass at exactly that coordinate.
#[inline]
fn near_owner(idx: &StripIndex, u: VertexId, v: VertexId) -> Option<usize> {
    let m = idx.strip_count() as u32;
    for i in 0..idx.dim() {
        let diff = idx.strip_id(i, u).abs_diff(idx.strip_id(i, v));
        if diff.min(m - diff) <= 1 {
            return Some(i);
        }
    }
    None
}

/// Shared exact decision; mirrors the oracle comparison bit for bit.
struct DecisionCtx<'a> {
    params: &'a ModelParams,
    vertices: &'a [VertexData],
    nf: Real,
}

impl DecisionCtx<'_> {
    #[inline]
    fn decide(&self, u: VertexId, v: VertexId, coin: f64) -> Result<bool> {
        let p = self.params;
        let a = &self.vertices[u as usize];
        let b = &self.vertices[v as usize];
        let dist = p.geometry.distance(&a.position, &b.position)?;
        let volume = p.geometry.volume(p.d, dist)?;
        let mass = self.nf * volume;
        let product = a.weight * b.weight;
        if product < mass {
            // Weak tie: p <= kernel_c * ratio * margin, so this reject agrees
            // with the exact comparison while skipping powf almost always.
            let ratio = product / mass;
            if coin >= p.kernel_c * ratio * REJECT_MARGIN {
                return Ok(false);
            }
        }
        let kv = kernel(a.weight, b.weight, self.nf, volume, p.alpha, p.kernel_c);
        Ok(coin < kv.probability)
    }
}

/// Strip-bucketed sampler: same edge set as [`sample_graph_naive`], faster.
///
/// Pairs split by the strip partition at scale `gamma`:
/// - far pairs (strip gap >= 2 in every coordinate) have distance above the
///   strip width, so their probability is bounded by a per-(vertex, weight
///   class) envelope; one integer compare of the raw coin bits against the
///   envelope threshold rejects almost all of them without touching floats,
///   and survivors get the exact decision;
/// - near pairs are enumerated from the buckets of their first near
///   coordinate (each pair exactly once) and decided exactly.
pub fn sample_graph_bucketed(p: &ModelParams, gamma: Real) -> Result<Graph> {
    p.validate()?;
    let vertices = sample_vertices(p)?;
    let positions: Vec<TorusPoint> = vertices.iter().map(|d| d.position.clone()).collect();
    let idx = StripIndex::new(&positions, gamma)?;
    let m = idx.strip_count();
    let tape = RandomTape::new(p.seed);
    let nf = p.n as Real;
    let ctx = DecisionCtx {
        params: p,
        vertices: &vertices,
        nf,
    };
    let classes = weight_classes(&vertices);
    // Far pairs are strictly farther than one strip width in every
    // coordinate, hence farther than `width` in both geometries.
    let v_far = p.geometry.volume(p.d, idx.width().min(0.5))?;

    // Far pass: per source row, integer-prefilter each class, then decide.
    let far: Vec<Vec<(VertexId, VertexId)>> = (0..p.n as VertexId)
        .into_par_iter()
        .map(|u| {
            let row = tape.edge_row(u);
            let wu = vertices[u as usize].weight;
            let thresholds: Vec<u64> = classes
                .iter()
                .map(|c| {
                    if c.members.is_empty() {
                        return 0;
                    }
                    let p_hat = kernel(wu, c.wmax, nf, v_far, p.alpha, p.kernel_c).probability
                        * ENVELOPE_INFLATE;
                    envelope_threshold(p_hat)
                })
                .collect();
            let mut out = Vec::new();
            for (c, &thr) in classes.iter().zip(&thresholds) {
                let start = c.members.partition_point(|&x| x <= u);
                for &v in &c.members[start..] {
                    if row.coin_bits(v) < thr {
                        if near_owner(&idx, u, v).is_some() {
                            continue; // the near pass owns this pair
                        }
                        if ctx.decide(u, v, row.coin(v))? {
                            out.push((u, v));
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    // Near pass: per (coordinate, strip) cell, same-strip pairs and pairs
    // into the next strip (cyclic); the owner check deduplicates pairs that
    // are near in several coordinates.
    let near: Vec<Vec<(VertexId, VertexId)>> = (0..p.d * m)
        .into_par_iter()
        .map(|cell| {
            let i = cell / m;
            let j = cell % m;
            let same = idx.bucket(i, j);
            let mut out = Vec::new();
            let mut handle = |u: VertexId, v: VertexId| -> Result<()> {
                if near_owner(&idx, u, v) == Some(i) && ctx.decide(u, v, tape.pair_coin(u, v))? {
                    out.push((u, v));
                }
                Ok(())
            };
            for (a_pos, &a) in same.iter().enumerate() {
                for &b in &same[a_pos + 1..] {
                    handle(a, b)?; // buckets ascend, so a < b
                }
            }
            let jn = (j + 1) % m;
            // m = 1 has no distinct next strip; m = 2 would enumerate the
            // single adjacent strip pair twice, so only j = 0 crosses.
            if jn != j && !(m == 2 && j == 1) {
                for &a in same {
                    for &b in idx.bucket(i, jn) {
                        let (u, v) = if a < b { (a, b) } else { (b, a) };
                        handle(u, v)?;
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    // Far and near pairs partition all pairs, so the concatenation is
    // duplicate-free; from_edges re-checks that structurally.
    let mut edges = far.concat();
    edges.extend(near.concat());
    Graph::from_edges(p.n, &edges, Some(vertices))
}
