//! Strip partition of the torus and the covering-probability machinery.
//!
//! Each coordinate axis is split into `M = floor(n / (ln n)^(2*gamma))`
//! strips of width `1/M` (natural logarithm). The spread statistic of a
//! vertex set counts how many distinct strips the set meets per coordinate;
//! `cover_bound` evaluates the analytic upper bound on the probability that
//! some s-subset of the threshold graph concentrates on at most k strips per
//! dimension, and `empirical_cover_probability` measures that event by Monte
//! Carlo.

use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::geometry::TorusPoint;
use crate::graph::SubgraphView;
use crate::model::ModelParams;
use crate::sampler::sample_vertices;
use crate::{Real, VertexId};

/// Strip count and width for a given scale: `M = floor(n / (ln n)^(2*gamma))`.
///
/// Fails when the formula yields zero strips; the error names the smallest
/// vertex count that supports the requested `gamma`.
pub fn strip_width(n: usize, gamma: Real) -> Result<(usize, Real)> {
    if n < 3 {
        return Err(Error::param("strip width requires n >= 3"));
    }
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::param("gamma must be finite and nonnegative"));
    }
    let m = strip_count_raw(n as u64, gamma);
    if m == 0 {
        let hint = match minimum_supported_n(gamma) {
            Some(min_n) => format!(
                "n={n} yields zero strips at gamma={gamma}; the smallest supported n is {min_n}"
            ),
            None => format!("n={n} yields zero strips at gamma={gamma}"),
        };
        return Err(Error::DegenerateStrips(hint));
    }
    Ok((m as usize, 1.0 / m as Real))
}

fn strip_count_raw(n: u64, gamma: Real) -> u64 {
    let f = n as Real / (n as Real).ln().powf(2.0 * gamma);
    if f >= u64::MAX as Real {
        u64::MAX
    } else {
        f as u64
    }
}

/// Smallest `n` from which `strip_width(n, gamma)` succeeds for every larger
/// `n` as well. `None` if the threshold is out of integer range.
pub fn minimum_supported_n(gamma: Real) -> Option<u64> {
    if !gamma.is_finite() || gamma < 0.0 {
        return None;
    }
    // n / (ln n)^(2 gamma) decreases up to n = e^(2 gamma) and increases
    // beyond it, so it is enough to locate the crossing on the rising branch.
    let crit = (2.0 * gamma).exp();
    if !crit.is_finite() {
        return None;
    }
    let start = (crit.ceil() as u64).max(3);
    if strip_count_raw(start, gamma) >= 1 {
        return Some(3);
    }
    let mut hi = start;
    while strip_count_raw(hi, gamma) == 0 {
        hi = hi.checked_mul(2)?;
    }
    let mut lo = start;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if strip_count_raw(mid, gamma) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Partition of every coordinate axis into `M` strips with vertex buckets.
#[derive(Debug, Clone)]
pub struct StripIndex {
    m: usize,
    ell: Real,
    gamma: Option<Real>,
    /// `buckets[i][j]`: ids (ascending) whose coordinate `i` falls in strip `j`.
    buckets: Vec<Vec<Vec<VertexId>>>,
    /// `strip_ids[i][v]`: strip of vertex `v` in coordinate `i`.
    strip_ids: Vec<Vec<u32>>,
}

impl StripIndex {
    /// Build the index at scale `gamma`, with `M` from [`strip_width`].
    pub fn new(positions: &[TorusPoint], gamma: Real) -> Result<Self> {
        let (m, _) = strip_width(positions.len(), gamma)?;
        let mut idx = Self::with_count(positions, m)?;
        idx.gamma = Some(gamma);
        Ok(idx)
    }

    /// Build the index with an explicit strip count per coordinate.
    pub fn with_count(positions: &[TorusPoint], m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::DegenerateStrips("strip count must be positive".into()));
        }
        if positions.is_empty() {
            return Err(Error::param("strip index needs at least one position"));
        }
        let d = positions[0].len();
        if positions.iter().any(|p| p.len() != d) {
            return Err(Error::param("positions must share one dimension"));
        }
        let mut buckets = vec![vec![Vec::new(); m]; d];
        let mut strip_ids = vec![vec![0u32; positions.len()]; d];
        for (v, p) in positions.iter().enumerate() {
            for i in 0..d {
                let j = strip_of_value(p[i], m);
                buckets[i][j].push(v as VertexId);
                strip_ids[i][v] = j as u32;
            }
        }
        Ok(StripIndex {
            m,
            ell: 1.0 / m as Real,
            gamma: None,
            buckets,
            strip_ids,
        })
    }

    pub fn strip_count(&self) -> usize {
        self.m
    }

    pub fn width(&self) -> Real {
        self.ell
    }

    pub fn gamma(&self) -> Option<Real> {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.buckets.len()
    }

    /// Number of indexed vertices.
    pub fn len(&self) -> usize {
        self.strip_ids[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn strip_id(&self, coord: usize, v: VertexId) -> u32 {
        self.strip_ids[coord][v as usize]
    }

    pub fn bucket(&self, coord: usize, strip: usize) -> &[VertexId] {
        &self.buckets[coord][strip]
    }
}

/// Strip containing a coordinate value in `[0, 1)`.
pub fn strip_of_value(x: Real, m: usize) -> usize {
    // x * m can round up to m for x just below 1; clamp to the last strip.
    ((x * m as Real) as usize).min(m - 1)
}

/// Largest per-coordinate number of distinct strips met by `s`, with the
/// first coordinate attaining it.
pub fn strip_spread(idx: &StripIndex, s: &[VertexId]) -> Result<(usize, usize)> {
    if s.is_empty() {
        return Err(Error::param("strip spread of an empty set is undefined"));
    }
    if s.iter().any(|&v| (v as usize) >= idx.len()) {
        return Err(Error::reference("vertex id outside the strip index"));
    }
    let mut best = (0usize, 0usize);
    let mut seen = vec![false; idx.strip_count()];
    for i in 0..idx.dim() {
        seen.iter_mut().for_each(|b| *b = false);
        let mut distinct = 0;
        for &v in s {
            let j = idx.strip_id(i, v) as usize;
            if !std::mem::replace(&mut seen[j], true) {
                distinct += 1;
            }
        }
        if distinct > best.0 {
            best = (distinct, i);
        }
    }
    Ok(best)
}

/// Kept neighbors of `v` sharing its coordinate-`coord` strip, with weight
/// inside the closed band.
pub fn same_strip_neighbors(
    view: &SubgraphView<'_>,
    idx: &StripIndex,
    v: VertexId,
    coord: usize,
    band: (Real, Real),
) -> Result<usize> {
    if coord >= idx.dim() {
        return Err(Error::param("coordinate outside the strip index dimension"));
    }
    if idx.len() != view.parent().vertex_count() {
        return Err(Error::param("strip index does not cover the parent graph"));
    }
    if !view.contains(v) {
        return Err(Error::reference("vertex is not kept by the subgraph view"));
    }
    let (lo, hi) = band;
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::param("weight band must satisfy lo <= hi"));
    }
    let data = view
        .parent()
        .vertex_data()
        .ok_or_else(|| Error::param("graph carries no vertex weights"))?;
    let home = idx.strip_id(coord, v);
    let mut count = 0;
    for &u in view.parent().neighbors(v) {
        if view.contains(u) && idx.strip_id(coord, u) == home {
            let w = data[u as usize].weight;
            if w >= lo && w <= hi {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Input of the covering union bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CoverBoundInput {
    /// Size of the threshold vertex set V'.
    pub nv: usize,
    /// Subset size s.
    pub s: usize,
    /// Strip budget k per dimension.
    pub k: usize,
    /// Strips per dimension M.
    pub m: usize,
    /// Dimension d.
    pub d: usize,
}

impl CoverBoundInput {
    fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::param("cover bound requires d >= 1"));
        }
        if self.s == 0 || self.s > self.nv {
            return Err(Error::param("cover bound requires 1 <= s <= nv"));
        }
        if self.k == 0 || self.k > self.s.min(self.m) {
            return Err(Error::param("cover bound requires 1 <= k <= min(s, M)"));
        }
        Ok(())
    }
}

/// Union bound `C(nv,s) * C(M,k)^d * (k/M)^(d*s)`, capped at 1.
///
/// Small inputs are evaluated as one exact rational; otherwise the bound is
/// assembled in log space from the log-gamma function.
pub fn cover_bound(input: &CoverBoundInput) -> Result<Real> {
    input.validate()?;
    let &CoverBoundInput { nv, s, k, m, d } = input;
    if let Some(p) = cover_bound_exact(nv as u64, s as u64, k as u64, m as u64, d as u32) {
        return Ok(p.min(1.0));
    }
    let ln_p = ln_choose(nv as f64, s as f64)
        + d as f64 * ln_choose(m as f64, k as f64)
        + (d * s) as f64 * (k as f64 / m as f64).ln();
    Ok(ln_p.exp().min(1.0))
}

/// One correctly rounded division when every factor fits exactly in an f64.
fn cover_bound_exact(nv: u64, s: u64, k: u64, m: u64, d: u32) -> Option<f64> {
    const EXACT: u128 = 1 << 53;
    let mut num = choose_u128(nv, s)?;
    let strips = choose_u128(m, k)?;
    for _ in 0..d {
        num = num.checked_mul(strips)?;
    }
    let ds = d.checked_mul(u32::try_from(s).ok()?)?;
    num = num.checked_mul((k as u128).checked_pow(ds)?)?;
    let den = (m as u128).checked_pow(ds)?;
    if num < EXACT && den < EXACT {
        Some(num as f64 / den as f64)
    } else {
        None
    }
}

fn choose_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128; // exact: prefix products of C(n, i+1)
    }
    Some(acc)
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Outcome of the Monte Carlo coverage experiment.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CoverOutcome {
    /// Fraction of trials in which some s-subset of V' met at most k strips
    /// in every dimension.
    pub frequency: f64,
    /// Mean of the per-trial analytic bound at the realized |V'|.
    pub mean_bound: f64,
    /// Whether every trial was decided exactly (d <= 2 at feasible scale);
    /// otherwise `frequency` over-reports and is only an upper bound.
    pub exact: bool,
    pub trials: usize,
}

/// Monte Carlo frequency of the covering event of [`cover_bound`].
///
/// Each trial draws fresh vertex data with seed `p.seed + trial`, takes V'
/// as the vertices of weight at least `(ln n)^gamma`, and decides whether
/// some s-subset of V' meets at most `k` strips in every coordinate.
pub fn empirical_cover_probability(
    p: &ModelParams,
    gamma: Real,
    s: usize,
    k: usize,
    trials: usize,
) -> Result<CoverOutcome> {
    p.validate()?;
    if trials == 0 {
        return Err(Error::param("coverage experiment needs at least one trial"));
    }
    if s == 0 || k == 0 {
        return Err(Error::param("coverage experiment needs s >= 1 and k >= 1"));
    }
    let (m, _) = strip_width(p.n, gamma)?;
    if k > m {
        return Err(Error::param("strip budget k must not exceed M"));
    }
    let threshold = (p.n as Real).ln().powf(gamma);

    let per_trial: Vec<(bool, bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let params = ModelParams {
                seed: p.seed.wrapping_add(t as u64),
                ..*p
            };
            let vertices = sample_vertices(&params)?;
            let members: Vec<usize> = (0..params.n)
                .filter(|&v| vertices[v].weight >= threshold)
                .collect();
            let nv = members.len();
            let bound = if nv < s {
                0.0
            } else {
                cover_bound(&CoverBoundInput {
                    nv,
                    s,
                    k: k.min(s),
                    m,
                    d: params.d,
                })?
            };
            let strips: Vec<Vec<u32>> = members
                .iter()
                .map(|&v| {
                    (0..params.d)
                        .map(|i| strip_of_value(vertices[v].position[i], m) as u32)
                        .collect()
                })
                .collect();
            let (covered, exact) = coverage_exists(&strips, params.d, s, k);
            Ok((covered, exact, bound))
        })
        .collect::<Result<_>>()?;

    let hits = per_trial.iter().filter(|r| r.0).count();
    let exact = per_trial.iter().all(|r| r.1);
    let mean_bound = per_trial.iter().map(|r| r.2).sum::<f64>() / trials as f64;
    Ok(CoverOutcome {
        frequency: hits as f64 / trials as f64,
        mean_bound,
        exact,
        trials,
    })
}

/// Budget on subset-pair enumeration for the exact d=2 decision.
const EXACT_COVER_BUDGET: u128 = 4_000_000;

/// Decide whether some s-subset of the given per-vertex strip tuples meets
/// at most k strips in every dimension. Returns (decision, exact flag).
fn coverage_exists(strips: &[Vec<u32>], d: usize, s: usize, k: usize) -> (bool, bool) {
    if strips.len() < s {
        return (false, true);
    }
    match d {
        1 => {
            let mut counts = occupancy_1d(strips, 0);
            counts.sort_unstable_by(|a, b| b.1.cmp(&a.1));
            let best: usize = counts.iter().take(k).map(|&(_, c)| c).sum();
            (best >= s, true)
        }
        2 => coverage_exists_2d(strips, s, k),
        _ => coverage_per_dim_relaxation(strips, d, s, k),
    }
}

/// Necessary condition only: each dimension separately admits k strips
/// holding >= s vertices. Over-reports the event, hence flagged inexact.
fn coverage_per_dim_relaxation(strips: &[Vec<u32>], d: usize, s: usize, k: usize) -> (bool, bool) {
    let ok = (0..d).all(|i| {
        let mut counts = occupancy_1d(strips, i);
        counts.sort_unstable_by(|a, b| b.1.cmp(&a.1));
        counts.iter().take(k).map(|&(_, c)| c).sum::<usize>() >= s
    });
    (ok, false)
}

fn occupancy_1d(strips: &[Vec<u32>], coord: usize) -> Vec<(u32, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for t in strips {
        *counts.entry(t[coord]).or_insert(0usize) += 1;
    }
    counts.into_iter().collect()
}

fn coverage_exists_2d(strips: &[Vec<u32>], s: usize, k: usize) -> (bool, bool) {
    let cols: Vec<u32> = {
        let set: std::collections::BTreeSet<u32> = strips.iter().map(|t| t[0]).collect();
        set.into_iter().collect()
    };
    let rows: Vec<u32> = {
        let set: std::collections::BTreeSet<u32> = strips.iter().map(|t| t[1]).collect();
        set.into_iter().collect()
    };
    let kc = k.min(cols.len());
    let kr = k.min(rows.len());
    let combos = n_choose_k_u128(cols.len(), kc).saturating_mul(n_choose_k_u128(rows.len(), kr));
    if combos > EXACT_COVER_BUDGET {
        // Too many subset pairs; report the per-dimension relaxation.
        return coverage_per_dim_relaxation(strips, 2, s, k);
    }
    let col_pos: std::collections::BTreeMap<u32, usize> =
        cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let row_pos: std::collections::BTreeMap<u32, usize> =
        rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut occupancy = vec![vec![0usize; rows.len()]; cols.len()];
    for t in strips {
        occupancy[col_pos[&t[0]]][row_pos[&t[1]]] += 1;
    }
    let mut found = false;
    for_each_subset(cols.len(), kc, &mut |cs| {
        if found {
            return;
        }
        for_each_subset(rows.len(), kr, &mut |rs| {
            if found {
                return;
            }
            let total: usize = cs
                .iter()
                .map(|&c| rs.iter().map(|&r| occupancy[c][r]).sum::<usize>())
                .sum();
            if total >= s {
                found = true;
            }
        });
    });
    (found, true)
}

fn n_choose_k_u128(n: usize, k: usize) -> u128 {
    choose_u128(n as u64, k as u64).unwrap_or(u128::MAX)
}

/// Visit every k-subset of {0, .., n-1} in lexicographic order.
fn for_each_subset(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == 0 || k > n {
        if k == 0 {
            f(&[]);
        }
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance the rightmost index that can still move.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Geometry;
    use proptest::prelude::*;

    fn points(raw: &[&[Real]]) -> Vec<TorusPoint> {
        raw.iter()
            .map(|c| TorusPoint::new(c.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn strip_width_pinned_values() {
        // Oracle: high-precision arithmetic for n / (ln n)^(2 gamma).
        let (m, ell) = strip_width(1000, 1.0).unwrap();
        assert_eq!(m, 20);
        assert_eq!(ell, 0.05);
        assert_eq!(strip_width(10_000, 1.0).unwrap().0, 117);
    }

    #[test]
    fn strip_width_degenerate_names_minimal_n() {
        let err = strip_width(1000, 2.0).unwrap_err();
        let msg = err.to_string();
        let min_n = minimum_supported_n(2.0).unwrap();
        assert!(msg.contains(&min_n.to_string()), "message was: {msg}");
        assert!(strip_width(min_n as usize, 2.0).is_ok());
        assert!(strip_width(min_n as usize - 1, 2.0).is_err());
        assert!(strip_width(2, 1.0).is_err());
    }

    #[test]
    fn strip_index_partitions_vertices() {
        let pos = points(&[&[0.0, 0.5], &[0.999, 0.2], &[0.41, 0.43], &[0.6, 0.81]]);
        let idx = StripIndex::with_count(&pos, 5).unwrap();
        assert_eq!(idx.strip_count(), 5);
        assert_eq!(idx.dim(), 2);
        for i in 0..idx.dim() {
            let total: usize = (0..5).map(|j| idx.bucket(i, j).len()).sum();
            assert_eq!(total, pos.len());
        }
        // Coordinate just below 1.0 stays in the last strip.
        assert_eq!(idx.strip_id(0, 1), 4);
        assert_eq!(idx.strip_id(0, 0), 0);
        assert_eq!(idx.strip_id(1, 2), 2);
    }

    #[test]
    fn strip_spread_matches_two_strip_configuration() {
        // Three vertices inside one vertical strip but two horizontal ones.
        let pos = points(&[&[0.11, 0.21], &[0.13, 0.41], &[0.15, 0.45]]);
        let idx = StripIndex::with_count(&pos, 5).unwrap();
        let (k_star, coord) = strip_spread(&idx, &[0, 1, 2]).unwrap();
        assert_eq!(k_star, 2);
        assert_eq!(coord, 1);

        assert_eq!(strip_spread(&idx, &[1]).unwrap().0, 1);
        assert!(strip_spread(&idx, &[]).is_err());
        assert!(strip_spread(&idx, &[7]).is_err());
    }

    #[test]
    fn strip_spread_hits_set_size_on_distinct_strips() {
        let pos = points(&[&[0.05], &[0.25], &[0.45], &[0.65], &[0.85]]);
        let idx = StripIndex::with_count(&pos, 5).unwrap();
        assert_eq!(strip_spread(&idx, &[0, 1, 2, 3, 4]).unwrap(), (5, 0));
    }

    #[test]
    fn same_strip_neighbor_counts() {
        use crate::graph::Graph;
        use crate::model::VertexData;
        let pos = points(&[&[0.11], &[0.13], &[0.31], &[0.12]]);
        let data: Vec<VertexData> = pos
            .iter()
            .zip([2.0, 8.0, 8.0, 3.0])
            .map(|(p, w)| VertexData {
                weight: w,
                position: p.clone(),
            })
            .collect();
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)], Some(data)).unwrap();
        let idx = StripIndex::with_count(&pos, 5).unwrap();
        let view = g.induced_by_weight(1.0, f64::INFINITY).unwrap();
        // Neighbors of 0 in its strip: 1 (w=8) and 3 (w=3); 2 sits elsewhere.
        let all = same_strip_neighbors(&view, &idx, 0, 0, (1.0, f64::INFINITY)).unwrap();
        assert_eq!(all, 2);
        let banded = same_strip_neighbors(&view, &idx, 0, 0, (4.0, 10.0)).unwrap();
        assert_eq!(banded, 1);
        let heavy = g.induced_by_weight(7.0, f64::INFINITY).unwrap();
        assert!(same_strip_neighbors(&heavy, &idx, 0, 0, (1.0, 2.0)).is_err());
        assert!(same_strip_neighbors(&view, &idx, 0, 9, (1.0, 2.0)).is_err());
    }

    #[test]
    fn cover_bound_pinned_value() {
        // Exact rational oracle: 120 * 25 * (1/5)^6 = 3000/15625 = 0.192.
        let p = cover_bound(&CoverBoundInput {
            nv: 10,
            s: 3,
            k: 1,
            m: 5,
            d: 2,
        })
        .unwrap();
        assert_eq!(p, 0.192);
    }

    #[test]
    fn cover_bound_caps_at_one() {
        let full = cover_bound(&CoverBoundInput {
            nv: 10,
            s: 10,
            k: 5,
            m: 5,
            d: 1,
        })
        .unwrap();
        assert_eq!(full, 1.0);
        let k_equals_m = cover_bound(&CoverBoundInput {
            nv: 40,
            s: 6,
            k: 5,
            m: 5,
            d: 3,
        })
        .unwrap();
        assert_eq!(k_equals_m, 1.0);
    }

    #[test]
    fn cover_bound_rejects_bad_input() {
        let bad = [
            CoverBoundInput { nv: 10, s: 0, k: 1, m: 5, d: 2 },
            CoverBoundInput { nv: 10, s: 11, k: 1, m: 5, d: 2 },
            CoverBoundInput { nv: 10, s: 3, k: 4, m: 5, d: 2 },
            CoverBoundInput { nv: 10, s: 3, k: 6, m: 5, d: 1 },
            CoverBoundInput { nv: 10, s: 3, k: 1, m: 5, d: 0 },
        ];
        for input in bad {
            assert!(cover_bound(&input).is_err(), "accepted {input:?}");
        }
    }

    #[test]
    fn log_space_path_matches_exact_path() {
        for nv in [5usize, 12, 30] {
            for s in [1usize, 3, 5] {
                for (m, k) in [(5usize, 1usize), (8, 2), (20, 3)] {
                    if s > nv || k > s.min(m) {
                        continue;
                    }
                    let input = CoverBoundInput { nv, s, k, m, d: 2 };
                    let got = cover_bound(&input).unwrap();
                    let ln_p = ln_choose(nv as f64, s as f64)
                        + 2.0 * ln_choose(m as f64, k as f64)
                        + (2 * s) as f64 * (k as f64 / m as f64).ln();
                    let logged = ln_p.exp().min(1.0);
                    match cover_bound_exact(nv as u64, s as u64, k as u64, m as u64, 2) {
                        Some(exact) => {
                            let exact = exact.min(1.0);
                            assert_eq!(got, exact);
                            assert!(
                                (logged - exact).abs() <= 1e-9 * exact.max(1e-300),
                                "paths disagree at {input:?}: {logged} vs {exact}"
                            );
                        }
                        // Counts past 2^53 fall back to log space.
                        None => assert!(
                            (logged - got).abs() <= 1e-12 * got.max(1e-300),
                            "fallback differs at {input:?}: {logged} vs {got}"
                        ),
                    }
                }
            }
        }
    }

    /// Stirling-style upper bound on ln C(n, k): the closed form the analytic
    /// argument uses. The exact log-binomial must never exceed it.
    fn stirling_ln_choose(n: f64, k: f64) -> f64 {
        if k == 0.0 || k == n {
            return 0.0;
        }
        let r = |x: f64| 0.5 * (2.0 * std::f64::consts::PI * x).ln();
        (n - k) * (n / (n - k)).ln() + k * (n / k).ln() + r(n) - r(n - k) - r(k)
    }

    #[test]
    fn exact_log_binomial_below_stirling_form() {
        for n in [5u64, 10, 50, 200, 1000] {
            for k in 1..n.min(12) {
                let exact = ln_choose(n as f64, k as f64);
                let stirling = stirling_ln_choose(n as f64, k as f64);
                assert!(
                    exact <= stirling + 1e-9,
                    "n={n} k={k}: exact {exact} > stirling {stirling}"
                );
            }
        }
    }

    fn desk_params(n: usize, seed: u64) -> ModelParams {
        ModelParams {
            n,
            d: 2,
            tau: 2.5,
            alpha: 1.5,
            kernel_c: 1.0,
            geometry: Geometry::Mcd,
            seed,
        }
    }

    #[test]
    fn coverage_frequency_trivial_cases() {
        // s = 1 is always covered as long as V' is nonempty.
        let p = desk_params(60, 11);
        let out = empirical_cover_probability(&p, 0.2, 1, 1, 20).unwrap();
        assert_eq!(out.frequency, 1.0);
        assert!(out.exact);
        // k = M covers every set of size <= |V'|.
        let (m, _) = strip_width(60, 0.2).unwrap();
        let out = empirical_cover_probability(&p, 0.2, 2, m, 20).unwrap();
        assert_eq!(out.frequency, 1.0);
        assert!(empirical_cover_probability(&p, 0.2, 2, m + 1, 5).is_err());
        assert!(empirical_cover_probability(&p, 0.2, 0, 1, 5).is_err());
        assert!(empirical_cover_probability(&p, 0.2, 2, 1, 0).is_err());
    }

    #[test]
    fn coverage_decision_enumerates_exactly() {
        // Four vertices, strips (0,0), (0,1), (3,0), (3,1): any 3 of them
        // meet 2 strips in each dimension but never 1 strip in both.
        let strips = vec![vec![0, 0], vec![0, 1], vec![3, 0], vec![3, 1]];
        assert_eq!(coverage_exists(&strips, 2, 3, 2), (true, true));
        assert_eq!(coverage_exists(&strips, 2, 3, 1), (false, true));
        assert_eq!(coverage_exists(&strips, 2, 2, 1), (false, true));
        // Two in one cell -> coverable with k = 1 at s = 2.
        let strips = vec![vec![0, 0], vec![0, 0], vec![3, 1]];
        assert_eq!(coverage_exists(&strips, 2, 2, 1), (true, true));
        assert_eq!(coverage_exists(&strips, 2, 4, 2), (false, true));
    }

    #[test]
    fn subset_enumeration_visits_all_combinations() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, &mut |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 1],
                vec![0, 2],
                vec![0, 3],
                vec![1, 2],
                vec![1, 3],
                vec![2, 3]
            ]
        );
        let mut count = 0;
        for_each_subset(6, 3, &mut |_| count += 1);
        assert_eq!(count, 20);
    }

    proptest! {
        #[test]
        fn spread_of_union_dominates_parts(
            coords in proptest::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..24),
            split in 1usize..23,
        ) {
            let pos: Vec<TorusPoint> = coords
                .iter()
                .map(|&(a, b)| TorusPoint::new(vec![a, b]).unwrap())
                .collect();
            let idx = StripIndex::with_count(&pos, 7).unwrap();
            let ids: Vec<VertexId> = (0..pos.len() as VertexId).collect();
            let cut = split.min(ids.len() - 1).max(1);
            let (s1, s2) = ids.split_at(cut);
            let union = strip_spread(&idx, &ids).unwrap().0;
            let a = strip_spread(&idx, s1).unwrap().0;
            let b = strip_spread(&idx, s2).unwrap().0;
            prop_assert!(union >= a.max(b));
            prop_assert!(union <= ids.len().min(7));
        }

        #[test]
        fn strip_of_value_stays_in_range(x in 0.0..1.0f64, m in 1usize..2000) {
            let j = strip_of_value(x, m);
            prop_assert!(j < m);
            // The strip interval [j/m, (j+1)/m) contains x up to fp rounding.
            prop_assert!((x - j as f64 / m as f64) > -1e-12);
        }
    }
}
