//! Undirected graphs in CSR form, subgraph views, and neighborhood helpers.
//!
//! Vertices are dense `u32` ids. Subgraphs induced by weight or degree
//! thresholds are lightweight views over the parent graph (a membership mask
//! plus the sorted kept ids); algorithms that need a standalone graph can
//! materialize a view with [`SubgraphView::to_graph`], which also returns the
//! new-to-old id mapping. Degree thresholds always refer to degrees in the
//! full parent graph, so a view never changes which vertices pass a degree
//! filter.

use crate::error::{Error, Result};
use crate::model::VertexData;
use crate::{Real, VertexId};

/// Immutable undirected graph in compressed sparse row form.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    m: usize,
    vertex_data: Option<Vec<VertexData>>,
}

impl Graph {
    /// Build a graph from an undirected edge list.
    ///
    /// Edges may be given in any order and orientation but must not contain
    /// self-loops or duplicate pairs; vertex ids must lie below `n`.
    pub fn from_edges(
        n: usize,
        edges: &[(VertexId, VertexId)],
        vertex_data: Option<Vec<VertexData>>,
    ) -> Result<Self> {
        if let Some(data) = &vertex_data {
            if data.len() != n {
                return Err(Error::param("vertex data length must equal n"));
            }
        }
        let mut canon: Vec<(VertexId, VertexId)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::reference("edge endpoint outside vertex range"));
            }
            if a == b {
                return Err(Error::reference("self-loops are not allowed"));
            }
            canon.push(if a < b { (a, b) } else { (b, a) });
        }
        canon.sort_unstable();
        if canon.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::reference("duplicate edge in edge list"));
        }

        let mut degree = vec![0usize; n];
        for &(a, b) in &canon {
            degree[a as usize] += 1;
            degree[b as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for d in &degree {
            acc += d;
            offsets.push(acc);
        }
        let mut cursor = offsets.clone();
        let mut neighbors = vec![0 as VertexId; 2 * canon.len()];
        for &(a, b) in &canon {
            neighbors[cursor[a as usize]] = b;
            cursor[a as usize] += 1;
            neighbors[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        for v in 0..n {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Graph {
            offsets,
            neighbors,
            m: canon.len(),
            vertex_data,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Sorted `(u, v)` pairs with `u < v`.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.vertex_count() as VertexId {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn vertex_data(&self) -> Option<&[VertexData]> {
        self.vertex_data.as_deref()
    }

    pub fn weight(&self, v: VertexId) -> Option<Real> {
        self.vertex_data.as_ref().map(|d| d[v as usize].weight)
    }

    pub fn set_vertex_data(&mut self, data: Vec<VertexData>) -> Result<()> {
        if data.len() != self.vertex_count() {
            return Err(Error::param("vertex data length must equal n"));
        }
        self.vertex_data = Some(data);
        Ok(())
    }

    /// View keeping vertices whose weight lies in the closed band
    /// `[lo, hi]`; pass `f64::INFINITY` for a one-sided threshold.
    pub fn induced_by_weight(&self, lo: Real, hi: Real) -> Result<SubgraphView<'_>> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::param("weight band must satisfy lo <= hi"));
        }
        let data = self
            .vertex_data
            .as_ref()
            .ok_or_else(|| Error::param("graph carries no vertex weights"))?;
        Ok(self.view_from_mask(|v| {
            let w = data[v as usize].weight;
            w >= lo && w <= hi
        }))
    }

    /// View keeping vertices whose full-graph degree lies in `[lo, hi]`.
    pub fn induced_by_degree(&self, lo: usize, hi: usize) -> Result<SubgraphView<'_>> {
        if lo > hi {
            return Err(Error::param("degree band must satisfy lo <= hi"));
        }
        Ok(self.view_from_mask(|v| {
            let deg = self.degree(v);
            deg >= lo && deg <= hi
        }))
    }

    fn view_from_mask(&self, keep: impl Fn(VertexId) -> bool) -> SubgraphView<'_> {
        let n = self.vertex_count();
        let mut member = vec![false; n];
        let mut kept = Vec::new();
        for v in 0..n as VertexId {
            if keep(v) {
                member[v as usize] = true;
                kept.push(v);
            }
        }
        SubgraphView {
            parent: self,
            kept,
            member,
        }
    }
}

/// A subgraph induced by a vertex predicate, kept as a view.
///
/// All ids exposed by a view are parent ids; [`SubgraphView::to_graph`]
/// produces a materialized copy with dense ids plus the mapping back.
#[derive(Debug, Clone)]
pub struct SubgraphView<'a> {
    parent: &'a Graph,
    kept: Vec<VertexId>,
    member: Vec<bool>,
}

impl<'a> SubgraphView<'a> {
    pub fn parent(&self) -> &'a Graph {
        self.parent
    }

    /// Kept vertex ids, sorted ascending.
    pub fn kept(&self) -> &[VertexId] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        (v as usize) < self.member.len() && self.member[v as usize]
    }

    /// Degree of `v` inside the view.
    pub fn induced_degree(&self, v: VertexId) -> usize {
        self.parent
            .neighbors(v)
            .iter()
            .filter(|&&u| self.contains(u))
            .count()
    }

    /// Further restrict the view by a weight band (conjunction of filters).
    pub fn restrict_by_weight(&self, lo: Real, hi: Real) -> Result<SubgraphView<'a>> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::param("weight band must satisfy lo <= hi"));
        }
        let data = self
            .parent
            .vertex_data()
            .ok_or_else(|| Error::param("graph carries no vertex weights"))?;
        Ok(self.restrict(|v| {
            let w = data[v as usize].weight;
            w >= lo && w <= hi
        }))
    }

    /// Further restrict the view by a full-graph degree band.
    pub fn restrict_by_degree(&self, lo: usize, hi: usize) -> Result<SubgraphView<'a>> {
        if lo > hi {
            return Err(Error::param("degree band must satisfy lo <= hi"));
        }
        Ok(self.restrict(|v| {
            let deg = self.parent.degree(v);
            deg >= lo && deg <= hi
        }))
    }

    fn restrict(&self, keep: impl Fn(VertexId) -> bool) -> SubgraphView<'a> {
        let mut member = vec![false; self.member.len()];
        let mut kept = Vec::new();
        for &v in &self.kept {
            if keep(v) {
                member[v as usize] = true;
                kept.push(v);
            }
        }
        SubgraphView {
            parent: self.parent,
            kept,
            member,
        }
    }

    /// Materialize the view as a standalone graph with dense ids.
    ///
    /// Returns the graph and `old_of_new`: the parent id of each new vertex.
    pub fn to_graph(&self) -> Result<(Graph, Vec<VertexId>)> {
        let mut new_of_old = vec![VertexId::MAX; self.member.len()];
        for (new, &old) in self.kept.iter().enumerate() {
            new_of_old[old as usize] = new as VertexId;
        }
        let mut edges = Vec::new();
        for &u in &self.kept {
            for &v in self.parent.neighbors(u) {
                if u < v && self.contains(v) {
                    edges.push((new_of_old[u as usize], new_of_old[v as usize]));
                }
            }
        }
        let data = self
            .parent
            .vertex_data()
            .map(|d| self.kept.iter().map(|&v| d[v as usize].clone()).collect());
        let g = Graph::from_edges(self.kept.len(), &edges, data)?;
        Ok((g, self.kept.clone()))
    }
}

/// Uniform access to a graph or a view for the set-based algorithms.
pub trait AdjacencyLike {
    /// Upper bound of the id space (parent vertex count).
    fn id_bound(&self) -> usize;
    /// Number of active vertices.
    fn order(&self) -> usize;
    fn is_vertex(&self, v: VertexId) -> bool;
    fn for_each_vertex(&self, f: impl FnMut(VertexId));
    /// Visit active neighbors of an active vertex.
    fn for_each_neighbor(&self, v: VertexId, f: impl FnMut(VertexId));

    fn degree_in(&self, v: VertexId) -> usize {
        let mut deg = 0;
        self.for_each_neighbor(v, |_| deg += 1);
        deg
    }
}

impl AdjacencyLike for Graph {
    fn id_bound(&self) -> usize {
        self.vertex_count()
    }

    fn order(&self) -> usize {
        self.vertex_count()
    }

    fn is_vertex(&self, v: VertexId) -> bool {
        (v as usize) < self.vertex_count()
    }

    fn for_each_vertex(&self, mut f: impl FnMut(VertexId)) {
        for v in 0..self.vertex_count() as VertexId {
            f(v);
        }
    }

    fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId)) {
        for &u in self.neighbors(v) {
            f(u);
        }
    }

    fn degree_in(&self, v: VertexId) -> usize {
        self.degree(v)
    }
}

impl AdjacencyLike for SubgraphView<'_> {
    fn id_bound(&self) -> usize {
        self.member.len()
    }

    fn order(&self) -> usize {
        self.kept.len()
    }

    fn is_vertex(&self, v: VertexId) -> bool {
        self.contains(v)
    }

    fn for_each_vertex(&self, mut f: impl FnMut(VertexId)) {
        for &v in &self.kept {
            f(v);
        }
    }

    fn for_each_neighbor(&self, v: VertexId, mut f: impl FnMut(VertexId)) {
        for &u in self.parent.neighbors(v) {
            if self.contains(u) {
                f(u);
            }
        }
    }
}

/// Vertices outside `s` adjacent to at least one vertex of `s`, sorted.
///
/// `s` must consist of distinct active vertices of `g`.
pub fn external_neighborhood<A: AdjacencyLike>(g: &A, s: &[VertexId]) -> Result<Vec<VertexId>> {
    let mut in_s = vec![false; g.id_bound()];
    for &v in s {
        if !g.is_vertex(v) {
            return Err(Error::reference("set vertex is not part of the graph"));
        }
        if std::mem::replace(&mut in_s[v as usize], true) {
            return Err(Error::reference("set contains a duplicate vertex"));
        }
    }
    let mut seen = vec![false; g.id_bound()];
    let mut out = Vec::new();
    for &v in s {
        g.for_each_neighbor(v, |u| {
            if !in_s[u as usize] && !std::mem::replace(&mut seen[u as usize], true) {
                out.push(u);
            }
        });
    }
    out.sort_unstable();
    Ok(out)
}

/// Number of active vertices with no active neighbor.
pub fn isolated_count<A: AdjacencyLike>(g: &A) -> usize {
    let mut count = 0;
    g.for_each_vertex(|v| {
        if g.degree_in(v) == 0 {
            count += 1;
        }
    });
    count
}

/// Connected components with deterministic labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// For each id: the smallest vertex id in its component, or
    /// `VertexId::MAX` for ids that are not active vertices.
    pub representative: Vec<VertexId>,
    /// Component members, each sorted; ordered by representative.
    pub members: Vec<Vec<VertexId>>,
}

impl Components {
    /// Members of a largest component (ties broken by representative).
    pub fn largest(&self) -> &[VertexId] {
        self.members
            .iter()
            .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
            .map(|c| c.as_slice())
            .unwrap_or(&[])
    }
}

/// BFS decomposition into connected components.
pub fn connected_components<A: AdjacencyLike>(g: &A) -> Components {
    let bound = g.id_bound();
    let mut representative = vec![VertexId::MAX; bound];
    let mut members = Vec::new();
    let mut queue = std::collections::VecDeque::new();
    g.for_each_vertex(|start| {
        if representative[start as usize] != VertexId::MAX {
            return;
        }
        // Active ids are scanned ascending, so `start` is the smallest id
        // of its component and serves as the label.
        let mut comp = vec![start];
        representative[start as usize] = start;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            g.for_each_neighbor(v, |u| {
                if representative[u as usize] == VertexId::MAX {
                    representative[u as usize] = start;
                    comp.push(u);
                    queue.push_back(u);
                }
            });
        }
        comp.sort_unstable();
        members.push(comp);
    });
    Components {
        representative,
        members,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::TorusPoint;
    use proptest::prelude::*;

    fn data(weights: &[Real]) -> Vec<VertexData> {
        weights
            .iter()
            .map(|&w| VertexData {
                weight: w,
                position: TorusPoint::new(vec![0.0]).unwrap(),
            })
            .collect()
    }

    fn path4() -> Graph {
        Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)], None).unwrap()
    }

    #[test]
    fn csr_construction_and_queries() {
        let g = path4();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.degree(0), 1);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 3));
        assert_eq!(g.edges(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn from_edges_rejects_malformed_input() {
        assert!(Graph::from_edges(3, &[(0, 3)], None).is_err());
        assert!(Graph::from_edges(3, &[(1, 1)], None).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)], None).is_err());
        assert!(Graph::from_edges(2, &[], Some(data(&[1.0]))).is_err());
    }

    #[test]
    fn external_neighborhood_on_path() {
        let g = path4();
        assert_eq!(external_neighborhood(&g, &[0, 1]).unwrap(), vec![2]);
        assert_eq!(external_neighborhood(&g, &[1]).unwrap(), vec![0, 2]);
        assert_eq!(
            external_neighborhood(&g, &[0, 1, 2, 3]).unwrap(),
            Vec::<VertexId>::new()
        );
        assert!(external_neighborhood(&g, &[0, 0]).is_err());
        assert!(external_neighborhood(&g, &[9]).is_err());
    }

    #[test]
    fn weight_views_and_composition() {
        let mut g = path4();
        g.set_vertex_data(data(&[1.0, 5.0, 7.0, 2.0])).unwrap();
        let v = g.induced_by_weight(4.0, f64::INFINITY).unwrap();
        assert_eq!(v.kept(), &[1, 2]);
        assert_eq!(v.induced_degree(1), 1);

        // Conjunction of weight and degree filters, in either order.
        let both = g
            .induced_by_weight(2.0, f64::INFINITY)
            .unwrap()
            .restrict_by_degree(2, usize::MAX)
            .unwrap();
        assert_eq!(both.kept(), &[1, 2]);
        let other_order = g
            .induced_by_degree(2, usize::MAX)
            .unwrap()
            .restrict_by_weight(2.0, f64::INFINITY)
            .unwrap();
        assert_eq!(both.kept(), other_order.kept());

        assert!(g.induced_by_weight(3.0, 1.0).is_err());
        assert!(path4().induced_by_weight(0.0, 1.0).is_err());
    }

    #[test]
    fn isolated_and_materialization() {
        let mut g = Graph::from_edges(5, &[(0, 1), (1, 2), (3, 4)], None).unwrap();
        g.set_vertex_data(data(&[9.0, 1.0, 9.0, 9.0, 1.0])).unwrap();
        let view = g.induced_by_weight(5.0, f64::INFINITY).unwrap();
        // Kept: {0, 2, 3}; every edge at these vertices leads to a dropped one.
        assert_eq!(view.kept(), &[0, 2, 3]);
        assert_eq!(isolated_count(&view), 3);
        assert_eq!(isolated_count(&g), 0);

        let (small, old_of_new) = view.to_graph().unwrap();
        assert_eq!(small.vertex_count(), 3);
        assert_eq!(small.edge_count(), 0);
        assert_eq!(old_of_new, vec![0, 2, 3]);
    }

    #[test]
    fn components_are_deterministic() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (4, 5)], None).unwrap();
        let c = connected_components(&g);
        assert_eq!(c.members.len(), 3);
        assert_eq!(c.members[0], vec![0, 1, 2]);
        assert_eq!(c.members[1], vec![3]);
        assert_eq!(c.members[2], vec![4, 5]);
        assert_eq!(c.representative[5], 4);
        assert_eq!(c.largest(), &[0, 1, 2]);
    }

    proptest! {
        #[test]
        fn external_neighborhood_is_outside_and_adjacent(
            edges in proptest::collection::vec((0u32..30, 0u32..30), 0..120),
            picks in proptest::collection::vec(0u32..30, 1..8),
        ) {
            let clean: Vec<(u32, u32)> = {
                let mut seen = std::collections::BTreeSet::new();
                edges
                    .into_iter()
                    .filter(|&(a, b)| a != b)
                    .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
                    .filter(|e| seen.insert(*e))
                    .collect()
            };
            let g = Graph::from_edges(30, &clean, None).unwrap();
            let s: Vec<u32> = {
                let set: std::collections::BTreeSet<u32> = picks.into_iter().collect();
                set.into_iter().collect()
            };
            let next = external_neighborhood(&g, &s).unwrap();
            for &v in &next {
                prop_assert!(!s.contains(&v));
                prop_assert!(s.iter().any(|&u| g.has_edge(u, v)));
            }
            // Bound: no larger than the sum of set degrees.
            let deg_sum: usize = s.iter().map(|&u| g.degree(u)).sum();
            prop_assert!(next.len() <= deg_sum);
        }
    }
}
