//! Closed subsets of a metric graph as per-edge unions of closed intervals.

use crate::error::{CoreError, CoreResult};
use crate::graph::{EdgeId, GraphPoint, MetricGraph, VertexId};
use crate::rat::Q;
use num_traits::Zero;
use std::collections::BTreeSet;

/// A closed subset of a metric graph. Per edge, a sorted list of disjoint,
/// non-touching closed intervals; degenerate intervals are single points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    intervals: Vec<Vec<(Q, Q)>>,
}

impl Subgraph {
    pub fn empty(g: &MetricGraph) -> Self {
        Subgraph {
            intervals: vec![Vec::new(); g.edge_count()],
        }
    }

    pub fn whole(g: &MetricGraph) -> Self {
        Subgraph {
            intervals: g
                .edge_ids()
                .map(|e| vec![(Q::zero(), g.len(e).clone())])
                .collect(),
        }
    }

    /// Union of full closed edges.
    pub fn from_edges(g: &MetricGraph, edges: &[EdgeId]) -> CoreResult<Self> {
        let mut s = Subgraph::empty(g);
        for &e in edges {
            if e.0 >= g.edge_count() {
                return Err(CoreError::EdgeRange(e.0));
            }
            s.intervals[e.0] = vec![(Q::zero(), g.len(e).clone())];
        }
        Ok(s)
    }

    pub fn from_intervals(g: &MetricGraph, raw: Vec<(EdgeId, Q, Q)>) -> CoreResult<Self> {
        let mut per_edge: Vec<Vec<(Q, Q)>> = vec![Vec::new(); g.edge_count()];
        for (e, a, b) in raw {
            if e.0 >= g.edge_count() {
                return Err(CoreError::EdgeRange(e.0));
            }
            if a > b || a < Q::zero() || b > *g.len(e) {
                return Err(CoreError::Invariant(format!(
                    "bad interval on edge {}",
                    e.0
                )));
            }
            per_edge[e.0].push((a, b));
        }
        for list in &mut per_edge {
            merge_intervals(list);
        }
        // Canonical form: a single-point interval survives only when no
        // positive interval covers that point under any representation, and it
        // is stored at the point's canonical representation. Without this,
        // equal subsets could compare unequal.
        let mut degenerate: Vec<GraphPoint> = Vec::new();
        for (i, list) in per_edge.iter_mut().enumerate() {
            list.retain(|(a, b)| {
                if a == b {
                    degenerate.push(GraphPoint {
                        edge: EdgeId(i),
                        offset: a.clone(),
                    });
                    false
                } else {
                    true
                }
            });
        }
        let positives = Subgraph {
            intervals: per_edge,
        };
        let mut keep: BTreeSet<GraphPoint> = BTreeSet::new();
        for p in degenerate {
            if !positives.contains(g, &p) {
                keep.insert(g.canonicalize(&p)?);
            }
        }
        let mut out = positives;
        for p in keep {
            let list = &mut out.intervals[p.edge.0];
            let pos = list.partition_point(|(a, _)| *a < p.offset);
            list.insert(pos, (p.offset.clone(), p.offset));
        }
        Ok(out)
    }

    pub fn single_point(g: &MetricGraph, p: &GraphPoint) -> CoreResult<Self> {
        match g.point_vertex(p) {
            Some(v) => {
                let pt = g.vertex_point(v);
                Subgraph::from_intervals(g, vec![(pt.edge, pt.offset.clone(), pt.offset)])
            }
            None => Subgraph::from_intervals(g, vec![(p.edge, p.offset.clone(), p.offset.clone())]),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.iter().all(|l| l.is_empty())
    }

    pub fn intervals_on(&self, e: EdgeId) -> &[(Q, Q)] {
        &self.intervals[e.0]
    }

    /// Membership. Vertex points are checked against every incident edge end.
    pub fn contains(&self, g: &MetricGraph, p: &GraphPoint) -> bool {
        match g.point_vertex(p) {
            Some(v) => g.incident(v).iter().any(|&(e, at_u)| {
                let off = if at_u { Q::zero() } else { g.len(e).clone() };
                self.covers_offset(e, &off)
            }),
            None => self.covers_offset(p.edge, &p.offset),
        }
    }

    pub fn contains_vertex(&self, g: &MetricGraph, v: VertexId) -> bool {
        self.contains(g, &g.vertex_point(v))
    }

    fn covers_offset(&self, e: EdgeId, off: &Q) -> bool {
        self.intervals[e.0]
            .iter()
            .any(|(a, b)| a <= off && off <= b)
    }

    /// Number of tangent directions at `p` that point into the subgraph.
    pub fn tangent_degree(&self, g: &MetricGraph, p: &GraphPoint) -> usize {
        match g.point_vertex(p) {
            Some(v) => g
                .incident(v)
                .iter()
                .filter(|&&(e, at_u)| {
                    self.intervals[e.0].iter().any(|(a, b)| {
                        if at_u {
                            a.is_zero() && *b > Q::zero()
                        } else {
                            *b == *g.len(e) && *a < *g.len(e)
                        }
                    })
                })
                .count(),
            None => match self.intervals[p.edge.0]
                .iter()
                .find(|(a, b)| *a <= p.offset && p.offset <= *b)
            {
                None => 0,
                Some((a, b)) => {
                    (*a < p.offset) as usize + (p.offset < *b) as usize
                }
            },
        }
    }

    /// Directions at `p` leaving the subgraph. Zero for points outside it.
    pub fn outdeg(&self, g: &MetricGraph, p: &GraphPoint) -> usize {
        if !self.contains(g, p) {
            return 0;
        }
        g.directions_at(p) - self.tangent_degree(g, p)
    }

    /// Boundary points: members with at least one outward direction. Finite.
    pub fn boundary_points(&self, g: &MetricGraph) -> Vec<GraphPoint> {
        let mut out = BTreeSet::new();
        for (e, list) in self.intervals.iter().enumerate() {
            for (a, b) in list {
                for off in [a, b] {
                    let p = g.point(EdgeId(e), off.clone()).expect("interval in range");
                    if self.outdeg(g, &p) > 0 {
                        out.insert(p);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Members with exactly one inward tangent direction.
    pub fn leaf_points(&self, g: &MetricGraph) -> Vec<GraphPoint> {
        let mut out = BTreeSet::new();
        for (e, list) in self.intervals.iter().enumerate() {
            for (a, b) in list {
                for off in [a, b] {
                    let p = g.point(EdgeId(e), off.clone()).expect("interval in range");
                    if self.tangent_degree(g, &p) == 1 {
                        out.insert(p);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// True when every interval is a full closed edge.
    pub fn is_union_of_closed_edges(&self, g: &MetricGraph) -> bool {
        self.intervals.iter().enumerate().all(|(e, list)| {
            list.is_empty()
                || (list.len() == 1
                    && list[0].0.is_zero()
                    && list[0].1 == *g.len(EdgeId(e)))
        })
    }

    /// Edges fully contained in the subgraph.
    pub fn full_edges(&self, g: &MetricGraph) -> Vec<EdgeId> {
        self.intervals
            .iter()
            .enumerate()
            .filter(|(e, list)| {
                list.len() == 1 && list[0].0.is_zero() && list[0].1 == *g.len(EdgeId(*e))
            })
            .map(|(e, _)| EdgeId(e))
            .collect()
    }

    /// Connectivity of the subset (empty subgraphs count as connected).
    pub fn is_connected(&self, g: &MetricGraph) -> bool {
        // Nodes are intervals; two intervals touch only at shared vertices.
        let mut nodes = Vec::new();
        for (e, list) in self.intervals.iter().enumerate() {
            for (i, _) in list.iter().enumerate() {
                nodes.push((EdgeId(e), i));
            }
        }
        if nodes.len() <= 1 {
            return true;
        }
        let idx_of = |e: EdgeId, i: usize| nodes.iter().position(|&n| n == (e, i)).unwrap();
        let mut dsu: Vec<usize> = (0..nodes.len()).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let r = find(dsu, dsu[x]);
                dsu[x] = r;
            }
            dsu[x]
        }
        for v in g.vertices() {
            let mut touching = Vec::new();
            for &(e, at_u) in g.incident(v) {
                let off = if at_u { Q::zero() } else { g.len(e).clone() };
                for (i, (a, b)) in self.intervals[e.0].iter().enumerate() {
                    if *a <= off && off <= *b {
                        touching.push(idx_of(e, i));
                    }
                }
            }
            for w in touching.windows(2) {
                let (ra, rb) = (find(&mut dsu, w[0]), find(&mut dsu, w[1]));
                dsu[ra] = rb;
            }
        }
        let root = find(&mut dsu, 0);
        (1..nodes.len()).all(|i| find(&mut dsu, i) == root)
    }

    /// Checks that the subgraph is an embedded circle: a connected union of
    /// full edges in which every touched vertex has exactly two incident
    /// subgraph edge ends.
    pub fn is_embedded_circle(&self, g: &MetricGraph) -> bool {
        if self.is_empty() || !self.is_union_of_closed_edges(g) {
            return false;
        }
        let edges: BTreeSet<EdgeId> = self.full_edges(g).into_iter().collect();
        for v in g.vertices() {
            let ends = g
                .incident(v)
                .iter()
                .filter(|(e, _)| edges.contains(e))
                .count();
            if ends != 0 && ends != 2 {
                return false;
            }
        }
        self.is_connected(g)
    }

    /// Vertices lying in the subgraph.
    pub fn vertices_in(&self, g: &MetricGraph) -> Vec<VertexId> {
        g.vertices().filter(|&v| self.contains_vertex(g, v)).collect()
    }
}

fn merge_intervals(list: &mut Vec<(Q, Q)>) {
    list.sort();
    let mut out: Vec<(Q, Q)> = Vec::with_capacity(list.len());
    for (a, b) in list.drain(..) {
        match out.last_mut() {
            Some((_, pb)) if *pb >= a => {
                if b > *pb {
                    *pb = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    *list = out;
}
