//! Metric graphs: connected multigraphs with positive rational edge lengths.

use crate::error::{CoreError, CoreResult};
use crate::rat::{format_q, Q};
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub usize);

#[derive(Debug, Clone)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub len: Q,
}

/// A point of the metric graph, addressed on a specific edge.
///
/// Points at vertices admit one representation per incident edge end; the
/// canonical one (produced by [`MetricGraph::point`] and friends) uses the
/// lowest incident edge id, preferring its `u` end. All divisor and subgraph
/// code stores canonical points only, so equality and ordering are reliable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphPoint {
    pub edge: EdgeId,
    pub offset: Q,
}

impl fmt::Display for GraphPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}@{}", self.edge.0, format_q(&self.offset))
    }
}

/// Connected multigraph with positive rational edge lengths. Immutable after
/// construction; self-loops and parallel edges are allowed.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    // Per vertex: (edge, attaches at the u end), sorted. Self-loops appear twice.
    incident: Vec<Vec<(EdgeId, bool)>>,
}

impl MetricGraph {
    pub fn new(names: Vec<String>, edges: Vec<(usize, usize, Q)>) -> CoreResult<Self> {
        let nv = names.len();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(CoreError::DuplicateVertex(n.clone()));
            }
        }
        if edges.is_empty() {
            return Err(CoreError::Disconnected);
        }
        let mut es = Vec::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); nv];
        for (i, (u, v, len)) in edges.into_iter().enumerate() {
            if u >= nv || v >= nv {
                return Err(CoreError::BadEndpoint(i));
            }
            if len <= Q::zero() {
                return Err(CoreError::NonpositiveLength(i));
            }
            incident[u].push((EdgeId(i), true));
            incident[v].push((EdgeId(i), false));
            es.push(Edge {
                u: VertexId(u),
                v: VertexId(v),
                len,
            });
        }
        for inc in &mut incident {
            inc.sort();
        }
        let g = MetricGraph {
            names,
            edges: es,
            incident,
        };
        if !g.is_connected() {
            return Err(CoreError::Disconnected);
        }
        Ok(g)
    }

    /// Convenience constructor with vertices named `v0..v{n-1}`.
    pub fn from_edges(n_vertices: usize, edges: Vec<(usize, usize, Q)>) -> CoreResult<Self> {
        let names = (0..n_vertices).map(|i| format!("v{i}")).collect();
        Self::new(names, edges)
    }

    fn is_connected(&self) -> bool {
        let nv = self.names.len();
        if nv == 0 {
            return false;
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(e, _) in &self.incident[v] {
                let edge = &self.edges[e.0];
                for w in [edge.u.0, edge.v.0] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.names.len()).map(VertexId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len()).map(EdgeId)
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.0]
    }

    pub fn len(&self, e: EdgeId) -> &Q {
        &self.edges[e.0].len
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn vertex_by_name(&self, name: &str) -> CoreResult<VertexId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(VertexId)
            .ok_or_else(|| CoreError::UnknownVertex(name.to_string()))
    }

    /// Incident edge ends at `v` as (edge, attaches at u end), sorted.
    pub fn incident(&self, v: VertexId) -> &[(EdgeId, bool)] {
        &self.incident[v.0]
    }

    /// Number of tangent directions at `v`; self-loops count twice.
    pub fn valence(&self, v: VertexId) -> usize {
        self.incident[v.0].len()
    }

    /// First Betti number g = E - V + 1 (the graph is connected).
    pub fn betti(&self) -> usize {
        self.edges.len() + 1 - self.names.len()
    }

    /// Total edge length.
    pub fn total_length(&self) -> Q {
        self.edges.iter().map(|e| e.len.clone()).sum()
    }

    /// Canonical point for a vertex: lowest incident edge id, u end preferred.
    pub fn vertex_point(&self, v: VertexId) -> GraphPoint {
        let &(e, at_u) = self.incident[v.0]
            .first()
            .expect("graphs have no isolated vertices");
        let offset = if at_u {
            Q::zero()
        } else {
            self.edges[e.0].len.clone()
        };
        GraphPoint { edge: e, offset }
    }

    /// Canonical point at `offset` along edge `e`. Endpoint offsets collapse
    /// to the canonical vertex representation.
    pub fn point(&self, e: EdgeId, offset: Q) -> CoreResult<GraphPoint> {
        if e.0 >= self.edges.len() {
            return Err(CoreError::EdgeRange(e.0));
        }
        let edge = &self.edges[e.0];
        if offset < Q::zero() || offset > edge.len {
            return Err(CoreError::OffsetRange {
                edge: e.0,
                offset: format_q(&offset),
                len: format_q(&edge.len),
            });
        }
        if offset.is_zero() {
            Ok(self.vertex_point(edge.u))
        } else if offset == edge.len {
            Ok(self.vertex_point(edge.v))
        } else {
            Ok(GraphPoint { edge: e, offset })
        }
    }

    pub fn canonicalize(&self, p: &GraphPoint) -> CoreResult<GraphPoint> {
        self.point(p.edge, p.offset.clone())
    }

    /// The vertex a point sits at, if any. Works for any representation.
    pub fn point_vertex(&self, p: &GraphPoint) -> Option<VertexId> {
        let edge = &self.edges[p.edge.0];
        if p.offset.is_zero() {
            Some(edge.u)
        } else if p.offset == edge.len {
            Some(edge.v)
        } else {
            None
        }
    }

    /// Midpoint of an edge.
    pub fn midpoint(&self, e: EdgeId) -> GraphPoint {
        GraphPoint {
            edge: e,
            offset: self.edges[e.0].len.clone() / crate::rat::qi(2),
        }
    }

    /// Tangent directions at a point: valence at vertices, 2 inside edges.
    pub fn directions_at(&self, p: &GraphPoint) -> usize {
        match self.point_vertex(p) {
            Some(v) => self.valence(v),
            None => 2,
        }
    }

    /// Exact single-source shortest-path distances to every vertex.
    /// Sources are (vertex, initial distance) pairs.
    pub fn vertex_distances(&self, sources: &[(VertexId, Q)]) -> Vec<Q> {
        let nv = self.names.len();
        let mut dist: Vec<Option<Q>> = vec![None; nv];
        for (v, d0) in sources {
            match &dist[v.0] {
                Some(d) if *d <= *d0 => {}
                _ => dist[v.0] = Some(d0.clone()),
            }
        }
        let mut done = vec![false; nv];
        for _ in 0..nv {
            let mut best: Option<usize> = None;
            for v in 0..nv {
                if done[v] || dist[v].is_none() {
                    continue;
                }
                match best {
                    None => best = Some(v),
                    Some(b) => {
                        if dist[v].as_ref().unwrap() < dist[b].as_ref().unwrap() {
                            best = Some(v);
                        }
                    }
                }
            }
            let Some(v) = best else { break };
            done[v] = true;
            let dv = dist[v].clone().unwrap();
            for &(e, _) in &self.incident[v] {
                let edge = &self.edges[e.0];
                let w = if edge.u.0 == v { edge.v.0 } else { edge.u.0 };
                let cand = dv.clone() + edge.len.clone();
                match &dist[w] {
                    Some(d) if *d <= cand => {}
                    _ => dist[w] = Some(cand),
                }
            }
        }
        dist.into_iter()
            .map(|d| d.expect("graph is connected"))
            .collect()
    }
}
