//! Continuous piecewise linear functions with integer slopes.

use crate::divisor::{canonical_divisor, Divisor};
use crate::error::{CoreError, CoreResult};
use crate::graph::{EdgeId, GraphPoint, MetricGraph, VertexId};
use crate::rat::{format_q, to_i64, Q};
use crate::subgraph::Subgraph;
use num_traits::Zero;

/// A continuous piecewise linear function on a metric graph, with integer
/// slopes. Stored per edge as breakpoint lists `(offset, value)` covering the
/// whole edge; adjacent collinear segments are always merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLFunction {
    tracks: Vec<Vec<(Q, Q)>>,
}

impl PLFunction {
    /// Builds a function from per-edge breakpoints and validates continuity,
    /// coverage, and slope integrality.
    pub fn from_tracks(g: &MetricGraph, tracks: Vec<Vec<(Q, Q)>>) -> CoreResult<Self> {
        if tracks.len() != g.edge_count() {
            return Err(CoreError::GraphMismatch);
        }
        for (e, track) in tracks.iter().enumerate() {
            if track.len() < 2
                || !track[0].0.is_zero()
                || track.last().unwrap().0 != *g.len(EdgeId(e))
            {
                return Err(CoreError::BadTrack(e));
            }
            for w in track.windows(2) {
                if w[0].0 >= w[1].0 {
                    return Err(CoreError::BadTrack(e));
                }
                let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
                if !slope.is_integer() {
                    return Err(CoreError::NonIntegerSlope(e, format_q(&slope)));
                }
            }
        }
        let mut f = PLFunction { tracks };
        f.check_continuity(g)?;
        f.normalize();
        Ok(f)
    }

    pub fn constant(g: &MetricGraph, c: Q) -> Self {
        PLFunction {
            tracks: g
                .edge_ids()
                .map(|e| vec![(Q::zero(), c.clone()), (g.len(e).clone(), c.clone())])
                .collect(),
        }
    }

    fn check_continuity(&self, g: &MetricGraph) -> CoreResult<()> {
        for v in g.vertices() {
            let mut val: Option<Q> = None;
            for &(e, at_u) in g.incident(v) {
                let track = &self.tracks[e.0];
                let here = if at_u {
                    track[0].1.clone()
                } else {
                    track.last().unwrap().1.clone()
                };
                match &val {
                    None => val = Some(here),
                    Some(x) if *x == here => {}
                    Some(_) => {
                        return Err(CoreError::Discontinuous(g.vertex_name(v).to_string()))
                    }
                }
            }
        }
        Ok(())
    }

    fn normalize(&mut self) {
        for track in &mut self.tracks {
            let mut out: Vec<(Q, Q)> = Vec::with_capacity(track.len());
            for (t, v) in track.drain(..) {
                while out.len() >= 2 {
                    let n = out.len();
                    let (t0, v0) = out[n - 2].clone();
                    let (t1, v1) = out[n - 1].clone();
                    // Drop the middle breakpoint when the three points are collinear.
                    let lhs = (&v1 - &v0) * (&t - &t1);
                    let rhs = (&v - &v1) * (&t1 - &t0);
                    if lhs == rhs {
                        out.pop();
                    } else {
                        break;
                    }
                }
                out.push((t, v));
            }
            *track = out;
        }
    }

    pub fn matches(&self, g: &MetricGraph) -> bool {
        self.tracks.len() == g.edge_count()
            && self
                .tracks
                .iter()
                .enumerate()
                .all(|(e, t)| t.last().map(|p| p.0 == *g.len(EdgeId(e))).unwrap_or(false))
    }

    fn require_match(&self, g: &MetricGraph) -> CoreResult<()> {
        if self.matches(g) {
            Ok(())
        } else {
            Err(CoreError::GraphMismatch)
        }
    }

    pub fn track(&self, e: EdgeId) -> &[(Q, Q)] {
        &self.tracks[e.0]
    }

    /// Offsets of interior breakpoints on an edge.
    pub fn interior_breakpoints(&self, e: EdgeId) -> impl Iterator<Item = &Q> {
        let track = &self.tracks[e.0];
        track[1..track.len() - 1].iter().map(|(t, _)| t)
    }

    pub fn eval(&self, p: &GraphPoint) -> Q {
        let track = &self.tracks[p.edge.0];
        let i = track.partition_point(|(t, _)| *t <= p.offset);
        if i == 0 {
            return track[0].1.clone();
        }
        let (t0, v0) = &track[i - 1];
        if *t0 == p.offset || i == track.len() {
            return v0.clone();
        }
        let (t1, v1) = &track[i];
        v0 + (v1 - v0) * (&p.offset - t0) / (t1 - t0)
    }

    pub fn vertex_value(&self, g: &MetricGraph, v: VertexId) -> Q {
        self.eval(&g.vertex_point(v))
    }

    /// Slope leaving `v` along the given incident edge end, for the end kind
    /// recorded in the graph's incidence lists.
    pub fn outgoing_slope(&self, e: EdgeId, at_u: bool) -> Q {
        let track = &self.tracks[e.0];
        if at_u {
            let (t0, v0) = &track[0];
            let (t1, v1) = &track[1];
            (v1 - v0) / (t1 - t0)
        } else {
            let n = track.len();
            let (t0, v0) = &track[n - 2];
            let (t1, v1) = &track[n - 1];
            (v0 - v1) / (t1 - t0)
        }
    }

    pub fn add(&self, g: &MetricGraph, other: &PLFunction) -> CoreResult<PLFunction> {
        self.require_match(g)?;
        other.require_match(g)?;
        let tracks = self
            .tracks
            .iter()
            .zip(&other.tracks)
            .map(|(a, b)| combine_tracks(a, b, |x, y| x + y))
            .collect();
        let mut f = PLFunction { tracks };
        f.normalize();
        Ok(f)
    }

    pub fn sub(&self, g: &MetricGraph, other: &PLFunction) -> CoreResult<PLFunction> {
        self.add(g, &other.scale(-1))
    }

    /// Pointwise minimum; the result is again piecewise linear with integer slopes.
    pub fn min(&self, g: &MetricGraph, other: &PLFunction) -> CoreResult<PLFunction> {
        self.require_match(g)?;
        other.require_match(g)?;
        let tracks = self
            .tracks
            .iter()
            .zip(&other.tracks)
            .map(|(a, b)| min_tracks(a, b))
            .collect();
        let mut f = PLFunction { tracks };
        f.normalize();
        Ok(f)
    }

    /// Integer scaling (keeps slopes integral).
    pub fn scale(&self, k: i64) -> PLFunction {
        let kq = crate::rat::qi(k);
        PLFunction {
            tracks: self
                .tracks
                .iter()
                .map(|t| t.iter().map(|(x, v)| (x.clone(), v * &kq)).collect())
                .collect(),
        }
    }

    /// Adds a constant.
    pub fn shift(&self, c: &Q) -> PLFunction {
        PLFunction {
            tracks: self
                .tracks
                .iter()
                .map(|t| t.iter().map(|(x, v)| (x.clone(), v + c)).collect())
                .collect(),
        }
    }

    /// Global minimum value.
    pub fn min_value(&self) -> Q {
        self.tracks
            .iter()
            .flat_map(|t| t.iter().map(|(_, v)| v))
            .min()
            .expect("functions cover at least one edge")
            .clone()
    }

    /// The locus where the global minimum is attained, as a closed subgraph.
    pub fn min_locus(&self, g: &MetricGraph) -> Subgraph {
        let m = self.min_value();
        let mut raw = Vec::new();
        for (e, track) in self.tracks.iter().enumerate() {
            for w in track.windows(2) {
                let (t0, v0) = &w[0];
                let (t1, v1) = &w[1];
                if *v0 == m && *v1 == m {
                    raw.push((EdgeId(e), t0.clone(), t1.clone()));
                } else if *v0 == m {
                    raw.push((EdgeId(e), t0.clone(), t0.clone()));
                } else if *v1 == m {
                    raw.push((EdgeId(e), t1.clone(), t1.clone()));
                }
            }
        }
        Subgraph::from_intervals(g, raw).expect("locus intervals are in range")
    }

    /// The divisor of the function: at each point, minus the sum of outgoing
    /// slopes. Supported on breakpoints and vertices; always degree zero.
    pub fn divisor(&self, g: &MetricGraph) -> Divisor {
        let mut d = Divisor::zero();
        for (e, track) in self.tracks.iter().enumerate() {
            for i in 1..track.len() - 1 {
                let (t0, v0) = &track[i - 1];
                let (t1, v1) = &track[i];
                let (t2, v2) = &track[i + 1];
                let s_in = (v1 - v0) / (t1 - t0);
                let s_out = (v2 - v1) / (t2 - t1);
                let ord = to_i64(&(s_in - s_out)).expect("validated integer slopes");
                if ord != 0 {
                    let p = g
                        .point(EdgeId(e), t1.clone())
                        .expect("breakpoints lie on the edge");
                    d.add_point(g, &p, ord).unwrap();
                }
            }
        }
        for v in g.vertices() {
            let mut outgoing = Q::zero();
            for &(e, at_u) in g.incident(v) {
                outgoing += self.outgoing_slope(e, at_u);
            }
            let ord = to_i64(&-outgoing).expect("validated integer slopes");
            if ord != 0 {
                d.add_vertex(g, v, ord);
            }
        }
        d
    }
}

/// Distance to a vertex as a piecewise linear function (slopes are 1 or -1
/// away from the locus where the two endpoint wavefronts meet).
pub fn distance_function(g: &MetricGraph, v: VertexId) -> CoreResult<PLFunction> {
    let dist = g.vertex_distances(&[(v, Q::zero())]);
    let mut tracks = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let du = dist[edge.u.0].clone();
        let dv = dist[edge.v.0].clone();
        let t = (&dv + &edge.len - &du) / crate::rat::qi(2);
        if t <= Q::zero() || t >= edge.len {
            tracks.push(vec![(Q::zero(), du), (edge.len.clone(), dv)]);
        } else {
            let peak = &du + &t;
            tracks.push(vec![(Q::zero(), du), (t, peak), (edge.len.clone(), dv)]);
        }
    }
    PLFunction::from_tracks(g, tracks)
}

/// Pointwise minimum of a shifted family `psi_i + b_i`. Errors on an empty family.
pub fn min_family(g: &MetricGraph, funcs: &[(PLFunction, Q)]) -> CoreResult<PLFunction> {
    let mut it = funcs.iter();
    let Some((f0, b0)) = it.next() else {
        return Err(CoreError::Invariant("empty function family".into()));
    };
    let mut acc = f0.shift(b0);
    acc.require_match(g)?;
    for (f, b) in it {
        acc = acc.min(g, &f.shift(b))?;
    }
    Ok(acc)
}

/// Audit report for functions in the complete linear system of the canonical
/// divisor: their minimum locus should be a union of closed edges with no leaves.
#[derive(Debug, Clone)]
pub struct MinLocusAudit {
    pub min_value: Q,
    pub locus: Subgraph,
    pub locus_is_edge_union: bool,
    pub leaf_points: Vec<GraphPoint>,
    /// Whether K + div(psi) is effective, i.e. the premise actually holds.
    pub in_canonical_system: bool,
}

/// Audits the minimum locus of `psi` against the canonical-system shape facts.
pub fn min_locus_audit(g: &MetricGraph, psi: &PLFunction) -> CoreResult<MinLocusAudit> {
    psi.require_match(g)?;
    let locus = psi.min_locus(g);
    let k = canonical_divisor(g);
    Ok(MinLocusAudit {
        min_value: psi.min_value(),
        locus_is_edge_union: locus.is_union_of_closed_edges(g),
        leaf_points: locus.leaf_points(g),
        in_canonical_system: k.add(&psi.divisor(g)).is_effective(),
        locus,
    })
}

/// Merges two tracks by applying `op` to the interpolated values at the union
/// of their breakpoints. Only valid for operations that stay piecewise linear
/// without creating new breakpoints (addition, subtraction).
fn combine_tracks(a: &[(Q, Q)], b: &[(Q, Q)], op: impl Fn(&Q, &Q) -> Q) -> Vec<(Q, Q)> {
    let offsets = merged_offsets(a, b);
    offsets
        .into_iter()
        .map(|t| {
            let va = interp(a, &t);
            let vb = interp(b, &t);
            let v = op(&va, &vb);
            (t, v)
        })
        .collect()
}

fn min_tracks(a: &[(Q, Q)], b: &[(Q, Q)]) -> Vec<(Q, Q)> {
    let offsets = merged_offsets(a, b);
    let mut out: Vec<(Q, Q)> = Vec::new();
    for i in 0..offsets.len() {
        let t = &offsets[i];
        let (va, vb) = (interp(a, t), interp(b, t));
        if i > 0 {
            // Insert the crossing point if the leader changed inside the cell.
            let t0 = &offsets[i - 1];
            let (ua, ub) = (interp(a, t0), interp(b, t0));
            let d0 = &ua - &ub;
            let d1 = &va - &vb;
            if (d0 > Q::zero() && d1 < Q::zero()) || (d0 < Q::zero() && d1 > Q::zero()) {
                let dt = (t - t0) * &d0 / (&d0 - &d1);
                let tc = t0 + dt;
                let vc = interp(a, &tc);
                out.push((tc, vc));
            }
        }
        out.push((t.clone(), if va <= vb { va } else { vb }));
    }
    out
}

fn merged_offsets(a: &[(Q, Q)], b: &[(Q, Q)]) -> Vec<Q> {
    let mut offsets: Vec<Q> = a.iter().chain(b).map(|(t, _)| t.clone()).collect();
    offsets.sort();
    offsets.dedup();
    offsets
}

fn interp(track: &[(Q, Q)], t: &Q) -> Q {
    let i = track.partition_point(|(x, _)| x <= t);
    if i == 0 {
        return track[0].1.clone();
    }
    let (t0, v0) = &track[i - 1];
    if t0 == t || i == track.len() {
        return v0.clone();
    }
    let (t1, v1) = &track[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{q, qi};

    fn segment(len: i64) -> MetricGraph {
        MetricGraph::from_edges(2, vec![(0, 1, qi(len))]).unwrap()
    }

    #[test]
    fn constant_function_has_zero_divisor() {
        let g = segment(2);
        let f = PLFunction::constant(&g, qi(7));
        assert_eq!(f.divisor(&g), Divisor::zero());
        assert_eq!(f.min_locus(&g), Subgraph::whole(&g));
    }

    #[test]
    fn tent_function_divisor() {
        // min(x, 2-x) on a segment of length 2: +2 at the midpoint, -1 at each end.
        let g = segment(2);
        let a = PLFunction::from_tracks(&g, vec![vec![(qi(0), qi(0)), (qi(2), qi(2))]]).unwrap();
        let b = PLFunction::from_tracks(&g, vec![vec![(qi(0), qi(2)), (qi(2), qi(0))]]).unwrap();
        let tent = a.min(&g, &b).unwrap();
        assert_eq!(tent.eval(&g.point(EdgeId(0), qi(1)).unwrap()), qi(1));
        let d = tent.divisor(&g);
        assert_eq!(d.deg(), 0);
        assert_eq!(d.mult(&g.point(EdgeId(0), qi(1)).unwrap()), 2);
        assert_eq!(d.mult_vertex(&g, VertexId(0)), -1);
        assert_eq!(d.mult_vertex(&g, VertexId(1)), -1);
        // Minimum locus is the two endpoints.
        let locus = tent.min_locus(&g);
        assert!(locus.contains_vertex(&g, VertexId(0)));
        assert!(locus.contains_vertex(&g, VertexId(1)));
        assert!(!locus.contains(&g, &g.midpoint(EdgeId(0))));
        assert!(!locus.is_connected(&g));
    }

    #[test]
    fn validation_rejects_bad_tracks() {
        let g = segment(2);
        // Non-integer slope.
        assert!(PLFunction::from_tracks(&g, vec![vec![(qi(0), qi(0)), (qi(2), qi(1))]]).is_err());
        // Wrong coverage.
        assert!(PLFunction::from_tracks(&g, vec![vec![(qi(0), qi(0)), (qi(1), qi(1))]]).is_err());
        // Discontinuity across a vertex.
        let theta =
            MetricGraph::from_edges(2, vec![(0, 1, qi(1)), (0, 1, qi(1))]).unwrap();
        assert!(PLFunction::from_tracks(
            &theta,
            vec![
                vec![(qi(0), qi(0)), (qi(1), qi(0))],
                vec![(qi(0), qi(0)), (qi(1), qi(1))],
            ],
        )
        .is_err());
    }

    #[test]
    fn min_of_crossing_lines_gets_breakpoint() {
        let g = segment(4);
        let a = PLFunction::from_tracks(&g, vec![vec![(qi(0), qi(0)), (qi(4), qi(4))]]).unwrap();
        let b = PLFunction::constant(&g, qi(3));
        let m = a.min(&g, &b).unwrap();
        assert_eq!(m.eval(&g.point(EdgeId(0), qi(2)).unwrap()), qi(2));
        assert_eq!(m.eval(&g.point(EdgeId(0), q(7, 2)).unwrap()), qi(3));
        let d = m.divisor(&g);
        assert_eq!(d.mult(&g.point(EdgeId(0), qi(3)).unwrap()), 1);
    }

    #[test]
    fn self_loop_divisor_balances() {
        let g = MetricGraph::from_edges(1, vec![(0, 0, qi(4))]).unwrap();
        // Tent around the loop: 0 at the vertex, peak at the far point.
        let f = PLFunction::from_tracks(
            &g,
            vec![vec![(qi(0), qi(0)), (qi(2), qi(2)), (qi(4), qi(0))]],
        )
        .unwrap();
        let d = f.divisor(&g);
        assert_eq!(d.deg(), 0);
        assert_eq!(d.mult_vertex(&g, VertexId(0)), -2);
        assert_eq!(d.mult(&g.point(EdgeId(0), qi(2)).unwrap()), 2);
    }
}
