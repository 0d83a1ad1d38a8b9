//! JSON wire formats for graphs, divisors, and piecewise linear functions.
//!
//! Lengths, offsets, and values travel as exact rational strings. Emission
//! always writes an explicit denominator ("5/1"); parsing also accepts bare
//! integers ("5").

use crate::divisor::Divisor;
use crate::error::{CoreError, CoreResult};
use crate::graph::{EdgeId, MetricGraph};
use crate::plf::PLFunction;
use crate::rat::{format_q, parse_q};
use serde::{Deserialize, Serialize};

fn pq(s: &str) -> CoreResult<crate::rat::Q> {
    parse_q(s).map_err(CoreError::Wire)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeWire {
    pub id: usize,
    pub u: String,
    pub v: String,
    pub len: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphWire {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeWire>,
}

impl GraphWire {
    pub fn from_graph(g: &MetricGraph) -> GraphWire {
        GraphWire {
            vertices: g
                .vertices()
                .map(|v| g.vertex_name(v).to_string())
                .collect(),
            edges: g
                .edge_ids()
                .map(|e| {
                    let edge = g.edge(e);
                    EdgeWire {
                        id: e.0,
                        u: g.vertex_name(edge.u).to_string(),
                        v: g.vertex_name(edge.v).to_string(),
                        len: format_q(&edge.len),
                    }
                })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> CoreResult<MetricGraph> {
        let index = |name: &str| -> CoreResult<usize> {
            self.vertices
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| CoreError::UnknownVertex(name.to_string()))
        };
        let mut edges = vec![None; self.edges.len()];
        for e in &self.edges {
            let slot = edges
                .get_mut(e.id)
                .ok_or_else(|| CoreError::Wire(format!("edge id {} out of range", e.id)))?;
            if slot.is_some() {
                return Err(CoreError::Wire(format!("duplicate edge id {}", e.id)));
            }
            *slot = Some((index(&e.u)?, index(&e.v)?, pq(&e.len)?));
        }
        let edges: Vec<_> = edges
            .into_iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| CoreError::Wire(format!("missing edge id {i}"))))
            .collect::<CoreResult<_>>()?;
        MetricGraph::new(self.vertices.clone(), edges)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChipWire {
    pub edge: usize,
    pub offset: String,
    pub mult: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivisorWire {
    pub chips: Vec<ChipWire>,
}

impl DivisorWire {
    pub fn from_divisor(d: &Divisor) -> DivisorWire {
        DivisorWire {
            chips: d
                .iter()
                .map(|(p, m)| ChipWire {
                    edge: p.edge.0,
                    offset: format_q(&p.offset),
                    mult: m,
                })
                .collect(),
        }
    }

    pub fn to_divisor(&self, g: &MetricGraph) -> CoreResult<Divisor> {
        let mut d = Divisor::zero();
        for c in &self.chips {
            if c.edge >= g.edge_count() {
                return Err(CoreError::Wire(format!("edge id {} out of range", c.edge)));
            }
            let p = g.point(EdgeId(c.edge), pq(&c.offset)?)?;
            d.add_point(g, &p, c.mult)?;
        }
        Ok(d)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BreakWire {
    pub offset: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrackWire {
    pub edge: usize,
    pub breakpoints: Vec<BreakWire>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlfWire {
    pub tracks: Vec<TrackWire>,
}

impl PlfWire {
    pub fn from_plf(g: &MetricGraph, f: &PLFunction) -> PlfWire {
        PlfWire {
            tracks: g
                .edge_ids()
                .map(|e| TrackWire {
                    edge: e.0,
                    breakpoints: f
                        .track(e)
                        .iter()
                        .map(|(t, v)| BreakWire {
                            offset: format_q(t),
                            value: format_q(v),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_plf(&self, g: &MetricGraph) -> CoreResult<PLFunction> {
        if self.tracks.len() != g.edge_count() {
            return Err(CoreError::Wire(format!(
                "expected {} tracks, found {}",
                g.edge_count(),
                self.tracks.len()
            )));
        }
        let mut tracks = vec![None; g.edge_count()];
        for t in &self.tracks {
            let slot = tracks
                .get_mut(t.edge)
                .ok_or_else(|| CoreError::Wire(format!("edge id {} out of range", t.edge)))?;
            if slot.is_some() {
                return Err(CoreError::Wire(format!("duplicate track for edge {}", t.edge)));
            }
            let track = t
                .breakpoints
                .iter()
                .map(|b| Ok((pq(&b.offset)?, pq(&b.value)?)))
                .collect::<CoreResult<Vec<_>>>()?;
            *slot = Some(track);
        }
        let tracks: Vec<_> = tracks
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| CoreError::Wire(format!("missing track for edge {i}"))))
            .collect::<CoreResult<_>>()?;
        PLFunction::from_tracks(g, tracks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexId;
    use crate::rat::qi;

    #[test]
    fn graph_round_trip() {
        let g = MetricGraph::new(
            vec!["a".into(), "b".into()],
            vec![(0, 1, qi(2)), (0, 1, qi(3))],
        )
        .unwrap();
        let w = GraphWire::from_graph(&g);
        let json = serde_json::to_string(&w).unwrap();
        let back: GraphWire = serde_json::from_str(&json).unwrap();
        let g2 = back.to_graph().unwrap();
        assert_eq!(g2.vertex_count(), 2);
        assert_eq!(g2.edge(EdgeId(1)).len, qi(3));
        assert_eq!(g2.vertex_name(VertexId(0)), "a");
    }

    #[test]
    fn divisor_round_trip_accepts_bare_integers() {
        let g = MetricGraph::from_edges(2, vec![(0, 1, qi(4))]).unwrap();
        let w = DivisorWire {
            chips: vec![ChipWire {
                edge: 0,
                offset: "3".into(),
                mult: 2,
            }],
        };
        let d = w.to_divisor(&g).unwrap();
        assert_eq!(d.deg(), 2);
        let back = DivisorWire::from_divisor(&d);
        assert_eq!(back.chips[0].offset, "3/1");
    }

    #[test]
    fn plf_round_trip() {
        let g = MetricGraph::from_edges(2, vec![(0, 1, qi(2))]).unwrap();
        let f = PLFunction::from_tracks(
            &g,
            vec![vec![(qi(0), qi(0)), (qi(1), qi(1)), (qi(2), qi(0))]],
        )
        .unwrap();
        let w = PlfWire::from_plf(&g, &f);
        let f2 = w.to_plf(&g).unwrap();
        assert_eq!(f, f2);
    }

    #[test]
    fn wire_rejects_bad_edge_ids() {
        let w = GraphWire {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![EdgeWire {
                id: 1,
                u: "a".into(),
                v: "b".into(),
                len: "2".into(),
            }],
        };
        assert!(w.to_graph().is_err());
    }
}
