//! A chain together with its metric graph, and the dictionary between loop
//! coordinates and graph points.

use num_traits::Zero;
use troplin_core::{Divisor, GraphPoint, MetricGraph, PLFunction, Q};

use crate::error::{ChainError, ChainResult};
use crate::params::ChainParams;
use crate::path::DivisorData;

/// Chain parameters bundled with the graph they generate.
#[derive(Debug, Clone)]
pub struct ChainModel {
    params: ChainParams,
    graph: MetricGraph,
}

impl ChainModel {
    pub fn new(params: ChainParams) -> ChainResult<Self> {
        let graph = params.graph()?;
        Ok(ChainModel { params, graph })
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn graph(&self) -> &MetricGraph {
        &self.graph
    }

    /// The graph point at counterclockwise coordinate `x` on loop k. The
    /// bottom edge covers [0, m], the top edge the rest.
    pub fn loop_point(&self, k: usize, x: &Q) -> ChainResult<GraphPoint> {
        let circ = self.params.circumference(k);
        if x < &Q::zero() || *x >= circ {
            return Err(ChainError::BadData(format!(
                "coordinate on loop {k} must lie in [0, ell+m)"
            )));
        }
        let p = if x <= self.params.em(k) {
            self.graph.point(self.params.bottom(k), x.clone())?
        } else {
            self.graph.point(self.params.top(k), circ - x)?
        };
        Ok(self.graph.canonicalize(&p)?)
    }

    /// Inverse of [`ChainModel::loop_point`]: the coordinate of a point that
    /// lies on loop k, or None if it does not.
    pub fn loop_coordinate(&self, k: usize, p: &GraphPoint) -> ChainResult<Option<Q>> {
        let p = self.graph.canonicalize(p)?;
        if let Some(v) = self.graph.point_vertex(&p) {
            if v == self.params.v(k) {
                return Ok(Some(Q::zero()));
            }
            if v == self.params.w(k) {
                return Ok(Some(self.params.em(k).clone()));
            }
            return Ok(None);
        }
        if p.edge == self.params.bottom(k) {
            return Ok(Some(p.offset));
        }
        if p.edge == self.params.top(k) {
            return Ok(Some(self.params.circumference(k) - p.offset));
        }
        Ok(None)
    }

    /// Midpoint of the bridge entering loop k from the left, k in 1..=genus+1.
    pub fn u(&self, k: usize) -> GraphPoint {
        self.graph.midpoint(self.params.bridge(k - 1))
    }

    /// The divisor encoded by classification data: d0 chips at w_0 plus one
    /// chip per occupied loop.
    pub fn divisor(&self, data: &DivisorData) -> ChainResult<Divisor> {
        data.validate(&self.params)?;
        let mut div = Divisor::zero();
        div.add_vertex(&self.graph, self.params.w(0), data.d0);
        for k in 1..=self.params.genus {
            let x = &data.x[k - 1];
            if !x.is_zero() {
                div.add_point(&self.graph, &self.loop_point(k, x)?, 1)?;
            }
        }
        Ok(div)
    }

    /// Incoming slope of a function at the midpoint of the bridge entering
    /// loop k from the left (ascending toward the loop), k in 1..=genus+1.
    pub fn sigma(&self, psi: &PLFunction, k: usize) -> Q {
        psi.outgoing_slope(self.params.bridge(k - 1), true)
    }
}
