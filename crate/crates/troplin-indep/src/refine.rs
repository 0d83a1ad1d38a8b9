//! Edge refinement: cutting every edge at the breakpoints of a function
//! family, so that each function is affine across each open cell.

use std::collections::BTreeSet;

use num_traits::Zero;
use troplin_core::{EdgeId, GraphPoint, MetricGraph, PLFunction, Q};

/// A maximal interval between consecutive family breakpoints on an edge,
/// carrying the one-sided data that is constant across it.
#[derive(Debug, Clone)]
pub(crate) struct Cell {
    pub edge: EdgeId,
    pub a: Q,
    pub b: Q,
    /// Values psi_i(a) at the left end.
    pub left: Vec<Q>,
    /// Slope of each psi_i across the cell.
    pub slope: Vec<Q>,
}

/// Offsets of every breakpoint of the family on `e`, both ends included.
pub(crate) fn breakpoint_cuts(g: &MetricGraph, funcs: &[PLFunction], e: EdgeId) -> Vec<Q> {
    let mut cuts: BTreeSet<Q> = BTreeSet::new();
    cuts.insert(Q::zero());
    cuts.insert(g.len(e).clone());
    for f in funcs {
        for t in f.interior_breakpoints(e) {
            cuts.insert(t.clone());
        }
    }
    cuts.into_iter().collect()
}

pub(crate) fn build_cells(g: &MetricGraph, funcs: &[PLFunction]) -> Vec<Cell> {
    let mut cells = Vec::new();
    for e in g.edge_ids() {
        let cuts = breakpoint_cuts(g, funcs, e);
        for w in cuts.windows(2) {
            let pa = GraphPoint {
                edge: e,
                offset: w[0].clone(),
            };
            let pb = GraphPoint {
                edge: e,
                offset: w[1].clone(),
            };
            let width = &w[1] - &w[0];
            let left: Vec<Q> = funcs.iter().map(|f| f.eval(&pa)).collect();
            let slope: Vec<Q> = funcs
                .iter()
                .zip(&left)
                .map(|(f, va)| (f.eval(&pb) - va) / &width)
                .collect();
            cells.push(Cell {
                edge: e,
                a: w[0].clone(),
                b: w[1].clone(),
                left,
                slope,
            });
        }
    }
    cells
}
