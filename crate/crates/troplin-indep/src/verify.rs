//! Exact pointwise verification of tropical dependences.

use std::collections::BTreeSet;

use num_traits::Signed;
use troplin_core::rat::qi;
use troplin_core::{GraphPoint, MetricGraph, PLFunction, Q};

use crate::comb::Combination;
use crate::error::{IndepError, IndepResult};
use crate::refine::breakpoint_cuts;

/// Outcome of a min-twice check. On failure, `failing` holds the first point
/// in edge order where the minimum is attained only once, together with the
/// index of the lone minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct TwiceReport {
    pub holds: bool,
    pub failing: Option<(GraphPoint, usize)>,
}

/// Checks whether `min_i (psi_i + b_i)` is attained at least twice at every
/// point of the graph, the defining property of a tropical dependence.
///
/// Each edge is cut at every breakpoint of the family and at every pairwise
/// crossing of the shifted functions, so the minimizer set is constant on
/// each open cell and it suffices to inspect the cuts plus one interior
/// sample per cell. All arithmetic is exact.
pub fn verify_twice(
    g: &MetricGraph,
    funcs: &[PLFunction],
    b: &Combination,
) -> IndepResult<TwiceReport> {
    if funcs.is_empty() {
        return Err(IndepError::EmptyFamily);
    }
    b.check_len(funcs.len())?;
    let shifted_at = |p: &GraphPoint| -> Vec<Q> {
        funcs
            .iter()
            .zip(&b.0)
            .map(|(f, bi)| f.eval(p) + bi)
            .collect()
    };
    for e in g.edge_ids() {
        let base = breakpoint_cuts(g, funcs, e);
        let vals: Vec<Vec<Q>> = base
            .iter()
            .map(|t| {
                shifted_at(&GraphPoint {
                    edge: e,
                    offset: t.clone(),
                })
            })
            .collect();
        let mut cuts: BTreeSet<Q> = base.iter().cloned().collect();
        // the difference of two members is affine between breakpoints, so a
        // strict sign change brackets exactly one crossing
        for w in 0..base.len() - 1 {
            for i in 0..funcs.len() {
                for j in i + 1..funcs.len() {
                    let da = &vals[w][i] - &vals[w][j];
                    let db = &vals[w + 1][i] - &vals[w + 1][j];
                    if da.is_positive() && db.is_negative()
                        || da.is_negative() && db.is_positive()
                    {
                        let t = &base[w]
                            + da.abs() * (&base[w + 1] - &base[w]) / (da.abs() + db.abs());
                        cuts.insert(t);
                    }
                }
            }
        }
        let cuts: Vec<Q> = cuts.into_iter().collect();
        let mut samples = Vec::with_capacity(2 * cuts.len());
        for (idx, t) in cuts.iter().enumerate() {
            samples.push(t.clone());
            if idx + 1 < cuts.len() {
                samples.push((t + &cuts[idx + 1]) / qi(2));
            }
        }
        for t in samples {
            let p = GraphPoint { edge: e, offset: t };
            let vs = shifted_at(&p);
            let min = vs.iter().min().expect("family is nonempty").clone();
            let winners: Vec<usize> = (0..vs.len()).filter(|&i| vs[i] == min).collect();
            if winners.len() < 2 {
                return Ok(TwiceReport {
                    holds: false,
                    failing: Some((g.canonicalize(&p)?, winners[0])),
                });
            }
        }
    }
    Ok(TwiceReport {
        holds: true,
        failing: None,
    })
}
