//! Solving for a dependence from a prescribed winner pattern.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use troplin_core::{EdgeId, GraphPoint, MetricGraph, PLFunction, Q};

use crate::comb::Combination;
use crate::diff::difference_feasible;
use crate::error::{IndepError, IndepResult};
use crate::refine::build_cells;
use crate::verify::verify_twice;

/// A full edge on which the named functions are declared to realize the
/// shifted minimum together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRegion {
    pub edge: usize,
    pub winners: Vec<usize>,
}

/// Solves for constants realizing a winner pattern.
///
/// On each region edge the named winners are glued (their shifted values
/// agree along the whole edge) and lie at or below every other member at
/// each refinement cut of the edge. Gluing forces equal slopes across every
/// cell of the edge; a pattern breaking that, or whose equalities and
/// inequalities contradict each other, is rejected as inconsistent.
/// Functions winning nowhere are lifted clear of the declared minimum, so
/// the candidate stands or falls with the pattern. Returns the witness when
/// the final [`verify_twice`] passes and None when it fails.
pub fn solve_pattern(
    g: &MetricGraph,
    funcs: &[PLFunction],
    regions: &[PatternRegion],
) -> IndepResult<Option<Combination>> {
    if funcs.is_empty() {
        return Err(IndepError::EmptyFamily);
    }
    let n = funcs.len();
    if regions.is_empty() {
        return Err(IndepError::BadPattern("no regions".into()));
    }
    for reg in regions {
        if reg.edge >= g.edge_count() {
            return Err(IndepError::BadPattern(format!(
                "edge {} is out of range",
                reg.edge
            )));
        }
        let distinct: BTreeSet<usize> = reg.winners.iter().copied().collect();
        if distinct.len() < 2 {
            return Err(IndepError::BadPattern(format!(
                "edge {} needs at least two distinct winners",
                reg.edge
            )));
        }
        if let Some(bad) = distinct.iter().find(|&&w| w >= n) {
            return Err(IndepError::BadPattern(format!(
                "winner {bad} is out of range"
            )));
        }
    }

    let cells = build_cells(g, funcs);
    let mut glue = Glue::new(n);
    let mut ineqs: Vec<(usize, usize, Q)> = Vec::new();
    let mut winning: BTreeSet<usize> = BTreeSet::new();
    for reg in regions {
        let winners: Vec<usize> = {
            let set: BTreeSet<usize> = reg.winners.iter().copied().collect();
            set.into_iter().collect()
        };
        winning.extend(&winners);
        let lead = winners[0];
        for cell in cells.iter().filter(|c| c.edge == EdgeId(reg.edge)) {
            for &w in &winners[1..] {
                if cell.slope[w] != cell.slope[lead] {
                    return Err(IndepError::InconsistentPattern(format!(
                        "winners {lead} and {w} have different slopes on edge {} near offset {}",
                        reg.edge,
                        troplin_core::rat::format_q(&cell.a)
                    )));
                }
                // psi_lead + b_lead = psi_w + b_w at the left end, hence on
                // the whole cell by the slope match
                let d = &cell.left[w] - &cell.left[lead];
                if !glue.union(lead, w, &d) {
                    return Err(IndepError::InconsistentPattern(format!(
                        "gluing winner {w} on edge {} contradicts an earlier region",
                        reg.edge
                    )));
                }
            }
            for k in 0..n {
                if k != lead {
                    ineqs.push((lead, k, &cell.left[k] - &cell.left[lead]));
                }
            }
        }
        // the right end of the last cell is the only cut not covered above
        if let Some(cell) = cells.iter().filter(|c| c.edge == EdgeId(reg.edge)).last() {
            let pb = GraphPoint {
                edge: cell.edge,
                offset: cell.b.clone(),
            };
            let vals: Vec<Q> = funcs.iter().map(|f| f.eval(&pb)).collect();
            for k in 0..n {
                if k != lead {
                    ineqs.push((lead, k, &vals[k] - &vals[lead]));
                }
            }
        }
    }

    // project onto the union-find roots and solve the difference system
    let mut tight: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    for (i, k, gap) in &ineqs {
        let (ri, oi) = glue.find(*i);
        let (rk, ok) = glue.find(*k);
        if ri == rk {
            if oi - ok > *gap {
                return Err(IndepError::InconsistentPattern(format!(
                    "winner {i} is forced above function {k} on its own region"
                )));
            }
            continue;
        }
        let projected = gap - oi + ok;
        match tight.entry((ri, rk)) {
            Entry::Occupied(mut e) => {
                if projected < *e.get() {
                    e.insert(projected);
                }
            }
            Entry::Vacant(e) => {
                e.insert(projected);
            }
        }
    }
    let cons: Vec<(usize, usize, Q)> = tight
        .into_iter()
        .map(|((i, k), gap)| (i, k, gap))
        .collect();
    let Some(x) = difference_feasible(n, &cons) else {
        return Err(IndepError::InconsistentPattern(
            "the region inequalities admit no solution".into(),
        ));
    };
    let mut b: Vec<Q> = (0..n)
        .map(|i| {
            let (r, o) = glue.find(i);
            &x[r] + &o
        })
        .collect();

    // lift functions that win nowhere strictly above the declared minimum;
    // they only ever appear on the large side of the inequalities
    let declared: Vec<(PLFunction, Q)> = winning
        .iter()
        .map(|&w| (funcs[w].clone(), b[w].clone()))
        .collect();
    let floor = troplin_core::plf::min_family(g, &declared)?;
    for k in 0..n {
        if !winning.contains(&k) {
            let gap = floor.sub(g, &funcs[k])?;
            let max_gap = -gap.scale(-1).min_value();
            b[k] = max_gap + troplin_core::rat::qi(1);
        }
    }

    let witness = Combination(b).normalize();
    Ok(if verify_twice(g, funcs, &witness)?.holds {
        Some(witness)
    } else {
        None
    })
}

/// Minimal union-find with rational offsets; see the search in `decide` for
/// the rollback variant.
struct Glue {
    parent: Vec<usize>,
    off: Vec<Q>,
}

impl Glue {
    fn new(n: usize) -> Self {
        Glue {
            parent: (0..n).collect(),
            off: vec![Q::zero(); n],
        }
    }

    fn find(&self, i: usize) -> (usize, Q) {
        let mut node = i;
        let mut off = Q::zero();
        while self.parent[node] != node {
            off += &self.off[node];
            node = self.parent[node];
        }
        (node, off)
    }

    fn union(&mut self, i: usize, j: usize, d: &Q) -> bool {
        let (ri, oi) = self.find(i);
        let (rj, oj) = self.find(j);
        if ri == rj {
            return oi - oj == *d;
        }
        self.parent[ri] = rj;
        self.off[ri] = d - oi + oj;
        true
    }
}
