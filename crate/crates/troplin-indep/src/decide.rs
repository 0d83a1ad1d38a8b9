//! Deciding tropical dependence exactly.
//!
//! A dependence makes the shifted minimum everywhere twice, so the family
//! fails exactly when some shifted function wins alone somewhere. Three
//! exact mechanisms settle the question. First, a screen: affine functions
//! agreeing on a subinterval of a refinement cell agree across the cell, so
//! a cell without any equal-slope pair refutes dependence outright. Second,
//! propagation: a cell with exactly one equal-slope pair forces that pair to
//! tie along the whole cell and to sit at or below everyone else there; the
//! implied equalities and inequalities filter the other cells' candidate
//! pairs, and a contradiction or an emptied cell again refutes. Third, a
//! raising loop: starting from zero, each constant climbs to the least value
//! at which its function never wins alone, the exact envelope computation
//! `max (min_{j != i} (psi_j + b_j) - psi_i)`. The raising map is monotone,
//! so the constants converge upward to the least dependence above zero when
//! one exists; any dependence at all admits a representative below a
//! computable ceiling, so climbing past the ceiling refutes instead. The
//! loop is budgeted and exhaustion is reported, never guessed.

use std::collections::BTreeMap;

use num_traits::Zero;
use troplin_core::plf::min_family;
use troplin_core::{MetricGraph, PLFunction, Q};

use crate::comb::Combination;
use crate::diff::difference_feasible;
use crate::error::{IndepError, IndepResult};
use crate::refine::{build_cells, Cell};
use crate::verify::verify_twice;

/// Default cap on envelope evaluations in [`decide_dependence`].
pub const DEFAULT_BUDGET: u64 = 20_000;

/// Result of a completed dependence decision.
#[derive(Debug, Clone)]
pub enum DependenceOutcome {
    /// Some combination is a dependence; the witness passed [`verify_twice`].
    Dependent { witness: Combination },
    /// No combination works; carries how the refutation was reached.
    Independent { trace: SearchTrace },
}

/// Statistics of a completed decision, reported with independence results.
#[derive(Debug, Clone, Default)]
pub struct SearchTrace {
    /// Refinement cells of the family.
    pub cells: usize,
    /// Cells whose tie was forced during propagation.
    pub forced: usize,
    /// Full passes of the raising loop; zero when propagation refuted.
    pub sweeps: u64,
    /// Constants raised during the climb.
    pub raises: u64,
}

/// Union-find over function indices carrying exact offsets, so membership in
/// one class pins the difference of the constants: b_i = b_root + off_i.
#[derive(Clone)]
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

    /// Imposes b_i - b_j = d; false when it contradicts the existing classes.
    fn union(&mut self, i: usize, j: usize, d: &Q) -> bool {
        let (ri, oi) = self.find(i);
        let (rj, oj) = self.find(j);
        if ri == rj {
            return oi - oj == *d;
        }
        // b[ri] = b[i] - oi = b[j] + d - oi = b[rj] + oj + d - oi
        self.off[ri] = oj + d - oi;
        self.parent[ri] = rj;
        true
    }
}

/// The value of psi_k at the right end of a cell.
fn right_value(cell: &Cell, k: usize) -> Q {
    &cell.left[k] + &cell.slope[k] * (&cell.b - &cell.a)
}

/// The offset b_i - b_j making the pair tie on the cell.
fn tie_offset(cell: &Cell, i: usize, j: usize) -> Q {
    &cell.left[j] - &cell.left[i]
}

/// Projects the inequalities b_i - b_k <= gap onto glue roots, keeps the
/// tightest bound per root pair, and tests feasibility exactly, optionally
/// with one extra equality imposed first.
fn feasible_under(
    glue: &Glue,
    n: usize,
    ineqs: &[(usize, usize, Q)],
    extra: Option<(usize, usize, &Q)>,
) -> bool {
    let mut glue = glue.clone();
    if let Some((i, j, d)) = extra {
        if !glue.union(i, j, d) {
            return false;
        }
    }
    let mut tight: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    for (i, k, gap) in ineqs {
        let (ri, oi) = glue.find(*i);
        let (rk, ok) = glue.find(*k);
        let projected = gap - oi + ok;
        if ri == rk {
            if projected < Q::zero() {
                return false;
            }
            continue;
        }
        match tight.get(&(ri, rk)) {
            Some(old) if *old <= projected => {}
            _ => {
                tight.insert((ri, rk), projected);
            }
        }
    }
    let cons: Vec<(usize, usize, Q)> = tight.into_iter().map(|((i, k), g)| (i, k, g)).collect();
    difference_feasible(n, &cons).is_some()
}

/// Decides whether constants exist making the family minimum attained twice
/// at every point. `budget` caps envelope evaluations in the raising loop;
/// exhausting it is an error, never a silent answer.
pub fn decide_dependence(
    g: &MetricGraph,
    funcs: &[PLFunction],
    budget: u64,
) -> IndepResult<DependenceOutcome> {
    if funcs.is_empty() {
        return Err(IndepError::EmptyFamily);
    }
    let n = funcs.len();
    let cells = build_cells(g, funcs);
    let mut trace = SearchTrace {
        cells: cells.len(),
        ..SearchTrace::default()
    };
    if n == 1 {
        return Ok(DependenceOutcome::Independent { trace });
    }

    // candidate ties per cell: pairs of equal slope across it
    let mut options: Vec<Vec<(usize, usize)>> = cells
        .iter()
        .map(|cell| {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if cell.slope[i] == cell.slope[j] {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        })
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return Ok(DependenceOutcome::Independent { trace });
    }

    // propagate the ties forced by single-option cells to a fixed point
    let mut glue = Glue::new(n);
    let mut ineqs: Vec<(usize, usize, Q)> = Vec::new();
    let mut processed = vec![false; cells.len()];
    loop {
        let mut changed = false;
        for (c, cell) in cells.iter().enumerate() {
            let before = options[c].len();
            options[c].retain(|&(i, j)| {
                let d = tie_offset(cell, i, j);
                let (ri, oi) = glue.find(i);
                let (rj, oj) = glue.find(j);
                if ri == rj && oi - oj != d {
                    return false;
                }
                feasible_under(&glue, n, &ineqs, Some((i, j, &d)))
            });
            if options[c].is_empty() {
                return Ok(DependenceOutcome::Independent { trace });
            }
            changed |= options[c].len() < before;
            if options[c].len() == 1 && !processed[c] {
                processed[c] = true;
                trace.forced += 1;
                changed = true;
                let (i, j) = options[c][0];
                if !glue.union(i, j, &tie_offset(cell, i, j)) {
                    return Ok(DependenceOutcome::Independent { trace });
                }
                // the forced pair lies at or below everyone on the whole cell
                for k in 0..n {
                    if k != i && k != j {
                        ineqs.push((i, k, &cell.left[k] - &cell.left[i]));
                        ineqs.push((i, k, right_value(cell, k) - right_value(cell, i)));
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    if !feasible_under(&glue, n, &ineqs, None) {
        return Ok(DependenceOutcome::Independent { trace });
    }

    // any dependence admits a representative with every constant in
    // [0, 2 max_{i,j} max (psi_i - psi_j)]: normalize the smallest constant
    // to zero, then one application of the raising map pulls each constant
    // under the bound while staying a dependence
    let mut spread = Q::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let m = max_value(g, &funcs[i].sub(g, &funcs[j])?);
                if m > spread {
                    spread = m;
                }
            }
        }
    }
    let ceiling = Q::from_integer(2.into()) * &spread;

    let mut b = vec![Q::zero(); n];
    let mut evals = 0u64;
    let mut rising = vec![false; n];
    let mut bump = &spread + Q::from_integer(1.into());
    let mut next_attempt = 8u64;
    let stable = loop {
        trace.sweeps += 1;
        let mut any = false;
        for i in 0..n {
            evals += 1;
            if evals > budget {
                return Err(IndepError::Undecided { explored: evals });
            }
            let req = requirement(g, funcs, &b, i)?;
            rising[i] = req > b[i];
            if rising[i] {
                if req > ceiling {
                    return Ok(DependenceOutcome::Independent { trace });
                }
                b[i] = req;
                trace.raises += 1;
                any = true;
            }
        }
        if !any {
            break b;
        }
        // functions that never attain the minimum creep toward their touch
        // level geometrically; jumping them well past it and testing the
        // result exactly is sound, and a failed test just resumes the climb
        if trace.sweeps == next_attempt {
            next_attempt *= 2;
            let cand: Vec<Q> = b
                .iter()
                .zip(&rising)
                .map(|(x, r)| if *r { x + &bump } else { x.clone() })
                .collect();
            evals += n as u64;
            if evals > budget {
                return Err(IndepError::Undecided { explored: evals });
            }
            let mut ok = true;
            for i in 0..n {
                if requirement(g, funcs, &cand, i)? > cand[i] {
                    ok = false;
                    break;
                }
            }
            if ok {
                break cand;
            }
            bump = &bump * Q::from_integer(2.into());
        }
    };
    // a stable point is a dependence by construction; the verifier is a
    // final guard against arithmetic faults, not a filter
    let witness = Combination(stable).normalize();
    let report = verify_twice(g, funcs, &witness)?;
    if !report.holds {
        return Err(IndepError::Invariant(
            "stable point of the raising loop failed verification".into(),
        ));
    }
    Ok(DependenceOutcome::Dependent { witness })
}

/// The least constant at which function i never wins alone, given the
/// others: `max (min_{j != i} (psi_j + b_j) - psi_i)`.
fn requirement(g: &MetricGraph, funcs: &[PLFunction], b: &[Q], i: usize) -> IndepResult<Q> {
    let others: Vec<(PLFunction, Q)> = funcs
        .iter()
        .zip(b)
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, (f, c))| (f.clone(), c.clone()))
        .collect();
    let envelope = min_family(g, &others)?;
    Ok(max_value(g, &envelope.sub(g, &funcs[i])?))
}

/// Exact maximum over the graph; a piecewise linear function attains it at a
/// track entry.
fn max_value(g: &MetricGraph, f: &PLFunction) -> Q {
    g.edge_ids()
        .flat_map(|e| f.track(e).iter().map(|(_, v)| v))
        .max()
        .expect("graphs have at least one edge")
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use troplin_core::rat::qi;

    fn segment() -> MetricGraph {
        MetricGraph::from_edges(2, vec![(0, 1, qi(6))]).unwrap()
    }

    fn tent(g: &MetricGraph) -> PLFunction {
        PLFunction::from_tracks(g, vec![vec![(qi(0), qi(0)), (qi(3), qi(3)), (qi(6), qi(0))]])
            .unwrap()
    }

    #[test]
    fn distinct_slopes_everywhere_refute_instantly() {
        let g = segment();
        let zero = PLFunction::constant(&g, qi(0));
        let slope =
            PLFunction::from_tracks(&g, vec![vec![(qi(0), qi(0)), (qi(6), qi(6))]]).unwrap();
        match decide_dependence(&g, &[zero, slope], 1000).unwrap() {
            DependenceOutcome::Independent { trace } => {
                assert_eq!(trace.cells, 1);
                assert_eq!(trace.sweeps, 0);
                assert_eq!(trace.raises, 0);
            }
            other => panic!("expected independence, got {other:?}"),
        }
    }

    #[test]
    fn shifted_copies_are_dependent() {
        let g = segment();
        let f = tent(&g);
        let up = f.shift(&qi(5));
        match decide_dependence(&g, &[f, up], 1000).unwrap() {
            DependenceOutcome::Dependent { witness } => {
                assert_eq!(witness, Combination(vec![qi(5), qi(0)]));
            }
            other => panic!("expected dependence, got {other:?}"),
        }
    }

    #[test]
    fn the_flat_member_must_clear_the_peak() {
        // two equal tents and a flat function: the flat constant must climb
        // to the peak before it stops winning alone at the top
        let g = segment();
        let f = tent(&g);
        let flat = PLFunction::constant(&g, qi(0));
        match decide_dependence(&g, &[flat, f.clone(), f], 1000).unwrap() {
            DependenceOutcome::Dependent { witness } => {
                let spread = &witness.0[0] - &witness.0[1];
                assert!(spread >= qi(3));
                let fam = [PLFunction::constant(&g, qi(0)), tent(&g), tent(&g)];
                assert!(verify_twice(&g, &fam, &witness).unwrap().holds);
            }
            other => panic!("expected dependence, got {other:?}"),
        }
    }

    #[test]
    fn budgets_are_respected() {
        let g = segment();
        let f = tent(&g);
        let err = decide_dependence(&g, &[f.clone(), f], 1).unwrap_err();
        assert!(matches!(err, IndepError::Undecided { .. }));
    }

    #[test]
    fn a_lone_function_is_independent() {
        let g = segment();
        match decide_dependence(&g, &[tent(&g)], 1000).unwrap() {
            DependenceOutcome::Independent { trace } => assert_eq!(trace.sweeps, 0),
            other => panic!("expected independence, got {other:?}"),
        }
    }
}
