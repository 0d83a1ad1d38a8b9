//! Exact feasibility for systems of difference constraints.

use num_traits::Zero;
use troplin_core::Q;

/// Finds rationals x_0, ..., x_{n-1} with `x_i - x_k <= gap` for every
/// constraint `(i, k, gap)`, or None when the constraint graph has a negative
/// cycle and no solution exists. Standard relaxation from a virtual source
/// tied to every variable; exact and deterministic.
pub(crate) fn difference_feasible(n: usize, cons: &[(usize, usize, Q)]) -> Option<Vec<Q>> {
    let mut dist = vec![Q::zero(); n];
    for _ in 0..n {
        let mut changed = false;
        for (i, k, gap) in cons {
            let cand = &dist[*k] + gap;
            if cand < dist[*i] {
                dist[*i] = cand;
                changed = true;
            }
        }
        if !changed {
            return Some(dist);
        }
    }
    for (i, k, gap) in cons {
        if &dist[*k] + gap < dist[*i] {
            return None;
        }
    }
    Some(dist)
}
