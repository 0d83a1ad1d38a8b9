//! Chain parameters: edge lengths and the metric graph they generate.
//!
//! Vertices are laid out left to right as w_0, v_1, w_1, ..., v_g, w_g,
//! v_{g+1}. Loop k is the pair of parallel edges between v_k and w_k: a
//! bottom edge of length m_k and a top edge of length ell_k. Bridge k joins
//! w_k to v_{k+1} and has length n_k, so bridge 0 hangs off the left end and
//! bridge g off the right end.
//!
//! Points on loop k are addressed by a counterclockwise coordinate in
//! [0, ell_k + m_k): starting from v_k, the bottom edge comes first, w_k sits
//! at coordinate m_k, and the top edge leads back to v_k.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use troplin_core::rat::{qi, qvec};
use troplin_core::{EdgeId, MetricGraph, Q, VertexId};

use crate::error::{ChainError, ChainResult};

/// Largest genus for which user-supplied lengths are screened for integer
/// relations by exhaustive search.
const RELATION_CHECK_MAX_GENUS: usize = 6;

/// Edge lengths for a chain of `genus` loops.
///
/// The lengths must keep the three scales separated: every loop is much wider
/// than its bottom edge (`4g * m_k < ell_k`), the bridges dominate the loops
/// (`2 * mbar * ell_k < min(n_{k-1}, n_k)`), and the bottom lengths admit no
/// integer relation `c_1 m_1 + ... + c_g m_g = 0` with `0 < max |c_i| <= g+1`.
/// `mbar` records how many of the canonical functions may be summed while the
/// bridge separation still holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainParams {
    pub genus: usize,
    #[serde(with = "qvec")]
    pub ell: Vec<Q>,
    #[serde(with = "qvec")]
    pub m: Vec<Q>,
    #[serde(with = "qvec")]
    pub n: Vec<Q>,
    pub mbar: usize,
}

impl ChainParams {
    /// Validates user-supplied lengths. The relation-freeness invariant is
    /// checked exhaustively for small genus; beyond that the lengths are
    /// rejected unless `trusted` is set.
    pub fn new(
        genus: usize,
        ell: Vec<Q>,
        m: Vec<Q>,
        n: Vec<Q>,
        mbar: usize,
        trusted: bool,
    ) -> ChainResult<Self> {
        if genus == 0 {
            return Err(ChainError::BadParams("genus must be at least 1".into()));
        }
        if mbar == 0 {
            return Err(ChainError::BadParams(
                "supported multiset size must be at least 1".into(),
            ));
        }
        if ell.len() != genus || m.len() != genus || n.len() != genus + 1 {
            return Err(ChainError::BadParams(format!(
                "expected {genus} loop lengths and {} bridge lengths",
                genus + 1
            )));
        }
        for x in ell.iter().chain(m.iter()).chain(n.iter()) {
            if !x.is_positive() {
                return Err(ChainError::BadParams("lengths must be positive".into()));
            }
        }
        let params = ChainParams {
            genus,
            ell,
            m,
            n,
            mbar,
        };
        for k in 1..=genus {
            if qi(4 * genus as i64) * params.em(k) >= *params.el(k) {
                return Err(ChainError::BadParams(format!(
                    "loop {k} is not wide enough: need 4g*m < ell"
                )));
            }
            let bound = qi(2 * mbar as i64) * params.el(k);
            if bound >= *params.en(k - 1) || bound >= *params.en(k) {
                return Err(ChainError::BadParams(format!(
                    "bridges around loop {k} are too short: need 2*mbar*ell < n"
                )));
            }
        }
        if !trusted {
            params.verify_relation_free()?;
        }
        Ok(params)
    }

    /// Exhaustively rules out relations `c_1 m_1 + ... + c_g m_g = 0` with
    /// integer coefficients `|c_i| <= g+1`, not all zero. Only feasible for
    /// small genus; larger chains must come from [`make_admissible_chain`].
    pub fn verify_relation_free(&self) -> ChainResult<()> {
        if self.genus > RELATION_CHECK_MAX_GENUS {
            return Err(ChainError::RelationCheckTooLarge(self.genus));
        }
        let bound = self.genus as i64 + 1;
        if let Some(coeffs) = small_relation(&self.m, bound) {
            let terms: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0)
                .map(|(i, c)| format!("{c}*m{}", i + 1))
                .collect();
            return Err(ChainError::RelationFound(format!(
                "{} = 0",
                terms.join(" + ")
            )));
        }
        Ok(())
    }

    pub fn el(&self, k: usize) -> &Q {
        &self.ell[k - 1]
    }

    pub fn em(&self, k: usize) -> &Q {
        &self.m[k - 1]
    }

    /// Bridge length, k in 0..=genus.
    pub fn en(&self, k: usize) -> &Q {
        &self.n[k]
    }

    pub fn circumference(&self, k: usize) -> Q {
        self.el(k) + self.em(k)
    }

    /// Right vertex of loop k, with w(0) the left end of the whole chain.
    pub fn w(&self, k: usize) -> VertexId {
        VertexId(2 * k)
    }

    /// Left vertex of loop k; v(genus + 1) is the right end of the chain.
    pub fn v(&self, k: usize) -> VertexId {
        VertexId(2 * k - 1)
    }

    pub fn bottom(&self, k: usize) -> EdgeId {
        EdgeId(3 * k - 2)
    }

    pub fn top(&self, k: usize) -> EdgeId {
        EdgeId(3 * k - 1)
    }

    /// Bridge edge, k in 0..=genus.
    pub fn bridge(&self, k: usize) -> EdgeId {
        EdgeId(3 * k)
    }

    /// Builds the metric graph. Edge k of a loop is stored from v_k to w_k,
    /// bridges from w_k to v_{k+1}, so edge offsets increase rightward along
    /// bridges and bottom edges.
    pub fn graph(&self) -> ChainResult<MetricGraph> {
        let mut names = vec!["w0".to_string()];
        for k in 1..=self.genus {
            names.push(format!("v{k}"));
            names.push(format!("w{k}"));
        }
        names.push(format!("v{}", self.genus + 1));
        let mut edges = vec![(0, 1, self.n[0].clone())];
        for k in 1..=self.genus {
            let (vk, wk) = (2 * k - 1, 2 * k);
            edges.push((vk, wk, self.em(k).clone()));
            edges.push((vk, wk, self.el(k).clone()));
            edges.push((wk, 2 * k + 1, self.en(k).clone()));
        }
        Ok(MetricGraph::new(names, edges)?)
    }
}

/// Standard admissible lengths: `B = 2g+3`, bottom lengths the powers
/// `B^(k-1)`, every top edge `4g*B^g + 1`, and every bridge `2*mbar + 1`
/// times longer than a top edge.
///
/// Relation-freeness needs no search here: a vanishing combination of the
/// powers of B with coefficients bounded by `g+1 < B/2` is a balanced base-B
/// representation of zero, so all coefficients vanish.
pub fn make_admissible_chain(genus: usize, mbar: usize) -> ChainResult<ChainParams> {
    if genus == 0 || mbar == 0 {
        return Err(ChainError::BadParams(
            "genus and multiset size must be at least 1".into(),
        ));
    }
    let b = BigInt::from(2 * genus + 3);
    let mut m = Vec::with_capacity(genus);
    let mut power = BigInt::one();
    for _ in 1..=genus {
        m.push(Q::from_integer(power.clone()));
        power *= &b;
    }
    // power is now B^g
    let ell_len = Q::from_integer(BigInt::from(4 * genus) * &power + 1);
    let n_len = qi(2 * mbar as i64 + 1) * &ell_len;
    let ell = vec![ell_len; genus];
    let n = vec![n_len; genus + 1];
    ChainParams::new(genus, ell, m, n, mbar, true)
}

/// Finds integer coefficients with `|c_i| <= bound`, not all zero, such that
/// `sum c_i * xs_i = 0`, if any exist. Exhaustive search with suffix-sum
/// pruning, largest magnitudes first.
fn small_relation(xs: &[Q], bound: i64) -> Option<Vec<i64>> {
    let denom_lcm = xs
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let ints: Vec<BigInt> = xs
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    order.sort_by(|&a, &b| ints[b].abs().cmp(&ints[a].abs()));
    // suffix_cap[i] = bound * sum of |ints| not yet assigned at depth i
    let mut suffix_cap = vec![BigInt::zero(); order.len() + 1];
    for i in (0..order.len()).rev() {
        suffix_cap[i] = &suffix_cap[i + 1] + ints[order[i]].abs() * bound;
    }
    let mut coeffs = vec![0i64; xs.len()];
    fn search(
        ints: &[BigInt],
        order: &[usize],
        suffix_cap: &[BigInt],
        depth: usize,
        sum: BigInt,
        bound: i64,
        coeffs: &mut Vec<i64>,
    ) -> bool {
        if sum.abs() > suffix_cap[depth] {
            return false;
        }
        if depth == order.len() {
            return sum.is_zero() && coeffs.iter().any(|&c| c != 0);
        }
        let idx = order[depth];
        for c in -bound..=bound {
            coeffs[idx] = c;
            if search(
                ints,
                order,
                suffix_cap,
                depth + 1,
                &sum + &ints[idx] * c,
                bound,
                coeffs,
            ) {
                return true;
            }
        }
        coeffs[idx] = 0;
        false
    }
    if search(
        &ints,
        &order,
        &suffix_cap,
        0,
        BigInt::zero(),
        bound,
        &mut coeffs,
    ) {
        Some(coeffs)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use troplin_core::rat::q;

    #[test]
    fn admissible_genus_one_values() {
        let p = make_admissible_chain(1, 2).unwrap();
        assert_eq!(p.m, vec![qi(1)]);
        assert_eq!(p.ell, vec![qi(21)]);
        assert_eq!(p.n, vec![qi(105), qi(105)]);
    }

    #[test]
    fn admissible_genus_four_bottom_lengths() {
        let p = make_admissible_chain(4, 2).unwrap();
        let expect: Vec<Q> = [1, 11, 121, 1331].iter().map(|&v| qi(v)).collect();
        assert_eq!(p.m, expect);
        // re-validate from scratch, including the exhaustive relation check
        ChainParams::new(4, p.ell.clone(), p.m.clone(), p.n.clone(), 2, false).unwrap();
    }

    #[test]
    fn scale_separation_violations_rejected() {
        let narrow = ChainParams::new(1, vec![qi(4)], vec![qi(1)], vec![qi(100), qi(100)], 2, false);
        assert!(matches!(narrow, Err(ChainError::BadParams(_))));
        let short_bridge =
            ChainParams::new(1, vec![qi(21)], vec![qi(1)], vec![qi(84), qi(105)], 2, false);
        assert!(matches!(short_bridge, Err(ChainError::BadParams(_))));
    }

    #[test]
    fn related_bottom_lengths_rejected() {
        // m2 = 2*m1 is a relation with coefficients (-2, 1)
        let ell = vec![qi(1000), qi(1000)];
        let n = vec![qi(100_000); 3];
        let err = ChainParams::new(2, ell, vec![qi(1), qi(2)], n, 2, false);
        assert!(matches!(err, Err(ChainError::RelationFound(_))));
    }

    #[test]
    fn fractional_lengths_are_screened_exactly() {
        // m2 = 3/2 * m1 needs coefficients (3, -2), still within the bound
        let ell = vec![qi(1000), qi(1000)];
        let n = vec![qi(100_000); 3];
        let err = ChainParams::new(2, ell, vec![q(1, 2), q(3, 4)], n, 2, false);
        assert!(matches!(err, Err(ChainError::RelationFound(_))));
    }

    #[test]
    fn large_genus_needs_trusted_lengths() {
        let p = make_admissible_chain(7, 2).unwrap();
        let again = ChainParams::new(7, p.ell.clone(), p.m.clone(), p.n.clone(), 2, false);
        assert!(matches!(again, Err(ChainError::RelationCheckTooLarge(7))));
        ChainParams::new(7, p.ell.clone(), p.m.clone(), p.n.clone(), 2, true).unwrap();
    }

    #[test]
    fn graph_layout_matches_the_id_scheme() {
        let p = make_admissible_chain(3, 2).unwrap();
        let g = p.graph().unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g.betti(), 3);
        assert_eq!(g.vertex_name(p.w(0)), "w0");
        assert_eq!(g.vertex_name(p.v(2)), "v2");
        assert_eq!(g.vertex_name(p.v(4)), "v4");
        for k in 1..=3 {
            assert_eq!(g.len(p.bottom(k)), p.em(k));
            assert_eq!(g.len(p.top(k)), p.el(k));
            assert_eq!(g.valence(p.v(k)), 3);
            assert_eq!(g.valence(p.w(k)), 3);
        }
        assert_eq!(g.len(p.bridge(0)), p.en(0));
        assert_eq!(g.valence(p.w(0)), 1);
        assert_eq!(g.valence(p.v(4)), 1);
    }
}
