//! Families of index pairs `{i, j}` with `0 <= i <= j <= r`.
//!
//! The quadric monomials in `r + 1` variables are indexed by such pairs, so
//! a family of pairs names the multiset functions `psi_i + psi_j` whose
//! independence is at stake. The full family has `C(r+2, 2)` members; when
//! that exceeds `2d - g + 1` a sub-family of exactly `2d - g + 1` pairs is
//! selected by carving three regions out of the triangle.

use serde::{Deserialize, Serialize};

use crate::error::{MrcError, MrcResult};

/// Parity of `r`: 1 when odd, 0 when even.
pub fn epsilon(r: i64) -> i64 {
    r.rem_euclid(2)
}

/// `C(r+2, 2)`, the number of pairs `0 <= i <= j <= r`.
pub fn pair_total(r: i64) -> i64 {
    (r + 2) * (r + 1) / 2
}

/// Number of pairs removed from the full triangle by [`PairSet::surjective`].
pub fn excluded_count(r: i64, s: i64) -> i64 {
    pair_total(r) - (r * s - s + 2 * r + 1)
}

/// The three carved-out regions of the index triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Low diagonals: `j >= i + 2` and `i + j < r - 2s + epsilon`.
    Lower,
    /// Middle diagonals near the ends of the rows:
    /// `r - s + epsilon <= i + j <= r + s` with `i` small or `j` large.
    Chevron,
    /// High diagonals: `j >= i + 2` and `i + j > r + 2s`.
    Upper,
}

/// Region containing `{i, j}`, or `None` when the pair is kept.
///
/// All three regions are empty when `r <= 2s`.
pub fn excluded_region(r: i64, s: i64, i: i64, j: i64) -> Option<Region> {
    let e = epsilon(r);
    let c = i + j;
    if j >= i + 2 && c < r - 2 * s + e {
        return Some(Region::Lower);
    }
    if j >= i + 2 && c > r + 2 * s {
        return Some(Region::Upper);
    }
    if c >= r - s + e && c <= r + s && (2 * i <= r - 2 * s - 2 + e || 2 * j >= r + 2 * s + 2) {
        return Some(Region::Chevron);
    }
    None
}

/// A family of pairs, kept sorted by `(i + j, i)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSet {
    pub r: i64,
    pub s: i64,
    pairs: Vec<(i64, i64)>,
}

fn diagonal_order(a: &(i64, i64), b: &(i64, i64)) -> std::cmp::Ordering {
    (a.0 + a.1, a.0).cmp(&(b.0 + b.1, b.0))
}

impl PairSet {
    /// Every pair `0 <= i <= j <= r`.
    pub fn full(r: i64, s: i64) -> Self {
        let mut pairs = Vec::new();
        for i in 0..=r {
            for j in i..=r {
                pairs.push((i, j));
            }
        }
        pairs.sort_by(diagonal_order);
        PairSet { r, s, pairs }
    }

    /// The full triangle minus the three excluded regions.
    pub fn surjective(r: i64, s: i64) -> Self {
        let mut set = Self::full(r, s);
        set.pairs.retain(|&(i, j)| excluded_region(r, s, i, j).is_none());
        set
    }

    /// Extends [`PairSet::surjective`] by the first `extra` complement pairs
    /// in `(i + j, i)` order. Returns the extended set and the added pairs.
    pub fn extended(r: i64, s: i64, extra: usize) -> MrcResult<(Self, Vec<(i64, i64)>)> {
        let base = Self::surjective(r, s);
        let comp = base.complement();
        if extra > comp.len() {
            return Err(MrcError::BadParameters(format!(
                "cannot add {extra} pairs: only {} are excluded for r={r}, s={s}",
                comp.len()
            )));
        }
        let added: Vec<_> = comp[..extra].to_vec();
        let mut pairs = base.pairs;
        pairs.extend(added.iter().copied());
        pairs.sort_by(diagonal_order);
        Ok((PairSet { r, s, pairs }, added))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in `(i + j, i)` order.
    pub fn pairs(&self) -> &[(i64, i64)] {
        &self.pairs
    }

    pub fn contains(&self, i: i64, j: i64) -> bool {
        self.pairs.binary_search_by(|p| diagonal_order(p, &(i, j))).is_ok()
    }

    /// Number of member pairs on the diagonal `i + j = c`.
    pub fn diagonal_count(&self, c: i64) -> usize {
        self.pairs.iter().filter(|&&(i, j)| i + j == c).count()
    }

    /// Member pairs on the diagonal `i + j = c`, in `i` order.
    pub fn diagonal(&self, c: i64) -> Vec<(i64, i64)> {
        self.pairs.iter().copied().filter(|&(i, j)| i + j == c).collect()
    }

    /// Excluded pairs, sorted by `(i + j, i)`.
    pub fn complement(&self) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for i in 0..=self.r {
            for j in i..=self.r {
                if !self.contains(i, j) {
                    out.push((i, j));
                }
            }
        }
        out.sort_by(diagonal_order);
        out
    }
}
