//! Loop windows attached to the columns of a rectangular tableau.
//!
//! For a divisor built from an `s x (r+1)` tableau, the degree excess
//! `e(k) = deg(Delta restricted to the first k regions) - 2k` can only fail
//! to grow on short stretches of loops. Each column `ell` of the tableau
//! carries a window of loops on which a stalled excess at level `L(ell)`
//! forces many pair functions to be permissible at once; the replay engine
//! turns that crowding into a contradiction.

use serde::{Deserialize, Serialize};

use crate::pairs::PairSet;

fn rhalf(r: i64) -> i64 {
    // ceil(r / 2)
    (r + 1) / 2
}

/// Excess level `L(ell) = ell - s + ceil(r/2)` tied to column `ell`.
pub fn level(r: i64, s: i64, ell: i64) -> i64 {
    ell - s + rhalf(r)
}

/// The window of loops for column `ell`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub ell: i64,
    /// First loop of the window (loops are numbered from 1).
    pub a: i64,
    /// Last loop; `a == b + 1` encodes a window with no loops.
    pub b: i64,
    /// Stalled excess level ruled out on this window.
    pub level: i64,
    /// Slope of the minimum on the window bridges under the stall.
    pub sigma: i64,
}

impl Window {
    pub fn loop_count(&self) -> i64 {
        self.b - self.a + 1
    }
}

/// Columns for which a window is defined: `max(0, ceil(r/2) - s) <= ell`
/// and `ell <= min(r - 1, ceil(r/2) + s)`. The top column of that range has
/// an empty window exactly when `r` is even and `s < r/2`.
pub fn window_range(r: i64, s: i64) -> (i64, i64) {
    ((rhalf(r) - s).max(0), (rhalf(r) + s).min(r - 1))
}

/// Window of loops for column `ell`, or `None` outside [`window_range`].
pub fn window(r: i64, s: i64, ell: i64) -> Option<Window> {
    let (lo, hi) = window_range(r, s);
    if ell < lo || ell > hi {
        return None;
    }
    let h = rhalf(r);
    let (a, b) = if ell <= h {
        (ell * s + 1, ell * (s + 1) - h + s)
    } else {
        (ell * (s + 1) - h + 1, (ell + 1) * s)
    };
    let level = level(r, s, ell);
    Some(Window { ell, a, b, level, sigma: 2 * r - level })
}

/// Pairs predicted permissible on a stalled window: the members of `family`
/// on the diagonal `i + j = ell + ceil(r/2)` that straddle `ell`, plus the
/// square pair `(ell, ell)`.
pub fn predicted_pairs(family: &PairSet, ell: i64) -> Vec<(i64, i64)> {
    let c = ell + rhalf(family.r);
    let mut out: Vec<_> = family
        .diagonal(c)
        .into_iter()
        .filter(|&(i, j)| i < ell && ell < j)
        .collect();
    out.push((ell, ell));
    out.sort_by_key(|&(i, j)| (i + j, i));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_ten_windows() {
        // r = 4, s = 2
        let w2 = window(4, 2, 2).unwrap();
        assert_eq!((w2.a, w2.b, w2.level, w2.sigma), (5, 6, 2, 6));
        let w3 = window(4, 2, 3).unwrap();
        assert_eq!((w3.a, w3.b, w3.level, w3.sigma), (8, 8, 3, 5));
        assert_eq!(window_range(4, 2), (0, 3));
        assert!(window(4, 2, 4).is_none());
    }

    #[test]
    fn windows_sit_inside_their_columns() {
        for r in 1..=14 {
            for s in 1..=8 {
                let (lo, hi) = window_range(r, s);
                for ell in lo..=hi {
                    let w = window(r, s, ell).unwrap();
                    assert!(w.loop_count() >= 0, "r={r} s={s} ell={ell}");
                    assert!(w.a >= ell * s + 1, "r={r} s={s} ell={ell}");
                    assert!(w.b <= (ell + 1) * s, "r={r} s={s} ell={ell}");
                    if w.loop_count() == 0 {
                        // empty only at the extreme columns: the base of a
                        // surjective range or the top for even r
                        let rhalf = (r + 1) / 2;
                        assert!(
                            ell == rhalf - s || ell == rhalf + s,
                            "r={r} s={s} ell={ell}"
                        );
                    }
                    if r <= 2 * s && level(r, s, ell) >= 2 {
                        // every window the injective ledger replays has loops
                        assert!(w.loop_count() >= 1, "r={r} s={s} ell={ell}");
                    }
                }
            }
        }
    }

    #[test]
    fn windows_ascend_without_overlap() {
        for r in 1..=14 {
            for s in 1..=8 {
                let (lo, hi) = window_range(r, s);
                for ell in lo..hi {
                    let w = window(r, s, ell).unwrap();
                    let next = window(r, s, ell + 1).unwrap();
                    assert!(w.b < next.a, "r={r} s={s} ell={ell}");
                    // the stalled stretch [a-1, b] starts after the previous
                    // column checkpoint
                    assert!(next.a - 1 >= (ell + 1) * s, "r={r} s={s} ell={ell}");
                }
            }
        }
    }

    #[test]
    fn predicted_pairs_genus_ten() {
        let fam = PairSet::full(4, 2);
        assert_eq!(predicted_pairs(&fam, 2), vec![(0, 4), (1, 3), (2, 2)]);
        assert_eq!(predicted_pairs(&fam, 3), vec![(1, 4), (3, 3)]);
    }

    #[test]
    fn level_matches_sigma() {
        for r in 1..=12 {
            for s in 1..=6 {
                let (lo, hi) = window_range(r, s);
                for ell in lo..=hi {
                    let w = window(r, s, ell).unwrap();
                    assert_eq!(w.level, level(r, s, ell));
                    assert_eq!(w.sigma + w.level, 2 * r);
                }
            }
        }
    }
}
