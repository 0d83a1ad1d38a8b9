//! Integer bookkeeping for pair functions along the chain.
//!
//! Everything the window replay needs to know about where `D_F = 2D +
//! div(psi_i) + div(psi_j)` puts its degree is a function of the lattice
//! path alone: the degree of `D` on a prefix of the chain and the bridge
//! slopes `p_k(i)`. This module precomputes those counts so permissibility
//! questions reduce to integer comparisons, with no graph evaluation.

use num_traits::Zero;
use troplin_chain::{DivisorData, LingeringPath};

use crate::pairs::PairSet;

/// Prefix degrees and bridge slopes for one divisor and its lattice path.
#[derive(Debug, Clone)]
pub struct PrefixTable {
    r: i64,
    genus: i64,
    /// occupied[k-1]: loop k carries a chip of `D`.
    occupied: Vec<bool>,
    /// divisor_prefix[t] = deg of `D` on the chain up to and including loop t.
    divisor_prefix: Vec<i64>,
    /// coords[t][a] = slope of `psi_a` on bridge t, for a in 0..=r.
    coords: Vec<Vec<i64>>,
}

impl PrefixTable {
    pub fn new(data: &DivisorData, path: &LingeringPath) -> Self {
        let genus = data.x.len() as i64;
        let r = path.r as i64;
        let occupied: Vec<bool> = data.x.iter().map(|x| !x.is_zero()).collect();
        let mut divisor_prefix = Vec::with_capacity(genus as usize + 1);
        let mut deg = data.d0;
        divisor_prefix.push(deg);
        for &occ in &occupied {
            if occ {
                deg += 1;
            }
            divisor_prefix.push(deg);
        }
        let coords: Vec<Vec<i64>> = (0..=genus as usize)
            .map(|t| (0..=path.r).map(|a| path.coord(t, a)).collect())
            .collect();
        PrefixTable { r, genus, occupied, divisor_prefix, coords }
    }

    pub fn genus(&self) -> i64 {
        self.genus
    }

    pub fn r(&self) -> i64 {
        self.r
    }

    pub fn loop_occupied(&self, t: i64) -> bool {
        self.occupied[t as usize - 1]
    }

    /// deg of `D` on the chain through loop t (t = 0 is the left tail).
    pub fn divisor_prefix(&self, t: i64) -> i64 {
        self.divisor_prefix[t as usize]
    }

    /// Slope of `psi_a` on bridge t (between loop t and loop t+1).
    pub fn coord(&self, t: i64, a: i64) -> i64 {
        self.coords[t as usize][a as usize]
    }

    /// deg of `D_F` on the chain through loop t, for `F = {i, j}`.
    pub fn pair_prefix(&self, t: i64, i: i64, j: i64) -> i64 {
        2 * self.divisor_prefix(t) - self.coord(t, i) - self.coord(t, j)
    }

    /// Slope of `psi_i + psi_j` on bridge t.
    pub fn bridge_slope(&self, t: i64, i: i64, j: i64) -> i64 {
        self.coord(t, i) + self.coord(t, j)
    }

    /// Slope of the stalled minimum on bridge t when the excess holds at
    /// `level` there: `deg(Delta | Gamma[0,t]) = 2t + level` forces this.
    pub fn stalled_slope(&self, t: i64, level: i64) -> i64 {
        2 * self.divisor_prefix(t) - 2 * t - level
    }

    /// Permissibility of `F = {i, j}` on loop t under a stalled excess:
    /// `D_F` must not lag `Delta` before the loop and must not lead it after.
    pub fn permissible(&self, t: i64, i: i64, j: i64, level: i64) -> bool {
        self.pair_prefix(t - 1, i, j) >= 2 * (t - 1) + level
            && self.pair_prefix(t, i, j) <= 2 * t + level
    }

    /// Members of `family` permissible on loop t under a stalled excess.
    pub fn permissible_set(&self, family: &PairSet, t: i64, level: i64) -> Vec<(i64, i64)> {
        family
            .pairs()
            .iter()
            .copied()
            .filter(|&(i, j)| self.permissible(t, i, j, level))
            .collect()
    }

    /// Members of `family` whose bridge slope at t equals the stalled slope.
    pub fn slope_matches(&self, family: &PairSet, t: i64, level: i64) -> Vec<(i64, i64)> {
        let want = self.stalled_slope(t, level);
        family
            .pairs()
            .iter()
            .copied()
            .filter(|&(i, j)| self.bridge_slope(t, i, j) == want)
            .collect()
    }
}
