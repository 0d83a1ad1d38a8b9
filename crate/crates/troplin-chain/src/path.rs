//! Divisor classification data and the associated lattice path.
//!
//! Every divisor class on a chain has a unique representative consisting of
//! `d0` chips at w_0 plus at most one chip per loop. The rank of the class is
//! read off from a lattice path in Z^r built from the loop coordinates: the
//! class has rank at least r exactly when the path stays in the open chamber
//! `y_0 > y_1 > ... > y_{r-1} > 0`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use troplin_core::rat::{qi, qvec};
use troplin_core::Q;

use crate::error::{ChainError, ChainResult};
use crate::params::ChainParams;

/// The deficiency `g - (r+1)(g-d+r)`: the number of lingering steps a rank-r
/// path of degree d may take, and the dimension count for such classes.
pub fn rho(genus: usize, r: usize, d: i64) -> i64 {
    let g = genus as i64;
    let r = r as i64;
    g - (r + 1) * (g - d + r)
}

/// Canonical divisor data on a chain: `d0` chips at w_0 and one chip on loop
/// k at counterclockwise coordinate `x[k-1]`, where coordinate 0 denotes an
/// absent chip.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorData {
    pub d0: i64,
    #[serde(with = "qvec")]
    pub x: Vec<Q>,
}

impl DivisorData {
    pub fn validate(&self, chain: &ChainParams) -> ChainResult<()> {
        if self.d0 < 0 {
            return Err(ChainError::BadData("d0 must be nonnegative".into()));
        }
        if self.x.len() != chain.genus {
            return Err(ChainError::BadData(format!(
                "expected {} loop coordinates, found {}",
                chain.genus,
                self.x.len()
            )));
        }
        for k in 1..=chain.genus {
            let x = &self.x[k - 1];
            if x < &Q::zero() || *x >= chain.circumference(k) {
                return Err(ChainError::BadData(format!(
                    "coordinate on loop {k} must lie in [0, ell+m)"
                )));
            }
        }
        Ok(())
    }

    /// Total degree: chips at the base plus one per occupied loop.
    pub fn degree(&self) -> i64 {
        self.d0 + self.x.iter().filter(|x| !x.is_zero()).count() as i64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    /// Increases coordinate j by one.
    Up(usize),
    /// Decreases every coordinate by one; taken when the loop has no chip.
    Down,
    /// Leaves the path unchanged.
    Linger,
}

/// The lattice path p_0, ..., p_g in Z^r attached to divisor data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LingeringPath {
    pub r: usize,
    pub points: Vec<Vec<i64>>,
    pub steps: Vec<Step>,
}

impl LingeringPath {
    /// Coordinate `p_k(i)`, extended by the convention `p_k(r) = 0`.
    pub fn coord(&self, k: usize, i: usize) -> i64 {
        if i == self.r {
            0
        } else {
            self.points[k][i]
        }
    }

    pub fn point_in_chamber(&self, k: usize) -> bool {
        in_chamber(&self.points[k])
    }

    pub fn stays_in_chamber(&self) -> bool {
        (0..self.points.len()).all(|k| self.point_in_chamber(k))
    }

    pub fn lingering_count(&self) -> usize {
        self.steps.iter().filter(|s| **s == Step::Linger).count()
    }
}

fn in_chamber(p: &[i64]) -> bool {
    p.windows(2).all(|w| w[0] > w[1]) && p.last().map_or(true, |last| *last > 0)
}

/// True when `x = c * m` modulo the loop circumference.
fn congruent(x: &Q, c: i64, m: &Q, circ: &Q) -> bool {
    ((qi(c) * m - x) / circ).is_integer()
}

impl ChainParams {
    /// Runs the step rule: down when the loop is empty, up in direction j when
    /// the loop coordinate matches `(p(j)+1)*m` and both endpoints of the step
    /// are in the chamber, lingering otherwise.
    pub fn lingering_path(&self, data: &DivisorData, r: usize) -> ChainResult<LingeringPath> {
        data.validate(self)?;
        let start: Vec<i64> = (0..r).map(|i| data.d0 - i as i64).collect();
        let mut points = vec![start];
        let mut steps = Vec::with_capacity(self.genus);
        for k in 1..=self.genus {
            let x = &data.x[k - 1];
            let p = points.last().unwrap().clone();
            let mut step = Step::Linger;
            if x.is_zero() {
                step = Step::Down;
            } else {
                let circ = self.circumference(k);
                for j in 0..r {
                    if !congruent(x, p[j] + 1, self.em(k), &circ) {
                        continue;
                    }
                    let mut bumped = p.clone();
                    bumped[j] += 1;
                    if in_chamber(&p) && in_chamber(&bumped) {
                        step = Step::Up(j);
                        break;
                    }
                }
            }
            let mut next = p;
            match step {
                Step::Up(j) => next[j] += 1,
                Step::Down => next.iter_mut().for_each(|y| *y -= 1),
                Step::Linger => {}
            }
            points.push(next);
            steps.push(step);
        }
        Ok(LingeringPath { r, points, steps })
    }

    /// Rank-at-least-r test: the whole path must stay in the open chamber.
    pub fn rank_at_least(&self, data: &DivisorData, r: usize) -> ChainResult<bool> {
        Ok(self.lingering_path(data, r)?.stays_in_chamber())
    }

    /// Exact rank by binary search; the test is monotone in r and the rank
    /// never exceeds d0.
    pub fn rank_exact(&self, data: &DivisorData) -> ChainResult<usize> {
        data.validate(self)?;
        if data.d0 == 0 {
            return Ok(0);
        }
        let mut lo = 0usize; // rank_at_least(lo) holds; rank 0 is the data itself
        let mut hi = data.d0 as usize + 1; // rank_at_least(hi) fails: p_0 leaves the chamber
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.rank_at_least(data, mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_admissible_chain;

    #[test]
    fn all_chips_at_base_step_down() {
        let chain = make_admissible_chain(3, 2).unwrap();
        let data = DivisorData {
            d0: 5,
            x: vec![Q::zero(); 3],
        };
        let path = chain.lingering_path(&data, 2).unwrap();
        assert!(path.steps.iter().all(|s| *s == Step::Down));
        assert_eq!(path.points[3], vec![2, 1]);
    }

    #[test]
    fn single_chip_at_base_has_rank_zero() {
        for genus in 1..=6 {
            let chain = make_admissible_chain(genus, 2).unwrap();
            let data = DivisorData {
                d0: 1,
                x: vec![Q::zero(); genus],
            };
            assert_eq!(chain.rank_exact(&data).unwrap(), 0);
        }
    }

    #[test]
    fn chamber_needs_d0_at_least_r() {
        let chain = make_admissible_chain(2, 2).unwrap();
        let data = DivisorData {
            d0: 1,
            x: vec![qi(2), qi(22)],
        };
        // p_0 = (1, 0) already sits on the chamber wall for r = 2
        assert!(!chain.rank_at_least(&data, 2).unwrap());
    }

    #[test]
    fn up_steps_follow_the_congruence() {
        let chain = make_admissible_chain(2, 2).unwrap();
        // loop 1: x = (d0+1)*m1 = 3 bumps coordinate 0
        let data = DivisorData {
            d0: 2,
            x: vec![qi(3), Q::zero()],
        };
        let path = chain.lingering_path(&data, 1).unwrap();
        assert_eq!(path.steps, vec![Step::Up(0), Step::Down]);
        assert_eq!(path.points, vec![vec![2], vec![3], vec![2]]);
        assert!(path.stays_in_chamber());
    }

    #[test]
    fn mismatched_coordinate_lingers() {
        let chain = make_admissible_chain(2, 2).unwrap();
        let data = DivisorData {
            d0: 2,
            x: vec![troplin_core::rat::q(7, 2), Q::zero()],
        };
        let path = chain.lingering_path(&data, 1).unwrap();
        assert_eq!(path.steps[0], Step::Linger);
    }

    #[test]
    fn out_of_range_coordinate_rejected() {
        let chain = make_admissible_chain(1, 2).unwrap();
        let data = DivisorData {
            d0: 1,
            x: vec![qi(22)],
        };
        assert!(matches!(
            chain.lingering_path(&data, 1),
            Err(ChainError::BadData(_))
        ));
    }
}
