//! Rectangular standard tableaux and their bijection with lingering-free
//! classes.
//!
//! When rho = 0, so g = (r+1)s, the rank-r degree-d classes correspond to
//! standard tableaux with r+1 columns and s rows: entry k goes in column j
//! when step k of the lattice path moves in direction e_j, and in the last
//! column when it moves down.

use num_traits::Zero;
use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use troplin_core::rat::qi;
use troplin_core::Q;

use crate::error::{ChainError, ChainResult};
use crate::params::ChainParams;
use crate::path::{DivisorData, LingeringPath, Step};

/// A standard rectangular tableau, stored row-major with entries 1..=rows*cols.
/// Columns are numbered 0..=cols-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    rows: usize,
    cols: usize,
    grid: Vec<Vec<u32>>,
}

impl Tableau {
    pub fn new(grid: Vec<Vec<u32>>) -> ChainResult<Self> {
        let rows = grid.len();
        if rows == 0 || grid[0].is_empty() {
            return Err(ChainError::NotStandard("tableau is empty".into()));
        }
        let cols = grid[0].len();
        if grid.iter().any(|row| row.len() != cols) {
            return Err(ChainError::NotStandard("rows have unequal lengths".into()));
        }
        let n = rows * cols;
        let mut seen = vec![false; n + 1];
        for row in &grid {
            for &v in row {
                if v == 0 || v as usize > n || seen[v as usize] {
                    return Err(ChainError::NotStandard(format!(
                        "entries must be a permutation of 1..={n}"
                    )));
                }
                seen[v as usize] = true;
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                if j + 1 < cols && grid[i][j] >= grid[i][j + 1] {
                    return Err(ChainError::NotStandard(format!(
                        "row {i} is not strictly increasing"
                    )));
                }
                if i + 1 < rows && grid[i][j] >= grid[i + 1][j] {
                    return Err(ChainError::NotStandard(format!(
                        "column {j} is not strictly increasing"
                    )));
                }
            }
        }
        Ok(Tableau { rows, cols, grid })
    }

    /// The left-to-right filling: column j holds js+1, ..., (j+1)s.
    pub fn standard_rect(r: usize, s: usize) -> ChainResult<Self> {
        if s == 0 {
            return Err(ChainError::NotStandard("tableau needs at least one row".into()));
        }
        let grid = (0..s)
            .map(|row| (0..=r).map(|col| (col * s + row + 1) as u32).collect())
            .collect();
        Tableau::new(grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn grid(&self) -> &[Vec<u32>] {
        &self.grid
    }

    /// Column of an entry, 1-based entries.
    pub fn column_of(&self, entry: u32) -> Option<usize> {
        for row in &self.grid {
            if let Some(j) = row.iter().position(|&v| v == entry) {
                return Some(j);
            }
        }
        None
    }
}

impl Serialize for Tableau {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.grid.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tableau {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let grid = Vec::<Vec<u32>>::deserialize(d)?;
        Tableau::new(grid).map_err(D::Error::custom)
    }
}

/// Reconstructs divisor data from a tableau by replaying the step rule.
/// The degree is determined by the shape (d = g + r - s) and must match `d`.
pub fn tableau_to_divisor(chain: &ChainParams, t: &Tableau, d: i64) -> ChainResult<DivisorData> {
    let genus = chain.genus;
    if t.rows * t.cols != genus {
        return Err(ChainError::NotStandard(format!(
            "tableau has {} cells, the chain has genus {genus}",
            t.rows * t.cols
        )));
    }
    let r = t.cols - 1;
    let s = t.rows;
    let expect_d = genus as i64 + r as i64 - s as i64;
    if d != expect_d {
        return Err(ChainError::BadData(format!(
            "a {}x{} tableau encodes degree {expect_d}, not {d}",
            s,
            r + 1
        )));
    }
    let mut p: Vec<i64> = (0..r).map(|i| r as i64 - i as i64).collect();
    let mut x = Vec::with_capacity(genus);
    for k in 1..=genus {
        let col = t
            .column_of(k as u32)
            .expect("validated tableaux contain every entry");
        if col == r {
            x.push(Q::zero());
            p.iter_mut().for_each(|y| *y -= 1);
        } else {
            x.push(qi(p[col] + 1) * chain.em(k));
            p[col] += 1;
        }
    }
    let data = DivisorData { d0: r as i64, x };
    data.validate(chain)?;
    Ok(data)
}

/// Inverts the bijection for lingering-free paths of rectangular shape.
pub fn path_to_tableau(path: &LingeringPath) -> ChainResult<Tableau> {
    let g = path.steps.len();
    let r = path.r;
    if g % (r + 1) != 0 {
        return Err(ChainError::NotStandard(format!(
            "{g} steps do not fill {} equal columns",
            r + 1
        )));
    }
    let s = g / (r + 1);
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); r + 1];
    for (idx, step) in path.steps.iter().enumerate() {
        let col = match step {
            Step::Up(j) => *j,
            Step::Down => r,
            Step::Linger => return Err(ChainError::LingeringSteps),
        };
        columns[col].push(idx as u32 + 1);
    }
    if columns.iter().any(|c| c.len() != s) {
        return Err(ChainError::NotStandard(
            "steps do not fill the columns evenly".into(),
        ));
    }
    let grid = (0..s)
        .map(|row| (0..=r).map(|col| columns[col][row]).collect())
        .collect();
    Tableau::new(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_admissible_chain;
    use num_traits::Zero;

    #[test]
    fn standard_filling_is_standard() {
        let t = Tableau::standard_rect(4, 2).unwrap();
        assert_eq!(t.grid()[0], vec![1, 3, 5, 7, 9]);
        assert_eq!(t.grid()[1], vec![2, 4, 6, 8, 10]);
        assert_eq!(t.column_of(6), Some(2));
    }

    #[test]
    fn bad_tableaux_are_rejected() {
        assert!(Tableau::new(vec![]).is_err());
        assert!(Tableau::new(vec![vec![1, 2], vec![3]]).is_err());
        assert!(Tableau::new(vec![vec![1, 1], vec![2, 3]]).is_err());
        assert!(Tableau::new(vec![vec![2, 1], vec![3, 4]]).is_err());
        assert!(Tableau::new(vec![vec![1, 3], vec![2, 4], vec![5, 6]]).is_ok());
        assert!(Tableau::new(vec![vec![1, 4], vec![3, 2]]).is_err());
    }

    #[test]
    fn one_column_tableau_is_the_empty_class() {
        let chain = make_admissible_chain(3, 2).unwrap();
        let t = Tableau::new(vec![vec![1], vec![2], vec![3]]).unwrap();
        let data = tableau_to_divisor(&chain, &t, 0).unwrap();
        assert_eq!(data.d0, 0);
        assert!(data.x.iter().all(|x| x.is_zero()));
        let path = chain.lingering_path(&data, 0).unwrap();
        assert!(path.steps.iter().all(|s| *s == Step::Down));
    }

    #[test]
    fn degree_must_match_the_shape() {
        let chain = make_admissible_chain(4, 2).unwrap();
        let t = Tableau::standard_rect(3, 1).unwrap();
        assert!(tableau_to_divisor(&chain, &t, 5).is_err());
        assert!(tableau_to_divisor(&chain, &t, 6).is_ok());
    }

    #[test]
    fn round_trip_through_the_path() {
        let chain = make_admissible_chain(6, 2).unwrap();
        for t in [
            Tableau::standard_rect(2, 2).unwrap(),
            Tableau::standard_rect(1, 3).unwrap(),
            Tableau::standard_rect(5, 1).unwrap(),
            Tableau::new(vec![vec![1, 2, 4], vec![3, 5, 6]]).unwrap(),
        ] {
            let r = t.cols() - 1;
            let s = t.rows();
            let d = 6 + r as i64 - s as i64;
            let data = tableau_to_divisor(&chain, &t, d).unwrap();
            let path = chain.lingering_path(&data, r).unwrap();
            assert!(path.stays_in_chamber(), "tableau {t:?} left the chamber");
            assert_eq!(path_to_tableau(&path).unwrap(), t);
        }
    }

    #[test]
    fn tableau_serializes_as_its_grid() {
        let t = Tableau::standard_rect(1, 2).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, "[[1,3],[2,4]]");
        let back: Tableau = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(serde_json::from_str::<Tableau>("[[2,1],[3,4]]").is_err());
    }
}
