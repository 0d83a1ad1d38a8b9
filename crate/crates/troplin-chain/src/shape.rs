//! Shapes of the canonical witnesses over the standard left-to-right class.
//!
//! For the divisor built from the left-to-right standard tableau, the loops
//! split into r+1 regions of s consecutive loops, region `col` being where
//! the witness of index `col` changes slope. On a loop k in one of the first
//! r regions every witness falls into one of three shapes, each pinning down
//! the slopes around the loop and where the representative's chip sits on the
//! top edge; the last region, where the path steps down, has no such uniform
//! description. The descriptors returned here are recomputed from the lattice
//! path and then verified against the actual representative, so a successful
//! call is a checked statement about both.

use troplin_core::rat::qi;
use troplin_core::Q;

use crate::error::{ChainError, ChainResult};
use crate::model::ChainModel;
use crate::path::DivisorData;
use crate::tableau::{tableau_to_divisor, Tableau};

/// Where a witness chip sits on a loop in a given region, and the slopes
/// around that loop. Distances are measured along the top edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeCase {
    /// Index below the active column: the chip sits near the left vertex.
    BelowActive {
        chip_from_v: Q,
        bridge_slope: i64,
        bottom_slope: i64,
    },
    /// Index above the active column: constant slope across the loop, chip
    /// near the right vertex.
    AboveActive { chip_from_w: Q, slope: i64 },
    /// The active index itself: no chip, and the bridge slope increments.
    Active {
        left_slope: i64,
        right_slope: i64,
        bottom_slope: i64,
    },
}

impl ChainModel {
    /// Classifies the shape of witness `i` on loop `k`, which must lie in the
    /// region of column `col`; `data` must be the standard left-to-right
    /// class. Only columns 0..r qualify: the last region takes down steps,
    /// where the bridge slopes drop on every loop and none of the three
    /// constant-slope shapes applies. The prediction is verified against the
    /// computed representative before it is returned.
    pub fn shape_case(
        &self,
        data: &DivisorData,
        i: usize,
        col: usize,
        k: usize,
    ) -> ChainResult<ShapeCase> {
        let chain = self.params();
        let genus = chain.genus;
        let r = chain.rank_exact(data)?;
        if i > r {
            return Err(ChainError::IndexRange(i));
        }
        if col >= r {
            return Err(ChainError::IndexRange(col));
        }
        if genus % (r + 1) != 0 {
            return Err(ChainError::BadData(
                "the standard class needs rho = 0, so (r+1) must divide g".into(),
            ));
        }
        let s = genus / (r + 1);
        let std_tab = Tableau::standard_rect(r, s)?;
        let d = genus as i64 + r as i64 - s as i64;
        if *data != tableau_to_divisor(chain, &std_tab, d)? {
            return Err(ChainError::BadData(
                "shape analysis applies to the standard left-to-right class only".into(),
            ));
        }
        if k < col * s + 1 || k > (col + 1) * s {
            return Err(ChainError::OutsideRegion { k, col });
        }

        let path = chain.lingering_path(data, r)?;
        let sigma = path.coord(k - 1, col); // slope of the active witness entering loop k
        let (ri, si) = (r as i64, s as i64);
        let predicted = if i < col {
            ShapeCase::BelowActive {
                chip_from_v: qi(ri + si - i as i64 - 1 - sigma) * chain.em(k),
                bridge_slope: ri + si - i as i64,
                bottom_slope: ri + si - i as i64 - 1,
            }
        } else if i > col {
            ShapeCase::AboveActive {
                chip_from_w: qi(sigma - ri + i as i64) * chain.em(k),
                slope: ri - i as i64,
            }
        } else {
            ShapeCase::Active {
                left_slope: sigma,
                right_slope: sigma + 1,
                bottom_slope: sigma,
            }
        };

        let rep = self.canonical_rep(data, i)?;
        let left = self.sigma(&rep.psi, k);
        let right = self.sigma(&rep.psi, k + 1);
        let bottom_track = rep.psi.track(chain.bottom(k));
        let (b0, b1) = (bottom_track.first().unwrap(), bottom_track.last().unwrap());
        let bottom = (&b1.1 - &b0.1) / chain.em(k);
        let chip: Vec<&troplin_core::GraphPoint> = rep
            .divisor
            .support()
            .filter(|p| {
                p.edge == chain.top(k)
                    || p.edge == chain.bottom(k)
                    || self.graph().point_vertex(p).map_or(false, |v| {
                        v == chain.v(k) || v == chain.w(k)
                    })
            })
            .collect();
        let ok = match &predicted {
            ShapeCase::BelowActive {
                chip_from_v,
                bridge_slope,
                bottom_slope,
            } => {
                left == qi(*bridge_slope)
                    && right == qi(*bridge_slope)
                    && bottom == qi(*bottom_slope)
                    && chip.len() == 1
                    && chip[0].edge == chain.top(k)
                    && chip[0].offset == *chip_from_v
                    && bottom_track.len() == 2
            }
            ShapeCase::AboveActive { chip_from_w, slope } => {
                left == qi(*slope)
                    && right == qi(*slope)
                    && bottom == qi(*slope)
                    && chip.len() == 1
                    && chip[0].edge == chain.top(k)
                    && chip[0].offset == chain.el(k) - chip_from_w
                    && bottom_track.len() == 2
            }
            ShapeCase::Active {
                left_slope,
                right_slope,
                bottom_slope,
            } => {
                left == qi(*left_slope)
                    && right == qi(*right_slope)
                    && bottom == qi(*bottom_slope)
                    && chip.is_empty()
                    && bottom_track.len() == 2
            }
        };
        if !ok {
            return Err(ChainError::Invariant(format!(
                "shape prediction for witness {i} on loop {k} disagrees with the representative"
            )));
        }
        Ok(predicted)
    }
}
