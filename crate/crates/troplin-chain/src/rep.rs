//! Canonical representatives of vertex-avoiding classes and their witnesses.
//!
//! A class is vertex avoiding when its lattice path lingers exactly rho times
//! and its loop coordinates stay clear of the two loop vertices in every
//! relevant translate. For such a class and each 0 <= i <= r there is a unique
//! effective representative D_i with i chips at w_0 and r-i at the right end;
//! the witness psi_i with D + div(psi_i) = D_i is pinned down by psi_i(w_0)=0.
//! Its slope along bridge j is the path coordinate p_j(i), and on each loop it
//! solves a one-circle balance problem, which is what `circle_solve` does.

use std::collections::BTreeMap;

use num_traits::Zero;
use troplin_core::rat::qi;
use troplin_core::{Divisor, PLFunction, Q};

use crate::error::{ChainError, ChainResult};
use crate::model::ChainModel;
use crate::path::{rho, DivisorData, LingeringPath, Step};

/// An effective representative `divisor` = D_i together with the witness
/// `psi` satisfying D + div(psi) = divisor and psi(w_0) = 0.
#[derive(Debug, Clone)]
pub struct CanonicalRep {
    pub index: usize,
    pub divisor: Divisor,
    pub psi: PLFunction,
}

impl ChainModel {
    /// Checks the three vertex-avoiding conditions for data of rank >= r and
    /// degree d: exactly rho lingering steps, no coordinate at the right
    /// vertex, and no coordinate on any path translate of the left vertex.
    pub fn is_vertex_avoiding(&self, data: &DivisorData, r: usize, d: i64) -> ChainResult<bool> {
        let chain = self.params();
        let path = chain.lingering_path(data, r)?;
        if !path.stays_in_chamber() {
            return Err(ChainError::RankTooLow {
                need: r,
                found: chain.rank_exact(data)?,
            });
        }
        if d != data.degree() {
            return Err(ChainError::BadData(format!(
                "data has degree {}, not {d}",
                data.degree()
            )));
        }
        let want = rho(chain.genus, r, d);
        if want < 0 || path.lingering_count() as i64 != want {
            return Ok(false);
        }
        for k in 1..=chain.genus {
            let x = &data.x[k - 1];
            if x == chain.em(k) {
                return Ok(false);
            }
            let circ = chain.circumference(k);
            for j in 0..r {
                let c = path.coord(k - 1, j);
                if ((qi(c) * chain.em(k) - x) / &circ).is_integer() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Builds D_i and its witness for a vertex-avoiding class. The rank is
    /// computed from the data; `i` indexes the representatives 0..=rank.
    pub fn canonical_rep(&self, data: &DivisorData, i: usize) -> ChainResult<CanonicalRep> {
        let chain = self.params();
        let r = chain.rank_exact(data)?;
        if i > r {
            return Err(ChainError::IndexRange(i));
        }
        let d = data.degree();
        if !self.is_vertex_avoiding(data, r, d)? {
            return Err(ChainError::NotVertexAvoiding(
                "canonical representatives exist only for vertex-avoiding classes".into(),
            ));
        }
        let path = chain.lingering_path(data, r)?;

        let mut target = Divisor::zero();
        target.add_vertex(self.graph(), chain.w(0), i as i64);
        target.add_vertex(self.graph(), chain.v(chain.genus + 1), (r - i) as i64);
        for k in 1..=chain.genus {
            if let Some(pos) = self.rep_chip(&path, data, i, k)? {
                target.add_point(self.graph(), &self.loop_point(k, &pos)?, 1)?;
            }
        }

        let psi = self.witness(&path, data, i)?;
        let got = self.divisor(data)?.add(&psi.divisor(self.graph()));
        if got != target {
            return Err(ChainError::Invariant(
                "canonical representative disagrees with its witness function".into(),
            ));
        }
        Ok(CanonicalRep {
            index: i,
            divisor: target,
            psi,
        })
    }

    /// All representatives D_0, ..., D_r with their witnesses.
    pub fn canonical_basis(&self, data: &DivisorData) -> ChainResult<Vec<CanonicalRep>> {
        let r = self.params().rank_exact(data)?;
        (0..=r).map(|i| self.canonical_rep(data, i)).collect()
    }

    /// The coordinate of the D_i chip on loop k, or None when the chip is
    /// absent (an up step in direction i, or a down step when i = r).
    ///
    /// The chip sits the post-step coordinate p_k(i) bottom-lengths before the
    /// chip of D. Using the pre-step coordinate would differ on down-step
    /// loops, where it leaves the circle balance without an integer-slope
    /// solution, so no witness would exist at all.
    fn rep_chip(
        &self,
        path: &LingeringPath,
        data: &DivisorData,
        i: usize,
        k: usize,
    ) -> ChainResult<Option<Q>> {
        let chain = self.params();
        let step = path.steps[k - 1];
        let absent = if i < path.r {
            step == Step::Up(i)
        } else {
            step == Step::Down
        };
        if absent {
            return Ok(None);
        }
        let circ = chain.circumference(k);
        let raw = &data.x[k - 1] - qi(path.coord(k, i)) * chain.em(k);
        let pos = &raw - (&raw / &circ).floor() * &circ;
        if pos.is_zero() || pos == *chain.em(k) {
            return Err(ChainError::Invariant(format!(
                "representative chip landed on a vertex of loop {k}"
            )));
        }
        Ok(Some(pos))
    }

    /// Assembles psi_i: slope p_j(i) along bridge j, and on each loop the
    /// unique balance with the chip of D departing and the chip of D_i
    /// arriving. Values are walked left to right from psi(w_0) = 0.
    fn witness(
        &self,
        path: &LingeringPath,
        data: &DivisorData,
        i: usize,
    ) -> ChainResult<PLFunction> {
        let chain = self.params();
        let genus = chain.genus;
        let mut tracks: Vec<Vec<(Q, Q)>> = vec![Vec::new(); self.graph().edge_count()];
        let mut val = Q::zero(); // value at w_k while walking
        for k in 0..=genus {
            let slope = qi(path.coord(k, i));
            let n = chain.en(k);
            let end = &val + &slope * n;
            tracks[chain.bridge(k).0] = vec![(Q::zero(), val.clone()), (n.clone(), end.clone())];
            if k == genus {
                break;
            }
            // loop k+1: boundary slopes are the adjacent bridge slopes
            let kk = k + 1;
            let circ = chain.circumference(kk);
            let mut crossings: BTreeMap<Q, i64> = BTreeMap::new();
            crossings.insert(Q::zero(), 0);
            crossings.insert(chain.em(kk).clone(), 0);
            *crossings.entry(Q::zero()).or_insert(0) -= path.coord(kk - 1, i);
            *crossings.entry(chain.em(kk).clone()).or_insert(0) += path.coord(kk, i);
            let x = &data.x[kk - 1];
            if !x.is_zero() {
                *crossings.entry(x.clone()).or_insert(0) -= 1;
            }
            if let Some(pos) = self.rep_chip(path, data, i, kk)? {
                *crossings.entry(pos).or_insert(0) += 1;
            }
            let bps = circle_solve(&circ, &crossings)?;
            let m_len = chain.em(kk);
            let mut bottom = Vec::new();
            let mut top = Vec::new();
            let mut at_w = Q::zero();
            for (pos, rel) in &bps {
                let value = &end + rel;
                if pos <= m_len {
                    bottom.push((pos.clone(), value.clone()));
                }
                if pos >= m_len {
                    top.push((&circ - pos, value));
                }
                if pos == m_len {
                    at_w = rel.clone();
                }
            }
            top.reverse();
            tracks[chain.bottom(kk).0] = bottom;
            tracks[chain.top(kk).0] = top;
            val = &end + at_w;
        }
        Ok(PLFunction::from_tracks(self.graph(), tracks)?)
    }

    /// The witness and target for a multiset I: psi_I is the exact sum of the
    /// psi_i, and |I| * D + div(psi_I) adds up to the sum of the D_i.
    pub fn multiset_rep(&self, data: &DivisorData, idx: &[usize]) -> ChainResult<(Divisor, PLFunction)> {
        let chain = self.params();
        if idx.is_empty() {
            return Err(ChainError::BadData("multiset must be nonempty".into()));
        }
        if idx.len() > chain.mbar {
            return Err(ChainError::MultisetTooLarge(idx.len(), chain.mbar));
        }
        let mut reps: BTreeMap<usize, CanonicalRep> = BTreeMap::new();
        for &i in idx {
            if !reps.contains_key(&i) {
                reps.insert(i, self.canonical_rep(data, i)?);
            }
        }
        let mut psi = PLFunction::constant(self.graph(), Q::zero());
        let mut target = Divisor::zero();
        for &i in idx {
            let rep = &reps[&i];
            psi = psi.add(self.graph(), &rep.psi)?;
            target = target.add(&rep.divisor);
        }
        let base = self.divisor(data)?.scale(idx.len() as i64);
        if base.add(&psi.divisor(self.graph())) != target {
            return Err(ChainError::Invariant(
                "multiset witness disagrees with the summed representatives".into(),
            ));
        }
        Ok((target, psi))
    }

    /// The witness function alone; see [`ChainModel::multiset_rep`].
    pub fn psi_multiset(&self, data: &DivisorData, idx: &[usize]) -> ChainResult<PLFunction> {
        Ok(self.multiset_rep(data, idx)?.1)
    }
}

/// Solves for a piecewise linear function on a circle of circumference `circ`
/// with prescribed integer orders at the given positions (position 0 must be
/// present and orders must sum to zero). Returns breakpoints (position,
/// value) over [0, circ] normalized to value 0 at position 0.
fn circle_solve(circ: &Q, crossings: &BTreeMap<Q, i64>) -> ChainResult<Vec<(Q, Q)>> {
    let pts: Vec<(&Q, i64)> = crossings.iter().map(|(p, o)| (p, *o)).collect();
    if pts.is_empty() || !pts[0].0.is_zero() {
        return Err(ChainError::Invariant(
            "circle balance needs a crossing at position zero".into(),
        ));
    }
    if pts.iter().map(|(_, o)| o).sum::<i64>() != 0 {
        return Err(ChainError::Invariant(
            "circle orders must sum to zero".into(),
        ));
    }
    let t = pts.len() - 1;
    // slope on arc j is sigma0 minus the orders crossed so far; closing the
    // loop of values determines sigma0
    let mut cum = 0i64;
    let mut acc = Q::zero();
    for j in 1..=t {
        cum += pts[j].1;
        let next = if j < t { pts[j + 1].0 } else { circ };
        acc += qi(cum) * (next - pts[j].0);
    }
    let sigma0 = acc / circ;
    if !sigma0.is_integer() {
        return Err(ChainError::Invariant(
            "circle balance produced a non-integer slope".into(),
        ));
    }
    let mut out = vec![(Q::zero(), Q::zero())];
    let mut slope = sigma0;
    let mut value = Q::zero();
    for j in 1..=t {
        value += &slope * (pts[j].0 - pts[j - 1].0);
        out.push((pts[j].0.clone(), value.clone()));
        slope -= qi(pts[j].1);
    }
    value += &slope * (circ - pts[t].0);
    if !value.is_zero() {
        return Err(ChainError::Invariant(
            "circle values fail to close up".into(),
        ));
    }
    out.push((circ.clone(), Q::zero()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::make_admissible_chain;
    use crate::tableau::{tableau_to_divisor, Tableau};

    fn model(genus: usize) -> ChainModel {
        ChainModel::new(make_admissible_chain(genus, 2).unwrap()).unwrap()
    }

    #[test]
    fn circle_solve_balances_prescribed_orders() {
        // circumference 6: orders -2 at 0, +1 at 2, +1 at 4 close up with
        // integer slopes 1, 0, -1
        let mut crossings = BTreeMap::new();
        crossings.insert(Q::zero(), -2);
        crossings.insert(qi(2), 1);
        crossings.insert(qi(4), 1);
        let bps = circle_solve(&qi(6), &crossings).unwrap();
        let expect = vec![
            (Q::zero(), Q::zero()),
            (qi(2), qi(2)),
            (qi(4), qi(2)),
            (qi(6), Q::zero()),
        ];
        assert_eq!(bps, expect);
    }

    #[test]
    fn circle_solve_rejects_untransportable_chips() {
        // moving a single chip a non-trivial distance around a circle is not
        // the divisor of any integer-slope function
        let mut crossings = BTreeMap::new();
        crossings.insert(Q::zero(), 0);
        crossings.insert(qi(1), 1);
        crossings.insert(qi(4), -1);
        assert!(matches!(
            circle_solve(&qi(6), &crossings),
            Err(ChainError::Invariant(_))
        ));
    }

    #[test]
    fn vertex_avoiding_rejects_coordinate_at_w() {
        // a single lingering loop, as rho = 1 demands, but the chip sits on
        // the right loop vertex: x_1 = m_1 = 1
        let m = model(1);
        let data = DivisorData {
            d0: 1,
            x: vec![qi(1)],
        };
        assert_eq!(m.params().rank_exact(&data).unwrap(), 1);
        assert!(!m.is_vertex_avoiding(&data, 1, 2).unwrap());
    }

    #[test]
    fn excess_lingering_is_not_vertex_avoiding() {
        // degree 3 and rank 1 on genus 2 leaves room for two lingering steps;
        // this class takes none, so it is special rather than generic
        let m = model(2);
        let data = DivisorData {
            d0: 2,
            x: vec![qi(3), Q::zero()],
        };
        assert_eq!(m.params().rank_exact(&data).unwrap(), 1);
        assert!(!m.is_vertex_avoiding(&data, 1, 3).unwrap());
        assert!(matches!(
            m.canonical_rep(&data, 0),
            Err(ChainError::NotVertexAvoiding(_))
        ));
    }

    #[test]
    fn representatives_on_a_small_chain() {
        // the two-column tableau class on genus 2: d0 = 1, x = (2m_1, 0)
        let m = model(2);
        let data = DivisorData {
            d0: 1,
            x: vec![qi(2), Q::zero()],
        };
        assert_eq!(m.params().rank_exact(&data).unwrap(), 1);
        assert!(m.is_vertex_avoiding(&data, 1, 2).unwrap());
        let rep0 = m.canonical_rep(&data, 0).unwrap();
        let rep1 = m.canonical_rep(&data, 1).unwrap();
        for rep in [&rep0, &rep1] {
            assert!(rep.divisor.is_effective());
            assert_eq!(rep.divisor.deg(), 2);
        }
        assert_eq!(rep0.divisor.mult_vertex(m.graph(), m.params().w(0)), 0);
        assert_eq!(
            rep0.divisor.mult_vertex(m.graph(), m.params().v(3)),
            1
        );
        // D_0 keeps a chip on the empty loop 2, shifted by p_2(0) = 1 bottom
        let p = m.loop_point(2, &qi(393)).unwrap();
        assert_eq!(rep0.divisor.mult(&p), 1);
        assert_eq!(rep0.psi.vertex_value(m.graph(), m.params().w(0)), Q::zero());
        assert_eq!(m.sigma(&rep0.psi, 1), qi(1));
        assert_eq!(m.sigma(&rep0.psi, 2), qi(2));
        assert_eq!(m.sigma(&rep0.psi, 3), qi(1));
        // the top representative is the data itself with a constant witness
        assert_eq!(rep1.divisor, m.divisor(&data).unwrap());
        assert_eq!(
            rep1.psi,
            troplin_core::PLFunction::constant(m.graph(), Q::zero())
        );
    }

    #[test]
    fn multiset_size_is_capped() {
        let m = model(4);
        let t = Tableau::standard_rect(3, 1).unwrap();
        let data = tableau_to_divisor(m.params(), &t, 6).unwrap();
        assert!(matches!(
            m.multiset_rep(&data, &[0, 1, 2]),
            Err(ChainError::MultisetTooLarge(3, 2))
        ));
    }
}
