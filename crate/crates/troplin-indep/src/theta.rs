//! The minimum function of a shifted family on a chain of loops, and the
//! distribution of its chips over the loop regions.
//!
//! The chain decomposes into regions gamma_0, ..., gamma_{g+1}: gamma_0 runs
//! from w_0 to the midpoint of the first bridge, gamma_k surrounds loop k out
//! to the midpoints of its bridges, and gamma_{g+1} is the right tail. For
//! theta = min_I (psi_I + b_I) over multiset witnesses of size m, the divisor
//! Delta = m*D + div(theta) is effective of degree m*d; when the minimum is
//! attained twice everywhere its chips are forced to spread out: at least two
//! on each closed loop and at each chain end, and a multiset can only attain
//! the minimum on a loop when its prefix degrees are compatible with the chip
//! counts to the left. These facts power the positional checks here.

use num_traits::Zero;
use troplin_chain::{ChainModel, DivisorData, LingeringPath};
use troplin_core::plf::min_family;
use troplin_core::{Divisor, EdgeId, GraphPoint, PLFunction, Q, Subgraph};

use crate::comb::Combination;
use crate::error::{IndepError, IndepResult};

/// The minimum of a shifted family together with the division of the chips
/// of `Delta = m*D + div(theta)` over the chain regions.
#[derive(Debug, Clone)]
pub struct ThetaAnalysis {
    pub theta: PLFunction,
    pub delta: Divisor,
    /// Chip count of Delta on gamma_0, ..., gamma_{g+1}.
    pub delta_deg: Vec<i64>,
    /// Running excess: chips on gamma_0 through gamma_k, minus 2k.
    pub excess: Vec<i64>,
}

/// Index of the region containing `p`: 0 for the left tail up to the first
/// bridge midpoint, k for the region around loop k, g+1 for the right tail.
/// Bridge midpoints belong to the region on their right.
pub fn region_index(model: &ChainModel, p: &GraphPoint) -> usize {
    let g = model.graph();
    if let Some(v) = g.point_vertex(p) {
        let id = v.0;
        return if id % 2 == 1 { (id + 1) / 2 } else { id / 2 };
    }
    let e = p.edge.0;
    if e % 3 == 0 {
        // bridge k: the left half lies in region k
        let k = e / 3;
        if troplin_core::rat::qi(2) * &p.offset < *g.len(p.edge) {
            k
        } else {
            k + 1
        }
    } else {
        (e + 2) / 3
    }
}

/// Computes theta, Delta, and the chip distribution for a family shifted by
/// `b` over the base divisor `base` counted `m` times.
pub fn theta_analysis(
    model: &ChainModel,
    funcs: &[PLFunction],
    b: &Combination,
    base: &Divisor,
    m: i64,
) -> IndepResult<ThetaAnalysis> {
    if funcs.is_empty() {
        return Err(IndepError::EmptyFamily);
    }
    b.check_len(funcs.len())?;
    let g = model.graph();
    let shifted: Vec<(PLFunction, Q)> = funcs
        .iter()
        .zip(&b.0)
        .map(|(f, c)| (f.clone(), c.clone()))
        .collect();
    let theta = min_family(g, &shifted)?;
    let delta = base.scale(m).add(&theta.divisor(g));
    if !delta.is_effective() {
        let bad = delta
            .iter()
            .find(|(_, mult)| *mult < 0)
            .map(|(p, _)| p.to_string())
            .unwrap_or_default();
        return Err(IndepError::NotEffective(format!(
            "m*D + div(theta) goes negative at {bad}"
        )));
    }
    let genus = model.params().genus;
    let mut delta_deg = vec![0i64; genus + 2];
    for (p, mult) in delta.iter() {
        delta_deg[region_index(model, p)] += mult;
    }
    let mut excess = Vec::with_capacity(genus + 2);
    let mut run = 0i64;
    for (k, d) in delta_deg.iter().enumerate() {
        run += d;
        excess.push(run - 2 * k as i64);
    }
    Ok(ThetaAnalysis {
        theta,
        delta,
        delta_deg,
        excess,
    })
}

/// A family of multiset witnesses psi_I on a fixed vertex-avoiding class.
#[derive(Debug)]
pub struct MultisetFamily<'a> {
    model: &'a ChainModel,
    data: DivisorData,
    path: LingeringPath,
    rank: usize,
    size: usize,
    multisets: Vec<Vec<usize>>,
    funcs: Vec<PLFunction>,
    base: Divisor,
}

impl<'a> MultisetFamily<'a> {
    /// All multisets {i, j} with 0 <= i <= j <= rank, in lexicographic order.
    pub fn pairs(model: &'a ChainModel, data: &DivisorData) -> IndepResult<Self> {
        let r = model.params().rank_exact(data)?;
        let mut multisets = Vec::new();
        for i in 0..=r {
            for j in i..=r {
                multisets.push(vec![i, j]);
            }
        }
        Self::with_multisets(model, data, multisets)
    }

    /// A chosen list of multisets, all of one size.
    pub fn with_multisets(
        model: &'a ChainModel,
        data: &DivisorData,
        multisets: Vec<Vec<usize>>,
    ) -> IndepResult<Self> {
        if multisets.is_empty() {
            return Err(IndepError::EmptyFamily);
        }
        let size = multisets[0].len();
        let mut sorted = Vec::with_capacity(multisets.len());
        for idx in multisets {
            if idx.len() != size {
                return Err(IndepError::BadFamily(
                    "multisets must all have the same size".into(),
                ));
            }
            let mut idx = idx;
            idx.sort_unstable();
            sorted.push(idx);
        }
        let rank = model.params().rank_exact(data)?;
        let mut funcs = Vec::with_capacity(sorted.len());
        for idx in &sorted {
            funcs.push(model.psi_multiset(data, idx)?);
        }
        let base = model.divisor(data)?;
        let path = model.params().lingering_path(data, rank)?;
        Ok(MultisetFamily {
            model,
            data: data.clone(),
            path,
            rank,
            size,
            multisets: sorted,
            funcs,
            base,
        })
    }

    pub fn model(&self) -> &ChainModel {
        self.model
    }

    pub fn funcs(&self) -> &[PLFunction] {
        &self.funcs
    }

    pub fn multisets(&self) -> &[Vec<usize>] {
        &self.multisets
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The common multiset size m.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn base(&self) -> &Divisor {
        &self.base
    }

    /// Position of a multiset in the family, if present.
    pub fn position(&self, idx: &[usize]) -> Option<usize> {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        self.multisets.iter().position(|m| *m == idx)
    }

    pub fn analyze(&self, b: &Combination) -> IndepResult<ThetaAnalysis> {
        theta_analysis(self.model, &self.funcs, b, &self.base, self.size as i64)
    }

    /// deg(D restricted to the chain through loop k): base chips plus the
    /// occupied loops up to k.
    pub fn base_prefix_degree(&self, k: usize) -> i64 {
        let occupied = self.data.x[..k].iter().filter(|x| !x.is_zero()).count();
        self.data.d0 + occupied as i64
    }

    /// deg(D_I restricted to the chain through loop k): the multiset drops
    /// one chip below the base count for every unit of bridge slope.
    pub fn prefix_degree(&self, which: usize, k: usize) -> i64 {
        let base = self.size as i64 * self.base_prefix_degree(k);
        let drop: i64 = self.multisets[which]
            .iter()
            .map(|&i| self.path.coord(k, i))
            .sum();
        base - drop
    }

    /// Whether the prefix degrees of multiset `which` are compatible with
    /// the chip distribution on the closed loop k: at least the chips to the
    /// left arrive before the loop, and no more than those through the loop
    /// have arrived after it.
    pub fn permissible_on_loop(&self, which: usize, k: usize, delta_deg: &[i64]) -> bool {
        let left: i64 = delta_deg[..k].iter().sum();
        let through = left + delta_deg[k];
        self.prefix_degree(which, k - 1) >= left && self.prefix_degree(which, k) <= through
    }

    pub fn permissible_on_range(
        &self,
        which: usize,
        lo: usize,
        hi: usize,
        delta_deg: &[i64],
    ) -> bool {
        (lo..=hi).any(|k| self.permissible_on_loop(which, k, delta_deg))
    }

    /// All family positions permissible on the closed loop k.
    pub fn permissible_set(&self, k: usize, delta_deg: &[i64]) -> Vec<usize> {
        (0..self.multisets.len())
            .filter(|&w| self.permissible_on_loop(w, k, delta_deg))
            .collect()
    }

    /// Whether psi_I + b_I attains the family minimum somewhere on the
    /// closed loop k.
    pub fn attains_on_loop(
        &self,
        which: usize,
        b: &Combination,
        th: &ThetaAnalysis,
        k: usize,
    ) -> IndepResult<bool> {
        let dev = self.deviation(which, b, th)?;
        Ok(self.loop_extreme(&dev, k, false).is_zero())
    }

    /// All family positions attaining the minimum somewhere on closed loop k.
    pub fn attainers_on_loop(
        &self,
        b: &Combination,
        th: &ThetaAnalysis,
        k: usize,
    ) -> IndepResult<Vec<usize>> {
        let mut out = Vec::new();
        for which in 0..self.funcs.len() {
            if self.attains_on_loop(which, b, th, k)? {
                out.push(which);
            }
        }
        Ok(out)
    }

    /// psi_which + b_which - theta, nonnegative when theta is the family
    /// minimum under the same constants.
    fn deviation(
        &self,
        which: usize,
        b: &Combination,
        th: &ThetaAnalysis,
    ) -> IndepResult<PLFunction> {
        b.check_len(self.funcs.len())?;
        Ok(self.funcs[which]
            .shift(&b.0[which])
            .sub(self.model.graph(), &th.theta)?)
    }

    /// Minimum (or maximum) of a function over the closed loop k; piecewise
    /// linear functions take their extremes at breakpoints, which the edge
    /// tracks list together with both endpoints.
    fn loop_extreme(&self, f: &PLFunction, k: usize, max: bool) -> Q {
        let chain = self.model.params();
        let edges = [chain.bottom(k), chain.top(k)];
        let vals = edges
            .iter()
            .flat_map(|e: &EdgeId| f.track(*e).iter().map(|(_, v)| v));
        if max { vals.max() } else { vals.min() }
            .expect("loop tracks are nonempty")
            .clone()
    }

    fn loop_subgraph(&self, k: usize) -> IndepResult<Subgraph> {
        let chain = self.model.params();
        Ok(Subgraph::from_edges(
            self.model.graph(),
            &[chain.bottom(k), chain.top(k)],
        )?)
    }

    /// Checks that Delta puts at least two chips at each chain end and on
    /// each closed loop, as the minimum being everywhere twice forces.
    pub fn check_two_chips(&self, th: &ThetaAnalysis) -> IndepResult<()> {
        let g = self.model.graph();
        let chain = self.model.params();
        if th.delta.mult_vertex(g, chain.w(0)) < 2 {
            return Err(IndepError::Invariant(
                "fewer than two chips of Delta at the left end".into(),
            ));
        }
        if th.delta.mult_vertex(g, chain.v(chain.genus + 1)) < 2 {
            return Err(IndepError::Invariant(
                "fewer than two chips of Delta at the right end".into(),
            ));
        }
        for k in 1..=chain.genus {
            if th.delta.deg_on(g, &self.loop_subgraph(k)?) < 2 {
                return Err(IndepError::Invariant(format!(
                    "fewer than two chips of Delta on loop {k}"
                )));
            }
        }
        Ok(())
    }

    /// Checks that every multiset attaining the minimum on a closed loop is
    /// permissible there. Meaningful on chains whose bridges dominate the
    /// loops, which the parameter validation enforces.
    pub fn check_long_bridges(&self, b: &Combination, th: &ThetaAnalysis) -> IndepResult<()> {
        for k in 1..=self.model.params().genus {
            for which in self.attainers_on_loop(b, th, k)? {
                if !self.permissible_on_loop(which, k, &th.delta_deg) {
                    return Err(IndepError::Invariant(format!(
                        "multiset {:?} attains the minimum on loop {k} but is not permissible there",
                        self.multisets[which]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks that on every loop carrying exactly two chips and exactly
    /// three attaining multisets, one of the three attains the minimum on
    /// the whole loop.
    pub fn check_three_functions(&self, b: &Combination, th: &ThetaAnalysis) -> IndepResult<()> {
        for k in 1..=self.model.params().genus {
            let attainers = self.attainers_on_loop(b, th, k)?;
            if th.delta_deg[k] != 2 || attainers.len() != 3 {
                continue;
            }
            let mut covers = false;
            for &which in &attainers {
                let dev = self.deviation(which, b, th)?;
                if self.loop_extreme(&dev, k, true).is_zero() {
                    covers = true;
                    break;
                }
            }
            if !covers {
                return Err(IndepError::Invariant(format!(
                    "no attaining multiset covers all of loop {k}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use troplin_chain::make_admissible_chain;
    use troplin_core::rat::{q, qi};

    fn lingering_genus_one() -> (ChainModel, DivisorData) {
        let model = ChainModel::new(make_admissible_chain(1, 2).unwrap()).unwrap();
        // one loop, one lingering step: the chip at 21/2 matches no translate
        let data = DivisorData {
            d0: 1,
            x: vec![q(21, 2)],
        };
        (model, data)
    }

    #[test]
    fn regions_split_bridges_at_their_midpoints() {
        let model = ChainModel::new(make_admissible_chain(2, 2).unwrap()).unwrap();
        let g = model.graph();
        let chain = model.params();
        assert_eq!(region_index(&model, &g.vertex_point(chain.w(0))), 0);
        assert_eq!(region_index(&model, &g.vertex_point(chain.v(1))), 1);
        assert_eq!(region_index(&model, &g.vertex_point(chain.w(2))), 2);
        assert_eq!(region_index(&model, &g.vertex_point(chain.v(3))), 3);
        assert_eq!(region_index(&model, &model.u(1)), 1);
        assert_eq!(region_index(&model, &model.u(2)), 2);
        let before = g.point(chain.bridge(1), qi(1)).unwrap();
        assert_eq!(region_index(&model, &before), 1);
        let on_loop = model.loop_point(2, &qi(100)).unwrap();
        assert_eq!(region_index(&model, &on_loop), 2);
    }

    #[test]
    fn singleton_analysis_recovers_the_representative() {
        let (model, data) = lingering_genus_one();
        let family = MultisetFamily::with_multisets(&model, &data, vec![vec![0]]).unwrap();
        let th = family.analyze(&Combination::zeros(1)).unwrap();
        // theta = psi_0, so Delta = D_0: nothing at w_0, the moved loop chip,
        // and one chip at the right end
        assert_eq!(th.delta_deg, vec![0, 1, 1]);
        assert_eq!(th.excess, vec![0, -1, -2]);
        assert_eq!(th.delta.deg(), 2);
        let moved = model.loop_point(1, &q(19, 2)).unwrap();
        assert_eq!(th.delta.mult(&moved), 1);
        // a single function is never a dependence, and the chip spread shows it
        assert!(family.check_two_chips(&th).is_err());
    }

    #[test]
    fn prefix_degrees_follow_the_path() {
        let (model, data) = lingering_genus_one();
        let family = MultisetFamily::pairs(&model, &data).unwrap();
        // pairs (0,0), (0,1), (1,1); path lingers at p = (1)
        assert_eq!(family.rank(), 1);
        assert_eq!(family.size(), 2);
        assert_eq!(family.base_prefix_degree(0), 1);
        assert_eq!(family.base_prefix_degree(1), 2);
        let p00 = family.position(&[0, 0]).unwrap();
        let p11 = family.position(&[1, 1]).unwrap();
        assert_eq!(family.prefix_degree(p00, 0), 0);
        assert_eq!(family.prefix_degree(p00, 1), 2);
        assert_eq!(family.prefix_degree(p11, 0), 2);
        assert_eq!(family.prefix_degree(p11, 1), 4);
    }

    #[test]
    fn mixed_sizes_are_rejected() {
        let (model, data) = lingering_genus_one();
        let err =
            MultisetFamily::with_multisets(&model, &data, vec![vec![0], vec![0, 1]]).unwrap_err();
        assert!(matches!(err, IndepError::BadFamily(_)));
    }
}
