//! Divisor construction for each parameter shape.
//!
//! With `s = g - d + r` and `rho = g - (r+1)s`, a rank-r degree-d class on a
//! chain of g loops is modeled by: the standard rectangular tableau when
//! `rho = 0`; the tableau on `(r+1)s` loops with `rho` extra lingering loops
//! spliced in at prescribed slots when the pair family can absorb them (the
//! inserted shape); and otherwise an inner plan on a shorter chain extended
//! by trailing lingering loops. Each inserted loop carries one chip at a
//! half-integer multiple of its bottom length, which keeps the class vertex
//! avoiding and gives the window replay nonzero tie coefficients.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use troplin_chain::{tableau_to_divisor, ChainParams, DivisorData, Tableau};
use troplin_core::rat::qi;
use troplin_core::Q;

use crate::error::{MrcError, MrcResult};
use crate::pairs::{excluded_count, excluded_region, PairSet, Region};
use crate::window::window;

/// Validates `(g, r, d)` and returns `(s, rho)`.
pub fn classify(genus: i64, r: i64, d: i64) -> MrcResult<(i64, i64)> {
    if genus < 1 || r < 1 || d < 1 {
        return Err(MrcError::BadParameters(format!(
            "need positive parameters, got g={genus}, r={r}, d={d}"
        )));
    }
    let s = genus - d + r;
    if s < 1 {
        return Err(MrcError::BadParameters(format!(
            "degree {d} is nonspecial for genus {genus} and rank {r}: need d < g + r"
        )));
    }
    let rho = genus - (r + 1) * s;
    if rho < 0 {
        return Err(MrcError::NegativeRho { genus, r, d, rho });
    }
    Ok((s, rho))
}

/// Bound on the integer coefficients the window replay may assemble in a
/// candidate relation among the bottom lengths `m_k`, after denominators
/// are cleared. Deliberately generous.
pub fn relation_cap(genus: i64, r: i64) -> i64 {
    16 * (genus + 2) * (genus + r + 2)
}

/// A chain whose bottom lengths are powers of a base exceeding twice
/// [`relation_cap`]: a vanishing combination `c_1 m_1 + ... + c_g m_g` with
/// `|c_k| <= cap` would be a signed base-B expansion of zero with digits
/// below B/2, so all its digits vanish. The loop and bridge lengths keep the
/// scale separation `4g*m_k < ell_k < n_j / (2*mbar)`.
pub fn admissible_chain_for(genus: usize, r: i64, mbar: usize) -> MrcResult<ChainParams> {
    if genus == 0 || mbar == 0 {
        return Err(MrcError::BadParameters(
            "genus and multiset size must be at least 1".into(),
        ));
    }
    let cap = relation_cap(genus as i64, r);
    let base = BigInt::from(2 * cap + 3);
    let mut m = Vec::with_capacity(genus);
    let mut power = BigInt::one();
    for _ in 1..=genus {
        m.push(Q::from_integer(power.clone()));
        power *= &base;
    }
    let ell_len = Q::from_integer(BigInt::from(4 * genus) * &power + 1);
    let n_len = qi(2 * mbar as i64 + 1) * &ell_len;
    let ell = vec![ell_len; genus];
    let n = vec![n_len; genus + 1];
    Ok(ChainParams::new(genus, ell, m, n, mbar, true)?)
}

/// One extra lingering loop spliced into the chain for a new pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertedLoop {
    pub pair: (i64, i64),
    pub region: Region,
    /// Loop index on the full chain.
    pub position: i64,
}

/// Where the original loops and the new loops ended up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InsertedLayout {
    /// New loops in chain order.
    pub placed: Vec<InsertedLoop>,
    /// `orig_position[t]` = full-chain index of original loop `t`; the 0
    /// entry anchors the left end.
    pub orig_position: Vec<i64>,
}

impl InsertedLayout {
    /// New loops in `region` holding a pair on diagonal `c`, in chain order.
    pub fn block(&self, region: Region, c: i64) -> Vec<&InsertedLoop> {
        self.placed
            .iter()
            .filter(|p| p.region == region && p.pair.0 + p.pair.1 == c)
            .collect()
    }

    pub fn count_in(&self, region: Region) -> i64 {
        self.placed.iter().filter(|p| p.region == region).count() as i64
    }
}

#[derive(Debug, Clone)]
pub enum PlanKind {
    /// `rho = 0`, `r <= 2s`: the full pair family.
    Injective,
    /// `rho = 0`, `r > 2s`: the carved family of `2d - g + 1` pairs.
    Surjective,
    /// `rho > 0` absorbed by new pairs and new loops.
    Inserted(InsertedLayout),
    /// `rho > 0` too large for the triangle: an inner plan plus `eta`
    /// trailing lingering loops.
    Extended { eta: i64, inner: Box<BuildPlan> },
}

/// A divisor, a pair family, and the layout notes the replay needs.
#[derive(Debug, Clone)]
pub struct BuildPlan {
    pub genus: i64,
    pub r: i64,
    pub d: i64,
    pub s: i64,
    pub rho: i64,
    pub params: ChainParams,
    pub data: DivisorData,
    pub family: PairSet,
    pub new_pairs: Vec<(i64, i64)>,
    pub kind: PlanKind,
}

/// Builds the divisor and family for `(g, r, d)` on a fresh chain from
/// [`admissible_chain_for`].
pub fn plan(genus: i64, r: i64, d: i64) -> MrcResult<BuildPlan> {
    let params = admissible_chain_for(genus as usize, r, 2)?;
    plan_on(params, genus, r, d)
}

/// Builds the plan on a given chain (used for the inner plan of an extended
/// shape, where the chain is a prefix of the outer one).
pub fn plan_on(params: ChainParams, genus: i64, r: i64, d: i64) -> MrcResult<BuildPlan> {
    let (s, rho) = classify(genus, r, d)?;
    if params.genus as i64 != genus {
        return Err(MrcError::BadParameters(format!(
            "chain has genus {}, plan needs {genus}",
            params.genus
        )));
    }
    let plan = if rho == 0 {
        let tab = Tableau::standard_rect(r as usize, s as usize)?;
        let data = tableau_to_divisor(&params, &tab, d)?;
        let (family, kind) = if r <= 2 * s {
            (PairSet::full(r, s), PlanKind::Injective)
        } else {
            (PairSet::surjective(r, s), PlanKind::Surjective)
        };
        BuildPlan { genus, r, d, s, rho, params, data, family, new_pairs: Vec::new(), kind }
    } else if excluded_count(r, s) >= rho {
        build_inserted(params, genus, r, d, s, rho)?
    } else {
        build_extended(params, genus, r, d, s, rho)?
    };
    check_plan(&plan)?;
    Ok(plan)
}

fn half() -> Q {
    Q::new(BigInt::one(), BigInt::from(2))
}

fn build_inserted(
    params: ChainParams,
    genus: i64,
    r: i64,
    d: i64,
    s: i64,
    rho: i64,
) -> MrcResult<BuildPlan> {
    let (family, new_pairs) = PairSet::extended(r, s, rho as usize)?;
    let gprime = (r + 1) * s;
    let rhalf = (r + 1) / 2;

    // slot t = insert right after original loop t (slot 0 = left end)
    let mut slots: Vec<Vec<(i64, i64, Region)>> = vec![Vec::new(); gprime as usize + 1];
    for &(i, j) in &new_pairs {
        let region = excluded_region(r, s, i, j).ok_or_else(|| {
            MrcError::Invariant(format!("new pair ({i},{j}) is not an excluded pair"))
        })?;
        let slot = match region {
            Region::Lower => 0,
            Region::Upper => gprime,
            Region::Chevron => {
                let ell = i + j - rhalf;
                let w = window(r, s, ell).ok_or_else(|| {
                    MrcError::Invariant(format!("chevron pair ({i},{j}) has no window"))
                })?;
                w.b
            }
        };
        slots[slot as usize].push((i, j, region));
    }

    // walk the chain: original loops follow the tableau step rule, new loops
    // linger with one chip at a half-integer multiple of the bottom length
    let mut p: Vec<i64> = (0..r).map(|i| r - i).collect();
    let pc = |p: &Vec<i64>, a: i64| if a < r { p[a as usize] } else { 0 };
    let mut x: Vec<Q> = Vec::with_capacity(genus as usize);
    let mut placed = Vec::new();
    let mut orig_position = vec![0i64];
    let mut pos = 0i64;

    let place = |slot: &[(i64, i64, Region)],
                     p: &Vec<i64>,
                     pos: &mut i64,
                     x: &mut Vec<Q>,
                     placed: &mut Vec<InsertedLoop>|
     -> MrcResult<()> {
        for &(i, j, region) in slot {
            *pos += 1;
            let kappa = match region {
                Region::Lower | Region::Upper => {
                    let even = (i + j) % 2 == 0;
                    qi(pc(p, i) + pc(p, j) + i64::from(even)) * half()
                }
                Region::Chevron => {
                    let ell = i + j - rhalf;
                    qi(pc(p, ell)) - half()
                }
            };
            if kappa < qi(3) * half() {
                return Err(MrcError::BadBuild(format!(
                    "new loop for ({i},{j}) would sit at {kappa} bottom lengths"
                )));
            }
            x.push(kappa * params.em(*pos as usize));
            placed.push(InsertedLoop { pair: (i, j), region, position: *pos });
        }
        Ok(())
    };

    place(&slots[0], &p, &mut pos, &mut x, &mut placed)?;
    for t in 1..=gprime {
        pos += 1;
        let col = (t - 1) / s;
        if col == r {
            x.push(Q::from_integer(BigInt::from(0)));
            p.iter_mut().for_each(|y| *y -= 1);
        } else {
            x.push(qi(p[col as usize] + 1) * params.em(pos as usize));
            p[col as usize] += 1;
        }
        orig_position.push(pos);
        place(&slots[t as usize], &p, &mut pos, &mut x, &mut placed)?;
    }
    if pos != genus {
        return Err(MrcError::Invariant(format!(
            "layout placed {pos} loops on a chain of genus {genus}"
        )));
    }

    let data = DivisorData { d0: r, x };
    let layout = InsertedLayout { placed, orig_position };
    Ok(BuildPlan {
        genus,
        r,
        d,
        s,
        rho,
        params,
        data,
        family,
        new_pairs,
        kind: PlanKind::Inserted(layout),
    })
}

fn build_extended(
    params: ChainParams,
    genus: i64,
    r: i64,
    d: i64,
    s: i64,
    rho: i64,
) -> MrcResult<BuildPlan> {
    let eta = rho - excluded_count(r, s).max(0);
    let inner_genus = genus - eta;
    if eta < 1 || inner_genus < 1 {
        return Err(MrcError::Invariant(format!(
            "extended shape with eta={eta} for g={genus}, r={r}, d={d}"
        )));
    }
    let inner_params = ChainParams::new(
        inner_genus as usize,
        params.ell[..inner_genus as usize].to_vec(),
        params.m[..inner_genus as usize].to_vec(),
        params.n[..=inner_genus as usize].to_vec(),
        params.mbar,
        true,
    )?;
    let inner = plan_on(inner_params, inner_genus, r, d - eta)?;

    let mut x = inner.data.x.clone();
    for pos in inner_genus + 1..=genus {
        x.push(qi(3) * half() * params.em(pos as usize));
    }
    let data = DivisorData { d0: r, x };
    let family = PairSet::full(r, s);
    if inner.family.len() != family.len() {
        return Err(MrcError::Invariant(
            "extended shape expects the inner plan to use the full family".into(),
        ));
    }
    Ok(BuildPlan {
        genus,
        r,
        d,
        s,
        rho,
        params,
        data,
        family,
        new_pairs: Vec::new(),
        kind: PlanKind::Extended { eta, inner: Box::new(inner) },
    })
}

/// Path-level sanity for a finished plan: right degree, right number of
/// lingering steps, chamber never left.
fn check_plan(plan: &BuildPlan) -> MrcResult<()> {
    if plan.data.degree() != plan.d {
        return Err(MrcError::BadBuild(format!(
            "built degree {} instead of {}",
            plan.data.degree(),
            plan.d
        )));
    }
    let path = plan.params.lingering_path(&plan.data, plan.r as usize)?;
    if !path.stays_in_chamber() {
        return Err(MrcError::BadBuild("lattice path leaves the chamber".into()));
    }
    if path.lingering_count() as i64 != plan.rho {
        return Err(MrcError::BadBuild(format!(
            "path lingers {} times, expected rho = {}",
            path.lingering_count(),
            plan.rho
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_inserted_layout() {
        // g=5, r=3, d=7: s=1, rho=1; the one excluded pair (0,3) comes back
        // as a lingering loop right after original loop b(1) = 1.
        let plan = plan(5, 3, 7).unwrap();
        assert_eq!((plan.s, plan.rho), (1, 1));
        assert_eq!(plan.new_pairs, vec![(0, 3)]);
        assert_eq!(plan.family.len(), 10);
        let PlanKind::Inserted(layout) = &plan.kind else {
            panic!("expected the inserted shape");
        };
        assert_eq!(layout.placed.len(), 1);
        assert_eq!(layout.placed[0].position, 2);
        assert_eq!(layout.placed[0].region, Region::Chevron);
        assert_eq!(layout.orig_position, vec![0, 1, 3, 4, 5]);
        // chip at (p(1) - 1/2) m = 3/2 m on the new loop
        assert_eq!(plan.data.x[1], qi(3) * half() * plan.params.em(2));
        let path = plan.params.lingering_path(&plan.data, 3).unwrap();
        assert_eq!(path.points[2], vec![4, 2, 1]);
        assert_eq!(path.points[5], vec![3, 2, 1]);
    }

    #[test]
    fn toy_extended_layout() {
        // g=9, r=3, d=11: rho=5, one excluded pair, so eta=4 trailing loops
        // around an inner (5,3,7) inserted plan.
        let plan = plan(9, 3, 11).unwrap();
        assert_eq!((plan.s, plan.rho), (1, 5));
        let PlanKind::Extended { eta, inner } = &plan.kind else {
            panic!("expected the extended shape");
        };
        assert_eq!(*eta, 4);
        assert_eq!(inner.genus, 5);
        assert_eq!(inner.d, 7);
        assert!(matches!(inner.kind, PlanKind::Inserted(_)));
        // trailing loops linger with chips at 3/2 m
        for pos in 6..=9 {
            assert_eq!(plan.data.x[pos - 1], qi(3) * half() * plan.params.em(pos));
        }
        let path = plan.params.lingering_path(&plan.data, 3).unwrap();
        assert_eq!(path.lingering_count(), 5);
        // inner chain shares the outer bottom lengths
        assert_eq!(inner.params.m[..], plan.params.m[..5]);
    }

    #[test]
    fn rho_zero_plans() {
        let inj = plan(10, 4, 12).unwrap();
        assert!(matches!(inj.kind, PlanKind::Injective));
        assert_eq!(inj.family.len(), 15);

        let sur = plan(4, 3, 6).unwrap();
        assert!(matches!(sur.kind, PlanKind::Surjective));
        assert_eq!(sur.family.len(), 9);
    }

    #[test]
    fn classify_rejects_bad_shapes() {
        assert!(classify(10, 4, 14).is_err()); // s = 0
        assert!(classify(10, 4, 11).is_err()); // rho < 0
        assert!(classify(0, 3, 5).is_err());
    }

    #[test]
    fn wide_chain_is_valid() {
        let params = admissible_chain_for(6, 3, 2).unwrap();
        assert_eq!(params.genus, 6);
        let cap = relation_cap(6, 3);
        assert_eq!(*params.em(2), qi(2 * cap + 3));
    }
}
