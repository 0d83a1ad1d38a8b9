//! Rank certificates for the quadric pairing on a chain of loops.
//!
//! For a vertex-avoiding class of rank r and degree d on a genus-g chain,
//! products of pairs of the canonical generators span a space whose
//! dimension the pairing cannot exceed: `(r+1)(r+2)/2` monomials against
//! `2d - g + 1` on the codomain side. The certificate shows the pair family
//! of the smaller size is tropically independent, which pins the rank of
//! the pairing to its maximum.
//!
//! The engine realizes the class on a relation-free chain and reasons about
//! the excess `e(p)`: the degree a hypothetical dependence divisor carries
//! on the first p regions beyond two per region. Two chips per region make
//! `e` nondecreasing and at least 2. A ledger then chains claims in two
//! directions: rising steps push the excess up left to right, falling steps
//! cap it from the right end, and the two checkpoints meet in an impossible
//! order. Every step is discharged by [`replay_window`] or [`slope_gap`];
//! nothing is taken from the shape of the family except which loops and
//! levels to test.

use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use troplin_chain::{ChainModel, ChainParams};
use troplin_core::{PLFunction, Q};

use crate::build::{plan, BuildPlan, InsertedLayout, PlanKind};
use crate::error::{MrcError, MrcResult};
use crate::pairs::{epsilon, pair_total, Region};
use crate::prefix::PrefixTable;
use crate::replay::{replay_window, slope_gap, ReplayCtx, SlopeGapReport, WindowReport};
use crate::window::{level, window};

/// Which side of the pairing the independent family saturates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Injective,
    Surjective,
    Bijective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeTag {
    Injective,
    Surjective,
    Inserted,
}

/// One discharged claim in the ledger.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LedgerStep {
    Window(WindowReport),
    Gap(SlopeGapReport),
}

impl LedgerStep {
    fn level(&self) -> i64 {
        match self {
            LedgerStep::Window(w) => w.level,
            LedgerStep::Gap(g) => g.level,
        }
    }

    /// Positions `(x, y)` over which the stall was ruled out.
    fn span(&self) -> (i64, i64) {
        match self {
            LedgerStep::Window(w) => (w.start - 1, w.end),
            LedgerStep::Gap(g) => (g.bridge, g.bridge),
        }
    }
}

/// The two claim chains and their meeting point. Rising steps establish
/// `e(left_position) >= left_excess`; falling steps establish
/// `e(right_position) <= right_excess`; with `left_position <=
/// right_position` and `left_excess > right_excess` a nondecreasing excess
/// is impossible, so no dependence divisor exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessLedger {
    pub rising: Vec<LedgerStep>,
    pub falling: Vec<LedgerStep>,
    pub left_position: i64,
    pub left_excess: i64,
    pub right_position: i64,
    pub right_excess: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BranchCert {
    Ledger {
        shape: ShapeTag,
        new_pairs: Vec<(i64, i64)>,
        ledger: ExcessLedger,
    },
    /// An inner certificate on the chain prefix, extended by `eta` trailing
    /// lingering loops; restriction to the prefix preserves independence.
    Extended { eta: i64, inner: Box<MrcCertificate> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MrcCertificate {
    pub genus: i64,
    pub r: i64,
    pub d: i64,
    pub s: i64,
    pub rho: i64,
    /// dim of the quadratic monomial space, (r+1)(r+2)/2
    pub sym_dim: i64,
    /// dim of the degree-2d side, 2d - g + 1
    pub quad_dim: i64,
    pub family_size: i64,
    pub verdict: Verdict,
    pub branch: BranchCert,
}

/// What a ledger step claims, before it is discharged.
enum StepSpec {
    Window { start: i64, end: i64, level: i64 },
    Gap { bridge: i64, level: i64 },
}

fn discharge(ctx: &ReplayCtx, spec: &StepSpec) -> MrcResult<LedgerStep> {
    Ok(match *spec {
        StepSpec::Window { start, end, level } => {
            LedgerStep::Window(replay_window(ctx, start, end, level)?)
        }
        StepSpec::Gap { bridge, level } => LedgerStep::Gap(slope_gap(ctx, bridge, level)?),
    })
}

/// Discharges a chain of claims, checking each step picks up exactly where
/// the previous one concluded.
fn run_chain(
    ctx: &ReplayCtx,
    specs: &[StepSpec],
    rising: bool,
    start_pos: i64,
    start_level: i64,
) -> MrcResult<(Vec<LedgerStep>, i64, i64)> {
    let mut pos = start_pos;
    let mut lvl = start_level;
    let mut steps = Vec::with_capacity(specs.len());
    for spec in specs {
        let step = discharge(ctx, spec)?;
        let (x, y) = step.span();
        if step.level() != lvl {
            return Err(MrcError::Invariant(format!(
                "ledger step at level {} where {} was due",
                step.level(),
                lvl
            )));
        }
        if rising {
            if x < pos {
                return Err(MrcError::Invariant(format!(
                    "rising step spans [{x}, {y}] behind position {pos}"
                )));
            }
            pos = y;
            lvl += 1;
        } else {
            if y > pos {
                return Err(MrcError::Invariant(format!(
                    "falling step spans [{x}, {y}] past position {pos}"
                )));
            }
            pos = x;
            lvl -= 1;
        }
        steps.push(step);
    }
    Ok((steps, pos, lvl))
}

/// The chain's bottom lengths must be 1, B, B^2, ... for the digit
/// extraction in the replay; returns B.
fn chain_base(params: &ChainParams) -> MrcResult<i64> {
    if !params.em(1).is_one() {
        return Err(MrcError::BadBuild("first bottom length must be 1".into()));
    }
    if params.genus == 1 {
        return Ok(i64::MAX);
    }
    let ratio = params.em(2).clone();
    if !ratio.is_integer() {
        return Err(MrcError::BadBuild("bottom lengths must be integers".into()));
    }
    let base = ratio
        .to_integer()
        .to_i64()
        .ok_or_else(|| MrcError::BadBuild("bottom length base overflows".into()))?;
    let mut power = Q::one();
    for k in 1..=params.genus {
        if params.em(k) != &power {
            return Err(MrcError::BadBuild(format!(
                "bottom length {k} is not a power of the base"
            )));
        }
        power *= &ratio;
    }
    Ok(base)
}

struct PlanCtx {
    model: ChainModel,
    table: PrefixTable,
    psis: Vec<PLFunction>,
    base: i64,
    digit_cap: i64,
}

impl PlanCtx {
    fn new(p: &BuildPlan) -> MrcResult<Self> {
        let model = ChainModel::new(p.params.clone())?;
        if !model.is_vertex_avoiding(&p.data, p.r as usize, p.d)? {
            return Err(MrcError::BadBuild("built class is not vertex avoiding".into()));
        }
        let rank = p.params.rank_exact(&p.data)?;
        if rank as i64 != p.r {
            return Err(MrcError::BadBuild(format!(
                "built class has rank {rank}, expected {}",
                p.r
            )));
        }
        let path = p.params.lingering_path(&p.data, p.r as usize)?;
        let table = PrefixTable::new(&p.data, &path);
        let psis: Vec<PLFunction> = model
            .canonical_basis(&p.data)?
            .into_iter()
            .map(|rep| rep.psi)
            .collect();
        let base = chain_base(&p.params)?;
        let digit_cap = 8 * (p.r + p.s + 2);
        // cycle sums stay below the relation-free threshold: at most g+1
        // tie equations, each with cleared digits up to the cap
        if base != i64::MAX && (p.genus + 1) * digit_cap > (base - 3) / 2 {
            return Err(MrcError::BadBuild(format!(
                "chain base {base} too narrow for digit cap {digit_cap}"
            )));
        }
        Ok(PlanCtx { model, table, psis, base, digit_cap })
    }

    fn replay<'a>(&'a self, p: &'a BuildPlan) -> ReplayCtx<'a> {
        ReplayCtx {
            model: &self.model,
            params: &p.params,
            data: &p.data,
            table: &self.table,
            family: &p.family,
            psis: &self.psis,
            base: self.base,
            digit_cap: self.digit_cap,
        }
    }
}

/// Rising specs for the plain rectangular shapes; `layout` shifts loop
/// indices and splices in the new-pair blocks for the inserted shape.
fn rising_specs(
    r: i64,
    s: i64,
    layout: Option<&InsertedLayout>,
) -> MrcResult<Vec<StepSpec>> {
    let eps = epsilon(r);
    let rhalf = (r + 1) / 2;
    let mut specs = Vec::new();

    if r > 2 * s {
        // left stack: levels whose diagonal has a single pair
        for lvl in 2..=(r - 2 * s + eps - 1) {
            match layout {
                None => specs.push(StepSpec::Gap { bridge: 0, level: lvl }),
                Some(lay) => {
                    let block = lay.block(Region::Lower, lvl);
                    if block.is_empty() {
                        let bridge = lay
                            .placed
                            .iter()
                            .filter(|p| {
                                p.region == Region::Lower && p.pair.0 + p.pair.1 <= lvl
                            })
                            .count() as i64;
                        specs.push(StepSpec::Gap { bridge, level: lvl });
                    } else {
                        let start = block[0].position;
                        let end = block[block.len() - 1].position;
                        if end - start + 1 != block.len() as i64 {
                            return Err(MrcError::Invariant(
                                "lower block is not contiguous".into(),
                            ));
                        }
                        specs.push(StepSpec::Window { start, end, level: lvl });
                    }
                }
            }
        }
    }

    // column windows, spliced where the layout placed new loops
    let lo = (rhalf - s).max(0);
    let hi = if r > 2 * s { r / 2 + s } else { r - 1 };
    for ell in lo..=hi {
        let lvl = level(r, s, ell);
        if lvl < 2 {
            continue;
        }
        let w = window(r, s, ell)
            .ok_or_else(|| MrcError::Invariant(format!("no window for column {ell}")))?;
        match layout {
            None => {
                if w.loop_count() == 0 {
                    specs.push(StepSpec::Gap { bridge: w.b, level: lvl });
                } else {
                    specs.push(StepSpec::Window { start: w.a, end: w.b, level: lvl });
                }
            }
            Some(lay) => {
                let c = ell + rhalf;
                let block = lay.block(Region::Chevron, c);
                let anchor = lay.orig_position[w.b as usize];
                if !block.is_empty() {
                    let first = block[0].position;
                    let last = block[block.len() - 1].position;
                    if first != anchor + 1 || last - first + 1 != block.len() as i64 {
                        return Err(MrcError::Invariant(format!(
                            "chevron block for diagonal {c} sits off its column"
                        )));
                    }
                }
                let start = if w.loop_count() > 0 {
                    lay.orig_position[w.a as usize]
                } else {
                    anchor + 1
                };
                let end = anchor + block.len() as i64;
                if w.loop_count() > 0 && anchor - lay.orig_position[w.a as usize] + 1 != w.loop_count()
                {
                    return Err(MrcError::Invariant(format!(
                        "window for column {ell} is interrupted by insertions"
                    )));
                }
                if start > end {
                    specs.push(StepSpec::Gap { bridge: anchor, level: lvl });
                } else {
                    specs.push(StepSpec::Window { start, end, level: lvl });
                }
            }
        }
    }
    Ok(specs)
}

/// Falling specs: mirror claims pulled from the right end.
fn falling_specs(
    genus: i64,
    r: i64,
    s: i64,
    layout: Option<&InsertedLayout>,
) -> MrcResult<Vec<StepSpec>> {
    let mut specs = Vec::new();
    for mu in 2..=(r - 2 * s - 1) {
        let lvl = 2 * (r - s) - mu;
        match layout {
            None => specs.push(StepSpec::Gap { bridge: genus, level: lvl }),
            Some(lay) => {
                let c = 2 * r - mu;
                let block = lay.block(Region::Upper, c);
                if block.is_empty() {
                    let right = lay
                        .placed
                        .iter()
                        .filter(|p| p.region == Region::Upper && p.pair.0 + p.pair.1 > c)
                        .count() as i64;
                    specs.push(StepSpec::Gap { bridge: genus - right, level: lvl });
                } else {
                    let start = block[0].position;
                    let end = block[block.len() - 1].position;
                    if end - start + 1 != block.len() as i64 {
                        return Err(MrcError::Invariant(
                            "upper block is not contiguous".into(),
                        ));
                    }
                    specs.push(StepSpec::Window { start, end, level: lvl });
                }
            }
        }
    }
    Ok(specs)
}

fn certify_ledger(p: &BuildPlan) -> MrcResult<ExcessLedger> {
    let pctx = PlanCtx::new(p)?;
    let ctx = pctx.replay(p);
    let layout = match &p.kind {
        PlanKind::Inserted(lay) => Some(lay),
        _ => None,
    };

    let rising = rising_specs(p.r, p.s, layout)?;
    let falling = falling_specs(p.genus, p.r, p.s, layout)?;

    if let Some(lay) = layout {
        // every new loop must land inside a replayed window
        let in_some_window = |pos: i64| {
            rising.iter().chain(falling.iter()).any(|spec| match *spec {
                StepSpec::Window { start, end, .. } => start <= pos && pos <= end,
                StepSpec::Gap { .. } => false,
            })
        };
        for pl in &lay.placed {
            if !in_some_window(pl.position) {
                return Err(MrcError::Invariant(format!(
                    "new loop at position {} escapes every window",
                    pl.position
                )));
            }
        }
    }

    let (rising, left_position, left_excess) = run_chain(&ctx, &rising, true, 0, 2)?;
    let base_right = 2 * (p.r - p.s) - 2;
    let (falling, right_position, right_excess) =
        run_chain(&ctx, &falling, false, p.genus, base_right)?;

    if left_position > right_position {
        return Err(MrcError::Invariant(format!(
            "ledger checkpoints cross: {left_position} > {right_position}"
        )));
    }
    if left_excess <= right_excess {
        return Err(MrcError::Invariant(format!(
            "ledger concludes nothing: floor {left_excess} under cap {right_excess}"
        )));
    }
    Ok(ExcessLedger {
        rising,
        falling,
        left_position,
        left_excess,
        right_position,
        right_excess,
    })
}

fn verdict_for(family_size: i64, sym_dim: i64, quad_dim: i64) -> MrcResult<Verdict> {
    if family_size == sym_dim && sym_dim == quad_dim {
        Ok(Verdict::Bijective)
    } else if family_size == sym_dim {
        if sym_dim > quad_dim {
            return Err(MrcError::Invariant(
                "full family larger than the codomain side".into(),
            ));
        }
        Ok(Verdict::Injective)
    } else if family_size == quad_dim {
        Ok(Verdict::Surjective)
    } else {
        Err(MrcError::Invariant(format!(
            "family of {family_size} saturates neither {sym_dim} nor {quad_dim}"
        )))
    }
}

fn certify_plan(p: &BuildPlan) -> MrcResult<MrcCertificate> {
    let sym_dim = pair_total(p.r);
    let quad_dim = 2 * p.d - p.genus + 1;
    let family_size = p.family.len() as i64;
    let verdict = verdict_for(family_size, sym_dim, quad_dim)?;

    let branch = match &p.kind {
        PlanKind::Injective => BranchCert::Ledger {
            shape: ShapeTag::Injective,
            new_pairs: Vec::new(),
            ledger: certify_ledger(p)?,
        },
        PlanKind::Surjective => BranchCert::Ledger {
            shape: ShapeTag::Surjective,
            new_pairs: Vec::new(),
            ledger: certify_ledger(p)?,
        },
        PlanKind::Inserted(_) => BranchCert::Ledger {
            shape: ShapeTag::Inserted,
            new_pairs: p.new_pairs.clone(),
            ledger: certify_ledger(p)?,
        },
        PlanKind::Extended { eta, inner } => {
            let inner_cert = certify_plan(inner)?;
            // trailing loops: chip at 3/2 of the bottom length keeps the
            // class vertex avoiding and the path lingering
            let three_halves = Q::new(3.into(), 2.into());
            for pos in inner.genus + 1..=p.genus {
                if p.data.x[pos as usize - 1]
                    != three_halves.clone() * p.params.em(pos as usize)
                {
                    return Err(MrcError::BadBuild(format!(
                        "trailing loop {pos} chip off its half-integer position"
                    )));
                }
            }
            // the outer class must itself be well formed
            PlanCtx::new(p)?;
            BranchCert::Extended { eta: *eta, inner: Box::new(inner_cert) }
        }
    };

    Ok(MrcCertificate {
        genus: p.genus,
        r: p.r,
        d: p.d,
        s: p.s,
        rho: p.rho,
        sym_dim,
        quad_dim,
        family_size,
        verdict,
        branch,
    })
}

/// Certifies that the quadric pairing for a general class of rank `r >= 3`
/// and degree `d` on a genus-`genus` curve has maximal rank, by exhibiting
/// the tropical independence on a chain of loops.
pub fn certify_mrc(genus: i64, r: i64, d: i64) -> MrcResult<MrcCertificate> {
    if r < 3 {
        return Err(MrcError::BadParameters(format!(
            "pair ledgers need rank at least 3, got {r}"
        )));
    }
    let p = plan(genus, r, d)?;
    certify_plan(&p)
}

/// Full re-verification: rebuilds the plan deterministically, replays every
/// ledger step, and checks the result matches the given certificate bit for
/// bit. Also re-asserts the concluding inequalities independently.
pub fn verify_certificate(cert: &MrcCertificate) -> MrcResult<()> {
    check_shape(cert)?;
    let fresh = certify_mrc(cert.genus, cert.r, cert.d)?;
    if &fresh != cert {
        return Err(MrcError::BadCertificate(
            "certificate differs from the deterministic replay".into(),
        ));
    }
    Ok(())
}

fn check_shape(cert: &MrcCertificate) -> MrcResult<()> {
    if cert.sym_dim != pair_total(cert.r) || cert.quad_dim != 2 * cert.d - cert.genus + 1 {
        return Err(MrcError::BadCertificate("dimension counts off".into()));
    }
    match &cert.branch {
        BranchCert::Ledger { ledger, .. } => {
            if ledger.left_position > ledger.right_position
                || ledger.left_excess <= ledger.right_excess
            {
                return Err(MrcError::BadCertificate(
                    "ledger checkpoints do not contradict".into(),
                ));
            }
            Ok(())
        }
        BranchCert::Extended { eta, inner } => {
            if inner.genus + eta != cert.genus || inner.d + eta != cert.d {
                return Err(MrcError::BadCertificate(
                    "inner certificate does not line up with the extension".into(),
                ));
            }
            check_shape(inner)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_ten_certificate() {
        let cert = certify_mrc(10, 4, 12).unwrap();
        // 15 monomials against 2*12 - 10 + 1 = 15 on the other side
        assert_eq!(cert.verdict, Verdict::Bijective);
        let BranchCert::Ledger { shape, ledger, .. } = &cert.branch else {
            panic!("expected a ledger");
        };
        assert_eq!(*shape, ShapeTag::Injective);
        // two windows: columns 2 and 3 at levels 2 and 3
        assert_eq!(ledger.rising.len(), 2);
        let LedgerStep::Window(w) = &ledger.rising[0] else {
            panic!("expected a window step");
        };
        assert_eq!((w.start, w.end, w.level), (5, 6, 2));
        assert_eq!(
            w.loops[0].pairs,
            vec![(0, 4), (1, 3), (2, 2)]
        );
        let LedgerStep::Window(w) = &ledger.rising[1] else {
            panic!("expected a window step");
        };
        assert_eq!((w.start, w.end, w.level), (8, 8, 3));
        assert_eq!(w.loops[0].pairs, vec![(1, 4), (3, 3)]);
        assert_eq!((ledger.left_position, ledger.left_excess), (8, 4));
        assert!(ledger.falling.is_empty());
        verify_certificate(&cert).unwrap();
    }

    #[test]
    fn surjective_certificate() {
        let cert = certify_mrc(4, 3, 6).unwrap();
        assert_eq!(cert.verdict, Verdict::Surjective);
        assert_eq!(cert.family_size, 9);
        verify_certificate(&cert).unwrap();
    }

    #[test]
    fn inserted_certificate() {
        let cert = certify_mrc(5, 3, 7).unwrap();
        assert_eq!(cert.verdict, Verdict::Bijective);
        let BranchCert::Ledger { shape, new_pairs, .. } = &cert.branch else {
            panic!("expected a ledger");
        };
        assert_eq!(*shape, ShapeTag::Inserted);
        assert_eq!(new_pairs, &vec![(0, 3)]);
        verify_certificate(&cert).unwrap();
    }

    #[test]
    fn extended_certificate() {
        let cert = certify_mrc(9, 3, 11).unwrap();
        assert_eq!(cert.verdict, Verdict::Injective);
        let BranchCert::Extended { eta, inner } = &cert.branch else {
            panic!("expected an extension");
        };
        assert_eq!(*eta, 4);
        assert_eq!(inner.genus, 5);
        assert_eq!(inner.verdict, Verdict::Bijective);
        verify_certificate(&cert).unwrap();
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut cert = certify_mrc(4, 3, 6).unwrap();
        cert.quad_dim += 1;
        assert!(verify_certificate(&cert).is_err());
    }
}
