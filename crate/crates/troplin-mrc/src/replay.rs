//! Window replay: rules out a stalled excess level across a run of loops.
//!
//! The scenario under test is a dependence among the pair functions whose
//! divisor places exactly two chips on every region of the window, so the
//! excess stays at `level` from one end to the other. In that scenario the
//! minimum is attained twice at the chip of `D` on each window loop and at a
//! reference vertex, and only the permissible pairs of [`PrefixTable`] can
//! attain it there. Each forced tie is a linear equation between two offset
//! constants whose right side is an explicit difference of pair function
//! values. Walking any cycle in the tie graph telescopes the constants away
//! and leaves a vanishing combination of bottom lengths with small
//! coefficients, which the chain is built not to have. The replay therefore
//! either finds a chip point with at most one permissible pair (no tie can
//! form at all) or checks that every candidate tie system forces such a
//! combination: the counting pigeonhole guarantees a cycle through each tie
//! point at most once, every tie value is supported between its loop and the
//! reference, and the chip coefficients are pairwise distinct at every loop,
//! so the digit at the cycle's extreme loop survives whichever ties the
//! dependence actually realizes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use troplin_chain::{ChainModel, ChainParams, DivisorData};
use troplin_core::{GraphPoint, PLFunction, Q};

use crate::error::{MrcError, MrcResult};
use crate::pairs::PairSet;
use crate::prefix::PrefixTable;

/// Everything a window replay reads. The caller owns the heavy pieces.
pub struct ReplayCtx<'a> {
    pub model: &'a ChainModel,
    pub params: &'a ChainParams,
    pub data: &'a DivisorData,
    pub table: &'a PrefixTable,
    pub family: &'a PairSet,
    /// Witness functions indexed 0..=r.
    pub psis: &'a [PLFunction],
    /// The bottom lengths are powers of this base.
    pub base: i64,
    /// Bound the extracted digits must respect so that cycle sums stay
    /// below the relation-free threshold of the chain.
    pub digit_cap: i64,
}

/// Permissible pairs at one chip point, with twice the local coefficient of
/// each pair value at that chip (in units of the loop's bottom length).
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct LoopTies {
    pub looppos: i64,
    pub pairs: Vec<(i64, i64)>,
    pub twice_locals: Vec<i64>,
}

/// A stall ruled out across a window of loops.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WindowReport {
    /// First and last loop of the stalled stretch.
    pub start: i64,
    pub end: i64,
    pub level: i64,
    /// Loop whose left vertex anchors the tie equations.
    pub ref_loop: i64,
    pub loops: Vec<LoopTies>,
    /// Set when some chip admits at most one permissible pair, which already
    /// contradicts attainment twice.
    pub decisive: Option<i64>,
    /// Otherwise one forced vanishing combination of bottom lengths, as
    /// `(loop, twice the coefficient)`, nonzero entries only.
    pub exhibit: Vec<(i64, i64)>,
}

/// A stall ruled out at a single bridge: at most one family pair can run at
/// the slope the stalled scenario forces there, so the minimum cannot be
/// attained twice along the bridge.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SlopeGapReport {
    pub bridge: i64,
    pub level: i64,
    pub slope: i64,
    pub matching: Vec<(i64, i64)>,
}

/// Twice-integer digits of `value` over the bottom lengths: `2 * value =
/// sum of out[k] * base^k`. Errors if the value has a denominator beyond 2,
/// reaches outside the bottom-length scale, or needs a digit over the cap.
fn m_digits(value: &Q, base: i64, genus: usize, digit_cap: i64) -> MrcResult<Vec<i64>> {
    let scaled = value * Q::from_integer(BigInt::from(2));
    if !scaled.is_integer() {
        return Err(MrcError::ReplayFailed(format!(
            "tie value {value} has a denominator beyond 2"
        )));
    }
    let mut v = scaled.to_integer();
    let b = BigInt::from(base);
    let halfb = &b / 2;
    let mut out = Vec::with_capacity(genus);
    for _ in 0..genus {
        let mut digit = v.mod_floor(&b);
        if digit > halfb {
            digit -= &b;
        }
        v = (&v - &digit) / &b;
        let d = digit.to_i64().expect("digit below base");
        if d.abs() > digit_cap {
            return Err(MrcError::ReplayFailed(format!(
                "tie digit {d} exceeds the cap {digit_cap}"
            )));
        }
        out.push(d);
    }
    if !v.is_zero() {
        return Err(MrcError::ReplayFailed(format!(
            "tie value {value} reaches outside the bottom lengths"
        )));
    }
    Ok(out)
}

impl<'a> ReplayCtx<'a> {
    fn pair_value(&self, pair: (i64, i64), pt: &GraphPoint) -> Q {
        self.psis[pair.0 as usize].eval(pt) + self.psis[pair.1 as usize].eval(pt)
    }

    fn chip_point(&self, t: i64) -> MrcResult<GraphPoint> {
        Ok(self.model.loop_point(t as usize, &self.data.x[t as usize - 1])?)
    }

    fn left_vertex(&self, t: i64) -> MrcResult<GraphPoint> {
        Ok(self.model.loop_point(t as usize, &Q::zero())?)
    }
}

/// Replays the stall at `level` over loops `start..=end`.
pub fn replay_window(ctx: &ReplayCtx, start: i64, end: i64, level: i64) -> MrcResult<WindowReport> {
    if start < 1 || end > ctx.table.genus() || start > end {
        return Err(MrcError::BadParameters(format!(
            "window {start}..={end} outside the chain"
        )));
    }
    if level < 2 {
        return Err(MrcError::BadParameters(format!(
            "stalls below level 2 are already impossible, got {level}"
        )));
    }
    for t in start..=end {
        if !ctx.table.loop_occupied(t) {
            return Err(MrcError::ReplayFailed(format!(
                "window loop {t} carries no chip of the divisor"
            )));
        }
    }

    let perms: Vec<Vec<(i64, i64)>> = (start..=end)
        .map(|t| ctx.table.permissible_set(ctx.family, t, level))
        .collect();

    // a chip with at most one permissible pair cannot see a tie at all
    let decisive = (start..=end).find(|&t| perms[(t - start) as usize].len() <= 1);

    // pigeonhole: one tie per chip plus one at the reference vertex
    let mut vertices: Vec<(i64, i64)> = perms.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    if decisive.is_none() && (end - start + 2) < vertices.len() as i64 {
        return Err(MrcError::ReplayFailed(format!(
            "window {start}..={end} has {} candidate pairs but only {} tie points",
            vertices.len(),
            end - start + 2
        )));
    }

    // reference vertex: where the square pair first becomes permissible, so
    // its own crossings stay inside the walked stretch
    let ref_loop = (start..=end)
        .find(|&t| perms[(t - start) as usize].iter().any(|p| p.0 == p.1))
        .unwrap_or(start);
    let ref_pt = ctx.left_vertex(ref_loop)?;

    let mut loops = Vec::new();
    let mut digit_vecs: BTreeMap<(i64, (i64, i64)), Vec<i64>> = BTreeMap::new();
    if decisive.is_none() {
        for t in start..=end {
            let pairs = &perms[(t - start) as usize];
            let chip = ctx.chip_point(t)?;
            // values relative to the loop's first pair: a lone pair value
            // picks up bridge lengths on the way from the reference vertex,
            // but differences of permissible pairs cross those bridges at
            // equal slope, and only the shared baseline drops out of every
            // tie difference below
            let base_val =
                ctx.pair_value(pairs[0], &chip) - ctx.pair_value(pairs[0], &ref_pt);
            let mut twice_locals = Vec::with_capacity(pairs.len());
            for &pair in pairs {
                let val = ctx.pair_value(pair, &chip) - ctx.pair_value(pair, &ref_pt)
                    - base_val.clone();
                let digits = m_digits(&val, ctx.base, ctx.table.genus() as usize, ctx.digit_cap)?;
                // the telescoping argument needs each tie value supported
                // between its own loop and the reference
                for (k, &dk) in digits.iter().enumerate() {
                    let pos = k as i64 + 1;
                    if dk != 0 && (pos < ref_loop.min(t) || pos > ref_loop.max(t)) {
                        return Err(MrcError::ReplayFailed(format!(
                            "tie value for ({}, {}) at loop {t} spills to loop {pos}",
                            pair.0, pair.1
                        )));
                    }
                }
                twice_locals.push(digits[t as usize - 1]);
                digit_vecs.insert((t, pair), digits);
            }
            let mut seen = twice_locals.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != twice_locals.len() {
                return Err(MrcError::ReplayFailed(format!(
                    "tie coefficients collide at the chip of loop {t}"
                )));
            }
            loops.push(LoopTies { looppos: t, pairs: pairs.clone(), twice_locals });
        }
    } else {
        for t in start..=end {
            loops.push(LoopTies {
                looppos: t,
                pairs: perms[(t - start) as usize].clone(),
                twice_locals: Vec::new(),
            });
        }
    }

    let exhibit = if decisive.is_some() {
        Vec::new()
    } else {
        force_relation(ctx, ref_loop, &perms, start, &digit_vecs)?
    };

    Ok(WindowReport { start, end, level, ref_loop, loops, decisive, exhibit })
}

/// Builds the lex-first tie assignment, finds the cycle the pigeonhole
/// promises, and returns the vanishing combination it forces. A tie at `pt`
/// between `f` and `g` fixes the difference of their offset constants to
/// `value(g, pt) - value(f, pt)`, so summing those differences around a
/// cycle must give zero; the returned digits show it cannot.
fn force_relation(
    ctx: &ReplayCtx,
    ref_loop: i64,
    perms: &[Vec<(i64, i64)>],
    start: i64,
    digit_vecs: &BTreeMap<(i64, (i64, i64)), Vec<i64>>,
) -> MrcResult<Vec<(i64, i64)>> {
    type Pair = (i64, i64);
    let genus = ctx.table.genus() as usize;
    // one edge per tie point; point 0 stands for the reference vertex,
    // where both normalized values vanish
    let mut edges: Vec<(i64, Pair, Pair)> = Vec::new();
    let ref_pairs = &perms[(ref_loop - start) as usize];
    edges.push((0, ref_pairs[0], ref_pairs[1]));
    for (off, pairs) in perms.iter().enumerate() {
        edges.push((start + off as i64, pairs[0], pairs[1]));
    }

    let mut root: BTreeMap<Pair, Pair> = BTreeMap::new();
    fn find(root: &BTreeMap<Pair, Pair>, mut v: Pair) -> Pair {
        while root[&v] != v {
            v = root[&v];
        }
        v
    }
    let mut inserted: Vec<(i64, Pair, Pair)> = Vec::new();
    for &(point, a, b) in &edges {
        root.entry(a).or_insert(a);
        root.entry(b).or_insert(b);
        let ra = find(&root, a);
        let rb = find(&root, b);
        if ra != rb {
            root.insert(ra, rb);
            inserted.push((point, a, b));
            continue;
        }
        // closing edge: recover the a-to-b path through the forest so far
        let mut prev: BTreeMap<Pair, (Pair, i64)> = BTreeMap::new();
        let mut queue = vec![a];
        prev.insert(a, (a, -1));
        while let Some(v) = queue.pop() {
            for &(pt, x, y) in &inserted {
                for (u, w) in [(x, y), (y, x)] {
                    if u == v && !prev.contains_key(&w) {
                        prev.insert(w, (v, pt));
                        queue.push(w);
                    }
                }
            }
        }
        let mut total = vec![0i64; genus];
        let mut add = |pt: i64, f: Pair, g: Pair, sign: i64| {
            if pt == 0 {
                return;
            }
            let vf = &digit_vecs[&(pt, f)];
            let vg = &digit_vecs[&(pt, g)];
            for k in 0..genus {
                total[k] += sign * (vg[k] - vf[k]);
            }
        };
        // walk b back to a, orienting each hop forward
        let mut v = b;
        while v != a {
            let (u, pt) = prev[&v];
            add(pt, u, v, 1);
            v = u;
        }
        // close the cycle from b back to a through the new edge
        add(point, b, a, 1);

        if total.iter().all(|&c| c == 0) {
            return Err(MrcError::ReplayFailed(
                "forced cycle telescopes to the zero combination".into(),
            ));
        }
        if let Some(first) = total.iter().find(|&&c| c != 0) {
            if *first < 0 {
                total.iter_mut().for_each(|c| *c = -*c);
            }
        }
        return Ok(total
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (k as i64 + 1, c))
            .collect());
    }
    Err(MrcError::ReplayFailed(
        "tie assignment produced no cycle despite the counting bound".into(),
    ))
}

/// Replays the stall at `level` pinched to the single bridge `bridge`: the
/// excess equal to `level` there forces the minimum to leave the bridge at a
/// known slope on a segment, so at least two family pairs must match it.
pub fn slope_gap(ctx: &ReplayCtx, bridge: i64, level: i64) -> MrcResult<SlopeGapReport> {
    if bridge < 0 || bridge > ctx.table.genus() {
        return Err(MrcError::BadParameters(format!(
            "bridge {bridge} outside the chain"
        )));
    }
    let slope = ctx.table.stalled_slope(bridge, level);
    let matching: Vec<(i64, i64)> = ctx
        .family
        .pairs()
        .iter()
        .copied()
        .filter(|&(i, j)| ctx.table.bridge_slope(bridge, i, j) == slope)
        .collect();
    if matching.len() > 1 {
        return Err(MrcError::ReplayFailed(format!(
            "{} pairs run at slope {slope} across bridge {bridge}, need at most one",
            matching.len()
        )));
    }
    Ok(SlopeGapReport { bridge, level, slope, matching })
}
