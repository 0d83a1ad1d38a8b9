//! Base-point reduced divisors by exact chip-firing.
//!
//! `reduce` computes, for any divisor D and base point q, the unique
//! representative of the class of D that is effective away from q and admits
//! no legal firing of a closed set avoiding q, together with the witness
//! function. Debt is first pulled to q with distance floods; the effective
//! configuration is then settled with burning rounds that fire the maximal
//! unburnt set, moving chips by exact rational distances between feature
//! points. Every step is expressed as a piecewise linear function, so the
//! returned pair always satisfies `D' = D + div(psi)` exactly.

use crate::divisor::{canonical_divisor, Divisor};
use crate::error::{CoreError, CoreResult};
use crate::graph::{EdgeId, GraphPoint, MetricGraph, VertexId};
use crate::plf::PLFunction;
use crate::rat::{qi, Q};
use crate::subgraph::Subgraph;
use num_traits::Zero;
use std::collections::BTreeSet;

/// A metric graph subdivided at a finite set of interior points. Vertex ids of
/// the parent survive unchanged; one new vertex is appended per cut point.
pub struct Subdivision {
    pub graph: MetricGraph,
    // Per parent edge: (segment start offset, new edge id), ascending.
    segments: Vec<Vec<(Q, EdgeId)>>,
    // Per new edge: (parent edge, segment start offset).
    seg_parent: Vec<(EdgeId, Q)>,
}

impl Subdivision {
    pub fn at_points(g: &MetricGraph, pts: &[GraphPoint]) -> CoreResult<Subdivision> {
        let mut cuts: Vec<Vec<Q>> = vec![Vec::new(); g.edge_count()];
        for p in pts {
            let cp = g.canonicalize(p)?;
            if g.point_vertex(&cp).is_none() {
                cuts[cp.edge.0].push(cp.offset);
            }
        }
        let mut names: Vec<String> = (0..g.vertex_count())
            .map(|v| g.vertex_name(VertexId(v)).to_string())
            .collect();
        let mut edges: Vec<(usize, usize, Q)> = Vec::new();
        let mut segments: Vec<Vec<(Q, EdgeId)>> = vec![Vec::new(); g.edge_count()];
        let mut seg_parent: Vec<(EdgeId, Q)> = Vec::new();
        for e in g.edge_ids() {
            let list = &mut cuts[e.0];
            list.sort();
            list.dedup();
            let edge = g.edge(e);
            let mut prev_off = Q::zero();
            let mut prev_vertex = edge.u.0;
            for off in list.iter() {
                let nv = names.len();
                names.push(format!("cut:{}:{}", e.0, crate::rat::format_q(off)));
                let id = EdgeId(edges.len());
                edges.push((prev_vertex, nv, off - &prev_off));
                segments[e.0].push((prev_off.clone(), id));
                seg_parent.push((e, prev_off.clone()));
                prev_off = off.clone();
                prev_vertex = nv;
            }
            let id = EdgeId(edges.len());
            edges.push((prev_vertex, edge.v.0, &edge.len - &prev_off));
            segments[e.0].push((prev_off.clone(), id));
            seg_parent.push((e, prev_off));
        }
        Ok(Subdivision {
            graph: MetricGraph::new(names, edges)?,
            segments,
            seg_parent,
        })
    }

    /// Maps a parent point into the subdivided graph (canonical there).
    pub fn to_new_point(&self, g: &MetricGraph, p: &GraphPoint) -> CoreResult<GraphPoint> {
        let cp = g.canonicalize(p)?;
        if let Some(v) = g.point_vertex(&cp) {
            // Parent vertices keep their ids.
            return Ok(self.graph.vertex_point(v));
        }
        let segs = &self.segments[cp.edge.0];
        let i = segs.partition_point(|(start, _)| *start <= cp.offset) - 1;
        let (start, ne) = &segs[i];
        self.graph.point(*ne, &cp.offset - start)
    }

    /// Maps a point of the subdivided graph back to the parent (canonical).
    pub fn to_parent_point(&self, g: &MetricGraph, p: &GraphPoint) -> CoreResult<GraphPoint> {
        let (pe, start) = &self.seg_parent[p.edge.0];
        g.point(*pe, start + &p.offset)
    }

    pub fn divisor_to_new(&self, g: &MetricGraph, d: &Divisor) -> CoreResult<Divisor> {
        let mut out = Divisor::zero();
        for (p, m) in d.iter() {
            out.add_point(&self.graph, &self.to_new_point(g, p)?, m)?;
        }
        Ok(out)
    }

    /// Reassembles a function on the subdivided graph into one on the parent.
    pub fn plf_to_parent(&self, g: &MetricGraph, f: &PLFunction) -> CoreResult<PLFunction> {
        let mut tracks = Vec::with_capacity(g.edge_count());
        for e in g.edge_ids() {
            let mut track: Vec<(Q, Q)> = Vec::new();
            for (start, ne) in &self.segments[e.0] {
                for (i, (t, v)) in f.track(*ne).iter().enumerate() {
                    if i == 0 && !track.is_empty() {
                        continue; // segment junction already present
                    }
                    track.push((start + t, v.clone()));
                }
            }
            tracks.push(track);
        }
        PLFunction::from_tracks(g, tracks)
    }
}

/// Distance function to a vertex set as a piecewise linear function.
/// `dist[v]` are the vertex distances; edges flagged in `zero_edges` lie
/// entirely inside the source set.
fn distance_plf(g: &MetricGraph, dist: &[Q], zero_edges: &[bool]) -> CoreResult<PLFunction> {
    let mut tracks = Vec::with_capacity(g.edge_count());
    for e in g.edge_ids() {
        let edge = g.edge(e);
        if zero_edges[e.0] {
            tracks.push(vec![(Q::zero(), Q::zero()), (edge.len.clone(), Q::zero())]);
            continue;
        }
        let du = dist[edge.u.0].clone();
        let dv = dist[edge.v.0].clone();
        // Interior peak where the two wavefronts meet.
        let t = (&dv + &edge.len - &du) / qi(2);
        if t <= Q::zero() || t >= edge.len {
            tracks.push(vec![(Q::zero(), du), (edge.len.clone(), dv)]);
        } else {
            let peak = &du + &t;
            tracks.push(vec![
                (Q::zero(), du),
                (t, peak),
                (edge.len.clone(), dv),
            ]);
        }
    }
    PLFunction::from_tracks(g, tracks)
}

/// Burning pass: returns which vertices burn when fire starts at `q` and a
/// vertex holding at least as many chips as its currently burning directions
/// blocks the fire. Chip positions must be vertices of `g`.
fn burn(g: &MetricGraph, chips: &[i64], q: VertexId) -> Vec<bool> {
    let nv = g.vertex_count();
    let mut burnt = vec![false; nv];
    burnt[q.0] = true;
    loop {
        let mut changed = false;
        for v in 0..nv {
            if burnt[v] {
                continue;
            }
            let dirs = g
                .incident(VertexId(v))
                .iter()
                .filter(|&&(e, at_u)| {
                    let edge = g.edge(e);
                    let other = if at_u { edge.v } else { edge.u };
                    burnt[other.0]
                })
                .count() as i64;
            if dirs > chips[v] {
                burnt[v] = true;
                changed = true;
            }
        }
        if !changed {
            return burnt;
        }
    }
}

const REDUCE_FUEL: usize = 50_000;
const LATTICE_NODE_LIMIT: i64 = 200_000;
const UNFIRE_FUEL: u64 = 100_000_000;

/// Clears debt away from `q` by working on the uniform lattice model whose
/// spacing is the common denominator of all lengths and chip positions. On
/// that model, greedily unfiring in-debt vertices is the mirror image of
/// sandpile stabilization toward a sink, so it terminates; the accumulated
/// unfiring counts interpolate to the witness function.
fn settle_debt(
    g: &MetricGraph,
    d: &Divisor,
    q: &GraphPoint,
) -> CoreResult<(Divisor, PLFunction)> {
    use num_integer::Integer;
    let mut denom = num_bigint::BigInt::from(1);
    for e in g.edge_ids() {
        denom = denom.lcm(g.len(e).denom());
    }
    for (p, _) in d.iter() {
        denom = denom.lcm(p.offset.denom());
    }
    denom = denom.lcm(q.offset.denom());
    let m = Q::from(denom);

    // Node layout: parent vertices first, then interiors edge by edge.
    let nv = g.vertex_count();
    let mut steps: Vec<i64> = Vec::with_capacity(g.edge_count());
    let mut interior_start: Vec<usize> = Vec::with_capacity(g.edge_count());
    let mut n = nv;
    for e in g.edge_ids() {
        let k = crate::rat::to_i64(&(g.len(e) * &m))
            .filter(|k| *k >= 1)
            .ok_or(CoreError::ReductionStalled)?;
        if k > LATTICE_NODE_LIMIT || (n as i64) + k > LATTICE_NODE_LIMIT {
            return Err(CoreError::ReductionStalled);
        }
        steps.push(k);
        interior_start.push(n);
        n += (k - 1) as usize;
    }
    let node = |e: usize, j: i64| -> usize {
        if j == 0 {
            g.edge(EdgeId(e)).u.0
        } else if j == steps[e] {
            g.edge(EdgeId(e)).v.0
        } else {
            interior_start[e] + (j - 1) as usize
        }
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in 0..g.edge_count() {
        for j in 0..steps[e] {
            let a = node(e, j);
            let b = node(e, j + 1);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let lattice_index = |p: &GraphPoint| -> CoreResult<usize> {
        let j = crate::rat::to_i64(&(&p.offset * &m)).ok_or_else(|| {
            CoreError::Invariant("chip position escaped the lattice".into())
        })?;
        Ok(node(p.edge.0, j))
    };
    let mut chips = vec![0i64; n];
    for (p, mult) in d.iter() {
        chips[lattice_index(p)?] += mult;
    }
    let qi_node = lattice_index(q)?;

    // Greedy unfiring, batched: each pass lifts every in-debt vertex just
    // above zero. Abelian, so the order is immaterial.
    let mut unfired = vec![0i64; n];
    let mut fuel = UNFIRE_FUEL;
    loop {
        let mut any = false;
        for v in 0..n {
            if v == qi_node || chips[v] >= 0 {
                continue;
            }
            let deg = adj[v].len() as i64;
            let need = (-chips[v] + deg - 1) / deg;
            fuel = fuel
                .checked_sub(need as u64)
                .ok_or(CoreError::ReductionStalled)?;
            unfired[v] += need;
            chips[v] += need * deg;
            for &w in &adj[v] {
                chips[w] -= need;
            }
            any = true;
        }
        if !any {
            break;
        }
    }

    // Unfiring counts, divided by the lattice density, are the values of the
    // witness on lattice nodes: one unfire moves one chip by one spacing.
    let mut tracks = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let mut track = Vec::with_capacity(steps[e] as usize + 1);
        for j in 0..=steps[e] {
            track.push((
                Q::from(num_bigint::BigInt::from(j)) / &m,
                qi(unfired[node(e, j)]) / &m,
            ));
        }
        tracks.push(track);
    }
    let psi = PLFunction::from_tracks(g, tracks)?;
    let out = d.add(&psi.divisor(g));
    // Cross-check the exact divisor against the lattice bookkeeping.
    let mut expect = Divisor::zero();
    for e in 0..g.edge_count() {
        for j in 0..=steps[e] {
            let v = node(e, j);
            if chips[v] != 0 {
                let p = g.point(EdgeId(e), Q::from(num_bigint::BigInt::from(j)) / &m)?;
                expect.add_point(g, &p, chips[v])?;
                chips[v] = 0;
            }
        }
    }
    if out != expect {
        return Err(CoreError::Invariant(
            "lattice debt settlement disagrees with its witness".into(),
        ));
    }
    Ok((out, psi))
}

/// Reduces `d` at the base point `q`. Returns the reduced divisor and the
/// witness function with `psi(q) = 0`.
pub fn reduce(g: &MetricGraph, d: &Divisor, q: &GraphPoint) -> CoreResult<(Divisor, PLFunction)> {
    let q = g.canonicalize(q)?;
    let mut cur = d.clone();
    let mut psi = PLFunction::constant(g, Q::zero());

    // Phase 1: settle debt away from the base point.
    if cur.debt_except(&q) > 0 {
        let (d1, psi1) = settle_debt(g, &cur, &q)?;
        cur = d1;
        psi = psi1;
    }

    // Phase 2: burning rounds. Fire the unburnt set up to the next feature.
    for _ in 0..REDUCE_FUEL {
        let mut pts: Vec<GraphPoint> = cur.support().cloned().collect();
        pts.push(q.clone());
        let sub = Subdivision::at_points(g, &pts)?;
        let aug = &sub.graph;
        let qv = aug
            .point_vertex(&sub.to_new_point(g, &q)?)
            .expect("base point is a vertex after subdivision");
        let da = sub.divisor_to_new(g, &cur)?;
        let chips: Vec<i64> = aug.vertices().map(|v| da.mult_vertex(aug, v)).collect();
        for v in aug.vertices() {
            if v != qv && chips[v.0] < 0 {
                return Err(CoreError::Invariant(
                    "negative chips away from base after phase 1".into(),
                ));
            }
        }
        let burnt = burn(aug, &chips, qv);
        if burnt.iter().all(|&b| b) {
            let shift = -psi.eval(&q);
            return Ok((cur, psi.shift(&shift)));
        }
        // Distances from the unburnt closed set.
        let sources: Vec<(VertexId, Q)> = aug
            .vertices()
            .filter(|v| !burnt[v.0])
            .map(|v| (v, Q::zero()))
            .collect();
        let dist = aug.vertex_distances(&sources);
        let zero: Vec<bool> = aug
            .edge_ids()
            .map(|e| {
                let edge = aug.edge(e);
                !burnt[edge.u.0] && !burnt[edge.v.0]
            })
            .collect();
        // Next feature event: a front reaching a vertex, or two fronts meeting.
        let mut t_star: Option<Q> = None;
        let mut consider = |t: Q| {
            if t > Q::zero() {
                match &t_star {
                    Some(cur_t) if *cur_t <= t => {}
                    _ => t_star = Some(t),
                }
            }
        };
        for v in aug.vertices() {
            if burnt[v.0] {
                consider(dist[v.0].clone());
            }
        }
        for e in aug.edge_ids() {
            if zero[e.0] {
                continue;
            }
            let edge = aug.edge(e);
            let du = &dist[edge.u.0];
            let dv = &dist[edge.v.0];
            let gap = if du > dv { du - dv } else { dv - du };
            if gap < edge.len {
                consider((du + dv + &edge.len) / qi(2));
            }
        }
        let t = t_star.ok_or_else(|| {
            CoreError::Invariant("no firing event with burnt vertices remaining".into())
        })?;
        let dplf = distance_plf(aug, &dist, &zero)?;
        let clipped = dplf.min(aug, &PLFunction::constant(aug, t))?;
        let inc = sub.plf_to_parent(g, &clipped)?;
        cur = cur.add(&inc.divisor(g));
        psi = psi.add(g, &inc)?;
        if !cur.is_effective_except(&q) {
            return Err(CoreError::Invariant("firing broke effectivity".into()));
        }
    }
    Err(CoreError::ReductionStalled)
}

/// Whether `d` is already reduced at `q`.
pub fn is_reduced(g: &MetricGraph, d: &Divisor, q: &GraphPoint) -> CoreResult<bool> {
    let q = g.canonicalize(q)?;
    if !d.is_effective_except(&q) {
        return Ok(false);
    }
    let mut pts: Vec<GraphPoint> = d.support().cloned().collect();
    pts.push(q.clone());
    let sub = Subdivision::at_points(g, &pts)?;
    let aug = &sub.graph;
    let qv = aug
        .point_vertex(&sub.to_new_point(g, &q)?)
        .expect("base point is a vertex after subdivision");
    let da = sub.divisor_to_new(g, d)?;
    let chips: Vec<i64> = aug.vertices().map(|v| da.mult_vertex(aug, v)).collect();
    Ok(burn(aug, &chips, qv).iter().all(|&b| b))
}

/// Effective representative of the class of `d`, with witness, if one exists.
pub fn effective_representative(
    g: &MetricGraph,
    d: &Divisor,
) -> CoreResult<Option<(Divisor, PLFunction)>> {
    let q = g.vertex_point(VertexId(0));
    let (red, psi) = reduce(g, d, &q)?;
    if red.is_effective() {
        Ok(Some((red, psi)))
    } else {
        Ok(None)
    }
}

/// Result of [`loop_min_function`].
pub struct LoopMin {
    /// Nonnegative function whose minimum locus is exactly the requested circle.
    pub psi: PLFunction,
    /// Valence-two puncture points used to isolate the circle.
    pub punctures: Vec<GraphPoint>,
    /// Effective divisor equal to K + div(psi) - punctures.
    pub witness: Divisor,
}

/// Builds a function in the canonical linear system whose minimum locus is
/// exactly the given embedded circle.
///
/// Punctures are chosen by repeatedly deleting the lowest-id edge outside the
/// circle that lies on a cycle of the working graph, until only the circle's
/// cycle remains; the canonical class minus the punctures then has an
/// effective representative whose witness function does the job.
pub fn loop_min_function(g: &MetricGraph, target: &Subgraph) -> CoreResult<LoopMin> {
    if !target.is_embedded_circle(g) {
        return Err(CoreError::NotACircle);
    }
    let target_edges: BTreeSet<EdgeId> = target.full_edges(g).into_iter().collect();
    let mut active = vec![true; g.edge_count()];
    let mut punctures = Vec::new();
    while active_betti(g, &active) > 1 {
        let e = g
            .edge_ids()
            .find(|&e| {
                active[e.0] && !target_edges.contains(&e) && !is_active_bridge(g, &active, e)
            })
            .ok_or_else(|| {
                CoreError::Invariant("no puncture candidate outside the circle".into())
            })?;
        punctures.push(g.midpoint(e));
        active[e.0] = false;
    }
    let mut d = canonical_divisor(g);
    for p in &punctures {
        d.add_point(g, p, -1)?;
    }
    let Some((witness, psi0)) = effective_representative(g, &d)? else {
        return Err(CoreError::Invariant(
            "canonical class minus punctures lost effectivity".into(),
        ));
    };
    let m = psi0.min_value();
    let psi = psi0.shift(&-m);
    if psi.min_locus(g) != *target {
        return Err(CoreError::Invariant(
            "minimum locus differs from the requested circle".into(),
        ));
    }
    Ok(LoopMin {
        psi,
        punctures,
        witness,
    })
}

fn active_betti(g: &MetricGraph, active: &[bool]) -> usize {
    let mut verts = BTreeSet::new();
    let mut ne = 0usize;
    for e in g.edge_ids() {
        if active[e.0] {
            ne += 1;
            verts.insert(g.edge(e).u.0);
            verts.insert(g.edge(e).v.0);
        }
    }
    if verts.is_empty() {
        return 0;
    }
    // Component count over active edges.
    let ids: Vec<usize> = verts.iter().copied().collect();
    let mut comp: Vec<usize> = (0..ids.len()).collect();
    fn find(c: &mut Vec<usize>, x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for e in g.edge_ids() {
        if active[e.0] {
            let a = ids.binary_search(&g.edge(e).u.0).unwrap();
            let b = ids.binary_search(&g.edge(e).v.0).unwrap();
            let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
            comp[ra] = rb;
        }
    }
    let roots: BTreeSet<usize> = (0..ids.len()).map(|i| find(&mut comp, i)).collect();
    ne + roots.len() - ids.len()
}

fn is_active_bridge(g: &MetricGraph, active: &[bool], e: EdgeId) -> bool {
    let edge = g.edge(e);
    if edge.u == edge.v {
        return false; // self-loops never disconnect
    }
    // Search from u to v avoiding e.
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![edge.u.0];
    seen[edge.u.0] = true;
    while let Some(x) = stack.pop() {
        if x == edge.v.0 {
            return false;
        }
        for &(f, _) in g.incident(VertexId(x)) {
            if f == e || !active[f.0] {
                continue;
            }
            let fe = g.edge(f);
            for w in [fe.u.0, fe.v.0] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    true
}
