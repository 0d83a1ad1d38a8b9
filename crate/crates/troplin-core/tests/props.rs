//! Randomized properties of the core structures: divisors of piecewise linear
//! functions are principal, reduction is a projection with an exact witness,
//! distances are metric, and wire formats round-trip.

use proptest::prelude::*;
use troplin_core::divisor::Divisor;
use troplin_core::graph::{EdgeId, GraphPoint, MetricGraph, VertexId};
use troplin_core::plf::{distance_function, min_family, PLFunction};
use troplin_core::rat::{q, qi, Q};
use troplin_core::reduced::{is_reduced, reduce};
use troplin_core::subgraph::Subgraph;
use troplin_core::wire::{DivisorWire, GraphWire, PlfWire};

/// Connected multigraph: path spine plus arbitrary extra edges (self-loops
/// allowed), lengths from a small rational menu.
fn graph_strategy() -> impl Strategy<Value = MetricGraph> {
    let len = prop_oneof![
        Just(qi(1)),
        Just(qi(2)),
        Just(qi(3)),
        Just(q(1, 2)),
        Just(q(3, 2)),
        Just(q(5, 2)),
    ];
    (2usize..6, proptest::collection::vec((0usize..6, 0usize..6), 0..4)).prop_flat_map(
        move |(n, extras)| {
            let spine = n - 1;
            let extras: Vec<(usize, usize)> = extras
                .into_iter()
                .map(|(u, v)| (u % n, v % n))
                .collect();
            proptest::collection::vec(len.clone(), spine + extras.len()).prop_map(
                move |lens| {
                    let mut edges = Vec::new();
                    let mut it = lens.into_iter();
                    for i in 0..spine {
                        edges.push((i, i + 1, it.next().unwrap()));
                    }
                    for &(u, v) in &extras {
                        edges.push((u, v, it.next().unwrap()));
                    }
                    MetricGraph::from_edges(n, edges).unwrap()
                },
            )
        },
    )
}

/// A valid function: minimum of a few scaled distance cones and a constant.
fn cone_min(g: &MetricGraph, picks: &[(usize, i64, i64)]) -> PLFunction {
    let mut family: Vec<(PLFunction, Q)> = vec![(PLFunction::constant(g, qi(4)), qi(0))];
    for &(v, scale, shift) in picks {
        let v = VertexId(v % g.vertex_count());
        let cone = distance_function(g, v).unwrap().scale(scale);
        family.push((cone, qi(shift)));
    }
    min_family(g, &family).unwrap()
}

fn some_point(g: &MetricGraph, sel: (usize, u8, u8)) -> GraphPoint {
    let e = EdgeId(sel.0 % g.edge_count());
    let den = 1 + (sel.2 % 2) as i64; // stays on a coarse lattice
    let len = g.len(e);
    let num = (sel.1 as i64) % (2 * den);
    let off = len * q(num, 2 * den);
    g.point(e, off).unwrap()
}

proptest! {
    #[test]
    fn function_divisors_have_degree_zero(
        g in graph_strategy(),
        picks in proptest::collection::vec((0usize..8, 1i64..3, -3i64..4), 1..4),
        probes in proptest::collection::vec((0usize..16, 0u8..16, 0u8..4), 1..5),
    ) {
        let f = cone_min(&g, &picks);
        prop_assert_eq!(f.divisor(&g).deg(), 0);
        // Pointwise: the engine minimum equals the minimum of the parts.
        let mut family: Vec<(PLFunction, Q)> = vec![(PLFunction::constant(&g, qi(4)), qi(0))];
        for &(v, scale, shift) in &picks {
            let v = VertexId(v % g.vertex_count());
            family.push((distance_function(&g, v).unwrap().scale(scale), qi(shift)));
        }
        for sel in probes {
            let p = some_point(&g, sel);
            let want = family
                .iter()
                .map(|(h, b)| h.eval(&p) + b)
                .min()
                .unwrap();
            prop_assert_eq!(f.eval(&p), want);
        }
    }

    #[test]
    fn sums_and_minima_stay_valid(
        g in graph_strategy(),
        picks_a in proptest::collection::vec((0usize..8, 1i64..3, -3i64..4), 1..3),
        picks_b in proptest::collection::vec((0usize..8, 1i64..3, -3i64..4), 1..3),
    ) {
        let a = cone_min(&g, &picks_a);
        let b = cone_min(&g, &picks_b);
        let s = a.add(&g, &b).unwrap();
        let m = a.min(&g, &b).unwrap();
        prop_assert_eq!(s.divisor(&g).deg(), 0);
        prop_assert_eq!(m.divisor(&g).deg(), 0);
        for v in g.vertices() {
            let av = a.vertex_value(&g, v);
            let bv = b.vertex_value(&g, v);
            prop_assert_eq!(s.vertex_value(&g, v), &av + &bv);
            prop_assert_eq!(m.vertex_value(&g, v), av.min(bv));
        }
    }

    #[test]
    fn reduction_is_an_exact_projection(
        g in graph_strategy(),
        chips in proptest::collection::vec(((0usize..16, 0u8..16, 0u8..4), -2i64..4), 1..4),
        qsel in (0usize..16, 0u8..16, 0u8..4),
    ) {
        let mut d = Divisor::zero();
        for (sel, mult) in chips {
            d.add_point(&g, &some_point(&g, sel), mult).unwrap();
        }
        let base = some_point(&g, qsel);
        let (red, psi) = reduce(&g, &d, &base).unwrap();
        prop_assert_eq!(d.add(&psi.divisor(&g)), red.clone());
        prop_assert!(red.is_effective_except(&base));
        prop_assert!(is_reduced(&g, &red, &base).unwrap());
        prop_assert_eq!(red.deg(), d.deg());
        // Idempotence: reducing the result changes nothing.
        let (red2, psi2) = reduce(&g, &red, &base).unwrap();
        prop_assert_eq!(red2, red);
        prop_assert_eq!(psi2, PLFunction::constant(&g, qi(0)));
    }

    #[test]
    fn vertex_distances_form_a_metric(g in graph_strategy()) {
        let n = g.vertex_count();
        let rows: Vec<Vec<Q>> = g
            .vertices()
            .map(|v| g.vertex_distances(&[(v, qi(0))]))
            .collect();
        for a in 0..n {
            prop_assert_eq!(&rows[a][a], &qi(0));
            for b in 0..n {
                prop_assert_eq!(&rows[a][b], &rows[b][a]);
                for c in 0..n {
                    prop_assert!(rows[a][c] <= &rows[a][b] + &rows[b][c]);
                }
            }
        }
    }

    #[test]
    fn wire_formats_round_trip(
        g in graph_strategy(),
        chips in proptest::collection::vec(((0usize..16, 0u8..16, 0u8..4), -2i64..4), 0..4),
        picks in proptest::collection::vec((0usize..8, 1i64..3, -3i64..4), 1..3),
    ) {
        let gw = GraphWire::from_graph(&g);
        let json = serde_json::to_string(&gw).unwrap();
        let g2 = serde_json::from_str::<GraphWire>(&json).unwrap().to_graph().unwrap();
        prop_assert_eq!(g.vertex_count(), g2.vertex_count());
        prop_assert_eq!(g.edge_count(), g2.edge_count());
        for e in g.edge_ids() {
            prop_assert_eq!(g.len(e), g2.len(e));
        }

        let mut d = Divisor::zero();
        for (sel, mult) in chips {
            d.add_point(&g, &some_point(&g, sel), mult).unwrap();
        }
        let dw = DivisorWire::from_divisor(&d);
        let djson = serde_json::to_string(&dw).unwrap();
        let d2 = serde_json::from_str::<DivisorWire>(&djson).unwrap().to_divisor(&g).unwrap();
        prop_assert_eq!(d, d2);

        let f = cone_min(&g, &picks);
        let fw = PlfWire::from_plf(&g, &f);
        let fjson = serde_json::to_string(&fw).unwrap();
        let f2 = serde_json::from_str::<PlfWire>(&fjson).unwrap().to_plf(&g).unwrap();
        prop_assert_eq!(f, f2);
    }

    #[test]
    fn membership_is_representation_independent(
        g in graph_strategy(),
        vsel in 0usize..8,
    ) {
        let v = VertexId(vsel % g.vertex_count());
        let s = Subgraph::single_point(&g, &g.vertex_point(v)).unwrap();
        for &(e, at_u) in g.incident(v) {
            let off = if at_u { qi(0) } else { g.len(e).clone() };
            let p = GraphPoint { edge: e, offset: off };
            prop_assert!(s.contains(&g, &p));
        }
        prop_assert_eq!(s.tangent_degree(&g, &g.vertex_point(v)), 0);
        prop_assert_eq!(s.outdeg(&g, &g.vertex_point(v)), g.valence(v));
    }
}
