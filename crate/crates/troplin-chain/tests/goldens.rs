//! Hand-checked values on specific chains: path coordinates, canonical
//! representatives, multiset slopes, and witness shapes.

use num_traits::Zero;
use troplin_chain::{
    make_admissible_chain, tableau_to_divisor, ChainModel, ShapeCase, Tableau,
};
use troplin_core::rat::qi;
use troplin_core::{PLFunction, Q};

fn model(genus: usize) -> ChainModel {
    ChainModel::new(make_admissible_chain(genus, 2).unwrap()).unwrap()
}

#[test]
fn genus_ten_path_coordinates() {
    // g = 10, r = 4, s = 2, d = 12: two up steps per column, then two down
    let m = model(10);
    let t = Tableau::standard_rect(4, 2).unwrap();
    let data = tableau_to_divisor(m.params(), &t, 12).unwrap();
    assert_eq!(m.params().rank_exact(&data).unwrap(), 4);
    let path = m.params().lingering_path(&data, 4).unwrap();
    assert_eq!(path.points[4], vec![6, 5, 2, 1]);
    assert_eq!(path.points[5], vec![6, 5, 3, 1]);
    assert_eq!(path.points[6], vec![6, 5, 4, 1]);
    assert_eq!(path.points[10], vec![4, 3, 2, 1]);
    for k in 0..=10 {
        assert_eq!(path.coord(k, 4), 0);
    }
}

#[test]
fn genus_four_path_coordinates() {
    let m = model(4);
    let t = Tableau::standard_rect(3, 1).unwrap();
    let data = tableau_to_divisor(m.params(), &t, 6).unwrap();
    let path = m.params().lingering_path(&data, 3).unwrap();
    assert_eq!(path.points[0], vec![3, 2, 1]);
    assert_eq!(path.points[2], vec![4, 3, 1]);
    assert_eq!(path.points[4], vec![3, 2, 1]);
}

#[test]
fn canonical_data_has_rank_g_minus_one() {
    // the one-row tableau class carries the canonical class: d0 = g-1 and
    // x_k = (g-k+1) m_k on every loop but the last
    for genus in 1..=8usize {
        let m = model(genus);
        let chain = m.params();
        let t = Tableau::standard_rect(genus - 1, 1).unwrap();
        let d = 2 * genus as i64 - 2;
        let data = tableau_to_divisor(chain, &t, d).unwrap();
        assert_eq!(data.d0, genus as i64 - 1);
        for k in 1..genus {
            assert_eq!(data.x[k - 1], qi((genus - k + 1) as i64) * chain.em(k));
        }
        assert!(data.x[genus - 1].is_zero());
        assert_eq!(chain.rank_exact(&data).unwrap(), genus - 1);
    }
}

#[test]
fn genus_four_canonical_basis() {
    let m = model(4);
    let chain = m.params();
    let t = Tableau::standard_rect(3, 1).unwrap();
    let data = tableau_to_divisor(chain, &t, 6).unwrap();
    let reps = m.canonical_basis(&data).unwrap();
    assert_eq!(reps.len(), 4);
    for (i, rep) in reps.iter().enumerate() {
        assert_eq!(rep.index, i);
        assert!(rep.divisor.is_effective());
        assert_eq!(rep.divisor.deg(), 6);
        assert_eq!(
            rep.divisor.mult_vertex(m.graph(), chain.w(0)),
            i as i64
        );
        assert_eq!(
            rep.divisor.mult_vertex(m.graph(), chain.v(5)),
            3 - i as i64
        );
        // no chips on bridge interiors: edge ids on loops are not 0 mod 3
        for p in rep.divisor.support() {
            if m.graph().point_vertex(p).is_none() {
                assert_ne!(p.edge.0 % 3, 0);
            }
        }
        assert_eq!(rep.psi.vertex_value(m.graph(), chain.w(0)), Q::zero());
    }
    // the top witness is trivial and leaves the divisor alone
    assert_eq!(reps[3].divisor, m.divisor(&data).unwrap());
    assert_eq!(reps[3].psi, PLFunction::constant(m.graph(), Q::zero()));
}

#[test]
fn genus_ten_lowest_witness_chips() {
    // D_0 drops its chip exactly on the two loops where the path moves in
    // direction 0, which for the standard class are loops 1 and 2
    let m = model(10);
    let chain = m.params();
    let t = Tableau::standard_rect(4, 2).unwrap();
    let data = tableau_to_divisor(chain, &t, 12).unwrap();
    let rep = m.canonical_rep(&data, 0).unwrap();
    for k in 1..=10usize {
        let chips = rep
            .divisor
            .support()
            .filter(|p| p.edge == chain.bottom(k) || p.edge == chain.top(k))
            .count();
        let expect = if k <= 2 { 0 } else { 1 };
        assert_eq!(chips, expect, "loop {k}");
    }
}

#[test]
fn genus_ten_multiset_slope() {
    // sigma_6(psi_1 + psi_3) = p_5(1) + p_5(3) = 5 + 1
    let m = model(10);
    let t = Tableau::standard_rect(4, 2).unwrap();
    let data = tableau_to_divisor(m.params(), &t, 12).unwrap();
    let psi = m.psi_multiset(&data, &[1, 3]).unwrap();
    assert_eq!(m.sigma(&psi, 6), qi(6));
}

#[test]
fn genus_ten_shape_cases() {
    // loop 5 lies in the region of column 2, entered with sigma = p_4(2) = 2
    let m = model(10);
    let chain = m.params();
    let t = Tableau::standard_rect(4, 2).unwrap();
    let data = tableau_to_divisor(chain, &t, 12).unwrap();
    let m5 = chain.em(5);
    assert_eq!(
        m.shape_case(&data, 0, 2, 5).unwrap(),
        ShapeCase::BelowActive {
            chip_from_v: qi(3) * m5,
            bridge_slope: 6,
            bottom_slope: 5,
        }
    );
    assert_eq!(
        m.shape_case(&data, 1, 2, 5).unwrap(),
        ShapeCase::BelowActive {
            chip_from_v: qi(2) * m5,
            bridge_slope: 5,
            bottom_slope: 4,
        }
    );
    assert_eq!(
        m.shape_case(&data, 2, 2, 5).unwrap(),
        ShapeCase::Active {
            left_slope: 2,
            right_slope: 3,
            bottom_slope: 2,
        }
    );
    assert_eq!(
        m.shape_case(&data, 3, 2, 5).unwrap(),
        ShapeCase::AboveActive {
            chip_from_w: m5.clone(),
            slope: 1,
        }
    );
    assert_eq!(
        m.shape_case(&data, 4, 2, 5).unwrap(),
        ShapeCase::AboveActive {
            chip_from_w: qi(2) * m5,
            slope: 0,
        }
    );
}
