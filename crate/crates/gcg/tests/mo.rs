use gcg::linalg::qi;
use gcg::mo::{mc_check_xi, Mo, MoElement, MoGen, MoOptions};
use proptest::prelude::*;

fn sg(odd: bool) -> gcg::Rational {
    if odd {
        qi(-1)
    } else {
        qi(1)
    }
}

fn unframed() -> MoOptions {
    MoOptions { framed: false, ab_relation: true }
}

#[test]
fn low_degree_dimensions() {
    let mo = Mo::new(2, 1, 2, MoOptions::default()).unwrap();
    assert_eq!(mo.dim(0).unwrap(), 1);
    assert_eq!(mo.dim(1).unwrap(), 7);
    let mo = Mo::new(2, 1, 2, unframed()).unwrap();
    assert_eq!(mo.dim(1).unwrap(), 5);
    let mo = Mo::new(1, 2, 1, MoOptions::default()).unwrap();
    assert_eq!(mo.dim(1).unwrap(), 5);
}

#[test]
fn arnold_relation_reduces_to_zero() {
    let mo = Mo::new(3, 1, 2, MoOptions::default()).unwrap();
    let w = |i, j| mo.gen(MoGen::w(i, j));
    let s = &(&mo.mult(&w(1, 2), &w(2, 3)).unwrap() + &mo.mult(&w(2, 3), &w(3, 1)).unwrap())
        + &mo.mult(&w(3, 1), &w(1, 2)).unwrap();
    assert!(mo.reduce(&s).unwrap().is_zero());
    assert!(!mo.mult(&w(1, 2), &w(2, 3)).unwrap().is_zero());
    // With two points there is no triple, and w12 w12 = 0 by oddness.
    let mo = Mo::new(2, 1, 2, MoOptions::default()).unwrap();
    assert!(mo.mult(&mo.gen(MoGen::w(1, 2)), &mo.gen(MoGen::w(1, 2))).unwrap().is_zero());
}

#[test]
fn ab_relation_and_point_identification() {
    let mo = Mo::new(2, 1, 2, MoOptions::default()).unwrap();
    let ab = mo.mult(&mo.gen(MoGen::A(1, 1)), &mo.gen(MoGen::B(1, 1))).unwrap();
    assert_eq!(ab, mo.reduce(&mo.gen(MoGen::Nu(1))).unwrap());
    let w = mo.gen(MoGen::w(1, 2));
    assert_eq!(
        mo.mult(&mo.gen(MoGen::A(1, 1)), &w).unwrap(),
        mo.mult(&mo.gen(MoGen::A(1, 2)), &w).unwrap()
    );
    let control = Mo::new(2, 1, 2, MoOptions { framed: true, ab_relation: false }).unwrap();
    let ab = control.mult(&control.gen(MoGen::A(1, 1)), &control.gen(MoGen::B(1, 1))).unwrap();
    assert_ne!(ab, control.reduce(&control.gen(MoGen::Nu(1))).unwrap());
}

#[test]
fn differential_of_framing_generators() {
    let mo = Mo::new(1, 1, 2, MoOptions::default()).unwrap();
    assert!(mo.diff(&mo.gen(MoGen::W(1, 1))).unwrap().is_zero());
    let mo = Mo::new(1, 2, 2, MoOptions::default()).unwrap();
    let d = mo.diff(&mo.gen(MoGen::W(1, 1))).unwrap();
    assert_eq!(d, mo.reduce(&mo.gen(MoGen::Nu(1)).scaled(&qi(-2))).unwrap());
}

#[test]
fn differential_preserves_the_ideal() {
    for r in 1..=3u8 {
        for g in 1..=2u8 {
            let mo = Mo::new(r, g, 3, MoOptions::default()).unwrap();
            for rel in mo.relations() {
                assert!(mo.diff(&rel).unwrap().is_zero(), "r={r} g={g} {}", mo.format(&rel));
            }
        }
    }
}

#[test]
fn differential_squares_to_zero() {
    for r in 1..=3u8 {
        for g in 1..=2u8 {
            let mo = Mo::new(r, g, 5, MoOptions::default()).unwrap();
            for d in 0..=3 {
                for m in mo.basis(d).unwrap() {
                    let x = MoElement::single(m, qi(1));
                    assert!(mo.diff(&mo.diff(&x).unwrap()).unwrap().is_zero(), "r={r} g={g} {}", mo.format(&x));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn graded_commutative_and_leibniz(i in 0usize..40, j in 0usize..40, di in 1usize..3, dj in 1usize..3) {
        let mo = Mo::new(3, 1, 5, MoOptions::default()).unwrap();
        let bi = mo.basis(di).unwrap();
        let bj = mo.basis(dj).unwrap();
        let x = MoElement::single(bi[i % bi.len()].clone(), qi(1));
        let y = MoElement::single(bj[j % bj.len()].clone(), qi(1));
        let xy = mo.mult(&x, &y).unwrap();
        prop_assert_eq!(&xy, &mo.mult(&y, &x).unwrap().scaled(&sg(di * dj % 2 == 1)));
        let lhs = mo.diff(&xy).unwrap();
        let rhs = &mo.mult(&mo.diff(&x).unwrap(), &y).unwrap()
            + &mo.mult(&x, &mo.diff(&y).unwrap()).unwrap().scaled(&sg(di % 2 == 1));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn maurer_cartan_element() {
    for r in 1..=3u8 {
        for g in 1..=2u8 {
            let rep = mc_check_xi(r, g, 4, MoOptions::default()).unwrap();
            assert!(rep.is_zero(), "r={r} g={g}: {:?}", rep.blocks);
            assert_eq!(rep.blocks.len(), 4);
        }
        let rep = mc_check_xi(r, 1, 4, unframed()).unwrap();
        assert!(rep.is_zero(), "unframed r={r}: {:?}", rep.blocks);
    }
}

#[test]
fn maurer_cartan_fails_without_ab_relation() {
    let rep = mc_check_xi(2, 1, 4, MoOptions { framed: true, ab_relation: false }).unwrap();
    assert!(!rep.is_zero());
    assert!(rep.blocks.iter().any(|b| b.block == [2, 2] && b.residual_dim > 0));
    let json = serde_json::to_value(&rep.blocks[0]).unwrap();
    assert_eq!(json["block"], serde_json::json!([2, 1]));
    assert!(json.get("residual_dim").is_some());
    assert!(mc_check_xi(2, 2, 4, unframed()).is_err());
}

#[test]
fn degree_two_ideal_matches_dense_oracle() {
    use gcg::linalg::dense_rank;
    use std::collections::BTreeMap;
    for (r, g) in [(2u8, 1u8), (3, 1), (3, 2)] {
        let mo = Mo::new(r, g, 2, MoOptions::default()).unwrap();
        let rels = mo.relations();
        let mut cols = BTreeMap::new();
        for rel in &rels {
            for (m, _) in rel.iter() {
                let n = cols.len();
                cols.entry(m.clone()).or_insert(n);
            }
        }
        let dense: Vec<Vec<gcg::Rational>> = rels
            .iter()
            .map(|rel| {
                let mut row = vec![qi(0); cols.len()];
                for (m, c) in rel.iter() {
                    row[cols[m]] = c.clone();
                }
                row
            })
            .collect();
        assert_eq!(dense_rank(&dense), mo.ideal_dim(2).unwrap(), "r={r} g={g}");
        let arnold = r as usize * (r as usize - 1) * (r as usize - 2) / 6;
        let others = r as usize * (g as usize * g as usize + (g as usize) * (g as usize - 1))
            + r as usize * (r as usize - 1) * g as usize;
        assert_eq!(mo.ideal_dim(2).unwrap(), arnold + others, "r={r} g={g}");
    }
}
