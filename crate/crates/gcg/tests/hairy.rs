use gcg::gc::{enumerate_graphs, sp_act, sp_basis, Bounds, Gc};
use gcg::graph::{canonicalize, Builder, Decoration, Graph, GraphVector, HairLabel};
use gcg::hairy::{bracket, d_split, f1, f2, m2_with, prelie, HGraph, HVector, Hgc};
use gcg::linalg::{qi, Rational};
use num_traits::Signed;

fn hv(x: &HGraph) -> HVector {
    HVector::single(x.clone(), qi(1))
}

fn gv(x: &Graph) -> GraphVector {
    GraphVector::single(x.clone(), qi(1))
}

fn sg(odd: bool) -> Rational {
    if odd {
        qi(-1)
    } else {
        qi(1)
    }
}

fn vertex(hairs: &[HairLabel], decos: &[Decoration]) -> HGraph {
    let mut b = Builder::new(1);
    for l in hairs {
        b.push_hair(0, *l);
    }
    for d in decos {
        b.push_deco(0, *d);
    }
    HGraph::Int(canonicalize(&b).expect("nonzero").0)
}

/// Hairy samples: F1 images of small graphs, lines and decorated legs.
fn samples(g: u8) -> Vec<HGraph> {
    let mut out: Vec<HGraph> = Vec::new();
    let mut push = |v: &HVector| {
        for (h, _) in v.iter() {
            if !out.contains(h) {
                out.push(h.clone());
            }
        }
    };
    for x in enumerate_graphs(g, false, Bounds { vertices: 2, edges: 2, decorations: 2 })
        .iter()
        .take(12)
    {
        push(&f1(&gv(x)));
    }
    for a in HairLabel::all(g) {
        for b in HairLabel::all(g) {
            push(&HGraph::line(a, b));
        }
    }
    for x in Decoration::all(g) {
        for l in HairLabel::all(g) {
            push(&HGraph::deco(x, l));
        }
    }
    out
}

#[test]
fn omega_hair_attaches_with_unit_coefficient() {
    let a = vertex(&[HairLabel::DOmega], &[Decoration::Alpha(1)]);
    let b = vertex(&[HairLabel::DBeta(1)], &[Decoration::Omega]);
    let p = prelie(&a, &b);
    assert_eq!(p.len(), 1);
    let (g, c) = p.iter().next().unwrap();
    assert_eq!(c.abs(), qi(1));
    assert_eq!(g.vertex_count(), 2);
    assert_eq!(g.hair_count(), 1);
}

#[test]
fn unmatched_labels_give_nothing() {
    let a = vertex(&[HairLabel::DAlpha(1)], &[]);
    let b = vertex(&[HairLabel::DBeta(1)], &[Decoration::Beta(1)]);
    assert!(prelie(&a, &b).is_zero());
    let c = vertex(&[HairLabel::D1], &[]);
    assert_eq!(prelie(&c, &b).len(), 1);
}

#[test]
fn nothing_attaches_to_lines() {
    let a = vertex(&[HairLabel::D1], &[]);
    let l = HGraph::Line(HairLabel::D1, HairLabel::DOmega);
    assert!(prelie(&a, &l).is_zero());
}

#[test]
fn odd_line_with_equal_labels_vanishes() {
    assert!(HGraph::line(HairLabel::DAlpha(1), HairLabel::DAlpha(1)).is_zero());
    assert_eq!(HGraph::line(HairLabel::D1, HairLabel::D1).len(), 1);
}

#[test]
fn bracket_is_a_dg_lie_bracket() {
    for g in [1u8, 2] {
        let all = samples(g);
        let s: Vec<_> = all.iter().step_by(3).take(12).cloned().collect();
        for a in &s {
            for b in &s {
                let (va, vb) = (hv(a), hv(b));
                let ab = bracket(&va, &vb);
                let ba = bracket(&vb, &va);
                let odd = a.degree() * b.degree() % 2 != 0;
                assert!((&ab + &ba.scaled(&sg(odd))).is_zero(), "antisymmetry {a} {b}");
                let lhs = d_split(&ab);
                let rhs = &bracket(&d_split(&va), &vb)
                    + &bracket(&va, &d_split(&vb)).scaled(&sg(a.degree() % 2 != 0));
                assert_eq!(lhs, rhs, "derivation {a} {b}");
                for c in s.iter().take(6) {
                    let vc = hv(c);
                    let lhs = bracket(&va, &bracket(&vb, &vc));
                    let rhs = &bracket(&ab, &vc) + &bracket(&vb, &bracket(&va, &vc)).scaled(&sg(odd));
                    assert_eq!(lhs, rhs, "jacobi {a} {b} {c}");
                }
            }
        }
        for a in &all {
            assert!(d_split(&d_split(&hv(a))).is_zero());
        }
    }
}

#[test]
fn maurer_cartan_identities() {
    for g in [1u8, 2] {
        let h = Hgc::new(g).unwrap();
        let m1 = h.m1().unwrap();
        let m2 = h.m2();
        // Five families: ω, unit, α_iβ_i, α_i, β_i.
        assert_eq!(m1.len(), 2 + 3 * g as usize);
        assert!(m1.iter().all(|(x, _)| x.degree() == 1));
        assert!(m2.iter().all(|(x, _)| x.degree() == 1));
        assert_eq!(bracket(&m1, &m1), d_split(&m1).scaled(&qi(-2)));
        assert!(bracket(&m1, &m2).is_zero());
        assert!(bracket(&m2, &m2).is_zero());
        assert!(h.mc_residual(&h.m().unwrap()).is_zero());
    }
}

#[test]
fn f1_is_a_lie_morphism_commuting_with_splitting() {
    for g in [1u8, 2] {
        let gc = Gc::new(g, false).unwrap();
        let gs = enumerate_graphs(g, false, Bounds { vertices: 2, edges: 2, decorations: 2 });
        let gs: Vec<_> = gs.into_iter().take(16).collect();
        for a in &gs {
            let va = gv(a);
            assert_eq!(f1(&gc.d_split(&va)), d_split(&f1(&va)), "{a}");
            for b in gs.iter().take(8) {
                let vb = gv(b);
                assert_eq!(f1(&gc.bracket(&va, &vb)), bracket(&f1(&va), &f1(&vb)), "{a} {b}");
            }
        }
    }
}

#[test]
fn pairing_differential_is_bracket_with_m2() {
    for g in [1u8, 2] {
        let gc = Gc::new(g, false).unwrap();
        let h = Hgc::new(g).unwrap();
        let m2 = h.m2();
        let gs = enumerate_graphs(g, false, Bounds { vertices: 3, edges: 2, decorations: 3 });
        let mut nonzero = 0;
        for a in &gs {
            let va = gv(a);
            let dp = gc.d_pair(&va);
            nonzero += !dp.is_zero() as usize;
            assert_eq!(f1(&dp), bracket(&m2, &f1(&va)), "{a}");
        }
        assert!(nonzero > 10);
        // Other relative signs in m2 break the identity.
        let wrong = m2_with(g, &qi(1), &qi(-1));
        assert!(gs.iter().any(|a| f1(&gc.d_pair(&gv(a))) != bracket(&wrong, &f1(&gv(a)))));
    }
}

#[test]
fn f2_intertwines_the_actions() {
    for g in [1u8, 2] {
        let h = Hgc::new(g).unwrap();
        let m2 = h.m2();
        let gs = enumerate_graphs(g, false, Bounds { vertices: 2, edges: 1, decorations: 2 });
        for s in sp_basis(g) {
            let fs = f2(&s);
            assert!(fs.iter().all(|(x, _)| x.degree().rem_euclid(2) == s.degree().rem_euclid(2)));
            assert!(bracket(&m2, &fs).is_zero(), "{}", s.name());
            for a in gs.iter().take(20) {
                let va = gv(a);
                assert_eq!(f1(&sp_act(&s, &va, false)), bracket(&fs, &f1(&va)), "{} {a}", s.name());
            }
        }
    }
}

#[test]
fn f_is_a_chain_map() {
    for g in [1u8, 2] {
        let h = Hgc::new(g).unwrap();
        let gs = enumerate_graphs(g, false, Bounds { vertices: 2, edges: 2, decorations: 2 });
        let zero = gcg::gc::SpElement::new(g, vec![]);
        for a in gs.iter().take(20) {
            assert!(h.chain_defect(&zero, &gv(a)).unwrap().is_zero(), "{a}");
        }
        for s in sp_basis(g) {
            assert!(h.chain_defect(&s, &GraphVector::new()).unwrap().is_zero(), "{}", s.name());
        }
    }
}
