use gcg::gc::{enumerate_graphs, sp_act, sp_basis, Bounds, Gc, HStar, SpElement};
use gcg::graph::{Decoration, Graph, GraphVector};
use gcg::linalg::{qi, Rational};

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

fn variants() -> [(u8, bool); 3] {
    [(1, false), (1, true), (2, false)]
}

fn small(g: u8, tad: bool) -> Vec<Graph> {
    enumerate_graphs(g, tad, Bounds { vertices: 2, edges: 2, decorations: 3 })
}

#[test]
fn tadpoles_only_in_genus_one() {
    assert!(Gc::new(2, true).is_err());
    assert!(Gc::new(0, false).is_err());
    assert!(Gc::new(1, true).is_ok());
}

#[test]
fn z_is_maurer_cartan() {
    for (g, tad) in variants() {
        let gc = Gc::new(g, tad).unwrap();
        assert_eq!(gc.z_coefficients().unwrap(), (qi(-1), qi(-1)));
        let z = gc.z().unwrap();
        assert_eq!(z.len(), 1 + g as usize);
        assert!(gc.mc_residual(&z).is_zero(), "g={g} tad={tad}");
    }
}

#[test]
fn differentials_square_to_zero() {
    for (g, tad) in variants() {
        let gc = Gc::new(g, tad).unwrap();
        let z = gc.z().unwrap();
        for x in small(g, tad) {
            let v = gv(&x);
            assert!(gc.d(&gc.d(&v)).is_zero(), "{x}");
            assert!(gc.twisted(&z, &gc.twisted(&z, &v)).is_zero(), "{x}");
        }
    }
}

#[test]
fn bracket_is_a_dg_lie_bracket() {
    for (g, tad) in variants() {
        let gc = Gc::new(g, tad).unwrap();
        let gs: Vec<_> = small(g, tad).into_iter().take(14).collect();
        for a in &gs {
            for b in &gs {
                let (va, vb) = (gv(a), gv(b));
                let (da, db) = (a.gc_degree(), b.gc_degree());
                let ab = gc.bracket(&va, &vb);
                assert!((&ab + &gc.bracket(&vb, &va).scaled(&sg(da * db % 2 != 0))).is_zero());
                let rhs = &gc.bracket(&gc.d(&va), &vb) + &gc.bracket(&va, &gc.d(&vb)).scaled(&sg(da % 2 != 0));
                assert_eq!(gc.d(&ab), rhs, "{a} {b}");
                for c in gs.iter().take(6) {
                    let vc = gv(c);
                    let lhs = gc.bracket(&va, &gc.bracket(&vb, &vc));
                    let rhs = &gc.bracket(&ab, &vc)
                        + &gc.bracket(&vb, &gc.bracket(&va, &vc)).scaled(&sg(da * db % 2 != 0));
                    assert_eq!(lhs, rhs, "{a} {b} {c}");
                }
            }
        }
    }
}

#[test]
fn sp_basis_preserves_the_pairing() {
    assert_eq!(sp_basis(1).len(), 5);
    assert_eq!(sp_basis(2).len(), 14);
    for g in [1u8, 2, 3] {
        for s in sp_basis(g) {
            assert!(s.preserves_pairing(), "{}", s.name());
            assert!(s.avoids_unit());
        }
    }
    // ω∂α_1 alone is not in sp'.
    let bad = SpElement::new(1, vec![(HStar::D(Decoration::Omega), HStar::D(Decoration::Alpha(1)), 1)]);
    assert!(!bad.preserves_pairing());
}

#[test]
fn sp_acts_by_derivations() {
    for (g, tad) in variants() {
        let gc = Gc::new(g, tad).unwrap();
        let gs: Vec<_> = small(g, tad).into_iter().take(12).collect();
        for s in sp_basis(g) {
            let sd = s.degree();
            for x in &gs {
                let v = gv(x);
                let lhs = gc.d(&sp_act(&s, &v, tad));
                assert_eq!(lhs, sp_act(&s, &gc.d(&v), tad).scaled(&sg(sd % 2 != 0)));
                for y in gs.iter().take(6) {
                    let w = gv(y);
                    let lhs = sp_act(&s, &gc.bracket(&v, &w), tad);
                    let rhs = &gc.bracket(&sp_act(&s, &v, tad), &w)
                        + &gc.bracket(&v, &sp_act(&s, &w, tad)).scaled(&sg(sd * x.gc_degree() % 2 != 0));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn sigma_z_is_a_tripod_sum() {
    use Decoration::{Alpha as A, Beta as B};
    // Genus one: σ.z vanishes.
    let gc = Gc::new(1, false).unwrap();
    let z = gc.z().unwrap();
    for s in sp_basis(1) {
        assert!(sp_act(&s, &z, false).is_zero());
    }
    let gc = Gc::new(2, false).unwrap();
    let z = gc.z().unwrap();
    for s in sp_basis(2) {
        let sz = sp_act(&s, &z, false);
        if s.degree() == 0 {
            assert!(sz.is_zero());
        }
    }
    let w = HStar::D(Decoration::Omega);
    for j in 1..=2u8 {
        let i = 3 - j;
        let sa = SpElement::new(2, vec![(w, HStar::D(B(j)), 1), (HStar::D(A(j)), HStar::One, -1)]);
        let sb = SpElement::new(2, vec![(w, HStar::D(A(j)), 1), (HStar::D(B(j)), HStar::One, 1)]);
        assert_eq!(sp_act(&sa, &z, false), Gc::tripod_vector(A(i), B(i), A(j)));
        assert_eq!(sp_act(&sb, &z, false), Gc::tripod_vector(A(i), B(i), B(j)).scaled(&qi(-1)));
    }
}

#[test]
fn extension_differential_squares_to_zero() {
    let gc = Gc::new(2, false).unwrap();
    let z = gc.z().unwrap();
    for s in sp_basis(2) {
        let d1 = gc.extension_diff(&z, &s, &GraphVector::new());
        let zero = SpElement::new(2, vec![]);
        assert!(gc.extension_diff(&z, &zero, &d1).is_zero(), "{}", s.name());
    }
}

#[test]
fn rank_report_is_tagged_as_truncated() {
    let gc = Gc::new(1, false).unwrap();
    let r = gc
        .rank_report(0, Bounds { vertices: 2, edges: 2, decorations: 2 })
        .unwrap();
    assert!(!r.caveat.is_empty());
    assert!(r.rank_in <= r.dim && r.rank_out <= r.dim);
    assert_eq!(r.h_trunc + (r.rank_in + r.rank_out) as i64, r.dim as i64);
}
