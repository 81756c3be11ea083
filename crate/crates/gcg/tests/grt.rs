use gcg::grt::{zg_dim_dense, DerivationTuple, GrtAlgebras, GrtError, Sp0, Variant, H1};
use gcg::lie::{Gen, QVec};
use gcg::linalg::{nullspace_basis, q, qi, Echelon, Rational, SparseMatrix, SparseVec};
use num_traits::Zero;

fn all_zero(grt: &gcg::grt::Grt<'_>, u: &DerivationTuple) -> bool {
    grt.zg_residuals(u).unwrap().iter().all(|r| r.value.is_zero())
}

#[test]
fn sl2_triple() {
    for variant in [Variant::Nonframed, Variant::Framed] {
        let alg = GrtAlgebras::new(1, variant, 4).unwrap();
        let grt = alg.solver().unwrap();
        let [h, e, f] = grt.sl2().unwrap();
        for x in [&h, &e, &f] {
            assert!(all_zero(&grt, x), "{variant}");
        }
        assert_eq!(grt.grt_bracket(&e, &f).unwrap(), h);
        assert_eq!(grt.grt_bracket(&h, &e).unwrap(), e.scaled(&qi(2)));
        assert_eq!(grt.grt_bracket(&h, &f).unwrap(), f.scaled(&qi(-2)));
        assert!(grt.grt_bracket(&h, &h).unwrap().is_zero());
    }
}

#[test]
fn framed_t11_tuples_are_excluded() {
    let alg = GrtAlgebras::new(1, Variant::Framed, 4).unwrap();
    let grt = alg.solver().unwrap();
    let t2 = &alg.t2;
    let only = DerivationTuple::zero(1, 1).with(H1::A(1), t2.gen(Gen::T(1, 1)));
    let res = grt.zg_residuals(&only).unwrap();
    assert!(res.iter().any(|r| r.equation.starts_with("U_a1^(12,3)") && !r.value.is_zero()));
    let mut half = QVec::new();
    for t in [Gen::T(1, 1), Gen::T(1, 2), Gen::T(2, 2)] {
        half.add_scaled(&t2.gen(t), &q(1, 2));
    }
    assert!(!grt.cocycle(&half).unwrap().is_zero());
    // The symmetrization of this tuple is u^{12} for u = t11.
    assert!(grt.symmetrization_defect(&half, 2).unwrap().is_zero());
}

#[test]
fn nonframed_weight_zero_is_sl2() {
    let alg = GrtAlgebras::new(1, Variant::Nonframed, 4).unwrap();
    let grt = alg.solver().unwrap();
    let z = grt.zg_solve(0).unwrap();
    assert_eq!(z.len(), 3);
    for x in grt.sl2().unwrap() {
        assert!(grt.in_span(&x, &z));
    }
    // Above weight zero every solution has zero symmetrization.
    for w in 1..=2 {
        for x in grt.zg_solve(w).unwrap() {
            for c in &x.comps {
                assert!(grt.symmetrization(c).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn nonframed_b_vanishes() {
    let alg = GrtAlgebras::new(1, Variant::Nonframed, 7).unwrap();
    let grt = alg.solver().unwrap();
    for w in 0..=6 {
        assert!(grt.bg_basis(w).unwrap().is_empty(), "w={w}");
    }
    let Some(x) = alg.t1.letter_of(Gen::X(1, 1)) else { panic!() };
    assert!(grt.b_image(&alg.t1.letter(x), 1).unwrap().is_zero());
}

#[test]
fn framed_b_is_one_dimensional() {
    let alg = GrtAlgebras::new(1, Variant::Framed, 7).unwrap();
    let grt = alg.solver().unwrap();
    let dims: Vec<usize> = (0..=6).map(|w| grt.bg_basis(w).unwrap().len()).collect();
    assert_eq!(dims, vec![0, 0, 1, 0, 0, 0, 0]);
    let t2 = &alg.t2;
    let t12 = t2.gen(Gen::T(1, 2));
    let gen = DerivationTuple::zero(1, 2)
        .with(H1::A(1), t2.bracket(&t12, &t2.gen(Gen::X(1, 1))).unwrap())
        .with(H1::B(1), t2.bracket(&t12, &t2.gen(Gen::Y(1, 1))).unwrap());
    assert!(!gen.is_zero());
    assert!(grt.in_span(&gen, &grt.bg_basis(2).unwrap()));
    let row = grt.table_row(2).unwrap();
    assert_eq!(row.dim_b, 1);
    assert_eq!(row.dim_r, row.dim_z - 1);
}

fn ideal_check(g: u8, variant: Variant, max_w: usize) {
    let alg = GrtAlgebras::new(g, variant, max_w + 2).unwrap();
    let grt = alg.solver().unwrap();
    let z: Vec<Vec<DerivationTuple>> = (0..=max_w).map(|w| grt.zg_solve(w).unwrap()).collect();
    let b: Vec<Vec<DerivationTuple>> = (0..=max_w).map(|w| grt.bg_basis(w).unwrap()).collect();
    for w in 0..=max_w {
        for x in &b[w] {
            assert!(all_zero(&grt, x), "B not in Z, g={g} {variant} w={w}");
            assert!(grt.in_span(x, &z[w]));
        }
        for w2 in 0..=max_w - w {
            for u in &z[w] {
                for v in &b[w2] {
                    let r = grt.grt_bracket(u, v).unwrap();
                    assert!(grt.in_span(&r, &b[w + w2]), "{{Z,B}} not in B, g={g} {variant} w={w},{w2}");
                }
            }
        }
    }
}

#[test]
fn b_is_an_ideal_in_z() {
    ideal_check(1, Variant::Framed, 3);
    ideal_check(1, Variant::Nonframed, 3);
    ideal_check(2, Variant::Framed, 2);
}

#[test]
fn z_is_closed_under_the_bracket() {
    let alg = GrtAlgebras::new(1, Variant::Framed, 5).unwrap();
    let grt = alg.solver().unwrap();
    let z: Vec<Vec<DerivationTuple>> = (0..=3).map(|w| grt.zg_solve(w).unwrap()).collect();
    for w1 in 0..=3 {
        for w2 in 0..=3 - w1 {
            for u in &z[w1] {
                for v in &z[w2] {
                    let r = grt.grt_bracket(u, v).unwrap();
                    assert!(all_zero(&grt, &r), "w={w1},{w2}");
                    let s = grt.grt_bracket(v, u).unwrap();
                    assert!(r.add(&s).is_zero());
                }
            }
        }
    }
}

#[test]
fn dense_oracle_agrees_with_solver() {
    for variant in [Variant::Framed, Variant::Nonframed] {
        let alg = GrtAlgebras::new(1, variant, 5).unwrap();
        let grt = alg.solver().unwrap();
        for w in 0..=3 {
            assert_eq!(grt.zg_solve(w).unwrap().len(), zg_dim_dense(&alg, w).unwrap(), "{variant} w={w}");
        }
    }
    let alg = GrtAlgebras::new(2, Variant::Framed, 3).unwrap();
    let grt = alg.solver().unwrap();
    for w in 0..=1 {
        assert_eq!(grt.zg_solve(w).unwrap().len(), zg_dim_dense(&alg, w).unwrap(), "g=2 w={w}");
    }
}

#[test]
fn tripods_and_their_sums() {
    let alg = GrtAlgebras::new(2, Variant::Framed, 4).unwrap();
    let grt = alg.solver().unwrap();
    let h = H1::all(2);
    for &a in &h {
        for &b in &h {
            for &c in &h {
                if a == b || b == c || a == c {
                    assert!(grt.tripod(a, b, c).is_err());
                    continue;
                }
                let v = grt.tripod(a, b, c).unwrap();
                assert!(!v.is_zero());
                assert!(all_zero(&grt, &v), "{a:?} {b:?} {c:?}");
            }
        }
    }
    for j in 1..=2u8 {
        let x = alg.t1.gen(Gen::X(j, 1));
        let y = alg.t1.gen(Gen::Y(j, 1));
        let aj = grt.a_j(j).unwrap();
        let bj = grt.b_j(j).unwrap();
        assert_eq!(aj, grt.b_image(&x, 1).unwrap().scaled(&qi(-1)));
        assert_eq!(bj, grt.b_image(&y, 1).unwrap().scaled(&qi(-1)));
        let b1 = grt.bg_basis(1).unwrap();
        assert!(grt.in_span(&aj, &b1) && grt.in_span(&bj, &b1));
    }
}

fn commutator(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    let mut m = vec![vec![Rational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0;
            for k in 0..n {
                s += a[i][k] * b[k][j] - b[i][k] * a[k][j];
            }
            m[i][j] = qi(s);
        }
    }
    m
}

#[test]
fn sp0_images_form_a_subalgebra() {
    for g in [1u8, 2] {
        let alg = GrtAlgebras::new(g, Variant::Framed, 3).unwrap();
        let grt = alg.solver().unwrap();
        let basis = Sp0::basis(g);
        assert_eq!(basis.len(), (2 * g * g + g) as usize);
        let images: Vec<DerivationTuple> = basis.iter().map(|s| grt.sp0_image(*s)).collect();
        for (s, x) in basis.iter().zip(&images) {
            assert!(all_zero(&grt, x), "{}", s.name());
        }
        let d2 = alg.t2.dim(1);
        let mut ech = Echelon::new();
        for x in &images {
            assert!(ech.insert(&x.coords(d2)));
        }
        for (s, x) in basis.iter().zip(&images) {
            for (t, y) in basis.iter().zip(&images) {
                let br = grt.grt_bracket(x, y).unwrap();
                assert_eq!(br, grt.linear_tuple(&commutator(&s.matrix(g), &t.matrix(g))));
                assert!(ech.contains(&br.coords(d2)), "{} {}", s.name(), t.name());
            }
        }
    }
    // The image of alpha_i d beta_i has the single component b_i = x_i.
    let alg = GrtAlgebras::new(2, Variant::Framed, 3).unwrap();
    let grt = alg.solver().unwrap();
    let v = grt.sp0_image(Sp0::AdB(1));
    assert_eq!(v, DerivationTuple::zero(2, 0).with(H1::B(1), alg.t2.gen(Gen::X(1, 1))));
}

#[test]
fn sp0_display_variants_with_repeated_indices_fail() {
    let alg = GrtAlgebras::new(2, Variant::Framed, 3).unwrap();
    let grt = alg.solver().unwrap();
    let t2 = &alg.t2;
    let x = |l| t2.gen(Gen::X(l, 1));
    let y = |l| t2.gen(Gen::Y(l, 1));
    // (a_1 = x_1, b_1 = -y_2) and (b_1 = x_2, b_2 = x_2).
    let p = DerivationTuple::zero(2, 0).with(H1::A(1), x(1)).with(H1::B(1), y(2).scaled(&qi(-1)));
    let r = DerivationTuple::zero(2, 0).with(H1::B(1), x(2)).with(H1::B(2), x(2));
    assert!(!all_zero(&grt, &p));
    assert!(!all_zero(&grt, &r));
}

#[test]
fn enriquez_deltas_lie_in_r_ell() {
    for (n, trunc) in [(0usize, 5usize), (1, 8)] {
        let alg = GrtAlgebras::new(1, Variant::Nonframed, trunc).unwrap();
        let grt = alg.solver().unwrap();
        let d = grt.delta_2n(n).unwrap();
        assert_eq!(alg.t2.weight_of(d.comp(H1::A(1))), Some(2 * n + 3));
        assert!(!d.comp(H1::A(1)).is_zero());
        for r in grt.rell_residuals(&d).unwrap() {
            assert!(r.value.is_zero(), "delta_{} {}", 2 * n, r.equation);
        }
        assert!(all_zero(&grt, &d));
        for c in &d.comps {
            assert!(grt.symmetrization(c).unwrap().is_zero());
        }
    }
}

#[test]
fn unsigned_delta_sum_is_not_a_derivation() {
    // ½ Σ_{p<2n+1} [ad^p y, ad^q y] without signs: for n = 0 this is ½[y,[x,y]].
    let alg = GrtAlgebras::new(1, Variant::Nonframed, 5).unwrap();
    let grt = alg.solver().unwrap();
    let t2 = &alg.t2;
    let d = grt.delta_2n(0).unwrap();
    let x = t2.gen(Gen::X(1, 1));
    let y = t2.gen(Gen::Y(1, 1));
    let xy = t2.bracket(&x, &y).unwrap();
    assert_eq!(d.comp(H1::B(1)), &t2.bracket(&y, &xy).unwrap());
    let unsigned = d.clone().with(H1::B(1), t2.bracket(&y, &xy).unwrap().scaled(&q(1, 2)));
    assert!(grt.rell_residuals(&unsigned).unwrap().iter().any(|r| !r.value.is_zero()));
}

fn kernel(maps: &[&dyn Fn(&QVec) -> QVec], dim: usize, w: usize) -> Echelon {
    let mut rows: std::collections::HashMap<(usize, (usize, usize)), usize> = Default::default();
    let mut trip = Vec::new();
    for k in 0..dim {
        let e = QVec::single((w, k), qi(1));
        for (m, f) in maps.iter().enumerate() {
            for (key, c) in f(&e).iter() {
                let len = rows.len();
                let r = *rows.entry((m, *key)).or_insert(len);
                trip.push((r, k, c.clone()));
            }
        }
    }
    let mat = SparseMatrix::from_triplets(rows.len(), dim, trip).unwrap();
    let mut ech = Echelon::new();
    for v in nullspace_basis(&mat) {
        let s: SparseVec = v.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
        ech.insert(&s);
    }
    ech
}

#[test]
fn cyclic_form_is_equivalent_for_antisymmetric_tuples() {
    let alg = GrtAlgebras::new(1, Variant::Nonframed, 6).unwrap();
    let grt = alg.solver().unwrap();
    for w in 1..=6 {
        let dim = alg.t2.dim(w);
        let sym = |e: &QVec| grt.symmetrization(e).unwrap();
        let coc = |e: &QVec| grt.cocycle(e).unwrap();
        let cyc = |e: &QVec| grt.cyclic(e).unwrap();
        let a = kernel(&[&sym, &coc], dim, w);
        let b = kernel(&[&sym, &cyc], dim, w);
        assert_eq!(a.rank(), b.rank(), "w={w}");
        assert!(a.rows().iter().all(|r| b.contains(r)), "w={w}");
    }
}

#[test]
fn errors_are_reported() {
    let alg = GrtAlgebras::new(1, Variant::Framed, 3).unwrap();
    let grt = alg.solver().unwrap();
    assert!(matches!(grt.zg_solve(2), Err(GrtError::Truncation { .. })));
    let bad = DerivationTuple::zero(1, 1).with(H1::A(1), alg.t2.gen(Gen::T(1, 1)));
    let [h, ..] = grt.sl2().unwrap();
    assert!(matches!(grt.grt_bracket(&bad, &h), Err(GrtError::NotInZ { .. })));
    assert!(GrtAlgebras::new(2, Variant::Nonframed, 3).is_err());
    assert!(grt.delta_2n(0).is_err());
}
