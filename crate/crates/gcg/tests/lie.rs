use std::collections::BTreeMap;
use std::time::Instant;

use gcg::lie::{
    comp_u, compose_maps, delta, dim_rows, is_lyndon, t_bv, t_g, t_nonframed, theta_phi, witt_dimension, FreeLie,
    Gen, LieElement, LieError, LieMorphism, PresentedLie, Word,
};
use gcg::linalg::{dense_rank, qi, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn free(n: usize, max: usize) -> FreeLie {
    FreeLie::new((0..n).map(|i| format!("a{i}")).collect(), vec![1; n], max)
}

fn letter(p: &PresentedLie, g: Gen) -> LieElement {
    p.gen(g)
}

/// Tensor-algebra oracle: spans left-normed brackets of letters and of
/// `[g1,[g2,…,[gk,r]]]` for relations `r`, then compares ranks densely.
fn oracle_dims(p: &PresentedLie) -> Vec<(usize, usize)> {
    let f = &p.free;
    let max = f.max_weight;
    let letters = f.letters();
    type P = BTreeMap<Word, Rational>;
    let lett = |a: usize| -> P { P::from([(vec![a as u16], qi(1))]) };
    let comm = gcg::lie::commutator;
    // Left-normed Lie monomials by weight.
    let mut lie: Vec<Vec<P>> = vec![Vec::new(); max + 1];
    for a in 0..letters {
        if f.weights[a] <= max {
            lie[f.weights[a]].push(lett(a));
        }
    }
    for w in 1..=max {
        for a in 0..letters {
            let k = f.weights[a];
            if k < w {
                let parts: Vec<P> = lie[w - k].iter().map(|x| comm(&lett(a), x)).collect();
                lie[w].extend(parts);
            }
        }
    }
    let mut ideal: Vec<Vec<P>> = vec![Vec::new(); max + 1];
    for r in &p.relations {
        let w = f.weight_of(r).unwrap();
        ideal[w].push(f.expand(r));
    }
    for w in 1..=max {
        for a in 0..letters {
            let k = f.weights[a];
            if k < w {
                let parts: Vec<P> = ideal[w - k].iter().map(|x| comm(&lett(a), x)).collect();
                ideal[w].extend(parts);
            }
        }
    }
    let rank_of = |vs: &[P]| -> usize {
        let mut cols: BTreeMap<Word, usize> = BTreeMap::new();
        for v in vs {
            for k in v.keys() {
                let n = cols.len();
                cols.entry(k.clone()).or_insert(n);
            }
        }
        let dense: Vec<Vec<Rational>> = vs
            .iter()
            .map(|v| {
                let mut row = vec![Rational::zero(); cols.len()];
                for (k, c) in v {
                    row[cols[k]] = c.clone();
                }
                row
            })
            .collect();
        dense_rank(&dense)
    };
    (1..=max)
        .map(|w| (rank_of(&lie[w]), rank_of(&ideal[w])))
        .collect()
}

#[test]
fn hall_basis_counts() {
    let f = free(2, 6);
    assert_eq!((1..=3).map(|w| f.dim(w)).collect::<Vec<_>>(), vec![2, 1, 2]);
    let f3 = free(3, 3);
    assert_eq!((1..=3).map(|w| f3.dim(w)).collect::<Vec<_>>(), vec![3, 3, 8]);
    for w in 1..=6 {
        assert_eq!(f.dim(w), witt_dimension(&[1, 1], w));
        assert!(f.basis(w).iter().all(|x| is_lyndon(x)));
    }
    assert_eq!((1..=6).map(|w| witt_dimension(&[1, 1], w)).collect::<Vec<_>>(), vec![2, 1, 2, 3, 6, 9]);
    // Weighted letters.
    let fw = FreeLie::new(vec!["x".into(), "y".into(), "t".into()], vec![1, 1, 2], 5);
    for w in 1..=5 {
        assert_eq!(fw.dim(w), witt_dimension(&[1, 1, 2], w));
    }
}

#[test]
fn free_lie_is_a_lie_algebra() {
    let f = free(3, 5);
    let b1 = f.basis(1).to_vec();
    let b2 = f.basis(2).to_vec();
    let el = |w: &Word| LieElement::single(w.clone(), qi(1));
    for x in &b1 {
        for y in &b2 {
            for z in &b1 {
                let (x, y, z) = (el(x), el(y), el(z));
                let j = &(&f.bracket(&x, &f.bracket(&y, &z).unwrap()).unwrap()
                    + &f.bracket(&y, &f.bracket(&z, &x).unwrap()).unwrap())
                    + &f.bracket(&z, &f.bracket(&x, &y).unwrap()).unwrap();
                assert!(j.is_zero());
            }
        }
    }
    assert!(matches!(
        f.bracket(&el(&b2[0]), &el(&f.basis(4)[0])),
        Err(LieError::WeightOverflow { .. })
    ));
}

#[test]
fn free_algebra_has_no_center_in_weight_two() {
    let p = PresentedLie::new("free(2)", free(2, 4), Vec::new()).unwrap();
    assert_eq!(p.dim(2), 1);
    assert!(p.center(2).unwrap().is_empty());
    assert!(p.center(1).unwrap().is_empty());
}

#[test]
fn dimensions_match_the_dense_oracle() {
    let cases = [
        t_g(1, 1, 4).unwrap(),
        t_g(2, 1, 4).unwrap(),
        t_g(1, 2, 4).unwrap(),
        t_g(2, 2, 3).unwrap(),
        t_nonframed(2, 4).unwrap(),
        t_nonframed(3, 3).unwrap(),
        t_bv(3, 4).unwrap(),
    ];
    for p in &cases {
        let o = oracle_dims(p);
        for (d, (free, ideal)) in p.dims.iter().zip(o) {
            assert_eq!((d.dim_free, d.dim_ideal), (free, ideal), "{} w{}", p.name, d.weight);
        }
    }
}

#[test]
fn small_dimensions() {
    let t11 = t_g(1, 1, 5).unwrap();
    assert_eq!((1..=5).map(|w| t11.dim(w)).collect::<Vec<_>>(), vec![2, 1, 0, 0, 0]);
    let nf2 = t_nonframed(2, 3).unwrap();
    assert_eq!(nf2.dim(2), 1);
    let t21 = t_g(1, 2, 4).unwrap();
    assert_eq!(t21.dim(1), 4);
    assert_eq!(t21.dim(2), 6);
    let bv3 = t_bv(3, 3).unwrap();
    assert_eq!(bv3.dim(2), 6);
    let rows = dim_rows(&t21);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1].dim_free - rows[1].dim_ideal, rows[1].dim_quotient);
}

#[test]
fn t_11_is_abelian() {
    let p = t_g(1, 1, 4).unwrap();
    let x = letter(&p, Gen::X(1, 1));
    let y = letter(&p, Gen::Y(1, 1));
    let t = letter(&p, Gen::T(1, 1));
    assert!(p.bracket(&x, &y).unwrap().is_zero());
    assert!(p.bracket(&x, &t).unwrap().is_zero());
    assert_eq!(p.quotient_basis(2), vec![vec![2u16]]);
}

#[test]
fn center_of_t_21_is_spanned_by_t11() {
    let p = t_g(1, 2, 5).unwrap();
    let t = letter(&p, Gen::T(1, 1));
    for w in 1..=4 {
        let c = p.center(w).unwrap();
        if w == 2 {
            assert_eq!(c.len(), 1);
            assert_eq!(p.reduce(&c[0]), p.reduce(&t).scaled(&c[0].coeff(&vec![p.letter_of(Gen::T(1, 1)).unwrap() as u16])));
        } else {
            assert!(c.is_empty(), "weight {w}");
        }
    }
}

#[test]
fn generator_identities() {
    for g in [1u8, 2] {
        let p = t_g(2, g, 3).unwrap();
        let x = |l, i| letter(&p, Gen::X(l, i));
        let t12 = letter(&p, Gen::t(1, 2));
        // [x^1 + x^2, t12] = 0.
        for l in 1..=g {
            assert!(p.bracket(&(&x(l, 1) + &x(l, 2)), &t12).unwrap().is_zero());
            assert!(!p.bracket(&x(l, 1), &t12).unwrap().is_zero());
        }
        // t_ij = t_ji and [x_k^i, y_k^j] = t_ij.
        assert_eq!(letter(&p, Gen::t(2, 1)), t12);
        assert_eq!(p.bracket(&x(1, 2), &letter(&p, Gen::Y(1, 1))).unwrap(), p.reduce(&t12));
    }
}

#[test]
fn theta_for_a_collapse() {
    let src = t_g(1, 1, 3).unwrap();
    let tgt = t_g(2, 1, 3).unwrap();
    let th = theta_phi(&src, &tgt, &[1, 1]).unwrap();
    let img = th.apply(&letter(&src, Gen::T(1, 1))).unwrap();
    let expect = &(&letter(&tgt, Gen::T(1, 1)) + &letter(&tgt, Gen::T(1, 2))) + &letter(&tgt, Gen::T(2, 2));
    assert_eq!(img, tgt.reduce(&expect));
    assert!(theta_phi(&src, &tgt, &[1, 2]).is_err());
}

#[test]
fn theta_preserves_relations_for_all_maps() {
    for g in [1u8, 2] {
        let ps: Vec<_> = (1..=3u8).map(|n| t_g(n, g, 3).unwrap()).collect();
        for src in &ps {
            for tgt in &ps {
                let (n, m) = (src.n, tgt.n);
                let total = (n as usize).pow(m as u32);
                for code in 0..total {
                    let mut c = code;
                    let phi: Vec<u8> = (0..m)
                        .map(|_| {
                            let v = (c % n as usize) as u8 + 1;
                            c /= n as usize;
                            v
                        })
                        .collect();
                    theta_phi(src, tgt, &phi).unwrap_or_else(|e| panic!("{phi:?} {e}"));
                }
            }
        }
    }
}

#[test]
fn coface_identities() {
    let ps: Vec<_> = (1..=3u8).map(|n| t_g(n, 1, 4).unwrap()).collect();
    let p = |n: u8| &ps[n as usize - 1];
    assert_eq!(delta(2, 1), vec![1, 1, 2]);
    for n in 2..=2u8 {
        for k in 1..n {
            // As maps of finite sets, then as composites of Lie morphisms.
            assert_eq!(compose_maps(&delta(n - 1, k), &delta(n, k + 1)), compose_maps(&delta(n - 1, k), &delta(n, k)));
            let outer = theta_phi(p(n - 1), p(n), &delta(n - 1, k)).unwrap();
            let a = theta_phi(p(n), p(n + 1), &delta(n, k + 1)).unwrap().compose(&outer).unwrap();
            let b = theta_phi(p(n), p(n + 1), &delta(n, k)).unwrap().compose(&outer).unwrap();
            assert!(a.agrees_with(&b));
            let direct = theta_phi(p(n - 1), p(n + 1), &compose_maps(&delta(n - 1, k), &delta(n, k))).unwrap();
            assert!(a.agrees_with(&direct));
        }
    }
}

#[test]
fn insertion_is_associative() {
    let started = Instant::now();
    let g = 1;
    let t2 = t_g(2, g, 3).unwrap();
    let t3 = t_g(3, g, 3).unwrap();
    let t4 = t_g(4, g, 3).unwrap();
    let bv = t_bv(2, 3).unwrap();
    // Insert W at 2 then W' at 1, against W' at 1 then W at 3.
    let (l_a, r_a) = comp_u(&t2, &bv, &t3, 2).unwrap();
    let (l_b, r_b) = comp_u(&t3, &bv, &t4, 1).unwrap();
    let first = l_b.compose(&l_a).unwrap();
    let (l_c, r_c) = comp_u(&t2, &bv, &t3, 1).unwrap();
    let (l_d, r_d) = comp_u(&t3, &bv, &t4, 3).unwrap();
    let second = l_d.compose(&l_c).unwrap();
    assert!(first.agrees_with(&second));
    // The inserted copies of t_bv land in the same places.
    assert!(l_b.compose(&r_a).unwrap().agrees_with(&r_d));
    assert!(l_d.compose(&r_c).unwrap().agrees_with(&r_b));
    // Explicit images of the left half.
    let img = l_a.apply(&letter(&t2, Gen::T(2, 2))).unwrap();
    let expect = &(&letter(&t3, Gen::T(2, 2)) + &letter(&t3, Gen::T(2, 3))) + &letter(&t3, Gen::T(3, 3));
    assert_eq!(img, t3.reduce(&expect));
    let img = l_a.apply(&letter(&t2, Gen::t(1, 2))).unwrap();
    assert_eq!(img, t3.reduce(&(&letter(&t3, Gen::t(1, 2)) + &letter(&t3, Gen::t(1, 3)))));
    eprintln!("insertion checks took {:?}", started.elapsed());
}

#[test]
fn non_morphisms_are_rejected() {
    let src = t_g(1, 1, 3).unwrap();
    let tgt = t_g(2, 1, 3).unwrap();
    let mut images: Vec<LieElement> = src.gens.iter().map(|_| LieElement::new()).collect();
    // x ↦ x^1, y ↦ y^2 does not kill [x,y] + 0·t.
    images[0] = letter(&tgt, Gen::X(1, 1));
    images[1] = letter(&tgt, Gen::Y(1, 2));
    assert!(matches!(
        LieMorphism::new(&src, &tgt, images),
        Err(LieError::RelationNotPreserved { .. })
    ));
}

fn random_element(p: &PresentedLie, w: usize, coeffs: &[i64]) -> LieElement {
    let mut e = LieElement::new();
    for (x, c) in p.free.basis(w).iter().zip(coeffs) {
        e.add(x.clone(), qi(*c));
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quotient_bracket_is_antisymmetric_and_jacobi(
        a in prop::collection::vec(-3i64..4, 8),
        b in prop::collection::vec(-3i64..4, 8),
        c in prop::collection::vec(-3i64..4, 8),
    ) {
        let p = t_g(2, 1, 3).unwrap();
        let (x, y, z) = (random_element(&p, 1, &a), random_element(&p, 1, &b), random_element(&p, 1, &c));
        let xy = p.bracket(&x, &y).unwrap();
        prop_assert!((&xy + &p.bracket(&y, &x).unwrap()).is_zero());
        let j = &(&p.bracket(&x, &p.bracket(&y, &z).unwrap()).unwrap()
            + &p.bracket(&y, &p.bracket(&z, &x).unwrap()).unwrap())
            + &p.bracket(&z, &xy).unwrap();
        prop_assert!(p.is_zero(&j));
    }

    #[test]
    fn bracket_is_independent_of_representatives(
        a in prop::collection::vec(-3i64..4, 8),
        b in prop::collection::vec(-3i64..4, 40),
    ) {
        let p = t_g(2, 1, 3).unwrap();
        let x = random_element(&p, 1, &a);
        let y = random_element(&p, 2, &b);
        // Shift y by an ideal element.
        let mut shifted = y.clone();
        for r in p.relations.iter().filter(|r| p.free.weight_of(r) == Some(2)) {
            shifted.add_scaled(r, &qi(b[0]));
        }
        prop_assert_eq!(p.bracket(&x, &y).unwrap(), p.bracket(&x, &shifted).unwrap());
        prop_assert_eq!(p.bracket(&x, &y).unwrap(), p.bracket(&x, &p.reduce(&y)).unwrap());
    }
}

#[test]
fn separation_relations_are_redundant_only_in_higher_genus() {
    use gcg::lie::t_g_presented;
    let with = t_g_presented(3, 2, 3, true).unwrap();
    let without = t_g_presented(3, 2, 3, false).unwrap();
    assert_eq!(with.dims, without.dims);
    let with = t_g_presented(3, 1, 3, true).unwrap();
    let without = t_g_presented(3, 1, 3, false).unwrap();
    assert_eq!(without.dim(3), with.dim(3) + 2);
    let x3 = without.gen(Gen::X(1, 3));
    assert!(!without.bracket(&x3, &without.gen(Gen::t(1, 2))).unwrap().is_zero());
    let s = without.bracket(&x3, &without.gen(Gen::t(1, 2))).unwrap();
    let x1 = without.gen(Gen::X(1, 1));
    assert_eq!(s, without.bracket(&x1, &without.gen(Gen::t(2, 3))).unwrap());
}

#[test]
fn graded_engine_agrees_with_saturation() {
    use gcg::lie::{t_bv_presentation, t_g_presentation, t_nonframed_presentation, GradedLie};
    let cases = [
        (t_g_presentation(1, 1, true).unwrap(), 5),
        (t_g_presentation(2, 1, true).unwrap(), 4),
        (t_g_presentation(3, 1, false).unwrap(), 4),
        (t_g_presentation(1, 2, true).unwrap(), 4),
        (t_g_presentation(2, 2, true).unwrap(), 3),
        (t_nonframed_presentation(3).unwrap(), 4),
        (t_bv_presentation(3).unwrap(), 4),
    ];
    for (p, w) in &cases {
        let sat = PresentedLie::from_presentation(p, *w).unwrap();
        let nq = GradedLie::new(p, *w).unwrap();
        assert_eq!(sat.dims, nq.dims(), "{}", p.name);
        // Structure constants agree through free representatives.
        let rep = |k: usize, i: usize| nq.representative(&sat.free, k, i).unwrap();
        for w1 in 1..*w {
            for w2 in 1..=(*w - w1) {
                for i in 0..nq.dim(w1) {
                    for j in 0..nq.dim(w2) {
                        let lhs = sat.bracket(&rep(w1, i), &rep(w2, j)).unwrap();
                        let t = nq.bracket(&nq.basis_element(w1, i), &nq.basis_element(w2, j)).unwrap();
                        let mut rhs = LieElement::new();
                        for ((k, l), c) in t.iter() {
                            rhs.add_scaled(&rep(*k, *l), c);
                        }
                        assert_eq!(lhs, sat.reduce(&rhs), "{} ({w1},{i}) ({w2},{j})", p.name);
                    }
                }
            }
        }
        // Letters map consistently.
        for (a, _) in p.gens.iter().enumerate() {
            let img = nq.letter(a);
            let mut rhs = LieElement::new();
            for ((k, l), c) in img.iter() {
                rhs.add_scaled(&rep(*k, *l), c);
            }
            assert_eq!(sat.reduce(&sat.free.letter(a)), sat.reduce(&rhs));
        }
    }
}

#[test]
fn graded_theta_preserves_relations() {
    use gcg::lie::{graded_theta, t_g_presentation, GradedLie};
    for g in [1u8, 2] {
        let w = if g == 1 { 5 } else { 4 };
        let ps: Vec<_> = (1..=3u8).map(|n| GradedLie::new(&t_g_presentation(n, g, true).unwrap(), w).unwrap()).collect();
        for src in &ps {
            for tgt in &ps {
                let (n, m) = (src.n as usize, tgt.n as usize);
                for code in 0..n.pow(m as u32) {
                    let mut c = code;
                    let phi: Vec<u8> = (0..m)
                        .map(|_| {
                            let v = (c % n) as u8 + 1;
                            c /= n;
                            v
                        })
                        .collect();
                    graded_theta(src, tgt, &phi).unwrap_or_else(|e| panic!("{phi:?} {e}"));
                }
            }
        }
        let literal = GradedLie::new(&t_g_presentation(3, g, false).unwrap(), 4).unwrap();
        let r = graded_theta(&ps[1], &literal, &[1, 1, 2]);
        assert_eq!(r.is_ok(), g == 2, "g={g}");
    }
}
