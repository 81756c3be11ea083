//! The equation systems `Z_(g)`, `B_(g)` and `r_(g) = Z_(g)/B_(g)` over
//! weight-truncated `t_(g)(1..3)`, the bracket `{U, V}`, and the explicit
//! families of elements: `sl_2`, tripod derivations, `A_j`/`B_j`, the image
//! of `sp'_0` and Enriquez' `δ_{2n}`.
//!
//! A tuple of weight `w` has components of weight `w + 1` in `t(2)`; its
//! bracket equations live in weight `w + 2` of `t(3)`.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::lie::{
    graded_theta, t_g_presentation, t_nonframed_presentation, Def, Gen, GradedLie, GradedMorphism, LieError, QVec,
};
use crate::linalg::{dense_rank, nullspace_basis, q, qi, Echelon, Rational, SparseMatrix, SparseVec};

#[derive(Debug, Error)]
pub enum GrtError {
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error("tuple is not in Z: equation {equation} fails")]
    NotInZ { equation: String },
    #[error("element {index} of B in weight {weight} violates {equation}")]
    SubspaceViolation { weight: usize, index: usize, equation: String },
    #[error("tuple weight {weight} needs truncation {needed}, have {max}")]
    Truncation { weight: usize, needed: usize, max: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Framed,
    Nonframed,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Framed => "framed",
            Variant::Nonframed => "nonframed",
        })
    }
}

/// A class in `H^1`: `a_l` or `b_l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum H1 {
    A(u8),
    B(u8),
}

impl H1 {
    pub fn all(g: u8) -> Vec<H1> {
        (1..=g).flat_map(|l| [H1::A(l), H1::B(l)]).collect()
    }

    /// Position in the tuple `(a_1, b_1, …, a_g, b_g)`.
    pub fn index(self) -> usize {
        match self {
            H1::A(l) => 2 * (l as usize - 1),
            H1::B(l) => 2 * (l as usize - 1) + 1,
        }
    }

    pub fn from_index(c: usize) -> H1 {
        let l = (c / 2 + 1) as u8;
        if c.is_multiple_of(2) {
            H1::A(l)
        } else {
            H1::B(l)
        }
    }

    pub fn dual(self) -> H1 {
        match self {
            H1::A(l) => H1::B(l),
            H1::B(l) => H1::A(l),
        }
    }

    /// `z^{(k)}_α`: `x_l^{(k)}` for `a_l`, `y_l^{(k)}` for `b_l`.
    pub fn generator(self, point: u8) -> Gen {
        match self {
            H1::A(l) => Gen::X(l, point),
            H1::B(l) => Gen::Y(l, point),
        }
    }

    pub fn name(self) -> String {
        match self {
            H1::A(l) => format!("a{l}"),
            H1::B(l) => format!("b{l}"),
        }
    }
}

/// `⟨a_l, b_l⟩ = −1`, `⟨b_l, a_l⟩ = 1`, zero otherwise.
pub fn pairing(x: H1, y: H1) -> i64 {
    match (x, y) {
        (H1::A(i), H1::B(j)) if i == j => -1,
        (H1::B(i), H1::A(j)) if i == j => 1,
        _ => 0,
    }
}

/// `(U_{a_1}, U_{b_1}, …, U_{a_g}, U_{b_g})` in `t(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationTuple {
    pub g: u8,
    pub weight: usize,
    pub comps: Vec<QVec>,
}

impl DerivationTuple {
    pub fn zero(g: u8, weight: usize) -> Self {
        DerivationTuple {
            g,
            weight,
            comps: vec![QVec::new(); 2 * g as usize],
        }
    }

    pub fn with(mut self, c: H1, v: QVec) -> Self {
        self.comps[c.index()] = v;
        self
    }

    pub fn comp(&self, c: H1) -> &QVec {
        &self.comps[c.index()]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.lin(other, &Rational::one())
    }

    /// `self + c·other`.
    pub fn lin(&self, other: &Self, c: &Rational) -> Self {
        let mut out = self.clone();
        for (a, b) in out.comps.iter_mut().zip(&other.comps) {
            a.add_scaled(b, c);
        }
        out
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        DerivationTuple {
            g: self.g,
            weight: self.weight,
            comps: self.comps.iter().map(|x| x.scaled(c)).collect(),
        }
    }

    /// Coordinates in the concatenated basis of the components.
    pub fn coords(&self, dim: usize) -> SparseVec {
        let mut v = SparseVec::new();
        for (c, x) in self.comps.iter().enumerate() {
            for ((_, i), a) in x.iter() {
                v.insert(c * dim + i, a.clone());
            }
        }
        v
    }
}

/// The algebras `t(1)`, `t(2)`, `t(3)` of one variant, truncated at
/// `max_weight`.
pub struct GrtAlgebras {
    pub g: u8,
    pub variant: Variant,
    pub max_weight: usize,
    pub t1: GradedLie,
    pub t2: GradedLie,
    pub t3: GradedLie,
}

impl GrtAlgebras {
    pub fn new(g: u8, variant: Variant, max_weight: usize) -> Result<Self, GrtError> {
        let pres = |n: u8| match variant {
            Variant::Framed => t_g_presentation(n, g, true),
            Variant::Nonframed if g == 1 => t_nonframed_presentation(n),
            Variant::Nonframed => Err(LieError::Invalid("the non-framed variant needs g = 1".into())),
        };
        Ok(GrtAlgebras {
            g,
            variant,
            max_weight,
            t1: GradedLie::new(&pres(1)?, max_weight)?,
            t2: GradedLie::new(&pres(2)?, max_weight)?,
            t3: GradedLie::new(&pres(3)?, max_weight)?,
        })
    }

    pub fn solver(&self) -> Result<Grt<'_>, GrtError> {
        Grt::new(self)
    }
}

/// One row of the dimension table.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GrtRow {
    pub g: u8,
    pub variant: Variant,
    pub weight: usize,
    pub dim_z: usize,
    pub dim_b: usize,
    pub dim_r: usize,
}

/// A named residual of one defining equation.
#[derive(Clone, Debug)]
pub struct Residual {
    pub equation: String,
    pub value: QVec,
}

/// The degree-zero elements of `sp'(H^*)` that act on `H^1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sp0 {
    /// `α_i ∂_{β_i}`.
    AdB(u8),
    /// `β_i ∂_{α_i}`.
    BdA(u8),
    /// `α_i ∂_{α_j} − β_j ∂_{β_i}`.
    AdA(u8, u8),
    /// `α_i ∂_{β_j} + α_j ∂_{β_i}`, `i < j`.
    AdBSym(u8, u8),
    /// `β_i ∂_{α_j} + β_j ∂_{α_i}`, `i < j`.
    BdASym(u8, u8),
}

impl Sp0 {
    pub fn basis(g: u8) -> Vec<Sp0> {
        let mut out = Vec::new();
        for i in 1..=g {
            out.push(Sp0::AdB(i));
            out.push(Sp0::BdA(i));
        }
        for i in 1..=g {
            for j in 1..=g {
                out.push(Sp0::AdA(i, j));
            }
        }
        for i in 1..=g {
            for j in i + 1..=g {
                out.push(Sp0::AdBSym(i, j));
                out.push(Sp0::BdASym(i, j));
            }
        }
        out
    }

    /// Terms `(X, Y, c)` of `Σ c·X∂_Y`; `X∂_Y` sends `Y` to `X`.
    pub fn terms(self) -> Vec<(H1, H1, i64)> {
        use H1::{A, B};
        match self {
            Sp0::AdB(i) => vec![(A(i), B(i), 1)],
            Sp0::BdA(i) => vec![(B(i), A(i), 1)],
            Sp0::AdA(i, j) => vec![(A(i), A(j), 1), (B(j), B(i), -1)],
            Sp0::AdBSym(i, j) => vec![(A(i), B(j), 1), (A(j), B(i), 1)],
            Sp0::BdASym(i, j) => vec![(B(i), A(j), 1), (B(j), A(i), 1)],
        }
    }

    /// The matrix on `H^1` in the tuple order, `m[target][source]`.
    pub fn matrix(self, g: u8) -> Vec<Vec<i64>> {
        let n = 2 * g as usize;
        let mut m = vec![vec![0; n]; n];
        for (x, y, c) in self.terms() {
            m[x.index()][y.index()] += c;
        }
        m
    }

    pub fn name(self) -> String {
        match self {
            Sp0::AdB(i) => format!("alpha{i} d beta{i}"),
            Sp0::BdA(i) => format!("beta{i} d alpha{i}"),
            Sp0::AdA(i, j) => format!("alpha{i} d alpha{j} - beta{j} d beta{i}"),
            Sp0::AdBSym(i, j) => format!("alpha{i} d beta{j} + alpha{j} d beta{i}"),
            Sp0::BdASym(i, j) => format!("beta{i} d alpha{j} + beta{j} d alpha{i}"),
        }
    }
}

/// Solver bound to one [`GrtAlgebras`].
pub struct Grt<'a> {
    pub alg: &'a GrtAlgebras,
    coproduct: GradedMorphism<'a>,
    swap: GradedMorphism<'a>,
    p1_23: GradedMorphism<'a>,
    p2_13: GradedMorphism<'a>,
    p12_3: GradedMorphism<'a>,
    p3_12: GradedMorphism<'a>,
    coproduct_images: RefCell<HashMap<usize, Echelon>>,
}

type Key = (u8, u16, u16);

impl<'a> Grt<'a> {
    fn new(alg: &'a GrtAlgebras) -> Result<Self, GrtError> {
        Ok(Grt {
            alg,
            coproduct: graded_theta(&alg.t1, &alg.t2, &[1, 1])?,
            swap: graded_theta(&alg.t2, &alg.t2, &[2, 1])?,
            p1_23: graded_theta(&alg.t2, &alg.t3, &[1, 2, 2])?,
            p2_13: graded_theta(&alg.t2, &alg.t3, &[2, 1, 2])?,
            p12_3: graded_theta(&alg.t2, &alg.t3, &[1, 1, 2])?,
            p3_12: graded_theta(&alg.t2, &alg.t3, &[2, 2, 1])?,
            coproduct_images: RefCell::new(HashMap::new()),
        })
    }

    pub fn g(&self) -> u8 {
        self.alg.g
    }

    fn check_weight(&self, w: usize) -> Result<(), GrtError> {
        if w + 2 > self.alg.max_weight {
            return Err(GrtError::Truncation {
                weight: w,
                needed: w + 2,
                max: self.alg.max_weight,
            });
        }
        Ok(())
    }

    /// `u ↦ u^{12}`, `t(1) → t(2)`.
    pub fn coproduct(&self, u: &QVec) -> Result<QVec, GrtError> {
        Ok(self.coproduct.apply(u)?)
    }

    /// `U^{2,1}`.
    pub fn swap(&self, u: &QVec) -> Result<QVec, GrtError> {
        Ok(self.swap.apply(u)?)
    }

    /// `U^{1,23}`, `U^{2,13}`, `U^{12,3}`, `U^{3,12}`.
    pub fn to_arity3(&self, u: &QVec) -> Result<[QVec; 4], GrtError> {
        Ok([
            self.p1_23.apply(u)?,
            self.p2_13.apply(u)?,
            self.p12_3.apply(u)?,
            self.p3_12.apply(u)?,
        ])
    }

    pub fn symmetrization(&self, u: &QVec) -> Result<QVec, GrtError> {
        Ok(u + &self.swap(u)?)
    }

    /// `U^{12,3} − U^{1,23} − U^{2,13}`.
    pub fn cocycle(&self, u: &QVec) -> Result<QVec, GrtError> {
        let [a, b, c, _] = self.to_arity3(u)?;
        Ok(&(&c - &a) - &b)
    }

    /// `U^{1,23} + U^{2,13} + U^{3,12}`.
    pub fn cyclic(&self, u: &QVec) -> Result<QVec, GrtError> {
        let [a, b, _, d] = self.to_arity3(u)?;
        Ok(&(&a + &b) + &d)
    }

    fn image_echelon(&self, w: usize) -> Result<(), GrtError> {
        if self.coproduct_images.borrow().contains_key(&w) {
            return Ok(());
        }
        let mut ech = Echelon::new();
        for i in 0..self.alg.t1.dim(w) {
            let img = self.coproduct(&self.alg.t1.basis_element(w, i))?;
            ech.insert(&qvec_coords(&img));
        }
        self.coproduct_images.borrow_mut().insert(w, ech);
        Ok(())
    }

    /// The part of the symmetrization outside the image of `u ↦ u^{12}`.
    pub fn symmetrization_defect(&self, u: &QVec, w: usize) -> Result<QVec, GrtError> {
        let s = self.symmetrization(u)?;
        self.image_echelon(w)?;
        let map = self.coproduct_images.borrow();
        let mut out = QVec::new();
        for (i, c) in map[&w].reduce(&qvec_coords(&s)) {
            out.add((w, i), c);
        }
        Ok(out)
    }

    fn t3_gen(&self, x: H1, point: u8) -> QVec {
        self.alg.t3.gen(x.generator(point))
    }

    /// The four bracket families, keyed by `(family, i, j)`.
    fn bracket_equations(&self, u: &DerivationTuple) -> Result<Vec<(Key, String, QVec)>, GrtError> {
        let t3 = &self.alg.t3;
        let g = self.g();
        let mut p1 = Vec::new();
        let mut p2 = Vec::new();
        for c in &u.comps {
            p1.push(self.p1_23.apply(c)?);
            p2.push(self.p2_13.apply(c)?);
        }
        let a = |i: u8| H1::A(i).index();
        let b = |i: u8| H1::B(i).index();
        let br = |x: &QVec, y: &QVec| t3.bracket(x, y);
        let mut out = Vec::new();
        for i in 1..=g {
            for j in 1..=g {
                let r = &br(&p1[a(i)], &self.t3_gen(H1::B(j), 2))? - &br(&p2[b(j)], &self.t3_gen(H1::A(i), 1))?;
                out.push(((3, i as u16, j as u16), format!("[U_a{i}^(1,23),y{j}^(2)]-[U_b{j}^(2,13),x{i}^(1)]"), r));
            }
        }
        for i in 1..=g {
            for j in i..=g {
                let r = &br(&p1[a(i)], &self.t3_gen(H1::A(j), 2))? - &br(&p2[a(j)], &self.t3_gen(H1::A(i), 1))?;
                out.push(((4, i as u16, j as u16), format!("[U_a{i}^(1,23),x{j}^(2)]-[U_a{j}^(2,13),x{i}^(1)]"), r));
                let r = &br(&p1[b(i)], &self.t3_gen(H1::B(j), 2))? - &br(&p2[b(j)], &self.t3_gen(H1::B(i), 1))?;
                out.push(((5, i as u16, j as u16), format!("[U_b{i}^(1,23),y{j}^(2)]-[U_b{j}^(2,13),y{i}^(1)]"), r));
            }
        }
        let mut s = QVec::new();
        for i in 1..=g {
            s = &s + &br(&p1[a(i)], &self.t3_gen(H1::B(i), 1))?;
            s = &s - &br(&p1[b(i)], &self.t3_gen(H1::A(i), 1))?;
        }
        out.push(((6, 0, 0), "sum_i [U_ai^(1,23),y_i^(1)]-[U_bi^(1,23),x_i^(1)]".into(), s));
        Ok(out)
    }

    fn check_tuple(&self, u: &DerivationTuple) -> Result<(), GrtError> {
        if u.g != self.g() || u.comps.len() != 2 * self.g() as usize {
            return Err(GrtError::Invalid("tuple genus does not match".into()));
        }
        for c in &u.comps {
            if let Some(w) = self.alg.t2.weight_of(c) {
                if w != u.weight + 1 || c.iter().any(|((k, _), _)| *k != w) {
                    return Err(GrtError::Invalid("components must be homogeneous of weight w+1".into()));
                }
            }
        }
        self.check_weight(u.weight)
    }

    /// All defining equations of `Z_(g)` (or `Z^{non-fr}_(1)`), with the
    /// existence of `u_α` evaluated as membership of the symmetrization in
    /// the image of `u ↦ u^{12}`.
    pub fn zg_residuals(&self, u: &DerivationTuple) -> Result<Vec<Residual>, GrtError> {
        self.check_tuple(u)?;
        let mut out = Vec::new();
        for (c, x) in u.comps.iter().enumerate() {
            let n = H1::from_index(c).name();
            out.push(Residual {
                equation: format!("U_{n}^(1,2)+U_{n}^(2,1) in image of u -> u^(12)"),
                value: self.symmetrization_defect(x, u.weight + 1)?,
            });
            out.push(Residual {
                equation: format!("U_{n}^(12,3)-U_{n}^(1,23)-U_{n}^(2,13)"),
                value: self.cocycle(x)?,
            });
        }
        for (_, name, value) in self.bracket_equations(u)? {
            out.push(Residual { equation: name, value });
        }
        Ok(out)
    }

    /// The defining equations of `r_ell` (non-framed, `g = 1`): the cyclic
    /// relation for both components and the four bracket equations.
    pub fn rell_residuals(&self, u: &DerivationTuple) -> Result<Vec<Residual>, GrtError> {
        if self.alg.variant != Variant::Nonframed {
            return Err(GrtError::Invalid("r_ell lives in the non-framed variant".into()));
        }
        self.check_tuple(u)?;
        let mut out = Vec::new();
        for (c, x) in u.comps.iter().enumerate() {
            let n = H1::from_index(c).name();
            out.push(Residual {
                equation: format!("U_{n}^(1,23)+U_{n}^(2,13)+U_{n}^(3,12)"),
                value: self.cyclic(x)?,
            });
        }
        for (_, name, value) in self.bracket_equations(u)? {
            out.push(Residual { equation: name, value });
        }
        Ok(out)
    }

    pub fn in_z(&self, u: &DerivationTuple) -> Result<bool, GrtError> {
        Ok(self.zg_residuals(u)?.iter().all(|r| r.value.is_zero()))
    }

    fn first_failure(&self, u: &DerivationTuple) -> Result<Option<String>, GrtError> {
        Ok(self.zg_residuals(u)?.into_iter().find(|r| !r.value.is_zero()).map(|r| r.equation))
    }

    /// Basis of the weight-`w` piece of `Z`: nullspace of the stacked
    /// equations over the coordinates of the tuple and of `u`.
    pub fn zg_solve(&self, w: usize) -> Result<Vec<DerivationTuple>, GrtError> {
        self.check_weight(w)?;
        let (t1, t2) = (&self.alg.t1, &self.alg.t2);
        let n = 2 * self.g() as usize;
        let d2 = t2.dim(w + 1);
        let d1 = t1.dim(w + 1);
        let cols = n * d2 + n * d1;
        if d2 == 0 {
            return Ok(Vec::new());
        }
        let mut rows: HashMap<(Key, (usize, usize)), usize> = HashMap::new();
        let mut trip = Vec::new();
        let mut push = |key: Key, v: &QVec, col: usize, trip: &mut Vec<(usize, usize, Rational)>| {
            for (k, c) in v.iter() {
                let len = rows.len();
                let r = *rows.entry((key, *k)).or_insert(len);
                trip.push((r, col, c.clone()));
            }
        };
        for c in 0..n {
            for k in 0..d2 {
                let col = c * d2 + k;
                let e = t2.basis_element(w + 1, k);
                push((1, c as u16, 0), &self.symmetrization(&e)?, col, &mut trip);
                push((2, c as u16, 0), &self.cocycle(&e)?, col, &mut trip);
                let tuple = DerivationTuple::zero(self.g(), w).with(H1::from_index(c), e);
                for (key, _, v) in self.bracket_equations(&tuple)? {
                    push(key, &v, col, &mut trip);
                }
            }
            for k in 0..d1 {
                let col = n * d2 + c * d1 + k;
                let img = self.coproduct(&t1.basis_element(w + 1, k))?;
                push((1, c as u16, 0), &img.scaled(&qi(-1)), col, &mut trip);
            }
        }
        let m = SparseMatrix::from_triplets(rows.len(), cols, trip)
            .map_err(|e| GrtError::Invalid(e.to_string()))?;
        let mut ech = Echelon::new();
        let mut out = Vec::new();
        for v in nullspace_basis(&m) {
            let mut coords = SparseVec::new();
            for (i, x) in v.iter().enumerate().take(n * d2) {
                if !x.is_zero() {
                    coords.insert(i, x.clone());
                }
            }
            if coords.is_empty() || !ech.insert(&coords) {
                continue;
            }
            out.push(self.tuple_from_coords(w, &coords));
        }
        Ok(canonical_basis(self, w, out))
    }

    fn tuple_from_coords(&self, w: usize, v: &SparseVec) -> DerivationTuple {
        let d2 = self.alg.t2.dim(w + 1);
        let mut t = DerivationTuple::zero(self.g(), w);
        for (i, c) in v {
            t.comps[i / d2].add((w + 1, i % d2), c.clone());
        }
        t
    }

    /// `v ↦ ([v^{12}, x_i^{(1)}], [v^{12}, y_i^{(1)}])_i` for `v` of weight `w`.
    pub fn b_image(&self, v: &QVec, w: usize) -> Result<DerivationTuple, GrtError> {
        let t2 = &self.alg.t2;
        let v12 = self.coproduct(v)?;
        let mut t = DerivationTuple::zero(self.g(), w);
        for c in H1::all(self.g()) {
            t.comps[c.index()] = t2.bracket(&v12, &t2.gen(c.generator(1)))?;
        }
        Ok(t)
    }

    /// Basis of the weight-`w` piece of `B`.
    pub fn bg_basis(&self, w: usize) -> Result<Vec<DerivationTuple>, GrtError> {
        if w + 1 > self.alg.max_weight {
            return Err(GrtError::Truncation {
                weight: w,
                needed: w + 1,
                max: self.alg.max_weight,
            });
        }
        let d2 = self.alg.t2.dim(w + 1);
        let mut ech = Echelon::new();
        let mut out = Vec::new();
        for i in 0..self.alg.t1.dim(w) {
            let t = self.b_image(&self.alg.t1.basis_element(w, i), w)?;
            if ech.insert(&t.coords(d2)) {
                out.push(t);
            }
        }
        Ok(canonical_basis(self, w, out))
    }

    /// `dim Z − dim B`, after checking `B ⊆ Z`.
    pub fn table_row(&self, w: usize) -> Result<GrtRow, GrtError> {
        let z = self.zg_solve(w)?;
        let b = self.bg_basis(w)?;
        for (index, x) in b.iter().enumerate() {
            if let Some(equation) = self.first_failure(x)? {
                return Err(GrtError::SubspaceViolation { weight: w, index, equation });
            }
        }
        Ok(GrtRow {
            g: self.g(),
            variant: self.alg.variant,
            weight: w,
            dim_z: z.len(),
            dim_b: b.len(),
            dim_r: z.len() - b.len(),
        })
    }

    pub fn rg_dim(&self, w: usize) -> Result<usize, GrtError> {
        Ok(self.table_row(w)?.dim_r)
    }

    /// Whether `x` lies in the span of `basis` (tuples of the same weight).
    pub fn in_span(&self, x: &DerivationTuple, basis: &[DerivationTuple]) -> bool {
        let d2 = self.alg.t2.dim(x.weight + 1);
        let mut ech = Echelon::new();
        for b in basis {
            ech.insert(&b.coords(d2));
        }
        ech.contains(&x.coords(d2))
    }

    /// Value of the `S_2`-equivariant derivation of `t(2)` induced by `u` on
    /// `e`: `x_i^{(1)} ↦ U_{a_i}`, `x_i^{(2)} ↦ U_{a_i}^{2,1}`, `t ↦ 0`.
    pub fn derive(&self, u: &DerivationTuple, e: &QVec) -> Result<QVec, GrtError> {
        let t2 = &self.alg.t2;
        let mut letter_images = Vec::with_capacity(t2.gens.len());
        for g in &t2.gens {
            letter_images.push(match *g {
                Gen::X(l, 1) => u.comp(H1::A(l)).clone(),
                Gen::Y(l, 1) => u.comp(H1::B(l)).clone(),
                Gen::X(l, _) => self.swap(u.comp(H1::A(l)))?,
                Gen::Y(l, _) => self.swap(u.comp(H1::B(l)))?,
                Gen::T(..) => QVec::new(),
            });
        }
        let mut memo = HashMap::new();
        let mut out = QVec::new();
        for ((w, i), c) in e.iter() {
            out.add_scaled(&self.derive_basis(&letter_images, *w, *i, &mut memo)?, c);
        }
        Ok(out)
    }

    fn derive_basis(
        &self,
        images: &[QVec],
        w: usize,
        i: usize,
        memo: &mut HashMap<(usize, usize), QVec>,
    ) -> Result<QVec, GrtError> {
        if let Some(x) = memo.get(&(w, i)) {
            return Ok(x.clone());
        }
        let t2 = &self.alg.t2;
        let x = match t2.basis_defs(w)[i] {
            Def::Letter(a) => images[a].clone(),
            Def::Bracket(a, j) => {
                let wj = w - t2.weights[a];
                let inner = t2.basis_element(wj, j);
                let d_inner = self.derive_basis(images, wj, j, memo)?;
                let mut s = QVec::new();
                if !images[a].is_zero() {
                    s = t2.bracket(&images[a], &inner)?;
                }
                if !d_inner.is_zero() {
                    s = &s + &t2.bracket(&t2.letter(a), &d_inner)?;
                }
                s
            }
        };
        memo.insert((w, i), x.clone());
        Ok(x)
    }

    /// `{U, V}_c = U(V_c) − V(U_c)`; both arguments must lie in `Z`.
    pub fn grt_bracket(&self, u: &DerivationTuple, v: &DerivationTuple) -> Result<DerivationTuple, GrtError> {
        for x in [u, v] {
            if let Some(equation) = self.first_failure(x)? {
                return Err(GrtError::NotInZ { equation });
            }
        }
        self.bracket_unchecked(u, v)
    }

    /// The commutator of induced derivations without membership checks.
    pub fn bracket_unchecked(&self, u: &DerivationTuple, v: &DerivationTuple) -> Result<DerivationTuple, GrtError> {
        let mut out = DerivationTuple::zero(self.g(), u.weight + v.weight);
        for c in 0..out.comps.len() {
            out.comps[c] = &self.derive(u, &v.comps[c])? - &self.derive(v, &u.comps[c])?;
        }
        Ok(out)
    }

    fn gen2(&self, x: H1) -> QVec {
        self.alg.t2.gen(x.generator(1))
    }

    /// `H = (x^{(1)}, −y^{(1)})`, `E = (0, x^{(1)})`, `F = (y^{(1)}, 0)` for `g = 1`.
    pub fn sl2(&self) -> Result<[DerivationTuple; 3], GrtError> {
        if self.g() != 1 {
            return Err(GrtError::Invalid("sl2 triple is defined for g = 1".into()));
        }
        let (a, b) = (H1::A(1), H1::B(1));
        let x = self.gen2(a);
        let y = self.gen2(b);
        let z = DerivationTuple::zero(1, 0);
        Ok([
            z.clone().with(a, x.clone()).with(b, y.scaled(&qi(-1))),
            z.clone().with(b, x),
            z.with(a, y),
        ])
    }

    /// The tripod derivation `V_{α,β,γ}` (weight 1).
    pub fn tripod(&self, al: H1, be: H1, ga: H1) -> Result<DerivationTuple, GrtError> {
        if al == be || be == ga || al == ga {
            return Err(GrtError::Invalid("tripod classes must be distinct".into()));
        }
        let t2 = &self.alg.t2;
        let t11 = t2.gen(Gen::T(1, 1));
        let entry = |p: H1, q: H1| -> Result<QVec, GrtError> {
            let mut e = t2.bracket(&self.gen2(p), &self.gen2(q))?;
            e.add_scaled(&t11, &qi(2 * pairing(p, q)));
            Ok(e)
        };
        let mut t = DerivationTuple::zero(self.g(), 1);
        let mut put = |c: H1, v: QVec| t.comps[c.index()].add_scaled(&v, &qi(1));
        put(al.dual(), entry(be, ga)?.scaled(&qi(-pairing(al, al.dual()))));
        put(be.dual(), entry(al, ga)?.scaled(&qi(pairing(be, be.dual()))));
        put(ga.dual(), entry(al, be)?.scaled(&qi(-pairing(ga, ga.dual()))));
        Ok(t)
    }

    /// `A_j = Σ_{i≠j} V_{a_i,b_i,a_j}`.
    pub fn a_j(&self, j: u8) -> Result<DerivationTuple, GrtError> {
        self.tripod_sum(j, H1::A(j))
    }

    /// `B_j = Σ_{i≠j} V_{a_i,b_i,b_j}`.
    pub fn b_j(&self, j: u8) -> Result<DerivationTuple, GrtError> {
        self.tripod_sum(j, H1::B(j))
    }

    fn tripod_sum(&self, j: u8, ga: H1) -> Result<DerivationTuple, GrtError> {
        let mut t = DerivationTuple::zero(self.g(), 1);
        for i in (1..=self.g()).filter(|&i| i != j) {
            t = t.add(&self.tripod(H1::A(i), H1::B(i), ga)?);
        }
        Ok(t)
    }

    /// Image of a degree-zero `sp'` element: `X∂_Y` contributes `z_X^{(1)}`
    /// to the component `Y`.
    pub fn sp0_image(&self, s: Sp0) -> DerivationTuple {
        let mut t = DerivationTuple::zero(self.g(), 0);
        for (x, y, c) in s.terms() {
            t.comps[y.index()].add_scaled(&self.gen2(x), &qi(c));
        }
        t
    }

    /// The weight-0 tuple of a linear map on `H^1` given as `m[target][source]`.
    pub fn linear_tuple(&self, m: &[Vec<Rational>]) -> DerivationTuple {
        let mut t = DerivationTuple::zero(self.g(), 0);
        for (x, row) in m.iter().enumerate() {
            for (y, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    t.comps[y].add_scaled(&self.gen2(H1::from_index(x)), c);
                }
            }
        }
        t
    }

    /// Enriquez' `δ_{2n}` promoted along `x ↦ x^{(1)}`, `y ↦ y^{(1)}`:
    /// `δ(x) = ad_x^{2n+2}(y)` and
    /// `δ(y) = ½ Σ_{p+q=2n+1} (−1)^p [ad_x^p(y), ad_x^q(y)]`.
    pub fn delta_2n(&self, n: usize) -> Result<DerivationTuple, GrtError> {
        if self.alg.variant != Variant::Nonframed {
            return Err(GrtError::Invalid("δ_{2n} lives in the non-framed variant".into()));
        }
        let t2 = &self.alg.t2;
        let x = self.gen2(H1::A(1));
        let y = self.gen2(H1::B(1));
        let mut ad = vec![y.clone()];
        for _ in 0..2 * n + 2 {
            let last = ad.last().cloned().unwrap_or_default();
            ad.push(t2.bracket(&x, &last)?);
        }
        let ua = ad[2 * n + 2].clone();
        let mut ub = QVec::new();
        for p in 0..=2 * n + 1 {
            let qq = 2 * n + 1 - p;
            let sign = if p % 2 == 0 { q(1, 2) } else { q(-1, 2) };
            ub.add_scaled(&t2.bracket(&ad[p], &ad[qq])?, &sign);
        }
        Ok(DerivationTuple::zero(1, 2 * n + 2).with(H1::A(1), ua).with(H1::B(1), ub))
    }
}

fn qvec_coords(v: &QVec) -> SparseVec {
    v.iter().map(|((_, i), c)| (*i, c.clone())).collect()
}

/// Reduced echelon basis of the span, so outputs do not depend on the
/// order in which vectors were found.
fn canonical_basis(grt: &Grt<'_>, w: usize, xs: Vec<DerivationTuple>) -> Vec<DerivationTuple> {
    let d2 = grt.alg.t2.dim(w + 1);
    let mut ech = Echelon::new();
    for x in &xs {
        ech.insert(&x.coords(d2));
    }
    let mut rows: Vec<SparseVec> = ech.rows().to_vec();
    rows.sort_by_key(|r| r.keys().next().copied());
    rows.iter().map(|r| grt.tuple_from_coords(w, r)).collect()
}

/// Dimension of `Z` in weight `w` from an independently assembled dense
/// system. The coproducts into `t(3)` are computed from `U^{1,23}` and point
/// relabellings, and the existential condition is eliminated by a rank
/// count instead of a nullspace projection.
pub fn zg_dim_dense(alg: &GrtAlgebras, w: usize) -> Result<usize, GrtError> {
    if w + 2 > alg.max_weight {
        return Err(GrtError::Truncation { weight: w, needed: w + 2, max: alg.max_weight });
    }
    let (t1, t2, t3) = (&alg.t1, &alg.t2, &alg.t3);
    let g = alg.g;
    let n = 2 * g as usize;
    let d2 = t2.dim(w + 1);
    let d1 = t1.dim(w + 1);
    if d2 == 0 {
        return Ok(0);
    }
    // Letter images of the maps, evaluated by a private recursion.
    let sum = |alg: &GradedLie, gens: &[Gen]| -> QVec {
        let mut e = QVec::new();
        for &x in gens {
            e.add_scaled(&alg.gen(x), &qi(1));
        }
        e
    };
    let relabel = |x: Gen, perm: &[u8]| -> Gen {
        match x {
            Gen::X(l, i) => Gen::X(l, perm[i as usize - 1]),
            Gen::Y(l, i) => Gen::Y(l, perm[i as usize - 1]),
            Gen::T(i, j) => Gen::t(perm[i as usize - 1], perm[j as usize - 1]),
        }
    };
    let p1_23: Vec<QVec> = t2
        .gens
        .iter()
        .map(|&x| match x {
            Gen::X(l, 1) => sum(t3, &[Gen::X(l, 1)]),
            Gen::Y(l, 1) => sum(t3, &[Gen::Y(l, 1)]),
            Gen::X(l, _) => sum(t3, &[Gen::X(l, 2), Gen::X(l, 3)]),
            Gen::Y(l, _) => sum(t3, &[Gen::Y(l, 2), Gen::Y(l, 3)]),
            Gen::T(1, 1) => sum(t3, &[Gen::T(1, 1)]),
            Gen::T(1, _) => sum(t3, &[Gen::T(1, 2), Gen::T(1, 3)]),
            Gen::T(..) => sum(t3, &[Gen::T(2, 2), Gen::T(2, 3), Gen::T(3, 3)]),
        })
        .collect();
    let swap2: Vec<QVec> = t2.gens.iter().map(|&x| t2.gen(relabel(x, &[2, 1]))).collect();
    let co: Vec<QVec> = t1
        .gens
        .iter()
        .map(|&x| match x {
            Gen::X(l, _) => sum(t2, &[Gen::X(l, 1), Gen::X(l, 2)]),
            Gen::Y(l, _) => sum(t2, &[Gen::Y(l, 1), Gen::Y(l, 2)]),
            Gen::T(..) => sum(t2, &[Gen::T(1, 1), Gen::T(1, 2), Gen::T(2, 2)]),
        })
        .collect();
    let eval = |src: &GradedLie, dst: &GradedLie, images: &[QVec], e: &QVec| -> Result<QVec, LieError> {
        fn go(src: &GradedLie, dst: &GradedLie, images: &[QVec], w: usize, i: usize) -> Result<QVec, LieError> {
            match src.basis_defs(w)[i] {
                Def::Letter(a) => Ok(images[a].clone()),
                Def::Bracket(a, j) => dst.bracket(&images[a], &go(src, dst, images, w - src.weights[a], j)?),
            }
        }
        let mut out = QVec::new();
        for ((w, i), c) in e.iter() {
            out.add_scaled(&go(src, dst, images, *w, *i)?, c);
        }
        Ok(out)
    };
    // σ on t(3) with points (1,2,3) ↦ (3,1,2), and the swap of points 1, 2.
    let rot: Vec<QVec> = t3.gens.iter().map(|&x| t3.gen(relabel(x, &[3, 1, 2]))).collect();
    let sw3: Vec<QVec> = t3.gens.iter().map(|&x| t3.gen(relabel(x, &[2, 1, 3]))).collect();
    let mut rows: BTreeMap<(Key, (usize, usize)), BTreeMap<usize, Rational>> = BTreeMap::new();
    let mut put = |key: Key, v: &QVec, col: usize| {
        for (k, c) in v.iter() {
            *rows.entry((key, *k)).or_default().entry(col).or_insert_with(Rational::zero) += c;
        }
    };
    let zgen = |x: H1, p: u8| t3.gen(x.generator(p));
    for c in 0..n {
        let hc = H1::from_index(c);
        for k in 0..d2 {
            let col = c * d2 + k;
            let e = t2.basis_element(w + 1, k);
            let sym = &e + &eval(t2, t2, &swap2, &e)?;
            put((1, c as u16, 0), &sym, col);
            let a = eval(t2, t3, &p1_23, &e)?;
            let b = eval(t3, t3, &sw3, &a)?;
            let cc = eval(t3, t3, &rot, &eval(t2, t3, &p1_23, &eval(t2, t2, &swap2, &e)?)?)?;
            put((2, c as u16, 0), &(&(&cc - &a) - &b), col);
            for i in 1..=g {
                for j in 1..=g {
                    if hc == H1::A(i) {
                        put((3, i as u16, j as u16), &t3.bracket(&a, &zgen(H1::B(j), 2))?, col);
                    }
                    if hc == H1::B(j) {
                        put((3, i as u16, j as u16), &t3.bracket(&b, &zgen(H1::A(i), 1))?.scaled(&qi(-1)), col);
                    }
                }
                for j in i..=g {
                    for (fam, x) in [(4u8, H1::A(i)), (5, H1::B(i))] {
                        let xj = match x {
                            H1::A(_) => H1::A(j),
                            H1::B(_) => H1::B(j),
                        };
                        if hc == x {
                            put((fam, i as u16, j as u16), &t3.bracket(&a, &zgen(xj, 2))?, col);
                        }
                        if hc == xj {
                            put((fam, i as u16, j as u16), &t3.bracket(&b, &zgen(x, 1))?.scaled(&qi(-1)), col);
                        }
                    }
                }
                if hc == H1::A(i) {
                    put((6, 0, 0), &t3.bracket(&a, &zgen(H1::B(i), 1))?, col);
                }
                if hc == H1::B(i) {
                    put((6, 0, 0), &t3.bracket(&a, &zgen(H1::A(i), 1))?.scaled(&qi(-1)), col);
                }
            }
        }
        for k in 0..d1 {
            let col = n * d2 + c * d1 + k;
            put((1, c as u16, 0), &eval(t1, t2, &co, &t1.basis_element(w + 1, k))?.scaled(&qi(-1)), col);
        }
    }
    let total = n * d2 + n * d1;
    let dense: Vec<Vec<Rational>> = rows
        .values()
        .map(|r| {
            let mut row = vec![Rational::zero(); total];
            for (k, c) in r {
                row[*k] = c.clone();
            }
            row
        })
        .collect();
    // Columns of u alone: the coproduct block.
    let co_block: Vec<Vec<Rational>> = dense.iter().map(|r| r[n * d2..].to_vec()).collect();
    let kernel_full = total - if dense.is_empty() { 0 } else { dense_rank(&dense) };
    let kernel_u = n * d1 - if co_block.is_empty() { 0 } else { dense_rank(&co_block) };
    Ok(kernel_full - kernel_u)
}
