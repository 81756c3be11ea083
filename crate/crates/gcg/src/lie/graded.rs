//! Graded nilpotent quotient. Each weight piece is computed as the span of
//! the letters of that weight and the brackets `[a, e]` of letters with
//! lower basis elements, modulo antisymmetry, Jacobi and the relations.
//! Only quotient-sized spaces are ever formed.

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::One;

use super::{standard_factorization, FreeLie, witt_dimension, Gen, LieElement, LieError, Presentation, WeightDims, Word};
use crate::graph::LinComb;
use crate::linalg::{axpy, qi, Echelon, Rational, SparseVec};

/// Element of a graded quotient, keyed by `(weight, basis index)`.
pub type QVec = LinComb<(usize, usize)>;

/// How a basis element was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Def {
    Letter(usize),
    /// `[a, e]` with `e` the given basis element of weight `w - |a|`.
    Bracket(usize, usize),
}

#[derive(Clone, Debug)]
pub struct GradedLie {
    pub name: String,
    pub n: u8,
    pub g: u8,
    pub gens: Vec<Gen>,
    pub names: Vec<String>,
    pub weights: Vec<usize>,
    pub max_weight: usize,
    pub relations: Vec<LieElement>,
    basis: Vec<Vec<Def>>,
    letters: Vec<QVec>,
    table: HashMap<(usize, usize, usize, usize), SparseVec>,
}

/// Weight-`w` symbols and their column indices.
struct Symbols {
    index: HashMap<Def, usize>,
    defs: Vec<Def>,
}

impl GradedLie {
    pub fn new(p: &Presentation, max_weight: usize) -> Result<GradedLie, LieError> {
        let mut q = GradedLie {
            name: p.name.clone(),
            n: p.n,
            g: p.g,
            gens: p.gens.clone(),
            names: p.names.clone(),
            weights: p.weights.clone(),
            max_weight,
            relations: p.relations.iter().filter(|r| p.relation_weight(r) <= max_weight).cloned().collect(),
            basis: vec![Vec::new(); max_weight + 1],
            letters: vec![QVec::new(); p.gens.len()],
            table: HashMap::new(),
        };
        for w in 1..=max_weight {
            q.extend(w)?;
        }
        Ok(q)
    }

    fn extend(&mut self, w: usize) -> Result<(), LieError> {
        let mut defs = Vec::new();
        for (a, &k) in self.weights.iter().enumerate() {
            if k == w {
                defs.push(Def::Letter(a));
            }
        }
        for (a, &k) in self.weights.iter().enumerate() {
            if k < w {
                for i in 0..self.basis[w - k].len() {
                    defs.push(Def::Bracket(a, i));
                }
            }
        }
        let syms = Symbols {
            index: defs.iter().enumerate().map(|(i, d)| (*d, i)).collect(),
            defs,
        };
        // Letters are pivoted last so they stay basis elements.
        let prio = syms
            .defs
            .iter()
            .enumerate()
            .map(|(i, d)| if matches!(d, Def::Letter(_)) { i + syms.defs.len() } else { i })
            .collect();
        let mut ech = Echelon::with_priority(prio);
        let letters = self.weights.len();
        // Antisymmetry.
        for a in 0..letters {
            let k = self.weights[a];
            if k >= w {
                continue;
            }
            for i in 0..self.basis[w - k].len() {
                let mut v = SparseVec::new();
                v.insert(syms.index[&Def::Bracket(a, i)], Rational::one());
                let img = self.vec_of(&self.letters[a], k);
                axpy(&mut v, &Rational::one(), &self.sym_bracket(&syms, w, w - k, i, &img));
                ech.insert(&v);
            }
        }
        // Jacobi on two letters and a basis element.
        for a in 0..letters {
            for c in a + 1..letters {
                let (ka, kc) = (self.weights[a], self.weights[c]);
                if ka + kc >= w {
                    continue;
                }
                let m = w - ka - kc;
                let la = self.vec_of(&self.letters[a], ka);
                let lc = self.vec_of(&self.letters[c], kc);
                let ac = self.known(ka, &la, kc, &lc);
                for i in 0..self.basis[m].len() {
                    let e = SparseVec::from([(i, Rational::one())]);
                    let ce = self.known(kc, &lc, m, &e);
                    let ae = self.known(ka, &la, m, &e);
                    let mut v = self.letter_sym(&syms, a, &ce);
                    axpy(&mut v, &qi(-1), &self.letter_sym(&syms, c, &ae));
                    for (j, x) in &ac {
                        axpy(&mut v, &-x.clone(), &self.sym_bracket(&syms, w, ka + kc, *j, &e));
                    }
                    if !v.is_empty() {
                        ech.insert(&v);
                    }
                }
            }
        }
        // Relations.
        let mut memo = HashMap::new();
        for r in self.relations.clone() {
            if self.free_weight(&r) != w {
                continue;
            }
            let mut v = SparseVec::new();
            for (word, c) in r.iter() {
                axpy(&mut v, c, &self.word_sym(&syms, w, word, &mut memo));
            }
            if !v.is_empty() {
                ech.insert(&v);
            }
        }
        let basis_cols: Vec<usize> = (0..syms.defs.len()).filter(|c| !ech.is_pivot(*c)).collect();
        let pos: HashMap<usize, usize> = basis_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        self.basis[w] = basis_cols.iter().map(|c| syms.defs[*c]).collect();
        let project = |v: &SparseVec| -> SparseVec {
            ech.reduce(v).into_iter().map(|(c, x)| (pos[&c], x)).collect()
        };
        for a in 0..letters {
            if self.weights[a] == w {
                let v = project(&SparseVec::from([(syms.index[&Def::Letter(a)], Rational::one())]));
                self.letters[a] = self.qvec(w, &v);
            }
        }
        for w1 in 1..w {
            let w2 = w - w1;
            for i in 0..self.basis[w1].len() {
                for j in 0..self.basis[w2].len() {
                    let e = SparseVec::from([(j, Rational::one())]);
                    let v = project(&self.sym_bracket(&syms, w, w1, i, &e));
                    self.table.insert((w1, i, w2, j), v);
                }
            }
        }
        Ok(())
    }

    fn free_weight(&self, r: &LieElement) -> usize {
        r.iter()
            .next()
            .map(|(w, _)| w.iter().map(|&a| self.weights[a as usize]).sum())
            .unwrap_or(0)
    }

    fn vec_of(&self, e: &QVec, w: usize) -> SparseVec {
        e.iter().filter(|((k, _), _)| *k == w).map(|((_, i), c)| (*i, c.clone())).collect()
    }

    fn qvec(&self, w: usize, v: &SparseVec) -> QVec {
        let mut out = QVec::new();
        for (i, c) in v {
            out.add((w, *i), c.clone());
        }
        out
    }

    /// Bracket of homogeneous elements whose total weight is already built.
    fn known(&self, w1: usize, a: &SparseVec, w2: usize, b: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, x) in a {
            for (j, y) in b {
                if let Some(t) = self.table.get(&(w1, *i, w2, *j)) {
                    axpy(&mut out, &(x * y), t);
                }
            }
        }
        out
    }

    /// `[a, f]` as symbols, `f` of weight `w - |a|`.
    fn letter_sym(&self, syms: &Symbols, a: usize, f: &SparseVec) -> SparseVec {
        f.iter()
            .map(|(k, c)| (syms.index[&Def::Bracket(a, *k)], c.clone()))
            .collect()
    }

    /// `[e, f]` as weight-`w` symbols for the basis element `e = (m, i)`,
    /// unfolding the definition of `e` with the Jacobi identity.
    fn sym_bracket(&self, syms: &Symbols, w: usize, m: usize, i: usize, f: &SparseVec) -> SparseVec {
        match self.basis[m][i] {
            Def::Letter(a) => self.letter_sym(syms, a, f),
            Def::Bracket(c, i2) => {
                let kc = self.weights[c];
                let m2 = m - kc;
                // [[c,e'],f] = [c,[e',f]] - [e',[c,f]]
                let e2 = SparseVec::from([(i2, Rational::one())]);
                let ef = self.known(m2, &e2, w - m, f);
                let mut out = self.letter_sym(syms, c, &ef);
                let lc = self.vec_of(&self.letters[c], kc);
                let cf = self.known(kc, &lc, w - m, f);
                if !cf.is_empty() {
                    axpy(&mut out, &qi(-1), &self.sym_bracket(syms, w, m2, i2, &cf));
                }
                out
            }
        }
    }

    /// Image of a Lyndon word of weight `w` as symbols.
    fn word_sym(
        &self,
        syms: &Symbols,
        w: usize,
        word: &[u16],
        memo: &mut HashMap<Word, (usize, SparseVec)>,
    ) -> SparseVec {
        match standard_factorization(word) {
            None => SparseVec::from([(syms.index[&Def::Letter(word[0] as usize)], Rational::one())]),
            Some((u, v)) => {
                let (wu, fu) = self.word_low(&u, memo);
                let (wv, fv) = self.word_low(&v, memo);
                debug_assert_eq!(wu + wv, w);
                let mut out = SparseVec::new();
                for (i, c) in &fu {
                    axpy(&mut out, c, &self.sym_bracket(syms, w, wu, *i, &fv));
                }
                out
            }
        }
    }

    /// Image of a word of weight already built.
    fn word_low(&self, word: &[u16], memo: &mut HashMap<Word, (usize, SparseVec)>) -> (usize, SparseVec) {
        if let Some(x) = memo.get(word) {
            return x.clone();
        }
        let out = match standard_factorization(word) {
            None => {
                let a = word[0] as usize;
                let k = self.weights[a];
                (k, self.vec_of(&self.letters[a], k))
            }
            Some((u, v)) => {
                let (wu, fu) = self.word_low(&u, memo);
                let (wv, fv) = self.word_low(&v, memo);
                (wu + wv, self.known(wu, &fu, wv, &fv))
            }
        };
        memo.insert(word.to_vec(), out.clone());
        out
    }

    pub fn dim(&self, w: usize) -> usize {
        self.basis.get(w).map(|b| b.len()).unwrap_or(0)
    }

    pub fn dims(&self) -> Vec<WeightDims> {
        (1..=self.max_weight)
            .map(|w| {
                let free = witt_dimension(&self.weights, w);
                WeightDims {
                    weight: w,
                    dim_free: free,
                    dim_ideal: free - self.dim(w),
                    dim_quotient: self.dim(w),
                }
            })
            .collect()
    }

    pub fn basis_defs(&self, w: usize) -> &[Def] {
        self.basis.get(w).map(|b| b.as_slice()).unwrap_or(&[])
    }

    pub fn letter(&self, a: usize) -> QVec {
        self.letters[a].clone()
    }

    pub fn letter_of(&self, g: Gen) -> Option<usize> {
        let g = match g {
            Gen::T(i, j) => Gen::t(i, j),
            other => other,
        };
        self.gens.iter().position(|x| *x == g)
    }

    /// Image of a generator; absent generators are zero.
    pub fn gen(&self, g: Gen) -> QVec {
        self.letter_of(g).map(|a| self.letters[a].clone()).unwrap_or_default()
    }

    pub fn basis_element(&self, w: usize, i: usize) -> QVec {
        QVec::single((w, i), Rational::one())
    }

    pub fn weight_of(&self, e: &QVec) -> Option<usize> {
        e.iter().next().map(|((w, _), _)| *w)
    }

    pub fn bracket(&self, a: &QVec, b: &QVec) -> Result<QVec, LieError> {
        let mut out = QVec::new();
        for ((w1, i), x) in a.iter() {
            for ((w2, j), y) in b.iter() {
                let w = w1 + w2;
                if w > self.max_weight {
                    return Err(LieError::WeightOverflow { weight: w, max: self.max_weight });
                }
                for (k, z) in &self.table[&(*w1, *i, *w2, *j)] {
                    out.add((w, *k), x * y * z);
                }
            }
        }
        Ok(out)
    }

    /// Image of a free Lie element (Lyndon coordinates over the letters).
    pub fn from_free(&self, e: &LieElement) -> Result<QVec, LieError> {
        let mut out = QVec::new();
        for (w, c) in e.iter() {
            out.add_scaled(&self.word_image(w)?, c);
        }
        Ok(out)
    }

    fn word_image(&self, w: &[u16]) -> Result<QVec, LieError> {
        match standard_factorization(w) {
            None => Ok(self.letters[w[0] as usize].clone()),
            Some((u, v)) => self.bracket(&self.word_image(&u)?, &self.word_image(&v)?),
        }
    }

    /// A free Lie representative of a basis element, following its definition.
    pub fn representative(&self, free: &FreeLie, w: usize, i: usize) -> Result<LieElement, LieError> {
        match self.basis[w][i] {
            Def::Letter(a) => Ok(free.letter(a)),
            Def::Bracket(a, j) => free.bracket(&free.letter(a), &self.representative(free, w - self.weights[a], j)?),
        }
    }

    pub fn format(&self, e: &QVec) -> String {
        if e.is_zero() {
            return "0".into();
        }
        e.iter()
            .map(|((w, i), c)| format!("{}*{}", crate::linalg::fmt_rational(c), self.format_basis(*w, *i)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn format_basis(&self, w: usize, i: usize) -> String {
        match self.basis[w][i] {
            Def::Letter(a) => self.names[a].clone(),
            Def::Bracket(a, j) => format!("[{},{}]", self.names[a], self.format_basis(w - self.weights[a], j)),
        }
    }

    pub fn homogeneous(&self, e: &QVec, w: usize) -> QVec {
        e.filter(|(k, _)| *k == w)
    }
}

/// A Lie morphism between graded quotients, given on letters.
#[derive(Debug)]
pub struct GradedMorphism<'a> {
    pub source: &'a GradedLie,
    pub target: &'a GradedLie,
    images: Vec<QVec>,
    cache: RefCell<HashMap<(usize, usize), QVec>>,
}

impl<'a> GradedMorphism<'a> {
    /// Checks that every source relation within the truncation maps to zero.
    pub fn new(source: &'a GradedLie, target: &'a GradedLie, images: Vec<QVec>) -> Result<Self, LieError> {
        if images.len() != source.gens.len() {
            return Err(LieError::Invalid("one image per letter expected".into()));
        }
        let f = GradedMorphism {
            source,
            target,
            images,
            cache: RefCell::new(HashMap::new()),
        };
        for (index, r) in source.relations.iter().enumerate() {
            if source.free_weight(r) > target.max_weight {
                continue;
            }
            let mut image = QVec::new();
            for (w, c) in r.iter() {
                image.add_scaled(&f.word(w)?, c);
            }
            if !image.is_zero() {
                return Err(LieError::RelationNotPreserved {
                    index,
                    image: target.format(&image),
                });
            }
        }
        Ok(f)
    }

    fn word(&self, w: &[u16]) -> Result<QVec, LieError> {
        match standard_factorization(w) {
            None => Ok(self.images[w[0] as usize].clone()),
            Some((u, v)) => self.target.bracket(&self.word(&u)?, &self.word(&v)?),
        }
    }

    fn basis_image(&self, w: usize, i: usize) -> Result<QVec, LieError> {
        if let Some(x) = self.cache.borrow().get(&(w, i)) {
            return Ok(x.clone());
        }
        let x = match self.source.basis[w][i] {
            Def::Letter(a) => self.images[a].clone(),
            Def::Bracket(a, j) => {
                let inner = self.basis_image(w - self.source.weights[a], j)?;
                self.target.bracket(&self.images[a], &inner)?
            }
        };
        self.cache.borrow_mut().insert((w, i), x.clone());
        Ok(x)
    }

    pub fn apply(&self, e: &QVec) -> Result<QVec, LieError> {
        let mut out = QVec::new();
        for ((w, i), c) in e.iter() {
            out.add_scaled(&self.basis_image(*w, *i)?, c);
        }
        Ok(out)
    }

    pub fn image_of_letter(&self, a: usize) -> &QVec {
        &self.images[a]
    }
}

/// `θ^φ` between graded quotients of the `t` family, `phi[j-1] = φ(j)`.
pub fn graded_theta<'a>(source: &'a GradedLie, target: &'a GradedLie, phi: &[u8]) -> Result<GradedMorphism<'a>, LieError> {
    if phi.len() != target.n as usize || phi.iter().any(|&i| i == 0 || i > source.n) {
        return Err(LieError::Invalid(format!(
            "map {phi:?} is not {{1..{}}} -> {{1..{}}}",
            target.n, source.n
        )));
    }
    let fibre = |i: u8| -> Vec<u8> { (1..=phi.len() as u8).filter(|&j| phi[j as usize - 1] == i).collect() };
    let images = source
        .gens
        .iter()
        .map(|&x| {
            let mut e = QVec::new();
            match x {
                Gen::X(l, i) => fibre(i).into_iter().for_each(|j| e.add_scaled(&target.gen(Gen::X(l, j)), &qi(1))),
                Gen::Y(l, i) => fibre(i).into_iter().for_each(|j| e.add_scaled(&target.gen(Gen::Y(l, j)), &qi(1))),
                Gen::T(i, j) if i == j => {
                    let f = fibre(i);
                    for (a, &p) in f.iter().enumerate() {
                        for &r in &f[a..] {
                            e.add_scaled(&target.gen(Gen::t(p, r)), &qi(1));
                        }
                    }
                }
                Gen::T(i, j) => {
                    for p in fibre(i) {
                        for r in fibre(j) {
                            e.add_scaled(&target.gen(Gen::t(p, r)), &qi(1));
                        }
                    }
                }
            }
            e
        })
        .collect();
    GradedMorphism::new(source, target, images)
}
