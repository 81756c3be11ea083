//! Weight-truncated free Lie algebras in the Lyndon basis, their quotients
//! by homogeneous ideals, and the presented algebras `t_(g)(n)`,
//! `t^{non-fr}_(1)(n)` and `t_bv(n)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graph::LinComb;

mod graded;
pub use graded::{graded_theta, Def, GradedLie, GradedMorphism, QVec};
use crate::linalg::{nullspace_basis, qi, Echelon, Rational, SparseMatrix, SparseVec};

#[derive(Debug, Error)]
pub enum LieError {
    #[error("weight {weight} exceeds the truncation {max}")]
    WeightOverflow { weight: usize, max: usize },
    #[error("relation {index} is not preserved: image {image}")]
    RelationNotPreserved { index: usize, image: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Word = Vec<u16>;
/// Element of the tensor algebra.
pub type Poly = BTreeMap<Word, Rational>;
/// Element of a free Lie algebra, keyed by Lyndon words.
pub type LieElement = LinComb<Word>;

fn poly_add(p: &mut Poly, w: Word, c: Rational) {
    use std::collections::btree_map::Entry;
    match p.entry(w) {
        Entry::Vacant(e) => {
            if !c.is_zero() {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn concat(a: &[u16], b: &[u16]) -> Word {
    let mut w = Vec::with_capacity(a.len() + b.len());
    w.extend_from_slice(a);
    w.extend_from_slice(b);
    w
}

/// Commutator `ab - ba` in the tensor algebra.
pub fn commutator(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (x, cx) in a {
        for (y, cy) in b {
            let c = cx * cy;
            poly_add(&mut out, concat(x, y), c.clone());
            poly_add(&mut out, concat(y, x), -c);
        }
    }
    out
}

pub fn is_lyndon(w: &[u16]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// Standard factorization `w = uv`, `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u16]) -> Option<(Word, Word)> {
    (1..w.len())
        .find(|&i| is_lyndon(&w[i..]))
        .map(|i| (w[..i].to_vec(), w[i..].to_vec()))
}

/// Free Lie algebra on weighted letters, truncated at `max_weight`.
#[derive(Clone, Debug)]
pub struct FreeLie {
    pub names: Vec<String>,
    pub weights: Vec<usize>,
    pub max_weight: usize,
    /// Lyndon words by weight (index 0 empty).
    basis: Vec<Vec<Word>>,
    index: HashMap<Word, usize>,
    expansion: HashMap<Word, Poly>,
}

impl FreeLie {
    pub fn new(names: Vec<String>, weights: Vec<usize>, max_weight: usize) -> FreeLie {
        assert_eq!(names.len(), weights.len());
        let mut basis = vec![Vec::new(); max_weight + 1];
        let mut index = HashMap::new();
        let mut expansion = HashMap::new();
        for (w, slot) in basis.iter_mut().enumerate().skip(1) {
            let mut words = Vec::new();
            words_of_weight(&weights, w, &mut Vec::new(), &mut words);
            words.retain(|x| is_lyndon(x));
            words.sort();
            for (i, x) in words.iter().enumerate() {
                index.insert(x.clone(), i);
            }
            *slot = words;
        }
        // Expansions in order of length so factors are available.
        let mut all: Vec<Word> = basis.iter().flatten().cloned().collect();
        all.sort_by_key(|x| x.len());
        for x in all {
            let p = match standard_factorization(&x) {
                None => Poly::from([(x.clone(), Rational::one())]),
                Some((u, v)) => commutator(&expansion[&u], &expansion[&v]),
            };
            expansion.insert(x, p);
        }
        FreeLie {
            names,
            weights,
            max_weight,
            basis,
            index,
            expansion,
        }
    }

    pub fn letters(&self) -> usize {
        self.names.len()
    }

    pub fn word_weight(&self, w: &[u16]) -> usize {
        w.iter().map(|&a| self.weights[a as usize]).sum()
    }

    pub fn basis(&self, weight: usize) -> &[Word] {
        self.basis.get(weight).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn dim(&self, weight: usize) -> usize {
        self.basis(weight).len()
    }

    pub fn index_of(&self, w: &[u16]) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn letter(&self, a: usize) -> LieElement {
        LieElement::single(vec![a as u16], Rational::one())
    }

    /// Expansion in the tensor algebra.
    pub fn expand(&self, e: &LieElement) -> Poly {
        let mut out = Poly::new();
        for (w, c) in e.iter() {
            for (x, d) in &self.expansion[w] {
                poly_add(&mut out, x.clone(), c * d);
            }
        }
        out
    }

    /// Rewrites a Lie polynomial in the Lyndon basis, using that the
    /// expansion of a Lyndon word `w` is `w` plus larger words.
    pub fn decompose(&self, p: &Poly) -> Result<LieElement, LieError> {
        let mut p = p.clone();
        let mut out = LieElement::new();
        while let Some((w, c)) = p.iter().next().map(|(w, c)| (w.clone(), c.clone())) {
            let Some(e) = self.expansion.get(&w) else {
                if self.word_weight(&w) > self.max_weight {
                    return Err(LieError::WeightOverflow {
                        weight: self.word_weight(&w),
                        max: self.max_weight,
                    });
                }
                return Err(LieError::Invalid(format!("not a Lie polynomial: {w:?}")));
            };
            for (x, d) in e {
                poly_add(&mut p, x.clone(), -(&c * d));
            }
            out.add(w, c);
        }
        Ok(out)
    }

    pub fn weight_of(&self, e: &LieElement) -> Option<usize> {
        e.iter().next().map(|(w, _)| self.word_weight(w))
    }

    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> Result<LieElement, LieError> {
        let mut out = LieElement::new();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                let w = self.word_weight(x) + self.word_weight(y);
                if w > self.max_weight {
                    return Err(LieError::WeightOverflow {
                        weight: w,
                        max: self.max_weight,
                    });
                }
                let p = commutator(&self.expansion[x], &self.expansion[y]);
                out.add_scaled(&self.decompose(&p)?, &(cx * cy));
            }
        }
        Ok(out)
    }

    /// Coordinates of the weight-`w` component.
    pub fn to_vec(&self, w: usize, e: &LieElement) -> SparseVec {
        let mut v = SparseVec::new();
        for (x, c) in e.iter() {
            if self.word_weight(x) == w {
                v.insert(self.index[x], c.clone());
            }
        }
        v
    }

    pub fn from_vec(&self, w: usize, v: &SparseVec) -> LieElement {
        let mut e = LieElement::new();
        for (i, c) in v {
            e.add(self.basis[w][*i].clone(), c.clone());
        }
        e
    }

    pub fn format(&self, e: &LieElement) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (w, c) in e.iter() {
            parts.push(format!("{}*{}", crate::linalg::fmt_rational(c), self.bracketed(w)));
        }
        parts.join(" + ")
    }

    fn bracketed(&self, w: &[u16]) -> String {
        match standard_factorization(w) {
            None => self.names[w[0] as usize].clone(),
            Some((u, v)) => format!("[{},{}]", self.bracketed(&u), self.bracketed(&v)),
        }
    }
}

fn words_of_weight(weights: &[usize], w: usize, prefix: &mut Word, out: &mut Vec<Word>) {
    if w == 0 {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        return;
    }
    for (a, &k) in weights.iter().enumerate() {
        if k <= w {
            prefix.push(a as u16);
            words_of_weight(weights, w - k, prefix, out);
            prefix.pop();
        }
    }
}

/// Witt's formula generalized to weighted letters: the number of Lyndon
/// words of weight `w`, computed by Möbius inversion of the word counts.
pub fn witt_dimension(weights: &[usize], w: usize) -> usize {
    // Number of words of each weight.
    let mut words = vec![0i128; w + 1];
    words[0] = 1;
    for k in 1..=w {
        words[k] = weights.iter().filter(|&&x| x <= k).map(|&x| words[k - x]).sum();
    }
    // Sum over primitive necklaces: N(k) = Σ_{d|k} d L(d) where N counts
    // weighted cyclic words with a marked start of total weight k.
    let mut marked = vec![0i128; w + 1];
    for k in 1..=w {
        // Words whose first letter sits at a fixed origin of a cycle of
        // weight k: Σ_a |a| · words(k - |a|).
        marked[k] = weights
            .iter()
            .filter(|&&x| x <= k)
            .map(|&x| x as i128 * words[k - x])
            .sum();
    }
    let mut lyndon = vec![0i128; w + 1];
    for k in 1..=w {
        let mut s = marked[k];
        for d in 1..k {
            if k % d == 0 {
                s -= d as i128 * lyndon[d];
            }
        }
        lyndon[k] = s / k as i128;
    }
    lyndon[w] as usize
}

/// Generators of the `t`-type Lie algebras.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    /// `x_l^{(i)}`, stored as `(l, i)`.
    X(u8, u8),
    Y(u8, u8),
    /// `t_{ij}` with `i ≤ j`.
    T(u8, u8),
}

impl Gen {
    pub fn t(i: u8, j: u8) -> Gen {
        Gen::T(i.min(j), i.max(j))
    }

    pub fn weight(self) -> usize {
        match self {
            Gen::T(..) => 2,
            _ => 1,
        }
    }

    pub fn name(self, framed: bool) -> String {
        match self {
            Gen::X(l, i) if framed => format!("x{l}^{i}"),
            Gen::Y(l, i) if framed => format!("y{l}^{i}"),
            Gen::X(_, i) => format!("x^{i}"),
            Gen::Y(_, i) => format!("y^{i}"),
            Gen::T(i, j) => format!("t{i}{j}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct WeightDims {
    pub weight: usize,
    pub dim_free: usize,
    pub dim_ideal: usize,
    pub dim_quotient: usize,
}

/// A free Lie algebra modulo the ideal generated by homogeneous relations,
/// computed weight by weight.
#[derive(Clone, Debug)]
pub struct PresentedLie {
    pub name: String,
    pub n: u8,
    pub g: u8,
    pub gens: Vec<Gen>,
    pub free: FreeLie,
    pub relations: Vec<LieElement>,
    ideal: Vec<Echelon>,
    pub dims: Vec<WeightDims>,
}

impl PresentedLie {
    /// Saturates the ideal: `I_w` is spanned by the weight-`w` relations and
    /// `[a, I_{w-|a|}]` for all letters `a`.
    pub fn new(name: &str, free: FreeLie, relations: Vec<LieElement>) -> Result<PresentedLie, LieError> {
        let max_weight = free.max_weight;
        let mut ideal: Vec<Echelon> = vec![Echelon::new()];
        let mut dims = Vec::new();
        let mut memo: HashMap<(usize, Word), LieElement> = HashMap::new();
        for w in 1..=max_weight {
            // Generators are pivoted last so they stay in the quotient basis.
            let prio: Vec<usize> = free
                .basis(w)
                .iter()
                .enumerate()
                .map(|(i, x)| if x.len() == 1 { i + free.dim(w) } else { i })
                .collect();
            let mut e = Echelon::with_priority(prio);
            for r in &relations {
                let v = free.to_vec(w, r);
                if !v.is_empty() {
                    e.insert(&v);
                }
            }
            for a in 0..free.letters() {
                let k = free.weights[a];
                if k >= w {
                    continue;
                }
                let rows: Vec<SparseVec> = ideal[w - k].rows().to_vec();
                for row in rows {
                    let mut img = LieElement::new();
                    for (i, c) in &row {
                        let word = free.basis(w - k)[*i].clone();
                        let b = match memo.get(&(a, word.clone())) {
                            Some(b) => b.clone(),
                            None => {
                                let b = free.bracket(&free.letter(a), &LieElement::single(word.clone(), Rational::one()))?;
                                memo.insert((a, word), b.clone());
                                b
                            }
                        };
                        img.add_scaled(&b, c);
                    }
                    let v = free.to_vec(w, &img);
                    if !v.is_empty() {
                        e.insert(&v);
                    }
                }
            }
            dims.push(WeightDims {
                weight: w,
                dim_free: free.dim(w),
                dim_ideal: e.rank(),
                dim_quotient: free.dim(w) - e.rank(),
            });
            ideal.push(e);
        }
        Ok(PresentedLie {
            name: name.into(),
            n: 0,
            g: 0,
            gens: Vec::new(),
            free,
            relations,
            ideal,
            dims,
        })
    }

    pub fn max_weight(&self) -> usize {
        self.free.max_weight
    }

    pub fn dim(&self, w: usize) -> usize {
        self.dims.get(w.wrapping_sub(1)).map(|d| d.dim_quotient).unwrap_or(0)
    }

    /// Lyndon words forming the quotient basis in weight `w`.
    pub fn quotient_basis(&self, w: usize) -> Vec<Word> {
        if w == 0 || w > self.max_weight() {
            return Vec::new();
        }
        (0..self.free.dim(w))
            .filter(|i| !self.ideal[w].is_pivot(*i))
            .map(|i| self.free.basis(w)[i].clone())
            .collect()
    }

    /// Normal form modulo the ideal.
    pub fn reduce(&self, e: &LieElement) -> LieElement {
        let mut out = LieElement::new();
        for w in 1..=self.max_weight() {
            let v = self.free.to_vec(w, e);
            if v.is_empty() {
                continue;
            }
            let r = self.ideal[w].reduce(&v);
            out.add_scaled(&self.free.from_vec(w, &r), &Rational::one());
        }
        out
    }

    pub fn is_zero(&self, e: &LieElement) -> bool {
        self.reduce(e).is_zero()
    }

    pub fn in_ideal(&self, w: usize, v: &SparseVec) -> bool {
        self.ideal[w].contains(v)
    }

    pub fn bracket(&self, a: &LieElement, b: &LieElement) -> Result<LieElement, LieError> {
        Ok(self.reduce(&self.free.bracket(a, b)?))
    }

    pub fn letter_of(&self, g: Gen) -> Option<usize> {
        self.gens.iter().position(|x| *x == g)
    }

    /// The element of a generator; `t_{ij}` is symmetric. Generators that
    /// are absent (for example `t_{ii}` in the non-framed algebra) are zero.
    pub fn gen(&self, g: Gen) -> LieElement {
        let g = match g {
            Gen::T(i, j) => Gen::t(i, j),
            other => other,
        };
        match self.letter_of(g) {
            Some(a) => self.free.letter(a),
            None => LieElement::new(),
        }
    }

    pub fn format(&self, e: &LieElement) -> String {
        self.free.format(e)
    }

    /// Structure constants `[b_i, b_j] = Σ c_k b_k` for quotient basis
    /// elements of weights `w1` and `w2`.
    pub fn structure_constants(&self, w1: usize, w2: usize) -> Result<Vec<(usize, usize, SparseVec)>, LieError> {
        let b1 = self.quotient_basis(w1);
        let b2 = self.quotient_basis(w2);
        let target = self.quotient_basis(w1 + w2);
        let pos: HashMap<&Word, usize> = target.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let mut out = Vec::new();
        for (i, x) in b1.iter().enumerate() {
            for (j, y) in b2.iter().enumerate() {
                let r = self.bracket(
                    &LieElement::single(x.clone(), Rational::one()),
                    &LieElement::single(y.clone(), Rational::one()),
                )?;
                let v: SparseVec = r.iter().map(|(w, c)| (pos[w], c.clone())).collect();
                out.push((i, j, v));
            }
        }
        Ok(out)
    }

    /// Basis of the weight-`w` part of the center, tested against every
    /// letter whose bracket stays within the truncation.
    pub fn center(&self, w: usize) -> Result<Vec<LieElement>, LieError> {
        let basis = self.quotient_basis(w);
        if basis.is_empty() {
            return Ok(Vec::new());
        }
        let mut rows: Vec<(usize, usize, Rational)> = Vec::new();
        let mut offset = 0;
        for a in 0..self.free.letters() {
            let k = self.free.weights[a];
            if w + k > self.max_weight() {
                continue;
            }
            let target = self.quotient_basis(w + k);
            let pos: HashMap<&Word, usize> = target.iter().enumerate().map(|(i, x)| (x, i)).collect();
            for (j, x) in basis.iter().enumerate() {
                let r = self.bracket(&self.free.letter(a), &LieElement::single(x.clone(), Rational::one()))?;
                for (y, c) in r.iter() {
                    rows.push((offset + pos[y], j, c.clone()));
                }
            }
            offset += target.len();
        }
        let m = SparseMatrix::from_triplets(offset.max(1), basis.len(), rows).map_err(|e| LieError::Invalid(e.to_string()))?;
        Ok(nullspace_basis(&m)
            .into_iter()
            .map(|v| {
                let mut e = LieElement::new();
                for (j, c) in v.into_iter().enumerate() {
                    e.add(basis[j].clone(), c);
                }
                e
            })
            .collect())
    }
}

impl fmt::Display for PresentedLie {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        for d in &self.dims {
            write!(f, " w{}:{}", d.weight, d.dim_quotient)?;
        }
        Ok(())
    }
}

type Relations = Vec<Result<LieElement, LieError>>;

/// Letters and defining relations of a presented Lie algebra, independent
/// of any weight truncation.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub name: String,
    pub n: u8,
    pub g: u8,
    pub gens: Vec<Gen>,
    pub names: Vec<String>,
    pub weights: Vec<usize>,
    pub relations: Vec<LieElement>,
}

impl Presentation {
    pub fn relation_weight(&self, r: &LieElement) -> usize {
        r.iter()
            .next()
            .map(|(w, _)| w.iter().map(|&a| self.weights[a as usize]).sum())
            .unwrap_or(0)
    }

    pub fn letter_of(&self, g: Gen) -> Option<usize> {
        let g = match g {
            Gen::T(i, j) => Gen::t(i, j),
            other => other,
        };
        self.gens.iter().position(|x| *x == g)
    }
}

/// Relations never exceed this weight.
const RELATION_WEIGHT: usize = 4;

/// Assembles a presentation from `Gen` letters; relations are built in a
/// free algebra truncated at the largest relation weight.
fn build(
    name: String,
    n: u8,
    g: u8,
    gens: Vec<Gen>,
    framed: bool,
    relations: impl FnOnce(&FreeLie, &dyn Fn(Gen) -> LieElement) -> Relations,
) -> Result<Presentation, LieError> {
    let names: Vec<String> = gens.iter().map(|x| x.name(framed)).collect();
    let weights: Vec<usize> = gens.iter().map(|x| x.weight()).collect();
    let free = FreeLie::new(names.clone(), weights.clone(), RELATION_WEIGHT);
    let gl = |x: Gen| {
        let x = match x {
            Gen::T(i, j) => Gen::t(i, j),
            o => o,
        };
        match gens.iter().position(|y| *y == x) {
            Some(a) => LieElement::single(vec![a as u16], Rational::one()),
            None => LieElement::new(),
        }
    };
    let mut rels = Vec::new();
    for r in relations(&free, &gl) {
        let r = r?;
        if !r.is_zero() {
            rels.push(r);
        }
    }
    Ok(Presentation {
        name,
        n,
        g,
        gens,
        names,
        weights,
        relations: rels,
    })
}

impl PresentedLie {
    /// Saturation of a presentation up to `max_weight`.
    pub fn from_presentation(p: &Presentation, max_weight: usize) -> Result<PresentedLie, LieError> {
        let free = FreeLie::new(p.names.clone(), p.weights.clone(), max_weight);
        let rels = p
            .relations
            .iter()
            .filter(|r| p.relation_weight(r) <= max_weight)
            .cloned()
            .collect();
        let mut out = PresentedLie::new(&p.name, free, rels)?;
        out.n = p.n;
        out.g = p.g;
        out.gens = p.gens.clone();
        Ok(out)
    }
}

fn minus(a: Result<LieElement, LieError>, b: &LieElement) -> Result<LieElement, LieError> {
    a.map(|a| &a - b)
}

fn dk_relations(free: &FreeLie, t: &dyn Fn(u8, u8) -> LieElement, n: u8, out: &mut Relations) {
    for i in 1..=n {
        for j in i + 1..=n {
            for k in 1..=n {
                for l in k + 1..=n {
                    if (i, j) < (k, l) && i != k && i != l && j != k && j != l {
                        out.push(free.bracket(&t(i, j), &t(k, l)));
                    }
                }
            }
            for k in 1..=n {
                if k != i && k != j {
                    out.push(free.bracket(&(&t(i, k) + &t(k, j)), &t(i, j)));
                }
            }
        }
    }
}

/// `[x_l^{(k)}, t_{ij}] = [y_l^{(k)}, t_{ij}] = 0` for distinct `i, j, k`.
fn separation(
    free: &FreeLie,
    gl: &dyn Fn(Gen) -> LieElement,
    t: &dyn Fn(u8, u8) -> LieElement,
    n: u8,
    g: u8,
    out: &mut Relations,
) {
    for i in 1..=n {
        for j in i + 1..=n {
            for k in (1..=n).filter(|&k| k != i && k != j) {
                for l in 1..=g {
                    out.push(free.bracket(&gl(Gen::X(l, k)), &t(i, j)));
                    out.push(free.bracket(&gl(Gen::Y(l, k)), &t(i, j)));
                }
            }
        }
    }
}

/// `t_ii` central: brackets with every letter.
fn central(free: &FreeLie, t: &LieElement, out: &mut Relations) {
    for a in 0..free.letters() {
        out.push(free.bracket(t, &free.letter(a)));
    }
}

/// `t_(g)(n)`. Letters ordered `x_1^{(1)}, y_1^{(1)}, …, x_g^{(1)}, y_g^{(1)},
/// x_1^{(2)}, …` followed by `t_{ij}` (i ≤ j) lexicographically.
///
/// Includes `[x_l^{(k)}, t_{ij}] = [y_l^{(k)}, t_{ij}] = 0` for distinct
/// `i, j, k`. These follow from the other relations when `g ≥ 2`; for
/// `g = 1` they are needed for the maps `θ^φ` to be well defined.
pub fn t_g(n: u8, g: u8, max_weight: usize) -> Result<PresentedLie, LieError> {
    PresentedLie::from_presentation(&t_g_presentation(n, g, true)?, max_weight)
}

/// `t_(g)(n)` with or without the relations `[x_l^{(k)}, t_{ij}] = 0`.
pub fn t_g_presented(n: u8, g: u8, max_weight: usize, separated: bool) -> Result<PresentedLie, LieError> {
    PresentedLie::from_presentation(&t_g_presentation(n, g, separated)?, max_weight)
}

pub fn t_g_presentation(n: u8, g: u8, separated: bool) -> Result<Presentation, LieError> {
    if n == 0 || g == 0 {
        return Err(LieError::Invalid("n and g must be at least 1".into()));
    }
    let mut gens = Vec::new();
    for i in 1..=n {
        for l in 1..=g {
            gens.push(Gen::X(l, i));
            gens.push(Gen::Y(l, i));
        }
    }
    for i in 1..=n {
        for j in i..=n {
            gens.push(Gen::T(i, j));
        }
    }
    build(format!("t_({g})({n})"), n, g, gens, true, |free, gl| {
        let t = |i: u8, j: u8| gl(Gen::t(i, j));
        let mut r = Vec::new();
        dk_relations(free, &t, n, &mut r);
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                for l in 1..=g {
                    for k in 1..=g {
                        if i < j {
                            r.push(free.bracket(&gl(Gen::X(l, i)), &gl(Gen::X(k, j))));
                            r.push(free.bracket(&gl(Gen::Y(l, i)), &gl(Gen::Y(k, j))));
                        }
                        let b = free.bracket(&gl(Gen::X(k, i)), &gl(Gen::Y(l, j)));
                        r.push(if k == l { minus(b, &t(i, j)) } else { b });
                    }
                }
            }
            let mut s: Result<LieElement, LieError> = Ok(LieElement::new());
            for k in 1..=g {
                let b = free.bracket(&gl(Gen::X(k, i)), &gl(Gen::Y(k, i)));
                s = s.and_then(|s| b.map(|b| &s + &b));
            }
            let mut rest = t(i, i).scaled(&qi(2 - 2 * g as i64));
            for j in 1..=n {
                if j != i {
                    rest.add_scaled(&t(i, j), &qi(1));
                }
            }
            r.push(s.map(|s| &s + &rest));
            central(free, &t(i, i), &mut r);
        }
        if separated {
            separation(free, gl, &t, n, g, &mut r);
        }
        r
    })
}

/// `t^{non-fr}_(1)(n)`: letters `x^{(i)}, y^{(i)}` and `t_{ij}` for
/// `i < j`. The relations `[x^{(i)},x^{(j)}] = [y^{(i)},y^{(j)}] = 0` and
/// `[x^{(k)},t_{ij}] = [y^{(k)},t_{ij}] = 0` are included as in the framed
/// algebra.
pub fn t_nonframed(n: u8, max_weight: usize) -> Result<PresentedLie, LieError> {
    PresentedLie::from_presentation(&t_nonframed_presentation(n)?, max_weight)
}

pub fn t_nonframed_presentation(n: u8) -> Result<Presentation, LieError> {
    if n == 0 {
        return Err(LieError::Invalid("n must be at least 1".into()));
    }
    let mut gens = Vec::new();
    for i in 1..=n {
        gens.push(Gen::X(1, i));
        gens.push(Gen::Y(1, i));
    }
    for i in 1..=n {
        for j in i + 1..=n {
            gens.push(Gen::T(i, j));
        }
    }
    build(format!("t_nonfr({n})"), n, 1, gens, false, |free, gl| {
        let t = |i: u8, j: u8| if i == j { LieElement::new() } else { gl(Gen::t(i, j)) };
        let mut r = Vec::new();
        dk_relations(free, &t, n, &mut r);
        for i in 1..=n {
            for j in 1..=n {
                if i == j {
                    continue;
                }
                if i < j {
                    r.push(free.bracket(&gl(Gen::X(1, i)), &gl(Gen::X(1, j))));
                    r.push(free.bracket(&gl(Gen::Y(1, i)), &gl(Gen::Y(1, j))));
                }
                r.push(minus(free.bracket(&gl(Gen::X(1, i)), &gl(Gen::Y(1, j))), &t(i, j)));
            }
            let mut rest = LieElement::new();
            for j in 1..=n {
                if j != i {
                    rest.add_scaled(&t(i, j), &qi(1));
                }
            }
            r.push(free.bracket(&gl(Gen::X(1, i)), &gl(Gen::Y(1, i))).map(|b| &b + &rest));
        }
        separation(free, gl, &t, n, 1, &mut r);
        r
    })
}

/// `t_bv(n)`: letters `t_{ij}`, `i ≤ j`, with `t_{ii}` central.
pub fn t_bv(n: u8, max_weight: usize) -> Result<PresentedLie, LieError> {
    PresentedLie::from_presentation(&t_bv_presentation(n)?, max_weight)
}

pub fn t_bv_presentation(n: u8) -> Result<Presentation, LieError> {
    if n == 0 {
        return Err(LieError::Invalid("n must be at least 1".into()));
    }
    let mut gens = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            gens.push(Gen::T(i, j));
        }
    }
    build(format!("t_bv({n})"), n, 0, gens, true, |free, gl| {
        let t = |i: u8, j: u8| gl(Gen::t(i, j));
        let mut r = Vec::new();
        dk_relations(free, &t, n, &mut r);
        for i in 1..=n {
            central(free, &t(i, i), &mut r);
        }
        r
    })
}

/// A Lie morphism between presented algebras, given on letters.
#[derive(Clone, Debug)]
pub struct LieMorphism<'a> {
    pub source: &'a PresentedLie,
    pub target: &'a PresentedLie,
    images: Vec<LieElement>,
}

impl<'a> LieMorphism<'a> {
    /// Fails with `RelationNotPreserved` unless every relation of the source
    /// within the truncation maps to zero.
    pub fn new(
        source: &'a PresentedLie,
        target: &'a PresentedLie,
        images: Vec<LieElement>,
    ) -> Result<LieMorphism<'a>, LieError> {
        if images.len() != source.free.letters() {
            return Err(LieError::Invalid("one image per letter expected".into()));
        }
        let f = LieMorphism { source, target, images };
        for (index, r) in source.relations.iter().enumerate() {
            if source.free.weight_of(r).is_some_and(|w| w > target.max_weight()) {
                continue;
            }
            let image = f.apply(r)?;
            if !image.is_zero() {
                return Err(LieError::RelationNotPreserved {
                    index,
                    image: target.format(&image),
                });
            }
        }
        Ok(f)
    }

    pub fn image_of_letter(&self, a: usize) -> &LieElement {
        &self.images[a]
    }

    /// Image in the target free algebra, before reduction.
    pub fn apply_free(&self, e: &LieElement) -> Result<LieElement, LieError> {
        let mut memo = HashMap::new();
        let mut out = LieElement::new();
        for (w, c) in e.iter() {
            out.add_scaled(&self.word_image(w, &mut memo)?, c);
        }
        Ok(out)
    }

    pub fn apply(&self, e: &LieElement) -> Result<LieElement, LieError> {
        Ok(self.target.reduce(&self.apply_free(e)?))
    }

    fn word_image(&self, w: &[u16], memo: &mut HashMap<Word, LieElement>) -> Result<LieElement, LieError> {
        if let Some(x) = memo.get(w) {
            return Ok(x.clone());
        }
        let x = match standard_factorization(w) {
            None => self.images[w[0] as usize].clone(),
            Some((u, v)) => {
                let a = self.word_image(&u, memo)?;
                let b = self.word_image(&v, memo)?;
                self.target.free.bracket(&a, &b)?
            }
        };
        memo.insert(w.to_vec(), x.clone());
        Ok(x)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LieMorphism<'a>) -> Result<LieMorphism<'a>, LieError> {
        let images = other
            .images
            .iter()
            .map(|x| self.apply_free(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(LieMorphism {
            source: other.source,
            target: self.target,
            images,
        })
    }

    /// Equality on all letters, up to the target ideal.
    pub fn agrees_with(&self, other: &LieMorphism<'_>) -> bool {
        self.images
            .iter()
            .zip(&other.images)
            .all(|(a, b)| self.target.is_zero(&(a - b)))
    }
}

/// The coface map `δ^n_k : {1..n+1} → {1..n}`, `j ↦ j` for `j ≤ k` and
/// `j − 1` otherwise, as the list of images of `1..=n+1`.
pub fn delta(n: u8, k: u8) -> Vec<u8> {
    (1..=n + 1).map(|j| if j <= k { j } else { j - 1 }).collect()
}

/// `(φ ∘ ψ)(j) = φ(ψ(j))`.
pub fn compose_maps(phi: &[u8], psi: &[u8]) -> Vec<u8> {
    psi.iter().map(|&j| phi[j as usize - 1]).collect()
}

/// `θ^φ : t(n) → t(m)` for `φ : {1..m} → {1..n}`, given as `phi[j-1] = φ(j)`.
/// Letters go to sums over fibres; `t_{ii}` picks up the `t_{i'j'}` inside
/// the fibre of `i`.
pub fn theta_phi<'a>(
    source: &'a PresentedLie,
    target: &'a PresentedLie,
    phi: &[u8],
) -> Result<LieMorphism<'a>, LieError> {
    if phi.len() != target.n as usize || phi.iter().any(|&i| i == 0 || i > source.n) {
        return Err(LieError::Invalid(format!(
            "map {phi:?} is not {{1..{}}} -> {{1..{}}}",
            target.n, source.n
        )));
    }
    if source.g != target.g {
        return Err(LieError::Invalid("genus mismatch".into()));
    }
    let fibre = |i: u8| -> Vec<u8> { (1..=phi.len() as u8).filter(|&j| phi[j as usize - 1] == i).collect() };
    let images = source
        .gens
        .iter()
        .map(|&x| {
            let mut e = LieElement::new();
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
    LieMorphism::new(source, target, images)
}

/// The map `{1..n-1+m} → {1..n}` collapsing the block `u..u+m-1` to `u`.
pub fn insertion_map(n: u8, u: u8, m: u8) -> Vec<u8> {
    (1..n + m)
        .map(|j| if j < u { j } else if j < u + m { u } else { j + 1 - m })
        .collect()
}

/// The two halves of the operadic composition `∘_u : t_(g)(U) ⊕ t_bv(W) →
/// t_(g)(U∖{u} ⊔ W)`, with `W` inserted at the position of `u`.
pub fn comp_u<'a>(
    tg: &'a PresentedLie,
    bv: &'a PresentedLie,
    target: &'a PresentedLie,
    u: u8,
) -> Result<(LieMorphism<'a>, LieMorphism<'a>), LieError> {
    let m = bv.n;
    if u == 0 || u > tg.n || target.n != tg.n - 1 + m {
        return Err(LieError::Invalid("incompatible arities".into()));
    }
    let left = theta_phi(tg, target, &insertion_map(tg.n, u, m))?;
    let images = bv
        .gens
        .iter()
        .map(|&x| match x {
            Gen::T(a, b) => target.gen(Gen::t(a + u - 1, b + u - 1)),
            _ => LieElement::new(),
        })
        .collect();
    let right = LieMorphism::new(bv, target, images)?;
    Ok((left, right))
}

/// One row of the dimension table.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DimRow {
    pub algebra: String,
    pub n: u8,
    pub g: u8,
    pub weight: usize,
    pub dim_free: usize,
    pub dim_ideal: usize,
    pub dim_quotient: usize,
}

pub fn dim_rows(p: &PresentedLie) -> Vec<DimRow> {
    p.dims
        .iter()
        .map(|d| DimRow {
            algebra: p.name.clone(),
            n: p.n,
            g: p.g,
            weight: d.weight,
            dim_free: d.dim_free,
            dim_ideal: d.dim_ideal,
            dim_quotient: d.dim_quotient,
        })
        .collect()
}
