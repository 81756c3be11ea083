//! The dg commutative algebra `Mo_(g)(r)` as a per-degree quotient of the
//! free graded commutative algebra on `w^{(ij)}, a_l^{(i)}, b_l^{(i)}, ν^{(i)}`,
//! and the Maurer-Cartan element `m_r` in `Mo_(g)(r) ⊗ t_(g)(r)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{permutation_sign, LinComb};
use crate::lie::{t_g_presentation, t_nonframed_presentation, Gen, GradedLie, LieError, QVec};
use crate::linalg::{q, qi, Echelon, Rational, SparseVec};

#[derive(Debug, Error)]
pub enum MoError {
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("degree {degree} exceeds the precomputed range {max}")]
    DegreeOverflow { degree: usize, max: usize },
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MoGen {
    /// `w^{(ij)}`, `i ≤ j`.
    W(u8, u8),
    /// `a_l^{(i)}` stored as `(l, i)`.
    A(u8, u8),
    B(u8, u8),
    Nu(u8),
}

impl MoGen {
    pub fn w(i: u8, j: u8) -> MoGen {
        MoGen::W(i.min(j), i.max(j))
    }

    pub fn degree(self) -> usize {
        match self {
            MoGen::Nu(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for MoGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoGen::W(i, j) => write!(f, "w{i}{j}"),
            MoGen::A(l, i) => write!(f, "a{l}^{i}"),
            MoGen::B(l, i) => write!(f, "b{l}^{i}"),
            MoGen::Nu(i) => write!(f, "nu{i}"),
        }
    }
}

/// Odd generators in increasing order times a multiset of `ν`'s.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub odd: Vec<u16>,
    pub nu: Vec<u8>,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial { odd: Vec::new(), nu: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.odd.len() + 2 * self.nu.len()
    }
}

pub type MoElement = LinComb<Monomial>;

/// Construction flags.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoOptions {
    /// Include the `w^{(ii)}`; without them this is the unframed `Mo(r)`.
    pub framed: bool,
    /// Impose `a_l^{(i)} b_l^{(i)} = ν^{(i)}`. The relations
    /// `a_k^{(i)} a_l^{(i)} = b_k^{(i)} b_l^{(i)} = 0` and
    /// `a_k^{(i)} b_l^{(i)} = 0` (k ≠ l) are always imposed.
    pub ab_relation: bool,
}

impl Default for MoOptions {
    fn default() -> Self {
        MoOptions { framed: true, ab_relation: true }
    }
}

struct Piece {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
    ideal: Echelon,
}

pub struct Mo {
    pub r: u8,
    pub g: u8,
    pub options: MoOptions,
    pub odd: Vec<MoGen>,
    odd_index: HashMap<MoGen, u16>,
    pub max_degree: usize,
    pieces: Vec<Piece>,
}

impl Mo {
    pub fn new(r: u8, g: u8, max_degree: usize, options: MoOptions) -> Result<Mo, MoError> {
        if r == 0 || g == 0 {
            return Err(MoError::Invalid("r and g must be at least 1".into()));
        }
        let mut odd = Vec::new();
        for i in 1..=r {
            for j in i..=r {
                if i != j || options.framed {
                    odd.push(MoGen::W(i, j));
                }
            }
        }
        for i in 1..=r {
            for l in 1..=g {
                odd.push(MoGen::A(l, i));
                odd.push(MoGen::B(l, i));
            }
        }
        let odd_index = odd.iter().enumerate().map(|(k, x)| (*x, k as u16)).collect();
        let mut mo = Mo {
            r,
            g,
            options,
            odd,
            odd_index,
            max_degree,
            pieces: Vec::new(),
        };
        let relations = mo.relations();
        for d in 0..=max_degree {
            let monomials = mo.monomials(d);
            let index: HashMap<Monomial, usize> = monomials.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
            let mut ideal = Echelon::new();
            if d >= 2 {
                for m in &mo.pieces[d - 2].monomials {
                    for rel in &relations {
                        let prod = mo.mult_free(&MoElement::single(m.clone(), Rational::one()), rel);
                        let v: SparseVec = prod.iter().map(|(x, c)| (index[x], c.clone())).collect();
                        if !v.is_empty() {
                            ideal.insert(&v);
                        }
                    }
                }
            }
            mo.pieces.push(Piece { monomials, index, ideal });
        }
        Ok(mo)
    }

    fn monomials(&self, d: usize) -> Vec<Monomial> {
        let mut out = Vec::new();
        for k in 0..=d / 2 {
            let nus = multisets(self.r, k);
            let odds = subsets(self.odd.len(), d - 2 * k);
            for nu in &nus {
                for o in &odds {
                    out.push(Monomial { odd: o.clone(), nu: nu.clone() });
                }
            }
        }
        out.sort();
        out
    }

    /// The degree-two defining relations.
    pub fn relations(&self) -> Vec<MoElement> {
        let (r, g) = (self.r, self.g);
        let gen = |x: MoGen| self.gen(x);
        let mut out = Vec::new();
        if self.options.ab_relation {
            for i in 1..=r {
                for l in 1..=g {
                    let ab = self.mult_free(&gen(MoGen::A(l, i)), &gen(MoGen::B(l, i)));
                    out.push(&ab - &gen(MoGen::Nu(i)));
                }
            }
        }
        // Products of degree-one classes at a single point follow the
        // cohomology ring of the surface: only a_l b_l survives.
        for i in 1..=r {
            for k in 1..=g {
                for l in 1..=g {
                    if k != l {
                        out.push(self.mult_free(&gen(MoGen::A(k, i)), &gen(MoGen::B(l, i))));
                    }
                    if k < l {
                        out.push(self.mult_free(&gen(MoGen::A(k, i)), &gen(MoGen::A(l, i))));
                        out.push(self.mult_free(&gen(MoGen::B(k, i)), &gen(MoGen::B(l, i))));
                    }
                }
            }
        }
        for i in 1..=r {
            for j in i + 1..=r {
                let w = gen(MoGen::w(i, j));
                for l in 1..=g {
                    for e in [MoGen::A as fn(u8, u8) -> MoGen, MoGen::B] {
                        out.push(&self.mult_free(&gen(e(l, i)), &w) - &self.mult_free(&gen(e(l, j)), &w));
                    }
                }
            }
        }
        for i in 1..=r {
            for j in i + 1..=r {
                for k in j + 1..=r {
                    let (wij, wjk, wki) = (gen(MoGen::w(i, j)), gen(MoGen::w(j, k)), gen(MoGen::w(k, i)));
                    let s = &(&self.mult_free(&wij, &wjk) + &self.mult_free(&wjk, &wki)) + &self.mult_free(&wki, &wij);
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn gen(&self, x: MoGen) -> MoElement {
        let x = match x {
            MoGen::W(i, j) => MoGen::w(i, j),
            o => o,
        };
        match x {
            MoGen::Nu(i) => MoElement::single(Monomial { odd: Vec::new(), nu: vec![i] }, Rational::one()),
            _ => match self.odd_index.get(&x) {
                Some(&k) => MoElement::single(Monomial { odd: vec![k], nu: Vec::new() }, Rational::one()),
                None => MoElement::new(),
            },
        }
    }

    pub fn one(&self) -> MoElement {
        MoElement::single(Monomial::one(), Rational::one())
    }

    fn mult_monomials(a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut odd: Vec<u16> = a.odd.iter().chain(&b.odd).copied().collect();
        let perm: Vec<usize> = {
            let mut idx: Vec<usize> = (0..odd.len()).collect();
            idx.sort_by_key(|&k| odd[k]);
            idx
        };
        let sign = permutation_sign(&perm);
        odd.sort();
        if odd.windows(2).any(|w| w[0] == w[1]) {
            return None;
        }
        let mut nu: Vec<u8> = a.nu.iter().chain(&b.nu).copied().collect();
        nu.sort();
        Some((Monomial { odd, nu }, sign < 0))
    }

    /// Product in the free graded commutative algebra.
    pub fn mult_free(&self, a: &MoElement, b: &MoElement) -> MoElement {
        let mut out = MoElement::new();
        for (x, c) in a.iter() {
            for (y, d) in b.iter() {
                if let Some((m, neg)) = Mo::mult_monomials(x, y) {
                    let v = c * d;
                    out.add(m, if neg { -v } else { v });
                }
            }
        }
        out
    }

    pub fn mult(&self, a: &MoElement, b: &MoElement) -> Result<MoElement, MoError> {
        self.reduce(&self.mult_free(a, b))
    }

    fn diff_gen(&self, x: MoGen) -> MoElement {
        match x {
            MoGen::W(i, j) if i == j => self.gen(MoGen::Nu(i)).scaled(&qi(2 - 2 * self.g as i64)),
            MoGen::W(i, j) => {
                let mut out = &self.gen(MoGen::Nu(i)) + &self.gen(MoGen::Nu(j));
                for l in 1..=self.g {
                    let ab = self.mult_free(&self.gen(MoGen::A(l, i)), &self.gen(MoGen::B(l, j)));
                    let ba = self.mult_free(&self.gen(MoGen::B(l, i)), &self.gen(MoGen::A(l, j)));
                    out = &(&out - &ab) + &ba;
                }
                out
            }
            _ => MoElement::new(),
        }
    }

    /// The differential on the free algebra, a degree +1 derivation.
    pub fn diff_free(&self, a: &MoElement) -> MoElement {
        let mut out = MoElement::new();
        for (m, c) in a.iter() {
            for (p, &k) in m.odd.iter().enumerate() {
                let dx = self.diff_gen(self.odd[k as usize]);
                if dx.is_zero() {
                    continue;
                }
                let mut rest = m.clone();
                rest.odd.remove(p);
                // Move the odd generator to the front, then replace it.
                let sign = if p % 2 == 0 { c.clone() } else { -c.clone() };
                let term = self.mult_free(&dx, &MoElement::single(rest, Rational::one()));
                out.add_scaled(&term, &sign);
            }
        }
        out
    }

    pub fn diff(&self, a: &MoElement) -> Result<MoElement, MoError> {
        self.reduce(&self.diff_free(a))
    }

    fn piece(&self, d: usize) -> Result<&Piece, MoError> {
        self.pieces.get(d).ok_or(MoError::DegreeOverflow { degree: d, max: self.max_degree })
    }

    /// Normal form modulo the relation ideal.
    pub fn reduce(&self, a: &MoElement) -> Result<MoElement, MoError> {
        let mut by_degree: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (m, c) in a.iter() {
            let d = m.degree();
            let p = self.piece(d)?;
            by_degree.entry(d).or_default().insert(p.index[m], c.clone());
        }
        let mut out = MoElement::new();
        for (d, v) in by_degree {
            let p = &self.pieces[d];
            for (k, c) in p.ideal.reduce(&v) {
                out.add(p.monomials[k].clone(), c);
            }
        }
        Ok(out)
    }

    /// Basis of the degree-`d` piece: monomials that are not pivots.
    pub fn basis(&self, d: usize) -> Result<Vec<Monomial>, MoError> {
        let p = self.piece(d)?;
        Ok((0..p.monomials.len())
            .filter(|k| !p.ideal.is_pivot(*k))
            .map(|k| p.monomials[k].clone())
            .collect())
    }

    pub fn dim(&self, d: usize) -> Result<usize, MoError> {
        let p = self.piece(d)?;
        Ok(p.monomials.len() - p.ideal.rank())
    }

    /// Dimension of the span of the relation multiples in degree `d`.
    pub fn ideal_dim(&self, d: usize) -> Result<usize, MoError> {
        Ok(self.piece(d)?.ideal.rank())
    }

    pub fn format(&self, a: &MoElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        a.iter()
            .map(|(m, c)| {
                let mut s: Vec<String> = m.odd.iter().map(|&k| self.odd[k as usize].to_string()).collect();
                s.extend(m.nu.iter().map(|i| format!("nu{i}")));
                let body = if s.is_empty() { "1".to_string() } else { s.join("*") };
                format!("{}*{}", crate::linalg::fmt_rational(c), body)
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<u16>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            cur.push(x as u16);
            go(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn multisets(r: u8, k: usize) -> Vec<Vec<u8>> {
    fn go(start: u8, r: u8, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..=r {
            cur.push(x);
            go(x, r, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, r, k, &mut Vec::new(), &mut out);
    out
}

/// One `(Mo-degree, t-weight)` block of the residual.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct McBlock {
    pub r: u8,
    pub g: u8,
    pub block: [usize; 2],
    pub residual_dim: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct McReport {
    pub r: u8,
    pub g: u8,
    pub framed: bool,
    pub ab_relation: bool,
    pub max_weight: usize,
    pub blocks: Vec<McBlock>,
}

impl McReport {
    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.residual_dim == 0)
    }
}

/// An element of `Mo ⊗ t` as a list of simple tensors.
pub type Tensor = Vec<(MoElement, QVec)>;

/// `m_r = Σ w^{(ij)} ⊗ t_ij + Σ w^{(ii)} ⊗ t_ii + Σ a ⊗ x + Σ b ⊗ y`.
pub fn mc_element(mo: &Mo, t: &GradedLie) -> Tensor {
    let mut m = Vec::new();
    for i in 1..=mo.r {
        for j in i..=mo.r {
            let w = mo.gen(MoGen::W(i, j));
            if !w.is_zero() {
                m.push((w, t.gen(Gen::t(i, j))));
            }
        }
    }
    for i in 1..=mo.r {
        for l in 1..=mo.g {
            m.push((mo.gen(MoGen::A(l, i)), t.gen(Gen::X(l, i))));
            m.push((mo.gen(MoGen::B(l, i)), t.gen(Gen::Y(l, i))));
        }
    }
    m
}

/// `d m + ½[m, m]` reduced in both factors, indexed by (monomial, t basis).
pub fn mc_residual(mo: &Mo, t: &GradedLie, m: &Tensor) -> Result<BTreeMap<(Monomial, (usize, usize)), Rational>, MoError> {
    let mut out: BTreeMap<(Monomial, (usize, usize)), Rational> = BTreeMap::new();
    let mut push = |a: &MoElement, u: &QVec, c: &Rational| {
        for (x, p) in a.iter() {
            for (y, s) in u.iter() {
                let e = out.entry((x.clone(), *y)).or_insert_with(Rational::zero);
                *e += c * p * s;
            }
        }
    };
    for (a, u) in m {
        push(&mo.diff(a)?, u, &Rational::one());
    }
    let half = q(1, 2);
    for (a, u) in m {
        for (b, v) in m {
            let w = t.weight_of(u).unwrap_or(0) + t.weight_of(v).unwrap_or(0);
            if w > t.max_weight {
                continue;
            }
            // t has degree zero, so no Koszul sign appears.
            let ab = mo.mult(a, b)?;
            let uv = t.bracket(u, v)?;
            push(&ab, &uv, &half);
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}

/// Residual report for `m_r` with `t_(g)(r)` (or the non-framed
/// `t^{non-fr}_(1)(r)` when `options.framed` is false) truncated at
/// `max_weight`.
pub fn mc_check_xi(r: u8, g: u8, max_weight: usize, options: MoOptions) -> Result<McReport, MoError> {
    let pres = if options.framed {
        t_g_presentation(r, g, true)?
    } else {
        if g != 1 {
            return Err(MoError::Invalid("the unframed variant needs g = 1".into()));
        }
        t_nonframed_presentation(r)?
    };
    let t = GradedLie::new(&pres, max_weight)?;
    let mo = Mo::new(r, g, 3, options)?;
    let m = mc_element(&mo, &t);
    let res = mc_residual(&mo, &t, &m)?;
    let mut blocks = Vec::new();
    for w in 1..=max_weight {
        let n = res.keys().filter(|(_, (k, _))| *k == w).count();
        blocks.push(McBlock { r, g, block: [2, w], residual_dim: n });
    }
    Ok(McReport {
        r,
        g,
        framed: options.framed,
        ab_relation: options.ab_relation,
        max_weight,
        blocks,
    })
}
