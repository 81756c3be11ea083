//! Decorated graphs with odd edges, canonical labeling with orientation
//! signs, and formal linear combinations of graphs.
//!
//! Orientation is a word in the odd objects of a graph: edges, hair blocks
//! whose label is even, hair labels that are odd, and odd decorations. A hair
//! is a block consisting of its edge followed by its label, which is odd when
//! the label is even. The canonical word lists sorted edges, then sorted
//! hairs (edge, then label when odd), then sorted odd decorations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{fmt_rational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("invalid orientation: {0}")]
    InvalidOrientation(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
}

/// Decorations are elements of the reduced cohomology `H̄*` of the surface:
/// `Alpha(i)`, `Beta(i)` of degree -1 and `Omega` of degree -2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoration {
    Alpha(u8),
    Beta(u8),
    Omega,
}

impl Decoration {
    pub fn degree(self) -> i32 {
        match self {
            Decoration::Omega => -2,
            _ => -1,
        }
    }

    pub fn is_odd(self) -> bool {
        !matches!(self, Decoration::Omega)
    }

    pub fn label(self) -> String {
        match self {
            Decoration::Alpha(i) => format!("a{i}"),
            Decoration::Beta(i) => format!("b{i}"),
            Decoration::Omega => "w".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::Invalid(format!("unknown decoration {s:?}"));
        if s == "w" {
            return Ok(Decoration::Omega);
        }
        let (head, tail) = s.split_at(1.min(s.len()));
        let i: u8 = tail.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match head {
            "a" => Ok(Decoration::Alpha(i)),
            "b" => Ok(Decoration::Beta(i)),
            _ => Err(bad()),
        }
    }

    pub fn index(self) -> Option<u8> {
        match self {
            Decoration::Alpha(i) | Decoration::Beta(i) => Some(i),
            Decoration::Omega => None,
        }
    }

    pub fn all(g: u8) -> Vec<Decoration> {
        let mut v = Vec::new();
        for i in 1..=g {
            v.push(Decoration::Alpha(i));
            v.push(Decoration::Beta(i));
        }
        v.push(Decoration::Omega);
        v
    }
}

/// Pairing `<x, y>` on decorations: `<a_i, b_i> = -1`, `<b_i, a_i> = 1`,
/// zero otherwise. `Omega` pairs only with the implicit unit, see
/// [`OMEGA_UNIT_PAIRING`].
pub fn pairing(x: Decoration, y: Decoration) -> i32 {
    match (x, y) {
        (Decoration::Alpha(i), Decoration::Beta(j)) if i == j => -1,
        (Decoration::Beta(i), Decoration::Alpha(j)) if i == j => 1,
        _ => 0,
    }
}

pub const OMEGA_UNIT_PAIRING: i32 = 1;

/// Hair labels are elements of `H`, written as derivations `∂_x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HairLabel {
    D1,
    DAlpha(u8),
    DBeta(u8),
    DOmega,
}

impl HairLabel {
    pub fn degree(self) -> i32 {
        match self {
            HairLabel::D1 => 0,
            HairLabel::DOmega => 2,
            _ => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        matches!(self, HairLabel::DAlpha(_) | HairLabel::DBeta(_))
    }

    pub fn label(self) -> String {
        match self {
            HairLabel::D1 => "d1".into(),
            HairLabel::DAlpha(i) => format!("da{i}"),
            HairLabel::DBeta(i) => format!("db{i}"),
            HairLabel::DOmega => "dw".into(),
        }
    }

    pub fn parse(s: &str) -> Result<Self, GraphError> {
        let bad = || GraphError::Invalid(format!("unknown hair label {s:?}"));
        match s {
            "d1" => return Ok(HairLabel::D1),
            "dw" => return Ok(HairLabel::DOmega),
            _ => {}
        }
        if s.len() < 3 || !s.starts_with('d') {
            return Err(bad());
        }
        let i: u8 = s[2..].parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match &s[1..2] {
            "a" => Ok(HairLabel::DAlpha(i)),
            "b" => Ok(HairLabel::DBeta(i)),
            _ => Err(bad()),
        }
    }

    /// The decoration a hair with this label can be attached to, `None`
    /// meaning the implicit unit present at every vertex.
    pub fn target(self) -> Option<Decoration> {
        match self {
            HairLabel::D1 => None,
            HairLabel::DAlpha(i) => Some(Decoration::Alpha(i)),
            HairLabel::DBeta(i) => Some(Decoration::Beta(i)),
            HairLabel::DOmega => Some(Decoration::Omega),
        }
    }

    /// The label `∂_y` evaluating to one on `y`, `None` being the unit.
    pub fn evaluating(y: Option<Decoration>) -> HairLabel {
        match y {
            None => HairLabel::D1,
            Some(Decoration::Alpha(i)) => HairLabel::DAlpha(i),
            Some(Decoration::Beta(i)) => HairLabel::DBeta(i),
            Some(Decoration::Omega) => HairLabel::DOmega,
        }
    }

    pub fn all(g: u8) -> Vec<HairLabel> {
        let mut v = vec![HairLabel::D1];
        for i in 1..=g {
            v.push(HairLabel::DAlpha(i));
            v.push(HairLabel::DBeta(i));
        }
        v.push(HairLabel::DOmega);
        v
    }
}

/// A graph in canonical form. Its orientation is the canonical word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Graph {
    pub n: u8,
    pub edges: Vec<(u8, u8)>,
    pub hairs: Vec<(u8, HairLabel)>,
    pub decos: Vec<(u8, Decoration)>,
}

/// Odd atoms of an orientation word. Hair atoms refer to the hair table of
/// the owning [`Builder`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Atom {
    E(u8, u8),
    HE(u16),
    HL(u16),
    D(u8, Decoration),
    /// Transient placeholder used while composing graphs; never canonical.
    P(u8),
}

/// A graph with an arbitrary orientation word, used while building terms.
#[derive(Clone, Debug, Default)]
pub struct Builder {
    pub n: usize,
    pub word: Vec<Atom>,
    pub omegas: Vec<u8>,
    pub hairs: Vec<Option<(u8, HairLabel)>>,
}

impl Builder {
    pub fn new(n: usize) -> Self {
        Builder {
            n,
            ..Default::default()
        }
    }

    pub fn push_edge(&mut self, u: usize, v: usize) {
        self.word.push(Atom::E(u as u8, v as u8));
    }

    pub fn push_deco(&mut self, v: usize, d: Decoration) {
        if d.is_odd() {
            self.word.push(Atom::D(v as u8, d));
        } else {
            self.omegas.push(v as u8);
        }
    }

    pub fn push_hair(&mut self, v: usize, l: HairLabel) -> u16 {
        let id = self.hairs.len() as u16;
        self.hairs.push(Some((v as u8, l)));
        self.word.push(Atom::HE(id));
        if l.is_odd() {
            self.word.push(Atom::HL(id));
        }
        id
    }

    pub fn odd_len(&self) -> usize {
        self.word.len()
    }

    /// All stored decorations with vertex: odd ones carry their word index.
    pub fn decorations(&self) -> Vec<(u8, Decoration, Option<usize>)> {
        let mut out: Vec<_> = self
            .word
            .iter()
            .enumerate()
            .filter_map(|(i, a)| match a {
                Atom::D(v, d) => Some((*v, *d, Some(i))),
                _ => None,
            })
            .collect();
        out.extend(self.omegas.iter().map(|v| (*v, Decoration::Omega, None)));
        out
    }

    /// Moves the atoms at the given word positions to the end of the word,
    /// in the given order, and removes them. Returns the Koszul sign.
    pub fn extract_to_end(&mut self, positions: &[usize]) -> i32 {
        let mut target: Vec<usize> = (0..self.word.len())
            .filter(|i| !positions.contains(i))
            .collect();
        target.extend_from_slice(positions);
        let sign = permutation_sign(&target);
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        for p in sorted.into_iter().rev() {
            self.word.remove(p);
        }
        sign
    }

    pub fn to_graph(&self) -> Option<(Graph, i32)> {
        canonicalize(self)
    }
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.n as usize
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_tadpole(&self) -> bool {
        self.edges.iter().any(|(u, v)| u == v)
    }

    /// Builder whose word is the canonical orientation.
    pub fn to_builder(&self) -> Builder {
        let mut b = Builder::new(self.n as usize);
        for (u, v) in &self.edges {
            b.push_edge(*u as usize, *v as usize);
        }
        for (v, l) in &self.hairs {
            b.push_hair(*v as usize, *l);
        }
        for (v, d) in &self.decos {
            b.push_deco(*v as usize, *d);
        }
        b
    }

    /// Number of odd atoms in the orientation word.
    pub fn word_len(&self) -> usize {
        self.edges.len()
            + self
                .hairs
                .iter()
                .map(|(_, l)| if l.is_odd() { 2 } else { 1 })
                .sum::<usize>()
            + self.decos.iter().filter(|(_, d)| d.is_odd()).count()
    }

    pub fn deco_degree(&self) -> i32 {
        self.decos.iter().map(|(_, d)| d.degree()).sum()
    }

    /// Degree in `GC_(g)`: `1 + 2N - k + Σ|f|`.
    pub fn gc_degree(&self) -> i32 {
        1 + 2 * self.n as i32 - self.edges.len() as i32 + self.deco_degree()
    }

    /// Degree as a hairy graph: `2N - k + Σ|f| + Σ|∂|`, hair edges counted
    /// among the `k` edges.
    pub fn hairy_degree(&self) -> i32 {
        2 * self.n as i32 - (self.edges.len() + self.hairs.len()) as i32
            + self.deco_degree()
            + self.hairs.iter().map(|(_, l)| l.degree()).sum::<i32>()
    }

    pub fn valence(&self, v: u8) -> usize {
        let e: usize = self
            .edges
            .iter()
            .map(|(a, b)| (*a == v) as usize + (*b == v) as usize)
            .sum();
        e + self.decos.iter().filter(|(w, _)| *w == v).count()
            + self.hairs.iter().filter(|(w, _)| *w == v).count()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n as usize;
        if n == 0 {
            return true;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (u, v) in &self.edges {
            let a = find(&mut parent, *u as usize);
            let b = find(&mut parent, *v as usize);
            parent[a] = b;
        }
        let r = find(&mut parent, 0);
        (0..n).all(|v| find(&mut parent, v) == r)
    }

    /// Vertices carry at least three incidences (edge ends, hairs and
    /// decorations, the implicit unit not counted).
    pub fn is_trivalent(&self) -> bool {
        (0..self.n).all(|v| self.valence(v) >= 3)
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G{}[", self.n)?;
        let mut parts: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        parts.extend(self.hairs.iter().map(|(v, l)| format!("{v}:{}", l.label())));
        parts.extend(self.decos.iter().map(|(v, d)| format!("{v}.{}", d.label())));
        write!(f, "{}]", parts.join(" "))
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct VertexInvariant {
    nontad: usize,
    tad: usize,
    decos: Vec<Decoration>,
    hairs: Vec<HairLabel>,
}

fn base_invariants(
    n: usize,
    edges: &[(u8, u8)],
    hairs: &[(u8, HairLabel)],
    decos: &[(u8, Decoration)],
) -> Vec<VertexInvariant> {
    let mut inv: Vec<VertexInvariant> = (0..n)
        .map(|_| VertexInvariant {
            nontad: 0,
            tad: 0,
            decos: vec![],
            hairs: vec![],
        })
        .collect();
    for (u, v) in edges {
        if u == v {
            inv[*u as usize].tad += 1;
        } else {
            inv[*u as usize].nontad += 1;
            inv[*v as usize].nontad += 1;
        }
    }
    for (v, d) in decos {
        inv[*v as usize].decos.push(*d);
    }
    for (v, l) in hairs {
        inv[*v as usize].hairs.push(*l);
    }
    for i in inv.iter_mut() {
        i.decos.sort();
        i.hairs.sort();
    }
    inv
}

/// Splits vertices into cells of equal invariant, ordered by invariant.
/// `refine` adds one round of neighbour refinement.
fn vertex_cells(
    n: usize,
    edges: &[(u8, u8)],
    hairs: &[(u8, HairLabel)],
    decos: &[(u8, Decoration)],
    refine: bool,
) -> Vec<Vec<usize>> {
    let base = base_invariants(n, edges, hairs, decos);
    let mut keyed: Vec<(VertexInvariant, Vec<VertexInvariant>, usize)> = (0..n)
        .map(|v| {
            let mut nb = Vec::new();
            if refine {
                for (a, b) in edges {
                    if *a as usize == v && a != b {
                        nb.push(base[*b as usize].clone());
                    } else if *b as usize == v && a != b {
                        nb.push(base[*a as usize].clone());
                    }
                }
                nb.sort();
            }
            (base[v].clone(), nb, v)
        })
        .collect();
    keyed.sort();
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for i in 0..keyed.len() {
        if i > 0 && keyed[i].0 == keyed[i - 1].0 && keyed[i].1 == keyed[i - 1].1 {
            cells.last_mut().unwrap().push(keyed[i].2);
        } else {
            cells.push(vec![keyed[i].2]);
        }
    }
    cells
}

struct Collected {
    n: usize,
    edges: Vec<(u8, u8)>,
    hairs: Vec<(u8, HairLabel, u16)>,
    decos: Vec<(u8, Decoration)>,
}

fn collect(b: &Builder) -> Collected {
    let mut edges = Vec::new();
    let mut decos = Vec::new();
    for a in &b.word {
        match a {
            Atom::E(u, v) => edges.push(((*u).min(*v), (*u).max(*v))),
            Atom::D(v, d) => decos.push((*v, *d)),
            _ => {}
        }
    }
    decos.extend(b.omegas.iter().map(|v| (*v, Decoration::Omega)));
    let hairs = b
        .hairs
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.map(|(v, l)| (v, l, i as u16)))
        .collect();
    Collected {
        n: b.n,
        edges,
        hairs,
        decos,
    }
}

fn has_odd_symmetry_duplicates(c: &Collected) -> bool {
    let mut e = c.edges.clone();
    e.sort();
    if e.windows(2).any(|w| w[0] == w[1]) {
        return true;
    }
    let mut d: Vec<_> = c.decos.iter().filter(|(_, d)| d.is_odd()).cloned().collect();
    d.sort();
    if d.windows(2).any(|w| w[0] == w[1]) {
        return true;
    }
    let mut h: Vec<_> = c
        .hairs
        .iter()
        .filter(|(_, l, _)| !l.is_odd())
        .map(|(v, l, _)| (*v, *l))
        .collect();
    h.sort();
    h.windows(2).any(|w| w[0] == w[1])
}

/// Canonical form of `b` together with the sign relating its word to the
/// canonical word, or `None` when the graph has an odd automorphism.
pub fn canonicalize(b: &Builder) -> Option<(Graph, i32)> {
    canonicalize_with(b, true)
}

pub fn canonicalize_with(b: &Builder, refine: bool) -> Option<(Graph, i32)> {
    let c = collect(b);
    debug_assert!(c.edges.iter().all(|(u, v)| (*v as usize) < c.n && (*u as usize) < c.n));
    if has_odd_symmetry_duplicates(&c) {
        return None;
    }
    let hair_plain: Vec<(u8, HairLabel)> = c.hairs.iter().map(|(v, l, _)| (*v, *l)).collect();
    let cells = vertex_cells(c.n, &c.edges, &hair_plain, &c.decos, refine);
    let mut perm = vec![0usize; c.n];
    let mut best: Option<(Graph, i32)> = None;
    let mut zero = false;
    search(&cells, 0, 0, &mut perm, &mut |p| {
        let (g, s) = relabel(b, &c, p);
        match &best {
            None => best = Some((g, s)),
            Some((bg, bs)) => match g.cmp(bg) {
                std::cmp::Ordering::Less => {
                    best = Some((g, s));
                    zero = false;
                }
                std::cmp::Ordering::Equal => {
                    if s != *bs {
                        zero = true;
                    }
                }
                std::cmp::Ordering::Greater => {}
            },
        }
    });
    if zero {
        return None;
    }
    if c.n == 0 {
        let (g, s) = relabel(b, &c, &[]);
        return Some((g, s));
    }
    best
}

fn search(
    cells: &[Vec<usize>],
    ci: usize,
    offset: usize,
    perm: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]),
) {
    if ci == cells.len() {
        f(perm);
        return;
    }
    let cell = &cells[ci];
    let mut order: Vec<usize> = cell.clone();
    permute_rec(&mut order, 0, &mut |o| {
        for (k, v) in o.iter().enumerate() {
            perm[*v] = offset + k;
        }
        search(cells, ci + 1, offset + cell.len(), perm, f);
    });
}

fn permute_rec(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == a.len() {
        f(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permute_rec(a, k + 1, f);
        a.swap(k, i);
    }
}

/// Parity of a permutation given as a list of distinct indices.
pub fn permutation_sign(p: &[usize]) -> i32 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut j = i;
        let mut len = 0;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

fn relabel(b: &Builder, c: &Collected, p: &[usize]) -> (Graph, i32) {
    let m = |v: u8| p[v as usize] as u8;
    // Sort key for each word atom: (class, object, hair tiebreak, sub).
    type Key = (u8, (u8, u8, u8, u8), u16, u8);
    let hair_of = |id: u16| b.hairs[id as usize].expect("live hair");
    let code_l = |l: HairLabel| -> (u8, u8) {
        match l {
            HairLabel::D1 => (0, 0),
            HairLabel::DAlpha(i) => (1, i),
            HairLabel::DBeta(i) => (2, i),
            HairLabel::DOmega => (3, 0),
        }
    };
    let code_d = |d: Decoration| -> (u8, u8) {
        match d {
            Decoration::Alpha(i) => (0, i),
            Decoration::Beta(i) => (1, i),
            Decoration::Omega => (2, 0),
        }
    };
    let keys: Vec<Key> = b
        .word
        .iter()
        .map(|a| match a {
            Atom::E(u, v) => {
                let (x, y) = (m(*u), m(*v));
                (0, (x.min(y), x.max(y), 0, 0), 0, 0)
            }
            Atom::HE(id) | Atom::HL(id) => {
                let (v, l) = hair_of(*id);
                let (a1, a2) = code_l(l);
                let sub = matches!(a, Atom::HL(_)) as u8;
                (1, (m(v), a1, a2, 0), *id, sub)
            }
            Atom::D(v, d) => {
                let (a1, a2) = code_d(*d);
                (2, (m(*v), a1, a2, 0), 0, 0)
            }
            Atom::P(_) => panic!("placeholder atom left in a word"),
        })
        .collect();
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|x, y| keys[*x].cmp(&keys[*y]));
    // The canonical word is word[idx[0]] word[idx[1]] ...; the sign of the
    // rearrangement is the sign of idx as a permutation.
    let sign = permutation_sign(&idx);
    let mut edges: Vec<(u8, u8)> = c
        .edges
        .iter()
        .map(|(u, v)| {
            let (x, y) = (m(*u), m(*v));
            (x.min(y), x.max(y))
        })
        .collect();
    edges.sort();
    let mut hairs: Vec<(u8, HairLabel)> = c.hairs.iter().map(|(v, l, _)| (m(*v), *l)).collect();
    hairs.sort();
    let mut decos: Vec<(u8, Decoration)> = c.decos.iter().map(|(v, d)| (m(*v), *d)).collect();
    decos.sort();
    (
        Graph {
            n: c.n as u8,
            edges,
            hairs,
            decos,
        },
        sign,
    )
}

/// Canonical form by trying every vertex permutation, with no pruning.
/// Slow; kept as an independent check of [`canonicalize`].
pub fn canonicalize_brute(b: &Builder) -> Option<(Graph, i32)> {
    let c = collect(b);
    if has_odd_symmetry_duplicates(&c) {
        return None;
    }
    let all: Vec<usize> = (0..c.n).collect();
    let mut best: Option<(Graph, i32)> = None;
    let mut zero = false;
    let mut order = all.clone();
    permute_rec(&mut order, 0, &mut |o| {
        let (g, s) = relabel(b, &c, o);
        match &best {
            None => best = Some((g, s)),
            Some((bg, bs)) => match g.cmp(bg) {
                std::cmp::Ordering::Less => {
                    best = Some((g, s));
                    zero = false;
                }
                std::cmp::Ordering::Equal => zero |= s != *bs,
                std::cmp::Ordering::Greater => {}
            },
        }
    });
    if zero {
        None
    } else if c.n == 0 {
        Some(relabel(b, &c, &[]))
    } else {
        best
    }
}

/// Finite formal linear combination with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinComb<K: Ord> {
    pub terms: BTreeMap<K, Rational>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Rational) -> Self {
        let mut v = Self::new();
        v.add(k, c);
        v
    }

    pub fn add(&mut self, k: K, c: Rational) {
        if c.is_zero() {
            return;
        }
        let remove = match self.terms.get_mut(&k) {
            Some(e) => {
                *e += c;
                e.is_zero()
            }
            None => {
                self.terms.insert(k.clone(), c);
                false
            }
        };
        if remove {
            self.terms.remove(&k);
        }
    }

    pub fn add_scaled(&mut self, other: &LinComb<K>, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.terms {
            self.add(k.clone(), v * c);
        }
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &K) -> Rational {
        self.terms.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear<L: Ord + Clone>(&self, f: impl Fn(&K) -> LinComb<L>) -> LinComb<L> {
        let mut out = LinComb::new();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&K) -> bool) -> Self {
        LinComb {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl<K: Ord + Clone> std::ops::Add for &LinComb<K> {
    type Output = LinComb<K>;
    fn add(self, rhs: Self) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

impl<K: Ord + Clone> std::ops::Sub for &LinComb<K> {
    type Output = LinComb<K>;
    fn sub(self, rhs: Self) -> LinComb<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, &(-Rational::one()));
        out
    }
}

impl<K: Ord + Clone + fmt::Display> fmt::Display for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            let s = fmt_rational(c);
            if first {
                write!(f, "{s}*{k}")?;
            } else if c.is_negative() {
                write!(f, " - {}*{k}", fmt_rational(&-c))?;
            } else {
                write!(f, " + {s}*{k}")?;
            }
            first = false;
        }
        Ok(())
    }
}

pub type GraphVector = LinComb<Graph>;

impl GraphVector {
    /// Adds `c * b` after canonicalization. Graphs with tadpoles are
    /// dropped unless `tadpoles` is set.
    pub fn add_builder(&mut self, b: &Builder, c: &Rational, tadpoles: bool) {
        if c.is_zero() {
            return;
        }
        if let Some((g, s)) = canonicalize(b) {
            if !tadpoles && g.has_tadpole() {
                return;
            }
            let v = if s > 0 { c.clone() } else { -c };
            self.add(g, v);
        }
    }
}

/// JSON form of a graph with an explicit orientation.
///
/// `odd_order` lists object indices: edges are `0..E`, hairs `E..E+H`,
/// decorations `E+H..E+H+D`. A hair appears iff its label is even (the
/// block is then odd); a decoration appears iff it is odd.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub decorations: Vec<(usize, String)>,
    #[serde(default)]
    pub hairs: Vec<(usize, String)>,
    pub genus: u8,
    pub odd_order: Vec<usize>,
}

impl RawGraph {
    pub fn to_builder(&self) -> Result<Builder, GraphError> {
        let ne = self.edges.len();
        let nh = self.hairs.len();
        let nd = self.decorations.len();
        let mut b = Builder::new(self.vertices);
        let check_v = |v: usize| {
            if v >= self.vertices {
                Err(GraphError::Invalid(format!("vertex {v} out of range")))
            } else {
                Ok(())
            }
        };
        let mut decos = Vec::with_capacity(nd);
        for (v, s) in &self.decorations {
            check_v(*v)?;
            let d = Decoration::parse(s)?;
            if let Some(i) = d.index() {
                if i > self.genus {
                    return Err(GraphError::Invalid(format!("{s} exceeds genus")));
                }
            }
            decos.push((*v, d));
        }
        let mut hairs = Vec::with_capacity(nh);
        for (v, s) in &self.hairs {
            check_v(*v)?;
            hairs.push((*v, HairLabel::parse(s)?));
        }
        for (u, v) in &self.edges {
            check_v(*u)?;
            check_v(*v)?;
        }
        let mut seen = vec![false; ne + nh + nd];
        let mut hair_ids = vec![None; nh];
        for &o in &self.odd_order {
            if o >= seen.len() || seen[o] {
                return Err(GraphError::InvalidOrientation(format!(
                    "object {o} repeated or out of range"
                )));
            }
            seen[o] = true;
            if o < ne {
                let (u, v) = self.edges[o];
                b.push_edge(u, v);
            } else if o < ne + nh {
                let (v, l) = hairs[o - ne];
                if l.is_odd() {
                    return Err(GraphError::InvalidOrientation(format!(
                        "hair {o} is an even block"
                    )));
                }
                hair_ids[o - ne] = Some(b.push_hair(v, l));
            } else {
                let (v, d) = decos[o - ne - nh];
                if !d.is_odd() {
                    return Err(GraphError::InvalidOrientation(format!(
                        "decoration {o} is even"
                    )));
                }
                b.push_deco(v, d);
            }
        }
        for o in 0..ne {
            if !seen[o] {
                return Err(GraphError::InvalidOrientation(format!("edge {o} missing")));
            }
        }
        for (i, (v, l)) in hairs.iter().enumerate() {
            if hair_ids[i].is_none() {
                if !l.is_odd() {
                    return Err(GraphError::InvalidOrientation(format!(
                        "hair {} missing",
                        ne + i
                    )));
                }
                b.push_hair(*v, *l);
            }
        }
        for (i, (v, d)) in decos.iter().enumerate() {
            if d.is_odd() && !seen[ne + nh + i] {
                return Err(GraphError::InvalidOrientation(format!(
                    "decoration {} missing",
                    ne + nh + i
                )));
            }
            if !d.is_odd() {
                b.push_deco(*v, *d);
            }
        }
        Ok(b)
    }

    pub fn from_graph(g: &Graph, genus: u8) -> RawGraph {
        let ne = g.edges.len();
        let nh = g.hairs.len();
        let mut odd = Vec::new();
        odd.extend(0..ne);
        for (i, (_, l)) in g.hairs.iter().enumerate() {
            if !l.is_odd() {
                odd.push(ne + i);
            }
        }
        for (i, (_, d)) in g.decos.iter().enumerate() {
            if d.is_odd() {
                odd.push(ne + nh + i);
            }
        }
        RawGraph {
            vertices: g.n as usize,
            edges: g.edges.iter().map(|(u, v)| (*u as usize, *v as usize)).collect(),
            decorations: g.decos.iter().map(|(v, d)| (*v as usize, d.label())).collect(),
            hairs: g.hairs.iter().map(|(v, l)| (*v as usize, l.label())).collect(),
            genus,
            odd_order: odd,
        }
    }

    pub fn from_json(s: &str) -> Result<RawGraph, GraphError> {
        serde_json::from_str(s).map_err(|e| GraphError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serializes")
    }
}

pub fn sign_to_rational(s: i32) -> Rational {
    if s > 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(n: usize, edges: &[(usize, usize)], decos: &[(usize, &str)], order: &[usize]) -> RawGraph {
        RawGraph {
            vertices: n,
            edges: edges.to_vec(),
            decorations: decos.iter().map(|(v, s)| (*v, s.to_string())).collect(),
            hairs: vec![],
            genus: 2,
            odd_order: order.to_vec(),
        }
    }

    #[test]
    fn parallel_edges_vanish() {
        let b = raw(2, &[(0, 1), (0, 1)], &[], &[0, 1]).to_builder().unwrap();
        assert!(canonicalize(&b).is_none());
    }

    #[test]
    fn swapping_two_edges_flips_sign() {
        let a = raw(3, &[(0, 1), (1, 2)], &[(0, "w")], &[0, 1]).to_builder().unwrap();
        let b = raw(3, &[(0, 1), (1, 2)], &[(0, "w")], &[1, 0]).to_builder().unwrap();
        let (ga, sa) = canonicalize(&a).unwrap();
        let (gb, sb) = canonicalize(&b).unwrap();
        assert_eq!(ga, gb);
        assert_eq!(sa, -sb);
    }

    #[test]
    fn odd_automorphism_vanishes() {
        // The reflection of the path 0-1-2 swaps its two edges.
        let b = raw(3, &[(0, 1), (1, 2)], &[], &[0, 1]).to_builder().unwrap();
        assert!(canonicalize(&b).is_none());
        assert!(canonicalize_brute(&b).is_none());
    }

    #[test]
    fn repeated_odd_decoration_vanishes() {
        let b = raw(1, &[], &[(0, "a1"), (0, "a1")], &[0, 1]).to_builder().unwrap();
        assert!(canonicalize(&b).is_none());
        let b = raw(1, &[], &[(0, "w"), (0, "w")], &[]).to_builder().unwrap();
        assert!(canonicalize(&b).is_some());
    }

    #[test]
    fn json_orientation_errors() {
        let r = raw(2, &[(0, 1)], &[(0, "w")], &[0, 1]);
        assert!(matches!(r.to_builder(), Err(GraphError::InvalidOrientation(_))));
        let r = raw(2, &[(0, 1)], &[], &[]);
        assert!(matches!(r.to_builder(), Err(GraphError::InvalidOrientation(_))));
    }

    #[test]
    fn degrees() {
        let g = Graph {
            n: 1,
            edges: vec![],
            hairs: vec![],
            decos: vec![(0, Decoration::Omega)],
        };
        assert_eq!(g.gc_degree(), 1);
        let h = Graph {
            n: 1,
            edges: vec![],
            hairs: vec![(0, HairLabel::DOmega)],
            decos: vec![],
        };
        assert_eq!(h.hairy_degree(), 3);
    }
}
