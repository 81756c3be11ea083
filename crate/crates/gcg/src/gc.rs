//! The dg Lie algebras `GC'_(g)` and `GC''_(g)` of decorated graphs, the
//! Maurer-Cartan element `z`, the twisted differential and the extension by
//! `sp'(H*)`.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{
    canonicalize, pairing, Atom, Builder, Decoration, Graph, GraphVector, OMEGA_UNIT_PAIRING,
};
use crate::linalg::{self, q, qi, Rational, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GcError {
    #[error("Maurer-Cartan equation fails: {0}")]
    NotMaurerCartan(String),
    #[error("{0}")]
    Linalg(#[from] linalg::LinalgError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Which graph complex: the genus and whether tadpoles are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Gc {
    pub g: u8,
    pub tadpoles: bool,
}

fn rat(s: i32) -> Rational {
    qi(s as i64)
}

fn word_parity(g: &Graph) -> usize {
    g.word_len() % 2
}

/// Splits vertex `v` of `b` in all ways, the new edge appended last, and
/// adds `c` times each result to `out`. Each unordered splitting is counted
/// once, so the sum over subsets carries a factor 1/2.
fn split_vertex(b: &Builder, v: usize, c: &Rational, tadpoles: bool, out: &mut GraphVector) {
    #[derive(Clone, Copy)]
    enum Inc {
        End(usize, bool),
        Omega(usize),
        Hair(usize),
    }
    let mut inc = Vec::new();
    for (i, a) in b.word.iter().enumerate() {
        match a {
            Atom::E(x, y) => {
                if *x as usize == v {
                    inc.push(Inc::End(i, false));
                }
                if *y as usize == v {
                    inc.push(Inc::End(i, true));
                }
            }
            Atom::D(x, _) if *x as usize == v => inc.push(Inc::End(i, false)),
            _ => {}
        }
    }
    for (i, w) in b.omegas.iter().enumerate() {
        if *w as usize == v {
            inc.push(Inc::Omega(i));
        }
    }
    for (i, h) in b.hairs.iter().enumerate() {
        if let Some((w, _)) = h {
            if *w as usize == v {
                inc.push(Inc::Hair(i));
            }
        }
    }
    let nv = b.n as u8;
    let half = c * q(1, 2);
    for mask in 0u32..(1u32 << inc.len()) {
        let mut nb = b.clone();
        nb.n += 1;
        for (k, x) in inc.iter().enumerate() {
            if mask & (1 << k) == 0 {
                continue;
            }
            match *x {
                Inc::End(i, second) => match &mut nb.word[i] {
                    Atom::E(p, q) => {
                        if second {
                            *q = nv;
                        } else {
                            *p = nv;
                        }
                    }
                    Atom::D(p, _) => *p = nv,
                    _ => unreachable!(),
                },
                Inc::Omega(i) => nb.omegas[i] = nv,
                Inc::Hair(i) => {
                    if let Some((w, _)) = &mut nb.hairs[i] {
                        *w = nv;
                    }
                }
            }
        }
        nb.push_edge(v, nv as usize);
        out.add_builder(&nb, &half, tadpoles);
    }
}

/// Vertex splitting on every vertex; hairs are redistributed like edges.
pub fn split_graph(g: &Graph, tadpoles: bool) -> GraphVector {
    let b = g.to_builder();
    let mut out = GraphVector::new();
    for v in 0..b.n {
        split_vertex(&b, v, &Rational::one(), tadpoles, &mut out);
    }
    out
}

/// Pairs of decorations of `b` contracted to an edge, `ω` paired with the
/// implicit unit at every vertex, including its own.
fn pair_all(b: &Builder, c: &Rational, tadpoles: bool, out: &mut GraphVector) {
    let odd: Vec<(usize, u8, Decoration)> = b
        .word
        .iter()
        .enumerate()
        .filter_map(|(i, a)| match a {
            Atom::D(v, d) => Some((i, *v, *d)),
            _ => None,
        })
        .collect();
    for x in 0..odd.len() {
        for y in x + 1..odd.len() {
            let (pi, vi, di) = odd[x];
            let (pj, vj, dj) = odd[y];
            let p = pairing(di, dj);
            if p == 0 {
                continue;
            }
            let mut nb = b.clone();
            let s = nb.extract_to_end(&[pi, pj]);
            nb.push_edge(vi as usize, vj as usize);
            out.add_builder(&nb, &(c * rat(s * p)), tadpoles);
        }
    }
    for (k, w) in b.omegas.iter().enumerate() {
        for u in 0..b.n {
            let mut nb = b.clone();
            nb.omegas.remove(k);
            nb.push_edge(*w as usize, u);
            out.add_builder(&nb, &(c * rat(OMEGA_UNIT_PAIRING)), tadpoles);
        }
    }
}

/// Disjoint union, the word of `a` first, vertices of `b` shifted.
pub(crate) fn union(a: &Builder, b: &Builder) -> Builder {
    let sh = a.n as u8;
    let mut u = a.clone();
    u.n += b.n;
    let hoff = a.hairs.len() as u16;
    for at in &b.word {
        u.word.push(match *at {
            Atom::E(x, y) => Atom::E(x + sh, y + sh),
            Atom::D(x, d) => Atom::D(x + sh, d),
            Atom::HE(i) => Atom::HE(i + hoff),
            Atom::HL(i) => Atom::HL(i + hoff),
            Atom::P(t) => Atom::P(t),
        });
    }
    u.omegas.extend(b.omegas.iter().map(|w| w + sh));
    u.hairs
        .extend(b.hairs.iter().map(|h| h.map(|(v, l)| (v + sh, l))));
    u
}

/// Sum over pairs with one decoration from each graph, contracted to an
/// edge with the pairing as coefficient, without the overall sign.
fn glue(a: &Graph, b: &Graph, tadpoles: bool) -> GraphVector {
    let ba = a.to_builder();
    let bb = b.to_builder();
    let u = union(&ba, &bb);
    let la = ba.word.len();
    let na = ba.n;
    let mut out = GraphVector::new();
    let odd = |from: usize, to: usize| -> Vec<(usize, u8, Decoration)> {
        u.word[from..to]
            .iter()
            .enumerate()
            .filter_map(|(i, at)| match at {
                Atom::D(v, d) => Some((i + from, *v, *d)),
                _ => None,
            })
            .collect()
    };
    let xa = odd(0, la);
    let xb = odd(la, u.word.len());
    for (pi, vi, di) in &xa {
        for (pj, vj, dj) in &xb {
            let p = pairing(*di, *dj);
            if p == 0 {
                continue;
            }
            let mut nb = u.clone();
            let s = nb.extract_to_end(&[*pi, *pj]);
            nb.push_edge(*vi as usize, *vj as usize);
            out.add_builder(&nb, &rat(s * p), tadpoles);
        }
    }
    for (k, w) in u.omegas.iter().enumerate() {
        let in_a = (*w as usize) < na;
        let range = if in_a { na..u.n } else { 0..na };
        for v in range {
            let mut nb = u.clone();
            nb.omegas.remove(k);
            nb.push_edge(*w as usize, v);
            out.add_builder(&nb, &rat(OMEGA_UNIT_PAIRING), tadpoles);
        }
    }
    out
}

impl Gc {
    pub fn new(g: u8, tadpoles: bool) -> Result<Gc, GcError> {
        if g == 0 {
            return Err(GcError::Config("genus must be at least 1".into()));
        }
        if tadpoles && g != 1 {
            return Err(GcError::Config(
                "the variant with tadpoles is only defined for g = 1".into(),
            ));
        }
        Ok(Gc { g, tadpoles })
    }

    pub fn d_split(&self, v: &GraphVector) -> GraphVector {
        v.map_linear(|g| split_graph(g, self.tadpoles))
    }

    pub fn d_pair(&self, v: &GraphVector) -> GraphVector {
        v.map_linear(|g| {
            let mut out = GraphVector::new();
            pair_all(&g.to_builder(), &Rational::one(), self.tadpoles, &mut out);
            out
        })
    }

    /// The untwisted differential `d_s + d_p`.
    pub fn d(&self, v: &GraphVector) -> GraphVector {
        &self.d_split(v) + &self.d_pair(v)
    }

    pub fn bracket_graphs(&self, a: &Graph, b: &Graph) -> GraphVector {
        // With word parities m, the raw gluing is graded symmetric; the
        // factor (-1)^{m_a (m_b + 1)} turns it into a graded Lie bracket
        // for which d_s + d_p and the sp' action are derivations.
        let raw = glue(a, b, self.tadpoles);
        let (ma, mb) = (word_parity(a), word_parity(b));
        if ma * (mb + 1) % 2 == 1 {
            raw.scaled(&(-Rational::one()))
        } else {
            raw
        }
    }

    pub fn bracket(&self, a: &GraphVector, b: &GraphVector) -> GraphVector {
        let mut out = GraphVector::new();
        for (ga, ca) in a.iter() {
            for (gb, cb) in b.iter() {
                out.add_scaled(&self.bracket_graphs(ga, gb), &(ca * cb));
            }
        }
        out
    }

    pub fn omega_vertex() -> Graph {
        Graph {
            n: 1,
            edges: vec![],
            hairs: vec![],
            decos: vec![(0, Decoration::Omega)],
        }
    }

    pub fn ab_vertex(i: u8) -> Graph {
        Graph {
            n: 1,
            edges: vec![],
            hairs: vec![],
            decos: vec![(0, Decoration::Alpha(i)), (0, Decoration::Beta(i))],
        }
    }

    /// Coefficients `(c_ω, c_αβ)` of the Maurer-Cartan element
    /// `z = c_ω (ω-vertex) + c_αβ Σ_i (α_i β_i-vertex)`.
    pub fn z_coefficients(&self) -> Result<(Rational, Rational), GcError> {
        let zw = GraphVector::single(Self::omega_vertex(), Rational::one());
        let zab: GraphVector = (1..=self.g)
            .map(|i| GraphVector::single(Self::ab_vertex(i), Rational::one()))
            .fold(GraphVector::new(), |acc, x| &acc + &x);
        // MC(z) = cw A + cab B + cw^2 C/2 + cw cab D + cab^2 E/2.
        let a = self.d(&zw);
        let b = self.d(&zab);
        let c = self.bracket(&zw, &zw);
        let e = self.bracket(&zab, &zab);
        // Two-vertex graph: ω-vertex joined to a bare vertex.
        let g1 = Graph {
            n: 2,
            edges: vec![(0, 1)],
            hairs: vec![],
            decos: vec![(1, Decoration::Omega)],
        };
        let key = |v: &GraphVector, g: &Graph| v.coeff(g);
        let g1 = canonical(&g1);
        let (a1, c1) = (key(&a, &g1), key(&c, &g1));
        if c1.is_zero() || a1.is_zero() {
            return Err(GcError::NotMaurerCartan("no ω term to solve".into()));
        }
        let cw = -(&a1 * qi(2)) / &c1;
        // α_1 on one vertex, β_1 on the other.
        let g3 = canonical(&Graph {
            n: 2,
            edges: vec![(0, 1)],
            hairs: vec![],
            decos: vec![(0, Decoration::Alpha(1)), (1, Decoration::Beta(1))],
        });
        let (b3, e3) = (key(&b, &g3), key(&e, &g3));
        if b3.is_zero() || e3.is_zero() {
            return Err(GcError::NotMaurerCartan("no αβ term to solve".into()));
        }
        let cab = -(&b3 * qi(2)) / &e3;
        Ok((cw, cab))
    }

    pub fn z(&self) -> Result<GraphVector, GcError> {
        let (cw, cab) = self.z_coefficients()?;
        let mut z = GraphVector::single(Self::omega_vertex(), cw);
        for i in 1..=self.g {
            z.add(Self::ab_vertex(i), cab.clone());
        }
        Ok(z)
    }

    /// `dz + [z,z]/2`.
    pub fn mc_residual(&self, z: &GraphVector) -> GraphVector {
        &self.d(z) + &self.bracket(z, z).scaled(&q(1, 2))
    }

    pub fn twisted(&self, z: &GraphVector, v: &GraphVector) -> GraphVector {
        &self.d(v) + &self.bracket(z, v)
    }
}

fn canonical(g: &Graph) -> Graph {
    canonicalize(&g.to_builder()).expect("nonzero graph").0
}

/// Basis of `H*` in the fixed order `1, α_1, β_1, …, α_g, β_g, ω`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HStar {
    One,
    D(Decoration),
}

impl HStar {
    pub fn degree(self) -> i32 {
        match self {
            HStar::One => 0,
            HStar::D(d) => d.degree(),
        }
    }

    pub fn basis(g: u8) -> Vec<HStar> {
        let mut v = vec![HStar::One];
        v.extend(Decoration::all(g).into_iter().map(HStar::D));
        v
    }

    pub fn index(self, g: u8) -> usize {
        match self {
            HStar::One => 0,
            HStar::D(Decoration::Alpha(i)) => 2 * i as usize - 1,
            HStar::D(Decoration::Beta(i)) => 2 * i as usize,
            HStar::D(Decoration::Omega) => 2 * g as usize + 1,
        }
    }

    pub fn name(self) -> String {
        match self {
            HStar::One => "1".into(),
            HStar::D(Decoration::Alpha(i)) => format!("α{i}"),
            HStar::D(Decoration::Beta(i)) => format!("β{i}"),
            HStar::D(Decoration::Omega) => "ω".into(),
        }
    }
}

/// Pairing on `H*` dual to the one on `H`: `<α_i, β_i> = 1`,
/// `<β_i, α_i> = -1`, `<ω, 1> = <1, ω> = 1`.
pub fn dual_pairing(x: HStar, y: HStar) -> i32 {
    use Decoration::*;
    match (x, y) {
        (HStar::D(Alpha(i)), HStar::D(Beta(j))) if i == j => 1,
        (HStar::D(Beta(i)), HStar::D(Alpha(j))) if i == j => -1,
        (HStar::D(Omega), HStar::One) | (HStar::One, HStar::D(Omega)) => 1,
        _ => 0,
    }
}

/// A homogeneous graded endomorphism of `H*`, stored as `(target, source)`
/// pairs: the term `c · x∂_y` sends `y` to `c·x`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpElement {
    pub g: u8,
    pub terms: Vec<(HStar, HStar, Rational)>,
}

impl SpElement {
    pub fn new(g: u8, terms: Vec<(HStar, HStar, i64)>) -> Self {
        let mut s = SpElement {
            g,
            terms: terms.into_iter().map(|(x, y, c)| (x, y, qi(c))).collect(),
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        self.terms.sort_by_key(|a| (a.0, a.1));
        let mut out: Vec<(HStar, HStar, Rational)> = Vec::new();
        for (x, y, c) in self.terms.drain(..) {
            match out.last_mut() {
                Some(l) if l.0 == x && l.1 == y => l.2 += c,
                _ => out.push((x, y, c)),
            }
        }
        out.retain(|t| !t.2.is_zero());
        self.terms = out;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree of a homogeneous element; zero for the zero element.
    pub fn degree(&self) -> i32 {
        self.terms
            .first()
            .map(|(x, y, _)| x.degree() - y.degree())
            .unwrap_or(0)
    }

    pub fn apply(&self, y: HStar) -> Vec<(HStar, Rational)> {
        self.terms
            .iter()
            .filter(|t| t.1 == y)
            .map(|t| (t.0, t.2.clone()))
            .collect()
    }

    pub fn to_matrix(&self) -> SparseMatrix {
        let n = 2 * self.g as usize + 2;
        let mut m = SparseMatrix::new(n, n);
        for (x, y, c) in &self.terms {
            m.add(x.index(self.g), y.index(self.g), c.clone());
        }
        m
    }

    /// Graded commutator `στ - (-1)^{|σ||τ|} τσ`.
    pub fn bracket(&self, other: &SpElement) -> SpElement {
        let mut terms = Vec::new();
        let sign = if (self.degree() * other.degree()) % 2 != 0 { -1 } else { 1 };
        for (x, y, c) in &self.terms {
            for (x2, y2, c2) in &other.terms {
                // (x ∂_y)(x2 ∂_y2) = x ∂_y2 when y = x2.
                if *y == *x2 {
                    terms.push((*x, *y2, c * c2));
                }
                if *y2 == *x {
                    terms.push((*x2, *y, -(c * c2) * qi(sign)));
                }
            }
        }
        let mut s = SpElement { g: self.g, terms };
        s.normalize();
        s
    }

    /// `<σf, h> + (-1)^{|σ||f|} <f, σh>` vanishes for all basis `f, h`.
    pub fn preserves_pairing(&self) -> bool {
        let basis = HStar::basis(self.g);
        let s = self.degree();
        for f in &basis {
            for h in &basis {
                let mut acc = Rational::zero();
                for (x, c) in self.apply(*f) {
                    acc += c * qi(dual_pairing(x, *h) as i64);
                }
                let sign = if (s * f.degree()) % 2 != 0 { -1 } else { 1 };
                for (x, c) in self.apply(*h) {
                    acc += c * qi((sign * dual_pairing(*f, x)) as i64);
                }
                if !acc.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn avoids_unit(&self) -> bool {
        self.terms.iter().all(|t| t.0 != HStar::One)
    }

    pub fn name(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(x, y, c)| format!("{}*{}∂{}", linalg::fmt_rational(c), x.name(), y.name()))
            .collect();
        parts.join(" + ")
    }
}

/// The listed basis of `sp'(H*)`: degree 0 then degree -1.
pub fn sp_basis(g: u8) -> Vec<SpElement> {
    use Decoration::*;
    let a = |i| HStar::D(Alpha(i));
    let b = |i| HStar::D(Beta(i));
    let w = HStar::D(Omega);
    let mut out = Vec::new();
    for i in 1..=g {
        out.push(SpElement::new(g, vec![(a(i), b(i), 1)]));
        out.push(SpElement::new(g, vec![(b(i), a(i), 1)]));
    }
    for i in 1..=g {
        for j in 1..=g {
            out.push(SpElement::new(g, vec![(a(i), a(j), 1), (b(j), b(i), -1)]));
        }
    }
    for i in 1..=g {
        for j in i + 1..=g {
            out.push(SpElement::new(g, vec![(a(i), b(j), 1), (a(j), b(i), 1)]));
            out.push(SpElement::new(g, vec![(b(i), a(j), 1), (b(j), a(i), 1)]));
        }
    }
    for i in 1..=g {
        out.push(SpElement::new(g, vec![(w, a(i), 1), (b(i), HStar::One, 1)]));
        out.push(SpElement::new(g, vec![(w, b(i), 1), (a(i), HStar::One, -1)]));
    }
    out
}

/// Action of `σ` on one graph: a right derivation on the orientation word.
/// Replacing an atom passes `σ` over the atoms to its right; an image of
/// the implicit unit is appended at the end.
pub fn sp_act_graph(s: &SpElement, g: &Graph, tadpoles: bool) -> GraphVector {
    let b = g.to_builder();
    let deg = s.degree();
    let mut out = GraphVector::new();
    let odd_sigma = deg % 2 != 0;
    // Stored odd decorations.
    for (pos, at) in b.word.iter().enumerate() {
        let Atom::D(v, d) = *at else { continue };
        let after = b.word.len() - 1 - pos;
        let sg = if odd_sigma && after % 2 == 1 { -1 } else { 1 };
        for (x, c) in s.apply(HStar::D(d)) {
            let mut nb = b.clone();
            match x {
                HStar::One => unreachable!("sp' never hits the unit"),
                HStar::D(nd) if nd.is_odd() => nb.word[pos] = Atom::D(v, nd),
                HStar::D(nd) => {
                    nb.word.remove(pos);
                    nb.push_deco(v as usize, nd);
                }
            }
            out.add_builder(&nb, &(c * rat(sg)), tadpoles);
        }
    }
    // Stored ω decorations.
    for (k, v) in b.omegas.iter().enumerate() {
        for (x, c) in s.apply(HStar::D(Decoration::Omega)) {
            let mut nb = b.clone();
            nb.omegas.remove(k);
            match x {
                HStar::One => unreachable!(),
                HStar::D(nd) => nb.push_deco(*v as usize, nd),
            }
            out.add_builder(&nb, &c, tadpoles);
        }
    }
    // Implicit units.
    for v in 0..b.n {
        for (x, c) in s.apply(HStar::One) {
            let mut nb = b.clone();
            match x {
                HStar::One => unreachable!(),
                HStar::D(nd) => nb.push_deco(v, nd),
            }
            out.add_builder(&nb, &c, tadpoles);
        }
    }
    out
}

pub fn sp_act(s: &SpElement, v: &GraphVector, tadpoles: bool) -> GraphVector {
    v.map_linear(|g| sp_act_graph(s, g, tadpoles))
}

/// Element of the extension `sp' ⋉ GC`, homogeneous parts only.
#[derive(Clone, Debug, Default)]
pub struct ExtElement {
    pub sigma: Vec<(SpElement, Rational)>,
    pub graphs: GraphVector,
}

impl Gc {
    /// `d(σ, Γ) = (0, d_z Γ - (-1)^{|σ|} σ.z)`.
    pub fn extension_diff(&self, z: &GraphVector, sigma: &SpElement, gamma: &GraphVector) -> GraphVector {
        let mut out = self.twisted(z, gamma);
        let sz = sp_act(sigma, z, self.tadpoles);
        let sign = if sigma.degree() % 2 != 0 { Rational::one() } else { -Rational::one() };
        out.add_scaled(&sz, &sign);
        out
    }

    /// Tripod: one vertex with three odd decorations in the given order.
    pub fn tripod(x: Decoration, y: Decoration, w: Decoration) -> Option<(Graph, i32)> {
        let mut b = Builder::new(1);
        b.push_deco(0, x);
        b.push_deco(0, y);
        b.push_deco(0, w);
        canonicalize(&b)
    }

    pub fn tripod_vector(x: Decoration, y: Decoration, w: Decoration) -> GraphVector {
        match Self::tripod(x, y, w) {
            Some((g, s)) => GraphVector::single(g, rat(s)),
            None => GraphVector::new(),
        }
    }
}

/// Limits for enumerating graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub vertices: usize,
    pub edges: usize,
    pub decorations: usize,
}

/// All connected graphs within the bounds, one representative per
/// isomorphism class and without odd automorphisms.
pub fn enumerate_graphs(g: u8, tadpoles: bool, bounds: Bounds) -> Vec<Graph> {
    let mut seen = BTreeSet::new();
    let decos = Decoration::all(g);
    for n in 1..=bounds.vertices {
        let mut cand: Vec<(usize, usize)> = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                cand.push((u, v));
            }
            if tadpoles {
                cand.push((u, u));
            }
        }
        let slots: Vec<(usize, Decoration)> = (0..n)
            .flat_map(|v| decos.iter().map(move |d| (v, *d)))
            .collect();
        let mut deco_sets: Vec<Vec<(usize, Decoration)>> = Vec::new();
        let mut cur = Vec::new();
        deco_multisets(&slots, 0, bounds.decorations, &mut cur, &mut deco_sets);
        for mask in 0u32..(1u32 << cand.len()) {
            if mask.count_ones() as usize > bounds.edges {
                continue;
            }
            let edges: Vec<(usize, usize)> = (0..cand.len())
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| cand[k])
                .collect();
            let probe = Graph {
                n: n as u8,
                edges: edges.iter().map(|(u, v)| (*u as u8, *v as u8)).collect(),
                hairs: vec![],
                decos: vec![],
            };
            if !probe.is_connected() {
                continue;
            }
            for ds in &deco_sets {
                let mut b = Builder::new(n);
                for (u, v) in &edges {
                    b.push_edge(*u, *v);
                }
                for (v, d) in ds {
                    b.push_deco(*v, *d);
                }
                if let Some((gr, _)) = canonicalize(&b) {
                    seen.insert(gr);
                }
            }
        }
    }
    seen.into_iter().collect()
}

fn deco_multisets(
    slots: &[(usize, Decoration)],
    start: usize,
    left: usize,
    cur: &mut Vec<(usize, Decoration)>,
    out: &mut Vec<Vec<(usize, Decoration)>>,
) {
    out.push(cur.clone());
    if left == 0 {
        return;
    }
    for k in start..slots.len() {
        let (v, d) = slots[k];
        // Odd decorations appear at most once per vertex.
        let next = if d.is_odd() { k + 1 } else { k };
        cur.push((v, d));
        deco_multisets(slots, next, left - 1, cur, out);
        cur.pop();
    }
}

/// Rank data of the twisted differential around one degree, over the
/// graphs within the bounds.
#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub g: u8,
    pub variant: String,
    pub degree: i32,
    pub bounds: Bounds,
    pub dim: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub h_trunc: i64,
    pub closed: bool,
    pub caveat: String,
}

impl Gc {
    pub fn variant_name(&self) -> String {
        if self.tadpoles {
            "tadpoles".into()
        } else {
            "tadpole-free".into()
        }
    }

    /// Matrix of the twisted differential from `src` to the span of `dst`.
    /// Returns the matrix and whether every image stayed inside `dst`.
    pub fn diff_matrix(&self, z: &GraphVector, src: &[Graph], dst: &[Graph]) -> (SparseMatrix, bool) {
        let index: std::collections::BTreeMap<&Graph, usize> =
            dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut m = SparseMatrix::new(dst.len(), src.len());
        let mut closed = true;
        for (j, g) in src.iter().enumerate() {
            let img = self.twisted(z, &GraphVector::single(g.clone(), Rational::one()));
            for (h, c) in img.iter() {
                match index.get(h) {
                    Some(i) => m.add(*i, j, c.clone()),
                    None => closed = false,
                }
            }
        }
        (m, closed)
    }

    pub fn rank_report(&self, degree: i32, bounds: Bounds) -> Result<RankReport, GcError> {
        let z = self.z()?;
        let all = enumerate_graphs(self.g, self.tadpoles, bounds);
        let of = |d: i32| -> Vec<Graph> { all.iter().filter(|g| g.gc_degree() == d).cloned().collect() };
        let (prev, mid, next) = (of(degree - 1), of(degree), of(degree + 1));
        let (din, c1) = self.diff_matrix(&z, &prev, &mid);
        let (dout, c2) = self.diff_matrix(&z, &mid, &next);
        let rank_in = linalg::rank(&din);
        let rank_out = linalg::rank(&dout);
        Ok(RankReport {
            g: self.g,
            variant: self.variant_name(),
            degree,
            bounds,
            dim: mid.len(),
            rank_in,
            rank_out,
            h_trunc: mid.len() as i64 - rank_in as i64 - rank_out as i64,
            closed: c1 && c2,
            caveat: "truncated at the given bounds; images leaving the bounds are dropped, so \
                     h_trunc is not a cohomology dimension unless closed is true"
                .into(),
        })
    }
}
