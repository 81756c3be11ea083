//! Hairy graphs: graphs whose external legs (hairs) carry labels in `H`,
//! together with two kinds of graphs without internal vertices, the line
//! `∂_x -- ∂_y` and the decorated leg `x -- ∂_y`.
//!
//! The pre-Lie product `Γ1 ∘ Γ2` attaches a nonempty set of hairs of `Γ1`
//! to decorations of `Γ2`, a hair `∂_x` consuming a decoration `x` and a
//! hair `∂_1` landing on any internal vertex.

use num_traits::{One, Zero};

use crate::gc::{split_graph, union, Gc, GcError, HStar, SpElement};
use crate::graph::{
    canonicalize, permutation_sign, Atom, Builder, Decoration, Graph, GraphVector, HairLabel,
    LinComb,
};
use crate::linalg::{qi, Rational};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HGraph {
    /// At least one internal vertex.
    Int(Graph),
    /// Two hairs joined by an edge, labels sorted. Word: edge, then the odd
    /// labels in order.
    Line(HairLabel, HairLabel),
    /// A leg decorated by `x` with label `∂_y`. Word: the label if odd,
    /// then the decoration if odd.
    Deco(Decoration, HairLabel),
}

pub type HVector = LinComb<HGraph>;

impl HGraph {
    pub fn degree(&self) -> i32 {
        match self {
            HGraph::Int(g) => g.hairy_degree(),
            HGraph::Line(a, b) => -1 + a.degree() + b.degree(),
            HGraph::Deco(x, l) => x.degree() + l.degree(),
        }
    }

    pub fn word_len(&self) -> usize {
        match self {
            HGraph::Int(g) => g.word_len(),
            HGraph::Line(a, b) => 1 + a.is_odd() as usize + b.is_odd() as usize,
            HGraph::Deco(x, l) => x.is_odd() as usize + l.is_odd() as usize,
        }
    }

    pub fn hair_count(&self) -> usize {
        match self {
            HGraph::Int(g) => g.hairs.len(),
            HGraph::Line(..) => 2,
            HGraph::Deco(..) => 1,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            HGraph::Int(g) => g.n as usize,
            _ => 0,
        }
    }

    pub fn line(a: HairLabel, b: HairLabel) -> HVector {
        let tags: Vec<Tag> = std::iter::once(Tag::E)
            .chain(a.is_odd().then_some(Tag::A))
            .chain(b.is_odd().then_some(Tag::B))
            .collect();
        single(canon_line(a, b, &tags))
    }

    pub fn deco(x: Decoration, l: HairLabel) -> HVector {
        let tags: Vec<Tag> = l
            .is_odd()
            .then_some(Tag::L)
            .into_iter()
            .chain(x.is_odd().then_some(Tag::Y))
            .collect();
        single(canon_deco(x, l, &tags))
    }
}

impl std::fmt::Display for HGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HGraph::Int(g) => write!(f, "{g}"),
            HGraph::Line(a, b) => write!(f, "{}--{}", a.label(), b.label()),
            HGraph::Deco(x, l) => write!(f, "{}--{}", x.label(), l.label()),
        }
    }
}

fn single(x: Option<(HGraph, i32)>) -> HVector {
    match x {
        Some((g, s)) => HVector::single(g, qi(s as i64)),
        None => HVector::new(),
    }
}

/// Tags of the atoms of zero-vertex pieces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    /// Line edge.
    E,
    /// Label of the first line end.
    A,
    /// Label of the second line end.
    B,
    /// Label of a decorated leg.
    L,
    /// Decoration of a decorated leg.
    Y,
}

fn sign_to(word: &[Tag], canonical: &[Tag]) -> i32 {
    let idx: Vec<usize> = canonical
        .iter()
        .map(|t| word.iter().position(|w| w == t).expect("tag present"))
        .collect();
    permutation_sign(&idx)
}

fn canon_line(a: HairLabel, b: HairLabel, word: &[Tag]) -> Option<(HGraph, i32)> {
    if a == b && a.is_odd() {
        return None;
    }
    let (first, second, l1, l2) = if a <= b { (Tag::A, Tag::B, a, b) } else { (Tag::B, Tag::A, b, a) };
    let mut canon = vec![Tag::E];
    if l1.is_odd() {
        canon.push(first);
    }
    if l2.is_odd() {
        canon.push(second);
    }
    Some((HGraph::Line(l1, l2), sign_to(word, &canon)))
}

fn canon_deco(x: Decoration, l: HairLabel, word: &[Tag]) -> Option<(HGraph, i32)> {
    let mut canon = vec![];
    if l.is_odd() {
        canon.push(Tag::L);
    }
    if x.is_odd() {
        canon.push(Tag::Y);
    }
    Some((HGraph::Deco(x, l), sign_to(word, &canon)))
}

fn add_graph(out: &mut HVector, b: &Builder, c: &Rational) {
    if c.is_zero() {
        return;
    }
    if let Some((g, s)) = canonicalize(b) {
        if g.has_tadpole() {
            return;
        }
        out.add(HGraph::Int(g), if s > 0 { c.clone() } else { -c });
    }
}

fn add_zero(out: &mut HVector, x: Option<(HGraph, i32)>, c: &Rational) {
    if let Some((g, s)) = x {
        out.add(g, if s > 0 { c.clone() } else { -c });
    }
}

fn pos(b: &Builder, a: Atom) -> usize {
    b.word.iter().position(|x| *x == a).expect("atom present")
}

/// A place a hair can attach to inside an internal-vertex graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    /// The implicit unit at a vertex.
    Unit(u8),
    /// A stored odd decoration, identified by vertex and value.
    Odd(u8, Decoration),
    /// The `k`-th stored `ω` of the builder.
    Omega(usize),
}

fn targets_for(b: &Builder, verts: std::ops::Range<usize>, l: HairLabel) -> Vec<Target> {
    match l.target() {
        None => verts.map(|v| Target::Unit(v as u8)).collect(),
        Some(Decoration::Omega) => b
            .omegas
            .iter()
            .enumerate()
            .filter(|(_, v)| verts.contains(&(**v as usize)))
            .map(|(k, _)| Target::Omega(k))
            .collect(),
        Some(d) => b
            .word
            .iter()
            .filter_map(|a| match a {
                Atom::D(v, e) if *e == d && verts.contains(&(*v as usize)) => Some(Target::Odd(*v, d)),
                _ => None,
            })
            .collect(),
    }
}

fn target_vertex(b: &Builder, t: Target) -> u8 {
    match t {
        Target::Unit(v) | Target::Odd(v, _) => v,
        Target::Omega(k) => b.omegas[k],
    }
}

/// Consumes the target with the label atom at `label_pos` (odd labels) and
/// returns the Koszul sign. Omega targets are only marked; callers remove
/// them afterwards with [`drop_omegas`].
fn consume(b: &mut Builder, label: Option<Atom>, t: Target) -> i32 {
    match t {
        Target::Odd(v, d) => {
            let lp = pos(b, label.expect("odd label"));
            let dp = pos(b, Atom::D(v, d));
            b.extract_to_end(&[lp, dp])
        }
        _ => 1,
    }
}

fn drop_omegas(b: &mut Builder, mut ks: Vec<usize>) {
    ks.sort_unstable();
    for k in ks.into_iter().rev() {
        b.omegas.remove(k);
    }
}

/// Pre-Lie product `a ∘ b` on basis elements.
pub fn prelie(a: &HGraph, b: &HGraph) -> HVector {
    let mut out = HVector::new();
    match (a, b) {
        (_, HGraph::Line(..)) => {}
        (HGraph::Int(g1), HGraph::Int(g2)) => {
            let u = union(&g1.to_builder(), &g2.to_builder());
            let n1 = g1.n as usize;
            let hairs: Vec<u16> = (0..g1.hairs.len() as u16).collect();
            let mut choice: Vec<Option<Target>> = vec![None; hairs.len()];
            assign_hairs(&u, n1..u.n, &hairs, 0, &mut choice, &mut |ch| {
                if ch.iter().all(|c| c.is_none()) {
                    return;
                }
                let mut nb = u.clone();
                let mut sign = 1;
                let mut om = Vec::new();
                for (h, t) in hairs.iter().zip(ch.iter()) {
                    let Some(t) = *t else { continue };
                    let (base, l) = nb.hairs[*h as usize].expect("live hair");
                    let v = target_vertex(&nb, t);
                    let he = pos(&nb, Atom::HE(*h));
                    nb.word[he] = Atom::E(base, v);
                    sign *= consume(&mut nb, l.is_odd().then_some(Atom::HL(*h)), t);
                    if let Target::Omega(k) = t {
                        om.push(k);
                    }
                    nb.hairs[*h as usize] = None;
                }
                drop_omegas(&mut nb, om);
                add_graph(&mut out, &nb, &qi(sign as i64));
            });
        }
        (HGraph::Line(la, lb), HGraph::Int(g2)) => {
            let b2 = g2.to_builder();
            let mut base = Builder::new(b2.n);
            base.word.push(Atom::P(0));
            if la.is_odd() {
                base.word.push(Atom::P(1));
            }
            if lb.is_odd() {
                base.word.push(Atom::P(2));
            }
            base.word.extend(b2.word.iter().copied());
            base.omegas = b2.omegas.clone();
            base.hairs = b2.hairs.clone();
            let ends = [(*la, Atom::P(1)), (*lb, Atom::P(2))];
            // One end attached, the other becomes a hair.
            for e in 0..2 {
                let (le, pe) = ends[e];
                let (lo, po) = ends[1 - e];
                for t in targets_for(&base, 0..base.n, le) {
                    let mut nb = base.clone();
                    let v = target_vertex(&nb, t);
                    let s = consume(&mut nb, le.is_odd().then_some(pe), t);
                    let id = nb.hairs.len() as u16;
                    nb.hairs.push(Some((v, lo)));
                    let p0 = pos(&nb, Atom::P(0));
                    nb.word[p0] = Atom::HE(id);
                    if lo.is_odd() {
                        let p = pos(&nb, po);
                        nb.word[p] = Atom::HL(id);
                    }
                    if let Target::Omega(k) = t {
                        drop_omegas(&mut nb, vec![k]);
                    }
                    add_graph(&mut out, &nb, &qi(s as i64));
                }
            }
            // Both ends attached.
            for ta in targets_for(&base, 0..base.n, *la) {
                for tb in targets_for(&base, 0..base.n, *lb) {
                    if ta == tb && !matches!(ta, Target::Unit(_)) {
                        continue;
                    }
                    let mut nb = base.clone();
                    let (u, v) = (target_vertex(&nb, ta), target_vertex(&nb, tb));
                    let mut s = consume(&mut nb, la.is_odd().then_some(Atom::P(1)), ta);
                    s *= consume(&mut nb, lb.is_odd().then_some(Atom::P(2)), tb);
                    let p0 = pos(&nb, Atom::P(0));
                    nb.word[p0] = Atom::E(u, v);
                    let mut om = vec![];
                    for t in [ta, tb] {
                        if let Target::Omega(k) = t {
                            om.push(k);
                        }
                    }
                    drop_omegas(&mut nb, om);
                    add_graph(&mut out, &nb, &qi(s as i64));
                }
            }
        }
        (HGraph::Deco(y, l), HGraph::Int(g2)) => {
            let b2 = g2.to_builder();
            let mut base = Builder::new(b2.n);
            if l.is_odd() {
                base.word.push(Atom::P(3));
            }
            if y.is_odd() {
                base.word.push(Atom::P(4));
            }
            base.word.extend(b2.word.iter().copied());
            base.omegas = b2.omegas.clone();
            base.hairs = b2.hairs.clone();
            for t in targets_for(&base, 0..base.n, *l) {
                let mut nb = base.clone();
                let v = target_vertex(&nb, t);
                let s = consume(&mut nb, l.is_odd().then_some(Atom::P(3)), t);
                if let Target::Omega(k) = t {
                    drop_omegas(&mut nb, vec![k]);
                }
                if y.is_odd() {
                    let p = pos(&nb, Atom::P(4));
                    nb.word[p] = Atom::D(v, *y);
                } else {
                    nb.omegas.push(v);
                }
                add_graph(&mut out, &nb, &qi(s as i64));
            }
        }
        (HGraph::Int(g1), HGraph::Deco(x, l2)) => {
            let mut base = g1.to_builder();
            if l2.is_odd() {
                base.word.push(Atom::P(13));
            }
            if x.is_odd() {
                base.word.push(Atom::P(14));
            }
            for h in 0..base.hairs.len() {
                let (v, lh) = base.hairs[h].expect("live hair");
                if lh.target() != Some(*x) {
                    continue;
                }
                let mut nb = base.clone();
                let mut s = 1;
                if x.is_odd() {
                    let lp = pos(&nb, Atom::HL(h as u16));
                    let xp = pos(&nb, Atom::P(14));
                    s = nb.extract_to_end(&[lp, xp]);
                }
                nb.hairs[h] = Some((v, *l2));
                if l2.is_odd() {
                    let p = pos(&nb, Atom::P(13));
                    nb.word[p] = Atom::HL(h as u16);
                }
                add_graph(&mut out, &nb, &qi(s as i64));
            }
        }
        (HGraph::Line(la, lb), HGraph::Deco(x, l2)) => {
            let ends = [(*la, Tag::A), (*lb, Tag::B)];
            for e in 0..2 {
                let (le, te) = ends[e];
                let (lo, to) = ends[1 - e];
                if le.target() != Some(*x) {
                    continue;
                }
                // Word: E A? B? L2? X?, contract (label of e, X).
                let mut word: Vec<Tag> = vec![Tag::E];
                if la.is_odd() {
                    word.push(Tag::A);
                }
                if lb.is_odd() {
                    word.push(Tag::B);
                }
                if l2.is_odd() {
                    word.push(Tag::L);
                }
                if x.is_odd() {
                    word.push(Tag::Y);
                }
                let s = contract_tags(&mut word, te, Tag::Y, x.is_odd());
                // Remaining: E, `to` (other end), L2 renamed as the new end.
                let renamed: Vec<Tag> = word
                    .iter()
                    .map(|t| if *t == to { Tag::A } else if *t == Tag::L { Tag::B } else { *t })
                    .collect();
                add_zero(&mut out, canon_line(lo, *l2, &renamed), &qi(s as i64));
            }
        }
        (HGraph::Deco(y, l), HGraph::Deco(x, l2)) => {
            if l.target() != Some(*x) {
                return out;
            }
            // Word: L Y (first leg), L2 X (second leg); contract (L, X).
            #[derive(Clone, Copy, PartialEq, Eq)]
            enum T2 {
                L,
                Y,
                L2,
                X,
            }
            let mut word: Vec<T2> = vec![];
            if l.is_odd() {
                word.push(T2::L);
            }
            if y.is_odd() {
                word.push(T2::Y);
            }
            if l2.is_odd() {
                word.push(T2::L2);
            }
            if x.is_odd() {
                word.push(T2::X);
            }
            let mut s = 1;
            if x.is_odd() {
                let lp = word.iter().position(|t| *t == T2::L).unwrap();
                let xp = word.iter().position(|t| *t == T2::X).unwrap();
                s = extract_sign(word.len(), &[lp, xp]);
                word.retain(|t| *t != T2::L && *t != T2::X);
            }
            let tags: Vec<Tag> = word
                .iter()
                .map(|t| match t {
                    T2::Y => Tag::Y,
                    T2::L2 => Tag::L,
                    _ => unreachable!(),
                })
                .collect();
            add_zero(&mut out, canon_deco(*y, *l2, &tags), &qi(s as i64));
        }
    }
    out
}

fn extract_sign(len: usize, positions: &[usize]) -> i32 {
    let mut target: Vec<usize> = (0..len).filter(|i| !positions.contains(i)).collect();
    target.extend_from_slice(positions);
    permutation_sign(&target)
}

fn contract_tags(word: &mut Vec<Tag>, a: Tag, b: Tag, odd: bool) -> i32 {
    if !odd {
        return 1;
    }
    let pa = word.iter().position(|t| *t == a).unwrap();
    let pb = word.iter().position(|t| *t == b).unwrap();
    let s = extract_sign(word.len(), &[pa, pb]);
    word.retain(|t| *t != a && *t != b);
    s
}

fn assign_hairs(
    b: &Builder,
    verts: std::ops::Range<usize>,
    hairs: &[u16],
    k: usize,
    choice: &mut Vec<Option<Target>>,
    f: &mut dyn FnMut(&[Option<Target>]),
) {
    if k == hairs.len() {
        f(choice);
        return;
    }
    choice[k] = None;
    assign_hairs(b, verts.clone(), hairs, k + 1, choice, f);
    let (_, l) = b.hairs[hairs[k] as usize].expect("live hair");
    for t in targets_for(b, verts.clone(), l) {
        let taken = !matches!(t, Target::Unit(_)) && choice[..k].contains(&Some(t));
        if taken {
            continue;
        }
        choice[k] = Some(t);
        assign_hairs(b, verts.clone(), hairs, k + 1, choice, f);
        choice[k] = None;
    }
}

fn sgn(p: bool) -> Rational {
    if p {
        -Rational::one()
    } else {
        Rational::one()
    }
}

/// Lie bracket on basis elements: the graded commutator of [`prelie`],
/// times `(-1)^{|a||b|}` coming from the orientation words.
pub fn bracket_basis(a: &HGraph, b: &HGraph) -> HVector {
    let odd = a.degree() % 2 != 0 && b.degree() % 2 != 0;
    let mut out = prelie(a, b);
    out.add_scaled(&prelie(b, a), &(-sgn(odd)));
    if odd {
        out = out.scaled(&-Rational::one());
    }
    out
}

pub fn bracket(a: &HVector, b: &HVector) -> HVector {
    let mut out = HVector::new();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            out.add_scaled(&bracket_basis(x, y), &(cx * cy));
        }
    }
    out
}

pub fn prelie_vec(a: &HVector, b: &HVector) -> HVector {
    let mut out = HVector::new();
    for (x, cx) in a.iter() {
        for (y, cy) in b.iter() {
            out.add_scaled(&prelie(x, y), &(cx * cy));
        }
    }
    out
}

/// Vertex splitting; zero on graphs without internal vertices.
pub fn d_split(v: &HVector) -> HVector {
    v.map_linear(|g| match g {
        HGraph::Int(gr) => {
            let s = split_graph(gr, false);
            s.iter().map(|(h, c)| (HGraph::Int(h.clone()), c.clone())).fold(HVector::new(), |mut acc, (k, c)| {
                acc.add(k, c);
                acc
            })
        }
        _ => HVector::new(),
    })
}

/// The dual partner used by `F1`: a decoration `f` (or the unit) becomes a
/// hair `∂_x` with coefficient `<e_f, e_x>`.
fn dual_hair(f: Option<Decoration>) -> (HairLabel, i32) {
    match f {
        None => (HairLabel::DOmega, 1),
        Some(Decoration::Omega) => (HairLabel::D1, 1),
        Some(Decoration::Alpha(i)) => (HairLabel::DBeta(i), -1),
        Some(Decoration::Beta(i)) => (HairLabel::DAlpha(i), 1),
    }
}

/// `F1`: every decoration, and the unit at every vertex, in turn becomes a
/// hair labelled by its dual.
pub fn f1_graph(g: &Graph) -> HVector {
    let b = g.to_builder();
    let mut out = HVector::new();
    let parity = if g.word_len() % 2 == 1 { -1 } else { 1 };
    let mut emit = |mut nb: Builder, v: u8, lab: HairLabel, c: i32| {
        let id = nb.hairs.len() as u16;
        nb.hairs.push(Some((v, lab)));
        if lab.is_odd() {
            nb.word.push(Atom::HL(id));
        }
        nb.word.push(Atom::HE(id));
        add_graph(&mut out, &nb, &qi((c * parity) as i64));
    };
    for (p, a) in b.word.iter().enumerate() {
        let Atom::D(v, d) = *a else { continue };
        let (lab, c) = dual_hair(Some(d));
        let mut nb = b.clone();
        // Pair f with the leg decoration placed at the end, then drop both.
        nb.word.push(Atom::P(9));
        let end = nb.word.len() - 1;
        let s = nb.extract_to_end(&[p, end]);
        emit(nb, v, lab, c * s);
    }
    for (k, v) in b.omegas.iter().enumerate() {
        let (lab, c) = dual_hair(Some(Decoration::Omega));
        let mut nb = b.clone();
        nb.omegas.remove(k);
        emit(nb, *v, lab, c);
    }
    for v in 0..b.n {
        let (lab, c) = dual_hair(None);
        emit(b.clone(), v as u8, lab, c);
    }
    out
}

pub fn f1(v: &GraphVector) -> HVector {
    v.map_linear(f1_graph)
}

/// `F2`: `x∂_y` becomes the decorated leg `x -- ∂_y`.
pub fn f2(s: &SpElement) -> HVector {
    let mut out = HVector::new();
    for (x, y, c) in &s.terms {
        let HStar::D(xd) = *x else { continue };
        let lab = HairLabel::evaluating(match y {
            HStar::One => None,
            HStar::D(d) => Some(*d),
        });
        let v = HGraph::deco(xd, lab);
        out.add_scaled(&v, &(c * sgn(lab.is_odd())));
    }
    out
}

/// `m2 = c_ω (∂_ω -- ∂_1) + c_αβ Σ_i (∂_{α_i} -- ∂_{β_i})`.
pub fn m2_with(g: u8, cw: &Rational, cab: &Rational) -> HVector {
    let mut out = HGraph::line(HairLabel::D1, HairLabel::DOmega).scaled(cw);
    for i in 1..=g {
        out.add_scaled(&HGraph::line(HairLabel::DAlpha(i), HairLabel::DBeta(i)), cab);
    }
    out
}

/// The hairy complex for genus `g`, tadpole free.
#[derive(Clone, Copy, Debug)]
pub struct Hgc {
    pub g: u8,
}

impl Hgc {
    pub fn new(g: u8) -> Result<Hgc, GcError> {
        Gc::new(g, false)?;
        Ok(Hgc { g })
    }

    fn gc(&self) -> Gc {
        Gc::new(self.g, false).expect("validated genus")
    }

    /// `m1 = F1(z)`: the five one-vertex families.
    pub fn m1(&self) -> Result<HVector, GcError> {
        Ok(f1(&self.gc().z()?))
    }

    /// `m2 = (∂_1 -- ∂_ω) + Σ_i (∂_{α_i} -- ∂_{β_i})`.
    pub fn m2(&self) -> HVector {
        m2_with(self.g, &Rational::one(), &Rational::one())
    }

    pub fn m(&self) -> Result<HVector, GcError> {
        Ok(&self.m1()? + &self.m2())
    }

    /// `d_s v + [m, v]`.
    pub fn twisted(&self, m: &HVector, v: &HVector) -> HVector {
        &d_split(v) + &bracket(m, v)
    }

    /// `d_s m + ½[m, m]`.
    pub fn mc_residual(&self, m: &HVector) -> HVector {
        let mut out = d_split(m);
        out.add_scaled(&bracket(m, m), &(Rational::one() / qi(2)));
        out
    }

    /// `F(σ, Γ) = F2(σ) + F1(Γ)`.
    pub fn f(&self, sigma: &SpElement, gamma: &GraphVector) -> HVector {
        &f2(sigma) + &f1(gamma)
    }

    /// `d(F(σ, Γ)) - F(d(σ, Γ))`; zero when `F` commutes with the
    /// differentials.
    pub fn chain_defect(&self, sigma: &SpElement, gamma: &GraphVector) -> Result<HVector, GcError> {
        let gc = self.gc();
        let z = gc.z()?;
        let m = self.m()?;
        let lhs = self.twisted(&m, &self.f(sigma, gamma));
        let rhs = f1(&gc.extension_diff(&z, sigma, gamma));
        Ok(&lhs - &rhs)
    }
}
