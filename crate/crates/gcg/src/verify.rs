//! Verification suites. Each suite checks a family of identities for one
//! configuration and returns one [`Check`] per identity, in a fixed order.
//!
//! Independent blocks run on the rayon pool; results are collected in
//! input order, so reports do not depend on the number of threads.

use std::fmt;
use std::str::FromStr;

use log::info;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gc::{enumerate_graphs, sp_act, sp_basis, Bounds, Gc, GcError, HStar, SpElement};
use crate::graph::{Decoration, Graph, GraphVector};
use crate::grt::{zg_dim_dense, DerivationTuple, GrtAlgebras, GrtError, Sp0, Variant, H1};
use crate::hairy::{bracket as hbracket, d_split as hd_split, f1, f2, Hgc};
use crate::lie::{
    comp_u, compose_maps, delta, graded_theta, t_bv, t_g, t_g_presentation, t_nonframed_presentation, theta_phi,
    Gen, GradedLie, LieError, Presentation, PresentedLie,
};
use crate::linalg::{qi, Rational};
use crate::mo::{mc_check_xi, Mo, MoElement, MoError, MoOptions};
use crate::report::Check;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Gc(#[from] GcError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Mo(#[from] MoError),
    #[error(transparent)]
    Grt(#[from] GrtError),
}

/// The fixed suite registry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Mc,
    DSquared,
    Jacobi,
    Tripods,
    Hairy,
    TgDims,
    Center,
    MoMc,
    Zg,
    Lemmas,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Mc,
        Suite::DSquared,
        Suite::Jacobi,
        Suite::Tripods,
        Suite::Hairy,
        Suite::TgDims,
        Suite::Center,
        Suite::MoMc,
        Suite::Zg,
        Suite::Lemmas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Mc => "mc",
            Suite::DSquared => "d-squared",
            Suite::Jacobi => "jacobi",
            Suite::Tripods => "tripods",
            Suite::Hairy => "hairy",
            Suite::TgDims => "tg-dims",
            Suite::Center => "center",
            Suite::MoMc => "mo-mc",
            Suite::Zg => "zg",
            Suite::Lemmas => "lemmas",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .iter()
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
                format!("unknown suite {s:?}, expected one of {}", names.join(", "))
            })
    }
}

/// Parameters shared by all suites. Each suite reads the fields it needs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub g: u8,
    /// Number of points for `t_(g)(n)` and `Mo_(g)(n)`.
    pub n: u8,
    pub tadpoles: bool,
    pub variant: Variant,
    pub bounds: Bounds,
    pub max_weight: usize,
    /// Seed for sampled checks.
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            g: 1,
            n: 1,
            tadpoles: false,
            variant: Variant::Framed,
            bounds: Bounds { vertices: 3, edges: 4, decorations: 4 },
            max_weight: 4,
            seed: 0x6763_6700,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<(), VerifyError> {
        let b = self.bounds;
        if self.g == 0 || self.n == 0 || self.max_weight == 0 {
            return Err(VerifyError::Config("g, n and max-weight must be positive".into()));
        }
        if b.vertices == 0 {
            return Err(VerifyError::Config("the vertex bound must be positive".into()));
        }
        if self.tadpoles && self.g != 1 {
            return Err(VerifyError::Config("tadpoles are only defined for g = 1".into()));
        }
        if self.variant == Variant::Nonframed && self.g != 1 {
            return Err(VerifyError::Config("the non-framed variant is only defined for g = 1".into()));
        }
        Ok(())
    }
}

/// Runs one suite.
pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    cfg.validate()?;
    info!("suite {suite}: start");
    let out = match suite {
        Suite::Mc => mc(cfg),
        Suite::DSquared => d_squared(cfg),
        Suite::Jacobi => jacobi(cfg),
        Suite::Tripods => tripods(cfg),
        Suite::Hairy => hairy(cfg),
        Suite::TgDims => tg_dims(cfg),
        Suite::Center => center(cfg),
        Suite::MoMc => mo_mc(cfg),
        Suite::Zg => zg(cfg),
        Suite::Lemmas => lemmas(cfg),
    }?;
    info!("suite {suite}: {} checks", out.len());
    Ok(out)
}

/// Collects the checks of one suite instance.
struct Recorder {
    suite: &'static str,
    instance: String,
    checks: Vec<Check>,
}

impl Recorder {
    fn new(suite: Suite, instance: String) -> Recorder {
        Recorder { suite: suite.name(), instance, checks: Vec::new() }
    }

    fn check(&mut self, anchor: &str, identity: &str, passed: bool, detail: impl Into<String>) {
        self.checks
            .push(Check::new(self.suite, &self.instance, anchor, identity, passed, detail));
    }

    /// Records a check over many cases from the list of failing cases.
    fn cases(&mut self, anchor: &str, identity: &str, total: usize, failed: &[String]) {
        let mut detail = format!("{total} cases, {} failed", failed.len());
        if let Some(first) = failed.first() {
            detail.push_str(&format!("; first failure: {first}"));
        }
        self.check(anchor, identity, failed.is_empty() && total > 0, detail);
    }
}

fn gv(x: &Graph) -> GraphVector {
    GraphVector::single(x.clone(), qi(1))
}

fn sign(odd: bool) -> Rational {
    if odd {
        qi(-1)
    } else {
        qi(1)
    }
}

fn gc_instance(cfg: &SuiteConfig) -> String {
    format!("g={} tadpoles={}", cfg.g, cfg.tadpoles)
}

fn bounds_text(b: Bounds) -> String {
    format!("V<={} E<={} D<={}", b.vertices, b.edges, b.decorations)
}

fn capped(b: Bounds, v: usize, e: usize, d: usize) -> Bounds {
    Bounds { vertices: b.vertices.min(v), edges: b.edges.min(e), decorations: b.decorations.min(d) }
}

fn failures<T: Sync>(items: &[T], f: impl Fn(&T) -> Option<String> + Sync + Send) -> Vec<String> {
    items.par_iter().filter_map(f).collect()
}

fn mc(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let mut r = Recorder::new(Suite::Mc, gc_instance(cfg));
    let gc = Gc::new(cfg.g, cfg.tadpoles)?;
    let z = gc.z()?;
    let all_deg1 = z.iter().all(|(x, _)| x.gc_degree() == 1);
    r.check("gc.z.degree", "every term of z has degree 1", all_deg1, format!("{} terms", z.len()));
    let res = gc.mc_residual(&z);
    r.check(
        "gc.z.maurer-cartan",
        "d_s z + d_p z + 1/2 [z,z] = 0",
        res.is_zero(),
        format!("residual has {} terms", res.len()),
    );
    Ok(r.checks)
}

fn d_squared(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let mut r = Recorder::new(Suite::DSquared, format!("{} {}", gc_instance(cfg), bounds_text(cfg.bounds)));
    let gc = Gc::new(cfg.g, cfg.tadpoles)?;
    let z = gc.z()?;
    let gs = enumerate_graphs(cfg.g, cfg.tadpoles, cfg.bounds);
    info!("d-squared: {} graph classes", gs.len());
    let split = failures(&gs, |x| {
        let v = gv(x);
        (!gc.d_split(&gc.d_split(&v)).is_zero()).then(|| x.to_string())
    });
    r.cases("gc.d-split.square-zero", "d_s d_s = 0 on every graph class", gs.len(), &split);
    let full = failures(&gs, |x| {
        let v = gv(x);
        (!gc.d(&gc.d(&v)).is_zero()).then(|| x.to_string())
    });
    r.cases("gc.d.square-zero", "(d_s + d_p)^2 = 0 on every graph class", gs.len(), &full);
    let twisted = failures(&gs, |x| {
        let v = gv(x);
        (!gc.twisted(&z, &gc.twisted(&z, &v)).is_zero()).then(|| x.to_string())
    });
    r.cases("gc.twisted.square-zero", "(d + [z,-])^2 = 0 on every graph class", gs.len(), &twisted);
    Ok(r.checks)
}

/// Exhaustive suites use graphs with at most two vertices, two edges and
/// two decorations; sampled triples come from the configured bounds.
const JACOBI_SAMPLES: usize = 128;

fn jacobi(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let small_bounds = capped(cfg.bounds, 2, 2, 2);
    let mut r = Recorder::new(
        Suite::Jacobi,
        format!("{} exhaustive {} sampled {}", gc_instance(cfg), bounds_text(small_bounds), bounds_text(cfg.bounds)),
    );
    let gc = Gc::new(cfg.g, cfg.tadpoles)?;
    let small: Vec<Graph> = enumerate_graphs(cfg.g, cfg.tadpoles, small_bounds);
    let vs: Vec<GraphVector> = small.iter().map(gv).collect();
    let idx: Vec<usize> = (0..small.len()).collect();
    info!("jacobi: {} small graphs", small.len());

    let antisym = |a: &Graph, b: &Graph| {
        let (va, vb) = (gv(a), gv(b));
        let odd = a.gc_degree() * b.gc_degree() % 2 != 0;
        (&gc.bracket(&va, &vb) + &gc.bracket(&vb, &va).scaled(&sign(odd))).is_zero()
    };
    let jac = |a: &Graph, b: &Graph, c: &Graph| {
        let (va, vb, vc) = (gv(a), gv(b), gv(c));
        let odd = a.gc_degree() * b.gc_degree() % 2 != 0;
        let lhs = gc.bracket(&va, &gc.bracket(&vb, &vc));
        let rhs = &gc.bracket(&gc.bracket(&va, &vb), &vc) + &gc.bracket(&vb, &gc.bracket(&va, &vc)).scaled(&sign(odd));
        lhs == rhs
    };
    let leibniz = |a: &Graph, b: &Graph| {
        let (va, vb) = (gv(a), gv(b));
        let rhs = &gc.bracket(&gc.d(&va), &vb) + &gc.bracket(&va, &gc.d(&vb)).scaled(&sign(a.gc_degree() % 2 != 0));
        gc.d(&gc.bracket(&va, &vb)) == rhs
    };

    let n = small.len();
    let bad: Vec<String> = idx
        .par_iter()
        .flat_map_iter(|&i| {
            (0..n)
                .filter(|&j| !antisym(&small[i], &small[j]))
                .map(|j| format!("{} , {}", small[i], small[j]))
                .collect::<Vec<_>>()
        })
        .collect();
    r.cases("gc.bracket.antisymmetry", "[a,b] = -(-1)^{|a||b|} [b,a]", n * n, &bad);
    let bad: Vec<String> = idx
        .par_iter()
        .flat_map_iter(|&i| {
            (0..n)
                .filter(|&j| !leibniz(&small[i], &small[j]))
                .map(|j| format!("{} , {}", small[i], small[j]))
                .collect::<Vec<_>>()
        })
        .collect();
    r.cases("gc.bracket.derivation", "d[a,b] = [da,b] + (-1)^{|a|} [a,db]", n * n, &bad);
    let bad: Vec<String> = idx
        .par_iter()
        .flat_map_iter(|&i| {
            let mut out = Vec::new();
            for j in 0..n {
                let ab = gc.bracket(&vs[i], &vs[j]);
                let odd = small[i].gc_degree() * small[j].gc_degree() % 2 != 0;
                for k in 0..n {
                    let lhs = gc.bracket(&vs[i], &gc.bracket(&vs[j], &vs[k]));
                    let rhs = &gc.bracket(&ab, &vs[k]) + &gc.bracket(&vs[j], &gc.bracket(&vs[i], &vs[k])).scaled(&sign(odd));
                    if lhs != rhs {
                        out.push(format!("{} , {} , {}", small[i], small[j], small[k]));
                    }
                }
            }
            out
        })
        .collect();
    r.cases("gc.bracket.jacobi", "[a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]", n * n * n, &bad);

    // Sampled triples of larger graphs.
    let large: Vec<Graph> = enumerate_graphs(cfg.g, cfg.tadpoles, cfg.bounds)
        .into_iter()
        .filter(|x| x.vertex_count() >= 3 || cfg.bounds.vertices < 3)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let triples: Vec<[Graph; 3]> = (0..JACOBI_SAMPLES)
        .filter_map(|_| {
            let a = large.choose(&mut rng)?;
            let b = large.choose(&mut rng)?;
            let c = large.choose(&mut rng)?;
            Some([a.clone(), b.clone(), c.clone()])
        })
        .collect();
    let bad = failures(&triples, |[a, b, c]| {
        (!(jac(a, b, c) && antisym(a, b))).then(|| format!("{a} , {b} , {c}"))
    });
    r.cases(
        "gc.bracket.jacobi-sampled",
        "antisymmetry and Jacobi on sampled triples of larger graphs",
        triples.len(),
        &bad,
    );
    Ok(r.checks)
}

fn omega() -> HStar {
    HStar::D(Decoration::Omega)
}

/// `ω∂_{α_i} + β_i∂_1`, of degree -1.
fn sigma_beta(g: u8, i: u8) -> SpElement {
    SpElement::new(g, vec![(omega(), HStar::D(Decoration::Alpha(i)), 1), (HStar::D(Decoration::Beta(i)), HStar::One, 1)])
}

/// `ω∂_{β_j} - α_j∂_1`, of degree -1.
fn sigma_alpha(g: u8, j: u8) -> SpElement {
    SpElement::new(g, vec![(omega(), HStar::D(Decoration::Beta(j)), 1), (HStar::D(Decoration::Alpha(j)), HStar::One, -1)])
}

fn tripods(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let g = cfg.g;
    let mut r = Recorder::new(Suite::Tripods, gc_instance(cfg));
    let gc = Gc::new(g, cfg.tadpoles)?;
    let z = gc.z()?;
    let basis = sp_basis(g);
    let h = g as usize + 1;
    let expected = 2 * h * h - h - 1;
    r.check(
        "sp.basis.size",
        "dim sp' = 2n^2 - n - 1 with n = g + 1",
        basis.len() == expected,
        format!("basis size {}, expected {expected}", basis.len()),
    );
    let bad: Vec<String> = basis
        .iter()
        .filter(|s| !(s.preserves_pairing() && s.avoids_unit()))
        .map(|s| s.name())
        .collect();
    r.cases("sp.basis.pairing", "every basis element preserves the dual pairing and kills no unit", basis.len(), &bad);
    let mut bad = Vec::new();
    for s in &basis {
        for t in &basis {
            let b = s.bracket(t);
            if !(b.is_zero() || (b.preserves_pairing() && b.avoids_unit())) {
                bad.push(format!("[{}, {}]", s.name(), t.name()));
            }
        }
    }
    r.cases("sp.bracket.closure", "the commutator of two elements of sp' lies in sp'", basis.len() * basis.len(), &bad);
    let deg0: Vec<&SpElement> = basis.iter().filter(|s| s.degree() == 0).collect();
    let bad: Vec<String> = deg0
        .iter()
        .filter(|s| !sp_act(s, &z, cfg.tadpoles).is_zero())
        .map(|s| s.name())
        .collect();
    r.cases("sp.degree-zero.fixes-z", "sigma . z = 0 for every degree-0 sigma", deg0.len(), &bad);
    if g >= 2 {
        let bad: Vec<String> = (1..=g)
            .filter(|&i| sp_act(&sigma_beta(g, i), &z, cfg.tadpoles).is_zero())
            .map(|i| sigma_beta(g, i).name())
            .collect();
        r.cases("sp.degree-minus-one.moves-z", "(omega d_alpha_i + beta_i d_1) . z != 0", g as usize, &bad);

        let odd: Vec<Decoration> = Decoration::all(g).into_iter().filter(|d| d.is_odd()).collect();
        let mut triples = Vec::new();
        for &a in &odd {
            for &b in &odd {
                for &c in &odd {
                    if a != b && b != c && a != c {
                        triples.push((a, b, c));
                    }
                }
            }
        }
        let bad = failures(&triples, |&(a, b, c)| {
            let t = Gc::tripod_vector(a, b, c);
            (t.is_zero() || !gc.twisted(&z, &t).is_zero()).then(|| format!("t({},{},{})", a.label(), b.label(), c.label()))
        });
        r.cases("gc.tripod.closed", "d t_{a,b,c} = 0 for distinct odd classes", triples.len(), &bad);

        let mut bad = Vec::new();
        for j in 1..=g {
            let mut expect = GraphVector::new();
            for i in (1..=g).filter(|&i| i != j) {
                expect.add_scaled(&Gc::tripod_vector(Decoration::Alpha(i), Decoration::Beta(i), Decoration::Alpha(j)), &qi(-1));
            }
            let got = gc.extension_diff(&z, &sigma_alpha(g, j), &GraphVector::new());
            // Fixed global sign convention: the image is +/- the expected sum.
            if !(got == expect || got == expect.scaled(&qi(-1))) || got.is_zero() {
                bad.push(format!("sigma_alpha_{j}: got {got}"));
            }
        }
        r.cases(
            "gc.extension.tripod-sum",
            "d(sigma_alpha_j, 0) = (0, -sum_{i != j} t_{alpha_i,beta_i,alpha_j}) up to the global sign",
            g as usize,
            &bad,
        );
    }
    let zero = SpElement::new(g, vec![]);
    let bad: Vec<String> = basis
        .iter()
        .filter(|s| {
            let d1 = gc.extension_diff(&z, s, &GraphVector::new());
            !gc.extension_diff(&z, &zero, &d1).is_zero()
        })
        .map(|s| s.name())
        .collect();
    r.cases("gc.extension.square-zero", "d^2 (sigma, 0) = 0 in sp' x| GC", basis.len(), &bad);
    Ok(r.checks)
}

fn hairy(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    if cfg.tadpoles {
        return Err(VerifyError::Config("the hairy suite uses the tadpole-free complex".into()));
    }
    let g = cfg.g;
    let bounds = capped(cfg.bounds, 2, 3, 3);
    let mut r = Recorder::new(Suite::Hairy, format!("g={g} {}", bounds_text(bounds)));
    let h = Hgc::new(g)?;
    let gc = Gc::new(g, false)?;
    let m1 = h.m1()?;
    let m2 = h.m2();
    let one_vertex = m1.iter().all(|(x, _)| x.degree() == 1 && x.vertex_count() == 1);
    r.check(
        "hgc.m1.families",
        "F1(z) is the sum of the one-vertex families omega, 1, alpha_i beta_i, alpha_i, beta_i",
        one_vertex && m1.len() == 2 + 3 * g as usize,
        format!("{} terms", m1.len()),
    );
    let lhs = hbracket(&m1, &m1);
    r.check(
        "hgc.m1.self-bracket",
        "[m1,m1] = -2 d_s m1 (MC convention d x + 1/2 [x,x] = 0)",
        lhs == hd_split(&m1).scaled(&qi(-2)),
        format!("[m1,m1] has {} terms", lhs.len()),
    );
    r.check("hgc.m1-m2.bracket", "[m1,m2] = 0", hbracket(&m1, &m2).is_zero(), "");
    r.check("hgc.m2.self-bracket", "[m2,m2] = 0", hbracket(&m2, &m2).is_zero(), "");
    let m = h.m()?;
    let res = h.mc_residual(&m);
    r.check(
        "hgc.m.maurer-cartan",
        "d_s m + 1/2 [m,m] = 0 for m = m1 + m2",
        res.is_zero(),
        format!("residual has {} terms", res.len()),
    );

    let gs = enumerate_graphs(g, false, bounds);
    info!("hairy: {} graph classes", gs.len());
    let bad = failures(&gs, |a| (f1(&gc.d_pair(&gv(a))) != hbracket(&m2, &f1(&gv(a)))).then(|| a.to_string()));
    r.cases("hgc.f1.pairing", "F1(d_p G) = [m2, F1(G)]", gs.len(), &bad);
    let bad = failures(&gs, |a| (f1(&gc.d_split(&gv(a))) != hd_split(&f1(&gv(a)))).then(|| a.to_string()));
    r.cases("hgc.f1.splitting", "F1(d_s G) = d_s F1(G)", gs.len(), &bad);
    let pair_bounds = capped(cfg.bounds, 2, 2, 2);
    let pairs_set = enumerate_graphs(g, false, pair_bounds);
    let bad = failures(&pairs_set, |a| {
        let va = gv(a);
        pairs_set
            .iter()
            .find(|b| f1(&gc.bracket(&va, &gv(b))) != hbracket(&f1(&va), &f1(&gv(b))))
            .map(|b| format!("{a} , {b}"))
    });
    r.cases(
        "hgc.f1.lie-morphism",
        &format!("F1[a,b] = [F1 a, F1 b] on graphs with {}", bounds_text(pair_bounds)),
        pairs_set.len() * pairs_set.len(),
        &bad,
    );
    let basis = sp_basis(g);
    let bad: Vec<String> = basis
        .iter()
        .filter(|s| !hbracket(&m2, &f2(s)).is_zero())
        .map(|s| s.name())
        .collect();
    r.cases("hgc.f2.m2", "[m2, F2(sigma)] = 0", basis.len(), &bad);
    let bad = failures(&gs, |a| {
        let va = gv(a);
        basis
            .iter()
            .find(|s| f1(&sp_act(s, &va, false)) != hbracket(&f2(s), &f1(&va)))
            .map(|s| format!("{} , {a}", s.name()))
    });
    r.cases("hgc.f.intertwines", "F1(sigma . G) = [F2(sigma), F1(G)]", gs.len() * basis.len(), &bad);
    let zero = SpElement::new(g, vec![]);
    let mut bad = failures(&gs, |a| match h.chain_defect(&zero, &gv(a)) {
        Ok(d) if d.is_zero() => None,
        Ok(_) => Some(a.to_string()),
        Err(e) => Some(format!("{a}: {e}")),
    });
    for s in &basis {
        match h.chain_defect(s, &GraphVector::new()) {
            Ok(d) if d.is_zero() => {}
            Ok(_) => bad.push(s.name()),
            Err(e) => bad.push(format!("{}: {e}", s.name())),
        }
    }
    r.cases("hgc.f.chain-map", "d F = F d on sp' x| GC", gs.len() + basis.len(), &bad);
    Ok(r.checks)
}

fn presentation(cfg: &SuiteConfig, n: u8) -> Result<Presentation, VerifyError> {
    Ok(match cfg.variant {
        Variant::Framed => t_g_presentation(n, cfg.g, true)?,
        Variant::Nonframed => t_nonframed_presentation(n)?,
    })
}

fn quotient_dims(dims: &[crate::lie::WeightDims]) -> Vec<usize> {
    dims.iter().map(|d| d.dim_quotient).collect()
}

fn tg_dims(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let w = cfg.max_weight;
    let mut r = Recorder::new(
        Suite::TgDims,
        format!("g={} n={} variant={} max_weight={w}", cfg.g, cfg.n, cfg.variant),
    );
    let p = presentation(cfg, cfg.n)?;
    let graded = GradedLie::new(&p, w)?;
    let dims = graded.dims();
    let sat = PresentedLie::from_presentation(&p, w)?;
    r.check(
        "lie.t.dims",
        "weight dimensions of the graded quotient agree with the saturated presentation",
        dims == sat.dims,
        format!("{}: dims {:?}", p.name, quotient_dims(&dims)),
    );
    if cfg.g == 1 && cfg.n == 1 && cfg.variant == Variant::Framed {
        let q = quotient_dims(&dims);
        let expect: Vec<usize> = (1..=w).map(|k| [2, 1].get(k - 1).copied().unwrap_or(0)).collect();
        r.check("lie.t11.dims", "t_(1)(1) has dims 2, 1, 0, ...", q == expect, format!("dims {q:?}"));
        let mut nonzero = Vec::new();
        let mut total = 0;
        for w1 in 1..w {
            for w2 in 1..=(w - w1) {
                for i in 0..graded.dim(w1) {
                    for j in 0..graded.dim(w2) {
                        total += 1;
                        let b = graded.bracket(&graded.basis_element(w1, i), &graded.basis_element(w2, j))?;
                        if !b.is_zero() {
                            nonzero.push(format!("({w1},{i}) ({w2},{j})"));
                        }
                    }
                }
            }
        }
        r.check(
            "lie.t11.abelian",
            "all brackets in t_(1)(1) vanish",
            nonzero.is_empty(),
            format!("{total} basis brackets, {} nonzero", nonzero.len()),
        );
    }
    if cfg.variant == Variant::Framed {
        coherence(cfg, &mut r)?;
    }
    Ok(r.checks)
}

/// Maps `[m] -> [n]` enumerated as value lists.
fn all_maps(m: u8, n: u8) -> Vec<Vec<u8>> {
    let total = (n as usize).pow(m as u32);
    (0..total)
        .map(|code| {
            let mut c = code;
            (0..m)
                .map(|_| {
                    let v = (c % n as usize) as u8 + 1;
                    c /= n as usize;
                    v
                })
                .collect()
        })
        .collect()
}

/// Coherence of the maps θ^φ and of the insertions ∘_u, at weight ≤ 3.
fn coherence(cfg: &SuiteConfig, r: &mut Recorder) -> Result<(), VerifyError> {
    let g = cfg.g;
    let w = cfg.max_weight.min(3);
    let ps: Vec<PresentedLie> = (1..=3u8).map(|n| t_g(n, g, w)).collect::<Result<_, _>>()?;
    let p = |n: u8| &ps[n as usize - 1];

    let mut bad = Vec::new();
    let mut total = 0;
    for src in &ps {
        for tgt in &ps {
            for phi in all_maps(tgt.n, src.n) {
                total += 1;
                if let Err(e) = theta_phi(src, tgt, &phi) {
                    bad.push(format!("{} -> {} phi={phi:?}: {e}", src.name, tgt.name));
                }
            }
        }
    }
    r.cases("lie.theta.relations", "theta^phi preserves the defining relations for every map of arities <= 3", total, &bad);

    let gs: Vec<GradedLie> = (1..=3u8)
        .map(|n| GradedLie::new(&t_g_presentation(n, g, true)?, cfg.max_weight))
        .collect::<Result<_, LieError>>()?;
    let mut bad = Vec::new();
    let mut total = 0;
    for src in &gs {
        for tgt in &gs {
            for phi in all_maps(tgt.n, src.n) {
                total += 1;
                if let Err(e) = graded_theta(src, tgt, &phi) {
                    bad.push(format!("{} -> {} phi={phi:?}: {e}", src.name, tgt.name));
                }
            }
        }
    }
    r.cases(
        "lie.theta.relations-graded",
        &format!("theta^phi is a morphism of the graded quotients up to weight {}", cfg.max_weight),
        total,
        &bad,
    );

    let mut bad = Vec::new();
    let mut total = 0;
    let n = 2u8;
    for k in 1..n {
        total += 1;
        let set_ok = compose_maps(&delta(n - 1, k), &delta(n, k + 1)) == compose_maps(&delta(n - 1, k), &delta(n, k));
        let outer = theta_phi(p(n - 1), p(n), &delta(n - 1, k))?;
        let a = theta_phi(p(n), p(n + 1), &delta(n, k + 1))?.compose(&outer)?;
        let b = theta_phi(p(n), p(n + 1), &delta(n, k))?.compose(&outer)?;
        let direct = theta_phi(p(n - 1), p(n + 1), &compose_maps(&delta(n - 1, k), &delta(n, k)))?;
        if !(set_ok && a.agrees_with(&b) && a.agrees_with(&direct)) {
            bad.push(format!("n={n} k={k}"));
        }
    }
    r.cases(
        "lie.theta.coface",
        "theta of delta_k^{n-1} o delta_{k+1}^n equals theta of delta_k^{n-1} o delta_k^n on all generators",
        total,
        &bad,
    );

    let t4 = t_g(4, g, w)?;
    let bv = t_bv(2, w)?;
    let (l_a, r_a) = comp_u(p(2), &bv, p(3), 2)?;
    let (l_b, r_b) = comp_u(p(3), &bv, &t4, 1)?;
    let (l_c, r_c) = comp_u(p(2), &bv, p(3), 1)?;
    let (l_d, r_d) = comp_u(p(3), &bv, &t4, 3)?;
    let first = l_b.compose(&l_a)?;
    let second = l_d.compose(&l_c)?;
    let ok = first.agrees_with(&second)
        && l_b.compose(&r_a)?.agrees_with(&r_d)
        && l_d.compose(&r_c)?.agrees_with(&r_b);
    r.check(
        "lie.insertion.associative",
        "(X o_2 W) o_1 W' = (X o_1 W') o_3 W for insertions of t_bv(2) into t(2)",
        ok,
        format!("weight {w}"),
    );
    Ok(())
}

fn center(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    if cfg.n != 1 || cfg.g < 2 || cfg.variant != Variant::Framed {
        return Err(VerifyError::Config("the center suite needs n = 1, g >= 2 and the framed variant".into()));
    }
    let w = cfg.max_weight;
    let mut r = Recorder::new(Suite::Center, format!("g={} n=1 max_weight={w}", cfg.g));
    let p = t_g(1, cfg.g, w + 1)?;
    let t11 = p.reduce(&p.gen(Gen::T(1, 1)));
    let mut bad = Vec::new();
    let mut dims = Vec::new();
    for k in 1..=w {
        let c = p.center(k)?;
        dims.push(c.len());
        let ok = if k == 2 {
            c.len() == 1 && {
                let x = p.reduce(&c[0]);
                let (_, coef) = t11.iter().next().expect("t11 is nonzero");
                let (key, _) = t11.iter().next().expect("t11 is nonzero");
                let s = x.coeff(key) / coef;
                !s.is_zero() && x == t11.scaled(&s)
            }
        } else {
            c.is_empty()
        };
        if !ok {
            bad.push(format!("weight {k}: center dim {}", c.len()));
        }
    }
    let identity = format!("the center of t_({})(1) in weights <= {w} is span{{t_11}}", cfg.g);
    let mut detail = format!("center dims {dims:?}");
    if let Some(b) = bad.first() {
        detail.push_str(&format!("; {b}"));
    }
    r.check("lie.center.t11", &identity, bad.is_empty(), detail);
    Ok(r.checks)
}

fn mo_mc(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let (rr, g) = (cfg.n, cfg.g);
    let framed = cfg.variant == Variant::Framed;
    let options = MoOptions { framed, ab_relation: true };
    let mut r = Recorder::new(
        Suite::MoMc,
        format!("r={rr} g={g} variant={} max_weight={}", cfg.variant, cfg.max_weight),
    );
    let mo = Mo::new(rr, g, 5, options)?;
    let basis: Vec<Vec<MoElement>> = (0..=3)
        .map(|d| {
            mo.basis(d)
                .map(|b| b.into_iter().map(|m| MoElement::single(m, qi(1))).collect::<Vec<_>>())
        })
        .collect::<Result<_, _>>()?;
    let mut pairs = Vec::new();
    for di in 1..=2usize {
        for dj in 1..=(3 - di) {
            for i in 0..basis[di].len() {
                for j in 0..basis[dj].len() {
                    pairs.push((di, i, dj, j));
                }
            }
        }
    }
    let comm = failures(&pairs, |&(di, i, dj, j)| {
        let (x, y) = (&basis[di][i], &basis[dj][j]);
        let ok = (|| -> Result<bool, MoError> {
            Ok(mo.mult(x, y)? == mo.mult(y, x)?.scaled(&sign(di * dj % 2 == 1)))
        })();
        (!matches!(ok, Ok(true))).then(|| format!("{} , {}", mo.format(x), mo.format(y)))
    });
    r.cases("mo.product.graded-commutative", "x y = (-1)^{|x||y|} y x on basis pairs of total degree <= 3", pairs.len(), &comm);
    let leib = failures(&pairs, |&(di, i, dj, j)| {
        let (x, y) = (&basis[di][i], &basis[dj][j]);
        let ok = (|| -> Result<bool, MoError> {
            let lhs = mo.diff(&mo.mult(x, y)?)?;
            let rhs = &mo.mult(&mo.diff(x)?, y)? + &mo.mult(x, &mo.diff(y)?)?.scaled(&sign(di % 2 == 1));
            Ok(lhs == rhs)
        })();
        (!matches!(ok, Ok(true))).then(|| format!("{} , {}", mo.format(x), mo.format(y)))
    });
    r.cases("mo.diff.leibniz", "d(xy) = (dx)y + (-1)^{|x|} x(dy) on basis pairs of total degree <= 3", pairs.len(), &leib);
    let all: Vec<&MoElement> = basis.iter().flatten().collect();
    let sq = failures(&all, |x| {
        let ok = mo.diff(x).and_then(|d| mo.diff(&d)).map(|d| d.is_zero());
        (!matches!(ok, Ok(true))).then(|| mo.format(x))
    });
    r.cases("mo.diff.square-zero", "d^2 = 0 on the basis in degrees <= 3", all.len(), &sq);
    let rels = mo.relations();
    let bad: Vec<String> = rels
        .iter()
        .filter(|x| !matches!(mo.diff(x).map(|d| d.is_zero()), Ok(true)))
        .map(|x| mo.format(x))
        .collect();
    r.cases("mo.ideal.closed", "d maps the defining relations into the ideal", rels.len(), &bad);
    let rep = mc_check_xi(rr, g, cfg.max_weight, options)?;
    let nonzero: Vec<String> = rep
        .blocks
        .iter()
        .filter(|b| b.residual_dim > 0)
        .map(|b| format!("block {:?}: residual dim {}", b.block, b.residual_dim))
        .collect();
    r.cases(
        "mo.mc.element",
        "d m + 1/2 [m,m] = 0 in Mo_(g)(r) (x) t_(g)(r) for the canonical element m",
        rep.blocks.len(),
        &nonzero,
    );
    // For r = g = 1 the bracket [x_1, y_1] vanishes in t_(1)(1), so the
    // relation never enters the residual and the control has nothing to detect.
    if rr > 1 || g > 1 {
        let control = mc_check_xi(rr, g, cfg.max_weight, MoOptions { framed, ab_relation: false })?;
        let dims: Vec<usize> = control.blocks.iter().map(|b| b.residual_dim).collect();
        r.check(
            "mo.mc.control",
            "dropping the relation a_l b_l = nu leaves a nonzero residual",
            !control.is_zero(),
            format!("residual dims by block {dims:?}"),
        );
    }
    Ok(r.checks)
}

fn grt_instance(cfg: &SuiteConfig) -> String {
    format!("g={} variant={} max_weight={}", cfg.g, cfg.variant, cfg.max_weight)
}

fn all_in_z(grt: &crate::grt::Grt<'_>, u: &DerivationTuple) -> Result<bool, GrtError> {
    Ok(grt.zg_residuals(u)?.iter().all(|x| x.value.is_zero()))
}

/// Weights for the exhaustive `{Z, B} ⊆ B` check.
const IDEAL_WEIGHT: usize = 3;

fn zg(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let (g, w) = (cfg.g, cfg.max_weight);
    let mut r = Recorder::new(Suite::Zg, grt_instance(cfg));
    let alg = GrtAlgebras::new(g, cfg.variant, w + 2)?;
    let grt = alg.solver()?;

    if g == 1 {
        let [h, e, f] = grt.sl2()?;
        let ok = all_in_z(&grt, &h)?
            && all_in_z(&grt, &e)?
            && all_in_z(&grt, &f)?
            && grt.grt_bracket(&e, &f)? == h
            && grt.grt_bracket(&h, &e)? == e.scaled(&qi(2))
            && grt.grt_bracket(&h, &f)? == f.scaled(&qi(-2));
        r.check("grt.sl2", "{E,F} = H, {H,E} = 2E, {H,F} = -2F with H, E, F in Z", ok, "");
    }

    let mut z = Vec::new();
    let mut b = Vec::new();
    let mut rows = Vec::new();
    for k in 0..=w {
        info!("zg: weight {k}");
        z.push(grt.zg_solve(k)?);
        b.push(grt.bg_basis(k)?);
        rows.push(grt.table_row(k));
    }
    let mut bad = Vec::new();
    let mut table = Vec::new();
    for (k, row) in rows.into_iter().enumerate() {
        match row {
            Ok(row) => table.push(format!("w{k}: Z={} B={} r={}", row.dim_z, row.dim_b, row.dim_r)),
            Err(e) => bad.push(format!("weight {k}: {e}")),
        }
    }
    let mut detail = table.join(", ");
    if let Some(x) = bad.first() {
        detail.push_str(&format!("; {x}"));
    }
    r.check("grt.b.in-z", "every element of B satisfies the defining equations of Z", bad.is_empty(), detail);

    let dense = (0..=w)
        .map(|k| Ok::<_, GrtError>((k, z[k].len(), zg_dim_dense(&alg, k)?)))
        .collect::<Result<Vec<_>, _>>()?;
    let bad: Vec<String> = dense
        .iter()
        .filter(|(_, s, d)| s != d)
        .map(|(k, s, d)| format!("weight {k}: sparse {s}, dense {d}"))
        .collect();
    r.cases("grt.z.dense-oracle", "dim Z from the sparse solver equals the dense formulation", w + 1, &bad);

    let top = w.min(IDEAL_WEIGHT);
    let mut bad = Vec::new();
    let mut total = 0;
    for w1 in 0..=top {
        for w2 in 0..=(top - w1) {
            for u in &z[w1] {
                for v in &b[w2] {
                    total += 1;
                    let x = grt.grt_bracket(u, v)?;
                    if !grt.in_span(&x, &b[w1 + w2]) {
                        bad.push(format!("weights {w1},{w2}"));
                    }
                }
            }
        }
    }
    r.check(
        "grt.b.ideal",
        &format!("{{Z, B}} lies in B on exhaustive bases, total weight <= {top}"),
        bad.is_empty(),
        format!("{total} brackets, {} failed", bad.len()),
    );

    let bdims: Vec<usize> = b.iter().map(|x| x.len()).collect();
    match (g, cfg.variant) {
        (1, Variant::Nonframed) => {
            r.check(
                "grt.b.nonframed-zero",
                &format!("B^nonframed_(1) = 0 in weights <= {w}"),
                bdims.iter().all(|&d| d == 0),
                format!("dims {bdims:?}"),
            );
        }
        (1, Variant::Framed) if w >= 2 => {
            let t2 = &alg.t2;
            let t12 = t2.gen(Gen::T(1, 2));
            let gen = DerivationTuple::zero(1, 2)
                .with(H1::A(1), t2.bracket(&t12, &t2.gen(Gen::X(1, 1)))?)
                .with(H1::B(1), t2.bracket(&t12, &t2.gen(Gen::Y(1, 1)))?);
            let ok = bdims.iter().enumerate().all(|(k, &d)| d == usize::from(k == 2))
                && !gen.is_zero()
                && grt.in_span(&gen, &b[2]);
            r.check(
                "grt.b.framed-one-dim",
                "B_(1) is one-dimensional, spanned by ([t12,x], [t12,y])",
                ok,
                format!("dims {bdims:?}"),
            );
        }
        _ => {}
    }
    Ok(r.checks)
}

fn commutator(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| qi((0..n).map(|k| a[i][k] * b[k][j] - b[i][k] * a[k][j]).sum()))
                .collect()
        })
        .collect()
}

/// Weight truncations for the two δ checks.
const DELTA_TRUNCATIONS: [(usize, usize); 2] = [(0, 5), (1, 8)];

fn lemmas(cfg: &SuiteConfig) -> Result<Vec<Check>, VerifyError> {
    let g = cfg.g;
    let mut r = Recorder::new(Suite::Lemmas, format!("g={g} variant={}", cfg.variant));
    if cfg.variant == Variant::Nonframed {
        for (n, trunc) in DELTA_TRUNCATIONS {
            info!("lemmas: delta_{} at truncation {trunc}", 2 * n);
            let alg = GrtAlgebras::new(1, Variant::Nonframed, trunc)?;
            let grt = alg.solver()?;
            let d = grt.delta_2n(n)?;
            let res = grt.rell_residuals(&d)?;
            let bad: Vec<String> = res.iter().filter(|x| !x.value.is_zero()).map(|x| x.equation.clone()).collect();
            let mut bad = bad;
            if d.is_zero() {
                bad.push("delta is zero".into());
            }
            r.cases(
                &format!("grt.delta{}.r-ell", 2 * n),
                &format!("delta_{} satisfies the defining equations of r_ell (truncation {trunc})", 2 * n),
                res.len(),
                &bad,
            );
        }
        return Ok(r.checks);
    }
    let alg = GrtAlgebras::new(g, Variant::Framed, 4)?;
    let grt = alg.solver()?;
    if g >= 2 {
        let hs = H1::all(g);
        let mut triples = Vec::new();
        for &a in &hs {
            for &b in &hs {
                for &c in &hs {
                    if a != b && b != c && a != c {
                        triples.push((a, b, c));
                    }
                }
            }
        }
        let mut bad = Vec::new();
        for &(a, b, c) in &triples {
            let v = grt.tripod(a, b, c)?;
            if v.is_zero() || !all_in_z(&grt, &v)? {
                bad.push(format!("V({},{},{})", a.name(), b.name(), c.name()));
            }
        }
        r.cases("grt.tripod.in-z", "V_{a,b,c} lies in Z_(g) for distinct classes", triples.len(), &bad);
    }
    let b1 = grt.bg_basis(1)?;
    let mut bad = Vec::new();
    for j in 1..=g {
        let aj = grt.a_j(j)?;
        let bj = grt.b_j(j)?;
        let x = grt.b_image(&alg.t1.gen(Gen::X(j, 1)), 1)?;
        let y = grt.b_image(&alg.t1.gen(Gen::Y(j, 1)), 1)?;
        if !grt.in_span(&aj, &b1) || aj != x.scaled(&qi(-1)) {
            bad.push(format!("A_{j}"));
        }
        if !grt.in_span(&bj, &b1) || bj != y.scaled(&qi(-1)) {
            bad.push(format!("B_{j}"));
        }
    }
    r.cases("grt.aj-bj.in-b", "A_j and B_j lie in B_(g)", 2 * g as usize, &bad);

    let basis = Sp0::basis(g);
    let images: Vec<DerivationTuple> = basis.iter().map(|s| grt.sp0_image(*s)).collect();
    let mut bad = Vec::new();
    for (s, x) in basis.iter().zip(&images) {
        if !all_in_z(&grt, x)? {
            bad.push(s.name());
        }
    }
    r.cases("grt.sp0.in-z", "the images of sp'_0 lie in Z_(g)", basis.len(), &bad);
    let mut bad = Vec::new();
    for (s, x) in basis.iter().zip(&images) {
        for (t, y) in basis.iter().zip(&images) {
            let br = grt.grt_bracket(x, y)?;
            if br != grt.linear_tuple(&commutator(&s.matrix(g), &t.matrix(g))) {
                bad.push(format!("{{{}, {}}}", s.name(), t.name()));
            }
        }
    }
    r.cases(
        "grt.sp0.bracket",
        "{img s, img t} is the image of the commutator [s, t]",
        basis.len() * basis.len(),
        &bad,
    );
    Ok(r.checks)
}
