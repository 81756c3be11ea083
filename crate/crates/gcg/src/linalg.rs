//! Exact linear algebra over the rationals.
//!
//! Matrices act on column vectors, so a matrix with `rows = m`, `cols = n`
//! represents a map from an `n`-dimensional space to an `m`-dimensional one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;

/// Sparse vector keyed by coordinate index.
pub type SparseVec = BTreeMap<usize, Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("composition of differentials is nonzero ({nonzero} nonzero entries)")]
    CompositionNonzero { nonzero: usize },
    #[error("cannot parse rational {0:?}")]
    Parse(String),
    #[error("malformed matrix dump: {0}")]
    Dump(String),
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| LinalgError::Parse(s.to_string()))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(LinalgError::Parse(s.to_string()));
            }
            Ok(Rational::new(parse(n)?, d))
        }
        None => Ok(Rational::from_integer(parse(s)?)),
    }
}

/// Formats as `p/q`, or `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Adds `c * src` into `dst`, dropping zeros.
pub fn axpy(dst: &mut SparseVec, c: &Rational, src: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (k, v) in src {
        add_entry(dst, *k, c * v);
    }
}

pub fn add_entry(dst: &mut SparseVec, k: usize, v: Rational) {
    if v.is_zero() {
        return;
    }
    let remove = match dst.get_mut(&k) {
        Some(e) => {
            *e += v;
            e.is_zero()
        }
        None => {
            dst.insert(k, v);
            false
        }
    };
    if remove {
        dst.remove(&k);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

#[derive(Serialize, Deserialize)]
struct MatrixDump {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, String)>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Result<Self, LinalgError> {
        let mut m = SparseMatrix::new(rows, cols);
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(LinalgError::DimensionMismatch(format!(
                    "entry ({r},{c}) outside {rows}x{cols}"
                )));
            }
            m.add(r, c, v);
        }
        Ok(m)
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = SparseMatrix::new(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (i, v) in col {
                assert!(*i < rows, "column entry out of range");
                m.add(*i, j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn add(&mut self, r: usize, c: usize, v: Rational) {
        if v.is_zero() {
            return;
        }
        let key = (r, c);
        let remove = match self.entries.get_mut(&key) {
            Some(e) => {
                *e += v;
                e.is_zero()
            }
            None => {
                self.entries.insert(key, v);
                false
            }
        };
        if remove {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.entries.iter().map(|((r, c), v)| (*r, *c, v))
    }

    pub fn transpose(&self) -> Self {
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: self
                .entries
                .iter()
                .map(|((r, c), v)| ((*c, *r), v.clone()))
                .collect(),
        }
    }

    pub fn row_vecs(&self) -> Vec<SparseVec> {
        let mut out = vec![SparseVec::new(); self.rows];
        for ((r, c), v) in &self.entries {
            out[*r].insert(*c, v.clone());
        }
        out
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let rhs = other.row_vecs();
        let mut out = SparseMatrix::new(self.rows, other.cols);
        for ((r, k), v) in &self.entries {
            for (c, w) in &rhs[*k] {
                out.add(*r, *c, v * w);
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for ((r, c), a) in &self.entries {
            if let Some(x) = v.get(c) {
                add_entry(&mut out, *r, a * x);
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut d = vec![vec![Rational::zero(); self.cols]; self.rows];
        for ((r, c), v) in &self.entries {
            d[*r][*c] = v.clone();
        }
        d
    }

    pub fn to_json(&self) -> String {
        let dump = MatrixDump {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .map(|((r, c), v)| (*r, *c, fmt_rational(v)))
                .collect(),
        };
        serde_json::to_string(&dump).expect("matrix dump serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, LinalgError> {
        let dump: MatrixDump =
            serde_json::from_str(s).map_err(|e| LinalgError::Dump(e.to_string()))?;
        let mut trip = Vec::with_capacity(dump.entries.len());
        for (r, c, v) in dump.entries {
            trip.push((r, c, parse_rational(&v)?));
        }
        SparseMatrix::from_triplets(dump.rows, dump.cols, trip)
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_dense() {
            let cells: Vec<String> = row.iter().map(fmt_rational).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

type IntRow = BTreeMap<usize, BigInt>;

fn integer_row(row: &SparseVec) -> IntRow {
    let mut l = BigInt::one();
    for v in row.values() {
        l = l.lcm(v.denom());
    }
    let mut out: IntRow = row
        .iter()
        .map(|(k, v)| (*k, v.numer() * (&l / v.denom())))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut IntRow) {
    let mut g = BigInt::zero();
    for v in row.values() {
        g = g.gcd(v);
        if g.is_one() {
            return;
        }
    }
    if !g.is_zero() && !g.is_one() {
        for v in row.values_mut() {
            *v /= &g;
        }
    }
}

/// Rank by fraction-free elimination on integer rows with Markowitz pivoting.
///
/// Rows are cleared of denominators up front. Each elimination step replaces
/// `s` by `(p/g) s - (a/g) r` with `g = gcd(p, a)` and then divides out the
/// content, so all intermediate entries stay integral.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut rows: Vec<IntRow> = m
        .row_vecs()
        .iter()
        .filter(|r| !r.is_empty())
        .map(integer_row)
        .collect();
    let mut col_rows: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        for c in r.keys() {
            col_rows.entry(*c).or_default().insert(i);
        }
    }
    let mut active: BTreeSet<usize> = (0..rows.len()).collect();
    let mut rank = 0;
    while !active.is_empty() {
        // Markowitz choice over the active submatrix.
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for &i in &active {
            let rl = rows[i].len();
            if rl == 0 {
                continue;
            }
            for c in rows[i].keys() {
                let cl = col_rows[c].len();
                let cost = (rl - 1) * (cl - 1);
                let better = match best {
                    None => true,
                    Some((bc, bsize, _, _)) => {
                        cost < bc || (cost == bc && rows[i][c].bits() < bsize as u64)
                    }
                };
                if better {
                    best = Some((cost, rows[i][c].bits() as usize, i, *c));
                }
                if cost == 0 {
                    break;
                }
            }
        }
        let Some((_, _, pr, pc)) = best else { break };
        active.remove(&pr);
        let prow = std::mem::take(&mut rows[pr]);
        for c in prow.keys() {
            if let Some(s) = col_rows.get_mut(c) {
                s.remove(&pr);
            }
        }
        rank += 1;
        let p = prow[&pc].clone();
        let targets: Vec<usize> = col_rows
            .get(&pc)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        for s in targets {
            let a = rows[s][&pc].clone();
            let g = p.gcd(&a);
            let fp = &p / &g;
            let fa = &a / &g;
            let old = std::mem::take(&mut rows[s]);
            let mut new = IntRow::new();
            for (c, v) in &old {
                let x = v * &fp;
                new.insert(*c, x);
            }
            for (c, v) in &prow {
                let x = v * &fa;
                let e = new.entry(*c).or_insert_with(BigInt::zero);
                *e -= x;
            }
            new.retain(|_, v| !v.is_zero());
            make_primitive(&mut new);
            for c in old.keys() {
                if !new.contains_key(c) {
                    col_rows.get_mut(c).unwrap().remove(&s);
                }
            }
            for c in new.keys() {
                if !old.contains_key(c) {
                    col_rows.entry(*c).or_default().insert(s);
                }
            }
            rows[s] = new;
            if rows[s].is_empty() {
                active.remove(&s);
            }
        }
    }
    rank
}

/// Plain dense Gaussian elimination rank, used as an independent check.
pub fn dense_rank(m: &[Vec<Rational>]) -> usize {
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let nrows = a.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = a[0].len();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..ncols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..nrows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..ncols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

/// Incrementally maintained reduced row echelon form over the rationals.
///
/// Optionally records, for every stored row, the combination of inserted
/// vectors that produced it, which lets callers solve linear systems.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseVec>,
    combos: Vec<SparseVec>,
    pivots: BTreeMap<usize, usize>,
    inserted: usize,
    track: bool,
    order: Option<Vec<usize>>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tracking() -> Self {
        Echelon {
            track: true,
            ..Self::default()
        }
    }

    /// Pivots are chosen as the coordinate of smallest `priority[k]`
    /// instead of the smallest `k`.
    pub fn with_priority(priority: Vec<usize>) -> Self {
        Echelon {
            order: Some(priority),
            ..Self::default()
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivots.keys().copied()
    }

    pub fn is_pivot(&self, c: usize) -> bool {
        self.pivots.contains_key(&c)
    }

    fn leading(&self, v: &SparseVec) -> Option<usize> {
        match &self.order {
            None => v.keys().next().copied(),
            Some(p) => v.keys().copied().min_by_key(|k| p.get(*k).copied().unwrap_or(*k)),
        }
    }

    /// Reduces `v` modulo the stored rows; returns the remainder and the
    /// coefficients of stored rows that were subtracted.
    fn reduce_full(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut used = SparseVec::new();
        let keys: Vec<usize> = v.keys().copied().filter(|k| self.pivots.contains_key(k)).collect();
        for k in keys {
            let Some(c) = v.get(&k).cloned() else { continue };
            let ri = self.pivots[&k];
            axpy(&mut v, &(-&c), &self.rows[ri]);
            add_entry(&mut used, ri, c);
        }
        (v, used)
    }

    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        self.reduce_full(v).0
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Inserts `v`; returns true when it was independent of the stored rows.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let idx = self.inserted;
        self.inserted += 1;
        let (mut r, used) = self.reduce_full(v);
        let Some(lead) = self.leading(&r) else {
            return false;
        };
        let inv = r[&lead].recip();
        for x in r.values_mut() {
            *x *= &inv;
        }
        let mut combo = SparseVec::new();
        if self.track {
            combo.insert(idx, Rational::one());
            for (ri, c) in &used {
                axpy(&mut combo, &(-c), &self.combos[*ri]);
            }
            for x in combo.values_mut() {
                *x *= &inv;
            }
        }
        // Keep the stored rows fully reduced.
        for i in 0..self.rows.len() {
            if let Some(c) = self.rows[i].get(&lead).cloned() {
                let row = r.clone();
                axpy(&mut self.rows[i], &(-&c), &row);
                if self.track {
                    let cb = combo.clone();
                    axpy(&mut self.combos[i], &(-&c), &cb);
                }
            }
        }
        self.pivots.insert(lead, self.rows.len());
        self.rows.push(r);
        self.combos.push(combo);
        true
    }

    /// With tracking enabled, expresses `v` as a combination of the inserted
    /// vectors (keyed by insertion index), or returns `None`.
    pub fn solve(&self, v: &SparseVec) -> Option<SparseVec> {
        assert!(self.track, "solve needs a tracking echelon");
        let (r, used) = self.reduce_full(v);
        if !r.is_empty() {
            return None;
        }
        let mut out = SparseVec::new();
        for (ri, c) in &used {
            axpy(&mut out, c, &self.combos[*ri]);
        }
        Some(out)
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }
}

/// Basis of the kernel of `m`, one dense vector of length `m.cols()` per
/// free column of the reduced row echelon form.
pub fn nullspace_basis(m: &SparseMatrix) -> Vec<Vec<Rational>> {
    let mut ech = Echelon::new();
    for r in m.row_vecs() {
        if !r.is_empty() {
            ech.insert(&r);
        }
    }
    let mut out = Vec::new();
    for free in 0..m.cols() {
        if ech.is_pivot(free) {
            continue;
        }
        let mut v = vec![Rational::zero(); m.cols()];
        v[free] = Rational::one();
        for (p, ri) in &ech.pivots {
            if let Some(c) = ech.rows[*ri].get(&free) {
                v[*p] = -c;
            }
        }
        out.push(v);
    }
    out
}

/// `dim ker(d_out) - dim im(d_in)` at the middle space.
///
/// `d_in: A -> B` has `rows = dim B`; `d_out: B -> C` has `cols = dim B`.
pub fn cohomology_dim(d_in: &SparseMatrix, d_out: &SparseMatrix) -> Result<usize, LinalgError> {
    if d_in.rows() != d_out.cols() {
        return Err(LinalgError::DimensionMismatch(format!(
            "d_in lands in dimension {}, d_out starts in dimension {}",
            d_in.rows(),
            d_out.cols()
        )));
    }
    let comp = d_out.mul(d_in)?;
    if !comp.is_zero() {
        return Err(LinalgError::CompositionNonzero { nonzero: comp.nnz() });
    }
    Ok(d_out.cols() - rank(d_out) - rank(d_in))
}

pub fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = SparseMatrix::new(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.add(i, j, qi(*v));
            }
        }
        m
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&mat(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(rank(&mat(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank(&mat(&[&[0, 0], &[0, 0]])), 0);
        let mut m = SparseMatrix::new(2, 2);
        m.add(0, 0, q(1, 2));
        m.add(0, 1, q(1, 3));
        m.add(1, 0, q(3, 2));
        m.add(1, 1, qi(1));
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn cohomology_of_circle_complex() {
        // Z -> Z^2 -> Z with d_in = (1,1)^T, d_out = (1,-1).
        let d_in = mat(&[&[1], &[1]]);
        let d_out = mat(&[&[1, -1]]);
        assert_eq!(cohomology_dim(&d_in, &d_out).unwrap(), 0);
        let bad = mat(&[&[1, 1]]);
        assert!(matches!(
            cohomology_dim(&d_in, &bad),
            Err(LinalgError::CompositionNonzero { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let mut m = SparseMatrix::new(3, 2);
        m.add(0, 1, q(-3, 7));
        m.add(2, 0, qi(5));
        let back = SparseMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(m, back);
        assert_eq!(parse_rational("-6/4").unwrap(), q(-3, 2));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn solve_tracks_combinations() {
        let mut e = Echelon::tracking();
        let v0: SparseVec = [(0, qi(1)), (1, qi(1))].into_iter().collect();
        let v1: SparseVec = [(1, qi(1)), (2, qi(2))].into_iter().collect();
        e.insert(&v0);
        e.insert(&v1);
        let target: SparseVec = [(0, qi(2)), (1, qi(5)), (2, qi(6))].into_iter().collect();
        let sol = e.solve(&target).unwrap();
        let mut back = SparseVec::new();
        axpy(&mut back, sol.get(&0).unwrap_or(&Rational::zero()), &v0);
        axpy(&mut back, sol.get(&1).unwrap_or(&Rational::zero()), &v1);
        assert_eq!(back, target);
        let off: SparseVec = [(2, qi(1))].into_iter().collect();
        assert!(e.solve(&off).is_none());
    }
}
