//! Tate cohomology of a finite cyclic group C_r = ⟨t⟩ acting on a finitely
//! generated abelian group M = Z^a ⊕ Z/d_1 ⊕ … ⊕ Z/d_b.
//!
//! With N = Σ_{i<r} t^i: H^0 = ker(1−t), H^odd = ker N / im(1−t) and
//! H^even = ker(1−t) / im N. Subquotients are computed with Smith normal
//! forms over Z on lattices in Z^(a+b) containing the relation lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged matrix".into()));
        }
        let data = rows.iter().flatten().map(|&x| BigInt::from(x)).collect();
        Ok(Matrix { rows: r, cols: c, data })
    }

    /// Matrix whose columns are the given vectors (all of length `rows`).
    pub fn from_columns(rows: usize, cols: &[Vec<BigInt>]) -> Matrix {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for i in 0..rows {
                m[(i, j)] = c[i].clone();
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

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum()).collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { data, ..*self }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { data, ..*self }
    }

    /// [self | other].
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += c·row[src]
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * c;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += c·col[src]
    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * c;
            self[(i, dst)] += v;
        }
    }

    fn neg_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Smith normal form U·A·V = D with U, V unimodular and the nonzero diagonal
/// entries d_1 | d_2 | … positive.
#[derive(Debug, Clone)]
pub struct Smith {
    pub d: Matrix,
    pub u: Matrix,
    pub v: Matrix,
    pub rank: usize,
}

impl Smith {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }
}

/// Elimination with the pivot chosen by minimal absolute value.
pub fn smith(a: &Matrix) -> Smith {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // Pivot: nonzero entry of least absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !d[(i, j)].is_zero() && best.is_none_or(|(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // Divisibility of the trailing block by the pivot.
                let bad = (t + 1..m)
                    .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                    .find(|&(i, j)| !d[(i, j)].is_multiple_of(&d[(t, t)]));
                match bad {
                    None => break,
                    Some((i, _)) => {
                        let one = BigInt::one();
                        d.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                        continue;
                    }
                }
            }
            // Move the smallest remaining entry of row/column t to the pivot.
            let mut best = (t, t);
            for i in t..m {
                if !d[(i, t)].is_zero() && d[(i, t)].abs() < d[best].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if !d[(t, j)].is_zero() && d[(t, j)].abs() < d[best].abs() {
                    best = (t, j);
                }
            }
            d.swap_rows(t, best.0);
            u.swap_rows(t, best.0);
            d.swap_cols(t, best.1);
            v.swap_cols(t, best.1);
        }
        if d[(t, t)].is_negative() {
            d.neg_row(t);
            u.neg_row(t);
        }
        t += 1;
    }
    Smith { d, u, v, rank: t }
}

/// Integer kernel basis of A (as columns).
pub fn kernel_basis(a: &Matrix) -> Vec<Vec<BigInt>> {
    let s = smith(a);
    (s.rank..a.cols).map(|j| s.v.column(j)).collect()
}

/// Lattice basis (columns) of the span of the given generators in Z^k.
pub fn lattice_basis(k: usize, gens: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    if gens.is_empty() {
        return Vec::new();
    }
    // Columns of A·V beyond the rank vanish; the first `rank` columns of
    // U^{-1}·D span the same lattice, read off as A·V.
    let a = Matrix::from_columns(k, gens);
    let s = smith(&a);
    let av = a.mul(&s.v);
    (0..s.rank).map(|j| av.column(j)).collect()
}

/// A finite abelian group ⊕ Z/d_i (d_i | d_{i+1}, all > 1) plus a free rank.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyGroup {
    pub free_rank: usize,
    #[serde(serialize_with = "serialize_ints")]
    pub factors: Vec<BigInt>,
}

fn serialize_ints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match x.to_u64() {
            Some(n) => seq.serialize_element(&n)?,
            None => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

impl CohomologyGroup {
    pub fn trivial() -> CohomologyGroup {
        CohomologyGroup { free_rank: 0, factors: Vec::new() }
    }

    /// Canonical form of Z^rank ⊕ ⊕ Z/c_i for arbitrary cyclic orders c_i.
    pub fn from_cyclic(free_rank: usize, orders: &[u64]) -> CohomologyGroup {
        let n = orders.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &c) in orders.iter().enumerate() {
            m[(i, i)] = BigInt::from(c);
        }
        let factors = smith(&m).diagonal().into_iter().filter(|d| !d.is_one()).collect();
        CohomologyGroup { free_rank, factors }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.factors.is_empty()
    }

    /// Order of the torsion part.
    pub fn torsion_order(&self) -> BigInt {
        self.factors.iter().product()
    }
}

impl std::fmt::Display for CohomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.factors.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A finitely generated Z[C_r]-module presented by generators and an action.
#[derive(Debug, Clone)]
pub struct CycModule {
    free_rank: usize,
    torsion: Vec<BigInt>,
    /// Column j is t applied to generator j.
    action: Matrix,
    order: u64,
}

impl CycModule {
    /// Validates that t respects the torsion relations and that t^r = 1.
    pub fn new(free_rank: usize, torsion: &[u64], action: Matrix, order: u64) -> Result<CycModule> {
        let k = free_rank + torsion.len();
        if action.rows() != k || action.cols() != k {
            return Err(Error::InvalidInput(format!(
                "action must be {k}x{k}, got {}x{}",
                action.rows(),
                action.cols()
            )));
        }
        if order == 0 {
            return Err(Error::InvalidInput("group order must be positive".into()));
        }
        if torsion.contains(&0) {
            return Err(Error::InvalidInput("torsion orders must be positive".into()));
        }
        let m = CycModule { free_rank, torsion: torsion.iter().map(|&d| BigInt::from(d)).collect(), action, order };
        for (j, d) in m.torsion.iter().enumerate() {
            let col: Vec<BigInt> = m.action.column(free_rank + j).iter().map(|x| x * d).collect();
            if !m.is_zero_vec(&col) {
                return Err(Error::BadAction(format!(
                    "image of torsion generator {} does not have order dividing {d}",
                    free_rank + j
                )));
            }
        }
        let tr = m.power(order);
        let id = Matrix::identity(k);
        for j in 0..k {
            let diff: Vec<BigInt> = tr.column(j).iter().zip(id.column(j)).map(|(a, b)| a - b).collect();
            if !m.is_zero_vec(&diff) {
                return Err(Error::BadAction(format!("t^{order} is not the identity")));
            }
        }
        Ok(m)
    }

    /// The trivial action of C_r.
    pub fn trivial(free_rank: usize, torsion: &[u64], order: u64) -> Result<CycModule> {
        CycModule::new(free_rank, torsion, Matrix::identity(free_rank + torsion.len()), order)
    }

    /// A diagonal action t(e_j) = c_j·e_j.
    pub fn diagonal(free_rank: usize, torsion: &[u64], scalars: &[i64], order: u64) -> Result<CycModule> {
        let k = free_rank + torsion.len();
        if scalars.len() != k {
            return Err(Error::InvalidInput(format!("expected {k} scalars")));
        }
        let mut t = Matrix::zeros(k, k);
        for (i, &c) in scalars.iter().enumerate() {
            t[(i, i)] = BigInt::from(c);
        }
        CycModule::new(free_rank, torsion, t, order)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn action(&self) -> &Matrix {
        &self.action
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn generators(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    fn is_zero_vec(&self, v: &[BigInt]) -> bool {
        v[..self.free_rank].iter().all(Zero::is_zero)
            && v[self.free_rank..].iter().zip(&self.torsion).all(|(x, d)| x.is_multiple_of(d))
    }

    /// t^e with entries reduced modulo the torsion orders.
    pub fn power(&self, e: u64) -> Matrix {
        let k = self.generators();
        let mut acc = Matrix::identity(k);
        let mut base = self.action.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.reduce(&acc.mul(&base));
            }
            base = self.reduce(&base.mul(&base));
            e >>= 1;
        }
        acc
    }

    fn reduce(&self, m: &Matrix) -> Matrix {
        let mut m = m.clone();
        for (j, d) in self.torsion.iter().enumerate() {
            let i = self.free_rank + j;
            for c in 0..m.cols() {
                m[(i, c)] = m[(i, c)].mod_floor(d);
            }
        }
        m
    }

    /// 1 − t.
    pub fn one_minus_t(&self) -> Matrix {
        Matrix::identity(self.generators()).sub(&self.action)
    }

    /// N = Σ_{i<r} t^i.
    pub fn norm(&self) -> Matrix {
        let k = self.generators();
        let mut acc = Matrix::zeros(k, k);
        let mut pw = Matrix::identity(k);
        for _ in 0..self.order {
            acc = self.reduce(&acc.add(&pw));
            pw = self.reduce(&pw.mul(&self.action));
        }
        acc
    }

    fn relations(&self) -> Vec<Vec<BigInt>> {
        let k = self.generators();
        self.torsion
            .iter()
            .enumerate()
            .map(|(j, d)| {
                let mut v = vec![BigInt::zero(); k];
                v[self.free_rank + j] = d.clone();
                v
            })
            .collect()
    }

    /// Preimage lattice {x ∈ Z^k : A x ∈ relations}.
    fn kernel_lattice(&self, a: &Matrix) -> Vec<Vec<BigInt>> {
        let k = self.generators();
        let rel = self.relations();
        let r = Matrix::from_columns(k, &rel);
        let big = a.hcat(&r);
        let gens: Vec<Vec<BigInt>> = kernel_basis(&big).into_iter().map(|v| v[..k].to_vec()).collect();
        let mut all = gens;
        all.extend(rel);
        lattice_basis(k, &all)
    }

    /// A·Z^k + relations.
    fn image_lattice(&self, a: &Matrix) -> Vec<Vec<BigInt>> {
        let k = self.generators();
        let mut gens = a.columns();
        gens.extend(self.relations());
        lattice_basis(k, &gens)
    }

    /// ker(g) / im(f) for endomorphisms with g∘f = 0.
    pub fn homology(&self, f: &Matrix, g: &Matrix) -> Result<CohomologyGroup> {
        let gf = g.mul(f);
        for j in 0..gf.cols() {
            if !self.is_zero_vec(&gf.column(j)) {
                return Err(Error::BadAction("composite of the differentials is nonzero".into()));
            }
        }
        Ok(subquotient(self.generators(), &self.kernel_lattice(g), &self.image_lattice(f)))
    }

    pub fn h0(&self) -> CohomologyGroup {
        let k = self.generators();
        subquotient(k, &self.kernel_lattice(&self.one_minus_t()), &lattice_basis(k, &self.relations()))
    }

    pub fn h_odd(&self) -> CohomologyGroup {
        self.homology(&self.one_minus_t(), &self.norm()).expect("N(1−t) = 0")
    }

    pub fn h_even(&self) -> CohomologyGroup {
        self.homology(&self.norm(), &self.one_minus_t()).expect("(1−t)N = 0")
    }

    /// The underlying group M itself.
    pub fn underlying(&self) -> CohomologyGroup {
        let k = self.generators();
        subquotient(k, &lattice_basis(k, &Matrix::identity(k).columns()), &lattice_basis(k, &self.relations()))
    }
}

/// L1/L2 for lattices L2 ⊆ L1 in Z^k given by bases.
fn subquotient(k: usize, l1: &[Vec<BigInt>], l2: &[Vec<BigInt>]) -> CohomologyGroup {
    let r1 = l1.len();
    if r1 == 0 {
        return CohomologyGroup::trivial();
    }
    let b1 = Matrix::from_columns(k, l1);
    let s = smith(&b1);
    // Coordinates c with B1·c = v: c = V·D^{-1}·U·v.
    let coords: Vec<Vec<BigInt>> = l2
        .iter()
        .map(|v| {
            let uv = s.u.apply(v);
            let y: Vec<BigInt> = (0..r1)
                .map(|i| {
                    let (q, rem) = uv[i].div_rem(&s.d[(i, i)]);
                    debug_assert!(rem.is_zero(), "lattice not contained");
                    q
                })
                .collect();
            s.v.apply(&y)
        })
        .collect();
    if coords.is_empty() {
        return CohomologyGroup { free_rank: r1, factors: Vec::new() };
    }
    let c = Matrix::from_columns(r1, &coords);
    let sc = smith(&c);
    let factors = sc.diagonal().into_iter().filter(|d| !d.is_one()).collect();
    CohomologyGroup { free_rank: r1 - sc.rank, factors }
}

/// H^0, H^odd and H^even together.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CohomologyReport {
    pub h0: CohomologyGroup,
    pub h_odd: CohomologyGroup,
    pub h_even: CohomologyGroup,
}

pub fn cohomology(m: &CycModule) -> CohomologyReport {
    CohomologyReport { h0: m.h0(), h_odd: m.h_odd(), h_even: m.h_even() }
}

/// One transcribed module with its stated cohomology.
#[derive(Debug, Clone, Serialize)]
pub struct GoldenCase {
    pub name: String,
    pub parameters: String,
    pub expected: CohomologyReport,
    pub computed: CohomologyReport,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldenReport {
    pub cases: Vec<GoldenCase>,
    pub all_match: bool,
}

struct Instance {
    name: &'static str,
    parameters: String,
    module: CycModule,
    expected: CohomologyReport,
}

fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

fn expect(h0: (usize, &[u64]), odd: &[u64], even: &[u64]) -> CohomologyReport {
    CohomologyReport {
        h0: CohomologyGroup::from_cyclic(h0.0, h0.1),
        h_odd: CohomologyGroup::from_cyclic(0, odd),
        h_even: CohomologyGroup::from_cyclic(0, even),
    }
}

fn instances() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    // ⟨pu⟩ × C_{p^f−1} with Frobenius ζ ↦ ζ^p, r a multiple of f with
    // r/f a power of p.
    for (p, f, r) in [(3u64, 2u64, 2u64), (3, 3, 3), (5, 2, 2), (7, 2, 2), (3, 4, 4), (2, 3, 3), (3, 3, 9), (5, 1, 5)] {
        let m = p.pow(f as u32) - 1;
        let pm = gcd(p - 1, m);
        out.push(Instance {
            name: "frobenius_on_teichmuller_units",
            parameters: format!("p={p} f={f} r={r}"),
            module: CycModule::diagonal(1, &[m], &[1, p as i64], r)?,
            expected: expect((1, &[pm]), &[], &[r]),
        });
    }
    // C_{p^f−1} and Z⟨x_1⟩ with trivial action of C_{p−1}.
    for (p, f) in [(3u64, 2u64), (5, 2), (7, 1), (5, 1), (7, 2)] {
        let m = p.pow(f as u32) - 1;
        let r = p - 1;
        out.push(Instance {
            name: "trivial_action_on_teichmuller_units",
            parameters: format!("p={p} f={f} r={r}"),
            module: CycModule::trivial(0, &[m], r)?,
            expected: expect((0, &[m]), &[gcd(m, r)], &[gcd(m, r)]),
        });
        out.push(Instance {
            name: "trivial_action_on_uniformizer_lattice",
            parameters: format!("p={p} r={r}"),
            module: CycModule::trivial(1, &[], r)?,
            expected: expect((1, &[]), &[], &[r]),
        });
    }
    // ⟨pu⟩ × C_{p^f−1} with trivial action of C_{p^{α−1}}.
    for (p, alpha, f) in [(3u64, 2u32, 2u32), (3, 3, 1), (5, 2, 1), (3, 2, 1), (7, 2, 1)] {
        let m = p.pow(f) - 1;
        let r = p.pow(alpha - 1);
        out.push(Instance {
            name: "trivial_p_group_action",
            parameters: format!("p={p} alpha={alpha} f={f}"),
            module: CycModule::trivial(1, &[m], r)?,
            expected: expect((1, &[m]), &[], &[r]),
        });
    }
    // p = 2: ⟨2u⟩ × C_{2^α} × C_{2^n−1}, Frobenius on the last factor, r = n.
    for (alpha, n) in [(1u32, 3u64), (1, 2), (0, 4), (2, 4), (2, 3), (3, 6), (2, 5), (4, 4)] {
        let m = 2u64.pow(n as u32) - 1;
        let a = 2u64.pow(alpha);
        let g = gcd(a, n);
        out.push(Instance {
            name: "p2_frobenius_with_rational_torsion",
            parameters: format!("alpha={alpha} n={n}"),
            module: CycModule::diagonal(1, &[a, m], &[1, 1, 2], n)?,
            expected: expect((1, &[a]), &[g], &[n, g]),
        });
    }
    // p = 2: ζ ↦ ζ^5 on C_{2^α}, r = 2^{α−2}.
    for (alpha, f) in [(3u32, 1u32), (3, 3), (4, 1), (4, 2), (5, 3)] {
        let a = 2u64.pow(alpha);
        let m = 2u64.pow(f) - 1;
        let r = 2u64.pow(alpha - 2);
        out.push(Instance {
            name: "p2_cyclotomic_five_action",
            parameters: format!("alpha={alpha} f={f}"),
            module: CycModule::diagonal(1, &[a, m], &[1, 5, 1], r)?,
            expected: expect((1, &[4, m]), &[], &[r]),
        });
    }
    // p = 2: ζ ↦ ζ^{-1} on C_{2^α}, r = 2, x_1 rational.
    for (alpha, f) in [(2u32, 3u32), (3, 1), (4, 5), (2, 1)] {
        let a = 2u64.pow(alpha);
        let m = 2u64.pow(f) - 1;
        out.push(Instance {
            name: "p2_inversion_rational_uniformizer",
            parameters: format!("alpha={alpha} f={f}"),
            module: CycModule::diagonal(1, &[a, m], &[1, -1, 1], 2)?,
            expected: expect((1, &[2, m]), &[2], &[2, 2]),
        });
    }
    // p = 2, α = 2: x_1 ↦ −i·x_1 mixes the uniformizer with C_4.
    out.push(Instance {
        name: "p2_inversion_twisted_uniformizer",
        parameters: "alpha=2".into(),
        module: CycModule::new(1, &[4], Matrix::from_rows(&[vec![1, 0], vec![1, -1]])?, 2)?,
        expected: expect((1, &[2]), &[], &[2]),
    });
    Ok(out)
}

/// Evaluate every transcribed module and compare with its stated cohomology.
pub fn golden_suite() -> GoldenReport {
    let cases: Vec<GoldenCase> = instances()
        .expect("transcribed modules are valid")
        .into_par_iter()
        .map(|inst| {
            let computed = cohomology(&inst.module);
            let matches = computed == inst.expected;
            GoldenCase {
                name: inst.name.to_string(),
                parameters: inst.parameters,
                expected: inst.expected,
                computed,
                matches,
            }
        })
        .collect();
    let all_match = cases.iter().all(|c| c.matches);
    GoldenReport { cases, all_match }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn smith_example() {
        let a = Matrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]).unwrap();
        let s = smith(&a);
        assert_eq!(s.diagonal(), ints(&[2, 6, 12]));
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn trivial_action_on_cyclic() {
        let m = CycModule::trivial(0, &[12], 8).unwrap();
        assert_eq!(m.h_even(), CohomologyGroup::from_cyclic(0, &[4]));
        assert_eq!(m.h_odd(), CohomologyGroup::from_cyclic(0, &[4]));
    }

    #[test]
    fn bad_actions() {
        let t = Matrix::from_rows(&[vec![2]]).unwrap();
        assert!(matches!(CycModule::new(0, &[7], t, 2), Err(Error::BadAction(_))));
        let t = Matrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        assert!(matches!(CycModule::new(0, &[4, 3], t, 12), Err(Error::BadAction(_))));
    }

    #[test]
    fn golden() {
        let r = golden_suite();
        for c in &r.cases {
            assert!(c.matches, "{} {}: {:?}", c.name, c.parameters, c.computed);
        }
    }
}
