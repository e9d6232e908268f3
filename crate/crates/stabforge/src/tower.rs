//! Local fields Q_p(ζ_{p^α}, ζ_{p^f−1}) as π-polynomials over W_f.
//!
//! An element is Σ_{i<e} c_i π^i with c_i ∈ W_f and π = ζ_{p^α} − 1, stored
//! with a π-adic absolute precision M. Because π^M·O = ⊕ p^⌈(M−i)/e⌉ W_f π^i,
//! the coefficient c_i is canonical modulo p^⌈(M−i)/e⌉.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{gcd, is_prime, phi_prime_power, upow};
use crate::error::{Error, Result};
use crate::padic::{reduce_signed, PadicInt};
use crate::unram::{Unram, WVec};

/// Valuation normalized by v(p) = 1.
pub type RationalValuation = num_rational::Ratio<i64>;

/// Guard digits added to the p-adic working precision.
pub const GUARD_DIGITS: u32 = 2;

/// Coefficients a_0..a_e of the minimal polynomial Q_α of π = ζ_{p^α} − 1.
///
/// For α ≥ 1 this is Σ_{k<p} (X+1)^{p^{α−1}k}; for α = 0 it is X − p, so that
/// the uniformizer of Q_p is p itself.
pub fn q_alpha_coeffs(p: u32, alpha: u32) -> Vec<BigInt> {
    if alpha == 0 {
        return vec![BigInt::from(-(p as i64)), BigInt::one()];
    }
    let step = upow(p as u64, alpha - 1) as usize;
    let e = (p as usize - 1) * step;
    let mut out = vec![BigInt::zero(); e + 1];
    for k in 0..p as usize {
        let n = step * k;
        let mut binom = BigInt::one();
        for (j, slot) in out.iter_mut().enumerate().take(n + 1) {
            *slot += &binom;
            binom = binom * BigInt::from(n - j) / BigInt::from(j + 1);
        }
    }
    out
}

/// Shared context for one field Q_p(ζ_{p^α}, ζ_{p^f−1}).
pub struct FieldTower {
    p: u32,
    f: usize,
    alpha: u32,
    e: usize,
    max_prec: u32,
    q_coeffs: Vec<BigInt>,
    /// a_i mod p^wprec for i ≤ e, non-negative.
    q_mod: Vec<BigUint>,
    unram: Unram,
}

impl fmt::Debug for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldTower {{ p: {}, f: {}, alpha: {}, e: {}, max_prec: {} }}",
            self.p, self.f, self.alpha, self.e, self.max_prec
        )
    }
}

impl FieldTower {
    /// Build the tower supporting π-adic precision up to `max_prec`.
    pub fn new(p: u32, f: usize, alpha: u32, max_prec: u32) -> Result<Arc<FieldTower>> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if f == 0 || max_prec == 0 {
            return Err(Error::InvalidInput("f and precision must be positive".into()));
        }
        let e = phi_prime_power(p as u64, alpha) as usize;
        let wprec = max_prec.div_ceil(e as u32) + GUARD_DIGITS;
        let unram = Unram::new(p, f, wprec);
        let q_coeffs = q_alpha_coeffs(p, alpha);
        let m = unram.modulus(wprec).clone();
        let q_mod = q_coeffs.iter().map(|a| reduce_signed(a, &m)).collect();
        Ok(Arc::new(FieldTower { p, f, alpha, e, max_prec, q_coeffs, q_mod, unram }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// Ramification index φ(p^α).
    pub fn e(&self) -> usize {
        self.e
    }

    pub fn max_prec(&self) -> u32 {
        self.max_prec
    }

    /// Residue field size p^f.
    pub fn q(&self) -> u64 {
        self.unram.q()
    }

    pub fn q_coeffs(&self) -> &[BigInt] {
        &self.q_coeffs
    }

    pub fn unram(&self) -> &Unram {
        &self.unram
    }

    /// p-adic precision of c_i for π-adic precision M.
    pub fn coeff_prec(&self, i: usize, m: u32) -> u32 {
        let m = m as usize;
        if m > i {
            (m - i).div_ceil(self.e) as u32
        } else {
            0
        }
    }

    fn same(&self, other: &FieldTower) -> bool {
        self.p == other.p && self.f == other.f && self.alpha == other.alpha
    }

    /// Residue of ε mod π: −a_0/p.
    fn eps_residue_sign(&self) -> i32 {
        if self.alpha == 0 {
            1
        } else {
            -1
        }
    }
}

/// An element of the ring of integers of a [`FieldTower`].
#[derive(Clone)]
pub struct FieldElem {
    tower: Arc<FieldTower>,
    c: Vec<WVec>,
    prec: u32,
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElem({} mod pi^{})", self, self.prec)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.tower.same(&other.tower) && self.prec == other.prec && self.c == other.c
    }
}

impl Eq for FieldElem {}

impl FieldElem {
    fn canonical(tower: &Arc<FieldTower>, mut c: Vec<WVec>, prec: u32) -> FieldElem {
        for (i, ci) in c.iter_mut().enumerate() {
            let k = tower.coeff_prec(i, prec);
            *ci = tower.unram.reduce(ci, k);
        }
        FieldElem { tower: tower.clone(), c, prec }
    }

    fn cap(tower: &FieldTower, prec: u32) -> u32 {
        prec.min(tower.max_prec)
    }

    pub fn zero(tower: &Arc<FieldTower>, prec: u32) -> FieldElem {
        let prec = Self::cap(tower, prec);
        FieldElem { tower: tower.clone(), c: vec![tower.unram.zero(); tower.e], prec }
    }

    /// Exact elements carry the tower's maximal precision.
    pub fn from_int(tower: &Arc<FieldTower>, z: i64) -> FieldElem {
        Self::from_bigint(tower, &BigInt::from(z))
    }

    pub fn from_bigint(tower: &Arc<FieldTower>, z: &BigInt) -> FieldElem {
        let prec = tower.max_prec;
        let k = tower.coeff_prec(0, prec);
        let mut c = vec![tower.unram.zero(); tower.e];
        c[0] = tower.unram.scalar(&reduce_signed(z, tower.unram.modulus(k)), k);
        Self::canonical(tower, c, prec)
    }

    pub fn one(tower: &Arc<FieldTower>) -> FieldElem {
        Self::from_int(tower, 1)
    }

    /// A p-adic integer known mod p^N, i.e. mod π^(eN).
    pub fn from_padic(tower: &Arc<FieldTower>, x: &PadicInt) -> Result<FieldElem> {
        if x.prime() != tower.p {
            return Err(Error::InvalidInput("prime mismatch".into()));
        }
        let prec = Self::cap(tower, x.precision().saturating_mul(tower.e as u32));
        let mut c = vec![tower.unram.zero(); tower.e];
        c[0][0] = x.value().clone();
        Ok(Self::canonical(tower, c, prec))
    }

    /// An element of W_f embedded at the given precision.
    pub fn from_w(tower: &Arc<FieldTower>, w: &WVec, prec: u32) -> FieldElem {
        let prec = Self::cap(tower, prec);
        let mut c = vec![tower.unram.zero(); tower.e];
        c[0] = w.clone();
        Self::canonical(tower, c, prec)
    }

    /// Element from a signed coefficient grid c[i][j] (π-degree i, β-degree j).
    pub fn from_grid(tower: &Arc<FieldTower>, grid: &[Vec<BigInt>], prec: u32) -> Result<FieldElem> {
        let prec = Self::cap(tower, prec);
        let k = tower.coeff_prec(0, prec).max(1);
        let m = tower.unram.modulus(k).clone();
        let mut acc = FieldElem::zero(tower, prec);
        let pi = FieldElem::pi(tower);
        let mut pw = FieldElem::one(tower);
        for row in grid {
            if row.len() > tower.f {
                return Err(Error::InvalidInput(format!("coefficient vector longer than f = {}", tower.f)));
            }
            let mut w = tower.unram.zero();
            for (j, z) in row.iter().enumerate() {
                w[j] = reduce_signed(z, &m);
            }
            let term = FieldElem::from_w(tower, &w, tower.max_prec).mul(&pw);
            acc = acc.add(&term);
            pw = pw.mul(&pi);
        }
        Ok(acc.with_prec(prec))
    }

    /// The uniformizer π = ζ_{p^α} − 1 (π = p when α = 0).
    pub fn pi(tower: &Arc<FieldTower>) -> FieldElem {
        if tower.e == 1 {
            return Self::from_bigint(tower, &-&tower.q_coeffs[0]);
        }
        let mut c = vec![tower.unram.zero(); tower.e];
        c[1][0] = BigUint::one();
        Self::canonical(tower, c, tower.max_prec)
    }

    /// ζ_{p^α} = 1 + π.
    pub fn zeta(tower: &Arc<FieldTower>) -> FieldElem {
        Self::one(tower).add(&Self::pi(tower))
    }

    /// The unramified generator β.
    pub fn beta(tower: &Arc<FieldTower>) -> FieldElem {
        let mut w = tower.unram.zero();
        if tower.f > 1 {
            w[1] = BigUint::one();
        }
        Self::from_w(tower, &w, tower.max_prec)
    }

    /// Teichmüller lift of a residue class of F_{p^f}.
    pub fn teichmuller(tower: &Arc<FieldTower>, residue: &[u32]) -> FieldElem {
        let k = tower.coeff_prec(0, tower.max_prec);
        let w = tower.unram.teichmuller(residue, k);
        Self::from_w(tower, &w, tower.max_prec)
    }

    /// The Teichmüller generator ω of μ_{p^f−1}.
    pub fn omega(tower: &Arc<FieldTower>) -> FieldElem {
        Self::teichmuller(tower, tower.unram.primitive_residue())
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Coefficient c_i ∈ W_f.
    pub fn coeff(&self, i: usize) -> &WVec {
        &self.c[i]
    }

    pub fn with_prec(&self, prec: u32) -> FieldElem {
        let prec = prec.min(self.prec);
        Self::canonical(&self.tower, self.c.clone(), prec)
    }

    fn check(&self, other: &FieldElem) {
        assert!(self.tower.same(&other.tower), "elements from different towers");
    }

    pub fn add(&self, other: &FieldElem) -> FieldElem {
        self.check(other);
        let prec = self.prec.min(other.prec);
        let k = self.tower.coeff_prec(0, prec);
        let u = &self.tower.unram;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| u.add(a, b, k)).collect();
        Self::canonical(&self.tower, c, prec)
    }

    pub fn sub(&self, other: &FieldElem) -> FieldElem {
        self.check(other);
        let prec = self.prec.min(other.prec);
        let k = self.tower.coeff_prec(0, prec);
        let u = &self.tower.unram;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| u.sub(a, b, k)).collect();
        Self::canonical(&self.tower, c, prec)
    }

    pub fn neg(&self) -> FieldElem {
        let k = self.tower.coeff_prec(0, self.prec);
        let u = &self.tower.unram;
        let c = self.c.iter().map(|a| u.neg(a, k)).collect();
        Self::canonical(&self.tower, c, self.prec)
    }

    pub fn mul(&self, other: &FieldElem) -> FieldElem {
        self.check(other);
        let t = &self.tower;
        let prec = self.prec.min(other.prec);
        let k = t.coeff_prec(0, prec);
        let e = t.e;
        let u = &t.unram;
        if k == 0 {
            return FieldElem::zero(t, prec);
        }
        let mut prod = vec![u.zero(); 2 * e - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.iter().all(Zero::is_zero) {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                if b.iter().all(Zero::is_zero) {
                    continue;
                }
                let ab = u.mul(a, b, k);
                prod[i + j] = u.add(&prod[i + j], &ab, k);
            }
        }
        self_reduce(t, &mut prod, k);
        prod.truncate(e);
        Self::canonical(t, prod, prec)
    }

    pub fn pow(&self, mut n: u64) -> FieldElem {
        let mut acc = FieldElem::one(&self.tower).with_prec(self.prec);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiply by a rational integer.
    pub fn scale(&self, z: i64) -> FieldElem {
        self.mul(&FieldElem::from_int(&self.tower, z))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|w| w.iter().all(Zero::is_zero))
    }

    pub fn is_one(&self) -> bool {
        self.sub(&FieldElem::one(&self.tower)).is_zero()
    }

    /// Equality modulo the smaller of the two precisions.
    pub fn congruent(&self, other: &FieldElem) -> bool {
        self.sub(other).is_zero()
    }

    /// Residue class in F_{p^f}.
    pub fn residue(&self) -> Vec<u32> {
        self.tower.unram.residue(&self.c[0])
    }

    pub fn is_unit(&self) -> bool {
        self.prec >= 1 && self.residue().iter().any(|&x| x != 0)
    }

    /// Inverse of a unit, at the same precision.
    pub fn inv(&self) -> Result<FieldElem> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let t = &self.tower;
        let r0 = t.unram.inv(&t.unram.from_residue(&self.residue()), 1).expect("unit residue");
        let mut y = FieldElem::from_w(t, &r0, 1);
        let mut k = 1u32;
        let two = FieldElem::from_int(t, 2);
        while k < self.prec {
            k = (2 * k).min(self.prec);
            let xk = self.with_prec(k);
            let y_k = FieldElem { tower: t.clone(), c: y.c.clone(), prec: k };
            y = y_k.mul(&two.sub(&xk.mul(&y_k)));
        }
        Ok(y.with_prec(self.prec))
    }

    /// x/π for x ∈ πO; precision drops by one.
    pub fn div_pi(&self) -> Result<FieldElem> {
        let t = &self.tower;
        if self.prec == 0 {
            return Err(Error::IndeterminateAtPrecision);
        }
        if self.residue().iter().any(|&x| x != 0) {
            return Err(Error::InvalidInput("element is not divisible by pi".into()));
        }
        let u = &t.unram;
        let e = t.e;
        let k = t.coeff_prec(0, self.prec);
        let c0 = u.div_p_pow(&u.reduce(&self.c[0], k), 1);
        let mut c: Vec<WVec> = (1..e).map(|i| self.c[i].clone()).collect();
        c.push(u.zero());
        // p/π = (p/a_0)·(−Σ_{i<e} a_{i+1} π^i)
        let sign_pos = t.alpha == 0;
        let kk = k.max(1);
        for (i, ci) in c.iter_mut().enumerate() {
            let term = u.scale(&c0, &t.q_mod[i + 1], kk);
            *ci = if sign_pos { u.add(ci, &term, kk) } else { u.sub(ci, &term, kk) };
        }
        Ok(Self::canonical(t, c, self.prec - 1))
    }

    /// π-adic valuation as an integer, `None` if zero at precision.
    pub fn pi_valuation(&self) -> Option<u32> {
        let t = &self.tower;
        self.c
            .iter()
            .enumerate()
            .filter_map(|(i, w)| t.unram.valuation(w, t.coeff_prec(i, self.prec)).map(|v| v * t.e as u32 + i as u32))
            .min()
    }

    /// Normalized valuation with v(p) = 1.
    pub fn valuation(&self) -> Result<RationalValuation> {
        let v = self.pi_valuation().ok_or(Error::IndeterminateAtPrecision)?;
        Ok(RationalValuation::new(v as i64, self.tower.e as i64))
    }

    /// π-adic valuation V and the residue of x/π^V.
    pub fn leading_term(&self) -> Option<(u32, Vec<u32>)> {
        let t = &self.tower;
        let e = t.e as u32;
        let v = self.pi_valuation()?;
        let (s, i) = (v / e, (v % e) as usize);
        let w = t.unram.div_p_pow(&t.unram.reduce(&self.c[i], s + 1), s);
        let mut r = t.unram.residue(&w);
        if t.eps_residue_sign() < 0 && s % 2 == 1 {
            let p = t.p;
            r.iter_mut().for_each(|x| *x = (p - *x) % p);
        }
        Some((v, r))
    }

    /// Apply the automorphism ζ ↦ ζ^s, β ↦ σ^t(β).
    pub fn galois_act(&self, s: i64, t: usize) -> Result<FieldElem> {
        let tw = &self.tower;
        if tw.alpha > 0 && gcd(s.unsigned_abs(), tw.p as u64) != 1 {
            return Err(Error::InvalidInput(format!("exponent {s} is not prime to p")));
        }
        let u = &tw.unram;
        let k = tw.coeff_prec(0, self.prec);
        if tw.e == 1 {
            let c = vec![u.frob(&self.c[0], t, k)];
            return Ok(Self::canonical(tw, c, self.prec));
        }
        let order = upow(tw.p as u64, tw.alpha) as i64;
        let s = s.rem_euclid(order) as u64;
        let pi_s = FieldElem::zeta(tw).pow(s).sub(&FieldElem::one(tw));
        let mut acc = FieldElem::zero(tw, self.prec);
        for i in (0..tw.e).rev() {
            let ci = FieldElem::from_w(tw, &u.frob(&self.c[i], t, k), self.prec);
            acc = acc.mul(&pi_s).add(&ci);
        }
        Ok(acc.with_prec(self.prec))
    }

    /// Norm over the subgroup of Gal generated by `gens` (pairs (s, t)).
    pub fn norm(&self, gens: &[(i64, usize)]) -> Result<FieldElem> {
        let mut acc = FieldElem::one(&self.tower).with_prec(self.prec);
        for (s, t) in galois_closure(&self.tower, gens)? {
            acc = acc.mul(&self.galois_act(s, t)?);
        }
        Ok(acc)
    }

    /// Trace over the subgroup of Gal generated by `gens`.
    pub fn trace(&self, gens: &[(i64, usize)]) -> Result<FieldElem> {
        let mut acc = FieldElem::zero(&self.tower, self.prec);
        for (s, t) in galois_closure(&self.tower, gens)? {
            acc = acc.add(&self.galois_act(s, t)?);
        }
        Ok(acc)
    }

    /// π-adic digits λ_0..λ_{N−1} with λ_i Teichmüller representatives,
    /// each returned as its residue vector in F_{p^f}.
    pub fn pi_digits(&self, n: u32) -> Result<Vec<Vec<u32>>> {
        if n > self.prec {
            return Err(Error::InsufficientPrecision { needed: n, available: self.prec });
        }
        let t = &self.tower;
        let mut x = self.clone();
        let mut out = Vec::with_capacity(n as usize);
        for _ in 0..n {
            let r = x.residue();
            if r.iter().any(|&d| d != 0) {
                let lam = FieldElem::teichmuller(t, &r);
                x = x.sub(&lam);
            } else {
                x = x.with_prec(x.prec);
            }
            out.push(r);
            if x.prec > 0 {
                x = x.div_pi()?;
            }
        }
        Ok(out)
    }

    /// Σ λ_i π^i from residue digits.
    pub fn from_pi_digits(tower: &Arc<FieldTower>, digits: &[Vec<u32>]) -> FieldElem {
        let pi = FieldElem::pi(tower);
        let mut acc = FieldElem::zero(tower, tower.max_prec);
        for d in digits.iter().rev() {
            acc = acc.mul(&pi);
            if d.iter().any(|&x| x != 0) {
                acc = acc.add(&FieldElem::teichmuller(tower, d));
            }
        }
        acc.with_prec(digits.len() as u32)
    }

    /// Signed integer coefficient grid, entries in (−p^k/2, p^k/2].
    pub fn signed_grid(&self) -> Vec<Vec<BigInt>> {
        let t = &self.tower;
        self.c
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let m = BigInt::from(t.unram.modulus(t.coeff_prec(i, self.prec)).clone());
                w.iter()
                    .map(|x| {
                        let x = BigInt::from(x.clone());
                        if &x * 2 > m {
                            x - &m
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Parse the literal `pi^i * [c0,c1,...] + ...`; a bare `[..]` means i = 0.
    pub fn parse(tower: &Arc<FieldTower>, s: &str, prec: u32) -> Result<FieldElem> {
        let mut grid: Vec<Vec<BigInt>> = Vec::new();
        for term in split_terms(s)? {
            let term = term.trim();
            let (i, coeffs) = if let Some(rest) = term.strip_prefix("pi^") {
                let (exp, tail) = match rest.find('*') {
                    Some(star) => (&rest[..star], Some(rest[star + 1..].trim())),
                    None => (rest, None),
                };
                let i: usize = exp.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in '{term}'")))?;
                let coeffs = match tail {
                    Some(t) => parse_bracket(t)?,
                    None => vec![BigInt::one()],
                };
                (i, coeffs)
            } else if term == "pi" {
                (1, vec![BigInt::one()])
            } else if term.starts_with('[') {
                (0, parse_bracket(term)?)
            } else {
                let z: BigInt = term.parse().map_err(|_| Error::Parse(format!("bad term '{term}'")))?;
                (0, vec![z])
            };
            if grid.len() <= i {
                grid.resize(i + 1, Vec::new());
            }
            let row = &mut grid[i];
            if row.len() < coeffs.len() {
                row.resize(coeffs.len(), BigInt::zero());
            }
            for (r, c) in row.iter_mut().zip(coeffs) {
                *r += c;
            }
        }
        FieldElem::from_grid(tower, &grid, prec)
    }
}

fn split_terms(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if ch == '+' && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(ch);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced brackets in '{s}'")));
    }
    out.push(cur);
    if out.iter().any(|t| t.trim().is_empty()) {
        return Err(Error::Parse(format!("empty term in '{s}'")));
    }
    Ok(out)
}

fn parse_bracket(s: &str) -> Result<Vec<BigInt>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [..], got '{s}'")))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad coefficient '{t}'"))))
        .collect()
}

/// Fold π^d for d ≥ e using π^e = −Σ_{i<e} a_i π^i.
fn self_reduce(t: &FieldTower, prod: &mut [WVec], k: u32) {
    let e = t.e;
    let u = &t.unram;
    for d in (e..prod.len()).rev() {
        let top = std::mem::replace(&mut prod[d], u.zero());
        if top.iter().all(Zero::is_zero) {
            continue;
        }
        for i in 0..e {
            let a = &t.q_mod[i];
            if a.is_zero() {
                continue;
            }
            let term = u.scale(&top, a, k);
            prod[d - e + i] = u.sub(&prod[d - e + i], &term, k);
        }
    }
}

/// All (s, t) in the subgroup generated by `gens`, s taken mod p^α.
pub fn galois_closure(tower: &FieldTower, gens: &[(i64, usize)]) -> Result<Vec<(i64, usize)>> {
    let order = if tower.alpha == 0 { 1 } else { upow(tower.p as u64, tower.alpha) as i64 };
    let norm = |(s, t): (i64, usize)| (s.rem_euclid(order), t % tower.f);
    for &(s, _) in gens {
        if gcd(s.unsigned_abs(), tower.p as u64) != 1 && tower.alpha > 0 {
            return Err(Error::InvalidInput(format!("exponent {s} is not prime to p")));
        }
    }
    let mut elems = vec![norm((1, 0))];
    let mut i = 0;
    while i < elems.len() {
        let (s, t) = elems[i];
        for &(gs, gt) in gens {
            let next = norm(((s as i128 * gs as i128).rem_euclid(order as i128) as i64, t + gt));
            if !elems.contains(&next) {
                elems.push(next);
            }
        }
        i += 1;
        if elems.len() > tower.e * tower.f {
            return Err(Error::InvalidInput("generators exceed the Galois group".into()));
        }
    }
    Ok(elems)
}

/// ε_α = π^e/p at π-adic precision `prec`, by exact division of Q_α's coefficients.
pub fn epsilon_alpha(tower: &Arc<FieldTower>, prec: u32) -> Result<FieldElem> {
    if prec > tower.max_prec {
        return Err(Error::InsufficientPrecision { needed: prec, available: tower.max_prec });
    }
    let p = BigInt::from(tower.p);
    let grid: Vec<Vec<BigInt>> = tower.q_coeffs[..tower.e]
        .iter()
        .map(|a| {
            let (q, r) = a.div_rem(&p);
            debug_assert!(r.is_zero());
            vec![-q]
        })
        .collect();
    FieldElem::from_grid(tower, &grid, prec)
}

/// The change-of-rings map i_α: level α → level α+1, π_α ↦ (1+π_{α+1})^p − 1.
pub fn change_rings(x: &FieldElem, target: &Arc<FieldTower>) -> Result<FieldElem> {
    let src = x.tower();
    if target.p != src.p || target.f != src.f || target.alpha != src.alpha + 1 {
        return Err(Error::InvalidInput("target must be the next cyclotomic level".into()));
    }
    let p = src.p;
    let (image, ratio) = if src.alpha == 0 {
        (FieldElem::from_int(target, p as i64), p - 1)
    } else {
        (FieldElem::zeta(target).pow(p as u64).sub(&FieldElem::one(target)), p)
    };
    let prec = x.prec().saturating_mul(ratio).min(target.max_prec);
    let mut acc = FieldElem::zero(target, prec);
    for i in (0..src.e).rev() {
        let ci = FieldElem::from_w(target, &x.c[i], prec);
        acc = acc.mul(&image).add(&ci);
    }
    Ok(acc.with_prec(prec))
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, w) in self.signed_grid().iter().enumerate() {
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            let body: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            terms.push(format!("pi^{} * [{}]", i, body.join(",")));
        }
        if terms.is_empty() {
            write!(f, "[0]")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

/// Signed view of F_p digits: p − 1 ↦ −1 for p odd.
pub fn signed_digit(d: u32, p: u32) -> i64 {
    if p > 2 && d == p - 1 {
        -1
    } else {
        d as i64
    }
}

/// Interpret a small element's residue as an integer when f = 1.
pub fn residue_scalar(r: &[u32]) -> u32 {
    r.first().copied().unwrap_or(0)
}
