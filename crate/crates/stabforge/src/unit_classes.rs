//! Finite quotients U_1/U_N of principal unit groups and power-class tests.
//!
//! Subgroups of U_1/U_N are stored as an echelon over the graded pieces
//! U_i/U_{i+1} ≅ F_{p^f}: one generator per occupied (level, pivot) pair,
//! reduced so that within a level the residue vectors form a reduced row
//! echelon basis. Membership is decided by sifting level by level.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, gcd, is_prime, mult_order, phi_prime_power, upow, vp};
use crate::error::{Error, Result};
use crate::tower::{epsilon_alpha, FieldElem, FieldTower};

/// Largest residue degree accepted by the decision procedures.
pub const MAX_RESIDUE_DEGREE: usize = 6;
/// Largest ramification index accepted by the decision procedures.
pub const MAX_RAMIFICATION: usize = 128;

/// The quotient U_1/U_N of a tower's principal units.
#[derive(Debug, Clone)]
pub struct FiltrationQuotient {
    tower: Arc<FieldTower>,
    depth: u32,
}

impl FiltrationQuotient {
    pub fn new(tower: &Arc<FieldTower>, depth: u32) -> Result<FiltrationQuotient> {
        if depth < 2 {
            return Err(Error::DepthTooSmall { needed: 2, given: depth });
        }
        if depth > tower.max_prec() {
            return Err(Error::InsufficientPrecision { needed: depth, available: tower.max_prec() });
        }
        Ok(FiltrationQuotient { tower: tower.clone(), depth })
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Dimension f of each graded piece over F_p.
    pub fn residue_dim(&self) -> usize {
        self.tower.f()
    }

    /// log_p |U_1/U_N|.
    pub fn log_order(&self) -> usize {
        self.tower.f() * (self.depth as usize - 1)
    }

    /// The element 1 + β^j π^i.
    pub fn level_generator(&self, level: u32, j: usize) -> FieldElem {
        let t = &self.tower;
        let mut w = t.unram().zero();
        w[j] = BigUint::one();
        let pi_i = FieldElem::pi(t).pow(level as u64);
        FieldElem::one(t).add(&FieldElem::from_w(t, &w, t.max_prec()).mul(&pi_i)).with_prec(self.depth)
    }

    /// All 1 + β^j π^i with 1 ≤ i < N and j < f, in (level, j) order.
    pub fn level_generators(&self) -> Vec<FieldElem> {
        (1..self.depth)
            .flat_map(|i| (0..self.tower.f()).map(move |j| (i, j)))
            .map(|(i, j)| self.level_generator(i, j))
            .collect()
    }

    /// The principal part x/ω(x̄) of a unit, reduced to depth N.
    pub fn principal_part(&self, x: &FieldElem) -> Result<FieldElem> {
        if x.prec() < self.depth {
            return Err(Error::InsufficientPrecision { needed: self.depth, available: x.prec() });
        }
        if !x.is_unit() {
            return Err(Error::NonUnit);
        }
        let x = x.with_prec(self.depth);
        let r = x.residue();
        if is_one_residue(&r) {
            return Ok(x);
        }
        let t = FieldElem::teichmuller(&self.tower, &r).with_prec(self.depth);
        Ok(x.mul(&t.inv()?))
    }

    /// Level and residue vector of x − 1, or `None` when x ≡ 1 mod π^N.
    pub fn leading(&self, x: &FieldElem) -> Option<(u32, Vec<u32>)> {
        let d = x.sub(&FieldElem::one(&self.tower)).with_prec(self.depth);
        d.leading_term()
    }
}

fn is_one_residue(r: &[u32]) -> bool {
    r.first() == Some(&1) && r[1..].iter().all(|&x| x == 0)
}

#[derive(Debug, Clone)]
struct Pivot {
    pivot: usize,
    vec: Vec<u32>,
    gen: FieldElem,
    inv: FieldElem,
}

/// A subgroup of U_1/U_N in echelon form.
#[derive(Debug, Clone)]
pub struct SubgroupEchelon {
    quotient: FiltrationQuotient,
    levels: BTreeMap<u32, Vec<Pivot>>,
}

impl SubgroupEchelon {
    /// The trivial subgroup.
    pub fn trivial(quotient: &FiltrationQuotient) -> SubgroupEchelon {
        SubgroupEchelon { quotient: quotient.clone(), levels: BTreeMap::new() }
    }

    /// Closure of the subgroup generated by `gens` (each ≡ 1 mod π).
    pub fn from_generators(quotient: &FiltrationQuotient, gens: Vec<FieldElem>) -> Result<Self> {
        let mut span = SubgroupEchelon::trivial(quotient);
        span.extend(gens)?;
        Ok(span)
    }

    pub fn quotient(&self) -> &FiltrationQuotient {
        &self.quotient
    }

    /// Occupied (level, pivot) pairs in increasing order.
    pub fn pivots(&self) -> Vec<(u32, usize)> {
        self.levels.iter().flat_map(|(&l, ps)| ps.iter().map(move |p| (l, p.pivot))).collect()
    }

    /// Stored generators in (level, pivot) order.
    pub fn generators(&self) -> Vec<FieldElem> {
        self.levels.values().flat_map(|ps| ps.iter().map(|p| p.gen.clone())).collect()
    }

    /// log_p of the subgroup order.
    pub fn log_order(&self) -> usize {
        self.levels.values().map(Vec::len).sum()
    }

    /// Add generators and restore closure under p-th powers.
    pub fn extend(&mut self, gens: Vec<FieldElem>) -> Result<()> {
        let depth = self.quotient.depth;
        let mut queue: VecDeque<FieldElem> = VecDeque::new();
        for g in gens {
            if g.prec() < depth {
                return Err(Error::InsufficientPrecision { needed: depth, available: g.prec() });
            }
            if !is_one_residue(&g.residue()) {
                return Err(Error::InvalidInput("generator is not a principal unit".into()));
            }
            queue.push_back(g.with_prec(depth));
        }
        loop {
            while let Some(g) = queue.pop_front() {
                if let Some(next) = self.insert(g)? {
                    queue.push_back(next);
                }
            }
            let p = self.quotient.tower.p() as u64;
            for g in self.generators() {
                let gp = g.pow(p);
                if self.quotient.leading(&self.sift(gp.clone())?).is_some() {
                    queue.push_back(gp);
                }
            }
            if queue.is_empty() {
                return Ok(());
            }
        }
    }

    /// Divide out stored generators level by level; returns the residual.
    fn sift(&self, mut x: FieldElem) -> Result<FieldElem> {
        loop {
            let Some((lvl, vec)) = self.quotient.leading(&x) else {
                return Ok(x);
            };
            let Some(ps) = self.levels.get(&lvl) else {
                return Ok(x);
            };
            for pv in ps {
                let c = vec[pv.pivot];
                if c != 0 {
                    x = x.mul(&pv.inv.pow(c as u64));
                }
            }
            match self.quotient.leading(&x) {
                Some((l2, _)) if l2 == lvl => return Ok(x),
                None => return Ok(x),
                _ => {}
            }
        }
    }

    /// Sift `g`; store a new pivot if it survives and return its p-th power.
    fn insert(&mut self, g: FieldElem) -> Result<Option<FieldElem>> {
        let p = self.quotient.tower.p();
        let h = self.sift(g)?;
        let Some((lvl, vec)) = self.quotient.leading(&h) else {
            return Ok(None);
        };
        let j = vec.iter().position(|&c| c != 0).expect("nonzero leading residue");
        let cinv = inv_mod(vec[j], p);
        let h = h.pow(cinv as u64);
        let vec: Vec<u32> = vec.iter().map(|&c| (c * cinv) % p).collect();
        let hinv = h.inv()?;
        let entry = self.levels.entry(lvl).or_default();
        for old in entry.iter_mut() {
            let c = old.vec[j];
            if c != 0 {
                old.gen = old.gen.mul(&hinv.pow(c as u64));
                old.inv = old.inv.mul(&h.pow(c as u64));
                for (o, &n) in old.vec.iter_mut().zip(&vec) {
                    *o = (*o + (p - c) * n) % p;
                }
            }
        }
        let next = h.pow(p as u64);
        let pos = entry.partition_point(|q| q.pivot < j);
        entry.insert(pos, Pivot { pivot: j, vec, gen: h, inv: hinv });
        Ok(Some(next))
    }

    /// Whether the principal part of `x` lies in the subgroup.
    pub fn contains(&self, x: &FieldElem) -> Result<bool> {
        let x1 = self.quotient.principal_part(x)?;
        Ok(self.quotient.leading(&self.sift(x1)?).is_none())
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|&b| (a as u64 * b as u64) % p as u64 == 1).expect("invertible residue")
}

/// Smallest N with U_N ⊆ U_1^{p^a}: ⌊e/(p−1)⌋ + 1 + a·e.
pub fn closing_depth(tower: &FieldTower, a: u32) -> u32 {
    let e = tower.e() as u32;
    e / (tower.p() - 1) + 1 + a * e
}

/// Default depth for ⟨μ∩U_1, U_1^k⟩ and U_1^k: one level past [`closing_depth`].
///
/// For p odd and k = p this is p^α + 2. For p = 2 and k = 4 it is
/// 3·2^(α−1) + 2; exhaustive level checks show that the root of unity does
/// not lower the closing depth below 3·2^(α−1) + 1.
pub fn required_depth(tower: &FieldTower, k: u64) -> u32 {
    depth_for(tower.p(), tower.alpha(), k)
}

fn depth_for(p: u32, alpha: u32, k: u64) -> u32 {
    let a = if k == 0 { 0 } else { vp(k, p as u64) };
    let e = phi_prime_power(p as u64, alpha) as u32;
    e / (p - 1) + 2 + a * e
}

/// ⟨μ∩U_1, U_1^k⟩ (μ-part optional) inside U_1/U_N; only the p-part of k matters.
pub fn subgroup_span(quotient: &FiltrationQuotient, k: u64, include_mu: bool) -> Result<SubgroupEchelon> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let t = quotient.tower();
    let needed = required_depth(t, k);
    if quotient.depth < needed {
        return Err(Error::DepthTooSmall { needed, given: quotient.depth });
    }
    let kp = upow(t.p() as u64, vp(k, t.p() as u64));
    let mut gens: Vec<FieldElem> = quotient.level_generators().into_par_iter().map(|g| g.pow(kp)).collect();
    if include_mu {
        gens.insert(0, FieldElem::zeta(t).with_prec(quotient.depth));
    }
    SubgroupEchelon::from_generators(quotient, gens)
}

/// Whether the class of the unit `x` lies in `span`.
pub fn membership(x: &FieldElem, span: &SubgroupEchelon) -> Result<bool> {
    span.contains(x)
}

/// Whether U_N ⊆ ⟨μ∩U_1, U_1^k⟩ holds, checked inside U_1/U_M at the safe depth M.
pub fn closes_at(tower: &Arc<FieldTower>, k: u64, include_mu: bool, n: u32) -> Result<bool> {
    let a = vp(k, tower.p() as u64);
    let m = closing_depth(tower, a) + 1;
    if n >= m {
        return Ok(true);
    }
    let q = FiltrationQuotient::new(tower, m)?;
    let kp = upow(tower.p() as u64, a);
    let mut gens: Vec<FieldElem> = q.level_generators().into_iter().map(|g| g.pow(kp)).collect();
    if include_mu {
        gens.push(FieldElem::zeta(tower).with_prec(m));
    }
    let span = SubgroupEchelon::from_generators(&q, gens)?;
    for i in n..m {
        for j in 0..tower.f() {
            if !span.contains(&q.level_generator(i, j))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Parameters F_0 = C_{p^α} × C_d inside D_n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StabilizerParams {
    pub p: u32,
    pub n: u32,
    pub alpha: u32,
    pub d: u64,
    pub u: i64,
}

impl StabilizerParams {
    pub fn validate(&self) -> Result<()> {
        let p = self.p as u64;
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{} is not prime", self.p)));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be positive".into()));
        }
        let phi = phi_prime_power(p, self.alpha);
        if !(self.n as u64).is_multiple_of(phi) {
            return Err(Error::InvalidInput(format!("phi(p^alpha) = {phi} does not divide n = {}", self.n)));
        }
        if self.d == 0 || self.d.is_multiple_of(p) {
            return Err(Error::InvalidInput("d must be positive and prime to p".into()));
        }
        let n_alpha = self.n as u64 / phi;
        if crate::arith::pow_mod(p, n_alpha, self.d) != 1 % self.d {
            return Err(Error::InvalidInput(format!(
                "d = {} does not divide p^n_alpha - 1 (n_alpha = {n_alpha})",
                self.d
            )));
        }
        if self.u.unsigned_abs().is_multiple_of(p) {
            return Err(Error::InvalidInput("u must be a p-adic unit".into()));
        }
        Ok(())
    }

    /// n_α = n/φ(p^α).
    pub fn n_alpha(&self) -> u32 {
        self.n / phi_prime_power(self.p as u64, self.alpha) as u32
    }

    /// Ramification index φ(p^α) of Q_p(F_0).
    pub fn ramification(&self) -> u64 {
        phi_prime_power(self.p as u64, self.alpha)
    }

    /// Residue degree of Q_p(F_0): the order of p modulo d.
    pub fn residue_degree(&self) -> u32 {
        mult_order(self.p as u64 % self.d.max(1), self.d) as u32
    }

    /// [Q_p(F_0) : Q_p].
    pub fn field_degree(&self) -> u64 {
        self.ramification() * self.residue_degree() as u64
    }

    /// Whether F_0 is the full root-of-unity group of Q_p(F_0).
    pub fn is_mu_maximal(&self) -> bool {
        let q = (self.p as u128).pow(self.residue_degree());
        self.d as u128 == q - 1
    }

    fn u_mod8(&self) -> i64 {
        self.u.rem_euclid(8)
    }
}

/// Detailed outcome of the ε_α/u power-class test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsilonReport {
    pub params: StabilizerParams,
    pub r1: u64,
    /// Verdict with F_0 exactly.
    pub holds: bool,
    /// Verdict with F_0 replaced by all roots of unity of Q_p(F_0).
    pub holds_mu_maximal: bool,
    pub mu_maximal: bool,
    /// True when the two verdicts disagree.
    pub differs_from_mu_maximal: bool,
    pub torsion_part: bool,
    pub principal_part: bool,
    pub depth: u32,
}

/// Whether ε_α/u is trivial in Z_p(F_0)^×/⟨F_0, (Z_p(F_0)^×)^{r1}⟩.
pub fn epsilon_test(params: StabilizerParams, r1: u64) -> Result<bool> {
    Ok(epsilon_report(params, r1)?.holds)
}

/// [`epsilon_test`] with the torsion/principal split and the μ-maximal comparison.
pub fn epsilon_report(params: StabilizerParams, r1: u64) -> Result<EpsilonReport> {
    params.validate()?;
    if params.alpha == 0 {
        return Err(Error::InvalidInput("alpha must be at least 1".into()));
    }
    if r1 == 0 {
        return Err(Error::InvalidInput("r1 must be positive".into()));
    }
    let p = params.p;
    let f = params.residue_degree() as usize;
    let e = params.ramification() as usize;
    if f > MAX_RESIDUE_DEGREE || e > MAX_RAMIFICATION {
        return Err(Error::UnsupportedParameters(format!("tower with e = {e}, f = {f} exceeds the configured size")));
    }
    let a = vp(r1, p as u64);
    let m = r1 / upow(p as u64, a);
    let kp = upow(p as u64, a);
    let depth = depth_for(p, params.alpha, kp);
    let tower = FieldTower::new(p, f, params.alpha, depth)?;
    let x = epsilon_alpha(&tower, depth)?.mul(&FieldElem::from_int(&tower, params.u).inv()?);

    let q_minus_1 = tower.q() - 1;
    let residue = x.residue();
    let in_torsion = |dd: u64| {
        let g = gcd(q_minus_1 / dd, m);
        let w = tower.unram().from_residue(&residue);
        let r = tower.unram().pow(&w, &BigUint::from(q_minus_1 / g), 1);
        is_one_residue(&tower.unram().residue(&r))
    };
    let torsion = in_torsion(params.d);
    let torsion_mu = in_torsion(q_minus_1);
    let principal = if a == 0 {
        true
    } else {
        let quotient = FiltrationQuotient::new(&tower, depth)?;
        let span = subgroup_span(&quotient, kp, true)?;
        span.contains(&x)?
    };
    let holds = torsion && principal;
    let holds_mu = torsion_mu && principal;
    Ok(EpsilonReport {
        params,
        r1,
        holds,
        holds_mu_maximal: holds_mu,
        mu_maximal: params.is_mu_maximal(),
        differs_from_mu_maximal: holds != holds_mu,
        torsion_part: torsion,
        principal_part: principal,
        depth,
    })
}

/// Admissible r₁ values for the given F_0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct R1Verdict {
    pub admissible: Vec<u64>,
    pub maximal: u64,
    pub branch: String,
}

/// Largest r₁ with ε_α/u trivial modulo ⟨F_0, r₁-th powers⟩.
pub fn r1_max(params: StabilizerParams) -> Result<R1Verdict> {
    params.validate()?;
    let p = params.p as u64;
    let (maximal, branch) = if p > 2 {
        if params.alpha == 0 {
            (1, "unramified")
        } else if params.is_mu_maximal() {
            (p - 1, "p_odd_full_torsion")
        } else {
            (p_odd_torsion_max(params)?, "p_odd_partial_torsion")
        }
    } else if params.alpha <= 1 {
        (1, "p2_alpha_at_most_1")
    } else if matches!(params.u_mod8(), 1 | 7) {
        (2, "p2_u_pm1_mod8")
    } else if params.d.is_multiple_of(3) {
        (2, "p2_zeta3_in_f0")
    } else {
        (1, "p2_u_pm3_mod8_no_zeta3")
    };
    Ok(R1Verdict { admissible: divisors(maximal), maximal, branch: branch.into() })
}

/// Largest m | p−1 with −u^{−1} ∈ ⟨ζ_d, (F_Q^×)^m⟩ for p odd.
fn p_odd_torsion_max(params: StabilizerParams) -> Result<u64> {
    let p = params.p as u64;
    let f = params.residue_degree();
    let q = (p as u128)
        .checked_pow(f)
        .filter(|&q| q < u64::MAX as u128)
        .ok_or_else(|| Error::UnsupportedParameters("residue field too large".into()))? as u64;
    let u = params.u.rem_euclid(p as i64) as u64;
    let uinv = crate::arith::pow_mod(u, p - 2, p);
    let z = (p - uinv) % p;
    let ok = |m: u64| {
        let g = gcd((q - 1) / params.d, m);
        let exp = ((q - 1) / g) % (p - 1);
        crate::arith::pow_mod(z, exp, p) == 1
    };
    Ok(divisors(p - 1).into_iter().filter(|&m| ok(m)).max().unwrap_or(1))
}

/// Admissible r₂ values given an admissible r₁.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct R2Verdict {
    pub r_f0_r1: u64,
    pub admissible: Vec<u64>,
    pub maximal: u64,
    pub branch: String,
    pub field_degree: u64,
    pub r1_is_maximal: bool,
    /// Set when the admissible set is exactly the divisors of n/[Q_p(F_0):Q_p]
    /// (r₁ maximal and no prime-to-p blocker); otherwise it is sufficient only.
    pub exact: bool,
    /// |F_0 ⊗ Z/r₂| per admissible r₂; meaningful when F_0 is μ-maximal.
    pub extension_counts: Vec<(u64, u64)>,
    pub counts_valid: bool,
}

pub fn r2_admissible(params: StabilizerParams, r1: u64) -> Result<R2Verdict> {
    let r1v = r1_max(params)?;
    if !r1v.admissible.contains(&r1) {
        return Err(Error::InvalidInput(format!("r1 = {r1} is not admissible (maximal {})", r1v.maximal)));
    }
    let p = params.p as u64;
    let deg = params.field_degree();
    if !(params.n as u64).is_multiple_of(deg) {
        return Err(Error::InvalidInput(format!("[Q_p(F_0):Q_p] = {deg} does not divide n = {}", params.n)));
    }
    let quotient = params.n as u64 / deg;
    let (blocker, branch) = if params.ramification() == 1 {
        (1, "unramified")
    } else if p > 2 {
        ((p - 1) / r1, "p_odd_ramified")
    } else if r1v.maximal == 2 {
        (2 / r1, "p2_square_class")
    } else {
        (1, "p2_no_square_class")
    };
    let r = crate::arith::coprime_part(quotient, blocker);
    let admissible = divisors(r);
    let order_f0 = upow(p, params.alpha) * params.d;
    let extension_counts = admissible.iter().map(|&r2| (r2, gcd(order_f0, r2))).collect();
    let r1_is_maximal = r1 == r1v.maximal;
    Ok(R2Verdict {
        r_f0_r1: r,
        admissible,
        maximal: r,
        branch: branch.into(),
        field_degree: deg,
        r1_is_maximal,
        exact: r1_is_maximal && r == quotient,
        extension_counts,
        counts_valid: params.is_mu_maximal(),
    })
}

/// Whether x is a k-th power in the tower's field (x ≠ 0).
pub fn is_kth_power(x: &FieldElem, k: u64) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    let t = x.tower().clone();
    let v = x.pi_valuation().ok_or(Error::IndeterminateAtPrecision)?;
    if !(v as u64).is_multiple_of(k) {
        return Ok(false);
    }
    let mut w = x.clone();
    for _ in 0..v {
        w = w.div_pi()?;
    }
    let q_minus_1 = t.q() - 1;
    let g = gcd(k, q_minus_1);
    let res = t.unram().from_residue(&w.residue());
    let r = t.unram().pow(&res, &BigUint::from(q_minus_1 / g), 1);
    if !is_one_residue(&t.unram().residue(&r)) {
        return Ok(false);
    }
    let a = vp(k, t.p() as u64);
    if a == 0 {
        return Ok(true);
    }
    let depth = closing_depth(&t, a);
    if w.prec() < depth || t.max_prec() < depth {
        return Err(Error::IndeterminateAtPrecision);
    }
    let quotient = FiltrationQuotient::new(&t, depth.max(2))?;
    let kp = upow(t.p() as u64, a);
    let gens: Vec<FieldElem> = quotient.level_generators().into_par_iter().map(|g| g.pow(kp)).collect();
    let span = SubgroupEchelon::from_generators(&quotient, gens)?;
    span.contains(&w)
}

/// Whether X^r − a is irreducible over the tower's field.
pub fn radical_irreducible(a: &FieldElem, r: u64) -> Result<bool> {
    if r < 2 {
        return Ok(r == 1);
    }
    if a.pi_valuation().is_none() {
        return Err(Error::IndeterminateAtPrecision);
    }
    for q in crate::arith::prime_divisors(r) {
        if is_kth_power(a, q)? {
            return Ok(false);
        }
    }
    if r.is_multiple_of(4) && is_kth_power(&a.scale(-4), 4)? {
        return Ok(false);
    }
    Ok(true)
}
