//! Arithmetic in the maximal order O_n = W_n⟨S⟩/(S^n = pu, Sw = w^σ S) of the
//! central division algebra of invariant 1/n over Q_p, and in its fraction
//! algebra D_n.
//!
//! An element is stored as p^shift · Σ_{i<n} w_i S^i with integral w_i ∈ W_n.
//! Precision is absolute and counted in powers of S: an element with
//! precision P is known modulo S^P·O_n, so w_i is stored modulo
//! p^⌈(P − n·shift − i)/n⌉.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{is_prime, prime_divisors};
use crate::error::{Error, Result};
use crate::padic::{hensel_sqrt, prime_power, reduce_signed, PadicUnit};
use crate::unram::{Unram, WVec};

/// Default p-adic precision of the coefficients.
pub const DEFAULT_P_PREC: u32 = 6;
/// Largest residue field size p^n accepted for W_n.
pub const MAX_RESIDUE_FIELD: u64 = 1 << 20;

/// Parameters of O_n with S^n = p·u.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderParams {
    pub p: u32,
    pub n: usize,
    /// The unit u as an integer representative.
    pub u: i64,
    /// p-adic precision of the coefficients w_i.
    pub p_prec: u32,
    /// Confidence threshold M in powers of S: a relation holds only when the
    /// difference is known to vanish modulo S^M.
    pub s_prec: u32,
}

impl OrderParams {
    /// Defaults: p-precision 6 and threshold M = 2n.
    pub fn new(p: u32, n: usize, u: i64) -> OrderParams {
        OrderParams { p, n, u, p_prec: DEFAULT_P_PREC, s_prec: 2 * n as u32 }
    }

    pub fn with_p_prec(mut self, p_prec: u32) -> OrderParams {
        self.p_prec = p_prec;
        self
    }

    pub fn with_s_prec(mut self, s_prec: u32) -> OrderParams {
        self.s_prec = s_prec;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p as u64) {
            return Err(Error::InvalidInput(format!("p = {} is not prime", self.p)));
        }
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.p_prec == 0 || self.s_prec == 0 {
            return Err(Error::InvalidInput("precisions must be at least 1".into()));
        }
        if self.u.rem_euclid(self.p as i64) == 0 {
            return Err(Error::NonUnit);
        }
        let q = (self.p as u64).checked_pow(self.n as u32);
        if q.is_none_or(|q| q > MAX_RESIDUE_FIELD) {
            return Err(Error::UnsupportedParameters(format!(
                "residue field of size {}^{} is too large",
                self.p, self.n
            )));
        }
        if self.s_prec as u64 > self.n as u64 * self.p_prec as u64 {
            return Err(Error::PrecisionTooLow(format!(
                "threshold S^{} exceeds the working precision S^{}",
                self.s_prec,
                self.n as u64 * self.p_prec as u64
            )));
        }
        Ok(())
    }
}

/// Shared context for O_n: the coefficient ring W_n and the fixed generator ω.
#[derive(Debug)]
pub struct Order {
    params: OrderParams,
    w: Unram,
    /// p·u as a W_n scalar.
    pu: WVec,
    omega: WVec,
}

impl Order {
    pub fn new(params: OrderParams) -> Result<Arc<Order>> {
        params.validate()?;
        let w = Unram::new(params.p, params.n, params.p_prec);
        let m = w.modulus(params.p_prec).clone();
        let u = reduce_signed(&BigInt::from(params.u), &m);
        let pu = w.scalar(&(u * params.p), params.p_prec);
        let omega = w.teichmuller(w.primitive_residue(), params.p_prec);
        Ok(Arc::new(Order { params, w, pu, omega }))
    }

    pub fn params(&self) -> &OrderParams {
        &self.params
    }

    pub fn p(&self) -> u32 {
        self.params.p
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn unram(&self) -> &Unram {
        &self.w
    }

    fn big_n(&self) -> u32 {
        self.params.p_prec
    }

    fn ni(&self) -> i64 {
        self.params.n as i64
    }

    /// Full relative precision n·N in powers of S.
    fn capacity(&self) -> i64 {
        self.ni() * self.big_n() as i64
    }

    /// p-adic precision of coefficient i for relative precision `rel`.
    fn coeff_prec(&self, rel: i64, i: usize) -> u32 {
        let n = self.ni();
        let k = (rel - i as i64 + n - 1).div_euclid(n);
        k.clamp(0, self.big_n() as i64) as u32
    }
}

/// An element p^shift · Σ w_i S^i of D_n known modulo S^prec.
#[derive(Debug, Clone)]
pub struct OrderElem {
    order: Arc<Order>,
    shift: i64,
    prec: i64,
    coeffs: Vec<WVec>,
}

impl OrderElem {
    fn build(order: &Arc<Order>, shift: i64, prec: i64, coeffs: Vec<WVec>) -> OrderElem {
        let prec = prec.min(order.ni() * shift + order.capacity());
        let mut x = OrderElem { order: order.clone(), shift, prec, coeffs };
        x.reduce();
        x.normalize();
        x
    }

    fn reduce(&mut self) {
        let rel = self.prec - self.order.ni() * self.shift;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            let k = self.order.coeff_prec(rel, i);
            *c = self.order.w.reduce(c, k);
        }
    }

    /// Pull out powers of p until some coefficient is a unit.
    fn normalize(&mut self) {
        let p = self.order.p();
        while let Some(v) = self.core_valuation() {
            if v < self.order.ni() {
                break;
            }
            for c in self.coeffs.iter_mut() {
                for x in c.iter_mut() {
                    *x /= p;
                }
            }
            self.shift += 1;
        }
    }

    /// Valuation of Σ w_i S^i in powers of S, None if it vanishes at precision.
    fn core_valuation(&self) -> Option<i64> {
        let w = &self.order.w;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(i, c)| w.valuation(c, self.order.big_n()).map(|v| v as i64 * self.order.ni() + i as i64))
            .min()
    }

    pub fn zero(order: &Arc<Order>) -> OrderElem {
        OrderElem::build(order, 0, order.capacity(), vec![order.w.zero(); order.n()])
    }

    pub fn one(order: &Arc<Order>) -> OrderElem {
        OrderElem::from_int(order, 1)
    }

    pub fn from_int(order: &Arc<Order>, z: i64) -> OrderElem {
        OrderElem::from_bigint(order, &BigInt::from(z))
    }

    /// An integer at full precision, with its p-power factored into the shift.
    pub fn from_bigint(order: &Arc<Order>, z: &BigInt) -> OrderElem {
        if z.is_zero() {
            return OrderElem::zero(order);
        }
        let p = BigInt::from(order.p());
        let mut z = z.clone();
        let mut shift = 0i64;
        while (&z % &p).is_zero() {
            z /= &p;
            shift += 1;
        }
        let m = order.w.modulus(order.big_n());
        let c = order.w.scalar(&reduce_signed(&z, m), order.big_n());
        OrderElem::monomial(order, c, 0).mul_p_pow(shift)
    }

    /// A p-adic unit of Z_p (at its own precision) as a central element.
    pub fn from_padic(order: &Arc<Order>, u: &PadicUnit) -> OrderElem {
        let k = u.precision().min(order.big_n());
        let c = order.w.scalar(u.value(), k);
        let mut x = OrderElem::monomial(order, c, 0);
        x.prec = x.prec.min(order.ni() * k as i64);
        x.reduce();
        x
    }

    /// Σ w_i S^i at full precision from n coefficient vectors.
    pub fn from_coefficients(order: &Arc<Order>, coeffs: Vec<WVec>) -> Result<OrderElem> {
        if coeffs.len() != order.n() || coeffs.iter().any(|c| c.len() != order.n()) {
            return Err(Error::InvalidInput(format!("expected {0} coefficients of length {0}", order.n())));
        }
        Ok(OrderElem::build(order, 0, order.capacity(), coeffs))
    }

    /// A W_n element at full precision.
    pub fn from_w(order: &Arc<Order>, w: &WVec) -> OrderElem {
        OrderElem::monomial(order, order.w.reduce(w, order.big_n()), 0)
    }

    /// w·S^i at full precision, folding S^n = p·u.
    pub fn monomial(order: &Arc<Order>, w: WVec, i: usize) -> OrderElem {
        let n = order.n();
        let mut coeffs = vec![order.w.zero(); n];
        let mut c = w;
        for _ in 0..i / n {
            c = order.w.mul(&c, &order.pu, order.big_n());
        }
        coeffs[i % n] = c;
        OrderElem::build(order, 0, order.capacity(), coeffs)
    }

    /// The uniformizer S.
    pub fn s(order: &Arc<Order>) -> OrderElem {
        OrderElem::monomial(order, order.w.one(), 1)
    }

    /// The Teichmüller generator ω of order p^n − 1 in W_n.
    pub fn omega(order: &Arc<Order>) -> OrderElem {
        OrderElem::from_w(order, &order.omega)
    }

    pub fn order(&self) -> &Arc<Order> {
        &self.order
    }

    /// Absolute precision in powers of S.
    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    /// Coefficients w_0..w_{n−1} of the integral part, before the p^shift factor.
    pub fn coefficients(&self) -> &[WVec] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.core_valuation().is_none()
    }

    /// Valuation in powers of S (so v = s/n), None if zero at precision.
    pub fn s_valuation(&self) -> Option<i64> {
        self.core_valuation().map(|v| v + self.order.ni() * self.shift)
    }

    /// Normalized valuation with v(S) = 1/n.
    pub fn valuation(&self) -> Result<Ratio<i64>> {
        self.s_valuation().map(|v| Ratio::new(v, self.order.ni())).ok_or(Error::IndeterminateAtPrecision)
    }

    fn same_order(&self, other: &OrderElem) {
        assert!(Arc::ptr_eq(&self.order, &other.order), "elements of different orders");
    }

    /// Multiply by p^k (k may be negative).
    pub fn mul_p_pow(&self, k: i64) -> OrderElem {
        let mut x = self.clone();
        x.shift += k;
        x.prec += k * self.order.ni();
        x
    }

    /// Coefficients scaled by p^d, d ≥ 0, modulo p^N.
    fn core_scaled(&self, d: i64) -> Vec<WVec> {
        let w = &self.order.w;
        let k = self.order.big_n();
        if d as u64 >= k as u64 {
            return vec![w.zero(); self.order.n()];
        }
        let pd = prime_power(self.order.p(), d as u32);
        self.coeffs.iter().map(|c| w.scale(c, &pd, k)).collect()
    }

    pub fn add(&self, other: &OrderElem) -> OrderElem {
        self.same_order(other);
        let o = &self.order;
        let shift = self.shift.min(other.shift);
        let prec = self.prec.min(other.prec);
        let a = self.core_scaled(self.shift - shift);
        let b = other.core_scaled(other.shift - shift);
        let coeffs = a.iter().zip(&b).map(|(x, y)| o.w.add(x, y, o.big_n())).collect();
        OrderElem::build(o, shift, prec, coeffs)
    }

    pub fn neg(&self) -> OrderElem {
        let o = &self.order;
        let coeffs = self.coeffs.iter().map(|c| o.w.neg(c, o.big_n())).collect();
        OrderElem::build(o, self.shift, self.prec, coeffs)
    }

    pub fn sub(&self, other: &OrderElem) -> OrderElem {
        self.add(&other.neg())
    }

    /// Twisted product: S^i·w = w^{σ^i}·S^i, with S^n folded to p·u.
    pub fn mul(&self, other: &OrderElem) -> OrderElem {
        self.same_order(other);
        let o = &self.order;
        let n = o.n();
        let k = o.big_n();
        let w = &o.w;
        let mut out = vec![w.zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if w.is_zero(a, k) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if w.is_zero(b, k) {
                    continue;
                }
                let mut t = w.mul(a, &w.frob(b, i, k), k);
                if i + j >= n {
                    t = w.mul(&t, &o.pu, k);
                }
                let slot = &mut out[(i + j) % n];
                *slot = w.add(slot, &t, k);
            }
        }
        let vx = self.s_valuation().unwrap_or(self.prec);
        let vy = other.s_valuation().unwrap_or(other.prec);
        let prec = (self.prec + vy).min(other.prec + vx);
        OrderElem::build(o, self.shift + other.shift, prec, out)
    }

    /// Inverse in D_n.
    pub fn invert(&self) -> Result<OrderElem> {
        let o = &self.order;
        let r = self.core_valuation().ok_or(Error::IndeterminateAtPrecision)?;
        let core = OrderElem { shift: 0, prec: self.prec - o.ni() * self.shift, ..self.clone() };
        let inv_core = if r == 0 {
            core.invert_unit()?
        } else {
            // core = y·S^r with y = core·S^{n−r}·(pu)^{-1} a unit.
            let n = o.n();
            let u_inv = self.u_inverse();
            let shifted = core.mul(&OrderElem::monomial(o, o.w.one(), n - r as usize));
            let y = shifted.mul(&u_inv).mul_p_pow(-1);
            let tail = OrderElem::monomial(o, o.w.one(), n - r as usize);
            u_inv.mul(&tail).mul(&y.invert_unit()?).mul_p_pow(-1)
        };
        Ok(inv_core.mul_p_pow(-self.shift))
    }

    fn u_inverse(&self) -> OrderElem {
        let o = &self.order;
        let u = OrderElem::from_int(o, o.params.u);
        u.invert_unit().expect("u is a unit")
    }

    /// Newton iteration z ← z(2 − yz) for a unit y.
    fn invert_unit(&self) -> Result<OrderElem> {
        let o = &self.order;
        if self.shift != 0 || self.core_valuation() != Some(0) {
            return Err(Error::NonUnit);
        }
        let c0 = o.w.inv(&self.coeffs[0], o.big_n()).ok_or(Error::NonUnit)?;
        let one = OrderElem::one(o);
        let two = OrderElem::from_int(o, 2);
        let mut z = OrderElem::from_w(o, &c0);
        for _ in 0..=(o.capacity().max(2) as u64).ilog2() + 1 {
            let err = one.sub(&self.mul(&z));
            if err.is_zero() {
                break;
            }
            z = z.mul(&two.sub(&self.mul(&z)));
        }
        z.prec = z.prec.min(self.prec);
        z.reduce();
        Ok(z)
    }

    pub fn pow(&self, e: i64) -> Result<OrderElem> {
        let base = if e < 0 { self.invert()? } else { self.clone() };
        let mut acc = OrderElem::one(&self.order);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            b = b.mul(&b);
            k >>= 1;
        }
        Ok(acc)
    }

    /// a·b^{-1}.
    pub fn div_right(&self, other: &OrderElem) -> Result<OrderElem> {
        Ok(self.mul(&other.invert()?))
    }

    /// x·y·x^{-1}.
    pub fn conj(&self, y: &OrderElem) -> Result<OrderElem> {
        Ok(self.mul(y).mul(&self.invert()?))
    }

    /// Coefficients with signed representatives, scaled to the shift.
    pub fn signed_coefficients(&self) -> Vec<Vec<BigInt>> {
        let o = &self.order;
        let rel = self.prec - o.ni() * self.shift;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let m = BigInt::from(o.w.modulus(o.coeff_prec(rel, i)).clone());
                c.iter()
                    .map(|x| {
                        let x = BigInt::from(x.clone());
                        if &x + &x > m {
                            x - &m
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for OrderElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, w) in self.signed_coefficients().iter().enumerate() {
            if w.iter().all(Zero::is_zero) {
                continue;
            }
            let body: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            terms.push(format!("[{}]*S^{}", body.join(","), i));
        }
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        if self.shift == 0 {
            write!(f, "{body} + O(S^{})", self.prec)
        } else {
            write!(f, "p^{} * ({body}) + O(S^{})", self.shift, self.prec)
        }
    }
}

/// Outcome of comparing two elements against the confidence threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

/// Compare lhs and rhs: fails if their difference is nonzero at precision,
/// holds if it vanishes modulo S^M, indeterminate otherwise.
pub fn compare(lhs: &OrderElem, rhs: &OrderElem) -> Verdict {
    let d = lhs.sub(rhs);
    if !d.is_zero() {
        Verdict::Fails
    } else if d.prec >= lhs.order.params.s_prec as i64 {
        Verdict::Holds
    } else {
        Verdict::Indeterminate
    }
}

/// √z in Z_p for an integer unit z, as a central element.
pub fn sqrt_int(order: &Arc<Order>, z: i64) -> Result<OrderElem> {
    let p = order.p();
    let k = order.big_n();
    // For p = 2 the root is determined one digit below the working precision.
    let extra = if p == 2 { 1 } else { 0 };
    let u = PadicUnit::from_integer(z, p, k + extra)?;
    let r = hensel_sqrt(&u)?;
    let r = PadicUnit::new(r.as_int().truncate(k)?)?;
    Ok(OrderElem::from_padic(order, &r))
}

/// The Q_8 generators (i, j, k) in O_2 at p = 2, u = 1, with ρ = √−7.
pub fn embed_q8(order: &Arc<Order>) -> Result<(OrderElem, OrderElem, OrderElem)> {
    let pr = order.params();
    if pr.p != 2 || pr.n != 2 || pr.u != 1 {
        return Err(Error::NotApplicable("Q_8 embedding needs p = 2, n = 2, u = 1".into()));
    }
    if pr.p_prec < 4 {
        return Err(Error::PrecisionTooLow(format!("p-precision {} < 4", pr.p_prec)));
    }
    let int = |z| OrderElem::from_int(order, z);
    let w = OrderElem::omega(order);
    let s = OrderElem::s(order);
    let rho = sqrt_int(order, -7)?;
    let three = int(3);
    let three_rho = three.mul(&rho);
    let lin = |a: i64, b: i64| int(a).add(&int(b).mul(&w));
    let a = lin(1, 2).div_right(&three)?;
    let i = a.add(&lin(1, -4).div_right(&three_rho)?.mul(&s));
    let j = a.sub(&lin(5, 1).div_right(&three_rho)?.mul(&s));
    let k = i.mul(&j);
    Ok((i, j, k))
}

/// The elements X = ωS, Z = ω⁴S², ζ_3 = −½(1+Z), τ = ω⁵ of O_4 at p = 3, u = 1.
pub fn d4_p3_elements(order: &Arc<Order>) -> Result<(OrderElem, OrderElem, OrderElem, OrderElem)> {
    let pr = order.params();
    if pr.p != 3 || pr.n != 4 || pr.u != 1 {
        return Err(Error::NotApplicable("needs p = 3, n = 4, u = 1".into()));
    }
    if pr.p_prec < 2 {
        return Err(Error::PrecisionTooLow(format!("p-precision {} < 2", pr.p_prec)));
    }
    let w = OrderElem::omega(order);
    let s = OrderElem::s(order);
    let x = w.mul(&s);
    let z = w.pow(4)?.mul(&s.pow(2)?);
    let half = OrderElem::from_int(order, -2).invert()?;
    let zeta3 = half.mul(&OrderElem::one(order).add(&z));
    let tau = w.pow(5)?;
    Ok((x, z, zeta3, tau))
}

/// Which cube root of unity in the ⟨ζ_3, τ⟩ relation was verified.
#[derive(Debug, Clone, Serialize)]
pub struct D4P3Report {
    pub z_squared_is_minus_3: Verdict,
    pub zeta3_cubed_is_1: Verdict,
    pub tau_order_16: bool,
    /// Verdict for τζ_3τ^{-1} = ζ_3².
    pub tau_conjugation: Verdict,
    /// Verdict for τζ_3τ^{-1} = ζ_3, reported when the stated form fails.
    pub tau_conjugation_variant: Option<Verdict>,
    pub x_centralizes_zeta3: Verdict,
    pub x_conjugates_tau_to_cube: Verdict,
}

pub fn d4_p3_report(order: &Arc<Order>) -> Result<D4P3Report> {
    let (x, z, zeta3, tau) = d4_p3_elements(order)?;
    let int = |v| OrderElem::from_int(order, v);
    let conj = tau.conj(&zeta3)?;
    let tau_conjugation = compare(&conj, &zeta3.pow(2)?);
    let tau_conjugation_variant = (tau_conjugation != Verdict::Holds).then(|| compare(&conj, &zeta3));
    Ok(D4P3Report {
        z_squared_is_minus_3: compare(&z.pow(2)?, &int(-3)),
        zeta3_cubed_is_1: compare(&zeta3.pow(3)?, &int(1)),
        tau_order_16: order_check(&tau, 16)?,
        tau_conjugation,
        tau_conjugation_variant,
        x_centralizes_zeta3: compare(&x.conj(&zeta3)?, &zeta3),
        x_conjugates_tau_to_cube: compare(&x.conj(&tau)?, &tau.pow(3)?),
    })
}

/// Solve N_{W_n/Z_p}(c) = target level by level. At level 0 the first residue
/// (in integer order) with the right norm is taken; at level i ≥ 1 the
/// correction 1 + p^i t uses the first t with Tr(t) equal to the defect.
pub fn solve_norm(w: &Unram, target: &BigUint, k: u32) -> Result<WVec> {
    let p = w.p();
    let m = w.modulus(k);
    let target = target % m;
    if (&target % p).is_zero() {
        return Err(Error::NonUnit);
    }
    let t0 = (&target % p).to_u32().expect("digit");
    let first = w
        .residues()
        .find(|r| {
            let c = w.from_residue(r);
            !w.is_zero(&c, 1) && w.norm(&c, 1) == BigUint::from(t0)
        })
        .ok_or_else(|| Error::InvalidInput("residue norm is not surjective".into()))?;
    let mut c = w.from_residue(&first);
    // Trace of each basis vector β^j, mod p.
    let traces: Vec<u32> = (0..w.f())
        .map(|j| {
            let mut e = w.zero();
            e[j] = BigUint::one();
            (w.trace(&e, 1) % p).to_u32().expect("digit")
        })
        .collect();
    let pivot = traces.iter().position(|&t| t != 0).expect("trace is surjective");
    let inv_pivot = crate::unram::fp::inv(traces[pivot] as u64, p as u64) as u32;
    for i in 1..k {
        let mi1 = w.modulus(i + 1);
        let nc = w.norm(&c, i + 1);
        let nc_inv = nc.modinv(mi1).expect("unit norm");
        let ratio = (&target * nc_inv) % mi1;
        let defect = ((&ratio + mi1 - 1u32) % mi1) / w.modulus(i);
        let d = (defect % p).to_u32().expect("digit");
        if d == 0 {
            continue;
        }
        let mut t = w.zero();
        t[pivot] = BigUint::from((d as u64 * inv_pivot as u64 % p as u64) as u32);
        let step = w.add(&w.one(), &w.scale(&t, w.modulus(i), k), k);
        c = w.mul(&c, &step, k);
    }
    Ok(w.reduce(&c, k))
}

/// ξ = c·S with ξ^n = p·v: c solves N(c) = v·u^{-1}. Conjugation by ξ acts
/// as Frobenius on W_n.
pub fn xi_generator(order: &Arc<Order>, v: i64) -> Result<OrderElem> {
    let pr = order.params();
    let k = pr.p_prec;
    let m = order.w.modulus(k);
    let vv = reduce_signed(&BigInt::from(v), m);
    let uu = reduce_signed(&BigInt::from(pr.u), m);
    let u_inv = uu.modinv(m).ok_or(Error::NonUnit)?;
    let target = (vv * u_inv) % m;
    let c = solve_norm(&order.w, &target, k)?;
    Ok(OrderElem::from_w(order, &c).mul(&OrderElem::s(order)))
}

/// x^d = 1 and x^{d/q} ≠ 1 for every prime q | d. Elements of nonzero
/// valuation have infinite order.
pub fn order_check(x: &OrderElem, d: u64) -> Result<bool> {
    if d == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    match x.s_valuation() {
        None => return Err(Error::IndeterminateAtPrecision),
        Some(v) if v != 0 => return Ok(false),
        _ => {}
    }
    let one = OrderElem::one(&x.order);
    let verdict = |e: u64| -> Result<Verdict> {
        let e = i64::try_from(e).map_err(|_| Error::InvalidInput("order too large".into()))?;
        Ok(compare(&x.pow(e)?, &one))
    };
    match verdict(d)? {
        Verdict::Fails => return Ok(false),
        Verdict::Indeterminate => return Err(Error::IndeterminateAtPrecision),
        Verdict::Holds => {}
    }
    for q in prime_divisors(d) {
        match verdict(d / q)? {
            Verdict::Holds => return Ok(false),
            Verdict::Indeterminate => return Err(Error::IndeterminateAtPrecision),
            Verdict::Fails => {}
        }
    }
    Ok(true)
}

/// D_m embeds in D_n as a Q_p-algebra iff n = km with k ≡ 1 mod m.
pub fn hasse_embeds(m: u64, n: u64) -> bool {
    m >= 1 && n >= 1 && n.is_multiple_of(m) && (n / m) % m == 1 % m
}

/// A word x_1^{e_1}···x_r^{e_r} compared against a target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationWord {
    pub factors: Vec<(String, i64)>,
    pub target: RelationTarget,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelationTarget {
    Name(String),
    Integer(i64),
}

pub fn verify_relation(order: &Arc<Order>, word: &RelationWord, env: &HashMap<String, OrderElem>) -> Result<Verdict> {
    let lookup = |name: &str| env.get(name).ok_or_else(|| Error::UnknownName(name.to_string()));
    let mut acc = OrderElem::one(order);
    for (name, e) in &word.factors {
        acc = acc.mul(&lookup(name)?.pow(*e)?);
    }
    let target = match &word.target {
        RelationTarget::Name(name) => lookup(name)?.clone(),
        RelationTarget::Integer(z) => OrderElem::from_int(order, *z),
    };
    Ok(compare(&acc, &target))
}

/// Abstract syntax of relation-script expressions.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Name(String),
    Call(String, BigInt),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Define { name: String, expr: Expr },
    Check { lhs: Expr, rhs: Expr, text: String },
}

/// A parsed relation script.
#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    pub params: OrderParams,
    /// Statements with their 1-based source line numbers.
    pub statements: Vec<(usize, Statement)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub line: usize,
    pub check: String,
    pub verdict: Verdict,
    /// Valuation of lhs − rhs when it is nonzero at precision.
    pub difference_valuation: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScriptReport {
    pub params: OrderParams,
    pub checks: Vec<CheckResult>,
    pub all_hold: bool,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(&'static str),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Tok::Int(lit.parse().map_err(|_| Error::Parse(lit.clone()))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let sym = match (two.as_str(), c) {
                (":=", _) => ":=",
                ("==", _) => "==",
                (_, '+') => "+",
                (_, '-') => "-",
                (_, '*') => "*",
                (_, '/') => "/",
                (_, '^') => "^",
                (_, '(') => "(",
                (_, ')') => ")",
                (_, '=') => "=",
                _ => return Err(Error::Parse(format!("unexpected character '{c}'"))),
            };
            i += sym.len();
            out.push(Tok::Sym(sym));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> Result<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected '{sym}'")))
        }
    }

    fn done(&self) -> bool {
        self.pos == self.toks.len()
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat("+") {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat("-") {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat("/") {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat("-") {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat("^") {
            let e = self.signed_int()?;
            let e = e.to_i64().ok_or_else(|| Error::Parse("exponent too large".into()))?;
            return Ok(Expr::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn signed_int(&mut self) -> Result<BigInt> {
        let neg = self.eat("-");
        match self.peek().cloned() {
            Some(Tok::Int(z)) => {
                self.pos += 1;
                Ok(if neg { -z } else { z })
            }
            _ => Err(Error::Parse("expected an integer".into())),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Int(z)) => {
                self.pos += 1;
                Ok(Expr::Int(z))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.eat("(") {
                    let arg = self.signed_int()?;
                    self.expect(")")?;
                    Ok(Expr::Call(name, arg))
                } else {
                    Ok(Expr::Name(name))
                }
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(")")?;
                Ok(e)
            }
            _ => Err(Error::Parse("expected an operand".into())),
        }
    }
}

/// Parse a standalone expression.
pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut parser = Parser { toks: tokenize(s)?, pos: 0 };
    let e = parser.expr()?;
    if !parser.done() {
        return Err(Error::Parse(format!("trailing input in '{s}'")));
    }
    Ok(e)
}

fn parse_params(rest: &str) -> Result<OrderParams> {
    let mut kv = HashMap::new();
    for item in rest.split_whitespace() {
        let (k, v) = item.split_once('=').ok_or_else(|| Error::Parse(format!("expected key=value, got '{item}'")))?;
        let v: i64 = v.parse().map_err(|_| Error::Parse(format!("bad integer in '{item}'")))?;
        kv.insert(k.to_string(), v);
    }
    let get = |k: &str| kv.get(k).copied().ok_or_else(|| Error::Parse(format!("missing '{k}'")));
    let to_u32 = |v: i64, k: &str| u32::try_from(v).map_err(|_| Error::Parse(format!("'{k}' out of range")));
    let p = to_u32(get("p")?, "p")?;
    let n = to_u32(get("n")?, "n")? as usize;
    let mut params = OrderParams::new(p, n, kv.get("u").copied().unwrap_or(1));
    if let Some(&v) = kv.get("prec") {
        params.p_prec = to_u32(v, "prec")?;
    }
    if let Some(&v) = kv.get("sprec") {
        params.s_prec = to_u32(v, "sprec")?;
    }
    for k in kv.keys() {
        if !["p", "n", "u", "prec", "sprec"].contains(&k.as_str()) {
            return Err(Error::Parse(format!("unknown parameter '{k}'")));
        }
    }
    Ok(params)
}

/// Parse a relation script. Lines are `params p=.. n=.. [u=..] [prec=..]
/// [sprec=..]`, `name := expr` or `check expr == expr`; `#` starts a comment.
pub fn parse_script(text: &str) -> Result<Script> {
    let mut params = None;
    let mut statements = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let located = |e: Error| match e {
            Error::Parse(m) => Error::Parse(format!("line {line_no}: {m}")),
            other => other,
        };
        if let Some(rest) = line.strip_prefix("params") {
            params = Some(parse_params(rest).map_err(located)?);
        } else if let Some(rest) = line.strip_prefix("check ") {
            let (l, r) = rest.split_once("==").ok_or_else(|| located(Error::Parse("check needs '=='".into())))?;
            let lhs = parse_expr(l).map_err(located)?;
            let rhs = parse_expr(r).map_err(located)?;
            statements.push((line_no, Statement::Check { lhs, rhs, text: rest.trim().into() }));
        } else if let Some((name, rhs)) = line.split_once(":=") {
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                return Err(located(Error::Parse(format!("bad name '{name}'"))));
            }
            let expr = parse_expr(rhs).map_err(located)?;
            statements.push((line_no, Statement::Define { name: name.into(), expr }));
        } else {
            return Err(located(Error::Parse(format!("unrecognized line '{line}'"))));
        }
    }
    let params = params.ok_or_else(|| Error::Parse("missing 'params' line".into()))?;
    Ok(Script { params, statements })
}

/// Evaluation environment: user definitions over the built-in names
/// `S`, `omega` and (when √−7 exists in Z_p) `rho`.
pub struct Env {
    order: Arc<Order>,
    names: HashMap<String, OrderElem>,
}

impl Env {
    pub fn new(order: &Arc<Order>) -> Env {
        let mut names = HashMap::new();
        names.insert("S".to_string(), OrderElem::s(order));
        names.insert("omega".to_string(), OrderElem::omega(order));
        if let Ok(rho) = sqrt_int(order, -7) {
            names.insert("rho".to_string(), rho);
        }
        Env { order: order.clone(), names }
    }

    pub fn insert(&mut self, name: &str, x: OrderElem) {
        self.names.insert(name.to_string(), x);
    }

    pub fn get(&self, name: &str) -> Option<&OrderElem> {
        self.names.get(name)
    }

    pub fn names(&self) -> &HashMap<String, OrderElem> {
        &self.names
    }

    pub fn eval(&self, e: &Expr) -> Result<OrderElem> {
        let o = &self.order;
        Ok(match e {
            Expr::Int(z) => OrderElem::from_bigint(o, z),
            Expr::Name(n) => self.names.get(n).cloned().ok_or_else(|| Error::UnknownName(n.clone()))?,
            Expr::Call(f, arg) => {
                let a = arg.to_i64().ok_or_else(|| Error::InvalidInput("argument too large".into()))?;
                match f.as_str() {
                    "sqrt" => sqrt_int(o, a)?,
                    "xi" => xi_generator(o, a)?,
                    _ => return Err(Error::UnknownName(format!("{f}()"))),
                }
            }
            Expr::Neg(a) => self.eval(a)?.neg(),
            Expr::Add(a, b) => self.eval(a)?.add(&self.eval(b)?),
            Expr::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?),
            Expr::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Expr::Div(a, b) => self.eval(a)?.div_right(&self.eval(b)?)?,
            Expr::Pow(a, k) => self.eval(a)?.pow(*k)?,
        })
    }
}

/// Evaluate a script; definitions are sequential, checks are independent.
pub fn run_script(script: &Script) -> Result<ScriptReport> {
    let order = Order::new(script.params.clone())?;
    let mut env = Env::new(&order);
    let mut checks = Vec::new();
    for (line, st) in &script.statements {
        match st {
            Statement::Define { name, expr } => {
                let x = env.eval(expr)?;
                env.insert(name, x);
            }
            Statement::Check { lhs, rhs, text } => {
                let l = env.eval(lhs)?;
                let r = env.eval(rhs)?;
                let verdict = compare(&l, &r);
                let difference_valuation = match verdict {
                    Verdict::Fails => l.sub(&r).valuation().ok().map(|v| v.to_string()),
                    _ => None,
                };
                checks.push(CheckResult { line: *line, check: text.clone(), verdict, difference_valuation });
            }
        }
    }
    let all_hold = checks.iter().all(|c| c.verdict == Verdict::Holds);
    Ok(ScriptReport { params: script.params.clone(), checks, all_hold })
}

/// The Q_8 relation script shipped with the crate.
pub const Q8_SCRIPT: &str = include_str!("../relations/q8.rel");
/// The p = 3, n = 4 relation script shipped with the crate.
pub const D4_P3_SCRIPT: &str = include_str!("../relations/d4_p3.rel");
