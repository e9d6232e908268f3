//! Unramified extensions W_f = Z_p[β]/(g) and their residue fields F_{p^f}.
//!
//! Elements are coefficient vectors in the basis 1, β, …, β^(f−1), reduced
//! modulo p^k for a caller-chosen k no larger than the context precision.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{prime_divisors, upow};
use crate::padic::prime_power;

/// A W_f coefficient vector of length f.
pub type WVec = Vec<BigUint>;

/// Polynomials over F_p, lowest coefficient first, no trailing zeros.
pub(crate) mod fp {
    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm && !r.is_empty() {
            let shift = r.len() - 1 - dm;
            let c = r[r.len() - 1] * lead_inv % p;
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * mi % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        rem(&out, m, p)
    }

    pub fn powmod(a: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut acc = rem(&[1], m, p);
        let mut b = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(&acc, &b, m, p);
            }
            b = mulmod(&b, &b, m, p);
            e >>= 1;
        }
        acc
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        let mut acc = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    }

    /// Irreducibility of a monic polynomial of degree f ≥ 1 over F_p.
    pub fn is_irreducible(g: &[u64], p: u64) -> bool {
        let f = g.len() - 1;
        if f == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut xp = x.clone();
        for _ in 1..=f / 2 {
            xp = powmod(&xp, p as u128, g, p);
            let d = gcd(&sub(&xp, &x, p), g, p);
            if d.len() > 1 {
                return false;
            }
        }
        true
    }
}

/// Context for W_f at a fixed maximal p-adic precision.
#[derive(Debug)]
pub struct Unram {
    p: u32,
    f: usize,
    prec: u32,
    /// Low coefficients c_0..c_{f−1} of the monic defining polynomial, in [0, p).
    g: Vec<u32>,
    moduli: Vec<BigUint>,
    /// frob_pow[t][j] = σ^t(β)^j mod p^prec.
    frob_pow: Vec<Vec<WVec>>,
    /// Residue coefficients of the chosen primitive element of F_{p^f}.
    primitive: Vec<u32>,
}

impl Unram {
    /// Build W_f with the lexicographically smallest monic irreducible g of degree f.
    pub fn new(p: u32, f: usize, prec: u32) -> Unram {
        assert!(f >= 1 && prec >= 1);
        let g = smallest_irreducible(p as u64, f);
        let moduli = (0..=prec).map(|k| prime_power(p, k)).collect();
        let mut u = Unram { p, f, prec, g, moduli, frob_pow: Vec::new(), primitive: Vec::new() };
        u.primitive = u.find_primitive();
        u.frob_pow = u.build_frobenius();
        u
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn f(&self) -> usize {
        self.f
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Residue field size p^f.
    pub fn q(&self) -> u64 {
        upow(self.p as u64, self.f as u32)
    }

    pub fn defining_poly(&self) -> &[u32] {
        &self.g
    }

    pub fn primitive_residue(&self) -> &[u32] {
        &self.primitive
    }

    pub fn modulus(&self, k: u32) -> &BigUint {
        &self.moduli[k as usize]
    }

    pub fn zero(&self) -> WVec {
        vec![BigUint::zero(); self.f]
    }

    pub fn one(&self) -> WVec {
        let mut v = self.zero();
        v[0] = BigUint::one();
        v
    }

    pub fn scalar(&self, c: &BigUint, k: u32) -> WVec {
        let mut v = self.zero();
        v[0] = c % self.modulus(k);
        v
    }

    pub fn reduce(&self, a: &WVec, k: u32) -> WVec {
        let m = self.modulus(k);
        a.iter().map(|x| x % m).collect()
    }

    pub fn is_zero(&self, a: &WVec, k: u32) -> bool {
        let m = self.modulus(k);
        a.iter().all(|x| (x % m).is_zero())
    }

    pub fn add(&self, a: &WVec, b: &WVec, k: u32) -> WVec {
        let m = self.modulus(k);
        a.iter().zip(b).map(|(x, y)| (x + y) % m).collect()
    }

    pub fn sub(&self, a: &WVec, b: &WVec, k: u32) -> WVec {
        let m = self.modulus(k);
        a.iter().zip(b).map(|(x, y)| (x % m + m - y % m) % m).collect()
    }

    pub fn neg(&self, a: &WVec, k: u32) -> WVec {
        let m = self.modulus(k);
        a.iter().map(|x| (m - x % m) % m).collect()
    }

    pub fn scale(&self, a: &WVec, c: &BigUint, k: u32) -> WVec {
        let m = self.modulus(k);
        a.iter().map(|x| (x * c) % m).collect()
    }

    pub fn mul(&self, a: &WVec, b: &WVec, k: u32) -> WVec {
        let f = self.f;
        let m = self.modulus(k);
        if f == 1 {
            return vec![(&a[0] * &b[0]) % m];
        }
        let mut prod = vec![BigUint::zero(); 2 * f - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        for x in prod.iter_mut() {
            *x %= m;
        }
        // β^f = −Σ c_i β^i
        for d in (f..2 * f - 1).rev() {
            let top = std::mem::take(&mut prod[d]);
            if top.is_zero() {
                continue;
            }
            for (i, &c) in self.g.iter().enumerate() {
                if c != 0 {
                    let t = (&top * c) % m;
                    let slot = &mut prod[d - f + i];
                    *slot = (&*slot + m - t) % m;
                }
            }
        }
        prod.truncate(f);
        prod
    }

    pub fn pow(&self, a: &WVec, e: &BigUint, k: u32) -> WVec {
        let mut acc = self.reduce(&self.one(), k);
        let bits = e.bits();
        for i in (0..bits).rev() {
            acc = self.mul(&acc, &acc, k);
            if e.bit(i) {
                acc = self.mul(&acc, a, k);
            }
        }
        acc
    }

    /// Residue class as small integers mod p.
    pub fn residue(&self, a: &WVec) -> Vec<u32> {
        a.iter().map(|x| (x % self.p).to_u32().expect("digit")).collect()
    }

    pub fn from_residue(&self, r: &[u32]) -> WVec {
        r.iter().map(|&x| BigUint::from(x % self.p)).collect()
    }

    /// Minimum p-adic valuation of the coefficients, `None` if zero mod p^k.
    pub fn valuation(&self, a: &WVec, k: u32) -> Option<u32> {
        let m = self.modulus(k);
        a.iter()
            .filter_map(|x| {
                let x = x % m;
                if x.is_zero() {
                    None
                } else {
                    let mut v = 0;
                    let mut y = x;
                    while (&y % self.p).is_zero() {
                        y /= self.p;
                        v += 1;
                    }
                    Some(v)
                }
            })
            .min()
    }

    /// Divide every coefficient by p^s exactly (caller guarantees divisibility).
    pub fn div_p_pow(&self, a: &WVec, s: u32) -> WVec {
        let d = self.modulus(s);
        a.iter()
            .map(|x| {
                let (q, r) = x.div_rem(d);
                debug_assert!(r.is_zero(), "inexact division by p^s");
                q
            })
            .collect()
    }

    /// Inverse of a unit modulo p^k.
    pub fn inv(&self, a: &WVec, k: u32) -> Option<WVec> {
        let res = self.residue(a);
        if res.iter().all(|&x| x == 0) {
            return None;
        }
        // residue inverse a^(q−2)
        let q = self.q();
        let mut x = self.pow(&self.from_residue(&res), &BigUint::from(q - 2), 1);
        let mut prec = 1u32;
        let two = self.scalar(&BigUint::from(2u32), k);
        while prec < k {
            prec = (2 * prec).min(k);
            let ax = self.mul(a, &x, prec);
            let corr = self.sub(&self.reduce(&two, prec), &ax, prec);
            x = self.mul(&x, &corr, prec);
        }
        Some(self.reduce(&x, k))
    }

    /// Teichmüller lift of a residue class, modulo p^k.
    pub fn teichmuller(&self, r: &[u32], k: u32) -> WVec {
        let q = BigUint::from(self.q());
        let mut x = self.from_residue(r);
        for _ in 0..k {
            let next = self.pow(&x, &q, k);
            if next == x {
                break;
            }
            x = next;
        }
        x
    }

    /// σ^t(a) modulo p^k, σ the arithmetic Frobenius.
    pub fn frob(&self, a: &WVec, t: usize, k: u32) -> WVec {
        let t = t % self.f;
        if t == 0 {
            return self.reduce(a, k);
        }
        let m = self.modulus(k);
        let mut out = self.zero();
        for (j, c) in a.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, b) in out.iter_mut().zip(&self.frob_pow[t][j]) {
                *o = (&*o + c * b) % m;
            }
        }
        out
    }

    /// Norm from W_f to Z_p: product of all Frobenius conjugates.
    pub fn norm(&self, a: &WVec, k: u32) -> BigUint {
        let mut acc = self.reduce(a, k);
        for t in 1..self.f {
            acc = self.mul(&acc, &self.frob(a, t, k), k);
        }
        debug_assert!(acc[1..].iter().all(|x| x.is_zero()));
        acc[0].clone()
    }

    /// Trace from W_f to Z_p.
    pub fn trace(&self, a: &WVec, k: u32) -> BigUint {
        let mut acc = self.reduce(a, k);
        for t in 1..self.f {
            acc = self.add(&acc, &self.frob(a, t, k), k);
        }
        acc[0].clone()
    }

    /// All residue classes of F_{p^f}, in lexicographic integer order.
    pub fn residues(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        let p = self.p as u64;
        let f = self.f;
        (0..self.q()).map(move |mut n| {
            (0..f)
                .map(|_| {
                    let d = (n % p) as u32;
                    n /= p;
                    d
                })
                .collect()
        })
    }

    fn residue_poly(&self) -> Vec<u64> {
        let mut g: Vec<u64> = self.g.iter().map(|&c| c as u64).collect();
        g.push(1);
        g
    }

    fn find_primitive(&self) -> Vec<u32> {
        let p = self.p as u64;
        let g = self.residue_poly();
        let q1 = (self.q() - 1) as u128;
        let primes = prime_divisors(q1 as u64);
        let is_primitive = |a: &[u64]| {
            let mut a = a.to_vec();
            fp::trim(&mut a);
            !a.is_empty() && primes.iter().all(|&r| fp::powmod(&a, q1 / r as u128, &g, p) != vec![1])
        };
        let mut beta = vec![0u64; self.f];
        if self.f > 1 {
            beta[1] = 1;
        } else {
            beta[0] = (p - self.g[0] as u64) % p;
        }
        if is_primitive(&beta) {
            return beta.iter().map(|&x| x as u32).collect();
        }
        self.residues()
            .find(|r| is_primitive(&r.iter().map(|&x| x as u64).collect::<Vec<_>>()))
            .expect("F_q^× is cyclic")
    }

    fn build_frobenius(&self) -> Vec<Vec<WVec>> {
        let k = self.prec;
        let f = self.f;
        let mut beta = self.zero();
        if f > 1 {
            beta[1] = BigUint::one();
        } else {
            beta[0] = BigUint::from((self.p - self.g[0]) % self.p);
        }
        // Newton iteration for the root of g congruent to β^p.
        let mut x = self.pow(&beta, &BigUint::from(self.p), k);
        for _ in 0..=(k as usize).max(1).ilog2() + 2 {
            let (gx, dgx) = self.eval_g(&x, k);
            if self.is_zero(&gx, k) {
                break;
            }
            let inv = self.inv(&dgx, k).expect("g is separable mod p");
            x = self.sub(&x, &self.mul(&gx, &inv, k), k);
        }
        let mut sigma_t = vec![self.reduce(&beta, k)];
        for t in 1..f {
            let prev = sigma_t[t - 1].clone();
            // σ^t(β) = σ^{t−1}(β) evaluated at σ(β): apply σ via substitution.
            let mut acc = self.zero();
            let mut pw = self.one();
            for c in prev.iter() {
                acc = self.add(&acc, &self.scale(&pw, c, k), k);
                pw = self.mul(&pw, &x, k);
            }
            sigma_t.push(acc);
        }
        if f > 1 {
            sigma_t[1] = x.clone();
        }
        sigma_t
            .iter()
            .map(|s| {
                let mut pows = Vec::with_capacity(f);
                let mut pw = self.one();
                for _ in 0..f {
                    pows.push(pw.clone());
                    pw = self.mul(&pw, s, k);
                }
                pows
            })
            .collect()
    }

    /// g(x) and g'(x).
    fn eval_g(&self, x: &WVec, k: u32) -> (WVec, WVec) {
        let mut coeffs: Vec<BigUint> = self.g.iter().map(|&c| BigUint::from(c)).collect();
        coeffs.push(BigUint::one());
        let mut val = self.zero();
        for c in coeffs.iter().rev() {
            val = self.add(&self.mul(&val, x, k), &self.scalar(c, k), k);
        }
        let mut der = self.zero();
        for (i, c) in coeffs.iter().enumerate().skip(1).rev() {
            let ci = self.scalar(&(c * i), k);
            der = self.add(&self.mul(&der, x, k), &ci, k);
        }
        (val, der)
    }
}

/// Lexicographically smallest monic irreducible polynomial of degree f over F_p,
/// ordering candidates by Σ c_i p^i over the low coefficients.
pub fn smallest_irreducible(p: u64, f: usize) -> Vec<u32> {
    let total = upow(p, f as u32);
    for n in 0..total {
        let mut m = n;
        let mut g: Vec<u64> = (0..f)
            .map(|_| {
                let d = m % p;
                m /= p;
                d
            })
            .collect();
        g.push(1);
        if fp::is_irreducible(&g, p) {
            g.pop();
            return g.into_iter().map(|x| x as u32).collect();
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
