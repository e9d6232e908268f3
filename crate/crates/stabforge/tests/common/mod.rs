//! Independent oracles shared by the integration and acceptance suites.
#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use stabforge::tower::{FieldElem, FieldTower};

/// All residue classes of F_{p^f} as Teichmüller lifts, zero included.
pub fn residue_lifts(t: &Arc<FieldTower>) -> Vec<FieldElem> {
    t.unram()
        .residues()
        .map(
            |r| {
                if r.iter().all(|&x| x == 0) {
                    FieldElem::zero(t, t.max_prec())
                } else {
                    FieldElem::teichmuller(t, &r)
                }
            },
        )
        .collect()
}

fn key(x: &FieldElem) -> Vec<Vec<BigInt>> {
    x.signed_grid()
}

/// Whether y^k = c has a solution, by digit-by-digit search.
///
/// A unit solution of y^k ≡ w mod π^J with J = 2·v_π(k) + 1 lifts to a true
/// root, so the tree is searched to depth J only. `None` means the input
/// precision is too small to decide.
pub fn kth_root_exists(c: &FieldElem, k: u64) -> Option<bool> {
    let t = c.tower().clone();
    let v = c.pi_valuation()?;
    if !(v as u64).is_multiple_of(k) {
        return Some(false);
    }
    let mut w = c.clone();
    for _ in 0..v {
        w = w.div_pi().ok()?;
    }
    let p = t.p() as u64;
    let mut vk = 0u32;
    let mut kk = k;
    while kk.is_multiple_of(p) {
        kk /= p;
        vk += 1;
    }
    let depth = 2 * vk * t.e() as u32 + 1;
    if w.prec() < depth {
        return None;
    }
    let lifts: Vec<FieldElem> = residue_lifts(&t).iter().map(|x| x.with_prec(depth)).collect();
    let pi = FieldElem::pi(&t).with_prec(depth);
    let mut cands: Vec<FieldElem> = lifts
        .iter()
        .filter(|y| y.is_unit())
        .filter(|y| y.pow(k).with_prec(1).congruent(&w.with_prec(1)))
        .cloned()
        .collect();
    for j in 1..depth {
        let pij = pi.pow(j as u64);
        let target = w.with_prec(j + 1);
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for y in &cands {
            for d in &lifts {
                let z = y.add(&d.mul(&pij));
                if z.pow(k).with_prec(j + 1).congruent(&target) && seen.insert(key(&z.with_prec(j + 1))) {
                    next.push(z);
                }
            }
        }
        cands = next;
    }
    Some(!cands.is_empty())
}

/// Reducibility of X^r − a for r ≤ 4 by root and quadratic-factor search.
///
/// A quartic X^4 − a splits into quadratics (X² + bX + c)(X² − bX + d) iff
/// b = 0 and c² = a, or b ≠ 0 with c = d = b²/2 and b⁴ = −4a.
pub fn radical_reducible_oracle(a: &FieldElem, r: u64) -> Option<bool> {
    assert!((2..=4).contains(&r));
    if kth_root_exists(a, r)? {
        return Some(true);
    }
    if r == 4 {
        if kth_root_exists(a, 2)? {
            return Some(true);
        }
        if kth_root_exists(&a.scale(-4), 4)? {
            return Some(true);
        }
    }
    Some(false)
}

/// Closure of a set of principal units modulo π^N, by breadth-first products.
pub fn enumerate_span(gens: &[FieldElem], n: u32) -> HashSet<Vec<Vec<BigInt>>> {
    let t = gens[0].tower().clone();
    let one = FieldElem::one(&t).with_prec(n);
    let gens: Vec<FieldElem> = gens.iter().map(|g| g.with_prec(n)).collect();
    let mut seen = HashSet::new();
    seen.insert(key(&one));
    let mut frontier = vec![one];
    while let Some(x) = frontier.pop() {
        for g in &gens {
            let y = x.mul(g);
            if seen.insert(key(&y)) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Key used by [`enumerate_span`] for membership lookups.
pub fn span_key(x: &FieldElem, n: u32) -> Vec<Vec<BigInt>> {
    key(&x.with_prec(n))
}

/// A uniformly random unit given by its first `prec` π-adic digits.
pub fn random_unit(t: &Arc<FieldTower>, rng: &mut ChaCha8Rng, prec: u32) -> FieldElem {
    let p = t.p();
    let digits: Vec<Vec<u32>> = (0..prec)
        .map(|i| {
            let mut d: Vec<u32> = (0..t.f()).map(|_| rng.gen_range(0..p)).collect();
            if i == 0 && d.iter().all(|&x| x == 0) {
                d[0] = 1;
            }
            d
        })
        .collect();
    FieldElem::from_pi_digits(t, &digits)
}

/// A random principal unit.
pub fn principal(t: &Arc<FieldTower>, rng: &mut ChaCha8Rng, prec: u32) -> FieldElem {
    let y = random_unit(t, rng, prec);
    let r = y.residue();
    y.mul(&FieldElem::teichmuller(t, &r).inv().unwrap()).with_prec(prec)
}

/// Radicands biased towards the reducible cases.
pub fn random_radicand(t: &Arc<FieldTower>, rng: &mut ChaCha8Rng, r: u64) -> FieldElem {
    let prec = t.max_prec() - 8;
    let y = random_unit(t, rng, prec);
    let v = rng.gen_range(0..3u64);
    let pi_v = FieldElem::pi(t).pow(v);
    match rng.gen_range(0..5) {
        0 => y.pow(r).mul(&pi_v.pow(r)),
        1 => y.pow(2).mul(&pi_v.pow(2)),
        2 => y.pow(4).scale(-4),
        3 => y.pow(r).mul(&FieldElem::zeta(t)),
        _ => y.mul(&pi_v),
    }
    .with_prec(prec)
}
