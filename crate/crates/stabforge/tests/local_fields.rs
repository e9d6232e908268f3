use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use proptest::prelude::*;
use stabforge::tower::*;

fn tower(p: u32, f: usize, alpha: u32, prec: u32) -> Arc<FieldTower> {
    FieldTower::new(p, f, alpha, prec).unwrap()
}

/// Φ_{p^α}(X + 1) = Σ_{j<p} (X + 1)^{j p^{α−1}}, expanded with Pascal rows.
fn cyclotomic_shifted(p: u32, alpha: u32) -> Vec<BigInt> {
    let step = (p as usize).pow(alpha - 1);
    let deg = step * (p as usize - 1);
    let mut row = vec![BigInt::from(1)];
    let mut out = vec![BigInt::from(0); deg + 1];
    for k in 0..=deg {
        if k % step == 0 {
            for (o, r) in out.iter_mut().zip(&row) {
                *o += r;
            }
        }
        let mut next = vec![BigInt::from(0); row.len() + 1];
        for (i, r) in row.iter().enumerate() {
            next[i] += r;
            next[i + 1] += r;
        }
        row = next;
    }
    out
}

fn digits_f1(x: &FieldElem, n: u32) -> Vec<i64> {
    let p = x.tower().p();
    x.pi_digits(n).unwrap().iter().map(|d| signed_digit(residue_scalar(d), p)).collect()
}

fn sparse(n: usize, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; n];
    for &(i, c) in terms {
        v[i] = c;
    }
    v
}

#[test]
fn q_alpha_matches_cyclotomic_oracle() {
    for (p, amax) in [(2u32, 5u32), (3, 4), (5, 3), (7, 2)] {
        for alpha in 1..=amax {
            let q = q_alpha_coeffs(p, alpha);
            assert_eq!(q, cyclotomic_shifted(p, alpha), "({p}, {alpha})");
            assert_eq!(q[0], BigInt::from(p));
        }
    }
    let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    assert_eq!(q_alpha_coeffs(2, 3), ints(&[2, 4, 6, 4, 1]));
    assert_eq!(q_alpha_coeffs(3, 1), ints(&[3, 3, 1]));
    let a4 = &q_alpha_coeffs(3, 2)[4];
    assert_eq!(((a4 + 3) % 9), BigInt::from(0));
}

#[test]
fn defining_relation_holds() {
    for (p, f, alpha) in [(2, 1, 3), (2, 2, 2), (3, 1, 2), (3, 2, 1), (5, 1, 2), (7, 1, 1)] {
        let t = tower(p, f, alpha, 60);
        let pi = FieldElem::pi(&t);
        let q = q_alpha_coeffs(p, alpha);
        let mut acc = FieldElem::zero(&t, 60);
        for c in q.iter().rev() {
            acc = acc.mul(&pi).add(&FieldElem::from_bigint(&t, c));
        }
        assert!(acc.is_zero(), "({p}, {f}, {alpha})");
        let zeta = FieldElem::zeta(&t);
        assert!(zeta.pow((p as u64).pow(alpha)).is_one());
    }
}

#[test]
fn epsilon_identity_on_grid() {
    for (p, amax) in [(2u32, 4u32), (3, 4), (5, 3)] {
        for alpha in 1..=amax {
            let e = (p - 1) * p.pow(alpha - 1);
            let n = e + 8;
            let t = tower(p, 1, alpha, n);
            let eps = epsilon_alpha(&t, n).unwrap();
            assert!(eps.is_unit());
            let lhs = eps.scale(p as i64);
            assert!(lhs.congruent(&FieldElem::pi(&t).pow(e as u64)), "({p}, {alpha})");
        }
    }
}

#[test]
fn epsilon_examples() {
    let t = tower(2, 1, 3, 8);
    assert_eq!(digits_f1(&epsilon_alpha(&t, 8).unwrap(), 8), sparse(8, &[(0, 1), (2, 1), (4, 1), (5, 1), (6, 1)]));
    let t = tower(2, 1, 1, 8);
    assert!(epsilon_alpha(&t, 8).unwrap().congruent(&FieldElem::from_int(&t, -1)));
}

#[test]
fn digit_expansions_of_p() {
    let t = tower(3, 1, 2, 10);
    assert_eq!(digits_f1(&FieldElem::from_int(&t, 3), 10), sparse(10, &[(6, -1), (9, 1)]));
    for alpha in 2..=4u32 {
        let e = 1usize << (alpha - 1);
        let n = 1u32 << alpha;
        let t = tower(2, 1, alpha, n);
        let want = sparse(n as usize, &[(e, 1), (e + (1 << (alpha - 2)), 1)]);
        assert_eq!(digits_f1(&FieldElem::from_int(&t, 2), n), want, "alpha = {alpha}");
    }
    let t = tower(5, 2, 1, 6);
    let one = FieldElem::one(&t).pi_digits(6).unwrap();
    assert_eq!(one[0], vec![1, 0]);
    assert!(one[1..].iter().all(|d| d.iter().all(|&c| c == 0)));
}

#[test]
fn galois_action_examples() {
    let t = tower(2, 1, 2, 20);
    let z = FieldElem::zeta(&t);
    assert!(z.galois_act(1, 0).unwrap().congruent(&z));
    assert!(z.galois_act(-1, 0).unwrap().congruent(&z.neg()));
    let t = tower(2, 2, 0, 20);
    let w = FieldElem::omega(&t);
    assert!(w.galois_act(1, 1).unwrap().congruent(&w.mul(&w)));
}

#[test]
fn norm_examples() {
    for p in [3u32, 5] {
        let t = tower(p, 1, 1, 30);
        let n = FieldElem::pi(&t).norm(&[(2, 0)]).unwrap();
        assert!(n.congruent(&FieldElem::from_int(&t, p as i64)), "p = {p}");
    }
    // One-level norm from Q_3(ζ_9) to Q_3(ζ_3): the subgroup s ≡ 1 mod 3 is generated by 4.
    let t = tower(3, 1, 2, 30);
    let one = FieldElem::one(&t);
    let zeta = FieldElem::zeta(&t);
    let n = one.sub(&zeta).norm(&[(4, 0)]).unwrap();
    assert!(n.congruent(&one.sub(&zeta.pow(3))));
    // (1 + (1+i)^2) has norm 5 ≡ 1 mod 4 over Q_2.
    let t = tower(2, 1, 2, 20);
    let i = FieldElem::zeta(&t);
    let one = FieldElem::one(&t);
    let x = one.add(&one.add(&i).pow(2));
    let n = x.norm(&[(-1, 0)]).unwrap();
    assert!(n.congruent(&FieldElem::from_int(&t, 5)));
    let d = n.sub(&one).pi_valuation().unwrap();
    assert!(d >= 4, "norm − 1 must be divisible by 4 = π^4");
}

#[test]
fn trace_examples() {
    let t = tower(3, 3, 0, 10);
    assert!(FieldElem::one(&t).trace(&[(1, 1)]).unwrap().congruent(&FieldElem::from_int(&t, 3)));
    let t = tower(2, 2, 0, 10);
    let w = FieldElem::omega(&t);
    assert!(w.trace(&[(1, 1)]).unwrap().congruent(&FieldElem::from_int(&t, -1)));
    // Some residue class has odd trace.
    let odd = [[1u32, 0], [0, 1], [1, 1]].iter().any(|r| {
        let x = FieldElem::teichmuller(&t, r);
        x.trace(&[(1, 1)]).unwrap().residue()[0] % 2 == 1
    });
    assert!(odd);
}

#[test]
fn change_rings_examples() {
    let (src, dst) = (tower(3, 1, 2, 60), tower(3, 1, 3, 180));
    let img = change_rings(&FieldElem::pi(&src), &dst).unwrap();
    let diff = img.sub(&FieldElem::pi(&dst).pow(3));
    assert!(diff.pi_valuation().unwrap() > 18);
    let three = change_rings(&FieldElem::from_int(&src, 3), &dst).unwrap();
    assert!(three.congruent(&FieldElem::from_int(&dst, 3)));
    for (p, alpha) in [(3u32, 2u32), (2, 3)] {
        let bound = p.pow(alpha + 1) + 1;
        let lo = tower(p, 1, alpha, bound);
        let hi = tower(p, 1, alpha + 1, bound);
        let lifted = change_rings(&epsilon_alpha(&lo, bound / p + 1).unwrap(), &hi).unwrap();
        let target = epsilon_alpha(&hi, bound).unwrap();
        let v = lifted.sub(&target).with_prec(bound).pi_valuation();
        assert!(v.is_none(), "({p}, {alpha}): differ at π^{v:?}");
    }
}

#[test]
fn valuation_examples() {
    let t = tower(3, 1, 2, 30);
    assert_eq!(FieldElem::pi(&t).valuation().unwrap(), Ratio::new(1, 6));
    assert_eq!(FieldElem::from_int(&t, 3).valuation().unwrap(), Ratio::from_integer(1));
    let t = tower(2, 1, 2, 20);
    let x = FieldElem::one(&t).add(&FieldElem::zeta(&t));
    assert_eq!(x.valuation().unwrap(), Ratio::new(1, 2));
    assert!(FieldElem::zero(&t, 10).valuation().is_err());
}

#[test]
fn element_literals_parse() {
    let t = tower(3, 2, 1, 20);
    let x = FieldElem::parse(&t, "pi^0 * [2,1] + pi^1 * [1,1]", 20).unwrap();
    let y = FieldElem::parse(&t, &x.to_string(), 20).unwrap();
    assert!(x.congruent(&y));
    assert!(FieldElem::parse(&t, "pi^x * [1]", 20).is_err());
    assert!(FieldElem::parse(&t, "[1,2", 20).is_err());
}

fn elem(t: &Arc<FieldTower>, seed: &[i64], prec: u32) -> FieldElem {
    let (e, f) = (t.e(), t.f());
    let grid: Vec<Vec<BigInt>> =
        (0..e).map(|i| (0..f).map(|j| BigInt::from(seed[(i * f + j) % seed.len()])).collect()).collect();
    FieldElem::from_grid(t, &grid, prec).unwrap()
}

fn seeds() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-500i64..500, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn change_rings_is_a_ring_map(a in seeds(), b in seeds(), f in 1usize..3) {
        let (src, dst) = (tower(3, f, 1, 20), tower(3, f, 2, 60));
        let (x, y) = (elem(&src, &a, 20), elem(&src, &b, 20));
        let i = |z: &FieldElem| change_rings(z, &dst).unwrap();
        prop_assert!(i(&x.add(&y)).congruent(&i(&x).add(&i(&y))));
        prop_assert!(i(&x.mul(&y)).congruent(&i(&x).mul(&i(&y))));
    }

    #[test]
    fn norm_is_multiplicative_and_fixed(a in seeds(), b in seeds(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let alpha = if p == 2 { 3 } else { 1 };
        let t = tower(p, 2, alpha, 24);
        let (x, y) = (elem(&t, &a, 24), elem(&t, &b, 24));
        let gens = [(-1i64, 0usize), (1, 1)];
        let nx = x.norm(&gens).unwrap();
        let ny = y.norm(&gens).unwrap();
        prop_assert!(x.mul(&y).norm(&gens).unwrap().congruent(&nx.mul(&ny)));
        for (s, k) in gens {
            prop_assert!(nx.galois_act(s, k).unwrap().congruent(&nx));
        }
    }

    #[test]
    fn digits_reconstruct(a in seeds(), p in prop::sample::select(vec![2u32, 3, 5]), f in 1usize..3, n in 1u32..20) {
        let t = tower(p, f, 1, 20);
        let x = elem(&t, &a, 20);
        let d = x.pi_digits(n).unwrap();
        let back = FieldElem::from_pi_digits(&t, &d);
        prop_assert!(back.congruent(&x.with_prec(n)));
        prop_assert!(d.iter().all(|r| r.len() == f && r.iter().all(|&c| c < p)));
    }

    #[test]
    fn galois_action_is_a_ring_map(a in seeds(), b in seeds(), s in prop::sample::select(vec![2i64, 4, 5, 7, 8]), k in 0usize..2) {
        let t = tower(3, 2, 2, 30);
        let (x, y) = (elem(&t, &a, 30), elem(&t, &b, 30));
        let g = |z: &FieldElem| z.galois_act(s, k).unwrap();
        prop_assert!(g(&x.mul(&y)).congruent(&g(&x).mul(&g(&y))));
        prop_assert!(g(&x.add(&y)).congruent(&g(&x).add(&g(&y))));
    }
}
