mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabforge::arith::divisors;
use stabforge::tower::{epsilon_alpha, FieldElem, FieldTower};
use stabforge::unit_classes::*;
use stabforge::Error;

fn params(p: u32, n: u32, alpha: u32, d: u64, u: i64) -> StabilizerParams {
    StabilizerParams { p, n, alpha, d, u }
}

#[test]
fn epsilon_not_a_pth_power_class_for_p3() {
    for alpha in [2u32, 3] {
        let depth = 3u32.pow(alpha) + 2;
        let t = FieldTower::new(3, 1, alpha, depth).unwrap();
        let q = FiltrationQuotient::new(&t, depth).unwrap();
        let span = subgroup_span(&q, 3, true).unwrap();
        let eps = epsilon_alpha(&t, depth).unwrap();
        for u in [1i64, 2, 4] {
            let x = eps.mul(&FieldElem::from_int(&t, u).inv().unwrap());
            assert!(!membership(&x, &span).unwrap(), "alpha={alpha} u={u}");
        }
    }
}

#[test]
fn epsilon_not_a_fourth_power_class_for_p2() {
    for alpha in [3u32, 4] {
        let t = FieldTower::new(2, 1, alpha, 40).unwrap();
        let depth = required_depth(&t, 4);
        let q = FiltrationQuotient::new(&t, depth).unwrap();
        let span = subgroup_span(&q, 4, true).unwrap();
        let eps = epsilon_alpha(&t, depth).unwrap();
        assert!(!membership(&eps, &span).unwrap(), "alpha={alpha}");
        for u in [3i64, 5, 7] {
            let x = eps.mul(&FieldElem::from_int(&t, u).inv().unwrap());
            assert!(!membership(&x, &span).unwrap(), "alpha={alpha} u={u}");
        }
    }
}

#[test]
fn closing_depth_for_fourth_powers_exceeds_two_to_alpha_plus_two() {
    for alpha in [3u32, 4] {
        let t = FieldTower::new(2, 1, alpha, 60).unwrap();
        let boundary = 3 * (1 << (alpha - 1)) + 1;
        assert!(closes_at(&t, 4, true, boundary).unwrap());
        assert!(!closes_at(&t, 4, true, boundary - 1).unwrap());
        assert!(!closes_at(&t, 4, true, (1 << alpha) + 2).unwrap());
    }
}

#[test]
fn closing_depth_bound_is_sharp_for_odd_p() {
    let t = FieldTower::new(3, 1, 2, 20).unwrap();
    assert!(closes_at(&t, 3, true, 10).unwrap());
    assert!(!closes_at(&t, 3, true, 9).unwrap());
}

#[test]
fn products_of_generators_are_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (f, alpha) in [(1usize, 2u32), (2, 1)] {
        let depth = 3u32.pow(alpha) + 2;
        let t = FieldTower::new(3, f, alpha, depth).unwrap();
        let q = FiltrationQuotient::new(&t, depth).unwrap();
        let span = subgroup_span(&q, 3, true).unwrap();
        let zeta = FieldElem::zeta(&t).with_prec(depth);
        for _ in 0..100 {
            let y = common::random_unit(&t, &mut rng, depth);
            let h = rng.gen_range(0..9);
            let x = zeta.pow(h).mul(&y.pow(3));
            assert!(membership(&x, &span).unwrap());
        }
    }
}

#[test]
fn leading_digit_obstruction() {
    for (p, alpha) in [(3u32, 2u32), (5, 1), (3, 1)] {
        let depth = p.pow(alpha) + 2;
        let t = FieldTower::new(p, 1, alpha, depth).unwrap();
        let q = FiltrationQuotient::new(&t, depth).unwrap();
        let span = subgroup_span(&q, p as u64, true).unwrap();
        for j in 2..p.pow(alpha) {
            if j % p == 0 {
                continue;
            }
            let x = q.level_generator(j, 0);
            assert!(!membership(&x, &span).unwrap(), "p={p} alpha={alpha} j={j}");
        }
        assert!(membership(&q.level_generator(1, 0), &span).unwrap());
    }
}

#[test]
fn membership_matches_closure_enumeration() {
    let n = 10;
    let t = FieldTower::new(3, 1, 2, 11).unwrap();
    let q = FiltrationQuotient::new(&t, 11).unwrap();
    let span = subgroup_span(&q, 3, true).unwrap();
    let q10 = FiltrationQuotient::new(&t, n).unwrap();
    let mut gens = vec![FieldElem::zeta(&t)];
    gens.extend(q10.level_generators().iter().map(|g| g.pow(3)));
    let all = common::enumerate_span(&gens, n);
    assert_eq!(all.len(), 3usize.pow(span.log_order() as u32 - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let x = common::principal(&t, &mut rng, 11);
        let expected = all.contains(&common::span_key(&x, n));
        assert_eq!(membership(&x, &span).unwrap(), expected);
    }
}

#[test]
fn span_invariants() {
    let t = FieldTower::new(2, 2, 2, 20).unwrap();
    let depth = required_depth(&t, 4);
    let q = FiltrationQuotient::new(&t, depth).unwrap();
    let span = subgroup_span(&q, 4, true).unwrap();
    let pivots = span.pivots();
    assert!(pivots.windows(2).all(|w| w[0] < w[1]));
    for g in span.generators() {
        assert_eq!(g.residue(), vec![1, 0]);
        assert!(membership(&g, &span).unwrap());
    }
    let again = SubgroupEchelon::from_generators(&q, span.generators()).unwrap();
    assert_eq!(again.pivots(), pivots);
}

#[test]
fn membership_needs_precision() {
    let t = FieldTower::new(3, 1, 2, 11).unwrap();
    let q = FiltrationQuotient::new(&t, 11).unwrap();
    let span = subgroup_span(&q, 3, true).unwrap();
    let x = FieldElem::zeta(&t).with_prec(5);
    assert!(matches!(membership(&x, &span), Err(Error::InsufficientPrecision { .. })));
}

#[test]
fn epsilon_examples() {
    for u in [1i64, 2] {
        assert!(epsilon_test(params(3, 2, 1, 2, u), 2).unwrap());
    }
    assert!(epsilon_test(params(2, 2, 2, 1, 1), 2).unwrap());
    assert!(epsilon_test(params(2, 2, 2, 1, -1), 2).unwrap());
    assert!(epsilon_test(params(2, 2, 2, 1, 7), 2).unwrap());
    for u in [1i64, 2, 4] {
        assert!(!epsilon_test(params(3, 6, 2, 2, u), 3).unwrap());
    }
}

#[test]
fn epsilon_report_flags_non_maximal_torsion() {
    // F_0 = C_3 × C_1 in Q_3(ζ_3): the residue −1 of ε_1 is not a square times ζ_1.
    let r = epsilon_report(params(3, 2, 1, 1, 1), 2).unwrap();
    assert!(!r.holds);
    assert!(r.holds_mu_maximal);
    assert!(r.differs_from_mu_maximal);
    assert!(!r.mu_maximal);
}

#[test]
fn epsilon_rejects_large_towers() {
    let r = epsilon_test(params(2, 7, 1, 127, 1), 1);
    assert!(matches!(r, Err(Error::UnsupportedParameters(_))));
}

fn parameter_grid() -> Vec<StabilizerParams> {
    let mut out = Vec::new();
    for (p, n) in [(2u32, 2u32), (2, 4), (2, 6), (3, 2), (3, 4), (3, 6), (5, 4)] {
        for alpha in 1..=3u32 {
            let phi = stabforge::arith::phi_prime_power(p as u64, alpha);
            if !(n as u64).is_multiple_of(phi) {
                continue;
            }
            let n_alpha = n as u64 / phi;
            let top = (p as u64).pow(n_alpha as u32) - 1;
            for d in divisors(top) {
                for u in [1i64, -1, 2, 3, 5, 7] {
                    let x = params(p, n, alpha, d, u);
                    if x.validate().is_ok() && x.residue_degree() as usize <= 2 {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn r1_max_agrees_with_epsilon_test() {
    for x in parameter_grid() {
        let v = r1_max(x).unwrap();
        let e = x.ramification();
        let computed: Vec<u64> = divisors(e).into_iter().filter(|&r| epsilon_test(x, r).unwrap()).collect();
        assert_eq!(v.admissible, computed, "{x:?}");
        assert_eq!(*computed.last().unwrap(), v.maximal);
    }
}

#[test]
fn r1_branches_partition_inputs() {
    let tags = [
        "unramified",
        "p_odd_full_torsion",
        "p_odd_partial_torsion",
        "p2_alpha_at_most_1",
        "p2_u_pm1_mod8",
        "p2_zeta3_in_f0",
        "p2_u_pm3_mod8_no_zeta3",
    ];
    for x in parameter_grid() {
        let v = r1_max(x).unwrap();
        assert_eq!(tags.iter().filter(|&&t| t == v.branch).count(), 1);
        assert!(v.admissible.iter().all(|r| v.maximal.is_multiple_of(*r)));
    }
}

#[test]
fn r2_examples() {
    let v = r2_admissible(params(3, 2, 1, 2, 1), 2).unwrap();
    assert_eq!((v.admissible.clone(), v.extension_counts.clone()), (vec![1], vec![(1, 1)]));
    let v = r2_admissible(params(3, 6, 0, 26, 1), 1).unwrap();
    assert_eq!(v.admissible, divisors(2));
    assert_eq!(v.field_degree, 3);
    let v = r2_admissible(params(2, 4, 2, 3, 1), 2).unwrap();
    assert_eq!(v.admissible, vec![1]);
    assert_eq!(v.field_degree, 4);
    assert!(r2_admissible(params(3, 2, 1, 2, 1), 3).is_err());
}

#[test]
fn r2_maximal_r1_gives_all_divisors() {
    for x in parameter_grid() {
        let r1 = r1_max(x).unwrap().maximal;
        if !(x.n as u64).is_multiple_of(x.field_degree()) || (x.p > 2 && !x.is_mu_maximal()) {
            continue;
        }
        let v = r2_admissible(x, r1).unwrap();
        assert_eq!(v.admissible, divisors(x.n as u64 / x.field_degree()), "{x:?}");
        assert!(v.exact);
    }
}

#[test]
fn radical_examples() {
    let t = FieldTower::new(2, 1, 2, 40).unwrap();
    let pi = FieldElem::pi(&t);
    assert!(radical_irreducible(&pi, 2).unwrap());
    assert!(!radical_irreducible(&FieldElem::from_int(&t, -4), 4).unwrap());
    let t = FieldTower::new(5, 2, 0, 10).unwrap();
    let a = FieldElem::from_int(&t, 5).mul(&FieldElem::omega(&t));
    for r in [2u64, 3, 4, 6] {
        assert!(radical_irreducible(&a, r).unwrap());
    }
    let t = FieldTower::new(3, 1, 1, 30).unwrap();
    let cube = FieldElem::zeta(&t).add(&pi_sq(&t)).pow(3);
    assert!(!radical_irreducible(&cube, 3).unwrap());
}

fn pi_sq(t: &Arc<FieldTower>) -> FieldElem {
    FieldElem::pi(t).pow(2)
}

#[test]
fn radical_matches_root_search() {
    let towers = [(2u32, 1usize, 2u32), (2, 2, 2), (2, 1, 3), (3, 1, 1), (3, 2, 1), (3, 1, 2), (5, 1, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        let (p, f, alpha) = towers[i % towers.len()];
        let t = FieldTower::new(p, f, alpha, 60).unwrap();
        let r = rng.gen_range(2..=4u64);
        let a = common::random_radicand(&t, &mut rng, r);
        let expected = common::radical_reducible_oracle(&a, r).expect("precision");
        assert_eq!(radical_irreducible(&a, r).unwrap(), !expected, "p={p} f={f} alpha={alpha} r={r} a={a}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn epsilon_test_is_divisor_monotone(idx in 0usize..1000) {
        let grid = parameter_grid();
        let x = grid[idx % grid.len()];
        let e = x.ramification();
        for r in divisors(e) {
            if epsilon_test(x, r).unwrap() {
                for s in divisors(r) {
                    prop_assert!(epsilon_test(x, s).unwrap());
                }
            }
        }
    }
}
