//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Expected values are checked against the library and, where an independent
//! computation exists, against an oracle in this file. Two expected digit
//! lists disagree with exact arithmetic; those criteria print FAIL and the
//! run only succeeds if the library agrees with the oracle there.

mod common;

use std::collections::HashSet;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use stabforge::classifier::{maximal_in_gn, maximal_in_sn, quaternionic_extension, ClassificationInput};
use stabforge::cohomology::{cohomology, golden_suite, CycModule, Matrix};
use stabforge::division_order::{
    d4_p3_elements, d4_p3_report, embed_q8, order_check, parse_script, run_script, Order, OrderElem, OrderParams,
    Verdict, D4_P3_SCRIPT, Q8_SCRIPT,
};
use stabforge::tower::{
    change_rings, epsilon_alpha, q_alpha_coeffs, residue_scalar, signed_digit, FieldElem, FieldTower,
};
use stabforge::unit_classes::{
    epsilon_test, membership, radical_irreducible, subgroup_span, FiltrationQuotient, StabilizerParams,
};

/// Z[X]/(Q(X)) with Q(X) = Φ_{p^α}(X + 1), so that X is the uniformizer π.
struct Cyclo {
    p: BigInt,
    /// Coefficients of Q, constant term first; Q is monic of degree φ(p^α).
    q: Vec<BigInt>,
}

impl Cyclo {
    /// Φ_{p^α}(X + 1) = Σ_{j<p} (X + 1)^{j p^{α−1}}, expanded with Pascal rows.
    fn new(p: u32, alpha: u32) -> Cyclo {
        let step = (p as usize).pow(alpha - 1);
        let deg = step * (p as usize - 1);
        let mut row = vec![BigInt::from(1)];
        let mut q = vec![BigInt::zero(); deg + 1];
        for k in 0..=deg {
            if k % step == 0 {
                for (o, r) in q.iter_mut().zip(&row) {
                    *o += r;
                }
            }
            let mut next = vec![BigInt::zero(); row.len() + 1];
            for (i, r) in row.iter().enumerate() {
                next[i] += r;
                next[i + 1] += r;
            }
            row = next;
        }
        Cyclo { p: BigInt::from(p), q }
    }

    fn phi(&self) -> usize {
        self.q.len() - 1
    }

    fn reduce(&self, mut c: Vec<BigInt>) -> Vec<BigInt> {
        let phi = self.phi();
        for i in (phi..c.len()).rev() {
            let lead = std::mem::take(&mut c[i]);
            if lead.is_zero() {
                continue;
            }
            for j in 0..phi {
                c[i - phi + j] -= &lead * &self.q[j];
            }
        }
        c.resize(phi, BigInt::zero());
        c
    }

    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); a.len() + b.len()];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        self.reduce(c)
    }

    fn pow(&self, a: &[BigInt], k: u32) -> Vec<BigInt> {
        (0..k).fold(self.reduce(vec![BigInt::from(1)]), |acc, _| self.mul(&acc, a))
    }

    /// c / X for reduced c with p | c_0, using p = −X(q_1 + q_2 X + … + X^{φ−1}).
    fn div_x(&self, c: &[BigInt]) -> Option<Vec<BigInt>> {
        let (m, r) = c[0].div_rem(&self.p);
        if !r.is_zero() {
            return None;
        }
        let phi = self.phi();
        Some((0..phi).map(|i| c.get(i + 1).cloned().unwrap_or_default() - &m * &self.q[i + 1]).collect())
    }

    fn valuation_at_least(&self, c: &[BigInt], n: u32) -> bool {
        let mut c = self.reduce(c.to_vec());
        for _ in 0..n {
            if c.iter().all(Zero::is_zero) {
                return true;
            }
            match self.div_x(&c) {
                Some(next) => c = next,
                None => return false,
            }
        }
        true
    }

    /// First `n` π-adic digits with Teichmüller representatives; p ∈ {2, 3}
    /// so that these are 0, ±1.
    fn digits(&self, c: &[BigInt], n: u32) -> Vec<i64> {
        assert!(self.p <= BigInt::from(3));
        let mut c = self.reduce(c.to_vec());
        let mut out = Vec::new();
        for _ in 0..n {
            let r = c[0].mod_floor(&self.p);
            let d = if r.is_zero() {
                0
            } else if r == BigInt::from(1) {
                1
            } else {
                -1
            };
            c[0] -= d;
            out.push(d);
            c = self.div_x(&c).expect("digit removed");
        }
        out
    }

    /// −ε_α = −π^φ/p = Σ_{i<φ} (q_i/p) π^i.
    fn minus_epsilon(&self) -> Vec<BigInt> {
        self.q[..self.phi()].iter().map(|x| x / &self.p).collect()
    }
}

fn int(z: i64) -> Vec<BigInt> {
    vec![BigInt::from(z)]
}

fn tower(p: u32, alpha: u32, prec: u32) -> Arc<FieldTower> {
    FieldTower::new(p, 1, alpha, prec).unwrap()
}

fn signed_digits(x: &FieldElem, n: u32) -> Vec<i64> {
    let p = x.tower().p();
    x.pi_digits(n).unwrap().iter().map(|d| signed_digit(residue_scalar(d), p)).collect()
}

fn sparse(n: u32, terms: &[(usize, i64)]) -> Vec<i64> {
    let mut v = vec![0; n as usize];
    for &(i, c) in terms {
        v[i] = c;
    }
    v
}

fn first_difference(a: &[i64], b: &[i64]) -> Option<usize> {
    a.iter().zip(b).position(|(x, y)| x != y)
}

/// Result of one criterion.
struct Outcome {
    pass: bool,
    /// The library is consistent with every oracle even if `pass` is false.
    consistent: bool,
    detail: String,
}

impl Outcome {
    fn from_checks(checks: Vec<(bool, String)>) -> Outcome {
        let failed: Vec<String> = checks.into_iter().filter(|(ok, _)| !ok).map(|(_, m)| m).collect();
        Outcome { pass: failed.is_empty(), consistent: failed.is_empty(), detail: failed.join("; ") }
    }
}

/// Signed π-adic expansion of −ε_α for p = 3 against an expected digit list.
fn minus_epsilon_p3(alpha: u32, n: u32, expected: &[i64]) -> Outcome {
    let t = tower(3, alpha, n);
    let lib = signed_digits(&epsilon_alpha(&t, n).unwrap().neg(), n);
    let c = Cyclo::new(3, alpha);
    let oracle = c.digits(&c.minus_epsilon(), n);
    let consistent = lib == oracle;
    match first_difference(&lib, expected) {
        None => Outcome { pass: consistent, consistent, detail: String::new() },
        Some(i) => Outcome {
            pass: false,
            consistent,
            detail: format!(
                "expected digit {} at π^{i}, exact value {} (library {}agrees with the independent oracle: {lib:?})",
                expected[i],
                lib[i],
                if consistent { "" } else { "dis" }
            ),
        },
    }
}

fn criterion_1() -> Outcome {
    minus_epsilon_p3(2, 10, &[1, 0, 0, 1, -1, -1, -1, -1, 1, 1])
}

fn criterion_2() -> Outcome {
    let expected = sparse(28, &[(0, 1), (9, 1), (12, -1), (15, -1), (18, -1), (21, -1), (24, 1), (27, 1)]);
    minus_epsilon_p3(3, 28, &expected)
}

fn criterion_3() -> Outcome {
    let mut checks = Vec::new();
    let want = sparse(8, &[(0, 1), (2, 1), (4, 1), (5, 1), (6, 1)]);
    let lib = signed_digits(&epsilon_alpha(&tower(2, 3, 8), 8).unwrap(), 8);
    let c = Cyclo::new(2, 3);
    let oracle: Vec<i64> = c.digits(&c.minus_epsilon().iter().map(|x| -x).collect::<Vec<_>>(), 8);
    checks.push((lib == want && oracle == want, format!("ε_3 digits {lib:?}, oracle {oracle:?}")));
    for alpha in 2..=4u32 {
        let phi = 1usize << (alpha - 1);
        let n = 1u32 << alpha;
        let want = sparse(n, &[(phi, 1), (phi + (1 << (alpha - 2)), 1)]);
        let lib = signed_digits(&FieldElem::from_int(&tower(2, alpha, n), 2), n);
        let oracle = Cyclo::new(2, alpha).digits(&int(2), n);
        checks.push((lib == want && oracle == want, format!("α={alpha}: digits of 2 {lib:?}, oracle {oracle:?}")));
    }
    Outcome::from_checks(checks)
}

fn criterion_4() -> Outcome {
    let mut checks = Vec::new();
    for p in [3u32, 5] {
        let alpha = 2;
        let pa = p.pow(alpha);
        let phi = (p - 1) * p;
        let n = pa + 1;
        let half = (p as i64 - 1) / 2;
        let t = tower(p, alpha, n);
        let pi = FieldElem::pi(&t).with_prec(n);
        let rhs = pi.pow(pa as u64).scale(half).sub(&pi.pow(phi as u64));
        let lib = FieldElem::from_int(&t, p as i64).with_prec(n).sub(&rhs).pi_valuation().is_none();
        let c = Cyclo::new(p, alpha);
        let x = [BigInt::zero(), BigInt::from(1)];
        let mut diff = c.reduce(int(p as i64));
        let xpa = c.pow(&x, pa);
        let xphi = c.pow(&x, phi);
        for i in 0..diff.len() {
            diff[i] += &xphi[i] - &xpa[i] * half;
        }
        let oracle = c.valuation_at_least(&diff, n);
        checks.push((lib && oracle, format!("p={p}: library {lib}, oracle {oracle}")));
    }
    Outcome::from_checks(checks)
}

fn criterion_5() -> Outcome {
    let mut checks = Vec::new();
    for p in [3u32, 5, 7] {
        let a = q_alpha_coeffs(p, 2);
        let oracle = Cyclo::new(p, 2).q;
        checks.push((a == oracle, format!("p={p}: coefficients differ from the binomial expansion")));
        let p2 = BigInt::from(p * p);
        let pu = p as usize;
        let lead = &a[(pu - 2) * pu + 1];
        checks.push((((lead + p) % &p2).is_zero(), format!("p={p}: a_(p-2)p+1 = {lead} is not -p mod p^2")));
        for r in 0..pu - 2 {
            for j in 1..pu {
                let x = &a[pu * r + j];
                checks.push(((x % &p2).is_zero(), format!("p={p}: a_{} = {x} is not 0 mod p^2", pu * r + j)));
            }
        }
    }
    Outcome::from_checks(checks)
}

fn criterion_6() -> Outcome {
    let mut checks = Vec::new();
    for (p, alpha) in [(3u32, 2u32), (2, 3)] {
        let bound = p.pow(alpha + 1) + 1;
        let lo = tower(p, alpha, bound);
        let hi = tower(p, alpha + 1, bound);
        let lifted = change_rings(&epsilon_alpha(&lo, bound / p + 1).unwrap(), &hi).unwrap();
        let target = epsilon_alpha(&hi, bound).unwrap();
        let lib = lifted.sub(&target).with_prec(bound).pi_valuation().is_none();
        // Oracle: substitute π_α = (1 + π_{α+1})^p − 1 into −ε_α.
        let (c_lo, c_hi) = (Cyclo::new(p, alpha), Cyclo::new(p, alpha + 1));
        let y = [BigInt::from(1), BigInt::from(1)];
        let mut sub = c_hi.pow(&y, p);
        sub[0] -= 1;
        let mut image = vec![BigInt::zero(); c_hi.phi()];
        let mut power = c_hi.reduce(int(1));
        for coeff in c_lo.minus_epsilon() {
            for (o, x) in image.iter_mut().zip(&power) {
                *o += &coeff * x;
            }
            power = c_hi.mul(&power, &sub);
        }
        let diff: Vec<BigInt> = image.iter().zip(c_hi.minus_epsilon()).map(|(a, b)| a - b).collect();
        let oracle = c_hi.valuation_at_least(&diff, bound);
        checks.push((lib && oracle, format!("({p}, {alpha}): library {lib}, oracle {oracle}")));
    }
    Outcome::from_checks(checks)
}

fn criterion_7() -> Outcome {
    let mut checks = Vec::new();
    let budget = Duration::from_secs(10);
    let timed = |checks: &mut Vec<(bool, String)>, name: String, f: &dyn Fn() -> bool| {
        let start = Instant::now();
        let ok = f();
        let dt = start.elapsed();
        checks.push((ok && dt < budget, format!("{name}: {ok} in {dt:.2?}")));
    };
    for alpha in [2u32, 3] {
        timed(&mut checks, format!("p=3 α={alpha} ε/u not in span"), &|| {
            let depth = 3u32.pow(alpha) + 2;
            let t = tower(3, alpha, depth);
            let q = FiltrationQuotient::new(&t, depth).unwrap();
            let span = subgroup_span(&q, 3, true).unwrap();
            let eps = epsilon_alpha(&t, depth).unwrap();
            [1i64, 2, 4].iter().all(|&u| {
                let x = eps.mul(&FieldElem::from_int(&t, u).inv().unwrap());
                !membership(&x, &span).unwrap()
            })
        });
    }
    for alpha in [3u32, 4] {
        timed(&mut checks, format!("p=2 α={alpha} ε not in fourth-power span"), &|| {
            let t = tower(2, alpha, 40);
            let depth = stabforge::unit_classes::required_depth(&t, 4);
            let q = FiltrationQuotient::new(&t, depth).unwrap();
            let span = subgroup_span(&q, 4, true).unwrap();
            !membership(&epsilon_alpha(&t, depth).unwrap(), &span).unwrap()
        });
    }
    let odd = [(3u32, 2u32, 1u32, 2u64), (3, 6, 2, 2), (5, 4, 1, 4), (7, 6, 1, 6)];
    for (p, n, alpha, d) in odd {
        for u in [1i64, -1] {
            timed(&mut checks, format!("epsilon_test p={p} n={n} α={alpha} u={u} r1={}", p - 1), &|| {
                epsilon_test(StabilizerParams { p, n, alpha, d, u }, p as u64 - 1).unwrap()
            });
        }
    }
    for (n, alpha, d) in [(2u32, 2u32, 1u64), (4, 2, 3)] {
        for u in [1i64, -1, 7, 9, 15] {
            timed(&mut checks, format!("epsilon_test p=2 n={n} α={alpha} u={u} r1=2"), &|| {
                epsilon_test(StabilizerParams { p: 2, n, alpha, d, u }, 2).unwrap()
            });
        }
    }
    Outcome::from_checks(checks)
}

fn holds(a: &OrderElem, b: &OrderElem) -> bool {
    stabforge::division_order::compare(a, b) == Verdict::Holds
}

fn criterion_8() -> Outcome {
    let mut checks = Vec::new();
    let budget = Duration::from_secs(1);

    let start = Instant::now();
    let o = Order::new(OrderParams::new(2, 2, 1)).unwrap();
    let (i, j, k) = embed_q8(&o).unwrap();
    let int = |z| OrderElem::from_int(&o, z);
    let (one, m1, w) = (int(1), int(-1), OrderElem::omega(&o));
    let one_i = one.add(&i);
    let q8 = [
        [&i, &j, &k].iter().all(|x| holds(&x.pow(2).unwrap(), &m1)),
        holds(&i.mul(&j), &k),
        holds(&j.mul(&k), &i),
        holds(&k.mul(&i), &j),
        holds(&j.mul(&i), &k.neg()),
        holds(&w.pow(3).unwrap(), &one),
        holds(&w.pow(2).unwrap().conj(&i).unwrap(), &k.neg()),
        holds(&w.conj(&j).unwrap(), &k.neg()),
        holds(&one_i.conj(&j).unwrap(), &k),
        holds(&one_i.pow(2).unwrap(), &int(2).mul(&i)),
    ];
    let script = run_script(&parse_script(Q8_SCRIPT).unwrap()).unwrap();
    let dt = start.elapsed();
    checks.push((q8.iter().all(|&b| b), format!("Q_8/T_24 relations {q8:?}")));
    checks.push((script.all_hold, "Q_8 relation script".into()));
    checks.push((dt < budget, format!("Q_8 suite took {dt:.2?}")));

    let start = Instant::now();
    let o = Order::new(OrderParams::new(3, 4, 1)).unwrap();
    let (x, z, zeta, tau) = d4_p3_elements(&o).unwrap();
    let report = d4_p3_report(&o).unwrap();
    let d4 = [
        holds(&z.pow(2).unwrap(), &OrderElem::from_int(&o, -3)),
        holds(&zeta.pow(3).unwrap(), &OrderElem::one(&o)),
        order_check(&zeta, 3).unwrap(),
        order_check(&tau, 16).unwrap(),
        report.tau_conjugation == Verdict::Holds,
        report.x_conjugates_tau_to_cube == Verdict::Holds,
        holds(&x.pow(2).unwrap(), &z),
    ];
    let script = run_script(&parse_script(D4_P3_SCRIPT).unwrap()).unwrap();
    let dt = start.elapsed();
    checks.push((d4.iter().all(|&b| b), format!("D_4 at p=3 relations {d4:?}")));
    checks.push((script.all_hold, "D_4 relation script".into()));
    checks.push((dt < budget, format!("D_4 suite took {dt:.2?}")));
    Outcome::from_checks(checks)
}

fn labels(r: &stabforge::classifier::ClassificationReport) -> Vec<String> {
    let mut v = r.labels();
    v.sort();
    v
}

fn sorted(xs: &[&str]) -> Vec<String> {
    let mut v: Vec<String> = xs.iter().map(|s| s.to_string()).collect();
    v.sort();
    v
}

fn criterion_9() -> Outcome {
    let mut checks = Vec::new();
    for (p, u) in [(3u32, 1i64), (3, 2), (2, 1), (2, 3), (2, 5), (2, 7)] {
        let path = format!("{}/tests/golden/gn_p{p}_n2_u{u}.json", env!("CARGO_MANIFEST_DIR"));
        let golden = std::fs::read_to_string(&path).unwrap();
        let got = maximal_in_gn(&ClassificationInput::new(p, 2, u).unwrap()).unwrap().to_json() + "\n";
        checks.push((got == golden, format!("G_2 table p={p} u={u} differs from {path}")));
    }
    let sn: &[(u32, u32, &[&str])] = &[
        (3, 2, &["C_8", "C_3 ⋊ C_4"]),
        (3, 4, &["C_80", "C_3 ⋊ C_16"]),
        (3, 6, &["C_728", "C_3 ⋊ C_52", "C_9 ⋊ C_4"]),
        (5, 4, &["C_624", "C_5 ⋊ C_16"]),
        (2, 2, &["T_24"]),
        (2, 4, &["C_30", "C_12", "C_8"]),
        (2, 6, &["C_126", "T_24 × C_7"]),
    ];
    for (p, n, want) in sn {
        let got = labels(&maximal_in_sn(*p, *n).unwrap());
        checks.push((got == sorted(want), format!("S_n p={p} n={n}: {got:?}")));
    }
    for n in [2u32, 6] {
        let m = n as u64 / 2;
        for u in [1i64, 3, 5, 7] {
            let q = quaternionic_extension(2, n, u).unwrap();
            let ok = q.exists == (u == 1 || u == 7) && q.order == 48 * m * ((1 << m) - 1);
            checks.push((ok, format!("quaternionic extension n={n} u={u}: {q:?}")));
        }
    }
    Outcome::from_checks(checks)
}

/// A random automorphism of ⊕ Z/d_i of finite order, with that order.
fn random_action(rng: &mut ChaCha8Rng, d: &[u64]) -> Option<(Vec<Vec<i64>>, u64)> {
    let k = d.len();
    let t: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| (d[i] / d[i].gcd(&d[j])) as i64 * rng.gen_range(0..d[i] as i64)).collect())
        .collect();
    let apply = |x: &[i64]| -> Vec<i64> {
        (0..k).map(|i| (0..k).map(|j| t[i][j] * x[j]).sum::<i64>().rem_euclid(d[i] as i64)).collect()
    };
    let basis: Vec<Vec<i64>> = (0..k).map(|j| (0..k).map(|i| (i == j) as i64).collect()).collect();
    let mut cur = basis.clone();
    for r in 1..=64 {
        cur = cur.iter().map(|x| apply(x)).collect();
        if cur == basis {
            return Some((t, r));
        }
    }
    None
}

/// |ker N / im(1 − t)| and |ker(1 − t) / im N| by enumeration.
fn brute_force_orders(d: &[u64], t: &[Vec<i64>], r: u64) -> (usize, usize) {
    let k = d.len();
    let mut all: Vec<Vec<i64>> = vec![vec![]];
    for &di in d {
        all = all.into_iter().flat_map(|v| (0..di as i64).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    let apply = |x: &[i64]| -> Vec<i64> {
        (0..k).map(|i| (0..k).map(|j| t[i][j] * x[j]).sum::<i64>().rem_euclid(d[i] as i64)).collect()
    };
    let sub = |x: &[i64], y: &[i64]| -> Vec<i64> { (0..k).map(|i| (x[i] - y[i]).rem_euclid(d[i] as i64)).collect() };
    let norm = |x: &[i64]| -> Vec<i64> {
        let (mut acc, mut y) = (vec![0; k], x.to_vec());
        for _ in 0..r {
            acc = (0..k).map(|i| (acc[i] + y[i]).rem_euclid(d[i] as i64)).collect();
            y = apply(&y);
        }
        acc
    };
    let zero = vec![0; k];
    let ker_1t = all.iter().filter(|x| sub(x, &apply(x)) == zero).count();
    let ker_n = all.iter().filter(|x| norm(x) == zero).count();
    let im_1t: HashSet<Vec<i64>> = all.iter().map(|x| sub(x, &apply(x))).collect();
    let im_n: HashSet<Vec<i64>> = all.iter().map(|x| norm(x)).collect();
    (ker_n / im_1t.len(), ker_1t / im_n.len())
}

fn criterion_10() -> Outcome {
    let mut checks = Vec::new();
    let golden = golden_suite();
    for c in golden.cases.iter().filter(|c| !c.matches) {
        checks.push((false, format!("golden case {} ({}) does not match", c.name, c.parameters)));
    }
    checks.push((golden.all_match, format!("{} golden cases", golden.cases.len())));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut done = 0;
    while done < 100 {
        let k = rng.gen_range(1..=3);
        let d: Vec<u64> = (0..k).map(|_| rng.gen_range(2..=12)).collect();
        if d.iter().product::<u64>() > 600 {
            continue;
        }
        let Some((t, ord)) = random_action(&mut rng, &d) else { continue };
        let r = ord * rng.gen_range(1..=4);
        let m = CycModule::new(0, &d, Matrix::from_rows(&t).unwrap(), r).unwrap();
        let report = cohomology(&m);
        let (odd, even) = (report.h_odd.torsion_order(), report.h_even.torsion_order());
        let (bf_odd, bf_even) = brute_force_orders(&d, &t, r);
        let ok = odd == even && odd.to_usize() == Some(bf_odd) && even.to_usize() == Some(bf_even);
        checks.push((
            ok,
            format!("d={d:?} t={t:?} r={r}: |H^odd|={odd} |H^even|={even}, enumeration {bf_odd}/{bf_even}"),
        ));
        done += 1;
    }
    Outcome::from_checks(checks)
}

fn criterion_11() -> Outcome {
    let mut checks = Vec::new();
    // (p, f, α) with e·f ≤ 8.
    let towers = [(2u32, 1usize, 2u32), (2, 2, 2), (2, 1, 3), (3, 1, 1), (3, 2, 1), (3, 1, 2), (5, 1, 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..50 {
        let (p, f, alpha) = towers[i % towers.len()];
        let t = FieldTower::new(p, f, alpha, 60).unwrap();
        let r = rng.gen_range(2..=4u64);
        let a = common::random_radicand(&t, &mut rng, r);
        let expected = common::radical_reducible_oracle(&a, r).map(|reducible| !reducible);
        let got = radical_irreducible(&a, r).ok();
        checks
            .push((got.is_some() && got == expected, format!("p={p} f={f} α={alpha} r={r}: {got:?} vs {expected:?}")));
    }
    let n = 10;
    let t = tower(3, 2, 11);
    let span = subgroup_span(&FiltrationQuotient::new(&t, 11).unwrap(), 3, true).unwrap();
    let mut gens = vec![FieldElem::zeta(&t)];
    gens.extend(FiltrationQuotient::new(&t, n).unwrap().level_generators().iter().map(|g| g.pow(3)));
    let all = common::enumerate_span(&gens, n);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let x = common::principal(&t, &mut rng, 11);
        let expected = all.contains(&common::span_key(&x, n));
        let got = membership(&x, &span).unwrap();
        checks.push((got == expected, format!("membership of {x}: {got} vs enumeration {expected}")));
    }
    Outcome::from_checks(checks)
}

/// Name, check and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("π-adic expansion of −ε_2, p=3, mod π^10", criterion_1, 1),
        ("π-adic expansion of −ε_3, p=3, mod π^28", criterion_2, 5),
        ("p=2 expansions of ε_3 and of 2", criterion_3, 5),
        ("congruence for p in Q_p(ζ_{p^2}), p=3,5", criterion_4, 5),
        ("second-level cyclotomic coefficients mod p^2", criterion_5, 1),
        ("change of rings carries ε_α to ε_{α+1}", criterion_6, 5),
        ("power-class verdicts and epsilon_test", criterion_7, 120),
        ("relation suites in the maximal order", criterion_8, 2),
        ("classification tables", criterion_9, 30),
        ("cohomology golden suite and Herbrand quotient", criterion_10, 5),
        ("radical and membership oracles", criterion_11, 60),
    ];
    let mut ok = true;
    let mut passed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let dt = start.elapsed();
        let in_time = dt <= Duration::from_secs(*budget);
        let pass = outcome.pass && in_time;
        passed += pass as usize;
        println!("{} {:>2}  {name}  ({:.2} s)", if pass { "PASS" } else { "FAIL" }, i + 1, dt.as_secs_f64());
        if !outcome.detail.is_empty() {
            println!("        {}", outcome.detail);
        }
        if !in_time {
            println!("        exceeded the {budget} s budget");
        }
        // A mismatch against a stated digit list is tolerated only when the
        // library agrees with the independent oracle.
        let documented = matches!(i + 1, 1 | 2) && outcome.consistent;
        if !(pass || documented && in_time) {
            ok = false;
        }
    }
    println!("{passed} of {} criteria pass", criteria.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
