//! Small-integer helpers shared by the engines.

use num_integer::Integer;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(q, _)| q).collect()
}

/// All positive divisors of `n` in ascending order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factorize(n) {
        let len = out.len();
        let mut pw = 1;
        for _ in 0..e {
            pw *= q;
            for i in 0..len {
                out.push(out[i] * pw);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Exponent of `p` in `n`; `n` must be nonzero.
pub fn vp(mut n: u64, p: u64) -> u32 {
    assert!(n != 0, "vp of zero");
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Euler phi of p^alpha.
pub fn phi_prime_power(p: u64, alpha: u32) -> u64 {
    if alpha == 0 {
        1
    } else {
        (p - 1) * p.pow(alpha - 1)
    }
}

/// Multiplicative order of `a` modulo `m` (m ≥ 1, gcd(a, m) = 1).
pub fn mult_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let a = a % m;
    let mut x = a;
    let mut k = 1;
    while x != 1 {
        x = ((x as u128 * a as u128) % m as u128) as u64;
        k += 1;
        assert!(k <= m, "element not invertible modulo {m}");
    }
    k
}

/// Largest divisor of `n` coprime to `m`.
pub fn coprime_part(mut n: u64, m: u64) -> u64 {
    loop {
        let g = gcd(n, m);
        if g == 1 {
            return n;
        }
        n /= g;
    }
}

/// `base^exp mod m` for small values.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u128 % m as u128;
    let mut b = base as u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

/// p^k as u64, panicking on overflow.
pub fn upow(p: u64, k: u32) -> u64 {
    p.checked_pow(k).expect("integer overflow in prime power")
}
