//! Truncated arithmetic in Z_p with absolute precision.
//!
//! A [`PadicInt`] is a residue modulo p^N stored in canonical form. Results of
//! binary operations carry the smaller of the two operand precisions.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::error::{Error, Result};

/// p^k as a big integer.
pub fn prime_power(p: u32, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// Reduce a signed integer into [0, m).
pub fn reduce_signed(z: &BigInt, m: &BigUint) -> BigUint {
    let m = BigInt::from(m.clone());
    let r = z.mod_floor(&m);
    r.to_biguint().expect("mod_floor is non-negative")
}

/// An element of Z_p known modulo p^N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicInt {
    p: u32,
    prec: u32,
    value: BigUint,
}

/// A p-adic integer whose lowest digit is nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PadicUnit(PadicInt);

fn check_params(p: u32, prec: u32) -> Result<()> {
    if !is_prime(p as u64) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    if prec == 0 {
        return Err(Error::InvalidInput("precision must be at least 1".into()));
    }
    Ok(())
}

impl PadicInt {
    /// `z mod p^prec`.
    pub fn from_integer(z: i64, p: u32, prec: u32) -> Result<Self> {
        Self::from_bigint(&BigInt::from(z), p, prec)
    }

    pub fn from_bigint(z: &BigInt, p: u32, prec: u32) -> Result<Self> {
        check_params(p, prec)?;
        let value = reduce_signed(z, &prime_power(p, prec));
        Ok(PadicInt { p, prec, value })
    }

    /// Build from base-p digits, lowest first; the precision is the digit count.
    pub fn from_digits(p: u32, digits: &[u32]) -> Result<Self> {
        check_params(p, digits.len() as u32)?;
        let mut value = BigUint::zero();
        for &d in digits.iter().rev() {
            if d >= p {
                return Err(Error::InvalidInput(format!("digit {d} out of range for p = {p}")));
            }
            value = value * p + d;
        }
        Ok(PadicInt { p, prec: digits.len() as u32, value })
    }

    pub(crate) fn from_raw(p: u32, prec: u32, value: BigUint) -> Self {
        let m = prime_power(p, prec);
        PadicInt { p, prec, value: value % m }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Canonical representative in [0, p^N).
    pub fn value(&self) -> &BigUint {
        &self.value
    }

    /// Representative in (−p^N/2, p^N/2].
    pub fn signed_value(&self) -> BigInt {
        let m = prime_power(self.p, self.prec);
        let v = BigInt::from(self.value.clone());
        if &self.value * 2u32 > m {
            v - BigInt::from(m)
        } else {
            v
        }
    }

    /// Base-p digits, lowest first, exactly `precision` of them.
    pub fn digits(&self) -> Vec<u32> {
        let mut v = self.value.clone();
        (0..self.prec)
            .map(|_| {
                let (q, r) = v.div_rem(&BigUint::from(self.p));
                v = q;
                r.to_u32().expect("digit fits")
            })
            .collect()
    }

    pub fn modulus(&self) -> BigUint {
        prime_power(self.p, self.prec)
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, prec: u32) -> Result<Self> {
        if prec > self.prec {
            return Err(Error::InsufficientPrecision { needed: prec, available: self.prec });
        }
        check_params(self.p, prec)?;
        Ok(PadicInt::from_raw(self.p, prec, self.value.clone()))
    }

    fn common(&self, other: &Self) -> Result<(u32, BigUint)> {
        if self.p != other.p {
            return Err(Error::InvalidInput(format!("prime mismatch: {} vs {}", self.p, other.p)));
        }
        let prec = self.prec.min(other.prec);
        Ok((prec, prime_power(self.p, prec)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (prec, m) = self.common(other)?;
        Ok(PadicInt { p: self.p, prec, value: (&self.value + &other.value) % m })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (prec, m) = self.common(other)?;
        let a = &self.value % &m;
        let b = &other.value % &m;
        let value = if a >= b { a - b } else { &m - (b - a) } % &m;
        Ok(PadicInt { p: self.p, prec, value })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (prec, m) = self.common(other)?;
        Ok(PadicInt { p: self.p, prec, value: (&self.value * &other.value) % m })
    }

    pub fn neg(&self) -> Self {
        let m = self.modulus();
        PadicInt { p: self.p, prec: self.prec, value: (&m - &self.value) % &m }
    }

    pub fn pow(&self, e: u64) -> Self {
        let m = self.modulus();
        PadicInt { p: self.p, prec: self.prec, value: self.value.modpow(&BigUint::from(e), &m) }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        !(&self.value % self.p).is_zero()
    }

    /// p-adic valuation, or `None` when the value is zero at this precision.
    pub fn valuation(&self) -> Option<u32> {
        if self.value.is_zero() {
            return None;
        }
        let mut v = 0;
        let mut x = self.value.clone();
        while (&x % self.p).is_zero() {
            x /= self.p;
            v += 1;
        }
        Some(v)
    }

    pub fn invert(&self) -> Result<PadicUnit> {
        PadicUnit::new(self.clone())?.invert()
    }

    /// Divide by p, failing unless the lowest digit is zero; precision drops by one.
    pub fn exact_div_by_p(&self) -> Result<Self> {
        if !(&self.value % self.p).is_zero() {
            return Err(Error::InvalidInput("value is not divisible by p".into()));
        }
        if self.prec < 2 {
            return Err(Error::InsufficientPrecision { needed: 2, available: self.prec });
        }
        Ok(PadicInt { p: self.p, prec: self.prec - 1, value: &self.value / self.p })
    }

    pub fn one(p: u32, prec: u32) -> Result<Self> {
        Self::from_integer(1, p, prec)
    }
}

impl fmt::Display for PadicInt {
    /// Digit-list literal `p:P [d0,d1,...]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits: Vec<String> = self.digits().iter().map(|d| d.to_string()).collect();
        write!(f, "p:{} [{}]", self.p, digits.join(","))
    }
}

impl FromStr for PadicInt {
    type Err = Error;

    /// Parse the digit-list literal `p:P [d0,d1,...]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s.strip_prefix("p:").ok_or_else(|| Error::Parse(format!("expected 'p:P [digits]', got '{s}'")))?;
        let open = rest.find('[').ok_or_else(|| Error::Parse("missing '['".into()))?;
        let close = rest.rfind(']').ok_or_else(|| Error::Parse("missing ']'".into()))?;
        let p: u32 = rest[..open].trim().parse().map_err(|_| Error::Parse(format!("bad prime in '{s}'")))?;
        let digits = rest[open + 1..close]
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad digit '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        PadicInt::from_digits(p, &digits)
    }
}

impl Serialize for PadicInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PadicInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PadicUnit {
    pub fn new(x: PadicInt) -> Result<Self> {
        if x.is_unit() {
            Ok(PadicUnit(x))
        } else {
            Err(Error::NonUnit)
        }
    }

    pub fn from_integer(z: i64, p: u32, prec: u32) -> Result<Self> {
        Self::new(PadicInt::from_integer(z, p, prec)?)
    }

    pub fn as_int(&self) -> &PadicInt {
        &self.0
    }

    pub fn into_int(self) -> PadicInt {
        self.0
    }

    pub fn invert(&self) -> Result<PadicUnit> {
        let m = self.0.modulus();
        let inv = self.0.value.modinv(&m).ok_or(Error::NonUnit)?;
        Ok(PadicUnit(PadicInt { p: self.0.p, prec: self.0.prec, value: inv }))
    }

    pub fn mul(&self, other: &PadicUnit) -> Result<PadicUnit> {
        Ok(PadicUnit(self.0.mul(&other.0)?))
    }

    /// Residue mod p in [1, p).
    pub fn residue(&self) -> u32 {
        (&self.0.value % self.0.p).to_u32().expect("residue fits")
    }
}

impl std::ops::Deref for PadicUnit {
    type Target = PadicInt;
    fn deref(&self) -> &PadicInt {
        &self.0
    }
}

impl fmt::Display for PadicUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Teichmüller lift of a nonzero residue: the (p−1)-th root of unity ≡ c mod p.
pub fn teichmuller_lift(c: u32, p: u32, prec: u32) -> Result<PadicUnit> {
    check_params(p, prec)?;
    if c == 0 || c >= p {
        return Err(Error::InvalidInput(format!("residue {c} must lie in [1, {p})")));
    }
    let m = prime_power(p, prec);
    let e = BigUint::from(p);
    let mut x = BigUint::from(c);
    loop {
        let next = x.modpow(&e, &m);
        if next == x {
            break;
        }
        x = next;
    }
    Ok(PadicUnit(PadicInt { p, prec, value: x }))
}

/// Square root of a unit. Among the roots modulo p^N the one with the smallest
/// canonical representative in [0, p^N) is returned.
pub fn hensel_sqrt(u: &PadicUnit) -> Result<PadicUnit> {
    let p = u.p;
    let prec = u.prec;
    let m = prime_power(p, prec);
    if p == 2 {
        if prec < 3 {
            return Err(Error::InsufficientPrecision { needed: 3, available: prec });
        }
        if (&u.value % 8u32) != BigUint::one() {
            return Err(Error::NotASquare);
        }
        let mut r = BigUint::one();
        for k in 3..prec {
            let mk1 = BigUint::one() << (k + 1);
            if (&r * &r) % &mk1 != &u.value % &mk1 {
                r += BigUint::one() << (k - 1);
            }
        }
        let half = BigUint::one() << (prec - 1);
        let r = r % &m;
        let neg = (&m - &r) % &m;
        let best =
            [r.clone(), neg.clone(), (&r + &half) % &m, (&neg + &half) % &m].into_iter().min().expect("nonempty");
        return Ok(PadicUnit(PadicInt { p, prec, value: best }));
    }
    let res = u.residue() as u64;
    let p64 = p as u64;
    let r0 = (1..=(p64 - 1) / 2).find(|x| x * x % p64 == res).ok_or(Error::NotASquare)?;
    let mut r = BigUint::from(r0);
    let mut k = 1u32;
    while k < prec {
        k = (2 * k).min(prec);
        let mk = prime_power(p, k);
        let num = reduce_signed(&(BigInt::from(&r * &r) - BigInt::from(u.value.clone())), &mk);
        let den = (&r * 2u32).modinv(&mk).expect("2r is a unit for p odd");
        let corr = (num * den) % &mk;
        r = (&r + &mk - corr) % &mk;
    }
    let neg = (&m - &r) % &m;
    Ok(PadicUnit(PadicInt { p, prec, value: r.min(neg) }))
}

/// Split u = torsion · principal with torsion a root of unity in Z_p and
/// principal ≡ 1 mod p (mod 4 when p = 2).
pub fn unit_decompose(u: &PadicUnit) -> Result<(PadicUnit, PadicUnit)> {
    let p = u.p;
    let torsion = if p == 2 {
        let r4 = (&u.value % 4u32).to_u32().unwrap_or(0);
        let sign = if u.prec == 1 || r4 == 1 { 1 } else { -1 };
        PadicUnit::from_integer(sign, 2, u.prec)?
    } else {
        teichmuller_lift(u.residue(), p, u.prec)?
    };
    let principal = u.mul(&torsion.invert()?)?;
    Ok((torsion, principal))
}

/// u modulo p² or 8 as an integer in [0, modulus).
pub fn residue_datum(u: &PadicUnit, modulus: u32) -> Result<u32> {
    let p = u.p;
    let needed = if modulus == 8 && p == 2 {
        3
    } else if modulus == p * p {
        2
    } else {
        return Err(Error::InvalidInput(format!("modulus {modulus} must be p^2 or 8")));
    };
    if u.prec < needed {
        return Err(Error::InsufficientPrecision { needed, available: u.prec });
    }
    Ok((&u.value % modulus).to_u32().expect("small residue"))
}
