//! Exact arithmetic in cyclotomic fields `Q(ζ_n)`.
//!
//! An element is a rational coefficient vector over the power basis
//! `1, ζ, …, ζ^{d-1}` with `d = deg Φ_n`, always reduced modulo `Φ_n`, so
//! structural equality is field equality. Elements of order 1 or 2 are plain
//! rationals and are promoted silently when combined with any other order.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.read().unwrap().get(&n) {
        return p.clone();
    }
    assert!(n >= 1, "cyclotomic order must be positive");
    // x^n - 1 divided by Φ_d for every proper divisor d.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let div = cyclotomic_polynomial(d);
            num = exact_div_monic(&num, &div);
        }
    }
    let p = Arc::new(num);
    cache.write().unwrap().insert(n, p.clone());
    p
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = num.len() - 1;
    let mut quot = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &dj) in den.iter().enumerate() {
                rem[i + j] -= c * dj;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Euler's totient, equal to `deg Φ_n`.
pub fn totient(n: u32) -> usize {
    cyclotomic_polynomial(n).len() - 1
}

#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn from_rational(r: BigRational) -> Self {
        CyclotomicNumber {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_int(i: i64) -> Self {
        Self::from_rational(BigRational::from_integer(i.into()))
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_rational(BigRational::new(p.into(), q.into()))
    }

    /// The zero element of `Q(ζ_n)`.
    pub fn zero_of(order: u32) -> Self {
        CyclotomicNumber {
            order,
            coeffs: vec![BigRational::zero(); totient(order)],
        }
    }

    /// `ζ_n^power` in canonical form.
    pub fn root(order: u32, power: i64) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let e = power.rem_euclid(order as i64) as usize;
        let d = totient(order);
        let mut raw = vec![BigRational::zero(); d.max(e + 1)];
        raw[e] = BigRational::one();
        Self::reduce(order, raw)
    }

    /// Builds an element from (possibly unreduced) coefficients of `1, ζ, ζ², …`.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Self {
        Self::reduce(order, coeffs)
    }

    fn reduce(order: u32, mut raw: Vec<BigRational>) -> Self {
        let phi = cyclotomic_polynomial(order);
        let d = phi.len() - 1;
        if raw.len() > d {
            for i in (d..raw.len()).rev() {
                if raw[i].is_zero() {
                    continue;
                }
                let c = std::mem::replace(&mut raw[i], BigRational::zero());
                for (j, &pj) in phi.iter().enumerate().take(d) {
                    if pj != 0 {
                        let t = &c * BigRational::from_integer(pj.into());
                        raw[i - d + j] -= t;
                    }
                }
            }
            raw.truncate(d);
        } else {
            raw.resize(d, BigRational::zero());
        }
        CyclotomicNumber { order, coeffs: raw }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// True when the field is `Q` itself (orders 1 and 2).
    fn is_base_field(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The rational value when every non-constant coefficient vanishes.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses `self` in `Q(ζ_target)`; requires `order | target`.
    pub fn embed(&self, target: u32) -> Result<Self> {
        if self.order == target {
            return Ok(self.clone());
        }
        if self.is_base_field() {
            let mut v = vec![BigRational::zero(); totient(target)];
            v[0] = self.coeffs[0].clone();
            return Ok(CyclotomicNumber {
                order: target,
                coeffs: v,
            });
        }
        if target % self.order != 0 {
            return Err(Error::OrderMismatch(self.order, target));
        }
        let step = (target / self.order) as usize;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * step] = c.clone();
        }
        Ok(Self::reduce(target, raw))
    }

    fn unify(a: &Self, b: &Self) -> Result<(Self, Self)> {
        if a.order == b.order {
            Ok((a.clone(), b.clone()))
        } else if a.is_base_field() {
            Ok((a.embed(b.order)?, b.clone()))
        } else if b.is_base_field() {
            Ok((a.clone(), b.embed(a.order)?))
        } else {
            Err(Error::OrderMismatch(a.order, b.order))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            let (a, b) = Self::unify(self, other)?;
            return a.checked_add(&b);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| x + y)
            .collect();
        Ok(CyclotomicNumber {
            order: self.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.order != other.order {
            if self.is_base_field() {
                return Ok(other.scale(&self.coeffs[0]));
            }
            if other.is_base_field() {
                return Ok(self.scale(&other.coeffs[0]));
            }
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let d = self.coeffs.len();
        let mut raw = vec![BigRational::zero(); 2 * d - 1];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in other.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        Ok(Self::reduce(self.order, raw))
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against `Φ_n`.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.to_rational() {
            let mut v = vec![BigRational::zero(); self.coeffs.len()];
            v[0] = r.recip();
            return Ok(CyclotomicNumber {
                order: self.order,
                coeffs: v,
            });
        }
        let phi: Vec<BigRational> = cyclotomic_polynomial(self.order)
            .iter()
            .map(|&c| BigRational::from_integer(c.into()))
            .collect();
        // Invariant: s * self ≡ r (mod Φ).
        let (mut r0, mut r1) = (phi, trim(self.coeffs.clone()));
        let (mut s0, mut s1) = (Vec::new(), vec![BigRational::one()]);
        while !(r1.len() == 1) {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                // gcd is non-constant; impossible for an irreducible modulus.
                return Err(Error::DivisionByZero);
            }
        }
        let c = r1[0].recip();
        let out: Vec<BigRational> = s1.into_iter().map(|x| x * &c).collect();
        Ok(Self::reduce(self.order, out))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = CyclotomicNumber::from_int(1).embed(self.order).unwrap();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Lowest common denominator of the coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Sum of absolute values of the coefficients; bounds `|σ(x)|` for every embedding σ.
    pub fn coeff_l1(&self) -> BigRational {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }
}

fn trim(mut v: Vec<BigRational>) -> Vec<BigRational> {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

fn poly_sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, x) in b.iter().enumerate() {
        out[i] -= x;
    }
    trim(out)
}

fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    let mut rem = trim(a.to_vec());
    let db = b.len() - 1;
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let lead = b[db].recip();
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * &lead;
        for (j, y) in b.iter().enumerate() {
            rem[shift + j] -= &c * y;
        }
        quot[shift] = c;
        rem.pop();
        rem = trim(rem);
    }
    (trim(quot), rem)
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        match (self.to_rational(), other.to_rational()) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for CyclotomicNumber {}

impl Hash for CyclotomicNumber {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Trailing zeros are skipped so promoted rationals hash alike.
        let end = self
            .coeffs
            .iter()
            .rposition(|c| !c.is_zero())
            .map_or(0, |i| i + 1);
        self.coeffs[..end].hash(state);
    }
}

impl Zero for CyclotomicNumber {
    fn zero() -> Self {
        CyclotomicNumber::from_int(0)
    }
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
}

impl One for CyclotomicNumber {
    fn one() -> Self {
        CyclotomicNumber::from_int(1)
    }
}

impl From<BigRational> for CyclotomicNumber {
    fn from(r: BigRational) -> Self {
        CyclotomicNumber::from_rational(r)
    }
}

impl<'a> Add<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_add(rhs).expect("cyclotomic order mismatch")
    }
}

impl<'a> Sub<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_sub(rhs).expect("cyclotomic order mismatch")
    }
}

impl<'a> Mul<&'a CyclotomicNumber> for &'a CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self.checked_mul(rhs).expect("cyclotomic order mismatch")
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Add for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: Self) -> Self {
        &self + &rhs
    }
}

impl Sub for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: Self) -> Self {
        &self - &rhs
    }
}

impl Mul for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> Self {
        -&self
    }
}

impl fmt::Display for CyclotomicNumber {
    /// `c0 + c1*z + c2*z^2 + …`, zero terms omitted.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() {
                ("-", -c)
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}*z")?,
                _ => write!(f, "{mag}*z^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
