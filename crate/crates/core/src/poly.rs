//! Sparse multivariate polynomials in at most four variables.
//!
//! Monomials are packed into a `u64` (16 bits per exponent, `t0` in the most
//! significant field), so multiplying monomials is integer addition and the
//! packed value compares lexicographically with `t0 > t1 > t2 > t3`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};

pub const MAX_VARS: usize = 4;
const FIELD_BITS: u32 = 16;
const FIELD_MASK: u64 = 0xffff;

/// Coefficient domains usable in [`MultiPoly`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync + Zero + One {
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    fn add_assign_ref(&mut self, other: &Self) {
        *self = self.add_ref(other);
    }

    /// `self += a * b`
    fn add_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }
}

impl Coeff for BigRational {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
}

impl Coeff for BigInt {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }
}

impl Coeff for CyclotomicNumber {
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn new(exponents: &[u32]) -> Self {
        assert!(exponents.len() <= MAX_VARS, "too many variables");
        let mut packed = 0u64;
        for (i, &e) in exponents.iter().enumerate() {
            assert!(e <= FIELD_MASK as u32, "exponent too large");
            packed |= (e as u64) << shift(i);
        }
        Monomial(packed)
    }

    pub fn var(i: usize) -> Self {
        Monomial(1u64 << shift(i))
    }

    pub fn packed(self) -> u64 {
        self.0
    }

    pub fn from_packed(p: u64) -> Self {
        Monomial(p)
    }

    pub fn exponent(self, i: usize) -> u32 {
        ((self.0 >> shift(i)) & FIELD_MASK) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn degree(self) -> u32 {
        (0..MAX_VARS).map(|i| self.exponent(i)).sum()
    }

    /// Product of monomials; exponents must stay below 2^16.
    pub fn times(self, other: Monomial) -> Monomial {
        Monomial(self.0 + other.0)
    }
}

fn shift(i: usize) -> u32 {
    FIELD_BITS * (MAX_VARS - 1 - i) as u32
}

impl Ord for Monomial {
    /// Graded lexicographic order.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exponents(MAX_VARS))
    }
}

/// All exponent vectors of total degree `degree` in `nvars` variables, in
/// descending graded-lex order.
pub fn monomials_of_degree(nvars: usize, degree: u32) -> Vec<Monomial> {
    fn rec(nvars: usize, i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i + 1 == nvars {
            cur.push(left);
            out.push(Monomial::new(cur));
            cur.pop();
            return;
        }
        for e in (0..=left).rev() {
            cur.push(e);
            rec(nvars, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if nvars == 0 {
        if degree == 0 {
            out.push(Monomial::ONE);
        }
        return out;
    }
    rec(nvars, 0, degree, &mut Vec::with_capacity(nvars), &mut out);
    out
}

/// `C(degree + nvars - 1, nvars - 1)`.
pub fn monomial_count(nvars: usize, degree: u32) -> u64 {
    binomial((degree as u64) + nvars as u64 - 1, nvars as u64 - 1)
}

pub fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[derive(Clone, PartialEq)]
pub struct MultiPoly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type RatPoly = MultiPoly<BigRational>;
pub type IntPoly = MultiPoly<BigInt>;
pub type CycPoly = MultiPoly<CyclotomicNumber>;

impl<C: Coeff> MultiPoly<C> {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars <= MAX_VARS, "at most {MAX_VARS} variables");
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, Monomial::ONE, c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        Self::monomial(nvars, Monomial::var(i), C::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: C) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> Option<&C> {
        self.terms.get(&m)
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// The common degree of all terms; `None` if inhomogeneous, `Some(0)` for zero.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return Some(0);
        };
        let d = first.degree();
        it.all(|m| m.degree() == d).then_some(d)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::VarMismatch(self.nvars, other.nvars));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg_ref())).collect(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, c.mul_ref(s)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let (small, big) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc: HashMap<Monomial, C> = HashMap::with_capacity(big.len() * 2);
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                acc.entry(ma.times(*mb))
                    .or_insert_with(C::zero)
                    .add_product(ca, cb);
            }
        }
        MultiPoly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Evaluates at a point by plain term summation.
    pub fn eval(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                for _ in 0..m.exponent(i) {
                    t = t.mul_ref(x);
                }
            }
            acc.add_assign_ref(&t);
        }
        acc
    }
}

impl<C: Coeff> fmt::Debug for MultiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.terms.iter().rev().map(|(m, c)| (m, c)))
            .finish()
    }
}

impl RatPoly {
    /// Clears denominators and removes the content, giving a primitive integer
    /// polynomial with positive leading coefficient, together with the scalar
    /// `s` such that `self = s * result`.
    pub fn to_primitive(&self) -> (IntPoly, BigRational) {
        if self.is_zero() {
            return (IntPoly::zero(self.nvars), BigRational::one());
        }
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums: Vec<BigInt> = self
            .terms
            .values()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = nums.iter().fold(BigInt::zero(), |acc, n| acc.gcd(n));
        if self.terms.values().next_back().unwrap().is_negative() {
            g = -g;
        }
        let terms = self
            .terms
            .keys()
            .zip(nums)
            .map(|(m, n)| (*m, n / &g))
            .collect();
        (
            MultiPoly {
                nvars: self.nvars,
                terms,
            },
            BigRational::new(g, den),
        )
    }
}

impl IntPoly {
    pub fn to_rational(&self) -> RatPoly {
        self.map_coeffs(|c| BigRational::from_integer(c.clone()))
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }
}

impl RatPoly {
    pub fn to_cyclotomic(&self) -> CycPoly {
        self.map_coeffs(|c| CyclotomicNumber::from_rational(c.clone()))
    }
}

impl CycPoly {
    /// Downcasts every coefficient to a rational, failing on the first that is not.
    pub fn to_rational(&self) -> Result<RatPoly> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let r = c
                .to_rational()
                .ok_or_else(|| Error::NotRational(format!("coefficient {c} of {m:?}")))?;
            terms.insert(*m, r);
        }
        Ok(MultiPoly {
            nvars: self.nvars,
            terms,
        })
    }
}

/// Every product `g_1^{e_1} ⋯ g_s^{e_s}` with `Σ e_i·deg_i = degree`.
///
/// Exponent vectors are visited in lexicographic order of `(e_1, …, e_s)`
/// descending, which fixes the output order.
pub fn degree_products<C: Coeff>(generators: &[(MultiPoly<C>, u32)], degree: u32) -> Vec<MultiPoly<C>> {
    let mut cache = ProductCache::new(generators.to_vec());
    cache
        .exponent_vectors(degree)
        .into_iter()
        .map(|e| cache.product(&e))
        .collect()
}

/// Memoised products of a fixed generator list, built one generator factor
/// at a time from smaller cached products.
pub struct ProductCache<C> {
    generators: Vec<(MultiPoly<C>, u32)>,
    nvars: usize,
    memo: HashMap<Vec<u32>, MultiPoly<C>>,
}

impl<C: Coeff> ProductCache<C> {
    pub fn new(generators: Vec<(MultiPoly<C>, u32)>) -> Self {
        let nvars = generators.first().map_or(1, |(g, _)| g.nvars());
        ProductCache {
            generators,
            nvars,
            memo: HashMap::new(),
        }
    }

    pub fn generators(&self) -> &[(MultiPoly<C>, u32)] {
        &self.generators
    }

    pub fn exponent_vectors(&self, degree: u32) -> Vec<Vec<u32>> {
        let degs: Vec<u32> = self.generators.iter().map(|(_, d)| *d).collect();
        exponent_vectors(&degs, degree)
    }

    pub fn product(&mut self, exps: &[u32]) -> MultiPoly<C> {
        if let Some(p) = self.memo.get(exps) {
            return p.clone();
        }
        let p = self.build(exps);
        self.memo.insert(exps.to_vec(), p.clone());
        p
    }

    fn build(&mut self, exps: &[u32]) -> MultiPoly<C> {
        let Some(j) = exps.iter().position(|&e| e > 0) else {
            return MultiPoly::one(self.nvars);
        };
        let mut smaller = exps.to_vec();
        smaller[j] -= 1;
        let base = self.product(&smaller);
        base.mul_unchecked(&self.generators[j].0)
    }

    /// Drops memoised products whose degree is below `degree`.
    pub fn evict_below(&mut self, degree: u32) {
        let degs: Vec<u32> = self.generators.iter().map(|(_, d)| *d).collect();
        self.memo
            .retain(|e, _| e.iter().zip(&degs).map(|(a, b)| a * b).sum::<u32>() >= degree);
    }
}

/// Solutions of `Σ e_i·degrees_i = target` with `e_i ≥ 0`, lexicographically descending.
pub fn exponent_vectors(degrees: &[u32], target: u32) -> Vec<Vec<u32>> {
    fn rec(degs: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == degs.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let d = degs[i];
        let max = if d == 0 { 0 } else { left / d };
        for e in (0..=max).rev() {
            cur.push(e);
            rec(degs, i + 1, left - e * d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(degrees, 0, target, &mut Vec::new(), &mut out);
    out
}

// ---------------------------------------------------------------- text / JSON

fn write_monomial(f: &mut fmt::Formatter<'_>, m: Monomial, nvars: usize) -> fmt::Result {
    let mut first = true;
    for i in 0..nvars {
        let e = m.exponent(i);
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, " ")?;
        }
        first = false;
        if e == 1 {
            write!(f, "t{i}")?;
        } else {
            write!(f, "t{i}^{e}")?;
        }
    }
    Ok(())
}

/// Conventional rendering: `t0^8 + 14 t0^4 t2^4 + …`, leading term first.
impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let is_const = *m == Monomial::ONE;
            if !mag.is_one() || is_const {
                write!(f, "{mag}")?;
                if !is_const {
                    write!(f, " ")?;
                }
            }
            write_monomial(f, *m, self.nvars)?;
        }
        Ok(())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_rational(), f)
    }
}

impl fmt::Display for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            if *m != Monomial::ONE {
                write!(f, " ")?;
                write_monomial(f, *m, self.nvars)?;
            }
        }
        Ok(())
    }
}

/// `{"nvars": m, "terms": [[[e0, …], "p/q"], …]}`, leading term first.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, String)>,
}

impl RatPoly {
    pub fn to_json(&self) -> PolyJson {
        PolyJson {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .rev()
                .map(|(m, c)| (m.exponents(self.nvars), c.to_string()))
                .collect(),
        }
    }

    pub fn from_json(json: &PolyJson) -> Result<Self> {
        if json.nvars > MAX_VARS {
            return Err(Error::TooManyVars {
                max: MAX_VARS,
                got: json.nvars,
            });
        }
        let mut p = RatPoly::zero(json.nvars);
        for (i, (exps, c)) in json.terms.iter().enumerate() {
            if exps.len() != json.nvars {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("expected {} exponents", json.nvars),
                });
            }
            p.add_term(Monomial::new(exps), &parse_rational(c).map_err(|msg| Error::Parse { line: i + 1, msg })?);
        }
        Ok(p)
    }
}

impl IntPoly {
    pub fn to_json(&self) -> PolyJson {
        self.to_rational().to_json()
    }
}

pub fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    let parse_int = |t: &str| t.trim().parse::<BigInt>().map_err(|e| format!("bad number `{t}`: {e}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let q = parse_int(q)?;
            if q.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(parse_int(p)?, q))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Parses the conventional text form, e.g. `t0^8 + 14 t0^4 t2^4 - 2/3 t1 t3`.
pub fn parse_poly_text(nvars: usize, text: &str) -> Result<RatPoly> {
    let err = |msg: String| Error::Parse { line: 1, msg };
    let mut p = RatPoly::zero(nvars);
    let cleaned: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    // Split into signed terms.
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for tok in cleaned.split(' ') {
        match tok {
            "+" | "-" => {
                if !cur.trim().is_empty() {
                    terms.push((neg, std::mem::take(&mut cur)));
                }
                neg = tok == "-";
            }
            _ => {
                let tok = if cur.trim().is_empty() && tok.starts_with('-') && tok.len() > 1 {
                    neg = !neg;
                    &tok[1..]
                } else {
                    tok
                };
                cur.push(' ');
                cur.push_str(tok);
            }
        }
    }
    if !cur.trim().is_empty() {
        terms.push((neg, cur));
    }
    for (neg, body) in terms {
        let mut coeff = BigRational::one();
        let mut exps = vec![0u32; nvars];
        for factor in body.split([' ', '*']).filter(|s| !s.is_empty()) {
            if let Some(rest) = factor.strip_prefix('t') {
                let (idx, e) = match rest.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|e| err(e.to_string()))?),
                    None => (rest, 1),
                };
                let idx: usize = idx.parse().map_err(|_| err(format!("bad variable `{factor}`")))?;
                if idx >= nvars {
                    return Err(err(format!("variable t{idx} out of range")));
                }
                exps[idx] += e;
            } else {
                coeff *= parse_rational(factor).map_err(err)?;
            }
        }
        if neg {
            coeff = -coeff;
        }
        p.add_term(Monomial::new(&exps), &coeff);
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(i: usize) -> RatPoly {
        RatPoly::var(4, i)
    }

    #[test]
    fn monomial_packing() {
        let m = Monomial::new(&[3, 0, 1, 4]);
        assert_eq!(m.exponents(4), vec![3, 0, 1, 4]);
        assert_eq!(m.degree(), 8);
        assert_eq!(m.times(Monomial::var(1)).exponents(4), vec![3, 1, 1, 4]);
        // t0 > t1 within a degree, and degree dominates.
        assert!(Monomial::var(0) > Monomial::var(1));
        assert!(Monomial::new(&[0, 0, 0, 2]) > Monomial::var(0));
    }

    #[test]
    fn monomial_enumeration() {
        for (m, d) in [(4usize, 0u32), (4, 3), (3, 5), (2, 7)] {
            let ms = monomials_of_degree(m, d);
            assert_eq!(ms.len() as u64, monomial_count(m, d));
            assert!(ms.windows(2).all(|w| w[0] > w[1]));
        }
        assert_eq!(monomial_count(4, 96), 156_849);
    }

    #[test]
    fn arithmetic() {
        let x = t(0).checked_add(&t(1)).unwrap();
        let sq = x.pow(2);
        let expected = parse_poly_text(4, "t0^2 + 2 t0 t1 + t1^2").unwrap();
        assert_eq!(sq, expected);
        assert_eq!(x.checked_mul(&RatPoly::one(4)).unwrap(), x);
        assert!(x.checked_sub(&x).unwrap().is_zero());
        assert!(x.checked_add(&RatPoly::var(3, 0)).is_err());
    }

    #[test]
    fn primitive_form() {
        let p = parse_poly_text(2, "1/2 t0^2 - 3/4 t1^2").unwrap();
        let (ip, s) = p.to_primitive();
        assert_eq!(ip.to_rational().scale(&s), p);
        assert_eq!(ip.to_string(), "2 t0^2 - 3 t1^2");
    }

    #[test]
    fn text_round_trip() {
        let src = "t0^8 + 4 t0^3 t1^4 t2 + 12 t0^6 t2^2 - 1/3 t1 t3^7";
        let p = parse_poly_text(4, src).unwrap();
        let q = parse_poly_text(4, &p.to_string()).unwrap();
        assert_eq!(p, q);
        let j = RatPoly::from_json(&p.to_json()).unwrap();
        assert_eq!(j, p);
    }

    #[test]
    fn products_by_degree() {
        let f = t(0).pow(8);
        let ps = degree_products(&[(f.clone(), 8)], 16);
        assert_eq!(ps, vec![f.pow(2)]);
        let gens: Vec<_> = (0..4).map(|i| (t(i).pow(8), 8)).collect();
        assert_eq!(degree_products(&gens, 16).len(), 10);
        assert!(degree_products(&gens, 12).is_empty());
        assert_eq!(degree_products(&gens, 0), vec![RatPoly::one(4)]);
    }

    #[test]
    fn exponent_vector_counts() {
        // multisets of {1..10} summing to 12: partitions of 12 with parts <= 10
        let degs: Vec<u32> = (1..=10).map(|i| 8 * i).collect();
        assert_eq!(exponent_vectors(&degs, 96).len(), 75);
    }
}
