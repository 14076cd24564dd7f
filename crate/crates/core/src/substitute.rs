//! Linear substitutions `f(t) ↦ f(M·t)`.
//!
//! `M` is factored into elementary substitutions (swap two variables, scale
//! one, or shear `t_i ↦ t_i + c·t_j`), which are applied one after the
//! other; each one touches every term of the polynomial only a few times.
//!
//! The same factorisation runs modulo a prime `p ≡ 1 (mod n)`, where `ζ_n`
//! is sent to an element of order `n`. [`check_fixed`] uses this to decide
//! `f(M·t) = f(t)` for large `f`: after clearing denominators, every
//! coefficient of the difference is an algebraic integer `a` with
//! `|σ(a)| ≤ A` for all embeddings σ, so `a ≠ 0` forces `1 ≤ |N(a)| ≤ A^{φ(n)}`.
//! If `a` vanishes modulo a prime above each of several split primes `p_j`
//! with `Π p_j > A^{φ(n)}`, then `Π p_j` divides `N(a)` and `a = 0`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cyclotomic::{cyclotomic_polynomial, totient, CyclotomicNumber};
use crate::error::{Error, Result};
use crate::matgroup::CycMatrix;
use crate::poly::{CycPoly, IntPoly, Monomial, RatPoly};
use crate::rank::{bigint_mod, invmod, mulmod, powmod, random_primes};

/// One factor of a substitution; applied as `t ↦ E·t`.
#[derive(Clone, Debug, PartialEq)]
pub enum Elementary {
    Swap(usize, usize),
    /// `t_i ↦ c·t_i`
    Scale(usize, CyclotomicNumber),
    /// `t_target ↦ t_target + c·t_source`
    Shear {
        target: usize,
        source: usize,
        c: CyclotomicNumber,
    },
}

/// `M = E_1 E_2 ⋯ E_s`, so `f(M·t)` is obtained by substituting `E_1`
/// first and `E_s` last.
pub fn elementary_factors(m: &CycMatrix) -> Result<Vec<Elementary>> {
    let n = m.size();
    let mut a: Vec<Vec<CyclotomicNumber>> = m.rows().map(|r| r.to_vec()).collect();
    let mut out = Vec::new();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Dimension("singular matrix".into()))?;
        if piv != col {
            a.swap(piv, col);
            out.push(Elementary::Swap(piv, col));
        }
        let p = a[col][col].clone();
        if !p.is_one() {
            let inv = p.inv()?;
            for x in a[col].iter_mut() {
                *x = &*x * &inv;
            }
            out.push(Elementary::Scale(col, p));
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let v = &a[r][j] - &(&f * &a[col][j]);
                a[r][j] = v;
            }
            out.push(Elementary::Shear {
                target: r,
                source: col,
                c: f,
            });
        }
    }
    Ok(out)
}

fn exps_of(m: Monomial, nvars: usize) -> Vec<u32> {
    m.exponents(nvars)
}

fn binomials(n: u32) -> Vec<Vec<BigInt>> {
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(n as usize + 1);
    for i in 0..=n as usize {
        let mut row = vec![BigInt::one(); i + 1];
        for j in 1..i {
            row[j] = &t[i - 1][j - 1] + &t[i - 1][j];
        }
        t.push(row);
    }
    t
}

fn max_degree<C: crate::poly::Coeff>(f: &crate::poly::MultiPoly<C>) -> u32 {
    f.terms().map(|(m, _)| m.degree()).max().unwrap_or(0)
}

fn apply_exact(f: &CycPoly, e: &Elementary) -> CycPoly {
    let nv = f.nvars();
    match e {
        Elementary::Swap(i, j) => CycPoly::from_terms(
            nv,
            f.terms().map(|(m, c)| {
                let mut x = exps_of(*m, nv);
                x.swap(*i, *j);
                (Monomial::new(&x), c.clone())
            }),
        ),
        Elementary::Scale(i, s) => {
            let top = f.terms().map(|(m, _)| m.exponent(*i)).max().unwrap_or(0);
            let mut pows = vec![CyclotomicNumber::from_int(1)];
            for _ in 0..top {
                pows.push(pows.last().unwrap() * s);
            }
            CycPoly::from_terms(
                nv,
                f.terms()
                    .map(|(m, c)| (*m, c * &pows[m.exponent(*i) as usize])),
            )
        }
        Elementary::Shear { target, source, c } => {
            let top = f.terms().map(|(m, _)| m.exponent(*target)).max().unwrap_or(0);
            let binom = binomials(top);
            let mut pows = vec![CyclotomicNumber::from_int(1)];
            for _ in 0..top {
                pows.push(pows.last().unwrap() * c);
            }
            let mut acc: HashMap<Monomial, CyclotomicNumber> = HashMap::new();
            for (m, a) in f.terms() {
                let x = exps_of(*m, nv);
                let e = x[*target];
                for s in 0..=e {
                    let mut y = x.clone();
                    y[*target] = e - s;
                    y[*source] += s;
                    let coef = (a * &pows[s as usize])
                        .scale(&BigRational::from_integer(binom[e as usize][s as usize].clone()));
                    let slot = acc.entry(Monomial::new(&y)).or_insert_with(CyclotomicNumber::zero);
                    *slot = &*slot + &coef;
                }
            }
            CycPoly::from_terms(nv, acc.into_iter().filter(|(_, c)| !c.is_zero()))
        }
    }
}

/// `f(M·t)` exactly.
pub fn substitute_linear(f: &CycPoly, m: &CycMatrix) -> Result<CycPoly> {
    if f.nvars() != m.size() {
        return Err(Error::VarMismatch(m.size(), f.nvars()));
    }
    let mut g = f.clone();
    for e in elementary_factors(m)? {
        g = apply_exact(&g, &e);
    }
    Ok(g)
}

/// `f(M·t)` for a rational polynomial.
pub fn substitute_rational(f: &RatPoly, m: &CycMatrix) -> Result<CycPoly> {
    substitute_linear(&f.to_cyclotomic(), m)
}

// ------------------------------------------------------------ modular side

/// Image of `x ∈ Q(ζ_n)` under `ζ_n ↦ root` in `F_p`.
fn cyc_mod(x: &CyclotomicNumber, n: u32, root: u64, p: u64) -> Result<u64> {
    let x = x.embed(n)?;
    let mut acc = 0u64;
    let mut pw = 1u64;
    for c in x.coeffs() {
        let den = bigint_mod(c.denom(), p);
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let v = mulmod(bigint_mod(c.numer(), p), invmod(den, p), p);
        acc = (acc + mulmod(v, pw, p)) % p;
        pw = mulmod(pw, root, p);
    }
    Ok(acc)
}

/// An element of order exactly `n` in `F_p^*` (`n | p - 1`) that is a root of `Φ_n`.
fn root_of_unity(n: u32, p: u64) -> u64 {
    let phi = cyclotomic_polynomial(n);
    let e = (p - 1) / n as u64;
    let mut g = 2u64;
    loop {
        let r = powmod(g, e, p);
        // evaluate Φ_n(r)
        let mut v = 0u64;
        for &c in phi.iter().rev() {
            let cm = if c >= 0 { c as u64 % p } else { p - ((-c) as u64 % p) };
            v = (mulmod(v, r, p) + cm) % p;
        }
        if v == 0 {
            return r;
        }
        g += 1;
    }
}

type ModPoly = HashMap<Monomial, u64>;

enum ModElementary {
    Swap(usize, usize),
    Scale(usize, u64),
    Shear(usize, usize, u64),
}

fn apply_mod(f: &ModPoly, e: &ModElementary, nv: usize, p: u64, binom: &[Vec<u64>]) -> ModPoly {
    match *e {
        ModElementary::Swap(i, j) => f
            .iter()
            .map(|(m, c)| {
                let mut x = m.exponents(nv);
                x.swap(i, j);
                (Monomial::new(&x), *c)
            })
            .collect(),
        ModElementary::Scale(i, s) => f
            .iter()
            .map(|(m, c)| (*m, mulmod(*c, powmod(s, m.exponent(i) as u64, p), p)))
            .collect(),
        ModElementary::Shear(t, s, c) => {
            let top = f.keys().map(|m| m.exponent(t)).max().unwrap_or(0);
            let mut pows = vec![1u64];
            for _ in 0..top {
                pows.push(mulmod(*pows.last().unwrap(), c, p));
            }
            let mut acc: ModPoly = HashMap::with_capacity(f.len() * 2);
            for (m, a) in f {
                let x = m.exponents(nv);
                let e = x[t];
                for k in 0..=e {
                    let mut y = x.clone();
                    y[t] = e - k;
                    y[s] += k;
                    let v = mulmod(mulmod(*a, pows[k as usize], p), binom[e as usize][k as usize], p);
                    let slot = acc.entry(Monomial::new(&y)).or_insert(0);
                    *slot = (*slot + v) % p;
                }
            }
            acc.retain(|_, v| *v != 0);
            acc
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FixedCheck {
    pub fixed: bool,
    /// `exact` or `modular`.
    pub method: String,
    pub primes: Vec<u64>,
    /// Bits of `A^{φ(n)}` that the primes had to exceed (modular only).
    pub bound_bits: u64,
}

/// Bound `A` on every embedding of every coefficient of
/// `f(D·M·t) − D^deg·f(t)`, where `D` clears the denominators of `M`.
fn coefficient_bound(f: &IntPoly, m: &CycMatrix, den: &BigInt) -> BigInt {
    let nv = f.nvars();
    let row_l1: Vec<BigInt> = (0..nv)
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| {
                    let s: BigRational = x.coeffs().iter().map(|c| c.abs()).sum();
                    (s * BigRational::from_integer(den.clone())).ceil().to_integer()
                })
                .sum()
        })
        .collect();
    let mut total = BigInt::zero();
    let mut maxc = BigInt::zero();
    for (mono, c) in f.terms() {
        let mut t = c.abs();
        for (i, r) in row_l1.iter().enumerate() {
            t *= r.pow(mono.exponent(i));
        }
        total += t;
        if c.abs() > maxc {
            maxc = c.abs();
        }
    }
    total + maxc * den.pow(max_degree(f))
}

/// Decides `f(M·t) = f(t)` exactly. Small inputs are substituted over
/// `Q(ζ_n)`; larger ones modulo enough split primes to meet the norm bound.
pub fn check_fixed(f: &RatPoly, m: &CycMatrix, exact_term_limit: usize) -> Result<FixedCheck> {
    if f.nvars() != m.size() {
        return Err(Error::VarMismatch(m.size(), f.nvars()));
    }
    let work = f.len() * max_degree(f).max(1) as usize;
    if work <= exact_term_limit {
        let g = substitute_rational(f, m)?;
        return Ok(FixedCheck {
            fixed: g.to_rational().is_ok_and(|r| &r == f),
            method: "exact".into(),
            primes: Vec::new(),
            bound_bits: 0,
        });
    }
    check_fixed_modular(f, m, 0x1a7e)
}

/// The modular half of [`check_fixed`], exposed for cross-checking.
pub fn check_fixed_modular(f: &RatPoly, m: &CycMatrix, seed: u64) -> Result<FixedCheck> {
    let nv = f.nvars();
    let n = m.order().max(1);
    let (fi, _) = f.to_primitive();
    let den = m
        .rows()
        .flat_map(|r| r.iter())
        .fold(BigInt::one(), |acc, x| acc.lcm(&x.denominator_lcm()));
    let a = coefficient_bound(&fi, m, &den);
    let target = a.pow(totient(n) as u32);
    let bound_bits = target.bits();
    let factors = elementary_factors(m)?;
    let deg = max_degree(&fi);
    let mut primes = Vec::new();
    let mut product = BigInt::one();
    let mut batch_seed = seed;
    while product <= target {
        for p in random_primes(4, batch_seed, n as u64) {
            if product > target {
                break;
            }
            if primes.contains(&p) {
                continue;
            }
            let root = if n <= 2 { if n == 2 { p - 1 } else { 1 } } else { root_of_unity(n, p) };
            let ops: Vec<ModElementary> = factors
                .iter()
                .map(|e| {
                    Ok(match e {
                        Elementary::Swap(i, j) => ModElementary::Swap(*i, *j),
                        Elementary::Scale(i, c) => ModElementary::Scale(*i, cyc_mod(c, n, root, p)?),
                        Elementary::Shear { target, source, c } => {
                            ModElementary::Shear(*target, *source, cyc_mod(c, n, root, p)?)
                        }
                    })
                })
                .collect::<Result<_>>()?;
            let binom: Vec<Vec<u64>> = binomials(deg)
                .iter()
                .map(|r| r.iter().map(|b| bigint_mod(b, p)).collect())
                .collect();
            let start: ModPoly = fi
                .terms()
                .map(|(m, c)| (*m, bigint_mod(c, p)))
                .filter(|(_, c)| *c != 0)
                .collect();
            let mut g = start.clone();
            for op in &ops {
                g = apply_mod(&g, op, nv, p, &binom);
            }
            primes.push(p);
            product *= p;
            if g != start {
                return Ok(FixedCheck {
                    fixed: false,
                    method: "modular".into(),
                    primes,
                    bound_bits,
                });
            }
        }
        batch_seed = batch_seed.wrapping_add(0x9e37_79b9);
    }
    Ok(FixedCheck {
        fixed: true,
        method: "modular".into(),
        primes,
        bound_bits,
    })
}
