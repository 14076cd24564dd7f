//! E-polynomials `φ_k = (1/|G|) Σ_σ (σ₀·t)^k`, the average of the `k`-th
//! powers of the linear forms given by first rows.
//!
//! Two expansions are available. When every entry of a row is a rational
//! multiple of a root of unity (true for all first rows of `G` and `G⁸`),
//! each multinomial term contributes `± multinomial · ζ^s` and is accumulated
//! into integer slots of `Z[ζ]` directly. Other rows fall back to exact
//! powers in `Q(ζ_n)`. The summed result must be rational; anything else is
//! reported as an error.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::{cyclotomic_polynomial, totient, CyclotomicNumber};
use crate::error::{Error, Result};
use crate::matgroup::{CosetSystem, CycMatrix, FiniteMatrixGroup};
use crate::poly::{monomials_of_degree, Monomial, RatPoly};
use crate::series::PowerSeries;
use crate::span::{SpanConfig, Subalgebra};

#[derive(Clone, Debug)]
pub struct EPolynomial {
    pub group: String,
    pub weight: u32,
    pub value: RatPoly,
}

/// A row whose nonzero entries are `ρ · sᵢ · ζ^{jᵢ}` for one positive rational `ρ`.
struct UnitRow {
    rho: BigRational,
    /// `(sign, exponent)` per entry, `None` for a zero entry.
    entries: Vec<Option<(bool, usize)>>,
}

fn as_root_multiple(x: &CyclotomicNumber, n: u32) -> Option<(BigRational, usize)> {
    let n = n.max(1);
    for j in 0..n {
        let y = x * &CyclotomicNumber::root(n, -(j as i64));
        if let Some(r) = y.to_rational() {
            return Some((r, j as usize));
        }
    }
    None
}

fn unit_row(row: &[CyclotomicNumber], n: u32) -> Option<UnitRow> {
    let mut rho: Option<BigRational> = None;
    let mut entries = Vec::with_capacity(row.len());
    for x in row {
        if x.is_zero() {
            entries.push(None);
            continue;
        }
        let (r, j) = as_root_multiple(x, n)?;
        let a = r.abs();
        match &rho {
            None => rho = Some(a),
            Some(p) if *p == a => {}
            Some(_) => return None,
        }
        entries.push(Some((r.is_negative(), j)));
    }
    Some(UnitRow {
        rho: rho.unwrap_or_else(BigRational::one),
        entries,
    })
}

/// `ζ_n^s` expressed in the power basis as small integers.
fn root_table(n: u32) -> Vec<Vec<i64>> {
    let phi = cyclotomic_polynomial(n);
    let d = phi.len() - 1;
    let mut out = Vec::with_capacity(n as usize);
    let mut cur = vec![0i64; d];
    cur[0] = 1;
    for _ in 0..n.max(1) {
        out.push(cur.clone());
        // multiply by ζ, then replace ζ^d using the monic Φ_n
        let top = cur[d - 1];
        let mut next = vec![0i64; d];
        for i in 0..d {
            let shifted = if i > 0 { cur[i - 1] } else { 0 };
            next[i] = shifted - phi[i] * top;
        }
        cur = next;
    }
    out
}

fn binomial_table(k: u32) -> Vec<Vec<BigInt>> {
    let k = k as usize;
    let mut t: Vec<Vec<BigInt>> = Vec::with_capacity(k + 1);
    for n in 0..=k {
        let mut row = vec![BigInt::one(); n + 1];
        for j in 1..n {
            row[j] = &t[n - 1][j - 1] + &t[n - 1][j];
        }
        t.push(row);
    }
    t
}

fn multinomial(binom: &[Vec<BigInt>], exps: &[u32]) -> BigInt {
    let mut left: usize = exps.iter().map(|&e| e as usize).sum();
    let mut acc = BigInt::one();
    for &e in &exps[..exps.len().saturating_sub(1)] {
        acc *= &binom[left][e as usize];
        left -= e as usize;
    }
    acc
}

/// `(1/|rows|) Σ_rows (row·t)^k` as a rational polynomial.
///
/// `n` is the cyclotomic order the entries live in.
pub fn power_sum(rows: &[Vec<CyclotomicNumber>], n: u32, k: u32) -> Result<RatPoly> {
    let nvars = rows.first().map_or(1, |r| r.len());
    if rows.is_empty() {
        return Ok(RatPoly::zero(nvars));
    }
    let monos = monomials_of_degree(nvars, k);
    let exps: Vec<Vec<u32>> = monos.iter().map(|m| m.exponents(nvars)).collect();
    let binom = binomial_table(k);
    let multis: Vec<BigInt> = exps.iter().map(|e| multinomial(&binom, e)).collect();
    let d = totient(n);
    let table = root_table(n);
    let layout = Layout {
        n,
        d,
        k,
        exps: &exps,
        multis: &multis,
        table: &table,
    };

    let mut unit: Vec<UnitRow> = Vec::new();
    let mut general: Vec<&Vec<CyclotomicNumber>> = Vec::new();
    for r in rows {
        match unit_row(r, n) {
            Some(u) => unit.push(u),
            None => general.push(r),
        }
    }

    // Every group contributes `weight / den · slots`, where slots[monomial * d + b]
    // is the integer coefficient of ζ^b.
    let mut groups: Vec<(BigInt, BigInt, Vec<BigInt>)> = Vec::new();
    let mut by_rho: Vec<(BigRational, Vec<BigInt>)> = Vec::new();
    for u in &unit {
        let pos = match by_rho.iter().position(|(r, _)| *r == u.rho) {
            Some(p) => p,
            None => {
                by_rho.push((u.rho.clone(), vec![BigInt::zero(); monos.len() * d]));
                by_rho.len() - 1
            }
        };
        layout.add_unit_row(u, &mut by_rho[pos].1);
    }
    for (rho, slots) in by_rho {
        groups.push((rho.numer().pow(k), rho.denom().pow(k), slots));
    }

    let lifted: Vec<(BigInt, Vec<BigInt>)> = general
        .par_iter()
        .map(|r| layout.general_row(r))
        .collect::<Result<_>>()?;
    for (den, slots) in lifted {
        match groups
            .iter_mut()
            .find(|(w, dd, _)| w.is_one() && *dd == den)
        {
            Some((_, _, acc)) => {
                for (a, v) in acc.iter_mut().zip(slots) {
                    *a += v;
                }
            }
            None => groups.push((BigInt::one(), den, slots)),
        }
    }

    let den = groups
        .iter()
        .fold(BigInt::one(), |acc, (_, dd, _)| acc.lcm(dd));
    let mut total = vec![BigInt::zero(); monos.len() * d];
    for (w, dd, slots) in groups {
        let f = w * (&den / dd);
        for (t, v) in total.iter_mut().zip(slots) {
            if !v.is_zero() {
                *t += v * &f;
            }
        }
    }

    let scale = &den * BigInt::from(rows.len());
    let mut terms: Vec<(Monomial, BigRational)> = Vec::new();
    for (idx, m) in monos.iter().enumerate() {
        let sl = &total[idx * d..(idx + 1) * d];
        if sl[1..].iter().any(|v| !v.is_zero()) {
            let c = slots_to_cyc(n, sl, &scale);
            return Err(not_rational(m, k, &c));
        }
        if !sl[0].is_zero() {
            terms.push((*m, BigRational::new(sl[0].clone(), scale.clone())));
        }
    }
    Ok(RatPoly::from_terms(nvars, terms))
}

struct Layout<'a> {
    n: u32,
    d: usize,
    k: u32,
    exps: &'a [Vec<u32>],
    multis: &'a [BigInt],
    table: &'a [Vec<i64>],
}

impl Layout<'_> {
    fn add_unit_row(&self, u: &UnitRow, slots: &mut [BigInt]) {
        let d = self.d;
        let nroots = self.table.len();
        'mono: for (idx, e) in self.exps.iter().enumerate() {
            let mut s = 0usize;
            let mut neg = false;
            for (i, &ei) in e.iter().enumerate() {
                if ei == 0 {
                    continue;
                }
                match u.entries[i] {
                    None => continue 'mono,
                    Some((sg, j)) => {
                        s += j * ei as usize;
                        neg ^= sg && ei % 2 == 1;
                    }
                }
            }
            let base = idx * d;
            let m = &self.multis[idx];
            for (b, &c) in self.table[s % nroots].iter().enumerate() {
                let slot = &mut slots[base + b];
                match (c, neg) {
                    (0, _) => {}
                    (1, false) | (-1, true) => *slot += m,
                    (-1, false) | (1, true) => *slot -= m,
                    (c, neg) => *slot += m * if neg { -c } else { c },
                }
            }
        }
    }

    /// Product in `Z[ζ_n]` of two power-basis vectors.
    fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let d = self.d;
        let nroots = self.table.len();
        let mut out = vec![BigInt::zero(); d];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let p = x * y;
                for (o, &c) in out.iter_mut().zip(&self.table[(i + j) % nroots]) {
                    match c {
                        0 => {}
                        1 => *o += &p,
                        -1 => *o -= &p,
                        c => *o += &p * c,
                    }
                }
            }
        }
        out
    }

    /// Clears denominators of one row and expands `(row·t)^k` into integer slots.
    /// Returns the denominator `D^k` alongside the slots.
    fn general_row(&self, row: &[CyclotomicNumber]) -> Result<(BigInt, Vec<BigInt>)> {
        let d = self.d;
        let mut entries = Vec::with_capacity(row.len());
        for x in row {
            entries.push(x.embed(self.n)?);
        }
        let den = entries
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(&x.denominator_lcm()));
        let mut powers: Vec<Vec<Vec<BigInt>>> = Vec::with_capacity(entries.len());
        for x in &entries {
            let v: Vec<BigInt> = x
                .coeffs()
                .iter()
                .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
                .collect();
            let mut one = vec![BigInt::zero(); d];
            one[0] = BigInt::one();
            let mut p = vec![one];
            if x.is_zero() {
                powers.push(p);
                continue;
            }
            for _ in 0..self.k {
                let next = self.mul(p.last().unwrap(), &v);
                p.push(next);
            }
            powers.push(p);
        }
        let index: HashMap<&[u32], usize> = self
            .exps
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_slice(), i))
            .collect();
        let mut slots = vec![BigInt::zero(); self.exps.len() * d];
        let mut one = vec![BigInt::zero(); d];
        one[0] = BigInt::one();
        let mut cur = vec![0u32; row.len()];
        self.walk(&powers, &index, 0, self.k, &one, &mut cur, &mut slots);
        Ok((den.pow(self.k), slots))
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        powers: &[Vec<Vec<BigInt>>],
        index: &HashMap<&[u32], usize>,
        var: usize,
        left: u32,
        prefix: &[BigInt],
        cur: &mut Vec<u32>,
        slots: &mut [BigInt],
    ) {
        let last = var + 1 == powers.len();
        let range = if last { left..=left } else { 0..=left };
        for e in range {
            if e > 0 && powers[var].len() == 1 {
                break;
            }
            cur[var] = e;
            let p = if e == 0 {
                prefix.to_vec()
            } else {
                self.mul(prefix, &powers[var][e as usize])
            };
            if p.iter().all(Zero::is_zero) {
                continue;
            }
            if last {
                let idx = index[cur.as_slice()];
                let m = &self.multis[idx];
                for (s, v) in slots[idx * self.d..(idx + 1) * self.d].iter_mut().zip(&p) {
                    if !v.is_zero() {
                        *s += v * m;
                    }
                }
            } else {
                self.walk(powers, index, var + 1, left - e, &p, cur, slots);
            }
        }
        cur[var] = 0;
    }
}

fn slots_to_cyc(n: u32, slots: &[BigInt], den: &BigInt) -> CyclotomicNumber {
    CyclotomicNumber::from_coeffs(
        n,
        slots
            .iter()
            .map(|v| BigRational::new(v.clone(), den.clone()))
            .collect(),
    )
}

fn not_rational(m: &Monomial, k: u32, c: &CyclotomicNumber) -> Error {
    Error::NotRational(format!("coefficient of {m:?} in the weight-{k} power sum: {c}"))
}

/// `φ_k` through the coset representatives: `(|K|/|G|) Σ_{K\G} (σ₀·t)^k`.
pub fn e_polynomial(cosets: &CosetSystem, k: u32) -> Result<RatPoly> {
    let rows: Vec<Vec<CyclotomicNumber>> = cosets.first_rows().map(|r| r.to_vec()).collect();
    power_sum(&rows, cosets.field_order(), k)
}

/// `φ_k` through the full group average `(1/|G|) Σ_{σ∈G} (σ₀·t)^k`.
pub fn e_polynomial_full(group: &FiniteMatrixGroup, k: u32) -> Result<RatPoly> {
    let rows: Vec<Vec<CyclotomicNumber>> =
        group.elements().iter().map(|g| g.row(0).to_vec()).collect();
    power_sum(&rows, group.field_order(), k)
}

/// Evidence that every `φ_k` of a coset system is invariant.
///
/// Right multiplication by a generator `g` permutes `G`, and the first row of
/// `σg` is `σ₀·g`; so `φ_k` is fixed by `g` exactly when `row ↦ row·g`
/// permutes the set of distinct first rows.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitCertificate {
    pub generators_checked: usize,
    pub rows: usize,
    pub holds: bool,
}

pub fn orbit_certificate(cosets: &CosetSystem, generators: &[CycMatrix]) -> Result<OrbitCertificate> {
    let rows: Vec<Vec<CyclotomicNumber>> = cosets.first_rows().map(|r| r.to_vec()).collect();
    let index: HashMap<&Vec<CyclotomicNumber>, usize> =
        rows.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let mut holds = true;
    for g in generators {
        let mut hit = vec![false; rows.len()];
        for r in &rows {
            let img = row_times(r, g)?;
            match index.get(&img) {
                Some(&i) if !hit[i] => hit[i] = true,
                _ => {
                    holds = false;
                    break;
                }
            }
        }
        if !holds {
            break;
        }
    }
    Ok(OrbitCertificate {
        generators_checked: generators.len(),
        rows: rows.len(),
        holds,
    })
}

fn row_times(r: &[CyclotomicNumber], g: &CycMatrix) -> Result<Vec<CyclotomicNumber>> {
    let m = g.size();
    if r.len() != m {
        return Err(Error::Dimension(format!("row of length {} against {m}x{m}", r.len())));
    }
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = CyclotomicNumber::zero_of(g.order());
        for (i, x) in r.iter().enumerate() {
            let e = g.get(i, j);
            if !x.is_zero() && !e.is_zero() {
                acc = acc.checked_add(&x.checked_mul(e)?)?;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Lowest common denominator of all coefficients, for diagnostics.
/// Lazily computed `φ_k` of one coset system.
pub struct EpolyFamily {
    pub group: String,
    pub step: u32,
    n: u32,
    rows: Vec<Vec<CyclotomicNumber>>,
    cache: BTreeMap<u32, RatPoly>,
}

impl EpolyFamily {
    pub fn new(group: &str, cosets: &CosetSystem, step: u32) -> Self {
        EpolyFamily {
            group: group.to_string(),
            step: step.max(1),
            n: cosets.field_order(),
            rows: cosets.first_rows().map(|r| r.to_vec()).collect(),
            cache: BTreeMap::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.rows.first().map_or(1, |r| r.len())
    }

    /// Number of distinct first rows (`κ`), also the default generator search bound.
    pub fn kappa(&self) -> usize {
        self.rows.len()
    }

    pub fn phi(&mut self, k: u32) -> Result<RatPoly> {
        if let Some(p) = self.cache.get(&k) {
            return Ok(p.clone());
        }
        let p = power_sum(&self.rows, self.n, k)?;
        self.cache.insert(k, p.clone());
        Ok(p)
    }

    /// Seeds the cache with a previously computed `φ_k`.
    pub fn insert(&mut self, k: u32, p: RatPoly) {
        self.cache.insert(k, p);
    }

    pub fn is_cached(&self, k: u32) -> bool {
        self.cache.contains_key(&k)
    }

    pub fn e_polynomial(&mut self, k: u32) -> Result<EPolynomial> {
        Ok(EPolynomial {
            group: self.group.clone(),
            weight: k,
            value: self.phi(k)?,
        })
    }

    /// `(φ_k, k)` for every listed weight, skipping vanishing ones.
    pub fn generators(&mut self, weights: &[u32]) -> Result<Vec<(RatPoly, u32)>> {
        let mut out = Vec::new();
        for &w in weights {
            let p = self.phi(w)?;
            if !p.is_zero() {
                out.push((p, w));
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightRow {
    pub weight: u32,
    /// Dimension of the ambient invariant space, when a Molien series is supplied.
    pub ambient: Option<u64>,
    pub dim: usize,
    pub certified: bool,
    pub certificate: String,
    pub new_generator: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub group: String,
    pub step: u32,
    pub bound: u32,
    pub rows: Vec<WeightRow>,
    pub generators: Vec<u32>,
}

fn ambient(molien: Option<&PowerSeries>, k: u32) -> Option<u64> {
    molien.and_then(|m| m.dim(k as usize))
}

/// `dim 𝔈_k` at each evaluation degree, where `𝔈` is generated by the `φ_w`
/// for the listed weights. A Molien series, when supplied, is reported
/// alongside and used as a certifying upper bound.
pub fn epoly_ring_dims(
    family: &mut EpolyFamily,
    weights: &[u32],
    eval_degrees: &[u32],
    molien: Option<&PowerSeries>,
    cfg: &SpanConfig,
) -> Result<Vec<WeightRow>> {
    for &w in weights.iter().chain(eval_degrees) {
        if w % family.step != 0 {
            return Err(Error::Invalid(format!(
                "weight {w} is not a multiple of the step {}",
                family.step
            )));
        }
    }
    let gens = family.generators(weights)?;
    let mut alg = Subalgebra::new(&gens)?;
    let mut rows = Vec::new();
    for &k in eval_degrees {
        let amb = ambient(molien, k);
        let out = alg.dimension(k, cfg, amb.map(|a| a as usize))?;
        rows.push(WeightRow {
            weight: k,
            ambient: amb,
            dim: out.dimension,
            certified: out.certified,
            certificate: out.certificate,
            new_generator: None,
        });
    }
    Ok(rows)
}

/// Ascending scan over `step, 2·step, …, bound`: `φ_k` is kept when it is
/// nonzero and not in the degree-`k` span of products of the weights kept so far.
pub fn minimal_generators(
    family: &mut EpolyFamily,
    bound: u32,
    molien: Option<&PowerSeries>,
    cfg: &SpanConfig,
) -> Result<GeneratorReport> {
    let step = family.step;
    let mut accepted: Vec<u32> = Vec::new();
    let mut rows = Vec::new();
    let mut k = step;
    while k <= bound {
        let phi = family.phi(k)?;
        let gens = family.generators(&accepted)?;
        let mut alg = Subalgebra::with_nvars(family.nvars(), &gens)?;
        let (new, certified, certificate, dim) = if phi.is_zero() {
            let d = alg.dimension(k, cfg, ambient(molien, k).map(|a| a as usize))?;
            (false, d.certified, "φ_k vanishes".to_string(), d.dimension)
        } else {
            let m = alg.contains(&phi, cfg)?;
            let cert = m.extended.certificate.clone();
            (!m.member, m.certified, cert, m.extended.dimension)
        };
        if new {
            accepted.push(k);
        }
        rows.push(WeightRow {
            weight: k,
            ambient: ambient(molien, k),
            dim,
            certified,
            certificate,
            new_generator: Some(new),
        });
        k += step;
    }
    Ok(GeneratorReport {
        group: family.group.clone(),
        step,
        bound,
        rows,
        generators: accepted,
    })
}

pub fn denominator(p: &RatPoly) -> BigInt {
    p.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_table_order_eight() {
        let t = root_table(8);
        assert_eq!(t[4], vec![-1, 0, 0, 0]);
        assert_eq!(t[7], vec![0, 0, 0, -1]);
    }

    #[test]
    fn root_table_order_five() {
        let t = root_table(5);
        assert_eq!(t[4], vec![-1, -1, -1, -1]);
        assert_eq!(t[0], vec![1, 0, 0, 0]);
    }

    #[test]
    fn root_table_rational_orders() {
        assert_eq!(root_table(2), vec![vec![1], vec![-1]]);
        assert_eq!(root_table(1), vec![vec![1]]);
    }

    #[test]
    fn unit_and_general_paths_agree() {
        let n = 8;
        let h = CyclotomicNumber::from_ratio(1, 2);
        let rows = vec![
            vec![&CyclotomicNumber::root(n, 1) * &h, CyclotomicNumber::root(n, 3), CyclotomicNumber::zero_of(n)],
            vec![CyclotomicNumber::from_int(1), CyclotomicNumber::root(n, 6), CyclotomicNumber::from_int(-1)],
        ];
        // a row mixing magnitudes forces the general path
        let mixed = vec![rows[0].clone(), rows[1].clone()];
        for k in 0..6 {
            let a = power_sum(&mixed, n, k);
            let b = {
                let mut total = crate::poly::CycPoly::zero(3);
                for r in &mixed {
                    let mut lin = crate::poly::CycPoly::zero(3);
                    for (i, x) in r.iter().enumerate() {
                        lin.add_term(Monomial::var(i), x);
                    }
                    total = total.checked_add(&lin.pow(k)).unwrap();
                }
                total
            };
            match a {
                Ok(p) => {
                    let half = BigRational::new(1.into(), 2.into());
                    assert_eq!(p.to_cyclotomic(), b.scale(&CyclotomicNumber::from_rational(half)));
                }
                Err(_) => assert!(b.to_rational().is_err()),
            }
        }
    }
}
