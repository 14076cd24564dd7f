//! Dimensions of spans of homogeneous polynomials, and of the graded pieces
//! of the subalgebra generated by a list of homogeneous generators.
//!
//! Products are formed exactly over the integers (generators are first
//! scaled to primitive integer polynomials, which does not change any span)
//! as long as the coefficient matrix stays under `exact_entry_limit`. Above
//! that, products are formed directly modulo several random primes and the
//! rank is accepted when all primes agree; such results are marked
//! uncertified unless they hit an upper bound (full row rank, or a supplied
//! bound such as a Molien coefficient).

use std::collections::HashMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{exponent_vectors, monomial_count, monomials_of_degree, IntPoly, Monomial, ProductCache, RatPoly};
use crate::rank::{bigint_mod, modular_echelon_dense, random_primes, IntMatrix, RankEngine, RankOutcome};

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct SpanOutcome {
    pub degree: u32,
    pub products: usize,
    pub columns: usize,
    pub dimension: usize,
    pub certified: bool,
    /// How the dimension was established.
    pub certificate: String,
    pub primes: Vec<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Membership {
    pub member: bool,
    pub certified: bool,
    pub basis: SpanOutcome,
    pub extended: SpanOutcome,
}

#[derive(Clone)]
pub struct SpanConfig {
    pub engine: RankEngine,
    /// Matrices with more `rows × monomials` entries use modular products.
    pub exact_entry_limit: u64,
    /// Number of primes for modular products (at least 3 are used).
    pub modular_primes: usize,
    pub seed: u64,
}

impl Default for SpanConfig {
    fn default() -> Self {
        SpanConfig {
            engine: RankEngine::default(),
            exact_entry_limit: 20_000_000,
            modular_primes: 3,
            seed: 0x5eed_0e8,
        }
    }
}

fn common_degree(polys: &[RatPoly]) -> Result<Option<u32>> {
    let mut deg = None;
    for p in polys {
        if p.is_zero() {
            continue;
        }
        let d = p.homogeneous_degree().ok_or(Error::Inhomogeneous)?;
        match deg {
            None => deg = Some(d),
            Some(e) if e == d => {}
            Some(e) => return Err(Error::DegreeMismatch { expected: e, found: d }),
        }
    }
    Ok(deg)
}

fn outcome_from_rank(degree: u32, r: RankOutcome) -> SpanOutcome {
    let certificate = if r.certified {
        format!("{} rank", r.strategy)
    } else {
        format!("{} rank, agreement across {} primes", r.strategy, r.primes.len())
    };
    SpanOutcome {
        degree,
        products: r.rows,
        columns: r.cols,
        dimension: r.rank,
        certified: r.certified,
        certificate,
        primes: r.primes,
    }
}

/// Exact rank over `Q` of a list of homogeneous polynomials of one degree.
pub fn span_dimension(polys: &[RatPoly], engine: &RankEngine) -> Result<SpanOutcome> {
    let degree = common_degree(polys)?.unwrap_or(0);
    let m = IntMatrix::from_rat_polys(polys);
    Ok(outcome_from_rank(degree, engine.rank(&m)?))
}

/// Whether `f` lies in the rational span of `basis`.
pub fn in_span(f: &RatPoly, basis: &[RatPoly], engine: &RankEngine) -> Result<Membership> {
    let mut all = basis.to_vec();
    all.push(f.clone());
    common_degree(&all)?;
    let b = span_dimension(basis, engine)?;
    let e = span_dimension(&all, engine)?;
    Ok(Membership {
        member: b.dimension == e.dimension,
        certified: b.certified && e.certified,
        basis: b,
        extended: e,
    })
}

/// Graded pieces of the algebra generated by homogeneous polynomials.
pub struct Subalgebra {
    nvars: usize,
    degrees: Vec<u32>,
    cache: ProductCache<BigInt>,
}

impl Subalgebra {
    /// Zero generators are dropped; every other generator must be
    /// homogeneous of its stated degree.
    pub fn new(generators: &[(RatPoly, u32)]) -> Result<Self> {
        Self::with_nvars(generators.first().map_or(1, |(g, _)| g.nvars()), generators)
    }

    /// Like [`Subalgebra::new`], but fixes the variable count even when the
    /// generator list is empty.
    pub fn with_nvars(nvars: usize, generators: &[(RatPoly, u32)]) -> Result<Self> {
        let mut gens = Vec::new();
        for (g, d) in generators {
            if g.nvars() != nvars {
                return Err(Error::VarMismatch(nvars, g.nvars()));
            }
            if g.is_zero() {
                continue;
            }
            match g.homogeneous_degree() {
                None => return Err(Error::Inhomogeneous),
                Some(e) if e != *d => return Err(Error::DegreeMismatch { expected: *d, found: e }),
                Some(_) => {}
            }
            gens.push((g.to_primitive().0, *d));
        }
        Ok(Subalgebra {
            nvars,
            degrees: gens.iter().map(|(_, d)| *d).collect(),
            cache: ProductCache::new(gens),
        })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn generator_degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn product_count(&self, k: u32) -> usize {
        exponent_vectors(&self.degrees, k).len()
    }

    /// Exact integer products of total degree `k`.
    pub fn products(&mut self, k: u32) -> Vec<IntPoly> {
        let exps = self.cache.exponent_vectors(k);
        let out = exps.iter().map(|e| self.cache.product(e)).collect();
        self.cache.evict_below(k);
        out
    }

    fn use_exact(&self, rows: usize, k: u32, cfg: &SpanConfig) -> bool {
        rows as u64 * monomial_count(self.nvars, k) <= cfg.exact_entry_limit
    }

    /// Dimension of the degree-`k` piece. `bound`, when given, must be a
    /// known upper bound (e.g. the Molien coefficient of an invariant ring
    /// containing every generator); reaching it certifies the result.
    pub fn dimension(&mut self, k: u32, cfg: &SpanConfig, bound: Option<usize>) -> Result<SpanOutcome> {
        let rows = self.product_count(k);
        let mut out = if self.use_exact(rows, k, cfg) {
            let prods = self.products(k);
            let m = IntMatrix::from_int_polys(&prods);
            if let Some(b) = bound {
                let p = random_primes(1, cfg.seed, 1)[0];
                let r = modular_echelon_dense(reduce_rows(&m, p), p).rank;
                if r == b {
                    return Ok(SpanOutcome {
                        degree: k,
                        products: rows,
                        columns: m.ncols(),
                        dimension: r,
                        certified: true,
                        certificate: "modular lower bound meets the supplied upper bound".into(),
                        primes: vec![p],
                    });
                }
            }
            outcome_from_rank(k, cfg.engine.rank(&m)?)
        } else {
            self.modular_dimension(k, cfg, None)?
        };
        out.degree = k;
        if !out.certified && bound == Some(out.dimension) {
            out.certified = true;
            out.certificate = format!("{}; meets the supplied upper bound", out.certificate);
        }
        Ok(out)
    }

    /// Rank of the degree-`k` products (plus `extra`, if given) formed modulo
    /// several primes.
    pub fn modular_dimension(&self, k: u32, cfg: &SpanConfig, extra: Option<&RatPoly>) -> Result<SpanOutcome> {
        let gens = self.cache.generators();
        let exps = exponent_vectors(&self.degrees, k);
        let primes = random_primes(cfg.modular_primes.max(3), cfg.seed, 1);
        let columns = monomial_count(self.nvars, k) as usize;
        let extra_int = extra.map(|f| f.to_primitive().0);
        let mut ranks = Vec::new();
        for &p in &primes {
            let mut rows = ModularProducts::new(gens, self.nvars, p).rows(&exps, k);
            if let Some(f) = &extra_int {
                rows.push(dense_row(f, self.nvars, k, p));
            }
            ranks.push(modular_echelon_dense(rows, p).rank);
        }
        if ranks.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Certification(format!(
                "modular ranks disagree across primes at degree {k}: {ranks:?}"
            )));
        }
        let nrows = exps.len() + usize::from(extra.is_some());
        let full = ranks[0] == nrows;
        Ok(SpanOutcome {
            degree: k,
            products: nrows,
            columns,
            dimension: ranks[0],
            certified: full,
            certificate: if full {
                "modular products, full row rank".into()
            } else {
                format!("modular products, agreement across {} primes", primes.len())
            },
            primes,
        })
    }

    /// Whether `f` lies in the degree-`k` piece.
    pub fn contains(&mut self, f: &RatPoly, cfg: &SpanConfig) -> Result<Membership> {
        let k = match f.homogeneous_degree() {
            Some(k) => k,
            None if f.is_zero() => 0,
            None => return Err(Error::Inhomogeneous),
        };
        if f.nvars() != self.nvars {
            return Err(Error::VarMismatch(self.nvars, f.nvars()));
        }
        let rows = self.product_count(k) + 1;
        if self.use_exact(rows, k, cfg) {
            let prods: Vec<RatPoly> = self.products(k).iter().map(IntPoly::to_rational).collect();
            in_span(f, &prods, &cfg.engine)
        } else {
            let b = self.modular_dimension(k, cfg, None)?;
            let e = self.modular_dimension(k, cfg, Some(f))?;
            Ok(Membership {
                member: b.dimension == e.dimension,
                certified: false,
                basis: b,
                extended: e,
            })
        }
    }
}

fn reduce_rows(m: &IntMatrix, p: u64) -> Vec<Vec<u64>> {
    m.rows()
        .iter()
        .map(|r| {
            let mut dense = vec![0u64; m.ncols()];
            for (j, v) in r {
                dense[*j as usize] = bigint_mod(v, p);
            }
            dense
        })
        .collect()
}

/// Position of a monomial of total degree `d` in a dense `(d+1)^(nvars-1)` box.
#[inline]
fn box_index(m: Monomial, nvars: usize, d: u32) -> usize {
    let s = d as usize + 1;
    let mut idx = 0usize;
    for i in 0..nvars.saturating_sub(1) {
        idx = idx * s + m.exponent(i) as usize;
    }
    idx
}

fn box_size(nvars: usize, d: u32) -> usize {
    (d as usize + 1).pow(nvars.saturating_sub(1) as u32)
}

fn dense_row(f: &IntPoly, nvars: usize, k: u32, p: u64) -> Vec<u64> {
    let col = column_map(nvars, k);
    let mut row = vec![0u64; monomial_count(nvars, k) as usize];
    for (m, c) in f.terms() {
        row[col[box_index(*m, nvars, k)] as usize] = bigint_mod(c, p);
    }
    row
}

/// Box index → column in descending grlex order.
fn column_map(nvars: usize, k: u32) -> Vec<u32> {
    let mut col = vec![u32::MAX; box_size(nvars, k)];
    for (j, m) in monomials_of_degree(nvars, k).iter().enumerate() {
        col[box_index(*m, nvars, k)] = j as u32;
    }
    col
}

type SparseMod = Vec<(Monomial, u64)>;

struct ModularProducts {
    nvars: usize,
    p: u64,
    gens: Vec<(SparseMod, u32)>,
    memo: HashMap<Vec<u32>, (SparseMod, u32)>,
}

impl ModularProducts {
    fn new(gens: &[(IntPoly, u32)], nvars: usize, p: u64) -> Self {
        let gens = gens
            .iter()
            .map(|(g, d)| {
                let t: SparseMod = g
                    .terms()
                    .map(|(m, c)| (*m, bigint_mod(c, p)))
                    .filter(|(_, c)| *c != 0)
                    .collect();
                (t, *d)
            })
            .collect();
        ModularProducts {
            nvars,
            p,
            gens,
            memo: HashMap::new(),
        }
    }

    fn mul(&self, a: &(SparseMod, u32), b: &(SparseMod, u32)) -> (SparseMod, u32) {
        let d = a.1 + b.1;
        let p = self.p as u128;
        let mut acc = vec![0u128; box_size(self.nvars, d)];
        let mut touched = vec![false; acc.len()];
        let mut order = Vec::new();
        for (ma, ca) in &a.0 {
            for (mb, cb) in &b.0 {
                let m = ma.times(*mb);
                let i = box_index(m, self.nvars, d);
                if !touched[i] {
                    touched[i] = true;
                    order.push((i, m));
                }
                let v = acc[i] + *ca as u128 * *cb as u128;
                // keep well clear of overflow
                acc[i] = if v >= 1u128 << 126 { v % p } else { v };
            }
        }
        let terms = order
            .into_iter()
            .filter_map(|(i, m)| {
                let c = (acc[i] % p) as u64;
                (c != 0).then_some((m, c))
            })
            .collect();
        (terms, d)
    }

    fn product(&mut self, exps: &[u32]) -> (SparseMod, u32) {
        if let Some(p) = self.memo.get(exps) {
            return p.clone();
        }
        let Some(j) = exps.iter().position(|&e| e > 0) else {
            return (vec![(Monomial::ONE, 1)], 0);
        };
        let mut smaller = exps.to_vec();
        smaller[j] -= 1;
        let base = self.product(&smaller);
        let out = self.mul(&base, &self.gens[j].clone());
        self.memo.insert(exps.to_vec(), out.clone());
        out
    }

    fn rows(mut self, exps: &[Vec<u32>], k: u32) -> Vec<Vec<u64>> {
        let col = column_map(self.nvars, k);
        let width = monomial_count(self.nvars, k) as usize;
        exps.iter()
            .map(|e| {
                let (terms, _) = self.product(e);
                let mut row = vec![0u64; width];
                for (m, c) in terms {
                    row[col[box_index(m, self.nvars, k)] as usize] = c;
                }
                row
            })
            .collect()
    }
}
