//! Codes over `Z4`: generator matrices, standard form, duality checks and
//! complete weight enumerators.
//!
//! Words of length at most 64 are stored as two bitplanes, so adding a
//! generator row is a handful of word operations and the residue profile
//! `(n0, n1, n2, n3)` comes from three popcounts.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{IntPoly, Monomial};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Z4Mat {
    pub ncols: usize,
    pub rows: Vec<Vec<u8>>,
}

impl Z4Mat {
    pub fn new(rows: Vec<Vec<u8>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Dimension("ragged generator matrix".into()));
        }
        Ok(Z4Mat {
            ncols,
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(|x| x % 4).collect())
                .collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Block-diagonal sum, the generator matrix of `C1 ⊕ C2`.
    pub fn direct_sum(&self, other: &Z4Mat) -> Z4Mat {
        let n = self.ncols + other.ncols;
        let mut rows = Vec::new();
        for r in &self.rows {
            let mut v = r.clone();
            v.resize(n, 0);
            rows.push(v);
        }
        for r in &other.rows {
            let mut v = vec![0u8; self.ncols];
            v.extend_from_slice(r);
            rows.push(v);
        }
        Z4Mat { ncols: n, rows }
    }

    /// One row per line, entries separated by spaces.
    pub fn to_text(&self) -> String {
        self.rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Parses a generator matrix in either layout: entries separated by
/// whitespace (`&` and `,` are accepted too, and a trailing `\\` is ignored),
/// or packed digit strings such as `10101010011000000010001201012123`.
pub fn parse_genmat(text: &str) -> Result<Z4Mat> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim().trim_end_matches("\\\\").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse {
            line: lineno + 1,
            msg,
        };
        let tokens: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == '&' || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        let digits: Vec<&str> = if tokens.len() == 1 {
            tokens[0].split("").filter(|s| !s.is_empty()).collect()
        } else {
            tokens
        };
        let mut row = Vec::with_capacity(digits.len());
        for d in digits {
            match d {
                "0" | "1" | "2" | "3" => row.push(d.as_bytes()[0] - b'0'),
                "-1" => row.push(3),
                "-2" => row.push(2),
                "-3" => row.push(1),
                other => return Err(err(format!("invalid entry `{other}`"))),
            }
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(err(format!(
                    "row has {} entries, expected {}",
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse {
            line: 0,
            msg: "no rows".into(),
        });
    }
    Z4Mat::new(rows)
}

pub fn inner(a: &[u8], b: &[u8]) -> Result<u8> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("lengths {} and {}", a.len(), b.len())));
    }
    Ok((a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum::<u32>() % 4) as u8)
}

/// Euclidean norm of the integer representative in `{0,1,2,3}^n`, mod 8.
pub fn norm8(a: &[u8]) -> u8 {
    (a.iter().map(|&x| (x as u32) * (x as u32)).sum::<u32>() % 8) as u8
}

/// A code with its standard-form generators: `k1` rows of order 4 followed by
/// `k2` rows of order 2 (all entries even).
#[derive(Clone, Debug, Serialize)]
pub struct Z4Code {
    pub name: String,
    pub length: usize,
    pub original: Z4Mat,
    pub order4: Vec<Vec<u8>>,
    pub order2: Vec<Vec<u8>>,
}

/// Row reduction over `Z4`: unit pivots first, then the binary rank of what
/// is left (which is all even).
pub fn standard_form(mat: &Z4Mat) -> Z4Code {
    let n = mat.ncols;
    let mut rows: Vec<Vec<u8>> = mat.rows.clone();
    let mut order4 = Vec::new();
    for col in 0..n {
        let Some(p) = rows.iter().position(|r| r[col] % 2 == 1) else {
            continue;
        };
        let mut pivot = rows.swap_remove(p);
        if pivot[col] == 3 {
            for x in pivot.iter_mut() {
                *x = (4 - *x) % 4;
            }
        }
        for r in rows.iter_mut().chain(order4.iter_mut()) {
            let a = r[col];
            if a != 0 {
                for (x, &y) in r.iter_mut().zip(&pivot) {
                    *x = (*x + 4 - (a * y) % 4) % 4;
                }
            }
        }
        order4.push(pivot);
    }
    // Remaining rows are even; reduce their halves over GF(2).
    let mut halves: Vec<Vec<u8>> = rows
        .into_iter()
        .map(|r| r.iter().map(|&x| x / 2).collect())
        .filter(|r: &Vec<u8>| r.iter().any(|&x| x != 0))
        .collect();
    let mut basis: Vec<Vec<u8>> = Vec::new();
    for col in 0..n {
        let Some(p) = halves.iter().position(|r| r[col] == 1) else {
            continue;
        };
        let pivot = halves.swap_remove(p);
        for r in halves.iter_mut().chain(basis.iter_mut()) {
            if r[col] == 1 {
                for (x, &y) in r.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        basis.push(pivot);
    }
    let order2 = basis
        .into_iter()
        .map(|r| r.into_iter().map(|x| 2 * x).collect())
        .collect();
    Z4Code {
        name: String::new(),
        length: n,
        original: mat.clone(),
        order4,
        order2,
    }
}

impl Z4Code {
    pub fn from_matrix(name: &str, mat: &Z4Mat) -> Self {
        let mut c = standard_form(mat);
        c.name = name.to_string();
        c
    }

    pub fn k1(&self) -> usize {
        self.order4.len()
    }

    pub fn k2(&self) -> usize {
        self.order2.len()
    }

    /// `|C| = 4^k1 · 2^k2`.
    pub fn size(&self) -> u128 {
        1u128 << (2 * self.k1() + self.k2())
    }

    pub fn generators(&self) -> impl Iterator<Item = &Vec<u8>> {
        self.order4.iter().chain(&self.order2)
    }

    pub fn is_self_orthogonal(&self) -> bool {
        let g: Vec<&Vec<u8>> = self.generators().collect();
        g.iter()
            .enumerate()
            .all(|(i, a)| g[i..].iter().all(|b| inner(a, b).unwrap() == 0))
    }

    /// Self-orthogonal with `|C|² = 4^n`.
    pub fn is_self_dual(&self) -> bool {
        self.is_self_orthogonal() && 2 * self.k1() + self.k2() == self.length
    }

    /// Self-dual with every generator of norm `0 mod 8`. For a
    /// self-orthogonal code the norm mod 8 is additive, so generators suffice.
    pub fn is_type_ii(&self) -> bool {
        self.is_self_dual() && self.generators().all(|g| norm8(g) == 0)
    }

    pub fn check(&self) -> CodeCheck {
        CodeCheck {
            name: self.name.clone(),
            length: self.length,
            k1: self.k1(),
            k2: self.k2(),
            size_log2: 2 * self.k1() + self.k2(),
            self_orthogonal: self.is_self_orthogonal(),
            self_dual: self.is_self_dual(),
            type_ii: self.is_type_ii(),
            length_multiple_of_8: self.length % 8 == 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct CodeCheck {
    pub name: String,
    pub length: usize,
    pub k1: usize,
    pub k2: usize,
    pub size_log2: usize,
    pub self_orthogonal: bool,
    pub self_dual: bool,
    pub type_ii: bool,
    pub length_multiple_of_8: bool,
}

// ------------------------------------------------------------ enumeration

/// A word as two bitplanes: bit `i` of `lo`/`hi` is the low/high bit of entry `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Planes {
    pub lo: u64,
    pub hi: u64,
}

impl Planes {
    pub fn from_word(w: &[u8]) -> Self {
        let mut p = Planes::default();
        for (i, &x) in w.iter().enumerate() {
            p.lo |= ((x & 1) as u64) << i;
            p.hi |= (((x >> 1) & 1) as u64) << i;
        }
        p
    }

    #[inline(always)]
    pub fn add(self, o: Planes) -> Planes {
        let carry = self.lo & o.lo;
        Planes {
            lo: self.lo ^ o.lo,
            hi: self.hi ^ o.hi ^ carry,
        }
    }

    /// `(n1, n2, n3)`; `n0` is the length minus their sum.
    #[inline(always)]
    pub fn profile(self) -> (u32, u32, u32) {
        let n1 = (self.lo & !self.hi).count_ones();
        let n2 = (!self.lo & self.hi).count_ones();
        let n3 = (self.lo & self.hi).count_ones();
        (n1, n2, n3)
    }
}

/// Dense counter indexed by `(n1, n2, n3)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileCounts {
    pub length: usize,
    counts: Vec<u64>,
}

impl ProfileCounts {
    pub fn new(length: usize) -> Self {
        let s = length + 1;
        ProfileCounts {
            length,
            counts: vec![0; s * s * s],
        }
    }

    #[inline(always)]
    fn bump(&mut self, p: Planes) {
        let (a, b, c) = p.profile();
        let s = self.length + 1;
        self.counts[(a as usize * s + b as usize) * s + c as usize] += 1;
    }

    pub fn merge(mut self, other: &ProfileCounts) -> Self {
        for (x, y) in self.counts.iter_mut().zip(&other.counts) {
            *x += y;
        }
        self
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// `Σ count · t0^n0 t1^n1 t2^n2 t3^n3`.
    pub fn to_poly(&self) -> IntPoly {
        let s = self.length + 1;
        let mut terms = Vec::new();
        for (idx, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let n3 = idx % s;
            let n2 = (idx / s) % s;
            let n1 = idx / (s * s);
            let n0 = self.length - n1 - n2 - n3;
            terms.push((
                Monomial::new(&[n0 as u32, n1 as u32, n2 as u32, n3 as u32]),
                BigInt::from(c),
            ));
        }
        IntPoly::from_terms(4, terms)
    }
}

/// Backend that counts codeword profiles.
pub trait CweStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    /// Largest code size this backend accepts regardless of the budget.
    fn max_size(&self) -> u128 {
        u128::MAX
    }
    fn enumerate(&self, code: &Z4Code, workers: usize) -> Result<ProfileCounts>;
}

/// Visits the `4^k1 · 2^k2` distinct codewords of the standard form. Each
/// level adds its generator once per step; after `order` steps the word is
/// back where it started, so no subtraction is needed and the amortised cost
/// is about one row addition per word.
pub struct CosetWalk;

fn walk(levels: &[(Planes, u32)], start: Planes, acc: &mut ProfileCounts) {
    match levels.split_first() {
        None => acc.bump(start),
        Some((&(row, order), rest)) if rest.is_empty() => {
            let mut w = start;
            for _ in 0..order {
                acc.bump(w);
                w = w.add(row);
            }
        }
        Some((&(row, order), rest)) => {
            let mut w = start;
            for _ in 0..order {
                walk(rest, w, acc);
                w = w.add(row);
            }
        }
    }
}

fn levels_of(code: &Z4Code) -> Result<Vec<(Planes, u32)>> {
    if code.length > 64 {
        return Err(Error::CodeTooLong(code.length));
    }
    Ok(code
        .order4
        .iter()
        .map(|r| (Planes::from_word(r), 4))
        .chain(code.order2.iter().map(|r| (Planes::from_word(r), 2)))
        .collect())
}

impl CweStrategy for CosetWalk {
    fn name(&self) -> &'static str {
        "walk"
    }

    fn enumerate(&self, code: &Z4Code, workers: usize) -> Result<ProfileCounts> {
        let levels = levels_of(code)?;
        // Split the outermost levels into independent prefixes.
        let mut split = 0;
        let mut prefixes = 1usize;
        while split < levels.len() && prefixes < 64 * workers.max(1) && levels.len() - split > 4 {
            prefixes *= levels[split].1 as usize;
            split += 1;
        }
        let (outer, inner) = levels.split_at(split);
        let mut starts = vec![Planes::default()];
        for &(row, order) in outer {
            let mut next = Vec::with_capacity(starts.len() * order as usize);
            for s in &starts {
                let mut w = *s;
                for _ in 0..order {
                    next.push(w);
                    w = w.add(row);
                }
            }
            starts = next;
        }
        let n = code.length;
        let run = |chunk: &[Planes]| {
            let mut acc = ProfileCounts::new(n);
            for &s in chunk {
                walk(inner, s, &mut acc);
            }
            acc
        };
        if workers <= 1 {
            return Ok(run(&starts));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Invalid(e.to_string()))?;
        let chunk = starts.len().div_ceil(workers * 4).max(1);
        let partials: Vec<ProfileCounts> =
            pool.install(|| starts.par_chunks(chunk).map(run).collect());
        Ok(partials
            .iter()
            .fold(ProfileCounts::new(n), |acc, p| acc.merge(p)))
    }
}

/// Brute-force oracle: every `Z4` combination of the original generator
/// rows, deduplicated. Only for small matrices.
pub struct SpanWalk;

impl CweStrategy for SpanWalk {
    fn name(&self) -> &'static str {
        "span"
    }

    fn max_size(&self) -> u128 {
        1 << 20
    }

    fn enumerate(&self, code: &Z4Code, _workers: usize) -> Result<ProfileCounts> {
        if code.length > 64 {
            return Err(Error::CodeTooLong(code.length));
        }
        let rows: Vec<Planes> = code.original.rows.iter().map(|r| Planes::from_word(r)).collect();
        let steps = 1u128 << (2 * rows.len());
        if steps > 1 << 24 {
            return Err(Error::BudgetExceeded {
                required: steps,
                budget: 1 << 24,
            });
        }
        let mut seen: HashSet<Planes> = HashSet::new();
        seen.insert(Planes::default());
        for r in rows {
            let current: Vec<Planes> = seen.iter().copied().collect();
            for w in current {
                let mut x = w;
                for _ in 0..3 {
                    x = x.add(r);
                    seen.insert(x);
                }
            }
        }
        let mut acc = ProfileCounts::new(code.length);
        for w in seen {
            acc.bump(w);
        }
        Ok(acc)
    }
}

#[derive(Clone)]
pub struct CweRegistry {
    entries: Vec<Arc<dyn CweStrategy>>,
}

impl Default for CweRegistry {
    fn default() -> Self {
        CweRegistry {
            entries: vec![Arc::new(CosetWalk), Arc::new(SpanWalk)],
        }
    }
}

impl CweRegistry {
    pub fn register(&mut self, s: Arc<dyn CweStrategy>) {
        self.entries.retain(|e| e.name() != s.name());
        self.entries.push(s);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CweStrategy>> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .cloned()
            .ok_or_else(|| Error::Unknown {
                kind: "enumeration strategy",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }
}

/// Complete weight enumerator under a codeword budget.
pub fn complete_weight_enumerator(
    code: &Z4Code,
    strategy: &dyn CweStrategy,
    workers: usize,
    budget: u128,
) -> Result<IntPoly> {
    let size = code.size();
    let limit = budget.min(strategy.max_size());
    if size > limit {
        return Err(Error::BudgetExceeded {
            required: size,
            budget: limit,
        });
    }
    Ok(strategy.enumerate(code, workers)?.to_poly())
}

// ------------------------------------------------------------ bundled data

/// A generator matrix or a literal enumerator shipped with the crate.
#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub length: usize,
    #[serde(default)]
    pub matrix: Option<String>,
    #[serde(default)]
    pub cwe: Option<String>,
    pub note: String,
}

const MANIFEST: &str = include_str!("../data/codes/manifest.json");
const FIXTURES: &str = include_str!("../data/cwe_fixtures.txt");

fn bundled_matrix(file: &str) -> Option<&'static str> {
    Some(match file {
        "o8.txt" => include_str!("../data/codes/o8.txt"),
        "k8.txt" => include_str!("../data/codes/k8.txt"),
        "k16.txt" => include_str!("../data/codes/k16.txt"),
        "rm16.txt" => include_str!("../data/codes/rm16.txt"),
        "g24.txt" => include_str!("../data/codes/g24.txt"),
        "q24a.txt" => include_str!("../data/codes/q24a.txt"),
        "q24b.txt" => include_str!("../data/codes/q24b.txt"),
        "q32.txt" => include_str!("../data/codes/q32.txt"),
        _ => return None,
    })
}

pub fn manifest() -> Vec<ManifestEntry> {
    serde_json::from_str(MANIFEST).expect("bundled manifest is valid JSON")
}

/// The generator matrix of a bundled code.
pub fn builtin_matrix(name: &str) -> Result<Z4Mat> {
    let entries = manifest();
    let available = entries
        .iter()
        .filter(|e| e.matrix.is_some())
        .map(|e| e.name.clone())
        .collect::<Vec<_>>();
    if let Some(n) = name.strip_prefix("zero") {
        if let Ok(len) = n.parse::<usize>() {
            return Z4Mat::new(vec![vec![0; len]]);
        }
    }
    let entry = entries
        .iter()
        .find(|e| e.name == name && e.matrix.is_some())
        .ok_or_else(|| Error::Unknown {
            kind: "code",
            name: name.to_string(),
            available: available.join(", "),
        })?;
    let file = entry.matrix.as_deref().unwrap();
    parse_genmat(bundled_matrix(file).ok_or_else(|| Error::Invalid(format!("missing data file {file}")))?)
}

pub fn builtin_code(name: &str) -> Result<Z4Code> {
    Ok(Z4Code::from_matrix(name, &builtin_matrix(name)?))
}

/// Literal enumerators copied from print: `(name, polynomial)`.
pub fn cwe_fixtures() -> Vec<(String, IntPoly)> {
    FIXTURES
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let (name, text) = l.split_once(':').expect("fixture line has a name");
            let p = crate::poly::parse_poly_text(4, text).expect("fixture parses");
            let ip = p.map_coeffs(|c| c.to_integer());
            (name.trim().to_string(), ip)
        })
        .collect()
}

pub fn cwe_fixture(name: &str) -> Result<IntPoly> {
    cwe_fixtures()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, p)| p)
        .ok_or_else(|| Error::Unknown {
            kind: "fixture",
            name: name.to_string(),
            available: cwe_fixtures()
                .iter()
                .map(|(n, _)| n.clone())
                .collect::<Vec<_>>()
                .join(", "),
        })
}
