//! Finite matrix groups over a cyclotomic field: closure, the first-row
//! stabiliser `K` with representatives of `K\G`, and Molien series.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::poly::parse_rational;
use crate::series::PowerSeries;

/// Square matrix whose entries all live in `Q(ζ_order)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycMatrix {
    size: usize,
    order: u32,
    entries: Vec<CyclotomicNumber>,
}

impl CycMatrix {
    /// Row-major construction; every entry is embedded into `Q(ζ_order)`.
    pub fn new(order: u32, rows: Vec<Vec<CyclotomicNumber>>) -> Result<Self> {
        let size = rows.len();
        let mut entries = Vec::with_capacity(size * size);
        for row in rows {
            if row.len() != size {
                return Err(Error::Dimension(format!(
                    "row of length {} in a {size}x{size} matrix",
                    row.len()
                )));
            }
            for e in row {
                entries.push(e.embed(order)?);
            }
        }
        Ok(CycMatrix {
            size,
            order,
            entries,
        })
    }

    pub fn identity(order: u32, size: usize) -> Self {
        Self::diagonal(order, vec![CyclotomicNumber::one(); size]).unwrap()
    }

    pub fn diagonal(order: u32, diag: Vec<CyclotomicNumber>) -> Result<Self> {
        let n = diag.len();
        let rows = diag
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                (0..n)
                    .map(|j| if i == j { d.clone() } else { CyclotomicNumber::from_int(0) })
                    .collect()
            })
            .collect();
        Self::new(order, rows)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> &CyclotomicNumber {
        &self.entries[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[CyclotomicNumber] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[CyclotomicNumber]> {
        self.entries.chunks(self.size)
    }

    pub fn scale(&self, s: &CyclotomicNumber) -> Result<Self> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.checked_mul(s))
            .collect::<Result<Vec<_>>>()?;
        // Scalar may be of a different order only if rational.
        let entries = entries
            .into_iter()
            .map(|e| e.embed(self.order))
            .collect::<Result<Vec<_>>>()?;
        Ok(CycMatrix {
            size: self.size,
            order: self.order,
            entries,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.size, self.size, other.size, other.size
            )));
        }
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, other.order));
        }
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CyclotomicNumber::zero_of(self.order);
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                entries.push(acc);
            }
        }
        Ok(CycMatrix {
            size: n,
            order: self.order,
            entries,
        })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.size).all(|i| {
            (0..self.size).all(|j| {
                let e = self.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    /// `det(I - tA)` as coefficients of `1, t, …, t^m`, via sums of principal minors.
    pub fn char_poly_reversed(&self) -> Vec<CyclotomicNumber> {
        let n = self.size;
        let mut out = vec![CyclotomicNumber::zero_of(self.order); n + 1];
        out[0] = CyclotomicNumber::one().embed(self.order).unwrap();
        for mask in 1u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let minor = self.minor_det(&idx);
            let k = idx.len();
            out[k] = if k % 2 == 0 {
                &out[k] + &minor
            } else {
                &out[k] - &minor
            };
        }
        out
    }

    fn minor_det(&self, idx: &[usize]) -> CyclotomicNumber {
        // Cofactor expansion along the first row of the principal submatrix.
        fn det(m: &CycMatrix, rows: &[usize], cols: &[usize]) -> CyclotomicNumber {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc = CyclotomicNumber::zero_of(m.order);
            for (c, &col) in cols.iter().enumerate() {
                let a = m.get(rows[0], col);
                if a.is_zero() {
                    continue;
                }
                let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != col).collect();
                let term = a * &det(m, &rows[1..], &rest);
                acc = if c % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
        det(self, idx, idx)
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            order: self.order,
            rows: self
                .rows()
                .map(|r| {
                    r.iter()
                        .map(|e| e.coeffs().iter().map(|c| c.to_string()).collect())
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let rows = json
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .map(|entry| {
                        let coeffs = entry
                            .iter()
                            .map(|c| parse_rational(c).map_err(|msg| Error::Parse { line: i + 1, msg }))
                            .collect::<Result<Vec<BigRational>>>()?;
                        Ok(CyclotomicNumber::from_coeffs(json.order, coeffs))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.order, rows)
    }
}

impl fmt::Debug for CycMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CycMatrix(order {}) [", self.order)?;
        for r in self.rows() {
            let cells: Vec<String> = r.iter().map(|e| e.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Matrix file encoding: each entry is the coefficient list of `1, z, z², …`
/// in `Q(ζ_order)`, coefficients written as `p/q` strings.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub order: u32,
    pub rows: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    generators: Vec<CycMatrix>,
    elements: Vec<CycMatrix>,
}

impl FiniteMatrixGroup {
    /// Breadth-first closure under right multiplication by the generators.
    pub fn closure(generators: Vec<CycMatrix>, cap: usize) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::Invalid("a group needs at least one generator".into()))?;
        let (size, order) = (first.size(), first.order());
        for g in &generators {
            if g.size() != size {
                return Err(Error::Dimension("generators of different sizes".into()));
            }
            if g.order() != order {
                return Err(Error::OrderMismatch(order, g.order()));
            }
        }
        let id = CycMatrix::identity(order, size);
        let mut seen: HashSet<CycMatrix> = HashSet::new();
        let mut elements = vec![id.clone()];
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &generators {
                let y = x.checked_mul(g)?;
                if !seen.contains(&y) {
                    if elements.len() >= cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    seen.insert(y.clone());
                    elements.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(FiniteMatrixGroup {
            generators,
            elements,
        })
    }

    /// Reassembles a group from cached elements without recomputing the closure.
    pub fn from_parts(generators: Vec<CycMatrix>, elements: Vec<CycMatrix>) -> Self {
        FiniteMatrixGroup {
            generators,
            elements,
        }
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[CycMatrix] {
        &self.generators
    }

    pub fn elements(&self) -> &[CycMatrix] {
        &self.elements
    }

    pub fn dimension(&self) -> usize {
        self.generators[0].size()
    }

    pub fn field_order(&self) -> u32 {
        self.generators[0].order()
    }

    /// `(1/|G|) Σ_σ 1/det(I - tσ)` up to `t^truncation`.
    ///
    /// Elements sharing a characteristic polynomial are expanded once.
    pub fn molien_series(&self, truncation: usize) -> Result<PowerSeries> {
        let mut classes: HashMap<Vec<CyclotomicNumber>, u64> = HashMap::new();
        for g in &self.elements {
            *classes.entry(g.char_poly_reversed()).or_default() += 1;
        }
        let order = self.field_order();
        let mut total = vec![CyclotomicNumber::zero_of(order); truncation + 1];
        let mut keys: Vec<_> = classes.into_iter().collect();
        keys.sort_by_key(|(p, _)| format!("{p:?}"));
        for (poly, count) in keys {
            assert!(poly[0].is_one(), "det(I - tσ) must have constant term 1");
            let inv0 = poly[0].inv()?;
            let mut s: Vec<CyclotomicNumber> = Vec::with_capacity(truncation + 1);
            for n in 0..=truncation {
                let mut acc = if n == 0 {
                    CyclotomicNumber::one().embed(order)?
                } else {
                    CyclotomicNumber::zero_of(order)
                };
                for j in 1..poly.len().min(n + 1) {
                    if !poly[j].is_zero() {
                        acc = &acc - &(&poly[j] * &s[n - j]);
                    }
                }
                s.push(&acc * &inv0);
            }
            let c = CyclotomicNumber::from_int(count as i64);
            for (t, x) in total.iter_mut().zip(&s) {
                *t = &*t + &(x * &c);
            }
        }
        let inv_order = BigRational::new(1.into(), (self.order() as i64).into());
        let coeffs = total
            .iter()
            .enumerate()
            .map(|(k, c)| {
                c.to_rational()
                    .map(|r| r * &inv_order)
                    .ok_or_else(|| Error::NotRational(format!("Molien coefficient at t^{k}: {c}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PowerSeries::new(coeffs))
    }

    pub fn coset_system(&self) -> Result<CosetSystem> {
        let m = self.dimension();
        let order = self.field_order();
        let mut unit_row = vec![CyclotomicNumber::zero_of(order); m];
        unit_row[0] = CyclotomicNumber::one().embed(order)?;
        let stabilizer: Vec<CycMatrix> = self
            .elements
            .iter()
            .filter(|g| g.row(0) == unit_row.as_slice())
            .cloned()
            .collect();
        let kset: HashSet<&CycMatrix> = stabilizer.iter().collect();
        for a in &stabilizer {
            for b in &stabilizer {
                if !kset.contains(&a.checked_mul(b)?) {
                    return Err(Error::NotSubgroup);
                }
            }
        }
        let mut seen: HashSet<Vec<CyclotomicNumber>> = HashSet::new();
        let mut reps = Vec::new();
        let mut multiplicity: HashMap<Vec<CyclotomicNumber>, usize> = HashMap::new();
        for g in &self.elements {
            let r = g.row(0).to_vec();
            *multiplicity.entry(r.clone()).or_default() += 1;
            if seen.insert(r) {
                reps.push(g.clone());
            }
        }
        if reps.len() * stabilizer.len() != self.order()
            || multiplicity.values().any(|&c| c != stabilizer.len())
        {
            return Err(Error::NotSubgroup);
        }
        Ok(CosetSystem {
            group_order: self.order(),
            stabilizer,
            reps,
        })
    }
}

/// Right cosets `K\G` of the first-row stabiliser, one representative per
/// distinct first row.
#[derive(Clone, Debug)]
pub struct CosetSystem {
    group_order: usize,
    stabilizer: Vec<CycMatrix>,
    reps: Vec<CycMatrix>,
}

impl CosetSystem {
    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn stabilizer(&self) -> &[CycMatrix] {
        &self.stabilizer
    }

    pub fn stabilizer_order(&self) -> usize {
        self.stabilizer.len()
    }

    pub fn reps(&self) -> &[CycMatrix] {
        &self.reps
    }

    pub fn kappa(&self) -> usize {
        self.reps.len()
    }

    pub fn first_rows(&self) -> impl Iterator<Item = &[CyclotomicNumber]> {
        self.reps.iter().map(|r| r.row(0))
    }

    pub fn nvars(&self) -> usize {
        self.reps[0].size()
    }

    pub fn field_order(&self) -> u32 {
        self.reps[0].order()
    }
}

/// Parses `1/2`, `-3` style rationals into field elements (helper for fixtures).
pub fn rational(p: i64, q: i64) -> CyclotomicNumber {
    CyclotomicNumber::from_rational(BigRational::new(p.into(), q.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32, k: i64) -> CyclotomicNumber {
        CyclotomicNumber::root(n, k)
    }

    #[test]
    fn trivial_group() {
        let g = FiniteMatrixGroup::closure(vec![CycMatrix::identity(8, 4)], 10).unwrap();
        assert_eq!(g.order(), 1);
        let c = g.coset_system().unwrap();
        assert_eq!(c.stabilizer_order(), 1);
        assert_eq!(c.kappa(), 1);
        let s = g.molien_series(6).unwrap();
        let expected: Vec<i64> = (0..=6).map(|k| crate::poly::monomial_count(4, k) as i64).collect();
        assert_eq!(s.to_i64().unwrap(), expected);
    }

    #[test]
    fn cyclic_group_of_order_eight() {
        let d = CycMatrix::diagonal(8, vec![z(8, 1), z(8, 7)]).unwrap();
        let g = FiniteMatrixGroup::closure(vec![d], 100).unwrap();
        assert_eq!(g.order(), 8);
        // Invariants of diag(ζ, ζ^-1) on two variables: x^a y^b with a ≡ b mod 8.
        let s = g.molien_series(16).unwrap().to_i64().unwrap();
        let brute: Vec<i64> = (0..=16i64)
            .map(|k| (0..=k).filter(|a| (a - (k - a)).rem_euclid(8) == 0).count() as i64)
            .collect();
        assert_eq!(s, brute);
    }

    #[test]
    fn cap_exceeded() {
        let d = CycMatrix::diagonal(1, vec![CyclotomicNumber::from_int(2)]).unwrap();
        assert!(matches!(
            FiniteMatrixGroup::closure(vec![d], 50),
            Err(Error::CapExceeded { cap: 50 })
        ));
    }

    #[test]
    fn char_poly() {
        let d = CycMatrix::diagonal(8, vec![z(8, 2), z(8, 6)]).unwrap();
        // det(I - t·diag(i, -i)) = 1 + t^2
        let p = d.char_poly_reversed();
        assert!(p[0].is_one());
        assert!(p[1].is_zero());
        assert!(p[2].is_one());
    }

    #[test]
    fn json_round_trip() {
        let m = CycMatrix::new(8, vec![vec![z(8, 1), rational(1, 2)], vec![z(8, 3), z(8, 6)]]).unwrap();
        let back = CycMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
