//! Truncated rational power series and closed-form dimension formulas.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<BigRational>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        PowerSeries { coeffs }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Option<&BigRational> {
        self.coeffs.get(k)
    }

    /// Coefficients as machine integers, or `None` if any is fractional or huge.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer().to_i64()).flatten())
            .collect()
    }

    pub fn dim(&self, k: usize) -> Option<u64> {
        self.coeffs
            .get(k)
            .and_then(|c| c.is_integer().then(|| c.to_integer().to_u64()).flatten())
    }
}

impl fmt::Display for PowerSeries {
    /// One `k: c_k` line per degree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            writeln!(f, "{k}: {c}")?;
        }
        Ok(())
    }
}

/// Sparse integer polynomial in `t`, as `(exponent, coefficient)` pairs.
pub type TPoly = Vec<(u32, i64)>;

/// `Π numerator_i^{m_i} / Π denominator_j^{n_j}` with integer factors.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFormula {
    pub numerator: Vec<(TPoly, u32)>,
    pub denominator: Vec<(TPoly, u32)>,
}

impl RationalFormula {
    pub fn new(numerator: Vec<(TPoly, u32)>, denominator: Vec<(TPoly, u32)>) -> Result<Self> {
        let f = RationalFormula {
            numerator,
            denominator,
        };
        let c0: i64 = f
            .denominator
            .iter()
            .map(|(p, m)| constant_term(p).pow(*m))
            .product();
        if c0.abs() != 1 {
            return Err(Error::Invalid(
                "denominator must be a unit at t = 0".into(),
            ));
        }
        Ok(f)
    }

    /// Parses forms such as `(1+t^8)(1+t^16)^2/((1-t^8)^3(1-t^24))` or `1/((1-t^4)(1-t^6))`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let (num, den) = split_top_level_slash(&s)?;
        let numerator = parse_product(num)?;
        let denominator = match den {
            Some(d) => parse_product(strip_outer_parens(d))?,
            None => Vec::new(),
        };
        Self::new(numerator, denominator)
    }

    /// Exact series expansion up to `t^truncation`.
    pub fn expand(&self, truncation: usize) -> PowerSeries {
        let n = truncation + 1;
        let mut num = vec![BigInt::zero(); n];
        num[0] = BigInt::one();
        for (p, m) in &self.numerator {
            for _ in 0..*m {
                num = mul_trunc(&num, p, n);
            }
        }
        for (p, m) in &self.denominator {
            for _ in 0..*m {
                num = div_trunc(&num, p, n);
            }
        }
        PowerSeries::new(num.into_iter().map(BigRational::from_integer).collect())
    }
}

fn constant_term(p: &TPoly) -> i64 {
    p.iter().filter(|(e, _)| *e == 0).map(|(_, c)| c).sum()
}

fn mul_trunc(a: &[BigInt], p: &TPoly, n: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for &(e, c) in p {
            let k = i + e as usize;
            if k < n {
                out[k] += x * c;
            }
        }
    }
    out
}

/// Series division by a polynomial whose constant term is ±1.
fn div_trunc(a: &[BigInt], p: &TPoly, n: usize) -> Vec<BigInt> {
    let c0 = constant_term(p);
    let mut out = vec![BigInt::zero(); n];
    for k in 0..n {
        let mut acc = a[k].clone();
        for &(e, c) in p {
            let e = e as usize;
            if e > 0 && e <= k {
                acc -= &out[k - e] * c;
            }
        }
        out[k] = acc * c0;
    }
    out
}

fn split_top_level_slash(s: &str) -> Result<(&str, Option<&str>)> {
    let mut depth = 0i32;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => return Ok((&s[..i], Some(&s[i + 1..]))),
            _ => {}
        }
        if depth < 0 {
            return Err(parse_err("unbalanced parentheses"));
        }
    }
    Ok((s, None))
}

fn strip_outer_parens(s: &str) -> &str {
    if s.starts_with("((") && s.ends_with(')') {
        let inner = &s[1..s.len() - 1];
        let mut depth = 0i32;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth < 0 {
                return s;
            }
        }
        return inner;
    }
    s
}

fn parse_err(msg: &str) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.to_string(),
    }
}

fn parse_product(s: &str) -> Result<Vec<(TPoly, u32)>> {
    let mut out = Vec::new();
    if s == "1" || s.is_empty() {
        return Ok(out);
    }
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] != b'(' {
            return Err(parse_err("expected `(` starting a factor"));
        }
        let close = s[i..]
            .find(')')
            .map(|j| i + j)
            .ok_or_else(|| parse_err("missing `)`"))?;
        let poly = parse_tpoly(&s[i + 1..close])?;
        i = close + 1;
        let mut mult = 1u32;
        if i < bytes.len() && bytes[i] == b'^' {
            let end = s[i + 1..]
                .find(|c: char| !c.is_ascii_digit())
                .map_or(s.len(), |j| i + 1 + j);
            mult = s[i + 1..end].parse().map_err(|_| parse_err("bad exponent"))?;
            i = end;
        }
        out.push((poly, mult));
    }
    Ok(out)
}

fn parse_tpoly(s: &str) -> Result<TPoly> {
    let mut terms = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let (sign, body) = match rest.as_bytes()[0] {
            b'-' => (-1i64, &rest[1..]),
            b'+' => (1, &rest[1..]),
            _ => (1, rest),
        };
        let end = body.find(['+', '-']).unwrap_or(body.len());
        let term = &body[..end];
        rest = &body[end..];
        let (coeff, exp) = match term.find('t') {
            None => (term.parse::<i64>().map_err(|_| parse_err("bad constant"))?, 0),
            Some(pos) => {
                let c = if pos == 0 {
                    1
                } else {
                    term[..pos]
                        .trim_end_matches('*')
                        .parse::<i64>()
                        .map_err(|_| parse_err("bad coefficient"))?
                };
                let e = match term[pos + 1..].strip_prefix('^') {
                    Some(e) => e.parse::<u32>().map_err(|_| parse_err("bad power"))?,
                    None if term.len() == pos + 1 => 1,
                    None => return Err(parse_err("bad term")),
                };
                (c, e)
            }
        };
        terms.push((exp, sign * coeff));
    }
    Ok(terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_series() {
        let f = RationalFormula::parse("1/(1-t)").unwrap();
        assert_eq!(f.expand(5).to_i64().unwrap(), vec![1; 6]);
    }

    #[test]
    fn order_120_group_formula() {
        let f = RationalFormula::parse("1/((1-t^2)(1-t^6)(1-t^10))").unwrap();
        let s = f.expand(10).to_i64().unwrap();
        let even: Vec<i64> = s.iter().step_by(2).copied().collect();
        assert_eq!(even, vec![1, 1, 1, 2, 2, 3]);
    }

    #[test]
    fn invariant_ring_formula_top_degree() {
        let f = RationalFormula::parse("(1+t^8)(1+t^16)^2/((1-t^8)^3(1-t^24))").unwrap();
        let s = f.expand(96);
        assert_eq!(s.dim(96), Some(889));
        assert_eq!(s.dim(40), Some(83));
    }

    #[test]
    fn parse_failures() {
        assert!(RationalFormula::parse("1/((2-t))").is_err());
        assert!(RationalFormula::parse("(1+t").is_err());
    }
}
