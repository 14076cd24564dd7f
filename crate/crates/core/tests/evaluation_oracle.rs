//! Dimensions of the E-polynomial rings recomputed without any of the
//! library's exact machinery: the groups are closed over a prime field
//! `F_p` with `p ≡ 1 (mod 8)`, each `φ_k` is evaluated at random points, and
//! the rank of the evaluated products is a lower bound for the true dimension
//! that is attained with overwhelming probability.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eporing::epoly::{epoly_ring_dims, EpolyFamily};
use eporing::groups;
use eporing::span::SpanConfig;

type Mat = [[u64; 4]; 4];

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

struct Field {
    p: u64,
    eta: u64,
}

impl Field {
    fn new() -> Self {
        let mut p = (1u64 << 40) + 1;
        while !(p % 8 == 1 && num_prime::nt_funcs::is_prime64(p)) {
            p += 8 - (p % 8) + 1;
        }
        let mut x = 2;
        loop {
            let eta = powmod(x, (p - 1) / 8, p);
            if powmod(eta, 4, p) == p - 1 {
                return Field { p, eta };
            }
            x += 1;
        }
    }

    fn mul(&self, a: &Mat, b: &Mat) -> Mat {
        let mut c = [[0u64; 4]; 4];
        for r in 0..4 {
            for col in 0..4 {
                let mut s = 0u128;
                for k in 0..4 {
                    s += a[r][k] as u128 * b[k][col] as u128;
                }
                c[r][col] = (s % self.p as u128) as u64;
            }
        }
        c
    }

    /// `(η/2)·F`, `diag[1, η, −1, η]` and, for the larger group, `η·I`.
    fn generators(&self, with_scalar: bool) -> Vec<Mat> {
        let p = self.p;
        let eta = self.eta;
        let i = mulmod(eta, eta, p);
        let m1 = p - 1;
        let mi = p - i;
        let f = [[1, 1, 1, 1], [1, i, m1, mi], [1, m1, 1, m1], [1, mi, m1, i]];
        let c = mulmod(eta, powmod(2, p - 2, p), p);
        let f = f.map(|r| r.map(|x| mulmod(x, c, p)));
        let d = [[1, 0, 0, 0], [0, eta, 0, 0], [0, 0, m1, 0], [0, 0, 0, eta]];
        let mut g = vec![f, d];
        if with_scalar {
            g.push([[eta, 0, 0, 0], [0, eta, 0, 0], [0, 0, eta, 0], [0, 0, 0, eta]]);
        }
        g
    }

    fn closure(&self, gens: &[Mat]) -> Vec<Mat> {
        let id = [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]];
        let mut seen: HashSet<Mat> = HashSet::from([id]);
        let mut all = vec![id];
        let mut frontier = vec![id];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for x in &frontier {
                for g in gens {
                    let y = self.mul(x, g);
                    if seen.insert(y) {
                        all.push(y);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        all
    }

    fn rank(&self, mut m: Vec<Vec<u64>>) -> usize {
        let p = self.p;
        let cols = m.first().map_or(0, |r| r.len());
        let mut rk = 0;
        for c in 0..cols {
            let Some(piv) = (rk..m.len()).find(|&r| m[r][c] != 0) else { continue };
            m.swap(rk, piv);
            let inv = powmod(m[rk][c], p - 2, p);
            let pivot: Vec<u64> = m[rk].iter().map(|&x| mulmod(x, inv, p)).collect();
            for r in 0..m.len() {
                if r != rk && m[r][c] != 0 {
                    let f = m[r][c];
                    for (x, y) in m[r].iter_mut().zip(&pivot) {
                        *x = (*x + p - mulmod(f, *y, p)) % p;
                    }
                }
            }
            m[rk] = pivot;
            rk += 1;
        }
        rk
    }
}

/// Multisets of multiples of `step` (each ≥ `min`) summing to `k`.
fn partitions(k: u32, min: u32, step: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut w = min;
    while w <= k {
        for mut rest in partitions(k - w, w, step) {
            rest.push(w);
            out.push(rest);
        }
        w += step;
    }
    out
}

/// Order of the group and the rank of all degree-`k` products of the `φ`'s.
fn oracle_dims(with_scalar: bool, step: u32, top: u32) -> (usize, Vec<usize>) {
    let f = Field::new();
    let p = f.p;
    let group = f.closure(&f.generators(with_scalar));
    let n = group.len() as u64;
    let rows: Vec<[u64; 4]> = group.iter().map(|m| m[0]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<[u64; 4]> = (0..200).map(|_| [0; 4].map(|_| rng.gen_range(0..p))).collect();
    let forms: Vec<Vec<u64>> = points
        .iter()
        .map(|t| {
            rows.iter()
                .map(|r| (0..4).fold(0, |acc, i| (acc + mulmod(r[i], t[i], p)) % p))
                .collect()
        })
        .collect();
    let ninv = powmod(n % p, p - 2, p);
    let mut phi = std::collections::BTreeMap::new();
    for k in (step..=top).step_by(step as usize) {
        let v: Vec<u64> = forms
            .iter()
            .map(|l| mulmod(l.iter().fold(0, |a, &x| (a + powmod(x, k as u64, p)) % p), ninv, p))
            .collect();
        phi.insert(k, v);
    }
    let dims = (step..=top)
        .step_by(step as usize)
        .map(|k| {
            let m: Vec<Vec<u64>> = partitions(k, step, step)
                .iter()
                .map(|part| {
                    (0..points.len())
                        .map(|j| part.iter().fold(1, |a, w| mulmod(a, phi[w][j], p)))
                        .collect()
                })
                .collect();
            f.rank(m)
        })
        .collect();
    (group.len(), dims)
}

#[test]
fn group_orders_over_a_prime_field() {
    let f = Field::new();
    assert_eq!(f.closure(&f.generators(false)).len(), 384);
    assert_eq!(f.closure(&f.generators(true)).len(), 1536);
}

#[test]
fn g8_epoly_dims_match_oracle_and_printed_values() {
    let (order, dims) = oracle_dims(true, 8, 96);
    assert_eq!(order, 1536);
    assert_eq!(dims, vec![1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 52, 61]);

    let r = groups::lookup("G8").unwrap().resolve(4096).unwrap();
    let cos = r.group.coset_system().unwrap();
    let mut fam = EpolyFamily::new("G8", &cos, 8);
    let weights: Vec<u32> = (1..=6).map(|i| 8 * i).collect();
    let exact = epoly_ring_dims(&mut fam, &weights, &weights, None, &SpanConfig::default()).unwrap();
    let exact: Vec<usize> = exact.iter().map(|r| r.dim).collect();
    assert_eq!(exact, dims[..6].to_vec());
}

#[test]
fn g_epoly_dims_match_oracle() {
    let (order, dims) = oracle_dims(false, 4, 48);
    assert_eq!(order, 384);
    // k = 4, 8, …, 48; φ4 vanishes.
    assert_eq!(dims, vec![0, 1, 1, 2, 2, 4, 4, 7, 7, 11, 10, 18]);

    let r = groups::lookup("G").unwrap().resolve(4096).unwrap();
    let cos = r.group.coset_system().unwrap();
    let mut fam = EpolyFamily::new("G", &cos, 4);
    let weights: Vec<u32> = (1..=12).map(|i| 4 * i).collect();
    let exact = epoly_ring_dims(&mut fam, &weights, &weights, None, &SpanConfig::default()).unwrap();
    let exact: Vec<usize> = exact.iter().map(|r| r.dim).collect();
    assert_eq!(exact, dims);
}

#[test]
fn product_counts_are_partition_counts() {
    // Parts 1..=10 summing to 12: p(12) = 77 minus the partitions {11,1} and {12}.
    assert_eq!(partitions(96, 8, 8).iter().filter(|p| p.iter().all(|&w| w <= 80)).count(), 75);
    let gens: Vec<(eporing::poly::RatPoly, u32)> = (1..=10)
        .map(|i| {
            let p = eporing::poly::parse_poly_text(4, &format!("t0^{}", 8 * i)).unwrap();
            (p, 8 * i)
        })
        .collect();
    let alg = eporing::span::Subalgebra::new(&gens).unwrap();
    assert_eq!(alg.product_count(96), 75);
}
