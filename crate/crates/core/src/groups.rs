//! Named generator sets for the groups studied here, resolved into closed
//! groups on demand.
//!
//! A catalog entry may carry several generator variants; they are tried in
//! order and the first whose closure finishes under the cap is used. Every
//! attempt is kept so callers can report which variant produced the group.

use serde::Serialize;

use crate::cyclotomic::CyclotomicNumber;
use crate::error::{Error, Result};
use crate::matgroup::{rational, CycMatrix, FiniteMatrixGroup};

pub const DEFAULT_CAP: usize = 10_000;

fn z(n: u32, k: i64) -> CyclotomicNumber {
    CyclotomicNumber::root(n, k)
}

fn int(i: i64) -> CyclotomicNumber {
    CyclotomicNumber::from_int(i)
}

#[derive(Clone, Debug)]
pub struct GeneratorVariant {
    pub label: &'static str,
    pub generators: Vec<CycMatrix>,
}

#[derive(Clone, Debug)]
pub struct GroupEntry {
    pub name: &'static str,
    pub description: &'static str,
    /// Order of the E-polynomial weight lattice (`φ_k = 0` unless `step | k`).
    pub step: u32,
    pub variants: Vec<GeneratorVariant>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Attempt {
    pub variant: String,
    pub outcome: String,
}

#[derive(Clone, Debug)]
pub struct ResolvedGroup {
    pub name: String,
    pub variant: String,
    pub step: u32,
    pub attempts: Vec<Attempt>,
    pub group: FiniteMatrixGroup,
}

impl GroupEntry {
    pub fn resolve(&self, cap: usize) -> Result<ResolvedGroup> {
        let mut attempts = Vec::new();
        for v in &self.variants {
            match FiniteMatrixGroup::closure(v.generators.clone(), cap) {
                Ok(group) => {
                    attempts.push(Attempt {
                        variant: v.label.to_string(),
                        outcome: format!("order {}", group.order()),
                    });
                    return Ok(ResolvedGroup {
                        name: self.name.to_string(),
                        variant: v.label.to_string(),
                        step: self.step,
                        attempts,
                        group,
                    });
                }
                Err(Error::CapExceeded { cap }) => attempts.push(Attempt {
                    variant: v.label.to_string(),
                    outcome: format!("closure exceeded cap {cap}"),
                }),
                Err(e) => return Err(e),
            }
        }
        Err(Error::CapExceeded { cap })
    }
}

/// `(η/2)·F` where `F` is the 4×4 Fourier matrix with entries in `{±1, ±i}`.
pub fn fourier_generator() -> CycMatrix {
    let i = z(8, 2);
    let mi = z(8, 6);
    let rows = vec![
        vec![int(1), int(1), int(1), int(1)],
        vec![int(1), i.clone(), int(-1), mi.clone()],
        vec![int(1), int(-1), int(1), int(-1)],
        vec![int(1), mi, int(-1), i],
    ];
    let scale = &z(8, 1) * &rational(1, 2);
    CycMatrix::new(8, rows).unwrap().scale(&scale).unwrap()
}

/// `diag[1, η, -1, η]` exactly as printed.
pub fn diagonal_generator() -> CycMatrix {
    CycMatrix::diagonal(8, vec![int(1), z(8, 1), int(-1), z(8, 1)]).unwrap()
}

pub fn scalar_eta() -> CycMatrix {
    CycMatrix::diagonal(8, vec![z(8, 1); 4]).unwrap()
}

fn group_g() -> GroupEntry {
    GroupEntry {
        name: "G",
        description: "order-384 group generated by (η/2)F and diag[1, η, -1, η]",
        step: 4,
        variants: vec![GeneratorVariant {
            label: "as printed",
            generators: vec![fourier_generator(), diagonal_generator()],
        }],
    }
}

fn group_g8() -> GroupEntry {
    GroupEntry {
        name: "G8",
        description: "G extended by the scalar η·I (order 1536)",
        step: 8,
        variants: vec![GeneratorVariant {
            label: "as printed",
            generators: vec![fourier_generator(), diagonal_generator(), scalar_eta()],
        }],
    }
}

/// Two-variable group over `Q(ζ12)`: `(1/(i√3))·[[1,2],[1,-1]]` and `diag[1, ω]`.
fn group_order_24() -> GroupEntry {
    let n = 12;
    let i = z(n, 3);
    let sqrt3 = &z(n, 1) + &z(n, 11);
    let scale = (&i * &sqrt3).inv().unwrap();
    let a = CycMatrix::new(n, vec![vec![int(1), int(2)], vec![int(1), int(-1)]])
        .unwrap()
        .scale(&scale)
        .unwrap();
    let d = CycMatrix::diagonal(n, vec![int(1), z(n, 4)]).unwrap();
    GroupEntry {
        name: "appB-G",
        description: "order-24 group on two variables (ternary-code group)",
        step: 2,
        variants: vec![GeneratorVariant {
            label: "as printed",
            generators: vec![a, d],
        }],
    }
}

/// Three-variable group over `Q(ζ5)`. The first generator squares to `5·I`
/// as printed, so a `1/√5`-normalised variant is kept as a fallback.
fn group_order_120() -> GroupEntry {
    let n = 5;
    let a = &z(n, 1) + &z(n, 4);
    let b = &z(n, 2) + &z(n, 3);
    let m = CycMatrix::new(
        n,
        vec![
            vec![int(1), int(2), int(2)],
            vec![int(1), a.clone(), b.clone()],
            vec![int(1), b, a.clone()],
        ],
    )
    .unwrap();
    let d = CycMatrix::diagonal(n, vec![int(1), z(n, 2), z(n, 3)]).unwrap();
    let p = CycMatrix::new(
        n,
        vec![
            vec![int(-1), int(0), int(0)],
            vec![int(0), int(0), int(-1)],
            vec![int(0), int(-1), int(0)],
        ],
    )
    .unwrap();
    // √5 = 1 + 2(ζ + ζ⁴)
    let sqrt5 = &int(1) + &(&int(2) * &a);
    let m_scaled = m.scale(&sqrt5.inv().unwrap()).unwrap();
    GroupEntry {
        name: "appB-H",
        description: "order-120 group on three variables (Hilbert modular group)",
        step: 2,
        variants: vec![
            GeneratorVariant {
                label: "as printed",
                generators: vec![m, d.clone(), p.clone()],
            },
            GeneratorVariant {
                label: "first generator scaled by 1/sqrt(5)",
                generators: vec![m_scaled, d, p],
            },
        ],
    }
}

/// All catalog entries in a fixed order.
pub fn catalog() -> Vec<GroupEntry> {
    vec![group_g(), group_g8(), group_order_24(), group_order_120()]
}

pub fn lookup(name: &str) -> Result<GroupEntry> {
    let all = catalog();
    let names: Vec<&str> = all.iter().map(|g| g.name).collect();
    let joined = names.join(", ");
    all.into_iter()
        .find(|g| g.name.eq_ignore_ascii_case(name))
        .ok_or(Error::Unknown {
            kind: "group",
            name: name.to_string(),
            available: joined,
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_is_case_insensitive() {
        assert_eq!(lookup("g8").unwrap().name, "G8");
        assert!(lookup("nope").is_err());
    }

    #[test]
    fn order_24_generator_has_order_dividing_group() {
        let entry = group_order_24();
        let a = &entry.variants[0].generators[0];
        let mut p = a.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.checked_mul(a).unwrap();
            k += 1;
            assert!(k <= 24);
        }
        assert_eq!(24 % k, 0);
    }
}
