//! Graded dimensions of rings generated by invariants of `G⁸`: the ring `𝔚`
//! of complete weight enumerators, generator budgets per degree, and the
//! ring generated by E-polynomials together with enumerators.
//!
//! Every polynomial is checked to be invariant before it enters a span;
//! that is what makes the Molien coefficient a valid upper bound.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::cache::{self, Store};
use crate::codes::{self, CosetWalk};
use crate::epoly::{orbit_certificate, EpolyFamily};
use crate::error::{Error, Result};
use crate::matgroup::{CosetSystem, CycMatrix};
use crate::poly::RatPoly;
use crate::series::PowerSeries;
use crate::span::{SpanConfig, Subalgebra};
use crate::substitute::{check_fixed, FixedCheck};

/// Degree-by-degree substitution checks switch from exact to modular above
/// this many `terms × degree`.
pub const EXACT_SUBSTITUTION_LIMIT: usize = 20_000;

#[derive(Clone, Debug)]
pub struct NamedInvariant {
    pub name: String,
    pub degree: u32,
    pub poly: RatPoly,
    /// Where the polynomial came from (enumeration, fixture, coset sum).
    pub origin: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub name: String,
    pub holds: bool,
    pub checks: Vec<FixedCheck>,
}

/// `f(g·t) = f(t)` for every generator `g`.
pub fn verify_invariance(f: &RatPoly, generators: &[CycMatrix], exact_term_limit: usize) -> Result<InvarianceReport> {
    let mut checks = Vec::new();
    let mut holds = true;
    for g in generators {
        let c = check_fixed(f, g, exact_term_limit)?;
        holds &= c.fixed;
        checks.push(c);
        if !holds {
            break;
        }
    }
    Ok(InvarianceReport {
        name: String::new(),
        holds,
        checks,
    })
}

/// Like [`verify_invariance`] but a failure is an error.
pub fn require_invariant(inv: &NamedInvariant, generators: &[CycMatrix]) -> Result<InvarianceReport> {
    let mut r = verify_invariance(&inv.poly, generators, EXACT_SUBSTITUTION_LIMIT)?;
    r.name = inv.name.clone();
    if !r.holds {
        return Err(Error::NotInvariant(inv.name.clone()));
    }
    Ok(r)
}

/// Supplies complete weight enumerators by name: codes with a bundled matrix
/// are enumerated, the rest come from the literal fixtures.
pub struct CweProvider {
    pub workers: usize,
    pub budget: u128,
    cache: HashMap<String, NamedInvariant>,
    store: Option<Arc<dyn Store>>,
}

impl CweProvider {
    pub fn new(workers: usize, budget: u128) -> Self {
        CweProvider {
            workers: workers.max(1),
            budget,
            cache: HashMap::new(),
            store: None,
        }
    }

    /// Persists enumerations in `store`, keyed by the generator matrix.
    pub fn with_store(mut self, store: Arc<dyn Store>) -> Self {
        self.store = Some(store);
        self
    }

    /// Pre-seeds an enumerator (e.g. loaded from a cache).
    pub fn insert(&mut self, inv: NamedInvariant) {
        self.cache.insert(inv.name.clone(), inv);
    }

    pub fn get(&mut self, name: &str) -> Result<NamedInvariant> {
        if let Some(c) = self.cache.get(name) {
            return Ok(c.clone());
        }
        let entry = codes::manifest()
            .into_iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Unknown {
                kind: "code",
                name: name.to_string(),
                available: codes::manifest().iter().map(|e| e.name.clone()).collect::<Vec<_>>().join(", "),
            })?;
        let inv = if entry.matrix.is_some() {
            let code = codes::builtin_code(name)?;
            let canonical = code.original.to_text();
            let stored = self.store.as_deref().and_then(|s| cache::load_poly(s, "cwe", &canonical));
            let poly = match stored {
                Some(p) => p,
                None => {
                    let p = codes::complete_weight_enumerator(&code, &CosetWalk, self.workers, self.budget)?.to_rational();
                    if let Some(s) = self.store.as_deref() {
                        cache::save_poly(s, "cwe", &canonical, &p)?;
                    }
                    p
                }
            };
            NamedInvariant {
                name: name.to_string(),
                degree: code.length as u32,
                poly,
                origin: format!("enumerated ({} codewords)", code.size()),
            }
        } else {
            let p = codes::cwe_fixture(name)?;
            NamedInvariant {
                name: name.to_string(),
                degree: entry.length as u32,
                poly: p.to_rational(),
                origin: "literal enumerator".into(),
            }
        };
        self.cache.insert(name.to_string(), inv.clone());
        Ok(inv)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GradedSpanReport {
    pub degree: u32,
    pub expected: Option<u64>,
    pub achieved: usize,
    pub products: usize,
    /// Generators of degree `≤ k`, grouped by degree.
    pub generators_by_degree: BTreeMap<u32, Vec<String>>,
    pub certified: bool,
    pub certificate: String,
}

fn by_degree(gens: &[NamedInvariant], k: u32) -> BTreeMap<u32, Vec<String>> {
    let mut m: BTreeMap<u32, Vec<String>> = BTreeMap::new();
    for g in gens.iter().filter(|g| g.degree <= k && !g.poly.is_zero()) {
        m.entry(g.degree).or_default().push(g.name.clone());
    }
    m
}

fn subalgebra(gens: &[NamedInvariant]) -> Result<Subalgebra> {
    let pairs: Vec<(RatPoly, u32)> = gens.iter().map(|g| (g.poly.clone(), g.degree)).collect();
    Subalgebra::with_nvars(gens.first().map_or(4, |g| g.poly.nvars()), &pairs)
}

/// Dimension of the degree-`k` piece of the ring generated by `gens`, for
/// each requested degree. Inputs are assumed verified invariant.
pub fn ring_dims(
    gens: &[NamedInvariant],
    degrees: &[u32],
    molien: Option<&PowerSeries>,
    cfg: &SpanConfig,
) -> Result<Vec<GradedSpanReport>> {
    let mut alg = subalgebra(gens)?;
    let mut out = Vec::new();
    for &k in degrees {
        let expected = molien.and_then(|m| m.dim(k as usize));
        let s = alg.dimension(k, cfg, expected.map(|e| e as usize))?;
        out.push(GradedSpanReport {
            degree: k,
            expected,
            achieved: s.dimension,
            products: s.products,
            generators_by_degree: by_degree(gens, k),
            certified: s.certified,
            certificate: s.certificate,
        });
    }
    Ok(out)
}

/// Which enumerators make up `𝔚`. The second length-16 enumerator of the
/// original list is not available; `length16_candidates` are tried in order
/// until the degree-16 dimension reaches the Molien coefficient.
#[derive(Clone, Debug, Serialize)]
pub struct WeightEnumeratorPolicy {
    pub fixed: Vec<String>,
    pub length16_candidates: Vec<String>,
    pub length32: Vec<String>,
}

impl Default for WeightEnumeratorPolicy {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let candidates = codes::manifest()
            .into_iter()
            .filter(|e| e.length == 16 && e.matrix.is_some())
            .map(|e| e.name)
            .collect();
        WeightEnumeratorPolicy {
            fixed: s(&["p8a", "p8b", "o8", "k8", "p16a", "q24a", "q24b", "g24"]),
            length16_candidates: candidates,
            length32: s(&["q32"]),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubstituteTrial {
    pub candidate: String,
    pub dim16: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct WRing {
    pub generators: Vec<String>,
    pub origins: BTreeMap<String, String>,
    pub invariance: Vec<InvarianceReport>,
    pub substitute_trials: Vec<SubstituteTrial>,
    pub chosen_substitute: Option<String>,
    pub reports: Vec<GradedSpanReport>,
}

/// Builds `𝔚` under `policy` and reports its dimensions at `degrees`.
/// Length-32 enumerators are only used when some requested degree is `≥ 32`.
pub fn w_ring(
    provider: &mut CweProvider,
    policy: &WeightEnumeratorPolicy,
    generators: &[CycMatrix],
    degrees: &[u32],
    molien: &PowerSeries,
    cfg: &SpanConfig,
) -> Result<WRing> {
    let want32 = degrees.iter().any(|&k| k >= 32);
    let mut gens = Vec::new();
    let mut invariance = Vec::new();
    for name in &policy.fixed {
        let g = provider.get(name)?;
        invariance.push(require_invariant(&g, generators)?);
        gens.push(g);
    }
    let expected16 = molien.dim(16).map(|d| d as usize);
    let mut trials = Vec::new();
    let mut chosen = None;
    let base16 = ring_dims(&gens, &[16], Some(molien), cfg)?[0].achieved;
    if Some(base16) != expected16 {
        for cand in &policy.length16_candidates {
            let g = provider.get(cand)?;
            invariance.push(require_invariant(&g, generators)?);
            let mut with = gens.clone();
            with.push(g.clone());
            let d = ring_dims(&with, &[16], Some(molien), cfg)?[0].achieved;
            trials.push(SubstituteTrial {
                candidate: cand.clone(),
                dim16: d,
            });
            if Some(d) == expected16 {
                chosen = Some(cand.clone());
                gens = with;
                break;
            }
        }
    }
    if want32 {
        for name in &policy.length32 {
            let g = provider.get(name)?;
            invariance.push(require_invariant(&g, generators)?);
            gens.push(g);
        }
    }
    let reports = ring_dims(&gens, degrees, Some(molien), cfg)?;
    Ok(WRing {
        generators: gens.iter().map(|g| g.name.clone()).collect(),
        origins: gens.iter().map(|g| (g.name.clone(), g.origin.clone())).collect(),
        invariance,
        substitute_trials: trials,
        chosen_substitute: chosen,
        reports,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BudgetRow {
    pub degree: u32,
    pub expected: u64,
    /// Dimension reached by products of generators of strictly lower degree.
    pub from_lower: usize,
    pub demand: u64,
    pub budget: u64,
    pub within_budget: bool,
}

/// The number of new degree-`k` generators each degree requires:
/// `demand(k) = dim 𝔯⁸_k − dim(products of lower-degree generators)_k`.
pub fn generator_budget(
    gens: &[NamedInvariant],
    degrees: &[u32],
    budgets: &[u64],
    molien: &PowerSeries,
    cfg: &SpanConfig,
) -> Result<Vec<BudgetRow>> {
    let mut out = Vec::new();
    for (i, &k) in degrees.iter().enumerate() {
        let lower: Vec<NamedInvariant> = gens.iter().filter(|g| g.degree < k).cloned().collect();
        let from_lower = ring_dims(&lower, &[k], Some(molien), cfg)?[0].achieved;
        let expected = molien.dim(k as usize).unwrap_or(0);
        let demand = expected.saturating_sub(from_lower as u64);
        let budget = budgets.get(i).copied().unwrap_or(0);
        out.push(BudgetRow {
            degree: k,
            expected,
            from_lower,
            demand,
            budget,
            within_budget: demand <= budget,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Dependency {
    pub weight: u32,
    pub in_span: bool,
    pub certified: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CombinedRing {
    pub epoly_weights: Vec<u32>,
    pub cwes: Vec<String>,
    pub reports: Vec<GradedSpanReport>,
    pub dependencies: Vec<Dependency>,
}

/// E-polynomials of the given weights joined with enumerators.
pub fn combined_generators(
    family: &mut EpolyFamily,
    epoly_weights: &[u32],
    cwes: &[NamedInvariant],
) -> Result<Vec<NamedInvariant>> {
    let mut gens = Vec::new();
    for &w in epoly_weights {
        gens.push(NamedInvariant {
            name: format!("phi{w}"),
            degree: w,
            poly: family.phi(w)?,
            origin: "coset sum".into(),
        });
    }
    gens.extend(cwes.iter().cloned());
    Ok(gens)
}

/// Dimensions of the combined ring and, for each dependency weight, whether
/// `φ_k` already lies in its degree-`k` piece.
pub fn combined_ring_check(
    family: &mut EpolyFamily,
    cosets: &CosetSystem,
    generators: &[CycMatrix],
    epoly_weights: &[u32],
    cwes: &[NamedInvariant],
    degrees: &[u32],
    dependency_weights: &[u32],
    molien: &PowerSeries,
    cfg: &SpanConfig,
) -> Result<CombinedRing> {
    let cert = orbit_certificate(cosets, generators)?;
    if !cert.holds {
        return Err(Error::NotInvariant(format!("E-polynomials of {}", family.group)));
    }
    for c in cwes {
        require_invariant(c, generators)?;
    }
    let gens = combined_generators(family, epoly_weights, cwes)?;
    let reports = ring_dims(&gens, degrees, Some(molien), cfg)?;
    let mut alg = subalgebra(&gens)?;
    let mut dependencies = Vec::new();
    for &k in dependency_weights {
        let phi = family.phi(k)?;
        let m = alg.contains(&phi, cfg)?;
        let mut dep = Dependency {
            weight: k,
            in_span: m.member,
            certified: m.certified,
            certificate: m.extended.certificate,
        };
        if m.member && !m.certified {
            // If the products already span every invariant of degree k, the
            // (orbit-certified) φ_k lies in their span.
            let expected = molien.dim(k as usize).map(|d| d as usize);
            let whole = alg.dimension(k, cfg, expected)?;
            if whole.certified && Some(whole.dimension) == expected {
                dep.certified = true;
                dep.certificate = format!("products span all {} invariants of degree {k}", whole.dimension);
            }
        }
        dependencies.push(dep);
    }
    Ok(CombinedRing {
        epoly_weights: epoly_weights.to_vec(),
        cwes: cwes.iter().map(|c| c.name.clone()).collect(),
        reports,
        dependencies,
    })
}

fn dims_hold(
    family: &mut EpolyFamily,
    epoly_weights: &[u32],
    cwes: &[NamedInvariant],
    degrees: &[u32],
    molien: &PowerSeries,
    cfg: &SpanConfig,
) -> Result<bool> {
    let gens = combined_generators(family, epoly_weights, cwes)?;
    let r = ring_dims(&gens, degrees, Some(molien), cfg)?;
    Ok(r.iter().all(|x| x.expected == Some(x.achieved as u64)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SubsetSearch {
    pub start: Vec<String>,
    pub start_reaches_molien: bool,
    /// Enumerators left after greedily dropping any one whose removal keeps
    /// every dimension at the Molien coefficient.
    pub minimal: Vec<String>,
    pub dropped: Vec<String>,
}

/// Greedy pruning of the enumerator list, last entries tried first.
pub fn prune_cwe_subset(
    family: &mut EpolyFamily,
    epoly_weights: &[u32],
    cwes: &[NamedInvariant],
    degrees: &[u32],
    molien: &PowerSeries,
    cfg: &SpanConfig,
) -> Result<SubsetSearch> {
    let start: Vec<String> = cwes.iter().map(|c| c.name.clone()).collect();
    let ok = dims_hold(family, epoly_weights, cwes, degrees, molien, cfg)?;
    let mut current = cwes.to_vec();
    let mut dropped = Vec::new();
    if ok {
        let mut i = current.len();
        while i > 0 {
            i -= 1;
            let mut trial = current.clone();
            let removed = trial.remove(i);
            if dims_hold(family, epoly_weights, &trial, degrees, molien, cfg)? {
                current = trial;
                dropped.push(removed.name);
            }
        }
    }
    Ok(SubsetSearch {
        start,
        start_reaches_molien: ok,
        minimal: current.iter().map(|c| c.name.clone()).collect(),
        dropped,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingTrial {
    /// Printed name → enumerator used for it.
    pub mapping: Vec<(String, String)>,
    pub dims: Vec<usize>,
    pub reaches_molien: bool,
}

/// Every reading of a list of printed names, where each printed name may
/// stand for any of several available enumerators (no enumerator used twice).
pub fn name_mappings(readings: &[(String, Vec<String>)]) -> Vec<Vec<(String, String)>> {
    fn rec(
        readings: &[(String, Vec<String>)],
        i: usize,
        cur: &mut Vec<(String, String)>,
        out: &mut Vec<Vec<(String, String)>>,
    ) {
        if i == readings.len() {
            out.push(cur.clone());
            return;
        }
        for c in &readings[i].1 {
            if cur.iter().any(|(_, u)| u == c) {
                continue;
            }
            cur.push((readings[i].0.clone(), c.clone()));
            rec(readings, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(readings, 0, &mut Vec::new(), &mut out);
    out
}

/// Evaluates each mapping: dimensions of `⟨φ_w, mapped enumerators⟩` at `degrees`.
pub fn try_mappings(
    family: &mut EpolyFamily,
    provider: &mut CweProvider,
    epoly_weights: &[u32],
    readings: &[(String, Vec<String>)],
    degrees: &[u32],
    molien: &PowerSeries,
    cfg: &SpanConfig,
) -> Result<Vec<MappingTrial>> {
    let mut out = Vec::new();
    for mapping in name_mappings(readings) {
        let mut cwes = Vec::new();
        for (_, used) in &mapping {
            cwes.push(provider.get(used)?);
        }
        let gens = combined_generators(family, epoly_weights, &cwes)?;
        let r = ring_dims(&gens, degrees, Some(molien), cfg)?;
        out.push(MappingTrial {
            mapping,
            reaches_molien: r.iter().all(|x| x.expected == Some(x.achieved as u64)),
            dims: r.iter().map(|x| x.achieved).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups;
    use crate::poly::parse_poly_text;

    #[test]
    fn constants_and_monomials() {
        let gens = groups::lookup("G8").unwrap().variants[0].generators.clone();
        let one = parse_poly_text(4, "1").unwrap();
        assert!(verify_invariance(&one, &gens, 1000).unwrap().holds);
        let t08 = parse_poly_text(4, "t0^8").unwrap();
        assert!(!verify_invariance(&t08, &gens, 1000).unwrap().holds);
    }

    #[test]
    fn empty_generator_set() {
        let r = ring_dims(&[], &[0, 8], None, &SpanConfig::default()).unwrap();
        assert_eq!(r[0].achieved, 1);
        assert_eq!(r[1].achieved, 0);
    }

    #[test]
    fn mappings_skip_reuse() {
        let r = vec![
            ("a".to_string(), vec!["x".to_string(), "y".to_string()]),
            ("b".to_string(), vec!["x".to_string()]),
        ];
        let m = name_mappings(&r);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0][0].1, "y");
    }
}
