//! Recomputes the dimension tables cell by cell and compares them with the
//! printed values bundled in `data/golden_tables.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cache::{self, Store};
use crate::epoly::{epoly_ring_dims, EpolyFamily};
use crate::error::{Error, Result};
use crate::groups::{self, Attempt, ResolvedGroup};
use crate::invariants::{self, CweProvider, NamedInvariant, WeightEnumeratorPolicy};
use crate::matgroup::{CosetSystem, CycMatrix, FiniteMatrixGroup, MatrixJson};
use crate::poly::RatPoly;
use crate::series::PowerSeries;
use crate::span::SpanConfig;

pub const REPORT_SCHEMA: u32 = 1;
const GOLDEN: &str = include_str!("../data/golden_tables.json");

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GoldenRow {
    pub quantity: String,
    pub label: String,
    pub source: String,
    pub values: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct GoldenTable {
    pub id: u32,
    pub caption: String,
    pub group: String,
    pub degrees: Vec<u32>,
    pub rows: Vec<GoldenRow>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct Golden {
    pub version: u32,
    pub tables: Vec<GoldenTable>,
}

pub fn golden() -> Golden {
    serde_json::from_str(GOLDEN).expect("bundled golden tables are valid JSON")
}

pub fn golden_table(id: u32) -> Result<GoldenTable> {
    golden()
        .tables
        .into_iter()
        .find(|t| t.id == id)
        .ok_or_else(|| Error::Unknown {
            kind: "table",
            name: id.to_string(),
            available: "1, 2, 3, 4, 5, 6".into(),
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Core,
    Extended,
}

impl std::str::FromStr for Tier {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Tier::Core),
            "extended" => Ok(Tier::Extended),
            _ => Err(Error::Unknown {
                kind: "tier",
                name: s.into(),
                available: "core, extended".into(),
            }),
        }
    }
}

#[derive(Clone)]
pub struct Settings {
    pub workers: usize,
    /// Largest number of codewords an enumeration may visit.
    pub budget: u128,
    pub span: SpanConfig,
    pub closure_cap: usize,
    pub molien_truncation: usize,
    /// Whether reports carry wall-clock timings (which makes them nondeterministic).
    pub timing: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            budget: 10_000_000_000,
            span: SpanConfig::default(),
            closure_cap: 4096,
            molien_truncation: 96,
            timing: false,
        }
    }
}

pub struct GroupData {
    pub resolved: ResolvedGroup,
    pub cosets: CosetSystem,
    pub family: EpolyFamily,
    pub molien: PowerSeries,
}

impl GroupData {
    pub fn generators(&self) -> &[CycMatrix] {
        self.resolved.group.generators()
    }
}

/// Shared state for a run: resolved groups, E-polynomials and enumerators,
/// optionally persisted in a [`Store`].
pub struct Workbench {
    pub settings: Settings,
    store: Option<Arc<dyn Store>>,
    groups: BTreeMap<String, GroupData>,
    pub cwes: CweProvider,
}

#[derive(Serialize, Deserialize)]
struct Resolution {
    version: u32,
    variant: String,
    attempts: Vec<(String, String)>,
    elements: Vec<MatrixJson>,
}

impl Workbench {
    pub fn new(settings: Settings) -> Self {
        let cwes = CweProvider::new(settings.workers, settings.budget);
        Workbench {
            settings,
            store: None,
            groups: BTreeMap::new(),
            cwes,
        }
    }

    pub fn with_store(mut self, store: Arc<dyn Store>) -> Self {
        self.cwes = CweProvider::new(self.settings.workers, self.settings.budget).with_store(store.clone());
        self.store = Some(store);
        self
    }

    fn resolve(&self, name: &str) -> Result<ResolvedGroup> {
        let entry = groups::lookup(name)?;
        let canonical: String = entry
            .variants
            .iter()
            .map(|v| format!("{}:{}", v.label, cache::generators_key(&v.generators)))
            .collect::<Vec<_>>()
            .join("\n");
        let key = cache::digest("resolution", &format!("{}\n{}\n{canonical}", entry.name, self.settings.closure_cap));
        if let Some(store) = self.store.as_deref() {
            if let Some(r) = store.get(&key).and_then(|t| serde_json::from_str::<Resolution>(&t).ok()) {
                if r.version == cache::CACHE_VERSION {
                    if let Some(v) = entry.variants.iter().find(|v| v.label == r.variant) {
                        let elements = r.elements.iter().map(CycMatrix::from_json).collect::<Result<Vec<_>>>()?;
                        return Ok(ResolvedGroup {
                            name: entry.name.to_string(),
                            variant: r.variant.clone(),
                            step: entry.step,
                            attempts: r
                                .attempts
                                .into_iter()
                                .map(|(variant, outcome)| Attempt { variant, outcome })
                                .collect(),
                            group: FiniteMatrixGroup::from_parts(v.generators.clone(), elements),
                        });
                    }
                }
            }
        }
        let resolved = entry.resolve(self.settings.closure_cap)?;
        if let Some(store) = self.store.as_deref() {
            let r = Resolution {
                version: cache::CACHE_VERSION,
                variant: resolved.variant.clone(),
                attempts: resolved.attempts.iter().map(|a| (a.variant.clone(), a.outcome.clone())).collect(),
                elements: resolved.group.elements().iter().map(|m| m.to_json()).collect(),
            };
            store.put(&key, &serde_json::to_string(&r)?)?;
        }
        Ok(resolved)
    }

    /// Resolves (once) and returns everything derived from a catalog group.
    pub fn group(&mut self, name: &str) -> Result<&mut GroupData> {
        let canonical = groups::lookup(name)?.name.to_string();
        if !self.groups.contains_key(&canonical) {
            let resolved = self.resolve(&canonical)?;
            let cosets = resolved.group.coset_system()?;
            let family = EpolyFamily::new(&canonical, &cosets, resolved.step);
            let molien = resolved.group.molien_series(self.settings.molien_truncation)?;
            self.groups.insert(
                canonical.clone(),
                GroupData {
                    resolved,
                    cosets,
                    family,
                    molien,
                },
            );
        }
        Ok(self.groups.get_mut(&canonical).unwrap())
    }

    /// Makes sure `φ_w` for each weight is in the family's memory, going
    /// through the store when one is attached.
    pub fn ensure_phis(&mut self, group: &str, weights: &[u32]) -> Result<()> {
        let store = self.store.clone();
        let g = self.group(group)?;
        let gens = cache::generators_key(g.generators());
        for &w in weights {
            if g.family.is_cached(w) {
                continue;
            }
            let canonical = format!("{gens}\nstep {}\nweight {w}", g.family.step);
            if let Some(p) = store.as_deref().and_then(|s| cache::load_poly(s, "phi", &canonical)) {
                g.family.insert(w, p);
                continue;
            }
            let p = g.family.phi(w)?;
            if let Some(s) = store.as_deref() {
                cache::save_poly(s, "phi", &canonical, &p)?;
            }
        }
        Ok(())
    }

    pub fn phi(&mut self, group: &str, k: u32) -> Result<RatPoly> {
        self.ensure_phis(group, &[k])?;
        self.group(group)?.family.phi(k)
    }

    /// A group's data and the enumerator source, borrowed together.
    pub fn parts(&mut self, group: &str) -> Result<(&mut GroupData, &mut CweProvider)> {
        let canonical = groups::lookup(group)?.name.to_string();
        self.group(&canonical)?;
        Ok((self.groups.get_mut(&canonical).unwrap(), &mut self.cwes))
    }

    pub fn cwe(&mut self, name: &str) -> Result<NamedInvariant> {
        self.cwes.get(name)
    }
}

/// The enumerators standing for the printed generator names of the combined
/// ring: `p8 → p8a`, `p16 → p16a`, `p24 → q24a`, `q24 → q24b`, `p32 → q32`.
pub const DEFAULT_COMBINED_CWES: [&str; 7] = ["p8a", "o8", "k8", "p16a", "q24a", "q24b", "q32"];

/// Readings tried for the printed generator names.
pub fn printed_name_readings() -> Vec<(String, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        ("p8".into(), s(&["p8a", "p8b"])),
        ("o8".into(), s(&["o8"])),
        ("k8".into(), s(&["k8"])),
        ("p16".into(), s(&["p16a", "k16", "rm16"])),
        ("p24".into(), s(&["g24", "q24a", "q24b"])),
        ("q24".into(), s(&["q24a", "q24b"])),
        ("p32".into(), s(&["q32"])),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellReport {
    pub row: String,
    pub degree: u32,
    pub expected: i64,
    pub computed: Option<i64>,
    pub status: CellStatus,
    pub certified: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub id: u32,
    pub caption: String,
    pub group: String,
    pub variant: String,
    pub cells: Vec<CellReport>,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tier: Tier,
    pub rank_strategy: String,
    pub tables: Vec<TableReport>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Computed {
    value: i64,
    certified: bool,
    certificate: String,
}

fn cell(row: &GoldenRow, degree: u32, expected: i64, c: Option<Computed>) -> CellReport {
    match c {
        None => CellReport {
            row: row.label.clone(),
            degree,
            expected,
            computed: None,
            status: CellStatus::Skipped,
            certified: false,
            certificate: "outside the requested tier".into(),
        },
        Some(c) => CellReport {
            row: row.label.clone(),
            degree,
            expected,
            computed: Some(c.value),
            // An uncertified value cannot pass, whatever it is.
            status: if c.value == expected && c.certified {
                CellStatus::Pass
            } else {
                CellStatus::Fail
            },
            certified: c.certified,
            certificate: c.certificate,
        },
    }
}

/// Degrees of a row that the tier covers.
fn in_tier(quantity: &str, k: u32, tier: Tier) -> bool {
    if tier == Tier::Extended {
        return true;
    }
    match quantity {
        "epoly_ring" => k <= 48,
        "enumerator_ring" | "combined_ring" => k < 32,
        _ => true,
    }
}

fn verify_table(wb: &mut Workbench, t: &GoldenTable, tier: Tier) -> Result<TableReport> {
    let start = Instant::now();
    let cfg = wb.settings.span.clone();
    let mut notes = Vec::new();
    let group = t.group.clone();
    wb.group(&group)?;
    let mut cells = Vec::new();
    for row in &t.rows {
        let degrees: Vec<u32> = t.degrees.iter().copied().filter(|&k| in_tier(&row.quantity, k, tier)).collect();
        let mut computed: BTreeMap<u32, Computed> = BTreeMap::new();
        match row.quantity.as_str() {
            "molien" => {
                let g = wb.group(&group)?;
                for &k in &degrees {
                    let v = g.molien.dim(k as usize).ok_or_else(|| Error::Invalid(format!("no Molien coefficient at {k}")))?;
                    computed.insert(
                        k,
                        Computed {
                            value: v as i64,
                            certified: true,
                            certificate: "Molien series".into(),
                        },
                    );
                }
            }
            "epoly_ring" => {
                let step = wb.group(&group)?.family.step;
                let top = degrees.iter().copied().max().unwrap_or(0);
                let weights: Vec<u32> = (1..=top / step).map(|i| i * step).collect();
                wb.ensure_phis(&group, &weights)?;
                let g = wb.group(&group)?;
                let rows = epoly_ring_dims(&mut g.family, &weights, &degrees, Some(&g.molien), &cfg)?;
                for r in rows {
                    computed.insert(
                        r.weight,
                        Computed {
                            value: r.dim as i64,
                            certified: r.certified,
                            certificate: r.certificate,
                        },
                    );
                }
            }
            "enumerator_ring" => {
                let (g, cwes) = wb.parts(&group)?;
                let w = invariants::w_ring(
                    cwes,
                    &WeightEnumeratorPolicy::default(),
                    g.resolved.group.generators(),
                    &degrees,
                    &g.molien,
                    &cfg,
                )?;
                notes.push(format!("generators: {}", w.generators.join(", ")));
                for s in &w.substitute_trials {
                    notes.push(format!("length-16 candidate {}: dim at 16 = {}", s.candidate, s.dim16));
                }
                if let Some(c) = &w.chosen_substitute {
                    notes.push(format!("second length-16 enumerator: {c}"));
                }
                for r in w.reports {
                    computed.insert(
                        r.degree,
                        Computed {
                            value: r.achieved as i64,
                            certified: r.certified,
                            certificate: r.certificate,
                        },
                    );
                }
            }
            "combined_ring" => {
                wb.ensure_phis(&group, &[8, 16, 24, 32, 40, 48])?;
                let want32 = degrees.iter().any(|&k| k >= 32);
                let mut cw = Vec::new();
                for n in DEFAULT_COMBINED_CWES {
                    if n == "q32" && !want32 {
                        continue;
                    }
                    cw.push(wb.cwe(n)?);
                }
                let deps: Vec<u32> = if tier == Tier::Extended { vec![32, 40, 48] } else { vec![] };
                let g = wb.group(&group)?;
                let r = invariants::combined_ring_check(
                    &mut g.family,
                    &g.cosets,
                    g.resolved.group.generators(),
                    &[8, 16, 24],
                    &cw,
                    &degrees,
                    &deps,
                    &g.molien,
                    &cfg,
                )?;
                notes.push(format!("generators: phi8, phi16, phi24, {}", r.cwes.join(", ")));
                for d in &r.dependencies {
                    notes.push(format!(
                        "phi{} in span of products: {} ({})",
                        d.weight, d.in_span, d.certificate
                    ));
                    if !(d.in_span && d.certified) {
                        notes.push(format!("dependency of phi{} not established", d.weight));
                    }
                }
                for rep in r.reports {
                    computed.insert(
                        rep.degree,
                        Computed {
                            value: rep.achieved as i64,
                            certified: rep.certified,
                            certificate: rep.certificate,
                        },
                    );
                }
            }
            other => return Err(Error::Invalid(format!("unknown table quantity {other}"))),
        }
        for (i, &k) in t.degrees.iter().enumerate() {
            cells.push(cell(row, k, row.values[i], computed.remove(&k)));
        }
    }
    let g = wb.group(&group)?;
    Ok(TableReport {
        id: t.id,
        caption: t.caption.clone(),
        group: t.group.clone(),
        variant: g.resolved.variant.clone(),
        cells,
        notes,
        seconds: wb.settings.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

/// Recomputes the listed tables (all when `ids` is empty).
pub fn verify_tables(wb: &mut Workbench, ids: &[u32], tier: Tier) -> Result<VerificationReport> {
    let all = golden();
    let mut tables = Vec::new();
    let wanted: Vec<u32> = if ids.is_empty() { all.tables.iter().map(|t| t.id).collect() } else { ids.to_vec() };
    for id in wanted {
        let t = golden_table(id)?;
        tables.push(verify_table(wb, &t, tier)?);
    }
    let count = |s: CellStatus| tables.iter().flat_map(|t| &t.cells).filter(|c| c.status == s).count();
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        tier,
        rank_strategy: wb.settings.span.engine.strategy_name().to_string(),
        passed: count(CellStatus::Pass),
        failed: count(CellStatus::Fail),
        skipped: count(CellStatus::Skipped),
        tables,
    })
}

pub fn render_text(r: &VerificationReport) -> String {
    let mut s = String::new();
    for t in &r.tables {
        let _ = writeln!(s, "Table {}: {} [group {}, variant {}]", t.id, t.caption, t.group, t.variant);
        let mut rows: Vec<&str> = Vec::new();
        for c in &t.cells {
            if !rows.contains(&c.row.as_str()) {
                rows.push(&c.row);
            }
        }
        for row in rows {
            let cells: Vec<&CellReport> = t.cells.iter().filter(|c| c.row == row).collect();
            let line: Vec<String> = cells
                .iter()
                .map(|c| match c.status {
                    CellStatus::Pass => format!("{}:{}", c.degree, c.expected),
                    CellStatus::Skipped => format!("{}:-", c.degree),
                    CellStatus::Fail => format!(
                        "{}:{}!={}{}",
                        c.degree,
                        c.computed.map_or("?".into(), |v| v.to_string()),
                        c.expected,
                        if c.certified { "" } else { "(uncertified)" }
                    ),
                })
                .collect();
            let _ = writeln!(s, "  {:<10} {}", row, line.join("  "));
        }
        for c in t.cells.iter().filter(|c| c.status == CellStatus::Fail) {
            let _ = writeln!(
                s,
                "  MISMATCH {} at k={}: printed {}, computed {} ({})",
                c.row,
                c.degree,
                c.expected,
                c.computed.map_or("-".into(), |v| v.to_string()),
                c.certificate
            );
        }
        for n in &t.notes {
            let _ = writeln!(s, "  note: {n}");
        }
        if let Some(sec) = t.seconds {
            let _ = writeln!(s, "  time: {sec:.2}s");
        }
    }
    let _ = writeln!(
        s,
        "{} passed, {} failed, {} skipped (tier {:?}, rank {})",
        r.passed, r.failed, r.skipped, r.tier, r.rank_strategy
    );
    s
}
