use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use eporing::cache::DiskCache;
use eporing::codes::{self, CweRegistry, Z4Code};
use eporing::epoly;
use eporing::invariants::{self, WeightEnumeratorPolicy};
use eporing::matgroup::{CycMatrix, FiniteMatrixGroup, MatrixJson};
use eporing::rank::{RankEngine, RankPolicy};
use eporing::span::SpanConfig;
use eporing::tables::{self, Settings, Tier, Workbench};
use eporing::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Exact invariant-ring computations for the groups attached to Type II
/// codes over Z4.
///
/// Every flag may also be set through the environment variable shown in its
/// help; an explicit flag wins over the environment, which wins over the default.
#[derive(Parser)]
#[command(name = "eporing", version)]
struct Cli {
    /// Worker threads.
    #[arg(long, global = true, env = "EPORING_WORKERS")]
    workers: Option<usize>,
    /// Directory for cached closures, E-polynomials and enumerators.
    #[arg(long, global = true, env = "EPORING_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text", env = "EPORING_FORMAT")]
    format: Format,
    /// Maximum number of codewords an enumeration may visit.
    #[arg(long, global = true, default_value_t = 10_000_000_000, env = "EPORING_BUDGET")]
    budget: u128,
    /// Primes used by modular rank computations.
    #[arg(long, global = true, default_value_t = 3, env = "EPORING_PRIMES")]
    primes: usize,
    /// Rank strategy: certified, modular or bareiss.
    #[arg(long, global = true, default_value = "certified", env = "EPORING_RANK")]
    rank: String,
    /// Matrices up to this many rows are certified exactly.
    #[arg(long, global = true, default_value_t = 500, env = "EPORING_EXACT_ROWS")]
    exact_rows: usize,
    /// Include wall-clock timings in reports.
    #[arg(long, global = true, env = "EPORING_TIMING")]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Group order, Molien coefficients, or coset data.
    Group {
        #[arg(value_enum)]
        what: GroupWhat,
        /// Catalog group: G, G8, appB-G, appB-H.
        #[arg(long, default_value = "G8")]
        group: String,
        /// JSON list of generator matrices instead of a catalog group.
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 48)]
        upto: usize,
    },
    /// E-polynomials of a catalog group.
    Epoly {
        #[command(subcommand)]
        what: EpolyWhat,
    },
    /// Complete weight enumerators and self-duality checks.
    Code {
        #[arg(value_enum)]
        what: CodeWhat,
        /// Bundled code (see the manifest), or zeroN for the zero code of length N.
        #[arg(long)]
        builtin: Option<String>,
        /// Generator matrix file (whitespace-separated or packed digit rows).
        #[arg(long)]
        file: Option<PathBuf>,
        /// Enumeration strategy: walk or span.
        #[arg(long, default_value = "walk")]
        strategy: String,
    },
    /// Rings generated by enumerators and E-polynomials of G8.
    Ring {
        #[arg(value_enum)]
        what: RingWhat,
        /// Highest degree (multiples of 8).
        #[arg(long, default_value_t = 24)]
        upto: u32,
        /// Comma-separated enumerators for `combined` and `prune`.
        #[arg(long, value_delimiter = ',')]
        cwes: Vec<String>,
    },
    /// Recompute the bundled dimension tables and compare with the printed values.
    VerifyTables {
        /// Table numbers (default: all).
        tables: Vec<u32>,
        #[arg(long, default_value = "core")]
        tier: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GroupWhat {
    Order,
    Molien,
    Cosets,
}

#[derive(Subcommand)]
enum EpolyWhat {
    /// Print φ_k.
    Compute {
        k: u32,
        #[arg(long, default_value = "G8")]
        group: String,
    },
    /// dim E_k at every multiple of the step up to --upto.
    Dims {
        #[arg(long, default_value = "G8")]
        group: String,
        #[arg(long)]
        upto: Option<u32>,
    },
    /// Minimal generating weights, scanning up to --upto (default κ).
    Mingens {
        #[arg(long, default_value = "G8")]
        group: String,
        #[arg(long)]
        upto: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CodeWhat {
    Cwe,
    Check,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RingWhat {
    /// Dimensions of the enumerator ring W.
    Enumerators,
    /// New generators needed per degree, against the (4,2,3,1,1) budget.
    Budget,
    /// Dimensions of the ring of φ8, φ16, φ24 and enumerators, plus φ_k dependencies.
    Combined,
    /// Greedy pruning of the enumerator list of the combined ring.
    Prune,
    /// Every reading of the printed generator names of the combined ring.
    Mappings,
}

struct Out {
    text: String,
    json: Value,
    ok: bool,
}

fn settings(cli: &Cli) -> Result<Settings> {
    let policy = RankPolicy {
        primes: cli.primes.max(1),
        fallback_primes: cli.primes.max(3),
        exact_max_rows: cli.exact_rows,
        ..RankPolicy::default()
    };
    let span = SpanConfig {
        engine: RankEngine::by_name(&cli.rank, policy)?,
        modular_primes: cli.primes.max(3),
        ..SpanConfig::default()
    };
    let mut s = Settings {
        budget: cli.budget,
        span,
        timing: cli.timing,
        ..Settings::default()
    };
    if let Some(w) = cli.workers {
        s.workers = w.max(1);
    }
    Ok(s)
}

fn workbench(cli: &Cli) -> Result<Workbench> {
    let wb = Workbench::new(settings(cli)?);
    Ok(match &cli.cache_dir {
        Some(dir) => wb.with_store(Arc::new(DiskCache::new(dir)?)),
        None => wb,
    })
}

fn read_code(builtin: &Option<String>, file: &Option<PathBuf>) -> Result<Z4Code> {
    match (builtin, file) {
        (Some(name), None) => codes::builtin_code(name),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let name = path.file_stem().map_or("file".into(), |s| s.to_string_lossy().to_string());
            Ok(Z4Code::from_matrix(&name, &codes::parse_genmat(&text)?))
        }
        _ => Err(eporing::Error::Invalid("give exactly one of --builtin or --file".into())),
    }
}

fn cmd_group(cli: &Cli, what: GroupWhat, group: &str, file: &Option<PathBuf>, upto: usize) -> Result<Out> {
    let mut wb = workbench(cli)?;
    let (name, variant, g) = match file {
        Some(path) => {
            let js: Vec<MatrixJson> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let gens = js.iter().map(CycMatrix::from_json).collect::<Result<Vec<_>>>()?;
            let g = FiniteMatrixGroup::closure(gens, wb.settings.closure_cap)?;
            (path.display().to_string(), "file".to_string(), g)
        }
        None => {
            let d = wb.group(group)?;
            (d.resolved.name.clone(), d.resolved.variant.clone(), d.resolved.group.clone())
        }
    };
    let mut text = String::new();
    let json = match what {
        GroupWhat::Order => {
            let _ = writeln!(text, "{}", g.order());
            json!({"group": name, "variant": variant, "order": g.order()})
        }
        GroupWhat::Molien => {
            let m = g.molien_series(upto)?;
            let coeffs: Vec<String> = m.coeffs().iter().map(|c| c.to_string()).collect();
            for (k, c) in coeffs.iter().enumerate() {
                let _ = writeln!(text, "{k}: {c}");
            }
            json!({"group": name, "variant": variant, "molien": coeffs})
        }
        GroupWhat::Cosets => {
            let c = g.coset_system()?;
            let rows: Vec<Vec<String>> =
                c.first_rows().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
            let _ = writeln!(text, "|G| = {}\n|K| = {}\nkappa = {}", c.group_order(), c.stabilizer_order(), c.kappa());
            for r in &rows {
                let _ = writeln!(text, "  ({})", r.join(", "));
            }
            json!({"group": name, "variant": variant, "order": c.group_order(),
                   "stabilizer": c.stabilizer_order(), "kappa": c.kappa(), "first_rows": rows})
        }
    };
    Ok(Out { text, json, ok: true })
}

fn cmd_epoly(cli: &Cli, what: &EpolyWhat) -> Result<Out> {
    let mut wb = workbench(cli)?;
    let cfg = wb.settings.span.clone();
    match what {
        EpolyWhat::Compute { k, group } => {
            let p = wb.phi(group, *k)?;
            Ok(Out {
                text: format!("{p}\n"),
                json: json!({"group": group, "weight": k, "poly": p.to_json()}),
                ok: true,
            })
        }
        EpolyWhat::Dims { group, upto } => {
            let step = wb.group(group)?.family.step;
            let top = upto.unwrap_or(12 * step);
            let weights: Vec<u32> = (1..=top / step).map(|i| i * step).collect();
            wb.ensure_phis(group, &weights)?;
            let g = wb.group(group)?;
            let rows = epoly::epoly_ring_dims(&mut g.family, &weights, &weights, Some(&g.molien), &cfg)?;
            let mut text = String::new();
            for r in &rows {
                let _ = writeln!(
                    text,
                    "k={:<3} dim E = {:<4} dim R = {:<5} {}",
                    r.weight,
                    r.dim,
                    r.ambient.map_or("-".into(), |a| a.to_string()),
                    r.certificate
                );
            }
            Ok(Out {
                text,
                ok: rows.iter().all(|r| r.certified),
                json: json!({"group": group, "rows": rows}),
            })
        }
        EpolyWhat::Mingens { group, upto } => {
            let kappa = wb.group(group)?.family.kappa() as u32;
            let bound = upto.unwrap_or(kappa);
            let step = wb.group(group)?.family.step;
            let weights: Vec<u32> = (1..=bound / step).map(|i| i * step).collect();
            wb.ensure_phis(group, &weights)?;
            let g = wb.group(group)?;
            let rep = epoly::minimal_generators(&mut g.family, bound, Some(&g.molien), &cfg)?;
            let list: Vec<String> = rep.generators.iter().map(|w| w.to_string()).collect();
            let mut text = format!("{}\n", list.join(","));
            for r in rep.rows.iter().filter(|r| !r.certified) {
                let _ = writeln!(text, "warning: weight {} decided without certificate ({})", r.weight, r.certificate);
            }
            Ok(Out {
                text,
                ok: rep.rows.iter().all(|r| r.certified),
                json: serde_json::to_value(&rep)?,
            })
        }
    }
}

fn cmd_code(cli: &Cli, what: CodeWhat, builtin: &Option<String>, file: &Option<PathBuf>, strategy: &str) -> Result<Out> {
    let code = read_code(builtin, file)?;
    match what {
        CodeWhat::Check => {
            let c = code.check();
            let text = format!(
                "length {}\nk1 = {}, k2 = {}, |C| = 2^{}\nself-orthogonal: {}\nself-dual: {}\nType II: {}\n",
                c.length, c.k1, c.k2, c.size_log2, c.self_orthogonal, c.self_dual, c.type_ii
            );
            Ok(Out {
                text,
                json: serde_json::to_value(&c)?,
                ok: true,
            })
        }
        CodeWhat::Cwe => {
            let s = settings(cli)?;
            let strat = CweRegistry::default().get(strategy)?;
            let p = match (&cli.cache_dir, builtin) {
                (Some(_), Some(name)) if codes::manifest().iter().any(|e| &e.name == name) => {
                    workbench(cli)?.cwe(name)?.poly
                }
                _ => codes::complete_weight_enumerator(&code, strat.as_ref(), s.workers, s.budget)?.to_rational(),
            };
            Ok(Out {
                text: format!("{p}\n"),
                json: json!({"code": code.name, "length": code.length, "cwe": p.to_json()}),
                ok: true,
            })
        }
    }
}

fn degrees_upto(upto: u32) -> Vec<u32> {
    (1..=upto / 8).map(|i| i * 8).collect()
}

fn cmd_ring(cli: &Cli, what: RingWhat, upto: u32, cwes: &[String]) -> Result<Out> {
    let mut wb = workbench(cli)?;
    let cfg = wb.settings.span.clone();
    let degrees = degrees_upto(upto);
    wb.group("G8")?;
    let mut text = String::new();
    let (json, ok) = match what {
        RingWhat::Enumerators => {
            let (g, cwes) = wb.parts("G8")?;
            let w = invariants::w_ring(cwes, &WeightEnumeratorPolicy::default(), g.generators(), &degrees, &g.molien, &cfg)?;
            let _ = writeln!(text, "generators: {}", w.generators.join(", "));
            if let Some(c) = &w.chosen_substitute {
                let _ = writeln!(text, "second length-16 enumerator: {c}");
            }
            for r in &w.reports {
                let _ = writeln!(text, "k={:<3} dim W = {:<4} dim R8 = {:<4} {}", r.degree, r.achieved,
                    r.expected.unwrap_or(0), r.certificate);
            }
            let ok = w.reports.iter().all(|r| r.certified && r.expected == Some(r.achieved as u64));
            (serde_json::to_value(&w)?, ok)
        }
        RingWhat::Budget => {
            let (g, cwes) = wb.parts("G8")?;
            let molien = g.molien.clone();
            let w = invariants::w_ring(cwes, &WeightEnumeratorPolicy::default(), g.generators(), &degrees, &molien, &cfg)?;
            let mut inv = Vec::new();
            for n in &w.generators {
                inv.push(wb.cwe(n)?);
            }
            let budgets: Vec<u64> = degrees.iter().map(|&k| match k { 8 => 4, 16 => 2, 24 => 3, 32 | 40 => 1, _ => 0 }).collect();
            let rows = invariants::generator_budget(&inv, &degrees, &budgets, &molien, &cfg)?;
            for r in &rows {
                let _ = writeln!(text, "k={:<3} dim R8 = {:<4} from lower = {:<4} demand = {} budget = {} {}",
                    r.degree, r.expected, r.from_lower, r.demand, r.budget,
                    if r.within_budget { "ok" } else { "EXCEEDS BUDGET" });
            }
            (json!({"generators": w.generators, "rows": rows}), rows.iter().all(|r| r.within_budget))
        }
        RingWhat::Combined | RingWhat::Prune => {
            let names: Vec<String> = if cwes.is_empty() {
                tables::DEFAULT_COMBINED_CWES.iter().filter(|n| upto >= 32 || **n != "q32").map(|s| s.to_string()).collect()
            } else {
                cwes.to_vec()
            };
            let mut inv = Vec::new();
            for n in &names {
                inv.push(wb.cwe(n)?);
            }
            wb.ensure_phis("G8", &[8, 16, 24])?;
            let deps: Vec<u32> = degrees.iter().copied().filter(|&k| k > 24).chain(if upto >= 40 { Some(48) } else { None }).collect();
            wb.ensure_phis("G8", &deps)?;
            let g = wb.group("G8")?;
            let gens = g.generators().to_vec();
            if what == RingWhat::Prune {
                let s = invariants::prune_cwe_subset(&mut g.family, &[8, 16, 24], &inv, &degrees, &g.molien, &cfg)?;
                let _ = writeln!(text, "start: {} (reaches Molien: {})", s.start.join(", "), s.start_reaches_molien);
                let _ = writeln!(text, "minimal: {}", s.minimal.join(", "));
                (serde_json::to_value(&s)?, s.start_reaches_molien)
            } else {
                let r = invariants::combined_ring_check(&mut g.family, &g.cosets, &gens, &[8, 16, 24], &inv,
                    &degrees, &deps, &g.molien, &cfg)?;
                let _ = writeln!(text, "generators: phi8, phi16, phi24, {}", r.cwes.join(", "));
                for x in &r.reports {
                    let _ = writeln!(text, "k={:<3} dim R~ = {:<4} dim R8 = {:<4} {}", x.degree, x.achieved,
                        x.expected.unwrap_or(0), x.certificate);
                }
                for d in &r.dependencies {
                    let _ = writeln!(text, "phi{} in span: {} ({})", d.weight, d.in_span, d.certificate);
                }
                let ok = r.reports.iter().all(|x| x.certified && x.expected == Some(x.achieved as u64))
                    && r.dependencies.iter().all(|d| d.in_span && d.certified);
                (serde_json::to_value(&r)?, ok)
            }
        }
        RingWhat::Mappings => {
            let readings: Vec<_> = tables::printed_name_readings()
                .into_iter()
                .filter(|(name, _)| upto >= 32 || name != "p32")
                .collect();
            wb.ensure_phis("G8", &[8, 16, 24])?;
            let (g, cwes) = wb.parts("G8")?;
            let trials = invariants::try_mappings(&mut g.family, cwes, &[8, 16, 24], &readings, &degrees, &g.molien, &cfg)?;
            for t in &trials {
                let used: Vec<String> = t.mapping.iter().map(|(a, b)| format!("{a}={b}")).collect();
                let dims: Vec<String> = t.dims.iter().map(|d| d.to_string()).collect();
                let _ = writeln!(text, "{:<60} {:<20} {}", used.join(" "), dims.join(","),
                    if t.reaches_molien { "generates" } else { "" });
            }
            (serde_json::to_value(&trials)?, true)
        }
    };
    Ok(Out { text, json, ok })
}

fn cmd_verify(cli: &Cli, ids: &[u32], tier: &str) -> Result<Out> {
    let tier: Tier = tier.parse()?;
    let mut wb = workbench(cli)?;
    let r = tables::verify_tables(&mut wb, ids, tier)?;
    Ok(Out {
        text: tables::render_text(&r),
        ok: r.ok(),
        json: serde_json::to_value(&r)?,
    })
}

fn run(cli: &Cli) -> Result<Out> {
    if let Some(w) = cli.workers {
        // Fails only if a pool already exists, which is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    match &cli.command {
        Command::Group { what, group, file, upto } => cmd_group(cli, *what, group, file, *upto),
        Command::Epoly { what } => cmd_epoly(cli, what),
        Command::Code { what, builtin, file, strategy } => cmd_code(cli, *what, builtin, file, strategy),
        Command::Ring { what, upto, cwes } => cmd_ring(cli, *what, *upto, cwes),
        Command::VerifyTables { tables, tier } => cmd_verify(cli, tables, tier),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Text => print!("{}", out.text),
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({"schema": tables::REPORT_SCHEMA, "result": out.json}))
                        .expect("report serializes")
                ),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
