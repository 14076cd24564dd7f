//! One line per acceptance criterion. Criteria 12-14 (the length-32
//! enumeration and everything that depends on it) are skipped when
//! `EPORING_TIER=core`.
//!
//! Two criteria are expected to fail because the printed values disagree
//! with the exact computation; they are listed in `KNOWN_RED` with the
//! reason, and the run only fails if the set of failures differs from it.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eporing::codes::{self, CosetWalk, SpanWalk, Z4Code, Z4Mat};
use eporing::cyclotomic::CyclotomicNumber;
use eporing::epoly::{e_polynomial, e_polynomial_full, minimal_generators};
use eporing::invariants::{self, NamedInvariant, WeightEnumeratorPolicy};
use eporing::matgroup::CycMatrix;
use eporing::poly::{CycPoly, Monomial};
use eporing::series::RationalFormula;
use eporing::substitute::substitute_linear;
use eporing::tables::{self, CellStatus, Settings, Tier, Workbench};
use eporing::Result;

const KNOWN_RED: &[(u32, &str)] = &[
    (
        3,
        "the printed closed form for the order-384 group lacks a factor 1+t^12 (it gives 2 at t^12, the group and the table give 3), and the table prints 16 at k=16 where the series gives 11",
    ),
    (
        5,
        "the printed E row has 4 at k=32 and 7 at k=40; exact certified ranks and an independent evaluation oracle give 7 and 11 (4 is also below dim E^8_32 = 5, which the same ring contains)",
    ),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(pass: bool, detail: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome {
        pass,
        detail: detail.into(),
    })
}

fn list<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn c1(wb: &mut Workbench) -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, want) in [("G", 384), ("G8", 1536), ("appB-G", 24), ("appB-H", 120)] {
        let g = wb.group(name)?;
        let order = g.resolved.group.order();
        pass &= order == want;
        parts.push(format!("{name}={order} [{}]", g.resolved.variant));
    }
    ok(pass, parts.join(" "))
}

fn c2(wb: &mut Workbench) -> Result<Outcome> {
    let g = wb.group("G")?;
    let (k1, c1) = (g.cosets.stabilizer_order(), g.cosets.kappa());
    let g8 = wb.group("G8")?;
    let (k2, c2) = (g8.cosets.stabilizer_order(), g8.cosets.kappa());
    ok(
        (k1, c1, k2, c2) == (8, 48, 16, 96),
        format!("|K|={k1},{k2} kappa={c1},{c2}"),
    )
}

fn series(wb: &mut Workbench, name: &str, upto: usize) -> Result<Vec<i64>> {
    Ok(wb.group(name)?.molien.coeffs()[..=upto].iter().map(|c| c.to_integer().try_into().unwrap()).collect())
}

fn c3(wb: &mut Workbench) -> Result<Outcome> {
    let expand = |f: &str, n: usize| RationalFormula::parse(f).map(|r| r.expand(n).to_i64().unwrap());
    let checks = [
        ("G", "(1+t^2)(1+t^4)(1-t^2+2t^8+2t^16-t^18+t^24)/((1-t^8)^3(1-t^24))", 96),
        ("G8", "(1+t^8)(1+t^16)^2/((1-t^8)^3(1-t^24))", 96),
        ("appB-G", "1/((1-t^4)(1-t^6))", 40),
        ("appB-H", "1/((1-t^2)(1-t^6)(1-t^10))", 40),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f, n) in checks {
        let m = series(wb, name, n)?;
        let e = expand(f, n)?;
        let bad: Vec<usize> = (0..=n).filter(|&k| m[k] != e[k]).collect();
        pass &= bad.is_empty();
        parts.push(if bad.is_empty() {
            format!("{name} formula ok to {n}")
        } else {
            format!("{name} formula differs at k={}", list(&bad[..bad.len().min(4)]))
        });
    }
    let r = tables::verify_tables(wb, &[2, 3, 5, 6], Tier::Core)?;
    let mut bad_cells = Vec::new();
    for t in &r.tables {
        for c in t.cells.iter().filter(|c| c.row.starts_with("dim R")) {
            if c.status != CellStatus::Pass {
                bad_cells.push(format!("T{} k={} printed {} got {}", t.id, c.degree, c.expected, c.computed.unwrap_or(-1)));
            }
        }
    }
    pass &= bad_cells.is_empty();
    parts.push(if bad_cells.is_empty() { "all dim R cells ok".into() } else { bad_cells.join("; ") });
    ok(pass, parts.join("; "))
}

fn c4(wb: &mut Workbench) -> Result<Outcome> {
    let p = wb.phi("G", 4)?;
    ok(p.is_zero(), format!("phi4 = {p}"))
}

fn epoly_row(wb: &mut Workbench, table: u32) -> Result<(bool, String)> {
    let r = tables::verify_tables(wb, &[table], Tier::Extended)?;
    let cells: Vec<_> = r.tables[0].cells.iter().filter(|c| c.row.starts_with("dim E")).collect();
    let pass = cells.iter().all(|c| c.status == CellStatus::Pass);
    let got: Vec<String> = cells
        .iter()
        .map(|c| match c.status {
            CellStatus::Pass => c.expected.to_string(),
            _ => format!("{}(printed {})", c.computed.unwrap_or(-1), c.expected),
        })
        .collect();
    Ok((pass, got.join(",")))
}

fn c5(wb: &mut Workbench) -> Result<Outcome> {
    let (pass, s) = epoly_row(wb, 2)?;
    ok(pass, format!("dim E_k, k=8..48: {s}"))
}

fn c6(wb: &mut Workbench) -> Result<Outcome> {
    let (pass, s) = epoly_row(wb, 3)?;
    ok(pass, format!("dim E^8_k, k=8..96: {s}"))
}

fn c7(wb: &mut Workbench) -> Result<Outcome> {
    let cfg = wb.settings.span.clone();
    let mut pass = true;
    let mut parts = Vec::new();
    let wants: [(&str, u32, &[u32]); 4] = [
        ("G", 48, &[8, 12, 16, 20, 24, 28, 32, 40, 48]),
        ("G8", 96, &[8, 16, 24, 32, 40, 48, 56, 64, 72, 80]),
        ("appB-G", 40, &[4, 6]),
        ("appB-H", 40, &[2, 6, 10]),
    ];
    for (name, bound, want) in wants {
        let step = wb.group(name)?.family.step;
        let weights: Vec<u32> = (1..=bound / step).map(|i| i * step).collect();
        wb.ensure_phis(name, &weights)?;
        let g = wb.group(name)?;
        let rep = minimal_generators(&mut g.family, bound, Some(&g.molien), &cfg)?;
        let certified = rep.rows.iter().all(|r| r.certified);
        pass &= rep.generators == want && certified;
        parts.push(format!("{name}: {{{}}}{}", list(&rep.generators), if certified { "" } else { " (uncertified)" }));
    }
    ok(pass, parts.join(" "))
}

fn c8(wb: &mut Workbench) -> Result<Outcome> {
    let gens = wb.group("G8")?.generators().to_vec();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["o8", "k8"] {
        let code = codes::builtin_code(name)?;
        let p = codes::complete_weight_enumerator(&code, &CosetWalk, 1, u128::MAX)?;
        let same = p == codes::cwe_fixture(name)?;
        pass &= same;
        parts.push(format!("{name} {}", if same { "matches" } else { "DIFFERS" }));
    }
    for name in ["p8a", "p8b", "p16a"] {
        let p = codes::cwe_fixture(name)?;
        let n = p.homogeneous_degree().unwrap();
        let count = p.eval(&vec![BigInt::from(1); 4]) == BigInt::from(4).pow(n / 2);
        let inv = invariants::verify_invariance(&p.to_rational(), &gens, invariants::EXACT_SUBSTITUTION_LIMIT)?.holds;
        pass &= count && inv;
        parts.push(format!("{name} invariant={inv} size={count}"));
    }
    ok(pass, parts.join(", "))
}

fn c9(wb: &mut Workbench) -> Result<Outcome> {
    let gens = wb.group("G8")?.generators().to_vec();
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["q24a", "q24b"] {
        let code = codes::builtin_code(name)?;
        let check = code.check();
        let inv = wb.cwe(name)?;
        let words = inv.poly.terms().fold(BigRational::from_integer(0.into()), |a, (_, c)| a + c);
        let r = invariants::verify_invariance(&inv.poly, &gens, invariants::EXACT_SUBSTITUTION_LIMIT)?;
        let good = check.type_ii && code.size() == 1 << 24 && words == BigRational::from_integer((1u64 << 24).into()) && r.holds;
        pass &= good;
        let how: Vec<&str> = r.checks.iter().map(|c| c.method.as_str()).collect();
        parts.push(format!("{name} TypeII={} |C|=4^{} invariant={} ({})", check.type_ii, check.size_log2 / 2, r.holds, how.join("/")));
    }
    ok(pass, parts.join(", "))
}

fn dims_of(r: &[invariants::GradedSpanReport]) -> Vec<usize> {
    r.iter().map(|x| x.achieved).collect()
}

fn c10(wb: &mut Workbench) -> Result<Outcome> {
    let cfg = wb.settings.span.clone();
    let degrees = [8, 16, 24];
    let (g, cwes) = wb.parts("G8")?;
    let w = invariants::w_ring(cwes, &WeightEnumeratorPolicy::default(), g.generators(), &degrees, &g.molien, &cfg)?;
    let wd = dims_of(&w.reports);
    let mut cw = Vec::new();
    for n in &tables::DEFAULT_COMBINED_CWES[..6] {
        cw.push(wb.cwe(n)?);
    }
    wb.ensure_phis("G8", &[8, 16, 24])?;
    let g = wb.group("G8")?;
    let gens = g.generators().to_vec();
    let r = invariants::combined_ring_check(&mut g.family, &g.cosets, &gens, &[8, 16, 24], &cw, &degrees, &[], &g.molien, &cfg)?;
    let rd = dims_of(&r.reports);
    let e = invariants::combined_ring_check(&mut g.family, &g.cosets, &gens, &[8, 16, 24], &[], &[16], &[], &g.molien, &cfg)?;
    let e16 = e.reports[0].achieved;
    let certified = w.reports.iter().chain(&r.reports).all(|x| x.certified);
    ok(
        wd == [4, 11, 25] && rd == [4, 11, 25] && e16 == 2 && certified,
        format!(
            "W={} (second length-16 enumerator {}), R~={} with {}, E^8_16={e16} < 11",
            list(&wd),
            w.chosen_substitute.as_deref().unwrap_or("none"),
            list(&rd),
            r.cwes.join("+")
        ),
    )
}

fn random_cyc(rng: &mut ChaCha8Rng, order: u32) -> CyclotomicNumber {
    let c = (0..order)
        .map(|_| BigRational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=5).into()))
        .collect();
    CyclotomicNumber::from_coeffs(order, c)
}

fn c11(wb: &mut Workbench) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut field = 0;
    for i in 0..1000 {
        let n = [5, 8, 12, 20][i % 4];
        let (a, b, c) = (random_cyc(&mut rng, n), random_cyc(&mut rng, n), random_cyc(&mut rng, n));
        let good = &a + &b == &b + &a
            && &a * &b == &b * &a
            && &(&a * &b) * &c == &a * &(&b * &c)
            && &a * &(&b + &c) == &(&a * &b) + &(&a * &c)
            && (a.is_zero() || (&a * &a.inv()?).is_one());
        field += good as usize;
    }

    let gens = wb.group("G8")?.generators().to_vec();
    let word = |rng: &mut ChaCha8Rng| {
        let mut m = CycMatrix::identity(8, 4);
        for _ in 0..rng.gen_range(0..4) {
            m = m.checked_mul(&gens[rng.gen_range(0..gens.len())]).unwrap();
        }
        m
    };
    let mut action = 0;
    for _ in 0..30 {
        let mut f = CycPoly::zero(4);
        for _ in 0..4 {
            let e: Vec<u32> = (0..4).map(|_| rng.gen_range(0..3)).collect();
            f.add_term(Monomial::new(&e), &CyclotomicNumber::from_int(rng.gen_range(-5..=5)).embed(8)?);
        }
        let (a, b) = (word(&mut rng), word(&mut rng));
        let lhs = substitute_linear(&substitute_linear(&f, &a)?, &b)?;
        action += (lhs == substitute_linear(&f, &a.checked_mul(&b)?)?) as usize;
    }

    let cwe = |m: &Z4Mat, w: usize| codes::complete_weight_enumerator(&Z4Code::from_matrix("x", m), &CosetWalk, w, u128::MAX);
    let mut sums = 0;
    let small: Vec<Z4Mat> = (0..10)
        .map(|_| {
            let n = rng.gen_range(2..=8);
            let k = rng.gen_range(1..=3);
            Z4Mat::new((0..k).map(|_| (0..n).map(|_| rng.gen_range(0..4)).collect()).collect()).unwrap()
        })
        .chain([codes::builtin_matrix("o8")?, codes::builtin_matrix("k8")?])
        .collect();
    for i in 0..small.len() {
        let j = (i + 1) % small.len();
        let lhs = cwe(&small[i].direct_sum(&small[j]), 1)?;
        sums += (lhs == cwe(&small[i], 1)?.checked_mul(&cwe(&small[j], 1)?)?) as usize;
    }
    let mut brute = 0;
    for m in &small[..10] {
        brute += (cwe(m, 1)? == codes::complete_weight_enumerator(&Z4Code::from_matrix("x", m), &SpanWalk, 1, u128::MAX)?) as usize;
    }
    let mut parallel = 0;
    for name in ["k16", "g24", "q24b"] {
        let m = codes::builtin_matrix(name)?;
        parallel += (cwe(&m, 1)? == cwe(&m, 4)?) as usize;
    }
    let mut forms = 0;
    for name in ["G", "G8"] {
        let g = wb.group(name)?;
        for k in [8, 16] {
            forms += (e_polynomial(&g.cosets, k)? == e_polynomial_full(&g.resolved.group, k)?) as usize;
        }
    }
    ok(
        field == 1000 && action == 30 && sums == small.len() && brute == 10 && parallel == 3 && forms == 4,
        format!(
            "field {field}/1000, action {action}/30, direct sums {sums}/{}, brute force {brute}/10, parallel {parallel}/3, coset forms {forms}/4",
            small.len()
        ),
    )
}

fn c12(wb: &mut Workbench) -> Result<Outcome> {
    let code = codes::builtin_code("q32")?;
    let check = code.check();
    let gens = wb.group("G8")?.generators().to_vec();
    let t = Instant::now();
    let inv = wb.cwe("q32")?;
    let secs = t.elapsed().as_secs_f64();
    let words = inv.poly.terms().fold(BigRational::from_integer(0.into()), |a, (_, c)| a + c);
    let r = invariants::verify_invariance(&inv.poly, &gens, invariants::EXACT_SUBSTITUTION_LIMIT)?;
    ok(
        check.type_ii && words == BigRational::from_integer(BigInt::from(1u64 << 32)) && r.holds,
        format!(
            "TypeII={} |C|=4^{} terms={} invariant={} enumeration {secs:.0}s",
            check.type_ii,
            check.size_log2 / 2,
            inv.poly.len(),
            r.holds
        ),
    )
}

fn c13(wb: &mut Workbench) -> Result<Outcome> {
    let cfg = wb.settings.span.clone();
    let degrees = [8, 16, 24, 32, 40];
    let (g, cwes) = wb.parts("G8")?;
    let molien = g.molien.clone();
    let w = invariants::w_ring(cwes, &WeightEnumeratorPolicy::default(), g.generators(), &degrees, &molien, &cfg)?;
    let wd = dims_of(&w.reports);
    let gens: Vec<NamedInvariant> = w.generators.iter().map(|n| wb.cwe(n)).collect::<Result<_>>()?;
    let b = invariants::generator_budget(&gens, &degrees, &[4, 2, 3, 1, 1], &molien, &cfg)?;
    let demand: Vec<u64> = b.iter().map(|r| r.demand).collect();
    ok(
        wd == [4, 11, 25, 48, 83]
            && w.reports.iter().all(|r| r.certified)
            && b.iter().all(|r| r.within_budget)
            && demand[4] == 0,
        format!("W={} from {}; demand={} within (4,2,3,1,1)", list(&wd), w.generators.join("+"), list(&demand)),
    )
}

fn c14(wb: &mut Workbench) -> Result<Outcome> {
    let cfg = wb.settings.span.clone();
    let degrees = [8, 16, 24, 32, 40];
    let cw: Vec<NamedInvariant> = tables::DEFAULT_COMBINED_CWES.iter().map(|n| wb.cwe(n)).collect::<Result<_>>()?;
    wb.ensure_phis("G8", &[8, 16, 24, 32, 40, 48])?;
    let all: Vec<NamedInvariant> = ["p8a", "p8b", "o8", "k8", "p16a", "k16", "g24", "q24a", "q24b", "q32"]
        .iter()
        .map(|n| wb.cwe(n))
        .collect::<Result<_>>()?;
    let g = wb.group("G8")?;
    let gens = g.generators().to_vec();
    let r = invariants::combined_ring_check(&mut g.family, &g.cosets, &gens, &[8, 16, 24], &cw, &degrees, &[32, 40, 48], &g.molien, &cfg)?;
    let rd = dims_of(&r.reports);
    let deps_ok = r.dependencies.iter().all(|d| d.in_span && d.certified);
    let prune = invariants::prune_cwe_subset(&mut g.family, &[8, 16, 24], &all, &degrees, &g.molien, &cfg)?;
    let (g, cwes) = wb.parts("G8")?;
    let trials = invariants::try_mappings(&mut g.family, cwes, &[8, 16, 24], &tables::printed_name_readings(), &degrees, &g.molien, &cfg)?;
    let working: Vec<String> = trials
        .iter()
        .filter(|t| t.reaches_molien)
        .map(|t| t.mapping.iter().filter(|(a, b)| a != b).map(|(a, b)| format!("{a}={b}")).collect::<Vec<_>>().join(" "))
        .collect();
    ok(
        rd == [4, 11, 25, 48, 83] && r.reports.iter().all(|x| x.certified) && deps_ok,
        format!(
            "R~={} with {}; phi32,40,48 in span (certified: {}); greedy minimal subset {}; {}/{} name readings generate, e.g. [{}]",
            list(&rd),
            r.cwes.join("+"),
            deps_ok,
            prune.minimal.join("+"),
            working.len(),
            trials.len(),
            working.first().cloned().unwrap_or_default()
        ),
    )
}

type Check = fn(&mut Workbench) -> Result<Outcome>;

fn main() {
    let core_only = std::env::var("EPORING_TIER").map(|v| v == "core").unwrap_or(false);
    let mut wb = Workbench::new(Settings::default());
    let checks: [(u32, &str, bool, Check); 14] = [
        (1, "group orders", false, c1),
        (2, "coset data", false, c2),
        (3, "Molien series vs closed forms and printed dims", false, c3),
        (4, "phi4 vanishes for G", false, c4),
        (5, "E row of the order-384 table", false, c5),
        (6, "E^8 row up to degree 96", false, c6),
        (7, "minimal E-polynomial generators", false, c7),
        (8, "golden enumerators", false, c8),
        (9, "printed length-24 codes", false, c9),
        (10, "enumerator and combined rings to degree 24", false, c10),
        (11, "property suites", false, c11),
        (12, "length-32 enumeration", true, c12),
        (13, "enumerator ring to degree 40 and generator budget", true, c13),
        (14, "combined ring to degree 40 and phi dependencies", true, c14),
    ];
    let mut failed = Vec::new();
    for (id, what, extended, f) in checks {
        let tier = if extended { "extended" } else { "core" };
        if extended && core_only {
            println!("criterion {id:>2} [{tier}] SKIP  {what}");
            continue;
        }
        let t = Instant::now();
        let out = f(&mut wb).unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e}"),
        });
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{tier}] {status}  {what}: {} ({:.1}s)", out.detail, t.elapsed().as_secs_f64());
        if !out.pass {
            if let Some((_, why)) = KNOWN_RED.iter().find(|(k, _)| *k == id) {
                println!("              known discrepancy: {why}");
            }
            failed.push(id);
        }
    }
    let known: Vec<u32> = KNOWN_RED.iter().map(|(k, _)| *k).collect();
    println!("failed criteria: {:?}; documented discrepancies: {:?}", failed, known);
    if failed != known {
        std::process::exit(1);
    }
}
