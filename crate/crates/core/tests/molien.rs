use eporing::groups;
use eporing::matgroup::{CycMatrix, FiniteMatrixGroup};
use eporing::poly::binomial;
use eporing::series::RationalFormula;

const R8: &str = "(1+t^8)(1+t^16)^2/((1-t^8)^3(1-t^24))";
const R_PRINTED: &str = "(1+t^2)(1+t^4)(1-t^2+2t^8+2t^16-t^18+t^24)/((1-t^8)^3(1-t^24))";

fn molien(name: &str, upto: usize) -> Vec<i64> {
    let g = groups::lookup(name).unwrap().resolve(4096).unwrap();
    g.group.molien_series(upto).unwrap().to_i64().unwrap()
}

fn expand(f: &str, upto: usize) -> Vec<i64> {
    RationalFormula::parse(f).unwrap().expand(upto).to_i64().unwrap()
}

#[test]
fn g8_matches_closed_form() {
    assert_eq!(molien("G8", 96), expand(R8, 96));
}

#[test]
fn three_dimensional_groups_match_closed_forms() {
    assert_eq!(molien("appB-G", 40), expand("1/((1-t^4)(1-t^6))", 40));
    assert_eq!(molien("appB-H", 40), expand("1/((1-t^2)(1-t^6)(1-t^10))", 40));
}

#[test]
fn g_differs_from_printed_form_by_one_factor() {
    let m = molien("G", 96);
    let printed = expand(R_PRINTED, 96);
    assert_ne!(m, printed);
    assert_eq!((m[12], printed[12]), (3, 2));
    let corrected = format!("(1+t^12){R_PRINTED}");
    assert_eq!(m, expand(&corrected, 96));
}

#[test]
fn coefficients_are_nonnegative_integers_starting_at_one() {
    for name in ["G", "G8", "appB-G", "appB-H"] {
        let m = molien(name, 40);
        assert_eq!(m[0], 1);
        assert!(m.iter().all(|&c| c >= 0), "{name}");
    }
}

#[test]
fn trivial_group_gives_the_polynomial_ring() {
    let g = FiniteMatrixGroup::closure(vec![CycMatrix::identity(8, 4)], 10).unwrap();
    assert_eq!(g.order(), 1);
    let m = g.molien_series(10).unwrap().to_i64().unwrap();
    for (k, c) in m.iter().enumerate() {
        assert_eq!(*c as u64, binomial(k as u64 + 3, 3));
    }
}

#[test]
fn group_orders_and_cosets() {
    let mut seen = Vec::new();
    for name in ["G", "G8", "appB-G", "appB-H"] {
        let r = groups::lookup(name).unwrap().resolve(4096).unwrap();
        let c = r.group.coset_system().unwrap();
        seen.push((r.group.order(), c.stabilizer_order(), c.kappa()));
    }
    assert_eq!(seen[0], (384, 8, 48));
    assert_eq!(seen[1], (1536, 16, 96));
    assert_eq!(seen[2].0, 24);
    assert_eq!(seen[3].0, 120);
}
