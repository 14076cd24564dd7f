use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eporing::codes::{self, inner, norm8, CosetWalk, Z4Code};
use eporing::groups;
use eporing::invariants::verify_invariance;
use eporing::Error;

fn cwe(name: &str) -> eporing::poly::IntPoly {
    let code = codes::builtin_code(name).unwrap();
    codes::complete_weight_enumerator(&code, &CosetWalk, 1, u128::MAX).unwrap()
}

#[test]
fn octacode_and_klemm_match_printed_expansions() {
    for name in ["o8", "k8"] {
        assert_eq!(cwe(name), codes::cwe_fixture(name).unwrap(), "{name}");
    }
}

#[test]
fn literal_enumerators_are_invariant_and_count_the_code() {
    let gens = groups::lookup("G8").unwrap().variants[0].generators.clone();
    for name in ["p8a", "p8b", "p16a", "o8", "k8"] {
        let p = codes::cwe_fixture(name).unwrap();
        let n = p.homogeneous_degree().unwrap();
        let ones = vec![BigInt::from(1); 4];
        assert_eq!(p.eval(&ones), BigInt::from(4).pow(n / 2), "{name} size");
        assert!(verify_invariance(&p.to_rational(), &gens, 100_000).unwrap().holds, "{name}");
    }
}

#[test]
fn printed_length_24_codes_are_type_ii() {
    for name in ["q24a", "q24b", "g24"] {
        let c = codes::builtin_code(name).unwrap().check();
        assert!(c.type_ii, "{name}");
        assert_eq!((c.length, c.size_log2), (24, 24), "{name}");
    }
    let q = codes::builtin_code("q24a").unwrap().check();
    assert_eq!((q.k1, q.k2), (6, 12));
}

#[test]
fn random_codewords_have_norm_divisible_by_eight() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in ["q24a", "q24b"] {
        let code = codes::builtin_code(name).unwrap();
        let gens: Vec<Vec<u8>> = code.original.rows.clone();
        for _ in 0..100_000 {
            let mut w = vec![0u8; code.length];
            for g in &gens {
                let c: u8 = rng.gen_range(0..4);
                for (x, y) in w.iter_mut().zip(g) {
                    *x = (*x + c * y) % 4;
                }
            }
            assert_eq!(norm8(&w), 0, "{name}");
            assert_eq!(inner(&w, &gens[0]).unwrap(), 0, "{name}");
        }
    }
}

#[test]
fn enumerators_of_length_24_codes_are_invariant() {
    let gens = groups::lookup("G8").unwrap().variants[0].generators.clone();
    for name in ["q24a", "q24b", "g24"] {
        let p = cwe(name);
        assert_eq!(p.l1_norm(), BigInt::from(1u64 << 24));
        assert!(verify_invariance(&p.to_rational(), &gens, 20_000).unwrap().holds, "{name}");
    }
}

#[test]
fn non_invariant_polynomial_is_rejected() {
    let gens = groups::lookup("G8").unwrap().variants[0].generators.clone();
    let mut p = cwe("k8").to_rational();
    // Perturb one coefficient.
    let f = eporing::poly::parse_poly_text(4, "t0^4 t1^4").unwrap();
    p = p.checked_add(&f.scale(&BigRational::from_integer(BigInt::from(3)))).unwrap();
    assert!(!verify_invariance(&p, &gens, 100_000).unwrap().holds);
}

#[test]
fn budget_is_enforced() {
    let code = codes::builtin_code("g24").unwrap();
    match codes::complete_weight_enumerator(&code, &CosetWalk, 1, 1000) {
        Err(Error::BudgetExceeded { required, budget }) => {
            assert_eq!(required, 1 << 24);
            assert_eq!(budget, 1000);
        }
        other => panic!("expected a budget error, got {other:?}"),
    }
}

#[test]
fn check_flags_for_non_type_ii_codes() {
    let m = codes::parse_genmat("1 1 0 0\n0 0 1 1\n").unwrap();
    let c = Z4Code::from_matrix("small", &m).check();
    assert!(!c.self_orthogonal);
    assert!(!c.length_multiple_of_8);
    let m = codes::parse_genmat("2 2 0 0\n0 0 2 2\n1 1 1 1\n").unwrap();
    let c = Z4Code::from_matrix("half", &m).check();
    assert!(c.self_orthogonal);
    assert!(!c.type_ii);
    assert_eq!(codes::builtin_code("zero8").unwrap().size(), 1);
}

#[test]
fn matrix_text_round_trips() {
    for e in codes::manifest().iter().filter(|e| e.matrix.is_some()) {
        let m = codes::builtin_matrix(&e.name).unwrap();
        assert_eq!(codes::parse_genmat(&m.to_text()).unwrap(), m, "{}", e.name);
    }
}
