use cgomega::binomial::binomial;
use cgomega::omega::{extract_cg, hadamard_signed, lambda_minus_v_pow, omega0, omega_n, tilde_omega};
use cgomega::racah::{racah_cg, verify_against_oracles};
use cgomega::tables::{build_table, parse_json, render, Format};
use cgomega::{Projection, Route, TwoJ};
use num_bigint::BigInt;
use proptest::prelude::*;

fn pair(max: u32) -> impl Strategy<Value = (TwoJ, TwoJ)> {
    (0..=max, 0..=max).prop_map(|(a, b)| (TwoJ::new(a), TwoJ::new(b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vandermonde_up_to_forty((j1, j2) in pair(40)) {
        let (a, b) = (j1.twice(), j2.twice());
        let m = omega0(j1, j2);
        for s in 0..=a + b {
            prop_assert_eq!(BigInt::from(m.diagonal(s).abs_sum()), binomial((a + b) as i64, s as i64));
        }
    }

    #[test]
    fn routes_extract_identically((j1, j2) in pair(24), n_frac in 0.0f64..1.0) {
        let n = (n_frac * (j1.twice().min(j2.twice()) + 1) as f64) as u32;
        let n = n.min(j1.twice().min(j2.twice()));
        let product = omega_n(j1, j2, n, Route::Product).unwrap();
        for route in [Route::TildeSquared, Route::LvSquared] {
            let other = omega_n(j1, j2, n, route).unwrap();
            prop_assert!(product.is_equivalent(&other));
            for u1 in 0..=j1.twice() {
                for u2 in 0..=j2.twice() {
                    prop_assert_eq!(extract_cg(&product, u1, u2).unwrap(), extract_cg(&other, u1, u2).unwrap());
                }
            }
        }
    }

    #[test]
    fn signed_product_never_mismatches((j1, j2) in pair(30)) {
        for n in 0..=j1.twice().min(j2.twice()) {
            let lv = lambda_minus_v_pow(j1, j2, n);
            let tilde = tilde_omega(j1, j2, n).unwrap();
            prop_assert!(hadamard_signed(&lv, &tilde).is_ok());
        }
    }

    #[test]
    fn engine_matches_racah_at_random_cells((j1, j2) in pair(40), pick in any::<(u32, u32, u32)>()) {
        let (a, b) = (j1.twice(), j2.twice());
        let n = pick.0 % (a.min(b) + 1);
        let u1 = pick.1 % (a + 1);
        let u2 = pick.2 % (b + 1);
        let total = TwoJ::new(a + b - 2 * n);
        let m1 = Projection::new(2 * u1 as i32 - a as i32);
        let m2 = Projection::new(2 * u2 as i32 - b as i32);
        let engine = extract_cg(&omega_n(j1, j2, n, Route::Product).unwrap(), u1, u2).unwrap();
        prop_assert_eq!(engine, racah_cg(j1, m1, j2, m2, total).unwrap());
    }

    #[test]
    fn json_round_trip((j1, j2) in pair(8), digits in proptest::option::of(1u32..30)) {
        let table = build_table(j1, j2, Route::Product).unwrap();
        let text = render(&table, Format::Json, digits).unwrap();
        prop_assert_eq!(parse_json(&text).unwrap(), table);
    }
}

#[test]
fn larger_pairs_pass_all_checks() {
    for (a, b) in [(10, 9), (13, 4), (15, 15)] {
        let report = verify_against_oracles(TwoJ::new(a), TwoJ::new(b)).unwrap();
        assert!(report.passed(), "({a},{b}): {:?}", &report.failures[..report.failures.len().min(3)]);
    }
}

#[test]
fn tilde_omega_is_shifted_omega0_with_signs() {
    // n = 0 reproduces omega0 exactly
    for (a, b) in [(0, 0), (3, 2), (7, 5)] {
        let (j1, j2) = (TwoJ::new(a), TwoJ::new(b));
        assert_eq!(tilde_omega(j1, j2, 0).unwrap(), omega0(j1, j2));
    }
    assert!(tilde_omega(TwoJ::new(3), TwoJ::new(2), 3).is_err());
}
