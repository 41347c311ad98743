use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use flatspec::bell::{bell_eval, bell_polynomial, faa_di_bruno};
use flatspec::flatfn::{analytic_flatness, eval, is_flat_default, jet, Flatness, FunctionExpr, Grid};
use flatspec::multipliers::{
    is_invertible_multiplier, is_multiplier, multiplier_spectrum_probe, Invertibility, ProbeVerdict,
};
use flatspec::operators::{apply_with, ApplyOptions, Family, OperatorSpec};
use flatspec::resolvents::{left_residual, residual};
use flatspec::seqspace::{ab_ba_check, eigenvalues, rng_from_seed, DenseMatrix};
use flatspec::spectra::{classify, inverse_consistent, spectrum_table, Verdict};
use flatspec::Complex64;

fn config(cases: u32) -> Config {
    Config {
        cases,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        ..Config::default()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + b.norm())
}

/// `A x^m e^{-b/x}`.
fn flat_input() -> impl Strategy<Value = FunctionExpr> {
    (-2i32..=2, 1.0f64..4.0, 0.5f64..2.0, 0.0f64..std::f64::consts::TAU).prop_map(|(m, b, r, t)| {
        FunctionExpr::scale(
            Complex64::from_polar(r, t),
            FunctionExpr::power(m as f64) * FunctionExpr::exp_power(c(-b, 0.0), -1.0),
        )
    })
}

fn lambda_in(r0: f64, r1: f64) -> impl Strategy<Value = Complex64> {
    (r0..r1, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn bell_edge_rows(j in 1usize..12, xs in prop::collection::vec(-2.0f64..2.0, 12)) {
        let v: Vec<Complex64> = xs.iter().map(|&x| c(x, 0.0)).collect();
        // B_{j,1} = x_j and B_{j,j} = x_1^j.
        prop_assert!(close(bell_eval(j, 1, &v[..j]).unwrap(), v[j - 1], 1e-12));
        prop_assert!(close(bell_eval(j, j, &v[..1]).unwrap(), v[0].powu(j as u32), 1e-12));
    }

    #[test]
    fn bell_scaling(j in 1usize..10, i in 1usize..10, a in 0.5f64..1.5, b in 0.5f64..1.5) {
        prop_assume!(i <= j);
        // B_{j,i}(a b x_1, a b² x_2, …) = a^i b^j B_{j,i}(x_1, x_2, …).
        let x: Vec<Complex64> = (0..=j - i).map(|k| c(1.0 + 0.1 * k as f64, 0.2)).collect();
        let y: Vec<Complex64> = x.iter().enumerate().map(|(k, &z)| z * a * b.powi(k as i32 + 1)).collect();
        let lhs = bell_eval(j, i, &y).unwrap();
        let rhs = bell_eval(j, i, &x).unwrap() * a.powi(i as i32) * b.powi(j as i32);
        prop_assert!(close(lhs, rhs, 1e-11));
    }

    #[test]
    fn faa_di_bruno_matches_exp_of_polynomial(x in 0.1f64..1.0, a in -1.0f64..1.0, b in -1.0f64..1.0) {
        // exp(g) with g = a x + b x², every outer derivative equal to exp(g).
        let g = FunctionExpr::scale(c(a, 0.0), FunctionExpr::power(1.0))
            + FunctionExpr::scale(c(b, 0.0), FunctionExpr::power(2.0));
        let gj = jet(&g, x, 6).unwrap();
        let eg = gj[0].exp();
        for n in 1..=6 {
            let v = faa_di_bruno(n, &vec![eg; n], &gj[1..=n]).unwrap();
            // Reference from the recurrence (e^g)^{(n)} = Σ C(n-1, k) g^{(k+1)} (e^g)^{(n-1-k)}.
            let mut d = vec![eg];
            for m in 1..=n {
                let mut s = c(0.0, 0.0);
                let mut binom = 1.0;
                for k in 0..m {
                    s += gj[k + 1] * d[m - 1 - k] * binom;
                    binom = binom * (m - 1 - k) as f64 / (k + 1) as f64;
                }
                d.push(s);
            }
            prop_assert!(close(v, d[n], 1e-11), "n={} {} vs {}", n, v, d[n]);
        }
    }

    #[test]
    fn jets_are_linear_and_leibniz(f in flat_input(), g in flat_input(), x in 0.2f64..1.0) {
        let n = 4;
        let (jf, jg) = (jet(&f, x, n).unwrap(), jet(&g, x, n).unwrap());
        let js = jet(&(f.clone() + g.clone()), x, n).unwrap();
        let jp = jet(&(f * g), x, n).unwrap();
        for k in 0..=n {
            prop_assert!(close(js[k], jf[k] + jg[k], 1e-11));
            let mut l = c(0.0, 0.0);
            let mut binom = 1.0;
            for i in 0..=k {
                l += jf[i] * jg[k - i] * binom;
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
            prop_assert!(close(jp[k], l, 1e-9));
        }
    }

    #[test]
    fn flat_inputs_are_flat(f in flat_input()) {
        prop_assert_eq!(analytic_flatness(&f), Flatness::Flat);
    }

    #[test]
    fn powers_are_invertible_multipliers(p in -4.0f64..4.0) {
        let w = FunctionExpr::power(p);
        prop_assert!(is_multiplier(&w).is_yes());
        let inv = is_invertible_multiplier(&w).unwrap();
        prop_assert!(matches!(inv, Invertibility::Yes { .. }), "{:?}", inv);
    }

    #[test]
    fn volterra_inverts_derivative(f in flat_input(), x in 0.05f64..1.0) {
        let opts = ApplyOptions::quadrature_only();
        let vd = apply_with(&OperatorSpec::V, &f.deriv1(), opts).unwrap();
        prop_assert!(close(eval(&vd, x).unwrap(), eval(&f, x).unwrap(), 1e-9));
    }

    #[test]
    fn inverse_map_consistency(p in -4.0f64..4.0, kind in 0usize..5, l in lambda_in(0.05, 5.0)) {
        let fam = match kind {
            0 => Family::mv(p),
            1 => Family::vm(p),
            2 => Family::md(p),
            3 => Family::dm(p),
            _ => Family::cesaro(),
        };
        prop_assert_eq!(inverse_consistent(&fam, l), Ok(true));
    }

    #[test]
    fn verdicts_follow_tables(p in -4.0f64..4.0, kind in 0usize..4, l in lambda_in(0.05, 5.0)) {
        let fam = [Family::mv(p), Family::vm(p), Family::md(p), Family::dm(p)][kind];
        let t = spectrum_table(&fam);
        prop_assert!(!t.sigma.contains(l) || t.sigma_star.contains(l));
        match classify(fam, l).unwrap().verdict {
            Verdict::PointSpectrum(_) => prop_assert!(t.sigma_p.contains(l)),
            Verdict::WaelbroeckOnly => prop_assert!(!t.sigma.contains(l) && t.sigma_star.contains(l)),
            Verdict::ResolventSet(_) => prop_assert!(!t.sigma_star.contains(l)),
        }
    }

    #[test]
    fn eigenvalues_sum_to_trace(n in 1usize..12, seed in any::<u64>()) {
        let a = DenseMatrix::random(n, &mut rng_from_seed(seed));
        let s = eigenvalues(&a).unwrap();
        let tr: Complex64 = a.diagonal().into_iter().sum();
        let sum: Complex64 = s.values.iter().sum();
        prop_assert!(close(sum, tr, 1e-10));
    }

    #[test]
    fn ab_ba_spectra_agree(n in 1usize..9, seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = DenseMatrix::random(n, &mut rng);
        let b = DenseMatrix::random(n, &mut rng);
        let r = ab_ba_check(&a, &b, true, &mut rng).unwrap();
        prop_assert!(r.pass(), "{:?}", r);
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn cesaro_resolvent_inverts_both_sides(g in flat_input(), l in lambda_in(0.2, 3.0)) {
        let grid = Grid::residual_grid();
        prop_assert!(residual(Family::cesaro(), l, &g, &grid).unwrap() <= 1e-7);
        prop_assert!(left_residual(Family::cesaro(), l, &g, &grid).unwrap() <= 1e-7);
    }

    #[test]
    fn md_resolvent_inverts(g in flat_input(), p in -1.0f64..1.0, l in lambda_in(0.0, 3.0)) {
        let grid = Grid::residual_grid();
        prop_assert!(residual(Family::md(p), l, &g, &grid).unwrap() <= 1e-7);
    }

    #[test]
    fn off_range_lambda_is_resolvent_for_powers(p in 0.5f64..3.0, re in -2.0f64..2.0, im in 0.1f64..2.0) {
        let probe = multiplier_spectrum_probe(&FunctionExpr::power(p), c(re, im)).unwrap();
        prop_assert!(matches!(probe, ProbeVerdict::InResolvent(_)), "{:?}", probe);
    }

    #[test]
    fn exp_power_flatness(b in 0.5f64..3.0, q in -2.0f64..-0.5) {
        let f = FunctionExpr::exp_power(c(-b, 0.0), q);
        prop_assert!(is_flat_default(&f).unwrap().flat);
        let g = FunctionExpr::exp_power(c(b, 0.0), q);
        prop_assert_eq!(analytic_flatness(&g), Flatness::NotFlat);
    }
}

#[test]
fn bell_rows_have_expected_term_counts() {
    // Number of partitions of j into exactly i parts, p(6, i).
    let counts: Vec<usize> = (1..=6).map(|i| bell_polynomial(6, i).unwrap().terms().len()).collect();
    assert_eq!(counts, vec![1, 3, 3, 2, 1, 1]);
}
