//! Randomized invariants that complement the acceptance run: structural
//! identities that must hold on every input, not just on the acceptance
//! grid.

#![allow(clippy::needless_range_loop)]

use proptest::prelude::*;

use gauss_sep_core::criteria::{
    optimal_squeezing, ppt_full, quadratic_form_margin, weaker_condition_margin, Verdict,
};
use gauss_sep_core::gaussian::{CovarianceMatrix, LocalSymplectic, Sign, SqueezeParams};
use gauss_sep_core::oracle::{
    brute_force_c1max, det_vs_eig_counterexample, probe_minimize_quadratic,
    random_physical_covariance, random_physical_standard_form, OracleConfig,
};
use gauss_sep_core::smallmat::TOL_PSD;

#[test]
fn partial_transpose_is_involution_in_bulk() {
    for seed in 0..2_000u64 {
        let v = random_physical_covariance(seed);
        let back = v.partial_transpose().partial_transpose();
        assert_eq!(back.entries(), v.entries(), "seed {seed}");
    }
}

#[test]
fn random_states_stay_physical_in_bulk() {
    for seed in 0..100_000u64 {
        let v = random_physical_covariance(seed);
        let margin = v.is_physical(TOL_PSD).unwrap();
        assert!(
            margin.is_psd,
            "seed {seed}: min eigenvalue {:.3e}",
            margin.min_eigenvalue
        );
    }
}

#[test]
fn probe_minimizer_tracks_eigenvalue_on_entangled_states() {
    // The randomized probe search must reproduce the most negative
    // eigenvalue of the partial-transpose uncertainty form within 10% on
    // decisively entangled states (eigenvalues this small in magnitude are
    // below what a randomized search resolves reliably, hence the floor).
    let cfg = OracleConfig::default();
    let mut checked = 0usize;
    let mut seed = 0u64;
    while checked < 100 {
        let v = random_physical_covariance(seed);
        seed += 1;
        let ppt = ppt_full(&v, TOL_PSD).unwrap();
        if ppt.min_eigenvalue > -0.01 {
            continue;
        }
        checked += 1;
        let plus = probe_minimize_quadratic(&v, Sign::Plus, &cfg).unwrap();
        let minus = probe_minimize_quadratic(&v, Sign::Minus, &cfg).unwrap();
        let found = plus.min_margin.min(minus.min_margin);
        assert!(
            (found - ppt.min_eigenvalue).abs() <= 0.1 * ppt.min_eigenvalue.abs(),
            "seed {}: probe {found:.6e} vs eigenvalue {:.6e}",
            seed - 1,
            ppt.min_eigenvalue
        );
    }
}

#[test]
fn counterexample_survives_tight_tolerance() {
    let ce = det_vs_eig_counterexample(&OracleConfig::default()).unwrap();
    let recheck = ppt_full(&ce.v, 1e-12).unwrap();
    assert!(ce.det_value >= 0.0);
    assert!(recheck.min_eigenvalue <= -1e-6);
    assert!(!recheck.is_psd);
}

fn arb_local_symplectic() -> impl Strategy<Value = LocalSymplectic> {
    // Rotation, bounded squeeze, rotation on each mode; bounded so the
    // conjugated matrices stay well conditioned.
    (
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
        -0.7..0.7f64,
        -0.7..0.7f64,
        0.0..std::f64::consts::TAU,
        0.0..std::f64::consts::TAU,
    )
        .prop_map(|(a1, a2, u1, u2, b1, b2)| {
            let squeeze = SqueezeParams::new((2.0 * u1).exp(), (2.0 * u2).exp())
                .unwrap()
                .to_symplectic();
            LocalSymplectic::rotation(a1, a2)
                .then(&squeeze)
                .then(&LocalSymplectic::rotation(b1, b2))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_is_invariant_under_local_symplectics(
        seed in 0u64..20_000,
        s in arb_local_symplectic(),
    ) {
        let v = random_physical_covariance(seed);
        let report = gauss_sep_core::criteria::separability_verdict(&v, TOL_PSD).unwrap();
        // Boundary calls may legitimately flip under conjugation; skip them.
        prop_assume!(report.verdict != Verdict::Boundary);
        prop_assume!(report.ppt_full.min_eigenvalue.abs() > 1e-3);

        let conjugated = v.apply_symplectic(&s);
        let report2 = gauss_sep_core::criteria::separability_verdict(&conjugated, TOL_PSD).unwrap();
        prop_assert_eq!(report.verdict, report2.verdict);
    }

    #[test]
    fn reduction_outputs_are_canonical(seed in 0u64..100_000) {
        let v = random_physical_covariance(seed);
        let (sf, transform) = v.to_standard_form(TOL_PSD).unwrap();
        prop_assert!(sf.c1() >= sf.c2().abs());
        prop_assert!(sf.a() >= 0.5 - 1e-9);
        prop_assert!(sf.b() >= 0.5 - 1e-9);
        if let Some(t) = sf.t() {
            prop_assert!((0.0..=1.0).contains(&t));
        }
        // The returned transform actually produces the reported form.
        let mapped = v.apply_symplectic(&transform);
        let pattern = sf.to_matrix();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!(
                    (mapped.at(i, j) - pattern.at(i, j)).abs()
                        <= 1e-8 * (1.0 + pattern.mat().max_abs())
                );
            }
        }
    }

    #[test]
    fn standard_form_samples_respect_the_verdict_boundary(seed in 0u64..100_000) {
        // The sampled form's verdict must be consistent whichever
        // representation computes it.
        let sf = random_physical_standard_form(seed);
        let direct = ppt_full(&sf.to_matrix(), TOL_PSD).unwrap();
        let report = gauss_sep_core::criteria::separability_verdict(&sf.to_matrix(), TOL_PSD).unwrap();
        match report.verdict {
            Verdict::Separable => prop_assert!(direct.is_psd),
            Verdict::Entangled => prop_assert!(!direct.is_psd),
            Verdict::Boundary => {}
            Verdict::Unphysical => prop_assert!(false, "sampler produced an unphysical state"),
        }
    }

    #[test]
    fn p_condition_implies_physicality(
        diag_shift in 0.0..1.5f64,
        offdiag in proptest::array::uniform6(-0.4..0.4f64),
    ) {
        // V = symmetric noise + (0.6 + shift) I. Not always P-representable;
        // whenever it is, it must be physical.
        let mut e = [[0.0; 4]; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if k < 6 {
                    e[i][j] = offdiag[k];
                    e[j][i] = offdiag[k];
                    k += 1;
                }
            }
        }
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 0.6 + diag_shift;
        }
        let v = CovarianceMatrix::from_entries(e).unwrap();
        let p_ok = v.p_condition(TOL_PSD).unwrap().is_psd;
        prop_assume!(p_ok);
        prop_assert!(v.is_physical(TOL_PSD).unwrap().is_psd);
    }

    #[test]
    fn weaker_condition_is_a_probe_restriction(
        seed in 0u64..20_000,
        d in proptest::array::uniform2(-2.0..2.0f64),
        f in proptest::array::uniform2(-2.0..2.0f64),
        minus in proptest::bool::ANY,
    ) {
        let sign = if minus { Sign::Minus } else { Sign::Plus };
        let v = random_physical_covariance(seed);
        let got = weaker_condition_margin(&v, &d, &f, sign);
        let g = [-d[1], d[0]];
        let h = [sign.factor() * -f[1], sign.factor() * f[0]];
        let want = quadratic_form_margin(&v, &d, &f, &g, &h, Sign::Plus);
        prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn brute_force_argmax_matches_optimal_squeezing(
        a in 0.6..2.5f64,
        b in 0.6..2.5f64,
        t in 0.15..1.0f64,
    ) {
        // Away from the degenerate edges the maximizer is unique and the
        // search must land on the closed-form squeezing parameters.
        let cfg = OracleConfig::default();
        let found = brute_force_c1max(a, b, t, &cfg).unwrap();
        let opt = optimal_squeezing(a, b, t).unwrap();
        prop_assert!((found.r1 - opt.r1).abs() <= 1e-4 * opt.r1);
        prop_assert!((found.r2 - opt.r2).abs() <= 1e-4 * opt.r2);
    }
}
