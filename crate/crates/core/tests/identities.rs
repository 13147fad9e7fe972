//! Randomized checks of the exact identities and of the two routes to the
//! limit moments.

use drg_core::families::{catalog, member};
use drg_core::fock::{limit_coefficients, limit_moment, mixed_moment_finite_exact};
use drg_core::gibbs::{central_moment_exact, gibbs_distribution, gibbs_masses, gibbs_point, in_pi, measure_moment};
use drg_core::limits::{family_closed_form, regime_measure};
use drg_core::params::{intersection_array, spectral_table, v_by_recurrence};
use drg_core::qseries::{pow, rat};
use drg_core::{ClassicalParams, EpsilonWord, Preset, Rational};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn rational(num: i64, den: i64) -> impl Strategy<Value = Rational> {
    (-num..=num, 1..=den).prop_map(|(p, q)| rat(p, q))
}

fn params(max_d: u32) -> impl Strategy<Value = ClassicalParams> {
    (1..=max_d, prop::sample::select(vec![2i64, 3, -2, -3]), rational(6, 3), rational(60, 3)).prop_filter_map(
        "spectral table undefined",
        |(d, b, alpha, beta)| {
            let cp = ClassicalParams::new(d, b, alpha, beta).ok()?;
            spectral_table(&cp).ok()?;
            Some(cp)
        },
    )
}

fn preset() -> impl Strategy<Value = Preset> {
    prop_oneof![
        (2i64..=4, prop::sample::select(vec![0.5, 1.0, 1.5])).prop_map(|(q, delta)| Preset::Grassmann { q, delta }),
        (2i64..=4, prop::sample::select(vec![0.0, 0.5, 1.0])).prop_map(|(q, delta)| Preset::Bilinear { q, delta }),
        (2i64..=3, 0u8..=1).prop_map(|(r, epsilon)| Preset::HalfDualPolar { r, epsilon }),
        (2i64..=3, any::<bool>()).prop_map(|(r, upper)| Preset::SecondDualPolar { r, upper }),
        (2i64..=3, any::<bool>()).prop_map(|(r, upper)| Preset::HermitianForms { r, upper }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn spectral_sums(cp in params(7)) {
        let st = spectral_table(&cp).unwrap();
        let ia = intersection_array(&cp).unwrap();
        let sum_m: Rational = st.mult.iter().sum();
        let sum_k: Rational = ia.k_seq.iter().sum();
        prop_assert_eq!(&sum_m, &st.vertex_count);
        prop_assert_eq!(&sum_k, &st.vertex_count);
        let d = st.diameter();
        for i in 0..=d {
            // tr(A_i) = |X| for i = 0 and 0 otherwise
            let tr: Rational = (0..=d).map(|j| &st.mult[j] * &st.v_matrix[i][j]).sum();
            prop_assert_eq!(tr, if i == 0 { st.vertex_count.clone() } else { Rational::zero() });
        }
        for j in 0..=d {
            let row: Rational = (0..=d).map(|i| st.v_matrix[i][j].clone()).sum();
            prop_assert_eq!(row, if j == 0 { st.vertex_count.clone() } else { Rational::zero() });
        }
        prop_assert_eq!(v_by_recurrence(&ia, &st.theta).unwrap(), st.v_matrix);
    }

    #[test]
    fn gibbs_normalization(cp in params(7), t in rational(9, 9)) {
        let st = spectral_table(&cp).unwrap();
        let gp = gibbs_point(&cp, &st, &t).unwrap();
        prop_assume!(gp.variance.is_positive());
        let total: Rational = gibbs_masses(&st, &gp).iter().sum();
        prop_assert_eq!(total, Rational::from_integer(1.into()));
        prop_assert!(central_moment_exact(&st, &gp, 1).is_zero());
        prop_assert_eq!(central_moment_exact(&st, &gp, 2), gp.variance.clone());
        let mu = gibbs_distribution(&cp, &st, &t).unwrap();
        // masses are m_j K_t(theta_j)/|X|; only tuples with m_j >= 0 come from graphs
        if in_pi(&gp) && st.mult.iter().all(|m| !m.is_negative()) {
            prop_assert!(mu.exact_masses.unwrap().iter().all(|m| !m.is_negative()));
        }
    }

    #[test]
    fn mixed_moments_sum_to_central_moments(cp in params(5), t in rational(5, 7), m in 1usize..=4) {
        let st = spectral_table(&cp).unwrap();
        let gp = gibbs_point(&cp, &st, &t).unwrap();
        prop_assume!(gp.variance.is_positive());
        let total: Rational = EpsilonWord::all(m).iter().map(|w| mixed_moment_finite_exact(&cp, &t, w).unwrap()).sum();
        prop_assert_eq!(total, central_moment_exact(&st, &gp, m as u32));
    }

    #[test]
    fn limit_moments_match_measure(p in preset(), gamma in 0.0f64..1.5) {
        let Ok(regime) = p.regime(gamma) else { return Ok(()) };
        let mu = regime_measure(&regime, -40, 40, 1e-16).unwrap();
        prop_assert!((mu.total_mass() - 1.0).abs() < 1e-8);
        let fc = limit_coefficients(&regime, 8).unwrap();
        for m in 0..=6 {
            let (a, b) = (limit_moment(&fc, m).unwrap(), measure_moment(&mu, m as u32));
            prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{:?} m={} fock {} measure {}", p, m, a, b);
        }
    }

    #[test]
    fn closed_form_matches_generic(p in preset(), gamma in 0.0f64..1.5) {
        let Ok(regime) = p.regime(gamma) else { return Ok(()) };
        let closed = family_closed_form(p, gamma, 10, 1e-16).unwrap();
        let generic = regime_measure(&regime, 0, 10, 1e-16).unwrap();
        for j in 0..=10 {
            prop_assert!((closed.atoms[j] - generic.atoms[j]).abs() <= 1e-10 * closed.atoms[j].abs().max(1.0));
            prop_assert!((closed.masses[j] - generic.masses[j]).abs() <= 1e-10);
        }
    }

    #[test]
    fn negative_powers_in_pi(x in 2i64..=5, pick in 0usize..64, d in 1u32..=9, i in 0i64..=8) {
        let fams = catalog(x);
        let Ok(m) = member(fams[pick % fams.len()], d) else { return Ok(()) };
        let st = spectral_table(&m.cp).unwrap();
        let t = pow(&Rational::from_integer(m.cp.b().into()), -i);
        prop_assert!(in_pi(&gibbs_point(&m.cp, &st, &t).unwrap()));
    }
}
