use proptest::prelude::*;
use radial_kernels::analysis::{check_positive_definite, membership_operator, spectral_stats, Verdict};
use radial_kernels::operators::build_product_b;
use radial_kernels::{Component, ExtendedDegree, RadialKernelSpec, WeightedComponent};

const M: usize = 24;
const TOL: f64 = 1e-10;

fn deg(q: u64) -> ExtendedDegree {
    ExtendedDegree::finite(q).unwrap()
}

fn mixture(q: ExtendedDegree, parts: &[(f64, f64)]) -> RadialKernelSpec {
    RadialKernelSpec::mixture(
        parts
            .iter()
            .map(|&(s, weight)| WeightedComponent { component: Component::TreeEigen { q, s }, weight })
            .collect(),
    )
    .unwrap()
}

fn atoms() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-0.9f64..0.9, 0.1f64..2.0), 1..4)
}

/// Tabulated signed combinations of spherical functions; some are members, most are not.
fn signed_table(q: ExtendedDegree, parts: &[(f64, f64)]) -> RadialKernelSpec {
    let values = (0..=4 * M)
        .map(|n| parts.iter().map(|&(s, w)| w * radial_kernels::eval_p(q, n, s)).sum())
        .collect();
    RadialKernelSpec::table(values, 0.0, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn positivity_matches_trace_equality(
        q in 2u64..5,
        parts in prop::collection::vec((-0.9f64..0.9, -1.0f64..2.0), 1..4),
    ) {
        let q = deg(q);
        let phi = signed_table(q, &parts);
        let op = membership_operator(&phi, &[q], M).unwrap();
        let stats = spectral_stats(&op).unwrap();
        let scale = stats.spectral_norm.max(1.0);
        let report = check_positive_definite(&phi, &[q], M, TOL).unwrap();
        let gap = stats.trace_norm - stats.trace;
        if stats.min_eigenvalue < -TOL * scale {
            prop_assert_eq!(report.verdict, Verdict::NonMember);
            prop_assert!(gap >= 2.0 * TOL * scale);
        } else {
            prop_assert!(gap <= 2.0 * M as f64 * TOL * scale);
        }
    }

    #[test]
    fn members_form_a_cone(q in 2u64..5, a in atoms(), b in atoms(), x in 0.1f64..3.0, y in 0.1f64..3.0) {
        let q = deg(q);
        prop_assert_eq!(check_positive_definite(&mixture(q, &a), &[q], M, TOL).unwrap().verdict, Verdict::Member);
        prop_assert_eq!(check_positive_definite(&mixture(q, &b), &[q], M, TOL).unwrap().verdict, Verdict::Member);
        let combined: Vec<(f64, f64)> =
            a.iter().map(|&(s, w)| (s, x * w)).chain(b.iter().map(|&(s, w)| (s, y * w))).collect();
        prop_assert_eq!(check_positive_definite(&mixture(q, &combined), &[q], M, TOL).unwrap().verdict, Verdict::Member);
    }

    #[test]
    fn membership_restricts_to_smaller_degree(q in 3u64..6, a in atoms()) {
        let phi = mixture(deg(q), &a);
        prop_assert_eq!(check_positive_definite(&phi, &[deg(q)], M, TOL).unwrap().verdict, Verdict::Member);
        prop_assert_eq!(check_positive_definite(&phi, &[deg(q - 1)], M, TOL).unwrap().verdict, Verdict::Member);
    }

    #[test]
    fn product_operator_is_symmetric(q1 in 2u64..5, q2 in 2u64..5, s in -0.9f64..0.9) {
        let phi = RadialKernelSpec::geometric(s).unwrap();
        let op = build_product_b(&phi, &[deg(q1), deg(q2)], 6).unwrap();
        let scale = op.entries.abs().max().max(1.0);
        prop_assert!((&op.entries - op.entries.transpose()).abs().max() <= 1e-12 * scale);
    }
}
