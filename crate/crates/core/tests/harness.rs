use fqrank::algebra::{Field, FqMatrix};
use fqrank::chain::{planted_pmf, ChainKind};
use fqrank::distributions::Ensemble;
use fqrank::harness::suites::{gl_corner_bound, run_suite, stress_specs, suite_names};
use fqrank::harness::{brute_force_pmf, mc_corank, tv_report};
use fqrank::models::{EntryDist, ModelKind, ModelSpec};
use proptest::prelude::*;

fn field(q: u64) -> Field {
    Field::new(q).unwrap()
}

#[test]
fn enumeration_matches_closed_forms_over_prime_powers() {
    for q in [4u64, 5] {
        let f = field(q);
        for n in 1..=2 {
            let spec = ModelSpec::uniform(ModelKind::IidSquare, &f, n);
            assert!(brute_force_pmf(&spec).unwrap().exact_eq(&Ensemble::Square.finite_pmf(n, &f).unwrap()));
            let sym = ModelSpec::uniform(ModelKind::Symmetric, &f, n);
            assert!(brute_force_pmf(&sym).unwrap().exact_eq(&Ensemble::Symmetric.finite_pmf(n, &f).unwrap()));
        }
    }
    let f = field(5);
    for n in 1..=3 {
        let alt = ModelSpec::uniform(ModelKind::Alternating, &f, n);
        assert!(brute_force_pmf(&alt).unwrap().exact_eq(&Ensemble::Alternating.finite_pmf(n, &f).unwrap()));
    }
}

#[test]
fn gl_minus_identity_enumeration_small() {
    // GL_2(F_2) has 6 elements; A - I is singular exactly when 1 is an eigenvalue
    let f = field(2);
    let spec = ModelSpec::uniform(ModelKind::GlMinusIdentity, &f, 2);
    let pmf = brute_force_pmf(&spec).unwrap();
    let total: f64 = (0..=2).map(|k| pmf.f64_mass(k)).sum();
    assert!((total - 1.0).abs() < 1e-15);
    // the two 3-cycles have no fixed vector
    assert!((pmf.f64_mass(0) - 2.0 / 6.0).abs() < 1e-15);
    // only the identity gives corank 2
    assert!((pmf.f64_mass(2) - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn mc_concentrates_on_exact_law() {
    let f = field(3);
    let spec = ModelSpec::uniform(ModelKind::Symmetric, &f, 4);
    let exact = Ensemble::Symmetric.finite_pmf(4, &f).unwrap();
    let mc = mc_corank(&spec, 20_000, 3).unwrap();
    let report = tv_report("sym n=4 q=3", &mc, &exact, 3.0 * mc.noise_floor());
    assert!(report.pass, "{:?}", report);
}

#[test]
fn weighted_entries_mc_matches_enumeration() {
    let f = field(3);
    let spec = ModelSpec::uniform(ModelKind::IidSquare, &f, 3).with_entries(EntryDist::from_weights(vec![2, 1, 1]).unwrap());
    let exact = brute_force_pmf(&spec).unwrap();
    let mc = mc_corank(&spec, 20_000, 9).unwrap();
    assert!(tv_report("weighted", &mc, &exact, 3.0 * mc.noise_floor()).pass);
}

#[test]
fn planted_zero_corner_enumeration_matches_chain() {
    // a planted 1x1 zero corner followed by 2 uniform steps
    let f = field(3);
    let zero = FqMatrix::zeros(1, 1);
    let spec = ModelSpec::uniform(ModelKind::PlantedSymmetric, &f, 3).with_planted(zero);
    let chain = planted_pmf(ChainKind::Symmetric, &f, 1, 2).unwrap();
    assert!(brute_force_pmf(&spec).unwrap().exact_eq(&chain));
}

#[test]
fn stress_specs_shapes() {
    let shapes: Vec<(usize, usize)> = stress_specs().iter().map(|(s, _)| s.shape()).collect();
    assert_eq!(shapes, vec![(50, 50), (50, 55), (50, 50), (51, 51)]);
}

#[test]
fn gl_corner_bound_values() {
    let b = gl_corner_bound(5, 40, 20);
    let expected = 3.0 / 5f64.powi(20) + 2f64.powi(21) / 5f64.powi(20);
    assert!((b - expected).abs() <= 1e-12 * expected);
}

#[test]
fn suites_resolve_by_name_and_number() {
    assert_eq!(suite_names().len(), 12);
    assert_eq!(run_suite("8").unwrap().name, "hit-zero");
    assert!(run_suite("no-such-suite").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mc_is_deterministic_in_seed(seed in any::<u64>(), n in 1usize..6) {
        let f = field(5);
        let spec = ModelSpec::uniform(ModelKind::Alternating, &f, n);
        let a = mc_corank(&spec, 64, seed).unwrap();
        let b = mc_corank(&spec, 64, seed).unwrap();
        prop_assert_eq!(&a.counts, &b.counts);
        // alternating coranks share the parity of n
        for (k, &c) in a.counts.iter().enumerate() {
            prop_assert!(c == 0 || k % 2 == n % 2);
        }
    }
}

#[test]
fn mc_within_five_noise_floors_across_seeds() {
    let f = field(2);
    let spec = ModelSpec::uniform(ModelKind::Symmetric, &f, 3);
    let exact = Ensemble::Symmetric.finite_pmf(3, &f).unwrap();
    let passing = (0..20u64)
        .filter(|&seed| {
            let mc = mc_corank(&spec, 1_000_000, seed).unwrap();
            tv_report("sym n=3 q=2", &mc, &exact, 5.0 * mc.noise_floor()).pass
        })
        .count();
    assert_eq!(passing, 20);
}
