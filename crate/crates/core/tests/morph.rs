use lpforge::{generate, morph, replay, GeneratorConfig, GeneratorState, LpInstance, SizeSpec};
use proptest::prelude::*;

fn state(m: usize, n: usize, seed: u64) -> GeneratorState {
    let cfg = GeneratorConfig {
        size: SizeSpec::Exact { m, n },
        ..GeneratorConfig::default()
    };
    generate(&cfg, seed, 0).unwrap().state
}

fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(1.0f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

fn assert_same_instance(got: &LpInstance, want: &LpInstance) {
    assert!(max_rel_diff(got.a.as_slice(), want.a.as_slice()) <= 1e-12);
    assert!(max_rel_diff(&got.b, &want.b) <= 1e-12);
    assert!(max_rel_diff(&got.c, &want.c) <= 1e-12);
}

#[test]
fn square_morph_reaches_target() {
    let (src, dst) = (state(10, 10, 1), state(10, 10, 2));
    let steps = morph(&src, &dst).unwrap();
    assert!(steps.len() <= 10 + 2);
    let out = replay(&src, &steps).unwrap();
    assert_eq!(out.coding(), dst.coding());
    assert_same_instance(&out.instance().unwrap().0, &dst.instance().unwrap().0);
}

#[test]
fn rectangular_morph_reaches_target_coding() {
    for (m, n) in [(3, 7), (7, 3)] {
        let (src, dst) = (state(m, n, 3), state(m, n, 4));
        let steps = morph(&src, &dst).unwrap();
        assert_eq!(steps.len(), m.max(n) + 2);
        let out = replay(&src, &steps).unwrap();
        assert_eq!(out.coding(), dst.coding());
        assert_eq!(out.factors().sigma, dst.factors().sigma);
        assert_same_instance(&out.instance().unwrap().0, &dst.instance().unwrap().0);
    }
}

#[test]
fn identity_morph_leaves_instance_unchanged() {
    let s = state(6, 9, 5);
    let out = replay(&s, &morph(&s, &s).unwrap()).unwrap();
    assert_eq!(out.coding(), s.coding());
    assert_eq!(out.instance().unwrap().0, s.instance().unwrap().0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn any_pair_morphs(m in 1usize..12, n in 1usize..12, a in any::<u64>(), b in any::<u64>()) {
        let (src, dst) = (state(m, n, a), state(m, n, b));
        let steps = morph(&src, &dst).unwrap();
        prop_assert_eq!(steps.len(), m.max(n) + 2);
        let out = replay(&src, &steps).unwrap();
        prop_assert_eq!(out.coding(), dst.coding());
        let (got, want) = (out.instance().unwrap().0, dst.instance().unwrap().0);
        prop_assert!(max_rel_diff(got.a.as_slice(), want.a.as_slice()) <= 1e-12);
        prop_assert!(max_rel_diff(&got.b, &want.b) <= 1e-12);
        prop_assert!(max_rel_diff(&got.c, &want.c) <= 1e-12);
    }
}
