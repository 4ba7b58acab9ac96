use lpforge::{
    construct_instance, decode, derive_stream, encode_exact, generate, solve, verify_optimality, AlphaRule, DenseMatrix,
    DistributionSpec, GeneratorConfig, PivotRule, SolveStatus,
};
use lpforge::solver::default_max_iter;

#[test]
fn rows_and_columns_match_dot_product_oracle() {
    let rule = AlphaRule {
        dist_x1: DistributionSpec::Uniform { lo: 1.0, hi: 1000.0 },
        beta_spec: DistributionSpec::Beta { a: 0.8 },
        lambda: 0.7,
    };
    for seed in 0..20 {
        let mut rng = derive_stream(seed, 0);
        let coding = encode_exact(7, 11, &rule, &mut rng).unwrap();
        let a = DenseMatrix::from_row_major(7, 11, (0..77).map(|_| rng.standard_normal()).collect()).unwrap();
        let (inst, p) = construct_instance(&coding, &a).unwrap();
        assert_eq!(p, decode(&coding));
        for j in 0..7 {
            let mut ax = 0.0;
            for k in 0..11 {
                ax += a.get(j, k) * p.x[k];
            }
            assert_eq!(inst.b[j], ax + p.s[j], "row {j}");
        }
        for k in 0..11 {
            let mut aty = 0.0;
            for j in 0..7 {
                aty += a.get(j, k) * p.y[j];
            }
            assert_eq!(inst.c[k], aty - p.r[k], "column {k}");
        }
    }
}

#[test]
fn default_batch_is_certified_and_solver_agrees() {
    let cfg = GeneratorConfig::default();
    for i in 0..200 {
        let g = generate(&cfg, 31, i).unwrap();
        let report = verify_optimality(&g.instance, &g.point, 1e-8).unwrap();
        assert!(report.passed, "instance {i}: {report:?}");
        if i < 20 {
            let res = solve(&g.instance, PivotRule::Dantzig, default_max_iter(&g.instance));
            assert_eq!(res.status, SolveStatus::Optimal, "instance {i}");
            let preset: f64 = g.instance.c.iter().zip(&g.point.x).map(|(c, x)| c * x).sum();
            assert!(
                (res.objective - preset).abs() <= 1e-6 * (1.0 + preset.abs()),
                "instance {i}: {} vs {preset}",
                res.objective
            );
        }
    }
}

#[test]
fn fresh_residuals_are_tiny_and_gap_closes() {
    let g = generate(&GeneratorConfig::default(), 2, 0).unwrap();
    let r = verify_optimality(&g.instance, &g.point, 1e-8).unwrap();
    let scale = g.instance.scale();
    assert!(r.primal_residual <= 1e-12 * scale);
    assert!(r.dual_residual <= 1e-12 * scale);
    assert_eq!(r.complementarity, 0.0);
    let ctx: f64 = g.instance.c.iter().zip(&g.point.x).map(|(c, x)| c * x).sum();
    let bty: f64 = g.instance.b.iter().zip(&g.point.y).map(|(b, y)| b * y).sum();
    assert!((ctx - bty).abs() <= 1e-12 * scale * scale.max(ctx.abs()));
}

#[test]
fn perturbing_a_tight_row_opens_a_gap_of_y() {
    let g = generate(&GeneratorConfig::default(), 3, 0).unwrap();
    let row = (0..g.instance.m())
        .find(|&j| g.point.s[j] == 0.0 && g.point.y[j] > 0.0)
        .unwrap();
    let mut inst = g.instance.clone();
    inst.b[row] += 1.0;
    let r = verify_optimality(&inst, &g.point, 1e-8).unwrap();
    assert!(!r.passed);
    let y = g.point.y[row];
    assert!((r.duality_gap - y).abs() <= 1e-6 * y.max(1.0), "{} vs {y}", r.duality_gap);
}
