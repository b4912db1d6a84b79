use super::*;
use crate::disorder::{sample_fields, FieldDistribution, FieldRealization};
use crate::exact_thermo::pressure;
use crate::hamiltonian::assemble_linearized;
use crate::spin_algebra::{Axis, PolynomialSymbol};

const CW_LIMIT: f64 = 1.0196710679868692;

fn zero() -> LambdaEvaluator {
    LambdaEvaluator::auto(&FieldDistribution::PointMass { v: [0.0; 3] }).unwrap()
}

fn dich(eps: f64) -> FieldDistribution {
    FieldDistribution::AxisDichotomous { axis: Axis::Z, eps, p: 0.5 }
}

fn mz2() -> PolynomialSymbol {
    "z^2".parse().unwrap()
}

#[test]
fn curie_weiss_limit() {
    let opts = OptimizerOptions::default();
    let det = deterministic_pressure(&mz2(), &opts).unwrap();
    assert!((det.value - CW_LIMIT).abs() < 1e-10, "{}", det.value);
    assert!((det.radius - 0.9575040240772688).abs() < 1e-6);
    let var = variational_pressure(&mz2(), &zero(), &opts).unwrap();
    assert!((var.value - det.value).abs() < 1e-8, "{} {}", var.value, det.value);
    let mz = var.maximizer[2].abs();
    assert!((mz - (2.0 * mz).tanh()).abs() < 1e-8);
    assert!(var.value >= var.trace.grid_best);
}

#[test]
fn trivial_symbols() {
    let opts = OptimizerOptions::default();
    let zero_v = PolynomialSymbol::zero();
    assert!((deterministic_pressure(&zero_v, &opts).unwrap().value - 2f64.ln()).abs() < 1e-12);
    let neg: PolynomialSymbol = "-z^2".parse().unwrap();
    assert!((deterministic_pressure(&neg, &opts).unwrap().value - 2f64.ln()).abs() < 1e-12);
    for dist in [
        FieldDistribution::PointMass { v: [0.0; 3] },
        dich(0.7),
        FieldDistribution::PointMass { v: [0.3, -0.2, 0.5] },
    ] {
        let ev = LambdaEvaluator::auto(&dist).unwrap();
        let p = variational_pressure(&zero_v, &ev, &opts).unwrap();
        assert!((p.value - ev.value([0.0; 3])).abs() < 1e-8, "{dist:?}");
    }
}

#[test]
fn random_field_curie_weiss_stationarity() {
    let ev = LambdaEvaluator::auto(&dich(0.5)).unwrap();
    let res = variational_pressure(&mz2(), &ev, &OptimizerOptions::default()).unwrap();
    let m = res.maximizer[2];
    let rhs = 0.5 * ((2.0 * m + 0.5).tanh() + (2.0 * m - 0.5).tanh());
    assert!((m - rhs).abs() < 1e-6, "{m} {rhs}");
    assert!((m.abs() - 0.92912660591).abs() < 1e-7);
    assert!((res.value - 1.0314363091).abs() < 1e-9);
}

#[test]
fn deterministic_matches_variational_on_random_symbols() {
    let opts = OptimizerOptions::default();
    let symbols = [
        "x*y; 0.5*z^2",
        "x^4; -y^2; 0.3*z",
        "0.8*x^2*z^2; y^3",
        "-x^2; 2*x*y*z",
    ];
    for s in symbols {
        let p: PolynomialSymbol = s.parse().unwrap();
        let det = deterministic_pressure(&p, &opts).unwrap();
        let var = variational_pressure(&p, &zero(), &opts).unwrap();
        assert!((det.value - var.value).abs() < 1e-8, "{s}: {} {}", det.value, var.value);
    }
}

#[test]
fn annealed_dominates_quenched() {
    let opts = OptimizerOptions::default();
    for eps in [0.5, 1.0] {
        let d = dich(eps);
        let q = variational_pressure(&mz2(), &LambdaEvaluator::auto(&d).unwrap(), &opts).unwrap();
        let a = annealed_pressure(&mz2(), &d, &opts).unwrap();
        assert!(a.value - q.value >= -1e-9, "{} {}", a.value, q.value);
    }
    let a0 = annealed_pressure(&PolynomialSymbol::zero(), &FieldDistribution::PointMass { v: [0.0; 3] }, &opts).unwrap();
    assert!((a0.value - 2f64.ln()).abs() < 1e-10);
}

#[test]
fn quadratic_duality() {
    let opts = OptimizerOptions::default();
    let r = quadratic_inf_pressure([0.0, 0.0, 1.0], &zero(), &opts).unwrap();
    assert!((r.inf_form - 2f64.ln()).abs() < 1e-10);
    assert!((r.dual_form - 2f64.ln()).abs() < 1e-10);
    let ev = LambdaEvaluator::auto(&dich(1.0)).unwrap();
    let r = quadratic_inf_pressure([0.0, 0.0, 1.0], &ev, &opts).unwrap();
    assert!(r.gap() < 1e-6, "{r:?}");
    let r = quadratic_inf_pressure([0.0; 3], &ev, &opts).unwrap();
    assert!((r.inf_form - ev.value([0.0; 3])).abs() < 1e-10);
    assert!(r.gap() < 1e-8);
    assert!(quadratic_inf_pressure([0.0, -1.0, 0.0], &ev, &opts).is_err());
}

#[test]
fn linear_pressure_is_exact() {
    let alpha = [0.0, 0.0, 1.0];
    let free = FieldRealization::uniform(4, [0.0; 3]).unwrap();
    let v = linear_pressure_finite_n(alpha, [0.0, 0.0, 0.5], &free).unwrap();
    assert!((v - (0.25 + 2f64.cosh().ln() - 2f64.ln() + 2f64.ln() + (1f64.cosh() * 2.0).ln() - 2f64.cosh().ln())).abs() < 1e-12);
    assert!((v - 1.376928).abs() < 1e-6);
    assert!((linear_pressure_finite_n(alpha, [0.0; 3], &free).unwrap() - 2f64.ln()).abs() < 1e-15);
    let r = sample_fields(&FieldDistribution::Gaussian { mean: [0.1, 0.0, -0.2], sigma: 0.7 }, 5, 11).unwrap();
    for (alpha, m) in [([0.3, 0.5, 1.2], [0.2, -0.4, 0.1]), ([1.0, 0.0, 0.0], [0.9, 0.0, 0.0])] {
        let closed = linear_pressure_finite_n(alpha, m, &r).unwrap();
        let exact = pressure(&assemble_linearized(alpha, m, &r).unwrap().operator, 5).unwrap();
        assert!((closed - exact).abs() < 1e-10, "{closed} {exact}");
    }
}

#[test]
fn micro_gap_closed_form() {
    for alpha in [1.5, 2.0, 3.0, 10.0] {
        let g = micro_gap(&mz2(), alpha).unwrap();
        assert!((g.value - 1.0 / (alpha + 1.0)).abs() < 1e-12, "{alpha}: {}", g.value);
    }
    assert!(micro_gap(&mz2(), 1.0).is_err());
}

#[test]
fn term_gap_matches_grid_oracle() {
    for (beta, d, a) in [(1.0, 3u32, 0.7), (-0.6, 4, 1.3), (2.0, 1, 0.5)] {
        let n = 800;
        let mut best = f64::NEG_INFINITY;
        for i in 0..=n {
            let x0 = -1.0 + 2.0 * i as f64 / n as f64;
            for j in 0..=n {
                let x = -1.0 + 2.0 * j as f64 / n as f64;
                let t = x - x0;
                best = best.max(beta * f64::from(d) * x0.powi(d as i32 - 1) * t - a * t * t);
            }
        }
        let g = term_gap(beta, d, a);
        assert!(g >= best - 1e-12 && g - best < 1e-4, "{g} {best}");
    }
}

#[test]
fn micro_gap_decreases() {
    let p: PolynomialSymbol = "x*y; -0.5*z^3".parse().unwrap();
    let c = micro_gap(&p, 100.0).unwrap().curvature;
    let values: Vec<f64> = [1.1, 2.0, 5.0, 20.0, 1000.0]
        .iter()
        .map(|k| micro_gap(&p, c * k).unwrap().value)
        .collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{values:?}");
    assert!(values[4] < 1e-2);
}

#[test]
fn micro_operator_audit() {
    let cases = [
        ("z^2", 2.0, [0.0, 0.0, 0.6], 6),
        ("z^2", 1.2, [0.3, 0.1, -0.9], 5),
        ("x*y; -0.5*z^3", 0.0, [0.2, -0.5, 0.4], 4),
        ("x^2*z; y", 0.0, [0.7, 0.1, 0.1], 3),
    ];
    for (s, alpha, m, n) in cases {
        let p: PolynomialSymbol = s.parse().unwrap();
        let alpha = if alpha > 0.0 { alpha } else { micro_gap(&p, 1e3).unwrap().curvature * 1.5 };
        let g = micro_gap(&p, alpha).unwrap();
        let floor = micro_audit(&p, &g, m, n).unwrap();
        assert!(floor >= -1e-9, "{s}: {floor}");
    }
}
