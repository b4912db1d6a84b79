use proptest::prelude::*;
use rayon::prelude::*;

use qmf_core::coherent::{
    berezin_lieb_bounds, lower_symbol, quadrature_for_spin, upper_symbol_operator, CoherentSymbol,
    SphereQuadrature, DEFAULT_EXTRA_DEGREE,
};
use qmf_core::disorder::{mean_field_vector, sample_fields, FieldDistribution, FieldRealization};
use qmf_core::exact_thermo::{cosh_lemma_holds, gibbs_trial_bound, Route};
use qmf_core::experiments::{run_convergence, RunConfig};
use qmf_core::hamiltonian::{
    assemble_field_term, assemble_full, assemble_linearized, field_site_term, ModelSpec,
};
use qmf_core::linalg::{
    commutator, hermitian_eigen, hermitian_eigenvalues, max_abs, norm3, spectral_norm, CMat, Vec3, C64,
};
use qmf_core::spin_algebra::{
    admissible_spins, block_degeneracy, build_site_spin, build_total_spin, spin_irrep, weyl_ordered_operator,
    Axis, ClassicalSymbol, PolynomialSymbol, TwoJ,
};
use qmf_core::varform::{
    lambda_gradient, lambda_value, legendre_transform, ConvexPotential, LambdaEvaluator, LambdaMethod,
};

fn axis(k: usize) -> Axis {
    Axis::ALL[k]
}

fn magnetization(n: usize) -> [CMat; 3] {
    let s = build_total_spin(n).unwrap();
    let c = C64::new(2.0 / n as f64, 0.0);
    [0, 1, 2].map(|k| s.component(axis(k)).to_dense() * c)
}

fn powers_upto(d: u32) -> impl Strategy<Value = [u32; 3]> {
    (0..=d, 0..=d, 0..=d).prop_map(move |(a, b, c)| {
        let mut p = [a, b, c];
        while p.iter().sum::<u32>() > d {
            let k = (0..3).max_by_key(|&k| p[k]).unwrap();
            p[k] -= 1;
        }
        p
    })
}

fn polynomial(d: u32) -> impl Strategy<Value = PolynomialSymbol> {
    prop::collection::vec((-1.0..1.0f64, powers_upto(d)), 1..6)
        .prop_map(|terms| PolynomialSymbol::new(terms).unwrap())
}

fn unit_vector() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, 0.0..std::f64::consts::TAU).prop_map(|(c, phi)| {
        let s = (1.0 - c * c).sqrt();
        [s * phi.cos(), s * phi.sin(), c]
    })
}

fn ball_point() -> impl Strategy<Value = Vec3> {
    (unit_vector(), 0.0..0.95f64).prop_map(|(u, r)| u.map(|x| r * x))
}

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn min_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigenvalues(m).into_iter().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(cases(50))]

    #[test]
    fn weyl_operator_is_hermitian(p in polynomial(4), n in 1usize..=8) {
        let h = weyl_ordered_operator(&p, n).unwrap();
        let m = h.matrix();
        prop_assert!(max_abs(&(m - m.adjoint())) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(cases(24))]

    #[test]
    fn directional_form_reproduces_weyl(p in polynomial(4), n in 1usize..=6) {
        let s = build_total_spin(n).unwrap();
        let nf = n as f64;
        let dim = 1usize << n;
        let mut sum = CMat::zeros(dim, dim);
        for t in p.directional_decomposition() {
            let a = s.linear_form(t.direction).to_dense() * C64::new(2.0 / nf, 0.0);
            let mut pow = CMat::identity(dim, dim);
            for _ in 0..t.degree {
                pow = &pow * &a;
            }
            sum += pow * C64::new(nf * t.coeff, 0.0);
        }
        let weyl = weyl_ordered_operator(&p, n).unwrap();
        prop_assert!(max_abs(&(sum - weyl.matrix())) <= 1e-10);
    }

    #[test]
    fn casimir_commutes_with_generators(n in 1usize..=8, site in 0usize..8, two_j in 0u32..12) {
        let total = build_total_spin(n).unwrap();
        let local = build_site_spin(n, site % n + 1).unwrap();
        let irrep = spin_irrep(TwoJ(two_j));
        for set in [&total, &local, &irrep] {
            let c2 = set.casimir();
            for a in Axis::ALL {
                let sa = set.component(a).to_dense();
                prop_assert!(max_abs(&commutator(&c2, &sa)) <= 1e-12);
            }
        }
    }

    #[test]
    fn field_terms_of_distinct_sites_commute(
        fields in prop::collection::vec(prop::array::uniform3(-2.0..2.0f64), 2..=6),
        i in 0usize..6,
        j in 0usize..6,
    ) {
        let n = fields.len();
        let (a, b) = (i % n + 1, j % n + 1);
        prop_assume!(a != b);
        let r = FieldRealization::from_fields(fields).unwrap();
        let ta = field_site_term(&r, a).unwrap();
        let tb = field_site_term(&r, b).unwrap();
        prop_assert_eq!(max_abs(&commutator(ta.matrix(), tb.matrix())), 0.0);
    }

    #[test]
    fn linearization_dominates_quadratic_model(
        alpha in prop::array::uniform3(0.0..2.0f64),
        m in ball_point(),
        fields in prop::collection::vec(prop::array::uniform3(-1.0..1.0f64), 1..=6),
    ) {
        let r = FieldRealization::from_fields(fields).unwrap();
        let lin = assemble_linearized(alpha, m, &r).unwrap();
        let full = assemble_full(&PolynomialSymbol::negative_quadratic(alpha), &r).unwrap();
        prop_assert!(min_eigenvalue(&(lin.matrix() - full.matrix())) >= -1e-10);
    }

    #[test]
    fn fenchel_young(m in ball_point(), h in prop::array::uniform3(-3.0..3.0f64), which in 0usize..3) {
        let dist = &battery()[which];
        let ev = evaluator(dist);
        let sol = legendre_transform(&ev, m).unwrap();
        let inner = |a: Vec3, b: Vec3| (0..3).map(|k| a[k] * b[k]).sum::<f64>();
        prop_assert!(inner(m, h) <= ev.value(h) + sol.lambda_star + 1e-10);
        let at = inner(m, sol.h) - ev.value(sol.h);
        prop_assert!((at - sol.lambda_star).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(cases(16))]

    #[test]
    fn product_trial_state_factorizes(
        fields in prop::collection::vec(prop::array::uniform3(-1.0..1.0f64), 2..=5),
        h in prop::array::uniform3(-1.0..1.0f64),
        w in unit_vector(),
        picks in prop::collection::btree_set(0usize..5, 2..=3),
    ) {
        let n = fields.len();
        let sites: Vec<usize> = picks.into_iter().filter(|&s| s < n).map(|s| s + 1).collect();
        prop_assume!(sites.len() >= 2);
        let r = FieldRealization::from_fields(fields).unwrap();
        let generator = ModelSpec::new(PolynomialSymbol::zero(), r).with_linear_field(h).dense().unwrap();
        let (e, v) = hermitian_eigen(generator.matrix());
        let top = e.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = e.iter().map(|x| (x - top).exp()).collect();
        let z: f64 = weights.iter().sum();
        let d = CMat::from_diagonal(&normalized_weights(&weights, z));
        let rho = &v * d * v.adjoint();
        let local: Vec<CMat> = sites
            .iter()
            .map(|&s| build_site_spin(n, s).unwrap().linear_form(w).to_dense())
            .collect();
        let expect = |a: &CMat| (&rho * a).trace().re;
        let product = local.iter().fold(CMat::identity(1 << n, 1 << n), |acc, a| acc * a);
        let factored: f64 = local.iter().map(expect).product();
        prop_assert!((expect(&product) - factored).abs() <= 1e-12);
    }
}

fn normalized_weights(w: &[f64], z: f64) -> qmf_core::linalg::CVec {
    qmf_core::linalg::CVec::from_iterator(w.len(), w.iter().map(|x| C64::new(x / z, 0.0)))
}

fn battery() -> Vec<FieldDistribution> {
    vec![
        FieldDistribution::AxisDichotomous { axis: Axis::Z, eps: 1.0, p: 0.5 },
        FieldDistribution::UniformBox { lo: [-0.5, 0.0, -1.0], hi: [0.5, 0.4, 1.0] },
        FieldDistribution::Empirical {
            atoms: vec![[0.3, 0.0, 0.2], [-0.1, 0.7, 0.0], [0.0, 0.0, -0.9]],
            weights: vec![0.2, 0.3, 0.5],
        },
    ]
}

fn all_kinds() -> Vec<FieldDistribution> {
    let mut v = battery();
    v.push(FieldDistribution::PointMass { v: [0.2, -0.4, 0.1] });
    v.push(FieldDistribution::Gaussian { mean: [0.1, 0.0, -0.3], sigma: 0.7 });
    v
}

fn evaluator(d: &FieldDistribution) -> LambdaEvaluator {
    match d {
        FieldDistribution::Gaussian { .. } => {
            LambdaEvaluator::new(d, LambdaMethod::GaussHermite { order: 16 }).unwrap()
        }
        FieldDistribution::UniformBox { .. } => {
            LambdaEvaluator::new(d, LambdaMethod::GaussLegendre { order: 12 }).unwrap()
        }
        _ => LambdaEvaluator::auto(d).unwrap(),
    }
}

fn sphere_grid(k: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..k)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / k as f64;
            let s = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            [s * t.cos(), s * t.sin(), z]
        })
        .collect()
}

#[test]
fn degeneracies_fill_the_product_space() {
    for n in 1..=24usize {
        let total: u128 = admissible_spins(n)
            .into_iter()
            .map(|tj| block_degeneracy(n, tj).unwrap() * tj.dim() as u128)
            .sum();
        assert_eq!(total, 1u128 << n, "N = {n}");
    }
}

#[test]
fn magnetization_components_nearly_commute() {
    let pairs = [(0, 1), (1, 2), (0, 2)];
    for n in 1..=6usize {
        let m = magnetization(n);
        for (a, b) in pairs {
            let c = spectral_norm(&commutator(&m[a], &m[b]));
            assert!(c <= 2.0 / n as f64 + 1e-12, "N = {n}: {c}");
        }
    }
    // the total spin is block diagonal over irreps, so larger N is checked block by block
    for n in 1..=12usize {
        let scale = C64::new(2.0 / n as f64, 0.0);
        for tj in admissible_spins(n) {
            let s = spin_irrep(tj);
            let m = [0, 1, 2].map(|k| s.component(axis(k)).to_dense() * scale);
            for (a, b) in pairs {
                let c = spectral_norm(&commutator(&m[a], &m[b]));
                assert!(c <= 2.0 / n as f64 + 1e-12, "N = {n}, 2J = {}: {c}", tj.0);
            }
        }
    }
}

#[test]
fn realizations_are_reproducible_and_prefix_stable() {
    for d in all_kinds() {
        let once = sample_fields(&d, 12, 7).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let again: Vec<FieldRealization> = pool.install(|| {
            (0..8).into_par_iter().map(|_| sample_fields(&d, 12, 7).unwrap()).collect()
        });
        for r in again {
            assert_eq!(r.fields, once.fields);
        }
        let short = sample_fields(&d, 8, 7).unwrap();
        assert_eq!(short.fields[..], once.fields[..8]);
        if !matches!(d, FieldDistribution::PointMass { .. }) {
            assert_ne!(sample_fields(&d, 12, 8).unwrap().fields, once.fields, "{d:?}");
        }
    }
}

#[test]
fn sample_means_match_the_law() {
    let count = 100_000;
    for d in all_kinds() {
        let r = sample_fields(&d, count, 2024).unwrap();
        let mean = mean_field_vector(&d).unwrap();
        for k in 0..3 {
            let xs: Vec<f64> = r.fields.iter().map(|b| b[k]).collect();
            let avg = xs.iter().sum::<f64>() / count as f64;
            let var = xs.iter().map(|x| (x - avg).powi(2)).sum::<f64>() / (count as f64 - 1.0);
            let se = (var / count as f64).sqrt();
            assert!((avg - mean[k]).abs() <= 5.0 * se + 1e-11 * mean[k].abs().max(1.0), "{d:?} axis {k}: {avg} vs {}", mean[k]);
        }
    }
}

#[test]
fn field_commutator_budget() {
    // ||[M_mu, H_b]|| = (2/N) sum_n |e_mu x b(n)|, so the squared norm reaches 4 bbar^2
    for n in [2usize, 4, 6, 8, 10] {
        let fields: Vec<Vec3> = (0..n)
            .map(|i| {
                let t = 0.7 * i as f64 + 0.3;
                [t.sin(), (1.3 * t).cos(), 0.5 * t.cos()]
            })
            .collect();
        let r = FieldRealization::from_fields(fields).unwrap();
        let hb = assemble_field_term(&r).unwrap();
        let m = magnetization(n);
        for mm in &m {
            let c = spectral_norm(&commutator(mm, hb.matrix()));
            assert!(c * c <= 4.0 * r.bbar().powi(2) + 1e-10, "N = {n}");
        }
    }
    let n = 4;
    let r = FieldRealization::uniform(n, [1.0, 0.0, 0.0]).unwrap();
    let hb = assemble_field_term(&r).unwrap();
    let c = spectral_norm(&commutator(&magnetization(n)[2], hb.matrix()));
    assert!((c * c - 4.0).abs() < 1e-10);
    assert!(c * c > 2.0 * r.bbar().powi(2));
}

#[test]
fn tilt_commutator_budget() {
    // ||[M_mu, sqrt(N) <gamma, M>]|| = 2 |e_mu x gamma| / sqrt(N)
    for n in [2usize, 4, 6, 8, 10] {
        let m = magnetization(n);
        let gamma = [0.4, -1.1, 0.8];
        let tilt: CMat = (0..3)
            .map(|k| &m[k] * C64::new((n as f64).sqrt() * gamma[k], 0.0))
            .fold(CMat::zeros(1 << n, 1 << n), |acc, x| acc + x);
        for mu in 0..3 {
            let c = spectral_norm(&commutator(&m[mu], &tilt));
            let g2 = norm3(gamma).powi(2);
            assert!(c * c <= 4.0 * g2 / n as f64 + 1e-10, "N = {n}");
            let mut perp = gamma;
            perp[mu] = 0.0;
            assert!((c - 2.0 * norm3(perp) / (n as f64).sqrt()).abs() < 1e-10);
        }
    }
    let n = 4;
    let m = magnetization(n);
    let tilt = &m[0] * C64::new((n as f64).sqrt(), 0.0);
    let c = spectral_norm(&commutator(&m[2], &tilt));
    assert!(c * c > 2.0 / n as f64);
}

#[test]
fn monomial_commutators_scale_inversely_with_n() {
    let dirs = sphere_grid(6);
    for d in 1..=4u32 {
        let mut worst: f64 = 0.0;
        for n in [2usize, 4, 6, 8] {
            let s = build_total_spin(n).unwrap();
            let m = magnetization(n);
            for w in &dirs {
                let a = s.linear_form(*w).to_dense() * C64::new(2.0 / n as f64, 0.0);
                let mut pow = CMat::identity(1 << n, 1 << n);
                for _ in 0..d {
                    pow = &pow * &a;
                }
                for mm in &m {
                    worst = worst.max(n as f64 * spectral_norm(&commutator(mm, &pow)));
                }
            }
        }
        println!("C({d}) = {worst:.6}");
        assert!(worst <= 2.0 * d as f64 + 1e-10, "C({d}) = {worst}");
    }
}

#[test]
fn trial_states_bound_the_pressure_from_below() {
    let p = PolynomialSymbol::new([(1.0, [0, 0, 2]), (0.3, [1, 1, 0])]).unwrap();
    let d = FieldDistribution::AxisDichotomous { axis: Axis::Z, eps: 0.5, p: 0.5 };
    let hs: Vec<Vec3> = [-0.8, -0.2, 0.0, 0.4, 1.0]
        .iter()
        .flat_map(|&z| [[0.0, 0.0, z], [0.3, -0.2, z]])
        .collect();
    for n in [2usize, 4, 6, 10] {
        let spec = ModelSpec::new(p.clone(), sample_fields(&d, n, 3).unwrap());
        for h in &hs {
            let t = gibbs_trial_bound(&spec, *h, Route::Sectors).unwrap();
            assert!(t.bound <= t.exact + 1e-12, "N = {n}, h = {h:?}: {} > {}", t.bound, t.exact);
        }
    }
}

#[test]
fn cosh_inequality_on_log_grid() {
    let k = 2000;
    for i in 0..=k {
        let x = 10f64.powf(-8.0 + (8.0 + 50f64.log10()) * i as f64 / k as f64);
        assert!(cosh_lemma_holds(x), "x = {x}");
    }
}

#[test]
fn lambda_bound_chain() {
    let hs = sphere_grid(100)
        .into_iter()
        .enumerate()
        .map(|(i, u)| u.map(|x| x * 4.0 * (i as f64 + 1.0) / 100.0));
    let hs: Vec<Vec3> = hs.collect();
    for d in all_kinds() {
        let ev = evaluator(&d);
        let mean = ev.node_mean();
        let base = lambda_value(&ev, [0.0; 3]);
        for h in &hs {
            let l = lambda_value(&ev, *h);
            let shifted = norm3([0, 1, 2].map(|k| mean[k] + h[k]));
            assert!(shifted <= l + 1e-12, "{d:?} at {h:?}");
            assert!(l <= base + norm3(*h) + 1e-12, "{d:?} at {h:?}");
        }
    }
}

#[test]
fn conjugate_is_bounded_by_the_mean_field() {
    for d in all_kinds() {
        let ev = evaluator(&d);
        let bound = norm3(ev.node_mean());
        let k = 5;
        for i in 0..k {
            for j in 0..k {
                for l in 0..k {
                    let m = [i, j, l].map(|a| -0.95 + 1.9 * a as f64 / (k - 1) as f64);
                    if norm3(m) > 0.99 {
                        continue;
                    }
                    let s = legendre_transform(&ev, m).unwrap_or_else(|e| panic!("{d:?} at {m:?}: {e}"));
                    assert!(s.lambda_star <= bound + 1e-9, "{d:?} at {m:?}");
                }
            }
        }
    }
}

#[test]
fn lambda_gradient_matches_differences() {
    let step = 1e-5;
    for d in all_kinds() {
        let ev = evaluator(&d);
        for h in sphere_grid(20).into_iter().map(|u| u.map(|x| 1.7 * x)) {
            let g = lambda_gradient(&ev, h);
            for k in 0..3 {
                let mut a = h;
                let mut b = h;
                a[k] += step;
                b[k] -= step;
                let fd = (lambda_value(&ev, a) - lambda_value(&ev, b)) / (2.0 * step);
                assert!((fd - g[k]).abs() <= 1e-7, "{d:?} at {h:?}: {fd} vs {}", g[k]);
            }
            let lip = (lambda_value(&ev, [h[0] + 0.3, h[1], h[2]]) - lambda_value(&ev, h)).abs();
            assert!(lip <= 0.3 + 1e-12);
        }
    }
}

type Battery = Vec<(String, Box<dyn Fn(Vec3) -> f64>)>;

fn berezin_battery() -> Battery {
    vec![
        ("zero".into(), Box::new(|_| 0.0)),
        ("linear".into(), Box::new(|e: Vec3| 1.5 * e[2] - 0.4 * e[0])),
        ("quadratic".into(), Box::new(|e: Vec3| 2.0 * e[2] * e[2] - e[0] * e[1])),
        ("cubic".into(), Box::new(|e: Vec3| e[0].powi(3) + 0.5 * e[1])),
        ("abs".into(), Box::new(|e: Vec3| 3.0 * e[2].abs())),
        ("smooth".into(), Box::new(|e: Vec3| (e[0] + e[2]).sin())),
    ]
}

#[test]
fn berezin_lieb_sandwich_battery() {
    for two_j in 0..=10u32 {
        let q = quadrature_for_spin(TwoJ(two_j), 24).unwrap();
        for (name, g) in berezin_battery() {
            let b = berezin_lieb_bounds(&|e| g(e), TwoJ(two_j), &q).unwrap();
            assert!(b.lower <= b.exact * (1.0 + 1e-12), "{name} at 2J = {two_j}: {b:?}");
            assert!(b.exact <= b.upper * (1.0 + 1e-12), "{name} at 2J = {two_j}: {b:?}");
        }
    }
}

struct Difference<'a>(&'a dyn ClassicalSymbol, &'a dyn ClassicalSymbol);

impl ClassicalSymbol for Difference<'_> {
    fn value(&self, m: Vec3) -> f64 {
        self.0.value(m) - self.1.value(m)
    }
}

fn sup_on_ball(f: &dyn ClassicalSymbol) -> f64 {
    let dirs = sphere_grid(400);
    (0..=20)
        .flat_map(|i| dirs.iter().map(move |u| u.map(|x| x * i as f64 / 20.0)))
        .map(|m| f.value(m).abs())
        .fold(0.0, f64::max)
}

#[test]
fn lower_symbol_of_upper_symbol_tracks_the_function() {
    let f = CoherentSymbol::Polynomial {
        polynomial: PolynomialSymbol::new([(1.0, [0, 0, 2]), (-0.5, [1, 1, 0]), (0.3, [1, 0, 0])]).unwrap(),
    };
    let probe = SphereQuadrature::new(6, 12).unwrap();
    let mut gaps = Vec::new();
    for n in [4usize, 8, 12, 16, 24] {
        let tj = TwoJ(n as u32);
        let q = quadrature_for_spin(tj, DEFAULT_EXTRA_DEGREE).unwrap();
        let op = upper_symbol_operator(&f, tj, n, &q).unwrap();
        let gap = probe
            .nodes()
            .iter()
            .map(|node| {
                let low = lower_symbol(op.matrix(), tj, node.theta, node.phi).unwrap();
                (low - n as f64 * f.value(node.direction())).abs() / n as f64
            })
            .fold(0.0, f64::max);
        gaps.push(gap);
    }
    println!("lower-symbol gaps {gaps:?}");
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn coherent_quantization_is_norm_continuous() {
    let poly = |s: &str| CoherentSymbol::Polynomial { polynomial: s.parse().unwrap() };
    let pairs = [
        (poly("z^2"), CoherentSymbol::Norm { coeff: 1.0 }),
        (poly("x*y"), CoherentSymbol::AbsComponent { axis: Axis::X, coeff: 0.5 }),
        (poly("z"), poly("z^3")),
        (CoherentSymbol::Norm { coeff: 2.0 }, CoherentSymbol::AbsComponent { axis: Axis::Z, coeff: 2.0 }),
        (poly("x^2; y^2"), poly("1; -1*z^2")),
    ];
    for (f, g) in &pairs {
        let diff = Difference(f, g);
        let sup = sup_on_ball(&diff);
        for n in [4usize, 8, 12] {
            let worst = admissible_spins(n)
                .into_iter()
                .map(|tj| {
                    let q = quadrature_for_spin(tj, DEFAULT_EXTRA_DEGREE).unwrap();
                    let a = upper_symbol_operator(f, tj, n, &q).unwrap();
                    let b = upper_symbol_operator(g, tj, n, &q).unwrap();
                    spectral_norm(&(a.matrix() - b.matrix()))
                })
                .fold(0.0, f64::max);
            assert!(worst <= n as f64 * sup + 1e-9, "{f:?} vs {g:?} at N = {n}: {worst} > {}", n as f64 * sup);
        }
    }
}

#[test]
fn more_seeds_do_not_inflate_the_error_bar() {
    let base = r#"{"model": {"weyl": "z^2"}, "distribution": {"kind": "axis_dichotomous", "axis": "z", "eps": 0.5, "p": 0.5}, "n_list": [4, 6], "audit_lower_bound": false, "seeds": "#;
    let run = |count: usize| {
        let c = RunConfig::from_json(&format!("{base}{{\"count\": {count}, \"base\": 11}}}}")).unwrap();
        run_convergence(&c).unwrap()
    };
    let few = run(8);
    let many = run(64);
    for (a, b) in few.rows.iter().zip(&many.rows) {
        assert!(b.p_stderr <= a.p_stderr, "N = {}: {} > {}", a.n, b.p_stderr, a.p_stderr);
    }
}
