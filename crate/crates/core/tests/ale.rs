use palevim_core::ale::{
    ale_main_curve, ale_main_vim, ale_second_surface, ale_second_vim, local_effects, r2_ale2,
    AleCurve, AleSurface, Axis, AxisKind, Convention, LocalEffects,
};
use palevim_core::models::{generate_scenario, make_builtin, Scenario, ScenarioSpec};
use palevim_core::{build_partition, Dataset, Error, ModelHandle};
use proptest::prelude::*;

const RE: Convention = Convention::RightEndpoint;

fn scenario(text: &str, n: usize, seed: u64) -> Dataset {
    generate_scenario(&ScenarioSpec::new(Scenario::parse(text).unwrap(), n, seed)).unwrap()
}

fn curve(m: &ModelHandle, d: &Dataset, j: usize, k: usize) -> (LocalEffects, AleCurve) {
    let p = build_partition(d.numeric(j).unwrap(), k).unwrap();
    let e = local_effects(m, d, &p, j).unwrap();
    let c = ale_main_curve(&e, RE);
    (e, c)
}

fn all_surfaces(m: &ModelHandle, d: &Dataset, k_pair: usize) -> Vec<AleSurface> {
    let mut out = Vec::new();
    for a in 0..d.d() {
        for b in a + 1..d.d() {
            out.push(ale_second_surface(m, d, a, b, k_pair, RE).unwrap());
        }
    }
    out
}

fn weighted_variance(values: &[f64], weights: &[f64]) -> f64 {
    let w: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / w;
    values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * (v - mean) * (v - mean))
        .sum::<f64>()
        / w
}

#[test]
fn additive_local_effects_are_interval_widths() {
    let d = scenario("iid_uniform:d=2", 300, 2);
    let m = make_builtin("example1", &[]).unwrap();
    let (e, _) = curve(&m, &d, 0, 6);
    let z = &e.axis().points;
    for k in 0..e.k() {
        for v in e.effects(k) {
            assert!((v - (z[k + 1] - z[k])).abs() < 1e-12);
        }
    }
}

#[test]
fn interaction_local_effects_scale_with_other_predictor() {
    let d = scenario("iid_uniform:d=2", 300, 3);
    let m = make_builtin("example3_interaction", &[]).unwrap();
    let (e, _) = curve(&m, &d, 0, 6);
    let z = &e.axis().points;
    for k in 0..e.k() {
        for &(i, v) in e.interval(k) {
            let want = 2.0 * (z[k + 1] - z[k]) * d.value(i, 1);
            assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        }
    }
}

#[test]
fn absent_predictor_has_zero_effects() {
    let d = scenario("copula4", 400, 1);
    let m = make_builtin("example5", &[]).unwrap();
    let (e, c) = curve(&m, &d, 3, 8);
    assert!((0..e.k()).all(|k| e.effects(k).iter().all(|&v| v == 0.0)));
    assert!(c.centered.iter().all(|&v| v == 0.0));
    assert_eq!(ale_main_vim(&c), 0.0);
}

#[test]
fn hand_accumulation_and_centering() {
    let axis = Axis {
        points: vec![0.0, 1.0, 2.0],
        weights: vec![0.0, 1.0, 1.0],
        kind: AxisKind::Numeric,
    };
    let e = LocalEffects::from_parts(0, axis, 2, vec![vec![(0, 1.0)], vec![(1, 3.0)]], 4).unwrap();
    let c = ale_main_curve(&e, RE);
    assert_eq!(c.accumulated, vec![0.0, 1.0, 4.0]);
    assert_eq!(&c.centered[1..], &[-1.5, 1.5]);
    assert_eq!(ale_main_vim(&c), 2.25);
}

#[test]
fn all_zero_effects_give_flat_curve() {
    let d = scenario("iid_uniform:d=2", 100, 1);
    let m = ModelHandle::from_fn("x2", 2, |r| r[1]);
    let (_, c) = curve(&m, &d, 0, 4);
    assert!(c.centered.iter().all(|&v| v == 0.0));
    assert_eq!(ale_main_vim(&c), 0.0);
}

#[test]
fn linear_curve_is_centered_breakpoints() {
    let d = scenario("gauss3:rho=0.5", 2_000, 4);
    let m = make_builtin("linear", &[2.5, -1.0, 0.5]).unwrap();
    let (e, c) = curve(&m, &d, 0, 40);
    let z = &e.axis().points;
    let counts = e.counts();
    let n = d.n() as f64;
    let zbar: f64 = (0..e.k()).map(|k| counts[k] as f64 * z[k + 1]).sum::<f64>() / n;
    for k in 1..=e.k() {
        assert!((c.centered[k] - 2.5 * (z[k] - zbar)).abs() < 1e-10);
    }
    let expected = weighted_variance(
        &z[1..].iter().map(|v| 2.5 * v).collect::<Vec<_>>(),
        &counts.iter().map(|&c| c as f64).collect::<Vec<_>>(),
    );
    assert!((ale_main_vim(&c) - expected).abs() <= 1e-10 * expected);
}

#[test]
fn linear_gaussian_main_effect() {
    let d = scenario("gauss3:rho=0.9", 20_000, 1);
    let m = make_builtin("linear", &[1.0, 1.0, 0.5]).unwrap();
    let (_, c) = curve(&m, &d, 0, 100);
    let s = ale_main_vim(&c).sqrt();
    assert!((s - 1.0).abs() <= 0.03, "{s}");
}

#[test]
fn additive_surface_vanishes() {
    let d = scenario("iid_uniform:d=2", 2_000, 5);
    let m = ModelHandle::from_fn("x1+x2^2", 2, |r| r[0] + r[1] * r[1]);
    let s = ale_second_surface(&m, &d, 0, 1, 20, RE).unwrap();
    assert!(s.grid.iter().all(|v| v.abs() <= 1e-10), "{:?}", s.grid);
}

/// Largest deviation of the surface from `target` at cell centres, over cells
/// at least `margin` cells from every edge.
fn deviation(s: &AleSurface, target: impl Fn(f64, f64) -> f64, margin: usize) -> (f64, f64) {
    let (za, zb) = (&s.axes.0.points, &s.axes.1.points);
    let (ka, kb) = s.cells.dim();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for a in margin..ka - margin {
        for b in margin..kb - margin {
            let t = target(0.5 * (za[a] + za[a + 1]), 0.5 * (zb[b] + zb[b + 1]));
            worst = worst.max((s.cells[[a, b]] - t).abs());
            scale = scale.max(t.abs());
        }
    }
    (worst, scale)
}

#[test]
fn interaction_surface_recovers_product() {
    let d = scenario("iid_uniform:d=2", 10_000, 1);
    let m = make_builtin("example3_interaction", &[]).unwrap();
    let s = ale_second_surface(&m, &d, 0, 1, 40, RE).unwrap();
    let (worst, _) = deviation(&s, |a, b| 2.0 * (a - 0.5) * (b - 0.5), 0);
    assert!(worst <= 0.05, "{worst}");
}

#[test]
fn example5_surface_recovers_interaction_term() {
    let d = scenario("copula4", 10_000, 1);
    let m = make_builtin("example5", &[]).unwrap();
    let s = ale_second_surface(&m, &d, 0, 1, 40, RE).unwrap();
    let (worst, scale) = deviation(&s, |a, b| 13.86 * (a - 0.5) * (b - 0.5), 1);
    assert!(worst <= 0.05 * scale, "{worst} vs {scale}");
}

#[test]
fn second_order_vim_for_additive_model_equals_main() {
    let d = scenario("iid_uniform:d=3", 1_500, 6);
    let m = make_builtin("linear", &[1.0, -2.0, 0.3]).unwrap();
    let curves: Vec<_> = (0..3).map(|j| curve(&m, &d, j, 30).1).collect();
    let surfaces = all_surfaces(&m, &d, 15);
    for j in 0..3 {
        let main = ale_main_vim(&curves[j]);
        let second = ale_second_vim(j, &curves, &surfaces, &d).unwrap();
        assert!((main - second).abs() <= 1e-10 * main.max(1.0), "{main} {second}");
    }
}

#[test]
fn example5_second_order_vims() {
    let d = scenario("copula4", 10_000, 1);
    let m = make_builtin("example5", &[]).unwrap();
    let curves: Vec<_> = (0..4).map(|j| curve(&m, &d, j, 100).1).collect();
    let surfaces = all_surfaces(&m, &d, 40);
    let x1 = ale_second_vim(0, &curves, &surfaces, &d).unwrap().sqrt();
    let target = (8.0f64 / 3.0).sqrt();
    assert!((x1 - target).abs() <= 0.05 * target, "{x1}");
    assert_eq!(ale_second_vim(3, &curves, &surfaces, &d).unwrap(), 0.0);
}

#[test]
fn r2_is_one_when_data_sit_on_breakpoints() {
    // five distinct values per column: every observation is an interval's
    // right endpoint, so the step functions are exact
    let rows: Vec<Vec<f64>> = (0..200)
        .map(|i| vec![(i % 5) as f64, ((i * 3 + i / 5) % 5) as f64])
        .collect();
    let d = Dataset::from_rows(&rows, None).unwrap();
    let m = ModelHandle::from_fn("add", 2, |r| r[0].exp() + r[1] * r[1]);
    let curves: Vec<_> = (0..2).map(|j| curve(&m, &d, j, 5).1).collect();
    let surfaces = all_surfaces(&m, &d, 5);
    let r2 = r2_ale2(&m, &d, &curves, &surfaces).unwrap();
    assert!((r2 - 1.0).abs() <= 1e-6, "{r2}");
}

#[test]
fn example5_r2_coverage() {
    let d = scenario("copula4", 10_000, 1);
    let m = make_builtin("example5", &[]).unwrap();
    let curves: Vec<_> = (0..4).map(|j| curve(&m, &d, j, 50).1).collect();
    let surfaces = all_surfaces(&m, &d, 40);
    assert!(r2_ale2(&m, &d, &curves, &surfaces).unwrap() >= 0.99);
}

#[test]
fn r2_rejects_constant_model() {
    let d = scenario("iid_uniform:d=2", 50, 1);
    let m = ModelHandle::from_fn("c", 2, |_| 3.0);
    let curves: Vec<_> = (0..2).map(|j| curve(&m, &d, j, 5).1).collect();
    let surfaces = all_surfaces(&m, &d, 5);
    assert!(matches!(r2_ale2(&m, &d, &curves, &surfaces), Err(Error::ConstantModel)));
}

#[test]
fn main_effect_budget_is_two_n() {
    let d = scenario("copula4", 777, 2);
    let m = make_builtin("example5", &[]).unwrap();
    for j in 0..4 {
        let before = m.evaluations();
        let (e, c) = curve(&m, &d, j, 13);
        let _ = ale_main_vim(&c);
        assert_eq!(m.evaluations() - before, 2 * 777);
        assert_eq!(e.evaluations(), 2 * 777);
    }
    let before = m.evaluations();
    let s = ale_second_surface(&m, &d, 0, 2, 9, RE).unwrap();
    assert_eq!(m.evaluations() - before, 4 * 777);
    assert_eq!(s.evaluations, 4 * 777);
}

/// Polynomial with pairwise interactions and cubes, coefficients from `c`.
fn poly(c: Vec<f64>) -> ModelHandle {
    ModelHandle::from_fn("poly", 3, move |r| {
        c[0] * r[0]
            + c[1] * r[1] * r[1]
            + c[2] * r[2]
            + c[3] * r[0] * r[1]
            + c[4] * r[1] * r[2]
            + c[5] * r[0] * r[2] * r[2]
            + c[6] * r[0] * r[1] * r[2]
    })
}

fn rows_strategy() -> impl Strategy<Value = Dataset> {
    (20usize..120, any::<u64>()).prop_map(|(n, seed)| scenario("copula4", n, seed)).prop_map(|d| {
        let rows: Vec<Vec<f64>> = (0..d.n()).map(|i| (0..3).map(|j| d.value(i, j)).collect()).collect();
        Dataset::from_rows(&rows, None).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn additive_recovery(d in rows_strategy(), beta in -3.0f64..3.0, k in 1usize..12, c in prop::collection::vec(-2.0f64..2.0, 7)) {
        let c2 = c.clone();
        let m = ModelHandle::from_fn("additive", 3, move |r| {
            beta * r[0] + c2[1] * r[1] * r[1] + c2[4] * r[1] * r[2] + c2[2] * r[2].sin()
        });
        let (e, cur) = curve(&m, &d, 0, k.min(d.n()));
        let z = &e.axis().points;
        for kk in 0..e.k() {
            for v in e.effects(kk) {
                prop_assert!((v - beta * (z[kk + 1] - z[kk])).abs() <= 1e-9);
            }
        }
        let w: Vec<f64> = e.counts().iter().map(|&c| c as f64).collect();
        let expected = weighted_variance(&z[1..].iter().map(|v| beta * v).collect::<Vec<_>>(), &w);
        prop_assert!((ale_main_vim(&cur) - expected).abs() <= 1e-9 * expected.max(1e-12));
        let _ = c;
    }

    #[test]
    fn absent_predictor_is_exactly_zero(d in rows_strategy(), c in prop::collection::vec(-2.0f64..2.0, 3)) {
        let m = ModelHandle::from_fn("no x1", 3, move |r| c[0] * r[1] + c[1] * r[1] * r[2] + c[2] * r[2].exp());
        let curves: Vec<_> = (0..3).map(|j| curve(&m, &d, j, 5.min(d.n())).1).collect();
        let surfaces = all_surfaces(&m, &d, 4);
        prop_assert_eq!(ale_main_vim(&curves[0]), 0.0);
        prop_assert_eq!(ale_second_vim(0, &curves, &surfaces, &d).unwrap(), 0.0);
    }

    #[test]
    fn shift_and_scale(d in rows_strategy(), c in prop::collection::vec(-2.0f64..2.0, 7), a in -4.0f64..4.0, b in -100.0f64..100.0) {
        let base = poly(c.clone());
        let c2 = c.clone();
        let inner = poly(c2);
        let moved = ModelHandle::from_fn("moved", 3, move |r| {
            a * inner.eval(&ndarray::Array2::from_shape_vec((1, 3), r.to_vec()).unwrap()).unwrap()[0] + b
        });
        for j in 0..3 {
            let v0 = ale_main_vim(&curve(&base, &d, j, 6.min(d.n())).1);
            let v1 = ale_main_vim(&curve(&moved, &d, j, 6.min(d.n())).1);
            prop_assert!((v1 - a * a * v0).abs() <= 1e-8 * (a * a * v0).max(1e-6), "{} vs {}", v1, a * a * v0);
        }
        let curves0: Vec<_> = (0..3).map(|j| curve(&base, &d, j, 6.min(d.n())).1).collect();
        let curves1: Vec<_> = (0..3).map(|j| curve(&moved, &d, j, 6.min(d.n())).1).collect();
        let s0 = all_surfaces(&base, &d, 4);
        let s1 = all_surfaces(&moved, &d, 4);
        let v0 = ale_second_vim(1, &curves0, &s0, &d).unwrap();
        let v1 = ale_second_vim(1, &curves1, &s1, &d).unwrap();
        prop_assert!((v1 - a * a * v0).abs() <= 1e-8 * (a * a * v0).max(1e-6));
    }

    #[test]
    fn surface_purity(d in rows_strategy(), c in prop::collection::vec(-3.0f64..3.0, 7), k_pair in 1usize..9, midpoint in any::<bool>()) {
        let m = poly(c);
        let conv = if midpoint { Convention::Midpoint } else { RE };
        let s = ale_second_surface(&m, &d, 0, 1, k_pair.min(d.n()), conv).unwrap();
        let (ka, kb) = s.cells.dim();
        let counts = s.counts.mapv(|c| c as f64);
        let n = counts.sum();
        let scale = s.grid.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let grand = s.cells.iter().zip(counts.iter()).map(|(v, c)| v * c).sum::<f64>() / n;
        prop_assert!(grand.abs() <= 1e-8 * scale);
        // the accumulated per-axis main effects of the surface vanish
        for a in 1..=ka {
            let na: f64 = (0..kb).map(|b| counts[[a - 1, b]]).sum();
            let step: f64 = (1..=kb).map(|b| counts[[a - 1, b - 1]] * (s.grid[[a, b]] - s.grid[[a - 1, b]])).sum::<f64>() / na;
            prop_assert!(step.abs() <= 1e-8 * scale, "axis a, {}: {}", a, step);
        }
        for b in 1..=kb {
            let nb: f64 = (0..ka).map(|a| counts[[a, b - 1]]).sum();
            let step: f64 = (1..=ka).map(|a| counts[[a - 1, b - 1]] * (s.grid[[a, b]] - s.grid[[a, b - 1]])).sum::<f64>() / nb;
            prop_assert!(step.abs() <= 1e-8 * scale, "axis b, {}: {}", b, step);
        }
        prop_assert_eq!(counts.sum() as usize, d.n());
    }

    #[test]
    fn curve_is_weighted_zero_mean(d in rows_strategy(), c in prop::collection::vec(-3.0f64..3.0, 7), k in 1usize..15) {
        let m = poly(c);
        for j in 0..3 {
            let (_, cur) = curve(&m, &d, j, k.min(d.n()));
            let w = &cur.axis.weights;
            let total: f64 = cur.centered.iter().zip(w).map(|(v, w)| v * w).sum();
            let scale = cur.accumulated.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
            prop_assert!(total.abs() <= 1e-10 * scale * d.n() as f64);
            for (g, f) in cur.accumulated.iter().zip(&cur.centered) {
                prop_assert!((g - cur.constant - f).abs() <= 1e-12 * scale);
            }
        }
    }
}
