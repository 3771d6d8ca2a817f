use entrolab::chain::Configuration;
use entrolab::models::{build_irw, Potential};
use entrolab::sampling::draw_rng;
use entrolab::transport::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_law<R: Rng>(rng: &mut R, n: usize, sparsity: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| if rng.gen::<f64>() < sparsity { 0.0 } else { rng.gen::<f64>() }).collect();
    if w.iter().all(|x| *x == 0.0) {
        w[0] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// On a line the monotone (quantile) coupling is optimal for convex costs.
fn quantile_cost(mu: &[f64], nu: &[f64], p: f64) -> f64 {
    let (mut i, mut j) = (0, 0);
    let (mut a, mut b) = (mu[0], nu[0]);
    let mut total = 0.0;
    loop {
        let m = a.min(b);
        total += m * ((i as f64 - j as f64).abs()).powf(p);
        a -= m;
        b -= m;
        if a <= 1e-15 {
            i += 1;
            if i == mu.len() {
                break;
            }
            a = mu[i];
        }
        if b <= 1e-15 {
            j += 1;
            if j == nu.len() {
                break;
            }
            b = nu[j];
        }
    }
    total
}

#[test]
fn line_laws_match_quantile_coupling() {
    let states: Vec<Configuration> = (0..30).map(|k| vec![k]).collect();
    let mut rng = draw_rng(9, 0);
    for _ in 0..40 {
        let mu = random_law(&mut rng, 30, 0.5);
        let nu = random_law(&mut rng, 30, 0.5);
        for p in [1.0, 1.5, 2.0, 3.0] {
            let (w, plan) = wasserstein_p(&states, &mu, &nu, p).unwrap();
            let want = quantile_cost(&mu, &nu, p);
            assert!((w.powf(p) - want).abs() <= 1e-10 * want.max(1.0), "p={p}: {} vs {want}", w.powf(p));
            assert!(plan.marginal_residual(&mu, &nu) < 1e-10);
            assert!(plan.dual_gap.unwrap().abs() <= 1e-9 * want.max(1.0));
        }
    }
}

#[test]
fn lp_beats_heuristic_plans_and_is_monotone() {
    let states = entrolab::chain::box_states(2, 5);
    let n = states.len();
    let mut rng = draw_rng(10, 0);
    for _ in 0..5 {
        let mu = random_law(&mut rng, n, 0.6);
        let nu = random_law(&mut rng, n, 0.6);
        for p in [1.0, 2.0] {
            let (_, plan) = wasserstein_p(&states, &mu, &nu, p).unwrap();
            assert!(plan.marginal_residual(&mu, &nu) < 1e-10);
            let mut a: Vec<usize> = (0..n).collect();
            let mut b: Vec<usize> = (0..n).collect();
            for _ in 0..100 {
                a.shuffle(&mut rng);
                b.shuffle(&mut rng);
                let h = northwest_plan(&states, &mu, &nu, &a, &b, p);
                assert!(h.marginal_residual(&mu, &nu) < 1e-10);
                assert!(plan.cost <= h.cost + 1e-12);
            }
            let cm = check_cyclical_monotonicity(&states, &plan, p).unwrap();
            assert!(cm.passed, "{cm:?}");
        }
    }
}

#[test]
fn triangle_inequality_for_graph_distance() {
    let mut rng = draw_rng(11, 0);
    for _ in 0..1000 {
        let v: Vec<Vec<i32>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(0..20)).collect()).collect();
        let ab = graph_distance(&v[0], &v[1]).unwrap();
        let bc = graph_distance(&v[1], &v[2]).unwrap();
        let ac = graph_distance(&v[0], &v[2]).unwrap();
        assert!(ac <= ab + bc);
    }
}

#[test]
fn explicit_plan_is_optimal_for_every_order() {
    let m = build_irw(&Potential::Quadratic { beta: 0.4 }, &Potential::Poisson { lambda: 1.0 }, 2, 5).unwrap();
    let g = &m.generator;
    let tables = m.kappa.irw.as_ref().unwrap();
    let t = 0.02;
    for s in 0..g.n_states() {
        let eta = g.state(s);
        for i in 0..2 {
            // Both walkers strictly inside the box.
            if eta[i] >= 4 || eta.iter().any(|&x| x >= 5) {
                continue;
            }
            let plan = neighbor_optimal_coupling(&m, s, i, t).unwrap();
            let want = 1.0 - t * (tables.kappa_plus[s * 2 + i] + tables.kappa_minus[s * 2 + i]);
            let costs: Vec<f64> = [1.0, 2.0, 4.0].iter().map(|&p| plan_cost(g.states(), &plan, p)).collect();
            for c in &costs {
                assert!((c - want).abs() < 1e-12, "{eta:?} i={i}: {c} vs {want}");
            }
            let xi = g.target_of(s, entrolab::Move::Inc(i));
            let mu = one_jump_law(g, s, t).unwrap();
            let nu = one_jump_law(g, xi, t).unwrap();
            assert!(plan.marginal_residual(mu.weights(), nu.weights()) < 1e-14);
            let (w, _) = wasserstein_p(g.states(), mu.weights(), nu.weights(), 2.0).unwrap();
            assert!((w * w - want).abs() < 1e-10);
            assert!(check_cyclical_monotonicity(g.states(), &plan, 3.0).unwrap().passed);
        }
    }
}

#[test]
fn contraction_on_interior_pairs() {
    let m = build_irw(&Potential::Quadratic { beta: 0.5 }, &Potential::Poisson { lambda: 1.0 }, 2, 5).unwrap();
    let g = &m.generator;
    let grid: Vec<f64> = (1..=50).map(|k| 0.01 * k as f64).collect();
    let pairs = [([1, 1], [2, 1]), ([1, 1], [0, 2]), ([0, 0], [2, 2])];
    for (a, b) in pairs {
        let mu = DiscreteLaw::dirac(g.n_states(), g.index_of(&a).unwrap());
        let nu = DiscreteLaw::dirac(g.n_states(), g.index_of(&b).unwrap());
        for p in [1.0, 2.0] {
            let r = contraction_check(&m, &mu, &nu, p, &grid, &ContractionOptions::default()).unwrap();
            assert!(r.passed, "{a:?} {b:?} p={p}");
            assert!(r.kappa_emp.unwrap() >= r.kappa - 0.05);
        }
    }
    let same = DiscreteLaw::dirac(g.n_states(), 0);
    let r = contraction_check(&m, &same, &same, 2.0, &grid, &ContractionOptions::default()).unwrap();
    assert!(r.passed && r.rows.iter().all(|row| row.ratio == 0.0));
}

#[test]
fn slope_matches_curvature_and_flags_violations() {
    let m = build_irw(&Potential::Quadratic { beta: 0.5 }, &Potential::Poisson { lambda: 1.0 }, 2, 6).unwrap();
    let s = m.generator.index_of(&[1, 2]).unwrap();
    let t = m.kappa.irw.as_ref().unwrap();
    let want = -(t.kappa_plus[s * 2] + t.kappa_minus[s * 2]);
    for h in [1e-3, 1e-4] {
        let slope = neighbor_slope(&m, s, 0, 2.0, h).unwrap();
        assert!((slope - want).abs() < 50.0 * h, "h={h}: {slope} vs {want}");
    }
    // Repulsive pair interaction with slow departures breaks the hypothesis.
    let bad = build_irw(&Potential::Pairwise { c: 2.0 }, &Potential::Poisson { lambda: 0.2 }, 2, 6).unwrap();
    assert!(!bad.kappa.hypotheses_ok);
    let z = bad.generator.index_of(&[0, 0]).unwrap();
    assert!(neighbor_slope(&bad, z, 0, 4.0, 1e-4).unwrap() > 0.0);
    assert!(matches!(neighbor_optimal_coupling(&bad, z, 0, 0.01), Err(entrolab::Error::HypothesisViolation { .. })));
}
