//! Wasserstein distances for the graph distance on `ℕ^d`, the explicit
//! small-time optimal coupling of the interacting random walks, and
//! contraction-rate extraction.

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{evolve_law, Configuration, Generator, Move};
use crate::models::ModelInstance;
use crate::numeric::{linear_fit, CompensatedSum};
use crate::{Error, Result};

/// Largest support handled by the transport solver, per marginal.
pub const SUPPORT_CAP: usize = 2000;
/// Masses below this are treated as absent.
const MASS_EPS: f64 = 1e-15;

/// `Σ|ηᵢ − η̄ᵢ|`.
pub fn graph_distance(a: &[i32], b: &[i32]) -> Result<u64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), found: b.len() });
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs() as u64).sum())
}

fn dist(a: &[i32], b: &[i32]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs() as u64).sum()
}

fn cost(a: &[i32], b: &[i32], p: f64) -> f64 {
    (dist(a, b) as f64).powf(p)
}

/// Probability weights over the states of a generator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteLaw {
    weights: Vec<f64>,
}

impl DiscreteLaw {
    /// Renormalizes when the mass deficit is below `1e-9`, otherwise reports
    /// the leak.
    pub fn new(mut weights: Vec<f64>) -> Result<DiscreteLaw> {
        for (i, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() || *w < -1e-15 {
                return Err(Error::Domain(format!("law weight {i} is {w}")));
            }
            *w = w.max(0.0);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::MassLeak { leak: 1.0 - total });
        }
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(DiscreteLaw { weights })
    }

    pub fn dirac(n: usize, i: usize) -> DiscreteLaw {
        let mut weights = vec![0.0; n];
        weights[i] = 1.0;
        DiscreteLaw { weights }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportPlan {
    /// `((source state, target state), mass)`.
    pub entries: Vec<((usize, usize), f64)>,
    pub p: f64,
    /// `Σ mass·d^p`.
    pub cost: f64,
    /// Primal minus dual objective of the solver's final potentials; absent
    /// for plans not produced by the solver.
    pub dual_gap: Option<f64>,
}

impl TransportPlan {
    fn from_entries(states: &[Configuration], mut entries: Vec<((usize, usize), f64)>, p: f64) -> TransportPlan {
        entries.retain(|e| e.1 > 0.0);
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let c: CompensatedSum = entries.iter().map(|&((i, j), m)| m * cost(&states[i], &states[j], p)).collect();
        TransportPlan { entries, p, cost: c.value(), dual_gap: None }
    }

    /// Largest deviation of the plan's marginals from `mu` and `nu`.
    pub fn marginal_residual(&self, mu: &[f64], nu: &[f64]) -> f64 {
        let mut a = vec![0.0; mu.len()];
        let mut b = vec![0.0; nu.len()];
        for &((i, j), m) in &self.entries {
            a[i] += m;
            b[j] += m;
        }
        let r1 = a.iter().zip(mu).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let r2 = b.iter().zip(nu).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        r1.max(r2)
    }

    /// Rows `(src, dst, mass, distance)`.
    pub fn rows(&self, states: &[Configuration]) -> Vec<(usize, usize, f64, u64)> {
        self.entries.iter().map(|&((i, j), m)| (i, j, m, dist(&states[i], &states[j]))).collect()
    }
}

fn support(w: &[f64]) -> Vec<usize> {
    (0..w.len()).filter(|&i| w[i] > MASS_EPS).collect()
}

/// Exact `W_p` between two laws on `states` by successive shortest paths on
/// the bipartite transport network. Returns `W_p` and an optimal plan.
pub fn wasserstein_p(states: &[Configuration], mu: &[f64], nu: &[f64], p: f64) -> Result<(f64, TransportPlan)> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("order p must be >= 1, got {p}")));
    }
    for w in [mu, nu] {
        if w.len() != states.len() {
            return Err(Error::DimensionMismatch { expected: states.len(), found: w.len() });
        }
        if let Some(x) = w.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::Domain(format!("negative or non-finite mass {x}")));
        }
    }
    let (ma, mb): (f64, f64) = (mu.iter().sum(), nu.iter().sum());
    if (ma - mb).abs() > 1e-9 {
        return Err(Error::InfeasibleMarginals { mu_mass: ma, nu_mass: mb });
    }
    let src = support(mu);
    let dst = support(nu);
    if src.len() > SUPPORT_CAP || dst.len() > SUPPORT_CAP {
        return Err(Error::Domain(format!("support exceeds {SUPPORT_CAP} points")));
    }
    let (s, t) = (src.len(), dst.len());
    let c: Vec<f64> = src.iter().flat_map(|&i| dst.iter().map(move |&j| cost(&states[i], &states[j], p))).collect();
    let mut supply: Vec<f64> = src.iter().map(|&i| mu[i]).collect();
    let mut demand: Vec<f64> = dst.iter().map(|&j| nu[j]).collect();
    let mut flow = vec![0.0; s * t];
    // Node potentials; sources first, then sinks.
    let mut pot = vec![0.0; s + t];
    let tol = 1e-14 * ma.max(1e-300);
    loop {
        let remaining: f64 = supply.iter().filter(|&&x| x > tol).sum();
        if remaining <= tol || !demand.iter().any(|&x| x > tol) {
            break;
        }
        let mut distv = vec![f64::INFINITY; s + t];
        let mut parent = vec![usize::MAX; s + t];
        let mut done = vec![false; s + t];
        for i in 0..s {
            if supply[i] > tol {
                distv[i] = 0.0;
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..s + t {
                if !done[v] && distv[v] < best {
                    best = distv[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < s {
                for j in 0..t {
                    let rc = c[u * t + j] + pot[u] - pot[s + j];
                    let nd = best + rc.max(0.0);
                    if nd < distv[s + j] {
                        distv[s + j] = nd;
                        parent[s + j] = u;
                    }
                }
            } else {
                let j = u - s;
                for i in 0..s {
                    if flow[i * t + j] > tol {
                        let rc = -c[i * t + j] + pot[u] - pot[i];
                        let nd = best + rc.max(0.0);
                        if nd < distv[i] {
                            distv[i] = nd;
                            parent[i] = u;
                        }
                    }
                }
            }
        }
        let sink = (0..t)
            .filter(|&j| demand[j] > tol && distv[s + j].is_finite())
            .min_by(|&a, &b| distv[s + a].total_cmp(&distv[s + b]));
        let Some(j_end) = sink else { break };
        let reach = distv[s + j_end];
        for v in 0..s + t {
            pot[v] += distv[v].min(reach);
        }
        // Walk back to the originating source and find the bottleneck.
        let mut bottleneck = demand[j_end];
        let mut v = s + j_end;
        loop {
            let u = parent[v];
            if u == usize::MAX {
                bottleneck = bottleneck.min(supply[v]);
                break;
            }
            if u >= s {
                bottleneck = bottleneck.min(flow[v * t + (u - s)]);
            }
            v = u;
        }
        let origin = v;
        let mut v = s + j_end;
        while parent[v] != usize::MAX {
            let u = parent[v];
            if u < s {
                flow[u * t + (v - s)] += bottleneck;
            } else {
                flow[v * t + (u - s)] -= bottleneck;
            }
            v = u;
        }
        supply[origin] -= bottleneck;
        demand[j_end] -= bottleneck;
    }
    let entries: Vec<((usize, usize), f64)> = (0..s)
        .flat_map(|i| (0..t).map(move |j| (i, j)))
        .filter(|&(i, j)| flow[i * t + j] > 0.0)
        .map(|(i, j)| ((src[i], dst[j]), flow[i * t + j]))
        .collect();
    let mut plan = TransportPlan::from_entries(states, entries, p);
    // Dual feasibility after shifting sink potentials so that every reduced
    // cost is nonnegative.
    let mut shift = 0.0f64;
    for i in 0..s {
        for j in 0..t {
            shift = shift.max(-(c[i * t + j] + pot[i] - pot[s + j]));
        }
    }
    let dual: CompensatedSum = (0..t)
        .map(|j| nu[dst[j]] * (pot[s + j] - shift))
        .chain((0..s).map(|i| -mu[src[i]] * pot[i]))
        .collect();
    plan.dual_gap = Some(plan.cost - dual.value());
    Ok((plan.cost.max(0.0).powf(1.0 / p), plan))
}

/// Plan obtained by filling cells greedily in the given orders of source and
/// target states.
pub fn northwest_plan(states: &[Configuration], mu: &[f64], nu: &[f64], src_order: &[usize], dst_order: &[usize], p: f64) -> TransportPlan {
    let mut a = mu.to_vec();
    let mut b = nu.to_vec();
    let mut entries = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < src_order.len() && y < dst_order.len() {
        let (i, j) = (src_order[x], dst_order[y]);
        let m = a[i].min(b[j]);
        if m > 0.0 {
            entries.push(((i, j), m));
        }
        a[i] -= m;
        b[j] -= m;
        if a[i] <= MASS_EPS {
            x += 1;
        }
        if b[j] <= MASS_EPS {
            y += 1;
        }
    }
    TransportPlan::from_entries(states, entries, p)
}

/// `μ̄_t = (1 − tΣc)δ_η + tΣ c(η,γ)δ_{γη}`.
pub fn one_jump_law(gen: &Generator, state: usize, t: f64) -> Result<DiscreteLaw> {
    if state >= gen.n_states() {
        return Err(Error::Domain(format!("state {state} out of range")));
    }
    let exit = gen.exit_rate(state);
    let total: f64 = gen.rates_row(state).iter().sum();
    if !(t >= 0.0) || t * total > 1.0 {
        return Err(Error::TimeTooLarge { t, limit: 1.0 / total });
    }
    let mut w = vec![0.0; gen.n_states()];
    w[state] = 1.0 - t * exit;
    for k in 0..gen.n_moves() {
        let r = gen.rate(state, k);
        let j = gen.target(state, k);
        if r > 0.0 && j != state {
            w[j] += t * r;
        }
    }
    Ok(DiscreteLaw { weights: w })
}

/// Explicit optimal plan between the one-jump laws started at `η` and at
/// `γᵢ⁺η`.
pub fn neighbor_optimal_coupling(model: &ModelInstance, state: usize, i: usize, t: f64) -> Result<TransportPlan> {
    let gen = &model.generator;
    let tables = model
        .kappa
        .irw
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("neighbor coupling needs an interacting random walk".into()))?;
    let d = tables.d;
    if i >= d || state >= gen.n_states() {
        return Err(Error::Domain(format!("pair ({state}, {i}) out of range")));
    }
    let inc = Move::Inc(i);
    let dec = Move::Dec(i);
    let xi = gen.target_of(state, inc);
    if xi == state {
        return Err(Error::Domain(format!("state {state} is on the boundary in direction {i}")));
    }
    let kp = tables.kappa_plus[state * d + i];
    let km = tables.kappa_minus[state * d + i];
    if kp < -1e-12 || km < -1e-12 {
        return Err(Error::HypothesisViolation {
            hypothesis: "nonnegative kappa+ + kappa-".into(),
            detail: format!("kappa+ = {kp:.6e}, kappa- = {km:.6e} at state {state}, i = {i}"),
        });
    }
    let mu_bar = one_jump_law(gen, state, t)?;
    one_jump_law(gen, xi, t)?;
    let stay = mu_bar.weights[state] - t * km;
    if stay < 0.0 {
        return Err(Error::TimeTooLarge { t, limit: 1.0 / (gen.exit_rate(state) + km) });
    }
    let mut entries = vec![((state, xi), stay)];
    for (k, &g) in gen.moves().iter().enumerate() {
        let a = gen.rate(state, k);
        let b = gen.rate(xi, k);
        entries.push(((gen.target(state, k), gen.target(xi, k)), t * a.min(b)));
        if g == inc || g == dec {
            continue;
        }
        let grad = b - a;
        entries.push(((xi, gen.target(xi, k)), t * grad.max(0.0)));
        entries.push(((gen.target(state, k), state), t * (-grad).max(0.0)));
    }
    entries.push(((xi, xi), t * kp));
    entries.push(((state, state), t * km));
    // Identity moves land on the same cell; merge duplicates.
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    let mut merged: Vec<((usize, usize), f64)> = Vec::new();
    for e in entries {
        match merged.last_mut() {
            Some(last) if last.0 == e.0 => last.1 += e.1,
            _ => merged.push(e),
        }
    }
    Ok(TransportPlan::from_entries(gen.states(), merged, 1.0))
}

/// Recomputes the plan's cost at another order `p`.
pub fn plan_cost(states: &[Configuration], plan: &TransportPlan, p: f64) -> f64 {
    plan.entries.iter().map(|&((i, j), m)| m * cost(&states[i], &states[j], p)).collect::<CompensatedSum>().value()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub passed: bool,
    /// `(η', η'', ξ', ξ'')` with the largest violation.
    pub violation: Option<[usize; 4]>,
    pub worst_excess: f64,
}

/// Checks `d^p(η',η'') + d^p(ξ',ξ'') ≤ d^p(ξ',η'') + d^p(η',ξ'')` for all
/// pairs of support points.
pub fn check_cyclical_monotonicity(states: &[Configuration], plan: &TransportPlan, p: f64) -> Result<MonotonicityReport> {
    if plan.entries.len() > 1000 {
        return Err(Error::Domain(format!("plan support {} exceeds 1000 pairs", plan.entries.len())));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut violation = None;
    for &((a, b), _) in &plan.entries {
        for &((x, y), _) in &plan.entries {
            let lhs = cost(&states[a], &states[b], p) + cost(&states[x], &states[y], p);
            let rhs = cost(&states[x], &states[b], p) + cost(&states[a], &states[y], p);
            let excess = lhs - rhs;
            if excess > worst {
                worst = excess;
                if excess > 1e-12 {
                    violation = Some([a, b, x, y]);
                }
            }
        }
    }
    Ok(MonotonicityReport { passed: violation.is_none(), violation, worst_excess: worst.max(0.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionRow {
    pub t: f64,
    pub wp: f64,
    pub bound: f64,
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport {
    pub p: f64,
    pub kappa: f64,
    pub w0: f64,
    pub rows: Vec<ContractionRow>,
    /// `−p` times the slope of `log W_p(μ_t, ν_t)` against `t`.
    pub kappa_emp: Option<f64>,
    pub max_boundary_mass: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionOptions {
    /// Largest mass allowed on states touching the box wall.
    pub leak_tol: f64,
    pub evolve_tol: f64,
}

impl Default for ContractionOptions {
    fn default() -> Self {
        ContractionOptions { leak_tol: 1e-6, evolve_tol: 1e-12 }
    }
}

/// Evolves both laws and compares `W_p(μ_t,ν_t)` with
/// `e^{−κt/p} W_p(μ,ν)` for the model's constant.
pub fn contraction_check(
    model: &ModelInstance,
    mu: &DiscreteLaw,
    nu: &DiscreteLaw,
    p: f64,
    t_grid: &[f64],
    opts: &ContractionOptions,
) -> Result<ContractionReport> {
    let gen = &model.generator;
    let lattice = model.lattice.ok_or_else(|| Error::InvalidParams("contraction check needs a box model".into()))?;
    let states = gen.states();
    let boundary: Vec<bool> = states.iter().map(|s| s.iter().any(|&x| x as usize >= lattice.n)).collect();
    let kappa = model.kappa.kappa;
    let (w0, _) = wasserstein_p(states, mu.weights(), nu.weights(), p)?;
    let results: Vec<Result<(f64, f64)>> = t_grid
        .par_iter()
        .map(|&t| {
            let a = DiscreteLaw::new(evolve_law(gen, mu.weights(), t, opts.evolve_tol)?)?;
            let b = DiscreteLaw::new(evolve_law(gen, nu.weights(), t, opts.evolve_tol)?)?;
            let leak = a
                .weights()
                .iter()
                .zip(b.weights())
                .zip(&boundary)
                .filter(|(_, &on)| on)
                .map(|((x, y), _)| x.max(*y))
                .sum::<f64>();
            let (w, _) = wasserstein_p(states, a.weights(), b.weights(), p)?;
            Ok((w, leak))
        })
        .collect();
    let mut rows = Vec::with_capacity(t_grid.len());
    let mut max_leak = 0.0f64;
    for (&t, r) in t_grid.iter().zip(results) {
        let (wp, leak) = r?;
        max_leak = max_leak.max(leak);
        let bound = (-kappa * t / p).exp() * w0;
        let ratio = if bound > 0.0 { wp / bound } else if wp == 0.0 { 0.0 } else { f64::INFINITY };
        rows.push(ContractionRow { t, wp, bound, ratio, passed: wp <= bound * (1.0 + 1e-6) + 1e-12 });
    }
    if max_leak > opts.leak_tol {
        return Err(Error::MassLeak { leak: max_leak });
    }
    let fit: Vec<(f64, f64)> = rows.iter().filter(|r| r.wp > 1e-300).map(|r| (r.t, r.wp.ln())).collect();
    let kappa_emp = (fit.len() >= 2).then(|| {
        let (x, y): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
        -p * linear_fit(&x, &y).1
    });
    let passed = rows.iter().all(|r| r.passed);
    Ok(ContractionReport { p, kappa, w0, rows, kappa_emp, max_boundary_mass: max_leak, passed })
}

/// `(W_p^p(μ_t, ν_t) − 1)/t` for the Dirac pair at `η` and `γᵢ⁺η`, with the
/// true evolution; tends to `−(κ⁺ + κ⁻)` as `t → 0`.
pub fn neighbor_slope(model: &ModelInstance, state: usize, i: usize, p: f64, t: f64) -> Result<f64> {
    let gen = &model.generator;
    let xi = gen.target_of(state, Move::Inc(i));
    if xi == state {
        return Err(Error::Domain(format!("state {state} is on the boundary in direction {i}")));
    }
    let n = gen.n_states();
    let a = evolve_law(gen, DiscreteLaw::dirac(n, state).weights(), t, 1e-14)?;
    let b = evolve_law(gen, DiscreteLaw::dirac(n, xi).weights(), t, 1e-14)?;
    let (w, _) = wasserstein_p(gen.states(), &a, &b, p)?;
    Ok((w.powf(p) - 1.0) / t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::build_generator;
    use crate::models::{build_irw, Potential};
    use approx::assert_abs_diff_eq;

    fn line(n: i32) -> Vec<Configuration> {
        (0..=n).map(|k| vec![k]).collect()
    }

    #[test]
    fn distances() {
        assert_eq!(graph_distance(&[0, 0], &[1, 2]).unwrap(), 3);
        assert_eq!(graph_distance(&[4, 1], &[4, 1]).unwrap(), 0);
        assert!(graph_distance(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn two_point_law_on_a_line() {
        let s = line(2);
        let mu = [0.5, 0.0, 0.5];
        let nu = [0.0, 1.0, 0.0];
        for p in [1.0, 2.0] {
            let (w, plan) = wasserstein_p(&s, &mu, &nu, p).unwrap();
            assert_abs_diff_eq!(w, 1.0, epsilon = 1e-12);
            assert!(plan.marginal_residual(&mu, &nu) < 1e-12);
            assert!(plan.dual_gap.unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn identical_laws_and_translation() {
        let s = line(4);
        let mu = [0.1, 0.2, 0.3, 0.4, 0.0];
        let (w, plan) = wasserstein_p(&s, &mu, &mu, 2.0).unwrap();
        assert_eq!(w, 0.0);
        assert!(plan.entries.iter().all(|e| e.0 .0 == e.0 .1));
        let a = DiscreteLaw::dirac(5, 1);
        let b = DiscreteLaw::dirac(5, 2);
        for p in [1.0, 1.5, 3.0] {
            assert_abs_diff_eq!(wasserstein_p(&s, a.weights(), b.weights(), p).unwrap().0, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn infeasible_marginals() {
        let s = line(1);
        assert!(matches!(wasserstein_p(&s, &[1.0, 0.0], &[0.5, 0.0], 1.0), Err(Error::InfeasibleMarginals { .. })));
    }

    #[test]
    fn one_jump_on_flip_chain() {
        let g = build_generator(vec![vec![-1], vec![1]], vec![Move::Flip(0)], |_, _| 1.0).unwrap();
        let law = one_jump_law(&g, 0, 0.3).unwrap();
        assert_abs_diff_eq!(law.weights()[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(law.weights()[1], 0.3, epsilon = 1e-15);
        assert_eq!(one_jump_law(&g, 0, 0.0).unwrap().weights(), &[1.0, 0.0]);
        assert!(matches!(one_jump_law(&g, 0, 2.0), Err(Error::TimeTooLarge { .. })));
    }

    #[test]
    fn poisson_neighbor_plan() {
        let m = build_irw(&Potential::Zero, &Potential::Poisson { lambda: 1.0 }, 1, 8).unwrap();
        let plan = neighbor_optimal_coupling(&m, 2, 0, 0.1).unwrap();
        let s = m.generator.states();
        for p in [1.0, 2.0, 4.0] {
            assert_abs_diff_eq!(plan_cost(s, &plan, p), 0.9, epsilon = 1e-12);
        }
        let mu = one_jump_law(&m.generator, 2, 0.1).unwrap();
        let nu = one_jump_law(&m.generator, 3, 0.1).unwrap();
        assert!(plan.marginal_residual(mu.weights(), nu.weights()) < 1e-15);
        let (w, _) = wasserstein_p(s, mu.weights(), nu.weights(), 2.0).unwrap();
        assert_abs_diff_eq!(w * w, 0.9, epsilon = 1e-12);
        assert!(check_cyclical_monotonicity(s, &plan, 2.0).unwrap().passed);
    }

    #[test]
    fn crossed_plan_is_not_monotone() {
        let s = line(3);
        let plan = TransportPlan::from_entries(&s, vec![((0, 3), 0.5), ((3, 0), 0.5)], 1.0);
        let rep = check_cyclical_monotonicity(&s, &plan, 1.0).unwrap();
        assert!(!rep.passed);
        assert!(rep.violation.is_some());
        let diag = TransportPlan::from_entries(&s, vec![((0, 0), 0.5), ((3, 3), 0.5)], 1.0);
        assert!(check_cyclical_monotonicity(&s, &diag, 1.0).unwrap().passed);
    }

    #[test]
    fn law_normalization() {
        assert!(DiscreteLaw::new(vec![0.5, 0.5 - 1e-12]).is_ok());
        assert!(matches!(DiscreteLaw::new(vec![0.5, 0.4]), Err(Error::MassLeak { .. })));
    }
}
