//! Glauber dynamics for spin systems on `{−1, 1}^N`.

use serde::Serialize;

use super::{binary_states, validate_graph, Implied, KappaReport, ModelInstance, SeedBuilder};
use crate::chain::{build_generator, Generator, Measure, Move};
use crate::coupling::CouplingRates;
use crate::models::Family;
use crate::{Error, Result};

/// `κ(η,σ) = c(ση,σ) − Σ_{γ≠σ} max{−∇_σ c(η,γ), 0}`.
pub fn spin_kappa(gen: &Generator, s: usize, k: usize) -> f64 {
    let t = gen.target(s, k);
    let mut v = gen.rate(t, k);
    for g in 0..gen.n_moves() {
        if g != k {
            v -= (gen.rate(s, g) - gen.rate(t, g)).max(0.0);
        }
    }
    v
}

/// Exhaustive `(inf κ(η,σ) + κ(ση,σ), inf κ(η,σ))` over all pairs.
pub fn exhaustive_spin_constants(gen: &Generator) -> (f64, f64) {
    let mut kappa = f64::INFINITY;
    let mut bar = f64::INFINITY;
    for s in 0..gen.n_states() {
        for k in 0..gen.n_moves() {
            let a = spin_kappa(gen, s, k);
            let b = spin_kappa(gen, gen.target(s, k), k);
            kappa = kappa.min(a + b);
            bar = bar.min(a);
        }
    }
    (kappa, bar)
}

fn spin_coupling(gen: &Generator) -> CouplingRates {
    let moves = gen.moves().to_vec();
    let mut seeds = Vec::new();
    for s in 0..gen.n_states() {
        for (k, &sigma) in moves.iter().enumerate() {
            if gen.rate(s, k) <= 0.0 {
                continue;
            }
            let t = gen.target(s, k);
            let mut b = SeedBuilder::default();
            for (g, &gamma) in moves.iter().enumerate() {
                if g == k {
                    continue;
                }
                let grad = gen.rate(t, g) - gen.rate(s, g);
                b.add(gamma, gamma, gen.rate(s, g).min(gen.rate(t, g)));
                if grad < 0.0 {
                    b.add(gamma, sigma, -grad);
                }
                if grad > 0.0 {
                    b.add(sigma, gamma, grad);
                }
            }
            b.add(sigma, Move::Null, spin_kappa(gen, t, k));
            b.add(Move::Null, sigma, spin_kappa(gen, s, k));
            seeds.push(b.finish(s, sigma));
        }
    }
    CouplingRates::new(seeds)
}

/// Glauber dynamics with rates `exp(−(β/2)∇_σH)` and the Gibbs measure.
pub fn build_glauber(n: usize, hamiltonian: &dyn Fn(&[i32]) -> f64, beta: f64) -> Result<ModelInstance> {
    if n == 0 || n > 20 {
        return Err(Error::InvalidParams(format!("number of spins must be in 1..=20, got {n}")));
    }
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {beta}")));
    }
    let states = binary_states(n, -1, 1);
    let moves: Vec<Move> = (0..n).map(Move::Flip).collect();
    let gen = build_generator(states, moves, |eta, mv| {
        let img = mv.apply(eta).expect("flip applies");
        (-0.5 * beta * (hamiltonian(&img) - hamiltonian(eta))).exp()
    })?;
    let log_w: Vec<f64> = gen.states().iter().map(|s| -beta * hamiltonian(s)).collect();
    let measure = Measure::from_log_weights(&log_w)?;
    let coupling = spin_coupling(&gen);
    let (kappa, bar) = exhaustive_spin_constants(&gen);
    let mut rep = KappaReport::new(kappa, Some(bar), spin_implied(kappa, bar));
    if bar < -1e-12 {
        rep.fail(format!("nonnegative single-site curvature: min kappa(eta, sigma) = {bar:.6e} < 0"));
    }
    Ok(ModelInstance {
        family: Family::Glauber,
        label: format!("glauber N={n} beta={beta}"),
        generator: gen,
        measure,
        coupling,
        kappa: rep,
        lattice: None,
    })
}

fn spin_implied(kappa: f64, bar: f64) -> Implied {
    Implied { kappa_phi: kappa, kappa_1: kappa + 2.0 * bar, alpha_slope: kappa, alpha_offset: 0.0 }
}

/// Closed forms of the mean-field model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurieWeiss {
    pub n: usize,
    pub beta: f64,
}

impl CurieWeiss {
    fn q(&self) -> f64 {
        (2.0 * self.beta / self.n as f64).exp_m1()
    }

    /// `κ(η,σᵢ) + κ(σᵢη,σᵢ)` when `m` other spins agree with `ηᵢ`.
    pub fn f_cw(&self, m: usize) -> f64 {
        let (nf, mf) = (self.n as f64, m as f64);
        let e = self.beta / nf * (nf - 1.0 - 2.0 * mf);
        (-e).exp() * (1.0 - (nf - 1.0 - mf) * self.q()) + e.exp() * (1.0 - mf * self.q())
    }

    /// `κ(η,σᵢ)` when `m` other spins agree with `ηᵢ`.
    pub fn single(&self, m: usize) -> f64 {
        let (nf, mf) = (self.n as f64, m as f64);
        (-self.beta / nf * (nf - 1.0 - 2.0 * mf)).exp() * (1.0 - (nf - 1.0 - mf) * self.q())
    }

    pub fn kappa(&self) -> f64 {
        self.f_cw((self.n - 1) / 2)
    }

    /// Minimum of `f_cw` over `m ∈ {0..N−1}` with its argmin.
    pub fn kappa_scan(&self) -> (f64, usize) {
        (0..self.n).map(|m| (self.f_cw(m), m)).fold((f64::INFINITY, 0), |a, b| if b.0 < a.0 { b } else { a })
    }

    /// `e^{−β(N−1)/N}[1 − (N−1)(e^{2β/N} − 1)]`, the value of `κ(η,σᵢ)` at `m = 0`.
    pub fn kappa_bar(&self) -> f64 {
        self.single(0)
    }

    /// The same expression with `1 − e^{2β/N}` in place of `e^{2β/N} − 1`.
    pub fn kappa_bar_flipped_sign(&self) -> f64 {
        let nf = self.n as f64;
        (-self.beta * (nf - 1.0) / nf).exp() * (1.0 + (nf - 1.0) * self.q())
    }

    /// `2(1 − ((N−1)/2)(e^{2β/N} − 1))`, defined for odd `N`.
    pub fn midpoint_closed_form(&self) -> Option<f64> {
        (self.n % 2 == 1).then(|| 2.0 * (1.0 - (self.n as f64 - 1.0) / 2.0 * self.q()))
    }

    /// `1 − (N−1)(e^{2β/N} − 1)`; the hypothesis holds iff this is `≥ 0`.
    pub fn condition_margin(&self) -> f64 {
        1.0 - (self.n as f64 - 1.0) * self.q()
    }

    /// Largest `β` satisfying the hypothesis: `(N/2) ln(N/(N−1))`.
    pub fn critical_beta(n: usize) -> f64 {
        let nf = n as f64;
        if n < 2 {
            f64::INFINITY
        } else {
            nf / 2.0 * (nf / (nf - 1.0)).ln()
        }
    }

    pub fn hamiltonian(n: usize) -> impl Fn(&[i32]) -> f64 {
        move |eta: &[i32]| {
            let s: i32 = eta.iter().sum();
            -((s * s) as f64) / (2.0 * n as f64)
        }
    }
}

pub fn curie_weiss(n: usize, beta: f64) -> Result<(ModelInstance, CurieWeiss)> {
    if n < 2 {
        return Err(Error::InvalidParams("Curie-Weiss needs N >= 2".into()));
    }
    let mut inst = build_glauber(n, &CurieWeiss::hamiltonian(n), beta)?;
    let cw = CurieWeiss { n, beta };
    let (ex_kappa, ex_bar) = (inst.kappa.kappa, inst.kappa.kappa_bar.unwrap_or(f64::NAN));
    let mut rep = KappaReport::new(cw.kappa(), Some(cw.kappa_bar()), spin_implied(cw.kappa(), cw.kappa_bar()));
    rep.detail("exhaustive_kappa", ex_kappa);
    rep.detail("exhaustive_kappa_bar", ex_bar);
    rep.detail("m_scan_kappa", cw.kappa_scan().0);
    rep.detail("kappa_bar_flipped_sign", cw.kappa_bar_flipped_sign());
    rep.detail("condition_margin", cw.condition_margin());
    if let Some(x) = cw.midpoint_closed_form() {
        rep.detail("midpoint_closed_form", x);
    }
    if cw.condition_margin() < 0.0 {
        rep.fail(format!("(N-1)(exp(2beta/N)-1) <= 1 fails: margin {:.6e}", cw.condition_margin()));
    }
    if let Some(f) = inst.kappa.failed_hypothesis.take() {
        rep.fail(f);
    }
    inst.kappa = rep;
    inst.family = Family::CurieWeiss;
    inst.label = format!("curie_weiss N={n} beta={beta}");
    Ok((inst, cw))
}

/// Ferromagnetic Ising model `H = −Σ_{edges} η_x η_y` on a graph of maximum
/// degree `≤ 2d`.
pub fn ising(adj: &[Vec<usize>], d: usize, beta: f64) -> Result<ModelInstance> {
    validate_graph(adj)?;
    if d == 0 {
        return Err(Error::InvalidParams("lattice dimension d must be at least 1".into()));
    }
    if let Some((x, nb)) = adj.iter().enumerate().find(|(_, nb)| nb.len() > 2 * d) {
        return Err(Error::InvalidParams(format!("vertex {x} has degree {} > 2d = {}", nb.len(), 2 * d)));
    }
    let edges: Vec<(usize, usize)> =
        adj.iter().enumerate().flat_map(|(x, nb)| nb.iter().filter(move |&&y| y > x).map(move |&y| (x, y))).collect();
    let h = move |eta: &[i32]| -edges.iter().map(|&(x, y)| (eta[x] * eta[y]) as f64).sum::<f64>();
    let mut inst = build_glauber(adj.len(), &h, beta)?;
    let (kappa, bar, margin) = ising_closed_forms(d, beta);
    let mut rep = KappaReport::new(kappa, Some(bar), spin_implied(kappa, bar));
    rep.detail("exhaustive_kappa", inst.kappa.kappa);
    rep.detail("exhaustive_kappa_bar", inst.kappa.kappa_bar.unwrap_or(f64::NAN));
    rep.detail("condition_margin", margin);
    if margin < 0.0 {
        rep.fail(format!("2d(1-exp(-2beta))exp(4d beta) <= 1 fails: margin {margin:.6e}"));
    }
    if let Some(f) = inst.kappa.failed_hypothesis.take() {
        rep.fail(f);
    }
    inst.kappa = rep;
    inst.family = Family::Ising;
    inst.label = format!("ising |V|={} d={d} beta={beta}", adj.len());
    Ok(inst)
}

/// `(κ, κ̄, 1 − 2d(1−e^{−2β})e^{4dβ})`.
pub fn ising_closed_forms(d: usize, beta: f64) -> (f64, f64, f64) {
    let df = d as f64;
    let a = 2.0 * df * (-(-2.0 * beta).exp_m1());
    let kappa = 2.0 - a * (2.0 * beta * df).exp();
    let bar = (-2.0 * beta * df).exp() - a * (2.0 * beta * df).exp();
    (kappa, bar, 1.0 - a * (4.0 * df * beta).exp())
}

/// Largest `β` with `2d(1−e^{−2β})e^{4dβ} ≤ 1`, by bisection.
pub fn ising_critical_beta(d: usize) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ising_closed_forms(d, mid).2 >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::check_reversibility;
    use crate::coupling::check_admissible;
    use crate::models::cycle_graph;
    use approx::assert_abs_diff_eq;

    #[test]
    fn infinite_temperature_constants() {
        let m = build_glauber(4, &CurieWeiss::hamiltonian(4), 0.0).unwrap();
        assert_abs_diff_eq!(m.kappa.kappa, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.kappa.kappa_bar.unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.kappa.implied.kappa_1, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn single_spin_has_no_cross_terms() {
        let h = |e: &[i32]| 0.7 * e[0] as f64;
        let m = build_glauber(1, &h, 1.3).unwrap();
        for s in 0..2 {
            let t = m.generator.target(s, 0);
            assert_abs_diff_eq!(spin_kappa(&m.generator, s, 0), m.generator.rate(t, 0), epsilon = 1e-15);
        }
    }

    #[test]
    fn curie_weiss_matches_enumeration() {
        for n in 3..=5 {
            let beta = 0.8 * CurieWeiss::critical_beta(n);
            let (m, cw) = curie_weiss(n, beta).unwrap();
            assert!(m.kappa.hypotheses_ok);
            assert_abs_diff_eq!(m.kappa.details["exhaustive_kappa"], cw.kappa(), epsilon = 1e-12);
            assert_abs_diff_eq!(cw.kappa_scan().0, cw.kappa(), epsilon = 1e-12);
            assert!(m.kappa.details["exhaustive_kappa_bar"] >= cw.kappa_bar() - 1e-12);
            assert!(check_reversibility(&m.generator, &m.measure).unwrap().passed);
            assert!(check_admissible(&m.coupling, &m.generator).unwrap().passed);
        }
    }

    #[test]
    fn curie_weiss_pairs_follow_agreement_count() {
        let (m, cw) = curie_weiss(3, 0.2).unwrap();
        let g = &m.generator;
        for s in 0..g.n_states() {
            let eta = g.state(s);
            for i in 0..3 {
                let agree = (0..3).filter(|&j| j != i && eta[i] * eta[j] == 1).count();
                let sum = spin_kappa(g, s, i) + spin_kappa(g, g.target(s, i), i);
                assert_abs_diff_eq!(sum, cw.f_cw(agree), epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn curie_weiss_odd_midpoint() {
        let cw = CurieWeiss { n: 5, beta: 0.2 };
        let want = 2.0 * (1.0 - 2.0 * (0.08f64.exp() - 1.0));
        assert_abs_diff_eq!(cw.kappa(), want, epsilon = 1e-14);
        assert_abs_diff_eq!(cw.midpoint_closed_form().unwrap(), want, epsilon = 1e-14);
    }

    #[test]
    fn flipped_sign_overshoots_enumeration() {
        let (m, cw) = curie_weiss(4, 0.3).unwrap();
        assert!(cw.kappa_bar_flipped_sign() > m.kappa.details["exhaustive_kappa_bar"] + 1e-3);
    }

    #[test]
    fn ising_cycle_respects_closed_forms() {
        let m = ising(&cycle_graph(4), 1, 0.05).unwrap();
        assert!(m.kappa.hypotheses_ok);
        assert!(m.kappa.details["exhaustive_kappa"] >= m.kappa.kappa - 1e-12);
        assert!(m.kappa.details["exhaustive_kappa_bar"] >= m.kappa.kappa_bar.unwrap() - 1e-12);
        assert!(check_reversibility(&m.generator, &m.measure).unwrap().passed);
        assert!(check_admissible(&m.coupling, &m.generator).unwrap().passed);
    }

    #[test]
    fn ising_boundary_bar_kappa_nonnegative() {
        let b = ising_critical_beta(1);
        let (_, bar, margin) = ising_closed_forms(1, b);
        assert!(margin.abs() < 1e-12);
        assert!(bar >= 0.0);
        let (k, kb, _) = ising_closed_forms(3, 0.0);
        assert_eq!((k, kb), (2.0, 1.0));
    }

    #[test]
    fn ising_rejects_bad_graphs() {
        assert!(ising(&[vec![0]], 1, 0.1).is_err());
        let star = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
        assert!(matches!(ising(&star, 1, 0.1), Err(Error::InvalidParams(_))));
        assert!(ising(&star, 2, 0.1).is_ok());
    }
}
