//! The individual verification suites. Each returns its CSV table, a
//! pass flag and a few summary numbers; file handling lives in `run`.

use std::collections::BTreeMap;

use entrolab::chain::{check_reversibility, communicating_classes, evolve_law, stationarity_residual};
use entrolab::coupling::{
    check_admissible, matched_move_sum, non_merging_sum, verify_sufficient_condition, Organizer,
};
use entrolab::entropy::{
    check_phi_inequalities, csi_check, decay_curve, estimate_best_constant, fd_agrees, fit_decay_rate, phi_entropy,
    second_derivative_fd, BestConstantOptions, FD_STEP,
};
use entrolab::models::{Family, ModelInstance};
use entrolab::sampling::random_positive_function;
use entrolab::transport::{contraction_check, neighbor_slope, wasserstein_p, ContractionOptions, DiscreteLaw};
use entrolab::{Move, Phi, Result};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::Suite;

pub const INEQUALITY_ALPHAS: [f64; 5] = [1.0, 1.25, 1.5, 1.75, 2.0];
pub const INEQUALITY_SAMPLES: usize = 10_000;
pub const DECAY_DRAWS: usize = 50;
pub const CONVEXITY_DRAWS: usize = 100;
pub const CANCELLATION_DRAWS: usize = 100;
pub const SUFFICIENT_DRAWS: usize = 200;
pub const DECAY_TOL: f64 = 1e-10;
/// Longest time used for transport checks; beyond it mass reaches the box wall.
pub const TRANSPORT_T_MAX: f64 = 0.5;
const TRANSPORT_DEFAULT_GRID: [f64; 3] = [0.05, 0.1, 0.2];
const SLOPE_TIMES: [f64; 2] = [1e-2, 1e-3];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(u64),
    S(String),
    B(bool),
    Empty,
}

impl Cell {
    /// Floats use 17 significant digits.
    pub fn render(&self) -> String {
        match self {
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(k) => k.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

fn s(text: impl ToString) -> Cell {
    Cell::S(text.to_string())
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOutput {
    pub passed: bool,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<String, f64>,
    pub witness: Option<Value>,
    pub note: Option<String>,
}

pub struct Ctx<'a> {
    pub model: &'a ModelInstance,
    pub phis: &'a [Phi],
    pub samples: usize,
    pub seed: u64,
    pub t_grid: &'a [f64],
}

impl Ctx<'_> {
    fn kappa_for(&self, phi: &Phi) -> f64 {
        self.model.kappa.implied.for_phi(phi)
    }

    fn draw(&self, d: u64) -> Vec<f64> {
        random_positive_function(self.model.generator.n_states(), self.seed, d)
    }
}

/// Frozen CSV header of each suite.
pub fn columns(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Reversibility | Suite::Admissibility => &["check", "value", "tolerance", "passed"],
        Suite::Constants => &["quantity", "phi", "value"],
        Suite::Csi => &["phi", "draw", "entropy", "dirichlet", "kappa", "slack", "passed"],
        Suite::Decay => &["phi", "draw", "t", "entropy", "bound", "passed"],
        Suite::Convexity => {
            &["phi", "draw", "organized", "finite_difference", "bound", "min_convexity_slack", "passed"]
        }
        Suite::PhiInequalities => {
            &["alpha", "samples", "min_hessian_ratio", "min_beckner_slack", "min_mlsi_slack", "failures", "passed"]
        }
        Suite::Cancellation => &["sum", "phi", "draw", "value", "scale", "passed"],
        Suite::Wasserstein => &["kind", "p", "t", "value", "reference", "ratio", "passed"],
    }
}

pub fn run_suite(suite: Suite, ctx: &Ctx) -> Result<SuiteOutput> {
    match suite {
        Suite::Reversibility => reversibility(ctx),
        Suite::Admissibility => admissibility(ctx),
        Suite::Constants => constants(ctx),
        Suite::Csi => csi(ctx),
        Suite::Decay => decay(ctx),
        Suite::Convexity => convexity(ctx),
        Suite::PhiInequalities => phi_inequalities(ctx),
        Suite::Cancellation => cancellation(ctx),
        Suite::Wasserstein => wasserstein(ctx),
    }
}

fn check_row(name: &str, value: f64, tol: f64, passed: bool) -> Vec<Cell> {
    vec![s(name), Cell::F(value), Cell::F(tol), Cell::B(passed)]
}

fn reversibility(ctx: &Ctx) -> Result<SuiteOutput> {
    let (gen, m) = (&ctx.model.generator, &ctx.model.measure);
    let rev = check_reversibility(gen, m)?;
    let resid = stationarity_residual(gen, m);
    let classes = communicating_classes(gen);
    let resid_ok = resid <= 1e-10;
    let mut out = SuiteOutput {
        passed: rev.passed && resid_ok && classes == 1,
        rows: vec![
            check_row("detailed_balance", rev.max_violation, entrolab::chain::DETAILED_BALANCE_TOL, rev.passed),
            check_row("stationarity_residual", resid, 1e-10, resid_ok),
            check_row("communicating_classes", classes as f64, 1.0, classes == 1),
        ],
        ..Default::default()
    };
    out.summary.insert("max_violation".into(), rev.max_violation);
    if let Some((i, mv, j)) = rev.worst {
        out.witness = Some(json!({"source": gen.state(i), "move": mv.tag(), "target": gen.state(j)}));
    }
    Ok(out)
}

fn admissibility(ctx: &Ctx) -> Result<SuiteOutput> {
    let gen = &ctx.model.generator;
    let rep = check_admissible(&ctx.model.coupling, gen)?;
    let tol = 1e-12;
    let mut out = SuiteOutput {
        passed: rep.passed,
        rows: vec![
            check_row("row_marginal", rep.max_row_violation, tol, rep.max_row_violation <= tol),
            check_row("column_marginal", rep.max_col_violation, tol, rep.max_col_violation <= tol),
            check_row("missing_seeds", rep.missing_seeds as f64, 0.0, rep.missing_seeds == 0),
        ],
        ..Default::default()
    };
    out.summary.insert("max_row_violation".into(), rep.max_row_violation);
    out.summary.insert("max_col_violation".into(), rep.max_col_violation);
    if let Some((i, mv)) = rep.worst_seed {
        out.witness = Some(json!({"state": gen.state(i), "move": mv.tag()}));
    }
    Ok(out)
}

fn rel_tol(x: f64, rel: f64) -> f64 {
    rel * x.abs().max(1.0)
}

fn constants(ctx: &Ctx) -> Result<SuiteOutput> {
    let m = ctx.model;
    let k = &m.kappa;
    let mut out = SuiteOutput { passed: true, ..Default::default() };
    let mut rows = Vec::new();
    let mut row = |q: &str, phi: &str, v: f64| rows.push(vec![s(q), s(phi), Cell::F(v)]);
    row("kappa", "", k.kappa);
    if let Some(b) = k.kappa_bar {
        row("kappa_bar", "", b);
    }
    for (key, v) in &k.details {
        row(&format!("detail.{key}"), "", *v);
    }
    let suff = match verify_sufficient_condition(
        &m.generator,
        &m.measure,
        &m.coupling,
        ctx.phis,
        ctx.samples.min(SUFFICIENT_DRAWS),
        ctx.seed,
    ) {
        Ok(r) => Some(r),
        Err(e) if !k.hypotheses_ok => {
            out.note = Some(format!("coupling constants not extracted: {e}"));
            None
        }
        Err(e) => return Err(e),
    };
    if let Some(r) = &suff {
        row("kappa_pp", "", r.kappa_pp);
        row("kappa_ppp", "", r.kappa_ppp);
    }
    let opts = BestConstantOptions { seed: ctx.seed, ..Default::default() };
    let fits = m.generator.n_states() <= opts.max_states;
    let best: Vec<Option<_>> = ctx
        .phis
        .par_iter()
        .map(|phi| fits.then(|| estimate_best_constant(&m.generator, &m.measure, phi, &opts)).transpose())
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    for (k, (phi, best)) in ctx.phis.iter().zip(best).enumerate() {
        let name = phi.to_string();
        let claimed = ctx.kappa_for(phi);
        row("kappa_claimed", &name, claimed);
        if let Some(sp) = suff.as_ref().map(|r| &r.per_phi[k]) {
            row("sufficient_implied", &name, sp.implied);
            if sp.implied < claimed - rel_tol(claimed, 1e-9) {
                failures.push(json!({"phi": name, "check": "sufficient_implied", "value": sp.implied, "claimed": claimed}));
            }
        }
        if let Some(b) = best {
            row("best_constant", &name, b.value);
            row("spectral_gap", &name, b.spectral_gap);
            out.summary.insert(format!("kappa_best[{name}]"), b.value);
            if b.value < claimed - rel_tol(claimed, 1e-6) {
                failures.push(json!({"phi": name, "check": "best_constant", "value": b.value, "claimed": claimed}));
            }
        }
    }
    if !fits {
        out.note = Some(format!("best-constant search skipped above {} states", opts.max_states));
    }
    out.rows = rows;
    out.summary.insert("kappa".into(), k.kappa);
    out.passed = failures.is_empty();
    out.witness = failures.into_iter().next();
    Ok(out)
}

fn jobs(ctx: &Ctx, draws: usize) -> Vec<(usize, u64)> {
    (0..ctx.phis.len()).flat_map(|p| (0..draws as u64).map(move |d| (p, d))).collect()
}

fn csi(ctx: &Ctx) -> Result<SuiteOutput> {
    let (gen, m) = (&ctx.model.generator, &ctx.model.measure);
    let reps = jobs(ctx, ctx.samples)
        .into_par_iter()
        .map(|(p, d)| {
            let phi = &ctx.phis[p];
            Ok((p, d, csi_check(gen, m, phi, ctx.kappa_for(phi), &ctx.draw(d))?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SuiteOutput { passed: true, ..Default::default() };
    let mut worst: Option<(f64, usize, u64)> = None;
    for (p, d, r) in reps {
        let name = ctx.phis[p].to_string();
        let rel = r.slack / r.dirichlet.max(1.0);
        let key = format!("min_relative_slack[{name}]");
        let e = out.summary.entry(key).or_insert(f64::INFINITY);
        *e = e.min(rel);
        if worst.is_none_or(|w| rel < w.0) {
            worst = Some((rel, p, d));
        }
        out.passed &= r.passed;
        out.rows.push(vec![
            s(&name),
            Cell::I(d),
            Cell::F(r.entropy),
            Cell::F(r.dirichlet),
            Cell::F(r.kappa),
            Cell::F(r.slack),
            Cell::B(r.passed),
        ]);
    }
    if let Some((rel, p, d)) = worst {
        out.witness = Some(json!({"phi": ctx.phis[p].to_string(), "draw": d, "seed": ctx.seed, "relative_slack": rel}));
    }
    Ok(out)
}

fn decay(ctx: &Ctx) -> Result<SuiteOutput> {
    let (gen, m) = (&ctx.model.generator, &ctx.model.measure);
    let curves = jobs(ctx, ctx.samples.min(DECAY_DRAWS))
        .into_par_iter()
        .map(|(p, d)| {
            let phi = &ctx.phis[p];
            let f = ctx.draw(d);
            let h0 = phi_entropy(&f, m, phi)?;
            Ok((p, d, h0, decay_curve(gen, m, phi, &f, ctx.t_grid, DECAY_TOL)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SuiteOutput { passed: true, ..Default::default() };
    let mut worst: Option<(f64, usize, u64, f64)> = None;
    for (p, d, h0, curve) in curves {
        let phi = &ctx.phis[p];
        let name = phi.to_string();
        let kappa = ctx.kappa_for(phi);
        for &(t, h) in &curve {
            let bound = (-kappa * t).exp() * h0;
            // Entropies of order 1e-13·H(f) are rounding noise.
            let ok = h <= bound * (1.0 + 1e-6) || h <= 1e-13 * h0;
            let ratio = if bound > 0.0 { h / bound } else { f64::INFINITY };
            if worst.is_none_or(|w| ratio > w.0) {
                worst = Some((ratio, p, d, t));
            }
            out.passed &= ok;
            out.rows.push(vec![s(&name), Cell::I(d), Cell::F(t), Cell::F(h), Cell::F(bound), Cell::B(ok)]);
        }
        if let Ok(fit) = fit_decay_rate(&curve) {
            let e = out.summary.entry(format!("kappa_decay_fit[{name}]")).or_insert(f64::INFINITY);
            *e = e.min(fit.rate);
        }
    }
    if let Some((ratio, p, d, t)) = worst {
        out.witness = Some(json!({"phi": ctx.phis[p].to_string(), "draw": d, "t": t, "ratio_to_bound": ratio}));
    }
    Ok(out)
}

fn convexity(ctx: &Ctx) -> Result<SuiteOutput> {
    let (gen, m) = (&ctx.model.generator, &ctx.model.measure);
    let org = Organizer::new(gen, m, &ctx.model.coupling)?;
    let reps = jobs(ctx, ctx.samples.min(CONVEXITY_DRAWS))
        .into_par_iter()
        .map(|(p, d)| {
            let phi = &ctx.phis[p];
            let f = ctx.draw(d);
            let dec = org.organize(phi, &f)?;
            let (fd, level) = second_derivative_fd(gen, m, phi, &f, FD_STEP)?;
            Ok((p, d, dec, fd, level))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SuiteOutput { passed: true, ..Default::default() };
    let mut worst: Option<(f64, usize, u64)> = None;
    for (p, d, dec, fd, level) in reps {
        let name = ctx.phis[p].to_string();
        let agrees = fd_agrees(dec.full_derivative, fd, level, FD_STEP);
        let bounded = dec.bound >= dec.full_derivative - 1e-12 * dec.scale.max(1.0);
        let convex = dec.min_convexity_slack >= -1e-9;
        let ok = agrees && bounded && convex;
        let rel = (dec.full_derivative - fd).abs() / dec.full_derivative.abs().max(fd.abs()).max(1e-300);
        let e = out.summary.entry("max_relative_fd_error".into()).or_insert(0.0);
        *e = e.max(rel);
        if !ok && worst.is_none() {
            worst = Some((rel, p, d));
        }
        out.passed &= ok;
        out.rows.push(vec![
            s(&name),
            Cell::I(d),
            Cell::F(dec.full_derivative),
            Cell::F(fd),
            Cell::F(dec.bound),
            Cell::F(dec.min_convexity_slack),
            Cell::B(ok),
        ]);
    }
    if let Some((rel, p, d)) = worst {
        out.witness = Some(json!({"phi": ctx.phis[p].to_string(), "draw": d, "relative_error": rel}));
    }
    Ok(out)
}

fn phi_inequalities(ctx: &Ctx) -> Result<SuiteOutput> {
    let reps = INEQUALITY_ALPHAS
        .par_iter()
        .map(|&a| check_phi_inequalities(a, INEQUALITY_SAMPLES, ctx.seed))
        .collect::<Result<Vec<_>>>()?;
    let mut out = SuiteOutput { passed: true, ..Default::default() };
    for r in reps {
        out.passed &= r.passed;
        if out.witness.is_none() {
            out.witness = r.failures.first().map(|f| json!({"alpha": r.alpha, "failure": f}));
        }
        out.summary.insert(format!("min_hessian_ratio[{}]", r.alpha), r.min_hessian_ratio);
        out.rows.push(vec![
            Cell::F(r.alpha),
            Cell::I(r.samples as u64),
            Cell::F(r.min_hessian_ratio),
            Cell::F(r.min_beckner_slack),
            r.min_mlsi_slack.map_or(Cell::Empty, Cell::F),
            Cell::I(r.failures.len() as u64),
            Cell::B(r.passed),
        ]);
    }
    Ok(out)
}

fn cancellation(ctx: &Ctx) -> Result<SuiteOutput> {
    let (gen, m) = (&ctx.model.generator, &ctx.model.measure);
    // Spin systems cancel the matched moves other than the seed move, zero
    // range cancels all matched moves, other families their non-merging terms.
    let spin = matches!(ctx.model.family, Family::CurieWeiss | Family::Ising | Family::Glauber);
    let zero_range = ctx.model.family == Family::ZeroRange;
    let kind = if spin {
        "matched_moves"
    } else if zero_range {
        "all_matched_moves"
    } else {
        "non_merging"
    };
    let sums = jobs(ctx, ctx.samples.min(CANCELLATION_DRAWS))
        .into_par_iter()
        .map(|(p, d)| {
            let phi = &ctx.phis[p];
            let f = ctx.draw(d);
            let sum = if spin || zero_range {
                matched_move_sum(gen, m, phi, &f, zero_range)?
            } else {
                non_merging_sum(gen, m, &ctx.model.coupling, phi, &f)?
            };
            Ok((p, d, sum))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = SuiteOutput { passed: true, ..Default::default() };
    for (p, d, sum) in sums {
        let rel = sum.value.abs() / sum.scale.max(1.0);
        let ok = rel <= 1e-10;
        let e = out.summary.entry("max_relative_value".into()).or_insert(0.0);
        *e = e.max(rel);
        if !ok && out.witness.is_none() {
            out.witness = Some(json!({"phi": ctx.phis[p].to_string(), "draw": d, "value": sum.value}));
        }
        out.passed &= ok;
        out.rows.push(vec![
            s(kind),
            s(&ctx.phis[p]),
            Cell::I(d),
            Cell::F(sum.value),
            Cell::F(sum.scale),
            Cell::B(ok),
        ]);
    }
    Ok(out)
}

fn transport_grid(ctx: &Ctx) -> Vec<f64> {
    let g: Vec<f64> = ctx.t_grid.iter().copied().filter(|&t| t <= TRANSPORT_T_MAX).collect();
    if g.is_empty() {
        TRANSPORT_DEFAULT_GRID.to_vec()
    } else {
        g
    }
}

fn wasserstein(ctx: &Ctx) -> Result<SuiteOutput> {
    let m = ctx.model;
    match (&m.kappa.irw, m.lattice) {
        (Some(tables), Some(lat)) => {
            if lat.n < 3 {
                return Err(entrolab::Error::InvalidParams("box size must be at least 3 for an interior pair".into()));
            }
            let gen = &m.generator;
            let a = vec![(lat.n / 3) as i32; lat.d];
            let mut b = a.clone();
            b[0] += 1;
            let ia = gen.index_of(&a).expect("interior state");
            let ib = gen.index_of(&b).expect("interior state");
            let mu = DiscreteLaw::dirac(gen.n_states(), ia);
            let nu = DiscreteLaw::dirac(gen.n_states(), ib);
            let grid = transport_grid(ctx);
            let mut out = SuiteOutput { passed: true, ..Default::default() };
            let mut worst = 0.0f64;
            for p in [1.0, 2.0] {
                let rep = contraction_check(m, &mu, &nu, p, &grid, &ContractionOptions::default())?;
                out.passed &= rep.passed;
                for r in &rep.rows {
                    worst = worst.max(r.ratio);
                    out.rows.push(vec![
                        s("contraction"),
                        Cell::F(p),
                        Cell::F(r.t),
                        Cell::F(r.wp),
                        Cell::F(r.bound),
                        Cell::F(r.ratio),
                        Cell::B(r.passed),
                    ]);
                }
                if let Some(k) = rep.kappa_emp {
                    out.summary.insert(format!("kappa_emp[p={p}]"), k);
                }
                let e = out.summary.entry("max_boundary_mass".into()).or_insert(0.0);
                *e = e.max(rep.max_boundary_mass);
            }
            let target = -(tables.kappa_plus[ia * lat.d] + tables.kappa_minus[ia * lat.d]);
            for p in [1.0, 2.0] {
                for t in SLOPE_TIMES {
                    let v = neighbor_slope(m, ia, 0, p, t)?;
                    out.rows.push(vec![
                        s("slope"),
                        Cell::F(p),
                        Cell::F(t),
                        Cell::F(v),
                        Cell::F(target),
                        Cell::F((v - target).abs() / t),
                        Cell::Empty,
                    ]);
                }
            }
            out.summary.insert("max_ratio".into(), worst);
            out.witness = Some(json!({"pair": [a, b]}));
            out.note = Some("slope rows are diagnostic".into());
            Ok(out)
        }
        _ => wasserstein_diagnostic(ctx),
    }
}

/// W₁ between the evolved Diracs at the first state and its first neighbor.
/// Recorded only; no contraction constant is claimed for these families.
fn wasserstein_diagnostic(ctx: &Ctx) -> Result<SuiteOutput> {
    let m = ctx.model;
    let gen = &m.generator;
    let k = (0..gen.n_moves())
        .find(|&k| gen.rate(0, k) > 0.0 && gen.moves()[k] != Move::Null)
        .ok_or_else(|| entrolab::Error::InvalidParams("state 0 has no moves".into()))?;
    let (ia, ib) = (0, gen.target(0, k));
    let n = gen.n_states();
    let (w0, _) = wasserstein_p(gen.states(), DiscreteLaw::dirac(n, ia).weights(), DiscreteLaw::dirac(n, ib).weights(), 1.0)?;
    let rows = transport_grid(ctx)
        .into_par_iter()
        .map(|t| {
            let a = evolve_law(gen, DiscreteLaw::dirac(n, ia).weights(), t, 1e-12)?;
            let b = evolve_law(gen, DiscreteLaw::dirac(n, ib).weights(), t, 1e-12)?;
            let (w, _) = wasserstein_p(gen.states(), &a, &b, 1.0)?;
            let reference = (-m.kappa.kappa * t).exp() * w0;
            Ok(vec![s("diagnostic"), Cell::F(1.0), Cell::F(t), Cell::F(w), Cell::F(reference), Cell::F(w / reference), Cell::Empty])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SuiteOutput {
        passed: true,
        rows,
        witness: Some(json!({"pair": [gen.state(ia), gen.state(ib)]})),
        note: Some("diagnostic only; no transport contraction is claimed for this family".into()),
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use entrolab::models::{bernoulli_laplace, curie_weiss};

    fn ctx<'a>(model: &'a ModelInstance, phis: &'a [Phi]) -> Ctx<'a> {
        Ctx { model, phis, samples: 20, seed: 3, t_grid: &[0.1, 0.5, 1.0] }
    }

    #[test]
    fn every_suite_passes_on_a_small_instance() {
        let m = bernoulli_laplace(4, 2).unwrap();
        let phis = [Phi::log(), Phi::quadratic()];
        let c = ctx(&m, &phis);
        for suite in Suite::ALL {
            let out = run_suite(suite, &c).unwrap();
            assert!(out.passed, "{suite}: {:?}", out.witness);
            assert!(!out.rows.is_empty());
            assert!(out.rows.iter().all(|r| r.len() == columns(suite).len()), "{suite}");
        }
    }

    #[test]
    fn unproven_constant_is_still_checked() {
        let (m, cw) = curie_weiss(5, 3.0).unwrap();
        assert!(!m.kappa.hypotheses_ok);
        assert!(cw.condition_margin() < 0.0);
        let phis = [Phi::log()];
        let out = run_suite(Suite::Csi, &ctx(&m, &phis)).unwrap();
        assert_eq!(out.rows.len(), 20);
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        assert_eq!(Cell::F(0.1).render(), "1.0000000000000001e-1");
        assert_eq!(Cell::F(1.0).render(), "1.0000000000000000e0");
    }
}
