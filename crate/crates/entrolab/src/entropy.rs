//! φ-entropies, Dirichlet forms and the convex Sobolev inequality.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::chain::{apply_generator, apply_unchecked, evolve, taylor_flow, Generator, Measure};
use crate::error::{Error, Result};
use crate::numeric::{holds_with_tolerance, linear_fit, CompensatedSum};
use crate::phi::{min_eigenvalue, Phi};
use crate::sampling::{draw_rng, log_uniform, random_positive_function};

fn check_positive(f: &[f64]) -> Result<()> {
    for (index, &value) in f.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { what: format!("f[{index}]") });
        }
        if value <= 0.0 {
            return Err(Error::NonPositiveF { index, value });
        }
    }
    Ok(())
}

fn check_dims(gen: &Generator, m: &Measure, f: &[f64]) -> Result<()> {
    let n = gen.n_states();
    for len in [m.len(), f.len()] {
        if len != n {
            return Err(Error::DimensionMismatch { expected: n, found: len });
        }
    }
    Ok(())
}

/// `Σ φ(f) m − φ(Σ f m)`, evaluated as `Σ m B_φ(f, f̄)` to avoid cancellation.
pub fn phi_entropy(f: &[f64], m: &Measure, phi: &Phi) -> Result<f64> {
    if f.len() != m.len() {
        return Err(Error::DimensionMismatch { expected: m.len(), found: f.len() });
    }
    check_positive(f)?;
    Ok(entropy_unchecked(f, m, phi))
}

pub(crate) fn entropy_unchecked(f: &[f64], m: &Measure, phi: &Phi) -> f64 {
    let mean = m.mean(f);
    let s: CompensatedSum = m
        .weights()
        .iter()
        .zip(f)
        .map(|(w, &x)| if *w == 0.0 { 0.0 } else { w * phi.bregman(x, mean) })
        .collect();
    s.value().max(0.0)
}

/// `E(f,g)`; both the generator and the gradient forms are evaluated and
/// must agree within 1e−9 relative.
pub fn dirichlet_form(gen: &Generator, m: &Measure, f: &[f64], g: &[f64]) -> Result<f64> {
    check_dims(gen, m, f)?;
    check_dims(gen, m, g)?;
    let lf = apply_generator(gen, f)?;
    let w = m.weights();
    let mut gen_form = CompensatedSum::new();
    let mut scale = 0.0;
    for i in 0..f.len() {
        let t = -g[i] * lf[i] * w[i];
        scale += t.abs();
        gen_form.add(t);
    }
    let mut grad_form = CompensatedSum::new();
    for t in gen.transitions() {
        if t.target != t.source {
            let v = 0.5 * t.rate * (f[t.target] - f[t.source]) * (g[t.target] - g[t.source]) * w[t.source];
            scale += v.abs();
            grad_form.add(v);
        }
    }
    let (a, b) = (gen_form.value(), grad_form.value());
    if (a - b).abs() > 1e-9 * a.abs().max(b.abs()).max(1e-12 * scale) {
        return Err(Error::FormMismatch { generator_form: a, gradient_form: b });
    }
    Ok(b)
}

/// `E(φ'(f), f) = ½ Σ c(η,σ) Φ(f(η), f(ση)) m(η)`.
pub fn dirichlet_phi(gen: &Generator, m: &Measure, phi: &Phi, f: &[f64]) -> Result<f64> {
    check_dims(gen, m, f)?;
    check_positive(f)?;
    Ok(dirichlet_phi_unchecked(gen, m, phi, f))
}

pub(crate) fn dirichlet_phi_unchecked(gen: &Generator, m: &Measure, phi: &Phi, f: &[f64]) -> f64 {
    let w = m.weights();
    let mut s = CompensatedSum::new();
    for i in 0..gen.n_states() {
        for (r, &j) in gen.rates_row(i).iter().zip(gen.targets_row(i)) {
            if *r > 0.0 && j != i {
                s.add(r * w[i] * phi.big(f[i], f[j]));
            }
        }
    }
    0.5 * s.value()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub entropy: f64,
    pub dirichlet: f64,
    pub kappa: f64,
    /// `dirichlet − κ·entropy`.
    pub slack: f64,
    pub passed: bool,
}

pub const CSI_REL_TOL: f64 = 1e-9;

pub fn csi_check(gen: &Generator, m: &Measure, phi: &Phi, kappa: f64, f: &[f64]) -> Result<EntropyReport> {
    check_dims(gen, m, f)?;
    check_positive(f)?;
    let entropy = entropy_unchecked(f, m, phi);
    let dirichlet = dirichlet_phi_unchecked(gen, m, phi, f);
    let slack = dirichlet - kappa * entropy;
    Ok(EntropyReport { entropy, dirichlet, kappa, slack, passed: slack >= -CSI_REL_TOL * dirichlet.max(1.0) })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiInequalityFailure {
    pub check: String,
    pub a: f64,
    pub b: f64,
    pub a_prime: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiInequalityReport {
    pub alpha: f64,
    pub samples: usize,
    /// Smallest Hessian eigenvalue divided by the Hessian's max-abs entry.
    pub min_hessian_ratio: f64,
    pub min_beckner_slack: f64,
    pub min_mlsi_slack: Option<f64>,
    pub failures: Vec<PhiInequalityFailure>,
    pub passed: bool,
}

const HESS_REL_TOL: f64 = 1e-8;
const A1_REL_TOL: f64 = 1e-9;
const A1_ABS_TOL: f64 = 1e-12;

/// Beckner improvement with `a' = b'`: returns (left side, right side).
pub fn beckner_improvement_sides(alpha: f64, a: f64, b: f64, ap: f64) -> (f64, f64) {
    let phi = Phi::Alpha(alpha);
    let g = phi.grad(a, b);
    let base = phi.big(a, b);
    let lhs = phi.big(ap, ap) - base - (g[0] * (ap - a) + g[1] * (ap - b));
    (lhs, (alpha - 1.0) * base)
}

/// Log-Sobolev improvement: returns (left side, right side).
pub fn mlsi_improvement_sides(a: f64, b: f64) -> (f64, f64) {
    let phi = Phi::log();
    let g = phi.grad(a, b);
    let base = phi.big(a, b);
    let first = phi.big(a, a) - base - g[1] * (a - b);
    let second = phi.big(b, b) - base - g[0] * (b - a);
    (first + second, 2.0 * base)
}

/// Samples the algebraic inequalities of the power family.
pub fn check_phi_inequalities(alpha: f64, num_samples: usize, seed: u64) -> Result<PhiInequalityReport> {
    let phi = Phi::alpha(alpha)?;
    let mut rng = draw_rng(seed, (alpha * 1e6).round() as u64);
    let mut min_hessian_ratio = f64::INFINITY;
    let mut min_beckner = f64::INFINITY;
    let mut min_mlsi = f64::INFINITY;
    let mut failures = Vec::new();
    let is_log = (alpha - 1.0).abs() < 1e-12;
    for _ in 0..num_samples {
        let a = log_uniform(&mut rng, 1e-3, 1e3);
        let b = log_uniform(&mut rng, 1e-3, 1e3);
        let ap = log_uniform(&mut rng, 1e-3, 1e3);
        let h = phi.hess(a, b);
        let norm = h.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        let ratio = if norm > 0.0 { min_eigenvalue(h) / norm } else { 0.0 };
        min_hessian_ratio = min_hessian_ratio.min(ratio);
        if ratio < -HESS_REL_TOL {
            failures.push(PhiInequalityFailure { check: "hessian".into(), a, b, a_prime: ap, slack: ratio });
        }
        let (l, r) = beckner_improvement_sides(alpha, a, b, ap);
        min_beckner = min_beckner.min(l - r);
        if !holds_with_tolerance(l, r, A1_REL_TOL, A1_ABS_TOL) {
            failures.push(PhiInequalityFailure { check: "beckner".into(), a, b, a_prime: ap, slack: l - r });
        }
        if is_log {
            let (l, r) = mlsi_improvement_sides(a, b);
            min_mlsi = min_mlsi.min(l - r);
            if !holds_with_tolerance(l, r, A1_REL_TOL, A1_ABS_TOL) {
                failures.push(PhiInequalityFailure { check: "mlsi".into(), a, b, a_prime: ap, slack: l - r });
            }
        }
    }
    Ok(PhiInequalityReport {
        alpha,
        samples: num_samples,
        min_hessian_ratio,
        min_beckner_slack: min_beckner,
        min_mlsi_slack: is_log.then_some(min_mlsi),
        passed: failures.is_empty(),
        failures,
    })
}

/// Entropies of `S_t f` along an increasing time grid.
pub fn decay_curve(
    gen: &Generator,
    m: &Measure,
    phi: &Phi,
    f: &[f64],
    t_grid: &[f64],
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    check_dims(gen, m, f)?;
    check_positive(f)?;
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("time grid must be strictly increasing".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let ft = evolve(gen, f, t, tol)?;
            Ok((t, entropy_unchecked(&ft, m, phi)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub residual: f64,
}

/// Least-squares slope of `log H` against `t`, after dropping vanishing entries.
pub fn fit_decay_rate(curve: &[(f64, f64)]) -> Result<DecayFit> {
    let top = curve.iter().map(|p| p.1).fold(0.0f64, f64::max);
    let floor = (top * 1e-20).max(1e-24);
    let pts: Vec<(f64, f64)> = curve.iter().copied().filter(|p| p.1 > floor).collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateCurve);
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let (_, slope, residual) = linear_fit(&x, &y);
    Ok(DecayFit { rate: -slope, residual })
}

/// `Σ c(η,σ) DΦ(f(η),f(ση))·(Lf(η), Lf(ση)) m(η)`, the time derivative of
/// `2E(φ'(S_t f), S_t f)` at `t = 0`.
pub fn second_derivative_direct(gen: &Generator, m: &Measure, phi: &Phi, f: &[f64]) -> Result<f64> {
    check_dims(gen, m, f)?;
    check_positive(f)?;
    let lf = apply_unchecked(gen, f);
    let w = m.weights();
    let mut s = CompensatedSum::new();
    for i in 0..gen.n_states() {
        for (r, &j) in gen.rates_row(i).iter().zip(gen.targets_row(i)) {
            if *r > 0.0 && j != i {
                let g = phi.grad(f[i], f[j]);
                s.add(r * w[i] * (g[0] * lf[i] + g[1] * lf[j]));
            }
        }
    }
    Ok(s.value())
}

pub const FD_STEP: f64 = 1e-4;
pub const FD_REL_TOL: f64 = 1e-5;

/// Centered difference of `t ↦ 2E(φ'(S_t f), S_t f)` at steps `h` and `h/2`,
/// combined by one Richardson step; returns the estimate and the magnitude of
/// `2E` at `t = 0`, which sets the rounding floor.
pub fn second_derivative_fd(gen: &Generator, m: &Measure, phi: &Phi, f: &[f64], h: f64) -> Result<(f64, f64)> {
    check_dims(gen, m, f)?;
    check_positive(f)?;
    let centered = |h: f64| -> Result<f64> {
        let plus = taylor_flow(gen, f, h)?;
        let minus = taylor_flow(gen, f, -h)?;
        check_positive(&minus)?;
        let ep = 2.0 * dirichlet_phi_unchecked(gen, m, phi, &plus);
        let em = 2.0 * dirichlet_phi_unchecked(gen, m, phi, &minus);
        Ok((ep - em) / (2.0 * h))
    };
    let (coarse, fine) = (centered(h)?, centered(0.5 * h)?);
    let e0 = 2.0 * dirichlet_phi_unchecked(gen, m, phi, f);
    Ok(((4.0 * fine - coarse) / 3.0, e0))
}

/// Agreement test shared by the organizer checks: relative to the larger
/// value, floored by the rounding level of the difference quotient.
pub fn fd_agrees(value: f64, fd: f64, level: f64, h: f64) -> bool {
    let floor = 3e-12 * level / h;
    (value - fd).abs() <= FD_REL_TOL * value.abs().max(fd.abs()).max(floor)
}

/// The derivative of `2E(φ'(S_t f), S_t f)` at zero, cross-checked against
/// a finite difference.
pub fn entropy_second_derivative(gen: &Generator, m: &Measure, phi: &Phi, f: &[f64]) -> Result<f64> {
    let direct = second_derivative_direct(gen, m, phi, f)?;
    let (fd, level) = second_derivative_fd(gen, m, phi, f, FD_STEP)?;
    if !fd_agrees(direct, fd, level, FD_STEP) {
        return Err(Error::FiniteDifferenceMismatch { organized: direct, finite_difference: fd });
    }
    Ok(direct)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BestConstantMethod {
    Spectral,
    Optimized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestConstant {
    /// Exact for the quadratic member; an upper bound otherwise.
    pub value: f64,
    pub method: BestConstantMethod,
    pub spectral_gap: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestConstantOptions {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
    pub max_states: usize,
}

impl Default for BestConstantOptions {
    fn default() -> Self {
        BestConstantOptions { restarts: 8, steps: 300, seed: 0, max_states: 5000 }
    }
}

/// Smallest nonzero eigenvalue of `−L` in `L²(m)` together with an eigenvector
/// in the original coordinates.
pub fn spectral_gap(gen: &Generator, m: &Measure) -> Result<(f64, Vec<f64>)> {
    let n = gen.n_states();
    if n < 2 {
        return Err(Error::EigenFailure("need at least two states".into()));
    }
    let q = gen.rate_matrix();
    let sq: Vec<f64> = m.weights().iter().map(|w| w.sqrt()).collect();
    if sq.iter().any(|&s| s <= 0.0) {
        return Err(Error::EigenFailure("measure must be strictly positive".into()));
    }
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] = -q[(i, j)] * sq[i] / sq[j];
        }
    }
    let sym = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(sym, 1e-15, 10_000)
        .ok_or_else(|| Error::EigenFailure("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let k = order[1];
    let vec: Vec<f64> = (0..n).map(|i| eig.eigenvectors[(i, k)] / sq[i]).collect();
    Ok((eig.eigenvalues[k], vec))
}

fn ratio_and_gradient(gen: &Generator, m: &Measure, phi: &Phi, u: &[f64]) -> Option<(f64, Vec<f64>)> {
    let f: Vec<f64> = u.iter().map(|x| x.exp()).collect();
    if f.iter().any(|x| !x.is_finite() || *x <= 0.0) {
        return None;
    }
    let w = m.weights();
    let h = entropy_unchecked(&f, m, phi);
    if !(h > 1e-300) {
        return None;
    }
    let e = dirichlet_phi_unchecked(gen, m, phi, &f);
    let mean = m.mean(&f);
    let dmean = phi.d1(mean);
    let mut de = vec![0.0; f.len()];
    for i in 0..gen.n_states() {
        for (r, &j) in gen.rates_row(i).iter().zip(gen.targets_row(i)) {
            if *r > 0.0 && j != i {
                let g = phi.grad(f[i], f[j]);
                de[i] += 0.5 * r * w[i] * g[0];
                de[j] += 0.5 * r * w[i] * g[1];
            }
        }
    }
    let grad = (0..f.len())
        .map(|i| {
            let dh = w[i] * (phi.d1(f[i]) - dmean);
            f[i] * (de[i] * h - e * dh) / (h * h)
        })
        .collect();
    Some((e / h, grad))
}

fn descend(gen: &Generator, m: &Measure, phi: &Phi, mut u: Vec<f64>, steps: usize) -> (f64, usize, bool) {
    let Some((mut val, mut grad)) = ratio_and_gradient(gen, m, phi, &u) else {
        return (f64::INFINITY, 0, false);
    };
    let mut step = 0.5;
    for it in 0..steps {
        let gn = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn < 1e-10 * val.abs().max(1.0) {
            return (val, it, true);
        }
        let mut accepted = false;
        while step > 1e-14 {
            let trial: Vec<f64> = u.iter().zip(&grad).map(|(x, g)| (x - step * g / gn).clamp(-30.0, 30.0)).collect();
            if let Some((tv, tg)) = ratio_and_gradient(gen, m, phi, &trial) {
                if tv < val - 1e-4 * step * gn {
                    u = trial;
                    val = tv;
                    grad = tg;
                    step *= 1.5;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            return (val, it, true);
        }
    }
    (val, steps, false)
}

/// Numerical best constant of the convex Sobolev inequality.
pub fn estimate_best_constant(gen: &Generator, m: &Measure, phi: &Phi, opts: &BestConstantOptions) -> Result<BestConstant> {
    let n = gen.n_states();
    if n > opts.max_states {
        return Err(Error::InvalidParams(format!("{n} states exceed the cap {}", opts.max_states)));
    }
    if m.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.len() });
    }
    phi.validate()?;
    let (gap, fiedler) = spectral_gap(gen, m)?;
    if phi.exponent() == Some(2.0) {
        return Ok(BestConstant {
            value: 2.0 * gap,
            method: BestConstantMethod::Spectral,
            spectral_gap: gap,
            converged: true,
            iterations: 0,
        });
    }
    // Near constants the ratio tends to 2·gap along the slowest mode, so that
    // limit is itself an admissible upper bound.
    let scale = fiedler.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let mut starts: Vec<Vec<f64>> = [0.5, -0.5]
        .iter()
        .map(|s| fiedler.iter().map(|x| s * x / scale).collect())
        .collect();
    for r in 0..opts.restarts {
        let f = random_positive_function(n, opts.seed, r as u64);
        let mut rng = draw_rng(opts.seed ^ 0x5eed, r as u64);
        starts.push(f.iter().map(|x| x.ln() * rng.gen_range(0.2..1.0)).collect());
    }
    let mut best = 2.0 * gap;
    let mut iterations = 0;
    let mut converged = true;
    for u in starts {
        let (v, it, ok) = descend(gen, m, phi, u, opts.steps);
        iterations += it;
        converged &= ok;
        if v < best {
            best = v;
        }
    }
    Ok(BestConstant { value: best, method: BestConstantMethod::Optimized, spectral_gap: gap, converged, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_generator, Move};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn flip() -> (Generator, Measure) {
        let g = build_generator(vec![vec![-1], vec![1]], vec![Move::Flip(0)], |_, _| 1.0).unwrap();
        (g, Measure::uniform(2).unwrap())
    }

    #[test]
    fn entropy_hand_values() {
        let m = Measure::uniform(2).unwrap();
        let h = phi_entropy(&[1.0, 3.0], &m, &Phi::log()).unwrap();
        assert_relative_eq!(h, 1.5 * 3.0f64.ln() - 2.0 * 2.0f64.ln(), max_relative = 1e-14);
        let v = phi_entropy(&[1.0, 3.0], &m, &Phi::quadratic()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);
        assert_eq!(phi_entropy(&[2.0, 2.0], &m, &Phi::Alpha(1.5)).unwrap(), 0.0);
        assert!(matches!(phi_entropy(&[0.0, 1.0], &m, &Phi::log()), Err(Error::NonPositiveF { index: 0, .. })));
    }

    #[test]
    fn dirichlet_hand_values() {
        let (g, m) = flip();
        assert_relative_eq!(dirichlet_form(&g, &m, &[0.0, 1.0], &[0.0, 1.0]).unwrap(), 0.5, max_relative = 1e-15);
        assert_eq!(dirichlet_form(&g, &m, &[2.0, 2.0], &[0.0, 1.0]).unwrap(), 0.0);
        let f = [0.5, 2.0];
        let direct = dirichlet_form(&g, &m, &[0.5f64.ln(), 2.0f64.ln()], &f).unwrap();
        assert_relative_eq!(dirichlet_phi(&g, &m, &Phi::log(), &f).unwrap(), direct, max_relative = 1e-14);
    }

    #[test]
    fn form_mismatch_on_irreversible_pair() {
        let g = build_generator(vec![vec![-1], vec![1]], vec![Move::Flip(0)], |eta, _| if eta[0] < 0 { 1.0 } else { 3.0 })
            .unwrap();
        let m = Measure::uniform(2).unwrap();
        assert!(matches!(dirichlet_form(&g, &m, &[0.0, 1.0], &[1.0, 0.0]), Err(Error::FormMismatch { .. })));
    }

    #[test]
    fn flip_chain_quadratic_decay() {
        let (g, m) = flip();
        let f = [0.5, 1.5];
        let grid = [0.0, 0.1, 0.5, 1.0];
        let curve = decay_curve(&g, &m, &Phi::quadratic(), &f, &grid, 1e-13).unwrap();
        for (t, h) in &curve {
            assert_relative_eq!(*h, 0.25 * (-4.0 * t).exp(), max_relative = 1e-10);
        }
        let fit = fit_decay_rate(&curve).unwrap();
        assert!((fit.rate - 4.0).abs() < 1e-6);
        let best = estimate_best_constant(&g, &m, &Phi::quadratic(), &Default::default()).unwrap();
        assert_relative_eq!(best.value, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn fit_exact_exponential_and_degenerate() {
        let curve: Vec<(f64, f64)> = (0..6).map(|k| (k as f64 * 0.3, (-3.0 * k as f64 * 0.3).exp())).collect();
        assert!((fit_decay_rate(&curve).unwrap().rate - 3.0).abs() < 1e-10);
        let flat = vec![(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        assert_eq!(fit_decay_rate(&flat), Err(Error::DegenerateCurve));
    }

    #[test]
    fn csi_constant_function_passes() {
        let (g, m) = flip();
        let rep = csi_check(&g, &m, &Phi::log(), 100.0, &[3.0, 3.0]).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.slack, 0.0);
    }

    #[test]
    fn second_derivative_flip_chain() {
        let (g, m) = flip();
        let f = [0.5, 1.5];
        let d = entropy_second_derivative(&g, &m, &Phi::quadratic(), &f).unwrap();
        // 2E(φ₂'(f_t), f_t) = 4E(f_t, f_t) = 2e^{−4t}, derivative −8.
        assert_relative_eq!(d, -8.0, max_relative = 1e-12);
        assert_eq!(entropy_second_derivative(&g, &m, &Phi::log(), &[2.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn phi_inequalities_hand_cases() {
        let e = std::f64::consts::E;
        let (l, r) = mlsi_improvement_sides(1.0, e);
        assert_relative_eq!(r, 2.0 * (e - 1.0), max_relative = 1e-14);
        assert_relative_eq!(l, (e - 1.0) * (e - 1.0) * (1.0 + 1.0 / e), max_relative = 1e-13);
        assert!(l >= r);
        let h = Phi::quadratic().hess(0.3, 5.0);
        assert_eq!(h, [[4.0, -4.0], [-4.0, 4.0]]);
        let (l, r) = beckner_improvement_sides(1.5, 2.0, 2.0, 7.0);
        assert_eq!((l, r), (0.0, 0.0));
        let rep = check_phi_inequalities(1.5, 2000, 3).unwrap();
        assert!(rep.passed, "{:?}", rep.failures.first());
    }

    proptest! {
        #[test]
        fn quadratic_entropy_is_variance(f in proptest::collection::vec(0.05f64..20.0, 2..8)) {
            let m = Measure::uniform(f.len()).unwrap();
            let mean = f.iter().sum::<f64>() / f.len() as f64;
            let var = f.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / f.len() as f64;
            let h = phi_entropy(&f, &m, &Phi::quadratic()).unwrap();
            prop_assert!((h - var).abs() <= 1e-12 * (1.0 + var));
        }

        #[test]
        fn entropy_nonnegative(alpha in 1.0f64..=2.0, f in proptest::collection::vec(0.05f64..20.0, 2..8)) {
            let m = Measure::uniform(f.len()).unwrap();
            prop_assert!(phi_entropy(&f, &m, &Phi::Alpha(alpha)).unwrap() >= 0.0);
        }
    }
}
