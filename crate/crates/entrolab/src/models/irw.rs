//! Interacting random walks on a truncated box `{0..=n}^d`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Implied, IrwTables, KappaReport, Lattice, ModelInstance, SeedBuilder};
use crate::chain::{truncate, Generator, Measure, Move};
use crate::coupling::CouplingRates;
use crate::models::Family;
use crate::{Error, Result};

/// Callable potential on lattice points.
#[derive(Clone)]
pub struct PotentialFn(pub Arc<dyn Fn(&[i32]) -> f64 + Send + Sync>);

impl fmt::Debug for PotentialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PotentialFn(..)")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    /// `β|η|²`.
    Quadratic { beta: f64 },
    /// `β|η|`.
    Linear { beta: f64 },
    /// `β h(|η|)` with `h` tabulated from 0.
    Symmetric { beta: f64, h: Vec<f64> },
    /// `Σᵢ ηᵢ log λ + log ηᵢ!`, giving departure rates `λ ηᵢ`.
    Poisson { lambda: f64 },
    /// `c Σ_{i<j} ηᵢ ηⱼ`.
    Pairwise { c: f64 },
    Sum { terms: Vec<Potential> },
    #[serde(skip)]
    Custom(PotentialFn),
}

fn ln_factorial(k: i32) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

impl Potential {
    pub fn custom<F: Fn(&[i32]) -> f64 + Send + Sync + 'static>(f: F) -> Potential {
        Potential::Custom(PotentialFn(Arc::new(f)))
    }

    pub fn value(&self, eta: &[i32]) -> f64 {
        let total: i32 = eta.iter().sum();
        match self {
            Potential::Zero => 0.0,
            Potential::Quadratic { beta } => beta * (total as f64).powi(2),
            Potential::Linear { beta } => beta * total as f64,
            Potential::Symmetric { beta, h } => h.get(total as usize).map_or(f64::NAN, |v| beta * v),
            Potential::Poisson { lambda } => {
                eta.iter().map(|&k| k as f64 * lambda.ln() + ln_factorial(k)).sum()
            }
            Potential::Pairwise { c } => {
                let s: f64 = eta.iter().map(|&k| k as f64).sum();
                let sq: f64 = eta.iter().map(|&k| (k as f64).powi(2)).sum();
                c * 0.5 * (s * s - sq)
            }
            Potential::Sum { terms } => terms.iter().map(|t| t.value(eta)).sum(),
            Potential::Custom(f) => (f.0)(eta),
        }
    }

    /// `(β, h)` when the potential is `β h(|η|)`.
    pub fn symmetric_profile(&self) -> Option<(f64, Box<dyn Fn(usize) -> f64 + '_>)> {
        match self {
            Potential::Zero => Some((0.0, Box::new(|_| 0.0))),
            Potential::Quadratic { beta } => Some((*beta, Box::new(|m| (m as f64).powi(2)))),
            Potential::Linear { beta } => Some((*beta, Box::new(|m| m as f64))),
            Potential::Symmetric { beta, h } => Some((*beta, Box::new(move |m| h.get(m).copied().unwrap_or(f64::NAN)))),
            _ => None,
        }
    }

    pub fn poisson_rate(&self) -> Option<f64> {
        match self {
            Potential::Poisson { lambda } => Some(*lambda),
            _ => None,
        }
    }

    fn validate(&self, d: usize, n: usize) -> Result<()> {
        match self {
            Potential::Quadratic { beta } | Potential::Linear { beta } | Potential::Symmetric { beta, .. }
                if !(beta.is_finite() && *beta >= 0.0) =>
            {
                Err(Error::InvalidParams(format!("beta must be finite and >= 0, got {beta}")))
            }
            Potential::Symmetric { h, .. } if h.len() < d * n + 2 => Err(Error::InvalidParams(format!(
                "h table needs at least {} entries, got {}",
                d * n + 2,
                h.len()
            ))),
            Potential::Poisson { lambda } if !(lambda.is_finite() && *lambda > 0.0) => {
                Err(Error::InvalidParams(format!("lambda must be > 0, got {lambda}")))
            }
            Potential::Sum { terms } => terms.iter().try_for_each(|t| t.validate(d, n)),
            _ => Ok(()),
        }
    }
}

fn irw_moves(d: usize) -> Vec<Move> {
    (0..d).flat_map(|i| [Move::Inc(i), Move::Dec(i)]).collect()
}

/// Rates `exp(−∇ᵢ⁺V⁺)` and `exp(−∇ᵢ⁻V⁻)` on the box, with the independent-jump
/// coupling table and interior curvature tables.
pub fn build_irw(v_plus: &Potential, v_minus: &Potential, d: usize, n: usize) -> Result<ModelInstance> {
    if d == 0 {
        return Err(Error::InvalidParams("dimension d must be at least 1".into()));
    }
    v_plus.validate(d, n)?;
    v_minus.validate(d, n)?;
    let gen = truncate(d, n, irw_moves(d), |eta, mv| {
        let mut next = eta.to_vec();
        match mv {
            Move::Inc(i) => {
                next[i] += 1;
                (v_plus.value(eta) - v_plus.value(&next)).exp()
            }
            Move::Dec(i) if eta[i] > 0 => {
                next[i] -= 1;
                (v_minus.value(eta) - v_minus.value(&next)).exp()
            }
            _ => 0.0,
        }
    })?;
    let log_w: Vec<f64> = gen.states().iter().map(|s| -v_plus.value(s) - v_minus.value(s)).collect();
    let measure = Measure::from_log_weights(&log_w)?;
    let coupling = irw_coupling(&gen, d);
    let mut kappa = irw_kappas(&gen, d, n);
    if let (Some((beta, h)), Some(lambda)) = (v_plus.symmetric_profile(), v_minus.poisson_rate()) {
        let sym = symmetric_interaction_kappa(&*h, beta, lambda, d, (d * n).saturating_sub(1));
        kappa.detail("symmetric_closed_form", sym.kappa);
        if let Some(x) = sym.explicit {
            kappa.detail("symmetric_explicit", x);
        }
    }
    Ok(ModelInstance {
        family: Family::Irw,
        label: format!("irw d={d} n={n}"),
        generator: gen,
        measure,
        coupling,
        kappa,
        lattice: Some(Lattice { d, n }),
    })
}

/// `∇ᵢ⁺c(η, γ) = c(γᵢ⁺η, γ) − c(η, γ)` with the truncated image.
fn grad_rate(gen: &Generator, s: usize, i: usize, k: usize) -> f64 {
    let up = gen.target_of(s, Move::Inc(i));
    gen.rate(up, k) - gen.rate(s, k)
}

/// `(κ⁺(η,i), κ⁻(η,i))`.
fn kappa_pair(gen: &Generator, s: usize, i: usize) -> (f64, f64) {
    let inc = gen.move_position(Move::Inc(i)).expect("irw move set");
    let dec = gen.move_position(Move::Dec(i)).expect("irw move set");
    let mut plus = -grad_rate(gen, s, i, inc);
    let mut minus = grad_rate(gen, s, i, dec);
    for k in 0..gen.n_moves() {
        if k == inc || k == dec {
            continue;
        }
        let g = grad_rate(gen, s, i, k);
        plus -= g.max(0.0);
        minus -= (-g).max(0.0);
    }
    (plus, minus)
}

/// Curvature tables of a box-truncated IRW generator. The infimum runs over
/// interior pairs `ηᵢ < n`; boundary pairs are reported separately.
pub fn irw_kappas(gen: &Generator, d: usize, n: usize) -> KappaReport {
    let ns = gen.n_states();
    let mut kp = vec![0.0; ns * d];
    let mut km = vec![0.0; ns * d];
    let (mut min_p, mut min_m, mut min_sum, mut boundary) = (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut failed = None;
    for s in 0..ns {
        let eta = gen.state(s);
        for i in 0..d {
            let (p, m) = kappa_pair(gen, s, i);
            kp[s * d + i] = p;
            km[s * d + i] = m;
            if (eta[i] as usize) < n {
                min_p = min_p.min(p);
                min_m = min_m.min(m);
                min_sum = min_sum.min(p + m);
                if failed.is_none() && (p < -1e-12 || m < -1e-12) {
                    failed = Some(format!("kappa+ + kappa- >= 0 fails at eta={eta:?}, i={i}: kappa+={p:.6e}, kappa-={m:.6e}"));
                }
            } else {
                boundary = boundary.min(p + m);
            }
        }
    }
    let mut rep = KappaReport::new(min_sum, None, Implied::proportional(min_sum));
    if let Some(f) = failed {
        rep.fail(f);
    }
    rep.irw = Some(IrwTables {
        d,
        n,
        kappa_plus: kp,
        kappa_minus: km,
        interior_min_plus: min_p,
        interior_min_minus: min_m,
        boundary_min: boundary,
    });
    rep
}

fn irw_coupling(gen: &Generator, d: usize) -> CouplingRates {
    let moves = gen.moves().to_vec();
    let mut seeds = Vec::new();
    for s in 0..gen.n_states() {
        for i in 0..d {
            let inc = Move::Inc(i);
            let dec = Move::Dec(i);
            let xi = gen.target_of(s, inc);
            let (kp, km) = kappa_pair(gen, s, i);
            let mut b = SeedBuilder::default();
            for (k, &g) in moves.iter().enumerate() {
                b.add(g, g, gen.rate(s, k).min(gen.rate(xi, k)));
                if g == inc || g == dec {
                    continue;
                }
                let grad = gen.rate(xi, k) - gen.rate(s, k);
                b.add(inc, g, grad.max(0.0));
                b.add(g, dec, (-grad).max(0.0));
            }
            b.add(inc, Move::Null, kp);
            b.add(Move::Null, dec, km);
            if gen.rate_of(s, inc) > 0.0 {
                seeds.push(b.clone().finish(s, inc));
            }
            // Decrement seed at ξ mirrors the increment seed at η.
            if xi != s && gen.rate_of(xi, dec) > 0.0 {
                seeds.push(b.mirrored().finish(xi, dec));
            }
        }
    }
    seeds.sort_by(|a, b| (a.state, a.sigma).cmp(&(b.state, b.sigma)));
    CouplingRates::new(seeds)
}

/// Constant for `V⁺ = β h(|η|)` and Poisson departures at rate `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricKappa {
    pub kappa: f64,
    pub argmin: usize,
    pub hypothesis_ok: bool,
    /// `λ − (d−2)exp(−β∇⁺h(0))` when `h` is strictly increasing on the scanned
    /// range and `β ≥ (log(d−1) − log λ)/(h(1) − h(0))`.
    pub explicit: Option<f64>,
}

/// `inf_m λ − (d−2)δ(m)` with `δ(m) = e^{−β∇h(m)} − e^{−β∇h(m+1)}`, scanned
/// over `m ≤ m_max`.
pub fn symmetric_interaction_kappa(h: &dyn Fn(usize) -> f64, beta: f64, lambda: f64, d: usize, m_max: usize) -> SymmetricKappa {
    let grad = |m: usize| h(m + 1) - h(m);
    let delta = |m: usize| (-beta * grad(m)).exp() - (-beta * grad(m + 1)).exp();
    let (mut kappa, mut argmin, mut ok) = (f64::INFINITY, 0, true);
    let dm = d as f64;
    for m in 0..=m_max {
        let dl = delta(m);
        let k = lambda - (dm - 2.0) * dl;
        if k < kappa {
            kappa = k;
            argmin = m;
        }
        if lambda - (dm - 1.0) * dl < 0.0 {
            ok = false;
        }
    }
    let increasing = (0..=m_max + 1).all(|m| grad(m) > 0.0);
    let explicit = (increasing && d >= 2 && beta >= (((dm - 1.0).ln() - lambda.ln()) / grad(0)).max(0.0))
        .then(|| lambda - (dm - 2.0) * (-beta * grad(0)).exp());
    SymmetricKappa { kappa, argmin, hypothesis_ok: ok, explicit }
}

/// Constant for a potential with nonnegative discrete mixed increments, with
/// Poisson departures at rate `λ`. `kappa` is the pointwise infimum over the
/// box; `details["origin_kappa"]` holds the simplified constant at `0` when
/// it is nonnegative.
pub fn oddly_convex_kappa(v: &dyn Fn(&[i32]) -> f64, lambda: f64, d: usize, n: usize) -> Result<KappaReport> {
    if !(lambda > 0.0) || d == 0 {
        return Err(Error::InvalidParams("need lambda > 0 and d >= 1".into()));
    }
    let shift = |eta: &[i32], i: usize| {
        let mut e = eta.to_vec();
        e[i] += 1;
        e
    };
    let grad = |eta: &[i32], i: usize| v(&shift(eta, i)) - v(eta);
    for eta in crate::chain::box_states(d, n) {
        for i in 0..d {
            for j in 0..d {
                let mixed = grad(&shift(&eta, j), i) - grad(&eta, i);
                if mixed < -1e-12 * (1.0 + mixed.abs()) {
                    return Err(Error::HessianSignViolation { state: eta.clone(), i, j });
                }
            }
        }
    }
    let mut kappa = f64::INFINITY;
    let mut general = f64::INFINITY;
    for eta in crate::chain::box_states(d, n) {
        for i in 0..d {
            let up = shift(&eta, i);
            let drop = |j: usize| (-grad(&eta, j)).exp() - (-grad(&up, j)).exp();
            let cross: f64 = (0..d).filter(|&j| j != i).map(drop).sum();
            general = general.min(lambda - cross);
            kappa = kappa.min(lambda + drop(i) - cross);
        }
    }
    let mut rep = KappaReport::new(kappa, None, Implied::proportional(kappa));
    if general < 0.0 {
        rep.fail(format!("pointwise condition fails: inf = {general:.6e}"));
    }
    let zero = vec![0i32; d];
    let origin = (0..d)
        .map(|i| lambda - (0..d).filter(|&j| j != i).map(|j| (-grad(&zero, j)).exp()).sum::<f64>())
        .fold(f64::INFINITY, f64::min);
    rep.detail("pointwise_condition", general);
    if origin >= 0.0 {
        rep.detail("origin_kappa", origin);
    }
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TildeH {
    pub m_eps: usize,
    pub values: Vec<f64>,
    /// `(d−1)·max_m −∇⁺exp(−β∇⁺h̃(m))`, at most `ε` by construction.
    pub max_drop: f64,
}

/// Replaces `h` below `M_ε` by the linear extension of its increment at
/// `M_ε`, where `M_ε` is the smallest index beyond which `h` is convex and
/// `∇⁺exp(−β∇⁺h) ≥ −ε/(d−1)` on the rest of the table. `M_ε` must not
/// exceed half the table.
pub fn tilde_h(h: &[f64], beta: f64, d: usize, eps: f64) -> Result<TildeH> {
    if !(eps > 0.0) || h.len() < 4 {
        return Err(Error::InvalidParams("need eps > 0 and at least 4 table entries".into()));
    }
    let cap = h.len() / 2;
    let grad = |m: usize| h[m + 1] - h[m];
    let drop = |m: usize| (-beta * grad(m + 1)).exp() - (-beta * grad(m)).exp();
    let threshold = if d >= 2 { -eps / (d as f64 - 1.0) } else { f64::NEG_INFINITY };
    let last = h.len() - 3;
    let good = |m: usize| grad(m + 1) >= grad(m) && drop(m) >= threshold;
    let mut m_eps = None;
    let mut tail_ok = true;
    for m in (0..=last).rev() {
        tail_ok &= good(m);
        if tail_ok && m <= cap {
            m_eps = Some(m);
        }
        if !tail_ok {
            break;
        }
    }
    let m_eps = m_eps.ok_or(Error::NoSuchM { cap })?;
    let slope = grad(m_eps);
    let values: Vec<f64> = (0..h.len())
        .map(|m| if m >= m_eps { h[m] } else { h[m_eps] - slope * (m_eps - m) as f64 })
        .collect();
    let tg = |m: usize| values[m + 1] - values[m];
    let max_drop = (0..=last)
        .map(|m| (-beta * tg(m)).exp() - (-beta * tg(m + 1)).exp())
        .fold(0.0f64, f64::max)
        * (d as f64 - 1.0).max(0.0);
    Ok(TildeH { m_eps, values, max_drop })
}
