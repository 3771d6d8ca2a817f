//! Coupling rates: for every positive-rate pair `(η, ση)` a joint rate table
//! on `G* × G*` whose marginals are the rates at `η` and at `ση`.
//!
//! The organizer rewrites the time derivative of `2E(φ'(f_t), f_t)` as a sum
//! over the coupling tables. Splitting it into merging terms (`γη = γ̄ση`)
//! and the rest gives the upper bound used by the sufficient condition.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::chain::{apply_unchecked, Generator, Measure, Move};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::phi::Phi;
use crate::sampling::random_positive_function;

pub const MARGINAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seed {
    #[serde(rename = "eta")]
    pub state: usize,
    pub sigma: Move,
    /// `(γ, γ̄, rate)`; absent pairs have rate zero.
    pub entries: Vec<(Move, Move, f64)>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CouplingRates {
    seeds: Vec<Seed>,
}

impl CouplingRates {
    pub fn new(seeds: Vec<Seed>) -> CouplingRates {
        CouplingRates { seeds }
    }

    /// Independent motion: one walker moves while the other waits.
    pub fn trivial(gen: &Generator) -> CouplingRates {
        let mut seeds = Vec::new();
        for t in gen.transitions() {
            let j = t.target;
            let mut entries = Vec::new();
            for (k, &g) in gen.moves().iter().enumerate() {
                let a = gen.rate(t.source, k);
                if a > 0.0 {
                    entries.push((g, Move::Null, a));
                }
                let b = gen.rate(j, k);
                if b > 0.0 {
                    entries.push((Move::Null, g, b));
                }
            }
            seeds.push(Seed { state: t.source, sigma: t.mv, entries });
        }
        CouplingRates { seeds }
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn seeds_mut(&mut self) -> &mut [Seed] {
        &mut self.seeds
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("coupling tables serialize")
    }

    pub fn from_json(text: &str) -> Result<CouplingRates> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A seed with all moves resolved to state indices.
#[derive(Debug, Clone)]
struct Resolved {
    i: usize,
    j: usize,
    rate: f64,
    /// `(γη, γ̄ση, coupling rate)`.
    entries: Vec<(usize, usize, f64)>,
    sigma: Move,
}

fn resolve(cr: &CouplingRates, gen: &Generator) -> Result<Vec<Resolved>> {
    let n = gen.n_states();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(cr.seeds.len());
    for s in &cr.seeds {
        let unknown = || Error::UnknownSeed { state: s.state, mv: s.sigma.tag() };
        if s.state >= n {
            return Err(unknown());
        }
        let k = gen.move_position(s.sigma).ok_or_else(unknown)?;
        let rate = gen.rate(s.state, k);
        if !(rate > 0.0) {
            return Err(unknown());
        }
        if !seen.insert((s.state, k)) {
            return Err(Error::InvalidParams(format!("seed ({}, {}) listed twice", s.state, s.sigma)));
        }
        let j = gen.target(s.state, k);
        let mut entries = Vec::with_capacity(s.entries.len());
        for &(g, gb, r) in &s.entries {
            if !r.is_finite() || r < 0.0 {
                return Err(Error::NegativeCouplingRate {
                    state: s.state,
                    mv: s.sigma.tag(),
                    gamma: g.tag(),
                    gammabar: gb.tag(),
                    rate: r,
                });
            }
            for mv in [g, gb] {
                if mv != Move::Null && gen.move_position(mv).is_none() {
                    return Err(Error::InvalidParams(format!("coupling entry uses move {mv} outside G*")));
                }
            }
            entries.push((gen.target_of(s.state, g), gen.target_of(j, gb), r));
        }
        out.push(Resolved { i: s.state, j, rate, entries, sigma: s.sigma });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub max_row_violation: f64,
    pub max_col_violation: f64,
    /// Seed with the largest marginal violation.
    pub worst_seed: Option<(usize, Move)>,
    /// Positive-rate pairs without a table.
    pub missing_seeds: usize,
    pub passed: bool,
}

pub fn check_admissible(cr: &CouplingRates, gen: &Generator) -> Result<AdmissibilityReport> {
    resolve(cr, gen)?;
    let mut max_row = 0.0f64;
    let mut max_col = 0.0f64;
    let mut worst = None;
    let mut worst_val = -1.0f64;
    for s in &cr.seeds {
        let j = gen.target_of(s.state, s.sigma);
        let mut row: HashMap<Move, f64> = HashMap::new();
        let mut col: HashMap<Move, f64> = HashMap::new();
        for &(g, gb, r) in &s.entries {
            *row.entry(g).or_default() += r;
            *col.entry(gb).or_default() += r;
        }
        let mut seed_worst = 0.0f64;
        for (k, &g) in gen.moves().iter().enumerate() {
            let rv = (row.get(&g).copied().unwrap_or(0.0) - gen.rate(s.state, k)).abs();
            let cv = (col.get(&g).copied().unwrap_or(0.0) - gen.rate(j, k)).abs();
            max_row = max_row.max(rv);
            max_col = max_col.max(cv);
            seed_worst = seed_worst.max(rv).max(cv);
        }
        if seed_worst > worst_val {
            worst_val = seed_worst;
            worst = Some((s.state, s.sigma));
        }
    }
    let covered: HashSet<(usize, Move)> = cr.seeds.iter().map(|s| (s.state, s.sigma)).collect();
    let missing_seeds = gen.transitions().filter(|t| !covered.contains(&(t.source, t.mv))).count();
    Ok(AdmissibilityReport {
        max_row_violation: max_row,
        max_col_violation: max_col,
        worst_seed: worst,
        missing_seeds,
        passed: max_row <= MARGINAL_TOL && max_col <= MARGINAL_TOL && missing_seeds == 0,
    })
}

fn require_admissible(cr: &CouplingRates, gen: &Generator) -> Result<Vec<Resolved>> {
    let rep = check_admissible(cr, gen)?;
    if !rep.passed {
        return Err(Error::InadmissibleCoupling { row: rep.max_row_violation, col: rep.max_col_violation });
    }
    resolve(cr, gen)
}

/// Markov chain on pairs of states. Seed pairs use their tables, diagonal
/// pairs move synchronously and any other pair moves independently.
#[derive(Debug, Clone)]
pub struct CoupledGenerator {
    pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    transitions: Vec<Vec<(usize, f64)>>,
}

impl CoupledGenerator {
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn pair_index(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&(a, b)).copied()
    }

    /// Outgoing `(pair index, rate)` list.
    pub fn transitions(&self, p: usize) -> &[(usize, f64)] {
        &self.transitions[p]
    }

    /// `L_cpl F` for `F` indexed by pairs.
    pub fn apply(&self, big_f: &[f64]) -> Result<Vec<f64>> {
        if big_f.len() != self.pairs.len() {
            return Err(Error::DimensionMismatch { expected: self.pairs.len(), found: big_f.len() });
        }
        Ok((0..self.pairs.len())
            .map(|p| self.transitions[p].iter().map(|&(q, r)| r * (big_f[q] - big_f[p])).sum())
            .collect())
    }
}

fn pair_moves(gen: &Generator, seeds: &HashMap<(usize, usize), usize>, res: &[Resolved], a: usize, b: usize) -> Vec<((usize, usize), f64)> {
    if let Some(&s) = seeds.get(&(a, b)) {
        return res[s].entries.iter().map(|&(x, y, r)| ((x, y), r)).collect();
    }
    let mut out = Vec::new();
    for k in 0..gen.n_moves() {
        let ra = gen.rate(a, k);
        if a == b {
            if ra > 0.0 {
                let t = gen.target(a, k);
                out.push(((t, t), ra));
            }
            continue;
        }
        if ra > 0.0 {
            out.push(((gen.target(a, k), b), ra));
        }
        let rb = gen.rate(b, k);
        if rb > 0.0 {
            out.push(((a, gen.target(b, k)), rb));
        }
    }
    out
}

pub fn coupled_generator(cr: &CouplingRates, gen: &Generator) -> Result<CoupledGenerator> {
    let res = require_admissible(cr, gen)?;
    let mut seed_of = HashMap::new();
    for (s, r) in res.iter().enumerate() {
        seed_of.entry((r.i, r.j)).or_insert(s);
    }
    let mut pairs = Vec::new();
    let mut index = HashMap::new();
    let mut queue = VecDeque::new();
    for r in &res {
        if !index.contains_key(&(r.i, r.j)) {
            index.insert((r.i, r.j), pairs.len());
            pairs.push((r.i, r.j));
            queue.push_back((r.i, r.j));
        }
    }
    let mut transitions = Vec::new();
    while let Some((a, b)) = queue.pop_front() {
        let mut row: Vec<(usize, f64)> = Vec::new();
        for (to, r) in pair_moves(gen, &seed_of, &res, a, b) {
            if to == (a, b) || r == 0.0 {
                continue;
            }
            let q = match index.get(&to) {
                Some(&q) => q,
                None => {
                    index.insert(to, pairs.len());
                    pairs.push(to);
                    queue.push_back(to);
                    pairs.len() - 1
                }
            };
            row.push((q, r));
        }
        transitions.push(row);
    }
    Ok(CoupledGenerator { pairs, index, transitions })
}

/// Marginal identity `L_cpl F = Lf` for `F(η, η̄) = f(η)`: returns the
/// largest deviation over seed pairs.
pub fn marginal_projection_error(cg: &CoupledGenerator, gen: &Generator, f: &[f64], second: bool) -> Result<f64> {
    if f.len() != gen.n_states() {
        return Err(Error::DimensionMismatch { expected: gen.n_states(), found: f.len() });
    }
    let lifted: Vec<f64> = cg.pairs.iter().map(|&(a, b)| if second { f[b] } else { f[a] }).collect();
    let lc = cg.apply(&lifted)?;
    let lf = apply_unchecked(gen, f);
    Ok(cg
        .pairs
        .iter()
        .zip(&lc)
        .map(|(&(a, b), v)| (v - lf[if second { b } else { a }]).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrganizerDecomposition {
    /// DΦ-weighted terms with `γη = γ̄ση`.
    pub diagonal_part: f64,
    pub off_part: f64,
    /// `diagonal_part + off_part`.
    pub full_derivative: f64,
    /// Sum of all `∇_{γ,γ̄} f^φ` terms.
    pub kept_sum: f64,
    /// Convexity slack of the merging terms, subtracted in the bound.
    pub diagonal_improvement: f64,
    /// Convexity slack of the terms dropped from the bound.
    pub dropped_slack: f64,
    /// `kept_sum − diagonal_improvement`.
    pub bound: f64,
    /// Smallest per-term convexity slack, divided by `max(1, |terms|)`.
    pub min_convexity_slack: f64,
    /// Sum of the absolute values of all terms.
    pub scale: f64,
}

fn organize_resolved(res: &[Resolved], m: &Measure, phi: &Phi, f: &[f64]) -> OrganizerDecomposition {
    let w = m.weights();
    let mut diag = CompensatedSum::new();
    let mut off = CompensatedSum::new();
    let mut kept = CompensatedSum::new();
    let mut improve = CompensatedSum::new();
    let mut dropped = CompensatedSum::new();
    let mut min_slack = f64::INFINITY;
    let mut scale = 0.0;
    for s in res {
        let (a, b) = (f[s.i], f[s.j]);
        let base = phi.big(a, b);
        let g = phi.grad(a, b);
        let weight = s.rate * w[s.i];
        for &(x, y, r) in &s.entries {
            if r == 0.0 {
                continue;
            }
            let lin = g[0] * (f[x] - a) + g[1] * (f[y] - b);
            let grad_phi = phi.big(f[x], f[y]) - base;
            let slack = grad_phi - lin;
            min_slack = min_slack.min(slack / grad_phi.abs().max(lin.abs()).max(1.0));
            let c = weight * r;
            scale += (c * lin).abs() + (c * grad_phi).abs();
            kept.add(c * grad_phi);
            if x == y {
                diag.add(c * lin);
                improve.add(c * slack);
            } else {
                off.add(c * lin);
                dropped.add(c * slack);
            }
        }
    }
    let (d, o, k, im) = (diag.value(), off.value(), kept.value(), improve.value());
    OrganizerDecomposition {
        diagonal_part: d,
        off_part: o,
        full_derivative: d + o,
        kept_sum: k,
        diagonal_improvement: im,
        dropped_slack: dropped.value(),
        bound: k - im,
        min_convexity_slack: if min_slack.is_finite() { min_slack } else { 0.0 },
        scale,
    }
}

fn check_f(gen: &Generator, m: &Measure, f: &[f64]) -> Result<()> {
    let n = gen.n_states();
    if f.len() != n || m.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: if f.len() != n { f.len() } else { m.len() } });
    }
    if let Some((index, &value)) = f.iter().enumerate().find(|(_, &x)| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveF { index, value });
    }
    Ok(())
}

pub fn organize_terms(gen: &Generator, m: &Measure, cr: &CouplingRates, phi: &Phi, f: &[f64]) -> Result<OrganizerDecomposition> {
    check_f(gen, m, f)?;
    let res = require_admissible(cr, gen)?;
    Ok(organize_resolved(&res, m, phi, f))
}

/// Precomputed admissible coupling for repeated organizer evaluations.
#[derive(Debug, Clone)]
pub struct Organizer<'a> {
    gen: &'a Generator,
    m: &'a Measure,
    res: Vec<Resolved>,
}

impl<'a> Organizer<'a> {
    pub fn new(gen: &'a Generator, m: &'a Measure, cr: &CouplingRates) -> Result<Organizer<'a>> {
        if m.len() != gen.n_states() {
            return Err(Error::DimensionMismatch { expected: gen.n_states(), found: m.len() });
        }
        Ok(Organizer { gen, m, res: require_admissible(cr, gen)? })
    }

    pub fn organize(&self, phi: &Phi, f: &[f64]) -> Result<OrganizerDecomposition> {
        check_f(self.gen, self.m, f)?;
        Ok(organize_resolved(&self.res, self.m, phi, f))
    }

    /// `min{rate(σ,e), rate(e,σ⁻¹)}` minimized over seeds.
    pub fn kappa_pp(&self, cr: &CouplingRates) -> f64 {
        cr.seeds
            .iter()
            .map(|s| {
                let mut a = 0.0;
                let mut b = 0.0;
                for &(g, gb, r) in &s.entries {
                    if g == s.sigma && gb == Move::Null {
                        a += r;
                    }
                    if g == Move::Null && gb == s.sigma.inverse() {
                        b += r;
                    }
                }
                f64::min(a, b)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Total merging rate minimized over seeds.
    pub fn kappa_ppp(&self) -> f64 {
        self.res
            .iter()
            .map(|s| s.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Seeds attaining the merging-rate minimum, by state and move.
    pub fn kappa_ppp_witness(&self) -> Option<(usize, Move)> {
        let mut best: Option<(f64, usize, Move)> = None;
        for s in &self.res {
            let v: f64 = s.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2).sum();
            if best.is_none_or(|b| v < b.0) {
                best = Some((v, s.i, s.sigma));
            }
        }
        best.map(|b| (b.1, b.2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiSufficiency {
    pub phi: Phi,
    /// Empirical minimum of `−kept_sum / (2E(φ'(f), f))` over sampled f.
    pub kappa_prime_emp: f64,
    /// Draw index attaining the minimum.
    pub witness_draw: Option<u64>,
    /// Constant implied for this `φ` by the sufficient condition.
    pub implied: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SufficientReport {
    pub kappa_pp: f64,
    pub kappa_ppp: f64,
    pub samples: usize,
    pub per_phi: Vec<PhiSufficiency>,
}

/// Constants implied by the gradient estimate `κ'` and the two table constants.
pub fn implied_constant(phi: &Phi, kappa_prime: f64, kappa_pp: f64, kappa_ppp: f64) -> f64 {
    match phi.exponent() {
        Some(a) if (a - 1.0).abs() < 1e-12 => kappa_prime + 2.0 * kappa_pp,
        Some(a) => kappa_prime + (a - 1.0) * kappa_ppp,
        None => kappa_prime,
    }
}

pub fn verify_sufficient_condition(
    gen: &Generator,
    m: &Measure,
    cr: &CouplingRates,
    phi_list: &[Phi],
    num_f: usize,
    seed: u64,
) -> Result<SufficientReport> {
    let org = Organizer::new(gen, m, cr)?;
    let kappa_pp = org.kappa_pp(cr);
    let kappa_ppp = org.kappa_ppp();
    let mut per_phi = Vec::new();
    for phi in phi_list {
        phi.validate()?;
        let mut best = f64::INFINITY;
        let mut witness = None;
        for draw in 0..num_f as u64 {
            let f = random_positive_function(gen.n_states(), seed, draw);
            let dec = org.organize(phi, &f)?;
            let e2 = 2.0 * crate::entropy::dirichlet_phi_unchecked(gen, m, phi, &f);
            if e2 > 0.0 {
                let v = -dec.kept_sum / e2;
                if v < best {
                    best = v;
                    witness = Some(draw);
                }
            }
        }
        let kp = if best.is_finite() { best } else { 0.0 };
        per_phi.push(PhiSufficiency {
            phi: phi.clone(),
            kappa_prime_emp: kp,
            witness_draw: witness,
            implied: implied_constant(phi, kp, kappa_pp, kappa_ppp),
        });
    }
    Ok(SufficientReport { kappa_pp, kappa_ppp, samples: num_f, per_phi })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CancellationSum {
    pub value: f64,
    /// Sum of absolute values of the terms.
    pub scale: f64,
}

/// `Σ_S c(η,σ) Σ_γ min{c(η,γ), c(ση,γ)} ∇_{γ,γ} f^φ(η,ση) m(η)`, with the
/// term `γ = σ` optionally excluded.
pub fn matched_move_sum(gen: &Generator, m: &Measure, phi: &Phi, f: &[f64], include_sigma: bool) -> Result<CancellationSum> {
    check_f(gen, m, f)?;
    let w = m.weights();
    let mut s = CompensatedSum::new();
    let mut scale = 0.0;
    for t in gen.transitions() {
        let (i, j) = (t.source, t.target);
        let base = phi.big(f[i], f[j]);
        for (k, &g) in gen.moves().iter().enumerate() {
            if !include_sigma && g == t.mv {
                continue;
            }
            let c = gen.rate(i, k).min(gen.rate(j, k));
            if c == 0.0 {
                continue;
            }
            let v = t.rate * c * (phi.big(f[gen.target(i, k)], f[gen.target(j, k)]) - base) * w[i];
            scale += v.abs();
            s.add(v);
        }
    }
    Ok(CancellationSum { value: s.value(), scale })
}

/// Sum of the `∇_{γ,γ̄} f^φ` terms whose images differ.
pub fn non_merging_sum(gen: &Generator, m: &Measure, cr: &CouplingRates, phi: &Phi, f: &[f64]) -> Result<CancellationSum> {
    check_f(gen, m, f)?;
    let res = require_admissible(cr, gen)?;
    let w = m.weights();
    let mut s = CompensatedSum::new();
    let mut scale = 0.0;
    for r in &res {
        let base = phi.big(f[r.i], f[r.j]);
        for &(x, y, c) in &r.entries {
            if x != y && c > 0.0 {
                let v = r.rate * c * (phi.big(f[x], f[y]) - base) * w[r.i];
                scale += v.abs();
                s.add(v);
            }
        }
    }
    Ok(CancellationSum { value: s.value(), scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_generator, truncate};
    use crate::entropy::{second_derivative_direct, second_derivative_fd, FD_STEP};

    fn flip() -> (Generator, Measure) {
        let g = build_generator(vec![vec![-1], vec![1]], vec![Move::Flip(0)], |_, _| 1.0).unwrap();
        (g, Measure::uniform(2).unwrap())
    }

    fn flip_natural() -> CouplingRates {
        // From (η, ση): flip the first walker onto the second and vice versa.
        CouplingRates::new(
            (0..2)
                .map(|i| Seed {
                    state: i,
                    sigma: Move::Flip(0),
                    entries: vec![(Move::Flip(0), Move::Null, 1.0), (Move::Null, Move::Flip(0), 1.0)],
                })
                .collect(),
        )
    }

    #[test]
    fn trivial_coupling_is_admissible() {
        let g = truncate(1, 4, vec![Move::Inc(0), Move::Dec(0)], |eta, mv| match mv {
            Move::Inc(_) => 1.0,
            _ => 0.5 * eta[0] as f64,
        })
        .unwrap();
        let cr = CouplingRates::trivial(&g);
        let rep = check_admissible(&cr, &g).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.max_row_violation, 0.0);
        let m = crate::chain::stationary_measure(&g).unwrap();
        let org = Organizer::new(&g, &m, &cr).unwrap();
        // Waiting entries (σ,e) and (e,σ⁻¹) merge, so the constants are the
        // smallest forward/backward rates: min{1, 0.5} and 1 + 0.5.
        assert_eq!(org.kappa_pp(&cr), 0.5);
        assert_eq!(org.kappa_ppp(), 1.5);
    }

    #[test]
    fn perturbed_entry_is_reported() {
        let (g, _) = flip();
        let mut cr = flip_natural();
        cr.seeds_mut()[1].entries[0].2 += 1e-6;
        let rep = check_admissible(&cr, &g).unwrap();
        assert!(!rep.passed);
        assert_eq!(rep.worst_seed, Some((1, Move::Flip(0))));
    }

    #[test]
    fn unknown_and_negative_seeds() {
        let (g, _) = flip();
        let bad = CouplingRates::new(vec![Seed { state: 0, sigma: Move::Inc(0), entries: vec![] }]);
        assert!(matches!(check_admissible(&bad, &g), Err(Error::UnknownSeed { .. })));
        let neg = CouplingRates::new(vec![Seed {
            state: 0,
            sigma: Move::Flip(0),
            entries: vec![(Move::Flip(0), Move::Null, -1.0)],
        }]);
        assert!(matches!(check_admissible(&neg, &g), Err(Error::NegativeCouplingRate { .. })));
    }

    #[test]
    fn organizer_on_flip_chain() {
        let (g, m) = flip();
        let cr = flip_natural();
        let f = [1.0, 2.0];
        let dec = organize_terms(&g, &m, &cr, &Phi::log(), &f).unwrap();
        let direct = second_derivative_direct(&g, &m, &Phi::log(), &f).unwrap();
        let (fd, _) = second_derivative_fd(&g, &m, &Phi::log(), &f, FD_STEP).unwrap();
        assert!((dec.full_derivative - direct).abs() <= 1e-12 * direct.abs());
        assert!((dec.full_derivative - fd).abs() <= 1e-6 * direct.abs());
        assert!(dec.bound >= dec.full_derivative - 1e-12);
        assert!(dec.min_convexity_slack >= -1e-12);
        let flat = organize_terms(&g, &m, &cr, &Phi::log(), &[3.0, 3.0]).unwrap();
        assert_eq!((flat.full_derivative, flat.bound, flat.kept_sum), (0.0, 0.0, 0.0));
    }

    #[test]
    fn inadmissible_rejected_by_organizer() {
        let (g, m) = flip();
        let mut cr = flip_natural();
        cr.seeds_mut()[0].entries.pop();
        assert!(matches!(organize_terms(&g, &m, &cr, &Phi::log(), &[1.0, 2.0]), Err(Error::InadmissibleCoupling { .. })));
    }

    #[test]
    fn coupled_generator_projects_to_marginals() {
        let g = truncate(1, 5, vec![Move::Inc(0), Move::Dec(0)], |eta, mv| match mv {
            Move::Inc(_) => 1.0,
            _ => eta[0] as f64,
        })
        .unwrap();
        let cr = CouplingRates::trivial(&g);
        let cg = coupled_generator(&cr, &g).unwrap();
        let f: Vec<f64> = (0..6).map(|k| (k as f64 * 0.7).cos()).collect();
        assert!(marginal_projection_error(&cg, &g, &f, false).unwrap() < 1e-12);
        assert!(marginal_projection_error(&cg, &g, &f, true).unwrap() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let cr = flip_natural();
        let text = cr.to_json();
        assert!(text.starts_with("[{\"eta\":0,\"sigma\":\"flip(0)\""));
        assert_eq!(CouplingRates::from_json(&text).unwrap(), cr);
    }
}
