//! Model families with their rates, reversible measures, coupling tables and
//! closed-form curvature constants.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::chain::{Generator, Measure, Move};
use crate::coupling::{CouplingRates, Seed};
use crate::phi::Phi;

pub mod bernoulli_laplace;
pub mod glauber;
pub mod hardcore;
pub mod irw;
pub mod spec;
pub mod zero_range;

pub use bernoulli_laplace::bernoulli_laplace;
pub use glauber::{build_glauber, curie_weiss, ising, ising_closed_forms, ising_critical_beta, CurieWeiss};
pub use hardcore::hardcore;
pub use irw::{build_irw, irw_kappas, oddly_convex_kappa, symmetric_interaction_kappa, tilde_h, Potential};
pub use spec::{Family, ModelSpec};
pub use zero_range::{zero_range, SiteRates};

/// Constants implied by a model's theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Implied {
    /// Valid for every admissible φ.
    pub kappa_phi: f64,
    /// Log-Sobolev constant.
    pub kappa_1: f64,
    /// `κ_α = alpha_slope·α + alpha_offset` for `α ∈ (1, 2]`.
    pub alpha_slope: f64,
    pub alpha_offset: f64,
}

impl Implied {
    pub fn kappa_alpha(&self, alpha: f64) -> f64 {
        self.alpha_slope * alpha + self.alpha_offset
    }

    /// Constant claimed for a given φ.
    pub fn for_phi(&self, phi: &Phi) -> f64 {
        match phi.exponent() {
            Some(a) if (a - 1.0).abs() < 1e-12 => self.kappa_1,
            Some(a) => self.kappa_alpha(a),
            None => self.kappa_phi,
        }
    }

    /// `κ_φ = κ`, `κ_α = ακ` and `κ₁ = κ`.
    pub fn proportional(kappa: f64) -> Implied {
        Implied { kappa_phi: kappa, kappa_1: kappa, alpha_slope: kappa, alpha_offset: 0.0 }
    }
}

/// Per-state increments of the interacting random walks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IrwTables {
    pub d: usize,
    pub n: usize,
    /// `κ⁺(η, i)` at index `state·d + i`.
    pub kappa_plus: Vec<f64>,
    pub kappa_minus: Vec<f64>,
    pub interior_min_plus: f64,
    pub interior_min_minus: f64,
    /// Smallest `κ⁺ + κ⁻` over states with `ηᵢ = n` (truncated gradients).
    pub boundary_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaReport {
    pub kappa: f64,
    pub kappa_bar: Option<f64>,
    pub implied: Implied,
    pub hypotheses_ok: bool,
    pub failed_hypothesis: Option<String>,
    /// Further named quantities, e.g. exhaustive minima next to closed forms.
    pub details: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub irw: Option<IrwTables>,
}

impl KappaReport {
    pub fn new(kappa: f64, kappa_bar: Option<f64>, implied: Implied) -> KappaReport {
        KappaReport {
            kappa,
            kappa_bar,
            implied,
            hypotheses_ok: true,
            failed_hypothesis: None,
            details: BTreeMap::new(),
            irw: None,
        }
    }

    /// Records a failed hypothesis, keeping the first one named.
    pub fn fail(&mut self, what: impl Into<String>) {
        self.hypotheses_ok = false;
        if self.failed_hypothesis.is_none() {
            self.failed_hypothesis = Some(what.into());
        }
    }

    pub fn detail(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), value);
    }
}

/// Box geometry of a truncated lattice model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Lattice {
    pub d: usize,
    pub n: usize,
}

#[derive(Debug, Clone)]
pub struct ModelInstance {
    pub family: Family,
    pub label: String,
    pub generator: Generator,
    /// Closed-form reversible measure.
    pub measure: Measure,
    pub coupling: CouplingRates,
    pub kappa: KappaReport,
    pub lattice: Option<Lattice>,
}

/// Accumulates coupling entries for one seed. Rounding residue below
/// `1e-13` relative to the largest entry is dropped; genuinely negative
/// entries are kept so admissibility reports them.
#[derive(Debug, Clone, Default)]
pub(crate) struct SeedBuilder {
    entries: BTreeMap<(Move, Move), f64>,
}

impl SeedBuilder {
    pub(crate) fn add(&mut self, g: Move, gb: Move, r: f64) {
        if r != 0.0 {
            *self.entries.entry((g, gb)).or_insert(0.0) += r;
        }
    }

    /// Swaps the roles of the two walkers.
    pub(crate) fn mirrored(self) -> SeedBuilder {
        SeedBuilder { entries: self.entries.into_iter().map(|((g, gb), r)| ((gb, g), r)).collect() }
    }

    pub(crate) fn finish(self, state: usize, sigma: Move) -> Seed {
        let scale = self.entries.values().fold(0.0f64, |a, r| a.max(r.abs()));
        let entries = self
            .entries
            .into_iter()
            .filter(|&(_, r)| r > 0.0 || r < -1e-13 * scale)
            .map(|((g, gb), r)| (g, gb, r))
            .collect();
        Seed { state, sigma, entries }
    }
}

/// Simple undirected graph given as adjacency lists; validates symmetry,
/// absence of loops and duplicate edges, and connectivity.
pub(crate) fn validate_graph(adj: &[Vec<usize>]) -> crate::Result<()> {
    use crate::Error;
    let n = adj.len();
    for (x, nb) in adj.iter().enumerate() {
        let mut seen = std::collections::HashSet::new();
        for &y in nb {
            if y >= n {
                return Err(Error::NonSimpleGraph(format!("vertex {x} has neighbor {y} out of range")));
            }
            if y == x {
                return Err(Error::NonSimpleGraph(format!("self-loop at {x}")));
            }
            if !seen.insert(y) {
                return Err(Error::NonSimpleGraph(format!("duplicate edge {x}-{y}")));
            }
            if !adj[y].contains(&x) {
                return Err(Error::NonSimpleGraph(format!("edge {x}-{y} is not symmetric")));
            }
        }
    }
    if n > 0 {
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidParams("graph must be connected".into()));
        }
    }
    Ok(())
}

/// Cycle graph on `n` vertices.
pub fn cycle_graph(n: usize) -> Vec<Vec<usize>> {
    (0..n).map(|x| vec![(x + n - 1) % n, (x + 1) % n]).collect()
}

/// All vectors in `{lo, hi}^n`, lexicographic.
pub(crate) fn binary_states(n: usize, lo: i32, hi: i32) -> Vec<Vec<i32>> {
    (0..1usize << n)
        .map(|mask| (0..n).map(|k| if mask >> (n - 1 - k) & 1 == 1 { hi } else { lo }).collect())
        .collect()
}
