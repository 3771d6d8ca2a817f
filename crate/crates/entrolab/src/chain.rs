//! Finite continuous-time Markov chains generated by a set of moves.
//!
//! A [`Generator`] stores, for every enumerated state and every move, the
//! image state and the jump rate. Moves whose image is not enumerated can be
//! suppressed (truncation): the rate stays attached but the move acts as the
//! identity, so it contributes nothing to the generator.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Configuration = Vec<i32>;

/// A deterministic map on configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Move {
    /// The identity move `e`.
    Null,
    Inc(usize),
    Dec(usize),
    Flip(usize),
    /// Moves a particle from the first site to the second if the first is
    /// occupied and the second empty.
    Swap(usize, usize),
    /// Moves one particle from the first site to the second.
    Transfer(usize, usize),
}

impl Move {
    pub fn inverse(self) -> Move {
        match self {
            Move::Null => Move::Null,
            Move::Inc(i) => Move::Dec(i),
            Move::Dec(i) => Move::Inc(i),
            Move::Flip(i) => Move::Flip(i),
            Move::Swap(i, j) => Move::Swap(j, i),
            Move::Transfer(i, j) => Move::Transfer(j, i),
        }
    }

    /// Natural action on integer vectors. `None` means the move does not
    /// apply at `eta` and therefore acts as the identity there.
    pub fn apply(self, eta: &[i32]) -> Option<Configuration> {
        let d = eta.len();
        let mut out = eta.to_vec();
        match self {
            Move::Null => Some(out),
            Move::Inc(i) => {
                if i >= d {
                    return None;
                }
                out[i] += 1;
                Some(out)
            }
            Move::Dec(i) => {
                if i >= d || eta[i] <= 0 {
                    return None;
                }
                out[i] -= 1;
                Some(out)
            }
            Move::Flip(i) => {
                if i >= d {
                    return None;
                }
                out[i] = -out[i];
                Some(out)
            }
            Move::Swap(i, j) => {
                if i >= d || j >= d || i == j || eta[i] != 1 || eta[j] != 0 {
                    return None;
                }
                out[i] = 0;
                out[j] = 1;
                Some(out)
            }
            Move::Transfer(i, j) => {
                if i >= d || j >= d || i == j || eta[i] <= 0 {
                    return None;
                }
                out[i] -= 1;
                out[j] += 1;
                Some(out)
            }
        }
    }

    pub fn tag(self) -> String {
        match self {
            Move::Null => "e".to_string(),
            Move::Inc(i) => format!("inc({i})"),
            Move::Dec(i) => format!("dec({i})"),
            Move::Flip(i) => format!("flip({i})"),
            Move::Swap(i, j) => format!("swap({i}->{j})"),
            Move::Transfer(i, j) => format!("transfer({i}->{j})"),
        }
    }

    pub fn parse(tag: &str) -> Result<Move> {
        let bad = || Error::Parse(format!("unknown move tag {tag:?}"));
        if tag == "e" {
            return Ok(Move::Null);
        }
        let open = tag.find('(').ok_or_else(bad)?;
        if !tag.ends_with(')') {
            return Err(bad());
        }
        let name = &tag[..open];
        let inner = &tag[open + 1..tag.len() - 1];
        let one = || inner.parse::<usize>().map_err(|_| bad());
        let two = || -> Result<(usize, usize)> {
            let (a, b) = inner.split_once("->").ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        };
        match name {
            "inc" => Ok(Move::Inc(one()?)),
            "dec" => Ok(Move::Dec(one()?)),
            "flip" => Ok(Move::Flip(one()?)),
            "swap" => two().map(|(a, b)| Move::Swap(a, b)),
            "transfer" => two().map(|(a, b)| Move::Transfer(a, b)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl From<Move> for String {
    fn from(m: Move) -> String {
        m.tag()
    }
}

impl TryFrom<String> for Move {
    type Error = Error;
    fn try_from(s: String) -> Result<Move> {
        Move::parse(&s)
    }
}

/// What to do with a positive-rate move whose image is not enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutsidePolicy {
    Reject,
    Suppress,
}

#[derive(Debug, Clone)]
pub struct Generator {
    states: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
    moves: Vec<Move>,
    move_index: HashMap<Move, usize>,
    target: Vec<usize>,
    rate: Vec<f64>,
    suppressed: Vec<bool>,
}

/// One positive-rate entry of the generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub source: usize,
    pub mv: Move,
    pub target: usize,
    pub rate: f64,
    pub suppressed: bool,
}

pub fn build_generator<F>(states: Vec<Configuration>, moves: Vec<Move>, rate_fn: F) -> Result<Generator>
where
    F: FnMut(&[i32], Move) -> f64,
{
    Generator::build(states, moves, rate_fn, OutsidePolicy::Reject)
}

/// All points of `{0..=n}^d` in lexicographic order.
pub fn box_states(d: usize, n: usize) -> Vec<Configuration> {
    let mut out = Vec::new();
    let mut cur = vec![0i32; d];
    loop {
        out.push(cur.clone());
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if (cur[k] as usize) < n {
                cur[k] += 1;
                for c in cur.iter_mut().skip(k + 1) {
                    *c = 0;
                }
                break;
            }
        }
    }
}

/// Restricts a chain on `ℕ^d` to the box `{0..=n}^d`. Moves leaving the box
/// keep their rate but act as the identity.
pub fn truncate<F>(d: usize, n: usize, moves: Vec<Move>, rate_fn: F) -> Result<Generator>
where
    F: FnMut(&[i32], Move) -> f64,
{
    if n < 1 {
        return Err(Error::InvalidParams("box size n must be at least 1".into()));
    }
    Generator::build(box_states(d, n), moves, rate_fn, OutsidePolicy::Suppress)
}

impl Generator {
    pub fn build<F>(
        states: Vec<Configuration>,
        moves: Vec<Move>,
        mut rate_fn: F,
        policy: OutsidePolicy,
    ) -> Result<Generator>
    where
        F: FnMut(&[i32], Move) -> f64,
    {
        let mut index = HashMap::with_capacity(states.len());
        if let Some(first) = states.first() {
            let d = first.len();
            for s in &states {
                if s.len() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: s.len() });
                }
            }
        }
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidParams(format!("state {s:?} listed twice")));
            }
        }
        let mut move_index = HashMap::with_capacity(moves.len());
        for (k, &m) in moves.iter().enumerate() {
            if move_index.insert(m, k).is_some() {
                return Err(Error::InvalidParams(format!("move {m} listed twice")));
            }
        }
        let nm = moves.len();
        let mut target = vec![0usize; states.len() * nm];
        let mut rate = vec![0.0; states.len() * nm];
        let mut suppressed = vec![false; states.len() * nm];
        for (i, s) in states.iter().enumerate() {
            for (k, &mv) in moves.iter().enumerate() {
                let r = rate_fn(s, mv);
                if !r.is_finite() {
                    return Err(Error::NonFinite { what: format!("rate at state {i} for move {mv}") });
                }
                if r < 0.0 {
                    return Err(Error::NegativeRate { state: i, mv: mv.tag(), rate: r });
                }
                let slot = i * nm + k;
                target[slot] = i;
                match mv.apply(s) {
                    Some(img) if mv == Move::Null => {
                        debug_assert_eq!(&img, s);
                        rate[slot] = r;
                    }
                    Some(img) if &img == s => {}
                    None => {}
                    Some(img) => match index.get(&img) {
                        Some(&j) => {
                            target[slot] = j;
                            rate[slot] = r;
                        }
                        None if r == 0.0 => {}
                        None => match policy {
                            OutsidePolicy::Reject => {
                                return Err(Error::TargetOutsideSpace { state: i, mv: mv.tag() })
                            }
                            OutsidePolicy::Suppress => {
                                rate[slot] = r;
                                suppressed[slot] = true;
                            }
                        },
                    },
                }
            }
        }
        Ok(Generator { states, index, moves, move_index, target, rate, suppressed })
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_moves(&self) -> usize {
        self.moves.len()
    }

    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &[i32] {
        &self.states[i]
    }

    pub fn index_of(&self, eta: &[i32]) -> Option<usize> {
        self.index.get(eta).copied()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    pub fn move_position(&self, mv: Move) -> Option<usize> {
        self.move_index.get(&mv).copied()
    }

    /// Rate `c(η, σ)` by move position. Suppressed moves keep their rate.
    #[inline]
    pub fn rate(&self, i: usize, k: usize) -> f64 {
        self.rate[i * self.moves.len() + k]
    }

    /// Image `σ(η)` by move position, with the identity where `σ` does not act.
    #[inline]
    pub fn target(&self, i: usize, k: usize) -> usize {
        self.target[i * self.moves.len() + k]
    }

    #[inline]
    pub fn is_suppressed(&self, i: usize, k: usize) -> bool {
        self.suppressed[i * self.moves.len() + k]
    }

    /// Rate of an arbitrary move of `G*`; the null move and moves outside the
    /// set have rate zero unless the null move was listed explicitly.
    pub fn rate_of(&self, i: usize, mv: Move) -> f64 {
        self.move_position(mv).map_or(0.0, |k| self.rate(i, k))
    }

    /// Image of `i` under a move of `G*`. Moves outside the move set act by
    /// their natural action when the image is enumerated, else as identity.
    pub fn target_of(&self, i: usize, mv: Move) -> usize {
        match self.move_position(mv) {
            Some(k) => self.target(i, k),
            None => mv
                .apply(&self.states[i])
                .and_then(|img| self.index_of(&img))
                .unwrap_or(i),
        }
    }

    pub fn rates_row(&self, i: usize) -> &[f64] {
        let nm = self.moves.len();
        &self.rate[i * nm..(i + 1) * nm]
    }

    pub fn targets_row(&self, i: usize) -> &[usize] {
        let nm = self.moves.len();
        &self.target[i * nm..(i + 1) * nm]
    }

    pub fn transitions(&self) -> impl Iterator<Item = Transition> + '_ {
        let nm = self.moves.len();
        (0..self.rate.len()).filter(|&s| self.rate[s] > 0.0).map(move |s| Transition {
            source: s / nm,
            mv: self.moves[s % nm],
            target: self.target[s],
            rate: self.rate[s],
            suppressed: self.suppressed[s],
        })
    }

    pub fn n_transitions(&self) -> usize {
        self.rate.iter().filter(|&&r| r > 0.0).count()
    }

    /// Total rate of jumps that actually change the state.
    pub fn exit_rate(&self, i: usize) -> f64 {
        self.rates_row(i)
            .iter()
            .zip(self.targets_row(i))
            .filter(|(_, &j)| j != i)
            .map(|(r, _)| r)
            .sum()
    }

    pub fn max_exit_rate(&self) -> f64 {
        (0..self.n_states()).map(|i| self.exit_rate(i)).fold(0.0, f64::max)
    }

    /// Dense rate matrix `Q` with `Q[i][j]` the total rate from `i` to `j`.
    pub fn rate_matrix(&self) -> DMatrix<f64> {
        let n = self.n_states();
        let mut q = DMatrix::zeros(n, n);
        for t in self.transitions() {
            if t.target != t.source {
                q[(t.source, t.target)] += t.rate;
                q[(t.source, t.source)] -= t.rate;
            }
        }
        q
    }

    /// Returns a copy with one rate replaced; used for fault injection.
    pub fn with_rate(&self, i: usize, mv: Move, rate: f64) -> Result<Generator> {
        let k = self
            .move_position(mv)
            .ok_or_else(|| Error::InvalidParams(format!("move {mv} not in move set")))?;
        if !rate.is_finite() {
            return Err(Error::NonFinite { what: "replacement rate".into() });
        }
        if rate < 0.0 {
            return Err(Error::NegativeRate { state: i, mv: mv.tag(), rate });
        }
        let mut g = self.clone();
        g.rate[i * self.moves.len() + k] = rate;
        Ok(g)
    }

    /// JSON export with rates rendered to 17 significant digits.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"states\":[");
        for (i, s) in self.states.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push('[');
            let parts: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            out.push_str(&parts.join(","));
            out.push(']');
        }
        out.push_str("],\"moves\":[");
        for (k, m) in self.moves.iter().enumerate() {
            if k > 0 {
                out.push(',');
            }
            out.push_str(&format!("{{\"id\":\"{}\",\"inverse\":\"{}\"}}", m.tag(), m.inverse().tag()));
        }
        out.push_str("],\"transitions\":[");
        for (n, t) in self.transitions().enumerate() {
            if n > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},\"{}\",{},{:.16e}]", t.source, t.mv.tag(), t.target, t.rate));
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(text: &str) -> Result<Generator> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let bad = |what: &str| Error::Parse(format!("generator json: {what}"));
        let states: Vec<Configuration> = serde_json::from_value(v["states"].clone())
            .map_err(|_| bad("states"))?;
        let moves: Vec<Move> = v["moves"]
            .as_array()
            .ok_or_else(|| bad("moves"))?
            .iter()
            .map(|m| m["id"].as_str().ok_or_else(|| bad("move id")).and_then(Move::parse))
            .collect::<Result<_>>()?;
        let mut table: HashMap<(usize, Move), (usize, f64)> = HashMap::new();
        for t in v["transitions"].as_array().ok_or_else(|| bad("transitions"))? {
            let row = t.as_array().ok_or_else(|| bad("transition row"))?;
            if row.len() != 4 {
                return Err(bad("transition row length"));
            }
            let src = row[0].as_u64().ok_or_else(|| bad("source"))? as usize;
            let mv = Move::parse(row[1].as_str().ok_or_else(|| bad("move"))?)?;
            let dst = row[2].as_u64().ok_or_else(|| bad("target"))? as usize;
            let r = row[3].as_f64().ok_or_else(|| bad("rate"))?;
            if src >= states.len() || dst >= states.len() {
                return Err(bad("state index out of range"));
            }
            table.insert((src, mv), (dst, r));
        }
        let lookup: HashMap<Configuration, usize> =
            states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut gen = Generator::build(
            states,
            moves,
            |eta, mv| {
                let i = lookup[eta];
                match table.get(&(i, mv)) {
                    Some(&(dst, r)) if dst != i || mv == Move::Null => r,
                    _ => 0.0,
                }
            },
            OutsidePolicy::Reject,
        )?;
        // Suppressed entries appear as non-null self transitions.
        let nm = gen.moves.len();
        for (&(i, mv), &(dst, r)) in &table {
            if dst == i && mv != Move::Null && r > 0.0 {
                if let Some(k) = gen.move_position(mv) {
                    gen.rate[i * nm + k] = r;
                    gen.suppressed[i * nm + k] = true;
                }
            }
        }
        Ok(gen)
    }
}

/// A probability vector on the states of a generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure {
    weights: Vec<f64>,
}

impl Measure {
    /// Normalizes nonnegative weights.
    pub fn new(weights: Vec<f64>) -> Result<Measure> {
        let mut total = 0.0;
        for &w in &weights {
            if !w.is_finite() {
                return Err(Error::NonFinite { what: "measure weight".into() });
            }
            if w < 0.0 {
                return Err(Error::Domain(format!("negative measure weight {w}")));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::Domain("measure has zero mass".into()));
        }
        Ok(Measure { weights: weights.into_iter().map(|w| w / total).collect() })
    }

    /// Builds `∝ exp(log_weights)` with a max shift for stability.
    pub fn from_log_weights(log_weights: &[f64]) -> Result<Measure> {
        let top = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !top.is_finite() {
            return Err(Error::NonFinite { what: "log weights".into() });
        }
        Measure::new(log_weights.iter().map(|l| (l - top).exp()).collect())
    }

    pub fn uniform(n: usize) -> Result<Measure> {
        Measure::new(vec![1.0; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mean(&self, f: &[f64]) -> f64 {
        self.weights.iter().zip(f).map(|(m, x)| m * x).sum()
    }

    pub fn max_abs_diff(&self, other: &Measure) -> f64 {
        self.weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn reach(adj: &[Vec<usize>], start: usize, alive: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if alive[w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Number of strongly connected components of the jump graph.
pub fn communicating_classes(gen: &Generator) -> usize {
    let n = gen.n_states();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for t in gen.transitions() {
        if t.target != t.source {
            fwd[t.source].push(t.target);
            bwd[t.target].push(t.source);
        }
    }
    let mut alive = vec![true; n];
    let mut count = 0;
    for v in 0..n {
        if !alive[v] {
            continue;
        }
        let a = reach(&fwd, v, &alive);
        let b = reach(&bwd, v, &alive);
        for w in 0..n {
            if a[w] && b[w] {
                alive[w] = false;
            }
        }
        count += 1;
    }
    count
}

const DENSE_LIMIT: usize = 4000;

/// Solves `m Q = 0`, `Σ m = 1`.
pub fn stationary_measure(gen: &Generator) -> Result<Measure> {
    let n = gen.n_states();
    if n == 0 {
        return Err(Error::InvalidParams("empty state space".into()));
    }
    let classes = communicating_classes(gen);
    if classes > 1 {
        return Err(Error::Reducible { components: classes });
    }
    let weights = if n <= DENSE_LIMIT {
        let q = gen.rate_matrix();
        let mut a = q.transpose();
        for j in 0..n {
            a[(n - 1, j)] = 1.0;
        }
        let mut b = nalgebra::DVector::zeros(n);
        b[n - 1] = 1.0;
        let sol = a
            .lu()
            .solve(&b)
            .ok_or_else(|| Error::EigenFailure("singular system for the invariant vector".into()))?;
        sol.iter().map(|&x| x.max(0.0)).collect()
    } else {
        power_iteration(gen)
    };
    Measure::new(weights)
}

fn power_iteration(gen: &Generator) -> Vec<f64> {
    let n = gen.n_states();
    let lambda = gen.max_exit_rate() * 1.05;
    let mut mu = vec![1.0 / n as f64; n];
    for _ in 0..200_000 {
        let dq = apply_adjoint_unchecked(gen, &mu);
        let mut change = 0.0f64;
        for (m, d) in mu.iter_mut().zip(&dq) {
            let step = d / lambda;
            *m += step;
            change = change.max(step.abs());
        }
        if change < 1e-16 {
            break;
        }
    }
    mu
}

/// `‖m Q‖∞`.
pub fn stationarity_residual(gen: &Generator, m: &Measure) -> f64 {
    apply_adjoint_unchecked(gen, m.weights()).iter().fold(0.0, |a, x| a.max(x.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReversibilityReport {
    pub max_violation: f64,
    /// Source state, move and target of the worst transition.
    pub worst: Option<(usize, Move, usize)>,
    pub passed: bool,
}

pub const DETAILED_BALANCE_TOL: f64 = 1e-10;

pub fn check_reversibility(gen: &Generator, m: &Measure) -> Result<ReversibilityReport> {
    if m.len() != gen.n_states() {
        return Err(Error::DimensionMismatch { expected: gen.n_states(), found: m.len() });
    }
    let w = m.weights();
    let mut worst = None;
    let mut max_violation = 0.0f64;
    for t in gen.transitions() {
        if t.target == t.source {
            continue;
        }
        let inv = t.mv.inverse();
        let kinv = gen
            .move_position(inv)
            .ok_or_else(|| Error::MissingInverse { mv: t.mv.tag() })?;
        let back = if gen.target(t.target, kinv) == t.source { gen.rate(t.target, kinv) } else { 0.0 };
        let v = (w[t.source] * t.rate - w[t.target] * back).abs();
        if v > max_violation || worst.is_none() {
            max_violation = max_violation.max(v);
            worst = Some((t.source, t.mv, t.target));
        }
    }
    Ok(ReversibilityReport { max_violation, worst, passed: max_violation <= DETAILED_BALANCE_TOL })
}

fn check_len(gen: &Generator, f: &[f64]) -> Result<()> {
    if f.len() != gen.n_states() {
        return Err(Error::DimensionMismatch { expected: gen.n_states(), found: f.len() });
    }
    Ok(())
}

/// `(Lf)(η) = Σ_σ c(η,σ)(f(ση) − f(η))`.
pub fn apply_generator(gen: &Generator, f: &[f64]) -> Result<Vec<f64>> {
    check_len(gen, f)?;
    Ok(apply_unchecked(gen, f))
}

pub(crate) fn apply_unchecked(gen: &Generator, f: &[f64]) -> Vec<f64> {
    (0..gen.n_states())
        .map(|i| {
            let fi = f[i];
            gen.rates_row(i)
                .iter()
                .zip(gen.targets_row(i))
                .map(|(r, &j)| if *r > 0.0 { r * (f[j] - fi) } else { 0.0 })
                .sum()
        })
        .collect()
}

/// Row-vector action `μ ↦ μQ`.
pub fn apply_adjoint(gen: &Generator, mu: &[f64]) -> Result<Vec<f64>> {
    check_len(gen, mu)?;
    Ok(apply_adjoint_unchecked(gen, mu))
}

fn apply_adjoint_unchecked(gen: &Generator, mu: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mu.len()];
    for i in 0..gen.n_states() {
        for (r, &j) in gen.rates_row(i).iter().zip(gen.targets_row(i)) {
            if *r > 0.0 && j != i {
                let flow = mu[i] * r;
                out[j] += flow;
                out[i] -= flow;
            }
        }
    }
    out
}

fn uniformize<F>(x: &[f64], lambda: f64, t: f64, tol: f64, mut step: F) -> Vec<f64>
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let chunks = ((lambda * t) / 40.0).ceil().max(1.0) as usize;
    let dt = t / chunks as f64;
    let chunk_tol = tol / chunks as f64;
    let a = lambda * dt;
    let mut cur = x.to_vec();
    for _ in 0..chunks {
        let mut w = (-a).exp();
        let mut cum = w;
        let mut acc: Vec<f64> = cur.iter().map(|v| w * v).collect();
        let mut v = cur.clone();
        let mut k = 0usize;
        while 1.0 - cum > chunk_tol {
            k += 1;
            let qv = step(&v);
            for (vi, q) in v.iter_mut().zip(&qv) {
                *vi += q / lambda;
            }
            w *= a / k as f64;
            cum += w;
            for (s, vi) in acc.iter_mut().zip(&v) {
                *s += w * vi;
            }
            if k as f64 > a + 10.0 && w < 1e-20 {
                break;
            }
        }
        // Renormalizing by the accumulated Poisson mass keeps constants exact.
        for s in acc.iter_mut() {
            *s /= cum;
        }
        cur = acc;
    }
    cur
}

fn check_time(gen: &Generator, t: f64, tol: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be finite and nonnegative, got {t}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let lambda = gen.max_exit_rate();
    if !lambda.is_finite() {
        return Err(Error::NonFinite { what: "uniformization rate".into() });
    }
    Ok(lambda)
}

/// `S_t f` by uniformization.
pub fn evolve(gen: &Generator, f: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    check_len(gen, f)?;
    let lambda = check_time(gen, t, tol)?;
    if t == 0.0 || lambda == 0.0 {
        return Ok(f.to_vec());
    }
    Ok(uniformize(f, lambda, t, tol, |v| apply_unchecked(gen, v)))
}

/// `μ S_t` by uniformization on row vectors.
pub fn evolve_law(gen: &Generator, mu: &[f64], t: f64, tol: f64) -> Result<Vec<f64>> {
    check_len(gen, mu)?;
    let lambda = check_time(gen, t, tol)?;
    if t == 0.0 || lambda == 0.0 {
        return Ok(mu.to_vec());
    }
    Ok(uniformize(mu, lambda, t, tol, |v| apply_adjoint_unchecked(gen, v)))
}

/// Taylor series for `exp(tQ) f`, valid for small `|t|` of either sign.
pub fn taylor_flow(gen: &Generator, f: &[f64], t: f64) -> Result<Vec<f64>> {
    check_len(gen, f)?;
    let lambda = gen.max_exit_rate();
    if !(t.abs() * lambda <= 2.0) {
        return Err(Error::Domain(format!("taylor flow needs |t|·Λ ≤ 2, got {}", t.abs() * lambda)));
    }
    let mut sum = f.to_vec();
    let mut term = f.to_vec();
    for k in 1..200 {
        let q = apply_unchecked(gen, &term);
        let c = t / k as f64;
        term = q.into_iter().map(|x| c * x).collect();
        let tn = term.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (s, x) in sum.iter_mut().zip(&term) {
            *s += x;
        }
        let sn = sum.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        if tn <= 1e-18 * sn.max(1e-300) {
            break;
        }
    }
    Ok(sum)
}
