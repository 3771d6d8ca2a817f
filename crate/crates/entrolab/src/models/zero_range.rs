//! Zero-range dynamics: `N` particles on the complete graph with `L` sites;
//! a particle leaves site `x` at rate `c_x(η_x)/L` towards each other site.

use serde::{Deserialize, Serialize};

use super::{Implied, KappaReport, ModelInstance, SeedBuilder};
use crate::chain::{build_generator, Measure, Move};
use crate::coupling::CouplingRates;
use crate::models::Family;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SiteRates {
    /// `c_x(k) = k`.
    Linear,
    /// `c_x(k) = values[k]` at every site.
    Uniform { values: Vec<f64> },
    /// `c_x(k) = values[x][k]`.
    PerSite { values: Vec<Vec<f64>> },
}

impl SiteRates {
    fn table(&self, l: usize, n: usize) -> Result<Vec<Vec<f64>>> {
        let t: Vec<Vec<f64>> = match self {
            SiteRates::Linear => vec![(0..=n).map(|k| k as f64).collect(); l],
            SiteRates::Uniform { values } => vec![values.clone(); l],
            SiteRates::PerSite { values } => values.clone(),
        };
        if t.len() != l {
            return Err(Error::InvalidParams(format!("need rate tables for {l} sites, got {}", t.len())));
        }
        for (x, row) in t.iter().enumerate() {
            if row.len() < n + 1 {
                return Err(Error::InvalidParams(format!("site {x}: need c(0..={n}), got {} values", row.len())));
            }
            if row[0] != 0.0 {
                return Err(Error::InvalidParams(format!("site {x}: c(0) must be 0")));
            }
            if let Some(k) = (1..=n).find(|&k| !(row[k] > 0.0 && row[k].is_finite())) {
                return Err(Error::InvalidParams(format!("site {x}: c({k}) must be positive and finite")));
            }
        }
        Ok(t)
    }
}

/// All `η ∈ ℕ^L` with `|η| = N`, lexicographic.
fn compositions(l: usize, n: usize) -> Vec<Vec<i32>> {
    fn rec(l: usize, left: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if cur.len() + 1 == l {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(l, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(l, n as i32, &mut Vec::new(), &mut out);
    out
}

/// Measured increment bounds: smallest increment `c` and spread `δ` over
/// `k < N`.
pub fn increment_bounds(table: &[Vec<f64>], n: usize) -> (f64, f64) {
    let incs = table.iter().flat_map(|row| (0..n).map(move |k| row[k + 1] - row[k]));
    let (lo, hi) = incs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    (lo, hi - lo)
}

pub fn zero_range(l: usize, n: usize, rates: &SiteRates) -> Result<ModelInstance> {
    if l < 2 || n < 1 {
        return Err(Error::InvalidParams(format!("need L >= 2 and N >= 1, got L={l}, N={n}")));
    }
    let table = rates.table(l, n)?;
    let lf = l as f64;
    let moves: Vec<Move> =
        (0..l).flat_map(|x| (0..l).filter(move |&y| y != x).map(move |y| Move::Transfer(x, y))).collect();
    let gen = build_generator(compositions(l, n), moves, |eta, mv| match mv {
        Move::Transfer(x, _) => table[x][eta[x] as usize] / lf,
        _ => 0.0,
    })?;
    let log_w: Vec<f64> = gen
        .states()
        .iter()
        .map(|s| -s.iter().enumerate().map(|(x, &k)| (1..=k as usize).map(|j| table[x][j].ln()).sum::<f64>()).sum::<f64>())
        .collect();
    let measure = Measure::from_log_weights(&log_w)?;
    let (c, delta) = increment_bounds(&table, n);

    let mut seeds = Vec::new();
    for t in gen.transitions() {
        let Move::Transfer(x, y) = t.mv else { unreachable!() };
        let eta = gen.state(t.source);
        let (ex, ey) = (eta[x] as usize, eta[y] as usize);
        let drop_x = table[x][ex] - table[x][ex - 1];
        let rise_y = table[y][ey + 1] - table[y][ey];
        let mut b = SeedBuilder::default();
        for (k, &g) in gen.moves().iter().enumerate() {
            b.add(g, g, gen.rate(t.source, k).min(gen.rate(t.target, k)));
        }
        for w in (0..l).filter(|&w| w != x) {
            b.add(Move::Transfer(x, w), Move::Null, (drop_x - c) / lf);
        }
        for w in (0..l).filter(|&w| w != y) {
            b.add(Move::Null, Move::Transfer(y, w), (rise_y - c) / lf);
        }
        // Pairs (γ_xw, γ_yw); with w = y or w = x one side is the identity.
        for w in 0..l {
            let g = if w == x { Move::Null } else { Move::Transfer(x, w) };
            let gb = if w == y { Move::Null } else { Move::Transfer(y, w) };
            b.add(g, gb, c / lf);
        }
        seeds.push(b.finish(t.source, t.mv));
    }

    let mut rep = KappaReport::new(c - delta, None, Implied {
        kappa_phi: c - delta,
        kappa_1: c - delta,
        alpha_slope: c,
        alpha_offset: -delta,
    });
    rep.detail("c", c);
    rep.detail("delta", delta);
    if delta > c {
        rep.fail(format!("delta <= c fails: c = {c:.6e}, delta = {delta:.6e}"));
    }
    Ok(ModelInstance {
        family: Family::ZeroRange,
        label: format!("zero_range L={l} N={n}"),
        generator: gen,
        measure,
        coupling: CouplingRates::new(seeds),
        kappa: rep,
        lattice: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::check_reversibility;
    use crate::coupling::check_admissible;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_rates() {
        let m = zero_range(3, 4, &SiteRates::Linear).unwrap();
        assert_eq!(m.generator.n_states(), 15);
        assert_abs_diff_eq!(m.kappa.implied.kappa_1, 1.0);
        assert_abs_diff_eq!(m.kappa.implied.kappa_alpha(1.5), 1.5);
        assert!(check_reversibility(&m.generator, &m.measure).unwrap().passed);
        let adm = check_admissible(&m.coupling, &m.generator).unwrap();
        assert!(adm.passed, "{adm:?}");
    }

    #[test]
    fn perturbed_rates_measure_constants() {
        let values = vec![vec![0.0, 1.0, 2.2, 3.3, 4.5], vec![0.0, 1.1, 2.2, 3.4, 4.5], vec![0.0, 1.0, 2.0, 3.0, 4.0]];
        let m = zero_range(3, 4, &SiteRates::PerSite { values }).unwrap();
        assert_abs_diff_eq!(m.kappa.details["c"], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m.kappa.details["delta"], 0.2, epsilon = 1e-12);
        assert!(m.kappa.hypotheses_ok);
        assert!(check_reversibility(&m.generator, &m.measure).unwrap().passed);
        assert!(check_admissible(&m.coupling, &m.generator).unwrap().passed);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(zero_range(3, 2, &SiteRates::Uniform { values: vec![0.0, 1.0, 2.0] }).is_ok());
        assert!(zero_range(3, 2, &SiteRates::Uniform { values: vec![0.0, 1.0] }).is_err());
        assert!(zero_range(3, 2, &SiteRates::Uniform { values: vec![0.1, 1.0, 2.0] }).is_err());
    }
}
