//! Hardcore model: particles on the vertices of a graph with no two
//! neighbors occupied.

use super::{binary_states, validate_graph, Implied, KappaReport, ModelInstance, SeedBuilder};
use crate::chain::{build_generator, Measure, Move};
use crate::coupling::CouplingRates;
use crate::models::Family;
use crate::{Error, Result};

fn free_closed(adj: &[Vec<usize>], eta: &[i32], x: usize) -> bool {
    eta[x] == 0 && adj[x].iter().all(|&y| eta[y] == 0)
}

/// Arrivals at rate `ρ` on vertices with an empty closed neighborhood,
/// departures at rate 1.
pub fn hardcore(adj: &[Vec<usize>], rho: f64) -> Result<ModelInstance> {
    validate_graph(adj)?;
    let n = adj.len();
    if n < 2 {
        return Err(Error::InvalidParams("hardcore model needs a connected graph on at least 2 vertices".into()));
    }
    if n > 24 {
        return Err(Error::InvalidParams(format!("graph too large for enumeration: {n} vertices")));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidParams(format!("rho must be > 0, got {rho}")));
    }
    let states: Vec<Vec<i32>> = binary_states(n, 0, 1)
        .into_iter()
        .filter(|s| (0..n).all(|x| s[x] == 0 || adj[x].iter().all(|&y| s[y] == 0)))
        .collect();
    let moves: Vec<Move> = (0..n).flat_map(|x| [Move::Inc(x), Move::Dec(x)]).collect();
    let gen = build_generator(states, moves, |eta, mv| match mv {
        Move::Inc(x) if free_closed(adj, eta, x) => rho,
        Move::Dec(x) if eta[x] == 1 => 1.0,
        _ => 0.0,
    })?;
    let log_w: Vec<f64> = gen.states().iter().map(|s| s.iter().sum::<i32>() as f64 * rho.ln()).collect();
    let measure = Measure::from_log_weights(&log_w)?;

    let mut seeds = Vec::new();
    for s in 0..gen.n_states() {
        let eta = gen.state(s);
        for x in 0..n {
            if !free_closed(adj, eta, x) {
                continue;
            }
            let xi = gen.target_of(s, Move::Inc(x));
            let mut b = SeedBuilder::default();
            for (k, &g) in gen.moves().iter().enumerate() {
                b.add(g, g, gen.rate(s, k).min(gen.rate(xi, k)));
            }
            let mut free_neighbors = 0;
            for &y in &adj[x] {
                if free_closed(adj, eta, y) {
                    b.add(Move::Inc(y), Move::Dec(x), rho);
                    free_neighbors += 1;
                }
            }
            b.add(Move::Inc(x), Move::Null, rho);
            b.add(Move::Null, Move::Dec(x), 1.0 - rho * free_neighbors as f64);
            seeds.push(b.clone().finish(s, Move::Inc(x)));
            seeds.push(b.mirrored().finish(xi, Move::Dec(x)));
        }
    }
    seeds.sort_by(|a, b| (a.state, a.sigma).cmp(&(b.state, b.sigma)));

    let delta = adj.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let kappa = 1.0 - rho * (delta - 1.0);
    let bar = rho.min(1.0 - rho * delta);
    let mut rep = KappaReport::new(kappa, Some(bar), Implied {
        kappa_phi: kappa,
        kappa_1: kappa + 2.0 * bar,
        alpha_slope: kappa,
        alpha_offset: 0.0,
    });
    rep.detail("max_degree", delta);
    if rho * delta > 1.0 {
        rep.fail(format!("rho * max_degree <= 1 fails: {}", rho * delta));
    }
    Ok(ModelInstance {
        family: Family::Hardcore,
        label: format!("hardcore |V|={n} rho={rho}"),
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
    use crate::coupling::{check_admissible, Organizer};
    use crate::models::cycle_graph;
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_edge() {
        let m = hardcore(&[vec![1], vec![0]], 0.5).unwrap();
        assert_eq!(m.generator.n_states(), 3);
        assert_abs_diff_eq!(m.kappa.kappa, 1.0);
        assert_abs_diff_eq!(m.kappa.kappa_bar.unwrap(), 0.5);
        assert!(check_admissible(&m.coupling, &m.generator).unwrap().passed);
    }

    #[test]
    fn five_cycle() {
        let m = hardcore(&cycle_graph(5), 0.15).unwrap();
        assert_eq!(m.generator.n_states(), 11);
        assert_abs_diff_eq!(m.kappa.kappa, 0.85, epsilon = 1e-15);
        assert_abs_diff_eq!(m.kappa.kappa_bar.unwrap(), 0.15, epsilon = 1e-15);
        assert!(m.kappa.hypotheses_ok);
        assert!(check_reversibility(&m.generator, &m.measure).unwrap().passed);
        let adm = check_admissible(&m.coupling, &m.generator).unwrap();
        assert!(adm.passed, "{adm:?}");
        let org = Organizer::new(&m.generator, &m.measure, &m.coupling).unwrap();
        assert_abs_diff_eq!(org.kappa_pp(&m.coupling), 0.15, epsilon = 1e-12);
        assert!(org.kappa_ppp() >= m.kappa.kappa - 1e-12);
    }

    #[test]
    fn rejects_isolated_vertex() {
        assert!(hardcore(&[vec![]], 0.5).is_err());
        assert!(hardcore(&[vec![1], vec![0], vec![]], 0.5).is_err());
    }

    #[test]
    fn flags_large_fugacity() {
        let m = hardcore(&cycle_graph(4), 0.8).unwrap();
        assert!(!m.kappa.hypotheses_ok);
    }
}
