//! Bernoulli–Laplace model: `N` particles on `L` sites, any particle jumps
//! to any empty site at rate 1.

use super::{binary_states, Implied, KappaReport, ModelInstance, SeedBuilder};
use crate::chain::{build_generator, Measure, Move};
use crate::coupling::CouplingRates;
use crate::models::Family;
use crate::{Error, Result};

pub fn bernoulli_laplace(l: usize, n: usize) -> Result<ModelInstance> {
    if !(0 < n && n < l) {
        return Err(Error::InvalidParams(format!("need 0 < N < L, got L={l}, N={n}")));
    }
    if l > 24 {
        return Err(Error::InvalidParams(format!("L={l} too large for enumeration")));
    }
    let states: Vec<Vec<i32>> =
        binary_states(l, 0, 1).into_iter().filter(|s| s.iter().sum::<i32>() as usize == n).collect();
    let moves: Vec<Move> = (0..l).flat_map(|i| (0..l).filter(move |&j| j != i).map(move |j| Move::Swap(i, j))).collect();
    let gen = build_generator(states, moves, |eta, mv| match mv {
        Move::Swap(i, j) => (eta[i] * (1 - eta[j])) as f64,
        _ => 0.0,
    })?;
    let measure = Measure::uniform(gen.n_states())?;

    let mut seeds = Vec::new();
    for t in gen.transitions() {
        let Move::Swap(i, j) = t.mv else { unreachable!() };
        let eta = gen.state(t.source);
        let mut b = SeedBuilder::default();
        for (k, &g) in gen.moves().iter().enumerate() {
            b.add(g, g, gen.rate(t.source, k).min(gen.rate(t.target, k)));
        }
        b.add(t.mv, Move::Null, 1.0);
        b.add(Move::Null, Move::Swap(j, i), 1.0);
        for o in (0..l).filter(|&o| o != i && o != j) {
            b.add(Move::Swap(i, o), Move::Swap(j, o), (1 - eta[o]) as f64);
            b.add(Move::Swap(o, j), Move::Swap(o, i), eta[o] as f64);
        }
        seeds.push(b.finish(t.source, t.mv));
    }

    let lf = l as f64;
    let mut rep = KappaReport::new(lf, Some(1.0), Implied {
        kappa_phi: lf,
        kappa_1: lf + 2.0,
        alpha_slope: lf,
        alpha_offset: 0.0,
    });
    rep.detail("kappa_pp", 1.0);
    rep.detail("kappa_ppp", lf);
    Ok(ModelInstance {
        family: Family::BernoulliLaplace,
        label: format!("bernoulli_laplace L={l} N={n}"),
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
    use approx::assert_abs_diff_eq;

    #[test]
    fn four_sites_two_particles() {
        let m = bernoulli_laplace(4, 2).unwrap();
        assert_eq!(m.generator.n_states(), 6);
        assert_eq!(m.kappa.implied.kappa_phi, 4.0);
        assert_eq!(m.kappa.implied.kappa_1, 6.0);
        assert_eq!(m.kappa.implied.kappa_alpha(2.0), 8.0);
        assert!(check_reversibility(&m.generator, &m.measure).unwrap().passed);
        assert!(check_admissible(&m.coupling, &m.generator).unwrap().passed);
        let org = Organizer::new(&m.generator, &m.measure, &m.coupling).unwrap();
        assert_abs_diff_eq!(org.kappa_pp(&m.coupling), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(org.kappa_ppp(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn two_sites_one_particle() {
        let m = bernoulli_laplace(2, 1).unwrap();
        assert_eq!(m.generator.n_states(), 2);
        for s in m.coupling.seeds() {
            assert!(s.entries.iter().all(|e| e.0 == Move::Null || e.1 == Move::Null || e.0 == e.1));
        }
        assert!(check_admissible(&m.coupling, &m.generator).unwrap().passed);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(bernoulli_laplace(3, 0).is_err());
        assert!(bernoulli_laplace(3, 3).is_err());
    }
}
