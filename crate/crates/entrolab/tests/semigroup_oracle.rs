use approx::assert_relative_eq;
use entrolab::chain::{evolve, evolve_law, stationary_measure, truncate};
use entrolab::models::{build_glauber, build_irw, Potential};
use entrolab::sampling::random_positive_function;
use entrolab::{Generator, Move};
use nalgebra::DMatrix;
use proptest::prelude::*;

/// `exp(A)` by scaling and squaring with a degree-18 Taylor polynomial.
fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = a.abs().row_sum().max();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a / 2f64.powi(s);
    let n = a.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=18 {
        term = &term * &b / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

fn birth_death(n: usize, up: f64, down: f64) -> Generator {
    truncate(1, n, vec![Move::Inc(0), Move::Dec(0)], |eta, mv| match mv {
        Move::Inc(_) => up * (1.0 + 0.3 * eta[0] as f64).recip(),
        _ => down * eta[0] as f64,
    })
    .unwrap()
}

fn check_against_dense(gen: &Generator, seed: u64, t: f64) {
    let q = gen.rate_matrix();
    let p = expm(&(q * t));
    let f = random_positive_function(gen.n_states(), seed, 0);
    let dense = &p * nalgebra::DVector::from_column_slice(&f);
    let fast = evolve(gen, &f, t, 1e-14).unwrap();
    for (a, b) in fast.iter().zip(dense.iter()) {
        assert_relative_eq!(*a, *b, max_relative = 1e-9, epsilon = 1e-12);
    }
    let mu = random_positive_function(gen.n_states(), seed, 1);
    let total: f64 = mu.iter().sum();
    let mu: Vec<f64> = mu.iter().map(|x| x / total).collect();
    let dense_law = nalgebra::DVector::from_column_slice(&mu).transpose() * &p;
    let fast_law = evolve_law(gen, &mu, t, 1e-14).unwrap();
    for (a, b) in fast_law.iter().zip(dense_law.iter()) {
        assert_relative_eq!(*a, *b, max_relative = 1e-9, epsilon = 1e-13);
    }
}

#[test]
fn uniformization_matches_dense_exponential() {
    check_against_dense(&birth_death(20, 2.0, 0.7), 1, 0.8);
    check_against_dense(&birth_death(60, 3.0, 1.0), 2, 5.0);
    let irw = build_irw(&Potential::Quadratic { beta: 0.3 }, &Potential::Poisson { lambda: 1.0 }, 2, 6).unwrap();
    check_against_dense(&irw.generator, 3, 1.7);
    let h = |e: &[i32]| e.windows(2).map(|w| (w[0] * w[1]) as f64).sum::<f64>() + 0.4 * e[0] as f64;
    let spins = build_glauber(6, &h, 0.8).unwrap();
    check_against_dense(&spins.generator, 4, 12.0);
}

#[test]
fn stationary_measure_matches_closed_forms() {
    let irw = build_irw(&Potential::Quadratic { beta: 0.3 }, &Potential::Poisson { lambda: 1.0 }, 2, 4).unwrap();
    let m = stationary_measure(&irw.generator).unwrap();
    assert!(m.max_abs_diff(&irw.measure) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn semigroup_property(s in 0.0f64..2.0, t in 0.0f64..2.0, seed in 0u64..1000) {
        let gen = birth_death(15, 1.5, 0.8);
        let f = random_positive_function(gen.n_states(), seed, 0);
        let once = evolve(&gen, &f, s + t, 1e-14).unwrap();
        let twice = evolve(&gen, &evolve(&gen, &f, s, 1e-14).unwrap(), t, 1e-14).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1.0));
        }
    }

    #[test]
    fn law_evolution_conserves_mass(t in 0.0f64..10.0, seed in 0u64..1000) {
        let gen = birth_death(25, 2.0, 0.5);
        let mu = random_positive_function(gen.n_states(), seed, 0);
        let total: f64 = mu.iter().sum();
        let mu: Vec<f64> = mu.iter().map(|x| x / total).collect();
        let out = evolve_law(&gen, &mu, t, 1e-13).unwrap();
        prop_assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(out.iter().all(|x| *x >= 0.0));
    }

    #[test]
    fn constants_are_invariant(t in 0.0f64..5.0, c in 0.1f64..10.0) {
        let gen = birth_death(12, 1.0, 1.0);
        let out = evolve(&gen, &vec![c; gen.n_states()], t, 1e-14).unwrap();
        prop_assert!(out.iter().all(|x| (x - c).abs() <= 1e-12 * c));
    }
}
