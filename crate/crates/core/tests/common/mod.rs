#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use udisc_core::{Ensemble, Ket, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Ket {
    Ket::new(
        (0..dim)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
}

pub fn random_priors(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

/// Random ensemble whose Gram matrix is not too close to singular.
pub fn random_ensemble(rng: &mut impl Rng, n: usize, dim: usize) -> Ensemble {
    loop {
        let states: Vec<Ket> = (0..n).map(|_| random_ket(rng, dim)).collect();
        let priors = random_priors(rng, n);
        if let Ok(e) = Ensemble::new(states, priors) {
            if e.gram().min_eigenvalue() > 0.05 {
                return e;
            }
        }
    }
}

pub fn ket(re: &[f64]) -> Ket {
    Ket::real(re)
}

pub fn scaled(c: f64, v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| c * x).collect()
}

/// Reciprocal vectors of the four-state example.
pub fn four_state_reciprocals() -> Vec<Vec<f64>> {
    let r3 = 3f64.sqrt();
    vec![
        vec![r3, 0.0, 0.0, 0.0],
        vec![0.0, r3, 0.0, 0.0],
        vec![1.0, 1.0, 1.0, 0.0],
        vec![1.0, -1.0, 0.0, 1.0],
    ]
}

/// Reciprocal vectors of Example 1, index order |00>,|01>,|02>,|10>,|11>,|12>.
pub fn example1_reciprocals() -> Vec<Vec<f64>> {
    vec![
        scaled(1.5, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        scaled(1.5, &[1.0, 0.0, -2.0, -1.0, 2.0, 0.0]),
        scaled(-3.0, &[1.0, 0.0, -1.0, -1.0, 1.0, 0.0]),
        scaled(5.0 / 6.0, &[3.0, 4.0, -8.0, -3.0, 2.0, 2.0]),
        scaled(5.0 / 3.0, &[3.0, 1.0, -5.0, -3.0, 2.0, 2.0]),
        scaled(-0.5, &[13.0, 8.0, -28.0, -12.0, 8.0, 8.0]),
    ]
}

pub fn example2_reciprocals() -> Vec<Vec<f64>> {
    vec![
        scaled(5.0, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        scaled(-1.5, &[0.0, 0.0, 2.0, 1.0, -2.0, 0.0]),
        vec![-2.0, 0.0, 3.0, 3.0, -3.0, 0.0],
        scaled(5.0 / 18.0, &[4.0, 12.0, -24.0, -9.0, 6.0, 6.0]),
        scaled(5.0 / 9.0, &[4.0, 3.0, -15.0, -9.0, 6.0, 6.0]),
        scaled(-2.0 / 3.0, &[10.0, 6.0, -21.0, -9.0, 6.0, 6.0]),
    ]
}

pub fn max_entry_diff(got: &Ket, want: &[f64]) -> f64 {
    got.amplitudes()
        .iter()
        .zip(want)
        .map(|(z, w)| (z - C64::new(*w, 0.0)).norm())
        .fold(0.0, f64::max)
}

fn orthogonal_complement_2d(rng: &mut impl Rng, v: &Ket) -> Ket {
    // Any vector orthogonal to v, drawn at random from its complement.
    let r = random_ket(rng, v.dim());
    let overlap = v.inner(&r) / v.inner(v);
    Ket::from_vector(r.amplitudes() - v.amplitudes() * overlap)
}

/// Product basis of `da ⊗ db` whose first reciprocal is a product vector:
/// the other states are product vectors orthogonal to a fixed `a ⊗ b`.
pub fn product_basis_with_product_reciprocal(
    rng: &mut impl Rng,
    da: usize,
    db: usize,
) -> Vec<Ket> {
    loop {
        let a = random_ket(rng, da);
        let b = random_ket(rng, db);
        let mut states = vec![random_ket(rng, da).tensor(&random_ket(rng, db))];
        for _ in 1..da * db {
            let s = if rng.random_bool(0.5) {
                orthogonal_complement_2d(rng, &a).tensor(&random_ket(rng, db))
            } else {
                random_ket(rng, da).tensor(&orthogonal_complement_2d(rng, &b))
            };
            states.push(s);
        }
        if let Ok(e) = Ensemble::uniform(states.clone()) {
            if e.gram().min_eigenvalue() > 1e-3 {
                return states;
            }
        }
    }
}
