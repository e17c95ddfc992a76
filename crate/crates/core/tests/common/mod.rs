#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use salem::{DigitPermutation, ModifiedSalem, SalemSystem};

/// Random weights with every `p_t ≥ min_weight`; renormalised so the sum is
/// 1 to rounding.
pub fn random_system<R: Rng>(q: usize, min_weight: f64, rng: &mut R) -> SalemSystem<f64> {
    assert!(min_weight * q as f64 <= 1.0);
    let raw: Vec<f64> = (0..q).map(|_| rng.gen_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let spare = 1.0 - min_weight * q as f64;
    let mut p: Vec<f64> = raw.iter().map(|r| min_weight + spare * r / total).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|w| *w /= s);
    SalemSystem::validate(q, p).expect("valid random weights")
}

pub fn random_permutation<R: Rng>(q: usize, rng: &mut R) -> DigitPermutation {
    let mut map: Vec<usize> = (0..q).collect();
    map.shuffle(rng);
    DigitPermutation::new(map).unwrap()
}

pub fn random_function<R: Rng>(q: usize, min_weight: f64, rng: &mut R) -> ModifiedSalem<f64> {
    let s = random_system(q, min_weight, rng);
    ModifiedSalem::new(s, random_permutation(q, rng)).unwrap()
}

/// Every permutation of `0..q` in lexicographic order.
pub fn all_permutations(q: usize) -> Vec<DigitPermutation> {
    use itertools::Itertools;
    (0..q)
        .permutations(q)
        .map(|m| DigitPermutation::new(m).unwrap())
        .collect()
}
