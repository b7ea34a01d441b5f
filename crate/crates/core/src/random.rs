//! Seeded random measures for property checks.
//!
//! The generator is `ChaCha8Rng`, so a seed fixes the sequence on every platform.

use num::{BigInt, Zero};
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{GraphMeasure, StarGraph};
use crate::number::{frac, Q};

pub const PRNG_NAME: &str = "ChaCha8Rng";

#[derive(Clone, Debug)]
pub struct RandomConfig {
    pub min_edges: usize,
    pub max_edges: usize,
    /// Masses per edge are drawn from `0..=max_masses` unless `exact_masses` is set.
    pub max_masses: usize,
    pub exact_masses: Option<usize>,
    pub central_mass_probability: f64,
    /// Chance of copying one edge onto another, which forces shared eigenvalues.
    pub duplicate_probability: f64,
}

impl Default for RandomConfig {
    fn default() -> Self {
        RandomConfig {
            min_edges: 2,
            max_edges: 4,
            max_masses: 5,
            exact_masses: None,
            central_mass_probability: 0.5,
            duplicate_probability: 0.25,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn quarter<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> Q {
    frac(rng.gen_range(lo..=hi), 4)
}

/// Lengths in `{1/2, 3/4, ..., 2}`, weights in `{1/4, ..., 2}`, positions on
/// the grid `l j / (2(n + 1))` for `n` masses.
pub fn random_measure<R: Rng>(rng: &mut R, cfg: &RandomConfig) -> GraphMeasure {
    let n_edges = rng.gen_range(cfg.min_edges..=cfg.max_edges);
    let mut lengths: Vec<Q> = (0..n_edges).map(|_| quarter(rng, 2, 8)).collect();
    let mut masses: Vec<Vec<(Q, Q)>> = lengths
        .iter()
        .map(|l| {
            let n = cfg.exact_masses.unwrap_or_else(|| rng.gen_range(0..=cfg.max_masses));
            let grid = 2 * (n + 1);
            let mut js: Vec<usize> = sample(rng, grid - 1, n).into_iter().map(|j| j + 1).collect();
            js.sort_unstable();
            js.into_iter()
                .map(|j| (l * Q::new(BigInt::from(j), BigInt::from(grid)), quarter(rng, 1, 8)))
                .collect()
        })
        .collect();
    if n_edges >= 2 && rng.gen_bool(cfg.duplicate_probability) {
        let from = rng.gen_range(0..n_edges);
        let to = (from + rng.gen_range(1..n_edges)) % n_edges;
        lengths[to] = lengths[from].clone();
        masses[to] = masses[from].clone();
    }
    let central = if rng.gen_bool(cfg.central_mass_probability) { quarter(rng, 1, 8) } else { Q::zero() };
    let graph = StarGraph::with_lengths(&lengths).expect("positive lengths");
    GraphMeasure::from_masses(graph, central, masses).expect("admissible by construction")
}

/// `count` measures from one stream seeded with `seed`.
pub fn random_measures(seed: u64, count: usize, cfg: &RandomConfig) -> Vec<GraphMeasure> {
    let mut r = rng(seed);
    (0..count).map(|_| random_measure(&mut r, cfg)).collect()
}
