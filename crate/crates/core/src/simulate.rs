//! Random-walk simulation of the choice process: single customer walks,
//! synthetic dataset generation, no-purchase curves on the homogeneous
//! substitution graph, and the star-graph pricing experiment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::assortment::{brute_force_optimal, OptimizationResult};
use crate::chain::{Assortment, MarkovChainModel};
use crate::error::{ModelError, Result};
use crate::estimation::Observation;
use crate::gmnl::GmnlModel;

/// Hard cap on transitions per walk; reaching it signals a model whose
/// substitution matrix does not contract on the offered set.
pub const MAX_WALK_STEPS: usize = 1_000_000;

/// Result of one simulated customer walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOutcome {
    /// Purchased product, or 0 for no purchase.
    pub chosen: usize,
    /// Number of transitions taken before stopping.
    pub steps: usize,
}

/// How assortments are drawn when generating synthetic datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssortmentSampler {
    /// Uniform over all 2^n - 1 nonempty subsets of the products.
    UniformNonempty,
    /// Uniform over subsets of a fixed cardinality k.
    FixedSize(usize),
}

impl AssortmentSampler {
    pub fn sample(&self, n: usize, rng: &mut impl Rng) -> Result<Assortment> {
        match *self {
            AssortmentSampler::UniformNonempty => {
                if n == 0 || n > 60 {
                    return Err(ModelError::InvalidInput(format!(
                        "uniform subset sampling supports 1..=60 products, got {n}"
                    )));
                }
                let mask = rng.gen_range(1..(1u64 << n));
                Ok(Assortment::from_mask(mask, n))
            }
            AssortmentSampler::FixedSize(k) => {
                if k == 0 || k > n {
                    return Err(ModelError::InvalidInput(format!(
                        "fixed-size sampler needs 1 <= k <= {n}, got {k}"
                    )));
                }
                let members: Vec<usize> =
                    rand::seq::index::sample(rng, n, k).into_iter().map(|i| i + 1).collect();
                Assortment::new(members, n)
            }
        }
    }
}

fn sample_categorical(weights: impl Iterator<Item = f64>, rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = 0;
    for (idx, w) in weights.enumerate() {
        acc += w;
        last = idx;
        if u < acc {
            return idx;
        }
    }
    // Rounding can leave acc slightly below 1; attribute the sliver to the
    // final support point.
    last
}

fn walk_with_rng(
    model: &MarkovChainModel,
    s: &Assortment,
    rng: &mut impl Rng,
) -> Result<WalkOutcome> {
    let n = model.num_products();
    let mut state = sample_categorical(model.lambda().iter().copied(), rng);
    let mut steps = 0usize;
    loop {
        if state == 0 {
            return Ok(WalkOutcome { chosen: 0, steps });
        }
        if s.contains(state) {
            let mu = model.stopping_probability(state, s)?;
            if rng.gen::<f64>() < mu {
                return Ok(WalkOutcome { chosen: state, steps });
            }
        }
        // Conditioned on not stopping, the next state follows the original
        // transition row.
        state = sample_categorical((0..=n).map(|j| model.rho(state, j)), rng);
        steps += 1;
        if steps >= MAX_WALK_STEPS {
            return Err(ModelError::NonTermination(MAX_WALK_STEPS));
        }
    }
}

/// Simulate a single customer walk on `model` offered the assortment `s`.
///
/// The walk arrives according to the arrival distribution, stops immediately
/// on state 0, stops at an offered product `i` with its stopping probability,
/// and otherwise transitions along the substitution row. Deterministic given
/// `seed`.
pub fn simulate_walk(model: &MarkovChainModel, s: &Assortment, seed: u64) -> Result<WalkOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    walk_with_rng(model, s, &mut rng)
}

fn walk_streams(seed: u64, t: u64) -> ChaCha8Rng {
    // Stream 0 is reserved for assortment sampling; walk t uses stream t+1.
    // Per-walk streams make parallel and serial runs agree bit for bit.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t + 1);
    rng
}

fn sample_assortments(
    n: usize,
    sampler: AssortmentSampler,
    t: usize,
    seed: u64,
) -> Result<Vec<Assortment>> {
    if t == 0 {
        return Err(ModelError::InvalidInput("dataset size must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0);
    (0..t).map(|_| sampler.sample(n, &mut rng)).collect()
}

/// Generate `t` synthetic observations by simulating one walk per drawn
/// assortment. Deterministic given `seed`, independent of thread count.
pub fn generate_dataset(
    model: &MarkovChainModel,
    sampler: AssortmentSampler,
    t: usize,
    seed: u64,
) -> Result<Vec<Observation>> {
    let assortments = sample_assortments(model.num_products(), sampler, t, seed)?;
    assortments
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = walk_streams(seed, i as u64);
            let outcome = walk_with_rng(model, &s, &mut rng)?;
            Ok(Observation { assortment: s, choice: outcome.chosen })
        })
        .collect()
}

/// Generate `t` synthetic observations by sampling choices directly from the
/// rank-one model's closed-form probabilities (no walk simulation).
pub fn generate_dataset_gmnl(
    model: &GmnlModel,
    sampler: AssortmentSampler,
    t: usize,
    seed: u64,
) -> Result<Vec<Observation>> {
    let assortments = sample_assortments(model.num_products(), sampler, t, seed)?;
    Ok(assortments
        .into_par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut rng = walk_streams(seed, i as u64);
            let pi = model.choice_probabilities(&s);
            let choice = sample_categorical(pi.as_slice().iter().copied(), &mut rng);
            Observation { assortment: s, choice }
        })
        .collect())
}

/// Exact no-purchase probability on the homogeneous model as a function of
/// assortment size, one column per value of `alphas`. Returns rows
/// `(k, [pi_0(k) per alpha])` for k = 1..=kmax.
pub fn no_purchase_curve(n: usize, alphas: &[f64], kmax: usize) -> Result<Vec<(usize, Vec<f64>)>> {
    if kmax == 0 || kmax > n {
        return Err(ModelError::InvalidInput(format!(
            "curve needs 1 <= kmax <= {n}, got {kmax}"
        )));
    }
    let models: Vec<GmnlModel> =
        alphas.iter().map(|&a| GmnlModel::homogeneous(n, a)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(kmax);
    for k in 1..=kmax {
        // By symmetry any k-subset gives the same probability.
        let s = Assortment::new((1..=k).collect(), n)?;
        let row = models.iter().map(|m| m.choice_probabilities(&s).no_purchase()).collect();
        rows.push((k, row));
    }
    Ok(rows)
}

/// Build the star substitution graph (product 1 at the center, priced `p`;
/// leaves priced `P > p`) and brute-force the revenue-optimal assortment.
///
/// Center transitions spread uniformly over the leaves and the outside
/// option; each leaf splits evenly between the center and the outside option.
pub fn star_graph_experiment(n: usize, p: f64, big_p: f64, alpha: f64) -> Result<OptimizationResult> {
    if n < 3 {
        return Err(ModelError::InvalidInput(format!("star graph needs n >= 3, got {n}")));
    }
    if !(p > 0.0 && big_p > p) {
        return Err(ModelError::InvalidInput(format!(
            "star graph needs 0 < p < P, got p = {p}, P = {big_p}"
        )));
    }
    let mut lambda = vec![1.0 / n as f64; n + 1];
    lambda[0] = 0.0;
    let mut rho = vec![0.0; n * (n + 1)];
    rho[0] = 1.0 / n as f64; // center -> outside
    for j in 2..=n {
        rho[j] = 1.0 / n as f64; // center -> leaf j
    }
    for i in 2..=n {
        rho[(i - 1) * (n + 1)] = 0.5; // leaf -> outside
        rho[(i - 1) * (n + 1) + 1] = 0.5; // leaf -> center
    }
    let model = MarkovChainModel::new(n, lambda, rho, alpha)?;
    let mut prices = vec![big_p; n];
    prices[0] = p;
    brute_force_optimal(n, |s| model.expected_revenue(s, &prices))
}
