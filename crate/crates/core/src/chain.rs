//! General Markov chain choice model with a comparison-based stopping
//! probability.
//!
//! A customer arrives at a random state according to `lambda`, walks the chain
//! according to the transition matrix `rho`, and at an offered state `i` stops
//! and purchases with probability `mu(i, S)`. The stopping probability shrinks
//! as more substitutes are offered, which is what lets the model produce
//! choice overload. Choice probabilities are computed exactly by absorbing the
//! purchase states and solving a dense linear system.

use nalgebra::{DMatrix, DVector};

use crate::error::{ModelError, Result};
use crate::features::FeatureMatrix;
use crate::math::{dot, softmax};

const PROB_TOL: f64 = 1e-12;
const SPECTRAL_ITERS: usize = 200;
const SPECTRAL_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-9;

/// A set of offered products, a sorted subset of {1, ..., n}.
///
/// The derived ordering is lexicographic on the sorted member list, which is
/// the tie-break order used by the optimizers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assortment {
    members: Vec<usize>,
}

impl Assortment {
    /// Builds an assortment from product indices; duplicates are rejected and
    /// every index must lie in [1, n].
    pub fn new(mut members: Vec<usize>, n: usize) -> Result<Self> {
        members.sort_unstable();
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(ModelError::InvalidInput(format!(
                    "duplicate product {} in assortment",
                    w[0]
                )));
            }
        }
        for &i in &members {
            if i < 1 || i > n {
                return Err(ModelError::IndexOutOfRange { index: i, context: "assortment" });
            }
        }
        Ok(Self { members })
    }

    pub fn empty() -> Self {
        Self { members: Vec::new() }
    }

    /// Decodes a bitmask where bit b set means product b+1 is offered.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        let members = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
        Self { members }
    }

    pub fn full(n: usize) -> Self {
        Self { members: (1..=n).collect() }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Purchase probabilities for one assortment: `pi[0]` is the no-purchase
/// probability and `pi[i]` the probability of buying product i.
#[derive(Debug, Clone)]
pub struct ChoiceProbabilities {
    pi: Vec<f64>,
}

impl ChoiceProbabilities {
    pub(crate) fn from_vec(pi: Vec<f64>) -> Self {
        Self { pi }
    }

    pub fn prob(&self, i: usize) -> f64 {
        self.pi[i]
    }

    pub fn no_purchase(&self) -> f64 {
        self.pi[0]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.pi
    }
}

/// Form of the stopping probability as a function of the offered
/// transition mass out of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StoppingRule {
    /// exp(-alpha * mass): the default comparison-based form.
    #[default]
    Exponential,
    /// min(1, 1/mass): the reciprocal alternative, which keeps an MNL-like
    /// ratio structure.
    Reciprocal,
}

impl StoppingRule {
    fn stop_prob(self, alpha: f64, mass: f64) -> f64 {
        match self {
            StoppingRule::Exponential => (-alpha * mass).exp(),
            StoppingRule::Reciprocal => (1.0 / mass).min(1.0),
        }
    }
}

/// The general model: arrival distribution over states 0..n, an n x (n+1)
/// transition matrix and a comparison scale alpha.
#[derive(Debug, Clone)]
pub struct MarkovChainModel {
    n: usize,
    lambda: Vec<f64>,      // length n+1, index 0 is the no-purchase state
    rho: Vec<f64>,         // n x (n+1), row i-1 = transitions out of product i
    alpha: f64,
    stopping: StoppingRule,
}

impl MarkovChainModel {
    pub fn new(n: usize, lambda: Vec<f64>, rho: Vec<f64>, alpha: f64) -> Result<Self> {
        if n == 0 {
            return Err(ModelError::InvalidModel("need at least one product".into()));
        }
        if lambda.len() != n + 1 {
            return Err(ModelError::InvalidModel(format!(
                "lambda has length {} but expected {}",
                lambda.len(),
                n + 1
            )));
        }
        if rho.len() != n * (n + 1) {
            return Err(ModelError::InvalidModel(format!(
                "rho has {} entries but expected {}",
                rho.len(),
                n * (n + 1)
            )));
        }
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(ModelError::InvalidModel(format!("alpha must be nonnegative, got {alpha}")));
        }
        check_distribution(&lambda, "lambda")?;
        for i in 1..=n {
            check_distribution(&rho[(i - 1) * (n + 1)..i * (n + 1)], "rho row")?;
        }
        Ok(Self { n, lambda, rho, alpha, stopping: StoppingRule::Exponential })
    }

    pub fn with_stopping(mut self, stopping: StoppingRule) -> Self {
        self.stopping = stopping;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(ModelError::InvalidModel(format!("alpha must be nonnegative, got {alpha}")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn num_products(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Transition probability from product i (1-based) to state j (0 = exit).
    pub fn rho(&self, i: usize, j: usize) -> f64 {
        self.rho[(i - 1) * (self.n + 1) + j]
    }

    fn check_product(&self, i: usize) -> Result<()> {
        if i < 1 || i > self.n {
            return Err(ModelError::IndexOutOfRange { index: i, context: "product" });
        }
        Ok(())
    }

    /// mu(i, S): probability of stopping and buying at state i. Zero whenever
    /// i is not offered; state 0 always contributes to the comparison mass.
    pub fn stopping_probability(&self, i: usize, s: &Assortment) -> Result<f64> {
        self.check_product(i)?;
        if !s.contains(i) {
            return Ok(0.0);
        }
        let mass = self.offered_mass(i, s);
        Ok(self.stopping.stop_prob(self.alpha, mass))
    }

    fn offered_mass(&self, i: usize, s: &Assortment) -> f64 {
        self.rho(i, 0) + s.members().iter().map(|&j| self.rho(i, j)).sum::<f64>()
    }

    /// Modified transition probability (1 - mu(i,S)) * rho_ij.
    pub fn modified_transition(&self, i: usize, j: usize, s: &Assortment) -> Result<f64> {
        self.check_product(i)?;
        if j > self.n {
            return Err(ModelError::IndexOutOfRange { index: j, context: "state" });
        }
        let mu = self.stopping_probability(i, s)?;
        Ok((1.0 - mu) * self.rho(i, j))
    }

    fn mu_vector(&self, s: &Assortment) -> Result<Vec<f64>> {
        (1..=self.n).map(|i| self.stopping_probability(i, s)).collect()
    }

    /// Exact choice probabilities for the assortment, via the absorbing-chain
    /// linear system.
    pub fn choice_probabilities(&self, s: &Assortment) -> Result<ChoiceProbabilities> {
        let n = self.n;
        if s.is_empty() {
            let mut pi = vec![0.0; n + 1];
            pi[0] = 1.0;
            return Ok(ChoiceProbabilities::from_vec(pi));
        }

        let mu = self.mu_vector(s)?;
        let q = DMatrix::from_fn(n, n, |r, c| (1.0 - mu[r]) * self.rho(r + 1, c + 1));
        let radius = spectral_radius_power(&q);
        if radius >= 1.0 - 1e-9 {
            return Err(ModelError::SpectralRadiusViolation { radius });
        }

        // Absorption matrix Pi(S): column 0 holds the exit edge, column i the
        // purchase edge of product i.
        let absorb = DMatrix::from_fn(n, n + 1, |r, c| {
            if c == 0 {
                (1.0 - mu[r]) * self.rho(r + 1, 0)
            } else if c == r + 1 {
                mu[r]
            } else {
                0.0
            }
        });

        let a = DMatrix::identity(n, n) - &q;
        let lu = a.clone().lu();
        let b = lu
            .solve(&absorb)
            .ok_or_else(|| ModelError::SingularSystem("LU factorization failed".into()))?;

        let residual = (&a * &b - &absorb).abs().max();
        if residual > RESIDUAL_TOL {
            return Err(ModelError::SingularSystem(format!(
                "residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}"
            )));
        }

        let mut pi = vec![0.0; n + 1];
        for j in 0..=n {
            pi[j] = (0..n).map(|r| self.lambda[r + 1] * b[(r, j)]).sum();
        }
        // Arriving directly at state 0 means leaving without a purchase.
        pi[0] += self.lambda[0];
        let total: f64 = pi.iter().sum();
        for p in pi.iter_mut() {
            *p /= total;
        }
        Ok(ChoiceProbabilities::from_vec(pi))
    }

    /// Expected revenue sum_{i in S} pi(i, S) p_i.
    pub fn expected_revenue(&self, s: &Assortment, prices: &[f64]) -> Result<f64> {
        check_prices(prices, self.n)?;
        if s.is_empty() {
            return Ok(0.0);
        }
        let pi = self.choice_probabilities(s)?;
        Ok(s.members().iter().map(|&i| pi.prob(i) * prices[i - 1]).sum())
    }
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    let mut sum = 0.0;
    for &x in p {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(ModelError::InvalidModel(format!("{what} entry {x} is not a probability")));
        }
        sum += x;
    }
    if (sum - 1.0).abs() > PROB_TOL {
        return Err(ModelError::InvalidModel(format!("{what} sums to {sum}, expected 1")));
    }
    Ok(())
}

pub(crate) fn check_prices(prices: &[f64], n: usize) -> Result<()> {
    if prices.len() != n {
        return Err(ModelError::InvalidInput(format!(
            "got {} prices but model has {n} products",
            prices.len()
        )));
    }
    if prices.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
        return Err(ModelError::InvalidInput("prices must be positive".into()));
    }
    Ok(())
}

/// Power-iteration estimate of the spectral radius of a nonnegative matrix.
pub(crate) fn spectral_radius_power(q: &DMatrix<f64>) -> f64 {
    let n = q.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut x = DVector::from_element(n, 1.0);
    let mut radius = 0.0;
    for _ in 0..SPECTRAL_ITERS {
        let y = q * &x;
        let norm = y.amax();
        if norm < 1e-300 {
            return 0.0;
        }
        let diff = (norm - radius).abs();
        radius = norm;
        x = y / norm;
        if diff < SPECTRAL_TOL {
            break;
        }
    }
    radius
}

/// Feature-parameterized chain that reproduces the MNL model exactly at
/// alpha = 0: arrival weights e^{beta.x_i} and transitions proportional to
/// e^{beta.(x_j - x_i)} over j != i.
pub fn build_feature_chain_mnl(beta: &[f64], features: &FeatureMatrix) -> Result<MarkovChainModel> {
    if beta.len() != features.dim() {
        return Err(ModelError::InvalidInput(format!(
            "beta has dimension {} but features have {}",
            beta.len(),
            features.dim()
        )));
    }
    let n = features.num_products();
    let scores: Vec<f64> = (0..=n).map(|j| dot(beta, features.row(j))).collect();
    let lambda = softmax(&scores);
    let mut rho = Vec::with_capacity(n * (n + 1));
    for i in 1..=n {
        // The e^{-beta.x_i} factor is common to the row and cancels in the
        // normalization, so the row is a softmax of the destination scores.
        let mut row_scores = scores.clone();
        row_scores[i] = f64::NEG_INFINITY;
        rho.extend(softmax(&row_scores));
    }
    MarkovChainModel::new(n, lambda, rho, 0.0)
}

/// Feature-parameterized chain with separate weights on attribute gains and
/// losses, rho_ij proportional to e^{b1.(x_j - x_i)_+ + b2.(x_j - x_i)_-}.
/// Breaks IIA unless beta1 == beta2.
pub fn build_feature_chain_general(
    beta0: &[f64],
    beta1: &[f64],
    beta2: &[f64],
    features: &FeatureMatrix,
) -> Result<MarkovChainModel> {
    let d = features.dim();
    if beta0.len() != d || beta1.len() != d || beta2.len() != d {
        return Err(ModelError::InvalidInput(format!(
            "parameter vectors must all have the feature dimension {d}"
        )));
    }
    let n = features.num_products();
    let arrival_scores: Vec<f64> = (0..=n).map(|j| dot(beta0, features.row(j))).collect();
    let lambda = softmax(&arrival_scores);
    let mut rho = Vec::with_capacity(n * (n + 1));
    for i in 1..=n {
        let xi = features.row(i);
        let row_scores: Vec<f64> = (0..=n)
            .map(|j| {
                if j == i {
                    return f64::NEG_INFINITY;
                }
                let xj = features.row(j);
                (0..d)
                    .map(|k| {
                        let diff = xj[k] - xi[k];
                        beta1[k] * diff.max(0.0) + beta2[k] * diff.min(0.0)
                    })
                    .sum()
            })
            .collect();
        rho.extend(softmax(&row_scores));
    }
    MarkovChainModel::new(n, lambda, rho, 0.0)
}

/// Uniform arrivals and transitions over n+1 states (the homogeneous complete
/// graph).
pub fn homogeneous_chain(n: usize, alpha: f64) -> Result<MarkovChainModel> {
    let w = 1.0 / (n as f64 + 1.0);
    let lambda = vec![w; n + 1];
    let rho = vec![w; n * (n + 1)];
    MarkovChainModel::new(n, lambda, rho, alpha)
}

/// Random row-stochastic model, for experiments and tests.
pub fn random_chain(n: usize, alpha: f64, rng: &mut impl rand::Rng) -> MarkovChainModel {
    let lambda = random_simplex(n + 1, rng);
    let mut rho = Vec::with_capacity(n * (n + 1));
    for _ in 0..n {
        rho.extend(random_simplex(n + 1, rng));
    }
    MarkovChainModel::new(n, lambda, rho, alpha).expect("random model is valid")
}

pub(crate) fn random_simplex(len: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    // Exponential draws normalized to the simplex, shifted off the boundary.
    let mut raw: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln() + 0.05).collect();
    let sum: f64 = raw.iter().sum();
    for x in raw.iter_mut() {
        *x /= sum;
    }
    raw
}
