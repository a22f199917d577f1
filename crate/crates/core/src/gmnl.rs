//! Rank-one specialization: an MNL-style model whose no-purchase weight is
//! inflated exponentially in the total offered attractiveness.
//!
//! Choice probabilities have the closed form
//! `pi(i, S) = v_i / (sum_{k in S} v_k + v_0 exp(alpha * sum_{j in S+} v_j))`
//! with `S+ = S ∪ {0}`. The same model arises from a chain whose every row of
//! transitions equals the arrival distribution `v` (self-transitions kept).

use crate::chain::{Assortment, ChoiceProbabilities, MarkovChainModel};
use crate::error::{ModelError, Result};

const PROB_TOL: f64 = 1e-12;

/// Rank-one model with normalized weights v over states 0..n.
#[derive(Debug, Clone)]
pub struct GmnlModel {
    v: Vec<f64>, // length n+1, index 0 = no-purchase weight, sums to 1
    alpha: f64,
}

impl GmnlModel {
    pub fn new(v: Vec<f64>, alpha: f64) -> Result<Self> {
        if v.len() < 2 {
            return Err(ModelError::InvalidModel("need at least one product".into()));
        }
        if v.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(ModelError::InvalidModel("weights must be strictly positive".into()));
        }
        let sum: f64 = v.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(ModelError::InvalidModel(format!("weights sum to {sum}, expected 1")));
        }
        if alpha < 0.0 || !alpha.is_finite() {
            return Err(ModelError::InvalidModel(format!("alpha must be nonnegative, got {alpha}")));
        }
        Ok(Self { v, alpha })
    }

    /// Uniform weights v_j = 1/(n+1) for all states.
    pub fn homogeneous(n: usize, alpha: f64) -> Result<Self> {
        Self::new(vec![1.0 / (n as f64 + 1.0); n + 1], alpha)
    }

    pub fn num_products(&self) -> usize {
        self.v.len() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn weights(&self) -> &[f64] {
        &self.v
    }

    /// Closed-form purchase probability of product i under assortment s.
    pub fn choice_probability(&self, i: usize, s: &Assortment) -> Result<f64> {
        let n = self.num_products();
        if i > n {
            return Err(ModelError::IndexOutOfRange { index: i, context: "product" });
        }
        let pi = raw_choice_probabilities(&self.v, self.alpha, s);
        Ok(pi[i])
    }

    /// All purchase probabilities at once.
    pub fn choice_probabilities(&self, s: &Assortment) -> ChoiceProbabilities {
        ChoiceProbabilities::from_vec(raw_choice_probabilities(&self.v, self.alpha, s))
    }

    /// Expected revenue of the assortment under the given prices.
    /// Allocation-free so the brute-force optimizer can call it millions of
    /// times.
    pub fn expected_revenue(&self, s: &Assortment, prices: &[f64]) -> Result<f64> {
        crate::chain::check_prices(prices, self.num_products())?;
        if s.is_empty() {
            return Ok(0.0);
        }
        let mut offered = 0.0;
        let mut value = 0.0;
        for &i in s.members() {
            offered += self.v[i];
            value += self.v[i] * prices[i - 1];
        }
        let exponent = self.alpha * (offered + self.v[0]);
        if exponent > 700.0 {
            return Ok(0.0);
        }
        Ok(value / (offered + self.v[0] * exponent.exp()))
    }

    /// Equivalent chain: arrival distribution v and every transition row equal
    /// to v, including the self-transition.
    pub fn to_chain(&self) -> MarkovChainModel {
        let n = self.num_products();
        let mut rho = Vec::with_capacity(n * (n + 1));
        for _ in 0..n {
            rho.extend_from_slice(&self.v);
        }
        MarkovChainModel::new(n, self.v.clone(), rho, self.alpha)
            .expect("normalized weights form a valid chain")
    }
}

/// Closed-form probabilities for possibly unnormalized positive weights.
/// Returned as a full vector over states 0..n; entry 0 is no-purchase.
pub fn raw_choice_probabilities(v: &[f64], alpha: f64, s: &Assortment) -> Vec<f64> {
    let n = v.len() - 1;
    let mut pi = vec![0.0; n + 1];
    if s.is_empty() {
        pi[0] = 1.0;
        return pi;
    }
    let offered: f64 = s.members().iter().map(|&j| v[j]).sum();
    let exponent = alpha * (offered + v[0]);
    if exponent > 700.0 {
        // exp would overflow; the no-purchase term dominates completely.
        pi[0] = 1.0;
        return pi;
    }
    let denom = offered + v[0] * exponent.exp();
    for &i in s.members() {
        pi[i] = v[i] / denom;
    }
    pi[0] = 1.0 - offered / denom;
    pi
}

/// Purchase probability of product i under the reciprocal stopping rule,
/// `v_i / ((1 + v_0) sum_{j in S} v_j + v_0^2)`, valid for normalized weights.
pub fn reciprocal_choice_probability(v: &[f64], i: usize, s: &Assortment) -> Result<f64> {
    let n = v.len() - 1;
    if i < 1 || i > n {
        return Err(ModelError::IndexOutOfRange { index: i, context: "product" });
    }
    if !s.contains(i) {
        return Ok(0.0);
    }
    let offered: f64 = s.members().iter().map(|&j| v[j]).sum();
    Ok(v[i] / ((1.0 + v[0]) * offered + v[0] * v[0]))
}

/// Revenue-optimal assortment size for the homogeneous model with unit
/// prices: the real maximizer of k / (k + e^{alpha (k+1)/(n+1)}) is
/// k* = (n+1)/alpha, so the best integer size is one of its neighbors.
pub fn homogeneous_optimal_size(n: usize, alpha: f64) -> usize {
    if alpha <= 0.0 {
        return n;
    }
    let kstar = (n as f64 + 1.0) / alpha;
    let revenue = |k: usize| {
        let kf = k as f64;
        kf / (kf + (alpha * (kf + 1.0) / (n as f64 + 1.0)).exp())
    };
    let mut best = 1;
    for k in [kstar.floor() as usize, kstar.ceil() as usize, 1, n] {
        let k = k.clamp(1, n);
        if revenue(k) > revenue(best) {
            best = k;
        }
    }
    best
}
