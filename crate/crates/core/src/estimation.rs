//! Maximum-likelihood fitting of the feature-parameterized rank-1 model by
//! alternating maximization: the comparison scale alpha has a strictly
//! concave 1-D partial likelihood, and the taste vector beta is fit by
//! quasi-Newton ascent with an analytic gradient. An MNL fit provides the
//! starting point, and the plain MNL estimator is also exposed for baseline
//! comparisons.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain::{Assortment, ChoiceProbabilities};
use crate::error::{ModelError, Result};
use crate::features::FeatureMatrix;
use crate::gmnl::raw_choice_probabilities;
use crate::math::{dot, logsumexp, logsumexp2};

const GRAD_TOL: f64 = 1e-6;
const MAX_BFGS_ITERS: usize = 500;
const ALPHA_STATIONARITY_TOL: f64 = 1e-10;

/// One recorded choice: the offered set and the chosen state (0 = walked
/// away without purchasing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observation {
    pub assortment: Assortment,
    pub choice: usize,
}

/// Choice records plus the product attribute matrix they refer to.
#[derive(Debug, Clone)]
pub struct ChoiceDataset {
    observations: Vec<Observation>,
    features: FeatureMatrix,
}

impl ChoiceDataset {
    pub fn new(observations: Vec<Observation>, features: FeatureMatrix) -> Result<Self> {
        if observations.is_empty() {
            return Err(ModelError::InvalidInput("dataset has no observations".into()));
        }
        let n = features.num_products();
        for (t, obs) in observations.iter().enumerate() {
            if obs.assortment.is_empty() {
                return Err(ModelError::InvalidInput(format!(
                    "observation {t} has an empty assortment"
                )));
            }
            if let Some(&max) = obs.assortment.members().last() {
                if max > n {
                    return Err(ModelError::InvalidInput(format!(
                        "observation {t} offers product {max} but features cover only {n}"
                    )));
                }
            }
            if obs.choice != 0 && !obs.assortment.contains(obs.choice) {
                return Err(ModelError::InvalidInput(format!(
                    "observation {t} chose {} which was not offered",
                    obs.choice
                )));
            }
        }
        Ok(Self { observations, features })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    fn scores(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.features.num_states()).map(|j| dot(beta, self.features.row(j))).collect()
    }
}

/// Fitted parameters of the rank-1 feature model; product attractions are
/// e^{beta . x_j}.
#[derive(Debug, Clone, PartialEq)]
pub struct GmnlParams {
    pub beta: Vec<f64>,
    pub alpha: f64,
}

/// Per-outer-iteration diagnostics of the alternating fit.
#[derive(Debug, Clone, Default)]
pub struct FitTrace {
    pub log_likelihoods: Vec<f64>,
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct EstimationConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub alpha_max: f64,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        Self { max_iters: 100, tol: 1e-8, alpha_max: 50.0 }
    }
}

/// Log-likelihood of the rank-1 model. The no-purchase "score" of
/// observation t is z_t = beta.x_0 + alpha * sum of offered attractions
/// (including the no-purchase one), so the t-th term is the usual softmax
/// likelihood over {z_t} union offered scores.
pub fn log_likelihood(data: &ChoiceDataset, params: &GmnlParams) -> f64 {
    let scores = data.scores(&params.beta);
    log_likelihood_cached(data, &scores, params.alpha)
}

fn log_likelihood_cached(data: &ChoiceDataset, scores: &[f64], alpha: f64) -> f64 {
    let v: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
    let mut total = 0.0;
    for obs in &data.observations {
        let offered_v: f64 = obs.assortment.members().iter().map(|&j| v[j]).sum();
        let z = scores[0] + alpha * (v[0] + offered_v);
        let m = logsumexp_members(scores, &obs.assortment);
        total += if obs.choice == 0 {
            // z - log(e^z + e^m), written to stay finite when z overflows.
            -logsumexp2(0.0, m - z)
        } else {
            scores[obs.choice] - logsumexp2(z, m)
        };
    }
    total
}

fn logsumexp_members(scores: &[f64], s: &Assortment) -> f64 {
    let m = s.members().iter().map(|&j| scores[j]).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + s.members().iter().map(|&j| (scores[j] - m).exp()).sum::<f64>().ln()
}

/// Likelihood and gradient in beta at fixed alpha.
fn ll_and_grad(data: &ChoiceDataset, alpha: f64, beta: &[f64]) -> (f64, Vec<f64>) {
    let d = data.features.dim();
    let scores = data.scores(beta);
    let v: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
    let x = |j: usize| data.features.row(j);
    let mut ll = 0.0;
    let mut grad = vec![0.0; d];
    let mut gz = vec![0.0; d]; // gradient of z_t, reused per observation
    for obs in &data.observations {
        let members = obs.assortment.members();
        let offered_v: f64 = members.iter().map(|&j| v[j]).sum();
        let z = scores[0] + alpha * (v[0] + offered_v);
        let m = logsumexp_members(&scores, &obs.assortment);
        let lse = logsumexp2(z, m);

        // grad z = x_0 + alpha (v_0 x_0 + sum_{j in S} v_j x_j)
        for k in 0..d {
            gz[k] = x(0)[k] * (1.0 + alpha * v[0]);
        }
        for &j in members {
            for k in 0..d {
                gz[k] += alpha * v[j] * x(j)[k];
            }
        }

        let wz = (z - lse).exp();
        if obs.choice == 0 {
            ll += -logsumexp2(0.0, m - z);
            for k in 0..d {
                grad[k] += (1.0 - wz) * gz[k];
            }
        } else {
            ll += scores[obs.choice] - lse;
            for k in 0..d {
                grad[k] += x(obs.choice)[k] - wz * gz[k];
            }
        }
        for &j in members {
            let wj = (scores[j] - lse).exp();
            for k in 0..d {
                grad[k] -= wj * x(j)[k];
            }
        }
    }
    (ll, grad)
}

/// MNL log-likelihood and gradient: state 0 competes in every denominator.
fn mnl_ll_and_grad(data: &ChoiceDataset, beta: &[f64]) -> (f64, Vec<f64>) {
    let d = data.features.dim();
    let scores = data.scores(beta);
    let x = |j: usize| data.features.row(j);
    let mut ll = 0.0;
    let mut grad = vec![0.0; d];
    let mut pool = Vec::new();
    for obs in &data.observations {
        pool.clear();
        pool.push(scores[0]);
        pool.extend(obs.assortment.members().iter().map(|&j| scores[j]));
        let lse = logsumexp(&pool);
        ll += scores[obs.choice] - lse;
        for k in 0..d {
            grad[k] += x(obs.choice)[k];
        }
        let w0 = (scores[0] - lse).exp();
        for k in 0..d {
            grad[k] -= w0 * x(0)[k];
        }
        for &j in obs.assortment.members() {
            let wj = (scores[j] - lse).exp();
            for k in 0..d {
                grad[k] -= wj * x(j)[k];
            }
        }
    }
    (ll, grad)
}

/// BFGS ascent with Armijo backtracking. Returns the best iterate seen,
/// stopping at gradient norm <= `grad_tol` or after `MAX_BFGS_ITERS` steps.
/// The tolerance is supplied by the caller because likelihoods scale with the
/// number of observations.
fn bfgs_maximize<F>(objective: F, x0: &[f64], grad_tol: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let d = x0.len();
    let mut x = DVector::from_row_slice(x0);
    let (mut fx, g) = objective(x.as_slice());
    let mut g = DVector::from_vec(g);
    let mut h = DMatrix::<f64>::identity(d, d);
    let mut best = (x.clone(), fx);
    for _ in 0..MAX_BFGS_ITERS {
        if g.norm() <= grad_tol {
            break;
        }
        let mut p = &h * &g;
        if p.dot(&g) <= 0.0 {
            // Curvature estimate went bad; fall back to steepest ascent.
            h = DMatrix::identity(d, d);
            p = g.clone();
        }
        let slope = p.dot(&g);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let cand = &x + step * &p;
            let (fc, gc) = objective(cand.as_slice());
            if fc >= fx + 1e-4 * step * slope && fc.is_finite() {
                accepted = Some((cand, fc, DVector::from_vec(gc)));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fn_, gn)) = accepted else {
            break; // line search stalled; keep the best iterate
        };
        let s = &xn - &x;
        let y = &gn - &g;
        let sy = s.dot(&y);
        // For a concave objective s.y < 0. Maximization is minimization of
        // the negated objective, whose curvature pair is (s, -y) with
        // s.(-y) = -sy > 0, giving the update below; skip it when flat.
        if sy < -1e-12 {
            let rho = -1.0 / sy;
            let i = DMatrix::<f64>::identity(d, d);
            let left = &i + rho * &s * y.transpose();
            h = &left * h * left.transpose() + rho * &s * s.transpose();
        }
        x = xn;
        fx = fn_;
        g = gn;
        if fx > best.1 {
            best = (x.clone(), fx);
        }
    }
    (best.0.as_slice().to_vec(), best.1)
}

/// Maximizer of the partial likelihood in alpha at fixed beta: golden-section
/// search over [0, alpha_max] on the strictly concave objective, then Newton
/// polishing to stationarity.
pub fn solve_partial_alpha(data: &ChoiceDataset, beta: &[f64], alpha_max: f64) -> f64 {
    let scores = data.scores(beta);
    let v: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
    // Per observation: w_t = v_0 + offered mass, c_t = offered mass, and
    // whether the customer walked away.
    let terms: Vec<(f64, f64, bool)> = data
        .observations
        .iter()
        .map(|obs| {
            let c: f64 = obs.assortment.members().iter().map(|&j| v[j]).sum();
            (v[0] + c, c, obs.choice == 0)
        })
        .collect();
    let ln_v0 = scores[0];

    let value = |alpha: f64| -> f64 {
        terms
            .iter()
            .map(|&(w, c, walked)| {
                let keep = if walked { alpha * w } else { 0.0 };
                keep - logsumexp2(ln_v0 + alpha * w, c.ln())
            })
            .sum()
    };
    let deriv = |alpha: f64| -> (f64, f64) {
        let mut g1 = 0.0;
        let mut g2 = 0.0;
        for &(w, c, walked) in &terms {
            // sigma = share of the no-purchase attraction in the denominator.
            let logit = ln_v0 + alpha * w - c.ln();
            let sigma = 1.0 / (1.0 + (-logit).exp());
            if walked {
                g1 += w;
            }
            g1 -= w * sigma;
            g2 -= w * w * sigma * (1.0 - sigma);
        }
        (g1, g2)
    };

    if deriv(0.0).0 <= 0.0 {
        return 0.0;
    }
    if deriv(alpha_max).0 >= 0.0 {
        return alpha_max;
    }
    // Golden-section bracketing of the concave maximum.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, alpha_max);
    let mut c = b - inv_phi * (b - a);
    let mut d_ = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (value(c), value(d_));
    while b - a > 1e-8 {
        if fc > fd {
            b = d_;
            d_ = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d_;
            fc = fd;
            d_ = a + inv_phi * (b - a);
            fd = value(d_);
        }
    }
    let mut alpha = 0.5 * (a + b);
    for _ in 0..50 {
        let (g1, g2) = deriv(alpha);
        if g1.abs() <= ALPHA_STATIONARITY_TOL || g2 == 0.0 {
            break;
        }
        alpha = (alpha - g1 / g2).clamp(0.0, alpha_max);
    }
    alpha
}

/// Maximizer of the likelihood in beta at fixed alpha, with two perturbed
/// restarts guarding against the lack of joint concavity. Never returns a
/// point worse than beta_init.
pub fn solve_partial_beta(data: &ChoiceDataset, alpha: f64, beta_init: &[f64]) -> Vec<f64> {
    let objective = |b: &[f64]| ll_and_grad(data, alpha, b);
    // Gradient entries are sums over observations; tolerate ~GRAD_TOL of
    // average per-observation gradient so runtime stays linear in T.
    let grad_tol = GRAD_TOL * (1.0 + data.len() as f64);
    let (mut best_beta, mut best_ll) = bfgs_maximize(objective, beta_init, grad_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(0xE57);
    for _ in 0..2 {
        let start: Vec<f64> =
            beta_init.iter().map(|b| b + 0.1 * (2.0 * rng.gen::<f64>() - 1.0)).collect();
        let (cand, ll) = bfgs_maximize(objective, &start, grad_tol);
        if ll > best_ll {
            best_ll = ll;
            best_beta = cand;
        }
    }
    let (init_ll, _) = objective(beta_init);
    if init_ll > best_ll {
        return beta_init.to_vec();
    }
    best_beta
}

/// MNL maximum-likelihood estimate (concave, so a single start suffices).
pub fn estimate_mnl(data: &ChoiceDataset) -> Vec<f64> {
    let d = data.features.dim();
    let grad_tol = GRAD_TOL * (1.0 + data.len() as f64);
    bfgs_maximize(|b| mnl_ll_and_grad(data, b), &vec![0.0; d], grad_tol).0
}

/// Alternating maximization: start from the MNL fit with alpha = 0, then
/// repeat the alpha-step and the beta-step until the likelihood stalls.
/// The likelihood trace is non-decreasing by construction.
pub fn estimate_gmnl(
    data: &ChoiceDataset,
    config: &EstimationConfig,
) -> Result<(GmnlParams, FitTrace)> {
    if data.is_empty() {
        return Err(ModelError::InvalidInput("cannot fit an empty dataset".into()));
    }
    let mut beta = estimate_mnl(data);
    let mut alpha = 0.0;
    let mut trace = FitTrace::default();
    let mut prev_ll = log_likelihood(data, &GmnlParams { beta: beta.clone(), alpha });
    trace.log_likelihoods.push(prev_ll);
    trace.alphas.push(alpha);
    for _ in 0..config.max_iters {
        alpha = solve_partial_alpha(data, &beta, config.alpha_max);
        beta = solve_partial_beta(data, alpha, &beta);
        let ll = log_likelihood(data, &GmnlParams { beta: beta.clone(), alpha });
        trace.log_likelihoods.push(ll);
        trace.alphas.push(alpha);
        if (ll - prev_ll).abs() <= config.tol * (1.0 + prev_ll.abs()) {
            prev_ll = ll;
            break;
        }
        prev_ll = ll;
    }
    let _ = prev_ll;
    Ok((GmnlParams { beta, alpha }, trace))
}

/// Choice probabilities implied by fitted parameters for one assortment.
pub fn predict_choice_probs(
    params: &GmnlParams,
    features: &FeatureMatrix,
    s: &Assortment,
) -> Result<ChoiceProbabilities> {
    if params.beta.len() != features.dim() {
        return Err(ModelError::InvalidInput(format!(
            "beta has dimension {} but features have {}",
            params.beta.len(),
            features.dim()
        )));
    }
    let v: Vec<f64> =
        (0..features.num_states()).map(|j| dot(&params.beta, features.row(j)).exp()).collect();
    Ok(ChoiceProbabilities::from_vec(raw_choice_probabilities(&v, params.alpha, s)))
}

/// Rank-based area under the ROC curve with ties counted half.
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(ModelError::InvalidInput("scores and labels differ in length".into()));
    }
    let pos = labels.iter().filter(|&&l| l).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(ModelError::InvalidInput(
            "AUC needs at least one positive and one negative label".into(),
        ));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Midranks over tied score groups.
    let mut ranks = vec![0.0; scores.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = midrank;
        }
        i = j + 1;
    }
    let rank_sum: f64 = ranks.iter().zip(labels).filter(|(_, &l)| l).map(|(r, _)| r).sum();
    let p = pos as f64;
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * neg as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tiny_features(n: usize, d: usize, seed: u64) -> FeatureMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = vec![vec![0.0; d]]; // x_0 = 0 by convention
        rows.extend((0..n).map(|_| (0..d).map(|_| rng.gen::<f64>() - 0.5).collect::<Vec<_>>()));
        FeatureMatrix::new(rows).unwrap()
    }

    fn obs(members: &[usize], n: usize, choice: usize) -> Observation {
        Observation { assortment: Assortment::new(members.to_vec(), n).unwrap(), choice }
    }

    #[test]
    fn dataset_rejects_choice_outside_assortment() {
        let f = tiny_features(4, 2, 1);
        assert!(ChoiceDataset::new(vec![obs(&[1, 2], 4, 3)], f.clone()).is_err());
        assert!(ChoiceDataset::new(vec![obs(&[1, 2], 4, 0)], f).is_ok());
    }

    #[test]
    fn uniform_single_observation_likelihood() {
        // beta = 0, alpha = 0: every state equally attractive, so one
        // purchase among an m-set plus no-purchase has probability 1/(m+1).
        let f = tiny_features(5, 3, 2);
        let data = ChoiceDataset::new(vec![obs(&[1, 2, 4], 5, 2)], f).unwrap();
        let ll = log_likelihood(&data, &GmnlParams { beta: vec![0.0; 3], alpha: 0.0 });
        assert_abs_diff_eq!(ll, -(4f64.ln()), epsilon = 1e-12);
    }

    #[test]
    fn alpha_zero_likelihood_matches_mnl() {
        let f = tiny_features(6, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = ChoiceDataset::new(
            (0..40)
                .map(|_| {
                    let members: Vec<usize> =
                        (1..=6).filter(|_| rng.gen::<bool>()).collect();
                    let members = if members.is_empty() { vec![1] } else { members };
                    let pick = if rng.gen::<bool>() {
                        0
                    } else {
                        members[rng.gen_range(0..members.len())]
                    };
                    obs(&members, 6, pick)
                })
                .collect(),
            f,
        )
        .unwrap();
        let beta = vec![0.4, -0.2, 0.9];
        let gm = log_likelihood(&data, &GmnlParams { beta: beta.clone(), alpha: 0.0 });
        let (mnl, _) = mnl_ll_and_grad(&data, &beta);
        assert_abs_diff_eq!(gm, mnl, epsilon = 1e-10);
    }

    fn finite_diff_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..x.len())
            .map(|k| {
                let mut hi = x.to_vec();
                let mut lo = x.to_vec();
                hi[k] += h;
                lo[k] -= h;
                (f(&hi) - f(&lo)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradients_match_finite_differences() {
        let f = tiny_features(5, 3, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let data = ChoiceDataset::new(
            (0..25)
                .map(|_| {
                    let members: Vec<usize> =
                        (1..=5).filter(|_| rng.gen::<f64>() < 0.6).collect();
                    let members = if members.is_empty() { vec![2] } else { members };
                    let pick = if rng.gen::<f64>() < 0.3 {
                        0
                    } else {
                        members[rng.gen_range(0..members.len())]
                    };
                    obs(&members, 5, pick)
                })
                .collect(),
            f,
        )
        .unwrap();
        let beta = vec![0.3, -0.7, 0.2];
        for alpha in [0.0, 1.5] {
            let (_, grad) = ll_and_grad(&data, alpha, &beta);
            let fd = finite_diff_grad(
                |b| log_likelihood(&data, &GmnlParams { beta: b.to_vec(), alpha }),
                &beta,
            );
            for k in 0..3 {
                let rel = (grad[k] - fd[k]).abs() / fd[k].abs().max(1.0);
                assert!(rel < 1e-5, "alpha {alpha} coord {k}: {} vs {}", grad[k], fd[k]);
            }
        }
        let (_, grad) = mnl_ll_and_grad(&data, &beta);
        let fd = finite_diff_grad(|b| mnl_ll_and_grad(&data, b).0, &beta);
        for k in 0..3 {
            assert!((grad[k] - fd[k]).abs() / fd[k].abs().max(1.0) < 1e-5);
        }
    }

    #[test]
    fn partial_alpha_returns_zero_without_walkaways() {
        let f = tiny_features(4, 2, 5);
        let data =
            ChoiceDataset::new(vec![obs(&[1, 2], 4, 1), obs(&[2, 3], 4, 3)], f).unwrap();
        assert_eq!(solve_partial_alpha(&data, &[0.1, 0.2], 50.0), 0.0);
    }

    #[test]
    fn partial_alpha_is_stationary_and_concave() {
        let f = tiny_features(5, 2, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let data = ChoiceDataset::new(
            (0..60)
                .map(|_| {
                    let members: Vec<usize> =
                        (1..=5).filter(|_| rng.gen::<f64>() < 0.5).collect();
                    let members = if members.is_empty() { vec![1] } else { members };
                    let pick = if rng.gen::<f64>() < 0.7 {
                        0
                    } else {
                        members[rng.gen_range(0..members.len())]
                    };
                    obs(&members, 5, pick)
                })
                .collect(),
            f,
        )
        .unwrap();
        let beta = [0.2, -0.3];
        let alpha = solve_partial_alpha(&data, &beta, 50.0);
        // Finite-difference curvature of the full likelihood in alpha.
        let ll = |a: f64| log_likelihood(&data, &GmnlParams { beta: beta.to_vec(), alpha: a });
        let h = 1e-4;
        if alpha > h && alpha < 50.0 - h {
            let g = (ll(alpha + h) - ll(alpha - h)) / (2.0 * h);
            assert!(g.abs() < 1e-3, "not stationary: slope {g}");
        }
        let curv = (ll(alpha + h) - 2.0 * ll(alpha) + ll(alpha - h)) / (h * h);
        assert!(curv <= 0.0);
    }

    #[test]
    fn estimate_mnl_uniform_data_gives_zero_beta() {
        // Symmetric data: every product of {1,2} chosen equally often with
        // mirrored features, so beta = 0 is the MLE.
        let f = FeatureMatrix::new(vec![vec![0.0], vec![1.0], vec![-1.0]]).unwrap();
        let data = ChoiceDataset::new(
            vec![obs(&[1, 2], 2, 1), obs(&[1, 2], 2, 2), obs(&[1, 2], 2, 0)],
            f,
        )
        .unwrap();
        let beta = estimate_mnl(&data);
        assert!(beta[0].abs() < 1e-5, "beta = {beta:?}");
    }

    #[test]
    fn roc_auc_basic_cases() {
        assert_abs_diff_eq!(
            roc_auc(&[0.1, 0.4, 0.35, 0.8], &[false, false, true, true]).unwrap(),
            0.75,
            epsilon = 1e-12
        );
        assert_eq!(roc_auc(&[0.9, 0.1], &[true, false]).unwrap(), 1.0);
        // All scores tied: AUC is exactly one half.
        assert_abs_diff_eq!(
            roc_auc(&[0.5, 0.5, 0.5, 0.5], &[true, false, true, false]).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        assert!(roc_auc(&[0.5, 0.6], &[true, true]).is_err());
    }
}
