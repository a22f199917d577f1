//! Rank-K factorized model: the transition matrix is U Vᵀ, so choice and
//! revenue computations reduce from n x n linear systems to K x K ones.
//!
//! Admissibility (row-stochastic factorization, u_jk v_jk <= 1/n, and
//! alpha <= log n) guarantees the K x K fixed-point matrix has spectral radius
//! at most 1 - 1/n^2, which keeps the solves well conditioned and powers the
//! approximation scheme in the optimizer.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::chain::{check_prices, spectral_radius_power, Assortment, MarkovChainModel};
use crate::error::{ModelError, Result};
use crate::gmnl::GmnlModel;

const ROW_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-9;

/// Default constant-factor slack accepted by [`LowRankModel::perturbation_bound_check`].
pub const DEFAULT_PERTURBATION_CONSTANT: f64 = 4.0;

/// Rank-K model with transitions rho_ij = sum_k u_ik v_jk.
#[derive(Debug, Clone)]
pub struct LowRankModel {
    n: usize,
    k: usize,
    u: Vec<f64>,      // n x K, row i-1 = product i
    v: Vec<f64>,      // (n+1) x K, row j = state j
    lambda: Vec<f64>, // length n+1
    alpha: f64,
}

impl LowRankModel {
    pub fn new(
        n: usize,
        k: usize,
        u: Vec<f64>,
        v: Vec<f64>,
        lambda: Vec<f64>,
        alpha: f64,
    ) -> Result<Self> {
        if n == 0 || k == 0 || k >= n {
            return Err(ModelError::InvalidModel(format!(
                "need 1 <= K < n, got n={n}, K={k}"
            )));
        }
        if u.len() != n * k {
            return Err(ModelError::InvalidModel(format!(
                "U has {} entries but expected {}",
                u.len(),
                n * k
            )));
        }
        if v.len() != (n + 1) * k {
            return Err(ModelError::InvalidModel(format!(
                "V has {} entries but expected {}",
                v.len(),
                (n + 1) * k
            )));
        }
        if lambda.len() != n + 1 {
            return Err(ModelError::InvalidModel(format!(
                "lambda has length {} but expected {}",
                lambda.len(),
                n + 1
            )));
        }
        if u.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(ModelError::InvalidModel("U must be nonnegative".into()));
        }
        if v[..k].iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(ModelError::InvalidModel("V row 0 must be nonnegative".into()));
        }
        if v[k..].iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(ModelError::InvalidModel(
                "V entries for products must be strictly positive".into(),
            ));
        }
        let mut lsum = 0.0;
        for &x in &lambda {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(ModelError::InvalidModel("lambda must be nonnegative".into()));
            }
            lsum += x;
        }
        if (lsum - 1.0).abs() > ROW_TOL {
            return Err(ModelError::InvalidModel(format!("lambda sums to {lsum}, expected 1")));
        }
        // Column mass of each factor; rows of rho sum to u_i . colsum(V).
        let mut colsum = vec![0.0; k];
        for j in 0..=n {
            for m in 0..k {
                colsum[m] += v[j * k + m];
            }
        }
        for i in 0..n {
            let row: f64 = (0..k).map(|m| u[i * k + m] * colsum[m]).sum();
            if (row - 1.0).abs() > ROW_TOL {
                return Err(ModelError::InvalidModel(format!(
                    "transition row {} sums to {row}, expected 1",
                    i + 1
                )));
            }
        }
        let bound = 1.0 / n as f64;
        for i in 0..n {
            for m in 0..k {
                let prod = u[i * k + m] * v[(i + 1) * k + m];
                if prod > bound + ROW_TOL {
                    return Err(ModelError::InvalidModel(format!(
                        "u_{{{},{}}} v_{{{},{}}} = {prod} exceeds 1/n = {bound}",
                        i + 1,
                        m + 1,
                        i + 1,
                        m + 1
                    )));
                }
            }
        }
        if alpha < 0.0 || !alpha.is_finite() || alpha > (n as f64).ln() + ROW_TOL {
            return Err(ModelError::InvalidModel(format!(
                "alpha must lie in [0, log n] = [0, {:.6}], got {alpha}",
                (n as f64).ln()
            )));
        }
        Ok(Self { n, k, u, v, lambda, alpha })
    }

    pub fn num_products(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Factor row of product i (1-based).
    pub fn u_row(&self, i: usize) -> &[f64] {
        &self.u[(i - 1) * self.k..i * self.k]
    }

    /// Factor row of state j (0 = no-purchase state).
    pub fn v_row(&self, j: usize) -> &[f64] {
        &self.v[j * self.k..(j + 1) * self.k]
    }

    pub fn rho(&self, i: usize, j: usize) -> f64 {
        crate::math::dot(self.u_row(i), self.v_row(j))
    }

    /// V_k(S) = sum over the offered states plus state 0 of v_jk.
    fn offered_factor_mass(&self, s: &Assortment) -> Vec<f64> {
        let mut mass = self.v_row(0).to_vec();
        for &j in s.members() {
            for m in 0..self.k {
                mass[m] += self.v_row(j)[m];
            }
        }
        mass
    }

    /// Stopping probability exp(-alpha sum_k u_ik V_k(S)); zero off the
    /// assortment. At least 1/n for offered products.
    pub fn mu(&self, i: usize, s: &Assortment) -> Result<f64> {
        if i < 1 || i > self.n {
            return Err(ModelError::IndexOutOfRange { index: i, context: "product" });
        }
        if !s.contains(i) {
            return Ok(0.0);
        }
        let mass = self.offered_factor_mass(s);
        Ok((-self.alpha * crate::math::dot(self.u_row(i), &mass)).exp())
    }

    fn mu_vector(&self, s: &Assortment) -> Vec<f64> {
        let mass = self.offered_factor_mass(s);
        (1..=self.n)
            .map(|i| {
                if s.contains(i) {
                    (-self.alpha * crate::math::dot(self.u_row(i), &mass)).exp()
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// K x K fixed-point matrix M_km = sum_j (1 - mu_j) u_jk v_jm over
    /// products. Its spectral radius stays below 1 - 1/n^2 for admissible
    /// models.
    pub fn uv_matrix(&self, s: &Assortment) -> DMatrix<f64> {
        let mu = self.mu_vector(s);
        DMatrix::from_fn(self.k, self.k, |km, m| {
            (0..self.n)
                .map(|j| (1.0 - mu[j]) * self.u_row(j + 1)[km] * self.v_row(j + 1)[m])
                .sum()
        })
    }

    /// Expected revenue via the K x K decomposition: a single small solve
    /// instead of the n x n absorbing-chain system.
    pub fn expected_revenue(&self, s: &Assortment, prices: &[f64]) -> Result<f64> {
        check_prices(prices, self.n)?;
        if s.is_empty() {
            return Ok(0.0);
        }
        let mu = self.mu_vector(s);
        let m = self.uv_matrix(s);
        let radius = spectral_radius_power(&m);
        if radius >= 1.0 - 1e-9 {
            return Err(ModelError::SpectralRadiusViolation { radius });
        }

        // Direct sales on arrival, plus the walk contribution through the
        // factor-space fixed point y_k = sum_j v_jk f(j).
        let mut direct = 0.0;
        let mut g = DVector::zeros(self.k);
        let mut a = DVector::zeros(self.k);
        for i in 1..=self.n {
            let li = self.lambda[i];
            if s.contains(i) {
                direct += li * mu[i - 1] * prices[i - 1];
                for km in 0..self.k {
                    g[km] += prices[i - 1] * mu[i - 1] * self.v_row(i)[km];
                }
            }
            for km in 0..self.k {
                a[km] += li * (1.0 - mu[i - 1]) * self.u_row(i)[km];
            }
        }
        let system = DMatrix::identity(self.k, self.k) - m.transpose();
        let y = system
            .clone()
            .lu()
            .solve(&g)
            .ok_or_else(|| ModelError::SingularSystem("K x K solve failed".into()))?;
        let residual = (&system * &y - &g).abs().max();
        if residual > RESIDUAL_TOL {
            return Err(ModelError::SingularSystem(format!(
                "residual {residual:.3e} exceeds {RESIDUAL_TOL:.0e}"
            )));
        }
        Ok(direct + a.dot(&y))
    }

    /// Expands the factorization into the dense n-state model; slow route
    /// used to cross-check the decomposition above.
    pub fn to_chain(&self) -> Result<MarkovChainModel> {
        let mut rho = Vec::with_capacity(self.n * (self.n + 1));
        for i in 1..=self.n {
            for j in 0..=self.n {
                rho.push(self.rho(i, j));
            }
        }
        MarkovChainModel::new(self.n, self.lambda.clone(), rho, self.alpha)
    }

    /// Checks that solving against perturbed data (H, vhat) stays within a
    /// (1 +/- c*eps) entrywise sandwich of solving against the exact
    /// (uv_matrix(S), v_j). Preconditions — (1-eps)H <= UV(S) <= (1+eps)H and
    /// (1-eps)vhat <= v_j <= (1+eps)vhat entrywise — are reported as errors,
    /// distinct from the conclusion failing (Ok(false)).
    pub fn perturbation_bound_check(
        &self,
        s: &Assortment,
        j: usize,
        h: &DMatrix<f64>,
        vhat: &[f64],
        eps: f64,
        c: f64,
    ) -> Result<bool> {
        if j < 1 || j > self.n {
            return Err(ModelError::IndexOutOfRange { index: j, context: "product" });
        }
        if h.nrows() != self.k || h.ncols() != self.k || vhat.len() != self.k {
            return Err(ModelError::InvalidInput("H and vhat must be K x K and K".into()));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(ModelError::InvalidInput(format!("eps must be in (0,1), got {eps}")));
        }
        let m = self.uv_matrix(s);
        for r in 0..self.k {
            for cidx in 0..self.k {
                let exact = m[(r, cidx)];
                let approx = h[(r, cidx)];
                if exact < (1.0 - eps) * approx - 1e-15 || exact > (1.0 + eps) * approx + 1e-15 {
                    return Err(ModelError::InvalidInput(format!(
                        "H entry ({r},{cidx}) is not an eps-approximation of UV(S)"
                    )));
                }
            }
        }
        let vj = self.v_row(j);
        for km in 0..self.k {
            if vj[km] < (1.0 - eps) * vhat[km] - 1e-15 || vj[km] > (1.0 + eps) * vhat[km] + 1e-15 {
                return Err(ModelError::InvalidInput(format!(
                    "vhat entry {km} is not an eps-approximation of v_j"
                )));
            }
        }

        let solve = |mat: &DMatrix<f64>, rhs: &[f64]| -> Result<DVector<f64>> {
            let system = DMatrix::identity(self.k, self.k) - mat;
            system
                .lu()
                .solve(&DVector::from_row_slice(rhs))
                .ok_or_else(|| ModelError::SingularSystem("perturbation solve failed".into()))
        };
        let exact = solve(&m, vj)?;
        let approx = solve(h, vhat)?;
        for km in 0..self.k {
            let lo = (1.0 - c * eps) * approx[km] - 1e-12;
            let hi = (1.0 + c * eps) * approx[km] + 1e-12;
            if exact[km] < lo || exact[km] > hi {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Rank-1 embedding of a normalized-weight model: U is the all-ones column,
/// V and lambda are the weights.
pub fn from_gmnl(model: &GmnlModel) -> Result<LowRankModel> {
    let n = model.num_products();
    let v = model.weights().to_vec();
    LowRankModel::new(n, 1, vec![1.0; n], v.clone(), v, model.alpha())
}

/// Draws a random model satisfying every admissibility constraint: factor
/// weights jittered around the uniform value, U rows scaled so each
/// transition row sums to one, alpha clamped to log n.
pub fn random_admissible(
    n: usize,
    k: usize,
    alpha: f64,
    rng: &mut impl Rng,
) -> Result<LowRankModel> {
    if n < 2 || k == 0 || k >= n {
        return Err(ModelError::InvalidInput(format!("need 1 <= K < n >= 2, got n={n}, K={k}")));
    }
    let alpha = alpha.min((n as f64).ln()).max(0.0);
    // Narrow jitter for K=1 keeps u_j v_j below 1/n; wider jitter is safe for
    // K >= 2 where each factor carries only part of the row mass.
    let (lo, hi) = if k == 1 { (0.98, 1.02) } else { (0.8, 1.2) };
    let base = 1.0 / (n as f64 + 1.0);
    for _attempt in 0..1000 {
        let v: Vec<f64> =
            (0..(n + 1) * k).map(|_| base * (lo + (hi - lo) * rng.gen::<f64>())).collect();
        let mut colsum = vec![0.0; k];
        for j in 0..=n {
            for m in 0..k {
                colsum[m] += v[j * k + m];
            }
        }
        let mut u = Vec::with_capacity(n * k);
        for _ in 0..n {
            let raw: Vec<f64> = (0..k).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
            let scale: f64 = (0..k).map(|m| raw[m] * colsum[m]).sum();
            u.extend(raw.iter().map(|r| r / scale));
        }
        let bound = 1.0 / n as f64;
        let ok = (0..n)
            .all(|i| (0..k).all(|m| u[i * k + m] * v[(i + 1) * k + m] <= bound));
        if !ok {
            continue;
        }
        let lambda = crate::chain::random_simplex(n + 1, rng);
        return LowRankModel::new(n, k, u, v, lambda, alpha);
    }
    Err(ModelError::InvalidInput(
        "could not draw an admissible model; try smaller K or larger n".into(),
    ))
}
