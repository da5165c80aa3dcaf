//! Model core: parameter state, Euclidean distance, and the exact
//! log-likelihood, log-prior, and log-posterior.
//!
//! The response model is logistic:
//!
//! ```text
//! logit P(y_ij = Yea) = theta_i + beta_j - gamma * ||z_i - w_j||
//! ```
//!
//! with independent priors N(0, sigma_theta^2) on each theta_i,
//! N(0, sigma_beta^2) on each beta_j, standard multivariate normals on the
//! latent rows z_i and w_j, a normal prior on log gamma, and an
//! inverse-gamma hyperprior on sigma_theta^2. sigma_beta^2 is a fixed
//! hyperparameter.
//!
//! Everything here is a pure function of its inputs and safe to call
//! concurrently. Likelihood sums run in a fixed serial order so results are
//! bit-reproducible for a given input.

use serde::{Deserialize, Serialize};

use crate::data::{Vote, VoteMatrix};

pub(crate) const LN_2PI: f64 = 1.8378770664093453;

/// Row-major matrix of latent positions, one length-`k` row per node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Positions {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl Positions {
    pub fn zeros(n: usize, k: usize) -> Self {
        Positions {
            n,
            k,
            data: vec![0.0; n * k],
        }
    }

    /// Build from a flat row-major buffer. Panics if the length is not n*k.
    pub fn from_flat(n: usize, k: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * k, "position buffer length mismatch");
        Positions { n, k, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.k)
    }

    /// Mean of all rows.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.k];
        for row in self.rows() {
            for (acc, &x) in c.iter_mut().zip(row) {
                *acc += x;
            }
        }
        for acc in &mut c {
            *acc /= self.n as f64;
        }
        c
    }

    pub fn translate(&mut self, shift: &[f64]) {
        assert_eq!(shift.len(), self.k);
        for i in 0..self.n {
            for (x, &s) in self.row_mut(i).iter_mut().zip(shift) {
                *x += s;
            }
        }
    }

    /// Right-multiply every row by the k-by-k matrix `q` (row-major):
    /// `out[i][c] = sum_a self[i][a] * q[a][c]`.
    pub fn transformed(&self, q: &[f64]) -> Positions {
        assert_eq!(q.len(), self.k * self.k, "transform must be k x k");
        let mut out = Positions::zeros(self.n, self.k);
        for i in 0..self.n {
            let row = self.row(i);
            let dst = out.row_mut(i);
            for (c, d) in dst.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (a, &x) in row.iter().enumerate() {
                    acc += x * q[a * self.k + c];
                }
                *d = acc;
            }
        }
        out
    }

    /// Sum of squared entries.
    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

/// One full parameter configuration of the model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub theta: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: f64,
    pub z: Positions,
    pub w: Positions,
    pub sigma_theta_sq: f64,
}

impl ModelState {
    /// Panics if the invariants (gamma > 0, sigma_theta_sq > 0, matching
    /// dimensions, shared latent dimension) do not hold.
    pub fn new(
        theta: Vec<f64>,
        beta: Vec<f64>,
        gamma: f64,
        z: Positions,
        w: Positions,
        sigma_theta_sq: f64,
    ) -> Self {
        assert!(gamma > 0.0, "gamma must be positive");
        assert!(sigma_theta_sq > 0.0, "sigma_theta_sq must be positive");
        assert_eq!(z.k(), w.k(), "z and w must share the latent dimension");
        assert_eq!(theta.len(), z.n(), "theta length must match z rows");
        assert_eq!(beta.len(), w.n(), "beta length must match w rows");
        ModelState {
            theta,
            beta,
            gamma,
            z,
            w,
            sigma_theta_sq,
        }
    }

    #[inline]
    pub fn n_legislators(&self) -> usize {
        self.theta.len()
    }

    #[inline]
    pub fn n_bills(&self) -> usize {
        self.beta.len()
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.z.k()
    }

    /// Linear predictor eta_ij = theta_i + beta_j - gamma * ||z_i - w_j||.
    #[inline]
    pub fn eta(&self, i: usize, j: usize) -> f64 {
        self.theta[i] + self.beta[j] - self.gamma * euclidean_distance(self.z.row(i), self.w.row(j))
    }

    /// Fitted probability of a Yea vote in cell (i, j).
    #[inline]
    pub fn prob_yea(&self, i: usize, j: usize) -> f64 {
        sigmoid(self.eta(i, j))
    }
}

/// Fixed prior constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Latent dimension K.
    pub k: usize,
    pub sigma_beta_sq: f64,
    pub a_sigma: f64,
    pub b_sigma: f64,
    pub mu_gamma: f64,
    pub sigma_gamma_sq: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            k: 2,
            sigma_beta_sq: 1.0,
            a_sigma: 1.0,
            b_sigma: 1.0,
            mu_gamma: 0.0,
            sigma_gamma_sq: 1.0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> crate::Result<()> {
        if self.k == 0 {
            return Err(crate::Error::config("latent dimension k must be positive"));
        }
        for (name, v) in [
            ("sigma_beta_sq", self.sigma_beta_sq),
            ("a_sigma", self.a_sigma),
            ("b_sigma", self.b_sigma),
            ("sigma_gamma_sq", self.sigma_gamma_sq),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(crate::Error::config(format!("{name} must be a positive finite real")));
            }
        }
        if !self.mu_gamma.is_finite() {
            return Err(crate::Error::config("mu_gamma must be finite"));
        }
        Ok(())
    }
}

/// Euclidean (L2) distance between two equal-length vectors.
///
/// Panics if the vectors differ in length or are empty; returns exactly 0
/// only when the coordinates are identical.
#[inline]
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty(), "distance requires dimension >= 1");
    assert_eq!(a.len(), b.len(), "distance requires equal dimensions");
    let mut sum = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum.sqrt()
}

/// log(sigmoid(x)), overflow-safe for any finite x.
#[inline]
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Logistic function, overflow-safe for any finite x.
#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Log Bernoulli mass of a single observed cell under the logistic link.
///
/// Panics if `y` is Missing (imputation is a sampler concern) or the
/// indices are out of range.
#[inline]
pub fn log_likelihood_cell(state: &ModelState, i: usize, j: usize, y: Vote) -> f64 {
    assert!(!y.is_missing(), "cell likelihood is undefined for Missing votes");
    let eta = state.eta(i, j);
    match y {
        Vote::Yea => log_sigmoid(eta),
        Vote::Nay => log_sigmoid(-eta),
        Vote::Missing => unreachable!(),
    }
}

/// Observed-data log-likelihood: the sum over non-Missing cells. Missing
/// cells contribute zero. Cells are visited in a fixed row-major order.
pub fn log_likelihood(state: &ModelState, data: &VoteMatrix) -> f64 {
    assert_eq!(state.n_legislators(), data.n_legislators(), "row dimension mismatch");
    assert_eq!(state.n_bills(), data.n_bills(), "column dimension mismatch");
    let mut total = 0.0;
    for i in 0..data.n_legislators() {
        let zi = state.z.row(i);
        let ti = state.theta[i];
        for (j, &y) in data.row(i).iter().enumerate() {
            if y.is_missing() {
                continue;
            }
            let eta = ti + state.beta[j] - state.gamma * euclidean_distance(zi, state.w.row(j));
            total += match y {
                Vote::Yea => log_sigmoid(eta),
                Vote::Nay => log_sigmoid(-eta),
                Vote::Missing => unreachable!(),
            };
        }
    }
    total
}

#[inline]
pub(crate) fn ln_normal(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (LN_2PI + var.ln()) - d * d / (2.0 * var)
}

#[inline]
pub(crate) fn ln_inv_gamma(x: f64, shape: f64, scale: f64) -> f64 {
    shape * scale.ln() - statrs::function::gamma::ln_gamma(shape) - (shape + 1.0) * x.ln()
        - scale / x
}

/// Joint log-prior density of a full parameter configuration.
///
/// The gamma term is the density of gamma itself, derived from the normal
/// prior on log gamma by change of variables (it includes the -ln(gamma)
/// Jacobian). Panics if gamma or sigma_theta_sq are not strictly positive
/// or the state is inconsistent with `hyper.k`.
pub fn log_prior(state: &ModelState, hyper: &Hyperparams) -> f64 {
    assert!(state.gamma > 0.0, "gamma must be positive");
    assert!(state.sigma_theta_sq > 0.0, "sigma_theta_sq must be positive");
    assert_eq!(state.k(), hyper.k, "latent dimension mismatch");

    let mut total = 0.0;
    for &t in &state.theta {
        total += ln_normal(t, 0.0, state.sigma_theta_sq);
    }
    for &b in &state.beta {
        total += ln_normal(b, 0.0, hyper.sigma_beta_sq);
    }
    // standard MVN(0, I) factorizes over coordinates
    let n_coords = (state.z.n() + state.w.n()) as f64 * hyper.k as f64;
    total += -0.5 * n_coords * LN_2PI - 0.5 * (state.z.sum_sq() + state.w.sum_sq());

    let log_gamma = state.gamma.ln();
    total += ln_normal(log_gamma, hyper.mu_gamma, hyper.sigma_gamma_sq) - log_gamma;
    total += ln_inv_gamma(state.sigma_theta_sq, hyper.a_sigma, hyper.b_sigma);
    total
}

/// Unnormalized log-posterior: log-likelihood plus log-prior.
pub fn log_posterior(state: &ModelState, data: &VoteMatrix, hyper: &Hyperparams) -> f64 {
    log_likelihood(state, data) + log_prior(state, hyper)
}

/// Log-posterior with gamma expressed on the log scale, i.e. the density of
/// (theta, beta, log gamma, Z, W, sigma_theta_sq). This is the target the
/// sampler's log-gamma block walks on; it differs from [`log_posterior`] by
/// +ln(gamma).
pub fn log_posterior_log_gamma_scale(
    state: &ModelState,
    data: &VoteMatrix,
    hyper: &Hyperparams,
) -> f64 {
    log_posterior(state, data, hyper) + state.gamma.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;
    use approx::assert_abs_diff_eq;

    fn ids(prefix: &str, n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn tiny_state(theta: f64, beta: f64, gamma: f64, zx: f64, wx: f64) -> ModelState {
        ModelState::new(
            vec![theta],
            vec![beta],
            gamma,
            Positions::from_flat(1, 1, vec![zx]),
            Positions::from_flat(1, 1, vec![wx]),
            1.0,
        )
    }

    /// Random small state and hyperparams for property checks.
    fn random_state(stream: &mut Stream, n: usize, p: usize, k: usize) -> (ModelState, Hyperparams) {
        let theta: Vec<f64> = (0..n).map(|_| stream.standard_normal()).collect();
        let beta: Vec<f64> = (0..p).map(|_| stream.standard_normal()).collect();
        let z = Positions::from_flat(n, k, (0..n * k).map(|_| stream.standard_normal()).collect());
        let w = Positions::from_flat(p, k, (0..p * k).map(|_| stream.standard_normal()).collect());
        let gamma = (0.25 + stream.uniform() * 2.0).exp() * 0.5;
        let state = ModelState::new(theta, beta, gamma, z, w, 0.5 + stream.uniform());
        let hyper = Hyperparams {
            k,
            ..Hyperparams::default()
        };
        (state, hyper)
    }

    fn random_orthogonal(stream: &mut Stream, k: usize) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(k, k, |_, _| stream.standard_normal());
        let q = m.qr().q();
        let mut out = vec![0.0; k * k];
        for r in 0..k {
            for c in 0..k {
                out[r * k + c] = q[(r, c)];
            }
        }
        out
    }

    #[test]
    fn distance_identity_and_pythagoras() {
        assert_eq!(euclidean_distance(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(euclidean_distance(&[0.0, 0.0], &[3.0, 4.0]), 5.0);
        assert_abs_diff_eq!(
            euclidean_distance(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]),
            std::f64::consts::SQRT_2,
            epsilon = 1e-15
        );
    }

    #[test]
    #[should_panic(expected = "equal dimensions")]
    fn distance_dimension_mismatch_panics() {
        euclidean_distance(&[1.0], &[1.0, 2.0]);
    }

    #[test]
    fn distance_zero_iff_equal() {
        let mut s = Stream::new(11);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..3).map(|_| s.standard_normal()).collect();
            let mut b = a.clone();
            assert_eq!(euclidean_distance(&a, &b), 0.0);
            b[1] += 1e-9;
            assert!(euclidean_distance(&a, &b) > 0.0);
        }
    }

    #[test]
    fn distance_symmetry_and_nonnegativity() {
        let mut s = Stream::new(5);
        for _ in 0..10_000 {
            let a: Vec<f64> = (0..2).map(|_| 4.0 * s.standard_normal()).collect();
            let b: Vec<f64> = (0..2).map(|_| 4.0 * s.standard_normal()).collect();
            let d = euclidean_distance(&a, &b);
            assert!(d >= 0.0);
            assert_eq!(d, euclidean_distance(&b, &a));
        }
    }

    #[test]
    fn triangle_inequality_holds_on_random_triples() {
        let mut s = Stream::new(17);
        for trial in 0..100_000u64 {
            let k = 1 + (trial % 4) as usize;
            let sample = |s: &mut Stream| -> Vec<f64> {
                (0..k).map(|_| 10.0 * s.standard_normal()).collect()
            };
            let (x, y, z) = (sample(&mut s), sample(&mut s), sample(&mut s));
            let lhs = euclidean_distance(&x, &y) + euclidean_distance(&y, &z);
            let rhs = euclidean_distance(&x, &z);
            assert!(lhs >= rhs - 1e-12, "violation at trial {trial}: {lhs} < {rhs}");
        }
    }

    #[test]
    fn distance_invariant_under_rigid_motion() {
        let mut s = Stream::new(23);
        for _ in 0..200 {
            let k = 2 + (s.next_u64() % 2) as usize;
            let a: Vec<f64> = (0..k).map(|_| s.standard_normal()).collect();
            let b: Vec<f64> = (0..k).map(|_| s.standard_normal()).collect();
            let q = random_orthogonal(&mut s, k);
            let c: Vec<f64> = (0..k).map(|_| s.standard_normal()).collect();
            let apply = |v: &[f64]| -> Vec<f64> {
                (0..k)
                    .map(|col| (0..k).map(|r| v[r] * q[r * k + col]).sum::<f64>() + c[col])
                    .collect()
            };
            assert_abs_diff_eq!(
                euclidean_distance(&apply(&a), &apply(&b)),
                euclidean_distance(&a, &b),
                epsilon = 1e-10
            );
        }
    }

    use rand::RngCore;

    #[test]
    fn cell_likelihood_matches_scalar_oracles() {
        // eta = 0 -> p = 1/2
        let s = tiny_state(0.0, 0.0, 1.0, 0.3, 0.3);
        assert_abs_diff_eq!(
            log_likelihood_cell(&s, 0, 0, Vote::Yea),
            (0.5f64).ln(),
            epsilon = 1e-12
        );
        // theta=0.5, beta=0.3, gamma=1, ||z-w||=1 -> eta=-0.2
        let s = tiny_state(0.5, 0.3, 1.0, 0.0, 1.0);
        assert_abs_diff_eq!(
            log_likelihood_cell(&s, 0, 0, Vote::Yea),
            -0.7981388693815918,
            epsilon = 1e-12
        );
        // gamma -> 0+ degenerates to logistic(theta + beta); Nay at eta = 3
        let s = tiny_state(2.0, 1.0, 1e-300, 0.7, -0.4);
        assert_abs_diff_eq!(
            log_likelihood_cell(&s, 0, 0, Vote::Nay),
            -3.0485873515737421,
            epsilon = 1e-9
        );
    }

    #[test]
    #[should_panic(expected = "Missing")]
    fn cell_likelihood_rejects_missing() {
        let s = tiny_state(0.0, 0.0, 1.0, 0.0, 0.0);
        log_likelihood_cell(&s, 0, 0, Vote::Missing);
    }

    #[test]
    fn cell_likelihood_is_normalized() {
        let mut s = Stream::new(31);
        for _ in 0..1000 {
            let st = tiny_state(
                3.0 * s.standard_normal(),
                3.0 * s.standard_normal(),
                s.uniform() * 4.0 + 0.01,
                s.standard_normal(),
                s.standard_normal(),
            );
            let p_yea = log_likelihood_cell(&st, 0, 0, Vote::Yea).exp();
            let p_nay = log_likelihood_cell(&st, 0, 0, Vote::Nay).exp();
            assert_abs_diff_eq!(p_yea + p_nay, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn log_sigmoid_is_overflow_safe() {
        assert_abs_diff_eq!(log_sigmoid(800.0), 0.0, epsilon = 1e-300);
        assert_abs_diff_eq!(log_sigmoid(-800.0), -800.0, epsilon = 1e-9);
        assert!(log_sigmoid(f64::MAX).is_finite() || log_sigmoid(f64::MAX) == 0.0);
    }

    #[test]
    fn matrix_likelihood_sums_observed_cells() {
        // all-Missing matrix contributes zero
        let all_missing = VoteMatrix::new(
            vec![Vote::Missing; 4],
            ids("l", 2),
            ids("b", 2),
            None,
        )
        .unwrap();
        let mut stream = Stream::new(41);
        let (state, _) = random_state(&mut stream, 2, 2, 2);
        assert_eq!(log_likelihood(&state, &all_missing), 0.0);

        // single observed Yea cell at eta = 0
        let single = VoteMatrix::new(vec![Vote::Yea], ids("l", 1), ids("b", 1), None).unwrap();
        let s = tiny_state(0.0, 0.0, 1.0, 0.5, 0.5);
        assert_abs_diff_eq!(log_likelihood(&s, &single), (0.5f64).ln(), epsilon = 1e-12);

        // 2x2 equals brute-force sum of the four cell calls
        let m = VoteMatrix::new(
            vec![Vote::Yea, Vote::Nay, Vote::Nay, Vote::Yea],
            ids("l", 2),
            ids("b", 2),
            None,
        )
        .unwrap();
        let (state, _) = random_state(&mut stream, 2, 2, 2);
        let brute: f64 = (0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| log_likelihood_cell(&state, i, j, m.get(i, j)))
            .sum();
        assert_abs_diff_eq!(log_likelihood(&state, &m), brute, epsilon = 1e-12);
    }

    #[test]
    fn prior_matches_closed_form_oracle() {
        let state = tiny_state(0.0, 0.0, 1.0, 0.0, 0.0);
        let hyper = Hyperparams {
            k: 1,
            ..Hyperparams::default()
        };
        // five standard-normal log densities at 0 plus ln InvGamma(1; 1, 1)
        let expected = 5.0 * (-0.9189385332046727) - 1.0;
        assert_abs_diff_eq!(log_prior(&state, &hyper), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(log_prior(&state, &hyper), -5.5946926660233635, epsilon = 1e-12);

        // moving theta_1 from 0 to 1 with unit variance costs exactly 1/2
        let moved = tiny_state(1.0, 0.0, 1.0, 0.0, 0.0);
        assert_abs_diff_eq!(
            log_prior(&state, &hyper) - log_prior(&moved, &hyper),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn prior_vanishes_as_gamma_approaches_zero() {
        let hyper = Hyperparams {
            k: 1,
            ..Hyperparams::default()
        };
        let at = |gamma: f64| log_prior(&tiny_state(0.0, 0.0, gamma, 0.0, 0.0), &hyper);
        let seq = [at(1e-2), at(1e-4), at(1e-8), at(1e-16)];
        for pair in seq.windows(2) {
            assert!(pair[1] < pair[0]);
        }
        assert!(seq[3] < -100.0);
    }

    #[test]
    #[should_panic(expected = "gamma must be positive")]
    fn prior_rejects_nonpositive_gamma() {
        let mut state = tiny_state(0.0, 0.0, 1.0, 0.0, 0.0);
        state.gamma = 0.0;
        log_prior(&state, &Hyperparams { k: 1, ..Hyperparams::default() });
    }

    #[test]
    fn posterior_is_likelihood_plus_prior() {
        let data = VoteMatrix::new(vec![Vote::Yea], ids("l", 1), ids("b", 1), None).unwrap();
        let state = tiny_state(0.0, 0.0, 1.0, 0.0, 0.0);
        let hyper = Hyperparams {
            k: 1,
            ..Hyperparams::default()
        };
        let lp = log_posterior(&state, &data, &hyper);
        assert_abs_diff_eq!(lp, (0.5f64).ln() - 5.5946926660233635, epsilon = 1e-12);
        assert_abs_diff_eq!(lp, -6.287839846583309, epsilon = 1e-12);
        assert_abs_diff_eq!(
            log_posterior_log_gamma_scale(&state, &data, &hyper),
            lp, // gamma = 1 so the Jacobian vanishes
            epsilon = 1e-15
        );
    }

    #[test]
    fn flipping_a_cell_to_its_likelier_value_never_decreases_posterior() {
        let mut stream = Stream::new(57);
        for _ in 0..200 {
            let (state, hyper) = random_state(&mut stream, 3, 4, 2);
            let (i, j) = (
                (stream.next_u64() % 3) as usize,
                (stream.next_u64() % 4) as usize,
            );
            let likely = if state.prob_yea(i, j) >= 0.5 { Vote::Yea } else { Vote::Nay };
            let unlikely = if likely == Vote::Yea { Vote::Nay } else { Vote::Yea };
            let build = |v: Vote| {
                let mut cells = vec![Vote::Missing; 12];
                cells[i * 4 + j] = v;
                VoteMatrix::new(cells, ids("l", 3), ids("b", 4), None).unwrap()
            };
            assert!(
                log_posterior(&state, &build(likely), &hyper)
                    >= log_posterior(&state, &build(unlikely), &hyper)
            );
        }
    }

    #[test]
    fn posterior_invariant_under_joint_orthogonal_transform() {
        // The likelihood is invariant under any rigid motion (Q, c) of the
        // joint configuration; the full posterior is invariant under Q alone
        // because the latent prior is centered at the origin.
        let mut stream = Stream::new(71);
        for _ in 0..50 {
            let (state, hyper) = random_state(&mut stream, 4, 5, 2);
            let data = {
                let cells: Vec<Vote> = (0..20)
                    .map(|_| if stream.uniform() < 0.5 { Vote::Yea } else { Vote::Nay })
                    .collect();
                VoteMatrix::new(cells, ids("l", 4), ids("b", 5), None).unwrap()
            };
            let q = random_orthogonal(&mut stream, 2);
            let c: Vec<f64> = (0..2).map(|_| stream.standard_normal()).collect();

            let mut rotated = state.clone();
            rotated.z = state.z.transformed(&q);
            rotated.w = state.w.transformed(&q);
            assert_abs_diff_eq!(
                log_posterior(&rotated, &data, &hyper),
                log_posterior(&state, &data, &hyper),
                epsilon = 1e-9
            );

            let mut shifted = rotated.clone();
            shifted.z.translate(&c);
            shifted.w.translate(&c);
            assert_abs_diff_eq!(
                log_likelihood(&shifted, &data),
                log_likelihood(&state, &data),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn finite_difference_along_eta_matches_residual() {
        let mut stream = Stream::new(83);
        for _ in 0..200 {
            let st = tiny_state(
                stream.standard_normal(),
                stream.standard_normal(),
                0.5 + stream.uniform(),
                stream.standard_normal(),
                stream.standard_normal(),
            );
            for y in [Vote::Yea, Vote::Nay] {
                let h = 1e-5;
                let mut up = st.clone();
                up.theta[0] += h;
                let mut dn = st.clone();
                dn.theta[0] -= h;
                let fd = (log_likelihood_cell(&up, 0, 0, y) - log_likelihood_cell(&dn, 0, 0, y))
                    / (2.0 * h);
                let residual = y.as_binary() - st.prob_yea(0, 0);
                assert_abs_diff_eq!(fd, residual, epsilon = 1e-6);
            }
        }
    }
}
