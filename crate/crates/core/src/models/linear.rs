//! Bayesian linear mixed model with flat prior on the fixed effects:
//!
//! ```text
//! y | β, u, λ ~ N(Xβ + Zu, λ_E⁻¹ I)    u | λ ~ N(0, λ_R⁻¹ I)
//! λ_E ~ Gamma(e₁, e₂)                  λ_R ~ Gamma(r₁, r₂)
//! ```
//!
//! Writing `ξ = (β, u)` and `W = [X Z]`, the conditional `ξ | λ, y` is normal
//! with precision `Q = λ_E WᵀW + diag(0, λ_R I)` and mean `Q⁻¹ λ_E Wᵀy`, so
//! `λ` is a two-dimensional linchpin. Gamma priors use shape and rate.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::chain::ChainOutput;
use crate::dist::{Gamma, RandomStream, Univariate, HALF_LN_2PI};
use crate::error::{Error, Result};
use crate::kernels::TargetDensity;
use crate::linalg;
use crate::models::table::{hstack, Table};
use crate::sampler::ConditionalSampler;

/// Full-column-rank check: smallest over largest singular value.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearModelHyper {
    pub e1: f64,
    pub e2: f64,
    pub r1: f64,
    pub r2: f64,
}

impl Default for LinearModelHyper {
    fn default() -> Self {
        Self {
            e1: 1.0,
            e2: 1.0,
            r1: 1.0,
            r2: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LinearModelData {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub hyper: LinearModelHyper,
}

impl LinearModelData {
    pub fn new(y: DVector<f64>, x: DMatrix<f64>, z: DMatrix<f64>, hyper: LinearModelHyper) -> Result<Self> {
        let n = y.len();
        if x.nrows() != n || z.nrows() != n {
            return Err(Error::domain("y, X and Z must have the same number of rows"));
        }
        let (p, k) = (x.ncols(), z.ncols());
        if p == 0 || k == 0 {
            return Err(Error::domain("X and Z need at least one column each"));
        }
        if p.max(k) >= n {
            return Err(Error::domain(format!("need max(p, k) < n, got p={p}, k={k}, n={n}")));
        }
        for (name, m) in [("X", &x), ("Z", &z)] {
            if linalg::condition_ratio(m) <= RANK_TOLERANCE {
                return Err(Error::domain(format!("{name} is not of full column rank")));
            }
        }
        let LinearModelHyper { e1, e2, r1, r2 } = hyper;
        if [e1, e2, r1, r2].iter().any(|&v| !(v > 0.0 && v.is_finite())) {
            return Err(Error::domain("hyperparameters e1, e2, r1, r2 must be positive"));
        }
        Ok(Self { y, x, z, hyper })
    }

    /// Columns `y`, `x1..xp`, `z1..zk`.
    pub fn from_table(table: &Table, hyper: LinearModelHyper) -> Result<Self> {
        let y = DVector::from_vec(table.column("y")?);
        Self::new(y, table.numbered("x"), table.numbered("z"), hyper)
    }

    pub fn to_table(&self) -> Result<Table> {
        let mut headers = vec!["y".to_string()];
        headers.extend(ChainOutput::numbered("x", self.x.ncols()));
        headers.extend(ChainOutput::numbered("z", self.z.ncols()));
        let y = DMatrix::from_column_slice(self.y.len(), 1, self.y.as_slice());
        Table::new(headers, hstack(&[&y, &self.x, &self.z])?)
    }
}

/// Sufficient statistics and closed forms for one dataset.
#[derive(Clone, Debug)]
pub struct LinearModel {
    data: LinearModelData,
    w: DMatrix<f64>,
    wtw: DMatrix<f64>,
    wty: DVector<f64>,
}

struct XiPosterior {
    chol: Cholesky<f64, Dyn>,
    mean: DVector<f64>,
}

impl LinearModel {
    pub fn new(data: LinearModelData) -> Result<Self> {
        let w = hstack(&[&data.x, &data.z])?;
        let wtw = w.transpose() * &w;
        let wty = w.transpose() * &data.y;
        Ok(Self { data, w, wtw, wty })
    }

    pub fn data(&self) -> &LinearModelData {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.y.len()
    }

    pub fn p(&self) -> usize {
        self.data.x.ncols()
    }

    pub fn k(&self) -> usize {
        self.data.z.ncols()
    }

    /// `beta1..`, `u1..`, then the log precisions.
    pub fn names(&self) -> Vec<String> {
        let mut names = ChainOutput::numbered("beta", self.p());
        names.extend(ChainOutput::numbered("u", self.k()));
        names.push("log_lambda_e".into());
        names.push("log_lambda_r".into());
        names
    }

    fn check_lambda(lambda_e: f64, lambda_r: f64) -> Result<()> {
        if !(lambda_e > 0.0 && lambda_r > 0.0 && lambda_e.is_finite() && lambda_r.is_finite()) {
            return Err(Error::domain(format!(
                "precisions must be positive, got λ_E={lambda_e}, λ_R={lambda_r}"
            )));
        }
        Ok(())
    }

    /// `λ_E WᵀW + diag(0_p, λ_R I_k)`.
    pub fn precision(&self, lambda_e: f64, lambda_r: f64) -> DMatrix<f64> {
        let p = self.p();
        let mut q = &self.wtw * lambda_e;
        for i in p..p + self.k() {
            q[(i, i)] += lambda_r;
        }
        q
    }

    fn posterior(&self, lambda_e: f64, lambda_r: f64) -> Result<XiPosterior> {
        Self::check_lambda(lambda_e, lambda_r)?;
        let chol = linalg::cholesky(&self.precision(lambda_e, lambda_r), "precision of (β, u)")?;
        let mean = chol.solve(&(&self.wty * lambda_e));
        Ok(XiPosterior { chol, mean })
    }

    /// Mean of `ξ | λ, y`.
    pub fn conditional_mean(&self, lambda_e: f64, lambda_r: f64) -> Result<DVector<f64>> {
        Ok(self.posterior(lambda_e, lambda_r)?.mean)
    }

    /// An exact draw of `ξ | λ, y` and its log density.
    pub fn conditional_xi(&self, lambda_e: f64, lambda_r: f64, rng: &mut RandomStream) -> Result<(DVector<f64>, f64)> {
        let post = self.posterior(lambda_e, lambda_r)?;
        let z = rng.standard_normal_vector(self.p() + self.k());
        let l = post.chol.l();
        let step = l
            .transpose()
            .solve_upper_triangular(&z)
            .expect("cholesky factor has positive diagonal");
        let xi = &post.mean + step;
        let d = (self.p() + self.k()) as f64;
        let ln = -d * HALF_LN_2PI + linalg::ln_det_chol(&l) / 2.0 - 0.5 * z.norm_squared();
        Ok((xi, ln))
    }

    pub fn conditional_ln_density(&self, xi: &DVector<f64>, lambda_e: f64, lambda_r: f64) -> f64 {
        let Ok(post) = self.posterior(lambda_e, lambda_r) else {
            return f64::NEG_INFINITY;
        };
        let l = post.chol.l();
        let w = l.transpose() * (xi - &post.mean);
        let d = (self.p() + self.k()) as f64;
        -d * HALF_LN_2PI + linalg::ln_det_chol(&l) / 2.0 - 0.5 * w.norm_squared()
    }

    /// Gamma log densities of the two precisions.
    pub fn log_prior_lambda(&self, lambda_e: f64, lambda_r: f64) -> f64 {
        let h = self.data.hyper;
        let ge = Gamma::new(h.e1, h.e2).expect("validated hyperparameters");
        let gr = Gamma::new(h.r1, h.r2).expect("validated hyperparameters");
        ge.ln_pdf(lambda_e) + gr.ln_pdf(lambda_r)
    }

    /// `log ∫ f(y | ξ, λ) f(u | λ) dξ` with the flat prior on `β`.
    pub fn log_integrated_likelihood(&self, lambda_e: f64, lambda_r: f64) -> f64 {
        let Ok(post) = self.posterior(lambda_e, lambda_r) else {
            return f64::NEG_INFINITY;
        };
        let (n, p, k) = (self.n() as f64, self.p() as f64, self.k() as f64);
        let resid = &self.data.y - &self.w * &post.mean;
        let u = post.mean.rows(self.p(), self.k());
        let quad = lambda_e * resid.norm_squared() + lambda_r * u.norm_squared();
        let ln_det_q = linalg::ln_det_chol(&post.chol.l());
        0.5 * n * lambda_e.ln() + 0.5 * k * lambda_r.ln() - (n - p) * HALF_LN_2PI - 0.5 * ln_det_q - 0.5 * quad
    }

    /// `log f_λ(λ | y)` up to a constant; `−∞` off the positive orthant.
    pub fn log_marginal_lambda(&self, lambda_e: f64, lambda_r: f64) -> f64 {
        if !(lambda_e > 0.0 && lambda_r > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.log_integrated_likelihood(lambda_e, lambda_r) + self.log_prior_lambda(lambda_e, lambda_r)
    }

    /// Full posterior `log f(ξ, λ | y)` with the same constant as
    /// [`log_marginal_lambda`](Self::log_marginal_lambda).
    pub fn log_joint(&self, xi: &DVector<f64>, lambda_e: f64, lambda_r: f64) -> f64 {
        if !(lambda_e > 0.0 && lambda_r > 0.0) {
            return f64::NEG_INFINITY;
        }
        let (n, k) = (self.n() as f64, self.k() as f64);
        let resid = &self.data.y - &self.w * xi;
        let u = xi.rows(self.p(), self.k());
        0.5 * n * lambda_e.ln() - n * HALF_LN_2PI - 0.5 * lambda_e * resid.norm_squared() + 0.5 * k * lambda_r.ln()
            - k * HALF_LN_2PI
            - 0.5 * lambda_r * u.norm_squared()
            + self.log_prior_lambda(lambda_e, lambda_r)
    }

    /// `f_λ` on `(log λ_E, log λ_R)`, including the Jacobian.
    pub fn log_lambda_target(&self) -> LogLambdaTarget<'_> {
        LogLambdaTarget { model: self }
    }

    /// `ξ | λ` with `λ` carried on the log scale.
    pub fn conditional(&self) -> XiGivenLogLambda<'_> {
        XiGivenLogLambda { model: self }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LogLambdaTarget<'a> {
    model: &'a LinearModel,
}

impl TargetDensity for LogLambdaTarget<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn ln_f(&self, v: &[f64]) -> f64 {
        self.model.log_marginal_lambda(v[0].exp(), v[1].exp()) + v[0] + v[1]
    }
}

#[derive(Clone, Copy, Debug)]
pub struct XiGivenLogLambda<'a> {
    model: &'a LinearModel,
}

impl ConditionalSampler for XiGivenLogLambda<'_> {
    type X = DVector<f64>;
    type Y = Vec<f64>;

    fn draw(&self, y: &Vec<f64>, rng: &mut RandomStream) -> DVector<f64> {
        self.model
            .conditional_xi(y[0].exp(), y[1].exp(), rng)
            .expect("the kernel only visits finite log precisions")
            .0
    }

    fn ln_density(&self, x: &DVector<f64>, y: &Vec<f64>) -> f64 {
        self.model.conditional_ln_density(x, y[0].exp(), y[1].exp())
    }

    fn check_y(&self, y: &Vec<f64>) -> Result<()> {
        if y.len() != 2 || !y.iter().all(|v| v.is_finite()) {
            return Err(Error::domain("log precisions must be two finite numbers"));
        }
        Ok(())
    }
}

/// Simulate from the model: `X` has an intercept column followed by
/// standard normal columns, `Z` is standard normal, `u ~ N(0, λ_R⁻¹ I)`.
pub fn synth_linear(
    n: usize,
    beta: &DVector<f64>,
    k: usize,
    lambda_e: f64,
    lambda_r: f64,
    hyper: LinearModelHyper,
    seed: u64,
) -> Result<LinearModelData> {
    let p = beta.len();
    if p == 0 || k == 0 || p.max(k) >= n {
        return Err(Error::domain(format!("invalid dimensions n={n}, p={p}, k={k}")));
    }
    LinearModel::check_lambda(lambda_e, lambda_r)?;
    let mut rng = RandomStream::new(seed);
    let x = DMatrix::from_fn(n, p, |_, j| if j == 0 { 1.0 } else { rng.standard_normal() });
    let z = DMatrix::from_fn(n, k, |_, _| rng.standard_normal());
    let u = rng.standard_normal_vector(k) / lambda_r.sqrt();
    let noise = rng.standard_normal_vector(n) / lambda_e.sqrt();
    let y = &x * beta + &z * u + noise;
    LinearModelData::new(y, x, z, hyper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::chi_square_p_value;

    fn toy(seed: u64) -> LinearModel {
        let beta = DVector::from_vec(vec![1.5]);
        LinearModel::new(synth_linear(10, &beta, 2, 2.0, 1.0, LinearModelHyper::default(), seed).unwrap()).unwrap()
    }

    /// `∫ exp(g(ξ)) dξ` and `∫ ξ₀ exp(g(ξ)) dξ / ∫ exp(g)` by a tensor trapezoid
    /// rule in coordinates whitened by a finite-difference Hessian of `g`.
    fn gaussian_quadrature(g: impl Fn(&DVector<f64>) -> f64, d: usize) -> (f64, f64) {
        // Locate the maximum of a concave quadratic by Newton with FD derivatives.
        let h = 1e-3;
        let grad_hess = |c: &DVector<f64>| {
            let mut grad = DVector::zeros(d);
            let mut hess = DMatrix::zeros(d, d);
            let e = |i: usize| DVector::from_fn(d, |j, _| if i == j { h } else { 0.0 });
            for i in 0..d {
                grad[i] = (g(&(c + e(i))) - g(&(c - e(i)))) / (2.0 * h);
                for j in 0..d {
                    hess[(i, j)] = (g(&(c + e(i) + e(j))) - g(&(c + e(i) - e(j))) - g(&(c - e(i) + e(j)))
                        + g(&(c - e(i) - e(j))))
                        / (4.0 * h * h);
                }
            }
            (grad, hess)
        };
        let mut c = DVector::zeros(d);
        for _ in 0..3 {
            let (grad, hess) = grad_hess(&c);
            c -= hess.clone().lu().solve(&grad).unwrap();
        }
        let (_, hess) = grad_hess(&c);
        let cov = (-hess).try_inverse().unwrap();
        let t = cov.cholesky().unwrap().l();
        let jac = t.determinant().abs();
        let (m, step) = (24i32, 0.4);
        let g0 = g(&c);
        let (mut mass, mut first) = (0.0, 0.0);
        let mut idx = vec![-m; d];
        loop {
            let s = DVector::from_fn(d, |i, _| idx[i] as f64 * step);
            let xi = &c + &t * s;
            let w = (g(&xi) - g0).exp();
            mass += w;
            first += w * xi[0];
            let mut i = 0;
            while i < d {
                idx[i] += 1;
                if idx[i] <= m {
                    break;
                }
                idx[i] = -m;
                i += 1;
            }
            if i == d {
                break;
            }
        }
        let ln_integral = g0 + (mass * step.powi(d as i32) * jac).ln();
        (ln_integral, first / mass)
    }

    #[test]
    fn log_marginal_matches_quadrature_differences() {
        let m = toy(5);
        let lambdas = [(2.0, 1.0), (0.5, 3.0), (7.0, 0.2), (1.3, 12.0)];
        let exact: Vec<f64> = lambdas.iter().map(|&(e, r)| m.log_marginal_lambda(e, r)).collect();
        let quad: Vec<f64> = lambdas
            .iter()
            .map(|&(e, r)| gaussian_quadrature(|xi| m.log_joint(xi, e, r), 3).0)
            .collect();
        for i in 1..lambdas.len() {
            let d_exact = exact[i] - exact[0];
            let d_quad = quad[i] - quad[0];
            assert!((d_exact - d_quad).abs() < 1e-5, "{i}: {d_exact} vs {d_quad}");
        }
    }

    #[test]
    fn conditional_mean_matches_quadrature() {
        let m = toy(6);
        for (e, r) in [(2.0, 1.0), (0.3, 5.0)] {
            let (_, mean_beta) = gaussian_quadrature(|xi| m.log_joint(xi, e, r), 3);
            let exact = m.conditional_mean(e, r).unwrap()[0];
            assert!((mean_beta - exact).abs() < 1e-3 * exact.abs().max(1.0), "{mean_beta} vs {exact}");
        }
    }

    #[test]
    fn factorization_identity_is_exact() {
        let m = toy(7);
        let mut rng = RandomStream::new(1);
        for _ in 0..100 {
            let e = (4.0 * rng.uniform() - 2.0).exp();
            let r = (4.0 * rng.uniform() - 2.0).exp();
            let xi = DVector::from_fn(3, |_, _| 6.0 * rng.uniform() - 3.0);
            let diff = m.log_joint(&xi, e, r) - m.conditional_ln_density(&xi, e, r) - m.log_marginal_lambda(e, r);
            assert!(diff.abs() < 1e-8, "{diff}");
        }
    }

    #[test]
    fn exponential_priors_give_linear_differences() {
        let m = toy(8);
        let (a, b) = ((0.7, 2.0), (3.1, 0.4));
        let d = m.log_prior_lambda(a.0, a.1) - m.log_prior_lambda(b.0, b.1);
        assert!((d + (a.0 - b.0) + (a.1 - b.1)).abs() < 1e-12);
    }

    #[test]
    fn zero_response_gives_zero_conditional_mean() {
        let d = toy(9).data().clone();
        let d = LinearModelData::new(DVector::zeros(10), d.x, d.z, d.hyper).unwrap();
        let m = LinearModel::new(d).unwrap();
        assert!(m.conditional_mean(1.0, 2.0).unwrap().amax() < 1e-14);
    }

    #[test]
    fn huge_random_effect_precision_shrinks_u() {
        let m = toy(10);
        let mut rng = RandomStream::new(2);
        let mut mean_u = DVector::zeros(2);
        for _ in 0..1000 {
            let (xi, _) = m.conditional_xi(2.0, 1e8, &mut rng).unwrap();
            mean_u += xi.rows(1, 2);
        }
        assert!((mean_u / 1000.0).norm() < 1e-3);
    }

    #[test]
    fn log_marginal_decreases_in_far_tail() {
        let m = toy(11);
        let values: Vec<f64> = (10..40).map(|i| m.log_marginal_lambda(2f64.powi(i), 1.0)).collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(m.log_marginal_lambda(-1.0, 1.0), f64::NEG_INFINITY);
        assert_eq!(m.log_marginal_lambda(1.0, 0.0), f64::NEG_INFINITY);
    }

    #[test]
    fn conditional_draws_match_density_in_each_coordinate() {
        let m = toy(12);
        let (e, r) = (2.0, 1.5);
        let mut rng = RandomStream::new(3);
        let draws: Vec<DVector<f64>> = (0..100_000).map(|_| m.conditional_xi(e, r, &mut rng).unwrap().0).collect();
        let post = m.posterior(e, r).unwrap();
        let cov = post.chol.inverse();
        for j in 0..3 {
            let col: Vec<f64> = draws.iter().map(|x| x[j]).collect();
            let sd = cov[(j, j)].sqrt();
            let mean = post.mean[j];
            // Marginal of one coordinate: a normal with the diagonal variance.
            let p = chi_square_p_value(&col, 30, |x| {
                -HALF_LN_2PI - sd.ln() - 0.5 * ((x - mean) / sd).powi(2)
            });
            assert!(p > 0.001, "coordinate {j}: {p}");
        }
    }

    #[test]
    fn draw_log_density_agrees_with_evaluation() {
        let m = toy(13);
        let mut rng = RandomStream::new(4);
        let (xi, ln) = m.conditional_xi(0.8, 2.5, &mut rng).unwrap();
        assert!((ln - m.conditional_ln_density(&xi, 0.8, 2.5)).abs() < 1e-10);
        assert!(m.conditional_xi(0.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn validation_rejects_bad_designs() {
        let d = toy(14).data().clone();
        let mut x = d.x.clone();
        x = hstack(&[&x, &x]).unwrap();
        assert!(LinearModelData::new(d.y.clone(), x, d.z.clone(), d.hyper).is_err());
        let bad = LinearModelHyper { e1: 0.0, ..Default::default() };
        assert!(LinearModelData::new(d.y.clone(), d.x.clone(), d.z.clone(), bad).is_err());
        assert!(synth_linear(3, &DVector::from_vec(vec![1.0]), 3, 1.0, 1.0, d.hyper, 0).is_err());
    }

    #[test]
    fn same_seed_same_dataset_and_csv_round_trip() {
        let beta = DVector::from_vec(vec![1.0, -2.0]);
        let a = synth_linear(20, &beta, 3, 1.0, 1.0, LinearModelHyper::default(), 99).unwrap();
        let b = synth_linear(20, &beta, 3, 1.0, 1.0, LinearModelHyper::default(), 99).unwrap();
        assert_eq!(a.y, b.y);
        let mut buf = Vec::new();
        a.to_table().unwrap().write(&mut buf).unwrap();
        let back = LinearModelData::from_table(&Table::read(&buf[..]).unwrap(), a.hyper).unwrap();
        assert_eq!(back.y, a.y);
        assert_eq!(back.x, a.x);
        assert_eq!(back.z, a.z);
    }
}
