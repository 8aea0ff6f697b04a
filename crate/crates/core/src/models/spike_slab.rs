//! Spike-and-slab variable selection:
//!
//! ```text
//! y | β, σ² ~ N(Xβ, σ² I)
//! β_i | σ², Z_i ~ N(0, σ² τ²_{Z_i})     P(Z_i = 1) = q     σ² ~ IG(α₁, α₂)
//! ```
//!
//! With `D = diag(τ²_{Z_i})` and `M = XᵀX + D⁻¹`, integrating `β` and then
//! `σ²` gives `f(Z | y)` in closed form, so the indicator vector `Z` is a
//! linchpin on the finite set `{0,1}^p`. The inverse gamma uses shape and
//! scale: density `∝ x^{−α₁−1} e^{−α₂/x}`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::chain::ChainOutput;
use crate::dist::{InverseGamma, RandomStream, Univariate, HALF_LN_2PI};
use crate::error::{Error, Result};
use crate::kernels::{binary_state, BinaryTarget, MAX_FINITE_BITS};
use crate::linalg;
use crate::models::table::{hstack, Table};
use crate::sampler::ConditionalSampler;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpikeSlabHyper {
    /// Spike variance multiplier `τ²₀`.
    pub tau0_sq: f64,
    /// Slab variance multiplier `τ²₁`.
    pub tau1_sq: f64,
    /// Prior inclusion probability.
    pub q: f64,
    pub alpha1: f64,
    pub alpha2: f64,
}

impl Default for SpikeSlabHyper {
    fn default() -> Self {
        Self {
            tau0_sq: 0.01,
            tau1_sq: 10.0,
            q: 0.1,
            alpha1: 1.0,
            alpha2: 1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpikeSlabData {
    pub y: DVector<f64>,
    pub x: DMatrix<f64>,
    pub hyper: SpikeSlabHyper,
}

impl SpikeSlabData {
    /// The slab may not be narrower than the spike; equal widths are
    /// allowed and make the likelihood free of `Z`.
    pub fn new(y: DVector<f64>, x: DMatrix<f64>, hyper: SpikeSlabHyper) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::domain("y and X must have the same number of rows"));
        }
        if x.ncols() == 0 || y.is_empty() {
            return Err(Error::domain("need at least one observation and one predictor"));
        }
        let h = hyper;
        if !(h.tau0_sq > 0.0 && h.tau1_sq > 0.0 && h.alpha1 > 0.0 && h.alpha2 > 0.0) {
            return Err(Error::domain("tau0_sq, tau1_sq, alpha1 and alpha2 must be positive"));
        }
        if h.tau1_sq < h.tau0_sq {
            return Err(Error::domain(format!(
                "slab variance {} is smaller than spike variance {}",
                h.tau1_sq, h.tau0_sq
            )));
        }
        if !(h.q > 0.0 && h.q < 1.0) {
            return Err(Error::domain(format!("inclusion probability must lie in (0, 1), got {}", h.q)));
        }
        Ok(Self { y, x, hyper })
    }

    /// Columns `y`, `x1..xp`.
    pub fn from_table(table: &Table, hyper: SpikeSlabHyper) -> Result<Self> {
        Self::new(DVector::from_vec(table.column("y")?), table.numbered("x"), hyper)
    }

    pub fn to_table(&self) -> Result<Table> {
        let mut headers = vec!["y".to_string()];
        headers.extend(ChainOutput::numbered("x", self.x.ncols()));
        let y = DMatrix::from_column_slice(self.y.len(), 1, self.y.as_slice());
        Table::new(headers, hstack(&[&y, &self.x])?)
    }
}

#[derive(Clone, Debug)]
pub struct SpikeSlabModel {
    data: SpikeSlabData,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
}

struct BetaPosterior {
    chol: Cholesky<f64, Dyn>,
    mean: DVector<f64>,
    /// `yᵀy − yᵀX M⁻¹ Xᵀy`, computed as a sum of squares.
    rss: f64,
    ln_det_prior: f64,
}

impl SpikeSlabModel {
    pub fn new(data: SpikeSlabData) -> Self {
        let xtx = data.x.transpose() * &data.x;
        let xty = data.x.transpose() * &data.y;
        Self { data, xtx, xty }
    }

    pub fn data(&self) -> &SpikeSlabData {
        &self.data
    }

    pub fn n(&self) -> usize {
        self.data.y.len()
    }

    pub fn p(&self) -> usize {
        self.data.x.ncols()
    }

    /// `beta1..`, `sigma2`, `z1..`.
    pub fn names(&self) -> Vec<String> {
        let mut names = ChainOutput::numbered("beta", self.p());
        names.push("sigma2".into());
        names.extend(ChainOutput::numbered("z", self.p()));
        names
    }

    fn prior_variances(&self, z: &[bool]) -> Vec<f64> {
        let h = self.data.hyper;
        z.iter().map(|&zi| if zi { h.tau1_sq } else { h.tau0_sq }).collect()
    }

    fn posterior(&self, z: &[bool]) -> Result<BetaPosterior> {
        if z.len() != self.p() {
            return Err(Error::domain(format!("indicator vector has length {}, expected {}", z.len(), self.p())));
        }
        let d = self.prior_variances(z);
        let mut m = self.xtx.clone();
        for (i, di) in d.iter().enumerate() {
            m[(i, i)] += 1.0 / di;
        }
        let chol = linalg::cholesky_with_jitter(&m, "XᵀX + D⁻¹")?;
        let mean = chol.solve(&self.xty);
        let resid = &self.data.y - &self.data.x * &mean;
        let shrink: f64 = mean.iter().zip(&d).map(|(b, di)| b * b / di).sum();
        Ok(BetaPosterior {
            chol,
            mean,
            rss: resid.norm_squared() + shrink,
            ln_det_prior: d.iter().map(|v| v.ln()).sum(),
        })
    }

    fn ln_prior_z(&self, z: &[bool]) -> f64 {
        let q = self.data.hyper.q;
        let k = z.iter().filter(|&&b| b).count() as f64;
        k * q.ln() + (self.p() as f64 - k) * (1.0 - q).ln()
    }

    fn posterior_sigma2(&self, post: &BetaPosterior) -> (f64, f64) {
        let h = self.data.hyper;
        (h.alpha1 + self.n() as f64 / 2.0, h.alpha2 + post.rss / 2.0)
    }

    /// `log f(Z | y)` including every constant, so that
    /// `exp` of it is the joint mass `P(Z) m(y | Z)`.
    pub fn log_marginal_z(&self, z: &[bool]) -> f64 {
        let Ok(post) = self.posterior(z) else {
            return f64::NEG_INFINITY;
        };
        let h = self.data.hyper;
        let n = self.n() as f64;
        let (shape, scale) = self.posterior_sigma2(&post);
        self.ln_prior_z(z) - 0.5 * post.ln_det_prior - 0.5 * linalg::ln_det_chol(&post.chol.l()) - n * HALF_LN_2PI
            + h.alpha1 * h.alpha2.ln()
            - ln_gamma(h.alpha1)
            + ln_gamma(shape)
            - shape * scale.ln()
    }

    /// Posterior mean of `β` given `Z`; it does not depend on `σ²`.
    pub fn conditional_beta_mean(&self, z: &[bool]) -> Result<DVector<f64>> {
        Ok(self.posterior(z)?.mean)
    }

    /// `σ² | Z, y ~ IG(α₁ + n/2, α₂ + S/2)`, then `β | σ², Z, y ~ N(M⁻¹Xᵀy, σ² M⁻¹)`.
    pub fn draw_conditional(&self, z: &[bool], rng: &mut RandomStream) -> Result<(DVector<f64>, f64)> {
        let post = self.posterior(z)?;
        let (shape, scale) = self.posterior_sigma2(&post);
        let sigma2 = InverseGamma::new(shape, scale)?.sample(rng);
        let w = rng.standard_normal_vector(self.p());
        let step = post
            .chol
            .l()
            .transpose()
            .solve_upper_triangular(&w)
            .expect("cholesky factor has positive diagonal");
        Ok((&post.mean + step * sigma2.sqrt(), sigma2))
    }

    pub fn conditional_ln_density(&self, beta: &DVector<f64>, sigma2: f64, z: &[bool]) -> f64 {
        let Ok(post) = self.posterior(z) else {
            return f64::NEG_INFINITY;
        };
        if sigma2 <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let (shape, scale) = self.posterior_sigma2(&post);
        let ig = InverseGamma::new(shape, scale).expect("positive parameters").ln_pdf(sigma2);
        let l = post.chol.l();
        let w = l.transpose() * (beta - &post.mean);
        let p = self.p() as f64;
        ig - p * HALF_LN_2PI - 0.5 * p * sigma2.ln() + linalg::ln_det_chol(&l) / 2.0 - 0.5 * w.norm_squared() / sigma2
    }

    /// `log f(β, σ², Z, y)`, the normalized joint of parameters and data.
    pub fn log_joint(&self, beta: &DVector<f64>, sigma2: f64, z: &[bool]) -> f64 {
        if sigma2 <= 0.0 || z.len() != self.p() {
            return f64::NEG_INFINITY;
        }
        let h = self.data.hyper;
        let n = self.n() as f64;
        let resid = &self.data.y - &self.data.x * beta;
        let lik = -n * HALF_LN_2PI - 0.5 * n * sigma2.ln() - 0.5 * resid.norm_squared() / sigma2;
        let prior_beta: f64 = beta
            .iter()
            .zip(self.prior_variances(z))
            .map(|(b, d)| -HALF_LN_2PI - 0.5 * (sigma2 * d).ln() - 0.5 * b * b / (sigma2 * d))
            .sum();
        let prior_sigma = InverseGamma::new(h.alpha1, h.alpha2).expect("validated").ln_pdf(sigma2);
        lik + prior_beta + prior_sigma + self.ln_prior_z(z)
    }

    /// Exact posterior over all `2^p` indicator vectors.
    pub fn enumerate(&self) -> Result<SpikeSlabEnumeration> {
        spike_slab_enumerate(self)
    }

    pub fn conditional(&self) -> SpikeSlabConditional<'_> {
        SpikeSlabConditional { model: self }
    }
}

impl BinaryTarget for SpikeSlabModel {
    fn dim(&self) -> usize {
        self.p()
    }

    fn ln_f(&self, z: &[bool]) -> f64 {
        self.log_marginal_z(z)
    }
}

/// `(β, σ²) | Z, y`.
#[derive(Clone, Copy, Debug)]
pub struct SpikeSlabConditional<'a> {
    model: &'a SpikeSlabModel,
}

impl ConditionalSampler for SpikeSlabConditional<'_> {
    type X = (DVector<f64>, f64);
    type Y = Vec<bool>;

    fn draw(&self, z: &Vec<bool>, rng: &mut RandomStream) -> (DVector<f64>, f64) {
        self.model
            .draw_conditional(z, rng)
            .expect("indicator length is checked before the chain starts")
    }

    fn ln_density(&self, x: &(DVector<f64>, f64), z: &Vec<bool>) -> f64 {
        self.model.conditional_ln_density(&x.0, x.1, z)
    }

    fn check_y(&self, z: &Vec<bool>) -> Result<()> {
        self.model.posterior(z).map(|_| ())
    }
}

/// The normalized posterior table; entry `k` is the state whose bit `i` is `Z_i`.
#[derive(Clone, Debug, Serialize)]
pub struct SpikeSlabEnumeration {
    pub p: usize,
    pub log_values: Vec<f64>,
    pub probabilities: Vec<f64>,
    /// `P(Z_i = 1 | y)`.
    pub inclusion: Vec<f64>,
}

impl SpikeSlabEnumeration {
    pub fn state(&self, k: usize) -> Vec<bool> {
        binary_state(k, self.p)
    }

    /// Index of the most probable model.
    pub fn mode(&self) -> usize {
        (0..self.probabilities.len())
            .max_by(|&a, &b| self.probabilities[a].total_cmp(&self.probabilities[b]))
            .unwrap_or(0)
    }

    pub fn to_table(&self) -> Result<Table> {
        let m = self.probabilities.len();
        let mut headers = ChainOutput::numbered("z", self.p);
        headers.push("log_value".into());
        headers.push("probability".into());
        let values = DMatrix::from_fn(m, self.p + 2, |k, j| {
            if j < self.p {
                (k >> j & 1) as f64
            } else if j == self.p {
                self.log_values[k]
            } else {
                self.probabilities[k]
            }
        });
        Table::new(headers, values)
    }
}

pub fn spike_slab_enumerate(model: &SpikeSlabModel) -> Result<SpikeSlabEnumeration> {
    let p = model.p();
    if p > MAX_FINITE_BITS {
        return Err(Error::Size(format!("enumeration over 2^{p} models exceeds the 2^{MAX_FINITE_BITS} cap")));
    }
    let m = 1usize << p;
    let log_values: Vec<f64> = (0..m).map(|k| model.log_marginal_z(&binary_state(k, p))).collect();
    let norm = linalg::log_sum_exp(&log_values);
    let probabilities: Vec<f64> = log_values.iter().map(|v| (v - norm).exp()).collect();
    let inclusion = (0..p)
        .map(|i| (0..m).filter(|k| k >> i & 1 == 1).map(|k| probabilities[k]).sum())
        .collect();
    Ok(SpikeSlabEnumeration {
        p,
        log_values,
        probabilities,
        inclusion,
    })
}

/// Standard normal design and `y = Xβ + N(0, σ² I)`.
pub fn synth_spike_slab(
    n: usize,
    beta: &DVector<f64>,
    sigma2: f64,
    hyper: SpikeSlabHyper,
    seed: u64,
) -> Result<SpikeSlabData> {
    if n == 0 || beta.is_empty() {
        return Err(Error::domain("need n ≥ 1 and at least one coefficient"));
    }
    if !(sigma2 > 0.0) {
        return Err(Error::domain("noise variance must be positive"));
    }
    let mut rng = RandomStream::new(seed);
    let x = DMatrix::from_fn(n, beta.len(), |_, _| rng.standard_normal());
    let y = &x * beta + rng.standard_normal_vector(n) * sigma2.sqrt();
    SpikeSlabData::new(y, x, hyper)
}
