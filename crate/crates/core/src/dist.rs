//! Seeded random streams and the elementary distributions used by the models.
//!
//! Parameterizations:
//! - `Normal` is given by mean and **variance**.
//! - `Gamma(shape, rate)` has density ∝ x^(shape-1) e^(-rate x), mean shape/rate.
//! - `InverseGamma(shape, scale)` has density ∝ x^(-shape-1) e^(-scale/x).

use nalgebra::{DMatrix, DVector};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// A seeded ChaCha8 stream.
///
/// Substream `i` of a stream with seed `s` is keyed by
/// `splitmix64(s + 0x9E3779B97F4A7C15 * (i + 1))` and uses ChaCha stream id
/// `i + 1`, so replicate chains never share a keystream with their parent or
/// with each other.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream for replicate `index`.
    pub fn substream(&self, index: u64) -> RandomStream {
        let child_seed =
            splitmix64(self.seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index + 1)));
        let mut rng = ChaCha8Rng::seed_from_u64(child_seed);
        rng.set_stream(index + 1);
        RandomStream {
            seed: child_seed,
            rng,
        }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn standard_normal_vector(&mut self, d: usize) -> DVector<f64> {
        DVector::from_fn(d, |_, _| self.standard_normal())
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// A univariate family with sampler and exact log density.
pub trait Univariate {
    fn sample(&self, rng: &mut RandomStream) -> f64;
    /// Log density including the normalizing constant; `-inf` off the support.
    fn ln_pdf(&self, x: f64) -> f64;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Normal {
    mean: f64,
    variance: f64,
    sd: f64,
}

impl Normal {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        check_positive("variance", variance)?;
        if !mean.is_finite() {
            return Err(Error::domain("normal mean must be finite"));
        }
        Ok(Self {
            mean,
            variance,
            sd: variance.sqrt(),
        })
    }

    pub fn standard() -> Self {
        Self {
            mean: 0.0,
            variance: 1.0,
            sd: 1.0,
        }
    }
}

impl Univariate for Normal {
    fn sample(&self, rng: &mut RandomStream) -> f64 {
        self.mean + self.sd * rng.standard_normal()
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        let z = x - self.mean;
        -0.5 * (LN_2PI + self.variance.ln()) - 0.5 * z * z / self.variance
    }

    fn mean(&self) -> f64 {
        self.mean
    }

    fn variance(&self) -> f64 {
        self.variance
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Gamma {
    shape: f64,
    rate: f64,
    inner: rand_distr::Gamma<f64>,
}

impl Gamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        check_positive("gamma shape", shape)?;
        check_positive("gamma rate", rate)?;
        let inner = rand_distr::Gamma::new(shape, 1.0 / rate)
            .map_err(|e| Error::domain(format!("gamma: {e}")))?;
        Ok(Self { shape, rate, inner })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

impl Univariate for Gamma {
    fn sample(&self, rng: &mut RandomStream) -> f64 {
        self.inner.sample(rng)
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            if x == 0.0 && self.shape == 1.0 {
                return self.rate.ln();
            }
            return f64::NEG_INFINITY;
        }
        self.shape * self.rate.ln() - ln_gamma(self.shape) + (self.shape - 1.0) * x.ln()
            - self.rate * x
    }

    fn mean(&self) -> f64 {
        self.shape / self.rate
    }

    fn variance(&self) -> f64 {
        self.shape / (self.rate * self.rate)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct InverseGamma {
    shape: f64,
    scale: f64,
    gamma: Gamma,
}

impl InverseGamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        let gamma = Gamma::new(shape, scale)?;
        Ok(Self {
            shape,
            scale,
            gamma,
        })
    }
}

impl Univariate for InverseGamma {
    fn sample(&self, rng: &mut RandomStream) -> f64 {
        1.0 / self.gamma.sample(rng)
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return f64::NEG_INFINITY;
        }
        self.shape * self.scale.ln() - ln_gamma(self.shape) - (self.shape + 1.0) * x.ln()
            - self.scale / x
    }

    fn mean(&self) -> f64 {
        if self.shape > 1.0 {
            self.scale / (self.shape - 1.0)
        } else {
            f64::INFINITY
        }
    }

    fn variance(&self) -> f64 {
        if self.shape > 2.0 {
            let a = self.shape;
            self.scale * self.scale / ((a - 1.0) * (a - 1.0) * (a - 2.0))
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Uniform {
    low: f64,
    high: f64,
}

impl Uniform {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(Error::domain(format!("uniform needs low < high, got [{low}, {high}]")));
        }
        Ok(Self { low, high })
    }
}

impl Univariate for Uniform {
    fn sample(&self, rng: &mut RandomStream) -> f64 {
        self.low + (self.high - self.low) * rng.uniform()
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        if x < self.low || x > self.high {
            f64::NEG_INFINITY
        } else {
            -(self.high - self.low).ln()
        }
    }

    fn mean(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    fn variance(&self) -> f64 {
        let w = self.high - self.low;
        w * w / 12.0
    }
}

/// Bernoulli on {0, 1}; `ln_pdf` is the log mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bernoulli {
    p: f64,
}

impl Bernoulli {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::domain(format!("bernoulli p must lie in [0, 1], got {p}")));
        }
        Ok(Self { p })
    }

    pub fn draw(&self, rng: &mut RandomStream) -> bool {
        rng.uniform() < self.p
    }
}

impl Univariate for Bernoulli {
    fn sample(&self, rng: &mut RandomStream) -> f64 {
        if self.draw(rng) {
            1.0
        } else {
            0.0
        }
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        if x == 1.0 {
            self.p.ln()
        } else if x == 0.0 {
            (1.0 - self.p).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn mean(&self) -> f64 {
        self.p
    }

    fn variance(&self) -> f64 {
        self.p * (1.0 - self.p)
    }
}

pub fn draw_normal(rng: &mut RandomStream, mean: f64, variance: f64) -> Result<f64> {
    Ok(Normal::new(mean, variance)?.sample(rng))
}

pub fn draw_gamma(rng: &mut RandomStream, shape: f64, rate: f64) -> Result<f64> {
    Ok(Gamma::new(shape, rate)?.sample(rng))
}

pub fn draw_inverse_gamma(rng: &mut RandomStream, shape: f64, scale: f64) -> Result<f64> {
    Ok(InverseGamma::new(shape, scale)?.sample(rng))
}

pub fn draw_mvn(rng: &mut RandomStream, params: &MvnParams) -> DVector<f64> {
    params.sample(rng)
}

/// Mean and covariance of a multivariate normal with its Cholesky factor
/// cached at construction.
#[derive(Clone, Debug)]
pub struct MvnParams {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    factor: DMatrix<f64>,
    ln_det: f64,
}

impl MvnParams {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if cov.shape() != (d, d) {
            return Err(Error::domain(format!(
                "covariance is {:?}, expected {d}x{d}",
                cov.shape()
            )));
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > 1e-10 * scale {
            return Err(Error::domain("covariance is not symmetric"));
        }
        let cov = linalg::symmetrize(&cov);
        let factor = linalg::cholesky(&cov, "covariance")?.l();
        let ln_det = linalg::ln_det_chol(&factor);
        Ok(Self {
            mean,
            cov,
            factor,
            ln_det,
        })
    }

    /// Zero-mean AR(1) correlation: Σ_ij = ρ^|i-j|.
    pub fn ar1(d: usize, rho: f64) -> Result<Self> {
        if !(rho > -1.0 && rho < 1.0) {
            return Err(Error::domain(format!("AR(1) correlation must lie in (-1, 1), got {rho}")));
        }
        Self::new(DVector::zeros(d), ar1_correlation(d, rho))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Lower-triangular factor `L` with `cov = L Lᵀ`.
    pub fn factor(&self) -> &DMatrix<f64> {
        &self.factor
    }

    pub fn sample(&self, rng: &mut RandomStream) -> DVector<f64> {
        let z = rng.standard_normal_vector(self.dim());
        &self.mean + &self.factor * z
    }

    pub fn ln_pdf(&self, x: &DVector<f64>) -> f64 {
        let d = self.dim() as f64;
        let diff = x - &self.mean;
        let w = self
            .factor
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has positive diagonal");
        -0.5 * (d * LN_2PI + self.ln_det + w.norm_squared())
    }

    /// The law of the first `p - r` coordinates given the last `r` equal `x2`.
    pub fn conditional(&self, r: usize, x2: &DVector<f64>) -> Result<MvnParams> {
        let p = self.dim();
        if r == 0 || r >= p {
            return Err(Error::domain(format!("split must satisfy 0 < r < p, got r={r}, p={p}")));
        }
        if x2.len() != r {
            return Err(Error::domain(format!("conditioning vector has length {}, expected {r}", x2.len())));
        }
        let given: Vec<usize> = (p - r..p).collect();
        let reg = self.regression(&given)?;
        reg.params_given(x2)
    }

    /// Precomputed regression of the remaining coordinates on `given`.
    pub fn regression(&self, given: &[usize]) -> Result<GaussianRegression> {
        GaussianRegression::new(self, given)
    }
}

pub fn ar1_correlation(d: usize, rho: f64) -> DMatrix<f64> {
    DMatrix::from_fn(d, d, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// `X_free | X_given = g ~ N(mean_free + coef (g - mean_given), cond_cov)`.
#[derive(Clone, Debug)]
pub struct GaussianRegression {
    free: Vec<usize>,
    given: Vec<usize>,
    mean_free: DVector<f64>,
    mean_given: DVector<f64>,
    coef: DMatrix<f64>,
    cond_cov: DMatrix<f64>,
    cond_factor: DMatrix<f64>,
    cond_ln_det: f64,
}

impl GaussianRegression {
    fn new(params: &MvnParams, given: &[usize]) -> Result<Self> {
        let p = params.dim();
        let mut is_given = vec![false; p];
        for &g in given {
            if g >= p || is_given[g] {
                return Err(Error::domain(format!("invalid conditioning index {g}")));
            }
            is_given[g] = true;
        }
        let free: Vec<usize> = (0..p).filter(|&i| !is_given[i]).collect();
        if free.is_empty() || given.is_empty() {
            return Err(Error::domain("both blocks of a conditional must be non-empty"));
        }
        let cov = params.cov();
        let pick = |rows: &[usize], cols: &[usize]| {
            DMatrix::from_fn(rows.len(), cols.len(), |i, j| cov[(rows[i], cols[j])])
        };
        let s11 = pick(&free, &free);
        let s12 = pick(&free, given);
        let s22 = pick(given, given);
        let chol22 = linalg::cholesky(&s22, "conditioning block Σ22")?;
        // coef = Σ12 Σ22⁻¹
        let coef = chol22.solve(&s12.transpose()).transpose();
        let cond_cov = linalg::symmetrize(&(&s11 - &coef * s12.transpose()));
        let cond_factor = linalg::cholesky(&cond_cov, "conditional covariance")?.l();
        let cond_ln_det = linalg::ln_det_chol(&cond_factor);
        let mean = params.mean();
        Ok(Self {
            mean_free: DVector::from_iterator(free.len(), free.iter().map(|&i| mean[i])),
            mean_given: DVector::from_iterator(given.len(), given.iter().map(|&i| mean[i])),
            free,
            given: given.to_vec(),
            coef,
            cond_cov,
            cond_factor,
            cond_ln_det,
        })
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn given(&self) -> &[usize] {
        &self.given
    }

    pub fn cond_cov(&self) -> &DMatrix<f64> {
        &self.cond_cov
    }

    pub fn cond_mean(&self, x_given: &DVector<f64>) -> DVector<f64> {
        &self.mean_free + &self.coef * (x_given - &self.mean_given)
    }

    pub fn params_given(&self, x_given: &DVector<f64>) -> Result<MvnParams> {
        MvnParams::new(self.cond_mean(x_given), self.cond_cov.clone())
    }

    pub fn draw(&self, x_given: &DVector<f64>, rng: &mut RandomStream) -> DVector<f64> {
        let z = rng.standard_normal_vector(self.free.len());
        self.cond_mean(x_given) + &self.cond_factor * z
    }

    pub fn ln_pdf(&self, x_free: &DVector<f64>, x_given: &DVector<f64>) -> f64 {
        let d = self.free.len() as f64;
        let diff = x_free - self.cond_mean(x_given);
        let w = self
            .cond_factor
            .solve_lower_triangular(&diff)
            .expect("cholesky factor has positive diagonal");
        -0.5 * (d * LN_2PI + self.cond_ln_det + w.norm_squared())
    }
}

/// Inverse Wishart `IW(ν, Ψ)` on `d × d` matrices with density
/// `∝ |Σ|^{−(ν+d+1)/2} exp(−½ tr(Ψ Σ⁻¹))`. Sampled by inverting a
/// Bartlett-decomposed Wishart draw with scale `Ψ⁻¹`.
#[derive(Clone, Debug)]
pub struct InverseWishart {
    df: f64,
    scale: DMatrix<f64>,
    /// Lower factor of `Ψ⁻¹`.
    inv_scale_factor: DMatrix<f64>,
}

impl InverseWishart {
    pub fn new(df: f64, scale: DMatrix<f64>) -> Result<Self> {
        let d = scale.nrows();
        if scale.ncols() != d || d == 0 {
            return Err(Error::domain("inverse Wishart scale must be a non-empty square matrix"));
        }
        if !(df > d as f64 - 1.0) {
            return Err(Error::domain(format!("inverse Wishart needs df > d - 1, got df={df}, d={d}")));
        }
        let scale = linalg::symmetrize(&scale);
        let inv = linalg::cholesky(&scale, "inverse Wishart scale")?.inverse();
        let inv_scale_factor = linalg::cholesky_with_jitter(&linalg::symmetrize(&inv), "inverse of the scale")?.l();
        Ok(Self {
            df,
            scale,
            inv_scale_factor,
        })
    }

    pub fn dim(&self) -> usize {
        self.scale.nrows()
    }

    /// `Ψ / (ν − d − 1)`, defined for `ν > d + 1`.
    pub fn mean(&self) -> Option<DMatrix<f64>> {
        let d = self.dim() as f64;
        (self.df > d + 1.0).then(|| &self.scale / (self.df - d - 1.0))
    }

    pub fn sample(&self, rng: &mut RandomStream) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let mut bartlett = DMatrix::zeros(d, d);
        for i in 0..d {
            bartlett[(i, i)] = (2.0 * draw_gamma(rng, (self.df - i as f64) / 2.0, 1.0)?).sqrt();
            for j in 0..i {
                bartlett[(i, j)] = rng.standard_normal();
            }
        }
        // Wishart draw W = T Tᵀ with T lower triangular; Σ = W⁻¹ = T⁻ᵀ T⁻¹.
        let t = &self.inv_scale_factor * bartlett;
        let t_inv = t
            .solve_lower_triangular(&DMatrix::identity(d, d))
            .ok_or_else(|| Error::domain("singular Bartlett factor"))?;
        Ok(linalg::symmetrize(&(t_inv.transpose() * t_inv)))
    }
}

/// `½ log(2π)`.
pub const HALF_LN_2PI: f64 = 0.5 * LN_2PI;

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal as StatrsNormal};
    StatrsNormal::standard().inverse_cdf(p)
}
