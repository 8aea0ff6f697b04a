//! Bayesian vector autoregression with exogenous predictors:
//!
//! ```text
//! Y_t = Σ_{i=1..q} A_iᵀ Y_{t−i} + Bᵀ X_t + ε_t,   ε_t ~ N(0, Σ)
//! f(vec A) ∝ exp{−½ (vec A − m)ᵀ C (vec A − m)}
//! f(Σ) ∝ |Σ|^{−a/2} exp{−½ tr(D Σ⁻¹)}           f(B) ∝ 1
//! ```
//!
//! `A = [A_1; …; A_q]` is `qr × r` and `B` is `p × r`. The likelihood
//! conditions on the first `q` observations, leaving `T = K − q` rows
//! `Y = L A + X B + E` where row `t` of `L` is `(Y_{t−1}ᵀ, …, Y_{t−q}ᵀ)`.
//!
//! With `M = I − X(XᵀX)⁻¹Xᵀ`, integrating `B` out gives
//! `Σ | A ~ IW(T − p + a − r − 1, D + (Y − LA)ᵀ M (Y − LA))` and a Gaussian
//! `vec A | Σ` with precision `Σ⁻¹ ⊗ LᵀML + C`, so `(A, Σ)` is a linchpin and
//! `B | A, Σ` is matrix normal around the least-squares fit.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::chain::Flatten;
use crate::dist::{InverseWishart, RandomStream, HALF_LN_2PI};
use crate::error::{Error, Result};
use crate::kernels::{KernelInfo, TargetDensity, TransitionKernel};
use crate::linalg::{self, kron, unvec, vec_of};
use crate::models::table::{hstack, Table};
use crate::sampler::{ConditionalSampler, LinchpinSampler};

#[derive(Clone, Debug, PartialEq)]
pub struct VarHyper {
    /// Prior mean of `vec A`, length `q r²`.
    pub m: DVector<f64>,
    /// Prior precision of `vec A`, `q r² × q r²`.
    pub c: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub a: f64,
}

impl VarHyper {
    /// `m = 0`, `C = I`, `D = I`, `a = r + 2`.
    pub fn default_for(r: usize, q: usize) -> Self {
        let k = q * r * r;
        Self {
            m: DVector::zeros(k),
            c: DMatrix::identity(k, k),
            d: DMatrix::identity(r, r),
            a: r as f64 + 2.0,
        }
    }
}

/// Observations `t = 1..K`; row `t` of `y` is `Y_t` and of `x` is `X_t`.
#[derive(Clone, Debug)]
pub struct VarData {
    pub y: DMatrix<f64>,
    pub x: DMatrix<f64>,
    pub lags: usize,
}

impl VarData {
    pub fn new(y: DMatrix<f64>, x: DMatrix<f64>, lags: usize) -> Result<Self> {
        if y.nrows() != x.nrows() {
            return Err(Error::domain("Y and X series must have the same length"));
        }
        if y.ncols() == 0 || x.ncols() == 0 {
            return Err(Error::domain("need at least one response and one predictor"));
        }
        if lags == 0 || y.nrows() <= lags {
            return Err(Error::domain(format!("need K > q ≥ 1, got K={}, q={lags}", y.nrows())));
        }
        Ok(Self { y, x, lags })
    }

    pub fn r(&self) -> usize {
        self.y.ncols()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// Columns `y1..yr`, `x1..xp`, one row per time point.
    pub fn from_table(table: &Table, lags: usize) -> Result<Self> {
        Self::new(table.numbered("y"), table.numbered("x"), lags)
    }

    pub fn to_table(&self) -> Result<Table> {
        let mut headers = crate::chain::ChainOutput::numbered("y", self.r());
        headers.extend(crate::chain::ChainOutput::numbered("x", self.p()));
        Table::new(headers, hstack(&[&self.y, &self.x])?)
    }
}

/// A full parameter value. Flattened as `vec B`, `vec A`, then the upper
/// triangle of `Σ` by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct VarParams {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
}

fn flatten_upper(m: &DMatrix<f64>, out: &mut Vec<f64>) {
    for j in 0..m.ncols() {
        for i in 0..=j {
            out.push(m[(i, j)]);
        }
    }
}

impl Flatten for VarParams {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        self.b.flatten_into(out);
        self.a.flatten_into(out);
        flatten_upper(&self.sigma, out);
    }
}

/// The linchpin block `(A, Σ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarLinchpin {
    pub a: DMatrix<f64>,
    pub sigma: DMatrix<f64>,
}

impl Flatten for VarLinchpin {
    fn flatten_into(&self, out: &mut Vec<f64>) {
        self.a.flatten_into(out);
        flatten_upper(&self.sigma, out);
    }
}

#[derive(Clone, Debug)]
pub struct VarModel {
    data: VarData,
    hyper: VarHyper,
    /// Responses `t = q+1..K`, `T × r`.
    resp: DMatrix<f64>,
    /// Lagged responses, `T × qr`.
    lagged: DMatrix<f64>,
    /// Predictors `t = q+1..K`, `T × p`.
    pred: DMatrix<f64>,
    /// `XᵀX` factor; absent when `X` is rank deficient.
    pred_chol: Option<Cholesky<f64, Dyn>>,
    /// `M Y`, `M L` and `LᵀML` when `pred_chol` exists.
    proj_resp: DMatrix<f64>,
    proj_lagged: DMatrix<f64>,
    lagged_gram: DMatrix<f64>,
}

impl VarModel {
    pub fn new(data: VarData, hyper: VarHyper) -> Result<Self> {
        let (r, q) = (data.r(), data.lags);
        let k = q * r * r;
        if hyper.m.len() != k || hyper.c.shape() != (k, k) {
            return Err(Error::domain(format!("prior on vec A must have dimension q r² = {k}")));
        }
        if hyper.d.shape() != (r, r) {
            return Err(Error::domain(format!("D must be {r} x {r}")));
        }
        linalg::cholesky(&hyper.c, "prior precision C")?;
        linalg::cholesky(&hyper.d, "prior scale D")?;
        if !hyper.a.is_finite() {
            return Err(Error::domain("a must be finite"));
        }
        let big_k = data.y.nrows();
        let t_len = big_k - q;
        let resp = data.y.rows(q, t_len).into_owned();
        let pred = data.x.rows(q, t_len).into_owned();
        let lagged = DMatrix::from_fn(t_len, q * r, |t, c| {
            let (lag, j) = (c / r + 1, c % r);
            data.y[(t + q - lag, j)]
        });
        let xtx = pred.transpose() * &pred;
        let pred_chol = (linalg::condition_ratio(&pred) > 1e-10)
            .then(|| linalg::cholesky(&xtx, "XᵀX").ok())
            .flatten();
        let project = |m: &DMatrix<f64>| match &pred_chol {
            Some(ch) => m - &pred * ch.solve(&(pred.transpose() * m)),
            None => m.clone(),
        };
        let proj_resp = project(&resp);
        let proj_lagged = project(&lagged);
        let lagged_gram = linalg::symmetrize(&(lagged.transpose() * &proj_lagged));
        Ok(Self {
            data,
            hyper,
            resp,
            lagged,
            pred,
            pred_chol,
            proj_resp,
            proj_lagged,
            lagged_gram,
        })
    }

    pub fn data(&self) -> &VarData {
        &self.data
    }

    pub fn hyper(&self) -> &VarHyper {
        &self.hyper
    }

    pub fn r(&self) -> usize {
        self.data.r()
    }

    pub fn p(&self) -> usize {
        self.data.p()
    }

    pub fn lags(&self) -> usize {
        self.data.lags
    }

    /// Number of modelled time points `K − q`.
    pub fn t_len(&self) -> usize {
        self.resp.nrows()
    }

    /// Degrees of freedom of `Σ | A`.
    pub fn sigma_df(&self) -> f64 {
        self.t_len() as f64 - self.p() as f64 + self.hyper.a - self.r() as f64 - 1.0
    }

    /// Column names in [`VarParams`] flattening order.
    pub fn names(&self) -> Vec<String> {
        let (r, p, qr) = (self.r(), self.p(), self.lags() * self.r());
        let mut names = Vec::new();
        for j in 1..=r {
            for i in 1..=p {
                names.push(format!("b_{i}_{j}"));
            }
        }
        for j in 1..=r {
            for i in 1..=qr {
                names.push(format!("a_{i}_{j}"));
            }
        }
        for j in 1..=r {
            for i in 1..=j {
                names.push(format!("sigma_{i}_{j}"));
            }
        }
        names
    }

    fn residual(&self, params: &VarParams) -> DMatrix<f64> {
        &self.resp - &self.lagged * &params.a - &self.pred * &params.b
    }

    fn check_shapes(&self, a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> Result<()> {
        let (r, qr) = (self.r(), self.lags() * self.r());
        if a.shape() != (qr, r) || sigma.shape() != (r, r) {
            return Err(Error::domain(format!("A must be {qr} x {r} and Σ {r} x {r}")));
        }
        Ok(())
    }

    /// `−½ tr(Σ⁻¹ Rᵀ R)` and `log |Σ|`, or `None` if `Σ` is not PD.
    fn gaussian_pieces(sigma: &DMatrix<f64>, resid: &DMatrix<f64>) -> Option<(f64, f64)> {
        let chol = sigma.clone().cholesky()?;
        let w = chol.l().solve_lower_triangular(&resid.transpose())?;
        Some((-0.5 * w.norm_squared(), linalg::ln_det_chol(&chol.l())))
    }

    /// Gaussian log-likelihood of rows `q+1..K` given the first `q`.
    pub fn log_likelihood(&self, params: &VarParams) -> f64 {
        if self.check_shapes(&params.a, &params.sigma).is_err() || params.b.shape() != (self.p(), self.r()) {
            return f64::NEG_INFINITY;
        }
        let Some((quad, ln_det)) = Self::gaussian_pieces(&params.sigma, &self.residual(params)) else {
            return f64::NEG_INFINITY;
        };
        let (t, r) = (self.t_len() as f64, self.r() as f64);
        -t * r * HALF_LN_2PI - 0.5 * t * ln_det + quad
    }

    /// Unnormalized log prior; `B` contributes nothing.
    pub fn log_prior(&self, params: &VarParams) -> f64 {
        self.log_prior_a_sigma(&params.a, &params.sigma)
    }

    fn log_prior_a_sigma(&self, a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
        let Some(chol) = sigma.clone().cholesky() else {
            return f64::NEG_INFINITY;
        };
        let dev = vec_of(a) - &self.hyper.m;
        let quad_a = dev.dot(&(&self.hyper.c * &dev));
        let tr = (chol.inverse() * &self.hyper.d).trace();
        -0.5 * quad_a - 0.5 * self.hyper.a * linalg::ln_det_chol(&chol.l()) - 0.5 * tr
    }

    /// Unnormalized log posterior of `(A, B, Σ)`; `−∞` unless `Σ` is PD.
    pub fn var_log_joint(&self, params: &VarParams) -> f64 {
        let lik = self.log_likelihood(params);
        if lik == f64::NEG_INFINITY {
            return lik;
        }
        lik + self.log_prior(params)
    }

    fn require_pred_chol(&self) -> Result<&Cholesky<f64, Dyn>> {
        self.pred_chol
            .as_ref()
            .ok_or_else(|| Error::domain("predictor matrix is rank deficient, so B cannot be integrated out"))
    }

    /// `log ∫ f(A, B, Σ | data) dB`, on the same scale as [`var_log_joint`](Self::var_log_joint).
    pub fn log_marginal_a_sigma(&self, a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
        let Ok(chol_x) = self.require_pred_chol() else {
            return f64::NEG_INFINITY;
        };
        if self.check_shapes(a, sigma).is_err() {
            return f64::NEG_INFINITY;
        }
        let proj = &self.proj_resp - &self.proj_lagged * a;
        let Some((quad, ln_det)) = Self::gaussian_pieces(sigma, &proj) else {
            return f64::NEG_INFINITY;
        };
        let (t, r, p) = (self.t_len() as f64, self.r() as f64, self.p() as f64);
        let ln_det_xtx = linalg::ln_det_chol(&chol_x.l());
        -(t - p) * r * HALF_LN_2PI - 0.5 * (t - p) * ln_det - 0.5 * r * ln_det_xtx + quad
            + self.log_prior_a_sigma(a, sigma)
    }

    /// Least-squares `B̂ = (XᵀX)⁻¹ Xᵀ (Y − L A)`.
    fn b_hat(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let chol = self.require_pred_chol()?;
        Ok(chol.solve(&(self.pred.transpose() * (&self.resp - &self.lagged * a))))
    }

    /// Matrix-normal log density of `B | A, Σ`.
    pub fn ln_density_b_given(&self, b: &DMatrix<f64>, a: &DMatrix<f64>, sigma: &DMatrix<f64>) -> f64 {
        let (Ok(chol_x), Ok(b_hat)) = (self.require_pred_chol(), self.b_hat(a)) else {
            return f64::NEG_INFINITY;
        };
        let Some(chol_s) = sigma.clone().cholesky() else {
            return f64::NEG_INFINITY;
        };
        let (r, p) = (self.r() as f64, self.p() as f64);
        // tr(Σ⁻¹ (B − B̂)ᵀ XᵀX (B − B̂)) = ‖L_xᵀ (B − B̂) L_Σ⁻ᵀ‖²
        let dev = chol_x.l().transpose() * (b - b_hat);
        let w = chol_s
            .l()
            .solve_lower_triangular(&dev.transpose())
            .expect("cholesky factor has positive diagonal");
        -p * r * HALF_LN_2PI - 0.5 * p * linalg::ln_det_chol(&chol_s.l()) + 0.5 * r * linalg::ln_det_chol(&chol_x.l())
            - 0.5 * w.norm_squared()
    }

    /// `Σ | A ~ IW(T − p + a − r − 1, D + (Y − LA)ᵀ M (Y − LA))`.
    pub fn draw_sigma_given_a(&self, a: &DMatrix<f64>, rng: &mut RandomStream) -> Result<DMatrix<f64>> {
        self.require_pred_chol()?;
        let proj = &self.proj_resp - &self.proj_lagged * a;
        let scale = &self.hyper.d + proj.transpose() * &proj;
        let sigma = InverseWishart::new(self.sigma_df(), scale)?.sample(rng)?;
        linalg::cholesky_with_jitter(&sigma, "Σ draw")?;
        Ok(sigma)
    }

    /// `vec A | Σ` with precision `Σ⁻¹ ⊗ LᵀML + C` and mean
    /// `Q⁻¹ [vec(LᵀMY Σ⁻¹) + C m]`.
    pub fn draw_a_given_sigma(&self, sigma: &DMatrix<f64>, rng: &mut RandomStream) -> Result<DMatrix<f64>> {
        self.require_pred_chol()?;
        let sigma_inv = linalg::cholesky_with_jitter(sigma, "Σ")?.inverse();
        let precision = linalg::symmetrize(&(kron(&sigma_inv, &self.lagged_gram) + &self.hyper.c));
        let chol = linalg::cholesky_with_jitter(&precision, "precision of vec A")?;
        let cross = self.lagged.transpose() * &self.proj_resp * &sigma_inv;
        let mean = chol.solve(&(vec_of(&cross) + &self.hyper.c * &self.hyper.m));
        let z = rng.standard_normal_vector(mean.len());
        let step = chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("cholesky factor has positive diagonal");
        Ok(unvec(&(mean + step), self.lags() * self.r(), self.r()))
    }

    /// `B | A, Σ = B̂ + L_x⁻ᵀ Z L_Σᵀ` with `XᵀX = L_x L_xᵀ`, `Σ = L_Σ L_Σᵀ`.
    pub fn draw_b_given(&self, a: &DMatrix<f64>, sigma: &DMatrix<f64>, rng: &mut RandomStream) -> Result<DMatrix<f64>> {
        let chol_x = self.require_pred_chol()?;
        let b_hat = self.b_hat(a)?;
        let l_sigma = linalg::cholesky_with_jitter(sigma, "Σ")?.l();
        let (p, r) = (self.p(), self.r());
        let z = DMatrix::from_fn(p, r, |_, _| rng.standard_normal());
        let left = chol_x
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("cholesky factor has positive diagonal");
        Ok(b_hat + left * l_sigma.transpose())
    }

    /// One collapsed Gibbs transition. Only the current `A` is read.
    pub fn var_collapsed_step(&self, params: &mut VarParams, rng: &mut RandomStream) -> Result<()> {
        self.check_shapes(&params.a, &params.sigma)?;
        let sigma = self.draw_sigma_given_a(&params.a, rng)?;
        let a = self.draw_a_given_sigma(&sigma, rng)?;
        let b = self.draw_b_given(&a, &sigma, rng)?;
        *params = VarParams { a, b, sigma };
        Ok(())
    }

    /// The collapsed sampler as a linchpin sampler on `(A, Σ)` with `B` filled in.
    pub fn collapsed_sampler(&self) -> Result<LinchpinSampler<VarLinchpinKernel<'_>, VarBConditional<'_>>> {
        self.require_pred_chol()?;
        Ok(LinchpinSampler::new(
            VarLinchpinKernel { model: self },
            VarBConditional { model: self },
        ))
    }

    /// Collapsed Gibbs as a kernel on full parameter values.
    pub fn collapsed_kernel(&self) -> Result<VarCollapsedGibbs<'_>> {
        self.require_pred_chol()?;
        Ok(VarCollapsedGibbs { model: self })
    }

    /// Least-squares fit of `Y` on `[L X]` with the residual covariance:
    /// a data-driven start for either sampler.
    pub fn least_squares_start(&self) -> Result<VarParams> {
        let design = hstack(&[&self.lagged, &self.pred])?;
        let (t, k) = design.shape();
        if t <= k {
            return Err(Error::InsufficientData { needed: k + 1, got: t });
        }
        let gram = design.transpose() * &design;
        let chol = linalg::cholesky(&gram, "[L X]ᵀ[L X]")?;
        let coef = chol.solve(&(design.transpose() * &self.resp));
        let qr = self.lags() * self.r();
        let a = coef.rows(0, qr).into_owned();
        let b = coef.rows(qr, self.p()).into_owned();
        let resid = &self.resp - &design * &coef;
        let sigma = linalg::symmetrize(&(resid.transpose() * resid / (t - k) as f64));
        Ok(VarParams { a, b, sigma })
    }

    /// The unconstrained posterior used by joint random-walk MH.
    pub fn joint_target(&self) -> VarJointTarget<'_> {
        VarJointTarget { model: self }
    }
}

/// `Σ' ~ f(Σ' | A)` then `A' ~ f(A' | Σ')`.
#[derive(Clone, Copy, Debug)]
pub struct VarLinchpinKernel<'a> {
    model: &'a VarModel,
}

impl TransitionKernel for VarLinchpinKernel<'_> {
    type State = VarLinchpin;

    fn step(&self, state: &mut VarLinchpin, rng: &mut RandomStream) -> Result<bool> {
        self.model.check_shapes(&state.a, &state.sigma)?;
        let sigma = self.model.draw_sigma_given_a(&state.a, rng)?;
        let a = self.model.draw_a_given_sigma(&sigma, rng)?;
        *state = VarLinchpin { a, sigma };
        Ok(true)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: "gibbs(sigma|a, a|sigma)".into(),
            scale: None,
        }
    }
}

/// `B | A, Σ`.
#[derive(Clone, Copy, Debug)]
pub struct VarBConditional<'a> {
    model: &'a VarModel,
}

impl ConditionalSampler for VarBConditional<'_> {
    type X = DMatrix<f64>;
    type Y = VarLinchpin;

    fn draw(&self, y: &VarLinchpin, rng: &mut RandomStream) -> DMatrix<f64> {
        self.model
            .draw_b_given(&y.a, &y.sigma, rng)
            .expect("Σ comes from a PD-checked draw")
    }

    fn ln_density(&self, b: &DMatrix<f64>, y: &VarLinchpin) -> f64 {
        self.model.ln_density_b_given(b, &y.a, &y.sigma)
    }

    fn check_y(&self, y: &VarLinchpin) -> Result<()> {
        self.model.check_shapes(&y.a, &y.sigma)
    }
}

/// Collapsed Gibbs on [`VarParams`]; equivalent to the linchpin form.
#[derive(Clone, Copy, Debug)]
pub struct VarCollapsedGibbs<'a> {
    model: &'a VarModel,
}

impl TransitionKernel for VarCollapsedGibbs<'_> {
    type State = VarParams;

    fn step(&self, state: &mut VarParams, rng: &mut RandomStream) -> Result<bool> {
        self.model.var_collapsed_step(state, rng)?;
        Ok(true)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: "collapsed-gibbs".into(),
            scale: None,
        }
    }
}

/// The posterior on `θ = (vec A, vec B, ℓ)` where `ℓ` lists the lower
/// triangle of the Cholesky factor of `Σ` by columns with log diagonals.
/// Includes the Jacobian of `θ ↦ (A, B, Σ)`.
#[derive(Clone, Copy, Debug)]
pub struct VarJointTarget<'a> {
    model: &'a VarModel,
}

impl VarJointTarget<'_> {
    fn sizes(&self) -> (usize, usize, usize) {
        let r = self.model.r();
        (self.model.lags() * r * r, self.model.p() * r, r * (r + 1) / 2)
    }

    pub fn to_params(&self, theta: &[f64]) -> VarParams {
        let m = self.model;
        let (r, qr, p) = (m.r(), m.lags() * m.r(), m.p());
        let (na, nb, _) = self.sizes();
        let a = DMatrix::from_column_slice(qr, r, &theta[..na]);
        let b = DMatrix::from_column_slice(p, r, &theta[na..na + nb]);
        let l = cholesky_from_log(&theta[na + nb..], r);
        VarParams {
            a,
            b,
            sigma: &l * l.transpose(),
        }
    }

    pub fn to_theta(&self, params: &VarParams) -> Result<Vec<f64>> {
        let l = linalg::cholesky(&params.sigma, "Σ")?.l();
        let mut theta = Vec::with_capacity(self.dim());
        theta.extend_from_slice(params.a.as_slice());
        theta.extend_from_slice(params.b.as_slice());
        theta.extend(log_cholesky(&l));
        Ok(theta)
    }
}

/// Lower triangle of `l` by columns, diagonal entries logged.
pub fn log_cholesky(l: &DMatrix<f64>) -> Vec<f64> {
    let r = l.nrows();
    let mut out = Vec::with_capacity(r * (r + 1) / 2);
    for j in 0..r {
        for i in j..r {
            out.push(if i == j { l[(i, i)].ln() } else { l[(i, j)] });
        }
    }
    out
}

pub fn cholesky_from_log(v: &[f64], r: usize) -> DMatrix<f64> {
    let mut l = DMatrix::zeros(r, r);
    let mut k = 0;
    for j in 0..r {
        for i in j..r {
            l[(i, j)] = if i == j { v[k].exp() } else { v[k] };
            k += 1;
        }
    }
    l
}

/// `log |∂Σ/∂θ|` for the log-Cholesky map: `r log 2 + Σ_i (r − i + 1) ℓ_ii`
/// with `i` counted from zero.
pub fn log_cholesky_jacobian(v: &[f64], r: usize) -> f64 {
    let mut k = 0;
    let mut acc = r as f64 * std::f64::consts::LN_2;
    for j in 0..r {
        acc += (r - j + 1) as f64 * v[k];
        k += r - j;
    }
    acc
}

impl TargetDensity for VarJointTarget<'_> {
    fn dim(&self) -> usize {
        let (na, nb, ns) = self.sizes();
        na + nb + ns
    }

    fn ln_f(&self, theta: &[f64]) -> f64 {
        let (na, nb, _) = self.sizes();
        let params = self.to_params(theta);
        self.model.var_log_joint(&params) + log_cholesky_jacobian(&theta[na + nb..], self.model.r())
    }
}

/// Simulate `K` observations. `X_t` has an intercept then standard normal
/// columns; the first `q` responses are standard normal.
pub fn synth_var(
    k: usize,
    lags: usize,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    sigma: &DMatrix<f64>,
    seed: u64,
) -> Result<VarData> {
    let r = sigma.nrows();
    let p = b.nrows();
    if a.shape() != (lags * r, r) || b.ncols() != r || sigma.ncols() != r || p == 0 || k <= lags {
        return Err(Error::domain("inconsistent VAR dimensions"));
    }
    let l_sigma = linalg::cholesky(sigma, "Σ")?.l();
    let mut rng = RandomStream::new(seed);
    let x = DMatrix::from_fn(k, p, |_, j| if j == 0 { 1.0 } else { rng.standard_normal() });
    let mut y = DMatrix::zeros(k, r);
    for t in 0..k {
        let noise = &l_sigma * rng.standard_normal_vector(r);
        if t < lags {
            y.row_mut(t).copy_from(&rng.standard_normal_vector(r).transpose());
            continue;
        }
        let mut mean = b.transpose() * x.row(t).transpose();
        for i in 1..=lags {
            let a_i = a.rows((i - 1) * r, r);
            mean += a_i.transpose() * y.row(t - i).transpose();
        }
        y.row_mut(t).copy_from(&(mean + noise).transpose());
    }
    VarData::new(y, x, lags)
}
