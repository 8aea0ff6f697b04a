//! Single-step Markov kernels that leave a target density invariant.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::dist::{GaussianRegression, MvnParams, RandomStream};
use crate::error::{Error, Result};
use crate::linalg;

/// Log unnormalized density over a real vector.
pub trait TargetDensity: Send + Sync {
    fn dim(&self) -> usize;
    fn ln_f(&self, x: &[f64]) -> f64;
}

/// Log unnormalized density over `{0,1}^p`.
pub trait BinaryTarget: Send + Sync {
    fn dim(&self) -> usize;
    fn ln_f(&self, z: &[bool]) -> f64;
}

impl<T: TargetDensity + ?Sized> TargetDensity for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn ln_f(&self, x: &[f64]) -> f64 {
        (**self).ln_f(x)
    }
}

impl<T: BinaryTarget + ?Sized> BinaryTarget for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn ln_f(&self, z: &[bool]) -> f64 {
        (**self).ln_f(z)
    }
}

/// A target built from a closure.
#[derive(Clone)]
pub struct FnTarget<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnTarget<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> TargetDensity for FnTarget<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn ln_f(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Binary target built from a closure.
#[derive(Clone)]
pub struct FnBinaryTarget<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[bool]) -> f64 + Send + Sync> FnBinaryTarget<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[bool]) -> f64 + Send + Sync> BinaryTarget for FnBinaryTarget<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn ln_f(&self, z: &[bool]) -> f64 {
        (self.f)(z)
    }
}

impl TargetDensity for MvnParams {
    fn dim(&self) -> usize {
        MvnParams::dim(self)
    }
    fn ln_f(&self, x: &[f64]) -> f64 {
        self.ln_pdf(&DVector::from_column_slice(x))
    }
}

/// Descriptive metadata recorded alongside chain output.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelInfo {
    pub name: String,
    pub scale: Option<f64>,
}

impl fmt::Display for KernelInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.scale {
            Some(h) => write!(f, "{}(h={h})", self.name),
            None => write!(f, "{}", self.name),
        }
    }
}

/// One step of a Markov chain. `step` updates the state in place and
/// reports whether a Metropolis proposal was accepted (always `true` for
/// kernels without an accept/reject stage).
pub trait TransitionKernel: Send + Sync {
    type State: Clone + Send;

    fn step(&self, state: &mut Self::State, rng: &mut RandomStream) -> Result<bool>;

    fn info(&self) -> KernelInfo;
}

/// Kernels on a finite state space `0..m` that can produce their exact
/// transition matrix.
pub trait FiniteKernel {
    fn num_states(&self) -> usize;
    fn transition_matrix(&self) -> Result<DMatrix<f64>>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Proposal {
    /// `x + Uniform(-h, h)` per coordinate.
    Uniform,
    /// `x + h · L z`, `z` standard normal, `L` an optional preconditioner.
    Gaussian,
}

impl Proposal {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(Proposal::Uniform),
            "gaussian" => Some(Proposal::Gaussian),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Proposal::Uniform => "uniform",
            Proposal::Gaussian => "gaussian",
        }
    }
}

/// Target acceptance used when the caller does not give one: 0.44 in one
/// dimension, 0.234 from five dimensions on, linear in between.
pub fn default_target_acceptance(dim: usize) -> f64 {
    match dim {
        0 | 1 => 0.44,
        d if d >= 5 => 0.234,
        d => 0.44 - (d as f64 - 1.0) * (0.44 - 0.234) / 4.0,
    }
}

/// Random-walk Metropolis–Hastings with a fixed scale.
#[derive(Clone, Debug)]
pub struct RandomWalkMh<T> {
    target: T,
    scale: f64,
    proposal: Proposal,
    preconditioner: Option<DMatrix<f64>>,
}

impl<T: TargetDensity> RandomWalkMh<T> {
    pub fn new(target: T, scale: f64, proposal: Proposal) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::domain(format!("proposal scale must be positive, got {scale}")));
        }
        Ok(Self {
            target,
            scale,
            proposal,
            preconditioner: None,
        })
    }

    /// Gaussian proposals `x + h L z` with a fixed lower-triangular `L`.
    pub fn with_preconditioner(mut self, factor: DMatrix<f64>) -> Result<Self> {
        let d = self.target.dim();
        if factor.shape() != (d, d) {
            return Err(Error::domain("preconditioner must be d x d"));
        }
        if self.proposal != Proposal::Gaussian {
            return Err(Error::domain("a preconditioner needs the gaussian proposal"));
        }
        self.preconditioner = Some(factor);
        Ok(self)
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn proposal(&self) -> Proposal {
        self.proposal
    }

    fn propose(&self, x: &[f64], scale: f64, rng: &mut RandomStream) -> Vec<f64> {
        match self.proposal {
            Proposal::Uniform => x
                .iter()
                .map(|xi| xi + scale * (2.0 * rng.uniform() - 1.0))
                .collect(),
            Proposal::Gaussian => {
                let z = rng.standard_normal_vector(x.len());
                let step = match &self.preconditioner {
                    Some(l) => l * z,
                    None => z,
                };
                x.iter().zip(step.iter()).map(|(xi, s)| xi + scale * s).collect()
            }
        }
    }

    /// One MH step from `x` whose log density `ln_fx` is already known.
    /// Returns the acceptance probability of the proposal made.
    fn advance(&self, x: &mut Vec<f64>, ln_fx: &mut f64, scale: f64, rng: &mut RandomStream) -> (bool, f64) {
        let y = self.propose(x, scale, rng);
        let ln_fy = self.target.ln_f(&y);
        let diff = ln_fy - *ln_fx;
        let alpha = if diff >= 0.0 { 1.0 } else if diff.is_nan() { 0.0 } else { diff.exp() };
        let accept = diff >= 0.0 || (!diff.is_nan() && rng.uniform().ln() < diff);
        if accept {
            *x = y;
            *ln_fx = ln_fy;
        }
        (accept, alpha)
    }

    fn checked_start(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.target.dim() {
            return Err(Error::domain(format!(
                "state has dimension {}, target has {}",
                x.len(),
                self.target.dim()
            )));
        }
        let ln_fx = self.target.ln_f(x);
        if ln_fx == f64::NEG_INFINITY || ln_fx.is_nan() {
            return Err(Error::InvalidStart);
        }
        Ok(ln_fx)
    }

    /// A single step from `state`; on rejection the returned state is `state`.
    pub fn rw_mh_step(&self, state: &[f64], rng: &mut RandomStream) -> Result<(Vec<f64>, bool)> {
        let mut ln_fx = self.checked_start(state)?;
        let mut x = state.to_vec();
        let (accepted, _) = self.advance(&mut x, &mut ln_fx, self.scale, rng);
        Ok((x, accepted))
    }

    /// Stochastic-approximation pilot: `log h` moves by `t^-0.6 (α_t - target)`
    /// after each proposal, where `α_t` is the acceptance probability. The
    /// returned kernel has the final scale frozen.
    pub fn tune(
        self,
        start: &[f64],
        pilot_length: usize,
        target_acceptance: f64,
        rng: &mut RandomStream,
    ) -> Result<(Self, AdaptationReport)>
    where
        T: Clone,
    {
        if pilot_length < 100 {
            return Err(Error::domain(format!("pilot length must be at least 100, got {pilot_length}")));
        }
        if !(target_acceptance > 0.0 && target_acceptance < 1.0) {
            return Err(Error::domain(format!(
                "target acceptance must lie in (0, 1), got {target_acceptance}"
            )));
        }
        let mut ln_fx = self.checked_start(start)?;
        let mut x = start.to_vec();
        let mut log_h = self.scale.ln();
        let mut accepted = 0usize;
        for t in 1..=pilot_length {
            let (acc, alpha) = self.advance(&mut x, &mut ln_fx, log_h.exp(), rng);
            accepted += acc as usize;
            log_h += (alpha - target_acceptance) * (t as f64).powf(-0.6);
            log_h = log_h.clamp(-50.0, 50.0);
        }
        let rate = accepted as f64 / pilot_length as f64;
        let warning = ((rate - target_acceptance).abs() > 0.1).then(|| {
            format!("pilot acceptance {rate:.3} is more than 0.1 from target {target_acceptance:.3}")
        });
        if let Some(w) = &warning {
            log::warn!("{w}");
        }
        let scale = log_h.exp();
        let report = AdaptationReport {
            scale,
            acceptance_rate: rate,
            accepted,
            pilot_length,
            target_acceptance,
            final_state: x,
            warning,
        };
        let mut tuned = self;
        tuned.scale = scale;
        Ok((tuned, report))
    }
}

impl<T: TargetDensity> TransitionKernel for RandomWalkMh<T> {
    type State = Vec<f64>;

    fn step(&self, state: &mut Vec<f64>, rng: &mut RandomStream) -> Result<bool> {
        let mut ln_fx = self.checked_start(state)?;
        Ok(self.advance(state, &mut ln_fx, self.scale, rng).0)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: format!("rw-mh-{}", self.proposal.as_str()),
            scale: Some(self.scale),
        }
    }
}

/// Outcome of a pilot tuning run.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct AdaptationReport {
    pub scale: f64,
    /// `accepted / pilot_length` over the whole pilot.
    pub acceptance_rate: f64,
    pub accepted: usize,
    pub pilot_length: usize,
    pub target_acceptance: f64,
    /// Where the pilot ended; a reasonable production start.
    pub final_state: Vec<f64>,
    pub warning: Option<String>,
}

/// Tune an RW-MH scale on `target` starting from `start` with scale 1.
pub fn tune_scale<T: TargetDensity + Clone>(
    target: T,
    start: &[f64],
    pilot_length: usize,
    target_acceptance: f64,
    proposal: Proposal,
    rng: &mut RandomStream,
) -> Result<AdaptationReport> {
    let kernel = RandomWalkMh::new(target, 1.0, proposal)?;
    Ok(kernel.tune(start, pilot_length, target_acceptance, rng)?.1)
}

/// Isotropic Gaussian pilot, then a covariance run of the same length, then a
/// final pilot with proposals shaped by the Cholesky factor of that run's
/// empirical covariance. The report describes the final pilot.
pub fn tune_preconditioned<T: TargetDensity + Clone>(
    target: T,
    start: &[f64],
    pilot_length: usize,
    target_acceptance: f64,
    rng: &mut RandomStream,
) -> Result<(RandomWalkMh<T>, AdaptationReport)> {
    let d = target.dim();
    let initial = 2.38 / (d as f64).sqrt();
    let (iso, first) = RandomWalkMh::new(target.clone(), initial, Proposal::Gaussian)?.tune(
        start,
        pilot_length,
        target_acceptance,
        rng,
    )?;
    let mut x = first.final_state;
    let mut mean = DVector::zeros(d);
    let mut scatter = DMatrix::zeros(d, d);
    for t in 1..=pilot_length {
        iso.step(&mut x, rng)?;
        let v = DVector::from_column_slice(&x);
        let delta = &v - &mean;
        mean += &delta / t as f64;
        scatter += &delta * (&v - &mean).transpose();
    }
    let cov = linalg::symmetrize(&(scatter / (pilot_length - 1) as f64));
    let factor = linalg::cholesky_with_jitter(&cov, "pilot covariance")?.l();
    RandomWalkMh::new(target, initial, Proposal::Gaussian)?
        .with_preconditioner(factor)?
        .tune(&x, pilot_length, target_acceptance, rng)
}

/// Full conditional of one block of coordinates given the rest.
pub trait FullConditional: Send + Sync {
    fn block(&self) -> &[usize];
    /// New values for `block()`, given the full current state.
    fn draw(&self, state: &[f64], rng: &mut RandomStream) -> Vec<f64>;
}

/// Gaussian full conditional of `free` given the remaining coordinates.
pub struct MvnBlock {
    reg: GaussianRegression,
}

impl MvnBlock {
    pub fn new(params: &MvnParams, given: &[usize]) -> Result<Self> {
        Ok(Self {
            reg: params.regression(given)?,
        })
    }
}

impl FullConditional for MvnBlock {
    fn block(&self) -> &[usize] {
        self.reg.free()
    }

    fn draw(&self, state: &[f64], rng: &mut RandomStream) -> Vec<f64> {
        let g = DVector::from_iterator(self.reg.given().len(), self.reg.given().iter().map(|&i| state[i]));
        self.reg.draw(&g, rng).as_slice().to_vec()
    }
}

/// Systematic-scan Gibbs sampler.
pub struct GibbsScan {
    dim: usize,
    conditionals: Vec<Box<dyn FullConditional>>,
}

impl GibbsScan {
    pub fn new(dim: usize, conditionals: Vec<Box<dyn FullConditional>>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for c in &conditionals {
            for &i in c.block() {
                if i >= dim || seen[i] {
                    return Err(Error::domain(format!("coordinate {i} is out of range or in two blocks")));
                }
                seen[i] = true;
            }
        }
        if let Some(i) = seen.iter().position(|s| !s) {
            return Err(Error::domain(format!("coordinate {i} is not covered by any block")));
        }
        Ok(Self { dim, conditionals })
    }

    /// Two-block Gaussian Gibbs: first `p - r` coordinates, then the last `r`.
    pub fn mvn_two_block(params: &MvnParams, r: usize) -> Result<Self> {
        let p = params.dim();
        if r == 0 || r >= p {
            return Err(Error::domain(format!("split must satisfy 0 < r < p, got r={r}, p={p}")));
        }
        let first: Vec<usize> = (0..p - r).collect();
        let last: Vec<usize> = (p - r..p).collect();
        Self::new(
            p,
            vec![
                Box::new(MvnBlock::new(params, &last)?),
                Box::new(MvnBlock::new(params, &first)?),
            ],
        )
    }

    pub fn gibbs_scan_step(&self, state: &mut [f64], rng: &mut RandomStream) -> Result<()> {
        if state.len() != self.dim {
            return Err(Error::domain(format!("state has dimension {}, expected {}", state.len(), self.dim)));
        }
        for c in &self.conditionals {
            let vals = c.draw(state, rng);
            let block = c.block();
            if vals.len() != block.len() {
                return Err(Error::domain(format!(
                    "conditional returned {} values for a block of {}",
                    vals.len(),
                    block.len()
                )));
            }
            for (&i, v) in block.iter().zip(vals) {
                state[i] = v;
            }
        }
        Ok(())
    }
}

impl TransitionKernel for GibbsScan {
    type State = Vec<f64>;

    fn step(&self, state: &mut Vec<f64>, rng: &mut RandomStream) -> Result<bool> {
        self.gibbs_scan_step(state, rng)?;
        Ok(true)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: format!("gibbs-{}-block", self.conditionals.len()),
            scale: None,
        }
    }
}

/// Independent draws from a sampler; the current state is ignored.
pub struct ExactDraw<F> {
    name: &'static str,
    draw: F,
}

impl<S, F> ExactDraw<F>
where
    F: Fn(&mut RandomStream) -> S,
{
    pub fn new(name: &'static str, draw: F) -> Self {
        Self { name, draw }
    }
}

impl<S, F> TransitionKernel for ExactDraw<F>
where
    S: Clone + Send,
    F: Fn(&mut RandomStream) -> S + Send + Sync,
{
    type State = S;

    fn step(&self, state: &mut S, rng: &mut RandomStream) -> Result<bool> {
        *state = (self.draw)(rng);
        Ok(true)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: format!("exact-{}", self.name),
            scale: None,
        }
    }
}

/// Encode `{0,1}^p` as an index with bit `i` holding `z[i]`.
pub fn binary_index(z: &[bool]) -> usize {
    z.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as usize) << i))
}

pub fn binary_state(index: usize, p: usize) -> Vec<bool> {
    (0..p).map(|i| index >> i & 1 == 1).collect()
}

/// Largest `p` for which exact `2^p` matrices are built.
pub const MAX_FINITE_BITS: usize = 12;

/// MH on `{0,1}^p` proposing a uniformly chosen single-coordinate flip.
#[derive(Clone, Debug)]
pub struct FlipMh<T> {
    target: T,
}

impl<T: BinaryTarget> FlipMh<T> {
    pub fn new(target: T) -> Result<Self> {
        if target.dim() == 0 {
            return Err(Error::domain("binary target needs at least one coordinate"));
        }
        Ok(Self { target })
    }

    pub fn target(&self) -> &T {
        &self.target
    }

    pub fn flip_mh_step(&self, state: &[bool], rng: &mut RandomStream) -> Result<(Vec<bool>, bool)> {
        let mut z = state.to_vec();
        let accepted = self.step(&mut z, rng)?;
        Ok((z, accepted))
    }
}

impl<T: BinaryTarget> TransitionKernel for FlipMh<T> {
    type State = Vec<bool>;

    fn step(&self, z: &mut Vec<bool>, rng: &mut RandomStream) -> Result<bool> {
        let p = self.target.dim();
        if z.len() != p {
            return Err(Error::domain(format!("state has dimension {}, expected {p}", z.len())));
        }
        let ln_fz = self.target.ln_f(z);
        let i = rng.index(p);
        z[i] = !z[i];
        let diff = self.target.ln_f(z) - ln_fz;
        let accept = diff >= 0.0 || (!diff.is_nan() && rng.uniform().ln() < diff);
        if !accept {
            z[i] = !z[i];
        }
        Ok(accept)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: "flip-mh".into(),
            scale: None,
        }
    }
}

impl<T: BinaryTarget> FiniteKernel for FlipMh<T> {
    fn num_states(&self) -> usize {
        1 << self.target.dim()
    }

    fn transition_matrix(&self) -> Result<DMatrix<f64>> {
        let p = self.target.dim();
        if p > MAX_FINITE_BITS {
            return Err(Error::Size(format!("2^{p} states exceeds the 2^{MAX_FINITE_BITS} cap")));
        }
        let m = 1usize << p;
        let ln_f: Vec<f64> = (0..m).map(|k| self.target.ln_f(&binary_state(k, p))).collect();
        let mut pm = DMatrix::zeros(m, m);
        for k in 0..m {
            let mut off = 0.0;
            for i in 0..p {
                let j = k ^ (1 << i);
                let a = (ln_f[j] - ln_f[k]).min(0.0).exp();
                let v = a / p as f64;
                pm[(k, j)] = v;
                off += v;
            }
            pm[(k, k)] = 1.0 - off;
        }
        Ok(pm)
    }
}

/// Metropolis–Hastings on `0..m` with a symmetric proposal matrix.
#[derive(Clone, Debug)]
pub struct FiniteMh {
    ln_weights: Vec<f64>,
    proposal: DMatrix<f64>,
}

impl FiniteMh {
    pub fn new(ln_weights: Vec<f64>, proposal: DMatrix<f64>) -> Result<Self> {
        let m = ln_weights.len();
        if proposal.shape() != (m, m) {
            return Err(Error::domain("proposal matrix must be m x m"));
        }
        for i in 0..m {
            let s: f64 = proposal.row(i).sum();
            if (s - 1.0).abs() > 1e-12 || proposal.row(i).iter().any(|&v| v < 0.0) {
                return Err(Error::domain(format!("proposal row {i} is not a probability vector")));
            }
            for j in 0..i {
                if proposal[(i, j)] != proposal[(j, i)] {
                    return Err(Error::domain("proposal matrix must be symmetric"));
                }
            }
        }
        Ok(Self { ln_weights, proposal })
    }

    /// Propose `i ± 1` with probability ½ each; proposals off the ends stay put.
    pub fn neighbor_walk(ln_weights: Vec<f64>) -> Result<Self> {
        let m = ln_weights.len();
        let mut q = DMatrix::zeros(m, m);
        for i in 0..m {
            if i > 0 {
                q[(i, i - 1)] = 0.5;
            } else {
                q[(i, i)] += 0.5;
            }
            if i + 1 < m {
                q[(i, i + 1)] = 0.5;
            } else {
                q[(i, i)] += 0.5;
            }
        }
        Self::new(ln_weights, q)
    }
}

impl TransitionKernel for FiniteMh {
    type State = usize;

    fn step(&self, i: &mut usize, rng: &mut RandomStream) -> Result<bool> {
        let m = self.ln_weights.len();
        if *i >= m {
            return Err(Error::domain(format!("state {i} outside 0..{m}")));
        }
        let u = rng.uniform();
        let mut acc = 0.0;
        let mut j = m - 1;
        for (k, q) in self.proposal.row(*i).iter().enumerate() {
            acc += q;
            if u < acc {
                j = k;
                break;
            }
        }
        let diff = self.ln_weights[j] - self.ln_weights[*i];
        let accept = diff >= 0.0 || rng.uniform().ln() < diff;
        if accept {
            *i = j;
        }
        Ok(accept)
    }

    fn info(&self) -> KernelInfo {
        KernelInfo {
            name: "finite-mh".into(),
            scale: None,
        }
    }
}

impl FiniteKernel for FiniteMh {
    fn num_states(&self) -> usize {
        self.ln_weights.len()
    }

    fn transition_matrix(&self) -> Result<DMatrix<f64>> {
        let m = self.ln_weights.len();
        let mut pm = DMatrix::zeros(m, m);
        for i in 0..m {
            let mut off = 0.0;
            for j in 0..m {
                if j != i && self.proposal[(i, j)] > 0.0 {
                    let v = self.proposal[(i, j)] * (self.ln_weights[j] - self.ln_weights[i]).min(0.0).exp();
                    pm[(i, j)] = v;
                    off += v;
                }
            }
            pm[(i, i)] = 1.0 - off;
        }
        Ok(pm)
    }
}
