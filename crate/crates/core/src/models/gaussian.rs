//! A multivariate normal split as `(X₁, X₂)` with `X₂` the last `r`
//! coordinates, sampled either by two-block Gibbs or by a linchpin sampler
//! that runs random-walk MH on `X₂ ~ N(μ₂, Σ₂₂)` and draws `X₁ | X₂` exactly.

use nalgebra::DVector;

use crate::chain::ChainOutput;
use crate::diagnostics;
use crate::dist::{GaussianRegression, MvnParams, RandomStream};
use crate::error::{Error, Result};
use crate::kernels::{default_target_acceptance, AdaptationReport, GibbsScan, Proposal, RandomWalkMh};
use crate::sampler::{ConditionalSampler, LinchpinSampler};

#[derive(Clone, Debug)]
pub struct GaussianSplitTarget {
    joint: MvnParams,
    split: usize,
    marginal: MvnParams,
    regression: GaussianRegression,
}

impl GaussianSplitTarget {
    pub fn new(joint: MvnParams, split: usize) -> Result<Self> {
        let p = joint.dim();
        if split == 0 || split >= p {
            return Err(Error::domain(format!("split must satisfy 0 < r < p, got r={split}, p={p}")));
        }
        let given: Vec<usize> = (p - split..p).collect();
        let marginal = MvnParams::new(
            joint.mean().rows(p - split, split).into_owned(),
            joint.cov().view((p - split, p - split), (split, split)).into_owned(),
        )?;
        let regression = joint.regression(&given)?;
        Ok(Self {
            joint,
            split,
            marginal,
            regression,
        })
    }

    /// Zero mean with AR(1) correlation `ρ^|i−j|`.
    pub fn ar1(p: usize, rho: f64, split: usize) -> Result<Self> {
        Self::new(MvnParams::ar1(p, rho)?, split)
    }

    pub fn dim(&self) -> usize {
        self.joint.dim()
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn joint(&self) -> &MvnParams {
        &self.joint
    }

    /// Law of `X₂`.
    pub fn marginal(&self) -> &MvnParams {
        &self.marginal
    }

    pub fn conditional(&self) -> GaussianConditional {
        GaussianConditional {
            regression: self.regression.clone(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        ChainOutput::numbered("x", self.dim())
    }

    pub fn gibbs(&self) -> Result<GibbsScan> {
        GibbsScan::mvn_two_block(&self.joint, self.split)
    }

    pub fn linchpin(
        &self,
        scale: f64,
        proposal: Proposal,
    ) -> Result<LinchpinSampler<RandomWalkMh<MvnParams>, GaussianConditional>> {
        Ok(LinchpinSampler::new(
            RandomWalkMh::new(self.marginal.clone(), scale, proposal)?,
            self.conditional(),
        ))
    }

    /// Linchpin sampler whose `X₂` scale was tuned by a pilot from `start`.
    pub fn tuned_linchpin(
        &self,
        start: &[f64],
        pilot: usize,
        target_acceptance: f64,
        proposal: Proposal,
        rng: &mut RandomStream,
    ) -> Result<(LinchpinSampler<RandomWalkMh<MvnParams>, GaussianConditional>, AdaptationReport)> {
        let kernel = RandomWalkMh::new(self.marginal.clone(), 1.0, proposal)?;
        let (kernel, report) = kernel.tune(start, pilot, target_acceptance, rng)?;
        Ok((LinchpinSampler::new(kernel, self.conditional()), report))
    }
}

/// `X₁ | X₂ = y` for the split target.
#[derive(Clone, Debug)]
pub struct GaussianConditional {
    regression: GaussianRegression,
}

impl ConditionalSampler for GaussianConditional {
    type X = DVector<f64>;
    type Y = Vec<f64>;

    fn draw(&self, y: &Vec<f64>, rng: &mut RandomStream) -> DVector<f64> {
        self.regression.draw(&DVector::from_column_slice(y), rng)
    }

    fn ln_density(&self, x: &DVector<f64>, y: &Vec<f64>) -> f64 {
        self.regression.ln_pdf(x, &DVector::from_column_slice(y))
    }

    fn check_y(&self, y: &Vec<f64>) -> Result<()> {
        if y.len() != self.regression.given().len() {
            return Err(Error::domain("linchpin block has the wrong length"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GaussianExperimentConfig {
    pub rho: f64,
    pub n: usize,
    pub dim: usize,
    pub split: usize,
    pub pilot: usize,
    pub proposal: Proposal,
    pub target_acceptance: Option<f64>,
}

impl GaussianExperimentConfig {
    /// Five coordinates split off the last, a 1000-step pilot and uniform proposals.
    pub fn new(rho: f64, n: usize) -> Self {
        Self {
            rho,
            n,
            dim: 5,
            split: 1,
            pilot: 1000,
            proposal: Proposal::Uniform,
            target_acceptance: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaussianExperiment {
    pub gibbs: ChainOutput,
    pub linchpin: ChainOutput,
    pub adaptation: AdaptationReport,
}

impl GaussianExperiment {
    /// ESS of the last coordinate for (Gibbs, linchpin).
    pub fn last_coordinate_ess(&self) -> Result<(f64, f64)> {
        let last = self.gibbs.dim() - 1;
        Ok((
            diagnostics::ess(self.gibbs.column(last))?,
            diagnostics::ess(self.linchpin.column(last))?,
        ))
    }

    pub fn ess_ratio(&self) -> Result<f64> {
        let (g, l) = self.last_coordinate_ess()?;
        Ok(l / g)
    }
}

/// Default experiment: `p = 5`, `r = 1`, both chains from the origin.
pub fn gaussian_experiment(rho: f64, n: usize, seed: u64) -> Result<GaussianExperiment> {
    gaussian_experiment_with(&GaussianExperimentConfig::new(rho, n), seed)
}

/// Gibbs uses substream 0 of `seed`; the linchpin pilot and chain use substream 1.
pub fn gaussian_experiment_with(cfg: &GaussianExperimentConfig, seed: u64) -> Result<GaussianExperiment> {
    let target = GaussianSplitTarget::ar1(cfg.dim, cfg.rho, cfg.split)?;
    let root = RandomStream::new(seed);
    let origin = vec![0.0; cfg.dim];

    let mut rng = root.substream(0);
    let gibbs = crate::chain::run_chain(&target.gibbs()?, origin.clone(), cfg.n, target.names(), &mut rng)?;

    let mut rng = root.substream(1);
    let y0 = vec![0.0; cfg.split];
    let accept = cfg.target_acceptance.unwrap_or_else(|| default_target_acceptance(cfg.split));
    let (sampler, adaptation) = target.tuned_linchpin(&y0, cfg.pilot, accept, cfg.proposal, &mut rng)?;
    let x0 = DVector::zeros(cfg.dim - cfg.split);
    let linchpin = sampler.run_chain((x0, y0), cfg.n, target.names(), &mut rng)?;

    Ok(GaussianExperiment {
        gibbs,
        linchpin,
        adaptation,
    })
}
