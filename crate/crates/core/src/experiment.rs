//! Config-driven runs: build the model, run samplers, write CSV traces and
//! JSON summaries, run the finite validators and dump enumerations.
//!
//! Replicate `i` draws from substream `i` of the configured seed, so
//! replicates are independent of each other and of the thread schedule.
//! `compare` splits each replicate stream once more, one child per sampler.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{run_chain, ChainOutput, Flatten};
use crate::config::{DataSource, ExperimentConfig, MarginalKernel, ModelConfig, ModelKind, SamplerKind};
use crate::diagnostics::{ChainSummary, ComponentSummary};
use crate::dist::RandomStream;
use crate::error::{Error, Result};
use crate::finite::{add_circulation, joint_transition_matrix, same_rate_check, x_independence, FiniteChainSpec};
use crate::kernels::{
    default_target_acceptance, tune_preconditioned, AdaptationReport, FiniteKernel, FiniteMh, FlipMh, FnTarget,
    RandomWalkMh, TargetDensity, TransitionKernel,
};
use crate::models::linear::{synth_linear, LinearModel, LinearModelData};
use crate::models::rosenbrock::RosenbrockTarget;
use crate::models::spike_slab::{synth_spike_slab, SpikeSlabData, SpikeSlabEnumeration, SpikeSlabModel};
use crate::models::table::Table;
use crate::models::var::{synth_var, VarData, VarHyper, VarLinchpin, VarModel};
use crate::models::GaussianSplitTarget;
use crate::sampler::{ConditionalSampler, LinchpinSampler};

enum BuiltModel {
    Rosenbrock(RosenbrockTarget, MarginalKernel),
    Gaussian(GaussianSplitTarget),
    Linear(LinearModel),
    SpikeSlab(SpikeSlabModel),
    Var(VarModel),
}

fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path)
        .map_err(|e| Error::domain(format!("cannot open data file {}: {e}", path.display())))?;
    Table::read(file)
}

/// Coefficients used for simulated VAR series.
fn var_truth(r: usize, p: usize, lags: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let a = DMatrix::from_fn(lags * r, r, |i, j| match (i < r, i == j) {
        (false, _) => 0.0,
        (true, true) => 0.5,
        (true, false) => 0.1,
    });
    let b = DMatrix::from_fn(p, r, |i, j| 1.0 - 0.5 * (i + j) as f64);
    let sigma = DMatrix::from_fn(r, r, |i, j| if i == j { 1.0 } else { 0.3 });
    (a, b, sigma)
}

fn build_model(model: &ModelConfig) -> Result<BuiltModel> {
    Ok(match model {
        ModelConfig::Rosenbrock { form, marginal } => BuiltModel::Rosenbrock(RosenbrockTarget::new(*form), *marginal),
        ModelConfig::Gaussian { rho, dim, split } => BuiltModel::Gaussian(GaussianSplitTarget::ar1(*dim, *rho, *split)?),
        ModelConfig::Linear { data, hyper } => {
            let data = match data {
                DataSource::File(path) => LinearModelData::from_table(&read_table(path)?, *hyper)?,
                DataSource::Synthetic(s) => synth_linear(
                    s.n_obs,
                    &DVector::from_vec(s.beta.clone()),
                    s.k,
                    s.lambda_e,
                    s.lambda_r,
                    *hyper,
                    s.data_seed,
                )?,
            };
            BuiltModel::Linear(LinearModel::new(data)?)
        }
        ModelConfig::SpikeSlab { data, hyper } => {
            let data = match data {
                DataSource::File(path) => SpikeSlabData::from_table(&read_table(path)?, *hyper)?,
                DataSource::Synthetic(s) => {
                    synth_spike_slab(s.n_obs, &DVector::from_vec(s.beta.clone()), s.sigma2, *hyper, s.data_seed)?
                }
            };
            BuiltModel::SpikeSlab(SpikeSlabModel::new(data))
        }
        ModelConfig::Var {
            data,
            lags,
            c_scale,
            d_scale,
            a,
        } => {
            let data = match data {
                DataSource::File(path) => VarData::from_table(&read_table(path)?, *lags)?,
                DataSource::Synthetic(s) => {
                    let (ta, tb, ts) = var_truth(s.r, s.p, *lags);
                    synth_var(s.k, *lags, &ta, &tb, &ts, s.data_seed)?
                }
            };
            let r = data.r();
            let mut hyper = VarHyper::default_for(r, *lags);
            hyper.c *= *c_scale;
            hyper.d *= *d_scale;
            hyper.a = a.unwrap_or(hyper.a);
            BuiltModel::Var(VarModel::new(data, hyper)?)
        }
    })
}

/// One recorded chain plus the pilot that tuned it, if any.
#[derive(Clone, Debug)]
pub struct SamplerRun {
    pub sampler: SamplerKind,
    pub chain: ChainOutput,
    pub adaptation: Option<AdaptationReport>,
}

/// A built model ready to run the samplers its config names.
pub struct Experiment {
    config: ExperimentConfig,
    model: BuiltModel,
}

impl Experiment {
    /// Builds the model, reading or simulating its data.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let model = build_model(&config.model)?;
        Ok(Self { config, model })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    /// Root stream of replicate `rep`.
    pub fn replicate_stream(&self, rep: usize) -> RandomStream {
        RandomStream::new(self.config.seed).substream(rep as u64)
    }

    /// Advance `burn_in` steps unrecorded, record the remaining steps,
    /// keep every `thin`-th row.
    fn record<K>(&self, kernel: &K, mut state: K::State, names: Vec<String>, rng: &mut RandomStream) -> Result<ChainOutput>
    where
        K: TransitionKernel,
        K::State: Flatten,
    {
        let cfg = &self.config;
        for _ in 0..cfg.burn_in {
            kernel.step(&mut state, rng)?;
        }
        let mut out = run_chain(kernel, state, cfg.n - cfg.burn_in, names, rng)?.thin(cfg.thin)?;
        out.offset_iterations(cfg.burn_in);
        Ok(out)
    }

    /// Like [`record`](Self::record), but burn-in moves only `Y` and thinned
    /// runs defer the `X` draws until after thinning.
    fn record_linchpin<K, C>(
        &self,
        sampler: &LinchpinSampler<K, C>,
        init: (C::X, K::State),
        names: Vec<String>,
        rng: &mut RandomStream,
    ) -> Result<ChainOutput>
    where
        K: TransitionKernel,
        C: ConditionalSampler<Y = K::State>,
        C::X: Flatten,
        K::State: Flatten,
    {
        let cfg = &self.config;
        let (x, mut y) = init;
        sampler.conditional().check_y(&y)?;
        for _ in 0..cfg.burn_in {
            sampler.kernel().step(&mut y, rng)?;
        }
        let kept = cfg.n - cfg.burn_in;
        let mut out = if cfg.thin == 1 {
            sampler.run_chain((x, y), kept, names, rng)?
        } else {
            sampler.run_marginal_then_fill(y, kept, cfg.thin, names, rng)?
        };
        out.offset_iterations(cfg.burn_in);
        Ok(out)
    }

    /// A fixed-scale kernel, or one tuned by a pilot from `start`. Isotropic
    /// pilots leave the chain start at `start`; preconditioned pilots hand
    /// over their final state.
    fn rw_kernel<T: TargetDensity + Clone>(
        &self,
        target: T,
        start: Vec<f64>,
        rng: &mut RandomStream,
    ) -> Result<(RandomWalkMh<T>, Option<AdaptationReport>, Vec<f64>)> {
        let t = &self.config.tuning;
        if let Some(h) = t.scale {
            return Ok((RandomWalkMh::new(target, h, t.proposal)?, None, start));
        }
        let accept = t.target_acceptance.unwrap_or_else(|| default_target_acceptance(target.dim()));
        if t.precondition {
            let (kernel, report) = tune_preconditioned(target, &start, t.pilot, accept, rng)?;
            let next = report.final_state.clone();
            return Ok((kernel, Some(report), next));
        }
        let (kernel, report) = RandomWalkMh::new(target, 1.0, t.proposal)?.tune(&start, t.pilot, accept, rng)?;
        Ok((kernel, Some(report), start))
    }

    fn unsupported(&self, sampler: SamplerKind) -> Error {
        Error::Unsupported {
            model: self.config.model.kind().as_str().into(),
            sampler: sampler.as_str().into(),
        }
    }

    /// Run one sampler on the model with the given stream.
    pub fn run_sampler(&self, sampler: SamplerKind, rng: &mut RandomStream) -> Result<SamplerRun> {
        use SamplerKind::*;
        let mut adaptation = None;
        let chain = match (&self.model, sampler) {
            (BuiltModel::Rosenbrock(target, marginal), Linchpin) => {
                let names = vec!["x".to_string(), "y".to_string()];
                match marginal {
                    MarginalKernel::Exact => {
                        let s = LinchpinSampler::new(target.exact_marginal_kernel(), target.conditional());
                        self.record_linchpin(&s, (0.0, vec![0.0]), names, rng)?
                    }
                    MarginalKernel::RwMh => {
                        let (kernel, report, y0) = self.rw_kernel(target.marginal_target(), vec![0.0], rng)?;
                        adaptation = report;
                        let s = LinchpinSampler::new(kernel, target.conditional());
                        self.record_linchpin(&s, (0.0, y0), names, rng)?
                    }
                }
            }
            (BuiltModel::Rosenbrock(target, _), JointMh) => {
                let (kernel, report, start) = self.rw_kernel(target.joint_target(), vec![0.0, 0.0], rng)?;
                adaptation = report;
                self.record(&kernel, start, vec!["x".into(), "y".into()], rng)?
            }
            (BuiltModel::Gaussian(target), Gibbs) => {
                self.record(&target.gibbs()?, vec![0.0; target.dim()], target.names(), rng)?
            }
            (BuiltModel::Gaussian(target), Linchpin) => {
                let (kernel, report, y0) = self.rw_kernel(target.marginal().clone(), vec![0.0; target.split()], rng)?;
                adaptation = report;
                let s = LinchpinSampler::new(kernel, target.conditional());
                let x0 = DVector::zeros(target.dim() - target.split());
                self.record_linchpin(&s, (x0, y0), target.names(), rng)?
            }
            (BuiltModel::Gaussian(target), JointMh) => {
                let (kernel, report, start) = self.rw_kernel(target.joint().clone(), vec![0.0; target.dim()], rng)?;
                adaptation = report;
                self.record(&kernel, start, target.names(), rng)?
            }
            (BuiltModel::Linear(model), Linchpin) => {
                let (kernel, report, y0) = self.rw_kernel(model.log_lambda_target(), vec![0.0, 0.0], rng)?;
                adaptation = report;
                let s = LinchpinSampler::new(kernel, model.conditional());
                let x0 = DVector::zeros(model.p() + model.k());
                self.record_linchpin(&s, (x0, y0), model.names(), rng)?
            }
            (BuiltModel::Linear(model), JointMh) => {
                let m = model.p() + model.k();
                let target = FnTarget::new(m + 2, |v: &[f64]| {
                    let xi = DVector::from_column_slice(&v[..m]);
                    model.log_joint(&xi, v[m].exp(), v[m + 1].exp()) + v[m] + v[m + 1]
                });
                let mut start: Vec<f64> = model.conditional_mean(1.0, 1.0)?.iter().copied().collect();
                start.extend([0.0, 0.0]);
                let (kernel, report, start) = self.rw_kernel(target, start, rng)?;
                adaptation = report;
                self.record(&kernel, start, model.names(), rng)?
            }
            (BuiltModel::SpikeSlab(model), Linchpin) => {
                let s = LinchpinSampler::new(FlipMh::new(model)?, model.conditional());
                let p = model.p();
                self.record_linchpin(&s, ((DVector::zeros(p), 1.0), vec![false; p]), model.names(), rng)?
            }
            (BuiltModel::Var(model), CollapsedGibbs) => {
                let start = model.least_squares_start()?;
                self.record(&model.collapsed_kernel()?, start, model.names(), rng)?
            }
            (BuiltModel::Var(model), Linchpin) => {
                let start = model.least_squares_start()?;
                let init = (
                    start.b,
                    VarLinchpin {
                        a: start.a,
                        sigma: start.sigma,
                    },
                );
                self.record_linchpin(&model.collapsed_sampler()?, init, model.names(), rng)?
            }
            (BuiltModel::Var(model), JointMh) => {
                let target = model.joint_target();
                let theta0 = target.to_theta(&model.least_squares_start()?)?;
                let (kernel, report, start) = self.rw_kernel(target, theta0, rng)?;
                adaptation = report;
                let raw = self.record(&kernel, start, (0..target.dim()).map(|i| format!("theta{i}")).collect(), rng)?;
                raw.map_states(model.names(), |theta| target.to_params(theta).flatten())?
            }
            (_, other) => return Err(self.unsupported(other)),
        };
        Ok(SamplerRun {
            sampler,
            chain,
            adaptation,
        })
    }

    /// The configured sampler on replicate `rep`.
    pub fn run_replicate(&self, rep: usize) -> Result<SamplerRun> {
        self.run_sampler(self.config.sampler, &mut self.replicate_stream(rep))
    }

    /// The configured pair of samplers on replicate `rep`.
    pub fn compare_replicate(&self, rep: usize) -> Result<(SamplerRun, SamplerRun)> {
        let second = self.second_sampler()?;
        let root = self.replicate_stream(rep);
        let a = self.run_sampler(self.config.sampler, &mut root.substream(0))?;
        let b = self.run_sampler(second, &mut root.substream(1))?;
        Ok((a, b))
    }

    /// `compare`, or else the first other sampler the model supports.
    pub fn second_sampler(&self) -> Result<SamplerKind> {
        let kind = self.config.model.kind();
        self.config
            .compare
            .or_else(|| kind.samplers().iter().copied().find(|s| *s != self.config.sampler))
            .ok_or_else(|| Error::Config {
                key: "compare".into(),
                line: 0,
                message: format!("model {} has a single sampler, nothing to compare", kind.as_str()),
            })
    }

    fn stem(&self, label: &str, rep: usize) -> String {
        let base = format!("{}_{label}", self.config.prefix());
        if self.config.replicates > 1 {
            format!("{base}_rep{rep}")
        } else {
            base
        }
    }

    fn summary(&self, run: &SamplerRun, rep: usize) -> Result<RunSummary> {
        let stats = ChainSummary::from_chain(&run.chain)?;
        Ok(RunSummary {
            model: self.config.model.kind().as_str().into(),
            sampler: run.sampler.as_str().into(),
            kernel: run.chain.kernel.clone(),
            seed: self.config.seed,
            replicate: rep,
            stream_seed: run.chain.seed,
            n: self.config.n,
            burn_in: self.config.burn_in,
            thin: self.config.thin,
            rows: run.chain.len(),
            conditional_draws: run.chain.conditional_draws,
            acceptance_rate: stats.acceptance_rate,
            runtime_seconds: run.chain.duration.as_secs_f64(),
            adaptation: run.adaptation.clone(),
            components: stats.components,
            config: self.config.to_text(),
        })
    }

    fn write_run(&self, run: &SamplerRun, rep: usize, written: &mut Vec<PathBuf>) -> Result<RunSummary> {
        let stem = self.stem(run.sampler.as_str(), rep);
        let csv = self.config.output.dir.join(format!("{stem}.csv"));
        run.chain.write_csv(BufWriter::new(File::create(&csv)?))?;
        let summary = self.summary(run, rep)?;
        let json = self.config.output.dir.join(format!("{stem}.json"));
        write_json(&json, &summary)?;
        written.extend([csv, json]);
        Ok(summary)
    }

    /// `run`: every replicate of the configured sampler, in parallel.
    pub fn run(&self) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.config.output.dir)?;
        let runs: Vec<SamplerRun> = (0..self.config.replicates)
            .into_par_iter()
            .map(|rep| self.run_replicate(rep))
            .collect::<Result<_>>()?;
        let mut written = Vec::new();
        for (rep, run) in runs.iter().enumerate() {
            self.write_run(run, rep, &mut written)?;
        }
        Ok(written)
    }

    /// `compare`: both samplers per replicate plus a comparison summary.
    pub fn compare(&self) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(&self.config.output.dir)?;
        let pairs: Vec<(SamplerRun, SamplerRun)> = (0..self.config.replicates)
            .into_par_iter()
            .map(|rep| self.compare_replicate(rep))
            .collect::<Result<_>>()?;
        let mut written = Vec::new();
        for (rep, (a, b)) in pairs.iter().enumerate() {
            let sa = self.write_run(a, rep, &mut written)?;
            let sb = self.write_run(b, rep, &mut written)?;
            let cmp = ComparisonSummary::new(&sa, &sb, self.config.to_text());
            let path = self.config.output.dir.join(format!("{}.json", self.stem("compare", rep)));
            write_json(&path, &cmp)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    use std::io::Write;
    writeln!(w)?;
    Ok(())
}

/// Contents of a run's JSON summary.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub model: String,
    pub sampler: String,
    pub kernel: String,
    pub seed: u64,
    pub replicate: usize,
    pub stream_seed: u64,
    pub n: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub rows: usize,
    pub conditional_draws: usize,
    pub acceptance_rate: f64,
    pub runtime_seconds: f64,
    pub adaptation: Option<AdaptationReport>,
    pub components: Vec<ComponentSummary>,
    /// Canonical config text; re-running it reproduces the CSV.
    pub config: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentComparison {
    pub name: String,
    /// `mean(second) − mean(first)`.
    pub mean_difference: f64,
    /// `√(MCSE₁² + MCSE₂²)`.
    pub combined_mcse: Option<f64>,
    /// `ESS(second) / ESS(first)`.
    pub ess_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonSummary {
    pub first: String,
    pub second: String,
    pub replicate: usize,
    pub components: Vec<ComponentComparison>,
    pub config: String,
}

impl ComparisonSummary {
    fn new(a: &RunSummary, b: &RunSummary, config: String) -> Self {
        let components = a
            .components
            .iter()
            .filter_map(|ca| {
                let cb = b.components.iter().find(|c| c.name == ca.name)?;
                Some(ComponentComparison {
                    name: ca.name.clone(),
                    mean_difference: cb.mean - ca.mean,
                    combined_mcse: ca.mcse.zip(cb.mcse).map(|(x, y)| x.hypot(y)),
                    ess_ratio: ca.ess.zip(cb.ess).map(|(x, y)| y / x),
                })
            })
            .collect();
        Self {
            first: a.sampler.clone(),
            second: b.sampler.clone(),
            replicate: a.replicate,
            components,
            config,
        }
    }
}

/// Exact-matrix checks on a finite instance.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub instance: String,
    pub states: usize,
    pub tolerance: f64,
    /// `‖fᵀK − fᵀ‖∞` for the marginal kernel.
    pub marginal_invariance: f64,
    pub marginal_detailed_balance: f64,
    pub joint_invariance: Option<f64>,
    pub joint_detailed_balance: Option<f64>,
    /// Marginal and joint kernels are either both reversible or both not.
    pub reversibility_agrees: Option<bool>,
    /// `max |TV_joint − TV_marginal|` over steps and matched starts.
    pub same_rate_discrepancy: Option<f64>,
    /// Largest effect of the starting `x` on joint rows or TV curves.
    pub start_x_dependence: Option<f64>,
    /// Marginal TV distance from the first state after `1..=steps` steps.
    pub tv_curve: Vec<f64>,
    /// Strict decrease while the distance exceeds the tolerance.
    pub tv_strictly_decreasing: bool,
    pub passed: bool,
    pub config: String,
}

fn strictly_decreasing(tv: &[f64], floor: f64) -> bool {
    tv.windows(2).all(|w| w[0] <= floor || w[1] < w[0])
}

fn lazy(p: &DMatrix<f64>) -> DMatrix<f64> {
    (DMatrix::identity(p.nrows(), p.ncols()) + p) * 0.5
}

/// Run the finite validators for the configured model: the discretized
/// Rosenbrock joint (optionally with a non-reversible marginal kernel) or
/// the spike-and-slab indicator chain.
pub fn run_validators(config: &ExperimentConfig) -> Result<ValidationReport> {
    let v = &config.validate;
    let tol = v.tolerance;
    match &config.model {
        ModelConfig::Rosenbrock { form, .. } => {
            let grid = RosenbrockTarget::new(*form).validation_grid()?;
            let target = &grid.target;
            let mut kernel = FiniteMh::neighbor_walk(target.ln_marginal())?.transition_matrix()?;
            if v.nonreversible {
                kernel = add_circulation(&lazy(&kernel), target.marginal(), [0, 1, 2])?;
            }
            let marginal = target.marginal_spec(&kernel)?;
            let joint = joint_transition_matrix(target, &kernel)?;
            let layout = target.layout();
            let same = same_rate_check(&joint, layout, &marginal, v.steps)?;
            let (m_inv, m_db) = (marginal.check_invariance(), marginal.check_detailed_balance());
            let (j_inv, j_db) = (joint.check_invariance(), joint.check_detailed_balance());
            let agrees = (m_db <= tol) == (j_db <= tol);
            let x_dep = same.max_start_x_dependence.max(x_independence(&joint, layout));
            let tv = marginal.tv_curve(0, v.steps)?;
            let reversible_ok = if v.nonreversible { m_db > tol } else { m_db <= tol };
            let passed = m_inv <= tol
                && j_inv <= tol
                && agrees
                && reversible_ok
                && same.max_discrepancy <= tol
                && x_dep <= tol;
            Ok(ValidationReport {
                instance: format!(
                    "rosenbrock-grid-{}x{}{}",
                    layout.nx,
                    layout.ny,
                    if v.nonreversible { "-nonreversible" } else { "" }
                ),
                states: layout.len(),
                tolerance: tol,
                marginal_invariance: m_inv,
                marginal_detailed_balance: m_db,
                joint_invariance: Some(j_inv),
                joint_detailed_balance: Some(j_db),
                reversibility_agrees: Some(agrees),
                same_rate_discrepancy: Some(same.max_discrepancy),
                start_x_dependence: Some(x_dep),
                tv_strictly_decreasing: strictly_decreasing(&tv, tol),
                tv_curve: tv,
                passed,
                config: config.to_text(),
            })
        }
        ModelConfig::SpikeSlab { .. } => {
            if v.nonreversible {
                return Err(Error::Config {
                    key: "validate.nonreversible".into(),
                    line: 0,
                    message: "only the rosenbrock grid has a non-reversible variant".into(),
                });
            }
            let BuiltModel::SpikeSlab(model) = build_model(&config.model)? else {
                unreachable!("spike-slab config builds a spike-slab model")
            };
            let enumeration = model.enumerate()?;
            let kernel = FlipMh::new(&model)?.transition_matrix()?;
            let spec = FiniteChainSpec::unlabeled(DVector::from_vec(enumeration.probabilities.clone()), kernel)?;
            let (inv, db) = (spec.check_invariance(), spec.check_detailed_balance());
            let tv = spec.tv_curve(0, v.steps)?;
            let decreasing = strictly_decreasing(&tv, tol);
            Ok(ValidationReport {
                instance: format!("spike-slab-p{}", model.p()),
                states: spec.num_states(),
                tolerance: tol,
                marginal_invariance: inv,
                marginal_detailed_balance: db,
                joint_invariance: None,
                joint_detailed_balance: None,
                reversibility_agrees: None,
                same_rate_discrepancy: None,
                start_x_dependence: None,
                tv_curve: tv,
                tv_strictly_decreasing: decreasing,
                passed: inv <= tol && db <= tol && decreasing,
                config: config.to_text(),
            })
        }
        other => Err(Error::Config {
            key: "model".into(),
            line: 0,
            message: format!("no finite validator for model {}", other.kind().as_str()),
        }),
    }
}

/// `validate`: write `<prefix>_validation.json` and return the report.
pub fn write_validation(config: &ExperimentConfig) -> Result<(ValidationReport, PathBuf)> {
    let report = run_validators(config)?;
    fs::create_dir_all(&config.output.dir)?;
    let path = config.output.dir.join(format!("{}_validation.json", config.prefix()));
    write_json(&path, &report)?;
    Ok((report, path))
}

#[derive(Serialize)]
struct EnumerationFile<'a> {
    #[serde(flatten)]
    enumeration: &'a SpikeSlabEnumeration,
    config: String,
}

/// `enumerate`: exact spike-and-slab posterior over all `2^p` indicator
/// vectors, written as `<prefix>_enumeration.csv` and `.json`.
pub fn write_enumeration(config: &ExperimentConfig) -> Result<(SpikeSlabEnumeration, Vec<PathBuf>)> {
    if config.model.kind() != ModelKind::SpikeSlab {
        return Err(Error::Config {
            key: "model".into(),
            line: 0,
            message: "enumeration needs model = spike-slab".into(),
        });
    }
    let BuiltModel::SpikeSlab(model) = build_model(&config.model)? else {
        unreachable!("spike-slab config builds a spike-slab model")
    };
    let enumeration = model.enumerate()?;
    fs::create_dir_all(&config.output.dir)?;
    let stem = format!("{}_enumeration", config.prefix());
    let csv = config.output.dir.join(format!("{stem}.csv"));
    enumeration.to_table()?.write(BufWriter::new(File::create(&csv)?))?;
    let json = config.output.dir.join(format!("{stem}.json"));
    write_json(
        &json,
        &EnumerationFile {
            enumeration: &enumeration,
            config: config.to_text(),
        },
    )?;
    Ok((enumeration, vec![csv, json]))
}
