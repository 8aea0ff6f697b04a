//! Experiment configuration: a flat `key = value` text format.
//!
//! ```text
//! # comments run to the end of the line
//! model = gaussian
//! sampler = linchpin
//! n = 5000
//! model.rho = 0.99
//! ```
//!
//! Keys are case sensitive. Values are integers, reals, booleans
//! (`true`/`false`), bare words, or comma-separated real lists. A key may
//! appear once. Parameters of the chosen model use the `model.` prefix;
//! keys that the chosen model or data source does not read are rejected.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::chain::format_real;
use crate::error::{Error, Result};
use crate::kernels::Proposal;
use crate::models::linear::LinearModelHyper;
use crate::models::rosenbrock::RosenbrockForm;
use crate::models::spike_slab::SpikeSlabHyper;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Rosenbrock,
    Gaussian,
    Linear,
    SpikeSlab,
    Var,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Rosenbrock => "rosenbrock",
            ModelKind::Gaussian => "gaussian",
            ModelKind::Linear => "linear",
            ModelKind::SpikeSlab => "spike-slab",
            ModelKind::Var => "var",
        }
    }

    /// Samplers registered for this model; the first is the default.
    pub fn samplers(&self) -> &'static [SamplerKind] {
        use SamplerKind::*;
        match self {
            ModelKind::Rosenbrock => &[Linchpin, JointMh],
            ModelKind::Gaussian => &[Linchpin, Gibbs, JointMh],
            ModelKind::Linear => &[Linchpin, JointMh],
            ModelKind::SpikeSlab => &[Linchpin],
            ModelKind::Var => &[CollapsedGibbs, Linchpin, JointMh],
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rosenbrock" => Ok(ModelKind::Rosenbrock),
            "gaussian" => Ok(ModelKind::Gaussian),
            "linear" => Ok(ModelKind::Linear),
            "spike-slab" => Ok(ModelKind::SpikeSlab),
            "var" => Ok(ModelKind::Var),
            _ => Err("expected rosenbrock, gaussian, linear, spike-slab or var".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    Gibbs,
    Linchpin,
    JointMh,
    CollapsedGibbs,
}

impl SamplerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SamplerKind::Gibbs => "gibbs",
            SamplerKind::Linchpin => "linchpin",
            SamplerKind::JointMh => "joint-mh",
            SamplerKind::CollapsedGibbs => "collapsed-gibbs",
        }
    }
}

impl FromStr for SamplerKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gibbs" => Ok(SamplerKind::Gibbs),
            "linchpin" => Ok(SamplerKind::Linchpin),
            "joint-mh" => Ok(SamplerKind::JointMh),
            "collapsed-gibbs" => Ok(SamplerKind::CollapsedGibbs),
            _ => Err("expected gibbs, linchpin, joint-mh or collapsed-gibbs".into()),
        }
    }
}

/// How the Rosenbrock `Y` chain moves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginalKernel {
    RwMh,
    /// Independent exact draws from the `N(1, 10)` marginal.
    Exact,
}

impl FromStr for MarginalKernel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rw-mh" => Ok(MarginalKernel::RwMh),
            "exact" => Ok(MarginalKernel::Exact),
            _ => Err("expected rw-mh or exact".into()),
        }
    }
}

impl MarginalKernel {
    pub fn as_str(&self) -> &'static str {
        match self {
            MarginalKernel::RwMh => "rw-mh",
            MarginalKernel::Exact => "exact",
        }
    }
}

/// Read a CSV dataset or simulate one.
#[derive(Clone, Debug, PartialEq)]
pub enum DataSource<S> {
    File(PathBuf),
    Synthetic(S),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSynth {
    pub n_obs: usize,
    pub beta: Vec<f64>,
    pub k: usize,
    pub lambda_e: f64,
    pub lambda_r: f64,
    pub data_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpikeSlabSynth {
    pub n_obs: usize,
    pub beta: Vec<f64>,
    pub sigma2: f64,
    pub data_seed: u64,
}

/// Simulated VAR series. Coefficients are fixed: `A_1` has 0.5 on the
/// diagonal and 0.1 elsewhere, later lags are zero, `B[i, j] = 1 − (i + j)/2`,
/// and `Σ` has unit variances with correlation 0.3.
#[derive(Clone, Debug, PartialEq)]
pub struct VarSynth {
    pub k: usize,
    pub r: usize,
    pub p: usize,
    pub data_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelConfig {
    Rosenbrock {
        form: RosenbrockForm,
        marginal: MarginalKernel,
    },
    Gaussian {
        rho: f64,
        dim: usize,
        split: usize,
    },
    Linear {
        data: DataSource<LinearSynth>,
        hyper: LinearModelHyper,
    },
    SpikeSlab {
        data: DataSource<SpikeSlabSynth>,
        hyper: SpikeSlabHyper,
    },
    Var {
        data: DataSource<VarSynth>,
        lags: usize,
        /// `C = c_scale · I`.
        c_scale: f64,
        /// `D = d_scale · I`.
        d_scale: f64,
        /// Defaults to `r + 2` once `r` is known.
        a: Option<f64>,
    },
}

impl ModelConfig {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Rosenbrock { .. } => ModelKind::Rosenbrock,
            ModelConfig::Gaussian { .. } => ModelKind::Gaussian,
            ModelConfig::Linear { .. } => ModelKind::Linear,
            ModelConfig::SpikeSlab { .. } => ModelKind::SpikeSlab,
            ModelConfig::Var { .. } => ModelKind::Var,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuningConfig {
    pub proposal: Proposal,
    /// Fixed RW-MH scale; when absent the scale is tuned by a pilot run.
    pub scale: Option<f64>,
    pub pilot: usize,
    pub target_acceptance: Option<f64>,
    /// Shape Gaussian proposals by a pilot covariance estimate.
    pub precondition: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidateConfig {
    /// Add a circulation to the marginal kernel so it is invariant but not reversible.
    pub nonreversible: bool,
    pub steps: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub prefix: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub sampler: SamplerKind,
    /// Second sampler for `compare`.
    pub compare: Option<SamplerKind>,
    /// Total chain length including burn-in.
    pub n: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub replicates: usize,
    pub tuning: TuningConfig,
    pub validate: ValidateConfig,
    pub output: OutputConfig,
}

struct Entry {
    value: String,
    line: usize,
}

/// Tracks which keys were read so leftovers can be reported as unknown.
struct Reader {
    entries: BTreeMap<String, Entry>,
    used: BTreeSet<String>,
}

fn config_error(key: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        line,
        message: message.into(),
    }
}

impl Reader {
    fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(config_error(content, line, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) {
                return Err(config_error(key, line, "keys use letters, digits, `.`, `_` and `-`"));
            }
            if value.is_empty() {
                return Err(config_error(key, line, "missing value"));
            }
            if let Some(prev) = entries.get(key) {
                let Entry { line: first, .. } = prev;
                return Err(config_error(key, line, format!("duplicate key (first set on line {first})")));
            }
            entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    line,
                },
            );
        }
        Ok(Self {
            entries,
            used: BTreeSet::new(),
        })
    }

    fn line(&self, key: &str) -> usize {
        self.entries.get(key).map_or(0, |e| e.line)
    }

    fn error(&self, key: &str, message: impl Into<String>) -> Error {
        config_error(key, self.line(key), message)
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn opt<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some(entry) = self.entries.get(key) else {
            return Ok(None);
        };
        self.used.insert(key.to_string());
        entry
            .value
            .parse::<T>()
            .map(Some)
            .map_err(|e| config_error(key, entry.line, format!("cannot parse {:?}: {e}", entry.value)))
    }

    fn get<T: FromStr>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.opt(key)?.unwrap_or(default))
    }

    fn list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let Some(raw) = self.opt::<String>(key)? else {
            return Ok(default.to_vec());
        };
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| self.error(key, format!("{:?} is not a real number", s.trim())))
            })
            .collect()
    }

    fn finish(self) -> Result<()> {
        match self.entries.iter().find(|(k, _)| !self.used.contains(*k)) {
            Some((key, e)) => Err(config_error(key, e.line, "unknown key")),
            None => Ok(()),
        }
    }
}

const DEFAULT_SPIKE_SLAB_BETA: [f64; 8] = [1.5, 0.0, 0.0, -1.0, 0.0, 0.0, 0.8, 0.0];

fn parse_model(r: &mut Reader, kind: ModelKind) -> Result<ModelConfig> {
    Ok(match kind {
        ModelKind::Rosenbrock => {
            let form = match r.opt::<String>("model.form")? {
                None => RosenbrockForm::default(),
                Some(s) => RosenbrockForm::parse(&s)
                    .ok_or_else(|| r.error("model.form", "expected banana or linear"))?,
            };
            ModelConfig::Rosenbrock {
                form,
                marginal: r.get("model.marginal", MarginalKernel::RwMh)?,
            }
        }
        ModelKind::Gaussian => {
            let cfg = ModelConfig::Gaussian {
                rho: r.get("model.rho", 0.99)?,
                dim: r.get("model.dim", 5)?,
                split: r.get("model.split", 1)?,
            };
            if let ModelConfig::Gaussian { rho, dim, split } = cfg {
                if !(rho.abs() < 1.0) {
                    return Err(r.error("model.rho", "correlation must lie in (−1, 1)"));
                }
                if split == 0 || split >= dim {
                    return Err(r.error("model.split", format!("need 0 < split < dim = {dim}")));
                }
            }
            cfg
        }
        ModelKind::Linear => {
            let data = match r.opt::<PathBuf>("model.data")? {
                Some(path) => DataSource::File(path),
                None => DataSource::Synthetic(LinearSynth {
                    n_obs: r.get("model.n_obs", 10)?,
                    beta: r.list("model.beta", &[1.0])?,
                    k: r.get("model.k", 2)?,
                    lambda_e: r.get("model.lambda_e", 1.0)?,
                    lambda_r: r.get("model.lambda_r", 1.0)?,
                    data_seed: r.get("model.data_seed", 1)?,
                }),
            };
            let d = LinearModelHyper::default();
            let hyper = LinearModelHyper {
                e1: r.get("model.e1", d.e1)?,
                e2: r.get("model.e2", d.e2)?,
                r1: r.get("model.r1", d.r1)?,
                r2: r.get("model.r2", d.r2)?,
            };
            ModelConfig::Linear { data, hyper }
        }
        ModelKind::SpikeSlab => {
            let data = match r.opt::<PathBuf>("model.data")? {
                Some(path) => DataSource::File(path),
                None => DataSource::Synthetic(SpikeSlabSynth {
                    n_obs: r.get("model.n_obs", 30)?,
                    beta: r.list("model.beta", &DEFAULT_SPIKE_SLAB_BETA)?,
                    sigma2: r.get("model.sigma2", 1.0)?,
                    data_seed: r.get("model.data_seed", 1)?,
                }),
            };
            let d = SpikeSlabHyper::default();
            let hyper = SpikeSlabHyper {
                tau0_sq: r.get("model.tau0_sq", d.tau0_sq)?,
                tau1_sq: r.get("model.tau1_sq", d.tau1_sq)?,
                q: r.get("model.q", d.q)?,
                alpha1: r.get("model.alpha1", d.alpha1)?,
                alpha2: r.get("model.alpha2", d.alpha2)?,
            };
            ModelConfig::SpikeSlab { data, hyper }
        }
        ModelKind::Var => {
            let data = match r.opt::<PathBuf>("model.data")? {
                Some(path) => DataSource::File(path),
                None => DataSource::Synthetic(VarSynth {
                    k: r.get("model.k", 50)?,
                    r: r.get("model.r", 2)?,
                    p: r.get("model.p", 2)?,
                    data_seed: r.get("model.data_seed", 1)?,
                }),
            };
            let cfg = ModelConfig::Var {
                data,
                lags: r.get("model.lags", 1)?,
                c_scale: r.get("model.c_scale", 1.0)?,
                d_scale: r.get("model.d_scale", 1.0)?,
                a: r.opt("model.a")?,
            };
            if let ModelConfig::Var { lags, c_scale, d_scale, .. } = &cfg {
                if *lags == 0 {
                    return Err(r.error("model.lags", "need at least one lag"));
                }
                for (key, v) in [("model.c_scale", c_scale), ("model.d_scale", d_scale)] {
                    if !(*v > 0.0) {
                        return Err(r.error(key, "must be positive"));
                    }
                }
            }
            cfg
        }
    })
}

/// Parse and validate a configuration document, filling defaults.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::parse(text)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Reader::parse(text)?;
        if !r.has("model") {
            return Err(config_error("model", 0, "required key is missing"));
        }
        let kind: ModelKind = r.get("model", ModelKind::Rosenbrock)?;
        let model = parse_model(&mut r, kind)?;
        let sampler = r.get("sampler", kind.samplers()[0])?;
        let compare: Option<SamplerKind> = r.opt("compare")?;
        for s in std::iter::once(sampler).chain(compare) {
            if !kind.samplers().contains(&s) {
                return Err(Error::Unsupported {
                    model: kind.as_str().into(),
                    sampler: s.as_str().into(),
                });
            }
        }
        let n: usize = r.get("n", 1000)?;
        let burn_in: usize = r.get("burn_in", 0)?;
        let thin: usize = r.get("thin", 1)?;
        let seed: u64 = r.get("seed", 0)?;
        let replicates: usize = r.get("replicates", 1)?;
        if n == 0 {
            return Err(r.error("n", "chain length must be positive"));
        }
        if burn_in >= n {
            return Err(r.error("burn_in", format!("must be smaller than n = {n}")));
        }
        if thin == 0 {
            return Err(r.error("thin", "must be at least 1"));
        }
        if replicates == 0 {
            return Err(r.error("replicates", "must be at least 1"));
        }

        let proposal = match r.opt::<String>("proposal")? {
            None => Proposal::Uniform,
            Some(s) => Proposal::parse(&s).ok_or_else(|| r.error("proposal", "expected uniform or gaussian"))?,
        };
        let tuning = TuningConfig {
            proposal,
            scale: r.opt("scale")?,
            pilot: r.get("pilot", 1000)?,
            target_acceptance: r.opt("target_acceptance")?,
            precondition: r.get("precondition", false)?,
        };
        if let Some(h) = tuning.scale {
            if !(h > 0.0 && h.is_finite()) {
                return Err(r.error("scale", "must be positive"));
            }
        }
        if tuning.pilot < 100 {
            return Err(r.error("pilot", "pilot runs need at least 100 steps"));
        }
        if let Some(t) = tuning.target_acceptance {
            if !(t > 0.0 && t < 1.0) {
                return Err(r.error("target_acceptance", "must lie in (0, 1)"));
            }
        }
        if tuning.precondition && tuning.proposal != Proposal::Gaussian {
            return Err(r.error("precondition", "needs proposal = gaussian"));
        }
        if tuning.precondition && tuning.scale.is_some() {
            return Err(r.error("precondition", "needs a tuned scale, remove `scale`"));
        }

        let validate = ValidateConfig {
            nonreversible: r.get("validate.nonreversible", false)?,
            steps: r.get("validate.steps", 25)?,
            tolerance: r.get("validate.tolerance", 1e-12)?,
        };
        if validate.steps == 0 {
            return Err(r.error("validate.steps", "must be at least 1"));
        }
        if !(validate.tolerance > 0.0) {
            return Err(r.error("validate.tolerance", "must be positive"));
        }
        let output = OutputConfig {
            dir: r.get("output.dir", PathBuf::from("."))?,
            prefix: r.opt("output.prefix")?,
        };
        r.finish()?;
        Ok(Self {
            model,
            sampler,
            compare,
            n,
            burn_in,
            thin,
            seed,
            replicates,
            tuning,
            validate,
            output,
        })
    }

    /// File name stem for outputs.
    pub fn prefix(&self) -> String {
        self.output
            .prefix
            .clone()
            .unwrap_or_else(|| self.model.kind().as_str().to_string())
    }

    /// Canonical text with every key spelled out; parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        let list = |v: &[f64]| v.iter().map(|x| format_real(*x)).collect::<Vec<_>>().join(",");
        put("model", self.model.kind().as_str().into());
        match &self.model {
            ModelConfig::Rosenbrock { form, marginal } => {
                put("model.form", form.as_str().into());
                put("model.marginal", marginal.as_str().into());
            }
            ModelConfig::Gaussian { rho, dim, split } => {
                put("model.rho", format_real(*rho));
                put("model.dim", dim.to_string());
                put("model.split", split.to_string());
            }
            ModelConfig::Linear { data, hyper } => {
                match data {
                    DataSource::File(p) => put("model.data", p.display().to_string()),
                    DataSource::Synthetic(d) => {
                        put("model.n_obs", d.n_obs.to_string());
                        put("model.beta", list(&d.beta));
                        put("model.k", d.k.to_string());
                        put("model.lambda_e", format_real(d.lambda_e));
                        put("model.lambda_r", format_real(d.lambda_r));
                        put("model.data_seed", d.data_seed.to_string());
                    }
                }
                put("model.e1", format_real(hyper.e1));
                put("model.e2", format_real(hyper.e2));
                put("model.r1", format_real(hyper.r1));
                put("model.r2", format_real(hyper.r2));
            }
            ModelConfig::SpikeSlab { data, hyper } => {
                match data {
                    DataSource::File(p) => put("model.data", p.display().to_string()),
                    DataSource::Synthetic(d) => {
                        put("model.n_obs", d.n_obs.to_string());
                        put("model.beta", list(&d.beta));
                        put("model.sigma2", format_real(d.sigma2));
                        put("model.data_seed", d.data_seed.to_string());
                    }
                }
                put("model.tau0_sq", format_real(hyper.tau0_sq));
                put("model.tau1_sq", format_real(hyper.tau1_sq));
                put("model.q", format_real(hyper.q));
                put("model.alpha1", format_real(hyper.alpha1));
                put("model.alpha2", format_real(hyper.alpha2));
            }
            ModelConfig::Var {
                data,
                lags,
                c_scale,
                d_scale,
                a,
            } => {
                match data {
                    DataSource::File(p) => put("model.data", p.display().to_string()),
                    DataSource::Synthetic(d) => {
                        put("model.k", d.k.to_string());
                        put("model.r", d.r.to_string());
                        put("model.p", d.p.to_string());
                        put("model.data_seed", d.data_seed.to_string());
                    }
                }
                put("model.lags", lags.to_string());
                put("model.c_scale", format_real(*c_scale));
                put("model.d_scale", format_real(*d_scale));
                if let Some(a) = a {
                    put("model.a", format_real(*a));
                }
            }
        }
        put("sampler", self.sampler.as_str().into());
        if let Some(c) = self.compare {
            put("compare", c.as_str().into());
        }
        put("n", self.n.to_string());
        put("burn_in", self.burn_in.to_string());
        put("thin", self.thin.to_string());
        put("seed", self.seed.to_string());
        put("replicates", self.replicates.to_string());
        put("proposal", self.tuning.proposal.as_str().into());
        if let Some(h) = self.tuning.scale {
            put("scale", format_real(h));
        }
        put("pilot", self.tuning.pilot.to_string());
        if let Some(t) = self.tuning.target_acceptance {
            put("target_acceptance", format_real(t));
        }
        put("precondition", self.tuning.precondition.to_string());
        put("validate.nonreversible", self.validate.nonreversible.to_string());
        put("validate.steps", self.validate.steps.to_string());
        put("validate.tolerance", format_real(self.validate.tolerance));
        put("output.dir", self.output.dir.display().to_string());
        if let Some(p) = &self.output.prefix {
            put("output.prefix", p.clone());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config_key(err: Error) -> (String, usize) {
        match err {
            Error::Config { key, line, .. } => (key, line),
            other => panic!("expected a config error, got {other}"),
        }
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config("model = rosenbrock\nn = 1000\nseed = 7\n").unwrap();
        assert_eq!(cfg.sampler, SamplerKind::Linchpin);
        assert_eq!((cfg.n, cfg.seed, cfg.burn_in, cfg.thin, cfg.replicates), (1000, 7, 0, 1, 1));
        assert_eq!(
            cfg.model,
            ModelConfig::Rosenbrock {
                form: RosenbrockForm::Banana,
                marginal: MarginalKernel::RwMh
            }
        );
        assert_eq!(cfg.tuning.pilot, 1000);
        assert_eq!(cfg.prefix(), "rosenbrock");
    }

    #[test]
    fn thin_zero_names_thin() {
        let (key, line) = config_key(parse_config("model = rosenbrock\n\nthin = 0\n").unwrap_err());
        assert_eq!((key.as_str(), line), ("thin", 3));
    }

    #[test]
    fn gibbs_on_rosenbrock_is_unsupported() {
        let err = parse_config("model = rosenbrock\nsampler = gibbs\n").unwrap_err();
        assert!(matches!(err, Error::Unsupported { .. }), "{err}");
    }

    #[test]
    fn unknown_and_duplicate_keys_are_rejected() {
        let (key, line) = config_key(parse_config("model = gaussian\n# note\nmodel.rhoo = 0.5\n").unwrap_err());
        assert_eq!((key.as_str(), line), ("model.rhoo", 3));
        let (key, _) = config_key(parse_config("model = gaussian\nn = 5\nn = 6\n").unwrap_err());
        assert_eq!(key, "n");
        // Synthetic-data keys are unknown once a data file is named.
        let (key, _) = config_key(parse_config("model = linear\nmodel.data = d.csv\nmodel.k = 3\n").unwrap_err());
        assert_eq!(key, "model.k");
    }

    #[test]
    fn type_and_invariant_errors_name_the_key() {
        let (key, line) = config_key(parse_config("model = gaussian\nn = ten\n").unwrap_err());
        assert_eq!((key.as_str(), line), ("n", 2));
        let (key, _) = config_key(parse_config("model = gaussian\nn = 10\nburn_in = 10\n").unwrap_err());
        assert_eq!(key, "burn_in");
        let (key, _) = config_key(parse_config("model = gaussian\nmodel.rho = 1\n").unwrap_err());
        assert_eq!(key, "model.rho");
        let (key, _) = config_key(parse_config("model = gaussian\nprecondition = true\n").unwrap_err());
        assert_eq!(key, "precondition");
        let (key, _) = config_key(parse_config("n = 10\n").unwrap_err());
        assert_eq!(key, "model");
        let (key, _) = config_key(parse_config("model = var\nmodel.lags 2\n").unwrap_err());
        assert_eq!(key, "model.lags 2");
    }

    #[test]
    fn canonical_text_round_trips() {
        let texts = [
            "model = gaussian\nmodel.rho = 0.5\nsampler = gibbs\ncompare = linchpin\nscale = 0.3\n",
            "model = linear\nmodel.beta = 1, -0.25\nmodel.e1 = 2\ntarget_acceptance = 0.3\n",
            "model = spike-slab\nmodel.data = x.csv\noutput.prefix = ss\n",
            "model = var\nmodel.a = 6.5\nsampler = joint-mh\nproposal = gaussian\nprecondition = true\n",
            "model = rosenbrock\nmodel.form = linear\nmodel.marginal = exact\nthin = 10\nburn_in = 5 # trailing\n",
        ];
        for text in texts {
            let cfg = parse_config(text).unwrap();
            let again = parse_config(&cfg.to_text()).unwrap();
            assert_eq!(again, cfg, "{text}");
        }
    }
}
