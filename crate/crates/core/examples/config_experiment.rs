//! Drive an experiment from config text, the same path the CLI takes.
//! Output lands in a temporary directory whose contents are listed.

use linchpin::config::parse_config;
use linchpin::experiment::Experiment;

const CONFIG: &str = "
model = gaussian
model.rho = 0.95
sampler = linchpin
compare = gibbs
n = 20000
seed = 12
replicates = 2
";

fn main() -> linchpin::Result<()> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.output.dir = std::env::temp_dir().join("linchpin_config_experiment");
    println!("canonical config:\n{}", cfg.to_text());
    let experiment = Experiment::new(cfg)?;
    for path in experiment.compare()? {
        println!("wrote {}", path.display());
    }
    let (a, b) = experiment.compare_replicate(0)?;
    println!(
        "replicate 0: {} acceptance {:.3}, {} acceptance {:.3}",
        a.sampler.as_str(),
        a.chain.acceptance_rate(),
        b.sampler.as_str(),
        b.chain.acceptance_rate()
    );
    Ok(())
}
