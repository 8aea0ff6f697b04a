//! Exact sampling from the banana target: draw `Y` from its normal marginal,
//! then `X | Y`. Prints sample moments next to their closed forms.

use linchpin::dist::RandomStream;
use linchpin::diagnostics::{ergodic_mean, sample_variance};
use linchpin::models::RosenbrockTarget;
use linchpin::sampler::LinchpinSampler;

fn main() -> linchpin::Result<()> {
    let target = RosenbrockTarget::default();
    let sampler = LinchpinSampler::new(target.exact_marginal_kernel(), target.conditional());
    let mut rng = RandomStream::new(1);
    let out = sampler.run_chain((0.0, vec![0.0]), 200_000, vec!["x".into(), "y".into()], &mut rng)?;

    let (x, y) = (out.column(0), out.column(1));
    println!("draws: {}", out.len());
    println!("mean Y {:8.4}   (exact 1)", ergodic_mean(y)?);
    println!("var  Y {:8.4}   (exact 10)", sample_variance(y));
    println!("mean X {:8.4}   (exact 11)", ergodic_mean(x)?);
    println!("var  X {:8.4}   (exact 240.1)", sample_variance(x));
    Ok(())
}
