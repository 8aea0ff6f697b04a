//! Run the marginal chain alone, thin it, and only then draw `X | Y` for the
//! kept states. The conditional draw count drops by the thinning factor.

use linchpin::dist::RandomStream;
use linchpin::kernels::{Proposal, RandomWalkMh};
use linchpin::models::RosenbrockTarget;
use linchpin::sampler::LinchpinSampler;

fn main() -> linchpin::Result<()> {
    let target = RosenbrockTarget::default();
    let mut rng = RandomStream::new(3);
    let (kernel, report) =
        RandomWalkMh::new(target.marginal_target(), 1.0, Proposal::Gaussian)?.tune(&[0.0], 2000, 0.44, &mut rng)?;
    println!("tuned scale {:.3}, pilot acceptance {:.3}", report.scale, report.acceptance_rate);

    let sampler = LinchpinSampler::new(kernel, target.conditional());
    let names = vec!["x".to_string(), "y".to_string()];
    let n = 100_000;
    for thin in [1, 10, 100] {
        let out = sampler.run_marginal_then_fill(vec![0.0], n, thin, names.clone(), &mut rng)?;
        println!(
            "thin {thin:>3}: {:>6} rows, {:>6} conditional draws, {:.3}s",
            out.len(),
            out.conditional_draws,
            out.duration.as_secs_f64()
        );
    }
    Ok(())
}
