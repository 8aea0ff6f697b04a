//! Variable selection with a spike-and-slab prior. The inclusion indicators
//! form the linchpin; a single-flip Metropolis chain on them is compared with
//! the exact posterior obtained by enumerating every model.

use nalgebra::DVector;

use linchpin::diagnostics::ergodic_mean;
use linchpin::dist::RandomStream;
use linchpin::kernels::FlipMh;
use linchpin::models::spike_slab::{synth_spike_slab, SpikeSlabHyper, SpikeSlabModel};
use linchpin::sampler::LinchpinSampler;

fn main() -> linchpin::Result<()> {
    let beta = DVector::from_vec(vec![1.5, 0.0, 0.0, -1.0, 0.0, 0.0, 0.8, 0.0]);
    let model = SpikeSlabModel::new(synth_spike_slab(30, &beta, 1.0, SpikeSlabHyper::default(), 31)?);
    let exact = model.enumerate()?;

    let sampler = LinchpinSampler::new(FlipMh::new(&model)?, model.conditional());
    let init = ((DVector::zeros(model.p()), 1.0), vec![false; model.p()]);
    let out = sampler.run_chain(init, 100_000, model.names(), &mut RandomStream::new(32))?;

    println!("{:>4} {:>8} {:>8} {:>8}", "", "truth", "exact", "chain");
    for (i, truth) in beta.iter().enumerate() {
        let freq = ergodic_mean(out.column_by_name(&format!("z{}", i + 1)).unwrap())?;
        println!("{:>4} {truth:>8.2} {:>8.4} {freq:>8.4}", format!("z{}", i + 1), exact.inclusion[i]);
    }
    let mode = exact.state(exact.mode());
    println!("posterior mode: {:?} (p = {:.4})", mode, exact.probabilities[exact.mode()]);
    Ok(())
}
