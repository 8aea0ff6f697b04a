//! Hierarchical linear model with unknown precisions. The two log-precisions
//! are the linchpin: a random walk runs on them and the regression and random
//! effects are drawn exactly given each state.

use nalgebra::DVector;

use linchpin::diagnostics::ChainSummary;
use linchpin::dist::RandomStream;
use linchpin::kernels::{default_target_acceptance, Proposal, RandomWalkMh};
use linchpin::models::linear::{synth_linear, LinearModel, LinearModelHyper};
use linchpin::sampler::LinchpinSampler;

fn main() -> linchpin::Result<()> {
    let data = synth_linear(40, &DVector::from_vec(vec![1.0, -0.5]), 4, 1.0, 2.0, LinearModelHyper::default(), 21)?;
    let model = LinearModel::new(data)?;
    let mut rng = RandomStream::new(22);
    let (kernel, report) = RandomWalkMh::new(model.log_lambda_target(), 1.0, Proposal::Gaussian)?.tune(
        &[0.0, 0.0],
        2000,
        default_target_acceptance(2),
        &mut rng,
    )?;
    println!("pilot: scale {:.3}, acceptance {:.3}", report.scale, report.acceptance_rate);

    let sampler = LinchpinSampler::new(kernel, model.conditional());
    let start = (DVector::zeros(model.p() + model.k()), vec![0.0, 0.0]);
    let out = sampler.run_chain(start, 50_000, model.names(), &mut rng)?;
    for c in ChainSummary::from_chain(&out)?.components {
        println!("{:>14} mean {:>8.4}  ESS {:>8.0}", c.name, c.mean, c.ess.unwrap_or(f64::NAN));
    }
    Ok(())
}
