//! Bivariate VAR(1) with exogenous regressors. The collapsed sampler moves
//! (A, Sigma) with B integrated out and fills B afterwards; a preconditioned
//! random walk on the full parameter is run for comparison.

use nalgebra::DMatrix;

use linchpin::chain::{run_chain, Flatten};
use linchpin::diagnostics::{ergodic_mean, mcse};
use linchpin::dist::RandomStream;
use linchpin::kernels::tune_preconditioned;
use linchpin::models::var::{synth_var, VarHyper, VarModel};

fn main() -> linchpin::Result<()> {
    let a = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.1, 0.5]);
    let b = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 0.0]);
    let sigma = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 1.0]);
    let model = VarModel::new(synth_var(100, 1, &a, &b, &sigma, 41)?, VarHyper::default_for(2, 1))?;
    let start = model.least_squares_start()?;
    let names = model.names();

    let gibbs = run_chain(&model.collapsed_kernel()?, start.clone(), 50_000, names.clone(), &mut RandomStream::new(42))?;

    let target = model.joint_target();
    let mut rng = RandomStream::new(43);
    let theta0 = target.to_theta(&start)?;
    let (rw, report) = tune_preconditioned(target, &theta0, 20_000, 0.234, &mut rng)?;
    let raw = run_chain(&rw, report.final_state.clone(), 500_000, vec![String::new(); theta0.len()], &mut rng)?;
    let joint = raw.map_states(names.clone(), |t| {
        let mut row = Vec::new();
        target.to_params(t).flatten_into(&mut row);
        row
    })?;
    println!("joint RW-MH acceptance {:.3}", joint.acceptance_rate());

    println!("{:>10} {:>16} {:>16}", "", "collapsed", "joint RW-MH");
    for name in &names {
        let (g, j) = (gibbs.column_by_name(name).unwrap(), joint.column_by_name(name).unwrap());
        println!(
            "{name:>10} {:>8.4} ±{:<7.4} {:>8.4} ±{:<7.4}",
            ergodic_mean(g)?,
            mcse(g)?,
            ergodic_mean(j)?,
            mcse(j)?
        );
    }
    Ok(())
}
