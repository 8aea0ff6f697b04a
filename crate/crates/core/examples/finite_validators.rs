//! Exact-matrix checks on a discretized banana target: invariance of the
//! composed kernel, reversibility on both levels, and matching TV curves.
//! A circulation added to the marginal kernel breaks reversibility on both.

use nalgebra::DMatrix;

use linchpin::finite::{add_circulation, joint_transition_matrix, same_rate_check};
use linchpin::kernels::{FiniteKernel, FiniteMh};
use linchpin::models::RosenbrockTarget;

fn main() -> linchpin::Result<()> {
    let grid = RosenbrockTarget::default().validation_grid()?;
    let target = grid.target;
    let mh = FiniteMh::neighbor_walk(target.ln_marginal())?.transition_matrix()?;
    let n = mh.nrows();
    let lazy = (DMatrix::identity(n, n) + &mh) * 0.5;
    let circulating = add_circulation(&lazy, target.marginal(), [0, 1, 2])?;

    for (label, k) in [("metropolis", mh), ("with circulation", circulating)] {
        let marginal = target.marginal_spec(&k)?;
        let joint = joint_transition_matrix(&target, &k)?;
        let rate = same_rate_check(&joint, target.layout(), &marginal, 25)?;
        println!("{label}:");
        println!("  joint invariance error     {:.2e}", joint.check_invariance());
        println!("  marginal detailed balance  {:.2e}", marginal.check_detailed_balance());
        println!("  joint detailed balance     {:.2e}", joint.check_detailed_balance());
        println!("  max TV discrepancy (n<=25) {:.2e}", rate.max_discrepancy);
    }
    Ok(())
}
