//! Two-block Gibbs against a linchpin sampler on a strongly correlated
//! AR(1) normal. Gibbs mixing collapses as rho -> 1; the linchpin chain does not.

use linchpin::diagnostics::acf;
use linchpin::models::gaussian_experiment;

fn main() -> linchpin::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>12} {:>10}", "rho", "ESS gibbs", "ESS linch", "gibbs lag-1", "ratio");
    for rho in [0.5, 0.9, 0.99, 0.999] {
        let exp = gaussian_experiment(rho, 50_000, 11)?;
        let (g, l) = exp.last_coordinate_ess()?;
        let lag1 = acf(exp.gibbs.column(exp.gibbs.dim() - 1), 1)?[1];
        println!("{rho:>6} {g:>10.0} {l:>10.0} {lag1:>12.4} {:>10.1}", l / g);
    }
    Ok(())
}
