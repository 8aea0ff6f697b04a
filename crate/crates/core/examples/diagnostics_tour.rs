//! Batch-means variance, ESS, MCSE and ACF on an AR(1) series with known
//! asymptotic variance `1 / (1 - phi)^2`.

use linchpin::diagnostics::{acf, batch_means_var, confidence_interval, ess, mcse};
use linchpin::dist::RandomStream;

fn main() -> linchpin::Result<()> {
    let mut rng = RandomStream::new(5);
    for phi in [0.0, 0.5, 0.9] {
        let mut x = 0.0;
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                x = phi * x + rng.standard_normal();
                x
            })
            .collect();
        let (lo, hi) = confidence_interval(&xs, 0.95)?;
        println!(
            "phi {phi}: sigma^2 {:.3} (exact {:.3}), ESS {:.0}, MCSE {:.4}, lag-1 ACF {:.3}, 95% CI [{lo:.4}, {hi:.4}]",
            batch_means_var(&xs)?,
            1.0 / (1.0 - phi) / (1.0 - phi),
            ess(&xs)?,
            mcse(&xs)?,
            acf(&xs, 1)?[1],
        );
    }
    Ok(())
}
