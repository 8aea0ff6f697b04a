//! Shared oracles for unit tests: quadrature and goodness-of-fit.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Composite Simpson rule with `n` (rounded up to even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Pearson chi-square p-value for `counts` against cell probabilities `probs`.
pub fn chi_square_counts(counts: &[usize], probs: &[f64]) -> f64 {
    let total: usize = counts.iter().sum();
    let norm: f64 = probs.iter().sum();
    let mut stat = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        let e = total as f64 * p / norm;
        stat += (c as f64 - e).powi(2) / e;
    }
    let df = (counts.len() - 1) as f64;
    1.0 - ChiSquared::new(df).unwrap().cdf(stat)
}

/// Goodness of fit of one-dimensional draws against `exp(ln_density)`.
///
/// Interior cells are equal-width over the central 99% of the draws, with
/// both tails pooled into the end cells; cell masses come from Simpson
/// quadrature of the density over a range well beyond the draws.
pub fn chi_square_p_value(draws: &[f64], cells: usize, ln_density: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = draws.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    let lo = sorted[n / 200];
    let hi = sorted[n - 1 - n / 200];
    let width = (hi - lo) / (cells - 2) as f64;
    let edges: Vec<f64> = (0..=cells - 2).map(|i| lo + i as f64 * width).collect();
    let cell_of = |x: f64| {
        if x < lo {
            0
        } else if x >= hi {
            cells - 1
        } else {
            1 + (((x - lo) / width) as usize).min(cells - 3)
        }
    };
    let mut counts = vec![0usize; cells];
    for &x in draws {
        counts[cell_of(x)] += 1;
    }
    let span = sorted[n - 1] - sorted[0];
    let outer_lo = sorted[0] - span;
    let outer_hi = sorted[n - 1] + span;
    let f = |x: f64| ln_density(x).exp();
    let mut probs = vec![0.0; cells];
    probs[0] = simpson(f, outer_lo, lo, 4000);
    probs[cells - 1] = simpson(f, hi, outer_hi, 4000);
    for i in 1..cells - 1 {
        probs[i] = simpson(f, edges[i - 1], edges[i], 200);
    }
    chi_square_counts(&counts, &probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Normal, RandomStream, Univariate};

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - x, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wrong_density_is_rejected() {
        let mut rng = RandomStream::new(3);
        let draws: Vec<f64> = (0..100_000).map(|_| rng.standard_normal()).collect();
        let right = Normal::standard();
        let wrong = Normal::new(0.05, 1.0).unwrap();
        assert!(chi_square_p_value(&draws, 30, |x| right.ln_pdf(x)) > 0.001);
        assert!(chi_square_p_value(&draws, 30, |x| wrong.ln_pdf(x)) < 0.001);
    }
}
