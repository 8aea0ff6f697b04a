//! Output analysis: ergodic averages, batch-means asymptotic variance,
//! effective sample size, Monte Carlo standard errors and autocorrelation.
//!
//! All functions take the series `h(Z_1), …, h(Z_n)`; use
//! [`ChainOutput::column`] or [`ChainOutput::map_rows`] to build it.
//! No burn-in is applied here; callers discard explicitly.

use serde::Serialize;

use crate::chain::ChainOutput;
use crate::dist::normal_quantile;
use crate::error::{Error, Result};

/// Minimum series length for batch means.
pub const MIN_BATCH_MEANS: usize = 100;

/// `(1/n) Σ h(Z_i)`.
pub fn ergodic_mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    Ok(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample variance with the `n − 1` divisor; zero for `n < 2`.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1) as f64
}

/// Batch-means estimate of the CLT variance `σ²_h`.
///
/// With `b = ⌊√n⌋` and `a = ⌊n/b⌋` batches (the tail remainder is dropped),
/// `σ̂² = b/(a−1) Σ_k (Ȳ_k − Ȳ)²`.
pub fn batch_means_var(xs: &[f64]) -> Result<f64> {
    let n = xs.len();
    if n < MIN_BATCH_MEANS {
        return Err(Error::InsufficientData {
            needed: MIN_BATCH_MEANS,
            got: n,
        });
    }
    let b = (n as f64).sqrt().floor() as usize;
    let a = n / b;
    let means: Vec<f64> = xs[..a * b]
        .chunks_exact(b)
        .map(|c| c.iter().sum::<f64>() / b as f64)
        .collect();
    let overall = means.iter().sum::<f64>() / a as f64;
    let ss: f64 = means.iter().map(|m| (m - overall) * (m - overall)).sum();
    Ok(b as f64 * ss / (a - 1) as f64)
}

/// `n λ̂² / σ̂²_h` clipped to `(0, n]`. A zero `σ̂²_h` gives `n`.
pub fn ess(xs: &[f64]) -> Result<f64> {
    let sigma2 = batch_means_var(xs)?;
    let n = xs.len() as f64;
    if sigma2 <= 0.0 {
        return Ok(n);
    }
    let lambda2 = sample_variance(xs);
    Ok((n * lambda2 / sigma2).clamp(f64::MIN_POSITIVE, n))
}

/// `√(σ̂²_h / n)`.
pub fn mcse(xs: &[f64]) -> Result<f64> {
    Ok((batch_means_var(xs)? / xs.len() as f64).sqrt())
}

/// `mean ± z_{(1+level)/2} · mcse`.
pub fn confidence_interval(xs: &[f64], level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("confidence level must lie in (0, 1), got {level}")));
    }
    let m = ergodic_mean(xs)?;
    let half = normal_quantile(0.5 * (1.0 + level)) * mcse(xs)?;
    Ok((m - half, m + half))
}

/// Sample autocorrelations for lags `0..=max_lag`, normalized by the lag-0
/// autocovariance (both with divisor `n`).
pub fn acf(xs: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = xs.len();
    if 2 * max_lag >= n {
        return Err(Error::domain(format!("max lag {max_lag} must be below n/2 = {}", n / 2)));
    }
    let m = xs.iter().sum::<f64>() / n as f64;
    let dev: Vec<f64> = xs.iter().map(|x| x - m).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    if c0 <= 0.0 {
        return Err(Error::domain("autocorrelation of a constant series is undefined"));
    }
    Ok((0..=max_lag)
        .map(|k| dev[..n - k].iter().zip(&dev[k..]).map(|(a, b)| a * b).sum::<f64>() / c0)
        .collect())
}

/// Two-sample Kolmogorov–Smirnov statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = xs[i].min(ys[j]);
        while i < n && xs[i] <= v {
            i += 1;
        }
        while j < m && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_q(lambda))
}

/// `Q_KS(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Per-component summary of one chain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentSummary {
    pub name: String,
    pub mean: f64,
    /// Marginal variance `λ̂²`.
    pub variance: f64,
    /// `σ̂²_h`; absent when the chain is shorter than the batch-means minimum.
    pub asymptotic_variance: Option<f64>,
    pub ess: Option<f64>,
    pub mcse: Option<f64>,
    /// Lags `1..=k`; empty for constant or very short series.
    pub acf: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainSummary {
    pub n: usize,
    pub acceptance_rate: f64,
    pub components: Vec<ComponentSummary>,
}

impl ChainSummary {
    pub const ACF_LAGS: usize = 10;

    pub fn from_chain(chain: &ChainOutput) -> Result<Self> {
        let components = chain
            .names()
            .iter()
            .enumerate()
            .map(|(j, name)| summarize(name, chain.column(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n: chain.len(),
            acceptance_rate: chain.acceptance_rate(),
            components,
        })
    }

    pub fn component(&self, name: &str) -> Option<&ComponentSummary> {
        self.components.iter().find(|c| c.name == name)
    }
}

fn summarize(name: &str, xs: &[f64]) -> Result<ComponentSummary> {
    let mean = ergodic_mean(xs)?;
    let variance = sample_variance(xs);
    let (asymptotic_variance, ess, mcse) = if xs.len() >= MIN_BATCH_MEANS {
        let s2 = batch_means_var(xs)?;
        (Some(s2), Some(ess(xs)?), Some((s2 / xs.len() as f64).sqrt()))
    } else {
        (None, None, None)
    };
    let lags = ChainSummary::ACF_LAGS.min(xs.len().saturating_sub(1) / 2);
    let acf = match acf(xs, lags) {
        Ok(v) => v[1..].to_vec(),
        Err(_) => Vec::new(),
    };
    Ok(ComponentSummary {
        name: name.to_string(),
        mean,
        variance,
        asymptotic_variance,
        ess,
        mcse,
        acf,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::RandomStream;

    fn iid(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = RandomStream::new(seed);
        (0..n).map(|_| rng.standard_normal()).collect()
    }

    fn ar1(n: usize, phi: f64, seed: u64) -> Vec<f64> {
        let mut rng = RandomStream::new(seed);
        let mut x = rng.standard_normal() / (1.0 - phi * phi).sqrt();
        (0..n)
            .map(|_| {
                x = phi * x + rng.standard_normal();
                x
            })
            .collect()
    }

    #[test]
    fn ergodic_mean_cases() {
        assert_eq!(ergodic_mean(&[2.5; 17]).unwrap(), 2.5);
        let alt: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(ergodic_mean(&alt).unwrap(), 0.0);
        assert!(ergodic_mean(&[]).is_err());
        let mut rng = RandomStream::new(2);
        let xs: Vec<f64> = (0..1_000_000).map(|_| 1.0 + 10f64.sqrt() * rng.standard_normal()).collect();
        assert!((ergodic_mean(&xs).unwrap() - 1.0).abs() < 3.0 * (10.0f64 / 1e6).sqrt());
    }

    #[test]
    fn batch_means_cases() {
        assert_eq!(batch_means_var(&[3.0; 400]).unwrap(), 0.0);
        assert!(matches!(batch_means_var(&[1.0; 99]), Err(Error::InsufficientData { .. })));
        let s = batch_means_var(&iid(1_000_000, 1)).unwrap();
        assert!((s - 1.0).abs() < 0.1, "{s}");
        let s = batch_means_var(&ar1(1_000_000, 0.5, 2)).unwrap();
        assert!((s - 4.0).abs() < 0.4, "{s}");
    }

    #[test]
    fn ess_cases() {
        let n = 1_000_000;
        let r = ess(&iid(n, 3)).unwrap() / n as f64;
        assert!((r - 1.0).abs() < 0.1, "{r}");
        let r = ess(&ar1(n, 0.5, 4)).unwrap() / n as f64;
        assert!((r - 1.0 / 3.0).abs() < 0.05, "{r}");
        assert_eq!(ess(&[1.0; 500]).unwrap(), 500.0);
    }

    #[test]
    fn interval_half_width_and_level_check() {
        let xs = iid(1_000_000, 5);
        let (lo, hi) = confidence_interval(&xs, 0.95).unwrap();
        let half = 0.5 * (hi - lo);
        assert!((half - 1.96e-3).abs() < 0.1 * 1.96e-3, "{half}");
        assert!(matches!(confidence_interval(&xs, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn acf_cases() {
        let xs = iid(100_000, 6);
        let a = acf(&xs, 5).unwrap();
        assert_eq!(a[0], 1.0);
        assert!(a[1].abs() < 3.0 / (1e5f64).sqrt());
        let ys = ar1(1_000_000, 0.9, 7);
        let a = acf(&ys, 5).unwrap();
        for (k, v) in a.iter().enumerate() {
            assert!((v - 0.9f64.powi(k as i32)).abs() < 0.02, "lag {k}: {v}");
        }
        assert!(acf(&[1.0; 100], 3).is_err());
        assert!(acf(&xs[..10], 5).is_err());
    }

    #[test]
    fn asymptotic_variance_spread_shrinks_like_batch_count() {
        // With b = a = √n the estimator's variance is ≈ 2σ⁴/(a − 1), so
        // doubling n scales it by about 1/√2.
        let reps = 400;
        let spread = |n: usize, base: u64| {
            let v: Vec<f64> = (0..reps).map(|r| batch_means_var(&ar1(n, 0.5, base + r)).unwrap()).collect();
            sample_variance(&v)
        };
        let ratio = spread(20_000, 1_000) / spread(10_000, 2_000);
        assert!((0.55..=0.9).contains(&ratio), "{ratio}");
    }

    #[test]
    fn ks_detects_shift_and_accepts_same_law() {
        let a = iid(5000, 10);
        let b = iid(5000, 11);
        let (_, p) = ks_two_sample(&a, &b);
        assert!(p > 0.001);
        let c: Vec<f64> = b.iter().map(|x| x + 0.3).collect();
        let (d, p) = ks_two_sample(&a, &c);
        assert!(d > 0.05 && p < 1e-6);
        let (d, p) = ks_two_sample(&a, &a);
        assert_eq!(d, 0.0);
        assert_eq!(p, 1.0);
    }

    #[test]
    fn summary_is_pure() {
        let mut c = ChainOutput::new(vec!["v".into()], 0, "t");
        for (i, v) in ar1(1000, 0.3, 9).into_iter().enumerate() {
            c.push_row(i + 1, &[v], true).unwrap();
        }
        let a = ChainSummary::from_chain(&c).unwrap();
        let b = ChainSummary::from_chain(&c).unwrap();
        assert_eq!(a, b);
        let comp = a.component("v").unwrap();
        let mcse = comp.mcse.unwrap();
        assert!((mcse - (comp.asymptotic_variance.unwrap() / 1000.0).sqrt()).abs() < 1e-15);
        assert!(comp.ess.unwrap() > 0.0 && comp.ess.unwrap() <= 1000.0);
    }
}
