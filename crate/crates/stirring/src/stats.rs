//! Goodness-of-fit primitives used by the verification harness.
//!
//! Everything here is a deterministic function of its inputs. Tests report a
//! statistic, the critical threshold at the declared significance, and the
//! verdict; no p-values. The chi-square pooling rule is fixed (scan cells in
//! order, close a bin as soon as its expected count reaches 5, fold any
//! leftover into the last bin) so results are bit-reproducible.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("too few samples: {got} (need at least {need})")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate test: {0}")]
    Degenerate(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
}

/// Outcome of a single goodness-of-fit test.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct GofResult {
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub n_samples: usize,
}

impl GofResult {
    fn new(statistic: f64, threshold: f64, n_samples: usize) -> Self {
        Self { statistic, threshold, pass: statistic < threshold, n_samples }
    }
}

/// Poisson pmf `e^{-lambda} lambda^k / k!`, computed in log space.
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    debug_assert!(lambda > 0.0);
    (k as f64 * lambda.ln() - lambda - ln_gamma(k as f64 + 1.0)).exp()
}

/// Cell probabilities of Poisson(lambda) on `0..=kmax` plus one closing tail
/// cell holding the remaining mass, so the vector sums to one exactly.
pub fn poisson_cells(lambda: f64, kmax: u64) -> Vec<f64> {
    let mut cells: Vec<f64> = (0..=kmax).map(|k| poisson_pmf(lambda, k)).collect();
    let tail = (1.0 - cells.iter().sum::<f64>()).max(0.0);
    cells.push(tail);
    cells
}

/// Pearson chi-square test of observed counts against cell probabilities.
///
/// `expected` must be a full probability vector over the same cells (sum one
/// within 1e-6); cells are pooled left to right until every pooled bin has
/// expected count at least 5, leftover folding into the last bin. Degrees of
/// freedom are `pooled bins - 1`.
pub fn chi_square_gof(
    observed: &[u64],
    expected: &[f64],
    significance: f64,
) -> Result<GofResult, StatsError> {
    if observed.len() != expected.len() {
        return Err(StatsError::InvalidInput("observed/expected length mismatch"));
    }
    if expected.iter().any(|&p| !(p >= 0.0)) {
        return Err(StatsError::InvalidInput("expected probabilities must be nonnegative"));
    }
    let mass: f64 = expected.iter().sum();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(StatsError::InvalidInput("expected probabilities must sum to one"));
    }
    let n: u64 = observed.iter().sum();
    if n < 1_000 {
        return Err(StatsError::TooFewSamples { got: n as usize, need: 1_000 });
    }
    let nf = n as f64;

    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut acc_obs = 0.0;
    let mut acc_exp = 0.0;
    for (&o, &p) in observed.iter().zip(expected) {
        acc_obs += o as f64;
        acc_exp += p * nf;
        if acc_exp >= 5.0 {
            bins.push((acc_obs, acc_exp));
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if acc_exp > 0.0 || acc_obs > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc_obs;
                last.1 += acc_exp;
            }
            None => return Err(StatsError::Degenerate("all cells pool into a single bin")),
        }
    }
    if bins.len() < 2 {
        return Err(StatsError::Degenerate("pooled histogram has no degrees of freedom"));
    }

    let statistic: f64 = bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let df = (bins.len() - 1) as f64;
    let threshold = ChiSquared::new(df)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - significance);
    Ok(GofResult::new(statistic, threshold, n as usize))
}

/// Asymptotic Kolmogorov critical coefficient `c(alpha) = sqrt(ln(2/alpha)/2)`;
/// `c(1e-3)` is about 1.95.
pub fn ks_coefficient(significance: f64) -> f64 {
    ((2.0 / significance).ln() / 2.0).sqrt()
}

/// One-sample Kolmogorov-Smirnov test against a cdf, threshold `c(alpha)/sqrt(n)`.
pub fn ks_statistic<F: Fn(f64) -> f64>(
    samples: &[f64],
    cdf: F,
    significance: f64,
) -> Result<GofResult, StatsError> {
    if samples.is_empty() {
        return Err(StatsError::TooFewSamples { got: 0, need: 100 });
    }
    if samples.len() < 100 {
        return Err(StatsError::TooFewSamples { got: samples.len(), need: 100 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples must not contain NaN"));
    let n = sorted.len() as f64;
    let mut sup = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((f - i as f64 / n).abs());
        sup = sup.max(((i + 1) as f64 / n - f).abs());
    }
    let threshold = ks_coefficient(significance) / n.sqrt();
    Ok(GofResult::new(sup, threshold, sorted.len()))
}

/// Two-sample Kolmogorov-Smirnov test; threshold uses the effective sample
/// size `ab/(a+b)`.
pub fn two_sample_ks(a: &[f64], b: &[f64], significance: f64) -> Result<GofResult, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::TooFewSamples { got: a.len().min(b.len()), need: 100 });
    }
    if a.len() < 100 || b.len() < 100 {
        return Err(StatsError::TooFewSamples { got: a.len().min(b.len()), need: 100 });
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("samples must not contain NaN"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("samples must not contain NaN"));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut sup = 0.0f64;
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    let threshold = ks_coefficient(significance) * ((na + nb) / (na * nb)).sqrt();
    Ok(GofResult::new(sup, threshold, a.len().min(b.len())))
}

/// Least squares on `(ln x, ln y)`; returns `(slope, intercept, r_squared)`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64), StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::InvalidInput("x/y length mismatch"));
    }
    if xs.len() < 3 {
        return Err(StatsError::TooFewSamples { got: xs.len(), need: 3 });
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0)) {
        return Err(StatsError::InvalidInput("log-log regression needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(StatsError::Degenerate("all x values equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok((slope, intercept, r2))
}
