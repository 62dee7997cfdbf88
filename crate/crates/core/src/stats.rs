//! Student-t distribution, one-sample and paired t-tests, Spearman rank
//! correlation.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Outcome of a t-test. `p_value` is two-sided.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub degrees_of_freedom: u32,
    pub p_value: f64,
    /// Mean of the tested sample (or of the paired differences).
    pub mean: f64,
}

impl TestResult {
    /// True iff `p_value < alpha`.
    pub fn rejects_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub rho: f64,
    pub n: usize,
}

/// Cumulative distribution of Student's t with `df` degrees of freedom.
pub fn t_cdf(x: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::Domain("degrees of freedom must be at least 1".into()));
    }
    if x.is_nan() {
        return Err(Error::Domain("t_cdf of NaN".into()));
    }
    if x == 0.0 {
        return Ok(0.5);
    }
    let tail = 0.5 * two_sided_tail(x, df as f64);
    Ok(if x > 0.0 { 1.0 - tail } else { tail })
}

/// `P(|T| >= |t|)` for `df` degrees of freedom.
pub fn two_sided_p(t: f64, df: u32) -> Result<f64> {
    if df < 1 {
        return Err(Error::Domain("degrees of freedom must be at least 1".into()));
    }
    if t.is_nan() {
        return Err(Error::Domain("p-value of NaN statistic".into()));
    }
    Ok(two_sided_tail(t, df as f64))
}

fn two_sided_tail(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    // P(|T| > t) = I_{df / (df + t^2)}(df / 2, 1 / 2)
    let x = df / (df + t * t);
    regularized_beta(x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    let front = libm::exp(ln_front);
    // The continued fraction converges fast for x < (a + 1) / (a + b + 2).
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: usize = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Two-sided one-sample t-test of `mean(samples) == null_mean`.
pub fn one_sample_ttest(samples: &[f64], null_mean: f64) -> Result<TestResult> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: n });
    }
    let centered: Vec<f64> = samples.iter().map(|x| x - null_mean).collect();
    let m = mean(&centered);
    let ss: f64 = centered.iter().map(|x| (x - m) * (x - m)).sum();
    let sd = libm::sqrt(ss / (n - 1) as f64);
    // Relative zero: a constant sample stored in floating point.
    let scale = centered.iter().map(|x| x.abs()).sum::<f64>() / n as f64;
    if sd <= 16.0 * f64::EPSILON * scale || sd == 0.0 || !sd.is_finite() {
        return Err(Error::DegenerateSample);
    }
    let statistic = m / (sd / libm::sqrt(n as f64));
    let df = (n - 1) as u32;
    Ok(TestResult {
        statistic,
        degrees_of_freedom: df,
        p_value: two_sided_p(statistic, df)?,
        mean: m + null_mean,
    })
}

/// Two-sided paired t-test on `xs[i] - ys[i]`.
pub fn paired_ttest(xs: &[f64], ys: &[f64]) -> Result<TestResult> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let diffs: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| x - y).collect();
    one_sample_ttest(&diffs, 0.0)
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = alloc::vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && xs[order[j + 1]] == xs[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: xs.len() });
    }
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Spearman's rho: Pearson correlation of average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<SpearmanResult> {
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::Domain("spearman input contains NaN".into()));
    }
    let rho = pearson(&average_ranks(xs), &average_ranks(ys))?;
    Ok(SpearmanResult { rho, n: xs.len() })
}
