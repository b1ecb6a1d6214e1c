use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: String,
}

/// Upper tail of the chi-square distribution with one degree of freedom.
fn chi2_1_sf(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        erfc((x / 2.0).sqrt())
    }
}

/// Two-sided standard normal tail `P(|Z| ≥ z)`.
fn normal_two_sided(z: f64) -> f64 {
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McNemarMode {
    /// Continuity-corrected chi-square.
    #[default]
    ChiSquare,
    /// Two-sided exact binomial test on the discordant pairs.
    Exact,
}

/// McNemar's test from discordant counts: `b` items only A got right, `c`
/// items only B got right.
pub fn mcnemar_counts(b: u64, c: u64, mode: McNemarMode) -> TestResult {
    let n = b + c;
    match mode {
        McNemarMode::ChiSquare => {
            if n == 0 {
                return TestResult { statistic: 0.0, p_value: 1.0, method: "mcnemar-chi2-cc".into() };
            }
            let d = (b as f64 - c as f64).abs() - 1.0;
            let statistic = d.max(0.0).powi(2) / n as f64;
            TestResult { statistic, p_value: chi2_1_sf(statistic), method: "mcnemar-chi2-cc".into() }
        }
        McNemarMode::Exact => {
            let k = b.min(c);
            let p_value = if n == 0 {
                1.0
            } else {
                let dist = Binomial::new(0.5, n).expect("valid binomial");
                (2.0 * dist.cdf(k)).min(1.0)
            };
            TestResult { statistic: k as f64, p_value, method: "mcnemar-exact".into() }
        }
    }
}

pub fn mcnemar(pred_a: &[bool], pred_b: &[bool], truth: &[bool], mode: McNemarMode) -> Result<TestResult> {
    if pred_a.len() != truth.len() {
        return Err(Error::LengthMismatch(pred_a.len(), truth.len()));
    }
    if pred_b.len() != truth.len() {
        return Err(Error::LengthMismatch(pred_b.len(), truth.len()));
    }
    if truth.is_empty() {
        return Err(Error::InvalidInput("McNemar's test needs at least one item".into()));
    }
    let (mut b, mut c) = (0, 0);
    for ((&a, &bb), &t) in pred_a.iter().zip(pred_b).zip(truth) {
        match (a == t, bb == t) {
            (true, false) => b += 1,
            (false, true) => c += 1,
            _ => {}
        }
    }
    Ok(mcnemar_counts(b, c, mode))
}

/// Average (mid) ranks, 1-based.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WilcoxonMode {
    /// Exact for at most 25 non-zero differences, normal approximation above.
    #[default]
    Auto,
    Exact,
    Normal,
}

const EXACT_LIMIT: usize = 25;

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; tied magnitudes get average ranks.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], mode: WilcoxonMode) -> Result<TestResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let diffs: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| d.is_nan()) {
        return Err(Error::InvalidInput("NaN in paired samples".into()));
    }
    let n = diffs.len();
    if n == 0 {
        return Ok(TestResult { statistic: 0.0, p_value: 1.0, method: "wilcoxon-no-differences".into() });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&magnitudes);
    let w_plus: f64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| r).sum();
    let total = (n * (n + 1)) as f64 / 2.0;
    let w = w_plus.min(total - w_plus);

    let exact = match mode {
        WilcoxonMode::Auto => n <= EXACT_LIMIT,
        WilcoxonMode::Exact => true,
        WilcoxonMode::Normal => false,
    };
    if exact {
        // doubled ranks are integers even with ties
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max: usize = doubled.iter().sum();
        let mut counts = vec![0.0f64; max + 1];
        counts[0] = 1.0;
        let mut reach = 0;
        for &r in &doubled {
            for s in (0..=reach).rev() {
                if counts[s] != 0.0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let w2 = (2.0 * w).round() as usize;
        let tail: f64 = counts[..=w2].iter().sum();
        let p_value = (2.0 * tail / 2f64.powi(n as i32)).min(1.0);
        return Ok(TestResult { statistic: w, p_value, method: "wilcoxon-exact".into() });
    }

    let mean = total / 2.0;
    let mut tie_term = 0.0;
    let mut sorted = magnitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let nf = n as f64;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
        normal_two_sided(z)
    };
    Ok(TestResult { statistic: w, p_value, method: "wilcoxon-normal".into() })
}

/// Spearman's rank correlation: Pearson correlation of average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(Error::InvalidInput("spearman needs at least two pairs".into()));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}
