//! Sigmoid (Platt) calibration of SVM margins.

use serde::{Deserialize, Serialize};

use super::objective::sigmoid;
use crate::error::{Error, Result};

const PROB_EPS: f64 = 1e-15;

/// `p(m) = 1 / (1 + exp(A·m + B))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
}

impl Calibration {
    /// Calibrated probability, kept inside the open interval (0, 1).
    pub fn probability(&self, margin: f64) -> f64 {
        sigmoid(-(self.a * margin + self.b)).clamp(PROB_EPS, 1.0 - PROB_EPS)
    }

    /// Margin at which the calibrated probability crosses 0.5.
    pub fn threshold(&self) -> f64 {
        -self.b / self.a
    }
}

pub fn calibrate(margins: &[f64], labels: &[bool]) -> Result<Calibration> {
    calibrate_weighted(margins, labels, &vec![1.0; margins.len()])
}

/// Weighted Platt scaling fitted by Newton's method with backtracking.
///
/// Targets are smoothed to `(N+ + 1)/(N+ + 2)` and `1/(N- + 2)` with
/// weighted class totals, which keeps `A` finite on separable margins.
pub fn calibrate_weighted(margins: &[f64], labels: &[bool], weights: &[f64]) -> Result<Calibration> {
    if margins.len() != labels.len() {
        return Err(Error::LengthMismatch(margins.len(), labels.len()));
    }
    if margins.len() != weights.len() {
        return Err(Error::LengthMismatch(margins.len(), weights.len()));
    }
    let (mut prior1, mut prior0) = (0.0, 0.0);
    for (&y, &w) in labels.iter().zip(weights) {
        if y {
            prior1 += w;
        } else {
            prior0 += w;
        }
    }
    if !(prior1 > 0.0 && prior0 > 0.0) {
        return Err(Error::Calibration("both labels need positive total weight".into()));
    }

    let hi = (prior1 + 1.0) / (prior1 + 2.0);
    let lo = 1.0 / (prior0 + 2.0);
    let targets: Vec<f64> = labels.iter().map(|&y| if y { hi } else { lo }).collect();

    let objective = |a: f64, b: f64| -> f64 {
        margins
            .iter()
            .zip(&targets)
            .zip(weights)
            .map(|((&m, &t), &w)| {
                let f = m * a + b;
                let v = if f >= 0.0 { t * f + (-f).exp().ln_1p() } else { (t - 1.0) * f + f.exp().ln_1p() };
                w * v
            })
            .sum()
    };

    let mut a = 0.0;
    let mut b = ((prior0 + 1.0) / (prior1 + 1.0)).ln();
    let mut fval = objective(a, b);
    const SIGMA: f64 = 1e-12;
    const MIN_STEP: f64 = 1e-10;

    for _ in 0..100 {
        let (mut h11, mut h22, mut h21) = (SIGMA, SIGMA, 0.0);
        let (mut g1, mut g2) = (0.0, 0.0);
        for ((&m, &t), &w) in margins.iter().zip(&targets).zip(weights) {
            let f = m * a + b;
            let (p, q) = if f >= 0.0 {
                let e = (-f).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = f.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = w * p * q;
            h11 += m * m * d2;
            h22 += d2;
            h21 += m * d2;
            let d1 = w * (t - p);
            g1 += m * d1;
            g2 += d1;
        }
        if g1.abs() < 1e-10 && g2.abs() < 1e-10 {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = 1.0;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = objective(na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if step < MIN_STEP {
            break;
        }
    }

    if !(a < 0.0) {
        return Err(Error::Calibration(format!(
            "fitted slope A = {a} is not negative; margins do not rank the positive label higher"
        )));
    }
    Ok(Calibration { a, b })
}
