//! Regularized training objectives shared by both stages.
//!
//! Both objectives normalize the data term by the total instance weight:
//!
//! ```text
//! J(w, b) = (1 / Σ s_i) Σ s_i · loss(t_i, w·x_i + b) + (l2 / 2) ||w||²
//! ```
//!
//! so duplicating the data or adding zero-weight samples leaves `J` unchanged.
//! The bias is not regularized.

/// One training row: features, a 0/1 target and an instance weight.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub x: &'a [f64],
    pub target: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    pub grad_w: Vec<f64>,
    pub grad_b: f64,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn total_weight(data: &[Sample]) -> f64 {
    data.iter().map(|s| s.weight).sum()
}

/// `ln(1 + e^z)` without overflow.
pub(crate) fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Weighted logistic loss `softplus(z) − t·z` plus the L2 penalty, with its gradient.
pub fn logistic(weights: &[f64], bias: f64, data: &[Sample], l2: f64) -> Evaluation {
    let total = total_weight(data);
    let mut value = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for s in data {
        if s.weight == 0.0 {
            continue;
        }
        let z = dot(weights, s.x) + bias;
        value += s.weight * (softplus(z) - s.target * z);
        let g = s.weight * (sigmoid(z) - s.target);
        for (gw, x) in grad_w.iter_mut().zip(s.x) {
            *gw += g * x;
        }
        grad_b += g;
    }
    finish(value, grad_w, grad_b, total, weights, l2)
}

/// Weighted hinge loss `max(0, 1 − y·z)` with `y = 2t − 1`, plus the L2
/// penalty. At the kink (`y·z = 1`) the zero subgradient is used.
pub fn hinge(weights: &[f64], bias: f64, data: &[Sample], l2: f64) -> Evaluation {
    let total = total_weight(data);
    let mut value = 0.0;
    let mut grad_w = vec![0.0; weights.len()];
    let mut grad_b = 0.0;
    for s in data {
        if s.weight == 0.0 {
            continue;
        }
        let y = 2.0 * s.target - 1.0;
        let margin = y * (dot(weights, s.x) + bias);
        if margin < 1.0 {
            value += s.weight * (1.0 - margin);
            let g = -s.weight * y;
            for (gw, x) in grad_w.iter_mut().zip(s.x) {
                *gw += g * x;
            }
            grad_b += g;
        }
    }
    finish(value, grad_w, grad_b, total, weights, l2)
}

fn finish(value: f64, mut grad_w: Vec<f64>, grad_b: f64, total: f64, weights: &[f64], l2: f64) -> Evaluation {
    let scale = if total > 0.0 { 1.0 / total } else { 0.0 };
    let penalty = 0.5 * l2 * dot(weights, weights);
    for (g, w) in grad_w.iter_mut().zip(weights) {
        *g = *g * scale + l2 * w;
    }
    Evaluation { value: value * scale + penalty, grad_w, grad_b: grad_b * scale }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_and_sigmoid_are_stable() {
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(softplus(1000.0), 1000.0);
        assert!(softplus(-1000.0) >= 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert!((sigmoid(0.3) + sigmoid(-0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_weight_rows_are_inert() {
        let x1 = [1.0, 2.0];
        let x2 = [-3.0, 0.5];
        let a = [Sample { x: &x1, target: 1.0, weight: 1.0 }];
        let b = [a[0], Sample { x: &x2, target: 0.0, weight: 0.0 }];
        let w = [0.3, -0.2];
        assert_eq!(logistic(&w, 0.1, &a, 0.01), logistic(&w, 0.1, &b, 0.01));
        assert_eq!(hinge(&w, 0.1, &a, 0.01), hinge(&w, 0.1, &b, 0.01));
    }

    #[test]
    fn hinge_value_by_hand() {
        let x = [2.0];
        let data = [
            Sample { x: &x, target: 1.0, weight: 1.0 }, // margin 0.5·2 = 1 → loss 0
            Sample { x: &x, target: 0.0, weight: 3.0 }, // margin −1 → loss 2
        ];
        let e = hinge(&[0.5], 0.0, &data, 0.0);
        assert!((e.value - 6.0 / 4.0).abs() < 1e-15);
        assert!((e.grad_w[0] - 3.0 * 2.0 / 4.0).abs() < 1e-15);
    }
}
