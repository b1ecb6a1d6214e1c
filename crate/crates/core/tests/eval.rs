use infosum::corpus::Sentence;
use infosum::eval::{
    classification_report, cohen_kappa, majority_vote, mcnemar, mcnemar_counts, prf, rouge_n, spearman,
    wilcoxon_signed_rank, McNemarMode, WilcoxonMode,
};
use proptest::prelude::*;

/// `P(χ²₁ > x) = 2 ∫_{√x}^{∞} φ(z) dz`, integrated with composite Simpson.
pub fn chi2_tail_oracle(x: f64) -> f64 {
    let a = x.sqrt();
    let b = a + 40.0;
    let n = 200_000;
    let h = (b - a) / n as f64;
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(a) + phi(b);
    for i in 1..n {
        let z = a + i as f64 * h;
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * phi(z);
    }
    2.0 * s * h / 3.0
}

/// Two-sided exact signed-rank p by enumerating every sign assignment.
fn wilcoxon_enumeration_oracle(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let below = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let total: f64 = ranks.iter().sum();
    let w_plus: f64 = ranks.iter().zip(&d).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let observed = w_plus.min(total - w_plus);
    let mut at_most = 0u64;
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            at_most += 1;
        }
    }
    (2.0 * at_most as f64 / (1u64 << n) as f64).min(1.0)
}

/// Brute-force clipped n-gram overlap: greedy one-to-one matching of n-gram
/// occurrences over whitespace tokens with punctuation removed.
fn rouge_oracle(reference: &str, candidate: &str, n: usize) -> (usize, usize, usize) {
    let words = |t: &str| -> Vec<String> {
        t.split_whitespace()
            .map(|w| w.trim_matches(|c: char| c.is_ascii_punctuation()).to_lowercase())
            .filter(|w| !w.is_empty())
            .collect()
    };
    let grams = |w: &[String]| -> Vec<Vec<String>> {
        if w.len() < n {
            Vec::new()
        } else {
            (0..=w.len() - n).map(|i| w[i..i + n].to_vec()).collect()
        }
    };
    let r = grams(&words(reference));
    let c = grams(&words(candidate));
    let mut used = vec![false; c.len()];
    let mut overlap = 0;
    for g in &r {
        if let Some(j) = (0..c.len()).find(|&j| !used[j] && &c[j] == g) {
            used[j] = true;
            overlap += 1;
        }
    }
    (overlap, r.len(), c.len())
}

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(
        prop_oneof![
            8 => (0usize..10).prop_map(|i| format!("w{i}")),
            1 => (0usize..10).prop_map(|i| format!("W{i}")),
            1 => prop::sample::select(vec![",", ".", "!", "--"]).prop_map(str::to_string),
        ],
        0..=12,
    )
    .prop_map(|t| t.join(" "))
}

#[test]
fn chi_square_oracle_self_check() {
    // P(χ²₁ > 3.841459) = 0.05
    assert!((chi2_tail_oracle(3.841_458_820_694_124) - 0.05).abs() < 1e-9);
}

#[test]
fn mcnemar_ten_two_against_oracle() {
    let r = mcnemar_counts(10, 2, McNemarMode::ChiSquare);
    assert!((r.statistic - 49.0 / 12.0).abs() < 1e-9);
    assert!((r.p_value - chi2_tail_oracle(49.0 / 12.0)).abs() < 1e-6);
}

#[test]
fn wilcoxon_five_positive_against_enumeration() {
    let d = [1.0, 2.0, 3.0, 4.0, 5.0];
    let r = wilcoxon_signed_rank(&d, &[0.0; 5], WilcoxonMode::Exact).unwrap();
    assert_eq!(r.p_value, 0.0625);
    assert_eq!(wilcoxon_enumeration_oracle(&d), 0.0625);
}

#[test]
fn published_f1_anchors() {
    let news = prf(492_372, 353_628, 89_628, 0);
    assert!((news.precision - 0.582).abs() < 5e-4);
    assert!((news.recall - 0.846).abs() < 5e-4);
    assert!((news.f1 - 0.689).abs() <= 1e-3);
    let baseline = prf(451, 549, 0, 0);
    assert!((baseline.f1 - 0.621).abs() <= 1e-3);
}

#[test]
fn majority_vote_counts_451_of_1000() {
    // 451 items with a 2-of-3 or 3-of-3 positive majority, 549 without
    let votes: Vec<Vec<bool>> = (0..1000)
        .map(|i| match (i < 451, i % 2 == 0) {
            (true, true) => vec![true, true, false],
            (true, false) => vec![true, true, true],
            (false, true) => vec![false, true, false],
            (false, false) => vec![false, false, false],
        })
        .collect();
    let m = majority_vote(&votes).unwrap();
    assert_eq!(m.iter().filter(|&&x| x).count(), 451);
}

#[test]
fn kappa_reports_observed_agreement() {
    let a = [1, 1, 0, 0, 1, 0, 1, 1];
    let b = [1, 0, 0, 0, 1, 1, 1, 1];
    let k = cohen_kappa(&a, &b).unwrap();
    assert_eq!(k.observed, 0.75);
    assert!(k.observed >= k.kappa);
    assert!((k.kappa - (k.observed - k.expected) / (1.0 - k.expected)).abs() < 1e-15);
}

proptest! {
    #[test]
    fn rouge_matches_bruteforce(r in text(), c in text(), n in 1usize..=2) {
        let s = rouge_n(&[Sentence::new(0, r.as_str())], &[Sentence::new(0, c.as_str())], n).unwrap();
        let (overlap, refs, cands) = rouge_oracle(&r, &c, n);
        prop_assert_eq!((s.overlap_count, s.ref_count, s.cand_count), (overlap, refs, cands));
    }

    #[test]
    fn rouge_self_recall_is_one(t in text()) {
        let s = Sentence::new(0, t.as_str());
        prop_assume!(s.word_count() > 0);
        prop_assert_eq!(rouge_n(std::slice::from_ref(&s), &[s.clone()], 1).unwrap().recall, 1.0);
    }

    #[test]
    fn rouge_appending_reference_sentence_never_lowers_recall(r1 in text(), r2 in text(), c in text(), n in 1usize..=2) {
        let reference = [Sentence::new(0, r1.as_str()), Sentence::new(1, r2.as_str())];
        let base = [Sentence::new(0, c.as_str())];
        let extended = [Sentence::new(0, c.as_str()), Sentence::new(1, r2.as_str())];
        let before = rouge_n(&reference, &base, n).unwrap().recall;
        let after = rouge_n(&reference, &extended, n).unwrap().recall;
        prop_assert!(after >= before);
    }

    #[test]
    fn prf_bounds(tp in 0u64..500, fp in 0u64..500, fn_ in 0u64..500) {
        let r = prf(tp, fp, fn_, 0);
        for v in [r.precision, r.recall, r.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(r.f1 <= 2.0 * r.precision.min(r.recall) + 1e-12);
        prop_assert!(r.f1 <= r.precision + r.recall + 1e-12);
    }

    #[test]
    fn spearman_invariant_under_monotone_maps(xs in prop::collection::vec(-10.0f64..10.0, 3..20), seed in 0u64..1000) {
        let ys: Vec<f64> = xs.iter().enumerate().map(|(i, x)| x.sin() + ((i as u64 * 31 + seed) % 7) as f64).collect();
        let base = match spearman(&xs, &ys) { Ok(v) => v, Err(_) => return Ok(()) };
        let fx: Vec<f64> = xs.iter().map(|x| x.powi(3) + x).collect();
        let gy: Vec<f64> = ys.iter().map(|y| (y / 3.0).exp()).collect();
        prop_assert!((spearman(&fx, &gy).unwrap() - base).abs() < 1e-12);
    }

    #[test]
    fn mcnemar_symmetric(a in prop::collection::vec(prop::bool::ANY, 1..60), seed in 0u64..1000) {
        let n = a.len();
        let b: Vec<bool> = (0..n).map(|i| (i as u64 * 7 + seed).is_multiple_of(3)).collect();
        let t: Vec<bool> = (0..n).map(|i| (i as u64 * 5 + seed).is_multiple_of(2)).collect();
        for mode in [McNemarMode::ChiSquare, McNemarMode::Exact] {
            let ab = mcnemar(&a, &b, &t, mode).unwrap();
            let ba = mcnemar(&b, &a, &t, mode).unwrap();
            prop_assert_eq!(ab.statistic, ba.statistic);
            prop_assert_eq!(ab.p_value, ba.p_value);
            prop_assert!((0.0..=1.0).contains(&ab.p_value));
        }
    }

    #[test]
    fn wilcoxon_exact_matches_enumeration(d in prop::collection::vec(prop_oneof![(-5i32..=5).prop_map(f64::from), -3.0f64..3.0], 1..=12)) {
        let zeros = vec![0.0; d.len()];
        let r = wilcoxon_signed_rank(&d, &zeros, WilcoxonMode::Exact).unwrap();
        prop_assert!((r.p_value - wilcoxon_enumeration_oracle(&d)).abs() < 1e-12);
    }

    #[test]
    fn wilcoxon_swap_symmetric(x in prop::collection::vec(-3.0f64..3.0, 1..30), y in prop::collection::vec(-3.0f64..3.0, 30)) {
        let y = &y[..x.len()];
        let a = wilcoxon_signed_rank(&x, y, WilcoxonMode::Auto).unwrap();
        let b = wilcoxon_signed_rank(y, &x, WilcoxonMode::Auto).unwrap();
        prop_assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn wilcoxon_exact_close_to_normal_at_25(x in prop::collection::vec(-1.0f64..1.5, 25), y in prop::collection::vec(-1.0f64..1.0, 25)) {
        let e = wilcoxon_signed_rank(&x, &y, WilcoxonMode::Exact).unwrap();
        let n = wilcoxon_signed_rank(&x, &y, WilcoxonMode::Normal).unwrap();
        prop_assert!((e.p_value - n.p_value).abs() <= 0.02, "exact {} normal {}", e.p_value, n.p_value);
    }

    #[test]
    fn classification_counts_partition(pairs in prop::collection::vec((prop::bool::ANY, prop::bool::ANY), 0..100)) {
        let (p, t): (Vec<bool>, Vec<bool>) = pairs.into_iter().unzip();
        let r = classification_report(&p, &t).unwrap();
        prop_assert_eq!((r.tp + r.fp + r.fn_ + r.tn) as usize, p.len());
    }
}
