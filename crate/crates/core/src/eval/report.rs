//! The evaluation report written by the pipeline and its text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ClassificationReport, RougeScore, TestResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentRouge {
    pub doc_id: String,
    pub rouge1: RougeScore,
    pub rouge2: RougeScore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRouge {
    pub documents: usize,
    pub rouge1_recall: f64,
    pub rouge2_recall: f64,
    pub rouge1_f1: f64,
    pub rouge2_f1: f64,
    pub per_document: Vec<DocumentRouge>,
}

impl SystemRouge {
    pub fn from_documents(per_document: Vec<DocumentRouge>) -> Self {
        let n = per_document.len().max(1) as f64;
        let mean = |f: &dyn Fn(&DocumentRouge) -> f64| per_document.iter().map(f).sum::<f64>() / n;
        SystemRouge {
            documents: per_document.len(),
            rouge1_recall: mean(&|d| d.rouge1.recall),
            rouge2_recall: mean(&|d| d.rouge2.recall),
            rouge1_f1: mean(&|d| d.rouge1.f1),
            rouge2_f1: mean(&|d| d.rouge2.f1),
            per_document,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedTest {
    pub a: String,
    pub b: String,
    pub metric: String,
    pub result: TestResult,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Sentence classifiers scored against gold labels, by name.
    pub classification: BTreeMap<String, ClassificationReport>,
    pub mcnemar: Vec<PairedTest>,
    pub rouge: BTreeMap<String, SystemRouge>,
    pub wilcoxon: Vec<PairedTest>,
}

fn p_text(p: f64) -> String {
    if p < 1e-4 {
        "<0.0001".to_string()
    } else {
        format!("{p:.4}")
    }
}

/// Aligned plain-text tables: classifiers, summarizers, paired tests.
pub fn render_table(report: &EvalReport) -> String {
    let mut out = String::new();
    if !report.classification.is_empty() {
        let w = report.classification.keys().map(String::len).max().unwrap_or(0).max(10);
        let _ = writeln!(out, "{:<w$}  {:>9}  {:>6}  {:>5}", "Classifier", "Precision", "Recall", "F-1");
        for (name, r) in &report.classification {
            let _ = writeln!(out, "{name:<w$}  {:>9.3}  {:>6.3}  {:>5.3}", r.precision, r.recall, r.f1);
        }
        for t in &report.mcnemar {
            let _ = writeln!(
                out,
                "McNemar {} vs {}: statistic {:.4}, p {}",
                t.a,
                t.b,
                t.result.statistic,
                p_text(t.result.p_value)
            );
        }
        out.push('\n');
    }
    if !report.rouge.is_empty() {
        let w = report.rouge.keys().map(String::len).max().unwrap_or(0).max(6);
        let _ = writeln!(out, "{:<w$}  {:>5}  {:>5}", "System", "R-1", "R-2");
        for (name, r) in &report.rouge {
            let _ = writeln!(out, "{name:<w$}  {:>5.3}  {:>5.3}", r.rouge1_recall, r.rouge2_recall);
        }
        for t in &report.wilcoxon {
            let _ = writeln!(
                out,
                "Wilcoxon {} vs {} ({}): W {}, p {}",
                t.a,
                t.b,
                t.metric,
                t.result.statistic,
                p_text(t.result.p_value)
            );
        }
    }
    out
}
