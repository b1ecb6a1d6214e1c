use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::ser::Error as _;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Calibration, LinearSvm, LogisticModel, TrainConfig};
use crate::error::{Error, Result};
use crate::features::{FeatureLayout, FeatureVector};

pub const MODEL_VERSION: u32 = 1;

/// A trained detector: both stages, the label frequency and the calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct PuModel {
    layout: FeatureLayout,
    layout_hash: String,
    stage1: LogisticModel,
    e: f64,
    svm: LinearSvm,
    calib: Calibration,
    hyper: TrainConfig,
    seed: u64,
}

impl PuModel {
    pub fn new(
        layout: FeatureLayout,
        stage1: LogisticModel,
        e: f64,
        svm: LinearSvm,
        calib: Calibration,
        hyper: TrainConfig,
        seed: u64,
    ) -> Self {
        let layout_hash = layout.hash();
        PuModel { layout, layout_hash, stage1, e, svm, calib, hyper, seed }
    }

    pub fn layout(&self) -> &FeatureLayout {
        &self.layout
    }

    pub fn layout_hash(&self) -> &str {
        &self.layout_hash
    }

    pub fn stage1(&self) -> &LogisticModel {
        &self.stage1
    }

    pub fn e(&self) -> f64 {
        self.e
    }

    pub fn svm(&self) -> &LinearSvm {
        &self.svm
    }

    pub fn calibration(&self) -> Calibration {
        self.calib
    }

    pub fn hyper(&self) -> &TrainConfig {
        &self.hyper
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Calibrated probability for raw feature values (no layout check).
    pub fn probability(&self, x: &[f64]) -> f64 {
        self.calib.probability(self.svm.margin(x))
    }

    fn check(&self, features: &FeatureVector) -> Result<()> {
        if features.layout_hash != self.layout_hash {
            return Err(Error::LayoutMismatch {
                expected: self.layout_hash.clone(),
                found: features.layout_hash.clone(),
            });
        }
        if features.values.len() != self.layout.total_dim {
            return Err(Error::DimensionMismatch { expected: self.layout.total_dim, found: features.values.len() });
        }
        Ok(())
    }

    pub fn margin(&self, features: &FeatureVector) -> Result<f64> {
        self.check(features)?;
        Ok(self.svm.margin(&features.values))
    }

    pub fn predict_prob(&self, features: &FeatureVector) -> Result<f64> {
        self.check(features)?;
        Ok(self.probability(&features.values))
    }

    pub fn predict_label(&self, features: &FeatureVector) -> Result<bool> {
        Ok(self.predict_prob(features)? >= 0.5)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFileOut {
            version: MODEL_VERSION,
            layout: &self.layout,
            layout_hash: &self.layout_hash,
            lexicon_hashes: lexicon_hashes(&self.layout),
            stage1: LinearOut { weights: Exact::many(&self.stage1.weights), bias: Exact(self.stage1.bias) },
            e: Exact(self.e),
            svm: LinearOut { weights: Exact::many(&self.svm.weights), bias: Exact(self.svm.bias) },
            calib: CalibOut { a: Exact(self.calib.a), b: Exact(self.calib.b) },
            hyper: &self.hyper,
            seed: self.seed,
        };
        let mut text = serde_json::to_string_pretty(&file)?;
        text.push('\n');
        Ok(text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let probe: VersionProbe = serde_json::from_str(text)?;
        if probe.version != MODEL_VERSION {
            return Err(Error::ModelVersion { expected: MODEL_VERSION, found: probe.version });
        }
        let file: ModelFileIn = serde_json::from_str(text)?;
        file.layout.validate()?;
        let hash = file.layout.hash();
        if hash != file.layout_hash {
            return Err(Error::HashMismatch(format!(
                "stored layout hash {} does not match layout content {hash}",
                file.layout_hash
            )));
        }
        if file.lexicon_hashes != lexicon_hashes(&file.layout) {
            return Err(Error::HashMismatch("lexicon hashes disagree with the layout".into()));
        }
        let dim = file.layout.total_dim;
        for w in [&file.stage1.weights, &file.svm.weights] {
            if w.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: w.len() });
            }
        }
        if !(file.calib.a < 0.0) {
            return Err(Error::InvalidInput("calibration slope A must be negative".into()));
        }
        Ok(PuModel::new(
            file.layout,
            LogisticModel { weights: file.stage1.weights, bias: file.stage1.bias },
            file.e,
            LinearSvm { weights: file.svm.weights, bias: file.svm.bias },
            Calibration { a: file.calib.a, b: file.calib.b },
            file.hyper,
            file.seed,
        ))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

fn lexicon_hashes(layout: &FeatureLayout) -> BTreeMap<String, String> {
    layout.lexicons.iter().map(|l| (l.name.clone(), l.hash.clone())).collect()
}

/// A float written with 17 significant digits.
struct Exact(f64);

impl Exact {
    fn many(xs: &[f64]) -> Vec<Exact> {
        xs.iter().copied().map(Exact).collect()
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite model parameter {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Serialize)]
struct LinearOut {
    weights: Vec<Exact>,
    bias: Exact,
}

#[derive(Serialize)]
struct CalibOut {
    #[serde(rename = "A")]
    a: Exact,
    #[serde(rename = "B")]
    b: Exact,
}

#[derive(Serialize)]
struct ModelFileOut<'a> {
    version: u32,
    layout: &'a FeatureLayout,
    layout_hash: &'a str,
    lexicon_hashes: BTreeMap<String, String>,
    stage1: LinearOut,
    e: Exact,
    svm: LinearOut,
    calib: CalibOut,
    hyper: &'a TrainConfig,
    seed: u64,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

#[derive(Deserialize)]
struct LinearIn {
    weights: Vec<f64>,
    bias: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFileIn {
    #[allow(dead_code)]
    version: u32,
    layout: FeatureLayout,
    layout_hash: String,
    lexicon_hashes: BTreeMap<String, String>,
    stage1: LinearIn,
    e: f64,
    svm: LinearIn,
    calib: Calibration,
    hyper: TrainConfig,
    seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> PuModel {
        PuModel::new(
            FeatureLayout::dense(3),
            LogisticModel { weights: vec![0.1, -1.0 / 3.0, 2e-300], bias: std::f64::consts::PI },
            0.7,
            LinearSvm { weights: vec![1.0 / 7.0, -0.0, 123456.789], bias: -1e-17 },
            Calibration { a: -2.5, b: 0.125 },
            TrainConfig::default(),
            42,
        )
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = model();
        let text = m.to_json().unwrap();
        let back = PuModel::from_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn weights_have_seventeen_digits() {
        let text = model().to_json().unwrap();
        assert!(text.contains("1.4285714285714285e-1"), "{text}");
        assert!(text.contains("\"A\": -2.5000000000000000e0"), "{text}");
    }

    #[test]
    fn version_mismatch() {
        let text = model().to_json().unwrap().replacen("\"version\": 1", "\"version\": 9", 1);
        assert!(matches!(PuModel::from_json(&text), Err(Error::ModelVersion { expected: 1, found: 9 })));
    }

    #[test]
    fn tampered_layout_hash() {
        let m = model();
        let text = m.to_json().unwrap().replace(m.layout_hash(), &"0".repeat(64));
        assert!(matches!(PuModel::from_json(&text), Err(Error::HashMismatch(_))));
    }

    #[test]
    fn corrupted_file_is_an_error() {
        let text = model().to_json().unwrap();
        assert!(matches!(PuModel::from_json(&text[..text.len() / 2]), Err(Error::Json(_))));
    }

    #[test]
    fn predict_checks_layout() {
        let m = model();
        let other = FeatureVector::dense(&FeatureLayout::dense(4), vec![0.0; 4]).unwrap();
        assert!(matches!(m.predict_prob(&other), Err(Error::LayoutMismatch { .. })));
        let ok = FeatureVector::dense(m.layout(), vec![1.0, 2.0, 3.0]).unwrap();
        let p = m.predict_prob(&ok).unwrap();
        assert!(p > 0.0 && p < 1.0);
        assert_eq!(p, m.predict_prob(&ok).unwrap());
    }
}
