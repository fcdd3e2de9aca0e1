//! Batch estimators and the experiment runner driven by [`ExperimentSpec`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env::mix64;

mod estimators;
mod run;
mod spec;

pub use estimators::*;
pub use run::{run, run_to, RunOutput};
pub use spec::{margin_for, ExperimentSpec, EXPERIMENTS};

/// One cell of an experiment table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub experiment: String,
    /// Sub-population inside the cell (e.g. `dx=4`, `pooled`); empty when the
    /// cell is not split.
    pub label: String,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: i64,
    /// Samples requested.
    pub samples: usize,
    /// Samples that were certified and entered the estimate.
    pub used: usize,
    /// `None` when the estimate is degenerate.
    pub estimate: Option<f64>,
    pub se: Option<f64>,
    pub diagnostics: BTreeMap<String, f64>,
}

impl EstimateReport {
    pub(crate) fn new(experiment: &str, p: f64, n: i64, samples: usize) -> Self {
        EstimateReport {
            experiment: experiment.into(),
            label: String::new(),
            p,
            n,
            samples,
            used: 0,
            estimate: None,
            se: None,
            diagnostics: BTreeMap::new(),
        }
    }

    pub(crate) fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn diag(&mut self, key: &str, value: f64) {
        self.diagnostics.insert(key.into(), value);
    }

    /// Diagnostic by name; panics on a missing key, which is a caller bug.
    pub fn get(&self, key: &str) -> f64 {
        *self
            .diagnostics
            .get(key)
            .unwrap_or_else(|| panic!("no diagnostic `{key}` in {} report", self.experiment))
    }
}

/// Seed of sample `i` of experiment `name`.
///
/// Samples of one experiment share seeds across `p` and `N`, so cells along a
/// ladder are coupled; different experiments draw independent environments.
pub fn sample_seed(base: u64, name: &str, i: u64) -> u64 {
    // FNV-1a
    let tag = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    mix64(mix64(base ^ tag).wrapping_add(i.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}
