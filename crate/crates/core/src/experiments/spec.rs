use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Vertex, Window};

/// Everything a run needs; a run is a pure function of this value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub experiment: String,
    pub p: Vec<f64>,
    /// Height ladder, strictly increasing.
    #[serde(rename = "N")]
    pub n: Vec<i64>,
    pub samples: usize,
    pub seed: u64,
    /// Levels discarded below the horizon; `N / 5` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Origin separations for pair experiments.
    #[serde(default = "default_dx")]
    pub dx: Vec<i64>,
    #[serde(default = "default_u1")]
    pub u1: [i64; 2],
    #[serde(default = "default_u2")]
    pub u2: [i64; 2],
    /// `[x_min, x_max, t_min, t_max]` for forests and snapshots.
    #[serde(default = "default_window")]
    pub window: [i64; 4],
    /// Slope for crossing counts; estimated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
}

fn default_dx() -> Vec<i64> {
    (1..=10).map(|k| 2 * k).collect()
}

fn default_u1() -> [i64; 2] {
    [0, 0]
}

fn default_u2() -> [i64; 2] {
    [2, 0]
}

fn default_window() -> [i64; 4] {
    [-40, 40, 0, 80]
}

fn default_bootstrap() -> usize {
    200
}

pub const EXPERIMENTS: &[&str] = &[
    "theta",
    "alpha",
    "clt",
    "coalescence",
    "symmdiff",
    "kuczek",
    "meeting",
    "branches",
    "succession",
    "crossing",
    "monotone",
    "snapshot",
    "path",
    "breaks",
    "walk",
    "forest",
];

/// Default margin for height `n`.
pub fn margin_for(n: i64, margin: Option<i64>) -> i64 {
    margin.unwrap_or(n / 5)
}

fn invalid(field: &str, msg: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        msg: msg.into(),
    }
}

impl ExperimentSpec {
    /// Defaults for `experiment`, before any file or override is applied.
    pub fn defaults(experiment: &str) -> Self {
        ExperimentSpec {
            experiment: experiment.into(),
            p: vec![0.8],
            n: vec![1000],
            samples: 100,
            seed: 1,
            margin: None,
            out: None,
            dx: default_dx(),
            u1: default_u1(),
            u2: default_u2(),
            window: default_window(),
            alpha: None,
            bootstrap: default_bootstrap(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| Error::Parse {
            line: e
                .span()
                .map_or(0, |s| text[..s.start].matches('\n').count() + 1),
            msg: e.message().to_string(),
        })?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !EXPERIMENTS.contains(&self.experiment.as_str()) {
            return Err(Error::UnknownExperiment(self.experiment.clone()));
        }
        if self.p.is_empty() {
            return Err(invalid("p", "empty grid"));
        }
        if let Some(p) = self.p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid("p", format!("{p} outside [0, 1]")));
        }
        if self.n.is_empty() {
            return Err(invalid("N", "empty ladder"));
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 1) {
            return Err(invalid("N", format!("height {n} below 1")));
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("N", "ladder must be strictly increasing"));
        }
        if self.samples < 1 {
            return Err(invalid("samples", "need at least one sample"));
        }
        if let Some(m) = self.margin {
            let lowest = self.n[0];
            if m < 0 || m >= lowest {
                return Err(invalid("margin", format!("{m} outside [0, {lowest})")));
            }
        }
        if let Some(d) = self.dx.iter().find(|&&d| d < 0 || d % 2 != 0) {
            return Err(invalid(
                "dx",
                format!("{d} is not a nonnegative even offset"),
            ));
        }
        if self.dx.is_empty() {
            return Err(invalid("dx", "empty list"));
        }
        self.origin("u1", self.u1)?;
        self.origin("u2", self.u2)?;
        self.window()?;
        if let Some(a) = self.alpha {
            if !(a > 0.0 && a.is_finite()) {
                return Err(invalid("alpha", format!("{a} must be positive")));
            }
        }
        Ok(())
    }

    fn origin(&self, field: &str, xy: [i64; 2]) -> Result<Vertex> {
        Vertex::new(xy[0], xy[1]).map_err(|e| invalid(field, e.to_string()))
    }

    pub fn u1(&self) -> Result<Vertex> {
        self.origin("u1", self.u1)
    }

    pub fn u2(&self) -> Result<Vertex> {
        self.origin("u2", self.u2)
    }

    pub fn window(&self) -> Result<Window> {
        let [a, b, c, d] = self.window;
        Window::new(a, b, c, d).map_err(|e| invalid("window", e.to_string()))
    }

    pub fn margin_at(&self, n: i64) -> i64 {
        margin_for(n, self.margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let spec = ExperimentSpec::from_toml(
            r#"
experiment = "theta"
p = [0.5, 0.8]
N = [10, 20]
samples = 5
seed = 3
"#,
        )
        .unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.dx, default_dx());
        assert_eq!(spec.margin_at(20), 4);
        assert_eq!(ExperimentSpec::from_toml(&spec.to_toml()).unwrap(), spec);
    }

    #[test]
    fn validation_names_the_field() {
        let mut spec = ExperimentSpec::defaults("theta");
        spec.n = vec![100, 100];
        match spec.validate() {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "N"),
            other => panic!("{other:?}"),
        }
        let mut spec = ExperimentSpec::defaults("theta");
        spec.samples = 0;
        assert!(
            matches!(spec.validate(), Err(Error::Validation { field, .. }) if field == "samples")
        );
        let mut spec = ExperimentSpec::defaults("theta");
        spec.margin = Some(1000);
        assert!(
            matches!(spec.validate(), Err(Error::Validation { field, .. }) if field == "margin")
        );
        let spec = ExperimentSpec::defaults("nope");
        assert_eq!(
            spec.validate(),
            Err(Error::UnknownExperiment("nope".into()))
        );
    }

    #[test]
    fn unknown_keys_and_bad_types_are_parse_errors() {
        assert!(matches!(
            ExperimentSpec::from_toml("experiment = \"theta\"\nbogus = 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        let err = ExperimentSpec::from_toml(
            "experiment = \"theta\"\np = [0.5]\nN = \"x\"\nsamples = 1\nseed = 1\n",
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }
}
