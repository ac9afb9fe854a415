use serde::{Deserialize, Serialize};
use time::format_description::well_known::Rfc3339;
use time::OffsetDateTime;

use membrane::montecarlo::ExperimentConfig;

/// What was run, with which settings, and which files it produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Preset name for `verify`, otherwise the subcommand.
    pub preset: String,
    pub config: ExperimentConfig,
    pub version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(preset: impl Into<String>, config: ExperimentConfig, outputs: Vec<String>) -> Self {
        Self {
            preset: preset.into(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: OffsetDateTime::now_utc()
                .format(&Rfc3339)
                .unwrap_or_default(),
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut cfg = ExperimentConfig::default();
        cfg.experiment.dt = Some(2.5e-5);
        let m = RunManifest::new("eq28-split", cfg, vec!["out/report.csv".into()]);
        assert_eq!(RunManifest::from_json(&m.to_json()).unwrap(), m);
        assert!(m.timestamp.ends_with('Z'));
    }
}
