//! Job configuration: a single JSON document, validated before anything runs.

use std::path::{Path, PathBuf};

use canon_core::cartan::{CartanDatum, CartanSpec, Weight};
use canon_core::precanon::Mode;
use canon_core::uq::udot::UdotWord;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_TRUNCATION: usize = 32;
pub const DEFAULT_DEPTH: usize = 16;
pub const DEFAULT_TRIALS: usize = 100;
pub const HECKE_RANK_CAP: usize = 5;

/// A named type (`"A2"`) or an explicit matrix with symmetrizer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CartanInput {
    Name(String),
    Spec(CartanSpec),
}

impl CartanInput {
    pub fn datum(&self) -> Result<CartanDatum, CliError> {
        let d = match self {
            CartanInput::Name(n) => CartanDatum::by_name(n),
            CartanInput::Spec(s) => CartanDatum::from_spec(s),
        };
        d.map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Every key is optional; each subcommand reads the ones it needs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cartan: Option<CartanInput>,
    /// Signed weights in fundamental-weight coordinates, one per factor.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<i64>>>,
    /// Node sequence `p`; defaults to the cyclic sequence with an auto-grown window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<Vec<usize>>,
    /// Fixed enumeration window (prefix length of the cyclic node sequence); ignored with `nodes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    /// Target weights; absent means every weight space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<Mode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Symmetric group `S_rank` for `hecke`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    /// `n` in `u 1_n` for `udot`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub words: Option<Vec<UdotWord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    /// Negative control for `klr-selftest`: replace `Q_01` of A2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt_q: Option<bool>,
    /// A serialized pre-canonical structure for `dual`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl JobConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn datum_or(&self, default: &str) -> Result<CartanDatum, CliError> {
        self.cartan.clone().unwrap_or(CartanInput::Name(default.into())).datum()
    }

    pub fn weight_list(&self, datum: &CartanDatum) -> Result<Vec<Weight>, CliError> {
        let ws = self.weights.as_ref().ok_or_else(|| CliError::Config("missing key \"weights\"".into()))?;
        if ws.is_empty() {
            return Err(CliError::Config("no factors".into()));
        }
        ws.iter()
            .map(|w| {
                let w = Weight(w.clone());
                datum.check_weight(&w).map_err(|e| CliError::Config(e.to_string()))?;
                Ok(w)
            })
            .collect()
    }

    pub fn node_sequence(&self, datum: &CartanDatum) -> Option<Vec<usize>> {
        self.nodes.clone().or_else(|| self.window.map(|w| datum.cyclic_nodes(w)))
    }

    pub fn mode(&self) -> Mode {
        self.mode.unwrap_or(Mode::Gs)
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<JobConfig, serde_json::Error> {
        serde_json::from_str(s)
    }

    #[test]
    fn cartan_by_name() {
        let c = parse(r#"{"cartan": "A2"}"#).unwrap();
        assert_eq!(c.datum_or("A1").unwrap().rank(), 2);
        assert_eq!(JobConfig::default().datum_or("A1").unwrap().rank(), 1);
        assert!(parse(r#"{"cartan": "B9"}"#).unwrap().datum_or("A1").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse(r#"{"weigths": [[1]]}"#).is_err());
    }

    #[test]
    fn weights_are_checked() {
        let d = CartanDatum::a1();
        assert!(matches!(parse(r#"{"weights": []}"#).unwrap().weight_list(&d), Err(CliError::Config(m)) if m == "no factors"));
        assert!(parse(r#"{}"#).unwrap().weight_list(&d).is_err());
        assert!(parse(r#"{"weights": [[1, 0]]}"#).unwrap().weight_list(&d).is_err());
        assert_eq!(parse(r#"{"weights": [[1], [-2]]}"#).unwrap().weight_list(&d).unwrap().len(), 2);
    }

    #[test]
    fn window_expands_to_cyclic_nodes() {
        let d = CartanDatum::a2();
        assert_eq!(parse(r#"{"window": 3}"#).unwrap().node_sequence(&d), Some(vec![0, 1, 0]));
        assert_eq!(parse(r#"{"window": 3, "nodes": [1]}"#).unwrap().node_sequence(&d), Some(vec![1]));
        assert_eq!(JobConfig::default().node_sequence(&d), None);
    }
}
