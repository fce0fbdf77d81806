//! Experiment configuration: a TOML file whose dotted key paths
//! (`geometry.elements`, `sweep.snr_db`, ...) double as CLI override names.

use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: GeometryConfig,
    pub scenario: ScenarioConfig,
    pub attacker: AttackerSpec,
    pub sweep: SweepConfig,
    pub mc: McConfig,
    pub fig2: Fig2Config,
    pub fig3: Fig3Config,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub elements: usize,
    pub spacing_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub theta_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Explicit,
    RandomPhase,
    WorstCase,
    WorstCaseUnconstrainedMagnitudes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackerSpec {
    /// Number of attacker antennas `L`.
    pub count: usize,
    /// Scenario variants: every component sits at `theta + offset`.
    pub offsets_deg: Vec<f64>,
    pub strategy: StrategyKind,
    /// Random-phase realizations averaged by `fig3`.
    pub realizations: usize,
    /// Explicit weights as `[re, im]` pairs; empty means `1/sqrt(L)` each.
    #[serde(default)]
    pub precoding: Vec<[f64; 2]>,
    /// Optional extra per-component offsets added to each variant offset.
    #[serde(default)]
    pub component_offsets_deg: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// `[start, stop, step]`, stop inclusive.
    pub snr_db: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig2Config {
    pub elements: Vec<usize>,
    pub offset_stop_deg: f64,
    pub offset_step_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Config {
    pub counts: Vec<usize>,
    pub offset_deg: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub svg: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig {
                elements: 16,
                spacing_ratio: 0.5,
            },
            scenario: ScenarioConfig { theta_deg: 10.0 },
            attacker: AttackerSpec {
                count: 1,
                offsets_deg: vec![0.0, 0.25, 0.5],
                strategy: StrategyKind::Explicit,
                realizations: 200,
                precoding: Vec::new(),
                component_offsets_deg: Vec::new(),
            },
            sweep: SweepConfig {
                snr_db: [0.0, 50.0, 5.0],
            },
            mc: McConfig {
                trials: 4000,
                seed: 2024,
            },
            fig2: Fig2Config {
                elements: vec![4, 8, 16, 32],
                offset_stop_deg: 1.0,
                offset_step_deg: 0.01,
            },
            fig3: Fig3Config {
                counts: vec![2, 4],
                offset_deg: 0.5,
            },
            output: OutputConfig::default(),
        }
    }
}

fn collect_paths(prefix: &str, table: &Table, out: &mut Vec<String>) {
    for (k, v) in table {
        let path = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            Value::Table(t) => collect_paths(&path, t, out),
            _ => out.push(path),
        }
    }
}

fn known_keys() -> Vec<String> {
    let mut keys = Vec::new();
    collect_paths("", &ExperimentConfig::default().to_table(), &mut keys);
    keys.extend(
        [
            "attacker.precoding",
            "attacker.component_offsets_deg",
            "output.csv",
            "output.svg",
        ]
        .map(String::from),
    );
    keys.sort();
    keys.dedup();
    keys
}

fn check_keys(table: &Table) -> Result<()> {
    let known = known_keys();
    let mut found = Vec::new();
    collect_paths("", table, &mut found);
    for key in found {
        if !known.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
    }
    Ok(())
}

fn merge(base: &mut Table, overlay: Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::config(key, "empty key"))?;
    let mut cur = table;
    for p in parts {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{p}` is not a table")))?;
    }
    cur.insert(leaf.to_string(), value);
    Ok(())
}

/// Parses a CLI value as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    let doc = format!("v = {raw}");
    match doc.parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| Value::String(raw.to_string())),
        Err(_) => Value::String(raw.to_string()),
    }
}

fn first_key_in(message: &str) -> String {
    // toml reports the failing key in backticks
    message
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "<document>".to_string())
}

impl ExperimentConfig {
    pub fn to_table(&self) -> Table {
        Table::try_from(self).expect("config always serializes")
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Defaults, overlaid with the TOML document `text`, overlaid with
    /// `overrides` (dotted key, raw value) in order.
    pub fn from_sources(text: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let mut table = Self::default().to_table();
        if let Some(text) = text {
            let doc: Table = text
                .parse()
                .map_err(|e: toml::de::Error| Error::config(first_key_in(e.message()), e.message().trim()))?;
            check_keys(&doc)?;
            merge(&mut table, doc);
        }
        for (key, raw) in overrides {
            if !known_keys().contains(key) {
                return Err(Error::config(key.clone(), "unknown key"));
            }
            set_path(&mut table, key, parse_value(raw))?;
        }
        let cfg: Self = serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
            let key = e.path().to_string();
            Error::config(key, e.into_inner().message().trim())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::from_sources(Some(text), &[])
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_sources(Some(&text), overrides)
    }

    pub fn validate(&self) -> Result<()> {
        if self.geometry.elements < 2 {
            return Err(Error::config("geometry.elements", "must be at least 2"));
        }
        if !(self.geometry.spacing_ratio.is_finite() && self.geometry.spacing_ratio > 0.0) {
            return Err(Error::config("geometry.spacing_ratio", "must be finite and > 0"));
        }
        if !(self.scenario.theta_deg.is_finite() && self.scenario.theta_deg.abs() <= 90.0) {
            return Err(Error::config("scenario.theta_deg", "must lie in [-90, 90]"));
        }
        let a = &self.attacker;
        if a.count == 0 {
            return Err(Error::config("attacker.count", "must be at least 1"));
        }
        if a.offsets_deg.is_empty() || a.offsets_deg.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("attacker.offsets_deg", "needs at least one finite offset"));
        }
        if a.realizations == 0 {
            return Err(Error::config("attacker.realizations", "must be at least 1"));
        }
        if !a.precoding.is_empty() {
            if a.strategy != StrategyKind::Explicit {
                return Err(Error::config("attacker.precoding", "only valid with strategy = \"explicit\""));
            }
            if a.precoding.len() != a.count {
                return Err(Error::config(
                    "attacker.precoding",
                    format!("has {} weights, attacker.count is {}", a.precoding.len(), a.count),
                ));
            }
        }
        if !a.component_offsets_deg.is_empty() && a.component_offsets_deg.len() != a.count {
            return Err(Error::config(
                "attacker.component_offsets_deg",
                format!("has {} entries, attacker.count is {}", a.component_offsets_deg.len(), a.count),
            ));
        }
        let [start, stop, step] = self.sweep.snr_db;
        if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
            return Err(Error::config("sweep.snr_db", "expected [start, stop, step] with step > 0 and stop >= start"));
        }
        if self.mc.trials == 0 {
            return Err(Error::config("mc.trials", "must be at least 1"));
        }
        if self.fig2.elements.is_empty() || self.fig2.elements.iter().any(|&m| m < 2) {
            return Err(Error::config("fig2.elements", "needs entries >= 2"));
        }
        if !(self.fig2.offset_step_deg > 0.0 && self.fig2.offset_stop_deg >= 0.0) {
            return Err(Error::config("fig2.offset_step_deg", "step must be > 0 and stop >= 0"));
        }
        if self.fig3.counts.is_empty() || self.fig3.counts.contains(&0) {
            return Err(Error::config("fig3.counts", "needs entries >= 1"));
        }
        if !self.fig3.offset_deg.is_finite() {
            return Err(Error::config("fig3.offset_deg", "must be finite"));
        }
        Ok(())
    }

    /// The SNR sweep points in dB, stop inclusive.
    pub fn snr_points(&self) -> Vec<f64> {
        let [start, stop, step] = self.sweep.snr_db;
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|i| start + i as f64 * step).collect()
    }

    pub fn fig2_offsets(&self) -> Vec<f64> {
        let n = (self.fig2.offset_stop_deg / self.fig2.offset_step_deg + 1e-9).floor() as usize + 1;
        (0..n).map(|i| i as f64 * self.fig2.offset_step_deg).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_mirror_the_reference_setup() {
        let c = ExperimentConfig::default();
        assert_eq!(c.geometry.elements, 16);
        assert_eq!(c.geometry.spacing_ratio, 0.5);
        assert_eq!(c.scenario.theta_deg, 10.0);
        assert_eq!(c.attacker.count, 1);
        assert_eq!(c.snr_points().first(), Some(&0.0));
        assert_eq!(c.snr_points().last(), Some(&50.0));
        assert_eq!(c.snr_points().len(), 11);
        assert_eq!(c.fig2_offsets().len(), 101);
        assert_eq!(c.attacker.realizations, 200);
    }

    #[test]
    fn round_trip_is_idempotent() {
        let mut c = ExperimentConfig::default();
        c.attacker.precoding = vec![[0.5, -0.5]];
        c.output.csv = Some("out.csv".into());
        let text = c.to_toml_string();
        let back = ExperimentConfig::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.to_toml_string(), text);
    }

    #[test]
    fn partial_file_overlays_defaults() {
        let c = ExperimentConfig::parse("[geometry]\nelements = 32\n").unwrap();
        assert_eq!(c.geometry.elements, 32);
        assert_eq!(c.geometry.spacing_ratio, 0.5);
    }

    #[test]
    fn overrides_win_over_file() {
        let c = ExperimentConfig::from_sources(
            Some("[mc]\ntrials = 10\n"),
            &[
                ("mc.trials".into(), "20".into()),
                ("attacker.strategy".into(), "worst_case".into()),
                ("sweep.snr_db".into(), "[10, 20, 5]".into()),
            ],
        )
        .unwrap();
        assert_eq!(c.mc.trials, 20);
        assert_eq!(c.attacker.strategy, StrategyKind::WorstCase);
        assert_eq!(c.snr_points(), vec![10.0, 15.0, 20.0]);
    }

    fn bad_key(text: &str) -> String {
        match ExperimentConfig::parse(text) {
            Err(Error::Config { key, .. }) => key,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics_name_the_key() {
        assert_eq!(bad_key("[geometry]\nelements = 1\n"), "geometry.elements");
        assert_eq!(bad_key("[geometry]\ncolour = 3\n"), "geometry.colour");
        assert_eq!(bad_key("[sweep]\nsnr_db = [0, 10, -1]\n"), "sweep.snr_db");
        assert_eq!(bad_key("[mc]\ntrials = 0\n"), "mc.trials");
        assert_eq!(bad_key("[attacker]\nprecoding = [[1.0, 0.0], [0.0, 1.0]]\n"), "attacker.precoding");
        assert_eq!(bad_key("[attacker]\nstrategy = \"sneaky\"\n"), "attacker.strategy");
        assert_eq!(bad_key("[mc]\nseed = \"abc\"\n"), "mc.seed");
        let err = ExperimentConfig::from_sources(None, &[("nope.key".into(), "1".into())]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
