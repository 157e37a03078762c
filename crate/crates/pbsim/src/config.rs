//! JSON run configuration and shipped presets.
//!
//! A configuration file describes one sweep, or a family of sweeps that
//! share a base and differ in labelled variants. All physical inputs are
//! given in units of the atom damping rate; setting `"units":
//! "MHz_over_2pi"` instead interprets every frequency-like field and the
//! axis range as MHz values that are normalised by the supplied `kappa`.
//! Time-axis ranges are always in inverse linewidths.

use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::models::{OneCavityParams, TwoCavityParams};
use crate::sweep::{all_outputs, ModelKind, ModelParams, OutputKind, SolverOptions, SweepAxis, SweepSpec};

/// Frequency-like fields of the one-cavity parameter set.
const ONE_CAVITY_FREQUENCY_FIELDS: &[&str] = &[
    "kappa",
    "gamma_m",
    "gamma_c",
    "gamma_tri",
    "omega_m",
    "delta_c",
    "omega_drive",
    "eps",
    "delta",
];

/// Frequency-like fields of the two-cavity parameter set.
const TWO_CAVITY_FREQUENCY_FIELDS: &[&str] = &[
    "g",
    "g0",
    "j",
    "jm",
    "omega_m",
    "eps",
    "kappa",
    "gamma_m",
];

/// Unit system of the physical inputs in a configuration file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
pub enum Units {
    /// Rates and frequencies are multiples of the atom damping rate.
    #[default]
    #[serde(rename = "kappa")]
    Kappa,
    /// Rates and frequencies are MHz divided by two pi, as figure captions
    /// quote them; they are normalised by the `kappa` field on load.
    #[serde(rename = "MHz_over_2pi")]
    MhzOver2Pi,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelKind,
    axis: SweepAxis,
    range: [f64; 2],
    points: usize,
    #[serde(default)]
    units: Units,
    params: Value,
    #[serde(default)]
    outputs: Option<Vec<OutputKind>>,
    #[serde(default)]
    solver: Option<SolverOptions>,
    #[serde(default)]
    variants: Vec<RawVariant>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    label: String,
    #[serde(default)]
    model: Option<ModelKind>,
    #[serde(default)]
    axis: Option<SweepAxis>,
    #[serde(default)]
    range: Option<[f64; 2]>,
    #[serde(default)]
    points: Option<usize>,
    #[serde(default)]
    params: Option<Value>,
    #[serde(default)]
    outputs: Option<Vec<OutputKind>>,
    #[serde(default)]
    solver: Option<SolverOptions>,
}

/// A sweep ready to run, tagged with its variant label.
///
/// The label is empty for a configuration without variants.
#[derive(Debug, Clone)]
pub struct NamedSweep {
    pub label: String,
    pub spec: SweepSpec,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn as_object(value: &Value, what: &str) -> Result<Map<String, Value>> {
    value
        .as_object()
        .cloned()
        .ok_or_else(|| config_err(format!("{what} must be a JSON object")))
}

fn merge_params(base: &Value, overlay: Option<&Value>) -> Result<Map<String, Value>> {
    let mut merged = as_object(base, "params")?;
    if let Some(overlay) = overlay {
        for (key, value) in as_object(overlay, "variant params")? {
            merged.insert(key, value);
        }
    }
    Ok(merged)
}

fn field_as_f64(params: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match params.get(key) {
        None => Ok(None),
        Some(v) => v
            .as_f64()
            .map(Some)
            .ok_or_else(|| config_err(format!("field {key:?} must be a number"))),
    }
}

/// Divides every frequency-like field by the configured `kappa`, leaving
/// counts and truncations untouched. Returns the scale for range conversion.
fn normalise_params(params: &mut Map<String, Value>, model: ModelKind) -> Result<f64> {
    let scale = field_as_f64(params, "kappa")?
        .ok_or_else(|| config_err("MHz_over_2pi units require an explicit kappa"))?;
    if !(scale.is_finite() && scale > 0.0) {
        return Err(config_err(format!("kappa must be a positive frequency, got {scale}")));
    }
    let fields = match model {
        ModelKind::OneCavity => ONE_CAVITY_FREQUENCY_FIELDS,
        ModelKind::TwoCavityReduced | ModelKind::TwoCavityFull => TWO_CAVITY_FREQUENCY_FIELDS,
    };
    for &key in fields {
        if let Some(v) = field_as_f64(params, key)? {
            params.insert(key.to_string(), Value::from(v / scale));
        }
    }
    Ok(scale)
}

fn typed_params(model: ModelKind, params: Map<String, Value>) -> Result<ModelParams> {
    let value = Value::Object(params);
    let parsed = match model {
        ModelKind::OneCavity => serde_json::from_value::<OneCavityParams>(value)
            .map(ModelParams::OneCavity),
        ModelKind::TwoCavityReduced | ModelKind::TwoCavityFull => {
            serde_json::from_value::<TwoCavityParams>(value).map(ModelParams::TwoCavity)
        }
    };
    parsed.map_err(|e| config_err(format!("invalid params: {e}")))
}

fn valid_label(label: &str) -> bool {
    !label.is_empty()
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// Parses a JSON configuration document into runnable sweeps.
///
/// A document without variants yields one sweep with an empty label; each
/// variant otherwise yields one sweep, with its fields overriding the base.
pub fn parse_config(text: &str) -> Result<Vec<NamedSweep>> {
    let raw: RawConfig =
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid config: {e}")))?;
    let mut sweeps = Vec::new();
    if raw.variants.is_empty() {
        sweeps.push(build_sweep(&raw, None)?);
    } else {
        for variant in &raw.variants {
            if !valid_label(&variant.label) {
                return Err(config_err(format!(
                    "variant label {:?} must be nonempty and use only letters, digits, '_' or '-'",
                    variant.label
                )));
            }
            sweeps.push(build_sweep(&raw, Some(variant))?);
        }
        let mut labels: Vec<&str> = sweeps.iter().map(|s| s.label.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != sweeps.len() {
            return Err(config_err("variant labels must be unique"));
        }
    }
    for sweep in &sweeps {
        sweep.spec.validate()?;
    }
    Ok(sweeps)
}

fn build_sweep(raw: &RawConfig, variant: Option<&RawVariant>) -> Result<NamedSweep> {
    let model = variant.and_then(|v| v.model).unwrap_or(raw.model);
    let axis = variant.and_then(|v| v.axis).unwrap_or(raw.axis);
    let range = variant.and_then(|v| v.range).unwrap_or(raw.range);
    let points = variant.and_then(|v| v.points).unwrap_or(raw.points);
    let outputs = variant
        .and_then(|v| v.outputs.clone())
        .or_else(|| raw.outputs.clone())
        .unwrap_or_else(all_outputs);
    let solver = variant
        .and_then(|v| v.solver.clone())
        .or_else(|| raw.solver.clone())
        .unwrap_or_default();
    let mut params = merge_params(&raw.params, variant.and_then(|v| v.params.as_ref()))?;
    let mut range = (range[0], range[1]);
    if raw.units == Units::MhzOver2Pi {
        let scale = normalise_params(&mut params, model)?;
        if axis != SweepAxis::T {
            range = (range.0 / scale, range.1 / scale);
        }
    }
    let fixed = typed_params(model, params)?;
    Ok(NamedSweep {
        label: variant.map(|v| v.label.clone()).unwrap_or_default(),
        spec: SweepSpec { model, axis, range, points, fixed, outputs, solver },
    })
}

/// Loads and parses a configuration file.
pub fn load_config(path: &Path) -> Result<Vec<NamedSweep>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

const PRESETS: &[(&str, &str)] = &[
    ("fig3", include_str!("../../../configs/fig3.json")),
    ("fig4", include_str!("../../../configs/fig4.json")),
    ("fig6a", include_str!("../../../configs/fig6a.json")),
    ("fig6b", include_str!("../../../configs/fig6b.json")),
    ("fig7", include_str!("../../../configs/fig7.json")),
    ("fig8", include_str!("../../../configs/fig8.json")),
];

/// Names of the shipped presets, in listing order.
pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(name, _)| *name).collect()
}

/// Raw JSON text of a shipped preset.
pub fn preset_text(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
        .ok_or_else(|| {
            config_err(format!(
                "unknown preset {name:?}; available: {}",
                preset_names().join(", ")
            ))
        })
}

/// Parses a shipped preset into runnable sweeps.
pub fn preset(name: &str) -> Result<Vec<NamedSweep>> {
    parse_config(preset_text(name)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_one_cavity_json() -> String {
        r#"{
            "model": "one_cavity",
            "axis": "delta",
            "range": [-0.2, 0.2],
            "points": 11,
            "params": {
                "kappa": 1.0, "gamma_m": 0.01, "gamma_c": 1.0, "gamma_tri": 0.003,
                "omega_m": 280.0, "omega_drive": 83.33, "eps": 0.01, "n_trunc": 6
            }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let sweeps = parse_config(&base_one_cavity_json()).unwrap();
        assert_eq!(sweeps.len(), 1);
        let s = &sweeps[0];
        assert!(s.label.is_empty());
        assert_eq!(s.spec.points, 11);
        assert_eq!(s.spec.outputs, all_outputs());
        assert_eq!(s.spec.solver.dim_cap, 64);
        match &s.spec.fixed {
            ModelParams::OneCavity(p) => {
                assert!((p.omega_drive - 83.33).abs() < 1e-12);
                assert!((p.delta_c).abs() < 1e-12);
                assert_eq!(p.n_trunc, 6);
            }
            _ => panic!("wrong params kind"),
        }
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = base_one_cavity_json().replace("\"points\": 11,", "\"points\": 11, \"bogus\": 1,");
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));
        let text = base_one_cavity_json().replace("\"eps\": 0.01,", "\"eps\": 0.01, \"epz\": 0.01,");
        assert!(matches!(parse_config(&text), Err(Error::Config(_))));
    }

    #[test]
    fn variants_override_base_fields() {
        let text = r#"{
            "model": "one_cavity",
            "axis": "delta",
            "range": [-0.2, 0.2],
            "points": 11,
            "params": {
                "kappa": 1.0, "gamma_m": 0.01, "gamma_c": 1.0, "gamma_tri": 0.003,
                "omega_m": 280.0, "omega_drive": 83.33, "eps": 0.01, "n_trunc": 6
            },
            "outputs": ["g2"],
            "variants": [
                { "label": "a", "params": { "omega_drive": 46.7 } },
                { "label": "b", "axis": "omega_drive", "range": [40.0, 120.0], "points": 5,
                  "outputs": ["g2", "g3"] }
            ]
        }"#;
        let sweeps = parse_config(text).unwrap();
        assert_eq!(sweeps.len(), 2);
        assert_eq!(sweeps[0].label, "a");
        match &sweeps[0].spec.fixed {
            ModelParams::OneCavity(p) => assert!((p.omega_drive - 46.7).abs() < 1e-12),
            _ => panic!("wrong params kind"),
        }
        assert_eq!(sweeps[0].spec.outputs, vec![OutputKind::G2]);
        assert_eq!(sweeps[1].spec.axis, SweepAxis::OmegaDrive);
        assert_eq!(sweeps[1].spec.points, 5);
        assert_eq!(sweeps[1].spec.outputs, vec![OutputKind::G2, OutputKind::G3]);
        match &sweeps[1].spec.fixed {
            ModelParams::OneCavity(p) => assert!((p.omega_drive - 83.33).abs() < 1e-12),
            _ => panic!("wrong params kind"),
        }
    }

    #[test]
    fn duplicate_or_bad_labels_are_rejected() {
        let text = r#"{
            "model": "one_cavity", "axis": "delta", "range": [-0.1, 0.1], "points": 3,
            "params": { "kappa": 1.0, "gamma_m": 0.01, "gamma_c": 1.0, "gamma_tri": 0.003,
                        "omega_m": 280.0, "omega_drive": 83.33, "eps": 0.01, "n_trunc": 4 },
            "variants": [ { "label": "x" }, { "label": "x" } ]
        }"#;
        assert!(matches!(parse_config(text), Err(Error::Config(_))));
        let text = text.replace("{ \"label\": \"x\" }, ", "{ \"label\": \"bad label\" }, ");
        assert!(matches!(parse_config(text.as_str()), Err(Error::Config(_))));
    }

    #[test]
    fn mhz_units_normalise_params_and_range() {
        let text = r#"{
            "model": "one_cavity",
            "axis": "delta",
            "range": [-1.0, 1.0],
            "points": 11,
            "units": "MHz_over_2pi",
            "params": {
                "kappa": 5.0, "gamma_m": 0.05, "gamma_c": 5.0, "gamma_tri": 0.015,
                "omega_m": 1400.0, "omega_drive": 416.65, "eps": 0.05, "n_trunc": 6
            }
        }"#;
        let sweeps = parse_config(text).unwrap();
        let s = &sweeps[0];
        assert!((s.spec.range.0 + 0.2).abs() < 1e-12);
        assert!((s.spec.range.1 - 0.2).abs() < 1e-12);
        match &s.spec.fixed {
            ModelParams::OneCavity(p) => {
                assert_eq!(p.kappa, 1.0);
                assert!((p.gamma_m - 0.01).abs() < 1e-15);
                assert!((p.gamma_tri - 0.003).abs() < 1e-15);
                assert!((p.omega_m - 280.0).abs() < 1e-12);
                assert!((p.omega_drive - 83.33).abs() < 1e-12);
                assert!((p.eps - 0.01).abs() < 1e-15);
            }
            _ => panic!("wrong params kind"),
        }
    }

    #[test]
    fn time_range_is_not_unit_converted() {
        let text = r#"{
            "model": "one_cavity",
            "axis": "t",
            "range": [0.0, 10.0],
            "points": 5,
            "units": "MHz_over_2pi",
            "params": {
                "kappa": 5.0, "gamma_m": 0.05, "gamma_c": 5.0, "gamma_tri": 0.015,
                "omega_m": 1400.0, "omega_drive": 416.65, "eps": 0.05, "n_trunc": 6
            }
        }"#;
        let sweeps = parse_config(text).unwrap();
        assert_eq!(sweeps[0].spec.range, (0.0, 10.0));
    }

    #[test]
    fn every_preset_parses_and_validates() {
        for name in preset_names() {
            let sweeps = preset(name).unwrap_or_else(|e| panic!("preset {name}: {e}"));
            assert!(!sweeps.is_empty(), "preset {name} is empty");
            for sweep in &sweeps {
                assert!(
                    sweeps.len() == 1 || !sweep.label.is_empty(),
                    "preset {name} has an unlabelled variant"
                );
            }
        }
        assert!(preset("nope").is_err());
    }
}
