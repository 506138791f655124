//! Run configuration: a single JSON document.

use std::path::{Path, PathBuf};

use casimir_core::materials::{parse_material_json, resolve_material, MaterialError};
use casimir_core::{NumericalSettings, PermittivityModel};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlateKind {
    DielectricDielectric,
    MetalDielectric,
    MetalMetal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    Temperature,
    Separation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Linear
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct NumericsOverrides {
    y_quad_rel_tol: Option<f64>,
    matsubara_rel_tol: Option<f64>,
    l_max_cap: Option<u64>,
    diff_step_fraction: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: Option<PlateKind>,
    materials: [serde_json::Value; 2],
    separation_m: Option<OneOrMany>,
    #[serde(rename = "temperature_K")]
    temperature_k: Option<OneOrMany>,
    sweep: Option<Sweep>,
    #[serde(default)]
    numerics: NumericsOverrides,
    #[serde(rename = "ladder_K")]
    ladder_k: Option<Vec<f64>>,
    residual_tolerance: Option<f64>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

/// Validated configuration with materials resolved.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub materials: [PermittivityModel; 2],
    pub separations: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub numerics: NumericalSettings,
    pub ladder: Option<Vec<f64>>,
    pub residual_tolerance: Option<f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Grid points, separations outermost.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        self.separations
            .iter()
            .flat_map(|&a| self.temperatures.iter().map(move |&t| (a, t)))
            .collect()
    }

    pub fn require_temperatures(&self) -> Result<(), CliError> {
        if self.temperatures.is_empty() {
            Err(CliError::config("temperature_K", "missing"))
        } else {
            Ok(())
        }
    }

    pub fn single_separation(&self) -> Result<f64, CliError> {
        match self.separations.as_slice() {
            [a] => Ok(*a),
            _ => Err(CliError::config("separation_m", "this command needs exactly one separation")),
        }
    }
}

pub fn load(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    parse(&text, base_dir).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;

    let mut materials = Vec::with_capacity(2);
    for (i, value) in raw.materials.iter().enumerate() {
        let field = format!("materials[{i}]");
        let model = match value {
            serde_json::Value::String(name) => resolve_material(name, base_dir),
            serde_json::Value::Object(_) => parse_material_json(value, base_dir),
            _ => return Err(CliError::config(&field, "expected a preset name, file path or material object")),
        }
        .map_err(|e| match e {
            MaterialError::Io { .. } => CliError::Io(format!("{field}: {e}")),
            e => CliError::config(&field, &e.to_string()),
        })?;
        materials.push(model);
    }
    let materials: [PermittivityModel; 2] = materials.try_into().expect("two entries");
    if let Some(kind) = raw.kind {
        check_kind(kind, &materials)?;
    }

    let mut separations = raw.separation_m.map(OneOrMany::into_vec);
    let mut temperatures = raw.temperature_k.map(OneOrMany::into_vec);
    if let Some(sweep) = &raw.sweep {
        let values = sweep_values(sweep)?;
        let (slot, name) = match sweep.variable {
            SweepVariable::Temperature => (&mut temperatures, "temperature_K"),
            SweepVariable::Separation => (&mut separations, "separation_m"),
        };
        if slot.is_some() {
            return Err(CliError::config(name, "given both explicitly and as the sweep variable"));
        }
        *slot = Some(values);
    }
    let separations = separations.ok_or_else(|| CliError::config("separation_m", "missing"))?;
    check_positive("separation_m", &separations)?;
    if let Some(t) = &temperatures {
        check_positive("temperature_K", t)?;
    }
    // nernst-check runs on its ladder and needs no temperature grid.
    let temperatures = temperatures.unwrap_or_default();

    let defaults = NumericalSettings::default();
    let n = raw.numerics;
    let numerics = NumericalSettings {
        y_quad_rel_tol: n.y_quad_rel_tol.unwrap_or(defaults.y_quad_rel_tol),
        matsubara_rel_tol: n.matsubara_rel_tol.unwrap_or(defaults.matsubara_rel_tol),
        l_max_cap: n.l_max_cap.unwrap_or(defaults.l_max_cap),
        diff_step_fraction: n.diff_step_fraction.unwrap_or(defaults.diff_step_fraction),
    };
    numerics.validate().map_err(|e| CliError::config("numerics", &e.to_string()))?;

    if let Some(ladder) = &raw.ladder_k {
        check_positive("ladder_K", ladder)?;
        if ladder.len() < 4 || ladder.windows(2).any(|w| !(w[0] > w[1])) {
            return Err(CliError::config("ladder_K", "need at least 4 strictly decreasing temperatures"));
        }
    }
    if let Some(tol) = raw.residual_tolerance {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(CliError::config("residual_tolerance", "must lie in (0, 1)"));
        }
    }

    Ok(RunConfig {
        materials,
        separations,
        temperatures,
        numerics,
        ladder: raw.ladder_k,
        residual_tolerance: raw.residual_tolerance,
        format: raw.format.unwrap_or(Format::Csv),
        output: raw.output.map(|p| if p.is_absolute() { p } else { base_dir.join(p) }),
    })
}

fn check_positive(field: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::config(field, "empty"));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(CliError::config(field, &format!("values must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn sweep_values(s: &Sweep) -> Result<Vec<f64>, CliError> {
    if s.points < 2 {
        return Err(CliError::config("sweep.points", "must be >= 2"));
    }
    if !(s.start.is_finite() && s.stop.is_finite() && s.start < s.stop) {
        return Err(CliError::config("sweep", "need finite start < stop"));
    }
    if s.spacing == Spacing::Log && !(s.start > 0.0) {
        return Err(CliError::config("sweep.start", "log spacing needs start > 0"));
    }
    let last = (s.points - 1) as f64;
    Ok((0..s.points)
        .map(|i| {
            let f = i as f64 / last;
            match s.spacing {
                Spacing::Linear => s.start + f * (s.stop - s.start),
                Spacing::Log => (s.start.ln() + f * (s.stop / s.start).ln()).exp(),
            }
        })
        .collect())
}

fn is_metal(m: &PermittivityModel) -> bool {
    matches!(
        m,
        PermittivityModel::IdealMetal | PermittivityModel::Drude(_) | PermittivityModel::Plasma(_)
    )
}

fn check_kind(kind: PlateKind, m: &[PermittivityModel; 2]) -> Result<(), CliError> {
    let metals = m.iter().filter(|m| is_metal(m)).count();
    let expected = match kind {
        PlateKind::DielectricDielectric => 0,
        PlateKind::MetalDielectric => 1,
        PlateKind::MetalMetal => 2,
    };
    if metals != expected {
        return Err(CliError::config(
            "kind",
            &format!("{kind:?} does not match materials {} / {}", m[0].kind(), m[1].kind()),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_str(s: &str) -> Result<RunConfig, CliError> {
        parse(s, Path::new("."))
    }

    #[test]
    fn minimal_config() {
        let c = parse_str(r#"{"materials": ["Si-static", "SiO2-static"], "separation_m": 4e-7, "temperature_K": [10, 20]}"#)
            .unwrap();
        assert_eq!(c.grid(), vec![(4e-7, 10.0), (4e-7, 20.0)]);
        assert_eq!(c.format, Format::Csv);
    }

    #[test]
    fn sweeps() {
        let c = parse_str(
            r#"{"materials": ["vacuum", "vacuum"], "separation_m": 1e-6,
                "sweep": {"variable": "temperature", "start": 10, "stop": 1000, "points": 3, "spacing": "log"}}"#,
        )
        .unwrap();
        assert!((c.temperatures[1] - 100.0).abs() < 1e-9);
        let bad = [
            r#"{"materials": ["vacuum", "vacuum"], "separation_m": 1e-6, "sweep": {"variable": "temperature", "start": 10, "stop": 5, "points": 3}}"#,
            r#"{"materials": ["vacuum", "vacuum"], "separation_m": 1e-6, "sweep": {"variable": "temperature", "start": 1, "stop": 5, "points": 1}}"#,
            r#"{"materials": ["vacuum", "vacuum"], "temperature_K": 3, "separation_m": 1e-6, "sweep": {"variable": "temperature", "start": 1, "stop": 5, "points": 2}}"#,
        ];
        for b in bad {
            assert!(matches!(parse_str(b), Err(CliError::Config(_))), "{b}");
        }
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = parse_str(r#"{"materials": ["Si-static", "nope"], "separation_m": 1e-6, "temperature_K": 300}"#)
            .unwrap_err();
        assert!(e.to_string().contains("materials[1]"), "{e}");
        let e = parse_str("{\"materials\": [\"Si-static\", \"Si-static\"],\n \"separation\": 1e-6}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_str(r#"{"materials": ["Si-static", "Si-static"], "separation_m": -1, "temperature_K": 300}"#)
            .unwrap_err();
        assert!(e.to_string().contains("separation_m"), "{e}");
    }

    #[test]
    fn kind_must_match() {
        let ok = r#"{"kind": "metal-dielectric", "materials": ["ideal-metal", "Si-static"], "separation_m": 1e-6, "temperature_K": 300}"#;
        assert!(parse_str(ok).is_ok());
        let bad = ok.replace("metal-dielectric", "metal-metal");
        assert!(matches!(parse_str(&bad), Err(CliError::Config(_))));
    }

    #[test]
    fn inline_material_and_numerics() {
        let c = parse_str(
            r#"{"materials": [{"model": "oscillator", "C": [2.0], "omega": [1e16]}, "ideal-metal"],
                "separation_m": [1e-6, 2e-6], "temperature_K": 300, "numerics": {"l_max_cap": 50}}"#,
        )
        .unwrap();
        assert_eq!(c.numerics.l_max_cap, 50);
        assert_eq!(c.grid().len(), 2);
        let e = parse_str(
            r#"{"materials": ["vacuum", "vacuum"], "separation_m": 1e-6, "temperature_K": 1, "numerics": {"l_max_cap": 1}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("numerics"));
    }
}
