//! Material definitions on disk and built-in presets.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{
    Conductivity, DcAugmentedModel, DrudeModel, MaterialError, OpticalDataTable, OpticalTableModel,
    OscillatorModel, PermittivityModel, PlasmaModel, Relaxation, TailModel, TemperatureProfile,
};

/// Names accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &[
    "Si-static",
    "SiO2-static",
    "Si-dc",
    "SiO2-dc",
    "ideal-metal",
    "Au-plasma",
    "Au-drude",
    "vacuum",
];

const SI_EPS0: f64 = 11.67;
const SI_OMEGA: f64 = 6.6e15;
const SIO2_EPS0: f64 = 3.84;
const SIO2_OMEGA: f64 = 2.0e16;
const AU_OMEGA_P: f64 = 1.37e16;
const AU_NU: f64 = 5.32e13;

/// Built-in material by name.
pub fn preset(name: &str) -> Option<PermittivityModel> {
    let osc = |eps0, w| OscillatorModel::single(eps0, w).expect("preset parameters are valid");
    let m = match name {
        "Si-static" => PermittivityModel::Oscillator(osc(SI_EPS0, SI_OMEGA)),
        "SiO2-static" => PermittivityModel::Oscillator(osc(SIO2_EPS0, SIO2_OMEGA)),
        "Si-dc" => PermittivityModel::DcAugmented(
            DcAugmentedModel::new(
                osc(SI_EPS0, SI_OMEGA),
                Conductivity::Activated {
                    sigma0_300k: 9.0e8,
                    gap_b_k: 6500.0,
                },
            )
            .expect("preset parameters are valid"),
        ),
        "SiO2-dc" => PermittivityModel::DcAugmented(
            DcAugmentedModel::new(
                osc(SIO2_EPS0, SIO2_OMEGA),
                Conductivity::Activated {
                    sigma0_300k: 1.0e-2,
                    gap_b_k: 6000.0,
                },
            )
            .expect("preset parameters are valid"),
        ),
        "ideal-metal" => PermittivityModel::IdealMetal,
        "Au-plasma" => PermittivityModel::Plasma(PlasmaModel::new(AU_OMEGA_P).expect("valid")),
        "Au-drude" => PermittivityModel::Drude(
            DrudeModel::new(AU_OMEGA_P, Relaxation::Constant(AU_NU)).expect("valid"),
        ),
        "vacuum" => PermittivityModel::Oscillator(OscillatorModel::vacuum()),
        _ => return None,
    };
    Some(m)
}

/// On-disk material definition, discriminated by `"model"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Oscillator {
        #[serde(rename = "C")]
        strengths: Vec<f64>,
        #[serde(rename = "omega")]
        frequencies: Vec<f64>,
        #[serde(default)]
        name: Option<String>,
    },
    Drude {
        omega_p: f64,
        nu: RelaxationSpec,
        #[serde(default)]
        name: Option<String>,
    },
    Plasma {
        omega_p: f64,
        #[serde(default)]
        name: Option<String>,
    },
    IdealMetal {
        #[serde(default)]
        name: Option<String>,
    },
    DcAugmented {
        #[serde(rename = "C")]
        strengths: Vec<f64>,
        #[serde(rename = "omega")]
        frequencies: Vec<f64>,
        #[serde(rename = "sigma0_300K", default)]
        sigma0_300k: Option<f64>,
        #[serde(rename = "gap_b_K", default)]
        gap_b_k: Option<f64>,
        #[serde(default)]
        sigma0_table: Option<Vec<(f64, f64)>>,
        #[serde(default)]
        name: Option<String>,
    },
    OpticalTable {
        table_path: PathBuf,
        #[serde(default)]
        low_tail: Option<TailModel>,
        #[serde(default)]
        high_tail: Option<TailModel>,
        #[serde(default)]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RelaxationSpec {
    Constant(f64),
    Table(Vec<(f64, f64)>),
}

impl MaterialSpec {
    /// Builds the model; relative table paths resolve against `base_dir`.
    pub fn build(self, base_dir: &Path) -> Result<PermittivityModel, MaterialError> {
        Ok(match self {
            MaterialSpec::Oscillator {
                strengths,
                frequencies,
                ..
            } => PermittivityModel::Oscillator(OscillatorModel::new(strengths, frequencies)?),
            MaterialSpec::Drude { omega_p, nu, .. } => {
                let relaxation = match nu {
                    RelaxationSpec::Constant(v) => Relaxation::Constant(v),
                    RelaxationSpec::Table(t) => Relaxation::Tabulated(TemperatureProfile::new(t)?),
                };
                PermittivityModel::Drude(DrudeModel::new(omega_p, relaxation)?)
            }
            MaterialSpec::Plasma { omega_p, .. } => PermittivityModel::Plasma(PlasmaModel::new(omega_p)?),
            MaterialSpec::IdealMetal { .. } => PermittivityModel::IdealMetal,
            MaterialSpec::DcAugmented {
                strengths,
                frequencies,
                sigma0_300k,
                gap_b_k,
                sigma0_table,
                ..
            } => {
                let conductivity = match (sigma0_300k, gap_b_k, sigma0_table) {
                    (Some(s), Some(b), None) => Conductivity::Activated {
                        sigma0_300k: s,
                        gap_b_k: b,
                    },
                    (None, None, Some(t)) => Conductivity::Tabulated(TemperatureProfile::new(t)?),
                    _ => {
                        return Err(MaterialError::Invalid(
                            "dc_augmented needs either sigma0_300K with gap_b_K, or sigma0_table".into(),
                        ))
                    }
                };
                PermittivityModel::DcAugmented(DcAugmentedModel::new(
                    OscillatorModel::new(strengths, frequencies)?,
                    conductivity,
                )?)
            }
            MaterialSpec::OpticalTable {
                table_path,
                low_tail,
                high_tail,
                ..
            } => {
                let path = if table_path.is_absolute() {
                    table_path
                } else {
                    base_dir.join(table_path)
                };
                let table = read_optical_csv(&path)?;
                PermittivityModel::OpticalTable(OpticalTableModel::new(
                    table,
                    low_tail.unwrap_or(TailModel::DEFAULT_LOW),
                    high_tail.unwrap_or(TailModel::DEFAULT_HIGH),
                )?)
            }
        })
    }
}

/// Parses a material definition from a JSON value.
pub fn parse_material_json(
    value: &serde_json::Value,
    base_dir: &Path,
) -> Result<PermittivityModel, MaterialError> {
    let spec: MaterialSpec = serde_json::from_value(value.clone()).map_err(|e| MaterialError::Parse {
        path: base_dir.display().to_string(),
        message: e.to_string(),
    })?;
    spec.build(base_dir)
}

/// Reads a JSON material definition from disk.
pub fn load_material_file(path: &Path) -> Result<PermittivityModel, MaterialError> {
    let text = std::fs::read_to_string(path).map_err(|e| MaterialError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let spec: MaterialSpec = serde_json::from_str(&text).map_err(|e| MaterialError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    spec.build(path.parent().unwrap_or(Path::new(".")))
}

/// A preset name, or else a path to a JSON definition.
pub fn resolve_material(name_or_path: &str, base_dir: &Path) -> Result<PermittivityModel, MaterialError> {
    if let Some(m) = preset(name_or_path) {
        return Ok(m);
    }
    let path = Path::new(name_or_path);
    let path = if path.is_absolute() {
        path.to_path_buf()
    } else {
        base_dir.join(path)
    };
    if !path.exists() {
        return Err(MaterialError::Invalid(format!(
            "'{name_or_path}' is neither a preset ({}) nor an existing file",
            PRESET_NAMES.join(", ")
        )));
    }
    load_material_file(&path)
}

/// Reads `omega_rad_s,eps2` rows; lines starting with `#` are comments.
fn read_optical_csv(path: &Path) -> Result<OpticalDataTable, MaterialError> {
    let parse_err = |message: String| MaterialError::Parse {
        path: path.display().to_string(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| MaterialError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    let headers = reader.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "omega_rad_s" || &headers[1] != "eps2" {
        return Err(parse_err(format!(
            "expected header 'omega_rad_s,eps2', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut omega = Vec::new();
    let mut eps2 = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| parse_err(e.to_string()))?;
        let field = |k: usize| -> Result<f64, MaterialError> {
            row[k]
                .parse::<f64>()
                .map_err(|e| parse_err(format!("row {}: '{}': {e}", i + 1, &row[k])))
        };
        omega.push(field(0)?);
        eps2.push(field(1)?);
    }
    OpticalDataTable::new(omega, eps2).map_err(|e| parse_err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{eval_eps, static_eps, StaticPermittivity};
    use serde_json::json;
    use std::io::Write;

    #[test]
    fn presets_resolve() {
        for name in PRESET_NAMES {
            assert!(preset(name).is_some(), "{name}");
        }
        assert_eq!(static_eps(&preset("Si-static").unwrap()), StaticPermittivity::Finite(11.67));
        assert!(preset("unobtainium").is_none());
    }

    #[test]
    fn json_models() {
        let here = Path::new(".");
        let m = parse_material_json(&json!({"model": "oscillator", "C": [10.67], "omega": [6e15]}), here).unwrap();
        assert!((eval_eps(&m, 6e15, None).unwrap() - 6.335).abs() < 1e-12);
        let m = parse_material_json(&json!({"model": "drude", "omega_p": 1.37e16, "nu": 5.32e13}), here).unwrap();
        assert_eq!(m.kind(), "drude");
        let m = parse_material_json(
            &json!({"model": "drude", "omega_p": 1.37e16, "nu": [[0.0, 1e12], [300.0, 5e13]]}),
            here,
        )
        .unwrap();
        assert!(m.is_temperature_dependent());
        let m = parse_material_json(
            &json!({"model": "dc_augmented", "C": [2.84], "omega": [2e16], "sigma0_300K": 1e-2, "gap_b_K": 6000.0}),
            here,
        )
        .unwrap();
        assert_eq!(m.kind(), "dc_augmented");
        assert!(parse_material_json(&json!({"model": "ideal_metal"}), here).is_ok());
    }

    #[test]
    fn json_errors() {
        let here = Path::new(".");
        assert!(matches!(
            parse_material_json(&json!({"model": "oscillator", "C": [1.0]}), here),
            Err(MaterialError::Parse { .. })
        ));
        assert!(matches!(
            parse_material_json(&json!({"model": "aether"}), here),
            Err(MaterialError::Parse { .. })
        ));
        assert!(matches!(
            parse_material_json(&json!({"model": "plasma", "omega_p": 1e16, "extra": 1}), here),
            Err(MaterialError::Parse { .. })
        ));
        assert!(matches!(
            parse_material_json(&json!({"model": "plasma", "omega_p": -1.0}), here),
            Err(MaterialError::Domain { .. })
        ));
        assert!(parse_material_json(
            &json!({"model": "dc_augmented", "C": [2.84], "omega": [2e16], "sigma0_300K": 1e-2}),
            here
        )
        .is_err());
    }

    #[test]
    fn optical_table_from_files() {
        let dir = tempfile::tempdir().unwrap();
        let csv_path = dir.path().join("abs.csv");
        let mut f = std::fs::File::create(&csv_path).unwrap();
        writeln!(f, "# synthetic absorption band").unwrap();
        writeln!(f, "omega_rad_s,eps2").unwrap();
        for i in 0..=200 {
            let w = 1e15 * 10f64.powf(-1.0 + 2.0 * i as f64 / 200.0);
            let e2 = 2.0 * (-(w / 1e15).ln().powi(2) * 8.0).exp();
            writeln!(f, "{w:e},{e2:e}").unwrap();
        }
        drop(f);
        let json_path = dir.path().join("mat.json");
        std::fs::write(
            &json_path,
            r#"{"model": "optical_table", "table_path": "abs.csv", "low_tail": "none", "high_tail": {"power_law": -3.0}}"#,
        )
        .unwrap();
        let m = load_material_file(&json_path).unwrap();
        let eps0 = static_eps(&m).finite().unwrap();
        assert!(eps0 > 1.0);
        let mut prev = eps0;
        for xi in [1e13, 1e14, 1e15, 1e16] {
            let e = eval_eps(&m, xi, None).unwrap();
            assert!(e < prev && e > 1.0);
            prev = e;
        }
        let via_resolve = resolve_material("mat.json", dir.path()).unwrap();
        assert_eq!(via_resolve, m);

        std::fs::write(dir.path().join("bad.csv"), "omega,eps2\n1,2\n3,4\n").unwrap();
        std::fs::write(
            dir.path().join("bad.json"),
            r#"{"model": "optical_table", "table_path": "bad.csv"}"#,
        )
        .unwrap();
        assert!(matches!(
            load_material_file(&dir.path().join("bad.json")),
            Err(MaterialError::Parse { .. })
        ));
        assert!(matches!(
            load_material_file(&dir.path().join("missing.json")),
            Err(MaterialError::Io { .. })
        ));
        assert!(resolve_material("no-such-material", dir.path()).is_err());
    }
}
