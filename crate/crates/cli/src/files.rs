//! On-disk JSON formats for pure states and density matrices.

use std::fs;
use std::path::Path;

use qsl_core::mixed::{CMatrix, DensityMatrix, MixedError};
use qsl_core::spectral::SpectralState;
use qsl_core::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::format::to_json;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexEntry {
    pub re: f64,
    pub im: f64,
}

impl From<ComplexEntry> for Complex64 {
    fn from(c: ComplexEntry) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub energy: f64,
    pub amplitude: ComplexEntry,
}

/// Pure state: `hbar` defaults to 1 and `ground_energy` to the lowest level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_energy: Option<f64>,
    pub levels: Vec<LevelEntry>,
}

impl StateFile {
    /// Fully explicit description of `state`.
    pub fn from_state(state: &SpectralState) -> Self {
        Self {
            hbar: Some(state.hbar()),
            ground_energy: Some(state.ground_energy()),
            levels: state
                .levels()
                .iter()
                .map(|l| LevelEntry {
                    energy: l.energy,
                    amplitude: l.amplitude.into(),
                })
                .collect(),
        }
    }

    pub fn to_state(&self) -> Result<SpectralState, CliError> {
        SpectralState::with_params(
            self.levels.iter().map(|l| (l.energy, l.amplitude.into())),
            self.hbar.unwrap_or(1.0),
            self.ground_energy,
        )
        .map_err(|e| CliError::constraint(format!("invalid state: {e}")))
    }
}

/// Density matrix over the listed energy eigenbasis, `matrix` in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    pub energies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_energy: Option<f64>,
    pub matrix: Vec<ComplexEntry>,
}

impl DensityFile {
    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let dim = self.energies.len();
        if self.matrix.len() != dim * dim {
            return Err(CliError::parse(format!(
                "field `matrix`: expected {} entries for {dim} energies, found {}",
                dim * dim,
                self.matrix.len()
            )));
        }
        let data = self.matrix.iter().map(|&c| c.into()).collect();
        let entries = CMatrix::from_row_major(dim, data).map_err(constraint)?;
        DensityMatrix::new(
            entries,
            self.energies.clone(),
            self.hbar.unwrap_or(1.0),
            self.ground_energy,
        )
        .map_err(constraint)
    }
}

fn constraint(e: MixedError) -> CliError {
    CliError::constraint(format!("invalid density matrix: {e}"))
}

/// Parses a JSON document, naming the offending field on failure.
pub fn parse_document<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value: T = serde_path_to_error::deserialize(&mut de)
        .map_err(|e| CliError::parse(format!("{origin}: field `{}`: {}", e.path(), e.inner())))?;
    de.end()
        .map_err(|e| CliError::parse(format!("{origin}: trailing content: {e}")))?;
    Ok(value)
}

pub fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::parse(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text, &path.display().to_string())
}

pub fn load_state(path: &Path) -> Result<SpectralState, CliError> {
    read_document::<StateFile>(path)?.to_state()
}

pub fn load_density(path: &Path) -> Result<DensityMatrix, CliError> {
    read_document::<DensityFile>(path)?.to_density()
}

pub fn dump_state(state: &SpectralState, path: &Path) -> Result<(), CliError> {
    let mut text = to_json(&StateFile::from_state(state));
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::parse(format!("cannot write {}: {e}", path.display())))
}
