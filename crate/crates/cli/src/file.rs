//! Witness file format, version 1.

use std::path::Path;
use std::sync::Arc;

use bq_witness::geom::Point;
use bq_witness::rigidity::Framework;
use bq_witness::witness::{Claim, GadgetNode, Pair, WitnessSet};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const VERSION: &str = "1";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessFile {
    pub version: String,
    pub dim: usize,
    pub points: Vec<Point>,
    pub approx_points: Vec<Vec<f64>>,
    pub unit_edges: Vec<Pair>,
    pub claims: Vec<Claim>,
    pub derivation: Arc<GadgetNode>,
    pub approximate: bool,
}

impl From<&WitnessSet> for WitnessFile {
    fn from(w: &WitnessSet) -> Self {
        WitnessFile {
            version: VERSION.into(),
            dim: w.dim,
            points: w.points.clone(),
            approx_points: w.points.iter().map(Point::to_f64).collect(),
            unit_edges: w.unit_edges.clone(),
            claims: w.claims.clone(),
            derivation: w.derivation.clone(),
            approximate: w.approximate,
        }
    }
}

impl WitnessFile {
    pub fn into_witness(self) -> Result<WitnessSet, CliError> {
        if self.version != VERSION {
            return Err(CliError::Input(format!("unsupported witness file version {:?}", self.version)));
        }
        if let Some(p) = self.points.iter().find(|p| p.dim() != self.dim) {
            return Err(CliError::Input(format!("point of dimension {} in a {}-dimensional file", p.dim(), self.dim)));
        }
        Ok(WitnessSet {
            dim: self.dim,
            points: self.points,
            unit_edges: self.unit_edges,
            claims: self.claims,
            derivation: self.derivation,
            approximate: self.approximate,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_witness(path: &Path) -> Result<WitnessSet, CliError> {
    let text = read(path)?;
    let file: WitnessFile =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    file.into_witness()
}

/// A framework file, or a witness file whose unit graph is taken.
pub fn load_framework(path: &Path) -> Result<Framework, CliError> {
    let text = read(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if value.get("version").is_some() {
        return Ok(bq_witness::verify::unit_graph(&load_witness(path)?));
    }
    let f: Framework = serde_json::from_value(value).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if f.vertices.iter().any(|v| v.len() != f.dim) {
        return Err(CliError::Input("vertex dimension differs from dim".into()));
    }
    if let Some(&(a, b)) = f.edges.iter().find(|&&(a, b)| a.max(b) >= f.vertices.len()) {
        return Err(CliError::Input(format!("edge ({a}, {b}) out of range")));
    }
    Ok(f)
}
