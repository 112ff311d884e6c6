use std::path::Path;

use serde::{Deserialize, Serialize};

use hyperdisc::adjoint::{LbfgsConfig, ObjectiveWeights};
use hyperdisc::fem::{default_specimen, plate, plate_with_holes, LoadSchedule, Mesh2D};
use hyperdisc::sampling::{GrfConfig, SaConfig, SamplerConfig};
use hyperdisc::training::TrainSchedule;

/// Everything a run can be configured with; every section is optional in the
/// TOML file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sampler: SamplerConfig,
    pub sa: SaConfig,
    pub pretrain: PretrainSection,
    pub mesh: MeshSection,
    pub load: LoadSchedule,
    pub noise: GrfConfig,
    pub calibration: ObjectiveWeights,
    pub lbfgs: LbfgsConfig,
    pub validate: ValidateSection,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                Ok(toml::from_str(&text)?)
            }
            None => Ok(Self::default()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PretrainSection {
    pub layers: usize,
    pub hidden: usize,
    /// Epoch count; the reference schedule is compressed proportionally.
    pub epochs: usize,
    pub batch: usize,
    pub test_fraction: f64,
    pub input_penalty: bool,
    pub gate_init: f64,
    pub w_l0: f64,
    pub w_input: f64,
    pub w_indicator: f64,
}

impl Default for PretrainSection {
    fn default() -> Self {
        let s = TrainSchedule::default();
        Self {
            layers: 2,
            hidden: 32,
            epochs: 600,
            batch: s.batch,
            test_fraction: 0.2,
            input_penalty: true,
            gate_init: 3.0,
            w_l0: s.w_l0,
            w_input: s.w_input,
            w_indicator: s.w_indicator,
        }
    }
}

impl PretrainSection {
    pub fn schedule(&self) -> TrainSchedule {
        TrainSchedule {
            batch: self.batch,
            w_l0: self.w_l0,
            w_input: self.w_input,
            w_indicator: self.w_indicator,
            ..TrainSchedule::scaled(self.epochs)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeshKind {
    Plate,
    PlateWithHoles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSection {
    pub kind: MeshKind,
    pub width: f64,
    pub height: f64,
    pub nx: usize,
    pub ny: usize,
    /// `[cx, cy, r]` per hole.
    pub holes: Vec<[f64; 3]>,
}

impl Default for MeshSection {
    fn default() -> Self {
        Self {
            kind: MeshKind::PlateWithHoles,
            width: 3.0,
            height: 5.0,
            nx: 8,
            ny: 14,
            holes: vec![[1.5, 1.25, 0.4], [1.5, 2.5, 0.4], [1.5, 3.75, 0.4]],
        }
    }
}

impl MeshSection {
    pub fn build(&self) -> hyperdisc::Result<Mesh2D> {
        if *self == Self::default() {
            return Ok(default_specimen());
        }
        match self.kind {
            MeshKind::Plate => plate(self.width, self.height, self.nx, self.ny),
            MeshKind::PlateWithHoles => {
                let holes: Vec<_> = self.holes.iter().map(|h| (h[0], h[1], h[2])).collect();
                plate_with_holes(self.width, self.height, self.nx, self.ny, &holes)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    /// Points per canonical curve.
    pub steps: usize,
    /// Axial stretches of the traction-free uniaxial curve.
    pub uniaxial_max: f64,
    pub uniaxial_steps: usize,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self { steps: 80, uniaxial_max: 1.4, uniaxial_steps: 40 }
    }
}
