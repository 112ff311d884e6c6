use std::path::Path;

use serde::{Deserialize, Serialize};

use super::mesh::Mesh2D;
use super::solve::{reaction_force, solve_increment, Dirichlet, NewtonOptions};
use crate::error::{Error, Result};
use crate::materials::Potential;
use crate::sampling::{grf_noise, GrfConfig};

/// Displacement-controlled loading of the top edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LoadSchedule {
    /// Final top-edge displacement.
    pub total: f64,
    pub increments: usize,
    /// 1-based increments whose states are recorded.
    pub record: Vec<usize>,
    pub fix_top_ux: bool,
}

impl Default for LoadSchedule {
    fn default() -> Self {
        Self { total: 2.5, increments: 25, record: vec![1, 5, 10, 15, 20, 25], fix_top_ux: true }
    }
}

impl LoadSchedule {
    pub fn prescribed(&self, step: usize) -> f64 {
        self.total * step as f64 / self.increments as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.increments == 0 || self.record.iter().any(|&s| s == 0 || s > self.increments) {
            return Err(Error::InvalidArgument(format!(
                "recorded steps {:?} outside 1..={}",
                self.record, self.increments
            )));
        }
        Ok(())
    }
}

/// Converged state after one increment.
#[derive(Clone, Debug, PartialEq)]
pub struct StepState {
    pub step: usize,
    pub prescribed: f64,
    pub u: Vec<f64>,
    pub force: f64,
    pub iterations: Vec<usize>,
}

fn specimen_height(mesh: &Mesh2D) -> f64 {
    let ys = mesh.nodes.iter().map(|p| p[1]);
    ys.clone().fold(f64::NEG_INFINITY, f64::max) - ys.fold(f64::INFINITY, f64::min)
}

/// Solve every increment of `schedule` in turn.
pub fn solve_path<M: Potential + ?Sized>(
    mesh: &Mesh2D,
    m: &M,
    schedule: &LoadSchedule,
    opts: &NewtonOptions,
) -> Result<Vec<StepState>> {
    schedule.validate()?;
    let top = mesh.set("top")?;
    let mut u = vec![0.0; mesh.n_dofs()];
    let mut out = Vec::with_capacity(schedule.increments);
    for step in 1..=schedule.increments {
        let prescribed = schedule.prescribed(step);
        let bc = Dirichlet::tensile(mesh, prescribed, schedule.fix_top_ux)?;
        let inc = solve_increment(mesh, m, &u, &bc, opts)?;
        u = inc.u;
        let force = reaction_force(mesh, m, &u, top, 1)?;
        out.push(StepState { step, prescribed, u: u.clone(), force, iterations: inc.iterations });
    }
    Ok(out)
}

/// One recorded frame of a synthetic full-field experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DicStep {
    pub step: usize,
    /// Nominal strain `prescribed / height`.
    pub strain: f64,
    pub prescribed: f64,
    /// Nodal displacements (x, y interleaved), noise included.
    pub u: Vec<f64>,
    /// Noise-free top-edge reaction force.
    pub force: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DicDataset {
    pub schedule: LoadSchedule,
    pub noise: GrfConfig,
    pub seed: u64,
    pub steps: Vec<DicStep>,
}

impl DicDataset {
    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }
}

/// Simulate `schedule` with `m` and record displacements plus correlated
/// noise of root-mean-square `noise.relative_amplitude · max|u|` per frame.
pub fn synth_dic<M: Potential + ?Sized>(
    mesh: &Mesh2D,
    m: &M,
    schedule: &LoadSchedule,
    noise: &GrfConfig,
    seed: u64,
) -> Result<DicDataset> {
    let states = solve_path(mesh, m, schedule, &NewtonOptions::default())?;
    let height = specimen_height(mesh);
    let mut steps = Vec::with_capacity(schedule.record.len());
    for &k in &schedule.record {
        let s = &states[k - 1];
        let peak = (0..mesh.n_nodes()).map(|n| s.u[2 * n].hypot(s.u[2 * n + 1])).fold(0.0, f64::max);
        let amp = noise.relative_amplitude * peak;
        let field = grf_noise(mesh, noise.corr_len, amp, seed.wrapping_mul(1_000_003).wrapping_add(k as u64))?;
        let u = s.u.iter().zip(&field).map(|(a, b)| a + b).collect();
        steps.push(DicStep { step: k, strain: s.prescribed / height, prescribed: s.prescribed, u, force: s.force });
    }
    Ok(DicDataset { schedule: schedule.clone(), noise: *noise, seed, steps })
}
