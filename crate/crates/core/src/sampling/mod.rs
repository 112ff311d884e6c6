//! Training-data construction: Latin-hypercube deformation clouds, spread-out
//! triplet selection, labeling through a reference potential, canonical test
//! curves and spatially correlated noise fields.

mod grf;
mod lhs;
mod select;

pub use grf::{grf_noise, GrfConfig, GrfSampler};
pub use lhs::{lhs_defgrads, MIN_DET};
pub use select::{select_triplets, SaConfig, Selection};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kinematics::{canonical_deformation, invariants_of, reconstruct_diagonal_c, InvariantTriplet, LoadingMode};
use crate::materials::{second_pk_full, second_pk_stress, Potential};
use crate::training::LabeledSample;

/// Cloud and selection sizes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub n_cloud: usize,
    pub delta: f64,
    pub k_select: usize,
    /// Force the undeformed state `(3, 3, 1)` into the selection.
    pub anchor: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { n_cloud: 50_000, delta: 0.2, k_select: 100, anchor: true }
    }
}

/// Selected triplets with the deformation gradients they came from (`None`
/// for the anchor).
#[derive(Clone, Debug)]
pub struct TripletSet {
    pub selection: Selection,
    pub sources: Vec<Option<[f64; 9]>>,
}

/// Full pipeline: LHS cloud, then FPS+SA selection.
pub fn sample_triplets(cfg: &SamplerConfig, sa: &SaConfig, seed: u64) -> Result<TripletSet> {
    let cloud = lhs_defgrads(cfg, seed);
    let triplets: Vec<InvariantTriplet> = cloud.iter().map(|(_, t)| *t).collect();
    let anchor = cfg.anchor.then_some(InvariantTriplet::REFERENCE);
    let selection = select_triplets(&triplets, cfg.k_select, anchor, sa, seed.wrapping_add(1))?;
    let sources = selection.source.iter().map(|s| s.map(|i| cloud[i].0.components())).collect();
    Ok(TripletSet { selection, sources })
}

/// Diagonal second Piola–Kirchhoff stress of `model` at each triplet's
/// reconstructed principal `C`.
pub fn label_with<M: Potential + ?Sized>(model: &M, triplets: &[InvariantTriplet]) -> Result<Vec<LabeledSample>> {
    triplets
        .iter()
        .map(|t| {
            let c = reconstruct_diagonal_c(t)?;
            let s = second_pk_stress(model, c)?;
            Ok(LabeledSample { t: *t, c_diag: c, s_diag: s, f: None })
        })
        .collect()
}

/// Control-parameter range used for canonical test curves.
pub fn canonical_range(mode: LoadingMode) -> (f64, f64) {
    match mode {
        LoadingMode::SimpleShear => (-0.4, 0.4),
        _ => (0.6, 1.4),
    }
}

/// One point of a canonical stress curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    pub control: f64,
    pub t: InvariantTriplet,
    pub energy: f64,
    pub s: Matrix3<f64>,
}

/// Full second Piola–Kirchhoff stress along `steps + 1` evenly spaced controls
/// in `[lo, hi]`.
pub fn canonical_test_data<M: Potential + ?Sized>(
    model: &M,
    mode: LoadingMode,
    lo: f64,
    hi: f64,
    steps: usize,
) -> Result<Vec<CurvePoint>> {
    let steps = steps.max(1);
    (0..=steps)
        .map(|k| {
            let control = lo + (hi - lo) * k as f64 / steps as f64;
            let f = canonical_deformation(mode, control)?;
            let t = invariants_of(&f)?;
            Ok(CurvePoint { control, t, energy: model.value(&t)?, s: second_pk_full(model, &f)? })
        })
        .collect()
}
