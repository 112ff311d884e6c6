use serde::{Deserialize, Serialize};

use super::Variant;
use crate::diff::Scalar;
use crate::error::{Error, Result};
use crate::materials::Potential;

const PRETRAINED: &str = include_str!("../../fixtures/pretrained.json");
const CALIBRATED_NEO_HOOKEAN: &str = include_str!("../../fixtures/calibrated_neo_hookean.json");
const CALIBRATED_OGDEN: &str = include_str!("../../fixtures/calibrated_ogden.json");

/// One parameter vector per variant, as stored in the shipped fixtures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterTable {
    pub polyconvex: Vec<f64>,
    pub relaxed: Vec<f64>,
    pub unconstrained: Vec<f64>,
}

impl ParameterTable {
    pub fn get(&self, variant: Variant) -> &[f64] {
        match variant {
            Variant::Polyconvex => &self.polyconvex,
            Variant::Relaxed => &self.relaxed,
            Variant::Unconstrained => &self.unconstrained,
        }
    }

    fn parse(src: &str) -> Self {
        serde_json::from_str(src).expect("shipped parameter fixture is valid")
    }

    /// Parameters after pre-training on Gent-Gent data.
    pub fn pretrained() -> Self {
        Self::parse(PRETRAINED)
    }

    /// Parameters after transfer to the Neo-Hookean full-field dataset.
    pub fn calibrated_neo_hookean() -> Self {
        Self::parse(CALIBRATED_NEO_HOOKEAN)
    }

    /// Parameters after transfer to the Ogden full-field dataset.
    pub fn calibrated_ogden() -> Self {
        Self::parse(CALIBRATED_OGDEN)
    }
}

/// Closed-form sparsified network potential. With `sp(y) = log(1 + e^y)`:
///
/// polyconvex (13 parameters)
/// ```text
/// θ11 sp(2θ12 sp(2θ13 I2)) + θ1 sp(2θ2 sp(2θ3 J)) + θ4 sp(2θ5 sp(2θ6 J))
///   + θ7 sp(2θ8 sp(2θ10 I1 + 2θ9))
/// ```
/// relaxed / unconstrained (9 parameters, same algebraic form)
/// ```text
/// θ1 sp(2θ2 I1 + 2θ3 sp(2θ4 I2)) + θ5 sp(2θ6 sp(2θ7 I2) + 2θ8 sp(2θ9 J))
/// ```
/// The raw form is not normalized; wrap in
/// [`Normalized`](crate::materials::Normalized) for stress use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseModel {
    pub variant: Variant,
    pub theta: Vec<f64>,
}

fn sp2<S: Scalar>(y: S) -> S {
    (y * 2.0).softplus()
}

impl SparseModel {
    pub fn new(variant: Variant, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != Self::n_params_of(variant) {
            return Err(Error::InvalidArgument(format!(
                "{variant} sparse form takes {} parameters, got {}",
                Self::n_params_of(variant),
                theta.len()
            )));
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("non-finite sparse parameter".into()));
        }
        Ok(Self { variant, theta })
    }

    pub fn pretrained(variant: Variant) -> Self {
        Self { variant, theta: ParameterTable::pretrained().get(variant).to_vec() }
    }

    pub fn n_params_of(variant: Variant) -> usize {
        match variant {
            Variant::Polyconvex => 13,
            Variant::Relaxed | Variant::Unconstrained => 9,
        }
    }

    /// Entries that must stay non-negative. For the polyconvex form every
    /// weight except the `J` weights and the `I1` offset; for the other forms
    /// only the outer and hidden weights (input convexity).
    pub fn nonneg_mask(variant: Variant) -> Vec<bool> {
        match variant {
            Variant::Polyconvex => (0..13).map(|k| !matches!(k, 2 | 5 | 8)).collect(),
            Variant::Relaxed | Variant::Unconstrained => {
                (0..9).map(|k| matches!(k, 0 | 2 | 4 | 5 | 7)).collect()
            }
        }
    }
}

impl Potential for SparseModel {
    fn name(&self) -> String {
        format!("sparse {}", self.variant)
    }

    fn params(&self) -> Vec<f64> {
        self.theta.clone()
    }

    fn energy<S: Scalar>(&self, t: &[S], x: [S; 3]) -> S {
        let [i1, i2, j] = x;
        match self.variant {
            Variant::Polyconvex => {
                t[10] * sp2(t[11] * sp2(i2 * t[12]))
                    + t[0] * sp2(t[1] * sp2(j * t[2]))
                    + t[3] * sp2(t[4] * sp2(j * t[5]))
                    + t[6] * sp2(t[7] * sp2(i1 * t[9] + t[8]))
            }
            Variant::Relaxed | Variant::Unconstrained => {
                t[0] * sp2(i1 * t[1] + t[2] * sp2(i2 * t[3]))
                    + t[4] * sp2(t[5] * sp2(i2 * t[6]) + t[7] * sp2(j * t[8]))
            }
        }
    }
}
