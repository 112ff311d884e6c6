//! Physics-augmented network potentials: the dense input-convex network, the
//! sparsified closed forms it collapses to, and pruned expression trees.

mod expr;
mod icnn;
mod sparse;

pub use expr::{extract_sparse_form, Expr, ExprModel, Extraction};
pub use icnn::{Icnn, IcnnConfig, IcnnLayout};
pub use sparse::{ParameterTable, SparseModel};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Constraint family of a network potential.
///
/// * `Polyconvex` — hidden weights and the `I1`, `I2` input weights are
///   non-negative, so polyconvexity holds by construction.
/// * `Relaxed` — input-convex only; polyconvexity is encouraged through the
///   indicator penalty during training.
/// * `Unconstrained` — input-convex only, no polyconvexity treatment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Polyconvex,
    Relaxed,
    Unconstrained,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Polyconvex, Variant::Relaxed, Variant::Unconstrained];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Polyconvex => "polyconvex",
            Variant::Relaxed => "relaxed",
            Variant::Unconstrained => "unconstrained",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown variant `{s}`")))
    }
}

/// Clamp masked entries of `theta` at zero.
pub fn project_nonneg(theta: &mut [f64], mask: &[bool]) {
    for (t, &m) in theta.iter_mut().zip(mask) {
        if m && *t < 0.0 {
            *t = 0.0;
        }
    }
}

/// First masked entry holding a negative value, if any.
pub fn mask_violation(theta: &[f64], mask: &[bool]) -> Option<usize> {
    theta.iter().zip(mask).position(|(&t, &m)| m && t < 0.0)
}
