use serde::{Deserialize, Serialize};

use super::Potential;
use crate::diff::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;

const SHIPPED: &str = include_str!("../../fixtures/analytic_materials.json");

/// Reference parameter sets for the three analytic materials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSet {
    pub gent_gent: GentGent,
    pub neo_hookean: NeoHookean,
    pub ogden: Ogden,
}

impl AnalyticSet {
    /// Parameter sets shipped with the crate.
    pub fn shipped() -> Self {
        serde_json::from_str(SHIPPED).expect("shipped analytic material fixture is valid")
    }
}

/// Fraction of the locking stretch beyond which Gent-Gent refuses to evaluate.
pub const GENT_GUARD: f64 = 0.99;

/// Gent-Gent potential with a Gent first-invariant term, a logarithmic
/// second-invariant term and a volumetric penalty.
///
/// `θ = [μ, Jm, κ, C2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GentGent {
    pub mu: f64,
    pub jm: f64,
    pub kappa: f64,
    pub c2: f64,
}

impl Default for GentGent {
    fn default() -> Self {
        let mu = 2.4195;
        Self { mu, jm: 77.931, kappa: 1.20975, c2: 0.75 * mu }
    }
}

impl Potential for GentGent {
    fn name(&self) -> String {
        "gent_gent".into()
    }

    fn params(&self) -> Vec<f64> {
        vec![self.mu, self.jm, self.kappa, self.c2]
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        let (mu, jm, kappa, c2) = (theta[0], theta[1], theta[2], theta[3]);
        let [i1, i2, j] = x;
        let gent = -(mu * jm * 0.5) * (-((i1 - 3.0) / jm) + 1.0).ln();
        let second = -(c2 * (i2 / 3.0).ln());
        let vol = kappa * ((j * j - 1.0) * 0.5 - j.ln());
        gent + second + vol
    }

    fn check_domain(&self, theta: &[f64], t: &InvariantTriplet) -> Result<()> {
        if !(t.j > 0.0) || !(t.i2 > 0.0) {
            return Err(Error::Domain(format!("gent_gent requires I2 > 0 and J > 0, got {t}")));
        }
        let jm = theta[1];
        if !(t.i1 - 3.0 < GENT_GUARD * jm) {
            return Err(Error::Domain(format!(
                "gent_gent locking: I1 - 3 = {} reaches guard band of Jm = {jm}",
                t.i1 - 3.0
            )));
        }
        Ok(())
    }
}

/// Compressible Neo-Hookean potential, `θ = [μ, λ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeoHookean {
    pub mu: f64,
    pub lambda: f64,
}

impl Default for NeoHookean {
    fn default() -> Self {
        Self { mu: 1.0, lambda: 0.333 }
    }
}

impl Potential for NeoHookean {
    fn name(&self) -> String {
        "neo_hookean".into()
    }

    fn params(&self) -> Vec<f64> {
        vec![self.mu, self.lambda]
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        let (mu, lambda) = (theta[0], theta[1]);
        let lnj = x[2].ln();
        mu * (x[0] - 3.0) * 0.5 - mu * lnj + lambda * lnj * lnj * 0.5
    }
}

/// Generalized Ogden-type potential in the isochoric invariants
/// `Ī1 = J^{-2/3} I1`, `Ī2 = J^{-4/3} I2`, three terms per series.
///
/// `θ = [c10, c01, c20, c02, c30, c03, κ]`. The second series is taken
/// exactly as `(Ī2^{-3/2} − 3√3)^j`, which does not vanish at the reference
/// state; wrap in [`Normalized`](super::Normalized) where zero reference
/// energy and stress are needed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ogden {
    pub c10: f64,
    pub c01: f64,
    pub c20: f64,
    pub c02: f64,
    pub c30: f64,
    pub c03: f64,
    pub kappa: f64,
}

impl Default for Ogden {
    fn default() -> Self {
        Self { c10: 1.302, c01: 0.668, c20: 0.261, c02: 0.245, c30: 0.246, c03: 0.143, kappa: 0.831 }
    }
}

impl Potential for Ogden {
    fn name(&self) -> String {
        "ogden".into()
    }

    fn params(&self) -> Vec<f64> {
        vec![self.c10, self.c01, self.c20, self.c02, self.c30, self.c03, self.kappa]
    }

    fn energy<S: Scalar>(&self, theta: &[S], x: [S; 3]) -> S {
        let [i1, i2, j] = x;
        let i1b = i1 * j.powf(-2.0 / 3.0);
        let i2b = i2 * j.powf(-4.0 / 3.0);
        let a = i1b - 3.0;
        let b = i2b.powf(-1.5) - 3.0 * 3f64.sqrt();
        let c_i = [theta[0], theta[2], theta[4]];
        let c_j = [theta[1], theta[3], theta[5]];
        let mut out = theta[6] * (j * j + (j * j).recip() - 2.0);
        for k in 0..3 {
            out = out + c_i[k] * a.powi(k as u32 + 1) + c_j[k] * b.powi(k as u32 + 1);
        }
        out
    }
}
