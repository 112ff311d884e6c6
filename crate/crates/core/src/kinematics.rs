//! Deformation gradients, isotropic invariants, reconstruction of a diagonal
//! right Cauchy-Green tensor from invariants, and canonical loading paths.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{Matrix2, Matrix3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Deformation gradient `F`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DefGrad(pub Matrix3<f64>);

impl DefGrad {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn from_rows(rows: [[f64; 3]; 3]) -> Self {
        Self(Matrix3::from_fn(|i, j| rows[i][j]))
    }

    /// Embed an in-plane gradient with `F33 = 1` and no out-of-plane shear.
    pub fn plane_strain(f: Matrix2<f64>) -> Self {
        Self(Matrix3::new(f[(0, 0)], f[(0, 1)], 0.0, f[(1, 0)], f[(1, 1)], 0.0, 0.0, 0.0, 1.0))
    }

    pub fn diagonal(l1: f64, l2: f64, l3: f64) -> Self {
        Self(Matrix3::from_diagonal(&nalgebra::Vector3::new(l1, l2, l3)))
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn right_cauchy_green(&self) -> Matrix3<f64> {
        self.0.transpose() * self.0
    }

    /// Row-major components `F11, F12, ..., F33`.
    pub fn components(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[(i, j)];
            }
        }
        out
    }

    pub fn from_components(c: &[f64]) -> Result<Self> {
        if c.len() != 9 {
            return Err(Error::InvalidArgument(format!("expected 9 components, got {}", c.len())));
        }
        Ok(Self(Matrix3::from_fn(|i, j| c[3 * i + j])))
    }
}

/// Point `(I1, I2, J)` in isotropic invariant space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantTriplet {
    pub i1: f64,
    pub i2: f64,
    pub j: f64,
}

impl InvariantTriplet {
    /// Undeformed state.
    pub const REFERENCE: Self = Self { i1: 3.0, i2: 3.0, j: 1.0 };

    pub const fn new(i1: f64, i2: f64, j: f64) -> Self {
        Self { i1, i2, j }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.i1, self.i2, self.j]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn i3(&self) -> f64 {
        self.j * self.j
    }
}

impl fmt::Display for InvariantTriplet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.i1, self.i2, self.j)
    }
}

/// Principal invariants `(I1, I2, I3)` of a symmetric tensor given by its diagonal.
pub fn invariants_of_diagonal(c: [f64; 3]) -> [f64; 3] {
    let i1 = c[0] + c[1] + c[2];
    let i2 = c[0] * c[1] + c[1] * c[2] + c[0] * c[2];
    let i3 = c[0] * c[1] * c[2];
    [i1, i2, i3]
}

/// `(I1, I2, J)` of a diagonal right Cauchy-Green tensor.
pub fn triplet_of_diagonal(c: [f64; 3]) -> [f64; 3] {
    let [i1, i2, i3] = invariants_of_diagonal(c);
    [i1, i2, i3.sqrt()]
}

pub fn invariants_of(f: &DefGrad) -> Result<InvariantTriplet> {
    let j = f.det();
    if !(j > 0.0) {
        return Err(Error::NonPositiveDeterminant(j));
    }
    let c = f.right_cauchy_green();
    let i1 = c.trace();
    let i2 = 0.5 * (i1 * i1 - (c * c).trace());
    Ok(InvariantTriplet::new(i1, i2, j))
}

/// Repeated-root threshold on `H`.
const DEGENERATE_H: f64 = 1e-12;
/// Admissible excursion of the arccos argument outside `[-1, 1]`.
const ARCCOS_SLACK: f64 = 1e-10;

/// Squared principal stretches `λ1² ≤ λ2² ≤ λ3²` of the diagonal `C` whose
/// invariants are `t`, via the trigonometric solution of the characteristic
/// cubic.
pub fn reconstruct_diagonal_c(t: &InvariantTriplet) -> Result<[f64; 3]> {
    let (i1, i2, i3) = (t.i1, t.i2, t.i3());
    let fail = || Error::NoSpectrum { i1: t.i1, i2: t.i2, j: t.j };
    if !(i1.is_finite() && i2.is_finite() && t.j.is_finite()) || t.j <= 0.0 {
        return Err(fail());
    }
    let h = (i1 * i1 - 3.0 * i2) / 9.0;
    let scale = (i1 * i1 / 9.0).max(1.0);
    if h < -DEGENERATE_H * scale {
        return Err(fail());
    }
    let mut out = if h < DEGENERATE_H {
        [i1 / 3.0; 3]
    } else {
        let g = i1 * i2 / 3.0 - i3 - 2.0 * i1.powi(3) / 27.0;
        let denom = 2.0 * h.powf(1.5);
        let mut arg = -g / denom;
        if arg.abs() > 1.0 {
            // Rounding in G is of order eps * |terms|; beyond that the triplet
            // has complex eigenvalues.
            let g_err = 64.0 * f64::EPSILON * (i1 * i2 / 3.0 + i3 + 2.0 * i1.abs().powi(3) / 27.0);
            if arg.abs() > 1.0 + ARCCOS_SLACK && g.abs() - denom > g_err {
                return Err(fail());
            }
            arg = arg.clamp(-1.0, 1.0);
        }
        let beta = arg.acos();
        let m = i1 / 3.0;
        let r = 2.0 * h.sqrt();
        [m - r * ((PI - beta) / 3.0).cos(), m - r * ((PI + beta) / 3.0).cos(), m + r * (beta / 3.0).cos()]
    };
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if out[0] <= 0.0 {
        return Err(fail());
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadingMode {
    ConstrainedUniaxial,
    ConstrainedEquibiaxial,
    SimpleShear,
}

impl LoadingMode {
    pub const ALL: [LoadingMode; 3] =
        [LoadingMode::ConstrainedUniaxial, LoadingMode::ConstrainedEquibiaxial, LoadingMode::SimpleShear];

    /// Value of the control parameter in the undeformed state.
    pub fn reference_control(self) -> f64 {
        match self {
            LoadingMode::SimpleShear => 0.0,
            _ => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LoadingMode::ConstrainedUniaxial => "constrained_uniaxial",
            LoadingMode::ConstrainedEquibiaxial => "constrained_equibiaxial",
            LoadingMode::SimpleShear => "simple_shear",
        }
    }
}

/// `diag(λ,1,1)`, `diag(λ,λ,1)` or unit simple shear with amount `γ`.
pub fn canonical_deformation(mode: LoadingMode, control: f64) -> Result<DefGrad> {
    match mode {
        LoadingMode::ConstrainedUniaxial | LoadingMode::ConstrainedEquibiaxial if !(control > 0.0) => {
            Err(Error::InvalidArgument(format!("non-positive stretch {control}")))
        }
        LoadingMode::ConstrainedUniaxial => Ok(DefGrad::diagonal(control, 1.0, 1.0)),
        LoadingMode::ConstrainedEquibiaxial => Ok(DefGrad::diagonal(control, control, 1.0)),
        LoadingMode::SimpleShear => {
            Ok(DefGrad::from_rows([[1.0, control, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
        }
    }
}

/// `steps + 1` deformation gradients from the reference state to `amplitude`.
pub fn canonical_path(mode: LoadingMode, amplitude: f64, steps: usize) -> Result<Vec<DefGrad>> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let start = mode.reference_control();
    (0..=steps)
        .map(|k| {
            let c = start + (amplitude - start) * k as f64 / steps as f64;
            canonical_deformation(mode, c)
        })
        .collect()
}
