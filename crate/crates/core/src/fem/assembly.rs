//! Plane-strain residual and tangent of linear triangles with one quadrature
//! point. In-plane gradients are flattened as `f = (F11, F12, F21, F22)`; with
//! `F33 = 1` the invariants are `I1 = |f|² + 1`, `I2 = |f|² + J²`, `J = F11 F22 − F12 F21`.

use super::band::BandMatrix;
use super::mesh::Mesh2D;
use crate::diff::Scalar;
use crate::error::{Error, Result};
use crate::kinematics::InvariantTriplet;
use crate::materials::{invariant_partials, Potential};

/// Flattened in-plane deformation gradient of element `e`.
pub fn element_defgrad(mesh: &Mesh2D, e: usize, u: &[f64]) -> [f64; 4] {
    let g = mesh.shape_gradients(e);
    let mut f = [1.0, 0.0, 0.0, 1.0];
    for (a, &n) in mesh.elements[e].iter().enumerate() {
        for i in 0..2 {
            for jj in 0..2 {
                f[2 * i + jj] += u[2 * n + i] * g[a][jj];
            }
        }
    }
    f
}

pub fn plane_invariants(f: [f64; 4]) -> [f64; 3] {
    let q: f64 = f.iter().map(|v| v * v).sum();
    let j = f[0] * f[3] - f[1] * f[2];
    [q + 1.0, q + j * j, j]
}

/// `∂J/∂f`.
fn cof(f: [f64; 4]) -> [f64; 4] {
    [f[3], -f[2], -f[1], f[0]]
}

fn checked_state<M: Potential + ?Sized>(m: &M, theta: &[f64], e: usize, f: [f64; 4]) -> Result<[f64; 3]> {
    let x = plane_invariants(f);
    if !(x[2] > 0.0) {
        return Err(Error::ElementInverted { element: e, det: x[2] });
    }
    m.check_domain(theta, &InvariantTriplet::from_array(x))?;
    Ok(x)
}

/// Energy density and flattened first Piola–Kirchhoff stress, generic in the
/// parameter scalar.
pub fn plane_stress<M: Potential + ?Sized, S: Scalar>(m: &M, theta: &[S], f: [f64; 4]) -> (S, [S; 4]) {
    let x = plane_invariants(f);
    let g = cof(f);
    let d = invariant_partials(m, theta, x);
    let [p1, p2, pj] = d.g;
    let p = [0, 1, 2, 3].map(|k| p1 * (2.0 * f[k]) + p2 * (2.0 * f[k] + 2.0 * x[2] * g[k]) + pj * g[k]);
    (d.v, p)
}

/// Flattened stress and material tangent `∂P/∂f`.
pub fn plane_tangent<M: Potential + ?Sized>(m: &M, theta: &[f64], f: [f64; 4]) -> ([f64; 4], [[f64; 4]; 4]) {
    let x = plane_invariants(f);
    let g = cof(f);
    let d = invariant_partials(m, theta, x);
    let [p1, p2, pj] = d.g;
    let grads = [f.map(|v| 2.0 * v), [0, 1, 2, 3].map(|k| 2.0 * f[k] + 2.0 * x[2] * g[k]), g];
    let p = [0, 1, 2, 3].map(|k| p1 * grads[0][k] + p2 * grads[1][k] + pj * grads[2][k]);
    let mut hj = [[0.0; 4]; 4];
    hj[0][3] = 1.0;
    hj[3][0] = 1.0;
    hj[1][2] = -1.0;
    hj[2][1] = -1.0;
    let mut a = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut v = 0.0;
            for ia in 0..3 {
                for ib in 0..3 {
                    v += d.hess(ia, ib) * grads[ia][r] * grads[ib][c];
                }
            }
            let id = if r == c { 1.0 } else { 0.0 };
            v += 2.0 * p1 * id + p2 * (2.0 * id + 2.0 * g[r] * g[c] + 2.0 * x[2] * hj[r][c]) + pj * hj[r][c];
            a[r][c] = v;
        }
    }
    (p, a)
}

/// Global residual, per-element 6×6 tangent blocks and stored energy.
#[derive(Clone, Debug)]
pub struct Assembly {
    pub residual: Vec<f64>,
    pub blocks: Vec<[[f64; 6]; 6]>,
    pub energy: f64,
}

fn element_dofs(mesh: &Mesh2D, e: usize) -> [usize; 6] {
    let [a, b, c] = mesh.elements[e];
    [2 * a, 2 * a + 1, 2 * b, 2 * b + 1, 2 * c, 2 * c + 1]
}

pub fn assemble<M: Potential + ?Sized>(mesh: &Mesh2D, m: &M, u: &[f64]) -> Result<Assembly> {
    let theta = m.params();
    let mut residual = vec![0.0; mesh.n_dofs()];
    let mut blocks = Vec::with_capacity(mesh.elements.len());
    let mut energy = 0.0;
    for e in 0..mesh.elements.len() {
        let f = element_defgrad(mesh, e, u);
        let x = checked_state(m, &theta, e, f)?;
        let (p, a4) = plane_tangent(m, &theta, f);
        let area = mesh.area(e);
        let g = mesh.shape_gradients(e);
        let dofs = element_dofs(mesh, e);
        // B[(n,i)][iJ] = ∂f_iJ/∂u_(n,i) = ∂N_n/∂X_J
        let mut b = [[0.0; 4]; 6];
        for n in 0..3 {
            for i in 0..2 {
                for jj in 0..2 {
                    b[2 * n + i][2 * i + jj] = g[n][jj];
                }
            }
        }
        let mut ke = [[0.0; 6]; 6];
        for r in 0..6 {
            residual[dofs[r]] += area * (0..4).map(|k| p[k] * b[r][k]).sum::<f64>();
            for c in 0..6 {
                let mut v = 0.0;
                for k in 0..4 {
                    if b[r][k] == 0.0 {
                        continue;
                    }
                    for l in 0..4 {
                        v += b[r][k] * a4[k][l] * b[c][l];
                    }
                }
                ke[r][c] = area * v;
            }
        }
        blocks.push(ke);
        energy += area * m.energy(&theta, x);
    }
    Ok(Assembly { residual, blocks, energy })
}

/// Residual for parameters of any scalar type (parameter sensitivities).
pub fn residual_with<M: Potential + ?Sized, S: Scalar>(mesh: &Mesh2D, m: &M, theta: &[S], u: &[f64]) -> Result<Vec<S>> {
    let values: Vec<f64> = theta.iter().map(|t| t.value()).collect();
    let mut residual = vec![S::zero(); mesh.n_dofs()];
    for e in 0..mesh.elements.len() {
        let f = element_defgrad(mesh, e, u);
        checked_state(m, &values, e, f)?;
        let (_, p) = plane_stress(m, theta, f);
        let area = mesh.area(e);
        let g = mesh.shape_gradients(e);
        for (a, &n) in mesh.elements[e].iter().enumerate() {
            for i in 0..2 {
                let v = p[2 * i] * g[a][0] + p[2 * i + 1] * g[a][1];
                residual[2 * n + i] = residual[2 * n + i] + v * area;
            }
        }
    }
    Ok(residual)
}

/// Stored energy `Σ_e A_e φ(F_e)`.
pub fn total_energy<M: Potential + ?Sized>(mesh: &Mesh2D, m: &M, u: &[f64]) -> Result<f64> {
    let theta = m.params();
    let mut total = 0.0;
    for e in 0..mesh.elements.len() {
        let f = element_defgrad(mesh, e, u);
        let x = checked_state(m, &theta, e, f)?;
        total += mesh.area(e) * m.energy(&theta, x);
    }
    Ok(total)
}

/// Numbering of unconstrained degrees of freedom.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub free: Vec<usize>,
    /// Reduced index per global dof, `None` when prescribed.
    pub index: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(n_dofs: usize, constrained: &[usize]) -> Self {
        let mut fixed = vec![false; n_dofs];
        for &d in constrained {
            fixed[d] = true;
        }
        let free: Vec<usize> = (0..n_dofs).filter(|&d| !fixed[d]).collect();
        let mut index = vec![None; n_dofs];
        for (k, &d) in free.iter().enumerate() {
            index[d] = Some(k);
        }
        Self { free, index }
    }

    pub fn restrict(&self, v: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&d| v[d]).collect()
    }

    /// Half bandwidth of the reduced stiffness for `mesh`.
    pub fn bandwidth(&self, mesh: &Mesh2D) -> usize {
        let mut bw = 0;
        for e in 0..mesh.elements.len() {
            let idx: Vec<usize> = element_dofs(mesh, e).iter().filter_map(|&d| self.index[d]).collect();
            for &a in &idx {
                for &b in &idx {
                    bw = bw.max(a.abs_diff(b));
                }
            }
        }
        bw
    }

    /// Reduced (free × free) stiffness.
    pub fn stiffness(&self, mesh: &Mesh2D, blocks: &[[[f64; 6]; 6]]) -> BandMatrix {
        let bw = self.bandwidth(mesh);
        let mut k = BandMatrix::zeros(self.free.len(), bw, bw);
        for (e, ke) in blocks.iter().enumerate() {
            let dofs = element_dofs(mesh, e);
            for r in 0..6 {
                let Some(i) = self.index[dofs[r]] else { continue };
                for c in 0..6 {
                    if let Some(j) = self.index[dofs[c]] {
                        k.add(i, j, ke[r][c]);
                    }
                }
            }
        }
        k
    }
}

/// Global product `K v` from element blocks.
pub fn tangent_product(mesh: &Mesh2D, blocks: &[[[f64; 6]; 6]], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mesh.n_dofs()];
    for (e, ke) in blocks.iter().enumerate() {
        let dofs = element_dofs(mesh, e);
        for r in 0..6 {
            out[dofs[r]] += (0..6).map(|c| ke[r][c] * v[dofs[c]]).sum::<f64>();
        }
    }
    out
}

/// Transposed global product `Kᵀ v` from element blocks.
pub fn tangent_transpose_product(mesh: &Mesh2D, blocks: &[[[f64; 6]; 6]], v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; mesh.n_dofs()];
    for (e, ke) in blocks.iter().enumerate() {
        let dofs = element_dofs(mesh, e);
        for c in 0..6 {
            out[dofs[c]] += (0..6).map(|r| ke[r][c] * v[dofs[r]]).sum::<f64>();
        }
    }
    out
}
