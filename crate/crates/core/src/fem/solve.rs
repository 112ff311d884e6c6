use serde::{Deserialize, Serialize};

use super::assembly::{assemble, tangent_product, DofMap};
use super::mesh::Mesh2D;
use crate::error::{Error, Result};
use crate::materials::Potential;

/// Prescribed displacement values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dirichlet {
    pub dofs: Vec<usize>,
    pub values: Vec<f64>,
}

impl Dirichlet {
    /// Bottom edge clamped, top edge pulled by `top_uy`; top `ux` held at zero
    /// when `fix_top_ux`.
    pub fn tensile(mesh: &Mesh2D, top_uy: f64, fix_top_ux: bool) -> Result<Self> {
        let mut dofs = Vec::new();
        let mut values = Vec::new();
        for &n in mesh.set("bottom")? {
            dofs.extend([2 * n, 2 * n + 1]);
            values.extend([0.0, 0.0]);
        }
        for &n in mesh.set("top")? {
            if fix_top_ux {
                dofs.push(2 * n);
                values.push(0.0);
            }
            dofs.push(2 * n + 1);
            values.push(top_uy);
        }
        Ok(Self { dofs, values })
    }

    pub fn dof_map(&self, mesh: &Mesh2D) -> DofMap {
        DofMap::new(mesh.n_dofs(), &self.dofs)
    }

    /// Same dofs with values interpolated between `from` (taken from `u`) and `self`.
    fn towards(&self, u: &[f64], s: f64) -> Self {
        let values = self.dofs.iter().zip(&self.values).map(|(&d, &v)| u[d] + s * (v - u[d])).collect();
        Self { dofs: self.dofs.clone(), values }
    }
}

/// Newton–Raphson controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NewtonOptions {
    /// Relative tolerance on the free residual norm.
    pub tol: f64,
    pub max_iter: usize,
    pub max_cuts: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 25, max_cuts: 4 }
    }
}

/// Converged increment.
#[derive(Clone, Debug, PartialEq)]
pub struct Increment {
    pub u: Vec<f64>,
    /// Newton iterations of every (sub-)step actually solved.
    pub iterations: Vec<usize>,
    pub cuts: usize,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn newton<M: Potential + ?Sized>(
    mesh: &Mesh2D,
    m: &M,
    u_prev: &[f64],
    bc: &Dirichlet,
    map: &DofMap,
    opts: &NewtonOptions,
) -> Result<(Vec<f64>, usize)> {
    // tangent predictor: K_ff Δu_f = −K_fc Δu_c
    let start = assemble(mesh, m, u_prev)?;
    let mut jump = vec![0.0; mesh.n_dofs()];
    for (&d, &v) in bc.dofs.iter().zip(&bc.values) {
        jump[d] = v - u_prev[d];
    }
    let mut u = u_prev.to_vec();
    for (&d, &v) in bc.dofs.iter().zip(&bc.values) {
        u[d] = v;
    }
    if jump.iter().any(|&v| v != 0.0) {
        let kj = tangent_product(mesh, &start.blocks, &jump);
        let lu = map.stiffness(mesh, &start.blocks).factor()?;
        let du = lu.solve(&map.restrict(&kj).iter().map(|v| -v).collect::<Vec<_>>());
        for (k, &d) in map.free.iter().enumerate() {
            u[d] += du[k];
        }
    }
    let mut last = f64::INFINITY;
    for it in 0..=opts.max_iter {
        let asm = assemble(mesh, m, &u)?;
        let rf = map.restrict(&asm.residual);
        let rn = norm(&rf);
        last = rn;
        if !rn.is_finite() {
            break;
        }
        if rn <= opts.tol * norm(&asm.residual).max(1.0) {
            return Ok((u, it));
        }
        if it == opts.max_iter {
            break;
        }
        let lu = map.stiffness(mesh, &asm.blocks).factor()?;
        let du = lu.solve(&rf);
        for (k, &d) in map.free.iter().enumerate() {
            u[d] -= du[k];
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: last })
}

fn solve_cut<M: Potential + ?Sized>(
    mesh: &Mesh2D,
    m: &M,
    u_prev: &[f64],
    bc: &Dirichlet,
    map: &DofMap,
    opts: &NewtonOptions,
    depth: usize,
) -> Result<Increment> {
    match newton(mesh, m, u_prev, bc, map, opts) {
        Ok((u, it)) => Ok(Increment { u, iterations: vec![it], cuts: depth }),
        Err(e) if depth >= opts.max_cuts => Err(e),
        Err(_) => {
            let half = solve_cut(mesh, m, u_prev, &bc.towards(u_prev, 0.5), map, opts, depth + 1)?;
            let rest = solve_cut(mesh, m, &half.u, bc, map, opts, depth + 1)?;
            let mut iterations = half.iterations;
            iterations.extend(rest.iterations);
            Ok(Increment { u: rest.u, iterations, cuts: half.cuts.max(rest.cuts) })
        }
    }
}

/// Equilibrium for the prescribed values `bc` starting from the converged
/// state `u_prev`, halving the increment on failure.
pub fn solve_increment<M: Potential + ?Sized>(
    mesh: &Mesh2D,
    m: &M,
    u_prev: &[f64],
    bc: &Dirichlet,
    opts: &NewtonOptions,
) -> Result<Increment> {
    if u_prev.len() != mesh.n_dofs() {
        return Err(Error::InvalidArgument(format!("state has {} values, mesh {} dofs", u_prev.len(), mesh.n_dofs())));
    }
    solve_cut(mesh, m, u_prev, bc, &bc.dof_map(mesh), opts, 0)
}

/// Sum of residual entries of `nodes` in `direction` (0 = x, 1 = y).
pub fn reaction_force<M: Potential + ?Sized>(mesh: &Mesh2D, m: &M, u: &[f64], nodes: &[usize], direction: usize) -> Result<f64> {
    let asm = assemble(mesh, m, u)?;
    Ok(nodes.iter().map(|&n| asm.residual[2 * n + direction]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::plate;
    use crate::materials::NeoHookean;

    #[test]
    fn zero_increment_returns_previous_state() {
        let mesh = plate(1.0, 1.0, 2, 2).unwrap();
        let m = NeoHookean::default();
        let bc = Dirichlet::tensile(&mesh, 0.1, true).unwrap();
        let first = solve_increment(&mesh, &m, &vec![0.0; mesh.n_dofs()], &bc, &NewtonOptions::default()).unwrap();
        let again = solve_increment(&mesh, &m, &first.u, &bc, &NewtonOptions::default()).unwrap();
        assert_eq!(again.u, first.u);
        assert_eq!(again.iterations, vec![0]);
    }

    #[test]
    fn tension_gives_positive_force() {
        let mesh = plate(1.0, 1.0, 2, 2).unwrap();
        let m = NeoHookean::default();
        let bc = Dirichlet::tensile(&mesh, 0.2, false).unwrap();
        let inc = solve_increment(&mesh, &m, &vec![0.0; mesh.n_dofs()], &bc, &NewtonOptions::default()).unwrap();
        let f = reaction_force(&mesh, &m, &inc.u, mesh.set("top").unwrap(), 1).unwrap();
        assert!(f > 0.0);
        let zero = reaction_force(&mesh, &m, &vec![0.0; mesh.n_dofs()], mesh.set("top").unwrap(), 1).unwrap();
        assert!(zero.abs() < 1e-14);
    }
}
