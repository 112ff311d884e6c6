//! Matérn-type Gaussian random fields on a triangle mesh from the SPDE
//! `(δ − γΔ) G = W` with a Robin boundary term `√(δγ)/1.42 · G`, `δ = 1` and
//! `γ = ℓ²` for correlation length `ℓ`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{BandLu, BandMatrix, Mesh2D};

/// Noise-field settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GrfConfig {
    pub corr_len: f64,
    /// Amplitude relative to the largest nodal displacement magnitude.
    pub relative_amplitude: f64,
}

impl Default for GrfConfig {
    fn default() -> Self {
        Self { corr_len: 0.33, relative_amplitude: 0.005 }
    }
}

/// Factored SPDE operator of one mesh, reusable across realizations.
pub struct GrfSampler {
    lu: BandLu,
    sqrt_mass: Vec<f64>,
}

impl GrfSampler {
    pub fn new(mesh: &Mesh2D, corr_len: f64) -> Result<Self> {
        if !(corr_len > 0.0) {
            return Err(Error::InvalidArgument(format!("correlation length must be positive, got {corr_len}")));
        }
        let (delta, gamma) = (1.0, corr_len * corr_len);
        let robin = (delta * gamma).sqrt() / 1.42;
        let bw = mesh
            .elements
            .iter()
            .flat_map(|el| [el[0].abs_diff(el[1]), el[1].abs_diff(el[2]), el[0].abs_diff(el[2])])
            .max()
            .unwrap_or(0);
        let n = mesh.n_nodes();
        let mut a = BandMatrix::zeros(n, bw, bw);
        let mut lumped = vec![0.0; n];
        for (e, el) in mesh.elements.iter().enumerate() {
            let area = mesh.area(e);
            let g = mesh.shape_gradients(e);
            for i in 0..3 {
                lumped[el[i]] += area / 3.0;
                for j in 0..3 {
                    let k = g[i][0] * g[j][0] + g[i][1] * g[j][1];
                    let mass = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                    a.add(el[i], el[j], gamma * area * k + delta * mass);
                }
            }
        }
        for (p, q) in mesh.boundary_edges() {
            let [x, y] = [mesh.nodes[p], mesh.nodes[q]];
            let len = (x[0] - y[0]).hypot(x[1] - y[1]);
            for (i, j, w) in [(p, p, 2.0), (q, q, 2.0), (p, q, 1.0), (q, p, 1.0)] {
                a.add(i, j, robin * len / 6.0 * w);
            }
        }
        Ok(Self { lu: a.factor()?, sqrt_mass: lumped.into_iter().map(f64::sqrt).collect() })
    }

    /// One realization with unit root-mean-square value over the nodes.
    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> Vec<f64> {
        let rhs: Vec<f64> = self
            .sqrt_mass
            .iter()
            .map(|s| s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect();
        let g = self.lu.solve(&rhs);
        let rms = (g.iter().map(|v| v * v).sum::<f64>() / g.len() as f64).sqrt();
        if rms > 0.0 {
            g.into_iter().map(|v| v / rms).collect()
        } else {
            g
        }
    }
}

/// Two independent correlated components `(ux, uy)` per node, scaled to
/// root-mean-square `amplitude`.
pub fn grf_noise(mesh: &Mesh2D, corr_len: f64, amplitude: f64, seed: u64) -> Result<Vec<f64>> {
    if amplitude == 0.0 {
        return Ok(vec![0.0; mesh.n_dofs()]);
    }
    let sampler = GrfSampler::new(mesh, corr_len)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gx = sampler.sample(&mut rng);
    let gy = sampler.sample(&mut rng);
    Ok(gx.iter().zip(&gy).flat_map(|(x, y)| [amplitude * x, amplitude * y]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::plate;

    #[test]
    fn zero_amplitude_is_zero() {
        let mesh = plate(1.0, 1.0, 4, 4).unwrap();
        assert!(grf_noise(&mesh, 0.33, 0.0, 1).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn amplitude_sets_rms() {
        let mesh = plate(2.0, 2.0, 10, 10).unwrap();
        let f = grf_noise(&mesh, 0.33, 0.01, 5).unwrap();
        let rms_x = (f.iter().step_by(2).map(|v| v * v).sum::<f64>() / mesh.n_nodes() as f64).sqrt();
        assert!((rms_x - 0.01).abs() < 1e-12);
        assert_eq!(f, grf_noise(&mesh, 0.33, 0.01, 5).unwrap());
    }
}
