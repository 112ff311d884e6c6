use crate::error::{Error, Result};

/// Square banded matrix with `kl` sub- and `ku` super-diagonals, stored with
/// `kl` extra super-diagonals for pivoting fill-in.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        (j + self.kl >= i && j <= i + self.kl + self.ku).then(|| i * self.width + j + self.kl - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    /// Add `v` at `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "({i}, {j}) outside band");
        let s = self.slot(i, j).unwrap();
        self.data[s] += v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku + 1).min(self.n);
                (lo..hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// LU factorization with partial pivoting.
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let mut piv = vec![0; n];
        let mut lower = vec![0.0; n * self.kl.max(1)];
        let scale = self.data.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
        for i in 0..n {
            let last = (i + self.kl).min(n - 1);
            let p = (i..=last).fold(i, |b, r| if self.get(r, i).abs() > self.get(b, i).abs() { r } else { b });
            if self.get(p, i).abs() <= 1e-14 * scale {
                return Err(Error::Singular(i));
            }
            piv[i] = p;
            let hi = (i + self.kl + self.ku + 1).min(n);
            if p != i {
                for j in i..hi {
                    let (a, b) = (self.slot(i, j).unwrap(), self.slot(p, j).unwrap());
                    self.data.swap(a, b);
                }
            }
            let d = self.get(i, i);
            for r in i + 1..=last {
                let sr = self.slot(r, i).unwrap();
                let l = self.data[sr] / d;
                self.data[sr] = 0.0;
                lower[i * self.kl + (r - i - 1)] = l;
                if l != 0.0 {
                    for j in i + 1..hi {
                        let v = self.get(i, j);
                        let s = self.slot(r, j).unwrap();
                        self.data[s] -= l * v;
                    }
                }
            }
        }
        Ok(BandLu { u: self, lower, piv })
    }
}

/// Factors `P A = L U` of a [`BandMatrix`].
#[derive(Clone, Debug)]
pub struct BandLu {
    u: BandMatrix,
    lower: Vec<f64>,
    piv: Vec<usize>,
}

impl BandLu {
    fn span(&self, i: usize) -> (usize, usize) {
        let n = self.u.n;
        (i + 1, (i + self.u.kl + self.u.ku + 1).min(n))
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl) = (self.u.n, self.u.kl);
        let mut x = b.to_vec();
        for i in 0..n {
            x.swap(i, self.piv[i]);
            for r in i + 1..(i + kl + 1).min(n) {
                x[r] -= self.lower[i * kl + (r - i - 1)] * x[i];
            }
        }
        for i in (0..n).rev() {
            let (lo, hi) = self.span(i);
            let s: f64 = (lo..hi).map(|j| self.u.get(i, j) * x[j]).sum();
            x[i] = (x[i] - s) / self.u.get(i, i);
        }
        x
    }

    /// Solve `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let (n, kl) = (self.u.n, self.u.kl);
        let mut x = b.to_vec();
        for i in 0..n {
            x[i] /= self.u.get(i, i);
            let (lo, hi) = self.span(i);
            for j in lo..hi {
                x[j] -= self.u.get(i, j) * x[i];
            }
        }
        for i in (0..n).rev() {
            for r in i + 1..(i + kl + 1).min(n) {
                x[i] -= self.lower[i * kl + (r - i - 1)] * x[r];
            }
            x.swap(i, self.piv[i]);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn matches_dense_solve(n in 1usize..12, kl in 0usize..4, ku in 0usize..4, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut a = BandMatrix::zeros(n, kl, ku);
            let mut dense = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in i.saturating_sub(kl)..(i + ku + 1).min(n) {
                    let v: f64 = rng.random_range(-1.0..1.0) + if i == j { 0.1 } else { 0.0 };
                    a.add(i, j, v);
                    dense[(i, j)] = v;
                }
            }
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let Some(inv) = dense.clone().try_inverse() else { return Ok(()) };
            if inv.norm() > 1e6 { return Ok(()); }
            let lu = a.clone().factor().unwrap();
            let want = &inv * DVector::from_column_slice(&b);
            let want_t = inv.transpose() * DVector::from_column_slice(&b);
            let x = lu.solve(&b);
            let xt = lu.solve_transpose(&b);
            for i in 0..n {
                prop_assert!((x[i] - want[i]).abs() < 1e-8 * (1.0 + want[i].abs()));
                prop_assert!((xt[i] - want_t[i]).abs() < 1e-8 * (1.0 + want_t[i].abs()));
            }
            let ax = a.mul_vec(&x);
            for i in 0..n {
                prop_assert!((ax[i] - b[i]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let a = BandMatrix::zeros(3, 1, 1);
        assert!(matches!(a.factor(), Err(Error::Singular(0))));
    }
}
