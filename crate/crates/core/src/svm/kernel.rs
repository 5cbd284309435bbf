//! RBF kernel and dense gram matrices.

use super::SvmError;

/// k(x, x') = exp(-gamma * ||x - x'||^2), in (0, 1] with k(x, x) = 1.
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64, SvmError> {
    if a.len() != b.len() {
        return Err(SvmError::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SvmError::InvalidGamma(gamma));
    }
    Ok(rbf_unchecked(a, b, gamma))
}

pub(crate) fn rbf_unchecked(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let dist_sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * dist_sq).exp()
}

/// Dense symmetric kernel matrix.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
}

impl GramMatrix {
    /// Builds the RBF gram matrix of a point set.
    pub fn from_points(points: &[Vec<f64>], gamma: f64) -> Result<Self, SvmError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(SvmError::InvalidGamma(gamma));
        }
        let n = points.len();
        if let Some(p) = points.iter().find(|p| p.len() != points[0].len()) {
            return Err(SvmError::DimensionMismatch {
                expected: points[0].len(),
                got: p.len(),
            });
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
            for j in 0..i {
                let k = rbf_unchecked(&points[i], &points[j], gamma);
                data[i * n + j] = k;
                data[j * n + i] = k;
            }
        }
        Ok(Self { n, data })
    }

    /// Wraps raw row-major entries, checking shape and symmetry.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, SvmError> {
        let n = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != n) {
            return Err(SvmError::DimensionMismatch {
                expected: n,
                got: r.len(),
            });
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        let g = Self { n, data };
        let asym = g.max_asymmetry();
        if asym > 1e-9 {
            return Err(SvmError::AsymmetricGram(asym));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }
}
