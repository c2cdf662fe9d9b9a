//! Information-gain objective: `f(A) = log det(Q₀ + Σ_{s∈A} Q_s) - log det Q₀`.

use crate::error::{Error, Result};
use crate::oracle::SetFunction;
use crate::set::ElementSet;
use crate::tol::{PSD_EIG_TOL, SYMMETRY_TOL};

/// A small dense symmetric matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct InfoMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl InfoMatrix {
    pub fn zeros(dim: usize) -> Self {
        InfoMatrix {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    /// `scale · I`.
    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut m = InfoMatrix::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = scale;
        }
        m
    }

    /// Builds from nested rows, validating shape and symmetry.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidSpec(format!(
                    "matrix row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        let m = InfoMatrix { dim, data };
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (m.get(i, j) - m.get(j, i)).abs() > SYMMETRY_TOL {
                    return Err(Error::InvalidSpec(format!(
                        "matrix is not symmetric at ({i}, {j}): {} vs {}",
                        m.get(i, j),
                        m.get(j, i)
                    )));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    /// Rows as nested vectors (for serialization).
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| self.data[i * self.dim..(i + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn add_assign(&mut self, other: &InfoMatrix) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Adds `scale · v vᵀ` into the block starting at `(offset, offset)`.
    pub fn add_scaled_outer(&mut self, scale: f64, v: &[f64], offset: usize) {
        assert!(offset + v.len() <= self.dim, "block out of range");
        for (i, &vi) in v.iter().enumerate() {
            for (j, &vj) in v.iter().enumerate() {
                self.data[(offset + i) * self.dim + (offset + j)] += scale * vi * vj;
            }
        }
    }

    /// `log det` via Cholesky; `None` when the matrix is not (numerically)
    /// positive definite.
    pub fn cholesky_log_det(&self) -> Option<f64> {
        let n = self.dim;
        let mut l = vec![0.0f64; n * n];
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.data[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !sum.is_finite() || sum <= 0.0 {
                        return None;
                    }
                    let d = sum.sqrt();
                    l[i * n + i] = d;
                    acc += d.ln();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Some(2.0 * acc)
    }

    /// All eigenvalues by cyclic Jacobi rotations. Intended for the small
    /// matrices used here; cost is O(dim³) per sweep.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        if n == 0 {
            return Vec::new();
        }
        let mut a = self.data.clone();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        for _sweep in 0..60 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[i * n + j] * a[i * n + j];
                }
            }
            if off.sqrt() <= 1e-14 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (theta * theta + 1.0).sqrt())
                    } else {
                        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).collect()
    }

    /// Checks `min eigenvalue ≥` [`PSD_EIG_TOL`].
    pub fn validate_psd(&self, what: &str) -> Result<()> {
        let min = self
            .eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if self.dim > 0 && min < PSD_EIG_TOL {
            return Err(Error::NotPositiveDefinite(format!(
                "{what} has eigenvalue {min:.3e} below the admissible {PSD_EIG_TOL:.0e}"
            )));
        }
        Ok(())
    }
}

/// `f(A) = log det(Q₀ + Σ_{s∈A} Q_s) - log det Q₀`.
///
/// `Q₀` must be positive definite and every element matrix positive
/// semidefinite; both are validated at construction, which makes the function
/// normalized, monotone and submodular up to floating-point error.
#[derive(Clone, Debug)]
pub struct LogDetFunction {
    base: InfoMatrix,
    element_info: Vec<InfoMatrix>,
    base_log_det: f64,
}

impl LogDetFunction {
    pub fn new(base: InfoMatrix, element_info: Vec<InfoMatrix>) -> Result<Self> {
        let base_log_det = base.cholesky_log_det().ok_or_else(|| {
            Error::NotPositiveDefinite("prior matrix failed Cholesky".to_string())
        })?;
        for (e, q) in element_info.iter().enumerate() {
            if q.dim() != base.dim() {
                return Err(Error::InvalidSpec(format!(
                    "element {e} matrix has dim {}, prior has dim {}",
                    q.dim(),
                    base.dim()
                )));
            }
            q.validate_psd(&format!("element {e} matrix"))?;
        }
        Ok(LogDetFunction {
            base,
            element_info,
            base_log_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &InfoMatrix {
        &self.base
    }

    pub fn element_info(&self, element: u32) -> &InfoMatrix {
        &self.element_info[element as usize]
    }

    pub fn elements(&self) -> &[InfoMatrix] {
        &self.element_info
    }
}

impl SetFunction for LogDetFunction {
    fn ground_size(&self) -> usize {
        self.element_info.len()
    }

    fn eval(&self, a: ElementSet) -> Result<f64> {
        let mut m = self.base.clone();
        for id in a.iter() {
            m.add_assign(&self.element_info[id as usize]);
        }
        let ld = m.cholesky_log_det().ok_or_else(|| {
            Error::NotPositiveDefinite(format!("accumulated matrix for {a} failed Cholesky"))
        })?;
        Ok(ld - self.base_log_det)
    }
}
