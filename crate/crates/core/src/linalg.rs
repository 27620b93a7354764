//! Small dense complex linear algebra: Hermitian eigendecomposition by
//! cyclic Jacobi rotations, unitary exponentials, and Gram-Schmidt
//! orthonormalization. Sized for the 3x3 and 9x9 matrices this crate uses.

use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn conj_transpose(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Max absolute deviation from the Hermitian property.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Frobenius norm of the strict off-diagonal part.
    fn off_diagonal_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigendecomposition `A = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Eigenvectors as the columns of this unitary, matching `values`.
    pub vectors: CMatrix,
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Each rotation annihilates one off-diagonal element; sweeps repeat until
/// the off-diagonal Frobenius norm drops below `tol` times the matrix scale.
pub fn hermitian_eigen(a: &CMatrix, tol: f64) -> HermitianEigen {
    let n = a.n;
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let scale = m.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    const MAX_SWEEPS: usize = 60;

    for _ in 0..MAX_SWEEPS {
        if m.off_diagonal_norm() <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                // Phase so that e^{-i phi} a_pq is real positive.
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = 0.5 * (2.0 * r).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                // Rotation columns: p' = c*p - conj(phase)*s*q,
                //                   q' = phase*s*p + c*q.
                let cp = Complex64::new(c, 0.0);
                let sp = phase * s;
                // Update rows/columns of m: m <- J^dagger m J with
                // J[p][p]=c, J[p][q]=sp, J[q][p]=-conj(sp), J[q][q]=c
                // acting on columns (p,q).
                for i in 0..n {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * cp - miq * sp.conj();
                    m[(i, q)] = mip * sp + miq * cp;
                }
                for j in 0..n {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = mpj * cp - mqj * sp;
                    m[(q, j)] = mpj * sp.conj() + mqj * cp;
                }
                // Force exact Hermitian structure on the rotated pair.
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                let _ = (app, aqq);
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cp - viq * sp.conj();
                    v[(i, q)] = vip * sp + viq * cp;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, new_j)] = v[(i, old_j)];
        }
    }
    HermitianEigen { values, vectors }
}

/// `exp(i t H)` for Hermitian `H`, via eigendecomposition.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    let eig = hermitian_eigen(h, 1e-14);
    let n = h.n;
    let mut m = CMatrix::zeros(n);
    for k in 0..n {
        let phase = Complex64::from_polar(1.0, t * eig.values[k]);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += eig.vectors[(i, k)] * phase * eig.vectors[(j, k)].conj();
            }
        }
    }
    m
}

/// Orthonormalizes the columns of `a` by modified Gram-Schmidt. Columns must
/// be linearly independent.
pub fn gram_schmidt_unitary(a: &CMatrix) -> CMatrix {
    let n = a.n;
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    for j in 0..n {
        for k in 0..j {
            let proj = inner(&cols[k], &cols[j]);
            for i in 0..n {
                let c = cols[k][i];
                cols[j][i] -= proj * c;
            }
        }
        let nrm = norm(&cols[j]);
        assert!(nrm > 1e-12, "rank-deficient matrix in Gram-Schmidt");
        for c in cols[j].iter_mut() {
            *c /= nrm;
        }
    }
    let mut u = CMatrix::zeros(n);
    for j in 0..n {
        for i in 0..n {
            u[(i, j)] = cols[j][i];
        }
    }
    u
}
