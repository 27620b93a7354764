//! Qutrit states, measurement bases, and Born-rule behaviors.
//!
//! Basis identification: index 0 is horizontal polarization in the upper
//! path, index 1 vertical polarization in the upper path, index 2 horizontal
//! polarization in the lower path. Two-qutrit amplitudes are row-major in
//! `(a_A, a_B)`.

use num_complex::Complex64;

use crate::behavior::{table_index, Behavior, TABLE_LEN};
use crate::error::{Error, Result};
use crate::linalg::{inner, CMatrix};

const NORM_TOL: f64 = 1e-12;

/// A pure qutrit state: 3 complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QutritState {
    pub amplitudes: [Complex64; 3],
}

impl QutritState {
    pub fn new(amplitudes: [Complex64; 3]) -> Self {
        Self { amplitudes }
    }

    pub fn from_reals(re: [f64; 3]) -> Self {
        Self {
            amplitudes: re.map(|r| Complex64::new(r, 0.0)),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn validate_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }
}

/// A pure two-qutrit state: 9 complex amplitudes, row-major in `(a_A, a_B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQutritState {
    pub amplitudes: [Complex64; 9],
}

impl TwoQutritState {
    pub fn new(amplitudes: [Complex64; 9]) -> Self {
        Self { amplitudes }
    }

    pub fn from_reals(re: [f64; 9]) -> Self {
        Self {
            amplitudes: re.map(|r| Complex64::new(r, 0.0)),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn validate_normalized(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    /// Reduced single-party density matrix obtained by tracing out the
    /// other party.
    pub fn reduced_density(&self, party: usize) -> CMatrix {
        let mut rho = CMatrix::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..3 {
                    let (ai, aj) = if party == 0 {
                        (self.amplitudes[i * 3 + k], self.amplitudes[j * 3 + k])
                    } else {
                        (self.amplitudes[k * 3 + i], self.amplitudes[k * 3 + j])
                    };
                    s += ai * aj.conj();
                }
                rho[(i, j)] = s;
            }
        }
        rho
    }
}

/// A projective three-outcome qutrit measurement: three orthonormal vectors,
/// outcome `k` corresponding to vector `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    pub vectors: [QutritState; 3],
}

impl MeasurementBasis {
    pub fn new(vectors: [QutritState; 3]) -> Result<Self> {
        let basis = Self { vectors };
        basis.validate(NORM_TOL)?;
        Ok(basis)
    }

    pub fn from_unitary_columns(u: &CMatrix) -> Self {
        assert_eq!(u.n, 3);
        let vectors = [0, 1, 2].map(|k| {
            let col = u.column(k);
            QutritState::new([col[0], col[1], col[2]])
        });
        Self { vectors }
    }

    /// Checks pairwise orthogonality and normalization to `tol`.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let ip = inner(&self.vectors[i].amplitudes, &self.vectors[j].amplitudes);
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).norm());
            }
        }
        if worst > tol {
            return Err(Error::NotOrthonormal(worst));
        }
        Ok(())
    }

    /// `sum_k |eta_k><eta_k|`, for completeness checks.
    pub fn completeness_defect(&self) -> f64 {
        let mut m = CMatrix::zeros(3);
        for v in &self.vectors {
            for i in 0..3 {
                for j in 0..3 {
                    m[(i, j)] += v.amplitudes[i] * v.amplitudes[j].conj();
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((m[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Isotropic state-visibility noise: mixes a behavior with the uniform one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    visibility: f64,
}

impl NoiseModel {
    pub fn new(visibility: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&visibility) || !visibility.is_finite() {
            return Err(Error::VisibilityOutOfRange(visibility));
        }
        Ok(Self { visibility })
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }

    /// `V * behavior + (1 - V) * uniform`, entrywise.
    pub fn apply(&self, behavior: &Behavior) -> Behavior {
        behavior.mix(&Behavior::uniform(), self.visibility)
    }
}

/// The two-photon source state `(sqrt(2)|00> + |11> - |22>)/2`.
pub fn canonical_state() -> TwoQutritState {
    let mut a = [0.0; 9];
    a[0] = std::f64::consts::SQRT_2 / 2.0;
    a[4] = 0.5;
    a[8] = -0.5;
    TwoQutritState::from_reals(a)
}

/// The measurement basis for the given local setting.
///
/// Setting 0:
/// `eta_0 = (2, -(1+sqrt(3)), -(1-sqrt(3)))/sqrt(12)`,
/// `eta_1 = (2, -(1-sqrt(3)), -(1+sqrt(3)))/sqrt(12)`,
/// `eta_2 = (1, 1, 1)/sqrt(3)`.
/// Setting 1 flips the signs of the last two components.
pub fn canonical_basis(setting: usize) -> Result<MeasurementBasis> {
    let s3 = 3f64.sqrt();
    let s12 = 12f64.sqrt();
    let raw = match setting {
        0 => [
            [2.0 / s12, -(1.0 + s3) / s12, -(1.0 - s3) / s12],
            [2.0 / s12, -(1.0 - s3) / s12, -(1.0 + s3) / s12],
            [1.0 / s3, 1.0 / s3, 1.0 / s3],
        ],
        1 => [
            [2.0 / s12, (1.0 + s3) / s12, (1.0 - s3) / s12],
            [2.0 / s12, (1.0 - s3) / s12, (1.0 + s3) / s12],
            [1.0 / s3, -1.0 / s3, -1.0 / s3],
        ],
        other => return Err(Error::InvalidSetting(other)),
    };
    MeasurementBasis::new(raw.map(QutritState::from_reals))
}

/// Both canonical bases, indexed by setting.
pub fn canonical_bases() -> [MeasurementBasis; 2] {
    [canonical_basis(0).unwrap(), canonical_basis(1).unwrap()]
}

/// The Born-rule behavior
/// `P(a,b|x,y) = |(<eta_{a|x}| (x) <eta_{b|y}|) |psi>|^2`.
pub fn born_behavior(
    state: &TwoQutritState,
    alice: &[MeasurementBasis; 2],
    bob: &[MeasurementBasis; 2],
) -> Result<Behavior> {
    state.validate_normalized()?;
    for basis in alice.iter().chain(bob.iter()) {
        basis.validate(NORM_TOL.max(1e-10))?;
    }
    let mut p = [0.0; TABLE_LEN];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..3 {
                for b in 0..3 {
                    let amp = born_amplitude(state, &alice[x].vectors[a], &bob[y].vectors[b]);
                    p[table_index(x, y, a, b)] = amp.norm_sqr();
                }
            }
        }
    }
    Ok(Behavior::from_raw(p))
}

/// `(<u| (x) <v|) |psi>`.
pub fn born_amplitude(state: &TwoQutritState, u: &QutritState, v: &QutritState) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..3 {
        for j in 0..3 {
            s += u.amplitudes[i].conj() * v.amplitudes[j].conj() * state.amplitudes[i * 3 + j];
        }
    }
    s
}

/// The canonical quantum behavior: canonical state measured with the
/// canonical bases on both sides.
pub fn canonical_behavior() -> Behavior {
    let bases = canonical_bases();
    born_behavior(&canonical_state(), &bases, &bases).expect("canonical inputs are valid")
}

/// The computational (polarization/path) basis.
pub fn computational_basis() -> MeasurementBasis {
    MeasurementBasis::new([
        QutritState::from_reals([1.0, 0.0, 0.0]),
        QutritState::from_reals([0.0, 1.0, 0.0]),
        QutritState::from_reals([0.0, 0.0, 1.0]),
    ])
    .expect("computational basis is orthonormal")
}
