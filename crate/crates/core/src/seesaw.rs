//! See-saw search for the quantum maximum of `I_a`: alternating state
//! updates (top eigenvector of the Bell operator) and measurement updates
//! (gradient ascent on unitary generator coordinates), over random restarts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{gram_schmidt_unitary, hermitian_eigen, unitary_exp, CMatrix};
use crate::qcore::{born_amplitude, MeasurementBasis, TwoQutritState};

/// A point of the variational search space together with its `I_a` value.
#[derive(Debug, Clone)]
pub struct VariationalPoint {
    pub state: TwoQutritState,
    pub alice: [MeasurementBasis; 2],
    pub bob: [MeasurementBasis; 2],
    pub value: f64,
    /// False if the sweep cap was reached before the improvement fell
    /// below tolerance.
    pub converged: bool,
    pub iterations: usize,
    /// Index of the restart that produced this point.
    pub restart: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    /// Freeze the third amplitude of both parties' state support to zero,
    /// confining the state to a qubit-qubit subspace. Measurements stay
    /// full qutrit bases.
    pub qubit_restricted: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 20,
            max_iters: 500,
            tol: 1e-10,
            qubit_restricted: false,
        }
    }
}

/// The Bell operator
/// `B = sum_{k,x,y} (-1)^(k+x+y) |eta_{k|x}><eta_{k|x}| (x) |eta_{k|y}><eta_{k|y}|`.
pub fn bell_operator(alice: &[MeasurementBasis; 2], bob: &[MeasurementBasis; 2]) -> CMatrix {
    let mut b = CMatrix::zeros(9);
    for k in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                let sign = if (k + x + y) % 2 == 0 { 1.0 } else { -1.0 };
                let u = &alice[x].vectors[k].amplitudes;
                let v = &bob[y].vectors[k].amplitudes;
                for i in 0..3 {
                    for j in 0..3 {
                        for ip in 0..3 {
                            for jp in 0..3 {
                                b[(i * 3 + j, ip * 3 + jp)] += sign
                                    * u[i]
                                    * u[ip].conj()
                                    * v[j]
                                    * v[jp].conj();
                            }
                        }
                    }
                }
            }
        }
    }
    b
}

/// `<psi| B |psi>` evaluated directly from the eight projector amplitudes.
fn value_of(state: &TwoQutritState, alice: &[MeasurementBasis; 2], bob: &[MeasurementBasis; 2]) -> f64 {
    let mut total = 0.0;
    for k in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                let sign = if (k + x + y) % 2 == 0 { 1.0 } else { -1.0 };
                let amp = born_amplitude(state, &alice[x].vectors[k], &bob[y].vectors[k]);
                total += sign * amp.norm_sqr();
            }
        }
    }
    total
}

/// The nine Hermitian generators of U(3) used to parametrize basis updates.
fn generators() -> Vec<CMatrix> {
    let mut gens = Vec::with_capacity(9);
    for k in 0..3 {
        let mut g = CMatrix::zeros(3);
        g[(k, k)] = Complex64::new(1.0, 0.0);
        gens.push(g);
    }
    for k in 0..3 {
        for l in (k + 1)..3 {
            let mut g = CMatrix::zeros(3);
            g[(k, l)] = Complex64::new(1.0, 0.0);
            g[(l, k)] = Complex64::new(1.0, 0.0);
            gens.push(g);
            let mut g = CMatrix::zeros(3);
            g[(k, l)] = Complex64::new(0.0, 1.0);
            g[(l, k)] = Complex64::new(0.0, -1.0);
            gens.push(g);
        }
    }
    gens
}

fn basis_to_unitary(basis: &MeasurementBasis) -> CMatrix {
    let mut u = CMatrix::zeros(3);
    for k in 0..3 {
        for i in 0..3 {
            u[(i, k)] = basis.vectors[k].amplitudes[i];
        }
    }
    u
}

/// Top eigenvector of the Bell operator, optionally restricted to the
/// qubit-qubit subspace (both parties' third level unpopulated).
fn best_state(b: &CMatrix, qubit_restricted: bool) -> (TwoQutritState, f64) {
    if !qubit_restricted {
        let eig = hermitian_eigen(b, 1e-14);
        let col = eig.vectors.column(8);
        let mut amplitudes = [Complex64::new(0.0, 0.0); 9];
        amplitudes.copy_from_slice(&col);
        return (TwoQutritState::new(amplitudes), eig.values[8]);
    }
    // Indices with a < 2 and b < 2 in the (a, b) product ordering.
    let support = [0usize, 1, 3, 4];
    let mut sub = CMatrix::zeros(4);
    for (i, &si) in support.iter().enumerate() {
        for (j, &sj) in support.iter().enumerate() {
            sub[(i, j)] = b[(si, sj)];
        }
    }
    let eig = hermitian_eigen(&sub, 1e-14);
    let col = eig.vectors.column(3);
    let mut amplitudes = [Complex64::new(0.0, 0.0); 9];
    for (i, &si) in support.iter().enumerate() {
        amplitudes[si] = col[i];
    }
    (TwoQutritState::new(amplitudes), eig.values[3])
}

/// One full see-saw refinement from a given starting point.
///
/// Each sweep performs a state update followed by a gradient-ascent update
/// of each of the four bases; the value is monotone nondecreasing across
/// accepted steps. Stops when a sweep improves by less than `tol`.
pub fn refine(
    mut alice: [MeasurementBasis; 2],
    mut bob: [MeasurementBasis; 2],
    max_iters: usize,
    tol: f64,
    qubit_restricted: bool,
) -> VariationalPoint {
    let gens = generators();
    let mut state;
    let mut value;
    {
        let b = bell_operator(&alice, &bob);
        let (s, v) = best_state(&b, qubit_restricted);
        state = s;
        value = v;
    }
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..max_iters {
        iterations += 1;
        let before = value;

        // Measurement updates, one party-setting at a time.
        for which in 0..4 {
            let (party, setting) = (which / 2, which % 2);
            let current = if party == 0 {
                basis_to_unitary(&alice[setting])
            } else {
                basis_to_unitary(&bob[setting])
            };
            let eval = |u: &CMatrix,
                        alice: &[MeasurementBasis; 2],
                        bob: &[MeasurementBasis; 2],
                        state: &TwoQutritState| {
                let basis = MeasurementBasis::from_unitary_columns(u);
                let mut a2 = alice.clone();
                let mut b2 = bob.clone();
                if party == 0 {
                    a2[setting] = basis;
                } else {
                    b2[setting] = basis;
                }
                (value_of(state, &a2, &b2), a2, b2)
            };

            // Central finite differences on the generator coordinates.
            let h = 1e-6;
            let mut grad = [0.0; 9];
            for (j, g) in gens.iter().enumerate() {
                let up = unitary_exp(g, h).mul(&current);
                let dn = unitary_exp(g, -h).mul(&current);
                let (vp, _, _) = eval(&up, &alice, &bob, &state);
                let (vn, _, _) = eval(&dn, &alice, &bob, &state);
                grad[j] = (vp - vn) / (2.0 * h);
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if gnorm < 1e-12 {
                continue;
            }
            let mut direction = CMatrix::zeros(3);
            for (j, g) in gens.iter().enumerate() {
                for i in 0..9 {
                    direction.data[i] += grad[j] / gnorm * g.data[i];
                }
            }

            // Backtracking line search halving from 1.0.
            let mut step = 1.0;
            for _ in 0..45 {
                let candidate = unitary_exp(&direction, step).mul(&current);
                let (v, a2, b2) = eval(&candidate, &alice, &bob, &state);
                if v > value + 1e-14 * (1.0 + value.abs()) {
                    value = v;
                    alice = a2;
                    bob = b2;
                    break;
                }
                step *= 0.5;
            }
        }

        // State update: exact best state for the current measurements.
        let b = bell_operator(&alice, &bob);
        let (s, v) = best_state(&b, qubit_restricted);
        if v > value {
            state = s;
            value = v;
        }

        if value - before < tol {
            converged = true;
            break;
        }
    }

    VariationalPoint {
        state,
        alice,
        bob,
        value,
        converged,
        iterations,
        restart: 0,
    }
}

fn random_unitary(rng: &mut ChaCha8Rng) -> CMatrix {
    let mut m = CMatrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            // Box-Muller pairs; a Gaussian matrix orthonormalized by
            // Gram-Schmidt is Haar-like, which is all the restarts need.
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let r = (-2.0 * u1.ln()).sqrt();
            m[(i, j)] = Complex64::new(r * u2.cos(), r * u2.sin());
        }
    }
    gram_schmidt_unitary(&m)
}

/// Best-of-restarts see-saw optimization of `I_a`.
///
/// Restart `i` draws its starting bases from a generator seeded with
/// `seed + i`; ties between restarts keep the lowest restart index, so the
/// result is a deterministic function of the options.
pub fn optimize(opts: &OptimizeOptions) -> Result<VariationalPoint> {
    assert!(opts.restarts >= 1);
    let mut best: Option<VariationalPoint> = None;
    for restart in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(restart as u64));
        let alice = [
            MeasurementBasis::from_unitary_columns(&random_unitary(&mut rng)),
            MeasurementBasis::from_unitary_columns(&random_unitary(&mut rng)),
        ];
        let bob = [
            MeasurementBasis::from_unitary_columns(&random_unitary(&mut rng)),
            MeasurementBasis::from_unitary_columns(&random_unitary(&mut rng)),
        ];
        let mut point = refine(alice, bob, opts.max_iters, opts.tol, opts.qubit_restricted);
        point.restart = restart;
        let replace = match &best {
            None => true,
            Some(b) => point.value > b.value,
        };
        if replace {
            best = Some(point);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Serializable summary of an optimization result.
#[derive(Debug, Serialize)]
pub struct OptimizeReport {
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
    pub restart: usize,
    /// State amplitudes as `[re, im]` pairs, row-major in `(a_A, a_B)`.
    pub state: Vec<[f64; 2]>,
    /// `alice[setting][outcome]` basis vectors as `[re, im]` triples.
    pub alice: Vec<Vec<Vec<[f64; 2]>>>,
    pub bob: Vec<Vec<Vec<[f64; 2]>>>,
}

impl From<&VariationalPoint> for OptimizeReport {
    fn from(p: &VariationalPoint) -> Self {
        let pack_basis = |bs: &[MeasurementBasis; 2]| {
            bs.iter()
                .map(|basis| {
                    basis
                        .vectors
                        .iter()
                        .map(|v| v.amplitudes.iter().map(|c| [c.re, c.im]).collect())
                        .collect()
                })
                .collect()
        };
        OptimizeReport {
            value: p.value,
            converged: p.converged,
            iterations: p.iterations,
            restart: p.restart,
            state: p.state.amplitudes.iter().map(|c| [c.re, c.im]).collect(),
            alice: pack_basis(&p.alice),
            bob: pack_basis(&p.bob),
        }
    }
}
