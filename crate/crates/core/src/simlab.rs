//! Monte Carlo simulation of the photonic coincidence experiment: random
//! settings per run, Poissonian counts from a noisy quantum behavior, and a
//! slow log-AR(1) pump-power drift.
//!
//! Note that because the settings are drawn independently of the drift,
//! whole-run rate drift inflates the per-set variance of the downstream
//! statistics but leaves their means unbiased: conditioned on a run's total
//! count, the cell counts are multinomial in the behavior alone, and the
//! per-stream time averages of the drift coincide up to edge effects. Rate
//! drift of this form therefore cannot produce apparent signaling in the
//! evaluation pipeline's mean statistics, only wider per-set scatter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::behavior::Behavior;
use crate::error::{Error, Result};
use crate::qcore::{canonical_behavior, NoiseModel};
use crate::QUANTUM_MAX;

/// One experimental run: fixed settings, one collection window, a 3x3 table
/// of coincidence counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub x: usize,
    pub y: usize,
    pub t_start: f64,
    pub duration_s: f64,
    /// `counts[a][b]`.
    pub counts: [[u64; 3]; 3],
}

impl RunRecord {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

/// Simulation parameters. The defaults reproduce the experiment's scale:
/// 4500 runs of 0.5 s, visibility 0.98, and a detected-pair rate of
/// 33.6 pairs/s (about 75 600 coincidences in total).
///
/// `pair_rate` is the rate of *detected* pairs: recorded coincidences are
/// treated as a fair sample, so the 0.087 overall detection efficiency is
/// already absorbed (`pair_rate = emission_rate * efficiency` if emission
/// rates are supplied instead).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_runs: usize,
    pub run_duration: f64,
    pub visibility: f64,
    pub pair_rate: f64,
    /// Stationary relative standard deviation of the per-run rate drift.
    pub drift_sigma: f64,
    /// Correlation length of the drift, in runs.
    pub drift_correlation: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_runs: 4500,
            run_duration: 0.5,
            visibility: 0.98,
            pair_rate: 33.6,
            drift_sigma: 0.05,
            drift_correlation: 50.0,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.run_duration > 0.0) || !(self.pair_rate > 0.0) {
            return Err(Error::InvalidConfig(
                "run_duration and pair_rate must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::VisibilityOutOfRange(self.visibility));
        }
        if !(self.drift_sigma >= 0.0) || !(self.drift_correlation > 0.0) {
            return Err(Error::InvalidConfig(
                "drift_sigma must be >= 0 and drift_correlation positive".into(),
            ));
        }
        Ok(())
    }

    /// The behavior the counts are drawn from.
    pub fn behavior(&self) -> Behavior {
        NoiseModel::new(self.visibility)
            .expect("validated visibility")
            .apply(&canonical_behavior())
    }
}

/// Expected `I_a` of the simulated experiment: `visibility * 2(2/3)^(3/2)`.
/// The rate drift multiplies whole runs and cancels from per-run empirical
/// frequencies, so it does not bias `I_a`.
pub fn expected_ia(config: &SimConfig) -> f64 {
    config.visibility * QUANTUM_MAX
}

/// Simulates the full experiment.
///
/// Per run: settings drawn independently and uniformly, expected total
/// `pair_rate * duration * drift`, counts Poisson per cell with mean split
/// by the noisy behavior. `log(drift)` follows a stationary AR(1) with the
/// configured relative sigma and correlation length, mean-corrected so the
/// expected rate multiplier is one. Identical configs (including seed)
/// reproduce identical records.
pub fn simulate(config: &SimConfig) -> Result<Vec<RunRecord>> {
    config.validate()?;
    let behavior = config.behavior();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let sigma = config.drift_sigma;
    let log_sigma = if sigma > 0.0 {
        // Match the relative std of the multiplier: Var(e^L) with
        // L ~ N(-s^2/2, s^2) is e^{s^2} - 1 = sigma^2.
        (1.0 + sigma * sigma).ln().sqrt()
    } else {
        0.0
    };
    let rho = (-1.0 / config.drift_correlation).exp();
    let innovation_scale = log_sigma * (1.0 - rho * rho).sqrt();
    let mut log_drift: f64 = if log_sigma > 0.0 {
        let z: f64 = StandardNormal.sample(&mut rng);
        z * log_sigma
    } else {
        0.0
    };

    let mut records = Vec::with_capacity(config.n_runs);
    for run in 0..config.n_runs {
        let x = rng.gen_range(0..2usize);
        let y = rng.gen_range(0..2usize);
        if run > 0 && log_sigma > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            log_drift = rho * log_drift + innovation_scale * z;
        }
        let drift = (log_drift - 0.5 * log_sigma * log_sigma).exp();
        let mu = config.pair_rate * config.run_duration * drift;

        let mut counts = [[0u64; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let mean = mu * behavior.get(x, y, a, b);
                counts[a][b] = if mean > 0.0 {
                    Poisson::new(mean)
                        .expect("positive mean")
                        .sample(&mut rng) as u64
                } else {
                    0
                };
            }
        }
        records.push(RunRecord {
            run,
            x,
            y,
            t_start: run as f64 * config.run_duration,
            duration_s: config.run_duration,
            counts,
        });
    }
    Ok(records)
}

/// Writes records as JSON Lines.
pub fn write_jsonl<W: std::io::Write>(records: &[RunRecord], mut w: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

/// Reads JSON Lines records, reporting the line number of any malformed one.
pub fn read_jsonl<R: std::io::BufRead>(r: R) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RunRecord = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
            line: i + 1,
            message: e.to_string(),
        })?;
        if rec.x > 1 || rec.y > 1 {
            return Err(Error::MalformedRecord {
                line: i + 1,
                message: format!("settings ({}, {}) out of range", rec.x, rec.y),
            });
        }
        records.push(rec);
    }
    Ok(records)
}
