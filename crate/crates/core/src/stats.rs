//! The data-evaluation pipeline: grouping runs into complete sets, the
//! three per-set conditions (normalization, nonsignaling, binarity),
//! Student-t/chi-squared aggregation with p-value conversions, the reduced
//! data set, the per-set empirical `I_a`, and the nonsignaling-constrained
//! maximum-likelihood fit.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

use crate::behavior::{table_index, Behavior, TABLE_LEN};
use crate::error::{Error, Result};
use crate::simlab::RunRecord;

/// Four runs covering all four setting pairs; `tables[x * 2 + y][a][b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompleteSet {
    pub index: usize,
    pub tables: [[[u64; 3]; 3]; 4],
}

impl CompleteSet {
    pub fn slice_total(&self, x: usize, y: usize) -> u64 {
        self.tables[x * 2 + y].iter().flatten().sum()
    }

    pub fn grand_total(&self) -> u64 {
        (0..4).map(|s| self.tables[s].iter().flatten().sum::<u64>()).sum()
    }
}

/// Result of grouping a run list into complete sets.
#[derive(Debug, Clone)]
pub struct Grouping {
    pub sets: Vec<CompleteSet>,
    /// Runs left over in streams longer than the shortest one.
    pub discarded_runs: usize,
}

/// Groups time-ordered runs into complete sets: runs are split into four
/// per-setting-pair streams preserving order, and the r-th set combines the
/// r-th run of each stream. The set count is the shortest stream length.
pub fn group_complete_sets(records: &[RunRecord]) -> Grouping {
    let mut streams: [Vec<&RunRecord>; 4] = [vec![], vec![], vec![], vec![]];
    for r in records {
        streams[r.x * 2 + r.y].push(r);
    }
    let count = streams.iter().map(|s| s.len()).min().unwrap_or(0);
    let mut sets = Vec::with_capacity(count);
    for i in 0..count {
        let mut tables = [[[0u64; 3]; 3]; 4];
        for s in 0..4 {
            tables[s] = streams[s][i].counts;
        }
        sets.push(CompleteSet { index: i, tables });
    }
    Grouping {
        sets,
        discarded_runs: records.len() - 4 * count,
    }
}

/// Keeps every fifth set (the first of each block of five, 1-based
/// `r = 1 mod 5`).
pub fn reduce_every_fifth(sets: &[CompleteSet]) -> Vec<CompleteSet> {
    sets.iter().step_by(5).cloned().collect()
}

/// Condition (i) per set: the three total-count differences
/// `T(x,y) - T(0,0)` for `(x,y)` in `{(0,1), (1,0), (1,1)}`.
pub fn condition_normalization(set: &CompleteSet) -> [f64; 3] {
    let t00 = set.slice_total(0, 0) as f64;
    [
        set.slice_total(0, 1) as f64 - t00,
        set.slice_total(1, 0) as f64 - t00,
        set.slice_total(1, 1) as f64 - t00,
    ]
}

/// Condition (ii) per set: 11 independent marginal-count differences.
///
/// For each party, outcome, and local setting, the remote-setting-0 marginal
/// total minus the remote-setting-1 total, divided by the set's mean slice
/// total so that a common rate change across the set (condition (i)
/// territory) does not register here. Order: Alice `(x, a)` lexicographic,
/// then Bob `(y, b)`; the final Bob difference `(y=1, b=2)` is linearly
/// dependent on the others given normalization and is dropped.
pub fn condition_nonsignaling(set: &CompleteSet) -> [f64; 11] {
    let tbar = set.grand_total() as f64 / 4.0;
    let mut out = [0.0; 11];
    if tbar == 0.0 {
        return out;
    }
    let mut i = 0;
    for x in 0..2 {
        for a in 0..3 {
            let m0: u64 = set.tables[x * 2][a].iter().sum();
            let m1: u64 = set.tables[x * 2 + 1][a].iter().sum();
            out[i] = (m0 as f64 - m1 as f64) / tbar;
            i += 1;
        }
    }
    for y in 0..2 {
        for b in 0..3 {
            if y == 1 && b == 2 {
                continue;
            }
            let m0: u64 = (0..3).map(|a| set.tables[y][a][b]).sum();
            let m1: u64 = (0..3).map(|a| set.tables[2 + y][a][b]).sum();
            out[i] = (m0 as f64 - m1 as f64) / tbar;
            i += 1;
        }
    }
    out
}

/// Condition (iii) per set: the count-level binarity statistic
/// `sum_{k,x,y} (-1)^(k+x+y) N(k,k|x,y) - (1/4) sum N`. Positive values
/// violate binarity.
pub fn condition_binary(set: &CompleteSet) -> f64 {
    let mut signed = 0.0;
    for k in 0..2 {
        for x in 0..2 {
            for y in 0..2 {
                let sign = if (k + x + y) % 2 == 0 { 1.0 } else { -1.0 };
                signed += sign * set.tables[x * 2 + y][k][k] as f64;
            }
        }
    }
    signed - 0.25 * set.grand_total() as f64
}

/// Which of the three evaluation conditions a statistic belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionName {
    Normalization,
    Nonsignaling,
    Binary,
}

impl std::fmt::Display for ConditionName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConditionName::Normalization => write!(f, "(i)"),
            ConditionName::Nonsignaling => write!(f, "(ii)"),
            ConditionName::Binary => write!(f, "(iii)"),
        }
    }
}

/// Mean/variance/Student-t summary of one per-set statistic over all sets.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionStat {
    pub name: ConditionName,
    pub mean: f64,
    pub variance: f64,
    /// `t = m sqrt(R / v)`, Student-t with `g = R - 1` degrees of freedom.
    pub t: f64,
    /// `t` rescaled by `sqrt((g - 2)/g)`, treated as standard normal.
    pub z: f64,
    pub dof: usize,
}

/// Aggregates per-set values of one condition into a `ConditionStat`.
pub fn aggregate(name: ConditionName, values: &[f64]) -> Result<ConditionStat> {
    let r = values.len();
    if r < 3 {
        return Err(Error::EmptyData(format!(
            "condition {name} needs at least 3 sets, got {r}"
        )));
    }
    let rf = r as f64;
    let mean = values.iter().sum::<f64>() / rf;
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (rf - 1.0);
    if variance == 0.0 {
        return Err(Error::DegenerateStatistic(format!(
            "condition {name} has constant per-set values ({mean}); refusing to divide by zero variance"
        )));
    }
    let t = mean * (rf / variance).sqrt();
    let g = r - 1;
    let z = t * (((g - 2) as f64) / g as f64).sqrt();
    Ok(ConditionStat {
        name,
        mean,
        variance,
        t,
        z,
        dof: g,
    })
}

/// Joint chi-squared p-value of several z-statistics.
///
/// `chi2 = sum z^2` with the given degrees of freedom; when `conservative`
/// is set and `chi2` falls below the distribution median, the p-value is
/// doubled (capped at 1).
pub fn joint_chi2(stats: &[ConditionStat], dof: usize, conservative: bool) -> (f64, f64, bool) {
    assert_eq!(stats.len(), dof);
    let chi2: f64 = stats.iter().map(|s| s.z * s.z).sum();
    let dist = ChiSquared::new(dof as f64).expect("positive dof");
    let mut p = dist.sf(chi2);
    let applied = conservative && chi2 < dist.inverse_cdf(0.5);
    if applied {
        p = (2.0 * p).min(1.0);
    }
    (p.clamp(f64::MIN_POSITIVE, 1.0), chi2, applied)
}

/// Two-sided normal p-value of a single z-statistic.
pub fn two_sided_p(z: f64) -> f64 {
    let normal = Normal::new(0.0, 1.0).unwrap();
    (2.0 * normal.sf(z.abs())).clamp(f64::MIN_POSITIVE, 1.0)
}

/// Converts a p-value into the report's plausibility units:
/// coin tosses `-log2(p)` and two-sided normal standard deviations
/// `Phi^{-1}(1 - p/2)`.
pub fn p_conversions(p: f64) -> Result<(f64, f64)> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::PValueOutOfRange(p));
    }
    let coin_tosses = if p >= 1.0 { 0.0 } else { -p.log2() };
    let normal = Normal::new(0.0, 1.0).unwrap();
    let standard_deviations = if p >= 1.0 {
        0.0
    } else {
        -normal.inverse_cdf(p / 2.0)
    };
    Ok((coin_tosses, standard_deviations.max(0.0)))
}

/// Per-set empirical `I_a` summary.
#[derive(Debug, Clone)]
pub struct IaEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub per_set: Vec<f64>,
    /// Sets skipped because some slice had zero total counts.
    pub excluded_sets: usize,
}

/// Empirical frequencies per set (each slice normalized by its own total)
/// and the resulting per-set `I_a`, with mean and standard error.
pub fn empirical_ia(sets: &[CompleteSet]) -> Result<IaEstimate> {
    let mut per_set = Vec::with_capacity(sets.len());
    let mut excluded_sets = 0;
    for set in sets {
        match set_frequencies(set) {
            Some(behavior) => per_set.push(behavior.i_a()),
            None => excluded_sets += 1,
        }
    }
    if per_set.is_empty() {
        return Err(Error::EmptyData("no sets with nonzero slice totals".into()));
    }
    let r = per_set.len() as f64;
    let mean = per_set.iter().sum::<f64>() / r;
    let standard_error = if per_set.len() > 1 {
        let var = per_set.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
        (var / r).sqrt()
    } else {
        0.0
    };
    Ok(IaEstimate {
        mean,
        standard_error,
        per_set,
        excluded_sets,
    })
}

/// Per-slice empirical frequencies of one set; `None` if a slice is empty.
pub fn set_frequencies(set: &CompleteSet) -> Option<Behavior> {
    let mut p = [0.0; TABLE_LEN];
    for x in 0..2 {
        for y in 0..2 {
            let total = set.slice_total(x, y);
            if total == 0 {
                return None;
            }
            for a in 0..3 {
                for b in 0..3 {
                    p[table_index(x, y, a, b)] =
                        set.tables[x * 2 + y][a][b] as f64 / total as f64;
                }
            }
        }
    }
    Some(Behavior::from_raw(p))
}

/// Counts pooled over all sets, as a flat `(x, y, a, b)` table.
pub fn pooled_counts(sets: &[CompleteSet]) -> [f64; TABLE_LEN] {
    let mut n = [0.0; TABLE_LEN];
    for set in sets {
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..3 {
                    for b in 0..3 {
                        n[table_index(x, y, a, b)] += set.tables[x * 2 + y][a][b] as f64;
                    }
                }
            }
        }
    }
    n
}

/// `I_a` of the pooled counts with each slice normalized by its own total.
pub fn pooled_ia(counts: &[f64; TABLE_LEN]) -> Result<f64> {
    Ok(counts_to_frequencies(counts)?.i_a())
}

fn counts_to_frequencies(counts: &[f64; TABLE_LEN]) -> Result<Behavior> {
    let mut p = [0.0; TABLE_LEN];
    for x in 0..2 {
        for y in 0..2 {
            let total: f64 = (0..3)
                .flat_map(|a| (0..3).map(move |b| (a, b)))
                .map(|(a, b)| counts[table_index(x, y, a, b)])
                .sum();
            if total <= 0.0 {
                return Err(Error::EmptyData(format!("slice ({x},{y}) has no counts")));
            }
            for a in 0..3 {
                for b in 0..3 {
                    p[table_index(x, y, a, b)] = counts[table_index(x, y, a, b)] / total;
                }
            }
        }
    }
    Ok(Behavior::from_raw(p))
}

/// Outcome of the nonsignaling-constrained maximum-likelihood fit.
#[derive(Debug, Clone)]
pub struct MleFit {
    pub behavior: Behavior,
    pub ia: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Maximizes `sum N log P` over behaviors satisfying exact per-slice
/// normalization and nonsignaling.
///
/// The constraint set is an affine subspace, so the problem reduces to an
/// unconstrained concave maximization in null-space coordinates; Newton's
/// method with backtracking line search converges quadratically.
/// Convergence is declared when the projected gradient sup-norm falls below
/// `1e-9` relative to the gradient scale. All slice totals must be nonzero.
pub fn mle_nonsignaling_fit(counts: &[f64; TABLE_LEN]) -> Result<MleFit> {
    let empirical = counts_to_frequencies(counts)?;
    let basis = constraint_basis();
    let null = null_space_basis(&basis);
    let project = |v: &mut [f64; TABLE_LEN]| {
        for q in &basis {
            let dot: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for i in 0..TABLE_LEN {
                v[i] -= dot * q[i];
            }
        }
    };

    // Feasible interior start: uniform plus the null-space component of the
    // empirical frequencies, blended back toward uniform if any entry is
    // too close to the boundary.
    let uniform = 1.0 / 9.0;
    let mut delta = [0.0; TABLE_LEN];
    for i in 0..TABLE_LEN {
        delta[i] = empirical.as_slice()[i] - uniform;
    }
    project(&mut delta);
    let mut x = [0.0; TABLE_LEN];
    for i in 0..TABLE_LEN {
        x[i] = uniform + delta[i];
    }
    let min_entry = x.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_entry < 1e-9 {
        // (1 - lambda) x + lambda u has min entry >= 1e-9 for this lambda.
        let lambda = ((1e-9 - min_entry) / (uniform - min_entry)).clamp(0.0, 1.0);
        for v in x.iter_mut() {
            *v = (1.0 - lambda) * *v + lambda * uniform;
        }
    }

    let log_lik = |x: &[f64; TABLE_LEN]| -> f64 {
        counts
            .iter()
            .zip(x.iter())
            .map(|(&n, &p)| if n > 0.0 { n * p.max(1e-300).ln() } else { 0.0 })
            .sum()
    };

    let dim = null.len();
    let max_iters = 200;
    let mut value = log_lik(&x);
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let mut grad = [0.0; TABLE_LEN];
        let mut grad_scale = 1.0f64;
        for i in 0..TABLE_LEN {
            grad[i] = if counts[i] > 0.0 {
                counts[i] / x[i].max(1e-300)
            } else {
                0.0
            };
            grad_scale = grad_scale.max(grad[i].abs());
        }
        let mut pg = grad;
        project(&mut pg);
        let sup = pg.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if sup <= 1e-9 * grad_scale {
            converged = true;
            break;
        }

        // Newton system in null-space coordinates: H d = g_u with
        // H = Z^T diag(N / x^2) Z and g_u = Z^T grad; a tiny ridge keeps H
        // positive definite when some counts are zero.
        let mut weights = [0.0; TABLE_LEN];
        for i in 0..TABLE_LEN {
            weights[i] = counts[i] / (x[i] * x[i]).max(1e-300);
        }
        let gu: Vec<f64> = null
            .iter()
            .map(|z| z.iter().zip(grad.iter()).map(|(a, b)| a * b).sum())
            .collect();
        let mut h = vec![vec![0.0; dim]; dim];
        for r in 0..dim {
            for c in r..dim {
                let mut s = 0.0;
                for i in 0..TABLE_LEN {
                    s += null[r][i] * weights[i] * null[c][i];
                }
                h[r][c] = s;
                h[c][r] = s;
            }
        }
        let trace: f64 = (0..dim).map(|r| h[r][r]).sum();
        let ridge = 1e-14 * trace.max(1.0);
        for r in 0..dim {
            h[r][r] += ridge;
        }
        let d = cholesky_solve(&mut h, &gu);
        let mut step = [0.0; TABLE_LEN];
        for (z, &di) in null.iter().zip(d.iter()) {
            for i in 0..TABLE_LEN {
                step[i] += di * z[i];
            }
        }
        let ascent: f64 = gu.iter().zip(d.iter()).map(|(a, b)| a * b).sum();

        let mut alpha = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut trial = [0.0; TABLE_LEN];
            let mut feasible = true;
            for i in 0..TABLE_LEN {
                trial[i] = x[i] + alpha * step[i];
                if trial[i] <= 0.0 {
                    feasible = false;
                    break;
                }
            }
            if feasible {
                let trial_value = log_lik(&trial);
                // The noise term keeps full Newton steps acceptable once
                // per-step improvements fall below the float resolution of
                // the log-likelihood, preserving quadratic convergence.
                let noise = 1e-12 * (1.0 + value.abs());
                if trial_value >= value + 1e-4 * alpha * ascent - noise {
                    x = trial;
                    value = trial_value;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            // No improving step at line-search resolution: numerically
            // stationary.
            converged = true;
            break;
        }
    }

    let behavior = Behavior::from_raw(x);
    let ia = behavior.i_a();
    Ok(MleFit {
        behavior,
        ia,
        converged,
        iterations,
    })
}

/// Orthonormal basis of the row space of the normalization plus
/// nonsignaling constraint matrix (rank 12 out of 16 raw rows).
fn constraint_basis() -> Vec<[f64; TABLE_LEN]> {
    let mut rows: Vec<[f64; TABLE_LEN]> = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            let mut row = [0.0; TABLE_LEN];
            for a in 0..3 {
                for b in 0..3 {
                    row[table_index(x, y, a, b)] = 1.0;
                }
            }
            rows.push(row);
        }
    }
    for x in 0..2 {
        for a in 0..3 {
            let mut row = [0.0; TABLE_LEN];
            for b in 0..3 {
                row[table_index(x, 0, a, b)] += 1.0;
                row[table_index(x, 1, a, b)] -= 1.0;
            }
            rows.push(row);
        }
    }
    for y in 0..2 {
        for b in 0..3 {
            let mut row = [0.0; TABLE_LEN];
            for a in 0..3 {
                row[table_index(0, y, a, b)] += 1.0;
                row[table_index(1, y, a, b)] -= 1.0;
            }
            rows.push(row);
        }
    }

    let mut basis: Vec<[f64; TABLE_LEN]> = Vec::new();
    for mut row in rows {
        for q in &basis {
            let dot: f64 = q.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
            for i in 0..TABLE_LEN {
                row[i] -= dot * q[i];
            }
        }
        let norm: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for v in row.iter_mut() {
                *v /= norm;
            }
            basis.push(row);
        }
    }
    debug_assert_eq!(basis.len(), 12);
    basis
}

/// Orthonormal basis of the constraint null space (24 directions),
/// completing `constraint_basis` via Gram-Schmidt on unit vectors.
fn null_space_basis(constraints: &[[f64; TABLE_LEN]]) -> Vec<[f64; TABLE_LEN]> {
    let mut null: Vec<[f64; TABLE_LEN]> = Vec::new();
    for k in 0..TABLE_LEN {
        let mut v = [0.0; TABLE_LEN];
        v[k] = 1.0;
        for q in constraints.iter().chain(null.iter()) {
            let dot: f64 = q.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for i in 0..TABLE_LEN {
                v[i] -= dot * q[i];
            }
        }
        let norm: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for a in v.iter_mut() {
                *a /= norm;
            }
            null.push(v);
        }
    }
    debug_assert_eq!(null.len(), TABLE_LEN - constraints.len());
    null
}

/// Solves the symmetric positive-definite system `A x = b` in place.
fn cholesky_solve(a: &mut [Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    // Lower-triangular factor overwrites A.
    for j in 0..n {
        for k in 0..j {
            let f = a[j][k];
            for i in j..n {
                a[i][j] -= a[i][k] * f;
            }
        }
        let d = a[j][j].max(f64::MIN_POSITIVE).sqrt();
        for i in j..n {
            a[i][j] /= d;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= a[i][k] * y[k];
        }
        y[i] /= a[i][i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= a[k][i] * y[k];
        }
        y[i] /= a[i][i];
    }
    y
}

/// One condition row of the final report.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub name: ConditionName,
    pub statistic: f64,
    pub p_value: f64,
    pub coin_tosses: f64,
    pub standard_deviations: f64,
    pub conservative_applied: bool,
}

/// Maximum-likelihood section of the report.
#[derive(Debug, Clone, Serialize)]
pub struct MleReport {
    pub ia_fitted: f64,
    pub ia_raw_pooled: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// The full analysis output (Table-2-style).
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub reduced: bool,
    pub set_count: usize,
    pub discarded_runs: usize,
    pub excluded_sets: usize,
    pub ia_mean: f64,
    pub ia_standard_error: f64,
    pub conditions: Vec<ConditionReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mle: Option<MleReport>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AnalyzeOptions {
    /// Analyze only every fifth complete set.
    pub reduced: bool,
    /// Run the nonsignaling-constrained maximum-likelihood fit.
    pub mle: bool,
}

/// Runs the full pipeline on a list of time-ordered run records.
pub fn analyze(records: &[RunRecord], options: &AnalyzeOptions) -> Result<AnalysisReport> {
    let grouping = group_complete_sets(records);
    let sets = if options.reduced {
        reduce_every_fifth(&grouping.sets)
    } else {
        grouping.sets
    };
    if sets.len() < 3 {
        return Err(Error::EmptyData(format!(
            "need at least 3 complete sets, got {}",
            sets.len()
        )));
    }

    // Condition (i): three total differences, jointly chi-squared.
    let mut norm_stats = Vec::with_capacity(3);
    for j in 0..3 {
        let values: Vec<f64> = sets.iter().map(|s| condition_normalization(s)[j]).collect();
        norm_stats.push(aggregate(ConditionName::Normalization, &values)?);
    }
    let (p_i, chi2_i, cons_i) = joint_chi2(&norm_stats, 3, true);
    let (coin_i, sd_i) = p_conversions(p_i)?;

    // Condition (ii): eleven marginal differences, jointly chi-squared.
    let mut ns_stats = Vec::with_capacity(11);
    for j in 0..11 {
        let values: Vec<f64> = sets.iter().map(|s| condition_nonsignaling(s)[j]).collect();
        ns_stats.push(aggregate(ConditionName::Nonsignaling, &values)?);
    }
    let (p_ii, chi2_ii, cons_ii) = joint_chi2(&ns_stats, 11, true);
    let (coin_ii, sd_ii) = p_conversions(p_ii)?;

    // Condition (iii): a single statistic, two-sided normal.
    let binary_values: Vec<f64> = sets.iter().map(condition_binary).collect();
    let binary_stat = aggregate(ConditionName::Binary, &binary_values)?;
    let p_iii = two_sided_p(binary_stat.z);
    let (coin_iii, sd_iii) = p_conversions(p_iii)?;

    let ia = empirical_ia(&sets)?;

    let mle = if options.mle {
        let counts = pooled_counts(&sets);
        let raw = pooled_ia(&counts)?;
        let fit = mle_nonsignaling_fit(&counts)?;
        Some(MleReport {
            ia_fitted: fit.ia,
            ia_raw_pooled: raw,
            converged: fit.converged,
            iterations: fit.iterations,
        })
    } else {
        None
    };

    Ok(AnalysisReport {
        schema: "1".to_string(),
        reduced: options.reduced,
        set_count: sets.len(),
        discarded_runs: grouping.discarded_runs,
        excluded_sets: ia.excluded_sets,
        ia_mean: ia.mean,
        ia_standard_error: ia.standard_error,
        conditions: vec![
            ConditionReport {
                name: ConditionName::Normalization,
                statistic: chi2_i,
                p_value: p_i,
                coin_tosses: coin_i,
                standard_deviations: sd_i,
                conservative_applied: cons_i,
            },
            ConditionReport {
                name: ConditionName::Nonsignaling,
                statistic: chi2_ii,
                p_value: p_ii,
                coin_tosses: coin_ii,
                standard_deviations: sd_ii,
                conservative_applied: cons_ii,
            },
            ConditionReport {
                name: ConditionName::Binary,
                statistic: binary_stat.z,
                p_value: p_iii,
                coin_tosses: coin_iii,
                standard_deviations: sd_iii,
                conservative_applied: false,
            },
        ],
        mle,
    })
}
