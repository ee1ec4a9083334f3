//! Transition probability matrices `P(t) = exp(tQ)`.
//!
//! Two independent routes are provided. The primary route scales `tQ` down
//! until its infinity norm is at most 0.5, sums a truncated Taylor series
//! (remainder below machine precision at that norm), and squares back up.
//! The cross-check route is uniformization: `exp(tQ)` expanded as a Poisson
//! mixture of powers of the row-stochastic jump matrix `R = I + Q/lambda`,
//! truncated once the accumulated Poisson mass is within tolerance of one.
//!
//! Both routes clamp round-off negatives (never below -1e-12 for a valid
//! generator) and renormalize rows, so results satisfy the probability
//! matrix invariants to well under 1e-10.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::GeneratorMatrix;

/// Taylor order used on the scaled matrix; with norm <= 0.5 the remainder
/// 0.5^17/17! is ~2e-20, far below f64 resolution.
const TAYLOR_ORDER: usize = 16;

/// Round-off floor: entries in [-1e-12, 0) are clamped to zero, anything
/// more negative signals an invalid input.
const NEGATIVE_FLOOR: f64 = -1e-12;

/// K x K transition probability matrix over a fixed horizon in days.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMatrix {
    p: DMatrix<f64>,
    horizon: f64,
}

impl ProbabilityMatrix {
    fn new_checked(p: DMatrix<f64>, horizon: f64) -> Result<Self> {
        for r in 0..p.nrows() {
            let mut sum = 0.0;
            for s in 0..p.ncols() {
                let v = p[(r, s)];
                if !(-1e-10..=1.0 + 1e-10).contains(&v) {
                    return Err(Error::InvalidGenerator(format!(
                        "probability entry ({},{}) = {v} outside [0,1]",
                        r + 1,
                        s + 1
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidGenerator(format!(
                    "probability row {} sums to {sum}",
                    r + 1
                )));
            }
        }
        Ok(Self { p, horizon })
    }

    pub fn k(&self) -> usize {
        self.p.nrows()
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Entry `P[r,s]` with 1-based state indices.
    pub fn prob(&self, r: usize, s: usize) -> f64 {
        self.p[(r - 1, s - 1)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Maximum absolute entry difference against another matrix.
    pub fn max_abs_diff(&self, other: &ProbabilityMatrix) -> f64 {
        (&self.p - &other.p).abs().max()
    }
}

fn check_generator(q: &GeneratorMatrix) -> Result<()> {
    if q.as_matrix().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidGenerator("non-finite entry".into()));
    }
    Ok(())
}

/// Clamps round-off negatives to zero and renormalizes each row to sum to
/// one. Entries below the floor indicate the input was not a generator.
fn clean_probability(mut p: DMatrix<f64>, horizon: f64) -> Result<ProbabilityMatrix> {
    let k = p.nrows();
    for r in 0..k {
        for s in 0..k {
            let v = p[(r, s)];
            if v < 0.0 {
                if v < NEGATIVE_FLOOR {
                    return Err(Error::MatexpNegativeEntry {
                        row: r + 1,
                        col: s + 1,
                        value: v,
                    });
                }
                p[(r, s)] = 0.0;
            }
        }
        let sum: f64 = (0..k).map(|s| p[(r, s)]).sum();
        if sum > 0.0 {
            for s in 0..k {
                p[(r, s)] /= sum;
            }
        }
    }
    ProbabilityMatrix::new_checked(p, horizon)
}

/// Computes `P(t) = exp(tQ)` by scaling and squaring with a truncated
/// Taylor core.
///
/// `P(0)` is the identity exactly; rows sum to one and entries are clamped
/// non-negative on output. Rejects negative or non-finite horizons and
/// non-finite generators.
pub fn transition_probability_matrix(q: &GeneratorMatrix, t: f64) -> Result<ProbabilityMatrix> {
    check_generator(q)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidHorizon(t));
    }
    let k = q.k();
    let a = q.as_matrix() * t;
    let norm = inf_norm(&a);
    if norm == 0.0 {
        return ProbabilityMatrix::new_checked(DMatrix::identity(k, k), t);
    }
    // Halve until the norm is at most 0.5.
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = &a / 2f64.powi(squarings as i32);
    let mut p = taylor_exp(&scaled);
    for _ in 0..squarings {
        p = &p * &p;
    }
    clean_probability(p, t)
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|s| m[(r, s)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn taylor_exp(a: &DMatrix<f64>) -> DMatrix<f64> {
    let k = a.nrows();
    let mut sum = DMatrix::identity(k, k);
    let mut term = DMatrix::identity(k, k);
    for n in 1..=TAYLOR_ORDER {
        term = (&term * a) / n as f64;
        sum += &term;
    }
    sum
}

/// Independent cross-check for [`transition_probability_matrix`] via
/// uniformization.
///
/// The series is truncated once the remaining Poisson tail mass is at most
/// `tol / 2`, and rows are renormalized, so each entry is within `tol` of
/// the exact value. `tol` must lie in `(0, 1e-6]`. Horizons with
/// `t * max|q_rr| > 1e4` are out of the supported range; above 500 the
/// horizon is split into equal sub-steps to keep the Poisson weights well
/// inside f64 range.
pub fn uniformization_oracle(q: &GeneratorMatrix, t: f64, tol: f64) -> Result<ProbabilityMatrix> {
    check_generator(q)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidHorizon(t));
    }
    if !(tol > 0.0 && tol <= 1e-6) {
        return Err(Error::InvalidTolerance(tol));
    }
    let k = q.k();
    let lambda = (0..k)
        .map(|r| -q.as_matrix()[(r, r)])
        .fold(0.0f64, f64::max);
    if lambda == 0.0 || t == 0.0 {
        return ProbabilityMatrix::new_checked(DMatrix::identity(k, k), t);
    }
    let total_rate = lambda * t;
    if total_rate > 1e4 {
        return Err(Error::UniformizationRange(total_rate));
    }
    let steps = (total_rate / 500.0).ceil().max(1.0) as usize;
    let sub = uniformization_step(q, t / steps as f64, lambda, tol / (2.0 * steps as f64));
    let mut p = sub.clone();
    for _ in 1..steps {
        p = &p * &sub;
    }
    clean_probability(p, t)
}

fn uniformization_step(q: &GeneratorMatrix, t: f64, lambda: f64, tail: f64) -> DMatrix<f64> {
    let k = q.k();
    // Row-stochastic jump matrix of the uniformized chain.
    let jump = DMatrix::identity(k, k) + q.as_matrix() / lambda;
    let rate = lambda * t;
    let mut weight = (-rate).exp();
    let mut cumulative = weight;
    let mut power = DMatrix::identity(k, k);
    let mut sum = &power * weight;
    let mut n = 0usize;
    while 1.0 - cumulative > tail {
        n += 1;
        power = &power * &jump;
        weight *= rate / n as f64;
        sum += &power * weight;
        cumulative += weight;
        // The Poisson mass concentrates within a few sqrt(rate) of the
        // mode; this cap is unreachable for rates <= 500 unless weights
        // have degenerated.
        if n > 2000 {
            break;
        }
    }
    sum
}
