//! Elastic interaction coefficients method.
//!
//! A full sequence is run at a uniform probe load, the load history is turned
//! into the interaction matrix `A` (final = A * initial, tightening order) and
//! the initial loads that give a uniform final load are recovered by
//! back-substitution.

use crate::bench::{run_sequence, BenchModel, LoadHistory};
use crate::error::{Error, Result};
use crate::metrics::yield_check;
use crate::model::{AssemblyPlan, JointSpec, LoadVector};
use crate::pattern::TighteningPattern;
use crate::scalar::Scalar;

/// Unit upper triangular influence matrix in tightening order.
///
/// Entry `(i, j)` with `i < j` is the change in the `i`-th tightened bolt per
/// unit initial load of the `j`-th.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix<T> {
    pattern: TighteningPattern,
    values: Vec<T>,
}

impl<T: Scalar> InteractionMatrix<T> {
    pub fn identity(pattern: TighteningPattern) -> Self {
        let n = pattern.n_bolts();
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            values[i * n + i] = T::one();
        }
        Self { pattern, values }
    }

    /// Builds a matrix from dense rows, rejecting anything that is not unit
    /// upper triangular.
    pub fn from_rows(pattern: TighteningPattern, rows: Vec<Vec<T>>) -> Result<Self> {
        let n = pattern.n_bolts();
        if rows.len() != n {
            return Err(Error::DimensionMismatch {
                left: rows.len(),
                right: n,
            });
        }
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: row.len(),
                    right: n,
                });
            }
            for (j, &v) in row.iter().enumerate() {
                let ok = match i.cmp(&j) {
                    std::cmp::Ordering::Equal => v == T::one(),
                    std::cmp::Ordering::Greater => v == T::zero(),
                    std::cmp::Ordering::Less => true,
                };
                if !ok {
                    return Err(Error::NotUnitUpperTriangular {
                        row: i + 1,
                        col: j + 1,
                    });
                }
            }
            values.extend(row);
        }
        Ok(Self { pattern, values })
    }

    pub fn n(&self) -> usize {
        self.pattern.n_bolts()
    }

    pub fn pattern(&self) -> &TighteningPattern {
        &self.pattern
    }

    /// Entry at 1-based `(row, col)`, both in tightening order.
    pub fn get(&self, row: usize, col: usize) -> T {
        let n = self.n();
        assert!(row >= 1 && row <= n && col >= 1 && col <= n);
        self.values[(row - 1) * n + col - 1]
    }

    pub(crate) fn set_upper(&mut self, row: usize, col: usize, value: T) {
        debug_assert!(row < col);
        let n = self.n();
        self.values[(row - 1) * n + col - 1] = value;
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        self.values.chunks(self.n())
    }

    /// `A * x` with `x` in tightening order.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Solves `A * x = b` (tightening order) by back-substitution.
    pub fn back_substitute(&self, b: &[T]) -> Vec<T> {
        let n = self.n();
        assert_eq!(b.len(), n);
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let row = &self.values[i * n..(i + 1) * n];
            let tail = row[i + 1..]
                .iter()
                .zip(&x[i + 1..])
                .fold(T::zero(), |acc, (&a, &xj)| acc + a * xj);
            x[i] = b[i] - tail;
        }
        x
    }

    /// Position-indexed vector to tightening order.
    pub fn to_order(&self, v: &LoadVector<T>) -> Vec<T> {
        self.pattern
            .order()
            .iter()
            .map(|&p| v.as_slice()[p - 1])
            .collect()
    }
}

/// Runs the sequence at a uniform probe load and returns the load history.
pub fn build_sh<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    pattern: &TighteningPattern,
    probe_load: T,
) -> Result<LoadHistory<T>> {
    if probe_load <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "probe load must be positive (got {probe_load})"
        )));
    }
    let probe = LoadVector::uniform(spec.n_bolts, probe_load);
    Ok(run_sequence(spec, model, pattern, &probe)?.0)
}

/// `A[i][j] = (sh[j][i] - sh[j-1][i]) / sh[j][j]` for `i < j`.
pub fn compute_a<T: Scalar>(sh: &LoadHistory<T>) -> Result<InteractionMatrix<T>> {
    let n = sh.n();
    if let Some(step) = (1..=n).find(|&k| sh.entry(k, k) == T::zero()) {
        return Err(Error::ZeroDiagonal { step });
    }
    let mut a = InteractionMatrix::identity(sh.pattern().clone());
    for j in 2..=n {
        let applied = sh.entry(j, j);
        for i in 1..j {
            a.set_upper(i, j, (sh.entry(j, i) - sh.entry(j - 1, i)) / applied);
        }
    }
    Ok(a)
}

/// Initial loads that produce `target` after the whole sequence.
pub fn solve_initial_loads<T: Scalar>(
    a: &InteractionMatrix<T>,
    target: &LoadVector<T>,
) -> Result<LoadVector<T>> {
    if target.len() != a.n() {
        return Err(Error::DimensionMismatch {
            left: target.len(),
            right: a.n(),
        });
    }
    let solved = a.back_substitute(&a.to_order(target));
    let mut out = LoadVector::empty(a.n());
    for (&p, &load) in a.pattern().order().iter().zip(&solved) {
        if load <= T::zero() {
            return Err(Error::InfeasibleTarget {
                position: p,
                load: load.to_f64(),
            });
        }
        out.set(p, load)?;
    }
    Ok(out)
}

/// Wraps solved initial loads into a plan by re-running them on the bench.
pub(crate) fn finish_plan<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    pattern: &TighteningPattern,
    initial: LoadVector<T>,
) -> Result<AssemblyPlan<T>> {
    let (_, finals) = run_sequence(spec, model, pattern, &initial)?;
    let mut plan = AssemblyPlan::new(pattern.clone(), initial, finals)?;
    plan.warnings = yield_check(&plan, spec);
    Ok(plan)
}

fn check_pattern<T: Scalar>(spec: &JointSpec<T>, pattern: &TighteningPattern) -> Result<()> {
    if pattern.n_bolts() != spec.n_bolts {
        return Err(Error::PatternSizeMismatch {
            pattern: pattern.n_bolts(),
            joint: spec.n_bolts,
        });
    }
    Ok(())
}

/// One-shot method: probe, build `A`, solve for the uniform target.
/// `probe_load` defaults to the target load.
pub fn run_eicm<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    pattern: &TighteningPattern,
    probe_load: Option<T>,
) -> Result<AssemblyPlan<T>> {
    check_pattern(spec, pattern)?;
    let sh = build_sh(spec, model, pattern, probe_load.unwrap_or(spec.target_load))?;
    let a = compute_a(&sh)?;
    let initial = solve_initial_loads(&a, &spec.target_vector())?;
    finish_plan(spec, model, pattern, initial)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeOutcome<T> {
    pub plan: AssemblyPlan<T>,
    pub matrix: InteractionMatrix<T>,
    pub iterations: usize,
    /// Max relative deviation from target after each iteration.
    pub residuals: Vec<f64>,
}

fn max_relative_deviation<T: Scalar>(loads: &LoadVector<T>, target: T) -> f64 {
    let t = target.to_f64();
    loads
        .as_slice()
        .iter()
        .map(|l| ((l.to_f64() - t) / t).abs())
        .fold(0.0, f64::max)
}

/// Fixed-point refinement of `A` for benches whose response depends on load.
///
/// Each iteration rebuilds the history from the current candidate initial
/// loads, recomputes `A` and re-solves. The first candidate is the uniform
/// target. Stops once every simulated final load is within `tol` (relative)
/// of the target.
pub fn iterative_eicm<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    pattern: &TighteningPattern,
    tol: f64,
    max_iter: usize,
) -> Result<IterativeOutcome<T>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    if max_iter < 1 {
        return Err(Error::InvalidParameter(
            "max_iter must be at least 1".into(),
        ));
    }
    check_pattern(spec, pattern)?;
    let target = spec.target_vector();
    let mut candidate = target.clone();
    let mut residuals = Vec::with_capacity(max_iter);
    for iteration in 1..=max_iter {
        let (sh, _) = run_sequence(spec, model, pattern, &candidate)?;
        let a = compute_a(&sh)?;
        candidate = solve_initial_loads(&a, &target)?;
        let (_, finals) = run_sequence(spec, model, pattern, &candidate)?;
        let residual = max_relative_deviation(&finals, spec.target_load);
        residuals.push(residual);
        if residual <= tol {
            let mut plan = AssemblyPlan::new(pattern.clone(), candidate, finals)?;
            plan.warnings = yield_check(&plan, spec);
            return Ok(IterativeOutcome {
                plan,
                matrix: a,
                iterations: iteration,
                residuals,
            });
        }
    }
    Err(Error::DidNotConverge {
        iterations: max_iter,
        residuals,
    })
}
