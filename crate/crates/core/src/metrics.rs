//! Load statistics and comparison helpers.

use crate::eicm::InteractionMatrix;
use crate::error::{Error, Result};
use crate::model::{AssemblyPlan, JointSpec, LoadVector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoadStats<T> {
    pub mean: T,
    /// Sample standard deviation (n - 1); zero for a single bolt.
    pub std: T,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> LoadStats<T> {
    /// `std / mean`.
    pub fn relative_std(&self) -> T {
        self.std / self.mean
    }
}

/// Statistics over the tightened bolts.
pub fn load_stats<T: Scalar>(loads: &LoadVector<T>) -> Result<LoadStats<T>> {
    let values: Vec<T> = loads.iter_tightened().map(|(_, l)| l).collect();
    let (&first, rest) = values.split_first().ok_or(Error::EmptyLoads)?;
    let count = T::from_usize(values.len());
    let (sum, min, max) = rest.iter().fold((first, first, first), |(s, lo, hi), &v| {
        (s + v, lo.min_of(v), hi.max_of(v))
    });
    let mean = sum / count;
    let std = if values.len() < 2 {
        T::zero()
    } else {
        let ss = values
            .iter()
            .fold(T::zero(), |acc, &v| acc + (v - mean) * (v - mean));
        (ss / (count - T::one())).sqrt()
    };
    Ok(LoadStats {
        mean,
        std,
        min,
        max,
    })
}

/// Mean over bolts of `|observed - reference| / reference`.
pub fn avg_relative_error<T: Scalar>(
    observed: &LoadVector<T>,
    reference: &LoadVector<T>,
) -> Result<T> {
    if observed.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            left: observed.len(),
            right: reference.len(),
        });
    }
    if observed.is_empty() {
        return Err(Error::EmptyLoads);
    }
    let mut total = T::zero();
    for (k, (&o, &r)) in observed
        .as_slice()
        .iter()
        .zip(reference.as_slice())
        .enumerate()
    {
        if r == T::zero() {
            return Err(Error::ZeroReference { position: k + 1 });
        }
        total = total + ((o - r) / r).abs();
    }
    Ok(total / T::from_usize(observed.len()))
}

pub fn matrix_max_abs_diff<T: Scalar>(
    a: &InteractionMatrix<T>,
    b: &InteractionMatrix<T>,
) -> Result<T> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(a.rows()
        .flatten()
        .zip(b.rows().flatten())
        .fold(T::zero(), |m, (&x, &y)| m.max_of((x - y).abs())))
}

/// One warning per bolt whose initial load exceeds `warn_fraction * yield_load`.
pub fn yield_check<T: Scalar>(plan: &AssemblyPlan<T>, spec: &JointSpec<T>) -> Vec<String> {
    let Some(yield_load) = spec.yield_load else {
        return Vec::new();
    };
    let limit = spec.warn_fraction * yield_load;
    plan.initial_loads
        .iter_tightened()
        .filter(|&(_, load)| load > limit)
        .map(|(p, load)| {
            format!(
                "bolt {p}: initial load {:.1} kN exceeds {:.1} kN ({}% of yield {:.1} kN)",
                load.to_f64(),
                limit.to_f64(),
                spec.warn_fraction.to_f64() * 100.0,
                yield_load.to_f64()
            )
        })
        .collect()
}
