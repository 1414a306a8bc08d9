//! Joint description, load vectors and assembly plans.
//!
//! Forces are kilonewtons internally. Bolt positions are 1-based around the
//! ring, matching the numbering stamped on the flange.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result, SpecViolation};
use crate::pattern::TighteningPattern;
use crate::scalar::Scalar;

pub const MIN_BOLTS: usize = 2;
pub const DEFAULT_WARN_FRACTION: f64 = 0.9;

/// Unit a force value is declared in at an input/output boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ForceUnit {
    #[default]
    Kilonewton,
    Newton,
}

impl ForceUnit {
    pub fn to_kn<T: Scalar>(self, value: T) -> T {
        match self {
            ForceUnit::Kilonewton => value,
            ForceUnit::Newton => value / T::from_usize(1000),
        }
    }

    pub fn from_kn<T: Scalar>(self, value: T) -> T {
        match self {
            ForceUnit::Kilonewton => value,
            ForceUnit::Newton => value * T::from_usize(1000),
        }
    }
}

impl FromStr for ForceUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kN" | "kn" | "KN" => Ok(ForceUnit::Kilonewton),
            "N" | "n" => Ok(ForceUnit::Newton),
            other => Err(Error::InvalidParameter(format!(
                "unknown force unit {other:?} (expected \"kN\" or \"N\")"
            ))),
        }
    }
}

impl fmt::Display for ForceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForceUnit::Kilonewton => "kN",
            ForceUnit::Newton => "N",
        })
    }
}

/// The scenario frame: how many bolts, what uniform final load is wanted and
/// how much the bolts can take.
#[derive(Debug, Clone, PartialEq)]
pub struct JointSpec<T> {
    pub n_bolts: usize,
    pub target_load: T,
    pub yield_load: Option<T>,
    pub warn_fraction: T,
    pub scenario_label: Option<String>,
}

impl<T: Scalar> JointSpec<T> {
    /// Spec with default warn fraction and no yield limit. Not validated.
    pub fn new(n_bolts: usize, target_load: T) -> Self {
        Self {
            n_bolts,
            target_load,
            yield_load: None,
            warn_fraction: T::from_f64(DEFAULT_WARN_FRACTION),
            scenario_label: None,
        }
    }

    pub fn with_yield(mut self, yield_load: T) -> Self {
        self.yield_load = Some(yield_load);
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.scenario_label = Some(label.into());
        self
    }

    /// The uniform target as a fully tightened load vector.
    pub fn target_vector(&self) -> LoadVector<T> {
        LoadVector::uniform(self.n_bolts, self.target_load)
    }

    pub fn check_position(&self, position: usize) -> Result<()> {
        check_position(self.n_bolts, position)
    }
}

/// Returns the spec unchanged when every invariant holds, otherwise every
/// violated invariant.
pub fn validate_spec<T: Scalar>(spec: JointSpec<T>) -> Result<JointSpec<T>> {
    let mut violations = Vec::new();
    if spec.n_bolts < MIN_BOLTS {
        violations.push(SpecViolation::TooFewBolts {
            n: spec.n_bolts,
            min: MIN_BOLTS,
        });
    }
    if spec.target_load <= T::zero() {
        violations.push(SpecViolation::TargetLoad(spec.target_load.to_f64()));
    }
    if let Some(y) = spec.yield_load {
        if y <= T::zero() {
            violations.push(SpecViolation::YieldLoad(y.to_f64()));
        }
    }
    if spec.warn_fraction <= T::zero() || spec.warn_fraction > T::one() {
        violations.push(SpecViolation::WarnFraction(spec.warn_fraction.to_f64()));
    }
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(Error::InvalidSpec(violations))
    }
}

pub(crate) fn check_position(n: usize, position: usize) -> Result<()> {
    if position == 0 || position > n {
        Err(Error::PositionOutOfRange { position, n })
    } else {
        Ok(())
    }
}

/// Per-bolt loads indexed by ring position, with the set of bolts tightened so far.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadVector<T> {
    loads: Vec<T>,
    tightened: Vec<bool>,
}

impl<T: Scalar> LoadVector<T> {
    /// All bolts slack.
    pub fn empty(n: usize) -> Self {
        Self {
            loads: vec![T::zero(); n],
            tightened: vec![false; n],
        }
    }

    /// All bolts tightened to `value`.
    pub fn uniform(n: usize, value: T) -> Self {
        Self {
            loads: vec![value; n],
            tightened: vec![true; n],
        }
    }

    /// All bolts tightened, `values[k]` belonging to position `k + 1`.
    pub fn from_loads(values: Vec<T>) -> Self {
        let n = values.len();
        Self {
            loads: values,
            tightened: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    pub fn get(&self, position: usize) -> Result<T> {
        check_position(self.len(), position)?;
        Ok(self.loads[position - 1])
    }

    pub fn is_tightened(&self, position: usize) -> bool {
        position >= 1 && position <= self.len() && self.tightened[position - 1]
    }

    /// Sets a bolt's load and marks it tightened.
    pub fn set(&mut self, position: usize, load: T) -> Result<()> {
        check_position(self.len(), position)?;
        self.loads[position - 1] = load;
        self.tightened[position - 1] = true;
        Ok(())
    }

    /// Adds to a tightened bolt's load. Slack bolts stay at zero.
    pub(crate) fn add(&mut self, position: usize, delta: T) {
        if self.tightened[position - 1] {
            let slot = &mut self.loads[position - 1];
            *slot = *slot + delta;
        }
    }

    /// Loads in position order, zeros for slack bolts.
    pub fn as_slice(&self) -> &[T] {
        &self.loads
    }

    /// `(position, load)` for tightened bolts, ascending by position.
    pub fn iter_tightened(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.loads
            .iter()
            .zip(&self.tightened)
            .enumerate()
            .filter(|(_, (_, &t))| t)
            .map(|(k, (&l, _))| (k + 1, l))
    }

    pub fn tightened_count(&self) -> usize {
        self.tightened.iter().filter(|&&t| t).count()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> LoadVector<U> {
        LoadVector {
            loads: self.loads.iter().map(|&l| f(l)).collect(),
            tightened: self.tightened.clone(),
        }
    }
}

/// Initial loads to apply, in a given order, and the final loads they produce.
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyPlan<T> {
    pub pattern: TighteningPattern,
    pub initial_loads: LoadVector<T>,
    pub predicted_final_loads: LoadVector<T>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> AssemblyPlan<T> {
    pub fn new(
        pattern: TighteningPattern,
        initial_loads: LoadVector<T>,
        predicted_final_loads: LoadVector<T>,
    ) -> Result<Self> {
        if initial_loads.len() != pattern.n_bolts() {
            return Err(Error::DimensionMismatch {
                left: initial_loads.len(),
                right: pattern.n_bolts(),
            });
        }
        for &p in pattern.order() {
            let load = initial_loads.get(p)?;
            if !initial_loads.is_tightened(p) || load <= T::zero() {
                return Err(Error::NonPositiveLoad {
                    position: p,
                    load: load.to_f64(),
                });
            }
        }
        Ok(Self {
            pattern,
            initial_loads,
            predicted_final_loads,
            warnings: Vec::new(),
        })
    }

    /// Initial loads listed in tightening order.
    pub fn initial_in_order(&self) -> Vec<(usize, T)> {
        self.pattern
            .order()
            .iter()
            .map(|&p| (p, self.initial_loads.as_slice()[p - 1]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_bolt_joint_is_valid() {
        let spec = JointSpec::new(20, 200.0);
        assert_eq!(validate_spec(spec.clone()).unwrap(), spec);
    }

    #[test]
    fn single_bolt_rejected() {
        let err = validate_spec(JointSpec::new(1, 200.0)).unwrap_err();
        assert!(err.to_string().contains("n_bolts below minimum"), "{err}");
    }

    #[test]
    fn negative_target_rejected() {
        let err = validate_spec(JointSpec::new(20, -5.0)).unwrap_err();
        assert!(
            err.to_string().contains("target_load must be positive"),
            "{err}"
        );
    }

    #[test]
    fn each_violation_names_one_field() {
        let mut spec = JointSpec::new(0, 0.0).with_yield(-1.0);
        spec.warn_fraction = 1.5;
        let Error::InvalidSpec(violations) = validate_spec(spec).unwrap_err() else {
            panic!("expected InvalidSpec");
        };
        let fields: Vec<_> = violations.iter().map(SpecViolation::field).collect();
        assert_eq!(
            fields,
            ["n_bolts", "target_load", "yield_load", "warn_fraction"]
        );
        for v in &violations {
            let msg = v.to_string();
            let named = ["n_bolts", "target_load", "yield_load", "warn_fraction"]
                .iter()
                .filter(|f| msg.contains(*f))
                .count();
            assert_eq!(named, 1, "{msg}");
        }
    }

    #[test]
    fn validation_is_idempotent() {
        let spec = JointSpec::new(12, 350.0)
            .with_yield(500.0)
            .with_label("mu=0.2");
        let once = validate_spec(spec).unwrap();
        assert_eq!(validate_spec(once.clone()).unwrap(), once);
    }

    #[test]
    fn newton_boundary_conversion() {
        assert_eq!(ForceUnit::Newton.to_kn(10000.0), 10.0);
        assert_eq!(ForceUnit::Newton.from_kn(10.0), 10000.0);
        assert_eq!("N".parse::<ForceUnit>().unwrap(), ForceUnit::Newton);
        assert!("lbf".parse::<ForceUnit>().is_err());
    }

    #[test]
    fn slack_bolts_ignore_deltas() {
        let mut v = LoadVector::empty(4);
        v.set(2, 100.0).unwrap();
        v.add(1, -5.0);
        v.add(2, -5.0);
        assert_eq!(v.as_slice(), &[0.0, 95.0, 0.0, 0.0]);
        assert_eq!(v.iter_tightened().collect::<Vec<_>>(), vec![(2, 95.0)]);
        assert!(v.get(5).is_err());
    }

    #[test]
    fn plan_requires_positive_initial_loads() {
        let pattern = TighteningPattern::circular(3).unwrap();
        let bad = LoadVector::from_loads(vec![1.0, 0.0, 1.0]);
        assert!(AssemblyPlan::new(pattern.clone(), bad.clone(), bad).is_err());
        let ok = LoadVector::uniform(3, 1.0);
        assert!(AssemblyPlan::new(pattern, ok.clone(), ok).is_ok());
    }
}
