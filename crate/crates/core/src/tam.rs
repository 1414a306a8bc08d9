//! Tetraparametric assembly method.
//!
//! A stiff ring joint is characterised by four coefficients describing how a
//! newly tightened bolt changes the load of an already tightened neighbour:
//!
//! | case | neighbour            | other bolt on that side |
//! |------|----------------------|-------------------------|
//! | α    | adjacent (distance 1) | distance 2 slack        |
//! | β    | adjacent (distance 1) | distance 2 tightened    |
//! | γ    | distance 2            | adjacent slack          |
//! | δ    | distance 2            | adjacent tightened      |
//!
//! The coefficients are measured with two load steps on a few bolts, and the
//! interaction matrix of any pattern is then laid out from them.

use std::fmt;

use crate::bench::{BenchModel, BenchState, MIN_TETRAPARAMETRIC_BOLTS};
use crate::eicm::{finish_plan, solve_initial_loads, InteractionMatrix};
use crate::error::{Error, Result};
use crate::model::{AssemblyPlan, JointSpec};
use crate::pattern::{ring_distance_unchecked, ring_offset, TighteningPattern};
use crate::scalar::Scalar;

/// Smallest ring on which the two-anchor protocol keeps influence zones apart.
pub const MIN_PROTOCOL_BOLTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficient {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl Coefficient {
    pub const ALL: [Coefficient; 4] = [
        Coefficient::Alpha,
        Coefficient::Beta,
        Coefficient::Gamma,
        Coefficient::Delta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Coefficient::Alpha => "alpha",
            Coefficient::Beta => "beta",
            Coefficient::Gamma => "gamma",
            Coefficient::Delta => "delta",
        }
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TamCoefficients<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
}

impl<T: Scalar> TamCoefficients<T> {
    pub fn new(alpha: T, beta: T, gamma: T, delta: T) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            delta,
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn get(&self, which: Coefficient) -> T {
        match which {
            Coefficient::Alpha => self.alpha,
            Coefficient::Beta => self.beta,
            Coefficient::Gamma => self.gamma,
            Coefficient::Delta => self.delta,
        }
    }

    pub fn set(&mut self, which: Coefficient, value: T) {
        match which {
            Coefficient::Alpha => self.alpha = value,
            Coefficient::Beta => self.beta = value,
            Coefficient::Gamma => self.gamma = value,
            Coefficient::Delta => self.delta = value,
        }
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.alpha, self.beta, self.gamma, self.delta]
    }

    pub fn validate(&self) -> Result<()> {
        for c in Coefficient::ALL {
            if !self.get(c).to_f64().is_finite() {
                return Err(Error::InvalidParameter(format!("{c} must be finite")));
            }
        }
        Ok(())
    }
}

/// Which coefficient governs the change of `target` when `source` is
/// tightened, given which bolts are already tightened. `None` beyond
/// distance 2.
pub fn interaction_case(
    n: usize,
    source: usize,
    target: usize,
    tightened: impl Fn(usize) -> bool,
) -> Option<Coefficient> {
    let d = ring_distance_unchecked(n, source, target);
    if d == 0 || d > 2 {
        return None;
    }
    let side = if ring_offset(n, source, d as isize) == target {
        1
    } else {
        -1
    };
    if d == 1 {
        let far = ring_offset(n, source, 2 * side);
        Some(if tightened(far) {
            Coefficient::Beta
        } else {
            Coefficient::Alpha
        })
    } else {
        let near = ring_offset(n, source, side);
        Some(if tightened(near) {
            Coefficient::Delta
        } else {
            Coefficient::Gamma
        })
    }
}

/// Lays out the interaction matrix of `pattern` from the four coefficients.
pub fn assemble_a<T: Scalar>(
    n: usize,
    pattern: &TighteningPattern,
    coeffs: &TamCoefficients<T>,
) -> Result<InteractionMatrix<T>> {
    if n < MIN_TETRAPARAMETRIC_BOLTS {
        return Err(Error::RingTooSmall {
            n,
            min: MIN_TETRAPARAMETRIC_BOLTS,
        });
    }
    if pattern.n_bolts() != n {
        return Err(Error::PatternSizeMismatch {
            pattern: pattern.n_bolts(),
            joint: n,
        });
    }
    let mut a = InteractionMatrix::identity(pattern.clone());
    for j in 2..=n {
        let source = pattern.order()[j - 1];
        let before = |p: usize| pattern.order_index(p).is_ok_and(|s| s < j);
        for i in 1..j {
            let target = pattern.order()[i - 1];
            if let Some(case) = interaction_case(n, source, target, before) {
                a.set_upper(i, j, coeffs.get(case));
            }
        }
    }
    Ok(a)
}

/// A second-step tightening and the reading that yields one coefficient estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extraction {
    pub source: usize,
    pub measured: usize,
    pub coefficient: Coefficient,
}

/// Bolts read right after a given tightening operation (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadPoint {
    pub after_operation: usize,
    pub positions: Vec<usize>,
}

/// Two load steps: tighten a set of bolts, then tighten a few more one by
/// one and watch how the first set responds.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStepProtocol<T> {
    pub n_bolts: usize,
    pub level: T,
    pub first_step: Vec<(usize, T)>,
    pub second_step: Vec<usize>,
    pub measurement_plan: Vec<ReadPoint>,
    pub extraction_map: Vec<Extraction>,
}

impl<T: Scalar> TwoStepProtocol<T> {
    /// Reads every first-step bolt once the first step is done, then after
    /// each second-step tightening reads the tightened bolt and the bolts
    /// it is mapped to.
    pub fn from_layout(
        n_bolts: usize,
        level: T,
        first: &[usize],
        second: &[usize],
        extraction_map: Vec<Extraction>,
    ) -> Result<Self> {
        let mut plan = vec![ReadPoint {
            after_operation: first.len(),
            positions: first.to_vec(),
        }];
        for (k, &source) in second.iter().enumerate() {
            let mut positions = vec![source];
            positions.extend(
                extraction_map
                    .iter()
                    .filter(|e| e.source == source)
                    .map(|e| e.measured),
            );
            plan.push(ReadPoint {
                after_operation: first.len() + k + 1,
                positions,
            });
        }
        let protocol = Self {
            n_bolts,
            level,
            first_step: first.iter().map(|&p| (p, level)).collect(),
            second_step: second.to_vec(),
            measurement_plan: plan,
            extraction_map,
        };
        protocol.validate()?;
        Ok(protocol)
    }

    pub fn tightening_count(&self) -> usize {
        self.first_step.len() + self.second_step.len()
    }

    pub fn measurement_count(&self) -> usize {
        self.measurement_plan
            .iter()
            .map(|r| r.positions.len())
            .sum()
    }

    /// Operation number (1-based) at which a second-step bolt is tightened.
    pub fn operation_of(&self, source: usize) -> Option<usize> {
        self.second_step
            .iter()
            .position(|&p| p == source)
            .map(|k| self.first_step.len() + k + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_bolts;
        let bad = |msg: String| Err(Error::InvalidProtocol(msg));
        let all: Vec<usize> = self
            .first_step
            .iter()
            .map(|&(p, _)| p)
            .chain(self.second_step.iter().copied())
            .collect();
        for (k, &p) in all.iter().enumerate() {
            if p == 0 || p > n {
                return bad(format!("position {p} out of range 1..={n}"));
            }
            if all[..k].contains(&p) {
                return bad(format!("bolt {p} tightened twice"));
            }
        }
        for c in Coefficient::ALL {
            if !self.extraction_map.iter().any(|e| e.coefficient == c) {
                return bad(format!("no reading estimates {c}"));
            }
        }
        for (k, &a) in self.second_step.iter().enumerate() {
            for &b in &self.second_step[k + 1..] {
                if ring_distance_unchecked(n, a, b) <= 4 {
                    return bad(format!("influence zones of bolts {a} and {b} overlap"));
                }
            }
        }
        for e in &self.extraction_map {
            let Some(op) = self.operation_of(e.source) else {
                return bad(format!("bolt {} is not in the second step", e.source));
            };
            let tightened = |p: usize| all[..op - 1].contains(&p);
            if !tightened(e.measured) {
                return bad(format!(
                    "bolt {} is not tightened before bolt {}",
                    e.measured, e.source
                ));
            }
            if interaction_case(n, e.source, e.measured, tightened) != Some(e.coefficient) {
                return bad(format!(
                    "bolt {} on bolt {} does not exhibit {}",
                    e.source, e.measured, e.coefficient
                ));
            }
        }
        Ok(())
    }
}

fn ex(source: usize, measured: usize, coefficient: Coefficient) -> Extraction {
    Extraction {
        source,
        measured,
        coefficient,
    }
}

/// Protocol for an `n`-bolt ring at the given load level.
///
/// Twenty bolts use the reference layout with two estimates per coefficient
/// (11 tightenings, 19 readings). Other rings use two anchors half a ring
/// apart: anchor `A = 3` with `A-2, A+1, A+2` pre-tightened yields γ, β, δ;
/// anchor `B = A + n/2` with `B+1` pre-tightened yields α.
pub fn design_protocol<T: Scalar>(n: usize, level: T) -> Result<TwoStepProtocol<T>> {
    use Coefficient::*;
    if n < MIN_PROTOCOL_BOLTS {
        return Err(Error::RingTooSmall {
            n,
            min: MIN_PROTOCOL_BOLTS,
        });
    }
    if level <= T::zero() {
        return Err(Error::InvalidParameter(format!(
            "protocol load level must be positive (got {level})"
        )));
    }
    if n == 20 {
        return TwoStepProtocol::from_layout(
            n,
            level,
            &[1, 4, 5, 8, 11, 15, 17, 18],
            &[3, 9, 16],
            vec![
                ex(3, 4, Beta),
                ex(3, 1, Gamma),
                ex(3, 5, Delta),
                ex(9, 8, Alpha),
                ex(9, 11, Gamma),
                ex(16, 15, Alpha),
                ex(16, 17, Beta),
                ex(16, 18, Delta),
            ],
        );
    }
    let a = 3;
    let b = a + n / 2;
    let mut first = vec![a - 2, a + 1, a + 2, b + 1];
    first.sort_unstable();
    TwoStepProtocol::from_layout(
        n,
        level,
        &first,
        &[a, b],
        vec![
            ex(a, a + 1, Beta),
            ex(a, a - 2, Gamma),
            ex(a, a + 2, Delta),
            ex(b, b + 1, Alpha),
        ],
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reading<T> {
    pub operation: usize,
    pub position: usize,
    pub load: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementLog<T> {
    pub readings: Vec<Reading<T>>,
}

impl<T> Default for MeasurementLog<T> {
    fn default() -> Self {
        Self {
            readings: Vec::new(),
        }
    }
}

impl<T: Scalar> MeasurementLog<T> {
    /// Reading of `position` taken right after `operation`.
    pub fn at(&self, position: usize, operation: usize) -> Option<T> {
        self.readings
            .iter()
            .find(|r| r.position == position && r.operation == operation)
            .map(|r| r.load)
    }

    /// Latest reading of `position` taken before `operation`.
    pub fn before(&self, position: usize, operation: usize) -> Option<(usize, T)> {
        self.readings
            .iter()
            .filter(|r| r.position == position && r.operation < operation)
            .max_by_key(|r| r.operation)
            .map(|r| (r.operation, r.load))
    }
}

/// Runs the protocol on the bench, recording every planned reading.
pub fn execute_protocol<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    protocol: &TwoStepProtocol<T>,
) -> Result<MeasurementLog<T>> {
    if protocol.n_bolts != spec.n_bolts {
        return Err(Error::InvalidProtocol(format!(
            "protocol is for {} bolts, joint has {}",
            protocol.n_bolts, spec.n_bolts
        )));
    }
    protocol.validate()?;
    let mut bench = BenchState::new(spec.clone(), model.clone())?;
    let mut log = MeasurementLog::default();
    let operations = protocol
        .first_step
        .iter()
        .copied()
        .chain(protocol.second_step.iter().map(|&p| (p, protocol.level)));
    for (k, (position, load)) in operations.enumerate() {
        bench.tighten(position, load)?;
        let operation = k + 1;
        for read in protocol
            .measurement_plan
            .iter()
            .filter(|r| r.after_operation == operation)
        {
            for &p in &read.positions {
                log.readings.push(Reading {
                    operation,
                    position: p,
                    load: bench.measure(p)?,
                });
            }
        }
    }
    Ok(log)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamExtraction<T> {
    /// Arithmetic mean of the estimates of each coefficient.
    pub coefficients: TamCoefficients<T>,
    /// Max minus min of the estimates of each coefficient.
    pub spread: TamCoefficients<T>,
    pub estimate_counts: [usize; 4],
}

/// `(F' - F) / F_b` for every mapped reading, averaged per coefficient.
pub fn extract_coefficients<T: Scalar>(
    log: &MeasurementLog<T>,
    protocol: &TwoStepProtocol<T>,
) -> Result<TamExtraction<T>> {
    let mut estimates: [Vec<T>; 4] = Default::default();
    for e in &protocol.extraction_map {
        let op = protocol.operation_of(e.source).ok_or_else(|| {
            Error::InvalidProtocol(format!("bolt {} is not in the second step", e.source))
        })?;
        let applied = log.at(e.source, op).ok_or(Error::MissingMeasurement {
            position: e.source,
            operation: op,
        })?;
        let after = log.at(e.measured, op).ok_or(Error::MissingMeasurement {
            position: e.measured,
            operation: op,
        })?;
        let (_, before) = log
            .before(e.measured, op)
            .ok_or(Error::MissingMeasurement {
                position: e.measured,
                operation: op - 1,
            })?;
        if applied == T::zero() {
            return Err(Error::ZeroAppliedLoad {
                position: e.source,
                coefficient: e.coefficient,
            });
        }
        estimates[e.coefficient as usize].push((after - before) / applied);
    }
    let mut coefficients = TamCoefficients::zero();
    let mut spread = TamCoefficients::zero();
    let mut estimate_counts = [0; 4];
    for c in Coefficient::ALL {
        let values = &estimates[c as usize];
        let Some(&first) = values.first() else {
            return Err(Error::InvalidProtocol(format!("no reading estimates {c}")));
        };
        let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
        let (lo, hi) = values
            .iter()
            .fold((first, first), |(lo, hi), &v| (lo.min_of(v), hi.max_of(v)));
        coefficients.set(c, sum / T::from_usize(values.len()));
        spread.set(c, hi - lo);
        estimate_counts[c as usize] = values.len();
    }
    Ok(TamExtraction {
        coefficients,
        spread,
        estimate_counts,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TamOutcome<T> {
    pub plan: AssemblyPlan<T>,
    pub matrix: InteractionMatrix<T>,
    pub protocol: TwoStepProtocol<T>,
    pub extraction: TamExtraction<T>,
}

/// Measures the coefficients on the bench at the target load level, then
/// plans the sequence from them.
pub fn run_tam<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    pattern: &TighteningPattern,
) -> Result<TamOutcome<T>> {
    let protocol = design_protocol(spec.n_bolts, spec.target_load)?;
    let log = execute_protocol(spec, model, &protocol)?;
    let extraction = extract_coefficients(&log, &protocol)?;
    let (plan, matrix) = run_tam_with_coefficients(spec, model, pattern, &extraction.coefficients)?;
    Ok(TamOutcome {
        plan,
        matrix,
        protocol,
        extraction,
    })
}

/// Plans the sequence from known coefficients; `model` is only used to
/// predict the final loads.
pub fn run_tam_with_coefficients<T: Scalar>(
    spec: &JointSpec<T>,
    model: &BenchModel<T>,
    pattern: &TighteningPattern,
    coeffs: &TamCoefficients<T>,
) -> Result<(AssemblyPlan<T>, InteractionMatrix<T>)> {
    coeffs.validate()?;
    let a = assemble_a(spec.n_bolts, pattern, coeffs)?;
    let initial = solve_initial_loads(&a, &spec.target_vector())?;
    let plan = finish_plan(spec, model, pattern, initial)?;
    Ok((plan, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{make_pattern, PatternKind};
    use approx::assert_abs_diff_eq;

    fn table3_mu02() -> TamCoefficients<f64> {
        TamCoefficients::new(-0.147, -0.147, -0.018, 0.002)
    }

    /// Distinct sentinel values so each case can be identified in a matrix.
    fn symbolic() -> TamCoefficients<f64> {
        TamCoefficients::new(10.0, 20.0, 30.0, 40.0)
    }

    fn label(v: f64) -> &'static str {
        match v as i64 {
            10 => "a",
            20 => "b",
            30 => "g",
            40 => "d",
            _ => "?",
        }
    }

    fn nonzero_row(a: &InteractionMatrix<f64>, row: usize) -> Vec<(usize, &'static str)> {
        (row + 1..=a.n())
            .filter(|&c| a.get(row, c) != 0.0)
            .map(|c| (c, label(a.get(row, c))))
            .collect()
    }

    #[test]
    fn pattern1_row_of_first_bolt() {
        let p = make_pattern(PatternKind::Pattern1, 20, None).unwrap();
        let a = assemble_a(20, &p, &symbolic()).unwrap();
        assert_eq!(
            nonzero_row(&a, 1),
            vec![(5, "g"), (12, "a"), (13, "b"), (20, "d")]
        );
    }

    #[test]
    fn pattern2_row_of_first_bolt() {
        let p = make_pattern(PatternKind::Pattern2, 20, None).unwrap();
        let a = assemble_a(20, &p, &symbolic()).unwrap();
        assert_eq!(
            nonzero_row(&a, 1),
            vec![(5, "a"), (9, "d"), (16, "g"), (20, "b")]
        );
    }

    #[test]
    fn zero_coefficients_give_identity() {
        let p = make_pattern(PatternKind::StarCircular, 20, None).unwrap();
        let a = assemble_a(20, &p, &TamCoefficients::<f64>::zero()).unwrap();
        assert_eq!(a, InteractionMatrix::identity(p));
    }

    #[test]
    fn assemble_needs_five_bolts() {
        let p = TighteningPattern::circular(4).unwrap();
        assert!(matches!(
            assemble_a(4, &p, &symbolic()),
            Err(Error::RingTooSmall { n: 4, min: 5 })
        ));
    }

    #[test]
    fn twenty_bolt_protocol() {
        let proto = design_protocol(20, 200.0).unwrap();
        let first: Vec<usize> = proto.first_step.iter().map(|&(p, _)| p).collect();
        assert_eq!(first, [1, 4, 5, 8, 11, 15, 17, 18]);
        assert_eq!(proto.second_step, [3, 9, 16]);
        assert_eq!(proto.tightening_count(), 11);
        assert_eq!(proto.measurement_count(), 19);
    }

    #[test]
    fn twelve_bolt_protocol() {
        let proto = design_protocol(12, 200.0).unwrap();
        let first: Vec<usize> = proto.first_step.iter().map(|&(p, _)| p).collect();
        assert_eq!(first, [1, 4, 5, 10]);
        assert_eq!(proto.second_step, [3, 9]);
        assert_eq!(ring_distance_unchecked(12, 3, 9), 6);
        for c in Coefficient::ALL {
            assert!(proto.extraction_map.iter().any(|e| e.coefficient == c));
        }
        assert_eq!(proto.tightening_count(), 6);
        assert_eq!(proto.measurement_count(), 10);
    }

    #[test]
    fn protocols_valid_across_ring_sizes() {
        for n in 12..64 {
            design_protocol(n, 100.0).unwrap_or_else(|e| panic!("n = {n}: {e}"));
        }
    }

    #[test]
    fn small_ring_rejected() {
        let err = design_protocol(8, 200.0).unwrap_err();
        assert!(err
            .to_string()
            .contains("ring too small for disjoint influence zones"));
        assert!(design_protocol(20, 0.0).is_err());
    }

    #[test]
    fn protocol_validation_catches_mislabelled_reading() {
        let err = TwoStepProtocol::from_layout(
            20,
            200.0,
            &[1, 4, 5, 8, 11],
            &[3, 9],
            vec![
                ex(3, 4, Coefficient::Alpha),
                ex(3, 1, Coefficient::Gamma),
                ex(3, 5, Coefficient::Delta),
                ex(9, 8, Coefficient::Beta),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidProtocol(_)));
    }

    #[test]
    fn bolt_nine_reading() {
        let spec = JointSpec::new(20, 200.0);
        let proto = design_protocol(20, 200.0).unwrap();
        let log =
            execute_protocol(&spec, &BenchModel::tetraparametric(table3_mu02()), &proto).unwrap();
        let op = proto.operation_of(9).unwrap();
        assert_abs_diff_eq!(log.at(8, op).unwrap(), 170.6, epsilon = 1e-9);
    }

    #[test]
    fn rigid_bench_readings_unchanged() {
        let spec = JointSpec::new(20, 200.0);
        let proto = design_protocol(20, 200.0).unwrap();
        let log = execute_protocol(&spec, &BenchModel::rigid(), &proto).unwrap();
        assert!(log.readings.iter().all(|r| r.load == 200.0));
        let ext = extract_coefficients(&log, &proto).unwrap();
        assert_eq!(ext.coefficients, TamCoefficients::zero());
    }

    #[test]
    fn single_formula() {
        let proto = design_protocol(20, 200.0).unwrap();
        let mut log = MeasurementLog::default();
        // Synthetic log where only alpha readings matter: 200 -> 170.6 under F_b = 200.
        for r in &proto.measurement_plan {
            for &p in &r.positions {
                log.readings.push(Reading {
                    operation: r.after_operation,
                    position: p,
                    load: 200.0,
                });
            }
        }
        for r in log.readings.iter_mut() {
            if (r.position == 8 && r.operation == 10) || (r.position == 15 && r.operation == 11) {
                r.load = 170.6;
            }
        }
        let ext = extract_coefficients(&log, &proto).unwrap();
        assert_abs_diff_eq!(ext.coefficients.alpha, -0.147, epsilon = 1e-12);
        assert_eq!(ext.estimate_counts, [2, 2, 2, 2]);
    }

    #[test]
    fn missing_and_zero_readings() {
        let proto = design_protocol(12, 200.0).unwrap();
        let spec = JointSpec::new(12, 200.0);
        let mut log = execute_protocol(&spec, &BenchModel::rigid(), &proto).unwrap();
        let mut truncated = log.clone();
        truncated.readings.pop();
        assert!(matches!(
            extract_coefficients(&truncated, &proto),
            Err(Error::MissingMeasurement { .. })
        ));
        for r in log.readings.iter_mut().filter(|r| r.position == 9) {
            r.load = 0.0;
        }
        assert!(matches!(
            extract_coefficients(&log, &proto),
            Err(Error::ZeroAppliedLoad { position: 9, .. })
        ));
    }

    #[test]
    fn noisy_protocol_is_reproducible_and_reports_spread() {
        let spec = JointSpec::new(20, 200.0);
        let model = BenchModel::tetraparametric(table3_mu02()).with_noise(0.01, 11);
        let proto = design_protocol(20, 200.0).unwrap();
        let a = execute_protocol(&spec, &model, &proto).unwrap();
        let b = execute_protocol(&spec, &model, &proto).unwrap();
        assert_eq!(a, b);
        let ext = extract_coefficients(&a, &proto).unwrap();
        assert!(ext.spread.to_array().iter().all(|&s| s > 0.0));
    }

    #[test]
    fn fixed_coefficients_on_small_ring() {
        let spec = JointSpec::new(6, 100.0);
        let pattern = TighteningPattern::circular(6).unwrap();
        let model = BenchModel::tetraparametric(table3_mu02());
        let (plan, _) = run_tam_with_coefficients(&spec, &model, &pattern, &table3_mu02()).unwrap();
        for &f in plan.predicted_final_loads.as_slice() {
            assert_abs_diff_eq!(f, 100.0, epsilon = 1e-9);
        }
        assert!(run_tam(&spec, &model, &pattern).is_err());
    }

    #[test]
    fn non_finite_coefficients_rejected() {
        let spec = JointSpec::new(6, 100.0);
        let pattern = TighteningPattern::circular(6).unwrap();
        let bad = TamCoefficients::new(f64::NAN, 0.0, 0.0, 0.0);
        assert!(run_tam_with_coefficients(&spec, &BenchModel::rigid(), &pattern, &bad).is_err());
    }
}
