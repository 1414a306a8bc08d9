//! Tightening orders on a ring of bolts.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::check_position;

/// Bolts per ring for the built-in star layouts.
pub const STAR_LAYOUT_BOLTS: usize = 20;

const PATTERN1: [usize; 20] = [
    1, 11, 6, 16, 3, 13, 8, 18, 5, 15, 10, 20, 2, 12, 7, 17, 4, 14, 9, 19,
];
const PATTERN2: [usize; 20] = [
    1, 11, 6, 16, 2, 12, 7, 17, 3, 13, 8, 18, 4, 14, 9, 19, 5, 15, 10, 20,
];
const STAR_SET: [usize; 4] = [1, 11, 6, 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternKind {
    /// Star passes 1-11-6-16, 3-13-8-18, 5-15-10-20, 2-12-7-17, 4-14-9-19.
    Pattern1,
    /// Star passes 1-11-6-16, 2-12-7-17, 3-13-8-18, 4-14-9-19, 5-15-10-20.
    Pattern2,
    /// Star on 1, 11, 6, 16, then the remaining bolts in ascending order.
    StarCircular,
    /// 1, 2, ..., n.
    Circular,
    Custom,
}

impl PatternKind {
    pub const ALL: [PatternKind; 5] = [
        PatternKind::Pattern1,
        PatternKind::Pattern2,
        PatternKind::StarCircular,
        PatternKind::Circular,
        PatternKind::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PatternKind::Pattern1 => "pattern1",
            PatternKind::Pattern2 => "pattern2",
            PatternKind::StarCircular => "star_circular",
            PatternKind::Circular => "circular",
            PatternKind::Custom => "custom",
        }
    }

    /// Bolt count the layout is defined for, if fixed.
    pub fn required_bolts(self) -> Option<usize> {
        match self {
            PatternKind::Pattern1 | PatternKind::Pattern2 | PatternKind::StarCircular => {
                Some(STAR_LAYOUT_BOLTS)
            }
            PatternKind::Circular | PatternKind::Custom => None,
        }
    }
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PatternKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PatternKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown pattern kind {s:?} (expected one of pattern1, pattern2, star_circular, circular, custom)"
                ))
            })
    }
}

/// A permutation of bolt positions `1..=n` giving the tightening order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TighteningPattern {
    order: Vec<usize>,
    /// `steps[p - 1]` is the 1-based step at which position `p` is tightened.
    steps: Vec<usize>,
}

impl TighteningPattern {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        if n < crate::model::MIN_BOLTS {
            return Err(Error::NotAPermutation {
                n,
                reason: format!("needs at least {} bolts", crate::model::MIN_BOLTS),
            });
        }
        let mut steps = vec![0; n];
        for (k, &p) in order.iter().enumerate() {
            if p == 0 || p > n {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("position {p} out of range"),
                });
            }
            if steps[p - 1] != 0 {
                return Err(Error::NotAPermutation {
                    n,
                    reason: format!("position {p} repeated"),
                });
            }
            steps[p - 1] = k + 1;
        }
        Ok(Self { order, steps })
    }

    pub fn circular(n: usize) -> Result<Self> {
        Self::new((1..=n).collect())
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn n_bolts(&self) -> usize {
        self.order.len()
    }

    /// Step (1-based) at which `position` is tightened.
    pub fn order_index(&self, position: usize) -> Result<usize> {
        if position == 0 || position > self.n_bolts() {
            return Err(Error::UnknownPosition { position });
        }
        Ok(self.steps[position - 1])
    }

    /// Position tightened at `step` (1-based).
    pub fn position_at(&self, step: usize) -> Result<usize> {
        if step == 0 || step > self.n_bolts() {
            return Err(Error::StepOutOfRange {
                step,
                n: self.n_bolts(),
            });
        }
        Ok(self.order[step - 1])
    }

    /// Same order with every position shifted `offset` places around the ring.
    pub fn rotated(&self, offset: usize) -> Self {
        let n = self.n_bolts();
        let order = self
            .order
            .iter()
            .map(|&p| (p - 1 + offset) % n + 1)
            .collect();
        Self::new(order).expect("rotation preserves permutations")
    }
}

impl fmt::Display for TighteningPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.order.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

pub fn make_pattern(
    kind: PatternKind,
    n: usize,
    custom_order: Option<&[usize]>,
) -> Result<TighteningPattern> {
    if let Some(required) = kind.required_bolts() {
        if n != required {
            return Err(Error::UnsupportedPattern {
                kind: kind.name(),
                required,
                n,
            });
        }
    }
    match kind {
        PatternKind::Pattern1 => TighteningPattern::new(PATTERN1.to_vec()),
        PatternKind::Pattern2 => TighteningPattern::new(PATTERN2.to_vec()),
        PatternKind::StarCircular => {
            let mut order = STAR_SET.to_vec();
            order.extend((1..=n).filter(|p| !STAR_SET.contains(p)));
            TighteningPattern::new(order)
        }
        PatternKind::Circular => TighteningPattern::circular(n),
        PatternKind::Custom => {
            let order = custom_order.ok_or(Error::MissingCustomOrder)?;
            if order.len() != n {
                return Err(Error::PatternSizeMismatch {
                    pattern: order.len(),
                    joint: n,
                });
            }
            TighteningPattern::new(order.to_vec())
        }
    }
}

/// Shortest number of steps between two positions around the ring.
pub fn ring_distance(n: usize, a: usize, b: usize) -> Result<usize> {
    check_position(n, a)?;
    check_position(n, b)?;
    Ok(ring_distance_unchecked(n, a, b))
}

pub(crate) fn ring_distance_unchecked(n: usize, a: usize, b: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Position `offset` steps from `position` (negative is counter-clockwise).
pub(crate) fn ring_offset(n: usize, position: usize, offset: isize) -> usize {
    let n = n as isize;
    ((position as isize - 1 + offset).rem_euclid(n) + 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn built_in_layouts() {
        assert_eq!(
            make_pattern(PatternKind::Pattern1, 20, None)
                .unwrap()
                .order(),
            [1, 11, 6, 16, 3, 13, 8, 18, 5, 15, 10, 20, 2, 12, 7, 17, 4, 14, 9, 19]
        );
        assert_eq!(
            make_pattern(PatternKind::Pattern2, 20, None)
                .unwrap()
                .order(),
            [1, 11, 6, 16, 2, 12, 7, 17, 3, 13, 8, 18, 4, 14, 9, 19, 5, 15, 10, 20]
        );
        assert_eq!(
            make_pattern(PatternKind::StarCircular, 20, None)
                .unwrap()
                .order(),
            [1, 11, 6, 16, 2, 3, 4, 5, 7, 8, 9, 10, 12, 13, 14, 15, 17, 18, 19, 20]
        );
    }

    #[test]
    fn star_layouts_need_twenty_bolts() {
        let err = make_pattern(PatternKind::Pattern1, 16, None).unwrap_err();
        assert_eq!(err.to_string(), "pattern1 requires 20 bolts (got 16)");
        assert!(make_pattern(PatternKind::Circular, 16, None).is_ok());
    }

    #[test]
    fn custom_order_checks() {
        assert!(matches!(
            make_pattern(PatternKind::Custom, 3, None),
            Err(Error::MissingCustomOrder)
        ));
        assert!(matches!(
            make_pattern(PatternKind::Custom, 3, Some(&[1, 1, 2])),
            Err(Error::NotAPermutation { .. })
        ));
        assert!(matches!(
            make_pattern(PatternKind::Custom, 3, Some(&[1, 2, 4])),
            Err(Error::NotAPermutation { .. })
        ));
        assert!(make_pattern(PatternKind::Custom, 4, Some(&[1, 2, 3])).is_err());
    }

    #[test]
    fn ring_distance_examples() {
        assert_eq!(ring_distance(20, 1, 20).unwrap(), 1);
        assert_eq!(ring_distance(20, 1, 3).unwrap(), 2);
        assert_eq!(ring_distance(20, 5, 15).unwrap(), 10);
        assert!(ring_distance(20, 0, 3).is_err());
        assert!(ring_distance(20, 1, 21).is_err());
    }

    #[test]
    fn order_index_examples() {
        let p1 = make_pattern(PatternKind::Pattern1, 20, None).unwrap();
        let p2 = make_pattern(PatternKind::Pattern2, 20, None).unwrap();
        assert_eq!(p1.order_index(3).unwrap(), 5);
        assert_eq!(p1.order_index(1).unwrap(), 1);
        assert_eq!(p2.order_index(20).unwrap(), 20);
        assert!(matches!(
            p1.order_index(21),
            Err(Error::UnknownPosition { position: 21 })
        ));
    }

    #[test]
    fn ring_offset_wraps() {
        assert_eq!(ring_offset(20, 1, -1), 20);
        assert_eq!(ring_offset(20, 19, 2), 1);
        assert_eq!(ring_offset(5, 3, -7), 1);
    }

    fn permutation() -> impl Strategy<Value = Vec<usize>> {
        (2usize..40).prop_flat_map(|n| Just((1..=n).collect::<Vec<_>>()).prop_shuffle())
    }

    proptest! {
        #[test]
        fn order_index_inverts_position_at(order in permutation()) {
            let pattern = TighteningPattern::new(order).unwrap();
            for step in 1..=pattern.n_bolts() {
                let p = pattern.position_at(step).unwrap();
                prop_assert_eq!(pattern.order_index(p).unwrap(), step);
            }
        }

        #[test]
        fn custom_round_trips(order in permutation()) {
            let n = order.len();
            let pattern = make_pattern(PatternKind::Custom, n, Some(&order)).unwrap();
            prop_assert_eq!(pattern.order(), order.as_slice());
        }

        #[test]
        fn ring_distance_is_a_symmetric_bounded_metric(n in 2usize..60, a in 1usize..60, b in 1usize..60) {
            let (a, b) = ((a - 1) % n + 1, (b - 1) % n + 1);
            let d = ring_distance(n, a, b).unwrap();
            prop_assert_eq!(d, ring_distance(n, b, a).unwrap());
            prop_assert_eq!(ring_distance(n, a, a).unwrap(), 0);
            prop_assert!(d <= n / 2);
        }
    }

    #[test]
    fn max_ring_distance_is_reached() {
        assert_eq!(ring_distance(20, 1, 11).unwrap(), 10);
        assert_eq!(ring_distance(7, 1, 4).unwrap(), 3);
    }
}
