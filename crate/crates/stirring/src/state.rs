//! Ranked mass vectors with a distinguished active component.
//!
//! The state space is the set of sequences `(c_0, c_1, c_2, ...)` with
//! `c_1 ≥ c_2 ≥ ... ≥ 0`, finitely many nonzero entries, and a distinguished
//! coordinate `c_0` (the active component, not subject to the ranking).
//! Trailing zeros are implicit: only strictly positive tail entries are stored.
//!
//! The metric is the sup over `k` of the absolute partial-sum differences
//!
//! ```text
//! d(A, B) = sup_k | sum_{j<=k} A_j - sum_{j<=k} B_j |,
//! ```
//!
//! attained at some `k` no larger than the longer support since partial sums
//! are constant beyond it.
//!
//! Two mass flavors share this interface: nonnegative integers for the
//! discrete chains and nonnegative reals for the scaling limit. Rescaling an
//! integer vector (e.g. by `1/sqrt(n)`) produces the real flavor, which is how
//! the coupling compares the two processes in one metric.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("empty partition: total mass is zero")]
    EmptyPartition,
    #[error("negative mass {0} cannot enter a ranked vector")]
    NegativeMass(f64),
    #[error("tail component {index} is outside the nonzero support (len {len})")]
    TailIndexOutOfRange { index: usize, len: usize },
}

/// Mass flavor: the arithmetic a ranked vector is generic over.
pub trait Mass:
    Copy
    + PartialOrd
    + core::fmt::Debug
    + core::ops::Add<Output = Self>
    + core::ops::Sub<Output = Self>
{
    const ZERO: Self;
    fn to_f64(self) -> f64;
}

impl Mass for u64 {
    const ZERO: Self = 0;
    fn to_f64(self) -> f64 {
        self as f64
    }
}

impl Mass for f64 {
    const ZERO: Self = 0.0;
    fn to_f64(self) -> f64 {
        self
    }
}

/// An active component plus a non-increasing tail of positive masses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedMassVector<M: Mass> {
    active: M,
    tail: Vec<M>,
}

impl<M: Mass> RankedMassVector<M> {
    /// A vector with the given active mass and empty tail.
    pub fn from_active(active: M) -> Self {
        debug_assert!(active >= M::ZERO);
        Self { active, tail: Vec::new() }
    }

    /// Build from parts, validating nonnegativity and the tail ranking.
    pub fn new(active: M, tail: Vec<M>) -> Result<Self, StateError> {
        if !(active >= M::ZERO) {
            return Err(StateError::NegativeMass(active.to_f64()));
        }
        for w in tail.windows(2) {
            if !(w[0] >= w[1]) {
                return Err(StateError::NegativeMass(w[1].to_f64()));
            }
        }
        if let Some(&last) = tail.last() {
            if !(last > M::ZERO) {
                return Err(StateError::NegativeMass(last.to_f64()));
            }
        }
        Ok(Self { active, tail })
    }

    pub fn active(&self) -> M {
        self.active
    }

    pub fn tail(&self) -> &[M] {
        &self.tail
    }

    pub fn set_active(&mut self, active: M) {
        debug_assert!(active >= M::ZERO);
        self.active = active;
    }

    /// Grow the active component in place.
    pub fn grow_active(&mut self, amount: M) {
        self.active = self.active + amount;
    }

    /// Total mass, active included.
    pub fn total(&self) -> M {
        let mut sum = self.active;
        for &m in &self.tail {
            sum = sum + m;
        }
        sum
    }

    /// Number of stored coordinates (active plus nonzero tail).
    pub fn support_len(&self) -> usize {
        1 + self.tail.len()
    }

    /// Insert a mass into the tail, preserving the non-increasing order.
    ///
    /// Ties are resolved stably: an incoming mass goes after existing equal
    /// masses. Zero mass is a no-op on the nonzero support; negative mass is
    /// an error.
    pub fn insert_tail(&mut self, mass: M) -> Result<(), StateError> {
        if !(mass >= M::ZERO) {
            return Err(StateError::NegativeMass(mass.to_f64()));
        }
        if mass == M::ZERO {
            return Ok(());
        }
        let pos = self.tail.partition_point(|&m| m >= mass);
        self.tail.insert(pos, mass);
        Ok(())
    }

    /// Remove the `j`-th tail component (1-based, matching the ranking index
    /// of the merge rule) and return its mass. Order is preserved by the
    /// removal itself.
    pub fn remove_tail(&mut self, j: usize) -> Result<M, StateError> {
        if j == 0 || j > self.tail.len() {
            return Err(StateError::TailIndexOutOfRange { index: j, len: self.tail.len() });
        }
        Ok(self.tail.remove(j - 1))
    }

    /// Select a component by a uniform `u`: the unique `j` with
    /// `sum_{m<j} c_m < u * total <= sum_{m<=j} c_m`, counting the active
    /// component as `j = 0`. `j = 0` signals a split, `j >= 1` a merge with
    /// tail component `j`.
    ///
    /// Errors on total mass zero. `u = 0` selects the first coordinate with
    /// positive mass (the limit from above).
    pub fn select_component(&self, u: f64) -> Result<usize, StateError> {
        let total = self.total().to_f64();
        if total <= 0.0 {
            return Err(StateError::EmptyPartition);
        }
        let target = u * total;
        let mut cum = 0.0;
        let active = self.active.to_f64();
        if target <= cum + active && active > 0.0 {
            return Ok(0);
        }
        cum += active;
        for (idx, &m) in self.tail.iter().enumerate() {
            let m = m.to_f64();
            if target <= cum + m && m > 0.0 {
                return Ok(idx + 1);
            }
            cum += m;
        }
        // u*total landed above the accumulated mass by rounding; the last
        // positive coordinate owns the boundary.
        if self.tail.is_empty() {
            Ok(0)
        } else {
            Ok(self.tail.len())
        }
    }

    /// Rescale every coordinate, producing the real flavor.
    pub fn scaled(&self, factor: f64) -> RankedMassVector<f64> {
        RankedMassVector {
            active: self.active.to_f64() * factor,
            tail: self.tail.iter().map(|&m| m.to_f64() * factor).collect(),
        }
    }

    /// True when the tail ranking and nonnegativity hold.
    pub fn is_ranked(&self) -> bool {
        self.active >= M::ZERO
            && self.tail.windows(2).all(|w| w[0] >= w[1])
            && self.tail.iter().all(|&m| m > M::ZERO)
    }
}

/// Sup metric over partial sums; coordinate 0 is the active component.
pub fn distance<M: Mass>(a: &RankedMassVector<M>, b: &RankedMassVector<M>) -> f64 {
    let len = a.support_len().max(b.support_len());
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut best = 0.0f64;
    for k in 0..len {
        sum_a += coord(a, k);
        sum_b += coord(b, k);
        best = best.max((sum_a - sum_b).abs());
    }
    best
}

fn coord<M: Mass>(v: &RankedMassVector<M>, k: usize) -> f64 {
    if k == 0 {
        v.active.to_f64()
    } else {
        v.tail.get(k - 1).map_or(0.0, |m| m.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(active: u64, tail: &[u64]) -> RankedMassVector<u64> {
        RankedMassVector::new(active, tail.to_vec()).unwrap()
    }

    #[test]
    fn distance_of_identical_vectors_is_zero() {
        let a = v(3, &[2, 1]);
        assert_eq!(distance(&a, &a), 0.0);
    }

    #[test]
    fn distance_matches_partial_sum_evaluation() {
        // Partial sums (2,3,3,...) vs (1,2,3,...): sup gap 1.
        let a = v(2, &[1]);
        let b = v(1, &[1, 1]);
        assert_eq!(distance(&a, &b), 1.0);
    }

    #[test]
    fn distance_on_single_coordinate() {
        let a = RankedMassVector::<f64>::from_active(0.0);
        let b = RankedMassVector::<f64>::from_active(0.7);
        assert_eq!(distance(&a, &b), 0.7);
    }

    #[test]
    fn select_component_brackets_the_uniform() {
        let x = v(3, &[1]);
        assert_eq!(x.select_component(0.5).unwrap(), 0); // 0.5*4=2 <= 3
        assert_eq!(x.select_component(0.8).unwrap(), 1); // 3 < 3.2 <= 4
        assert_eq!(x.select_component(0.75).unwrap(), 0); // boundary goes down
    }

    #[test]
    fn select_component_rejects_empty() {
        let x = RankedMassVector::<u64>::from_active(0);
        assert_eq!(x.select_component(0.5), Err(StateError::EmptyPartition));
    }

    #[test]
    fn select_component_skips_zero_active() {
        let x = RankedMassVector::<f64>::new(0.0, vec![2.0, 1.0]).unwrap();
        assert_eq!(x.select_component(0.1).unwrap(), 1);
        assert_eq!(x.select_component(0.9).unwrap(), 2);
    }

    #[test]
    fn insert_keeps_ranking() {
        let mut x = v(4, &[5, 2]);
        x.insert_tail(3).unwrap();
        assert_eq!(x.tail(), &[5, 3, 2]);
        x.insert_tail(0).unwrap();
        assert_eq!(x.tail(), &[5, 3, 2]);
        let mut empty = v(1, &[]);
        empty.insert_tail(7).unwrap();
        assert_eq!(empty.tail(), &[7]);
    }

    #[test]
    fn insert_is_stable_on_ties() {
        let mut x = RankedMassVector::<f64>::new(0.0, vec![2.0, 2.0, 1.0]).unwrap();
        x.insert_tail(2.0).unwrap();
        assert_eq!(x.tail(), &[2.0, 2.0, 2.0, 1.0]);
    }

    #[test]
    fn insert_rejects_negative() {
        let mut x = RankedMassVector::<f64>::from_active(1.0);
        assert!(matches!(x.insert_tail(-0.5), Err(StateError::NegativeMass(_))));
    }

    #[test]
    fn remove_tail_component_by_rank() {
        let mut x = v(4, &[3, 2, 1]);
        assert_eq!(x.remove_tail(2).unwrap(), 2);
        assert_eq!(x.tail(), &[3, 1]);

        let mut y = v(4, &[3]);
        assert_eq!(y.remove_tail(1).unwrap(), 3);
        assert!(y.tail().is_empty());

        let mut z = v(4, &[3]);
        assert_eq!(
            z.remove_tail(2),
            Err(StateError::TailIndexOutOfRange { index: 2, len: 1 })
        );
    }

    #[test]
    fn scaled_produces_real_flavor() {
        let x = v(4, &[2, 1]);
        let y = x.scaled(0.5);
        assert_eq!(y.active(), 2.0);
        assert_eq!(y.tail(), &[1.0, 0.5]);
    }

    #[test]
    fn selection_frequencies_match_masses() {
        // Preimage of index j under u has Lebesgue measure c_j / total.
        use crate::rng::{self, domain};
        let x = RankedMassVector::<f64>::new(2.0, vec![1.5, 0.5]).unwrap();
        let total = 4.0;
        let n = 100_000usize;
        let mut counts = [0usize; 3];
        let mut rng = rng::stream(9, domain::PARTITION, 1);
        for _ in 0..n {
            counts[x.select_component(rng::unit(&mut rng)).unwrap()] += 1;
        }
        for (j, &mass) in [2.0, 1.5, 0.5].iter().enumerate() {
            let p = mass / total;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            let freq = counts[j] as f64 / n as f64;
            assert!(
                (freq - p).abs() <= 3.0 * sigma,
                "component {j}: freq {freq} vs p {p}"
            );
        }
    }
}
