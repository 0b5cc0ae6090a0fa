//! Reference post-processor: flips the fewest labels needed to bring the
//! statistical parity gap within epsilon.
//!
//! The plan is chosen over per-group net changes in positive count. Among
//! plans with the same number of flips, those that only lower the
//! over-favored group and raise the under-favored one come first, then the
//! plan whose two groups receive the most similar number of flips. Which
//! instances are flipped inside a group is decided by a seeded shuffle of
//! the eligible indices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fairness::positive_rate;
use crate::frame::AuditFrame;

/// Produces corrected labels for a frame's predictions.
pub trait Debiaser {
    fn debias(&self, frame: &AuditFrame) -> Result<Vec<u8>>;
}

/// Returns the frame's existing corrected labels, for auditing the output of
/// an external post-processor.
#[derive(Debug, Clone, Copy, Default)]
pub struct PassThrough;

impl Debiaser for PassThrough {
    fn debias(&self, frame: &AuditFrame) -> Result<Vec<u8>> {
        Ok(frame.y_corrected().to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpEqualizer {
    pub epsilon: f64,
    pub seed: u64,
    /// Upper bound on flips. When the target needs more, the plan with the
    /// smallest reachable gap inside the budget is applied instead.
    pub max_flips: Option<usize>,
}

impl SpEqualizer {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            max_flips: None,
        }
    }

    pub fn with_budget(mut self, max_flips: usize) -> Self {
        self.max_flips = Some(max_flips);
        self
    }
}

impl Debiaser for SpEqualizer {
    fn debias(&self, frame: &AuditFrame) -> Result<Vec<u8>> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidEpsilon(self.epsilon));
        }
        let counts = GroupCounts::of(frame)?;
        let plan = match counts.min_flip_plan(self.epsilon) {
            Some(p) => p,
            None => {
                return Err(Error::EpsilonUnreachable {
                    epsilon: self.epsilon,
                    best_gap: counts.closest_plan(usize::MAX).gap.abs(),
                })
            }
        };
        let plan = match self.max_flips {
            Some(budget) if plan.cost > budget => counts.closest_plan(budget),
            _ => plan,
        };
        Ok(apply_plan(frame, &counts, &plan, self.seed))
    }
}

/// Corrected labels with `|SP| <= epsilon` using the fewest flips.
pub fn sp_equalizing_debiaser(frame: &AuditFrame, epsilon: f64, rng_seed: u64) -> Result<Vec<u8>> {
    SpEqualizer::new(epsilon, rng_seed).debias(frame)
}

/// Size and positive count per group, indexed by group id.
#[derive(Debug, Clone, Copy)]
struct GroupCounts {
    n: [usize; 2],
    positives: [usize; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Plan {
    /// Target positive count per group.
    target: [usize; 2],
    cost: usize,
    gap: f64,
}

impl GroupCounts {
    fn of(frame: &AuditFrame) -> Result<Self> {
        let mut n = [0usize; 2];
        let mut positives = [0usize; 2];
        for (&y, &s) in frame.y_predicted().iter().zip(frame.group()) {
            n[usize::from(s)] += 1;
            positives[usize::from(s)] += usize::from(y);
        }
        for (id, &size) in n.iter().enumerate() {
            if size == 0 {
                return Err(Error::GroupHasNoInstances { group: id as u8 });
            }
        }
        Ok(Self { n, positives })
    }

    /// Same expression the SP gate evaluates.
    fn gap(&self, q0: usize, q1: usize) -> f64 {
        positive_rate(q0, self.n[0]) - positive_rate(q1, self.n[1])
    }

    fn plan(&self, q0: usize, q1: usize) -> Plan {
        Plan {
            target: [q0, q1],
            cost: q0.abs_diff(self.positives[0]) + q1.abs_diff(self.positives[1]),
            gap: self.gap(q0, q1),
        }
    }

    /// True when every flip moves a group toward the other's rate.
    fn closes_gap(&self, p: &Plan) -> bool {
        let g0 = self.gap(self.positives[0], self.positives[1]);
        let d0 = p.target[0] as i64 - self.positives[0] as i64;
        let d1 = p.target[1] as i64 - self.positives[1] as i64;
        if g0 > 0.0 {
            d0 <= 0 && d1 >= 0
        } else {
            d0 >= 0 && d1 <= 0
        }
    }

    fn preference(&self, p: &Plan) -> (usize, bool, usize, usize) {
        let d0 = p.target[0].abs_diff(self.positives[0]);
        let d1 = p.target[1].abs_diff(self.positives[1]);
        (p.cost, !self.closes_gap(p), d0.abs_diff(d1), p.target[0])
    }

    /// First q1 in `0..=n1` for which `pred(gap(q0, q1))` turns false; the
    /// gap is nonincreasing in q1.
    fn partition(&self, q0: usize, pred: impl Fn(f64) -> bool) -> usize {
        let (mut lo, mut hi) = (0usize, self.n[1] + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if pred(self.gap(q0, mid)) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn min_flip_plan(&self, epsilon: f64) -> Option<Plan> {
        let mut best: Option<Plan> = None;
        for q0 in 0..=self.n[0] {
            let first = self.partition(q0, |g| g > epsilon);
            let end = self.partition(q0, |g| g >= -epsilon);
            if first >= end {
                continue;
            }
            // feasible q1 is first..end; the cheapest is the one nearest the
            // current count
            let q1 = self.positives[1].clamp(first, end - 1);
            let p = self.plan(q0, q1);
            if best.is_none_or(|b| self.preference(&p) < self.preference(&b)) {
                best = Some(p);
            }
        }
        best
    }

    /// Plan with the smallest |gap| using at most `budget` flips; ties go to
    /// fewer flips.
    fn closest_plan(&self, budget: usize) -> Plan {
        let mut best = self.plan(self.positives[0], self.positives[1]);
        let key = |p: &Plan| (p.gap.abs(), self.preference(p));
        let d0_max = budget.min(self.n[0]);
        let lo0 = self.positives[0].saturating_sub(d0_max);
        let hi0 = (self.positives[0] + d0_max).min(self.n[0]);
        for q0 in lo0..=hi0 {
            let rest = budget - q0.abs_diff(self.positives[0]);
            let lo1 = self.positives[1].saturating_sub(rest);
            let hi1 = self.positives[1].saturating_add(rest).min(self.n[1]);
            let cross = self.partition(q0, |g| g > 0.0);
            let candidates = [Some(lo1), Some(hi1), Some(cross), cross.checked_sub(1)];
            for q1 in candidates.into_iter().flatten() {
                let q1 = q1.clamp(lo1, hi1);
                let p = self.plan(q0, q1);
                if key(&p).partial_cmp(&key(&best)) == Some(std::cmp::Ordering::Less) {
                    best = p;
                }
            }
        }
        best
    }
}

fn apply_plan(frame: &AuditFrame, counts: &GroupCounts, plan: &Plan, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = frame.y_predicted().to_vec();
    for g in 0..2u8 {
        let gi = usize::from(g);
        let (have, want) = (counts.positives[gi], plan.target[gi]);
        if have == want {
            continue;
        }
        // lowering flips 1 -> 0, raising flips 0 -> 1
        let from = u8::from(want < have);
        let mut eligible: Vec<usize> = (0..labels.len())
            .filter(|&i| frame.group()[i] == g && labels[i] == from)
            .collect();
        eligible.shuffle(&mut rng);
        for &i in eligible.iter().take(have.abs_diff(want)) {
            labels[i] = 1 - from;
        }
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fairness::statistical_parity_difference;

    fn frame(pred: &[u8], group: &[u8]) -> AuditFrame {
        AuditFrame::from_predictions(pred.to_vec(), group.to_vec(), None).unwrap()
    }

    fn flips(a: &[u8], b: &[u8]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn two_group_example_reaches_epsilon() {
        // group 1: 4/5 positive, group 0: 3/5 positive
        let f = frame(&[1, 1, 1, 1, 0, 1, 1, 1, 0, 0], &[1, 1, 1, 1, 1, 0, 0, 0, 0, 0]);
        let out = sp_equalizing_debiaser(&f, 0.1, 7).unwrap();
        let sp = statistical_parity_difference(&out, f.group()).unwrap();
        assert!(sp.abs() <= 0.1);
        // one flip closes a 0.2 gap between groups of five
        assert_eq!(flips(f.y_predicted(), &out), 1);
    }

    #[test]
    fn already_fair_is_identity() {
        let f = frame(&[1, 0, 1, 0], &[0, 0, 1, 1]);
        assert_eq!(sp_equalizing_debiaser(&f, 0.1, 1).unwrap(), f.y_predicted());
        let g = frame(&[1, 1, 0, 0], &[1, 1, 0, 0]);
        assert_eq!(sp_equalizing_debiaser(&g, 1.0, 1).unwrap(), g.y_predicted());
    }

    #[test]
    fn rejects_bad_epsilon_and_missing_group() {
        let f = frame(&[1, 0], &[0, 1]);
        assert!(matches!(
            sp_equalizing_debiaser(&f, 0.0, 1),
            Err(Error::InvalidEpsilon(_))
        ));
        let g = frame(&[1, 0], &[1, 1]);
        assert!(matches!(
            sp_equalizing_debiaser(&g, 0.1, 1),
            Err(Error::GroupHasNoInstances { group: 0 })
        ));
    }

    #[test]
    fn any_positive_epsilon_is_reachable() {
        // clearing every positive label gives a gap of exactly zero
        let counts = GroupCounts {
            n: [2, 3],
            positives: [1, 1],
        };
        let plan = counts.min_flip_plan(1e-12).unwrap();
        assert_eq!(plan.gap, 0.0);
        assert_eq!(counts.closest_plan(usize::MAX).gap, 0.0);
    }

    #[test]
    fn budget_limits_flips() {
        let f = frame(&[1, 1, 1, 1, 1, 0, 0, 0, 0, 0], &[0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        let out = SpEqualizer::new(0.05, 1).with_budget(2).debias(&f).unwrap();
        assert_eq!(flips(f.y_predicted(), &out), 2);
        let sp = statistical_parity_difference(&out, f.group()).unwrap();
        assert!(sp.abs() > 0.05);
    }

    #[test]
    fn seed_is_deterministic() {
        let pred: Vec<u8> = (0..40).map(|i| u8::from(i % 3 != 0)).collect();
        let group: Vec<u8> = (0..40).map(|i| u8::from(i < 25)).collect();
        let f = frame(&pred, &group);
        assert_eq!(
            sp_equalizing_debiaser(&f, 0.05, 9).unwrap(),
            sp_equalizing_debiaser(&f, 0.05, 9).unwrap()
        );
    }

    #[test]
    fn pass_through_returns_corrected() {
        let f = AuditFrame::new(vec![1, 0], vec![0, 0], vec![0, 1], None).unwrap();
        assert_eq!(PassThrough.debias(&f).unwrap(), vec![0, 0]);
    }
}
