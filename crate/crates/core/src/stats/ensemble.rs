use crate::error::{Error, Result};
use crate::walk::WalkOutcome;

/// Default number of passage-time histogram bins.
pub const DEFAULT_BINS: usize = 200;

/// Fixed-width bins over `[0, upper)` plus one overflow counter.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeHistogram {
    upper: f64,
    counts: Vec<u64>,
    overflow: u64,
}

impl TimeHistogram {
    pub fn new(bins: usize, upper: f64) -> Result<Self> {
        if bins == 0 || !(upper.is_finite() && upper > 0.0) {
            return Err(Error::domain(format!(
                "histogram needs bins > 0 and a positive range, got {bins} bins over [0, {upper})"
            )));
        }
        Ok(TimeHistogram {
            upper,
            counts: vec![0; bins],
            overflow: 0,
        })
    }

    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn bin_width(&self) -> f64 {
        self.upper / self.counts.len() as f64
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.overflow
    }

    /// Bin edges `0, w, 2w, …, upper`.
    pub fn edges(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..=self.bins()).map(|i| i as f64 * w).collect()
    }

    pub fn centers(&self) -> Vec<f64> {
        let w = self.bin_width();
        (0..self.bins()).map(|i| (i as f64 + 0.5) * w).collect()
    }

    pub fn record(&mut self, t: f64) {
        let idx = (t / self.bin_width()).floor();
        if idx >= 0.0 && (idx as usize) < self.counts.len() {
            self.counts[idx as usize] += 1;
        } else {
            self.overflow += 1;
        }
    }

    fn same_layout(&self, other: &Self) -> bool {
        self.upper.to_bits() == other.upper.to_bits() && self.counts.len() == other.counts.len()
    }
}

/// Mergeable summary of an ensemble of walks.
///
/// Passage-time moments are kept as exact integer sums of step counts and
/// scaled by the time unit on read, so merging is exactly commutative and
/// associative and every sharding of the same outcomes gives identical
/// statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    vertex_counts: Vec<u64>,
    incomplete: u64,
    trials: u64,
    time_unit: f64,
    step_sum: u128,
    step_sq_sum: u128,
    histogram: TimeHistogram,
}

impl EnsembleStats {
    pub fn new(dimension: usize, time_unit: f64, histogram: TimeHistogram) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::DimensionTooSmall(dimension));
        }
        if !(time_unit.is_finite() && time_unit > 0.0) {
            return Err(Error::domain(format!("time unit must be positive, got {time_unit}")));
        }
        Ok(EnsembleStats {
            vertex_counts: vec![0; dimension],
            incomplete: 0,
            trials: 0,
            time_unit,
            step_sum: 0,
            step_sq_sum: 0,
            histogram,
        })
    }

    /// Empty statistics with the same layout as `self`.
    pub fn empty_like(&self) -> Self {
        EnsembleStats {
            vertex_counts: vec![0; self.dimension()],
            incomplete: 0,
            trials: 0,
            time_unit: self.time_unit,
            step_sum: 0,
            step_sq_sum: 0,
            histogram: TimeHistogram {
                upper: self.histogram.upper,
                counts: vec![0; self.histogram.bins()],
                overflow: 0,
            },
        }
    }

    pub fn dimension(&self) -> usize {
        self.vertex_counts.len()
    }

    pub fn vertex_counts(&self) -> &[u64] {
        &self.vertex_counts
    }

    pub fn incomplete_count(&self) -> u64 {
        self.incomplete
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn completed(&self) -> u64 {
        self.trials - self.incomplete
    }

    pub fn time_unit(&self) -> f64 {
        self.time_unit
    }

    /// Sum of passage pseudo-times over completed trials.
    pub fn time_sum(&self) -> f64 {
        self.step_sum as f64 * self.time_unit
    }

    pub fn time_sq_sum(&self) -> f64 {
        self.step_sq_sum as f64 * self.time_unit * self.time_unit
    }

    pub fn histogram(&self) -> &TimeHistogram {
        &self.histogram
    }

    /// Vertex frequencies over completed trials.
    pub fn frequencies(&self) -> Option<Vec<f64>> {
        let done = self.completed();
        (done > 0).then(|| {
            self.vertex_counts
                .iter()
                .map(|&c| c as f64 / done as f64)
                .collect()
        })
    }

    /// Sample mean and standard error of the passage time.
    pub fn time_mean_and_stderr(&self) -> Option<(f64, f64)> {
        let done = self.completed();
        if done < 2 {
            return None;
        }
        let n = done as f64;
        let mean_steps = self.step_sum as f64 / n;
        // n·Σs² − (Σs)² is exact in u128
        let centered = u128::from(done) * self.step_sq_sum - self.step_sum * self.step_sum;
        let var_steps = centered as f64 / (n * (n - 1.0));
        Some((
            mean_steps * self.time_unit,
            (var_steps / n).sqrt() * self.time_unit,
        ))
    }

    pub fn accumulate(&mut self, outcome: &WalkOutcome) -> Result<()> {
        let n = self.dimension();
        if outcome.dimension != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: outcome.dimension,
            });
        }
        self.trials += 1;
        match outcome.winner {
            Some(w) if w < n => {
                self.vertex_counts[w] += 1;
                let s = u128::from(outcome.steps);
                self.step_sum += s;
                self.step_sq_sum += s * s;
                self.histogram
                    .record(outcome.steps as f64 * self.time_unit);
            }
            Some(w) => {
                self.trials -= 1;
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: w + 1,
                });
            }
            None => self.incomplete += 1,
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &EnsembleStats) -> Result<()> {
        if other.dimension() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                got: other.dimension(),
            });
        }
        if other.time_unit.to_bits() != self.time_unit.to_bits()
            || !self.histogram.same_layout(&other.histogram)
        {
            return Err(Error::IncompatibleStats(
                "time unit or histogram layout differs".into(),
            ));
        }
        for (a, b) in self.vertex_counts.iter_mut().zip(&other.vertex_counts) {
            *a += b;
        }
        self.incomplete += other.incomplete;
        self.trials += other.trials;
        self.step_sum += other.step_sum;
        self.step_sq_sum += other.step_sq_sum;
        for (a, b) in self
            .histogram
            .counts
            .iter_mut()
            .zip(&other.histogram.counts)
        {
            *a += b;
        }
        self.histogram.overflow += other.histogram.overflow;
        Ok(())
    }

    pub fn merged(mut self, other: &EnsembleStats) -> Result<Self> {
        self.merge(other)?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stats(n: usize) -> EnsembleStats {
        EnsembleStats::new(n, 0.1, TimeHistogram::new(10, 1.0).unwrap()).unwrap()
    }

    fn outcome(n: usize, winner: Option<usize>, steps: u64) -> WalkOutcome {
        WalkOutcome {
            dimension: n,
            winner,
            steps,
            elapsed: steps as f64 * 0.1,
            elimination_order: vec![],
        }
    }

    #[test]
    fn single_accumulate() {
        let mut s = stats(2);
        s.accumulate(&outcome(2, Some(1), 2)).unwrap();
        assert_eq!(s.vertex_counts(), &[0, 1]);
        assert_eq!(s.trials(), 1);
        assert!((s.time_sum() - 0.2).abs() < 1e-15);
        assert_eq!(s.histogram().counts()[2], 1);
    }

    #[test]
    fn incomplete_and_overflow() {
        let mut s = stats(3);
        s.accumulate(&outcome(3, None, 500)).unwrap();
        s.accumulate(&outcome(3, Some(0), 500)).unwrap();
        assert_eq!(s.incomplete_count(), 1);
        assert_eq!(s.completed(), 1);
        assert_eq!(s.histogram().overflow(), 1);
        assert_eq!(s.histogram().total(), s.completed());
        assert_eq!(
            s.vertex_counts().iter().sum::<u64>() + s.incomplete_count(),
            s.trials()
        );
    }

    #[test]
    fn dimension_checks() {
        let mut s = stats(2);
        assert!(matches!(
            s.accumulate(&outcome(3, Some(0), 1)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(s.accumulate(&outcome(2, Some(5), 1)).is_err());
        assert_eq!(s.trials(), 0);
        assert!(s.merge(&stats(3)).is_err());
        let other = EnsembleStats::new(2, 0.2, TimeHistogram::new(10, 1.0).unwrap()).unwrap();
        assert!(matches!(s.merge(&other), Err(Error::IncompatibleStats(_))));
    }

    #[test]
    fn merge_of_singles_equals_sequential() {
        let a_out = outcome(2, Some(0), 3);
        let b_out = outcome(2, Some(1), 7);
        let mut a = stats(2);
        a.accumulate(&a_out).unwrap();
        let mut b = stats(2);
        b.accumulate(&b_out).unwrap();
        let mut seq = stats(2);
        seq.accumulate(&b_out).unwrap();
        seq.accumulate(&a_out).unwrap();
        assert_eq!(a.clone().merged(&b).unwrap(), seq);
        assert_eq!(b.merged(&a).unwrap(), seq);
        assert_eq!(seq.clone().merged(&stats(2)).unwrap(), seq);
    }

    #[test]
    fn moments() {
        let mut s = stats(2);
        for steps in [1, 2, 3, 4] {
            s.accumulate(&outcome(2, Some(0), steps)).unwrap();
        }
        let (mean, se) = s.time_mean_and_stderr().unwrap();
        assert!((mean - 0.25).abs() < 1e-15);
        // sample sd of {0.1,..,0.4} is 0.129099..., se = sd / 2
        assert!((se - 0.064_549_722_436_790_3).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn merge_is_order_free(
            outs in prop::collection::vec((prop::option::of(0usize..3), 0u64..40), 0..200),
            cuts in prop::collection::vec(0usize..200, 0..6),
            rotate in 0usize..8,
        ) {
            let outs: Vec<_> = outs.into_iter().map(|(w, s)| outcome(3, w, s)).collect();
            let mut whole = stats(3);
            for o in &outs { whole.accumulate(o).unwrap(); }

            let mut cuts: Vec<_> = cuts.into_iter().map(|c| c.min(outs.len())).collect();
            cuts.push(0);
            cuts.push(outs.len());
            cuts.sort_unstable();
            let mut shards: Vec<_> = cuts.windows(2).map(|w| {
                let mut s = stats(3);
                for o in &outs[w[0]..w[1]] { s.accumulate(o).unwrap(); }
                s
            }).collect();
            let len = shards.len();
            shards.rotate_left(rotate % len);
            shards.reverse();
            let merged = shards.iter().fold(stats(3), |acc, s| acc.merged(s).unwrap());
            prop_assert_eq!(merged, whole);
        }
    }
}
