//! Monte Carlo means with 95% confidence half-widths.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Normal,
    Wilson,
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub reps: u64,
    pub seed: u64,
    pub ci_method: CiMethod,
}

/// Neumaier compensated summation.
#[derive(Copy, Clone, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

impl Estimate {
    /// Sample mean with a normal-approximation interval.
    pub fn from_samples(samples: &[f64], seed: u64) -> Estimate {
        assert!(!samples.is_empty(), "an estimate needs at least one replication");
        let n = samples.len() as f64;
        let mean = samples.iter().copied().collect::<CompensatedSum>().value() / n;
        let ss = samples.iter().map(|x| (x - mean) * (x - mean)).collect::<CompensatedSum>();
        let var = if samples.len() > 1 { ss.value() / (n - 1.0) } else { 0.0 };
        Estimate {
            mean,
            half_width_95: Z95 * (var / n).sqrt(),
            reps: samples.len() as u64,
            seed,
            ci_method: CiMethod::Normal,
        }
    }

    /// Proportion of successes. Falls back to the Wilson interval when fewer
    /// than five successes or five failures were seen; the half-width is then
    /// the larger distance from the mean to a Wilson bound.
    pub fn from_indicators(hits: &[bool], seed: u64) -> Estimate {
        let k = hits.iter().filter(|h| **h).count() as u64;
        Estimate::from_count(k, hits.len() as u64, seed)
    }

    pub fn from_count(successes: u64, reps: u64, seed: u64) -> Estimate {
        assert!(reps > 0, "an estimate needs at least one replication");
        let n = reps as f64;
        let p = successes as f64 / n;
        if successes >= 5 && reps - successes >= 5 {
            return Estimate {
                mean: p,
                half_width_95: Z95 * (p * (1.0 - p) / n).sqrt(),
                reps,
                seed,
                ci_method: CiMethod::Normal,
            };
        }
        let z2 = Z95 * Z95;
        let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
        let spread = Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
        let (lo, hi) = (centre - spread, centre + spread);
        Estimate {
            mean: p,
            half_width_95: (p - lo).max(hi - p),
            reps,
            seed,
            ci_method: CiMethod::Wilson,
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width_95
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width_95
    }

    /// Whether `value` lies within `k` half-widths of the mean.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.half_width_95
    }
}
