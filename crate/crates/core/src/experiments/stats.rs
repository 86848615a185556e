//! Small goodness-of-fit helpers used by the statistical suites.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// One-sample Kolmogorov-Smirnov test against `U(0,1)`.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct KsReport {
    pub statistic: f64,
    pub p_value: f64,
    pub samples: usize,
}

pub fn ks_uniform(samples: &[f64]) -> KsReport {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let x = x.clamp(0.0, 1.0);
        d = d.max((i as f64 + 1.0) / n - x).max(x - i as f64 / n);
    }
    let sqrt_n = n.sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    KsReport { statistic: d, p_value: kolmogorov_q(lambda), samples: xs.len() }
}

/// Survival function of the Kolmogorov distribution.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = sign * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Sample Pearson correlation; 0 for a constant input.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// Chi-squared test of homogeneity for two samples of small nonnegative
/// integers.
#[derive(Clone, Debug, Serialize)]
pub struct ChiSquaredReport {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub counts_a: Vec<u64>,
    pub counts_b: Vec<u64>,
}

pub fn chi_squared_two_sample(a: &[u32], b: &[u32]) -> ChiSquaredReport {
    let k = a.iter().chain(b).copied().max().map_or(0, |m| m as usize + 1);
    let mut counts_a = vec![0u64; k];
    let mut counts_b = vec![0u64; k];
    for &x in a {
        counts_a[x as usize] += 1;
    }
    for &x in b {
        counts_b[x as usize] += 1;
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let total = na + nb;
    let mut statistic = 0.0;
    let mut used = 0usize;
    for (ca, cb) in counts_a.iter().zip(&counts_b) {
        let col = (ca + cb) as f64;
        if col == 0.0 {
            continue;
        }
        used += 1;
        let (ea, eb) = (na * col / total, nb * col / total);
        statistic += (*ca as f64 - ea).powi(2) / ea + (*cb as f64 - eb).powi(2) / eb;
    }
    let dof = used.saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
        1.0 - chi.cdf(statistic)
    };
    ChiSquaredReport { statistic, dof, p_value, counts_a, counts_b }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_on_grid_accepts() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let r = ks_uniform(&xs);
        assert!(r.statistic <= 0.0005 + 1e-12);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_rejects_squares() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i as f64 + 0.5) / 1000.0).powi(2)).collect();
        assert!(ks_uniform(&xs).p_value < 1e-6);
    }

    #[test]
    fn kolmogorov_known_value() {
        // Q(1.36) is the classical 5% critical point
        assert!((kolmogorov_q(1.358) - 0.05).abs() < 1e-3);
    }

    #[test]
    fn pearson_extremes() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&xs, &xs) - 1.0).abs() < 1e-15);
        let ys = [4.0, 3.0, 2.0, 1.0];
        assert!((pearson(&xs, &ys) + 1.0).abs() < 1e-15);
        assert_eq!(pearson(&xs, &[1.0; 4]), 0.0);
    }

    #[test]
    fn chi_squared_identical_and_disjoint() {
        let a = [0, 1, 1, 2, 2, 2];
        let r = chi_squared_two_sample(&a, &a);
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.dof, 2);
        assert!((r.p_value - 1.0).abs() < 1e-12);
        let b = vec![0u32; 500];
        let c = vec![1u32; 500];
        assert!(chi_squared_two_sample(&b, &c).p_value < 1e-10);
        assert_eq!(chi_squared_two_sample(&b, &b).p_value, 1.0);
    }
}
