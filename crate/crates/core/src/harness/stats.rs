use serde::{Deserialize, Serialize};

/// Moments of a sample, accumulated in index order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Fourth central moment (biased, `1/R`).
    pub fourth_central: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let r = values.len();
        let rf = r as f64;
        let mean = values.iter().sum::<f64>() / rf;
        let (mut m2, mut m4) = (0.0, 0.0);
        for v in values {
            let d = v - mean;
            let d2 = d * d;
            m2 += d2;
            m4 += d2 * d2;
        }
        let variance = if r > 1 { m2 / (rf - 1.0) } else { 0.0 };
        Summary { count: r, mean, variance, fourth_central: m4 / rf }
    }

    pub fn std_error_mean(&self) -> f64 {
        (self.variance / self.count as f64).sqrt()
    }

    /// `sqrt((m4 - s^4) / R)`, the large-sample standard error of the
    /// variance estimate.
    pub fn std_error_variance(&self) -> f64 {
        ((self.fourth_central - self.variance * self.variance).max(0.0) / self.count as f64).sqrt()
    }
}

/// `count` evenly spaced points covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect(),
    }
}
