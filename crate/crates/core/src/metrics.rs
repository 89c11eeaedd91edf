//! IGD and the confidence-interval stability criterion.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Mean over `pf_samples` of the Euclidean distance to the nearest member
/// of `pop`.
pub fn igd<S: AsRef<[f64]>, P: AsRef<[f64]>>(pf_samples: &[S], pop: &[P]) -> Result<f64> {
    if pf_samples.is_empty() {
        return Err(Error::EmptyInput("IGD reference samples"));
    }
    if pop.is_empty() {
        return Err(Error::EmptyInput("IGD population"));
    }
    let total: f64 = pf_samples
        .iter()
        .map(|s| {
            let s = s.as_ref();
            pop.iter()
                .map(|p| {
                    s.iter()
                        .zip(p.as_ref())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .sum();
    Ok(total / pf_samples.len() as f64)
}

/// Per-sample-time IGD aggregated over independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub sample_times: Vec<u64>,
    pub mean: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Trajectory {
    /// Student-t interval at `confidence` (e.g. 0.95) of `runs[r][t]` at each
    /// sample time. A single run gives zero-width bounds.
    pub fn from_runs(sample_times: Vec<u64>, runs: &[Vec<f64>], confidence: f64) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptyInput("trajectory runs"));
        }
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(Error::InvalidArgument(format!("confidence {confidence} outside (0, 1)")));
        }
        let t = sample_times.len();
        if runs.iter().any(|r| r.len() != t) {
            return Err(Error::InvalidArgument("runs differ in sample count".into()));
        }
        let k = runs.len();
        let quantile = if k > 1 {
            StudentsT::new(0.0, 1.0, (k - 1) as f64)
                .expect("positive degrees of freedom")
                .inverse_cdf(0.5 + confidence / 2.0)
        } else {
            0.0
        };
        let mut mean = Vec::with_capacity(t);
        let mut lower = Vec::with_capacity(t);
        let mut upper = Vec::with_capacity(t);
        for i in 0..t {
            let values: Vec<f64> = runs.iter().map(|r| r[i]).collect();
            let m = values.iter().sum::<f64>() / k as f64;
            let half = if k > 1 {
                let var = values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (k - 1) as f64;
                quantile * (var / k as f64).sqrt()
            } else {
                0.0
            };
            mean.push(m);
            lower.push(m - half);
            upper.push(m + half);
        }
        Ok(Trajectory {
            sample_times,
            mean,
            lower,
            upper,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("eval_count,mean,lower,upper\n");
        for i in 0..self.sample_times.len() {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                self.sample_times[i], self.mean[i], self.lower[i], self.upper[i]
            );
        }
        out
    }
}

/// `Σ (log upper − log lower)`. Smaller is more stable.
pub fn stability(traj: &Trajectory) -> Result<f64> {
    let mut v = 0.0;
    for (i, (&lo, &hi)) in traj.lower.iter().zip(&traj.upper).enumerate() {
        if lo <= 0.0 || lo.is_nan() {
            return Err(Error::NonPositiveBound { index: i, value: lo });
        }
        if hi <= 0.0 || hi.is_nan() {
            return Err(Error::NonPositiveBound { index: i, value: hi });
        }
        v += hi.ln() - lo.ln();
    }
    Ok(v)
}

/// `count` evaluation counts evenly spaced from `first` to `last`, rounded
/// to integers.
pub fn sample_times(first: u64, last: u64, count: usize) -> Vec<u64> {
    match count {
        0 => Vec::new(),
        1 => vec![last],
        _ => (0..count)
            .map(|i| {
                let f = i as f64 / (count - 1) as f64;
                (first as f64 + f * (last - first) as f64).round() as u64
            })
            .collect(),
    }
}

/// Median of a nonempty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}
