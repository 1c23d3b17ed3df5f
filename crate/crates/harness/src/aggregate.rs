use serde::{Deserialize, Serialize};
use sparse_qubo::Metric;

use crate::config::Method;
use crate::experiment::ResultRow;

/// Mean and standard error of both error metrics over the repetitions of one
/// (method, tuning metric, sweep value) group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub method: Method,
    pub tuned_for: Metric,
    pub sweep_value: f64,
    pub count: usize,
    pub reconstruction_mean: f64,
    pub reconstruction_stderr: f64,
    pub support_mean: f64,
    pub support_stderr: f64,
}

impl AggregateRow {
    pub fn mean(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Reconstruction => self.reconstruction_mean,
            Metric::Support => self.support_mean,
        }
    }

    pub fn stderr(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Reconstruction => self.reconstruction_stderr,
            Metric::Support => self.support_stderr,
        }
    }
}

/// Sample mean and `s / √n` (with `s` the n−1 standard deviation; zero for one sample).
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Groups appear in the order their first row does.
pub fn aggregate(rows: &[ResultRow]) -> Vec<AggregateRow> {
    let mut keys: Vec<(Method, Metric, u64)> = Vec::new();
    for r in rows {
        let key = (r.method, r.tuned_for, r.sweep_value.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(method, tuned_for, bits)| {
            let group: Vec<&ResultRow> = rows
                .iter()
                .filter(|r| {
                    r.method == method
                        && r.tuned_for == tuned_for
                        && r.sweep_value.to_bits() == bits
                })
                .collect();
            let rec: Vec<f64> = group.iter().map(|r| r.reconstruction_error).collect();
            let sup: Vec<f64> = group.iter().map(|r| r.support_error as f64).collect();
            let (reconstruction_mean, reconstruction_stderr) = mean_stderr(&rec);
            let (support_mean, support_stderr) = mean_stderr(&sup);
            AggregateRow {
                method,
                tuned_for,
                sweep_value: f64::from_bits(bits),
                count: group.len(),
                reconstruction_mean,
                reconstruction_stderr,
                support_mean,
                support_stderr,
            }
        })
        .collect()
}
