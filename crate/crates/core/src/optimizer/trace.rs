use std::io::Write;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    /// 0 is the initial design.
    pub iter: usize,
    pub sum_rate_bps: f64,
    /// Largest relative violation of the original constraints.
    pub max_violation: f64,
    /// Wall time spent in the iteration.
    pub ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace {
    pub records: Vec<IterationRecord>,
}

impl IterationTrace {
    pub fn sum_rates(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.sum_rate_bps).collect()
    }

    /// Whether no step lowers the sum-rate by more than `tol` bits/s.
    pub fn is_monotone(&self, tol: f64) -> bool {
        self.records.windows(2).all(|w| w[1].sum_rate_bps >= w[0].sum_rate_bps - tol)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "sum_rate_bps", "max_violation", "ms"])?;
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                r.sum_rate_bps.to_string(),
                r.max_violation.to_string(),
                format!("{:.3}", r.ms),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
