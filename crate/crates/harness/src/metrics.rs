//! Root-mean-square position error.

use aoa_nlos::Point3;

use crate::{Error, Result};

/// `sqrt(mean ‖x̃ᵢ - xᵢ‖²)` over paired estimates and truths.
pub fn rmse(estimates: &[Point3], truths: &[Point3]) -> Result<f64> {
    if estimates.len() != truths.len() {
        return Err(Error::Input(format!(
            "{} estimates for {} truths",
            estimates.len(),
            truths.len()
        )));
    }
    let mut acc = RmseAccumulator::default();
    for (e, t) in estimates.iter().zip(truths) {
        acc.push(*e, *t);
    }
    acc.value().ok_or_else(|| Error::Input("no estimates".into()))
}

/// Streaming RMSE over trials pushed in order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RmseAccumulator {
    sum_sq: f64,
    count: usize,
}

impl RmseAccumulator {
    /// Adds one trial.
    pub fn push(&mut self, estimate: Point3, truth: Point3) {
        let d = estimate - truth;
        self.sum_sq += d.dot(&d);
        self.count += 1;
    }

    /// Trials pushed.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Current RMSE, `None` when empty.
    pub fn value(&self) -> Option<f64> {
        (self.count > 0).then(|| (self.sum_sq / self.count as f64).sqrt())
    }
}
