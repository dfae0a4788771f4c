use super::SimError;
use crate::model::{DiversitySummary, TrajectoryOutcome, WindowCount};

/// `sum x_i^2 / (sum x_i)^2`, or 0 when there are no cells.
pub fn simpson_index(sizes: &[u64]) -> f64 {
    let total: u64 = sizes.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let squares: f64 = sizes.iter().map(|&s| s as f64 * s as f64).sum();
    squares / (total as f64 * total as f64)
}

/// Clone counts and Simpson's Index of `outcome` at its stop time, plus the number of
/// clones born inside each `(t1, t2)` and their combined size.
pub fn diversity_summary(outcome: &TrajectoryOutcome, windows: &[(f64, f64)]) -> Result<DiversitySummary, SimError> {
    if let Some(&(t1, t2)) = windows.iter().find(|(t1, t2)| !(*t1 >= 0.0 && t1 < t2)) {
        return Err(SimError::InvalidWindow { t1, t2 });
    }
    let sizes: Vec<u64> = outcome.sizes().collect();
    let windows = windows
        .iter()
        .map(|&(t1, t2)| {
            let inside = outcome.clone_records.iter().filter(|c| c.birth_time > t1 && c.birth_time < t2);
            let (clones, mass) = inside.fold((0, 0), |(k, m), c| (k + 1, m + c.size));
            WindowCount { t1, t2, clones, mass }
        })
        .collect();
    Ok(DiversitySummary {
        num_clones_generated: sizes.len() as u64,
        num_clones_alive: sizes.iter().filter(|&&s| s > 0).count() as u64,
        simpson: simpson_index(&sizes),
        windows,
    })
}
