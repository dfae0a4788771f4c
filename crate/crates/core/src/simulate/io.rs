//! CSV writers for ensembles.

use std::io::Write;

use serde::Serialize;

use super::{diversity_summary, Ensemble, SimError};

/// One row of `runs.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub run_id: u64,
    pub seed: u64,
    /// Empty when censored.
    pub gamma: Option<f64>,
    pub censored: bool,
    pub z1_final: u64,
    pub num_clones_generated: u64,
    pub num_clones_alive: u64,
    pub simpson: f64,
}

/// One row of `clones.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CloneRow {
    pub run_id: u64,
    pub clone_id: u64,
    pub birth_time: f64,
    pub size: u64,
}

pub fn run_rows(ensemble: &Ensemble) -> Vec<RunRow> {
    ensemble
        .outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let d = diversity_summary(o, &[]).expect("no windows");
            RunRow {
                run_id: i as u64,
                seed: o.seed,
                gamma: o.recurrence_time(),
                censored: o.recurrence.is_censored(),
                z1_final: o.z1_final,
                num_clones_generated: d.num_clones_generated,
                num_clones_alive: d.num_clones_alive,
                simpson: d.simpson,
            }
        })
        .collect()
}

pub fn write_runs<W: Write>(ensemble: &Ensemble, out: W) -> Result<(), SimError> {
    write_rows(run_rows(ensemble), out)
}

pub fn write_clones<W: Write>(ensemble: &Ensemble, out: W) -> Result<(), SimError> {
    let rows = ensemble.outcomes.iter().enumerate().flat_map(|(i, o)| {
        o.clone_records.iter().map(move |c| CloneRow {
            run_id: i as u64,
            clone_id: c.id,
            birth_time: c.birth_time,
            size: c.size,
        })
    });
    write_rows(rows, out)
}

/// Serializes `rows` with a header line.
pub fn write_rows<T: Serialize, W: Write>(rows: impl IntoIterator<Item = T>, out: W) -> Result<(), SimError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
