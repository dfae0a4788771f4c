use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clonal_recur::analytics::analyze;
use clonal_recur::inference::{
    asymptotic_moments, bootstrap_ci, bootstrap_observations, estimate, estimate_from_moments, estimation_experiment,
    read_observations, sample_means, EstimateTriple, EstimationTable, ParameterRow,
};
use clonal_recur::simulate::{
    io as sim_io, replicate_seed, run_ensemble, EarlyRecurrence, Ensemble, EnsembleOptions, Simulator, StopRule,
};
use clonal_recur::{presets, AnalyticReport, Params};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{require, ExperimentConfig, Fig1Block, Fig2Block};
use crate::error::CliError;

/// What a subcommand produced: a summary for the manifest and the files it wrote.
pub struct Produced {
    pub summary: Value,
    pub outputs: Vec<String>,
}

pub struct Output {
    dir: PathBuf,
    written: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Output { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<(BufWriter<File>, PathBuf), CliError> {
        let path = self.dir.join(name);
        let file = File::create(&path).map_err(|e| CliError::io(&path, e))?;
        self.written.push(name.to_string());
        Ok((BufWriter::new(file), path))
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let (mut w, path) = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::io(&path, e))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<(), CliError> {
        let (w, _) = self.create(name)?;
        sim_io::write_rows(rows, w)?;
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let (mut w, path) = self.create(name)?;
        w.write_all(body.as_bytes()).and_then(|_| w.flush()).map_err(|e| CliError::io(&path, e))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn finish(self, summary: Value) -> Produced {
        Produced { summary, outputs: self.written }
    }
}

fn ensemble_summary(e: &Ensemble, sim: &Simulator) -> Value {
    json!({
        "zeta": sim.zeta(),
        "accepted": e.accepted,
        "attempted": e.attempted,
        "acceptance_rate": e.acceptance_rate(),
        "censored": e.censored,
        "budget_exhausted": e.budget_exhausted,
    })
}

fn check_budget(e: &Ensemble) -> Result<(), CliError> {
    if e.budget_exhausted {
        Err(CliError::Numeric(format!(
            "attempt budget exhausted after {} attempts with {} accepted; partial output written",
            e.attempted, e.accepted
        )))
    } else {
        Ok(())
    }
}

pub fn simulate(cfg: &ExperimentConfig, mut out: Output) -> Result<Produced, CliError> {
    let p = cfg.params()?;
    let seed = cfg.seed()?;
    let block = require(&cfg.simulate, "simulate")?;
    let sim = Simulator::new(p)?;
    let options = EnsembleOptions { attempt_budget: block.attempt_budget };
    let e = run_ensemble(&p, block.stop, block.replicates, seed, block.condition, &options)?;
    out.csv("runs.csv", sim_io::run_rows(&e))?;
    if block.write_clones {
        let (w, _) = out.create("clones.csv")?;
        sim_io::write_clones(&e, w)?;
    }
    let summary = ensemble_summary(&e, &sim);
    out.json("summary.json", &summary)?;
    check_budget(&e).map(|_| out.finish(summary))
}

#[derive(Serialize)]
struct CurveRow {
    y: f64,
    simpson_cond_limit: f64,
    clones_cond_limit: f64,
    theta_star: f64,
    ld_rate: f64,
}

fn write_reports(
    p: &Params,
    ys: &[f64],
    windows: &[(f64, f64)],
    cfg: &ExperimentConfig,
    out: &mut Output,
    stem: &str,
) -> Result<Vec<AnalyticReport>, CliError> {
    if ys.is_empty() {
        return Err(CliError::Config("y grid is empty".into()));
    }
    let reports = ys.iter().map(|&y| analyze(p, y, windows, &cfg.tolerances)).collect::<Result<Vec<_>, _>>()?;
    out.json(&format!("{stem}_report.json"), &reports)?;
    // Round through the report serializer so the curve matches the report digits.
    let rounded: Vec<Value> = reports.iter().map(|r| serde_json::to_value(r).expect("plain data")).collect();
    let rows = rounded.iter().map(|r| CurveRow {
        y: r["y"].as_f64().unwrap_or(f64::NAN),
        simpson_cond_limit: r["simpson_cond_limit"].as_f64().unwrap_or(f64::NAN),
        clones_cond_limit: r["clones_cond_limit"].as_f64().unwrap_or(f64::NAN),
        theta_star: r["theta_star"].as_f64().unwrap_or(f64::NAN),
        ld_rate: r["ld_rate"].as_f64().unwrap_or(f64::NAN),
    });
    out.csv(&format!("{stem}_curve.csv"), rows)?;
    Ok(reports)
}

pub fn analyze_cmd(cfg: &ExperimentConfig, mut out: Output) -> Result<Produced, CliError> {
    let p = cfg.params()?;
    let block = require(&cfg.analyze, "analyze")?;
    let reports = write_reports(&p, &block.y, &block.windows, cfg, &mut out, "analyze")?;
    Ok(out.finish(json!({ "points": reports.len(), "zeta": reports[0].zeta })))
}

pub fn fig2(cfg: &ExperimentConfig, mut out: Output) -> Result<Produced, CliError> {
    let p = match cfg.params {
        Some(_) => cfg.params()?,
        None => presets::base(1000),
    };
    let block = cfg.fig2.clone().unwrap_or_default();
    let Fig2Block { y } = block;
    let reports = write_reports(&p, &y, &[], cfg, &mut out, "fig2")?;
    Ok(out.finish(json!({ "points": reports.len() })))
}

#[derive(Serialize)]
struct EstimateReport {
    estimates: EstimateTriple<f64>,
    ci: clonal_recur::inference::BootstrapCi<f64>,
    n: u64,
    #[serde(rename = "M")]
    m: usize,
    moments: clonal_recur::inference::Moments<f64>,
    resamples: usize,
    inadmissible_resamples: usize,
}

pub fn estimate_cmd(cfg: &ExperimentConfig, mut out: Output) -> Result<Produced, CliError> {
    let block = require(&cfg.estimate, "estimate")?;
    let seed = cfg.seed()?;
    let n = match (block.n, cfg.params) {
        (Some(n), _) => n,
        (None, Some(_)) => cfg.params()?.n(),
        (None, None) => return Err(CliError::Config("estimate needs `estimate.n` or `params`".into())),
    };
    let file = File::open(&block.observations)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", block.observations.display())))?;
    let obs = read_observations(file)?;
    let estimates = estimate(&obs, n)?;
    let boot = bootstrap_observations(&obs, n, block.resamples, block.level, seed)?;
    let report = EstimateReport {
        estimates,
        ci: boot.ci,
        n,
        m: obs.len(),
        moments: sample_means(&obs)?,
        resamples: boot.resamples,
        inadmissible_resamples: boot.inadmissible,
    };
    out.json("estimate.json", &report)?;
    Ok(out.finish(json!({ "M": obs.len(), "inadmissible_resamples": boot.inadmissible })))
}

fn noiseless_table(p: &Params, m: usize, seed: u64, options: &clonal_recur::inference::ExperimentOptions) -> Result<EstimationTable, CliError> {
    let triple = estimate_from_moments(asymptotic_moments(p), p.n())?;
    let ci = bootstrap_ci(&[triple], options.resamples, options.level, seed)?;
    let row = |parameter, truth: f64, estimate: f64, lo: f64, hi: f64| ParameterRow {
        parameter,
        truth,
        estimate,
        ci_lo: lo,
        ci_hi: hi,
        bias: estimate - truth,
        relative_bias: (estimate - truth) / truth.abs(),
    };
    Ok(EstimationTable {
        rows: vec![
            row("mu_eff", p.mutation_rate_per_cell(), triple.mu_eff, ci.mu_eff.lo, ci.mu_eff.hi),
            row("lambda0", p.lambda0(), triple.lambda0_hat, ci.lambda0_hat.lo, ci.lambda0_hat.hi),
            row("lambda1", p.lambda1(), triple.lambda1_hat, ci.lambda1_hat.lo, ci.lambda1_hat.hi),
        ],
        estimates: vec![triple],
        ci,
        m,
        num_estimates: 1,
        master_seed: seed,
        censored: 0,
    })
}

fn format_table1(t: &EstimationTable, level: f64) -> String {
    let label = |name: &str| match name {
        "mu_eff" => "mu n^-alpha",
        "lambda0" => "lambda0",
        _ => "lambda1",
    };
    let mut s = format!(
        "Estimation of (mu n^-alpha, lambda0, lambda1): M = {}, {} estimates\n\n{:<12} {:>14} {:>14} {:>32}\n",
        t.m,
        t.num_estimates,
        "parameter",
        "true value",
        "estimate",
        format!("bootstrap {}% CI", level * 100.0)
    );
    for r in &t.rows {
        s.push_str(&format!(
            "{:<12} {:>14.6e} {:>14.6e} {:>32}\n",
            label(r.parameter),
            r.truth,
            r.estimate,
            format!("[{:.6e}, {:.6e}]", r.ci_lo, r.ci_hi)
        ));
    }
    if t.censored > 0 {
        s.push_str(&format!("\n{} censored runs excluded\n", t.censored));
    }
    s
}

pub fn table1(cfg: &ExperimentConfig, mut out: Output) -> Result<Produced, CliError> {
    let p = match cfg.params {
        Some(_) => cfg.params()?,
        None => presets::table1(),
    };
    let seed = cfg.seed()?;
    let block = require(&cfg.table1, "table1")?;
    if block.m == 0 || block.num_estimates == 0 {
        return Err(CliError::Config("table1: M and num_estimates must be positive".into()));
    }
    let options = block.options();
    let table = if block.noiseless {
        noiseless_table(&p, block.m, seed, &options)?
    } else {
        estimation_experiment(&p, block.m, block.num_estimates, seed, &options)?
    };
    out.json("table1.json", &table)?;
    out.text("table1.txt", &format_table1(&table, block.level))?;
    out.csv("table1_estimates.csv", table.estimates.iter())?;
    Ok(out.finish(json!({ "censored": table.censored, "rows": table.rows })))
}

#[derive(Serialize)]
struct Fig1Row {
    run_id: u64,
    seed: u64,
    censored: bool,
    gamma: Option<f64>,
    /// Clones generated up to and including the recurrence event.
    clones_at_recurrence: Option<u64>,
    /// Clones generated by the observation time `zeta - y` (conditional runs only).
    clones_at_margin: Option<u64>,
}

fn fig1_rows(e: &Ensemble, at_margin: bool) -> Vec<Fig1Row> {
    e.outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let gamma = o.recurrence_time();
            Fig1Row {
                run_id: i as u64,
                seed: o.seed,
                censored: o.recurrence.is_censored(),
                gamma,
                clones_at_recurrence: gamma.map(|g| o.clone_records.partition_point(|c| c.birth_time <= g) as u64),
                clones_at_margin: at_margin.then_some(o.clone_records.len() as u64),
            }
        })
        .collect()
}

fn mean_of(rows: &[Fig1Row]) -> f64 {
    let v: Vec<f64> = rows.iter().filter_map(|r| r.clones_at_recurrence).map(|c| c as f64).collect();
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

pub fn fig1(cfg: &ExperimentConfig, mut out: Output) -> Result<Produced, CliError> {
    let p = match cfg.params {
        Some(_) => cfg.params()?,
        None => presets::fig1(),
    };
    let seed = cfg.seed()?;
    let block = cfg.fig1.clone().unwrap_or_default();
    let Fig1Block { replicates, y, attempt_budget } = block;
    let sim = Simulator::new(p)?;
    let options = EnsembleOptions { attempt_budget };
    let uncond = run_ensemble(&p, StopRule::RecurrenceThreshold, replicates, seed, None, &options)?;
    let cond = run_ensemble(
        &p,
        StopRule::FixedTime(sim.zeta() - y),
        replicates,
        conditional_seed(seed),
        Some(EarlyRecurrence { y }),
        &options,
    )?;
    let (u_rows, c_rows) = (fig1_rows(&uncond, false), fig1_rows(&cond, true));
    let summary = json!({
        "y": y,
        "unconditional": ensemble_summary(&uncond, &sim),
        "conditional": ensemble_summary(&cond, &sim),
        "mean_clones_unconditional": mean_of(&u_rows),
        "mean_clones_conditional": mean_of(&c_rows),
    });
    out.csv("fig1_unconditional.csv", u_rows)?;
    out.csv("fig1_conditional.csv", c_rows)?;
    out.json("fig1_summary.json", &summary)?;
    check_budget(&cond).map(|_| out.finish(summary))
}

/// Master seed of the conditional `fig1` ensemble, kept apart from the unconditional streams.
pub fn conditional_seed(seed: u64) -> u64 {
    replicate_seed(seed, u64::MAX)
}
