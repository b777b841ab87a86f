use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::{compute_metrics, Metrics, RunConfig, Simulator, SweepAxis, TrialRecord};
use crate::error::SimError;

/// Output columns, in order.
pub const CSV_COLUMNS: [&str; 17] = [
    "sweep_param",
    "sweep_value",
    "trials",
    "Ka",
    "M",
    "L",
    "J",
    "S",
    "B",
    "ebn0_db",
    "decoder",
    "p_md",
    "p_fa",
    "pe",
    "ci_half_width",
    "wall_seconds",
    "seed",
];

/// One aggregated operating point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis: Option<SweepAxis>,
    pub value: f64,
    pub config: RunConfig,
    pub metrics: Metrics,
    pub wall_seconds: f64,
}

impl SweepRow {
    fn record(&self) -> Vec<String> {
        let cfg = &self.config;
        let profile = cfg.profile().expect("validated config");
        let (param, value) = match self.axis {
            None => ("none".to_string(), String::new()),
            Some(SweepAxis::Ebn0Db) => ("ebn0_db".to_string(), self.value.to_string()),
            Some(axis) => (axis.name().to_string(), format!("{}", self.value as u64)),
        };
        let wall = if cfg.run.record_timing {
            format!("{:.3}", self.wall_seconds)
        } else {
            "0".to_string()
        };
        vec![
            param,
            value,
            self.metrics.trials.to_string(),
            cfg.users.active.to_string(),
            cfg.system.num_antennas.to_string(),
            cfg.system.slot_len.to_string(),
            cfg.system.bits_per_slot.to_string(),
            cfg.num_slots().to_string(),
            profile.payload_bits().to_string(),
            cfg.system.ebn0_db.to_string(),
            cfg.decoder.method.to_string(),
            self.metrics.p_md.to_string(),
            self.metrics.p_fa.to_string(),
            self.metrics.pe.to_string(),
            self.metrics.ci_half_width.to_string(),
            wall,
            cfg.run.seed.to_string(),
        ]
    }
}

pub fn write_csv_header<W: Write>(out: &mut csv::Writer<W>) -> Result<(), SimError> {
    out.write_record(CSV_COLUMNS)?;
    out.flush()?;
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, SimError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| SimError::Pool(e.to_string()))
}

fn trials_on(pool: &rayon::ThreadPool, sim: &Simulator) -> Result<Vec<TrialRecord>, SimError> {
    let n = sim.config().run.trials as u64;
    // collect keeps trial order regardless of scheduling
    pool.install(|| (0..n).into_par_iter().map(|t| sim.run_trial(t)).collect())
}

/// Runs every trial of one operating point.
pub fn run_point(sim: &Simulator) -> Result<(Metrics, Vec<TrialRecord>), SimError> {
    let records = trials_on(&pool(sim.config().run.workers)?, sim)?;
    Ok((compute_metrics(&records), records))
}

/// Runs the configured sweep (or the single configured point when there is
/// none) and appends one CSV row per point as soon as it is finished.
pub fn run_sweep<W: Write>(config: &RunConfig, out: W) -> Result<Vec<SweepRow>, SimError> {
    config.validate()?;
    let mut writer = csv::Writer::from_writer(out);
    write_csv_header(&mut writer)?;
    let pool = pool(config.run.workers)?;
    let points: Vec<(Option<SweepAxis>, f64)> = match &config.sweep {
        Some(sweep) => sweep.values.iter().map(|&v| (Some(sweep.axis), v)).collect(),
        None => vec![(None, f64::NAN)],
    };
    let base = Simulator::new(config)?;
    let mut rows = Vec::with_capacity(points.len());
    for (axis, value) in points {
        let point_cfg = match axis {
            Some(axis) => config.at(axis, value)?,
            None => config.clone(),
        };
        let sim = base.with_config(&point_cfg)?;
        let start = Instant::now();
        let records = trials_on(&pool, &sim)?;
        let row = SweepRow {
            axis,
            value,
            config: point_cfg,
            metrics: compute_metrics(&records),
            wall_seconds: start.elapsed().as_secs_f64(),
        };
        log::info!(
            "{}={} pe={:.4} (md {:.4}, fa {:.4}) in {:.1}s",
            axis.map_or("point", SweepAxis::name),
            value,
            row.metrics.pe,
            row.metrics.p_md,
            row.metrics.p_fa,
            row.wall_seconds
        );
        writer.write_record(row.record())?;
        writer.flush()?;
        rows.push(row);
    }
    Ok(rows)
}
