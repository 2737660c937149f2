//! Seeded Monte Carlo sweeps and their CSV form.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use contreg_core::{
    run_continual, sample_ordering, MetricsRecord, OrderingKind, SchemeKind, Seed, TaskCollection,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};

/// Final-iterate metrics of one `(k, trial)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: String,
    pub schedule: String,
    pub ordering: String,
    #[serde(rename = "M")]
    pub tasks: usize,
    pub d: usize,
    #[serde(rename = "R")]
    pub radius: f64,
    pub k: usize,
    pub trial: u32,
    /// Generator stream of the trial under `base_seed`.
    pub seed: u64,
    pub avg_loss: f64,
    pub seen_loss: f64,
    pub degradation: f64,
    pub dist_to_wstar: f64,
}

pub const CSV_HEADER: [&str; 13] = [
    "scheme",
    "schedule",
    "ordering",
    "M",
    "d",
    "R",
    "k",
    "trial",
    "seed",
    "avg_loss",
    "seen_loss",
    "degradation",
    "dist_to_wstar",
];

/// Runs the sweep over an already built collection.
pub fn run_on_collection(cfg: &ExperimentConfig, collection: &TaskCollection) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let w0 = cfg.init.resolve(collection)?;
    let w_star = collection.joint_solution();
    let kind = SchemeKind::from(cfg.scheme);
    let ordering_kind = OrderingKind::from(cfg.ordering);
    let r = collection.radius();
    let base = Seed::new(cfg.base_seed);

    let schedules = cfg
        .k_grid
        .iter()
        .map(|&k| {
            cfg.schedule
                .build(r, k)
                .map(|s| s.with_unregularized_first(cfg.unregularized_first))
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, u32)> = (0..cfg.k_grid.len())
        .flat_map(|i| (0..cfg.trials).map(move |t| (i, t)))
        .collect();

    jobs.par_iter()
        .map(|&(i, trial)| {
            let k = cfg.k_grid[i];
            let seed = base.split(k as u32, trial);
            let ordering = sample_ordering(ordering_kind, collection.len(), k, seed)?;
            let traj = run_continual(collection, &ordering, &schedules[i], kind, Some(&w0))?;
            let m = MetricsRecord::measure(&traj, collection, &w_star)?;
            Ok(ResultRow {
                scheme: kind.name().to_owned(),
                schedule: cfg.schedule.name().to_owned(),
                ordering: ordering_kind.name().to_owned(),
                tasks: collection.len(),
                d: collection.dim(),
                radius: r,
                k,
                trial,
                seed: seed.stream,
                avg_loss: m.avg_loss,
                seen_loss: m.seen_loss,
                degradation: m.degradation,
                dist_to_wstar: m.dist_to_wstar,
            })
        })
        .collect()
}

/// Builds the collection from `cfg` and runs the sweep. Rows come out sorted
/// by `(k, trial)` regardless of thread count.
pub fn run_experiment(cfg: &ExperimentConfig, base_dir: Option<&Path>) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let collection = cfg.collection(base_dir)?;
    run_on_collection(cfg, &collection)
}

/// Runs `f` on a pool capped at `threads` workers (global pool when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(f)),
        None => Ok(f()),
    }
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scheme.clone(),
            r.schedule.clone(),
            r.ordering.clone(),
            r.tasks.to_string(),
            r.d.to_string(),
            float(r.radius),
            r.k.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            float(r.avg_loss),
            float(r.seen_loss),
            float(r.degradation),
            float(r.dist_to_wstar),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("<csv output>", e))?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(HarnessError::config(format!(
            "unexpected CSV header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

/// Which per-row quantity to aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    AvgLoss,
    SeenLoss,
    Degradation,
    DistToWstar,
}

impl Metric {
    pub fn of(self, row: &ResultRow) -> f64 {
        match self {
            Metric::AvgLoss => row.avg_loss,
            Metric::SeenLoss => row.seen_loss,
            Metric::Degradation => row.degradation,
            Metric::DistToWstar => row.dist_to_wstar,
        }
    }
}

/// Per-`k` mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub k: usize,
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation over `√n`; 0 for a single trial.
    pub se: f64,
}

pub fn aggregate(rows: &[ResultRow], metric: Metric) -> Vec<Aggregate> {
    let mut by_k: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in rows {
        by_k.entry(row.k).or_default().push(metric.of(row));
    }
    by_k.into_iter()
        .map(|(k, xs)| {
            let n = xs.len();
            let mean = xs.iter().sum::<f64>() / n as f64;
            let se = if n > 1 {
                let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                (var / n as f64).sqrt()
            } else {
                0.0
            };
            Aggregate { k, n, mean, se }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CollectionSource, GeneratedCollection, Init, OrderingName, ScheduleConfig, SchemeName};

    fn config(k_grid: Vec<usize>, trials: u32) -> ExperimentConfig {
        ExperimentConfig {
            collection: CollectionSource::Generated(GeneratedCollection {
                dim: 5,
                tasks: 4,
                rows: 2,
                radius: 1.0,
                seed: 3,
            }),
            scheme: SchemeName::Regularized,
            schedule: ScheduleConfig::IncreasingCoefficient,
            ordering: OrderingName::WithReplacement,
            k_grid,
            trials,
            base_seed: 17,
            output: None,
            init: Init::Zero,
            unregularized_first: false,
        }
    }

    fn csv_bytes(rows: &[ResultRow]) -> Vec<u8> {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf).unwrap();
        buf
    }

    #[test]
    fn two_trials_reproduce_byte_for_byte() {
        let cfg = config(vec![4], 2);
        let a = run_experiment(&cfg, None).unwrap();
        let b = with_threads(Some(3), || run_experiment(&cfg, None)).unwrap().unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(csv_bytes(&a), csv_bytes(&b));
    }

    #[test]
    fn grid_rows_sorted_by_k_and_trial() {
        let rows = run_experiment(&config(vec![4, 8], 1), None).unwrap();
        assert_eq!(rows.iter().map(|r| r.k).collect::<Vec<_>>(), vec![4, 8]);
        let rows = run_experiment(&config(vec![3, 5, 9], 3), None).unwrap();
        let keys: Vec<(usize, u32)> = rows.iter().map(|r| (r.k, r.trial)).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        assert_eq!(keys, sorted);
        assert_eq!(rows.len(), 9);
    }

    #[test]
    fn starting_at_solution_gives_zero_loss() {
        let mut cfg = config(vec![4, 6], 3);
        cfg.init = Init::Planted;
        for row in run_experiment(&cfg, None).unwrap() {
            assert!(row.avg_loss < 1e-28, "{}", row.avg_loss);
            assert!(row.dist_to_wstar < 1e-14, "{}", row.dist_to_wstar);
        }
    }

    #[test]
    fn csv_round_trips_losslessly() {
        let rows = run_experiment(&config(vec![4, 8], 3), None).unwrap();
        let bytes = csv_bytes(&rows);
        let header = std::str::from_utf8(&bytes).unwrap().lines().next().unwrap();
        assert_eq!(header, CSV_HEADER.join(","));
        assert_eq!(read_csv(bytes.as_slice()).unwrap(), rows);
    }

    #[test]
    fn aggregate_mean_and_se() {
        let mut rows = run_experiment(&config(vec![4], 3), None).unwrap();
        for (row, v) in rows.iter_mut().zip([1.0, 2.0, 3.0]) {
            row.avg_loss = v;
        }
        let agg = aggregate(&rows, Metric::AvgLoss);
        assert_eq!(agg.len(), 1);
        assert_eq!(agg[0].mean, 2.0);
        assert!((agg[0].se - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }
}
