//! Monte Carlo coverage of the confidence bands on the Gaussian example.
//!
//! Each replication draws a fresh sample with seed `derive_seed(master, i)`,
//! builds the band and checks that the population curves of the chosen
//! scorer lie inside it at every `k`, with the truth evaluated at `k / n`.
//! Replications run on the rayon pool and are collected in index order, so
//! the report does not depend on the number of threads.

use rayon::prelude::*;

use pvbounds::analytic::{analytic_curves, sample_dataset, GaussianExampleConfig, Scorer};
use pvbounds::rng::derive_seed;
use pvbounds::{build_band, compute_curves, BandConfig, BandMode, Complexity};

use crate::error::{CliError, Result};
use crate::io::{Cell, Table, ToTable};

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageConfig {
    pub n: usize,
    pub d: u32,
    pub delta: f64,
    pub reps: usize,
    pub master_seed: u64,
    pub mode: BandMode,
    pub scorer: Scorer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replication {
    pub seed: u64,
    /// Truth inside the band at every `k`.
    pub covered: bool,
    pub ppv_misses: usize,
    pub npv_misses: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport {
    pub config: CoverageConfig,
    pub replications: Vec<Replication>,
    /// Fraction of replications covered at every `k` simultaneously.
    pub coverage: f64,
    /// Per `k = 1..n-1`: fraction of replications whose ppv band holds the truth.
    pub ppv_marginal: Vec<f64>,
    pub npv_marginal: Vec<f64>,
    /// Per `k`: fraction with both curves inside.
    pub marginal: Vec<f64>,
}

struct Outcome {
    replication: Replication,
    ppv_hit: Vec<bool>,
    npv_hit: Vec<bool>,
}

pub fn coverage_experiment(config: &CoverageConfig) -> Result<CoverageReport> {
    if config.reps == 0 {
        return Err(CliError::Invalid("reps must be >= 1".into()));
    }
    let n = config.n;
    let band_config = BandConfig {
        delta: config.delta,
        mode: config.mode.clone(),
    };
    GaussianExampleConfig {
        d: config.d,
        scorer: config.scorer,
        seed: 0,
        n,
    }
    .validate()?;
    band_config.validate(n)?;

    let truth = (1..n)
        .map(|k| analytic_curves(k as f64 / n as f64, config.d))
        .collect::<pvbounds::Result<Vec<_>>>()?;

    let outcomes = (0..config.reps)
        .into_par_iter()
        .map(|i| -> Result<Outcome> {
            let seed = derive_seed(config.master_seed, i as u64);
            let dataset = sample_dataset(&GaussianExampleConfig {
                d: config.d,
                scorer: config.scorer,
                seed,
                n,
            })?;
            let band = build_band(&compute_curves(&dataset), &band_config)?;
            let ppv_hit: Vec<bool> = band
                .rows
                .iter()
                .zip(&truth)
                .map(|(r, t)| r.ppv_contains(t.ppv(config.scorer)))
                .collect();
            let npv_hit: Vec<bool> = band
                .rows
                .iter()
                .zip(&truth)
                .map(|(r, t)| r.npv_contains(t.npv(config.scorer)))
                .collect();
            let ppv_misses = ppv_hit.iter().filter(|h| !**h).count();
            let npv_misses = npv_hit.iter().filter(|h| !**h).count();
            Ok(Outcome {
                replication: Replication {
                    seed,
                    covered: ppv_misses == 0 && npv_misses == 0,
                    ppv_misses,
                    npv_misses,
                },
                ppv_hit,
                npv_hit,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let reps = config.reps as f64;
    let fraction = |count: usize| count as f64 / reps;
    let column = |f: &dyn Fn(&Outcome, usize) -> bool| -> Vec<f64> {
        (0..n - 1)
            .map(|j| fraction(outcomes.iter().filter(|o| f(o, j)).count()))
            .collect()
    };
    let ppv_marginal = column(&|o, j| o.ppv_hit[j]);
    let npv_marginal = column(&|o, j| o.npv_hit[j]);
    let marginal = column(&|o, j| o.ppv_hit[j] && o.npv_hit[j]);
    let replications: Vec<Replication> = outcomes.into_iter().map(|o| o.replication).collect();
    let coverage = fraction(replications.iter().filter(|r| r.covered).count());
    Ok(CoverageReport {
        config: config.clone(),
        replications,
        coverage,
        ppv_marginal,
        npv_marginal,
        marginal,
    })
}

fn mode_description(mode: &BandMode) -> String {
    match mode {
        BandMode::Fixed => "fixed".into(),
        BandMode::Uniform(Complexity::VcDimension(d)) => format!("uniform (VC dimension {d})"),
        BandMode::Uniform(Complexity::Theta(_)) => "uniform (order-coefficient table)".into(),
    }
}

impl ToTable for CoverageReport {
    /// Per-`k` marginal coverage; the simultaneous coverage fraction is
    /// repeated in the last column. JSON output adds the configuration and
    /// the per-replication results.
    fn to_table(&self) -> Table {
        let c = &self.config;
        let n = c.n as f64;
        let replications = self
            .replications
            .iter()
            .enumerate()
            .map(|(i, r)| {
                format!(
                    "{{\"rep\": {i}, \"seed\": {}, \"covered\": {}, \"ppv_misses\": {}, \"npv_misses\": {}}}",
                    r.seed, r.covered, r.ppv_misses, r.npv_misses
                )
            })
            .collect::<Vec<_>>()
            .join(", ");
        Table {
            meta: vec![
                ("n", Cell::Int(c.n as u64)),
                ("d", Cell::Int(c.d.into())),
                ("delta", Cell::Num(c.delta)),
                ("reps", Cell::Int(c.reps as u64)),
                ("master_seed", Cell::Int(c.master_seed)),
                ("mode", Cell::Text(mode_description(&c.mode))),
                ("scorer", Cell::Text(c.scorer.name().into())),
                ("coverage", Cell::Num(self.coverage)),
            ],
            meta_json: vec![("replications", format!("[{replications}]"))],
            columns: vec!["k", "alpha", "ppv_marginal", "npv_marginal", "marginal", "simultaneous"],
            rows: (0..self.marginal.len())
                .map(|j| {
                    vec![
                        Cell::Int(j as u64 + 1),
                        Cell::Num((j + 1) as f64 / n),
                        Cell::Num(self.ppv_marginal[j]),
                        Cell::Num(self.npv_marginal[j]),
                        Cell::Num(self.marginal[j]),
                        Cell::Num(self.coverage),
                    ]
                })
                .collect(),
        }
    }
}
