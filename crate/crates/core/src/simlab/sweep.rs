use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;

use super::{gen_instance, mix_seed, Summary};
use crate::error::{Error, Result};
use crate::mechanism::{self, DemandMode, Registry};
use crate::model::MarketConfig;

/// Quantity varied across the grid of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepParameter {
    /// Number of miners `N`.
    Miners,
    /// Unit cost `c`.
    UnitCost,
    /// Fixed bonus `T`.
    FixedBonus,
    /// Fee rate `r`.
    FeeRate,
    /// Block time `lambda`.
    BlockTime,
    /// Demand dispersion `theta`: demands uniform on `[q - theta*D, q + theta*D]`.
    Dispersion,
    /// Nothing varies; each grid value is a replicate label.
    None,
}

impl SweepParameter {
    pub const ALL: [SweepParameter; 7] = [
        Self::Miners,
        Self::UnitCost,
        Self::FixedBonus,
        Self::FeeRate,
        Self::BlockTime,
        Self::Dispersion,
        Self::None,
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Self::Miners => "N",
            Self::UnitCost => "c",
            Self::FixedBonus => "T",
            Self::FeeRate => "r",
            Self::BlockTime => "lambda",
            Self::Dispersion => "theta",
            Self::None => "none",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.key() == s)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown sweep parameter `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Registered mechanism name.
    pub mechanism: String,
    pub mode: DemandMode,
    /// Base market; the swept parameter is overwritten per grid point.
    pub config: MarketConfig,
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    /// Miner count, unless `N` is the swept parameter.
    pub miners: usize,
    /// Instances per grid point.
    pub instances: usize,
    pub master_seed: u64,
    /// Reuse the same instance seeds at every grid point, so that grid
    /// points differ only in the swept parameter.
    pub common_random_numbers: bool,
}

/// Aggregates for one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub welfare: Summary,
    pub satisfaction: Summary,
    /// Seed from which this point's instance seeds were derived.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub mechanism: String,
    pub parameter: SweepParameter,
    pub points: Vec<SweepPoint>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSweep(msg));
        if self.grid.is_empty() {
            return bad("grid is empty".into());
        }
        if self.instances == 0 {
            return bad("need at least one instance per grid point".into());
        }
        for &v in &self.grid {
            self.point(v)?;
        }
        Ok(())
    }

    /// Market config and miner count at grid value `v`.
    pub fn point(&self, v: f64) -> Result<(MarketConfig, usize)> {
        let mut cfg = self.config;
        let mut n = self.miners;
        let invalid = |msg: String| Error::InvalidSweep(msg);
        if !v.is_finite() {
            return Err(invalid(format!("grid value {v} is not finite")));
        }
        match self.parameter {
            SweepParameter::Miners => {
                if v < 1.0 || v.fract() != 0.0 {
                    return Err(invalid(format!("N must be a positive integer, got {v}")));
                }
                n = v as usize;
            }
            SweepParameter::UnitCost => cfg.unit_cost = v,
            SweepParameter::FixedBonus => cfg.fixed_bonus = v,
            SweepParameter::FeeRate => cfg.fee_rate = v,
            SweepParameter::BlockTime => cfg.block_time = v,
            SweepParameter::Dispersion => {
                let center = cfg.constant_demand / cfg.supply;
                let limit = center.min(1.0 - center);
                if !(0.0..=limit).contains(&v) {
                    return Err(invalid(format!("theta must lie in [0, {limit}], got {v}")));
                }
                cfg.beta1 = (center - v).max(0.0);
                cfg.beta2 = center + v;
            }
            SweepParameter::None => {}
        }
        if n == 0 {
            return Err(invalid("miner count must be positive".into()));
        }
        cfg.validate()
            .map_err(|e| invalid(format!("{} = {v}: {e}", self.parameter)))?;
        Ok((cfg, n))
    }

    /// Seed of grid point `index`.
    pub fn point_seed(&self, index: usize) -> u64 {
        if self.common_random_numbers {
            self.master_seed
        } else {
            mix_seed(self.master_seed, index as u64)
        }
    }
}

pub fn instance_seed(point_seed: u64, instance: usize) -> u64 {
    mix_seed(point_seed, instance as u64 ^ 0xA5A5_0000_0000_0000)
}

/// Runs a sweep with the built-in mechanisms.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, &mechanism::builtin())
}

/// Runs `spec.instances` independent auctions per grid point (winner
/// selection only) and aggregates welfare and satisfaction rate.
///
/// Instances run on the current rayon pool; results are gathered in index
/// order, so the output is identical for any number of workers.
pub fn run_sweep_with(spec: &SweepSpec, registry: &Registry) -> Result<SweepResult> {
    spec.validate()?;
    let mechanism = registry.get(&spec.mechanism)?;
    let mut points = Vec::with_capacity(spec.grid.len());
    for (g, &value) in spec.grid.iter().enumerate() {
        let (cfg, n) = spec.point(value)?;
        let seed = spec.point_seed(g);
        let samples: Vec<(f64, f64)> = (0..spec.instances)
            .into_par_iter()
            .map(|k| {
                let inst = gen_instance(&cfg, n, spec.mode, instance_seed(seed, k))?;
                let winners = mechanism.select(&inst)?;
                let welfare = crate::model::Coalition::of(&inst, winners.iter().copied()).welfare(&cfg);
                Ok((welfare, winners.len() as f64 / n as f64))
            })
            .collect::<Result<_>>()?;
        let (welfare, satisfaction): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        points.push(SweepPoint {
            value,
            welfare: Summary::of(&welfare),
            satisfaction: Summary::of(&satisfaction),
            seed,
        });
    }
    Ok(SweepResult {
        mechanism: spec.mechanism.clone(),
        parameter: spec.parameter,
        points,
    })
}

impl SweepResult {
    pub const CSV_HEADER: &'static str = "parameter_value,mean_welfare,ci_halfwidth,mean_satisfaction,K,seed";

    /// One row per grid point, in grid order.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.value, p.welfare.mean, p.welfare.ci_halfwidth, p.satisfaction.mean, p.welfare.count, p.seed
            )?;
        }
        Ok(())
    }

    pub fn mean_welfares(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.welfare.mean).collect()
    }

    pub fn mean_satisfactions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.satisfaction.mean).collect()
    }
}
