//! Named experiment layouts: the miner-count table, the parameter figures
//! and the single-miner utility curve.

use super::{SweepParameter, SweepSpec};
use crate::error::{Error, Result};
use crate::mechanism::DemandMode;
use crate::model::MarketConfig;

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_190_417;

/// Instances per grid point in the figure experiments.
pub const DEFAULT_INSTANCES: usize = 600;

pub const PRESET_NAMES: [&str; 8] = [
    "table3",
    "fig3",
    "fig4c",
    "fig4T",
    "fig4r",
    "fig4lambda",
    "fig5a",
    "fig5b",
];

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Sweep(SweepLayout),
    UtilityCurve(CurveLayout),
}

/// Grid half of a sweep; mechanism, market and seeds come from the caller.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepLayout {
    pub parameter: SweepParameter,
    pub grid: Vec<f64>,
    pub miners: usize,
}

impl SweepLayout {
    pub fn into_spec(
        self,
        mechanism: &str,
        mode: DemandMode,
        config: MarketConfig,
        instances: usize,
        master_seed: u64,
    ) -> SweepSpec {
        SweepSpec {
            mechanism: mechanism.to_string(),
            mode,
            config,
            parameter: self.parameter,
            grid: self.grid,
            miners: self.miners,
            instances,
            master_seed,
            common_random_numbers: true,
        }
    }
}

/// Utility of one miner against a fixed random population, as its true
/// demand varies, at two block-size levels.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveLayout {
    pub miners: usize,
    pub target: u32,
    pub block_sizes: Vec<f64>,
    pub demands: Vec<f64>,
}

fn steps(start: f64, step: f64, count: usize) -> Vec<f64> {
    // Multiplying instead of accumulating keeps grid values exact decimals.
    (0..count)
        .map(|k| ((start + step * k as f64) * 1e9).round() / 1e9)
        .collect()
}

pub fn preset(name: &str) -> Result<Preset> {
    let sweep = |parameter, grid, miners| {
        Ok(Preset::Sweep(SweepLayout {
            parameter,
            grid,
            miners,
        }))
    };
    let n = 300;
    match name {
        "table3" => sweep(SweepParameter::Miners, vec![10.0, 15.0, 20.0, 25.0], n),
        "fig3" => sweep(SweepParameter::Miners, steps(50.0, 50.0, 10), n),
        "fig4c" => sweep(SweepParameter::UnitCost, steps(0.0005, 0.0005, 10), n),
        "fig4T" => sweep(SweepParameter::FixedBonus, steps(5.0, 5.0, 5), n),
        "fig4r" => sweep(SweepParameter::FeeRate, vec![0.001, 0.005, 0.01, 0.015, 0.02], n),
        "fig4lambda" => sweep(SweepParameter::BlockTime, steps(5.0, 5.0, 12), n),
        "fig5b" => sweep(SweepParameter::Dispersion, steps(0.0, 0.002, 6), n),
        "fig5a" => Ok(Preset::UtilityCurve(CurveLayout {
            miners: n,
            target: 120,
            block_sizes: vec![300.0, 1000.0],
            demands: steps(1.0, 0.5, 39),
        })),
        other => Err(Error::InvalidSweep(format!(
            "unknown preset `{other}` (known: {})",
            PRESET_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_name_resolves() {
        for name in PRESET_NAMES {
            preset(name).unwrap();
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn grids_are_valid_for_defaults() {
        for name in PRESET_NAMES {
            if let Preset::Sweep(layout) = preset(name).unwrap() {
                let spec = layout.into_spec("mdb", DemandMode::Multi, MarketConfig::default(), 1, DEFAULT_SEED);
                spec.validate().unwrap();
            }
        }
    }

    #[test]
    fn curve_grid() {
        let Preset::UtilityCurve(c) = preset("fig5a").unwrap() else {
            panic!()
        };
        assert_eq!(c.demands.first(), Some(&1.0));
        assert_eq!(c.demands.last(), Some(&20.0));
        assert!(c.demands.iter().all(|&d| d > 0.0));
    }
}
