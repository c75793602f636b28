//! Common interface over the auction mechanisms and a by-name registry.
//!
//! Every mechanism splits into winner selection and per-winner pricing so
//! that sweeps can skip pricing and probes can price a single deviating
//! bidder without recomputing every payment.

use std::collections::BTreeMap;
use std::fmt;

use crate::baselines::{BruteForce, LocalSearch, SearchParams};
use crate::cdb::ConstantDemand;
use crate::error::{Error, Result};
use crate::mdb::MultiDemand;
use crate::model::{AuctionOutcome, Instance};

/// How a mechanism expects bidders' demands to be drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DemandMode {
    /// Every miner demands `q`.
    Constant,
    /// Demands uniform on `[beta1*D, beta2*D]`.
    Multi,
}

impl fmt::Display for DemandMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DemandMode::Constant => "constant",
            DemandMode::Multi => "multi",
        })
    }
}

pub trait Mechanism: Send + Sync {
    fn name(&self) -> &'static str;

    /// Demand regime the mechanism is designed for.
    fn demand_mode(&self) -> DemandMode;

    /// Winner positions (indices into `inst.miners()`) in selection order.
    fn select(&self, inst: &Instance) -> Result<Vec<usize>>;

    /// Payment of the winner at `idx`, given the full winner selection.
    fn payment(&self, inst: &Instance, winners: &[usize], idx: usize) -> Result<f64>;

    /// Smallest bid with which the winner at `idx` keeps winning, for
    /// mechanisms that price through one.
    fn critical_bid(&self, _inst: &Instance, _winners: &[usize], _idx: usize) -> Option<Result<f64>> {
        None
    }

    fn run(&self, inst: &Instance) -> Result<AuctionOutcome> {
        let winners = self.select(inst)?;
        let mut payments = vec![0.0; inst.len()];
        for &w in &winners {
            payments[w] = self.payment(inst, &winners, w)?;
        }
        Ok(AuctionOutcome::from_winners(inst, &winners, payments))
    }
}

/// Mechanisms keyed by name.
#[derive(Default)]
pub struct Registry {
    entries: BTreeMap<&'static str, Box<dyn Mechanism>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `mechanism` under its own name, replacing any previous entry.
    pub fn register(&mut self, mechanism: Box<dyn Mechanism>) -> &mut Self {
        self.entries.insert(mechanism.name(), mechanism);
        self
    }

    pub fn get(&self, name: &str) -> Result<&dyn Mechanism> {
        self.entries
            .get(name)
            .map(|m| m.as_ref())
            .ok_or_else(|| Error::UnknownMechanism(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

/// The four built-in mechanisms: `cdb`, `mdb`, `frls` and `brute`.
pub fn builtin() -> Registry {
    let mut registry = Registry::new();
    registry
        .register(Box::new(ConstantDemand))
        .register(Box::new(MultiDemand))
        .register(Box::new(LocalSearch::new(SearchParams::default())))
        .register(Box::new(BruteForce::new(SearchParams::default())));
    registry
}
