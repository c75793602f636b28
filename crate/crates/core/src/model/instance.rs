use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::MarketConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MinerId(pub u32);

impl fmt::Display for MinerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// One single-minded bidder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Miner {
    pub id: MinerId,
    /// Block size in data units.
    pub block_size: f64,
    /// Requested resource units; all or nothing.
    pub demand: f64,
    /// Reported bid in tokens.
    pub bid: f64,
}

impl Miner {
    /// A miner bidding its ex-ante valuation.
    pub fn truthful(id: u32, block_size: f64, demand: f64, cfg: &MarketConfig) -> Self {
        Self {
            id: MinerId(id),
            block_size,
            demand,
            bid: super::truthful_bid(block_size, demand, cfg),
        }
    }

    fn validate(&self) -> Result<()> {
        let reason = if !(self.block_size.is_finite() && self.block_size > 0.0) {
            "block size must be positive"
        } else if !(self.demand.is_finite() && self.demand > 0.0) {
            "demand must be positive"
        } else if !(self.bid.is_finite() && self.bid >= 0.0) {
            "bid must be non-negative"
        } else {
            return Ok(());
        };
        Err(Error::InvalidMiner {
            id: self.id,
            reason: reason.into(),
        })
    }
}

/// A market configuration plus the ordered bidders of one auction.
///
/// Miner order is the canonical index order; mechanisms refer to miners by
/// position internally and break remaining ties by ascending id.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    config: MarketConfig,
    miners: Vec<Miner>,
}

impl Instance {
    pub fn new(config: MarketConfig, miners: Vec<Miner>) -> Result<Self> {
        config.validate()?;
        let mut seen = HashSet::with_capacity(miners.len());
        for m in &miners {
            m.validate()?;
            if !seen.insert(m.id) {
                return Err(Error::DuplicateMiner(m.id));
            }
        }
        Ok(Self { config, miners })
    }

    pub fn config(&self) -> &MarketConfig {
        &self.config
    }

    pub fn miners(&self) -> &[Miner] {
        &self.miners
    }

    pub fn len(&self) -> usize {
        self.miners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.miners.is_empty()
    }

    pub fn index_of(&self, id: MinerId) -> Result<usize> {
        self.miners
            .iter()
            .position(|m| m.id == id)
            .ok_or(Error::UnknownMiner(id))
    }

    pub fn indices_of(&self, ids: &[MinerId]) -> Result<Vec<usize>> {
        ids.iter().map(|&id| self.index_of(id)).collect()
    }

    pub fn miner(&self, id: MinerId) -> Result<&Miner> {
        self.index_of(id).map(|i| &self.miners[i])
    }

    /// Copy of this instance with the miner at `idx` replaced.
    pub fn with_miner(&self, idx: usize, miner: Miner) -> Result<Self> {
        let mut miners = self.miners.clone();
        miners[idx] = miner;
        Self::new(self.config, miners)
    }

    /// Copy with the miner at `idx` reporting a different bid.
    pub fn with_bid(&self, idx: usize, bid: f64) -> Result<Self> {
        let miner = Miner {
            bid,
            ..self.miners[idx]
        };
        self.with_miner(idx, miner)
    }

    /// Copy with a different market configuration.
    pub fn with_config(&self, config: MarketConfig) -> Result<Self> {
        Self::new(config, self.miners.clone())
    }

    pub fn total_demand(&self) -> f64 {
        self.miners.iter().map(|m| m.demand).sum()
    }

    /// `true` when every miner demands exactly `q`.
    pub fn is_constant_demand(&self) -> bool {
        self.miners.iter().all(|m| m.demand == self.config.constant_demand)
    }
}
