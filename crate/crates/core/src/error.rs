use thiserror::Error;

use crate::model::MinerId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid market config: {0}")]
    InvalidConfig(String),

    #[error("invalid miner {id}: {reason}")]
    InvalidMiner { id: MinerId, reason: String },

    #[error("duplicate miner id {0}")]
    DuplicateMiner(MinerId),

    #[error("unknown miner id {0}")]
    UnknownMiner(MinerId),

    #[error("{what} = {value} is outside [0, 1]")]
    Domain { what: &'static str, value: f64 },

    #[error("miner {id} demands {demand}, but constant-demand auctions require q = {q}")]
    NotConstantDemand { id: MinerId, demand: f64, q: f64 },

    #[error("miner {0} is already in the base set")]
    AlreadyInSet(MinerId),

    #[error("miner {0} is not a winner")]
    NotWinner(MinerId),

    #[error("network-effects coefficient {coefficient} is not positive at total demand {total_demand}; cannot price")]
    Singularity { coefficient: f64, total_demand: f64 },

    #[error("payment for miner {id} came out negative ({payment})")]
    NegativePayment { id: MinerId, payment: f64 },

    #[error("instance has {n} miners, exhaustive search is capped at {max}")]
    TooLarge { n: usize, max: usize },

    #[error("unknown mechanism `{0}`")]
    UnknownMechanism(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}
