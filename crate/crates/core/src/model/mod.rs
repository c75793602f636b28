//! Domain types and the economic model of mining with rented resources.

mod config;
mod economics;
mod instance;
mod outcome;
mod welfare;

pub use config::{MarketConfig, CONFIG_KEYS};
pub(crate) use economics::ex_post_at;
pub use economics::{
    allocated_demand, ex_post_valuation, hash_power, marginal_density, network_effects, reward_probability,
    set_welfare, truthful_bid, unit_reward,
};
pub use instance::{Instance, Miner, MinerId};
pub use outcome::AuctionOutcome;
pub use welfare::{Coalition, DensityBase, DensityKernel, DensityTerms};
