//! Truthful auctions for selling cloud/fog computing resources to
//! proof-of-work miners, together with the simulation harness used to
//! study them.
//!
//! Mechanisms:
//!
//! * [`cdb`]: constant-demand miners; optimal greedy selection with
//!   externality-aware VCG payments.
//! * [`mdb`]: multi-demand single-minded miners; greedy selection by marginal
//!   welfare density with critical-bid pricing.
//! * [`baselines`]: exhaustive oracle and a pay-as-bid local-search
//!   approximation.
//!
//! All of them implement [`Mechanism`] and are available by name from
//! [`mechanism::builtin`].

pub mod baselines;
pub mod cdb;
pub mod error;
pub mod mdb;
pub mod mechanism;
pub mod model;
pub mod numeric;
pub mod simlab;

pub use error::{Error, Result};
pub use mechanism::{DemandMode, Mechanism, Registry};
pub use model::{AuctionOutcome, Instance, MarketConfig, Miner, MinerId};
