//! Constant-demand auction: every miner asks for the same `q` units.
//!
//! With equal demands the welfare of a set depends only on its size and bid
//! sum, so the optimal set is a prefix of the bids in descending order. The
//! prefix grows until the next bidder would lower welfare, push it below
//! zero, or exceed the supply. Each winner pays the welfare the others
//! would reach without it minus the welfare of the remaining winners.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::mechanism::{DemandMode, Mechanism};
use crate::model::{AuctionOutcome, Instance, MinerId};
use crate::numeric::{definitely_less, tolerance};

/// Diagnostic trace of winner selection.
#[derive(Debug, Clone, PartialEq)]
pub struct CdbTrace {
    /// Bidders in descending bid order (ties by ascending id).
    pub sorted: Vec<MinerId>,
    /// `prefix_welfares[k]` is the welfare of the top-`k` bidders, for every
    /// `k` that fits in the supply; entry 0 is the empty set.
    pub prefix_welfares: Vec<f64>,
    /// Number of winners selected.
    pub stop_index: usize,
}

impl CdbTrace {
    pub fn winners(&self) -> &[MinerId] {
        &self.sorted[..self.stop_index]
    }
}

/// Constant-demand welfare of `k` winners with bid sum `bid_sum`.
fn welfare(inst: &Instance, k: usize, bid_sum: f64) -> f64 {
    let cfg = inst.config();
    let q = cfg.constant_demand;
    let total = q * k as f64;
    cfg.coefficient(total) * q * bid_sum / cfg.supply - cfg.unit_cost * total
}

fn check_constant(inst: &Instance) -> Result<()> {
    let q = inst.config().constant_demand;
    match inst.miners().iter().find(|m| m.demand != q) {
        Some(m) => Err(Error::NotConstantDemand {
            id: m.id,
            demand: m.demand,
            q,
        }),
        None => Ok(()),
    }
}

/// Positions in descending bid order, ties by ascending id.
fn bid_order(inst: &Instance) -> Vec<usize> {
    let miners = inst.miners();
    let mut order: Vec<usize> = (0..miners.len()).collect();
    order.sort_by(|&a, &b| {
        miners[b]
            .bid
            .partial_cmp(&miners[a].bid)
            .unwrap_or(Ordering::Equal)
            .then(miners[a].id.cmp(&miners[b].id))
    });
    order
}

/// Greedy prefix selection over `order`; returns `(winner count, welfare)`.
fn greedy_prefix(inst: &Instance, order: impl Iterator<Item = usize>) -> (usize, f64) {
    let cfg = inst.config();
    let mut count = 0;
    let mut bid_sum = 0.0;
    let mut current = 0.0;
    for i in order {
        let k = count + 1;
        if cfg.constant_demand * k as f64 > cfg.supply {
            break;
        }
        let next_sum = bid_sum + inst.miners()[i].bid;
        let next = welfare(inst, k, next_sum);
        let stop = if k == 1 {
            next <= 0.0
        } else {
            definitely_less(next, current) || next < 0.0
        };
        if stop {
            break;
        }
        count = k;
        bid_sum = next_sum;
        current = next;
    }
    (count, current)
}

pub fn cdb_select(inst: &Instance) -> Result<CdbTrace> {
    check_constant(inst)?;
    let cfg = inst.config();
    let order = bid_order(inst);
    let (stop_index, _) = greedy_prefix(inst, order.iter().copied());

    let capacity = ((cfg.supply / cfg.constant_demand).floor() as usize).min(order.len());
    let mut prefix_welfares = Vec::with_capacity(capacity + 1);
    prefix_welfares.push(0.0);
    let mut bid_sum = 0.0;
    for (k, &i) in order.iter().take(capacity).enumerate() {
        bid_sum += inst.miners()[i].bid;
        prefix_welfares.push(welfare(inst, k + 1, bid_sum));
    }

    Ok(CdbTrace {
        sorted: order.iter().map(|&i| inst.miners()[i].id).collect(),
        prefix_welfares,
        stop_index,
    })
}

pub fn run_cdb(inst: &Instance) -> Result<AuctionOutcome> {
    ConstantDemand.run(inst)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConstantDemand;

impl Mechanism for ConstantDemand {
    fn name(&self) -> &'static str {
        "cdb"
    }

    fn demand_mode(&self) -> DemandMode {
        DemandMode::Constant
    }

    fn select(&self, inst: &Instance) -> Result<Vec<usize>> {
        check_constant(inst)?;
        let order = bid_order(inst);
        let (count, _) = greedy_prefix(inst, order.iter().copied());
        Ok(order[..count].to_vec())
    }

    fn payment(&self, inst: &Instance, winners: &[usize], idx: usize) -> Result<f64> {
        check_constant(inst)?;
        if !winners.contains(&idx) {
            return Err(Error::NotWinner(inst.miners()[idx].id));
        }
        let order = bid_order(inst);
        let (_, without) = greedy_prefix(inst, order.iter().copied().filter(|&j| j != idx));
        let others = winners.iter().filter(|&&j| j != idx);
        let others_sum: f64 = others.clone().map(|&j| inst.miners()[j].bid).sum();
        let remaining = if others.count() == 0 {
            0.0
        } else {
            welfare(inst, winners.len() - 1, others_sum)
        };
        let payment = without - remaining;
        if payment < 0.0 {
            if -payment <= tolerance(without, remaining) {
                return Ok(0.0);
            }
            return Err(Error::NegativePayment {
                id: inst.miners()[idx].id,
                payment,
            });
        }
        Ok(payment)
    }
}
