use crate::model::{economics, Instance, Miner, MinerId};

/// Allocation, prices and realized welfare of one auction.
///
/// `allocation` and `payments` are aligned with the instance's miner order.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionOutcome {
    pub allocation: Vec<bool>,
    pub payments: Vec<f64>,
    /// Winners in the order the mechanism selected them.
    pub winners: Vec<MinerId>,
    pub welfare: f64,
    /// Total demand of the winners.
    pub allocated: f64,
}

impl AuctionOutcome {
    pub fn empty(inst: &Instance) -> Self {
        Self {
            allocation: vec![false; inst.len()],
            payments: vec![0.0; inst.len()],
            winners: Vec::new(),
            welfare: 0.0,
            allocated: 0.0,
        }
    }

    /// Builds an outcome from winner positions (in selection order) and the
    /// payments aligned with the instance.
    pub fn from_winners(inst: &Instance, winners: &[usize], payments: Vec<f64>) -> Self {
        let mut allocation = vec![false; inst.len()];
        for &w in winners {
            allocation[w] = true;
        }
        let coalition = super::Coalition::of(inst, winners.iter().copied());
        Self {
            allocation,
            payments,
            winners: winners.iter().map(|&w| inst.miners()[w].id).collect(),
            welfare: coalition.welfare(inst.config()),
            allocated: coalition.demand,
        }
    }

    pub fn is_winner(&self, inst: &Instance, id: MinerId) -> bool {
        inst.index_of(id).map(|i| self.allocation[i]).unwrap_or(false)
    }

    pub fn payment(&self, inst: &Instance, id: MinerId) -> Option<f64> {
        inst.index_of(id).ok().map(|i| self.payments[i])
    }

    /// Fraction of bidders that won.
    pub fn satisfaction_rate(&self) -> f64 {
        if self.allocation.is_empty() {
            0.0
        } else {
            self.winners.len() as f64 / self.allocation.len() as f64
        }
    }

    /// Ex-post valuation of the miner at `idx` under this allocation.
    pub fn ex_post_value(&self, inst: &Instance, idx: usize) -> f64 {
        economics::ex_post_at(inst, idx, self.allocated, self.allocation[idx])
    }

    /// Ex-post valuation minus payment for the miner at `idx`.
    pub fn utility(&self, inst: &Instance, idx: usize) -> f64 {
        self.ex_post_value(inst, idx) - self.payments[idx]
    }

    pub fn rows<'a>(&'a self, inst: &'a Instance) -> impl Iterator<Item = (&'a Miner, bool, f64)> + 'a {
        inst.miners()
            .iter()
            .zip(&self.allocation)
            .zip(&self.payments)
            .map(|((m, &x), &p)| (m, x, p))
    }
}
