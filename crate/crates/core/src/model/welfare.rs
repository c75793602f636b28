use crate::model::{Instance, MarketConfig, Miner};

/// Running totals of a winner set.
///
/// The welfare function only depends on a set through its total demand and
/// its demand-weighted bid sum, so both are kept incrementally.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Coalition {
    /// `sum d_j`
    pub demand: f64,
    /// `sum d_j * b_j`
    pub weighted_bids: f64,
}

/// The two parts of a marginal density: the network-effects loss imposed on
/// the existing set (never positive) and the newcomer's own net contribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityTerms {
    pub externality: f64,
    pub own: f64,
}

impl Coalition {
    pub fn of(inst: &Instance, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::default();
        for i in indices {
            c.add(&inst.miners()[i]);
        }
        c
    }

    #[inline]
    pub fn add(&mut self, m: &Miner) {
        self.demand += m.demand;
        self.weighted_bids += m.demand * m.bid;
    }

    #[inline]
    pub fn with(mut self, m: &Miner) -> Self {
        self.add(m);
        self
    }

    #[inline]
    pub fn welfare(&self, cfg: &MarketConfig) -> f64 {
        cfg.coefficient(self.demand) * self.weighted_bids / cfg.supply - cfg.unit_cost * self.demand
    }

    pub fn density_terms(&self, cfg: &MarketConfig, m: &Miner) -> DensityTerms {
        let base_exp = (cfg.a3 * self.demand / cfg.supply).exp();
        let step = (cfg.a3 * m.demand / cfg.supply).exp_m1();
        DensityTerms {
            externality: -cfg.a2 * base_exp * step * self.weighted_bids / (cfg.supply * m.demand),
            own: cfg.coefficient(self.demand + m.demand) * m.bid / cfg.supply - cfg.unit_cost,
        }
    }
}

/// Per-instance precomputation for evaluating many marginal densities
/// against the same base set in O(1) each.
#[derive(Debug, Clone)]
pub struct DensityKernel {
    cfg: MarketConfig,
    growth: Vec<f64>,
    growth_m1: Vec<f64>,
}

/// A base set frozen for one round of density evaluations.
#[derive(Debug, Clone, Copy)]
pub struct DensityBase {
    pub coalition: Coalition,
    exp_demand: f64,
}

impl DensityKernel {
    pub fn new(inst: &Instance) -> Self {
        let cfg = *inst.config();
        let (growth, growth_m1) = inst
            .miners()
            .iter()
            .map(|m| {
                let z = cfg.a3 * m.demand / cfg.supply;
                (z.exp(), z.exp_m1())
            })
            .unzip();
        Self { cfg, growth, growth_m1 }
    }

    pub fn config(&self) -> &MarketConfig {
        &self.cfg
    }

    pub fn base(&self, coalition: Coalition) -> DensityBase {
        DensityBase {
            coalition,
            exp_demand: (self.cfg.a3 * coalition.demand / self.cfg.supply).exp(),
        }
    }

    /// Negative-or-zero network-effects term of adding miner `i` to `base`.
    #[inline]
    pub fn externality(&self, base: &DensityBase, i: usize, m: &Miner) -> f64 {
        -self.cfg.a2 * base.exp_demand * self.growth_m1[i] * base.coalition.weighted_bids / (self.cfg.supply * m.demand)
    }

    /// Coefficient `a1 - a2 e^(a3 (d_base + d_i)/D)` after adding miner `i`.
    #[inline]
    pub fn joint_coefficient(&self, base: &DensityBase, i: usize) -> f64 {
        self.cfg.a1 - self.cfg.a2 * base.exp_demand * self.growth[i]
    }

    /// Marginal density of miner `i` (bidding `bid`) against `base`.
    #[inline]
    pub fn density_with_bid(&self, base: &DensityBase, i: usize, m: &Miner, bid: f64) -> f64 {
        self.externality(base, i, m) + self.joint_coefficient(base, i) * bid / self.cfg.supply - self.cfg.unit_cost
    }

    #[inline]
    pub fn density(&self, base: &DensityBase, i: usize, m: &Miner) -> f64 {
        self.density_with_bid(base, i, m, m.bid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MinerId;

    #[test]
    fn kernel_matches_direct_terms() {
        let cfg = MarketConfig::default();
        let miners: Vec<Miner> = (0..6)
            .map(|k| Miner::truthful(k, 50.0 + 150.0 * k as f64, 1.0 + 3.0 * k as f64, &cfg))
            .collect();
        let inst = Instance::new(cfg, miners).unwrap();
        let kernel = DensityKernel::new(&inst);
        let coalition = Coalition::of(&inst, [0, 2, 3]);
        let base = kernel.base(coalition);
        for i in [1usize, 4, 5] {
            let m = &inst.miners()[i];
            let direct = coalition.density_terms(&cfg, m);
            let fast = kernel.density(&base, i, m);
            assert!((direct.externality + direct.own - fast).abs() < 1e-13);
            let by_welfare = (coalition.with(m).welfare(&cfg) - coalition.welfare(&cfg)) / m.demand;
            assert!((by_welfare - fast).abs() < 1e-11, "{by_welfare} vs {fast}");
            assert!(direct.externality <= 0.0);
        }
        assert_eq!(inst.miners()[0].id, MinerId(0));
    }
}
