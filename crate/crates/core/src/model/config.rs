use crate::error::{Error, Result};

/// Protocol and market constants shared by every miner in one auction.
///
/// `Default` gives the reference market: 12.5-token bonus, 15 s block time,
/// 1000 resource units of supply and a constant demand of 10 units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketConfig {
    /// Fixed bonus for a new block (tokens).
    pub fixed_bonus: f64,
    /// Transaction fee per data unit of block size (tokens).
    pub fee_rate: f64,
    /// Average block time (seconds).
    pub block_time: f64,
    /// Propagation delay per data unit (seconds).
    pub propagation: f64,
    /// Provider's cost per resource unit (tokens).
    pub unit_cost: f64,
    /// Total resource supply.
    pub supply: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// Demand of every miner in a constant-demand auction.
    pub constant_demand: f64,
    /// Lower demand limit as a fraction of supply.
    pub beta1: f64,
    /// Upper demand limit as a fraction of supply.
    pub beta2: f64,
    /// Largest block size a miner may carry.
    pub max_block_size: f64,
}

impl Default for MarketConfig {
    fn default() -> Self {
        Self {
            fixed_bonus: 12.5,
            fee_rate: 0.007,
            block_time: 15.0,
            propagation: 0.001,
            unit_cost: 0.001,
            supply: 1000.0,
            a1: 1.97,
            a2: 0.35,
            a3: 1.02,
            constant_demand: 10.0,
            beta1: 0.0,
            beta2: 0.02,
            max_block_size: 1024.0,
        }
    }
}

/// Keys accepted by [`MarketConfig::set`], in canonical order.
pub const CONFIG_KEYS: [&str; 13] = [
    "T", "r", "lambda", "xi", "c", "D", "a1", "a2", "a3", "q", "beta1", "beta2", "s_max",
];

impl MarketConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let all = [
            self.fixed_bonus,
            self.fee_rate,
            self.block_time,
            self.propagation,
            self.unit_cost,
            self.supply,
            self.a1,
            self.a2,
            self.a3,
            self.constant_demand,
            self.beta1,
            self.beta2,
            self.max_block_size,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.fixed_bonus < 0.0 || self.fee_rate < 0.0 || self.propagation < 0.0 || self.unit_cost < 0.0 {
            return bad("T, r, xi and c must be non-negative".into());
        }
        if self.block_time <= 0.0 {
            return bad(format!("lambda must be positive, got {}", self.block_time));
        }
        if self.supply <= 0.0 {
            return bad(format!("D must be positive, got {}", self.supply));
        }
        if self.a1 <= 0.0 || self.a2 <= 0.0 || self.a3 <= 0.0 {
            return bad("a1, a2 and a3 must be positive".into());
        }
        if !(self.constant_demand > 0.0 && self.constant_demand < self.supply) {
            return bad(format!("q must lie in (0, D), got {}", self.constant_demand));
        }
        // beta1 == beta2 is a degenerate point distribution, needed for a zero-dispersion sweep.
        if !(0.0 <= self.beta1 && self.beta1 <= self.beta2 && self.beta2 < 1.0) {
            return bad(format!(
                "need 0 <= beta1 <= beta2 < 1, got beta1={} beta2={}",
                self.beta1, self.beta2
            ));
        }
        if self.max_block_size <= 0.0 {
            return bad(format!("s_max must be positive, got {}", self.max_block_size));
        }
        let floor = self.a2 * self.a3.exp();
        if self.a1 < floor {
            return bad(format!(
                "a1 = {} is below a2*e^a3 = {floor}; network effects would turn negative",
                self.a1
            ));
        }
        Ok(())
    }

    /// `a1 - a2 * e^(a3 * total_demand / D)`, the per-unit network-effects
    /// multiplier shared by every winner.
    #[inline]
    pub fn coefficient(&self, total_demand: f64) -> f64 {
        self.a1 - self.a2 * (self.a3 * total_demand / self.supply).exp()
    }

    /// Survival factor `e^(-xi * s / lambda)` of a block of size `s`.
    #[inline]
    pub fn propagation_survival(&self, block_size: f64) -> f64 {
        (-self.propagation * block_size / self.block_time).exp()
    }

    /// Sets one parameter by its short key (`T`, `r`, `lambda`, ...).
    pub fn set(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "T" => &mut self.fixed_bonus,
            "r" => &mut self.fee_rate,
            "lambda" => &mut self.block_time,
            "xi" => &mut self.propagation,
            "c" => &mut self.unit_cost,
            "D" => &mut self.supply,
            "a1" => &mut self.a1,
            "a2" => &mut self.a2,
            "a3" => &mut self.a3,
            "q" => &mut self.constant_demand,
            "beta1" => &mut self.beta1,
            "beta2" => &mut self.beta2,
            "s_max" => &mut self.max_block_size,
            other => return Err(Error::InvalidConfig(format!("unknown parameter `{other}`"))),
        };
        *slot = value;
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "T" => self.fixed_bonus,
            "r" => self.fee_rate,
            "lambda" => self.block_time,
            "xi" => self.propagation,
            "c" => self.unit_cost,
            "D" => self.supply,
            "a1" => self.a1,
            "a2" => self.a2,
            "a3" => self.a3,
            "q" => self.constant_demand,
            "beta1" => self.beta1,
            "beta2" => self.beta2,
            "s_max" => self.max_block_size,
            _ => return None,
        })
    }
}
