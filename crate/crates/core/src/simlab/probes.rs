//! Adversarial checks of the economic guarantees on concrete markets.
//!
//! Every probe recomputes the auction from scratch with a single bidder's
//! report changed; nothing is inferred from the mechanism's own reasoning.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{gen_instance, instance_seed, mix_seed};
use crate::error::{Error, Result};
use crate::mechanism::{DemandMode, Mechanism};
use crate::model::{ex_post_at, Coalition, Instance, MarketConfig, Miner, MinerId};

/// Bid misreports tried by the truthfulness probe, as multiples of the
/// truthful bid.
pub const BID_MULTIPLIERS: [f64; 8] = [0.0, 0.5, 0.9, 0.99, 1.01, 1.1, 2.0, 10.0];

/// Offset around a winner's critical bid tried as additional misreports.
pub const CRITICAL_OFFSET: f64 = 1e-3;

const BID_RAISES: [f64; 3] = [1.01, 2.0, 10.0];
const DEMAND_CUTS: [f64; 2] = [0.5, 0.9];
const CUT_BID_FACTORS: [f64; 2] = [1.0, 2.0];

fn demand_of(inst: &Instance, winners: &[usize]) -> f64 {
    winners.iter().map(|&w| inst.miners()[w].demand).sum()
}

/// Utility of the miner at `idx` in `reported`, valued with its true
/// demand and block size (which `reported` shares with the truth).
fn utility_under(mech: &dyn Mechanism, reported: &Instance, idx: usize) -> Result<f64> {
    let winners = mech.select(reported)?;
    if !winners.contains(&idx) {
        return Ok(0.0);
    }
    let value = ex_post_at(reported, idx, demand_of(reported, &winners), true);
    Ok(value - mech.payment(reported, &winners, idx)?)
}

/// Largest utility gain any single miner obtains by scaling its bid by one
/// of `multipliers`, or, for winners of mechanisms with critical bids, by
/// bidding just above or below that critical bid.
pub fn probe_truthfulness(mech: &dyn Mechanism, inst: &Instance, multipliers: &[f64]) -> Result<f64> {
    let honest = mech.run(inst)?;
    let winners = inst.indices_of(&honest.winners)?;
    let mut gain = 0.0f64;
    for (i, m) in inst.miners().iter().enumerate() {
        let truthful = honest.utility(inst, i);
        let mut bids: Vec<f64> = multipliers.iter().map(|f| m.bid * f).collect();
        if honest.allocation[i] {
            if let Some(critical) = mech.critical_bid(inst, &winners, i) {
                let critical = critical?;
                bids.push(critical + CRITICAL_OFFSET);
                bids.push((critical - CRITICAL_OFFSET).max(0.0));
            }
        }
        for bid in bids {
            if bid == m.bid {
                continue;
            }
            let deviated = utility_under(mech, &inst.with_bid(i, bid)?, i)?;
            gain = gain.max(deviated - truthful);
        }
    }
    Ok(gain)
}

/// Outcome of the individual-rationality probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalityReport {
    /// Smallest winner margin: bid minus critical bid where the mechanism
    /// prices through one, ex-post value minus payment otherwise.
    /// `+inf` when nobody wins.
    pub min_margin: f64,
    /// Largest absolute payment charged to a loser.
    pub max_loser_payment: f64,
    /// Smallest payment charged to anyone.
    pub min_payment: f64,
}

impl RationalityReport {
    /// Size of the worst breach, 0 when every check holds exactly.
    pub fn violation(&self) -> f64 {
        (-self.min_margin)
            .max(self.max_loser_payment)
            .max(-self.min_payment)
            .max(0.0)
    }
}

pub fn probe_rationality(mech: &dyn Mechanism, inst: &Instance) -> Result<RationalityReport> {
    let out = mech.run(inst)?;
    let winners = inst.indices_of(&out.winners)?;
    let mut report = RationalityReport {
        min_margin: f64::INFINITY,
        max_loser_payment: 0.0,
        min_payment: f64::INFINITY,
    };
    for (i, m) in inst.miners().iter().enumerate() {
        let p = out.payments[i];
        report.min_payment = report.min_payment.min(p);
        if !out.allocation[i] {
            report.max_loser_payment = report.max_loser_payment.max(p.abs());
            continue;
        }
        let margin = match mech.critical_bid(inst, &winners, i) {
            Some(critical) => m.bid - critical?,
            None => out.ex_post_value(inst, i) - p,
        };
        report.min_margin = report.min_margin.min(margin);
    }
    if inst.is_empty() {
        report.min_payment = 0.0;
    }
    Ok(report)
}

/// Number of winners that lose after raising their bid, or, under
/// multi-demand mechanisms, after asking for less at an equal or higher bid.
pub fn probe_monotonicity(mech: &dyn Mechanism, inst: &Instance) -> Result<usize> {
    let winners = mech.select(inst)?;
    let mut failures = 0;
    let still_wins = |reported: Instance, i: usize| -> Result<bool> { Ok(mech.select(&reported)?.contains(&i)) };
    for &i in &winners {
        let m = inst.miners()[i];
        for f in BID_RAISES {
            if !still_wins(inst.with_bid(i, m.bid * f)?, i)? {
                failures += 1;
            }
        }
        if mech.demand_mode() == DemandMode::Multi {
            for cut in DEMAND_CUTS {
                for raise in CUT_BID_FACTORS {
                    let reported = Miner {
                        demand: m.demand * cut,
                        bid: m.bid * raise,
                        ..m
                    };
                    if !still_wins(inst.with_miner(i, reported)?, i)? {
                        failures += 1;
                    }
                }
            }
        }
    }
    Ok(failures)
}

/// Draws `triples` random `(M, B, u)` with `M ⊆ B`, `u ∉ B` and
/// `B ∪ {u}` within the supply, and returns the largest excess of the
/// marginal welfare of `u` at `B` over that at `M` (0 if never positive).
pub fn probe_submodularity<R: Rng>(inst: &Instance, rng: &mut R, triples: usize) -> f64 {
    let cfg = inst.config();
    let n = inst.len();
    if n < 1 {
        return 0.0;
    }
    let marginal = |set: &[usize], u: usize| {
        let base = Coalition::of(inst, set.iter().copied());
        base.with(&inst.miners()[u]).welfare(cfg) - base.welfare(cfg)
    };
    let mut worst = 0.0f64;
    let mut others: Vec<usize> = Vec::with_capacity(n);
    for _ in 0..triples {
        let u = rng.gen_range(0..n);
        others.clear();
        others.extend((0..n).filter(|&j| j != u));
        others.shuffle(rng);
        let want = rng.gen_range(0..=others.len());
        let room = cfg.supply - inst.miners()[u].demand;
        let mut big = Vec::with_capacity(want);
        let mut used = 0.0;
        for &j in others.iter().take(want) {
            let d = inst.miners()[j].demand;
            if used + d > room {
                break;
            }
            used += d;
            big.push(j);
        }
        let small: Vec<usize> = big.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        worst = worst.max(marginal(&big, u) - marginal(&small, u));
    }
    worst
}

/// Utility of miner `target` with block size `block_size` as its true
/// demand runs over `demands`, bidding truthfully, others held fixed.
pub fn utility_curve(
    mech: &dyn Mechanism,
    inst: &Instance,
    target: MinerId,
    block_size: f64,
    demands: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let i = inst.index_of(target)?;
    demands
        .iter()
        .map(|&d| {
            let miner = Miner::truthful(target.0, block_size, d, inst.config());
            let u = utility_under(mech, &inst.with_miner(i, miner)?, i)?;
            Ok((d, u))
        })
        .collect()
}

/// Settings of a batch probe run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeParams {
    pub instances: usize,
    /// Miner counts are drawn uniformly from `min_miners..=max_miners`.
    pub min_miners: usize,
    pub max_miners: usize,
    pub seed: u64,
    pub multipliers: Vec<f64>,
    pub triples_per_instance: usize,
}

impl Default for ProbeParams {
    fn default() -> Self {
        Self {
            instances: 200,
            min_miners: 2,
            max_miners: 120,
            seed: super::DEFAULT_SEED,
            multipliers: BID_MULTIPLIERS.to_vec(),
            triples_per_instance: 5,
        }
    }
}

impl ProbeParams {
    pub fn validate(&self) -> Result<()> {
        if self.instances == 0 {
            return Err(Error::InvalidConfig("probe needs at least one instance".into()));
        }
        if self.min_miners == 0 || self.min_miners > self.max_miners {
            return Err(Error::InvalidConfig(format!(
                "invalid miner range {}..={}",
                self.min_miners, self.max_miners
            )));
        }
        if let Some(&f) = self.multipliers.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "bid multiplier {f} must be finite and non-negative"
            )));
        }
        Ok(())
    }

    /// Random market number `k` of this run.
    pub fn instance(&self, cfg: &MarketConfig, mode: DemandMode, k: usize) -> Result<(Instance, ChaCha8Rng)> {
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(mix_seed(self.seed, 0x0050_5242), k));
        let n = rng.gen_range(self.min_miners..=self.max_miners);
        let inst = gen_instance(cfg, n, mode, rng.gen())?;
        Ok((inst, rng))
    }
}

/// Worst value of each probed property over a batch of random markets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    pub instances: usize,
    pub truthfulness_gain: f64,
    pub rationality: RationalityReport,
    pub monotonicity_failures: usize,
    pub submodularity_violation: f64,
}

impl ProbeReport {
    fn merge(self, other: Self) -> Self {
        Self {
            instances: self.instances + other.instances,
            truthfulness_gain: self.truthfulness_gain.max(other.truthfulness_gain),
            rationality: RationalityReport {
                min_margin: self.rationality.min_margin.min(other.rationality.min_margin),
                max_loser_payment: self
                    .rationality
                    .max_loser_payment
                    .max(other.rationality.max_loser_payment),
                min_payment: self.rationality.min_payment.min(other.rationality.min_payment),
            },
            monotonicity_failures: self.monotonicity_failures + other.monotonicity_failures,
            submodularity_violation: self.submodularity_violation.max(other.submodularity_violation),
        }
    }

    /// `(property, worst violation)` pairs; monotonicity counts failures.
    pub fn violations(&self) -> [(&'static str, f64); 4] {
        [
            ("truthfulness", self.truthfulness_gain.max(0.0)),
            ("rationality", self.rationality.violation()),
            ("monotonicity", self.monotonicity_failures as f64),
            ("submodularity", self.submodularity_violation.max(0.0)),
        ]
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.violations().iter().all(|&(_, v)| v <= tolerance)
    }
}

/// Runs every probe on `params.instances` random markets drawn in the
/// mechanism's demand mode.
pub fn run_probes(mech: &dyn Mechanism, cfg: &MarketConfig, params: &ProbeParams) -> Result<ProbeReport> {
    params.validate()?;
    cfg.validate()?;
    let mode = mech.demand_mode();
    let reports: Vec<ProbeReport> = (0..params.instances)
        .into_par_iter()
        .map(|k| {
            let (inst, mut rng) = params.instance(cfg, mode, k)?;
            Ok(ProbeReport {
                instances: 1,
                truthfulness_gain: probe_truthfulness(mech, &inst, &params.multipliers)?,
                rationality: probe_rationality(mech, &inst)?,
                monotonicity_failures: probe_monotonicity(mech, &inst)?,
                submodularity_violation: probe_submodularity(&inst, &mut rng, params.triples_per_instance),
            })
        })
        .collect::<Result<_>>()?;
    Ok(reports
        .into_iter()
        .reduce(ProbeReport::merge)
        .expect("at least one instance"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdb::ConstantDemand;
    use crate::mdb::MultiDemand;

    fn market(mode: DemandMode, n: usize, seed: u64) -> Instance {
        gen_instance(&MarketConfig::default(), n, mode, seed).unwrap()
    }

    #[test]
    fn identity_report_gains_nothing() {
        let inst = market(DemandMode::Multi, 30, 4);
        assert_eq!(probe_truthfulness(&MultiDemand, &inst, &[1.0]).unwrap(), 0.0);
    }

    #[test]
    fn empty_market_is_rational() {
        let inst = Instance::new(MarketConfig::default(), vec![]).unwrap();
        let r = probe_rationality(&ConstantDemand, &inst).unwrap();
        assert_eq!(r.min_margin, f64::INFINITY);
        assert_eq!(r.violation(), 0.0);
    }

    #[test]
    fn small_markets_pass() {
        for seed in 0..5 {
            let inst = market(DemandMode::Constant, 12, seed);
            assert!(probe_truthfulness(&ConstantDemand, &inst, &BID_MULTIPLIERS).unwrap() <= 1e-9);
            assert!(probe_rationality(&ConstantDemand, &inst).unwrap().violation() <= 1e-9);
            let inst = market(DemandMode::Multi, 12, seed);
            assert!(probe_rationality(&MultiDemand, &inst).unwrap().violation() <= 1e-9);
            assert_eq!(probe_monotonicity(&MultiDemand, &inst).unwrap(), 0);
        }
    }

    #[test]
    fn submodularity_on_random_triples() {
        let inst = market(DemandMode::Multi, 40, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(probe_submodularity(&inst, &mut rng, 200) <= 1e-9);
    }

    #[test]
    fn curve_is_zero_for_losers() {
        let inst = market(DemandMode::Multi, 300, 2);
        let curve = utility_curve(&MultiDemand, &inst, MinerId(120), 300.0, &[0.5, 20.0]).unwrap();
        assert_eq!(curve.len(), 2);
        assert!(curve.iter().all(|&(_, u)| u >= 0.0));
    }

    #[test]
    fn batch_params_validate() {
        let mut p = ProbeParams {
            instances: 0,
            ..ProbeParams::default()
        };
        assert!(p.validate().is_err());
        p.instances = 1;
        p.min_miners = 5;
        p.max_miners = 4;
        assert!(p.validate().is_err());
    }
}
