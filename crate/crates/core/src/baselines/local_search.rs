//! Add/delete/swap hill climbing on the shifted welfare
//! `H(M) = S(M) + c * sum_{i in N} d_i`, which is non-negative and submodular.

use std::cmp::Ordering;

use super::SearchParams;
use crate::error::Result;
use crate::mechanism::{DemandMode, Mechanism};
use crate::model::{AuctionOutcome, Coalition, Instance, Miner, MinerId};

#[derive(Debug, Clone, Copy)]
enum Move {
    Add(usize),
    Delete(usize),
    Swap { out: usize, into: usize },
}

struct Climber<'a> {
    inst: &'a Instance,
    shift: f64,
    tolerance: f64,
}

impl Climber<'_> {
    fn shifted(&self, c: &Coalition) -> f64 {
        c.welfare(self.inst.config()) + self.shift
    }

    fn without(c: &Coalition, m: &Miner) -> Coalition {
        Coalition {
            demand: c.demand - m.demand,
            weighted_bids: c.weighted_bids - m.demand * m.bid,
        }
    }

    fn fits(&self, c: &Coalition) -> bool {
        c.demand <= self.inst.config().supply
    }

    fn improves(&self, candidate: f64, current: f64) -> bool {
        candidate > current + self.tolerance * current.abs()
    }

    /// Best improving move, if any; ties go to the first move found.
    fn best_move(&self, members: &[bool], set: &Coalition) -> Option<(Move, f64)> {
        let miners = self.inst.miners();
        let current = self.shifted(set);
        let mut best: Option<(Move, f64)> = None;
        let mut consider = |mv: Move, value: f64| {
            if self.improves(value, current) && best.is_none_or(|(_, v)| value > v) {
                best = Some((mv, value));
            }
        };
        for (i, m) in miners.iter().enumerate() {
            if members[i] {
                consider(Move::Delete(i), self.shifted(&Self::without(set, m)));
            } else {
                let grown = set.with(m);
                if self.fits(&grown) {
                    consider(Move::Add(i), self.shifted(&grown));
                }
            }
        }
        for (out, mo) in miners.iter().enumerate().filter(|(i, _)| members[*i]) {
            let shrunk = Self::without(set, mo);
            for (into, mi) in miners.iter().enumerate().filter(|(i, _)| !members[*i]) {
                let swapped = shrunk.with(mi);
                if self.fits(&swapped) {
                    consider(Move::Swap { out, into }, self.shifted(&swapped));
                }
            }
        }
        best
    }

    fn climb(&self, start: usize) -> (Vec<bool>, f64) {
        let mut members = vec![false; self.inst.len()];
        members[start] = true;
        loop {
            let set = self.coalition(&members);
            match self.best_move(&members, &set) {
                Some((Move::Add(i), _)) => members[i] = true,
                Some((Move::Delete(i), _)) => members[i] = false,
                Some((Move::Swap { out, into }, _)) => {
                    members[out] = false;
                    members[into] = true;
                }
                None => return (members, self.shifted(&set)),
            }
        }
    }

    /// Recomputed from scratch each round to keep rounding from drifting.
    fn coalition(&self, members: &[bool]) -> Coalition {
        Coalition::of(self.inst, (0..members.len()).filter(|&i| members[i]))
    }
}

fn ids_of(inst: &Instance, members: &[bool]) -> Vec<MinerId> {
    let mut ids: Vec<MinerId> = (0..members.len())
        .filter(|&i| members[i])
        .map(|i| inst.miners()[i].id)
        .collect();
    ids.sort_unstable();
    ids
}

fn search(inst: &Instance, params: &SearchParams) -> Result<Vec<usize>> {
    params.validate()?;
    let cfg = inst.config();
    let climber = Climber {
        inst,
        shift: cfg.unit_cost * inst.total_demand(),
        tolerance: params.ls_tolerance,
    };

    let mut singletons: Vec<(usize, f64)> = inst
        .miners()
        .iter()
        .enumerate()
        .filter(|(_, m)| m.demand <= cfg.supply)
        .map(|(i, m)| (i, climber.shifted(&Coalition::default().with(m))))
        .collect();
    singletons.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then(inst.miners()[a.0].id.cmp(&inst.miners()[b.0].id))
    });

    let mut best: Option<(Vec<bool>, f64)> = None;
    for &(start, _) in singletons.iter().take(params.ls_restarts) {
        let (members, value) = climber.climb(start);
        let take = match &best {
            None => true,
            Some((b, v)) => value > *v || (value == *v && ids_of(inst, &members) < ids_of(inst, b)),
        };
        if take {
            best = Some((members, value));
        }
    }
    Ok(best
        .map(|(members, _)| (0..members.len()).filter(|&i| members[i]).collect())
        .unwrap_or_default())
}

/// Locally optimal feasible set: no single add, delete or swap improves the
/// shifted welfare by more than the relative tolerance.
pub fn local_search_opt(inst: &Instance, params: &SearchParams) -> Result<Vec<MinerId>> {
    let set = search(inst, params)?;
    Ok(set.into_iter().map(|i| inst.miners()[i].id).collect())
}

/// Local-search winners, each paying its own bid.
pub fn run_frls(inst: &Instance, params: &SearchParams) -> Result<AuctionOutcome> {
    LocalSearch::new(*params).run(inst)
}

#[derive(Debug, Clone, Copy)]
pub struct LocalSearch {
    params: SearchParams,
}

impl LocalSearch {
    pub fn new(params: SearchParams) -> Self {
        Self { params }
    }
}

impl Mechanism for LocalSearch {
    fn name(&self) -> &'static str {
        "frls"
    }

    fn demand_mode(&self) -> DemandMode {
        DemandMode::Multi
    }

    fn select(&self, inst: &Instance) -> Result<Vec<usize>> {
        search(inst, &self.params)
    }

    fn payment(&self, inst: &Instance, _winners: &[usize], idx: usize) -> Result<f64> {
        Ok(inst.miners()[idx].bid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{set_welfare, MarketConfig};

    fn inst(miners: &[(f64, f64)]) -> Instance {
        let miners = miners
            .iter()
            .enumerate()
            .map(|(k, &(d, b))| Miner {
                id: MinerId(k as u32 + 1),
                block_size: 100.0,
                demand: d,
                bid: b,
            })
            .collect();
        Instance::new(MarketConfig::default(), miners).unwrap()
    }

    #[test]
    fn empty_instance() {
        let out = run_frls(&inst(&[]), &SearchParams::default()).unwrap();
        assert!(out.winners.is_empty());
        assert_eq!(out.welfare, 0.0);
    }

    #[test]
    fn single_miner_pays_its_bid() {
        let i = inst(&[(10.0, 180.0)]);
        let out = run_frls(&i, &SearchParams::default()).unwrap();
        assert_eq!(out.winners, [MinerId(1)]);
        assert_eq!(out.payments, [180.0]);
    }

    #[test]
    fn drops_a_worthless_singleton() {
        let i = inst(&[(10.0, 0.0)]);
        assert!(local_search_opt(&i, &SearchParams::default()).unwrap().is_empty());
    }

    #[test]
    fn swaps_out_of_a_bad_start() {
        // The best singleton blocks two miners that are jointly better.
        let cfg = MarketConfig {
            supply: 100.0,
            ..Default::default()
        };
        let miners = vec![
            Miner {
                id: MinerId(1),
                block_size: 1.0,
                demand: 90.0,
                bid: 90.0 * 10.0,
            },
            Miner {
                id: MinerId(2),
                block_size: 1.0,
                demand: 50.0,
                bid: 50.0 * 14.0,
            },
            Miner {
                id: MinerId(3),
                block_size: 1.0,
                demand: 50.0,
                bid: 50.0 * 14.0,
            },
        ];
        let i = Instance::new(cfg, miners).unwrap();
        let set = local_search_opt(
            &i,
            &SearchParams {
                ls_restarts: 1,
                ..Default::default()
            },
        )
        .unwrap();
        let single = set_welfare(&i, &[MinerId(1)]).unwrap();
        let got = set_welfare(&i, &set).unwrap();
        assert!(got >= single);
        let pair = set_welfare(&i, &[MinerId(2), MinerId(3)]).unwrap();
        if pair > single {
            assert_eq!(set.len(), 2);
        }
    }
}
