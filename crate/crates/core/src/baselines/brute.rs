use super::SearchParams;
use crate::error::{Error, Result};
use crate::mechanism::{DemandMode, Mechanism};
use crate::model::{Coalition, Instance, MinerId};
use crate::numeric::{approx_eq, definitely_less};

struct Search<'a> {
    inst: &'a Instance,
    chosen: Vec<usize>,
    best: Vec<usize>,
    best_welfare: f64,
}

impl Search<'_> {
    fn ids(&self, set: &[usize]) -> Vec<MinerId> {
        let mut ids: Vec<MinerId> = set.iter().map(|&i| self.inst.miners()[i].id).collect();
        ids.sort_unstable();
        ids
    }

    fn offer(&mut self, welfare: f64) {
        let replace = if definitely_less(self.best_welfare, welfare) {
            true
        } else if approx_eq(self.best_welfare, welfare) {
            self.ids(&self.chosen) < self.ids(&self.best)
        } else {
            false
        };
        if replace {
            self.best.clone_from(&self.chosen);
            self.best_welfare = welfare;
        }
    }

    /// Visits every subset extending `chosen` with miners at `from..`.
    fn visit(&mut self, from: usize, coalition: Coalition) {
        let cfg = *self.inst.config();
        self.offer(coalition.welfare(&cfg));
        for next in from..self.inst.len() {
            let m = &self.inst.miners()[next];
            if coalition.demand + m.demand > cfg.supply {
                continue;
            }
            self.chosen.push(next);
            self.visit(next + 1, coalition.with(m));
            self.chosen.pop();
        }
    }
}

/// Welfare-maximizing feasible set by exhaustive enumeration.
///
/// Ties within tolerance go to the lexicographically smallest id set.
pub fn brute_force_opt(inst: &Instance, params: &SearchParams) -> Result<(Vec<MinerId>, f64)> {
    let (set, welfare) = solve(inst, params)?;
    let mut ids: Vec<MinerId> = set.iter().map(|&i| inst.miners()[i].id).collect();
    ids.sort_unstable();
    Ok((ids, welfare))
}

fn solve(inst: &Instance, params: &SearchParams) -> Result<(Vec<usize>, f64)> {
    params.validate()?;
    if inst.len() > params.max_brute_n {
        return Err(Error::TooLarge {
            n: inst.len(),
            max: params.max_brute_n,
        });
    }
    let mut search = Search {
        inst,
        chosen: Vec::new(),
        best: Vec::new(),
        best_welfare: 0.0,
    };
    search.visit(0, Coalition::default());
    let mut best = search.best;
    best.sort_unstable();
    Ok((best, search.best_welfare))
}

/// The exhaustive optimum as a mechanism. It is a welfare oracle, not a
/// pricing rule, so winners are charged nothing.
#[derive(Debug, Clone, Copy)]
pub struct BruteForce {
    params: SearchParams,
}

impl BruteForce {
    pub fn new(params: SearchParams) -> Self {
        Self { params }
    }
}

impl Mechanism for BruteForce {
    fn name(&self) -> &'static str {
        "brute"
    }

    fn demand_mode(&self) -> DemandMode {
        DemandMode::Multi
    }

    fn select(&self, inst: &Instance) -> Result<Vec<usize>> {
        solve(inst, &self.params).map(|(set, _)| set)
    }

    fn payment(&self, _inst: &Instance, _winners: &[usize], _idx: usize) -> Result<f64> {
        Ok(0.0)
    }
}
