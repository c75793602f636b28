//! Multi-demand auction for single-minded miners.
//!
//! Winners are picked greedily by marginal welfare density. The greedy loop
//! stops at the first candidate that would overflow the supply or has a
//! negative density, even if a smaller candidate further down would fit.
//!
//! A winner's price comes from re-running the greedy without it. Each
//! competitor seated while the winner could still fit alongside it forms a
//! position in a price list; the bid at which the winner's density would tie
//! that competitor at that position is a candidate critical bid. One extra
//! tail entry covers the first competitor past those positions. The minimum
//! over the list is the critical bid `b'`, and the winner pays
//! `(a1 - a2 e^(a3 d_M / D)) * b' / D` with `d_M` the main-run total demand.

use crate::error::{Error, Result};
use crate::mechanism::{DemandMode, Mechanism};
use crate::model::{AuctionOutcome, Coalition, DensityBase, DensityKernel, Instance, MinerId};

/// One retained position of the re-run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceEntry {
    /// 1-based position in the re-run order.
    pub position: usize,
    pub competitor: MinerId,
    /// The competitor's density at that position.
    pub target: f64,
    /// Winner's bid that ties `target` at that position.
    pub critical_bid: f64,
    /// The analytic solution was negative and was clamped to 0.
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceList {
    pub entries: Vec<PriceEntry>,
    /// Competitor at position `retained + 1`, if the re-run reached one.
    pub tail_competitor: Option<MinerId>,
    /// Density the winner must reach after the retained positions.
    pub tail_target: f64,
    pub tail_bid: f64,
    pub tail_clamped: bool,
    /// Number of retained positions.
    pub retained: usize,
}

impl PriceList {
    /// Minimum over the retained positions and the tail.
    pub fn critical_bid(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.critical_bid)
            .fold(self.tail_bid, f64::min)
    }
}

/// Greedy density ordering over all miners except `excluded`.
struct Greedy<'a> {
    inst: &'a Instance,
    kernel: &'a DensityKernel,
    remaining: Vec<usize>,
    coalition: Coalition,
}

/// One greedy step: the best remaining candidate against the current base.
#[derive(Clone, Copy)]
struct Pick {
    index: usize,
    density: f64,
    base: DensityBase,
}

impl<'a> Greedy<'a> {
    fn new(inst: &'a Instance, kernel: &'a DensityKernel, excluded: Option<usize>) -> Self {
        let remaining = (0..inst.len()).filter(|&i| Some(i) != excluded).collect();
        Self {
            inst,
            kernel,
            remaining,
            coalition: Coalition::default(),
        }
    }

    /// Highest-density remaining miner; ties go to the smaller id.
    fn peek(&self) -> Option<(usize, Pick)> {
        let base = self.kernel.base(self.coalition);
        let miners = self.inst.miners();
        let mut best: Option<(usize, f64)> = None;
        for (slot, &i) in self.remaining.iter().enumerate() {
            let d = self.kernel.density(&base, i, &miners[i]);
            let better = match best {
                None => true,
                Some((b, bd)) => d > bd || (d == bd && miners[i].id < miners[self.remaining[b]].id),
            };
            if better {
                best = Some((slot, d));
            }
        }
        best.map(|(slot, density)| {
            (
                slot,
                Pick {
                    index: self.remaining[slot],
                    density,
                    base,
                },
            )
        })
    }

    fn accept(&mut self, slot: usize) {
        let i = self.remaining.swap_remove(slot);
        self.coalition.add(&self.inst.miners()[i]);
    }
}

fn check_demands(inst: &Instance) -> Result<()> {
    match inst.miners().iter().find(|m| m.demand.is_nan() || m.demand <= 0.0) {
        Some(m) => Err(Error::InvalidMiner {
            id: m.id,
            reason: "demand must be positive".into(),
        }),
        None => Ok(()),
    }
}

fn select_with(inst: &Instance, kernel: &DensityKernel) -> Vec<usize> {
    let supply = inst.config().supply;
    let mut greedy = Greedy::new(inst, kernel, None);
    let mut winners = Vec::new();
    while let Some((slot, pick)) = greedy.peek() {
        let demand = inst.miners()[pick.index].demand;
        if greedy.coalition.demand + demand > supply || pick.density < 0.0 {
            break;
        }
        greedy.accept(slot);
        winners.push(pick.index);
    }
    winners
}

/// Bid for miner `i` that makes its density against `base` equal `target`.
/// Negative solutions are clamped to 0 (second field `true`).
fn invert_at(
    kernel: &DensityKernel,
    inst: &Instance,
    i: usize,
    base: &DensityBase,
    target: f64,
) -> Result<(f64, bool)> {
    let cfg = kernel.config();
    let m = &inst.miners()[i];
    let coefficient = kernel.joint_coefficient(base, i);
    if coefficient.is_nan() || coefficient <= 0.0 {
        return Err(Error::Singularity {
            coefficient,
            total_demand: base.coalition.demand + m.demand,
        });
    }
    let bid = (target - kernel.externality(base, i, m) + cfg.unit_cost) * cfg.supply / coefficient;
    Ok(if bid < 0.0 { (0.0, true) } else { (bid, false) })
}

fn price_list_at(inst: &Instance, kernel: &DensityKernel, i: usize) -> Result<PriceList> {
    let cfg = inst.config();
    let own_demand = inst.miners()[i].demand;
    let mut greedy = Greedy::new(inst, kernel, Some(i));
    let mut entries = Vec::new();
    let mut seated = 0usize;
    let mut retained_base = kernel.base(Coalition::default());
    let mut tail: Option<Pick> = None;

    while let Some((slot, pick)) = greedy.peek() {
        if seated == entries.len() {
            tail = Some(pick);
        }
        let demand = inst.miners()[pick.index].demand;
        let filled = greedy.coalition.demand + demand;
        if filled > cfg.supply || pick.density < 0.0 {
            break;
        }
        if filled <= cfg.supply - own_demand {
            let (critical_bid, clamped) = invert_at(kernel, inst, i, &pick.base, pick.density)?;
            entries.push(PriceEntry {
                position: seated + 1,
                competitor: inst.miners()[pick.index].id,
                target: pick.density,
                critical_bid,
                clamped,
            });
        }
        greedy.accept(slot);
        seated += 1;
        if entries.len() == seated {
            retained_base = kernel.base(greedy.coalition);
            tail = None;
        }
    }

    let retained = entries.len();
    let tail_target = match tail {
        Some(p) if p.density >= 0.0 && inst.miners()[p.index].demand <= own_demand => p.density,
        _ => 0.0,
    };
    let (tail_bid, tail_clamped) = invert_at(kernel, inst, i, &retained_base, tail_target)?;
    Ok(PriceList {
        entries,
        tail_competitor: tail.map(|p| inst.miners()[p.index].id),
        tail_target,
        tail_bid,
        tail_clamped,
        retained,
    })
}

/// Winner positions in greedy order.
pub fn mdb_select(inst: &Instance) -> Result<Vec<usize>> {
    check_demands(inst)?;
    Ok(select_with(inst, &DensityKernel::new(inst)))
}

pub fn run_mdb(inst: &Instance) -> Result<AuctionOutcome> {
    MultiDemand.run(inst)
}

/// Price list of winner `id` against the rest of the market.
pub fn price_list(inst: &Instance, id: MinerId, main_winners: &[MinerId]) -> Result<PriceList> {
    check_demands(inst)?;
    if !main_winners.contains(&id) {
        return Err(Error::NotWinner(id));
    }
    let i = inst.index_of(id)?;
    price_list_at(inst, &DensityKernel::new(inst), i)
}

/// Smallest bid with which `id` would still win, other bids fixed.
pub fn critical_bid(inst: &Instance, id: MinerId, main_winners: &[MinerId]) -> Result<f64> {
    price_list(inst, id, main_winners).map(|l| l.critical_bid())
}

/// Bid for `id` whose marginal density against `base` equals `target`.
///
/// The density is affine and strictly increasing in the bid, so the solution
/// is unique; negative solutions are clamped to 0.
pub fn invert_density(inst: &Instance, target: f64, id: MinerId, base: &[MinerId]) -> Result<f64> {
    let i = inst.index_of(id)?;
    if base.contains(&id) {
        return Err(Error::AlreadyInSet(id));
    }
    let kernel = DensityKernel::new(inst);
    let base = kernel.base(Coalition::of(inst, inst.indices_of(base)?));
    invert_at(&kernel, inst, i, &base, target).map(|(b, _)| b)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct MultiDemand;

impl Mechanism for MultiDemand {
    fn name(&self) -> &'static str {
        "mdb"
    }

    fn demand_mode(&self) -> DemandMode {
        DemandMode::Multi
    }

    fn select(&self, inst: &Instance) -> Result<Vec<usize>> {
        mdb_select(inst)
    }

    fn payment(&self, inst: &Instance, winners: &[usize], idx: usize) -> Result<f64> {
        check_demands(inst)?;
        if !winners.contains(&idx) {
            return Err(Error::NotWinner(inst.miners()[idx].id));
        }
        let kernel = DensityKernel::new(inst);
        let bid = price_list_at(inst, &kernel, idx)?.critical_bid();
        let cfg = inst.config();
        let total: f64 = winners.iter().map(|&w| inst.miners()[w].demand).sum();
        Ok(cfg.coefficient(total) * bid / cfg.supply)
    }

    fn critical_bid(&self, inst: &Instance, winners: &[usize], idx: usize) -> Option<Result<f64>> {
        let price = || {
            check_demands(inst)?;
            if !winners.contains(&idx) {
                return Err(Error::NotWinner(inst.miners()[idx].id));
            }
            price_list_at(inst, &DensityKernel::new(inst), idx).map(|l| l.critical_bid())
        };
        Some(price())
    }

    fn run(&self, inst: &Instance) -> Result<AuctionOutcome> {
        check_demands(inst)?;
        let kernel = DensityKernel::new(inst);
        let winners = select_with(inst, &kernel);
        let cfg = inst.config();
        let coefficient = cfg.coefficient(winners.iter().map(|&w| inst.miners()[w].demand).sum());
        let mut payments = vec![0.0; inst.len()];
        for &w in &winners {
            let bid = price_list_at(inst, &kernel, w)?.critical_bid();
            payments[w] = coefficient * bid / cfg.supply;
        }
        Ok(AuctionOutcome::from_winners(inst, &winners, payments))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MarketConfig, Miner};

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
    fn lone_winner_pays_unit_cost() {
        let i = inst(&[(15.0, 200.0)]);
        let out = run_mdb(&i).unwrap();
        assert_eq!(out.winners, [MinerId(1)]);
        assert!((out.payments[0] - 0.001).abs() < 1e-15, "{}", out.payments[0]);
        let cfg = MarketConfig::default();
        let expected = cfg.unit_cost * cfg.supply / cfg.coefficient(15.0);
        let b = critical_bid(&i, MinerId(1), &out.winners).unwrap();
        assert!((b - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_bids_select_nobody() {
        let out = run_mdb(&inst(&[(10.0, 0.0), (5.0, 0.0)])).unwrap();
        assert!(out.winners.is_empty());
        assert_eq!(out.payments, [0.0, 0.0]);
    }

    #[test]
    fn two_miner_price_list() {
        let i = inst(&[(10.0, 200.0), (10.0, 100.0)]);
        let out = run_mdb(&i).unwrap();
        assert_eq!(out.winners, [MinerId(1), MinerId(2)]);
        let list = price_list(&i, MinerId(1), &out.winners).unwrap();
        assert_eq!(list.retained, 1);
        assert!((list.entries[0].critical_bid - 100.0).abs() < 1e-9);
        assert_eq!(list.tail_competitor, None);
        assert_eq!(list.tail_target, 0.0);
        assert!((list.tail_bid - 0.8448).abs() < 1e-4, "{}", list.tail_bid);
        assert!((out.payments[0] - 0.0013625).abs() < 1e-7, "{}", out.payments[0]);
    }

    #[test]
    fn inversion_examples() {
        let i = inst(&[(10.0, 200.0), (10.0, 100.0)]);
        let b = invert_density(&i, 0.0, MinerId(1), &[]).unwrap();
        assert!((b - 0.61865).abs() < 1e-5, "{b}");
        let b = invert_density(&i, 0.0, MinerId(1), &[MinerId(2)]).unwrap();
        assert!((b - 0.8448).abs() < 1e-4, "{b}");
        let target = crate::model::marginal_density(&i, MinerId(1), &[MinerId(2)]).unwrap();
        let b = invert_density(&i, target, MinerId(1), &[MinerId(2)]).unwrap();
        assert!((b - 200.0).abs() < 1e-9);
        assert_eq!(
            invert_density(&i, 0.0, MinerId(1), &[MinerId(1)]),
            Err(Error::AlreadyInSet(MinerId(1)))
        );
        // Targets far below zero clamp.
        assert_eq!(invert_density(&i, -5.0, MinerId(1), &[]).unwrap(), 0.0);
    }

    #[test]
    fn greedy_breaks_instead_of_skipping() {
        // The densest miner overflows once the first is seated; the small
        // one behind it would fit but is never considered.
        let cfg = MarketConfig {
            supply: 100.0,
            ..Default::default()
        };
        let miners = vec![
            Miner {
                id: MinerId(1),
                block_size: 1.0,
                demand: 60.0,
                bid: 60.0 * 20.0,
            },
            Miner {
                id: MinerId(2),
                block_size: 1.0,
                demand: 50.0,
                bid: 50.0 * 18.0,
            },
            Miner {
                id: MinerId(3),
                block_size: 1.0,
                demand: 5.0,
                bid: 5.0 * 3.0,
            },
        ];
        let i = Instance::new(cfg, miners).unwrap();
        let out = run_mdb(&i).unwrap();
        assert_eq!(out.winners, [MinerId(1)]);
    }

    #[test]
    fn price_list_requires_winner() {
        let i = inst(&[(10.0, 200.0), (10.0, 0.0)]);
        let out = run_mdb(&i).unwrap();
        assert_eq!(out.winners, [MinerId(1)]);
        assert_eq!(
            price_list(&i, MinerId(2), &out.winners),
            Err(Error::NotWinner(MinerId(2)))
        );
    }
}
