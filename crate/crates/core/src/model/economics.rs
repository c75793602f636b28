//! Mining economics: hash power, reward probability, network effects,
//! valuations and the social-welfare set function.

use crate::error::{Error, Result};
use crate::model::{Coalition, Instance, MarketConfig, MinerId};

/// Ex-ante valuation `(T + r*s) * e^(-xi*s/lambda) * d`; the truthful bid.
pub fn truthful_bid(block_size: f64, demand: f64, cfg: &MarketConfig) -> f64 {
    unit_reward(block_size, cfg) * demand
}

/// Expected token reward per resource unit for a block of size `s`, before
/// hash-power share and network effects.
#[inline]
pub fn unit_reward(block_size: f64, cfg: &MarketConfig) -> f64 {
    (cfg.fixed_bonus + cfg.fee_rate * block_size) * cfg.propagation_survival(block_size)
}

/// `w(pi) = a1*pi - a2*pi*e^(a3*pi)` for normalized total computing power `pi`.
pub fn network_effects(pi: f64, cfg: &MarketConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&pi) {
        return Err(Error::Domain { what: "pi", value: pi });
    }
    Ok(cfg.a1 * pi - cfg.a2 * pi * (cfg.a3 * pi).exp())
}

/// Share of the allocated resources held by miner `id`; 0 for losers and
/// for everyone when nothing is allocated.
pub fn hash_power(inst: &Instance, allocation: &[bool], id: MinerId) -> Result<f64> {
    let i = inst.index_of(id)?;
    let total = allocated_demand(inst, allocation);
    if !allocation[i] || total <= 0.0 {
        return Ok(0.0);
    }
    Ok(inst.miners()[i].demand / total)
}

/// Probability of both finding a block and not having it orphaned:
/// `gamma * e^(-tau/lambda)` with propagation time `tau = xi * s`.
pub fn reward_probability(gamma: f64, block_size: f64, cfg: &MarketConfig) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Domain {
            what: "gamma",
            value: gamma,
        });
    }
    let tau = cfg.propagation * block_size;
    let orphaning = 1.0 - (-tau / cfg.block_time).exp();
    Ok(gamma * (1.0 - orphaning))
}

/// Realized value of miner `id` once the allocation is known:
/// `(d_i^2 x_i / D) * (a1 - a2*e^(a3*d_N/D)) * (T + r*s_i) * e^(-xi*s_i/lambda)`.
pub fn ex_post_valuation(inst: &Instance, allocation: &[bool], id: MinerId) -> Result<f64> {
    let i = inst.index_of(id)?;
    Ok(ex_post_at(inst, i, allocated_demand(inst, allocation), allocation[i]))
}

pub(crate) fn ex_post_at(inst: &Instance, i: usize, total_demand: f64, won: bool) -> f64 {
    if !won {
        return 0.0;
    }
    let cfg = inst.config();
    let m = &inst.miners()[i];
    m.demand * m.demand / cfg.supply * cfg.coefficient(total_demand) * unit_reward(m.block_size, cfg)
}

/// Total demand `d_N` of the allocated miners.
pub fn allocated_demand(inst: &Instance, allocation: &[bool]) -> f64 {
    debug_assert_eq!(allocation.len(), inst.len());
    inst.miners()
        .iter()
        .zip(allocation)
        .filter(|(_, &x)| x)
        .map(|(m, _)| m.demand)
        .sum()
}

/// Social welfare `S(M) = sum_{i in M} (d_i/D) (a1 - a2 e^(a3 d_M/D)) b_i - c d_M`.
///
/// Defined for any subset; feasibility against the supply is checked by
/// the mechanisms.
pub fn set_welfare(inst: &Instance, set: &[MinerId]) -> Result<f64> {
    let idx = inst.indices_of(set)?;
    Ok(Coalition::of(inst, idx).welfare(inst.config()))
}

/// Marginal welfare per resource unit of adding `id` to `base`.
pub fn marginal_density(inst: &Instance, id: MinerId, base: &[MinerId]) -> Result<f64> {
    let i = inst.index_of(id)?;
    if base.contains(&id) {
        return Err(Error::AlreadyInSet(id));
    }
    let base = Coalition::of(inst, inst.indices_of(base)?);
    let terms = base.density_terms(inst.config(), &inst.miners()[i]);
    Ok(terms.externality + terms.own)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Miner;

    fn cfg() -> MarketConfig {
        MarketConfig::default()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn inst(miners: &[(f64, f64, f64)]) -> Instance {
        let miners = miners
            .iter()
            .enumerate()
            .map(|(k, &(s, d, b))| Miner {
                id: MinerId(k as u32 + 1),
                block_size: s,
                demand: d,
                bid: b,
            })
            .collect();
        Instance::new(cfg(), miners).unwrap()
    }

    #[test]
    fn truthful_bid_examples() {
        assert_eq!(truthful_bid(0.0, 10.0, &cfg()), 125.0);
        assert_eq!(truthful_bid(500.0, 0.0, &cfg()), 0.0);
        // 19.5 * e^(-1/15) * 10
        assert!(close(truthful_bid(1000.0, 10.0, &cfg()), 182.424, 1e-3));
        assert!(close(
            truthful_bid(1000.0, 10.0, &cfg()),
            195.0 * (-1.0f64 / 15.0).exp(),
            1e-12
        ));
    }

    #[test]
    fn network_effects_examples() {
        assert_eq!(network_effects(0.0, &cfg()).unwrap(), 0.0);
        assert!(close(network_effects(1.0, &cfg()).unwrap(), 0.99938, 1e-5));
        assert!(close(network_effects(0.5, &cfg()).unwrap(), 0.69357, 1e-5));
        assert!(network_effects(1.01, &cfg()).is_err());
        assert!(network_effects(-0.01, &cfg()).is_err());
    }

    #[test]
    fn reward_probability_examples() {
        assert_eq!(reward_probability(0.3, 0.0, &cfg()).unwrap(), 0.3);
        assert_eq!(reward_probability(0.0, 700.0, &cfg()).unwrap(), 0.0);
        assert!(close(reward_probability(0.5, 1000.0, &cfg()).unwrap(), 0.467754, 1e-6));
        assert!(reward_probability(1.5, 0.0, &cfg()).is_err());
    }

    #[test]
    fn hash_power_examples() {
        let i = inst(&[(1.0, 10.0, 1.0), (1.0, 30.0, 1.0), (1.0, 5.0, 1.0)]);
        let x = [true, true, false];
        assert_eq!(hash_power(&i, &x, MinerId(1)).unwrap(), 0.25);
        assert_eq!(hash_power(&i, &x, MinerId(2)).unwrap(), 0.75);
        assert_eq!(hash_power(&i, &x, MinerId(3)).unwrap(), 0.0);
        assert_eq!(hash_power(&i, &[false; 3], MinerId(1)).unwrap(), 0.0);
        assert_eq!(hash_power(&i, &x, MinerId(9)), Err(Error::UnknownMiner(MinerId(9))));

        let eq = inst(&[(1.0, 7.0, 1.0); 4]);
        for id in 1..=4 {
            assert_eq!(hash_power(&eq, &[true; 4], MinerId(id)).unwrap(), 0.25);
        }
    }

    #[test]
    fn set_welfare_examples() {
        let i = inst(&[(1.0, 10.0, 150.0), (1.0, 10.0, 100.0)]);
        assert_eq!(set_welfare(&i, &[]).unwrap(), 0.0);
        // 0.01 * (1.97 - 0.35 e^0.0102) * 150 - 0.01
        let single = set_welfare(&i, &[MinerId(1)]).unwrap();
        assert!(close(single, 2.41462, 1e-5), "{single}");
        let both = set_welfare(&i, &[MinerId(1), MinerId(2)]).unwrap();
        assert!(close(both, 4.01197, 1e-5), "{both}");
        assert!(set_welfare(&i, &[MinerId(5)]).is_err());
    }

    #[test]
    fn ex_post_matches_welfare_for_truthful_singleton() {
        let c = cfg();
        let m = Miner::truthful(1, 640.0, 10.0, &c);
        let i = Instance::new(c, vec![m]).unwrap();
        let v = ex_post_valuation(&i, &[true], MinerId(1)).unwrap();
        let s = set_welfare(&i, &[MinerId(1)]).unwrap();
        assert!(close(v, s + c.unit_cost * 10.0, 1e-12));
        assert_eq!(ex_post_valuation(&i, &[false], MinerId(1)).unwrap(), 0.0);
    }

    #[test]
    fn marginal_density_examples() {
        let i = inst(&[(1.0, 10.0, 0.0), (1.0, 10.0, 200.0), (1.0, 10.0, 100.0)]);
        assert!(close(
            marginal_density(&i, MinerId(1), &[]).unwrap(),
            -cfg().unit_cost,
            1e-15
        ));
        let alone = marginal_density(&i, MinerId(2), &[]).unwrap();
        assert!(close(alone, 0.322282, 1e-6), "{alone}");
        let against = marginal_density(&i, MinerId(2), &[MinerId(3)]).unwrap();
        assert!(against < alone);
        assert_eq!(
            marginal_density(&i, MinerId(2), &[MinerId(2)]),
            Err(Error::AlreadyInSet(MinerId(2)))
        );
    }
}
