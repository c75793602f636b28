use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::mechanism::DemandMode;
use crate::model::{Instance, MarketConfig, Miner};

/// SplitMix64 finalizer over `(a, b)`; used to key independent streams.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random truthful market of `n` miners with ids `1..=n`.
///
/// Block sizes are uniform on `(0, s_max]`. Demands are `q` in constant mode
/// and uniform on `[beta1*D, beta2*D]` (zero redrawn) in multi mode. Every
/// miner consumes one block-size and one demand draw in both modes, so the
/// same seed yields the same block sizes either way.
pub fn gen_instance(cfg: &MarketConfig, n: usize, mode: DemandMode, seed: u64) -> Result<Instance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let low = cfg.beta1 * cfg.supply;
    let high = cfg.beta2 * cfg.supply;
    let miners = (0..n)
        .map(|k| {
            let block_size = cfg.max_block_size * (1.0 - rng.gen::<f64>());
            let demand = loop {
                let u: f64 = rng.gen();
                let d = match mode {
                    DemandMode::Constant => cfg.constant_demand,
                    DemandMode::Multi => low + u * (high - low),
                };
                if d > 0.0 {
                    break d;
                }
            };
            Miner::truthful(k as u32 + 1, block_size, demand, cfg)
        })
        .collect();
    Instance::new(*cfg, miners)
}
