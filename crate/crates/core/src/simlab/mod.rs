//! Simulation laboratory: random markets, parameter sweeps, summary
//! statistics and economic property probes.

mod generate;
mod presets;
mod probes;
mod stats;
mod sweep;

pub use generate::{gen_instance, mix_seed};
pub use presets::{preset, CurveLayout, Preset, SweepLayout, DEFAULT_INSTANCES, DEFAULT_SEED, PRESET_NAMES};
pub use probes::{
    probe_monotonicity, probe_rationality, probe_submodularity, probe_truthfulness, run_probes, utility_curve,
    ProbeParams, ProbeReport, RationalityReport, BID_MULTIPLIERS, CRITICAL_OFFSET,
};
pub use stats::Summary;
pub use sweep::{instance_seed, run_sweep, run_sweep_with, SweepParameter, SweepPoint, SweepResult, SweepSpec};
