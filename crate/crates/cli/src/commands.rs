use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use chainmarket::mechanism::builtin;
use chainmarket::simlab::{
    gen_instance, preset, run_probes, run_sweep_with, utility_curve, CurveLayout, Preset, ProbeParams, ProbeReport,
    SweepLayout, SweepParameter,
};
use chainmarket::{DemandMode, Instance, MarketConfig, Mechanism, MinerId, Registry};

use crate::error::{CliError, Result};
use crate::files::{apply_override, read_config, read_instance, write_instance, write_outcome};
use crate::{Command, MarketArgs, OutputArgs, RunArgs};

/// Largest probed violation still counted as numerical noise.
const PROBE_TOLERANCE: f64 = 1e-9;

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Auction {
            mechanism,
            instance,
            market,
            output,
        } => auction(&mechanism, &instance, &market, &output),
        Command::Sweep {
            mechanism,
            preset,
            param,
            grid,
            miners,
            mode,
            instances,
            market,
            run,
            output,
        } => {
            let layout = match (preset, param) {
                (Some(name), _) => Layout::named(&name)?,
                (None, Some(param)) => Layout::Sweep(SweepLayout {
                    parameter: param.parse()?,
                    grid,
                    miners,
                }),
                (None, None) => return Err(CliError::Usage("sweep needs --preset or --param with --grid".into())),
            };
            let layout = layout.with_miners(miners);
            let request = SweepRequest {
                mechanism,
                mode: mode.map(Into::into),
                instances,
                seed: run.seed,
            };
            with_workers(&run, || sweep(&request, layout, &market, &output))
        }
        Command::Probe {
            mechanism,
            instances,
            min_miners,
            max_miners,
            market,
            run,
            output,
            tamper_payments,
        } => {
            let params = ProbeParams {
                instances,
                min_miners,
                max_miners,
                seed: run.seed,
                ..ProbeParams::default()
            };
            with_workers(&run, || probe(&mechanism, &params, tamper_payments, &market, &output))
        }
        Command::Gen {
            miners,
            mode,
            market,
            seed,
            output,
        } => {
            let cfg = market_config(&market)?;
            if miners == 0 {
                return Err(CliError::Usage("--miners must be positive".into()));
            }
            let inst = gen_instance(&cfg, miners, mode.into(), seed)?;
            emit(&output, |w| write_instance(w, &inst))
        }
    }
}

fn market_config(args: &MarketArgs) -> Result<MarketConfig> {
    let mut cfg = match &args.config {
        Some(path) => read_config(path)?,
        None => MarketConfig::default(),
    };
    for assignment in &args.overrides {
        apply_override(&mut cfg, assignment)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(output: &OutputArgs, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &output.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn with_workers<T: Send>(run: &RunArgs, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match run.jobs {
        None => job(),
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?
            .install(job),
    }
}

fn auction(mechanism: &str, instance: &Path, market: &MarketArgs, output: &OutputArgs) -> Result<()> {
    let registry = builtin();
    let mech = registry.get(mechanism)?;
    let cfg = market_config(market)?;
    let inst = read_instance(instance, &cfg)?;
    let outcome = mech.run(&inst)?;
    emit(output, |w| write_outcome(w, &inst, &outcome))
}

enum Layout {
    Sweep(SweepLayout),
    Curve(CurveLayout),
}

impl Layout {
    fn named(name: &str) -> Result<Self> {
        Ok(match preset(name)? {
            Preset::Sweep(s) => Layout::Sweep(s),
            Preset::UtilityCurve(c) => Layout::Curve(c),
        })
    }

    fn with_miners(self, miners: usize) -> Self {
        match self {
            Layout::Sweep(s) => Layout::Sweep(SweepLayout { miners, ..s }),
            Layout::Curve(c) => Layout::Curve(CurveLayout { miners, ..c }),
        }
    }
}

struct SweepRequest {
    mechanism: String,
    mode: Option<DemandMode>,
    instances: usize,
    seed: u64,
}

fn sweep(request: &SweepRequest, layout: Layout, market: &MarketArgs, output: &OutputArgs) -> Result<()> {
    let registry = builtin();
    let mech = registry.get(&request.mechanism)?;
    let cfg = market_config(market)?;
    let mode = request.mode.unwrap_or(mech.demand_mode());
    match layout {
        Layout::Sweep(layout) => {
            if layout.parameter == SweepParameter::Miners && layout.grid.iter().any(|&n| n < 1.0) {
                return Err(CliError::Usage("N grid values must be positive".into()));
            }
            let spec = layout.into_spec(&request.mechanism, mode, cfg, request.instances, request.seed);
            let result = run_sweep_with(&spec, &registry)?;
            emit(output, |w| Ok(result.write_csv(w)?))
        }
        Layout::Curve(layout) => {
            let population = gen_instance(&cfg, layout.miners, DemandMode::Multi, request.seed)?;
            let rows = curve_rows(mech, &population, &layout)?;
            emit(output, |w| {
                let header: Vec<String> = std::iter::once("demand".to_string())
                    .chain(layout.block_sizes.iter().map(|s| format!("utility_s{s}")))
                    .collect();
                writeln!(w, "{}", header.join(","))?;
                for row in rows {
                    let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
                Ok(())
            })
        }
    }
}

/// One row per demand: the demand followed by the utility at each block size.
fn curve_rows(mech: &dyn Mechanism, population: &Instance, layout: &CurveLayout) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = layout.demands.iter().map(|&d| vec![d]).collect();
    for &s in &layout.block_sizes {
        let curve = utility_curve(mech, population, MinerId(layout.target), s, &layout.demands)?;
        for (row, (_, u)) in rows.iter_mut().zip(curve) {
            row.push(u);
        }
    }
    Ok(rows)
}

/// Wraps a mechanism so that every winner is charged its whole bid.
struct ChargeFullBid<'a>(&'a dyn Mechanism);

impl Mechanism for ChargeFullBid<'_> {
    fn name(&self) -> &'static str {
        self.0.name()
    }

    fn demand_mode(&self) -> DemandMode {
        self.0.demand_mode()
    }

    fn select(&self, inst: &Instance) -> chainmarket::Result<Vec<usize>> {
        self.0.select(inst)
    }

    fn payment(&self, inst: &Instance, _winners: &[usize], idx: usize) -> chainmarket::Result<f64> {
        Ok(inst.miners()[idx].bid)
    }
}

fn probe(mechanism: &str, params: &ProbeParams, tamper: bool, market: &MarketArgs, output: &OutputArgs) -> Result<()> {
    if !matches!(mechanism, "cdb" | "mdb") {
        return Err(CliError::Usage(format!("probes run on cdb or mdb, not `{mechanism}`")));
    }
    if params.instances == 0 {
        return Err(CliError::Usage("--instances must be positive".into()));
    }
    let registry: Registry = builtin();
    let honest = registry.get(mechanism)?;
    let tampered = ChargeFullBid(honest);
    let mech: &dyn Mechanism = if tamper { &tampered } else { honest };
    let cfg = market_config(market)?;
    let report = run_probes(mech, &cfg, params)?;
    emit(output, |w| write_report(w, &report))?;
    let violated = report
        .violations()
        .iter()
        .filter(|&&(_, v)| v > PROBE_TOLERANCE)
        .count();
    match violated {
        0 => Ok(()),
        1 => Err(CliError::ProbeViolation(1, "y")),
        n => Err(CliError::ProbeViolation(n, "ies")),
    }
}

fn write_report(w: &mut dyn Write, report: &ProbeReport) -> Result<()> {
    writeln!(w, "property,max_violation,instances")?;
    for (name, violation) in report.violations() {
        writeln!(w, "{name},{violation},{}", report.instances)?;
    }
    Ok(())
}
