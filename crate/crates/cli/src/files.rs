//! Plain-text formats: `key = value` market configs and `id,s,d[,b]`
//! instance tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use chainmarket::model::CONFIG_KEYS;
use chainmarket::{AuctionOutcome, Instance, MarketConfig, Miner, MinerId};

use crate::error::{CliError, Result};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_number(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Applies one `KEY=VALUE` override.
pub fn apply_override(cfg: &mut MarketConfig, assignment: &str) -> Result<()> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("override `{assignment}` is not KEY=VALUE")))?;
    set_key(cfg, key.trim(), value).map_err(CliError::Usage)
}

fn set_key(cfg: &mut MarketConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    if !CONFIG_KEYS.contains(&key) {
        return Err(format!("unknown parameter `{key}` (known: {})", CONFIG_KEYS.join(", ")));
    }
    let v = parse_number(value).ok_or_else(|| format!("`{}` is not a number", value.trim()))?;
    cfg.set(key, v).map_err(|e| e.to_string())
}

/// Reads a config file over the defaults. Blank lines and `#` comments are
/// ignored; every other line is `key = value`.
pub fn read_config(path: &Path) -> Result<MarketConfig> {
    let mut cfg = MarketConfig::default();
    for (k, raw) in read(path)?.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_err = |reason: String| CliError::Parse {
            path: path.to_path_buf(),
            line: k + 1,
            reason,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err("expected `key = value`".into()))?;
        set_key(&mut cfg, key.trim(), value).map_err(parse_err)?;
    }
    Ok(cfg)
}

/// Reads an instance table. A missing or empty `b` column means the miner
/// bids truthfully under `cfg`.
pub fn read_instance(path: &Path, cfg: &MarketConfig) -> Result<Instance> {
    let text = read(path)?;
    let parse_err = |line: usize, reason: String| CliError::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(id_col), Some(s_col), Some(d_col)) = (column("id"), column("s"), column("d")) else {
        return Err(parse_err(1, "header must contain id, s and d".into()));
    };
    let b_col = column("b");

    let mut miners = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |col: usize, name: &str| -> Result<f64> {
            let raw = record.get(col).unwrap_or("");
            parse_number(raw).ok_or_else(|| parse_err(line, format!("{name} `{raw}` is not a number")))
        };
        let raw_id = record.get(id_col).unwrap_or("");
        let id: u32 = raw_id
            .parse()
            .map_err(|_| parse_err(line, format!("id `{raw_id}` is not an integer")))?;
        let (s, d) = (field(s_col, "s")?, field(d_col, "d")?);
        let miner = match b_col.filter(|&c| !record.get(c).unwrap_or("").is_empty()) {
            Some(c) => Miner {
                id: MinerId(id),
                block_size: s,
                demand: d,
                bid: field(c, "b")?,
            },
            None => Miner::truthful(id, s, d, cfg),
        };
        miners.push(miner);
    }
    Ok(Instance::new(*cfg, miners)?)
}

pub fn write_instance<W: Write>(out: W, inst: &Instance) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "s", "d", "b"])?;
    for m in inst.miners() {
        w.write_record([
            m.id.to_string(),
            m.block_size.to_string(),
            m.demand.to_string(),
            m.bid.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-miner outcome table followed by a one-line `#` summary.
pub fn write_outcome<W: Write>(mut out: W, inst: &Instance, outcome: &AuctionOutcome) -> Result<()> {
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["miner_id", "s", "d", "b", "x", "payment", "ex_post_value", "utility"])?;
        for (i, (m, won, payment)) in outcome.rows(inst).enumerate() {
            w.write_record([
                m.id.to_string(),
                m.block_size.to_string(),
                m.demand.to_string(),
                m.bid.to_string(),
                u8::from(won).to_string(),
                payment.to_string(),
                outcome.ex_post_value(inst, i).to_string(),
                outcome.utility(inst, i).to_string(),
            ])?;
        }
        w.flush()?;
    }
    writeln!(
        out,
        "# welfare={},allocated={},winners={},satisfaction_rate={}",
        outcome.welfare,
        outcome.allocated,
        outcome.winners.len(),
        outcome.satisfaction_rate()
    )?;
    Ok(())
}
