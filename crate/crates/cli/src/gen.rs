use std::path::PathBuf;

use clap::{Args, ValueEnum};
use repairshop::error::GenError;
use repairshop::genlab::{gen_dynamic, gen_static, GenMode, GenParams};
use repairshop::io::{instance_to_json, scenario_to_json};
use serde::{Deserialize, Serialize};

use crate::config::{FileConfig, Resolver};
use crate::error::CliError;
use crate::output::write_with_sidecar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Static,
    Dynamic,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Static instance or 30-wave dynamic scenario.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    aircraft: Option<usize>,
    #[arg(long)]
    trades: Option<usize>,
    #[arg(long)]
    waves: Option<usize>,
    /// Master seed [env: REPAIRSHOP_SEED, default 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Number of files; seeds run upward from `--seed`.
    #[arg(long)]
    count: Option<usize>,
    /// Output file, or output directory when `--count` exceeds 1.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Failure-rate growth per flight, in percent.
    #[arg(long)]
    deterioration: Option<f64>,
    #[arg(long)]
    horizon_factor: Option<f64>,
    #[arg(long)]
    capacity: Option<u32>,
    /// Share of the fleet in the shop at time 0.
    #[arg(long)]
    shop_fraction: Option<f64>,
}

/// Seeds tried per requested file before giving up.
const SEEDS_PER_FILE: usize = 50;

pub fn run(args: GenArgs, file: &FileConfig) -> Result<(), CliError> {
    let mut r = Resolver::new(file, "gen");
    let mode = r.pick("mode", args.mode, Mode::Static)?;
    let aircraft = r.pick("aircraft", args.aircraft, 10)?;
    let seed = r.seed(args.seed)?;
    let base = match mode {
        Mode::Static => GenParams::static_suite(aircraft, 3, 3, seed),
        Mode::Dynamic => GenParams::dynamic_suite(aircraft, seed),
    };
    let params = GenParams {
        trade_count: r.pick("trades", args.trades, base.trade_count)?,
        wave_count: r.pick("waves", args.waves, base.wave_count)?,
        deterioration_pct: r.pick("deterioration", args.deterioration, base.deterioration_pct)?,
        horizon_factor: r.pick("horizon-factor", args.horizon_factor, base.horizon_factor)?,
        capacity: r.pick("capacity", args.capacity, base.capacity)?,
        shop_fraction: r.pick("shop-fraction", args.shop_fraction, base.shop_fraction)?,
        ..base
    };
    let count = r.pick("count", args.count, 1)?;
    let default_out = match (count, mode) {
        (1, Mode::Static) => "instance.json",
        (1, Mode::Dynamic) => "scenario.json",
        _ => ".",
    };
    let out: PathBuf = r.pick("out", args.out, PathBuf::from(default_out))?;
    let config = r.finish();
    params.check().map_err(|e| CliError::Usage(e.to_string()))?;
    if count == 0 {
        return Err(CliError::Usage("`count` must be at least 1".into()));
    }

    let mut written = 0;
    let mut s = seed;
    while written < count {
        if (s - seed) as usize >= count * SEEDS_PER_FILE {
            return Err(CliError::Invalid(format!("only {written} of {count} seeds produced an instance")));
        }
        let p = GenParams { seed: s, ..params.clone() };
        s += 1;
        let text = match p.mode {
            GenMode::Static => match gen_static(&p) {
                Ok(inst) => instance_to_json(&inst),
                Err(e @ GenError::WavePlacement { .. }) if count > 1 => {
                    eprintln!("skipping: {e}");
                    continue;
                }
                Err(e) => return Err(CliError::Invalid(e.to_string())),
            },
            GenMode::Dynamic => scenario_to_json(&gen_dynamic(&p).map_err(|e| CliError::Invalid(e.to_string()))?),
        };
        let path = if count == 1 {
            out.clone()
        } else {
            let tag = match mode {
                Mode::Static => "static",
                Mode::Dynamic => "dynamic",
            };
            out.join(format!("{tag}-n{}-s{}.json", p.aircraft_count, p.seed))
        };
        let seed_used = p.seed;
        write_with_sidecar(&path, &text, seed_used, Some(p), &config)?;
        println!("{}", path.display());
        written += 1;
    }
    Ok(())
}
