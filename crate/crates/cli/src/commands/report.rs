//! `imu-movie report` — re-render the table and fold chart from an existing
//! metrics records file, without re-running the evaluation.

use std::path::PathBuf;

use clap::Args;
use serde_json::Value;

use crate::commands::eval::{FOLD_PLOT_FILE, RECORDS_FILE};
use crate::error::CliError;
use crate::manifest::write_atomic;
use crate::plot::{self, FoldBars};
use crate::Ctx;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Records file written by `eval` (default `<out>/eval_records.jsonl`).
    #[arg(long, value_name = "PATH")]
    pub records: Option<PathBuf>,
}

fn opt(v: &Value) -> Option<f64> {
    v.as_f64()
}

fn fmt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

pub fn run(ctx: &Ctx, args: &ReportArgs) -> Result<(), CliError> {
    let path = args.records.clone().unwrap_or_else(|| ctx.out.join(RECORDS_FILE));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;

    let mut bars = Vec::new();
    let mut aggregate = None;
    println!(
        "{:<5} {:<4} {:<8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>6}",
        "round", "fold", "subject", "acc", "prec", "rec", "fpr", "ev-rec", "ev-fp"
    );
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let record: Value = serde_json::from_str(line)
            .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        match record["record"].as_str() {
            Some("fold") => {
                let round = record["round"].as_u64().unwrap_or(0);
                let w = &record["window"];
                println!(
                    "{:<5} {:<4} {:<8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>6}",
                    round,
                    record["fold"].as_u64().unwrap_or(0),
                    record["test_subject"].as_str().unwrap_or("?"),
                    fmt(opt(&w["accuracy"])),
                    fmt(opt(&w["precision"])),
                    fmt(opt(&w["recall"])),
                    fmt(opt(&w["fpr"])),
                    fmt(opt(&record["events"]["recall"])),
                    record["events"]["false_positives"].as_u64().unwrap_or(0),
                );
                if round == 0 {
                    bars.push(FoldBars {
                        label: record["test_subject"].as_str().unwrap_or("?").to_string(),
                        values: [
                            opt(&w["accuracy"]),
                            opt(&w["precision"]),
                            opt(&w["recall"]),
                            opt(&w["fpr"]),
                        ],
                    });
                }
            }
            Some("aggregate") => aggregate = Some(record),
            other => {
                return Err(CliError::data(format!(
                    "{}: unknown record type {other:?}",
                    path.display()
                )))
            }
        }
    }
    let aggregate = aggregate
        .ok_or_else(|| CliError::data(format!("{}: no aggregate record", path.display())))?;
    println!(
        "aggregate over {} round(s): accuracy {} [{}, {}]  event recall {} [{}, {}]",
        aggregate["rounds"].as_u64().unwrap_or(0),
        fmt(opt(&aggregate["window_accuracy"]["mean"])),
        fmt(opt(&aggregate["window_accuracy"]["min"])),
        fmt(opt(&aggregate["window_accuracy"]["max"])),
        fmt(opt(&aggregate["event_recall"]["mean"])),
        fmt(opt(&aggregate["event_recall"]["min"])),
        fmt(opt(&aggregate["event_recall"]["max"])),
    );

    if bars.is_empty() {
        return Err(CliError::data(format!("{}: no fold records", path.display())));
    }
    std::fs::create_dir_all(&ctx.out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", ctx.out.display())))?;
    let plot_path = ctx.out.join(FOLD_PLOT_FILE);
    write_atomic(&plot_path, &plot::fold_bars(&bars).encode_png())?;
    println!("wrote {}", plot_path.display());
    Ok(())
}
