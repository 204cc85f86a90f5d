//! `imu-movie eval` — leave-one-subject-out cross-validation over a dataset,
//! with line-delimited metric records, a table, and a per-fold bar chart.

use std::path::PathBuf;

use clap::Args;
use imu_movie::eval::{losocv, LosocvReport};

use crate::error::CliError;
use crate::manifest::{load_dataset, write_atomic};
use crate::plot::{self, FoldBars};
use crate::Ctx;

pub const RECORDS_FILE: &str = "eval_records.jsonl";
pub const FOLD_PLOT_FILE: &str = "eval_folds.png";

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Dataset manifest path.
    #[arg(long, value_name = "PATH")]
    pub manifest: PathBuf,
    /// Cross-validation rounds (overrides the config file).
    #[arg(long)]
    pub rounds: Option<usize>,
}

/// Per-fold metric bars for the chart: first round only, one group per fold.
fn first_round_bars(report: &LosocvReport) -> Vec<FoldBars> {
    report.rounds[0]
        .folds
        .iter()
        .map(|fold| FoldBars {
            label: fold.spec.test_subject.clone(),
            values: [
                fold.window.accuracy(),
                fold.window.precision(),
                fold.window.recall(),
                fold.window.false_positive_rate(),
            ],
        })
        .collect()
}

pub fn run(ctx: &Ctx, args: &EvalArgs) -> Result<(), CliError> {
    let dataset = load_dataset(&args.manifest)?;
    let options = ctx.config.losocv_options(ctx.seed, args.rounds);
    let report = losocv(&dataset, &options)?;

    print!("{}", report.table());

    std::fs::create_dir_all(&ctx.out)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", ctx.out.display())))?;
    let mut lines = report.records().join("\n");
    lines.push('\n');
    let records_path = ctx.out.join(RECORDS_FILE);
    write_atomic(&records_path, lines.as_bytes())?;

    let chart = plot::fold_bars(&first_round_bars(&report));
    let plot_path = ctx.out.join(FOLD_PLOT_FILE);
    write_atomic(&plot_path, &chart.encode_png())?;
    println!("wrote {} and {}", records_path.display(), plot_path.display());
    Ok(())
}
