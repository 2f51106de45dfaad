use std::path::PathBuf;

use attn_core::config::PipelineConfig;
use attn_core::io::read_jsonl;
use attn_core::metrics::{brightness_sweep, budget_sweep, condition_label, EvalReport};
use attn_core::toytrain::{make_synthetic_task, train_with_eval, Dataset, Objective};
use attn_core::{BoxAnnotation, Detection, Error, Geometry, Result};
use clap::{Args, Subcommand};

use crate::common::require;

#[derive(Subcommand, Debug)]
pub enum SweepCommand {
    /// mAP per brightness factor from precomputed detections.
    Brightness(BrightnessArgs),
    /// Held-out command error per training budget, marked vs unmarked.
    Budget(BudgetArgs),
}

#[derive(Args, Debug)]
pub struct BrightnessArgs {
    #[arg(long)]
    pub gt: PathBuf,
    /// Holds `<factor>.jsonl` detections for every factor (`0.75.jsonl`, `1.jsonl`, ...).
    #[arg(long)]
    pub dets_dir: PathBuf,
    /// Comma-separated factors; overrides eval.factors.
    #[arg(long, value_delimiter = ',')]
    pub factors: Option<Vec<f64>>,
    /// Receives brightness.json and brightness.csv.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BudgetArgs {
    /// Comma-separated fractions; overrides eval.fractions.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    /// Receives budget_marked.{json,csv} and budget_unmarked.{json,csv}.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(cfg: &PipelineConfig, cmd: SweepCommand) -> Result<()> {
    match cmd {
        SweepCommand::Brightness(a) => brightness(cfg, &a),
        SweepCommand::Budget(a) => budget(cfg, &a),
    }
}

fn save(cfg: &PipelineConfig, mut report: EvalReport, out: &std::path::Path, stem: &str) -> Result<()> {
    report.metadata.config_hash = cfg.hash();
    report.save(&out.join(format!("{stem}.json")), &out.join(format!("{stem}.csv")))?;
    print!("{}", report.to_csv());
    Ok(())
}

fn brightness(cfg: &PipelineConfig, a: &BrightnessArgs) -> Result<()> {
    let factors = a.factors.clone().unwrap_or_else(|| cfg.eval.factors.clone());
    let gts: Vec<BoxAnnotation> = read_jsonl(&a.gt)?;
    require(&a.dets_dir)?;
    let mut loaded = Vec::with_capacity(factors.len());
    for &f in &factors {
        let path = a.dets_dir.join(format!("{}.jsonl", condition_label(f)));
        let dets: Option<Vec<Detection>> = if path.exists() { Some(read_jsonl(&path)?) } else { None };
        loaded.push((f, dets));
    }
    let report = brightness_sweep(&gts, &factors, |f| {
        loaded.iter().find(|(x, _)| *x == f).and_then(|(_, d)| d.clone())
    })?;
    save(cfg, report, &a.out, "brightness")
}

fn budget(cfg: &PipelineConfig, a: &BudgetArgs) -> Result<()> {
    let fractions = a.fractions.clone().unwrap_or_else(|| cfg.eval.fractions.clone());
    let side = cfg.eval.budget_side;
    let g = Geometry::new(side, side);
    let mut tc = cfg.train;
    tc.objective = Objective::Command;
    if tc.net.input_channels != 3 {
        return Err(Error::Config("the budget sweep needs train.net.input_channels = 3".into()));
    }
    let data_seed = cfg.child_seed("budget-data");
    let held_seed = cfg.child_seed("budget-held-out");
    let train_seed = cfg.child_seed("budget-train");
    for (marked, stem) in [(true, "budget_marked"), (false, "budget_unmarked")] {
        let pool = make_synthetic_task(cfg.eval.budget_samples, g, data_seed, marked)?;
        let held = make_synthetic_task(cfg.eval.budget_held_out, g, held_seed, marked)?;
        let train_fn = |subset: &Dataset, epochs: usize, seed: u64| -> Result<Vec<f64>> {
            let run = attn_core::toytrain::TrainConfig { epochs, ..tc };
            Ok(train_with_eval(subset, Some(&held), &run, seed)?.log.eval_errors())
        };
        let report = budget_sweep(train_fn, &pool, &fractions, tc.epochs, train_seed)?;
        log::info!("{stem} done");
        save(cfg, report, &a.out, stem)?;
    }
    Ok(())
}
