//! Command-line runner for the leakage-safe kidney-disease workflow.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use leakless::dataset::write_csv_string;
use leakless::evaluate::{CvMode, CvResult, MetricReport};
use leakless::experiment::{
    self, compare, ExperimentConfig, FeatureSetChoice, FeatureSetId, PaperTable,
};
use leakless::models::Algorithm;
use leakless::Error;

const FETCH_HINT: &str = "The UCI Chronic Kidney Disease data set is not at the configured path. \
Download it from https://archive.ics.uci.edu/dataset/336/chronic+kidney+disease, unpack \
chronic_kidney_disease_full.arff, then set `dataset` in the config or the LEAKLESS_DATASET \
environment variable to its path.";

#[derive(Parser)]
#[command(name = "leakless", version, about = "Leakage-safe CKD preparation, hybrid feature selection and model evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest, split, encode/scale/impute, remove outliers and oversample the training rows.
    Prepare(Common),
    /// Run the hybrid feature selection on the prepared training rows.
    Select(Common),
    /// Train every configured model on every requested feature set.
    Train(Common),
    /// Repeated stratified cross-validation.
    Validate(Common),
    /// Held-out test metrics.
    Evaluate(Common),
    /// The whole workflow; writes the run report.
    Run(Common),
    /// Run and place every reproduced cell next to the published value.
    Reproduce {
        #[command(flatten)]
        common: Common,
        /// Tables to compare (II, III, IV, V, VI, VII).
        #[arg(long, value_delimiter = ',', default_value = "II,III,IV,V,VI,VII")]
        tables: Vec<String>,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config; unspecified keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Without it results go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// f1, f2, f3 or all.
    #[arg(long)]
    features: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    stratify_split: bool,
    /// Reduced profile: 100 trees / boosting stages everywhere.
    #[arg(long)]
    ci: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Paper,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Markdown,
    Both,
}

impl Common {
    fn config(&self) -> leakless::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        }
        .with_env_overrides();
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(m) = self.mode {
            cfg.cv.mode = match m {
                Mode::Paper => CvMode::PaperFaithful,
                Mode::Strict => CvMode::Strict,
            };
        }
        if let Some(f) = &self.features {
            cfg.feature_sets = f.parse::<FeatureSetChoice>()?;
        }
        if self.stratify_split {
            cfg.stratify_split = true;
        }
        if self.ci {
            cfg = cfg.ci_profile();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Writes `name.json` / `name.md` into the output directory, or prints them.
struct Sink<'a> {
    out: Option<&'a Path>,
    format: Format,
}

impl Sink<'_> {
    fn emit(&self, name: &str, json: &str, markdown: Option<String>) -> leakless::Result<()> {
        let want_json = self.format != Format::Markdown || markdown.is_none();
        let want_md = self.format != Format::Json;
        match self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                if want_json {
                    std::fs::write(dir.join(format!("{name}.json")), json)?;
                }
                if let (true, Some(md)) = (want_md, &markdown) {
                    std::fs::write(dir.join(format!("{name}.md")), md)?;
                }
            }
            None => {
                if want_json {
                    println!("{json}");
                }
                if let (true, Some(md)) = (want_md, &markdown) {
                    println!("{md}");
                }
            }
        }
        Ok(())
    }

    fn file(&self, name: &str, contents: &str) -> leakless::Result<()> {
        if let Some(dir) = self.out {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(name), contents)?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> leakless::Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

#[derive(Serialize)]
struct CvEntry<'a> {
    feature_set: FeatureSetId,
    model: Algorithm,
    mode: &'static str,
    cv: &'a CvResult,
}

#[derive(Serialize)]
struct TestEntry<'a> {
    feature_set: FeatureSetId,
    model: Algorithm,
    test: &'a MetricReport,
}

fn execute(command: Command) -> leakless::Result<()> {
    let (common, tables) = match command {
        Command::Reproduce { common, tables } => (common, Some(tables)),
        Command::Prepare(c) => return prepare(&c),
        Command::Select(c) => return select(&c),
        Command::Train(c) => return train(&c),
        Command::Validate(c) => return validate(&c),
        Command::Evaluate(c) => return evaluate(&c),
        Command::Run(c) => (c, None),
    };
    let cfg = common.config()?;
    let sink = Sink {
        out: common.out.as_deref(),
        format: common.format,
    };
    let report = experiment::run(&cfg)?;
    sink.emit("report", &report.to_json()?, Some(report.to_markdown()))?;
    if let Some(tables) = tables {
        let tables = tables.iter().map(|t| t.parse::<PaperTable>()).collect::<leakless::Result<Vec<_>>>()?;
        let cmp = compare(&report, &tables);
        sink.emit("comparison", &to_json(&cmp)?, Some(cmp.to_markdown()))?;
        if sink.out.is_some() {
            print!("{}", cmp.to_markdown());
        }
    }
    Ok(())
}

fn prepare(c: &Common) -> leakless::Result<()> {
    let cfg = c.config()?;
    let sink = Sink { out: c.out.as_deref(), format: c.format };
    let loaded = experiment::load(&cfg)?;
    let res = experiment::prepare(&cfg, &loaded)?;
    let body = json!({
        "dataset": loaded.dataset,
        "split": loaded.split_summary,
        "resampling": res.record,
        "lof_removed_rows": res.removed,
        "warnings": res.warnings,
    });
    let md = format!(
        "Training rows {} -> {} after LOF ({} removed) -> {} after SMOTE.\n",
        res.record.training.values().sum::<usize>(),
        res.record.after_lof.values().sum::<usize>(),
        res.record.lof_removed,
        res.record.after_smote.values().sum::<usize>()
    );
    sink.emit("prepare", &to_json(&body)?, Some(md))?;
    sink.file("pipeline.json", &res.pipeline.to_json()?)?;
    sink.file("prepared_train.csv", &write_csv_string(&res.frame)?)?;
    Ok(())
}

fn select(c: &Common) -> leakless::Result<()> {
    let cfg = c.config()?;
    let loaded = experiment::load(&cfg)?;
    let res = experiment::prepare(&cfg, &loaded)?;
    let sel = experiment::select(&cfg, &res)?;
    Sink { out: c.out.as_deref(), format: c.format }.emit("selection", &sel.to_json()?, Some(sel.to_markdown()))
}

type Staged = (ExperimentConfig, experiment::Loaded, Vec<experiment::PreparedSet>);

fn staged(c: &Common) -> leakless::Result<Staged> {
    let cfg = c.config()?;
    let loaded = experiment::load(&cfg)?;
    let res = experiment::prepare(&cfg, &loaded)?;
    let sel = experiment::select(&cfg, &res)?;
    let sets = experiment::build_sets(&cfg, &loaded, &res, &sel)?;
    Ok((cfg, loaded, sets))
}

fn train(c: &Common) -> leakless::Result<()> {
    let (cfg, _, sets) = staged(c)?;
    let sink = Sink { out: c.out.as_deref(), format: c.format };
    let mut summary = Vec::new();
    for set in &sets {
        sink.file(&format!("pipeline_{}.json", set.id.name()), &set.pipeline.to_json()?)?;
        for model in experiment::train_set(&cfg, set)? {
            let name = format!("model_{}_{}.json", set.id.name(), model.algorithm().id());
            sink.file(&name, &model.to_json()?)?;
            summary.push(json!({
                "feature_set": set.id,
                "model": model.algorithm(),
                "features": model.features,
                "warnings": model.warnings,
                "file": name,
            }));
        }
    }
    sink.emit("train", &to_json(&summary)?, None)
}

fn validate(c: &Common) -> leakless::Result<()> {
    let (cfg, loaded, sets) = staged(c)?;
    let mut results = Vec::new();
    for set in &sets {
        results.push((set.id, experiment::validate_set(&cfg, &loaded, set)?));
    }
    let entries: Vec<CvEntry> = results
        .iter()
        .flat_map(|(id, cvs)| {
            cfg.models.iter().zip(cvs).map(|(&model, cv)| CvEntry {
                feature_set: *id,
                model,
                mode: cfg.cv.mode.label(),
                cv,
            })
        })
        .collect();
    let mut md = String::from("| Feature set | Model | Mean (%) | Std (%) |\n|---|---|---|---|\n");
    for e in &entries {
        md.push_str(&format!(
            "| {} | {} | {:.2} | {:.2} |\n",
            e.feature_set.name(),
            e.model.display_name(),
            e.cv.mean * 100.0,
            e.cv.std * 100.0
        ));
    }
    Sink { out: c.out.as_deref(), format: c.format }.emit("validate", &to_json(&entries)?, Some(md))
}

fn evaluate(c: &Common) -> leakless::Result<()> {
    let (cfg, _, sets) = staged(c)?;
    let mut results = Vec::new();
    for set in &sets {
        for model in experiment::train_set(&cfg, set)? {
            let m = leakless::evaluate::evaluate_test(&model, &set.test, &cfg.positive_class)?;
            results.push((set.id, model.algorithm(), m));
        }
    }
    let entries: Vec<TestEntry> = results
        .iter()
        .map(|(feature_set, model, test)| TestEntry {
            feature_set: *feature_set,
            model: *model,
            test,
        })
        .collect();
    let mut md = String::from("| Feature set | Model | Accuracy | F1 (macro) | AUC (macro) |\n|---|---|---|---|---|\n");
    for e in &entries {
        md.push_str(&format!(
            "| {} | {} | {:.0} | {:.0} | {:.2} |\n",
            e.feature_set.name(),
            e.model.display_name(),
            e.test.accuracy * 100.0,
            e.test.f1_macro * 100.0,
            e.test.auc_macro * 100.0
        ));
    }
    Sink { out: c.out.as_deref(), format: c.format }.emit("evaluate", &to_json(&entries)?, Some(md))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::MissingData(_) => 3,
        _ => 4,
    }
}

fn report_error(kind: &str, message: String, code: u8, hint: Option<&str>) -> ExitCode {
    let mut body = json!({ "error": { "kind": kind, "message": message, "exit_code": code } });
    if let Some(h) = hint {
        body["error"]["hint"] = json!(h);
    }
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error("usage", e.to_string().trim().to_string(), 2, None),
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            let hint = matches!(e, Error::MissingData(_)).then_some(FETCH_HINT);
            report_error(e.kind(), e.to_string(), code, hint)
        }
    }
}
