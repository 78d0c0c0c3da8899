//! `dfalc`: normalize ontologies, revise groundings by gradient descent,
//! evaluate success rates, and run the synthetic experiments.
//!
//! Exit codes: 0 success, 1 usage error, 2 input error, 3 numeric or
//! sampling failure.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dfalc::grounding::{
    crispify, fuzzy_success_rate, success_rate, CrispConfig, Grounding, GroundingError,
    UnknownPolicy,
};
use dfalc::harness::{
    gen_synthetic_auto, run_cqa, run_mask_revision, HarnessError, MaskSpec,
};
use dfalc::learner::{history_csv, train, LearnerError, LossKind, TNorm, TrainConfig};
use dfalc::normalizer::{normalize, render_normalized, seed_fresh_assertions, SeedError};
use dfalc::ontology::{render_ontology, Ontology};
use dfalc::parser::parse_ontology;

#[derive(Parser)]
#[command(name = "dfalc", version, about = "Fuzzy ALC grounding revision")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rewrite a TBox into the seven normal forms.
    Normalize {
        /// Input ontology file.
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file for the normalized ontology.
        #[arg(long)]
        out: PathBuf,
    },
    /// Revise a grounding against an ontology by gradient descent.
    Ground {
        #[arg(long)]
        ontology: PathBuf,
        /// Initial grounding (JSON).
        #[arg(long)]
        init: PathBuf,
        #[arg(long, value_enum, default_value_t = LossArg::Hierarchical)]
        loss: LossArg,
        #[arg(long, default_value_t = 2e-4)]
        lr: f64,
        #[arg(long, default_value_t = 10)]
        patience: usize,
        #[arg(long, default_value_t = 20_000)]
        max_epochs: usize,
        #[arg(long, default_value_t = 0.8)]
        alpha_prime: f64,
        #[arg(long, value_enum, default_value_t = TnormArg::Product)]
        tnorm: TnormArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep the raw evidence sums instead of clamping them to [0, 1].
        #[arg(long)]
        no_clamp_evidence: bool,
        /// Output file for the revised grounding (JSON).
        #[arg(long)]
        out: PathBuf,
        /// Optional per-epoch CSV training log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Evaluate a grounding's success rate against an ontology.
    Eval {
        #[arg(long)]
        ontology: PathBuf,
        #[arg(long)]
        grounding: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        crisp_alpha: f64,
        #[arg(long, value_enum, default_value_t = PolicyArg::UnknownSatisfies)]
        unknown_policy: PolicyArg,
    },
    /// Generate a consistent synthetic ontology with its ideal grounding.
    GenSynthetic {
        #[arg(long)]
        individuals: usize,
        #[arg(long)]
        concepts: usize,
        #[arg(long)]
        roles: usize,
        #[arg(long)]
        axioms: usize,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_ontology: PathBuf,
        #[arg(long)]
        out_ideal: PathBuf,
    },
    /// Run a seeded experiment and write its JSON report.
    Experiment {
        #[command(subcommand)]
        protocol: Protocol,
    },
}

#[derive(Subcommand)]
enum Protocol {
    /// Mask the ideal grounding and measure revision success.
    MaskRevision(ExperimentArgs),
    /// Conjunctive query answering over masked and revised groundings.
    Cqa(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, default_value_t = 0.2)]
    mask_rate: f64,
    #[arg(long, default_value_t = 0.2)]
    unknown_lo: f64,
    #[arg(long, default_value_t = 0.8)]
    unknown_hi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report output path (JSON).
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 12)]
    individuals: usize,
    #[arg(long, default_value_t = 6)]
    concepts: usize,
    #[arg(long, default_value_t = 2)]
    roles: usize,
    #[arg(long, default_value_t = 14)]
    axioms: usize,
    #[arg(long, default_value_t = 0.4)]
    density: f64,
    #[arg(long, value_enum, default_value_t = LossArg::Hierarchical)]
    loss: LossArg,
    #[arg(long, default_value_t = 2e-4)]
    lr: f64,
    #[arg(long, default_value_t = 10)]
    patience: usize,
    #[arg(long, default_value_t = 20_000)]
    max_epochs: usize,
    #[arg(long, default_value_t = 0.8)]
    alpha_prime: f64,
    /// Queries per shape (CQA only).
    #[arg(long, default_value_t = 20)]
    queries: usize,
    /// Answer threshold (CQA only).
    #[arg(long, default_value_t = 0.8)]
    threshold: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum LossArg {
    Hierarchical,
    Rule,
}

#[derive(Clone, Copy, ValueEnum)]
enum TnormArg {
    Product,
    Godel,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    UnknownSatisfies,
    UnknownFails,
}

enum CliError {
    /// Unreadable or invalid inputs (exit 2).
    Input(String),
    /// Numeric or sampling failures at run time (exit 3).
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<GroundingError> for CliError {
    fn from(e: GroundingError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LearnerError> for CliError {
    fn from(e: LearnerError) -> Self {
        match e {
            LearnerError::NonFiniteGradient(_) => CliError::Numeric(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SeedError> for CliError {
    fn from(e: SeedError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Unsatisfiable { .. } | HarnessError::QueryGeneration { .. } => {
                CliError::Numeric(e.to_string())
            }
            HarnessError::Learner(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn load_ontology(path: &Path) -> Result<Ontology, CliError> {
    parse_ontology(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_grounding(path: &Path) -> Result<Grounding, CliError> {
    Grounding::from_json(&read_file(path)?)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn train_config(
    loss: LossArg,
    lr: f64,
    patience: usize,
    max_epochs: usize,
    alpha_prime: f64,
    tnorm: TnormArg,
    seed: u64,
    clamp_evidence: bool,
) -> TrainConfig {
    TrainConfig {
        loss_kind: match loss {
            LossArg::Hierarchical => LossKind::Hierarchical,
            LossArg::Rule => LossKind::Rule,
        },
        learning_rate: lr,
        patience,
        max_epochs,
        alpha_prime,
        tnorm: match tnorm {
            TnormArg::Product => TNorm::Product,
            TnormArg::Godel => TNorm::Godel,
        },
        seed,
        clamp_evidence,
        tolerance: 1e-9,
    }
}

#[derive(Serialize)]
struct EvalSummary {
    crisp_alpha: f64,
    unknown_policy: &'static str,
    axioms: usize,
    success_rate_crisp: f64,
    success_rate_fuzzy: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Normalize { input, out } => {
            let o = load_ontology(&input)?;
            let nt = normalize(&o);
            write_file(&out, &render_normalized(&nt, &o))?;
            eprintln!(
                "normalized {} axioms into {} ({} fresh names)",
                o.tbox.len(),
                nt.axioms.len(),
                nt.fresh_defs.len()
            );
            Ok(())
        }
        Command::Ground {
            ontology,
            init,
            loss,
            lr,
            patience,
            max_epochs,
            alpha_prime,
            tnorm,
            seed,
            no_clamp_evidence,
            out,
            log,
        } => {
            let o = load_ontology(&ontology)?;
            let g = load_grounding(&init)?;
            let cfg = train_config(
                loss,
                lr,
                patience,
                max_epochs,
                alpha_prime,
                tnorm,
                seed,
                !no_clamp_evidence,
            );
            let nt = normalize(&o);
            let seeded = seed_fresh_assertions(&nt, &g)?;
            let result = train(seeded, &nt, &cfg)?;

            // Fresh names are normalization internals; persist only the
            // ontology's own signature.
            let mut revised = Grounding::new(result.grounding.individuals().to_vec());
            let keep: BTreeSet<&String> = o.signature().concepts().iter().collect();
            for name in result.grounding.concept_names() {
                if keep.contains(name) {
                    revised.insert_concept(
                        name.clone(),
                        result.grounding.concept(name).unwrap().clone(),
                    );
                }
            }
            for name in result.grounding.role_names() {
                revised.insert_role(name.clone(), result.grounding.role(name).unwrap().clone());
            }
            write_file(&out, &revised.to_json())?;
            if let Some(log_path) = log {
                write_file(&log_path, &history_csv(&result.history))?;
            }
            eprintln!(
                "trained {} epochs, final loss {:e}",
                result.history.len(),
                result.history.last().unwrap_or(&0.0)
            );
            Ok(())
        }
        Command::Eval {
            ontology,
            grounding,
            crisp_alpha,
            unknown_policy,
        } => {
            let o = load_ontology(&ontology)?;
            let g = load_grounding(&grounding)?;
            let alpha = CrispConfig::new(crisp_alpha)?;
            let policy = match unknown_policy {
                PolicyArg::UnknownSatisfies => UnknownPolicy::UnknownSatisfies,
                PolicyArg::UnknownFails => UnknownPolicy::UnknownFails,
            };
            let ci = crispify(&g, alpha);
            let summary = EvalSummary {
                crisp_alpha,
                unknown_policy: match policy {
                    UnknownPolicy::UnknownSatisfies => "unknown-satisfies",
                    UnknownPolicy::UnknownFails => "unknown-fails",
                },
                axioms: o.tbox.len(),
                success_rate_crisp: success_rate(&ci, &o.tbox, policy)?,
                success_rate_fuzzy: fuzzy_success_rate(&g, &o.tbox)?,
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&summary).expect("summary serializes")
            );
            Ok(())
        }
        Command::GenSynthetic {
            individuals,
            concepts,
            roles,
            axioms,
            density,
            seed,
            out_ontology,
            out_ideal,
        } => {
            let (o, ideal, _spec) =
                gen_synthetic_auto(individuals, concepts, roles, axioms, density, seed)?;
            write_file(&out_ontology, &render_ontology(&o))?;
            write_file(&out_ideal, &ideal.to_json())?;
            eprintln!(
                "generated {} axioms over {} individuals",
                o.tbox.len(),
                individuals
            );
            Ok(())
        }
        Command::Experiment { protocol } => {
            let (args, is_cqa) = match &protocol {
                Protocol::MaskRevision(a) => (a, false),
                Protocol::Cqa(a) => (a, true),
            };
            let (o, ideal, spec) = gen_synthetic_auto(
                args.individuals,
                args.concepts,
                args.roles,
                args.axioms,
                args.density,
                args.seed,
            )?;
            let mut mask = MaskSpec::new(
                args.mask_rate,
                args.unknown_lo,
                args.unknown_hi,
                args.seed.wrapping_add(1),
            );
            mask.concepts_only = false;
            let cfg = train_config(
                args.loss,
                args.lr,
                args.patience,
                args.max_epochs,
                args.alpha_prime,
                TnormArg::Product,
                args.seed,
                true,
            );
            let json = if is_cqa {
                let report = run_cqa(
                    &o,
                    &ideal,
                    &mask,
                    &cfg,
                    args.queries,
                    args.threshold,
                    Some(spec),
                )?;
                serde_json::to_string_pretty(&report).expect("report serializes")
            } else {
                let report = run_mask_revision(&o, &ideal, &mask, &cfg, Some(spec))?;
                serde_json::to_string_pretty(&report).expect("report serializes")
            };
            write_file(&args.report, &json)?;
            eprintln!("report written to {}", args.report.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error too.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
