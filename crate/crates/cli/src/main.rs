use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use prsbench::harness::{
    output_path, run_experiment, validate_config, write_report, ExperimentConfig, Params, CONFIG_SCHEMA,
    OUT_DIR_ENV, REPORT_SCHEMA,
};

/// Desk-scale experiments on pseudorandom quantum states.
#[derive(Parser)]
#[command(
    name = "prsbench",
    version,
    after_help = "Exit status: 0 when every target passes, 2 when a target is missed, 1 on error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Overlap tail of Haar states against the exact and bounding curves.
    HaarTail(RunArgs),
    /// Clifford sampler uniformity, group order and frame potential.
    CliffordUniformity(RunArgs),
    /// Frame potential of random-circuit design states.
    DesignFramePotential(RunArgs),
    /// Classical-shadow fidelity estimation at T = T_min.
    ShadowsBench(RunArgs),
    /// Shadow rule versus Bayes rule on the hidden-bit game.
    Distinguish(RunArgs),
    /// Collision-pair sampling and brute-force key search.
    BinaryPhaseAttack(RunArgs),
    /// Swap-test advantage against a Haar unitary family.
    PruAdvantage(RunArgs),
    /// Diamond versus Frobenius distance on random unitaries.
    NormsCheck(RunArgs),
    /// Permanent likelihood versus design Monte Carlo.
    LikelihoodCheck(RunArgs),
    /// Exhaustive k-wise independence check.
    KwiseExact(RunArgs),
    /// Report every precondition violation of a config.
    Validate(ValidateArgs),
    /// Print a shipped JSON schema.
    Schema {
        #[arg(value_parser = ["config", "report"], default_value = "config")]
        which: String,
    },
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Also print the report to stdout.
    #[arg(long)]
    print: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// Experiment name, when no config file is given.
    #[arg(long)]
    experiment: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Report path (overrides the config and the output directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for trial-parallel experiments.
    #[arg(long)]
    threads: Option<usize>,
    /// Default output directory.
    #[arg(long, env = OUT_DIR_ENV, hide_env_values = true)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args, Default)]
#[command(next_help_heading = "Parameter overrides")]
struct Overrides {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    key_count: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    batches: Option<usize>,
    #[arg(long)]
    observables: Option<usize>,
    #[arg(long)]
    c_shadow: Option<f64>,
    #[arg(long)]
    design_c: Option<f64>,
    #[arg(long)]
    pairs: Option<usize>,
    /// mixer or balanced.
    #[arg(long)]
    backend: Option<String>,
    /// Comma-separated list of backends.
    #[arg(long, value_delimiter = ',')]
    backends: Option<Vec<String>>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    permanent_cap: Option<usize>,
    #[arg(long)]
    forced_hidden: Option<u8>,
    #[arg(long)]
    collision_samples: Option<usize>,
    #[arg(long)]
    uniformity_n: Option<usize>,
    #[arg(long)]
    uniformity_samples: Option<usize>,
    /// Comma-separated list.
    #[arg(long, value_delimiter = ',')]
    family_sizes: Option<Vec<usize>>,
    #[arg(long)]
    queries: Option<usize>,
    /// swap-test or ignore.
    #[arg(long)]
    adversary: Option<String>,
}

fn parse_named<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).with_context(|| format!("invalid {what} `{s}`"))
}

impl Overrides {
    fn to_params(&self) -> Result<Params> {
        Ok(Params {
            n: self.n,
            m: self.m,
            t: self.t,
            key_count: self.key_count,
            trials: self.trials,
            samples: self.samples,
            epsilons: self.epsilons.clone(),
            eps: self.eps,
            delta: self.delta,
            threshold: self.threshold,
            tolerance: self.tolerance,
            batches: self.batches,
            observables: self.observables,
            c_shadow: self.c_shadow,
            design_c: self.design_c,
            pairs: self.pairs,
            backend: self.backend.as_deref().map(|s| parse_named("backend", s)).transpose()?,
            backends: self
                .backends
                .as_ref()
                .map(|v| v.iter().map(|s| parse_named("backend", s)).collect::<Result<Vec<_>>>())
                .transpose()?,
            mc_samples: self.mc_samples,
            permanent_cap: self.permanent_cap,
            forced_hidden: self.forced_hidden,
            collision_samples: self.collision_samples,
            uniformity_n: self.uniformity_n,
            uniformity_samples: self.uniformity_samples,
            family_sizes: self.family_sizes.clone(),
            queries: self.queries,
            adversary: self.adversary.as_deref().map(|s| parse_named("adversary", s)).transpose()?,
        })
    }
}

fn build_config(experiment: Option<&str>, common: &Common) -> Result<ExperimentConfig> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
        None => match experiment {
            Some(name) => ExperimentConfig::new(name, 0),
            None => bail!("give --config or --experiment"),
        },
    };
    if let Some(name) = experiment {
        if config.experiment != name {
            bail!("config is for `{}` but the subcommand is `{name}`", config.experiment);
        }
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    config.params.overlay(&common.overrides.to_params()?);
    Ok(config)
}

fn run(name: &str, args: &RunArgs) -> Result<ExitCode> {
    if let Some(threads) = args.common.threads {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let config = build_config(Some(name), &args.common)?;
    let report = run_experiment(&config)?;
    let path = output_path(&report.config, args.common.out.as_deref(), args.common.out_dir.as_deref());
    write_report(&report, &path)?;
    for t in &report.targets {
        eprintln!("{} {}: {}", if t.passed { "PASS" } else { "FAIL" }, t.name, t.description);
    }
    if args.print {
        println!("{}", report.to_json()?);
    } else {
        println!("{}", path.display());
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::HaarTail(a) => run("haar-tail", a),
        Command::CliffordUniformity(a) => run("clifford-uniformity", a),
        Command::DesignFramePotential(a) => run("design-frame-potential", a),
        Command::ShadowsBench(a) => run("shadows-bench", a),
        Command::Distinguish(a) => run("distinguish", a),
        Command::BinaryPhaseAttack(a) => run("binary-phase-attack", a),
        Command::PruAdvantage(a) => run("pru-advantage", a),
        Command::NormsCheck(a) => run("norms-check", a),
        Command::LikelihoodCheck(a) => run("likelihood-check", a),
        Command::KwiseExact(a) => run("kwise-exact", a),
        Command::Validate(a) => validate(a),
        Command::Schema { which } => {
            println!("{}", if which == "report" { REPORT_SCHEMA } else { CONFIG_SCHEMA });
            Ok(ExitCode::SUCCESS)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn validate(args: &ValidateArgs) -> Result<ExitCode> {
    let config = build_config(args.experiment.as_deref(), &args.common)?;
    let errors = validate_config(&config);
    if errors.is_empty() {
        println!("ok");
        return Ok(ExitCode::SUCCESS);
    }
    for e in &errors {
        eprintln!("violation: {e}");
    }
    Ok(ExitCode::from(1))
}
