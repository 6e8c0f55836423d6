use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tllc::characters::{CharacterSpec, ElementSpec};
use tllc::compute;
use tllc::config::{Format, RunConfig, CONFIG_ENV};
use tllc::suites::SuiteId;
use tllc::RunError;
use tllc_core::PrimeConfig;

#[derive(Parser)]
#[command(name = "tllc", version, about = "Exact checks for tame characters of GL(l) over Q_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites and write a report.
    Run(RunArgs),
    /// Evaluate a single quantity and print it as JSON.
    #[command(subcommand)]
    Compute(ComputeCmd),
    /// List the available suites.
    ListSuites,
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file; flags given here override it.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Suites to run (comma separated), or `all`.
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<String>,
    #[arg(long)]
    p: Option<u64>,
    #[arg(long)]
    ell: Option<u64>,
    /// Working p-adic precision N.
    #[arg(long)]
    precision: Option<u32>,
    /// Restrict to one extension kind (UnramQuad, RamQuad, UnramL, RamGaloisL).
    #[arg(long)]
    kind: Option<String>,
    /// TOML character file for the invariance suite.
    #[arg(long)]
    characters: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cutoff: Option<u32>,
    #[arg(long)]
    samples: Option<usize>,
    /// Torus classes per extension before the cutoff is lowered.
    #[arg(long)]
    max_classes: Option<u64>,
    /// Rank of the finite group GL(n, q).
    #[arg(long)]
    n: Option<usize>,
    /// Field size of the finite group GL(n, q).
    #[arg(long)]
    q: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, RunError> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if !self.suites.is_empty() {
            c.suites = self.suites.clone();
        }
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $(if let Some(v) = &self.$f { c.$g = v.clone().into(); })* };
        }
        set!(p => p, ell => ell, precision => precision, format => format, seed => seed, cutoff => cutoff, samples => samples);
        set!(kind => kind, characters => characters, n => gl_n, q => gl_q, max_classes => max_classes);
        Ok(c)
    }
}

#[derive(Args)]
struct ExtArgs {
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, default_value_t = 12)]
    precision: u32,
    #[arg(long, default_value = "UnramQuad")]
    kind: String,
    /// Integer `Δ` for the defining polynomial.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<i64>,
    /// Degree for the odd kinds.
    #[arg(long, default_value_t = 3)]
    ell: u64,
}

impl ExtArgs {
    fn spec(&self) -> CharacterSpec {
        CharacterSpec { kind: self.kind.clone(), delta: self.delta, pi_value: [0, 1], tame: 0, alpha: None }
    }

    fn prime(&self) -> Result<PrimeConfig, RunError> {
        let quadratic = self.kind.ends_with("Quad");
        Ok(PrimeConfig::new(self.p, self.precision, if quadratic { 2 } else { self.ell })?)
    }
}

#[derive(Args)]
struct PointArgs {
    /// Power of p in front of `w`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    w_shift: i64,
    /// Coefficients of `w` in the power basis.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    w: Vec<i64>,
}

impl PointArgs {
    fn spec(&self) -> ElementSpec {
        ElementSpec { shift: self.w_shift, coeffs: self.w.clone() }
    }
}

#[derive(Subcommand)]
enum ComputeCmd {
    /// Hilbert symbol (a, b) by closed form and by solvability.
    Hilbert {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Normalised Weil index gamma(a, psi).
    Gamma {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        level: i64,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Langlands constant of a quadratic extension.
    Lambda {
        #[command(flatten)]
        ext: ExtArgs,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        level: i64,
    },
    /// Depth n(w) of a torus element.
    Depth {
        #[command(flatten)]
        ext: ExtArgs,
        #[command(flatten)]
        point: PointArgs,
    },
    /// The character formula at w.
    FormulaEval {
        #[command(flatten)]
        ext: ExtArgs,
        #[command(flatten)]
        point: PointArgs,
        /// Value at the uniformizer as `k/m`, meaning exp(2 pi i k/m).
        #[arg(long, default_value = "0/1")]
        pi_value: String,
        #[arg(long, default_value_t = 0)]
        tame: u64,
        #[arg(long, allow_hyphen_values = true)]
        alpha_shift: Option<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Vec<i64>,
        #[arg(long, default_value_t = 0)]
        tau: usize,
        /// Use the opposite positive system.
        #[arg(long)]
        opposite: bool,
    },
    /// Deligne-Lusztig value R_{T,theta}(s) on GL(n, q).
    DlValue {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Element of F_{q^n}* in the field's integer encoding.
        #[arg(long)]
        s: u64,
        /// theta = zeta^{k dlog}.
        #[arg(long)]
        k: u64,
    },
}

fn compute(cmd: ComputeCmd) -> Result<serde_json::Value, RunError> {
    Ok(match cmd {
        ComputeCmd::Hilbert { p, a, b } => {
            let pc = PrimeConfig::new(p, 12, 2)?;
            compute::hilbert_json(&compute::parse_padic(&pc, &a)?, &compute::parse_padic(&pc, &b)?)
        }
        ComputeCmd::Gamma { p, level, a } => {
            let pc = PrimeConfig::new(p, 12, 2)?;
            compute::gamma_json(&pc, &compute::parse_padic(&pc, &a)?, level)?
        }
        ComputeCmd::Lambda { ext, level } => compute::lambda_json(&ext.spec(), &ext.prime()?, level)?,
        ComputeCmd::Depth { ext, point } => compute::depth_json(&ext.spec(), &ext.prime()?, &point.spec())?,
        ComputeCmd::FormulaEval { ext, point, pi_value, tame, alpha_shift, alpha, tau, opposite } => {
            let (k, m) = pi_value.split_once('/').context("pi value must be k/m")?;
            let mut spec = ext.spec();
            spec.pi_value = [k.parse().context("pi value numerator")?, m.parse().context("pi value order")?];
            spec.tame = tame;
            if !alpha.is_empty() {
                spec.alpha = Some(ElementSpec { shift: alpha_shift.unwrap_or(0), coeffs: alpha });
            }
            let (w, v) = compute::formula_eval(&spec, &ext.prime()?, &point.spec(), tau, opposite)?;
            json!({ "w": w.to_string(), "value": compute::formula_json(&v) })
        }
        ComputeCmd::DlValue { n, q, s, k } => compute::dl_json(n, q, s, k)?,
    })
}

fn run(args: RunArgs) -> Result<bool, RunError> {
    let cfg = args.config()?;
    let report = tllc::run_suites(&cfg, args.jobs)?;
    let text = report.render(cfg.format)?;
    match &args.output {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes()).context("writing report")?,
    }
    eprintln!("{} checks, {} failed", report.checks, report.failures);
    Ok(report.failures == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Compute(cmd) => compute(cmd).map(|v| {
            let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&v).expect("JSON value"));
            true
        }),
        Command::ListSuites => {
            let mut out = std::io::stdout().lock();
            for s in SuiteId::ALL {
                let _ = writeln!(out, "{:<14} {}", s.name(), s.description());
            }
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
