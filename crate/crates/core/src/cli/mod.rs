//! Command-line surface: argument parsing, family resolution and report emission.

mod commands;
mod selftest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::covers::CoverTarget;
use crate::error::{Error, Result};
use crate::ideals::{IdealIndex, IdealTable, NumberFieldSpec};
use crate::localdata::spec_file::FamilyFile;
use crate::localdata::{dirichlet_character_family, synthetic_family, Family, Representation, SyntheticModel};
use crate::report::{emit_report, Format, Record};
use crate::sieve::MvtRange;

#[derive(Debug, Parser)]
#[command(name = "sievelab", version, about = "Large sieve, Selberg sieve and zero-detection experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Report path; defaults to <subcommand>.<format> in the working directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,
    /// Run the module's invariant suite instead of the pipeline.
    #[arg(long)]
    pub selftest: bool,
}

#[derive(Debug, Clone, Args, Serialize, Default)]
pub struct FamilyArgs {
    /// All primitive Dirichlet characters of modulus <= --qmax.
    #[arg(long)]
    pub gl1: bool,
    #[arg(long, default_value_t = 10)]
    pub qmax: u64,
    /// Family spec file.
    #[arg(long)]
    pub family: Option<PathBuf>,
    /// Synthetic family of this degree.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Synthetic family size.
    #[arg(long, default_value_t = 5)]
    pub members: usize,
    #[arg(long, default_value_t = 1)]
    pub family_seed: u64,
    /// Plant a Ramanujan violation at this rational prime.
    #[arg(long)]
    pub planted_p: Option<u64>,
    #[arg(long)]
    pub planted_theta: Option<f64>,
    /// Work over Q(sqrt(d)) for synthetic families.
    #[arg(long, allow_hyphen_values = true)]
    pub field_d: Option<i64>,
}

impl FamilyArgs {
    pub fn field(&self) -> Result<NumberFieldSpec> {
        match self.field_d {
            Some(d) => NumberFieldSpec::quadratic(d),
            None => Ok(NumberFieldSpec::rationals()),
        }
    }

    /// The selected family, or `None` when no family flag was given.
    pub fn resolve(&self) -> Result<Option<Family>> {
        let chosen = [self.gl1, self.family.is_some(), self.synthetic.is_some()]
            .iter()
            .filter(|b| **b)
            .count();
        if chosen > 1 {
            return Err(Error::usage("choose one of --gl1, --family and --synthetic"));
        }
        if self.gl1 {
            if self.field_d.is_some() {
                return Err(Error::usage("--gl1 families live over Q"));
            }
            return dirichlet_character_family(self.qmax).map(Some);
        }
        if let Some(path) = &self.family {
            return FamilyFile::load(path)?.build().map(Some);
        }
        if let Some(n) = self.synthetic {
            let model = match (self.planted_p, self.planted_theta) {
                (None, None) => SyntheticModel::Grc,
                (Some(p), Some(theta)) => SyntheticModel::Planted { p, theta },
                _ => return Err(Error::usage("--planted-p and --planted-theta go together")),
            };
            return synthetic_family(&self.field()?, n, self.members, self.family_seed, model).map(Some);
        }
        Ok(None)
    }

    pub fn require(&self) -> Result<Family> {
        self.resolve()?
            .ok_or_else(|| Error::usage("select a family with --gl1, --family or --synthetic"))
    }

    /// The selected family, or the trivial representation alone.
    pub fn or_trivial(&self) -> Result<Family> {
        match self.resolve()? {
            Some(f) => Ok(f),
            None => {
                let field = self.field()?;
                Family::new(&field, vec![Representation::trivial(&field)], "trivial")
            }
        }
    }
}

/// "trivial" or "member:<index>".
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RepChoice {
    Trivial,
    Member(usize),
}

impl std::str::FromStr for RepChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "trivial" {
            return Ok(RepChoice::Trivial);
        }
        s.strip_prefix("member:")
            .and_then(|i| i.parse().ok())
            .map(RepChoice::Member)
            .ok_or_else(|| format!("expected 'trivial' or 'member:<index>', got '{s}'"))
    }
}

impl RepChoice {
    pub fn pick(&self, family: &Family) -> Result<Representation> {
        match self {
            RepChoice::Trivial => Ok(Representation::trivial(&family.field)),
            RepChoice::Member(i) => family
                .members
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::usage(format!("member {i} out of range (family has {})", family.len()))),
        }
    }
}

/// Looks up an ideal by label ("6", "2^2*5a") among ideals of norm <= `bound`.
pub fn find_ideal(field: &NumberFieldSpec, label: &str, bound: u64) -> Result<IdealIndex> {
    let table = IdealTable::new(field, bound)?;
    table
        .ideals()
        .iter()
        .find(|id| id.ideal_id() == label)
        .cloned()
        .ok_or_else(|| Error::usage(format!("no ideal labelled '{label}' of norm <= {bound} over {}", field.label())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PsdKind {
    /// Rankin-Selberg coefficients lambda_{pi x pi'~}.
    Lambda,
    /// lambda_{pi x pi'~} - lambda_pi conj(lambda_pi').
    LambdaMinusProduct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum IngestKind {
    Zeros,
    Hecke,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Command {
    /// Solve the constant system used in zero detection.
    Constants {
        #[command(flatten)]
        common: Common,
    },
    /// Largest eigenvalue of the coefficient Gram matrix, with bound shapes.
    LargeSieve {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        /// Norm bounds N (comma separated).
        #[arg(long, value_delimiter = ',', default_value = "200")]
        n: Vec<u64>,
        #[arg(long)]
        pi0: Option<RepChoice>,
        #[arg(long, value_enum, default_value_t = CoverTarget::Lambda)]
        kind: CoverTarget,
    },
    /// Positive semi-definiteness of Rankin-Selberg coefficient matrices.
    Psd {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 200)]
        nmax: u64,
        #[arg(long, value_enum, default_value_t = PsdKind::Lambda)]
        kind: PsdKind,
        #[arg(long, default_value_t = crate::covers::DEFAULT_PSD_TOLERANCE)]
        tolerance: f64,
        /// Skip ideals sharing a prime with some member's conductor.
        #[arg(long)]
        unramified_only: bool,
    },
    /// Worst margins of the averaged Rankin-Selberg bound over seeded weights.
    Covers {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum, default_value_t = CoverTarget::Lambda)]
        target: CoverTarget,
        #[arg(long, default_value_t = 100)]
        nmax: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "trivial")]
        pi0: RepChoice,
        #[arg(long)]
        unramified_only: bool,
    },
    /// Selberg weights and the harmonic lower-bound ratio.
    SieveWeights {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "trivial")]
        rep: RepChoice,
        #[arg(long, default_value_t = 10.0)]
        z: f64,
        /// Residue of L(s, pi x pi~) at s = 1, when not known exactly.
        #[arg(long)]
        residue: Option<f64>,
    },
    /// Large sieve restricted to ideals free of small prime factors.
    Sifted {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "trivial")]
        pi0: RepChoice,
        #[arg(long, default_value_t = 1000.0)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 10.0)]
        z: f64,
        #[arg(long, value_enum, default_value_t = CoverTarget::Lambda)]
        kind: CoverTarget,
    },
    /// Smoothed coefficient sum against its residue main term.
    Residue {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "trivial")]
        a: RepChoice,
        #[arg(long, default_value = "trivial")]
        b: RepChoice,
        #[arg(long, default_value_t = 1000.0)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        /// Squarefree ideal label restricting the sum to its multiples.
        #[arg(long, default_value = "1")]
        d: String,
        #[arg(long)]
        residue: Option<f64>,
    },
    /// Mean values of Mobius-type Dirichlet polynomials.
    Mvt {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        pi0: Option<RepChoice>,
        #[arg(long, default_value_t = 50.0)]
        x: f64,
        #[arg(long, default_value_t = 1.0)]
        t: f64,
        #[arg(long, default_value_t = 50.0)]
        y: f64,
        #[arg(long, value_enum, default_value_t = MvtRange::Head)]
        range: MvtRange,
        #[arg(long, default_value_t = crate::sieve::mvt::DEFAULT_TRUNCATION_FACTOR)]
        truncation_factor: f64,
    },
    /// High derivatives of -L'/L and the quantities bounding them.
    Detect {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value = "trivial")]
        rep: RepChoice,
        #[arg(long)]
        pi0: Option<RepChoice>,
        /// Zeros file: one ordinate per line or "beta,gamma".
        #[arg(long)]
        zeros: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        tau: f64,
        #[arg(long, default_value_t = 2.0)]
        t: f64,
        /// Conductor scale; defaults to the larger analytic conductor.
        #[arg(long)]
        q_tilde: Option<f64>,
        /// Override for the log-conductor scale L.
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        linnik_constant: f64,
        /// Derivative order; defaults to ceil(M_eta).
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        truncation: u64,
        /// Evaluate the near-zero sum (needs --zeros).
        #[arg(long)]
        lower_leg: bool,
        #[arg(long, default_value_t = 64)]
        tail_samples: usize,
    },
    /// Members whose local parameters at a prime reach N p^theta.
    Density {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: FamilyArgs,
        /// Prime ideal label, e.g. "2" or "5a".
        #[arg(long, default_value = "2")]
        prime: String,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon: f64,
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Size of the family of bounded analytic conductor.
    Count {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        field_d: Option<i64>,
        #[arg(long, default_value_t = 1)]
        degree: usize,
        #[arg(long, default_value_t = 100.0)]
        q: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Count primitive characters exactly (degree 1 over Q only).
        #[arg(long)]
        enumerate: bool,
    },
    /// Validate and normalize a zeros or Hecke eigenvalue file.
    Ingest {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: IngestKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 12)]
        weight: u32,
        #[arg(long, default_value_t = 1)]
        level: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Constants { .. } => "constants",
            Command::LargeSieve { .. } => "large-sieve",
            Command::Psd { .. } => "psd",
            Command::Covers { .. } => "covers",
            Command::SieveWeights { .. } => "sieve-weights",
            Command::Sifted { .. } => "sifted",
            Command::Residue { .. } => "residue",
            Command::Mvt { .. } => "mvt",
            Command::Detect { .. } => "detect",
            Command::Density { .. } => "density",
            Command::Count { .. } => "count",
            Command::Ingest { .. } => "ingest",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Constants { common }
            | Command::LargeSieve { common, .. }
            | Command::Psd { common, .. }
            | Command::Covers { common, .. }
            | Command::SieveWeights { common, .. }
            | Command::Sifted { common, .. }
            | Command::Residue { common, .. }
            | Command::Mvt { common, .. }
            | Command::Detect { common, .. }
            | Command::Density { common, .. }
            | Command::Count { common, .. }
            | Command::Ingest { common, .. } => common,
        }
    }
}

/// Rows, an optional fixed header, and the one-line summary.
pub struct Outcome {
    pub records: Vec<Record>,
    pub header: Option<Vec<&'static str>>,
    pub summary: String,
    /// An invariant the run was meant to confirm failed; reported after writing.
    pub violation: Option<String>,
}

/// Parses `argv`, runs the pipeline and writes the report. Returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Runs one parsed command and returns its summary line.
pub fn execute(command: &Command) -> Result<String> {
    let common = command.common();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| {
        if common.selftest {
            selftest::run(command)
        } else {
            commands::run(command)
        }
    })?;
    let ext = match common.format {
        Format::Csv => "csv",
        Format::Jsonl => "jsonl",
    };
    let path = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}{}.{ext}", command.name(), if common.selftest { "-selftest" } else { "" })));
    let config = serde_json::to_value(command).map_err(|e| Error::Internal(e.to_string()))?;
    let config = serde_json::json!({ "version": env!("CARGO_PKG_VERSION"), "run": config });
    emit_report(&outcome.records, common.format, &path, Some(&config), outcome.header.as_deref())?;
    if let Some(v) = outcome.violation {
        return Err(Error::Invariant(format!("{v}; see {}", path.display())));
    }
    Ok(format!("{}: {} -> {}", command.name(), outcome.summary, path.display()))
}
