//! Command-line front end. [`run`] parses arguments, executes one
//! subcommand and returns the process exit code.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use super::corpus::{corpus_standard, Corpus};
use super::experiments::*;
use super::report::{write_summary, ExperimentReport};
use super::settings::{KernelSpec, Settings, EXPERIMENTS};
use crate::basis::{validate_axioms, BallBasis, StructureMode};
use crate::error::{Error, Result};
use crate::functional::{elementary_norm_inequalities, norm, NormKind};
use crate::kernel::{validate_kernels, KBCouple, KernelStructure};
use crate::maximal::{convolution_maximal, dyadic_weighted_maximal, fejer_maximal, standard_maximal, MaximalResult};
use crate::space::{fmt_sig_f64, FieldTable, ScalarField};

/// Exit code for a run whose invariants all hold.
pub const EXIT_OK: i32 = 0;
/// Exit code for a violated invariant or a failed computation.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit code for bad usage, an unknown subcommand or an invalid config.
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "BALLCALC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ballcalc", version, about = "Maximal operators, oscillation functionals and BMO/BLO norms on finite ball-bases")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the basis axioms and report the measured constants.
    ValidateBasis(Common),
    /// Check normalization and comparability of a kernel structure.
    ValidateKernel(Common),
    /// Maximal function of a field, with the attaining ball per point.
    Maximal(Common),
    /// BMO, BLO, BMO_alpha and BLO_alpha of a field.
    Norms(Common),
    /// Run one experiment over the field corpus.
    Experiment {
        /// One of t2-ratio, bmo-blo, prop-p, norm-equivalence, lemmas, weak-l1, elementary.
        name: String,
        #[command(flatten)]
        common: Common,
    },
}

/// Flags shared by every subcommand. Each overrides the config key of the
/// same name.
#[derive(Args, Debug, Default)]
struct Common {
    /// `key = value` config file, applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for one CSV per report plus summary.csv.
    #[arg(long)]
    out: Option<String>,
    /// Seed for the generated corpus and sampled scans.
    #[arg(long)]
    seed: Option<String>,
    /// dyadic, grid or tree.
    #[arg(long, alias = "basis")]
    preset: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    /// Grid dimension, 1 or 2.
    #[arg(long)]
    d: Option<String>,
    /// Grid points per axis.
    #[arg(long)]
    n: Option<String>,
    /// cube or ball.
    #[arg(long)]
    shape: Option<String>,
    /// centered or uncentered.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    tree_points: Option<String>,
    #[arg(long)]
    tree_seed: Option<String>,
    /// indicator, convolution:<profile>, dyadic-weighted:<weights> or fejer:<degrees>.
    #[arg(long)]
    kernel: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Comma list used by norm-equivalence.
    #[arg(long)]
    alphas: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    /// Pair samples per lemma scan beyond the exhaustive limit.
    #[arg(long)]
    samples: Option<String>,
    /// Random oscillation queries for the elementary experiment.
    #[arg(long)]
    queries: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    /// Field CSV (index,weight,value) for maximal and norms.
    #[arg(long)]
    input: Option<String>,
    /// Corpus field to use when no input is given.
    #[arg(long)]
    field: Option<String>,
    /// Comma list restricting the corpus for experiments.
    #[arg(long)]
    fields: Option<String>,
}

impl Common {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("out", &self.out),
            ("seed", &self.seed),
            ("preset", &self.preset),
            ("levels", &self.levels),
            ("d", &self.d),
            ("n", &self.n),
            ("shape", &self.shape),
            ("mode", &self.mode),
            ("tree-points", &self.tree_points),
            ("tree-seed", &self.tree_seed),
            ("kernel", &self.kernel),
            ("alpha", &self.alpha),
            ("alphas", &self.alphas),
            ("epsilon", &self.epsilon),
            ("samples", &self.samples),
            ("queries", &self.queries),
            ("threads", &self.threads),
            ("input", &self.input),
            ("field", &self.field),
            ("fields", &self.fields),
        ]
    }

    fn settings(&self) -> Result<Settings> {
        let mut s = Settings::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read config {}: {e}", path.display())))?;
            s.apply_config(&text)?;
        }
        for (k, v) in self.flags() {
            if let Some(v) = v {
                s.set(k, v)?;
            }
        }
        Ok(s)
    }
}

/// Parses `args` (program name first) and runs the chosen subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    let (name, common) = match &cli.command {
        Command::ValidateBasis(c) => ("validate-basis", c),
        Command::ValidateKernel(c) => ("validate-kernel", c),
        Command::Maximal(c) => ("maximal", c),
        Command::Norms(c) => ("norms", c),
        Command::Experiment { name, common } => (name.as_str(), common),
    };
    if matches!(cli.command, Command::Experiment { .. }) && !EXPERIMENTS.contains(&name) {
        eprintln!("error: unknown experiment `{name}` (expected one of {})", EXPERIMENTS.join(", "));
        return EXIT_USAGE;
    }
    let settings = match common.settings().and_then(|s| thread_cap(&s).map(|t| (s, t))) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let (settings, threads) = settings;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VIOLATION;
        }
    };
    pool.install(|| match execute(name, &settings) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VIOLATION,
        Err(Failure::Setup(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            EXIT_VIOLATION
        }
    })
}

/// `threads` from the config wins over the environment variable.
fn thread_cap(s: &Settings) -> Result<Option<usize>> {
    if s.threads.is_some() {
        return Ok(s.threads);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Error::Parse(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        _ => Ok(None),
    }
}

enum Failure {
    /// Invalid configuration detected while building inputs.
    Setup(Error),
    /// A computation failed.
    Run(Error),
}

fn setup<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Setup)
}

fn runtime<T>(r: Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(Failure::Run)
}

fn execute(name: &str, s: &Settings) -> std::result::Result<bool, Failure> {
    let b = setup(s.build_basis())?;
    match name {
        "validate-basis" => validate_basis(&b, s),
        "validate-kernel" => {
            let ks = setup(s.build_kernels(&b))?;
            validate_kernel(&b, &ks, s)
        }
        "maximal" => maximal(&b, s),
        "norms" => norms(&b, s),
        _ => experiment(name, &b, s),
    }
}

fn create(dir: &Path, file: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(file))?))
}

/// Writes `body` to stdout, and to `<out>/<name>.csv` plus `summary.csv`
/// when an output directory is set.
fn emit(s: &Settings, name: &str, summary: &ExperimentReport, body: impl Fn(&mut dyn Write) -> Result<()>) -> Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    body(&mut lock)?;
    lock.flush()?;
    if let Some(dir) = &s.out {
        let mut w = create(dir, &format!("{name}.csv"))?;
        body(&mut w)?;
        w.flush()?;
        let mut w = create(dir, "summary.csv")?;
        write_summary(&[summary], &mut w)?;
        w.flush()?;
    }
    Ok(())
}

fn validate_basis(b: &BallBasis<f64>, s: &Settings) -> std::result::Result<bool, Failure> {
    let rep = validate_axioms(b);
    let mut summary = ExperimentReport::new("validate-basis", s.echo(), &[]);
    for c in [&rep.b1, &rep.b2, &rep.b4, &rep.g1, &rep.g2] {
        summary.check(c.name, c.pass, c.witness.map(|w| w.to_string()).unwrap_or_default());
    }
    summary.check("K", true, fmt_sig_f64(rep.hull_constant));
    runtime(emit(s, "validate-basis", &summary, |w| rep.write_csv(w)))?;
    Ok(rep.passed())
}

fn validate_kernel(b: &BallBasis<f64>, ks: &KernelStructure<f64>, s: &Settings) -> std::result::Result<bool, Failure> {
    let rep = validate_kernels(ks, b);
    let mut summary = ExperimentReport::new("validate-kernel", s.echo(), &[]);
    summary.check("normalized", rep.normalized(), fmt_sig_f64(rep.mass_residual));
    summary.check("c1 positive", rep.c1 > 0.0, fmt_sig_f64(rep.c1));
    summary.check("c2 finite", rep.c2.is_some(), rep.c2.map(fmt_sig_f64).unwrap_or_else(|| "inf".into()));
    summary.check("declared constants consistent", rep.declared_consistent(), String::new());
    runtime(emit(s, "validate-kernel", &summary, |w| rep.write_csv(w)))?;
    Ok(rep.passed())
}

/// The field for `maximal` and `norms`: the input CSV when given, bound to
/// the basis' space, else the named corpus field.
fn load_field(b: &BallBasis<f64>, s: &Settings) -> Result<ScalarField<f64>> {
    match &s.input {
        Some(path) => {
            let file = File::open(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            FieldTable::<f64>::read(file)?.into_field(b.space().clone())
        }
        None => {
            let corpus = corpus_standard(b, s.seed)?;
            corpus
                .get(&s.field)
                .map(|f| f.field.clone())
                .ok_or_else(|| Error::Parse(format!("unknown corpus field `{}` (have {})", s.field, corpus.names().join(", "))))
        }
    }
}

fn maximal_of(f: &ScalarField<f64>, b: &BallBasis<f64>, ks: &KernelStructure<f64>, spec: &KernelSpec, mode: StructureMode) -> Result<MaximalResult<f64>> {
    match spec {
        KernelSpec::Indicator => standard_maximal(f, b),
        KernelSpec::Convolution(_) => convolution_maximal(f, ks, b, mode),
        KernelSpec::DyadicWeighted(_) => dyadic_weighted_maximal(f, ks, b),
        KernelSpec::Fejer(_) => fejer_maximal(f, ks, b),
    }
}

fn maximal(b: &BallBasis<f64>, s: &Settings) -> std::result::Result<bool, Failure> {
    let f = setup(load_field(b, s))?;
    let spec = setup(s.kernel_spec())?;
    let ks = setup(s.build_kernels(b))?;
    let m = runtime(maximal_of(&f, b, &ks, &spec, s.mode))?;
    let mut summary = ExperimentReport::new("maximal", s.echo(), &[]);
    let finite = m.values.values().iter().all(|v| v.is_finite());
    summary.check("values finite", finite, String::new());
    runtime(emit(s, "maximal", &summary, |w| m.write_csv(w)))?;
    Ok(summary.passed())
}

fn norms(b: &BallBasis<f64>, s: &Settings) -> std::result::Result<bool, Failure> {
    let f = setup(load_field(b, s))?;
    let mut rows = Vec::new();
    for kind in NormKind::ALL {
        let alpha = kind.needs_alpha().then_some(s.alpha);
        rows.push(runtime(norm(&f, b, kind, alpha))?);
    }
    let elem = runtime(elementary_norm_inequalities(&f, b, s.alpha))?;
    let mut summary = ExperimentReport::new("norms", s.echo(), &[]);
    for r in &elem.rows {
        summary.check(r.name, r.holds(), format!("{} <= {}", fmt_sig_f64(r.lhs), fmt_sig_f64(r.rhs)));
    }
    let body = |w: &mut dyn Write| -> Result<()> {
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["norm", "alpha", "value", "witness"])?;
        for r in &rows {
            let alpha = r.alpha.map(fmt_sig_f64).unwrap_or_default();
            c.write_record([r.kind.name().to_string(), alpha, fmt_sig_f64(r.value), r.witness.to_string()])?;
        }
        c.flush()?;
        Ok(())
    };
    runtime(emit(s, "norms", &summary, body))?;
    Ok(summary.passed())
}

fn experiment(name: &str, b: &BallBasis<f64>, s: &Settings) -> std::result::Result<bool, Failure> {
    let mut corpus: Corpus = setup(corpus_standard(b, s.seed))?;
    if !s.fields.is_empty() {
        if let Some(bad) = s.fields.iter().find(|f| corpus.get(f).is_none()) {
            return Err(Failure::Setup(Error::Parse(format!("unknown corpus field `{bad}`"))));
        }
        let names: Vec<&str> = s.fields.iter().map(|f| f.as_str()).collect();
        corpus = corpus.only(&names);
    }
    let needs_kernels = matches!(name, "t2-ratio" | "bmo-blo" | "lemmas");
    let ks = if needs_kernels { Some(setup(s.build_kernels(b))?) } else { None };
    let couple = match &ks {
        Some(ks) => Some(setup(KBCouple::new(b, ks))?),
        None => None,
    };
    let mut rep = runtime(match name {
        "t2-ratio" => exp_t2_ratio(couple.as_ref().expect("couple"), &corpus, s.alpha),
        "bmo-blo" => exp_bmo_blo(couple.as_ref().expect("couple"), &corpus),
        "lemmas" => exp_lemma_inequalities(couple.as_ref().expect("couple"), &corpus, s.samples, s.seed),
        "prop-p" => exp_prop_p_decay(b, &corpus, s.alpha, s.epsilon),
        "norm-equivalence" => exp_norm_equivalence(b, &corpus, &s.alphas),
        "weak-l1" => exp_weak_l1(b, &corpus),
        "elementary" => exp_elementary(b, &corpus, s.alpha, s.queries, s.seed),
        _ => unreachable!("experiment names are checked before dispatch"),
    })?;
    let mut config = s.echo();
    config.append(&mut rep.config);
    rep.config = config;
    let write = || -> Result<()> {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        write_summary(&[&rep], &mut lock)?;
        lock.flush()?;
        if let Some(dir) = &s.out {
            let mut w = create(dir, &format!("{}.csv", rep.name))?;
            rep.write_csv(&mut w)?;
            w.flush()?;
            let mut w = create(dir, &format!("{}-checks.csv", rep.name))?;
            rep.write_checks_csv(&mut w)?;
            w.flush()?;
            let mut w = create(dir, "summary.csv")?;
            write_summary(&[&rep], &mut w)?;
            w.flush()?;
        }
        Ok(())
    };
    runtime(write())?;
    eprint!("{rep}");
    Ok(rep.passed())
}
