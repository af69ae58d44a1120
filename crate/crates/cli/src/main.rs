//! carleson-admit: decide and quantify admissibility of diagonal control
//! systems through Laplace-Carleson embeddings.
//!
//! One command per process; JSON in, JSON (or CSV for tabular outputs)
//! out. Exit codes: 0 success, 1 I/O or schema problem, 2 domain error,
//! 3 the requested quantity is genuinely infinite.

mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use admit_core::laplace::{
    embedding_lower_bound, embedding_upper_bound, exp_orlicz_embedding_check, finite_time_check,
    zero_class_bound, TargetSpace,
};
use admit_core::orlicz::YoungFunction;
use admit_core::signal::InputSignal;
use admit_core::{
    decide_finite_time, decide_linf_admissible, decide_lq_prime_group, decide_phi_exp_admissible,
    input_to_state, multi_input_decide, propequiv_crosscheck, witness_orlicz, AdmissibilityReport,
    ConstantChain, Criterion, DiagonalSystem, DiscreteMeasure, MultiInputOperator, StripWeights,
};

use report::{emit_curve_csv, emit_strip_csv, emit_terms_csv, write_output, Report};

#[derive(Parser)]
#[command(
    name = "carleson-admit",
    version,
    about = "Carleson-measure admissibility criteria for diagonal semigroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-strip α-Carleson intensities of a discrete measure
    Intensity(IntensityArgs),
    /// Two-sided embedding-norm estimate for ℒ : X → L^q(μ)
    EmbedCheck(EmbedCheckArgs),
    /// Finite-horizon criterion with the near-axis core term
    FiniteTime(FiniteTimeArgs),
    /// Weighted criterion for the exponential Orlicz spaces L^{Φ_exp^α}
    ExpOrlicz(ExpOrliczArgs),
    /// Run an admissibility decider on a diagonal system
    Admissible(AdmissibleArgs),
    /// Construct and verify the witness Young function of a system
    WitnessPhi(WitnessPhiArgs),
    /// Evaluate the input-to-state map Θ on a concrete input
    Theta(ThetaArgs),
    /// Audit the Θ/embedding identity on test inputs
    Crosscheck(CrosscheckArgs),
    /// Zero-class bound curve τ ↦ ‖Θ restricted to (0, τ)‖
    ZeroClass(ZeroClassArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Input JSON file
    #[arg(long)]
    input: PathBuf,
    /// Output file (stdout when omitted); written atomically
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct SamplingArgs {
    /// Number of seeded random test signals
    #[arg(long, default_value_t = 0)]
    budget: u32,
    /// RNG seed; required whenever budget > 0
    #[arg(long)]
    seed: Option<u64>,
}

impl SamplingArgs {
    fn resolve(&self) -> Result<u64, CliError> {
        match (self.budget, self.seed) {
            (0, seed) => Ok(seed.unwrap_or(0)),
            (_, Some(seed)) => Ok(seed),
            (_, None) => Err(CliError::Domain(
                "budget > 0 needs an explicit --seed (reports must be reproducible)".to_string(),
            )),
        }
    }
}

#[derive(Args)]
struct ChainArgs {
    /// Override for the half-plane Carleson embedding constant κ_C
    #[arg(long)]
    kappa_carleson: Option<f64>,
    /// Override for the Orlicz-Hölder constant κ_H
    #[arg(long)]
    kappa_holder: Option<f64>,
    /// Override for the Hausdorff-Young-type constant
    #[arg(long)]
    hausdorff_young: Option<f64>,
}

impl ChainArgs {
    fn resolve(&self) -> ConstantChain {
        let mut chain = ConstantChain::default();
        if let Some(k) = self.kappa_carleson {
            chain.kappa_carleson = k;
        }
        if let Some(k) = self.kappa_holder {
            chain.kappa_holder = k;
        }
        if let Some(k) = self.hausdorff_young {
            chain.hausdorff_young = k;
        }
        chain
    }

    fn echo(&self, chain: &ConstantChain, constants: &mut BTreeMap<String, f64>) {
        constants.insert("kappa_carleson".to_string(), chain.kappa_carleson);
        constants.insert("kappa_holder".to_string(), chain.kappa_holder);
        constants.insert("hausdorff_young".to_string(), chain.hausdorff_young);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceKind {
    /// L^∞(0, ∞)
    Linf,
    /// L^p(0, ∞); give p with --p
    Lp,
    /// The exponential Orlicz space L^{Φ_exp}
    PhiExp,
}

fn resolve_space(kind: SpaceKind, p: Option<f64>) -> Result<TargetSpace, CliError> {
    match kind {
        SpaceKind::Linf => Ok(TargetSpace::LInfty),
        SpaceKind::Lp => {
            let p = p.ok_or_else(|| {
                CliError::Domain("--space lp needs an exponent via --p".to_string())
            })?;
            Ok(TargetSpace::Lp(p))
        }
        SpaceKind::PhiExp => Ok(TargetSpace::LPhi(YoungFunction::phi_exp_composed())),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CriterionKind {
    /// Unit-weight strip summability: infinite-time L^∞ admissibility
    Linf,
    /// n²-weighted criterion: infinite-time L^{Φ_exp} admissibility
    PhiExp,
    /// Carleson intensity criterion for the group (vertical strip) case
    LqGroup,
    /// Finite-horizon criterion; give the horizon with --tau0
    FiniteTime,
}

impl CriterionKind {
    fn core(self) -> Criterion {
        match self {
            CriterionKind::Linf => Criterion::LinfInfiniteTime,
            CriterionKind::PhiExp => Criterion::PhiExp,
            CriterionKind::LqGroup => Criterion::LqPrimeGroup,
            CriterionKind::FiniteTime => Criterion::FiniteTime,
        }
    }

    fn strip_weights(self) -> StripWeights {
        match self {
            CriterionKind::PhiExp => StripWeights::NSquared,
            _ => StripWeights::Unit,
        }
    }
}

#[derive(Args)]
struct IntensityArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Intensity exponent α of 𝒞_α[μ] = sup_I μ(Q_I)/|I|^α
    #[arg(long)]
    alpha: f64,
}

#[derive(Args)]
struct EmbedCheckArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Target exponent q of L^q(μ)
    #[arg(long)]
    q: f64,
    /// Input space on the time side
    #[arg(long, value_enum, default_value_t = SpaceKind::Linf)]
    space: SpaceKind,
    /// Exponent for --space lp
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args)]
struct FiniteTimeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Target exponent q of L^q(μ)
    #[arg(long)]
    q: f64,
    /// Horizon τ₀ of the finite-time criterion
    #[arg(long)]
    tau0: f64,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args)]
struct ExpOrliczArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Orlicz index α of Φ_exp^α (α = 1 is Φ_exp itself)
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args)]
struct AdmissibleArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Which criterion to decide
    #[arg(long, value_enum, default_value_t = CriterionKind::Linf)]
    criterion: CriterionKind,
    /// Horizon for --criterion finite-time
    #[arg(long)]
    tau0: Option<f64>,
    /// Shift the generator left until strongly stable before deciding
    #[arg(long)]
    auto_shift: bool,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Args)]
struct WitnessPhiArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct ThetaArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct CrosscheckArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Input space used to pick the deterministic test families
    #[arg(long, value_enum, default_value_t = SpaceKind::Linf)]
    space: SpaceKind,
    /// Exponent for --space lp
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    sampling: SamplingArgs,
}

#[derive(Args)]
struct ZeroClassArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Target exponent q of L^q(μ)
    #[arg(long, default_value_t = 2.0)]
    q: f64,
    /// Reference horizon τ₀ the bounds are relative to
    #[arg(long, default_value_t = 1.0)]
    tau0: f64,
    /// Horizons τ to evaluate, comma separated
    #[arg(long = "tau-grid", value_delimiter = ',', default_values_t = vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0])]
    tau_grid: Vec<f64>,
    #[command(flatten)]
    chain: ChainArgs,
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Domain(String),
    Unbounded(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Unbounded(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) | CliError::Domain(m) | CliError::Unbounded(m) => f.write_str(m),
        }
    }
}

impl From<admit_core::Error> for CliError {
    fn from(e: admit_core::Error) -> CliError {
        match e {
            admit_core::Error::UnboundedNorm(_) => CliError::Unbounded(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> CliError {
        CliError::Io(format!("{e:#}"))
    }
}

fn load_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        let msg = format!("{}: {e}", path.display());
        if msg.contains("domain error:") {
            CliError::Domain(msg)
        } else {
            CliError::Io(msg)
        }
    })
}

fn spec_echo(command: &str, io: &IoArgs, params: BTreeMap<String, Value>) -> Value {
    json!({
        "command": command,
        "input": io.input.display().to_string(),
        "format": io.format.name(),
        "params": Value::Object(params.into_iter().collect()),
    })
}

fn finish(io: &IoArgs, report: Report, csv: Option<String>) -> Result<(), CliError> {
    let contents = match io.format {
        Format::Json => report.render()?,
        Format::Csv => csv.ok_or_else(|| {
            CliError::Io("this command has no tabular form; use --format json".to_string())
        })?,
    };
    write_output(io.output.as_deref(), &contents)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Ok(threads) = std::env::var("CARLESON_ADMIT_THREADS") {
        let n: usize = threads.parse().map_err(|_| {
            CliError::Domain(format!(
                "CARLESON_ADMIT_THREADS must be a positive integer, got {threads:?}"
            ))
        })?;
        if n == 0 {
            return Err(CliError::Domain(
                "CARLESON_ADMIT_THREADS must be a positive integer".to_string(),
            ));
        }
        admit_core::configure_thread_cap(n);
    }

    match cli.command {
        Command::Intensity(args) => {
            let mu: DiscreteMeasure = load_json(&args.io.input)?;
            let table = mu.intensity_table(args.alpha)?;
            let mut params = BTreeMap::new();
            params.insert("alpha".to_string(), json!(args.alpha));
            let spec = spec_echo("intensity", &args.io, params);
            let csv = emit_strip_csv(&table, StripWeights::Unit);
            let report = Report::new(spec, json!({ "intensity": table }));
            finish(&args.io, report, Some(csv))
        }
        Command::EmbedCheck(args) => {
            let mu: DiscreteMeasure = load_json(&args.io.input)?;
            let seed = args.sampling.resolve()?;
            let chain = args.chain.resolve();
            let space = resolve_space(args.space, args.p)?;
            let upper = embedding_upper_bound(&mu, args.q, &space, &chain)?;
            let lower = embedding_lower_bound(&mu, args.q, &space, args.sampling.budget, seed, None)?;
            let functional = mu.summability_functional(args.q, StripWeights::Unit, None)?;
            let mut params = BTreeMap::new();
            params.insert("q".to_string(), json!(args.q));
            params.insert("space".to_string(), json!(space_label(args.space)));
            if let Some(p) = args.p {
                params.insert("p".to_string(), json!(p));
            }
            params.insert("budget".to_string(), json!(args.sampling.budget));
            params.insert("seed".to_string(), json!(seed));
            let spec = spec_echo("embed-check", &args.io, params);
            let csv = emit_terms_csv(&upper.terms);
            let mut report = Report::new(
                spec,
                json!({
                    "functional": functional,
                    "lower_bound": lower,
                    "upper_bound": upper,
                }),
            );
            args.chain.echo(&chain, &mut report.constants_used);
            finish(&args.io, report, Some(csv))
        }
        Command::FiniteTime(args) => {
            let mu: DiscreteMeasure = load_json(&args.io.input)?;
            let chain = args.chain.resolve();
            let estimate = finite_time_check(&mu, args.q, args.tau0, &chain)?;
            let mut params = BTreeMap::new();
            params.insert("q".to_string(), json!(args.q));
            params.insert("tau0".to_string(), json!(args.tau0));
            let spec = spec_echo("finite-time", &args.io, params);
            let mut report = Report::new(spec, json!({ "estimate": estimate }));
            args.chain.echo(&chain, &mut report.constants_used);
            finish(&args.io, report, None)
        }
        Command::ExpOrlicz(args) => {
            let mu: DiscreteMeasure = load_json(&args.io.input)?;
            let chain = args.chain.resolve();
            let estimate = exp_orlicz_embedding_check(&mu, args.alpha, &chain)?;
            let mut params = BTreeMap::new();
            params.insert("alpha".to_string(), json!(args.alpha));
            let spec = spec_echo("exp-orlicz", &args.io, params);
            let mut report = Report::new(spec, json!({ "estimate": estimate }));
            args.chain.echo(&chain, &mut report.constants_used);
            finish(&args.io, report, None)
        }
        Command::Admissible(args) => run_admissible(args),
        Command::WitnessPhi(args) => {
            let sys: DiagonalSystem = load_json(&args.io.input)?;
            let witness = witness_orlicz(&sys)?;
            let phi_samples: Vec<(f64, f64)> = (-6..=6)
                .map(|k| {
                    let t = (k as f64).exp2();
                    (t, witness.construction.phi.eval(t))
                })
                .collect();
            let spec = spec_echo("witness-phi", &args.io, BTreeMap::new());
            let report = Report::new(
                spec,
                json!({ "witness": witness, "phi_samples": phi_samples }),
            );
            finish(&args.io, report, None)
        }
        Command::Theta(args) => {
            let request: ThetaRequest = load_json(&args.io.input)?;
            let t0 = request.t0.unwrap_or(f64::INFINITY);
            let state = input_to_state(&request.system, &request.input, t0)?;
            let mut params = BTreeMap::new();
            if let Some(t0) = request.t0 {
                params.insert("t0".to_string(), json!(t0));
            }
            let spec = spec_echo("theta", &args.io, params);
            let report = Report::new(spec, json!({ "state": state }));
            finish(&args.io, report, None)
        }
        Command::Crosscheck(args) => {
            let sys: DiagonalSystem = load_json(&args.io.input)?;
            let seed = args.sampling.resolve()?;
            let space = resolve_space(args.space, args.p)?;
            let check = propequiv_crosscheck(&sys, &space, args.sampling.budget, seed)?;
            let mut params = BTreeMap::new();
            params.insert("space".to_string(), json!(space_label(args.space)));
            if let Some(p) = args.p {
                params.insert("p".to_string(), json!(p));
            }
            params.insert("budget".to_string(), json!(args.sampling.budget));
            params.insert("seed".to_string(), json!(seed));
            let spec = spec_echo("crosscheck", &args.io, params);
            let report = Report::new(spec, json!({ "crosscheck": check }));
            finish(&args.io, report, None)
        }
        Command::ZeroClass(args) => {
            let mu: DiscreteMeasure = load_json(&args.io.input)?;
            let chain = args.chain.resolve();
            let phi = YoungFunction::phi_exp_composed();
            let mut taus = args.tau_grid.clone();
            taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
            taus.dedup();
            let curve: Vec<(f64, f64)> = taus
                .iter()
                .map(|&tau| Ok((tau, zero_class_bound(&mu, args.q, &phi, tau, args.tau0, &chain)?)))
                .collect::<Result<_, admit_core::Error>>()?;
            let mut params = BTreeMap::new();
            params.insert("q".to_string(), json!(args.q));
            params.insert("tau0".to_string(), json!(args.tau0));
            params.insert("tau_grid".to_string(), json!(taus));
            let spec = spec_echo("zero-class", &args.io, params);
            let csv = emit_curve_csv("tau,bound", &curve);
            let mut report = Report::new(spec, json!({ "curve": curve, "phi": phi }));
            args.chain.echo(&chain, &mut report.constants_used);
            finish(&args.io, report, Some(csv))
        }
    }
}

fn space_label(kind: SpaceKind) -> &'static str {
    match kind {
        SpaceKind::Linf => "linf",
        SpaceKind::Lp => "lp",
        SpaceKind::PhiExp => "phi-exp",
    }
}

#[derive(Deserialize)]
struct ThetaRequest {
    system: DiagonalSystem,
    input: InputSignal,
    #[serde(default)]
    t0: Option<f64>,
}

fn from_value<T: serde::de::DeserializeOwned>(raw: Value) -> Result<T, CliError> {
    serde_json::from_value(raw).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("domain error:") {
            CliError::Domain(msg)
        } else {
            CliError::Io(msg)
        }
    })
}

fn run_admissible(args: AdmissibleArgs) -> Result<(), CliError> {
    let chain = args.chain.resolve();
    let criterion = args.criterion;
    if criterion == CriterionKind::FiniteTime && args.tau0.is_none() {
        return Err(CliError::Domain(
            "--criterion finite-time needs a horizon via --tau0".to_string(),
        ));
    }
    let mut warnings = Vec::new();

    let decide_one = |sys: &DiagonalSystem,
                      warnings: &mut Vec<String>|
     -> Result<AdmissibilityReport, CliError> {
        let mut sys = sys.clone();
        let mut extra_shift = 0.0;
        if args.auto_shift && !sys.is_strongly_stable() {
            extra_shift = sys.auto_shift_amount();
            sys = sys.shift_generator(extra_shift)?;
            warnings.push(format!("auto-shift applied: generator moved left by {extra_shift}"));
        }
        let mut report = match criterion {
            CriterionKind::Linf => decide_linf_admissible(&sys, &chain)?,
            CriterionKind::PhiExp => decide_phi_exp_admissible(&sys, &chain)?,
            CriterionKind::LqGroup => decide_lq_prime_group(&sys, &chain)?,
            CriterionKind::FiniteTime => decide_finite_time(&sys, args.tau0.unwrap(), &chain)?,
        };
        report.shift_applied += extra_shift;
        Ok(report)
    };

    let raw: Value = load_json(&args.io.input)?;
    let is_operator = raw.as_object().is_some_and(|o| o.contains_key("columns"));
    let (results, csv) = if is_operator {
        if args.auto_shift {
            return Err(CliError::Domain(
                "--auto-shift applies to single systems; shift the operator's eigenvalues instead"
                    .to_string(),
            ));
        }
        let op: MultiInputOperator = from_value(raw)?;
        let decision = multi_input_decide(&op, criterion.core(), args.tau0, &chain)?;
        for (j, col) in decision.per_column.iter().enumerate() {
            warnings.extend(col.notes.iter().map(|n| format!("column {j}: {n}")));
        }
        let csv = decision
            .per_column
            .first()
            .map(|r| emit_strip_csv(&r.per_strip, criterion.strip_weights()))
            .unwrap_or_default();
        (json!({ "decision": decision }), csv)
    } else {
        let sys: DiagonalSystem = from_value(raw)?;
        let report = decide_one(&sys, &mut warnings)?;
        warnings.extend(report.notes.iter().cloned());
        let csv = emit_strip_csv(&report.per_strip, criterion.strip_weights());
        (json!({ "report": report }), csv)
    };

    let mut params = BTreeMap::new();
    params.insert("criterion".to_string(), json!(criterion_label(criterion)));
    if let Some(tau0) = args.tau0 {
        params.insert("tau0".to_string(), json!(tau0));
    }
    params.insert("auto_shift".to_string(), json!(args.auto_shift));
    let spec = spec_echo("admissible", &args.io, params);
    let mut report = Report::new(spec, results);
    args.chain.echo(&chain, &mut report.constants_used);
    report.warnings = warnings;
    finish(&args.io, report, Some(csv))
}

fn criterion_label(c: CriterionKind) -> &'static str {
    match c {
        CriterionKind::Linf => "linf",
        CriterionKind::PhiExp => "phi-exp",
        CriterionKind::LqGroup => "lq-group",
        CriterionKind::FiniteTime => "finite-time",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_requires_a_seed_with_budget() {
        assert!(SamplingArgs { budget: 4, seed: None }.resolve().is_err());
        assert_eq!(SamplingArgs { budget: 4, seed: Some(9) }.resolve().unwrap(), 9);
        assert_eq!(SamplingArgs { budget: 0, seed: None }.resolve().unwrap(), 0);
    }

    #[test]
    fn cli_parses_every_subcommand() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from([
            "carleson-admit",
            "embed-check",
            "--input",
            "mu.json",
            "--q",
            "2",
            "--space",
            "lp",
            "--p",
            "2.0",
            "--budget",
            "8",
            "--seed",
            "7",
        ])
        .unwrap();
        match cli.command {
            Command::EmbedCheck(args) => {
                assert_eq!(args.q, 2.0);
                assert_eq!(args.sampling.budget, 8);
            }
            _ => panic!("wrong subcommand"),
        }

        let cli = Cli::try_parse_from([
            "carleson-admit",
            "zero-class",
            "--input",
            "mu.json",
            "--tau-grid",
            "0.5,0.25",
        ])
        .unwrap();
        match cli.command {
            Command::ZeroClass(args) => assert_eq!(args.tau_grid, vec![0.5, 0.25]),
            _ => panic!("wrong subcommand"),
        }
    }

    #[test]
    fn exit_codes_follow_the_error_taxonomy() {
        let unbounded = CliError::from(admit_core::Error::unbounded("norm diverges"));
        assert_eq!(unbounded.exit_code(), 3);
        let domain = CliError::from(admit_core::Error::domain("q must be at least 1"));
        assert_eq!(domain.exit_code(), 2);
        let io = CliError::Io("missing file".into());
        assert_eq!(io.exit_code(), 1);
    }
}
