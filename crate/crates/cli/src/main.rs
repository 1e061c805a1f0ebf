//! `hyperthresh`: thresholds, expectation-thresholds and the fragment process
//! from the command line.
//!
//! Exit codes: 0 ok, 1 invalid certificate or transcript, 2 degenerate
//! family, 3 infeasible schedule, 4 malformed input, 5 budget exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use hyperthresh::cover::{check_certificate, CoverSolver, Verdict, DEFAULT_CANDIDATE_BUDGET, DEFAULT_Q_TOL};
use hyperthresh::experiments::{default_corpus, generate, run_kk_report, InstanceSpec, KkConfig, KkReport};
use hyperthresh::formats::{from_document, kk_csv, round_curve_csv, sig12, to_document};
use hyperthresh::fragment::{
    build_schedule, empirical_lemma31, lemma31_bruteforce, run_process, verify_transcript, ProcessTranscript,
    DEFAULT_ENUMERATION_BUDGET, THEOREM_MIN_L,
};
use hyperthresh::measures::{p_c_bisect, PcMode, DEFAULT_EXACT_LIMIT, DEFAULT_MC_TRIALS, DEFAULT_PC_TOL};
use hyperthresh::{CoverCertificate, Error, Hypergraph, Probability, RandomSeed};

/// `println!` that stops quietly when stdout is closed (for example by `| head`).
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

/// `print!` counterpart of [`say!`].
macro_rules! say_raw {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = write!(std::io::stdout(), $($t)*);
    }};
}

const ENV_EXACT_LIMIT: &str = "HYPERTHRESH_EXACT_LIMIT";
const ENV_COVER_BUDGET: &str = "HYPERTHRESH_COVER_BUDGET";
const ENV_ENUM_BUDGET: &str = "HYPERTHRESH_ENUM_BUDGET";

#[derive(Parser)]
#[command(name = "hyperthresh", version, about = "Thresholds and expectation-thresholds of finite hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Mc,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold p_c, where μ_p of the generated upset crosses 1/2.
    Pc {
        /// Instance document path or generator spec such as `single_edge:k=2`.
        #[arg(long)]
        instance: String,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_PC_TOL)]
        tol: f64,
        /// Samples per probe in Monte Carlo mode.
        #[arg(long, default_value_t = DEFAULT_MC_TRIALS)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expectation-threshold q with a witness cover.
    Q {
        #[arg(long)]
        instance: String,
        #[arg(long, default_value_t = DEFAULT_Q_TOL)]
        tol: f64,
        /// Where to write the result document (q and the witness certificate).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks a p-smallness certificate against an instance.
    Verify {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Runs the fragment process, or re-verifies a transcript with --replay.
    Process {
        #[arg(long, required_unless_present = "replay")]
        instance: Option<String>,
        #[arg(long = "L", default_value_t = THEOREM_MIN_L)]
        big_l: f64,
        #[arg(long, required_unless_present = "replay")]
        p: Option<f64>,
        /// Pad the ground set to this many elements.
        #[arg(long)]
        ground: Option<usize>,
        /// Allow L < 1024 and ell < 2.
        #[arg(long)]
        exploratory: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// Transcript output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-round CSV output path.
        #[arg(long)]
        curve: Option<PathBuf>,
        /// Transcript to re-verify instead of running.
        #[arg(long, conflicts_with_all = ["instance", "p", "ground", "seed", "out", "curve"])]
        replay: Option<PathBuf>,
    },
    /// Exhaustive (and optionally sampled) check of the cover-cost counting bound.
    Lemma31 {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        p: f64,
        #[arg(long = "L", default_value_t = THEOREM_MIN_L)]
        big_l: f64,
        /// Sampled draws for the empirical comparison; 0 skips it.
        #[arg(long, default_value_t = 0)]
        trials: u64,
        /// Allow L < 1024.
        #[arg(long)]
        exploratory: bool,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// q, p_c, ell and process statistics over a corpus, as CSV.
    Kk {
        /// One generator spec per line; `#` starts a comment. Defaults to the built-in corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Process runs per instance and probability.
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        #[arg(long = "L", default_value_t = THEOREM_MIN_L)]
        big_l: f64,
        /// Extra probabilities for process runs besides p = q.
        #[arg(long = "p", value_delimiter = ',')]
        extra_p: Vec<f64>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_PC_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MC_TRIALS)]
        trials: u64,
        #[arg(long)]
        exploratory: bool,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV output path (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full reports as a JSON document.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn malformed(message: impl Into<String>) -> Self {
        Failure {
            code: 4,
            message: message.into(),
        }
    }

    fn with_context(mut self, spec: &InstanceSpec) -> Self {
        self.message = format!("{spec}: {}", self.message);
        self
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvariantViolation(_) => 1,
        Error::NoEdges | Error::DegenerateFamily(_) | Error::DegenerateInput(_) => 2,
        Error::InsufficientGround { .. } | Error::BadEll(_) => 3,
        Error::BudgetExceeded { .. } | Error::TooLargeForExact { .. } | Error::TooLarge(_) => 5,
        _ => 4,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

struct Budgets {
    exact_limit: usize,
    cover: usize,
    enumeration: u128,
}

fn env_number<T: std::str::FromStr>(name: &str, default: T) -> Result<T, Failure> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::malformed(format!("{name}={v:?} is not a valid number"))),
        Err(_) => Ok(default),
    }
}

fn budgets() -> Result<Budgets, Failure> {
    Ok(Budgets {
        exact_limit: env_number(ENV_EXACT_LIMIT, DEFAULT_EXACT_LIMIT)?,
        cover: env_number(ENV_COVER_BUDGET, DEFAULT_CANDIDATE_BUDGET)?,
        enumeration: env_number(ENV_ENUM_BUDGET, DEFAULT_ENUMERATION_BUDGET)?,
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::malformed(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure {
        code: 4,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// A path to an instance document, or else a generator spec.
fn load_instance(source: &str) -> Result<Hypergraph, Failure> {
    let path = Path::new(source);
    if path.is_file() {
        return from_document(&read(path)?).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())));
    }
    match source.parse::<InstanceSpec>() {
        Ok(spec) => Ok(generate(&spec)?),
        Err(e) if !source.contains(':') => {
            Err(Failure::malformed(format!("{source:?} is neither a readable file nor a generator spec ({e})")))
        }
        Err(e) => Err(e.into()),
    }
}

fn probability(x: f64) -> Result<Probability, Failure> {
    Ok(Probability::new(x)?)
}

/// The given seed, or a fresh one that is announced so the run can be repeated.
fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_nanos() as u64)
            .unwrap_or(0);
        eprintln!("no --seed given, using seed {s}");
        s
    })
}

fn pc_mode(mode: Mode, trials: u64, budgets: &Budgets) -> PcMode {
    match mode {
        Mode::Exact => PcMode::Exact {
            limit: budgets.exact_limit,
        },
        Mode::Mc => PcMode::MonteCarlo { trials },
    }
}

fn cmd_pc(
    instance: &str,
    mode: Mode,
    tol: f64,
    trials: u64,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Outcome {
    let b = budgets()?;
    let h = load_instance(instance)?;
    let seed = match mode {
        Mode::Exact => seed.unwrap_or(0),
        Mode::Mc => seed_or_fresh(seed),
    };
    let r = p_c_bisect(&h, pc_mode(mode, trials, &b), tol, RandomSeed::from_master(seed))?;
    say!("p_c = {}", sig12(r.p_c.get()));
    say!("residual = {}", sig12(r.residual()));
    if r.approximate {
        say!(
            "approximate: mu = {} ± {} from {} samples, seed {seed}",
            sig12(r.mu.point),
            sig12(r.mu.half_width),
            r.mu.trials
        );
    }
    if let Some(path) = out {
        write(path, &to_document(&r))?;
    }
    Ok(0)
}

fn cmd_q(instance: &str, tol: f64, out: Option<&Path>) -> Outcome {
    let b = budgets()?;
    let h = load_instance(instance)?;
    let r = CoverSolver::new(b.cover).q_exact(&h, tol)?;
    say!("q = {}", sig12(r.q.get()));
    say!("witness cost = {}", sig12(r.witness.cost));
    say!("{}", to_document(&r.witness));
    if let Some(path) = out {
        write(path, &to_document(&r))?;
    }
    Ok(0)
}

fn cmd_verify(instance: &str, cert: &Path) -> Outcome {
    let h = load_instance(instance)?;
    let cert: CoverCertificate =
        from_document(&read(cert)?).map_err(|e| Failure::malformed(format!("{}: {e}", cert.display())))?;
    match check_certificate(&cert, &h) {
        Verdict::Valid => {
            say!("VALID cost={}", sig12(cert.cost));
            Ok(0)
        }
        Verdict::CostExceedsHalf { cost } => {
            say!("COST_EXCEEDS_HALF cost={}", sig12(cost));
            Ok(1)
        }
        Verdict::NotACover { uncovered } => {
            say!("NOT_A_COVER uncovered={uncovered}");
            Ok(1)
        }
    }
}

fn summarize(t: &ProcessTranscript) -> String {
    let s = &t.schedule;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "n = {}, ell = {}, L = {}, p = {}, gamma = {}, draws = {}{}",
        s.n,
        s.ell,
        s.big_l,
        s.p,
        s.gamma,
        s.total_draw,
        if s.in_theorem_regime() { "" } else { " (exploratory)" }
    );
    for r in &t.rounds {
        let _ = writeln!(
            text,
            "round {}: |W| = {}, good = {}, cover = {}, leftover = {}, cost = {}, success1 = {}, success2 = {}",
            r.i,
            r.w.len(),
            r.good.len(),
            r.cover.len(),
            r.leftover.len(),
            sig12(r.cost),
            r.success1,
            r.success2
        );
    }
    let _ = writeln!(
        text,
        "i_max = {}, terminated_successfully = {}, assembled cost = {}",
        t.i_max,
        t.terminated_successfully,
        sig12(t.assembled_cost())
    );
    text
}

#[allow(clippy::too_many_arguments)]
fn cmd_process(
    instance: &str,
    big_l: f64,
    p: f64,
    ground: Option<usize>,
    exploratory: bool,
    seed: Option<u64>,
    out: Option<&Path>,
    curve: Option<&Path>,
) -> Outcome {
    let mut h = load_instance(instance)?;
    if let Some(n) = ground {
        h = h.with_ground(n)?;
    }
    let seed = seed_or_fresh(seed);
    let schedule = build_schedule(big_l, h.ell_bound(), probability(p)?, h.n(), exploratory)?;
    let t = run_process(&h, &schedule, RandomSeed::from_master(seed))?;
    say_raw!("{}", summarize(&t));
    if let Some(path) = out {
        write(path, &to_document(&t))?;
    }
    if let Some(path) = curve {
        write(path, &round_curve_csv(&t))?;
    }
    Ok(0)
}

fn cmd_replay(path: &Path) -> Outcome {
    let t: ProcessTranscript =
        from_document(&read(path)?).map_err(|e| Failure::malformed(format!("{}: {e}", path.display())))?;
    let rep = verify_transcript(&t);
    say_raw!("{}", summarize(&t));
    if rep.is_ok() {
        say!("REPLAY OK: {} rounds, {} checks", rep.rounds_checked, rep.checks);
        Ok(0)
    } else {
        say!("REPLAY FAILED: {} of {} checks", rep.violations.len(), rep.checks);
        for v in &rep.violations {
            say!("  {v}");
        }
        Ok(1)
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_lemma31(
    instance: &str,
    p: f64,
    big_l: f64,
    trials: u64,
    exploratory: bool,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Outcome {
    if big_l < THEOREM_MIN_L && !exploratory {
        return Err(Failure::malformed(format!(
            "L = {big_l} is below {THEOREM_MIN_L}; pass --exploratory to allow it"
        )));
    }
    let b = budgets()?;
    let h = load_instance(instance)?;
    let p = probability(p)?;
    let table = lemma31_bruteforce(&h, p, big_l, b.enumeration)?;
    say!(
        "n = {}, w = {}, ell = {}, L = {}, draws = {}",
        table.n, table.w, table.ell, table.big_l, table.draws
    );
    say!("m,pairs,ln_lhs,ln_rhs_step,holds");
    for r in &table.rows {
        say!("{},{},{},{},{}", r.m, r.pairs, sig12(r.ln_lhs), sig12(r.ln_rhs_step), r.holds);
    }
    say!(
        "total: ln_lhs = {}, ln_rhs = {}, holds = {}",
        sig12(table.ln_lhs_total),
        sig12(table.ln_rhs_total),
        table.total_holds
    );
    say!("exact mean cost = {}", sig12(table.exact_mean_cost()));
    let empirical = if trials > 0 {
        let seed = seed_or_fresh(seed);
        let e = empirical_lemma31(&h, p, big_l, trials, RandomSeed::from_master(seed))?;
        say!(
            "sampled mean cost = {} ± {} ({} draws, seed {seed})",
            sig12(e.mean_cost),
            sig12(e.mean_cost_half_width),
            e.trials
        );
        say!(
            "fail rate = {} (bound {}{})",
            sig12(e.fail_rate),
            sig12(e.fail_bound),
            if e.theorem_regime { "" } else { ", not guaranteed here" }
        );
        Some(e)
    } else {
        None
    };
    if let Some(path) = out {
        let doc = format!(
            "{{\n\"table\": {},\n\"empirical\": {}\n}}\n",
            to_document(&table),
            empirical.as_ref().map_or_else(|| "null".to_string(), to_document)
        );
        write(path, &doc)?;
    }
    let ok = table.all_steps_hold() && table.total_holds;
    Ok(if ok { 0 } else { 1 })
}

fn parse_corpus(text: &str, source: &str) -> Result<Vec<InstanceSpec>, Failure> {
    let mut specs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let spec = line
            .parse()
            .map_err(|e| Failure::malformed(format!("{source}: line {}: {e}", k + 1)))?;
        specs.push(spec);
    }
    Ok(specs)
}

#[allow(clippy::too_many_arguments)]
fn cmd_kk(
    corpus: Option<&Path>,
    seeds: u64,
    big_l: f64,
    extra_p: &[f64],
    mode: Mode,
    tol: f64,
    trials: u64,
    exploratory: bool,
    seed: Option<u64>,
    out: Option<&Path>,
    json: Option<&Path>,
) -> Outcome {
    let b = budgets()?;
    let specs = match corpus {
        Some(path) => parse_corpus(&read(path)?, &path.display().to_string())?,
        None => default_corpus(),
    };
    let config = KkConfig {
        tol,
        pc_mode: pc_mode(mode, trials, &b),
        master_seed: seed_or_fresh(seed),
        big_l,
        exploratory,
        extra_p: extra_p.iter().map(|&x| probability(x)).collect::<Result<_, _>>()?,
        max_candidates: b.cover,
    };
    let reports: Vec<KkReport> = specs
        .iter()
        .map(|spec| run_kk_report(spec, seeds, &config).map_err(|e| Failure::from(e).with_context(spec)))
        .collect::<Result<_, _>>()?;
    let csv = kk_csv(&reports);
    match out {
        Some(path) => write(path, &csv)?,
        None => say_raw!("{csv}"),
    }
    if let Some(path) = json {
        write(path, &to_document(&reports))?;
    }
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Pc {
            instance,
            mode,
            tol,
            trials,
            seed,
            out,
        } => cmd_pc(&instance, mode, tol, trials, seed, out.as_deref()),
        Command::Q { instance, tol, out } => cmd_q(&instance, tol, out.as_deref()),
        Command::Verify { instance, cert } => cmd_verify(&instance, &cert),
        Command::Process {
            replay: Some(path), ..
        } => cmd_replay(&path),
        Command::Process {
            instance,
            big_l,
            p,
            ground,
            exploratory,
            seed,
            out,
            curve,
            replay: None,
        } => cmd_process(
            instance.as_deref().expect("required without --replay"),
            big_l,
            p.expect("required without --replay"),
            ground,
            exploratory,
            seed,
            out.as_deref(),
            curve.as_deref(),
        ),
        Command::Lemma31 {
            instance,
            p,
            big_l,
            trials,
            exploratory,
            seed,
            out,
        } => cmd_lemma31(&instance, p, big_l, trials, exploratory, seed, out.as_deref()),
        Command::Kk {
            corpus,
            seeds,
            big_l,
            extra_p,
            mode,
            tol,
            trials,
            exploratory,
            seed,
            out,
            json,
        } => cmd_kk(
            corpus.as_deref(),
            seeds,
            big_l,
            &extra_p,
            mode,
            tol,
            trials,
            exploratory,
            seed,
            out.as_deref(),
            json.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
