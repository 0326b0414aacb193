//! Command-line front end. Every computation in the crate is reachable
//! through a subcommand that emits a CSV or JSON table; diagnostics go to
//! stderr and the exit code says what went wrong (0 ok, 1 verification
//! failure, 2 usage, 3 domain/validation, 4 numeric/budget).

mod levels;
mod table;

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::correlated::{
    condition_no_vacuum, entropy_marginal_corr, mixing_entropy_gap, moments_corr, CorrelatedParams,
};
use crate::ensembles::{
    condensation_limit, conditional_mean_given_total, mean_occupancy, zgc_closed, zgc_direct,
    EnsembleKind, DEFAULT_ENUM_BUDGET,
};
use crate::error::{Error, Result};
use crate::oracle::{run_verification_suite, VerifyConfig};
use crate::sampling::{
    chain_step, empirical_report, sample_occupancy, ChainSpec, CorrelatedSampler,
    EmpiricalOptions, SeededSource,
};
use crate::thermo::{q_thermo, q_thermo_generalized, Activity};
use crate::types::{Occupancy, QVector, ThermoParams};

use levels::{load_levels, LevelFile};
use table::{Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(
    name = "particle-stats",
    version,
    about = "Closed-form and sampled occupancy statistics for independent and correlated level systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean occupancy per level under be/fd/gentile statistics
    Occupancy(OccupancyArgs),
    /// Find the chemical potential hitting a target total occupancy
    #[command(name = "solve-mu")]
    SolveMu(SolveMuArgs),
    /// Fixed-total partition sums: direct enumeration next to the closed form
    Partition(PartitionArgs),
    /// Conditional means at fixed total and their large-N limits
    Condense(CondenseArgs),
    /// Moments, entropies and vacuum mass of the correlated family
    Correlated(CorrelatedArgs),
    /// Seeded Monte Carlo draws with an empirical summary
    Sample(SampleArgs),
    /// Run every closed form against the brute-force checks
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format for the table
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write the table to this file instead of standard output
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OccupancyArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// Statistics family: be, fd, or gentile (gentile needs --cap)
    #[arg(long, default_value = "be")]
    kind: String,
    /// Occupancy cap for gentile statistics
    #[arg(long)]
    cap: Option<u64>,
    /// Inverse temperature
    #[arg(long)]
    beta: f64,
    /// Chemical potential
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// One potential per charge kind, comma separated (the level file must
    /// carry matching charge columns)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    nu: Option<Vec<f64>>,
    /// Level file: one level per line, energy then optional charge columns
    #[arg(long, value_name = "PATH")]
    levels: Option<PathBuf>,
    /// Inline level energies, comma separated (alternative to --levels)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    energy: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct SolveMuArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// Target total mean occupancy
    #[arg(long)]
    target: f64,
    /// Inverse temperature
    #[arg(long)]
    beta: f64,
    /// Statistics family: be or fd
    #[arg(long, default_value = "be")]
    kind: String,
    #[arg(long, value_name = "PATH")]
    levels: Option<PathBuf>,
    /// Inline level energies, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    energy: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// Activities, comma separated (alternative to --levels with --beta/--mu)
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, value_name = "PATH")]
    levels: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Largest total occupancy in the table
    #[arg(long, default_value_t = 10)]
    n_max: u64,
    /// Enumeration term budget
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct CondenseArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// Activities, comma separated; the largest one must be unique
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, value_name = "PATH")]
    levels: Option<PathBuf>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<f64>,
    /// Totals to evaluate, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [10u64, 20, 40, 60])]
    n_grid: Vec<u64>,
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct CorrelatedArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// Per-level continuation ratios, comma separated
    #[arg(long, value_delimiter = ',')]
    q: Vec<f64>,
    /// Per-level entry ratios, comma separated
    #[arg(long, value_delimiter = ',')]
    q0: Option<Vec<f64>>,
    /// Coupling weight
    #[arg(long)]
    omega: Option<f64>,
    /// Use the no-vacuum member: q0 = q, omega = 1/(1 - prod(1 - q_j))
    #[arg(long, default_value_t = false)]
    no_vacuum: bool,
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// What to sample: ensemble, correlated, or chain
    #[arg(long, default_value = "ensemble")]
    mode: String,
    /// Statistics family for ensemble mode
    #[arg(long, default_value = "be")]
    kind: String,
    #[arg(long)]
    cap: Option<u64>,
    /// Activities (ensemble) or continuation ratios (correlated)
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    q0: Option<Vec<f64>>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long, default_value_t = false)]
    no_vacuum: bool,
    /// Birth rates for chain mode, comma separated
    #[arg(long, value_delimiter = ',')]
    birth: Option<Vec<f64>>,
    /// Death rates for chain mode, comma separated
    #[arg(long, value_delimiter = ',')]
    death: Option<Vec<f64>>,
    /// Steps discarded before recording (chain mode)
    #[arg(long, default_value_t = 0)]
    burn_in: u64,
    /// Number of recorded draws
    #[arg(long, default_value_t = 0)]
    draws: u64,
    /// RNG seed; sampling refuses to run without one
    #[arg(long)]
    seed: Option<u64>,
    /// Batch count for batch-means standard errors (chain mode defaults
    /// to 50)
    #[arg(long)]
    batches: Option<usize>,
    /// Histogram cells 0..=cutoff per state, then one overflow bucket
    #[arg(long, default_value_t = 20)]
    histogram_cutoff: u64,
    /// Also emit one row per draw and state
    #[arg(long, default_value_t = false)]
    emit_draws: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    output: OutputArgs,
    /// Enumeration term budget per check; 0 skips every check
    #[arg(long, default_value_t = DEFAULT_ENUM_BUDGET)]
    budget: u64,
    /// Deliberately break checks whose name contains FRAGMENT (canary
    /// proving the suite detects wrong numbers)
    #[arg(long, hide = true, value_name = "FRAGMENT", num_args = 0..=1, default_missing_value = "zgc")]
    inject_fault: Option<String>,
}

/// Parse arguments, run, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let (table, name, output, code) = match &cli.command {
        Command::Occupancy(a) => (cmd_occupancy(a)?, "occupancy", &a.output, 0),
        Command::SolveMu(a) => (cmd_solve_mu(a)?, "solve-mu", &a.output, 0),
        Command::Partition(a) => (cmd_partition(a)?, "partition", &a.output, 0),
        Command::Condense(a) => (cmd_condense(a)?, "condense", &a.output, 0),
        Command::Correlated(a) => (cmd_correlated(a)?, "correlated", &a.output, 0),
        Command::Sample(a) => (cmd_sample(a)?, "sample", &a.output, 0),
        Command::Verify(a) => {
            let (t, code) = cmd_verify(a);
            (t, "verify", &a.output, code)
        }
    };
    emit(output, &table, name)?;
    Ok(code)
}

fn emit(output: &OutputArgs, table: &Table, command: &str) -> Result<()> {
    let rendered = table.render(output.format, command);
    match &output.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => std::io::stdout().write_all(rendered.as_bytes())?,
    }
    Ok(())
}

fn parse_kind(kind: &str, cap: Option<u64>) -> Result<EnsembleKind> {
    match (kind, cap) {
        ("be", None) => Ok(EnsembleKind::BoseEinstein),
        ("fd", None) => Ok(EnsembleKind::FermiDirac),
        ("gentile", Some(cap)) => {
            let k = EnsembleKind::Gentile(cap);
            k.validate()?;
            Ok(k)
        }
        ("gentile", None) => Err(Error::Usage("gentile statistics need --cap".into())),
        (k, Some(_)) => Err(Error::Usage(format!("--cap only applies to gentile, not {k:?}"))),
        (k, None) => Err(Error::Usage(format!(
            "unknown kind {k:?} (expected be, fd, or gentile)"
        ))),
    }
}

fn resolve_level_file(levels: &Option<PathBuf>, energy: &Option<Vec<f64>>) -> Result<LevelFile> {
    match (levels, energy) {
        (Some(path), None) => load_levels(path),
        (None, Some(e)) if !e.is_empty() => {
            Ok(LevelFile { energies: e.clone(), charges: None })
        }
        (None, Some(_)) => Err(Error::Usage("--energy list is empty".into())),
        (None, None) => Err(Error::Usage("provide --levels FILE or --energy LIST".into())),
        (Some(_), Some(_)) => Err(Error::Usage("use exactly one of --levels and --energy".into())),
    }
}

fn level_activities(
    file: &LevelFile,
    beta: f64,
    mu: Option<f64>,
    nu: &Option<Vec<f64>>,
) -> Result<Vec<Activity>> {
    match (mu, nu) {
        (Some(mu), None) => {
            if file.charges.is_some() {
                return Err(Error::Usage(
                    "the level file has charge columns; drive them with --nu, not --mu".into(),
                ));
            }
            let p = ThermoParams::new(beta, mu)?;
            file.energies.iter().map(|&e| q_thermo(&p, e)).collect()
        }
        (None, Some(nu)) => {
            let charges = file.charges.as_ref().ok_or_else(|| {
                Error::Usage("--nu needs charge columns in the level file".into())
            })?;
            let p = ThermoParams::with_nu(beta, nu.clone())?;
            file.energies
                .iter()
                .zip(charges)
                .map(|(&e, c)| q_thermo_generalized(&p, e, c))
                .collect()
        }
        (None, None) => Err(Error::Usage("provide --mu (or --nu with charge columns)".into())),
        (Some(_), Some(_)) => Err(Error::Usage("use exactly one of --mu and --nu".into())),
    }
}

fn cmd_occupancy(args: &OccupancyArgs) -> Result<Table> {
    let kind = parse_kind(&args.kind, args.cap)?;
    let file = resolve_level_file(&args.levels, &args.energy)?;
    let acts = level_activities(&file, args.beta, args.mu, &args.nu)?;
    if kind == EnsembleKind::BoseEinstein {
        if let Some((j, a)) = acts.iter().enumerate().find(|(_, a)| !a.unbounded_admissible) {
            return Err(Error::Domain(format!(
                "level {j} (energy {}) has q = {} >= 1: unbounded occupation needs the \
                 chemical potential strictly below every level energy",
                file.energies[j], a.value
            )));
        }
    }
    let mut t = Table::of(&["j", "energy", "q", "mean"]);
    let mut total = 0.0;
    for (j, a) in acts.iter().enumerate() {
        let mean = mean_occupancy(kind, a.value)?;
        total += mean;
        t.push(vec![
            Cell::Int(j as u64),
            Cell::Num(file.energies[j]),
            Cell::Num(a.value),
            Cell::Num(mean),
        ]);
    }
    t.push(vec![Cell::text("total"), Cell::Null, Cell::Null, Cell::Num(total)]);
    Ok(t)
}

fn cmd_solve_mu(args: &SolveMuArgs) -> Result<Table> {
    if !(args.target.is_finite() && args.target > 0.0) {
        return Err(Error::Domain(format!("target must be positive, got {}", args.target)));
    }
    let kind = match args.kind.as_str() {
        "be" => EnsembleKind::BoseEinstein,
        "fd" => EnsembleKind::FermiDirac,
        other => {
            return Err(Error::Usage(format!(
                "solve-mu supports be or fd, not {other:?}"
            )))
        }
    };
    let file = resolve_level_file(&args.levels, &args.energy)?;
    if file.charges.is_some() {
        return Err(Error::Usage("solve-mu works on plain energy levels".into()));
    }
    let energies = file.energies;
    let k = energies.len() as f64;
    let emin = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let emax = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let beta = args.beta;
    ThermoParams::new(beta, 0.0)?; // validates beta

    let total_at = |mu: f64| -> Result<f64> {
        let p = ThermoParams::new(beta, mu)?;
        let mut total = 0.0;
        for &e in &energies {
            total += mean_occupancy(kind, q_thermo(&p, e)?.value)?;
        }
        Ok(total)
    };

    // Below lo every activity is at most (target/(target+k)) e^{-50 beta},
    // so the total undershoots the target; the total is increasing in mu.
    let mut lo = emin - (1.0 + k / args.target).ln() / beta - 50.0;
    let mut hi = match kind {
        EnsembleKind::BoseEinstein => emin, // total diverges at emin, never evaluated
        _ => {
            if args.target >= k {
                return Err(Error::Domain(format!(
                    "exclusion statistics saturate at {k} particles over {k} levels; \
                     target {} is unreachable",
                    args.target
                )));
            }
            let mut hi = emax + 1.0 / beta;
            let mut step = 1.0 / beta;
            let mut tries = 0;
            while total_at(hi)? <= args.target {
                step *= 2.0;
                hi += step;
                tries += 1;
                if tries > 200 {
                    return Err(Error::Numeric(
                        "could not bracket the chemical potential from above".into(),
                    ));
                }
            }
            hi
        }
    };

    for iteration in 1..=200u64 {
        let mid = 0.5 * (lo + hi);
        let total = total_at(mid)?;
        if (total - args.target).abs() < 1e-10 {
            let mut t = Table::of(&["mu", "total", "iterations"]);
            t.push(vec![Cell::Num(mid), Cell::Num(total), Cell::Int(iteration)]);
            return Ok(t);
        }
        if total < args.target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Numeric(format!(
        "no convergence to |total - {}| < 1e-10 within 200 bisection steps",
        args.target
    )))
}

fn resolve_activities(
    q: &Option<Vec<f64>>,
    levels: &Option<PathBuf>,
    beta: Option<f64>,
    mu: Option<f64>,
) -> Result<QVector> {
    match (q, levels) {
        (Some(list), None) => QVector::open_unit(list.clone()),
        (None, Some(path)) => {
            let (beta, mu) = beta.zip(mu).ok_or_else(|| {
                Error::Usage("--levels needs --beta and --mu here".into())
            })?;
            let file = load_levels(path)?;
            if file.charges.is_some() {
                return Err(Error::Usage("charge columns are not supported here".into()));
            }
            let p = ThermoParams::new(beta, mu)?;
            let mut qs = Vec::with_capacity(file.energies.len());
            for &e in &file.energies {
                let a = q_thermo(&p, e)?;
                if !a.unbounded_admissible {
                    return Err(Error::Domain(format!(
                        "q = {} >= 1 at energy {e}: move the chemical potential below \
                         every level energy",
                        a.value
                    )));
                }
                qs.push(a.value);
            }
            QVector::open_unit(qs)
        }
        (None, None) => Err(Error::Usage("provide --q or --levels".into())),
        (Some(_), Some(_)) => Err(Error::Usage("use exactly one of --q and --levels".into())),
    }
}

fn cmd_partition(args: &PartitionArgs) -> Result<Table> {
    let q = resolve_activities(&args.q, &args.levels, args.beta, args.mu)?;
    let mut t = Table::of(&["N", "direct", "closed", "rel_gap"]);
    for n in 0..=args.n_max {
        let (direct_cell, direct) = match zgc_direct(&q, n, args.budget) {
            Ok(v) => (Cell::Num(v), Some(v)),
            Err(Error::Budget(_)) => (Cell::text("budget-exceeded"), None),
            Err(e) => return Err(e),
        };
        let (closed_cell, closed) = match zgc_closed(&q, n) {
            Ok(v) => (Cell::Num(v), Some(v)),
            Err(Error::IllConditioned(_)) => (Cell::text("ill-conditioned"), None),
            Err(e) => return Err(e),
        };
        let gap = match (direct, closed) {
            (Some(d), Some(c)) => Cell::Num((c - d).abs() / d.abs().max(f64::MIN_POSITIVE)),
            _ => Cell::Null,
        };
        t.push(vec![Cell::Int(n), direct_cell, closed_cell, gap]);
    }
    Ok(t)
}

fn cmd_condense(args: &CondenseArgs) -> Result<Table> {
    let q = resolve_activities(&args.q, &args.levels, args.beta, args.mu)?;
    let k = q.len();
    let mut ground = 0;
    for j in 1..k {
        if q.get(j) > q.get(ground) {
            ground = j;
        }
    }
    if (0..k).any(|j| j != ground && q.get(j) == q.get(ground)) {
        return Err(Error::Domain(
            "the largest activity is not unique; no single level can condense".into(),
        ));
    }
    let mut columns = vec!["N".to_string()];
    for j in 0..k {
        columns.push(format!("mean_{j}"));
    }
    columns.push("ground_share".to_string());
    let mut t = Table::new(columns);
    for &n in &args.n_grid {
        let mut row = vec![Cell::Int(n)];
        let mut ground_mean = 0.0;
        for j in 0..k {
            let m = conditional_mean_given_total(&q, j, n, args.budget)?;
            if j == ground {
                ground_mean = m.value;
            }
            row.push(Cell::Num(m.value));
        }
        row.push(if n > 0 { Cell::Num(ground_mean / n as f64) } else { Cell::Null });
        t.push(row);
    }
    let mut row = vec![Cell::text("limit")];
    for j in 0..k {
        row.push(if j == ground {
            Cell::Null
        } else {
            Cell::Num(condensation_limit(&q, ground, j)?)
        });
    }
    row.push(Cell::Num(1.0));
    t.push(row);
    Ok(t)
}

fn correlated_params(
    q: &[f64],
    q0: &Option<Vec<f64>>,
    omega: Option<f64>,
    no_vacuum: bool,
) -> Result<CorrelatedParams> {
    if no_vacuum {
        if q0.is_some() || omega.is_some() {
            return Err(Error::Usage("--no-vacuum replaces --q0 and --omega".into()));
        }
        condition_no_vacuum(&QVector::open_unit(q.to_vec())?)
    } else {
        let q0 = q0
            .clone()
            .ok_or_else(|| Error::Usage("provide --q0 and --omega, or --no-vacuum".into()))?;
        let omega = omega
            .ok_or_else(|| Error::Usage("provide --q0 and --omega, or --no-vacuum".into()))?;
        CorrelatedParams::new(q.to_vec(), q0, omega)
    }
}

fn cmd_correlated(args: &CorrelatedArgs) -> Result<Table> {
    if args.q.is_empty() {
        return Err(Error::Usage("provide --q with at least one level".into()));
    }
    let params = correlated_params(&args.q, &args.q0, args.omega, args.no_vacuum)?;
    let m = moments_corr(&params)?;
    let k = params.len();
    let mut t = Table::of(&["metric", "i", "j", "value"]);
    for i in 0..k {
        t.push(vec![Cell::text("mean"), Cell::Int(i as u64), Cell::Null, Cell::Num(m.means[i])]);
    }
    for i in 0..k {
        for j in 0..k {
            t.push(vec![
                Cell::text("cov"),
                Cell::Int(i as u64),
                Cell::Int(j as u64),
                Cell::Num(m.covariances[i][j]),
            ]);
        }
    }
    t.push(vec![Cell::text("vacuum"), Cell::Null, Cell::Null, Cell::Num(params.vacuum_mass())]);
    for i in 0..k {
        t.push(vec![
            Cell::text("entropy"),
            Cell::Int(i as u64),
            Cell::Null,
            Cell::Num(entropy_marginal_corr(&params, i)?),
        ]);
    }
    t.push(vec![
        Cell::text("mixing_gap"),
        Cell::Null,
        Cell::Null,
        Cell::Num(mixing_entropy_gap(&params, args.budget)?),
    ]);
    Ok(t)
}

fn cmd_sample(args: &SampleArgs) -> Result<Table> {
    let seed = args
        .seed
        .ok_or_else(|| Error::Usage("--seed is required for sampling".into()))?;
    let mut t = Table::of(&["metric", "i", "j", "value"]);
    if args.draws == 0 {
        eprintln!("nothing sampled: pass --draws N for N draws");
        return Ok(t);
    }
    let mut src = SeededSource::new(seed);
    let mut is_chain = false;
    let draws: Vec<Occupancy> = match args.mode.as_str() {
        "ensemble" => {
            let kind = parse_kind(&args.kind, args.cap)?;
            let list = args
                .q
                .clone()
                .ok_or_else(|| Error::Usage("ensemble sampling needs --q".into()))?;
            let q = match kind {
                EnsembleKind::BoseEinstein => QVector::open_unit(list)?,
                _ => QVector::positive(list)?,
            };
            let mut out = Vec::with_capacity(args.draws as usize);
            for _ in 0..args.draws {
                out.push(sample_occupancy(kind, &q, &mut src)?);
            }
            out
        }
        "correlated" => {
            let list = args
                .q
                .clone()
                .ok_or_else(|| Error::Usage("correlated sampling needs --q".into()))?;
            let params = correlated_params(&list, &args.q0, args.omega, args.no_vacuum)?;
            let sampler = CorrelatedSampler::new(&params)?;
            (0..args.draws).map(|_| sampler.sample(&mut src)).collect()
        }
        "chain" => {
            is_chain = true;
            let birth = args
                .birth
                .clone()
                .ok_or_else(|| Error::Usage("chain mode needs --birth and --death".into()))?;
            let death = args
                .death
                .clone()
                .ok_or_else(|| Error::Usage("chain mode needs --birth and --death".into()))?;
            let spec = ChainSpec::new(birth, death)?;
            let mut state = Occupancy::new(vec![0; spec.len()]);
            for _ in 0..args.burn_in {
                state = chain_step(&state, &spec, &mut src);
            }
            let mut out = Vec::with_capacity(args.draws as usize);
            for _ in 0..args.draws {
                state = chain_step(&state, &spec, &mut src);
                out.push(state.clone());
            }
            out
        }
        other => {
            return Err(Error::Usage(format!(
                "unknown mode {other:?} (expected ensemble, correlated, or chain)"
            )))
        }
    };

    let batches = args.batches.or(if is_chain { Some(50) } else { None });
    let report = empirical_report(
        &draws,
        &EmpiricalOptions { histogram_cutoff: args.histogram_cutoff, batches },
    )?;

    if args.emit_draws {
        for (d, draw) in draws.iter().enumerate() {
            for (j, &count) in draw.counts().iter().enumerate() {
                t.push(vec![
                    Cell::text("draw"),
                    Cell::Int(d as u64),
                    Cell::Int(j as u64),
                    Cell::Int(count),
                ]);
            }
        }
    }
    t.push(vec![Cell::text("count"), Cell::Null, Cell::Null, Cell::Int(report.count as u64)]);
    let k = report.means.len();
    for j in 0..k {
        t.push(vec![
            Cell::text("mean"),
            Cell::Int(j as u64),
            Cell::Null,
            Cell::Num(report.means[j]),
        ]);
        t.push(vec![
            Cell::text("std_error"),
            Cell::Int(j as u64),
            Cell::Null,
            Cell::Num(report.std_errors[j]),
        ]);
    }
    for i in 0..k {
        for j in 0..k {
            t.push(vec![
                Cell::text("cov"),
                Cell::Int(i as u64),
                Cell::Int(j as u64),
                Cell::Num(report.covariances[i][j]),
            ]);
        }
    }
    if let Some(b) = report.batches {
        t.push(vec![Cell::text("batches"), Cell::Null, Cell::Null, Cell::Int(b as u64)]);
    }
    for (j, hist) in report.histograms.iter().enumerate() {
        let overflow = hist.len() - 1;
        for (n, &count) in hist.iter().enumerate() {
            if n == overflow {
                t.push(vec![
                    Cell::text("hist_overflow"),
                    Cell::Int(j as u64),
                    Cell::Null,
                    Cell::Int(count),
                ]);
            } else {
                t.push(vec![
                    Cell::text("hist"),
                    Cell::Int(j as u64),
                    Cell::Int(n as u64),
                    Cell::Int(count),
                ]);
            }
        }
    }
    Ok(t)
}

fn cmd_verify(args: &VerifyArgs) -> (Table, i32) {
    let report = run_verification_suite(&VerifyConfig {
        max_terms: args.budget,
        fault_target: args.inject_fault.clone(),
    });
    let mut t = Table::of(&[
        "check",
        "status",
        "target",
        "oracle",
        "abs_err",
        "rel_err",
        "tolerance",
        "terms",
    ]);
    let (mut passed, mut failed, mut skipped) = (0u64, 0u64, 0u64);
    for c in &report.checks {
        let status = if c.skipped {
            skipped += 1;
            "skip"
        } else if c.passed {
            passed += 1;
            "pass"
        } else {
            failed += 1;
            "fail"
        };
        let num = |x: f64| if c.skipped { Cell::Null } else { Cell::Num(x) };
        t.push(vec![
            Cell::text(&c.name),
            Cell::text(status),
            num(c.target),
            num(c.oracle),
            num(c.abs_err),
            num(c.rel_err),
            Cell::Num(c.tolerance),
            Cell::Int(c.terms),
        ]);
    }
    eprintln!(
        "{} checks: {passed} passed, {failed} failed, {skipped} skipped",
        report.checks.len()
    );
    (t, if report.all_passed() { 0 } else { 1 })
}
