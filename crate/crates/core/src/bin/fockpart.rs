//! `fockpart`: identity suites, state dumps, damping and convergence tables.
//!
//! Exit status: 0 success, 1 a verify check failed, 2 usage or parameter error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use fock_partition::channels::{damp_diagonal, ChannelSpec};
use fock_partition::fockcore::FockCutoff;
use fock_partition::output::{fmt_num, to_csv, to_json};
use fock_partition::partition::{
    bs_partition, nbs_partition, partition_table, Family, PartitionReport, TableRow, DEFAULT_LEVELS, DEFAULT_TERMS,
};
use fock_partition::states::{
    binomial_state, mean_photon, negbinomial_state, number_state, thermal_state, DiagonalState, MeanPhoton,
    StateLabel,
};
use fock_partition::verify::{self, CheckRow, Fault, GridFile, Suite, VerifyOptions};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "fockpart", version, about = "Partitions of unity in a truncated Fock space")]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity suites over the shipped parameter grids.
    Verify(VerifyArgs),
    /// Convergence table of a partition of unity.
    Partition(PartitionArgs),
    /// Build a state and dump its photon-number distribution.
    State(StateCmd),
    /// Damp a state through the amplitude-dissipation channel.
    Channel(ChannelArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Specfun,
    Ordering,
    Partition,
    Channel,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    NbsNormalExponent,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum DataFormat {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    suite: SuiteArg,
    /// Run tolerance for checks without a pinned one.
    #[arg(long, env = "FOCK_PARTITION_TOL", default_value_t = verify::DEFAULT_RUN_TOL)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    format: TableFormat,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Grid file replacing the shipped one.
    #[arg(long)]
    grids: Option<PathBuf>,
    /// Corrupt one identity on purpose.
    #[arg(long, value_enum)]
    fault: Option<FaultArg>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Bs,
    Nbs,
}

#[derive(Args, Debug)]
struct PartitionArgs {
    family: FamilyArg,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_TERMS)]
    terms: usize,
    #[arg(long, default_value_t = DEFAULT_LEVELS)]
    levels: usize,
    #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
    format: DataFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum LabelArg {
    Number,
    Binomial,
    Negbinomial,
    Thermal,
}

#[derive(Args, Debug)]
struct StateParams {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Args, Debug)]
struct StateCmd {
    label: LabelArg,
    #[command(flatten)]
    params: StateParams,
    #[arg(long, value_enum, default_value_t = DataFormat::Json)]
    format: DataFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    #[arg(long = "state")]
    label: LabelArg,
    #[command(flatten)]
    params: StateParams,
    /// Dimensionless damping exposure κt.
    #[arg(long)]
    kt: f64,
    #[arg(long, value_enum, default_value_t = DataFormat::Json)]
    format: DataFormat,
    #[arg(long)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<fock_partition::Error> for Failure {
    fn from(e: fock_partition::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(text: &str, path: &Option<PathBuf>) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let result = match cfg.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Partition(a) => cmd_partition(a),
        Command::State(a) => cmd_state(a),
        Command::Channel(a) => cmd_channel(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    if !(a.tol.is_finite() && a.tol >= 0.0) {
        return Err(usage(format!("tolerance must be a finite nonnegative number, got {}", a.tol)));
    }
    let grids = match &a.grids {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
            GridFile::parse(&text)?
        }
        None => GridFile::builtin(),
    };
    let suites: Vec<Suite> = match a.suite {
        SuiteArg::All => Suite::ALL.to_vec(),
        SuiteArg::Specfun => vec![Suite::Specfun],
        SuiteArg::Ordering => vec![Suite::Ordering],
        SuiteArg::Partition => vec![Suite::Partition],
        SuiteArg::Channel => vec![Suite::Channel],
    };
    let opts = VerifyOptions {
        tol: a.tol,
        fault: a.fault.map(|f| match f {
            FaultArg::NbsNormalExponent => Fault::NbsNormalExponent,
        }),
    };
    let rows = verify::run(&grids, &suites, &opts);
    let text = match a.format {
        TableFormat::Text => verify_text(&rows, &suites),
        TableFormat::Json => to_json(&rows),
        TableFormat::Csv => to_csv(
            &["suite", "identity", "params", "residual", "tol", "status"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.suite.to_string(),
                        r.identity.clone(),
                        r.params.clone(),
                        fmt_num(r.residual),
                        fmt_num(r.tol),
                        status(r).into(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(&text, &a.output)?;
    if rows.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn status(r: &CheckRow) -> &'static str {
    if r.pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify_text(rows: &[CheckRow], suites: &[Suite]) -> String {
    let name_w = rows.iter().map(|r| r.suite.name().len() + 1 + r.identity.len()).max().unwrap_or(8);
    let par_w = rows.iter().map(|r| r.params.len()).max().unwrap_or(6);
    let mut out = format!(
        "{:<name_w$}  {:<par_w$}  {:>24}  {:>24}  STATUS\n",
        "IDENTITY", "PARAMETERS", "RESIDUAL", "TOL"
    );
    for r in rows {
        out.push_str(&format!(
            "{:<name_w$}  {:<par_w$}  {:>24}  {:>24}  {}",
            format!("{}/{}", r.suite, r.identity),
            r.params,
            fmt_num(r.residual),
            fmt_num(r.tol),
            status(r)
        ));
        if let Some(e) = &r.error {
            out.push_str(&format!("  ({e})"));
        }
        out.push('\n');
    }
    for s in suites {
        let mine: Vec<&CheckRow> = rows.iter().filter(|r| r.suite == *s).collect();
        let failed = mine.iter().filter(|r| !r.pass).count();
        out.push_str(&format!(
            "suite {s}: {} checks, {failed} failed: {}\n",
            mine.len(),
            if failed == 0 && !mine.is_empty() { "PASS" } else { "FAIL" }
        ));
    }
    out
}

#[derive(Serialize)]
struct PartitionOutput {
    report: PartitionReport,
    rows: Vec<TableRow>,
}

fn cmd_partition(a: PartitionArgs) -> CmdResult {
    let (family, report) = match a.family {
        FamilyArg::Bs => {
            let sigma = a.sigma.ok_or_else(|| usage("partition bs requires --sigma"))?;
            (Family::Binomial { sigma }, bs_partition(sigma, a.terms, a.levels)?)
        }
        FamilyArg::Nbs => {
            let gamma = a.gamma.ok_or_else(|| usage("partition nbs requires --gamma"))?;
            (Family::Negbinomial { gamma }, nbs_partition(gamma, a.terms, a.levels)?)
        }
    };
    let rows = partition_table(family, a.terms, a.levels)?;
    let text = match a.format {
        DataFormat::Json => to_json(&PartitionOutput { report, rows }),
        DataFormat::Csv => to_csv(
            &["terms_used", "level", "partial_sum", "residual"],
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.terms_used.to_string(),
                        r.level.to_string(),
                        fmt_num(r.partial_sum),
                        fmt_num(r.residual),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    };
    emit(&text, &a.output)
}

fn build_state(label: LabelArg, p: &StateParams) -> std::result::Result<DiagonalState, Failure> {
    let need_u = |v: Option<usize>, flag: &str| v.ok_or_else(|| usage(format!("this state requires --{flag}")));
    let need_f = |v: Option<f64>, flag: &str| v.ok_or_else(|| usage(format!("this state requires --{flag}")));
    let cut = |default: usize| FockCutoff::new(p.cutoff.unwrap_or(default));
    Ok(match label {
        LabelArg::Number => {
            let m = need_u(p.m, "m")?;
            number_state(m, cut((m + 1).max(2))?)?
        }
        LabelArg::Binomial => {
            let n = need_u(p.n, "n")?;
            binomial_state(n, need_f(p.sigma, "sigma")?, cut((n + 1).max(2))?)?
        }
        LabelArg::Negbinomial => negbinomial_state(need_u(p.s, "s")?, need_f(p.gamma, "gamma")?, cut(32)?)?,
        LabelArg::Thermal => thermal_state(need_f(p.gamma, "gamma")?, cut(32)?)?,
    })
}

#[derive(Serialize)]
struct StateOutput<'a> {
    #[serde(flatten)]
    state: &'a DiagonalState,
    mean_photon: MeanPhoton,
    #[serde(skip_serializing_if = "Option::is_none")]
    kt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    matched_binomial: Option<MatchedBinomial>,
}

#[derive(Serialize, Clone, Copy)]
struct MatchedBinomial {
    n: usize,
    survival: f64,
}

fn render_state(
    state: &DiagonalState,
    kt: Option<f64>,
    matched: Option<MatchedBinomial>,
    format: DataFormat,
) -> String {
    let mp = mean_photon(state);
    match format {
        DataFormat::Json => to_json(&StateOutput {
            state,
            mean_photon: mp,
            kt,
            matched_binomial: matched,
        }),
        DataFormat::Csv => {
            eprintln!(
                "label={} tail_mass={} mean_photon={} mean_photon_tail_bound={}",
                state.label().name(),
                fmt_num(state.tail_mass()),
                fmt_num(mp.value),
                fmt_num(mp.tail_bound)
            );
            if let Some(b) = matched {
                eprintln!("matched binomial: n={} survival={}", b.n, fmt_num(b.survival));
            }
            to_csv(
                &["level", "probability"],
                &state
                    .probs()
                    .iter()
                    .enumerate()
                    .map(|(l, p)| vec![l.to_string(), fmt_num(*p)])
                    .collect::<Vec<_>>(),
            )
        }
    }
}

fn cmd_state(a: StateCmd) -> CmdResult {
    let state = build_state(a.label, &a.params)?;
    emit(&render_state(&state, None, None, a.format), &a.output)
}

fn cmd_channel(a: ChannelArgs) -> CmdResult {
    let ch = ChannelSpec::new(a.kt)?;
    let input = build_state(a.label, &a.params)?;
    let out = damp_diagonal(&input, &ch);
    let matched = match input.label() {
        StateLabel::Number { m } => Some(MatchedBinomial {
            n: m,
            survival: ch.survival(),
        }),
        _ => None,
    };
    emit(&render_state(&out, Some(ch.kt()), matched, a.format), &a.output)
}
