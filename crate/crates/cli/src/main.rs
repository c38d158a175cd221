// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! `chanrec`: assign white channels, evaluate recovery capacity, solve small
//! instances exactly and run the studies.
//!
//! Exit codes: 0 success, 2 usage or input error, 3 search budget exceeded
//! under `--strict`, 1 anything else (I/O).

mod study;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chanrec::assign::{edge_color, greedy_assign, ifa_assign, random_assign, shuffled_order, DEFAULT_SEED};
use chanrec::experiments::{generate_instance, InstanceSpec};
use chanrec::json::to_pretty_bytes;
use chanrec::metrics::evaluation_json;
use chanrec::netmodel::{parse_assignment, parse_network, serialize_assignment, serialize_network};
use chanrec::oracles::{Oracle, Problem, DEFAULT_BUDGET};
use chanrec::{Error, Evaluator, Mode, Network};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "chanrec", version, about = "White-channel assignment and preemption recovery capacity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Assign a channel to every link.
    Assign(AssignArgs),
    /// Recovery capacity and sustainable traffic of an assignment.
    Eval(EvalArgs),
    /// Exact optimum by branch and bound.
    Oracle(OracleArgs),
    /// Proper edge colouring with at most d_max + 1 colours.
    Color(ColorArgs),
    /// Random network file.
    Generate(GenerateArgs),
    /// Scaling, gap or sustained-traffic study.
    Study(study::StudyArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Algorithm {
    Greedy,
    Ifa,
    Random,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Bracket,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemArg {
    Whiterec,
    Whiterecinf,
    Feasi,
    Whiterecapprox,
}

#[derive(Debug, clap::Args)]
struct AssignArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum)]
    alg: Algorithm,
    /// Seed for `random`, and for `greedy` with `--shuffle-order`.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Process links in a seeded random order instead of file order (greedy).
    #[arg(long)]
    shuffle_order: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct EvalArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    assignment: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Defaults to exact up to `--cap` nodes and bracket above.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Largest node count for exact odd-set enumeration.
    #[arg(long, default_value_t = chanrec::metrics::DEFAULT_ODDSET_EXACT_CAP)]
    cap: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct OracleArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long, value_enum, default_value = "whiterec")]
    problem: ProblemArg,
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// Maximum number of complete assignments evaluated.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Exit with code 3 when the budget runs out before optimality is proven.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct ColorArgs {
    #[arg(long)]
    network: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    nodes: usize,
    #[arg(long)]
    channels: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(flatten)]
    gen: study::GeneratorArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    Usage(String),
    Input(Error),
    Budget,
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e.to_string()),
            e => Failure::Input(e),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Input(_) => 2,
            Failure::Budget => 3,
            Failure::Io(_) => 1,
        }
    }
}

pub(crate) type CliResult<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn load_network(path: &Path) -> CliResult<Network> {
    Ok(parse_network(&read(path)?)?)
}

pub(crate) fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(bytes).map_err(|e| Failure::Io(e.to_string())),
    }
}

fn check_k(k: usize) -> CliResult {
    if k == 0 {
        Err(Failure::Input(Error::InvalidK))
    } else {
        Ok(())
    }
}

fn cmd_assign(a: AssignArgs) -> CliResult {
    let net = load_network(&a.network)?;
    let y = match a.alg {
        Algorithm::Greedy => {
            let order = if a.shuffle_order {
                shuffled_order(net.n_edges(), a.seed)
            } else {
                (0..net.n_edges()).collect()
            };
            greedy_assign(&net, &order)?
        }
        Algorithm::Ifa => ifa_assign(&net),
        Algorithm::Random => random_assign(&net, a.seed),
    };
    emit(a.out.as_deref(), &serialize_assignment(&net, &y))
}

fn cmd_eval(a: EvalArgs) -> CliResult {
    check_k(a.k)?;
    let net = load_network(&a.network)?;
    let y = parse_assignment(&net, &read(&a.assignment)?)?;
    let evaluator = Evaluator::with_cap(a.cap);
    let mode = match a.mode {
        Some(ModeArg::Exact) => Mode::Exact,
        Some(ModeArg::Bracket) => Mode::Bracket,
        None => evaluator.default_mode(&net),
    };
    let rec = evaluator.recovery_capacity(&net, &y, a.k, mode)?;
    let feas = evaluator.feasibility_ratio(&net, &y, mode)?;
    emit(a.out.as_deref(), &to_pretty_bytes(&evaluation_json(&net, &rec, &feas)))
}

fn cmd_oracle(a: OracleArgs) -> CliResult {
    check_k(a.k)?;
    let net = load_network(&a.network)?;
    let problem = match a.problem {
        ProblemArg::Whiterec => Problem::WhiteRec,
        ProblemArg::Whiterecinf => Problem::WhiteRecInf,
        ProblemArg::Feasi => Problem::Feasi,
        ProblemArg::Whiterecapprox => Problem::WhiteRecApprox,
    };
    let res = Oracle::with_budget(a.budget).solve(&net, problem, a.k)?;
    emit(a.out.as_deref(), &to_pretty_bytes(&res.to_json(&net)))?;
    if a.strict && !res.proven_optimal {
        return Err(Failure::Budget);
    }
    Ok(())
}

fn cmd_color(a: ColorArgs) -> CliResult {
    let net = load_network(&a.network)?;
    emit(a.out.as_deref(), &to_pretty_bytes(&edge_color(&net).to_json()))
}

fn cmd_generate(a: GenerateArgs) -> CliResult {
    let spec = InstanceSpec { n_nodes: a.nodes, n_channels: a.channels, seed: a.seed, ..a.gen.template()? };
    let net: Network = generate_instance(&spec)?;
    emit(a.out.as_deref(), &serialize_network(&net))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Assign(a) => cmd_assign(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Color(a) => cmd_color(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Study(a) => study::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Input(e) => eprintln!("error: {e}"),
                Failure::Budget => eprintln!("error: budget exhausted before optimality was proven"),
            }
            ExitCode::from(f.code())
        }
    }
}
