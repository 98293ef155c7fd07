mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fluxlogic::sat::SatSolver;
use fluxlogic::{
    anneal_with_workers, check_function, decide_sat, parse_dimacs, parse_netlist_with, solve_exact,
    to_ising, truth_table, AnnealSchedule, BoolFn, CellId, Error, ExactOptions, GateParams, Model,
    NetlistDocument, Network, Overrides, SatConfig, SatStatus, DEFAULT_TOLERANCE,
};

use output::{Report, SatReport, SolveReport};

#[derive(Debug, Parser)]
#[command(
    name = "fluxlogic",
    version,
    about = "Ground-state logic on flux-biased ring cells"
)]
struct Cli {
    /// Energy model.
    #[arg(long, global = true, value_parser = parse_model)]
    model: Option<Model>,

    /// Largest number of free cells enumerated exactly per component.
    #[arg(long, global = true, default_value_t = 24)]
    max_exact: usize,

    /// Energy tolerance for ties and degeneracy.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Print machine-readable JSON.
    #[arg(long, global = true)]
    json: bool,

    #[command(flatten)]
    params: ParamArgs,

    #[command(subcommand)]
    command: Command,
}

/// Gate parameters; these win over `param` lines in a netlist.
#[derive(Debug, Args)]
struct ParamArgs {
    /// Coupling strength of gate heads.
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// NAND/NOR head bias magnitude.
    #[arg(long = "d-bias", global = true)]
    d_bias: Option<f64>,
    /// Flux shift of quadratic-model lift units.
    #[arg(long, global = true)]
    edl: Option<f64>,
    /// Penalty of a violated clause (mismatch model).
    #[arg(long, global = true)]
    dedlu: Option<f64>,
    /// Flux shift of clause decision units (quadratic model).
    #[arg(long = "dedlu-flux", global = true)]
    dedlu_flux: Option<f64>,
}

#[derive(Debug, Args)]
struct ScheduleArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    sweeps: usize,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long = "t-initial", default_value_t = 2.0)]
    t_initial: f64,
    #[arg(long = "t-final", default_value_t = 0.005)]
    t_final: f64,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

impl ScheduleArgs {
    fn schedule(&self) -> AnnealSchedule {
        AnnealSchedule {
            t_initial: self.t_initial,
            t_final: self.t_final,
            sweeps: self.sweeps,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground states, minimum energy and degeneracy of a netlist.
    Solve {
        netlist: PathBuf,
        /// Use simulated annealing instead of exact enumeration.
        #[arg(long)]
        anneal: bool,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Output values over all input rows.
    TruthTable {
        netlist: PathBuf,
        /// Input cells, first is the most significant bit [default: declared inputs].
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        inputs: Vec<String>,
        /// Output cells [default: declared outputs].
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        outputs: Vec<String>,
    },
    /// Checks outputs against Boolean functions; exits 1 on mismatch.
    CheckGate {
        netlist: PathBuf,
        /// One function per output: buf, not, and, or, nand, nor, xor, xnor.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        expect: Vec<BoolFn>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        inputs: Vec<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        outputs: Vec<String>,
    },
    /// Decides a DIMACS 3-CNF formula with the clause-evaluator machine.
    Sat {
        dimacs: PathBuf,
        #[arg(long)]
        anneal: bool,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
    /// Fields, couplings and constant of the equivalent Ising model.
    ExportIsing { netlist: PathBuf },
    /// Simulated annealing on a netlist.
    Anneal {
        netlist: PathBuf,
        #[command(flatten)]
        schedule: ScheduleArgs,
    },
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure outcome: an exit code and a diagnostic.
struct Failure {
    code: u8,
    error: Error,
    hint: Option<String>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: 2,
            error,
            hint: None,
        }
    }
}

struct Ctx {
    model_flag: Option<Model>,
    exact: ExactOptions,
    overrides: Overrides,
}

impl Ctx {
    fn load(&self, path: &Path) -> Result<NetlistDocument, Failure> {
        let text = read(path)?;
        parse_netlist_with(&text, &self.overrides).map_err(Failure::from)
    }

    fn model(&self, doc: &NetlistDocument) -> Model {
        self.model_flag.or(doc.model).unwrap_or_default()
    }

    fn exact(&self, net: &Network) -> ExactOptions {
        ExactOptions {
            tolerance: net.tolerance(),
            ..self.exact.clone()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| {
        Failure::from(Error::InvalidValue(format!(
            "cannot read {}: {e}",
            path.display()
        )))
    })
}

fn resolve(net: &Network, names: &[String], fallback: Vec<CellId>) -> Result<Vec<CellId>, Failure> {
    if names.is_empty() {
        return Ok(fallback);
    }
    names
        .iter()
        .map(|n| net.id(n).map_err(Failure::from))
        .collect()
}

fn run(cli: Cli) -> Result<(Report, u8), Failure> {
    let tol = cli.tol.unwrap_or(DEFAULT_TOLERANCE);
    let ctx = Ctx {
        model_flag: cli.model,
        exact: ExactOptions {
            max_free_cells: cli.max_exact,
            tolerance: tol,
            ..ExactOptions::default()
        },
        overrides: Overrides {
            delta: cli.params.delta,
            d_bias: cli.params.d_bias,
            edl_strength: cli.params.edl,
            dedlu_strength: cli.params.dedlu,
            dedlu_flux: cli.params.dedlu_flux,
            model: cli.model,
            tolerance: cli.tol,
        },
    };

    match cli.command {
        Command::Solve {
            netlist,
            anneal,
            schedule,
        } => {
            let doc = ctx.load(&netlist)?;
            let model = ctx.model(&doc);
            let net = &doc.network;
            let result = if anneal {
                anneal_run(net, model, &schedule)?
            } else {
                solve_exact(net, model, &ctx.exact(net)).map_err(over_limit_hint)?
            };
            let schedule = anneal.then(|| schedule.schedule());
            Ok((
                Report::Solve(SolveReport::new("solve", net, model, &result, schedule)),
                0,
            ))
        }
        Command::Anneal { netlist, schedule } => {
            let doc = ctx.load(&netlist)?;
            let model = ctx.model(&doc);
            let result = anneal_run(&doc.network, model, &schedule)?;
            Ok((
                Report::Solve(SolveReport::new(
                    "anneal",
                    &doc.network,
                    model,
                    &result,
                    Some(schedule.schedule()),
                )),
                0,
            ))
        }
        Command::TruthTable {
            netlist,
            inputs,
            outputs,
        } => {
            let doc = ctx.load(&netlist)?;
            let net = &doc.network;
            let ins = resolve(net, &inputs, doc.inputs())?;
            let outs = resolve(net, &outputs, doc.outputs())?;
            let report = truth_table(net, &ins, &outs, ctx.model(&doc), &ctx.exact(net))
                .map_err(over_limit_hint)?;
            Ok((Report::TruthTable(report), 0))
        }
        Command::CheckGate {
            netlist,
            expect,
            inputs,
            outputs,
        } => {
            let doc = ctx.load(&netlist)?;
            let net = &doc.network;
            let ins = resolve(net, &inputs, doc.inputs())?;
            let outs = resolve(net, &outputs, doc.outputs())?;
            if expect.len() != outs.len() {
                return Err(Error::InvalidValue(format!(
                    "{} functions given for {} outputs",
                    expect.len(),
                    outs.len()
                ))
                .into());
            }
            let report = check_function(
                net,
                &ins,
                &outs,
                |xs| expect.iter().map(|f| f.eval(xs)).collect(),
                ctx.model(&doc),
                &ctx.exact(net),
            )
            .map_err(over_limit_hint)?;
            let code = if report.passed == Some(true) { 0 } else { 1 };
            Ok((Report::CheckGate(report), code))
        }
        Command::Sat {
            dimacs,
            anneal,
            schedule,
        } => {
            let cnf = parse_dimacs(&read(&dimacs)?)?;
            let o = &ctx.overrides;
            let d = GateParams::default();
            let p = GateParams {
                delta: o.delta.unwrap_or(d.delta),
                d_bias: o.d_bias.unwrap_or(d.d_bias),
                edl_strength: o.edl_strength.unwrap_or(d.edl_strength),
                dedlu_strength: o.dedlu_strength.unwrap_or(d.dedlu_strength),
                dedlu_flux: o.dedlu_flux.unwrap_or(d.dedlu_flux),
            };
            let model = ctx.model_flag.unwrap_or_default();
            let solver = if anneal {
                SatSolver::Anneal(schedule.schedule())
            } else {
                SatSolver::Exact(ctx.exact.clone())
            };
            let cfg = SatConfig { model, solver };
            let outcome = match schedule.workers {
                Some(w) => pool(w)?.install(|| decide_sat(&cnf, &p, &cfg)),
                None => decide_sat(&cnf, &p, &cfg),
            }
            .map_err(over_limit_hint)?;
            let code = match outcome.status {
                SatStatus::Sat | SatStatus::Unsat => 0,
                SatStatus::Unknown => 1,
            };
            Ok((Report::Sat(SatReport::new(model, outcome)), code))
        }
        Command::ExportIsing { netlist } => {
            let doc = ctx.load(&netlist)?;
            let ising = to_ising(&doc.network);
            Ok((Report::Ising(output::IsingReport::new(&ising)), 0))
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidValue(format!("thread pool: {e}")).into())
}

fn anneal_run(
    net: &Network,
    model: Model,
    args: &ScheduleArgs,
) -> Result<fluxlogic::SolveResult, Failure> {
    let schedule = args.schedule();
    let workers = args.workers.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    Ok(anneal_with_workers(net, model, &schedule, workers)?)
}

fn over_limit_hint(error: Error) -> Failure {
    let hint = match &error {
        Error::OverLimit { free, .. } => Some(format!(
            "a component has {free} free cells; raise --max-exact (at most {}) or pass --anneal \
             for an uncertified answer",
            fluxlogic::solver::HARD_LIMIT
        )),
        _ => None,
    };
    Failure {
        code: 2,
        error,
        hint,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok((report, code)) => {
            let text = if json {
                report.to_json()
            } else {
                report.to_text()
            };
            let _ = stdout.write_all(text.as_bytes());
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.error);
            if let Some(hint) = &f.hint {
                eprintln!("hint: {hint}");
            }
            if json {
                let text = output::error_json(&f.error, f.hint.as_deref());
                let _ = stdout.write_all(text.as_bytes());
            }
            ExitCode::from(f.code)
        }
    }
}
