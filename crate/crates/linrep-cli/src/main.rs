//! `linrep`: decide constrained linear representability questions from the
//! command line.
//!
//! Exit status: 0 yes, 1 no, 2 inconclusive, 3 bad input, 4 I/O failure.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use linrep::catalog;
use linrep::constraints::{constraints_from_rank_vector, AccessStructure, ConstraintSet, NetworkInstance};
use linrep::engine::{self, Config};
use linrep::polymatroid::{ClassTuple, RankVector};
use linrep::region::{rate_region, Polyhedral};
use linrep::transform::{transform, validate_transform};
use serde_json::json;

#[derive(Parser)]
#[command(name = "linrep", version, about = "Search for linear codes meeting rank constraints over finite fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// field order, a prime power up to 256
    #[arg(long, short = 'q', default_value_t = 2)]
    field: u64,
    /// worker threads for independent ambient dimensions
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// cap on representatives per generation cell
    #[arg(long)]
    max_reps: Option<usize>,
    /// wall-clock limit in seconds
    #[arg(long)]
    timeout: Option<f64>,
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    /// machine-readable output
    #[arg(long)]
    json: bool,
    /// include elapsed time in the report
    #[arg(long)]
    time: bool,
    /// write the per-cell counts as CSV
    #[arg(long)]
    stats_csv: Option<PathBuf>,
}

impl Common {
    fn config(&self) -> Config {
        Config {
            max_reps: self.max_reps,
            timeout: self.timeout.map(Duration::from_secs_f64),
            jobs: self.jobs.max(1),
            seed: self.seed,
            record_time: self.time,
            ..Config::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Is a rate vector achievable on a network with linear codes?
    ProveRate {
        /// instance file or builtin:NAME
        instance: String,
        /// comma-separated rates, one per variable
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<u32>,
        /// bound the ambient dimension by the sum of all rates
        #[arg(long)]
        literal_bound: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Harvest achievable rate vectors and their conic hull.
    ProveRegion {
        instance: String,
        /// largest code dimension per variable
        #[arg(long, default_value_t = 2)]
        dmax: usize,
        /// largest ambient dimension
        #[arg(long)]
        rmax: usize,
        /// write the H-representation here
        #[arg(long)]
        emit_region: Option<PathBuf>,
        /// print every rate vector
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Does a linear secret sharing scheme with these share sizes exist?
    ProveSs {
        instance: String,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<u32>,
        #[command(flatten)]
        common: Common,
    },
    /// Is an integer polymatroid representable?
    ProveRep {
        /// rank vector file or builtin:NAME
        instance: String,
        #[command(flatten)]
        common: Common,
    },
    /// Convert a network and rate vector into a unit-capacity multigraph instance.
    Transform {
        instance: String,
        #[arg(long, value_delimiter = ',', required = true)]
        rates: Vec<u32>,
        /// edge-list output; standard output when absent
        #[arg(long)]
        output: Option<PathBuf>,
        /// Graphviz rendering
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// List every code of a class meeting the instance's constraints.
    Enumerate {
        instance: String,
        #[arg(long)]
        rmin: usize,
        #[arg(long)]
        rmax: usize,
        /// allowed singleton ranks
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        smin: usize,
        /// defaults to the number of variables
        #[arg(long)]
        smax: Option<usize>,
        /// print each code
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Show or write the built-in instances.
    Catalog {
        /// directory to write instance files into
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Io(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Input(e.to_string())
    }
}

enum Instance {
    Network(NetworkInstance),
    Access(AccessStructure),
    Rank(RankVector),
}

impl Instance {
    fn constraints(&self) -> Result<ConstraintSet, Failure> {
        Ok(match self {
            Instance::Network(n) => n.constraints(),
            Instance::Access(a) => a.constraints(),
            Instance::Rank(h) => constraints_from_rank_vector(h)?,
        })
    }
}

fn builtin(name: &str) -> Option<Instance> {
    match name {
        "benaloh" => Some(Instance::Access(catalog::benaloh())),
        "linrank6" => Some(Instance::Rank(catalog::linrank6())),
        "u24rank" => Some(Instance::Rank(catalog::u24_rank_vector())),
        _ => catalog::network(name).map(Instance::Network),
    }
}

fn load(arg: &str) -> Result<Instance, Failure> {
    if let Some(name) = arg.strip_prefix("builtin:") {
        return builtin(name).ok_or_else(|| Failure::Input(format!("no built-in instance named {name}")));
    }
    let text = fs::read_to_string(arg).map_err(|e| Failure::Io(format!("{arg}: {e}")))?;
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty()).unwrap_or("");
    Ok(if first.starts_with("network") {
        Instance::Network(NetworkInstance::parse(&text)?)
    } else if first.starts_with("ss") {
        Instance::Access(AccessStructure::parse(&text)?)
    } else {
        let body: String = text.lines().map(|l| l.split('#').next().unwrap_or("")).collect::<Vec<_>>().join(" ");
        Instance::Rank(body.parse::<RankVector>()?)
    })
}

fn network(arg: &str) -> Result<NetworkInstance, Failure> {
    match load(arg)? {
        Instance::Network(n) => Ok(n),
        _ => Err(Failure::Input(format!("{arg} is not a network instance"))),
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn emit(common: &Common, command: &str, res: &engine::ProverResult) -> Result<u8, Failure> {
    if let Some(p) = &common.stats_csv {
        write(p, &report::stats_csv(&res.stats))?;
    }
    if common.json {
        println!("{}", serde_json::to_string_pretty(&report::result_json(command, res))?);
    } else {
        print!("{}", report::result_text(res));
    }
    Ok(report::exit_code(res.verdict))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::ProveRate { instance, rates, literal_bound, common } => {
            let net = network(&instance)?;
            let cfg = Config { literal_rate_bound: literal_bound, ..common.config() };
            let res = engine::prove_rate(&net, &rates, common.field, &cfg)?;
            emit(&common, "prove-rate", &res)
        }
        Command::ProveSs { instance, sizes, common } => {
            let Instance::Access(acc) = load(&instance)? else {
                return Err(Failure::Input(format!("{instance} is not an access structure")));
            };
            let res = engine::prove_ss(&acc, &sizes, common.field, &common.config())?;
            emit(&common, "prove-ss", &res)
        }
        Command::ProveRep { instance, common } => {
            let Instance::Rank(h) = load(&instance)? else {
                return Err(Failure::Input(format!("{instance} is not a rank vector")));
            };
            let res = engine::prove_rep(&h, common.field, &common.config())?;
            emit(&common, "prove-rep", &res)
        }
        Command::ProveRegion { instance, dmax, rmax, emit_region, list, common } => {
            let net = network(&instance)?;
            let res = engine::prove_region(&net, common.field, dmax, rmax, &common.config())?;
            let cone = rate_region(&res.rates, net.k, net.n)?;
            let hrep = Polyhedral(&cone, true).to_string();
            if let Some(p) = &emit_region {
                write(p, &format!("{hrep}\n"))?;
            }
            if let Some(p) = &common.stats_csv {
                write(p, &report::stats_csv(&res.stats))?;
            }
            if common.json {
                let v = json!({
                    "command": "prove-region",
                    "complete": res.complete,
                    "note": res.note,
                    "rates": res.rates,
                    "inequalities": cone.hrep,
                    "stats": report::stats_json(&res.stats),
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                if let Some(n) = &res.note {
                    println!("note: {n}");
                }
                println!("{} achievable rate vectors", res.rates.len());
                if list {
                    for r in &res.rates {
                        let s: Vec<String> = r.iter().map(u32::to_string).collect();
                        println!("  [{}]", s.join(","));
                    }
                }
                println!("{} facets", cone.facets());
                println!("{hrep}");
                print!("{}", report::stats_table(&res.stats));
            }
            Ok(if res.complete { 0 } else { 2 })
        }
        Command::Transform { instance, rates, output, dot } => {
            let net = network(&instance)?;
            let g = transform(&net, &rates)?;
            let report = validate_transform(&g);
            let text = g.to_string();
            match &output {
                Some(p) => write(p, &text)?,
                None => print!("{text}"),
            }
            if let Some(p) = &dot {
                write(p, &g.to_dot())?;
            }
            for v in &report.violations {
                eprintln!("violation: {v}");
            }
            Ok(if report.is_clean() { 0 } else { 4 })
        }
        Command::Enumerate { instance, rmin, rmax, dims, smin, smax, list, common } => {
            let set = load(&instance)?.constraints()?;
            let n = set.n();
            let class = ClassTuple::new(n, (rmin, rmax), &dims, (smin, smax.unwrap_or(n)))?;
            let (codes, stats, note) = engine::clrp_enumerate(&set, common.field, &class, &common.config())?;
            if let Some(p) = &common.stats_csv {
                write(p, &report::stats_csv(&stats))?;
            }
            if common.json {
                let v = json!({
                    "command": "enumerate",
                    "complete": note.is_none(),
                    "note": note,
                    "codes": codes.iter().map(report::witness_json).collect::<Vec<_>>(),
                    "stats": report::stats_json(&stats),
                });
                println!("{}", serde_json::to_string_pretty(&v)?);
            } else {
                if let Some(n) = &note {
                    println!("note: {n}");
                }
                println!("{} codes", codes.len());
                if list {
                    for (i, w) in codes.iter().enumerate() {
                        println!("code {} in dimension {}", i + 1, w.r);
                        print!("{}", w.display());
                    }
                }
                print!("{}", report::stats_table(&stats));
            }
            Ok(if note.is_none() { 0 } else { 2 })
        }
        Command::Catalog { dump } => {
            let mut entries: Vec<(String, String)> = catalog::NETWORK_NAMES.iter().map(|n| (format!("{n}.net"), catalog::network(n).expect("listed").to_string())).collect();
            entries.push(("benaloh.ss".into(), catalog::benaloh().to_string()));
            entries.push(("linrank6.rank".into(), format!("{}\n", catalog::linrank6())));
            entries.push(("u24rank.rank".into(), format!("{}\n", catalog::u24_rank_vector())));
            match dump {
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
                    for (file, text) in &entries {
                        write(&dir.join(file), text)?;
                    }
                }
                None => {
                    for (file, _) in &entries {
                        println!("builtin:{}", file.split('.').next().expect("named"));
                    }
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(4)
        }
    }
}
