use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use muca_core::bench::{emit_csv, run_bench, BenchConfig};
use muca_core::bounds::{
    avg_price_bound, best_bound, lp_bound, projection_bound, BoundSet, Subproblem,
};
use muca_core::instances::{
    adversarial_pair, adversarial_pair_for, from_graph, gen_random, normalized_counterexample, GenParams, Graph,
};
use muca_core::{
    brute_force, greedy_allocate, parse_instance, serialize_instance, solve, Criterion, Instance,
    SolveConfig,
};

/// Winner determination for multi-unit combinatorial auctions.
#[derive(Parser)]
#[command(name = "muca", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances
    Gen(GenCmd),
    /// Solve exactly with branch and bound
    Solve(SolveArgs),
    /// Greedy allocation under a ranking criterion
    Greedy(GreedyArgs),
    /// Upper bounds on the optimum
    Bound(BoundArgs),
    /// Batch experiments, CSV output
    Bench(BenchArgs),
    /// Exhaustive optimum (at most 25 bids)
    Oracle {
        file: PathBuf,
    },
}

#[derive(Args)]
#[command(args_conflicts_with_subcommands = true)]
struct GenCmd {
    #[command(subcommand)]
    special: Option<GenSpecial>,
    #[command(flatten)]
    random: RandomArgs,
}

#[derive(Args)]
struct DistArgs {
    /// Probability that a bid requests a given good
    #[arg(long, default_value_t = 0.2)]
    req_prob: f64,
    /// Largest quantity requested per good
    #[arg(long, default_value_t = 3)]
    qty_max: u64,
    /// Capacity range LO:HI
    #[arg(long, default_value = "1:5", value_parser = parse_range)]
    cap: (u64, u64),
    /// Decimal digits in generated prices
    #[arg(long, default_value_t = 2)]
    price_scale: u32,
}

#[derive(Args)]
struct RandomArgs {
    #[arg(long)]
    goods: Option<usize>,
    #[arg(long)]
    bids: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    dist: DistArgs,
    /// Output file (stdout if omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenSpecial {
    /// Independent-set reduction of an edge-list graph
    Graph {
        /// Edge list, one `u v` pair per line
        #[arg(long)]
        edges: PathBuf,
        /// Per-edge capacities, comma separated (default: all 1)
        #[arg(long, value_delimiter = ',')]
        caps: Option<Vec<u64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The two worst-case auctions for greedy orderings
    Adversarial {
        #[arg(long, value_delimiter = ',', required = true)]
        caps: Vec<u64>,
        /// Put problem I's unit bid on the good this criterion ranks first
        #[arg(long)]
        criterion: Option<Criterion>,
        /// Writes OUTPUT.1 and OUTPUT.2 (stdout if omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Auction on which the normalized square-root criterion fails
    Counterexample {
        #[arg(long)]
        k: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "sqrt")]
    criterion: Criterion,
    /// Comma list of avg, proj, lp, or `none`
    #[arg(long, default_value = "avg")]
    bounds: BoundSet,
    /// Do not start from the greedy allocation
    #[arg(long)]
    no_seed: bool,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    file: PathBuf,
}

#[derive(Args)]
struct GreedyArgs {
    #[arg(long, default_value = "sqrt")]
    criterion: Criterion,
    /// Print every bid's score in rank order
    #[arg(long)]
    explain: bool,
    file: PathBuf,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long, default_value = "avg,proj,lp")]
    methods: BoundSet,
    /// Print per-good projections and the LP solution
    #[arg(long)]
    explain: bool,
    file: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    goods: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    bids: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "sqrt")]
    criterion: Criterion,
    #[arg(long, default_value = "avg")]
    bounds: BoundSet,
    #[arg(long)]
    no_seed: bool,
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Solve cells concurrently
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    dist: DistArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected LO:HI")?;
    let lo = lo.parse().map_err(|_| format!("bad bound '{lo}'"))?;
    let hi = hi.parse().map_err(|_| format!("bad bound '{hi}'"))?;
    Ok((lo, hi))
}

impl DistArgs {
    fn params(&self) -> GenParams {
        GenParams {
            cap_range: self.cap,
            req_prob: self.req_prob,
            qty_max: self.qty_max,
            price_scale: self.price_scale,
            ..GenParams::default()
        }
    }
}

fn load(path: &Path) -> Result<Instance> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(out: &mut String, output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            write!(out, "{text}")?;
            Ok(())
        }
    }
}

fn winners(chosen: &[usize]) -> String {
    chosen
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn gen(out: &mut String, cmd: GenCmd) -> Result<()> {
    match cmd.special {
        None => {
            let r = cmd.random;
            let (Some(goods), Some(bids)) = (r.goods, r.bids) else {
                bail!("gen needs --goods and --bids");
            };
            let inst = gen_random(&GenParams {
                goods,
                bids,
                seed: r.seed,
                ..r.dist.params()
            })?;
            emit(out, r.output.as_deref(), &serialize_instance(&inst))
        }
        Some(GenSpecial::Graph {
            edges,
            caps,
            output,
        }) => {
            let text = fs::read_to_string(&edges)
                .with_context(|| format!("reading {}", edges.display()))?;
            let g = Graph::parse_edge_list(&text)?;
            let caps = caps.unwrap_or_else(|| vec![1; g.edges.len()]);
            emit(out, output.as_deref(), &serialize_instance(&from_graph(&g, &caps)?))
        }
        Some(GenSpecial::Adversarial {
            caps,
            criterion,
            output,
        }) => {
            let (one, two) = match criterion {
                Some(c) => adversarial_pair_for(&caps, c)?,
                None => adversarial_pair(&caps)?,
            };
            match output {
                Some(p) => {
                    for (suffix, inst) in [("1", &one), ("2", &two)] {
                        let mut path = p.clone().into_os_string();
                        path.push(".");
                        path.push(suffix);
                        emit(out, Some(Path::new(&path)), &serialize_instance(inst))?;
                    }
                    Ok(())
                }
                None => {
                    write!(out, "# problem I\n{}", serialize_instance(&one))?;
                    write!(out, "# problem II\n{}", serialize_instance(&two))?;
                    Ok(())
                }
            }
        }
        Some(GenSpecial::Counterexample { k, output }) => {
            emit(out, output.as_deref(), &serialize_instance(&normalized_counterexample(k)?))
        }
    }
}

fn run_solve(out: &mut String, a: SolveArgs) -> Result<ExitCode> {
    let inst = load(&a.file)?;
    let cfg = SolveConfig {
        criterion: a.criterion,
        bounds: a.bounds,
        seed_incumbent: !a.no_seed,
        node_limit: a.node_limit,
        time_limit: a.time_limit_ms.map(Duration::from_millis),
        ..SolveConfig::default()
    };
    let r = solve(&inst, &cfg);
    writeln!(out, "VALUE {}", inst.format_price(r.best.value))?;
    writeln!(out, "WINNERS {}", winners(&r.best.chosen))?;
    writeln!(out, "OPTIMAL {}", r.proven_optimal)?;
    writeln!(out, "NODES {}", r.nodes_visited)?;
    writeln!(out, "NODE_FRACTION {}", r.node_fraction)?;
    writeln!(out, "TIME_MS {:.3}", r.time_total.as_secs_f64() * 1e3)?;
    writeln!(out, "TIME_TO_BEST_MS {:.3}", r.time_to_best.as_secs_f64() * 1e3)?;
    writeln!(out, "NODES_TO_BEST {}", r.nodes_to_best)?;
    Ok(if r.proven_optimal {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn run_greedy(out: &mut String, a: GreedyArgs) -> Result<()> {
    let inst = load(&a.file)?;
    let g = greedy_allocate(&inst, a.criterion);
    writeln!(out, "VALUE {}", inst.format_price(g.solution.value))?;
    writeln!(out, "WINNERS {}", winners(&g.solution.chosen))?;
    if a.explain {
        for &i in &g.order_used.order {
            writeln!(out, "SCORE {i} {}", g.order_used.scores[i])?;
        }
        writeln!(out, "SKIPPED {}", winners(&g.skipped))?;
    }
    Ok(())
}

fn run_bound(out: &mut String, a: BoundArgs) -> Result<()> {
    if a.methods.is_empty() {
        bail!("--methods must name at least one of avg, proj, lp");
    }
    let inst = load(&a.file)?;
    let root = Subproblem::root(&inst);
    let real = |v: f64| inst.to_real_f(v);
    if a.methods.avg {
        writeln!(out, "AVG {}", real(avg_price_bound(&inst, &root).value))?;
    }
    if a.methods.proj {
        let mut best: Option<f64> = None;
        for j in 0..inst.goods() {
            match projection_bound(&inst, &root, j) {
                Ok(r) => {
                    if a.explain {
                        writeln!(out, "PROJ_{j} {}", real(r.value))?;
                    }
                    best = Some(best.map_or(r.value, |b| b.min(r.value)));
                }
                Err(e) if a.explain => writeln!(out, "PROJ_{j} skipped: {e}")?,
                Err(_) => {}
            }
        }
        match best {
            Some(v) => writeln!(out, "PROJ {}", real(v))?,
            None => writeln!(out, "PROJ skipped")?,
        }
    }
    if a.methods.lp {
        match lp_bound(&inst, &root) {
            Ok(r) => {
                writeln!(out, "LP {}", real(r.value))?;
                if a.explain {
                    let x = r.lp_x.unwrap_or_default();
                    let x: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "LP_X {}", x.join(" "))?;
                    writeln!(out, "LP_INTEGRAL {}", r.lp_integral.unwrap_or(false))?;
                }
            }
            Err(e) => writeln!(out, "LP skipped: {e}")?,
        }
    }
    writeln!(out, "MIN {}", real(best_bound(&inst, &root, a.methods).value))?;
    Ok(())
}

fn run_bench_cmd(out: &mut String, a: BenchArgs) -> Result<()> {
    let cfg = BenchConfig {
        goods_list: a.goods,
        bids_list: a.bids,
        trials: a.trials,
        base_seed: a.seed,
        solver: SolveConfig {
            criterion: a.criterion,
            bounds: a.bounds,
            seed_incumbent: !a.no_seed,
            ..SolveConfig::default()
        },
        generator: a.dist.params(),
        time_limit: a.time_limit_ms.map(Duration::from_millis),
        parallel: a.parallel,
    };
    let rows = run_bench(&cfg)?;
    emit(out, a.output.as_deref(), &emit_csv(&rows))
}

fn run_oracle(out: &mut String, file: &Path) -> Result<()> {
    let inst = load(file)?;
    let s = brute_force(&inst)?;
    writeln!(out, "VALUE {}", inst.format_price(s.value))?;
    writeln!(out, "WINNERS {}", winners(&s.chosen))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let mut out = String::new();
    let result = match cli.command {
        Command::Gen(cmd) => gen(&mut out, cmd).map(|_| ExitCode::SUCCESS),
        Command::Solve(a) => run_solve(&mut out, a),
        Command::Greedy(a) => run_greedy(&mut out, a).map(|_| ExitCode::SUCCESS),
        Command::Bound(a) => run_bound(&mut out, a).map(|_| ExitCode::SUCCESS),
        Command::Bench(a) => run_bench_cmd(&mut out, a).map(|_| ExitCode::SUCCESS),
        Command::Oracle { file } => run_oracle(&mut out, &file).map(|_| ExitCode::SUCCESS),
    };
    match io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
        _ => {}
    }
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::from(1)
    })
}
