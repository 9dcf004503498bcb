//! Command-line front end. Exit codes: 0 ok, 1 usage, 2 data format,
//! 3 infeasible request.

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use neural_cliques::harness::presets::{preset_specs, PRESETS};
use neural_cliques::harness::{run_experiment, write_outputs, ExperimentSpec, RunOptions};
use neural_cliques::message::{parse_messages, random_message};
use neural_cliques::retrieval::{self, RetrievalConfig, RetrievalOutcome, Selection};
use neural_cliques::{classify, format, theory};
use neural_cliques::{CliqueNetwork, Error, OrderProfile, Placement, SparseMessage, Topology};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "cliques",
    version,
    about = "Clique-based sparse associative memory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn messages into a network file.
    Learn(LearnArgs),
    /// Recover a message from a partial cue.
    Retrieve(RetrieveArgs),
    /// Accept or reject probe messages.
    Classify(ClassifyArgs),
    /// Evaluate a closed form, e.g. `theory p_error_blind chi=100 l=64 c=12 c_e=3 m=1e5`.
    Theory(TheoryArgs),
    /// Run an experiment from a spec file or a bundled preset.
    Experiment(ExperimentArgs),
    /// Print the shape and fill of a network file.
    Inspect { network: PathBuf },
}

#[derive(Args)]
struct LearnArgs {
    /// Message file, one `cluster:fanal,...` per line; `-` reads stdin.
    #[arg(long, conflicts_with = "random")]
    messages: Option<PathBuf>,
    /// Learn this many random messages instead of a file.
    #[arg(long)]
    random: Option<usize>,
    /// Order or order range (`12..20`) of random messages.
    #[arg(long, default_value = "12")]
    order: OrderProfile,
    #[arg(long, value_enum, default_value_t = PlacementArg::Uniform)]
    placement: PlacementArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Also write the random messages here.
    #[arg(long, requires = "random")]
    save_messages: Option<PathBuf>,
    #[arg(long)]
    chi: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    /// Add to an existing network instead of starting empty.
    #[arg(long)]
    into: Option<PathBuf>,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    Uniform,
    Contiguous,
}

#[derive(Args)]
struct RetrieveArgs {
    network: PathBuf,
    /// Known part of the message, e.g. `3:17,9:0,41:63`.
    #[arg(long)]
    cue: SparseMessage,
    /// Clusters of the full message, enabling guided recovery.
    #[arg(long, value_delimiter = ',')]
    clusters: Option<Vec<usize>>,
    #[arg(long, default_value_t = 4)]
    iters: usize,
    #[arg(long, default_value_t = 1)]
    gamma: u32,
    /// Winner-take-all inside each cluster instead of network-wide.
    #[arg(long)]
    per_cluster: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    network: PathBuf,
    #[arg(long, conflicts_with = "probes")]
    probe: Option<SparseMessage>,
    /// File of probes, one per line.
    #[arg(long)]
    probes: Option<PathBuf>,
}

#[derive(Args)]
struct TheoryArgs {
    /// Formula name, or `list`.
    name: String,
    /// `key=value` parameters: chi, l, c, m, d, c_e, alpha, p0, approx.
    params: Vec<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Spec file.
    #[arg(long, conflicts_with = "figure", required_unless_present_any = ["figure", "list"])]
    spec: Option<PathBuf>,
    /// Preset figure (`fig3`) or preset name (`fig3_blind`).
    #[arg(long)]
    figure: Option<String>,
    /// List bundled presets.
    #[arg(long)]
    list: bool,
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    no_plot: bool,
    /// Override the spec's seed.
    #[arg(long)]
    seed: Option<u64>,
}

enum Failure {
    Usage(String),
    Data(String),
    Infeasible(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible(_) => Failure::Infeasible(e.to_string()),
            Error::Topology(_) | Error::Profile(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn usage(e: Error) -> Failure {
    match e {
        Error::Infeasible(_) => Failure::Infeasible(e.to_string()),
        _ => Failure::Usage(e.to_string()),
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Data(e.to_string()))?;
    } else {
        text = fs::read_to_string(path)
            .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load(path: &Path) -> Result<CliqueNetwork, Failure> {
    format::load(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn learn(a: LearnArgs) -> Result<(), Failure> {
    let mut net = match &a.into {
        Some(p) => load(p)?,
        None => {
            let (Some(chi), Some(l)) = (a.chi, a.l) else {
                return Err(Failure::Usage(
                    "--chi and --l are required without --into".into(),
                ));
            };
            CliqueNetwork::new(Topology::new(chi, l).map_err(usage)?)
        }
    };
    let topology = *net.topology();
    let messages = match (&a.messages, a.random) {
        (Some(path), _) => parse_messages(&read_input(path)?)?,
        (None, Some(m)) => {
            a.order.validate(topology.chi()).map_err(usage)?;
            let placement = match a.placement {
                PlacementArg::Uniform => Placement::UniformClusters,
                PlacementArg::Contiguous => Placement::Contiguous,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            (0..m)
                .map(|_| {
                    let c = a.order.sample(&mut rng);
                    random_message(&topology, c, placement, &mut rng).map_err(usage)
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        (None, None) => return Err(Failure::Usage("give --messages or --random".into())),
    };
    let added = net.learn_all(&messages)?;
    if let Some(p) = &a.save_messages {
        fs::write(p, neural_cliques::message::format_messages(&messages))
            .map_err(|e| Failure::Data(e.to_string()))?;
    }
    format::save(&net, &a.out)?;
    println!(
        "learned {} messages, {added} new edges, density {:.6}",
        messages.len(),
        net.density()
    );
    Ok(())
}

fn print_outcome(out: &RetrievalOutcome) {
    match out.message() {
        Some(m) if !m.is_empty() => println!("{m}"),
        _ => println!("ambiguous ({} active fanals)", out.final_active.len()),
    }
    println!(
        "iterations={} converged={} cycle={} ambiguous={}",
        out.iterations_run, out.converged, out.cycle_detected, out.ambiguous
    );
}

fn retrieve(a: RetrieveArgs) -> Result<(), Failure> {
    let net = load(&a.network)?;
    let chi = net.topology().chi();
    a.cue.check_bounds(net.topology()).map_err(usage)?;
    let cfg = match &a.clusters {
        Some(known) => {
            if let Some(c) = a.cue.clusters().find(|c| !known.contains(c)) {
                return Err(Failure::Usage(format!(
                    "cue cluster {c} missing from --clusters"
                )));
            }
            RetrievalConfig::guided(chi, known, a.iters).map_err(usage)?
        }
        None => RetrievalConfig::blind(chi, a.iters),
    };
    let cfg = cfg.with_gamma(a.gamma).with_selection(if a.per_cluster {
        Selection::PerClusterMax
    } else {
        Selection::GlobalMax
    });
    print_outcome(&retrieval::retrieve(&net, &a.cue, &cfg).map_err(usage)?);
    Ok(())
}

fn classify_cmd(a: ClassifyArgs) -> Result<(), Failure> {
    let net = load(&a.network)?;
    let probes = match (a.probe, &a.probes) {
        (Some(p), _) => {
            p.check_bounds(net.topology()).map_err(usage)?;
            vec![p]
        }
        (None, Some(path)) => {
            let ps = parse_messages(&read_input(path)?)?;
            for p in &ps {
                p.check_bounds(net.topology())?;
            }
            ps
        }
        (None, None) => return Err(Failure::Usage("give --probe or --probes".into())),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    for p in &probes {
        let verdict = if classify::accept(&net, p).map_err(usage)? {
            "accept"
        } else {
            "reject"
        };
        writeln!(out, "{verdict} {p}").map_err(|e| Failure::Data(e.to_string()))?;
    }
    Ok(())
}

fn theory_cmd(a: TheoryArgs) -> Result<(), Failure> {
    if a.name == "list" {
        for f in theory::FORMULAS {
            println!("{f}");
        }
        return Ok(());
    }
    let params = theory::TheoryParams::parse(a.params.iter().map(String::as_str)).map_err(usage)?;
    for (k, v) in theory::evaluate(&a.name, &params).map_err(usage)? {
        println!("{k} = {v}");
    }
    Ok(())
}

fn experiment(a: ExperimentArgs) -> Result<(), Failure> {
    if a.list {
        for (name, _) in PRESETS {
            println!("{name}");
        }
        return Ok(());
    }
    let mut specs = match (&a.spec, &a.figure) {
        (Some(path), _) => vec![ExperimentSpec::parse(&read_input(path)?)?],
        (None, Some(fig)) => preset_specs(fig).map_err(usage)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    if a.workers == Some(0) {
        return Err(Failure::Usage("--workers must be positive".into()));
    }
    for spec in &mut specs {
        if let Some(s) = a.seed {
            spec.seed = s;
        }
        spec.validate()?;
    }
    for spec in &specs {
        eprintln!("# {}", spec.label);
        let options = RunOptions { workers: a.workers };
        let points = run_experiment(spec, options, |p| {
            eprintln!(
                "  x={} it={} sim={} theory={} trials={} ({:.1}s)",
                p.x,
                p.iterations,
                p.sim_rate.map_or("-".into(), |v| format!("{v:.6e}")),
                p.theory.map_or("-".into(), |v| format!("{v:.6e}")),
                p.trials,
                p.wall_time.as_secs_f64()
            );
        })?;
        for path in write_outputs(spec, &points, &a.out, !a.no_plot)? {
            println!("{}", path.display());
        }
    }
    Ok(())
}

fn inspect(path: &Path) -> Result<(), Failure> {
    let net = load(path)?;
    let t = net.topology();
    println!("chi      {}", t.chi());
    println!("l        {}", t.l());
    println!("fanals   {}", t.n());
    println!("resource {}", t.q_bits());
    println!("edges    {}", net.edge_count());
    println!("density  {:.6}", net.density());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Learn(a) => learn(a),
        Command::Retrieve(a) => retrieve(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Theory(a) => theory_cmd(a),
        Command::Experiment(a) => experiment(a),
        Command::Inspect { network } => inspect(&network),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
