use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use bloch_core::bands::{eval_bands, export_surface, find_critical_points, spectral_summary};
use bloch_core::critical::{count_critical_points, sample_test, screening_prime, SampleSummary};
use bloch_core::graph::{canonical_to_figure, figure_to_canonical};
use bloch_core::poly::is_prime;
use bloch_core::polytope::{bernstein_bound, find_reflections, mixed_volume, rojas_check, system_polytopes};
use bloch_core::sweep::{figure_labels, render_subgraph, SubsetRecord};
use bloch_core::*;

/// Exit status for invalid input.
const EXIT_INVALID: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 1;

#[derive(Parser, Serialize)]
#[command(name = "bloch", version, about = "Degeneracy tests for dispersion relations of periodic graph operators")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    #[serde(skip)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Print the Floquet symbol and its cleared form.
    Symbol {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Option<Vec<i64>>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Exact degeneracy test at one weight vector or a random sample.
    Test {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        source: AlphaSource,
        /// rational | prime[:p] | screened[:p]
        #[arg(long)]
        field: Option<String>,
    },
    /// Newton polytopes, mixed volume and the Bernstein bound.
    Bernstein {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Option<Vec<i64>>,
        /// Write one OFF file per polytope into this directory.
        #[arg(long)]
        dump_polytopes: Option<PathBuf>,
    },
    /// Number of critical points of the dispersion relation with multiplicity.
    Count {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<i64>,
        #[arg(long, default_value = "rational")]
        field: String,
    },
    /// Band functions on a grid, their critical points and spectral edges.
    Bands {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        alpha: Vec<f64>,
        #[arg(long, default_value_t = 128)]
        n: usize,
        /// CSV surface output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Lower corner of the Brillouin zone window.
        #[arg(long, default_value_t = -std::f64::consts::PI, allow_hyphen_values = true)]
        window: f64,
    },
    /// Degeneracy census over all edge subsets of the mother graph.
    Sweep {
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "1:50", value_parser = parse_range)]
        range: (i64, i64),
        /// Skip the rational re-test of boundary subsets.
        #[arg(long)]
        no_confirm: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Args, Serialize)]
struct GraphArgs {
    /// Builtin name (mother, graphene) or a JSON graph file.
    #[arg(long, default_value = "mother")]
    graph: String,
    #[arg(long, value_enum)]
    convention: Option<ConventionArg>,
    /// Order of weights on the command line. `figure` applies to the mother
    /// graph only and is its default.
    #[arg(long, value_enum)]
    alpha_order: Option<AlphaOrder>,
}

#[derive(Args, Serialize)]
struct AlphaSource {
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "sample",
        required_unless_present = "sample"
    )]
    alpha: Option<Vec<i64>>,
    /// Number of random draws.
    #[arg(long, requires = "seed")]
    sample: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "1:50", value_parser = parse_range)]
    range: (i64, i64),
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ConventionArg {
    Divergence,
    AdjacencyMinusDegree,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum AlphaOrder {
    Figure,
    Canonical,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Text,
    Json,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected a:b")?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

/// Input errors map to exit status 2.
#[derive(Debug)]
struct Invalid(String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

struct Loaded {
    graph: PeriodicGraph,
    name: String,
    convention: Convention,
    figure: bool,
}

impl GraphArgs {
    fn load(&self) -> Result<Loaded> {
        let graph = match builtin(&self.graph) {
            Some(g) => g,
            None => {
                let path = Path::new(&self.graph);
                if !path.exists() {
                    return Err(invalid(format!("no builtin graph or file named {:?}", self.graph)));
                }
                PeriodicGraph::read_json(path).map_err(|e| invalid(format!("{}: {e}", self.graph)))?
            }
        };
        let is_mother = self.graph == "mother";
        let figure = match self.alpha_order {
            Some(AlphaOrder::Figure) if !is_mother => {
                return Err(invalid("--alpha-order figure applies to the mother graph only"))
            }
            Some(order) => order == AlphaOrder::Figure,
            None => is_mother,
        };
        let convention = match self.convention {
            Some(ConventionArg::Divergence) => Convention::Divergence,
            Some(ConventionArg::AdjacencyMinusDegree) => Convention::AdjacencyMinusDegree,
            None if self.graph == "graphene" => Convention::AdjacencyMinusDegree,
            None => Convention::Divergence,
        };
        Ok(Loaded {
            graph,
            name: self.graph.clone(),
            convention,
            figure,
        })
    }
}

impl Loaded {
    fn arity(&self) -> usize {
        self.graph.edges().len()
    }

    /// Weights in the graph's own edge order.
    fn alpha<T: Clone>(&self, given: &[T]) -> Result<Vec<T>> {
        if given.len() != self.arity() {
            return Err(invalid(format!(
                "graph {} has {} weights, got {}",
                self.name,
                self.arity(),
                given.len()
            )));
        }
        Ok(if self.figure {
            figure_to_canonical(given)
        } else {
            given.to_vec()
        })
    }

    /// Weights back in the order the user supplied them.
    fn shown<T: Clone>(&self, canonical: &[T]) -> Vec<T> {
        if self.figure {
            canonical_to_figure(canonical)
        } else {
            canonical.to_vec()
        }
    }

    fn order(&self) -> &'static str {
        if self.figure {
            "figure"
        } else {
            "canonical"
        }
    }

    fn system(&self) -> Result<DispersionSystem> {
        let symbol = build_symbol(&self.graph, self.convention)?;
        Ok(build_system(&symbol)?)
    }
}

fn parse_field(s: &str) -> Result<FieldChoice> {
    let (kind, p) = match s.split_once(':') {
        Some((k, p)) => (k, Some(p.parse::<u64>().map_err(|e| invalid(format!("prime {p:?}: {e}")))?)),
        None => (s, None),
    };
    if let Some(p) = p {
        if !is_prime(p) || p > u32::MAX as u64 {
            return Err(invalid(format!("{p} is not a prime below 2^32")));
        }
    }
    let p = p.unwrap_or_else(screening_prime);
    match kind {
        "rational" | "q" | "Q" => Ok(FieldChoice::Rational),
        "prime" => Ok(FieldChoice::Prime(p)),
        "screened" => Ok(FieldChoice::Screened(p)),
        _ => Err(invalid(format!("unknown field {s:?}; use rational, prime[:p] or screened[:p]"))),
    }
}

fn field_tag(choice: FieldChoice) -> FieldTag {
    match choice {
        FieldChoice::Rational => FieldTag::Rational,
        FieldChoice::Prime(p) | FieldChoice::Screened(p) => FieldTag::Prime(p),
    }
}

fn provenance(cli: &Cli) -> Value {
    let config = serde_json::to_value(cli).expect("config serializes");
    let digest = Sha256::digest(config.to_string().as_bytes());
    let hash: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    json!({
        "tool": "bloch",
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
        "config_hash": hash,
    })
}

fn emit(prov: &Value, result: Value) {
    let out = json!({ "provenance": prov, "result": result });
    println!("{}", serde_json::to_string_pretty(&out).expect("json"));
}

fn cmd_symbol(prov: &Value, graph: &GraphArgs, alpha: Option<&[i64]>, format: Format) -> Result<u8> {
    let g = graph.load()?;
    let mut symbol = build_symbol(&g.graph, g.convention)?;
    let alpha = match alpha {
        Some(a) => Some(g.alpha(a)?),
        None if g.name == "graphene" => Some(vec![1; g.arity()]),
        None => None,
    };
    if let Some(a) = &alpha {
        symbol = symbol.specialize_int(a)?;
    }
    let cleared = symbol.clear();
    match format {
        Format::Text => {
            println!("# bloch {} config {}", env!("CARGO_PKG_VERSION"), prov["config_hash"].as_str().unwrap_or(""));
            println!("A(z) =");
            for line in symbol.render().lines() {
                println!("  {line}");
            }
            println!("multiplier = {}", cleared.render_multiplier());
            println!("A~(z) =");
            for line in cleared.render().lines() {
                println!("  {line}");
            }
        }
        Format::Json => {
            let rows = |text: String| -> Vec<Vec<String>> {
                text.lines()
                    .map(|l| l.split(" | ").map(str::to_string).collect())
                    .collect()
            };
            emit(
                prov,
                json!({
                    "graph": g.name,
                    "convention": g.convention,
                    "alpha": alpha,
                    "symbol": rows(symbol.render()),
                    "multiplier": cleared.render_multiplier(),
                    "cleared": rows(cleared.render()),
                }),
            );
        }
    }
    Ok(0)
}

fn cmd_test(prov: &Value, graph: &GraphArgs, source: &AlphaSource, field: Option<&str>) -> Result<u8> {
    let g = graph.load()?;
    let sys = g.system()?;
    let opts = GroebnerOptions::default();
    let mut verdicts = match (&source.alpha, source.sample) {
        (Some(a), None) => {
            let field = parse_field(field.unwrap_or("rational"))?;
            vec![degeneracy_test(&sys, &g.alpha(a)?, field, opts)?]
        }
        (None, Some(n)) => {
            let field = parse_field(field.unwrap_or("screened"))?;
            let seed = source.seed.ok_or_else(|| invalid("--sample needs --seed"))?;
            if n == 0 {
                return Err(invalid("--sample must be positive"));
            }
            sample_test(&sys, n, seed, source.range, field, opts)?.verdicts
        }
        _ => return Err(invalid("give exactly one of --alpha or --sample")),
    };
    for v in &mut verdicts {
        v.alpha = g.shown(&v.alpha);
    }
    let summary = SampleSummary::from_verdicts(&verdicts);
    let code = if summary.inconclusive > 0 { EXIT_INCONCLUSIVE } else { 0 };
    emit(
        prov,
        json!({
            "graph": g.name,
            "alpha_order": g.order(),
            "verdicts": verdicts,
            "summary": summary,
            "unanimous": summary.unanimous(),
        }),
    );
    Ok(code)
}

fn cmd_bernstein(prov: &Value, graph: &GraphArgs, alpha: Option<&[i64]>, dump: Option<&Path>) -> Result<u8> {
    let g = graph.load()?;
    if g.graph.dimension() != 2 || g.graph.vertices().len() != 2 {
        return Err(invalid("Bernstein bounds are implemented for two-atomic Z^2 graphs"));
    }
    let sys = g.system()?;
    let alpha = alpha.map(|a| g.alpha(a)).transpose()?;
    let polys = system_polytopes(&sys, alpha.as_deref())?;
    let names = polytope::bernstein_coords();
    let mv = mixed_volume(&polys)?;
    let bound = bernstein_bound(&sys, alpha.as_deref())?;
    let rojas = rojas_check(&polys)?;
    let reflections: Vec<String> = find_reflections(&polys[1], &polys[2], false)
        .iter()
        .map(|m| m.describe(&[names[0].as_str(), names[1].as_str(), names[2].as_str()]))
        .collect();
    if let Some(dir) = dump {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, p) in polys.iter().enumerate() {
            let path = dir.join(format!("f{}.off", i + 1));
            fs::write(&path, p.to_off()).with_context(|| format!("writing {}", path.display()))?;
            let path = dir.join(format!("f{}.json", i + 1));
            let body = json!({ "coords": names, "vertices": p.vertices(), "faces": p.faces() });
            fs::write(&path, serde_json::to_string_pretty(&body)?)?;
        }
    }
    let described: Vec<Value> = polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            json!({
                "name": format!("N(f{})", i + 1),
                "vertices": p.vertices(),
                "faces": p.faces().len(),
                "edges": p.edge_count(),
                "volume": p.volume().to_string(),
            })
        })
        .collect();
    emit(
        prov,
        json!({
            "graph": g.name,
            "coords": names,
            "alpha": alpha.as_ref().map(|a| g.shown(a)),
            "polytopes": described,
            "mixed_volume": mv.to_string(),
            "bernstein_bound": bound,
            "rojas": rojas,
            "reflections_f2_to_f3": reflections,
        }),
    );
    Ok(0)
}

fn cmd_count(prov: &Value, graph: &GraphArgs, alpha: &[i64], field: &str) -> Result<u8> {
    let g = graph.load()?;
    let sys = g.system()?;
    let field = field_tag(parse_field(field)?);
    let a = g.alpha(alpha)?;
    let count = count_critical_points(&sys, &a, field, GroebnerOptions::default())?;
    let bound = if g.graph.dimension() == 2 && g.graph.vertices().len() == 2 {
        Some(bernstein_bound(&sys, Some(&a))?)
    } else {
        None
    };
    let (count, code, note) = match count {
        Ok(d) => (Some(d), 0, None),
        Err(e) => (None, EXIT_INCONCLUSIVE, Some(e.to_string())),
    };
    emit(
        prov,
        json!({
            "graph": g.name,
            "alpha": alpha,
            "alpha_order": g.order(),
            "field": field,
            "count": count,
            "bernstein_bound": bound,
            "equals_bound": match (count, bound) {
                (Some(QuotientDim::Finite(c)), Some(b)) => Some(c == b),
                _ => None,
            },
            "note": note,
        }),
    );
    Ok(code)
}

fn cmd_bands(prov: &Value, graph: &GraphArgs, alpha: &[f64], n: usize, out: Option<&Path>, window: f64) -> Result<u8> {
    let g = graph.load()?;
    let a = g.alpha(alpha)?;
    if a.iter().any(|w| !w.is_finite()) {
        return Err(invalid("weights must be finite"));
    }
    let model = BandModel::new(&g.graph, &a, g.convention)?;
    let opts = BandOptions {
        n,
        origin: window,
        ..BandOptions::default()
    };
    let grid = eval_bands(&model, &opts)?;
    if let Some(path) = out {
        export_surface(&grid, path)?;
    }
    let report = find_critical_points(&model, &grid, &opts);
    let summary = spectral_summary(&grid, &report, &opts);
    emit(
        prov,
        json!({
            "graph": g.name,
            "alpha": alpha,
            "alpha_order": g.order(),
            "n": n,
            "surface": out.map(|p| p.display().to_string()),
            "critical_points": report.points,
            "flat_bands": report.flat_bands,
            "dropped_seeds": report.dropped,
            "spectrum": summary,
        }),
    );
    Ok(0)
}

fn subset_json(r: &SubsetRecord) -> Value {
    json!({
        "mask": r.mask,
        "edges": r.edges,
        "figure_labels": figure_labels(r.mask),
        "connected": r.connected,
    })
}

fn cmd_sweep(prov: &Value, trials: usize, seed: u64, range: (i64, i64), confirm: bool, format: Format) -> Result<u8> {
    if trials == 0 {
        return Err(invalid("--trials must be positive"));
    }
    let g = mother();
    let opts = SweepOptions {
        trials,
        seed,
        range,
        confirm,
        ..SweepOptions::default()
    };
    let r = run_sweep(&g, &opts)?;
    let code = if r.unresolved.is_empty() && r.mixed.is_empty() { 0 } else { EXIT_INCONCLUSIVE };
    if !r.mixed.is_empty() {
        log::warn!("{} subsets have mixed trial outcomes", r.mixed.len());
    }
    let pick = |masks: &[u32]| -> Vec<Value> { masks.iter().map(|&m| subset_json(&r.subsets[m as usize])).collect() };
    match format {
        Format::Json => emit(
            prov,
            json!({
                "dsg_size": r.dsg_size(),
                "maximal": pick(&r.maximal),
                "disconnected": r.disconnected.len(),
                "dsg_within_disconnected": r.dsg_within_disconnected(),
                "disconnected_outside_dsg": pick(&r.disconnected_outside_dsg),
                "unresolved": pick(&r.unresolved),
                "mixed": pick(&r.mixed),
                "rational_disagreements": r.rational_disagreements,
                "sweep": r,
            }),
        ),
        Format::Text => {
            println!("# bloch {} config {}", env!("CARGO_PKG_VERSION"), prov["config_hash"].as_str().unwrap_or(""));
            println!(
                "dsg {}  maximal {}  disconnected {}  unresolved {}  mixed {}",
                r.dsg_size(),
                r.maximal.len(),
                r.disconnected.len(),
                r.unresolved.len(),
                r.mixed.len()
            );
            let show = |title: &str, masks: &[u32]| {
                println!("\n{title}");
                for &m in masks {
                    println!("edges {:?}  figure labels {:?}", r.subsets[m as usize].edges, figure_labels(m));
                    print!("{}", render_subgraph(&g, m));
                }
            };
            show("maximal degenerate subgraphs", &r.maximal);
            show("maximal disconnected subgraphs outside DSG", &r.disconnected_outside_dsg);
            if !r.mixed.is_empty() {
                show("subsets with mixed trial outcomes", &r.mixed);
            }
        }
    }
    Ok(code)
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            bail!(invalid("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
    }
    let prov = provenance(cli);
    match &cli.command {
        Command::Symbol { graph, alpha, format } => cmd_symbol(&prov, graph, alpha.as_deref(), *format),
        Command::Test { graph, source, field } => cmd_test(&prov, graph, source, field.as_deref()),
        Command::Bernstein {
            graph,
            alpha,
            dump_polytopes,
        } => cmd_bernstein(&prov, graph, alpha.as_deref(), dump_polytopes.as_deref()),
        Command::Count { graph, alpha, field } => cmd_count(&prov, graph, alpha, field),
        Command::Bands {
            graph,
            alpha,
            n,
            out,
            window,
        } => cmd_bands(&prov, graph, alpha, *n, out.as_deref(), *window),
        Command::Sweep {
            trials,
            seed,
            range,
            no_confirm,
            format,
        } => cmd_sweep(&prov, *trials, *seed, *range, !no_confirm, *format),
    }
}

fn is_input_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<Invalid>()
            || c.is::<graph::GraphError>()
            || c.is::<symbol::SymbolError>()
            || c.is::<critical::CriticalError>()
            || c.is::<bands::BandError>()
            || c.is::<polytope::PolytopeError>()
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        2 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_input_error(&e) { EXIT_INVALID } else { EXIT_INCONCLUSIVE })
        }
    }
}
