use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fracplane::discharge::{self, DischargeContext, Discharge};
use fracplane::fraclp::{self, geometric_orbits, OrbitPartition, Strategy, DEFAULT_MIS_CAP};
use fracplane::indsets::{max_weight_is, sample_maximal_core_set, sample_rng, CoreSets};
use fracplane::json::rat_value;
use fracplane::par::{self, Exec};
use fracplane::tiling::{self, TilingEngine};
use fracplane::udgraph::{self, SpindleMode, UDGraph};

/// Graphs above this size need `--allow-long` for LP work.
const LONG_VERTICES: usize = 120;
/// Exhaustive core enumeration above this radius needs `--allow-long`.
const LONG_EXHAUSTIVE_D: u32 = 4;
const LONG_SAMPLES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Selector {
    Moser,
    Golomb,
    FisherUllman,
    Core(u32),
    Gd(u32),
    Gpd(u32),
    Fu(u32),
}

impl FromStr for Selector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.parse::<u32>().map_err(|_| format!("bad number in selector `{s}`"));
        Ok(match s.split_once(':') {
            None => match s {
                "moser" => Selector::Moser,
                "golomb" => Selector::Golomb,
                "fisher-ullman" => Selector::FisherUllman,
                _ => return Err(format!("unknown graph `{s}`")),
            },
            Some(("core", d)) => Selector::Core(num(d)?),
            Some(("gd", d)) => Selector::Gd(num(d)?),
            Some(("gpd", d)) => Selector::Gpd(num(d)?),
            Some(("fu", n)) => Selector::Fu(num(n)?),
            Some(_) => return Err(format!("unknown graph `{s}`")),
        })
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::Moser => write!(f, "moser"),
            Selector::Golomb => write!(f, "golomb"),
            Selector::FisherUllman => write!(f, "fisher-ullman"),
            Selector::Core(d) => write!(f, "core:{d}"),
            Selector::Gd(d) => write!(f, "gd:{d}"),
            Selector::Gpd(d) => write!(f, "gpd:{d}"),
            Selector::Fu(n) => write!(f, "fu:{n}"),
        }
    }
}

impl Selector {
    fn build(self) -> UDGraph {
        match self {
            Selector::Moser => udgraph::build_moser_spindle(),
            Selector::Golomb => udgraph::build_golomb(),
            Selector::FisherUllman => udgraph::build_fisher_ullman(),
            Selector::Core(d) => udgraph::build_core(d),
            Selector::Gd(d) => udgraph::build_spindled(d, SpindleMode::ThreeDirections),
            Selector::Gpd(d) => udgraph::build_spindled(d, SpindleMode::SixDirections),
            Selector::Fu(n) => udgraph::build_fu_core(n),
        }
    }

    fn file_stem(self) -> String {
        self.to_string().replace(':', "")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Svg,
    Dimacs,
    Lp,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Svg => "svg",
            Format::Dimacs => "dimacs",
            Format::Lp => "lp",
            Format::Csv => "csv",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Orbits {
    Trivial,
    Geometric,
}

#[derive(Parser)]
#[command(name = "fracplane", version, about = "Fractional chromatic bounds for unit-distance graphs")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file. Defaults to stdout, or to $FRACPLANE_OUT_DIR when that is set.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Copy)]
struct Population {
    /// Every maximal independent set of the core.
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Number of seeded random maximal core sets.
    #[arg(long, requires = "seed")]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a graph with its embedding check.
    Build {
        graph: Selector,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Exact fractional chromatic number (small graphs) or weight-LP lower bound.
    Bound {
        graph: Selector,
        #[arg(long, value_enum, default_value = "trivial")]
        orbits: Orbits,
        /// Enumerate rows (at most this many maximal sets) instead of generating them.
        #[arg(long)]
        cap: Option<usize>,
        /// Permit graphs above the size guard.
        #[arg(long)]
        allow_long: bool,
    },
    /// Tiling and discharging verification over maximal core sets.
    Verify {
        graph: Selector,
        #[command(flatten)]
        population: Population,
        /// The one-phase argument on G_d (weights 12 and 1).
        #[arg(long)]
        simple: bool,
        #[arg(long)]
        allow_long: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Tiling (core:d) or charge overlay (gpd:d) for one sampled maximal core set.
    Tile {
        graph: Selector,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, value_enum, default_value = "svg")]
        format: Format,
    },
    /// Spindle-block templates and their exhaustive claim check.
    Blocks,
    /// The enumerated weight LP in LP or JSON form.
    ExportLp {
        graph: Selector,
        #[arg(long, value_enum, default_value = "trivial")]
        orbits: Orbits,
        #[arg(long)]
        cap: Option<usize>,
        #[arg(long, value_enum, default_value = "lp")]
        format: Format,
    },
}

enum Failure {
    Usage(String),
    Operational(String),
}

impl From<fracplane::Error> for Failure {
    fn from(e: fracplane::Error) -> Self {
        Failure::Operational(e.to_string())
    }
}

struct Output {
    stem: String,
    format: Format,
    body: String,
    /// False when the content reports a falsification.
    passed: bool,
}

fn json_out(stem: String, v: &Value, passed: bool) -> Output {
    Output {
        stem,
        format: Format::Json,
        body: serde_json::to_string_pretty(v).expect("json") + "\n",
        passed,
    }
}

fn orbit_partition(g: &UDGraph, o: Orbits) -> OrbitPartition {
    match o {
        Orbits::Trivial => OrbitPartition::trivial(g.n()),
        Orbits::Geometric => geometric_orbits(g),
    }
}

fn formats(f: Format, allowed: &[Format]) -> Result<(), Failure> {
    if allowed.contains(&f) {
        Ok(())
    } else {
        Err(Failure::Usage(format!("format {} not supported here", f.ext())))
    }
}

fn population(p: Population, d: u32, allow_long: bool) -> Result<CoreSets, Failure> {
    let sets = match (p.exhaustive, p.samples, p.seed) {
        (true, _, _) => CoreSets::Exhaustive,
        (false, Some(samples), Some(seed)) => CoreSets::Sampled { samples, seed },
        (false, None, Some(_)) => return Err(Failure::Usage("--seed needs --samples".into())),
        _ => return Err(Failure::Usage("choose --exhaustive or --samples N --seed S".into())),
    };
    let long = match sets {
        CoreSets::Exhaustive => d > LONG_EXHAUSTIVE_D,
        CoreSets::Sampled { samples, .. } => samples > LONG_SAMPLES,
    };
    if long && !allow_long {
        return Err(Failure::Usage("this run is long; pass --allow-long".into()));
    }
    Ok(sets)
}

fn cmd_build(graph: Selector, format: Format) -> Result<Output, Failure> {
    formats(format, &[Format::Json, Format::Svg, Format::Dimacs])?;
    let g = graph.build();
    let embedding = udgraph::verify_embedding(&g)?;
    let body = match format {
        Format::Json => {
            let mut v = udgraph::to_json(&g);
            v["embedding"] = serde_json::to_value(&embedding).expect("json");
            return Ok(json_out(graph.file_stem(), &v, true));
        }
        Format::Svg => udgraph::to_svg(&g, None),
        _ => udgraph::to_dimacs(&g),
    };
    Ok(Output { stem: graph.file_stem(), format, body, passed: true })
}

fn cmd_bound(graph: Selector, orbits: Orbits, cap: Option<usize>, allow_long: bool) -> Result<Output, Failure> {
    let g = graph.build();
    if g.n() > LONG_VERTICES && !allow_long {
        return Err(Failure::Usage(format!("{} has {} vertices; pass --allow-long", graph, g.n())));
    }
    let explicit_cap = cap;
    let cap = cap.unwrap_or(DEFAULT_MIS_CAP);
    let mut v = if matches!(graph, Selector::Moser | Selector::Golomb) && orbits == Orbits::Trivial {
        let r = fraclp::fractional_chromatic(&g, Some(cap))?;
        json!({
            "value": rat_value(&r.value),
            "method": "covering LP over maximal independent sets",
            "cover": r.cover,
            "weights": r.weights.iter().map(rat_value).collect::<Vec<_>>(),
        })
    } else {
        let o = orbit_partition(&g, orbits);
        let strategy = match explicit_cap {
            Some(cap) => Strategy::Enumerate { cap },
            None => Strategy::CuttingPlane,
        };
        let r = fraclp::weight_lp_bound(&g, &o, strategy)?;
        let mut v = fraclp::to_json(&r);
        v["value"] = v["bound"].take();
        v.as_object_mut().expect("object").remove("bound");
        v["method"] = json!("weight LP");
        v["orbits"] = json!(o.len());
        v
    };
    v["graph"] = json!(graph.to_string());
    v["vertices"] = json!(g.n());
    v["edges"] = json!(g.edge_count());
    if graph == Selector::FisherUllman {
        // The fixed core weighting: total weight over the heaviest independent set.
        let w = g.weights();
        let total = g.total_weight();
        let (_, alpha) = max_weight_is(&g, &w)?;
        v["fixed_weights"] = json!({
            "total": rat_value(&total),
            "max_independent_weight": rat_value(&alpha),
            "bound": rat_value(&(total / alpha)),
        });
    }
    Ok(json_out(format!("bound-{}", graph.file_stem()), &v, true))
}

fn cmd_verify(
    graph: Selector,
    pop: Population,
    simple: bool,
    allow_long: bool,
    format: Format,
    exec: Exec,
) -> Result<Output, Failure> {
    let stem = format!("verify-{}", graph.file_stem());
    match (graph, simple) {
        (Selector::Gd(d), true) => {
            formats(format, &[Format::Json])?;
            let r = discharge::verify_simple(d, population(pop, d, allow_long)?, exec);
            let v = serde_json::to_value(&r).expect("json");
            Ok(json_out(stem, &v, r.passed()))
        }
        (Selector::Gpd(d), false) => {
            formats(format, &[Format::Json, Format::Csv])?;
            let sets = population(pop, d, allow_long)?;
            let ctx = DischargeContext::new(d);
            let b = discharge::compute_bound(&ctx, sets, exec);
            let passed = b.passed();
            if format == Format::Csv {
                return Ok(Output { stem, format, body: discharge::report_csv(&b.verification), passed });
            }
            let mut v = discharge::report_json(&b.verification);
            v["asymptotic_bound"] = json!({"num": b.asymptotic.numer(), "den": b.asymptotic.denom()});
            v["deep_vertices"] = json!(b.deep_vertices);
            v["core_vertices"] = json!(b.core_vertices);
            Ok(json_out(stem, &v, passed))
        }
        (Selector::Core(d), false) => {
            formats(format, &[Format::Json])?;
            let r = tiling::verify_tilings(d, population(pop, d, allow_long)?, exec);
            let mut v = serde_json::to_value(&r).expect("json");
            v["passed"] = json!(r.passed());
            Ok(json_out(stem, &v, r.passed()))
        }
        (Selector::Gd(_), false) => Err(Failure::Usage("gd:d is verified with --simple".into())),
        (_, true) => Err(Failure::Usage("--simple needs a gd:d graph".into())),
        _ => Err(Failure::Usage(format!("verify takes core:d, gd:d or gpd:d, not {graph}"))),
    }
}

fn cmd_tile(graph: Selector, seed: u64, index: u64, format: Format) -> Result<Output, Failure> {
    formats(format, &[Format::Json, Format::Svg])?;
    let stem = format!("tile-{}-{seed}-{index}", graph.file_stem());
    let done = |body: String| Ok(Output { stem: stem.clone(), format, body, passed: true });
    match graph {
        Selector::Core(d) => {
            let core = udgraph::build_core(d);
            let set = sample_maximal_core_set(&core, seed, index);
            let pts: Vec<_> = set.iter().map(|&v| core.vertex(v).lattice.expect("lattice")).collect();
            let t = tiling::tile_points(&TilingEngine::new(d), &pts)?;
            match format {
                Format::Json => Ok(json_out(stem, &tiling::tiling_json(&t), true)),
                _ => done(tiling::tiling_svg(&t)),
            }
        }
        Selector::Gpd(d) => {
            let ctx = DischargeContext::new(d);
            let set = sample_maximal_core_set(&ctx.graph, seed, index);
            let in_i = ctx.extend_spindles(&set, &mut sample_rng(seed, index.wrapping_add(1 << 40)));
            let run = Discharge::run(&ctx, in_i)?;
            match format {
                Format::Json => {
                    let mut v = tiling::tiling_json(&run.tiling);
                    v["excess"] = json!((0..run.tiling.tiles.len())
                        .map(|t| json!({"num": run.excess(t).numer(), "den": run.excess(t).denom(), "complete": run.is_complete(t)}))
                        .collect::<Vec<_>>());
                    v["falsifications"] = serde_json::to_value(&run.events).expect("json");
                    let passed = run.events.is_empty();
                    Ok(json_out(stem, &v, passed))
                }
                _ => done(discharge::run_svg(&run)),
            }
        }
        _ => Err(Failure::Usage("tile takes core:d or gpd:d".into())),
    }
}

fn cmd_blocks() -> Result<Output, Failure> {
    let r = discharge::verify_block_claims();
    let v = json!({
        "templates": [discharge::five_block_template(), discharge::six_block_template()],
        "verification": r,
        "passed": r.passed(),
    });
    Ok(json_out("blocks".into(), &v, r.passed()))
}

fn cmd_export_lp(graph: Selector, orbits: Orbits, cap: Option<usize>, format: Format) -> Result<Output, Failure> {
    formats(format, &[Format::Lp, Format::Json])?;
    let g = graph.build();
    let o = orbit_partition(&g, orbits);
    let lp = fraclp::weight_lp_model(&g, &o, cap.unwrap_or(DEFAULT_MIS_CAP), Exec::default())?;
    let stem = format!("lp-{}", graph.file_stem());
    match format {
        Format::Lp => Ok(Output { stem, format, body: fraclp::to_lp_text(&lp), passed: true }),
        _ => {
            let v = json!({
                "graph": graph.to_string(),
                "orbits": o.blocks(),
                "objective": lp.objective.iter().map(rat_value).collect::<Vec<_>>(),
                "rows": lp.rows.iter().map(|r| json!({
                    "coeffs": r.coeffs.iter().map(|(j, c)| json!([j, rat_value(c)])).collect::<Vec<_>>(),
                    "rhs": rat_value(&r.rhs),
                })).collect::<Vec<_>>(),
            });
            Ok(json_out(stem, &v, true))
        }
    }
}

fn write(out: &Output, path: Option<PathBuf>) -> Result<(), Failure> {
    let path = path.or_else(|| {
        std::env::var_os("FRACPLANE_OUT_DIR").map(|d| PathBuf::from(d).join(format!("{}.{}", out.stem, out.format.ext())))
    });
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| Failure::Operational(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&p, &out.body).map_err(|e| Failure::Operational(format!("{}: {e}", p.display())))?;
            eprintln!("wrote {}", p.display());
        }
        None => print!("{}", out.body),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let exec = Exec::Parallel;
    match cli.cmd {
        Cmd::Build { graph, format } => cmd_build(graph, format),
        Cmd::Bound { graph, orbits, cap, allow_long } => cmd_bound(graph, orbits, cap, allow_long),
        Cmd::Verify { graph, population, simple, allow_long, format } => {
            cmd_verify(graph, population, simple, allow_long, format, exec)
        }
        Cmd::Tile { graph, seed, index, format } => cmd_tile(graph, seed, index, format),
        Cmd::Blocks => cmd_blocks(),
        Cmd::ExportLp { graph, orbits, cap, format } => cmd_export_lp(graph, orbits, cap, format),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (jobs, out) = (cli.jobs, cli.out.clone());
    let result = par::with_jobs(jobs, || run(cli)).and_then(|o| write(&o, out).map(|_| o.passed));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("falsified: see report");
            ExitCode::from(3)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Operational(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
