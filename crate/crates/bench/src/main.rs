use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hullcache::support::Method;
use hullcache_bench::{
    gen_hull, run_gjk_bench, run_mesh_bench, run_support_bench, verify, write_records, BenchConfig,
    BenchError, Scenario, VerifyOptions,
};

#[derive(Parser)]
#[command(
    name = "hullcache",
    version,
    about = "Support-query benchmarks and checks for convex hull layouts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time support queries on sphere hulls for every method.
    SupportBench(Common),
    /// Time GJK queries between two sphere hulls.
    GjkBench(Common),
    /// Time support queries on hulls of OBJ/PLY meshes.
    MeshBench(Common),
    /// Run the correctness suites and print a summary.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, hide = true)]
        inject_corruption: bool,
    },
    /// Write serialized layout pools for sphere hulls and meshes.
    GenHull(Common),
}

#[derive(Args)]
struct Common {
    /// Comma-separated hull vertex counts.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Measured batches per method.
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Untimed batches per method.
    #[arg(long, default_value_t = 100)]
    warmup: usize,
    /// Directions (or pose pairs) per batch.
    #[arg(long, default_value_t = 1000)]
    directions: usize,
    /// Mesh file; repeat for several.
    #[arg(long)]
    mesh: Vec<PathBuf>,
    /// Output CSV file, or directory for gen-hull. CSV goes to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// support, gjk-colliding, gjk-close, gjk-distant or verify.
    #[arg(long)]
    scenario: Option<String>,
    /// Comma-separated method keys; all methods if absent.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
}

impl Common {
    fn config(self, default_scenario: Scenario) -> Result<BenchConfig, BenchError> {
        let defaults = BenchConfig::default();
        let methods = match self.methods {
            Some(keys) => keys
                .iter()
                .map(|k| {
                    Method::from_key(k.trim())
                        .ok_or_else(|| BenchError::Config(format!("unknown method {k:?}")))
                })
                .collect::<Result<_, _>>()?,
            None => defaults.methods,
        };
        let scenario = match self.scenario {
            Some(s) => s.parse()?,
            None => default_scenario,
        };
        Ok(BenchConfig {
            hull_sizes: self.sizes.unwrap_or(defaults.hull_sizes),
            mesh_paths: self.mesh,
            seed: self.seed,
            directions_per_hull: self.directions,
            warmup_iters: self.warmup,
            measure_iters: self.iters,
            scenario,
            output_path: self.out,
            methods,
        })
    }
}

fn run(cli: Cli) -> Result<bool, BenchError> {
    match cli.command {
        Command::SupportBench(c) => {
            let cfg = c.config(Scenario::Support)?;
            let rows = run_support_bench(&cfg)?;
            if cfg.output_path.is_none() {
                write_records(&rows, None)?;
            }
        }
        Command::GjkBench(c) => {
            let cfg = c.config(Scenario::GjkClose)?;
            let rows = run_gjk_bench(&cfg)?;
            if cfg.output_path.is_none() {
                write_records(&rows, None)?;
            }
        }
        Command::MeshBench(c) => {
            let mut cfg = c.config(Scenario::Support)?;
            cfg.hull_sizes.clear();
            let rows = run_mesh_bench(&cfg)?;
            if cfg.output_path.is_none() {
                write_records(&rows, None)?;
            }
        }
        Command::Verify {
            common,
            inject_corruption,
        } => {
            let cfg = common.config(Scenario::Verify)?;
            cfg.validate()?;
            let report = verify(
                &cfg,
                VerifyOptions {
                    inject_neighbor_corruption: inject_corruption,
                },
            );
            println!("{report}");
            return Ok(report.all_passed());
        }
        Command::GenHull(c) => {
            let mut cfg = c.config(Scenario::Support)?;
            if cfg.output_path.is_none() {
                cfg.output_path = Some(PathBuf::from("hulls"));
            }
            for f in gen_hull(&cfg)? {
                println!("{} ({} bytes)", f.path.display(), f.bytes);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
