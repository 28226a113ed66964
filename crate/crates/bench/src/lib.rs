//! Benchmark and verification harness for the support-query backends.

mod backends;
mod config;
mod error;
mod gen;
mod gjk_bench;
mod record;
mod support_bench;
mod timing;
pub mod verify;

pub use backends::{Backends, Counting};
pub use config::{BenchConfig, Scenario};
pub use error::{BenchError, Result};
pub use gen::{gen_hull, GeneratedFile};
pub use gjk_bench::{place_pair, run_gjk_bench, scenario_distance};
pub use record::{write_records, BenchRecord, CSV_HEADER};
pub use support_bench::{
    bench_hull, run_mesh_bench, run_support_bench, time_method, unit_directions,
};
pub use timing::{time_batches, Timing};
pub use verify::{verify, VerifyOptions, VerifyReport};
