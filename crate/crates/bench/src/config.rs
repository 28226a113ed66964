use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use hullcache::hull::MAX_ELEMENTS;
use hullcache::support::Method;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    Support,
    GjkColliding,
    GjkClose,
    GjkDistant,
    Verify,
}

impl Scenario {
    pub fn key(self) -> &'static str {
        match self {
            Scenario::Support => "support",
            Scenario::GjkColliding => "gjk-colliding",
            Scenario::GjkClose => "gjk-close",
            Scenario::GjkDistant => "gjk-distant",
            Scenario::Verify => "verify",
        }
    }

    pub fn is_gjk(self) -> bool {
        matches!(
            self,
            Scenario::GjkColliding | Scenario::GjkClose | Scenario::GjkDistant
        )
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Scenario {
    type Err = BenchError;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let with_prefix = format!("gjk-{s}");
        [
            Scenario::Support,
            Scenario::GjkColliding,
            Scenario::GjkClose,
            Scenario::GjkDistant,
            Scenario::Verify,
        ]
        .into_iter()
        .find(|sc| sc.key() == s || sc.key() == with_prefix)
        .ok_or_else(|| BenchError::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub hull_sizes: Vec<usize>,
    pub mesh_paths: Vec<PathBuf>,
    pub seed: u64,
    pub directions_per_hull: usize,
    pub warmup_iters: usize,
    pub measure_iters: usize,
    pub scenario: Scenario,
    pub output_path: Option<PathBuf>,
    /// Methods to run, in output order.
    pub methods: Vec<Method>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            hull_sizes: vec![8, 64, 512, 4096, 16384],
            mesh_paths: Vec::new(),
            seed: 42,
            directions_per_hull: 1000,
            warmup_iters: 100,
            measure_iters: 1000,
            scenario: Scenario::Support,
            output_path: None,
            methods: Method::ALL.to_vec(),
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if let Some(&n) = self
            .hull_sizes
            .iter()
            .find(|&&n| !(4..=MAX_ELEMENTS).contains(&n))
        {
            return bad(format!("hull size {n} is outside 4..={MAX_ELEMENTS}"));
        }
        if self.directions_per_hull == 0 || self.warmup_iters == 0 || self.measure_iters == 0 {
            return bad("direction, warmup and measurement counts must be positive".into());
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        Ok(())
    }
}
