use std::path::PathBuf;

use crate::basis::{dyadic_basis, grid_torus_basis, martingale_basis, BallBasis, BallShape, GridSpec, PartitionTree, StructureMode};
use crate::error::{Error, Result};
use crate::kernel::{convolution_kernels, dyadic_weighted_kernels, fejer_kernels, indicator_kernels, AlphaPreset, KernelStructure, Profile};

/// Experiment names accepted by `experiment <name>`.
pub const EXPERIMENTS: [&str; 7] = ["t2-ratio", "bmo-blo", "prop-p", "norm-equivalence", "lemmas", "weak-l1", "elementary"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisPreset {
    Dyadic,
    Grid,
    Tree,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    Indicator,
    Convolution(Profile),
    DyadicWeighted(AlphaPreset),
    Fejer(Vec<usize>),
}

impl KernelSpec {
    /// `indicator`, `convolution:<profile>`, `dyadic-weighted:<weights>` or
    /// `fejer:<m1,m2,...>`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, arg) = text.split_once(':').map_or((text, ""), |(h, a)| (h, a));
        match head {
            "indicator" if arg.is_empty() => Ok(KernelSpec::Indicator),
            "convolution" => Ok(KernelSpec::Convolution(Profile::parse(arg)?)),
            "dyadic-weighted" => Ok(KernelSpec::DyadicWeighted(AlphaPreset::parse(arg)?)),
            "fejer" => {
                let degrees: std::result::Result<Vec<usize>, _> = arg.split(',').map(|s| s.trim().parse::<usize>()).collect();
                degrees.map(KernelSpec::Fejer).map_err(|_| Error::UnknownPreset(text.to_string()))
            }
            _ => Err(Error::UnknownPreset(text.to_string())),
        }
    }
}

/// Run parameters. Every field is settable by a `key = value` config line
/// or the matching `--key value` flag.
#[derive(Debug, Clone)]
pub struct Settings {
    pub preset: BasisPreset,
    pub levels: u32,
    pub d: usize,
    pub n: usize,
    pub shape: BallShape,
    pub mode: StructureMode,
    pub tree_points: usize,
    pub tree_seed: u64,
    pub kernel: String,
    pub alpha: f64,
    pub alphas: Vec<f64>,
    pub epsilon: f64,
    pub seed: u64,
    pub samples: usize,
    pub queries: usize,
    pub threads: Option<usize>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub field: String,
    /// Corpus restriction for experiments; empty keeps every field.
    pub fields: Vec<String>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            preset: BasisPreset::Dyadic,
            levels: 6,
            d: 1,
            n: 64,
            shape: BallShape::Cube,
            mode: StructureMode::Uncentered,
            tree_points: 32,
            tree_seed: 0,
            kernel: "indicator".into(),
            alpha: 0.75,
            alphas: vec![0.6, 0.75, 0.9],
            epsilon: 0.5,
            seed: 0,
            samples: 20_000,
            queries: 1000,
            threads: None,
            input: None,
            out: None,
            field: "log-singularity".into(),
            fields: Vec::new(),
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| Error::Parse(format!("invalid value `{value}` for `{key}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s)).collect()
}

impl Settings {
    /// Applies one `key = value` pair. Keys use dashes; underscores are
    /// accepted as well.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let v = value.trim();
        match key.as_str() {
            "preset" | "basis" => {
                self.preset = match v {
                    "dyadic" => BasisPreset::Dyadic,
                    "grid" => BasisPreset::Grid,
                    "tree" => BasisPreset::Tree,
                    _ => return Err(Error::UnknownPreset(v.to_string())),
                }
            }
            "levels" => self.levels = parse(&key, v)?,
            "d" => self.d = parse(&key, v)?,
            "n" => self.n = parse(&key, v)?,
            "shape" => {
                self.shape = match v {
                    "cube" => BallShape::Cube,
                    "ball" => BallShape::Ball,
                    _ => return Err(Error::Parse(format!("invalid value `{v}` for `shape`"))),
                }
            }
            "mode" => {
                self.mode = match v {
                    "centered" => StructureMode::Centered,
                    "uncentered" => StructureMode::Uncentered,
                    _ => return Err(Error::Parse(format!("invalid value `{v}` for `mode`"))),
                }
            }
            "tree-points" => self.tree_points = parse(&key, v)?,
            "tree-seed" => self.tree_seed = parse(&key, v)?,
            "kernel" => {
                KernelSpec::parse(v)?;
                self.kernel = v.to_string();
            }
            "alpha" => {
                let a: f64 = parse(&key, v)?;
                if !(a > 0.0 && a < 1.0) {
                    return Err(Error::InvalidAlpha(a));
                }
                self.alpha = a;
            }
            "alphas" => {
                let list: Vec<f64> = parse_list(&key, v)?;
                if let Some(&a) = list.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
                    return Err(Error::InvalidAlpha(a));
                }
                self.alphas = list;
            }
            "epsilon" => {
                let e: f64 = parse(&key, v)?;
                if !(e > 0.0 && e < 1.0) {
                    return Err(Error::Parse(format!("epsilon must lie in (0, 1), got {e}")));
                }
                self.epsilon = e;
            }
            "seed" => self.seed = parse(&key, v)?,
            "samples" => self.samples = parse(&key, v)?,
            "queries" => self.queries = parse(&key, v)?,
            "threads" => {
                let t: usize = parse(&key, v)?;
                if t == 0 {
                    return Err(Error::Parse("threads must be at least 1".into()));
                }
                self.threads = Some(t);
            }
            "input" => self.input = Some(PathBuf::from(v)),
            "out" => self.out = Some(PathBuf::from(v)),
            "field" => self.field = v.to_string(),
            "fields" => self.fields = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
            _ => return Err(Error::Parse(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` starts a
    /// comment, blank lines are skipped.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("config line {}: expected `key = value`", k + 1)))?;
            self.set(key, value).map_err(|e| Error::Parse(format!("config line {}: {e}", k + 1)))?;
        }
        Ok(())
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        KernelSpec::parse(&self.kernel)
    }

    pub fn build_basis(&self) -> Result<BallBasis<f64>> {
        match self.preset {
            BasisPreset::Dyadic => {
                let b = dyadic_basis(self.levels)?;
                match self.mode {
                    StructureMode::Uncentered => Ok(b),
                    StructureMode::Centered => Err(Error::WrongBasis("grid")),
                }
            }
            BasisPreset::Grid => {
                let spec = GridSpec::new(self.d, self.n, self.shape);
                grid_torus_basis(match self.mode {
                    StructureMode::Centered => spec.centered(),
                    StructureMode::Uncentered => spec,
                })
            }
            BasisPreset::Tree => {
                if self.mode == StructureMode::Centered {
                    return Err(Error::WrongBasis("grid"));
                }
                martingale_basis(&PartitionTree::random(self.tree_points, self.tree_seed)?)
            }
        }
    }

    pub fn build_kernels(&self, b: &BallBasis<f64>) -> Result<KernelStructure<f64>> {
        match self.kernel_spec()? {
            KernelSpec::Indicator => Ok(indicator_kernels(b)),
            KernelSpec::Convolution(p) => convolution_kernels(b, &p),
            KernelSpec::DyadicWeighted(a) => {
                let levels = b.dyadic_levels().ok_or(Error::WrongBasis("dyadic"))?;
                dyadic_weighted_kernels(b, &a.terms(levels as usize + 1))
            }
            KernelSpec::Fejer(m) => fejer_kernels(b, &m),
        }
    }

    /// The settings that determine a run's output, as config rows. Paths and
    /// the thread cap are left out so that reruns compare equal.
    pub fn echo(&self) -> Vec<(String, String)> {
        let preset = match self.preset {
            BasisPreset::Dyadic => "dyadic",
            BasisPreset::Grid => "grid",
            BasisPreset::Tree => "tree",
        };
        let mut out = vec![("preset".to_string(), preset.to_string())];
        let mut kv = |k: &str, v: String| out.push((k.to_string(), v));
        match self.preset {
            BasisPreset::Dyadic => kv("levels", self.levels.to_string()),
            BasisPreset::Grid => {
                kv("d", self.d.to_string());
                kv("n", self.n.to_string());
                kv("shape", if self.shape == BallShape::Cube { "cube" } else { "ball" }.to_string());
            }
            BasisPreset::Tree => {
                kv("tree-points", self.tree_points.to_string());
                kv("tree-seed", self.tree_seed.to_string());
            }
        }
        kv("mode", if self.mode == StructureMode::Centered { "centered" } else { "uncentered" }.to_string());
        kv("kernel", self.kernel.clone());
        kv("seed", self.seed.to_string());
        if !self.fields.is_empty() {
            kv("fields", self.fields.join(";"));
        }
        out
    }
}
