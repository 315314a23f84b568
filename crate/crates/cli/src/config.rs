//! Run configuration: a single flat TOML file with dotted keys. Unknown keys
//! are rejected; environment variables are deliberately ignored.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use micropolar::field::LatticeGrid;
use micropolar::illposed::{InflationConfig, IterateQuadrature};
use micropolar::solver::SolverConfig;

/// Summability index accepting `2.0` or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RIndex(pub f64);

impl Serialize for RIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for RIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(RIndex(x)),
            Raw::Text(t) => match t.as_str() {
                "inf" | "infinity" | "oo" => Ok(RIndex(f64::INFINITY)),
                other => other
                    .parse::<f64>()
                    .map(RIndex)
                    .map_err(|_| serde::de::Error::custom(format!("bad r index {other:?}"))),
            },
        }
    }
}

pub fn parse_r(text: &str) -> anyhow::Result<f64> {
    match text {
        "inf" | "infinity" | "oo" => Ok(f64::INFINITY),
        other => Ok(other.parse::<f64>()?),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridCfg {
    pub n: usize,
    /// Half-extent of the frequency lattice; the spacing is 2 xi_max / n.
    pub xi_max: f64,
}

impl Default for GridCfg {
    fn default() -> Self {
        GridCfg { n: 16, xi_max: 4.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PartitionCfg {
    pub j_min: i32,
    pub j_max: i32,
}

impl Default for PartitionCfg {
    fn default() -> Self {
        PartitionCfg {
            j_min: -6,
            j_max: 22,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverCfg {
    pub dt: f64,
    pub t_end: f64,
    pub alpha: f64,
    pub r: RIndex,
    pub picard_depth: usize,
    pub dealias_fraction: f64,
    pub picard_steps: usize,
    pub amplitude: f64,
}

impl Default for SolverCfg {
    fn default() -> Self {
        SolverCfg {
            dt: 0.01,
            t_end: 0.5,
            alpha: 0.5,
            r: RIndex(2.0),
            picard_depth: 2,
            dealias_fraction: 2.0 / 3.0,
            picard_steps: 64,
            amplitude: 0.05,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentCfg {
    pub n: u32,
    pub delta: f64,
    pub r: RIndex,
    /// "fb" or "besov".
    pub space: String,
    pub t_factor: f64,
}

impl Default for ExperimentCfg {
    fn default() -> Self {
        ExperimentCfg {
            n: 4,
            delta: 0.05,
            r: RIndex(f64::INFINITY),
            space: "fb".to_string(),
            t_factor: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureCfg {
    pub gauss_order: usize,
    pub eta_order: usize,
    pub tau_order: usize,
    pub e_order: usize,
}

impl Default for QuadratureCfg {
    fn default() -> Self {
        QuadratureCfg {
            gauss_order: 6,
            eta_order: 5,
            tau_order: 6,
            e_order: 5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub calibration_file: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridCfg,
    #[serde(default)]
    pub partition: PartitionCfg,
    #[serde(default)]
    pub solver: SolverCfg,
    #[serde(default)]
    pub experiment: ExperimentCfg,
    #[serde(default)]
    pub quadrature: QuadratureCfg,
}

fn default_seed() -> u64 {
    42
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: default_seed(),
            output_dir: default_output_dir(),
            calibration_file: None,
            grid: GridCfg::default(),
            partition: PartitionCfg::default(),
            solver: SolverCfg::default(),
            experiment: ExperimentCfg::default(),
            quadrature: QuadratureCfg::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        anyhow::ensure!(self.grid.n >= 4 && self.grid.n <= 512, "grid.n out of range [4, 512]");
        anyhow::ensure!(self.grid.xi_max > 0.0, "grid.xi_max must be positive");
        anyhow::ensure!(
            self.partition.j_min < self.partition.j_max,
            "partition.j_min must be below partition.j_max"
        );
        anyhow::ensure!(self.solver.dt > 0.0, "solver.dt must be positive");
        anyhow::ensure!(
            self.solver.t_end >= self.solver.dt,
            "solver.t_end must be at least one step"
        );
        anyhow::ensure!(
            self.solver.alpha > 0.0 && self.solver.alpha < 1.0,
            "solver.alpha must lie in (0, 1)"
        );
        anyhow::ensure!(self.solver.r.0 >= 1.0, "solver.r must lie in [1, inf]");
        anyhow::ensure!(
            self.solver.dealias_fraction > 0.0 && self.solver.dealias_fraction <= 1.0,
            "solver.dealias_fraction must lie in (0, 1]"
        );
        anyhow::ensure!(self.experiment.n >= 2, "experiment.n must be at least 2");
        anyhow::ensure!(
            self.experiment.delta > 0.0 && self.experiment.delta < 1.0,
            "experiment.delta must lie in (0, 1)"
        );
        anyhow::ensure!(self.experiment.r.0 >= 1.0, "experiment.r must lie in [1, inf]");
        anyhow::ensure!(
            matches!(self.experiment.space.as_str(), "fb" | "besov"),
            "experiment.space must be \"fb\" or \"besov\""
        );
        anyhow::ensure!(self.experiment.t_factor > 0.0, "experiment.t_factor must be positive");
        let q = &self.quadrature;
        for (name, v) in [
            ("gauss_order", q.gauss_order),
            ("eta_order", q.eta_order),
            ("tau_order", q.tau_order),
            ("e_order", q.e_order),
        ] {
            anyhow::ensure!((2..=32).contains(&v), "quadrature.{name} out of range [2, 32]");
        }
        Ok(())
    }

    pub fn lattice(&self) -> LatticeGrid {
        LatticeGrid::new(self.grid.n, 2.0 * self.grid.xi_max / self.grid.n as f64)
    }

    pub fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::new(self.lattice(), self.solver.dt, self.solver.t_end);
        cfg.alpha = self.solver.alpha;
        cfg.r = self.solver.r.0;
        cfg.picard_depth = self.solver.picard_depth;
        cfg.dealias_fraction = self.solver.dealias_fraction;
        cfg.picard_steps = self.solver.picard_steps;
        cfg
    }

    pub fn inflation_config(&self) -> InflationConfig {
        InflationConfig {
            t_factor: self.experiment.t_factor,
            e_order: self.quadrature.e_order,
            quad: IterateQuadrature {
                eta_order: self.quadrature.eta_order,
                tau_order: self.quadrature.tau_order,
            },
            gauss_order: self.quadrature.gauss_order,
            seed: self.seed,
        }
    }

    pub fn hash(&self) -> String {
        micropolar::report::config_hash(self).unwrap_or_default()
    }
}
