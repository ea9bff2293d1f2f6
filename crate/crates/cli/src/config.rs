//! Run configuration: one TOML file, dotted-key overrides, strict keys.

use crate::error::CliError;
use dirac_moire::dynamics::{BranchSpec, PacketSpec};
use dirac_moire::fourier::EdgeConfig;
use dirac_moire::model::{
    DiracJunction, EffectivePotential, Envelope, JunctionGeometry, ModelParams, Stacking, ValleyKind,
};
use dirac_moire::transport::{JunctionRun, ValleyRun};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Experiment {
    Bandstructure,
    Gapscan,
    Invariant,
    EdgeSpectrum,
    Conductivity,
    ValleySweep,
    JunctionTable,
    Propagate,
    Steer,
    Scatter1d,
    Reproduce,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bandstructure => "bandstructure",
            Self::Gapscan => "gapscan",
            Self::Invariant => "invariant",
            Self::EdgeSpectrum => "edge_spectrum",
            Self::Conductivity => "conductivity",
            Self::ValleySweep => "valley_sweep",
            Self::JunctionTable => "junction_table",
            Self::Propagate => "propagate",
            Self::Steer => "steer",
            Self::Scatter1d => "scatter1d",
            Self::Reproduce => "reproduce",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSection {
    pub omega: f64,
    pub lambda: f64,
    pub eta: i32,
    pub stacking: Stacking,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            omega: 1.0,
            lambda: 0.2,
            eta: 1,
            stacking: Stacking::Plus,
        }
    }
}

impl ModelSection {
    pub fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(self.omega, self.lambda, self.eta, self.stacking)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BandSection {
    /// Sample `ξ1` on `[-xi_max, xi_max]` with `ξ2 = 0`.
    pub xi_max: f64,
    pub points: usize,
}

impl Default for BandSection {
    fn default() -> Self {
        Self {
            xi_max: 2.0,
            points: 201,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GapScanSection {
    pub samples: usize,
    pub omega: [f64; 2],
    pub lambda: [f64; 2],
    /// Radial scan `[0, rmax]` with `n` coarse points before refinement.
    pub rmax: f64,
    pub n: usize,
    pub tol: f64,
}

impl Default for GapScanSection {
    fn default() -> Self {
        Self {
            samples: 20,
            omega: [0.3, 2.0],
            lambda: [0.05, 2.0],
            rmax: 6.0,
            n: 4000,
            tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InvariantSection {
    pub radius: f64,
    pub n: usize,
    /// Also evaluate the sign-flipped parameter sets.
    pub symmetries: bool,
    /// Also evaluate the single-band half invariants of both stackings.
    pub halves: bool,
    /// Polar cells per direction of the exported curvature map; 0 skips it.
    pub map_n: usize,
    pub map_radius: f64,
    pub tol: f64,
}

impl Default for InvariantSection {
    fn default() -> Self {
        Self {
            radius: 50.0,
            n: 600,
            symmetries: false,
            halves: false,
            map_n: 0,
            map_radius: 3.0,
            tol: 1e-2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EdgeSection {
    pub xi_min: f64,
    pub xi_max: f64,
    pub points: usize,
    /// Strip geometry and truncation, `[edge.strip]`.
    pub strip: EdgeConfig,
}

impl Default for EdgeSection {
    fn default() -> Self {
        Self {
            xi_min: -2.0,
            xi_max: 2.0,
            points: 81,
            strip: EdgeConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConductivitySection {
    pub n: usize,
    pub x0: Vec<f64>,
    /// Also report the pointwise commutator oracle.
    pub oracle: bool,
}

impl Default for ConductivitySection {
    fn default() -> Self {
        Self {
            n: 16,
            x0: vec![37.5, 50.0, 62.5],
            oracle: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TableSection {
    pub x0: Vec<f64>,
    pub n: Vec<usize>,
    /// Columns above this cutoff are left empty.
    pub max_n: usize,
}

impl Default for TableSection {
    fn default() -> Self {
        Self {
            x0: vec![37.5, 50.0, 62.5],
            n: vec![8, 16, 32, 64],
            max_n: 32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValleyMode {
    /// `σ±` over `(ω, x0)` for `H2^ε`.
    Omega,
    /// `σ+` over `(V0, E)` for `H2` or `H4`.
    Energy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValleySection {
    pub mode: ValleyMode,
    pub kind: ValleyKind,
    pub v0: Vec<f64>,
    pub omega: Vec<f64>,
    pub energy: Vec<f64>,
    pub x0: Vec<f64>,
    pub eps: f64,
    pub chi: Envelope,
    pub xi: Envelope,
    /// Discretization and solver, `[valley.run]`.
    pub run: ValleyRun,
}

impl Default for ValleySection {
    fn default() -> Self {
        Self {
            mode: ValleyMode::Omega,
            kind: ValleyKind::H2eps,
            v0: vec![0.1],
            omega: vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0],
            energy: vec![-0.1, -0.05, 0.0, 0.05, 0.1],
            x0: vec![100.0],
            eps: 1.0,
            chi: EffectivePotential::default_chi(),
            xi: EffectivePotential::default_xi(),
            run: ValleyRun::default(),
        }
    }
}

impl ValleySection {
    pub fn potential(&self, kind: ValleyKind, v0: f64, omega: f64) -> EffectivePotential {
        match kind {
            ValleyKind::H2 => EffectivePotential::Slow1d { v0, chi: self.chi },
            ValleyKind::H2eps => EffectivePotential::TwoScale {
                v0,
                omega,
                eps: self.eps,
                chi: self.chi,
            },
            ValleyKind::H4 => EffectivePotential::Slow2d {
                v0,
                chi: self.chi,
                xi: self.xi,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PacketSection {
    pub n: usize,
    pub times: Vec<f64>,
    /// Steering angles for `steer`, run after the unperturbed case.
    pub theta_m: Vec<f64>,
    /// Steering angle for `propagate`; unset means no perturbation.
    pub theta: Option<f64>,
    /// Also report junction `2πσ̃` with and without each perturbation.
    pub conductivity: bool,
    pub packet: PacketSpec,
    pub branches: BranchSpec,
    pub tol: f64,
}

impl Default for PacketSection {
    fn default() -> Self {
        use std::f64::consts::PI;
        Self {
            n: 16,
            times: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0],
            theta_m: vec![2.0 * PI / 3.0, 0.0, -2.0 * PI / 3.0],
            theta: None,
            conductivity: false,
            packet: PacketSpec::default(),
            branches: BranchSpec::default(),
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScatterSection {
    /// Barrier height and half-width.
    pub v0: f64,
    pub a: f64,
    pub k: Vec<f64>,
    pub x0: Vec<f64>,
    pub cells_per_unit: f64,
}

impl Default for ScatterSection {
    fn default() -> Self {
        Self {
            v0: 0.5,
            a: 1.0,
            k: vec![1.0],
            x0: (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect(),
            cells_per_unit: 500.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteSection {
    /// Fine and coarse junction cutoffs.
    pub n_fine: usize,
    pub n_coarse: usize,
    /// Cutoff of the wavepacket runs.
    pub n_packet: usize,
    pub invariant_n: usize,
    pub edge_points: usize,
    pub valley_kx: usize,
    /// Skip the expensive criteria (1, 8, 9) for smoke runs.
    pub quick: bool,
    /// Criteria to run; empty runs all.
    pub only: Vec<u8>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        Self {
            n_fine: 32,
            n_coarse: 16,
            n_packet: 16,
            invariant_n: 600,
            edge_points: 81,
            valley_kx: 256,
            quick: false,
            only: vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub seed: u64,
    pub model: ModelSection,
    pub bandstructure: BandSection,
    pub gapscan: GapScanSection,
    pub invariant: InvariantSection,
    pub edge: EdgeSection,
    pub junction: DiracJunction,
    pub junction_run: JunctionRun,
    pub conductivity: ConductivitySection,
    pub table: TableSection,
    pub valley: ValleySection,
    pub packet: PacketSection,
    pub scatter: ScatterSection,
    pub suite: SuiteSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: None,
            seed: 0,
            model: ModelSection::default(),
            bandstructure: BandSection::default(),
            gapscan: GapScanSection::default(),
            invariant: InvariantSection::default(),
            edge: EdgeSection::default(),
            junction: DiracJunction::default(),
            junction_run: JunctionRun::default(),
            conductivity: ConductivitySection::default(),
            table: TableSection::default(),
            valley: ValleySection::default(),
            packet: PacketSection::default(),
            scatter: ScatterSection::default(),
            suite: SuiteSection::default(),
        }
    }
}

/// Parses `text`, applies `key=value` overrides and rejects unknown keys.
pub fn parse(text: &str, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let mut doc: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::Config(format!("TOML: {}", e.message())))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let mut unknown = vec![];
    let cfg: ExperimentConfig = serde_ignored::deserialize(toml::Value::Table(doc), |p| unknown.push(p.to_string()))
        .map_err(|e| CliError::Config(e.to_string()))?;
    if !unknown.is_empty() {
        return Err(CliError::Config(format!("unknown keys: {}", unknown.join(", "))));
    }
    validate(&cfg)?;
    Ok(cfg)
}

pub fn load(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text, overrides)
}

fn apply_override(doc: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (key, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{item}' is not key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("bad override key '{key}'")));
    }
    // a bare word that is not valid TOML is taken as a string
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let mut table = doc;
    for seg in &path[..path.len() - 1] {
        let entry = table
            .entry(seg.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override '{key}': '{seg}' is not a table")))?;
    }
    table.insert(path[path.len() - 1].to_string(), value);
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive, got {v}")))
    }
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        Err(CliError::Config(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

/// Checks that do not need any numerics.
pub fn validate(c: &ExperimentConfig) -> Result<(), CliError> {
    c.model.params()?;
    let g = &c.junction.geom;
    JunctionGeometry::new(g.k, g.eps_r, g.theta0, g.theta1)?;
    positive("junction.lx", c.junction.lx)?;
    positive("junction.ly", c.junction.ly)?;
    positive("junction.mass_width", c.junction.mass_width)?;
    positive("junction_run.e0", c.junction_run.e0)?;
    positive("junction_run.delta", c.junction_run.delta)?;
    if c.bandstructure.points < 2 || c.edge.points < 2 {
        return Err(CliError::Config("sweeps need at least two points".into()));
    }
    if c.edge.xi_min >= c.edge.xi_max {
        return Err(CliError::Config("edge.xi_min must be below edge.xi_max".into()));
    }
    if c.invariant.n == 0 || c.gapscan.samples == 0 || c.gapscan.n == 0 {
        return Err(CliError::Config("grid sizes must be positive".into()));
    }
    positive("invariant.radius", c.invariant.radius)?;
    positive("invariant.map_radius", c.invariant.map_radius)?;
    if c.suite.only.iter().any(|&k| !(1..=10).contains(&k)) {
        return Err(CliError::Config("suite.only entries must be in 1..=10".into()));
    }
    positive("edge.strip.ly", c.edge.strip.ly)?;
    if c.edge.strip.ky == 0 || c.conductivity.n == 0 || c.packet.n == 0 {
        return Err(CliError::Config("cutoffs must be positive".into()));
    }
    nonempty("conductivity.x0", &c.conductivity.x0)?;
    nonempty("table.x0", &c.table.x0)?;
    nonempty("table.n", &c.table.n)?;
    if c.table.n.contains(&0) {
        return Err(CliError::Config("table.n entries must be positive".into()));
    }
    nonempty("packet.times", &c.packet.times)?;
    positive("packet.packet.width", c.packet.packet.width)?;
    positive("packet.packet.transverse", c.packet.packet.transverse)?;
    positive("packet.packet.window", c.packet.packet.window)?;
    nonempty("scatter.k", &c.scatter.k)?;
    nonempty("scatter.x0", &c.scatter.x0)?;
    positive("scatter.a", c.scatter.a)?;
    positive("scatter.cells_per_unit", c.scatter.cells_per_unit)?;
    for &k in &c.scatter.k {
        positive("scatter.k", k)?;
    }
    positive("valley.run.e0", c.valley.run.e0)?;
    positive("valley.eps", c.valley.eps)?;
    nonempty("valley.v0", &c.valley.v0)?;
    nonempty("valley.x0", &c.valley.x0)?;
    match c.valley.mode {
        ValleyMode::Omega => {
            nonempty("valley.omega", &c.valley.omega)?;
            if c.valley.kind != ValleyKind::H2eps {
                return Err(CliError::Config("valley.mode = omega needs kind = h2eps".into()));
            }
        }
        ValleyMode::Energy => {
            nonempty("valley.energy", &c.valley.energy)?;
            if c.valley.kind == ValleyKind::H2eps {
                return Err(CliError::Config("valley.mode = energy needs kind = h2 or h4".into()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_all_defaults() {
        assert_eq!(parse("", &[]).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = parse(
            "[model]\nomega = 2.0\n",
            &["model.lambda=0.5".into(), "junction.geom.k=3".into(), "valley.kind=h4".into(), "valley.mode=energy".into()],
        )
        .unwrap();
        assert_eq!(c.model.omega, 2.0);
        assert_eq!(c.model.lambda, 0.5);
        assert_eq!(c.valley.kind, ValleyKind::H4);
    }

    #[test]
    fn unknown_and_invalid_keys_are_config_errors() {
        assert!(matches!(parse("[model]\nomegga = 1.0\n", &[]), Err(CliError::Config(_))));
        assert!(matches!(parse("[model]\neta = 3\n", &[]), Err(CliError::Config(_))));
        assert!(matches!(parse("seed = \"x\"", &[]), Err(CliError::Config(_))));
        assert!(matches!(parse("", &["nokey".into()]), Err(CliError::Config(_))));
        assert!(matches!(parse("[junction.geom]\neps_r = 2.0\n", &[]), Err(CliError::Config(_))));
    }

    #[test]
    fn echo_round_trips() {
        let c = parse("experiment = \"steer\"\n[packet]\nn = 12\n", &[]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
