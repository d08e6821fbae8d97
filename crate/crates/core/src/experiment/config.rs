use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::noise::ChannelSpec;
use crate::walk::{CoinParams, Geometry, InitialState, NoisePlacement, WalkSetup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Final position distribution.
    Distribution,
    /// Mean and standard deviation of the position after every step.
    StdDevVsR,
    /// Kolmogorov distance between walks with and without `G(α)`.
    SymmetryKd,
    /// QMID at the final step, one row per sweep cell.
    QmidVsR,
    /// QMID after every step.
    QmidVsTime,
    /// QMID after every step for the cycle and for a line of equal duration.
    LineVsCycle,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Distribution => "distribution",
            ExperimentKind::StdDevVsR => "std-dev-vs-r",
            ExperimentKind::SymmetryKd => "symmetry-kd",
            ExperimentKind::QmidVsR => "qmid-vs-r",
            ExperimentKind::QmidVsTime => "qmid-vs-time",
            ExperimentKind::LineVsCycle => "line-vs-cycle",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GeometryKind {
    Line,
    Cycle,
}

/// A parameter that a sweep axis may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepParameter {
    #[serde(rename = "coin.xi")]
    CoinXi,
    #[serde(rename = "coin.theta")]
    CoinTheta,
    #[serde(rename = "coin.zeta")]
    CoinZeta,
    #[serde(rename = "init.delta")]
    InitDelta,
    #[serde(rename = "init.phi")]
    InitPhi,
    #[serde(rename = "channel.temperature")]
    Temperature,
    #[serde(rename = "channel.gamma0")]
    Gamma0,
    #[serde(rename = "channel.interaction_time")]
    InteractionTime,
    #[serde(rename = "channel.squeezing")]
    Squeezing,
    #[serde(rename = "channel.squeezing_phase")]
    SqueezingPhase,
    #[serde(rename = "channel.probability")]
    Probability,
    #[serde(rename = "sites")]
    Sites,
    #[serde(rename = "steps")]
    Steps,
    #[serde(rename = "phase_alpha")]
    PhaseAlpha,
}

impl SweepParameter {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParameter::CoinXi => "coin.xi",
            SweepParameter::CoinTheta => "coin.theta",
            SweepParameter::CoinZeta => "coin.zeta",
            SweepParameter::InitDelta => "init.delta",
            SweepParameter::InitPhi => "init.phi",
            SweepParameter::Temperature => "channel.temperature",
            SweepParameter::Gamma0 => "channel.gamma0",
            SweepParameter::InteractionTime => "channel.interaction_time",
            SweepParameter::Squeezing => "channel.squeezing",
            SweepParameter::SqueezingPhase => "channel.squeezing_phase",
            SweepParameter::Probability => "channel.probability",
            SweepParameter::Sites => "sites",
            SweepParameter::Steps => "steps",
            SweepParameter::PhaseAlpha => "phase_alpha",
        }
    }

    fn is_integer(&self) -> bool {
        matches!(self, SweepParameter::Sites | SweepParameter::Steps)
    }

    /// Writes `value` into `cfg`.
    pub fn apply(&self, cfg: &mut ExperimentConfig, value: f64) -> Result<()> {
        let field = self.name();
        if !value.is_finite() {
            return Err(Error::parameter(field, "sweep values must be finite"));
        }
        let as_count = || -> Result<usize> {
            if value < 0.0 || value.fract() != 0.0 {
                return Err(Error::parameter(field, format!("expected a non-negative integer, got {value}")));
            }
            Ok(value as usize)
        };
        let kind = cfg.channel_kind_name();
        let wrong_channel = || Error::parameter(field, format!("not defined for channel kind `{kind}`"));
        match self {
            SweepParameter::CoinXi => cfg.coin.xi = value,
            SweepParameter::CoinTheta => cfg.coin.theta = value,
            SweepParameter::CoinZeta => cfg.coin.zeta = value,
            SweepParameter::InitDelta => cfg.init.delta = value,
            SweepParameter::InitPhi => cfg.init.phi = value,
            SweepParameter::Sites => cfg.sites = Some(as_count()?),
            SweepParameter::Steps => cfg.steps = as_count()?,
            SweepParameter::PhaseAlpha => cfg.phase_alpha = Some(value),
            SweepParameter::Temperature => match &mut cfg.channel {
                ChannelSpec::Sgad(p) => p.temperature = value,
                ChannelSpec::Gad(p) => p.temperature = value,
                _ => return Err(wrong_channel()),
            },
            SweepParameter::Gamma0 => match &mut cfg.channel {
                ChannelSpec::Sgad(p) => p.gamma0 = value,
                ChannelSpec::Gad(p) => p.gamma0 = value,
                _ => return Err(wrong_channel()),
            },
            SweepParameter::InteractionTime => match &mut cfg.channel {
                ChannelSpec::Sgad(p) => p.interaction_time = value,
                ChannelSpec::Gad(p) => p.interaction_time = value,
                _ => return Err(wrong_channel()),
            },
            SweepParameter::Squeezing => match &mut cfg.channel {
                ChannelSpec::Sgad(p) => p.squeezing = value,
                _ => return Err(wrong_channel()),
            },
            SweepParameter::SqueezingPhase => match &mut cfg.channel {
                ChannelSpec::Sgad(p) => p.squeezing_phase = value,
                _ => return Err(wrong_channel()),
            },
            SweepParameter::Probability => match &mut cfg.channel {
                ChannelSpec::BitFlip { probability } | ChannelSpec::PhaseFlip { probability } => {
                    *probability = value
                }
                _ => return Err(wrong_channel()),
            },
        }
        Ok(())
    }

    pub fn format_value(&self, value: f64) -> String {
        if self.is_integer() {
            format!("{}", value as i64)
        } else {
            format!("{value}")
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

fn default_output() -> String {
    "runs".to_string()
}

/// One declarative experiment. See the README for the file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub geometry: GeometryKind,
    pub steps: usize,
    /// Cycle size; required for cycles, rejected for lines.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sites: Option<usize>,
    #[serde(default)]
    pub placement: NoisePlacement,
    /// Phase-gate angle in degrees (symmetry experiments).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_alpha: Option<f64>,
    /// Also report `½‖ρ − Π(ρ)‖₁` next to QMID values.
    #[serde(default)]
    pub report_distance: bool,
    /// Root directory for run outputs.
    #[serde(default = "default_output")]
    pub output: String,
    #[serde(default)]
    pub coin: CoinParams,
    #[serde(default)]
    pub init: InitialState,
    #[serde(default)]
    pub channel: ChannelSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
}

/// One point of a sweep: the assignments and the fully resolved config.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepCell {
    pub index: usize,
    pub assignment: Vec<(SweepParameter, f64)>,
    pub config: ExperimentConfig,
}

impl SweepCell {
    pub fn describe(&self) -> String {
        if self.assignment.is_empty() {
            return "no sweep".into();
        }
        self.assignment
            .iter()
            .map(|(p, v)| format!("{}={}", p.name(), p.format_value(*v)))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl ExperimentConfig {
    /// A config with the standard coin, initial state and placement.
    pub fn new(experiment: ExperimentKind, geometry: GeometryKind, steps: usize) -> Self {
        Self {
            experiment,
            geometry,
            steps,
            sites: None,
            placement: NoisePlacement::default(),
            phase_alpha: None,
            report_distance: false,
            output: default_output(),
            coin: CoinParams::default(),
            init: InitialState::default(),
            channel: ChannelSpec::None,
            sweep: Vec::new(),
        }
    }

    fn channel_kind_name(&self) -> &'static str {
        match self.channel {
            ChannelSpec::None => "none",
            ChannelSpec::Sgad(_) => "sgad",
            ChannelSpec::Gad(_) => "gad",
            ChannelSpec::BitFlip { .. } => "bit-flip",
            ChannelSpec::PhaseFlip { .. } => "phase-flip",
        }
    }

    /// Geometry of the walk; lines get `t_max = steps`.
    pub fn walk_geometry(&self) -> Result<Geometry> {
        match self.geometry {
            GeometryKind::Line => {
                if self.sites.is_some() {
                    return Err(Error::parameter("sites", "only applies to cycle geometry"));
                }
                Geometry::line(self.steps).map_err(|e| Error::parameter("steps", e.to_string()))
            }
            GeometryKind::Cycle => {
                let sites = self
                    .sites
                    .ok_or_else(|| Error::parameter("sites", "required for cycle geometry"))?;
                Geometry::cycle(sites).map_err(|e| Error::parameter("sites", e.to_string()))
            }
        }
    }

    pub fn walk_setup(&self) -> Result<WalkSetup> {
        Ok(WalkSetup {
            geometry: self.walk_geometry()?,
            coin: self.coin,
            init: self.init,
            channel: self.channel.build()?,
            placement: self.placement,
        })
    }

    /// Checks one resolved (sweep-free) configuration.
    fn validate_cell(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::parameter("steps", "must be at least 1"));
        }
        self.coin.validate()?;
        self.init.validate()?;
        self.walk_setup()?;
        match self.experiment {
            ExperimentKind::SymmetryKd => match self.phase_alpha {
                None => return Err(Error::parameter("phase_alpha", "required for symmetry-kd")),
                Some(a) if !a.is_finite() => return Err(Error::parameter("phase_alpha", "must be finite")),
                _ => {}
            },
            ExperimentKind::LineVsCycle if self.geometry != GeometryKind::Cycle => {
                return Err(Error::parameter(
                    "geometry",
                    "line-vs-cycle needs a cycle geometry; the line is added automatically",
                ))
            }
            _ => {}
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.output.trim().is_empty() {
            return Err(Error::parameter("output", "must not be empty"));
        }
        for (i, axis) in self.sweep.iter().enumerate() {
            if axis.values.is_empty() {
                return Err(Error::parameter(format!("sweep[{i}].values"), "must not be empty"));
            }
            if self.sweep[..i].iter().any(|a| a.parameter == axis.parameter) {
                return Err(Error::parameter(
                    format!("sweep[{i}].parameter"),
                    format!("`{}` is swept twice", axis.parameter.name()),
                ));
            }
        }
        for cell in self.cells()? {
            cell.config.validate_cell().map_err(|e| Error::SweepCell {
                cell: cell.index,
                assignment: cell.describe(),
                source: Box::new(e),
            })?;
        }
        Ok(())
    }

    /// Cartesian product of the sweep axes, first axis outermost.
    pub fn cells(&self) -> Result<Vec<SweepCell>> {
        let mut base = self.clone();
        base.sweep.clear();
        let mut cells = vec![(Vec::new(), base)];
        for axis in &self.sweep {
            let mut next = Vec::with_capacity(cells.len() * axis.values.len());
            for (assignment, cfg) in &cells {
                for &v in &axis.values {
                    let mut cfg = cfg.clone();
                    axis.parameter.apply(&mut cfg, v)?;
                    let mut a: Vec<(SweepParameter, f64)> = assignment.clone();
                    a.push((axis.parameter, v));
                    next.push((a, cfg));
                }
            }
            cells = next;
        }
        Ok(cells
            .into_iter()
            .enumerate()
            .map(|(index, (assignment, config))| SweepCell {
                index,
                assignment,
                config,
            })
            .collect())
    }

    /// SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(write_config(self).as_bytes()))
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Canonical TOML form; `parse_config(&write_config(c))` returns `c`.
pub fn write_config(cfg: &ExperimentConfig) -> String {
    toml::to_string(cfg).expect("config serializes to TOML")
}
