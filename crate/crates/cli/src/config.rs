use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use kgpilot::classical::{ClassicalState, PotentialSpec, Sector};
use kgpilot::{
    BoxConfig, Complex, InitialCondition, IntegratorConfig, ModeSpec, SpacetimeRect, VelocityLaw,
    WaveState,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Initial conditions of the loop figures.
pub const LOOP_ICS: [[f64; 2]; 5] = [
    [1.9, -0.04],
    [1.9, -0.1],
    [2.4, -0.4],
    [2.3, -0.4],
    [2.0, -0.4],
];
/// Initial conditions of the energy-flow figure.
pub const ENERGY_ICS: [[f64; 2]; 5] = [
    [1.94, -0.4],
    [2.0, -0.4],
    [2.14, -0.4],
    [2.3, -0.4],
    [2.4, -0.4],
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Parameter bundles for the seven reference figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl Preset {
    pub fn apply(self, cfg: &mut RunConfig) {
        let base = RunConfig::default();
        cfg.length = base.length;
        cfg.rest_mass = base.rest_mass;
        cfg.modes = base.modes;
        cfg.t = base.t;
        let (law, ics, dyad) = match self {
            Preset::Fig1 => (VelocityLaw::DeBroglie, vec![], false),
            Preset::Fig2 => (VelocityLaw::DeBroglie, LOOP_ICS.to_vec(), false),
            Preset::Fig3 => (VelocityLaw::DeBroglie, vec![LOOP_ICS[0]], true),
            Preset::Fig4 => (VelocityLaw::ModifiedAbs, vec![], false),
            Preset::Fig5 => (VelocityLaw::ModifiedAbs, LOOP_ICS.to_vec(), false),
            Preset::Fig6 => (VelocityLaw::EnergyFlow, vec![], false),
            Preset::Fig7 => (VelocityLaw::EnergyFlow, ENERGY_ICS.to_vec(), false),
        };
        cfg.law = law;
        if !ics.is_empty() {
            cfg.ics = ics;
        }
        cfg.dyad = dyad;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub n: u32,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassicalConfig {
    pub x0: f64,
    pub p0: f64,
    pub zeta: i64,
    pub charge: f64,
    pub mass: f64,
    pub potential: PotentialSpec<f64>,
    pub x_span: f64,
    /// Also run the opposite sector with opposite charge.
    pub conjugate: bool,
}

impl Default for ClassicalConfig {
    fn default() -> Self {
        Self {
            x0: 0.0,
            p0: 0.0,
            zeta: 1,
            charge: 1.0,
            mass: 1.0,
            potential: PotentialSpec::ConstantElectric { field: 1.0 },
            x_span: 5.0,
            conjugate: false,
        }
    }
}

/// Everything a run needs; serializable so the written copy reproduces it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "m0")]
    pub rest_mass: f64,
    pub modes: Vec<ModeEntry>,
    pub t: f64,
    pub x_min: f64,
    /// Defaults to `L`.
    pub x_max: Option<f64>,
    pub grid_n: usize,
    pub law: VelocityLaw,
    pub ics: Vec<[f64; 2]>,
    pub preset: Option<Preset>,
    pub tau_span: f64,
    pub step: f64,
    pub max_steps: usize,
    pub eps_node: f64,
    pub eps_event: f64,
    pub dyad: bool,
    /// `[x_min, x_max, t_min, t_max]` for the flux diagnostic.
    pub rect: [f64; 4],
    pub flux_n: usize,
    pub out: PathBuf,
    pub format: Format,
    pub classical: ClassicalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let integ = IntegratorConfig::<f64>::default();
        Self {
            length: PI,
            rest_mass: 1.0,
            modes: vec![
                ModeEntry {
                    n: 1,
                    re: FRAC_1_SQRT_2,
                    im: 0.0,
                },
                ModeEntry {
                    n: 2,
                    re: FRAC_1_SQRT_2,
                    im: 0.0,
                },
            ],
            t: 0.1,
            x_min: 0.0,
            x_max: None,
            grid_n: 1024,
            law: VelocityLaw::DeBroglie,
            ics: vec![],
            preset: None,
            tau_span: integ.tau_span,
            step: integ.step,
            max_steps: integ.max_steps,
            eps_node: integ.eps_node,
            eps_event: integ.eps_event,
            dyad: false,
            rect: [1.5, 2.5, 0.0, 0.2],
            flux_n: 2000,
            out: PathBuf::from("out"),
            format: Format::Csv,
            classical: ClassicalConfig::default(),
        }
    }
}

/// Command-line overrides; every field left `None` keeps the file or default value.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Box length.
    #[arg(long = "L", value_name = "L")]
    pub length: Option<f64>,
    /// Rest mass.
    #[arg(long)]
    pub m0: Option<f64>,
    /// Mode list "n:re,im[;n:re,im...]".
    #[arg(long, allow_hyphen_values = true)]
    pub modes: Option<String>,
    /// Coordinate time of scans and diagnostics.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Guidance law: debroglie, modified or energy.
    #[arg(long, value_parser = VelocityLaw::from_str)]
    pub law: Option<VelocityLaw>,
    /// Initial conditions "x0,t0[;x0,t0...]".
    #[arg(long, allow_hyphen_values = true)]
    pub ic: Option<String>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub tau_span: Option<f64>,
    /// Integration step (flow parameter or physical time).
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub max_steps: Option<usize>,
    #[arg(long)]
    pub eps_node: Option<f64>,
    #[arg(long)]
    pub eps_event: Option<f64>,
    /// Transport a dyad along each trajectory.
    #[arg(long)]
    pub dyad: bool,
    /// Flux rectangle "x_min,x_max,t_min,t_max".
    #[arg(long, allow_hyphen_values = true)]
    pub rect: Option<String>,
    #[arg(long)]
    pub flux_n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub x0: Option<f64>,
    #[arg(long)]
    pub p0: Option<f64>,
    #[arg(long)]
    pub zeta: Option<i64>,
    #[arg(long)]
    pub charge: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Classical potential: zero or electric.
    #[arg(long)]
    pub potential: Option<String>,
    /// Field strength for the electric potential.
    #[arg(long)]
    pub field: Option<f64>,
    #[arg(long)]
    pub x_span: Option<f64>,
    /// Run the conjugate sector alongside.
    #[arg(long)]
    pub conjugate: bool,
}

fn parse_floats(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("bad number '{p}' in {what}")))
        })
        .collect()
}

fn groups(s: &str) -> impl Iterator<Item = &str> {
    s.split(';').map(str::trim).filter(|g| !g.is_empty())
}

pub fn parse_modes(s: &str) -> Result<Vec<ModeEntry>, CliError> {
    groups(s)
        .map(|g| {
            let (n, amp) = g
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("mode '{g}' is not n:re,im")))?;
            let n = n
                .trim()
                .parse::<u32>()
                .map_err(|_| CliError::Config(format!("bad mode number in '{g}'")))?;
            match parse_floats(amp, "--modes")?.as_slice() {
                [re] => Ok(ModeEntry {
                    n,
                    re: *re,
                    im: 0.0,
                }),
                [re, im] => Ok(ModeEntry {
                    n,
                    re: *re,
                    im: *im,
                }),
                _ => Err(CliError::Config(format!("mode '{g}' needs re or re,im"))),
            }
        })
        .collect()
}

pub fn parse_ics(s: &str) -> Result<Vec<[f64; 2]>, CliError> {
    groups(s)
        .map(|g| match parse_floats(g, "--ic")?.as_slice() {
            [x, t] => Ok([*x, *t]),
            _ => Err(CliError::Config(format!(
                "initial condition '{g}' is not x0,t0"
            ))),
        })
        .collect()
}

pub fn parse_rect(s: &str) -> Result<[f64; 4], CliError> {
    match parse_floats(s, "--rect")?.as_slice() {
        [a, b, c, d] => Ok([*a, *b, *c, *d]),
        _ => Err(CliError::Config(
            "--rect needs x_min,x_max,t_min,t_max".into(),
        )),
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Defaults, then the config file, then the preset, then explicit flags.
    pub fn resolve(o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &o.config {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        if let Some(p) = o.preset {
            cfg.preset = Some(p);
        }
        if let Some(p) = cfg.preset {
            p.apply(&mut cfg);
        }
        macro_rules! set {
            ($($field:ident <- $flag:ident),* $(,)?) => {$(
                if let Some(v) = o.$flag.clone() { cfg.$field = v; }
            )*};
        }
        set!(length <- length, rest_mass <- m0, t <- t, x_min <- x_min, grid_n <- grid_n, law <- law,
             tau_span <- tau_span, step <- step, max_steps <- max_steps, eps_node <- eps_node,
             eps_event <- eps_event, flux_n <- flux_n, out <- out, format <- format);
        if o.x_max.is_some() {
            cfg.x_max = o.x_max;
        }
        if let Some(m) = &o.modes {
            cfg.modes = parse_modes(m)?;
        }
        if let Some(ic) = &o.ic {
            cfg.ics = parse_ics(ic)?;
        }
        if let Some(r) = &o.rect {
            cfg.rect = parse_rect(r)?;
        }
        cfg.dyad |= o.dyad;
        let c = &mut cfg.classical;
        c.x0 = o.x0.unwrap_or(c.x0);
        c.p0 = o.p0.unwrap_or(c.p0);
        c.zeta = o.zeta.unwrap_or(c.zeta);
        c.charge = o.charge.unwrap_or(c.charge);
        c.mass = o.mass.unwrap_or(c.mass);
        c.x_span = o.x_span.unwrap_or(c.x_span);
        c.conjugate |= o.conjugate;
        match (o.potential.as_deref(), o.field) {
            (Some("zero"), _) => c.potential = PotentialSpec::Zero,
            (Some("electric"), f) => {
                c.potential = PotentialSpec::ConstantElectric {
                    field: f.unwrap_or(1.0),
                }
            }
            (Some(other), _) => {
                return Err(CliError::Config(format!(
                    "unknown potential '{other}', expected zero or electric"
                )))
            }
            (None, Some(f)) => c.potential = PotentialSpec::ConstantElectric { field: f },
            (None, None) => {}
        }
        Ok(cfg)
    }

    pub fn state(&self) -> Result<WaveState<f64>, CliError> {
        let cfg = BoxConfig::new(self.length, self.rest_mass)?;
        let modes = self
            .modes
            .iter()
            .map(|m| ModeSpec::new(m.n, Complex::new(m.re, m.im)))
            .collect();
        Ok(WaveState::new(cfg, modes)?)
    }

    pub fn x_range(&self) -> Result<(f64, f64), CliError> {
        let hi = self.x_max.unwrap_or(self.length);
        if !(self.x_min >= 0.0 && hi <= self.length && self.x_min < hi) {
            return Err(CliError::Config(format!(
                "scan range [{}, {hi}] must lie inside [0, {}]",
                self.x_min, self.length
            )));
        }
        if self.grid_n < 2 {
            return Err(CliError::Config("grid_n must be >= 2".into()));
        }
        Ok((self.x_min, hi))
    }

    pub fn integrator(&self) -> Result<IntegratorConfig<f64>, CliError> {
        let cfg = IntegratorConfig {
            step: self.step,
            max_steps: self.max_steps,
            eps_node: self.eps_node,
            eps_event: self.eps_event,
            tau_span: self.tau_span,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn initial_conditions(&self) -> Result<Vec<InitialCondition<f64>>, CliError> {
        if self.ics.is_empty() {
            return Err(CliError::Config(
                "no initial conditions: pass --ic or a trajectory preset".into(),
            ));
        }
        self.ics
            .iter()
            .map(|&[x, t]| {
                if x.is_finite() && t.is_finite() {
                    Ok(InitialCondition::new(x, t))
                } else {
                    Err(CliError::Config("initial conditions must be finite".into()))
                }
            })
            .collect()
    }

    pub fn flux_rect(&self) -> SpacetimeRect<f64> {
        let [a, b, c, d] = self.rect;
        SpacetimeRect::new(a, b, c, d)
    }

    pub fn classical_state(&self) -> Result<ClassicalState<f64>, CliError> {
        let c = &self.classical;
        Ok(ClassicalState {
            x: c.x0,
            momentum: c.p0,
            sector: Sector::from_zeta(c.zeta)?,
            time: 0.0,
            charge: c.charge,
            mass: c.mass,
        })
    }
}
