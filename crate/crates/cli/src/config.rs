//! Run configuration: defaults, TOML file, flags and presets, applied in
//! that order.

use std::path::Path;

use serde::{Deserialize, Serialize};
use vsys_core::physics::ExperimentalInputs;
use vsys_core::{DetectorKind, SystemParams, Variant};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Table1,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Table1 => "table1",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub variant: String,
    /// Decay rate in rad/s, for reporting SI times.
    pub gamma_si: Option<f64>,
    pub nbar: f64,
    pub delta_over_gamma: f64,
    pub t_end_over_tau: f64,
    pub samples: usize,
    pub detectors: Vec<String>,
    pub seed_preset: Option<Preset>,
    /// Dipole alignment for the isotropic variants.
    pub alignment: f64,
    /// Δ/γ values for `scan`.
    pub deltas: Vec<f64>,
    /// Fields the preset replaced, as `field: old -> new`.
    #[serde(skip)]
    pub preset_overrides: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            variant: "ns-vec".into(),
            gamma_si: None,
            nbar: 0.0633,
            delta_over_gamma: 12.0,
            t_end_over_tau: 10.0,
            samples: 501,
            detectors: DetectorKind::NAMED
                .iter()
                .map(|k| k.name().to_string())
                .collect(),
            seed_preset: None,
            alignment: 0.0,
            deltas: vec![0.012, 1.0, 12.0],
            preset_overrides: Vec::new(),
        }
    }
}

/// Field values a flag may set; `None` leaves the config alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub variant: Option<String>,
    pub gamma_si: Option<f64>,
    pub nbar: Option<f64>,
    pub delta_over_gamma: Option<f64>,
    pub t_end_over_tau: Option<f64>,
    pub samples: Option<usize>,
    pub detectors: Option<Vec<String>>,
    pub preset: Option<Preset>,
    pub alignment: Option<f64>,
    pub deltas: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config file: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Defaults, then the optional file, then flags, then the preset.
    pub fn resolve(file: Option<&Path>, flags: Overrides) -> CliResult<Self> {
        let mut cfg = match file {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        cfg.apply(flags);
        if let Some(p) = cfg.seed_preset {
            cfg.apply_preset(p)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: Overrides) {
        macro_rules! set {
            ($($f:ident <- $src:ident),*) => {
                $(if let Some(v) = o.$src { self.$f = v; })*
            };
        }
        set!(
            variant <- variant,
            nbar <- nbar,
            delta_over_gamma <- delta_over_gamma,
            t_end_over_tau <- t_end_over_tau,
            samples <- samples,
            detectors <- detectors,
            alignment <- alignment,
            deltas <- deltas
        );
        if o.gamma_si.is_some() {
            self.gamma_si = o.gamma_si;
        }
        if o.preset.is_some() {
            self.seed_preset = o.preset;
        }
    }

    pub fn apply_preset(&mut self, preset: Preset) -> CliResult<()> {
        let (delta, gamma_si) = match preset {
            Preset::Fig2 => (12.0, None),
            Preset::Fig3 => (0.012, None),
            Preset::Fig4 => (1.0, None),
            Preset::Table1 => {
                let si = ExperimentalInputs::calcium_table().si_rates()?;
                (si.delta / si.gamma, Some(si.gamma))
            }
        };
        let mut record = |field: &str, old: String, new: String| {
            if old != new {
                self.preset_overrides
                    .push(format!("{field}: {old} -> {new}"));
            }
        };
        record(
            "delta_over_gamma",
            self.delta_over_gamma.to_string(),
            delta.to_string(),
        );
        record("nbar", self.nbar.to_string(), 0.0633.to_string());
        if gamma_si.is_some() {
            record(
                "gamma_si",
                format!("{:?}", self.gamma_si),
                format!("{gamma_si:?}"),
            );
        }
        self.delta_over_gamma = delta;
        self.nbar = 0.0633;
        if gamma_si.is_some() {
            self.gamma_si = gamma_si;
        }
        self.seed_preset = Some(preset);
        Ok(())
    }

    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.samples < 2 {
            return bad(format!("samples must be >= 2, got {}", self.samples));
        }
        if !(self.t_end_over_tau > 0.0) || !self.t_end_over_tau.is_finite() {
            return bad(format!(
                "t_end_over_tau must be > 0, got {}",
                self.t_end_over_tau
            ));
        }
        if !(self.nbar >= 0.0) || !self.nbar.is_finite() {
            return bad(format!("nbar must be >= 0, got {}", self.nbar));
        }
        if !(self.delta_over_gamma >= 0.0) || !self.delta_over_gamma.is_finite() {
            return bad(format!(
                "delta_over_gamma must be >= 0, got {}",
                self.delta_over_gamma
            ));
        }
        if !(0.0..=1.0).contains(&self.alignment) {
            return bad(format!(
                "alignment must lie in [0, 1], got {}",
                self.alignment
            ));
        }
        if let Some(g) = self.gamma_si {
            if !(g > 0.0) || !g.is_finite() {
                return bad(format!("gamma_si must be > 0, got {g}"));
            }
        }
        self.variant()?;
        self.detector_kinds()?;
        if self.deltas.is_empty() {
            return bad("deltas must not be empty".into());
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
            return bad(format!("deltas must be >= 0, got {d}"));
        }
        Ok(())
    }

    pub fn variant(&self) -> CliResult<Variant> {
        Variant::from_tag(&self.variant).ok_or_else(|| {
            let known: Vec<_> = Variant::ALL.iter().map(|v| v.tag()).collect();
            CliError::Config(format!(
                "unknown variant {:?}; expected one of {}",
                self.variant,
                known.join(", ")
            ))
        })
    }

    pub fn detector_kinds(&self) -> CliResult<Vec<DetectorKind>> {
        self.detectors
            .iter()
            .map(|n| {
                DetectorKind::from_name(n).ok_or_else(|| {
                    CliError::Config(format!(
                        "unknown detector {n:?}; expected full, A, A', B, B'"
                    ))
                })
            })
            .collect()
    }

    /// Dimensionless parameters (γ = 1) at splitting `delta_over_gamma`.
    pub fn params_at(&self, delta_over_gamma: f64) -> CliResult<SystemParams<f64>> {
        Ok(SystemParams::from_nbar(1.0, delta_over_gamma, self.nbar)?)
    }

    pub fn params(&self) -> CliResult<SystemParams<f64>> {
        self.params_at(self.delta_over_gamma)
    }
}
