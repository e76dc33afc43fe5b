//! JSON problem descriptions consumed by the command-line front end.
//!
//! A config names a task and carries the fragments that task needs: a prior
//! and an objective for the solver and oracle tasks, a media environment for
//! the censorship task, and a sweep family for curve dumps. Fragments build
//! into the solver-facing types with field-qualified diagnostics, so a bad
//! number in a file is reported by the path that holds it.

use serde::Deserialize;

use crate::censorship::{MediaEnvironment, Outlets};
use crate::error::{Error, Result};
use crate::objective::ObjectiveFn;
use crate::prior::{ContinuousPrior, DiscretePrior, Prior};

/// What a single invocation computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    SolveDiscrete,
    SolveContinuous,
    Censorship,
    Oracle,
    Sweep,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::SolveDiscrete => "solve_discrete",
            Task::SolveContinuous => "solve_continuous",
            Task::Censorship => "censorship",
            Task::Oracle => "oracle",
            Task::Sweep => "sweep",
        }
    }
}

/// State distribution fragment.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PriorConfig {
    Discrete {
        support: Vec<f64>,
        probs: Vec<f64>,
    },
    PiecewiseUniform {
        pieces: Vec<(f64, f64, f64)>,
    },
    PiecewiseLinear {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
    BetaMixture {
        components: Vec<(f64, f64, f64)>,
    },
}

impl PriorConfig {
    pub fn build(&self, field: &str) -> Result<Prior> {
        let built = match self {
            PriorConfig::Discrete { support, probs } => {
                DiscretePrior::new(support.clone(), probs.clone()).map(Prior::Discrete)
            }
            PriorConfig::PiecewiseUniform { pieces } => {
                ContinuousPrior::piecewise_uniform(pieces).map(Prior::Continuous)
            }
            PriorConfig::PiecewiseLinear { knots, values } => {
                ContinuousPrior::piecewise_linear(knots, values).map(Prior::Continuous)
            }
            PriorConfig::BetaMixture { components } => {
                ContinuousPrior::beta_mixture(components).map(Prior::Continuous)
            }
        };
        built.map_err(|e| Error::ConfigInvalid(format!("{field}: {e}")))
    }

    pub fn build_discrete(&self, field: &str) -> Result<DiscretePrior> {
        match self.build(field)? {
            Prior::Discrete(p) => Ok(p),
            Prior::Continuous(_) => Err(Error::ConfigInvalid(format!(
                "{field}: task needs a discrete prior, got a continuous one"
            ))),
        }
    }

    pub fn build_continuous(&self, field: &str) -> Result<ContinuousPrior> {
        match self.build(field)? {
            Prior::Continuous(p) => Ok(p),
            Prior::Discrete(_) => Err(Error::ConfigInvalid(format!(
                "{field}: task needs a continuous prior, got a discrete one"
            ))),
        }
    }
}

/// Payoff-function fragment. The optional `affine` pair `[a, b]` adds
/// `a*m + b` on top of the named family.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveConfig {
    Polynomial {
        coeffs: Vec<f64>,
        #[serde(default)]
        affine: Option<(f64, f64)>,
    },
    SFamily {
        #[serde(rename = "omega_M")]
        omega_m: f64,
        #[serde(default)]
        affine: Option<(f64, f64)>,
    },
    MFamily {
        #[serde(rename = "omega_L")]
        omega_l: f64,
        #[serde(rename = "omega_R")]
        omega_r: f64,
        #[serde(default)]
        affine: Option<(f64, f64)>,
    },
}

impl ObjectiveConfig {
    pub fn build(&self, field: &str) -> Result<ObjectiveFn> {
        let (base, affine) = match self {
            ObjectiveConfig::Polynomial { coeffs, affine } => {
                (ObjectiveFn::polynomial(coeffs), affine)
            }
            ObjectiveConfig::SFamily { omega_m, affine } => (ObjectiveFn::s_family(*omega_m), affine),
            ObjectiveConfig::MFamily {
                omega_l,
                omega_r,
                affine,
            } => (ObjectiveFn::m_family(*omega_l, *omega_r), affine),
        };
        let base = base.map_err(|e| Error::ConfigInvalid(format!("{field}: {e}")))?;
        Ok(match affine {
            Some((a, b)) => base.with_affine(*a, *b),
            None => base,
        })
    }
}

/// Outlet set fragment: a position list, or the string `"continuum"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum OutletsConfig {
    Finite(Vec<f64>),
    Marker(String),
}

impl OutletsConfig {
    pub fn build(&self, field: &str) -> Result<Outlets> {
        match self {
            OutletsConfig::Finite(cuts) => Ok(Outlets::Finite(cuts.clone())),
            OutletsConfig::Marker(s) if s == "continuum" => Ok(Outlets::Continuum),
            OutletsConfig::Marker(s) => Err(Error::ConfigInvalid(format!(
                "{field}: expected an outlet list or \"continuum\", got \"{s}\""
            ))),
        }
    }
}

/// Media environment fragment for the censorship task.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentConfig {
    pub quality: PriorConfig,
    pub citizens: ObjectiveConfig,
    pub outlets: OutletsConfig,
}

impl EnvironmentConfig {
    pub fn build(&self, field: &str) -> Result<MediaEnvironment> {
        let quality = self.quality.build_continuous(&format!("{field}.quality"))?;
        let citizens = self.citizens.build(&format!("{field}.citizens"))?;
        let outlets = self.outlets.build(&format!("{field}.outlets"))?;
        MediaEnvironment::new(quality, citizens, outlets)
            .map_err(|e| Error::ConfigInvalid(format!("{field}: {e}")))
    }
}

/// Curve family for the sweep task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    /// Stochastic upper-censorship walk: rows of (z, m, W, delta).
    UcZ,
    /// Cutoff-rule value over the state space: rows of (omega, value).
    Cutoff,
    /// Every censorship policy of a finite environment: rows of
    /// (bitmask, value).
    CensorshipPolicies,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: SweepFamily,
    /// Number of grid rows for the gridded families.
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    1000
}

/// Optional numeric overrides. Absent fields keep solver defaults.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Agreement threshold when a report compares two methods.
    #[serde(default)]
    pub value: Option<f64>,
}

/// Output file names, resolved against the output directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

/// A full problem description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub task: Task,
    #[serde(default)]
    pub prior: Option<PriorConfig>,
    #[serde(default)]
    pub objective: Option<ObjectiveConfig>,
    #[serde(default)]
    pub environment: Option<EnvironmentConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    /// Seed for any config-driven instance generation; plain solves ignore
    /// it but accept it so batch configs stay uniform.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

impl ProblemConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ProblemConfig = serde_json::from_str(text)
            .map_err(|e| Error::ConfigInvalid(format!("malformed config JSON: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Structural checks only; fragment contents are validated when built.
    pub fn validate(&self) -> Result<()> {
        let need = |present: bool, field: &str| {
            if present {
                Ok(())
            } else {
                Err(Error::ConfigInvalid(format!(
                    "{field}: required for task \"{}\"",
                    self.task.as_str()
                )))
            }
        };
        match self.task {
            Task::SolveDiscrete | Task::SolveContinuous | Task::Oracle => {
                need(self.prior.is_some(), "prior")?;
                need(self.objective.is_some(), "objective")?;
            }
            Task::Censorship => need(self.environment.is_some(), "environment")?,
            Task::Sweep => {
                let sweep = self.sweep.as_ref();
                need(sweep.is_some(), "sweep")?;
                match sweep.expect("checked above").family {
                    SweepFamily::UcZ | SweepFamily::Cutoff => {
                        need(self.prior.is_some(), "prior")?;
                        need(self.objective.is_some(), "objective")?;
                    }
                    SweepFamily::CensorshipPolicies => {
                        need(self.environment.is_some(), "environment")?;
                    }
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.grid == 0 {
                return Err(Error::ConfigInvalid("sweep.grid: must be at least 1".into()));
            }
        }
        if let Some(tol) = &self.tolerances {
            if let Some(value) = tol.value {
                if !(value > 0.0) {
                    return Err(Error::ConfigInvalid(format!(
                        "tolerances.value: must be positive, got {value}"
                    )));
                }
            }
        }
        Ok(())
    }
}
