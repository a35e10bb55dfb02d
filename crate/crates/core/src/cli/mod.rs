//! Config-driven experiment runner.
//!
//! A config is one flat JSON object (schema in `schemas/experiment.schema.json`).
//! Unknown keys are rejected before anything is computed. Exit codes:
//! `0` all scheduled tolerances met with no inconclusive verdicts, `1` a
//! tolerance or verification failure, `2` an invalid config, `3` an
//! enumeration cap exceeded (see [`crate::caps`] for the override variables).

mod run;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::density::ToleranceSchedule;
use crate::dvr::LiftPredicate;
use crate::error::{Error, Result};
use crate::zeta::Shape;

pub use run::{run, run_config, Artifacts, Overrides, RunOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Avoidance,
    SmoothDensity,
    TaylorDensity,
    SncDensity,
    IrreducibilityDensity,
    IntegralityDensity,
    NormalDensity,
    Containment,
    DvrLift,
    ZetaTable,
}

impl Kind {
    pub fn name(self) -> &'static str {
        registry().iter().find(|e| e.kind == self).map(|e| e.name).expect("every kind is registered")
    }

    pub fn is_census(self) -> bool {
        !matches!(self, Kind::DvrLift | Kind::ZetaTable)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    #[serde(default = "one")]
    pub s: u32,
}

fn one() -> u32 {
    1
}

/// A subscheme of `P^n` over `F_q`: closed points written `[a:b:c]` or
/// `[a:b:c]@r`, or ideal generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Block {
    Points(Vec<String>),
    Ideal(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeRange {
    pub lo: usize,
    pub hi: usize,
}

/// Settings for `dvr_lift`. Forms and points are written over
/// `A = F_q[t]_(t)`, with `t` as the uniformizer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSpec {
    /// Generators of `X` over `A`; empty for `P^n_A`.
    #[serde(default)]
    pub x: Vec<String>,
    /// Sections `[a:b:c]` that every lift must contain.
    #[serde(default)]
    pub z: Vec<String>,
    pub d: usize,
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default = "default_t_degree")]
    pub t_degree: usize,
    pub predicates: Vec<LiftPredicate>,
    #[serde(default)]
    pub special_budget: Option<u64>,
    #[serde(default)]
    pub lift_budget: Option<u64>,
}

fn default_count() -> usize {
    5
}

fn default_t_degree() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub name: Option<String>,
    pub field: FieldSpec,
    pub n: usize,
    /// Ambient variety; all of `P^n` when absent.
    #[serde(default)]
    pub x: Option<Block>,
    /// Imposed containment: the census runs over `I^Z_d`.
    #[serde(default)]
    pub z: Option<Block>,
    /// Points to avoid (`avoidance`) or subscheme to contain (`containment`).
    #[serde(default)]
    pub w: Option<Block>,
    /// Rational points carrying the Taylor condition `f|_Y = 0`.
    #[serde(default)]
    pub y: Option<Block>,
    /// Divisor components for `snc_density`.
    #[serde(default)]
    pub components: Vec<Block>,
    #[serde(default)]
    pub degrees: Option<DegreeRange>,
    /// Euler product truncation `B`.
    #[serde(default)]
    pub truncation: Option<usize>,
    /// Zeta argument for `zeta_table`; `dim X + 1` when absent.
    #[serde(default)]
    pub s: Option<u32>,
    #[serde(default)]
    pub tolerance: Option<ToleranceSchedule>,
    /// Overrides the default prediction for the kind.
    #[serde(default)]
    pub prediction: Option<Shape>,
    /// Subsample this many forms per degree instead of enumerating.
    #[serde(default)]
    pub samples: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub max_inconclusive: Option<f64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub lift: Option<LiftSpec>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.check_shape()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    /// Structural checks that need no algebra.
    fn check_shape(&self) -> Result<()> {
        let need = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("{} requires {what}", self.kind.name())))
            }
        };
        if self.kind.is_census() {
            need(self.degrees.is_some(), "a 'degrees' block")?;
        }
        match self.kind {
            Kind::Avoidance => need(matches!(self.w, Some(Block::Points(_))), "'w' as a points block")?,
            Kind::Containment => need(self.w.is_some(), "a 'w' block")?,
            Kind::TaylorDensity => need(matches!(self.y, Some(Block::Points(_))), "'y' as a points block")?,
            Kind::SncDensity => need(!self.components.is_empty(), "at least one entry in 'components'")?,
            Kind::DvrLift => need(self.lift.is_some(), "a 'lift' block")?,
            _ => {}
        }
        if let Some(r) = self.degrees {
            if r.lo > r.hi {
                return Err(Error::Config(format!("empty degree range {}..{}", r.lo, r.hi)));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        if self.samples == Some(0) {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(())
    }
}

/// One registered experiment kind and the result it instantiates.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct KindInfo {
    pub kind: Kind,
    pub name: &'static str,
    pub anchor: &'static str,
    pub summary: &'static str,
}

pub fn registry() -> &'static [KindInfo] {
    const R: &[KindInfo] = &[
        KindInfo {
            kind: Kind::Avoidance,
            name: "avoidance",
            anchor: "avoidance lemma",
            summary: "sections missing a finite set W of closed points; exact density prod_{P in W} (1 - q^-deg P)",
        },
        KindInfo {
            kind: Kind::SmoothDensity,
            name: "smooth_density",
            anchor: "Bertini smoothness theorem",
            summary: "smooth sections X ∩ H; density 1/zeta_X(m+1), corrected at imposed points",
        },
        KindInfo {
            kind: Kind::TaylorDensity,
            name: "taylor_density",
            anchor: "Taylor conditions at finitely many points",
            summary: "sections vanishing on Y and smooth off Y; density #T/#H^0(Y,O_Y) times the product on P^n minus Y",
        },
        KindInfo {
            kind: Kind::SncDensity,
            name: "snc_density",
            anchor: "Bertini for strict normal crossings",
            summary: "sections transverse to every stratum of a strict normal crossings divisor",
        },
        KindInfo {
            kind: Kind::IrreducibilityDensity,
            name: "irreducibility_density",
            anchor: "Bertini irreducibility theorem",
            summary: "irreducible sections of an irreducible X of dimension >= 2; density 1",
        },
        KindInfo {
            kind: Kind::IntegralityDensity,
            name: "integrality_density",
            anchor: "Bertini for geometric integrality",
            summary: "geometrically integral sections; density 1",
        },
        KindInfo {
            kind: Kind::NormalDensity,
            name: "normal_density",
            anchor: "Bertini for normality (R1 + S2)",
            summary: "sections whose singular locus has codimension >= 2",
        },
        KindInfo {
            kind: Kind::Containment,
            name: "containment",
            anchor: "containment is null",
            summary: "sections containing a positive-dimensional W; density 0",
        },
        KindInfo {
            kind: Kind::DvrLift,
            name: "dvr_lift",
            anchor: "Bertini over a discrete valuation ring",
            summary: "lifts of good special-fiber sections with good generic fiber, with certificates",
        },
        KindInfo {
            kind: Kind::ZetaTable,
            name: "zeta_table",
            anchor: "zeta function as an Euler product over closed points",
            summary: "closed-point counts b_r and the truncated 1/zeta_X(s)",
        },
    ];
    R
}

/// Lines printed by `list`.
pub fn list_experiments() -> Vec<String> {
    registry().iter().map(|e| format!("{:<24} {}: {}", e.name, e.anchor, e.summary)).collect()
}
