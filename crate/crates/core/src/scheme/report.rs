//! Machine-readable summary of the predicates evaluated on one section.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gf::Fe;
use crate::homog::text::format_poly;
use crate::homog::HomogPoly;

use super::predicates::{
    is_good_section, is_irreducible_section, is_normal_r1_section, is_reduced_section, is_smooth_section,
    SectionProblem, SmoothMode, Verdict,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Smooth,
    Reduced,
    Irreducible,
    GeometricallyIrreducible,
    NormalR1,
    G1,
    G2,
    G3,
}

impl Predicate {
    pub const ALL: [Predicate; 8] = [
        Predicate::Smooth,
        Predicate::Reduced,
        Predicate::Irreducible,
        Predicate::GeometricallyIrreducible,
        Predicate::NormalR1,
        Predicate::G1,
        Predicate::G2,
        Predicate::G3,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionReport {
    pub f: String,
    pub flags: BTreeMap<Predicate, Verdict>,
}

impl SectionReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Evaluates the requested predicates; the rest are reported as not evaluated.
pub fn section_report(problem: &SectionProblem, f: &HomogPoly<Fe>, wanted: &[Predicate]) -> Result<SectionReport> {
    let k = problem.x.field();
    let mut flags = BTreeMap::new();
    for p in Predicate::ALL {
        flags.insert(p, Verdict::not_evaluated());
    }
    let good = if wanted.iter().any(|p| matches!(p, Predicate::G1 | Predicate::G2 | Predicate::G3)) {
        Some(is_good_section(problem, f)?)
    } else {
        None
    };
    for &p in wanted {
        let v = match p {
            Predicate::Smooth => is_smooth_section(&problem.x, f, SmoothMode::Exact)?,
            Predicate::Reduced => is_reduced_section(k, f)?,
            Predicate::Irreducible => is_irreducible_section(k, f, false)?,
            Predicate::GeometricallyIrreducible => is_irreducible_section(k, f, true)?,
            Predicate::NormalR1 => is_normal_r1_section(k, f)?,
            Predicate::G1 => good.as_ref().expect("computed").g1.clone(),
            Predicate::G2 => good.as_ref().expect("computed").g2.clone(),
            Predicate::G3 => good.as_ref().expect("computed").g3.clone(),
        };
        flags.insert(p, v);
    }
    Ok(SectionReport {
        f: format_poly(k, f),
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::homog::text::parse_poly;
    use crate::scheme::Flag;

    #[test]
    fn report_round_trips_through_json() {
        let k = make_field(2, 1).unwrap();
        let problem = SectionProblem::projective_space(&k, 2);
        let f = parse_poly(&k, 2, "x0^2 + x1*x2", None).unwrap();
        let r = section_report(&problem, &f, &[Predicate::Smooth, Predicate::Irreducible]).unwrap();
        assert!(r.flags[&Predicate::Smooth].is_true());
        assert_eq!(r.flags[&Predicate::NormalR1].flag, Flag::NotEvaluated);
        let json = r.to_json().unwrap();
        assert!(json.contains("\"geometrically_irreducible\""));
        let back: SectionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}
