//! Predicates a census can count, and their compiled per-degree evaluators.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::{dim_s, HomogPoly};
use crate::ideal::{monomial_values, ClosedPoint, SubschemeSpec};
use crate::linalg;
use crate::scheme::predicates::{is_smooth_away_from, validate_snc_components};
use crate::scheme::{
    is_good_section, is_irreducible_section, is_normal_r1_section, is_reduced_section, is_smooth_section,
    is_snc_section, Flag, SectionProblem, SmoothMode, Verdict,
};

use super::f2::{self, FormSet, SmoothKernel, Smoothness};

/// Per-form outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tri {
    Hit,
    Miss,
    Inconclusive,
}

impl From<&Verdict> for Tri {
    fn from(v: &Verdict) -> Tri {
        match v.flag {
            Flag::True => Tri::Hit,
            Flag::False => Tri::Miss,
            Flag::NotEvaluated | Flag::Inconclusive => Tri::Inconclusive,
        }
    }
}

#[derive(Clone, Debug)]
pub enum CensusPredicate {
    True,
    /// `H_f` misses every listed closed point.
    Avoids(Vec<ClosedPoint>),
    /// `H_f ⊇ W`.
    Contains(SubschemeSpec),
    /// `X ∩ H_f` is smooth of dimension `dim X - 1`.
    Smooth(SubschemeSpec),
    /// `H_f` is smooth away from the listed closed points.
    SmoothAwayFrom(Vec<ClosedPoint>),
    /// `H_f` meets `U` and every stratum of the components transversally.
    Snc {
        u: SubschemeSpec,
        components: Vec<SubschemeSpec>,
    },
    Reduced,
    Irreducible,
    GeometricallyIrreducible,
    /// Geometrically reduced and geometrically irreducible.
    Integral,
    NormalR1,
    /// Conditions (1)-(3) of a good section.
    Good(Box<SectionProblem>),
    Not(Box<CensusPredicate>),
    And(Vec<CensusPredicate>),
    Or(Vec<CensusPredicate>),
}

impl CensusPredicate {
    pub fn describe(&self) -> String {
        let list = |v: &[ClosedPoint]| v.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",");
        match self {
            CensusPredicate::True => "true".into(),
            CensusPredicate::Avoids(w) => format!("avoids({})", list(w)),
            CensusPredicate::Contains(w) => match w.points() {
                Some(p) => format!("contains({})", list(p)),
                None => format!("contains({} generators)", w.ideal_gens().map(|g| g.len()).unwrap_or(0)),
            },
            CensusPredicate::Smooth(_) => "smooth".into(),
            CensusPredicate::SmoothAwayFrom(y) => format!("smooth_away_from({})", list(y)),
            CensusPredicate::Snc { components, .. } => format!("snc({} components)", components.len()),
            CensusPredicate::Reduced => "reduced".into(),
            CensusPredicate::Irreducible => "irreducible".into(),
            CensusPredicate::GeometricallyIrreducible => "geometrically_irreducible".into(),
            CensusPredicate::Integral => "integral".into(),
            CensusPredicate::NormalR1 => "normal".into(),
            CensusPredicate::Good(_) => "good".into(),
            CensusPredicate::Not(p) => format!("not({})", p.describe()),
            CensusPredicate::And(ps) => format!("and({})", ps.iter().map(|p| p.describe()).collect::<Vec<_>>().join(",")),
            CensusPredicate::Or(ps) => format!("or({})", ps.iter().map(|p| p.describe()).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Scratch space owned by one worker.
#[derive(Default)]
pub struct Scratch {
    pub(crate) words: Vec<u64>,
}

/// A predicate specialised to one degree. `bits` is only called on the
/// bit-packed `F_2` path.
pub trait Eval: Send + Sync {
    fn poly(&self, f: &HomogPoly<Fe>) -> Result<Tri>;

    fn bits(&self, f: u128, _scratch: &mut Scratch) -> Result<Tri> {
        let (n, d) = self.shape();
        self.poly(&f2::from_bits(n, d, f))
    }

    fn shape(&self) -> (usize, usize);
}

struct Constant {
    n: usize,
    d: usize,
}

impl Eval for Constant {
    fn poly(&self, _: &HomogPoly<Fe>) -> Result<Tri> {
        Ok(Tri::Hit)
    }

    fn bits(&self, _: u128, _: &mut Scratch) -> Result<Tri> {
        Ok(Tri::Hit)
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }
}

/// Groups of linear functionals on `S_d`.
struct Linear {
    k: Gf,
    n: usize,
    d: usize,
    groups: Vec<Vec<Vec<Fe>>>,
    masks: Vec<Vec<u128>>,
    /// Hit when every group has a nonzero value (avoidance); otherwise hit
    /// when every functional vanishes (containment).
    avoid: bool,
}

impl Linear {
    fn new(k: &Gf, n: usize, d: usize, groups: Vec<Vec<Vec<Fe>>>, avoid: bool) -> Self {
        let masks = if k.q() == 2 && f2::fits(n, d) {
            groups
                .iter()
                .map(|g| {
                    g.iter()
                        .map(|v| v.iter().enumerate().fold(0u128, |a, (i, c)| if c.0 != 0 { a | 1 << i } else { a }))
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        Linear {
            k: k.clone(),
            n,
            d,
            groups,
            masks,
            avoid,
        }
    }

    fn decide(&self, nonzero: impl Fn(usize, usize) -> bool) -> Tri {
        let hit = if self.avoid {
            self.groups.iter().enumerate().all(|(g, fs)| (0..fs.len()).any(|j| nonzero(g, j)))
        } else {
            self.groups.iter().enumerate().all(|(g, fs)| (0..fs.len()).all(|j| !nonzero(g, j)))
        };
        if hit {
            Tri::Hit
        } else {
            Tri::Miss
        }
    }
}

impl Eval for Linear {
    fn poly(&self, f: &HomogPoly<Fe>) -> Result<Tri> {
        let k = &self.k;
        Ok(self.decide(|g, j| {
            let v = &self.groups[g][j];
            let dot = v
                .iter()
                .zip(f.coeffs())
                .fold(Fe::ZERO, |acc, (a, b)| k.add(&acc, &k.mul(a, b)));
            dot != Fe::ZERO
        }))
    }

    fn bits(&self, f: u128, _: &mut Scratch) -> Result<Tri> {
        Ok(self.decide(|g, j| f2::parity(f & self.masks[g][j])))
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }
}

struct Reference<F: Fn(&HomogPoly<Fe>) -> Result<Tri> + Send + Sync> {
    n: usize,
    d: usize,
    run: F,
}

impl<F: Fn(&HomogPoly<Fe>) -> Result<Tri> + Send + Sync> Eval for Reference<F> {
    fn poly(&self, f: &HomogPoly<Fe>) -> Result<Tri> {
        (self.run)(f)
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }
}

fn reference<F>(n: usize, d: usize, run: F) -> Box<dyn Eval>
where
    F: Fn(&HomogPoly<Fe>) -> Result<Tri> + Send + Sync + 'static,
{
    Box::new(Reference { n, d, run })
}

struct FastSmooth {
    n: usize,
    d: usize,
    kernel: SmoothKernel,
    fallback: Box<dyn Eval>,
}

impl Eval for FastSmooth {
    fn poly(&self, f: &HomogPoly<Fe>) -> Result<Tri> {
        self.bits(f2::to_bits(f), &mut Scratch::default())
    }

    fn bits(&self, f: u128, scratch: &mut Scratch) -> Result<Tri> {
        match self.kernel.classify(f, &mut scratch.words) {
            Smoothness::Smooth => Ok(Tri::Hit),
            Smoothness::Singular => Ok(Tri::Miss),
            Smoothness::Undecided => self.fallback.poly(&f2::from_bits(self.n, self.d, f)),
        }
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FactorKind {
    Reduced,
    Irreducible,
    Geometric,
    Integral,
}

struct FastFactor {
    n: usize,
    d: usize,
    kind: FactorKind,
    reducible: Option<FormSet>,
    nonreduced: Option<FormSet>,
    norms: Option<FormSet>,
}

impl Eval for FastFactor {
    fn poly(&self, f: &HomogPoly<Fe>) -> Result<Tri> {
        self.bits(f2::to_bits(f), &mut Scratch::default())
    }

    fn bits(&self, f: u128, _: &mut Scratch) -> Result<Tri> {
        if f == 0 {
            return Ok(Tri::Miss);
        }
        let in_set = |s: &Option<FormSet>| s.as_ref().is_some_and(|s| s.contains(f));
        let ok = match self.kind {
            FactorKind::Reduced => !in_set(&self.nonreduced),
            FactorKind::Irreducible => !in_set(&self.reducible),
            FactorKind::Geometric | FactorKind::Integral => !in_set(&self.reducible) && !in_set(&self.norms),
        };
        Ok(if ok { Tri::Hit } else { Tri::Miss })
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }
}

struct Combine {
    n: usize,
    d: usize,
    op: Op,
    parts: Vec<Box<dyn Eval>>,
}

#[derive(Clone, Copy)]
enum Op {
    Not,
    And,
    Or,
}

impl Combine {
    fn fold(&self, mut each: impl FnMut(&dyn Eval) -> Result<Tri>) -> Result<Tri> {
        match self.op {
            Op::Not => Ok(match each(self.parts[0].as_ref())? {
                Tri::Hit => Tri::Miss,
                Tri::Miss => Tri::Hit,
                Tri::Inconclusive => Tri::Inconclusive,
            }),
            Op::And | Op::Or => {
                let decisive = if matches!(self.op, Op::And) { Tri::Miss } else { Tri::Hit };
                let mut unknown = false;
                for p in &self.parts {
                    match each(p.as_ref())? {
                        t if t == decisive => return Ok(decisive),
                        Tri::Inconclusive => unknown = true,
                        _ => {}
                    }
                }
                Ok(if unknown {
                    Tri::Inconclusive
                } else if matches!(self.op, Op::And) {
                    Tri::Hit
                } else {
                    Tri::Miss
                })
            }
        }
    }
}

impl Eval for Combine {
    fn poly(&self, f: &HomogPoly<Fe>) -> Result<Tri> {
        self.fold(|p| p.poly(f))
    }

    fn bits(&self, f: u128, scratch: &mut Scratch) -> Result<Tri> {
        self.fold(|p| p.bits(f, scratch))
    }

    fn shape(&self) -> (usize, usize) {
        (self.n, self.d)
    }
}

/// Functionals giving the `F_q`-coordinates of `f(w)`.
fn value_functionals(w: &ClosedPoint, d: usize) -> Result<Vec<Vec<Fe>>> {
    let vals = monomial_values(w, d)?;
    let coords: Vec<Vec<Fe>> = vals.iter().map(|&v| w.coordinates(v)).collect::<Result<_>>()?;
    Ok((0..w.degree() as usize).map(|j| coords.iter().map(|c| c[j]).collect()).collect())
}

/// Specialises `pred` to degree `d` forms in `P^n` over `k`.
pub fn compile(pred: &CensusPredicate, k: &Gf, n: usize, d: usize) -> Result<Box<dyn Eval>> {
    let fast = k.q() == 2 && f2::fits(n, d);
    Ok(match pred {
        CensusPredicate::True => Box::new(Constant { n, d }),
        CensusPredicate::Avoids(points) => {
            let groups = points.iter().map(|w| value_functionals(w, d)).collect::<Result<_>>()?;
            Box::new(Linear::new(k, n, d, groups, true))
        }
        CensusPredicate::Contains(w) => {
            let piece = w.vanishing_piece(d)?;
            let checks = if piece.rank() == 0 {
                (0..dim_s(n, d))
                    .map(|i| {
                        let mut v = vec![Fe::ZERO; dim_s(n, d)];
                        v[i] = Fe::ONE;
                        v
                    })
                    .collect()
            } else {
                linalg::kernel(k, piece.rows(), dim_s(n, d))
            };
            Box::new(Linear::new(k, n, d, vec![checks], false))
        }
        CensusPredicate::Smooth(x) => {
            let whole = x.points().is_none() && x.ideal_gens()?.iter().all(|g| g.is_zero(k));
            let x = x.clone();
            let slow = reference(n, d, move |f| Ok(Tri::from(&is_smooth_section(&x, f, SmoothMode::Exact)?)));
            if fast && whole && d >= 1 {
                Box::new(FastSmooth {
                    n,
                    d,
                    kernel: SmoothKernel::new(k, n, d, 2, None)?,
                    fallback: slow,
                })
            } else {
                slow
            }
        }
        CensusPredicate::SmoothAwayFrom(y) => {
            let (kk, yy) = (k.clone(), y.clone());
            let slow = reference(n, d, move |f| Ok(Tri::from(&is_smooth_away_from(&kk, n, f, &yy)?)));
            if fast && d >= 1 && y.len() <= 1 && y.iter().all(|w| w.degree() == 1) {
                Box::new(FastSmooth {
                    n,
                    d,
                    kernel: SmoothKernel::new(k, n, d, 2, y.first())?,
                    fallback: slow,
                })
            } else {
                slow
            }
        }
        CensusPredicate::Snc { u, components } => {
            validate_snc_components(u, components)?;
            let (u, comps) = (u.clone(), components.clone());
            reference(n, d, move |f| Ok(Tri::from(&is_snc_section(&u, &comps, f)?)))
        }
        CensusPredicate::Reduced
        | CensusPredicate::Irreducible
        | CensusPredicate::GeometricallyIrreducible
        | CensusPredicate::Integral => {
            let kind = match pred {
                CensusPredicate::Reduced => FactorKind::Reduced,
                CensusPredicate::Irreducible => FactorKind::Irreducible,
                CensusPredicate::GeometricallyIrreducible => FactorKind::Geometric,
                _ => FactorKind::Integral,
            };
            if fast && dim_s(n, d) <= 28 && d >= 1 {
                let need_red = kind != FactorKind::Reduced;
                Box::new(FastFactor {
                    n,
                    d,
                    kind,
                    reducible: if need_red { Some(f2::reducible_set(n, d)?) } else { None },
                    nonreduced: if kind == FactorKind::Reduced { Some(f2::nonreduced_set(n, d)?) } else { None },
                    norms: if matches!(kind, FactorKind::Geometric | FactorKind::Integral) {
                        Some(f2::norm_set(k, n, d)?)
                    } else {
                        None
                    },
                })
            } else {
                let kk = k.clone();
                reference(n, d, move |f| {
                    let v = match kind {
                        FactorKind::Reduced => is_reduced_section(&kk, f)?,
                        FactorKind::Irreducible => is_irreducible_section(&kk, f, false)?,
                        FactorKind::Geometric => is_irreducible_section(&kk, f, true)?,
                        FactorKind::Integral => {
                            let r = is_reduced_section(&kk, f)?;
                            if !r.is_true() {
                                r
                            } else {
                                is_irreducible_section(&kk, f, true)?
                            }
                        }
                    };
                    Ok(Tri::from(&v))
                })
            }
        }
        CensusPredicate::NormalR1 => {
            let kk = k.clone();
            reference(n, d, move |f| Ok(Tri::from(&is_normal_r1_section(&kk, f)?)))
        }
        CensusPredicate::Good(problem) => {
            let problem = problem.clone();
            reference(n, d, move |f| {
                let flags = is_good_section(&problem, f)?;
                let all = [&flags.g1, &flags.g2, &flags.g3];
                Ok(if all.iter().any(|v| v.flag == Flag::False) {
                    Tri::Miss
                } else if all.iter().all(|v| v.is_true()) {
                    Tri::Hit
                } else {
                    Tri::Inconclusive
                })
            })
        }
        CensusPredicate::Not(p) => Box::new(Combine {
            n,
            d,
            op: Op::Not,
            parts: vec![compile(p, k, n, d)?],
        }),
        CensusPredicate::And(ps) | CensusPredicate::Or(ps) => Box::new(Combine {
            n,
            d,
            op: if matches!(pred, CensusPredicate::And(_)) { Op::And } else { Op::Or },
            parts: ps.iter().map(|p| compile(p, k, n, d)).collect::<Result<_>>()?,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::homog::text::parse_poly;

    #[test]
    fn linear_predicates_on_both_paths() {
        let k = make_field(2, 1).unwrap();
        let w = ClosedPoint::rational(&k, vec![Fe(1), Fe(1), Fe(1)]).unwrap();
        let avoid = compile(&CensusPredicate::Avoids(vec![w.clone()]), &k, 2, 2).unwrap();
        let f = parse_poly(&k, 2, "x0^2 + x1*x2", None).unwrap();
        let g = parse_poly(&k, 2, "x0*x1 + x1*x2", None).unwrap();
        let mut s = Scratch::default();
        assert_eq!(avoid.poly(&f).unwrap(), Tri::Miss);
        assert_eq!(avoid.bits(f2::to_bits(&g), &mut s).unwrap(), Tri::Miss);
        let h = parse_poly(&k, 2, "x0^2", None).unwrap();
        assert_eq!(avoid.bits(f2::to_bits(&h), &mut s).unwrap(), Tri::Hit);

        let line = SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, "x0", None).unwrap()]).unwrap();
        let contains = compile(&CensusPredicate::Contains(line), &k, 2, 2).unwrap();
        let xg = parse_poly(&k, 2, "x0*x1 + x0^2", None).unwrap();
        assert_eq!(contains.poly(&xg).unwrap(), Tri::Hit);
        assert_eq!(contains.bits(f2::to_bits(&f), &mut s).unwrap(), Tri::Miss);
    }

    #[test]
    fn degree_two_avoidance_uses_both_coordinates() {
        let k = make_field(2, 1).unwrap();
        let w = ClosedPoint::parse(&k, "[1:g:0]@2").unwrap();
        let avoid = compile(&CensusPredicate::Avoids(vec![w]), &k, 2, 2).unwrap();
        // x0^2 + x0 x1 + x1^2 vanishes at [1:g:0] since g^2 + g + 1 = 0
        let f = parse_poly(&k, 2, "x0^2 + x0*x1 + x1^2", None).unwrap();
        assert_eq!(avoid.poly(&f).unwrap(), Tri::Miss);
        let mut s = Scratch::default();
        assert_eq!(avoid.bits(f2::to_bits(&f), &mut s).unwrap(), Tri::Miss);
        let g = parse_poly(&k, 2, "x0^2", None).unwrap();
        assert_eq!(avoid.bits(f2::to_bits(&g), &mut s).unwrap(), Tri::Hit);
    }

    #[test]
    fn combinators() {
        let k = make_field(2, 1).unwrap();
        let p = CensusPredicate::And(vec![
            CensusPredicate::Irreducible,
            CensusPredicate::Not(Box::new(CensusPredicate::GeometricallyIrreducible)),
        ]);
        let e = compile(&p, &k, 2, 2).unwrap();
        let split = parse_poly(&k, 2, "x0^2 + x0*x1 + x1^2", None).unwrap();
        assert_eq!(e.poly(&split).unwrap(), Tri::Hit);
        let conic = parse_poly(&k, 2, "x0^2 + x1*x2", None).unwrap();
        assert_eq!(e.poly(&conic).unwrap(), Tri::Miss);
        assert_eq!(CensusPredicate::Or(vec![]).describe(), "or()");
    }
}
