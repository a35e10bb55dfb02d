//! Hypersurface sections over the discrete valuation ring `A = F_q[t]_(t)`.
//!
//! Elements of `A` are rational functions regular at `t = 0`, kept exact.
//! The generic fiber lives over `K = F_q(t)` (see [`RatField`]), the special
//! fiber over the residue field `F_q`. Forms over `A` are `HomogPoly<Rat>`
//! whose coefficients are all integral.

mod flat;
mod lift;
mod ratfunc;

pub use flat::{check_flat_restriction, valuation_echelon, DegreeFlatness, FlatReport, ValuationEchelon};
pub use lift::{
    lift_search, verify_certificate, LiftCertificate, LiftOutcome, LiftPredicate, LiftProblem, LiftStats,
};
pub use ratfunc::{Rat, RatField, UPoly};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::text::{format_coords, format_poly, parse_coords, parse_poly};
use crate::homog::{HomogPoly, ProjPoint};

/// An element of `A`: a rational function whose denominator does not
/// vanish at `t = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DvrElem(Rat);

impl DvrElem {
    pub fn new(a: Rat) -> Result<Self> {
        if a.is_integral() {
            Ok(DvrElem(a))
        } else {
            Err(Error::InvalidArgument("element is not regular at t = 0".into()))
        }
    }

    pub fn constant(k: &RatField, c: Fe) -> Self {
        DvrElem(k.constant(c))
    }

    pub fn parse(k: &RatField, text: &str) -> Result<Self> {
        use crate::homog::text::CoeffText;
        DvrElem::new(k.parse_coeff(text)?)
    }

    pub fn as_rat(&self) -> &Rat {
        &self.0
    }

    /// `None` for zero.
    pub fn valuation(&self) -> Option<u32> {
        self.0.valuation().map(|v| v as u32)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    pub fn residue(&self, k: &RatField) -> Fe {
        k.residue(&self.0).expect("integral")
    }
}

/// A point of `P^n(K)` written with coordinates in `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvrPoint {
    coords: Vec<DvrElem>,
}

impl DvrPoint {
    pub fn new(coords: Vec<DvrElem>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::InvalidArgument("a projective point needs at least two coordinates".into()));
        }
        if coords.iter().all(|c| c.valuation().is_none()) {
            return Err(Error::InvalidArgument("all coordinates are zero".into()));
        }
        Ok(DvrPoint { coords })
    }

    /// Parses `[a:b:c]` with entries in `A`.
    pub fn parse(k: &RatField, text: &str) -> Result<Self> {
        let coords = parse_coords(k, text)?.into_iter().map(DvrElem::new).collect::<Result<_>>()?;
        DvrPoint::new(coords)
    }

    /// The constant lift of an `F_q`-point.
    pub fn constant(k: &RatField, x: &ProjPoint<Fe>) -> Self {
        DvrPoint {
            coords: x.coords().iter().map(|&c| DvrElem::constant(k, c)).collect(),
        }
    }

    pub fn coords(&self) -> &[DvrElem] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn rat_coords(&self) -> Vec<Rat> {
        self.coords.iter().map(|c| c.0.clone()).collect()
    }

    /// Smallest coordinate valuation.
    pub fn min_valuation(&self) -> u32 {
        self.coords.iter().filter_map(|c| c.valuation()).min().expect("nonzero point")
    }

    /// The representative divided by `t^l`, `l` the smallest valuation, so
    /// that some coordinate is a unit.
    pub fn normalized(&self, k: &RatField) -> DvrPoint {
        let l = self.min_valuation() as i64;
        DvrPoint {
            coords: self.coords.iter().map(|c| DvrElem(k.div_t_pow(&c.0, l))).collect(),
        }
    }

    /// `u * P` for `u` in `A`.
    pub fn scaled(&self, k: &RatField, u: &DvrElem) -> Result<DvrPoint> {
        DvrPoint::new(self.coords.iter().map(|c| DvrElem(k.mul(&c.0, &u.0))).collect())
    }

    pub fn render(&self, k: &RatField) -> String {
        format_coords(k, &self.rat_coords())
    }
}

/// The specialization `P^n(K) -> P^n(F_q)`: clear the common power of `t`,
/// then reduce mod `t`.
pub fn specialize_point(k: &RatField, p: &DvrPoint) -> ProjPoint<Fe> {
    let coords: Vec<Fe> = p.normalized(k).coords.iter().map(|c| c.residue(k)).collect();
    ProjPoint::new(k.base(), coords).expect("a normalized point has a unit coordinate")
}

/// `[a_0 : a_1 + t c_1 : ... : a_n + t c_n]`, where `a` is the constant lift
/// of `x` and coordinates are listed starting from the chart coordinate of
/// `x` (its first nonzero entry, equal to 1). `c` has `n` entries, one for
/// each remaining coordinate in increasing index order.
pub fn psi_x(k: &RatField, x: &ProjPoint<Fe>, c: &[DvrElem]) -> Result<DvrPoint> {
    let n = x.n();
    if c.len() != n {
        return Err(Error::InvalidArgument(format!("psi_x needs {n} parameters, got {}", c.len())));
    }
    let chart = x.chart(k.base());
    let mut params = c.iter();
    let coords = x
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            let a = k.constant(a);
            if i == chart {
                DvrElem(a)
            } else {
                let ci = params.next().expect("n parameters");
                DvrElem(k.add(&a, &k.mul(&k.t(), &ci.0)))
            }
        })
        .collect();
    DvrPoint::new(coords)
}

/// Whether every coefficient of a form over `K` lies in `A`.
pub fn is_integral_form(f: &HomogPoly<Rat>) -> bool {
    f.coeffs().iter().all(Rat::is_integral)
}

/// Reduction mod `t` of an integral form.
pub fn reduce_form(k: &RatField, f: &HomogPoly<Rat>) -> Result<HomogPoly<Fe>> {
    let coeffs = f
        .coeffs()
        .iter()
        .map(|c| k.residue(c).ok_or_else(|| Error::InvalidArgument("form is not integral over A".into())))
        .collect::<Result<Vec<Fe>>>()?;
    HomogPoly::from_coeffs(f.n(), f.degree(), coeffs)
}

/// The constant lift of a form over `F_q`.
pub fn lift_form(k: &RatField, f: &HomogPoly<Fe>) -> HomogPoly<Rat> {
    f.map(|&c| k.constant(c))
}

/// A hypersurface `V(f) ⊂ P^n_A`, with `f` integral and not all of its
/// coefficients in `(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DvrHypersurface {
    f: HomogPoly<Rat>,
}

impl DvrHypersurface {
    pub fn new(k: &RatField, f: HomogPoly<Rat>) -> Result<Self> {
        if !is_integral_form(&f) {
            return Err(Error::InvalidArgument("hypersurface coefficients must lie in A".into()));
        }
        if reduce_form(k, &f)?.is_zero(k.base()) {
            return Err(Error::InvariantViolation(
                "every coefficient lies in (t); the special fiber would be all of P^n".into(),
            ));
        }
        Ok(DvrHypersurface { f })
    }

    pub fn parse(k: &RatField, n: usize, text: &str) -> Result<Self> {
        DvrHypersurface::new(k, parse_poly(k, n, text, None)?)
    }

    pub fn form(&self) -> &HomogPoly<Rat> {
        &self.f
    }

    pub fn degree(&self) -> usize {
        self.f.degree()
    }

    pub fn render(&self, k: &RatField) -> String {
        format_poly(k, &self.f)
    }
}

/// The generic fiber (over `K`) and special fiber (over `F_q`) of `H`.
pub fn fiberwise(k: &RatField, h: &DvrHypersurface) -> (HomogPoly<Rat>, HomogPoly<Fe>) {
    let special = reduce_form(k, &h.f).expect("hypersurface is integral");
    (h.f.clone(), special)
}

/// Linear forms over `A` cutting out the section `P` of `P^n_A -> Spec A`:
/// `x_i p_c - x_c p_i` for the chart `c` where `P` has a unit coordinate.
pub fn section_ideal(k: &RatField, p: &DvrPoint) -> Vec<HomogPoly<Rat>> {
    let p = p.normalized(k);
    let n = p.n();
    let c = p.coords.iter().position(DvrElem::is_unit).expect("normalized point has a unit coordinate");
    (0..=n)
        .filter(|&i| i != c)
        .map(|i| {
            let mut coeffs = vec![k.zero(); n + 1];
            coeffs[i] = p.coords[c].0.clone();
            coeffs[c] = k.neg(&p.coords[i].0);
            HomogPoly::from_coeffs(n, 1, coeffs).expect("linear form")
        })
        .collect()
}

/// Polynomial in `t` rendered for certificates, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TPoly {
    pub text: String,
    pub coeffs: Vec<u32>,
}

impl TPoly {
    pub fn from_upoly(base: &Gf, p: &UPoly) -> Self {
        TPoly {
            text: p.format(base),
            coeffs: p.coeffs().iter().map(|c| c.0).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::ideal::projective_points;

    fn a2() -> RatField {
        RatField::new(&make_field(2, 1).unwrap())
    }

    fn pt(k: &RatField, s: &str) -> ProjPoint<Fe> {
        ProjPoint::new(k.base(), parse_coords(k.base(), s).unwrap()).unwrap()
    }

    #[test]
    fn specialization_examples() {
        let k = a2();
        let cases = [("[t : 1 + t : t^2]", "[0:1:0]"), ("[t : t : t^3]", "[1:1:0]"), ("[1 + t : t : 0]", "[1:0:0]")];
        for (p, want) in cases {
            let p = DvrPoint::parse(&k, p).unwrap();
            assert_eq!(specialize_point(&k, &p), pt(&k, want));
        }
    }

    #[test]
    fn specialization_ignores_unit_scaling() {
        let k = a2();
        let u = DvrElem::parse(&k, "1 + t").unwrap();
        let p = DvrPoint::parse(&k, "[t^2 : t/(1 + t) : t + t^3]").unwrap();
        assert_eq!(specialize_point(&k, &p), specialize_point(&k, &p.scaled(&k, &u).unwrap()));
        assert_eq!(specialize_point(&k, &p), pt(&k, "[0:1:1]"));
    }

    #[test]
    fn psi_examples() {
        let k = a2();
        let x = pt(&k, "[1:0:0]");
        let zero = vec![DvrElem::constant(&k, Fe::ZERO); 2];
        assert_eq!(psi_x(&k, &x, &zero).unwrap(), DvrPoint::constant(&k, &x));
        let c = vec![DvrElem::parse(&k, "1").unwrap(), DvrElem::parse(&k, "1 + t").unwrap()];
        let p = psi_x(&k, &x, &c).unwrap();
        assert_eq!(p, DvrPoint::parse(&k, "[1 : t : t + t^2]").unwrap());
        assert_eq!(specialize_point(&k, &p), x);
    }

    #[test]
    fn psi_zero_hits_every_rational_point() {
        let k = a2();
        let zero = vec![DvrElem::constant(&k, Fe::ZERO); 2];
        let pts: Vec<_> = projective_points(k.base(), 2).unwrap().collect();
        assert_eq!(pts.len(), 7);
        for x in pts {
            assert_eq!(specialize_point(&k, &psi_x(&k, &x, &zero).unwrap()), x);
        }
    }

    #[test]
    fn fibers_of_a_hypersurface() {
        let k = a2();
        let h = DvrHypersurface::parse(&k, 1, "x0 + t*x1").unwrap();
        let (generic, special) = fiberwise(&k, &h);
        assert_eq!(generic, parse_poly(&k, 1, "x0 + t*x1", None).unwrap());
        assert_eq!(special, parse_poly(k.base(), 1, "x0", None).unwrap());
        assert!(matches!(DvrHypersurface::parse(&k, 1, "t*x0 + t*x1"), Err(Error::InvariantViolation(_))));
        let q = DvrHypersurface::parse(&k, 3, "x0*x3 - x1*x2 + t*x3^2").unwrap();
        assert_eq!(fiberwise(&k, &q).1, parse_poly(k.base(), 3, "x0*x3 + x1*x2", None).unwrap());
    }

    #[test]
    fn section_ideal_vanishes_on_the_section() {
        let k = a2();
        let p = DvrPoint::parse(&k, "[t : 1 + t : t^2 + 1]").unwrap();
        let gens = section_ideal(&k, &p);
        assert_eq!(gens.len(), 2);
        for g in gens {
            assert!(k.is_zero(&g.eval(&k, &p.rat_coords())));
            assert!(!reduce_form(&k, &g).unwrap().is_zero(k.base()));
        }
    }
}
