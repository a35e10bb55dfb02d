//! Points, closed-point counts, and geometric predicates on hypersurface
//! sections.

pub mod predicates;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::{HomogPoly, ProjPoint};
use crate::ideal::{pn_count, projective_points, ClosedPoint, SubschemeSpec};

pub use predicates::{
    is_good_section, is_irreducible_section, is_normal_r1_section, is_reduced_section, is_smooth_section,
    is_snc_section, is_smooth_away_from, jacobian_minors, singular_scheme, validate_snc_components, Flag, GoodFlags, SectionProblem, SmoothMode, Verdict,
};
pub use report::{section_report, Predicate, SectionReport};

/// All points of `V(I)` over `F_{q^r}`.
pub fn rational_points(z: &SubschemeSpec, r: u32) -> Result<Vec<ProjPoint<Fe>>> {
    let k = z.field();
    let ext = k.extension(r)?;
    if let Some(pts) = z.points() {
        let mut out = Vec::new();
        for w in pts.iter().filter(|w| r % w.degree() == 0) {
            let emb = w.residue_field().embedding_into(&ext)?;
            out.extend(w.conjugates().iter().map(|p| p.embed(&emb)));
        }
        out.sort();
        return Ok(out);
    }
    let emb = k.embedding_into(&ext)?;
    let gens: Vec<HomogPoly<Fe>> = z.ideal_gens()?.iter().map(|g| g.embed(&emb)).collect();
    Ok(projective_points(&ext, z.n())?
        .filter(|p| gens.iter().all(|g| g.eval_point(&ext, p) == Fe::ZERO))
        .collect())
}

/// Every closed point of `P^n` of exact degree `r`, sorted.
pub fn closed_points_of_degree(k: &Gf, n: usize, r: u32) -> Result<Vec<ClosedPoint>> {
    let ext = k.extension(r)?;
    let mut out = std::collections::BTreeMap::new();
    for p in projective_points(&ext, n)? {
        let w = ClosedPoint::new(k, &ext, p.coords().to_vec())?;
        if w.degree() == r {
            out.insert(w.representative().clone(), w);
        }
    }
    Ok(out.into_values().collect())
}

/// Point counts `a_r = #X(F_{q^r})` and closed-point counts `b_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointCensus {
    pub q: u64,
    /// Dimension used for tail bounds (`-1` when empty).
    pub dim: i64,
    /// Upper bound on the sum of the degrees of the components, so that
    /// `a_r <= 2 * degree_bound * q^(r * dim)`.
    pub degree_bound: u64,
    pub a: Vec<u128>,
    pub b: Vec<u128>,
}

pub fn mobius(mut n: u64) -> i64 {
    let mut result = 1i64;
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

impl PointCensus {
    /// Builds the census from `a_1..a_B` by Möbius inversion, failing if any
    /// `b_r` is not a nonnegative integer.
    pub fn from_counts(q: u64, dim: i64, degree_bound: u64, a: Vec<u128>) -> Result<Self> {
        let mut b = Vec::with_capacity(a.len());
        for r in 1..=a.len() as u64 {
            let mut acc: i128 = 0;
            for e in (1..=r).filter(|e| r % e == 0) {
                acc += mobius(r / e) as i128 * a[e as usize - 1] as i128;
            }
            if acc < 0 || acc % r as i128 != 0 {
                return Err(Error::Internal(format!(
                    "point counts {a:?} give a non-integral closed-point count at degree {r}"
                )));
            }
            b.push((acc / r as i128) as u128);
        }
        Ok(PointCensus {
            q,
            dim,
            degree_bound,
            a,
            b,
        })
    }

    /// `P^n` over `F_q`, from the closed form `a_r = 1 + Q + ... + Q^n`.
    pub fn projective_space(q: u64, n: usize, depth: usize) -> Result<Self> {
        let mut a = Vec::with_capacity(depth);
        for r in 1..=depth as u32 {
            let big_q = (q as u128)
                .checked_pow(r)
                .and_then(|x| x.checked_pow(n as u32).map(|_| x))
                .ok_or_else(|| Error::Unsupported(format!("#P^{n}(F_{q}^{r}) overflows 128 bits")))?;
            a.push(pn_count(big_q, n));
        }
        Self::from_counts(q, n as i64, 1, a)
    }

    /// A finite set of closed points.
    pub fn points(q: u64, pts: &[ClosedPoint], depth: usize) -> Self {
        let mut b = vec![0u128; depth];
        for w in pts {
            if (w.degree() as usize) <= depth {
                b[w.degree() as usize - 1] += 1;
            }
        }
        let a = (1..=depth)
            .map(|r| (1..=r).filter(|e| r % e == 0).map(|e| e as u128 * b[e - 1]).sum())
            .collect();
        PointCensus {
            q,
            dim: if pts.is_empty() { -1 } else { 0 },
            degree_bound: pts.iter().map(|w| w.degree() as u64).sum(),
            a,
            b,
        }
    }

    pub fn empty(q: u64, depth: usize) -> Self {
        PointCensus {
            q,
            dim: -1,
            degree_bound: 0,
            a: vec![0; depth],
            b: vec![0; depth],
        }
    }

    /// Census of `self` minus a finite set of its closed points.
    pub fn minus_points(&self, pts: &[ClosedPoint]) -> Result<Self> {
        let remove = PointCensus::points(self.q, pts, self.depth());
        let mut b = self.b.clone();
        for (x, y) in b.iter_mut().zip(&remove.b) {
            *x = x
                .checked_sub(*y)
                .ok_or_else(|| Error::InvalidArgument("removing more closed points than exist".into()))?;
        }
        let a = self.a.iter().zip(&remove.a).map(|(x, y)| x - y).collect();
        Ok(PointCensus {
            q: self.q,
            dim: self.dim,
            degree_bound: self.degree_bound,
            a,
            b,
        })
    }

    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// `a_R = sum_{r | R} r b_r` for every `R`.
    pub fn is_consistent(&self) -> bool {
        (1..=self.depth()).all(|big_r| {
            let s: u128 = (1..=big_r)
                .filter(|r| big_r % r == 0)
                .map(|r| r as u128 * self.b[r - 1])
                .sum();
            s == self.a[big_r - 1]
        })
    }
}

/// Closed-point census of `V(I)` to depth `b`. Whole projective space and
/// explicit point sets use closed forms; other schemes enumerate points.
pub fn closed_point_counts(z: &SubschemeSpec, depth: usize) -> Result<PointCensus> {
    let q = z.field().q() as u64;
    if let Some(pts) = z.points() {
        return Ok(PointCensus::points(q, pts, depth));
    }
    let gens = z.ideal_gens()?;
    let k = z.field();
    if gens.iter().all(|g| g.is_zero(k)) {
        return PointCensus::projective_space(q, z.n(), depth);
    }
    let mut a = Vec::with_capacity(depth);
    for r in 1..=depth as u32 {
        let size = (q as u128).checked_pow(r).map(|x| pn_count(x, z.n())).unwrap_or(u128::MAX);
        caps::check("point enumeration", size, caps::point_cap(), caps::POINT_CAP_ENV)?;
        a.push(rational_points(z, r)?.len() as u128);
    }
    let dim = match crate::ideal::hilbert_dim(k, z.n(), &gens, 6)? {
        crate::ideal::DimVerdict::Dim(d) => d,
        crate::ideal::DimVerdict::Inconclusive => z.n() as i64,
    };
    // refined Bezout: the component degrees sum to at most the product of
    // the generator degrees
    let degree_bound = gens
        .iter()
        .filter(|g| g.degree() > 0)
        .fold(1u64, |acc, g| acc.saturating_mul(g.degree() as u64));
    PointCensus::from_counts(q, dim, degree_bound, a)
}

/// Embedding dimension of `V(gens)` at a point: `n - rank J(P)`.
pub fn edim_at(z: &SubschemeSpec, point_field: &Gf, p: &ProjPoint<Fe>) -> Result<usize> {
    let k = z.field();
    let emb = k.embedding_into(point_field)?;
    let gens: Vec<HomogPoly<Fe>> = z.ideal_gens()?.iter().map(|g| g.embed(&emb)).collect();
    if gens.iter().any(|g| g.eval_point(point_field, p) != Fe::ZERO) {
        return Err(Error::InvalidArgument("point does not lie on the scheme".into()));
    }
    let mut rows = Vec::new();
    for g in gens.iter().filter(|g| g.degree() > 0) {
        rows.push(
            g.gradient(point_field)?
                .iter()
                .map(|h| h.eval_point(point_field, p))
                .collect::<Vec<Fe>>(),
        );
    }
    let rank = if rows.is_empty() { 0 } else { point_field.rank_of_rows(rows) };
    Ok(z.n() - rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::homog::text::parse_poly;

    fn f2() -> Gf {
        make_field(2, 1).unwrap()
    }

    #[test]
    fn rational_point_examples() {
        let k = f2();
        let p2 = SubschemeSpec::whole(&k, 2);
        assert_eq!(rational_points(&p2, 1).unwrap().len(), 7);
        assert_eq!(rational_points(&p2, 2).unwrap().len(), 21);
        let line = SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, "x0", None).unwrap()]).unwrap();
        assert_eq!(rational_points(&line, 1).unwrap().len(), 3);
    }

    #[test]
    fn closed_point_examples() {
        let k = f2();
        let p1 = closed_point_counts(&SubschemeSpec::whole(&k, 1), 2).unwrap();
        assert_eq!((p1.a.clone(), p1.b.clone()), (vec![3, 5], vec![3, 1]));
        let p2 = closed_point_counts(&SubschemeSpec::whole(&k, 2), 3).unwrap();
        assert_eq!(p2.a, vec![7, 21, 73]);
        assert_eq!(p2.b, vec![7, 7, 22]);
        let e = closed_point_counts(&SubschemeSpec::empty(&k, 2), 4).unwrap();
        assert!(e.a.iter().chain(&e.b).all(|&x| x == 0));
    }

    #[test]
    fn enumeration_matches_closed_form() {
        let k = f2();
        let conic = SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, "x0^2 + x1*x2", None).unwrap()]).unwrap();
        let c = closed_point_counts(&conic, 4).unwrap();
        // a smooth conic is a P^1
        assert_eq!(c.a, vec![3, 5, 9, 17]);
        assert!(c.is_consistent());
        let p2 = closed_point_counts(&SubschemeSpec::whole(&k, 2), 12).unwrap();
        assert!(p2.is_consistent());
    }

    #[test]
    fn closed_points_by_degree() {
        let k = f2();
        let counts: Vec<usize> = (1..=3).map(|r| closed_points_of_degree(&k, 2, r).unwrap().len()).collect();
        assert_eq!(counts, vec![7, 7, 22]);
    }

    #[test]
    fn non_integral_counts_are_rejected() {
        assert!(PointCensus::from_counts(2, 0, 1, vec![1, 2]).is_err());
    }

    #[test]
    fn mobius_values() {
        let expected = [1, -1, -1, 0, -1, 1, -1, 0, 0, 1];
        for (i, &m) in expected.iter().enumerate() {
            assert_eq!(mobius(i as u64 + 1), m);
        }
    }

    #[test]
    fn edim_examples() {
        let k = f2();
        let node = SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, "x0*x1", None).unwrap()]).unwrap();
        let p = ProjPoint::new(&k, vec![Fe(0), Fe(0), Fe(1)]).unwrap();
        assert_eq!(edim_at(&node, &k, &p).unwrap(), 2);
        let line = SubschemeSpec::from_ideal(&k, 2, vec![parse_poly(&k, 2, "x0", None).unwrap()]).unwrap();
        let p = ProjPoint::new(&k, vec![Fe(0), Fe(1), Fe(0)]).unwrap();
        assert_eq!(edim_at(&line, &k, &p).unwrap(), 1);
        assert_eq!(edim_at(&SubschemeSpec::whole(&k, 2), &k, &p).unwrap(), 2);
        let off = ProjPoint::new(&k, vec![Fe(1), Fe(0), Fe(0)]).unwrap();
        assert!(edim_at(&line, &k, &off).is_err());
    }
}
