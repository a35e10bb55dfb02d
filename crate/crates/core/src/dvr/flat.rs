//! Flatness of `I_d` over `A`, by elimination that pivots on valuations.

use std::ops::RangeInclusive;

use serde::Serialize;

use super::ratfunc::{Rat, RatField};
use super::{is_integral_form, reduce_form};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::Fe;
use crate::homog::HomogPoly;
use crate::ideal::{macaulay_rows, saturated_piece, GradedPiece};

/// An `A`-basis of the row module of an integral matrix. Each row has a
/// pivot entry equal to `t^v` in a column where all later rows vanish.
#[derive(Clone, Debug)]
pub struct ValuationEchelon {
    pub rows: Vec<Vec<Rat>>,
    pub pivots: Vec<usize>,
    pub valuations: Vec<u32>,
}

impl ValuationEchelon {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of pivots of positive valuation: the length of the torsion
    /// of the cokernel, `dim_k (tA^N ∩ M) / tM`.
    pub fn torsion(&self) -> usize {
        self.valuations.iter().filter(|&&v| v > 0).count()
    }
}

/// Row reduction over `A` using only invertible `A`-operations. The pivot is
/// always an entry of least valuation among the remaining rows, so every
/// elimination factor is integral.
pub fn valuation_echelon(k: &RatField, rows: Vec<Vec<Rat>>) -> Result<ValuationEchelon> {
    if rows.iter().flatten().any(|x| !x.is_integral()) {
        return Err(Error::InvalidArgument("matrix entries must lie in A".into()));
    }
    let mut rest: Vec<Vec<Rat>> = rows.into_iter().filter(|r| r.iter().any(|x| !k.is_zero(x))).collect();
    let mut out = ValuationEchelon {
        rows: Vec::new(),
        pivots: Vec::new(),
        valuations: Vec::new(),
    };
    while !rest.is_empty() {
        let mut best: Option<(i64, usize, usize)> = None;
        for (i, row) in rest.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if let Some(v) = x.valuation() {
                    if best.is_none_or(|(bv, bc, _)| (v, c) < (bv, bc)) {
                        best = Some((v, c, i));
                    }
                }
            }
        }
        let (v, c, i) = best.expect("rest holds nonzero rows");
        let mut pivot = rest.remove(i);
        // scale by the unit t^v / pivot[c]
        let unit = k.mul(&k.t_pow(v as usize), &k.inv(&pivot[c]).expect("nonzero"));
        for x in pivot.iter_mut() {
            *x = k.mul(x, &unit);
        }
        let inv = k.inv(&pivot[c]).expect("nonzero");
        for row in rest.iter_mut() {
            if k.is_zero(&row[c]) {
                continue;
            }
            let factor = k.mul(&row[c], &inv);
            debug_assert!(factor.is_integral());
            for (x, y) in row.iter_mut().zip(&pivot) {
                if !k.is_zero(y) {
                    *x = k.sub(x, &k.mul(&factor, y));
                }
            }
        }
        rest.retain(|r| r.iter().any(|x| !k.is_zero(x)));
        out.rows.push(pivot);
        out.pivots.push(c);
        out.valuations.push(v as u32);
    }
    Ok(out)
}

/// An `A`-basis of `L ∩ A^N` for the `K`-span `L` of `rows`: each row is
/// rescaled into `A^N` with a unit entry, then the valuation echelon rows are
/// divided by their pivot powers of `t`.
pub(crate) fn saturate(k: &RatField, rows: Vec<Vec<Rat>>) -> Result<ValuationEchelon> {
    let rows = rows
        .into_iter()
        .filter_map(|r| {
            let l = r.iter().filter_map(Rat::valuation).min()?;
            Some(r.iter().map(|x| k.div_t_pow(x, l)).collect())
        })
        .collect();
    let mut ech = valuation_echelon(k, rows)?;
    for (row, v) in ech.rows.iter_mut().zip(ech.valuations.iter_mut()) {
        if *v > 0 {
            for x in row.iter_mut() {
                *x = k.div_t_pow(x, *v as i64);
            }
            *v = 0;
        }
    }
    Ok(ech)
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeFlatness {
    pub d: usize,
    /// Rank of `I_d` over `A` (equivalently of `I_d ⊗ K`).
    pub rank: usize,
    /// Pivot valuations: the elementary divisors `t^v` of `I_d ⊂ S'_d`.
    pub elementary_divisors: Vec<u32>,
    /// `dim_k (t S'_d ∩ I_d) / t I_d`; zero iff the two agree.
    pub torsion: usize,
    /// Rank of the reduction mod `t` of the basis.
    pub reduced_rank: usize,
    /// Dimension of the degree-`d` ideal of the special fiber `Z_s`.
    pub special_rank: usize,
    pub intersection_equal: bool,
    pub spans_special_fiber: bool,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatReport {
    pub degrees: Vec<DegreeFlatness>,
    pub passed: bool,
}

/// For `Z ⊂ P^n_A` cut out by integral `gens`, checks at each degree that
/// `t I_d = t S'_d ∩ I_d` and that `I_d ⊗ k` maps onto the degree-`d` part of
/// the ideal of the special fiber. The caller is responsible for `Z` having
/// no vertical component; a vertical `Z` makes the first check fail.
pub fn check_flat_restriction(
    k: &RatField,
    n: usize,
    gens: &[HomogPoly<Rat>],
    degrees: RangeInclusive<usize>,
) -> Result<FlatReport> {
    if let Some(g) = gens.iter().find(|g| !is_integral_form(g)) {
        return Err(Error::InvalidArgument(format!(
            "generator {} is not defined over A",
            crate::homog::text::format_poly(k, g)
        )));
    }
    let base = k.base();
    let special_gens: Vec<HomogPoly<Fe>> = gens
        .iter()
        .map(|g| reduce_form(k, g))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|g| !g.is_zero(base))
        .collect();
    let mut out = Vec::new();
    for d in degrees {
        let ech = valuation_echelon(k, macaulay_rows(k, n, gens, d)?)?;
        let reduced: Vec<Vec<Fe>> =
            ech.rows.iter().map(|r| r.iter().map(|x| k.residue(x).expect("integral")).collect()).collect();
        let image = GradedPiece::span(base, n, d, reduced);
        let special = saturated_piece(base, n, &special_gens, d)?;
        let torsion = ech.torsion();
        let spans = image.rank() == special.rank() && image.is_subspace_of(base, &special);
        let note = if ech.rank() > 0 && ech.valuations.iter().all(|&v| v > 0) {
            Some("every pivot is a non-unit: I_d lies in t S'_d".into())
        } else if torsion > 0 {
            Some(format!("{torsion} pivot(s) of positive valuation"))
        } else {
            None
        };
        out.push(DegreeFlatness {
            d,
            rank: ech.rank(),
            elementary_divisors: ech.valuations.clone(),
            torsion,
            reduced_rank: image.rank(),
            special_rank: special.rank(),
            intersection_equal: torsion == 0,
            spans_special_fiber: spans,
            passed: torsion == 0 && spans,
            note,
        });
    }
    let passed = out.iter().all(|r| r.passed);
    Ok(FlatReport { degrees: out, passed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::homog::text::parse_poly;

    fn a2() -> RatField {
        RatField::new(&make_field(2, 1).unwrap())
    }

    fn gens(k: &RatField, n: usize, src: &[&str]) -> Vec<HomogPoly<Rat>> {
        src.iter().map(|s| parse_poly(k, n, s, None).unwrap()).collect()
    }

    #[test]
    fn rational_section_is_flat() {
        let k = a2();
        let r = check_flat_restriction(&k, 2, &gens(&k, 2, &["x1", "x2"]), 1..=4).unwrap();
        assert!(r.passed, "{r:?}");
        // I_d = (x1, x2)_d has corank 1 in S_d
        for row in &r.degrees {
            assert_eq!(row.rank + 1, crate::homog::dim_s(2, row.d));
        }
    }

    #[test]
    fn moving_section_is_flat() {
        let k = a2();
        let r = check_flat_restriction(&k, 2, &gens(&k, 2, &["x1 + t*x0", "x2 + (1 + t^2)*x0"]), 1..=3).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn horizontal_hyperplane_is_flat() {
        let k = a2();
        let r = check_flat_restriction(&k, 2, &gens(&k, 2, &["x0"]), 1..=4).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn vertical_fiber_fails() {
        let k = a2();
        let r = check_flat_restriction(&k, 2, &gens(&k, 2, &["t"]), 1..=2).unwrap();
        assert!(!r.passed);
        let d1 = &r.degrees[0];
        assert_eq!(d1.rank, 3);
        assert_eq!(d1.elementary_divisors, vec![1, 1, 1]);
        assert!(!d1.intersection_equal);
        assert!(d1.note.as_deref().unwrap().contains("non-unit"));
    }

    #[test]
    fn torsion_from_a_hidden_vertical_piece() {
        // (t*x1, x1 + t*x0): contains t*x1 and t*(x1 + t*x0) - t*x1 = t^2 x0,
        // but x0 only up to torsion.
        let k = a2();
        let r = check_flat_restriction(&k, 1, &gens(&k, 1, &["t*x1", "x1 + t*x0"]), 1..=1).unwrap();
        assert_eq!(r.degrees[0].elementary_divisors, vec![0, 2]);
        assert!(!r.passed);
    }

    #[test]
    fn echelon_is_a_basis_of_the_row_module() {
        let k = a2();
        let rows: Vec<Vec<Rat>> = [["t", "1 + t", "0"], ["t^2", "t", "t"], ["0", "1", "1/(1 + t)"]]
            .iter()
            .map(|r| r.iter().map(|s| crate::homog::text::CoeffText::parse_coeff(&k, s).unwrap()).collect())
            .collect();
        let e = valuation_echelon(&k, rows.clone()).unwrap();
        assert_eq!(e.rank(), 3);
        for (row, &c) in e.rows.iter().zip(&e.pivots) {
            assert!(row.iter().all(Rat::is_integral));
            assert!(row[c].valuation().is_some());
        }
        // det = t^2/(1 + t), and row operations over A keep its valuation
        let total: u32 = e.valuations.iter().sum();
        assert_eq!(total, 2);
    }
}
