//! Graded pieces of homogeneous ideals and the linear-algebra decisions
//! built on them: membership, saturation, projective emptiness and
//! dimension.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::text::{format_coords, parse_coords};
use crate::homog::{basis, dim_s, mul_table, FormSpace, HomogPoly, ProjPoint};
use crate::linalg;

/// An echelonized subspace of `S_d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPiece<E> {
    n: usize,
    d: usize,
    rows: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone + PartialEq> GradedPiece<E> {
    /// Echelonizes the span of `vectors` (coefficient vectors in `S_d`).
    pub fn span<K: Field<Elem = E>>(k: &K, n: usize, d: usize, vectors: Vec<Vec<E>>) -> Self {
        let mut rows = vectors;
        let pivots = linalg::echelonize(k, &mut rows);
        GradedPiece { n, d, rows, pivots }
    }

    pub fn full<K: Field<Elem = E>>(k: &K, n: usize, d: usize) -> Self {
        let dim = dim_s(n, d);
        let rows = (0..dim)
            .map(|i| {
                let mut v = vec![k.zero(); dim];
                v[i] = k.one();
                v
            })
            .collect();
        GradedPiece {
            n,
            d,
            rows,
            pivots: (0..dim).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `dim S_d - rank`, the Hilbert function value.
    pub fn codim(&self) -> usize {
        dim_s(self.n, self.d) - self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis_forms(&self) -> Vec<HomogPoly<E>> {
        self.rows
            .iter()
            .map(|r| HomogPoly::from_coeffs(self.n, self.d, r.clone()).expect("row length"))
            .collect()
    }

    pub fn contains<K: Field<Elem = E>>(&self, k: &K, f: &HomogPoly<E>) -> bool {
        if f.degree() != self.d || f.n() != self.n {
            return false;
        }
        linalg::reduce(k, &self.rows, &self.pivots, f.coeffs()).iter().all(|c| k.is_zero(c))
    }

    /// `S_1 * self`, a piece of degree `d + 1`.
    pub fn times_linear<K: Field<Elem = E>>(&self, k: &K) -> Self {
        let table = mul_table(self.n, 1, self.d);
        let w = dim_s(self.n, self.d);
        let out_dim = dim_s(self.n, self.d + 1);
        let mut vectors = Vec::with_capacity((self.n + 1) * self.rows.len());
        for i in 0..=self.n {
            for r in &self.rows {
                let mut v = vec![k.zero(); out_dim];
                for (j, c) in r.iter().enumerate() {
                    if !k.is_zero(c) {
                        v[table[i * w + j] as usize] = c.clone();
                    }
                }
                vectors.push(v);
            }
        }
        Self::span(k, self.n, self.d + 1, vectors)
    }

    pub fn is_subspace_of<K: Field<Elem = E>>(&self, k: &K, other: &Self) -> bool {
        self.d == other.d
            && self
                .rows
                .iter()
                .all(|r| linalg::reduce(k, &other.rows, &other.pivots, r).iter().all(|c| k.is_zero(c)))
    }
}

impl GradedPiece<Fe> {
    pub fn space(&self, k: &Gf) -> FormSpace {
        FormSpace::from_basis(k, self.n, self.d, self.rows.clone()).expect("echelon rows are independent")
    }
}

/// Rows `m * g` spanning `(gens)_d`, before echelonization.
pub fn macaulay_rows<K: Field>(k: &K, n: usize, gens: &[HomogPoly<K::Elem>], d: usize) -> Result<Vec<Vec<K::Elem>>> {
    let cols = dim_s(n, d);
    let nrows: usize = gens.iter().filter(|g| g.degree() <= d).map(|g| dim_s(n, d - g.degree())).sum();
    caps::check(
        "Macaulay matrix entries",
        nrows as u128 * cols as u128,
        caps::matrix_cap(),
        caps::MATRIX_CAP_ENV,
    )?;
    let mut rows = Vec::with_capacity(nrows);
    for g in gens {
        if g.n() != n {
            return Err(Error::InvalidArgument("generator lives in a different ambient space".into()));
        }
        if g.degree() > d || g.is_zero(k) {
            continue;
        }
        let e = d - g.degree();
        let table = mul_table(n, e, g.degree());
        let gw = g.coeffs().len();
        let support: Vec<(usize, &K::Elem)> = g.coeffs().iter().enumerate().filter(|(_, c)| !k.is_zero(c)).collect();
        for m in 0..dim_s(n, e) {
            let mut v = vec![k.zero(); cols];
            for &(j, c) in &support {
                v[table[m * gw + j] as usize] = c.clone();
            }
            rows.push(v);
        }
    }
    Ok(rows)
}

/// `(gens)_d`, echelonized.
pub fn graded_piece<K: Field>(k: &K, n: usize, gens: &[HomogPoly<K::Elem>], d: usize) -> Result<GradedPiece<K::Elem>> {
    Ok(GradedPiece::span(k, n, d, macaulay_rows(k, n, gens, d)?))
}

/// `HF(d) = dim S_d - dim (gens)_d`.
pub fn hilbert_function<K: Field>(k: &K, n: usize, gens: &[HomogPoly<K::Elem>], d: usize) -> Result<usize> {
    let rows = macaulay_rows(k, n, gens, d)?;
    Ok(dim_s(n, d) - k.rank_of_rows(rows))
}

/// The degree at which a projectively empty `V(gens)` is forced to have
/// `I_D = S_D`: one more than the sum of `deg g - 1` over the `n + 1`
/// largest generator degrees.
pub fn emptiness_degree(n: usize, gens_degrees: &[usize]) -> usize {
    let mut degs: Vec<usize> = gens_degrees.to_vec();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    degs.iter().take(n + 1).map(|&e| e.saturating_sub(1)).sum::<usize>() + 1
}

fn nonzero_gens<K: Field>(k: &K, gens: &[HomogPoly<K::Elem>]) -> Vec<HomogPoly<K::Elem>> {
    gens.iter().filter(|g| !g.is_zero(k)).cloned().collect()
}

/// `true` iff `V(gens)` has no point over the algebraic closure. Exact: if
/// the variety is empty the ideal contains `S_D` at the emptiness degree, and
/// if it is nonempty no power of the irrelevant ideal lies in it.
pub fn is_empty_over_closure<K: Field>(k: &K, n: usize, gens: &[HomogPoly<K::Elem>]) -> Result<bool> {
    let gens = nonzero_gens(k, gens);
    if gens.iter().any(|g| g.degree() == 0) {
        return Ok(true);
    }
    if gens.len() <= n {
        // n or fewer hypersurfaces in P^n always meet.
        return Ok(false);
    }
    let degs: Vec<usize> = gens.iter().map(|g| g.degree()).collect();
    let d_star = emptiness_degree(n, &degs);
    Ok(hilbert_function(k, n, &gens, d_star)? == 0)
}

/// A point over `F_{q^r}`, printed `[a:b:c]@r`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Witness {
    pub r: u32,
    pub point: ProjPoint<Fe>,
}

impl Witness {
    pub fn render(&self, base: &Gf) -> String {
        let ext = base.extension(self.r).expect("witness field was constructible");
        let c = format_coords(&ext, self.point.coords());
        if self.r == 1 {
            c
        } else {
            format!("{c}@{}", self.r)
        }
    }

    pub fn parse(base: &Gf, text: &str) -> Result<Self> {
        let (coords, r) = match text.trim().split_once('@') {
            Some((c, r)) => (c, r.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad extension degree in '{text}'")))?),
            None => (text, 1),
        };
        let ext = base.extension(r)?;
        let raw = parse_coords(&ext, coords)?;
        Ok(Witness {
            r,
            point: ProjPoint::new(&ext, raw)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emptiness {
    Empty,
    Nonempty { witness: Option<Witness> },
    Inconclusive(String),
}

impl Emptiness {
    pub fn is_empty(&self) -> Option<bool> {
        match self {
            Emptiness::Empty => Some(true),
            Emptiness::Nonempty { .. } => Some(false),
            Emptiness::Inconclusive(_) => None,
        }
    }
}

/// Default extension bound for witness searches.
pub fn default_r_cap(gens: &[HomogPoly<Fe>]) -> u32 {
    (gens.iter().map(|g| g.degree() as u32).sum::<u32>()).max(4)
}

/// Decides projective emptiness and, when nonempty, looks for a point over
/// `F_{q^r}` for `r <= r_cap` (within the point-enumeration cap).
pub fn is_empty_projective(k: &Gf, n: usize, gens: &[HomogPoly<Fe>], r_cap: u32) -> Emptiness {
    match is_empty_over_closure(k, n, gens) {
        Ok(true) => Emptiness::Empty,
        Ok(false) => Emptiness::Nonempty {
            witness: find_point(k, n, gens, r_cap).ok().flatten(),
        },
        Err(e) => match find_point(k, n, gens, r_cap) {
            Ok(Some(w)) => Emptiness::Nonempty { witness: Some(w) },
            _ => Emptiness::Inconclusive(e.to_string()),
        },
    }
}

/// Number of points of `P^n(F_Q)`.
pub fn pn_count(q: u128, n: usize) -> u128 {
    (0..=n as u32).map(|i| q.pow(i)).sum()
}

/// All normalized points of `P^n(F)`, ordered by chart then coordinates.
pub fn projective_points(field: &Gf, n: usize) -> Result<impl Iterator<Item = ProjPoint<Fe>>> {
    let q = field.q() as u64;
    caps::check("point enumeration", pn_count(q as u128, n), caps::point_cap(), caps::POINT_CAP_ENV)?;
    Ok((0..=n).flat_map(move |lead| {
        let free = n - lead;
        (0..q.pow(free as u32)).map(move |mut idx| {
            let mut coords = vec![Fe::ZERO; n + 1];
            coords[lead] = Fe::ONE;
            for c in coords[lead + 1..].iter_mut().rev() {
                *c = Fe((idx % q) as u32);
                idx /= q;
            }
            ProjPoint::from_normalized(coords)
        })
    }))
}

/// First point of `V(gens)` over `F_{q^r}`, `r = 1..=r_cap`.
pub fn find_point(k: &Gf, n: usize, gens: &[HomogPoly<Fe>], r_cap: u32) -> Result<Option<Witness>> {
    for r in 1..=r_cap {
        let ext = match k.extension(r) {
            Ok(e) => e,
            Err(_) => break,
        };
        if pn_count(ext.q() as u128, n) > caps::point_cap() {
            break;
        }
        let emb = k.embedding_into(&ext)?;
        let lifted: Vec<HomogPoly<Fe>> = gens.iter().map(|g| g.embed(&emb)).collect();
        for p in projective_points(&ext, n)? {
            if lifted.iter().all(|g| g.eval_point(&ext, &p) == Fe::ZERO) {
                return Ok(Some(Witness { r, point: p }));
            }
        }
    }
    Ok(None)
}

/// Verdict of [`hilbert_dim`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DimVerdict {
    /// Projective dimension; `-1` for the empty scheme.
    Dim(i64),
    Inconclusive,
}

/// Projective dimension of `V(gens)` from the growth of the Hilbert function
/// on `window` consecutive degrees past the largest generator degree. The
/// window slides upward (twice) if the values do not yet fit a polynomial.
pub fn hilbert_dim<K: Field>(k: &K, n: usize, gens: &[HomogPoly<K::Elem>], window: usize) -> Result<DimVerdict> {
    let gens = nonzero_gens(k, gens);
    if is_empty_over_closure(k, n, &gens)? {
        return Ok(DimVerdict::Dim(-1));
    }
    let start = gens.iter().map(|g| g.degree()).max().unwrap_or(0) + 1;
    let window = window.max(3);
    let mut values: Vec<i64> = Vec::new();
    let mut lo = start;
    for _attempt in 0..3 {
        while values.len() < window {
            values.push(hilbert_function(k, n, &gens, lo + values.len())? as i64);
        }
        if let Some(dim) = polynomial_degree(&values) {
            return Ok(DimVerdict::Dim(dim));
        }
        lo += window / 2;
        values.drain(..window / 2);
    }
    Ok(DimVerdict::Inconclusive)
}

/// Degree of the polynomial interpolating `values` if some finite difference
/// is a positive constant verified on at least two entries; `-1` if all
/// values vanish.
fn polynomial_degree(values: &[i64]) -> Option<i64> {
    if values.iter().all(|&v| v == 0) {
        return Some(-1);
    }
    let mut diffs = values.to_vec();
    for j in 0..values.len() - 1 {
        if diffs.len() >= 2 && diffs.iter().all(|&v| v == diffs[0]) && diffs[0] > 0 {
            return Some(j as i64);
        }
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
    }
    None
}

/// A closed point of `P^n_{F_q}`: the Galois orbit of a point over
/// `F_{q^deg}`, stored through its least conjugate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ClosedPoint {
    base: Gf,
    residue: Gf,
    point: ProjPoint<Fe>,
}

impl ClosedPoint {
    /// The closed point through a geometric point with coordinates in
    /// `coord_field ⊇ base`.
    pub fn new(base: &Gf, coord_field: &Gf, coords: Vec<Fe>) -> Result<Self> {
        let p = ProjPoint::new(coord_field, coords)?;
        let big_r = coord_field.s() / base.s();
        base.embedding_into(coord_field)?;
        let q = base.q() as u64;
        let frob = |pt: &ProjPoint<Fe>| pt.map(|c| coord_field.pow(c, q));
        let mut deg = 1u32;
        let mut cur = frob(&p);
        while cur != p {
            cur = frob(&cur);
            deg += 1;
        }
        debug_assert!(big_r % deg == 0);
        let residue = base.extension(deg)?;
        let down = residue.embedding_into(coord_field)?;
        let mut conj = p.clone();
        let mut best: Option<ProjPoint<Fe>> = None;
        for _ in 0..deg {
            let mapped = conj.map(|&c| down.preimage(c).expect("coordinates lie in the residue field"));
            if best.as_ref().is_none_or(|b| mapped < *b) {
                best = Some(mapped);
            }
            conj = frob(&conj);
        }
        Ok(ClosedPoint {
            base: base.clone(),
            residue,
            point: best.expect("deg >= 1"),
        })
    }

    pub fn rational(base: &Gf, coords: Vec<Fe>) -> Result<Self> {
        Self::new(base, base, coords)
    }

    pub fn parse(base: &Gf, text: &str) -> Result<Self> {
        let w = Witness::parse(base, text)?;
        let ext = base.extension(w.r)?;
        Self::new(base, &ext, w.point.coords().to_vec())
    }

    pub fn degree(&self) -> u32 {
        self.residue.s() / self.base.s()
    }

    pub fn base(&self) -> &Gf {
        &self.base
    }

    pub fn residue_field(&self) -> &Gf {
        &self.residue
    }

    /// The least conjugate, with coordinates in the residue field.
    pub fn representative(&self) -> &ProjPoint<Fe> {
        &self.point
    }

    pub fn n(&self) -> usize {
        self.point.n()
    }

    /// All `deg` geometric points of the orbit, over the residue field.
    pub fn conjugates(&self) -> Vec<ProjPoint<Fe>> {
        let q = self.base.q() as u64;
        let mut out = Vec::with_capacity(self.degree() as usize);
        let mut cur = self.point.clone();
        for _ in 0..self.degree() {
            out.push(cur.clone());
            cur = cur.map(|c| self.residue.pow(c, q));
        }
        out
    }

    pub fn witness(&self) -> Witness {
        Witness {
            r: self.degree(),
            point: self.point.clone(),
        }
    }

    /// `f` at the representative, in the residue field. Points are
    /// normalized, so this is `x_j^{-d} f` on the first chart containing it.
    pub fn value(&self, f: &HomogPoly<Fe>) -> Result<Fe> {
        let emb = self.base.embedding_into(&self.residue)?;
        Ok(f.embed(&emb).eval_point(&self.residue, &self.point))
    }

    /// `F_q`-linear coordinates of an element of the residue field:
    /// `Tr(omega^j * v)` for `j < deg`.
    pub fn coordinates(&self, v: Fe) -> Result<Vec<Fe>> {
        let omega = self.residue.omega();
        let mut out = Vec::with_capacity(self.degree() as usize);
        let mut scale = Fe::ONE;
        for _ in 0..self.degree() {
            out.push(self.residue.relative_trace(self.residue.mul(&scale, &v), &self.base)?);
            scale = self.residue.mul(&scale, &omega);
        }
        Ok(out)
    }
}

impl fmt::Display for ClosedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.witness().render(&self.base))
    }
}

/// Closed subscheme of `P^n_{F_q}`: an ideal, or a reduced finite set of
/// closed points.
#[derive(Clone, Debug)]
pub struct SubschemeSpec {
    field: Gf,
    n: usize,
    gens: Vec<HomogPoly<Fe>>,
    points: Option<Vec<ClosedPoint>>,
}

impl SubschemeSpec {
    pub fn from_ideal(field: &Gf, n: usize, gens: Vec<HomogPoly<Fe>>) -> Result<Self> {
        if gens.iter().any(|g| g.n() != n) {
            return Err(Error::InvalidArgument("generator lives in a different ambient space".into()));
        }
        Ok(SubschemeSpec {
            field: field.clone(),
            n,
            gens,
            points: None,
        })
    }

    pub fn from_points(field: &Gf, n: usize, points: Vec<ClosedPoint>) -> Result<Self> {
        if points.iter().any(|p| p.n() != n || p.base() != field) {
            return Err(Error::InvalidArgument("closed point does not belong to this P^n".into()));
        }
        let mut pts = points;
        pts.sort_by(|a, b| (a.degree(), a.representative()).cmp(&(b.degree(), b.representative())));
        pts.dedup();
        Ok(SubschemeSpec {
            field: field.clone(),
            n,
            gens: Vec::new(),
            points: Some(pts),
        })
    }

    /// All of `P^n` (the zero ideal).
    pub fn whole(field: &Gf, n: usize) -> Self {
        SubschemeSpec {
            field: field.clone(),
            n,
            gens: Vec::new(),
            points: None,
        }
    }

    /// The empty subscheme (the unit ideal).
    pub fn empty(field: &Gf, n: usize) -> Self {
        SubschemeSpec {
            field: field.clone(),
            n,
            gens: Vec::new(),
            points: Some(Vec::new()),
        }
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> Option<&[ClosedPoint]> {
        self.points.as_deref()
    }

    pub fn is_empty_set(&self) -> bool {
        matches!(&self.points, Some(p) if p.is_empty())
    }

    /// Total degree `sum deg(w)` of a point set.
    pub fn point_degree(&self) -> Option<u32> {
        self.points.as_ref().map(|p| p.iter().map(|w| w.degree()).sum())
    }

    /// Homogeneous generators. For point sets these are a basis of the
    /// vanishing piece in degree `max(1, total degree)`, which generates the
    /// ideal up to saturation.
    pub fn ideal_gens(&self) -> Result<Vec<HomogPoly<Fe>>> {
        match &self.points {
            None => Ok(self.gens.clone()),
            Some(p) if p.is_empty() => Ok(vec![HomogPoly::constant(&self.field, self.n, Fe::ONE)]),
            Some(_) => {
                let d = self.point_degree().unwrap_or(1).max(1) as usize;
                Ok(self.vanishing_piece(d)?.basis_forms())
            }
        }
    }

    /// Ideal sum: the scheme-theoretic intersection.
    pub fn intersect(&self, other: &SubschemeSpec) -> Result<SubschemeSpec> {
        let mut gens = self.ideal_gens()?;
        gens.extend(other.ideal_gens()?);
        SubschemeSpec::from_ideal(&self.field, self.n, gens)
    }

    pub fn with_form(&self, f: &HomogPoly<Fe>) -> Result<SubschemeSpec> {
        let mut gens = self.ideal_gens()?;
        gens.push(f.clone());
        SubschemeSpec::from_ideal(&self.field, self.n, gens)
    }

    /// `I^Z_d`. Point sets use the kernel of evaluation at every closed point;
    /// ideals use the degree-`d` piece of the saturation, computed as
    /// `{f : x_i^k f in I for all i}` with `k` increased until it stabilizes.
    pub fn vanishing_piece(&self, d: usize) -> Result<GradedPiece<Fe>> {
        let k = &self.field;
        match &self.points {
            Some(pts) => {
                let dim = dim_s(self.n, d);
                let mut functionals: Vec<Vec<Fe>> = Vec::new();
                for w in pts {
                    let vals = monomial_values(w, d)?;
                    let coords: Vec<Vec<Fe>> = vals.iter().map(|&v| w.coordinates(v)).collect::<Result<_>>()?;
                    for j in 0..w.degree() as usize {
                        functionals.push(coords.iter().map(|c| c[j]).collect());
                    }
                }
                if functionals.is_empty() {
                    return Ok(GradedPiece::full(k, self.n, d));
                }
                let ker = linalg::kernel(k, &functionals, dim);
                Ok(GradedPiece::span(k, self.n, d, ker))
            }
            None => saturated_piece(k, self.n, &self.gens, d),
        }
    }

    /// Least `c` with `S_1 * I_e = I_{e+1}` for every `e` in `[c, d_max)`.
    pub fn stabilization_degree(&self, d_max: usize) -> Result<Option<usize>> {
        let pieces: Vec<GradedPiece<Fe>> = (0..=d_max).map(|d| self.vanishing_piece(d)).collect::<Result<_>>()?;
        let mut c = None;
        for e in (0..d_max).rev() {
            if pieces[e].times_linear(&self.field).rank() == pieces[e + 1].rank() {
                c = Some(e);
            } else {
                break;
            }
        }
        Ok(c)
    }

    /// Values of `f` at the representatives of the closed points.
    pub fn restrict_to_finite(&self, f: &HomogPoly<Fe>) -> Result<Vec<(Gf, Fe)>> {
        let pts = self
            .points
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("restriction needs an explicit point set".into()))?;
        pts.iter().map(|w| Ok((w.residue_field().clone(), w.value(f)?))).collect()
    }
}

/// Values of every degree-`d` monomial at the representative of `w`.
pub(crate) fn monomial_values(w: &ClosedPoint, d: usize) -> Result<Vec<Fe>> {
    let k = w.residue_field();
    let n = w.n();
    let b = basis(n, d);
    let coords = w.representative().coords();
    let powers: Vec<Vec<Fe>> = coords
        .iter()
        .map(|x| (0..=d as u64).map(|e| k.pow(x, e)).collect())
        .collect();
    Ok(b.iter()
        .map(|e| {
            e.iter()
                .enumerate()
                .fold(Fe::ONE, |acc, (i, &x)| k.mul(&acc, &powers[i][x as usize]))
        })
        .collect())
}

/// Degree-`d` piece of the saturation of `(gens)`.
pub fn saturated_piece(k: &Gf, n: usize, gens: &[HomogPoly<Fe>], d: usize) -> Result<GradedPiece<Fe>> {
    let base = graded_piece(k, n, gens, d)?;
    if gens.is_empty() {
        return Ok(base);
    }
    let mut best = base;
    let max_k = gens.iter().map(|g| g.degree()).max().unwrap_or(1).max(1) * (n + 1);
    let mut stable_for = 0;
    for shift in 1..=max_k {
        let piece = colon_by_powers(k, n, gens, d, shift)?;
        if piece.rank() > best.rank() {
            best = piece;
            stable_for = 0;
        } else {
            stable_for += 1;
            if stable_for >= 2 {
                break;
            }
        }
    }
    Ok(best)
}

/// `{f in S_d : x_i^e f in (gens)_{d+e} for all i}`.
fn colon_by_powers(k: &Gf, n: usize, gens: &[HomogPoly<Fe>], d: usize, e: usize) -> Result<GradedPiece<Fe>> {
    let big = graded_piece(k, n, gens, d + e)?;
    let dim_d = dim_s(n, d);
    let dim_big = dim_s(n, d + e);
    let table = mul_table(n, e, d);
    let bas_e = basis(n, e);
    // columns of the linear map f -> (x_i^e f mod I)_i, one per monomial of S_d
    let mut images: Vec<Vec<Fe>> = Vec::with_capacity(dim_d);
    for m in 0..dim_d {
        let mut img = Vec::with_capacity((n + 1) * dim_big);
        for i in 0..=n {
            let mut pure = vec![0u8; n + 1];
            pure[i] = e as u8;
            let pi = bas_e.iter().position(|x| x == pure.as_slice()).expect("pure power present");
            let mut v = vec![Fe::ZERO; dim_big];
            v[table[pi * dim_d + m] as usize] = Fe::ONE;
            img.extend(linalg::reduce(k, big.rows(), big.pivots(), &v));
        }
        images.push(img);
    }
    // kernel of c -> sum_m c_m images[m]
    let width = images.first().map_or(0, |r| r.len());
    let transposed: Vec<Vec<Fe>> = (0..width).map(|j| images.iter().map(|r| r[j]).collect()).collect();
    let ker = linalg::kernel(k, &transposed, dim_d);
    Ok(GradedPiece::span(k, n, d, ker))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::homog::text::parse_poly;

    fn f2() -> Gf {
        make_field(2, 1).unwrap()
    }

    fn polys(k: &Gf, n: usize, s: &[&str]) -> Vec<HomogPoly<Fe>> {
        s.iter().map(|t| parse_poly(k, n, t, None).unwrap()).collect()
    }

    #[test]
    fn graded_piece_examples() {
        let k = f2();
        assert_eq!(graded_piece(&k, 2, &polys(&k, 2, &["x0"]), 2).unwrap().rank(), 3);
        assert_eq!(graded_piece(&k, 2, &polys(&k, 2, &["x0", "x1"]), 1).unwrap().rank(), 2);
        // x0*x1 times the three linear monomials: independent products
        assert_eq!(graded_piece(&k, 2, &polys(&k, 2, &["x0*x1"]), 3).unwrap().rank(), 3);
    }

    #[test]
    fn vanishing_piece_examples() {
        let k = f2();
        let pt = ClosedPoint::rational(&k, vec![Fe(0), Fe(0), Fe(1)]).unwrap();
        let z = SubschemeSpec::from_points(&k, 2, vec![pt]).unwrap();
        assert_eq!(z.vanishing_piece(1).unwrap().rank(), 2);
        assert_eq!(z.vanishing_piece(2).unwrap().rank(), 5);
        let zi = SubschemeSpec::from_ideal(&k, 2, polys(&k, 2, &["x0", "x1"])).unwrap();
        assert_eq!(zi.vanishing_piece(2).unwrap().rank(), 5);
        assert_eq!(zi.vanishing_piece(2).unwrap(), z.vanishing_piece(2).unwrap());
    }

    #[test]
    fn saturation_recovers_the_line() {
        let k = f2();
        let z = SubschemeSpec::from_ideal(&k, 2, polys(&k, 2, &["x0^2", "x0*x1", "x0*x2"])).unwrap();
        let p1 = z.vanishing_piece(1).unwrap();
        assert_eq!(p1.rank(), 1);
        assert!(p1.contains(&k, &HomogPoly::var(&k, 2, 0)));
    }

    #[test]
    fn stabilization_examples() {
        let k = f2();
        let pt = ClosedPoint::rational(&k, vec![Fe(0), Fe(0), Fe(1)]).unwrap();
        let z = SubschemeSpec::from_points(&k, 2, vec![pt]).unwrap();
        assert_eq!(z.stabilization_degree(5).unwrap(), Some(1));
        assert_eq!(SubschemeSpec::empty(&k, 2).stabilization_degree(5).unwrap(), Some(0));
        let dbl = SubschemeSpec::from_ideal(&k, 2, polys(&k, 2, &["x0^2"])).unwrap();
        let c = dbl.stabilization_degree(6).unwrap().unwrap();
        assert!(c <= 2);
        for d in c..6 {
            let lhs = dbl.vanishing_piece(d).unwrap().times_linear(&k);
            assert_eq!(lhs.rank(), dbl.vanishing_piece(d + 1).unwrap().rank());
        }
    }

    #[test]
    fn emptiness_examples() {
        let k = f2();
        assert_eq!(is_empty_projective(&k, 2, &polys(&k, 2, &["x0", "x1", "x2"]), 4), Emptiness::Empty);
        let v = is_empty_projective(&k, 2, &polys(&k, 2, &["x0", "x1"]), 4);
        let expected = Witness {
            r: 1,
            point: ProjPoint::new(&k, vec![Fe(0), Fe(0), Fe(1)]).unwrap(),
        };
        assert_eq!(v, Emptiness::Nonempty { witness: Some(expected) });
        let gens = polys(&k, 2, &["x0^2 + x1*x2", "x0"]);
        let Emptiness::Nonempty { witness: Some(w) } = is_empty_projective(&k, 2, &gens, 4) else {
            panic!("expected a witness");
        };
        assert!(gens.iter().all(|g| g.eval_point(&k, &w.point) == Fe(0)));
        assert_eq!(w.render(&k), "[0:1:0]");
    }

    #[test]
    fn conic_without_rational_points_is_nonempty() {
        // x0^2 + x0*x1 + x1^2 = x2 = 0 has only the two conjugate F_4 points.
        let k = f2();
        let gens = polys(&k, 2, &["x0^2 + x0*x1 + x1^2", "x2"]);
        let Emptiness::Nonempty { witness: Some(w) } = is_empty_projective(&k, 2, &gens, 4) else {
            panic!("expected nonempty");
        };
        assert_eq!(w.r, 2);
    }

    #[test]
    fn hilbert_dim_examples() {
        let k = f2();
        assert_eq!(hilbert_dim(&k, 2, &polys(&k, 2, &["x0"]), 6).unwrap(), DimVerdict::Dim(1));
        assert_eq!(hilbert_dim(&k, 2, &polys(&k, 2, &["x0", "x1"]), 6).unwrap(), DimVerdict::Dim(0));
        assert_eq!(hilbert_dim(&k, 2, &polys(&k, 2, &["x0*x1"]), 6).unwrap(), DimVerdict::Dim(1));
        for d in 2..8 {
            assert_eq!(hilbert_function(&k, 2, &polys(&k, 2, &["x0*x1"]), d).unwrap(), 2 * d + 1);
        }
        assert_eq!(hilbert_dim(&k, 2, &polys(&k, 2, &["x0", "x1", "x2"]), 6).unwrap(), DimVerdict::Dim(-1));
        assert_eq!(hilbert_dim(&k, 3, &[], 6).unwrap(), DimVerdict::Dim(3));
    }

    #[test]
    fn restriction_examples() {
        let k = f2();
        let y = SubschemeSpec::from_points(&k, 2, vec![ClosedPoint::rational(&k, vec![Fe(1), Fe(1), Fe(1)]).unwrap()]).unwrap();
        assert_eq!(y.restrict_to_finite(&HomogPoly::var(&k, 2, 0)).unwrap()[0].1, Fe(1));
        let y = SubschemeSpec::from_points(&k, 2, vec![ClosedPoint::rational(&k, vec![Fe(1), Fe(0), Fe(0)]).unwrap()]).unwrap();
        assert_eq!(y.restrict_to_finite(&HomogPoly::var(&k, 2, 1)).unwrap()[0].1, Fe(0));

        // the degree-2 point of P^1 cut out by x0^2 + x0*x1 + x1^2
        let f4 = make_field(2, 2).unwrap();
        let alpha = f4.generator();
        assert_eq!(f4.add(&f4.add(&f4.mul(&alpha, &alpha), &alpha), &Fe::ONE), Fe::ZERO);
        let w = ClosedPoint::new(&k, &f4, vec![Fe::ONE, alpha]).unwrap();
        assert_eq!(w.degree(), 2);
        let y = SubschemeSpec::from_points(&k, 1, vec![w.clone()]).unwrap();
        let (field, val) = y.restrict_to_finite(&parse_poly(&k, 1, "x0 + x1", None).unwrap()).unwrap()[0].clone();
        assert_eq!(field, f4);
        let rep = w.representative().coords()[1];
        assert_eq!(val, f4.add(&Fe::ONE, &rep));
        let conj: Vec<_> = w.conjugates().iter().map(|p| p.coords()[1]).collect();
        assert!(conj.contains(&alpha));
    }

    #[test]
    fn finite_point_sets_impose_independent_conditions() {
        for p in [2u64, 3] {
            let k = make_field(p, 1).unwrap();
            let k2 = k.extension(2).unwrap();
            let rational: Vec<ClosedPoint> = projective_points(&k, 2)
                .unwrap()
                .map(|pt| ClosedPoint::rational(&k, pt.coords().to_vec()).unwrap())
                .collect();
            let quadratic: Vec<ClosedPoint> = projective_points(&k2, 2)
                .unwrap()
                .filter_map(|pt| ClosedPoint::new(&k, &k2, pt.coords().to_vec()).ok())
                .filter(|w| w.degree() == 2)
                .take(3)
                .collect();
            let sets: Vec<Vec<ClosedPoint>> = vec![
                rational[..1].to_vec(),
                rational[..3].to_vec(),
                vec![rational[0].clone(), quadratic[0].clone()],
                vec![quadratic[1].clone(), quadratic[2].clone()],
                rational[2..6].to_vec(),
            ];
            for pts in sets {
                let z = SubschemeSpec::from_points(&k, 2, pts).unwrap();
                let total = z.point_degree().unwrap() as usize;
                let c = z.stabilization_degree(6).unwrap().expect("stabilizes");
                for d in c.max(total)..=6 {
                    assert_eq!(z.vanishing_piece(d).unwrap().rank(), dim_s(2, d) - total);
                }
            }
        }
    }

    #[test]
    fn point_set_generators_cut_out_the_points() {
        let k = f2();
        let f4 = make_field(2, 2).unwrap();
        let w = ClosedPoint::new(&k, &f4, vec![Fe::ONE, f4.generator(), Fe::ZERO]).unwrap();
        let r = ClosedPoint::rational(&k, vec![Fe(0), Fe(1), Fe(1)]).unwrap();
        let z = SubschemeSpec::from_points(&k, 2, vec![w, r]).unwrap();
        let gens = z.ideal_gens().unwrap();
        assert_eq!(hilbert_dim(&k, 2, &gens, 6).unwrap(), DimVerdict::Dim(0));
        let on: usize = (1..=2)
            .map(|r| {
                let ext = k.extension(r).unwrap();
                let emb = k.embedding_into(&ext).unwrap();
                projective_points(&ext, 2)
                    .unwrap()
                    .filter(|p| gens.iter().all(|g| g.embed(&emb).eval_point(&ext, p) == Fe(0)))
                    .count()
            })
            .sum();
        // one rational point seen twice (over F_2 and F_4) plus two conjugates
        assert_eq!(on, 4);
    }
}
