//! Reference implementations of the section predicates. The census engine
//! has faster specialised versions that are cross-checked against these.

use serde::{Deserialize, Serialize};

use crate::caps;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::text::format_poly;
use crate::homog::{dim_s, poly_divides, HomogPoly};
use crate::ideal::{
    default_r_cap, find_point, graded_piece, hilbert_dim, is_empty_over_closure, is_empty_projective, ClosedPoint,
    DimVerdict, Emptiness, SubschemeSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    True,
    False,
    NotEvaluated,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub flag: Flag,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn yes() -> Self {
        Verdict {
            flag: Flag::True,
            witness: None,
        }
    }

    pub fn no(witness: impl Into<String>) -> Self {
        Verdict {
            flag: Flag::False,
            witness: Some(witness.into()),
        }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict {
            flag: Flag::Inconclusive,
            witness: Some(reason.into()),
        }
    }

    pub fn not_evaluated() -> Self {
        Verdict {
            flag: Flag::NotEvaluated,
            witness: None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.flag {
            Flag::True => Some(true),
            Flag::False => Some(false),
            _ => None,
        }
    }

    pub fn is_true(&self) -> bool {
        self.flag == Flag::True
    }
}

/// Determinant of a square matrix of forms (each row homogeneous).
fn det<K: Field>(k: &K, m: &[Vec<HomogPoly<K::Elem>>]) -> Result<HomogPoly<K::Elem>> {
    if m.len() == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc: Option<HomogPoly<K::Elem>> = None;
    for j in 0..m.len() {
        let minor: Vec<Vec<HomogPoly<K::Elem>>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| x.clone()).collect())
            .collect();
        let mut term = m[0][j].mul(k, &det(k, &minor)?)?;
        if j % 2 == 1 {
            term = term.neg(k);
        }
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(k, &term)?,
        });
    }
    Ok(acc.expect("nonempty matrix"))
}

/// All `size x size` minors of the Jacobian of `polys` (rows) with respect
/// to `x_0..x_n` (columns), taking every `size`-subset of rows and columns.
pub fn jacobian_minors<K: Field>(k: &K, polys: &[HomogPoly<K::Elem>], size: usize) -> Result<Vec<HomogPoly<K::Elem>>> {
    let polys: Vec<&HomogPoly<K::Elem>> = polys.iter().filter(|p| p.degree() > 0).collect();
    if size == 0 || size > polys.len() {
        return Ok(Vec::new());
    }
    let n = polys[0].n();
    let jac: Vec<Vec<HomogPoly<K::Elem>>> = polys.iter().map(|p| p.gradient(k)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for rows in subsets(polys.len(), size) {
        for cols in subsets(n + 1, size) {
            let m: Vec<Vec<HomogPoly<K::Elem>>> =
                rows.iter().map(|&r| cols.iter().map(|&c| jac[r][c].clone()).collect()).collect();
            let d = det(k, &m)?;
            if !d.is_zero(k) {
                out.push(d);
            }
        }
    }
    Ok(out)
}

pub(crate) fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(size);
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, size, cur, out);
            cur.pop();
        }
    }
    rec(0, n, size, &mut cur, &mut out);
    out
}

/// Generators of the singular scheme of `V(gens) ∩ V(f)` viewed as a
/// complete intersection: the equations themselves plus the maximal minors
/// of their Jacobian. The equations are always included, so the Euler
/// relation is never needed (it fails when `p` divides a degree).
pub fn singular_scheme<K: Field>(k: &K, gens: &[HomogPoly<K::Elem>], f: &HomogPoly<K::Elem>) -> Result<Vec<HomogPoly<K::Elem>>> {
    let mut eqs: Vec<HomogPoly<K::Elem>> = gens.iter().filter(|g| !g.is_zero(k)).cloned().collect();
    eqs.push(f.clone());
    let size = eqs.iter().filter(|g| g.degree() > 0).count();
    let mut out = eqs.clone();
    out.extend(jacobian_minors(k, &eqs, size)?);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothMode {
    Exact,
    /// No singular point over `F_{q^r}` for `r <= B`.
    Bounded(u32),
}

/// Whether `X ∩ H_f` is smooth of dimension `dim X - 1`, for `X` a complete
/// intersection given by its generators.
pub fn is_smooth_section(x: &SubschemeSpec, f: &HomogPoly<Fe>, mode: SmoothMode) -> Result<Verdict> {
    let k = x.field();
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    if x.points().is_some_and(|p| !p.is_empty()) {
        return Err(Error::Unsupported("smoothness of sections of a finite scheme".into()));
    }
    let sing = singular_scheme(k, &x.ideal_gens()?, f)?;
    match mode {
        SmoothMode::Exact => match is_empty_projective(k, x.n(), &sing, default_r_cap(&sing).min(4)) {
            Emptiness::Empty => Ok(Verdict::yes()),
            Emptiness::Nonempty { witness } => Ok(Verdict::no(
                witness.map_or_else(|| "singular point beyond the search bound".into(), |w| w.render(k)),
            )),
            Emptiness::Inconclusive(r) => Ok(Verdict::inconclusive(r)),
        },
        SmoothMode::Bounded(b) => match find_point(k, x.n(), &sing, b)? {
            Some(w) => Ok(Verdict::no(w.render(k))),
            None => Ok(Verdict::yes()),
        },
    }
}

/// Upper bound for `reg(J)` when `V(J)` is finite: `sum d_i - n` over the
/// `n + 1` largest generator degrees, padding with the smallest degree.
fn finite_regularity_bound(n: usize, degs: &[usize]) -> usize {
    let mut degs = degs.to_vec();
    degs.sort_unstable_by(|a, b| b.cmp(a));
    let low = degs.last().copied().unwrap_or(1);
    degs.resize(degs.len().max(n + 1), low);
    (degs[..n + 1].iter().sum::<usize>()).saturating_sub(n).max(1)
}

/// Smoothness of `H_f` on `P^n ∖ Y` for a finite set `Y` of closed points.
///
/// With `J` the singular ideal and `rho` the regularity bound for finite
/// `V(J)`, the length of a finite `V(J)` is `L = HF(S/J, rho)`. If
/// `V(J) ⊆ Y` then `I_Y^L ⊆ J^sat`, and `J^sat` agrees with `J` from degree
/// `rho` on, so `(I_Y^L)_D ⊆ J_D` at `D = max(rho, L deg I_Y)`. That
/// containment certifies `V(J) ⊆ Y`; its failure means a singular point off
/// `Y` (or an infinite `V(J)`, which also has one).
pub fn is_smooth_away_from(k: &Gf, n: usize, f: &HomogPoly<Fe>, y: &[ClosedPoint]) -> Result<Verdict> {
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    let sing: Vec<_> = singular_scheme(k, &[], f)?.into_iter().filter(|g| !g.is_zero(k)).collect();
    if is_empty_over_closure(k, n, &sing)? {
        return Ok(Verdict::yes());
    }
    let ys = SubschemeSpec::from_points(k, n, y.to_vec())?;
    let sing_spec = SubschemeSpec::from_ideal(k, n, sing.clone())?;
    for r in 1..=2 {
        let on_y = crate::scheme::rational_points(&ys, r)?;
        if let Some(p) = crate::scheme::rational_points(&sing_spec, r)?.into_iter().find(|p| !on_y.contains(p)) {
            return Ok(Verdict::no(crate::ideal::Witness { r, point: p }.render(k)));
        }
    }
    if y.is_empty() {
        return Ok(Verdict::no("singular point over the algebraic closure"));
    }
    let degs: Vec<usize> = sing.iter().map(|g| g.degree()).collect();
    let rho = finite_regularity_bound(n, &degs);
    let length = crate::ideal::hilbert_function(k, n, &sing, rho)?;
    let iy = ys.ideal_gens()?;
    let e = iy.iter().map(|g| g.degree()).max().unwrap_or(1);
    let d = rho.max(length * e);
    caps::check("Macaulay matrix", (dim_s(n, d) as u128).pow(2), caps::matrix_cap(), caps::MATRIX_CAP_ENV)?;
    let mut power = graded_piece(k, n, &iy, e)?;
    for j in 2..=length {
        let prod: Vec<HomogPoly<Fe>> = power
            .basis_forms()
            .iter()
            .flat_map(|a| iy.iter().map(move |b| a.mul(k, b)))
            .collect::<Result<_>>()?;
        power = graded_piece(k, n, &prod, j * e)?;
    }
    let yd = graded_piece(k, n, &power.basis_forms(), d)?;
    if yd.is_subspace_of(k, &graded_piece(k, n, &sing, d)?) {
        Ok(Verdict::yes())
    } else {
        Ok(Verdict::no("singular point off Y over the algebraic closure"))
    }
}

/// Forms of degree `e` whose first nonzero coefficient is 1.
pub(crate) fn normalized_forms(field: &Gf, n: usize, e: usize) -> Result<impl Iterator<Item = HomogPoly<Fe>>> {
    let dim = dim_s(n, e);
    let q = field.q() as u128;
    let count = (q.checked_pow(dim as u32).unwrap_or(u128::MAX) - 1) / (q - 1);
    caps::check("factor candidates", count, caps::census_cap(), caps::CENSUS_CAP_ENV)?;
    let q = q as u64;
    Ok((0..dim).flat_map(move |lead| {
        let free = dim - lead - 1;
        (0..q.pow(free as u32)).map(move |mut idx| {
            let mut c = vec![Fe::ZERO; dim];
            c[lead] = Fe::ONE;
            for x in c[lead + 1..].iter_mut().rev() {
                *x = Fe((idx % q) as u32);
                idx /= q;
            }
            HomogPoly::from_coeffs(n, e, c).expect("dimension matches")
        })
    }))
}

/// Squarefreeness of `f`. Over a perfect field reducedness is stable under
/// base change, so searching repeated factors over `F_q` decides geometric
/// reducedness as well.
pub fn is_reduced_section(k: &Gf, f: &HomogPoly<Fe>) -> Result<Verdict> {
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    for e in 1..=f.degree() / 2 {
        for g in normalized_forms(k, f.n(), e)? {
            let sq = g.mul(k, &g)?;
            if poly_divides(k, &sq, f)?.is_some() {
                return Ok(Verdict::no(format!("({})^2", format_poly(k, &g))));
            }
        }
    }
    Ok(Verdict::yes())
}

/// Irreducibility of `f` over `F_q`, or over the algebraic closure.
///
/// Over `F_q`: no factor of degree `1..=d/2`. Geometrically: if `f` is
/// irreducible over `F_q` but not over the closure, its geometric components
/// form one Frobenius orbit of some size `r >= 2`, each of degree `d/r` and
/// definable over `F_{q^r}`. So it suffices to look for a factor of degree
/// `d/r` over `F_{q^r}` for every divisor `r >= 2` of `d`; in particular no
/// field beyond `F_{q^d}` is needed.
pub fn is_irreducible_section(k: &Gf, f: &HomogPoly<Fe>, geometric: bool) -> Result<Verdict> {
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    let d = f.degree();
    if d == 0 {
        return Ok(Verdict::no("constant form"));
    }
    for e in 1..=d / 2 {
        for g in normalized_forms(k, f.n(), e)? {
            if poly_divides(k, &g, f)?.is_some() {
                return Ok(Verdict::no(format_poly(k, &g)));
            }
        }
    }
    if geometric {
        for r in (2..=d).filter(|r| d % r == 0) {
            let ext = k.extension(r as u32)?;
            let emb = k.embedding_into(&ext)?;
            let fe = f.embed(&emb);
            let e = d / r;
            let candidates = normalized_forms(&ext, f.n(), e).map_err(|err| match err {
                Error::CapExceeded { size, cap, env, .. } => Error::CapExceeded {
                    what: "geometric factor candidates",
                    size,
                    cap,
                    env,
                },
                other => other,
            })?;
            for g in candidates {
                if poly_divides(&ext, &g, &fe)?.is_some() {
                    return Ok(Verdict::no(format!("{}@{r}", format_poly(&ext, &g))));
                }
            }
        }
    }
    Ok(Verdict::yes())
}

/// Normality of `H_f ⊂ P^n`. A hypersurface is Cohen-Macaulay, so it is
/// normal iff it is regular in codimension one, i.e. iff its singular locus
/// has dimension at most `n - 3`.
pub fn is_normal_r1_section(k: &Gf, f: &HomogPoly<Fe>) -> Result<Verdict> {
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    let n = f.n();
    let sing = singular_scheme(k, &[], f)?;
    match hilbert_dim(k, n, &sing, 6)? {
        DimVerdict::Dim(dim) if dim <= n as i64 - 3 => Ok(Verdict::yes()),
        DimVerdict::Dim(dim) => {
            let w = find_point(k, n, &sing, 2)?.map(|w| w.render(k)).unwrap_or_default();
            Ok(Verdict::no(format!("singular locus of dimension {dim} {w}").trim().to_string()))
        }
        DimVerdict::Inconclusive => Ok(Verdict::inconclusive("Hilbert window did not stabilize")),
    }
}

/// Ambient variety `X`, imposed containment `Z`, avoidance set `T`.
#[derive(Clone, Debug)]
pub struct SectionProblem {
    pub x: SubschemeSpec,
    /// Ideals of the irreducible components of `X` (empty when irreducible).
    pub components: Vec<SubschemeSpec>,
    pub z: SubschemeSpec,
    pub t: SubschemeSpec,
    pub m: usize,
}

impl SectionProblem {
    pub fn new(x: SubschemeSpec, components: Vec<SubschemeSpec>, z: SubschemeSpec, t: SubschemeSpec, m: usize) -> Result<Self> {
        let k = x.field().clone();
        let mut gens = x.ideal_gens()?;
        gens.extend(z.ideal_gens()?);
        gens.extend(t.ideal_gens()?);
        if !is_empty_over_closure(&k, x.n(), &gens)? {
            return Err(Error::InvalidArgument("X ∩ Z ∩ T must be empty".into()));
        }
        Ok(SectionProblem { x, components, z, t, m })
    }

    /// `X = P^n`, nothing imposed or avoided.
    pub fn projective_space(k: &Gf, n: usize) -> Self {
        SectionProblem {
            x: SubschemeSpec::whole(k, n),
            components: Vec::new(),
            z: SubschemeSpec::empty(k, n),
            t: SubschemeSpec::empty(k, n),
            m: n,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodFlags {
    pub g1: Verdict,
    pub g2: Verdict,
    pub g3: Verdict,
}

fn dim_of(k: &Gf, n: usize, gens: &[HomogPoly<Fe>]) -> Result<Option<i64>> {
    Ok(match hilbert_dim(k, n, gens, 6)? {
        DimVerdict::Dim(d) => Some(d),
        DimVerdict::Inconclusive => None,
    })
}

/// Conditions (1)-(3) of a good section: `H_f` misses `T ∩ X`, cuts a
/// Cartier divisor, and contains no component of the singular locus.
pub fn is_good_section(problem: &SectionProblem, f: &HomogPoly<Fe>) -> Result<GoodFlags> {
    let x = &problem.x;
    let k = x.field();
    let n = x.n();
    let xg = x.ideal_gens()?;

    let mut g1_gens = xg.clone();
    g1_gens.extend(problem.t.ideal_gens()?);
    g1_gens.push(f.clone());
    let g1 = match is_empty_projective(k, n, &g1_gens, default_r_cap(&g1_gens).min(4)) {
        Emptiness::Empty => Verdict::yes(),
        Emptiness::Nonempty { witness } => Verdict::no(witness.map_or_else(|| "point off the search bound".into(), |w| w.render(k))),
        Emptiness::Inconclusive(r) => Verdict::inconclusive(r),
    };

    let g2 = {
        let mut parts: Vec<(String, Vec<HomogPoly<Fe>>)> = vec![("X".into(), xg.clone())];
        for (i, c) in problem.components.iter().enumerate() {
            parts.push((format!("component {i}"), c.ideal_gens()?));
        }
        let mut verdict = Verdict::yes();
        for (name, gens) in parts {
            let mut with_f = gens.clone();
            with_f.push(f.clone());
            match (dim_of(k, n, &gens)?, dim_of(k, n, &with_f)?) {
                (Some(a), Some(b)) if a < 0 || b == a - 1 => {}
                (Some(_), Some(_)) => {
                    verdict = Verdict::no(format!("f vanishes on {name}"));
                    break;
                }
                _ => {
                    verdict = Verdict::inconclusive(format!("dimension of {name} undetermined"));
                    break;
                }
            }
        }
        verdict
    };

    let c = xg.iter().filter(|g| g.degree() > 0 && !g.is_zero(k)).count();
    let g3 = if c == 0 {
        Verdict::yes()
    } else {
        let mut sing = xg.clone();
        sing.extend(jacobian_minors(k, &xg, c)?);
        match dim_of(k, n, &sing)? {
            None => Verdict::inconclusive("dimension of the singular locus undetermined"),
            Some(-1) => Verdict::yes(),
            Some(0) => {
                // a finite singular locus is contained in H_f exactly when
                // some singular point lies on it
                let mut with_f = sing.clone();
                with_f.push(f.clone());
                match is_empty_projective(k, n, &with_f, default_r_cap(&with_f).min(4)) {
                    Emptiness::Empty => Verdict::yes(),
                    Emptiness::Nonempty { witness } => {
                        Verdict::no(witness.map_or_else(|| "singular point on H_f".into(), |w| w.render(k)))
                    }
                    Emptiness::Inconclusive(r) => Verdict::inconclusive(r),
                }
            }
            Some(ds) => {
                let mut with_f = sing.clone();
                with_f.push(f.clone());
                match dim_of(k, n, &with_f)? {
                    Some(dw) if dw < ds => Verdict::yes(),
                    Some(_) => Verdict::no("H_f contains a component of the singular locus"),
                    None => Verdict::inconclusive("dimension undetermined"),
                }
            }
        }
    };
    Ok(GoodFlags { g1, g2, g3 })
}

/// Whether `H_f` meets every stratum `E_J` (including `E_∅ = U`) in a
/// smooth scheme of dimension `dim E_J - 1`; negative dimension means empty.
pub fn is_snc_section(u: &SubschemeSpec, components: &[SubschemeSpec], f: &HomogPoly<Fe>) -> Result<Verdict> {
    let k = u.field();
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    let r = components.len();
    let comp_gens: Vec<Vec<HomogPoly<Fe>>> = components.iter().map(|c| c.ideal_gens()).collect::<Result<_>>()?;
    let ug = u.ideal_gens()?;
    // deepest strata first, so a section through E_J reports a point of E_J
    let mut masks: Vec<u32> = (0u32..(1 << r)).collect();
    masks.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    for mask in masks {
        let mut gens = ug.clone();
        for (i, g) in comp_gens.iter().enumerate() {
            if mask & (1 << i) != 0 {
                gens.extend(g.iter().cloned());
            }
        }
        let sing = singular_scheme(k, &gens, f)?;
        match is_empty_projective(k, u.n(), &sing, 4) {
            Emptiness::Empty => {}
            Emptiness::Nonempty { witness } => {
                let idx: Vec<String> = (0..r).filter(|i| mask & (1 << i) != 0).map(|i| (i + 1).to_string()).collect();
                let w = witness.map_or_else(|| "?".into(), |w| w.render(k));
                return Ok(Verdict::no(format!("E_{{{}}}: {w}", idx.join(","))));
            }
            Emptiness::Inconclusive(e) => return Ok(Verdict::inconclusive(e)),
        }
    }
    Ok(Verdict::yes())
}

/// Checks that every stratum `E_J` is smooth of dimension `dim U - |J|`.
pub fn validate_snc_components(u: &SubschemeSpec, components: &[SubschemeSpec]) -> Result<()> {
    let k = u.field();
    let n = u.n();
    let ug = u.ideal_gens()?;
    let base = match hilbert_dim(k, n, &ug, 6)? {
        DimVerdict::Dim(d) => d,
        DimVerdict::Inconclusive => return Err(Error::Inconclusive("dimension of U".into())),
    };
    for mask in 1u32..(1 << components.len()) {
        let mut gens = ug.clone();
        for (i, c) in components.iter().enumerate() {
            if mask & (1 << i) != 0 {
                gens.extend(c.ideal_gens()?);
            }
        }
        let expected = base - mask.count_ones() as i64;
        let got = match hilbert_dim(k, n, &gens, 6)? {
            DimVerdict::Dim(d) => d,
            DimVerdict::Inconclusive => return Err(Error::Inconclusive("dimension of a stratum".into())),
        };
        if got != expected.max(-1) {
            return Err(Error::InvalidArgument(format!("stratum {mask:b} has dimension {got}, expected {expected}")));
        }
        let size = gens.iter().filter(|g| g.degree() > 0).count();
        let mut sing = gens.clone();
        sing.extend(jacobian_minors(k, &gens, size)?);
        if expected >= 0 && !is_empty_over_closure(k, n, &sing)? {
            return Err(Error::InvalidArgument(format!("stratum {mask:b} is singular")));
        }
    }
    Ok(())
}
