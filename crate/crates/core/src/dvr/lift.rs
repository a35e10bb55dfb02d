//! Constructive lifting of good special-fiber sections to hypersurfaces over
//! `A` whose generic fiber is good as well.
//!
//! Stage one walks `I^{Z_s}_d` for a special-fiber form passing the
//! special-fiber checks. Stage two enumerates lifts `sum (c_i + t g_i(t)) b_i`
//! over an `A`-basis `b` of `I^Z_d`, with `deg g_i` bounded. Stage three
//! tests each lift exactly over `F_q(t)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::flat::saturate;
use super::ratfunc::{Rat, RatField, UPoly};
use super::{is_integral_form, reduce_form, DvrPoint, TPoly};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::text::{format_poly, parse_poly};
use crate::homog::{basis, dim_s, HomogPoly};
use crate::ideal::{hilbert_dim, is_empty_over_closure, DimVerdict};
use crate::linalg;
use crate::scheme::{singular_scheme, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftPredicate {
    /// `X_s ∩ H_s` smooth of dimension `dim X_s - 1`.
    SpecialSmooth,
    /// `X_K ∩ H_K` smooth of dimension `dim X_K - 1`, checked over `F_q(t)`.
    GenericSmooth,
    /// `X ∩ H` flat over `A`: `f_s` is a nonzerodivisor on `X_s`.
    Flat,
    /// `X_K ∩ H_K` geometrically integral.
    GenericIntegral,
    /// `Z ⊂ H`, checked by evaluating `f` on every section of `Z`.
    ContainsZ,
}

impl LiftPredicate {
    pub const ALL: [LiftPredicate; 5] = [
        LiftPredicate::SpecialSmooth,
        LiftPredicate::GenericSmooth,
        LiftPredicate::Flat,
        LiftPredicate::GenericIntegral,
        LiftPredicate::ContainsZ,
    ];
}

/// Sections of `X ⊂ P^n_A`, `X` a complete intersection over `A`.
#[derive(Clone, Debug)]
pub struct LiftProblem {
    pub field: RatField,
    pub n: usize,
    /// Generators of `X` over `A`; empty for `P^n_A`.
    pub x: Vec<HomogPoly<Rat>>,
    /// Sections of `P^n_A -> Spec A` that every returned `H` must contain.
    pub z: Vec<DvrPoint>,
    pub d: usize,
    pub count: usize,
    /// Perturbations are `t * g(t)` with `deg g <= t_degree`.
    pub t_degree: usize,
    pub predicates: Vec<LiftPredicate>,
    /// Special-fiber forms to try before giving up.
    pub special_budget: u64,
    /// Lifts to try per special-fiber form.
    pub lift_budget: u64,
    pub width: usize,
}

impl LiftProblem {
    pub fn new(base: &Gf, n: usize, d: usize) -> Self {
        LiftProblem {
            field: RatField::new(base),
            n,
            x: Vec::new(),
            z: Vec::new(),
            d,
            count: 5,
            t_degree: 2,
            predicates: vec![LiftPredicate::SpecialSmooth, LiftPredicate::GenericSmooth],
            special_budget: 1 << 12,
            lift_budget: 1 << 10,
            width: 1,
        }
    }

    pub fn with_x(mut self, x: Vec<HomogPoly<Rat>>) -> Self {
        self.x = x;
        self
    }

    pub fn with_z(mut self, z: Vec<DvrPoint>) -> Self {
        self.z = z;
        self
    }

    pub fn with_predicates(mut self, predicates: &[LiftPredicate]) -> Self {
        let mut p = predicates.to_vec();
        p.sort();
        p.dedup();
        self.predicates = p;
        self
    }

    pub fn with_count(mut self, count: usize) -> Self {
        self.count = count;
        self
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = width.max(1);
        self
    }

    fn base(&self) -> &Gf {
        self.field.base()
    }

    fn special_x(&self) -> Result<Vec<HomogPoly<Fe>>> {
        self.x.iter().map(|g| reduce_form(&self.field, g)).collect()
    }

    fn validate(&self) -> Result<()> {
        let k = &self.field;
        if self.d == 0 {
            return Err(Error::InvalidArgument("lift degree must be positive".into()));
        }
        for g in &self.x {
            if g.n() != self.n || !is_integral_form(g) {
                return Err(Error::InvalidArgument(format!(
                    "generator {} of X must be a form over A in P^{}",
                    format_poly(k, g),
                    self.n
                )));
            }
        }
        if !self.x.is_empty() {
            let expected = self.n as i64 - self.x.len() as i64;
            match hilbert_dim(self.base(), self.n, &self.special_x()?, self.n + 2)? {
                DimVerdict::Dim(dim) if dim == expected => {}
                DimVerdict::Dim(dim) => {
                    return Err(Error::InvalidArgument(format!(
                        "special fiber of X has dimension {dim}; a complete intersection needs {expected}"
                    )))
                }
                DimVerdict::Inconclusive => {
                    return Err(Error::Inconclusive("dimension of the special fiber of X".into()))
                }
            }
        }
        for p in &self.z {
            if p.n() != self.n {
                return Err(Error::InvalidArgument("section of Z lives in a different ambient space".into()));
            }
            let coords = p.rat_coords();
            if self.x.iter().any(|g| !k.is_zero(&g.eval(k, &coords))) {
                return Err(Error::InvalidArgument(format!("section {} does not lie on X", p.render(k))));
            }
        }
        Ok(())
    }

    /// An `A`-basis of `I^Z_d` with unit pivots, as coefficient vectors.
    fn ideal_basis(&self) -> Result<Vec<Vec<Rat>>> {
        let k = &self.field;
        let dim = dim_s(self.n, self.d);
        if self.z.is_empty() {
            return Ok((0..dim)
                .map(|i| (0..dim).map(|j| if i == j { k.one() } else { k.zero() }).collect())
                .collect());
        }
        let monomials = basis(self.n, self.d);
        let evals: Vec<Vec<Rat>> = self
            .z
            .iter()
            .map(|p| {
                let coords = p.rat_coords();
                monomials
                    .iter()
                    .map(|e| {
                        e.iter()
                            .zip(&coords)
                            .fold(k.one(), |acc, (&x, c)| k.mul(&acc, &k.pow(c, x as u64)))
                    })
                    .collect()
            })
            .collect();
        Ok(saturate(k, linalg::kernel(k, &evals, dim))?.rows)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientEntry {
    pub monomial: String,
    pub num: TPoly,
    pub den: TPoly,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftCertificate {
    /// Position of the special-fiber form in the walk over `I^{Z_s}_d`.
    pub special_index: u64,
    /// Position of the perturbation in the lexicographic walk of the box.
    pub perturbation_index: u64,
    pub special_fiber: String,
    pub lift: String,
    pub coefficients: Vec<CoefficientEntry>,
    pub special: BTreeMap<LiftPredicate, Verdict>,
    pub generic: BTreeMap<LiftPredicate, Verdict>,
    pub total: BTreeMap<LiftPredicate, Verdict>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct LiftStats {
    pub special_tried: u64,
    pub special_accepted: u64,
    pub special_rejected: BTreeMap<LiftPredicate, u64>,
    pub lifts_tried: u64,
    pub lifts_rejected: BTreeMap<LiftPredicate, u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftOutcome {
    pub n: usize,
    pub d: usize,
    pub q: u32,
    pub x: Vec<String>,
    pub z: Vec<String>,
    pub predicates: Vec<LiftPredicate>,
    pub requested: usize,
    pub certificates: Vec<LiftCertificate>,
    pub stats: LiftStats,
}

impl LiftOutcome {
    pub fn complete(&self) -> bool {
        self.certificates.len() >= self.requested
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "lift search: d={} n={} q={} found {}/{} (special tried {}, accepted {}; lifts tried {})",
            self.d,
            self.n,
            self.q,
            self.certificates.len(),
            self.requested,
            self.stats.special_tried,
            self.stats.special_accepted,
            self.stats.lifts_tried
        );
        for (p, c) in &self.stats.special_rejected {
            s.push_str(&format!("\n  special fiber rejected by {p:?}: {c}"));
        }
        for (p, c) in &self.stats.lifts_rejected {
            s.push_str(&format!("\n  lift rejected by {p:?}: {c}"));
        }
        for c in &self.certificates {
            s.push_str(&format!("\n  [{}:{}] {}", c.special_index, c.perturbation_index, c.lift));
        }
        s.push('\n');
        s
    }
}

/// Smoothness of `V(x) ∩ V(f)` of the expected dimension, `x` a complete
/// intersection. Works over any field, in particular `F_q(t)`.
fn section_smooth<K: Field>(k: &K, n: usize, x: &[HomogPoly<K::Elem>], f: &HomogPoly<K::Elem>) -> Result<Verdict> {
    if f.is_zero(k) {
        return Ok(Verdict::no("zero form"));
    }
    if let Some(v) = wrong_dimension(k, n, x, f)? {
        return Ok(v);
    }
    if is_empty_over_closure(k, n, &singular_scheme(k, x, f)?)? {
        Ok(Verdict::yes())
    } else {
        Ok(Verdict::no("singular scheme is nonempty over the algebraic closure"))
    }
}

fn wrong_dimension<K: Field>(k: &K, n: usize, x: &[HomogPoly<K::Elem>], f: &HomogPoly<K::Elem>) -> Result<Option<Verdict>> {
    if x.is_empty() {
        return Ok(None);
    }
    let expected = n as i64 - x.len() as i64 - 1;
    let mut gens = x.to_vec();
    gens.push(f.clone());
    Ok(match hilbert_dim(k, n, &gens, n + 2)? {
        DimVerdict::Dim(dim) if dim == expected => None,
        DimVerdict::Dim(dim) => Some(Verdict::no(format!("section has dimension {dim}, expected {expected}"))),
        DimVerdict::Inconclusive => Some(Verdict::inconclusive("dimension of the section")),
    })
}

/// `f_s` is a nonzerodivisor on the Cohen-Macaulay ring of `X_s` iff it cuts
/// the dimension by one; together with flatness of `X` this makes `X ∩ H`
/// flat over `A`.
fn special_flat(k: &Gf, n: usize, xs: &[HomogPoly<Fe>], fs: &HomogPoly<Fe>) -> Result<Verdict> {
    if fs.is_zero(k) {
        return Ok(Verdict::no("special fiber of f is zero"));
    }
    Ok(wrong_dimension(k, n, xs, fs)?.unwrap_or_else(Verdict::yes))
}

fn special_verdicts(
    problem: &LiftProblem,
    xs: &[HomogPoly<Fe>],
    fs: &HomogPoly<Fe>,
) -> Result<BTreeMap<LiftPredicate, Verdict>> {
    let k = problem.base();
    let mut out = BTreeMap::new();
    for &p in &problem.predicates {
        let v = match p {
            LiftPredicate::SpecialSmooth => section_smooth(k, problem.n, xs, fs)?,
            LiftPredicate::Flat => special_flat(k, problem.n, xs, fs)?,
            _ => continue,
        };
        out.insert(p, v);
    }
    Ok(out)
}

fn generic_verdicts(problem: &LiftProblem, f: &HomogPoly<Rat>) -> Result<BTreeMap<LiftPredicate, Verdict>> {
    let k = &problem.field;
    let wants = |p| problem.predicates.contains(&p);
    let mut out = BTreeMap::new();
    if !(wants(LiftPredicate::GenericSmooth) || wants(LiftPredicate::GenericIntegral)) {
        return Ok(out);
    }
    let smooth = section_smooth(k, problem.n, &problem.x, f)?;
    if wants(LiftPredicate::GenericIntegral) {
        let dim = problem.n as i64 - problem.x.len() as i64 - 1;
        let v = match smooth.as_bool() {
            Some(true) if dim >= 1 => Verdict::yes(),
            Some(true) => Verdict::inconclusive("zero-dimensional section: connectedness is not implied"),
            Some(false) => Verdict::inconclusive("not smooth; integrality not derived"),
            None => smooth.clone(),
        };
        out.insert(LiftPredicate::GenericIntegral, v);
    }
    if wants(LiftPredicate::GenericSmooth) {
        out.insert(LiftPredicate::GenericSmooth, smooth);
    }
    Ok(out)
}

fn total_verdicts(problem: &LiftProblem, f: &HomogPoly<Rat>) -> BTreeMap<LiftPredicate, Verdict> {
    let k = &problem.field;
    let mut out = BTreeMap::new();
    if problem.predicates.contains(&LiftPredicate::ContainsZ) {
        let miss = problem.z.iter().find(|p| !k.is_zero(&f.eval(k, &p.rat_coords())));
        let v = match miss {
            None => Verdict::yes(),
            Some(p) => Verdict::no(format!("f does not vanish on the section {}", p.render(k))),
        };
        out.insert(LiftPredicate::ContainsZ, v);
    }
    out
}

fn first_failure(maps: &[&BTreeMap<LiftPredicate, Verdict>]) -> Option<LiftPredicate> {
    maps.iter().flat_map(|m| m.iter()).find(|(_, v)| !v.is_true()).map(|(p, _)| *p)
}

/// Base-`q` digits of `index`, most significant first.
fn digits(mut index: u64, q: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
    out
}

fn combine(k: &RatField, n: usize, d: usize, basis: &[Vec<Rat>], coeffs: &[Rat]) -> HomogPoly<Rat> {
    let dim = dim_s(n, d);
    let mut v = vec![k.zero(); dim];
    for (b, c) in basis.iter().zip(coeffs) {
        if k.is_zero(c) {
            continue;
        }
        for (x, y) in v.iter_mut().zip(b) {
            if !k.is_zero(y) {
                *x = k.add(x, &k.mul(c, y));
            }
        }
    }
    HomogPoly::from_coeffs(n, d, v).expect("dimension matches")
}

fn certificate_coefficients(k: &RatField, f: &HomogPoly<Rat>) -> Vec<CoefficientEntry> {
    let base = k.base();
    f.terms(k)
        .into_iter()
        .map(|(e, c)| {
            let monomial: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("x{i}") } else { format!("x{i}^{x}") })
                .collect();
            CoefficientEntry {
                monomial: monomial.join("*"),
                num: TPoly::from_upoly(base, c.num()),
                den: TPoly::from_upoly(base, c.den()),
            }
        })
        .collect()
}

enum Candidate {
    Accepted(Box<LiftCertificate>),
    Rejected(LiftPredicate),
}

/// Runs the three-stage search. Never fails for lack of successes: the
/// outcome records how many candidates each check rejected.
pub fn lift_search(problem: &LiftProblem) -> Result<LiftOutcome> {
    problem.validate()?;
    let k = &problem.field;
    let base = problem.base();
    let q = base.q() as u64;
    let n = problem.n;
    let d = problem.d;
    let xs = problem.special_x()?;
    let ideal = problem.ideal_basis()?;
    let reduced: Vec<Vec<Fe>> =
        ideal.iter().map(|r| r.iter().map(|x| k.residue(x).expect("integral")).collect()).collect();
    let r = ideal.len();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(problem.width)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;

    let mut stats = LiftStats::default();
    let mut certificates = Vec::new();
    let specials = (q as f64).powi(r as i32).min(u64::MAX as f64) as u64;
    let slots = r * (problem.t_degree + 1);
    let box_size = (q as f64).powi(slots as i32).min(u64::MAX as f64) as u64;
    let chunk = 16u64;

    'special: for si in 1..specials.min(problem.special_budget.saturating_add(1)) {
        let c: Vec<Fe> = digits(si, q, r).into_iter().map(|x| Fe(x as u32)).collect();
        let fs_vec: Vec<Fe> = (0..dim_s(n, d))
            .map(|j| c.iter().zip(&reduced).fold(Fe::ZERO, |acc, (ci, b)| base.add(&acc, &base.mul(ci, &b[j]))))
            .collect();
        let fs = HomogPoly::from_coeffs(n, d, fs_vec)?;
        stats.special_tried += 1;
        let special = special_verdicts(problem, &xs, &fs)?;
        if let Some(p) = first_failure(&[&special]) {
            *stats.special_rejected.entry(p).or_default() += 1;
            continue;
        }
        stats.special_accepted += 1;
        let lifted: Vec<Rat> = c.iter().map(|&ci| k.constant(ci)).collect();
        let limit = box_size.min(problem.lift_budget);
        let mut start = 0u64;
        while start < limit {
            let end = (start + chunk).min(limit);
            let evaluate = |pi: u64| -> Result<Candidate> {
                let g = digits(pi, q, slots);
                let coeffs: Vec<Rat> = lifted
                    .iter()
                    .zip(g.chunks(problem.t_degree + 1))
                    .map(|(ci, gi)| {
                        let mut tg = vec![Fe::ZERO];
                        tg.extend(gi.iter().map(|&x| Fe(x as u32)));
                        k.add(ci, &k.poly(UPoly::new(tg)))
                    })
                    .collect();
                let f = combine(k, n, d, &ideal, &coeffs);
                let generic = generic_verdicts(problem, &f)?;
                let total = total_verdicts(problem, &f);
                if let Some(p) = first_failure(&[&generic, &total]) {
                    return Ok(Candidate::Rejected(p));
                }
                Ok(Candidate::Accepted(Box::new(LiftCertificate {
                    special_index: si,
                    perturbation_index: pi,
                    special_fiber: format_poly(base, &fs),
                    lift: format_poly(k, &f),
                    coefficients: certificate_coefficients(k, &f),
                    special: special.clone(),
                    generic,
                    total,
                })))
            };
            let results: Vec<Result<Candidate>> = pool.install(|| (start..end).into_par_iter().map(evaluate).collect());
            for res in results {
                stats.lifts_tried += 1;
                match res? {
                    Candidate::Accepted(cert) => {
                        certificates.push(*cert);
                        if certificates.len() >= problem.count {
                            break 'special;
                        }
                    }
                    Candidate::Rejected(p) => *stats.lifts_rejected.entry(p).or_default() += 1,
                }
            }
            start = end;
        }
    }
    Ok(LiftOutcome {
        n,
        d,
        q: base.q(),
        x: problem.x.iter().map(|g| format_poly(k, g)).collect(),
        z: problem.z.iter().map(|p| p.render(k)).collect(),
        predicates: problem.predicates.clone(),
        requested: problem.count,
        certificates,
        stats,
    })
}

/// Re-derives a certificate from its printed lift alone: the form is parsed,
/// its special fiber recomputed, and every requested check rerun.
pub fn verify_certificate(problem: &LiftProblem, cert: &LiftCertificate) -> Result<bool> {
    let k = &problem.field;
    let f = parse_poly(k, problem.n, &cert.lift, Some(problem.d))?;
    if f.degree() != problem.d || !is_integral_form(&f) {
        return Ok(false);
    }
    let fs = reduce_form(k, &f)?;
    if fs != parse_poly(problem.base(), problem.n, &cert.special_fiber, Some(problem.d))? {
        return Ok(false);
    }
    let special = special_verdicts(problem, &problem.special_x()?, &fs)?;
    let generic = generic_verdicts(problem, &f)?;
    let total = total_verdicts(problem, &f);
    let all_true = [&special, &generic, &total].iter().all(|m| m.values().all(Verdict::is_true));
    let covered = problem
        .predicates
        .iter()
        .all(|p| special.contains_key(p) || generic.contains_key(p) || total.contains_key(p));
    Ok(all_true && covered)
}
