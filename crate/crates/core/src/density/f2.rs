//! Bit-packed kernels for censuses over `F_2`.
//!
//! A form of degree `d` with `dim S_d <= 128` is a `u128` whose bit `i` is
//! the coefficient of the `i`-th monomial. Macaulay matrices may be wider
//! and use rows of 64-bit words.

use crate::caps;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::monomial::rank_exps;
use crate::homog::{basis, dim_s, mul_table, HomogPoly};
use crate::ideal::{emptiness_degree, ClosedPoint};
use crate::linalg::rank_gf2;
use crate::scheme::predicates::normalized_forms;

pub const MAX_BITS: usize = 128;

pub fn fits(n: usize, d: usize) -> bool {
    dim_s(n, d) <= MAX_BITS
}

pub fn to_bits(f: &HomogPoly<Fe>) -> u128 {
    f.coeffs()
        .iter()
        .enumerate()
        .fold(0u128, |acc, (i, c)| if c.0 != 0 { acc | 1 << i } else { acc })
}

pub fn from_bits(n: usize, d: usize, bits: u128) -> HomogPoly<Fe> {
    let coeffs = (0..dim_s(n, d)).map(|i| Fe((bits >> i & 1) as u32)).collect();
    HomogPoly::from_coeffs(n, d, coeffs).expect("dimension matches")
}

fn to_words(f: &HomogPoly<Fe>, words: usize) -> Vec<u64> {
    let mut out = vec![0u64; words];
    for (i, c) in f.coeffs().iter().enumerate() {
        if c.0 != 0 {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

struct Ones(u128);

impl Iterator for Ones {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

fn ones(x: u128) -> Ones {
    Ones(x)
}

pub fn parity(x: u128) -> bool {
    x.count_ones() & 1 == 1
}

/// An `F_2`-linear map between bit vectors, applied a byte at a time.
pub struct LinearMap {
    tables: Vec<[u128; 256]>,
}

impl LinearMap {
    pub fn new(dim_in: usize, col: impl Fn(usize) -> u128) -> Self {
        let chunks = dim_in.div_ceil(8);
        let mut tables = Vec::with_capacity(chunks);
        for c in 0..chunks {
            let mut t = [0u128; 256];
            for v in 1..256usize {
                let low = v.trailing_zeros() as usize;
                let j = 8 * c + low;
                let img = if j < dim_in { col(j) } else { 0 };
                t[v] = t[v & (v - 1)] ^ img;
            }
            tables.push(t);
        }
        LinearMap { tables }
    }

    #[inline]
    pub fn apply(&self, mut x: u128) -> u128 {
        let mut out = 0;
        let mut i = 0;
        while x != 0 {
            out ^= self.tables[i][(x & 0xff) as usize];
            x >>= 8;
            i += 1;
        }
        out
    }
}

/// Multiplication `S_a x S_b -> S_{a+b}`.
pub struct Multiplier {
    by_monomial: Vec<LinearMap>,
}

impl Multiplier {
    pub fn new(n: usize, a: usize, b: usize) -> Result<Self> {
        if !fits(n, a + b) {
            return Err(Error::Unsupported(format!("bit-packed forms of degree {} in P^{n}", a + b)));
        }
        let table = mul_table(n, a, b);
        let dim_b = dim_s(n, b);
        let by_monomial = (0..dim_s(n, a))
            .map(|i| LinearMap::new(dim_b, |j| 1u128 << table[i * dim_b + j]))
            .collect();
        Ok(Multiplier { by_monomial })
    }

    #[inline]
    pub fn mul(&self, g: u128, h: u128) -> u128 {
        ones(g).fold(0, |acc, i| acc ^ self.by_monomial[i].apply(h))
    }

    /// `m_i * h` for the `i`-th monomial of `S_a`.
    #[inline]
    pub fn monomial_times(&self, i: usize, h: u128) -> u128 {
        self.by_monomial[i].apply(h)
    }

    pub fn monomials(&self) -> usize {
        self.by_monomial.len()
    }
}

/// Row echelon basis of vectors with at most 128 coordinates, keyed by the
/// lowest set bit of each row.
struct PivotBasis {
    rows: [u128; 128],
    rank: usize,
}

impl PivotBasis {
    fn new() -> Self {
        PivotBasis { rows: [0; 128], rank: 0 }
    }

    #[inline]
    fn insert(&mut self, mut r: u128) -> bool {
        while r != 0 {
            let b = r.trailing_zeros() as usize;
            if self.rows[b] == 0 {
                self.rows[b] = r;
                self.rank += 1;
                return true;
            }
            r ^= self.rows[b];
        }
        false
    }
}

/// Macaulay rows built through multiplication tables when `dim S_D <= 128`.
struct Packed {
    dim: usize,
    /// One multiplier `S_{D-e} x S_e -> S_D` per generator.
    muls: Vec<Multiplier>,
    certificate: Vec<u128>,
}

/// The partial derivatives `S_d -> S_{d-1}` in characteristic 2.
pub fn partials(n: usize, d: usize) -> Vec<LinearMap> {
    let b = basis(n, d);
    (0..=n)
        .map(|var| {
            LinearMap::new(b.len(), |j| {
                let e = b.exps(j);
                if e[var] % 2 == 1 {
                    let mut lowered = e.to_vec();
                    lowered[var] -= 1;
                    1u128 << rank_exps(&lowered)
                } else {
                    0
                }
            })
        })
        .collect()
}

/// Macaulay matrices of generators with fixed degrees at a fixed degree `D`.
pub struct Macaulay {
    target: usize,
    dim: usize,
    words: usize,
    /// Per generator: its degree's multiplication table and `dim S_{D-e}`.
    shapes: Vec<(std::sync::Arc<Vec<u32>>, usize)>,
}

impl Macaulay {
    pub fn new(n: usize, degrees: &[usize], target: usize) -> Result<Self> {
        let dim = dim_s(n, target);
        let words = dim.div_ceil(64);
        let mut rows = 0usize;
        let mut shapes = Vec::new();
        for &e in degrees {
            if e > target {
                shapes.push((std::sync::Arc::new(Vec::new()), 0));
                continue;
            }
            let dim_b = dim_s(n, target - e);
            rows += dim_b;
            shapes.push((mul_table(n, e, target - e), dim_b));
        }
        caps::check("Macaulay matrix", (rows * dim) as u128, caps::matrix_cap(), caps::MATRIX_CAP_ENV)?;
        Ok(Macaulay {
            target,
            dim,
            words,
            shapes,
        })
    }

    pub fn target(&self) -> usize {
        self.target
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Appends the rows `m * g` for every generator `g` and monomial `m`.
    pub fn fill(&self, gens: &[u128], buf: &mut Vec<u64>) {
        for (g, (table, dim_b)) in gens.iter().zip(&self.shapes) {
            for m in 0..*dim_b {
                let start = buf.len();
                buf.resize(start + self.words, 0);
                for j in ones(*g) {
                    let col = table[j * dim_b + m] as usize;
                    buf[start + col / 64] |= 1 << (col % 64);
                }
            }
        }
    }

    pub fn rank(&self, buf: &mut [u64]) -> usize {
        rank_gf2(buf, self.words, self.dim)
    }
}

/// Masks for the `F_2`-coordinates of linear functionals `S_d -> k(w)`.
fn functional_masks(w: &ClosedPoint, values: &[Fe]) -> Result<Vec<u128>> {
    let mut masks = vec![0u128; w.degree() as usize];
    for (j, &v) in values.iter().enumerate() {
        for (t, c) in w.coordinates(v)?.into_iter().enumerate() {
            if c.0 != 0 {
                masks[t] |= 1 << j;
            }
        }
    }
    Ok(masks)
}

fn monomial_value(k: &Gf, coords: &[Fe], e: &[u8]) -> Fe {
    e.iter()
        .zip(coords)
        .fold(Fe::ONE, |acc, (&x, c)| k.mul(&acc, &k.pow(c, x as u64)))
}

/// Masks whose parities are the coordinates of `f(w)`.
pub fn value_masks(w: &ClosedPoint, d: usize) -> Result<Vec<u128>> {
    let k = w.residue_field();
    let coords = w.representative().coords();
    let b = basis(w.n(), d);
    let values: Vec<Fe> = b.iter().map(|e| monomial_value(k, coords, e)).collect();
    functional_masks(w, &values)
}

/// Masks that all have even parity exactly when `H_f` is singular at `w`
/// (or `f` vanishes identically).
pub fn singular_masks(w: &ClosedPoint, d: usize) -> Result<Vec<u128>> {
    let k = w.residue_field();
    let coords = w.representative().coords();
    let b = basis(w.n(), d);
    let mut out = value_masks(w, d)?;
    for var in 0..=w.n() {
        let values: Vec<Fe> = b
            .iter()
            .map(|e| {
                if e[var] % 2 == 0 {
                    Fe::ZERO
                } else {
                    let mut lowered = e.to_vec();
                    lowered[var] -= 1;
                    monomial_value(k, coords, &lowered)
                }
            })
            .collect();
        out.extend(functional_masks(w, &values)?);
    }
    Ok(out)
}

/// Outcome of the fast smoothness test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    Singular,
    Undecided,
}

/// Smoothness of `H_f ⊂ P^n` over `F_2`, optionally only away from one
/// rational point `y`.
///
/// Singular points of small degree are detected by parity checks. Then
/// `V(J)` for `J = (partials)` (plus `f` when the degree is even) is tested
/// for emptiness at the emptiness degree `D`. When a point `y` is excluded,
/// `V(J) ⊆ {y}` is certified by `(I_y^D)_D ⊆ J_D`: every element of
/// `(I_y^D)_D` lies in `J`, and some element of it is nonzero at any point
/// other than `y`.
pub struct SmoothKernel {
    d: usize,
    partials: Vec<LinearMap>,
    with_f: bool,
    macaulay: Macaulay,
    point_checks: Vec<Vec<u128>>,
    certificate: Option<Vec<u64>>,
    packed: Option<Packed>,
}

impl SmoothKernel {
    pub fn new(k: &Gf, n: usize, d: usize, check_degrees: u32, excluded: Option<&ClosedPoint>) -> Result<Self> {
        if k.q() != 2 {
            return Err(Error::Unsupported("bit-packed kernels need F_2".into()));
        }
        if d == 0 || !fits(n, d) {
            return Err(Error::Unsupported(format!("bit-packed smoothness in degree {d}")));
        }
        if excluded.is_some_and(|y| y.degree() != 1) {
            return Err(Error::Unsupported("excluded point must be rational".into()));
        }
        let with_f = d % 2 == 0;
        let mut degrees = vec![d - 1; n + 1];
        if with_f {
            degrees.insert(0, d);
        }
        let target = emptiness_degree(n, &degrees).max(1);
        let macaulay = Macaulay::new(n, &degrees, target)?;
        let mut point_checks = Vec::new();
        for r in 1..=check_degrees {
            for w in crate::scheme::closed_points_of_degree(k, n, r)? {
                if excluded.is_some_and(|y| *y == w) {
                    continue;
                }
                point_checks.push(singular_masks(&w, d)?);
            }
        }
        let certificate = match excluded {
            None => None,
            Some(y) => {
                // linear forms through y, and all their products of length D
                let lin = crate::ideal::SubschemeSpec::from_points(k, n, vec![y.clone()])?
                    .vanishing_piece(1)?
                    .basis_forms();
                let mut rows = Vec::new();
                for e in basis(lin.len() - 1, target).iter() {
                    let mut prod = HomogPoly::constant(k, n, Fe::ONE);
                    for (l, &x) in lin.iter().zip(e) {
                        prod = prod.mul(k, &l.pow(k, x as u32)?)?;
                    }
                    rows.extend(to_words(&prod, macaulay.words()));
                }
                Some(rows)
            }
        };
        let packed = if fits(n, target) {
            let muls = degrees.iter().map(|&e| Multiplier::new(n, target - e, e)).collect::<Result<_>>()?;
            let certificate = certificate
                .as_ref()
                .map(|rows| {
                    rows.chunks(macaulay.words())
                        .map(|w| w.iter().enumerate().fold(0u128, |a, (i, &x)| a | (x as u128) << (64 * i)))
                        .collect()
                })
                .unwrap_or_default();
            Some(Packed {
                dim: dim_s(n, target),
                muls,
                certificate,
            })
        } else {
            None
        };
        Ok(SmoothKernel {
            d,
            partials: partials(n, d),
            with_f,
            macaulay,
            point_checks,
            certificate,
            packed,
        })
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn classify(&self, f: u128, buf: &mut Vec<u64>) -> Smoothness {
        if f == 0 {
            return Smoothness::Singular;
        }
        if self.point_checks.iter().any(|masks| masks.iter().all(|&m| !parity(f & m))) {
            return Smoothness::Singular;
        }
        let mut gens = Vec::with_capacity(self.partials.len() + 1);
        if self.with_f {
            gens.push(f);
        }
        gens.extend(self.partials.iter().map(|p| p.apply(f)));
        if let Some(packed) = &self.packed {
            return self.classify_packed(packed, &gens);
        }
        buf.clear();
        self.macaulay.fill(&gens, buf);
        let mut copy = buf.clone();
        let rank = self.macaulay.rank(&mut copy);
        if rank == self.macaulay.dim() {
            return Smoothness::Smooth;
        }
        match &self.certificate {
            None => Smoothness::Singular,
            Some(cert) => {
                buf.extend_from_slice(cert);
                if self.macaulay.rank(buf) == rank {
                    Smoothness::Smooth
                } else {
                    Smoothness::Undecided
                }
            }
        }
    }
}

impl SmoothKernel {
    fn classify_packed(&self, packed: &Packed, gens: &[u128]) -> Smoothness {
        let mut basis = PivotBasis::new();
        for (g, mul) in gens.iter().zip(&packed.muls) {
            if *g == 0 {
                continue;
            }
            for m in 0..mul.monomials() {
                basis.insert(mul.monomial_times(m, *g));
                if basis.rank == packed.dim {
                    return Smoothness::Smooth;
                }
            }
        }
        if self.certificate.is_none() {
            return Smoothness::Singular;
        }
        if packed.certificate.iter().all(|&r| !basis.insert(r)) {
            Smoothness::Smooth
        } else {
            Smoothness::Undecided
        }
    }
}

/// Bitset over all of `S_d` (indexed by the bit pattern of a form).
pub struct FormSet {
    bits: Vec<u64>,
}

impl FormSet {
    fn new(n: usize, d: usize) -> Result<Self> {
        let dim = dim_s(n, d);
        if dim > 40 {
            return Err(Error::Unsupported(format!("bitset over S_{d} of dimension {dim}")));
        }
        caps::check("form bitset", 1u128 << dim, caps::census_cap(), caps::CENSUS_CAP_ENV)?;
        Ok(FormSet {
            bits: vec![0; ((1usize << dim) / 64).max(1)],
        })
    }

    fn insert(&mut self, f: u128) {
        self.bits[(f >> 6) as usize] |= 1 << (f & 63);
    }

    #[inline]
    pub fn contains(&self, f: u128) -> bool {
        self.bits[(f >> 6) as usize] >> (f & 63) & 1 == 1
    }

    pub fn len(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn nonzero_forms(n: usize, e: usize) -> std::ops::Range<u128> {
    1..(1u128 << dim_s(n, e))
}

/// All `g * h` with `1 <= deg g <= d/2`, i.e. the reducible forms.
pub fn reducible_set(n: usize, d: usize) -> Result<FormSet> {
    let mut set = FormSet::new(n, d)?;
    for e in 1..=d / 2 {
        let mul = Multiplier::new(n, e, d - e)?;
        for g in nonzero_forms(n, e) {
            for h in nonzero_forms(n, d - e) {
                set.insert(mul.mul(g, h));
            }
        }
    }
    Ok(set)
}

/// All `g^2 * h` with `deg g >= 1`, i.e. the forms with a repeated factor.
pub fn nonreduced_set(n: usize, d: usize) -> Result<FormSet> {
    let mut set = FormSet::new(n, d)?;
    for e in 1..=d / 2 {
        let square = Multiplier::new(n, e, e)?;
        let mul = Multiplier::new(n, 2 * e, d - 2 * e)?;
        for g in nonzero_forms(n, e) {
            let g2 = square.mul(g, g);
            for h in nonzero_forms(n, d - 2 * e) {
                set.insert(mul.mul(g2, h));
            }
        }
    }
    Ok(set)
}

/// Norms `prod_i sigma^i(g)` of forms `g` of degree `d/r` over `F_{2^r}`
/// for every divisor `r >= 2` of `d`: the forms that are irreducible over
/// `F_2` exactly when they are reducible over the algebraic closure.
pub fn norm_set(k: &Gf, n: usize, d: usize) -> Result<FormSet> {
    let mut set = FormSet::new(n, d)?;
    for r in (2..=d).filter(|r| d % r == 0) {
        let ext = k.extension(r as u32)?;
        let e = d / r;
        for g in normalized_forms(&ext, n, e)? {
            let mut norm = g.clone();
            let mut conj = g;
            for _ in 1..r {
                conj = conj.map(|c| ext.frobenius(*c));
                norm = norm.mul(&ext, &conj)?;
            }
            if norm.coeffs().iter().any(|c| c.0 > 1) {
                return Err(Error::Internal("norm form is not defined over F_2".into()));
            }
            set.insert(to_bits(&norm));
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use crate::homog::text::parse_poly;
    use crate::scheme::{is_irreducible_section, is_reduced_section, is_smooth_section, SmoothMode};
    use crate::ideal::SubschemeSpec;

    fn f2() -> Gf {
        make_field(2, 1).unwrap()
    }

    #[test]
    fn bits_round_trip_and_multiply() {
        let k = f2();
        let f = parse_poly(&k, 2, "x0^2 + x1*x2", None).unwrap();
        assert_eq!(from_bits(2, 2, to_bits(&f)), f);
        let g = parse_poly(&k, 2, "x0 + x2", None).unwrap();
        let m = Multiplier::new(2, 1, 2).unwrap();
        assert_eq!(from_bits(2, 3, m.mul(to_bits(&g), to_bits(&f))), g.mul(&k, &f).unwrap());
    }

    #[test]
    fn partials_match_polynomial_derivatives() {
        let k = f2();
        let f = parse_poly(&k, 2, "x0^3 + x0*x1*x2 + x1^2*x2", None).unwrap();
        for (i, p) in partials(2, 3).iter().enumerate() {
            assert_eq!(from_bits(2, 2, p.apply(to_bits(&f))), f.diff(&k, i).unwrap());
        }
    }

    #[test]
    fn smooth_kernel_agrees_with_reference_on_cubics() {
        let k = f2();
        let kernel = SmoothKernel::new(&k, 2, 3, 1, None).unwrap();
        let p2 = SubschemeSpec::whole(&k, 2);
        let mut buf = Vec::new();
        for bits in (0u128..1 << 10).step_by(3) {
            let f = from_bits(2, 3, bits);
            let fast = kernel.classify(bits, &mut buf) == Smoothness::Smooth;
            let slow = is_smooth_section(&p2, &f, SmoothMode::Exact).unwrap().is_true();
            assert_eq!(fast, slow, "{bits:b}");
        }
    }

    #[test]
    fn smooth_kernel_agrees_with_reference_on_quartics() {
        let k = f2();
        let kernel = SmoothKernel::new(&k, 2, 4, 2, None).unwrap();
        let p2 = SubschemeSpec::whole(&k, 2);
        let mut buf = Vec::new();
        for bits in (0u128..1 << 15).step_by(97) {
            let f = from_bits(2, 4, bits);
            let fast = kernel.classify(bits, &mut buf) == Smoothness::Smooth;
            let slow = is_smooth_section(&p2, &f, SmoothMode::Exact).unwrap().is_true();
            assert_eq!(fast, slow, "{bits:b}");
        }
    }

    #[test]
    fn excluded_point_certificate() {
        let k = f2();
        let y = ClosedPoint::rational(&k, vec![Fe(0), Fe(0), Fe(1)]).unwrap();
        let kernel = SmoothKernel::new(&k, 2, 3, 1, Some(&y)).unwrap();
        let mut buf = Vec::new();
        let nodal = parse_poly(&k, 2, "x0*x1*x2 + x0^3 + x1^3", None).unwrap();
        assert_eq!(kernel.classify(to_bits(&nodal), &mut buf), Smoothness::Smooth);
        let plain = SmoothKernel::new(&k, 2, 3, 1, None).unwrap();
        assert_eq!(plain.classify(to_bits(&nodal), &mut buf), Smoothness::Singular);
        let double = parse_poly(&k, 2, "x0^2*x2", None).unwrap();
        assert_eq!(kernel.classify(to_bits(&double), &mut buf), Smoothness::Singular);
    }

    #[test]
    fn factor_sets_agree_with_reference() {
        let k = f2();
        let red = reducible_set(2, 3).unwrap();
        let nonred = nonreduced_set(2, 3).unwrap();
        let norms = norm_set(&k, 2, 3).unwrap();
        for bits in 1u128..1 << 10 {
            let f = from_bits(2, 3, bits);
            assert_eq!(!red.contains(bits), is_irreducible_section(&k, &f, false).unwrap().is_true());
            assert_eq!(!nonred.contains(bits), is_reduced_section(&k, &f).unwrap().is_true());
            let geo = !red.contains(bits) && !norms.contains(bits);
            assert_eq!(geo, is_irreducible_section(&k, &f, true).unwrap().is_true(), "{bits:b}");
        }
    }

    #[test]
    fn norm_set_sizes() {
        let k = f2();
        // 14 non-rational lines over F_4 in 7 conjugate pairs, plus the
        // squares of the 7 rational lines
        assert_eq!(norm_set(&k, 2, 2).unwrap().len(), 14);
        // 66 non-rational lines over F_8 in orbits of 3, plus 7 cubes
        assert_eq!(norm_set(&k, 2, 3).unwrap().len(), 29);
    }
}
