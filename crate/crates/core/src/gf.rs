//! Finite fields `F_q`, `q = p^s`, and their towers.
//!
//! An element is stored as its coefficient vector over `F_p` modulo a fixed
//! irreducible polynomial, packed into one integer: the coefficient of `x^i`
//! is the `i`-th base-`p` digit. Counting the encodings `0..q` therefore
//! enumerates the field in coefficient-lexicographic order (leading
//! coefficient most significant).
//!
//! Every field is built over the prime field directly, with the
//! lexicographically least irreducible monic modulus. Besides the modulus,
//! each field carries a distinguished primitive element `omega` chosen so that
//! `omega_{s'}^((p^{s'}-1)/(p^s-1))` is a conjugate of `omega_s` whenever
//! `s | s'`. Embeddings send `omega_s` to that power, which makes all
//! embeddings along a tower compose consistently. Fields are interned, so two
//! calls to [`make_field`] with the same arguments share tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::caps;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg;

/// A field element in coefficient encoding (see the module docs).
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fe(pub u32);

impl fmt::Debug for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fe({})", self.0)
    }
}

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);
}

struct GfInner {
    p: u32,
    s: u32,
    q: u32,
    /// Monic modulus, low degree first, length `s + 1`.
    modulus: Vec<u32>,
    /// `exp[i] = omega^i`, doubled so products of logs need no reduction.
    exp: Vec<u32>,
    /// `log[a]` with `log[0]` unused.
    log: Vec<u32>,
    pow_p: Vec<u32>,
    omega: u32,
}

/// Field descriptor for `F_{p^s}`; cheap to clone.
#[derive(Clone)]
pub struct Gf(Arc<GfInner>);

impl PartialEq for Gf {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.s == other.0.s
    }
}

impl Eq for Gf {}

impl std::hash::Hash for Gf {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        (self.0.p, self.0.s).hash(state);
    }
}

impl fmt::Debug for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl fmt::Display for Gf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.s == 1 {
            write!(f, "F_{}", self.0.p)
        } else {
            write!(f, "F_{}^{}", self.0.p, self.0.s)
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn registry() -> &'static Mutex<HashMap<(u32, u32), Gf>> {
    static REG: OnceLock<Mutex<HashMap<(u32, u32), Gf>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds (or fetches) `F_{p^s}`.
pub fn make_field(p: u64, s: u32) -> Result<Gf> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if s == 0 {
        return Err(Error::ZeroDegree);
    }
    let q = (p as u128).checked_pow(s).unwrap_or(u128::MAX);
    caps::check("field order", q, caps::field_cap(), caps::FIELD_CAP_ENV)?;
    if q > u32::MAX as u128 / 2 {
        return Err(Error::CapExceeded {
            what: "field order",
            size: q,
            cap: u32::MAX as u128 / 2,
            env: caps::FIELD_CAP_ENV,
        });
    }
    let key = (p as u32, s);
    if let Some(f) = registry().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    // Subfields are built first (recursively) without holding the lock.
    let field = build(p as u32, s)?;
    let mut reg = registry().lock().unwrap();
    Ok(reg.entry(key).or_insert(field).clone())
}

// ---- slow-path polynomial arithmetic over F_p, used only during setup ----

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let s = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * s.max(1)];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    // Reduce by the monic modulus from the top down.
    for k in (s..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &m) in modulus[..s].iter().enumerate() {
            let idx = k - s + i;
            prod[idx] = (prod[idx] + (p as u64 - c) * m as u64) % p as u64;
        }
    }
    prod.truncate(s);
    prod.into_iter().map(|x| x as u32).collect()
}

fn poly_powmod(a: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let s = modulus.len() - 1;
    let mut acc = vec![0u32; s];
    acc[0] = 1;
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &base, modulus, p);
        }
        base = poly_mulmod(&base, &base, modulus, p);
        e >>= 1;
    }
    acc
}

fn digits_of(mut v: u32, p: u32, s: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(s as usize);
    for _ in 0..s {
        out.push(v % p);
        v /= p;
    }
    out
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

/// Remainder of `a` modulo monic `b` over `F_p`; both low degree first.
fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (i, &c) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + (p - lead) * c) % p;
            }
        }
        r.pop();
    }
    r
}

/// All monic polynomials of degree `deg` over `F_p`, low degree first.
fn monic_polys(deg: u32, p: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(deg);
    (0..count).map(move |k| {
        let mut v = digits_of(k as u32, p, deg);
        v.push(1);
        v
    })
}

pub(crate) fn is_irreducible_over_fp(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    if deg <= 1 {
        return true;
    }
    for e in 1..=deg / 2 {
        for g in monic_polys(e, p) {
            if poly_rem(poly, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Lexicographically least irreducible monic of degree `s`, comparing the
/// coefficients from `x^{s-1}` down to the constant term.
fn least_irreducible(p: u32, s: u32) -> Vec<u32> {
    let count = (p as u64).pow(s);
    for k in 0..count {
        // digit j of k (most significant first) is the coefficient of x^{s-1-j}
        let mut low_first = vec![0u32; s as usize + 1];
        let mut rest = k;
        for i in 0..s as usize {
            low_first[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        low_first[s as usize] = 1;
        if is_irreducible_over_fp(&low_first, p) {
            return low_first;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn build(p: u32, s: u32) -> Result<Gf> {
    let q = p.pow(s);
    let modulus = least_irreducible(p, s);
    let one = {
        let mut v = vec![0u32; s as usize];
        v[0] = 1;
        v
    };
    let order = (q - 1) as u64;
    let order_factors = prime_factors(order);
    let is_primitive = |cand: &[u32]| {
        order_factors
            .iter()
            .all(|&r| poly_powmod(cand, order / r, &modulus, p) != one)
    };

    // Compatibility constraints from maximal proper subfields.
    let mut constraints: Vec<(u64, Vec<u32>)> = Vec::new();
    for l in prime_factors(s as u64) {
        let sub = make_field(p as u64, s / l as u32)?;
        let norm_exp = order / (sub.q() as u64 - 1);
        constraints.push((norm_exp, sub.omega_minpoly()));
    }

    let mut omega = None;
    for cand in 1..q {
        let digits = digits_of(cand, p, s);
        if !is_primitive(&digits) {
            continue;
        }
        let ok = constraints.iter().all(|(e, minpoly)| {
            let gamma = poly_powmod(&digits, *e, &modulus, p);
            // Horner evaluation of the F_p-polynomial at gamma.
            let mut acc = vec![0u32; s as usize];
            for &c in minpoly.iter().rev() {
                acc = poly_mulmod(&acc, &gamma, &modulus, p);
                acc[0] = (acc[0] + c) % p;
            }
            acc.iter().all(|&x| x == 0)
        });
        if ok {
            omega = Some(cand);
            break;
        }
    }
    let omega = omega.ok_or_else(|| Error::Internal(format!("no compatible primitive element in F_{q}")))?;

    let mut exp = vec![0u32; 2 * (q as usize - 1).max(1)];
    let mut log = vec![u32::MAX; q as usize];
    let omega_digits = digits_of(omega, p, s);
    let mut cur = one.clone();
    for i in 0..(q - 1) as usize {
        let enc = encode(&cur, p);
        exp[i] = enc;
        exp[i + (q - 1) as usize] = enc;
        log[enc as usize] = i as u32;
        cur = if p == 2 {
            mul_bits_gf2(&cur, &omega_digits, &modulus)
        } else {
            poly_mulmod(&cur, &omega_digits, &modulus, p)
        };
    }
    let pow_p = (0..s).map(|i| p.pow(i)).collect();
    Ok(Gf(Arc::new(GfInner {
        p,
        s,
        q,
        modulus,
        exp,
        log,
        pow_p,
        omega,
    })))
}

fn mul_bits_gf2(a: &[u32], b: &[u32], modulus: &[u32]) -> Vec<u32> {
    let s = modulus.len() - 1;
    let pack = |v: &[u32]| v.iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((c as u64) << i));
    let (x, y, m) = (pack(a), pack(b), pack(modulus));
    let mut prod = 0u64;
    for i in 0..s {
        if (y >> i) & 1 == 1 {
            prod ^= x << i;
        }
    }
    for k in (s..2 * s).rev() {
        if (prod >> k) & 1 == 1 {
            prod ^= m << (k - s);
        }
    }
    (0..s).map(|i| ((prod >> i) & 1) as u32).collect()
}

impl Gf {
    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn s(&self) -> u32 {
        self.0.s
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The tower-compatible primitive element.
    pub fn omega(&self) -> Fe {
        Fe(self.0.omega)
    }

    /// Class of `x` modulo the modulus (the text-format generator `g`).
    pub fn generator(&self) -> Fe {
        if self.0.s == 1 {
            // F_p[x]/(x - c) sends x to c.
            Fe((self.0.p - self.0.modulus[0]) % self.0.p)
        } else {
            Fe(self.0.p)
        }
    }

    pub fn digits(&self, a: Fe) -> Vec<u32> {
        digits_of(a.0, self.0.p, self.0.s)
    }

    pub fn from_digits(&self, digits: &[u32]) -> Result<Fe> {
        if digits.len() != self.0.s as usize || digits.iter().any(|&d| d >= self.0.p) {
            return Err(Error::InvalidArgument(format!("bad digit vector for {self}")));
        }
        Ok(Fe(encode(digits, self.0.p)))
    }

    #[inline]
    pub fn log(&self, a: Fe) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.0.log[a.0 as usize])
        }
    }

    #[inline]
    pub fn exp(&self, k: u64) -> Fe {
        Fe(self.0.exp[(k % (self.0.q as u64 - 1)) as usize])
    }

    pub fn frobenius(&self, a: Fe) -> Fe {
        self.pow(&a, self.0.p as u64)
    }

    /// All `q` elements in coefficient-lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.0.q).map(Fe)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.0.q).map(Fe)
    }

    /// `F_{q^r}` built over the prime field.
    pub fn extension(&self, r: u32) -> Result<Gf> {
        make_field(self.0.p as u64, self.0.s * r)
    }

    /// The tower embedding of `self` into `target`.
    pub fn embedding_into(&self, target: &Gf) -> Result<Embedding> {
        if self.0.p != target.0.p || target.0.s % self.0.s != 0 {
            return Err(Error::IncompatibleTower {
                from: self.0.q as u64,
                to: target.0.q as u64,
            });
        }
        let ratio = (target.0.q as u64 - 1) / (self.0.q as u64 - 1);
        Ok(Embedding {
            from: self.clone(),
            to: target.clone(),
            ratio,
        })
    }

    /// Minimal polynomial of `omega` over `F_p` as integers, constant first.
    fn omega_minpoly(&self) -> Vec<u32> {
        let s = self.0.s as usize;
        // coefficients live in F_q during the product
        let mut poly: Vec<Fe> = vec![Fe::ONE];
        let mut conj = self.omega();
        for _ in 0..s {
            // multiply by (x - conj)
            let mut next = vec![Fe::ZERO; poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = self.add(&next[i + 1], c);
                let t = self.mul(c, &conj);
                next[i] = self.sub(&next[i], &t);
            }
            poly = next;
            conj = self.frobenius(conj);
        }
        poly.into_iter()
            .map(|c| {
                debug_assert!(c.0 < self.0.p, "minimal polynomial must lie over F_p");
                c.0
            })
            .collect()
    }

    /// Relative trace `Tr_{self/sub}(a)`, returned in `sub`'s encoding.
    pub fn relative_trace(&self, a: Fe, sub: &Gf) -> Result<Fe> {
        let emb = sub.embedding_into(self)?;
        let r = self.0.s / sub.0.s;
        let qs = sub.0.q as u64;
        let mut acc = Fe::ZERO;
        let mut conj = a;
        for _ in 0..r {
            acc = self.add(&acc, &conj);
            conj = self.pow(&conj, qs);
        }
        emb.preimage(acc)
            .ok_or_else(|| Error::Internal("trace left the subfield".into()))
    }

    pub fn elem(&self, value: Fe) -> FieldElem {
        FieldElem {
            field: self.clone(),
            value,
        }
    }

    fn rank_gf2(&self, rows: &[Vec<Fe>]) -> usize {
        let ncols = rows.first().map_or(0, |r| r.len());
        let words = ncols.div_ceil(64).max(1);
        let mut packed = vec![0u64; rows.len() * words];
        for (i, row) in rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.0 != 0 {
                    packed[i * words + j / 64] |= 1u64 << (j % 64);
                }
            }
        }
        linalg::rank_gf2(&mut packed, words, ncols)
    }
}

impl Field for Gf {
    type Elem = Fe;

    #[inline]
    fn zero(&self) -> Fe {
        Fe::ZERO
    }

    #[inline]
    fn one(&self) -> Fe {
        Fe::ONE
    }

    #[inline]
    fn is_zero(&self, a: &Fe) -> bool {
        a.0 == 0
    }

    #[inline]
    fn add(&self, a: &Fe, b: &Fe) -> Fe {
        let inner = &*self.0;
        if inner.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if inner.s == 1 {
            let s = a.0 + b.0;
            return Fe(if s >= inner.p { s - inner.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        for &w in &inner.pow_p {
            let d = (x % inner.p + y % inner.p) % inner.p;
            out += d * w;
            x /= inner.p;
            y /= inner.p;
        }
        Fe(out)
    }

    #[inline]
    fn neg(&self, a: &Fe) -> Fe {
        let inner = &*self.0;
        if inner.p == 2 {
            return *a;
        }
        if inner.s == 1 {
            return Fe((inner.p - a.0) % inner.p);
        }
        let mut x = a.0;
        let mut out = 0u32;
        for &w in &inner.pow_p {
            let d = (inner.p - x % inner.p) % inner.p;
            out += d * w;
            x /= inner.p;
        }
        Fe(out)
    }

    #[inline]
    fn mul(&self, a: &Fe, b: &Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        let inner = &*self.0;
        let k = inner.log[a.0 as usize] + inner.log[b.0 as usize];
        Fe(inner.exp[k as usize])
    }

    fn inv(&self, a: &Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        let inner = &*self.0;
        let l = inner.log[a.0 as usize];
        let k = (inner.q - 1 - l) % (inner.q - 1);
        Some(Fe(inner.exp[k as usize]))
    }

    fn characteristic(&self) -> u64 {
        self.0.p as u64
    }

    fn from_u64(&self, k: u64) -> Fe {
        Fe((k % self.0.p as u64) as u32)
    }

    fn order(&self) -> Option<u64> {
        Some(self.0.q as u64)
    }

    fn format_elem(&self, a: &Fe) -> String {
        crate::homog::text::format_coeff(self, *a)
    }

    fn pow(&self, a: &Fe, e: u64) -> Fe {
        if a.0 == 0 {
            return if e == 0 { Fe::ONE } else { Fe::ZERO };
        }
        let l = self.0.log[a.0 as usize] as u64;
        let m = self.0.q as u64 - 1;
        Fe(self.0.exp[((l * (e % m)) % m) as usize])
    }

    fn rank_of_rows(&self, rows: Vec<Vec<Fe>>) -> usize {
        if self.0.q == 2 {
            self.rank_gf2(&rows)
        } else {
            let mut rows = rows;
            linalg::echelonize(self, &mut rows).len()
        }
    }
}

/// Field homomorphism `F_q -> F_{q^r}` fixed by the tower convention.
#[derive(Clone, Debug)]
pub struct Embedding {
    from: Gf,
    to: Gf,
    ratio: u64,
}

impl Embedding {
    pub fn source(&self) -> &Gf {
        &self.from
    }

    pub fn target(&self) -> &Gf {
        &self.to
    }

    #[inline]
    pub fn apply(&self, a: Fe) -> Fe {
        match self.from.log(a) {
            None => Fe::ZERO,
            Some(l) => self.to.exp(l as u64 * self.ratio),
        }
    }

    /// Inverse image, when `b` lies in the embedded subfield.
    pub fn preimage(&self, b: Fe) -> Option<Fe> {
        match self.to.log(b) {
            None => Some(Fe::ZERO),
            Some(l) => {
                if l as u64 % self.ratio == 0 {
                    Some(self.from.exp(l as u64 / self.ratio))
                } else {
                    None
                }
            }
        }
    }
}

/// An element bundled with its field; operations check that owners agree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldElem {
    field: Gf,
    value: Fe,
}

impl FieldElem {
    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn coeffs(&self) -> Vec<u32> {
        self.field.digits(self.value)
    }

    fn same_owner(&self, other: &FieldElem) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.to_string(), other.field.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_owner(other)?;
        Ok(self.field.elem(self.field.add(&self.value, &other.value)))
    }

    pub fn sub(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_owner(other)?;
        Ok(self.field.elem(self.field.sub(&self.value, &other.value)))
    }

    pub fn mul(&self, other: &FieldElem) -> Result<FieldElem> {
        self.same_owner(other)?;
        Ok(self.field.elem(self.field.mul(&self.value, &other.value)))
    }

    pub fn inv(&self) -> Result<FieldElem> {
        let v = self.field.inv(&self.value).ok_or(Error::DivisionByZero)?;
        Ok(self.field.elem(v))
    }

    pub fn pow(&self, e: u64) -> FieldElem {
        self.field.elem(self.field.pow(&self.value, e))
    }

    /// Image in `F_{q^r}`.
    pub fn embed(&self, r: u32) -> Result<FieldElem> {
        let target = self.field.extension(r)?;
        let emb = self.field.embedding_into(&target)?;
        Ok(target.elem(emb.apply(self.value)))
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.field.format_elem(&self.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_f2() {
        let f = make_field(2, 1).unwrap();
        assert_eq!(f.q(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.elements().collect::<Vec<_>>(), vec![Fe(0), Fe(1)]);
    }

    #[test]
    fn f4_modulus_is_the_unique_irreducible_quadratic() {
        // The four monic quadratics over F_2 are x^2, x^2+1, x^2+x, x^2+x+1;
        // only the last has no root.
        let roots = |c0: u32, c1: u32| (0..2u32).any(|x| (x * x + c1 * x + c0) % 2 == 0);
        let irreducible: Vec<_> = [(0, 0), (1, 0), (0, 1), (1, 1)]
            .into_iter()
            .filter(|&(c0, c1)| !roots(c0, c1))
            .collect();
        assert_eq!(irreducible, vec![(1, 1)]);
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
    }

    #[test]
    fn composite_characteristic_rejected() {
        assert!(matches!(make_field(4, 1), Err(Error::NotPrime(4))));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(make_field(2, 40), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn alpha_squared_in_f4() {
        let f = make_field(2, 2).unwrap();
        let a = f.generator();
        // alpha^2 = alpha + 1 -> digits [1, 1]
        assert_eq!(f.digits(f.mul(&a, &a)), vec![1, 1]);
    }

    #[test]
    fn inverse_in_f3() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(f.inv(&Fe(2)), Some(Fe(2)));
        assert_eq!(f.inv(&Fe(0)), None);
        assert!(matches!(f.elem(Fe(0)).inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn owner_mismatch_is_an_error() {
        let f2 = make_field(2, 1).unwrap();
        let f4 = make_field(2, 2).unwrap();
        assert!(matches!(f2.elem(Fe(1)).add(&f4.elem(Fe(1))), Err(Error::FieldMismatch(..))));
    }

    #[test]
    fn additive_identity() {
        for (p, s) in [(2, 3), (3, 2), (5, 1)] {
            let f = make_field(p, s).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(&a, &Fe::ZERO), a);
            }
        }
    }

    #[test]
    fn enumeration_is_exhaustive_and_distinct() {
        let f9 = make_field(3, 2).unwrap();
        let all: Vec<_> = f9.elements().collect();
        let set: std::collections::HashSet<_> = all.iter().copied().collect();
        assert_eq!(all.len(), 9);
        assert_eq!(set.len(), 9);
        assert_eq!(make_field(2, 2).unwrap().elements().next(), Some(Fe::ZERO));
    }

    #[test]
    fn frobenius_is_additive_exhaustively() {
        for (p, s) in [(2, 1), (2, 2), (2, 3), (2, 4), (2, 5), (2, 6), (3, 1), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2)] {
            let f = make_field(p, s).unwrap();
            if f.q() > 81 {
                continue;
            }
            for a in f.elements() {
                for b in f.elements() {
                    let lhs = f.frobenius(f.add(&a, &b));
                    let rhs = f.add(&f.frobenius(a), &f.frobenius(b));
                    assert_eq!(lhs, rhs, "F_{}", f.q());
                }
            }
        }
    }

    #[test]
    fn fixed_field_of_q_frobenius_has_q_elements() {
        for (p, s, r) in [(2, 1, 2), (2, 1, 8), (2, 2, 2), (2, 2, 4), (2, 4, 2), (3, 1, 2), (3, 1, 5), (3, 2, 2), (5, 1, 3), (7, 1, 2)] {
            let base = make_field(p, s).unwrap();
            let ext = base.extension(r).unwrap();
            if ext.q() > 256 {
                continue;
            }
            let fixed: Vec<_> = ext.elements().filter(|a| ext.pow(a, base.q() as u64) == *a).collect();
            assert_eq!(fixed.len() as u32, base.q());
            let emb = base.embedding_into(&ext).unwrap();
            let image: std::collections::BTreeSet<_> = base.elements().map(|a| emb.apply(a)).collect();
            let fixed_set: std::collections::BTreeSet<_> = fixed.into_iter().collect();
            assert_eq!(image, fixed_set);
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        for (p, s, r) in [(2, 1, 4), (2, 2, 3), (3, 1, 3), (3, 2, 2), (2, 3, 2)] {
            let base = make_field(p, s).unwrap();
            let ext = base.extension(r).unwrap();
            let emb = base.embedding_into(&ext).unwrap();
            for a in base.elements() {
                for b in base.elements() {
                    assert_eq!(emb.apply(base.add(&a, &b)), ext.add(&emb.apply(a), &emb.apply(b)));
                    assert_eq!(emb.apply(base.mul(&a, &b)), ext.mul(&emb.apply(a), &emb.apply(b)));
                }
                assert_eq!(emb.preimage(emb.apply(a)), Some(a));
            }
        }
    }

    #[test]
    fn embeddings_compose_along_towers() {
        for (p, s, r1, r2) in [(2, 1, 2, 2), (2, 1, 2, 3), (2, 1, 3, 2), (3, 1, 2, 2), (2, 2, 2, 2)] {
            let a = make_field(p, s).unwrap();
            let b = a.extension(r1).unwrap();
            let c = b.extension(r2).unwrap();
            let ab = a.embedding_into(&b).unwrap();
            let bc = b.embedding_into(&c).unwrap();
            let ac = a.embedding_into(&c).unwrap();
            for x in a.elements() {
                assert_eq!(bc.apply(ab.apply(x)), ac.apply(x));
            }
        }
    }

    #[test]
    fn identity_embedding() {
        let f = make_field(3, 2).unwrap();
        let e = f.embedding_into(&f).unwrap();
        for a in f.elements() {
            assert_eq!(e.apply(a), a);
        }
        let one = make_field(2, 1).unwrap().elem(Fe::ONE).embed(2).unwrap();
        assert_eq!(one.value(), Fe::ONE);
        assert_eq!(one.field().q(), 4);
    }

    #[test]
    fn idempotents_of_f4_are_f2() {
        let f4 = make_field(2, 2).unwrap();
        let n = f4.elements().filter(|x| f4.mul(x, x) == *x).count();
        assert_eq!(n, 2);
    }

    #[test]
    fn incompatible_tower_rejected() {
        let f4 = make_field(2, 2).unwrap();
        let f8 = make_field(2, 3).unwrap();
        assert!(f4.embedding_into(&f8).is_err());
        let f9 = make_field(3, 2).unwrap();
        assert!(f4.embedding_into(&f9).is_err());
    }

    #[test]
    fn relative_trace_lands_in_subfield() {
        let f2 = make_field(2, 1).unwrap();
        let f16 = make_field(2, 4).unwrap();
        let nonzero = f16.elements().filter(|&a| f16.relative_trace(a, &f2).unwrap() != Fe::ZERO).count();
        assert_eq!(nonzero, 8);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn field_axioms_on_random_triples(ps in prop::sample::select(vec![(2u64, 4u32), (3, 3), (5, 2), (7, 1), (2, 7)]), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
                let f = make_field(ps.0, ps.1).unwrap();
                let (a, b, c) = (Fe(a % f.q()), Fe(b % f.q()), Fe(c % f.q()));
                prop_assert_eq!(f.add(&a, &b), f.add(&b, &a));
                prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                prop_assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
                prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                prop_assert_eq!(f.add(&a, &f.neg(&a)), Fe::ZERO);
                if a != Fe::ZERO {
                    prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), Fe::ONE);
                }
                prop_assert_eq!(f.pow(&a, f.q() as u64), a);
            }
        }
    }
}
