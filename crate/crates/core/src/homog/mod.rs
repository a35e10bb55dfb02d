//! Dense homogeneous polynomials.
//!
//! A form of degree `d` in `x_0..x_n` is a coefficient vector indexed by the
//! monomial ranks of [`monomial`]. Polynomials carry no field handle; every
//! operation takes the coefficient field explicitly.

pub mod forms;
pub mod monomial;
pub mod text;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Embedding, Fe};

pub use forms::FormSpace;
pub use monomial::{basis, binomial, dim_s, mul_table, Monomial, MonomialBasis};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomogPoly<E> {
    n: usize,
    d: usize,
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq> HomogPoly<E> {
    pub fn from_coeffs(n: usize, d: usize, coeffs: Vec<E>) -> Result<Self> {
        let dim = dim_s(n, d);
        if coeffs.len() != dim {
            return Err(Error::InvalidArgument(format!(
                "degree {d} form in {} variables needs {dim} coefficients, got {}",
                n + 1,
                coeffs.len()
            )));
        }
        Ok(HomogPoly { n, d, coeffs })
    }

    pub fn zero<K: Field<Elem = E>>(k: &K, n: usize, d: usize) -> Self {
        HomogPoly {
            n,
            d,
            coeffs: vec![k.zero(); dim_s(n, d)],
        }
    }

    pub fn monomial<K: Field<Elem = E>>(k: &K, exps: &[u32]) -> Result<Self> {
        let m = Monomial::new(exps.to_vec());
        let n = exps.len().checked_sub(1).ok_or_else(|| Error::InvalidArgument("empty exponent vector".into()))?;
        let d = m.degree();
        let mut f = Self::zero(k, n, d);
        f.coeffs[m.rank(n, d)?] = k.one();
        Ok(f)
    }

    /// The coordinate form `x_i`.
    pub fn var<K: Field<Elem = E>>(k: &K, n: usize, i: usize) -> Self {
        let mut f = Self::zero(k, n, 1);
        f.coeffs[i] = k.one();
        f
    }

    pub fn constant<K: Field<Elem = E>>(k: &K, n: usize, c: E) -> Self {
        let _ = k;
        HomogPoly { n, d: 0, coeffs: vec![c] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<E> {
        self.coeffs
    }

    pub fn coeff(&self, m: &Monomial) -> Result<&E> {
        Ok(&self.coeffs[m.rank(self.n, self.d)?])
    }

    pub fn set_coeff(&mut self, m: &Monomial, c: E) -> Result<()> {
        let i = m.rank(self.n, self.d)?;
        self.coeffs[i] = c;
        Ok(())
    }

    pub fn is_zero<K: Field<Elem = E>>(&self, k: &K) -> bool {
        self.coeffs.iter().all(|c| k.is_zero(c))
    }

    /// `(exponents, coefficient)` for every nonzero term, in rank order.
    pub fn terms<K: Field<Elem = E>>(&self, k: &K) -> Vec<(Vec<u8>, E)> {
        let b = basis(self.n, self.d);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !k.is_zero(c))
            .map(|(i, c)| (b.exps(i).to_vec(), c.clone()))
            .collect()
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::InvalidArgument(format!(
                "forms live in different ambient spaces (P^{} vs P^{})",
                self.n, other.n
            )));
        }
        if self.d != other.d {
            return Err(Error::DegreeMismatch {
                expected: self.d,
                got: other.d,
            });
        }
        Ok(())
    }

    pub fn add<K: Field<Elem = E>>(&self, k: &K, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| k.add(a, b)).collect();
        Ok(HomogPoly { n: self.n, d: self.d, coeffs })
    }

    pub fn sub<K: Field<Elem = E>>(&self, k: &K, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| k.sub(a, b)).collect();
        Ok(HomogPoly { n: self.n, d: self.d, coeffs })
    }

    pub fn scale<K: Field<Elem = E>>(&self, k: &K, c: &E) -> Self {
        HomogPoly {
            n: self.n,
            d: self.d,
            coeffs: self.coeffs.iter().map(|a| k.mul(a, c)).collect(),
        }
    }

    pub fn neg<K: Field<Elem = E>>(&self, k: &K) -> Self {
        HomogPoly {
            n: self.n,
            d: self.d,
            coeffs: self.coeffs.iter().map(|a| k.neg(a)).collect(),
        }
    }

    pub fn mul<K: Field<Elem = E>>(&self, k: &K, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::InvalidArgument("forms live in different ambient spaces".into()));
        }
        let table = mul_table(self.n, self.d, other.d);
        let mut out = Self::zero(k, self.n, self.d + other.d);
        let w = other.coeffs.len();
        for (i, a) in self.coeffs.iter().enumerate() {
            if k.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if k.is_zero(b) {
                    continue;
                }
                let idx = table[i * w + j] as usize;
                out.coeffs[idx] = k.add(&out.coeffs[idx], &k.mul(a, b));
            }
        }
        Ok(out)
    }

    pub fn pow<K: Field<Elem = E>>(&self, k: &K, e: u32) -> Result<Self> {
        let mut acc = Self::constant(k, self.n, k.one());
        for _ in 0..e {
            acc = acc.mul(k, self)?;
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to `x_i`.
    pub fn diff<K: Field<Elem = E>>(&self, k: &K, i: usize) -> Result<Self> {
        if self.d == 0 {
            return Err(Error::InvalidArgument("cannot differentiate a degree 0 form".into()));
        }
        if i > self.n {
            return Err(Error::InvalidArgument(format!("variable x{i} out of range")));
        }
        let src = basis(self.n, self.d);
        let mut out = Self::zero(k, self.n, self.d - 1);
        let mut buf = vec![0u8; self.n + 1];
        for (idx, c) in self.coeffs.iter().enumerate() {
            let e = src.exps(idx);
            if e[i] == 0 || k.is_zero(c) {
                continue;
            }
            buf.copy_from_slice(e);
            buf[i] -= 1;
            let r = monomial::rank_exps(&buf);
            out.coeffs[r] = k.mul(c, &k.from_u64(e[i] as u64));
        }
        Ok(out)
    }

    /// All partials `∂f/∂x_0, ..., ∂f/∂x_n`.
    pub fn gradient<K: Field<Elem = E>>(&self, k: &K) -> Result<Vec<Self>> {
        (0..=self.n).map(|i| self.diff(k, i)).collect()
    }

    /// Value at an affine representative (`coords.len() == n + 1`).
    pub fn eval<K: Field<Elem = E>>(&self, k: &K, coords: &[E]) -> E {
        debug_assert_eq!(coords.len(), self.n + 1);
        let powers: Vec<Vec<E>> = coords
            .iter()
            .map(|x| {
                let mut v = Vec::with_capacity(self.d + 1);
                v.push(k.one());
                for j in 0..self.d {
                    let next = k.mul(&v[j], x);
                    v.push(next);
                }
                v
            })
            .collect();
        let b = basis(self.n, self.d);
        let mut acc = k.zero();
        for (idx, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let mut t = c.clone();
            for (var, &e) in b.exps(idx).iter().enumerate() {
                if e > 0 {
                    t = k.mul(&t, &powers[var][e as usize]);
                }
            }
            acc = k.add(&acc, &t);
        }
        acc
    }

    pub fn eval_point<K: Field<Elem = E>>(&self, k: &K, p: &ProjPoint<E>) -> E {
        self.eval(k, &p.coords)
    }

    pub fn map<F, E2>(&self, f: F) -> HomogPoly<E2>
    where
        F: Fn(&E) -> E2,
    {
        HomogPoly {
            n: self.n,
            d: self.d,
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Substitutes `x_i -> x_{perm[i]}`.
    pub fn permute_vars<K: Field<Elem = E>>(&self, k: &K, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n + 1 {
            return Err(Error::InvalidArgument("permutation has the wrong length".into()));
        }
        let b = basis(self.n, self.d);
        let mut out = Self::zero(k, self.n, self.d);
        let mut buf = vec![0u8; self.n + 1];
        for (idx, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let e = b.exps(idx);
            for i in 0..=self.n {
                buf[perm[i]] = e[i];
            }
            out.coeffs[monomial::rank_exps(&buf)] = c.clone();
        }
        Ok(out)
    }

    /// Index of the leading (largest in lex order) nonzero term.
    pub fn leading_index<K: Field<Elem = E>>(&self, k: &K) -> Option<usize> {
        self.coeffs.iter().position(|c| !k.is_zero(c))
    }
}

impl HomogPoly<Fe> {
    pub fn embed(&self, emb: &Embedding) -> HomogPoly<Fe> {
        self.map(|&c| emb.apply(c))
    }
}

/// Returns `q` with `f = g * q`, or `None` when `g` does not divide `f`.
///
/// The unknown coefficients of `q` satisfy a linear system whose matrix is
/// triangular: the leading monomial of `g * m` is `lead(g) * m`, and
/// multiplication by a fixed monomial preserves lex order. So the system is
/// solved by substitution from the largest monomial downwards.
pub fn poly_divides<K: Field>(
    k: &K,
    g: &HomogPoly<K::Elem>,
    f: &HomogPoly<K::Elem>,
) -> Result<Option<HomogPoly<K::Elem>>> {
    if g.n != f.n {
        return Err(Error::InvalidArgument("forms live in different ambient spaces".into()));
    }
    let Some(lead) = g.leading_index(k) else {
        return Err(Error::InvalidArgument("divisor is the zero form".into()));
    };
    if g.d > f.d {
        return Ok(None);
    }
    let e = f.d - g.d;
    let table = mul_table(f.n, g.d, e);
    let w = dim_s(f.n, e);
    let lead_inv = k.inv(&g.coeffs[lead]).expect("leading coefficient is nonzero");
    let mut rem = f.coeffs.clone();
    let mut quot = vec![k.zero(); w];
    let g_terms: Vec<(usize, K::Elem)> = g
        .coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| !k.is_zero(c))
        .map(|(i, c)| (i, c.clone()))
        .collect();
    // Quotient monomials in rank order: lead(g) * m_j has increasing rank in j.
    for (j, qj) in quot.iter_mut().enumerate() {
        let target = table[lead * w + j] as usize;
        if k.is_zero(&rem[target]) {
            continue;
        }
        let c = k.mul(&rem[target], &lead_inv);
        for (gi, gc) in &g_terms {
            let idx = table[gi * w + j] as usize;
            rem[idx] = k.sub(&rem[idx], &k.mul(&c, gc));
        }
        *qj = c;
    }
    if rem.iter().all(|c| k.is_zero(c)) {
        Ok(Some(HomogPoly {
            n: f.n,
            d: e,
            coeffs: quot,
        }))
    } else {
        Ok(None)
    }
}

/// A point of `P^n` with the first nonzero coordinate equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint<E> {
    coords: Vec<E>,
}

impl<E: Clone + PartialEq> ProjPoint<E> {
    pub fn new<K: Field<Elem = E>>(k: &K, coords: Vec<E>) -> Result<Self> {
        let Some(pos) = coords.iter().position(|c| !k.is_zero(c)) else {
            return Err(Error::InvalidArgument("all coordinates are zero".into()));
        };
        let inv = k.inv(&coords[pos]).expect("nonzero");
        let coords = if k.is_one(&inv) {
            coords
        } else {
            coords.iter().map(|c| k.mul(c, &inv)).collect()
        };
        Ok(ProjPoint { coords })
    }

    /// Wraps coordinates that are already normalized.
    pub(crate) fn from_normalized(coords: Vec<E>) -> Self {
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[E] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len() - 1
    }

    /// Index of the first nonzero coordinate (the affine chart used).
    pub fn chart<K: Field<Elem = E>>(&self, k: &K) -> usize {
        self.coords.iter().position(|c| !k.is_zero(c)).expect("normalized point")
    }

    pub fn map<F, E2>(&self, f: F) -> ProjPoint<E2>
    where
        F: Fn(&E) -> E2,
    {
        ProjPoint {
            coords: self.coords.iter().map(f).collect(),
        }
    }

    pub fn permute(&self, perm: &[usize]) -> Self {
        let mut coords = self.coords.clone();
        for (i, c) in self.coords.iter().enumerate() {
            coords[perm[i]] = c.clone();
        }
        ProjPoint { coords }
    }
}

impl ProjPoint<Fe> {
    pub fn embed(&self, emb: &Embedding) -> ProjPoint<Fe> {
        self.map(|&c| emb.apply(c))
    }
}
