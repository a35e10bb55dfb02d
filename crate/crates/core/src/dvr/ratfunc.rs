//! Polynomials in `t` over `F_q` and the rational function field `F_q(t)`.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};
use crate::homog::text::{format_coeff, CoeffText};

/// A polynomial in `t`, coefficients from low to high degree, with no
/// trailing zeros. The zero polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct UPoly(Vec<Fe>);

impl UPoly {
    pub fn new(mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last() == Some(&Fe::ZERO) {
            coeffs.pop();
        }
        UPoly(coeffs)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: Fe) -> Self {
        UPoly::new(vec![c])
    }

    /// `c * t^k`.
    pub fn term(c: Fe, k: usize) -> Self {
        let mut v = vec![Fe::ZERO; k + 1];
        v[k] = c;
        UPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lead(&self) -> Fe {
        self.0.last().copied().unwrap_or(Fe::ZERO)
    }

    /// Value at `t = 0`.
    pub fn at_zero(&self) -> Fe {
        self.0.first().copied().unwrap_or(Fe::ZERO)
    }

    /// Largest `k` with `t^k | self`; `None` for zero.
    pub fn ord_t(&self) -> Option<usize> {
        self.0.iter().position(|c| *c != Fe::ZERO)
    }

    /// `self / t^k`, assuming divisibility.
    pub fn shift_down(&self, k: usize) -> Self {
        UPoly(self.0[k.min(self.0.len())..].to_vec())
    }

    pub fn add(&self, k: &Gf, other: &Self) -> Self {
        let len = self.0.len().max(other.0.len());
        let v = (0..len)
            .map(|i| {
                let a = self.0.get(i).copied().unwrap_or(Fe::ZERO);
                let b = other.0.get(i).copied().unwrap_or(Fe::ZERO);
                k.add(&a, &b)
            })
            .collect();
        UPoly::new(v)
    }

    pub fn neg(&self, k: &Gf) -> Self {
        UPoly(self.0.iter().map(|c| k.neg(c)).collect())
    }

    pub fn sub(&self, k: &Gf, other: &Self) -> Self {
        self.add(k, &other.neg(k))
    }

    pub fn scale(&self, k: &Gf, c: Fe) -> Self {
        UPoly::new(self.0.iter().map(|a| k.mul(a, &c)).collect())
    }

    pub fn mul(&self, k: &Gf, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut v = vec![Fe::ZERO; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == Fe::ZERO {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] = k.add(&v[i + j], &k.mul(a, b));
            }
        }
        UPoly::new(v)
    }

    /// Quotient and remainder; `None` when dividing by zero.
    pub fn divrem(&self, k: &Gf, other: &Self) -> Option<(Self, Self)> {
        let db = other.degree()?;
        let inv = k.inv(&other.lead()).expect("leading coefficient is nonzero");
        let mut r = self.0.clone();
        let mut q = vec![Fe::ZERO; self.0.len().saturating_sub(db)];
        while r.len() > db {
            let top = r.len() - 1;
            let c = k.mul(&r[top], &inv);
            let shift = top - db;
            q[shift] = c;
            for (j, b) in other.0.iter().enumerate() {
                r[shift + j] = k.sub(&r[shift + j], &k.mul(&c, b));
            }
            r.pop();
            while r.last() == Some(&Fe::ZERO) {
                r.pop();
            }
        }
        Some((UPoly::new(q), UPoly::new(r)))
    }

    pub fn monic(&self, k: &Gf) -> Self {
        match k.inv(&self.lead()) {
            Some(inv) => self.scale(k, inv),
            None => UPoly::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, k: &Gf, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(k, &b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic(k)
    }

    pub fn eval(&self, k: &Gf, x: Fe) -> Fe {
        self.0.iter().rev().fold(Fe::ZERO, |acc, c| k.add(&k.mul(&acc, &x), c))
    }

    pub fn format(&self, k: &Gf) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| **c != Fe::ZERO)
            .map(|(i, &c)| {
                let tp = match i {
                    0 => String::new(),
                    1 => "t".into(),
                    i => format!("t^{i}"),
                };
                match (i, c == Fe::ONE) {
                    (0, _) => format_coeff(k, c),
                    (_, true) => tp,
                    (_, false) => format!("{}*{tp}", format_coeff(k, c)),
                }
            })
            .collect();
        terms.join(" + ")
    }
}

/// An element `num / den` of `F_q(t)` in lowest terms with `den` monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rat {
    num: UPoly,
    den: UPoly,
}

impl Rat {
    pub fn num(&self) -> &UPoly {
        &self.num
    }

    pub fn den(&self) -> &UPoly {
        &self.den
    }

    /// `t`-adic valuation; `None` for zero.
    pub fn valuation(&self) -> Option<i64> {
        let vn = self.num.ord_t()? as i64;
        Some(vn - self.den.ord_t().expect("denominator is nonzero") as i64)
    }

    /// Regular at `t = 0`, i.e. an element of the local ring.
    pub fn is_integral(&self) -> bool {
        self.den.at_zero() != Fe::ZERO
    }
}

/// The field `F_q(t)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatField {
    base: Gf,
}

impl RatField {
    pub fn new(base: &Gf) -> Self {
        RatField { base: base.clone() }
    }

    pub fn base(&self) -> &Gf {
        &self.base
    }

    pub fn frac(&self, num: UPoly, den: UPoly) -> Result<Rat> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.normalize(num, den))
    }

    pub fn poly(&self, p: UPoly) -> Rat {
        Rat {
            num: p,
            den: UPoly::constant(Fe::ONE),
        }
    }

    pub fn constant(&self, c: Fe) -> Rat {
        self.poly(UPoly::constant(c))
    }

    pub fn t(&self) -> Rat {
        self.poly(UPoly::term(Fe::ONE, 1))
    }

    pub fn t_pow(&self, k: usize) -> Rat {
        self.poly(UPoly::term(Fe::ONE, k))
    }

    /// Image in the residue field; `None` if `a` is not integral.
    pub fn residue(&self, a: &Rat) -> Option<Fe> {
        let d0 = a.den.at_zero();
        let inv = self.base.inv(&d0)?;
        Some(self.base.mul(&a.num.at_zero(), &inv))
    }

    /// `a / t^k` for any integer `k`.
    pub fn div_t_pow(&self, a: &Rat, k: i64) -> Rat {
        if k >= 0 {
            self.normalize(a.num.clone(), a.den.mul(&self.base, &UPoly::term(Fe::ONE, k as usize)))
        } else {
            self.normalize(a.num.mul(&self.base, &UPoly::term(Fe::ONE, (-k) as usize)), a.den.clone())
        }
    }

    fn normalize(&self, num: UPoly, den: UPoly) -> Rat {
        let k = &self.base;
        if num.is_zero() {
            return self.zero();
        }
        let g = num.gcd(k, &den);
        let (mut num, mut den) = if g.degree() == Some(0) {
            (num, den)
        } else {
            (num.divrem(k, &g).expect("gcd is nonzero").0, den.divrem(k, &g).expect("gcd is nonzero").0)
        };
        let lc = den.lead();
        if lc != Fe::ONE {
            let inv = k.inv(&lc).expect("nonzero");
            num = num.scale(k, inv);
            den = den.scale(k, inv);
        }
        Rat { num, den }
    }
}

impl Field for RatField {
    type Elem = Rat;

    fn zero(&self) -> Rat {
        self.poly(UPoly::zero())
    }

    fn one(&self) -> Rat {
        self.constant(Fe::ONE)
    }

    fn is_zero(&self, a: &Rat) -> bool {
        a.num.is_zero()
    }

    fn add(&self, a: &Rat, b: &Rat) -> Rat {
        let k = &self.base;
        if a.num.is_zero() {
            return b.clone();
        }
        if b.num.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            return self.normalize(a.num.add(k, &b.num), a.den.clone());
        }
        let num = a.num.mul(k, &b.den).add(k, &b.num.mul(k, &a.den));
        self.normalize(num, a.den.mul(k, &b.den))
    }

    fn neg(&self, a: &Rat) -> Rat {
        Rat {
            num: a.num.neg(&self.base),
            den: a.den.clone(),
        }
    }

    fn mul(&self, a: &Rat, b: &Rat) -> Rat {
        if a.num.is_zero() || b.num.is_zero() {
            return self.zero();
        }
        let k = &self.base;
        self.normalize(a.num.mul(k, &b.num), a.den.mul(k, &b.den))
    }

    fn inv(&self, a: &Rat) -> Option<Rat> {
        if a.num.is_zero() {
            return None;
        }
        Some(self.normalize(a.den.clone(), a.num.clone()))
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }

    fn from_u64(&self, k: u64) -> Rat {
        self.constant(self.base.from_u64(k))
    }

    fn order(&self) -> Option<u64> {
        None
    }

    fn format_elem(&self, a: &Rat) -> String {
        let num = a.num.format(&self.base);
        if a.den.degree() == Some(0) {
            return num;
        }
        format!("({num})/({})", a.den.format(&self.base))
    }
}

impl CoeffText for RatField {
    fn parse_atom(&self, atom: &str) -> Result<Rat> {
        if let Some(rest) = atom.strip_prefix('t') {
            let e = match rest.strip_prefix('^') {
                None if rest.is_empty() => 1,
                Some(e) => e.parse::<usize>().map_err(|_| Error::Parse(format!("bad exponent in '{atom}'")))?,
                None => return Err(Error::Parse(format!("unrecognized atom '{atom}'"))),
            };
            return Ok(self.t_pow(e));
        }
        Ok(self.constant(self.base.parse_atom(atom)?))
    }
}
