//! Text format for forms: terms joined by `" + "`, each `c*x0^a*x1^b`.
//!
//! Coefficients over a prime field are integers. Over `F_{p^s}` they are
//! written in terms of the generator `g` (the class of `x` modulo the field
//! modulus): `g^k` when the element is a power of `g`, otherwise a
//! parenthesized polynomial in `g`. The parser also accepts `-`, omitted unit
//! coefficients, omitted `^1`, and repeated variables.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};

use super::{dim_s, HomogPoly, Monomial};

/// Fields whose elements have a text form usable inside polynomial terms.
pub trait CoeffText: Field {
    /// Parses one atom: an integer or a field-specific symbol such as `g^3`.
    fn parse_atom(&self, atom: &str) -> Result<Self::Elem>;

    fn parse_coeff(&self, s: &str) -> Result<Self::Elem> {
        parse_expr(self, s, &|a| self.parse_atom(a))
    }
}

impl CoeffText for Gf {
    fn parse_atom(&self, atom: &str) -> Result<Fe> {
        if let Some(rest) = atom.strip_prefix('g') {
            if self.s() == 1 {
                return Err(Error::Parse(format!("'{atom}': the generator g is only defined over non-prime fields")));
            }
            let e = match rest.strip_prefix('^') {
                None if rest.is_empty() => 1,
                Some(e) => e.parse::<u64>().map_err(|_| Error::Parse(format!("bad exponent in '{atom}'")))?,
                None => return Err(Error::Parse(format!("unrecognized atom '{atom}'"))),
            };
            return Ok(self.pow(&self.generator(), e));
        }
        parse_integer(self, atom)
    }
}

pub(crate) fn parse_integer<K: Field>(k: &K, atom: &str) -> Result<K::Elem> {
    if atom.is_empty() || !atom.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("unrecognized atom '{atom}'")));
    }
    let p = k.characteristic();
    let mut acc = 0u64;
    for b in atom.bytes() {
        acc = (acc * 10 + (b - b'0') as u64) % p;
    }
    Ok(k.from_u64(acc))
}

/// Text for a single coefficient.
pub fn format_coeff(k: &Gf, a: Fe) -> String {
    if k.s() == 1 || a.0 < k.p() {
        return a.0.to_string();
    }
    let g = k.generator();
    let mut cur = g;
    let mut e = 1u64;
    while cur != Fe::ONE {
        if cur == a {
            return if e == 1 { "g".into() } else { format!("g^{e}") };
        }
        cur = k.mul(&cur, &g);
        e += 1;
    }
    let digits = k.digits(a);
    let terms: Vec<String> = digits
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(i, &c)| match (i, c) {
            (0, c) => c.to_string(),
            (1, 1) => "g".into(),
            (1, c) => format!("{c}*g"),
            (i, 1) => format!("g^{i}"),
            (i, c) => format!("{c}*g^{i}"),
        })
        .collect();
    if terms.len() == 1 {
        terms.into_iter().next().unwrap()
    } else {
        format!("({})", terms.join(" + "))
    }
}

fn wrap(s: String) -> String {
    let atomic = !s.contains(' ') && !s.contains('/');
    if atomic || (s.starts_with('(') && s.ends_with(')') && balanced_inner(&s)) {
        s
    } else {
        format!("({s})")
    }
}

fn balanced_inner(s: &str) -> bool {
    let inner = &s[1..s.len() - 1];
    let mut depth = 0i32;
    for c in inner.chars() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

pub fn format_poly<K: Field>(k: &K, f: &HomogPoly<K::Elem>) -> String {
    let terms = f.terms(k);
    if terms.is_empty() {
        return "0".into();
    }
    let parts: Vec<String> = terms
        .into_iter()
        .map(|(e, c)| {
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| if x == 1 { format!("x{i}") } else { format!("x{i}^{x}") })
                .collect();
            if vars.is_empty() {
                wrap(k.format_elem(&c))
            } else if k.is_one(&c) {
                vars.join("*")
            } else {
                format!("{}*{}", wrap(k.format_elem(&c)), vars.join("*"))
            }
        })
        .collect();
    parts.join(" + ")
}

/// Splits at top-level occurrences of `+`/`-`, keeping the sign with each
/// term. Returns `(negated, term)` pairs.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    let mut prev_sig: Option<char> = None;
    for c in s.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse(format!("unbalanced parentheses in '{s}'")));
                }
                cur.push(c);
            }
            '+' | '-' if depth == 0 && prev_sig != Some('^') => {
                if !cur.trim().is_empty() {
                    out.push((neg, cur.trim().to_string()));
                    cur.clear();
                    neg = false;
                } else if !out.is_empty() && prev_sig.is_some_and(|p| p != '+' && p != '-') {
                    return Err(Error::Parse(format!("empty term in '{s}'")));
                }
                if c == '-' {
                    neg = !neg;
                }
            }
            _ => cur.push(c),
        }
        if !c.is_whitespace() {
            prev_sig = Some(c);
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in '{s}'")));
    }
    if cur.trim().is_empty() {
        return Err(Error::Parse(format!("expression '{s}' ends without a term")));
    }
    out.push((neg, cur.trim().to_string()));
    Ok(out)
}

/// Splits a term at top-level `*` and `/`; the flag marks divisors.
fn split_factors(t: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut divide = false;
    for c in t.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            '*' | '/' if depth == 0 => {
                if cur.trim().is_empty() {
                    return Err(Error::Parse(format!("empty factor in '{t}'")));
                }
                out.push((divide, cur.trim().to_string()));
                cur.clear();
                divide = c == '/';
            }
            c if c.is_whitespace() => {}
            _ => cur.push(c),
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("empty factor in '{t}'")));
    }
    out.push((divide, cur));
    Ok(out)
}

/// Evaluates a sum of products of atoms and parenthesized subexpressions.
pub(crate) fn parse_expr<K: Field>(k: &K, s: &str, atom: &dyn Fn(&str) -> Result<K::Elem>) -> Result<K::Elem> {
    let mut acc = k.zero();
    for (neg, term) in split_terms(s)? {
        let mut prod = k.one();
        for (divide, factor) in split_factors(&term)? {
            let v = parse_factor(k, &factor, atom)?;
            prod = if divide {
                let inv = k.inv(&v).ok_or(Error::DivisionByZero)?;
                k.mul(&prod, &inv)
            } else {
                k.mul(&prod, &v)
            };
        }
        acc = if neg { k.sub(&acc, &prod) } else { k.add(&acc, &prod) };
    }
    Ok(acc)
}

fn parse_factor<K: Field>(k: &K, f: &str, atom: &dyn Fn(&str) -> Result<K::Elem>) -> Result<K::Elem> {
    if f.starts_with('(') {
        let close = matching_paren(f)?;
        let inner = parse_expr(k, &f[1..close], atom)?;
        let rest = &f[close + 1..];
        if rest.is_empty() {
            return Ok(inner);
        }
        let e = rest
            .strip_prefix('^')
            .and_then(|e| e.parse::<u64>().ok())
            .ok_or_else(|| Error::Parse(format!("unexpected text after ')' in '{f}'")))?;
        return Ok(k.pow(&inner, e));
    }
    atom(f)
}

fn matching_paren(f: &str) -> Result<usize> {
    let mut depth = 0i32;
    for (i, c) in f.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok(i);
                }
            }
            _ => {}
        }
    }
    Err(Error::Parse(format!("unbalanced parentheses in '{f}'")))
}

/// Parses a `d`-form in `x_0..x_n`. `degree` is needed only for `"0"`.
pub fn parse_poly<K: CoeffText>(k: &K, n: usize, text: &str, degree: Option<usize>) -> Result<HomogPoly<K::Elem>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms: Vec<(Vec<u32>, K::Elem)> = Vec::new();
    for (neg, term) in split_terms(text)? {
        let mut exps = vec![0u32; n + 1];
        let mut coeff = k.one();
        for (divide, factor) in split_factors(&term)? {
            if let Some(rest) = factor.strip_prefix('x') {
                if divide {
                    return Err(Error::Parse(format!("cannot divide by a variable in '{term}'")));
                }
                let (idx, e) = match rest.split_once('^') {
                    Some((i, e)) => (i, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent in '{factor}'")))?),
                    None => (rest, 1),
                };
                let i: usize = idx.parse().map_err(|_| Error::Parse(format!("bad variable '{factor}'")))?;
                if i > n {
                    return Err(Error::Parse(format!("variable x{i} outside P^{n}")));
                }
                exps[i] += e;
            } else {
                let v = parse_factor(k, &factor, &|a| k.parse_atom(a))?;
                coeff = if divide {
                    k.mul(&coeff, &k.inv(&v).ok_or(Error::DivisionByZero)?)
                } else {
                    k.mul(&coeff, &v)
                };
            }
        }
        if neg {
            coeff = k.neg(&coeff);
        }
        terms.push((exps, coeff));
    }
    let nonzero_deg = terms
        .iter()
        .filter(|(_, c)| !k.is_zero(c))
        .map(|(e, _)| e.iter().sum::<u32>() as usize)
        .next();
    let d = match (degree, nonzero_deg) {
        (Some(d), _) => d,
        (None, Some(d)) => d,
        (None, None) => terms[0].0.iter().sum::<u32>() as usize,
    };
    let mut coeffs = vec![k.zero(); dim_s(n, d)];
    for (e, c) in terms {
        if k.is_zero(&c) {
            continue;
        }
        let m = Monomial::new(e);
        if m.degree() != d {
            return Err(Error::Parse(format!("'{text}' is not homogeneous of degree {d}")));
        }
        let r = m.rank(n, d)?;
        coeffs[r] = k.add(&coeffs[r], &c);
    }
    HomogPoly::from_coeffs(n, d, coeffs)
}

/// Parses `[a:b:c]` into raw coordinates (not normalized).
pub fn parse_coords<K: CoeffText>(k: &K, text: &str) -> Result<Vec<K::Elem>> {
    let t = text.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("point '{t}' must look like [a:b:c]")))?;
    inner.split(':').map(|c| k.parse_coeff(c.trim())).collect()
}

pub fn format_coords<K: Field>(k: &K, coords: &[K::Elem]) -> String {
    let parts: Vec<String> = coords.iter().map(|c| k.format_elem(c)).collect();
    format!("[{}]", parts.join(":"))
}
