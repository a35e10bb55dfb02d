use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Exponent vector of a monomial in `x_0, ..., x_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    /// Position inside `S_d` (descending lexicographic order on exponents).
    pub fn rank(&self, n: usize, d: usize) -> Result<usize> {
        if self.exps.len() != n + 1 {
            return Err(Error::InvalidArgument(format!(
                "monomial has {} exponents, expected {}",
                self.exps.len(),
                n + 1
            )));
        }
        if self.degree() != d {
            return Err(Error::DegreeMismatch {
                expected: d,
                got: self.degree(),
            });
        }
        let e: Vec<u8> = self.exps.iter().map(|&x| x as u8).collect();
        Ok(rank_exps(&e))
    }

    pub fn unrank(n: usize, d: usize, index: usize) -> Result<Monomial> {
        let b = basis(n, d);
        if index >= b.len() {
            return Err(Error::InvalidArgument(format!("monomial index {index} out of range for dim {}", b.len())));
        }
        Ok(Monomial::new(b.exps(index).iter().map(|&x| x as u32).collect()))
    }
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `dim S_d = C(d + n, n)` for `n + 1` variables.
pub fn dim_s(n: usize, d: usize) -> usize {
    binomial((d + n) as u64, n as u64) as usize
}

/// Number of degree `deg` monomials in `vars` variables.
fn count(vars: usize, deg: usize) -> usize {
    if vars == 0 {
        return usize::from(deg == 0);
    }
    binomial((deg + vars - 1) as u64, (vars - 1) as u64) as usize
}

pub(crate) fn rank_exps(e: &[u8]) -> usize {
    let n = e.len() - 1;
    let mut rem: usize = e.iter().map(|&x| x as usize).sum();
    let mut r = 0;
    for i in 0..n {
        let ei = e[i] as usize;
        for v in ei + 1..=rem {
            r += count(n - i, rem - v);
        }
        rem -= ei;
    }
    r
}

/// All monomials of degree `d` in `n + 1` variables, in rank order.
#[derive(Debug)]
pub struct MonomialBasis {
    n: usize,
    d: usize,
    flat: Vec<u8>,
}

impl MonomialBasis {
    fn build(n: usize, d: usize) -> Self {
        let mut flat = Vec::with_capacity(dim_s(n, d) * (n + 1));
        let mut cur = vec![0u8; n + 1];
        fn rec(i: usize, rem: usize, cur: &mut Vec<u8>, out: &mut Vec<u8>) {
            let n = cur.len() - 1;
            if i == n {
                cur[n] = rem as u8;
                out.extend_from_slice(cur);
                return;
            }
            for v in (0..=rem).rev() {
                cur[i] = v as u8;
                rec(i + 1, rem - v, cur, out);
            }
        }
        rec(0, d, &mut cur, &mut flat);
        MonomialBasis { n, d, flat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.flat.len() / (self.n + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.flat.is_empty()
    }

    #[inline]
    pub fn exps(&self, i: usize) -> &[u8] {
        &self.flat[i * (self.n + 1)..(i + 1) * (self.n + 1)]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.flat.chunks_exact(self.n + 1)
    }
}

type BasisCache = Mutex<HashMap<(usize, usize), Arc<MonomialBasis>>>;
type MulCache = Mutex<HashMap<(usize, usize, usize), Arc<Vec<u32>>>>;

pub fn basis(n: usize, d: usize) -> Arc<MonomialBasis> {
    static CACHE: OnceLock<BasisCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().unwrap().get(&(n, d)) {
        return b.clone();
    }
    let b = Arc::new(MonomialBasis::build(n, d));
    cache.lock().unwrap().entry((n, d)).or_insert(b).clone()
}

/// `table[i * dim S_b + j] = rank(m_i * m_j)` for `m_i in S_a`, `m_j in S_b`.
pub fn mul_table(n: usize, a: usize, b: usize) -> Arc<Vec<u32>> {
    static CACHE: OnceLock<MulCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&(n, a, b)) {
        return t.clone();
    }
    let ba = basis(n, a);
    let bb = basis(n, b);
    let mut t = Vec::with_capacity(ba.len() * bb.len());
    let mut buf = vec![0u8; n + 1];
    for ea in ba.iter() {
        for eb in bb.iter() {
            for k in 0..=n {
                buf[k] = ea[k] + eb[k];
            }
            t.push(rank_exps(&buf) as u32);
        }
    }
    let t = Arc::new(t);
    cache.lock().unwrap().entry((n, a, b)).or_insert(t).clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_monomials_in_lex_order() {
        for (i, e) in [[1, 0, 0], [0, 1, 0], [0, 0, 1]].iter().enumerate() {
            assert_eq!(Monomial::new(e.to_vec()).rank(2, 1).unwrap(), i);
        }
    }

    #[test]
    fn quadrics_in_three_variables() {
        assert_eq!(basis(2, 2).len(), 6);
        assert_eq!(dim_s(2, 2), 6);
    }

    #[test]
    fn rank_unrank_roundtrip() {
        for d in 0..=6 {
            let b = basis(2, d);
            assert_eq!(b.len(), dim_s(2, d));
            for i in 0..b.len() {
                let m = Monomial::unrank(2, d, i).unwrap();
                assert_eq!(m.rank(2, d).unwrap(), i);
            }
        }
    }

    #[test]
    fn degree_mismatch_rejected() {
        assert!(matches!(
            Monomial::new(vec![1, 1, 0]).rank(2, 3),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn product_table_agrees_with_rank() {
        let t = mul_table(3, 2, 3);
        let (b2, b3) = (basis(3, 2), basis(3, 3));
        for i in 0..b2.len() {
            for j in 0..b3.len() {
                let e: Vec<u32> = (0..4).map(|k| (b2.exps(i)[k] + b3.exps(j)[k]) as u32).collect();
                assert_eq!(t[i * b3.len() + j] as usize, Monomial::new(e).rank(3, 5).unwrap());
            }
        }
    }
}
