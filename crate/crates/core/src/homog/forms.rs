//! Enumeration of the members of `S_d` or of a linear subspace of it.
//!
//! A space with basis `b_0, ..., b_{k-1}` is enumerated through coefficient
//! vectors `(c_0, ..., c_{k-1})` in lexicographic order, `c_0` most
//! significant, each `c_j` running through the field in encoding order.
//! Fixing a prefix `(c_0, ..., c_{l-1})` selects a contiguous block of the
//! stream, which is how censuses are split across threads.

use crate::caps;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::gf::{Fe, Gf};

use super::{dim_s, HomogPoly};

#[derive(Clone, Debug)]
pub struct FormSpace {
    field: Gf,
    n: usize,
    d: usize,
    basis: Vec<Vec<Fe>>,
}

impl FormSpace {
    /// All of `S_d`, with the monomial basis.
    pub fn full(field: &Gf, n: usize, d: usize) -> Self {
        let dim = dim_s(n, d);
        let basis = (0..dim)
            .map(|i| {
                let mut v = vec![Fe::ZERO; dim];
                v[i] = Fe::ONE;
                v
            })
            .collect();
        FormSpace {
            field: field.clone(),
            n,
            d,
            basis,
        }
    }

    /// The span of the given coefficient vectors, which must be independent.
    pub fn from_basis(field: &Gf, n: usize, d: usize, basis: Vec<Vec<Fe>>) -> Result<Self> {
        let dim = dim_s(n, d);
        if basis.iter().any(|b| b.len() != dim) {
            return Err(Error::InvalidArgument("basis vector has the wrong length".into()));
        }
        if field.rank_of_rows(basis.clone()) != basis.len() {
            return Err(Error::InvalidArgument("basis vectors are dependent".into()));
        }
        Ok(FormSpace {
            field: field.clone(),
            n,
            d,
            basis,
        })
    }

    pub fn field(&self) -> &Gf {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Fe>] {
        &self.basis
    }

    /// `q^rank`, saturating.
    pub fn size(&self) -> u128 {
        (self.field.q() as u128).checked_pow(self.basis.len() as u32).unwrap_or(u128::MAX)
    }

    pub fn check_cap(&self) -> Result<()> {
        caps::check("census stream", self.size(), caps::census_cap(), caps::CENSUS_CAP_ENV)
    }

    /// `sum_j c_j b_j`.
    pub fn member(&self, coeffs: &[Fe]) -> HomogPoly<Fe> {
        let k = &self.field;
        let mut out = vec![Fe::ZERO; dim_s(self.n, self.d)];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.0 == 0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                if x.0 != 0 {
                    *o = k.add(o, &k.mul(c, x));
                }
            }
        }
        HomogPoly::from_coeffs(self.n, self.d, out).expect("dimension matches")
    }

    /// Member at position `index` of the stream.
    pub fn member_at(&self, mut index: u128) -> HomogPoly<Fe> {
        let q = self.field.q() as u128;
        let mut coeffs = vec![Fe::ZERO; self.basis.len()];
        for c in coeffs.iter_mut().rev() {
            *c = Fe((index % q) as u32);
            index /= q;
        }
        self.member(&coeffs)
    }

    pub fn iter(&self) -> Result<FormIter<'_>> {
        self.check_cap()?;
        Ok(FormIter::new(self, Vec::new()))
    }

    /// All prefixes of length `len` (clamped to the rank), in stream order.
    pub fn prefixes(&self, len: usize) -> Vec<Vec<Fe>> {
        let len = len.min(self.basis.len());
        let q = self.field.q();
        let count = (q as u64).pow(len as u32);
        (0..count)
            .map(|mut i| {
                let mut v = vec![Fe::ZERO; len];
                for c in v.iter_mut().rev() {
                    *c = Fe((i % q as u64) as u32);
                    i /= q as u64;
                }
                v
            })
            .collect()
    }

    /// The block of the stream whose coefficient vectors start with `prefix`.
    pub fn iter_prefix(&self, prefix: &[Fe]) -> Result<FormIter<'_>> {
        self.check_cap()?;
        if prefix.len() > self.basis.len() {
            return Err(Error::InvalidArgument("prefix longer than the basis".into()));
        }
        Ok(FormIter::new(self, prefix.to_vec()))
    }
}

/// Streams members; each step updates the running sum by one basis vector
/// difference instead of recomputing it.
pub struct FormIter<'a> {
    space: &'a FormSpace,
    fixed: usize,
    coeffs: Vec<Fe>,
    current: Vec<Fe>,
    done: bool,
}

impl<'a> FormIter<'a> {
    fn new(space: &'a FormSpace, prefix: Vec<Fe>) -> Self {
        let fixed = prefix.len();
        let mut coeffs = prefix;
        coeffs.resize(space.basis.len(), Fe::ZERO);
        let current = space.member(&coeffs).into_coeffs();
        FormIter {
            space,
            fixed,
            coeffs,
            current,
            done: false,
        }
    }

    fn advance(&mut self) {
        let k = &self.space.field;
        let q = k.q();
        let mut j = self.coeffs.len();
        loop {
            if j == self.fixed {
                self.done = true;
                return;
            }
            j -= 1;
            let old = self.coeffs[j];
            let new = Fe((old.0 + 1) % q);
            // current += (new - old) * b_j
            let delta = k.sub(&new, &old);
            for (o, x) in self.current.iter_mut().zip(&self.space.basis[j]) {
                if x.0 != 0 {
                    *o = k.add(o, &k.mul(&delta, x));
                }
            }
            self.coeffs[j] = new;
            if new.0 != 0 {
                return;
            }
        }
    }
}

impl Iterator for FormIter<'_> {
    type Item = HomogPoly<Fe>;

    fn next(&mut self) -> Option<HomogPoly<Fe>> {
        if self.done {
            return None;
        }
        let out = HomogPoly::from_coeffs(self.space.n, self.space.d, self.current.clone()).expect("dimension matches");
        self.advance();
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::make_field;
    use std::collections::HashSet;

    #[test]
    fn stream_sizes() {
        let k = make_field(2, 1).unwrap();
        assert_eq!(FormSpace::full(&k, 2, 1).iter().unwrap().count(), 8);
        assert_eq!(FormSpace::full(&k, 2, 2).iter().unwrap().count(), 64);
    }

    #[test]
    fn every_member_exactly_once() {
        let k = make_field(3, 1).unwrap();
        let sp = FormSpace::full(&k, 1, 2);
        let all: Vec<_> = sp.iter().unwrap().collect();
        assert_eq!(all.len(), 27);
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 27);
        for (i, f) in all.iter().enumerate() {
            assert_eq!(&sp.member_at(i as u128), f);
        }
    }

    #[test]
    fn prefixes_tile_the_stream() {
        let k = make_field(2, 2).unwrap();
        let sp = FormSpace::full(&k, 1, 2);
        let whole: Vec<_> = sp.iter().unwrap().collect();
        let tiled: Vec<_> = sp.prefixes(2).iter().flat_map(|p| sp.iter_prefix(p).unwrap().collect::<Vec<_>>()).collect();
        assert_eq!(whole, tiled);
    }

    #[test]
    fn subspace_of_linear_forms_through_a_point() {
        let k = make_field(2, 1).unwrap();
        let sp = FormSpace::from_basis(&k, 2, 1, vec![vec![Fe(1), Fe(0), Fe(0)], vec![Fe(0), Fe(1), Fe(0)]]).unwrap();
        let members: Vec<_> = sp.iter().unwrap().collect();
        assert_eq!(members.len(), 4);
        for f in members {
            assert_eq!(f.eval(&k, &[Fe(0), Fe(0), Fe(1)]), Fe(0));
        }
    }

    #[test]
    fn cap_refuses_huge_streams() {
        let k = make_field(2, 1).unwrap();
        let sp = FormSpace::full(&k, 2, 8);
        assert!(matches!(sp.iter(), Err(Error::CapExceeded { .. })));
    }
}
