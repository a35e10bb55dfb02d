//! The coefficient-field abstraction shared by every algebraic layer.
//!
//! Fields are passed as explicit context objects; elements are plain data.
//! This keeps polynomial and matrix code generic over finite fields and the
//! rational function field used for generic fibers over the DVR.

use std::fmt::Debug;

use crate::linalg;

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn characteristic(&self) -> u64;

    /// Image of a nonnegative integer under `Z -> K`.
    fn from_u64(&self, k: u64) -> Self::Elem;

    /// Number of elements, `None` when infinite.
    fn order(&self) -> Option<u64>;

    fn format_elem(&self, a: &Self::Elem) -> String;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Rank of a dense row set. Fields with a faster backend override this.
    fn rank_of_rows(&self, rows: Vec<Vec<Self::Elem>>) -> usize {
        let mut rows = rows;
        linalg::echelonize(self, &mut rows).len()
    }
}
