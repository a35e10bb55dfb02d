//! Dense exact linear algebra over any [`Field`], plus a bit-packed `F_2`
//! kernel for the rank computations that dominate censuses.

use crate::field::Field;

/// Reduces `rows` in place to reduced row echelon form, dropping zero rows.
/// Pivots are the leftmost available columns, so the result is unique for a
/// given row space. Returns the pivot column of each surviving row.
pub fn echelonize<K: Field>(k: &K, rows: &mut Vec<Vec<K::Elem>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        if top == rows.len() {
            break;
        }
        let Some(found) = (top..rows.len()).find(|&i| !k.is_zero(&rows[i][col])) else {
            continue;
        };
        rows.swap(top, found);
        let inv = k.inv(&rows[top][col]).expect("pivot is nonzero");
        if !k.is_one(&inv) {
            for x in rows[top][col..].iter_mut() {
                *x = k.mul(x, &inv);
            }
        }
        let pivot_row = std::mem::take(&mut rows[top]);
        for (i, row) in rows.iter_mut().enumerate() {
            if i == top || k.is_zero(&row[col]) {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if !k.is_zero(y) {
                    *x = k.sub(x, &k.mul(&factor, y));
                }
            }
        }
        rows[top] = pivot_row;
        pivots.push(col);
        top += 1;
    }
    rows.truncate(top);
    pivots
}

/// Reduces `v` against an echelonized basis; returns the remainder.
pub fn reduce<K: Field>(k: &K, basis: &[Vec<K::Elem>], pivots: &[usize], v: &[K::Elem]) -> Vec<K::Elem> {
    let mut out = v.to_vec();
    for (row, &col) in basis.iter().zip(pivots) {
        if k.is_zero(&out[col]) {
            continue;
        }
        let factor = out[col].clone();
        for (x, y) in out.iter_mut().zip(row) {
            if !k.is_zero(y) {
                *x = k.sub(x, &k.mul(&factor, y));
            }
        }
    }
    out
}

/// Basis of `{x : M x = 0}` for `M` given by its rows over `ncols` columns.
pub fn kernel<K: Field>(k: &K, rows: &[Vec<K::Elem>], ncols: usize) -> Vec<Vec<K::Elem>> {
    let mut m = rows.to_vec();
    let pivots = echelonize(k, &mut m);
    let mut is_pivot = vec![false; ncols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut out = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![k.zero(); ncols];
        v[free] = k.one();
        for (row, &pc) in m.iter().zip(&pivots) {
            v[pc] = k.neg(&row[free]);
        }
        out.push(v);
    }
    out
}

/// Solves `sum_j x_j * cols[j] = target`; `None` if inconsistent.
pub fn solve_combination<K: Field>(k: &K, cols: &[Vec<K::Elem>], target: &[K::Elem]) -> Option<Vec<K::Elem>> {
    let nrows = target.len();
    let nunk = cols.len();
    // augmented matrix rows: [cols[0][i], ..., cols[n-1][i], target[i]]
    let mut aug: Vec<Vec<K::Elem>> = (0..nrows)
        .map(|i| {
            let mut r: Vec<K::Elem> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(target[i].clone());
            r
        })
        .collect();
    let pivots = echelonize(k, &mut aug);
    if pivots.last() == Some(&nunk) {
        return None;
    }
    let mut x = vec![k.zero(); nunk];
    for (row, &pc) in aug.iter().zip(&pivots) {
        x[pc] = row[nunk].clone();
    }
    Some(x)
}

/// Rank of a bit-packed `F_2` matrix with `words` 64-bit words per row.
/// The buffer is clobbered.
pub fn rank_gf2(rows: &mut [u64], words: usize, ncols: usize) -> usize {
    let nrows = rows.len() / words.max(1);
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let (w, bit) = (col / 64, 1u64 << (col % 64));
        let Some(found) = (rank..nrows).find(|&i| rows[i * words + w] & bit != 0) else {
            continue;
        };
        if found != rank {
            for j in 0..words {
                rows.swap(rank * words + j, found * words + j);
            }
        }
        for i in rank + 1..nrows {
            if rows[i * words + w] & bit != 0 {
                for j in w..words {
                    let v = rows[rank * words + j];
                    rows[i * words + j] ^= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{make_field, Fe};

    #[test]
    fn rref_is_canonical() {
        let f = make_field(3, 1).unwrap();
        let mut a = vec![vec![Fe(1), Fe(2), Fe(0)], vec![Fe(2), Fe(1), Fe(0)], vec![Fe(0), Fe(0), Fe(1)]];
        let mut b = vec![vec![Fe(0), Fe(0), Fe(2)], vec![Fe(2), Fe(1), Fe(1)]];
        let pa = echelonize(&f, &mut a);
        let pb = echelonize(&f, &mut b);
        assert_eq!(pa, pb);
        assert_eq!(a, b);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let f = make_field(5, 1).unwrap();
        let m = vec![vec![Fe(1), Fe(2), Fe(3), Fe(4)], vec![Fe(2), Fe(4), Fe(1), Fe(0)]];
        let ker = kernel(&f, &m, 4);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            for row in &m {
                let dot = row.iter().zip(v).fold(Fe(0), |acc, (a, b)| f.add(&acc, &f.mul(a, b)));
                assert_eq!(dot, Fe(0));
            }
        }
    }

    #[test]
    fn gf2_rank_matches_generic() {
        let f = make_field(2, 1).unwrap();
        let rows: Vec<Vec<Fe>> = (0..70u32)
            .map(|i| (0..70u32).map(|j| Fe(((i * 7 + j * 13 + i * j) % 3 == 0) as u32)).collect())
            .collect();
        let mut generic = rows.clone();
        let r1 = echelonize(&f, &mut generic).len();
        assert_eq!(f.rank_of_rows(rows), r1);
    }

    #[test]
    fn inconsistent_system() {
        let f = make_field(2, 1).unwrap();
        let cols = vec![vec![Fe(1), Fe(1)]];
        assert!(solve_combination(&f, &cols, &[Fe(1), Fe(0)]).is_none());
        assert_eq!(solve_combination(&f, &cols, &[Fe(1), Fe(1)]), Some(vec![Fe(1)]));
    }
}
