use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Column-style Hermite normal form `A·V = H` with `V` unimodular.
///
/// `H` is lower echelon: column `j < rank` has a positive pivot in row
/// `pivot_rows[j]`, zeros above it, and the entries left of each pivot
/// lie in `[0, pivot)`. Columns `rank..` of `H` are zero, so the matching
/// columns of `V` form a saturated kernel basis.
#[derive(Clone, Debug)]
pub struct ColumnHnf {
    pub h: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
}

pub fn column_hnf(a: &IntMatrix) -> ColumnHnf {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut v = IntMatrix::identity(n);
    let mut c = 0;
    let mut pivot_rows = Vec::new();
    for i in 0..m {
        if c == n {
            break;
        }
        loop {
            // smallest nonzero in row i among active columns, lowest column on ties
            let mut best: Option<(usize, BigInt)> = None;
            for j in c..n {
                let x = h.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, b)| ax < *b) {
                    best = Some((j, ax));
                }
            }
            let Some((j, _)) = best else { break };
            h.swap_cols(c, j);
            v.swap_cols(c, j);
            let mut clean = true;
            for j in c + 1..n {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let q = h.get(i, j).div_floor(h.get(i, c));
                h.col_sub_multiple(j, c, &q);
                v.col_sub_multiple(j, c, &q);
                if !h.get(i, j).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(i, c).is_zero() {
            continue;
        }
        if h.get(i, c).is_negative() {
            h.negate_col(c);
            v.negate_col(c);
        }
        for j in 0..c {
            let q = h.get(i, j).div_floor(h.get(i, c));
            if !q.is_zero() {
                h.col_sub_multiple(j, c, &q);
                v.col_sub_multiple(j, c, &q);
            }
        }
        pivot_rows.push(i);
        c += 1;
    }
    ColumnHnf { h, v, rank: c, pivot_rows }
}

/// Column-style Hermite normal form of `A`; the column span over ℤ is preserved.
pub fn hnf(a: &IntMatrix) -> IntMatrix {
    column_hnf(a).h
}

/// Nonzero columns of the Hermite form: a basis of the column lattice.
pub fn column_lattice_basis(a: &IntMatrix) -> IntMatrix {
    let f = column_hnf(a);
    f.h.select_columns(0..f.rank)
}

/// Columns form a ℤ-basis of `{x : A·x = 0}`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let f = column_hnf(a);
    f.v.select_columns(f.rank..a.cols())
}

pub fn rank(a: &IntMatrix) -> usize {
    column_hnf(a).rank
}

/// Integer solution of `A·x = b`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(a.rows(), b.len());
    let f = column_hnf(a);
    let mut y = vec![BigInt::zero(); a.cols()];
    for (j, &p) in f.pivot_rows.iter().enumerate() {
        let mut rhs = b[p].clone();
        for (k, yk) in y.iter().enumerate().take(j) {
            rhs -= f.h.get(p, k) * yk;
        }
        let (q, r) = rhs.div_rem(f.h.get(p, j));
        if !r.is_zero() {
            return None;
        }
        y[j] = q;
    }
    if f.h.mul_vec(&y) != b {
        return None;
    }
    Some(f.v.mul_vec(&y))
}

/// True iff every column of `b` lies in the column lattice of `a`.
pub fn column_span_contains(a: &IntMatrix, b: &IntMatrix) -> bool {
    b.columns().iter().all(|col| solve_integer(a, col).is_some())
}
