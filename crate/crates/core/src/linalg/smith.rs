use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// `U·A·V = S` with `S` diagonal, nonnegative, and `d₁ | d₂ | …` on the diagonal.
#[derive(Clone, Debug)]
pub struct SmithDecomposition {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Nonzero diagonal entries of `S`, unit factors included.
    pub invariant_factors: Vec<BigInt>,
}

/// Dense Smith reduction that also keeps `U⁻¹`, which the cokernel
/// coordinate maps need.
#[derive(Clone, Debug)]
pub(crate) struct DenseSmith {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub rank: usize,
}

struct Work {
    s: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Work {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
    }

    /// row[t] -= q·row[src]
    fn row_sub(&mut self, t: usize, src: usize, q: &BigInt) {
        self.s.row_sub_multiple(t, src, q);
        self.u.row_sub_multiple(t, src, q);
        // U⁻¹ ← U⁻¹·(I + q·e_t·e_srcᵀ)
        self.u_inv.col_sub_multiple(src, t, &-q);
    }

    fn col_sub(&mut self, t: usize, src: usize, q: &BigInt) {
        self.s.col_sub_multiple(t, src, q);
        self.v.col_sub_multiple(t, src, q);
    }

    fn negate_row(&mut self, i: usize) {
        self.s.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }
}

/// Minimal nonzero |entry| in the trailing block, lowest row then lowest column on ties.
fn find_pivot(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            let ax = x.abs();
            if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                best = Some((i, j, ax));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

pub(crate) fn dense_smith(a: &IntMatrix) -> DenseSmith {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        s: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        let Some((pi, pj)) = find_pivot(&w.s, t) else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            // clear column t below the pivot
            let mut residue = false;
            for i in t + 1..m {
                if w.s.get(i, t).is_zero() {
                    continue;
                }
                let q = w.s.get(i, t).div_floor(w.s.get(t, t));
                w.row_sub(i, t, &q);
                residue |= !w.s.get(i, t).is_zero();
            }
            if residue {
                let i = smallest_in_column(&w.s, t);
                w.swap_rows(t, i);
                continue;
            }
            // clear row t right of the pivot
            for j in t + 1..n {
                if w.s.get(t, j).is_zero() {
                    continue;
                }
                let q = w.s.get(t, j).div_floor(w.s.get(t, t));
                w.col_sub(j, t, &q);
                residue |= !w.s.get(t, j).is_zero();
            }
            if residue {
                let j = smallest_in_row(&w.s, t);
                w.swap_cols(t, j);
                continue;
            }
            // divisibility of the trailing block by the pivot
            let p = w.s.get(t, t).clone();
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !w.s.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => w.row_sub(t, i, &BigInt::from(-1)),
                None => break,
            }
        }
        if w.s.get(t, t).is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    DenseSmith { s: w.s, u: w.u, u_inv: w.u_inv, v: w.v, rank: t }
}

fn smallest_in_column(s: &IntMatrix, t: usize) -> usize {
    (t..s.rows())
        .filter(|&i| !s.get(i, t).is_zero())
        .min_by(|&a, &b| s.get(a, t).abs().cmp(&s.get(b, t).abs()).then(a.cmp(&b)))
        .expect("pivot column has a nonzero entry")
}

fn smallest_in_row(s: &IntMatrix, t: usize) -> usize {
    (t..s.cols())
        .filter(|&j| !s.get(t, j).is_zero())
        .min_by(|&a, &b| s.get(t, a).abs().cmp(&s.get(t, b).abs()).then(a.cmp(&b)))
        .expect("pivot row has a nonzero entry")
}

/// Smith normal form of `A`. Deterministic for a fixed input.
pub fn snf(a: &IntMatrix) -> SmithDecomposition {
    let d = dense_smith(a);
    let invariant_factors = (0..d.rank).map(|i| d.s.get(i, i).clone()).collect();
    SmithDecomposition { s: d.s, u: d.u, v: d.v, invariant_factors }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(a: &IntMatrix) -> Vec<i64> {
        snf(a).invariant_factors.iter().map(|x| x.try_into().unwrap()).collect()
    }

    /// Independent oracle: invariant factors from gcds of k×k minors
    /// (`d₁⋯d_k = gcd of all k-minors`), brute force over small matrices.
    fn factors_by_minors(a: &IntMatrix) -> Vec<i64> {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            if n < k {
                return vec![];
            }
            let mut out = subsets(n - 1, k);
            for mut s in subsets(n - 1, k - 1) {
                s.push(n - 1);
                out.push(s);
            }
            out
        }
        let mut out = Vec::new();
        let mut prev = BigInt::from(1);
        for k in 1..=a.rows().min(a.cols()) {
            let mut g = BigInt::zero();
            for rs in subsets(a.rows(), k) {
                for cs in subsets(a.cols(), k) {
                    let minor = a.select_rows(rs.iter().copied()).select_columns(cs.iter().copied());
                    g = g.gcd(&minor.determinant());
                }
            }
            if g.is_zero() {
                break;
            }
            out.push(i64::try_from(&g / &prev).unwrap());
            prev = g;
        }
        out
    }

    #[test]
    fn snf_examples() {
        assert_eq!(factors(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]])), vec![1, 6]);
        assert!(factors(&IntMatrix::zeros(3, 2)).is_empty());
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]);
        assert_eq!(factors(&a), vec![2, 2]);
        assert_eq!(factors_by_minors(&a), vec![2, 2]);
    }

    #[test]
    fn snf_matches_minor_oracle() {
        let cases = [
            IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]),
            IntMatrix::from_rows(&[vec![6, 4], vec![10, 14], vec![0, 8]]),
            IntMatrix::from_rows(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8]]),
        ];
        for a in &cases {
            let d = snf(a);
            assert_eq!(d.u.mul(a).mul(&d.v), d.s);
            assert_eq!(factors(a), factors_by_minors(a), "{a:?}");
        }
    }

    #[test]
    fn inverse_is_tracked() {
        let a = IntMatrix::from_rows(&[vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5], vec![3, 5, 8]]);
        let d = dense_smith(&a);
        assert!(d.u.mul(&d.u_inv).is_identity());
        assert_eq!(d.u.mul(&a).mul(&d.v), d.s);
    }
}
