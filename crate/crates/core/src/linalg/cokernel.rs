//! Cokernels `ℤᵐ / im A` with explicit coordinate maps.
//!
//! Large inputs go through a sparse phase that eliminates unit pivots with
//! row operations (logged so they can be replayed on arbitrary vectors) and
//! column operations (never needed afterwards, so not tracked). What remains
//! is a small core handed to the dense Smith reduction. Below 64×64 the
//! dense reduction runs on the whole matrix.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::abelian::FiniteAbelianGroup;
use super::matrix::{IntMatrix, SparseMatrix};
use super::smith::dense_smith;

const DENSE_CUTOFF: usize = 64;

/// Logged row operation `y[target] -= q·y[source]`.
#[derive(Clone, Debug)]
struct RowOp {
    target: usize,
    source: usize,
    q: BigInt,
}

/// Quotient `ℤᵐ / im A` as `⊕ ℤ/dᵢ ⊕ ℤ^free` with projection and lift.
///
/// Coordinates are ordered torsion first (in divisibility order), then free.
#[derive(Clone, Debug)]
pub struct Cokernel {
    ambient: usize,
    torsion: FiniteAbelianGroup,
    free_rank: usize,
    ops: Vec<RowOp>,
    core_rows: Vec<usize>,
    core_p: IntMatrix,
    core_p_inv: IntMatrix,
    /// Diagonal of the core reduction (unit factors included).
    core_diag: Vec<BigInt>,
    /// Rows that ended up identically zero outside the core.
    zero_rows: Vec<usize>,
}

impl Cokernel {
    /// Cokernel of the map whose image is spanned by the columns of `image_columns`.
    pub fn from_columns(ambient_rank: usize, image_columns: &IntMatrix) -> Cokernel {
        assert_eq!(image_columns.rows(), ambient_rank, "image columns must have ambient_rank rows");
        if ambient_rank < DENSE_CUTOFF && image_columns.cols() < DENSE_CUTOFF {
            Self::dense(image_columns)
        } else {
            Self::sparse(SparseMatrix::from_dense(image_columns))
        }
    }

    /// Cokernel of a sparse matrix `A` (ambient = rows of `A`).
    pub fn from_sparse(a: SparseMatrix) -> Cokernel {
        if a.rows() < DENSE_CUTOFF && a.cols() < DENSE_CUTOFF {
            Self::dense(&a.to_dense())
        } else {
            Self::sparse(a)
        }
    }

    fn dense(a: &IntMatrix) -> Cokernel {
        let m = a.rows();
        let d = dense_smith(a);
        let core_diag: Vec<BigInt> = (0..d.rank).map(|i| d.s.get(i, i).clone()).collect();
        Self::assemble(m, Vec::new(), (0..m).collect(), d.u, d.u_inv, core_diag, Vec::new())
    }

    fn assemble(
        ambient: usize,
        ops: Vec<RowOp>,
        core_rows: Vec<usize>,
        core_p: IntMatrix,
        core_p_inv: IntMatrix,
        core_diag: Vec<BigInt>,
        zero_rows: Vec<usize>,
    ) -> Cokernel {
        let torsion = FiniteAbelianGroup::from_factors(core_diag.iter().filter(|d| !d.is_one()).cloned().collect())
            .expect("Smith diagonal is a divisibility chain");
        let free_rank = core_rows.len() - core_diag.len() + zero_rows.len();
        Cokernel { ambient, torsion, free_rank, ops, core_rows, core_p, core_p_inv, core_diag, zero_rows }
    }

    fn sparse(a: SparseMatrix) -> Cokernel {
        let (m, k) = (a.rows(), a.cols());
        let mut rows = a.into_rows();
        let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); k];
        for (i, row) in rows.iter().enumerate() {
            for (j, _) in row {
                col_rows[*j].insert(i);
            }
        }
        let mut row_active = vec![true; m];
        let mut col_active = vec![true; k];
        let mut ops = Vec::new();
        let mut pivoted = Vec::new();

        loop {
            let mut progressed = false;
            for j in 0..k {
                if !col_active[j] || col_rows[j].is_empty() {
                    continue;
                }
                // unit entry in column j on the sparsest active row
                let pivot = col_rows[j]
                    .iter()
                    .copied()
                    .filter(|&i| row_active[i])
                    .filter(|&i| entry(&rows[i], j).is_some_and(|v| v.abs().is_one()))
                    .min_by_key(|&i| (rows[i].len(), i));
                let Some(p) = pivot else { continue };
                let unit = entry(&rows[p], j).cloned().expect("pivot entry");
                let pivot_row = rows[p].clone();
                let targets: Vec<usize> = col_rows[j].iter().copied().filter(|&i| i != p).collect();
                for t in targets {
                    let q = entry(&rows[t], j).cloned().expect("column index in sync") * &unit;
                    axpy(&mut rows[t], &pivot_row, &q, t, &mut col_rows);
                    ops.push(RowOp { target: t, source: p, q });
                }
                // column operations reduce the pivot row to ±e_j; other rows are
                // already zero in column j, so nothing else changes
                for (c, _) in &pivot_row {
                    col_rows[*c].remove(&p);
                }
                rows[p].clear();
                row_active[p] = false;
                col_active[j] = false;
                progressed = true;
            }
            if !progressed {
                break;
            }
        }

        // Euclidean elimination down each remaining column, so a tall core
        // collapses to at most one row per column before the Smith step
        for j in 0..k {
            if !col_active[j] {
                continue;
            }
            loop {
                let live: Vec<usize> = col_rows[j].iter().copied().filter(|&i| row_active[i]).collect();
                let Some(&p) = live.iter().min_by_key(|&&i| (entry(&rows[i], j).expect("column index in sync").magnitude().clone(), rows[i].len(), i)) else {
                    break;
                };
                if live.len() == 1 {
                    row_active[p] = false;
                    pivoted.push(p);
                    break;
                }
                let pv = entry(&rows[p], j).cloned().expect("pivot entry");
                let pivot_row = rows[p].clone();
                for t in live.into_iter().filter(|&i| i != p) {
                    let q = entry(&rows[t], j).expect("column index in sync").div_floor(&pv);
                    if q.is_zero() {
                        continue;
                    }
                    axpy(&mut rows[t], &pivot_row, &q, t, &mut col_rows);
                    ops.push(RowOp { target: t, source: p, q });
                }
            }
        }
        for &p in &pivoted {
            row_active[p] = true;
        }

        let mut core_rows = Vec::new();
        let mut zero_rows = Vec::new();
        for i in 0..m {
            if !row_active[i] {
                continue;
            }
            if rows[i].is_empty() {
                zero_rows.push(i);
            } else {
                core_rows.push(i);
            }
        }
        let core_cols: Vec<usize> = (0..k).filter(|&j| col_active[j] && !col_rows[j].is_empty()).collect();
        let mut col_pos = vec![usize::MAX; k];
        for (pos, &j) in core_cols.iter().enumerate() {
            col_pos[j] = pos;
        }
        let mut core = IntMatrix::zeros(core_rows.len(), core_cols.len());
        for (ri, &i) in core_rows.iter().enumerate() {
            for (j, v) in &rows[i] {
                core.set(ri, col_pos[*j], v.clone());
            }
        }
        let d = dense_smith(&core);
        let core_diag: Vec<BigInt> = (0..d.rank).map(|i| d.s.get(i, i).clone()).collect();
        Self::assemble(m, ops, core_rows, d.u, d.u_inv, core_diag, zero_rows)
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    /// Finite part of the quotient.
    pub fn torsion(&self) -> &FiniteAbelianGroup {
        &self.torsion
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    /// Applies the logged row operations and the core transform: returns
    /// `(core image P·y_core, y)`.
    fn forward(&self, x: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
        assert_eq!(x.len(), self.ambient, "vector length must equal ambient rank");
        let mut y = x.to_vec();
        for op in &self.ops {
            if y[op.source].is_zero() {
                continue;
            }
            let delta = &op.q * &y[op.source];
            y[op.target] -= delta;
        }
        let core: Vec<BigInt> = self.core_rows.iter().map(|&i| y[i].clone()).collect();
        (self.core_p.mul_vec(&core), y)
    }

    /// Torsion coordinates (reduced into `[0, dᵢ)`) followed by free coordinates.
    pub fn project(&self, x: &[BigInt]) -> Vec<BigInt> {
        let (pc, y) = self.forward(x);
        let mut out = Vec::with_capacity(self.torsion.rank() + self.free_rank);
        for (t, d) in self.core_diag.iter().enumerate() {
            if !d.is_one() {
                out.push(pc[t].mod_floor(d));
            }
        }
        out.extend(pc[self.core_diag.len()..].iter().cloned());
        out.extend(self.zero_rows.iter().map(|&i| y[i].clone()));
        out
    }

    /// Torsion coordinates only; meaningful for any vector, exact for vectors
    /// in the saturation of the image.
    pub fn project_torsion(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut c = self.project(x);
        c.truncate(self.torsion.rank());
        c
    }

    /// True iff `x` lies in the saturation of the image (all free coordinates vanish).
    pub fn in_saturation(&self, x: &[BigInt]) -> bool {
        self.project(x)[self.torsion.rank()..].iter().all(Zero::is_zero)
    }

    /// A vector whose class has the given coordinates.
    pub fn lift(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.torsion.rank() + self.free_rank, "coordinate length");
        let mut pc = vec![BigInt::zero(); self.core_rows.len()];
        let mut it = coords.iter();
        for (t, d) in self.core_diag.iter().enumerate() {
            if !d.is_one() {
                pc[t] = it.next().expect("torsion coordinate").clone();
            }
        }
        for slot in pc.iter_mut().skip(self.core_diag.len()) {
            *slot = it.next().expect("core free coordinate").clone();
        }
        let core = self.core_p_inv.mul_vec(&pc);
        let mut y = vec![BigInt::zero(); self.ambient];
        for (&i, v) in self.core_rows.iter().zip(core) {
            y[i] = v;
        }
        for &i in &self.zero_rows {
            y[i] = it.next().expect("zero-row free coordinate").clone();
        }
        for op in self.ops.iter().rev() {
            if y[op.source].is_zero() {
                continue;
            }
            let delta = &op.q * &y[op.source];
            y[op.target] += delta;
        }
        y
    }

    /// Lift of the j-th torsion generator.
    pub fn torsion_generator(&self, j: usize) -> Vec<BigInt> {
        let mut coords = vec![BigInt::zero(); self.torsion.rank() + self.free_rank];
        coords[j] = BigInt::one();
        self.lift(&coords)
    }
}

fn entry(row: &[(usize, BigInt)], j: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&j, |(c, _)| *c).ok().map(|pos| &row[pos].1)
}

/// `row -= q·pivot`, keeping the column index in sync.
fn axpy(row: &mut Vec<(usize, BigInt)>, pivot: &[(usize, BigInt)], q: &BigInt, row_id: usize, col_rows: &mut [BTreeSet<usize>]) {
    let old = std::mem::take(row);
    let mut out = Vec::with_capacity(old.len() + pivot.len());
    let (mut a, mut b) = (old.into_iter().peekable(), pivot.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (Some((ja, _)), Some((jb, _))) if ja == jb => {
                let (j, va) = a.next().unwrap();
                let (_, vb) = b.next().unwrap();
                let v = va - q * vb;
                if v.is_zero() {
                    col_rows[j].remove(&row_id);
                } else {
                    out.push((j, v));
                }
            }
            (Some((ja, _)), Some((jb, _))) if ja < jb => out.push(a.next().unwrap()),
            (Some(_), Some(_)) | (None, Some(_)) => {
                let (j, vb) = b.next().unwrap();
                col_rows[*j].insert(row_id);
                out.push((*j, -(q * vb)));
            }
            (Some(_), None) => out.push(a.next().unwrap()),
            (None, None) => break,
        }
    }
    *row = out;
}

/// Finite part, projection and lift of `ℤ^ambient / ⟨image columns⟩`.
pub fn cokernel(ambient_rank: usize, image_columns: &IntMatrix) -> Cokernel {
    Cokernel::from_columns(ambient_rank, image_columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::vec_from_i64;

    fn factors(c: &Cokernel) -> Vec<u64> {
        c.torsion().factors_u64()
    }

    #[test]
    fn examples() {
        let c = cokernel(2, &IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(factors(&c), vec![6]);
        assert_eq!(c.free_rank(), 0);

        let c = cokernel(2, &IntMatrix::from_rows(&[vec![1], vec![0]]));
        assert!(factors(&c).is_empty());
        assert_eq!(c.free_rank(), 1);

        let c = cokernel(1, &IntMatrix::zeros(1, 0));
        assert!(factors(&c).is_empty());
        assert_eq!(c.free_rank(), 1);
    }

    #[test]
    fn project_lift_consistency_dense() {
        let a = IntMatrix::from_rows(&[vec![2, 4, 0], vec![0, 6, 0], vec![0, 0, 0], vec![2, 0, 4]]);
        let c = cokernel(4, &a);
        let n = c.torsion().rank() + c.free_rank();
        for j in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            assert_eq!(c.project(&c.lift(&e)), e);
        }
        for col in a.columns() {
            assert!(c.project(&col).iter().all(Zero::is_zero));
        }
    }

    /// Sparse path against the dense path on a matrix above the cutoff.
    #[test]
    fn sparse_agrees_with_dense() {
        let (m, k) = (90, 70);
        let mut trip = Vec::new();
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 33) as i64
        };
        for i in 0..m {
            for _ in 0..3 {
                let j = (next() as usize) % k;
                let v = [1, -1, 2, 1, -1, 3][(next() as usize) % 6];
                trip.push((i, j, BigInt::from(v)));
            }
        }
        let a = SparseMatrix::from_triplets(m, k, trip);
        let sparse = Cokernel::sparse(a.clone());
        let dense = Cokernel::dense(&a.to_dense());
        assert_eq!(sparse.torsion(), dense.torsion());
        assert_eq!(sparse.free_rank(), dense.free_rank());
        let n = sparse.torsion().rank() + sparse.free_rank();
        for j in 0..n.min(8) {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::from(1);
            assert_eq!(sparse.project(&sparse.lift(&e)), e);
        }
        let dense_a = a.to_dense();
        for col in dense_a.columns() {
            assert!(sparse.project(&col).iter().all(Zero::is_zero));
        }
        let v = vec_from_i64(&(0..m as i64).collect::<Vec<_>>());
        assert_eq!(sparse.in_saturation(&v), dense.in_saturation(&v));
    }
}
