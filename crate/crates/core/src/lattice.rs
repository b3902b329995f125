//! Integral G-lattices and the norm-torus constructions built from them.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{coset_space, CosetSpace, FiniteGroup, Subgroup};
use crate::linalg::smith::dense_smith;
use crate::linalg::{column_lattice_basis, kernel_basis, solve_integer, IntMatrix};

/// A free ℤ-module of rank `r` with `G` acting by unimodular matrices, one per element.
#[derive(Clone, Debug)]
pub struct GLattice {
    group: Arc<FiniteGroup>,
    action: Vec<IntMatrix>,
    rank: usize,
}

impl GLattice {
    /// Checks `ρ(e) = I` and `ρ(x)ρ(s) = ρ(xs)` for all `x` and generators `s`,
    /// which forces `ρ` to be a homomorphism.
    pub fn new(group: Arc<FiniteGroup>, rank: usize, action: Vec<IntMatrix>) -> Result<GLattice> {
        if action.len() != group.order() || action.iter().any(|a| a.rows() != rank || a.cols() != rank) {
            return Err(Error::Parse("action needs one rank × rank matrix per group element".into()));
        }
        let m = GLattice { group, action, rank };
        if !m.action[0].is_identity() {
            return Err(Error::Parse("identity must act trivially".into()));
        }
        for s in m.group.generators() {
            for x in 0..m.group.order() {
                if m.action[x].mul(&m.action[s]) != m.action[m.group.mul(x, s)] {
                    return Err(Error::Parse("action is not a homomorphism".into()));
                }
            }
        }
        Ok(m)
    }

    pub(crate) fn new_unchecked(group: Arc<FiniteGroup>, rank: usize, action: Vec<IntMatrix>) -> GLattice {
        debug_assert_eq!(action.len(), group.order());
        GLattice { group, action, rank }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn action(&self, g: usize) -> &IntMatrix {
        &self.action[g]
    }

    /// Exhaustive homomorphism and unimodularity check over all pairs.
    pub fn verify_action(&self) -> bool {
        let g = &self.group;
        self.action[0].is_identity()
            && self.action.iter().all(IntMatrix::is_unimodular)
            && (0..g.order()).all(|a| (0..g.order()).all(|b| self.action[a].mul(&self.action[b]) == self.action[g.mul(a, b)]))
    }

    /// Rank-`r` dump with one action matrix per element, in element order.
    pub fn to_json(&self) -> serde_json::Value {
        let mats: Vec<serde_json::Value> = self
            .action
            .iter()
            .map(|a| match a.to_i64_rows() {
                Some(rows) => json!(rows),
                None => json!((0..a.rows())
                    .map(|i| a.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>()),
            })
            .collect();
        json!({ "rank": self.rank, "group_order": self.group.order(), "action": mats })
    }
}

/// An equivariant map, `target.rank × source.rank`.
#[derive(Clone, Debug)]
pub struct LatticeMap {
    pub source: GLattice,
    pub target: GLattice,
    pub matrix: IntMatrix,
}

impl LatticeMap {
    pub fn new(source: GLattice, target: GLattice, matrix: IntMatrix) -> Result<LatticeMap> {
        if !Arc::ptr_eq(&source.group, &target.group) && *source.group != *target.group {
            return Err(Error::GroupMismatch);
        }
        if matrix.rows() != target.rank || matrix.cols() != source.rank {
            return Err(Error::Parse("lattice map has the wrong shape".into()));
        }
        let f = LatticeMap { source, target, matrix };
        if !f.is_equivariant() {
            return Err(Error::Parse("lattice map is not equivariant".into()));
        }
        Ok(f)
    }

    pub fn is_equivariant(&self) -> bool {
        (0..self.source.group.order())
            .all(|g| self.target.action(g).mul(&self.matrix) == self.matrix.mul(self.source.action(g)))
    }

    pub fn identity(m: &GLattice) -> LatticeMap {
        LatticeMap { source: m.clone(), target: m.clone(), matrix: IntMatrix::identity(m.rank) }
    }
}

pub fn trivial_lattice(group: &Arc<FiniteGroup>, rank: usize) -> GLattice {
    GLattice::new_unchecked(group.clone(), rank, vec![IntMatrix::identity(rank); group.order()])
}

/// `ℤ[G/H]` with the permutation action on cosets.
pub fn permutation_lattice(cs: &CosetSpace) -> GLattice {
    let k = cs.len();
    let g = cs.parent();
    let action = (0..g.order())
        .map(|x| {
            let mut m = IntMatrix::zeros(k, k);
            for c in 0..k {
                m.set(cs.act(x, c), c, BigInt::one());
            }
            m
        })
        .collect();
    GLattice::new_unchecked(g.clone(), k, action)
}

pub fn direct_sum(group: &Arc<FiniteGroup>, summands: &[GLattice]) -> Result<GLattice> {
    if summands.iter().any(|m| !Arc::ptr_eq(&m.group, group) && *m.group != **group) {
        return Err(Error::GroupMismatch);
    }
    let rank = summands.iter().map(|m| m.rank).sum();
    let action = (0..group.order())
        .map(|g| IntMatrix::block_diag(&summands.iter().map(|m| &m.action[g]).collect::<Vec<_>>()))
        .collect();
    Ok(GLattice::new_unchecked(group.clone(), rank, action))
}

/// Saturated basis of `M^G`, from the kernel of the stacked `ρ(s) − I` over generators.
pub fn fixed_sublattice(m: &GLattice) -> IntMatrix {
    let id = IntMatrix::identity(m.rank);
    let stacked = m
        .group
        .generators()
        .iter()
        .fold(IntMatrix::zeros(0, m.rank), |acc, &s| acc.vstack(&m.action[s].sub(&id)));
    kernel_basis(&stacked)
}

/// `M / N` for a `G`-stable saturated `N`, with projection and a ℤ-linear section.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub lattice: GLattice,
    /// `quotient.rank × M.rank`
    pub projection: IntMatrix,
    /// `M.rank × quotient.rank`, with `projection · section = I`
    pub section: IntMatrix,
}

pub fn quotient_lattice(m: &GLattice, sub_basis: &IntMatrix) -> Result<Quotient> {
    if sub_basis.rows() != m.rank {
        return Err(Error::Parse("sublattice basis has the wrong number of rows".into()));
    }
    let s = column_lattice_basis(sub_basis);
    for g in m.group.generators() {
        for col in m.action[g].mul(&s).columns() {
            if solve_integer(&s, &col).is_none() {
                return Err(Error::NotStable);
            }
        }
    }
    // U·S·W = [I; 0] exactly when the quotient is free
    let d = dense_smith(&s);
    let k = s.cols();
    for i in 0..k {
        if !d.s.get(i, i).is_one() {
            return Err(Error::QuotientNotFree(d.s.get(i, i).to_string()));
        }
    }
    let r = m.rank;
    let projection = d.u.select_rows(k..r);
    let section = d.u_inv.select_columns(k..r);
    let action = m
        .action
        .iter()
        .map(|a| projection.mul(a).mul(&section))
        .collect();
    let lattice = GLattice::new_unchecked(m.group.clone(), r - k, action);
    Ok(Quotient { lattice, projection, section })
}

/// `ℤ[S] / ⟨d⟩`, the character lattice of a norm-one torus.
pub fn norm_one_lattice(stabilizer: &Subgroup) -> Result<Quotient> {
    let p = permutation_lattice(&coset_space(stabilizer));
    let ones = IntMatrix::from_columns(p.rank, &[vec![BigInt::one(); p.rank]]);
    quotient_lattice(&p, &ones)
}

/// `Λ¹ = ⊕ ℤ[Sᵢ]/⟨dᵢ⟩` with its summands and the projection from `⊕ ℤ[Sᵢ]`.
#[derive(Clone, Debug)]
pub struct HnpLattice {
    pub lattice: GLattice,
    pub summands: Vec<GLattice>,
    pub projection: IntMatrix,
}

pub fn hnp_lattice(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup]) -> Result<HnpLattice> {
    if stabilizers.is_empty() {
        return Err(Error::Parse("at least one stabilizer is needed".into()));
    }
    let quotients = stabilizers.iter().map(norm_one_lattice).collect::<Result<Vec<_>>>()?;
    let summands: Vec<GLattice> = quotients.iter().map(|q| q.lattice.clone()).collect();
    let lattice = direct_sum(group, &summands)?;
    let projection = IntMatrix::block_diag(&quotients.iter().map(|q| &q.projection).collect::<Vec<_>>());
    Ok(HnpLattice { lattice, summands, projection })
}

/// `Λ = (⊕ ℤ[Sᵢ]) / ⟨d₁ − dᵢ⟩` together with `0 → ℤ → Λ → Λ¹ → 0`.
#[derive(Clone, Debug)]
pub struct PhnpLattice {
    pub lattice: GLattice,
    pub incl: LatticeMap,
    pub proj: LatticeMap,
    pub hnp: HnpLattice,
    pub permutation: GLattice,
}

pub fn phnp_lattice(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup]) -> Result<PhnpLattice> {
    let hnp = hnp_lattice(group, stabilizers)?;
    let perms: Vec<GLattice> = stabilizers.iter().map(|h| permutation_lattice(&coset_space(h))).collect();
    let p = direct_sum(group, &perms)?;
    let offsets: Vec<usize> = perms
        .iter()
        .scan(0, |acc, m| {
            let o = *acc;
            *acc += m.rank;
            Some(o)
        })
        .collect();
    let norm = |i: usize| -> Vec<BigInt> {
        let mut v = vec![BigInt::zero(); p.rank];
        for x in &mut v[offsets[i]..offsets[i] + perms[i].rank] {
            *x = BigInt::one();
        }
        v
    };
    let d1 = norm(0);
    let diffs: Vec<Vec<BigInt>> = (1..perms.len())
        .map(|i| d1.iter().zip(norm(i)).map(|(a, b)| a - b).collect())
        .collect();
    let q = quotient_lattice(&p, &IntMatrix::from_columns(p.rank, &diffs))?;

    let z = trivial_lattice(group, 1);
    let incl_m = IntMatrix::from_columns(q.lattice.rank, &[q.projection.mul_vec(&d1)]);
    let proj_m = hnp.projection.mul(&q.section);
    let incl = LatticeMap::new(z, q.lattice.clone(), incl_m)?;
    let proj = LatticeMap::new(q.lattice.clone(), hnp.lattice.clone(), proj_m)?;
    let out = PhnpLattice { lattice: q.lattice, incl, proj, hnp, permutation: p };
    out.check_exact()?;
    Ok(out)
}

impl PhnpLattice {
    /// `incl` injective, `proj ∘ incl = 0`, `ker proj = im incl`, `proj` onto.
    pub fn check_exact(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Parse(format!("sequence is not exact: {what}")));
        if self.incl.matrix.is_zero() {
            return fail("inclusion is zero");
        }
        if !self.proj.matrix.mul(&self.incl.matrix).is_zero() {
            return fail("proj ∘ incl ≠ 0");
        }
        let ker = kernel_basis(&self.proj.matrix);
        if ker.cols() != 1 || solve_integer(&self.incl.matrix, &ker.column(0)).is_none() {
            return fail("kernel of proj differs from the image of incl");
        }
        // surjectivity: the image lattice is all of ℤ^rank
        let img = column_lattice_basis(&self.proj.matrix);
        let full = img.cols() == self.hnp.lattice.rank
            && (0..img.cols()).all(|i| img.get(i, i).is_one());
        if !full {
            return fail("proj is not onto");
        }
        Ok(())
    }
}

/// `M` viewed as a lattice over `D`; element `i` of the new group is `D.members()[i]`.
pub fn restrict_lattice(m: &GLattice, d: &Subgroup) -> GLattice {
    let inner = Arc::new(d.to_group());
    restrict_lattice_to(m, d, &inner)
}

pub(crate) fn restrict_lattice_to(m: &GLattice, d: &Subgroup, inner: &Arc<FiniteGroup>) -> GLattice {
    let action = d.members().iter().map(|&g| m.action[g].clone()).collect();
    GLattice::new_unchecked(inner.clone(), m.rank, action)
}

/// Largest absolute entry over all action matrices, as a size diagnostic.
pub fn max_action_entry(m: &GLattice) -> i64 {
    m.action.iter().map(|a| a.max_abs_entry().to_i64().unwrap_or(i64::MAX)).max().unwrap_or(0)
}
