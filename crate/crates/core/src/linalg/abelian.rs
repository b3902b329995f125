use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::cokernel::Cokernel;
use super::hnf::{column_hnf, column_lattice_basis, kernel_basis, solve_integer};
use super::matrix::IntMatrix;
use crate::error::LinalgError;

/// Finite abelian group `ℤ/d₁ ⊕ … ⊕ ℤ/d_k` with `2 ≤ d₁ | d₂ | … | d_k`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn from_factors(factors: Vec<BigInt>) -> Result<Self, LinalgError> {
        for (i, d) in factors.iter().enumerate() {
            if *d < BigInt::from(2) {
                return Err(LinalgError::InvalidInvariantFactors(format!("factor {d} is below 2")));
            }
            if i > 0 && !d.is_multiple_of(&factors[i - 1]) {
                return Err(LinalgError::InvalidInvariantFactors(format!(
                    "{} does not divide {d}",
                    factors[i - 1]
                )));
            }
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn from_u64(factors: &[u64]) -> Result<Self, LinalgError> {
        Self::from_factors(factors.iter().map(|&d| BigInt::from(d)).collect())
    }

    /// Structure of `ℤᵏ / ⟨relation columns⟩`; errors if the quotient is infinite.
    pub fn from_relations(k: usize, relations: &IntMatrix) -> Result<Self, LinalgError> {
        let c = Cokernel::from_columns(k, relations);
        if c.free_rank() > 0 {
            return Err(LinalgError::InfiniteQuotient { free_rank: c.free_rank() });
        }
        Ok(c.torsion().clone())
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn factors_u64(&self) -> Vec<u64> {
        self.factors.iter().map(|d| d.to_u64().expect("invariant factor fits in u64")).collect()
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Reduces a coordinate vector into canonical residues.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.rank());
        x.iter().zip(&self.factors).map(|(a, d)| a.mod_floor(d)).collect()
    }

    pub fn is_zero_element(&self, x: &[BigInt]) -> bool {
        x.iter().zip(&self.factors).all(|(a, d)| a.is_multiple_of(d))
    }

    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.factors)
    }

    /// All elements in lexicographic residue order.
    pub fn elements(&self) -> Vec<Vec<BigInt>> {
        let mut out = vec![Vec::new()];
        for d in &self.factors {
            let d = d.to_u64().expect("enumerable group");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for prefix in &out {
                for r in 0..d {
                    let mut v = prefix.clone();
                    v.push(BigInt::from(r));
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Direct sum, renormalized to invariant factors.
    pub fn direct_sum(&self, other: &FiniteAbelianGroup) -> FiniteAbelianGroup {
        let all: Vec<BigInt> = self.factors.iter().chain(&other.factors).cloned().collect();
        let k = all.len();
        Self::from_relations(k, &IntMatrix::diagonal(&all)).expect("finite")
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Serialize for FiniteAbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let vals: Vec<serde_json::Value> = self
            .factors
            .iter()
            .map(|d| match d.to_u64() {
                Some(x) => serde_json::Value::from(x),
                None => serde_json::Value::from(d.to_string()),
            })
            .collect();
        vals.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteAbelianGroup {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let vals = Vec::<serde_json::Value>::deserialize(d)?;
        let mut factors = Vec::with_capacity(vals.len());
        for v in vals {
            let n = match &v {
                serde_json::Value::Number(n) => n.as_u64().map(BigInt::from),
                serde_json::Value::String(s) => s.parse::<BigInt>().ok(),
                _ => None,
            }
            .ok_or_else(|| D::Error::custom(format!("invalid invariant factor {v}")))?;
            factors.push(n);
        }
        FiniteAbelianGroup::from_factors(factors).map_err(D::Error::custom)
    }
}

/// Subgroup of a finite abelian group, stored as the lattice `L ⊆ ℤᵏ` of
/// coordinate vectors lying in it (so `L ⊇ diag(d)·ℤᵏ`), in Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSubgroup {
    ambient: FiniteAbelianGroup,
    basis: IntMatrix,
}

impl AbelianSubgroup {
    pub fn generated_by(ambient: &FiniteAbelianGroup, generators: &[Vec<BigInt>]) -> Self {
        let k = ambient.rank();
        let gens = IntMatrix::from_columns(k, generators);
        let basis = column_lattice_basis(&gens.hstack(&ambient.relation_matrix()));
        debug_assert_eq!(basis.cols(), k);
        AbelianSubgroup { ambient: ambient.clone(), basis }
    }

    pub fn trivial(ambient: &FiniteAbelianGroup) -> Self {
        Self::generated_by(ambient, &[])
    }

    pub fn whole(ambient: &FiniteAbelianGroup) -> Self {
        Self::generated_by(ambient, &IntMatrix::identity(ambient.rank()).columns())
    }

    pub fn ambient(&self) -> &FiniteAbelianGroup {
        &self.ambient
    }

    pub fn lattice_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        solve_integer(&self.basis, x).is_some()
    }

    pub fn order(&self) -> BigInt {
        let det: BigInt = (0..self.basis.cols()).map(|i| self.basis.get(i, i).clone()).product();
        self.ambient.order() / det.abs()
    }

    pub fn is_trivial(&self) -> bool {
        self.order().is_one()
    }

    pub fn structure(&self) -> FiniteAbelianGroup {
        let k = self.ambient.rank();
        let rel = self.ambient.relation_matrix();
        let coeffs: Vec<Vec<BigInt>> = rel
            .columns()
            .iter()
            .map(|c| solve_integer(&self.basis, c).expect("relations lie in the subgroup lattice"))
            .collect();
        FiniteAbelianGroup::from_relations(k, &IntMatrix::from_columns(k, &coeffs)).expect("finite subgroup")
    }

    /// Nonzero generators, reduced into residues.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        self.basis
            .columns()
            .iter()
            .map(|c| self.ambient.reduce(c))
            .filter(|c| !self.ambient.is_zero_element(c))
            .collect()
    }

    pub fn is_subgroup_of(&self, other: &AbelianSubgroup) -> bool {
        self.basis.columns().iter().all(|c| other.contains(c))
    }

    pub fn intersect(&self, other: &AbelianSubgroup) -> AbelianSubgroup {
        assert_eq!(self.ambient, other.ambient);
        // x = B₁y = B₂z  ⇔  [B₁ | −B₂]·(y; z) = 0
        let k = self.ambient.rank();
        let stacked = self.basis.hstack(&other.basis.neg());
        let ker = kernel_basis(&stacked);
        let gens: Vec<Vec<BigInt>> = ker
            .columns()
            .iter()
            .map(|w| self.basis.mul_vec(&w[..k]))
            .collect();
        AbelianSubgroup::generated_by(&self.ambient, &gens)
    }

    pub fn join(&self, other: &AbelianSubgroup) -> AbelianSubgroup {
        let mut gens = self.basis.columns();
        gens.extend(other.basis.columns());
        AbelianSubgroup::generated_by(&self.ambient, &gens)
    }
}

/// Homomorphism between finite abelian groups in invariant-factor coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianHom {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    /// `target.rank() × source.rank()`
    pub matrix: IntMatrix,
}

impl AbelianHom {
    pub fn new(source: FiniteAbelianGroup, target: FiniteAbelianGroup, matrix: IntMatrix) -> Result<Self, LinalgError> {
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(LinalgError::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let hom = AbelianHom { source, target, matrix };
        if !hom.is_well_defined() {
            return Err(LinalgError::NotWellDefined);
        }
        Ok(hom)
    }

    /// dⱼ·eⱼ must map to zero.
    pub fn is_well_defined(&self) -> bool {
        self.source.factors().iter().enumerate().all(|(j, d)| {
            let img: Vec<BigInt> = self.matrix.column(j).iter().map(|x| x * d).collect();
            self.target.is_zero_element(&img)
        })
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.target.reduce(&self.matrix.mul_vec(x))
    }

    /// Kernel, by stacking the map with the target relations.
    pub fn kernel(&self) -> AbelianSubgroup {
        let s = self.source.rank();
        let stacked = self.matrix.hstack(&self.target.relation_matrix());
        let ker = kernel_basis(&stacked);
        let gens: Vec<Vec<BigInt>> = ker.columns().into_iter().map(|w| w[..s].to_vec()).collect();
        AbelianSubgroup::generated_by(&self.source, &gens)
    }

    pub fn image(&self) -> AbelianSubgroup {
        AbelianSubgroup::generated_by(&self.target, &self.matrix.columns())
    }

    /// `{x : f(x) ∈ K}`.
    pub fn preimage(&self, k: &AbelianSubgroup) -> AbelianSubgroup {
        assert_eq!(k.ambient(), &self.target);
        let s = self.source.rank();
        let stacked = self.matrix.hstack(&k.lattice_basis().neg());
        let ker = kernel_basis(&stacked);
        let gens: Vec<Vec<BigInt>> = ker.columns().into_iter().map(|w| w[..s].to_vec()).collect();
        AbelianSubgroup::generated_by(&self.source, &gens)
    }

    /// Product map into the direct sum of the targets (coordinates concatenated).
    pub fn stack(source: &FiniteAbelianGroup, maps: &[AbelianHom]) -> AbelianHom {
        let mut target_factors = Vec::new();
        let mut matrix = IntMatrix::zeros(0, source.rank());
        for m in maps {
            assert_eq!(&m.source, source);
            target_factors.extend(m.target.factors().iter().cloned());
            matrix = matrix.vstack(&m.matrix);
        }
        // the concatenated target is a direct sum, not necessarily in divisibility order
        AbelianHom { source: source.clone(), target: FiniteAbelianGroup { factors: target_factors }, matrix }
    }
}

/// Rank of the column lattice of a matrix.
pub fn lattice_rank(a: &IntMatrix) -> usize {
    column_hnf(a).rank
}
