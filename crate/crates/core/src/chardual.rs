//! Characters `G → ℚ/ℤ` in abelianization coordinates, and the character-side
//! criteria: `Ker e`, `H²(ℤ)′`, the `Ш²` order formula and the derived-subgroup test.

use std::collections::{HashMap, VecDeque};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::cohomology::{character_cocycle, cohomology, induced_map, sha, Limits};
use crate::error::{Error, Result};
use crate::group::{derived_subgroup, intersect_all, FiniteGroup, Subgroup};
use crate::lattice::{norm_one_lattice, phnp_lattice, trivial_lattice};
use crate::linalg::{AbelianHom, AbelianSubgroup, Cokernel, FiniteAbelianGroup, IntMatrix};

/// Above this `|G^ab|`, `H²(ℤ)′` is computed by intersecting preimages instead of enumerating.
pub const ENUMERATION_LIMIT: u64 = 4096;

/// `G / G^der` with an explicit projection.
#[derive(Clone, Debug)]
pub struct Abelianization {
    group: Arc<FiniteGroup>,
    derived: Subgroup,
    factors: FiniteAbelianGroup,
    coset_of: Vec<usize>,
    coset_coords: Vec<Vec<BigInt>>,
    unit_preimages: Vec<usize>,
}

impl Abelianization {
    pub fn new(group: &Arc<FiniteGroup>) -> Abelianization {
        let g = group.as_ref();
        let derived = derived_subgroup(group);

        // cosets of the derived subgroup; the identity's coset is 0
        let mut coset_of = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for x in 0..g.order() {
            if coset_of[x] == usize::MAX {
                for &d in derived.members() {
                    coset_of[g.mul(x, d)] = reps.len();
                }
                reps.push(x);
            }
        }

        // Schreier graph of the quotient: each coset gets a word in the generators,
        // and every edge q → q·gⱼ gives a relation w(q) + eⱼ − w(q·gⱼ)
        let gens = g.generators();
        let s = gens.len();
        let mut words: Vec<Option<Vec<BigInt>>> = vec![None; reps.len()];
        words[0] = Some(vec![BigInt::zero(); s]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            for (j, &x) in gens.iter().enumerate() {
                let t = coset_of[g.mul(reps[q], x)];
                if words[t].is_none() {
                    let mut w = words[q].clone().expect("visited");
                    w[j] += 1;
                    words[t] = Some(w);
                    queue.push_back(t);
                }
            }
        }
        let words: Vec<Vec<BigInt>> = words.into_iter().map(|w| w.expect("generators reach every coset")).collect();
        let mut relations = Vec::with_capacity(reps.len() * s);
        for q in 0..reps.len() {
            for (j, &x) in gens.iter().enumerate() {
                let t = coset_of[g.mul(reps[q], x)];
                let mut r: Vec<BigInt> = words[q].iter().zip(&words[t]).map(|(a, b)| a - b).collect();
                r[j] += 1;
                if r.iter().any(|v| !v.is_zero()) {
                    relations.push(r);
                }
            }
        }
        let coker = Cokernel::from_columns(s, &IntMatrix::from_columns(s, &relations));
        debug_assert_eq!(coker.free_rank(), 0);
        let factors = coker.torsion().clone();
        let coset_coords: Vec<Vec<BigInt>> = words.iter().map(|w| coker.project_torsion(w)).collect();

        let unit_preimages = (0..factors.rank())
            .map(|j| {
                let v = coker.torsion_generator(j);
                gens.iter().zip(&v).fold(g.identity(), |acc, (&x, k)| {
                    let ord = BigInt::from(g.element_order(x));
                    let e = k.mod_floor(&ord).to_usize().expect("small exponent");
                    g.mul(acc, g.pow(x, e))
                })
            })
            .collect();

        Abelianization { group: group.clone(), derived, factors, coset_of, coset_coords, unit_preimages }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn derived(&self) -> &Subgroup {
        &self.derived
    }

    /// Invariant factors of `G^ab`; also those of the dual `G^∨`.
    pub fn factors(&self) -> &FiniteAbelianGroup {
        &self.factors
    }

    pub fn order(&self) -> BigInt {
        self.factors.order()
    }

    pub fn project(&self, g: usize) -> &[BigInt] {
        &self.coset_coords[self.coset_of[g]]
    }

    /// An element projecting to the j-th unit vector.
    pub fn unit_preimage(&self, j: usize) -> usize {
        self.unit_preimages[j]
    }

    /// Common denominator of character values.
    pub fn exponent(&self) -> BigInt {
        self.factors.exponent()
    }

    /// Numerator `a` of `χ(g) = a / exponent`, with `0 ≤ a < exponent`.
    pub fn evaluate(&self, chi: &Character, g: usize) -> BigInt {
        let e = self.exponent();
        let p = self.project(g);
        let total: BigInt = chi
            .residues
            .iter()
            .zip(p)
            .zip(self.factors.factors())
            .map(|((r, x), d)| r * x * (&e / d))
            .sum();
        total.mod_floor(&e)
    }

    /// Values of `χ` on every element, as numerators over [`exponent`](Self::exponent).
    pub fn value_table(&self, chi: &Character) -> Vec<BigInt> {
        (0..self.group.order()).map(|g| self.evaluate(chi, g)).collect()
    }

    /// All `|G^ab|` characters.
    pub fn dual_group(&self) -> Vec<Character> {
        self.factors.elements().into_iter().map(|residues| Character { residues }).collect()
    }

    /// Restriction `G^∨ → D^∨` for a subgroup `D`.
    pub fn restriction_to(&self, d: &Subgroup) -> Restriction {
        let inner = Arc::new(d.to_group());
        let ab = Abelianization::new(&inner);
        // χ(xⱼ)·d′ⱼ with xⱼ the preimage of D's j-th unit; integral because d′ⱼxⱼ ∈ G^der
        let rows: Vec<Vec<BigInt>> = (0..ab.factors.rank())
            .map(|j| {
                let x = d.members()[ab.unit_preimage(j)];
                let dj = &ab.factors.factors()[j];
                self.project(x)
                    .iter()
                    .zip(self.factors.factors())
                    .map(|(p, di)| {
                        let v = p * dj;
                        debug_assert!((&v % di).is_zero());
                        v / di
                    })
                    .collect()
            })
            .collect();
        let matrix = IntMatrix::new(rows.len(), self.factors.rank(), rows.concat());
        let hom = AbelianHom::new(self.factors.clone(), ab.factors.clone(), matrix).expect("restriction is well defined");
        Restriction { subgroup: d.clone(), inner, ab, hom }
    }

    /// Characters vanishing on `H`.
    pub fn vanishing_on(&self, h: &Subgroup) -> CharacterSubgroup {
        let k = self.factors.rank();
        if k == 0 {
            return CharacterSubgroup::trivial(&self.factors);
        }
        let e = self.exponent();
        let gens = h.generators();
        if gens.is_empty() {
            return CharacterSubgroup::whole(&self.factors);
        }
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|&x| self.project(x).iter().zip(self.factors.factors()).map(|(p, d)| p * (&e / d)).collect())
            .collect();
        let target = FiniteAbelianGroup::from_factors(vec![e; gens.len()]).expect("constant chain");
        let hom = AbelianHom::new(self.factors.clone(), target, IntMatrix::new(rows.len(), k, rows.concat())).expect("evaluation is well defined");
        CharacterSubgroup { inner: hom.kernel() }
    }
}

/// Restriction of characters from `G` to a subgroup `D`, with `D`'s own abelianization.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub subgroup: Subgroup,
    /// `D` as a group in its own right; element `i` is `subgroup.members()[i]`.
    pub inner: Arc<FiniteGroup>,
    pub ab: Abelianization,
    pub hom: AbelianHom,
}

impl Restriction {
    pub fn apply(&self, chi: &Character) -> Character {
        Character { residues: self.hom.apply(&chi.residues) }
    }
}

/// A homomorphism `G → ℚ/ℤ`, `g ↦ Σ rᵢ·pᵢ(g)/dᵢ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Character {
    pub residues: Vec<BigInt>,
}

impl Character {
    pub fn trivial(k: usize) -> Character {
        Character { residues: vec![BigInt::zero(); k] }
    }

    pub fn is_trivial(&self) -> bool {
        self.residues.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Character, dual: &FiniteAbelianGroup) -> Character {
        let sum: Vec<BigInt> = self.residues.iter().zip(&other.residues).map(|(a, b)| a + b).collect();
        Character { residues: dual.reduce(&sum) }
    }
}

/// A subgroup of `G^∨`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSubgroup {
    inner: AbelianSubgroup,
}

impl CharacterSubgroup {
    pub fn trivial(dual: &FiniteAbelianGroup) -> Self {
        CharacterSubgroup { inner: AbelianSubgroup::trivial(dual) }
    }

    pub fn whole(dual: &FiniteAbelianGroup) -> Self {
        CharacterSubgroup { inner: AbelianSubgroup::whole(dual) }
    }

    pub fn generated_by(dual: &FiniteAbelianGroup, chars: &[Character]) -> Self {
        let gens: Vec<Vec<BigInt>> = chars.iter().map(|c| c.residues.clone()).collect();
        CharacterSubgroup { inner: AbelianSubgroup::generated_by(dual, &gens) }
    }

    pub fn dual(&self) -> &FiniteAbelianGroup {
        self.inner.ambient()
    }

    pub fn as_abelian(&self) -> &AbelianSubgroup {
        &self.inner
    }

    pub fn order(&self) -> BigInt {
        self.inner.order()
    }

    pub fn is_trivial(&self) -> bool {
        self.inner.is_trivial()
    }

    pub fn structure(&self) -> FiniteAbelianGroup {
        self.inner.structure()
    }

    pub fn generators(&self) -> Vec<Character> {
        self.inner.generators().into_iter().map(|residues| Character { residues }).collect()
    }

    pub fn contains(&self, chi: &Character) -> bool {
        self.inner.contains(&chi.residues)
    }

    pub fn is_subgroup_of(&self, other: &CharacterSubgroup) -> bool {
        self.inner.is_subgroup_of(&other.inner)
    }

    pub fn join(&self, other: &CharacterSubgroup) -> CharacterSubgroup {
        CharacterSubgroup { inner: self.inner.join(&other.inner) }
    }

    pub fn intersect(&self, other: &CharacterSubgroup) -> CharacterSubgroup {
        CharacterSubgroup { inner: self.inner.intersect(&other.inner) }
    }

    /// Every pairwise sum of generators is a member.
    pub fn is_closed(&self) -> bool {
        let gens = self.generators();
        gens.iter().all(|a| gens.iter().all(|b| self.contains(&a.add(b, self.dual()))))
    }
}

/// `Ker e`, spanned by the characters vanishing on some stabilizer.
pub fn ker_e_with(ab: &Abelianization, stabilizers: &[Subgroup]) -> CharacterSubgroup {
    stabilizers
        .iter()
        .fold(CharacterSubgroup::trivial(ab.factors()), |acc, h| acc.join(&ab.vanishing_on(h)))
}

pub fn ker_e(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup]) -> CharacterSubgroup {
    ker_e_with(&Abelianization::new(group), stabilizers)
}

/// `Ker e_D ⊆ D^∨` for the stabilizers `D ∩ G⁽ⁱ⁾`, with `D`'s restriction data.
pub fn ker_e_for_subgroup_with(res: &Restriction, stabilizers: &[Subgroup]) -> CharacterSubgroup {
    let local: Vec<Subgroup> = stabilizers.iter().map(|h| res.subgroup.restrict_into(h, &res.inner)).collect();
    ker_e_with(&res.ab, &local)
}

pub fn ker_e_for_subgroup(d: &Subgroup, stabilizers: &[Subgroup]) -> CharacterSubgroup {
    let inner = Arc::new(d.to_group());
    let ab = Abelianization::new(&inner);
    let local: Vec<Subgroup> = stabilizers.iter().map(|h| d.restrict_into(h, &inner)).collect();
    ker_e_with(&ab, &local)
}

/// How `H²(ℤ)′` is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum H2zMethod {
    /// Enumeration below [`ENUMERATION_LIMIT`], preimages above.
    Auto,
    Enumerate,
    Preimages,
}

/// `H²(ℤ)′ = {f : f|_D ∈ Ker e_D for every D in the family}`.
pub fn h2z_prime_with(ab: &Abelianization, stabilizers: &[Subgroup], family: &[Subgroup], method: H2zMethod) -> Result<CharacterSubgroup> {
    if family.is_empty() {
        return Err(Error::Parse("the decomposition family is empty".into()));
    }
    let local: Vec<(Restriction, CharacterSubgroup)> = family
        .iter()
        .map(|d| {
            let res = ab.restriction_to(d);
            let k = ker_e_for_subgroup_with(&res, stabilizers);
            (res, k)
        })
        .collect();
    let enumerate = match method {
        H2zMethod::Enumerate => true,
        H2zMethod::Preimages => false,
        H2zMethod::Auto => ab.order() <= BigInt::from(ENUMERATION_LIMIT),
    };
    if enumerate {
        let members: Vec<Character> = ab
            .dual_group()
            .into_iter()
            .filter(|chi| local.iter().all(|(res, k)| k.contains(&res.apply(chi))))
            .collect();
        Ok(CharacterSubgroup::generated_by(ab.factors(), &members))
    } else {
        Ok(local.iter().fold(CharacterSubgroup::whole(ab.factors()), |acc, (res, k)| {
            acc.intersect(&CharacterSubgroup { inner: res.hom.preimage(k.as_abelian()) })
        }))
    }
}

pub fn h2z_prime(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup], family: &[Subgroup]) -> Result<CharacterSubgroup> {
    h2z_prime_with(&Abelianization::new(group), stabilizers, family, H2zMethod::Auto)
}

/// Character-side counts; `sha_order = |H²(ℤ)′| / |Ker e|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriteriaCounts {
    pub ker_e: CharacterSubgroupSummary,
    pub h2z_prime: CharacterSubgroupSummary,
    pub sha_order: BigInt,
}

/// Order and structure of a character subgroup, for reports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterSubgroupSummary {
    pub order: BigInt,
    pub structure: FiniteAbelianGroup,
}

impl From<&CharacterSubgroup> for CharacterSubgroupSummary {
    fn from(c: &CharacterSubgroup) -> Self {
        CharacterSubgroupSummary { order: c.order(), structure: c.structure() }
    }
}

pub fn criteria_counts(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup], family: &[Subgroup]) -> Result<CriteriaCounts> {
    let ab = Abelianization::new(group);
    let k = ker_e_with(&ab, stabilizers);
    let h = h2z_prime_with(&ab, stabilizers, family, H2zMethod::Auto)?;
    let (ko, ho) = (k.order(), h.order());
    if !(&ho % &ko).is_zero() || !k.is_subgroup_of(&h) {
        return Err(Error::IndivisibleCounts { ker_e: ko.to_string(), h2z_prime: ho.to_string() });
    }
    Ok(CriteriaCounts { sha_order: &ho / &ko, ker_e: (&k).into(), h2z_prime: (&h).into() })
}

/// `Ш²(Λ¹ᵢ)` for each stabilizer, via the cohomology engine.
pub fn hnp_obstructions(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup], family: &[Subgroup], limits: Limits) -> Result<Vec<FiniteAbelianGroup>> {
    stabilizers.iter().map(|h| hnp_obstruction(group, h, family, limits)).collect()
}

fn hnp_obstruction(group: &Arc<FiniteGroup>, h: &Subgroup, family: &[Subgroup], limits: Limits) -> Result<FiniteAbelianGroup> {
    let lat = norm_one_lattice(h)?.lattice;
    debug_assert!(Arc::ptr_eq(lat.group(), group) || lat.group().as_ref() == group.as_ref());
    sha(&lat, family, limits)
}

/// `Ш²(Λ¹_H)` per stabilizer, remembered across calls.
///
/// Valid for one group and one family; scans keep one per group, since the
/// gate for a pair only depends on its two members.
#[derive(Debug, Default)]
pub struct ObstructionMemo {
    map: Mutex<HashMap<Vec<usize>, FiniteAbelianGroup>>,
}

impl ObstructionMemo {
    pub fn new() -> ObstructionMemo {
        ObstructionMemo::default()
    }

    pub fn obstructions(&self, group: &Arc<FiniteGroup>, stabilizers: &[Subgroup], family: &[Subgroup], limits: Limits) -> Result<Vec<FiniteAbelianGroup>> {
        stabilizers
            .iter()
            .map(|h| {
                let key = h.members().to_vec();
                if let Some(v) = self.map.lock().expect("memo lock").get(&key) {
                    return Ok(v.clone());
                }
                // computed outside the lock; a racing duplicate is harmless
                let v = hnp_obstruction(group, h, family, limits)?;
                self.map.lock().expect("memo lock").insert(key, v.clone());
                Ok(v)
            })
            .collect()
    }
}

/// Result of the order formula; `order` is `|Ш²(Λ)|` only when `hnp_gate` holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShaByCriteria {
    pub counts: CriteriaCounts,
    pub order: BigInt,
    pub hnp_gate: bool,
    pub hnp_obstructions: Vec<FiniteAbelianGroup>,
}

pub fn sha2_order_by_criteria(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup], family: &[Subgroup]) -> Result<ShaByCriteria> {
    let counts = criteria_counts(group, stabilizers, family)?;
    let obstructions = hnp_obstructions(group, stabilizers, family, Limits::unbounded())?;
    Ok(ShaByCriteria {
        order: counts.sha_order.clone(),
        hnp_gate: obstructions.iter().all(FiniteAbelianGroup::is_trivial),
        hnp_obstructions: obstructions,
        counts,
    })
}

/// `⋂ᵢ G^der·G⁽ⁱ⁾ = G^der`, for normal stabilizers.
pub fn derived_criterion(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup]) -> Result<bool> {
    if let Some(i) = stabilizers.iter().position(|h| !h.is_normal()) {
        return Err(Error::NotNormal(i));
    }
    let der = derived_subgroup(group);
    let products = stabilizers
        .iter()
        .map(|h| der.product_set(h))
        .collect::<Result<Vec<_>>>()?;
    Ok(intersect_all(group, &products) == der)
}

/// `Ker(H²(G, ℤ) → H²(G, Λ))` computed in cohomology and pulled back to `G^∨`
/// through `χ ↦ δχ`.
pub fn ker_e_cohomological(group: &Arc<FiniteGroup>, stabilizers: &[Subgroup], limits: Limits) -> Result<CharacterSubgroup> {
    let ab = Abelianization::new(group);
    let phnp = phnp_lattice(group, stabilizers)?;
    let h2z = cohomology(&trivial_lattice(group, 1), 2, limits)?;
    let h2l = cohomology(&phnp.lattice, 2, limits)?;
    let e = induced_map(&phnp.incl, &h2z, &h2l).as_hom();
    let denom = ab.exponent();
    let cols: Vec<Vec<BigInt>> = (0..ab.factors().rank())
        .map(|j| {
            let mut chi = Character::trivial(ab.factors().rank());
            chi.residues[j] = BigInt::one();
            let cocycle = character_cocycle(group, &ab.value_table(&chi), &denom);
            e.apply(&h2z.coords(&cocycle))
        })
        .collect();
    let hom = AbelianHom::new(ab.factors().clone(), h2l.structure().clone(), IntMatrix::from_columns(h2l.structure().rank(), &cols))?;
    Ok(CharacterSubgroup { inner: hom.kernel() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog_group;

    fn arc(s: &str) -> Arc<FiniteGroup> {
        Arc::new(catalog_group(s).unwrap())
    }

    #[test]
    fn projection_kills_exactly_the_derived_subgroup() {
        for s in ["symmetric(4)", "quaternion8", "dihedral(6)", "cyclic(12)", "heisenberg(3)", "cyclic(1)"] {
            let g = arc(s);
            let ab = Abelianization::new(&g);
            for x in 0..g.order() {
                assert_eq!(ab.factors().is_zero_element(ab.project(x)), ab.derived().contains(x), "{s}");
                for y in 0..g.order() {
                    let sum: Vec<BigInt> = ab.project(x).iter().zip(ab.project(y)).map(|(a, b)| a + b).collect();
                    assert_eq!(ab.factors().reduce(&sum), ab.project(g.mul(x, y)));
                }
            }
            assert_eq!(ab.order(), BigInt::from(g.order() / ab.derived().order()));
        }
    }

    #[test]
    fn empty_family_is_rejected() {
        let g = arc("klein4");
        assert!(h2z_prime(&g, &[Subgroup::trivial(&g)], &[]).is_err());
    }
}
