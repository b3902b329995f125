//! `H¹` and `H²` through the normalized bar resolution, the cyclic shortcut,
//! restriction and induced maps, and Ш as a kernel of restrictions.
//!
//! For `n ≥ 1` and finite `G`, `Hⁿ(G, M)` is finite, so `ker dⁿ` is the
//! saturation of `im dⁿ⁻¹` and `Hⁿ` is the torsion of `coker dⁿ⁻¹`. Only the
//! previous coboundary is ever factored.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::group::{cyclic_subgroups, maximal_cyclic_subgroups, FiniteGroup, Subgroup};
use crate::lattice::{fixed_sublattice, restrict_lattice_to, GLattice, LatticeMap};
use crate::linalg::{
    is_zero_vec, solve_integer, AbelianHom, AbelianSubgroup, Cokernel, FiniteAbelianGroup, IntMatrix, SparseMatrix,
};

/// Default cap on the group order for bar-resolution cohomology.
pub const DEFAULT_MAX_ORDER: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_order: DEFAULT_MAX_ORDER }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits { max_order: usize::MAX }
    }

    fn check(&self, g: &FiniteGroup) -> Result<()> {
        if g.order() > self.max_order {
            return Err(Error::OrderCapExceeded {
                what: "bar-resolution cohomology".into(),
                order: g.order(),
                cap: self.max_order,
            });
        }
        Ok(())
    }
}

/// Layout of normalized `n`-cochains: `(g₁, …, gₙ)` over non-identity
/// elements, then the lattice coordinate.
#[derive(Clone, Copy, Debug)]
struct Cochains {
    m: usize,
    r: usize,
}

impl Cochains {
    fn of(lat: &GLattice) -> Self {
        Cochains { m: lat.group().order() - 1, r: lat.rank() }
    }

    fn dim(&self, n: u32) -> usize {
        self.m.pow(n) * self.r
    }

    fn at(&self, args: &[usize]) -> usize {
        debug_assert!(args.iter().all(|&g| g > 0));
        args.iter().fold(0, |acc, &g| acc * self.m + (g - 1)) * self.r
    }
}

pub fn cochain_dimension(group_order: usize, rank: usize, n: u32) -> usize {
    (group_order - 1).pow(n) * rank
}

fn push_block(t: &mut Vec<(usize, usize, BigInt)>, row: usize, col: usize, a: &IntMatrix) {
    for i in 0..a.rows() {
        for (j, v) in a.row(i).iter().enumerate() {
            if !v.is_zero() {
                t.push((row + i, col + j, v.clone()));
            }
        }
    }
}

fn push_identity(t: &mut Vec<(usize, usize, BigInt)>, row: usize, col: usize, r: usize, sign: i64) {
    for i in 0..r {
        t.push((row + i, col + i, BigInt::from(sign)));
    }
}

/// Matrix of `dⁿ` from normalized `n`-cochains to `(n+1)`-cochains, `n ≤ 2`.
pub fn coboundary(lat: &GLattice, n: u32) -> SparseMatrix {
    let g = lat.group();
    let c = Cochains::of(lat);
    let r = c.r;
    let nonid = 1..g.order();
    let mut t = Vec::new();
    match n {
        0 => {
            let id = IntMatrix::identity(r);
            for x in nonid {
                push_block(&mut t, c.at(&[x]), 0, &lat.action(x).sub(&id));
            }
        }
        1 => {
            // g·f(h) − f(gh) + f(g)
            for x in nonid.clone() {
                for y in nonid.clone() {
                    let row = c.at(&[x, y]);
                    push_block(&mut t, row, c.at(&[y]), lat.action(x));
                    let xy = g.mul(x, y);
                    if xy != 0 {
                        push_identity(&mut t, row, c.at(&[xy]), r, -1);
                    }
                    push_identity(&mut t, row, c.at(&[x]), r, 1);
                }
            }
        }
        2 => {
            // g·f(h,k) − f(gh,k) + f(g,hk) − f(g,h)
            for x in nonid.clone() {
                for y in nonid.clone() {
                    for z in nonid.clone() {
                        let row = c.at(&[x, y, z]);
                        push_block(&mut t, row, c.at(&[y, z]), lat.action(x));
                        let xy = g.mul(x, y);
                        if xy != 0 {
                            push_identity(&mut t, row, c.at(&[xy, z]), r, -1);
                        }
                        let yz = g.mul(y, z);
                        if yz != 0 {
                            push_identity(&mut t, row, c.at(&[x, yz]), r, 1);
                        }
                        push_identity(&mut t, row, c.at(&[x, y]), r, -1);
                    }
                }
            }
        }
        _ => panic!("coboundary degree {n} is not implemented"),
    }
    SparseMatrix::from_triplets(c.dim(n + 1), c.dim(n), t)
}

/// Applies `dⁿ` to a cochain without materializing the matrix.
pub fn apply_coboundary(lat: &GLattice, n: u32, f: &[BigInt]) -> Vec<BigInt> {
    let g = lat.group();
    let c = Cochains::of(lat);
    assert_eq!(f.len(), c.dim(n));
    let r = c.r;
    let val = |args: &[usize]| -> Vec<BigInt> {
        if args.contains(&0) {
            vec![BigInt::zero(); r]
        } else {
            let s = c.at(args);
            f[s..s + r].to_vec()
        }
    };
    let add = |acc: &mut [BigInt], v: &[BigInt], sign: i32| {
        for (a, b) in acc.iter_mut().zip(v) {
            if sign > 0 {
                *a += b;
            } else {
                *a -= b;
            }
        }
    };
    let mut out = vec![BigInt::zero(); c.dim(n + 1)];
    let tuples: Vec<Vec<usize>> = match n {
        0 => (1..g.order()).map(|x| vec![x]).collect(),
        1 => (1..g.order()).flat_map(|x| (1..g.order()).map(move |y| vec![x, y])).collect(),
        2 => (1..g.order())
            .flat_map(|x| (1..g.order()).flat_map(move |y| (1..g.order()).map(move |z| vec![x, y, z])))
            .collect(),
        _ => panic!("coboundary degree {n} is not implemented"),
    };
    for args in tuples {
        let s = c.at(&args);
        let acc = &mut out[s..s + r];
        let x = args[0];
        let head = lat.action(x).mul_vec(&val(&args[1..]));
        add(acc, &head, 1);
        match n {
            // d⁰m(g) = g·m − m
            0 => add(acc, &val(&[]), -1),
            1 => {
                add(acc, &val(&[g.mul(x, args[1])]), -1);
                add(acc, &val(&[x]), 1);
            }
            _ => {
                add(acc, &val(&[g.mul(x, args[1]), args[2]]), -1);
                add(acc, &val(&[x, g.mul(args[1], args[2])]), 1);
                add(acc, &val(&[x, args[1]]), -1);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
enum Engine {
    Bar(Cokernel),
    Cyclic {
        generator: usize,
        fixed: IntMatrix,
        coker: Cokernel,
    },
}

/// `Hⁿ(G, M)` for `n ∈ {1, 2}` with representative cocycles and a coordinate map.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    degree: u32,
    lattice: GLattice,
    structure: FiniteAbelianGroup,
    reps: Vec<Vec<BigInt>>,
    engine: Engine,
}

impl CohomologyGroup {
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn structure(&self) -> &FiniteAbelianGroup {
        &self.structure
    }

    pub fn lattice(&self) -> &GLattice {
        &self.lattice
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.lattice.group()
    }

    pub fn rep_cocycles(&self) -> &[Vec<BigInt>] {
        &self.reps
    }

    pub fn cochain_dimension(&self) -> usize {
        Cochains::of(&self.lattice).dim(self.degree)
    }

    pub fn is_cyclic_engine(&self) -> bool {
        matches!(self.engine, Engine::Cyclic { .. })
    }

    /// Class of a normalized cocycle, in invariant-factor coordinates.
    pub fn coords(&self, cocycle: &[BigInt]) -> Vec<BigInt> {
        match &self.engine {
            Engine::Bar(coker) => coker.project_torsion(cocycle),
            Engine::Cyclic { generator, fixed, coker } => {
                let g = self.lattice.group();
                let c = Cochains::of(&self.lattice);
                let mut m = vec![BigInt::zero(); c.r];
                let mut x = *generator;
                // Σ_{i=1}^{n-1} f(σⁱ, σ)
                while x != 0 {
                    let s = c.at(&[x, *generator]);
                    for (a, b) in m.iter_mut().zip(&cocycle[s..s + c.r]) {
                        *a += b;
                    }
                    x = g.mul(x, *generator);
                }
                let y = solve_integer(fixed, &m).expect("Σ f(σⁱ, σ) is fixed by the cyclic group");
                coker.project_torsion(&y)
            }
        }
    }

    pub fn is_cocycle(&self, f: &[BigInt]) -> bool {
        is_zero_vec(&apply_coboundary(&self.lattice, self.degree, f))
    }

    /// Cocycle with the given class.
    pub fn cocycle_from_coords(&self, coords: &[BigInt]) -> Vec<BigInt> {
        let mut f = vec![BigInt::zero(); self.cochain_dimension()];
        for (rep, k) in self.reps.iter().zip(coords) {
            if k.is_zero() {
                continue;
            }
            for (a, b) in f.iter_mut().zip(rep) {
                *a += k * b;
            }
        }
        f
    }
}

/// `Hⁿ(G, M)` by the bar resolution, `n ∈ {1, 2}`.
pub fn cohomology(lat: &GLattice, n: u32, limits: Limits) -> Result<CohomologyGroup> {
    assert!(n == 1 || n == 2, "only H¹ and H² are implemented");
    limits.check(lat.group())?;
    let d = coboundary(lat, n - 1);
    let coker = Cokernel::from_sparse(d);
    let structure = coker.torsion().clone();
    let reps = (0..structure.rank()).map(|j| coker.torsion_generator(j)).collect();
    Ok(CohomologyGroup { degree: n, lattice: lat.clone(), structure, reps, engine: Engine::Bar(coker) })
}

/// `H²(D, M) ≅ M^D / N_D·M` for cyclic `D`, with bar representatives
/// `f(σⁱ, σʲ) = m` when `i + j ≥ |D|` and `0` otherwise.
pub fn cyclic_h2(lat: &GLattice) -> Result<CohomologyGroup> {
    let g = lat.group();
    let n = g.order();
    let generator = match (0..n).find(|&x| g.element_order(x) == n) {
        Some(x) if n > 1 => x,
        Some(_) => {
            // trivial group
            let coker = Cokernel::from_columns(0, &IntMatrix::zeros(0, 0));
            return Ok(CohomologyGroup {
                degree: 2,
                lattice: lat.clone(),
                structure: FiniteAbelianGroup::trivial(),
                reps: Vec::new(),
                engine: Engine::Bar(coker),
            });
        }
        None => return Err(Error::NotCyclic),
    };
    let r = lat.rank();
    let fixed = fixed_sublattice(lat);
    let mut norm = IntMatrix::zeros(r, r);
    for x in 0..n {
        norm = norm.add(lat.action(x));
    }
    let coeffs: Vec<Vec<BigInt>> = norm
        .columns()
        .iter()
        .map(|col| solve_integer(&fixed, col).expect("norm lands in the fixed part"))
        .collect();
    let coker = Cokernel::from_columns(fixed.cols(), &IntMatrix::from_columns(fixed.cols(), &coeffs));
    debug_assert_eq!(coker.free_rank(), 0);
    let structure = coker.torsion().clone();

    let c = Cochains::of(lat);
    let mut power = vec![0usize; n];
    for i in 1..n {
        power[i] = g.mul(power[i - 1], generator);
    }
    let reps = (0..structure.rank())
        .map(|j| {
            let m = fixed.mul_vec(&coker.torsion_generator(j));
            let mut f = vec![BigInt::zero(); c.dim(2)];
            for i in 1..n {
                for k in n - i..n {
                    let s = c.at(&[power[i], power[k]]);
                    f[s..s + r].clone_from_slice(&m);
                }
            }
            f
        })
        .collect();
    Ok(CohomologyGroup { degree: 2, lattice: lat.clone(), structure, reps, engine: Engine::Cyclic { generator, fixed, coker } })
}

/// A homomorphism between cohomology groups in invariant-factor coordinates.
#[derive(Clone, Debug)]
pub struct CohomologyMap {
    pub source: FiniteAbelianGroup,
    pub target: FiniteAbelianGroup,
    pub matrix: IntMatrix,
}

impl CohomologyMap {
    pub fn as_hom(&self) -> AbelianHom {
        AbelianHom::new(self.source.clone(), self.target.clone(), self.matrix.clone())
            .expect("cohomology maps respect the invariant factors")
    }

    pub fn kernel(&self) -> AbelianSubgroup {
        self.as_hom().kernel()
    }

    pub fn is_zero(&self) -> bool {
        self.as_hom().image().is_trivial()
    }
}

fn restrict_cocycle(source: &CohomologyGroup, d: &Subgroup, inner: &GLattice, f: &[BigInt]) -> Vec<BigInt> {
    let outer = Cochains::of(source.lattice());
    let c = Cochains::of(inner);
    let members = d.members();
    let k = d.order();
    let mut out = vec![BigInt::zero(); c.dim(source.degree)];
    let r = c.r;
    match source.degree {
        1 => {
            for a in 1..k {
                let (s, t) = (c.at(&[a]), outer.at(&[members[a]]));
                out[s..s + r].clone_from_slice(&f[t..t + r]);
            }
        }
        _ => {
            for a in 1..k {
                for b in 1..k {
                    let (s, t) = (c.at(&[a, b]), outer.at(&[members[a], members[b]]));
                    out[s..s + r].clone_from_slice(&f[t..t + r]);
                }
            }
        }
    }
    out
}

/// Cohomology of `M` restricted to `D`; the cyclic shortcut is used in degree 2
/// when `D` is cyclic and `prefer_cyclic` is set.
pub fn subgroup_cohomology(lat: &GLattice, d: &Subgroup, n: u32, prefer_cyclic: bool, limits: Limits) -> Result<CohomologyGroup> {
    let inner_group = Arc::new(d.to_group());
    let inner = restrict_lattice_to(lat, d, &inner_group);
    if n == 2 && prefer_cyclic && d.is_cyclic() {
        cyclic_h2(&inner)
    } else {
        cohomology(&inner, n, limits)
    }
}

/// Restriction `Hⁿ(G, M) → Hⁿ(D, M)`; `target` must come from [`subgroup_cohomology`] on `D`.
pub fn restriction_map(source: &CohomologyGroup, d: &Subgroup, target: &CohomologyGroup) -> CohomologyMap {
    assert_eq!(source.degree, target.degree);
    assert_eq!(target.group().order(), d.order());
    let cols: Vec<Vec<BigInt>> = source
        .reps
        .iter()
        .map(|f| target.coords(&restrict_cocycle(source, d, target.lattice(), f)))
        .collect();
    CohomologyMap {
        source: source.structure.clone(),
        target: target.structure.clone(),
        matrix: IntMatrix::from_columns(target.structure.rank(), &cols),
    }
}

/// Map on `Hⁿ` induced by an equivariant lattice map.
pub fn induced_map(f: &LatticeMap, source: &CohomologyGroup, target: &CohomologyGroup) -> CohomologyMap {
    assert_eq!(source.degree, target.degree);
    let (rs, rt) = (f.source.rank(), f.target.rank());
    let cols: Vec<Vec<BigInt>> = source
        .reps
        .iter()
        .map(|cocycle| {
            // a nonzero class forces rs > 0
            let pushed: Vec<BigInt> = cocycle.chunks(rs).flat_map(|v| f.matrix.mul_vec(v)).collect();
            debug_assert_eq!(pushed.len(), target.cochain_dimension());
            debug_assert!(rt == 0 || target.is_cocycle(&pushed));
            target.coords(&pushed)
        })
        .collect();
    CohomologyMap {
        source: source.structure.clone(),
        target: target.structure.clone(),
        matrix: IntMatrix::from_columns(target.structure.rank(), &cols),
    }
}

/// Which subgroups play the decomposition groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// Maximal cyclic subgroups; restriction through them covers every cyclic subgroup.
    MaximalCyclic,
    AllCyclic,
    Explicit(Vec<Subgroup>),
}

impl Family {
    pub fn resolve(&self, g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
        match self {
            Family::MaximalCyclic => maximal_cyclic_subgroups(g),
            Family::AllCyclic => cyclic_subgroups(g),
            Family::Explicit(v) => v.clone(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Family::MaximalCyclic => "cyclic".into(),
            Family::AllCyclic => "all-cyclic".into(),
            Family::Explicit(v) => format!("explicit({})", v.iter().map(Subgroup::describe).collect::<Vec<_>>().join(", ")),
        }
    }
}

/// `Ш²` as the kernel of restrictions to the family, inside `H²(G, M)`.
#[derive(Clone, Debug)]
pub struct Sha {
    pub h2: CohomologyGroup,
    pub kernel: AbelianSubgroup,
}

impl Sha {
    pub fn structure(&self) -> FiniteAbelianGroup {
        self.kernel.structure()
    }

    pub fn order(&self) -> BigInt {
        self.kernel.order()
    }
}

pub fn sha_detailed(lat: &GLattice, family: &[Subgroup], limits: Limits) -> Result<Sha> {
    if family.is_empty() {
        return Err(Error::Parse("the decomposition family is empty".into()));
    }
    let h2 = cohomology(lat, 2, limits)?;
    let structure = h2.structure().clone();
    if structure.is_trivial() || family.iter().any(Subgroup::is_whole) {
        return Ok(Sha { kernel: AbelianSubgroup::trivial(&structure), h2 });
    }
    let maps = family
        .iter()
        .map(|d| {
            let target = subgroup_cohomology(lat, d, 2, true, Limits::unbounded())?;
            Ok(restriction_map(&h2, d, &target).as_hom())
        })
        .collect::<Result<Vec<_>>>()?;
    let kernel = AbelianHom::stack(&structure, &maps).kernel();
    Ok(Sha { h2, kernel })
}

/// Structure of `Ш²(G, M)` with respect to the family.
pub fn sha(lat: &GLattice, family: &[Subgroup], limits: Limits) -> Result<FiniteAbelianGroup> {
    Ok(sha_detailed(lat, family, limits)?.structure())
}

/// Rank-1 trivial-action 2-cocycle from integer values `a(g) ∈ [0, e)`, representing
/// the character `g ↦ a(g)/e`: `f(g, h) = (a(g) + a(h) − a(gh)) / e`.
pub fn character_cocycle(g: &FiniteGroup, values: &[BigInt], denominator: &BigInt) -> Vec<BigInt> {
    let m = g.order() - 1;
    let mut f = vec![BigInt::zero(); m * m];
    for x in 1..g.order() {
        for y in 1..g.order() {
            let v = &values[x] + &values[y] - &values[g.mul(x, y)];
            debug_assert!((&v % denominator).is_zero());
            f[(x - 1) * m + (y - 1)] = v / denominator;
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{catalog_group, coset_space};
    use crate::lattice::{norm_one_lattice, permutation_lattice, trivial_lattice};
    use num_traits::One;

    fn arc(s: &str) -> Arc<FiniteGroup> {
        Arc::new(catalog_group(s).unwrap())
    }

    fn factors(h: &CohomologyGroup) -> Vec<u64> {
        h.structure().factors_u64()
    }

    #[test]
    fn sign_action_on_z() {
        let c2 = arc("cyclic(2)");
        let sign = norm_one_lattice(&Subgroup::trivial(&c2)).unwrap().lattice;
        assert_eq!(factors(&cohomology(&sign, 1, Limits::default()).unwrap()), vec![2]);
        assert!(factors(&cohomology(&sign, 2, Limits::default()).unwrap()).is_empty());
        assert!(factors(&cyclic_h2(&sign).unwrap()).is_empty());
        let z = trivial_lattice(&c2, 1);
        assert_eq!(factors(&cyclic_h2(&z).unwrap()), vec![2]);
        assert_eq!(factors(&cohomology(&z, 2, Limits::default()).unwrap()), vec![2]);
    }

    #[test]
    fn complex_property_and_dimensions() {
        let v = arc("klein4");
        let l = crate::lattice::phnp_lattice(&v, &[Subgroup::generated(&v, &[1]).unwrap(), Subgroup::trivial(&v)])
            .unwrap()
            .lattice;
        assert_eq!(l.rank(), 5);
        let d1 = coboundary(&l, 1);
        let d2 = coboundary(&l, 2);
        assert_eq!(d2.cols(), 45);
        assert!(d2.mul(&d1).is_zero());
        assert!(d1.mul(&coboundary(&l, 0)).is_zero());
    }

    #[test]
    fn apply_matches_matrix() {
        let g = arc("dihedral(3)");
        let m = permutation_lattice(&coset_space(&Subgroup::generated(&g, &[3]).unwrap()));
        for n in 0..3u32 {
            let d = coboundary(&m, n);
            let f: Vec<BigInt> = (0..d.cols()).map(|i| BigInt::from((i * 7 % 5) as i64 - 2)).collect();
            assert_eq!(d.mul_vec(&f), apply_coboundary(&m, n, &f), "degree {n}");
        }
    }

    #[test]
    fn reps_are_cocycles_with_unit_coordinates() {
        let g = arc("cyclic(4)");
        let z = trivial_lattice(&g, 1);
        for h in [cohomology(&z, 2, Limits::default()).unwrap(), cyclic_h2(&z).unwrap()] {
            assert_eq!(factors(&h), vec![4]);
            for (j, f) in h.rep_cocycles().iter().enumerate() {
                assert!(h.is_cocycle(f));
                let mut e = vec![BigInt::zero(); h.structure().rank()];
                e[j] = BigInt::one();
                assert_eq!(h.coords(f), e);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g = arc("cyclic(17)");
        let z = trivial_lattice(&g, 1);
        assert!(matches!(cohomology(&z, 2, Limits::default()), Err(Error::OrderCapExceeded { .. })));
        assert!(cyclic_h2(&z).is_ok());
        assert!(matches!(cyclic_h2(&trivial_lattice(&arc("klein4"), 1)), Err(Error::NotCyclic)));
    }
}
