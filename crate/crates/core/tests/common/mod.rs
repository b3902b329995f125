//! Sweeps shared by the property tests and the acceptance runner. Each
//! returns the list of failures, so callers decide how to report them.
#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

use hasse_core::chardual::{ker_e, ker_e_cohomological, Abelianization};
use hasse_core::cohomology::{cohomology, sha, subgroup_cohomology, Family, Limits};
use hasse_core::group::{all_subgroups, catalog_listing, coset_space, cyclic_subgroups, normal_subgroups, FiniteGroup, Subgroup};
use hasse_core::lattice::{norm_one_lattice, permutation_lattice, phnp_lattice, trivial_lattice, GLattice};
use hasse_core::linalg::{cokernel, column_lattice_basis, kernel_basis, snf, solve_integer, IntMatrix};

pub fn catalog_upto(n: usize) -> Vec<(String, Arc<FiniteGroup>)> {
    catalog_listing(1, n).into_iter().map(|e| (e.spec.to_string(), Arc::new(e.spec.build().unwrap()))).collect()
}

fn subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    all_subgroups(g, 64).unwrap()
}

fn lim() -> Limits {
    Limits::unbounded()
}

/// `H¹(G, ℤ[G/H]) = 0` and `H²(G, ℤ[G/H]) ≅ H^ab`.
pub fn shapiro(max_order: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, g) in catalog_upto(max_order) {
        for h in subgroups(&g) {
            let m = permutation_lattice(&coset_space(&h));
            let h1 = cohomology(&m, 1, lim()).unwrap();
            let h2 = cohomology(&m, 2, lim()).unwrap();
            let hab = Abelianization::new(&Arc::new(h.to_group())).factors().clone();
            if !h1.structure().is_trivial() || h2.structure() != &hab {
                bad.push(format!("{name} H={}: H1={} H2={} H^ab={}", h.describe(), h1.structure(), h2.structure(), hab));
            }
        }
    }
    bad
}

/// `H²(G, ℤ) ≅ G^ab`.
pub fn h2_of_integers(max_order: usize) -> Vec<String> {
    catalog_upto(max_order)
        .into_iter()
        .filter_map(|(name, g)| {
            let h2 = cohomology(&trivial_lattice(&g, 1), 2, lim()).unwrap();
            let ab = Abelianization::new(&g).factors().clone();
            (h2.structure() != &ab).then(|| format!("{name}: H2(G,Z)={} G^ab={ab}", h2.structure()))
        })
        .collect()
}

/// Norm-one lattices of every subgroup, plus the PHNP lattice of `{H, 1}`.
fn sample_lattices(g: &Arc<FiniteGroup>) -> Vec<(String, GLattice)> {
    let mut out = Vec::new();
    for h in subgroups(g) {
        out.push((format!("Z[G/{}]/<d>", h.describe()), norm_one_lattice(&h).unwrap().lattice));
        if !h.is_trivial() && !h.is_whole() {
            let l = phnp_lattice(g, &[h.clone(), Subgroup::trivial(g)]).unwrap().lattice;
            out.push((format!("Lambda({}, 1)", h.describe()), l));
        }
    }
    out
}

/// The cyclic shortcut agrees with the bar resolution on every cyclic subgroup.
pub fn cyclic_shortcut(max_order: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, g) in catalog_upto(max_order) {
        let lats = sample_lattices(&g);
        for d in cyclic_subgroups(&g) {
            for (what, l) in &lats {
                let fast = subgroup_cohomology(l, &d, 2, true, lim()).unwrap();
                let bar = subgroup_cohomology(l, &d, 2, false, lim()).unwrap();
                if fast.structure() != bar.structure() {
                    bad.push(format!("{name} {what} D={}: cyclic {} bar {}", d.describe(), fast.structure(), bar.structure()));
                }
            }
        }
    }
    bad
}

/// Stabilizer lists used for the Ker e comparison: each subgroup alone, and
/// each pair of normal subgroups.
fn stabilizer_lists(g: &Arc<FiniteGroup>) -> Vec<Vec<Subgroup>> {
    let mut out: Vec<Vec<Subgroup>> = subgroups(g).into_iter().map(|h| vec![h]).collect();
    let normals = normal_subgroups(g, 64).unwrap();
    for (i, a) in normals.iter().enumerate() {
        for b in &normals[i + 1..] {
            out.push(vec![a.clone(), b.clone()]);
        }
    }
    out
}

fn names(stabs: &[Subgroup]) -> String {
    stabs.iter().map(Subgroup::describe).collect::<Vec<_>>().join(", ")
}

/// `Ker e` from characters equals the kernel computed in cohomology.
pub fn ker_e_sides(max_order: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, g) in catalog_upto(max_order) {
        for stabs in stabilizer_lists(&g) {
            let by_chars = ker_e(&g, &stabs);
            let by_coh = ker_e_cohomological(&g, &stabs, lim()).unwrap();
            if by_chars != by_coh {
                bad.push(format!("{name} [{}]: characters {:?} cohomology {:?}", names(&stabs), by_chars.structure(), by_coh.structure()));
            }
        }
    }
    bad
}

/// Appending `G` leaves `Ш²(Λ)` alone; a doubled field gives the norm-one `Ш²`.
pub fn field_reductions(max_order: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, g) in catalog_upto(max_order) {
        let fam = Family::MaximalCyclic.resolve(&g);
        let sha_of = |stabs: &[Subgroup]| sha(&phnp_lattice(&g, stabs).unwrap().lattice, &fam, lim()).unwrap();
        let subs = subgroups(&g);
        for h in &subs {
            let doubled = sha_of(&[h.clone(), h.clone()]);
            let single = sha(&norm_one_lattice(h).unwrap().lattice, &fam, lim()).unwrap();
            if doubled != single {
                bad.push(format!("{name} ({0}, {0}): {doubled} vs norm-one {single}", h.describe()));
            }
        }
        for stabs in stabilizer_lists(&g).into_iter().filter(|s| s.iter().all(|h| !h.is_whole())) {
            let mut with_g = stabs.clone();
            with_g.push(Subgroup::whole(&g));
            let (a, b) = (sha_of(&stabs), sha_of(&with_g));
            if a != b {
                bad.push(format!("{name} [{}] + G: {a} vs {b}", names(&stabs)));
            }
        }
    }
    bad
}

/// `0 → ℤ → Λ → Λ¹ → 0` is exact and every lattice is a genuine G-lattice.
pub fn exact_sequences(max_order: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, g) in catalog_upto(max_order) {
        for stabs in stabilizer_lists(&g) {
            let p = phnp_lattice(&g, &stabs).unwrap();
            let tag = format!("{name} [{}]", names(&stabs));
            if p.lattice.rank() != p.hnp.lattice.rank() + 1 {
                bad.push(format!("{tag}: rank Lambda - rank Lambda^1 != 1"));
            }
            if p.check_exact().is_err() || !p.incl.is_equivariant() || !p.proj.is_equivariant() {
                bad.push(format!("{tag}: sequence not exact or maps not equivariant"));
            }
            if kernel_basis(&p.incl.matrix).cols() != 0 {
                bad.push(format!("{tag}: incl not injective"));
            }
            if !p.lattice.verify_action() || !p.hnp.lattice.verify_action() {
                bad.push(format!("{tag}: action is not a homomorphism"));
            }
        }
        for h in subgroups(&g) {
            let m = permutation_lattice(&coset_space(&h));
            if column_lattice_basis(&hasse_core::lattice::fixed_sublattice(&m)).cols() != 1 {
                bad.push(format!("{name} G/{}: fixed sublattice rank != 1", h.describe()));
            }
        }
    }
    bad
}

/// Enlarging the family never enlarges `Ш²`, and all cyclic subgroups give the
/// same answer as the maximal ones.
pub fn family_monotonicity(max_order: usize) -> Vec<String> {
    let mut bad = Vec::new();
    for (name, g) in catalog_upto(max_order) {
        let maximal = Family::MaximalCyclic.resolve(&g);
        let all = Family::AllCyclic.resolve(&g);
        let mut bigger = maximal.clone();
        bigger.push(Subgroup::whole(&g));
        for (what, l) in sample_lattices(&g) {
            let a = sha(&l, &maximal, lim()).unwrap();
            let b = sha(&l, &all, lim()).unwrap();
            let c = sha(&l, &bigger, lim()).unwrap();
            if a != b || c.order() > a.order() || (a.order() % c.order()) != BigInt::zero() {
                bad.push(format!("{name} {what}: maximal {a} all {b} with G {c}"));
            }
        }
    }
    bad
}

/// `U·A·V = S` with unimodular `U`, `V` and a divisibility chain on `S`.
pub fn check_smith(a: &IntMatrix) -> Result<(), String> {
    let d = snf(a);
    if d.u.mul(a).mul(&d.v) != d.s {
        return Err("U·A·V != S".into());
    }
    if !d.u.is_unimodular() || !d.v.is_unimodular() {
        return Err("transform not unimodular".into());
    }
    let f = &d.invariant_factors;
    if f.windows(2).any(|w| (&w[1] % &w[0]) != BigInt::zero()) || f.iter().any(|x| *x <= BigInt::zero()) {
        return Err(format!("not a divisibility chain: {f:?}"));
    }
    if snf(&d.s).invariant_factors != *f {
        return Err("Smith form is not idempotent".into());
    }
    Ok(())
}

/// The column basis spans the same lattice, and membership in the
/// saturation agrees with the rank test `rank [A | x] = rank A`.
pub fn check_saturation(a: &IntMatrix, x: &[BigInt]) -> Result<(), String> {
    let b = column_lattice_basis(a);
    if a.columns().iter().any(|col| solve_integer(&b, col).is_none()) {
        return Err("column outside the computed basis".into());
    }
    if b.columns().iter().any(|col| solve_integer(a, col).is_none()) {
        return Err("basis vector outside the column lattice".into());
    }
    let c = cokernel(a.rows(), a);
    let widened = a.hstack(&IntMatrix::from_columns(a.rows(), &[x.to_vec()]));
    let expected = hasse_core::linalg::rank(&widened) == hasse_core::linalg::rank(a);
    if c.in_saturation(x) != expected {
        return Err(format!("in_saturation = {} but the rank test says {expected}", !expected));
    }
    Ok(())
}

/// `project ∘ lift = id` on generators and the image maps to zero.
pub fn check_cokernel(a: &IntMatrix) -> Result<(), String> {
    let c = cokernel(a.rows(), a);
    let n = c.torsion().rank() + c.free_rank();
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::one();
        if c.project(&c.lift(&e)) != e {
            return Err(format!("project(lift(e_{j})) != e_{j}"));
        }
    }
    if a.columns().iter().any(|col| c.project(col).iter().any(|x| !x.is_zero())) {
        return Err("an image column projects to a nonzero class".into());
    }
    let rank = hasse_core::linalg::rank(a);
    if c.free_rank() != a.rows() - rank {
        return Err("free rank differs from rows - rank".into());
    }
    Ok(())
}

pub fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
        proptest::collection::vec(-6i64..7, r * c).prop_map(move |v| IntMatrix::from_i64(r, c, &v))
    })
}

/// Mostly-zero matrices large enough to take the sparse cokernel path.
pub fn tall_sparse_matrix() -> impl Strategy<Value = IntMatrix> {
    (64usize..90, 1usize..12).prop_flat_map(|(r, c)| {
        proptest::collection::vec(prop_oneof![6 => Just(0i64), 2 => Just(1), 2 => Just(-1), 1 => -4i64..5], r * c)
            .prop_map(move |v| IntMatrix::from_i64(r, c, &v))
    })
}

/// Seeded run of the linear-algebra checks, for the acceptance runner.
pub fn linalg_sweep(cases: u32) -> Vec<String> {
    let mut bad = Vec::new();
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut record = |name: &str, r: Result<(), proptest::test_runner::TestError<IntMatrix>>| {
        if let Err(e) = r {
            bad.push(format!("{name}: {e}"));
        }
    };
    let mut runner = TestRunner::new_with_rng(config.clone(), proptest::test_runner::TestRng::deterministic_rng(config.rng_algorithm));
    record("smith", runner.run(&small_matrix(), |a| check_smith(&a).map_err(TestCaseError::fail)));
    record("cokernel (dense)", runner.run(&small_matrix(), |a| check_cokernel(&a).map_err(TestCaseError::fail)));
    record("cokernel (sparse)", runner.run(&tall_sparse_matrix(), |a| check_cokernel(&a).map_err(TestCaseError::fail)));
    record(
        "saturation",
        runner.run(&small_matrix(), |a| {
            let x: Vec<BigInt> = (0..a.rows()).map(|i| BigInt::from(i as i64 % 3 - 1)).collect();
            check_saturation(&a, &x).map_err(TestCaseError::fail)?;
            let y: Vec<BigInt> = a.column(0).into_iter().map(|v| v * 3).collect();
            check_saturation(&a, &y).map_err(TestCaseError::fail)
        }),
    );
    bad
}
