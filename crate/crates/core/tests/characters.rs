use std::sync::Arc;

use hasse_core::chardual::{
    criteria_counts, derived_criterion, h2z_prime, h2z_prime_with, ker_e, ker_e_for_subgroup, sha2_order_by_criteria,
    Abelianization, Character, CharacterSubgroup, H2zMethod,
};
use hasse_core::cohomology::Family;
use hasse_core::group::{
    catalog_group, cyclic_subgroups, group_from_permutations, normal_subgroups, parse_cycles, FiniteGroup, Subgroup,
};
use hasse_core::Error;
use num_bigint::BigInt;

fn arc(s: &str) -> Arc<FiniteGroup> {
    Arc::new(catalog_group(s).unwrap())
}

fn s4() -> (Arc<FiniteGroup>, Subgroup, Subgroup) {
    let t = parse_cycles("(1,2)", 4).unwrap();
    let c = parse_cycles("(1,2,3,4)", 4).unwrap();
    let g = group_from_permutations(&[t.clone(), c.clone()], 4).unwrap();
    let h1 = Subgroup::generated(&g, &[g.find_permutation(&t).unwrap()]).unwrap();
    let h2 = Subgroup::generated(&g, &[g.find_permutation(&c).unwrap()]).unwrap();
    (g, h1, h2)
}

fn big(n: u64) -> BigInt {
    BigInt::from(n)
}

#[test]
fn abelianization_invariant_factors() {
    assert_eq!(Abelianization::new(&s4().0).factors().factors_u64(), [2]);
    assert_eq!(Abelianization::new(&arc("klein4")).factors().factors_u64(), [2, 2]);
    assert_eq!(Abelianization::new(&arc("quaternion8")).factors().factors_u64(), [2, 2]);
    assert_eq!(Abelianization::new(&arc("dihedral(6)")).factors().factors_u64(), [2, 2]);
    assert_eq!(Abelianization::new(&arc("dihedral(5)")).factors().factors_u64(), [2]);
    assert_eq!(Abelianization::new(&arc("heisenberg(3)")).factors().factors_u64(), [3, 3]);
    assert!(Abelianization::new(&arc("cyclic(1)")).factors().is_trivial());
}

#[test]
fn quaternion_derived_subgroup_by_brute_force() {
    let g = arc("quaternion8");
    let mut comms: Vec<usize> = (0..8).flat_map(|a| (0..8).map(move |b| (a, b))).map(|(a, b)| g.commutator(a, b)).collect();
    comms.sort();
    comms.dedup();
    assert_eq!(comms, [0, 1]);
    assert_eq!(Abelianization::new(&g).derived().members(), [0, 1]);
}

#[test]
fn sign_character_of_s4() {
    let (g, h1, h2) = s4();
    let ab = Abelianization::new(&g);
    let dual = ab.dual_group();
    assert_eq!(dual.len(), 2);
    let sign = dual.iter().find(|c| !c.is_trivial()).unwrap();
    // value 1/2 exactly on odd permutations
    let perms = g.permutations().unwrap();
    for x in 0..g.order() {
        let odd = perms[x].cycles().iter().map(|c| c.len() - 1).sum::<usize>() % 2 == 1;
        assert_eq!(ab.evaluate(sign, x), big(odd as u64));
    }
    for h in [&h1, &h2] {
        let res = ab.restriction_to(h);
        let r = res.apply(sign);
        assert!(!r.is_trivial());
        assert_eq!(res.ab.factors().factors_u64().last().copied(), Some(h.order() as u64));
    }
    let res = ab.restriction_to(&Subgroup::trivial(&g));
    assert!(res.apply(sign).is_trivial());
}

#[test]
fn characters_vanish_on_commutators() {
    for s in ["symmetric(4)", "dihedral(4)", "quaternion8", "heisenberg(3)", "direct_product(cyclic(2),dihedral(4))"] {
        let g = arc(s);
        let ab = Abelianization::new(&g);
        for chi in ab.dual_group() {
            for a in 0..g.order() {
                for b in 0..g.order() {
                    assert_eq!(ab.evaluate(&chi, g.commutator(a, b)), big(0), "{s}");
                }
            }
        }
    }
}

#[test]
fn restriction_agrees_with_evaluation() {
    let g = arc("direct_product(cyclic(4),dihedral(4))");
    let ab = Abelianization::new(&g);
    for d in cyclic_subgroups(&g).iter().take(12) {
        let res = ab.restriction_to(d);
        for chi in ab.dual_group() {
            let r = res.apply(&chi);
            let (e, ed) = (ab.exponent(), res.ab.exponent());
            for (i, &x) in d.members().iter().enumerate() {
                // χ(x)·e_D·e == χ|_D(x)·e·e_D as fractions
                assert_eq!(ab.evaluate(&chi, x) * &ed, res.ab.evaluate(&r, i) * &e);
            }
        }
    }
}

#[test]
fn s4_ker_e_and_h2z_prime() {
    let (g, h1, h2) = s4();
    let stabs = [h1, h2];
    assert!(ker_e(&g, &stabs).is_trivial());
    for family in [Family::AllCyclic, Family::MaximalCyclic] {
        let h = h2z_prime(&g, &stabs, &family.resolve(&g)).unwrap();
        assert_eq!(h.order(), big(2));
    }
    let out = sha2_order_by_criteria(&g, &stabs, &Family::MaximalCyclic.resolve(&g)).unwrap();
    assert_eq!(out.order, big(2));
    assert!(out.hnp_gate);
    assert_eq!(out.counts.ker_e.order, big(1));
    assert_eq!(out.counts.h2z_prime.order, big(2));
}

#[test]
fn ker_e_for_cyclic_subgroups_of_s4() {
    let (g, h1, h2) = s4();
    let stabs = [h1, h2];
    for d in cyclic_subgroups(&g) {
        let local_trivial = stabs.iter().any(|h| h.intersect(&d).is_trivial());
        let k = ker_e_for_subgroup(&d, &stabs);
        if local_trivial {
            assert_eq!(k.order(), big(d.order() as u64));
        }
    }
    assert!(ker_e_for_subgroup(&Subgroup::trivial(&g), &stabs).is_trivial());
    assert_eq!(ker_e_for_subgroup(&Subgroup::whole(&g), &stabs).order(), ker_e(&g, &stabs).order());
}

#[test]
fn independent_abelian_product() {
    // G = Z/4 × Z/6, L₁ fixed by {0} × Z/6 and L₂ by Z/4 × {0}
    let g = arc("direct_product(cyclic(4),cyclic(6))");
    let g1 = Subgroup::from_members(&g, &(0..6).collect::<Vec<_>>()).unwrap();
    let g2 = Subgroup::from_members(&g, &(0..4).map(|x| 6 * x).collect::<Vec<_>>()).unwrap();
    let stabs = [g1, g2];
    let k = ker_e(&g, &stabs);
    assert_eq!(k.order(), big(24));
    let fam = Family::MaximalCyclic.resolve(&g);
    assert_eq!(criteria_counts(&g, &stabs, &fam).unwrap().sha_order, big(1));
    assert!(derived_criterion(&g, &stabs).unwrap());
}

#[test]
fn trivial_stabilizer_gives_full_dual() {
    for s in ["symmetric(3)", "klein4", "quaternion8"] {
        let g = arc(s);
        let k = ker_e(&g, &[Subgroup::trivial(&g)]);
        assert_eq!(k.order(), Abelianization::new(&g).order());
    }
}

#[test]
fn klein_four_pair_by_enumeration() {
    let g = arc("klein4");
    let stabs = [Subgroup::generated(&g, &[1]).unwrap(), Subgroup::generated(&g, &[2]).unwrap()];
    let fam = Family::AllCyclic.resolve(&g);
    let h = h2z_prime(&g, &stabs, &fam).unwrap();
    assert_eq!(h.order(), big(4));

    // oracle: a character f lies in H²(ℤ)′ iff on each cyclic D some splitting
    // f|_D = f₁ + f₂ has fᵢ vanishing on D ∩ G⁽ⁱ⁾; for D of order ≤ 2 this
    // reduces to "f|_D = 0 or D meets some stabilizer trivially"
    let ab = Abelianization::new(&g);
    for chi in ab.dual_group() {
        let ok = fam.iter().all(|d| {
            d.members().iter().all(|&x| ab.evaluate(&chi, x) == big(0)) || stabs.iter().any(|s| s.intersect(d).is_trivial())
        });
        assert_eq!(ok, h.contains(&chi));
    }
    assert_eq!(sha2_order_by_criteria(&g, &stabs, &fam).unwrap().order, big(1));
}

#[test]
fn family_containing_the_whole_group_gives_ker_e() {
    for s in ["symmetric(3)", "dihedral(4)", "klein4"] {
        let g = arc(s);
        for pair in normal_subgroups(&g, 64).unwrap().windows(2) {
            let mut fam = Family::MaximalCyclic.resolve(&g);
            fam.push(Subgroup::whole(&g));
            assert_eq!(h2z_prime(&g, pair, &fam).unwrap(), ker_e(&g, pair));
        }
    }
}

#[test]
fn both_h2z_prime_paths_agree() {
    for s in ["symmetric(4)", "dihedral(6)", "direct_product(cyclic(2),dihedral(4))", "direct_product(cyclic(6),cyclic(6))"] {
        let g = arc(s);
        let ab = Abelianization::new(&g);
        let normals = normal_subgroups(&g, 64).unwrap();
        let fam = Family::MaximalCyclic.resolve(&g);
        for a in &normals {
            for b in &normals {
                let stabs = [a.clone(), b.clone()];
                let x = h2z_prime_with(&ab, &stabs, &fam, H2zMethod::Enumerate).unwrap();
                let y = h2z_prime_with(&ab, &stabs, &fam, H2zMethod::Preimages).unwrap();
                assert_eq!(x, y, "{s}");
                assert!(ker_e(&g, &stabs).is_subgroup_of(&x));
            }
        }
    }
}

#[test]
fn derived_criterion_on_c2_times_d4() {
    let g = arc("direct_product(cyclic(2),dihedral(4))");
    // α = (1, e), β = (0, r²) generates the derived subgroup
    let (alpha, beta) = (8, 2);
    let der = Abelianization::new(&g).derived().clone();
    assert_eq!(der.members(), [0, beta]);
    let ab = g.mul(alpha, beta);
    let stabs = [Subgroup::generated(&g, &[alpha]).unwrap(), Subgroup::generated(&g, &[ab]).unwrap()];
    assert!(stabs[0].intersect(&stabs[1]).is_trivial());
    assert!(!derived_criterion(&g, &stabs).unwrap());
}

#[test]
fn derived_criterion_rejects_non_normal() {
    let (g, h1, _) = s4();
    assert_eq!(derived_criterion(&g, &[Subgroup::trivial(&g), h1]), Err(Error::NotNormal(1)));
}

#[test]
fn dihedral_groups_satisfy_the_derived_criterion() {
    for n in 3..=8 {
        let g = arc(&format!("dihedral({n})"));
        let normals = normal_subgroups(&g, 64).unwrap();
        for a in &normals {
            for b in &normals {
                if a.intersect(b).is_trivial() {
                    assert!(derived_criterion(&g, &[a.clone(), b.clone()]).unwrap(), "dihedral({n})");
                }
            }
        }
    }
}

#[test]
fn duplicating_a_stabilizer_keeps_the_verdict() {
    let g = arc("direct_product(cyclic(2),dihedral(4))");
    let normals = normal_subgroups(&g, 64).unwrap();
    for a in &normals {
        for b in &normals {
            let v = derived_criterion(&g, &[a.clone(), b.clone()]).unwrap();
            assert_eq!(v, derived_criterion(&g, &[a.clone(), b.clone(), b.clone()]).unwrap());
        }
    }
}

#[test]
fn subgroups_are_closed() {
    let g = arc("direct_product(cyclic(4),cyclic(6))");
    let ab = Abelianization::new(&g);
    let chars: Vec<Character> = ab.dual_group().into_iter().step_by(5).collect();
    let sub = CharacterSubgroup::generated_by(ab.factors(), &chars);
    assert!(sub.is_closed());
}
