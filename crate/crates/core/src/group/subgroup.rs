use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::FiniteGroup;
use crate::error::{Error, Result};

pub const DEFAULT_SUBGROUP_CAP: usize = 64;

/// A subgroup, as the sorted member list inside a shared parent group.
#[derive(Clone)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<usize>,
}

impl Subgroup {
    pub fn trivial(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup { parent: parent.clone(), members: vec![0] }
    }

    pub fn whole(parent: &Arc<FiniteGroup>) -> Subgroup {
        Subgroup { parent: parent.clone(), members: (0..parent.order()).collect() }
    }

    /// Breadth-first closure of the given elements.
    pub fn generated(parent: &Arc<FiniteGroup>, gens: &[usize]) -> Result<Subgroup> {
        if let Some(&g) = gens.iter().find(|&&g| g >= parent.order()) {
            return Err(Error::Parse(format!("element {g} out of range")));
        }
        Ok(Subgroup { parent: parent.clone(), members: parent.closure(gens) })
    }

    /// Checks that the listed elements form a subgroup.
    pub fn from_members(parent: &Arc<FiniteGroup>, members: &[usize]) -> Result<Subgroup> {
        let mut m: Vec<usize> = members.to_vec();
        m.sort_unstable();
        m.dedup();
        let h = Subgroup::generated(parent, &m)?;
        if h.members != m {
            return Err(Error::Parse(format!("{members:?} is not a subgroup")));
        }
        Ok(h)
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn index(&self) -> usize {
        self.parent.order() / self.order()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    pub fn is_whole(&self) -> bool {
        self.members.len() == self.parent.order()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.iter().all(|&g| other.contains(g))
    }

    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for &g in &self.members[1..] {
            if span.binary_search(&g).is_err() {
                gens.push(g);
                span = self.parent.closure(&gens);
            }
        }
        gens
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.parent;
        self.members.iter().all(|&a| self.members.iter().all(|&b| g.mul(a, b) == g.mul(b, a)))
    }

    /// A generator if the subgroup is cyclic.
    pub fn cyclic_generator(&self) -> Option<usize> {
        self.members.iter().copied().find(|&g| self.parent.element_order(g) == self.order())
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic_generator().is_some()
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        let gens = g.generators();
        gens.iter().all(|&x| self.members.iter().all(|&h| self.contains(g.conjugate_element(x, h))))
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, g: usize) -> Subgroup {
        let p = &self.parent;
        let mut members: Vec<usize> = self.members.iter().map(|&h| p.conjugate_element(g, h)).collect();
        members.sort_unstable();
        Subgroup { parent: p.clone(), members }
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let members = self.members.iter().copied().filter(|&g| other.contains(g)).collect();
        Subgroup { parent: self.parent.clone(), members }
    }

    /// `A·B`, a subgroup when either operand is normal.
    pub fn product_set(&self, other: &Subgroup) -> Result<Subgroup> {
        if !self.is_normal() && !other.is_normal() {
            return Err(Error::NotNormalOperand);
        }
        Ok(self.join(other))
    }

    /// Subgroup generated by both.
    pub fn join(&self, other: &Subgroup) -> Subgroup {
        let mut gens = self.generators();
        gens.extend(other.generators());
        Subgroup { parent: self.parent.clone(), members: self.parent.closure(&gens) }
    }

    /// The subgroup as a group in its own right; its element `i` is `members()[i]`.
    pub fn to_group(&self) -> FiniteGroup {
        let p = &self.parent;
        let pos = |g: usize| self.members.binary_search(&g).expect("closed subgroup");
        let labels = self.members.iter().map(|&g| p.label(g).to_string()).collect();
        let g = FiniteGroup::from_elements(&self.members, |&a, &b| pos(p.mul(a, b)))
            .with_labels(labels)
            .with_descriptor(format!("subgroup of {}", p.descriptor()));
        match p.permutations() {
            Some(perms) => g.with_permutations(self.members.iter().map(|&i| perms[i].clone()).collect()),
            None => g,
        }
    }

    /// The image of a subgroup of `to_group()` back in the parent.
    pub fn lift_subgroup(&self, inner: &Subgroup) -> Subgroup {
        let members = inner.members.iter().map(|&i| self.members[i]).collect();
        Subgroup { parent: self.parent.clone(), members }
    }

    /// `self ∩ other` as a subgroup of `self.to_group()` (whose parent is `inner_parent`).
    pub fn restrict_into(&self, other: &Subgroup, inner_parent: &Arc<FiniteGroup>) -> Subgroup {
        debug_assert_eq!(inner_parent.order(), self.order());
        let members = self
            .members
            .iter()
            .enumerate()
            .filter(|(_, &g)| other.contains(g))
            .map(|(i, _)| i)
            .collect();
        Subgroup { parent: inner_parent.clone(), members }
    }

    /// `⟨generators⟩` written with element labels, for reports.
    pub fn describe(&self) -> String {
        let gens: Vec<&str> = self.generators().iter().map(|&g| self.parent.label(g)).collect();
        format!("<{}>", gens.join(", "))
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && (Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent)
    }
}

impl Eq for Subgroup {}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup{:?}", self.members)
    }
}

fn sort_canonical(v: &mut [Subgroup]) {
    v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.members.cmp(&b.members)));
}

/// Cyclic subgroups, sorted by order then members.
pub fn cyclic_subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for x in 0..g.order() {
        let h = Subgroup { parent: g.clone(), members: g.closure(&[x]) };
        if seen.insert(h.members.clone()) {
            out.push(h);
        }
    }
    sort_canonical(&mut out);
    out
}

/// Cyclic subgroups not strictly contained in another cyclic subgroup.
pub fn maximal_cyclic_subgroups(g: &Arc<FiniteGroup>) -> Vec<Subgroup> {
    let all = cyclic_subgroups(g);
    all.iter()
        .filter(|h| !all.iter().any(|k| k.order() > h.order() && h.is_subgroup_of(k)))
        .cloned()
        .collect()
}

/// Every subgroup, found as joins of cyclic subgroups. Errors above `cap`.
pub fn all_subgroups(g: &Arc<FiniteGroup>, cap: usize) -> Result<Vec<Subgroup>> {
    if g.order() > cap {
        return Err(Error::OrderCapExceeded { what: "subgroup enumeration".into(), order: g.order(), cap });
    }
    let cyclic = cyclic_subgroups(g);
    let cyc_gens: Vec<usize> = cyclic.iter().map(|c| c.cyclic_generator().expect("cyclic")).collect();
    let mut seen: BTreeSet<Vec<usize>> = cyclic.iter().map(|c| c.members.clone()).collect();
    let mut frontier: Vec<(Vec<usize>, Vec<usize>)> =
        cyclic.iter().zip(&cyc_gens).map(|(c, &x)| (c.members.clone(), vec![x])).collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for (members, gens) in &frontier {
            for &x in &cyc_gens {
                if members.binary_search(&x).is_ok() {
                    continue;
                }
                let mut gx = gens.clone();
                gx.push(x);
                let m = g.closure(&gx);
                if seen.insert(m.clone()) {
                    next.push((m, gx));
                }
            }
        }
        frontier = next;
    }
    let mut out: Vec<Subgroup> = seen.into_iter().map(|members| Subgroup { parent: g.clone(), members }).collect();
    sort_canonical(&mut out);
    Ok(out)
}

pub fn normal_subgroups(g: &Arc<FiniteGroup>, cap: usize) -> Result<Vec<Subgroup>> {
    Ok(all_subgroups(g, cap)?.into_iter().filter(Subgroup::is_normal).collect())
}

/// Subgroup generated by all commutators.
pub fn derived_subgroup(g: &Arc<FiniteGroup>) -> Subgroup {
    let n = g.order();
    let comms: BTreeSet<usize> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| g.commutator(a, b)).collect();
    let gens: Vec<usize> = comms.into_iter().collect();
    Subgroup { parent: g.clone(), members: g.closure(&gens) }
}

pub fn intersect_all(g: &Arc<FiniteGroup>, subgroups: &[Subgroup]) -> Subgroup {
    subgroups.iter().fold(Subgroup::whole(g), |acc, h| acc.intersect(h))
}

/// When the stabilizers share a nontrivial common subgroup the Galois closure
/// is not minimal; callers log this rather than fail.
pub fn stabilizer_intersection_warning(g: &Arc<FiniteGroup>, stabilizers: &[Subgroup]) -> Option<String> {
    let core = intersect_all(g, stabilizers);
    (!core.is_trivial()).then(|| {
        format!(
            "stabilizers intersect in a subgroup of order {}; the group is larger than the Galois closure of the fields",
            core.order()
        )
    })
}
