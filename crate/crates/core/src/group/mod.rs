//! Finite groups as Cayley tables, plus subgroups, cosets and the catalog.

mod catalog;
mod coset;
mod perm;
mod subgroup;

use std::collections::VecDeque;
use std::fmt;
use std::sync::Arc;

pub use catalog::{catalog_group, catalog_listing, parse_group_spec, CatalogEntry, GroupSpec, FAMILIES};
pub use coset::{coset_space, CosetSpace};
pub use perm::{format_cycles, parse_cycles, Permutation};
pub use subgroup::{
    all_subgroups, cyclic_subgroups, derived_subgroup, intersect_all, maximal_cyclic_subgroups, normal_subgroups,
    stabilizer_intersection_warning, Subgroup, DEFAULT_SUBGROUP_CAP,
};

use crate::error::{Error, GroupAxiom, Result};

pub const DEFAULT_ORDER_CAP: usize = 10_000;

/// A finite group on `0..n` with identity `0`, stored as its Cayley table.
pub struct FiniteGroup {
    n: usize,
    table: Vec<u32>,
    inverses: Vec<usize>,
    labels: Vec<String>,
    permutations: Option<Vec<Permutation>>,
    descriptor: String,
}

impl FiniteGroup {
    /// Validates the group axioms. The identity must sit at index 0.
    pub fn from_cayley(table: Vec<Vec<usize>>) -> Result<FiniteGroup> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Parse("empty Cayley table".into()));
        }
        if n > DEFAULT_ORDER_CAP {
            return Err(Error::OrderCapExceeded { what: "Cayley table".into(), order: n, cap: DEFAULT_ORDER_CAP });
        }
        let mut flat = Vec::with_capacity(n * n);
        for row in &table {
            if row.len() != n {
                return Err(Error::Parse("Cayley table is not square".into()));
            }
            for &x in row {
                if x >= n {
                    return Err(Error::Parse(format!("entry {x} out of range 0..{n}")));
                }
                flat.push(x as u32);
            }
        }
        let at = |a: usize, b: usize| flat[a * n + b] as usize;
        let is_identity = |e: usize| (0..n).all(|x| at(e, x) == x && at(x, e) == x);
        if !is_identity(0) {
            return Err(match (1..n).find(|&e| is_identity(e)) {
                Some(e) => Error::Parse(format!("identity must be element 0, found it at {e}")),
                None => Error::NotAGroup(GroupAxiom::Identity),
            });
        }
        let mut inverses = vec![0; n];
        for (a, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| at(a, b) == 0 && at(b, a) == 0)
                .ok_or(Error::NotAGroup(GroupAxiom::Inverses))?;
        }
        // Light's test: associativity only needs checking against a generating set
        // of the magma, here one whose left-bracketed words already reach everything.
        let gens = magma_generators(n, &at);
        for &g in &gens {
            for x in 0..n {
                let xg = at(x, g);
                for y in 0..n {
                    if at(xg, y) != at(x, at(g, y)) {
                        return Err(Error::NotAGroup(GroupAxiom::Associativity));
                    }
                }
            }
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Ok(FiniteGroup { n, table: flat, inverses, labels, permutations: None, descriptor: "custom".into() })
    }

    /// Closure of permutation generators (0-based images) by breadth-first products.
    pub fn from_permutations(generators: &[Permutation], degree: usize, cap: usize) -> Result<FiniteGroup> {
        for g in generators {
            if g.degree() != degree {
                return Err(Error::Parse(format!("permutation {g} does not act on {degree} points")));
            }
        }
        let id = Permutation::identity(degree);
        let mut elements = vec![id.clone()];
        let mut index = std::collections::HashMap::new();
        index.insert(id, 0usize);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in generators {
                let p = elements[i].compose(g);
                if !index.contains_key(&p) {
                    if elements.len() >= cap {
                        return Err(Error::OrderCapExceeded {
                            what: "permutation closure".into(),
                            order: elements.len() + 1,
                            cap,
                        });
                    }
                    index.insert(p.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(p);
                }
            }
        }
        let mut g = Self::from_elements(&elements, |a, b| index[&a.compose(b)]);
        g.labels = elements.iter().map(|p| p.to_string()).collect();
        g.permutations = Some(elements);
        Ok(g)
    }

    /// Builds the table from a closed element list whose first entry is the identity.
    pub(crate) fn from_elements<T>(elements: &[T], mul: impl Fn(&T, &T) -> usize) -> FiniteGroup {
        let n = elements.len();
        let mut table = vec![0u32; n * n];
        for (a, x) in elements.iter().enumerate() {
            for (b, y) in elements.iter().enumerate() {
                table[a * n + b] = mul(x, y) as u32;
            }
        }
        let mut inverses = vec![0; n];
        for (a, inv) in inverses.iter_mut().enumerate() {
            *inv = (0..n).find(|&b| table[a * n + b] == 0).expect("closed element list");
        }
        FiniteGroup {
            n,
            table,
            inverses,
            labels: (0..n).map(|i| i.to_string()).collect(),
            permutations: None,
            descriptor: "custom".into(),
        }
    }

    pub(crate) fn with_labels(mut self, labels: Vec<String>) -> Self {
        debug_assert_eq!(labels.len(), self.n);
        self.labels = labels;
        self
    }

    pub(crate) fn with_descriptor(mut self, descriptor: impl Into<String>) -> Self {
        self.descriptor = descriptor.into();
        self
    }

    pub(crate) fn with_permutations(mut self, perms: Vec<Permutation>) -> Self {
        self.permutations = Some(perms);
        self
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, g: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.mul(acc, g))
    }

    pub fn commutator(&self, a: usize, b: usize) -> usize {
        self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))
    }

    pub fn conjugate_element(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.n).map(|g| self.element_order(g)).fold(1, num_integer::lcm)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (a + 1..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Family tag such as `dihedral(4)`, or `custom`.
    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn permutations(&self) -> Option<&[Permutation]> {
        self.permutations.as_deref()
    }

    pub fn find_permutation(&self, p: &Permutation) -> Option<usize> {
        self.permutations.as_ref()?.iter().position(|q| q == p)
    }

    pub fn cayley_table(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.mul(a, b)).collect()).collect()
    }

    /// Greedy generating set: scan elements in index order, keep those not
    /// already generated.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.n];
        span[0] = true;
        for g in 1..self.n {
            if span[g] {
                continue;
            }
            gens.push(g);
            for x in self.closure(&gens) {
                span[x] = true;
            }
        }
        gens
    }

    /// Sorted members of the subgroup generated by `gens`.
    pub(crate) fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.n).filter(|&i| seen[i]).collect()
    }

    /// Exhaustive axiom check (cubic); used by tests on constructed groups.
    pub fn verify_axioms(&self) -> Result<()> {
        let n = self.n;
        for x in 0..n {
            if self.mul(0, x) != x || self.mul(x, 0) != x {
                return Err(Error::NotAGroup(GroupAxiom::Identity));
            }
            if self.mul(x, self.inv(x)) != 0 || self.mul(self.inv(x), x) != 0 {
                return Err(Error::NotAGroup(GroupAxiom::Inverses));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::NotAGroup(GroupAxiom::Associativity));
                    }
                }
            }
        }
        Ok(())
    }
}

fn magma_generators(n: usize, at: &impl Fn(usize, usize) -> usize) -> Vec<usize> {
    let mut reached = vec![false; n];
    reached[0] = true;
    let mut gens: Vec<usize> = Vec::new();
    for g in 1..n {
        if reached[g] {
            continue;
        }
        gens.push(g);
        // right multiplication words from the identity
        let mut queue: VecDeque<usize> = (0..n).filter(|&x| reached[x]).collect();
        while let Some(x) = queue.pop_front() {
            for &s in &gens {
                let y = at(x, s);
                if !reached[y] {
                    reached[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    gens.push(0);
    gens
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteGroup({}, order {})", self.descriptor, self.n)
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

pub fn group_from_cayley(table: Vec<Vec<usize>>) -> Result<Arc<FiniteGroup>> {
    FiniteGroup::from_cayley(table).map(Arc::new)
}

pub fn group_from_permutations(generators: &[Permutation], degree: usize) -> Result<Arc<FiniteGroup>> {
    FiniteGroup::from_permutations(generators, degree, DEFAULT_ORDER_CAP).map(Arc::new)
}
