use std::sync::Arc;

use super::{FiniteGroup, Subgroup};

/// Left cosets `gH` with the left action of the parent group.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    parent: Arc<FiniteGroup>,
    stabilizer: Subgroup,
    cosets: Vec<Vec<usize>>,
    coset_of: Vec<usize>,
    /// `action[g * k + c]` for `k` cosets
    action: Vec<usize>,
}

/// Cosets are numbered by their smallest element; coset 0 is `H` itself.
pub fn coset_space(stabilizer: &Subgroup) -> CosetSpace {
    let g = stabilizer.parent();
    let n = g.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut cosets = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let mut c: Vec<usize> = stabilizer.members().iter().map(|&h| g.mul(x, h)).collect();
        c.sort_unstable();
        for &y in &c {
            coset_of[y] = cosets.len();
        }
        cosets.push(c);
    }
    let k = cosets.len();
    let mut action = vec![0; n * k];
    for x in 0..n {
        for (ci, c) in cosets.iter().enumerate() {
            action[x * k + ci] = coset_of[g.mul(x, c[0])];
        }
    }
    CosetSpace { parent: g.clone(), stabilizer: stabilizer.clone(), cosets, coset_of, action }
}

impl CosetSpace {
    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn stabilizer(&self) -> &Subgroup {
        &self.stabilizer
    }

    pub fn len(&self) -> usize {
        self.cosets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cosets.is_empty()
    }

    pub fn cosets(&self) -> &[Vec<usize>] {
        &self.cosets
    }

    pub fn coset_of(&self, g: usize) -> usize {
        self.coset_of[g]
    }

    /// Index of `g · c`.
    pub fn act(&self, g: usize, c: usize) -> usize {
        self.action[g * self.cosets.len() + c]
    }
}
