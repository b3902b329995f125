use std::fmt;

use crate::error::{Error, Result};

/// Bijection of `0..degree`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            if x >= images.len() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Parse(format!("{images:?} is not a bijection")));
            }
        }
        Ok(Permutation { images })
    }

    /// Image list on `{1..d}`, as written in JSON input.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::Parse(format!("{images:?}: points are numbered from 1")));
        }
        Self::from_images(images.iter().map(|&x| x - 1).collect())
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `(self · other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&x| self.images[x]).collect() }
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree()];
        let mut out = Vec::new();
        for start in 0..self.degree() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.images[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.images[x];
            }
            out.push(cycle);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_cycles(self))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation on points `1..=degree`; the identity prints as `()`.
pub fn format_cycles(p: &Permutation) -> String {
    let cycles = p.cycles();
    if cycles.is_empty() {
        return "()".into();
    }
    cycles
        .iter()
        .map(|c| format!("({})", c.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")))
        .collect()
}

/// Parses `(1,2)(3,4)`-style cycle notation. Cycles are composed right to left.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Permutation> {
    let bad = || Error::Parse(format!("bad cycle notation {s:?}"));
    let mut result = Permutation::identity(degree);
    let mut rest = s.trim();
    let mut cycles = Vec::new();
    while !rest.is_empty() {
        let body = rest.strip_prefix('(').ok_or_else(bad)?;
        let close = body.find(')').ok_or_else(bad)?;
        let inner = body[..close].trim();
        rest = body[close + 1..].trim_start();
        if inner.is_empty() {
            continue;
        }
        let points = inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        if points.iter().any(|&x| x == 0 || x > degree) {
            return Err(Error::Parse(format!("{s:?} moves a point outside 1..={degree}")));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != points.len() {
            return Err(bad());
        }
        let mut images: Vec<usize> = (0..degree).collect();
        for (k, &x) in points.iter().enumerate() {
            images[x - 1] = points[(k + 1) % points.len()] - 1;
        }
        cycles.push(Permutation { images });
    }
    for c in cycles.iter().rev() {
        result = c.compose(&result);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_round_trip() {
        let p = parse_cycles("(1,2,3)(4,5)", 5).unwrap();
        assert_eq!(p.to_string(), "(1,2,3)(4,5)");
        assert_eq!(parse_cycles("()", 3).unwrap(), Permutation::identity(3));
        assert!(parse_cycles("(1,1)", 3).is_err());
        assert!(parse_cycles("(1,4)", 3).is_err());
    }

    #[test]
    fn composition_is_right_to_left() {
        let a = parse_cycles("(1,2)", 3).unwrap();
        let b = parse_cycles("(2,3)", 3).unwrap();
        // apply (2,3) first: 2 -> 3 -> 3, 3 -> 2 -> 1
        assert_eq!(a.compose(&b), parse_cycles("(1,2)(2,3)", 3).unwrap());
        assert_eq!(a.compose(&b).to_string(), "(1,2,3)");
    }
}
