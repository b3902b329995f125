use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::perm::Permutation;
use super::{FiniteGroup, DEFAULT_ORDER_CAP};
use crate::error::{Error, Result};

/// A named member of one of the catalog families.
///
/// Element orderings are frozen:
/// - `cyclic(n)`: `r^k` at index `k`.
/// - `dihedral(n)`: `e, r, …, r^(n-1), s, rs, …, r^(n-1)s`, with `s r s = r^-1`.
/// - `symmetric(n)`: permutations of `1..=n` in lexicographic order of image lists.
/// - `quaternion8`: `1, -1, i, -i, j, -j, k, -k`.
/// - `heisenberg(p)`: `[[1,a,c],[0,1,b],[0,0,1]]` at index `a·p² + b·p + c`.
/// - `direct_product(A, B)`: `(x, y)` at index `x·|B| + y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion8,
    Heisenberg(usize),
    DirectProduct(Box<GroupSpec>, Box<GroupSpec>),
}

impl GroupSpec {
    pub fn order(&self) -> usize {
        match self {
            GroupSpec::Cyclic(n) => *n,
            GroupSpec::Dihedral(n) => 2 * n,
            GroupSpec::Symmetric(n) => (1..=*n).product(),
            GroupSpec::Quaternion8 => 8,
            GroupSpec::Heisenberg(p) => p * p * p,
            GroupSpec::DirectProduct(a, b) => a.order().saturating_mul(b.order()),
        }
    }

    /// Catalog family name used by scan filters.
    pub fn family(&self) -> &'static str {
        match self {
            GroupSpec::Cyclic(_) => "cyclic",
            GroupSpec::Dihedral(_) => "dihedral",
            GroupSpec::Symmetric(_) => "symmetric",
            GroupSpec::Quaternion8 => "quaternion",
            GroupSpec::Heisenberg(_) => "heisenberg",
            GroupSpec::DirectProduct(..) if self.is_abelian_product() => "abelian",
            GroupSpec::DirectProduct(..) => "product",
        }
    }

    fn is_abelian_product(&self) -> bool {
        match self {
            GroupSpec::Cyclic(_) => true,
            GroupSpec::DirectProduct(a, b) => a.is_abelian_product() && b.is_abelian_product(),
            _ => false,
        }
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        self.build_with_cap(DEFAULT_ORDER_CAP)
    }

    pub fn build_with_cap(&self, cap: usize) -> Result<FiniteGroup> {
        self.validate()?;
        if self.order() > cap {
            return Err(Error::OrderCapExceeded { what: self.to_string(), order: self.order(), cap });
        }
        Ok(self.construct().with_descriptor(self.to_string()))
    }

    fn validate(&self) -> Result<()> {
        let unsupported = || Err(Error::UnsupportedFamily(self.to_string()));
        match self {
            GroupSpec::Cyclic(0) | GroupSpec::Dihedral(0) | GroupSpec::Symmetric(0) => unsupported(),
            GroupSpec::Symmetric(n) if *n > 4 => unsupported(),
            GroupSpec::Heisenberg(p) if !is_prime(*p) => unsupported(),
            GroupSpec::DirectProduct(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    fn construct(&self) -> FiniteGroup {
        match *self {
            GroupSpec::Cyclic(n) => {
                let elems: Vec<usize> = (0..n).collect();
                FiniteGroup::from_elements(&elems, |a, b| (a + b) % n).with_labels((0..n).map(power_label).collect())
            }
            GroupSpec::Dihedral(n) => {
                // (i, x) = r^i s^x at index x·n + i
                let elems: Vec<(usize, usize)> = (0..2).flat_map(|x| (0..n).map(move |i| (i, x))).collect();
                let labels = elems
                    .iter()
                    .map(|&(i, x)| match (i, x) {
                        (0, 0) => "e".to_string(),
                        (_, 0) => power_label(i),
                        (0, _) => "s".to_string(),
                        _ => format!("{}s", power_label(i)),
                    })
                    .collect();
                FiniteGroup::from_elements(&elems, |&(a, x), &(b, y)| {
                    let i = if x == 0 { (a + b) % n } else { (a + n - b) % n };
                    ((x + y) % 2) * n + i
                })
                .with_labels(labels)
            }
            GroupSpec::Symmetric(n) => {
                let perms = lexicographic_permutations(n);
                let index = |p: &Permutation| perms.binary_search(p).expect("closed");
                let labels = perms.iter().map(|p| p.to_string()).collect();
                FiniteGroup::from_elements(&perms, |a, b| index(&a.compose(b)))
                    .with_labels(labels)
                    .with_permutations(perms.clone())
            }
            GroupSpec::Quaternion8 => {
                // unit u ∈ {1, i, j, k}, sign s; index 2u + s
                const UNIT: [[(usize, usize); 4]; 4] = [
                    [(0, 0), (1, 0), (2, 0), (3, 0)],
                    [(1, 0), (0, 1), (3, 0), (2, 1)],
                    [(2, 0), (3, 1), (0, 1), (1, 0)],
                    [(3, 0), (2, 0), (1, 1), (0, 1)],
                ];
                let elems: Vec<usize> = (0..8).collect();
                let names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"];
                FiniteGroup::from_elements(&elems, |&a, &b| {
                    let (u, s) = UNIT[a / 2][b / 2];
                    2 * u + (s + a % 2 + b % 2) % 2
                })
                .with_labels(names.iter().map(|s| s.to_string()).collect())
            }
            GroupSpec::Heisenberg(p) => {
                let elems: Vec<(usize, usize, usize)> =
                    (0..p).flat_map(|a| (0..p).flat_map(move |b| (0..p).map(move |c| (a, b, c)))).collect();
                let labels = elems.iter().map(|(a, b, c)| format!("[{a},{b},{c}]")).collect();
                FiniteGroup::from_elements(&elems, |&(a, b, c), &(x, y, z)| {
                    ((a + x) % p) * p * p + ((b + y) % p) * p + (c + z + a * y) % p
                })
                .with_labels(labels)
            }
            GroupSpec::DirectProduct(ref a, ref b) => {
                let ga = a.construct();
                let gb = b.construct();
                let m = gb.order();
                let elems: Vec<(usize, usize)> =
                    (0..ga.order()).flat_map(|x| (0..m).map(move |y| (x, y))).collect();
                let labels = elems.iter().map(|&(x, y)| format!("({},{})", ga.label(x), gb.label(y))).collect();
                FiniteGroup::from_elements(&elems, |&(x, y), &(u, v)| ga.mul(x, u) * m + gb.mul(y, v)).with_labels(labels)
            }
        }
    }
}

fn power_label(k: usize) -> String {
    match k {
        0 => "e".into(),
        1 => "r".into(),
        _ => format!("r^{k}"),
    }
}

fn lexicographic_permutations(n: usize) -> Vec<Permutation> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(Permutation::from_images(prefix.clone()).expect("bijection"));
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x);
                rec(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic({n})"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral({n})"),
            GroupSpec::Symmetric(n) => write!(f, "symmetric({n})"),
            GroupSpec::Quaternion8 => write!(f, "quaternion8"),
            GroupSpec::Heisenberg(p) => write!(f, "heisenberg({p})"),
            GroupSpec::DirectProduct(a, b) => write!(f, "direct_product({a},{b})"),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_group_spec(s)
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_group_spec(&s).map_err(serde::de::Error::custom)
    }
}

/// Parses specs such as `dihedral(4)` or `direct_product(cyclic(2),quaternion8)`.
/// `klein4` abbreviates `direct_product(cyclic(2),cyclic(2))`.
pub fn parse_group_spec(s: &str) -> Result<GroupSpec> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { s: &compact, pos: 0 };
    let spec = p.spec()?;
    if p.pos != compact.len() {
        return Err(Error::Parse(format!("trailing input in group spec {s:?}")));
    }
    Ok(spec)
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn ident(&mut self) -> &str {
        let start = self.pos;
        let rest = &self.s[start..];
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        self.pos += len;
        &self.s[start..start + len]
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.s[self.pos..].starts_with(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at offset {} of {:?}", self.pos, self.s)))
        }
    }

    fn number(&mut self) -> Result<usize> {
        self.expect('(')?;
        let start = self.pos;
        while self.s[self.pos..].starts_with(|c: char| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let n = self.s[start..self.pos]
            .parse()
            .map_err(|_| Error::Parse(format!("expected a number in {:?}", self.s)))?;
        self.expect(')')?;
        Ok(n)
    }

    fn spec(&mut self) -> Result<GroupSpec> {
        let name = self.ident().to_ascii_lowercase();
        Ok(match name.as_str() {
            "cyclic" => GroupSpec::Cyclic(self.number()?),
            "dihedral" => GroupSpec::Dihedral(self.number()?),
            "symmetric" => GroupSpec::Symmetric(self.number()?),
            "heisenberg" => GroupSpec::Heisenberg(self.number()?),
            "quaternion8" | "q8" => GroupSpec::Quaternion8,
            "klein4" => GroupSpec::DirectProduct(Box::new(GroupSpec::Cyclic(2)), Box::new(GroupSpec::Cyclic(2))),
            "direct_product" => {
                self.expect('(')?;
                let a = self.spec()?;
                self.expect(',')?;
                let b = self.spec()?;
                self.expect(')')?;
                GroupSpec::DirectProduct(Box::new(a), Box::new(b))
            }
            "" => return Err(Error::Parse(format!("empty group spec in {:?}", self.s))),
            other => return Err(Error::UnsupportedFamily(other.to_string())),
        })
    }
}

pub fn catalog_group(spec: &str) -> Result<FiniteGroup> {
    parse_group_spec(spec)?.build()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub spec: GroupSpec,
    pub family: &'static str,
    pub order: usize,
}

pub const FAMILIES: [&str; 7] = ["cyclic", "abelian", "dihedral", "symmetric", "quaternion", "heisenberg", "product"];

/// All catalog members of order `min_order..=max_order`, sorted by order then spec.
pub fn catalog_listing(min_order: usize, max_order: usize) -> Vec<CatalogEntry> {
    use GroupSpec::*;
    let c = |n| Box::new(Cyclic(n));
    let mut specs = Vec::new();
    for n in 1..=max_order {
        specs.push(Cyclic(n));
    }
    for factors in noncyclic_invariant_factors(max_order) {
        let mut it = factors.iter().rev();
        let mut spec = Cyclic(*it.next().expect("two factors"));
        for &d in it {
            spec = DirectProduct(c(d), Box::new(spec));
        }
        specs.push(spec);
    }
    for n in 3..=max_order / 2 {
        specs.push(Dihedral(n));
        if 4 * n <= max_order {
            specs.push(DirectProduct(c(2), Box::new(Dihedral(n))));
        }
    }
    specs.push(Symmetric(4));
    specs.push(Quaternion8);
    specs.push(DirectProduct(c(2), Box::new(Quaternion8)));
    specs.push(DirectProduct(c(3), Box::new(Symmetric(3))));
    for p in (3..).take_while(|p| p * p * p <= max_order) {
        if is_prime(p) {
            specs.push(Heisenberg(p));
            specs.push(DirectProduct(c(p), Box::new(Heisenberg(p))));
        }
    }
    let mut out: Vec<CatalogEntry> = specs
        .into_iter()
        .filter(|s| (min_order..=max_order).contains(&s.order()))
        .map(|spec| CatalogEntry { family: spec.family(), order: spec.order(), spec })
        .collect();
    out.sort_by(|a, b| a.order.cmp(&b.order).then_with(|| a.spec.to_string().cmp(&b.spec.to_string())));
    out
}

/// Invariant-factor lists `d₁ | … | d_k`, `k ≥ 2`, `d₁ ≥ 2`, with product ≤ bound.
fn noncyclic_invariant_factors(bound: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, product: usize, bound: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() >= 2 {
            out.push(prefix.clone());
        }
        let last = *prefix.last().unwrap_or(&1);
        let mut d = last.max(2);
        while product * d <= bound {
            if d.is_multiple_of(last) {
                prefix.push(d);
                extend(prefix, product * d, bound, out);
                prefix.pop();
            }
            d += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, bound, &mut out);
    out
}
