//! One analysis run, end to end, as a serializable record.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::chardual::{criteria_counts, derived_criterion, hnp_obstructions, ker_e_cohomological, CriteriaCounts, ObstructionMemo};
use crate::cohomology::{cohomology, sha, Limits, DEFAULT_MAX_ORDER};
use crate::error::{Error, Result};
use crate::group::{stabilizer_intersection_warning, FiniteGroup, Subgroup};
use crate::input::{FamilySpec, GroupSource, ParsedGroup};
use crate::lattice::phnp_lattice;
use crate::linalg::FiniteAbelianGroup;

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A field that is either present or explicitly absent, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Computed<T> {
    Computed { value: T },
    NotComputed { reason: String },
}

impl<T> Computed<T> {
    pub fn value(&self) -> Option<&T> {
        match self {
            Computed::Computed { value } => Some(value),
            Computed::NotComputed { .. } => None,
        }
    }

    fn not(reason: impl Into<String>) -> Self {
        Computed::NotComputed { reason: reason.into() }
    }
}

impl<T> From<T> for Computed<T> {
    fn from(value: T) -> Self {
        Computed::Computed { value }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupInfo {
    pub descriptor: String,
    pub order: usize,
    pub family: String,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupInfo {
    pub generators: Vec<String>,
    pub members: Vec<usize>,
    pub order: usize,
    pub normal: bool,
}

impl SubgroupInfo {
    pub fn of(h: &Subgroup) -> SubgroupInfo {
        let p = h.parent();
        SubgroupInfo {
            generators: h.generators().iter().map(|&g| p.label(g).to_string()).collect(),
            members: h.members().to_vec(),
            order: h.order(),
            normal: h.is_normal(),
        }
    }

    /// `{"members": […]}`, accepted back by the subgroup parser.
    pub fn replay_spec(&self) -> String {
        serde_json::json!({ "members": self.members }).to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyInfo {
    pub tag: String,
    pub subgroups: Vec<SubgroupInfo>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRanks {
    /// `Λ`
    pub phnp: usize,
    /// `Λ¹`
    pub hnp: usize,
    /// `ℤ[G/G⁽ⁱ⁾]/⟨dᵢ⟩` for each stabilizer.
    pub hnp_summands: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologySection {
    pub h1: Computed<FiniteAbelianGroup>,
    pub h2: Computed<FiniteAbelianGroup>,
    /// `Ш²(Λ)`
    pub sha2: Computed<FiniteAbelianGroup>,
    /// `Ш²` of each norm-one summand of `Λ¹`.
    pub sha2_hnp: Computed<Vec<FiniteAbelianGroup>>,
    /// `Ker(H²(G, ℤ) → H²(G, Λ))`
    pub ker_e: Computed<FiniteAbelianGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriteriaSection {
    pub ker_e_order: u64,
    pub ker_e: FiniteAbelianGroup,
    pub h2z_prime_order: u64,
    pub h2z_prime: FiniteAbelianGroup,
    /// `|H²(ℤ)′| / |Ker e|`; equals `|Ш²(Λ)|` when `hnp_gate` holds.
    pub sha_order: u64,
    pub hnp_gate: Computed<bool>,
    pub derived_criterion: Computed<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Consistency {
    /// `|Ш²(Λ)|` from cohomology equals the criteria order.
    pub sha_orders_agree: Computed<bool>,
    /// `Ker e` from characters equals the cohomological kernel.
    pub ker_e_agree: Computed<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub version: String,
    pub group: GroupInfo,
    pub stabilizers: Vec<SubgroupInfo>,
    pub family: FamilyInfo,
    pub warnings: Vec<String>,
    pub lattice_ranks: LatticeRanks,
    pub cohomology: CohomologySection,
    pub criteria: CriteriaSection,
    pub consistency: Consistency,
    pub timings_ms: Computed<BTreeMap<String, u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Skip the lattice-side cohomology of `Λ`.
    pub criteria_only: bool,
    /// Largest `|G|` for direct `H²` on the lattice side.
    pub max_order: usize,
    /// Largest `|G|` for which the constituent-HNP gate is computed; `None` means always.
    pub gate_max_order: Option<usize>,
    pub timings: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { criteria_only: false, max_order: DEFAULT_MAX_ORDER, gate_max_order: None, timings: false }
    }
}

struct Clock {
    on: bool,
    laps: BTreeMap<String, u64>,
}

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.on {
            *self.laps.entry(stage.to_string()).or_default() += start.elapsed().as_millis() as u64;
        }
        out
    }
}

fn small(n: &BigInt) -> u64 {
    n.to_u64().expect("orders are bounded by |G|")
}

pub fn analyze(group: &ParsedGroup, stabilizers: &[Subgroup], family: &FamilySpec, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    analyze_with_memo(group, stabilizers, family, opts, None)
}

/// [`analyze`] with the gate values drawn from (and added to) `memo`, which
/// must belong to this group and family.
pub fn analyze_with_memo(
    group: &ParsedGroup,
    stabilizers: &[Subgroup],
    family: &FamilySpec,
    opts: &AnalyzeOptions,
    memo: Option<&ObstructionMemo>,
) -> Result<AnalysisReport> {
    let g = &group.group;
    if stabilizers.is_empty() {
        return Err(Error::Parse("at least one stabilizer is needed".into()));
    }
    if stabilizers.iter().any(|h| !Arc::ptr_eq(h.parent(), g)) {
        return Err(Error::GroupMismatch);
    }
    let (_, fam) = family.resolve(g)?;
    if !opts.criteria_only && g.order() > opts.max_order {
        return Err(Error::OrderCapExceeded { what: "direct H^2 on the lattice side".into(), order: g.order(), cap: opts.max_order });
    }
    let mut clock = Clock { on: opts.timings, laps: BTreeMap::new() };
    let mut warnings: Vec<String> = stabilizer_intersection_warning(g, stabilizers).into_iter().collect();

    let summand_ranks: Vec<usize> = stabilizers.iter().map(|h| h.index() - 1).collect();
    let lattice_ranks = LatticeRanks {
        phnp: stabilizers.iter().map(Subgroup::index).sum::<usize>() - (stabilizers.len() - 1),
        hnp: summand_ranks.iter().sum(),
        hnp_summands: summand_ranks,
    };

    let counts: CriteriaCounts = clock.time("criteria", || criteria_counts(g, stabilizers, &fam))?;
    let derived = match derived_criterion(g, stabilizers) {
        Ok(v) => v.into(),
        Err(Error::NotNormal(i)) => Computed::not(format!("stabilizer {} is not normal", i + 1)),
        Err(e) => return Err(e),
    };

    let cohomology_section = if opts.criteria_only {
        const SKIPPED: &str = "criteria-only run";
        CohomologySection {
            h1: Computed::not(SKIPPED),
            h2: Computed::not(SKIPPED),
            sha2: Computed::not(SKIPPED),
            sha2_hnp: Computed::not(SKIPPED),
            ker_e: Computed::not(SKIPPED),
        }
    } else {
        let limits = Limits { max_order: opts.max_order };
        let phnp = clock.time("lattices", || phnp_lattice(g, stabilizers))?;
        let h1 = clock.time("h1", || cohomology(&phnp.lattice, 1, limits))?;
        let h2 = clock.time("h2", || cohomology(&phnp.lattice, 2, limits))?;
        let sha2 = clock.time("sha2", || sha(&phnp.lattice, &fam, limits))?;
        let sha2_hnp = clock.time("sha2_hnp", || {
            phnp.hnp.summands.iter().map(|m| sha(m, &fam, limits)).collect::<Result<Vec<_>>>()
        })?;
        let ker = clock.time("ker_e_cohomological", || ker_e_cohomological(g, stabilizers, limits))?;
        CohomologySection {
            h1: h1.structure().clone().into(),
            h2: h2.structure().clone().into(),
            sha2: sha2.into(),
            sha2_hnp: sha2_hnp.into(),
            ker_e: ker.structure().into(),
        }
    };

    let gate: Computed<bool> = match cohomology_section.sha2_hnp.value() {
        Some(v) => v.iter().all(FiniteAbelianGroup::is_trivial).into(),
        None => match opts.gate_max_order {
            Some(cap) if g.order() > cap => Computed::not(format!("|G| = {} exceeds the gate cap {cap}", g.order())),
            _ => {
                let obs = clock.time("gate", || match memo {
                    Some(m) => m.obstructions(g, stabilizers, &fam, Limits::unbounded()),
                    None => hnp_obstructions(g, stabilizers, &fam, Limits::unbounded()),
                })?;
                obs.iter().all(FiniteAbelianGroup::is_trivial).into()
            }
        },
    };
    if gate.value() == Some(&false) {
        warnings.push("some constituent field fails the Hasse norm principle; the criteria order is not |Sha^2(Lambda)|".into());
    }

    let sha_order = small(&counts.sha_order);
    let consistency = Consistency {
        sha_orders_agree: match (cohomology_section.sha2.value(), gate.value()) {
            (Some(s), Some(true)) => (small(&s.order()) == sha_order).into(),
            (Some(_), _) => Computed::not("the constituent-HNP gate does not hold"),
            (None, _) => Computed::not("lattice side not computed"),
        },
        ker_e_agree: match cohomology_section.ker_e.value() {
            Some(k) => (k == &counts.ker_e.structure).into(),
            None => Computed::not("lattice side not computed"),
        },
    };

    let (_, fam_subs) = family.resolve(g)?;
    let report = AnalysisReport {
        schema: SCHEMA,
        version: VERSION.to_string(),
        group: group_info(group),
        stabilizers: stabilizers.iter().map(SubgroupInfo::of).collect(),
        family: FamilyInfo { tag: family.tag(), subgroups: fam_subs.iter().map(SubgroupInfo::of).collect() },
        warnings,
        lattice_ranks,
        cohomology: cohomology_section,
        criteria: CriteriaSection {
            ker_e_order: small(&counts.ker_e.order),
            ker_e: counts.ker_e.structure.clone(),
            h2z_prime_order: small(&counts.h2z_prime.order),
            h2z_prime: counts.h2z_prime.structure.clone(),
            sha_order,
            hnp_gate: gate,
            derived_criterion: derived,
        },
        consistency,
        timings_ms: if opts.timings { clock.laps.into() } else { Computed::not("timings disabled") },
    };
    Ok(report)
}

pub fn group_info(group: &ParsedGroup) -> GroupInfo {
    let g: &FiniteGroup = &group.group;
    let descriptor = match &group.source {
        GroupSource::Catalog(s) => s.clone(),
        GroupSource::Cayley => format!("custom Cayley table of order {}", g.order()),
        GroupSource::Permutations(_) => g.descriptor().to_string(),
    };
    GroupInfo {
        descriptor,
        order: g.order(),
        family: group.source.family(),
        generators: g.generators().iter().map(|&x| g.label(x).to_string()).collect(),
    }
}

fn show<T>(c: &Computed<T>, f: impl Fn(&T) -> String) -> String {
    match c {
        Computed::Computed { value } => f(value),
        Computed::NotComputed { reason } => format!("not computed ({reason})"),
    }
}

fn structure(a: &FiniteAbelianGroup) -> String {
    a.to_string()
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<AnalysisReport> {
        let r: AnalysisReport = serde_json::from_str(s).map_err(|e| Error::Parse(format!("bad report: {e}")))?;
        if r.schema != SCHEMA {
            return Err(Error::Parse(format!("report schema {} is not {SCHEMA}", r.schema)));
        }
        Ok(r)
    }

    /// Plain-text table for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut row = |k: &str, v: String| {
            let _ = writeln!(out, "{k:<28} {v}");
        };
        row("group", format!("{} (order {}, {})", self.group.descriptor, self.group.order, self.group.family));
        for (i, s) in self.stabilizers.iter().enumerate() {
            row(&format!("stabilizer {}", i + 1), format!("<{}> order {}", s.generators.join(", "), s.order));
        }
        row("family", format!("{} ({} subgroups)", self.family.tag, self.family.subgroups.len()));
        row("rank Lambda / Lambda^1", format!("{} / {}", self.lattice_ranks.phnp, self.lattice_ranks.hnp));
        let c = &self.cohomology;
        row("H^1(G, Lambda)", show(&c.h1, structure));
        row("H^2(G, Lambda)", show(&c.h2, structure));
        row("Sha^2(Lambda)", show(&c.sha2, structure));
        row(
            "Sha^2(Lambda^1_i)",
            show(&c.sha2_hnp, |v| v.iter().map(structure).collect::<Vec<_>>().join(", ")),
        );
        row("Ker e (cohomology)", show(&c.ker_e, structure));
        let k = &self.criteria;
        row("|Ker e|", format!("{} ({})", k.ker_e_order, k.ker_e));
        row("|H^2(Z)'|", format!("{} ({})", k.h2z_prime_order, k.h2z_prime));
        row("Sha order by criteria", k.sha_order.to_string());
        row("HNP gate", show(&k.hnp_gate, bool::to_string));
        row("derived criterion", show(&k.derived_criterion, bool::to_string));
        row("lattice/criteria agree", show(&self.consistency.sha_orders_agree, bool::to_string));
        row("Ker e sides agree", show(&self.consistency.ker_e_agree, bool::to_string));
        if let Some(t) = self.timings_ms.value() {
            row("timings (ms)", t.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" "));
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::input::{parse_group, parse_subgroup};

    #[test]
    fn round_trip_and_explicit_absence() {
        let g = parse_group("klein4").unwrap();
        let stabs = [parse_subgroup(&g.group, "#1").unwrap(), parse_subgroup(&g.group, "#2").unwrap()];
        let opts = AnalyzeOptions { criteria_only: true, ..Default::default() };
        let r = analyze(&g, &stabs, &FamilySpec::Cyclic, &opts).unwrap();
        let s = r.to_json();
        assert!(s.contains("\"not_computed\""));
        assert!(s.contains("\"schema\": 1"));
        assert_eq!(AnalysisReport::from_json(&s).unwrap(), r);
        assert_eq!(r.criteria.sha_order, 1);
    }
}
