//! Catalog scans over pairs of normal stabilizers.
//!
//! Every group in the selection is paired with each unordered pair `{H₁, H₂}`
//! of normal subgroups (equal pairs included) with `H₁ ∩ H₂ = 1`. Each pair
//! is one task; tasks run in parallel and the findings are sorted afterwards,
//! so the output does not depend on scheduling.

use std::sync::Arc;

use log::info;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{normal_subgroups, GroupSpec, Subgroup, DEFAULT_SUBGROUP_CAP};
use crate::input::{FamilySpec, GroupSource, ParsedGroup};
use crate::chardual::ObstructionMemo;
use crate::report::{analyze_with_memo, AnalysisReport, AnalyzeOptions, SubgroupInfo};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanMode {
    /// Direct cohomology of `Λ` and `Λ¹`, cross-checked against the criteria.
    Lattice,
    /// Character criteria and the derived-subgroup test.
    Criteria,
}

/// How scan tasks are executed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    /// Data-parallel over tasks; `jobs = None` uses every core. Runs
    /// sequentially when built without the `parallel` feature.
    Parallel { jobs: Option<usize> },
    Sequential,
}

impl Default for Execution {
    fn default() -> Self {
        Execution::Parallel { jobs: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    /// Lattice and criteria disagree on `|Ш²(Λ)|` (or on `Ker e`) although the gate holds.
    CriteriaMismatch,
    /// `⋂ᵢ G^der·G⁽ⁱ⁾ ≠ G^der`.
    DerivedCriterionFailure,
    /// Every field satisfies the HNP but `Ш²(Λ) ≠ 1`.
    ShaNontrivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanFinding {
    pub group: String,
    pub group_order: usize,
    /// Replayable subgroup specs (`{"members": […]}`).
    pub stabilizers: Vec<String>,
    pub kind: FindingKind,
    pub evidence: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedGroup {
    pub group: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub mode: ScanMode,
    pub family: String,
    pub groups: usize,
    pub pairs: usize,
    pub skipped: Vec<SkippedGroup>,
    pub findings: Vec<ScanFinding>,
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub mode: ScanMode,
    pub family: FamilySpec,
    /// Order cap for direct cohomology (lattice mode, and the gate in criteria mode).
    pub max_order: usize,
    /// Skip pairs where both indices are prime powers.
    pub prime_power_filter: bool,
    /// Largest group order for subgroup enumeration.
    pub subgroup_cap: usize,
    pub execution: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            mode: ScanMode::Criteria,
            family: FamilySpec::Cyclic,
            max_order: crate::cohomology::DEFAULT_MAX_ORDER,
            prime_power_filter: false,
            subgroup_cap: DEFAULT_SUBGROUP_CAP,
            execution: Execution::default(),
        }
    }
}

struct Task {
    group: Arc<ParsedGroup>,
    memo: Arc<ObstructionMemo>,
    pair: [Subgroup; 2],
}

fn is_prime_power(n: usize) -> bool {
    if n <= 1 {
        return true;
    }
    let p = (2..=n).find(|d| n.is_multiple_of(*d)).expect("n ≥ 2 has a divisor");
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    m == 1
}

/// The normal pairs a scan visits for one group.
pub fn scan_pairs(g: &Arc<crate::group::FiniteGroup>, subgroup_cap: usize, prime_power_filter: bool) -> Result<Vec<[Subgroup; 2]>> {
    let normals = normal_subgroups(g, subgroup_cap)?;
    let mut pairs = Vec::new();
    for (i, a) in normals.iter().enumerate() {
        for b in &normals[i..] {
            if !a.intersect(b).is_trivial() {
                continue;
            }
            if prime_power_filter && is_prime_power(a.index()) && is_prime_power(b.index()) {
                continue;
            }
            pairs.push([a.clone(), b.clone()]);
        }
    }
    Ok(pairs)
}

fn findings_from(report: &AnalysisReport, task: &Task, mode: ScanMode) -> Vec<ScanFinding> {
    let stabilizers: Vec<String> = task.pair.iter().map(|h| SubgroupInfo::of(h).replay_spec()).collect();
    let finding = |kind, evidence| ScanFinding {
        group: report.group.descriptor.clone(),
        group_order: report.group.order,
        stabilizers: stabilizers.clone(),
        kind,
        evidence,
    };
    let mut out = Vec::new();
    let c = &report.criteria;
    if c.derived_criterion.value() == Some(&false) {
        out.push(finding(
            FindingKind::DerivedCriterionFailure,
            json!({ "derived_criterion": false, "ker_e_order": c.ker_e_order, "h2z_prime_order": c.h2z_prime_order }),
        ));
    }
    let gate = c.hnp_gate.value() == Some(&true);
    match mode {
        ScanMode::Lattice => {
            let sha2 = report.cohomology.sha2.value().expect("lattice mode computes Sha");
            if gate && !sha2.is_trivial() {
                out.push(finding(
                    FindingKind::ShaNontrivial,
                    json!({ "sha2": sha2, "sha2_hnp": report.cohomology.sha2_hnp.value(), "sha_order_by_criteria": c.sha_order }),
                ));
            }
            let disagree = [&report.consistency.sha_orders_agree, &report.consistency.ker_e_agree]
                .iter()
                .any(|x| x.value() == Some(&false));
            if disagree {
                out.push(finding(
                    FindingKind::CriteriaMismatch,
                    json!({
                        "sha2": sha2,
                        "sha_order_by_criteria": c.sha_order,
                        "ker_e_cohomological": report.cohomology.ker_e.value(),
                        "ker_e": c.ker_e,
                    }),
                ));
            }
        }
        ScanMode::Criteria => {
            if gate && c.sha_order > 1 {
                out.push(finding(
                    FindingKind::ShaNontrivial,
                    json!({ "sha_order_by_criteria": c.sha_order, "ker_e_order": c.ker_e_order, "h2z_prime_order": c.h2z_prime_order }),
                ));
            }
        }
    }
    out
}

fn run_task(task: &Task, opts: &ScanOptions) -> Result<Vec<ScanFinding>> {
    let analyze_opts = AnalyzeOptions {
        criteria_only: opts.mode == ScanMode::Criteria,
        max_order: opts.max_order,
        gate_max_order: Some(opts.max_order),
        timings: false,
    };
    let report = analyze_with_memo(&task.group, &task.pair, &opts.family, &analyze_opts, Some(&task.memo))?;
    Ok(findings_from(&report, task, opts.mode))
}

#[cfg(feature = "parallel")]
fn run_all(tasks: &[Task], opts: &ScanOptions) -> Result<Vec<Vec<ScanFinding>>> {
    use rayon::prelude::*;
    match opts.execution {
        Execution::Sequential => tasks.iter().map(|t| run_task(t, opts)).collect(),
        Execution::Parallel { jobs } => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.unwrap_or(0))
                .build()
                .map_err(|e| Error::Parse(format!("cannot start worker pool: {e}")))?;
            pool.install(|| tasks.par_iter().map(|t| run_task(t, opts)).collect())
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn run_all(tasks: &[Task], opts: &ScanOptions) -> Result<Vec<Vec<ScanFinding>>> {
    tasks.iter().map(|t| run_task(t, opts)).collect()
}

pub fn scan(groups: &[GroupSpec], opts: &ScanOptions) -> Result<ScanSummary> {
    if matches!(opts.family, FamilySpec::Explicit(_)) {
        return Err(Error::Parse("scans need a group-independent family (cyclic or all-cyclic)".into()));
    }
    let mut skipped = Vec::new();
    let mut tasks = Vec::new();
    let mut visited = 0;
    for spec in groups {
        let name = spec.to_string();
        let n = spec.order();
        if opts.mode == ScanMode::Lattice && n > opts.max_order {
            skipped.push(SkippedGroup { group: name, reason: format!("order {n} exceeds the cohomology cap {}", opts.max_order) });
            continue;
        }
        if n > opts.subgroup_cap {
            skipped.push(SkippedGroup { group: name, reason: format!("order {n} exceeds the subgroup cap {}", opts.subgroup_cap) });
            continue;
        }
        let group = Arc::new(ParsedGroup { group: Arc::new(spec.build()?), source: GroupSource::Catalog(name) });
        let memo = Arc::new(ObstructionMemo::new());
        for pair in scan_pairs(&group.group, opts.subgroup_cap, opts.prime_power_filter)? {
            tasks.push(Task { group: group.clone(), memo: memo.clone(), pair });
        }
        visited += 1;
    }
    info!("scanning {} pairs over {visited} groups", tasks.len());
    let mut findings: Vec<ScanFinding> = run_all(&tasks, opts)?.into_iter().flatten().collect();
    findings.sort_by(|a, b| {
        (a.group_order, &a.group, &a.stabilizers, a.kind).cmp(&(b.group_order, &b.group, &b.stabilizers, b.kind))
    });
    Ok(ScanSummary { mode: opts.mode, family: opts.family.tag(), groups: visited, pairs: tasks.len(), skipped, findings })
}
