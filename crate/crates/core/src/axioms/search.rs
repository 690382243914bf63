use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::explainers::ExplanationSet;
use crate::theory::subsets_by_size;

use super::check::{check, satisfied};
use super::{AxiomId, AxiomSet, Universe};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// No assignment satisfies the axioms; `checked` assignments were tried.
    Incompatible { checked: u64 },
    /// An assignment satisfying every axiom, one set per question.
    Compatible { assignment: Vec<ExplanationSet>, checked: u64 },
}

impl Certificate {
    pub fn is_incompatible(&self) -> bool {
        matches!(self, Certificate::Incompatible { .. })
    }
}

/// Every candidate value of `L(Q)`: all sets of subsets of the target.
fn candidates(u: &Universe, i: usize) -> Result<Vec<ExplanationSet>> {
    let n = u.theory().n_features();
    let x = u.question(i).target();
    let subsets: Vec<_> = subsets_by_size(n, 1 << 6)?.into_iter().map(|m| x.restrict(m)).collect();
    if subsets.len() > 16 {
        return Err(Error::Capacity { what: "candidate explanation sets", needed: format!("2^{}", subsets.len()), cap: 1 << 16 });
    }
    Ok((0u32..1 << subsets.len())
        .map(|pick| subsets.iter().enumerate().filter(|(j, _)| pick >> j & 1 == 1).map(|(_, e)| e.clone()).collect())
        .collect())
}

/// Odometer over all assignments; calls `visit` until it returns `false`.
fn enumerate<F>(u: &Universe, cap: u64, mut visit: F) -> Result<u64>
where
    F: FnMut(&[&ExplanationSet]) -> bool,
{
    let table: Vec<Vec<ExplanationSet>> = (0..u.len()).map(|i| candidates(u, i)).collect::<Result<_>>()?;
    let total = table.iter().try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64));
    match total {
        Some(t) if t <= cap => {}
        _ => {
            return Err(Error::Capacity {
                what: "explanation-set assignments",
                needed: total.map_or("more than 2^64".into(), |t| t.to_string()),
                cap,
            })
        }
    }
    let mut digits = vec![0usize; table.len()];
    let mut checked = 0;
    loop {
        let current: Vec<&ExplanationSet> = digits.iter().enumerate().map(|(i, &d)| &table[i][d]).collect();
        checked += 1;
        if !visit(&current) {
            return Ok(checked);
        }
        let mut i = 0;
        loop {
            if i == digits.len() {
                return Ok(checked);
            }
            digits[i] += 1;
            if digits[i] < table[i].len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// Exhaustive search for an assignment of explanation sets to the questions
/// of `fixture` that satisfies every axiom in `axioms`.
pub fn check_incompatibility(axioms: AxiomSet, fixture: &Universe, cap: u64) -> Result<Certificate> {
    // Cheap axioms first so most assignments are rejected early.
    let mut order: Vec<AxiomId> = axioms.iter().collect();
    order.sort_by_key(|a| match a {
        AxiomId::Success | AxiomId::Feasibility => 0,
        AxiomId::Validity | AxiomId::Irreducibility | AxiomId::Monotonicity | AxiomId::CounterMonotonicity => 1,
        _ => 2,
    });
    let mut found = None;
    let checked = enumerate(fixture, cap, |a| {
        if order.iter().all(|&ax| check(ax, fixture, a).holds()) {
            found = Some(a.iter().map(|s| (*s).clone()).collect());
            false
        } else {
            true
        }
    })?;
    Ok(match found {
        Some(assignment) => Certificate::Compatible { assignment, checked },
        None => Certificate::Incompatible { checked },
    })
}

/// Compatibility of every axiom set containing Feasibility and Validity,
/// decided over a family of fixtures: a set is compatible when each fixture
/// admits an assignment satisfying all of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub minimal_incompatible: Vec<AxiomSet>,
    pub maximal_compatible: Vec<AxiomSet>,
}

pub fn axiom_lattice(fixtures: &[&Universe], cap: u64) -> Result<Lattice> {
    let mut achievable: Vec<BTreeSet<u16>> = Vec::new();
    for u in fixtures {
        let mut seen = BTreeSet::new();
        enumerate(u, cap, |a| {
            seen.insert(satisfied(u, a, AxiomSet::all()).bits());
            true
        })?;
        achievable.push(seen);
    }
    let base = AxiomSet::of(&[AxiomId::Feasibility, AxiomId::Validity]);
    let free: Vec<AxiomId> = AxiomId::ALL.into_iter().filter(|a| !base.contains(*a)).collect();
    let sets: Vec<AxiomSet> = (0u16..1 << free.len())
        .map(|pick| {
            let extra: Vec<AxiomId> = free.iter().enumerate().filter(|(j, _)| pick >> j & 1 == 1).map(|(_, &a)| a).collect();
            base.union(AxiomSet::of(&extra))
        })
        .collect();
    let compatible = |s: AxiomSet| achievable.iter().all(|seen| seen.iter().any(|&m| s.is_subset(AxiomSet::from_bits(m))));
    let (comp, incomp): (Vec<AxiomSet>, Vec<AxiomSet>) = sets.into_iter().partition(|&s| compatible(s));
    let mut minimal_incompatible: Vec<AxiomSet> =
        incomp.iter().copied().filter(|s| !incomp.iter().any(|t| t != s && t.is_subset(*s))).collect();
    let mut maximal_compatible: Vec<AxiomSet> =
        comp.iter().copied().filter(|s| !comp.iter().any(|t| t != s && s.is_subset(*t))).collect();
    minimal_incompatible.sort();
    maximal_compatible.sort();
    Ok(Lattice { minimal_incompatible, maximal_compatible })
}
