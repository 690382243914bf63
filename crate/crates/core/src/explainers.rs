//! Weak and subset-minimal abductive explanations, relative to a dataset or
//! to the whole feature space.
//!
//! A set `E ⊆ x` is a weak explanation of `x` over `D` when every `y ∈ D`
//! with `E ⊆ y` gets the same class as `x`. Validity is upward closed among
//! the subsets of `x`, which the enumerators below exploit: a subset mask is
//! valid iff it is contained in no agreement mask `agree(x, y)` of an
//! instance `y` of another class.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Question, Sample};
use crate::error::{Error, Result};
use crate::theory::{subsets_by_size, ClassId, Instance, PartialAssignment};

pub const DEFAULT_CAP: u64 = 1 << 20;

/// A canonically ordered set of explanations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExplanationSet(BTreeSet<PartialAssignment>);

impl ExplanationSet {
    pub fn new() -> Self {
        ExplanationSet::default()
    }

    pub fn insert(&mut self, e: PartialAssignment) -> bool {
        self.0.insert(e)
    }

    pub fn contains(&self, e: &PartialAssignment) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PartialAssignment> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &ExplanationSet) -> bool {
        self.0.is_subset(&other.0)
    }

    /// Members with no proper subset in the set.
    pub fn minimal(&self) -> ExplanationSet {
        self.iter()
            .filter(|e| !self.iter().any(|f| f != *e && f.is_subset_of(e)))
            .cloned()
            .collect()
    }
}

impl FromIterator<PartialAssignment> for ExplanationSet {
    fn from_iter<I: IntoIterator<Item = PartialAssignment>>(iter: I) -> Self {
        ExplanationSet(iter.into_iter().collect())
    }
}

impl IntoIterator for ExplanationSet {
    type Item = PartialAssignment;
    type IntoIter = std::collections::btree_set::IntoIter<PartialAssignment>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a ExplanationSet {
    type Item = &'a PartialAssignment;
    type IntoIter = std::collections::btree_set::Iter<'a, PartialAssignment>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Operation counts collected by the instrumented checks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScanStats {
    /// Single `E ⊆ y` tests against dataset instances.
    pub covers_checks: u64,
    /// Full passes over the dataset.
    pub dataset_passes: u64,
    /// Candidate explanations submitted to a membership test.
    pub candidate_tests: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwaxpCheck {
    Valid,
    /// `E` is not contained in the target.
    NotSubset,
    /// First dataset instance, by index, covered by `E` with another class.
    Refuted { witness: usize },
}

impl DwaxpCheck {
    pub fn is_valid(self) -> bool {
        self == DwaxpCheck::Valid
    }
}

/// One pass over the dataset: exactly `|D|` cover tests whenever `E ⊆ x`.
pub fn dwaxp_check(q: &Question, e: &PartialAssignment, stats: &mut ScanStats) -> DwaxpCheck {
    if !e.covers(q.target()) {
        return DwaxpCheck::NotSubset;
    }
    let sample = q.sample();
    let class = q.class();
    let mut witness = None;
    stats.dataset_passes += 1;
    for (i, y) in sample.dataset().instances().iter().enumerate() {
        stats.covers_checks += 1;
        if e.covers(y) && sample.label(i) != class && witness.is_none() {
            witness = Some(i);
        }
    }
    match witness {
        None => DwaxpCheck::Valid,
        Some(witness) => DwaxpCheck::Refuted { witness },
    }
}

pub fn is_dwaxp(q: &Question, e: &PartialAssignment) -> bool {
    dwaxp_check(q, e, &mut ScanStats::default()).is_valid()
}

/// An instance of `D` that refutes `E`, if any.
pub fn witness(q: &Question, e: &PartialAssignment) -> Option<usize> {
    match dwaxp_check(q, e, &mut ScanStats::default()) {
        DwaxpCheck::Refuted { witness } => Some(witness),
        _ => None,
    }
}

/// Agreement masks of `x` with every instance of another class, reduced to
/// the inclusion-maximal ones.
fn blocking_masks<'a, I>(x: &Instance, class: ClassId, others: I) -> Vec<u64>
where
    I: IntoIterator<Item = (&'a Instance, ClassId)>,
{
    let mut masks: Vec<u64> = others
        .into_iter()
        .filter(|(_, c)| *c != class)
        .map(|(y, _)| x.agreement_mask(y))
        .collect();
    masks.sort_unstable_by_key(|m| std::cmp::Reverse(m.count_ones()));
    masks.dedup();
    let mut maximal: Vec<u64> = Vec::new();
    for m in masks {
        if !maximal.iter().any(|&big| m & !big == 0) {
            maximal.push(m);
        }
    }
    maximal
}

fn is_valid_mask(mask: u64, blocking: &[u64]) -> bool {
    blocking.iter().all(|&b| mask & !b != 0)
}

/// Valid subset masks of the target in size-then-lex order.
pub fn dwaxp_masks(q: &Question, cap: u64) -> Result<Vec<u64>> {
    let sample = q.sample();
    let blocking = blocking_masks(
        q.target(),
        q.class(),
        sample.dataset().instances().iter().zip(sample.labels().iter().copied()),
    );
    let all = subsets_by_size(q.theory().n_features(), cap)?;
    Ok(all.into_iter().filter(|&m| is_valid_mask(m, &blocking)).collect())
}

pub fn all_dwaxp(q: &Question, cap: u64) -> Result<ExplanationSet> {
    let x = q.target();
    Ok(dwaxp_masks(q, cap)?.into_iter().map(|m| x.restrict(m)).collect())
}

/// Subset-minimal weak explanations over the dataset.
pub fn all_caxp(q: &Question, cap: u64) -> Result<ExplanationSet> {
    let x = q.target();
    let valid: BTreeSet<u64> = dwaxp_masks(q, cap)?.into_iter().collect();
    Ok(minimal_masks(&valid).map(|m| x.restrict(m)).collect())
}

fn minimal_masks(valid: &BTreeSet<u64>) -> impl Iterator<Item = u64> + '_ {
    valid.iter().copied().filter(move |&m| {
        let mut bits = m;
        while bits != 0 {
            let low = bits & bits.wrapping_neg();
            if valid.contains(&(m & !low)) {
                return false;
            }
            bits &= bits - 1;
        }
        true
    })
}

/// Deletion order `0, 1, …, n-1`.
pub fn ascending(n: usize) -> Vec<usize> {
    (0..n).collect()
}

pub fn descending(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

pub(crate) fn check_order(order: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &f in order {
        if f >= n || std::mem::replace(&mut seen[f], true) {
            return Err(Error::Contract(format!("deletion order must be a permutation of 0..{n}")));
        }
    }
    if order.len() != n {
        return Err(Error::Contract(format!("deletion order must be a permutation of 0..{n}")));
    }
    Ok(())
}

/// Greedy deletion: starting from the target, drop each feature in `order`
/// when the remainder stays a weak explanation. The result is subset-minimal.
pub fn find_caxp(q: &Question, order: &[usize]) -> Result<PartialAssignment> {
    find_caxp_counted(q, order, &mut ScanStats::default())
}

pub fn find_caxp_counted(q: &Question, order: &[usize], stats: &mut ScanStats) -> Result<PartialAssignment> {
    check_order(order, q.theory().n_features())?;
    let mut e = q.target().to_assignment();
    for &f in order {
        let candidate = e.without(f);
        stats.candidate_tests += 1;
        if dwaxp_check(q, &candidate, stats).is_valid() {
            e = candidate;
        }
    }
    Ok(e)
}

/// The question over the whole feature space, for `L_w` and `L_c`.
pub fn feature_space_question(q: &Question, cap: u64) -> Result<Question> {
    let sample = q.sample();
    let theory = sample.theory();
    let space = Dataset::from_instances(theory.feature_space(cap)?);
    let full = Sample::new(Arc::clone(theory), Arc::clone(sample.classifier()), Arc::new(space)).map_err(|e| match e {
        Error::Undefined(at) => Error::Contract(format!("classifier must be total on the feature space; undefined on {at}")),
        e => e,
    })?;
    full.question(q.target())
}

/// Weak explanations relative to the feature space.
pub fn lw_all(q: &Question, space_cap: u64, subset_cap: u64) -> Result<ExplanationSet> {
    all_dwaxp(&feature_space_question(q, space_cap)?, subset_cap)
}

/// Subset-minimal explanations relative to the feature space.
pub fn lc_all(q: &Question, space_cap: u64, subset_cap: u64) -> Result<ExplanationSet> {
    all_caxp(&feature_space_question(q, space_cap)?, subset_cap)
}

/// The target itself, as its only explanation.
pub fn trivial(q: &Question) -> ExplanationSet {
    std::iter::once(q.target().to_assignment()).collect()
}
