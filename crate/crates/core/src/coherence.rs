//! Coherent sets of explanations, envelopes and the irrefutable envelope.
//!
//! Two explanations conflict when their union is consistent while the
//! instances they cover carry different classes. An envelope of `(D, κ)` is
//! a conflict-free set of weak explanations that covers every instance of
//! `D`; the irrefutable envelope is the set of pool members that conflict
//! with no other pool member, and equals the intersection of all maximal
//! envelopes.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{Classifier, Question, Sample};
use crate::error::{Error, Result};
use crate::explainers::{all_dwaxp, check_order, dwaxp_check, DwaxpCheck, ExplanationSet, ScanStats};
use crate::theory::{ClassId, Instance, PartialAssignment, Theory};

/// Upper bound on pairwise conflict tests in [`irr_envelope`].
pub const PAIR_BUDGET: u64 = 1 << 28;

/// For each class, the first instance of `D` covered by `e` with that class.
fn class_profile(e: &PartialAssignment, sample: &Sample) -> Vec<Option<usize>> {
    let mut first = vec![None; sample.theory().n_classes()];
    for (i, y) in sample.dataset().instances().iter().enumerate() {
        let slot = &mut first[sample.label(i) as usize];
        if slot.is_none() && e.covers(y) {
            *slot = Some(i);
        }
    }
    first
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoherenceCheck {
    Coherent,
    /// `first ⊆ y`, `second ⊆ z`, `first ∪ second` consistent and
    /// `κ(y) ≠ κ(z)`, with `y`, `z` given as dataset indices.
    Incoherent { first: PartialAssignment, second: PartialAssignment, y: usize, z: usize },
}

impl CoherenceCheck {
    pub fn is_coherent(&self) -> bool {
        *self == CoherenceCheck::Coherent
    }
}

/// Checks every pair of members, distinct pairs first, then each member
/// against itself.
pub fn is_coherent_set(members: &[PartialAssignment], sample: &Sample) -> CoherenceCheck {
    let profiles: Vec<Vec<Option<usize>>> = members.iter().map(|e| class_profile(e, sample)).collect();
    let pairs = (0..members.len())
        .flat_map(|i| (i + 1..members.len()).map(move |j| (i, j)))
        .chain((0..members.len()).map(|i| (i, i)));
    for (i, j) in pairs {
        if !members[i].consistent_with(&members[j]) {
            continue;
        }
        for (ci, y) in profiles[i].iter().enumerate() {
            let Some(y) = y else { continue };
            for (cj, z) in profiles[j].iter().enumerate() {
                if let (true, Some(z)) = (ci != cj, z) {
                    return CoherenceCheck::Incoherent {
                        first: members[i].clone(),
                        second: members[j].clone(),
                        y: *y,
                        z: *z,
                    };
                }
            }
        }
    }
    CoherenceCheck::Coherent
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnvelopeCheck {
    Envelope,
    Incoherent(CoherenceCheck),
    /// A member is not a weak explanation of any dataset instance.
    NotExplanation(PartialAssignment),
    /// Dataset index of an instance that no member covers.
    Uncovered(usize),
}

impl EnvelopeCheck {
    pub fn is_envelope(&self) -> bool {
        *self == EnvelopeCheck::Envelope
    }
}

/// Coherence, then membership in the pool, then coverage.
pub fn is_envelope(members: &[PartialAssignment], sample: &Arc<Sample>) -> EnvelopeCheck {
    let coh = is_coherent_set(members, sample);
    if !coh.is_coherent() {
        return EnvelopeCheck::Incoherent(coh);
    }
    for e in members {
        let explains_some = sample
            .dataset()
            .instances()
            .iter()
            .enumerate()
            .filter(|(_, x)| e.covers(x))
            .any(|(i, _)| dwaxp_check(&sample.question_at(i), e, &mut ScanStats::default()).is_valid());
        if !explains_some {
            return EnvelopeCheck::NotExplanation(e.clone());
        }
    }
    for (i, x) in sample.dataset().instances().iter().enumerate() {
        if !members.iter().any(|e| e.covers(x)) {
            return EnvelopeCheck::Uncovered(i);
        }
    }
    EnvelopeCheck::Envelope
}

/// Weak explanations of all dataset instances, each with its class.
pub type DwaxpPool = BTreeMap<PartialAssignment, ClassId>;

pub fn build_pool(sample: &Arc<Sample>, cap: u64) -> Result<DwaxpPool> {
    let mut pool = DwaxpPool::new();
    for q in sample.questions() {
        for e in all_dwaxp(&q, cap)? {
            pool.insert(e, q.class());
        }
    }
    Ok(pool)
}

/// A validated envelope, bound to the sample it was built for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Envelope {
    members: BTreeMap<PartialAssignment, ClassId>,
    dataset_digest: String,
    classifier_digest: String,
}

impl Envelope {
    pub fn new(members: Vec<PartialAssignment>, sample: &Arc<Sample>) -> Result<Self> {
        match is_envelope(&members, sample) {
            EnvelopeCheck::Envelope => Ok(Envelope::unchecked(members, sample)),
            bad => Err(Error::Contract(format!("not an envelope: {bad:?}"))),
        }
    }

    fn unchecked(members: Vec<PartialAssignment>, sample: &Sample) -> Self {
        let members = members
            .into_iter()
            .map(|e| {
                let c = class_profile(&e, sample).iter().position(Option::is_some).expect("member covers an instance");
                (e, c as ClassId)
            })
            .collect();
        Envelope {
            members,
            dataset_digest: sample.dataset().digest(),
            classifier_digest: sample.classifier_digest(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, e: &PartialAssignment) -> bool {
        self.members.contains_key(e)
    }

    pub fn members(&self) -> impl Iterator<Item = &PartialAssignment> {
        self.members.keys()
    }

    pub fn labelled(&self) -> impl Iterator<Item = (&PartialAssignment, ClassId)> {
        self.members.iter().map(|(e, &c)| (e, c))
    }

    pub fn to_set(&self) -> ExplanationSet {
        self.members.keys().cloned().collect()
    }

    pub fn is_for(&self, sample: &Sample) -> bool {
        self.dataset_digest == sample.dataset().digest() && self.classifier_digest == sample.classifier_digest()
    }
}

/// Pool members in conflict with no pool member.
pub fn irr_envelope(sample: &Arc<Sample>, cap: u64) -> Result<Envelope> {
    let pool = build_pool(sample, cap)?;
    let p = pool.len() as u64;
    if p.saturating_mul(p) > PAIR_BUDGET {
        return Err(Error::Capacity { what: "pool conflict pairs", needed: format!("{p}^2"), cap: PAIR_BUDGET });
    }
    let entries: Vec<(&PartialAssignment, ClassId)> = pool.iter().map(|(e, &c)| (e, c)).collect();
    let members = entries
        .iter()
        .filter(|(e, c)| !entries.iter().any(|(f, d)| d != c && e.consistent_with(f)))
        .map(|(e, _)| (*e).clone())
        .collect();
    Ok(Envelope::unchecked(members, sample))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrrefutableCheck {
    Irrefutable,
    NotExplanation(DwaxpCheck),
    /// `counter` is a weak explanation of dataset instance `instance`, has
    /// another class and is consistent with the candidate.
    Refuted { instance: usize, counter: PartialAssignment },
}

impl IrrefutableCheck {
    pub fn is_irrefutable(&self) -> bool {
        *self == IrrefutableCheck::Irrefutable
    }
}

/// Membership in the irrefutable envelope without building the pool.
///
/// For each `x'` of another class it is enough to test the largest subset of
/// `x'` consistent with `E`: any weak explanation of `x'` consistent with `E`
/// lies inside it, and supersets within `x'` stay valid.
pub fn irrefutable_check(q: &Question, e: &PartialAssignment, stats: &mut ScanStats) -> IrrefutableCheck {
    let own = dwaxp_check(q, e, stats);
    if !own.is_valid() {
        return IrrefutableCheck::NotExplanation(own);
    }
    let x = q.target();
    let class = q.class();
    let fixed = e.features_mask();
    let full = if x.len() == 64 { u64::MAX } else { (1u64 << x.len()) - 1 };
    for (i, other) in q.dataset().instances().iter().enumerate() {
        if q.sample().label(i) == class {
            continue;
        }
        let clash = fixed & !x.agreement_mask(other) & full;
        let counter = other.restrict(full & !clash);
        stats.candidate_tests += 1;
        if dwaxp_check(&q.retarget(i), &counter, stats).is_valid() {
            return IrrefutableCheck::Refuted { instance: i, counter };
        }
    }
    IrrefutableCheck::Irrefutable
}

pub fn is_irrefutable(q: &Question, e: &PartialAssignment) -> bool {
    irrefutable_check(q, e, &mut ScanStats::default()).is_irrefutable()
}

/// Members of the irrefutable envelope contained in the target.
pub fn lir_explain(q: &Question, cap: u64) -> Result<ExplanationSet> {
    coherent_from_envelope(&irr_envelope(q.sample(), cap)?, q)
}

/// Greedy deletion under the irrefutability test. Irrefutability is upward
/// closed among subsets of the target, so the result is subset-minimal.
pub fn find_minimal_irrefutable(q: &Question, order: &[usize]) -> Result<PartialAssignment> {
    check_order(order, q.theory().n_features())?;
    let mut e = q.target().to_assignment();
    for &f in order {
        let candidate = e.without(f);
        if is_irrefutable(q, &candidate) {
            e = candidate;
        }
    }
    Ok(e)
}

/// `L_co`: members of `envelope` contained in the target.
pub fn coherent_from_envelope(envelope: &Envelope, q: &Question) -> Result<ExplanationSet> {
    if !envelope.is_for(q.sample()) {
        return Err(Error::Contract("envelope was built for a different dataset or classifier".into()));
    }
    let x = q.target();
    Ok(envelope.members().filter(|e| e.covers(x)).cloned().collect())
}

/// Pool entries and, per entry, the entries it does not conflict with.
struct ConflictGraph {
    entries: Vec<PartialAssignment>,
    compatible: Vec<u64>,
}

impl ConflictGraph {
    fn new(sample: &Arc<Sample>, cap: u64) -> Result<Self> {
        let pool = build_pool(sample, cap)?;
        let p = pool.len();
        if p >= 63 || (1u64 << p) > cap {
            return Err(Error::Capacity { what: "envelope enumeration", needed: format!("2^{p}"), cap });
        }
        let entries: Vec<(PartialAssignment, ClassId)> = pool.into_iter().collect();
        let compatible = entries
            .iter()
            .enumerate()
            .map(|(i, (e, c))| {
                entries
                    .iter()
                    .enumerate()
                    .filter(|(j, (f, d))| *j != i && (c == d || !e.consistent_with(f)))
                    .fold(0u64, |m, (j, _)| m | 1 << j)
            })
            .collect();
        Ok(ConflictGraph { entries: entries.into_iter().map(|(e, _)| e).collect(), compatible })
    }

    fn members(&self, set: u64) -> Vec<PartialAssignment> {
        (0..self.entries.len()).filter(|i| set >> i & 1 == 1).map(|i| self.entries[i].clone()).collect()
    }

    fn is_independent(&self, set: u64) -> bool {
        (0..self.entries.len()).filter(|i| set >> i & 1 == 1).all(|i| set & !(self.compatible[i] | 1 << i) == 0)
    }

    /// Bron–Kerbosch with pivoting on the compatibility graph.
    fn maximal_independent(&self) -> Vec<u64> {
        fn go(g: &ConflictGraph, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
            if p == 0 && x == 0 {
                out.push(r);
                return;
            }
            let pivot = (0..g.entries.len())
                .filter(|u| (p | x) >> u & 1 == 1)
                .max_by_key(|&u| (p & g.compatible[u]).count_ones())
                .expect("p or x is nonempty");
            let mut candidates = p & !g.compatible[pivot];
            while candidates != 0 {
                let v = candidates.trailing_zeros() as usize;
                candidates &= candidates - 1;
                go(g, r | 1 << v, p & g.compatible[v], x & g.compatible[v], out);
                p &= !(1 << v);
                x |= 1 << v;
            }
        }
        let all = if self.entries.is_empty() { 0 } else { u64::MAX >> (64 - self.entries.len()) };
        let mut out = Vec::new();
        go(self, 0, all, 0, &mut out);
        out
    }
}

/// Every envelope of the sample, by exhaustive search over pool subsets.
pub fn all_envelopes(sample: &Arc<Sample>, cap: u64) -> Result<Vec<Envelope>> {
    let g = ConflictGraph::new(sample, cap)?;
    let mut out: Vec<Envelope> = (0..1u64 << g.entries.len())
        .filter(|&s| g.is_independent(s))
        .map(|s| g.members(s))
        .filter(|m| is_envelope(m, sample).is_envelope())
        .map(|m| Envelope::unchecked(m, sample))
        .collect();
    out.sort_by_key(|a| a.to_set());
    Ok(out)
}

/// Inclusion-maximal envelopes. Dataset instances are never in conflict,
/// so every maximal conflict-free subset of the pool covers `D`.
pub fn maximal_envelopes(sample: &Arc<Sample>, cap: u64) -> Result<Vec<Envelope>> {
    let g = ConflictGraph::new(sample, cap)?;
    let mut out: Vec<Envelope> = g
        .maximal_independent()
        .into_iter()
        .map(|s| Envelope::unchecked(g.members(s), sample))
        .collect();
    out.sort_by_key(|a| a.to_set());
    Ok(out)
}

/// Deterministic maximal envelope: the dataset instances, then every pool
/// member in canonical order that conflicts with nothing chosen so far.
pub fn greedy_envelope(sample: &Arc<Sample>, cap: u64) -> Result<Envelope> {
    let pool = build_pool(sample, cap)?;
    let mut chosen: Vec<(PartialAssignment, ClassId)> = sample
        .dataset()
        .instances()
        .iter()
        .zip(sample.labels())
        .map(|(x, &c)| (x.to_assignment(), c))
        .collect();
    for (e, c) in pool {
        if chosen.iter().any(|(f, _)| *f == e) {
            continue;
        }
        if chosen.iter().all(|(f, d)| *d == c || !e.consistent_with(f)) {
            chosen.push((e, c));
        }
    }
    Ok(Envelope::unchecked(chosen.into_iter().map(|(e, _)| e).collect(), sample))
}

/// Envelope used by the `L_co` explainer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvelopeChoice {
    /// The dataset itself.
    Dataset,
    /// The irrefutable envelope.
    Irrefutable,
    /// See [`greedy_envelope`].
    Greedy,
}

pub fn choose_envelope(choice: EnvelopeChoice, sample: &Arc<Sample>, cap: u64) -> Result<Envelope> {
    match choice {
        EnvelopeChoice::Dataset => Ok(Envelope::unchecked(
            sample.dataset().instances().iter().map(Instance::to_assignment).collect(),
            sample,
        )),
        EnvelopeChoice::Irrefutable => irr_envelope(sample, cap),
        EnvelopeChoice::Greedy => greedy_envelope(sample, cap),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRule {
    /// Disjunction of conjunctive premises.
    pub premises: Vec<PartialAssignment>,
    pub class: ClassId,
}

/// First matching rule wins; otherwise the default class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionList {
    pub rules: Vec<DecisionRule>,
    pub default: ClassId,
}

impl DecisionList {
    pub fn classify(&self, y: &Instance) -> ClassId {
        self.rules
            .iter()
            .find(|r| r.premises.iter().any(|p| p.covers(y)))
            .map_or(self.default, |r| r.class)
    }

    pub fn to_text(&self, theory: &Theory) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let lhs: Vec<String> = r.premises.iter().map(|p| theory.show(p)).collect();
            out.push_str(&format!("{} -> {}\n", lhs.join(" | "), theory.class_name(r.class)));
        }
        out.push_str(&format!("default: {}\n", theory.class_name(self.default)));
        out
    }

    pub fn from_text(theory: &Theory, text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        let mut default = None;
        for (n, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let bad = |m: &str| Error::Format { line: n + 1, message: m.to_string() };
            if let Some(c) = line.trim().strip_prefix("default:") {
                default = Some(theory.class_index(c.trim())?);
                continue;
            }
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| bad("expected `premises -> class`"))?;
            let premises = lhs.split('|').map(|p| theory.parse_assignment(p)).collect::<Result<_>>()?;
            rules.push(DecisionRule { premises, class: theory.class_index(rhs.trim())? });
        }
        Ok(DecisionList { rules, default: default.ok_or_else(|| Error::Format { line: 0, message: "missing default".into() })? })
    }
}

impl Classifier for DecisionList {
    fn predict(&self, x: &Instance) -> Result<ClassId> {
        Ok(self.classify(x))
    }
}

/// Decision list induced by an envelope: one rule per dataset instance whose
/// premises are the members covering it, redundant premises and repeated
/// rules removed. It agrees with the classifier on `D` and its weak
/// explanations over the feature space contain the envelope members.
pub fn sigma_from_envelope(envelope: &Envelope, sample: &Sample) -> Result<DecisionList> {
    if !envelope.is_for(sample) {
        return Err(Error::Contract("envelope was built for a different dataset or classifier".into()));
    }
    let mut rules: Vec<DecisionRule> = Vec::new();
    for (i, x) in sample.dataset().instances().iter().enumerate() {
        let covering: Vec<&PartialAssignment> = envelope.members().filter(|e| e.covers(x)).collect();
        let premises: Vec<PartialAssignment> = covering
            .iter()
            .filter(|e| !covering.iter().any(|f| f != *e && f.is_subset_of(e)))
            .map(|e| (*e).clone())
            .collect();
        let rule = DecisionRule { premises, class: sample.label(i) };
        if !rules.contains(&rule) {
            rules.push(rule);
        }
    }
    Ok(DecisionList { rules, default: 0 })
}
