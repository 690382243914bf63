//! Formal properties of explainers and a harness that checks them over
//! finite universes of questions.
//!
//! An explainer is evaluated once per question of a [`Universe`]; each axiom
//! is then checked against the resulting assignment of explanation sets.
//! Violations come with a [`Counterexample`] that can be replayed directly
//! against the axiom's formula.

mod check;
mod fixtures;
mod matrix;
mod search;
mod universe;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::coherence::{choose_envelope, coherent_from_envelope, lir_explain, EnvelopeChoice};
use crate::data::{Classifier, Dataset, Question, Sample};
use crate::error::{Error, Result};
use crate::explainers::{all_caxp, all_dwaxp, lc_all, lw_all, trivial, ExplanationSet, DEFAULT_CAP};
use crate::surrogate::{fit_surrogate, lsu_explain, DecisionTree, Id3Config};

pub use check::{check, check_axiom, implication_failures, satisfied, Counterexample, Verdict};
pub use fixtures::{fixture, fixtures, incompatibility_fixture, Fixture};
pub use matrix::{axiom_matrix, expected_matrix, Expectation, MatrixCell, MatrixReport, Outcome};
pub use search::{axiom_lattice, check_incompatibility, Certificate, Lattice};
pub use universe::{Context, Entry, Universe};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AxiomId {
    Feasibility,
    Validity,
    Success,
    Coherence,
    Irreducibility,
    StrongIrreducibility,
    Completeness,
    StrongCompleteness,
    Monotonicity,
    CounterMonotonicity,
}

impl AxiomId {
    pub const ALL: [AxiomId; 10] = [
        AxiomId::Feasibility,
        AxiomId::Validity,
        AxiomId::Success,
        AxiomId::Coherence,
        AxiomId::Irreducibility,
        AxiomId::StrongIrreducibility,
        AxiomId::Completeness,
        AxiomId::StrongCompleteness,
        AxiomId::Monotonicity,
        AxiomId::CounterMonotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AxiomId::Feasibility => "Feasibility",
            AxiomId::Validity => "Validity",
            AxiomId::Success => "Success",
            AxiomId::Coherence => "Coherence",
            AxiomId::Irreducibility => "Irreducibility",
            AxiomId::StrongIrreducibility => "StrongIrreducibility",
            AxiomId::Completeness => "Completeness",
            AxiomId::StrongCompleteness => "StrongCompleteness",
            AxiomId::Monotonicity => "Monotonicity",
            AxiomId::CounterMonotonicity => "CounterMonotonicity",
        }
    }

    fn bit(self) -> u16 {
        1 << AxiomId::ALL.iter().position(|&a| a == self).expect("listed")
    }
}

impl fmt::Display for AxiomId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AxiomId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace(['-', '_', ' '], "");
        AxiomId::ALL
            .into_iter()
            .find(|a| a.name().to_ascii_lowercase() == key || (key == "cm" && *a == AxiomId::CounterMonotonicity))
            .ok_or_else(|| Error::Selector(format!("unknown axiom `{s}`")))
    }
}

/// A set of axioms.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AxiomSet(u16);

impl AxiomSet {
    pub fn of(axioms: &[AxiomId]) -> Self {
        AxiomSet(axioms.iter().fold(0, |m, a| m | a.bit()))
    }

    pub fn all() -> Self {
        AxiomSet::of(&AxiomId::ALL)
    }

    pub fn contains(self, a: AxiomId) -> bool {
        self.0 & a.bit() != 0
    }

    pub fn insert(&mut self, a: AxiomId) {
        self.0 |= a.bit();
    }

    pub fn is_subset(self, other: AxiomSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: AxiomSet) -> AxiomSet {
        AxiomSet(self.0 | other.0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = AxiomId> {
        AxiomId::ALL.into_iter().filter(move |a| self.contains(*a))
    }

    pub(crate) fn bits(self) -> u16 {
        self.0
    }

    pub(crate) fn from_bits(bits: u16) -> Self {
        AxiomSet(bits & AxiomSet::all().0)
    }
}

impl fmt::Display for AxiomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(AxiomId::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

/// The five incompatible axiom sets.
pub fn incompatible_sets() -> Vec<(&'static str, AxiomSet)> {
    use AxiomId::*;
    vec![
        ("I1", AxiomSet::of(&[Feasibility, Success, Coherence, Irreducibility])),
        ("I2", AxiomSet::of(&[Feasibility, Coherence, Completeness])),
        ("I3", AxiomSet::of(&[StrongIrreducibility, StrongCompleteness])),
        ("I4", AxiomSet::of(&[Feasibility, Validity, Success, Irreducibility, Monotonicity])),
        ("I5", AxiomSet::of(&[Feasibility, Validity, Success, Irreducibility, CounterMonotonicity])),
    ]
}

/// The five compatible axiom sets.
pub fn compatible_sets() -> Vec<(&'static str, AxiomSet)> {
    use AxiomId::*;
    vec![
        ("C1", AxiomSet::of(&[Feasibility, Validity, Success, Completeness, StrongCompleteness, CounterMonotonicity])),
        ("C2", AxiomSet::of(&[Feasibility, Validity, Success, Irreducibility, StrongIrreducibility])),
        (
            "C3",
            AxiomSet::of(&[Feasibility, Validity, Success, Coherence, Monotonicity, CounterMonotonicity, StrongCompleteness]),
        ),
        (
            "C4",
            AxiomSet::of(&[Feasibility, Validity, Success, Coherence, Monotonicity, CounterMonotonicity, StrongIrreducibility]),
        ),
        (
            "C5",
            AxiomSet::of(&[
                Feasibility,
                Validity,
                Coherence,
                Irreducibility,
                StrongIrreducibility,
                Monotonicity,
                CounterMonotonicity,
            ]),
        ),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExplainerId {
    /// Weak explanations over the feature space.
    Lw,
    /// Minimal explanations over the feature space.
    Lc,
    /// Weak explanations over the dataset.
    Ldw,
    /// Minimal explanations over the dataset.
    Ldc,
    /// Members of a chosen envelope contained in the target.
    Lco(EnvelopeChoice),
    /// The target alone.
    Ltr,
    /// Members of the irrefutable envelope contained in the target.
    Lir,
    /// Weak explanations of an ID3 surrogate over the feature space.
    Lsu,
}

impl ExplainerId {
    /// Explainers with a column in the reference matrix.
    pub const TABLE: [ExplainerId; 8] = [
        ExplainerId::Lw,
        ExplainerId::Lc,
        ExplainerId::Ldw,
        ExplainerId::Ldc,
        ExplainerId::Lco(EnvelopeChoice::Greedy),
        ExplainerId::Ltr,
        ExplainerId::Lir,
        ExplainerId::Lsu,
    ];

    pub fn name(self) -> String {
        match self {
            ExplainerId::Lw => "Lw".into(),
            ExplainerId::Lc => "Lc".into(),
            ExplainerId::Ldw => "Ldw".into(),
            ExplainerId::Ldc => "Ldc".into(),
            ExplainerId::Lco(EnvelopeChoice::Greedy) => "Lco".into(),
            ExplainerId::Lco(c) => format!("Lco[{c:?}]"),
            ExplainerId::Ltr => "Ltr".into(),
            ExplainerId::Lir => "Lir".into(),
            ExplainerId::Lsu => "Lsu".into(),
        }
    }
}

impl fmt::Display for ExplainerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for ExplainerId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = match s.to_ascii_lowercase().as_str() {
            "lw" => ExplainerId::Lw,
            "lc" => ExplainerId::Lc,
            "ldw" => ExplainerId::Ldw,
            "ldc" => ExplainerId::Ldc,
            "lco" => ExplainerId::Lco(EnvelopeChoice::Greedy),
            "ltr" => ExplainerId::Ltr,
            "lir" => ExplainerId::Lir,
            "lsu" => ExplainerId::Lsu,
            _ => return Err(Error::Selector(format!("unknown explainer `{s}`"))),
        };
        Ok(id)
    }
}

pub trait Explainer: Send + Sync {
    fn name(&self) -> String;
    fn explain(&self, q: &Question) -> Result<ExplanationSet>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub subsets: u64,
    pub space: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { subsets: DEFAULT_CAP, space: DEFAULT_CAP }
    }
}

/// Where `L_su` gets its surrogate from.
#[derive(Clone)]
pub enum SurrogateSource {
    Id3(Id3Config),
    /// Fixed surrogates, keyed by dataset; they must be total.
    Pinned(Vec<(Arc<Dataset>, Arc<dyn Classifier>)>),
}

enum Fitted {
    Tree(Arc<DecisionTree>),
    Pinned(Arc<dyn Classifier>),
}

/// The standard explainers. Per-sample work (surrogate fits, envelopes) is
/// cached by dataset and classifier digest.
pub struct StandardExplainer {
    id: ExplainerId,
    caps: Caps,
    surrogate: SurrogateSource,
    trees: Mutex<HashMap<(String, String), Arc<Fitted>>>,
    envelopes: Mutex<HashMap<(String, String), Arc<crate::coherence::Envelope>>>,
}

impl StandardExplainer {
    pub fn new(id: ExplainerId) -> Self {
        StandardExplainer::with(id, Caps::default(), SurrogateSource::Id3(Id3Config::default()))
    }

    pub fn with(id: ExplainerId, caps: Caps, surrogate: SurrogateSource) -> Self {
        StandardExplainer { id, caps, surrogate, trees: Mutex::default(), envelopes: Mutex::default() }
    }

    pub fn id(&self) -> ExplainerId {
        self.id
    }

    fn key(sample: &Sample) -> (String, String) {
        (sample.dataset().digest(), sample.classifier_digest())
    }

    fn surrogate(&self, sample: &Arc<Sample>) -> Result<Arc<Fitted>> {
        let key = StandardExplainer::key(sample);
        if let Some(f) = self.trees.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(f));
        }
        let fitted = match &self.surrogate {
            SurrogateSource::Id3(cfg) => Fitted::Tree(Arc::new(fit_surrogate(sample, *cfg)?)),
            SurrogateSource::Pinned(table) => {
                let (_, sigma) = table
                    .iter()
                    .find(|(d, _)| d.digest() == key.0)
                    .ok_or_else(|| Error::Contract("no pinned surrogate for this dataset".into()))?;
                Fitted::Pinned(Arc::clone(sigma))
            }
        };
        let fitted = Arc::new(fitted);
        self.trees.lock().expect("cache lock").insert(key, Arc::clone(&fitted));
        Ok(fitted)
    }

    fn envelope(&self, choice: EnvelopeChoice, sample: &Arc<Sample>) -> Result<Arc<crate::coherence::Envelope>> {
        let key = StandardExplainer::key(sample);
        if let Some(e) = self.envelopes.lock().expect("cache lock").get(&key) {
            return Ok(Arc::clone(e));
        }
        let env = Arc::new(choose_envelope(choice, sample, self.caps.subsets)?);
        self.envelopes.lock().expect("cache lock").insert(key, Arc::clone(&env));
        Ok(env)
    }
}

impl Explainer for StandardExplainer {
    fn name(&self) -> String {
        self.id.name()
    }

    fn explain(&self, q: &Question) -> Result<ExplanationSet> {
        let caps = self.caps;
        match self.id {
            ExplainerId::Lw => lw_all(q, caps.space, caps.subsets),
            ExplainerId::Lc => lc_all(q, caps.space, caps.subsets),
            ExplainerId::Ldw => all_dwaxp(q, caps.subsets),
            ExplainerId::Ldc => all_caxp(q, caps.subsets),
            ExplainerId::Ltr => Ok(trivial(q)),
            ExplainerId::Lir => lir_explain(q, caps.subsets),
            ExplainerId::Lco(choice) => coherent_from_envelope(&*self.envelope(choice, q.sample())?, q),
            ExplainerId::Lsu => match &*self.surrogate(q.sample())? {
                Fitted::Tree(tree) => lsu_explain(q, tree, caps.subsets),
                Fitted::Pinned(sigma) => {
                    let space = Dataset::from_instances(q.theory().feature_space(caps.space)?);
                    let sq = Sample::new(Arc::clone(q.sample().theory()), Arc::clone(sigma), Arc::new(space))?
                        .question(q.target())?;
                    all_dwaxp(&sq, caps.subsets)
                }
            },
        }
    }
}
