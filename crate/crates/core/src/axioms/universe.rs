use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::data::{Classifier, Dataset, Question, Sample, TableClassifier};
use crate::error::{Error, Result};
use crate::explainers::{ExplanationSet, DEFAULT_CAP};
use crate::theory::{ClassId, Instance, Theory};

use super::Explainer;

/// One classifier together with the datasets it is questioned on.
#[derive(Clone)]
pub struct Context {
    pub label: String,
    pub classifier: Arc<dyn Classifier>,
    pub datasets: Vec<Arc<Dataset>>,
    /// Restricts the questions to these targets; all instances otherwise.
    pub targets: Option<Vec<Instance>>,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub question: Question,
    pub context: usize,
    pub dataset: usize,
}

/// A finite family of questions over one theory.
///
/// Questions sharing a classifier and a dataset form a coherence group;
/// pairs of questions with the same classifier and target whose datasets are
/// nested form the growth pairs used by the monotonicity axioms.
pub struct Universe {
    pub name: String,
    theory: Arc<Theory>,
    contexts: Vec<Context>,
    entries: Vec<Entry>,
    groups: Vec<Vec<usize>>,
    growth: Vec<(usize, usize)>,
    space: Option<Vec<Instance>>,
    space_labels: Vec<Option<Vec<ClassId>>>,
}

impl Universe {
    pub fn new(name: impl Into<String>, theory: Arc<Theory>, contexts: Vec<Context>) -> Result<Self> {
        let name = name.into();
        let space: Option<Vec<Instance>> = theory.feature_space(DEFAULT_CAP).ok().map(Iterator::collect);
        let mut entries = Vec::new();
        let mut groups = Vec::new();
        let mut growth = Vec::new();
        let mut space_labels = Vec::new();
        for (ci, ctx) in contexts.iter().enumerate() {
            space_labels.push(space.as_ref().and_then(|sp| {
                sp.iter().map(|y| ctx.classifier.predict(y)).collect::<Result<Vec<_>>>().ok()
            }));
            let mut by_dataset: Vec<Vec<usize>> = Vec::new();
            for (di, d) in ctx.datasets.iter().enumerate() {
                let mut group = Vec::new();
                if !d.is_empty() {
                    let sample = Sample::new(Arc::clone(&theory), Arc::clone(&ctx.classifier), Arc::clone(d))?;
                    for (ti, x) in d.instances().iter().enumerate() {
                        if ctx.targets.as_ref().is_none_or(|ts| ts.contains(x)) {
                            group.push(entries.len());
                            entries.push(Entry { question: sample.question_at(ti), context: ci, dataset: di });
                        }
                    }
                }
                if !group.is_empty() {
                    groups.push(group.clone());
                }
                by_dataset.push(group);
            }
            for (a, da) in ctx.datasets.iter().enumerate() {
                for (b, db) in ctx.datasets.iter().enumerate() {
                    if a == b || !da.is_subset_of(db) {
                        continue;
                    }
                    for &qa in &by_dataset[a] {
                        let x = entries[qa].question.target();
                        if let Some(&qb) = by_dataset[b].iter().find(|&&qb| entries[qb].question.target() == x) {
                            growth.push((qa, qb));
                        }
                    }
                }
            }
        }
        if entries.is_empty() {
            return Err(Error::Contract(format!("universe `{name}` has no questions")));
        }
        Ok(Universe { name, theory, contexts, entries, groups, growth, space, space_labels })
    }

    /// Two boolean features, two classes: every classifier on every
    /// nonempty dataset, every target.
    pub fn desk() -> Self {
        let theory = Arc::new(Theory::boolean(2, 2).expect("valid theory"));
        let space: Vec<Instance> = theory.feature_space(4).expect("tiny").collect();
        let datasets: Vec<Arc<Dataset>> = (1u32..16)
            .map(|m| Arc::new(Dataset::from_instances((0..4).filter(|j| m >> j & 1 == 1).map(|j| space[j].clone()))))
            .collect();
        let contexts = (0u32..16)
            .map(|b| {
                let table = TableClassifier::from_pairs(space.iter().enumerate().map(|(j, y)| (y.clone(), b >> j & 1)))
                    .expect("distinct instances");
                Context {
                    label: format!("kappa{b:04b}"),
                    classifier: Arc::new(table),
                    datasets: datasets.clone(),
                    targets: None,
                }
            })
            .collect();
        Universe::new("desk", theory, contexts).expect("nonempty universe")
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.theory
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn question(&self, i: usize) -> &Question {
        &self.entries[i].question
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn growth_pairs(&self) -> &[(usize, usize)] {
        &self.growth
    }

    /// Feature space with the labels of the classifier of `context`, when
    /// that classifier is total and the space is small enough.
    pub fn labelled_space(&self, context: usize) -> Option<(&[Instance], &[ClassId])> {
        match (&self.space, &self.space_labels[context]) {
            (Some(s), Some(l)) => Some((s, l)),
            _ => None,
        }
    }

    pub fn evaluate(&self, explainer: &dyn Explainer) -> Result<Vec<ExplanationSet>> {
        self.entries.iter().map(|e| explainer.explain(&e.question)).collect()
    }

    /// Digest over every question and, where the space is enumerable, every
    /// classifier's labels on it.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(e.question.digest());
        }
        for labels in self.space_labels.iter().flatten() {
            for c in labels {
                h.update(c.to_le_bytes());
            }
        }
        format!("{:x}", h.finalize())
    }

    pub fn describe(&self, i: usize) -> String {
        let e = &self.entries[i];
        let q = &e.question;
        let d: Vec<String> = q.dataset().instances().iter().map(|x| format!("({})", self.theory.show_instance(x))).collect();
        format!(
            "{} D={{{}}} x=({})",
            self.contexts[e.context].label,
            d.join(" "),
            self.theory.show_instance(q.target())
        )
    }
}
