use serde::Serialize;

use crate::error::Result;
use crate::explainers::ExplanationSet;
use crate::theory::{subsets_by_size, ClassId, Instance, Literal, PartialAssignment};

use super::{AxiomId, AxiomSet, Explainer, Universe};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub axiom: AxiomId,
    /// Universe index of the offending question.
    pub question: usize,
    /// Second question, for the axioms relating two questions.
    pub other_question: Option<usize>,
    pub explanation: Option<PartialAssignment>,
    pub other_explanation: Option<PartialAssignment>,
    pub literal: Option<Literal>,
    pub witness: Option<Instance>,
}

impl Counterexample {
    fn new(axiom: AxiomId, question: usize) -> Self {
        Counterexample {
            axiom,
            question,
            other_question: None,
            explanation: None,
            other_explanation: None,
            literal: None,
            witness: None,
        }
    }

    fn explanation(mut self, e: &PartialAssignment) -> Self {
        self.explanation = Some(e.clone());
        self
    }

    pub fn describe(&self, u: &Universe) -> String {
        let t = u.theory();
        let mut s = format!("{} violated at [{}]", self.axiom, u.describe(self.question));
        if let Some(o) = self.other_question {
            s.push_str(&format!(" vs [{}]", u.describe(o)));
        }
        if let Some(e) = &self.explanation {
            s.push_str(&format!(" E={{{}}}", t.show(e).trim_matches(['{', '}'])));
        }
        if let Some(e) = &self.other_explanation {
            s.push_str(&format!(" E'={{{}}}", t.show(e).trim_matches(['{', '}'])));
        }
        if let Some(l) = self.literal {
            s.push_str(&format!(" literal {}", t.show_literal(l)));
        }
        if let Some(w) = &self.witness {
            s.push_str(&format!(" witness ({})", t.show_instance(w)));
        }
        s
    }

    /// Re-derives the violation from the axiom's formula alone.
    pub fn replay(&self, u: &Universe, assignment: &[&ExplanationSet]) -> bool {
        let q = self.question;
        let x = u.question(q).target();
        let in_l = |i: usize, e: &PartialAssignment| assignment[i].contains(e);
        let e = self.explanation.as_ref();
        match self.axiom {
            AxiomId::Feasibility => e.is_some_and(|e| in_l(q, e) && !e.covers(x)),
            AxiomId::Validity => match (e, &self.witness) {
                (Some(e), Some(y)) => {
                    let qq = u.question(q);
                    in_l(q, e)
                        && e.covers(y)
                        && qq.dataset().position(y).is_some_and(|i| qq.sample().label(i) != qq.class())
                }
                _ => false,
            },
            AxiomId::Success => assignment[q].is_empty(),
            AxiomId::Coherence => match (self.other_question, e, &self.other_explanation) {
                (Some(o), Some(e), Some(f)) => {
                    u.groups().iter().any(|g| g.contains(&q) && g.contains(&o))
                        && u.question(q).class() != u.question(o).class()
                        && in_l(q, e)
                        && in_l(o, f)
                        && e.consistent_with(f)
                }
                _ => false,
            },
            AxiomId::Irreducibility | AxiomId::StrongIrreducibility => match (e, self.literal) {
                (Some(e), Some(l)) => {
                    let strong = self.axiom == AxiomId::StrongIrreducibility;
                    in_l(q, e) && e.contains(l) && opposite_cover(u, q, &e.without(l.feature), strong) == Some(None)
                }
                _ => false,
            },
            AxiomId::Completeness | AxiomId::StrongCompleteness => e.is_some_and(|e| {
                let strong = self.axiom == AxiomId::StrongCompleteness;
                e.covers(x) && !in_l(q, e) && opposite_cover(u, q, e, strong) == Some(None)
            }),
            AxiomId::Monotonicity | AxiomId::CounterMonotonicity => match (self.other_question, e) {
                (Some(o), Some(e)) => {
                    let (from, to) = if self.axiom == AxiomId::Monotonicity { (q, o) } else { (o, q) };
                    u.growth_pairs().contains(&(q, o)) && in_l(from, e) && !in_l(to, e)
                }
                _ => false,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Holds,
    Violated(Box<Counterexample>),
    /// The axiom needs labels on the whole feature space and the classifier
    /// does not provide them.
    Inapplicable(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        *self == Verdict::Holds
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Violated(c) => Some(c),
            _ => None,
        }
    }
}

/// `Some(Some(y))`: an instance of another class covering `e`, in the
/// dataset or, if `strong`, in the feature space. `Some(None)`: there is none.
/// `None`: the feature space is unavailable.
fn opposite_cover(u: &Universe, q: usize, e: &PartialAssignment, strong: bool) -> Option<Option<Instance>> {
    let entry = &u.entries()[q];
    let class = entry.question.class();
    let find = |pts: &[Instance], labels: &[ClassId]| {
        pts.iter().zip(labels).find(|(y, &c)| c != class && e.covers(y)).map(|(y, _)| y.clone())
    };
    if strong {
        let (pts, labels) = u.labelled_space(entry.context)?;
        Some(find(pts, labels))
    } else {
        let s = entry.question.sample();
        Some(find(s.dataset().instances(), s.labels()))
    }
}

/// Checks one axiom against an assignment of explanation sets to the
/// questions of `u`. The first violation in question order is reported.
pub fn check(axiom: AxiomId, u: &Universe, assignment: &[&ExplanationSet]) -> Verdict {
    assert_eq!(assignment.len(), u.len(), "one explanation set per question");
    let strong = matches!(axiom, AxiomId::StrongIrreducibility | AxiomId::StrongCompleteness);
    if strong {
        if let Some(e) = u.entries().iter().find(|e| u.labelled_space(e.context).is_none()) {
            return Verdict::Inapplicable(format!(
                "classifier `{}` is not total on an enumerable feature space",
                u.contexts()[e.context].label
            ));
        }
    }
    let violated = |c: Counterexample| Verdict::Violated(Box::new(c));
    match axiom {
        AxiomId::Feasibility => {
            for (q, l) in assignment.iter().enumerate() {
                let x = u.question(q).target();
                if let Some(e) = l.iter().find(|e| !e.covers(x)) {
                    return violated(Counterexample::new(axiom, q).explanation(e));
                }
            }
        }
        AxiomId::Validity => {
            for (q, l) in assignment.iter().enumerate() {
                for e in l.iter() {
                    if let Some(Some(y)) = opposite_cover(u, q, e, false) {
                        let mut c = Counterexample::new(axiom, q).explanation(e);
                        c.witness = Some(y);
                        return violated(c);
                    }
                }
            }
        }
        AxiomId::Success => {
            if let Some(q) = assignment.iter().position(|l| l.is_empty()) {
                return violated(Counterexample::new(axiom, q));
            }
        }
        AxiomId::Coherence => {
            for g in u.groups() {
                for (k, &q) in g.iter().enumerate() {
                    for &o in &g[k + 1..] {
                        if u.question(q).class() == u.question(o).class() {
                            continue;
                        }
                        for e in assignment[q].iter() {
                            if let Some(f) = assignment[o].iter().find(|f| e.consistent_with(f)) {
                                let mut c = Counterexample::new(axiom, q).explanation(e);
                                c.other_question = Some(o);
                                c.other_explanation = Some(f.clone());
                                return violated(c);
                            }
                        }
                    }
                }
            }
        }
        AxiomId::Irreducibility | AxiomId::StrongIrreducibility => {
            for (q, l) in assignment.iter().enumerate() {
                for e in l.iter() {
                    for lit in e.literals() {
                        if opposite_cover(u, q, &e.without(lit.feature), strong) == Some(None) {
                            let mut c = Counterexample::new(axiom, q).explanation(e);
                            c.literal = Some(lit);
                            return violated(c);
                        }
                    }
                }
            }
        }
        AxiomId::Completeness | AxiomId::StrongCompleteness => {
            let masks = subsets_by_size(u.theory().n_features(), u64::MAX).expect("small theory");
            for (q, l) in assignment.iter().enumerate() {
                let x = u.question(q).target();
                for &m in &masks {
                    let e = x.restrict(m);
                    if !l.contains(&e) && opposite_cover(u, q, &e, strong) == Some(None) {
                        return violated(Counterexample::new(axiom, q).explanation(&e));
                    }
                }
            }
        }
        AxiomId::Monotonicity | AxiomId::CounterMonotonicity => {
            for &(q, o) in u.growth_pairs() {
                let (from, to) = if axiom == AxiomId::Monotonicity { (q, o) } else { (o, q) };
                if let Some(e) = assignment[from].iter().find(|e| !assignment[to].contains(e)) {
                    let mut c = Counterexample::new(axiom, q).explanation(e);
                    c.other_question = Some(o);
                    return violated(c);
                }
            }
        }
    }
    Verdict::Holds
}

/// Evaluates `explainer` on the universe, then checks `axiom`.
pub fn check_axiom(explainer: &dyn Explainer, axiom: AxiomId, u: &Universe) -> Result<Verdict> {
    let sets = u.evaluate(explainer)?;
    let refs: Vec<&ExplanationSet> = sets.iter().collect();
    Ok(check(axiom, u, &refs))
}

/// Axioms among `axioms` that hold for the assignment.
pub fn satisfied(u: &Universe, assignment: &[&ExplanationSet], axioms: AxiomSet) -> AxiomSet {
    let mut out = AxiomSet::default();
    for a in axioms.iter() {
        if check(a, u, assignment).holds() {
            out.insert(a);
        }
    }
    out
}

/// Implications between axioms that hold for every explainer on a universe
/// with all targets. Returns the ones contradicted by `holds`.
pub fn implication_failures(holds: AxiomSet) -> Vec<&'static str> {
    use AxiomId::*;
    let rules: [(&'static str, &[AxiomId], AxiomId); 5] = [
        ("Completeness => StrongCompleteness", &[Completeness], StrongCompleteness),
        ("StrongCompleteness => Success", &[StrongCompleteness], Success),
        ("Irreducibility => StrongIrreducibility", &[Irreducibility], StrongIrreducibility),
        ("Success, Feasibility, Coherence => Validity", &[Success, Feasibility, Coherence], Validity),
        ("Feasibility, Validity, Completeness => CounterMonotonicity", &[Feasibility, Validity, Completeness], CounterMonotonicity),
    ];
    rules
        .into_iter()
        .filter(|(_, pre, post)| AxiomSet::of(pre).is_subset(holds) && !holds.contains(*post))
        .map(|(name, ..)| name)
        .collect()
}
