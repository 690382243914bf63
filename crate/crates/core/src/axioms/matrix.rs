use std::fmt::Write as _;

use serde::Serialize;

use crate::explainers::ExplanationSet;

use super::check::check;
use super::fixtures::Fixture;
use super::{AxiomId, AxiomSet, ExplainerId, StandardExplainer, Universe, Verdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Expectation {
    Satisfied,
    Violated,
    /// No claim is made.
    Unknown,
}

/// Reference verdicts, one row per axiom in [`AxiomId::ALL`] order and one
/// column per explainer in [`ExplainerId::TABLE`] order.
const REFERENCE: [&str; 10] = [
    "++++++++", // Feasibility
    "++++++++", // Validity
    "++++++++", // Success
    "++--++++", // Coherence
    "---+----", // Irreducibility
    "-+-+?---", // StrongIrreducibility
    "--+-----", // Completeness
    "+-+-?---", // StrongCompleteness
    "++--?+--", // Monotonicity
    "+++-?+--", // CounterMonotonicity
];

pub fn expected_matrix() -> Vec<(ExplainerId, AxiomId, Expectation)> {
    let mut out = Vec::new();
    for (row, axiom) in REFERENCE.iter().zip(AxiomId::ALL) {
        for (mark, explainer) in row.chars().zip(ExplainerId::TABLE) {
            let e = match mark {
                '+' => Expectation::Satisfied,
                '-' => Expectation::Violated,
                _ => Expectation::Unknown,
            };
            out.push((explainer, axiom, e));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// Expected to hold and no counterexample exists in the universe.
    Confirmed,
    /// Expected to fail and a replayable counterexample was found.
    Witnessed { source: String, description: String },
    /// Expected to hold but a counterexample was found.
    Counterexample { description: String },
    /// Expected to fail but no counterexample was found.
    Unwitnessed,
    /// No expectation; the universe verdict is recorded for information.
    Skipped { holds_on_universe: bool },
    Error(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatrixCell {
    pub explainer: String,
    pub axiom: AxiomId,
    pub expected: Expectation,
    pub outcome: Outcome,
}

impl MatrixCell {
    pub fn is_discrepancy(&self) -> bool {
        matches!(self.outcome, Outcome::Counterexample { .. } | Outcome::Unwitnessed | Outcome::Error(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixReport {
    pub universe: String,
    pub questions: usize,
    pub cells: Vec<MatrixCell>,
    /// Axioms with no counterexample in the universe, per explainer.
    #[serde(skip)]
    pub holds: Vec<(ExplainerId, AxiomSet)>,
}

impl MatrixReport {
    pub fn discrepancies(&self) -> Vec<&MatrixCell> {
        self.cells.iter().filter(|c| c.is_discrepancy()).collect()
    }

    pub fn cell(&self, explainer: ExplainerId, axiom: AxiomId) -> Option<&MatrixCell> {
        self.cells.iter().find(|c| c.explainer == explainer.name() && c.axiom == axiom)
    }

    /// Grid of observed marks: `+` holds, `x` violated, `-` skipped, `!` discrepancy.
    pub fn render(&self) -> String {
        let mut names: Vec<String> = Vec::new();
        for c in &self.cells {
            if !names.contains(&c.explainer) {
                names.push(c.explainer.clone());
            }
        }
        let mut out = format!("{:<22}", "axiom");
        for n in &names {
            let _ = write!(out, "{n:>5}");
        }
        out.push('\n');
        for axiom in AxiomId::ALL {
            let _ = write!(out, "{:<22}", axiom.name());
            for n in &names {
                let mark = match self.cells.iter().find(|c| &c.explainer == n && c.axiom == axiom) {
                    Some(c) if c.is_discrepancy() => "!",
                    Some(MatrixCell { outcome: Outcome::Confirmed, .. }) => "+",
                    Some(MatrixCell { outcome: Outcome::Witnessed { .. }, .. }) => "x",
                    _ => "-",
                };
                let _ = write!(out, "{mark:>5}");
            }
            out.push('\n');
        }
        out
    }
}

fn evaluate(explainer: &StandardExplainer, u: &Universe) -> Result<Vec<ExplanationSet>, String> {
    u.evaluate(explainer).map_err(|e| e.to_string())
}

/// Checks each explainer against the reference expectations. Expected
/// failures may be witnessed by the universe or by any fixture; expected
/// successes must have no counterexample in the universe.
pub fn axiom_matrix(explainers: &[ExplainerId], u: &Universe, fixtures: &[Fixture]) -> MatrixReport {
    let expected = expected_matrix();
    let mut cells = Vec::new();
    let mut holds = Vec::new();
    for &id in explainers {
        let explainer = StandardExplainer::new(id);
        let sets = evaluate(&explainer, u);
        let mut fixture_sets: Vec<Option<Result<Vec<ExplanationSet>, String>>> = vec![None; fixtures.len()];
        let mut ok = AxiomSet::default();
        for axiom in AxiomId::ALL {
            let exp = expected
                .iter()
                .find(|(e, a, _)| *e == id && *a == axiom)
                .map_or(Expectation::Unknown, |(.., x)| *x);
            let outcome = match &sets {
                Err(msg) => Outcome::Error(msg.clone()),
                Ok(sets) => {
                    let refs: Vec<&ExplanationSet> = sets.iter().collect();
                    let verdict = check(axiom, u, &refs);
                    if verdict.holds() {
                        ok.insert(axiom);
                    }
                    match (exp, verdict) {
                        (Expectation::Unknown, v) => Outcome::Skipped { holds_on_universe: v.holds() },
                        (Expectation::Satisfied, Verdict::Holds) => Outcome::Confirmed,
                        (Expectation::Satisfied, Verdict::Violated(c)) => Outcome::Counterexample { description: c.describe(u) },
                        (_, Verdict::Inapplicable(why)) => Outcome::Error(why),
                        (Expectation::Violated, Verdict::Violated(c)) if c.replay(u, &refs) => {
                            Outcome::Witnessed { source: u.name.clone(), description: c.describe(u) }
                        }
                        (Expectation::Violated, _) => {
                            witness_in_fixtures(id, axiom, fixtures, &mut fixture_sets).unwrap_or(Outcome::Unwitnessed)
                        }
                    }
                }
            };
            cells.push(MatrixCell { explainer: id.name(), axiom, expected: exp, outcome });
        }
        holds.push((id, ok));
    }
    MatrixReport { universe: u.name.clone(), questions: u.len(), cells, holds }
}

fn witness_in_fixtures(
    id: ExplainerId,
    axiom: AxiomId,
    fixtures: &[Fixture],
    cache: &mut [Option<Result<Vec<ExplanationSet>, String>>],
) -> Option<Outcome> {
    for (k, f) in fixtures.iter().enumerate() {
        let sets = cache[k].get_or_insert_with(|| evaluate(&f.explainer(id), &f.universe));
        let Ok(sets) = sets else { continue };
        let refs: Vec<&ExplanationSet> = sets.iter().collect();
        if let Verdict::Violated(c) = check(axiom, &f.universe, &refs) {
            if c.replay(&f.universe, &refs) {
                return Some(Outcome::Witnessed { source: f.name.to_string(), description: c.describe(&f.universe) });
            }
        }
    }
    None
}
