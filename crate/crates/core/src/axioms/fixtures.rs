//! Small hand-built universes on which specific explainers fail specific
//! axioms. All use two boolean features and total classifiers.

use std::sync::Arc;

use crate::data::{Classifier, Dataset, TableClassifier};
use crate::theory::{Instance, Theory};

use super::universe::{Context, Universe};
use super::{AxiomId, Caps, ExplainerId, StandardExplainer, SurrogateSource};
use crate::surrogate::Id3Config;

pub struct Fixture {
    pub name: &'static str,
    pub universe: Universe,
    /// Violations this fixture is built to exhibit.
    pub refutes: Vec<(ExplainerId, AxiomId)>,
    surrogates: Option<SurrogateSource>,
}

impl Fixture {
    /// The explainer as evaluated on this fixture; `L_su` uses the fixture's
    /// own surrogates when it has some.
    pub fn explainer(&self, id: ExplainerId) -> StandardExplainer {
        let source = match (&self.surrogates, id) {
            (Some(s), ExplainerId::Lsu) => s.clone(),
            _ => SurrogateSource::Id3(Id3Config::default()),
        };
        StandardExplainer::with(id, Caps::default(), source)
    }
}

fn pt(v: [u32; 2]) -> Instance {
    Instance::new(v.to_vec())
}

/// Classes of `(0,0), (0,1), (1,0), (1,1)`.
fn table(classes: [u32; 4]) -> Arc<dyn Classifier> {
    let rows = [[0, 0], [0, 1], [1, 0], [1, 1]].into_iter().zip(classes).map(|(v, c)| (pt(v), c));
    Arc::new(TableClassifier::from_pairs(rows).expect("distinct rows"))
}

fn ds(points: &[[u32; 2]]) -> Arc<Dataset> {
    Arc::new(Dataset::from_instances(points.iter().map(|&v| pt(v))))
}

fn single(name: &'static str, classes: usize, kappa: [u32; 4], datasets: Vec<Arc<Dataset>>, targets: Option<Vec<[u32; 2]>>) -> Universe {
    let theory = Arc::new(Theory::boolean(2, classes).expect("valid theory"));
    let ctx = Context {
        label: "kappa".into(),
        classifier: table(kappa),
        datasets,
        targets: targets.map(|ts| ts.into_iter().map(pt).collect()),
    };
    Universe::new(name, theory, vec![ctx]).expect("nonempty fixture")
}

pub fn fixtures() -> Vec<Fixture> {
    use AxiomId::*;
    use ExplainerId::*;
    vec![
        Fixture {
            name: "three-classes",
            universe: single("three-classes", 3, [2, 0, 1, 0], vec![ds(&[[0, 1], [1, 0], [0, 0]])], None),
            refutes: vec![(Ldw, Coherence), (Ldc, Coherence)],
            surrogates: None,
        },
        Fixture {
            name: "growth-new-counterexample",
            universe: single(
                "growth-new-counterexample",
                2,
                [0, 1, 1, 0],
                vec![ds(&[[0, 0], [0, 1]]), ds(&[[0, 0], [0, 1], [1, 0]])],
                Some(vec![[0, 0]]),
            ),
            refutes: vec![(Ldw, Monotonicity), (Ldc, Monotonicity), (Ldc, CounterMonotonicity)],
            surrogates: None,
        },
        Fixture {
            name: "xor-pair",
            universe: single("xor-pair", 2, [0, 1, 1, 0], vec![ds(&[[0, 0], [0, 1]])], None),
            refutes: vec![(Lc, Irreducibility), (Lc, Completeness)],
            surrogates: None,
        },
        Fixture {
            name: "first-feature",
            universe: single("first-feature", 2, [0, 0, 1, 1], vec![ds(&[[0, 0], [0, 1]])], None),
            refutes: vec![(Lc, StrongCompleteness)],
            surrogates: None,
        },
        Fixture {
            name: "second-feature",
            universe: single("second-feature", 2, [0, 1, 0, 1], vec![ds(&[[0, 0], [0, 1]])], None),
            refutes: vec![(Ltr, StrongIrreducibility), (Ltr, StrongCompleteness)],
            surrogates: None,
        },
        Fixture {
            name: "irrefutable-growth",
            universe: single(
                "irrefutable-growth",
                2,
                [0, 0, 1, 1],
                vec![ds(&[[0, 0], [1, 0]]), ds(&[[0, 0], [1, 0], [1, 1]])],
                Some(vec![[0, 0]]),
            ),
            refutes: vec![(Lir, Monotonicity)],
            surrogates: None,
        },
        Fixture {
            name: "irrefutable-shrink",
            universe: single(
                "irrefutable-shrink",
                2,
                [0, 1, 0, 0],
                vec![ds(&[[1, 0], [0, 1]]), ds(&[[1, 0], [0, 1], [0, 0]])],
                Some(vec![[1, 0]]),
            ),
            refutes: vec![(Lir, CounterMonotonicity), (Lir, StrongIrreducibility), (Lir, StrongCompleteness)],
            surrogates: None,
        },
        surrogate_drift(),
    ]
}

/// Surrogates retrained on a grown dataset can disagree outside it.
fn surrogate_drift() -> Fixture {
    use AxiomId::*;
    let d1 = ds(&[[0, 0], [0, 1]]);
    let d2 = ds(&[[0, 0], [0, 1], [1, 0]]);
    let pins = vec![(Arc::clone(&d1), table([0, 1, 1, 1])), (Arc::clone(&d2), table([0, 1, 0, 0]))];
    Fixture {
        name: "surrogate-drift",
        universe: single("surrogate-drift", 2, [0, 1, 0, 1], vec![d1, d2], Some(vec![[0, 0], [0, 1]])),
        refutes: vec![
            (ExplainerId::Lsu, Monotonicity),
            (ExplainerId::Lsu, CounterMonotonicity),
            (ExplainerId::Lsu, Completeness),
            (ExplainerId::Lsu, StrongCompleteness),
        ],
        surrogates: Some(SurrogateSource::Pinned(pins)),
    }
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().into_iter().find(|f| f.name == name)
}

/// Fixture on which the named incompatible set is certified.
pub fn incompatibility_fixture(label: &str) -> Option<&'static str> {
    match label {
        "I1" | "I2" | "I3" => Some("three-classes"),
        "I4" | "I5" => Some("growth-new-counterexample"),
        _ => None,
    }
}
