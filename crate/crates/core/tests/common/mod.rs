//! Brute-force oracles written straight from the definitions, sharing no
//! code paths with the library beyond the basic types.

#![allow(dead_code)]

use std::sync::Arc;

use abduct::data::{Dataset, Sample, TableClassifier};
use abduct::surrogate::DecisionTree;
use abduct::theory::{ClassId, Instance, Literal, PartialAssignment, Theory};
use rand::Rng;

pub type Rows = Vec<(Instance, ClassId)>;

pub fn rows_of(sample: &Sample) -> Rows {
    sample.dataset().instances().iter().cloned().zip(sample.labels().iter().copied()).collect()
}

/// Every subset of `x`, built literal by literal.
pub fn subsets(t: &Theory, x: &Instance) -> Vec<PartialAssignment> {
    let mut out = vec![t.assignment(&[]).unwrap()];
    for f in 0..t.n_features() {
        let more: Vec<_> = out.iter().map(|e| e.with(Literal::new(f, x.get(f)))).collect();
        out.extend(more);
    }
    out
}

fn covers(e: &PartialAssignment, y: &Instance) -> bool {
    e.literals().all(|l| y.get(l.feature) == l.value)
}

pub fn is_weak(e: &PartialAssignment, x: &Instance, class: ClassId, rows: &Rows) -> bool {
    covers(e, x) && rows.iter().all(|(y, c)| !covers(e, y) || *c == class)
}

pub fn weak_set(t: &Theory, x: &Instance, class: ClassId, rows: &Rows) -> Vec<PartialAssignment> {
    let mut v: Vec<_> = subsets(t, x).into_iter().filter(|e| is_weak(e, x, class, rows)).collect();
    v.sort();
    v
}

pub fn minimal_set(t: &Theory, x: &Instance, class: ClassId, rows: &Rows) -> Vec<PartialAssignment> {
    let weak = weak_set(t, x, class, rows);
    let mut v: Vec<_> = weak
        .iter()
        .filter(|e| !weak.iter().any(|f| f != *e && f.literals().all(|l| e.contains(l))))
        .cloned()
        .collect();
    v.sort();
    v
}

pub fn pool(t: &Theory, rows: &Rows) -> Vec<(PartialAssignment, ClassId)> {
    let mut out: Vec<(PartialAssignment, ClassId)> = Vec::new();
    for (x, c) in rows {
        for e in weak_set(t, x, *c, rows) {
            if !out.iter().any(|(f, _)| *f == e) {
                out.push((e, *c));
            }
        }
    }
    out.sort();
    out
}

fn consistent(a: &PartialAssignment, b: &PartialAssignment) -> bool {
    a.literals().all(|l| b.get(l.feature).is_none_or(|v| v == l.value))
}

/// Coherence of a pair, read off the definition: no consistent union whose
/// parts cover instances of two different classes.
pub fn pair_coherent(a: &PartialAssignment, b: &PartialAssignment, rows: &Rows) -> bool {
    if !consistent(a, b) {
        return true;
    }
    !rows.iter().any(|(y, cy)| covers(a, y) && rows.iter().any(|(z, cz)| covers(b, z) && cy != cz))
}

pub fn set_coherent(set: &[PartialAssignment], rows: &Rows) -> bool {
    set.iter().all(|a| set.iter().all(|b| pair_coherent(a, b, rows)))
}

pub fn irr(t: &Theory, rows: &Rows) -> Vec<PartialAssignment> {
    let p: Vec<PartialAssignment> = pool(t, rows).into_iter().map(|(e, _)| e).collect();
    p.iter().filter(|e| p.iter().all(|f| pair_coherent(e, f, rows))).cloned().collect()
}

pub fn envelopes(t: &Theory, rows: &Rows) -> Vec<Vec<PartialAssignment>> {
    let p: Vec<PartialAssignment> = pool(t, rows).into_iter().map(|(e, _)| e).collect();
    assert!(p.len() < 20);
    (0u32..1 << p.len())
        .map(|s| p.iter().enumerate().filter(|(i, _)| s >> i & 1 == 1).map(|(_, e)| e.clone()).collect::<Vec<_>>())
        .filter(|x| set_coherent(x, rows) && rows.iter().all(|(y, _)| x.iter().any(|e| covers(e, y))))
        .collect()
}

/// Whole feature space by nested counting.
pub fn space(t: &Theory) -> Vec<Instance> {
    let mut out = vec![vec![]];
    for f in 0..t.n_features() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u32>| {
                (0..t.domain(f).len() as u32).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Instance::new).collect()
}

pub fn tree_weak(t: &Theory, tree: &DecisionTree, x: &Instance, e: &PartialAssignment) -> bool {
    let cx = tree.predict(x).unwrap();
    covers(e, x) && space(t).iter().all(|z| !covers(e, z) || tree.predict(z).unwrap() == cx)
}

/// A random labelled sample on a small random theory.
pub struct Case {
    pub theory: Arc<Theory>,
    pub classifier: Arc<TableClassifier>,
    pub sample: Arc<Sample>,
}

pub fn random_case<R: Rng>(rng: &mut R) -> Case {
    let n = rng.gen_range(1..=3);
    let k = rng.gen_range(2..=3);
    let features = (0..n).map(|i| format!("f{i}")).collect();
    let domains = (0..n).map(|_| (0..rng.gen_range(2..=3)).map(|v| v.to_string()).collect()).collect();
    let classes = (0..k).map(|c| format!("c{c}")).collect();
    let theory = Arc::new(Theory::new(features, domains, classes).unwrap());
    let all = space(&theory);
    let table = TableClassifier::from_pairs(all.iter().map(|y| (y.clone(), rng.gen_range(0..k as u32)))).unwrap();
    let m = rng.gen_range(1..=5.min(all.len()));
    let mut picked = all.clone();
    for i in 0..m {
        let j = rng.gen_range(i..picked.len());
        picked.swap(i, j);
    }
    let dataset = Dataset::from_instances(picked.into_iter().take(m));
    let classifier = Arc::new(table);
    let sample = Sample::new(theory.clone(), classifier.clone(), Arc::new(dataset)).unwrap();
    Case { theory, classifier, sample }
}
