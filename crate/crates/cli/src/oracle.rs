//! Definition-level recomputation of the library's answers on small inputs.

use std::collections::BTreeMap;
use std::sync::Arc;

use abduct::coherence::{irr_envelope, is_irrefutable};
use abduct::data::Sample;
use abduct::explainers::{all_caxp, all_dwaxp, find_caxp};
use abduct::surrogate::{id3_fit, is_dwaxp_tree, Id3Config};
use abduct::theory::{ClassId, Instance, PartialAssignment};
use abduct::{Error, Result};
use serde_json::json;

use crate::doc::{show, Doc};

#[derive(Default)]
struct Tally {
    checks: BTreeMap<&'static str, u64>,
    mismatches: Vec<String>,
}

impl Tally {
    fn compare(&mut self, what: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        *self.checks.entry(what).or_default() += 1;
        if !ok {
            self.mismatches.push(format!("{what}: {}", detail()));
        }
    }
}

fn covers(e: &PartialAssignment, y: &Instance) -> bool {
    e.literals().all(|l| y.get(l.feature) == l.value)
}

fn subsets(x: &Instance) -> Vec<PartialAssignment> {
    (0..1u64 << x.len()).map(|m| x.restrict(m)).collect()
}

fn weak(sample: &Sample, x: &Instance, class: ClassId) -> Vec<PartialAssignment> {
    let rows = sample.dataset().instances().iter().zip(sample.labels());
    let rows: Vec<_> = rows.collect();
    subsets(x).into_iter().filter(|e| rows.iter().all(|(y, c)| !covers(e, y) || **c == class)).collect()
}

fn minimal(set: &[PartialAssignment]) -> Vec<PartialAssignment> {
    set.iter().filter(|e| !set.iter().any(|f| f != *e && f.is_subset_of(e))).cloned().collect()
}

fn conflicting(sample: &Sample, a: &PartialAssignment, b: &PartialAssignment) -> bool {
    if !a.consistent_with(b) {
        return false;
    }
    let d = sample.dataset().instances();
    d.iter().enumerate().any(|(i, y)| {
        covers(a, y) && d.iter().enumerate().any(|(j, z)| covers(b, z) && sample.label(i) != sample.label(j))
    })
}

pub fn compare(sample: &Arc<Sample>, order: &[usize], cap: u64) -> Result<(Doc, usize)> {
    let t = sample.theory().clone();
    let n = t.n_features();
    let m = sample.len() as u64;
    if n >= 32 || (1u64 << n).saturating_mul(m).saturating_mul(m) > cap {
        return Err(Error::Capacity { what: "oracle comparison", needed: format!("2^{n} x {m}^2"), cap });
    }
    let mut tally = Tally::default();

    let mut pool: Vec<PartialAssignment> = Vec::new();
    let mut weak_sets = Vec::new();
    for q in sample.questions() {
        let w = weak(sample, q.target(), q.class());
        for e in &w {
            if !pool.contains(e) {
                pool.push(e.clone());
            }
        }
        weak_sets.push(w);
    }
    let irr: Vec<PartialAssignment> =
        pool.iter().filter(|e| !pool.iter().any(|f| conflicting(sample, e, f))).cloned().collect();

    let space: Option<Vec<Instance>> = match t.feature_space_size() {
        Some(size) if size.saturating_mul(1 << n) <= cap => Some(t.feature_space(cap)?.collect()),
        _ => None,
    };
    let tree = id3_fit(sample, Id3Config::default())?;

    for (q, w) in sample.questions().zip(&weak_sets) {
        let x = q.target().clone();
        let at = t.show_instance(&x);
        let lib: Vec<PartialAssignment> = all_dwaxp(&q, cap)?.into_iter().collect();
        let mut want = w.clone();
        want.sort();
        tally.compare("weak explanations", lib == want, || format!("target {at}"));

        let mut conc = minimal(w);
        conc.sort();
        let lib: Vec<PartialAssignment> = all_caxp(&q, cap)?.into_iter().collect();
        tally.compare("concise explanations", lib == conc, || format!("target {at}"));
        let found = find_caxp(&q, order)?;
        tally.compare("greedy deletion", conc.contains(&found), || format!("{} on {at}", show(&t, &found)));

        for e in subsets(&x) {
            let lib = is_irrefutable(&q, &e);
            tally.compare("irrefutability", lib == irr.contains(&e), || format!("{} on {at}", show(&t, &e)));
            if let Some(space) = &space {
                let c = tree.predict(&x)?;
                let mut brute = true;
                for z in space.iter().filter(|z| covers(&e, z)) {
                    brute &= tree.predict(z)? == c;
                }
                let lib = is_dwaxp_tree(&tree, &x, &e)?;
                tally.compare("tree explanations", lib == brute, || format!("{} on {at}", show(&t, &e)));
            }
        }
    }
    let mut want = irr.clone();
    want.sort();
    let lib: Vec<PartialAssignment> = irr_envelope(sample, cap)?.to_set().into_iter().collect();
    tally.compare("irrefutable envelope", lib == want, || format!("{} members, want {}", lib.len(), want.len()));

    let checks: BTreeMap<&str, u64> = tally.checks.clone();
    let mut doc = Doc::new(json!({
        "command": "oracle-compare",
        "dataset": sample.dataset().digest(),
        "classifier": sample.classifier_digest(),
        "checks": checks,
        "tree_checks_skipped": space.is_none(),
        "mismatches": tally.mismatches,
    }));
    doc.line(format!("dataset    {}", sample.dataset().digest()));
    doc.line(format!("classifier {}", sample.classifier_digest()));
    for (what, k) in &tally.checks {
        doc.line(format!("{what:<22} {k} checks"));
    }
    if space.is_none() {
        doc.line("tree explanations      skipped: feature space above cap");
    }
    doc.line(format!("mismatches {}", tally.mismatches.len()));
    for s in &tally.mismatches {
        doc.line(format!("  {s}"));
    }
    Ok((doc, tally.mismatches.len()))
}
