//! ID3 decision trees used as surrogate models, and explanations read off
//! the tree.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coherence::{DecisionList, DecisionRule};
use crate::data::{Classifier, Question, Sample};
use crate::error::{Error, Result};
use crate::explainers::{check_order, ExplanationSet};
use crate::theory::{subsets_by_size, ClassId, Instance, PartialAssignment, Theory};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Node {
    Leaf { class: ClassId },
    /// Branch value sets partition the values of `feature` still possible
    /// at this node.
    Split { feature: usize, branches: Vec<Branch> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub values: Vec<u32>,
    pub child: Node,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub n_features: usize,
    pub root: Node,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SplitRule {
    /// One value against the rest of the remaining values.
    #[default]
    Binary,
    /// One branch per remaining value.
    Multiway,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Id3Config {
    pub split: SplitRule,
}

/// Gain, feature, value parts and the rows falling into each part.
type Candidate = (f64, usize, Vec<Vec<u32>>, Vec<Vec<usize>>);

/// Information gain below this is treated as a tie.
const GAIN_EPS: f64 = 1e-12;

/// Fits an ID3 tree to the labelled sample. Instances are weighted by their
/// row multiplicity, gain uses natural-log entropy and ties go to the lowest
/// feature, then the lowest value. A branch that receives no rows becomes a
/// leaf with the parent's majority class.
pub fn id3_fit(sample: &Sample, config: Id3Config) -> Result<DecisionTree> {
    if sample.is_empty() {
        return Err(Error::Contract("cannot fit a tree to an empty dataset".into()));
    }
    let theory = sample.theory();
    let allowed: Vec<Vec<u32>> = (0..theory.n_features()).map(|f| (0..theory.domain(f).len() as u32).collect()).collect();
    let fit = Fit { sample, n_classes: theory.n_classes(), config };
    let rows: Vec<usize> = (0..sample.len()).collect();
    Ok(DecisionTree { n_features: theory.n_features(), root: fit.grow(&rows, &allowed) })
}

struct Fit<'a> {
    sample: &'a Sample,
    n_classes: usize,
    config: Id3Config,
}

impl Fit<'_> {
    fn counts(&self, rows: &[usize]) -> Vec<f64> {
        let mut c = vec![0.0; self.n_classes];
        for &r in rows {
            c[self.sample.label(r) as usize] += self.sample.dataset().multiplicity(r) as f64;
        }
        c
    }

    fn majority(&self, rows: &[usize]) -> ClassId {
        let c = self.counts(rows);
        let mut best = 0;
        for (k, &w) in c.iter().enumerate() {
            if w > c[best] {
                best = k;
            }
        }
        best as ClassId
    }

    fn candidates(&self, values: &[u32]) -> Vec<Vec<Vec<u32>>> {
        if values.len() < 2 {
            return Vec::new();
        }
        match self.config.split {
            SplitRule::Multiway => vec![values.iter().map(|&v| vec![v]).collect()],
            SplitRule::Binary if values.len() == 2 => vec![vec![vec![values[0]], vec![values[1]]]],
            SplitRule::Binary => values
                .iter()
                .map(|&v| vec![vec![v], values.iter().copied().filter(|&w| w != v).collect()])
                .collect(),
        }
    }

    fn grow(&self, rows: &[usize], allowed: &[Vec<u32>]) -> Node {
        let counts = self.counts(rows);
        if counts.iter().filter(|&&w| w > 0.0).count() <= 1 {
            return Node::Leaf { class: self.majority(rows) };
        }
        let total: f64 = counts.iter().sum();
        let parent = entropy(&counts);
        let mut best: Option<Candidate> = None;
        for (f, values) in allowed.iter().enumerate() {
            for parts in self.candidates(values) {
                let groups: Vec<Vec<usize>> = parts
                    .iter()
                    .map(|p| rows.iter().copied().filter(|&r| p.contains(&self.sample.dataset().get(r).get(f))).collect())
                    .collect();
                if groups.iter().filter(|g| !g.is_empty()).count() < 2 {
                    continue;
                }
                let rest: f64 = groups
                    .iter()
                    .map(|g| {
                        let c = self.counts(g);
                        c.iter().sum::<f64>() / total * entropy(&c)
                    })
                    .sum();
                let gain = parent - rest;
                if best.as_ref().is_none_or(|(g, ..)| gain > g + GAIN_EPS) {
                    best = Some((gain, f, parts, groups));
                }
            }
        }
        let Some((_, feature, parts, groups)) = best else {
            return Node::Leaf { class: self.majority(rows) };
        };
        let fallback = self.majority(rows);
        let branches = parts
            .into_iter()
            .zip(groups)
            .map(|(values, group)| {
                let child = if group.is_empty() {
                    Node::Leaf { class: fallback }
                } else {
                    let mut narrowed = allowed.to_vec();
                    narrowed[feature] = values.clone();
                    self.grow(&group, &narrowed)
                };
                Branch { values, child }
            })
            .collect();
        Node::Split { feature, branches }
    }
}

fn entropy(counts: &[f64]) -> f64 {
    let total: f64 = counts.iter().sum();
    counts
        .iter()
        .filter(|&&w| w > 0.0)
        .map(|&w| {
            let p = w / total;
            -p * p.ln()
        })
        .sum()
}

impl DecisionTree {
    pub fn predict(&self, y: &Instance) -> Result<ClassId> {
        if y.len() != self.n_features {
            return Err(Error::TheoryMismatch { expected: self.n_features, got: y.len() });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class } => return Ok(*class),
                Node::Split { feature, branches } => {
                    let v = y.get(*feature);
                    node = &branches
                        .iter()
                        .find(|b| b.values.contains(&v))
                        .ok_or_else(|| Error::Undefined(format!("value {v} of feature {feature} has no branch")))?
                        .child;
                }
            }
        }
    }

    pub fn root_feature(&self) -> Option<usize> {
        match &self.root {
            Node::Split { feature, .. } => Some(*feature),
            Node::Leaf { .. } => None,
        }
    }

    pub fn n_leaves(&self) -> usize {
        fn count(n: &Node) -> usize {
            match n {
                Node::Leaf { .. } => 1,
                Node::Split { branches, .. } => branches.iter().map(|b| count(&b.child)).sum(),
            }
        }
        count(&self.root)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Indented human-readable rendering.
    pub fn to_text(&self, theory: &Theory) -> String {
        fn go(t: &Theory, n: &Node, depth: usize, out: &mut String) {
            match n {
                Node::Leaf { class } => out.push_str(&format!("{}-> {}\n", "  ".repeat(depth), t.class_name(*class))),
                Node::Split { feature, branches } => {
                    for b in branches {
                        let vals: Vec<&str> = b.values.iter().map(|&v| t.domain(*feature)[v as usize].as_str()).collect();
                        let cond = match vals.as_slice() {
                            [v] => format!("{} = {}", t.feature_name(*feature), v),
                            vs => format!("{} in {{{}}}", t.feature_name(*feature), vs.join(",")),
                        };
                        out.push_str(&format!("{}{}\n", "  ".repeat(depth), cond));
                        go(t, &b.child, depth + 1, out);
                    }
                }
            }
        }
        let mut out = String::new();
        go(theory, &self.root, 0, &mut out);
        out
    }

    /// One rule per leaf. A path that restricts a feature to several values
    /// yields one premise per value combination.
    pub fn to_decision_list(&self, theory: &Theory) -> DecisionList {
        fn go(t: &Theory, n: &Node, allowed: &mut Vec<Vec<u32>>, out: &mut Vec<DecisionRule>) {
            match n {
                Node::Leaf { class } => {
                    let mut premises = vec![PartialAssignment::empty(allowed.len())];
                    for (f, vals) in allowed.iter().enumerate() {
                        if vals.len() == t.domain(f).len() {
                            continue;
                        }
                        premises = premises
                            .iter()
                            .flat_map(|p| vals.iter().map(move |&v| p.with(crate::theory::Literal::new(f, v))))
                            .collect();
                    }
                    out.push(DecisionRule { premises, class: *class });
                }
                Node::Split { feature, branches } => {
                    for b in branches {
                        let saved = std::mem::replace(&mut allowed[*feature], b.values.clone());
                        go(t, &b.child, allowed, out);
                        allowed[*feature] = saved;
                    }
                }
            }
        }
        let mut allowed: Vec<Vec<u32>> = (0..theory.n_features()).map(|f| (0..theory.domain(f).len() as u32).collect()).collect();
        let mut rules = Vec::new();
        go(theory, &self.root, &mut allowed, &mut rules);
        DecisionList { rules, default: 0 }
    }
}

impl Classifier for DecisionTree {
    fn predict(&self, x: &Instance) -> Result<ClassId> {
        DecisionTree::predict(self, x)
    }
}

pub fn dt_predict(tree: &DecisionTree, y: &Instance) -> Result<ClassId> {
    tree.predict(y)
}

/// Whether every leaf reachable from points extending `E` predicts the class
/// of `x`. Each node is visited at most once.
pub fn is_dwaxp_tree(tree: &DecisionTree, x: &Instance, e: &PartialAssignment) -> Result<bool> {
    if e.arity() != tree.n_features || x.len() != tree.n_features {
        return Err(Error::TheoryMismatch { expected: tree.n_features, got: e.arity().min(x.len()) });
    }
    if !e.covers(x) {
        return Ok(false);
    }
    let class = tree.predict(x)?;
    let mut stack = vec![&tree.root];
    while let Some(node) = stack.pop() {
        match node {
            Node::Leaf { class: c } if *c != class => return Ok(false),
            Node::Leaf { .. } => {}
            Node::Split { feature, branches } => match e.get(*feature) {
                Some(v) => stack.extend(branches.iter().filter(|b| b.values.contains(&v)).map(|b| &b.child)),
                None => stack.extend(branches.iter().map(|b| &b.child)),
            },
        }
    }
    Ok(true)
}

/// Greedy deletion under [`is_dwaxp_tree`].
pub fn find_axp_tree(tree: &DecisionTree, x: &Instance, order: &[usize]) -> Result<PartialAssignment> {
    check_order(order, tree.n_features)?;
    let mut e = x.to_assignment();
    for &f in order {
        let candidate = e.without(f);
        if is_dwaxp_tree(tree, x, &candidate)? {
            e = candidate;
        }
    }
    Ok(e)
}

/// Weak explanations of the target under the surrogate, over the full
/// feature space.
pub fn lsu_explain(q: &Question, tree: &DecisionTree, cap: u64) -> Result<ExplanationSet> {
    let x = q.target();
    let mut out = ExplanationSet::new();
    for m in subsets_by_size(q.theory().n_features(), cap)? {
        let e = x.restrict(m);
        if is_dwaxp_tree(tree, x, &e)? {
            out.insert(e);
        }
    }
    Ok(out)
}

/// Fits a tree to the sample and checks that it reproduces every label.
pub fn fit_surrogate(sample: &Arc<Sample>, config: Id3Config) -> Result<DecisionTree> {
    let tree = id3_fit(sample, config)?;
    for (i, x) in sample.dataset().instances().iter().enumerate() {
        if tree.predict(x)? != sample.label(i) {
            return Err(Error::Contract(format!("surrogate misclassifies dataset instance {i}")));
        }
    }
    Ok(tree)
}
