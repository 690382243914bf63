//! Feature theories, literals and (partial) assignments.
//!
//! Features and values are referred to by index: feature `i` ranges over
//! `0..theory.n_features()` and its values over `0..domain(i).len()`.
//! A [`PartialAssignment`] fixes a value for some of the features and is
//! kept in canonical form (one slot per feature), so equality, hashing and
//! ordering never depend on how it was built.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ClassId = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Theory {
    features: Vec<String>,
    domains: Vec<Vec<String>>,
    classes: Vec<String>,
}

impl Theory {
    pub fn new(features: Vec<String>, domains: Vec<Vec<String>>, classes: Vec<String>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidTheory("at least one feature is required".into()));
        }
        if features.len() != domains.len() {
            return Err(Error::InvalidTheory(format!(
                "{} features but {} domains",
                features.len(),
                domains.len()
            )));
        }
        check_distinct("feature", &features)?;
        for (name, dom) in features.iter().zip(&domains) {
            if dom.len() < 2 {
                return Err(Error::InvalidTheory(format!("feature `{name}` needs at least two values")));
            }
            check_distinct(&format!("value of `{name}`"), dom)?;
        }
        if classes.len() < 2 {
            return Err(Error::InvalidTheory("at least two classes are required".into()));
        }
        check_distinct("class", &classes)?;
        Ok(Theory { features, domains, classes })
    }

    /// Theory with `n` boolean features named `f1..fn` over values `0,1`,
    /// and classes named `0..k-1`.
    pub fn boolean(n: usize, k: usize) -> Result<Self> {
        let features = (1..=n).map(|i| format!("f{i}")).collect();
        let domains = vec![vec!["0".to_string(), "1".to_string()]; n];
        let classes = (0..k).map(|c| c.to_string()).collect();
        Theory::new(features, domains, classes)
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn feature_name(&self, i: usize) -> &str {
        &self.features[i]
    }

    pub fn domain(&self, i: usize) -> &[String] {
        &self.domains[i]
    }

    pub fn class_name(&self, c: ClassId) -> &str {
        &self.classes[c as usize]
    }

    pub fn feature_index(&self, name: &str) -> Result<usize> {
        self.features
            .iter()
            .position(|f| f == name)
            .ok_or_else(|| Error::UnknownFeatureName(name.to_string()))
    }

    pub fn value_index(&self, feature: usize, value: &str) -> Result<u32> {
        self.domains[feature]
            .iter()
            .position(|v| v == value)
            .map(|v| v as u32)
            .ok_or_else(|| Error::UnknownValueName {
                feature: self.features[feature].clone(),
                value: value.to_string(),
            })
    }

    pub fn class_index(&self, name: &str) -> Result<ClassId> {
        self.classes
            .iter()
            .position(|c| c == name)
            .map(|c| c as ClassId)
            .ok_or_else(|| Error::UnknownClass(name.to_string()))
    }

    pub fn literal(&self, feature: &str, value: &str) -> Result<Literal> {
        let f = self.feature_index(feature)?;
        Ok(Literal { feature: f, value: self.value_index(f, value)? })
    }

    pub fn check_literal(&self, l: Literal) -> Result<()> {
        let dom = self.domains.get(l.feature).ok_or(Error::UnknownFeature(l.feature))?;
        if (l.value as usize) < dom.len() {
            Ok(())
        } else {
            Err(Error::UnknownValue { feature: self.features[l.feature].clone(), value: l.value })
        }
    }

    pub fn check_instance(&self, x: &Instance) -> Result<()> {
        self.check_arity(x.len())?;
        for (i, &v) in x.values().iter().enumerate() {
            self.check_literal(Literal { feature: i, value: v })?;
        }
        Ok(())
    }

    pub fn check_assignment(&self, e: &PartialAssignment) -> Result<()> {
        self.check_arity(e.arity())?;
        e.literals().try_for_each(|l| self.check_literal(l))
    }

    pub fn check_arity(&self, n: usize) -> Result<()> {
        if n == self.n_features() {
            Ok(())
        } else {
            Err(Error::TheoryMismatch { expected: self.n_features(), got: n })
        }
    }

    /// `|F|`, or `None` if the product overflows `u64`.
    pub fn feature_space_size(&self) -> Option<u64> {
        self.domains.iter().try_fold(1u64, |acc, d| acc.checked_mul(d.len() as u64))
    }

    /// Lazily enumerates the full feature space in lexicographic order.
    pub fn feature_space(&self, cap: u64) -> Result<FeatureSpace> {
        match self.feature_space_size() {
            Some(size) if size <= cap => Ok(FeatureSpace {
                radix: self.domains.iter().map(|d| d.len() as u32).collect(),
                next: Some(vec![0; self.n_features()]),
            }),
            Some(size) => Err(Error::Capacity { what: "feature space", needed: size.to_string(), cap }),
            None => Err(Error::Capacity { what: "feature space", needed: "more than 2^64".into(), cap }),
        }
    }

    /// Validates and assembles a set of literals. Repeated identical literals
    /// are merged; two literals on the same feature with different values
    /// are rejected.
    pub fn assignment(&self, literals: &[Literal]) -> Result<PartialAssignment> {
        let mut e = PartialAssignment::empty(self.n_features());
        for &l in literals {
            self.check_literal(l)?;
            match e.slots[l.feature] {
                Some(v) if v != l.value => {
                    return Err(Error::Inconsistent(self.features[l.feature].clone()))
                }
                _ => e.slots[l.feature] = Some(l.value),
            }
        }
        Ok(e)
    }

    /// Checks consistency of a literal multiset after validating each literal.
    pub fn is_consistent(&self, literals: &[Literal]) -> Result<bool> {
        match self.assignment(literals) {
            Ok(_) => Ok(true),
            Err(Error::Inconsistent(_)) => Ok(false),
            Err(e) => Err(e),
        }
    }

    pub fn instance(&self, values: &[&str]) -> Result<Instance> {
        self.check_arity(values.len())?;
        let vals = values
            .iter()
            .enumerate()
            .map(|(i, v)| self.value_index(i, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance::new(vals))
    }

    /// Canonical text form: `f=v` pairs in feature order, `{}` when empty.
    pub fn show(&self, e: &PartialAssignment) -> String {
        if e.is_empty() {
            return "{}".to_string();
        }
        e.literals().map(|l| self.show_literal(l)).collect::<Vec<_>>().join(",")
    }

    pub fn show_literal(&self, l: Literal) -> String {
        format!("{}={}", self.features[l.feature], self.domains[l.feature][l.value as usize])
    }

    pub fn show_instance(&self, x: &Instance) -> String {
        x.values()
            .iter()
            .enumerate()
            .map(|(i, &v)| self.domains[i][v as usize].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Inverse of [`Theory::show`]. Accepts optional surrounding braces.
    pub fn parse_assignment(&self, text: &str) -> Result<PartialAssignment> {
        let body = text.trim();
        let body = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).unwrap_or(body).trim();
        let mut lits = Vec::new();
        if !body.is_empty() {
            for part in body.split(',') {
                let (f, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Format { line: 0, message: format!("expected `feature=value`, got `{part}`") })?;
                lits.push(self.literal(f.trim(), v.trim())?);
            }
        }
        self.assignment(&lits)
    }
}

fn check_distinct(what: &str, names: &[String]) -> Result<()> {
    for (i, a) in names.iter().enumerate() {
        if a.is_empty() {
            return Err(Error::InvalidTheory(format!("empty {what} name")));
        }
        if names[..i].contains(a) {
            return Err(Error::InvalidTheory(format!("duplicate {what} `{a}`")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub feature: usize,
    pub value: u32,
}

impl Literal {
    pub fn new(feature: usize, value: u32) -> Self {
        Literal { feature, value }
    }
}

/// A point of the feature space.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Instance(Vec<u32>);

impl Instance {
    pub fn new(values: Vec<u32>) -> Self {
        Instance(values)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, feature: usize) -> u32 {
        self.0[feature]
    }

    pub fn to_assignment(&self) -> PartialAssignment {
        PartialAssignment { slots: self.0.iter().map(|&v| Some(v)).collect() }
    }

    /// The sub-assignment of `self` on the features in `mask`.
    pub fn restrict(&self, mask: u64) -> PartialAssignment {
        let slots = self
            .0
            .iter()
            .enumerate()
            .map(|(i, &v)| (mask >> i & 1 == 1).then_some(v))
            .collect();
        PartialAssignment { slots }
    }

    /// Features on which `self` and `other` take the same value.
    pub fn agreement_mask(&self, other: &Instance) -> u64 {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .filter(|(_, (a, b))| a == b)
            .fold(0, |m, (i, _)| m | 1 << i)
    }
}

/// A consistent set of literals, stored as one optional value per feature.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialAssignment {
    slots: Vec<Option<u32>>,
}

impl PartialAssignment {
    pub fn empty(n_features: usize) -> Self {
        PartialAssignment { slots: vec![None; n_features] }
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Option::is_none)
    }

    pub fn get(&self, feature: usize) -> Option<u32> {
        self.slots[feature]
    }

    pub fn literals(&self) -> impl Iterator<Item = Literal> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.map(|v| Literal::new(i, v)))
    }

    pub fn features_mask(&self) -> u64 {
        self.literals().fold(0, |m, l| m | 1 << l.feature)
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.slots.get(l.feature).copied().flatten() == Some(l.value)
    }

    pub fn without(&self, feature: usize) -> Self {
        let mut e = self.clone();
        e.slots[feature] = None;
        e
    }

    pub fn with(&self, l: Literal) -> Self {
        let mut e = self.clone();
        e.slots[l.feature] = Some(l.value);
        e
    }

    /// `self ⊆ y`. Arity is assumed to match; see [`PartialAssignment::try_covers`].
    pub fn covers(&self, y: &Instance) -> bool {
        debug_assert_eq!(self.slots.len(), y.len());
        self.slots.iter().zip(y.values()).all(|(s, v)| s.is_none_or(|s| s == *v))
    }

    pub fn try_covers(&self, y: &Instance) -> Result<bool> {
        if self.arity() != y.len() {
            return Err(Error::TheoryMismatch { expected: self.arity(), got: y.len() });
        }
        Ok(self.covers(y))
    }

    pub fn is_subset_of(&self, other: &PartialAssignment) -> bool {
        self.slots
            .iter()
            .zip(&other.slots)
            .all(|(a, b)| a.is_none() || a == b)
    }

    /// Whether `self ∪ other` assigns at most one value per feature.
    pub fn consistent_with(&self, other: &PartialAssignment) -> bool {
        self.slots.iter().zip(&other.slots).all(|pair| match pair {
            (Some(a), Some(b)) => a == b,
            _ => true,
        })
    }

    pub fn union(&self, other: &PartialAssignment) -> Option<PartialAssignment> {
        if !self.consistent_with(other) {
            return None;
        }
        let slots = self.slots.iter().zip(&other.slots).map(|(a, b)| a.or(*b)).collect();
        Some(PartialAssignment { slots })
    }
}

impl Ord for PartialAssignment {
    /// Lexicographic order on the canonical literal lists.
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.literals();
        let mut b = other.literals();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    Ordering::Equal => continue,
                    o => return o,
                },
            }
        }
    }
}

impl PartialOrd for PartialAssignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.literals().map(|l| format!("x{}={}", l.feature, l.value)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Odometer over the feature space, rightmost feature fastest.
#[derive(Debug)]
pub struct FeatureSpace {
    radix: Vec<u32>,
    next: Option<Vec<u32>>,
}

impl Iterator for FeatureSpace {
    type Item = Instance;

    fn next(&mut self) -> Option<Instance> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.radix[i] {
                self.next = Some(succ);
                break;
            }
            succ[i] = 0;
        }
        Some(Instance::new(current))
    }
}

/// Masks of all subsets of `n_features` features, smallest first; equal
/// sizes come in lexicographic order of their feature lists.
pub fn subsets_by_size(n_features: usize, cap: u64) -> Result<Vec<u64>> {
    if n_features >= 63 || (1u64 << n_features) > cap {
        let needed = if n_features >= 63 { format!("2^{n_features}") } else { (1u64 << n_features).to_string() };
        return Err(Error::Capacity { what: "subset enumeration", needed, cap });
    }
    let mut masks: Vec<u64> = (0..1u64 << n_features).collect();
    // Within one size, comparing literal lists of subsets of a single
    // instance reduces to comparing their ascending feature lists.
    masks.sort_by(|a, b| a.count_ones().cmp(&b.count_ones()).then_with(|| cmp_feature_lists(*a, *b)));
    Ok(masks)
}

fn cmp_feature_lists(mut a: u64, mut b: u64) -> Ordering {
    loop {
        match (a == 0, b == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (ia, ib) = (a.trailing_zeros(), b.trailing_zeros());
        if ia != ib {
            return ia.cmp(&ib);
        }
        a &= a - 1;
        b &= b - 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_space_is_lexicographic() {
        let t = Theory::boolean(2, 2).unwrap();
        let all: Vec<_> = t.feature_space(4).unwrap().map(|x| x.values().to_vec()).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert!(t.feature_space(3).unwrap_err().is_capacity());
    }

    #[test]
    fn overflow_is_a_capacity_error() {
        let t = Theory::boolean(70, 2).unwrap();
        assert_eq!(t.feature_space_size(), None);
        assert!(t.feature_space(u64::MAX).unwrap_err().is_capacity());
    }

    #[test]
    fn inconsistent_literals() {
        let t = Theory::boolean(2, 2).unwrap();
        assert!(!t.is_consistent(&[Literal::new(0, 0), Literal::new(0, 1)]).unwrap());
        assert!(t.is_consistent(&[Literal::new(0, 0), Literal::new(1, 1)]).unwrap());
        assert!(t.is_consistent(&[Literal::new(1, 2)]).is_err());
    }

    #[test]
    fn show_and_parse() {
        let t = Theory::boolean(3, 2).unwrap();
        let e = t.assignment(&[Literal::new(2, 1), Literal::new(0, 0)]).unwrap();
        assert_eq!(t.show(&e), "f1=0,f3=1");
        assert_eq!(t.parse_assignment("{f3=1, f1=0}").unwrap(), e);
        assert_eq!(t.show(&PartialAssignment::empty(3)), "{}");
        assert!(t.parse_assignment("{}").unwrap().is_empty());
    }

    #[test]
    fn subsets_come_size_then_lex() {
        let m = subsets_by_size(3, 8).unwrap();
        assert_eq!(m, vec![0, 0b001, 0b010, 0b100, 0b011, 0b101, 0b110, 0b111]);
    }

    #[test]
    fn empty_precedes_everything() {
        let e = PartialAssignment::empty(2);
        let x = Instance::new(vec![0, 0]).restrict(0b01);
        assert!(e < x);
        assert!(x < Instance::new(vec![0, 0]).to_assignment());
        assert!(Instance::new(vec![0, 0]).to_assignment() < Instance::new(vec![0, 0]).restrict(0b10));
    }
}
