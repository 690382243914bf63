//! Datasets, black-box classifiers, questions and the CSV loader.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::theory::{ClassId, Instance, Theory};

/// Value used to pad a domain or the class set when the data shows only one.
pub const SENTINEL: &str = "<other>";

/// An ordered set of distinct instances. Rows that repeat an instance are
/// folded into its multiplicity.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    instances: Vec<Instance>,
    multiplicity: Vec<u32>,
    index: HashMap<Instance, usize>,
}

impl Dataset {
    pub fn new() -> Self {
        Dataset::default()
    }

    /// Collects distinct instances in first-appearance order.
    pub fn from_instances<I: IntoIterator<Item = Instance>>(items: I) -> Self {
        let mut d = Dataset::new();
        for x in items {
            d.push(x);
        }
        d
    }

    /// Adds a row; returns `true` if the instance was new.
    pub fn push(&mut self, x: Instance) -> bool {
        if let Some(&i) = self.index.get(&x) {
            self.multiplicity[i] += 1;
            return false;
        }
        self.index.insert(x.clone(), self.instances.len());
        self.instances.push(x);
        self.multiplicity.push(1);
        true
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn get(&self, i: usize) -> &Instance {
        &self.instances[i]
    }

    /// Number of input rows that produced instance `i`.
    pub fn multiplicity(&self, i: usize) -> u32 {
        self.multiplicity[i]
    }

    pub fn total_rows(&self) -> u64 {
        self.multiplicity.iter().map(|&w| w as u64).sum()
    }

    pub fn position(&self, x: &Instance) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &Instance) -> bool {
        self.index.contains_key(x)
    }

    pub fn is_subset_of(&self, other: &Dataset) -> bool {
        self.instances.iter().all(|x| other.contains(x))
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for x in &self.instances {
            for v in x.values() {
                h.update(v.to_le_bytes());
            }
            h.update(b";");
        }
        format!("{:x}", h.finalize())
    }
}

/// Opaque classifier. Implementations may be partial and report
/// [`Error::Undefined`] outside their support.
pub trait Classifier: Send + Sync {
    fn predict(&self, x: &Instance) -> Result<ClassId>;
}

impl fmt::Debug for dyn Classifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<classifier>")
    }
}

/// Lookup-table classifier, defined exactly on its rows.
#[derive(Clone, Debug, Default)]
pub struct TableClassifier {
    table: HashMap<Instance, ClassId>,
}

impl TableClassifier {
    pub fn new() -> Self {
        TableClassifier::default()
    }

    /// Builds a table from `(instance, class)` pairs; a second, different
    /// label for the same instance is rejected.
    pub fn from_pairs<I: IntoIterator<Item = (Instance, ClassId)>>(pairs: I) -> Result<Self> {
        let mut t = TableClassifier::new();
        for (x, c) in pairs {
            t.insert(x, c)?;
        }
        Ok(t)
    }

    pub fn insert(&mut self, x: Instance, c: ClassId) -> Result<()> {
        match self.table.get(&x) {
            Some(&old) if old != c => Err(Error::ContradictoryLabels {
                instance: format!("{:?}", x.values()),
                first: old.to_string(),
                second: c.to_string(),
            }),
            _ => {
                self.table.insert(x, c);
                Ok(())
            }
        }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

impl Classifier for TableClassifier {
    fn predict(&self, x: &Instance) -> Result<ClassId> {
        self.table
            .get(x)
            .copied()
            .ok_or_else(|| Error::Undefined(format!("{:?}", x.values())))
    }
}

/// Total classifier backed by a closure.
pub struct FnClassifier<F>(pub F);

impl<F> Classifier for FnClassifier<F>
where
    F: Fn(&Instance) -> ClassId + Send + Sync,
{
    fn predict(&self, x: &Instance) -> Result<ClassId> {
        Ok((self.0)(x))
    }
}

/// A dataset labelled by a classifier: the shared part of every question
/// asked about the same `(T, κ, D)`.
#[derive(Debug)]
pub struct Sample {
    theory: Arc<Theory>,
    classifier: Arc<dyn Classifier>,
    dataset: Arc<Dataset>,
    labels: Vec<ClassId>,
}

impl Sample {
    pub fn new(theory: Arc<Theory>, classifier: Arc<dyn Classifier>, dataset: Arc<Dataset>) -> Result<Arc<Self>> {
        let mut labels = Vec::with_capacity(dataset.len());
        for x in dataset.instances() {
            theory.check_instance(x)?;
            let c = classifier.predict(x)?;
            if c as usize >= theory.n_classes() {
                return Err(Error::Contract(format!("classifier returned unknown class {c}")));
            }
            labels.push(c);
        }
        Ok(Arc::new(Sample { theory, classifier, dataset, labels }))
    }

    pub fn theory(&self) -> &Arc<Theory> {
        &self.theory
    }

    pub fn classifier(&self) -> &Arc<dyn Classifier> {
        &self.classifier
    }

    pub fn dataset(&self) -> &Arc<Dataset> {
        &self.dataset
    }

    pub fn labels(&self) -> &[ClassId] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> ClassId {
        self.labels[i]
    }

    pub fn len(&self) -> usize {
        self.dataset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dataset.is_empty()
    }

    /// Digest of the classifier as seen through the dataset.
    pub fn classifier_digest(&self) -> String {
        let mut h = Sha256::new();
        for c in &self.labels {
            h.update(c.to_le_bytes());
        }
        format!("{:x}", h.finalize())
    }

    pub fn question(self: &Arc<Self>, x: &Instance) -> Result<Question> {
        let target = self
            .dataset
            .position(x)
            .ok_or_else(|| Error::NotInDataset(self.theory.show_instance(x)))?;
        Ok(Question { sample: Arc::clone(self), target })
    }

    pub fn question_at(self: &Arc<Self>, target: usize) -> Question {
        assert!(target < self.len(), "target index out of range");
        Question { sample: Arc::clone(self), target }
    }

    pub fn questions(self: &Arc<Self>) -> impl Iterator<Item = Question> + '_ {
        (0..self.len()).map(move |i| self.question_at(i))
    }
}

/// `⟨T, κ, D, x⟩` with `x ∈ D`.
#[derive(Clone, Debug)]
pub struct Question {
    sample: Arc<Sample>,
    target: usize,
}

impl Question {
    pub fn sample(&self) -> &Arc<Sample> {
        &self.sample
    }

    pub fn theory(&self) -> &Theory {
        &self.sample.theory
    }

    pub fn dataset(&self) -> &Dataset {
        &self.sample.dataset
    }

    pub fn target_index(&self) -> usize {
        self.target
    }

    pub fn target(&self) -> &Instance {
        self.sample.dataset.get(self.target)
    }

    pub fn class(&self) -> ClassId {
        self.sample.labels[self.target]
    }

    /// Same classifier and dataset, another target.
    pub fn retarget(&self, target: usize) -> Question {
        self.sample.question_at(target)
    }

    pub fn digest(&self) -> String {
        let t = self.theory();
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(t).expect("theory serializes"));
        h.update(self.sample.dataset.digest());
        h.update(self.sample.classifier_digest());
        h.update(self.target.to_le_bytes());
        format!("{:x}", h.finalize())
    }
}

pub fn make_question(
    theory: Arc<Theory>,
    classifier: Arc<dyn Classifier>,
    dataset: Arc<Dataset>,
    x: &Instance,
) -> Result<Question> {
    Sample::new(theory, classifier, dataset)?.question(x)
}

/// Declared domains: `feature: v1,v2,...` lines plus one `classes: ...` line.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DomainSpec {
    pub features: Vec<(String, Vec<String>)>,
    pub classes: Vec<String>,
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut spec = DomainSpec::default();
        let mut seen_classes = false;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, values) = line
                .split_once(':')
                .ok_or_else(|| Error::Format { line: n + 1, message: "expected `name: v1,v2,...`".into() })?;
            let name = name.trim().to_string();
            let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
            if name == "classes" {
                if seen_classes {
                    return Err(Error::Format { line: n + 1, message: "duplicate `classes` line".into() });
                }
                seen_classes = true;
                spec.classes = values;
            } else {
                if spec.features.iter().any(|(f, _)| *f == name) {
                    return Err(Error::Format { line: n + 1, message: format!("duplicate feature `{name}`") });
                }
                spec.features.push((name, values));
            }
        }
        if !seen_classes {
            return Err(Error::Format { line: 0, message: "missing `classes` line".into() });
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Column holding row names. It is kept out of the feature set and can
    /// be used to select targets.
    pub id_column: Option<String>,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub id: Option<String>,
    pub instance: usize,
}

/// Result of reading a labelled table.
#[derive(Clone, Debug)]
pub struct LoadedData {
    pub theory: Arc<Theory>,
    pub dataset: Arc<Dataset>,
    pub classifier: Arc<TableClassifier>,
    pub rows: Vec<Row>,
    pub duplicates: usize,
    pub id_column: Option<String>,
}

impl LoadedData {
    pub fn sample(&self) -> Result<Arc<Sample>> {
        Sample::new(self.theory.clone(), self.classifier.clone(), self.dataset.clone())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }
}

pub fn load_dataset_file(path: &Path, domains: Option<&Path>, opts: &LoadOptions) -> Result<LoadedData> {
    let text = std::fs::read_to_string(path)?;
    let spec = domains.map(|p| std::fs::read_to_string(p).map_err(Error::from).and_then(|t| DomainSpec::parse(&t))).transpose()?;
    load_dataset(&text, spec.as_ref(), opts)
}

/// Parses comma-separated text with a header row; the last column is the
/// class. Fields are not quoted. Without a [`DomainSpec`], domains and classes
/// are inferred in order of first appearance.
pub fn load_dataset(text: &str, domains: Option<&DomainSpec>, opts: &LoadOptions) -> Result<LoadedData> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l.strip_suffix('\r').unwrap_or(l)));
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.trim().is_empty())
        .ok_or_else(|| Error::Format { line: 1, message: "missing header".into() })?;
    let header: Vec<String> = header.split(',').map(|h| h.trim().to_string()).collect();
    if header.len() < 2 {
        return Err(Error::Format { line: 1, message: "need at least one feature and a class column".into() });
    }
    let id_col = match &opts.id_column {
        Some(name) => Some(
            header[..header.len() - 1]
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Format { line: 1, message: format!("no id column `{name}`") })?,
        ),
        None => None,
    };
    let class_col = header.len() - 1;
    let feature_cols: Vec<usize> = (0..class_col).filter(|&c| Some(c) != id_col).collect();
    if feature_cols.is_empty() {
        return Err(Error::Format { line: 1, message: "no feature columns".into() });
    }

    let mut raw_rows: Vec<(usize, Option<String>, Vec<String>, String)> = Vec::new();
    for (n, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != header.len() {
            return Err(Error::Format {
                line: n,
                message: format!("expected {} fields, found {}", header.len(), fields.len()),
            });
        }
        if fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Format { line: n, message: "empty field".into() });
        }
        let id = id_col.map(|c| fields[c].to_string());
        let values = feature_cols.iter().map(|&c| fields[c].to_string()).collect();
        raw_rows.push((n, id, values, fields[class_col].to_string()));
    }

    let names: Vec<String> = feature_cols.iter().map(|&c| header[c].clone()).collect();
    let theory = match domains {
        Some(spec) => theory_from_spec(&names, spec)?,
        None => infer_theory(&names, &raw_rows)?,
    };

    let mut dataset = Dataset::new();
    let mut classifier = TableClassifier::new();
    let mut rows = Vec::with_capacity(raw_rows.len());
    let mut duplicates = 0;
    for (n, id, values, class) in raw_rows {
        let at = |e: Error| match e {
            Error::UnknownValueName { .. } | Error::UnknownClass(_) => Error::Format { line: n, message: e.to_string() },
            e => e,
        };
        let refs: Vec<&str> = values.iter().map(String::as_str).collect();
        let x = theory.instance(&refs).map_err(at)?;
        let c = theory.class_index(&class).map_err(at)?;
        if let Ok(old) = classifier.predict(&x) {
            if old != c {
                return Err(Error::ContradictoryLabels {
                    instance: theory.show_instance(&x),
                    first: theory.class_name(old).to_string(),
                    second: class,
                });
            }
        }
        classifier.insert(x.clone(), c)?;
        if !dataset.push(x.clone()) {
            duplicates += 1;
        }
        rows.push(Row { id, instance: dataset.position(&x).expect("just inserted") });
    }

    Ok(LoadedData {
        theory: Arc::new(theory),
        dataset: Arc::new(dataset),
        classifier: Arc::new(classifier),
        rows,
        duplicates,
        id_column: opts.id_column.clone(),
    })
}

fn theory_from_spec(names: &[String], spec: &DomainSpec) -> Result<Theory> {
    if spec.features.len() != names.len() {
        return Err(Error::Format {
            line: 0,
            message: format!("domain file declares {} features, data has {}", spec.features.len(), names.len()),
        });
    }
    let mut domains = Vec::with_capacity(names.len());
    for name in names {
        let (_, dom) = spec
            .features
            .iter()
            .find(|(f, _)| f == name)
            .ok_or_else(|| Error::Format { line: 0, message: format!("feature `{name}` has no declared domain") })?;
        domains.push(dom.clone());
    }
    Theory::new(names.to_vec(), domains, spec.classes.clone())
}

fn infer_theory(names: &[String], rows: &[(usize, Option<String>, Vec<String>, String)]) -> Result<Theory> {
    let mut domains: Vec<Vec<String>> = vec![Vec::new(); names.len()];
    let mut classes: Vec<String> = Vec::new();
    for (_, _, values, class) in rows {
        for (dom, v) in domains.iter_mut().zip(values) {
            if !dom.contains(v) {
                dom.push(v.clone());
            }
        }
        if !classes.contains(class) {
            classes.push(class.clone());
        }
    }
    for dom in domains.iter_mut().chain(std::iter::once(&mut classes)) {
        while dom.len() < 2 {
            let pad = padding(dom);
            dom.push(pad);
        }
    }
    Theory::new(names.to_vec(), domains, classes)
}

fn padding(existing: &[String]) -> String {
    let mut pad = SENTINEL.to_string();
    while existing.contains(&pad) {
        pad.push('\'');
    }
    pad
}

/// How a target instance is picked out of a loaded table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetSelector {
    /// Zero-based data row.
    Row(usize),
    /// `key=value` pairs; a key is a feature name or the id column.
    Match(Vec<(String, String)>),
}

impl std::str::FromStr for TargetSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let pairs: Vec<(String, String)> = s
            .split(',')
            .map(|p| {
                p.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                    .ok_or_else(|| Error::Selector(format!("expected `key=value`, got `{p}`")))
            })
            .collect::<Result<_>>()?;
        if let [(k, v)] = pairs.as_slice() {
            if k == "row" {
                return v
                    .parse()
                    .map(TargetSelector::Row)
                    .map_err(|_| Error::Selector(format!("bad row index `{v}`")));
            }
        }
        Ok(TargetSelector::Match(pairs))
    }
}

impl TargetSelector {
    /// Index into the dataset of the selected instance.
    pub fn resolve(&self, data: &LoadedData) -> Result<usize> {
        match self {
            TargetSelector::Row(r) => data
                .rows
                .get(*r)
                .map(|row| row.instance)
                .ok_or_else(|| Error::Selector(format!("row {r} out of range ({} rows)", data.rows.len()))),
            TargetSelector::Match(pairs) => {
                let mut hits: Vec<usize> = Vec::new();
                for row in &data.rows {
                    let x = data.dataset.get(row.instance);
                    let mut ok = true;
                    for (k, v) in pairs {
                        let matched = if data.id_column.as_deref() == Some(k.as_str()) {
                            row.id.as_deref() == Some(v.as_str())
                        } else {
                            let f = data.theory.feature_index(k)?;
                            data.theory.value_index(f, v)? == x.get(f)
                        };
                        ok &= matched;
                    }
                    if ok && !hits.contains(&row.instance) {
                        hits.push(row.instance);
                    }
                }
                match hits.as_slice() {
                    [i] => Ok(*i),
                    [] => Err(Error::Selector("no row matches".into())),
                    _ => Err(Error::Selector(format!("{} distinct instances match", hits.len()))),
                }
            }
        }
    }
}
