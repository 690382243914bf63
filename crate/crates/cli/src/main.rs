mod doc;
mod oracle;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::sync::Arc;

use abduct::axioms::{
    axiom_lattice, axiom_matrix, check_incompatibility, compatible_sets, fixture, fixtures, implication_failures,
    incompatibility_fixture, incompatible_sets, Certificate, ExplainerId, Outcome, Universe,
};
use abduct::coherence::{
    find_minimal_irrefutable, irr_envelope, is_coherent_set, is_envelope, is_irrefutable, maximal_envelopes,
    sigma_from_envelope, Envelope,
};
use abduct::data::{load_dataset_file, Dataset, LoadOptions, LoadedData, Question, Row, Sample, TargetSelector};
use abduct::explainers::{
    all_caxp, all_dwaxp, ascending, descending, feature_space_question, find_caxp, is_dwaxp, lc_all, lw_all, trivial,
    ExplanationSet, DEFAULT_CAP,
};
use abduct::surrogate::{find_axp_tree, fit_surrogate, id3_fit, is_dwaxp_tree, lsu_explain, DecisionTree, Id3Config, SplitRule};
use abduct::theory::{PartialAssignment, Theory};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use doc::{show, shows, Doc, Format};

#[derive(Parser)]
#[command(name = "abduct", version, about = "Dataset-scoped abductive explanations for tabular classifiers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explain one instance of a labelled table.
    Explain(ExplainArgs),
    /// Compute the irrefutable envelope of a labelled table.
    Envelope(EnvelopeArgs),
    /// Check explainers against the reference axiom matrix.
    Axioms(AxiomsArgs),
    /// Fit an ID3 surrogate and explain its decisions.
    Surrogate(SurrogateArgs),
    /// Run the bundled animal dataset walkthrough.
    DemoZoo(OutArgs),
    /// Recompute explanations by brute force and compare.
    OracleCompare(OracleArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Comma-separated table with a header; the last column is the class.
    #[arg(long)]
    data: PathBuf,
    /// Optional `feature: v1,v2` domain declarations.
    #[arg(long)]
    domains: Option<PathBuf>,
    /// Column of row names, excluded from the features.
    #[arg(long)]
    id_column: Option<String>,
    /// Restrict the dataset to these zero-based rows; the classifier is
    /// still read from the whole table. `row=i` then counts selected rows.
    #[arg(long, value_delimiter = ',')]
    rows: Vec<usize>,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct SearchArgs {
    /// Upper bound on enumerated subsets or instances.
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Deletion order: `asc`, `desc` or a comma list of features.
    #[arg(long, default_value = "asc")]
    order: OrderSpec,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_enum)]
    explainer: ExplainerKind,
    /// Defaults to `one` for caxp and `all` otherwise.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// `row=i` or `feature=value,...` (the id column may be used as a key).
    #[arg(long)]
    target: TargetSelector,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Split::Binary)]
    split: Split,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct EnvelopeArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    /// Also list every subset-maximal envelope.
    #[arg(long)]
    all_maximal: bool,
    /// Also print the decision list built from the envelope.
    #[arg(long)]
    decision_list: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct AxiomsArgs {
    /// `desk` or the name of a bundled fixture.
    #[arg(long, default_value = "desk")]
    universe: String,
    /// Explainers to check, comma separated (Lw, Lc, Ldw, Ldc, Lco, Ltr, Lir, Lsu).
    #[arg(long, value_delimiter = ',')]
    explainers: Vec<String>,
    /// Also certify the incompatible and compatible axiom sets.
    #[arg(long)]
    certificates: bool,
    #[arg(long, default_value_t = 1 << 24, value_parser = clap::value_parser!(u64).range(1..))]
    cap: u64,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct SurrogateArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Explain only this instance.
    #[arg(long)]
    target: Option<TargetSelector>,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, value_enum, default_value_t = Split::Binary)]
    split: Split,
    /// Write the fitted tree as JSON.
    #[arg(long)]
    tree_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    search: SearchArgs,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExplainerKind {
    Dwaxp,
    Caxp,
    Trivial,
    Irrefutable,
    Surrogate,
    Lw,
    Lc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    All,
    One,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Split {
    Binary,
    Multiway,
}

impl Split {
    fn config(self) -> Id3Config {
        let split = match self {
            Split::Binary => SplitRule::Binary,
            Split::Multiway => SplitRule::Multiway,
        };
        Id3Config { split }
    }
}

#[derive(Clone, Debug)]
enum OrderSpec {
    Ascending,
    Descending,
    List(Vec<String>),
}

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "asc" => Ok(OrderSpec::Ascending),
            "desc" => Ok(OrderSpec::Descending),
            "" => Err("empty order".into()),
            list => Ok(OrderSpec::List(list.split(',').map(|f| f.trim().to_string()).collect())),
        }
    }
}

impl OrderSpec {
    /// Features by name or index; the deletion routines reject anything that
    /// is not a permutation.
    fn resolve(&self, t: &Theory) -> abduct::Result<Vec<usize>> {
        match self {
            OrderSpec::Ascending => Ok(ascending(t.n_features())),
            OrderSpec::Descending => Ok(descending(t.n_features())),
            OrderSpec::List(items) => items
                .iter()
                .map(|f| match f.parse::<usize>() {
                    Ok(i) if i < t.n_features() => Ok(i),
                    Ok(i) => Err(abduct::Error::UnknownFeature(i)),
                    Err(_) => t.feature_index(f),
                })
                .collect(),
        }
    }
}

enum Failure {
    Lib(abduct::Error),
    Io(std::io::Error),
    /// The document was produced but disagrees with what it checks.
    Discrepancy(String),
}

impl From<abduct::Error> for Failure {
    fn from(e: abduct::Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Lib(e) if e.is_capacity() => 3,
            Failure::Lib(_) | Failure::Io(_) => 2,
            Failure::Discrepancy(_) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self.code() {
            3 => "capacity",
            4 => "discrepancy",
            _ => "validation",
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
            Failure::Discrepancy(s) => s.clone(),
        }
    }
}

/// A document plus the discrepancy it reports, if any.
struct Report {
    doc: Doc,
    discrepancy: Option<String>,
}

impl From<Doc> for Report {
    fn from(doc: Doc) -> Self {
        Report { doc, discrepancy: None }
    }
}

fn load(a: &DataArgs) -> Result<LoadedData, Failure> {
    let opts = LoadOptions { id_column: a.id_column.clone() };
    let mut data = load_dataset_file(&a.data, a.domains.as_deref(), &opts)?;
    if a.rows.is_empty() {
        return Ok(data);
    }
    let mut dataset = Dataset::new();
    let mut rows = Vec::with_capacity(a.rows.len());
    for &r in &a.rows {
        let row = data.rows.get(r).ok_or_else(|| {
            abduct::Error::Selector(format!("row {r} out of range ({} rows)", data.rows.len()))
        })?;
        let x = data.dataset.get(row.instance).clone();
        dataset.push(x.clone());
        rows.push(Row { id: row.id.clone(), instance: dataset.position(&x).expect("just pushed") });
    }
    data.duplicates = rows.len() - dataset.len();
    data.dataset = Arc::new(dataset);
    data.rows = rows;
    Ok(data)
}

fn header(doc: &mut Doc, q: &Question) {
    let t = q.theory();
    doc.line(format!("question  {}", q.digest()));
    doc.line(format!(
        "target    instance {}: {} -> {}",
        q.target_index(),
        show(t, &q.target().to_assignment()),
        t.class_name(q.class())
    ));
}

fn question_json(q: &Question) -> serde_json::Value {
    let t = q.theory();
    json!({
        "digest": q.digest(),
        "instance": q.target_index(),
        "target": show(t, &q.target().to_assignment()),
        "class": t.class_name(q.class()),
    })
}

type Membership<'a> = dyn Fn(&PartialAssignment) -> abduct::Result<bool> + 'a;

/// Membership test plus, when `minimal`, failure of every single deletion.
fn verified(e: &PartialAssignment, minimal: bool, test: &Membership) -> abduct::Result<bool> {
    if !test(e)? {
        return Ok(false);
    }
    if minimal {
        for l in e.literals() {
            if test(&e.without(l.feature))? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn cmd_explain(a: &ExplainArgs) -> Result<Report, Failure> {
    use ExplainerKind::*;
    let data = load(&a.data)?;
    let sample = data.sample()?;
    let t = sample.theory().clone();
    let q = sample.question_at(a.target.resolve(&data)?);
    let x = q.target().clone();
    let order = a.search.order.resolve(&t)?;
    let cap = a.search.cap;
    let mode = a.mode.unwrap_or(if a.explainer == Caxp { Mode::One } else { Mode::All });
    let one = |e: PartialAssignment| -> ExplanationSet { std::iter::once(e).collect() };

    let tree = match a.explainer {
        Surrogate => Some(fit_surrogate(&sample, a.split.config())?),
        _ => None,
    };
    let space_q = match a.explainer {
        Lw | Lc => Some(feature_space_question(&q, cap)?),
        _ => None,
    };
    let set = match (a.explainer, mode) {
        (Dwaxp, Mode::All) => all_dwaxp(&q, cap)?,
        (Dwaxp | Lw, Mode::One) => one(x.to_assignment()),
        (Caxp, Mode::All) => all_caxp(&q, cap)?,
        (Caxp, Mode::One) => one(find_caxp(&q, &order)?),
        (Trivial, _) => trivial(&q),
        (Irrefutable, Mode::All) => all_dwaxp(&q, cap)?.into_iter().filter(|e| is_irrefutable(&q, e)).collect(),
        (Irrefutable, Mode::One) => one(find_minimal_irrefutable(&q, &order)?),
        (Surrogate, Mode::All) => lsu_explain(&q, tree.as_ref().expect("fitted"), cap)?,
        (Surrogate, Mode::One) => one(find_axp_tree(tree.as_ref().expect("fitted"), &x, &order)?),
        (Lw, Mode::All) => lw_all(&q, cap, cap)?,
        (Lc, Mode::All) => lc_all(&q, cap, cap)?,
        (Lc, Mode::One) => one(find_caxp(space_q.as_ref().expect("built"), &order)?),
    };

    let minimal = matches!((a.explainer, mode), (Caxp | Lc, _) | (Irrefutable | Surrogate, Mode::One));
    let test: Box<Membership> = match a.explainer {
        Dwaxp | Caxp | Trivial => Box::new(|e| Ok(is_dwaxp(&q, e))),
        Irrefutable => Box::new(|e| Ok(is_irrefutable(&q, e))),
        Surrogate => Box::new(|e| is_dwaxp_tree(tree.as_ref().expect("fitted"), &x, e)),
        Lw | Lc => Box::new(|e| Ok(is_dwaxp(space_q.as_ref().expect("built"), e))),
    };
    for e in set.iter() {
        if !verified(e, minimal, &*test)? {
            return Err(Failure::Discrepancy(format!("{} failed re-verification", show(&t, e))));
        }
    }

    let name = a.explainer.to_possible_value().expect("named").get_name().to_string();
    let mode_name = if mode == Mode::All { "all" } else { "one" };
    let items = shows(&t, set.iter());
    let mut doc = Doc::new(json!({
        "command": "explain",
        "explainer": name,
        "mode": mode_name,
        "question": question_json(&q),
        "explanations": items,
        "verified": true,
    }));
    header(&mut doc, &q);
    doc.line(format!("explainer {name} ({mode_name})"));
    doc.line(format!("explanations {}", items.len()));
    for s in &items {
        doc.line(format!("  {s}"));
    }
    Ok(doc.into())
}

fn envelope_json(t: &Theory, env: &Envelope) -> serde_json::Value {
    let members: Vec<_> = env.labelled().map(|(e, c)| json!({ "explanation": show(t, e), "class": t.class_name(c) })).collect();
    serde_json::Value::Array(members)
}

fn envelope_lines(doc: &mut Doc, t: &Theory, env: &Envelope, indent: &str) {
    for (e, c) in env.labelled() {
        doc.line(format!("{indent}{} -> {}", show(t, e), t.class_name(c)));
    }
}

fn cmd_envelope(a: &EnvelopeArgs) -> Result<Report, Failure> {
    let data = load(&a.data)?;
    let sample = data.sample()?;
    let t = sample.theory().clone();
    let irr = irr_envelope(&sample, a.cap)?;
    let members: Vec<PartialAssignment> = irr.members().cloned().collect();
    let check = is_envelope(&members, &sample);
    if !check.is_envelope() {
        return Err(Failure::Discrepancy(format!("irrefutable envelope failed re-verification: {check:?}")));
    }

    let mut json = json!({
        "command": "envelope",
        "dataset": sample.dataset().digest(),
        "classifier": sample.classifier_digest(),
        "irrefutable": envelope_json(&t, &irr),
    });
    let mut doc = Doc::new(serde_json::Value::Null);
    doc.line(format!("dataset    {}", sample.dataset().digest()));
    doc.line(format!("classifier {}", sample.classifier_digest()));
    doc.line(format!("irrefutable envelope ({} members)", irr.len()));
    envelope_lines(&mut doc, &t, &irr, "  ");

    if a.all_maximal {
        let all = maximal_envelopes(&sample, a.cap)?;
        json["maximal"] = serde_json::Value::Array(all.iter().map(|e| envelope_json(&t, e)).collect());
        doc.line(format!("maximal envelopes {}", all.len()));
        for (i, env) in all.iter().enumerate() {
            doc.line(format!("  #{i} ({} members)", env.len()));
            envelope_lines(&mut doc, &t, env, "    ");
        }
    }
    if a.decision_list {
        let list = sigma_from_envelope(&irr, &sample)?;
        let text = list.to_text(&t);
        json["decision_list"] = serde_json::Value::Array(text.lines().map(|l| json!(l)).collect());
        doc.line("decision list");
        for l in text.lines() {
            doc.line(format!("  {l}"));
        }
    }
    doc.json = json;
    Ok(doc.into())
}

fn universe(name: &str) -> Result<Universe, Failure> {
    if name == "desk" {
        return Ok(Universe::desk());
    }
    fixture(name)
        .map(|f| f.universe)
        .ok_or_else(|| Failure::Lib(abduct::Error::Selector(format!("unknown universe `{name}`"))))
}

fn outcome_text(o: &Outcome) -> String {
    match o {
        Outcome::Confirmed => "holds on universe".into(),
        Outcome::Witnessed { source, description } => format!("violated, witness from {source}: {description}"),
        Outcome::Counterexample { description } => format!("DISCREPANCY counterexample: {description}"),
        Outcome::Unwitnessed => "DISCREPANCY no witness found".into(),
        Outcome::Skipped { holds_on_universe } => format!("no expectation, holds on universe: {holds_on_universe}"),
        Outcome::Error(e) => format!("DISCREPANCY error: {e}"),
    }
}

fn cmd_axioms(a: &AxiomsArgs) -> Result<Report, Failure> {
    let u = universe(&a.universe)?;
    let ids: Vec<ExplainerId> = if a.explainers.is_empty() {
        ExplainerId::TABLE.to_vec()
    } else {
        a.explainers.iter().map(|s| s.parse()).collect::<abduct::Result<_>>()?
    };
    let report = axiom_matrix(&ids, &u, &fixtures());
    let mut problems: Vec<String> =
        report.discrepancies().iter().map(|c| format!("{} {}: {}", c.explainer, c.axiom, outcome_text(&c.outcome))).collect();
    for (id, holds) in &report.holds {
        for f in implication_failures(*holds) {
            problems.push(format!("{id}: implication fails: {f}"));
        }
    }

    let mut doc = Doc::new(serde_json::Value::Null);
    doc.line(format!("universe {} ({} questions) {}", u.name, u.len(), u.digest()));
    doc.line(report.render().trim_end());
    for c in &report.cells {
        doc.line(format!("{:<4} {:<22} expected {:<9} {}", c.explainer, c.axiom.name(), format!("{:?}", c.expected), outcome_text(&c.outcome)));
    }
    let mut json = json!({
        "command": "axioms",
        "universe": { "name": u.name, "questions": u.len(), "digest": u.digest() },
        "cells": report.cells,
    });

    if a.certificates {
        let mut certs = Vec::new();
        for (label, set) in incompatible_sets() {
            let name = incompatibility_fixture(label).expect("every set has a fixture");
            let f = fixture(name).expect("bundled");
            let cert = check_incompatibility(set, &f.universe, a.cap)?;
            let line = match &cert {
                Certificate::Incompatible { checked } => format!("{label} {set}: incompatible on {name}, {checked} assignments"),
                Certificate::Compatible { .. } => {
                    problems.push(format!("{label} satisfiable on {name}"));
                    format!("{label} {set}: DISCREPANCY satisfiable on {name}")
                }
            };
            doc.line(&line);
            certs.push(line);
        }
        let proof: Vec<_> = ["three-classes", "growth-new-counterexample"].map(|n| fixture(n).expect("bundled")).into();
        for (label, set) in compatible_sets() {
            for f in &proof {
                let line = match check_incompatibility(set, &f.universe, a.cap)? {
                    Certificate::Compatible { checked, .. } => format!("{label} {set}: satisfied on {} after {checked}", f.name),
                    Certificate::Incompatible { .. } => {
                        problems.push(format!("{label} unsatisfiable on {}", f.name));
                        format!("{label} {set}: DISCREPANCY unsatisfiable on {}", f.name)
                    }
                };
                doc.line(&line);
                certs.push(line);
            }
        }
        let lattice = axiom_lattice(&proof.iter().map(|f| &f.universe).collect::<Vec<_>>(), a.cap)?;
        let minimal: Vec<String> = lattice.minimal_incompatible.iter().map(|s| s.to_string()).collect();
        let maximal: Vec<String> = lattice.maximal_compatible.iter().map(|s| s.to_string()).collect();
        doc.line("minimal incompatible sets");
        minimal.iter().for_each(|s| doc.line(format!("  {s}")));
        doc.line("maximal compatible sets");
        maximal.iter().for_each(|s| doc.line(format!("  {s}")));
        json["certificates"] = json!(certs);
        json["lattice"] = json!({ "minimal_incompatible": minimal, "maximal_compatible": maximal });
    }

    doc.line(format!("discrepancies {}", problems.len()));
    for p in &problems {
        doc.line(format!("  {p}"));
    }
    json["discrepancies"] = json!(problems);
    doc.json = json;
    let discrepancy = (!problems.is_empty()).then(|| format!("{} discrepancies", problems.len()));
    Ok(Report { doc, discrepancy })
}

fn row_name(data: &LoadedData, instance: usize) -> String {
    data.rows
        .iter()
        .find(|r| r.instance == instance)
        .and_then(|r| r.id.clone())
        .unwrap_or_else(|| format!("#{instance}"))
}

fn cmd_surrogate(a: &SurrogateArgs) -> Result<Report, Failure> {
    let data = load(&a.data)?;
    let sample = data.sample()?;
    let t = sample.theory().clone();
    let order = a.search.order.resolve(&t)?;
    let tree = id3_fit(&sample, a.split.config())?;
    if let Some(p) = &a.tree_out {
        std::fs::write(p, tree.to_json()?)?;
    }
    let correct = data.rows.iter().filter(|r| tree.predict(sample.dataset().get(r.instance)).ok() == Some(sample.label(r.instance))).count();
    let root = tree.root_feature().map(|f| t.feature_name(f).to_string());
    let targets: Vec<usize> = match &a.target {
        Some(sel) => vec![sel.resolve(&data)?],
        None => (0..sample.len()).collect(),
    };
    let mut rows = Vec::new();
    let mut doc = Doc::new(serde_json::Value::Null);
    doc.line(format!("dataset    {}", sample.dataset().digest()));
    doc.line(format!("classifier {}", sample.classifier_digest()));
    doc.line(format!("root {}", root.as_deref().unwrap_or("(leaf)")));
    doc.line(format!("leaves {}", tree.n_leaves()));
    doc.line(format!("accuracy {correct}/{}", data.n_rows()));
    doc.line("tree");
    for l in tree.to_text(&t).lines() {
        doc.line(format!("  {l}"));
    }
    doc.line("explanations");
    for i in targets {
        let q = sample.question_at(i);
        let axp = find_axp_tree(&tree, q.target(), &order)?;
        let test = |e: &PartialAssignment| is_dwaxp_tree(&tree, q.target(), e);
        if !verified(&axp, true, &test)? {
            return Err(Failure::Discrepancy(format!("{} failed re-verification", show(&t, &axp))));
        }
        let predicted = t.class_name(tree.predict(q.target())?).to_string();
        doc.line(format!("  {} [{}] -> {predicted}: {}", row_name(&data, i), q.digest(), show(&t, &axp)));
        rows.push(json!({ "name": row_name(&data, i), "question": q.digest(), "prediction": predicted, "axp": show(&t, &axp) }));
    }
    doc.json = json!({
        "command": "surrogate",
        "dataset": sample.dataset().digest(),
        "root": root,
        "leaves": tree.n_leaves(),
        "accuracy": { "correct": correct, "rows": data.n_rows() },
        "tree": serde_json::from_str::<serde_json::Value>(&tree.to_json()?).map_err(abduct::Error::from)?,
        "explanations": rows,
    });
    Ok(doc.into())
}

const LISTED_IRREFUTABLE: &str = "hair=1,feathers=0,eggs=0,milk=1,airborne=0,aquatic=0,predator=0,\
                                  toothed=1,backbone=1,breathes=1,venomous=0,legs=4,tail=1,catsize=1";

struct Checklist {
    items: Vec<(bool, String)>,
}

impl Checklist {
    fn add(&mut self, ok: bool, what: String) {
        self.items.push((ok, what));
    }
}

fn zoo_question(data: &LoadedData, sample: &Arc<Sample>, name: &str) -> Result<Question, Failure> {
    let sel: TargetSelector = format!("name={name}").parse()?;
    Ok(sample.question_at(sel.resolve(data)?))
}

fn cmd_demo_zoo() -> Result<Report, Failure> {
    let data = abduct::zoo::load()?;
    let sample = data.sample()?;
    let t = sample.theory().clone();
    let p = |s: &str| t.parse_assignment(s);
    let antelope = zoo_question(&data, &sample, "antelope")?;
    let crow = zoo_question(&data, &sample, "crow")?;
    let mut list = Checklist { items: Vec::new() };
    let concise = |q: &Question, e: &PartialAssignment| verified(e, true, &|f| Ok(is_dwaxp(q, f)));

    list.add(
        true,
        format!("{} rows, {} distinct instances, {} features, {} classes", data.n_rows(), sample.len(), t.n_features(), t.n_classes()),
    );
    let milk = p("milk=1")?;
    let feathers = p("feathers=1")?;
    list.add(concise(&antelope, &milk)?, "milk=1 is a concise explanation of antelope".into());
    list.add(concise(&crow, &feathers)?, "feathers=1 is a concise explanation of crow".into());
    let pair = [milk.clone(), feathers.clone()];
    list.add(!is_coherent_set(&pair, &sample).is_coherent(), "together they are incoherent".into());
    for (name, order) in [("ascending", ascending(t.n_features())), ("descending", descending(t.n_features()))] {
        let e = find_caxp(&antelope, &order)?;
        list.add(concise(&antelope, &e)?, format!("greedy deletion ({name}) for antelope gives {}", show(&t, &e)));
    }

    let listed = p(LISTED_IRREFUTABLE)?;
    let holds = is_irrefutable(&antelope, &listed);
    let tight = listed.literals().all(|l| !is_irrefutable(&antelope, &listed.without(l.feature)));
    list.add(holds && tight, format!("listed {}-literal set for antelope is irrefutable ({holds}) and tight ({tight})", listed.len()));
    let found = find_minimal_irrefutable(&antelope, &ascending(t.n_features()))?;
    let ok = verified(&found, true, &|f| Ok(is_irrefutable(&antelope, f)))?;
    list.add(ok, format!("minimal irrefutable explanation of antelope has {} literals: {}", found.len(), show(&t, &found)));
    let crow_irr = find_minimal_irrefutable(&crow, &ascending(t.n_features()))?;
    list.add(
        verified(&crow_irr, true, &|f| Ok(is_irrefutable(&crow, f)))?,
        format!("minimal irrefutable explanation of crow has {} literals", crow_irr.len()),
    );

    let tree: DecisionTree = id3_fit(&sample, Id3Config::default())?;
    let correct = data.rows.iter().filter(|r| tree.predict(sample.dataset().get(r.instance)).ok() == Some(sample.label(r.instance))).count();
    list.add(correct == data.n_rows(), format!("ID3 tree classifies {correct}/{} rows", data.n_rows()));
    let root = tree.root_feature().map(|f| t.feature_name(f));
    list.add(root == Some("milk"), format!("root feature is {}", root.unwrap_or("(leaf)")));
    let order = ascending(t.n_features());
    let axp_a = find_axp_tree(&tree, antelope.target(), &order)?;
    let axp_c = find_axp_tree(&tree, crow.target(), &order)?;
    list.add(axp_a == milk, format!("tree explanation of antelope is {}", show(&t, &axp_a)));
    list.add(axp_c == p("milk=0,feathers=1")?, format!("tree explanation of crow is {}", show(&t, &axp_c)));
    let all_a = lsu_explain(&antelope, &tree, DEFAULT_CAP)?.minimal();
    list.add(true, format!("antelope has {} minimal tree explanation(s)", all_a.len()));
    let pair = [axp_a, axp_c];
    list.add(is_coherent_set(&pair, &sample).is_coherent(), "the two tree explanations are coherent".into());

    let mut doc = Doc::new(serde_json::Value::Null);
    doc.line(format!("dataset    {}", sample.dataset().digest()));
    doc.line(format!("antelope   {}", antelope.digest()));
    doc.line(format!("crow       {}", crow.digest()));
    for (ok, what) in &list.items {
        doc.line(format!("[{}] {what}", if *ok { "PASS" } else { "FAIL" }));
    }
    let failed = list.items.iter().filter(|(ok, _)| !ok).count();
    doc.line(format!("{failed} of {} checks failed", list.items.len()));
    doc.json = json!({
        "command": "demo-zoo",
        "dataset": sample.dataset().digest(),
        "questions": { "antelope": antelope.digest(), "crow": crow.digest() },
        "checks": list.items.iter().map(|(ok, what)| json!({ "pass": ok, "check": what })).collect::<Vec<_>>(),
        "failed": failed,
    });
    let discrepancy = (failed > 0).then(|| format!("{failed} checks failed"));
    Ok(Report { doc, discrepancy })
}

fn cmd_oracle(a: &OracleArgs) -> Result<Report, Failure> {
    let data = load(&a.data)?;
    let sample = data.sample()?;
    let order = a.search.order.resolve(sample.theory())?;
    let (doc, mismatches) = oracle::compare(&sample, &order, a.search.cap)?;
    let discrepancy = (mismatches > 0).then(|| format!("{mismatches} mismatches"));
    Ok(Report { doc, discrepancy })
}

fn out_args(c: &Command) -> &OutArgs {
    match c {
        Command::Explain(a) => &a.out,
        Command::Envelope(a) => &a.out,
        Command::Axioms(a) => &a.out,
        Command::Surrogate(a) => &a.out,
        Command::DemoZoo(a) => a,
        Command::OracleCompare(a) => &a.out,
    }
}

fn run(c: &Command) -> Result<Report, Failure> {
    match c {
        Command::Explain(a) => cmd_explain(a),
        Command::Envelope(a) => cmd_envelope(a),
        Command::Axioms(a) => cmd_axioms(a),
        Command::Surrogate(a) => cmd_surrogate(a),
        Command::DemoZoo(_) => cmd_demo_zoo(),
        Command::OracleCompare(a) => cmd_oracle(a),
    }
}

fn fail(f: &Failure, format: Format) -> ExitCode {
    match format {
        Format::Json => eprintln!("{}", json!({ "error": { "kind": f.kind(), "code": f.code(), "message": f.message() } })),
        Format::Text => eprintln!("error ({}): {}", f.kind(), f.message()),
    }
    ExitCode::from(f.code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = out_args(&cli.command);
    let format = out.format;
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(f) => return fail(&f, format),
    };
    if let Err(e) = report.doc.emit(format, out.out.as_deref().map(Path::new)) {
        return fail(&Failure::Io(e), format);
    }
    match report.discrepancy {
        Some(d) => fail(&Failure::Discrepancy(d), format),
        None => ExitCode::SUCCESS,
    }
}
