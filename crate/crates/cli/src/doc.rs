use std::fmt::Write as _;
use std::path::Path;

use abduct::theory::{PartialAssignment, Theory};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// An output document kept in both renderings.
pub struct Doc {
    pub json: Value,
    pub text: String,
}

impl Doc {
    pub fn new(json: Value) -> Self {
        Doc { json, text: String::new() }
    }

    pub fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.text, "{}", s.as_ref());
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> std::io::Result<()> {
        let body = self.render(format);
        match out {
            Some(p) => std::fs::write(p, body),
            None => {
                print!("{body}");
                Ok(())
            }
        }
    }
}

/// `f=v,...` form, or `{}` for the empty assignment.
pub fn show(t: &Theory, e: &PartialAssignment) -> String {
    t.show(e)
}

pub fn shows<'a>(t: &Theory, items: impl IntoIterator<Item = &'a PartialAssignment>) -> Vec<String> {
    items.into_iter().map(|e| show(t, e)).collect()
}
