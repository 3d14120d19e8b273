//! Reading and validating input files.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use sha2::{Digest, Sha256};

use laxkit::distance::Certificate;
use laxkit::logic::{parse, Formula};
use laxkit::systems::Severity;
use laxkit::{Coalgebra, FunctorSpec, Lifting, LiftingSpec};

/// An input file together with its SHA-256 digest.
#[derive(Clone, Debug)]
pub struct Input {
    pub path: PathBuf,
    pub text: String,
    pub sha256: String,
}

pub fn read(path: &Path) -> Result<Input> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text =
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    Ok(Input {
        path: path.to_path_buf(),
        text,
        sha256,
    })
}

pub fn json(input: &Input) -> Result<Value> {
    serde_json::from_str(&input.text).map_err(|e| {
        anyhow!(
            "{}: malformed JSON at line {}, column {}: {e}",
            input.path.display(),
            e.line(),
            e.column()
        )
    })
}

/// Parses and validates a system; warnings go to stderr, errors are fatal.
pub fn system(input: &Input) -> Result<Coalgebra> {
    let ingest = Coalgebra::ingest(&json(input)?);
    let mut errors = Vec::new();
    for d in &ingest.diagnostics {
        match d.severity {
            Severity::Warning => eprintln!("{}: {d}", input.path.display()),
            Severity::Error => errors.push(format!("{}: {d}", input.path.display())),
        }
    }
    match ingest.system {
        Some(sys) if errors.is_empty() => Ok(sys),
        _ => bail!("{}", errors.join("\n")),
    }
}

pub fn lifting_spec(input: &Input) -> Result<LiftingSpec> {
    LiftingSpec::from_json(&json(input)?)
        .with_context(|| format!("{}: bad lifting", input.path.display()))
}

pub fn lifting(input: &Input, functor: &Arc<FunctorSpec>) -> Result<Lifting> {
    Lifting::bind(lifting_spec(input)?, functor.clone())
        .with_context(|| format!("{}: lifting does not fit the systems", input.path.display()))
}

pub fn functor(input: &Input) -> Result<FunctorSpec> {
    let v = json(input)?;
    // Accept a bare functor or anything carrying a `functor` field.
    let f = v.get("functor").unwrap_or(&v);
    FunctorSpec::from_json(f).with_context(|| format!("{}: bad functor", input.path.display()))
}

pub fn certificate(input: &Input) -> Result<Certificate> {
    Certificate::from_json(&json(input)?)
        .with_context(|| format!("{}: bad certificate", input.path.display()))
}

/// JSON when the file looks like JSON, the text syntax otherwise.
pub fn formula(input: &Input) -> Result<Arc<Formula>> {
    let looks_json = input.path.extension().is_some_and(|e| e == "json")
        || input.text.trim_start().starts_with('{');
    if looks_json {
        Formula::from_json(&json(input)?)
            .with_context(|| format!("{}: bad formula", input.path.display()))
    } else {
        parse(input.text.trim()).with_context(|| format!("{}: bad formula", input.path.display()))
    }
}

pub fn state(system: &Coalgebra, id: &str, path: &Path) -> Result<usize> {
    system
        .carrier()
        .position(id)
        .ok_or_else(|| anyhow!("{}: no state `{id}`", path.display()))
}
