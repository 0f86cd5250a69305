use std::path::Path;

use anyhow::{bail, Context, Result};
use goodcolim::diagrams::ChainPresentation;
use goodcolim::soa::{FactorizationCertificate, PushdownResult, RetractCertificate, Staging};
use goodcolim::{GeneratorSet, GraphMorphism, Limits, SmoothDiagram};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Parses a JSON file; syntax errors carry their line and column.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The generator file, or `X_std` when none is given.
pub fn load_generators(path: Option<&Path>) -> Result<GeneratorSet> {
    match path {
        None => Ok(GeneratorSet::standard()),
        Some(p) => {
            let gens: GeneratorSet = read_json(p)?;
            gens.check(&Limits::default()).with_context(|| format!("checking generators in {}", p.display()))?;
            Ok(gens)
        }
    }
}

pub fn instance_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

/// A diagram with a staging of its bottom object, and the pushdown once computed.
#[derive(Serialize, Deserialize)]
pub struct PushdownFile {
    pub diagram: SmoothDiagram,
    pub staging: Staging,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<PushdownResult>,
}

/// A diagram with an idempotent on its colimit.
#[derive(Serialize, Deserialize)]
pub struct RetractFile {
    pub diagram: SmoothDiagram,
    pub idempotent: GraphMorphism,
}

/// Any certificate the tool writes.
pub enum Certificate {
    Factorization(Box<FactorizationCertificate>),
    Retract(Box<RetractCertificate>),
    Pushdown(Box<PushdownFile>),
    Chain(ChainPresentation),
}

impl<'de> Deserialize<'de> for Certificate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(d)?;
        let has = |k: &str| value.get(k).is_some();
        let cert = if has("mode") {
            Certificate::Factorization(serde_json::from_value(value).map_err(D::Error::custom)?)
        } else if has("split") {
            Certificate::Retract(serde_json::from_value(value).map_err(D::Error::custom)?)
        } else if has("staging") {
            Certificate::Pushdown(serde_json::from_value(value).map_err(D::Error::custom)?)
        } else if has("link_certificates") {
            Certificate::Chain(serde_json::from_value(value).map_err(D::Error::custom)?)
        } else {
            return Err(D::Error::custom("not a factorization, retract, pushdown or chain certificate"));
        };
        Ok(cert)
    }
}

impl Certificate {
    pub fn verify(&self, gens: &GeneratorSet, limits: &Limits) -> goodcolim::Result<()> {
        match self {
            Certificate::Factorization(c) => c.verify(gens, limits),
            Certificate::Retract(c) => c.verify(gens, limits),
            Certificate::Chain(c) => c.verify(gens),
            Certificate::Pushdown(p) => match &p.result {
                Some(r) => r.verify(&p.diagram, &p.staging, gens),
                None => Err(goodcolim::Error::verification("pushdown", "file carries no result")),
            },
        }
    }
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    if !path.is_dir() {
        bail!("corpus directory {} not found", path.display());
    }
    Ok(())
}
