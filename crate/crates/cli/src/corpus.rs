use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use goodcolim::diagrams::{linearize, star_extend, validate_smooth};
use goodcolim::report::{InstanceReport, Locator, Outcome, Section};
use goodcolim::soa::{classical_soa, eliminate_retract, fat_soa, push_down_cells, RetractOutcome};
use goodcolim::suite::RETRACT_BUDGET;
use goodcolim::{Diagram, GeneratorSet, GraphMorphism, Limits, SmoothDiagram};

use crate::io::{ensure_dir, instance_id, load_generators, read_json, PushdownFile, RetractFile};

/// Explicit argument, then `$GOODCOLIM_CORPUS`, then `./corpus`, then the
/// corpus shipped with the sources.
pub fn resolve_dir(arg: Option<PathBuf>) -> Result<PathBuf> {
    let dir = arg.or_else(|| std::env::var_os("GOODCOLIM_CORPUS").map(PathBuf::from)).unwrap_or_else(|| {
        let local = PathBuf::from("corpus");
        if local.is_dir() {
            local
        } else {
            Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
        }
    });
    ensure_dir(&dir)?;
    Ok(dir)
}

pub fn display_dir(dir: &Path) -> String {
    dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| dir.display().to_string())
}

fn files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("listing {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    out.retain(|p| p.extension().is_some_and(|e| e == "json"));
    out.sort();
    Ok(out)
}

fn failed(op: &str, id: &str, e: &goodcolim::Error) -> Outcome {
    Outcome::Failed { locator: Locator::from_error(op, id, e) }
}

fn check_diagram(path: &Path, gens: &GeneratorSet, limits: &Limits) -> Result<InstanceReport> {
    let id = instance_id(path);
    let raw: Diagram = read_json(path)?;
    let report = validate_smooth(&raw)?;
    if let Some(v) = report.violations.first() {
        let locator = Locator::new("validate_smooth", &id, v.reason.clone()).at(v.element.clone());
        return Ok(InstanceReport::new(id, Outcome::Failed { locator }));
    }
    let run = || -> goodcolim::Result<()> {
        let d = SmoothDiagram::new(raw)?;
        linearize(&d, gens, limits)?.verify(gens)?;
        if !star_extend(&d)?.comparison.is_iso() {
            return Err(goodcolim::Error::verification("star_extend", "colimit changed"));
        }
        Ok(())
    };
    let outcome = run().map_or_else(|e| failed("linearize", &id, &e), |()| Outcome::Passed);
    Ok(InstanceReport::new(id, outcome))
}

fn check_morphism(path: &Path, gens: &GeneratorSet, budget: usize, limits: &Limits) -> Result<InstanceReport> {
    let id = instance_id(path);
    let f: GraphMorphism = read_json(path)?;
    let run = || -> goodcolim::Result<Outcome> {
        let fat = fat_soa(&f, gens, budget, limits)?;
        fat.verify(gens, limits)?;
        if !fat.status.converged() {
            return Ok(Outcome::BudgetExhausted { iterations: fat.status.iterations() });
        }
        let classical = classical_soa(&f, gens, budget, limits)?;
        if classical.status.converged() && fat.compare(&classical).is_none() {
            let locator = Locator::new("agreement", &id, "fat and classical middle objects differ");
            return Ok(Outcome::Failed { locator });
        }
        Ok(Outcome::Converged { iterations: fat.status.iterations() })
    };
    let outcome = run().unwrap_or_else(|e| failed("fat_soa", &id, &e));
    Ok(InstanceReport::new(id, outcome))
}

fn check_pushdown(path: &Path, gens: &GeneratorSet, limits: &Limits) -> Result<InstanceReport> {
    let id = instance_id(path);
    let inst: PushdownFile = read_json(path)?;
    let outcome = push_down_cells(&inst.diagram, &inst.staging, gens, limits)
        .and_then(|r| r.verify(&inst.diagram, &inst.staging, gens))
        .map_or_else(|e| failed("push_down_cells", &id, &e), |()| Outcome::Passed);
    Ok(InstanceReport::new(id, outcome))
}

fn check_retract(path: &Path, gens: &GeneratorSet, limits: &Limits) -> Result<InstanceReport> {
    let id = instance_id(path);
    let inst: RetractFile = read_json(path)?;
    let outcome = match eliminate_retract(&inst.diagram, &inst.idempotent, gens, RETRACT_BUDGET, limits) {
        Ok(RetractOutcome::Certified(c)) => {
            c.verify(gens, limits).map_or_else(|e| failed("eliminate_retract", &id, &e), |()| Outcome::Passed)
        }
        Ok(RetractOutcome::Inconclusive { reason, .. }) => Outcome::Inconclusive { reason },
        Err(e) => failed("eliminate_retract", &id, &e),
    };
    Ok(InstanceReport::new(id, outcome))
}

/// One section per corpus subdirectory that exists.
pub fn run_corpus(dir: &Path, budget: usize, limits: &Limits) -> Result<Vec<Section>> {
    let gen_file = dir.join("generators/x_std.json");
    let gens = load_generators(gen_file.is_file().then_some(gen_file.as_path()))?;
    let mut sections = Vec::new();
    let mut add = |name: &str, results: Vec<InstanceReport>| {
        if !results.is_empty() {
            sections.push(Section::new(name, results));
        }
    };
    add("corpus/diagrams", files(&dir.join("diagrams"))?.iter().map(|p| check_diagram(p, &gens, limits)).collect::<Result<_>>()?);
    add(
        "corpus/morphisms",
        files(&dir.join("morphisms"))?.iter().map(|p| check_morphism(p, &gens, budget, limits)).collect::<Result<_>>()?,
    );
    add("corpus/pushdown", files(&dir.join("pushdown"))?.iter().map(|p| check_pushdown(p, &gens, limits)).collect::<Result<_>>()?);
    add("corpus/retract", files(&dir.join("retract"))?.iter().map(|p| check_retract(p, &gens, limits)).collect::<Result<_>>()?);
    Ok(sections)
}
