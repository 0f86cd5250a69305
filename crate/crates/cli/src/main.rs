mod corpus;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use goodcolim::diagrams::{linearize, validate_smooth};
use goodcolim::posets::directed_completion;
use goodcolim::report::{InstanceReport, Locator, Outcome, RunReport, Section};
use goodcolim::soa::{classical_soa, eliminate_retract, fat_soa, push_down_cells, RetractOutcome};
use goodcolim::suite::{run_suite, SuiteConfig, DEFAULT_SEED};
use goodcolim::{FinitePoset, GraphMorphism, Limits, SmoothDiagram};
use serde_json::json;

use crate::io::{instance_id, load_generators, read_json, Certificate, PushdownFile, RetractFile};

#[derive(Parser)]
#[command(name = "goodcolim", version, about = "Fat small object arguments over finite directed multigraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Largest vertex count in any enumerated hom-set.
    #[arg(long, default_value_t = Limits::default().max_vertices)]
    max_vertices: usize,
    /// Largest number of morphisms returned by one enumeration.
    #[arg(long, default_value_t = Limits::default().max_homs)]
    max_homs: usize,
    /// Print the run report as JSON.
    #[arg(long)]
    json: bool,
    /// Write the certificate (or result) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn limits(&self) -> Result<Limits> {
        if self.max_vertices == 0 || self.max_homs == 0 {
            bail!("limits must be positive");
        }
        Ok(Limits { max_vertices: self.max_vertices, max_homs: self.max_homs })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Fat,
    Classical,
}

#[derive(Subcommand)]
enum Command {
    /// Factor a morphism as a cellular map followed by a map with the lifting property.
    Factorize {
        morphism: PathBuf,
        generators: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "fat")]
        mode: ModeArg,
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Re-check every witness of a certificate.
    Verify {
        certificate: PathBuf,
        generators: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Turn a good diagram into a chain of certified pushouts.
    Linearize {
        diagram: PathBuf,
        generators: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Add a top to a good poset unless it is already directed.
    CompletePoset {
        poset: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Push the cells of a diagram down to a stage of its bottom object.
    Pushdown {
        instance: PathBuf,
        generators: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Present the image of an idempotent on a cellular map as cellular.
    EliminateRetract {
        instance: PathBuf,
        generators: Option<PathBuf>,
        /// Candidate components examined while lifting the idempotent.
        #[arg(long, default_value_t = goodcolim::suite::RETRACT_BUDGET)]
        budget: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run the property suite and the bundled corpus.
    Suite {
        /// Corpus directory (default: $GOODCOLIM_CORPUS, then ./corpus).
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Random instances per property.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Largest number of poset elements in random diagrams.
        #[arg(long, default_value_t = 6)]
        max_size: usize,
        #[arg(long, default_value_t = 8)]
        budget: usize,
        /// List every instance in the human-readable report.
        #[arg(long)]
        verbose: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn single(command: String, name: &str, report: InstanceReport) -> RunReport {
    RunReport::new(command, None, vec![Section::new(name, vec![report])])
}

fn failed(op: &str, id: &str, err: &goodcolim::Error) -> Outcome {
    Outcome::Failed { locator: Locator::from_error(op, id, err) }
}

fn write_out(common: &Common, value: &impl serde::Serialize) -> Result<Option<String>> {
    let Some(path) = &common.out else { return Ok(None) };
    let text = serde_json::to_string_pretty(value)? + "\n";
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(Some(path.display().to_string()))
}

fn emit(report: &RunReport, common: &Common, verbose: bool) {
    if common.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render(verbose));
    }
}

fn run(cli: Cli) -> Result<(RunReport, bool, Common)> {
    let echo = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    Ok(match cli.command {
        Command::Factorize { morphism, generators, mode, budget, common } => {
            let limits = common.limits()?;
            let f: GraphMorphism = read_json(&morphism)?;
            let gens = load_generators(generators.as_deref())?;
            let id = instance_id(&morphism);
            let (name, cert) = match mode {
                ModeArg::Fat => ("fat_soa", fat_soa(&f, &gens, budget, &limits)),
                ModeArg::Classical => ("classical_soa", classical_soa(&f, &gens, budget, &limits)),
            };
            let cert = cert.with_context(|| format!("factorizing {}", morphism.display()))?;
            let outcome = if cert.status.converged() {
                Outcome::Converged { iterations: cert.status.iterations() }
            } else {
                Outcome::BudgetExhausted { iterations: cert.status.iterations() }
            };
            let mut r = InstanceReport::new(id, outcome);
            r.certificate = write_out(&common, &cert)?;
            (single(echo, name, r), true, common)
        }
        Command::Verify { certificate, generators, common } => {
            let limits = common.limits()?;
            let cert: Certificate = read_json(&certificate)?;
            let gens = load_generators(generators.as_deref())?;
            let id = instance_id(&certificate);
            let outcome = match cert.verify(&gens, &limits) {
                Ok(()) => Outcome::Verified,
                Err(e) => failed("verify", &id, &e),
            };
            (single(echo, "verify", InstanceReport::new(id, outcome)), true, common)
        }
        Command::Linearize { diagram, generators, common } => {
            let limits = common.limits()?;
            let raw: goodcolim::Diagram = read_json(&diagram)?;
            let gens = load_generators(generators.as_deref())?;
            let id = instance_id(&diagram);
            let report = validate_smooth(&raw)?;
            let outcome = if let Some(v) = report.violations.first() {
                Outcome::Failed {
                    locator: Locator::new("validate_smooth", &id, v.reason.clone()).at(v.element.clone()),
                }
            } else {
                let d = SmoothDiagram::new(raw)?;
                match linearize(&d, &gens, &limits).and_then(|c| c.verify(&gens).map(|()| c)) {
                    Ok(chain) => {
                        let mut r = InstanceReport::new(id, Outcome::Passed);
                        r.certificate = write_out(&common, &chain)?;
                        return Ok((single(echo, "linearize", r), true, common));
                    }
                    Err(e) => failed("linearize", &id, &e),
                }
            };
            (single(echo, "linearize", InstanceReport::new(id, outcome)), true, common)
        }
        Command::CompletePoset { poset, common } => {
            let p: FinitePoset = read_json(&poset)?;
            let done = directed_completion(&p)?;
            let added = done.added_top.map(|t| done.poset.id(t).to_string());
            let mut r = InstanceReport::new(instance_id(&poset), Outcome::Passed);
            r.certificate = write_out(&common, &json!({ "poset": done.poset, "added_top": added }))?;
            if common.out.is_none() && !common.json {
                println!("{}", serde_json::to_string_pretty(&json!({ "poset": done.poset, "added_top": added }))?);
            }
            (single(echo, "complete_poset", r), true, common)
        }
        Command::Pushdown { instance, generators, common } => {
            let limits = common.limits()?;
            let inst: PushdownFile = read_json(&instance)?;
            let gens = load_generators(generators.as_deref())?;
            let id = instance_id(&instance);
            let result = push_down_cells(&inst.diagram, &inst.staging, &gens, &limits)
                .and_then(|r| r.verify(&inst.diagram, &inst.staging, &gens).map(|()| r));
            let r = match result {
                Ok(res) => {
                    let mut r = InstanceReport::new(id, Outcome::Passed);
                    r.certificate = write_out(&common, &PushdownFile { result: Some(res), ..inst })?;
                    r
                }
                Err(e) => InstanceReport::new(id.clone(), failed("push_down_cells", &id, &e)),
            };
            (single(echo, "pushdown", r), true, common)
        }
        Command::EliminateRetract { instance, generators, budget, common } => {
            let limits = common.limits()?;
            let inst: RetractFile = read_json(&instance)?;
            let gens = load_generators(generators.as_deref())?;
            let id = instance_id(&instance);
            let r = match eliminate_retract(&inst.diagram, &inst.idempotent, &gens, budget, &limits) {
                Ok(RetractOutcome::Certified(cert)) => {
                    let mut r = InstanceReport::new(id, Outcome::Passed);
                    r.certificate = write_out(&common, &cert)?;
                    r
                }
                Ok(RetractOutcome::Inconclusive { trace, reason }) => {
                    eprintln!("inconclusive: {reason}");
                    let mut r = InstanceReport::new(id, Outcome::Inconclusive { reason: reason.clone() });
                    r.certificate = write_out(&common, &RetractOutcome::Inconclusive { trace, reason })?;
                    r
                }
                Err(e) => InstanceReport::new(id.clone(), failed("eliminate_retract", &id, &e)),
            };
            (single(echo, "eliminate_retract", r), true, common)
        }
        Command::Suite { corpus, seed, count, max_size, budget, verbose, common } => {
            let limits = common.limits()?;
            let dir = corpus::resolve_dir(corpus)?;
            let config = SuiteConfig { seed, count, max_size, budget, limits };
            let mut report = run_suite(&config)?;
            report.sections.extend(corpus::run_corpus(&dir, budget, &limits)?);
            report.command = format!("{} --corpus {}", report.command, corpus::display_dir(&dir));
            if let Some(p) = write_out(&common, &report)? {
                eprintln!("report written to {p}");
            }
            (report, verbose, common)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((report, verbose, common)) => {
            emit(&report, &common, verbose);
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
