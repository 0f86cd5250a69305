//! The property suite: seeded random and exhaustive instances checked against
//! the engines, each property reported as one [`Section`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    self, factorization_instances, random_bottom, random_good_diagram, random_pushdown_instance,
    random_retract_instance, DiagramParams, PushdownInstance, RetractInstance,
};
use crate::diagrams::{limit_extension_check, linearize, star_extend, SmoothDiagram};
use crate::error::Result;
use crate::graphcat::{find_iso_under_over, GraphMorphism, Limits};
use crate::posets::{classify_all, initial_segments, ElementKind};
use crate::report::{InstanceReport, Locator, Outcome, RunReport, Section};
use crate::soa::{
    cellularity_search, classical_soa, eliminate_retract, fat_soa, lifts_against, push_down_cells, split_idempotent,
    FactorizationCertificate, GeneratorSet, RetractOutcome,
};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random instances per property.
    pub count: usize,
    /// Largest number of poset elements in random diagrams.
    pub max_size: usize,
    /// Iteration budget for the factorization engines.
    pub budget: usize,
    pub limits: Limits,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: DEFAULT_SEED, count: 200, max_size: 6, budget: 8, limits: Limits::default() }
    }
}

/// Evaluates `f` on every item, spread over the available cores; results
/// keep the input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn outcome(op: &str, id: &str, r: Result<Outcome>) -> InstanceReport {
    let outcome = r.unwrap_or_else(|e| Outcome::Failed { locator: Locator::from_error(op, id, &e) });
    InstanceReport::new(id, outcome)
}

fn fail(op: &str, id: &str, reason: impl Into<String>) -> Outcome {
    Outcome::Failed { locator: Locator::new(op, id, reason) }
}

/// Random good diagrams with `X_std` links and at most `max_elements` elements.
pub fn random_diagrams(seed: u64, count: usize, max_elements: usize) -> Vec<(String, SmoothDiagram)> {
    let mut rng = rng_for(seed, 1);
    let params = DiagramParams { max_elements, ..DiagramParams::default() };
    (0..count)
        .map(|k| {
            let bottom = random_bottom(&mut rng);
            (format!("d{k:04}"), random_good_diagram(&mut rng, bottom, params))
        })
        .collect()
}

/// The chain has certified steps and the same colimit under the bottom object.
pub fn check_linearize(diagrams: &[(String, SmoothDiagram)], gens: &GeneratorSet, limits: &Limits) -> Section {
    let results = par_map(diagrams, |(id, d)| {
        let run = || -> Result<Outcome> {
            let chain = linearize(d, gens, limits)?;
            chain.verify(gens)?;
            let colim = d.colimit()?;
            if chain.stages[0] != *d.object(d.bottom()) {
                return Ok(fail("linearize", id, "chain does not start at the bottom object"));
            }
            if find_iso_under_over(&chain.composite()?, colim.leg(d.bottom()), None).is_none() {
                return Ok(fail("linearize", id, "chain colimit differs from the diagram colimit"));
            }
            Ok(Outcome::Passed)
        };
        outcome("linearize", id, run())
    });
    Section::new("linearize", results)
}

/// Extensions by limit elements only are isomorphisms on colimits.
pub fn check_limit_extensions(diagrams: &[(String, SmoothDiagram)]) -> Section {
    let results = par_map(diagrams, |(id, d)| {
        let run = || -> Result<Outcome> {
            for q in initial_segments(d.shape()).iter().filter(|q| !q.is_empty()) {
                let ext = limit_extension_check(d, q)?;
                if ext.all_limit && !ext.iso {
                    let at = q.ids(d.shape()).join(",");
                    return Ok(Outcome::Failed { locator: Locator::new("limit_extension", id, "not an isomorphism").at(at) });
                }
            }
            Ok(Outcome::Passed)
        };
        outcome("limit_extension", id, run())
    });
    Section::new("limit_extension", results)
}

/// The star extension is directed, keeps the colimit and every link, and adds
/// only limit elements.
pub fn check_star_extend(diagrams: &[(String, SmoothDiagram)]) -> Section {
    let results = par_map(diagrams, |(id, d)| {
        let run = || -> Result<Outcome> {
            let star = star_extend(d)?;
            let s = &star.diagram;
            if s.shape().greatest().is_none() {
                return Ok(fail("star_extend", id, "extension is not directed"));
            }
            if !star.comparison.is_iso() {
                return Ok(fail("star_extend", id, "colimit changed"));
            }
            let kinds = classify_all(s.shape())?;
            if (d.len()..s.len()).any(|x| kinds[x].kind != ElementKind::Limit) {
                return Ok(fail("star_extend", id, "added element is not a limit element"));
            }
            let mut before: Vec<_> = d.links().iter().map(|l| (l.element, l.morphism.clone())).collect();
            let mut after: Vec<_> = s.links().iter().map(|l| (l.element, l.morphism.clone())).collect();
            before.sort_by_key(|(x, _)| *x);
            after.sort_by_key(|(x, _)| *x);
            if before != after {
                return Ok(fail("star_extend", id, "links changed"));
            }
            Ok(Outcome::Passed)
        };
        outcome("star_extend", id, run())
    });
    Section::new("star_extend", results)
}

fn injective(map: &[usize]) -> bool {
    let mut seen = map.to_vec();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

/// Every morphism between graphs with at most 3 vertices and 2 edges.
pub fn oracle_morphisms(limits: &Limits) -> Result<Vec<GraphMorphism>> {
    corpus::small_morphisms(3, 2, limits)
}

/// `cellularity_search` finds a presentation iff the morphism is injective.
pub fn check_mono_oracle(morphisms: &[GraphMorphism], gens: &GeneratorSet, budget: usize, limits: &Limits) -> Section {
    let ids: Vec<(String, &GraphMorphism)> = morphisms.iter().enumerate().map(|(k, f)| (format!("m{k:05}"), f)).collect();
    let results = par_map(&ids, |(id, f)| {
        let run = || -> Result<Outcome> {
            let mono = injective(f.vmap()) && injective(f.emap());
            let found = cellularity_search(f, gens, budget, limits)?;
            match (found.presentation(), mono) {
                (Some(p), true) => {
                    p.verify(gens)?;
                    let over = p.total_over().expect("presentation over the codomain");
                    if !over.is_iso() || p.inclusion().then(over)? != **f {
                        return Ok(fail("mono_oracle", id, "presentation does not present the morphism"));
                    }
                    Ok(Outcome::Passed)
                }
                (None, false) => Ok(Outcome::Passed),
                (Some(_), false) => Ok(fail("mono_oracle", id, format!("non-injective {f} found cellular"))),
                (None, true) => Ok(fail("mono_oracle", id, format!("injective {f} not found cellular"))),
            }
        };
        outcome("mono_oracle", id, run())
    });
    Section::new("mono_oracle", results)
}

pub struct LiftingInstance {
    pub id: String,
    pub diagram: SmoothDiagram,
    pub right: GraphMorphism,
}

/// Random good diagrams paired with random maps having the right lifting
/// property against `X_std`.
pub fn lifting_instances(seed: u64, count: usize, max_elements: usize, limits: &Limits) -> Result<Vec<LiftingInstance>> {
    use rand::seq::SliceRandom;
    let rights = corpus::right_maps(3, 2, limits)?;
    let mut rng = rng_for(seed, 2);
    let params = DiagramParams { max_elements, max_cells: 4, vertex_cap: 4 };
    Ok((0..count)
        .map(|k| {
            let bottom = random_bottom(&mut rng);
            let diagram = random_good_diagram(&mut rng, bottom, params);
            let right = rights.choose(&mut rng).expect("identities have the lifting property").clone();
            LiftingInstance { id: format!("l{k:04}"), diagram, right }
        })
        .collect())
}

/// Every cocone leg of the colimit lifts against the right map.
pub fn check_lifting(instances: &[LiftingInstance], gens: &GeneratorSet, limits: &Limits) -> Section {
    let results = par_map(instances, |inst| {
        let id = &inst.id;
        let run = || -> Result<Outcome> {
            if !crate::soa::rlp_check(&inst.right, gens, limits)?.holds {
                return Ok(fail("lifting", id, "right map lacks the lifting property"));
            }
            let colim = inst.diagram.colimit()?;
            for x in 0..inst.diagram.len() {
                if let Some((u, v)) = lifts_against(colim.leg(x), &inst.right, limits)? {
                    let at = format!("{} u={u} v={v}", inst.diagram.shape().id(x));
                    return Ok(Outcome::Failed { locator: Locator::new("lifting", id, "square without diagonal").at(at) });
                }
            }
            Ok(Outcome::Passed)
        };
        outcome("lifting", id, run())
    });
    Section::new("lifting", results)
}

pub fn pushdown_instances(seed: u64, count: usize) -> Vec<PushdownInstance> {
    let mut rng = rng_for(seed, 3);
    (0..count).map(|k| random_pushdown_instance(&mut rng, format!("q{k:04}"))).collect()
}

/// `push_down_cells` gives a verified pushout square with a cellular map,
/// whose universal property is probed against small targets.
pub fn check_pushdown(instances: &[PushdownInstance], gens: &GeneratorSet, limits: &Limits) -> Section {
    let probes = [corpus::graphs::v(2), corpus::graphs::loop1()];
    let results = par_map(instances, |inst| {
        let id = &inst.id;
        let run = || -> Result<Outcome> {
            let res = push_down_cells(&inst.diagram, &inst.staging, gens, limits)?;
            res.verify(&inst.diagram, &inst.staging, gens)?;
            let probed = res.square.clone().with_probes(&probes, limits)?;
            probed.verify()?;
            Ok(Outcome::Passed)
        };
        outcome("pushdown", id, run())
    });
    Section::new("pushdown", results)
}

pub fn retract_instances(seed: u64, count: usize, limits: &Limits) -> Result<Vec<RetractInstance>> {
    let mut rng = rng_for(seed, 4);
    (0..count).map(|k| random_retract_instance(&mut rng, format!("r{k:04}"), limits)).collect()
}

/// Lifting budget used for retract elimination in the suite.
pub const RETRACT_BUDGET: usize = 10_000;

/// `eliminate_retract` certifies, and its last stage matches an independent
/// split of the idempotent, itself found cellular by search.
pub fn check_retracts(instances: &[RetractInstance], gens: &GeneratorSet, limits: &Limits) -> Section {
    let results = par_map(instances, |inst| {
        let id = &inst.id;
        let run = || -> Result<Outcome> {
            let cert = match eliminate_retract(&inst.diagram, &inst.idempotent, gens, RETRACT_BUDGET, limits)? {
                RetractOutcome::Certified(c) => c,
                RetractOutcome::Inconclusive { reason, .. } => return Ok(Outcome::Inconclusive { reason }),
            };
            cert.verify(gens, limits)?;
            let f = &inst.idempotent;
            if cert.split.section.then(&cert.split.retraction)? != GraphMorphism::identity(&cert.split.image)
                || cert.split.retraction.then(&cert.split.section)? != *f
            {
                return Ok(fail("eliminate_retract", id, "split does not split the idempotent"));
            }
            let colim = inst.diagram.colimit()?;
            let a = colim.leg(inst.diagram.bottom());
            let split = split_idempotent(f, Some(a))?;
            let into_image = a.then(&split.retraction)?;
            if find_iso_under_over(&cert.composite()?, &into_image, None).is_none() {
                return Ok(fail("eliminate_retract", id, "last stage is not the image under the base"));
            }
            let cells = split.image.size().saturating_sub(a.dom().size()) + 1;
            if cellularity_search(&into_image, gens, cells, limits)?.presentation().is_none() {
                return Ok(fail("eliminate_retract", id, "image not found cellular by search"));
            }
            Ok(Outcome::Passed)
        };
        outcome("eliminate_retract", id, run())
    });
    Section::new("eliminate_retract", results)
}

/// Fat certificates for the hand-built corpus, in corpus order.
pub fn fat_certificates(gens: &GeneratorSet, budget: usize, limits: &Limits) -> Vec<(String, Result<FactorizationCertificate>)> {
    let inst = factorization_instances();
    let certs = par_map(&inst, |(_, f)| fat_soa(f, gens, budget, limits));
    inst.into_iter().map(|(id, _)| id).zip(certs).collect()
}

/// Every corpus instance converges and its fat certificate verifies.
pub fn check_factorizations(
    certs: &[(String, Result<FactorizationCertificate>)],
    gens: &GeneratorSet,
    limits: &Limits,
) -> Section {
    let results = par_map(certs, |(id, cert)| {
        let run = || -> Result<Outcome> {
            let cert = cert.as_ref().map_err(Clone::clone)?;
            cert.verify(gens, limits)?;
            if !cert.status.converged() {
                return Ok(fail("fat_soa", id, "did not converge within the budget"));
            }
            if cert.left_map.then(&cert.right)? != cert.input || !cert.rlp_report.holds {
                return Ok(fail("fat_soa", id, "factorization or lifting evidence is wrong"));
            }
            Ok(Outcome::Converged { iterations: cert.status.iterations() })
        };
        outcome("fat_soa", id, run())
    });
    Section::new("fat_soa", results)
}

/// Where both engines converge, the middle objects agree under `A` and over `B`.
pub fn check_agreement(
    fat: &[(String, Result<FactorizationCertificate>)],
    gens: &GeneratorSet,
    budget: usize,
    limits: &Limits,
) -> Section {
    let results = par_map(fat, |(id, cert)| {
        let run = || -> Result<Outcome> {
            let fat = cert.as_ref().map_err(Clone::clone)?;
            let classical = classical_soa(&fat.input, gens, budget, limits)?;
            if !fat.status.converged() || !classical.status.converged() {
                return Ok(Outcome::Skipped { reason: "an engine did not converge".into() });
            }
            match fat.compare(&classical) {
                Some(_) => Ok(Outcome::Passed),
                None => Ok(fail("agreement", id, "middle objects are not isomorphic under A and over B")),
            }
        };
        outcome("agreement", id, run())
    });
    Section::new("agreement", results)
}

/// Runs every property with the given configuration.
pub fn run_suite(config: &SuiteConfig) -> Result<RunReport> {
    let gens = corpus::x_std();
    let limits = &config.limits;
    let diagrams = random_diagrams(config.seed, config.count, config.max_size);
    let fat = fat_certificates(&gens, config.budget, limits);
    let sections = vec![
        check_linearize(&diagrams, &gens, limits),
        check_limit_extensions(&diagrams),
        check_star_extend(&diagrams),
        check_mono_oracle(&oracle_morphisms(limits)?, &gens, 6, limits),
        check_lifting(&lifting_instances(config.seed, config.count, config.max_size, limits)?, &gens, limits),
        check_pushdown(&pushdown_instances(config.seed, config.count), &gens, limits),
        check_retracts(&retract_instances(config.seed, config.count, limits)?, &gens, limits),
        check_factorizations(&fat, &gens, limits),
        check_agreement(&fat, &gens, config.budget, limits),
    ];
    let command = format!(
        "suite --seed {} --count {} --max-size {} --budget {}",
        config.seed, config.count, config.max_size, config.budget
    );
    Ok(RunReport::new(command, Some(config.seed), sections))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn par_map_keeps_order() {
        let xs: Vec<usize> = (0..37).collect();
        assert_eq!(par_map(&xs, |x| x * 2), xs.iter().map(|x| x * 2).collect::<Vec<_>>());
        assert!(par_map(&Vec::<usize>::new(), |x| *x).is_empty());
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let config = SuiteConfig { count: 6, ..SuiteConfig::default() };
        let gens = corpus::x_std();
        let d = random_diagrams(config.seed, config.count, config.max_size);
        let a = check_linearize(&d, &gens, &config.limits);
        assert!(a.ok(), "{a:?}");
        let b = check_linearize(&random_diagrams(config.seed, config.count, config.max_size), &gens, &config.limits);
        assert_eq!(a, b);
        assert!(check_star_extend(&d).ok());
        assert!(check_limit_extensions(&d).ok());
    }
}
