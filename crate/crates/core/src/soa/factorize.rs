use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::cells::{Cell, CellComplexPresentation};
use super::generators::GeneratorSet;
use super::lifting::{diagonal, rlp_check, squares, RlpReport, Square};
use super::membership::{PoCertificate, PoWitness};
use crate::diagrams::{
    linearize_certified, star_extend_named, ChainPresentation, Diagram, SegmentColimit, SmoothDiagram,
};
use crate::error::{Error, Result};
use crate::graphcat::{
    compute_pushout, factor_through_stage, find_iso_under_over, Graph, GraphMorphism, Limits,
};
use crate::posets::FinitePoset;

pub const CERT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Fat,
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SoaStatus {
    /// The right part passed the lifting check at this iteration.
    Converged { iterations: usize },
    /// The cell budget ran out; the right part is not claimed to lift.
    BudgetExhausted { iterations: usize },
}

impl SoaStatus {
    pub fn converged(&self) -> bool {
        matches!(self, SoaStatus::Converged { .. })
    }

    pub fn iterations(&self) -> usize {
        match *self {
            SoaStatus::Converged { iterations } | SoaStatus::BudgetExhausted { iterations } => iterations,
        }
    }
}

/// The middle object after each iteration, with the induced maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationChain {
    pub stages: Vec<Graph>,
    pub steps: Vec<GraphMorphism>,
}

impl IterationChain {
    fn start(a: &Graph) -> Self {
        IterationChain { stages: vec![a.clone()], steps: Vec::new() }
    }

    fn push(&mut self, step: GraphMorphism) {
        self.stages.push(step.cod().clone());
        self.steps.push(step);
    }

    fn check(&self) -> Result<()> {
        if self.stages.len() != self.steps.len() + 1 {
            return Err(Error::verification("iterations", "stage/step counts disagree"));
        }
        for (k, s) in self.steps.iter().enumerate() {
            if s.dom() != &self.stages[k] || s.cod() != &self.stages[k + 1] {
                return Err(Error::verification(format!("iterations/step{k}"), "step does not connect its stages"));
            }
        }
        Ok(())
    }
}

/// The left part of a fat factorization: a good directed diagram under `A`
/// and over `B` whose links carry `Po(X)` certificates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FatLeft {
    pub diagram: SmoothDiagram,
    pub over: IndexMap<String, GraphMorphism>,
    pub links: IndexMap<String, PoCertificate>,
    pub chain: ChainPresentation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LeftPart {
    Fat(FatLeft),
    Classical { presentation: CellComplexPresentation },
}

/// `f = right ∘ left_map` with evidence for both halves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationCertificate {
    pub cert_version: u32,
    pub mode: Mode,
    pub budget: usize,
    pub input: GraphMorphism,
    pub left: LeftPart,
    pub left_map: GraphMorphism,
    pub right: GraphMorphism,
    #[serde(rename = "iteration_chain")]
    pub iterations: IterationChain,
    pub rlp_report: RlpReport,
    #[serde(flatten)]
    pub status: SoaStatus,
}

impl FactorizationCertificate {
    pub fn middle(&self) -> &Graph {
        self.right.dom()
    }

    /// An isomorphism between the two middle objects under `A` and over `B`.
    pub fn compare(&self, other: &FactorizationCertificate) -> Option<GraphMorphism> {
        if self.input != other.input {
            return None;
        }
        find_iso_under_over(&self.left_map, &other.left_map, Some((&self.right, &other.right)))
    }

    /// Re-checks every embedded witness, then reruns the engine and requires
    /// an identical certificate.
    pub fn verify(&self, gens: &GeneratorSet, limits: &Limits) -> Result<()> {
        if self.cert_version != CERT_VERSION {
            return Err(Error::CertVersion(self.cert_version));
        }
        let f = &self.input;
        if self.left_map.dom() != f.dom() || self.right.cod() != f.cod() {
            return Err(Error::verification("factorization", "halves have the wrong endpoints"));
        }
        if self.left_map.then(&self.right)? != *f {
            return Err(Error::verification("factorization", "right ∘ left differs from the input"));
        }
        self.iterations.check()?;
        if self.iterations.stages.first() != Some(f.dom()) || self.iterations.stages.last() != Some(self.middle()) {
            return Err(Error::verification("iterations", "chain does not run from the domain to the middle object"));
        }
        match &self.left {
            LeftPart::Fat(fat) => verify_fat(fat, self, gens)?,
            LeftPart::Classical { presentation } => {
                presentation.verify(gens).map_err(|e| e.within("classical"))?;
                if presentation.base_over.as_ref() != Some(f) {
                    return Err(Error::verification("classical", "presentation is not over the input"));
                }
                if presentation.inclusion() != self.left_map {
                    return Err(Error::verification("classical", "left map is not the cell inclusion"));
                }
                if presentation.total_over() != Some(&self.right) {
                    return Err(Error::verification("classical", "right map is not the induced map"));
                }
            }
        }
        match self.status {
            SoaStatus::Converged { .. } => {
                if !self.rlp_report.holds {
                    return Err(Error::verification("rlp", "converged certificate without a lifting table"));
                }
                self.rlp_report.verify(&self.right, gens, limits)?;
            }
            SoaStatus::BudgetExhausted { .. } => {
                let sq = self.rlp_report.counterexample.as_ref().ok_or_else(|| {
                    Error::verification("rlp", "exhausted certificate without an open square")
                })?;
                check_open_square(sq, &self.right, gens)?;
            }
        }
        let rerun = match self.mode {
            Mode::Fat => fat_soa(f, gens, self.budget, limits)?,
            Mode::Classical => classical_soa(f, gens, self.budget, limits)?,
        };
        if rerun != *self {
            return Err(Error::verification("rerun", "certificate differs from a fresh run"));
        }
        Ok(())
    }
}

fn check_open_square(sq: &Square, p: &GraphMorphism, gens: &GeneratorSet) -> Result<()> {
    let g = gens.get(sq.generator)?;
    if sq.u.then(p)? != g.then(&sq.v)? {
        return Err(Error::verification("rlp/counterexample", "square does not commute"));
    }
    if diagonal(g, p, &sq.u, &sq.v).is_some() {
        return Err(Error::verification("rlp/counterexample", "square has a diagonal"));
    }
    Ok(())
}

fn verify_fat(fat: &FatLeft, cert: &FactorizationCertificate, gens: &GeneratorSet) -> Result<()> {
    let d = &fat.diagram;
    let shape = d.shape();
    let bot = d.bottom();
    if d.object(bot) != cert.input.dom() {
        return Err(Error::verification("fat/diagram", "bottom object is not the domain"));
    }
    if shape.greatest().is_none() {
        return Err(Error::verification("fat/diagram", "shape is not directed"));
    }
    if fat.over.len() != d.len() {
        return Err(Error::verification("fat/over", "one map to the codomain per element expected"));
    }
    let mut over = Vec::with_capacity(d.len());
    for x in 0..d.len() {
        let m = fat
            .over
            .get(shape.id(x))
            .ok_or_else(|| Error::verification(format!("fat/over/{}", shape.id(x)), "missing"))?;
        if m.dom() != d.object(x) || m.cod() != cert.input.cod() {
            return Err(Error::verification(format!("fat/over/{}", shape.id(x)), "wrong type"));
        }
        over.push(m.clone());
    }
    if over[bot] != cert.input {
        return Err(Error::verification("fat/over/bot", "bottom map is not the input"));
    }
    for (x, y) in shape.covers() {
        if d.arrow(x, y).then(&over[y])? != over[x] {
            return Err(Error::verification(
                format!("fat/over/{}", shape.id(y)),
                format!("not compatible with {}", shape.id(x)),
            ));
        }
    }
    let mut links = BTreeMap::new();
    for link in d.links() {
        let id = shape.id(link.element);
        let here = format!("fat/links/{id}");
        let c = fat.links.get(id).ok_or_else(|| Error::verification(&here, "no certificate"))?;
        if c.morphism != link.morphism {
            return Err(Error::verification(&here, "certificate is for a different morphism"));
        }
        c.verify(gens).map_err(|e| e.within(&here))?;
        links.insert(link.element, c.clone());
    }
    if links.len() != fat.links.len() {
        return Err(Error::verification("fat/links", "certificates for elements that are not isolated"));
    }
    let colim = d.colimit()?;
    if colim.leg(bot) != &cert.left_map {
        return Err(Error::verification("fat/colimit", "left map is not the bottom leg"));
    }
    if colim.mediate(cert.input.cod(), |x| Ok(over[x].clone()))? != cert.right {
        return Err(Error::verification("fat/colimit", "right map is not induced by the maps to the codomain"));
    }
    fat.chain.verify(gens).map_err(|e| e.within("fat"))?;
    if linearize_certified(d, gens, &links)? != fat.chain {
        return Err(Error::verification("fat/chain", "chain differs from the linearization"));
    }
    Ok(())
}

/// Squares from `gens` to `p` that have no diagonal, in enumeration order.
fn open_squares(p: &GraphMorphism, gens: &GeneratorSet, limits: &Limits) -> Result<Vec<Square>> {
    let mut out = Vec::new();
    for sq in squares(p, gens, limits)? {
        if diagonal(gens.get(sq.generator)?, p, &sq.u, &sq.v).is_none() {
            out.push(sq);
        }
    }
    Ok(out)
}

fn status_for(report: &RlpReport, iteration: usize, rounds: usize, budget: usize) -> Option<SoaStatus> {
    if report.holds {
        Some(SoaStatus::Converged { iterations: iteration })
    } else if rounds >= budget {
        Some(SoaStatus::BudgetExhausted { iterations: iteration })
    } else {
        None
    }
}

/// Fat small object argument: each round glues one cell per open square at
/// the first stage its attaching map factors through, then adds a top.
///
/// `budget` bounds the number of rounds that attach cells.
pub fn fat_soa(
    f: &GraphMorphism,
    gens: &GeneratorSet,
    budget: usize,
    limits: &Limits,
) -> Result<FactorizationCertificate> {
    let shape = FinitePoset::from_ids(&["bot"], &[])?;
    let mut d = SmoothDiagram::new(Diagram::new(shape, vec![f.dom().clone()], vec![])?)?;
    let mut over = vec![f.clone()];
    let mut links: BTreeMap<usize, PoCertificate> = BTreeMap::new();
    let mut chain = IterationChain::start(f.dom());
    let mut prev: Option<SegmentColimit> = None;
    let mut iteration = 0;
    let (colim, right, report, status) = loop {
        iteration += 1;
        let colim = d.colimit()?;
        limits.check_graph(colim.apex(), "middle object")?;
        let right = colim.mediate(f.cod(), |x| Ok(over[x].clone()))?;
        if let Some(p) = &prev {
            chain.push(p.mediate(colim.apex(), |x| Ok(colim.leg(x).clone()))?);
        }
        let report = rlp_check(&right, gens, limits)?;
        if let Some(status) = status_for(&report, iteration, iteration - 1, budget) {
            break (colim, right, report, status);
        }
        let start = d.diagram().clone();
        let mut grown = start.clone();
        for (j, sq) in open_squares(&right, gens, limits)?.into_iter().enumerate() {
            let g = gens.get(sq.generator)?;
            let (beta, x_beta) = factor_through_stage(&sq.u, &start, &colim)?;
            let po = compute_pushout(&x_beta, g);
            let new_over = po.mediate(f.cod(), &over[beta], &sq.v)?;
            let witness = PoWitness::Pushout {
                generator: sq.generator,
                attaching: x_beta,
                comparison: GraphMorphism::identity(&po.apex),
            };
            let cert = PoCertificate { morphism: po.left.clone(), witness };
            let id = format!("c{iteration}.{}", j + 1);
            let (next, x) = grown.extend(id, &[beta], po.apex, vec![po.left])?;
            grown = next;
            over.push(new_over);
            links.insert(x, cert);
        }
        let smooth = SmoothDiagram::new(grown)?;
        d = if smooth.shape().greatest().is_none() {
            let star = star_extend_named(&smooth, &format!("t{iteration}"))?;
            let top = star.added_top.expect("not directed, so a top is added");
            let c = smooth.colimit()?;
            over.push(c.mediate(f.cod(), |x| Ok(over[x].clone()))?);
            debug_assert_eq!(top, over.len() - 1);
            star.diagram
        } else {
            smooth
        };
        prev = Some(colim);
    };
    let ids = |x: usize| d.shape().id(x).to_string();
    let fat = FatLeft {
        chain: linearize_certified(&d, gens, &links)?,
        over: over.iter().enumerate().map(|(x, m)| (ids(x), m.clone())).collect(),
        links: links.iter().map(|(&x, c)| (ids(x), c.clone())).collect(),
        diagram: d.clone(),
    };
    Ok(FactorizationCertificate {
        cert_version: CERT_VERSION,
        mode: Mode::Fat,
        budget,
        input: f.clone(),
        left_map: colim.leg(d.bottom()).clone(),
        left: LeftPart::Fat(fat),
        right,
        iterations: chain,
        rlp_report: report,
        status,
    })
}

/// Classical small object argument: each round glues one cell per open square
/// in a single pushout of a coproduct.
pub fn classical_soa(
    f: &GraphMorphism,
    gens: &GeneratorSet,
    budget: usize,
    limits: &Limits,
) -> Result<FactorizationCertificate> {
    let mut pres = CellComplexPresentation::over(f);
    let mut iteration = 0;
    let (report, status) = loop {
        iteration += 1;
        limits.check_graph(pres.total(), "middle object")?;
        let right = pres.total_over().expect("presentation over the codomain").clone();
        let report = rlp_check(&right, gens, limits)?;
        if let Some(status) = status_for(&report, iteration, iteration - 1, budget) {
            break (report, status);
        }
        let cells = open_squares(&right, gens, limits)?
            .into_iter()
            .map(|sq| Cell::over(sq.generator, sq.u, sq.v))
            .collect();
        pres = pres.attach_cells(gens, cells)?;
    };
    let mut chain = IterationChain::start(f.dom());
    for s in &pres.stages {
        chain.push(s.inclusion.clone());
    }
    Ok(FactorizationCertificate {
        cert_version: CERT_VERSION,
        mode: Mode::Classical,
        budget,
        input: f.clone(),
        left_map: pres.inclusion(),
        right: pres.total_over().expect("presentation over the codomain").clone(),
        left: LeftPart::Classical { presentation: pres },
        iterations: chain,
        rlp_report: report,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::are_isomorphic;

    fn e1() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    fn loop1() -> Graph {
        Graph::new(1, vec![(0, 0)]).unwrap()
    }

    #[test]
    fn empty_to_edge_takes_three_iterations() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::initial(&e1());
        let cert = fat_soa(&f, &x, 5, &Limits::default()).unwrap();
        assert_eq!(cert.status, SoaStatus::Converged { iterations: 3 });
        assert!(are_isomorphic(cert.middle(), &e1()));
        assert_eq!(cert.iterations.stages, vec![Graph::empty(), Graph::discrete(2), e1()]);
        match &cert.left {
            LeftPart::Fat(fat) => assert_eq!(fat.links.len(), 3),
            LeftPart::Classical { .. } => unreachable!(),
        }
        cert.verify(&x, &Limits::default()).unwrap();
    }

    #[test]
    fn identity_converges_immediately() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::identity(&e1());
        for cert in [fat_soa(&f, &x, 0, &Limits::default()).unwrap(), classical_soa(&f, &x, 0, &Limits::default()).unwrap()] {
            assert_eq!(cert.status, SoaStatus::Converged { iterations: 1 });
            assert!(cert.right.is_identity());
            cert.verify(&x, &Limits::default()).unwrap();
        }
    }

    #[test]
    fn vertex_to_loop_adds_only_the_loop() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::new(Graph::discrete(1), loop1(), vec![0], vec![]).unwrap();
        let cert = fat_soa(&f, &x, 5, &Limits::default()).unwrap();
        assert!(cert.status.converged());
        assert!(are_isomorphic(cert.middle(), &loop1()));
        match &cert.left {
            LeftPart::Fat(fat) => {
                assert_eq!(fat.links.len(), 1);
                assert!(fat.links.values().all(|c| matches!(c.witness, PoWitness::Pushout { generator: 1, .. })));
            }
            LeftPart::Classical { .. } => unreachable!(),
        }
    }

    #[test]
    fn collapse_attaches_nothing() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::new(Graph::discrete(2), Graph::discrete(1), vec![0, 0], vec![]).unwrap();
        let cert = classical_soa(&f, &x, 5, &Limits::default()).unwrap();
        assert_eq!(cert.status, SoaStatus::Converged { iterations: 1 });
        assert_eq!(cert.middle(), &Graph::discrete(2));
    }

    #[test]
    fn classical_and_fat_agree() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::initial(&e1());
        let fat = fat_soa(&f, &x, 5, &Limits::default()).unwrap();
        let classical = classical_soa(&f, &x, 5, &Limits::default()).unwrap();
        assert!(classical.status.converged());
        assert!(fat.compare(&classical).is_some());
        classical.verify(&x, &Limits::default()).unwrap();
    }

    #[test]
    fn zero_budget_is_reported_as_exhausted() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::initial(&e1());
        let cert = fat_soa(&f, &x, 0, &Limits::default()).unwrap();
        assert_eq!(cert.status, SoaStatus::BudgetExhausted { iterations: 1 });
        assert!(!cert.rlp_report.holds);
        cert.verify(&x, &Limits::default()).unwrap();
    }

    #[test]
    fn tampered_link_is_named() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::initial(&e1());
        let mut cert = fat_soa(&f, &x, 5, &Limits::default()).unwrap();
        if let LeftPart::Fat(fat) = &mut cert.left {
            let (_, c) = fat.links.get_index_mut(0).unwrap();
            c.witness = PoWitness::Iso;
        }
        let err = cert.verify(&x, &Limits::default()).unwrap_err();
        match err {
            Error::Verification { witness, .. } => assert!(witness.starts_with("fat/links/c1.1"), "{witness}"),
            other => panic!("unexpected {other}"),
        }
    }
}
