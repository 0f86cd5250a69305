//! Poset-indexed diagrams of graphs, smooth and good diagrams, and the
//! constructions that turn a good diagram into a chain.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcat::{colimit, find_iso_under_over, Cocone, Graph, GraphMorphism, Limits};
use crate::posets::{
    classify_all, directed_completion, is_good, linear_extension, ElementKind, FinitePoset,
    InitialSegment,
};
use crate::soa::{po_membership, GeneratorSet, PoCertificate, PoWitness};

/// A functor from a finite poset to graphs.
///
/// Built from one morphism per covering pair; the morphism for every
/// comparable pair is computed on construction, which is also where
/// functoriality (all cover paths agree) is checked.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "DiagramJson", into = "DiagramJson")]
pub struct Diagram {
    shape: FinitePoset,
    objects: Vec<Graph>,
    arrows: BTreeMap<(usize, usize), GraphMorphism>,
}

impl Diagram {
    pub fn new(
        shape: FinitePoset,
        objects: Vec<Graph>,
        covers: Vec<(usize, usize, GraphMorphism)>,
    ) -> Result<Self> {
        if objects.len() != shape.len() {
            return Err(Error::InvalidDiagram(format!(
                "{} objects for {} elements",
                objects.len(),
                shape.len()
            )));
        }
        let mut given: BTreeMap<(usize, usize), GraphMorphism> = BTreeMap::new();
        for (x, y, m) in covers {
            if x >= shape.len() || y >= shape.len() {
                return Err(Error::InvalidDiagram(format!("arrow {x} -> {y} out of range")));
            }
            if m.dom() != &objects[x] || m.cod() != &objects[y] {
                return Err(Error::InvalidDiagram(format!(
                    "arrow {} -> {} has the wrong domain or codomain",
                    shape.id(x),
                    shape.id(y)
                )));
            }
            if given.insert((x, y), m).is_some() {
                return Err(Error::InvalidDiagram(format!(
                    "two arrows {} -> {}",
                    shape.id(x),
                    shape.id(y)
                )));
            }
        }
        let covers = shape.covers();
        for &(x, y) in given.keys() {
            if !covers.contains(&(x, y)) {
                return Err(Error::InvalidDiagram(format!(
                    "{} -> {} is not a covering pair",
                    shape.id(x),
                    shape.id(y)
                )));
            }
        }
        let mut arrows = BTreeMap::new();
        for x in 0..shape.len() {
            arrows.insert((x, x), GraphMorphism::identity(&objects[x]));
        }
        let order = linear_extension(&shape);
        for &y in &order {
            let lower = shape.lower_covers(y);
            for &z in &lower {
                if !given.contains_key(&(z, y)) {
                    return Err(Error::InvalidDiagram(format!(
                        "missing arrow {} -> {}",
                        shape.id(z),
                        shape.id(y)
                    )));
                }
            }
            for x in shape.strict_down(y) {
                let mut value: Option<GraphMorphism> = None;
                for &z in &lower {
                    if !shape.leq(x, z) {
                        continue;
                    }
                    let candidate = arrows[&(x, z)].then(&given[&(z, y)])?;
                    match &value {
                        None => value = Some(candidate),
                        Some(v) if *v != candidate => {
                            return Err(Error::NotFunctorial {
                                lower: shape.id(x).to_string(),
                                upper: shape.id(y).to_string(),
                            })
                        }
                        Some(_) => {}
                    }
                }
                arrows.insert((x, y), value.expect("x < y passes through a lower cover of y"));
            }
        }
        Ok(Diagram { shape, objects, arrows })
    }

    /// The diagram with every object `g` and identity arrows.
    pub fn constant(shape: FinitePoset, g: &Graph) -> Self {
        let objects = vec![g.clone(); shape.len()];
        let covers =
            shape.covers().into_iter().map(|(x, y)| (x, y, GraphMorphism::identity(g))).collect();
        Diagram::new(shape, objects, covers).expect("constant diagrams are functorial")
    }

    pub fn shape(&self) -> &FinitePoset {
        &self.shape
    }

    pub fn object(&self, x: usize) -> &Graph {
        &self.objects[x]
    }

    pub fn objects(&self) -> &[Graph] {
        &self.objects
    }

    /// `D(x <= y)`; panics if `x` is not below `y`.
    pub fn arrow(&self, x: usize, y: usize) -> &GraphMorphism {
        &self.arrows[&(x, y)]
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn cover_arrows(&self) -> Vec<(usize, usize, GraphMorphism)> {
        self.shape.covers().into_iter().map(|(x, y)| (x, y, self.arrows[&(x, y)].clone())).collect()
    }

    /// Adds an element strictly above `below` with the given object and one
    /// arrow from each element of `below`.
    pub fn extend(
        &self,
        id: String,
        below: &[usize],
        object: Graph,
        incoming: Vec<GraphMorphism>,
    ) -> Result<(Diagram, usize)> {
        let (shape, new) = self.shape.with_element(id, below)?;
        let mut objects = self.objects.clone();
        objects.push(object);
        let mut covers: Vec<(usize, usize, GraphMorphism)> = Vec::new();
        for (x, y) in shape.covers() {
            if y == new {
                let k = below.iter().position(|&b| b == x).ok_or_else(|| {
                    Error::InvalidDiagram(format!("no arrow given for {} -> new element", shape.id(x)))
                })?;
                covers.push((x, y, incoming[k].clone()));
            } else {
                covers.push((x, y, self.arrows[&(x, y)].clone()));
            }
        }
        Ok((Diagram::new(shape, objects, covers)?, new))
    }

    /// Colimit of the restriction to `members` (any subset).
    pub fn colimit_over(&self, members: &[usize]) -> Result<SegmentColimit> {
        let objects: Vec<Graph> = members.iter().map(|&x| self.objects[x].clone()).collect();
        let local = |x: usize| members.iter().position(|&m| m == x).expect("member");
        let covers = self.shape.covers_within(members);
        let arrows: Vec<(usize, usize, &GraphMorphism)> =
            covers.iter().map(|&(x, y)| (local(x), local(y), &self.arrows[&(x, y)])).collect();
        let cocone = colimit(&objects, &arrows)?;
        Ok(SegmentColimit { members: members.to_vec(), cocone })
    }

    pub fn colimit(&self) -> Result<SegmentColimit> {
        self.colimit_over(&(0..self.len()).collect::<Vec<_>>())
    }
}

/// A colimit over a subset of a diagram's elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentColimit {
    pub members: Vec<usize>,
    pub cocone: Cocone,
}

impl SegmentColimit {
    pub fn apex(&self) -> &Graph {
        &self.cocone.apex
    }

    pub fn leg(&self, x: usize) -> &GraphMorphism {
        let k = self.members.iter().position(|&m| m == x).expect("element of the colimit");
        &self.cocone.legs[k]
    }

    /// The mediating morphism for the family `x -> maps(x)`.
    pub fn mediate(
        &self,
        target: &Graph,
        mut maps: impl FnMut(usize) -> Result<GraphMorphism>,
    ) -> Result<GraphMorphism> {
        if self.members.is_empty() {
            return Ok(GraphMorphism::initial(target));
        }
        let family = self.members.iter().map(|&x| maps(x)).collect::<Result<Vec<_>>>()?;
        self.cocone.mediate(target, &family)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ArrowJson {
    pub from: String,
    pub to: String,
    pub morphism: GraphMorphism,
}

/// Wire form: poset, per-element graph, per-cover morphism.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramJson {
    pub poset: FinitePoset,
    pub objects: IndexMap<String, Graph>,
    pub arrows: Vec<ArrowJson>,
}

impl TryFrom<DiagramJson> for Diagram {
    type Error = Error;

    fn try_from(json: DiagramJson) -> Result<Self> {
        let shape = json.poset;
        let mut objects = vec![None; shape.len()];
        for (id, g) in json.objects {
            let x = shape.index_of(&id)?;
            objects[x] = Some(g);
        }
        let objects = objects
            .into_iter()
            .enumerate()
            .map(|(x, g)| g.ok_or_else(|| Error::InvalidDiagram(format!("no object for `{}`", shape.id(x)))))
            .collect::<Result<Vec<_>>>()?;
        let covers = json
            .arrows
            .into_iter()
            .map(|a| Ok((shape.index_of(&a.from)?, shape.index_of(&a.to)?, a.morphism)))
            .collect::<Result<Vec<_>>>()?;
        Diagram::new(shape, objects, covers)
    }
}

impl From<Diagram> for DiagramJson {
    fn from(d: Diagram) -> Self {
        let arrows = d
            .cover_arrows()
            .into_iter()
            .map(|(x, y, m)| ArrowJson {
                from: d.shape.id(x).to_string(),
                to: d.shape.id(y).to_string(),
                morphism: m,
            })
            .collect();
        let objects =
            d.objects.iter().enumerate().map(|(x, g)| (d.shape.id(x).to_string(), g.clone())).collect();
        DiagramJson { poset: d.shape, objects, arrows }
    }
}

/// A link `D(x⁻ -> x)` at an isolated element `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub element: usize,
    pub predecessor: usize,
    pub morphism: GraphMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub ok: bool,
    pub links: Vec<Link>,
    pub violations: Vec<Violation>,
}

/// Checks that every limit object is the colimit of what lies strictly below it.
pub fn validate_smooth(d: &Diagram) -> Result<SmoothnessReport> {
    if !is_good(d.shape()).good {
        return Err(Error::NotGood);
    }
    let kinds = classify_all(d.shape())?;
    let mut links = Vec::new();
    let mut violations = Vec::new();
    for x in 0..d.len() {
        match kinds[x].kind {
            ElementKind::Bottom => {}
            ElementKind::Isolated => {
                let p = kinds[x].predecessor.expect("isolated elements have a predecessor");
                links.push(Link { element: x, predecessor: p, morphism: d.arrow(p, x).clone() });
            }
            ElementKind::Limit => {
                let below = d.shape().strict_down(x);
                let colim = d.colimit_over(&below)?;
                let reason = match colim.mediate(d.object(x), |y| Ok(d.arrow(y, x).clone())) {
                    Ok(m) if m.is_iso() => continue,
                    Ok(m) => format!("comparison from the colimit is not an isomorphism ({m})"),
                    Err(e) => e.to_string(),
                };
                violations.push(Violation { element: d.shape().id(x).to_string(), reason });
            }
        }
    }
    Ok(SmoothnessReport { ok: violations.is_empty(), links, violations })
}

/// A diagram over a good poset that has been checked to be smooth.
/// Serializes as the underlying diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothDiagram {
    diagram: Diagram,
    links: Vec<Link>,
}

impl Serialize for SmoothDiagram {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.diagram.serialize(s)
    }
}

impl SmoothDiagram {
    pub fn new(diagram: Diagram) -> Result<Self> {
        let report = validate_smooth(&diagram)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::NotSmooth(v.element.clone()));
        }
        Ok(SmoothDiagram { diagram, links: report.links })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn bottom(&self) -> usize {
        self.diagram.shape().least().expect("good shape")
    }

    pub fn into_diagram(self) -> Diagram {
        self.diagram
    }
}

impl<'de> Deserialize<'de> for SmoothDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let d = Diagram::deserialize(de)?;
        SmoothDiagram::new(d).map_err(serde::de::Error::custom)
    }
}

impl std::ops::Deref for SmoothDiagram {
    type Target = Diagram;

    fn deref(&self) -> &Diagram {
        &self.diagram
    }
}

/// The canonical map `colim_Q D -> colim D`.
pub fn relative_composite(d: &Diagram, q: &InitialSegment) -> Result<GraphMorphism> {
    if q.is_empty() {
        return Err(Error::NotInitialSegment("empty segment".into()));
    }
    if !d.shape().is_downset(q.members()) {
        return Err(Error::NotInitialSegment(q.ids(d.shape()).join(",")));
    }
    let part = d.colimit_over(q.members())?;
    let whole = d.colimit()?;
    part.mediate(whole.apex(), |x| Ok(whole.leg(x).clone()))
}

/// Extends a compatible family `maps: D(y) -> target` (for `y < x`) to the
/// limit element `x`, through the smoothness isomorphism at `x`.
pub(crate) fn extend_at_limit(
    d: &Diagram,
    x: usize,
    maps: &BTreeMap<usize, GraphMorphism>,
    target: &Graph,
) -> Result<GraphMorphism> {
    let below = d.shape().strict_down(x);
    let colim = d.colimit_over(&below)?;
    let cmp = colim.mediate(d.object(x), |y| Ok(d.arrow(y, x).clone()))?;
    let out = colim.mediate(target, |y| {
        maps.get(&y).cloned().ok_or_else(|| Error::Internal(format!("no map at {}", d.shape().id(y))))
    })?;
    cmp.inverse()?.then(&out)
}

/// Extends a family to an isolated element `x` whose link is certified as a
/// pushout: `D(x) ≅ D(x⁻) ⊔_X Y`, given the image of `Y`.
pub(crate) fn extend_at_isolated(
    cert: &PoCertificate,
    gens: &GeneratorSet,
    at_pred: &GraphMorphism,
    from_cell: Option<&GraphMorphism>,
    target: &Graph,
) -> Result<GraphMorphism> {
    match &cert.witness {
        PoWitness::Iso => cert.morphism.inverse()?.then(at_pred),
        PoWitness::Pushout { generator, attaching, comparison } => {
            let g = gens.get(*generator)?;
            let po = crate::graphcat::compute_pushout(attaching, g);
            let cell = from_cell.ok_or_else(|| Error::Internal("no image for the new cell".into()))?;
            let out = po.mediate(target, at_pred, cell)?;
            comparison.inverse()?.then(&out)
        }
    }
}

/// Certificates for every link, searched for when not supplied.
pub fn certify_links(
    d: &SmoothDiagram,
    gens: &GeneratorSet,
    limits: &Limits,
) -> Result<BTreeMap<usize, PoCertificate>> {
    let mut out = BTreeMap::new();
    for link in d.links() {
        let cert = po_membership(&link.morphism, gens, limits)?
            .ok_or_else(|| Error::LinkNotCertified(d.shape().id(link.element).to_string()))?;
        out.insert(link.element, cert);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepCertificate {
    /// The step is a pushout of a generator (or an isomorphism in `Po(X)`).
    Pushout { element: String, certificate: PoCertificate },
    /// The step adds a limit element and is an isomorphism.
    Isomorphism { element: String },
}

/// A finite chain `E_0 -> E_1 -> ... -> E_n` with certified steps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainPresentation {
    pub stages: Vec<Graph>,
    pub steps: Vec<GraphMorphism>,
    pub link_certificates: Vec<StepCertificate>,
}

impl ChainPresentation {
    /// The end-to-end composite `E_0 -> E_n`.
    pub fn composite(&self) -> Result<GraphMorphism> {
        let first = self.stages.first().ok_or_else(|| Error::Internal("empty chain".into()))?;
        self.steps.iter().try_fold(GraphMorphism::identity(first), |acc, s| acc.then(s))
    }

    pub fn verify(&self, gens: &GeneratorSet) -> Result<()> {
        if self.steps.len() + 1 != self.stages.len() || self.link_certificates.len() != self.steps.len() {
            return Err(Error::verification("chain", "stage/step counts disagree"));
        }
        for (k, step) in self.steps.iter().enumerate() {
            let here = format!("chain/step{k}");
            if step.dom() != &self.stages[k] || step.cod() != &self.stages[k + 1] {
                return Err(Error::verification(here, "step does not connect consecutive stages"));
            }
            match &self.link_certificates[k] {
                StepCertificate::Isomorphism { .. } => {
                    if !step.is_iso() {
                        return Err(Error::verification(here, "step flagged isomorphism is not one"));
                    }
                }
                StepCertificate::Pushout { certificate, .. } => {
                    if &certificate.morphism != step {
                        return Err(Error::verification(here, "certificate is for a different morphism"));
                    }
                    certificate.verify(gens).map_err(|e| e.within(&here))?;
                }
            }
        }
        Ok(())
    }

    /// Number of steps that are not isomorphisms.
    pub fn proper_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.is_iso()).count()
    }
}

/// Linearizes a good diagram whose links lie in `Po(X)`, searching for the
/// link certificates.
pub fn linearize(d: &SmoothDiagram, gens: &GeneratorSet, limits: &Limits) -> Result<ChainPresentation> {
    let certs = certify_links(d, gens, limits)?;
    linearize_certified(d, gens, &certs)
}

/// Linearizes along the deterministic linear extension: stage `k` is the
/// colimit over the first `k + 1` elements.
pub fn linearize_certified(
    d: &SmoothDiagram,
    gens: &GeneratorSet,
    link_certs: &BTreeMap<usize, PoCertificate>,
) -> Result<ChainPresentation> {
    let order = linear_extension(d.shape());
    let kinds = classify_all(d.shape())?;
    let mut prefixes = Vec::with_capacity(order.len());
    for k in 1..=order.len() {
        let mut members = order[..k].to_vec();
        members.sort_unstable();
        prefixes.push(d.colimit_over(&members)?);
    }
    let mut stages = vec![prefixes[0].apex().clone()];
    let mut steps = Vec::new();
    let mut link_certificates = Vec::new();
    for k in 1..order.len() {
        let x = order[k];
        let (prev, next) = (&prefixes[k - 1], &prefixes[k]);
        let step = prev.mediate(next.apex(), |y| Ok(next.leg(y).clone()))?;
        let element = d.shape().id(x).to_string();
        let cert = match kinds[x].kind {
            ElementKind::Limit => {
                if !step.is_iso() {
                    return Err(Error::NotSmooth(element));
                }
                StepCertificate::Isomorphism { element }
            }
            ElementKind::Isolated => {
                let pred = kinds[x].predecessor.expect("isolated");
                let link = link_certs.get(&x).ok_or_else(|| Error::LinkNotCertified(element.clone()))?;
                let certificate = transport_link(link, gens, &step, prev.leg(pred), next.leg(x))?;
                StepCertificate::Pushout { element, certificate }
            }
            ElementKind::Bottom => unreachable!("the bottom comes first"),
        };
        stages.push(next.apex().clone());
        steps.push(step);
        link_certificates.push(cert);
    }
    let chain = ChainPresentation { stages, steps, link_certificates };
    chain.verify(gens)?;
    Ok(chain)
}

/// Given `link: D(x⁻) -> D(x)` certified as a pushout of `g` along `c`, and the
/// step `E[x) -> E[x]` of the linearization, certifies the step as a pushout of
/// `g` along `leg(x⁻) ∘ c`.
fn transport_link(
    link: &PoCertificate,
    gens: &GeneratorSet,
    step: &GraphMorphism,
    pred_leg: &GraphMorphism,
    x_leg: &GraphMorphism,
) -> Result<PoCertificate> {
    match &link.witness {
        PoWitness::Iso => {
            if !step.is_iso() {
                return Err(Error::Internal("pushout of an isomorphism is not one".into()));
            }
            Ok(PoCertificate { morphism: step.clone(), witness: PoWitness::Iso })
        }
        PoWitness::Pushout { generator, attaching, comparison } => {
            let g = gens.get(*generator)?;
            let (_, link_right) = {
                let po = crate::graphcat::compute_pushout(attaching, g);
                (po.left, po.right)
            };
            let cell = link_right.then(comparison)?.then(x_leg)?;
            let new_attaching = attaching.then(pred_leg)?;
            let po = crate::graphcat::compute_pushout(&new_attaching, g);
            let cmp = po.mediate(step.cod(), step, &cell)?;
            if !cmp.is_iso() {
                return Err(Error::Internal("linearization step is not a pushout of its link".into()));
            }
            Ok(PoCertificate {
                morphism: step.clone(),
                witness: PoWitness::Pushout { generator: *generator, attaching: new_attaching, comparison: cmp },
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarExtension {
    pub diagram: SmoothDiagram,
    pub added_top: Option<usize>,
    /// `colim D -> colim D*`, checked to be an isomorphism.
    pub comparison: GraphMorphism,
}

/// Extends a good diagram to a directed one by adding limit elements carrying
/// colimits; at finite scale at most one top element is added.
pub fn star_extend(d: &SmoothDiagram) -> Result<StarExtension> {
    star_extend_named(d, &d.shape().fresh_id("top"))
}

pub(crate) fn star_extend_named(d: &SmoothDiagram, top_id: &str) -> Result<StarExtension> {
    let completion = directed_completion(d.shape())?;
    let (extended, added_top) = match completion.added_top {
        None => (d.diagram().clone(), None),
        Some(_) => {
            let all: Vec<usize> = (0..d.len()).collect();
            let colim = d.colimit()?;
            let legs = all.iter().map(|&x| colim.leg(x).clone()).collect();
            let (ext, top) = d.diagram().extend(top_id.to_string(), &all, colim.apex().clone(), legs)?;
            (ext, Some(top))
        }
    };
    let star = SmoothDiagram::new(extended)?;
    let before = d.colimit()?;
    let after = star.colimit()?;
    let comparison = before.mediate(after.apex(), |x| Ok(after.leg(x).clone()))?;
    if !comparison.is_iso() {
        return Err(Error::Internal("star extension changed the colimit".into()));
    }
    Ok(StarExtension { diagram: star, added_top, comparison })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitExtension {
    pub all_limit: bool,
    pub iso: bool,
}

/// Whether `P \ Q` is all limit and whether `colim_Q D -> colim D` is an isomorphism.
pub fn limit_extension_check(d: &SmoothDiagram, q: &InitialSegment) -> Result<LimitExtension> {
    let kinds = classify_all(d.shape())?;
    let all_limit = (0..d.len()).filter(|&x| !q.contains(x)).all(|x| kinds[x].kind == ElementKind::Limit);
    let iso = relative_composite(d, q)?.is_iso();
    if all_limit && !iso {
        return Err(Error::verification(
            "limit extension",
            "only limit elements were added but the colimit changed",
        ));
    }
    Ok(LimitExtension { all_limit, iso })
}

/// An isomorphism between the two apexes commuting with the given maps from a
/// common domain (and optionally to a common codomain).
pub fn compare_under_over(
    under_x: &GraphMorphism,
    under_y: &GraphMorphism,
    over: Option<(&GraphMorphism, &GraphMorphism)>,
) -> Option<GraphMorphism> {
    find_iso_under_over(under_x, under_y, over)
}
