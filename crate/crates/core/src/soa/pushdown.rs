use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::cells::{Cell, CellComplexPresentation};
use super::generators::GeneratorSet;
use super::membership::{PoCertificate, PoWitness};
use crate::diagrams::{certify_links, extend_at_isolated, extend_at_limit, Diagram, SmoothDiagram};
use crate::error::{Error, Result};
use crate::graphcat::{compute_pushout, factor_through, pushout, Cocone, Graph, GraphMorphism, Limits, Pushout, PushoutCertificate};
use crate::posets::{classify_all, linear_extension, ElementKind, FinitePoset};

/// A directed diagram of stages with a cocone exhibiting a graph as its colimit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Staging {
    pub diagram: Diagram,
    pub legs: Vec<GraphMorphism>,
}

impl Staging {
    /// The one-stage staging of `g` by itself.
    pub fn trivial(g: &Graph) -> Self {
        let shape = FinitePoset::chain(1);
        Staging { diagram: Diagram::constant(shape, g), legs: vec![GraphMorphism::identity(g)] }
    }

    /// The chain of the given subgraph inclusions `g_0 -> g_1 -> ... -> target`.
    pub fn chain(steps: &[GraphMorphism]) -> Result<Self> {
        let first = steps.first().ok_or_else(|| Error::InvalidDiagram("empty staging".into()))?;
        let mut objects = vec![first.dom().clone()];
        objects.extend(steps.iter().map(|s| s.cod().clone()));
        let covers = steps.iter().enumerate().map(|(i, s)| (i, i + 1, s.clone())).collect();
        let diagram = Diagram::new(FinitePoset::chain(objects.len()), objects, covers)?;
        let top = diagram.len() - 1;
        let legs = (0..diagram.len()).map(|x| diagram.arrow(x, top).clone()).collect();
        Ok(Staging { diagram, legs })
    }

    pub fn target(&self) -> Option<&Graph> {
        self.legs.first().map(|l| l.cod())
    }

    /// Checks directedness, compatibility of the legs and the colimit property.
    pub fn check(&self, target: &Graph) -> Result<()> {
        let d = &self.diagram;
        if d.shape().greatest().is_none() {
            return Err(Error::NotDirected);
        }
        if self.legs.len() != d.len() {
            return Err(Error::InvalidDiagram("one leg per stage expected".into()));
        }
        for (x, leg) in self.legs.iter().enumerate() {
            if leg.dom() != d.object(x) || leg.cod() != target {
                return Err(Error::InvalidDiagram(format!("leg at `{}` has the wrong type", d.shape().id(x))));
            }
        }
        for (x, y) in d.shape().covers() {
            if d.arrow(x, y).then(&self.legs[y])? != self.legs[x] {
                return Err(Error::InvalidDiagram(format!("legs disagree along {} <= {}", d.shape().id(x), d.shape().id(y))));
            }
        }
        let colim = d.colimit()?;
        if !colim.mediate(target, |x| Ok(self.legs[x].clone()))?.is_iso() {
            return Err(Error::InvalidDiagram("stages do not have the target as colimit".into()));
        }
        Ok(())
    }
}

/// `D⊥ -> colim D` exhibited as the pushout of a cellular `A_Q -> B_Q` along a stage `A_Q -> D⊥`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushdownResult {
    pub stage: String,
    pub presentation: CellComplexPresentation,
    /// The square with `f` the cell inclusion and `g` the stage leg.
    pub square: PushoutCertificate,
    /// `colim D -> apex`, an isomorphism under `D⊥`.
    pub comparison: GraphMorphism,
}

impl PushdownResult {
    pub fn verify(&self, d: &SmoothDiagram, staging: &Staging, gens: &GeneratorSet) -> Result<()> {
        let s = staging.diagram.shape().index_of(&self.stage)?;
        if self.presentation.base != *staging.diagram.object(s) {
            return Err(Error::verification("pushdown", "presentation does not start at the stage"));
        }
        self.presentation.verify(gens).map_err(|e| e.within("pushdown"))?;
        if self.square.f != self.presentation.inclusion() || self.square.g != staging.legs[s] {
            return Err(Error::verification("pushdown", "square is not built from the stage and the cells"));
        }
        self.square.verify().map_err(|e| e.within("pushdown"))?;
        let colim = d.colimit()?;
        let apex = self.square.apex();
        if self.comparison.dom() != colim.apex() || self.comparison.cod() != apex || !self.comparison.is_iso() {
            return Err(Error::verification("pushdown/comparison", "not an isomorphism from the colimit"));
        }
        if colim.leg(d.bottom()).then(&self.comparison)? != self.square.right {
            return Err(Error::verification("pushdown/comparison", "not under the bottom object"));
        }
        Ok(())
    }
}

/// Pushes the cells of a good diagram down to a stage of its bottom object.
pub fn push_down_cells(
    d: &SmoothDiagram,
    staging: &Staging,
    gens: &GeneratorSet,
    limits: &Limits,
) -> Result<PushdownResult> {
    let certs = certify_links(d, gens, limits)?;
    push_down_certified(d, &certs, staging, gens)
}

/// The glued object `W = B ⊔_{A_s} D⊥`.
struct Glued {
    po: Pushout,
}

impl Glued {
    fn new(pres: &CellComplexPresentation, leg: &GraphMorphism) -> Self {
        Glued { po: compute_pushout(&pres.inclusion(), leg) }
    }
}

pub(crate) fn push_down_certified(
    d: &SmoothDiagram,
    certs: &BTreeMap<usize, PoCertificate>,
    staging: &Staging,
    gens: &GeneratorSet,
) -> Result<PushdownResult> {
    let bot = d.bottom();
    staging.check(d.object(bot))?;
    let sd = &staging.diagram;
    let sorder = linear_extension(sd.shape());
    let mut s = sorder[0];
    let mut pres = CellComplexPresentation::new(sd.object(s).clone());
    let mut w = Glued::new(&pres, &staging.legs[s]);
    let mut to_w: BTreeMap<usize, GraphMorphism> = BTreeMap::new();
    to_w.insert(bot, w.po.right.clone());
    let kinds = classify_all(d.shape())?;
    for x in linear_extension(d.shape()) {
        let here = d.shape().id(x).to_string();
        match kinds[x].kind {
            ElementKind::Bottom => {}
            ElementKind::Limit => {
                let m = extend_at_limit(d, x, &to_w, &w.po.apex)?;
                to_w.insert(x, m);
            }
            ElementKind::Isolated => {
                let p = kinds[x].predecessor.expect("isolated");
                let cert = certs.get(&x).ok_or_else(|| Error::LinkNotCertified(here.clone()))?;
                let (generator, attaching) = match &cert.witness {
                    PoWitness::Iso => {
                        let m = cert.morphism.inverse()?.then(&to_w[&p])?;
                        to_w.insert(x, m);
                        continue;
                    }
                    PoWitness::Pushout { generator, attaching, .. } => (*generator, attaching),
                };
                let a = attaching.then(&to_w[&p])?;
                let mut chosen = None;
                for &j in sorder.iter().filter(|&&j| sd.shape().leq(s, j)) {
                    let (rb, phi) = pres.rebase(gens, sd.arrow(s, j))?;
                    let into_w = Cocone { apex: rb.total().clone(), legs: vec![rb.inclusion(), phi.clone()] }
                        .mediate(&w.po.apex, &[staging.legs[j].then(&w.po.right)?, w.po.left.clone()])?;
                    if let Some(a2) = factor_through(&a, &into_w) {
                        chosen = Some((j, rb, phi, a2));
                        break;
                    }
                }
                let (j, rb, phi, a2) = chosen.ok_or_else(|| {
                    Error::Internal(format!("attaching map at `{here}` factors through no stage"))
                })?;
                let grown = rb.attach_cells(gens, vec![Cell::new(generator, a2)])?;
                let stage = grown.stages.last().expect("just attached");
                let next = Glued::new(&grown, &staging.legs[j]);
                let old_to_new =
                    w.po.mediate(&next.po.apex, &phi.then(&stage.inclusion)?.then(&next.po.left)?, &next.po.right)?;
                for m in to_w.values_mut() {
                    *m = m.then(&old_to_new)?;
                }
                let cell = stage.cell_maps[0].then(&next.po.left)?;
                let m = extend_at_isolated(cert, gens, &to_w[&p], Some(&cell), &next.po.apex)?;
                to_w.insert(x, m);
                s = j;
                pres = grown;
                w = next;
            }
        }
    }
    let colim = d.colimit()?;
    let comparison = colim.mediate(&w.po.apex, |x| Ok(to_w[&x].clone()))?;
    if !comparison.is_iso() {
        return Err(Error::Internal("glued object is not the colimit".into()));
    }
    let (_, square) = pushout(&pres.inclusion(), &staging.legs[s])?;
    Ok(PushdownResult { stage: sd.shape().id(s).to_string(), presentation: pres, square, comparison })
}
