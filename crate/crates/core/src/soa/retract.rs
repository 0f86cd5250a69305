use std::collections::{BTreeMap, BTreeSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::cells::{Cell, CellComplexPresentation};
use super::factorize::CERT_VERSION;
use super::generators::GeneratorSet;
use super::membership::{PoCertificate, PoWitness};
use super::pushdown::Staging;
use crate::diagrams::{
    certify_links, extend_at_isolated, extend_at_limit, star_extend, SegmentColimit, SmoothDiagram,
};
use crate::error::{Error, Result};
use crate::graphcat::{compute_pushout, factor_through, pushout, Graph, GraphMorphism, HomSearch, Limits, PushoutCertificate};
use crate::posets::{classify_all, linear_extension, strong_closure, ElementKind, InitialSegment};

/// An idempotent `f = e ∘ r` split through its image `E`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub image: Graph,
    pub section: GraphMorphism,
    pub retraction: GraphMorphism,
}

impl Split {
    pub fn verify(&self, f: &GraphMorphism) -> Result<()> {
        if !self.section.then(&self.retraction)?.is_identity() {
            return Err(Error::verification("split", "r ∘ e is not the identity"));
        }
        if self.retraction.then(&self.section)? != *f {
            return Err(Error::verification("split", "e ∘ r is not the idempotent"));
        }
        Ok(())
    }
}

/// Splits an idempotent through the subgraph of its fixed points. When
/// `under` is given, `f` must fix its image.
pub fn split_idempotent(f: &GraphMorphism, under: Option<&GraphMorphism>) -> Result<Split> {
    if !f.is_idempotent() {
        return Err(Error::NotIdempotent);
    }
    if let Some(a) = under {
        if a.cod() != f.dom() || a.then(f)? != *a {
            return Err(Error::NotUnderBase("the idempotent moves the image of the base".into()));
        }
    }
    let y = f.dom();
    let fixed_v: Vec<usize> = (0..y.vertex_count()).filter(|&v| f.vertex(v) == v).collect();
    let fixed_e: Vec<usize> = (0..y.edge_count()).filter(|&e| f.edge(e) == e).collect();
    let mut vpos = vec![usize::MAX; y.vertex_count()];
    for (i, &v) in fixed_v.iter().enumerate() {
        vpos[v] = i;
    }
    let mut epos = vec![usize::MAX; y.edge_count()];
    for (i, &e) in fixed_e.iter().enumerate() {
        epos[e] = i;
    }
    let edges = fixed_e.iter().map(|&e| (vpos[y.src(e)], vpos[y.tgt(e)])).collect();
    let image = Graph::new(fixed_v.len(), edges)?;
    let section = GraphMorphism::new(image.clone(), y.clone(), fixed_v, fixed_e)?;
    let retraction = GraphMorphism::new(
        y.clone(),
        image.clone(),
        f.vmap().iter().map(|&v| vpos[v]).collect(),
        f.emap().iter().map(|&e| epos[e]).collect(),
    )?;
    Ok(Split { image, section, retraction })
}

/// Evidence that the image of an idempotent on a pushout of a cellular map is
/// a pushout of a retract of a cellular map between stages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RefactorCertificate {
    /// `h: K -> L`.
    pub cellular: CellComplexPresentation,
    /// `k: K -> X`; `Y` is the pushout of `h` along `k`.
    pub along: GraphMorphism,
    /// Idempotent on `Y` under `X`.
    pub idempotent: GraphMorphism,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<String>,
    /// `X_α -> X`.
    pub stage_leg: GraphMorphism,
    /// `K -> X_α`.
    pub stage_along: GraphMorphism,
    /// Idempotent on `Y_α = X_α ⊔_K L` under `X_α`, compatible with `idempotent`.
    pub stage_idempotent: GraphMorphism,
    pub stage_split: Split,
    /// `X_α -> E_α` pushed out along `X_α -> X`.
    pub pushout: PushoutCertificate,
    pub split: Split,
    /// Pushout apex `->` image of `idempotent`, an isomorphism under `X`.
    pub comparison: GraphMorphism,
}

struct StageData {
    rebased: CellComplexPresentation,
    to_total: GraphMorphism,
}

fn stage_data(
    h: &CellComplexPresentation,
    gens: &GeneratorSet,
    k_alpha: &GraphMorphism,
    leg: &GraphMorphism,
    y: &CellComplexPresentation,
) -> Result<StageData> {
    let (rebased, _) = h.rebase(gens, k_alpha)?;
    let to_total = rebased.map_out(&leg.then(&y.inclusion())?, |i, j| y.cell_map(i, j))?;
    Ok(StageData { rebased, to_total })
}

impl RefactorCertificate {
    pub fn verify(&self, gens: &GeneratorSet) -> Result<()> {
        let fail = |reason: &str| Err(Error::verification("refactor", reason));
        self.cellular.verify(gens).map_err(|e| e.within("refactor"))?;
        let (y, _) = self.cellular.rebase(gens, &self.along)?;
        let x_incl = y.inclusion();
        if self.idempotent.dom() != y.total() || !self.idempotent.is_idempotent() {
            return fail("idempotent is not an idempotent on the pushout");
        }
        if x_incl.then(&self.idempotent)? != x_incl {
            return fail("idempotent is not under the base");
        }
        if self.stage_along.then(&self.stage_leg)? != self.along {
            return fail("stage does not factor the attaching map");
        }
        let st = stage_data(&self.cellular, gens, &self.stage_along, &self.stage_leg, &y)?;
        let fa = &self.stage_idempotent;
        let a_incl = st.rebased.inclusion();
        if fa.dom() != st.rebased.total() || !fa.is_idempotent() || a_incl.then(fa)? != a_incl {
            return fail("stage idempotent is not an idempotent under the stage");
        }
        if fa.then(&st.to_total)? != st.to_total.then(&self.idempotent)? {
            return fail("stage idempotent is not compatible with the idempotent");
        }
        self.stage_split.verify(fa).map_err(|e| e.within("refactor/stage"))?;
        self.split.verify(&self.idempotent).map_err(|e| e.within("refactor"))?;
        if self.pushout.f != a_incl.then(&self.stage_split.retraction)? || self.pushout.g != self.stage_leg {
            return fail("pushout is not of the stage retract along the stage");
        }
        self.pushout.verify().map_err(|e| e.within("refactor"))?;
        let c = &self.comparison;
        if c.dom() != self.pushout.apex() || c.cod() != &self.split.image || !c.is_iso() {
            return fail("comparison is not an isomorphism onto the image");
        }
        if self.pushout.right.then(c)? != x_incl.then(&self.split.retraction)? {
            return fail("comparison is not under the base");
        }
        Ok(())
    }
}

/// Refactors the image of `f` (an idempotent on `Y = X ⊔_K L` under `X`) as a
/// pushout of a retract of `X_α -> X_α ⊔_K L` for a stage `X_α` of `X`.
pub fn retract_refactor(
    h: &CellComplexPresentation,
    along: &GraphMorphism,
    staging: Option<&Staging>,
    f: &GraphMorphism,
    gens: &GeneratorSet,
    limits: &Limits,
) -> Result<RefactorCertificate> {
    let (y, _) = h.rebase(gens, along)?;
    let x_incl = y.inclusion();
    if f.dom() != y.total() || f.cod() != y.total() {
        return Err(Error::DomainMismatch("idempotent is not an endomorphism of the pushout".into()));
    }
    let split = split_idempotent(f, Some(&x_incl))?;
    let trivial;
    let staging = match staging {
        Some(s) => {
            s.check(along.cod())?;
            s
        }
        None => {
            trivial = Staging::trivial(along.cod());
            &trivial
        }
    };
    let shape = staging.diagram.shape();
    for alpha in linear_extension(shape) {
        let leg = &staging.legs[alpha];
        let Some(k_alpha) = factor_through(along, leg) else { continue };
        let st = stage_data(h, gens, &k_alpha, leg, &y)?;
        let a_incl = st.rebased.inclusion();
        let candidates = HomSearch::new(st.rebased.total(), st.rebased.total())
            .under(&a_incl, &a_incl)
            .over(&st.to_total, &st.to_total.then(f)?)
            .collect(limits.max_homs)?;
        for fa in candidates.into_iter().filter(|c| c.is_idempotent()) {
            let stage_split = split_idempotent(&fa, Some(&a_incl))?;
            let (po, cert) = pushout(&a_incl.then(&stage_split.retraction)?, leg)?;
            let via_left = stage_split.section.then(&st.to_total)?.then(&split.retraction)?;
            let via_right = x_incl.then(&split.retraction)?;
            let comparison = po.mediate(&split.image, &via_left, &via_right)?;
            if !comparison.is_iso() {
                continue;
            }
            let out = RefactorCertificate {
                cellular: h.clone(),
                along: along.clone(),
                idempotent: f.clone(),
                stage: (staging.diagram.len() > 1).then(|| shape.id(alpha).to_string()),
                stage_leg: leg.clone(),
                stage_along: k_alpha,
                stage_idempotent: fa,
                stage_split,
                pushout: cert,
                split,
                comparison,
            };
            return Ok(out);
        }
    }
    Err(Error::NoFactorization("no stage carries a compatible idempotent".into()))
}

/// The lifted idempotent: `S` on elements and `φ_z` on `D(Sz)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractTrace {
    pub s_map: IndexMap<String, String>,
    pub candidates: usize,
    pub segments: Vec<Vec<String>>,
}

/// Evidence that the image of an idempotent on a cellular map is cellular for
/// the retracts of small cellular maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetractCertificate {
    pub cert_version: u32,
    pub budget: usize,
    pub diagram: SmoothDiagram,
    pub idempotent: GraphMorphism,
    pub split: Split,
    pub trace: RetractTrace,
    pub phi: IndexMap<String, GraphMorphism>,
    /// `E_0 -> E_1 -> ... -> E_n`.
    pub stages: Vec<Graph>,
    pub steps: Vec<GraphMorphism>,
    pub links: Vec<RefactorCertificate>,
    /// Pushout apex of each link `->` the next stage.
    pub link_isos: Vec<GraphMorphism>,
    /// `D⊥ -> E_0`.
    pub base_map: GraphMorphism,
    /// `E_n -> image of the idempotent`, an isomorphism under `D⊥`.
    pub comparison: GraphMorphism,
}

impl RetractCertificate {
    /// The composite `D⊥ -> E_n`.
    pub fn composite(&self) -> Result<GraphMorphism> {
        self.steps.iter().try_fold(self.base_map.clone(), |acc, s| acc.then(s))
    }

    pub fn verify(&self, gens: &GeneratorSet, limits: &Limits) -> Result<()> {
        if self.cert_version != CERT_VERSION {
            return Err(Error::CertVersion(self.cert_version));
        }
        let colim = self.diagram.colimit()?;
        let a = colim.leg(self.diagram.bottom());
        self.split.verify(&self.idempotent).map_err(|e| e.within("retract"))?;
        if a.then(&self.idempotent)? != *a {
            return Err(Error::verification("retract", "idempotent is not under the bottom object"));
        }
        let n = self.steps.len();
        if self.stages.len() != n + 1 || self.links.len() != n || self.link_isos.len() != n {
            return Err(Error::verification("retract", "stage/step/link counts disagree"));
        }
        for (i, step) in self.steps.iter().enumerate() {
            let here = format!("retract/link{i}");
            if step.dom() != &self.stages[i] || step.cod() != &self.stages[i + 1] {
                return Err(Error::verification(&here, "step does not connect its stages"));
            }
            let link = &self.links[i];
            link.verify(gens).map_err(|e| e.within(&here))?;
            let iso = &self.link_isos[i];
            if link.pushout.right.dom() != &self.stages[i] || !iso.is_iso() || link.pushout.right.then(iso)? != *step {
                return Err(Error::verification(&here, "step is not the link's pushout"));
            }
        }
        let c = &self.comparison;
        if c.dom() != self.stages.last().expect("nonempty") || c.cod() != &self.split.image || !c.is_iso() {
            return Err(Error::verification("retract/comparison", "not an isomorphism onto the image"));
        }
        if self.composite()?.then(c)? != a.then(&self.split.retraction)? {
            return Err(Error::verification("retract/comparison", "not under the bottom object"));
        }
        match eliminate_retract(&self.diagram, &self.idempotent, gens, self.budget, limits)? {
            RetractOutcome::Certified(fresh) if *fresh == *self => Ok(()),
            _ => Err(Error::verification("rerun", "certificate differs from a fresh run")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RetractOutcome {
    Certified(Box<RetractCertificate>),
    /// The search for the lifted idempotent ran out of budget.
    Inconclusive { trace: RetractTrace, reason: String },
}

struct Lifted {
    s: Vec<usize>,
    phi: Vec<GraphMorphism>,
}

/// Lifts `f` on `colim D` to `S` and an idempotent natural `φ: DS -> DS`,
/// choosing for each element the first `Sz` (in linear order) that admits
/// a suitable `φ_z`. Returns the number of candidates examined on failure.
fn lift_idempotent(
    d: &SmoothDiagram,
    colim: &SegmentColimit,
    f: &GraphMorphism,
    budget: usize,
    limits: &Limits,
) -> Result<std::result::Result<(Lifted, usize), (Vec<usize>, usize)>> {
    let shape = d.shape();
    let order = linear_extension(shape);
    let mut s = vec![usize::MAX; d.len()];
    let mut phi: Vec<Option<GraphMorphism>> = vec![None; d.len()];
    let mut examined = 0;
    for &z in &order {
        let lower = shape.lower_covers(z);
        if lower.is_empty() {
            s[z] = z;
            phi[z] = Some(GraphMorphism::identity(d.object(z)));
            continue;
        }
        let mut found = None;
        'w: for &w in order.iter().filter(|&&w| shape.leq(z, w) && lower.iter().all(|&y| shape.leq(s[y], w))) {
            let leg = colim.leg(w);
            let mut search = HomSearch::new(d.object(w), d.object(w)).over(leg, &leg.then(f)?);
            let mut natural = Vec::new();
            for &y in &lower {
                let arrow = d.arrow(s[y], w).clone();
                natural.push((arrow.clone(), phi[y].as_ref().expect("earlier").then(&arrow)?));
            }
            for (arrow, target) in &natural {
                search = search.under(arrow, target);
            }
            for cand in search.collect(limits.max_homs)? {
                examined += 1;
                if examined > budget {
                    return Ok(Err((s, examined)));
                }
                if cand.is_idempotent() {
                    found = Some((w, cand));
                    break 'w;
                }
            }
        }
        let (w, cand) = found.ok_or_else(|| Error::Internal("no lift of the idempotent at the top".into()))?;
        s[z] = w;
        phi[z] = Some(cand);
    }
    let phi = phi.into_iter().map(|p| p.expect("assigned")).collect();
    Ok(Ok((Lifted { s, phi }, examined)))
}

/// Smallest initial segment containing `seed` that is closed and `S`-stable.
fn stabilize(d: &SmoothDiagram, s: &[usize], seed: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
    let shape = d.shape();
    let mut cur: BTreeSet<usize> = seed.iter().flat_map(|&x| shape.down(x)).collect();
    loop {
        let seg = InitialSegment::new(shape, cur.iter().copied().collect())?;
        let mut next: BTreeSet<usize> = strong_closure(shape, &seg)?.closure.members().iter().copied().collect();
        let images: Vec<usize> = next.iter().map(|&x| s[x]).collect();
        for y in images {
            next.extend(shape.down(y));
        }
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
}

/// Smallest `S`-stable initial segment containing `seed`.
fn s_stable(d: &SmoothDiagram, s: &[usize], seed: &BTreeSet<usize>) -> BTreeSet<usize> {
    let shape = d.shape();
    let mut cur: BTreeSet<usize> = seed.iter().flat_map(|&x| shape.down(x)).collect();
    loop {
        let mut next = cur.clone();
        for &x in &cur {
            next.extend(shape.down(s[x]));
        }
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn members(set: &BTreeSet<usize>) -> Vec<usize> {
    set.iter().copied().collect()
}

/// The idempotent on `colim_R D` induced by `φ` for an `S`-stable segment `R`.
fn induced(d: &SmoothDiagram, lifted: &Lifted, colim: &SegmentColimit) -> Result<GraphMorphism> {
    colim.mediate(colim.apex(), |y| {
        let sy = lifted.s[y];
        d.arrow(y, sy).then(&lifted.phi[y])?.then(colim.leg(sy))
    })
}

/// Presentation of `colim_lower D -> colim_upper D` with one cell per
/// isolated element of `upper \ lower`, and the isomorphism from
/// `colim_upper D` onto its total space.
fn relative_presentation(
    d: &SmoothDiagram,
    certs: &BTreeMap<usize, PoCertificate>,
    gens: &GeneratorSet,
    lower: &SegmentColimit,
    upper: &SegmentColimit,
) -> Result<(CellComplexPresentation, GraphMorphism)> {
    let kinds = classify_all(d.shape())?;
    let mut pres = CellComplexPresentation::new(lower.apex().clone());
    let mut to_t: BTreeMap<usize, GraphMorphism> =
        lower.members.iter().map(|&y| (y, lower.leg(y).clone())).collect();
    for x in linear_extension(d.shape()) {
        if !upper.members.contains(&x) || lower.members.contains(&x) {
            continue;
        }
        let total = pres.total().clone();
        match kinds[x].kind {
            ElementKind::Bottom => unreachable!("the bottom lies in every nonempty segment"),
            ElementKind::Limit => {
                let m = extend_at_limit(d, x, &to_t, &total)?;
                to_t.insert(x, m);
            }
            ElementKind::Isolated => {
                let p = kinds[x].predecessor.expect("isolated");
                let cert = certs.get(&x).ok_or_else(|| Error::LinkNotCertified(d.shape().id(x).to_string()))?;
                match &cert.witness {
                    PoWitness::Iso => {
                        let m = cert.morphism.inverse()?.then(&to_t[&p])?;
                        to_t.insert(x, m);
                    }
                    PoWitness::Pushout { generator, attaching, .. } => {
                        let c = attaching.then(&to_t[&p])?;
                        pres = pres.attach_cells(gens, vec![Cell::new(*generator, c)])?;
                        let stage = pres.stages.last().expect("just attached");
                        for m in to_t.values_mut() {
                            *m = m.then(&stage.inclusion)?;
                        }
                        let m = extend_at_isolated(cert, gens, &to_t[&p], Some(&stage.cell_maps[0]), &stage.total)?;
                        to_t.insert(x, m);
                    }
                }
            }
        }
    }
    let cmp = upper.mediate(pres.total(), |y| Ok(to_t[&y].clone()))?;
    if !cmp.is_iso() {
        return Err(Error::Internal("relative presentation does not reach the colimit".into()));
    }
    Ok((pres, cmp))
}

/// Rewrites the image of an idempotent on a cellular map as a cellular map
/// whose links are pushouts of retracts of small cellular maps.
///
/// `budget` bounds the number of candidate components examined while lifting
/// the idempotent to the diagram.
pub fn eliminate_retract(
    d: &SmoothDiagram,
    f: &GraphMorphism,
    gens: &GeneratorSet,
    budget: usize,
    limits: &Limits,
) -> Result<RetractOutcome> {
    let colim = d.colimit()?;
    let a = colim.leg(d.bottom());
    if f.dom() != colim.apex() || f.cod() != colim.apex() {
        return Err(Error::DomainMismatch("idempotent is not an endomorphism of the colimit".into()));
    }
    let split = split_idempotent(f, Some(a))?;

    let star = star_extend(d)?;
    let ds = &star.diagram;
    let cs = ds.colimit()?;
    let fs = star.comparison.inverse()?.then(f)?.then(&star.comparison)?;
    let ids = |x: usize| ds.shape().id(x).to_string();
    let (lifted, candidates) = match lift_idempotent(ds, &cs, &fs, budget, limits)? {
        Ok(done) => done,
        Err((s, candidates)) => {
            let s_map = (0..ds.len()).filter(|&x| s[x] != usize::MAX).map(|x| (ids(x), ids(s[x]))).collect();
            let trace = RetractTrace { s_map, candidates, segments: Vec::new() };
            return Ok(RetractOutcome::Inconclusive { trace, reason: format!("lifting budget of {budget} candidates exhausted") });
        }
    };
    let certs = certify_links(ds, gens, limits)?;
    let order = linear_extension(ds.shape());
    let everything: BTreeSet<usize> = (0..ds.len()).collect();

    let mut p = stabilize(ds, &lifted.s, &BTreeSet::from([ds.bottom()]))?;
    let mut segments = vec![p.clone()];
    let mut c = ds.colimit_over(&members(&p))?;
    let mut sp = split_idempotent(&induced(ds, &lifted, &c)?, None)?;
    let base_map = c.leg(ds.bottom()).then(&sp.retraction)?;
    let mut stages = vec![sp.image.clone()];
    let (mut steps, mut links, mut link_isos) = (Vec::new(), Vec::new(), Vec::new());
    while p != everything {
        let x = *order.iter().find(|x| !p.contains(x)).expect("not everything");
        let mut w = x;
        while lifted.s[w] != w {
            w = lifted.s[w];
        }
        let q: BTreeSet<usize> = ds.shape().down(w).into_iter().collect();
        let union: BTreeSet<usize> = p.union(&q).copied().collect();
        let p_next = stabilize(ds, &lifted.s, &union)?;
        let fresh: BTreeSet<usize> = q.union(&p_next.difference(&p).copied().collect()).copied().collect();
        let q_full = s_stable(ds, &lifted.s, &fresh);
        let lower: BTreeSet<usize> = p.intersection(&q_full).copied().collect();

        let k_colim = ds.colimit_over(&members(&lower))?;
        let u_colim = ds.colimit_over(&members(&q_full))?;
        let (h, h_cmp) = relative_presentation(ds, &certs, gens, &k_colim, &u_colim)?;
        let c_next = ds.colimit_over(&members(&p_next))?;
        let m = c.mediate(c_next.apex(), |y| Ok(c_next.leg(y).clone()))?;
        let sp_next = split_idempotent(&induced(ds, &lifted, &c_next)?, None)?;

        let kmap = k_colim.mediate(c.apex(), |y| Ok(c.leg(y).clone()))?.then(&sp.retraction)?;
        let po_f = compute_pushout(&m, &sp.retraction);
        let f_next = induced(ds, &lifted, &c_next)?;
        let g_f = po_f.mediate(&po_f.apex, &f_next.then(&po_f.left)?, &po_f.right)?;
        let (rb, _) = h.rebase(gens, &kmap)?;
        let u_to_next = u_colim.mediate(c_next.apex(), |y| Ok(c_next.leg(y).clone()))?;
        let total_to_next = h_cmp.inverse()?.then(&u_to_next)?;
        let psi = rb.map_out(&po_f.right, |i, j| h.cell_map(i, j)?.then(&total_to_next)?.then(&po_f.left))?;
        if !psi.is_iso() {
            return Err(Error::Internal("relative pushout square does not close".into()));
        }
        let f_y = psi.then(&g_f)?.then(&psi.inverse()?)?;
        let link = retract_refactor(&h, &kmap, None, &f_y, gens, limits)?;
        let step = sp.section.then(&m)?.then(&sp_next.retraction)?;
        let rho = po_f.mediate(&sp_next.image, &sp_next.retraction, &step)?;
        let link_iso = link.comparison.then(&link.split.section)?.then(&psi)?.then(&rho)?;
        if !link_iso.is_iso() || link.pushout.right.then(&link_iso)? != step {
            return Err(Error::Internal("link image does not match the next stage".into()));
        }
        stages.push(sp_next.image.clone());
        steps.push(step);
        links.push(link);
        link_isos.push(link_iso);
        segments.push(p_next.clone());
        p = p_next;
        c = c_next;
        sp = sp_next;
    }
    if induced(ds, &lifted, &c)? != fs {
        return Err(Error::Internal("lifted idempotent does not induce the original".into()));
    }
    let comparison = sp.section.then(&star.comparison.inverse()?)?.then(&split.retraction)?;
    if !comparison.is_iso() {
        return Err(Error::Internal("final stage is not the image of the idempotent".into()));
    }
    let trace = RetractTrace {
        s_map: (0..ds.len()).map(|x| (ids(x), ids(lifted.s[x]))).collect(),
        candidates,
        segments: segments.iter().map(|seg| seg.iter().map(|&x| ids(x)).collect()).collect(),
    };
    let cert = RetractCertificate {
        cert_version: CERT_VERSION,
        budget,
        diagram: d.clone(),
        idempotent: f.clone(),
        split,
        trace,
        phi: (0..ds.len()).map(|x| (ids(x), lifted.phi[x].clone())).collect(),
        stages,
        steps,
        links,
        link_isos,
        base_map,
        comparison,
    };
    Ok(RetractOutcome::Certified(Box::new(cert)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::Diagram;
    use crate::graphcat::{are_isomorphic, find_iso_under_over};
    use crate::posets::shapes::span;
    use crate::posets::FinitePoset;

    fn e1() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    fn endo(g: &Graph, vmap: Vec<usize>, emap: Vec<usize>) -> GraphMorphism {
        GraphMorphism::new(g.clone(), g.clone(), vmap, emap).unwrap()
    }

    #[test]
    fn split_examples() {
        let s = split_idempotent(&GraphMorphism::identity(&e1()), None).unwrap();
        assert_eq!(s.image, e1());

        let v2 = Graph::discrete(2);
        let fold = endo(&v2, vec![0, 0], vec![]);
        let s = split_idempotent(&fold, None).unwrap();
        assert_eq!(s.image, Graph::discrete(1));
        s.verify(&fold).unwrap();

        let y = Graph::new(3, vec![(0, 1)]).unwrap();
        let f = endo(&y, vec![0, 1, 0], vec![0]);
        let s = split_idempotent(&f, None).unwrap();
        assert_eq!(s.image, e1());
        s.verify(&f).unwrap();

        let swap = endo(&v2, vec![1, 0], vec![]);
        assert_eq!(split_idempotent(&swap, None).unwrap_err(), Error::NotIdempotent);
        let a = GraphMorphism::new(Graph::discrete(1), v2.clone(), vec![1], vec![]).unwrap();
        assert!(matches!(split_idempotent(&fold, Some(&a)).unwrap_err(), Error::NotUnderBase(_)));
    }

    /// `G -> G ⊔ V2` as two vertex cells on `G`.
    fn two_new_vertices(g: &Graph) -> (CellComplexPresentation, GraphMorphism) {
        let x = GeneratorSet::standard();
        let h = CellComplexPresentation::new(Graph::empty())
            .attach_cells(&x, vec![Cell::new(0, GraphMorphism::initial(&Graph::empty()))])
            .unwrap();
        let h = h.attach_cells(&x, vec![Cell::new(0, GraphMorphism::initial(h.total()))]).unwrap();
        (h, GraphMorphism::initial(g))
    }

    #[test]
    fn refactor_identity_and_collapse() {
        let x = GeneratorSet::standard();
        let g = e1();
        let (h, k) = two_new_vertices(&g);
        let (y, _) = h.rebase(&x, &k).unwrap();
        let id = GraphMorphism::identity(y.total());
        let cert = retract_refactor(&h, &k, None, &id, &x, &Limits::default()).unwrap();
        cert.verify(&x).unwrap();
        assert!(cert.comparison.is_iso());

        // collapse the second new vertex (index 3) onto the first (index 2)
        let f = endo(y.total(), vec![0, 1, 2, 2], vec![0]);
        let cert = retract_refactor(&h, &k, None, &f, &x, &Limits::default()).unwrap();
        cert.verify(&x).unwrap();
        assert!(are_isomorphic(&cert.split.image, &Graph::new(3, vec![(0, 1)]).unwrap()));

        // with the empty stage available the retract is the single vertex cell
        let staging = Staging::chain(&[GraphMorphism::initial(&g)]).unwrap();
        let cert = retract_refactor(&h, &k, Some(&staging), &f, &x, &Limits::default()).unwrap();
        cert.verify(&x).unwrap();
        assert_eq!(cert.stage.as_deref(), Some("0"));
        assert_eq!(cert.stage_split.image, Graph::discrete(1));
    }

    #[test]
    fn refactor_keeps_an_attached_edge() {
        let x = GeneratorSet::standard();
        let v2 = Graph::discrete(2);
        let h = CellComplexPresentation::new(v2.clone())
            .attach_cells(&x, vec![Cell::new(1, GraphMorphism::identity(&v2))])
            .unwrap();
        let k = GraphMorphism::identity(&v2);
        let id = GraphMorphism::identity(h.total());
        let cert = retract_refactor(&h, &k, None, &id, &x, &Limits::default()).unwrap();
        assert_eq!(cert.split.image, e1());
        cert.verify(&x).unwrap();
    }

    fn vertex_span() -> SmoothDiagram {
        let v1 = Graph::discrete(1);
        let covers = vec![(0, 1, GraphMorphism::initial(&v1)), (0, 2, GraphMorphism::initial(&v1))];
        SmoothDiagram::new(Diagram::new(span(), vec![Graph::empty(), v1.clone(), v1], covers).unwrap()).unwrap()
    }

    fn certified(out: RetractOutcome) -> RetractCertificate {
        match out {
            RetractOutcome::Certified(c) => *c,
            RetractOutcome::Inconclusive { reason, .. } => panic!("inconclusive: {reason}"),
        }
    }

    #[test]
    fn collapsing_two_vertex_cells() {
        let x = GeneratorSet::standard();
        let d = vertex_span();
        let colim = d.colimit().unwrap();
        let f = endo(colim.apex(), vec![0, 0], vec![]);
        let cert = certified(eliminate_retract(&d, &f, &x, 1000, &Limits::default()).unwrap());
        assert_eq!(cert.split.image, Graph::discrete(1));
        assert_eq!(cert.stages.last().unwrap(), &Graph::discrete(1));
        cert.verify(&x, &Limits::default()).unwrap();
    }

    #[test]
    fn identity_keeps_the_presentation() {
        let x = GeneratorSet::standard();
        let d = vertex_span();
        let colim = d.colimit().unwrap();
        let f = GraphMorphism::identity(colim.apex());
        let cert = certified(eliminate_retract(&d, &f, &x, 1000, &Limits::default()).unwrap());
        assert_eq!(cert.stages.last().unwrap(), &Graph::discrete(2));
        assert!(cert.trace.s_map.iter().all(|(k, v)| k == v));
    }

    #[test]
    fn stray_vertex_is_folded_onto_an_edge() {
        let x = GeneratorSet::standard();
        let (v1, v2, v3) = (Graph::discrete(1), Graph::discrete(2), Graph::discrete(3));
        let with_edge = Graph::new(3, vec![(0, 1)]).unwrap();
        let objs = vec![Graph::empty(), v1.clone(), v2.clone(), v3.clone(), with_edge.clone()];
        let covers = vec![
            (0, 1, GraphMorphism::initial(&v1)),
            (1, 2, GraphMorphism::new(v1.clone(), v2.clone(), vec![0], vec![]).unwrap()),
            (2, 3, GraphMorphism::new(v2.clone(), v3.clone(), vec![0, 1], vec![]).unwrap()),
            (3, 4, GraphMorphism::new(v3.clone(), with_edge.clone(), vec![0, 1, 2], vec![]).unwrap()),
        ];
        let d = SmoothDiagram::new(Diagram::new(FinitePoset::chain(5), objs, covers).unwrap()).unwrap();
        let colim = d.colimit().unwrap();
        let f = endo(colim.apex(), vec![0, 1, 0], vec![0]);
        let cert = certified(eliminate_retract(&d, &f, &x, 1000, &Limits::default()).unwrap());
        assert!(are_isomorphic(&cert.split.image, &e1()));
        let under = cert.composite().unwrap();
        let direct = colim.leg(0).then(&cert.split.retraction).unwrap();
        assert!(find_iso_under_over(&under, &direct, None).is_some());
        cert.verify(&x, &Limits::default()).unwrap();
    }

    #[test]
    fn zero_budget_is_inconclusive() {
        let x = GeneratorSet::standard();
        let d = vertex_span();
        let colim = d.colimit().unwrap();
        let f = endo(colim.apex(), vec![0, 0], vec![]);
        let out = eliminate_retract(&d, &f, &x, 0, &Limits::default()).unwrap();
        assert!(matches!(out, RetractOutcome::Inconclusive { .. }));
    }
}
