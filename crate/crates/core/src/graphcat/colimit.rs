//! Finite colimits of graphs, computed sortwise as quotients of disjoint unions.

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::morphism::GraphMorphism;
use super::search::{enumerate_homs, HomSearch, Limits};
use crate::error::{Error, Result};

/// Union-find whose class representative is always the smallest member.
struct MinUnionFind {
    parent: Vec<usize>,
}

impl MinUnionFind {
    fn new(n: usize) -> Self {
        MinUnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }

    /// Dense class ids, ordered by smallest member.
    fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut id = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for x in 0..n {
            let r = self.find(x);
            if id[r] == usize::MAX {
                id[r] = next;
                next += 1;
            }
            out[x] = id[r];
        }
        (out, next)
    }
}

/// A quotient of `⊔ objects` by generated vertex and edge relations.
struct Quotient<'a> {
    objects: Vec<&'a Graph>,
    voff: Vec<usize>,
    eoff: Vec<usize>,
    vuf: MinUnionFind,
    euf: MinUnionFind,
}

impl<'a> Quotient<'a> {
    fn new(objects: Vec<&'a Graph>) -> Self {
        let mut voff = Vec::with_capacity(objects.len());
        let mut eoff = Vec::with_capacity(objects.len());
        let (mut nv, mut ne) = (0, 0);
        for g in &objects {
            voff.push(nv);
            eoff.push(ne);
            nv += g.vertex_count();
            ne += g.edge_count();
        }
        Quotient { objects, voff, eoff, vuf: MinUnionFind::new(nv), euf: MinUnionFind::new(ne) }
    }

    /// Identifies `(i, x)` with `(j, m(x))` for every element `x` of `m.dom()`.
    fn relate(&mut self, i: usize, j: usize, m: &GraphMorphism) {
        for v in 0..m.dom().vertex_count() {
            self.vuf.union(self.voff[i] + v, self.voff[j] + m.vertex(v));
        }
        for e in 0..m.dom().edge_count() {
            self.euf.union(self.eoff[i] + e, self.eoff[j] + m.edge(e));
        }
    }

    /// Identifies the images of two maps out of a common domain.
    fn relate_pair(&mut self, i: usize, f: &GraphMorphism, j: usize, g: &GraphMorphism) {
        for v in 0..f.dom().vertex_count() {
            self.vuf.union(self.voff[i] + f.vertex(v), self.voff[j] + g.vertex(v));
        }
        for e in 0..f.dom().edge_count() {
            self.euf.union(self.eoff[i] + f.edge(e), self.eoff[j] + g.edge(e));
        }
    }

    fn finish(mut self) -> Cocone {
        let (vclass, nv) = self.vuf.classes();
        let (eclass, ne) = self.euf.classes();
        let mut edges = vec![(usize::MAX, usize::MAX); ne];
        for (i, g) in self.objects.iter().enumerate() {
            for (e, &(s, t)) in g.edges().iter().enumerate() {
                let c = eclass[self.eoff[i] + e];
                if edges[c].0 == usize::MAX {
                    edges[c] = (vclass[self.voff[i] + s], vclass[self.voff[i] + t]);
                }
            }
        }
        let apex = Graph::new(nv, edges).expect("quotient of graphs is a graph");
        let legs = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, g)| {
                GraphMorphism::new_unchecked(
                    (*g).clone(),
                    apex.clone(),
                    (0..g.vertex_count()).map(|v| vclass[self.voff[i] + v]).collect(),
                    (0..g.edge_count()).map(|e| eclass[self.eoff[i] + e]).collect(),
                )
            })
            .collect();
        Cocone { apex, legs }
    }
}

/// A cocone: an apex with one leg per diagram object.
///
/// Cocones returned by the colimit constructions here have jointly
/// surjective legs, which is what [`Cocone::mediate`] relies on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cocone {
    pub apex: Graph,
    pub legs: Vec<GraphMorphism>,
}

impl Cocone {
    /// The unique morphism `apex -> target` whose composite with leg `i` is
    /// `maps[i]`. Fails when `maps` is not a compatible cocone.
    pub fn mediate(&self, target: &Graph, maps: &[GraphMorphism]) -> Result<GraphMorphism> {
        mediate_from(&self.apex, self.legs.iter().zip(maps), target)
    }
}

fn mediate_from<'a>(
    apex: &Graph,
    pairs: impl Iterator<Item = (&'a GraphMorphism, &'a GraphMorphism)>,
    target: &Graph,
) -> Result<GraphMorphism> {
    let mut vmap = vec![usize::MAX; apex.vertex_count()];
    let mut emap = vec![usize::MAX; apex.edge_count()];
    for (k, (leg, map)) in pairs.enumerate() {
        if map.dom() != leg.dom() || map.cod() != target {
            return Err(Error::DomainMismatch(format!("cocone map {k} has the wrong type")));
        }
        for v in 0..leg.dom().vertex_count() {
            let slot = &mut vmap[leg.vertex(v)];
            if *slot != usize::MAX && *slot != map.vertex(v) {
                return Err(Error::DomainMismatch(format!(
                    "maps are not a cocone: vertex v{} of object {k} disagrees",
                    v
                )));
            }
            *slot = map.vertex(v);
        }
        for e in 0..leg.dom().edge_count() {
            let slot = &mut emap[leg.edge(e)];
            if *slot != usize::MAX && *slot != map.edge(e) {
                return Err(Error::DomainMismatch(format!(
                    "maps are not a cocone: edge e{e} of object {k} disagrees"
                )));
            }
            *slot = map.edge(e);
        }
    }
    if vmap.contains(&usize::MAX) || emap.contains(&usize::MAX) {
        return Err(Error::Internal("cocone legs are not jointly surjective".into()));
    }
    GraphMorphism::new(apex.clone(), target.clone(), vmap, emap)
}

/// Colimit of a finite diagram given as objects and arrows `(i, j, m: objects[i] -> objects[j])`.
pub fn colimit(objects: &[Graph], arrows: &[(usize, usize, &GraphMorphism)]) -> Result<Cocone> {
    for &(i, j, m) in arrows {
        if i >= objects.len() || j >= objects.len() {
            return Err(Error::InvalidDiagram(format!("arrow {i} -> {j} mentions a missing object")));
        }
        if m.dom() != &objects[i] || m.cod() != &objects[j] {
            return Err(Error::DomainMismatch(format!("arrow {i} -> {j} has the wrong type")));
        }
    }
    let mut q = Quotient::new(objects.iter().collect());
    for &(i, j, m) in arrows {
        q.relate(i, j, m);
    }
    Ok(q.finish())
}

/// Disjoint union with its injections.
pub fn coproduct(parts: &[Graph]) -> Cocone {
    Quotient::new(parts.iter().collect()).finish()
}

/// The copairing `[maps[0], ..., maps[n-1]]: ⊔ dom(maps[i]) -> target`.
pub fn copair(sum: &Cocone, target: &Graph, maps: &[GraphMorphism]) -> Result<GraphMorphism> {
    if maps.is_empty() {
        return Ok(GraphMorphism::initial(target));
    }
    sum.mediate(target, maps)
}

/// `⊔ f_i: ⊔ dom(f_i) -> ⊔ cod(f_i)` with both coproducts.
pub fn coproduct_map(maps: &[GraphMorphism]) -> Result<(Cocone, Cocone, GraphMorphism)> {
    let doms: Vec<Graph> = maps.iter().map(|m| m.dom().clone()).collect();
    let cods: Vec<Graph> = maps.iter().map(|m| m.cod().clone()).collect();
    let src = coproduct(&doms);
    let dst = coproduct(&cods);
    let composed: Vec<GraphMorphism> =
        maps.iter().zip(&dst.legs).map(|(m, leg)| m.then(leg)).collect::<Result<_>>()?;
    let map = copair(&src, &dst.apex, &composed)?;
    Ok((src, dst, map))
}

/// A computed pushout `B -> P <- C` of `f: A -> B` and `g: A -> C`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pushout {
    pub apex: Graph,
    pub left: GraphMorphism,
    pub right: GraphMorphism,
}

impl Pushout {
    /// The unique map `apex -> target` restricting to `via_left` and `via_right`.
    pub fn mediate(
        &self,
        target: &Graph,
        via_left: &GraphMorphism,
        via_right: &GraphMorphism,
    ) -> Result<GraphMorphism> {
        mediate_from(
            &self.apex,
            [(&self.left, via_left), (&self.right, via_right)].into_iter(),
            target,
        )
    }
}

/// Pushout of `f: A -> B` along `g: A -> C`: the quotient of `B ⊔ C` by `f(a) ~ g(a)`.
pub fn pushout(f: &GraphMorphism, g: &GraphMorphism) -> Result<(Pushout, PushoutCertificate)> {
    if f.dom() != g.dom() {
        return Err(Error::DomainMismatch("pushout legs have different domains".into()));
    }
    let po = compute_pushout(f, g);
    let cert = PushoutCertificate {
        f: f.clone(),
        g: g.clone(),
        left: po.left.clone(),
        right: po.right.clone(),
        probes: Vec::new(),
    };
    Ok((po, cert))
}

pub(crate) fn compute_pushout(f: &GraphMorphism, g: &GraphMorphism) -> Pushout {
    let mut q = Quotient::new(vec![f.cod(), g.cod()]);
    q.relate_pair(0, f, 1, g);
    let mut cocone = q.finish();
    let right = cocone.legs.pop().expect("two legs");
    let left = cocone.legs.pop().expect("two legs");
    Pushout { apex: cocone.apex, left, right }
}

/// One probe of the universal property: a cocone `(b, c)` into `target` and
/// its unique mediating morphism out of the pushout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeWitness {
    pub b: GraphMorphism,
    pub c: GraphMorphism,
    pub mediator: GraphMorphism,
}

/// Evidence that `left: B -> P`, `right: C -> P` is a pushout of `f`, `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushoutCertificate {
    pub f: GraphMorphism,
    pub g: GraphMorphism,
    pub left: GraphMorphism,
    pub right: GraphMorphism,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub probes: Vec<ProbeWitness>,
}

impl PushoutCertificate {
    pub fn apex(&self) -> &Graph {
        self.left.cod()
    }

    /// Records every cocone into each of `targets` with its mediating morphism.
    pub fn with_probes(mut self, targets: &[Graph], limits: &Limits) -> Result<Self> {
        let po = Pushout { apex: self.apex().clone(), left: self.left.clone(), right: self.right.clone() };
        for t in targets {
            for b in enumerate_homs(self.f.cod(), t, limits)? {
                let bf = self.f.then(&b)?;
                for c in enumerate_homs(self.g.cod(), t, limits)? {
                    if bf != self.g.then(&c)? {
                        continue;
                    }
                    let mediator = po.mediate(t, &b, &c)?;
                    self.probes.push(ProbeWitness { b: b.clone(), c, mediator });
                }
            }
        }
        Ok(self)
    }

    /// Re-derives the pushout and checks the recorded square against it.
    pub fn verify(&self) -> Result<()> {
        let fail = |reason: String| Err(Error::verification("pushout", reason));
        if self.f.dom() != self.g.dom() {
            return fail("f and g have different domains".into());
        }
        if self.left.dom() != self.f.cod() || self.right.dom() != self.g.cod() {
            return fail("legs do not start at the codomains of f and g".into());
        }
        if self.left.cod() != self.right.cod() {
            return fail("legs have different codomains".into());
        }
        if self.f.then(&self.left)? != self.g.then(&self.right)? {
            return fail("square does not commute".into());
        }
        let fresh = compute_pushout(&self.f, &self.g);
        let cmp = fresh.mediate(self.apex(), &self.left, &self.right)?;
        if !cmp.is_iso() {
            return fail("comparison with the recomputed pushout is not an isomorphism".into());
        }
        for (k, p) in self.probes.iter().enumerate() {
            let target = p.mediator.cod();
            if self.f.then(&p.b)? != self.g.then(&p.c)? {
                return fail(format!("probe {k} is not a cocone"));
            }
            if self.left.then(&p.mediator)? != p.b || self.right.then(&p.mediator)? != p.c {
                return fail(format!("probe {k}: mediator does not restrict to the cocone"));
            }
            let n = HomSearch::new(self.apex(), target)
                .under(&self.left, &p.b)
                .under(&self.right, &p.c)
                .count(2);
            if n != 1 {
                return fail(format!("probe {k}: {n} mediating morphisms"));
            }
        }
        Ok(())
    }
}
