//! Backtracking search for graph morphisms under constraints.
//!
//! Every hom-set computation in the crate (plain enumeration, lifting
//! diagonals, factorizations, isomorphisms under/over fixed objects) goes
//! through [`HomSearch`]. Solutions are produced in lexicographic order of
//! `(vmap, emap)`, so every consumer is deterministic.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use super::graph::Graph;
use super::morphism::GraphMorphism;
use crate::error::{Error, Result};

/// Size limits for exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest vertex count allowed on either side of an enumerated hom-set.
    pub max_vertices: usize,
    /// Largest number of morphisms a single enumeration may return.
    pub max_homs: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_vertices: 8, max_homs: 200_000 }
    }
}

impl Limits {
    pub fn with_max_vertices(self, max_vertices: usize) -> Self {
        Limits { max_vertices, ..self }
    }

    pub(crate) fn check_graph(&self, g: &Graph, role: &str) -> Result<()> {
        if g.vertex_count() > self.max_vertices {
            return Err(Error::bound(
                format!("{role} has {} vertices", g.vertex_count()),
                self.max_vertices,
            ));
        }
        Ok(())
    }
}

/// A constrained search for morphisms `dom -> cod`.
#[derive(Clone, Debug)]
pub struct HomSearch<'a> {
    dom: &'a Graph,
    cod: &'a Graph,
    vcand: Vec<Option<Vec<usize>>>,
    ecand: Vec<Option<Vec<usize>>>,
    injective: bool,
    infeasible: bool,
}

fn intersect(slot: &mut Option<Vec<usize>>, allowed: Vec<usize>) {
    *slot = Some(match slot.take() {
        None => allowed,
        Some(prev) => prev.into_iter().filter(|x| allowed.contains(x)).collect(),
    });
}

impl<'a> HomSearch<'a> {
    pub fn new(dom: &'a Graph, cod: &'a Graph) -> Self {
        HomSearch {
            dom,
            cod,
            vcand: vec![None; dom.vertex_count()],
            ecand: vec![None; dom.edge_count()],
            injective: false,
            infeasible: false,
        }
    }

    pub fn fix_vertex(mut self, v: usize, w: usize) -> Self {
        intersect(&mut self.vcand[v], vec![w]);
        self
    }

    pub fn fix_edge(mut self, e: usize, f: usize) -> Self {
        intersect(&mut self.ecand[e], vec![f]);
        self
    }

    pub fn restrict_vertex(mut self, v: usize, allowed: Vec<usize>) -> Self {
        intersect(&mut self.vcand[v], allowed);
        self
    }

    pub fn restrict_edge(mut self, e: usize, allowed: Vec<usize>) -> Self {
        intersect(&mut self.ecand[e], allowed);
        self
    }

    pub fn injective(mut self) -> Self {
        self.injective = true;
        self
    }

    /// Requires `result ∘ along = target` where `along: X -> dom`, `target: X -> cod`.
    pub fn under(mut self, along: &GraphMorphism, target: &GraphMorphism) -> Self {
        if along.dom() != target.dom() || along.cod() != self.dom || target.cod() != self.cod {
            self.infeasible = true;
            return self;
        }
        for v in 0..along.dom().vertex_count() {
            self = self.fix_vertex(along.vertex(v), target.vertex(v));
        }
        for e in 0..along.dom().edge_count() {
            self = self.fix_edge(along.edge(e), target.edge(e));
        }
        self
    }

    /// Requires `over ∘ result = target` where `over: cod -> Z`, `target: dom -> Z`.
    pub fn over(mut self, over: &GraphMorphism, target: &GraphMorphism) -> Self {
        if over.cod() != target.cod() || over.dom() != self.cod || target.dom() != self.dom {
            self.infeasible = true;
            return self;
        }
        for v in 0..self.dom.vertex_count() {
            let want = target.vertex(v);
            let allowed = (0..self.cod.vertex_count()).filter(|&w| over.vertex(w) == want).collect();
            self = self.restrict_vertex(v, allowed);
        }
        for e in 0..self.dom.edge_count() {
            let want = target.edge(e);
            let allowed = (0..self.cod.edge_count()).filter(|&f| over.edge(f) == want).collect();
            self = self.restrict_edge(e, allowed);
        }
        self
    }

    /// Restricts to bijections with matching local degree data.
    pub fn isomorphisms(mut self) -> Self {
        if self.dom.vertex_count() != self.cod.vertex_count()
            || self.dom.edge_count() != self.cod.edge_count()
        {
            self.infeasible = true;
            return self;
        }
        let ds = self.dom.degree_signature();
        let cs = self.cod.degree_signature();
        let mut a = ds.clone();
        let mut b = cs.clone();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            self.infeasible = true;
            return self;
        }
        for (v, sig) in ds.iter().enumerate() {
            let allowed = (0..cs.len()).filter(|&w| cs[w] == *sig).collect();
            self = self.restrict_vertex(v, allowed);
        }
        self.injective()
    }

    /// Visits every solution in lexicographic order until `visit` breaks.
    pub fn for_each(&self, mut visit: impl FnMut(&[usize], &[usize]) -> ControlFlow<()>) {
        if self.infeasible {
            return;
        }
        let n = self.dom.vertex_count();
        let m = self.cod.vertex_count();
        let vcand: Vec<Vec<usize>> = self
            .vcand
            .iter()
            .map(|c| c.clone().unwrap_or_else(|| (0..m).collect()))
            .collect();
        if vcand.iter().any(|c| c.is_empty()) {
            return;
        }
        // edges become checkable once their later endpoint is assigned
        let mut closing = vec![Vec::new(); n];
        for (e, &(s, t)) in self.dom.edges().iter().enumerate() {
            closing[s.max(t)].push(e);
        }
        let mut state = State {
            search: self,
            buckets: self.cod.edge_buckets(),
            vcand,
            closing,
            vmap: vec![0; n],
            emap: vec![0; self.dom.edge_count()],
            vused: vec![false; m],
            eused: vec![false; self.cod.edge_count()],
        };
        let _ = state.vertices(0, &mut visit);
    }

    pub fn first(&self) -> Option<GraphMorphism> {
        let mut found = None;
        self.for_each(|v, e| {
            found = Some(self.build(v, e));
            ControlFlow::Break(())
        });
        found
    }

    pub fn exists(&self) -> bool {
        let mut found = false;
        self.for_each(|_, _| {
            found = true;
            ControlFlow::Break(())
        });
        found
    }

    /// All solutions; refuses once more than `max` are found.
    pub fn collect(&self, max: usize) -> Result<Vec<GraphMorphism>> {
        let mut out = Vec::new();
        let mut over = false;
        self.for_each(|v, e| {
            if out.len() == max {
                over = true;
                return ControlFlow::Break(());
            }
            out.push(self.build(v, e));
            ControlFlow::Continue(())
        });
        if over {
            return Err(Error::bound(format!("hom-set {} -> {}", self.dom, self.cod), max));
        }
        Ok(out)
    }

    /// Number of solutions, stopping early at `cap`.
    pub fn count(&self, cap: usize) -> usize {
        let mut n = 0;
        self.for_each(|_, _| {
            n += 1;
            if n >= cap {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        n
    }

    fn build(&self, v: &[usize], e: &[usize]) -> GraphMorphism {
        GraphMorphism::new_unchecked(self.dom.clone(), self.cod.clone(), v.to_vec(), e.to_vec())
    }
}

struct State<'s, 'a> {
    search: &'s HomSearch<'a>,
    buckets: Vec<Vec<usize>>,
    vcand: Vec<Vec<usize>>,
    closing: Vec<Vec<usize>>,
    vmap: Vec<usize>,
    emap: Vec<usize>,
    vused: Vec<bool>,
    eused: Vec<bool>,
}

impl State<'_, '_> {
    fn bucket(&self, e: usize) -> &[usize] {
        let (s, t) = self.search.dom.edges()[e];
        &self.buckets[self.vmap[s] * self.search.cod.vertex_count() + self.vmap[t]]
    }

    fn edge_ok(&self, e: usize, f: usize) -> bool {
        if self.search.injective && self.eused[f] {
            return false;
        }
        match &self.search.ecand[e] {
            Some(allowed) => allowed.contains(&f),
            None => true,
        }
    }

    fn vertices(
        &mut self,
        i: usize,
        visit: &mut dyn FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if i == self.vmap.len() {
            return self.edges(0, visit);
        }
        for k in 0..self.vcand[i].len() {
            let w = self.vcand[i][k];
            if self.search.injective && self.vused[w] {
                continue;
            }
            self.vmap[i] = w;
            let feasible = self.closing[i]
                .iter()
                .all(|&e| self.bucket(e).iter().any(|&f| self.edge_ok(e, f)));
            if !feasible {
                continue;
            }
            self.vused[w] = true;
            let flow = self.vertices(i + 1, visit);
            self.vused[w] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn edges(
        &mut self,
        j: usize,
        visit: &mut dyn FnMut(&[usize], &[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if j == self.emap.len() {
            return visit(&self.vmap, &self.emap);
        }
        let options: Vec<usize> = self.bucket(j).iter().copied().filter(|&f| self.edge_ok(j, f)).collect();
        for f in options {
            self.emap[j] = f;
            self.eused[f] = true;
            let flow = self.edges(j + 1, visit);
            self.eused[f] = false;
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// All morphisms `a -> b` in lexicographic order.
pub fn enumerate_homs(a: &Graph, b: &Graph, limits: &Limits) -> Result<Vec<GraphMorphism>> {
    limits.check_graph(a, "domain")?;
    limits.check_graph(b, "codomain")?;
    HomSearch::new(a, b).collect(limits.max_homs)
}

pub fn find_iso(a: &Graph, b: &Graph) -> Option<GraphMorphism> {
    HomSearch::new(a, b).isomorphisms().first()
}

pub fn are_isomorphic(a: &Graph, b: &Graph) -> bool {
    find_iso(a, b).is_some()
}

/// An isomorphism `phi: x -> y` with `phi ∘ under_x = under_y` and, when
/// given, `over_y ∘ phi = over_x`.
pub fn find_iso_under_over(
    under_x: &GraphMorphism,
    under_y: &GraphMorphism,
    over: Option<(&GraphMorphism, &GraphMorphism)>,
) -> Option<GraphMorphism> {
    let mut search = HomSearch::new(under_x.cod(), under_y.cod()).isomorphisms().under(under_x, under_y);
    if let Some((over_x, over_y)) = over {
        search = search.over(over_y, over_x);
    }
    search.first()
}

/// A morphism `h` with `along ∘ h = m`, if one exists.
pub fn factor_through(m: &GraphMorphism, along: &GraphMorphism) -> Option<GraphMorphism> {
    if m.cod() != along.cod() {
        return None;
    }
    HomSearch::new(m.dom(), along.dom()).over(along, m).first()
}
