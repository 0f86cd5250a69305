use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::graph::{Graph, GraphJson};
use crate::error::{Error, Result};

/// A graph morphism `dom -> cod`: vertex and edge maps commuting with src/tgt.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MorphismJson", into = "MorphismJson")]
pub struct GraphMorphism {
    dom: Graph,
    cod: Graph,
    vmap: Vec<usize>,
    emap: Vec<usize>,
}

/// Mono/epi/iso flags of a morphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphismKind {
    pub is_mono: bool,
    pub is_epi: bool,
    pub is_iso: bool,
}

impl GraphMorphism {
    pub fn new(dom: Graph, cod: Graph, vmap: Vec<usize>, emap: Vec<usize>) -> Result<Self> {
        if vmap.len() != dom.vertex_count() || emap.len() != dom.edge_count() {
            return Err(Error::InvalidMorphism("vertex or edge map is not total".into()));
        }
        if let Some(v) = vmap.iter().position(|&w| w >= cod.vertex_count()) {
            return Err(Error::InvalidMorphism(format!("vertex v{v} maps outside the codomain")));
        }
        for (e, &fe) in emap.iter().enumerate() {
            if fe >= cod.edge_count() {
                return Err(Error::InvalidMorphism(format!("edge e{e} maps outside the codomain")));
            }
            let (s, t) = dom.edges()[e];
            let (fs, ft) = cod.edges()[fe];
            if vmap[s] != fs || vmap[t] != ft {
                return Err(Error::InvalidMorphism(format!(
                    "edge e{e} does not commute with src/tgt"
                )));
            }
        }
        Ok(GraphMorphism { dom, cod, vmap, emap })
    }

    pub(crate) fn new_unchecked(dom: Graph, cod: Graph, vmap: Vec<usize>, emap: Vec<usize>) -> Self {
        debug_assert!(GraphMorphism::new(dom.clone(), cod.clone(), vmap.clone(), emap.clone()).is_ok());
        GraphMorphism { dom, cod, vmap, emap }
    }

    pub fn identity(g: &Graph) -> Self {
        GraphMorphism {
            dom: g.clone(),
            cod: g.clone(),
            vmap: (0..g.vertex_count()).collect(),
            emap: (0..g.edge_count()).collect(),
        }
    }

    /// The unique morphism out of the empty graph.
    pub fn initial(cod: &Graph) -> Self {
        GraphMorphism { dom: Graph::empty(), cod: cod.clone(), vmap: vec![], emap: vec![] }
    }

    pub fn dom(&self) -> &Graph {
        &self.dom
    }

    pub fn cod(&self) -> &Graph {
        &self.cod
    }

    pub fn vmap(&self) -> &[usize] {
        &self.vmap
    }

    pub fn emap(&self) -> &[usize] {
        &self.emap
    }

    pub fn vertex(&self, v: usize) -> usize {
        self.vmap[v]
    }

    pub fn edge(&self, e: usize) -> usize {
        self.emap[e]
    }

    /// Diagrammatic composite: `self` followed by `next`, i.e. `next ∘ self`.
    pub fn then(&self, next: &GraphMorphism) -> Result<GraphMorphism> {
        if self.cod != next.dom {
            return Err(Error::DomainMismatch(format!(
                "cannot compose: codomain {} differs from domain {}",
                self.cod, next.dom
            )));
        }
        Ok(GraphMorphism {
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            vmap: self.vmap.iter().map(|&v| next.vmap[v]).collect(),
            emap: self.emap.iter().map(|&e| next.emap[e]).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod
            && self.vmap.iter().enumerate().all(|(i, &v)| i == v)
            && self.emap.iter().enumerate().all(|(i, &e)| i == e)
    }

    pub fn is_idempotent(&self) -> bool {
        // every value is a fixed point
        self.dom == self.cod
            && self.vmap.iter().all(|&v| self.vmap[v] == v)
            && self.emap.iter().all(|&e| self.emap[e] == e)
    }

    pub fn analyze(&self) -> MorphismKind {
        let injective = |map: &[usize], n: usize| {
            let mut seen = vec![false; n];
            map.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
        };
        let surjective = |map: &[usize], n: usize| {
            let mut seen = vec![false; n];
            map.iter().for_each(|&x| seen[x] = true);
            seen.into_iter().all(|b| b)
        };
        let is_mono = injective(&self.vmap, self.cod.vertex_count())
            && injective(&self.emap, self.cod.edge_count());
        let is_epi = surjective(&self.vmap, self.cod.vertex_count())
            && surjective(&self.emap, self.cod.edge_count());
        MorphismKind { is_mono, is_epi, is_iso: is_mono && is_epi }
    }

    pub fn is_iso(&self) -> bool {
        self.analyze().is_iso
    }

    pub fn inverse(&self) -> Result<GraphMorphism> {
        if !self.is_iso() {
            return Err(Error::InvalidMorphism("only isomorphisms are invertible".into()));
        }
        let mut vmap = vec![0; self.vmap.len()];
        for (i, &v) in self.vmap.iter().enumerate() {
            vmap[v] = i;
        }
        let mut emap = vec![0; self.emap.len()];
        for (i, &e) in self.emap.iter().enumerate() {
            emap[e] = i;
        }
        Ok(GraphMorphism { dom: self.cod.clone(), cod: self.dom.clone(), vmap, emap })
    }
}

impl std::fmt::Display for GraphMorphism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} -> {} v{:?} e{:?}", self.dom, self.cod, self.vmap, self.emap)
    }
}

/// Wire form: `{"dom":G,"cod":G,"vmap":{...},"emap":{...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismJson {
    pub dom: GraphJson,
    pub cod: GraphJson,
    pub vmap: IndexMap<String, String>,
    pub emap: IndexMap<String, String>,
}

impl TryFrom<MorphismJson> for GraphMorphism {
    type Error = Error;

    fn try_from(json: MorphismJson) -> Result<Self> {
        let (dom, dom_ids) = json.dom.resolve()?;
        let (cod, cod_ids) = json.cod.resolve()?;
        let mut vmap = vec![usize::MAX; dom.vertex_count()];
        for (k, v) in &json.vmap {
            let i = *dom_ids.vertices.get(k).ok_or_else(|| {
                Error::InvalidMorphism(format!("vmap key `{k}` is not a domain vertex"))
            })?;
            vmap[i] = *cod_ids.vertices.get(v).ok_or_else(|| {
                Error::InvalidMorphism(format!("vmap value `{v}` is not a codomain vertex"))
            })?;
        }
        let mut emap = vec![usize::MAX; dom.edge_count()];
        for (k, v) in &json.emap {
            let i = *dom_ids.edges.get(k).ok_or_else(|| {
                Error::InvalidMorphism(format!("emap key `{k}` is not a domain edge"))
            })?;
            emap[i] = *cod_ids.edges.get(v).ok_or_else(|| {
                Error::InvalidMorphism(format!("emap value `{v}` is not a codomain edge"))
            })?;
        }
        if vmap.contains(&usize::MAX) || emap.contains(&usize::MAX) {
            return Err(Error::InvalidMorphism("vertex or edge map is not total".into()));
        }
        GraphMorphism::new(dom, cod, vmap, emap)
    }
}

impl From<GraphMorphism> for MorphismJson {
    fn from(m: GraphMorphism) -> Self {
        MorphismJson {
            vmap: m
                .vmap
                .iter()
                .enumerate()
                .map(|(i, &v)| (Graph::vertex_name(i), Graph::vertex_name(v)))
                .collect(),
            emap: m
                .emap
                .iter()
                .enumerate()
                .map(|(i, &e)| (Graph::edge_name(i), Graph::edge_name(e)))
                .collect(),
            dom: m.dom.into(),
            cod: m.cod.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    #[test]
    fn analyze_examples() {
        let id = GraphMorphism::identity(&e1());
        assert_eq!(id.analyze(), MorphismKind { is_mono: true, is_epi: true, is_iso: true });

        let collapse = GraphMorphism::new(Graph::discrete(2), Graph::discrete(1), vec![0, 0], vec![]).unwrap();
        assert_eq!(collapse.analyze(), MorphismKind { is_mono: false, is_epi: true, is_iso: false });

        let ends = GraphMorphism::new(Graph::discrete(2), e1(), vec![0, 1], vec![]).unwrap();
        assert_eq!(ends.analyze(), MorphismKind { is_mono: true, is_epi: false, is_iso: false });
    }

    #[test]
    fn rejects_non_commuting_edges() {
        let rev = GraphMorphism::new(e1(), e1(), vec![1, 0], vec![0]);
        assert!(rev.is_err());
    }

    #[test]
    fn composition_and_inverse() {
        let swap = GraphMorphism::new(Graph::discrete(2), Graph::discrete(2), vec![1, 0], vec![]).unwrap();
        let twice = swap.then(&swap).unwrap();
        assert!(twice.is_identity());
        assert_eq!(swap.inverse().unwrap(), swap);
        assert!(!swap.is_idempotent());
        let fold = GraphMorphism::new(Graph::discrete(2), Graph::discrete(2), vec![0, 0], vec![]).unwrap();
        assert!(fold.is_idempotent());
    }

    #[test]
    fn json_round_trip_is_byte_stable() {
        let text = r#"{"dom":{"vertices":["a","b"],"edges":[]},"cod":{"vertices":["x","y"],"edges":[{"id":"f","src":"x","tgt":"y"}]},"vmap":{"b":"y","a":"x"},"emap":{}}"#;
        let m: GraphMorphism = serde_json::from_str(text).unwrap();
        assert_eq!(m.vmap(), &[0, 1]);
        let canon = serde_json::to_string(&m).unwrap();
        let again: GraphMorphism = serde_json::from_str(&canon).unwrap();
        assert_eq!(serde_json::to_string(&again).unwrap(), canon);
    }

    #[test]
    fn json_rejects_partial_maps() {
        let text = r#"{"dom":{"vertices":["a","b"],"edges":[]},"cod":{"vertices":["x"],"edges":[]},"vmap":{"a":"x"},"emap":{}}"#;
        assert!(serde_json::from_str::<GraphMorphism>(text).is_err());
    }
}
