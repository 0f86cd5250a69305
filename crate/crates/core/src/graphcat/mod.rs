//! Finite directed multigraphs, their morphisms and finite colimits.

mod colimit;
mod graph;
mod morphism;
mod search;

pub use colimit::{
    colimit, copair, coproduct, coproduct_map, pushout, Cocone, ProbeWitness, Pushout,
    PushoutCertificate,
};
pub(crate) use colimit::compute_pushout;
pub use graph::{EdgeJson, Graph, GraphJson};
pub use morphism::{GraphMorphism, MorphismJson, MorphismKind};
pub use search::{
    are_isomorphic, enumerate_homs, factor_through, find_iso, find_iso_under_over, HomSearch, Limits,
};

use crate::diagrams::{Diagram, SegmentColimit};
use crate::error::{Error, Result};
use crate::posets::linear_extension;

/// Colimit of a poset-indexed diagram; functoriality was checked when `d` was built.
pub fn colimit_over_poset(d: &Diagram) -> Result<Cocone> {
    Ok(d.colimit()?.cocone)
}

/// Finds the first stage `x` (in linear-extension order) with
/// `m = leg(x) ∘ m_x`, returning `(x, m_x)`.
pub fn factor_through_stage(
    m: &GraphMorphism,
    d: &Diagram,
    colim: &SegmentColimit,
) -> Result<(usize, GraphMorphism)> {
    if d.shape().greatest().is_none() {
        return Err(Error::NotDirected);
    }
    if m.cod() != colim.apex() {
        return Err(Error::DomainMismatch("morphism does not land in the colimit".into()));
    }
    for x in linear_extension(d.shape()) {
        if let Some(mx) = factor_through(m, colim.leg(x)) {
            return Ok((x, mx));
        }
    }
    Err(Error::Internal("no stage of a directed diagram factors the morphism".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posets::FinitePoset;

    fn incl(dom: &Graph, cod: &Graph, vmap: Vec<usize>, emap: Vec<usize>) -> GraphMorphism {
        GraphMorphism::new(dom.clone(), cod.clone(), vmap, emap).unwrap()
    }

    fn chain() -> Diagram {
        let (v1, v2) = (Graph::discrete(1), Graph::discrete(2));
        let e1 = Graph::new(2, vec![(0, 1)]).unwrap();
        let covers = vec![
            (0, 1, incl(&v1, &v2, vec![0], vec![])),
            (1, 2, incl(&v2, &e1, vec![0, 1], vec![])),
        ];
        Diagram::new(FinitePoset::chain(3), vec![v1, v2, e1], covers).unwrap()
    }

    #[test]
    fn chain_colimit_is_last_stage() {
        let c = colimit_over_poset(&chain()).unwrap();
        assert!(are_isomorphic(&c.apex, &Graph::new(2, vec![(0, 1)]).unwrap()));
    }

    #[test]
    fn stage_search_examples() {
        let d = chain();
        let colim = d.colimit().unwrap();
        let apex = colim.apex().clone();
        let v1 = Graph::discrete(1);
        // the vertex only present from the second stage on
        let late = colim.leg(1).vertex(1);
        let m = incl(&v1, &apex, vec![late], vec![]);
        let (x, mx) = factor_through_stage(&m, &d, &colim).unwrap();
        assert_eq!(x, 1);
        assert_eq!(mx.then(colim.leg(1)).unwrap(), m);

        let (x, _) = factor_through_stage(&GraphMorphism::initial(&apex), &d, &colim).unwrap();
        assert_eq!(x, 0);

        let (x, mx) = factor_through_stage(colim.leg(2), &d, &colim).unwrap();
        assert_eq!(x, 2);
        assert!(mx.is_identity());
    }

    #[test]
    fn stage_search_needs_a_directed_shape() {
        let shape = FinitePoset::from_ids(&["bot", "x", "y"], &[("bot", "x"), ("bot", "y")]).unwrap();
        let d = Diagram::constant(shape, &Graph::discrete(1));
        let colim = d.colimit().unwrap();
        let m = GraphMorphism::initial(colim.apex());
        assert_eq!(factor_through_stage(&m, &d, &colim).unwrap_err(), Error::NotDirected);
    }
}
