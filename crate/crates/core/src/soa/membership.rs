use serde::{Deserialize, Serialize};

use super::generators::GeneratorSet;
use crate::error::{Error, Result};
use crate::graphcat::{compute_pushout, find_iso_under_over, GraphMorphism, HomSearch, Limits};

/// Why a morphism lies in `Po(X)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PoWitness {
    Iso,
    /// `f` is the pushout of generator `g` along `attaching: X_g -> A`, up to
    /// the isomorphism `comparison: P -> B` under `A`.
    Pushout { generator: usize, attaching: GraphMorphism, comparison: GraphMorphism },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoCertificate {
    pub morphism: GraphMorphism,
    pub witness: PoWitness,
}

impl PoCertificate {
    /// Recomputes the pushout and checks the comparison.
    pub fn verify(&self, gens: &GeneratorSet) -> Result<()> {
        let f = &self.morphism;
        match &self.witness {
            PoWitness::Iso => {
                if !f.is_iso() {
                    return Err(Error::verification("po", "morphism flagged isomorphism is not one"));
                }
            }
            PoWitness::Pushout { generator, attaching, comparison } => {
                let g = gens.get(*generator)?;
                if attaching.dom() != g.dom() || attaching.cod() != f.dom() {
                    return Err(Error::verification("po", "attaching map has the wrong type"));
                }
                let po = compute_pushout(attaching, g);
                if comparison.dom() != &po.apex || comparison.cod() != f.cod() {
                    return Err(Error::verification("po", "comparison does not start at the recomputed pushout"));
                }
                if !comparison.is_iso() {
                    return Err(Error::verification("po", "comparison is not an isomorphism"));
                }
                if po.left.then(comparison)? != *f {
                    return Err(Error::verification("po", "comparison is not under the domain"));
                }
            }
        }
        Ok(())
    }
}

/// Searches for a witness that `f` is an isomorphism or a pushout of a single
/// generator. `None` means the exhaustive search found nothing.
pub fn po_membership(f: &GraphMorphism, gens: &GeneratorSet, limits: &Limits) -> Result<Option<PoCertificate>> {
    if f.is_iso() {
        return Ok(Some(PoCertificate { morphism: f.clone(), witness: PoWitness::Iso }));
    }
    limits.check_graph(f.dom(), "domain")?;
    limits.check_graph(f.cod(), "codomain")?;
    gens.check(limits)?;
    for (i, g) in gens.members().iter().enumerate() {
        for c in HomSearch::new(g.dom(), f.dom()).collect(limits.max_homs)? {
            let po = compute_pushout(&c, g);
            if po.apex.size() != f.cod().size() {
                continue;
            }
            if let Some(comparison) = find_iso_under_over(&po.left, f, None) {
                let witness = PoWitness::Pushout { generator: i, attaching: c, comparison };
                return Ok(Some(PoCertificate { morphism: f.clone(), witness }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::{coproduct, Graph};

    #[test]
    fn isomorphisms_take_the_iso_branch() {
        let swap = GraphMorphism::new(Graph::discrete(2), Graph::discrete(2), vec![1, 0], vec![]).unwrap();
        let cert = po_membership(&swap, &GeneratorSet::standard(), &Limits::default()).unwrap().unwrap();
        assert_eq!(cert.witness, PoWitness::Iso);
        cert.verify(&GeneratorSet::standard()).unwrap();
    }

    #[test]
    fn adding_a_vertex_is_a_vertex_cell() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let sum = coproduct(&[g, Graph::discrete(1)]);
        let x = GeneratorSet::standard();
        let cert = po_membership(&sum.legs[0], &x, &Limits::default()).unwrap().unwrap();
        assert!(matches!(cert.witness, PoWitness::Pushout { generator: 0, .. }));
        cert.verify(&x).unwrap();
    }

    #[test]
    fn adding_an_edge_is_an_edge_cell() {
        let f = GraphMorphism::new(
            Graph::discrete(2),
            Graph::new(2, vec![(0, 1)]).unwrap(),
            vec![0, 1],
            vec![],
        )
        .unwrap();
        let x = GeneratorSet::standard();
        let cert = po_membership(&f, &x, &Limits::default()).unwrap().unwrap();
        match &cert.witness {
            PoWitness::Pushout { generator, attaching, .. } => {
                assert_eq!(*generator, 1);
                assert_eq!(attaching.vmap(), &[0, 1]);
            }
            PoWitness::Iso => panic!("not an isomorphism"),
        }
        cert.verify(&x).unwrap();
    }

    #[test]
    fn two_new_vertices_are_not_one_pushout() {
        let f = GraphMorphism::initial(&Graph::discrete(2));
        assert_eq!(po_membership(&f, &GeneratorSet::standard(), &Limits::default()).unwrap(), None);
    }

    #[test]
    fn tampered_comparison_is_rejected() {
        let f = GraphMorphism::initial(&Graph::discrete(1));
        let x = GeneratorSet::standard();
        let mut cert = po_membership(&f, &x, &Limits::default()).unwrap().unwrap();
        cert.morphism = GraphMorphism::initial(&Graph::discrete(2));
        assert!(cert.verify(&x).is_err());
    }
}
