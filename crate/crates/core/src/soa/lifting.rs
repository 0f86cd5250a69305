use serde::{Deserialize, Serialize};

use super::generators::GeneratorSet;
use crate::error::{Error, Result};
use crate::graphcat::{enumerate_homs, GraphMorphism, HomSearch, Limits};

/// A commuting square `p ∘ u = v ∘ g` for a generator `g: X -> Y` and `p: C -> D`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    pub generator: usize,
    pub u: GraphMorphism,
    pub v: GraphMorphism,
}

/// A square with a diagonal `d: Y -> C`, `d ∘ g = u`, `p ∘ d = v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lift {
    pub square: Square,
    pub diagonal: GraphMorphism,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RlpReport {
    pub holds: bool,
    pub squares: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Square>,
    pub diagonals: Vec<Lift>,
}

impl RlpReport {
    /// Re-checks every recorded diagonal and, when the report claims the
    /// property, that the table covers every square.
    pub fn verify(&self, p: &GraphMorphism, gens: &GeneratorSet, limits: &Limits) -> Result<()> {
        for (k, lift) in self.diagonals.iter().enumerate() {
            let g = gens.get(lift.square.generator)?;
            let d = &lift.diagonal;
            if g.then(d)? != lift.square.u || d.then(p)? != lift.square.v {
                return Err(Error::verification(format!("rlp/diagonal{k}"), "diagonal does not solve its square"));
            }
        }
        if self.holds {
            let all = squares(p, gens, limits)?;
            if all.len() != self.diagonals.len()
                || all.iter().zip(&self.diagonals).any(|(s, l)| *s != l.square)
            {
                return Err(Error::verification("rlp", "diagonal table does not cover every square"));
            }
        }
        Ok(())
    }
}

/// Every commuting square from a generator to `p`, ordered by generator, then
/// `v`, then `u` (each lexicographically).
pub fn squares(p: &GraphMorphism, gens: &GeneratorSet, limits: &Limits) -> Result<Vec<Square>> {
    limits.check_graph(p.dom(), "domain")?;
    limits.check_graph(p.cod(), "codomain")?;
    gens.check(limits)?;
    let mut out = Vec::new();
    for (i, g) in gens.members().iter().enumerate() {
        for v in enumerate_homs(g.cod(), p.cod(), limits)? {
            let gv = g.then(&v)?;
            let us = HomSearch::new(g.dom(), p.dom()).over(p, &gv).collect(limits.max_homs)?;
            for u in us {
                out.push(Square { generator: i, u, v: v.clone() });
            }
            if out.len() > limits.max_homs {
                return Err(Error::bound("commuting squares", limits.max_homs));
            }
        }
    }
    Ok(out)
}

pub(crate) fn diagonal(g: &GraphMorphism, p: &GraphMorphism, u: &GraphMorphism, v: &GraphMorphism) -> Option<GraphMorphism> {
    HomSearch::new(g.cod(), p.dom()).under(g, u).over(p, v).first()
}

/// Whether `p` has the right lifting property against every generator;
/// stops at the first square without a diagonal.
pub fn rlp_check(p: &GraphMorphism, gens: &GeneratorSet, limits: &Limits) -> Result<RlpReport> {
    let all = squares(p, gens, limits)?;
    let count = all.len();
    let mut diagonals = Vec::new();
    for square in all {
        let g = gens.get(square.generator)?;
        match diagonal(g, p, &square.u, &square.v) {
            Some(d) => diagonals.push(Lift { square, diagonal: d }),
            None => {
                return Ok(RlpReport { holds: false, squares: count, counterexample: Some(square), diagonals })
            }
        }
    }
    Ok(RlpReport { holds: true, squares: count, counterexample: None, diagonals })
}

/// The first square `(u, v)` from `i` to `p` without a diagonal, if any.
pub fn lifts_against(
    i: &GraphMorphism,
    p: &GraphMorphism,
    limits: &Limits,
) -> Result<Option<(GraphMorphism, GraphMorphism)>> {
    limits.check_graph(i.cod(), "domain")?;
    limits.check_graph(p.dom(), "codomain")?;
    for v in enumerate_homs(i.cod(), p.cod(), limits)? {
        let iv = i.then(&v)?;
        let us = HomSearch::new(i.dom(), p.dom()).over(p, &iv).collect(limits.max_homs)?;
        if let Some(u) = us.into_iter().find(|u| diagonal(i, p, u, &v).is_none()) {
            return Ok(Some((u, v)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::Graph;

    fn e1() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    #[test]
    fn identities_have_the_rlp() {
        let x = GeneratorSet::standard();
        let report = rlp_check(&GraphMorphism::identity(&e1()), &x, &Limits::default()).unwrap();
        assert!(report.holds);
        report.verify(&GraphMorphism::identity(&e1()), &x, &Limits::default()).unwrap();
    }

    #[test]
    fn edge_to_loop_fails_on_reversed_endpoints() {
        let lp = Graph::new(1, vec![(0, 0)]).unwrap();
        let p = GraphMorphism::new(e1(), lp, vec![0, 0], vec![0]).unwrap();
        let report = rlp_check(&p, &GeneratorSet::standard(), &Limits::default()).unwrap();
        assert!(!report.holds);
        let bad = report.counterexample.unwrap();
        // the first failing square asks for a loop at the source
        assert_eq!(bad.generator, 1);
        assert_eq!(bad.u.vmap(), &[0, 0]);
        let x2 = GeneratorSet::standard().members()[1].clone();
        let reversed = GraphMorphism::new(x2.dom().clone(), e1(), vec![1, 0], vec![]).unwrap();
        let v = GraphMorphism::new(x2.cod().clone(), p.cod().clone(), vec![0, 0], vec![0]).unwrap();
        assert!(diagonal(&x2, &p, &reversed, &v).is_none());
    }

    #[test]
    fn empty_domain_fails_on_the_vertex_square() {
        let p = GraphMorphism::initial(&Graph::discrete(1));
        let report = rlp_check(&p, &GeneratorSet::standard(), &Limits::default()).unwrap();
        assert!(!report.holds);
        assert_eq!(report.counterexample.unwrap().generator, 0);
    }

    #[test]
    fn llp_of_generator_against_trivial_fibration() {
        let x = GeneratorSet::standard();
        let collapse = GraphMorphism::new(Graph::discrete(2), Graph::discrete(1), vec![0, 0], vec![]).unwrap();
        assert!(rlp_check(&collapse, &x, &Limits::default()).unwrap().holds);
        for g in x.members() {
            assert_eq!(lifts_against(g, &collapse, &Limits::default()).unwrap(), None);
        }
    }
}
