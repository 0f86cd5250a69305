use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphcat::{Graph, GraphMorphism, Limits};

/// A named finite set of generating morphisms `g: X_g -> Y_g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSet {
    pub name: String,
    members: Vec<GraphMorphism>,
}

impl GeneratorSet {
    pub fn new(name: impl Into<String>, members: Vec<GraphMorphism>) -> Self {
        GeneratorSet { name: name.into(), members }
    }

    /// `{x1: ∅ -> V1, x2: V2 -> E1}`, the boundary inclusions of a vertex and an edge.
    pub fn standard() -> Self {
        let v1 = Graph::discrete(1);
        let v2 = Graph::discrete(2);
        let e1 = Graph::new(2, vec![(0, 1)]).expect("valid graph");
        let x1 = GraphMorphism::initial(&v1);
        let x2 = GraphMorphism::new(v2, e1, vec![0, 1], vec![]).expect("valid morphism");
        GeneratorSet::new("X_std", vec![x1, x2])
    }

    pub fn members(&self) -> &[GraphMorphism] {
        &self.members
    }

    pub fn get(&self, i: usize) -> Result<&GraphMorphism> {
        self.members
            .get(i)
            .ok_or_else(|| Error::InvalidMorphism(format!("no generator with index {i}")))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Display label `x1`, `x2`, ... of a member.
    pub fn label(i: usize) -> String {
        format!("x{}", i + 1)
    }

    pub fn all_mono(&self) -> bool {
        self.members.iter().all(|g| g.analyze().is_mono)
    }

    pub fn check(&self, limits: &Limits) -> Result<()> {
        for g in &self.members {
            limits.check_graph(g.dom(), "generator domain")?;
            limits.check_graph(g.cod(), "generator codomain")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_set_is_mono_and_round_trips() {
        let x = GeneratorSet::standard();
        assert!(x.all_mono());
        assert_eq!(x.len(), 2);
        let text = serde_json::to_string(&x).unwrap();
        let back: GeneratorSet = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);
    }
}
