use serde::{Deserialize, Serialize};

use super::generators::GeneratorSet;
use crate::error::{Error, Result};
use crate::graphcat::{compute_pushout, copair, coproduct_map, Cocone, Graph, GraphMorphism};

/// One cell: a generator glued along its characteristic map `X_g -> A_{i-1}`.
///
/// `over` is the cell's structure map `Y_g -> B` when the complex lives over a
/// fixed `B`. Cells with equal characteristic maps but different `over` data
/// are different cells.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub generator: usize,
    pub characteristic: GraphMorphism,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over: Option<GraphMorphism>,
}

impl Cell {
    pub fn new(generator: usize, characteristic: GraphMorphism) -> Self {
        Cell { generator, characteristic, over: None }
    }

    pub fn over(generator: usize, characteristic: GraphMorphism, over: GraphMorphism) -> Self {
        Cell { generator, characteristic, over: Some(over) }
    }
}

/// `A_{i-1} -> A_i`: the pushout of the coproduct of the stage's generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub cells: Vec<Cell>,
    pub total: Graph,
    pub inclusion: GraphMorphism,
    /// `Y_g -> A_i` for each cell.
    pub cell_maps: Vec<GraphMorphism>,
    /// `A_i -> B`, present when the complex lives over `B`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over: Option<GraphMorphism>,
}

impl Stage {
    pub(crate) fn cocone(&self) -> Cocone {
        let mut legs = vec![self.inclusion.clone()];
        legs.extend(self.cell_maps.iter().cloned());
        Cocone { apex: self.total.clone(), legs }
    }
}

/// A presented finite cell complex `A = A_0 -> A_1 -> ... -> A_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellComplexPresentation {
    pub base: Graph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_over: Option<GraphMorphism>,
    pub stages: Vec<Stage>,
}

impl CellComplexPresentation {
    pub fn new(base: Graph) -> Self {
        CellComplexPresentation { base, base_over: None, stages: Vec::new() }
    }

    /// The empty presentation of `f: A -> B` as an object under `A` and over `B`.
    pub fn over(f: &GraphMorphism) -> Self {
        CellComplexPresentation { base: f.dom().clone(), base_over: Some(f.clone()), stages: Vec::new() }
    }

    pub fn total(&self) -> &Graph {
        self.stages.last().map_or(&self.base, |s| &s.total)
    }

    /// `|C| -> B`, when the complex lives over `B`.
    pub fn total_over(&self) -> Option<&GraphMorphism> {
        match self.stages.last() {
            Some(s) => s.over.as_ref(),
            None => self.base_over.as_ref(),
        }
    }

    pub fn cell_count(&self) -> usize {
        self.stages.iter().map(|s| s.cells.len()).sum()
    }

    /// The composite `A_0 -> A_n`.
    pub fn inclusion(&self) -> GraphMorphism {
        self.stages
            .iter()
            .try_fold(GraphMorphism::identity(&self.base), |acc, s| acc.then(&s.inclusion))
            .expect("stages are consecutive")
    }

    /// The characteristic map of cell `j` of stage `i`, continued to the total space.
    pub fn cell_map(&self, i: usize, j: usize) -> Result<GraphMorphism> {
        self.stages[i + 1..].iter().try_fold(self.stages[i].cell_maps[j].clone(), |acc, s| acc.then(&s.inclusion))
    }

    /// Prolongs the presentation by one stage.
    pub fn attach_cells(&self, gens: &GeneratorSet, cells: Vec<Cell>) -> Result<Self> {
        let stage = build_stage(gens, self.total(), self.total_over(), cells)?;
        let mut out = self.clone();
        out.stages.push(stage);
        Ok(out)
    }

    /// Recomputes every stage from its cells.
    pub fn verify(&self, gens: &GeneratorSet) -> Result<()> {
        if let Some(o) = &self.base_over {
            if o.dom() != &self.base {
                return Err(Error::verification("presentation", "base map does not start at the base"));
            }
        }
        let mut prev = (&self.base, self.base_over.as_ref());
        for (i, stage) in self.stages.iter().enumerate() {
            let here = format!("stage{}", i + 1);
            let fresh = build_stage(gens, prev.0, prev.1, stage.cells.clone()).map_err(|e| e.within(&here))?;
            if fresh != *stage {
                return Err(Error::verification(here, "stage differs from the recomputed pushout"));
            }
            prev = (&stage.total, stage.over.as_ref());
        }
        Ok(())
    }

    /// Replays the cells along `along: A -> A'`, giving a presentation of the
    /// pushout `A' -> A' ⊔_A |C|` and the comparison `|C| -> |C'|`.
    pub fn rebase(&self, gens: &GeneratorSet, along: &GraphMorphism) -> Result<(Self, GraphMorphism)> {
        if along.dom() != &self.base {
            return Err(Error::DomainMismatch("rebase map does not start at the base".into()));
        }
        let mut out = CellComplexPresentation::new(along.cod().clone());
        let mut phi = along.clone();
        for stage in &self.stages {
            let cells = stage
                .cells
                .iter()
                .map(|c| Ok(Cell { characteristic: c.characteristic.then(&phi)?, ..c.clone() }))
                .collect::<Result<Vec<_>>>()?;
            out = out.attach_cells(gens, cells)?;
            let new = out.stages.last().expect("just attached");
            let mut maps = vec![phi.then(&new.inclusion)?];
            maps.extend(new.cell_maps.iter().cloned());
            phi = stage.cocone().mediate(&new.total, &maps)?;
        }
        Ok((out, phi))
    }

    /// The map `|C| -> T` determined by `base_map: A -> T` and an image
    /// `Y_g -> T` for each cell (indexed by stage and position).
    pub fn map_out(
        &self,
        base_map: &GraphMorphism,
        mut cell_image: impl FnMut(usize, usize) -> Result<GraphMorphism>,
    ) -> Result<GraphMorphism> {
        let target = base_map.cod().clone();
        let mut psi = base_map.clone();
        for (i, stage) in self.stages.iter().enumerate() {
            let mut maps = vec![psi];
            for j in 0..stage.cells.len() {
                maps.push(cell_image(i, j)?);
            }
            psi = stage.cocone().mediate(&target, &maps)?;
        }
        Ok(psi)
    }
}

fn build_stage(
    gens: &GeneratorSet,
    prev: &Graph,
    prev_over: Option<&GraphMorphism>,
    cells: Vec<Cell>,
) -> Result<Stage> {
    for (j, c) in cells.iter().enumerate() {
        let g = gens.get(c.generator)?;
        if c.characteristic.dom() != g.dom() || c.characteristic.cod() != prev {
            return Err(Error::DomainMismatch(format!("cell {j}: characteristic map has the wrong type")));
        }
        if cells[..j].contains(c) {
            return Err(Error::DuplicateCell(format!(
                "cell {j} repeats generator {} along the same map",
                GeneratorSet::label(c.generator)
            )));
        }
        if let Some(o) = prev_over {
            let y = c.over.as_ref().ok_or_else(|| {
                Error::InvalidMorphism(format!("cell {j} has no map to the codomain"))
            })?;
            if y.dom() != g.cod() || y.cod() != o.cod() || c.characteristic.then(o)? != g.then(y)? {
                return Err(Error::InvalidMorphism(format!("cell {j} is not a square over the codomain")));
            }
        }
    }
    let gs: Vec<GraphMorphism> =
        cells.iter().map(|c| gens.get(c.generator).cloned()).collect::<Result<_>>()?;
    let (src, dst, sum) = coproduct_map(&gs)?;
    let chars: Vec<GraphMorphism> = cells.iter().map(|c| c.characteristic.clone()).collect();
    let attach = copair(&src, prev, &chars)?;
    let po = compute_pushout(&attach, &sum);
    let cell_maps = dst.legs.iter().map(|leg| leg.then(&po.right)).collect::<Result<Vec<_>>>()?;
    let over = match prev_over {
        None => None,
        Some(o) => {
            let overs: Vec<GraphMorphism> = cells.iter().map(|c| c.over.clone().expect("checked")).collect();
            let from_cells = copair(&dst, o.cod(), &overs)?;
            Some(po.mediate(o.cod(), o, &from_cells)?)
        }
    };
    Ok(Stage { cells, total: po.apex, inclusion: po.left, cell_maps, over })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> Graph {
        Graph::new(2, vec![(0, 1)]).unwrap()
    }

    #[test]
    fn zero_cells_give_an_identity_stage() {
        let x = GeneratorSet::standard();
        let c = CellComplexPresentation::new(e1()).attach_cells(&x, vec![]).unwrap();
        assert_eq!(c.total(), &e1());
        assert!(c.stages[0].inclusion.is_identity());
        c.verify(&x).unwrap();
    }

    #[test]
    fn two_vertex_cells_over_distinct_vertices() {
        let x = GeneratorSet::standard();
        let v1 = Graph::discrete(1);
        let v2 = Graph::discrete(2);
        let base = CellComplexPresentation::over(&GraphMorphism::initial(&v2));
        let cell = |w| {
            Cell::over(
                0,
                GraphMorphism::initial(&Graph::empty()),
                GraphMorphism::new(v1.clone(), v2.clone(), vec![w], vec![]).unwrap(),
            )
        };
        let c = base.attach_cells(&x, vec![cell(0), cell(1)]).unwrap();
        assert_eq!(c.total(), &v2);
        assert!(c.total_over().unwrap().is_iso());
        c.verify(&x).unwrap();

        let dup = base.attach_cells(&x, vec![cell(0), cell(0)]).unwrap_err();
        assert!(matches!(dup, Error::DuplicateCell(_)));
        let plain = CellComplexPresentation::new(Graph::empty());
        let bare = Cell::new(0, GraphMorphism::initial(&Graph::empty()));
        assert!(plain.attach_cells(&x, vec![bare.clone(), bare]).is_err());
    }

    #[test]
    fn an_edge_cell_on_two_vertices() {
        let x = GeneratorSet::standard();
        let v2 = Graph::discrete(2);
        let c = CellComplexPresentation::new(v2.clone())
            .attach_cells(&x, vec![Cell::new(1, GraphMorphism::identity(&v2))])
            .unwrap();
        assert_eq!(c.total(), &e1());
        assert_eq!(c.cell_count(), 1);
    }

    #[test]
    fn rebase_and_map_out() {
        let x = GeneratorSet::standard();
        let v2 = Graph::discrete(2);
        let c = CellComplexPresentation::new(v2.clone())
            .attach_cells(&x, vec![Cell::new(1, GraphMorphism::identity(&v2))])
            .unwrap();
        // glue the two endpoints: the edge becomes a loop
        let fold = GraphMorphism::new(v2.clone(), Graph::discrete(1), vec![0, 0], vec![]).unwrap();
        let (r, phi) = c.rebase(&x, &fold).unwrap();
        assert_eq!(r.total(), &Graph::new(1, vec![(0, 0)]).unwrap());
        assert_eq!(phi.cod(), r.total());
        r.verify(&x).unwrap();

        let back = c
            .map_out(&c.stages[0].inclusion.clone(), |i, j| Ok(c.stages[i].cell_maps[j].clone()))
            .unwrap();
        assert!(back.is_identity());
    }

    #[test]
    fn tampered_stage_fails_verification() {
        let x = GeneratorSet::standard();
        let v2 = Graph::discrete(2);
        let mut c = CellComplexPresentation::new(v2.clone())
            .attach_cells(&x, vec![Cell::new(1, GraphMorphism::identity(&v2))])
            .unwrap();
        c.stages[0].total = Graph::new(2, vec![(1, 0)]).unwrap();
        assert!(c.verify(&x).is_err());
    }
}
