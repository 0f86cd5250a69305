use serde::{Deserialize, Serialize};

use super::cells::{Cell, CellComplexPresentation};
use super::generators::GeneratorSet;
use super::lifting::squares;
use crate::error::Result;
use crate::graphcat::{factor_through, find_iso_under_over, GraphMorphism, Limits};

/// Result of a bounded search for a cellular presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum CellularityOutcome {
    /// A presentation under `A` and over `B` whose map `|C| -> B` is an isomorphism.
    Found { presentation: CellComplexPresentation },
    /// Every reachable presentation was explored without success.
    Exhausted { explored: usize },
    /// The cell budget ran out with unexplored presentations left.
    BudgetReached { explored: usize },
}

impl CellularityOutcome {
    pub fn presentation(&self) -> Option<&CellComplexPresentation> {
        match self {
            CellularityOutcome::Found { presentation } => Some(presentation),
            _ => None,
        }
    }
}

/// Breadth-first search over one-cell extensions of `dom(f)` over `cod(f)`,
/// up to `budget` cells, identifying presentations isomorphic under `A` and
/// over `B`.
pub fn cellularity_search(
    f: &GraphMorphism,
    gens: &GeneratorSet,
    budget: usize,
    limits: &Limits,
) -> Result<CellularityOutcome> {
    let root = CellComplexPresentation::over(f);
    if f.is_iso() {
        return Ok(CellularityOutcome::Found { presentation: root });
    }
    // Sizes never shrink along pushouts of monomorphisms.
    let monotone = gens.all_mono();
    let b = f.cod();
    let too_big = |p: &CellComplexPresentation| {
        let t = p.total();
        t.vertex_count() > limits.max_vertices
            || (monotone && (t.vertex_count() > b.vertex_count() || t.edge_count() > b.edge_count()))
    };
    let mut seen: Vec<(GraphMorphism, GraphMorphism)> = vec![(root.inclusion(), f.clone())];
    let mut frontier = vec![root];
    let mut explored = 1;
    for _ in 0..budget {
        let mut next = Vec::new();
        for state in &frontier {
            let t = state.total_over().expect("presentation over the codomain");
            for sq in squares(t, gens, limits)? {
                let child = state.attach_cells(gens, vec![Cell::over(sq.generator, sq.u, sq.v)])?;
                if too_big(&child) {
                    continue;
                }
                let incl = child.inclusion();
                let over = child.total_over().expect("over").clone();
                if over.is_iso() {
                    return Ok(CellularityOutcome::Found { presentation: regroup(&child, gens)? });
                }
                let known = seen.iter().any(|(i, o)| {
                    i.cod().size() == incl.cod().size() && find_iso_under_over(&incl, i, Some((&over, o))).is_some()
                });
                if !known {
                    explored += 1;
                    seen.push((incl, over));
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return Ok(CellularityOutcome::Exhausted { explored });
        }
        frontier = next;
    }
    Ok(CellularityOutcome::BudgetReached { explored })
}

/// Merges consecutive one-cell stages whose characteristic maps already
/// factor through the start of the current group.
fn regroup(linear: &CellComplexPresentation, gens: &GeneratorSet) -> Result<CellComplexPresentation> {
    let f = linear.base_over.as_ref().expect("presentation over the codomain");
    let mut grouped = CellComplexPresentation::over(f);
    // `theta`: linear total at the group start -> grouped total
    let mut theta = GraphMorphism::identity(&linear.base);
    let mut start = 0;
    let mut pending: Vec<Cell> = Vec::new();
    let mut into_start = GraphMorphism::identity(&linear.base);
    for (k, stage) in linear.stages.iter().enumerate() {
        let cell = &stage.cells[0];
        let joined = factor_through(&cell.characteristic, &into_start).and_then(|c| {
            let moved = Cell { characteristic: c.then(&theta).ok()?, ..cell.clone() };
            (!pending.contains(&moved)).then_some(moved)
        });
        match joined {
            Some(moved) => pending.push(moved),
            None => {
                let (g, t) = flush(linear, gens, grouped, &theta, start, k, std::mem::take(&mut pending))?;
                grouped = g;
                theta = t;
                start = k;
                into_start = GraphMorphism::identity(stage.inclusion.dom());
                pending.push(Cell { characteristic: cell.characteristic.then(&theta)?, ..cell.clone() });
            }
        }
        into_start = into_start.then(&stage.inclusion)?;
    }
    let (grouped, _) = flush(linear, gens, grouped, &theta, start, linear.stages.len(), pending)?;
    if grouped.total_over().is_some_and(|o| o.is_iso()) {
        grouped.verify(gens)?;
        Ok(grouped)
    } else {
        Ok(linear.clone())
    }
}

/// Attaches `pending` (the linear stages `start..end`) as one stage and
/// returns the comparison from the linear total after `end` stages.
fn flush(
    linear: &CellComplexPresentation,
    gens: &GeneratorSet,
    grouped: CellComplexPresentation,
    theta: &GraphMorphism,
    start: usize,
    end: usize,
    pending: Vec<Cell>,
) -> Result<(CellComplexPresentation, GraphMorphism)> {
    if pending.is_empty() {
        return Ok((grouped, theta.clone()));
    }
    let grouped = grouped.attach_cells(gens, pending)?;
    let new = grouped.stages.last().expect("just attached");
    let mut psi = theta.then(&new.inclusion)?;
    for (j, stage) in linear.stages[start..end].iter().enumerate() {
        psi = stage.cocone().mediate(&new.total, &[psi, new.cell_maps[j].clone()])?;
    }
    Ok((grouped, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::Graph;

    #[test]
    fn isomorphisms_need_no_cells() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let out = cellularity_search(&GraphMorphism::identity(&g), &GeneratorSet::standard(), 3, &Limits::default())
            .unwrap();
        assert_eq!(out.presentation().unwrap().cell_count(), 0);
    }

    #[test]
    fn empty_to_edge_is_two_vertices_then_an_edge() {
        let x = GeneratorSet::standard();
        let e1 = Graph::new(2, vec![(0, 1)]).unwrap();
        let out = cellularity_search(&GraphMorphism::initial(&e1), &x, 6, &Limits::default()).unwrap();
        let p = out.presentation().unwrap();
        let shape: Vec<Vec<usize>> =
            p.stages.iter().map(|s| s.cells.iter().map(|c| c.generator).collect()).collect();
        assert_eq!(shape, vec![vec![0, 0], vec![1]]);
        assert!(p.total_over().unwrap().is_iso());
    }

    #[test]
    fn a_collapse_is_never_found() {
        let x = GeneratorSet::standard();
        let f = GraphMorphism::new(Graph::discrete(2), Graph::discrete(1), vec![0, 0], vec![]).unwrap();
        let out = cellularity_search(&f, &x, 6, &Limits::default()).unwrap();
        assert!(matches!(out, CellularityOutcome::Exhausted { .. }));
    }
}
