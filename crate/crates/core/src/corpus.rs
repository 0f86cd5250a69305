//! Named graphs, the hand-built factorization corpus and seeded random
//! instance generators used by the property suite.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::diagrams::{Diagram, SmoothDiagram};
use crate::error::Result;
use crate::graphcat::{are_isomorphic, pushout, Graph, GraphMorphism, HomSearch, Limits};
use crate::posets::FinitePoset;
use crate::soa::{GeneratorSet, Staging};

pub mod graphs {
    use crate::graphcat::Graph;

    fn build(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(n, edges.to_vec()).expect("valid graph")
    }

    /// `n` isolated vertices.
    pub fn v(n: usize) -> Graph {
        Graph::discrete(n)
    }

    /// One edge `0 -> 1`.
    pub fn e1() -> Graph {
        build(2, &[(0, 1)])
    }

    /// One vertex with a loop.
    pub fn loop1() -> Graph {
        build(1, &[(0, 0)])
    }

    /// Path `0 -> 1 -> 2`.
    pub fn p2() -> Graph {
        build(3, &[(0, 1), (1, 2)])
    }

    /// Two-cycle `0 -> 1 -> 0`.
    pub fn c2() -> Graph {
        build(2, &[(0, 1), (1, 0)])
    }

    /// Two parallel edges `0 -> 1`.
    pub fn parallel() -> Graph {
        build(2, &[(0, 1), (0, 1)])
    }

    /// One vertex with two loops.
    pub fn two_loops() -> Graph {
        build(1, &[(0, 0), (0, 0)])
    }

    /// `E1` plus an isolated vertex `2`.
    pub fn e1_plus_v() -> Graph {
        build(3, &[(0, 1)])
    }
}

use graphs::{c2, e1, e1_plus_v, loop1, p2, parallel, two_loops, v};

pub fn x_std() -> GeneratorSet {
    GeneratorSet::standard()
}

fn hom(dom: Graph, cod: Graph, vmap: Vec<usize>, emap: Vec<usize>) -> GraphMorphism {
    GraphMorphism::new(dom, cod, vmap, emap).expect("valid morphism")
}

/// The 25 hand-built factorization instances, by id.
pub fn factorization_instances() -> Vec<(String, GraphMorphism)> {
    let id = |g: Graph| GraphMorphism::identity(&g);
    let init = |g: Graph| GraphMorphism::initial(&g);
    let list = vec![
        ("empty_to_e1", init(e1())),
        ("v1_to_loop", hom(v(1), loop1(), vec![0], vec![])),
        ("v2_to_v1", hom(v(2), v(1), vec![0, 0], vec![])),
        ("id_empty", id(Graph::empty())),
        ("id_v1", id(v(1))),
        ("id_e1", id(e1())),
        ("id_loop", id(loop1())),
        ("id_p2", id(p2())),
        ("empty_to_v1", init(v(1))),
        ("empty_to_v2", init(v(2))),
        ("empty_to_loop", init(loop1())),
        ("empty_to_c2", init(c2())),
        ("v1_to_v2", hom(v(1), v(2), vec![0], vec![])),
        ("v2_to_e1", hom(v(2), e1(), vec![0, 1], vec![])),
        ("v1_to_e1", hom(v(1), e1(), vec![1], vec![])),
        ("v1_to_p2", hom(v(1), p2(), vec![1], vec![])),
        ("e1_to_p2", hom(e1(), p2(), vec![0, 1], vec![0])),
        ("v2_to_c2", hom(v(2), c2(), vec![0, 1], vec![])),
        ("e1_to_parallel", hom(e1(), parallel(), vec![0, 1], vec![0])),
        ("loop_to_two_loops", hom(loop1(), two_loops(), vec![0], vec![1])),
        ("e1_to_loop", hom(e1(), loop1(), vec![0, 0], vec![0])),
        ("v3_to_v1", hom(v(3), v(1), vec![0, 0, 0], vec![])),
        ("parallel_to_e1", hom(parallel(), e1(), vec![0, 1], vec![0, 0])),
        ("e1_plus_v_to_e1", hom(e1_plus_v(), e1(), vec![0, 1, 0], vec![0])),
        ("c2_to_loop", hom(c2(), loop1(), vec![0, 0], vec![0, 0])),
    ];
    list.into_iter().map(|(k, f)| (k.to_string(), f)).collect()
}

/// All graphs with at most `max_vertices` vertices and `max_edges` edges, one
/// per isomorphism class, ordered by size.
pub fn small_graphs(max_vertices: usize, max_edges: usize) -> Vec<Graph> {
    let mut out: Vec<Graph> = Vec::new();
    for n in 0..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|s| (0..n).map(move |t| (s, t))).collect();
        for m in 0..=max_edges {
            // multisets of m pairs, as non-decreasing index sequences
            let mut idx = vec![0usize; m];
            if m > 0 && pairs.is_empty() {
                continue;
            }
            loop {
                let g = Graph::new(n, idx.iter().map(|&i| pairs[i]).collect()).expect("valid graph");
                if !out.iter().any(|h| h.vertex_count() == n && h.edge_count() == m && are_isomorphic(h, &g)) {
                    out.push(g);
                }
                let Some(k) = (0..m).rev().find(|&k| idx[k] + 1 < pairs.len()) else { break };
                idx[k] += 1;
                for j in k + 1..m {
                    idx[j] = idx[k];
                }
            }
        }
    }
    out
}

/// Every morphism between graphs of [`small_graphs`].
pub fn small_morphisms(max_vertices: usize, max_edges: usize, limits: &Limits) -> Result<Vec<GraphMorphism>> {
    let gs = small_graphs(max_vertices, max_edges);
    let mut out = Vec::new();
    for a in &gs {
        for b in &gs {
            out.extend(crate::graphcat::enumerate_homs(a, b, limits)?);
        }
    }
    Ok(out)
}

/// A random graph on `n` vertices with at most `max_edges` edges.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, max_edges: usize) -> Graph {
    let m = if n == 0 { 0 } else { rng.gen_range(0..=max_edges) };
    let edges = (0..m).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
    Graph::new(n, edges).expect("valid graph")
}

/// Shape parameters for [`random_good_diagram`].
#[derive(Clone, Copy, Debug)]
pub struct DiagramParams {
    pub max_elements: usize,
    /// Largest number of non-invertible links.
    pub max_cells: usize,
    /// No vertex cell is attached to an object with this many vertices.
    pub vertex_cap: usize,
}

impl Default for DiagramParams {
    fn default() -> Self {
        DiagramParams { max_elements: 8, max_cells: 5, vertex_cap: 6 }
    }
}

fn incomparable_set(shape: &FinitePoset, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = shape.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            if !shape.leq(x, y) && !shape.leq(y, x) {
                pairs.push((x, y));
            }
        }
    }
    let &(x, y) = pairs.choose(rng)?;
    let mut set = vec![x, y];
    let third: Vec<usize> = (0..n).filter(|&z| set.iter().all(|&s| !shape.leq(s, z) && !shape.leq(z, s))).collect();
    if let (Some(&z), true) = (third.choose(rng), rng.gen_bool(0.25)) {
        set.push(z);
    }
    set.sort_unstable();
    Some(set)
}

/// A random smooth diagram on a good poset with least object `bottom`. Links
/// at isolated elements are pushouts of generators of `X_std` or identities;
/// limit elements carry the colimit of their strict down-set.
pub fn random_good_diagram(rng: &mut ChaCha8Rng, bottom: Graph, params: DiagramParams) -> SmoothDiagram {
    let gens = x_std();
    let target = rng.gen_range(1..=params.max_elements.max(1));
    let mut d = Diagram::constant(FinitePoset::chain(1), &bottom);
    let mut cells = 0;
    while d.len() < target {
        let id = format!("e{}", d.len());
        if rng.gen_bool(0.3) {
            if let Some(set) = incomparable_set(d.shape(), rng) {
                let below: Vec<usize> =
                    (0..d.len()).filter(|&z| set.iter().any(|&s| d.shape().leq(z, s))).collect();
                let colim = d.colimit_over(&below).expect("finite colimit");
                let incoming = set.iter().map(|&s| colim.leg(s).clone()).collect();
                d = d.extend(id, &set, colim.apex().clone(), incoming).expect("valid extension").0;
                continue;
            }
        }
        let p = rng.gen_range(0..d.len());
        let obj = d.object(p).clone();
        let n = obj.vertex_count();
        let choice = if cells >= params.max_cells || rng.gen_bool(0.15) {
            None
        } else if n == 0 || (n < params.vertex_cap && rng.gen_bool(0.5)) {
            Some((0, GraphMorphism::initial(&obj)))
        } else {
            let a = GraphMorphism::new(gens.members()[1].dom().clone(), obj.clone(), vec![rng.gen_range(0..n), rng.gen_range(0..n)], vec![])
                .expect("valid attaching map");
            Some((1, a))
        };
        let (object, link) = match choice {
            None => (obj.clone(), GraphMorphism::identity(&obj)),
            Some((g, a)) => {
                cells += 1;
                let (po, _) = pushout(&a, &gens.members()[g]).expect("same domain");
                (po.apex, po.left)
            }
        };
        d = d.extend(id, &[p], object, vec![link]).expect("valid extension").0;
    }
    SmoothDiagram::new(d).expect("random diagrams are smooth")
}

/// A small random bottom object.
pub fn random_bottom(rng: &mut ChaCha8Rng) -> Graph {
    [Graph::empty(), v(1), v(2), e1()].choose(rng).expect("nonempty").clone()
}

/// The induced subgraph on vertices `0..k` and its inclusion.
fn prefix_inclusion(g: &Graph, k: usize) -> GraphMorphism {
    let kept: Vec<usize> = (0..g.edge_count()).filter(|&e| g.src(e) < k && g.tgt(e) < k).collect();
    let sub = Graph::new(k, kept.iter().map(|&e| g.edges()[e]).collect()).expect("valid subgraph");
    GraphMorphism::new(sub, g.clone(), (0..k).collect(), kept).expect("valid inclusion")
}

#[derive(Clone, Debug)]
pub struct PushdownInstance {
    pub id: String,
    pub diagram: SmoothDiagram,
    pub staging: Staging,
}

/// A diagram over a random `D⊥` with 2 to 6 vertices, at most 3 cells, and a
/// chain of induced subgraphs of `D⊥` as staging.
pub fn random_pushdown_instance(rng: &mut ChaCha8Rng, id: String) -> PushdownInstance {
    let n = rng.gen_range(2..=6);
    let bottom = random_graph(rng, n, 2);
    let mut cuts: Vec<usize> = (1..n).filter(|_| rng.gen_bool(0.4)).collect();
    cuts.push(n);
    let incl: Vec<GraphMorphism> = cuts.iter().map(|&k| prefix_inclusion(&bottom, k)).collect();
    let steps: Vec<GraphMorphism> = incl
        .windows(2)
        .map(|w| crate::graphcat::factor_through(&w[0], &w[1]).expect("nested prefixes"))
        .collect();
    let staging = if steps.is_empty() {
        Staging::trivial(&bottom)
    } else {
        Staging::chain(&steps).expect("chain of inclusions")
    };
    let params = DiagramParams { max_elements: 5, max_cells: 3, vertex_cap: 8 };
    let diagram = random_good_diagram(rng, bottom, params);
    PushdownInstance { id, diagram, staging }
}

#[derive(Clone, Debug)]
pub struct RetractInstance {
    pub id: String,
    pub diagram: SmoothDiagram,
    pub idempotent: GraphMorphism,
}

/// A random diagram with a random idempotent on its colimit under the bottom
/// object. Diagrams whose colimit carries only the identity are redrawn most
/// of the time.
pub fn random_retract_instance(rng: &mut ChaCha8Rng, id: String, limits: &Limits) -> Result<RetractInstance> {
    let params = DiagramParams { max_elements: 5, max_cells: 3, vertex_cap: 5 };
    loop {
        let bottom = [Graph::empty(), v(1), e1()].choose(rng).expect("nonempty").clone();
        let diagram = random_good_diagram(rng, bottom, params);
        let colim = diagram.colimit()?;
        let a = colim.leg(diagram.bottom());
        let proper: Vec<GraphMorphism> = HomSearch::new(colim.apex(), colim.apex())
            .under(a, a)
            .collect(limits.max_homs)?
            .into_iter()
            .filter(|f| f.is_idempotent() && !f.is_identity())
            .collect();
        let idempotent = match proper.choose(rng) {
            Some(f) if rng.gen_bool(0.85) => f.clone(),
            _ if rng.gen_bool(0.2) => GraphMorphism::identity(colim.apex()),
            _ => continue,
        };
        return Ok(RetractInstance { id, diagram, idempotent });
    }
}

/// Morphisms between graphs with at most `max_vertices` vertices and
/// `max_edges` edges that have the right lifting property against `X_std`.
pub fn right_maps(max_vertices: usize, max_edges: usize, limits: &Limits) -> Result<Vec<GraphMorphism>> {
    let gens = x_std();
    let mut out = Vec::new();
    for p in small_morphisms(max_vertices, max_edges, limits)? {
        if crate::soa::rlp_check(&p, &gens, limits)?.holds {
            out.push(p);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::posets::is_good;
    use rand::SeedableRng;

    #[test]
    fn small_graph_counts() {
        // one vertex with 0, 1 or 2 loops
        let one: Vec<Graph> = small_graphs(1, 2).into_iter().filter(|g| g.vertex_count() == 1).collect();
        assert_eq!(one.len(), 3);
        // two vertices, at most one edge: no edge, a loop, an edge
        let two = small_graphs(2, 1).into_iter().filter(|g| g.vertex_count() == 2).count();
        assert_eq!(two, 3);
    }

    #[test]
    fn corpus_has_twenty_five_distinct_instances() {
        let inst = factorization_instances();
        assert_eq!(inst.len(), 25);
        let mut ids: Vec<&String> = inst.iter().map(|(k, _)| k).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), 25);
    }

    #[test]
    fn random_diagrams_are_good_and_reproducible() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let bottom = random_bottom(&mut a);
            let d = random_good_diagram(&mut a, bottom, DiagramParams::default());
            assert!(is_good(d.shape()).good);
            assert!(d.len() <= 8);
            let bottom = random_bottom(&mut b);
            assert_eq!(d, random_good_diagram(&mut b, bottom, DiagramParams::default()));
        }
    }

    #[test]
    fn staging_of_pushdown_instances_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 0..10 {
            let inst = random_pushdown_instance(&mut rng, format!("p{k}"));
            inst.staging.check(inst.diagram.object(inst.diagram.bottom())).unwrap();
        }
    }
}
