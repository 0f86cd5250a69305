//! Brute-force oracles shared by the integration tests. They use nothing but
//! the raw vertex and edge lists.
#![allow(dead_code)]

use goodcolim::{Graph, GraphMorphism};
use proptest::prelude::*;

/// Every morphism `a -> b`, by exhaustive product over vertex and edge images.
pub fn all_homs(a: &Graph, b: &Graph) -> Vec<GraphMorphism> {
    let mut out = Vec::new();
    let n = a.vertex_count();
    let mut vmap = vec![0; n];
    loop {
        if n == 0 || b.vertex_count() > 0 {
            edge_choices(a, b, &vmap, &mut out);
        }
        let mut i = 0;
        loop {
            if i == n || b.vertex_count() == 0 {
                return out;
            }
            vmap[i] += 1;
            if vmap[i] < b.vertex_count() {
                break;
            }
            vmap[i] = 0;
            i += 1;
        }
    }
}

fn edge_choices(a: &Graph, b: &Graph, vmap: &[usize], out: &mut Vec<GraphMorphism>) {
    let options: Vec<Vec<usize>> = a
        .edges()
        .iter()
        .map(|&(s, t)| (0..b.edge_count()).filter(|&f| b.edges()[f] == (vmap[s], vmap[t])).collect())
        .collect();
    let mut pick = vec![0; options.len()];
    if options.iter().any(Vec::is_empty) {
        return;
    }
    loop {
        let emap = pick.iter().zip(&options).map(|(&k, o)| o[k]).collect();
        out.push(GraphMorphism::new(a.clone(), b.clone(), vmap.to_vec(), emap).unwrap());
        let mut i = 0;
        loop {
            if i == pick.len() {
                return;
            }
            pick[i] += 1;
            if pick[i] < options[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

pub fn is_injective(f: &GraphMorphism) -> bool {
    let distinct = |xs: &[usize]| {
        let mut v = xs.to_vec();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    };
    distinct(f.vmap()) && distinct(f.emap())
}

pub fn is_bijective(f: &GraphMorphism) -> bool {
    is_injective(f) && f.dom().vertex_count() == f.cod().vertex_count() && f.dom().edge_count() == f.cod().edge_count()
}

pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    all_homs(a, b).iter().any(is_bijective)
}

/// Right lifting against `{∅ -> V1, V2 -> E1}`: surjective on vertices, and
/// every edge `p(c) -> p(c')` of the codomain lifts to an edge `c -> c'`.
pub fn has_std_rlp(p: &GraphMorphism) -> bool {
    let (c, d) = (p.dom(), p.cod());
    let onto = (0..d.vertex_count()).all(|w| p.vmap().contains(&w));
    let lifts = (0..c.vertex_count()).all(|x| {
        (0..c.vertex_count()).all(|y| {
            (0..d.edge_count()).filter(|&e| d.edges()[e] == (p.vmap()[x], p.vmap()[y])).all(|e| {
                (0..c.edge_count()).any(|k| c.edges()[k] == (x, y) && p.emap()[k] == e)
            })
        })
    });
    onto && lifts
}

pub fn graph_strategy(max_v: usize, max_e: usize) -> impl Strategy<Value = Graph> {
    (0..=max_v).prop_flat_map(move |n| {
        let edges = if n == 0 { Just(Vec::new()).boxed() } else { proptest::collection::vec((0..n, 0..n), 0..=max_e).boxed() };
        edges.prop_map(move |es| Graph::new(n, es).unwrap())
    })
}

/// A morphism out of a random graph into a random graph, when one exists.
pub fn morphism_strategy(max_v: usize, max_e: usize) -> impl Strategy<Value = GraphMorphism> {
    (graph_strategy(max_v, max_e), graph_strategy(max_v, max_e), any::<prop::sample::Index>()).prop_filter_map(
        "empty hom-set",
        |(a, b, ix)| {
            let homs = all_homs(&a, &b);
            (!homs.is_empty()).then(|| homs[ix.index(homs.len())].clone())
        },
    )
}
