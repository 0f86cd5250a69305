mod common;

use common::{all_homs, graph_strategy, isomorphic, morphism_strategy};
use goodcolim::graphcat::{are_isomorphic, enumerate_homs, pushout, HomSearch};
use goodcolim::{Graph, GraphMorphism, Limits};
use proptest::prelude::*;

fn probes() -> Vec<Graph> {
    vec![
        Graph::discrete(1),
        Graph::discrete(2),
        Graph::new(1, vec![(0, 0)]).unwrap(),
        Graph::new(2, vec![(0, 1)]).unwrap(),
        Graph::new(2, vec![(0, 1), (1, 0), (0, 0)]).unwrap(),
        Graph::new(3, vec![(0, 1), (1, 2), (2, 2)]).unwrap(),
    ]
}

fn sorted(mut homs: Vec<GraphMorphism>) -> Vec<GraphMorphism> {
    homs.sort_by(|x, y| (x.vmap(), x.emap()).cmp(&(y.vmap(), y.emap())));
    homs
}

/// Spans `B <- A -> C` with `A` small.
fn span() -> impl Strategy<Value = (GraphMorphism, GraphMorphism)> {
    (graph_strategy(2, 2), graph_strategy(3, 2), graph_strategy(3, 2), any::<prop::sample::Index>(), any::<prop::sample::Index>())
        .prop_filter_map("no span", |(a, b, c, i, j)| {
            let f = all_homs(&a, &b);
            let g = all_homs(&a, &c);
            (!f.is_empty() && !g.is_empty()).then(|| (f[i.index(f.len())].clone(), g[j.index(g.len())].clone()))
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn enumeration_matches_brute_force(a in graph_strategy(3, 3), b in graph_strategy(3, 3)) {
        let ours = enumerate_homs(&a, &b, &Limits::default()).unwrap();
        // enumeration order is lexicographic
        prop_assert_eq!(&ours, &sorted(ours.clone()));
        prop_assert_eq!(ours, sorted(all_homs(&a, &b)));
    }

    #[test]
    fn isomorphism_test_matches_brute_force(a in graph_strategy(3, 3), b in graph_strategy(3, 3)) {
        prop_assert_eq!(are_isomorphic(&a, &b), isomorphic(&a, &b));
    }

    /// Every cocone into a small probe factors through the pushout exactly once.
    #[test]
    fn pushout_universal_property((f, g) in span()) {
        let (po, cert) = pushout(&f, &g).unwrap();
        cert.verify().unwrap();
        prop_assert_eq!(f.then(&po.left).unwrap(), g.then(&po.right).unwrap());
        for t in probes() {
            for b in all_homs(f.cod(), &t) {
                for c in all_homs(g.cod(), &t) {
                    if f.then(&b).unwrap() != g.then(&c).unwrap() {
                        continue;
                    }
                    let through: Vec<_> = all_homs(&po.apex, &t)
                        .into_iter()
                        .filter(|m| po.left.then(m).unwrap() == b && po.right.then(m).unwrap() == c)
                        .collect();
                    prop_assert_eq!(through.len(), 1);
                    prop_assert_eq!(&po.mediate(&t, &b, &c).unwrap(), &through[0]);
                }
            }
        }
    }

    #[test]
    fn composition_is_associative_and_unital(f in morphism_strategy(3, 2), ix in any::<prop::sample::Index>()) {
        let homs = all_homs(f.cod(), f.cod());
        let g = homs[ix.index(homs.len())].clone();
        prop_assert_eq!(GraphMorphism::identity(f.dom()).then(&f).unwrap(), f.clone());
        prop_assert_eq!(f.then(&GraphMorphism::identity(f.cod())).unwrap(), f.clone());
        prop_assert_eq!(f.then(&g).unwrap().then(&g).unwrap(), f.then(&g.then(&g).unwrap()).unwrap());
    }

    #[test]
    fn under_and_over_constraints_filter_exactly(f in morphism_strategy(2, 2), g in morphism_strategy(2, 2)) {
        // maps h: cod f -> cod f with f;h == f
        let homs = all_homs(f.cod(), f.cod());
        let expect: Vec<_> = homs.iter().filter(|h| f.then(h).unwrap() == f).cloned().collect();
        let got = HomSearch::new(f.cod(), f.cod()).under(&f, &f).collect(usize::MAX).unwrap();
        prop_assert_eq!(sorted(got), sorted(expect));
        // maps h: dom g -> dom g with h;g == g
        let homs = all_homs(g.dom(), g.dom());
        let expect: Vec<_> = homs.iter().filter(|h| h.then(&g).unwrap() == g).cloned().collect();
        let got = HomSearch::new(g.dom(), g.dom()).over(&g, &g).collect(usize::MAX).unwrap();
        prop_assert_eq!(sorted(got), sorted(expect));
    }

    #[test]
    fn json_round_trip(f in morphism_strategy(3, 3)) {
        let text = serde_json::to_string(&f).unwrap();
        let back: GraphMorphism = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn pushout_of_two_vertices_into_an_edge_and_a_loop() {
    let v2 = Graph::discrete(2);
    let e1 = Graph::new(2, vec![(0, 1)]).unwrap();
    let v1 = Graph::discrete(1);
    let f = GraphMorphism::new(v2.clone(), e1, vec![0, 1], vec![]).unwrap();
    let g = GraphMorphism::new(v2, v1, vec![0, 0], vec![]).unwrap();
    let (po, _) = pushout(&f, &g).unwrap();
    assert!(are_isomorphic(&po.apex, &Graph::new(1, vec![(0, 0)]).unwrap()));
}

#[test]
fn non_commuting_edge_is_rejected_on_parse() {
    let text = r#"{"dom": {"vertices": ["v0", "v1"], "edges": [{"id": "e0", "src": "v0", "tgt": "v1"}]},
                   "cod": {"vertices": ["v0", "v1"], "edges": [{"id": "e0", "src": "v0", "tgt": "v1"}]},
                   "vmap": {"v0": "v1", "v1": "v0"}, "emap": {"e0": "e0"}}"#;
    assert!(serde_json::from_str::<GraphMorphism>(text).is_err());
}
