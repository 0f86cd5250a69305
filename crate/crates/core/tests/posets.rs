mod common;

use goodcolim::diagrams::{linearize, star_extend, Diagram};
use goodcolim::posets::{classify_all, directed_completion, initial_segments, linear_extension, strong_closure, ElementKind};
use goodcolim::suite::random_diagrams;
use goodcolim::{FinitePoset, Graph, GraphMorphism, InitialSegment, Limits, SmoothDiagram};

use common::{all_homs, isomorphic};

fn shapes() -> Vec<FinitePoset> {
    random_diagrams(5, 120, 7).into_iter().map(|(_, d)| d.shape().clone()).collect()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
}

fn is_downset(p: &FinitePoset, s: &[usize]) -> bool {
    s.iter().all(|&x| (0..p.len()).all(|y| !p.leq(y, x) || s.contains(&y)))
}

fn down_of(p: &FinitePoset, r: &[usize]) -> Vec<usize> {
    (0..p.len()).filter(|&y| r.iter().any(|&x| p.leq(y, x))).collect()
}

/// `x` bounds `R` and everything in `↓x \ ↓R` has no greatest element strictly below it.
fn strong_bound(p: &FinitePoset, x: usize, r: &[usize]) -> bool {
    let below_r = down_of(p, r);
    let limit = |y: usize| {
        let strict: Vec<usize> = (0..p.len()).filter(|&z| p.lt(z, y)).collect();
        !strict.is_empty() && !strict.iter().any(|&t| strict.iter().all(|&z| p.leq(z, t)))
    };
    r.iter().all(|&y| p.leq(y, x)) && (0..p.len()).filter(|&y| p.leq(y, x) && !below_r.contains(&y)).all(limit)
}

#[test]
fn initial_segments_are_exactly_the_nonempty_downsets() {
    for p in shapes() {
        let ours: Vec<Vec<usize>> = initial_segments(&p).iter().map(|s| s.members().to_vec()).collect();
        let theirs: Vec<Vec<usize>> = subsets(p.len()).filter(|s| !s.is_empty() && is_downset(&p, s)).collect();
        assert_eq!(ours.len(), theirs.len());
        for s in &theirs {
            assert!(ours.contains(s), "{s:?} missing");
        }
    }
}

#[test]
fn linear_extensions_respect_the_order() {
    for p in shapes() {
        let order = linear_extension(&p);
        let mut seen = order.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..p.len()).collect::<Vec<_>>());
        let pos = |x: usize| order.iter().position(|&y| y == x).unwrap();
        for x in 0..p.len() {
            for y in 0..p.len() {
                if p.lt(x, y) {
                    assert!(pos(x) < pos(y));
                }
            }
        }
    }
}

#[test]
fn strong_closure_matches_brute_force() {
    for p in shapes() {
        for q in initial_segments(&p) {
            let closure = strong_closure(&p, &q).unwrap();
            let expect: Vec<usize> = (0..p.len())
                .filter(|&x| subsets(q.len()).any(|ix| {
                    let r: Vec<usize> = ix.iter().map(|&i| q.members()[i]).collect();
                    strong_bound(&p, x, &r)
                }))
                .collect();
            assert_eq!(closure.closure.members(), &expect[..]);
            for (&x, r) in &closure.strong_bounds {
                assert!(strong_bound(&p, x, r));
            }
            // closing twice adds nothing
            let again = strong_closure(&p, &closure.closure).unwrap();
            assert_eq!(again.closure, closure.closure);
        }
    }
}

#[test]
fn directed_completion_adds_at_most_a_limit_top() {
    for p in shapes() {
        let done = directed_completion(&p).unwrap();
        let q = &done.poset;
        let top = q.greatest().expect("directed");
        for x in 0..p.len() {
            for y in 0..p.len() {
                assert_eq!(p.leq(x, y), q.leq(x, y));
            }
        }
        match done.added_top {
            None => assert_eq!(q.len(), p.len()),
            Some(t) => {
                assert_eq!(t, top);
                assert_eq!(q.len(), p.len() + 1);
                assert_eq!(classify_all(q).unwrap()[t].kind, ElementKind::Limit);
            }
        }
    }
}

#[test]
fn poset_json_round_trip() {
    for p in shapes().into_iter().take(20) {
        let back: FinitePoset = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
    }
}

/// Cocones of `d` into `t`, found by brute force over the objects.
fn cocones(d: &Diagram, t: &Graph) -> Vec<Vec<GraphMorphism>> {
    let mut out: Vec<Vec<GraphMorphism>> = vec![Vec::new()];
    for x in 0..d.len() {
        let homs = all_homs(d.object(x), t);
        out = out
            .into_iter()
            .flat_map(|prefix| homs.iter().map(move |h| {
                let mut next = prefix.clone();
                next.push(h.clone());
                next
            }))
            .filter(|c| (0..c.len()).all(|y| !d.shape().lt(y, x) || d.arrow(y, x).then(&c[x]).unwrap() == c[y]))
            .collect();
    }
    out
}

#[test]
fn colimits_have_the_universal_property() {
    let probes = [Graph::discrete(1), Graph::new(1, vec![(0, 0)]).unwrap(), Graph::new(2, vec![(0, 1), (1, 1)]).unwrap()];
    let mut checked = 0;
    for (_, d) in random_diagrams(9, 60, 4) {
        let colim = d.colimit().unwrap();
        if colim.apex().size() > 6 || d.objects().iter().any(|g| g.vertex_count() > 4) {
            continue;
        }
        for t in &probes {
            for c in cocones(&d, t) {
                let through = all_homs(colim.apex(), t)
                    .into_iter()
                    .filter(|m| (0..d.len()).all(|x| colim.leg(x).then(m).unwrap() == c[x]))
                    .count();
                assert_eq!(through, 1);
                checked += 1;
            }
        }
    }
    assert!(checked > 50, "only {checked} cocones");
}

#[test]
fn linearization_and_star_extension_keep_the_colimit() {
    let gens = goodcolim::corpus::x_std();
    for (id, d) in random_diagrams(13, 40, 7) {
        let apex = d.colimit().unwrap().apex().clone();
        let chain = linearize(&d, &gens, &Limits::default()).unwrap();
        let composite = chain.composite().unwrap();
        assert!(isomorphic(composite.cod(), &apex), "{id}");
        assert_eq!(composite.dom(), d.object(d.bottom()));
        let star = star_extend(&d).unwrap();
        assert!(isomorphic(star.diagram.colimit().unwrap().apex(), &apex), "{id}");
        let links = |s: &SmoothDiagram| {
            let mut v: Vec<_> = s.links().iter().map(|l| (l.morphism.dom().size(), l.morphism.cod().size())).collect();
            v.sort_unstable();
            v
        };
        assert_eq!(links(&star.diagram), links(&d));
    }
}

#[test]
fn limit_elements_are_the_isolated_free_extensions() {
    let p = FinitePoset::from_ids(&["bot", "a", "b", "top"], &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")]).unwrap();
    let q = InitialSegment::from_ids(&p, &["bot", "a", "b"]).unwrap();
    let c = strong_closure(&p, &q).unwrap();
    assert_eq!(c.closure.ids(&p), vec!["bot", "a", "b", "top"]);
}
