"""Smoke test for the Python bindings.

Build and install first:  maturin build --release -m crates/py/Cargo.toml && pip install target/wheels/goodcolim-*.whl
Then run:                 python3 python/smoke_test.py
"""

import json
import pathlib

import goodcolim as gc

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def check_graphs():
    e1 = gc.Graph(2, [(0, 1)])
    loop = gc.Graph(1, [(0, 0)])
    assert (e1.vertex_count, e1.edge_count) == (2, 1)
    assert gc.Graph.from_json(e1.to_json()) == e1
    assert not e1.is_isomorphic(loop)
    fold = gc.GraphMorphism(e1, loop, [0, 0], [0])
    assert fold.then(gc.GraphMorphism.identity(loop)) == fold
    try:
        gc.GraphMorphism(e1, gc.Graph(2), [0, 1], [0])
    except ValueError:
        pass
    else:
        raise AssertionError("an edge with no image was accepted")


def check_factorization():
    e1 = gc.Graph(2, [(0, 1)])
    f = gc.GraphMorphism.initial(e1)
    fat = gc.factorize(f, mode="fat", budget=5)
    assert fat.converged and fat.iterations == 3
    assert [(g.vertex_count, g.edge_count) for g in fat.stages] == [(0, 0), (2, 0), (2, 1)]
    assert fat.left_map.then(fat.right) == f
    fat.verify(max_vertices=10)
    classical = gc.factorize(f, mode="classical")
    assert classical.middle.is_isomorphic(fat.middle)
    assert gc.rlp_check(fat.right)
    assert not gc.rlp_check(f)
    gc.verify(fat.to_json())
    tired = gc.factorize(f, budget=0)
    assert not tired.converged


def check_colimits():
    v2 = gc.Graph(2)
    e1 = gc.Graph(2, [(0, 1)])
    v1 = gc.Graph(1)
    apex, left, right = gc.pushout(gc.GraphMorphism(v2, e1, [0, 1]), gc.GraphMorphism(v2, v1, [0, 0]))
    assert apex.is_isomorphic(gc.Graph(1, [(0, 0)]))
    assert left.cod == apex and right.cod == apex


def check_corpus():
    broken = (CORPUS / "broken" / "nonsmooth.json").read_text()
    assert gc.smoothness_violations(broken) == ["top"]
    diagram = (CORPUS / "diagrams" / "d00.json").read_text()
    chain = gc.linearize(diagram)
    gc.verify(chain)
    inst = json.loads((CORPUS / "retract" / "r00.json").read_text())
    idem = gc.GraphMorphism.from_json(json.dumps(inst["idempotent"]))
    image, section, retraction = gc.split_idempotent(idem)
    assert section.then(retraction) == gc.GraphMorphism.identity(image)
    cert = gc.eliminate_retract(json.dumps(inst["diagram"]), idem)
    assert cert is not None
    gc.verify(cert)
    assert gc.eliminate_retract(json.dumps(inst["diagram"]), idem, budget=0) is None


def check_suite():
    code, report = gc.suite(seed=7, count=10)
    assert code == 0, report
    sections = {s["name"]: s for s in json.loads(report)["sections"]}
    assert sections["linearize"]["instances"] == 10


if __name__ == "__main__":
    for check in (check_graphs, check_factorization, check_colimits, check_corpus, check_suite):
        check()
        print(f"ok  {check.__name__}")
