import math
import sqlite3

import pytest

import walkrank


def small_graph():
    g = walkrank.Graph()
    for label in ("s", "a", "b"):
        g.add_node(label)
    g.add_edge("s", "a", 3.0)
    g.add_edge("a", "b", 1.0)
    g.add_edge("b", "s", 2.0)
    return g


def test_two_node_closed_form():
    g = walkrank.Graph()
    g.add_node("s")
    g.add_node("a")
    g.add_edge("s", "a", 1.0)
    exact = walkrank.exact_solve(g, "s", reset=0.3)
    assert exact["s"] == pytest.approx(10 / 17)
    assert exact["a"] == pytest.approx(7 / 17)
    est = walkrank.sample(g, "s", walks=20000, reset=0.3, rng_seed=1).rank(g)
    assert est["s"] == pytest.approx(10 / 17, abs=0.01)


def test_estimate_tracks_power_iteration():
    g = small_graph()
    ref = walkrank.power_iteration(g, "s", reset=0.3)
    est = walkrank.sample(g, "s", walks=5000, reset=0.3, rng_seed=3).rank(g)
    assert math.isclose(sum(est.values()), 1.0)
    assert max(abs(est[k] - ref[k]) for k in ref) < 0.05


def test_sampling_is_deterministic():
    g = small_graph()
    a = walkrank.sample(g, "s", walks=100, rng_seed=9)
    b = walkrank.sample(g, "s", walks=100, rng_seed=9)
    assert a.walks(g) == b.walks(g)
    assert all(w[0] == "s" for w in a.walks(g))


def test_repair_after_mutation():
    g = small_graph()
    corpus = walkrank.sample(g, "s", walks=400, rng_seed=2)
    deltas = [g.add_node("c"), g.add_edge("a", "c", 5.0)]
    assert corpus.apply(g, deltas) > 0
    assert corpus.version == g.version
    assert "c" in corpus.rank(g)
    with pytest.raises(walkrank.StateError, match="stale corpus"):
        corpus.apply(g, [g.add_edge("b", "a", 1.0)] * 2)


def test_unknown_seed_is_value_error():
    with pytest.raises(ValueError):
        walkrank.sample(small_graph(), "zz")


def test_ingest_rejects_missing_table(tmp_path):
    db = tmp_path / "empty.db"
    sqlite3.connect(db).close()
    with pytest.raises(walkrank.FormatError):
        walkrank.ingest(db, "sqlite")


def test_convergence_sweep_shape():
    cells = walkrank.convergence_sweep(nodes=8, walks=[10, 200], resets=[0.3], trials=5)
    assert [c["walks"] for c in cells] == [10, 200]
