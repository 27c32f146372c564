"""Smoke test for the g4s Python bindings.

Build and install first:

    pip install --no-build-isolation -e crates/py

then run `python python/smoke_test.py` or `pytest python/smoke_test.py`.
"""

import json

import g4s


def test_mv_fixture():
    a = g4s.Graph.from_dense([[0.0, 2.0], [3.0, 0.0]])
    assert a.shape == (2, 2)
    assert a.edge_count == 2
    assert g4s.mv(a, [1.0, 4.0]) == [8.0, 3.0]
    for strategy in ["vc", "ec", "ec+split=1", "vc+reorder+buckets=1"]:
        assert g4s.mv(a, [1.0, 4.0], strategy=strategy) == [8.0, 3.0]


def test_matrix_market_and_bytes_round_trip():
    text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 4.0\n"
    g = g4s.Graph.from_mtx(text)
    assert g.edges() == [(0, 1, 4.0), (1, 0, 4.0)]
    assert g4s.Graph.from_bytes(g.to_bytes()) == g
    assert g4s.Graph.from_mtx(g.to_mtx()) == g


def test_mm_add_compose_rank1():
    b = g4s.Graph.from_dense([[1.0, 2.0], [0.0, 1.0]])
    c = [[1.0, 0.0], [1.0, 1.0]]
    assert g4s.mm(b, c) == [[3.0, 2.0], [1.0, 1.0]]
    assert g4s.compose(b, g4s.Graph.from_dense(c)).to_dense() == [[3.0, 2.0], [1.0, 1.0]]
    assert g4s.add(b, g4s.Graph.from_dense([[-1.0, 0.0], [0.0, 0.0]])).edge_count == 2
    zero = g4s.Graph.from_triplets(2, 2, [])
    assert g4s.rank1(zero, [1.0, 2.0], [1.0, 2.0]).to_dense() == [[1.0, 2.0], [2.0, 4.0]]


def test_complex_promotion():
    zero = g4s.Graph.from_triplets(2, 2, [])
    h = g4s.rank1(zero, [1j, 0j], [1j, 0j])
    assert h.is_complex
    assert h.edges() == [(0, 0, 1 + 0j)]
    eye = g4s.Graph.from_dense([[1.0, 0.0], [0.0, 1.0]])
    assert g4s.mv(eye, [1j, 2.0]) == [1j, 2 + 0j]


def test_distributed_matches_single_shard():
    rows = [[float((i * 7 + j * 3) % 5 == 0) * (i - j + 0.5) for j in range(16)] for i in range(16)]
    g = g4s.Graph.from_dense(rows)
    x = [float(i) - 7.5 for i in range(16)]
    base = g4s.mv(g, x)
    for shards in (1, 2, 4):
        y, metrics = g4s.dist_matvec(g, x, shards, delta=True)
        assert g4s.relative_error(y, base) <= 1e-10
        steps = json.loads(metrics)["supersteps"]
        assert all(s["batches"] <= shards * (shards - 1) for s in steps)


def test_routines():
    k = g4s.Graph.from_dense([[0.0, 2.0], [3.0, 0.0]])
    assert g4s.mantle_force(k, [1.0, 4.0], f0=[1.0, 1.0]) == [9.0, 4.0]
    t = g4s.Graph.from_dense([[0.2, 0.3, 0.5], [0.0, 1.0, 0.0], [0.5, 0.0, 0.5]])
    assert g4s.relative_error(g4s.heat_capacity(t, [3.0, 3.0, 3.0]), [3.0, 3.0, 3.0]) <= 1e-15
    b = g4s.Graph.from_dense([[1.0, 2.0], [0.0, 1.0]])
    seq = g4s.potential_energy([k, b], [1.0, 0.0])
    assert seq == g4s.potential_energy([k, b], [1.0, 0.0], composed=True) == [0.0, 3.0]


def test_verify_codec_suite():
    report = json.loads(g4s.verify("codec", seed=7))
    assert report["passed"]
    assert report["suites"][0]["metrics"]["consecutive_id_bytes_ratio"] <= 0.5


def test_errors_are_value_errors():
    a = g4s.Graph.from_dense([[1.0, 0.0], [0.0, 1.0]])
    for call in (lambda: g4s.mv(a, [1.0]), lambda: g4s.mv(a, [1.0, 2.0], strategy="gpu")):
        try:
            call()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok  {t.__name__}")
    print(f"{len(tests)} smoke tests passed")
