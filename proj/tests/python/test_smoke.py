import math

import pytest

ymflow = pytest.importorskip("ymflow")


def test_slope_and_roots():
    assert ymflow.slope(2, 3) == (3, 2)
    assert ymflow.slope(4, -2) == (-1, 2)

    rd = ymflow.roots_type_a(2)
    assert rd["rank"] == 1
    assert rd["dual_basis"][0] == [(1, 2), (-1, 2)]

    rd3 = ymflow.roots_type_a(3)
    assert len(rd3["roots"]) == 6
    assert len(rd3["simple_roots"]) == 2


def test_hn_and_dominant_weight():
    hn = ymflow.hn_split([3, 1, 1, -2])
    assert hn["hn_blocks"] == [(1, 3), (2, 2), (1, -2)]
    assert hn["polygon_vertices"] == [(0, 0), (1, 3), (3, 5), (4, 3)]
    assert hn["classification"] == "unstable"

    dw = ymflow.dominant_weight([(1, 1), (1, -1)])
    assert dw["norm"] == pytest.approx(2.0 * math.pi * math.sqrt(2.0), rel=1e-12)
    assert dw["lambdas"][0] == pytest.approx(-1.0 / math.sqrt(2.0))
    assert dw["norm_sq_exact"] == (2, 1)

    semi = ymflow.hn_split([0, 0])
    assert semi["hn_blocks"] == [(2, 0)]
    assert semi["dominant_norm"] is None


def test_split_connection_and_degrees():
    a = ymflow.Connection.split_standard(8, [1, -1])
    assert a.N == 8 and a.n == 2
    assert a.energy() == pytest.approx(4.0 * math.pi**2, rel=1e-12)
    assert a.degree(0) == 1
    assert a.degree(1) == -1
    assert a.degree() == 0


def test_snapshot_roundtrip(tmp_path):
    a = ymflow.Connection.split_standard(8, [2, 0]).random_gauge_image(7, 0.2)
    p = str(tmp_path / "conn.ymf")
    a.save(p)
    b = ymflow.Connection.load(p)
    assert b.N == a.N and b.degrees == [2, 0]
    assert b.energy() == pytest.approx(a.energy(), rel=0, abs=0)


def test_flow_semistable():
    flat = ymflow.Connection.flat(8, "SU", 2)
    a0 = flat.random_gauge_image(3, 0.3, "diagonal", 3e-4)
    summary, final = ymflow.run_flow(a0, {"grad_tol": 1e-5, "max_steps": 60000})
    assert summary["converged"]
    assert summary["final_energy"] < 1e-8
    energies = [rec[2] for rec in summary["records"]]
    assert all(e2 <= e1 + 1e-12 for e1, e2 in zip(energies, energies[1:]))


def test_weight_and_kempf_ness():
    a = ymflow.Connection.split_standard(8, [1, -1])
    w = ymflow.weight(a, [-1.0, 1.0])
    assert w["finite"]
    assert w["value"] == pytest.approx(-4.0 * math.pi, rel=1e-9)

    kn = ymflow.kempf_ness(a, [-0.5, 0.5], quad_n=64)
    assert kn["min_second_difference"] >= -1e-8


def test_classify_unstable():
    a0 = ymflow.Connection.split_standard(12, [1, -1]).random_gauge_image(
        5, 0.2, "parabolic", 0.005
    )
    cls = ymflow.classify(a0, {"grad_tol": 0.1, "max_steps": 100000})
    assert cls["label"] == "unstable"
    assert cls["final_energy"] == pytest.approx(4.0 * math.pi**2, rel=0.05)
