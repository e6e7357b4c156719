import math

import numpy as np
import pytest

import swlab


def test_k3_spinor_chern():
    assert swlab.spinor_chern("K3", [0] * 22) == (0, 24)


def test_p2_divisors():
    found = swlab.divisors("P2", [1], box=5)
    assert sorted(d["D"][0] for d in found) == [-3, 0]
    assert [d["D"] for d in found if d["effective_candidate"]] == [[0]]


def test_lift_count():
    assert swlab.count_spinc_lifts("T4", [2, 2]) == 4


def test_clifford_relation():
    rng = np.random.default_rng(0)
    u = rng.normal(size=4) + 1j * rng.normal(size=4)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    gu, gv = swlab.gamma(list(u)), swlab.gamma(list(v))
    assert np.abs(gu @ gv + gv @ gu + 2 * np.dot(u, v) * np.eye(4)).max() < 1e-12


def test_identities():
    gaps = swlab.identities(N=8, seed=3, cutoff=2)
    assert max(gaps.values()) < 1e-8


def test_chern_weil_integer():
    assert swlab.chern_weil(8, 2, -1, seed=4, amplitude=0.5) == pytest.approx(1.0, abs=1e-6)


def test_solve_constant():
    out = swlab.solve(8, 3.0)
    assert out["outcome"] == "solved" and out["all_passed"]
    assert np.abs(out["u"] - 0.5 * math.log(3.0)).max() < 1e-12


def test_solve_unstable():
    out = swlab.solve(8, -1.0)
    assert out["outcome"] == "unstable" and "u" not in out


def test_bad_grid():
    with pytest.raises(ValueError):
        swlab.solve(7, 1.0)
