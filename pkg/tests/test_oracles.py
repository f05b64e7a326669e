"""Simulated-adversary tests: validity, regret identities, weak commitment."""

import numpy as np
import pytest

from cutplane import geometry
from cutplane.geometry import Polytope
from cutplane.oracles import (
    MaxRegretOracle,
    MinCutOracle,
    WeakOracle,
    make_oracle,
    max_regret_direction,
    min_cut_direction,
    weak_response,
)
from cutplane.errors import InvalidOracle
from cutplane.rng import RngStream


def test_max_regret_points_at_hidden():
    v = max_regret_direction(np.array([1.0, 0.0]), np.zeros(2))
    assert v == pytest.approx([1.0, 0.0])


def test_max_regret_degenerate_query_falls_back():
    w = np.array([0.3, 0.3])
    v = max_regret_direction(w, w.copy())
    assert v == pytest.approx([1.0, 0.0])


def test_max_regret_regret_equals_distance():
    gen = RngStream(20, 0).generator()
    for _ in range(20):
        w = gen.uniform(-0.7, 0.7, 2)
        p = gen.uniform(-0.7, 0.7, 2)
        v = max_regret_direction(w, p)
        assert float((w - p) @ v) == pytest.approx(np.linalg.norm(w - p))


def test_min_cut_seeded_with_max_regret_direction(cube2):
    w = np.array([0.5, 0.0])
    p = np.zeros(2)
    v = min_cut_direction(cube2, w, p, RngStream(21, 0), n_candidates=1)
    assert v == pytest.approx(max_regret_direction(w, p))


def test_min_cut_prefers_shallow_cuts(cube2):
    # symmetric K about the query: the cheapest valid cut is nearly
    # orthogonal to w* - p, so its regret is much below the max-regret one
    w = np.array([0.9, 0.0])
    p = np.zeros(2)
    v = min_cut_direction(cube2, w, p, RngStream(21, 1), n_candidates=256,
                          n_samples=4096)
    assert float((w - p) @ v) >= 0.0
    assert float((w - p) @ v) < 0.25 * np.linalg.norm(w - p)


def test_min_cut_matches_direction_grid(cube2):
    # exhaustive direction grid confirms the chosen cut removes near-minimal
    # volume among valid directions
    w = np.array([0.6, 0.3])
    p = np.array([0.1, -0.2])
    v = min_cut_direction(cube2, w, p, RngStream(21, 2), n_candidates=512,
                          n_samples=8192)
    X = geometry.sample_dilated(cube2, 0.0, 20_000, RngStream(21, 3))

    def removed(u):
        return float(np.mean(X @ u < float(u @ p)))

    angles = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    grid = np.column_stack([np.cos(angles), np.sin(angles)])
    valid = grid[(grid @ (w - p)) >= 0.0]
    best = min(removed(u) for u in valid)
    assert removed(v) <= best + 0.02


def test_weak_response_sign_rule():
    u = np.array([1.0, 0.0])
    w = np.array([0.5, 0.0])
    assert weak_response(u, w, np.zeros(2)) == pytest.approx([1.0, 0.0])
    assert weak_response(u, w, np.array([0.9, 0.0])) == \
        pytest.approx([-1.0, 0.0])


def test_weak_regret_is_absolute_projection():
    gen = RngStream(22, 0).generator()
    for _ in range(20):
        u = gen.standard_normal(2)
        u /= np.linalg.norm(u)
        w = gen.uniform(-0.7, 0.7, 2)
        p = gen.uniform(-0.7, 0.7, 2)
        v = weak_response(u, w, p)
        assert float((w - p) @ v) == pytest.approx(abs(float((w - p) @ u)))


def test_weak_oracle_commits_up_to_sign(cube2):
    oracle = WeakOracle("weak_random")
    for i in range(10):
        u = oracle.commit(cube2, RngStream(23, i))
        for p in (np.zeros(2), np.array([0.5, 0.5]), np.array([-0.9, 0.2])):
            v = oracle.respond(cube2, np.array([0.1, -0.3]), p,
                               RngStream(23, i)).direction
            assert np.allclose(v, u) or np.allclose(v, -u)


def test_weak_long_axis_tracks_widest_direction():
    K = Polytope.box([-2.0, -0.5], [2.0, 0.5])
    oracle = WeakOracle("weak_long_axis")
    u = oracle.commit(K, RngStream(24, 0))
    assert abs(u[0]) > 0.99  # the long axis of a 4x1 box


def test_all_oracles_valid_in_play():
    w = np.array([0.3, 0.4])
    for name in ("strong_max_regret", "strong_min_cut", "weak_random",
                 "weak_long_axis"):
        oracle = make_oracle(name)
        K = Polytope.unit_ball(2)
        for t in range(5):
            p = RngStream(25, t).generator().uniform(-0.5, 0.5, 2)
            v = oracle.respond(K, w, p, RngStream(26, t)).direction
            assert float((w - p) @ v) >= -1e-9
            assert np.linalg.norm(v) == pytest.approx(1.0)


def test_unknown_strategy_rejected():
    with pytest.raises(InvalidOracle):
        WeakOracle("weak_nonsense")
    with pytest.raises(ValueError):
        make_oracle("no_such_oracle")
