"""Simulated separation oracles for the cutting-plane game.

Strong oracles may answer with any valid direction; the two shipped here are
the adversarial max-regret direction and a benign one that removes the least
(Monte Carlo estimated) volume. Weak oracles commit to a direction u before
seeing the query and only reveal which side of the hyperplane through the
query the hidden point lies on.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .cutting_plane import OracleResponse
from .errors import InvalidOracle

_TIE_TOL = 1e-12


def _fallback_direction(d):
    e = np.zeros(d)
    e[0] = 1.0
    return e


def max_regret_direction(w_star, p):
    """The valid direction maximizing instantaneous regret: (w* - p)/|w* - p|.

    When the query coincides with the hidden point every direction is valid
    and the regret is zero; a fixed axis direction is returned.
    """
    g = np.asarray(w_star, float) - np.asarray(p, float)
    nrm = np.linalg.norm(g)
    if nrm <= _TIE_TOL:
        return _fallback_direction(g.shape[0])
    return g / nrm


def min_cut_direction(K, w_star, p, rng, n_candidates=64, n_samples=512):
    """Among valid candidate directions, pick the one cutting away the least
    volume of the knowledge set.

    Candidates are uniform unit vectors (the max-regret direction is always
    included as a seed); the removed fraction is scored against one shared
    batch of points sampled from K, so the comparison is paired.
    """
    w_star = np.asarray(w_star, float)
    p = np.asarray(p, float)
    g = w_star - p
    if np.linalg.norm(g) <= _TIE_TOL:
        return _fallback_direction(g.shape[0])
    d = g.shape[0]
    gen = rng.child(0).generator()
    raw = gen.normal(size=(n_candidates - 1, d))
    cand = raw / np.linalg.norm(raw, axis=1, keepdims=True)
    cand = np.vstack([max_regret_direction(w_star, p), cand])
    # validity: <w* - p, v> >= 0; flip invalid candidates to their negations
    margins = cand @ g
    cand[margins < 0.0] *= -1.0
    if K.frozen:
        return cand[0]
    X = geometry.sample_dilated(K, 0.0, n_samples, rng.child(1))
    # removed set under candidate v is {w in K : <v, w> < <v, p>}
    removed = (X @ cand.T) < (cand @ p)[None, :]
    frac = removed.mean(axis=0)
    # candidates within Monte Carlo noise of the minimum are statistical
    # ties (e.g. every cut through the center of a symmetric K removes
    # exactly half); break ties toward the least-regret direction
    f0 = float(frac.min())
    se = np.sqrt(max(f0 * (1.0 - f0), 1.0 / n_samples) / n_samples)
    tied = frac <= f0 + 2.0 * se
    idx = np.flatnonzero(tied)
    return cand[idx[int(np.argmin(np.abs(cand[idx] @ g)))]]


def weak_response(u, w_star, p):
    """Sign feedback along a committed direction: v = sign(<w* - p, u>) u."""
    s = float((np.asarray(w_star, float) - np.asarray(p, float)) @ u)
    return u if s >= 0.0 else -u


def draw_weak_random(K, rng):
    """Uniform direction on the sphere, independent of the knowledge set."""
    gen = rng.generator()
    u = gen.normal(size=K.dim)
    return u / np.linalg.norm(u)


def draw_weak_long_axis(K, rng):
    """Longest axis of the inscribed ellipsoid of the knowledge set."""
    if K.frozen:
        return _fallback_direction(K.dim)
    return geometry.john_ellipsoid(K).longest_axis()


WEAK_STRATEGIES = {
    "weak_random": draw_weak_random,
    "weak_long_axis": draw_weak_long_axis,
}


@dataclass(frozen=True)
class OracleConfig:
    """Parameters shared by the oracle constructors."""

    kind: str = "strong_max_regret"
    n_candidates: int = 64
    n_samples: int = 512


class MaxRegretOracle:
    name = "strong_max_regret"

    def respond(self, K, w_star, p, rng):
        return OracleResponse(direction=max_regret_direction(w_star, p))


class MinCutOracle:
    name = "strong_min_cut"

    def __init__(self, n_candidates=64, n_samples=512):
        self.n_candidates = n_candidates
        self.n_samples = n_samples

    def respond(self, K, w_star, p, rng):
        v = min_cut_direction(K, w_star, p, rng,
                              n_candidates=self.n_candidates,
                              n_samples=self.n_samples)
        return OracleResponse(direction=v)


class WeakOracle:
    """Commits to u from (K, rng) alone, then answers with sign feedback."""

    def __init__(self, strategy="weak_random"):
        if strategy not in WEAK_STRATEGIES:
            raise InvalidOracle(
                f"unknown weak strategy '{strategy}' "
                f"(have {sorted(WEAK_STRATEGIES)})")
        self.strategy = strategy
        self.name = strategy

    def commit(self, K, rng):
        return WEAK_STRATEGIES[self.strategy](K, rng)

    def respond(self, K, w_star, p, rng):
        u = self.commit(K, rng)
        return OracleResponse(direction=weak_response(u, w_star, p))


ORACLES = {
    "strong_max_regret": MaxRegretOracle,
    "strong_min_cut": MinCutOracle,
    "weak_random": lambda **kw: WeakOracle("weak_random"),
    "weak_long_axis": lambda **kw: WeakOracle("weak_long_axis"),
}


def make_oracle(name, **params):
    if name == "strong_min_cut":
        return MinCutOracle(**params)
    if name not in ORACLES:
        raise ValueError(f"unknown oracle '{name}' (have {sorted(ORACLES)})")
    return ORACLES[name]()
