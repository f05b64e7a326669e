"""The low-regret cutting-plane game.

A learner proposes query points, a separation oracle answers with directions
whose halfspaces contain the hidden point, and the knowledge set shrinks by
one cut per round. Three learners are provided: the inscribed-ellipsoid
center, the centroid of the 1/T-dilation, and a random point on the
discretized centroid path; a plain-centroid learner ships as an experimental
extra with no claimed bound.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import geometry
from .errors import EmptyKnowledge, InvalidOracle, LPInfeasible, MissingHorizon
from .geometry import Polytope
from .rng import RngStream

VALIDITY_TOL = 1e-6
_PRUNE_MARGIN = 24
# below this diameter the knowledge set is numerically a point: freeze it
# before it shrinks to scales where facet-pruning arithmetic is unreliable
_FREEZE_DIAMETER = 1e-6


@dataclass(frozen=True)
class CuttingPlaneState:
    """Knowledge set plus round bookkeeping for one game."""

    knowledge: Polytope
    round: int = 0
    horizon: Optional[int] = None
    cuts: int = 0
    warm_samples: Optional[np.ndarray] = field(default=None, repr=False,
                                               compare=False)

    @property
    def dim(self):
        return self.knowledge.dim

    @classmethod
    def initial(cls, d, horizon=None):
        """Fresh game over the (polytope approximation of the) unit ball."""
        return cls(knowledge=Polytope.unit_ball(d), round=0, horizon=horizon)


@dataclass(frozen=True)
class OracleResponse:
    """The unit direction v returned by a separation oracle."""

    direction: np.ndarray


@dataclass(frozen=True)
class RoundRecord:
    round: int
    query: np.ndarray
    response: OracleResponse
    regret: float
    width_along_v: float


def update_knowledge(state, p, v):
    """Intersect the knowledge set with {<v, w> >= <v, p>} and advance a round.

    Redundant halfspaces are pruned once the list outgrows the active count,
    and the certified bounding radius is tightened; both preserve the feasible
    set exactly.
    """
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    K = state.knowledge
    try:
        K2 = K.with_cut(v, float(v @ p))
    except LPInfeasible as exc:
        raise EmptyKnowledge(str(exc)) from exc
    if not K2.frozen:
        try:
            lows, highs = K2.tight_box
            if float(np.max(highs - lows)) < _FREEZE_DIAMETER:
                K2 = geometry.frozen_point(0.5 * (lows + highs),
                                           K2.bounding_radius)
        except (LPInfeasible, geometry.NonConvergence):
            pass
    if K2.n_halfspaces > 2 * K2.dim * K2.dim + 2 * K2.dim + _PRUNE_MARGIN:
        K2 = K2.pruned_fast()
    K2 = geometry.tightened(K2)
    warm = state.warm_samples
    if warm is not None:
        warm = warm[K2.contains_batch(warm, tol=1e-9)]
        if len(warm) == 0:
            warm = None
    return replace(state, knowledge=K2, round=state.round + 1,
                   cuts=state.cuts + 1, warm_samples=warm)


# -- proposal rules --------------------------------------------------------


def propose_john_center(state, eps=1e-6):
    """Center of the maximum-volume inscribed ellipsoid of the knowledge set."""
    K = state.knowledge
    if K.frozen:
        return K.witness.copy()
    return geometry.john_ellipsoid(K, eps).center


def _min_facet_width(K):
    V = K.vertices
    if V is None or len(V) == 0:
        lows, highs = K.tight_box
        return float(np.min(highs - lows))
    proj = V @ K.A.T
    return float(np.min(proj.max(axis=0) - proj.min(axis=0)))


def propose_steiner_centroid(state, n, rng, adaptive=True, n_cap=16384,
                             chains=None, init=None, burn_in=None,
                             return_samples=False):
    """Centroid of K_t + (1/T) B, by Monte Carlo over the dilation.

    With ``adaptive`` the sample budget is raised in one jump (up to
    ``n_cap``) toward keeping 3 SE below width/(32 e d), the offset the
    volume-reduction guarantee tolerates; the width proxy is the smallest
    facet-direction width. ``init`` warm-starts the chains with points from
    a previous round that still lie in the knowledge set.
    """
    if state.horizon is None:
        raise MissingHorizon("the dilated-centroid learner needs the horizon T")
    K = state.knowledge
    if K.frozen:
        if return_samples:
            return K.witness.copy(), None
        return K.witness.copy()
    r = 1.0 / state.horizon
    d = K.dim
    if init is None:
        init = state.warm_samples
    est, X = geometry.centroid_dilated(
        K, r, n, rng.child(0), init=init, chains=chains,
        burn_in=burn_in if init is not None and len(init) else None,
        return_samples=True)
    if adaptive:
        target = _min_facet_width(K) / (32.0 * math.e * d)
        spread = 3.0 * float(np.max(est.se))
        if spread > target and n < n_cap:
            n_extra = min(n_cap, int(n * (spread / target) ** 2)) - n
            X2 = geometry.sample_dilated(K, r, n_extra, rng.child(1), init=X,
                                         chains=chains)
            X = np.vstack([X, X2])
            C = geometry._HIT_AND_RUN_CHAINS if chains is None else chains
            est = geometry.CentroidEstimate(
                point=X.mean(axis=0),
                se=geometry.centroid_se(X, C), n=len(X))
    if return_samples:
        return est.point, X
    return est.point


def propose_curvature_random(state, pieces, n, rng, n_radii=40):
    """Uniformly random point of the k-piece discretized centroid path."""
    if pieces < 1:
        raise ValueError("need pieces >= 1")
    K = state.knowledge
    if K.frozen:
        return K.witness.copy()
    disc = geometry.discretize_curvature_path(K, pieces, n, rng.child(0),
                                              n_radii=n_radii)
    gen = rng.child(1).generator()
    return disc.points[int(gen.integers(0, len(disc.points)))]


def propose_centroid(state, n, rng):
    """Plain centroid of K_t (experimental learner; no regret bound claimed)."""
    K = state.knowledge
    if K.frozen:
        return K.witness.copy()
    return geometry.centroid_dilated(K, 0.0, n, rng,
                                     init=state.warm_samples).point


def default_pieces(d):
    """Proof-faithful discretization count 64 ceil(e) d^4 = 192 d^4."""
    return 192 * d ** 4


# -- learner objects -------------------------------------------------------


class JohnCenterLearner:
    name = "john_center"
    needs_horizon = False

    def __init__(self, eps=1e-6):
        self.eps = eps

    def propose(self, state, rng):
        return propose_john_center(state, self.eps)


class SteinerCentroidLearner:
    """Dilated-centroid learner with a warm-start sample cache.

    Chains resume from the previous round's samples (those still inside the
    knowledge set), which cuts the burn-in cost from 50 d steps to a short
    re-burn per round.
    """

    name = "steiner_centroid"
    needs_horizon = True

    def __init__(self, n=2048, adaptive=True, n_cap=16384, chains=512,
                 burn_in=None):
        self.n = n
        self.adaptive = adaptive
        self.n_cap = n_cap
        self.chains = chains
        self.burn_in = burn_in
        self._warm = None
        self._cached = None         # (knowledge, horizon, proposal)

    def propose(self, state, rng):
        # the dilated centroid is a deterministic functional of (K, T), so an
        # unchanged knowledge set (common in no-update contextual rounds)
        # reuses the previous estimate
        if self._cached is not None and self._cached[0] is state.knowledge \
                and self._cached[1] == state.horizon:
            return self._cached[2]
        p, X = propose_steiner_centroid(state, self.n, rng,
                                        adaptive=self.adaptive,
                                        n_cap=self.n_cap, chains=self.chains,
                                        init=self._warm, burn_in=self.burn_in,
                                        return_samples=True)
        self._warm = X
        self._cached = (state.knowledge, state.horizon, p)
        return p


class CurvatureRandomLearner:
    name = "curvature_random"
    needs_horizon = False

    def __init__(self, pieces=None, pieces_cap=512, n=48, n_radii=12):
        self.pieces = pieces
        self.pieces_cap = pieces_cap
        self.n = n
        self.n_radii = n_radii

    def pieces_for(self, d):
        k = self.pieces if self.pieces is not None else default_pieces(d)
        return min(k, self.pieces_cap)

    def propose(self, state, rng):
        return propose_curvature_random(state, self.pieces_for(state.dim),
                                        self.n, rng, n_radii=self.n_radii)


class CentroidLearner:
    name = "centroid"
    needs_horizon = False

    def __init__(self, n=1024, chains=256):
        self.n = n
        self.chains = chains
        self._warm = None

    def propose(self, state, rng):
        K = state.knowledge
        if K.frozen:
            return K.witness.copy()
        est, X = geometry.centroid_dilated(K, 0.0, self.n, rng,
                                           init=self._warm,
                                           chains=self.chains,
                                           return_samples=True)
        self._warm = X
        return est.point


class DoublingHorizonLearner:
    """Horizon-free wrapper: run the dilated-centroid rule with T' = T0 2^j.

    The active stage j is derived from the number of counted rounds, so
    reduction rounds that reset state (case 1) never advance the stage. The
    knowledge set is kept across stages; only the dilation radius restarts.
    This wrapper is a standard horizon-removal device, not part of the
    analyzed algorithms.
    """

    name = "steiner_doubling"
    needs_horizon = False

    def __init__(self, t0=64, **kwargs):
        self.t0 = t0
        self.inner_kwargs = kwargs
        self._warm = None

    def current_horizon(self, rounds_used):
        t, total = self.t0, self.t0
        while rounds_used >= total:
            t *= 2
            total += t
        return t

    def propose(self, state, rng):
        t_eff = self.current_horizon(state.round)
        staged = replace(state, horizon=t_eff)
        p, X = propose_steiner_centroid(
            staged, rng=rng, init=self._warm, return_samples=True,
            **{"n": 2048, "chains": 512, **self.inner_kwargs})
        self._warm = X
        return p


LEARNERS = {
    "john_center": JohnCenterLearner,
    "steiner_centroid": SteinerCentroidLearner,
    "curvature_random": CurvatureRandomLearner,
    "centroid": CentroidLearner,
    "steiner_doubling": DoublingHorizonLearner,
}


def make_learner(name, **params):
    if name not in LEARNERS:
        raise ValueError(f"unknown learner '{name}' (have {sorted(LEARNERS)})")
    return LEARNERS[name](**params)


# -- game loop -------------------------------------------------------------


def run_cutting_plane_game(learner, oracle, w_star, T, rng,
                           record_width=True):
    """Play T rounds of the separation game; returns the full round trace.

    Raises :class:`InvalidOracle` if any response violates the separating
    condition against the known hidden point.
    """
    w_star = np.asarray(w_star, dtype=float)
    if np.linalg.norm(w_star) > 1.0 + 1e-9:
        raise ValueError("hidden point must lie in the unit ball")
    if T < 1:
        raise ValueError("need T >= 1 rounds")
    d = w_star.shape[0]
    horizon = T if getattr(learner, "needs_horizon", False) else None
    state = CuttingPlaneState.initial(d, horizon=horizon)
    records = []
    for t in range(1, T + 1):
        p = learner.propose(state, rng.child(2 * t))
        resp = oracle.respond(state.knowledge, w_star, p, rng.child(2 * t + 1))
        v = resp.direction
        regret = float((w_star - p) @ v)
        if regret < -VALIDITY_TOL:
            raise InvalidOracle(
                f"round {t}: oracle direction has margin {regret:.3e}")
        w = geometry.width(state.knowledge, v) if record_width else float("nan")
        records.append(RoundRecord(round=t, query=p, response=resp,
                                   regret=regret, width_along_v=w))
        state = update_knowledge(state, p, v)
    return records
