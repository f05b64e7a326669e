"""Contextual recommendation built on the cutting-plane game.

Three variants: single-action play through the best-response reduction, list
recommendation through curvature-path discretization, and local
recommendation through randomized list padding. Also ships the packing-based
lower-bound instance whose adversary forces regret linear in the number of
rounds until the hidden direction is listed.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from . import geometry
from .cutting_plane import (CuttingPlaneState, _PRUNE_MARGIN,
                            update_knowledge)
from .errors import EmptyKnowledge, LPInfeasible, PackingTooSmall
from .geometry import Polytope
from .rng import RngStream

_DEDUP_TOL = 1e-12
_FEEDBACK_TOL = 1e-9


@dataclass(frozen=True)
class ActionSet:
    """The round's available actions; unit-ball points, deduplicated.

    Duplicate vectors (within 1e-12) are removed at construction so that
    index equality is a well-defined test for "same action".
    """

    actions: np.ndarray
    round: int = 0

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.actions, dtype=float))
        if len(X) == 0:
            raise ValueError("action set must be nonempty")
        norms = np.linalg.norm(X, axis=1)
        if np.any(norms > 1.0 + 1e-9):
            raise ValueError("actions must lie in the unit ball")
        dup = np.max(np.abs(X[:, None, :] - X[None, :, :]),
                     axis=2) <= _DEDUP_TOL
        keep = ~np.any(np.tril(dup, -1), axis=1)
        object.__setattr__(self, "actions", X[keep])

    def __len__(self):
        return len(self.actions)

    @property
    def dim(self):
        return self.actions.shape[1]


@dataclass(frozen=True)
class FeedbackEvent:
    kind: str                 # "best_action" | "local_better"
    action_index: int


@dataclass(frozen=True)
class Recommendation:
    """Indices offered to the user; the anchor (reduction choice) is first."""

    list: List[int]
    anchor_index: int

    def __post_init__(self):
        if len(self.list) == 0:
            raise ValueError("empty recommendation")
        if len(set(self.list)) != len(self.list):
            raise ValueError("recommendation indices must be distinct")
        if self.list[0] != self.anchor_index:
            raise ValueError("anchor must be the first listed index")


def best_response(w, X: ActionSet) -> int:
    """Lowest index maximizing <x, w> over the action set."""
    scores = X.actions @ np.asarray(w, dtype=float)
    return int(np.argmax(scores))


# -- single-action reduction ----------------------------------------------


@dataclass(frozen=True)
class ReductionStep:
    played_index: int
    regret: float
    state: CuttingPlaneState
    case: int                       # 1 = exact best played, 2 = cut fed back
    cp_regret: float                # <w* - p, v> on Case-2 rounds, else 0
    query: np.ndarray
    direction: Optional[np.ndarray]


def step_reduction(state, learner, X: ActionSet, w_star, rng) -> ReductionStep:
    """One round of the best-response reduction.

    Case 1 (the played action is the revealed best): zero regret and the
    learner state is left exactly as at the start of the round — the
    cutting-plane round is not counted. Case 2 feeds the normalized action
    difference back as a separation direction.
    """
    w_star = np.asarray(w_star, dtype=float)
    p = learner.propose(state, rng.child(0))
    i_t = best_response(p, X)
    i_star = best_response(w_star, X)
    if i_star == i_t:
        return ReductionStep(played_index=i_t, regret=0.0, state=state,
                             case=1, cp_regret=0.0, query=p, direction=None)
    x_t = X.actions[i_t]
    x_star = X.actions[i_star]
    v = x_star - x_t
    v = v / np.linalg.norm(v)
    cp = float((w_star - p) @ v)
    regret = float(w_star @ (x_star - x_t))
    new_state = update_knowledge(state, p, v)
    return ReductionStep(played_index=i_t, regret=regret, state=new_state,
                         case=2, cp_regret=cp, query=p, direction=v)


def run_contextual_game(learner, action_gen, w_star, T, rng):
    """T rounds of single-action contextual recommendation."""
    w_star = np.asarray(w_star, dtype=float)
    d = w_star.shape[0]
    horizon = T if getattr(learner, "needs_horizon", False) else None
    state = CuttingPlaneState.initial(d, horizon=horizon)
    steps = []
    for t in range(1, T + 1):
        X = action_gen(t, rng.child(2 * t))
        steps.append(step_reduction(state, learner, X, w_star,
                                    rng.child(2 * t + 1)))
        state = steps[-1].state
    return steps


# -- list recommendation ---------------------------------------------------


@dataclass(frozen=True)
class ListStep:
    recommendation: Recommendation
    loss: float
    knowledge: Polytope
    best_index: int


def _add_halfspace_cuts(K, normals):
    """Intersect K with {<a, w> >= 0} for each normal, skipping cuts that are
    already implied (all vertices on the keep side) to bound the growth of
    the halfspace list."""
    V = K.vertices
    for a in normals:
        nrm = np.linalg.norm(a)
        if nrm <= _DEDUP_TOL:
            continue
        if V is not None and len(V) and float(np.min(V @ a)) >= -1e-12:
            continue
        K = K.with_cut(a, 0.0)
        V = K.vertices
    if K.n_halfspaces > 2 * K.dim * K.dim + 2 * K.dim + _PRUNE_MARGIN:
        K = K.pruned_fast()
    return geometry.tightened(K)


def step_list(K, X: ActionSet, k, w_star, n, rng, disc=None) -> ListStep:
    """One round of list recommendation via curvature-path discretization.

    Offers the best responses of the k+1 path points, observes the best
    action, and cuts the knowledge set with {<x* - x, w> >= 0} for every
    listed x. Pass a precomputed ``disc`` to reuse the path when K has not
    changed since the previous round.
    """
    w_star = np.asarray(w_star, dtype=float)
    if disc is None:
        disc = geometry.discretize_curvature_path(K, k, n, rng.child(0))
    idx = []
    seen = set()
    for p in disc.points:
        i = best_response(p, X)
        if i not in seen:
            seen.add(i)
            idx.append(i)
    i_star = best_response(w_star, X)
    rec = Recommendation(list=idx, anchor_index=idx[0])
    listed = X.actions[idx]
    loss = float(w_star @ X.actions[i_star] - np.max(listed @ w_star))
    x_star = X.actions[i_star]
    K2 = _add_halfspace_cuts(K, [x_star - x for x in listed])
    return ListStep(recommendation=rec, loss=loss, knowledge=K2,
                    best_index=i_star)


def run_list_game(action_gen, w_star, T, k, n, rng, d=None):
    """T rounds of list recommendation; reuses the path discretization across
    rounds in which no cut changed the knowledge set."""
    w_star = np.asarray(w_star, dtype=float)
    d = w_star.shape[0] if d is None else d
    K = Polytope.unit_ball(d)
    disc = None
    steps = []
    for t in range(1, T + 1):
        X = action_gen(t, rng.child(2 * t))
        if disc is None:
            disc = geometry.discretize_curvature_path(K, k, n,
                                                      rng.child(2 * t + 1))
        step = step_list(K, X, k, w_star, n, rng.child(2 * t + 1), disc=disc)
        if step.knowledge is not K:
            disc = None
        K = step.knowledge
        steps.append(step)
    return steps


# -- local recommendation --------------------------------------------------


@dataclass(frozen=True)
class LocalStep:
    recommendation: Recommendation
    regret: float
    state: CuttingPlaneState
    feedback: FeedbackEvent
    updated: bool


def feedback_exact_best(X, listed_idx, w_star, rng):
    """Environment reveals the global best action."""
    return best_response(w_star, X)


def feedback_adversarial_minimal(X, listed_idx, w_star, rng):
    """Least-informative valid feedback: the best action already in the list."""
    scores = X.actions[listed_idx] @ np.asarray(w_star, dtype=float)
    return int(listed_idx[int(np.argmax(scores))])


FEEDBACK_POLICIES = {
    "exact_best": feedback_exact_best,
    "adversarial_minimal": feedback_adversarial_minimal,
}


def step_local(state, learner, X: ActionSet, H, w_star, feedback_policy,
               rng) -> LocalStep:
    """One round of local recommendation: anchor plus H-1 random actions.

    The environment returns any action at least as good as the list's best;
    when it differs from the anchor the difference direction is fed to the
    learner. Regret is measured against the global best action.
    """
    if H < 2:
        raise ValueError("need list size H >= 2")
    w_star = np.asarray(w_star, dtype=float)
    p = learner.propose(state, rng.child(0))
    i_t = best_response(p, X)
    others = [i for i in range(len(X)) if i != i_t]
    gen = rng.child(1).generator()
    n_extra = min(H - 1, len(others))
    extra = gen.choice(len(others), size=n_extra, replace=False)
    listed = [i_t] + [others[j] for j in sorted(extra)]
    rec = Recommendation(list=listed, anchor_index=i_t)
    i_loc = feedback_policy(X, listed, w_star, rng.child(2))
    list_best = float(np.max(X.actions[listed] @ w_star))
    if float(X.actions[i_loc] @ w_star) < list_best - _FEEDBACK_TOL:
        raise ValueError("environment feedback violates the local contract")
    fb = FeedbackEvent(kind="local_better", action_index=i_loc)
    i_star = best_response(w_star, X)
    regret = float(w_star @ (X.actions[i_star] - X.actions[i_t]))
    updated = False
    if i_loc != i_t:
        v = X.actions[i_loc] - X.actions[i_t]
        nrm = np.linalg.norm(v)
        if nrm > _DEDUP_TOL:
            state = update_knowledge(state, p, v / nrm)
            updated = True
    return LocalStep(recommendation=rec, regret=regret, state=state,
                     feedback=fb, updated=updated)


def run_local_game(learner, action_gen, w_star, T, H, rng,
                   feedback_policy=feedback_exact_best):
    w_star = np.asarray(w_star, dtype=float)
    d = w_star.shape[0]
    horizon = T if getattr(learner, "needs_horizon", False) else None
    state = CuttingPlaneState.initial(d, horizon=horizon)
    steps = []
    for t in range(1, T + 1):
        X = action_gen(t, rng.child(2 * t))
        step = step_local(state, learner, X, H, w_star, feedback_policy,
                          rng.child(2 * t + 1))
        state = step.state
        steps.append(step)
    return steps


# -- lower-bound construction ----------------------------------------------


@dataclass(frozen=True)
class LowerBoundInstance:
    dim: int
    packing: np.ndarray          # (|S|, d); first coordinates all zero
    hidden_index: int
    w_star: np.ndarray

    @property
    def hidden(self):
        return self.packing[self.hidden_index]

    @property
    def actions(self) -> ActionSet:
        e1 = np.zeros(self.dim)
        e1[0] = 1.0
        return ActionSet(np.vstack([self.packing, e1]))


def greedy_packing(d, rng, max_ip=0.1, stop_factor=200):
    """Greedy packing of unit vectors with zero first coordinate and pairwise
    inner products at most ``max_ip``; stops after 200 |S| consecutive
    rejections."""
    gen = rng.generator()
    S = []
    rejections = 0
    while True:
        u = np.zeros(d)
        u[1:] = gen.standard_normal(d - 1)
        u /= np.linalg.norm(u)
        if all(float(u @ s) <= max_ip for s in S):
            S.append(u)
            rejections = 0
        else:
            rejections += 1
            if rejections >= stop_factor * max(1, len(S)):
                break
    return np.asarray(S)


def make_lowerbound_instance(d, rng) -> LowerBoundInstance:
    """Packing instance of the local-feedback lower bound."""
    if d < 3:
        raise ValueError("the lower-bound construction needs d >= 3")
    S = greedy_packing(d, rng.child(0))
    if len(S) < 4:
        raise PackingTooSmall(f"greedy packing found only {len(S)} directions")
    gen = rng.child(1).generator()
    j = int(gen.integers(0, len(S)))
    e1 = np.zeros(d)
    e1[0] = 1.0
    w_star = 0.2 * e1 + 0.8 * S[j]
    return LowerBoundInstance(dim=d, packing=S, hidden_index=j, w_star=w_star)


def run_lowerbound_game(instance, learner, H, T, rng):
    """The theorem's adversary: reveal e1 until the hidden direction is
    listed, then reveal the hidden direction. Returns the LocalStep trace."""
    X = instance.actions
    if H > len(instance.packing):
        raise ValueError("list size H must not exceed the packing size")
    hidden_i = instance.hidden_index
    e1_i = len(X) - 1

    def adversary(Xs, listed_idx, w_star, rng_):
        if hidden_i in listed_idx:
            return hidden_i
        return e1_i

    d = instance.dim
    horizon = T if getattr(learner, "needs_horizon", False) else None
    state = CuttingPlaneState.initial(d, horizon=horizon)
    steps = []
    for t in range(1, T + 1):
        step = step_local(state, learner, X, H, instance.w_star, adversary,
                          rng.child(t))
        state = step.state
        steps.append(step)
    return steps


# -- action-set generators -------------------------------------------------


def uniform_sphere_actions(n, d):
    """Generator of fresh n-point uniform-sphere action sets per round."""
    def gen(t, rng):
        g = rng.generator()
        X = g.standard_normal((n, d))
        X /= np.linalg.norm(X, axis=1, keepdims=True)
        return ActionSet(X, round=t)
    return gen


def vertex_cloud_actions(d, n_extra=None):
    """Generator whose actions are vertices of a fresh random polytope,
    rescaled into the unit ball."""
    def gen(t, rng):
        K = geometry.random_polytope(d, rng, n_extra=n_extra)
        V = K.vertices
        if V is None or len(V) == 0:
            raise ValueError("vertex cloud needs an enumerable polytope")
        norms = np.linalg.norm(V, axis=1)
        V = V / max(1.0, float(norms.max()))
        return ActionSet(V, round=t)
    return gen


def fixed_catalog_actions(X):
    """Generator returning the same catalog every round."""
    base = ActionSet(X)

    def gen(t, rng):
        return replace(base, round=t)
    return gen


ACTION_GENERATORS = {
    "uniform_sphere": uniform_sphere_actions,
    "vertex_cloud": vertex_cloud_actions,
    "fixed_catalog": fixed_catalog_actions,
}
