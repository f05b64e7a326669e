"""Numerical convex geometry over bounded H-polytopes.

The knowledge sets used by the learners live here: membership, directional
width, Euclidean projection, uniform sampling of Minkowski dilations K + rB,
Monte Carlo centroids/volumes of dilations, maximum-volume inscribed
ellipsoids, and the discretized centroid path r -> cg(K + rB).

All randomized routines draw from an explicit :class:`~cutplane.rng.RngStream`
and are deterministic given it. Polytopes are immutable; cuts produce new
values.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import linprog, minimize

from .errors import (
    DimensionTooLarge,
    LPInfeasible,
    NonConvergence,
)
from .rng import RngStream

FEASIBILITY_SLACK = 1e-9     # minimum witness slack for a nonempty polytope
DEFAULT_PROJECT_TOL = 1e-7
CONTAINMENT_TOL = 1e-6
_BALL_NORMAL_SEED = 811_211  # fixed seed for the spread normals of the ball approx

_HIT_AND_RUN_CHAINS = 64
_WARM_BURN_IN = 8


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("direction must be a nonzero finite vector")
    return v / n


@dataclass(frozen=True)
class Halfspace:
    """The halfspace {x : <normal, x> >= offset} with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _unit(self.normal))


@dataclass(frozen=True)
class Ellipsoid:
    """{x : (x - center)^T shape^{-1} (x - center) <= 1} with shape PD."""

    center: np.ndarray
    shape: np.ndarray

    @property
    def dim(self):
        return self.center.shape[0]

    def axes(self):
        """Eigenvalues/eigenvectors of the shape matrix; semi-axes are sqrt(eigs)."""
        return np.linalg.eigh(self.shape)

    def longest_axis(self):
        """Unit direction of the longest semi-axis."""
        eigvals, eigvecs = self.axes()
        return eigvecs[:, int(np.argmax(eigvals))]

    def contains(self, x, tol=1e-9):
        y = np.asarray(x, dtype=float) - self.center
        return float(y @ np.linalg.solve(self.shape, y)) <= 1.0 + tol

    def whitening(self):
        """Matrix A = shape^{-1/2}; maps the ellipsoid to the unit ball."""
        eigvals, eigvecs = self.axes()
        return (eigvecs * (1.0 / np.sqrt(eigvals))) @ eigvecs.T


class Polytope:
    """Bounded intersection of halfspaces {x : <a_i, x> >= b_i}, certified nonempty.

    Rows of ``A`` are unit normals. A stored interior ``witness`` has slack at
    least ``FEASIBILITY_SLACK`` in every halfspace unless the polytope has
    degenerated to a point, in which case ``frozen`` is set and downstream
    consumers treat the witness as the whole set.
    """

    def __init__(self, A, b, bounding_radius, witness=None, _check=True):
        A = np.atleast_2d(np.asarray(A, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        norms = np.linalg.norm(A, axis=1)
        if np.any(norms == 0):
            raise ValueError("zero normal in halfspace list")
        self.A = A / norms[:, None]
        self.b = b / norms
        self.dim = A.shape[1]
        self.bounding_radius = float(bounding_radius)
        if witness is None:
            witness, slack = _chebyshev_center(self.A, self.b, self.bounding_radius)
        else:
            witness = np.asarray(witness, dtype=float)
            slack = float(np.min(self.A @ witness - self.b))
            if _check and slack < FEASIBILITY_SLACK:
                witness, slack = _chebyshev_center(self.A, self.b, self.bounding_radius)
        self.witness = witness
        self.witness_slack = slack
        self.frozen = slack < FEASIBILITY_SLACK

    # -- constructors ------------------------------------------------------

    @classmethod
    def box(cls, lows, highs):
        lows = np.asarray(lows, dtype=float)
        highs = np.asarray(highs, dtype=float)
        d = lows.shape[0]
        eye = np.eye(d)
        A = np.vstack([eye, -eye])
        b = np.concatenate([lows, -highs])
        R = float(np.linalg.norm(np.maximum(np.abs(lows), np.abs(highs))))
        return cls(A, b, R, witness=(lows + highs) / 2.0)

    @classmethod
    def unit_ball(cls, d, n_normals=None):
        """Outer polytope approximation of the unit ball (plus the unit box).

        Uses m = min(2 d^2, 256) uniformly spread tangent halfspaces. The
        approximation is outward (contains the ball), so hidden-point
        membership in knowledge-set updates is preserved; widths overshoot
        2.0 by the facet-gap secant factor.
        """
        if n_normals is None:
            n_normals = min(2 * d * d, 256)
        if d == 2:
            ang = 2.0 * np.pi * np.arange(n_normals) / n_normals
            U = np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            gen = RngStream(_BALL_NORMAL_SEED, d).generator()
            U = gen.standard_normal((n_normals, d))
            U /= np.linalg.norm(U, axis=1, keepdims=True)
        eye = np.eye(d)
        A = np.vstack([-U, eye, -eye])
        b = np.concatenate([-np.ones(n_normals), -np.ones(d), -np.ones(d)])
        return cls(A, b, float(np.sqrt(d)), witness=np.zeros(d))

    # -- basic queries -----------------------------------------------------

    @property
    def n_halfspaces(self):
        return self.A.shape[0]

    @property
    def halfspaces(self):
        return [Halfspace(a, float(bi)) for a, bi in zip(self.A, self.b)]

    def slacks(self, x):
        return self.A @ np.asarray(x, dtype=float) - self.b

    def contains(self, x, tol=1e-9):
        return bool(np.min(self.slacks(x)) >= -tol)

    def contains_batch(self, X, tol=1e-9):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X @ self.A.T - self.b).min(axis=1) >= -tol

    def with_cut(self, normal, offset):
        """New polytope intersected with {<normal, x> >= offset}.

        When the stored witness loses its slack, the replacement Chebyshev LP
        is solved in recentred, rescaled coordinates; at the scales a long
        game reaches (1e-10 and below) the raw LP reports slacks at solver
        tolerance and the degeneracy freeze would never trigger.
        """
        if self.frozen:
            return self
        a = _unit(normal)
        off = float(offset) / np.linalg.norm(normal)
        A = np.vstack([self.A, a])
        b = np.concatenate([self.b, [off]])
        if np.min(a @ self.witness - off) >= FEASIBILITY_SLACK:
            return Polytope(A, b, self.bounding_radius, witness=self.witness,
                            _check=False)
        try:
            lows, highs = self.tight_box
            c = self.witness
            s = max(float(np.max(highs - lows)) * 0.5, 1e-14)
        except (LPInfeasible, NonConvergence):
            c, s = self.witness, 1.0
        b_t = (b - A @ c) / s
        w_t, slack_t = _chebyshev_center(A, b_t, 2.0 * np.sqrt(self.dim) + 1.0)
        if slack_t < 0.0:
            raise LPInfeasible("cut removed the entire knowledge set")
        return Polytope(A, b, self.bounding_radius, witness=c + s * w_t,
                        _check=False)

    def pruned(self, slack=1e-9):
        """Drop halfspaces redundant for the feasible set (same geometry).

        Redundancy is affine invariant, so the LPs are run on a recentred,
        rescaled copy; without this the solver tolerances swamp knowledge
        sets that have shrunk far below unit scale.
        """
        m = self.n_halfspaces
        if self.frozen:
            return self
        try:
            lows, highs = self.tight_box
            c = 0.5 * (lows + highs)
            s = max(float(np.max(highs - lows)) * 0.5, 1e-14)
        except (LPInfeasible, NonConvergence):
            c = self.witness
            s = 1.0
        b_t = (self.b - self.A @ c) / s
        R_t = 2.0 * np.sqrt(self.dim) + 1.0
        keep = []
        for i in range(m):
            mask = np.ones(m, dtype=bool)
            mask[i] = False
            res = linprog(
                self.A[i],
                A_ub=-self.A[mask],
                b_ub=-b_t[mask],
                bounds=[(-R_t, R_t)] * self.dim,
                method="highs",
            )
            if not res.success or res.fun < b_t[i] - slack:
                keep.append(i)
        keep = np.asarray(keep, dtype=int)
        if len(keep) <= self.dim:
            return self          # cannot bound the set; keep everything
        cand = Polytope(self.A[keep], self.b[keep], self.bounding_radius,
                        witness=self.witness, _check=False)
        # a prune must never enlarge the set: compare bounding boxes
        try:
            lows, highs = self.tight_box
            c_lows, c_highs = cand.tight_box
        except (LPInfeasible, NonConvergence):
            return self
        tol = max(1e-9, 1e-6 * float(np.max(highs - lows)))
        grow = max(float(np.max(c_highs - highs)), float(np.max(lows - c_lows)))
        if grow > tol:
            return self
        return cand

    def pruned_fast(self, slack=1e-9):
        """Vertex-based redundancy removal for d == 2; falls back to LPs.

        A facet of a polygon is active iff it carries an edge, i.e. at least
        two tight vertices. Keeping a redundant facet is harmless, so the
        tightness tolerance is generous; a bounding-box sanity check guards
        against dropping an active facet and silently enlarging the set.
        """
        if self.dim != 2 or self.frozen:
            return self.pruned(slack)
        V = self.vertices
        if V is None or len(V) < 3:
            return self.pruned(slack)
        slacks = V @ self.A.T - self.b
        lows, highs = V.min(axis=0), V.max(axis=0)
        scale = float(np.max(highs - lows))
        if scale < 1e-5:
            # spurious near-tight vertices make the edge test vacuous here
            return self.pruned(slack)
        tol = max(1e-9, 1e-6 * scale)
        keep = np.flatnonzero((np.abs(slacks) <= tol).sum(axis=0) >= 2)
        if len(keep) < 3 or len(keep) >= self.n_halfspaces:
            return self.pruned(slack)
        cand = Polytope(self.A[keep], self.b[keep], self.bounding_radius,
                        witness=self.witness, _check=False)
        Vc = cand.vertices
        if Vc is None or len(Vc) == 0:
            return self.pruned(slack)
        grow = max(float(np.max(Vc.max(axis=0) - highs)),
                   float(np.max(lows - Vc.min(axis=0))))
        if grow > tol + 1e-9:
            return self.pruned(slack)
        return cand

    # -- derived geometry (cached per immutable instance) ------------------

    @cached_property
    def vertices(self):
        """Vertex array for d <= 3 (combinatorial enumeration); None otherwise."""
        if self.dim > 3:
            return None
        return _enumerate_vertices(self.A, self.b, self.dim)

    @cached_property
    def tight_box(self):
        """(lows, highs) per-coordinate bounds of the feasible set."""
        if self.vertices is not None and len(self.vertices):
            return self.vertices.min(axis=0), self.vertices.max(axis=0)
        lows = np.empty(self.dim)
        highs = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = 1.0
            lows[i] = _lp_support(self, -e) * -1.0
            highs[i] = _lp_support(self, e)
        return lows, highs

    @cached_property
    def _edge_segments(self):
        """For d == 2: per-facet edge tangents and tight parameter ranges.

        Returns (E, t_lo, t_hi) where E[i] is the unit tangent of facet i and
        [t_lo[i], t_hi[i]] the range of <E[i], x> over the facet's edge;
        redundant facets get an empty range.
        """
        if self.dim != 2:
            return None
        E = np.stack([-self.A[:, 1], self.A[:, 0]], axis=1)
        V = self.vertices
        m = self.n_halfspaces
        if V is None or len(V) == 0:
            return E, np.full(m, np.inf), np.full(m, -np.inf)
        slacks = V @ self.A.T - self.b
        tight = np.abs(slacks) <= 1e-7
        t = V @ E.T
        t_lo = np.where(tight, t, np.inf).min(axis=0)
        t_hi = np.where(tight, t, -np.inf).max(axis=0)
        empty = tight.sum(axis=0) < 2
        t_lo[empty] = np.inf
        t_hi[empty] = -np.inf
        return E, t_lo, t_hi

    @cached_property
    def _edge_segments_3d(self):
        """For d == 3: finite edges as (bases, unit directions, lengths).

        An edge is the convex hull of the vertices tight on a facet pair;
        the clamped distance to these segments covers the edge and vertex
        features of the body in one vectorized pass.
        """
        if self.dim != 3:
            return None
        empty = (np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0))
        V = self.vertices
        if V is None or len(V) < 2:
            return empty
        tight = np.abs(V @ self.A.T - self.b) <= 1e-7
        m = self.n_halfspaces
        bases, dirs, lens = [], [], []
        for i in range(m):
            vi = np.flatnonzero(tight[:, i])
            if len(vi) < 2:
                continue
            for j in range(i + 1, m):
                vij = vi[tight[vi, j]]
                if len(vij) < 2:
                    continue
                dv = np.cross(self.A[i], self.A[j])
                nd = np.linalg.norm(dv)
                if nd < 1e-10:
                    continue
                t = V[vij] @ (dv / nd)
                a = V[vij[int(np.argmin(t))]]
                c = V[vij[int(np.argmax(t))]]
                length = float(np.linalg.norm(c - a))
                if length < 1e-12:
                    continue
                bases.append(a)
                dirs.append((c - a) / length)
                lens.append(length)
        if not bases:
            return empty
        return np.asarray(bases), np.asarray(dirs), np.asarray(lens)

    @cached_property
    def _edge_lines(self):
        """For d == 3: (base points, unit directions) of facet-pair lines."""
        if self.dim != 3:
            return None
        bases, dirs = [], []
        m = self.n_halfspaces
        for i in range(m):
            for j in range(i + 1, m):
                dv = np.cross(self.A[i], self.A[j])
                nd = np.linalg.norm(dv)
                if nd < 1e-10:
                    continue
                # least-norm point on the intersection of the two planes
                M = np.vstack([self.A[i], self.A[j]])
                p, *_ = np.linalg.lstsq(M, np.array([self.b[i], self.b[j]]),
                                        rcond=None)
                bases.append(p)
                dirs.append(dv / nd)
        if not bases:
            return np.zeros((0, 3)), np.zeros((0, 3))
        return np.asarray(bases), np.asarray(dirs)


def _chebyshev_center(A, b, R):
    """Point maximizing the minimum halfspace slack, within the R-box."""
    d = A.shape[1]
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-A, np.ones((A.shape[0], 1))])
    res = linprog(c, A_ub=A_ub, b_ub=-b,
                  bounds=[(-R, R)] * d + [(None, None)], method="highs")
    if not res.success:
        raise LPInfeasible("polytope witness LP failed: " + res.message)
    return res.x[:d], float(res.x[-1])


def _enumerate_vertices(A, b, d, feas_tol=1e-7):
    m = A.shape[0]
    if d == 2:
        idx = [(i, j) for i in range(m) for j in range(i + 1, m)]
    else:
        idx = [(i, j, k) for i in range(m) for j in range(i + 1, m)
               for k in range(j + 1, m)]
    if not idx:
        return np.zeros((0, d))
    idx = np.asarray(idx)
    M = A[idx]                      # (n, d, d)
    rhs = b[idx]                    # (n, d)
    dets = np.abs(np.linalg.det(M))
    ok = dets > 1e-12
    pts = np.full((len(idx), d), np.nan)
    if np.any(ok):
        pts[ok] = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
    feas = ok & ((pts @ A.T - b).min(axis=1) >= -feas_tol)
    pts = pts[feas]
    if len(pts) == 0:
        return pts
    # dedup
    order = np.lexsort(pts.T)
    pts = pts[order]
    keep = np.ones(len(pts), dtype=bool)
    keep[1:] = np.linalg.norm(np.diff(pts, axis=0), axis=1) > 1e-9
    return pts[keep]


def _lp_support(K, u, tol=1e-8):
    res = linprog(-np.asarray(u, dtype=float), A_ub=-K.A, b_ub=-K.b,
                  bounds=[(-K.bounding_radius, K.bounding_radius)] * K.dim,
                  method="highs",
                  options={"primal_feasibility_tolerance": tol,
                           "dual_feasibility_tolerance": tol})
    if res.status == 3:
        raise NonConvergence("support LP unbounded despite box bound")
    if not res.success:
        raise LPInfeasible("support LP failed: " + res.message)
    return -res.fun


def width(K, u):
    """max - min of <u, x> over K. Exact via vertices at d <= 3, LPs otherwise."""
    if K.frozen:
        return 0.0
    u = _unit(u)
    V = K.vertices
    if V is not None and len(V):
        proj = V @ u
        return float(proj.max() - proj.min())
    return float(_lp_support(K, u) + _lp_support(K, -u))


def support_point(K, u):
    """A point of K attaining max <u, x>."""
    u = _unit(u)
    V = K.vertices
    if V is not None and len(V):
        return V[int(np.argmax(V @ u))]
    res = linprog(-u, A_ub=-K.A, b_ub=-K.b,
                  bounds=[(-K.bounding_radius, K.bounding_radius)] * K.dim,
                  method="highs")
    if not res.success:
        raise LPInfeasible(res.message)
    return res.x


# -- distance / projection -------------------------------------------------


def _dist_batch(K, X):
    """Euclidean distances from the rows of X to K (exact for d <= 3)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    slacks = X @ K.A.T - K.b
    dist = np.zeros(len(X))
    outside = slacks.min(axis=1) < 0
    if not np.any(outside):
        return dist
    if K.dim <= 3:
        dist[outside] = _dist_exact(K, X[outside], slacks[outside])
    else:
        P = _dykstra_batch(K, X[outside])
        dist[outside] = np.linalg.norm(X[outside] - P, axis=1)
    return dist


def _dist_exact_2d(K, X, slacks, feas_tol=1e-9):
    # facet-line projections, only for facets somebody violates:
    # P[n, i] = x - s_i a_i
    viol = slacks < 0
    cols = np.flatnonzero(viol.any(axis=0))
    S = slacks[:, cols]
    P = X[:, None, :] - S[:, :, None] * K.A[None, cols, :]
    feas = (np.einsum("nid,md->nim", P, K.A) - K.b[None, None, :]) \
        .min(axis=2) >= -feas_tol
    cand = np.where(feas & viol[:, cols], -S, np.inf).min(axis=1)
    V = K.vertices
    if V is not None and len(V):
        D = X[:, None, :] - V[None, :, :]
        dd = np.sqrt(np.einsum("nvd,nvd->nv", D, D)).min(axis=1)
        cand = np.minimum(cand, dd)
    if not np.all(np.isfinite(cand)):
        raise NonConvergence("no feasible projection candidate found")
    return cand


def _dist_exact_3d(K, X, slacks, feas_tol=1e-9):
    # facet-plane projections (only facets somebody violates), feasibility
    # checked against all halfspaces in one einsum
    viol = slacks < 0
    cols = np.flatnonzero(viol.any(axis=0))
    S = slacks[:, cols]
    P = X[:, None, :] - S[:, :, None] * K.A[None, cols, :]
    feas = (np.einsum("nid,md->nim", P, K.A) - K.b[None, None, :]) \
        .min(axis=2) >= -feas_tol
    cand = np.where(feas & viol[:, cols], -S, np.inf).min(axis=1)
    seg = K._edge_segments_3d
    if seg is not None and len(seg[0]):
        B0, D, L = seg
        # distance to each edge segment, parameter clamped to [0, L]; the
        # clamped endpoints make separate vertex candidates unnecessary
        t = np.clip(X @ D.T - np.einsum("ed,ed->e", B0, D)[None, :],
                    0.0, L[None, :])
        diff = X[:, None, :] - B0[None, :, :] - t[:, :, None] * D[None, :, :]
        d2 = np.einsum("ned,ned->ne", diff, diff).min(axis=1)
        cand = np.minimum(cand, np.sqrt(d2))
    else:
        V = K.vertices
        if V is not None and len(V):
            D2 = X[:, None, :] - V[None, :, :]
            cand = np.minimum(
                cand, np.sqrt(np.einsum("nvd,nvd->nv", D2, D2)).min(axis=1))
    if not np.all(np.isfinite(cand)):
        raise NonConvergence("no feasible projection candidate found")
    return cand


def _dist_exact(K, X, slacks, feas_tol=1e-9, chunk=8192):
    fn = _dist_exact_2d if K.dim == 2 else _dist_exact_3d
    n = len(X)
    if n <= chunk:
        return fn(K, X, slacks, feas_tol)
    out = np.empty(n)
    for lo in range(0, n, chunk):
        sl = slice(lo, lo + chunk)
        out[sl] = fn(K, X[sl], slacks[sl], feas_tol)
    return out


def _dykstra_batch(K, X, tol=DEFAULT_PROJECT_TOL, cap_factor=10):
    """Dykstra alternating projection onto the halfspace intersection."""
    m = K.n_halfspaces
    cap = cap_factor * K.dim * m
    Y = X.copy()
    corr = np.zeros((m,) + X.shape)
    sweeps = max(1, cap // m)
    for sweep in range(sweeps):
        for i in range(m):
            Z = Y + corr[i]
            s = Z @ K.A[i] - K.b[i]
            Ynew = Z - np.minimum(s, 0.0)[:, None] * K.A[i]
            corr[i] = Z - Ynew
            Y = Ynew
        if (Y @ K.A.T - K.b).min() >= -tol:
            # keep iterating a couple sweeps for projection accuracy
            if sweep >= 2:
                break
    bad = np.flatnonzero((Y @ K.A.T - K.b).min(axis=1) < -tol)
    # thin (nearly degenerate) sets can stall Dykstra; refine the few
    # stragglers with an exact quadratic projection
    for i in bad:
        Y[i] = _project_qp(K, X[i], tol)
    return Y


def _project_qp(K, x, tol):
    """min |y - x|^2 over K via SLSQP; exact fallback projection."""
    cons = {"type": "ineq",
            "fun": lambda y: y @ K.A.T - K.b,
            "jac": lambda y: K.A}
    res = minimize(
        lambda y: 0.5 * float((y - x) @ (y - x)), K.witness,
        jac=lambda y: y - x, method="SLSQP", constraints=[cons],
        options={"maxiter": 200, "ftol": 1e-12})
    y = res.x
    if (y @ K.A.T - K.b).min() < -10 * tol:
        raise NonConvergence("projection did not reach tolerance")
    return y


def project(K, x, tol=DEFAULT_PROJECT_TOL):
    """Closest point of K to x, within tol; returns x when already inside."""
    x = np.asarray(x, dtype=float)
    if K.contains(x, tol=tol):
        return x
    if K.dim <= 3:
        # exact projection: best candidate among facet/edge/vertex projections
        slacks = (x @ K.A.T - K.b)[None, :]
        best_p, best_d = None, np.inf
        for i in range(K.n_halfspaces):
            s = slacks[0, i]
            if s >= 0:
                continue
            p = x - s * K.A[i]
            if K.contains(p, tol=1e-9) and -s < best_d:
                best_p, best_d = p, -s
        if K.dim == 3:
            bases, dirs = K._edge_lines
            for p0, dv in zip(bases, dirs):
                p = p0 + ((x - p0) @ dv) * dv
                if K.contains(p, tol=1e-9):
                    d = np.linalg.norm(x - p)
                    if d < best_d:
                        best_p, best_d = p, d
        V = K.vertices
        if V is not None and len(V):
            dd = np.linalg.norm(V - x, axis=1)
            i = int(np.argmin(dd))
            if dd[i] < best_d:
                best_p, best_d = V[i], dd[i]
        if best_p is None:
            raise NonConvergence("projection candidates exhausted")
        return best_p
    return _dykstra_batch(K, x[None, :], tol=tol)[0]


def _member_dilated_2d(K, r, Q, tol):
    """Vectorized membership in K + rB for d == 2.

    The dilation decomposes exactly as K, plus one outward rectangle per
    edge, plus one radius-r ball per vertex; each piece is a closed-form
    test, so no distances are computed.
    """
    slack = Q @ K.A.T - K.b
    member = slack.min(axis=1) >= -tol
    seg = K._edge_segments
    V = K.vertices
    if seg is not None and V is not None and len(V):
        E, t_lo, t_hi = seg
        t = Q @ E.T
        rect = ((slack >= -r - tol) & (slack <= tol)
                & (t >= t_lo - tol) & (t <= t_hi + tol))
        member |= rect.any(axis=1)
        q2 = np.einsum("nd,nd->n", Q, Q)
        d2 = q2[:, None] + np.einsum("vd,vd->v", V, V)[None, :] - 2.0 * (Q @ V.T)
        member |= d2.min(axis=1) <= (r + tol) ** 2
        return member
    return _dist_batch(K, Q) <= r + tol


def member_dilated(K, r, x, tol=DEFAULT_PROJECT_TOL):
    """True iff x lies in the Minkowski dilation K + rB (within tol)."""
    if r < 0:
        raise ValueError("dilation radius must be nonnegative")
    x = np.asarray(x, dtype=float)
    return bool(_dist_batch(K, x[None, :])[0] <= r + tol)


def member_dilated_batch(K, r, X, tol=DEFAULT_PROJECT_TOL):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if K.dim == 2 and not K.frozen:
        return _member_dilated_2d(K, r, X, tol)
    return _dist_batch(K, X) <= r + tol


# -- uniform sampling of K + rB -------------------------------------------


def _chord_r0(K, X, Theta):
    """Exact chord [lo, hi] of the line x + t*theta inside K, per row."""
    denom = Theta @ K.A.T             # (n, m)
    numer = K.b - X @ K.A.T           # (n, m); need t*denom >= numer
    pos = denom > 1e-14
    neg = denom < -1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = numer / denom
    lo = np.max(np.where(pos, ratios, -np.inf), axis=1)
    hi = np.min(np.where(neg, ratios, np.inf), axis=1)
    R = 4 * K.bounding_radius
    return np.clip(lo, -R, R), np.clip(hi, -R, R)


def _chord_dilated(K, r, X, Theta, tol):
    """Chord [lo, hi] of x + t*theta inside K + rB (0 always in the chord).

    The boundary of the dilation consists of offset facet pieces, edge
    cylinder pieces (d = 3), and vertex sphere pieces; the ray's crossing of
    each is closed-form, so for d <= 3 the candidate set is exhaustive. For
    higher dimensions an unresolved exit falls back to a short bisection.
    """
    if r == 0.0:
        return _chord_r0(K, X, Theta)
    # outer interval from halfspaces relaxed by r (superset of K + rB)
    denom = Theta @ K.A.T
    numer = (K.b - r) - X @ K.A.T
    pos = denom > 1e-14
    neg = denom < -1e-14
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = numer / denom
    lo_out = np.max(np.where(pos, ratios, -np.inf), axis=1)
    hi_out = np.min(np.where(neg, ratios, np.inf), axis=1)
    Rbig = 2 * (K.bounding_radius + r)
    lo_out = np.clip(lo_out, -Rbig, 0.0)
    hi_out = np.clip(hi_out, 0.0, Rbig)

    n = len(X)
    # feasible inner bounds: chord within K itself ...
    lo_in, hi_in = _chord_r0(K, X, Theta)
    valid = lo_in <= hi_in            # chain state may sit in the shell
    lo_in = np.where(valid, np.minimum(lo_in, 0.0), 0.0)
    hi_in = np.where(valid, np.maximum(hi_in, 0.0), 0.0)
    # ... and within every vertex ball (any point within r of a vertex is in)
    V = K.vertices
    if V is not None and len(V):
        # quadratic per vertex ball: |x + t theta - v|^2 = r^2
        bq = np.einsum("nd,nd->n", Theta, X)[:, None] - Theta @ V.T
        cq = (np.einsum("nd,nd->n", X, X)[:, None]
              + np.einsum("vd,vd->v", V, V)[None, :]
              - 2.0 * (X @ V.T) - r * r)
        disc = bq * bq - cq
        ok = disc >= 0.0
        root = np.sqrt(np.maximum(disc, 0.0))
        hi_in = np.maximum(hi_in, np.max(np.where(ok, -bq + root, -np.inf),
                                         axis=1))
        lo_in = np.minimum(lo_in, np.min(np.where(ok, -bq - root, np.inf),
                                         axis=1))
    # ... and within every edge cylinder (d == 3): quadratic roots for the
    # infinite cylinder, clipped to the t-range whose axis projection stays
    # on the edge segment
    seg = K._edge_segments_3d if K.dim == 3 else None
    if seg is not None and len(seg[0]):
        B0, D, L = seg
        thD = Theta @ D.T                              # (n, e)
        W = X[:, None, :] - B0[None, :, :]             # (n, e, d)
        wD = np.einsum("ned,ed->ne", W, D)
        aq = np.maximum(1.0 - thD ** 2, 0.0)           # |theta_perp|^2
        bq = np.einsum("ned,nd->ne", W, Theta) - wD * thD
        cq = np.einsum("ned,ned->ne", W, W) - wD ** 2 - r * r
        para = aq <= 1e-12
        disc = bq * bq - aq * cq
        ok = disc >= 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            root = np.sqrt(np.maximum(disc, 0.0))
            t1 = np.where(ok & ~para, (-bq - root) / aq, np.inf)
            t2 = np.where(ok & ~para, (-bq + root) / aq, -np.inf)
        inside_para = para & (cq <= 0.0)
        t1 = np.where(inside_para, -np.inf, t1)
        t2 = np.where(inside_para, np.inf, t2)
        # axis-projection window: 0 <= wD + t thD <= L
        with np.errstate(divide="ignore", invalid="ignore"):
            sA = -wD / thD
            sB = (L[None, :] - wD) / thD
        s_lo = np.where(thD > 1e-14, sA, np.where(thD < -1e-14, sB, -np.inf))
        s_hi = np.where(thD > 1e-14, sB, np.where(thD < -1e-14, sA, np.inf))
        perp = np.abs(thD) <= 1e-14
        on_seg = (wD >= 0.0) & (wD <= L[None, :])
        bad = perp & ~on_seg
        tA = np.maximum(t1, s_lo)
        tB = np.minimum(t2, s_hi)
        nonempty = (tA <= tB) & ~bad
        hi_in = np.maximum(hi_in, np.max(np.where(nonempty, tB, -np.inf),
                                         axis=1))
        lo_in = np.minimum(lo_in, np.min(np.where(nonempty, tA, np.inf),
                                         axis=1))
    hi_in = np.minimum(hi_in, hi_out)
    lo_in = np.maximum(lo_in, lo_out)

    def resolve(t_out, t_in, sign):
        pts = X + t_out[:, None] * Theta
        if K.dim == 2:
            member = _member_dilated_2d(K, r, pts, tol)
        else:
            member = _dist_batch(K, pts) <= r + tol
        t = np.where(member, t_out, t_in)
        if K.dim > 3:
            # possible exit on an edge cylinder between t_in and t_out
            active = ~member & (np.abs(t_out - t_in) > tol)
            a_in = t_in.copy()
            a_out = t_out.copy()
            for _ in range(12):
                if not np.any(active):
                    break
                mid = 0.5 * (a_in + a_out)
                ok = _dist_batch(K, X[active] + mid[active, None]
                                 * Theta[active]) <= r + tol
                idx = np.flatnonzero(active)
                a_in[idx[ok]] = mid[idx[ok]]
                a_out[idx[~ok]] = mid[idx[~ok]]
                active = active & (np.abs(a_out - a_in) > tol)
            t = np.where(member, t_out, a_in)
        return t

    hi = resolve(hi_out, hi_in, +1)
    lo = resolve(lo_out, lo_in, -1)
    return lo, hi


def _member_dilated_shell(K, r, Q, tol):
    """Membership in K + rB for points of the relaxed polytope {Ax >= b - r}.

    Most shell points project onto a single facet: when x - s a_max (s the
    worst violation) lands inside K the distance is exactly s <= r. Only the
    remaining edge/corner-region points need a full projection.
    """
    slacks = Q @ K.A.T - K.b
    member = slacks.min(axis=1) >= -tol
    pending = np.flatnonzero(~member)
    if len(pending):
        i_max = np.argmin(slacks[pending], axis=1)
        s = -slacks[pending, i_max]
        P = Q[pending] + s[:, None] * K.A[i_max]
        on_facet = ((P @ K.A.T - K.b).min(axis=1) >= -tol) & (s <= r + tol)
        member[pending[on_facet]] = True
        pending = pending[~on_facet]
    if len(pending):
        # greedy most-violated-facet projections reach a feasible point whose
        # distance upper-bounds the true one; accept what it certifies
        Y = Q[pending].copy()
        for _ in range(12):
            sl = Y @ K.A.T - K.b
            i_max = np.argmin(sl, axis=1)
            s = sl[np.arange(len(Y)), i_max]
            if s.min() >= -tol:
                break
            Y -= np.minimum(s, 0.0)[:, None] * K.A[i_max]
        feasible = (Y @ K.A.T - K.b).min(axis=1) >= -tol
        close = np.linalg.norm(Q[pending] - Y, axis=1) <= r + tol
        member[pending[feasible & close]] = True
        pending = pending[~(feasible & close)]
    if len(pending):
        # fixed-budget Dykstra toward the true projection, then a greedy
        # feasibility finish: yields a feasible point whose distance decides
        # membership (decisions are approximate within the remaining
        # projection gap, which only affects a thin corner-boundary band)
        Xp = Q[pending]
        Y = Xp.copy()
        corr = np.zeros((K.n_halfspaces,) + Xp.shape)
        for _ in range(25):
            for i in range(K.n_halfspaces):
                Z = Y + corr[i]
                s = Z @ K.A[i] - K.b[i]
                Ynew = Z - np.minimum(s, 0.0)[:, None] * K.A[i]
                corr[i] = Z - Ynew
                Y = Ynew
            if (Y @ K.A.T - K.b).min() >= -tol:
                break
        for _ in range(20):
            sl = Y @ K.A.T - K.b
            i_max = np.argmin(sl, axis=1)
            s = sl[np.arange(len(Y)), i_max]
            if s.min() >= -tol:
                break
            Y -= np.minimum(s, 0.0)[:, None] * K.A[i_max]
        member[pending] = np.linalg.norm(Xp - Y, axis=1) <= r + tol
    return member


def _sample_dilated_reject(K, r, n, gen, tol, init, burn_in, thinning,
                           chains):
    """Dilation sampler for d > 3: hit-and-run in the relaxed polytope
    {Ax >= b - r} (a superset of K + rB since the normals are unit), keeping
    thinned points that land inside the dilation. Avoids per-step distance
    computations, which dominate the direct chord approach at d > 3.
    """
    d = K.dim
    relaxed = Polytope(K.A, K.b - r, K.bounding_radius + r,
                       witness=K.witness)
    C = min(n, _HIT_AND_RUN_CHAINS if chains is None else chains)
    if init is not None and len(init) > 0:
        init = np.atleast_2d(np.asarray(init, dtype=float))
        init = init[(init @ K.A.T - (K.b - r)).min(axis=1) >= -tol]
    if init is not None and len(init) > 0:
        take = gen.integers(0, len(init), size=C)
        X = init[take].copy()
        burn = _WARM_BURN_IN if burn_in is None else burn_in
    else:
        X = np.tile(K.witness, (C, 1))
        burn = 50 * d if burn_in is None else burn_in
    thin = d if thinning is None else thinning
    max_steps = burn + 40 * thin * (-(-n // C))   # tolerates >= 5% acceptance
    out = []
    collected = 0
    for step in range(max_steps):
        Theta = gen.standard_normal((C, d))
        Theta /= np.linalg.norm(Theta, axis=1, keepdims=True)
        lo, hi = _chord_r0(relaxed, X, Theta)
        span = hi - lo
        t = lo + span * gen.random(C)
        ok = span > 1e-13
        X = np.where(ok[:, None], X + t[:, None] * Theta, X)
        if step >= burn and (step - burn + 1) % thin == 0:
            keep = _member_dilated_shell(K, r, X, tol)
            if np.any(keep):
                out.append(X[keep].copy())
                collected += int(keep.sum())
                if collected >= n:
                    break
    if collected < n:
        raise NonConvergence(
            f"dilation rejection sampler collected {collected}/{n} points")
    return np.concatenate(out, axis=0)[:n]


def sample_dilated(K, r, n, rng, tol=DEFAULT_PROJECT_TOL, init=None,
                   burn_in=None, thinning=None, chains=None):
    """n approximately uniform points of K + rB via parallel hit-and-run.

    Runs min(n, 64) chains by default (override with ``chains`` when the
    per-step Python overhead matters more than chain independence). Fresh
    chains start from the interior witness with burn-in 50 d and thinning d;
    passing ``init`` (points already inside K + rB, e.g. the previous round's
    samples) warm-starts the chains with a short re-burn instead.
    """
    if n < 1:
        raise ValueError("need n >= 1 samples")
    if r < 0:
        raise ValueError("dilation radius must be nonnegative")
    d = K.dim
    gen = rng.generator()
    if K.frozen:
        return np.tile(K.witness, (n, 1))
    if d > 3 and r > 0.0:
        return _sample_dilated_reject(K, r, n, gen, tol, init, burn_in,
                                      thinning, chains)
    C = min(n, _HIT_AND_RUN_CHAINS if chains is None else chains)
    if init is not None and len(init) > 0:
        init = np.atleast_2d(np.asarray(init, dtype=float))
        init = init[member_dilated_batch(K, r, init, tol=tol)]
    if init is not None and len(init) > 0:
        take = gen.integers(0, len(init), size=C)
        X = init[take].copy()
        burn = _WARM_BURN_IN if burn_in is None else burn_in
    else:
        X = np.tile(K.witness, (C, 1))
        burn = 50 * d if burn_in is None else burn_in
    thin = d if thinning is None else thinning
    rounds = -(-n // C)  # ceil
    out = []
    total_steps = burn + thin * rounds
    collected = 0
    for step in range(total_steps):
        Theta = gen.standard_normal((C, d))
        Theta /= np.linalg.norm(Theta, axis=1, keepdims=True)
        lo, hi = _chord_dilated(K, r, X, Theta, tol)
        span = hi - lo
        t = lo + span * gen.random(C)
        ok = span > 1e-13
        X = np.where(ok[:, None], X + t[:, None] * Theta, X)
        if step >= burn and (step - burn + 1) % thin == 0:
            out.append(X.copy())
            collected += C
            if collected >= n:
                break
    samples = np.concatenate(out, axis=0)[:n]
    return samples


@dataclass(frozen=True)
class CentroidEstimate:
    """Monte Carlo estimate of cg(K + rB) with per-coordinate standard errors."""

    point: np.ndarray
    se: np.ndarray
    n: int

    def se_along(self, u):
        """Standard error of the estimate projected on a unit direction."""
        return float(np.sqrt(np.sum((self.se * np.asarray(u)) ** 2)))


def centroid_se(samples, chains):
    """Standard error of the sample mean, honest for chained samples.

    Hit-and-run output is autocorrelated along each chain, so the iid
    formula understates the error; when the samples interleave ``chains``
    independent chains (the layout sample_dilated produces), the standard
    error of the mean of per-chain means is used instead.
    """
    n = len(samples)
    if n < 2:
        return np.zeros(samples.shape[1])
    C = min(n, chains)
    rounds = n // C
    if C >= 2 and rounds >= 1:
        chain_means = samples[:rounds * C].reshape(rounds, C, -1).mean(axis=0)
        return chain_means.std(axis=0, ddof=1) / np.sqrt(C)
    return samples.std(axis=0, ddof=1) / np.sqrt(n)


def centroid_dilated(K, r, n, rng, tol=DEFAULT_PROJECT_TOL, init=None,
                     chains=None, burn_in=None, return_samples=False):
    """Sample-mean estimate of cg(K + rB); deterministic given rng."""
    samples = sample_dilated(K, r, n, rng, tol=tol, init=init, chains=chains,
                             burn_in=burn_in)
    mean = samples.mean(axis=0)
    C = _HIT_AND_RUN_CHAINS if chains is None else chains
    se = centroid_se(samples, C)
    est = CentroidEstimate(point=mean, se=se, n=len(samples))
    if return_samples:
        return est, samples
    return est


@dataclass(frozen=True)
class VolumeEstimate:
    """Rejection-sampling estimate of Vol(K + rB)."""

    value: float
    se: float
    rel_se: float
    n: int
    hits: int


def volume_dilated(K, r, n, rng, tol=DEFAULT_PROJECT_TOL):
    """Vol(K + rB) by rejection over the box [-(R + r), R + r]^d; d <= 4 only."""
    if K.dim > 4:
        raise DimensionTooLarge("volume oracle is desk-scale only (d <= 4)")
    if n < 1:
        raise ValueError("need n >= 1 samples")
    gen = rng.generator()
    half = K.bounding_radius + r
    box_vol = (2.0 * half) ** K.dim
    hits = 0
    done = 0
    chunk = 65536
    while done < n:
        take = min(chunk, n - done)
        X = gen.uniform(-half, half, size=(take, K.dim))
        hits += int(np.count_nonzero(member_dilated_batch(K, r, X, tol=tol)))
        done += take
    p = hits / n
    value = p * box_vol
    se = box_vol * np.sqrt(max(p * (1.0 - p), 1.0 / n) / n)
    rel_se = se / value if value > 0 else np.inf
    return VolumeEstimate(value=value, se=se, rel_se=rel_se, n=n, hits=hits)


# -- maximum-volume inscribed ellipsoid ------------------------------------


def _mvie_solve(A, b, d):
    """Inner maximum-volume-inscribed-ellipsoid solve in preconditioned
    coordinates; rows of A are unit normals of {Az >= b}. Returns (c, L)
    with the ellipsoid {c + Lu : ||u|| <= 1}, or None on failure."""
    m = A.shape[0]
    tril_i, tril_j = np.tril_indices(d)
    diag_mask = tril_i == tril_j
    n_l = len(tril_i)

    z0, s0 = _chebyshev_center(A, b, np.sqrt(d) * 2.0)
    s0 = max(s0, 1e-9)

    def unpack(theta):
        c = theta[:d]
        L = np.zeros((d, d))
        L[tril_i, tril_j] = theta[d:]
        return c, L

    def fun(theta):
        return -np.sum(np.log(theta[d:][diag_mask]))

    def grad(theta):
        g = np.zeros_like(theta)
        gl = np.zeros(n_l)
        gl[diag_mask] = -1.0 / theta[d:][diag_mask]
        g[d:] = gl
        return g

    def cons_f(theta):
        c, L = unpack(theta)
        S = A @ L                     # rows: a_i^T L
        return A @ c - b - np.linalg.norm(S, axis=1)

    def cons_jac(theta):
        c, L = unpack(theta)
        S = A @ L
        nrm = np.maximum(np.linalg.norm(S, axis=1), 1e-14)
        J = np.zeros((m, d + n_l))
        J[:, :d] = A
        # d/dL_{jk} of -||L^T a|| = -a_j (L^T a)_k / ||L^T a||
        J[:, d:] = -(A[:, tril_i] * S[:, tril_j]) / nrm[:, None]
        return J

    theta0 = np.concatenate([z0, np.zeros(n_l)])
    theta0[d:][diag_mask] = 0.9 * s0
    lb = np.full(d + n_l, -np.inf)
    lb[d:][diag_mask] = 1e-12
    bounds = list(zip(lb, np.full(d + n_l, np.inf)))
    best = None
    for attempt, shrink in enumerate([1.0, 0.3, 0.05]):
        t0 = theta0.copy()
        t0[d:][diag_mask] = 0.9 * s0 * shrink
        res = minimize(fun, t0, jac=grad, method="SLSQP", bounds=bounds,
                       constraints=[{"type": "ineq", "fun": cons_f,
                                     "jac": cons_jac}],
                       options={"maxiter": 300, "ftol": 1e-12})
        if res.success and np.min(cons_f(res.x)) >= -1e-7:
            best = res
            break
    if best is None:
        return None
    return unpack(best.x)


def _pca_frame(P):
    """Affine frame (mid, M) aligned with the principal axes of a point
    cloud, so that x = mid + M z maps the unit box onto the cloud's
    oriented bounding box."""
    mid = P.mean(axis=0)
    C = P - mid
    _, _, Vt = np.linalg.svd(C, full_matrices=True)
    ext = np.maximum(np.max(np.abs(C @ Vt.T), axis=0), 1e-12)
    return mid, Vt.T * ext[None, :]


def john_ellipsoid(K, eps=1e-6):
    """(1 + eps)-approximate maximum-volume inscribed ellipsoid of K.

    Downstream code relies on K being contained in the d(1+eps)-dilation of
    the result about its center. Solved as a smooth convex program over the
    center and a lower-triangular factor. The solve is preconditioned by the
    axis-aligned tight box; if that fails (thin sets at an angle to the
    axes), it is retried in a frame aligned with the set's principal axes.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    d = K.dim
    if K.frozen:
        tiny = FEASIBILITY_SLACK
        return Ellipsoid(center=K.witness.copy(), shape=np.eye(d) * tiny**2)
    lows, highs = K.tight_box
    if float(np.max(highs - lows)) < 1e-6:
        # Near-degenerate set: the LP tolerances swamp the geometry, so a
        # ball at the deepest interior point is the honest answer.
        c, s = _chebyshev_center(K.A, K.b, K.bounding_radius)
        s = max(s, FEASIBILITY_SLACK)
        return Ellipsoid(center=c, shape=np.eye(d) * s**2)

    def frames():
        scale = np.maximum((highs - lows) / 2.0, 1e-12)
        yield (lows + highs) / 2.0, np.diag(scale)
        V = K.vertices
        if V is not None and len(V) > d:
            P = V
        else:
            P = sample_dilated(K, 0.0, max(64, 8 * d),
                               RngStream(0, 0), chains=8)
        yield _pca_frame(P)

    for mid, M in frames():
        # x = mid + M z maps the unit box of the frame onto the set's scale
        A = K.A @ M
        b = K.b - K.A @ mid
        norms = np.linalg.norm(A, axis=1)
        ok = norms > 1e-14
        sol = _mvie_solve(A[ok] / norms[ok, None], b[ok] / norms[ok], d)
        if sol is None:
            continue
        c, L = sol
        Bmat = M @ L
        center = mid + M @ c
        shape = Bmat @ Bmat.T
        shape = 0.5 * (shape + shape.T)
        if np.linalg.eigvalsh(shape).min() > 0:
            return Ellipsoid(center=center, shape=shape)
    raise NonConvergence("inscribed ellipsoid solve failed")


# -- curvature path --------------------------------------------------------


@dataclass(frozen=True)
class CurvatureDiscretization:
    """Equal-arc-length discretization of the path r -> cg(K + rB).

    Points p_0..p_k lie in the source polytope (within containment tolerance);
    radii are the matching dilation parameters, strictly increasing from 0.
    ``transformed_length`` is the arc length of the traced polyline after the
    inscribed-ellipsoid whitening map (the quantity bounded by 4 d^3).
    """

    points: np.ndarray
    radii: np.ndarray
    source_dim: int
    pieces: int
    transformed_length: float
    traced: np.ndarray = field(repr=False, default=None)
    traced_radii: np.ndarray = field(repr=False, default=None)


def dilation_radius_grid(K, n_radii=40, r_min=1e-3, r_max=None):
    """{0} plus a geometric grid of dilation radii up to 8 R."""
    if r_max is None:
        r_max = 8.0 * K.bounding_radius
    grid = np.geomspace(r_min, r_max, n_radii - 1)
    return np.concatenate([[0.0], grid])


def discretize_curvature_path(K, k, n_per_point, rng, n_radii=40,
                              r_min=1e-3, r_max=None, budget_scale_cap=50.0,
                              chains=None):
    """Trace cg(K + rB) on a geometric radius grid and resample k+1 points.

    The polyline of Monte Carlo centroids is mapped through the whitening
    transform of the inscribed ellipsoid, reparametrized by arc length there,
    and emitted at k+1 equally spaced arc lengths (in original coordinates).

    The per-radius sample count grows like (1 + r/R)^2 (capped) so the
    centroid standard error stays on the scale of K rather than of K + rB.
    """
    if k < 1:
        raise ValueError("need k >= 1 pieces")
    d = K.dim
    if K.frozen:
        pts = np.tile(K.witness, (k + 1, 1))
        radii = np.linspace(0.0, 8.0 * K.bounding_radius, k + 1)
        radii[0] = 0.0
        return CurvatureDiscretization(points=pts, radii=radii, source_dim=d,
                                       pieces=k, transformed_length=0.0,
                                       traced=pts, traced_radii=radii)
    grid = dilation_radius_grid(K, n_radii=n_radii, r_min=r_min, r_max=r_max)
    centroids = np.empty((len(grid), d))
    prev = None
    for i, r in enumerate(grid):
        n_r = int(n_per_point
                  * min((1.0 + r / K.bounding_radius) ** 2, budget_scale_cap))
        # warm-start each radius from the previous radius' samples; those lie
        # in K + r_{i-1} B which is inside K + r_i B, so they are valid states
        samples = sample_dilated(K, float(r), n_r, rng.child(i), init=prev,
                                 chains=chains)
        centroids[i] = samples.mean(axis=0)
        prev = samples
    # clamp traced centroids into K (MC noise can leave it slightly)
    dists = _dist_batch(K, centroids)
    for i in np.flatnonzero(dists > 1e-12):
        centroids[i] = project(K, centroids[i])

    E = john_ellipsoid(K)
    W = E.whitening()
    transformed = centroids @ W.T
    seg = np.linalg.norm(np.diff(transformed, axis=0), axis=1)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = float(cum[-1])
    targets = np.linspace(0.0, total, k + 1)
    if total < 1e-12:
        pts = np.tile(centroids[0], (k + 1, 1))
        radii = np.interp(np.linspace(0, len(grid) - 1, k + 1),
                          np.arange(len(grid)), grid)
    else:
        pts = np.empty((k + 1, d))
        for j in range(d):
            pts[:, j] = np.interp(targets, cum, centroids[:, j])
        radii = np.interp(targets, cum, grid)
    radii = np.maximum.accumulate(radii)
    bump = np.arange(k + 1) * 1e-12
    radii = radii + bump
    radii[0] = 0.0
    dists = _dist_batch(K, pts)
    for i in np.flatnonzero(dists > 1e-12):
        pts[i] = project(K, pts[i])
    return CurvatureDiscretization(points=pts, radii=radii, source_dim=d,
                                   pieces=k, transformed_length=total,
                                   traced=centroids, traced_radii=grid)


def frozen_point(x, bounding_radius):
    """Degenerate (frozen) polytope representing the single point x.

    Downstream consumers treat a frozen set's witness as the whole set, and
    further cuts leave it unchanged.
    """
    x = np.asarray(x, dtype=float)
    e = np.zeros_like(x)
    e[0] = 1.0
    return Polytope(np.vstack([e, -e]), np.array([x[0], -x[0]]),
                    bounding_radius, witness=x, _check=False)


def tightened(K):
    """Same polytope with the bounding radius shrunk to match the tight box.

    A smaller certified radius keeps dilation grids and volume boxes on the
    scale of the current knowledge set as it shrinks.
    """
    if K.dim > 3 or K.frozen:
        return K
    lows, highs = K.tight_box
    R = float(np.linalg.norm(np.maximum(np.abs(lows), np.abs(highs)))) + 1e-12
    if R >= K.bounding_radius:
        return K
    return Polytope(K.A, K.b, R, witness=K.witness, _check=False)


# -- random test bodies ----------------------------------------------------


def random_polytope(d, rng, n_extra=None, min_width=0.15):
    """A random bounded polytope inside the unit box, for desk-scale checks.

    Intersects the unit box with random tangent halfspaces at distances that
    keep a ball of radius ``min_width`` around a random interior point.
    """
    gen = rng.generator()
    if n_extra is None:
        n_extra = 3 * d + gen.integers(0, 2 * d + 1)
    center = gen.uniform(-0.3, 0.3, size=d)
    U = gen.standard_normal((n_extra, d))
    U /= np.linalg.norm(U, axis=1, keepdims=True)
    offsets = U @ center + gen.uniform(min_width, 0.9, size=n_extra)
    eye = np.eye(d)
    A = np.vstack([-U, eye, -eye])
    b = np.concatenate([-offsets, -np.ones(d), -np.ones(d)])
    return Polytope(A, b, float(np.sqrt(d)))
