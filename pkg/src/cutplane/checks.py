"""Monte Carlo property checks for the geometric toolbox.

Each check verifies one inequality the learners rely on — centroid cuts
retain a 1/e volume fraction, slab dilations are thin relative to the body,
near-centroid cuts shrink the dilated volume by a constant factor, the
whitened centroid path is short, and its discretization is pointwise close —
on randomly generated polytopes, with explicit Monte Carlo error bars.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from . import geometry
from .geometry import Polytope
from .rng import RngStream

GRUNBAUM_SLACK = 0.05
VOLUME_REDUCTION_FACTOR = 0.9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    observed: float
    bound: float
    mc_error: float
    detail: str = ""


def _random_unit(gen, d):
    u = gen.standard_normal(d)
    return u / np.linalg.norm(u)


def check_grunbaum(K, rng, n_samples=16384, n_dirs=5) -> List[CheckResult]:
    """Cuts through the (estimated) centroid keep >= 1/e - 0.05 of the volume
    on each side, up to 3 binomial standard errors."""
    X = geometry.sample_dilated(K, 0.0, n_samples, rng.child(0))
    c = X.mean(axis=0)
    gen = rng.child(1).generator()
    out = []
    for j in range(n_dirs):
        u = _random_unit(gen, K.dim)
        frac = float(np.mean((X - c) @ u >= 0.0))
        side = min(frac, 1.0 - frac)
        se = math.sqrt(max(side * (1.0 - side), 1e-12) / n_samples)
        bound = 1.0 / math.e - GRUNBAUM_SLACK - 3.0 * se
        out.append(CheckResult(name="grunbaum", passed=side >= bound,
                               observed=side, bound=bound, mc_error=se))
    return out


def check_conelem(K, rng, mc_budget=100_000, slab_frac=1e-2) -> CheckResult:
    """Thin-slab surrogate of the slice-dilation bound:
    Vol((K cap slab) + rB) <= (2 r' d / width) Vol(K + rB) with r' = r + slab
    thickness, within 3 combined standard errors."""
    d = K.dim
    gen = rng.child(0).generator()
    u = _random_unit(gen, d)
    w = geometry.width(K, u)
    delta = slab_frac * w
    r = w / (4.0 * d)
    b = float(u @ K.witness)
    slab = K.with_cut(u, b - delta / 2.0).with_cut(-u, -(b + delta / 2.0))
    lhs = geometry.volume_dilated(slab, r, mc_budget, rng.child(1))
    rhs_vol = geometry.volume_dilated(K, r, mc_budget, rng.child(2))
    factor = 2.0 * (r + delta) * d / w
    bound = factor * rhs_vol.value
    err = math.sqrt(lhs.se ** 2 + (factor * rhs_vol.se) ** 2)
    return CheckResult(name="conelem", passed=lhs.value <= bound + 3.0 * err,
                       observed=lhs.value, bound=bound, mc_error=err,
                       detail=f"width={w:.4f} r={r:.4f}")


def check_volume_reduction(K, rng, mc_budget=100_000,
                           n_centroid=8192) -> CheckResult:
    """A cut within b of the dilated centroid, with r, |b| inside the width
    margin, leaves at most a 0.9 fraction of the dilated volume."""
    d = K.dim
    gen = rng.child(0).generator()
    u = _random_unit(gen, d)
    w = geometry.width(K, u)
    margin = w / (16.0 * math.e * d)
    r = 0.9 * margin
    b = float(gen.uniform(-0.8, 0.8)) * margin
    est = geometry.centroid_dilated(K, r, n_centroid, rng.child(1), chains=512)
    # keep side {<u, x - c> >= -b}
    K_plus = K.with_cut(u, float(u @ est.point) - b)
    v_plus = geometry.volume_dilated(K_plus, r, mc_budget, rng.child(2))
    v_full = geometry.volume_dilated(K, r, mc_budget, rng.child(3))
    ratio = v_plus.value / v_full.value
    err = ratio * math.sqrt(v_plus.rel_se ** 2 + v_full.rel_se ** 2)
    bound = VOLUME_REDUCTION_FACTOR + 3.0 * err
    return CheckResult(name="volume_reduction", passed=ratio <= bound,
                       observed=ratio, bound=bound, mc_error=err,
                       detail=f"width={w:.4f} r={r:.4f} b={b:+.4f}")


def check_pathlen(K, rng, k=64, n_per_point=128, n_radii=16,
                  disc=None) -> CheckResult:
    """Whitened arc length of the discretized centroid path is at most 4 d^3."""
    if disc is None:
        disc = geometry.discretize_curvature_path(K, k, n_per_point, rng,
                                                  n_radii=n_radii, chains=512)
    bound = 4.0 * K.dim ** 3
    return CheckResult(name="pathlen", passed=disc.transformed_length <= bound,
                       observed=disc.transformed_length, bound=bound,
                       mc_error=0.0, detail=f"k={k}")


def check_discretization(K, rng, k=64, n_per_point=128, n_radii=16,
                         n_probes=100, n_centroid=512,
                         disc=None) -> List[CheckResult]:
    """For random (r, u) probes, some discretization point is within
    (4 d^3 / k) width(K, u) of the dilated centroid, up to 3 SE."""
    d = K.dim
    if disc is None:
        disc = geometry.discretize_curvature_path(K, k, n_per_point,
                                                  rng.child(0),
                                                  n_radii=n_radii, chains=512)
    gen = rng.child(1).generator()
    r_max = 8.0 * K.bounding_radius
    # log-uniform radii cover the near-body scales where the path bends
    radii = np.exp(gen.uniform(np.log(1e-3), np.log(r_max), size=n_probes))
    dirs = gen.standard_normal((n_probes, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    out = []
    # probes run in increasing-radius order so each centroid chain can be
    # warm-started from the previous probe's samples (dilations are nested
    # and consecutive radii differ little, so a short re-burn suffices)
    prev = None
    for j in np.argsort(radii):
        r, u = float(radii[j]), dirs[j]
        est, prev = geometry.centroid_dilated(K, r, n_centroid,
                                              rng.child(2 + int(j)),
                                              init=prev, chains=512,
                                              burn_in=None if prev is None
                                              else 4,
                                              return_samples=True)
        gaps = np.abs((disc.points - est.point) @ u)
        err = float(np.min(gaps))
        w = geometry.width(K, u)
        se = est.se_along(u)
        bound = (4.0 * d ** 3 / k) * w + 3.0 * se
        out.append(CheckResult(name="discretization", passed=err <= bound,
                               observed=err, bound=bound, mc_error=se,
                               detail=f"r={r:.4f}"))
    return out


LEMMA_NAMES = ("grunbaum", "conelem", "volume_reduction", "pathlen",
               "discretization")


def run_geometry_checks(d, rng, n_polytopes=50, mc_budget=100_000,
                        grunbaum_samples=16384, path_k=64, path_probes=100,
                        progress=None):
    """The full property suite on random polytopes; returns all results."""
    results = []
    for i in range(n_polytopes):
        K = geometry.random_polytope(d, rng.child(10 * i))
        sub = rng.child(10 * i + 1)
        results.extend(check_grunbaum(K, sub.child(0),
                                      n_samples=grunbaum_samples))
        results.append(check_conelem(K, sub.child(1), mc_budget=mc_budget))
        results.append(check_volume_reduction(K, sub.child(2),
                                              mc_budget=mc_budget))
        # one path trace serves both the length and the discretization check
        disc = geometry.discretize_curvature_path(K, path_k, 128,
                                                  sub.child(3), n_radii=16,
                                                  chains=512)
        results.append(check_pathlen(K, sub.child(3), k=path_k, disc=disc))
        results.extend(check_discretization(K, sub.child(4), k=path_k,
                                            n_probes=path_probes, disc=disc))
        if progress is not None:
            progress(i + 1, n_polytopes)
    return results


def summarize_checks(results):
    """Per-lemma (total, failed) counts."""
    summary = {}
    for name in LEMMA_NAMES:
        rs = [r for r in results if r.name == name]
        summary[name] = (len(rs), sum(1 for r in rs if not r.passed))
    return summary
