"""Experiment orchestration: configs, seeded batch runs, and serialization.

A single JSON config describes one experiment — which game, which learner,
which oracle or environment, how many trials. ``run_experiment`` plays the
trials on independent random streams (stream ids 0..trials-1 derived from the
base seed), writes one trace CSV per trial plus a summary JSON, and is fully
deterministic: re-running a config reproduces every output byte for byte.
"""

import hashlib
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from . import contextual, geometry
from .contextual import (
    ACTION_GENERATORS,
    FEEDBACK_POLICIES,
    make_lowerbound_instance,
    run_contextual_game,
    run_list_game,
    run_local_game,
    run_lowerbound_game,
)
from .cutting_plane import LEARNERS, make_learner, run_cutting_plane_game
from .errors import ConfigError
from .oracles import ORACLES, make_oracle
from .rng import RngStream

GAMES = ("cutting_plane", "contextual", "list", "local", "lowerbound")

CSV_HEADER = "round,instant_regret,cum_regret,width_diag"


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one experiment.

    ``list_size`` is k for the list game and H for the local / lower-bound
    games; ``w_star`` fixes the hidden point (drawn per trial when omitted);
    ``mc_budget`` is the per-estimate Monte Carlo sample count handed to
    samplers that take one.
    """

    game: str
    dim: int
    horizon: int
    learner: str
    learner_params: dict = field(default_factory=dict)
    oracle: str = "strong_max_regret"
    oracle_params: dict = field(default_factory=dict)
    environment: str = "uniform_sphere"
    environment_params: dict = field(default_factory=dict)
    feedback: str = "exact_best"
    list_size: Optional[int] = None
    w_star: Optional[list] = None
    trials: int = 1
    base_seed: int = 0
    mc_budget: int = 2048
    output_dir: str = "runs"

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config", "expected a JSON object")
        known = set(cls.__dataclass_fields__)
        for key in raw:
            if key not in known:
                raise ConfigError(key, "unknown config key")
        missing = [k for k in ("game", "dim", "horizon", "learner")
                   if k not in raw]
        if missing:
            raise ConfigError(missing[0], "required key is missing")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", f"cannot read {path}: {exc}") from exc
        return cls.from_dict(raw)

    def validate(self):
        if self.game not in GAMES:
            raise ConfigError("game", f"must be one of {GAMES}")
        for name in ("dim", "horizon", "trials", "mc_budget"):
            val = getattr(self, name)
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(name, "must be an integer")
        if self.dim < 2:
            raise ConfigError("dim", "need dim >= 2")
        if self.horizon < 1:
            raise ConfigError("horizon", "need horizon >= 1")
        if self.trials < 1:
            raise ConfigError("trials", "need trials >= 1")
        if self.mc_budget < 1:
            raise ConfigError("mc_budget", "need mc_budget >= 1")
        if not isinstance(self.base_seed, int) or isinstance(self.base_seed,
                                                             bool):
            raise ConfigError("base_seed", "must be an integer")
        if self.learner not in LEARNERS:
            raise ConfigError("learner",
                              f"unknown learner (have {sorted(LEARNERS)})")
        if self.game == "cutting_plane" and self.oracle not in ORACLES:
            raise ConfigError("oracle",
                              f"unknown oracle (have {sorted(ORACLES)})")
        if self.game in ("contextual", "list", "local") \
                and self.environment not in ACTION_GENERATORS:
            raise ConfigError(
                "environment",
                f"unknown environment (have {sorted(ACTION_GENERATORS)})")
        if self.game == "local" and self.feedback not in FEEDBACK_POLICIES:
            raise ConfigError(
                "feedback",
                f"unknown policy (have {sorted(FEEDBACK_POLICIES)})")
        if self.game == "list":
            if self.list_size is None or self.list_size < 1:
                raise ConfigError("list_size",
                                  "the list game needs list_size >= 1")
        if self.game in ("local", "lowerbound"):
            if self.list_size is None or self.list_size < 2:
                raise ConfigError("list_size",
                                  "local feedback needs list_size >= 2")
        if self.game == "lowerbound" and self.dim < 3:
            raise ConfigError("dim", "the lower-bound instance needs dim >= 3")
        if self.w_star is not None:
            w = np.asarray(self.w_star, dtype=float)
            if w.shape != (self.dim,):
                raise ConfigError("w_star", f"must have length {self.dim}")
            if float(np.linalg.norm(w)) > 1.0 + 1e-9:
                raise ConfigError("w_star", "must lie in the unit ball")
        if not isinstance(self.output_dir, (str, os.PathLike)):
            raise ConfigError("output_dir", "must be a path")

    def canonical(self):
        """JSON-stable dict (output_dir excluded: it does not affect results)."""
        d = asdict(self)
        d.pop("output_dir")
        return d

    def config_hash(self):
        blob = json.dumps(self.canonical(), sort_keys=True,
                          separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass(frozen=True)
class RegretTrace:
    """Per-round (round, instantaneous, cumulative, width diagnostic) rows."""

    per_round: List[tuple]
    config_hash: str
    seed: int
    stream_id: int = 0

    @property
    def rounds(self):
        return np.array([row[0] for row in self.per_round])

    @property
    def instant(self):
        return np.array([row[1] for row in self.per_round])

    @property
    def cumulative(self):
        return np.array([row[2] for row in self.per_round])

    @property
    def final_cum_regret(self):
        return float(self.per_round[-1][2]) if self.per_round else 0.0


def _fmt(x):
    """Decimal (positional) notation with 12 significant digits."""
    if not np.isfinite(x):
        return "nan"
    return np.format_float_positional(float(x), precision=12,
                                      unique=False, fractional=False)


def _knowledge_extent(K):
    if K.frozen:
        return 0.0
    lows, highs = K.tight_box
    return float(np.max(highs - lows))


def _draw_w_star(cfg, rng):
    if cfg.w_star is not None:
        return np.asarray(cfg.w_star, dtype=float)
    gen = rng.generator()
    u = gen.standard_normal(cfg.dim)
    u /= np.linalg.norm(u)
    return 0.8 * gen.random() ** (1.0 / cfg.dim) * u


def _make_action_gen(cfg):
    params = dict(cfg.environment_params)
    if cfg.environment == "uniform_sphere":
        n = params.pop("n_actions", 30)
        return contextual.uniform_sphere_actions(n, cfg.dim)
    if cfg.environment == "vertex_cloud":
        return contextual.vertex_cloud_actions(cfg.dim, **params)
    if cfg.environment == "fixed_catalog":
        if "actions" not in params:
            raise ConfigError("environment_params",
                              "fixed_catalog needs an 'actions' array")
        return contextual.fixed_catalog_actions(
            np.asarray(params["actions"], dtype=float))
    raise ConfigError("environment", "unknown environment")


def _rows_from(instants, widths):
    rows = []
    cum = 0.0
    for t, (inst, wd) in enumerate(zip(instants, widths), start=1):
        cum += float(inst)
        rows.append((t, float(inst), cum, float(wd)))
    return rows


def _run_one_trial(cfg, trial):
    stream = RngStream(cfg.base_seed, trial)
    w_star = _draw_w_star(cfg, stream.child(0))
    game_rng = stream.child(1)
    learner = make_learner(cfg.learner, **cfg.learner_params)
    T = cfg.horizon

    if cfg.game == "cutting_plane":
        oracle = make_oracle(cfg.oracle, **cfg.oracle_params)
        recs = run_cutting_plane_game(learner, oracle, w_star, T, game_rng)
        return _rows_from([r.regret for r in recs],
                          [r.width_along_v for r in recs])
    if cfg.game == "contextual":
        steps = run_contextual_game(learner, _make_action_gen(cfg), w_star, T,
                                    game_rng)
        return _rows_from([s.regret for s in steps],
                          [_knowledge_extent(s.state.knowledge)
                           for s in steps])
    if cfg.game == "list":
        steps = run_list_game(_make_action_gen(cfg), w_star, T,
                              cfg.list_size, cfg.mc_budget // 16 or 1,
                              game_rng, d=cfg.dim)
        return _rows_from([s.loss for s in steps],
                          [_knowledge_extent(s.knowledge) for s in steps])
    if cfg.game == "local":
        steps = run_local_game(
            learner, _make_action_gen(cfg), w_star, T, cfg.list_size,
            game_rng, feedback_policy=FEEDBACK_POLICIES[cfg.feedback])
        return _rows_from([s.regret for s in steps],
                          [_knowledge_extent(s.state.knowledge)
                           for s in steps])
    if cfg.game == "lowerbound":
        instance = make_lowerbound_instance(cfg.dim, stream.child(2))
        steps = run_lowerbound_game(instance, learner, cfg.list_size, T,
                                    game_rng)
        return _rows_from([s.regret for s in steps],
                          [_knowledge_extent(s.state.knowledge)
                           for s in steps])
    raise ConfigError("game", "unknown game")


def trace_to_csv(trace):
    lines = [CSV_HEADER]
    for rnd, inst, cum, wd in trace.per_round:
        lines.append(f"{rnd},{_fmt(inst)},{_fmt(cum)},{_fmt(wd)}")
    return "\n".join(lines) + "\n"


def trace_from_csv(path, config_hash="", seed=0, stream_id=0):
    with open(path) as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {header!r}")
        rows = []
        for line in fh:
            rnd, inst, cum, wd = line.strip().split(",")
            rows.append((int(rnd), float(inst), float(cum), float(wd)))
    return RegretTrace(per_round=rows, config_hash=config_hash, seed=seed,
                       stream_id=stream_id)


def slope_vs_log_round(traces):
    """Least-squares slope of the mean cumulative regret against log t."""
    if not traces:
        return 0.0
    cum = np.mean([t.cumulative for t in traces], axis=0)
    T = len(cum)
    if T < 2:
        return 0.0
    x = np.log(np.arange(1, T + 1))
    coef = np.polyfit(x, cum, 1)
    return float(coef[0])


def summarize(cfg, traces):
    finals = [t.final_cum_regret for t in traces]
    return {
        "mean_cum_regret": float(np.mean(finals)),
        "max_cum_regret": float(np.max(finals)),
        "slope_vs_logT": slope_vs_log_round(traces),
        "config_hash": cfg.config_hash(),
        "trials": cfg.trials,
    }


def run_experiment(cfg, write=True):
    """Run ``cfg.trials`` independent games; optionally write CSVs + summary.

    Trials use stream ids 0..trials-1, so adding trials never perturbs
    earlier ones, and results do not depend on execution order.
    """
    cfg.validate()
    chash = cfg.config_hash()
    traces = []
    for trial in range(cfg.trials):
        rows = _run_one_trial(cfg, trial)
        traces.append(RegretTrace(per_round=rows, config_hash=chash,
                                  seed=cfg.base_seed, stream_id=trial))
    if write:
        os.makedirs(cfg.output_dir, exist_ok=True)
        for trace in traces:
            path = os.path.join(cfg.output_dir,
                                f"trace_{trace.stream_id:03d}.csv")
            with open(path, "w") as fh:
                fh.write(trace_to_csv(trace))
        with open(os.path.join(cfg.output_dir, "summary.json"), "w") as fh:
            json.dump(summarize(cfg, traces), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return traces


def run_sweep(cfg, param, values, write=True):
    """Re-run the experiment with ``param`` set to each value in turn."""
    alias = {"T": "horizon", "d": "dim", "H": "list_size", "k": "list_size"}
    name = alias.get(param, param)
    if name not in ExperimentConfig.__dataclass_fields__:
        raise ConfigError(param, "not a sweepable config field")
    results = []
    base_dir = cfg.output_dir
    for value in values:
        sub = ExperimentConfig(**{**asdict(cfg), name: value,
                                  "output_dir": os.path.join(
                                      base_dir, f"{param}={value}")})
        traces = run_experiment(sub, write=write)
        results.append((value, sub, traces))
    if write:
        os.makedirs(base_dir, exist_ok=True)
        report = {str(v): summarize(c, tr) for v, c, tr in results}
        with open(os.path.join(base_dir, "sweep_summary.json"), "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return results


# -- SVG plotting ----------------------------------------------------------

_PALETTE = ("#1965b0", "#dc050c", "#4eb265", "#f1932d", "#882e72",
            "#7bafde", "#cae0ab", "#72190e")

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 60, 150, 20, 40


def _svg_path(xs, ys):
    return " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))


def emit_plot(traces, path, title="cumulative regret"):
    """Write an SVG line chart of cumulative regret vs round.

    Pure function of the traces: one polyline per trace, axes with end
    labels, and a legend keyed by stream id.
    """
    if not traces:
        raise ValueError("need at least one trace to plot")
    x_max = max(max(t.rounds) for t in traces)
    y_all = np.concatenate([t.cumulative for t in traces])
    y_min = min(0.0, float(y_all.min()))
    y_max = float(y_all.max())
    if y_max - y_min < 1e-12:
        y_max = y_min + 1.0
    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def sx(x):
        return _ML + plot_w * (x / max(x_max, 1))

    def sy(y):
        return _MT + plot_h * (1.0 - (y - y_min) / (y_max - y_min))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_MT + plot_h}" x2="{_ML + plot_w}" '
        f'y2="{_MT + plot_h}" stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_MT + plot_h}" '
        f'stroke="black"/>',
        f'<text x="{_ML}" y="{_H - 8}" font-size="12">1</text>',
        f'<text x="{_ML + plot_w - 30}" y="{_H - 8}" font-size="12">'
        f'{int(x_max)}</text>',
        f'<text x="4" y="{_MT + plot_h}" font-size="12">{y_min:.3g}</text>',
        f'<text x="4" y="{_MT + 12}" font-size="12">{y_max:.3g}</text>',
        f'<text x="{_ML}" y="{_MT - 4}" font-size="13">{title}</text>',
    ]
    for i, trace in enumerate(traces):
        color = _PALETTE[i % len(_PALETTE)]
        pts = _svg_path([sx(x) for x in trace.rounds],
                        [sy(y) for y in trace.cumulative])
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.5" points="{pts}"/>')
        ly = _MT + 16 + 16 * i
        parts.append(f'<line x1="{_ML + plot_w + 10}" y1="{ly - 4}" '
                     f'x2="{_ML + plot_w + 34}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_ML + plot_w + 40}" y="{ly}" '
                     f'font-size="12">stream {trace.stream_id}</text>')
    parts.append("</svg>")
    svg = "\n".join(parts) + "\n"
    with open(path, "w") as fh:
        fh.write(svg)
    return path
