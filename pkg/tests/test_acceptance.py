"""End-to-end acceptance suite.

One test per acceptance criterion; each prints a single
``criterion N (<name>): PASS/FAIL`` line straight to the terminal
(bypassing pytest's capture) so a verbose run reads as a checklist.
The desk-scale regret values for the strong-oracle games are pinned to
the first verified run and re-checked bitwise-deterministically.
"""

import math
import os
import time

import numpy as np
import pytest

from cutplane import checks
from cutplane.contextual import (
    feedback_adversarial_minimal,
    make_lowerbound_instance,
    run_contextual_game,
    run_list_game,
    run_local_game,
    run_lowerbound_game,
    uniform_sphere_actions,
)
from cutplane.cutting_plane import make_learner, run_cutting_plane_game
from cutplane.harness import ExperimentConfig, run_experiment
from cutplane.oracles import make_oracle
from cutplane.rng import RngStream

SEEDS = 8
DIM = 2

# small per-round sampling budget for the dilated-centroid learner: the
# 5-minute wall for the strong-oracle battery is part of the criterion and
# the machine has a single core, so the budget is the smallest at which the
# logarithmic-growth inequality still holds with a wide margin
STEINER_PARAMS = dict(n=64, chains=64, burn_in=2, adaptive=False)


def _report(capfd, line):
    with capfd.disabled():
        print("\n" + line, flush=True)


def _draw_hidden(base_seed, stream_id, d):
    """Per-trial hidden point: uniform direction, radius 0.8 * U^(1/d)."""
    g = RngStream(base_seed, stream_id).child(0).generator()
    u = g.standard_normal(d)
    u /= np.linalg.norm(u)
    return 0.8 * g.random() ** (1.0 / d) * u


def _cum_regret(learner_name, params, base_seed, stream_id, T):
    w = _draw_hidden(base_seed, stream_id, DIM)
    recs = run_cutting_plane_game(
        make_learner(learner_name, **params),
        make_oracle("strong_max_regret"), w, T,
        RngStream(base_seed, stream_id).child(1), record_width=False)
    return np.array([r.regret for r in recs])


# regret values pinned after the first verified run (determinism guard for
# the strong-oracle battery; same seeds, same code path, same platform)
PINNED_STEINER_CUM = {
    250: [1.8904969644269556, 1.2905162256928333, 1.8397998764461758,
          1.7838558803224687, 1.5695690877693145, 1.4796713286878835,
          1.580639650647867, 1.652129853695143],
    500: [1.9066167952205926, 1.2889551799559342, 1.8791362188356544,
          1.8198737932541649, 1.5760330643584068, 1.4671410020299915,
          1.57939839935259, 1.652458443533931],
    1000: [1.8860157351915696, 1.3105466431204051, 1.8698155523499624,
           1.7592044934927809, 1.5631996993501993, 1.4530394921889223,
           1.5701821186347116, 1.6643004761186255],
    2000: [1.886269417984818, 1.3105747766587228, 1.8700125004806947,
           1.7643545324186205, 1.5547144205354309, 1.4722764548046707,
           1.5797641261554003, 1.6559908416692406],
}
PINNED_JOHN_HEAD = [1.4768616743824614, 1.7539340377980306,
                    1.7787068376462312, 1.3270979616937875,
                    1.5767264542122863, 1.855821452403403,
                    1.6428511654605575, 1.5961171965944423]
PINNED_JOHN_TAIL = [0.0001369403819600819, 0.0001467686985890245,
                    0.00010999449797550674, 5.169017919368227e-05,
                    2.4668606813905468e-05, 0.0001436221815619472,
                    0.0002915044548502236, 0.00026597629507836226]


def test_criterion_1_geometric_lemma_suite(capfd):
    """50 random polytopes per dimension; every lemma inequality holds with
    zero violations beyond its Monte Carlo error bar."""
    t0 = time.time()
    all_ok = True
    lines = []
    for d in (2, 3):
        results = checks.run_geometry_checks(
            d, RngStream(20260824, d), n_polytopes=50, mc_budget=100_000,
            grunbaum_samples=16384, path_probes=100)
        summary = checks.summarize_checks(results)
        for lemma, (total, failed) in summary.items():
            all_ok &= failed == 0
            lines.append(f"d={d} {lemma}: {total - failed}/{total}")
    elapsed = time.time() - t0
    _report(capfd, f"criterion 1 (geometric lemma suite): "
                   f"{'PASS' if all_ok else 'FAIL'}  "
                   f"[{'; '.join(lines)}; {elapsed:.0f}s, soft target 600s]")
    assert all_ok


def test_criterion_2_strong_oracle_regret(capfd):
    """d=2 strong-oracle battery, 4 horizons x 8 seeds, under 5 minutes:
    dilated-centroid growth is consistent with O(d log T); the
    inscribed-ellipsoid learner's regret plateaus."""
    t0 = time.time()
    steiner = {T: [] for T in (250, 500, 1000, 2000)}
    for sid in range(SEEDS):
        for T in steiner:
            r = _cum_regret("steiner_centroid", STEINER_PARAMS, 20260824,
                            sid, T)
            steiner[T].append(float(r.sum()))
    john_head, john_tail = [], []
    for sid in range(SEEDS):
        r = _cum_regret("john_center", {}, 100, sid, 2000)
        john_head.append(float(r[:1000].sum()))
        john_tail.append(float(r[1000:].sum()))
    elapsed = time.time() - t0

    growth_ok = True
    for sid in range(SEEDS):
        c250, c500 = steiner[250][sid], steiner[500][sid]
        C = max(0.0, c500 - c250) / (DIM * math.log(2.0))
        bound = 1.25 * (c250 + C * DIM * math.log(2000.0 / 250.0))
        growth_ok &= steiner[2000][sid] <= bound
    plateau_ok = all(t <= 0.1 * h for h, t in zip(john_head, john_tail))
    pinned_ok = all(
        np.allclose(steiner[T], PINNED_STEINER_CUM[T], rtol=1e-9)
        for T in steiner)
    pinned_ok &= np.allclose(john_head, PINNED_JOHN_HEAD, rtol=1e-9)
    pinned_ok &= np.allclose(john_tail, PINNED_JOHN_TAIL, rtol=1e-9)
    time_ok = elapsed < 300.0
    ok = growth_ok and plateau_ok and pinned_ok and time_ok
    _report(capfd, f"criterion 2 (strong-oracle regret growth): "
                   f"{'PASS' if ok else 'FAIL'}  "
                   f"[log-growth {growth_ok}, plateau {plateau_ok}, "
                   f"pinned {pinned_ok}, {elapsed:.0f}s < 300s {time_ok}]")
    assert growth_ok and plateau_ok and pinned_ok
    assert time_ok, f"battery took {elapsed:.0f}s, limit 300s"


def test_criterion_3_weak_oracle_plateau(capfd):
    """Random-path learner against the weak long-axis oracle: regret
    plateaus and every per-round regret is nonnegative."""
    heads, tails, min_r = [], [], np.inf
    for sid in range(SEEDS):
        w = _draw_hidden(60, sid, DIM)
        recs = run_cutting_plane_game(
            make_learner("curvature_random"), make_oracle("weak_long_axis"),
            w, 2000, RngStream(60, sid).child(1), record_width=False)
        r = np.array([x.regret for x in recs])
        heads.append(float(r[:1000].sum()))
        tails.append(float(r[1000:].sum()))
        min_r = min(min_r, float(r.min()))
    plateau_ok = float(np.mean(tails)) <= 0.1 * float(np.mean(heads))
    nonneg_ok = min_r >= 0.0
    ok = plateau_ok and nonneg_ok
    worst = max(t / h for h, t in zip(heads, tails))
    _report(capfd, f"criterion 3 (weak-oracle plateau): "
                   f"{'PASS' if ok else 'FAIL'}  "
                   f"[mean head {np.mean(heads):.3f}, mean tail "
                   f"{np.mean(tails):.2e}, worst seed tail/head {worst:.2e}, "
                   f"min per-round regret {min_r:.2e}]")
    assert ok


def test_criterion_4_reduction_inequality(capfd):
    """Every simulated round that feeds a cut back satisfies
    contextual regret <= 2 x cutting-plane regret, to 1e-9."""
    n_case2 = 0
    worst = -np.inf
    for name, params, T, seeds in (
            ("john_center", {}, 400, 4),
            ("steiner_centroid", STEINER_PARAMS, 250, 2)):
        for sid in range(seeds):
            w = _draw_hidden(31, sid, DIM)
            steps = run_contextual_game(
                make_learner(name, **params), uniform_sphere_actions(30, DIM),
                w, T, RngStream(31, sid).child(1))
            for s in steps:
                if s.case == 2:
                    n_case2 += 1
                    worst = max(worst, s.regret - 2.0 * s.cp_regret)
    ok = n_case2 > 0 and worst <= 1e-9
    _report(capfd, f"criterion 4 (reduction inequality): "
                   f"{'PASS' if ok else 'FAIL'}  "
                   f"[{n_case2} cut-feedback rounds, max violation "
                   f"{worst:.2e} <= 1e-9]")
    assert ok


def test_criterion_5_list_recommendation(capfd):
    """32-piece list recommendation over fresh 30-action sets: list loss
    plateaus, and the loss is zero whenever the best action is listed."""
    heads, tails = [], []
    listed_ok = True
    for sid in range(SEEDS):
        w = _draw_hidden(200, sid, DIM)
        steps = run_list_game(uniform_sphere_actions(30, DIM), w, 2000, 32,
                              48, RngStream(200, sid).child(1))
        # clip the float dust on exact-zero rounds
        loss = np.maximum([s.loss for s in steps], 0.0)
        heads.append(float(loss[:1000].sum()))
        tails.append(float(loss[1000:].sum()))
        for s in steps:
            if s.best_index in s.recommendation.list:
                listed_ok &= abs(s.loss) <= 1e-9
    h, t = float(np.mean(heads)), float(np.mean(tails))
    plateau_ok = t <= 0.1 * h or t == 0.0
    ok = plateau_ok and listed_ok
    _report(capfd, f"criterion 5 (list recommendation): "
                   f"{'PASS' if ok else 'FAIL'}  "
                   f"[mean head loss {h:.2e}, mean tail loss {t:.2e}, "
                   f"zero-loss-when-listed {listed_ok}]")
    assert ok


def test_criterion_6_local_list_size(capfd):
    """Local recommendation with 40 actions under least-informative
    feedback: mean cumulative regret decreases as the list grows."""
    means = {}
    for H in (2, 5, 11):
        cums = []
        for sid in range(SEEDS):
            w = _draw_hidden(300, sid, DIM)
            steps = run_local_game(
                make_learner("steiner_centroid", **STEINER_PARAMS),
                uniform_sphere_actions(40, DIM), w, 2000, H,
                RngStream(300, sid).child(1),
                feedback_policy=feedback_adversarial_minimal)
            cums.append(sum(s.regret for s in steps))
        means[H] = float(np.mean(cums))
    ok = means[2] > means[5] > means[11]
    _report(capfd, f"criterion 6 (local list size): "
                   f"{'PASS' if ok else 'FAIL'}  "
                   f"[mean cum regret H=2: {means[2]:.3f}, H=5: "
                   f"{means[5]:.3f}, H=11: {means[11]:.3f}]")
    assert ok


def test_criterion_7_packing_lower_bound(capfd):
    """d=12 packing adversary over 32 hidden-index draws: every learner's
    mean regret meets 0.6 * m * 0.8 for the prescribed list size and round
    count. At this dimension the greedy packing has |S| around 10, so
    m = floor(0.1 sqrt(|S|)) = 0 and the bound is met with zero rounds; the
    game is still exercised end to end."""
    d, draws = 12, 32
    sizes, ok = [], True
    detail = []
    for name in ("john_center", "steiner_centroid", "curvature_random",
                 "centroid", "steiner_doubling"):
        totals = []
        for draw in range(draws):
            inst = make_lowerbound_instance(d, RngStream(700, draw))
            n_pack = len(inst.packing)
            sizes.append(n_pack)
            H = max(2, int(math.sqrt(n_pack)))
            m = int(0.1 * math.sqrt(n_pack))
            learner = make_learner(name, **(STEINER_PARAMS if "steiner" in
                                            name else {}))
            steps = run_lowerbound_game(inst, learner, H, m,
                                        RngStream(701, draw))
            totals.append(sum(s.regret for s in steps))
        mean = float(np.mean(totals))
        bound = 0.6 * m * 0.8
        ok &= mean >= bound
        detail.append(f"{name} {mean:.3f}>={bound:.3f}")
    _report(capfd, f"criterion 7 (packing lower bound): "
                   f"{'PASS' if ok else 'FAIL'}  "
                   f"[|S| in {min(sizes)}..{max(sizes)}, m=0 at this "
                   f"dimension; {'; '.join(detail)}]")
    assert ok


def test_criterion_8_determinism(capfd, tmp_path):
    """Re-running a pinned config reproduces every trace CSV byte for
    byte."""
    configs = [
        dict(game="cutting_plane", dim=2, horizon=120, learner="john_center",
             trials=3, base_seed=7),
        dict(game="local", dim=2, horizon=60, learner="steiner_centroid",
             learner_params=STEINER_PARAMS, list_size=3, trials=2,
             base_seed=7, environment_params={"n_actions": 12}),
    ]
    ok = True
    for i, raw in enumerate(configs):
        blobs = []
        for run in range(2):
            out = tmp_path / f"cfg{i}_run{run}"
            cfg = ExperimentConfig.from_dict(
                {**raw, "output_dir": str(out)})
            run_experiment(cfg)
            names = sorted(p.name for p in out.iterdir()
                           if p.suffix == ".csv")
            blobs.append({n: (out / n).read_bytes() for n in names})
        ok &= blobs[0] == blobs[1] and len(blobs[0]) > 0
    _report(capfd, f"criterion 8 (byte-identical reruns): "
                   f"{'PASS' if ok else 'FAIL'}")
    assert ok
