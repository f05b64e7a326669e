"""Regret growth of the cutting-plane learners against a strong oracle.

Plays the separation game at several horizons with the two analyzed
learners — the inscribed-ellipsoid center and the centroid of the
1/T-dilated knowledge set — against the adversarial max-regret oracle.
Cumulative regret should grow like log T, not linearly: doubling the
horizon adds roughly a constant. Writes trace CSVs, a summary, and an
SVG regret plot under ./demo_runs/. About a minute at these budgets.
"""

import json
import os

from cutplane.harness import ExperimentConfig, emit_plot, run_experiment, \
    summarize

OUT = os.path.join(os.path.dirname(__file__), "demo_runs", "strong_oracle")


def main():
    for learner, params in (
            ("john_center", {}),
            ("steiner_centroid",
             dict(n=64, chains=64, burn_in=2, adaptive=False))):
        print(f"-- {learner}")
        for T in (125, 250, 500, 1000):
            cfg = ExperimentConfig(
                game="cutting_plane", dim=2, horizon=T, learner=learner,
                learner_params=params, oracle="strong_max_regret", trials=4,
                base_seed=1, output_dir=os.path.join(OUT, f"{learner}_T{T}"))
            traces = run_experiment(cfg)
            s = summarize(cfg, traces)
            print(f"   T={T:5d}: mean cumulative regret "
                  f"{s['mean_cum_regret']:.4f} (max {s['max_cum_regret']:.4f})")
            if T == 1000:
                emit_plot(traces, os.path.join(OUT, f"{learner}.svg"),
                          title=f"{learner}, T=1000")
                with open(os.path.join(OUT, f"{learner}.json"), "w") as fh:
                    json.dump(s, fh, indent=2, sort_keys=True)
    print(f"traces, summaries and plots under {OUT}")


if __name__ == "__main__":
    main()
