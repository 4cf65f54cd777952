"""Full desk-scale experiment: one CSV per figure-style sweep.

Runs the sum-rate-vs-SNR comparison (scheduled vs no scheduling) on the
desk configuration and writes the deterministic CSV that the separate
figures package turns into plots:

    render_figures out/figure_rate.csv --kind rate --out out/rate.png
"""

import os

from jsdm.harness import ScenarioConfig, figure_rate, run_scenario

out = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out, exist_ok=True)

config = ScenarioConfig(seeds=(1, 2), snr_db=(0.0, 10.0, 20.0, 30.0),
                        num_slots=100)
path = figure_rate(config, out)
print("wrote", path)

rows = run_scenario(config, experiment="rate")
best = {}
base = {}
for r in rows:
    if r.experiment == "rate:best":
        best.setdefault(r.snr_db, []).append(r.sum_rate)
    elif r.experiment == "rate:noscheduling":
        base.setdefault(r.snr_db, []).append(r.sum_rate)

print("\n SNR(dB)   scheduled   no scheduling")
for snr in sorted(best):
    print(f"  {snr:5.1f}   {sum(best[snr]) / len(best[snr]):9.2f}"
          f"   {sum(base[snr]) / len(base[snr]):13.2f}")
