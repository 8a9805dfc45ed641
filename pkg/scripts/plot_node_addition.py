"""
Plot the consensus metric before and after adding one agent

The left panel uses a ring of 8 and 9 agents, the right panel the first seeded
Delaunay network whose stability is lost by one extra point.

Usage::

    python scripts/plot_node_addition.py node-addition.png [seed-limit]
"""
import sys

import matplotlib.pyplot as plt

from consensus_lab import (
    Gains,
    GraphFamily,
    SimConfig,
    SweepSpec,
    find_node_addition,
    generate,
    integrate,
)

plt.style.use("ggplot")
plt.rcParams["figure.figsize"] = 14, 5
plt.rcParams["font.family"] = "serif"
plt.rcParams["font.size"] = 12

output_path = sys.argv[1]
seed_limit = int(sys.argv[2]) if len(sys.argv) > 2 else 50
gains = Gains((0.5, 1.0, 1.0))

fig, (ring_ax, delaunay_ax) = plt.subplots(1, 2, sharey=True)

for N in (8, 9):
    ring = generate(GraphFamily("cycle"), N)
    trace = integrate(SimConfig(gains, ring, seed=1))
    ring_ax.semilogy(
        trace.metric_times,
        trace.metric,
        label="ring, N = {} ({})".format(N, trace.classification),
    )

for seed in range(seed_limit):
    spec = SweepSpec(
        family=GraphFamily("delaunay_planar", seed=seed),
        gains=gains,
        N_min=4,
        N_max=60,
    )
    found = find_node_addition(spec, margin=5e-3)
    if found is not None:
        break
else:
    sys.exit("No Delaunay network below 60 nodes loses stability by one node")

for report in (found.before, found.after):
    trace = integrate(SimConfig(gains, report.graph, horizon=1500.0, seed=1))
    delaunay_ax.semilogy(
        trace.metric_times,
        trace.metric,
        label="Delaunay seed {}, N = {}, lambda2 = {:.3f} ({})".format(
            seed, report.N, report.lambda2_real, trace.classification
        ),
    )

for ax in (ring_ax, delaunay_ax):
    ax.set_xlabel("t")
    ax.legend()
ring_ax.set_ylabel("largest disagreement")

fig.savefig(output_path, dpi=96)
