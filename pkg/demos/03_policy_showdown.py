"""Simulating eleven policies and ranking them
==============================================

Runs every scheduling policy over one contended synthetic workload,
computes the three objectives from each trace, and ranks the field with
the weighted reciprocal-matrix / principal-eigenvector procedure.
"""

import numpy as np

from predictsched import (
    ClusterConfig,
    ForecasterConfig,
    ORIENTATIONS,
    SynthSpec,
    SynthTemplate,
    global_matrix,
    objectives,
    principal_eigenvector,
    relative_estimations,
    run,
    synth_workload,
    weights_from_binary_matrix,
)

DAY = 86400.0

spec = SynthSpec(
    horizon=16 * DAY,
    templates=(
        SynthTemplate(1, 2, 1800, 21600, offset=0, count=65, submit_jitter=0.01),
        SynthTemplate(2, 4, 3600, 21600, offset=2000, count=65, submit_jitter=0.01),
        SynthTemplate(3, 8, 7200, 43200, offset=4000, count=33, submit_jitter=0.01),
        SynthTemplate(4, 4, 3600, 43200, offset=6000, count=33, submit_jitter=0.01),
        SynthTemplate(5, 16, 10800, 86400, offset=8000, count=17, submit_jitter=0.01),
        SynthTemplate(6, 2, 1800, 86400, offset=10000, count=17, submit_jitter=0.01),
        SynthTemplate(7, 4, 3600, 86400, offset=12000, count=17, submit_jitter=0.01),
        SynthTemplate(8, 8, 5400, 43200, offset=14000, count=33, submit_jitter=0.01),
        SynthTemplate(9, 2, 2700, 21600, offset=16000, count=65, submit_jitter=0.01),
        SynthTemplate(10, 4, 3600, 86400, offset=18000, count=17, submit_jitter=0.01),
    ),
    background_rate=5.5 / DAY,
)
workload, _ = synth_workload(spec, seed=606)
cluster = ClusterConfig(20)
print(f"{len(workload)} jobs on a {cluster.total_cpus}-cpu cluster\n")

POLICIES = (
    "fcfs", "lcfs", "sjf", "smjf", "edf", "first-fit",
    "cons-bf", "easy-bf", "esg", "best-gap", "dl",
)

rows = []
for token in POLICIES:
    forecaster = ForecasterConfig() if token == "dl" else None
    trace = run(workload, cluster, token, forecaster)
    vec = objectives(trace, cluster)
    rows.append(vec.as_tuple())
    print(f"{token:10s} makespan {vec.makespan:9.0f}   "
          f"utilization {vec.utilization:6.2f}   slowdown {vec.slowdown:9.1f}")

# ---------------------------------------------------------------------------
# ranking: binary criterion preferences -> weights -> reciprocal matrix ->
# principal eigenvector; the largest entry wins
binary = [[0.0, 0.5, 0.0], [0.5, 0.0, 1.0], [1.0, 0.0, 0.0]]
weights, _ = weights_from_binary_matrix(binary)
print(f"\ncriterion weights (makespan, slowdown, utilization): {weights.tolist()}")

values = np.array(rows)
rel, _ = relative_estimations(values, ORIENTATIONS)
matrix = global_matrix(rel, weights)
ranking = principal_eigenvector(matrix)

order = np.argsort(ranking.eigenvector)[::-1]
print("\nfinal ranking:")
for place, idx in enumerate(order, start=1):
    print(f"  {place:2d}. {POLICIES[idx]:10s} eigenvector {ranking.eigenvector[idx]:.4f}")
print(f"\nwinner: {POLICIES[ranking.winner]}")
