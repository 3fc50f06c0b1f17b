"""Optimal costs c_k = min lambda_k + Per for k = 1, 2, 3.

Each k gets three seeded restarts; only converged runs count. The optimal
k = 3 shape carries a double eigenvalue lambda_2 = lambda_3 that stops at
index k, and the costs increase strictly.
"""
from specshape import RunConfig, cost_curve

curve = cost_curve(3, RunConfig(restarts=3))
for entry in curve:
    for r, run in enumerate(entry["runs"]):
        print(f"k={entry['k']} restart {r}: objective {run.objective:.5f} converged={run.converged} "
              f"cluster=({run.cluster.lo},{run.cluster.hi}) flags={run.flags}")
    best = entry["best"]
    print(f"  c_{entry['k']} = {entry['cost']:.5f}, lambdas {best.lambdas[:entry['k'] + 1].round(4)}, "
          f"mu {best.certificate.mu.round(3)}")
