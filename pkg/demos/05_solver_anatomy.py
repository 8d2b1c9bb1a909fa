"""Inside the lazy blended pairwise solver.

Classic Frank-Wolfe calls the oracle every iteration and zig-zags near facets.
The blended pairwise variant keeps an active set and prefers transferring
weight from its worst atom to its best one; the oracle is consulted only when
the active atoms cannot supply progress phi/K, and a fruitless oracle answer
halves the progress estimate phi instead of moving.
"""

import collections

import numpy as np

from localpolytope import SolverConfig, bpcg, frank_wolfe_vanilla, singlet_tensor
from localpolytope.fw import InnerProductCache
from localpolytope.polyhedra import (
    antipodal_representatives,
    geodesic_icosahedron,
    rationalize_all,
)

reps = antipodal_representatives(rationalize_all(geodesic_icosahedron([]), 1e-6))
vecs = [p.as_tuple() for p in reps]
p = singlet_tensor(vecs, vecs)      # icosahedron singlet, m = 6

cfg = SolverConfig(restarts=500, seed=2, trace=True)
res = bpcg(p, 0.60, cfg)
steps = collections.Counter(res.step_types)
print(f"bpcg at v0=0.60: {res.status} in {res.iterations} iterations")
print(f"  step mix: {dict(steps)}")
print(f"  oracle calls: {res.lmo_calls}  active set: {len(res.active_set)} atoms")

van = frank_wolfe_vanilla(p, 0.60, SolverConfig(restarts=500, seed=2))
print(f"vanilla frank-wolfe: {van.status} with {van.lmo_calls} oracle calls "
      f"(every iteration is an oracle call)")

# linear convergence: log f drops along a straight line once the right face
# is identified
f = np.array(res.f_history)
f = f[f > 0]
tail = np.log(f[len(f) // 2:])
slope = np.polyfit(np.arange(len(tail)), tail, 1)[0]
print(f"log-objective slope over the last half: {slope:.4f} per iteration")

# The per-atom gradient inner products are maintained incrementally: a step
# changes at most two weights, so the update touches one or two Gram columns
# instead of recomputing <grad, d> for the whole active set.
from localpolytope import CorrelationTensor

active = res.active_set
target = CorrelationTensor(p.scenario, 0.60 * p.entries.astype(float))
cache = InnerProductCache(active, target)  # rebuilt fresh here
grad = active.recompute_iterate() - target.entries
drift = np.abs(cache.values() - cache.recomputed_values(grad)).max()
print(f"cache vs direct recomputation: max deviation {drift:.2e}")
