"""Measure distinguishing advantage of a few algorithms on p1 versus p0.

Small sizes keep this quick; ``kforr separation`` runs the full table.
"""
import numpy as np

from kforr import classical
from kforr.forrelation import ForrelationParams
from kforr.quantum import accept_probabilities

params = ForrelationParams(n=8, k=2)
m = params.k * params.N
tree = classical.random_tree(np.random.default_rng(3), m, 4)

algorithms = {
    "quantum": (lambda Z, rng: accept_probabilities(Z), 1),
    "random_tree_depth4": (lambda Z, rng: tree.evaluate(Z.reshape(len(Z), -1)), 4),
    "tuple_estimator_16": (
        lambda Z, rng: np.clip((1 + classical.tuple_estimates(Z, 16, rng)) / 2, 0, 1), 2 * 16),
}
results = classical.measure_advantages(algorithms, params, samples=20_000, seed=1)
for r in results:
    print(f"{r.name:>20}  queries {r.queries:>3}  advantage {r.advantage:+.4f}"
          f"  [{r.ci_low:+.4f}, {r.ci_high:+.4f}]")
