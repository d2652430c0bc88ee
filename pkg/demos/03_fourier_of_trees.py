"""Fourier weight of a shallow decision tree under a product measure."""
import numpy as np

from kforr import classical, fourier

rng = np.random.default_rng(11)
m, depth = 8, 3
tree = classical.random_tree(rng, m, depth)
f = classical.tree_accept_function(tree, m)

uniform = fourier.transform(f)
print("level weights, uniform measure:", np.round(fourier.level_weights(uniform), 5))

mu = rng.uniform(-0.4, 0.4, m)
biased = fourier.transform(f, mu)
print("level weights, biased measure: ", np.round(fourier.level_weights(biased), 5))

for level in range(depth + 1):
    lhs, rhs, ok = fourier.check_weight_transfer(tree, mu, level, m)
    print(f"level {level}: biased weight {lhs:.5f} <= 4^l * max restricted weight {rhs:.5f}: {ok}")
