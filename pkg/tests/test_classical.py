import itertools
import math

import numpy as np
import pytest

from kforr.classical import (
    DecisionTree,
    InvalidTreeError,
    Node,
    QueryOracle,
    RandomizedTree,
    ResourceLimitError,
    evaluate_tree,
    exhaustive_tuple_average,
    measure_advantage,
    random_randomized_tree,
    random_tree,
    tree_accept_function,
    tree_from_json,
    tree_to_json,
    tuple_estimates,
    tuple_sampling_estimator,
)
from kforr.forrelation import ForrelationParams, forr_value
from kforr.fourier import transform

SINGLE = DecisionTree([Node(query=0, left=1, right=2), Node(value=1.0), Node(value=0.0)])


def all_inputs(m):
    return 1 - 2 * ((np.arange(1 << m)[:, None] >> np.arange(m)) & 1)


def path_oracle(tree, x):
    idx = 0
    while not tree.nodes[idx].is_leaf:
        nd = tree.nodes[idx]
        idx = nd.left if x[nd.query] == 1 else nd.right
    return tree.nodes[idx].value


def test_basic_trees():
    assert evaluate_tree(SINGLE, np.array([1, -1])) == 1.0
    assert evaluate_tree(SINGLE, np.array([-1, 1])) == 0.0
    leaf = DecisionTree([Node(value=0.3)])
    assert leaf.depth == 0
    assert np.allclose(leaf.evaluate(all_inputs(3)), 0.3)


def test_tree_validation():
    with pytest.raises(InvalidTreeError):
        DecisionTree([Node(query=0, left=1, right=2), Node(query=0, left=3, right=4),
                      Node(value=0.0), Node(value=0.0), Node(value=1.0)])
    with pytest.raises(InvalidTreeError):
        DecisionTree([Node(value=1.5)])
    with pytest.raises(InvalidTreeError):
        DecisionTree([Node(query=0, left=1, right=5), Node(value=0.0)])
    with pytest.raises(InvalidTreeError):
        evaluate_tree(SINGLE, np.array([], dtype=int))
    with pytest.raises(InvalidTreeError):
        RandomizedTree([SINGLE], [0.5])


def test_random_tree_matches_path_oracle(rng):
    t = random_tree(rng, 8, 3)
    X = all_inputs(8)
    assert np.array_equal(t.evaluate(X), [path_oracle(t, x) for x in X])
    assert np.array_equal(tree_accept_function(t, 8), t.evaluate(X))


def test_accept_function_single():
    f = tree_accept_function(SINGLE, 1)
    assert np.allclose(f, [1.0, 0.0])
    c = transform(f).coefficients
    assert np.allclose(c, [0.5, 0.5])
    with pytest.raises(ResourceLimitError):
        tree_accept_function(SINGLE, 25)


def test_degree_bound_and_parseval(rng):
    for d in (1, 2, 3):
        t = random_tree(rng, 10, d)
        f = tree_accept_function(t, 10)
        c = transform(f).coefficients
        sizes = np.bitwise_count(np.arange(1 << 10))
        assert np.abs(c[sizes > d]).max(initial=0) < 1e-15
        assert abs((c**2).sum() - (f**2).mean()) < 1e-12


def test_randomized_tree_mixture(rng):
    r = random_randomized_tree(rng, 6, 2, n_trees=3)
    X = all_inputs(6)
    expect = sum(w * t.evaluate(X) for t, w in zip(r.trees, r.weights))
    assert np.allclose(r.evaluate(X), expect)
    vals = r.evaluate(X)
    assert np.all((vals >= 0) & (vals <= 1))


def test_json_round_trip(rng):
    t = random_tree(rng, 6, 3)
    back = tree_from_json(tree_to_json(t))
    X = all_inputs(6)
    assert np.array_equal(back.evaluate(X), t.evaluate(X))
    r = random_randomized_tree(rng, 6, 2)
    assert np.allclose(tree_from_json(tree_to_json(r)).evaluate(X), r.evaluate(X))
    with pytest.raises(InvalidTreeError):
        tree_from_json('{"type": "tree", "nodes": [{"query": 0}]}')


def test_exhaustive_tuple_average(rng):
    assert abs(exhaustive_tuple_average(np.ones((2, 2))) - math.sqrt(2) / 2) < 1e-15
    for k in (2, 3):
        for N in (2, 4):
            z = rng.choice([-1, 1], size=(k, N))
            assert abs(exhaustive_tuple_average(z) - forr_value(z)) < 1e-12


def test_tuple_estimator_values_and_queries(rng):
    params = ForrelationParams(1, 2)
    oracle = QueryOracle(np.ones(4))
    est, used = tuple_sampling_estimator(oracle, params, 50, rng)
    assert used == 100 and oracle.queries == 100
    batch = tuple_estimates(np.ones((3, 2, 2)), 1, rng)
    assert np.allclose(np.abs(batch), math.sqrt(2))


def test_tuple_estimator_variance_shrinks(rng):
    z = rng.choice([-1, 1], size=(2, 16))
    Z = np.broadcast_to(z, (2000, 2, 16))
    small = tuple_estimates(Z, 4, rng).var()
    large = tuple_estimates(Z, 64, rng).var()
    assert 8 < small / large < 32
    assert abs(tuple_estimates(Z, 64, rng).mean() - forr_value(z)) < 0.05


def test_advantage_constant_and_quantum():
    from kforr.quantum import accept_probabilities

    params = ForrelationParams(8, 2)
    const = measure_advantage(lambda Z, r: np.full(len(Z), 0.5), params, 20_000, seed=1)
    assert const.ci_low <= 0 <= const.ci_high
    q = measure_advantage(lambda Z, r: accept_probabilities(Z), params, 20_000, seed=1, queries=1)
    assert q.ci_low <= 0.5 * 0.0795904 <= q.ci_high


def test_depth_one_tree_small_advantage():
    params = ForrelationParams(6, 2)
    single = DecisionTree([Node(query=5, left=1, right=2), Node(value=1.0), Node(value=0.0)])
    r = measure_advantage(lambda Z, _: single.evaluate(Z.reshape(len(Z), -1)), params, 20_000, seed=2)
    assert abs(r.advantage) < 0.02
