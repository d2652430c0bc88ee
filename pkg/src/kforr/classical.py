"""Classical query algorithms: decision trees and a uniform tuple-sampling estimator.

Tree JSON format::

    {"type": "tree", "nodes": [
        {"query": 3, "left": 1, "right": 2},   # left when z[3] = +1, right when -1
        {"leaf": 0.25},
        {"leaf": 1.0}]}

Node 0 is the root. A randomized tree is
``{"type": "randomized", "trees": [...], "weights": [...]}``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .forrelation import HADAMARD, ForrelationParams, _resolve_matrix
from .montecarlo import DEFAULT_CHUNK, bernoulli_se, map_chunks
from .sampler import sample_p0, sample_p1
from .wht import hadamard_entries

__all__ = [
    "InvalidTreeError",
    "ResourceLimitError",
    "Node",
    "DecisionTree",
    "RandomizedTree",
    "evaluate_tree",
    "tree_accept_function",
    "random_tree",
    "random_randomized_tree",
    "tree_from_json",
    "tree_to_json",
    "QueryOracle",
    "tuple_sampling_estimator",
    "tuple_estimates",
    "exhaustive_tuple_average",
    "AdvantageResult",
    "measure_advantage",
    "measure_advantages",
]

MAX_TABLE_BITS = 24


class InvalidTreeError(ValueError):
    pass


class ResourceLimitError(RuntimeError):
    pass


@dataclass(frozen=True)
class Node:
    query: int | None = None
    left: int | None = None
    right: int | None = None
    value: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.query is None


class DecisionTree:
    """Deterministic tree; immutable after validation."""

    def __init__(self, nodes):
        self.nodes = tuple(nodes)
        if not self.nodes:
            raise InvalidTreeError("a tree needs at least one node")
        self.depth = self._validate()
        self._query = np.array([nd.query if not nd.is_leaf else 0 for nd in self.nodes], dtype=np.int64)
        self._left = np.array([nd.left if not nd.is_leaf else i for i, nd in enumerate(self.nodes)], dtype=np.int64)
        self._right = np.array([nd.right if not nd.is_leaf else i for i, nd in enumerate(self.nodes)], dtype=np.int64)
        self._leaf = np.array([nd.is_leaf for nd in self.nodes])
        self._value = np.array([nd.value if nd.is_leaf else 0.0 for nd in self.nodes], dtype=np.float64)

    def _validate(self) -> int:
        seen = set()
        depth = 0
        stack = [(0, frozenset(), 0)]
        while stack:
            idx, path, d = stack.pop()
            if not 0 <= idx < len(self.nodes):
                raise InvalidTreeError(f"child index {idx} out of range")
            if idx in seen:
                raise InvalidTreeError(f"node {idx} is reachable twice")
            seen.add(idx)
            nd = self.nodes[idx]
            if nd.is_leaf:
                if nd.value is None or not 0.0 <= nd.value <= 1.0:
                    raise InvalidTreeError(f"leaf {idx} needs a value in [0, 1]")
                depth = max(depth, d)
                continue
            if nd.query < 0:
                raise InvalidTreeError(f"negative query index at node {idx}")
            if nd.query in path:
                raise InvalidTreeError(f"index {nd.query} queried twice on one path")
            if nd.left is None or nd.right is None:
                raise InvalidTreeError(f"internal node {idx} needs two children")
            stack.append((nd.left, path | {nd.query}, d + 1))
            stack.append((nd.right, path | {nd.query}, d + 1))
        if len(seen) != len(self.nodes):
            raise InvalidTreeError("tree contains unreachable nodes")
        return depth

    @property
    def max_query(self) -> int:
        return max((nd.query for nd in self.nodes if not nd.is_leaf), default=-1)

    @property
    def queried(self) -> list[int]:
        return sorted({nd.query for nd in self.nodes if not nd.is_leaf})

    def evaluate(self, z) -> np.ndarray:
        z = np.asarray(z)
        single = z.ndim == 1
        z2 = np.atleast_2d(z)
        if self.max_query >= z2.shape[-1]:
            raise InvalidTreeError(f"query index {self.max_query} out of range for input length {z2.shape[-1]}")
        rows = np.arange(len(z2))
        cur = np.zeros(len(z2), dtype=np.int64)
        for _ in range(self.depth):
            bit = z2[rows, self._query[cur]]
            nxt = np.where(bit == 1, self._left[cur], self._right[cur])
            cur = np.where(self._leaf[cur], cur, nxt)
        out = self._value[cur]
        return float(out[0]) if single else out

    def to_dict(self) -> dict:
        nodes = []
        for nd in self.nodes:
            nodes.append({"leaf": nd.value} if nd.is_leaf else {"query": nd.query, "left": nd.left, "right": nd.right})
        return {"type": "tree", "nodes": nodes}


class RandomizedTree:
    """Finite mixture of deterministic trees."""

    def __init__(self, trees, weights):
        self.trees = tuple(trees)
        w = np.asarray(weights, dtype=np.float64)
        if len(self.trees) == 0 or w.shape != (len(self.trees),):
            raise InvalidTreeError("need one weight per tree")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidTreeError("weights must be non-negative and sum to 1")
        self.weights = w
        self.depth = max(t.depth for t in self.trees)

    @property
    def max_query(self) -> int:
        return max(t.max_query for t in self.trees)

    @property
    def queried(self) -> list[int]:
        return sorted({q for t in self.trees for q in t.queried})

    def evaluate(self, z):
        vals = [w * np.asarray(t.evaluate(z)) for t, w in zip(self.trees, self.weights)]
        out = np.sum(vals, axis=0)
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {"type": "randomized", "trees": [t.to_dict() for t in self.trees], "weights": self.weights.tolist()}


def evaluate_tree(tree, z):
    """Accept probability on one input (float) or on a batch ``(P, m)``."""
    return tree.evaluate(z)


def tree_from_json(text_or_obj):
    obj = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    try:
        kind = obj.get("type", "tree")
        if kind == "randomized":
            return RandomizedTree([tree_from_json(t) for t in obj["trees"]], obj["weights"])
        if kind != "tree":
            raise InvalidTreeError(f"unknown tree type {kind!r}")
        nodes = []
        for nd in obj["nodes"]:
            if "leaf" in nd:
                nodes.append(Node(value=float(nd["leaf"])))
            else:
                nodes.append(Node(query=int(nd["query"]), left=int(nd["left"]), right=int(nd["right"])))
        return DecisionTree(nodes)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidTreeError(f"malformed tree description: {exc}") from exc


def tree_to_json(tree) -> str:
    return json.dumps(tree.to_dict(), sort_keys=True)


def _bit_signs(m: int, i: int) -> np.ndarray:
    # table index bit i set means x_i = -1
    return (np.arange(1 << m) >> i) & 1


def tree_accept_function(tree, m: int) -> np.ndarray:
    """Table of ``f(x)`` over all ``2^m`` inputs; index bit ``i`` set means ``x_i = -1``."""
    if m > MAX_TABLE_BITS:
        raise ResourceLimitError(f"m={m} exceeds the table guard {MAX_TABLE_BITS}")
    if tree.max_query >= m:
        raise InvalidTreeError(f"query index {tree.max_query} out of range for m={m}")
    if isinstance(tree, RandomizedTree):
        return np.sum([w * tree_accept_function(t, m) for t, w in zip(tree.trees, tree.weights)], axis=0)

    def walk(idx):
        nd = tree.nodes[idx]
        if nd.is_leaf:
            return np.full(1 << m, nd.value)
        return np.where(_bit_signs(m, nd.query) == 0, walk(nd.left), walk(nd.right))

    return walk(0)


def random_tree(rng, m: int, depth: int, leaf_values: str = "uniform") -> DecisionTree:
    """Complete depth-``depth`` tree with distinct queries along each path.

    ``leaf_values`` is ``"uniform"`` (values in [0, 1]) or ``"binary"``.
    """
    if depth > m:
        raise ValueError("depth cannot exceed the number of variables")
    nodes: list[Node | None] = []

    def build(d, used):
        idx = len(nodes)
        nodes.append(None)
        if d == depth:
            v = rng.random() if leaf_values == "uniform" else float(rng.integers(0, 2))
            nodes[idx] = Node(value=float(v))
            return idx
        free = [i for i in range(m) if i not in used]
        q = int(free[rng.integers(len(free))])
        left = build(d + 1, used | {q})
        right = build(d + 1, used | {q})
        nodes[idx] = Node(query=q, left=left, right=right)
        return idx

    build(0, frozenset())
    return DecisionTree(nodes)


def random_randomized_tree(rng, m: int, depth: int, n_trees: int = 4) -> RandomizedTree:
    w = rng.random(n_trees)
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return RandomizedTree([random_tree(rng, m, depth) for _ in range(n_trees)], w)


# --- tuple-sampling estimator -------------------------------------------------

class QueryOracle:
    """Query access to a flat +-1 input that counts every lookup."""

    def __init__(self, z):
        self._z = np.asarray(z).ravel()
        self.queries = 0

    def __len__(self):
        return len(self._z)

    def __call__(self, idx):
        idx = np.asarray(idx)
        self.queries += int(idx.size)
        return self._z[idx]


def _matrix_entries(M, i, j, n):
    if M is None:
        return hadamard_entries(i, j, n)
    return M.matrix[i, j]


def tuple_sampling_estimator(oracle: QueryOracle, params: ForrelationParams, samples: int, rng, matrix=HADAMARD):
    """Average of ``N^(k-1) z_1(i_1) M_{i_1 i_2} ... z_k(i_k)`` over uniform tuples.

    Returns ``(estimate, queries_used)``; unbiased for ``forr``.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    k, N, n = params.k, params.N, params.n
    M = _resolve_matrix(matrix)
    before = oracle.queries
    idx = rng.integers(0, N, size=(samples, k))
    vals = float(N) ** (k - 1) * np.ones(samples)
    for b in range(k):
        vals = vals * oracle(b * N + idx[:, b])
        if b + 1 < k:
            vals = vals * _matrix_entries(M, idx[:, b], idx[:, b + 1], n)
    return float(vals.mean()), oracle.queries - before


def tuple_estimates(Z, samples: int, rng, matrix=HADAMARD) -> np.ndarray:
    """Vectorised estimator over a batch ``(P, k, N)``; one estimate per input."""
    Z = np.asarray(Z)
    P, k, N = Z.shape
    n = int(math.log2(N))
    M = _resolve_matrix(matrix)
    idx = rng.integers(0, N, size=(P, samples, k))
    rows = np.arange(P)[:, None]
    vals = float(N) ** (k - 1) * np.ones((P, samples))
    for b in range(k):
        vals = vals * Z[rows, b, idx[:, :, b]]
        if b + 1 < k:
            vals = vals * _matrix_entries(M, idx[:, :, b], idx[:, :, b + 1], n)
    return vals.mean(axis=1)


def exhaustive_tuple_average(z, matrix=HADAMARD) -> float:
    """Average of the estimator's summand over all ``N^k`` tuples (small ``N`` only)."""
    z = np.asarray(z, dtype=np.float64)
    k, N = z.shape
    M = _resolve_matrix(matrix)
    n = int(math.log2(N))
    grids = np.meshgrid(*([np.arange(N)] * k), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=-1)
    vals = float(N) ** (k - 1) * np.ones(len(idx))
    for b in range(k):
        vals = vals * z[b, idx[:, b]]
        if b + 1 < k:
            vals = vals * _matrix_entries(M, idx[:, b], idx[:, b + 1], n)
    return float(vals.mean())


# --- distinguishing advantage -------------------------------------------------

@dataclass(frozen=True)
class AdvantageResult:
    name: str
    queries: int
    mean_p1: float
    mean_p0: float
    advantage: float
    se: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _advantage(name, queries, a1, a0, width=3.0) -> AdvantageResult:
    m1, m0 = float(np.mean(a1)), float(np.mean(a0))
    se = math.sqrt(bernoulli_se(m1, len(a1)) ** 2 + bernoulli_se(m0, len(a0)) ** 2)
    adv = m1 - m0
    return AdvantageResult(name, int(queries), m1, m0, adv, se, adv - width * se, adv + width * se)


def measure_advantages(algorithms: dict, params: ForrelationParams, samples: int, seed: int,
                       matrix=HADAMARD, workers: int = 1, chunk_size: int = DEFAULT_CHUNK, width: float = 3.0):
    """Evaluate every algorithm on one shared set of ``p1`` and ``p0`` samples.

    ``algorithms`` maps a name to ``(accept_fn, queries)``; ``accept_fn(Z, rng)``
    returns acceptance probabilities for a batch ``(P, k, N)``. Each algorithm
    gets its own seeded stream so adding one does not perturb the others.
    """
    names = list(algorithms)

    def run(dist):
        def chunk(rng, size, c):
            Z = sample_p1(rng, params, matrix, size).Z if dist == 1 else sample_p0(rng, params, size)
            out = []
            for a, name in enumerate(names):
                fn, _ = algorithms[name]
                out.append(np.asarray(fn(Z, rng_for(dist, a, c)), dtype=np.float64))
            return out
        return chunk

    def rng_for(dist, a, c):
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(10 + dist, a, c))))

    p1 = map_chunks(run(1), seed, samples, stream=1, chunk_size=chunk_size, workers=workers)
    p0 = map_chunks(run(0), seed, samples, stream=0, chunk_size=chunk_size, workers=workers)
    results = []
    for a, name in enumerate(names):
        a1 = np.concatenate([c[a] for c in p1])
        a0 = np.concatenate([c[a] for c in p0])
        results.append(_advantage(name, algorithms[name][1], a1, a0, width))
    return results


def measure_advantage(algorithm, params: ForrelationParams, samples: int, seed: int, queries: int = 0,
                      matrix=HADAMARD, workers: int = 1, name: str = "algorithm") -> AdvantageResult:
    """``mean_p1 - mean_p0`` of an acceptance-probability functional with a 3-s.e. interval."""
    if samples < 1:
        raise ValueError("sample budget must be at least 1")
    return measure_advantages({name: (algorithm, queries)}, params, samples, seed, matrix, workers)[0]
