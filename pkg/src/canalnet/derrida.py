"""One-step Derrida values of synchronous Boolean networks."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .sensitivity import sensitivity_profile
from .truthtable import BooleanFunction, is_essential, parse_function

EXHAUSTIVE_WORK_CAP = 1 << 34
EXHAUSTIVE_MAX_NODES = 16
MC_BLOCK = 1 << 15


@dataclass(frozen=True)
class Node:
    function: BooleanFunction
    inputs: tuple  # 0-based node indices, most significant variable first


@dataclass(frozen=True)
class NetworkSpec:
    """A synchronous Boolean network; node ``i`` computes ``function(x[inputs])``."""

    nodes: tuple

    def __post_init__(self):
        if not self.nodes:
            raise ValueError("a network needs at least one node")
        N = len(self.nodes)
        for idx, node in enumerate(self.nodes):
            if len(node.inputs) != node.function.n:
                raise ValueError(
                    f"node {idx + 1}: {len(node.inputs)} inputs but function arity {node.function.n}"
                )
            if len(set(node.inputs)) != len(node.inputs):
                raise ValueError(f"node {idx + 1}: duplicate inputs")
            if any(not 0 <= j < N for j in node.inputs):
                raise ValueError(f"node {idx + 1}: input index out of range")
            inessential = [
                node.inputs[i - 1] + 1
                for i in range(1, node.function.n + 1)
                if not is_essential(node.function, i)
            ]
            if inessential:
                warnings.warn(
                    f"node {idx + 1} is not essential in inputs {inessential}", stacklevel=3
                )

    @property
    def N(self) -> int:
        return len(self.nodes)

    @classmethod
    def build(cls, functions, inputs) -> "NetworkSpec":
        return cls(tuple(Node(f, tuple(ins)) for f, ins in zip(functions, inputs, strict=True)))

    @classmethod
    def identity(cls, N: int) -> "NetworkSpec":
        f = BooleanFunction.variable(1, 1)
        return cls.build([f] * N, [[i] for i in range(N)])

    def complement(self) -> "NetworkSpec":
        return NetworkSpec(tuple(Node(n.function.complement(), n.inputs) for n in self.nodes))

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "nodes": [
                {"inputs": [j + 1 for j in n.inputs], "function": n.function.render()}
                for n in self.nodes
            ],
        }

    def step(self, states: np.ndarray) -> np.ndarray:
        """Synchronous update of a batch of states (``(batch, N)`` bool array)."""
        states = np.asarray(states, dtype=bool)
        out = np.empty_like(states)
        for i, node in enumerate(self.nodes):
            out[:, i] = evaluate_node(node, states)
        return out


def evaluate_node(node: Node, states: np.ndarray) -> np.ndarray:
    rows = np.zeros(states.shape[0], dtype=np.int64)
    for j in node.inputs:
        rows = (rows << 1) | states[:, j]
    return node.function.table[rows].astype(bool)


def network_from_dict(data: dict) -> NetworkSpec:
    """Parse the JSON network format (1-based ``inputs`` per node)."""
    nodes = data["nodes"]
    N = int(data.get("N", len(nodes)))
    if N != len(nodes):
        raise ValueError(f"N={N} but {len(nodes)} nodes given")
    functions, inputs = [], []
    for idx, node in enumerate(nodes):
        ins = [int(j) - 1 for j in node["inputs"]]
        try:
            functions.append(parse_function(str(node["function"]), arity=len(ins)))
        except ValueError as exc:
            raise ValueError(f"node {idx + 1}: {exc}") from None
        inputs.append(ins)
    return NetworkSpec.build(functions, inputs)


def load_network(path) -> NetworkSpec:
    return network_from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    stderr: float
    samples: int


def hypergeometric_pmf(N: int, m: int, n: int, c: int) -> Fraction:
    """``P(|J| = c)`` when ``m`` of ``N`` nodes are perturbed and ``n`` are read."""
    if min(N, m, n) < 0:
        raise ValueError("hypergeometric parameters must be non-negative")
    if m > N or n > N:
        raise ValueError(f"need m, n <= N (got N={N}, m={m}, n={n})")
    if not max(m + n - N, 0) <= c <= min(m, n):
        return Fraction(0)
    return Fraction(comb(m, c) * comb(N - m, n - c), comb(N, n))


def hypergeometric_pmf_dual(N: int, m: int, n: int, c: int) -> Fraction:
    """Same PMF with the roles of perturbed and read nodes swapped."""
    if min(N, m, n) < 0:
        raise ValueError("hypergeometric parameters must be non-negative")
    if not max(m + n - N, 0) <= c <= min(m, n):
        return Fraction(0)
    return Fraction(comb(n, c) * comb(N - n, m - c), comb(N, m))


@lru_cache(maxsize=4096)
def normalized_sensitivities(f: BooleanFunction) -> tuple:
    """``(s_0, ..., s_n)`` of ``f``, cached per truth table."""
    return sensitivity_profile(f).s


def _node_term(N: int, n: int, s: tuple, m: int) -> Fraction:
    lo, hi = max(m + n - N, 0), min(m, n)
    return sum((hypergeometric_pmf(N, m, n, c) * s[c] for c in range(max(lo, 1), hi + 1)), Fraction(0))


def derrida_value(net: NetworkSpec, m: int) -> Fraction:
    """``D(F, m) = sum_i sum_c H_{N,m,n_i}(c) s_c(f_i)``."""
    N = net.N
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    total = Fraction(0)
    for node in net.nodes:
        total += _node_term(N, node.function.n, normalized_sensitivities(node.function), m)
    return total


def derrida_curve(net: NetworkSpec, ms) -> dict:
    return {m: derrida_value(net, m) for m in ms}


def derrida_homogeneous(N: int, s, n: int, m: int) -> Fraction:
    """Derrida value of ``N`` nodes that all share the sensitivity table ``s``."""
    if not 0 <= n <= N:
        raise ValueError(f"need 0 <= n <= N, got n={n}, N={N}")
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    if len(s) != n + 1:
        raise ValueError(f"sensitivity table must have n + 1 = {n + 1} entries")
    return N * _node_term(N, n, tuple(Fraction(x) for x in s), m)


def _all_images(net: NetworkSpec) -> np.ndarray:
    """``F(x)`` packed as an integer for every state ``x`` (node 1 = MSB)."""
    N = net.N
    states = np.arange(1 << N, dtype=np.int64)
    bits = ((states[:, None] >> (N - 1 - np.arange(N))) & 1).astype(bool)
    image = np.zeros(1 << N, dtype=np.int64)
    for i, node in enumerate(net.nodes):
        image |= evaluate_node(node, bits).astype(np.int64) << (N - 1 - i)
    return image


def derrida_exhaustive(net: NetworkSpec, m: int, work_cap: int = EXHAUSTIVE_WORK_CAP) -> Fraction:
    """Exact average of ``d(F(x), F(x xor e_I))`` over all ``x`` and ``|I| = m``."""
    N = net.N
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    if N > EXHAUSTIVE_MAX_NODES or (1 << N) * comb(N, m) * N > work_cap:
        raise ValueError(f"exhaustive Derrida for N={N}, m={m} exceeds the work cap")
    image = _all_images(net)
    states = np.arange(1 << N, dtype=np.int64)
    total = 0
    for subset in combinations(range(N), m):
        flip = sum(1 << (N - 1 - j) for j in subset)
        total += int(np.bitwise_count(image ^ image[states ^ flip]).sum())
    return Fraction(total, (1 << N) * comb(N, m))


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, block]))


def random_perturbations(rng: np.random.Generator, size: int, N: int, m: int) -> np.ndarray:
    """``(size, N)`` bool masks with exactly ``m`` ones, uniform over subsets."""
    if m == 0:
        return np.zeros((size, N), dtype=bool)
    ranks = rng.random((size, N)).argsort(axis=1).argsort(axis=1)
    return ranks < m


def _blocks(samples: int):
    for block, start in enumerate(range(0, samples, MC_BLOCK)):
        yield block, min(MC_BLOCK, samples - start)


def summarize(values: list) -> MonteCarloEstimate:
    data = np.concatenate(values).astype(float)
    se = float(data.std(ddof=1) / np.sqrt(data.size)) if data.size > 1 else 0.0
    return MonteCarloEstimate(float(data.mean()), se, int(data.size))


def derrida_monte_carlo(net: NetworkSpec, m: int, samples: int, seed: int = 0) -> MonteCarloEstimate:
    """Sample ``(x, I)`` uniformly and average the one-step Hamming distance.

    Samples are drawn in fixed-size blocks, block ``b`` from its own stream
    ``SeedSequence([seed, b])``, so the estimate depends only on ``seed`` and
    ``samples``.
    """
    N = net.N
    if samples < 1:
        raise ValueError("samples must be positive")
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    distances = []
    for block, size in _blocks(samples):
        rng = _block_rng(seed, block)
        x = rng.random((size, N)) < 0.5
        y = x ^ random_perturbations(rng, size, N, m)
        distances.append((net.step(x) != net.step(y)).sum(axis=1))
    return summarize(distances)
