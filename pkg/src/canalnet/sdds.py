"""Stochastic discrete dynamical systems (SDDS) and their Derrida values.

A node whose update ``f_i(x)`` differs from ``x_i`` adopts it with the
activation probability ``p_up`` (0 -> 1) or the degradation probability
``p_down`` (1 -> 0).  When two trajectories are compared, each one draws its
own coins: the draws for ``x`` and ``y`` are independent.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from pathlib import Path

import numpy as np

from .derrida import (
    EXHAUSTIVE_MAX_NODES,
    EXHAUSTIVE_WORK_CAP,
    MonteCarloEstimate,
    NetworkSpec,
    _all_images,
    _block_rng,
    _blocks,
    hypergeometric_pmf,
    network_from_dict,
    normalized_sensitivities,
    random_perturbations,
    summarize,
)
from .truthtable import BooleanFunction


def as_probability(value) -> Fraction:
    """Exact probability from a Fraction, int, ``"1/3"`` or decimal (``0.5`` -> 1/2)."""
    if isinstance(value, float):
        value = repr(value)
    p = Fraction(value)
    if not 0 <= p <= 1:
        raise ValueError(f"probability {value!r} outside [0, 1]")
    return p


@dataclass(frozen=True)
class SDDSSpec:
    net: NetworkSpec
    p_up: tuple
    p_down: tuple

    def __post_init__(self):
        N = self.net.N
        if len(self.p_up) != N or len(self.p_down) != N:
            raise ValueError(f"need {N} activation and degradation probabilities")
        object.__setattr__(self, "p_up", tuple(as_probability(p) for p in self.p_up))
        object.__setattr__(self, "p_down", tuple(as_probability(p) for p in self.p_down))

    @property
    def N(self) -> int:
        return self.net.N

    @classmethod
    def uniform(cls, net: NetworkSpec, p_up, p_down=None) -> "SDDSSpec":
        p_down = p_up if p_down is None else p_down
        return cls(net, (p_up,) * net.N, (p_down,) * net.N)

    def to_dict(self) -> dict:
        data = self.net.to_dict()
        for node, up, down in zip(data["nodes"], self.p_up, self.p_down):
            node["p_up"] = str(up)
            node["p_down"] = str(down)
        return data


def sdds_from_dict(data: dict) -> SDDSSpec:
    net = network_from_dict(data)
    nodes = data["nodes"]
    return SDDSSpec(
        net,
        tuple(node.get("p_up", 1) for node in nodes),
        tuple(node.get("p_down", 1) for node in nodes),
    )


def load_sdds(path) -> SDDSSpec:
    return sdds_from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class PropensityGammas:
    """Probabilities that node ``i`` differs after the stochastic step.

    ``g1``: ``x_i != y_i`` and ``f_i(x) != f_i(y)``; ``g2``: ``x_i != y_i``,
    equal updates; ``g3``: ``x_i == y_i``, different updates; ``g4``: both equal.
    """

    g1: Fraction
    g2: Fraction
    g3: Fraction
    g4: Fraction


def gammas(p_up, p_down) -> PropensityGammas:
    up, down = as_probability(p_up), as_probability(p_down)
    mean = (up + down) / 2
    return PropensityGammas(
        1 - mean + up * down,
        1 - mean,
        mean,
        mean - (up * up + down * down) / 2,
    )


def _mix(hi: Fraction, lo: Fraction, s: Fraction) -> Fraction:
    return hi * s + lo * (1 - s)


def sdds_node_term(N: int, m: int, s: tuple, self_input: bool, g: PropensityGammas) -> Fraction:
    """Probability that one node differs after a step from a size-``m`` perturbation."""
    n = len(s) - 1
    perturbed = Fraction(m, N)
    term = Fraction(0)
    if self_input:
        # the node's own bit is one of its n inputs; the other n - 1 come from N - 1 nodes
        if m > 0:
            for c in range(0, min(m - 1, n - 1) + 1):
                h = hypergeometric_pmf(N - 1, m - 1, n - 1, c)
                if h:
                    term += perturbed * h * _mix(g.g1, g.g2, s[c + 1])
        if m < N:
            for c in range(0, min(m, n - 1) + 1):
                h = hypergeometric_pmf(N - 1, m, n - 1, c)
                if h:
                    term += (1 - perturbed) * h * _mix(g.g3, g.g4, s[c])
    else:
        if m > 0:
            for c in range(0, min(m - 1, n) + 1):
                h = hypergeometric_pmf(N - 1, m - 1, n, c)
                if h:
                    term += perturbed * h * _mix(g.g1, g.g2, s[c])
        if m < N:
            for c in range(0, min(m, n) + 1):
                h = hypergeometric_pmf(N - 1, m, n, c)
                if h:
                    term += (1 - perturbed) * h * _mix(g.g3, g.g4, s[c])
    return term


def sdds_derrida(spec: SDDSSpec, m: int) -> Fraction:
    """Closed-form SDDS Derrida value, summed node by node.

    The gammas average over ``x_i`` and over the common value of unchanged
    updates as if both were fair coins.  A node's term is therefore exact
    when it has no self-input and either ``p_up == p_down`` or its function
    is balanced; self-regulating nodes are exact only for ``p_up, p_down``
    in ``{0, 1}`` with ``p_up == p_down``.  :func:`sdds_derrida_exact` drops
    these assumptions.
    """
    N = spec.N
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    total = Fraction(0)
    for i, node in enumerate(spec.net.nodes):
        s = normalized_sensitivities(node.function)
        g = gammas(spec.p_up[i], spec.p_down[i])
        total += sdds_node_term(N, m, s, i in node.inputs, g)
    return total


def _differ_probability(x: int, y: int, fx: int, fy: int, up: Fraction, down: Fraction) -> Fraction:
    def p_one(state, target):
        if state == target:
            return Fraction(state)
        return up if target == 1 else 1 - down

    px, py = p_one(x, fx), p_one(y, fy)
    return px * (1 - py) + py * (1 - px)


def sdds_derrida_exhaustive(spec: SDDSSpec, m: int, work_cap: int = EXHAUSTIVE_WORK_CAP) -> Fraction:
    """Exact SDDS Derrida value by enumerating all states and perturbations.

    For every pair the expected distance is summed node by node with the
    exact probability that independent coin flips leave the two copies of
    the node different.
    """
    N = spec.N
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    if N > EXHAUSTIVE_MAX_NODES or (1 << N) * comb(N, m) * N > work_cap:
        raise ValueError(f"exhaustive SDDS Derrida for N={N}, m={m} exceeds the work cap")
    image = _all_images(spec.net)
    states = np.arange(1 << N, dtype=np.int64)
    counts = np.zeros((N, 16), dtype=np.int64)
    shifts = N - 1 - np.arange(N)
    for subset in combinations(range(N), m):
        flip = sum(1 << (N - 1 - j) for j in subset)
        y = states ^ flip
        code = (
            (((states[:, None] >> shifts) & 1) << 3)
            | (((y[:, None] >> shifts) & 1) << 2)
            | (((image[:, None] >> shifts) & 1) << 1)
            | ((image[y][:, None] >> shifts) & 1)
        )
        for i in range(N):
            counts[i] += np.bincount(code[:, i], minlength=16)
    total = Fraction(0)
    for i in range(N):
        for cat in range(16):
            if counts[i, cat]:
                bits = ((cat >> 3) & 1, (cat >> 2) & 1, (cat >> 1) & 1, cat & 1)
                total += int(counts[i, cat]) * _differ_probability(*bits, spec.p_up[i], spec.p_down[i])
    return total / ((1 << N) * comb(N, m))


def sdds_step(spec: SDDSSpec, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One stochastic synchronous update of a state or a ``(batch, N)`` array of states."""
    x = np.asarray(x, dtype=bool)
    single = x.ndim == 1
    states = x[None, :] if single else x
    if states.shape[1] != spec.N:
        raise ValueError(f"state length {states.shape[1]} != N={spec.N}")
    target = spec.net.step(states)
    coins = rng.random(states.shape)
    up = np.array([float(p) for p in spec.p_up])
    down = np.array([float(p) for p in spec.p_down])
    adopt = np.where(target & ~states, coins < up, np.where(~target & states, coins < down, False))
    out = np.where(adopt, target, states)
    return out[0] if single else out


def sdds_derrida_monte_carlo(spec: SDDSSpec, m: int, samples: int, seed: int = 0) -> MonteCarloEstimate:
    """Monte Carlo SDDS Derrida value with independent coins per trajectory."""
    N = spec.N
    if samples < 1:
        raise ValueError("samples must be positive")
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    distances = []
    for block, size in _blocks(samples):
        rng = _block_rng(seed, block)
        x = rng.random((size, N)) < 0.5
        y = x ^ random_perturbations(rng, size, N, m)
        distances.append((sdds_step(spec, x, rng) != sdds_step(spec, y, rng)).sum(axis=1))
    return summarize(distances)


def _node_categories(f: BooleanFunction, self_position: int | None) -> np.ndarray:
    """Counts of (self flipped, other flips c, x_i, y_i, f(x), f(y)) over all rows and flips.

    The node's own state is treated as an extra variable; if it is not an
    input it is appended as a dummy last variable.  Shape: ``(2, n_other + 1, 16)``.
    """
    if self_position is None:
        table = np.repeat(f.table, 2)
        width, q = f.n + 1, f.n + 1
    else:
        table = np.asarray(f.table)
        width, q = f.n, self_position
    rows = np.arange(1 << width, dtype=np.int64)
    self_bit = 1 << (width - q)
    counts = np.zeros((2, width, 16), dtype=np.int64)
    xi = (rows & self_bit) > 0
    fx = table[rows].astype(np.int64)
    for flip in range(1 << width):
        a = 1 if flip & self_bit else 0
        c = flip.bit_count() - a
        y = rows ^ flip
        code = (xi.astype(np.int64) << 3) | (((y & self_bit) > 0).astype(np.int64) << 2) | (fx << 1) | table[y]
        counts[a, c] += np.bincount(code, minlength=16)
    return counts


_CATEGORY_CACHE: dict = {}


def _cached_categories(f: BooleanFunction, self_position: int | None) -> np.ndarray:
    key = (f, self_position)
    if key not in _CATEGORY_CACHE:
        _CATEGORY_CACHE[key] = _node_categories(f, self_position)
    return _CATEGORY_CACHE[key]


def sdds_derrida_exact(spec: SDDSSpec, m: int) -> Fraction:
    """Exact SDDS Derrida value for any propensities and self-inputs.

    Same hypergeometric split as :func:`sdds_derrida`, but the probability
    that a node ends up different is averaged over its actual truth table
    instead of through the four gammas.  Cost is ``4**n_i`` per distinct
    node function, independent of ``N``.
    """
    N = spec.N
    if not 0 <= m <= N:
        raise ValueError(f"m={m} outside 0..{N}")
    total = Fraction(0)
    for i, node in enumerate(spec.net.nodes):
        q = node.inputs.index(i) + 1 if i in node.inputs else None
        counts = _cached_categories(node.function, q)
        others = counts.shape[1] - 1
        up, down = spec.p_up[i], spec.p_down[i]
        weights = [
            _differ_probability((cat >> 3) & 1, (cat >> 2) & 1, (cat >> 1) & 1, cat & 1, up, down)
            for cat in range(16)
        ]
        for a, (prob, mm) in enumerate(((Fraction(N - m, N), m), (Fraction(m, N), m - 1))):
            if prob == 0:
                continue
            for c in range(others + 1):
                h = hypergeometric_pmf(N - 1, mm, others, c)
                if not h:
                    continue
                row = counts[a, c]
                pairs = int(row.sum())
                expected = sum((int(row[cat]) * weights[cat] for cat in range(16) if row[cat]), Fraction(0))
                total += prob * h * expected / pairs
    return total
