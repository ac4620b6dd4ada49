"""Activities and (normalized) average c-sensitivities.

Enumeration over the truth table is the reference; the closed forms below are
fast paths for canalizing functions and are checked against it in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .truthtable import BooleanFunction, half_mask

WORK_CAP = 1 << 32


class WorkCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SensitivityProfile:
    """``S[c]`` and ``s[c] = S[c] / C(n, c)`` for ``c = 0 .. n``."""

    S: tuple
    s: tuple

    @property
    def n(self) -> int:
        return len(self.S) - 1


@dataclass(frozen=True)
class LayeredActivities:
    """Result of :func:`exact_activities_layered`.

    ``alpha`` lists canalizing variables first (layer by layer) and then the
    ``n - k`` non-canalizing ones.  ``phi`` has ``r + 1`` entries and ``psi``
    ``r`` entries, both indexed from layer 1.
    """

    alpha: tuple
    phi: tuple
    psi: tuple
    noncanalizing: Fraction | None


def activity_vector(f: BooleanFunction) -> tuple:
    """``alpha_i = P(f(x) != f(x xor e_i))`` for uniform ``x``, exactly."""
    out = []
    for i in range(1, f.n + 1):
        mask = half_mask(f.n, i)
        shift = 1 << (f.n - i)
        differ = ((f.bits ^ (f.bits >> shift)) & mask).bit_count()
        out.append(Fraction(2 * differ, f.size))
    return tuple(out)


def _flip_masks(f: BooleanFunction) -> list:
    return [half_mask(f.n, i) for i in range(1, f.n + 1)]


def _permuted(f: BooleanFunction, bits: int, i: int, mask: int) -> int:
    shift = 1 << (f.n - i)
    return ((bits & mask) << shift) | ((bits >> shift) & mask)


def c_sensitivity(
    f: BooleanFunction, c: int, normalized: bool = False, work_cap: int = WORK_CAP
) -> Fraction:
    """Average ``c``-sensitivity ``S_c`` (or ``s_c`` if ``normalized``)."""
    n = f.n
    if not 0 <= c <= n:
        raise ValueError(f"c={c} outside 0..{n}")
    if c == 0:
        return Fraction(0)
    if f.size * comb(n, c) > work_cap:
        raise WorkCapExceeded(
            f"2**{n} * C({n},{c}) exceeds the work cap; use c_sensitivity_monte_carlo"
        )
    masks = _flip_masks(f)
    total = 0
    for subset in combinations(range(1, n + 1), c):
        bits = f.bits
        for i in subset:
            bits = _permuted(f, bits, i, masks[i - 1])
        total += (bits ^ f.bits).bit_count()
    value = Fraction(total, f.size)
    return value / comb(n, c) if normalized else value


def sensitivity_profile(f: BooleanFunction, work_cap: int = WORK_CAP) -> SensitivityProfile:
    """All ``S_c`` at once by walking every flip pattern in Gray-code order."""
    n = f.n
    if f.size * f.size > work_cap:
        raise WorkCapExceeded(f"full profile of a {n}-variable function exceeds the work cap")
    masks = _flip_masks(f)
    counts = [0] * (n + 1)
    bits = f.bits
    pattern = 0
    for step in range(1, f.size):
        # bit flipped between consecutive Gray codes = lowest set bit of step
        j = (step & -step).bit_length() - 1
        i = n - j
        bits = _permuted(f, bits, i, masks[i - 1])
        pattern ^= 1 << j
        counts[pattern.bit_count()] += (bits ^ f.bits).bit_count()
    S = tuple(Fraction(cnt, f.size) for cnt in counts)
    s = tuple(S[c] / comb(n, c) for c in range(n + 1))
    return SensitivityProfile(S, s)


def c_sensitivity_monte_carlo(f: BooleanFunction, c: int, samples: int, seed=0):
    """Estimate ``S_c``; returns ``(mean, standard_error)`` as floats."""
    if not 0 <= c <= f.n:
        raise ValueError(f"c={c} outside 0..{f.n}")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    rows = rng.integers(0, f.size, size=samples, dtype=np.int64)
    ranks = rng.random((samples, f.n)).argsort(axis=1)
    flips = np.zeros(samples, dtype=np.int64)
    for col in range(c):
        flips |= np.int64(1) << (f.n - 1 - ranks[:, col])
    table = f.table
    hits = (table[rows] != table[rows ^ flips]).astype(float) * comb(f.n, c)
    return float(hits.mean()), float(hits.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0


def expected_activity_k_canalizing(n: int, k: int, j: int) -> Fraction:
    """Mean activity of the ``j``-th variable over random ``k``-canalizing functions.

    Variables are numbered in canalizing order; the average is over the
    nested form with uniform inputs/outputs and a core drawn uniformly from
    the functions that are not identically the last canalized output.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if not 1 <= j <= n:
        raise ValueError(f"need 1 <= j <= n, got j={j}")
    if j < k:
        return Fraction(1, 2**j)
    cells = 1 << (n - k)
    almost_half = Fraction(1 << (cells - 1), (1 << cells) - 1)
    if j == k:
        return almost_half / 2 ** (k - 1)
    return almost_half / 2**k


def c_sensitivity_from_activities(alpha, c: int) -> Fraction:
    """``S_c = sum_j C(n - j, c - 1) * alpha_j`` with ``alpha`` in canalizing order."""
    n = len(alpha)
    if not 0 <= c <= n:
        raise ValueError(f"c={c} outside 0..{n}")
    if c == 0:
        return Fraction(0)
    return sum((comb(n - j, c - 1) * Fraction(alpha[j - 1]) for j in range(1, n - c + 2)), Fraction(0))


def ncf_expected_activities(n: int) -> tuple:
    """``(1/2, 1/4, ..., 1/2**(n-1), 1/2**(n-1))``."""
    return tuple(expected_activity_k_canalizing(n, n, j) for j in range(1, n + 1))


def hyp2f1_unit_a(b: int, c: int, z: Fraction) -> Fraction:
    """``2F1[1, b; c; z]`` for integer ``b <= 0`` and integer ``c``.

    For ``b == c`` the parameters cancel and the series is the geometric one,
    ``(1 - z)**-1``.  Otherwise ``c`` must not be a non-positive integer that
    is reached before ``b``, and the series stops at ``t = -b``.
    """
    if b > 0:
        raise ValueError("b must be a non-positive integer")
    z = Fraction(z)
    if b == c:
        return 1 / (1 - z)
    if c <= 0 and c > b:
        raise ValueError("series undefined: c is reached before b")
    total, term = Fraction(1), Fraction(1)
    for t in range(-b):
        # (1)_t / t! == 1, so consecutive terms differ by (b + t) / (c + t) * z
        term = term * (b + t) / (c + t) * z
        total += term
    return total


def ncf_expected_normalized_c_sensitivity(n: int, c: int) -> Fraction:
    """``E[s_c] = c / (2n) * 2F1[1, c - n; 1 - n; 1/2]`` over random NCFs."""
    if not 1 <= c <= n:
        raise ValueError(f"need 1 <= c <= n, got c={c}, n={n}")
    return Fraction(c, 2 * n) * hyp2f1_unit_a(c - n, 1 - n, Fraction(1, 2))


def activity_recursion(n: int, layer_sizes, v: int) -> tuple[tuple, tuple]:
    """The ``phi`` and ``psi`` sequences of the layered-activity formula."""
    sizes = list(layer_sizes)
    r = len(sizes)
    k = sum(sizes)
    phi = [Fraction(0)] * (r + 2)  # 1-based, phi[r] = phi[r + 1] = 0
    for i in range(r - 1, 0, -1):
        before = sum(sizes[:i])
        phi[i] = phi[i + 2] + sum(
            (Fraction(1, 2 ** (before + s)) for s in range(sizes[i])), Fraction(0)
        )
    psi = [Fraction(0)] * (r + 1)
    psi[r] = Fraction(v, 2 ** (n - k))
    for i in range(r - 1, 0, -1):
        psi[i] = 1 - psi[i + 1]
    return tuple(phi[1 : r + 2]), tuple(psi[1:])


def exact_activities_layered(n: int, layer_sizes, v: int | None = None) -> LayeredActivities:
    """Activities of a function with known layers and core off-count ``v``.

    Canalizing variable in layer ``L``: ``phi_L + psi_L / 2**(k-1)``.
    Non-canalizing variables share ``v (2**(n-k) - v) / (2**(n-1) (2**(n-k) - 1))``,
    which is the mean over all cores with ``v`` off rows, not the activity of
    a particular core.  For ``k == n`` pass ``v=1`` (or omit it).
    """
    sizes = tuple(int(s) for s in layer_sizes)
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("layer sizes must be positive and at least one layer is needed")
    k = sum(sizes)
    if k > n:
        raise ValueError(f"sum of layer sizes {k} exceeds n={n}")
    cells = 1 << (n - k)
    if v is None:
        if k != n:
            raise ValueError("v is required when k < n")
        v = 1
    if not 1 <= v <= cells:
        raise ValueError(f"v={v} outside 1..{cells}")
    phi, psi = activity_recursion(n, sizes, v)
    alpha = []
    for layer, size in enumerate(sizes):
        alpha.extend([phi[layer] + psi[layer] / 2 ** (k - 1)] * size)
    noncanalizing = None
    if k < n:
        noncanalizing = Fraction(v * (cells - v), 2 ** (n - 1) * (cells - 1))
        alpha.extend([noncanalizing] * (n - k))
    return LayeredActivities(tuple(alpha), phi, psi, noncanalizing)


def layered_sensitivity_profile(n: int, layer_sizes, v: int | None = None) -> SensitivityProfile:
    """``S_c`` from the layered activities through the weighted sum.

    Exact for functions without a core; with a core only ``S_1`` is exact in
    general (see the tests for the counterexample).
    """
    alpha = exact_activities_layered(n, layer_sizes, v).alpha
    S = tuple(c_sensitivity_from_activities(alpha, c) for c in range(n + 1))
    return SensitivityProfile(S, tuple(S[c] / comb(n, c) for c in range(n + 1)))
