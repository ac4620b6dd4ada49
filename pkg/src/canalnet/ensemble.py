"""Random canalizing functions, layer structures and the sweep tables.

All generators take ``seed``, which may be an int or a ``numpy`` Generator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from scipy.stats import rankdata

from .canalization import build_canalizing, is_canalizing
from .derrida import derrida_homogeneous
from .sensitivity import (
    SensitivityProfile,
    exact_activities_layered,
    expected_activity_k_canalizing,
    layered_sensitivity_profile,
)
from .truthtable import BooleanFunction, stats

CENSUS_EXHAUSTIVE_MAX = 4
CENSUS_SAMPLES = 10**7


@dataclass(frozen=True)
class LayerSpec:
    """Layer sizes of the canalizing variables, plus the core off-count ``v``.

    ``v`` is required when ``sum(layer_sizes) < n``.  For nested canalizing
    functions (``sum == n >= 2``) the last layer must hold at least two
    variables.
    """

    n: int
    layer_sizes: tuple
    v: int | None = None

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        object.__setattr__(self, "layer_sizes", sizes)
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError("layer sizes must be positive")
        k = sum(sizes)
        if k > self.n:
            raise ValueError(f"layers hold {k} variables but n={self.n}")
        if k == self.n and self.n >= 2 and sizes[-1] < 2:
            raise ValueError("the last layer of a nested canalizing function needs >= 2 variables")
        if k < self.n:
            cells = 1 << (self.n - k)
            if self.v is None or not 1 <= self.v <= cells:
                raise ValueError(f"v must lie in 1..{cells} when k < n")

    @property
    def k(self) -> int:
        return sum(self.layer_sizes)

    @property
    def r(self) -> int:
        return len(self.layer_sizes)

    @property
    def is_ncf(self) -> bool:
        return self.k == self.n


def compositions(k: int):
    """All ordered tuples of positive integers summing to ``k``."""
    if k == 0:
        yield ()
        return
    for first in range(1, k + 1):
        for rest in compositions(k - first):
            yield (first,) + rest


def ncf_layer_specs(n: int) -> list[LayerSpec]:
    """Every layer structure of an ``n``-variable nested canalizing function."""
    return [LayerSpec(n, c) for c in compositions(n) if n < 2 or c[-1] >= 2]


def _outputs_for_layers(layer_sizes, b1: int) -> list[int]:
    outputs = []
    for layer, size in enumerate(layer_sizes):
        outputs.extend([(b1 + layer) % 2] * size)
    return outputs


def canonical_core(n_vars: int, v: int) -> BooleanFunction:
    """A non-canalizing function of ``n_vars >= 2`` variables with ``v`` ones.

    Rows ``0`` and ``2**n_vars - 1`` are ones and rows ``1`` and
    ``2**n_vars - 2`` zeros; each half-cube contains one row of each pair, so
    no restriction is constant.  Needs ``2 <= v <= 2**n_vars - 2``.
    """
    cells = 1 << n_vars
    if n_vars < 2 or not 2 <= v <= cells - 2:
        raise ValueError(f"no canonical core with {v} ones on {n_vars} variables")
    table = np.zeros(cells, dtype=np.uint8)
    table[[0, cells - 1]] = 1
    free = [t for t in range(cells) if t not in (0, 1, cells - 2, cells - 1)]
    table[free[: v - 2]] = 1
    return BooleanFunction.from_table(table)


def build_layered(spec: LayerSpec, b1: int = 0, inputs=None, core: BooleanFunction | None = None) -> BooleanFunction:
    """Nested form with canalizing variables ``x1 .. xk`` in layer order.

    Defaults: all canalizing inputs 0, first output ``b1``, and for ``k < n``
    a core whose ``v`` off rows are placed as in :func:`canonical_core`
    (a constant core when ``v == 2**(n-k)``).
    """
    k = spec.k
    outputs = _outputs_for_layers(spec.layer_sizes, b1)
    inputs = [0] * k if inputs is None else list(inputs)
    order = list(range(1, k + 1))
    if k == spec.n:
        return build_canalizing(spec.n, order, inputs, outputs)
    cells = 1 << (spec.n - k)
    if core is None:
        if spec.v == cells:
            return build_canalizing(spec.n, order, inputs, outputs, residual_value=1 - outputs[-1])
        core = canonical_core(spec.n - k, spec.v)
        if outputs[-1] == 1:
            core = core.complement()
    return build_canalizing(spec.n, order, inputs, outputs, core)


def ncf_weight_of_layers(spec: LayerSpec) -> int:
    """Hamming weight of the canonical NCF (all inputs 0, first output 0)."""
    if not spec.is_ncf:
        raise ValueError("weight correspondence is defined for nested canalizing functions")
    return build_layered(spec).weight


@dataclass(frozen=True)
class CanalizingSample:
    """A sampled nested form: the function and how it was assembled."""

    function: BooleanFunction
    order: tuple
    inputs: tuple
    outputs: tuple
    core: BooleanFunction | None


def _random_table(rng: np.random.Generator, n_vars: int) -> BooleanFunction:
    return BooleanFunction.from_table(rng.integers(0, 2, size=1 << n_vars, dtype=np.uint8))


def _assemble(rng, n: int, k: int, core_sampler) -> CanalizingSample:
    order = tuple(int(i) + 1 for i in np.sort(rng.choice(n, size=k, replace=False)))
    inputs = tuple(int(a) for a in rng.integers(0, 2, size=k))
    outputs = tuple(int(b) for b in rng.integers(0, 2, size=k))
    core = core_sampler(outputs[-1])
    if core.n == 0:
        f = build_canalizing(n, order, inputs, outputs, residual_value=core.bits)
        return CanalizingSample(f, order, inputs, outputs, None)
    return CanalizingSample(build_canalizing(n, order, inputs, outputs, core), order, inputs, outputs, core)


def sample_k_canalizing(n: int, k: int, seed=None) -> CanalizingSample:
    """Random nested form with ``k`` canalizing variables.

    The canalizing variables are a uniform ``k``-subset taken in ascending
    order, inputs and outputs are uniform bits, and the core is uniform over
    the functions of ``n - k`` variables other than the constant ``b_k``.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)

    def core(b_k):
        while True:
            g = _random_table(rng, n - k)
            if g.bits != BooleanFunction.constant(g.n, b_k).bits:
                return g

    return _assemble(rng, n, k, core)


def random_k_canalizing(n: int, k: int, seed=None) -> BooleanFunction:
    return sample_k_canalizing(n, k, seed).function


def sample_exact_depth(n: int, k: int, seed=None) -> CanalizingSample:
    """Like :func:`sample_k_canalizing` but with a non-canalizing, non-constant core.

    ``k == n`` yields a nested canalizing function.  ``n - k == 1`` is
    rejected: no function of one variable is both non-constant and
    non-canalizing.
    """
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if n - k == 1:
        raise ValueError("no function has exact depth n - 1 with an essential core")
    rng = np.random.default_rng(seed)
    if k == n:
        return _assemble(rng, n, k, lambda b_k: BooleanFunction.constant(0, 1 - b_k))

    def core(_b_k):
        while True:
            g = _random_table(rng, n - k)
            if not g.is_constant() and not is_canalizing(g):
                return g

    if k == 0:
        g = core(None)
        return CanalizingSample(g, (), (), (), g)
    return _assemble(rng, n, k, core)


def random_exact_depth(n: int, k: int, seed=None) -> BooleanFunction:
    return sample_exact_depth(n, k, seed).function


def random_ncf_with_layers(spec: LayerSpec, seed=None) -> BooleanFunction:
    """Random inputs and first output; the layer alternation fixes the rest."""
    if not spec.is_ncf:
        raise ValueError("random_ncf_with_layers needs a nested canalizing layer spec")
    rng = np.random.default_rng(seed)
    inputs = rng.integers(0, 2, size=spec.k).tolist()
    return build_layered(spec, b1=int(rng.integers(0, 2)), inputs=inputs)


def spearman(xs, ys) -> float | None:
    """Spearman rank correlation with average ranks; ``None`` if a side is constant."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise ValueError("spearman needs two sequences of equal length")
    if xs.size < 2:
        raise ValueError("spearman needs at least two points")
    rx, ry = rankdata(xs) - 0.0, rankdata(ys) - 0.0
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx * rx).sum() * (ry * ry).sum())
    if denom == 0:
        return None
    return float((rx * ry).sum() / denom)


@dataclass(frozen=True)
class CoreCensus:
    """Weights and mean activity of non-canalizing, non-constant functions.

    ``weights[w]`` counts functions with ``w`` ones (or, if ``approx``, the
    number of sampled ones).  ``mean_activity`` is the mean over those
    functions of the average activity of their variables.
    """

    n_vars: int
    weights: dict
    mean_activity: Fraction
    total: int
    approx: bool


def _census_chunk(tables: np.ndarray, n_vars: int):
    cells = 1 << n_vars
    weight = tables.sum(axis=1, dtype=np.int64)
    keep = (weight > 0) & (weight < cells)
    differ = np.zeros(tables.shape[0], dtype=np.int64)
    for i in range(n_vars):
        cube = tables.reshape(tables.shape[0], 1 << i, 2, cells >> (i + 1))
        low, high = cube[:, :, 0, :], cube[:, :, 1, :]
        for half in (low, high):
            s = half.reshape(tables.shape[0], -1).sum(axis=1)
            keep &= (s > 0) & (s < cells // 2)
        differ += (low != high).reshape(tables.shape[0], -1).sum(axis=1)
    return weight[keep], differ[keep]


def core_census(n_vars: int, samples: int = CENSUS_SAMPLES, seed=0) -> CoreCensus:
    """Exhaustive for ``n_vars <= 4``, otherwise estimated from ``samples`` random tables."""
    cells = 1 << n_vars
    if n_vars < 2:
        return CoreCensus(n_vars, {}, Fraction(0), 0, False)
    weights: dict = {}
    differ_total = 0
    kept = 0
    if n_vars <= CENSUS_EXHAUSTIVE_MAX:
        codes = np.arange(1 << cells, dtype=np.int64)
        tables = ((codes[:, None] >> np.arange(cells)) & 1).astype(np.uint8)
        chunks = [tables]
        approx = False
    else:
        rng = np.random.default_rng(seed)
        chunk = max(1, min(samples, (1 << 24) // cells))
        chunks = (
            rng.integers(0, 2, size=(min(chunk, samples - start), cells), dtype=np.uint8)
            for start in range(0, samples, chunk)
        )
        approx = True
    for tables in chunks:
        w, d = _census_chunk(tables, n_vars)
        kept += w.size
        differ_total += int(d.sum())
        for value, count in zip(*np.unique(w, return_counts=True)):
            weights[int(value)] = weights.get(int(value), 0) + int(count)
    # each differing pair is counted once per variable; activity = 2 * pairs / cells
    mean_activity = Fraction(2 * differ_total, cells * n_vars * kept) if kept else Fraction(0)
    return CoreCensus(n_vars, dict(sorted(weights.items())), mean_activity, kept, approx)


@dataclass
class SweepRow:
    n: int
    layers: tuple
    k: int
    r: int
    k1: int
    v: int | None
    w: int
    abs_bias: Fraction
    D: dict = field(default_factory=dict)

    def as_record(self) -> dict:
        rec = {
            "w": self.w,
            "layers": "-".join(map(str, self.layers)),
            "v": self.v,
            "r": self.r,
            "k1": self.k1,
            "abs_bias": self.abs_bias,
        }
        rec.update({f"D{m}": value for m, value in sorted(self.D.items())})
        return rec


def _sweep_values(N: int, n: int, profile: SensitivityProfile, ms) -> dict:
    return {m: derrida_homogeneous(N, profile.s, n, m) for m in ms}


def sweep_ncf(N: int, n: int, ms) -> list[SweepRow]:
    """Derrida values of homogeneous NCF networks, one row per Hamming weight."""
    ms = list(ms)
    if n > N:
        raise ValueError("n must not exceed N")
    rows = []
    for spec in ncf_layer_specs(n):
        values = _sweep_values(N, n, layered_sensitivity_profile(n, spec.layer_sizes), ms)
        for b1 in (0, 1):
            st = stats(build_layered(spec, b1=b1))
            rows.append(
                SweepRow(n, spec.layer_sizes, n, spec.r, spec.layer_sizes[0], 1, st.weight, st.absolute_bias, dict(values))
            )
    rows.sort(key=lambda row: row.w)
    return rows


def realizable_core_counts(n_vars: int) -> list[int]:
    """Off-counts ``v`` of non-canalizing, non-constant cores on ``n_vars`` variables."""
    if n_vars < 2:
        return []
    return list(range(2, (1 << n_vars) - 1))


def is_realizable(spec: LayerSpec) -> bool:
    """Whether :func:`build_layered` decomposes back to ``spec``.

    A constant residual after a one-variable last layer merges that variable
    into the previous layer, and a core with one off (or one on) row is itself
    canalizing.
    """
    if spec.is_ncf:
        return True
    cells = 1 << (spec.n - spec.k)
    if spec.v == cells:
        return spec.layer_sizes[-1] >= 2 or spec.k == 1
    return 2 <= spec.v <= cells - 2


def sweep_layered(n: int, k: int, ms=(1,), N: int = 100) -> list[SweepRow]:
    """Rows over every layer structure of depth ``k`` and every realizable ``v``.

    Only ``D1`` is exact for an individual function; larger ``m`` use the
    weighted activity sum, which ignores how the core reacts to multi-bit flips.
    """
    ms = list(ms)
    if not 1 <= k < n:
        raise ValueError("sweep_layered needs 1 <= k < n")
    rows = []
    for sizes in compositions(k):
        for v in realizable_core_counts(n - k):
            spec = LayerSpec(n, sizes, v)
            profile = layered_sensitivity_profile(n, sizes, v)
            st = stats(build_layered(spec))
            rows.append(
                SweepRow(n, sizes, k, len(sizes), sizes[0], v, st.weight, st.absolute_bias, _sweep_values(N, n, profile, ms))
            )
    return rows


@dataclass
class DepthRow:
    n: int
    k: int
    ensemble: str  # "min_depth" or "exact_depth"
    D1: Fraction
    approx: bool = False
    D1_enumerated: Fraction | None = None

    def as_record(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "ensemble": self.ensemble,
            "D1": self.D1,
            "approx": self.approx,
            "D1_enumerated": self.D1_enumerated,
        }


def min_depth_d1(n: int, k: int) -> Fraction:
    """Mean ``D(F, 1)`` over ``k``-canalizing functions (depth at least ``k``)."""
    return sum((expected_activity_k_canalizing(n, k, j) for j in range(1, n + 1)), Fraction(0))


def exact_depth_d1(n: int, k: int, census: CoreCensus) -> tuple[Fraction, Fraction]:
    """Mean ``D(F, 1)`` over functions with canalizing depth exactly ``k``.

    Layer structures are weighted as under uniform canalized outputs (every
    composition of ``k`` equally likely) and ``v`` by the census.  Returns the
    value with the layered formula's shared core activity and the value with
    the census' actual mean core activity.
    """
    if not 1 <= k <= n - 2:
        raise ValueError("exact-depth ensembles need 1 <= k <= n - 2")
    sizes_list = list(compositions(k))
    total_weight = sum(census.weights.values())
    canal = Fraction(0)
    formula_core = Fraction(0)
    for sizes in sizes_list:
        for w, count in census.weights.items():
            # v counts rows != b_k; with b_k uniform, v = w and v = 2**(n-k) - w are equally likely
            for v in (w, (1 << (n - k)) - w):
                weight = Fraction(count, 2 * total_weight * len(sizes_list))
                act = exact_activities_layered(n, sizes, v)
                canal += weight * sum(act.alpha[:k])
                formula_core += weight * sum(act.alpha[k:])
    enumerated_core = (n - k) * census.mean_activity / 2**k
    return canal + formula_core, canal + enumerated_core


def sweep_depth_comparison(n_list, k_list, samples: int = CENSUS_SAMPLES, seed=0) -> list[DepthRow]:
    """Minimum-depth versus exact-depth ensembles for every valid ``(n, k)``.

    The core census is exhaustive for ``n - k <= 4`` and sampled (rows flagged
    ``approx``) above that.
    """
    rows = []
    censuses: dict = {}
    for n in n_list:
        for k in k_list:
            if not 1 <= k <= n:
                continue
            rows.append(DepthRow(n, k, "min_depth", min_depth_d1(n, k)))
            if n - k < 2:
                continue
            if n - k not in censuses:
                censuses[n - k] = core_census(n - k, samples, np.random.SeedSequence([seed, n - k]))
            census = censuses[n - k]
            formula, enumerated = exact_depth_d1(n, k, census)
            rows.append(DepthRow(n, k, "exact_depth", formula, census.approx, enumerated))
    return rows


def table1_correlations(n: int) -> dict:
    """Spearman correlations of ``D(F, 1)`` with ``k1``, absolute bias and ``r`` over all NCF layer structures."""
    specs = ncf_layer_specs(n)
    d1, k1, bias, r = [], [], [], []
    for spec in specs:
        profile = layered_sensitivity_profile(n, spec.layer_sizes)
        d1.append(float(profile.S[1]))
        k1.append(spec.layer_sizes[0])
        bias.append(float(stats(build_layered(spec)).absolute_bias))
        r.append(spec.r)
    return {
        "n": n,
        "structures": len(specs),
        "k1": spearman(d1, k1),
        "abs_bias": spearman(d1, bias),
        "r": spearman(d1, r),
    }
