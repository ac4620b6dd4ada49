"""Canalizing variables, layer peeling and core functions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .truthtable import BooleanFunction, half_mask, restrict, variable_column


@dataclass(frozen=True)
class CanalizingStructure:
    """Standard-form invariants of a Boolean function.

    ``order`` holds 1-based variable indices of ``f`` in canalizing order,
    ``inputs``/``outputs`` the matching canalizing inputs and canalized
    outputs.  ``core`` is the residual function on ``core_variables`` (or
    ``None`` when the residual is constant) and ``core_off_count`` counts its
    rows that differ from the last canalized output.
    """

    n: int
    layer_sizes: tuple
    order: tuple
    inputs: tuple
    outputs: tuple
    core: BooleanFunction | None
    core_variables: tuple
    core_off_count: int | None
    residual_value: int | None = None
    layer_of: dict = field(default_factory=dict, compare=False)

    @property
    def depth(self) -> int:
        return len(self.order)

    @property
    def layers(self) -> int:
        return len(self.layer_sizes)

    @property
    def effective_v(self) -> int | None:
        """``v`` as used by the layered-activity formula.

        A constant residual always differs from the last canalized output, so
        it counts as ``2**(n - k)`` off rows.
        """
        if self.depth == 0:
            return None
        if self.core is None:
            return 1 << (self.n - self.depth)
        return self.core_off_count

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "depth": self.depth,
            "layer_sizes": list(self.layer_sizes),
            "order": list(self.order),
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "core": None if self.core is None else self.core.render(),
            "core_variables": list(self.core_variables),
            "core_off_count": self.core_off_count,
            "layer_of": {str(k): v for k, v in sorted(self.layer_of.items())},
        }


def _restriction_bits(f: BooleanFunction, i: int) -> tuple[int, int, int]:
    """Return (rows with x_i=0 packed, rows with x_i=1 packed, half size)."""
    mask = half_mask(f.n, i)
    shift = 1 << (f.n - i)
    return f.bits & mask, (f.bits >> shift) & mask, mask


def find_canalizing_variables(f: BooleanFunction) -> list[tuple[int, int, int]]:
    """All ``(i, a, b)`` with ``f|x_i=a == b`` and ``f|x_i!=a != b``.

    Constant functions are not canalizing, so they return ``[]``.  A variable
    that canalizes for both inputs contributes both triples, ``a = 0`` first.
    """
    if f.n == 0 or f.is_constant():
        return []
    found = []
    for i in range(1, f.n + 1):
        low, high, mask = _restriction_bits(f, i)
        for a, (this, other) in enumerate(((low, high), (high, low))):
            for b, target in ((0, 0), (1, mask)):
                if this == target and other != target:
                    found.append((i, a, b))
    return found


def is_canalizing(f: BooleanFunction) -> bool:
    if f.n == 0 or f.is_constant():
        return False
    for i in range(1, f.n + 1):
        low, high, mask = _restriction_bits(f, i)
        if low in (0, mask) or high in (0, mask):
            return True
    return False


def _restrict_many(f: BooleanFunction, fixed: dict[int, int]) -> BooleanFunction:
    """Fix several (local, 1-based) variables at once."""
    cube = f.table.reshape((2,) * f.n)
    index = tuple(fixed.get(i + 1, slice(None)) for i in range(f.n))
    return BooleanFunction.from_table(np.ascontiguousarray(cube[index]).ravel())


def decompose(f: BooleanFunction) -> CanalizingStructure:
    """Peel canalizing layers until the residual is non-canalizing or constant.

    Every variable that is canalizing in the current residual joins the next
    layer (ascending index); the residual is then restricted by giving each of
    them its non-canalizing input.
    """
    residual = f
    remaining = list(range(1, f.n + 1))
    order, inputs, outputs, sizes = [], [], [], []
    layer_of = {}
    while True:
        triples = find_canalizing_variables(residual)
        if not triples:
            break
        layer = {}
        for i, a, b in triples:
            layer.setdefault(i, (a, b))
        bs = {b for _, b in layer.values()}
        assert len(bs) == 1, "variables of one layer must share their canalized output"
        sizes.append(len(layer))
        for i in sorted(layer):
            a, b = layer[i]
            order.append(remaining[i - 1])
            inputs.append(a)
            outputs.append(b)
            layer_of[remaining[i - 1]] = len(sizes)
        residual = _restrict_many(residual, {i: 1 - a for i, (a, _) in layer.items()})
        remaining = [v for j, v in enumerate(remaining, start=1) if j not in layer]
        if residual.is_constant():
            break

    if order and residual.is_constant():
        value = residual.bits & 1
        assert value != outputs[-1]
        return CanalizingStructure(
            f.n, tuple(sizes), tuple(order), tuple(inputs), tuple(outputs),
            None, tuple(remaining), None, value, layer_of,
        )
    if not order:
        return CanalizingStructure(
            f.n, (), (), (), (), None if f.is_constant() else f, tuple(remaining), None,
            (f.bits & 1) if f.is_constant() else None, {},
        )
    b_k = outputs[-1]
    v = residual.weight if b_k == 0 else residual.size - residual.weight
    return CanalizingStructure(
        f.n, tuple(sizes), tuple(order), tuple(inputs), tuple(outputs),
        residual, tuple(remaining), v, None, layer_of,
    )


def canalizing_depth(f: BooleanFunction) -> int:
    return decompose(f).depth


def is_k_canalizing(f: BooleanFunction, k: int) -> bool:
    if not 0 <= k <= f.n:
        raise ValueError(f"k={k} outside 0..{f.n}")
    return canalizing_depth(f) >= k


def build_canalizing(
    n: int,
    order,
    inputs,
    outputs,
    core: BooleanFunction | None = None,
    residual_value: int | None = None,
) -> BooleanFunction:
    """Assemble the nested if-then-else form.

    ``f = b_1`` if ``x_order[0] = a_1``, else ``b_2`` if ``x_order[1] = a_2``,
    ... else ``core`` evaluated on the remaining variables in ascending order.
    Without a core the residual is the constant ``residual_value`` (defaulting
    to the complement of the last output).
    """
    order = list(order)
    if len(set(order)) != len(order) or any(not 1 <= i <= n for i in order):
        raise ValueError("order must list distinct variable indices in 1..n")
    if not (len(order) == len(inputs) == len(outputs)):
        raise ValueError("order, inputs and outputs must have equal length")
    rest = [i for i in range(1, n + 1) if i not in set(order)]
    size = 1 << n
    if core is not None:
        if core.n != len(rest):
            raise ValueError(f"core has arity {core.n}, expected {len(rest)}")
        rows = np.zeros(size, dtype=np.int64)
        for i in rest:
            rows = (rows << 1) | variable_column(n, i)
        out = core.table[rows].copy()
    else:
        if residual_value is None:
            if not outputs:
                raise ValueError("a depth-0 function needs a core or a residual value")
            residual_value = 1 - outputs[-1]
        out = np.full(size, residual_value, dtype=np.uint8)
    for i, a, b in reversed(list(zip(order, inputs, outputs))):
        out[variable_column(n, i) == a] = b
    return BooleanFunction.from_table(out)


def build_from_structure(s: CanalizingStructure) -> BooleanFunction:
    return build_canalizing(s.n, s.order, s.inputs, s.outputs, s.core, s.residual_value)


def brute_force_depth(f: BooleanFunction) -> int:
    """Reference depth: longest chain of canalizing choices over all orders."""
    memo: dict = {}

    def depth(h: BooleanFunction) -> int:
        if h in memo:
            return memo[h]
        best = 0
        for i, a, _ in find_canalizing_variables(h):
            best = max(best, 1 + depth(restrict(h, i, 1 - a)))
        memo[h] = best
        return best

    return depth(f)
