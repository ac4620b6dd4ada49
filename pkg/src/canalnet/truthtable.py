"""Boolean functions as bit-packed truth tables.

Row ``t`` of a table over ``n`` variables holds ``f(x1, ..., xn)`` where
``t = sum_i x_i * 2**(n - i)``, i.e. ``x1`` is the most significant bit of the
row index and ``xn`` the least significant one.  The table itself is packed
into a Python ``int`` whose bit ``t`` is the value of row ``t``.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

N_MAX = 24


class ExpressionSyntaxError(ValueError):
    """Raised for malformed Boolean expressions; ``position`` is 0-based."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _check_arity(n: int) -> None:
    if n < 0:
        raise ValueError(f"arity must be non-negative, got {n}")
    if n > N_MAX:
        raise ValueError(f"arity {n} exceeds N_MAX={N_MAX}")


@dataclass(frozen=True)
class BooleanFunction:
    """Immutable Boolean function of ``n`` variables.

    Parameters
    ----------
    n : int
        Number of variables.
    bits : int
        Packed truth table, bit ``t`` is the output on row ``t``.
    """

    n: int
    bits: int

    def __post_init__(self):
        _check_arity(self.n)
        if self.bits < 0 or self.bits >> (1 << self.n):
            raise ValueError("truth table has bits beyond row 2**n - 1")

    @classmethod
    def from_table(cls, table) -> "BooleanFunction":
        """Build from a sequence of 0/1 values of length ``2**n``."""
        arr = np.asarray(table, dtype=np.uint8).ravel()
        size = arr.size
        if size == 0 or size & (size - 1):
            raise ValueError(f"table length {size} is not a power of two")
        if np.any(arr > 1):
            raise ValueError("table entries must be 0 or 1")
        n = size.bit_length() - 1
        packed = np.packbits(arr, bitorder="little")
        return cls(n, int.from_bytes(packed.tobytes(), "little"))

    @classmethod
    def constant(cls, n: int, value: int) -> "BooleanFunction":
        return cls(n, _full_mask(n) if value else 0)

    @classmethod
    def variable(cls, n: int, i: int) -> "BooleanFunction":
        """The projection ``f(x) = x_i`` on ``n`` variables (``i`` is 1-based)."""
        return cls.from_table(variable_column(n, i))

    @property
    def size(self) -> int:
        return 1 << self.n

    @cached_property
    def table(self) -> np.ndarray:
        """Truth table as a read-only ``uint8`` array of length ``2**n``."""
        raw = np.frombuffer(self.bits.to_bytes((self.size + 7) // 8, "little"), dtype=np.uint8)
        arr = np.unpackbits(raw, bitorder="little")[: self.size]
        arr.setflags(write=False)
        return arr

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    def is_constant(self) -> bool:
        return self.bits == 0 or self.bits == _full_mask(self.n)

    def complement(self) -> "BooleanFunction":
        return BooleanFunction(self.n, self.bits ^ _full_mask(self.n))

    def __call__(self, x) -> int:
        return evaluate(self, x)

    def render(self) -> str:
        """Binary literal, rows ``0 .. 2**n - 1`` left to right."""
        return "".join("1" if b else "0" for b in self.table)

    def render_hex(self) -> str:
        if self.n < 2:
            raise ValueError("hex literals need n >= 2")
        s = self.render()
        return "0x" + "".join(format(int(s[i : i + 4], 2), "x") for i in range(0, len(s), 4))

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class FunctionStats:
    weight: int
    bias: Fraction
    absolute_bias: Fraction
    essential: frozenset


def _full_mask(n: int) -> int:
    return (1 << (1 << n)) - 1


def variable_column(n: int, i: int) -> np.ndarray:
    """Values of ``x_i`` (1-based) on every row of an ``n``-variable table."""
    rows = np.arange(1 << n, dtype=np.int64)
    return ((rows >> (n - i)) & 1).astype(np.uint8)


def half_mask(n: int, i: int) -> int:
    """Packed mask of the rows where ``x_i = 0``."""
    return BooleanFunction.from_table(1 - variable_column(n, i)).bits if n else 0


def flip_variable(f: BooleanFunction, i: int, mask: int | None = None) -> int:
    """Packed table of ``x -> f(x xor e_i)``."""
    shift = 1 << (f.n - i)
    if mask is None:
        mask = half_mask(f.n, i)
    return ((f.bits & mask) << shift) | ((f.bits >> shift) & mask)


_BINARY = re.compile(r"^[01]+$")
_HEX = re.compile(r"^0[xX][0-9a-fA-F]+$")


def parse_table(literal: str) -> BooleanFunction:
    """Parse a binary (``"0110"``) or hex (``"0x6"``) truth-table literal.

    The first hex digit encodes rows 0-3, its most significant bit being row 0.
    """
    text = literal.strip().replace("_", "")
    if _HEX.match(text):
        digits = text[2:]
        bits = "".join(format(int(d, 16), "04b") for d in digits)
        if len(bits) < 4 or len(bits) & (len(bits) - 1):
            raise ValueError(f"hex literal {literal!r} does not encode 2**n rows with n >= 2")
        text = bits
    elif not _BINARY.match(text):
        raise ValueError(f"invalid truth-table literal {literal!r}")
    if len(text) & (len(text) - 1):
        raise ValueError(f"truth-table length {len(text)} is not a power of two")
    if len(text).bit_length() - 1 > N_MAX:
        raise ValueError(f"arity exceeds N_MAX={N_MAX}")
    return BooleanFunction.from_table([int(ch) for ch in text])


_VAR = re.compile(r"^x([1-9][0-9]*)$")


def parse_expression(text: str, arity: int | None = None) -> BooleanFunction:
    """Evaluate a Boolean expression over ``x1 .. xn`` on every row.

    Operators: ``!``/``~`` (not), ``&``, ``^``, ``|``, parentheses and the
    constants ``0``/``1``.  Precedence is NOT > AND > XOR > OR, all
    left-associative, which is exactly Python's precedence for ``~ & ^ |``,
    so the text is parsed with :mod:`ast` and only that subset is accepted.
    """
    source = text.replace("!", "~")
    try:
        tree = ast.parse(source.strip(), mode="eval")
    except SyntaxError as exc:
        # strip() shifts offsets by the leading whitespace
        lead = len(source) - len(source.lstrip())
        offset = (exc.offset or 1) - 1 + lead
        raise ExpressionSyntaxError(exc.msg, offset) from None
    lead = len(source) - len(source.lstrip())
    stripped = source.strip()

    variables: list[tuple[int, int]] = []

    def check(node):
        if isinstance(node, ast.Expression):
            return check(node.body)
        pos = getattr(node, "col_offset", 0) + lead
        if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.BitAnd, ast.BitOr, ast.BitXor)):
            check(node.left)
            check(node.right)
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Invert):
            check(node.operand)
        elif isinstance(node, ast.Name):
            m = _VAR.match(node.id)
            if not m:
                raise ExpressionSyntaxError(f"unknown identifier {node.id!r}", pos)
            variables.append((int(m.group(1)), pos))
        elif isinstance(node, ast.Constant):
            if ast.get_source_segment(stripped, node) not in ("0", "1"):
                raise ExpressionSyntaxError("only the constants 0 and 1 are allowed", pos)
        else:
            raise ExpressionSyntaxError("unsupported syntax", pos)

    check(tree)
    highest = max((v for v, _ in variables), default=0)
    if arity is None:
        arity = highest
    elif arity < highest:
        raise ValueError(f"explicit arity {arity} is smaller than highest variable index {highest}")
    _check_arity(arity)

    columns = {i: variable_column(arity, i).astype(bool) for i in range(1, highest + 1)}
    size = 1 << arity

    def ev(node) -> np.ndarray:
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.BinOp):
            left, right = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.BitAnd):
                return left & right
            if isinstance(node.op, ast.BitOr):
                return left | right
            return left ^ right
        if isinstance(node, ast.UnaryOp):
            return ~ev(node.operand)
        if isinstance(node, ast.Name):
            return columns[int(node.id[1:])]
        return np.full(size, bool(node.value))

    return BooleanFunction.from_table(ev(tree).astype(np.uint8))


def parse_function(text: str, arity: int | None = None) -> BooleanFunction:
    """Accept either a truth-table literal or an expression."""
    stripped = text.strip()
    if _HEX.match(stripped) or (_BINARY.match(stripped) and len(stripped) > 1):
        f = parse_table(stripped)
        if arity is not None and f.n != arity:
            raise ValueError(f"table literal has arity {f.n}, expected {arity}")
        return f
    return parse_expression(stripped, arity)


def evaluate(f: BooleanFunction, x) -> int:
    x = list(x)
    if len(x) != f.n:
        raise ValueError(f"input has length {len(x)}, function arity is {f.n}")
    row = 0
    for bit in x:
        row = (row << 1) | (1 if bit else 0)
    return (f.bits >> row) & 1


def restrict(f: BooleanFunction, i: int, value: int) -> BooleanFunction:
    """Fix ``x_i = value``; the result keeps the other variables in order."""
    if f.n == 0:
        raise ValueError("cannot restrict a function of zero variables")
    if not 1 <= i <= f.n:
        raise ValueError(f"variable index {i} out of range 1..{f.n}")
    blocks = f.table.reshape(1 << (i - 1), 2, 1 << (f.n - i))
    return BooleanFunction.from_table(blocks[:, 1 if value else 0, :].ravel())


def is_essential(f: BooleanFunction, i: int) -> bool:
    return flip_variable(f, i) != f.bits


def essential_variables(f: BooleanFunction) -> frozenset:
    return frozenset(i for i in range(1, f.n + 1) if is_essential(f, i))


def stats(f: BooleanFunction) -> FunctionStats:
    w = f.weight
    bias = Fraction(2 * w - f.size, f.size)
    return FunctionStats(w, bias, abs(bias), essential_variables(f))


def permute_variables(f: BooleanFunction, perm) -> BooleanFunction:
    """Return ``g`` with ``g(y) = f(x)`` where ``y_{perm[i]} = x_i`` (1-based ``perm``)."""
    perm = list(perm)
    if sorted(perm) != list(range(1, f.n + 1)):
        raise ValueError("perm must be a permutation of 1..n")
    axes = [p - 1 for p in perm]
    cube = f.table.reshape((2,) * f.n) if f.n else f.table
    if f.n:
        cube = np.transpose(cube, np.argsort(axes))
    return BooleanFunction.from_table(np.ascontiguousarray(cube).ravel())
