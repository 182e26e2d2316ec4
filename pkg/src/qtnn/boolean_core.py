"""Exact GF(2) algebra on Boolean functions of ``n`` variables.

Conventions shared by the whole package:

* An input word ``x = x_0 ... x_{n-1}`` is identified with the integer whose
  most significant bit is ``x_0``. ``"011"`` is therefore ``3``.
* Truth tables and ANF coefficient vectors are packed into a Python ``int``:
  bit ``k`` of the integer is the entry for the word whose value is ``k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_ARITY = 16
MAX_MATRIX_ARITY = 6


class ArityError(ValueError):
    """Operands of incompatible or unsupported arity."""


class ParseError(ValueError):
    """Malformed truth-table string or ANF expression."""


def _check_arity(n: int) -> None:
    if not 0 <= n <= MAX_ARITY:
        raise ArityError(f"arity must be in [0, {MAX_ARITY}], got {n}")


def word_from_str(text: str) -> int:
    """``"011"`` -> 3. The empty string is the unique word of arity 0."""
    if text and set(text) - {"0", "1"}:
        raise ParseError(f"not a binary word: {text!r}")
    return int(text, 2) if text else 0


def word_to_str(x: int, n: int) -> str:
    return format(x, f"0{n}b") if n else ""


def hamming_weight(x: int) -> int:
    return x.bit_count()


def eval_monomial(u: int | str, x: int | str, n: int | None = None) -> int:
    """Value of the monomial selected by ``u`` at the point ``x``.

    Words may be given as bit strings (their lengths must agree) or as
    integers. ``u = 0`` is the empty product, which is 1 everywhere.
    """
    if isinstance(u, str) or isinstance(x, str):
        if not (isinstance(u, str) and isinstance(x, str)):
            raise ArityError("cannot mix string and integer words")
        if len(u) != len(x):
            raise ArityError(f"arity mismatch: {len(u)} vs {len(x)}")
        u, x = word_from_str(u), word_from_str(x)
    elif n is not None and (u >> n or x >> n):
        raise ArityError(f"word does not fit in {n} bits")
    return int(x & u == u)


@lru_cache(maxsize=None)
def _full(n: int) -> int:
    return (1 << (1 << n)) - 1


@lru_cache(maxsize=None)
def _butterfly_masks(n: int) -> tuple[tuple[int, int], ...]:
    # For each integer bit j: mask of positions x with bit j clear.
    full = _full(n)
    masks = []
    for j in range(n):
        s = 1 << j
        block = (1 << s) - 1
        masks.append((s, block * (full // ((1 << (2 * s)) - 1))))
    return tuple(masks)


def mobius(bits: int, n: int) -> int:
    """Binary Mobius transform of a packed length-``2**n`` bitvector.

    The transform is an involution over GF(2), so the same routine maps a
    truth table to its ANF coefficients and back.
    """
    for shift, mask in _butterfly_masks(n):
        bits ^= (bits & mask) << shift
    return bits


@dataclass(frozen=True)
class BooleanFunction:
    """Truth table of a function B^n -> B."""

    n: int
    table: int

    def __post_init__(self):
        _check_arity(self.n)
        if self.table < 0 or self.table >> (1 << self.n):
            raise ArityError(f"table does not fit in 2**{self.n} bits")

    @classmethod
    def from_bits(cls, bits) -> BooleanFunction:
        """Build from a sequence of 0/1 values listed for x = 0, 1, 2, ..."""
        bits = [int(b) for b in bits]
        n = len(bits).bit_length() - 1
        if len(bits) != 1 << n:
            raise ArityError(f"table length {len(bits)} is not a power of two")
        return cls(n, sum(b << k for k, b in enumerate(bits) if b))

    @classmethod
    def from_callable(cls, n: int, fn) -> BooleanFunction:
        return cls(n, sum(1 << x for x in range(1 << n) if fn(x)))

    @classmethod
    def from_index(cls, n: int, index: int) -> BooleanFunction:
        """Function number ``index`` in the sweep enumeration: bit ``x`` of ``index`` is ``f(x)``.

        So ``f_1`` is 1 only at ``00...0`` and ``f_{2^(2^n)-1}`` is the constant 1.
        """
        if not 0 <= index < 1 << (1 << n):
            raise ArityError(f"function index {index} out of range for n={n}")
        return cls(n, index)

    @property
    def index(self) -> int:
        return self.table

    @classmethod
    def zero(cls, n: int) -> BooleanFunction:
        return cls(n, 0)

    def __call__(self, x: int | str) -> int:
        if isinstance(x, str):
            if len(x) != self.n:
                raise ArityError(f"expected a {self.n}-bit word, got {x!r}")
            x = word_from_str(x)
        return (self.table >> x) & 1

    def __xor__(self, other: BooleanFunction) -> BooleanFunction:
        return xor_functions(self, other)

    def bits(self) -> list[int]:
        return [(self.table >> x) & 1 for x in range(1 << self.n)]

    def bitstring(self) -> str:
        return "".join(map(str, self.bits()))

    def support(self) -> list[int]:
        """Words where the function is 1, in increasing order."""
        return [x for x in range(1 << self.n) if (self.table >> x) & 1]

    def to_array(self) -> np.ndarray:
        return np.array(self.bits(), dtype=np.uint8)

    def __str__(self) -> str:
        return self.bitstring()


@dataclass(frozen=True)
class Anf:
    """ANF coefficients: bit ``u`` set means the monomial ``m_u`` is present."""

    n: int
    coeffs: int

    def __post_init__(self):
        _check_arity(self.n)
        if self.coeffs < 0 or self.coeffs >> (1 << self.n):
            raise ArityError(f"coefficients do not fit in 2**{self.n} bits")

    @classmethod
    def from_bits(cls, bits) -> Anf:
        f = BooleanFunction.from_bits(bits)
        return cls(f.n, f.table)

    @classmethod
    def from_monomials(cls, n: int, monomials) -> Anf:
        coeffs = 0
        for u in monomials:
            coeffs ^= 1 << (word_from_str(u) if isinstance(u, str) else u)
        return cls(n, coeffs)

    def __getitem__(self, u: int | str) -> int:
        if isinstance(u, str):
            u = word_from_str(u)
        return (self.coeffs >> u) & 1

    def __xor__(self, other: Anf) -> Anf:
        if self.n != other.n:
            raise ArityError(f"arity mismatch: {self.n} vs {other.n}")
        return Anf(self.n, self.coeffs ^ other.coeffs)

    def monomials(self) -> list[int]:
        return [u for u in range(1 << self.n) if (self.coeffs >> u) & 1]

    def bits(self) -> list[int]:
        return [(self.coeffs >> u) & 1 for u in range(1 << self.n)]

    def __str__(self) -> str:
        return format_anf(self)


def anf_from_truth_table(f: BooleanFunction) -> Anf:
    return Anf(f.n, mobius(f.table, f.n))


def truth_table_from_anf(a: Anf) -> BooleanFunction:
    return BooleanFunction(a.n, mobius(a.coeffs, a.n))


def xor_functions(f: BooleanFunction, g: BooleanFunction) -> BooleanFunction:
    if f.n != g.n:
        raise ArityError(f"arity mismatch: {f.n} vs {g.n}")
    return BooleanFunction(f.n, f.table ^ g.table)


def transform_matrix(n: int, max_arity: int = MAX_MATRIX_ARITY) -> np.ndarray:
    """Dense GF(2) matrix with entry ``(x, u) = m_u(x)``."""
    if not 0 <= n <= max_arity:
        raise ArityError(f"transform matrix limited to n <= {max_arity}, got {n}")
    idx = np.arange(1 << n)
    return ((idx[:, None] & idx[None, :]) == idx[None, :]).astype(np.uint8)


def format_monomial(u: int, n: int) -> str:
    if u == 0:
        return "1"
    return ".".join(f"x{i}" for i in range(n) if (u >> (n - 1 - i)) & 1)


def format_anf(a: Anf) -> str:
    """Render as ``1^x0^x0.x1``; terms ordered by degree, then lexicographically."""
    if not a.coeffs:
        return "0"
    terms = sorted(
        a.monomials(),
        key=lambda u: (hamming_weight(u), [i for i in range(a.n) if (u >> (a.n - 1 - i)) & 1]),
    )
    return "^".join(format_monomial(u, a.n) for u in terms)


_VAR = re.compile(r"x(\d+)\Z")


def parse_anf(text: str, n: int) -> Anf:
    """Parse an ANF expression such as ``x0^x1^x0.x1`` (whitespace ignored)."""
    _check_arity(n)
    body = "".join(text.split())
    if not body:
        raise ParseError("empty expression")
    if body == "0":
        return Anf(n, 0)
    coeffs = 0
    for term in body.split("^"):
        if not term:
            raise ParseError(f"empty term in {text!r}")
        if term == "1":
            coeffs ^= 1
            continue
        u = 0
        for factor in term.split("."):
            m = _VAR.match(factor)
            if m is None:
                raise ParseError(f"malformed factor {factor!r} in {text!r}")
            i = int(m.group(1))
            if i >= n:
                raise ParseError(f"variable x{i} out of range for n={n}")
            u |= 1 << (n - 1 - i)
        coeffs ^= 1 << u
    return Anf(n, coeffs)


def parse_function(text: str, n: int) -> BooleanFunction:
    """Parse either a ``2**n``-character truth table or an ANF expression."""
    _check_arity(n)
    body = "".join(text.split())
    if body and set(body) <= {"0", "1"} and body not in ("0", "1"):
        if len(body) != 1 << n:
            raise ParseError(f"truth table needs {1 << n} characters, got {len(body)}")
        return BooleanFunction.from_bits(body) if n else BooleanFunction(0, int(body))
    if n == 0 and body in ("0", "1"):
        # Ambiguous at arity 0; both readings agree.
        return BooleanFunction(0, int(body))
    return truth_table_from_anf(parse_anf(body, n))
