"""The tunable network: gate configurations, their circuits, and the oracle."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qtnn.boolean_core import (
    Anf,
    ArityError,
    BooleanFunction,
    anf_from_truth_table,
    truth_table_from_anf,
    word_from_str,
    word_to_str,
)
from qtnn.statevector import GateOp, StateVector, mcx_inplace


@dataclass(frozen=True)
class TnnConfig:
    """Bit ``u`` of ``gates`` set means gate ``G_u`` is ``C_u``, otherwise identity."""

    n: int
    gates: int = 0

    def __post_init__(self):
        if self.gates < 0 or self.gates >> (1 << self.n):
            raise ArityError(f"gate bits do not fit in 2**{self.n}")

    @classmethod
    def identity(cls, n: int) -> TnnConfig:
        return cls(n, 0)

    @classmethod
    def parse(cls, text: str) -> TnnConfig:
        """Inverse of :meth:`serialize`."""
        n = len(text).bit_length() - 1
        if len(text) != 1 << n or set(text) - {"0", "1"}:
            raise ArityError(f"not a serialized configuration: {text!r}")
        return cls(n, sum(1 << u for u, ch in enumerate(text) if ch == "1"))

    def serialize(self) -> str:
        return "".join(str((self.gates >> u) & 1) for u in range(1 << self.n))

    def active(self) -> list[int]:
        return [u for u in range(1 << self.n) if (self.gates >> u) & 1]

    def __getitem__(self, u: int | str) -> int:
        if isinstance(u, str):
            u = word_from_str(u)
        return (self.gates >> u) & 1

    def computed_function(self) -> BooleanFunction:
        return truth_table_from_anf(phi_inverse(self))

    def circuit(self, order=None) -> list[GateOp]:
        """The ``C_u`` gates on ``n + 1`` qubits, ascending ``u`` unless ``order`` is given."""
        us = self.active() if order is None else list(order)
        return [_gate_for(u, self.n) for u in us]

    def __str__(self) -> str:
        return self.serialize()


def _gate_for(u: int, n: int) -> GateOp:
    controls = [i for i in range(n) if (u >> (n - 1 - i)) & 1]
    return GateOp.mcx(n, controls)


@dataclass(frozen=True)
class Oracle:
    """Marks wrong outputs: ``|x>|q> -> |x>|q XOR f(x)>``."""

    f: BooleanFunction

    @property
    def n(self) -> int:
        return self.f.n

    def config(self) -> TnnConfig:
        return phi(anf_from_truth_table(self.f))


def phi(a: Anf) -> TnnConfig:
    return TnnConfig(a.n, a.coeffs)


def phi_inverse(c: TnnConfig) -> Anf:
    return Anf(c.n, c.gates)


def toggle_gate(c: TnnConfig, u: int | str) -> TnnConfig:
    if isinstance(u, str):
        if len(u) != c.n:
            raise ArityError(f"expected a {c.n}-bit word, got {u!r}")
        u = word_from_str(u)
    if not 0 <= u < 1 << c.n:
        raise ArityError(f"gate index {u} out of range for n={c.n}")
    return TnnConfig(c.n, c.gates ^ (1 << u))


def toggle_gates(c: TnnConfig, us) -> TnnConfig:
    for u in us:
        c = toggle_gate(c, u)
    return c


def apply_tnn_inplace(c: TnnConfig, amps: np.ndarray, order=None) -> None:
    # Inputs x_0..x_{n-1} sit above the readout bit, so monomial mask u maps to u << 1.
    us = c.active() if order is None else order
    for u in us:
        mcx_inplace(amps, u << 1, 0, 1)


def _check_register(n: int, s: StateVector) -> None:
    if s.n_qubits != n + 1:
        raise ArityError(f"network on {n} inputs needs {n + 1} qubits, state has {s.n_qubits}")


def apply_tnn(c: TnnConfig, s: StateVector, order=None) -> StateVector:
    """Apply every active ``C_u``; ``order`` overrides the default ascending order."""
    _check_register(c.n, s)
    if order is not None and sorted(order) != c.active():
        raise ValueError("order must be a permutation of the active gates")
    amps = s.copy_amps()
    apply_tnn_inplace(c, amps, order)
    return StateVector(s.n_qubits, amps)


def apply_oracle(o: Oracle, s: StateVector) -> StateVector:
    _check_register(o.n, s)
    return apply_tnn(o.config(), s)


def describe(c: TnnConfig) -> str:
    return ", ".join(word_to_str(u, c.n) for u in c.active()) or "(identity)"
