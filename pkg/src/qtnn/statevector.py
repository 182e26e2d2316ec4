"""Real-amplitude state-vector simulation for MCX, Ry and Hadamard gates.

Every gate in scope has a real matrix, so amplitudes are stored as
``float64``. Qubit ``i`` occupies bit ``n_qubits - 1 - i`` of the basis
index: the register ``|x_0 ... x_{n-1}>|q_r>`` reads as the binary number
``x_0 ... x_{n-1} q_r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

MAX_QUBITS = 24


class GateError(ValueError):
    """Invalid gate specification for the register it is applied to."""


@lru_cache(maxsize=32)
def _indices(n_qubits: int) -> np.ndarray:
    idx = np.arange(1 << n_qubits, dtype=np.int64)
    idx.flags.writeable = False
    return idx


def qubit_bit(n_qubits: int, qubit: int) -> int:
    """Basis-index bit mask of ``qubit``."""
    if not 0 <= qubit < n_qubits:
        raise GateError(f"qubit {qubit} out of range for {n_qubits} qubits")
    return 1 << (n_qubits - 1 - qubit)


def qubits_mask(n_qubits: int, qubits) -> int:
    mask = 0
    for q in qubits:
        mask |= qubit_bit(n_qubits, q)
    return mask


# ---------------------------------------------------------------------------
# in-place kernels on raw amplitude arrays


def mcx_inplace(amps: np.ndarray, pos_mask: int, neg_mask: int, target_bit: int) -> None:
    """Swap the target pair wherever positive controls are 1 and negative ones 0.

    Masks are basis-index bit masks.
    """
    if pos_mask & neg_mask:
        raise GateError("positive and negative control masks overlap")
    if target_bit & (pos_mask | neg_mask):
        raise GateError("target qubit is also a control")
    idx = _indices(amps.size.bit_length() - 1)
    lo = idx[(idx & (pos_mask | neg_mask | target_bit)) == pos_mask]
    hi = lo | target_bit
    amps[lo], amps[hi] = amps[hi], amps[lo].copy()


def ry_inplace(amps: np.ndarray, n_qubits: int, qubit: int, theta: float) -> None:
    if not 0 <= qubit < n_qubits:
        raise GateError(f"qubit {qubit} out of range for {n_qubits} qubits")
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    view = amps.reshape(1 << qubit, 2, 1 << (n_qubits - 1 - qubit))
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = c * a0 - s * a1
    view[:, 1, :] = s * a0 + c * a1


def h_inplace(amps: np.ndarray, n_qubits: int, qubit: int) -> None:
    if not 0 <= qubit < n_qubits:
        raise GateError(f"qubit {qubit} out of range for {n_qubits} qubits")
    view = amps.reshape(1 << qubit, 2, 1 << (n_qubits - 1 - qubit))
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    r = 1 / math.sqrt(2)
    view[:, 0, :] = r * (a0 + a1)
    view[:, 1, :] = r * (a0 - a1)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GateOp:
    """One gate: ``MCX`` with mixed-polarity controls, ``RY`` or ``H``.

    Controls are tuples of qubit indices so the same gate can be applied to
    registers of different sizes (e.g. input qubits only, or inputs plus
    readout).
    """

    kind: str
    target: int
    controls: tuple[int, ...] = ()
    anti_controls: tuple[int, ...] = ()
    theta: float = 0.0

    def __post_init__(self):
        if self.kind not in ("MCX", "RY", "H"):
            raise GateError(f"unknown gate kind {self.kind!r}")
        if self.kind != "MCX" and (self.controls or self.anti_controls):
            raise GateError(f"{self.kind} gates take no controls")
        c, a = set(self.controls), set(self.anti_controls)
        if len(c) != len(self.controls) or len(a) != len(self.anti_controls):
            raise GateError("repeated control qubit")
        if c & a:
            raise GateError("positive and negative controls overlap")
        if self.target in c | a:
            raise GateError("target qubit is also a control")

    @classmethod
    def mcx(cls, target: int, controls=(), anti_controls=()) -> GateOp:
        return cls("MCX", target, tuple(sorted(controls)), tuple(sorted(anti_controls)))

    @classmethod
    def ry(cls, target: int, theta: float) -> GateOp:
        return cls("RY", target, theta=float(theta))

    @classmethod
    def h(cls, target: int) -> GateOp:
        return cls("H", target)

    def apply_inplace(self, amps: np.ndarray, n_qubits: int) -> None:
        if self.kind == "MCX":
            mcx_inplace(
                amps,
                qubits_mask(n_qubits, self.controls),
                qubits_mask(n_qubits, self.anti_controls),
                qubit_bit(n_qubits, self.target),
            )
        elif self.kind == "RY":
            ry_inplace(amps, n_qubits, self.target, self.theta)
        else:
            h_inplace(amps, n_qubits, self.target)

    def dump(self, n_qubits: int) -> str:
        """One line of the circuit dump; masks list qubit 0 first."""
        if self.kind == "MCX":
            pos = "".join("1" if q in self.controls else "0" for q in range(n_qubits))
            neg = "".join("1" if q in self.anti_controls else "0" for q in range(n_qubits))
            return f"MCX target={self.target} pos={pos} neg={neg}"
        if self.kind == "RY":
            return f"RY target={self.target} theta={self.theta:.12f}"
        return f"H target={self.target}"


@dataclass(frozen=True, eq=False)
class StateVector:
    """Joint register state. Operations return new vectors; ``amps`` is read-only."""

    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not 0 <= self.n_qubits <= MAX_QUBITS:
            raise GateError(f"unsupported register size {self.n_qubits}")
        amps = np.array(self.amps, dtype=np.float64)
        if amps.shape != (1 << self.n_qubits,):
            raise GateError(f"expected {1 << self.n_qubits} amplitudes, got shape {amps.shape}")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    def norm(self) -> float:
        return float(np.dot(self.amps, self.amps))

    def copy_amps(self) -> np.ndarray:
        return self.amps.copy()

    def evolve(self, gates) -> StateVector:
        amps = self.amps.copy()
        for g in gates:
            g.apply_inplace(amps, self.n_qubits)
        return StateVector(self.n_qubits, amps)

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.n_qubits == other.n_qubits and np.array_equal(self.amps, other.amps)

    def __hash__(self):
        return hash((self.n_qubits, self.amps.tobytes()))


def basis_state(n_qubits: int, index: int) -> StateVector:
    if not 0 <= index < 1 << n_qubits:
        raise GateError(f"basis index {index} out of range for {n_qubits} qubits")
    amps = np.zeros(1 << n_qubits)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def apply_mcx(s: StateVector, pos_mask: int, neg_mask: int, target: int) -> StateVector:
    """Multi-controlled X. Masks are basis-index bit masks; ``target`` is a qubit index."""
    amps = s.copy_amps()
    mcx_inplace(amps, pos_mask, neg_mask, qubit_bit(s.n_qubits, target))
    return StateVector(s.n_qubits, amps)


def apply_ry(s: StateVector, qubit: int, theta: float) -> StateVector:
    amps = s.copy_amps()
    ry_inplace(amps, s.n_qubits, qubit, theta)
    return StateVector(s.n_qubits, amps)


def apply_h(s: StateVector, qubit: int) -> StateVector:
    amps = s.copy_amps()
    h_inplace(amps, s.n_qubits, qubit)
    return StateVector(s.n_qubits, amps)


def prob_one(s: StateVector, qubit: int) -> float:
    bit = qubit_bit(s.n_qubits, qubit)
    idx = _indices(s.n_qubits)
    sel = s.amps[(idx & bit) != 0]
    return min(1.0, max(0.0, float(np.dot(sel, sel))))


def sample_counts(s: StateVector, qubit: int, shots: int, rng: np.random.Generator) -> int:
    """Number of ``|1>`` outcomes in ``shots`` independent readouts of ``qubit``."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    return int(rng.binomial(shots, prob_one(s, qubit)))
