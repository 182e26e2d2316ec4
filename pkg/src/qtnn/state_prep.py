"""Preparation of the dyadically weighted superpositions used for sampled training.

``psi_down`` places squared amplitude ``2**(2**n - 1 - p(x)) / (2**(2**n) - 1)``
on ``|x>|0>``, ``psi_up`` places ``2**p(x) / (2**(2**n) - 1)``, where ``p``
ranks words by Hamming weight and then by integer value. Every subset of
words therefore carries a distinct probability mass.

The circuit is built in two stages: one ``Ry`` per input qubit produces the
amplitude ladder in integer order, then a permutation circuit of
mixed-polarity MCX gates moves each amplitude onto its ranked word.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from qtnn.boolean_core import hamming_weight
from qtnn.statevector import GateOp, StateVector, basis_state

DOWN = "down"
UP = "up"
DIRECTIONS = (DOWN, UP)


def _check_direction(direction: str) -> None:
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")


def weight_rank(x: int, n: int) -> int:
    """1-based rank of ``x`` among the ``n``-bit words of the same weight."""
    w = hamming_weight(x)
    return sum(1 for y in range(x + 1) if hamming_weight(y) == w)


@dataclass(frozen=True)
class Ranking:
    n: int
    p: tuple[int, ...]
    inverse: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.p[x]


def ranking(n: int) -> Ranking:
    """Weight-then-value ranking built by the recursion on weight classes."""
    size = 1 << n
    classes: list[list[int]] = [[] for _ in range(n + 1)]
    for x in range(size):
        classes[hamming_weight(x)].append(x)  # ascending, so list position + 1 is o_h(x)
    p = [0] * size
    prev_max = 0  # p(0) = 0 closes off weight class 0
    for h in range(1, n + 1):
        for o, x in enumerate(classes[h], start=1):
            p[x] = prev_max + o
        prev_max = max(p[x] for x in classes[h])
    inverse = [0] * size
    for x, r in enumerate(p):
        inverse[r] = x
    return Ranking(n, tuple(p), tuple(inverse))


def theta(k: int) -> float:
    """``arccos(sqrt(2**(2**k) / (2**(2**k) + 1)))`` in radians.

    Evaluated as ``atan(2**-(2**(k-1)))``, the same angle, which stays finite
    and accurate when ``2**(2**k)`` overflows a float.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    return math.atan(2.0 ** -(2.0 ** (k - 1)))


def rotation_stage(n: int, direction: str = DOWN) -> list[GateOp]:
    """Qubit ``i`` gets ``Ry(2 theta_{n-1-i})``; the up direction uses ``pi/2 - theta``."""
    _check_direction(direction)
    gates = []
    for i in range(n):
        t = theta(n - 1 - i)
        if direction == UP:
            t = math.pi / 2 - t
        gates.append(GateOp.ry(i, 2 * t))
    return gates


def sigma(n: int) -> tuple[int, ...]:
    """Permutation ``x -> p^{-1}(x)`` sending the rank-``r`` amplitude to its word."""
    return ranking(n).inverse


def decompose_transpositions(perm) -> list[tuple[int, int]]:
    """Split ``perm`` into transpositions by repeatedly fixing its smallest moved point.

    Applying the returned transpositions to basis states in list order
    (first one first) realizes ``perm``.
    """
    current = list(perm)
    if sorted(current) != list(range(len(current))):
        raise ValueError("not a permutation")
    factors = []
    while True:
        moved = [x for x, y in enumerate(current) if x != y]
        if not moved:
            break
        x0 = moved[0]
        y0 = current[x0]
        factors.append((x0, y0))
        # Left-compose the transposition (x0 y0) with the remainder.
        current = [y0 if v == x0 else x0 if v == y0 else v for v in current]
    # Original perm = t_1 o t_2 o ... o t_k, so t_k acts first.
    return factors[::-1]


def compose_transpositions(transpositions, size: int) -> list[int]:
    """Map obtained by applying ``transpositions`` to each basis word in list order."""
    image = list(range(size))
    for a, b in transpositions:
        image = [b if v == a else a if v == b else v for v in image]
    return image


def _flip_gate(src: int, bit: int, n: int) -> GateOp:
    target = n - 1 - bit
    controls, anti = [], []
    for i in range(n):
        if i == target:
            continue
        (controls if (src >> (n - 1 - i)) & 1 else anti).append(i)
    return GateOp.mcx(target, controls, anti)


def gray_path(a: int, b: int, n: int) -> list[int]:
    """Words from ``a`` to ``b`` flipping one differing bit per step, most significant first."""
    path = [a]
    cur = a
    for bit in reversed(range(n)):
        if (a ^ b) >> bit & 1:
            cur ^= 1 << bit
            path.append(cur)
    return path


def gray_circuit(a: int, b: int, n: int) -> list[GateOp]:
    """MCX gates on ``n`` qubits swapping ``|a>`` and ``|b>`` and fixing every other basis state."""
    if a == b:
        raise ValueError("gray_circuit needs two distinct words")
    if not (0 <= a < 1 << n and 0 <= b < 1 << n):
        raise ValueError(f"words must fit in {n} bits")
    path = gray_path(a, b, n)
    steps = [_flip_gate(path[j - 1], (path[j - 1] ^ path[j]).bit_length() - 1, n) for j in range(1, len(path))]
    return steps[:-1] + [steps[-1]] + steps[-2::-1]


def permutation_stage(n: int) -> list[GateOp]:
    gates: list[GateOp] = []
    for a, b in decompose_transpositions(sigma(n)):
        gates.extend(gray_circuit(a, b, n))
    return gates


@dataclass(frozen=True)
class PrepCircuit:
    n: int
    direction: str
    rotation: tuple[GateOp, ...]
    permutation: tuple[GateOp, ...]

    @property
    def gates(self) -> tuple[GateOp, ...]:
        return self.rotation + self.permutation

    def dump(self) -> str:
        return "\n".join(g.dump(self.n) for g in self.gates)


def build_circuit(n: int, direction: str = DOWN) -> PrepCircuit:
    _check_direction(direction)
    return PrepCircuit(n, direction, tuple(rotation_stage(n, direction)), tuple(permutation_stage(n)))


def reference_weights(n: int, direction: str = DOWN) -> list[Fraction]:
    """Exact squared amplitudes from the closed form."""
    _check_direction(direction)
    p = ranking(n).p
    total = 2 ** (2**n) - 1
    top = 2**n - 1
    return [Fraction(2 ** (top - r if direction == DOWN else r), total) for r in p]


def reference_amplitudes(n: int, direction: str = DOWN) -> np.ndarray:
    """Closed-form amplitudes over the ``n`` input words (readout excluded)."""
    _check_direction(direction)
    p = np.array(ranking(n).p, dtype=np.float64)
    top = 2**n - 1
    # sqrt(2**e / (2**(2**n) - 1)) computed in log space to stay finite for large n.
    expo = top - p if direction == DOWN else p
    log_total = (2**n) * math.log(2) + math.log1p(-(2.0 ** -(2**n)))
    return np.exp(0.5 * (expo * math.log(2) - log_total))


def with_readout(amplitudes: np.ndarray) -> StateVector:
    """Embed input-register amplitudes as ``sum a_x |x>|0>``."""
    amplitudes = np.asarray(amplitudes, dtype=np.float64)
    n = amplitudes.size.bit_length() - 1
    amps = np.zeros(amplitudes.size * 2)
    amps[0::2] = amplitudes
    return StateVector(n + 1, amps)


def prepare(n: int, direction: str = DOWN, direct: bool = False) -> tuple[PrepCircuit | None, StateVector]:
    """Circuit and resulting ``n + 1``-qubit state with the readout left in ``|0>``.

    With ``direct=True`` the closed-form amplitudes are written straight
    into the register and no circuit is returned.
    """
    _check_direction(direction)
    if direct:
        return None, with_readout(reference_amplitudes(n, direction))
    circuit = build_circuit(n, direction)
    # Gate qubit indices refer to the input register, which is the top of the joint register.
    state = basis_state(n + 1, 0).evolve(circuit.gates)
    return circuit, state


def uniform_state(n: int) -> StateVector:
    """Hadamard on every input qubit of ``|0...0>|0>``."""
    return basis_state(n + 1, 0).evolve(GateOp.h(i) for i in range(n))
