"""Training loop for the tunable network.

Each iteration finds the set ``E`` of inputs the current network gets wrong
and toggles the gate ``G_u`` for every ``u`` in ``E``. ``E`` comes either from
inspecting amplitudes directly (ideal mode) or from estimating the readout
probability with a finite number of shots and decoding it back into a
subset (sampled mode).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from qtnn.boolean_core import BooleanFunction, anf_from_truth_table, Anf, hamming_weight
from qtnn.state_prep import DOWN, UP, ranking, reference_amplitudes, with_readout
from qtnn.statevector import StateVector, prob_one
from qtnn.tnn import Oracle, TnnConfig, apply_oracle, apply_tnn, phi, phi_inverse, toggle_gates

ZERO_AMPLITUDE = 1e-12

IDEAL = "ideal"
SAMPLED = "sampled"
PSI_DOWN = "psi_down"
PSI_UP = "psi_up"
UNIFORM = "uniform"
TWO_PHASE = "two_phase"
SOURCES = (PSI_DOWN, PSI_UP, UNIFORM, TWO_PHASE)


class UnsupportedModeError(ValueError):
    """A sampling setup that cannot decode the error set."""


@dataclass(frozen=True)
class QtMode:
    """How the error set is obtained.

    ``policy`` is ``"paper"``, ``"exact"`` or a fixed positive shot count.
    ``source`` selects the input superposition; ``two_phase`` starts on
    ``psi_down`` and moves to ``psi_up`` once the low-weight gates have
    settled. ``simulate`` makes ideal mode read a simulated state vector
    instead of comparing truth tables.
    """

    kind: str = IDEAL
    policy: str | int = "exact"
    seed: int = 0
    source: str | None = None
    mask_depth: int | None = None
    floor_rounding: bool = False
    confirm: bool = True
    switch_updates: int | None = None
    simulate: bool = False

    def __post_init__(self):
        if self.kind not in (IDEAL, SAMPLED):
            raise ValueError(f"unknown qt kind {self.kind!r}")
        if isinstance(self.policy, bool) or not (
            self.policy in ("paper", "exact") or (isinstance(self.policy, int) and self.policy >= 1)
        ):
            raise ValueError(f"shot policy must be 'paper', 'exact' or an int >= 1, got {self.policy!r}")
        if self.source is not None and self.source not in SOURCES:
            raise ValueError(f"unknown superposition source {self.source!r}")

    @property
    def effective_source(self) -> str:
        if self.source is not None:
            return self.source
        return UNIFORM if self.kind == IDEAL else TWO_PHASE

    @classmethod
    def ideal(cls, **kw) -> QtMode:
        return cls(kind=IDEAL, **kw)

    @classmethod
    def sampled(cls, policy="exact", seed=0, **kw) -> QtMode:
        return cls(kind=SAMPLED, policy=policy, seed=seed, **kw)


@dataclass
class TrainReport:
    updates: int
    error_sets: list[frozenset[int]]
    final_config: TnnConfig
    learned_anf: Anf
    error_rate: float
    converged: bool
    shots_per_update: list[int] = field(default_factory=list)


# ---------------------------------------------------------------------------
# qt operation


def wrong_outputs(f: BooleanFunction, c: TnnConfig) -> int:
    """Packed set of inputs where the network's output differs from ``f``."""
    return f.table ^ c.computed_function().table


def _unpack(bits: int) -> frozenset[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return frozenset(out)


def qt_ideal(f: BooleanFunction, c: TnnConfig, amplitudes=None) -> frozenset[int]:
    """Inputs present in the superposition on which the network is wrong.

    ``amplitudes=None`` means every input is present; this path needs no
    state vector and scales to large ``n``.
    """
    wrong = wrong_outputs(f, c)
    if amplitudes is None:
        return _unpack(wrong)
    amplitudes = np.asarray(amplitudes)
    if amplitudes.shape != (1 << f.n,):
        raise ValueError(f"expected {1 << f.n} amplitudes, got shape {amplitudes.shape}")
    present = np.flatnonzero(np.abs(amplitudes) > ZERO_AMPLITUDE)
    return frozenset(int(x) for x in present if (wrong >> int(x)) & 1)


def qt_statevector(f: BooleanFunction, c: TnnConfig, state: StateVector) -> frozenset[int]:
    """Run TNN then the oracle on ``state`` and read which inputs carry readout ``|1>``."""
    out = apply_oracle(Oracle(f), apply_tnn(c, state))
    marked = np.flatnonzero(np.abs(out.amps[1::2]) > ZERO_AMPLITUDE)
    return frozenset(int(x) for x in marked)


def shot_count(n: int, policy: str | int = "exact") -> int:
    """Samples per readout estimate, ``ceil(1 / (16 eps**2))`` for the policy's margin ``eps``."""
    if isinstance(policy, int) and not isinstance(policy, bool):
        if policy < 1:
            raise ValueError(f"fixed shot count must be >= 1, got {policy}")
        return policy
    total = 2 ** (2**n) - 1
    if policy == "paper":
        eps = Fraction(2 ** (2 ** (n - 1)) if n >= 1 else 1, total) if total else Fraction(1)
    elif policy == "exact":
        eps = Fraction(1, 2 * total) if total else Fraction(1)
    else:
        raise ValueError(f"unknown shot policy {policy!r}")
    return max(1, math.ceil(1 / (16 * eps * eps)))


@lru_cache(maxsize=64)
def _bit_positions(n: int, direction: str) -> tuple[int, ...]:
    """Bit of the decoded integer that encodes each input word."""
    top = 2**n - 1
    p = ranking(n).p
    return tuple(top - r if direction == DOWN else r for r in p)


def _mask_floor_bit(n: int, direction: str, mask_depth: int) -> int:
    """Lowest bit kept when decoding only the ``mask_depth`` most heavily weighted weight classes."""
    if direction == DOWN:
        kept = [x for x in range(1 << n) if hamming_weight(x) < mask_depth]
    else:
        kept = [x for x in range(1 << n) if hamming_weight(x) > n - mask_depth]
    if not kept:
        return 2**n
    pos = _bit_positions(n, direction)
    return min(pos[x] for x in kept)


def encode_subset(subset, n: int, direction: str = DOWN) -> Fraction:
    """Exact readout probability when the network is wrong exactly on ``subset``."""
    pos = _bit_positions(n, direction)
    return Fraction(sum(1 << pos[x] for x in subset), 2 ** (2**n) - 1)


def decode_subset(
    p1_estimate: float,
    n: int,
    direction: str = DOWN,
    mask_depth: int | None = None,
    floor_rounding: bool = False,
) -> frozenset[int]:
    """Recover the error set from an estimate of the readout probability.

    The scaled estimate ``p1 * (2**(2**n) - 1)`` is rounded to an integer
    whose binary digits mark the wrong inputs. With ``mask_depth`` only the
    digits of the ``mask_depth`` most heavily weighted Hamming-weight
    classes are decoded; the remaining digits are treated as unknown noise
    centred on half their maximum sum.
    """
    if direction not in (DOWN, UP):
        raise ValueError(f"direction must be 'down' or 'up', got {direction!r}")
    if not 0.0 <= p1_estimate <= 1.0:
        raise ValueError(f"probability out of range: {p1_estimate}")
    total = 2 ** (2**n) - 1
    scaled = Fraction(p1_estimate) * total
    low = 0 if mask_depth is None else _mask_floor_bit(n, direction, mask_depth)
    if floor_rounding:
        high = math.floor(scaled / 2**low)
    else:
        high = round((scaled - Fraction(2**low - 1, 2)) / 2**low)
    value = min(max(high, 0), total >> low) << low
    pos = _bit_positions(n, direction)
    return frozenset(x for x in range(1 << n) if (value >> pos[x]) & 1)


@lru_cache(maxsize=64)
def _prepared(n: int, direction: str) -> StateVector:
    return with_readout(reference_amplitudes(n, direction))


def readout_probability(f: BooleanFunction, c: TnnConfig, direction: str) -> float:
    """``P_1`` after preparing the weighted superposition and running TNN then the oracle."""
    out = apply_oracle(Oracle(f), apply_tnn(c, _prepared(f.n, direction)))
    return prob_one(out, f.n)


def qt_sampled(
    f: BooleanFunction,
    c: TnnConfig,
    mode: QtMode,
    rng: np.random.Generator | None = None,
    direction: str | None = None,
) -> frozenset[int]:
    """Estimate ``P_1`` from ``shot_count`` readouts and decode the error set.

    ``direction`` overrides the superposition chosen by ``mode.source``.
    """
    e, _ = _qt_sampled(f, c, mode, rng, direction)
    return e


def _qt_sampled(f, c, mode, rng, direction):
    if mode.kind != SAMPLED:
        raise ValueError("qt_sampled needs a sampled mode")
    if direction is None:
        source = mode.effective_source
        if source == UNIFORM:
            raise UnsupportedModeError("uniform amplitudes cannot be decoded from a readout probability")
        direction = UP if source == PSI_UP else DOWN
    if rng is None:
        rng = np.random.default_rng(mode.seed)
    shots = shot_count(f.n, mode.policy)
    p1 = readout_probability(f, c, direction)
    ones = int(rng.binomial(shots, min(1.0, max(0.0, p1))))
    e = decode_subset(Fraction(ones, shots), f.n, direction, mode.mask_depth, mode.floor_rounding)
    return e, shots


# ---------------------------------------------------------------------------
# training


def default_max_updates(n: int) -> int:
    return 4 * (n + 1)


def _finish(f, c, updates, sets, shots, converged) -> TrainReport:
    err = bin(wrong_outputs(f, c)).count("1") / (1 << f.n)
    return TrainReport(
        updates=updates,
        error_sets=sets,
        final_config=c,
        learned_anf=phi_inverse(c),
        error_rate=err,
        converged=converged,
        shots_per_update=shots,
    )


def _train_ideal(f, mode, max_updates, amplitudes):
    n = f.n
    source = mode.effective_source
    if amplitudes is None and source != UNIFORM:
        amplitudes = reference_amplitudes(n, UP if source == PSI_UP else DOWN)
    if mode.simulate:
        state = with_readout(amplitudes) if amplitudes is not None else _uniform(n)

        def qt(c):
            return qt_statevector(f, c, state)

    else:

        def qt(c):
            return qt_ideal(f, c, amplitudes)

    c = TnnConfig.identity(n)
    e = qt(c)
    sets = [e]
    updates = 0
    while e and updates < max_updates:
        c = toggle_gates(c, e)
        updates += 1
        e = qt(c)
        sets.append(e)
    return _finish(f, c, updates, sets, [], not e)


def _uniform(n):
    from qtnn.state_prep import uniform_state

    return uniform_state(n)


def _train_sampled(f, mode, max_updates):
    n = f.n
    source = mode.effective_source
    if source == UNIFORM:
        raise UnsupportedModeError("uniform amplitudes cannot be decoded from a readout probability")
    rng = np.random.default_rng(mode.seed)
    two_phase = source == TWO_PHASE
    direction = UP if source == PSI_UP else DOWN
    switch_at = mode.switch_updates if mode.switch_updates is not None else math.ceil((n + 1) / 2)
    low_weight = n // 2

    def measure(c):
        nonlocal direction
        e, shots = _qt_sampled(f, c, mode, rng, direction)
        if not e and two_phase and mode.confirm:
            # Every word is heavily weighted in one of the two superpositions.
            other = UP if direction == DOWN else DOWN
            e, more = _qt_sampled(f, c, mode, rng, other)
            shots += more
            if e:
                direction = other
        return e, shots

    c = TnnConfig.identity(n)
    e, shots = measure(c)
    sets = [e]
    shot_log = [shots]
    updates = 0
    while e and updates < max_updates:
        c = toggle_gates(c, e)
        updates += 1
        if two_phase and direction == DOWN:
            if updates >= switch_at or all(hamming_weight(x) > low_weight for x in e):
                direction = UP
        e, shots = measure(c)
        sets.append(e)
        shot_log.append(shots)
    return _finish(f, c, updates, sets, shot_log, not e)


def train(
    f: BooleanFunction,
    mode: QtMode | None = None,
    max_updates: int | None = None,
    amplitudes=None,
) -> TrainReport:
    """Learn ``f`` starting from the all-identity network.

    ``amplitudes`` (ideal mode only) fixes the input superposition; by
    default ideal mode uses the uniform superposition.
    """
    mode = mode or QtMode()
    if max_updates is None:
        max_updates = default_max_updates(f.n)
    if max_updates < 1:
        raise ValueError(f"max_updates must be >= 1, got {max_updates}")
    if mode.kind == IDEAL:
        return _train_ideal(f, mode, max_updates, amplitudes)
    if amplitudes is not None:
        raise ValueError("sampled mode prepares its own superposition")
    return _train_sampled(f, mode, max_updates)


def target_config(f: BooleanFunction) -> TnnConfig:
    return phi(anf_from_truth_table(f))
