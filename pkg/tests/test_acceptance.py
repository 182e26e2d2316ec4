"""Acceptance suite. Each test prints exactly one ``PASS``/``FAIL`` line.

Run ``pytest tests/test_acceptance.py -v`` to see the lines alongside pytest's own report.
"""

import math
import random
import time
from fractions import Fraction

import numpy as np
import pytest

from qtnn.boolean_core import (
    BooleanFunction,
    anf_from_truth_table,
    format_anf,
    hamming_weight,
    parse_anf,
    truth_table_from_anf,
)
from qtnn.learner import QtMode, decode_subset, encode_subset, shot_count, target_config, train
from qtnn.state_prep import build_circuit, permutation_stage, prepare, ranking, reference_amplitudes, rotation_stage
from qtnn.statevector import StateVector, basis_state
from qtnn.tnn import TnnConfig, apply_tnn, phi

WORKED_F = BooleanFunction.from_callable(3, lambda x: x in (0b010, 0b100, 0b111))


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else ""))
        assert ok, detail

    return emit


def functions(n):
    return [BooleanFunction(n, t) for t in range(1 << (1 << n))]


def test_criterion_1_anf_fidelity(verdict):
    ok = anf_from_truth_table(BooleanFunction.from_bits([1, 0, 1, 1])).bits() == [1, 1, 0, 1]
    gate_anfs = {
        "0001": "x0.x1",  # AND
        "0111": "x0^x1^x0.x1",  # OR
        "0110": "x0^x1",  # XOR
        "1110": "1^x0.x1",  # NAND
    }
    for bits, anf in gate_anfs.items():
        ok &= format_anf(anf_from_truth_table(BooleanFunction.from_bits(bits))) == anf
    start = time.perf_counter()
    for n in (3, 4):
        for f in functions(n):
            ok &= truth_table_from_anf(anf_from_truth_table(f)) == f
    elapsed = time.perf_counter() - start
    verdict(1, "ANF fidelity", ok and elapsed < 1.0, f"256 + 65536 round trips in {elapsed:.2f}s, limit 1s")


def _basis_images(c: TnnConfig) -> np.ndarray:
    n = c.n
    out = np.empty(1 << (n + 1), dtype=np.int64)
    for b in range(1 << (n + 1)):
        amps = apply_tnn(c, basis_state(n + 1, b)).amps
        nz = np.flatnonzero(amps)
        assert len(nz) == 1 and amps[nz[0]] == 1
        out[b] = nz[0]
    return out


def test_criterion_2_isomorphism(verdict):
    start = time.perf_counter()
    ok = True
    rng = random.Random(2)
    nrng = np.random.default_rng(2)
    for n in (1, 2, 3):
        fs = functions(n)
        configs = [phi(anf_from_truth_table(f)) for f in fs]
        images = np.array([_basis_images(c) for c in configs])
        # |x>|0> -> |x>|f(x)>
        for f, img in zip(fs, images):
            ok &= all(img[x << 1] == (x << 1) | f(x) for x in range(1 << n))
        # Phi(f ^ g) acts as Phi(g) after Phi(f), checked on every basis state.
        tables = np.arange(len(fs))
        for ft in tables:
            composed = images[:, images[ft]]
            ok &= bool(np.array_equal(composed, images[ft ^ tables]))
        # Gate order never changes the state vector bits.
        for c in configs:
            v = nrng.normal(size=1 << (n + 1))
            s = StateVector(n + 1, v / np.linalg.norm(v))
            ref = apply_tnn(c, s).amps
            for _ in range(3):
                order = c.active()
                rng.shuffle(order)
                ok &= bool(np.array_equal(apply_tnn(c, s, order).amps, ref))
    elapsed = time.perf_counter() - start
    verdict(2, "isomorphism suite n<=3", ok and elapsed < 30, f"{elapsed:.1f}s, limit 30s")


def test_criterion_3_worked_trace(verdict):
    r = train(WORKED_F, QtMode.ideal(simulate=True))
    expected_sets = [{0b010, 0b100, 0b111}, {0b011, 0b101}, set()]
    expected_anf = parse_anf("x1 ^ x0 ^ x1.x2 ^ x0.x2 ^ x0.x1.x2", 3)
    ok = r.error_sets == expected_sets and r.learned_anf == expected_anf and r.converged
    verdict(3, "worked training trace", ok, f"E = {[sorted(e) for e in r.error_sets]}")


def test_criterion_4_termination_and_correctness(verdict):
    ok = True
    worst = 0
    for n in (1, 2, 3):
        for f in functions(n):
            r = train(f, QtMode.ideal(simulate=True))
            ok &= r.converged and r.updates <= n + 1 and r.final_config == phi(anf_from_truth_table(f))
            worst = max(worst, r.updates)
    rng = random.Random(4)
    for n, count in ((4, 1000), (10, 100)):
        for _ in range(count):
            f = BooleanFunction(n, rng.getrandbits(1 << n))
            r = train(f, QtMode.ideal())
            ok &= r.converged and r.final_config == target_config(f)
            worst = max(worst, r.updates)
    verdict(4, "termination and correctness", ok and worst <= 2, f"max updates observed {worst}, limit 2")


def test_criterion_5_stratification(verdict):
    ok = True
    for n in (1, 2, 3):
        for f in functions(n):
            for k, e in enumerate(train(f, QtMode.ideal(simulate=True)).error_sets):
                ok &= all(hamming_weight(x) >= k for x in e)
    verdict(5, "stratification of error sets", ok)


def _ry(t):
    return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]])


def test_criterion_6_state_preparation(verdict):
    worst = 0.0
    for n in range(1, 7):
        for d in ("down", "up"):
            _, s = prepare(n, d)
            worst = max(worst, float(np.max(np.abs(s.amps[0::2] - reference_amplitudes(n, d)))))
            worst = max(worst, float(np.max(np.abs(s.amps[1::2]))))
    gates = rotation_stage(2, "down")
    mats = {g.target: _ry(g.theta) for g in gates}
    s5, s3 = math.sqrt(5), math.sqrt(3)
    rot_ok = np.allclose(mats[0], np.array([[2, -1], [1, 2]]) / s5, atol=1e-12, rtol=0)
    rot_ok &= np.allclose(mats[1], np.array([[math.sqrt(2), -1], [1, math.sqrt(2)]]) / s3, atol=1e-12, rtol=0)
    ranking_n4 = [0, 1, 2, 5, 3, 6, 7, 11, 4, 8, 9, 12, 10, 13, 14, 15]
    p_ok = list(ranking(4).p) == ranking_n4
    perm = np.zeros((8, 8), dtype=int)
    for x in range(8):
        perm[np.flatnonzero(basis_state(3, x).evolve(permutation_stage(3)).amps)[0], x] = 1
    expected = np.eye(8, dtype=int)
    expected[[3, 4]] = expected[[4, 3]]
    perm_ok = np.array_equal(perm, expected) and len(build_circuit(3, "down").permutation) == 5
    ok = worst < 1e-9 and rot_ok and p_ok and perm_ok
    verdict(6, "state preparation", ok, f"max amplitude error {worst:.2e}, limit 1e-9")


def test_criterion_7_decoding_oracle(verdict):
    start = time.perf_counter()
    ok = True
    for n in (1, 2, 3):
        size = 1 << n
        for d in ("down", "up"):
            for mask in range(1 << size):
                subset = {x for x in range(size) if (mask >> x) & 1}
                ok &= decode_subset(encode_subset(subset, n, d), n, d) == subset
    elapsed = time.perf_counter() - start
    verdict(7, "subset decoding round trip", ok and elapsed < 10, f"{elapsed:.2f}s, limit 10s")


def test_criterion_8_sampled_training(verdict):
    start = time.perf_counter()
    runs = converged = wrong = 0
    for f in functions(2):
        for trial in range(100):
            seed = int(np.random.SeedSequence(0, spawn_key=(f.index, trial)).generate_state(1)[0])
            r = train(f, QtMode.sampled(policy="exact", seed=seed), max_updates=12)
            runs += 1
            if r.converged:
                converged += r.error_rate == 0
                wrong += r.final_config != target_config(f) or r.error_rate != 0
    elapsed = time.perf_counter() - start
    fraction = converged / runs
    ok = fraction >= 0.95 and wrong == 0 and elapsed < 120
    verdict(8, "sampled training n=2", ok, f"{fraction:.2%} converged, {wrong} wrong, {elapsed:.1f}s, limit 120s")


def test_criterion_9_shot_formula(verdict):
    def by_hand(eps):
        return math.ceil(1 / (16 * eps * eps))

    paper = {2: by_hand(Fraction(4, 15)), 3: by_hand(Fraction(16, 255))}
    exact = {2: by_hand(Fraction(1, 30)), 3: by_hand(Fraction(1, 510))}
    ok = paper == {2: 1, 3: 16} and exact == {2: 57, 3: 16257}
    ok &= all(shot_count(n, "paper") == v for n, v in paper.items())
    ok &= all(shot_count(n, "exact") == v for n, v in exact.items())
    verdict(9, "shot count formula", ok, f"paper {paper}, exact {exact}")
