import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qtnn.boolean_core import hamming_weight, word_from_str
from qtnn.state_prep import (
    build_circuit,
    compose_transpositions,
    decompose_transpositions,
    gray_circuit,
    permutation_stage,
    prepare,
    ranking,
    reference_amplitudes,
    reference_weights,
    rotation_stage,
    sigma,
    theta,
    weight_rank,
)
from qtnn.statevector import basis_state

RANKING_N4 = {
    "0000": 0, "0001": 1, "0010": 2, "0011": 5, "0100": 3, "0101": 6, "0110": 7, "0111": 11,
    "1000": 4, "1001": 8, "1010": 9, "1011": 12, "1100": 10, "1101": 13, "1110": 14, "1111": 15,
}  # fmt: skip


def brute_ranking(n):
    order = sorted(range(1 << n), key=lambda x: (hamming_weight(x), x))
    return {x: r for r, x in enumerate(order)}


def ry(t):
    return np.array([[math.cos(t / 2), -math.sin(t / 2)], [math.sin(t / 2), math.cos(t / 2)]])


def induced_map(gates, n):
    """Image of each basis word under a classical (MCX-only) circuit."""
    image = []
    for x in range(1 << n):
        s = basis_state(n, x).evolve(gates)
        nz = np.flatnonzero(s.amps)
        assert len(nz) == 1 and s.amps[nz[0]] == 1
        image.append(int(nz[0]))
    return image


@pytest.mark.parametrize(
    "word, rank",
    [("0011", 1), ("1100", 6), ("0000", 1), ("1000", 4), ("0001", 1), ("0111", 1), ("1110", 4), ("1111", 1)],
)
def test_weight_rank(word, rank):
    assert weight_rank(word_from_str(word), 4) == rank


def test_ranking_n4():
    p = ranking(4).p
    for word, rank in RANKING_N4.items():
        assert p[word_from_str(word)] == rank
    assert ranking(1).p == (0, 1)


@pytest.mark.parametrize("n", range(0, 11))
def test_ranking_bijective_and_weight_monotone(n):
    r = ranking(n)
    assert sorted(r.p) == list(range(1 << n))
    assert all(r.inverse[r.p[x]] == x for x in range(1 << n))
    assert dict(enumerate(r.p)) == brute_ranking(n)


def test_theta_matrices():
    s5, s3 = math.sqrt(5), math.sqrt(3)
    assert np.allclose(ry(2 * theta(1)), np.array([[2, -1], [1, 2]]) / s5, atol=1e-12, rtol=0)
    assert np.allclose(ry(2 * theta(0)), np.array([[math.sqrt(2), -1], [1, math.sqrt(2)]]) / s3, atol=1e-12, rtol=0)
    values = [theta(k) for k in range(20)]
    assert all(a > b for a, b in zip(values, values[1:12]))
    assert values[-1] < 1e-300


def test_theta_against_definition():
    for k in range(6):
        big = 2 ** (2**k)
        assert theta(k) == pytest.approx(math.acos(math.sqrt(big / (big + 1))), abs=1e-12)


def test_u_down_matrix_n2():
    u = np.kron(ry(2 * theta(1)), ry(2 * theta(0)))
    r8, r2 = math.sqrt(8), math.sqrt(2)
    expected = np.array([[r8, -2, -r2, 1], [2, r8, -1, -r2], [r2, -1, r8, -2], [1, r2, 2, r8]]) / math.sqrt(15)
    assert np.allclose(u, expected, atol=1e-12, rtol=0)


def test_rotation_stage_examples():
    s = basis_state(2, 0).evolve(rotation_stage(2, "down"))
    assert np.allclose(s.amps, np.array([math.sqrt(8), 2, math.sqrt(2), 1]) / math.sqrt(15), atol=1e-12)
    s = basis_state(1, 0).evolve(rotation_stage(1, "down"))
    assert np.allclose(s.amps, np.array([math.sqrt(2), 1]) / math.sqrt(3), atol=1e-12)
    s = basis_state(2, 0).evolve(rotation_stage(2, "up"))
    assert np.allclose(s.amps, np.array([1, math.sqrt(2), 2, math.sqrt(8)]) / math.sqrt(15), atol=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("direction", ["down", "up"])
def test_rotation_stage_ladder(n, direction):
    s = basis_state(n, 0).evolve(rotation_stage(n, direction))
    x = np.arange(1 << n, dtype=float)
    expo = (2**n - 1 - x) if direction == "down" else x
    expected = np.sqrt(2.0**expo / (2.0 ** (2**n) - 1))
    assert np.allclose(s.amps, expected, atol=1e-12, rtol=0)


def test_sigma_examples():
    assert sigma(3) == (0, 1, 2, 4, 3, 5, 6, 7)
    assert sigma(1) == (0, 1)
    assert sigma(4)[3] == 0b0100


def test_decompose_examples():
    assert decompose_transpositions(range(5)) == []
    assert decompose_transpositions(sigma(3)) == [(0b011, 0b100)]
    s4 = sigma(4)
    assert compose_transpositions(decompose_transpositions(s4), 16) == list(s4)


@given(st.permutations(list(range(12))))
def test_decompose_realizes_permutation(perm):
    ts = decompose_transpositions(perm)
    assert compose_transpositions(ts, len(perm)) == list(perm)
    assert len(ts) <= len(perm) - 1


def test_gray_circuit_three_qubits():
    gates = gray_circuit(0b011, 0b100, 3)
    assert [g.target for g in gates] == [0, 1, 2, 1, 0]
    assert gates[0].controls == (1, 2) and gates[0].anti_controls == ()
    assert gates[1].controls == (0, 2) and gates[1].anti_controls == ()
    assert gates[2].controls == (0,) and gates[2].anti_controls == (1,)
    assert gates[3] == gates[1] and gates[4] == gates[0]


def test_gray_circuit_single_bit():
    gates = gray_circuit(0, 1, 1)
    assert len(gates) == 1 and gates[0].controls == () and gates[0].anti_controls == ()
    with pytest.raises(ValueError):
        gray_circuit(2, 2, 2)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_gray_circuit_is_transposition_exhaustive(n):
    for a, b in itertools.permutations(range(1 << n), 2):
        image = induced_map(gray_circuit(a, b, n), n)
        expected = [b if x == a else a if x == b else x for x in range(1 << n)]
        assert image == expected


def test_permutation_stage_n3_matrix():
    image = induced_map(permutation_stage(3), 3)
    m = np.zeros((8, 8), dtype=int)
    m[image, range(8)] = 1
    expected = np.eye(8, dtype=int)
    expected[[3, 4]] = expected[[4, 3]]
    assert np.array_equal(m, expected)


@pytest.mark.parametrize("n", range(1, 7))
def test_permutation_stage_realizes_sigma(n):
    assert induced_map(permutation_stage(n), n) == list(sigma(n))


@pytest.mark.parametrize("n", range(1, 7))
@pytest.mark.parametrize("direction", ["down", "up"])
def test_prepare_matches_closed_form(n, direction):
    circuit, state = prepare(n, direction)
    assert np.all(state.amps[1::2] == 0)
    assert np.max(np.abs(state.amps[0::2] - reference_amplitudes(n, direction))) < 1e-9
    _, direct = prepare(n, direction, direct=True)
    assert np.max(np.abs(direct.amps - state.amps)) < 1e-9


def test_prepare_examples():
    _, s = prepare(3, "down")
    p = ranking(3).p
    for x in range(8):
        assert s.amps[2 * x] == pytest.approx(math.sqrt(2 ** (7 - p[x]) / 255), abs=1e-12)
    c, s = prepare(1, "down")
    assert c.permutation == () and np.allclose(s.amps, [math.sqrt(2 / 3), 0, math.sqrt(1 / 3), 0])
    _, s = prepare(2, "down")
    assert np.allclose(s.amps[0::2] ** 2 * 15, [8, 4, 2, 1])


def test_reference_amplitudes():
    assert np.allclose(reference_amplitudes(2, "down"), np.sqrt([8, 4, 2, 1]) / math.sqrt(15))
    assert np.allclose(reference_amplitudes(2, "up"), np.sqrt([1, 2, 4, 8]) / math.sqrt(15))
    for n in range(0, 6):
        for d in ("down", "up"):
            assert sum(reference_weights(n, d)) == 1
    assert np.isfinite(reference_amplitudes(10, "down")).all()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_unique_subset_sums(n):
    p = ranking(n).p
    top = 2**n - 1
    sums = set()
    for mask in range(1 << (1 << n)):
        sums.add(sum(2 ** (top - p[x]) for x in range(1 << n) if (mask >> x) & 1))
    assert len(sums) == 1 << (1 << n)


def test_circuit_dump():
    text = build_circuit(3, "down").dump().splitlines()
    assert len(text) == 8
    assert text[0].startswith("RY target=0 theta=")
    assert text[5] == "MCX target=2 pos=100 neg=010"
