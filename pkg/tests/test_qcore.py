import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fivequbit.qcore import (
    LETTERS,
    CapacityError,
    DensityOperator,
    DimensionError,
    Ket,
    MeasurementBasis,
    MeasurementError,
    PauliWord,
    QcoreError,
    all_words,
    apply_word,
    inner,
    kron,
    measure,
    partial_trace,
    reduced_density,
)
from fivequbit.states import bell, derive_single_basis, psi5


def rand_ket(n, seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return Ket(z / np.linalg.norm(z), n)


def full_operator(word, targets, n):
    """Oracle: explicit 2^n x 2^n matrix built letter by letter with np.kron."""
    factors = [np.eye(2)] * n
    for letter, t in zip(word.letters, targets):
        factors[t] = LETTERS[letter]
    out = np.ones((1, 1))
    for f in factors:
        out = np.kron(out, f)
    return out


def brute_partial_trace(rho, n, keep):
    """Oracle: sum matrix elements over matching traced-out bits."""
    keep = sorted(keep)
    rest = [q for q in range(n) if q not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for i in range(2**n):
        for j in range(2**n):
            bi, bj = format(i, f"0{n}b"), format(j, f"0{n}b")
            if all(bi[q] == bj[q] for q in rest):
                a = int("".join(bi[q] for q in keep), 2)
                b = int("".join(bj[q] for q in keep), 2)
                out[a, b] += rho[i, j]
    return out


# kron ------------------------------------------------------------------------

def test_kron_basis_states():
    k = kron(Ket.basis("0"), Ket.basis("1"))
    np.testing.assert_array_equal(k.amps, [0, 1, 0, 0])
    assert k.n_qubits == 2


def test_kron_input_with_channel_norm():
    k = kron(rand_ket(1, 3), psi5())
    assert k.dim == 64
    assert k.norm() == pytest.approx(1.0, abs=1e-12)


def test_kron_prefix_then_bell():
    k = kron(Ket.basis("000"), bell("phi_minus"))
    assert k.amps[int("00001", 2)] == pytest.approx(1 / math.sqrt(2), abs=1e-15)
    assert k.amps[int("00010", 2)] == pytest.approx(-1 / math.sqrt(2), abs=1e-15)


def test_kron_capacity_guard():
    with pytest.raises(CapacityError):
        kron(Ket.basis("0" * 7), Ket.basis("0" * 6))
    assert kron(Ket.basis("0" * 7), Ket.basis("0" * 6), max_qubits=13).n_qubits == 13


def test_kron_associative():
    a, b, c = rand_ket(1, 1), rand_ket(2, 2), rand_ket(2, 3)
    np.testing.assert_allclose(kron(kron(a, b), c).amps, kron(a, kron(b, c)).amps, atol=1e-12)


# inner -----------------------------------------------------------------------

def test_inner_examples():
    assert inner(psi5(), psi5()) == pytest.approx(1.0, abs=1e-12)
    assert inner(Ket.basis("01"), Ket.basis("10")) == 0
    b = derive_single_basis()
    assert abs(inner(b.states[0], b.states[1])) < 1e-12


def test_inner_is_conjugate_linear_in_first_argument():
    a = Ket([1j, 0])
    b = Ket([1, 0])
    assert inner(a, b) == pytest.approx(-1j)


def test_inner_dimension_mismatch():
    with pytest.raises(DimensionError):
        inner(Ket.basis("0"), Ket.basis("00"))


# Ket -------------------------------------------------------------------------

def test_ket_rejects_nonfinite_and_bad_length():
    with pytest.raises(QcoreError):
        Ket([np.nan, 0])
    with pytest.raises(DimensionError):
        Ket([1, 0, 0])


def test_ket_is_immutable():
    k = Ket.basis("0")
    with pytest.raises(ValueError):
        k.amps[0] = 2


def test_normalize():
    k = Ket([3, 4]).normalize()
    assert k.norm() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(QcoreError):
        Ket([0, 0]).normalize()


# Pauli words -----------------------------------------------------------------

def test_letters_real_orthogonal():
    for w in all_words(2):
        m = w.matrix()
        assert m.dtype.kind == "f"
        np.testing.assert_allclose(m @ m.T, np.eye(4), atol=1e-15)


def test_word_parsing():
    assert PauliWord.parse("σ1⊗iσ2⊗I").letters == ("X", "iY", "I")
    assert PauliWord.parse("x,iy,z").letters == ("X", "iY", "Z")
    assert str(PauliWord(("Z", "I"))) == "σ3⊗I"
    with pytest.raises(QcoreError):
        PauliWord(("Q",))


def test_canonical_word_order():
    words = all_words(2)
    assert len(words) == 16
    assert words[0].letters == ("I", "I")
    assert words[1].letters == ("I", "X")
    assert words[4].letters == ("X", "I")
    assert words[-1].letters == ("Z", "Z")


def test_apply_word_examples():
    np.testing.assert_array_equal(apply_word(Ket.basis("0"), PauliWord(("X",)), [0]).amps, [0, 1])
    np.testing.assert_array_equal(apply_word(Ket.basis("0"), PauliWord(("iY",)), [0]).amps, [0, -1])
    np.testing.assert_array_equal(apply_word(Ket.basis("1"), PauliWord(("iY",)), [0]).amps, [1, 0])


def test_apply_z_on_first_qubit_of_psi5_flips_1xx_groups():
    out = apply_word(psi5(), PauliWord(("Z", "I", "I")), [0, 1, 2])
    for i, (a, b) in enumerate(zip(psi5().amps, out.amps)):
        sign = -1 if format(i, "05b")[0] == "1" else 1
        assert b == pytest.approx(sign * a, abs=1e-15)


@pytest.mark.parametrize("targets", [[0, 2], [3, 1], [4, 0]])
def test_apply_word_matches_full_operator(targets):
    state = rand_ket(5, 11)
    for w in all_words(2):
        want = full_operator(w, targets, 5) @ state.amps
        np.testing.assert_allclose(apply_word(state, w, targets).amps, want, atol=1e-12)


def test_apply_word_errors():
    with pytest.raises(QcoreError):
        apply_word(psi5(), PauliWord(("X", "X")), [0, 0])
    with pytest.raises(QcoreError):
        apply_word(psi5(), PauliWord(("X",)), [5])
    with pytest.raises(QcoreError):
        apply_word(psi5(), PauliWord(("X",)), [0, 1])


@settings(max_examples=60, deadline=None)
@given(
    k=st.integers(min_value=1, max_value=5),
    data=st.data(),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_apply_word_preserves_norm(k, data, seed):
    letters = data.draw(st.lists(st.sampled_from(["I", "X", "iY", "Z"]), min_size=k, max_size=k))
    targets = data.draw(st.permutations(range(5)))[:k]
    state = rand_ket(5, seed)
    out = apply_word(state, PauliWord(tuple(letters)), targets)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)


# partial trace ---------------------------------------------------------------

def test_partial_trace_bell_gives_half_identity():
    red = partial_trace(bell("psi_plus").projector(), [0])
    np.testing.assert_allclose(red.elems, np.eye(2) / 2, atol=1e-15)


def test_partial_trace_psi5_keep_45_is_quarter_identity():
    red = partial_trace(psi5().projector(), [3, 4])
    np.testing.assert_allclose(red.elems, np.eye(4) / 4, atol=1e-15)


@pytest.mark.parametrize("keep", [[0], [4], [1, 3], [0, 2, 4], [0, 1, 2, 3]])
def test_partial_trace_matches_brute_force(keep):
    state = rand_ket(5, 7)
    rho = state.projector()
    want = brute_partial_trace(rho.elems, 5, keep)
    np.testing.assert_allclose(partial_trace(rho, keep).elems, want, atol=1e-12)
    np.testing.assert_allclose(reduced_density(state, keep).elems, want, atol=1e-12)


def test_partial_trace_keep_all_is_identity_map():
    rho = rand_ket(3, 5).projector()
    np.testing.assert_allclose(partial_trace(rho, [0, 1, 2]).elems, rho.elems, atol=1e-15)


def test_partial_trace_empty_keep():
    with pytest.raises(QcoreError):
        partial_trace(psi5().projector(), [])


@settings(max_examples=40, deadline=None)
@given(keep=st.sets(st.integers(0, 4), min_size=1), seed=st.integers(0, 2**31))
def test_reduced_trace_is_one(keep, seed):
    red = reduced_density(rand_ket(5, seed), keep)
    assert np.trace(red.elems).real == pytest.approx(1.0, abs=1e-12)
    red.validate()


def test_density_operator_validation():
    with pytest.raises(QcoreError):
        DensityOperator(np.array([[1, 1], [0, 0]]))
    with pytest.raises(QcoreError):
        DensityOperator(np.eye(2))
    with pytest.raises(QcoreError):
        DensityOperator(np.diag([1.5, -0.5]))


# measurement -----------------------------------------------------------------

def test_measure_rand_zero_selects_first_outcome():
    basis = MeasurementBasis((Ket.basis("0"), Ket.basis("1")))
    res = measure(Ket([1, 1]).normalize(), basis, [0], 0.0)
    assert res.outcome == 0
    assert res.probability == pytest.approx(0.5)


def test_measure_inverse_cdf():
    basis = MeasurementBasis((Ket.basis("0"), Ket.basis("1")))
    state = Ket([math.sqrt(0.3), math.sqrt(0.7)])
    assert measure(state, basis, [0], 0.2999).outcome == 0
    assert measure(state, basis, [0], 0.3001).outcome == 1
    assert measure(state, basis, [0], 0.9999999).outcome == 1


def test_measure_skips_zero_probability_outcome():
    basis = MeasurementBasis((Ket.basis("0"), Ket.basis("1")))
    assert measure(Ket.basis("1"), basis, [0], 0.0).outcome == 1


def test_measure_post_state_on_remaining_qubits():
    basis = MeasurementBasis((Ket.basis("0"), Ket.basis("1")), ("zero", "one"))
    state = kron(Ket.basis("1"), Ket([0.6, 0.8]))
    res = measure(state, basis, [0], 0.5)
    assert res.label == "one"
    np.testing.assert_allclose(res.post_state.amps, [0.6, 0.8], atol=1e-15)


def test_measure_single_teleport_basis_is_uniform():
    state = kron(rand_ket(1, 42), psi5())
    res = measure(state, derive_single_basis(), [0, 1, 2, 3, 4], 0.6)
    np.testing.assert_allclose(res.probabilities, [0.25] * 4, atol=1e-12)
    assert res.post_state.n_qubits == 1
    assert res.post_state.norm() == pytest.approx(1.0, abs=1e-12)


def test_measure_incomplete_basis_is_rejected():
    basis = MeasurementBasis((Ket.basis("00"),))
    with pytest.raises(MeasurementError):
        measure(Ket.basis("11"), basis, [0, 1], 0.1)


def test_non_orthonormal_basis_rejected():
    with pytest.raises(MeasurementError):
        MeasurementBasis((Ket.basis("0"), Ket([1, 1]).normalize()))


def test_measure_rand_out_of_range():
    basis = MeasurementBasis((Ket.basis("0"), Ket.basis("1")))
    with pytest.raises(QcoreError):
        measure(Ket.basis("0"), basis, [0], 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31), rand=st.floats(0, 1, exclude_max=True),
       on=st.permutations(range(3)))
def test_measure_properties(seed, rand, on):
    # random orthonormal basis on two of three qubits via QR
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    basis = MeasurementBasis(tuple(Ket(q[:, i], 2) for i in range(4)))
    state = rand_ket(3, seed + 1)
    first = measure(state, basis, on[:2], rand)
    again = measure(state, basis, on[:2], rand)
    assert first.probabilities.sum() == pytest.approx(1.0, abs=1e-9)
    assert first.post_state.norm() == pytest.approx(1.0, abs=1e-12)
    assert first.outcome == again.outcome
    np.testing.assert_array_equal(first.post_state.amps, again.post_state.amps)


def test_brute_force_measure_probability_oracle():
    # probability of outcome k equals <state|(P_k ⊗ I)|state> with the projector built explicitly
    basis = derive_single_basis()
    state = kron(rand_ket(1, 9), psi5())
    res = measure(state, basis, [0, 1, 2, 3, 4], 0.1)
    for k, b in enumerate(basis.states):
        proj = np.kron(np.outer(b.amps, b.amps.conj()), np.eye(2))
        p = np.vdot(state.amps, proj @ state.amps).real
        assert res.probabilities[k] == pytest.approx(p, abs=1e-12)


def test_all_words_count():
    assert len(all_words(3)) == 64
    assert len({w.letters for w in all_words(3)}) == 64
    assert list(itertools.islice((w.letters for w in all_words(1)), 4)) == [("I",), ("X",), ("iY",), ("Z",)]
