import numpy as np
import pytest

from nlwitness.errors import NumericalContractError
from nlwitness.linalg import (
    ID4,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    as_ket,
    as_matrix,
    dagger,
    eig_hermitian,
    expect,
    is_hermitian,
    ket_from_json,
    ket_to_json,
    kron,
    matrix_from_json,
    matrix_to_json,
    normalized,
    outer,
    partial_transpose_b,
    require_density,
    require_hermitian,
)


def test_partial_transpose_is_the_expected_index_permutation():
    m = np.arange(16, dtype=complex).reshape(4, 4)
    expected = np.array(
        [
            [0, 4, 2, 6],
            [1, 5, 3, 7],
            [8, 12, 10, 14],
            [9, 13, 11, 15],
        ],
        dtype=complex,
    )
    assert np.array_equal(partial_transpose_b(m), expected)


def test_partial_transpose_is_an_involution():
    rng = np.random.default_rng(11)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    assert np.array_equal(partial_transpose_b(partial_transpose_b(m)), m)


def test_partial_transpose_of_bell_projector_has_minus_half_eigenpair():
    # Checked without any eigensolver: apply the matrix to the known vector.
    phi_plus = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    psi_minus = np.array([0, 1, -1, 0], dtype=complex) / np.sqrt(2)
    pt = partial_transpose_b(outer(phi_plus))
    residual = pt @ psi_minus - (-0.5) * psi_minus
    assert np.max(np.abs(residual)) < 1e-12
    swap_half = 0.5 * np.array(
        [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
    )
    assert np.max(np.abs(pt - swap_half)) < 1e-12


def test_partial_transpose_requires_two_qubit_shape():
    with pytest.raises(ValueError):
        partial_transpose_b(np.eye(3))


def test_pauli_algebra():
    assert np.max(np.abs(PAULI_X @ PAULI_Y - 1j * PAULI_Z)) < 1e-15
    for p in (PAULI_X, PAULI_Y, PAULI_Z):
        assert np.max(np.abs(p @ p - np.eye(2))) < 1e-15
        assert is_hermitian(p)


def test_kron_ordering_arm_a_left():
    zz = kron(PAULI_Z, np.eye(2))
    assert np.array_equal(np.diag(zz).real, [1, 1, -1, -1])
    iz = kron(np.eye(2), PAULI_Z)
    assert np.array_equal(np.diag(iz).real, [1, -1, 1, -1])


def test_kron_matches_block_structure():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 5], [6, 7]], dtype=complex)
    k = kron(a, b)
    assert np.array_equal(k[:2, :2], 1 * b)
    assert np.array_equal(k[:2, 2:], 2 * b)
    assert np.array_equal(k[2:, :2], 3 * b)
    assert np.array_equal(k[2:, 2:], 4 * b)


def test_eig_hermitian_ascending_orthonormal_reconstruction():
    rng = np.random.default_rng(3)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = 0.5 * (g + dagger(g))
    w, v = eig_hermitian(m)
    assert np.all(np.diff(w) >= 0)
    assert np.max(np.abs(dagger(v) @ v - ID4)) < 1e-12
    assert np.max(np.abs((v * w) @ dagger(v) - m)) < 1e-12


def test_eig_hermitian_phase_convention():
    for m in (PAULI_X, PAULI_Y, PAULI_Z):
        _, v = eig_hermitian(m)
        for col in v.T:
            lead = col[np.flatnonzero(np.abs(col) > 1e-9)[0]]
            assert abs(lead.imag) < 1e-12
            assert lead.real > 0


def test_expect_is_real_for_hermitian_pairs():
    rho = 0.25 * ID4
    assert abs(expect(rho, kron(PAULI_Z, PAULI_Z))) < 1e-15
    phi = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    assert abs(expect(outer(phi), kron(PAULI_X, PAULI_X)) - 1.0) < 1e-12


def test_expect_flags_imaginary_residue():
    rho = outer(np.array([1, 1, 0, 0], dtype=complex) / np.sqrt(2))
    skew = np.zeros((4, 4), dtype=complex)
    skew[0, 1] = 1j
    skew[1, 0] = 1j  # not Hermitian: Tr(rho skew) = i for this rho
    with pytest.raises(NumericalContractError):
        expect(rho, skew)


def test_require_hermitian_and_density_guards():
    with pytest.raises(NumericalContractError):
        require_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NumericalContractError):
        require_density(0.5 * ID4)  # trace 2
    bad = np.diag([1.5, -0.5, 0, 0]).astype(complex)
    with pytest.raises(NumericalContractError):
        require_density(bad)
    assert require_density(0.25 * ID4) is not None


def test_as_matrix_and_as_ket_reject_nonfinite():
    with pytest.raises(ValueError):
        as_matrix([[np.nan, 0], [0, 0]])
    with pytest.raises(ValueError):
        as_ket([np.inf, 0])
    with pytest.raises(ValueError):
        as_matrix(np.zeros((2, 3)))


def test_normalized():
    v = normalized([3.0, 4.0])
    assert abs(np.linalg.norm(v) - 1.0) < 1e-15
    with pytest.raises(ValueError):
        normalized([0.0, 0.0])


def test_matrix_json_round_trip():
    rng = np.random.default_rng(5)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    back = matrix_from_json(matrix_to_json(m))
    assert np.array_equal(back, m)
    with pytest.raises(ValueError):
        matrix_from_json({"dim": 4, "re": [[0.0]], "im": [[0.0]]})
    with pytest.raises(ValueError):
        matrix_from_json({"re": [[0.0]]})


def test_ket_json_round_trip():
    v = np.array([0.5, -0.5j, 0, 0.1], dtype=complex)
    assert np.array_equal(ket_from_json(ket_to_json(v)), v)
