"""Dense complex linear algebra for two-qubit operators.

Conventions used throughout the package:

* Kets are 1-D complex ndarrays, operators dense 2-D complex ndarrays.
* Tensor products put arm A on the left, so the two-qubit basis is ordered
  (jj, jk, kj, kk) with arm A's label first.
* Tolerances: ``ATOL_ALG`` for algebraic identities, ``ATOL_EIG`` for
  eigen-residuals and trace residues, ``NEG_EIG_TOL`` for the positivity
  slack granted to reconstructed density matrices.
"""

from __future__ import annotations

import numpy as np

from .errors import NumericalContractError

ATOL_ALG = 1e-12
ATOL_EIG = 1e-10
NEG_EIG_TOL = 1e-10

ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

__all__ = [
    "ATOL_ALG",
    "ATOL_EIG",
    "NEG_EIG_TOL",
    "ID2",
    "ID4",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "as_matrix",
    "as_ket",
    "dagger",
    "kron",
    "outer",
    "normalized",
    "is_hermitian",
    "require_hermitian",
    "require_density",
    "partial_transpose_b",
    "eig_hermitian",
    "expect",
    "matrix_to_json",
    "matrix_from_json",
    "ket_to_json",
    "ket_from_json",
]


def as_matrix(m) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    out = np.asarray(m, dtype=complex)
    if out.ndim != 2 or out.shape[0] != out.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {out.shape}")
    if not np.isfinite(out.view(float)).all():
        raise ValueError("matrix entries must be finite (no NaN/Inf)")
    return out


def as_ket(v) -> np.ndarray:
    """Coerce to a finite 1-D complex vector."""
    out = np.asarray(v, dtype=complex)
    if out.ndim != 1:
        raise ValueError(f"expected a 1-D ket, got shape {out.shape}")
    if not np.isfinite(out.view(float)).all():
        raise ValueError("ket amplitudes must be finite (no NaN/Inf)")
    return out


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a, b) -> np.ndarray:
    """Tensor product with arm A as the left factor: (A x B)[2i+p, 2j+q] = A[i,j] B[p,q]."""
    return np.kron(as_matrix(a), as_matrix(b))


def outer(ket) -> np.ndarray:
    """Rank-1 projector |v><v|."""
    v = as_ket(ket)
    return np.outer(v, np.conj(v))


def normalized(ket) -> np.ndarray:
    v = as_ket(ket)
    n = float(np.linalg.norm(v))
    if n < 1e-12:
        raise ValueError("cannot normalize a (near-)zero vector")
    return v / n


def is_hermitian(m, atol: float = ATOL_ALG) -> bool:
    m = as_matrix(m)
    return bool(np.max(np.abs(m - dagger(m))) <= atol)


def require_hermitian(m, atol: float = ATOL_ALG) -> np.ndarray:
    m = as_matrix(m)
    dev = float(np.max(np.abs(m - dagger(m))))
    if dev > atol:
        raise NumericalContractError(f"matrix is not Hermitian (max deviation {dev:.3e})")
    return m


def require_density(m, atol: float = ATOL_ALG) -> np.ndarray:
    """Validate a density matrix: Hermitian, unit trace, eigenvalues >= -NEG_EIG_TOL."""
    m = require_hermitian(m, atol=atol)
    tr = complex(np.trace(m))
    if abs(tr - 1.0) > 1e-10:
        raise NumericalContractError(f"density matrix trace is {tr}, expected 1")
    w = np.linalg.eigvalsh(m)
    if w[0] < -NEG_EIG_TOL:
        raise NumericalContractError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return m


def partial_transpose_b(m) -> np.ndarray:
    """Partial transpose over arm B: entry (2i+p, 2j+q) -> (2i+q, 2j+p).

    A pure index permutation, so applying it twice is an exact involution.
    """
    m = as_matrix(m)
    if m.shape != (4, 4):
        raise ValueError("partial transpose is defined for 4x4 two-qubit operators")
    return m.reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4).copy()


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (w, v) with eigenvalues ``w`` ascending and eigenvector columns
    ``v[:, i]`` orthonormal.  Each eigenvector's global phase is fixed
    deterministically: the first amplitude with magnitude above 1e-9 is
    rotated to be real and positive.
    """
    m = require_hermitian(m)
    w, v = np.linalg.eigh(m)
    for idx in range(v.shape[1]):
        col = v[:, idx]
        nz = np.flatnonzero(np.abs(col) > 1e-9)
        if nz.size:
            a = col[nz[0]]
            v[:, idx] = col * (np.conj(a) / abs(a))
    return w, v


def expect(rho, obs) -> float:
    """Tr(rho * obs) as a real number.

    The imaginary residue must stay below ATOL_EIG; a larger residue means a
    non-Hermitian observable slipped in and is reported as a contract error.
    """
    rho = as_matrix(rho)
    obs = as_matrix(obs)
    if rho.shape != obs.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {obs.shape}")
    t = complex(np.trace(rho @ obs))
    if abs(t.imag) > ATOL_EIG:
        raise NumericalContractError(f"expectation has imaginary residue {t.imag:.3e}")
    return float(t.real)


def matrix_to_json(m) -> dict:
    """Serialize to the interchange form {"dim": n, "re": [[...]], "im": [[...]]}."""
    m = as_matrix(m)
    return {
        "dim": int(m.shape[0]),
        "re": m.real.tolist(),
        "im": m.imag.tolist(),
    }


def matrix_from_json(data: dict) -> np.ndarray:
    try:
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed matrix object: {exc}") from exc
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValueError(
            f"matrix shape mismatch: dim={dim}, re {re.shape}, im {im.shape}"
        )
    return as_matrix(re + 1j * im)


def ket_to_json(v) -> dict:
    v = as_ket(v)
    return {"re": v.real.tolist(), "im": v.imag.tolist()}


def ket_from_json(data: dict) -> np.ndarray:
    try:
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed ket object: {exc}") from exc
    if re.shape != im.shape or re.ndim != 1:
        raise ValueError("ket components must be 1-D lists of equal length")
    return as_ket(re + 1j * im)
