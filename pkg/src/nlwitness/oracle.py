"""Independent entanglement verdicts: negativity and linear-inversion tomography.

For two qubits the partial-transpose criterion is exact, so the negativity
verdict is the ground truth the witness estimates are audited against.
Tomography reconstructs a state from the 36 product projectors of the nine
{z, x, y} x {z, x, y} basis settings by a least-squares inversion followed by
a projection onto the density-matrix cone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalContractError
from .linalg import (
    NEG_EIG_TOL,
    as_ket,
    as_matrix,
    dagger,
    eig_hermitian,
    partial_transpose_b,
    require_density,
)
from .measurement import CountRecord, group_records, product_basis, simulate_counts, stable_seed
from .witness import BASIS_OUTCOMES, LocalProjector

ENTANGLEMENT_TOL = 1e-9

TOMOGRAPHY_GROUPS = tuple(a + b for a in "zxy" for b in "zxy")

__all__ = [
    "ENTANGLEMENT_TOL",
    "TOMOGRAPHY_GROUPS",
    "OracleVerdict",
    "negativity",
    "tomography_projectors",
    "simulate_tomography_counts",
    "linear_inversion",
    "project_to_density",
    "tomography_linear",
    "fidelity",
    "state_fidelity",
    "extract_phase",
]


@dataclass(frozen=True)
class OracleVerdict:
    negativity: float
    min_pt_eigenvalue: float
    entangled: bool

    def to_json(self) -> dict:
        return {
            "negativity": self.negativity,
            "min_pt_eigenvalue": self.min_pt_eigenvalue,
            "entangled": self.entangled,
        }


def negativity(rho) -> OracleVerdict:
    """PPT verdict: sum of negative partial-transpose eigenvalues, sign-flipped.

    A two-qubit density matrix has at most one negative partial-transpose
    eigenvalue; more than one genuine negative indicates a broken input and
    is reported as a contract error.
    """
    rho = require_density(rho)
    w = np.linalg.eigvalsh(partial_transpose_b(rho))
    genuine = int(np.sum(w < -NEG_EIG_TOL))
    if genuine > 1:
        raise NumericalContractError(
            f"partial transpose has {genuine} negative eigenvalues; expected at most one"
        )
    neg = float(-w[w < 0.0].sum()) if np.any(w < 0.0) else 0.0
    return OracleVerdict(
        negativity=neg,
        min_pt_eigenvalue=float(w[0]),
        entangled=bool(w[0] < -ENTANGLEMENT_TOL),
    )


def tomography_projectors() -> list[LocalProjector]:
    """The 36 product projectors of the nine two-arm basis settings."""
    out: list[LocalProjector] = []
    for group in TOMOGRAPHY_GROUPS:
        out.extend(product_basis(group[0], group[1]))
    return out


def simulate_tomography_counts(rho, flux: float, seed: int) -> list[CountRecord]:
    """Poisson counts for all nine tomography settings, one sub-seed per group."""
    records: list[CountRecord] = []
    for group in TOMOGRAPHY_GROUPS:
        basis = product_basis(group[0], group[1])
        records.extend(simulate_counts(rho, basis, flux, stable_seed(seed, "tomo", group)))
    return records


def linear_inversion(records) -> np.ndarray:
    """Least-squares state estimate from per-group normalized frequencies.

    The result is Hermitized but may carry small negative eigenvalues; use
    :func:`project_to_density` (or :func:`tomography_linear`) for a physical
    state.  Raises when the projector set does not span operator space.
    """
    grouped = group_records(records)
    rows = []
    freqs = []
    for group, members in sorted(grouped.items()):
        total = sum(r.counts for r in members)
        if total == 0:
            raise ValueError(f"zero total counts in basis group {group}")
        for r in members:
            rows.append(r.projector.matrix().T.reshape(16))
            freqs.append(r.counts / total)
    a = np.array(rows)
    b = np.array(freqs)
    solution, _, rank, _ = np.linalg.lstsq(a, b, rcond=None)
    if rank < 16:
        raise ValueError(
            f"projector set is informationally incomplete (rank {rank} of 16)"
        )
    rho = solution.reshape(4, 4)
    return 0.5 * (rho + dagger(rho))


def project_to_density(m) -> np.ndarray:
    """Project a Hermitian estimate onto the density cone.

    Negative eigenvalues are clipped to zero and the spectrum renormalized to
    unit trace.
    """
    m = as_matrix(m)
    w, v = eig_hermitian(m)
    clipped = np.clip(w, 0.0, None)
    total = float(clipped.sum())
    if total <= 0.0:
        raise NumericalContractError("estimate has no positive spectral weight")
    rho = (v * (clipped / total)) @ dagger(v)
    return 0.5 * (rho + dagger(rho))


def tomography_linear(records) -> np.ndarray:
    """Physical density-matrix estimate: linear inversion plus cone projection."""
    rho = project_to_density(linear_inversion(records))
    return require_density(rho)


def fidelity(rho, target) -> float:
    """Overlap <t|rho|t> with a pure target ket."""
    rho = as_matrix(rho)
    target = as_ket(target)
    norm_sq = float(np.vdot(target, target).real)
    if abs(norm_sq - 1.0) > 1e-12:
        raise ValueError(f"target ket is not normalized (norm^2 = {norm_sq})")
    value = complex(np.vdot(target, rho @ target))
    if abs(value.imag) > 1e-10:
        raise NumericalContractError(f"fidelity has imaginary residue {value.imag:.3e}")
    if not -1e-10 <= value.real <= 1.0 + 1e-10:
        raise NumericalContractError(f"fidelity {value.real} outside [0, 1]")
    return float(min(max(value.real, 0.0), 1.0))


def state_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 between states."""
    rho = require_density(rho)
    sigma = require_density(sigma)
    w, v = eig_hermitian(rho)
    sqrt_rho = (v * np.sqrt(np.clip(w, 0.0, None))) @ dagger(v)
    inner = sqrt_rho @ sigma @ sqrt_rho
    ev = np.linalg.eigvalsh(0.5 * (inner + dagger(inner)))
    # Numerical zeros of the product matrix would contribute sqrt(eps) ~ 1e-8
    # noise each after the square root; both inputs have unit trace, so an
    # absolute cutoff well below any physical eigenvalue is safe.
    ev = np.where(ev < 1e-13, 0.0, ev)
    value = float(np.sqrt(ev).sum() ** 2)
    return min(max(value, 0.0), 1.0)


def extract_phase(rho, correlated: bool) -> float:
    """Phase of the family coherence: arg(<kk|rho|jj>) or arg(<kj|rho|jk>).

    Returns radians in [0, 2 pi); raises when the coherence is too small to
    carry a phase.
    """
    rho = as_matrix(rho)
    coherence = complex(rho[3, 0]) if correlated else complex(rho[2, 1])
    if abs(coherence) < 1e-12:
        raise ValueError("coherence magnitude below 1e-12; phase is undefined")
    return float(np.angle(coherence) % (2.0 * math.pi))
