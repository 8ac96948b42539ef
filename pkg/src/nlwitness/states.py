"""Two-qubit state preparation for OAM photon pairs.

The computational basis per arm is {|j>, |k>}, two orbital-angular-momentum
modes selected out of the source spectrum.  Two-qubit kets use the ordering
(jj, jk, kj, kk) with arm A first.

The source emits (|0,0> + eps |l>_A |-l>_B) / sqrt(1 + eps^2).  Dove prisms
reflect the mode index and imprint a mode-dependent phase; one prism in arm B
produces the phase-correlated family, a prism in each arm the anti-correlated
family.  White-noise admixture and arm-B dephasing provide the noise knobs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import NumericalContractError
from .linalg import (
    ID2,
    ID4,
    PAULI_Z,
    as_ket,
    as_matrix,
    kron,
    matrix_to_json,
    outer,
)

MAX_OAM = 10

BELL_LABELS = ("Phi+", "Phi-", "Psi+", "Psi-")

__all__ = [
    "MAX_OAM",
    "BELL_LABELS",
    "make_correlated",
    "make_anticorrelated",
    "bell_state",
    "mix_white",
    "dephase",
    "dove_prism",
    "QubitSubspace",
    "StateMeta",
    "PreparedState",
    "prepare_via_prisms",
]


def make_correlated(epsilon: float, phase: float) -> np.ndarray:
    """(|jj> + eps e^{i phase} |kk>) / sqrt(1 + eps^2)."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    amp = epsilon * cmath.exp(1j * phase)
    return np.array([1.0, 0.0, 0.0, amp], dtype=complex) / math.sqrt(1.0 + epsilon**2)


def make_anticorrelated(epsilon: float, phase: float) -> np.ndarray:
    """(|jk> + eps e^{i phase} |kj>) / sqrt(1 + eps^2)."""
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    amp = epsilon * cmath.exp(1j * phase)
    return np.array([0.0, 1.0, amp, 0.0], dtype=complex) / math.sqrt(1.0 + epsilon**2)


_BELL_TABLE = {
    "Phi+": np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2),
    "Phi-": np.array([1, 0, 0, -1], dtype=complex) / math.sqrt(2),
    "Psi+": np.array([0, 1, 1, 0], dtype=complex) / math.sqrt(2),
    "Psi-": np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2),
}


def bell_state(label: str) -> np.ndarray:
    """Exact Bell ket for a label in {"Phi+", "Phi-", "Psi+", "Psi-"}."""
    try:
        return _BELL_TABLE[label].copy()
    except KeyError:
        raise ValueError(f"unknown Bell label {label!r}; expected one of {BELL_LABELS}") from None


def mix_white(psi, p: float) -> np.ndarray:
    """p |psi><psi| + (1 - p) * I/4."""
    psi = as_ket(psi)
    if psi.shape != (4,):
        raise ValueError("mix_white expects a two-qubit ket of length 4")
    norm_sq = float(np.vdot(psi, psi).real)
    if abs(norm_sq - 1.0) > 1e-12:
        raise ValueError(f"input ket is not normalized (norm^2 = {norm_sq})")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing weight p must lie in [0, 1], got {p}")
    return p * outer(psi) + (1.0 - p) * ID4 / 4.0


_ZB = kron(ID2, PAULI_Z)


def dephase(rho, gamma: float) -> np.ndarray:
    """Phase-damping channel on arm B (the prism arm).

    rho -> (1+gamma)/2 rho + (1-gamma)/2 (1 x sigma_z) rho (1 x sigma_z).

    Every coherence between arm B's j and k components is multiplied by
    gamma; on the prepared families that is exactly the (jj|kk) and (jk|kj)
    coherences.  Completely positive and trace preserving for any input.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError("dephase expects a 4x4 two-qubit operator")
    return 0.5 * (1.0 + gamma) * rho + 0.5 * (1.0 - gamma) * (_ZB @ rho @ _ZB)


def dove_prism(theta: float) -> Callable[[int], tuple[int, float]]:
    """Mode map of a Dove prism at mode-space angle theta (twice the physical angle).

    An incoming mode m leaves as the reflected mode -m carrying the phase of
    the outgoing label, (-m) * theta; equivalently |m> -> e^{-i m theta} |-m>.
    Applying two prisms at the same angle is the identity up to phase 0.
    """
    def transform(mode: int) -> tuple[int, float]:
        out = -mode
        return out, out * theta

    return transform


@dataclass(frozen=True)
class QubitSubspace:
    """The (j, k) OAM labels spanning each arm's qubit."""

    arm_a: tuple[int, int]
    arm_b: tuple[int, int]

    def __post_init__(self) -> None:
        for name, (j, k) in (("arm_a", self.arm_a), ("arm_b", self.arm_b)):
            if j == k:
                raise ValueError(f"{name} labels must differ, got j = k = {j}")
            if max(abs(j), abs(k)) > MAX_OAM:
                raise ValueError(f"{name} labels {j}, {k} exceed the mode cap {MAX_OAM}")


@dataclass(frozen=True)
class StateMeta:
    epsilon: float
    phase: float
    purity_p: float
    correlated: bool
    ell: int
    theta_a: float | None
    theta_b: float


@dataclass(frozen=True)
class PreparedState:
    """Density matrix plus the preparation bookkeeping that produced it."""

    rho: np.ndarray
    subspace: QubitSubspace
    meta: StateMeta

    def with_noise(self, p: float, gamma: float = 1.0) -> "PreparedState":
        """White-noise admixture at weight p followed by arm-B dephasing."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"purity p must lie in [0, 1], got {p}")
        rho = dephase(p * self.rho + (1.0 - p) * ID4 / 4.0, gamma)
        return replace(self, rho=rho, meta=replace(self.meta, purity_p=p))

    def to_json(self) -> dict:
        data = matrix_to_json(self.rho)
        data["meta"] = {
            "epsilon": self.meta.epsilon,
            "phase": self.meta.phase,
            "p": self.meta.purity_p,
            "correlated": self.meta.correlated,
            "ell": self.meta.ell,
            "thetaA": self.meta.theta_a,
            "thetaB": self.meta.theta_b,
        }
        data["subspace"] = {"armA": list(self.subspace.arm_a), "armB": list(self.subspace.arm_b)}
        return data


def prepare_via_prisms(
    ell: int,
    epsilon: float,
    theta_b: float,
    theta_a: float | None = None,
) -> PreparedState:
    """Push the two-term source through the prism(s) and read off the qubit state.

    One prism (theta_a None) yields the correlated family with phase
    ell * theta_b in the {0, ell} subspace of each arm.  Two prisms yield the
    anti-correlated family with phase ell * (theta_b - theta_a); arm A then
    spans {0, -ell} and arm B {ell, 0}.
    """
    if int(ell) != ell:
        raise ValueError(f"ell must be an integer, got {ell}")
    ell = int(ell)
    if ell == 0:
        raise ValueError("ell = 0 collapses both source terms onto one mode")
    if not 1 <= abs(ell) <= MAX_OAM:
        raise ValueError(f"|ell| must lie in [1, {MAX_OAM}], got {ell}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")

    norm = math.sqrt(1.0 + epsilon**2)
    # Source terms as (mode_a, mode_b, amplitude).
    terms = [(0, 0, 1.0 / norm + 0j), (ell, -ell, epsilon / norm + 0j)]

    prism_b = dove_prism(theta_b)
    transformed = []
    for mode_a, mode_b, amp in terms:
        mode_b, acquired = prism_b(mode_b)
        transformed.append((mode_a, mode_b, amp * cmath.exp(1j * acquired)))
    if theta_a is not None:
        prism_a = dove_prism(theta_a)
        after_a = []
        for mode_a, mode_b, amp in transformed:
            mode_a, acquired = prism_a(mode_a)
            after_a.append((mode_a, mode_b, amp * cmath.exp(1j * acquired)))
        transformed = after_a

    (a1, b1, amp1), (a2, b2, amp2) = transformed
    correlated = theta_a is None
    if correlated:
        # (0, 0) and (ell, ell): j = 0, k = ell on both arms.
        subspace = QubitSubspace(arm_a=(a1, a2), arm_b=(b1, b2))
        ket = np.array([amp1, 0.0, 0.0, amp2], dtype=complex)
        closed_form = ell * theta_b
    else:
        # (0, 0) and (-ell, ell): jA = 0, kA = -ell, jB = ell, kB = 0,
        # placing the source term at |j k> and the reflected term at |k j>.
        subspace = QubitSubspace(arm_a=(a1, a2), arm_b=(b2, b1))
        ket = np.array([0.0, amp1, amp2, 0.0], dtype=complex)
        closed_form = ell * (theta_b - theta_a)

    phase = closed_form % (2.0 * math.pi)
    if epsilon > 0:
        actual = cmath.phase(amp2 / amp1)
        if abs(cmath.exp(1j * actual) - cmath.exp(1j * closed_form)) > 1e-12:
            raise NumericalContractError(
                f"prepared phase {actual} disagrees with closed form {closed_form}"
            )

    meta = StateMeta(
        epsilon=float(epsilon),
        phase=float(phase),
        purity_p=1.0,
        correlated=correlated,
        ell=ell,
        theta_a=None if theta_a is None else float(theta_a),
        theta_b=float(theta_b),
    )
    return PreparedState(rho=outer(ket), subspace=subspace, meta=meta)
