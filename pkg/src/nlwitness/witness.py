"""Linear and nonlinear entanglement witnesses for two-qubit states.

The linear witness for a target |t> is W_L = (|eta><eta|)^{T_B} with |eta>
the eigenvector of the minimal eigenvalue of (|t><t|)^{T_B}.  Nonlinear
refinements subtract squared correction terms built from a unitary U:

    w1 = Tr(rho W_L)
    w2 = w1 - |Tr(rho (rho_eta U)^{T_B})|^2
    winf = w2 - |Tr(rho W_L) - Tr(rho (rho_eta U)^{T_B}) Tr(rho U^{T_B})|^2
                / (1 - |Tr(rho U^{T_B})|^2)

where rho_eta = |eta><eta|.  Each subtracted term is nonnegative while the
denominator stays positive, so winf <= w2 <= w1 pointwise and a negative
value at any stage certifies entanglement.  When 1 - |u|^2 falls below
``SINGULAR_DENOMINATOR_TOL`` the closed form diverges and ``w_infinity``
returns a :class:`SingularVerdict` instead of a number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalContractError, WitnessConstructionError
from .linalg import (
    as_ket,
    as_matrix,
    eig_hermitian,
    expect,
    ket_from_json,
    ket_to_json,
    kron,
    matrix_from_json,
    matrix_to_json,
    outer,
    partial_transpose_b,
    ATOL_ALG,
    ATOL_EIG,
    ID4,
)
from .states import bell_state

SINGULAR_DENOMINATOR_TOL = 1e-9
MIN_EIGENVALUE_GAP = 1e-8

_SQRT_HALF = 1.0 / math.sqrt(2.0)

SINGLE_QUBIT_KETS = {
    "j": np.array([1.0, 0.0], dtype=complex),
    "k": np.array([0.0, 1.0], dtype=complex),
    "x+": np.array([_SQRT_HALF, _SQRT_HALF], dtype=complex),
    "x-": np.array([_SQRT_HALF, -_SQRT_HALF], dtype=complex),
    "y+": np.array([_SQRT_HALF, _SQRT_HALF * 1j], dtype=complex),
    "y-": np.array([_SQRT_HALF, -_SQRT_HALF * 1j], dtype=complex),
}

BASIS_OUTCOMES = {"z": ("j", "k"), "x": ("x+", "x-"), "y": ("y+", "y-")}

_LABEL_TO_BASIS = {label: basis for basis, pair in BASIS_OUTCOMES.items() for label in pair}

UNITARY_KINDS = ("sigma_zz_neg", "sigma_zz_pos", "twice_psi_plus_witness")

DEFAULT_UNITARY_KIND = {
    "Phi+": "sigma_zz_neg",
    "Phi-": "sigma_zz_neg",
    "Psi+": "sigma_zz_pos",
    "Psi-": "sigma_zz_pos",
}

__all__ = [
    "SINGLE_QUBIT_KETS",
    "BASIS_OUTCOMES",
    "UNITARY_KINDS",
    "DEFAULT_UNITARY_KIND",
    "SINGULAR_DENOMINATOR_TOL",
    "LocalProjector",
    "canonical_decomposition",
    "witness_from_target",
    "make_unitary",
    "WitnessSpec",
    "bell_witness_spec",
    "SingularVerdict",
    "w1",
    "w2",
    "w_infinity",
    "required_measurements",
    "decomposition_matrix",
]


@dataclass(frozen=True)
class LocalProjector:
    """Product projector |a>_A |b>_B identified by its single-qubit labels."""

    label_a: str
    label_b: str

    def __post_init__(self) -> None:
        for label in (self.label_a, self.label_b):
            if label not in SINGLE_QUBIT_KETS:
                raise ValueError(
                    f"unknown projector label {label!r}; expected one of {sorted(SINGLE_QUBIT_KETS)}"
                )

    @property
    def ket_a(self) -> np.ndarray:
        return SINGLE_QUBIT_KETS[self.label_a].copy()

    @property
    def ket_b(self) -> np.ndarray:
        return SINGLE_QUBIT_KETS[self.label_b].copy()

    @property
    def basis_group(self) -> str:
        """Two-letter id of the product basis this outcome belongs to, e.g. "zz"."""
        return _LABEL_TO_BASIS[self.label_a] + _LABEL_TO_BASIS[self.label_b]

    def matrix(self) -> np.ndarray:
        return kron(outer(self.ket_a), outer(self.ket_b))

    def __str__(self) -> str:
        return f"{self.label_a},{self.label_b}"


_DECOMPOSITION_TABLE = {
    "Phi+": (
        (+0.5, "j", "k"), (+0.5, "k", "j"),
        (+0.5, "x+", "x-"), (+0.5, "x-", "x+"),
        (-0.5, "y+", "y-"), (-0.5, "y-", "y+"),
    ),
    "Phi-": (
        (+0.5, "j", "k"), (+0.5, "k", "j"),
        (-0.5, "x+", "x-"), (-0.5, "x-", "x+"),
        (+0.5, "y+", "y-"), (+0.5, "y-", "y+"),
    ),
    "Psi+": (
        (+0.5, "j", "j"), (+0.5, "k", "k"),
        (-0.5, "x+", "x+"), (-0.5, "x-", "x-"),
        (+0.5, "y+", "y-"), (+0.5, "y-", "y+"),
    ),
    "Psi-": (
        (+0.5, "j", "j"), (+0.5, "k", "k"),
        (+0.5, "x+", "x+"), (+0.5, "x-", "x-"),
        (-0.5, "y+", "y-"), (-0.5, "y-", "y+"),
    ),
}


def canonical_decomposition(label: str) -> list[tuple[float, LocalProjector]]:
    """Six-projector local decomposition of the Bell-family linear witness."""
    try:
        rows = _DECOMPOSITION_TABLE[label]
    except KeyError:
        raise ValueError(
            f"no canonical decomposition for {label!r}; expected one of {sorted(_DECOMPOSITION_TABLE)}"
        ) from None
    return [(coeff, LocalProjector(a, b)) for coeff, a, b in rows]


def decomposition_matrix(decomposition) -> np.ndarray:
    """Reassemble sum_i c_i P_i as a dense operator."""
    total = np.zeros((4, 4), dtype=complex)
    for coeff, proj in decomposition:
        total += coeff * proj.matrix()
    return total


def witness_from_target(target) -> tuple[np.ndarray, np.ndarray]:
    """Build (W_L, eta) from an entangled target ket.

    Raises :class:`WitnessConstructionError` when the target's partial
    transpose has no clearly negative minimal eigenvalue, or when that
    eigenvalue is degenerate within ``MIN_EIGENVALUE_GAP``.
    """
    target = as_ket(target)
    if target.shape != (4,):
        raise ValueError("witness targets are two-qubit kets of length 4")
    norm_sq = float(np.vdot(target, target).real)
    if abs(norm_sq - 1.0) > 1e-12:
        raise ValueError(f"target ket is not normalized (norm^2 = {norm_sq})")

    pt = partial_transpose_b(outer(target))
    w, v = eig_hermitian(pt)
    if w[0] >= -MIN_EIGENVALUE_GAP:
        raise WitnessConstructionError(
            f"target has no negative partial-transpose eigenvalue ({w[0]:.3e}); "
            "separable targets admit no witness"
        )
    if w[1] - w[0] <= MIN_EIGENVALUE_GAP:
        raise WitnessConstructionError(
            f"minimal eigenvalue is degenerate (gap {w[1] - w[0]:.3e}); eta is not unique"
        )
    eta = v[:, 0].copy()
    w_l = partial_transpose_b(outer(eta))
    return w_l, eta


def make_unitary(kind: str) -> np.ndarray:
    """Correction unitaries: -sigma_z x sigma_z, +sigma_z x sigma_z, or 2 W_L^{Psi+}."""
    if kind == "sigma_zz_neg":
        u = np.diag([-1.0, 1.0, 1.0, -1.0]).astype(complex)
    elif kind == "sigma_zz_pos":
        u = np.diag([1.0, -1.0, -1.0, 1.0]).astype(complex)
    elif kind == "twice_psi_plus_witness":
        w_l, _ = witness_from_target(bell_state("Psi+"))
        u = 2.0 * w_l
    else:
        raise ValueError(f"unknown unitary kind {kind!r}; expected one of {UNITARY_KINDS}")
    _require_unitary(u)
    return u


def _require_unitary(u: np.ndarray) -> None:
    dev = float(np.max(np.abs(u @ np.conj(u).T - ID4)))
    if dev > ATOL_EIG:
        raise NumericalContractError(f"operator is not unitary (max deviation {dev:.3e})")


@dataclass(frozen=True)
class WitnessSpec:
    """Immutable bundle of everything needed to evaluate one witness family.

    ``b_op`` = (rho_eta U)^{T_B} and ``u_op`` = U^{T_B} are precomputed at
    construction; faithfulness of the local decomposition and the
    W_L = (rho_eta)^{T_B} identity are asserted once here.
    """

    label: str
    w_l: np.ndarray
    eta: np.ndarray
    unitary: np.ndarray
    decomposition: tuple[tuple[float, LocalProjector], ...]
    b_op: np.ndarray = field(init=False, repr=False, compare=False)
    u_op: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        w_l = as_matrix(self.w_l).copy()
        eta = as_ket(self.eta).copy()
        unitary = as_matrix(self.unitary).copy()
        if w_l.shape != (4, 4) or unitary.shape != (4, 4) or eta.shape != (4,):
            raise ValueError("witness operators must be 4x4 with a length-4 eta")
        _require_unitary(unitary)
        rebuilt = partial_transpose_b(outer(eta))
        if float(np.max(np.abs(rebuilt - w_l))) > ATOL_EIG:
            raise NumericalContractError("w_l does not equal (|eta><eta|)^{T_B}")
        assembled = decomposition_matrix(self.decomposition)
        if float(np.max(np.abs(assembled - w_l))) > ATOL_EIG:
            raise NumericalContractError("local decomposition does not reassemble w_l")
        for arr in (w_l, eta, unitary):
            arr.flags.writeable = False
        b_op = partial_transpose_b(outer(eta) @ unitary)
        u_op = partial_transpose_b(unitary)
        b_op.flags.writeable = False
        u_op.flags.writeable = False
        object.__setattr__(self, "w_l", w_l)
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "unitary", unitary)
        object.__setattr__(self, "decomposition", tuple(self.decomposition))
        object.__setattr__(self, "b_op", b_op)
        object.__setattr__(self, "u_op", u_op)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "w_l": matrix_to_json(self.w_l),
            "eta": ket_to_json(self.eta),
            "unitary": matrix_to_json(self.unitary),
            "decomposition": [
                {"coefficient": coeff, "ket_a": proj.label_a, "ket_b": proj.label_b}
                for coeff, proj in self.decomposition
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "WitnessSpec":
        try:
            decomposition = tuple(
                (float(row["coefficient"]), LocalProjector(row["ket_a"], row["ket_b"]))
                for row in data["decomposition"]
            )
            return cls(
                label=str(data["label"]),
                w_l=matrix_from_json(data["w_l"]),
                eta=ket_from_json(data["eta"]),
                unitary=matrix_from_json(data["unitary"]),
                decomposition=decomposition,
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed witness spec object: {exc}") from exc


def bell_witness_spec(label: str, unitary_kind: str | None = None) -> WitnessSpec:
    """Canonical witness bundle for one Bell family, with its default unitary."""
    w_l, eta = witness_from_target(bell_state(label))
    kind = unitary_kind if unitary_kind is not None else DEFAULT_UNITARY_KIND[label]
    return WitnessSpec(
        label=label,
        w_l=w_l,
        eta=eta,
        unitary=make_unitary(kind),
        decomposition=tuple(canonical_decomposition(label)),
    )


@dataclass(frozen=True)
class SingularVerdict:
    """Returned by w_infinity when 1 - |u|^2 < SINGULAR_DENOMINATOR_TOL.

    The closed form diverges there; the linear value alone decides, so the
    verdict is entangled exactly when ``w_linear`` is negative.
    """

    w_linear: float
    u: float
    denominator: float

    @property
    def entangled(self) -> bool:
        return self.w_linear < 0.0


def w1(rho, spec: WitnessSpec) -> float:
    """Linear witness expectation Tr(rho W_L)."""
    return expect(rho, spec.w_l)


def _trace_against(rho: np.ndarray, op: np.ndarray) -> complex:
    return complex(np.trace(as_matrix(rho) @ op))


def w2(rho, spec: WitnessSpec) -> float:
    """First nonlinear refinement: w1 - |Tr(rho (rho_eta U)^{T_B})|^2."""
    b = _trace_against(rho, spec.b_op)
    return w1(rho, spec) - abs(b) ** 2


def w_infinity(rho, spec: WitnessSpec) -> float | SingularVerdict:
    """Fully iterated nonlinear witness; see the module docstring for the form."""
    t = w1(rho, spec)
    b = _trace_against(rho, spec.b_op)
    u = _trace_against(rho, spec.u_op)
    if abs(u.imag) > ATOL_EIG:
        raise NumericalContractError(f"contrast term has imaginary residue {u.imag:.3e}")
    u = u.real
    denominator = 1.0 - abs(u) ** 2
    if denominator < SINGULAR_DENOMINATOR_TOL:
        return SingularVerdict(w_linear=t, u=float(u), denominator=float(denominator))
    return t - abs(b) ** 2 - abs(t - b * u) ** 2 / denominator


_Z_GROUP_LABELS = (("j", "j"), ("j", "k"), ("k", "j"), ("k", "k"))


def required_measurements(spec: WitnessSpec) -> list[LocalProjector]:
    """The distinct product projectors needed to estimate w1 and winf.

    For the diagonal correction unitaries the union is the four z x z
    outcomes plus the witness decomposition's remaining projectors: exactly
    eight, since the decomposition shares one z x z pair.
    """
    offdiag = spec.unitary - np.diag(np.diag(spec.unitary))
    if float(np.max(np.abs(offdiag))) > ATOL_ALG:
        union = {(p.label_a, p.label_b) for _, p in spec.decomposition}
        raise ValueError(
            "unitary is not diagonal in the z x z product basis; its eigenprojectors "
            "are not local product projectors, so the eight-projector contract does "
            f"not apply (local decomposition alone needs {len(union)}: "
            f"{sorted(union)})"
        )
    ordered: list[LocalProjector] = [LocalProjector(a, b) for a, b in _Z_GROUP_LABELS]
    seen = {(p.label_a, p.label_b) for p in ordered}
    for _, proj in spec.decomposition:
        key = (proj.label_a, proj.label_b)
        if key not in seen:
            seen.add(key)
            ordered.append(proj)
    if len(ordered) != 8:
        raise NumericalContractError(
            f"expected 8 analysis projectors, found {len(ordered)} for {spec.label}"
        )
    return ordered
