"""Coincidence-count simulation and witness estimation from counts.

A measurement setting is a complete product basis (four projectors); each
projector's coincidence count is an independent Poisson draw with mean
flux * Tr(rho P).  Estimation normalizes counts within each basis group, so
the three groups z x z, x x x and y x y (twelve simulated outcomes) provide
the eight analysis projectors every Bell-family witness needs.

Error bars come from re-sampling: each recorded count N is replaced by a
Poisson(N) draw and the estimator re-run; the reported sigma is the sample
standard deviation over iterations.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import NumericalContractError
from .linalg import ATOL_ALG, ATOL_EIG, ID4, as_matrix, expect
from .witness import (
    BASIS_OUTCOMES,
    LocalProjector,
    SingularVerdict,
    WitnessSpec,
    SINGULAR_DENOMINATOR_TOL,
)

WITNESS_GROUPS = ("zz", "xx", "yy")

__all__ = [
    "WITNESS_GROUPS",
    "stable_seed",
    "CountRecord",
    "EstimatedValue",
    "product_basis",
    "simulate_counts",
    "simulate_witness_counts",
    "group_records",
    "estimate_probability",
    "estimate_witness",
    "mc_error_bars",
    "records_to_csv",
    "records_from_csv",
]


def stable_seed(*parts) -> int:
    """Deterministic 63-bit sub-seed derived from arbitrary key parts."""
    payload = "::".join(str(p) for p in parts).encode()
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little") >> 1


@dataclass(frozen=True)
class CountRecord:
    """One projector's coincidence count within a basis-group setting."""

    projector: LocalProjector
    counts: int
    basis_group: str
    flux: float
    seed: int

    def __post_init__(self) -> None:
        if self.counts < 0:
            raise ValueError(f"counts must be >= 0, got {self.counts}")
        if self.flux <= 0:
            raise ValueError(f"flux must be > 0, got {self.flux}")
        if self.basis_group != self.projector.basis_group:
            raise ValueError(
                f"basis_group {self.basis_group!r} does not match projector "
                f"{self.projector} (group {self.projector.basis_group!r})"
            )


@dataclass(frozen=True)
class EstimatedValue:
    value: float
    sigma: float
    n_mc: int

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.n_mc < 1:
            raise ValueError(f"n_mc must be >= 1, got {self.n_mc}")


def product_basis(basis_a: str, basis_b: str) -> list[LocalProjector]:
    """The four outcomes of measuring basis_a on arm A and basis_b on arm B."""
    for basis in (basis_a, basis_b):
        if basis not in BASIS_OUTCOMES:
            raise ValueError(f"unknown basis {basis!r}; expected one of {sorted(BASIS_OUTCOMES)}")
    return [
        LocalProjector(a, b)
        for a in BASIS_OUTCOMES[basis_a]
        for b in BASIS_OUTCOMES[basis_b]
    ]


def simulate_counts(rho, basis, flux: float, seed: int) -> list[CountRecord]:
    """Poisson coincidence counts for one complete product basis.

    Deterministic for a given seed; counts are drawn independently per
    projector with mean flux * Tr(rho P).
    """
    rho = as_matrix(rho)
    if flux <= 0:
        raise ValueError(f"flux must be > 0, got {flux}")
    basis = list(basis)
    if len(basis) != 4:
        raise ValueError(f"a complete two-qubit product basis has 4 projectors, got {len(basis)}")
    total = sum((p.matrix() for p in basis), start=np.zeros((4, 4), dtype=complex))
    if float(np.max(np.abs(total - ID4))) > ATOL_EIG:
        raise ValueError("projectors do not resolve the identity; basis is incomplete")
    groups = {p.basis_group for p in basis}
    if len(groups) != 1:
        raise ValueError(f"projectors span several basis groups: {sorted(groups)}")
    group = groups.pop()

    probs = np.array([max(0.0, expect(rho, p.matrix())) for p in basis])
    rng = np.random.default_rng(seed)
    draws = rng.poisson(flux * probs)
    return [
        CountRecord(projector=p, counts=int(n), basis_group=group, flux=float(flux), seed=int(seed))
        for p, n in zip(basis, draws)
    ]


def simulate_witness_counts(rho, flux: float, seed: int) -> list[CountRecord]:
    """Counts for the three witness basis groups, one derived sub-seed each."""
    records: list[CountRecord] = []
    for group in WITNESS_GROUPS:
        basis = product_basis(group[0], group[1])
        records.extend(simulate_counts(rho, basis, flux, stable_seed(seed, group)))
    return records


def group_records(records) -> dict[str, list[CountRecord]]:
    grouped: dict[str, list[CountRecord]] = {}
    for record in records:
        grouped.setdefault(record.basis_group, []).append(record)
    return grouped


def estimate_probability(records, target: LocalProjector) -> float:
    """Relative frequency of the target outcome within its basis group."""
    group = [r for r in records if r.basis_group == target.basis_group]
    by_label = {(r.projector.label_a, r.projector.label_b): r for r in group}
    key = (target.label_a, target.label_b)
    if key not in by_label:
        raise ValueError(f"no record for projector {target} in group {target.basis_group}")
    total = sum(r.counts for r in group)
    if total == 0:
        raise ValueError(f"zero total counts in basis group {target.basis_group}")
    return by_label[key].counts / total


class _EstimatorPlan:
    """Precompiled index arrays mapping a count vector to (w_l, u, w_inf).

    Built once per (records, spec) pair and reused verbatim by the
    re-sampling loop, so point estimates and error bars run the identical
    estimator.
    """

    def __init__(self, records, spec: WitnessSpec):
        records = list(records)
        self.records = records
        self.counts = np.array([r.counts for r in records], dtype=float)

        index: dict[tuple[str, str, str], int] = {}
        for pos, record in enumerate(records):
            key = (record.basis_group, record.projector.label_a, record.projector.label_b)
            if key in index:
                raise ValueError(f"duplicate record for projector {record.projector} in group {key[0]}")
            index[key] = pos

        self.group_ids = sorted({r.basis_group for r in records})
        self.group_slices = []
        for gid in self.group_ids:
            members = np.array([i for i, r in enumerate(records) if r.basis_group == gid])
            self.group_slices.append(members)
        self.group_of_pos = np.array(
            [self.group_ids.index(r.basis_group) for r in records], dtype=int
        )

        # Linear-witness weights over record positions.
        self.wl_weights = np.zeros(len(records))
        for coeff, proj in spec.decomposition:
            key = (proj.basis_group, proj.label_a, proj.label_b)
            if key not in index:
                raise ValueError(
                    f"records are missing projector {proj} from basis group {proj.basis_group}"
                )
            self.wl_weights[index[key]] += coeff

        # Contrast weights: the diagonal of U^{T_B} over the z x z outcomes.
        offdiag = spec.unitary - np.diag(np.diag(spec.unitary))
        if float(np.max(np.abs(offdiag))) > ATOL_ALG:
            raise ValueError(
                "count-based estimation supports unitaries diagonal in the z x z basis only"
            )
        diag = np.diag(spec.u_op)
        if float(np.max(np.abs(diag.imag))) > ATOL_EIG:
            raise NumericalContractError("diagonal unitary has complex diagonal entries")
        self.u_weights = np.zeros(len(records))
        z_labels = [(a, b) for a in ("j", "k") for b in ("j", "k")]
        for entry, (a, b) in zip(diag.real, z_labels):
            key = ("zz", a, b)
            if key not in index:
                raise ValueError(f"records are missing z x z projector ({a},{b})")
            self.u_weights[index[key]] += entry

        # The estimator plugs (w_l, u) into the collapsed winf form, which is
        # valid exactly when the correction observable coincides with W_L.
        if float(np.max(np.abs(spec.b_op - spec.w_l))) > ATOL_EIG:
            raise ValueError(
                "count-based estimation requires (rho_eta U)^{T_B} to equal the linear witness"
            )

        self.analysis_positions = np.flatnonzero(
            (self.wl_weights != 0.0) | (self.u_weights != 0.0)
        )

    def probabilities(self, counts: np.ndarray) -> np.ndarray:
        totals = np.array([counts[members].sum() for members in self.group_slices])
        if np.any(totals == 0):
            empty = [g for g, t in zip(self.group_ids, totals) if t == 0]
            raise ValueError(f"zero total counts in basis group(s) {empty}")
        return counts / totals[self.group_of_pos]

    def evaluate(self, counts: np.ndarray) -> tuple[float, float, float | SingularVerdict]:
        p = self.probabilities(counts)
        wl = float(self.wl_weights @ p)
        u = float(self.u_weights @ p)
        denominator = 1.0 - u * u
        if denominator < SINGULAR_DENOMINATOR_TOL:
            winf: float | SingularVerdict = SingularVerdict(
                w_linear=wl, u=u, denominator=denominator
            )
        else:
            winf = wl - wl * wl - (wl - wl * u) ** 2 / denominator
        return wl, u, winf


def estimate_witness(
    records, spec: WitnessSpec
) -> tuple[EstimatedValue, EstimatedValue, EstimatedValue | SingularVerdict]:
    """Point estimates (w_l, u, w_inf) from recorded counts, sigmas left at 0."""
    plan = _EstimatorPlan(records, spec)
    wl, u, winf = plan.evaluate(plan.counts)
    winf_out: EstimatedValue | SingularVerdict
    if isinstance(winf, SingularVerdict):
        winf_out = winf
    else:
        winf_out = EstimatedValue(winf, 0.0, 1)
    return EstimatedValue(wl, 0.0, 1), EstimatedValue(u, 0.0, 1), winf_out


def mc_error_bars(
    records, spec: WitnessSpec, n_mc: int = 100, seed: int = 0
) -> tuple[EstimatedValue, EstimatedValue, EstimatedValue | SingularVerdict]:
    """Point estimates with re-sampled error bars.

    Iterations that land in the singular regime carry no finite w_inf and are
    excluded from its sigma; if fewer than two nonsingular iterations remain
    the w_inf slot degrades to the point verdict.
    """
    if n_mc < 2:
        raise ValueError(f"n_mc must be >= 2 for a sample standard deviation, got {n_mc}")
    plan = _EstimatorPlan(records, spec)
    wl0, u0, winf0 = plan.evaluate(plan.counts)

    rng = np.random.default_rng(seed)
    wls = np.empty(n_mc)
    us = np.empty(n_mc)
    winfs: list[float] = []
    for i in range(n_mc):
        wl, u, winf = plan.evaluate(rng.poisson(plan.counts).astype(float))
        wls[i] = wl
        us[i] = u
        if not isinstance(winf, SingularVerdict):
            winfs.append(winf)

    wl_est = EstimatedValue(wl0, float(np.std(wls, ddof=1)), n_mc)
    u_est = EstimatedValue(u0, float(np.std(us, ddof=1)), n_mc)
    winf_est: EstimatedValue | SingularVerdict
    if isinstance(winf0, SingularVerdict) or len(winfs) < 2:
        if isinstance(winf0, SingularVerdict):
            winf_est = winf0
        else:
            winf_est = SingularVerdict(w_linear=wl0, u=u0, denominator=1.0 - u0 * u0)
    else:
        winf_est = EstimatedValue(winf0, float(np.std(np.array(winfs), ddof=1)), n_mc)
    return wl_est, u_est, winf_est


_CSV_FIELDS = ("basis_group", "ketA_label", "ketB_label", "counts", "flux", "seed")


def records_to_csv(records, path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_FIELDS)
        for r in records:
            writer.writerow(
                [r.basis_group, r.projector.label_a, r.projector.label_b, r.counts, repr(r.flux), r.seed]
            )


def records_from_csv(path) -> list[CountRecord]:
    out: list[CountRecord] = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames != list(_CSV_FIELDS):
            raise ValueError(f"unexpected CSV header {reader.fieldnames}; expected {list(_CSV_FIELDS)}")
        for row in reader:
            out.append(
                CountRecord(
                    projector=LocalProjector(row["ketA_label"], row["ketB_label"]),
                    counts=int(row["counts"]),
                    basis_group=row["basis_group"],
                    flux=float(row["flux"]),
                    seed=int(row["seed"]),
                )
            )
    return out
