"""Command-line front end.

Four subcommands: ``sweep`` runs a configured phase sweep and writes any of
csv/json/svg, ``witness`` evaluates the witness hierarchy on a stored
density matrix, ``oracle`` prints the partial-transpose verdict for one,
and ``demo`` runs both default sweeps end to end into an output directory.

Exit codes: 0 success, 2 configuration or input-file problem, 3 violated
numerical contract (an internal cross-check failed; outputs are withheld).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .emit import emit
from .errors import ConfigError, NumericalContractError
from .linalg import matrix_from_json, require_density
from .oracle import ENTANGLEMENT_TOL, negativity
from .states import BELL_LABELS
from .sweep import MODES, SweepConfig, SweepResult, run_sweep
from .witness import (
    DEFAULT_UNITARY_KIND,
    SingularVerdict,
    UNITARY_KINDS,
    bell_witness_spec,
    required_measurements,
    w1,
    w2,
    w_infinity,
)

__all__ = ["build_parser", "main"]


def _load_state(path: str) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read state file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"state file {path} is not valid JSON: {exc}") from exc
    try:
        return require_density(matrix_from_json(data))
    except (ValueError, NumericalContractError) as exc:
        raise ConfigError(f"state file {path} does not hold a density matrix: {exc}") from exc


def _parse_float_list(text: str, flag: str) -> list[float]:
    out = []
    for piece in text.split(","):
        piece = piece.strip()
        if not piece:
            continue
        try:
            out.append(float(piece))
        except ValueError as exc:
            raise ConfigError(f"{flag} expects comma-separated numbers, got {piece!r}") from exc
    if not out:
        raise ConfigError(f"{flag} is empty")
    return out


_SWEEP_FIELD_FLAGS = (
    "mode",
    "ell",
    "epsilon",
    "purity_p",
    "dephasing_gamma",
    "flux",
    "n_mc",
    "seed",
    "tomography",
)


def _cmd_sweep(args: argparse.Namespace) -> int:
    mapping: dict = {}
    if args.config is not None:
        try:
            mapping = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config} is not valid JSON: {exc}") from exc
        if not isinstance(mapping, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
    for name in _SWEEP_FIELD_FLAGS:
        value = getattr(args, name)
        if value is not None:
            mapping[name] = value
    if args.phase_grid is not None:
        mapping["phase_grid"] = _parse_float_list(args.phase_grid, "--phase-grid")
    if args.witnesses is not None:
        mapping["witnesses"] = [w.strip() for w in args.witnesses.split(",") if w.strip()]
    if "mode" not in mapping:
        raise ConfigError("no mode given; pass --mode or a config file with a mode field")

    result = run_sweep(SweepConfig.from_mapping(mapping))
    wrote_any = False
    for fmt in ("csv", "json", "svg"):
        path = getattr(args, f"out_{fmt}")
        if path is not None:
            emit(result, fmt, path)
            wrote_any = True
            if path != "-":
                print(f"wrote {path}", file=sys.stderr)
    if not wrote_any:
        emit(result, "csv", "-")
    return 0


def _nonlinear_json(value) -> dict:
    if isinstance(value, SingularVerdict):
        return {
            "singular": True,
            "w_linear": value.w_linear,
            "u": value.u,
            "denominator": value.denominator,
            "entangled": value.entangled,
        }
    return {"singular": False, "value": value}


def _cmd_witness(args: argparse.Namespace) -> int:
    rho = _load_state(args.state)
    spec = bell_witness_spec(args.label, args.unitary)
    v1 = w1(rho, spec)
    v2 = w2(rho, spec)
    vinf = w_infinity(rho, spec)
    if isinstance(vinf, SingularVerdict):
        entangled = vinf.entangled
    else:
        entangled = vinf < -ENTANGLEMENT_TOL
    out = {
        "label": args.label,
        "unitary_kind": args.unitary or DEFAULT_UNITARY_KIND[args.label],
        "w_1": v1,
        "w_2": v2,
        "w_inf": _nonlinear_json(vinf),
        "entangled": entangled,
    }
    print(json.dumps(out, indent=2))
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    rho = _load_state(args.state)
    print(json.dumps(negativity(rho).to_json(), indent=2))
    return 0


def _demo_summary(mode: str, result: SweepResult) -> list[str]:
    points = result.points
    n = len(points)
    assert result.config.witnesses is not None
    nl_label, plus_label, minus_label = result.config.witnesses
    negatives = {
        plus_label: sum(1 for p in points if p.est_w_l_plus.value < 0.0),
        minus_label: sum(1 for p in points if p.est_w_l_minus.value < 0.0),
        nl_label: sum(
            1
            for p in points
            if not isinstance(p.est_w_inf, SingularVerdict) and p.est_w_inf.value < 0.0
        ),
    }
    entangled = sum(1 for p in points if p.entangled)
    lines = [
        f"[{mode}] contrast {result.metadata['contrast']:g}, "
        f"flux {result.config.flux:g}, n_mc {result.config.n_mc}, seed {result.config.seed}",
        f"[{mode}] oracle: {entangled}/{n} points entangled by partial transpose",
        f"[{mode}] estimates below zero: "
        + ", ".join(f"{label} {negatives[label]}/{n}" for label in (nl_label, plus_label, minus_label)),
    ]
    fidelities = [p.tomo_fidelity for p in points if p.tomo_fidelity is not None]
    if fidelities:
        lines.append(f"[{mode}] tomography: min fidelity {min(fidelities):.4f} over {n} points")
    return lines


def _cmd_demo(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for mode in MODES:
        config = SweepConfig(mode=mode, flux=args.flux, n_mc=args.n_mc, seed=args.seed)
        result = run_sweep(config)
        for fmt in ("csv", "json", "svg"):
            emit(result, fmt, str(out_dir / f"{mode}.{fmt}"))
        print(f"[{mode}] wrote {out_dir}/{mode}.csv .json .svg")
        for line in _demo_summary(mode, result):
            print(line)
    plus = {str(p) for p in required_measurements(bell_witness_spec("Phi+"))}
    anti = {str(p) for p in required_measurements(bell_witness_spec("Psi+"))}
    print(
        f"projector budget: {len(plus)} analysis settings per witness family, "
        f"{len(plus | anti)} distinct across both (shared z group)"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlwitness",
        description="nonlinear entanglement-witness simulation and analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a phase sweep and write csv/json/svg")
    sweep.add_argument("--config", metavar="FILE", help="JSON config; flags override fields")
    sweep.add_argument("--mode", choices=MODES)
    sweep.add_argument("--ell", type=int, help="magnitude of the mode index pair")
    sweep.add_argument("--epsilon", type=float, help="source amplitude ratio")
    sweep.add_argument("--purity-p", dest="purity_p", type=float, help="mixing weight of the pure part")
    sweep.add_argument("--dephasing-gamma", dest="dephasing_gamma", type=float, help="coherence survival factor")
    sweep.add_argument("--phase-grid", dest="phase_grid", metavar="R1,R2,...", help="phases in radians")
    sweep.add_argument("--flux", type=float, help="mean total counts per basis setting")
    sweep.add_argument("--n-mc", dest="n_mc", type=int, help="resampling iterations for error bars")
    sweep.add_argument("--seed", type=int)
    sweep.add_argument("--witnesses", metavar="L1,L2,L3", help="Winf:<target>,WL:<target>,WL:<target>")
    sweep.add_argument("--tomography", action=argparse.BooleanOptionalAction, default=None)
    sweep.add_argument("--csv", dest="out_csv", metavar="PATH", help="write CSV here ('-' for stdout)")
    sweep.add_argument("--json", dest="out_json", metavar="PATH")
    sweep.add_argument("--svg", dest="out_svg", metavar="PATH")
    sweep.set_defaults(func=_cmd_sweep)

    witness = sub.add_parser("witness", help="evaluate the witness hierarchy on a stored state")
    witness.add_argument("--state", required=True, metavar="FILE", help="density-matrix JSON file")
    witness.add_argument("--label", required=True, choices=BELL_LABELS)
    witness.add_argument("--unitary", choices=UNITARY_KINDS, default=None)
    witness.set_defaults(func=_cmd_witness)

    oracle = sub.add_parser("oracle", help="partial-transpose verdict for a stored state")
    oracle.add_argument("--state", required=True, metavar="FILE")
    oracle.set_defaults(func=_cmd_oracle)

    demo = sub.add_parser("demo", help="run both default sweeps into an output directory")
    demo.add_argument("--out-dir", default="demo-out")
    demo.add_argument("--flux", type=float, default=1e4)
    demo.add_argument("--n-mc", dest="n_mc", type=int, default=100)
    demo.add_argument("--seed", type=int, default=7)
    demo.set_defaults(func=_cmd_demo)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalContractError as exc:
        print(f"numerical contract violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
