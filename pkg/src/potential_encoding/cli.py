"""``potenc`` command line.

Every command prints a short human summary and writes a JSON file with the
same content (plus data tables) into ``--out``.  Exit status: 0 when all
checks pass, 1 when a verification fails, 2 for bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import pipeline
from .circuit import export_qasm
from .potential import (
    NAI,
    DecayExp,
    PotentialDomainError,
    PotentialGrid,
    RittnerExp,
    ShiftedExp,
    load_grid,
    sample_model,
)
from .recon import reconstruct_potential, reconstruction_json
from .sim import (
    NoiseModel,
    SimulationError,
    StateVector,
    circuit_diagonal,
    evolve,
    evolve_noisy,
    fidelity_exact,
    swap_test,
)
from .synth_poly import IncidenceError

SEED_ENV = "POTENC_SEED"
DEFAULT_SEED = 20240101


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


# -- argument parsing ------------------------------------------------------------


def _grid_args(p: argparse.ArgumentParser):
    g = p.add_argument_group("potential")
    g.add_argument("--model", choices=["nai", "rittner", "shifted", "decay", "tabulated"], default="nai")
    g.add_argument("--n", type=int, default=4, help="qubit count (ignored for tabulated input)")
    g.add_argument("--xmin", type=float, default=0.0)
    g.add_argument("--xmax", type=float, default=10.0)
    g.add_argument("--a1", type=float, default=NAI.a1)
    g.add_argument("--a2", type=float, default=NAI.a2)
    g.add_argument("--r1", type=float, default=NAI.r1)
    g.add_argument("--file", type=Path, help="tabulated grid, CSV (x,value) or JSON")


def _encode_args(p: argparse.ArgumentParser, allow_all: bool = False):
    g = p.add_argument_group("encoding")
    choices = ["hadamard", "poly", "all"] if allow_all else ["hadamard", "poly"]
    g.add_argument("--method", choices=choices, default="all" if allow_all else "hadamard")
    g.add_argument("--order", type=int, default=2, help="polynomial order r (poly)")
    g.add_argument("--ordering", choices=["natural", "gray"], default="natural", help="Z-mask order (hadamard)")
    g.add_argument("--cancel", action="store_true", help="cancel adjacent CNOT pairs (hadamard)")
    g.add_argument("--ccp", type=int, default=0, help="extra 3-qubit phase gates on top of order 2 (poly)")
    g.add_argument("--ccp-select", choices=["prefix", "greedy"], default="prefix")
    g.add_argument("--t", type=float, default=1.0, help="evolution time")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="potenc", description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    parser.add_argument("--json", action="store_true", help="print the JSON summary instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="sample a potential onto the lattice")
    _grid_args(p)

    p = sub.add_parser("encode", help="synthesize a circuit, export JSON/QASM and a gate report")
    _grid_args(p)
    _encode_args(p)

    p = sub.add_parser("reconstruct", help="encode, extract the diagonal and recover the potential")
    _grid_args(p)
    _encode_args(p)
    p.add_argument("--tol", type=float, help="fail if the max abs reconstruction error exceeds this")

    p = sub.add_parser("fidelity", help="swap-test fidelity of the evolved vs initial state")
    _grid_args(p)
    _encode_args(p, allow_all=True)
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (default ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--initial", choices=["zero", "uniform"], default="zero")
    p.add_argument("--p1", type=float, default=0.0)
    p.add_argument("--p2", type=float, default=0.0)
    p.add_argument("--p3", type=float, default=0.0)
    p.add_argument("--trajectories", type=int, default=1000)

    p = sub.add_parser("gatecount-sweep", help="gate counts vs n for both methods")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=10)
    return parser


# -- helpers -----------------------------------------------------------------------


def grid_from_args(args) -> PotentialGrid:
    if args.model == "tabulated":
        if args.file is None:
            raise UsageError("--model tabulated needs --file")
        return load_grid(args.file)
    if args.file is not None:
        raise UsageError("--file is only valid with --model tabulated")
    model = {
        "nai": NAI,
        "rittner": None,
        "shifted": ShiftedExp(),
        "decay": DecayExp(),
    }[args.model]
    if model is None:
        model = RittnerExp(args.a1, args.a2, args.r1)
    return sample_model(model, args.n, args.xmin, args.xmax)


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _encode_from_args(grid, args, method=None, order=None):
    method = method or args.method
    order = args.order if order is None else order
    if method == "poly" and order < 0:
        raise UsageError("--order must be >= 0")
    return pipeline.encode(
        grid, method, t=args.t, order=order, ordering=args.ordering,
        cancel=args.cancel, ccp=args.ccp, ccp_select=args.ccp_select,
    )


# -- commands ----------------------------------------------------------------------


def cmd_sample(args) -> tuple[dict, list[str], bool]:
    grid = grid_from_args(args)
    _write(args.out, "grid.csv", grid.to_csv())
    _write(args.out, "grid.json", grid.to_json() + "\n")
    summary = {
        "command": "sample",
        "n": grid.n,
        "points": grid.size,
        "x_min": grid.x_min,
        "x_max": grid.x_max,
        "dx": grid.dx,
        "v_min": float(grid.values.min()),
        "v_max": float(grid.values.max()),
        "files": ["grid.csv", "grid.json"],
    }
    lines = [
        f"n={grid.n} ({grid.size} points)  dx={grid.dx:g}  x in [{grid.x_min:g}, {grid.x_max:g})",
        f"V min={summary['v_min']:.6g}  max={summary['v_max']:.6g}",
    ]
    return summary, lines, True


def cmd_encode(args) -> tuple[dict, list[str], bool]:
    grid = grid_from_args(args)
    enc = _encode_from_args(grid, args)
    _write(args.out, "circuit.json", enc.circuit.to_json() + "\n")
    _write(args.out, "circuit.qasm", export_qasm(enc.circuit))
    report = dict(enc.report, command="encode", files=["circuit.json", "circuit.qasm", "encode_report.json"])
    c = report["counts"]
    lines = [f"method={enc.method} n={grid.n} t={args.t:g}"]
    if enc.method == "hadamard":
        lines.append(
            f"rz={c['rz']} cnot={c['cnot']} (bound {report['formulas']['cnot_bound']}, "
            f"ordering={report['ordering']}{', cancelled' if args.cancel else ''})"
        )
    else:
        lines.append(
            f"phase={c['phase']} cphase={c['cphase']} ccphase={c['ccphase']} "
            f"gates={c['physical']} (closed form {report['formulas']['gate_complexity']}), "
            f"residual={report['residual_norm']:.6g}"
        )
    lines.append(f"total gates (excl. global phase)={c['physical']}  verified={report['verified']}")
    _write(args.out, "encode_report.json", _dump(report))
    return report, lines, report["verified"]


def cmd_reconstruct(args) -> tuple[dict, list[str], bool]:
    grid = grid_from_args(args)
    enc = _encode_from_args(grid, args)
    diag = circuit_diagonal(enc.circuit)
    rec = reconstruct_potential(diag, args.t, grid)
    _write(args.out, "reconstruction.csv", rec.to_csv())
    _write(args.out, "diagonal.csv", diag.to_csv())
    ok = enc.report["verified"]
    if args.tol is not None:
        ok = ok and rec.max_abs_error <= args.tol
    summary = dict(
        rec.summary(),
        command="reconstruct",
        method=enc.method,
        n=grid.n,
        order=enc.report.get("order"),
        counts=enc.report["counts"],
        tol=args.tol,
        passed=ok,
        values=json.loads(reconstruction_json(rec))["values"],
        files=["reconstruction.csv", "diagonal.csv", "reconstruction.json"],
    )
    _write(args.out, "reconstruction.json", _dump(summary))
    lines = [
        f"method={enc.method} n={grid.n} t={args.t:g}",
        f"max_abs_error={rec.max_abs_error:.6g}  rmse={rec.rmse:.6g}  wrapped_points={summary['wrapped_points']}",
    ]
    if summary["wrapped_points"]:
        lines.append("warning: |v*t| leaves the principal branch at some points; reduce --t")
    return summary, lines, ok


def _fidelity_one(grid, args, method, order, initial, seed, noise):
    enc = _encode_from_args(grid, args, method=method, order=order)
    evolved = evolve(initial, enc.circuit)
    exact = fidelity_exact(initial, evolved)
    st = swap_test(initial, evolved, args.shots, seed)
    sigma = max(st.stderr, 2.0 * float(np.sqrt(st.p0 * (1.0 - st.p0) / args.shots)))
    ok = abs(st.estimate - exact) <= 3.0 * sigma
    entry = {
        "counts": enc.report["counts"],
        "exact": exact,
        "swap_test": st.to_dict(),
        "within_3sigma": ok,
    }
    if noise is not None:
        entry["noisy"] = evolve_noisy(initial, enc.circuit, noise, args.trajectories).to_dict()
    return entry, ok


def cmd_fidelity(args) -> tuple[dict, list[str], bool]:
    if args.shots < 1:
        raise UsageError("--shots must be >= 1")
    if args.trajectories < 1:
        raise UsageError("--trajectories must be >= 1")
    grid = grid_from_args(args)
    seed = _default_seed() if args.seed is None else args.seed
    n = grid.n
    initial = StateVector.zero(n) if args.initial == "zero" else StateVector.uniform(n)
    noisy = any(p > 0 for p in (args.p1, args.p2, args.p3))
    noise = NoiseModel(args.p1, args.p2, args.p3, seed=seed) if noisy else None

    if args.method == "all":
        runs = [("hadamard", "hadamard", None), ("poly_r2", "poly", 2)]
        if n >= 3:
            runs.append(("poly_r3", "poly", 3))
    elif args.method == "poly":
        runs = [(f"poly_r{args.order}", "poly", args.order)]
    else:
        runs = [("hadamard", "hadamard", None)]

    results = {}
    all_ok = True
    lines = [f"n={n} shots={args.shots} seed={seed} initial={args.initial}"]
    for key, method, order in runs:
        entry, ok = _fidelity_one(grid, args, method, order, initial, seed, noise)
        results[key] = entry
        all_ok &= ok
        st = entry["swap_test"]
        line = f"{key:10s} gates={entry['counts']['physical']:4d}  swap={st['estimate']:.4f} ± {st['stderr']:.4f}"
        if noise is not None:
            line += f"  noisy={entry['noisy']['mean']:.4f} ± {entry['noisy']['stderr']:.4f}"
        lines.append(line)
    summary = {
        "command": "fidelity",
        "n": n,
        "shots": args.shots,
        "seed": seed,
        "initial": args.initial,
        "noise": None if noise is None else {"p1": args.p1, "p2": args.p2, "p3": args.p3, "trajectories": args.trajectories},
        "methods": results,
        "passed": all_ok,
        "files": ["fidelity.json"],
    }
    _write(args.out, "fidelity.json", _dump(summary))
    return summary, lines, all_ok


def cmd_gatecount_sweep(args) -> tuple[dict, list[str], bool]:
    if not 1 <= args.n_min <= args.n_max:
        raise UsageError("need 1 <= --n-min <= --n-max")
    rows = [pipeline.gatecount_row(n) for n in range(args.n_min, args.n_max + 1)]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    _write(args.out, "gatecount.csv", buf.getvalue())
    ok = all(
        r["hadamard_total"] == r["hadamard_closed_form"] and r["poly_r2_total"] == r["poly_r2_closed_form"]
        for r in rows
    )
    summary = {"command": "gatecount-sweep", "rows": rows, "matches_closed_form": ok, "files": ["gatecount.csv", "gatecount.json"]}
    _write(args.out, "gatecount.json", _dump(summary))
    lines = ["  n  hadamard  poly_r2"] + [f"{r['n']:3d}  {r['hadamard_total']:8d}  {r['poly_r2_total']:7d}" for r in rows]
    return summary, lines, ok


COMMANDS = {
    "sample": cmd_sample,
    "encode": cmd_encode,
    "reconstruct": cmd_reconstruct,
    "fidelity": cmd_fidelity,
    "gatecount-sweep": cmd_gatecount_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        summary, lines, ok = COMMANDS[args.command](args)
    except (UsageError, PotentialDomainError, IncidenceError, SimulationError, ValueError) as exc:
        print(f"potenc {args.command}: error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(_dump(summary), end="")
    else:
        print("\n".join(lines))
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
