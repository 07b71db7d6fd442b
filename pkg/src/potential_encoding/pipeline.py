"""Glue used by the CLI: grid -> circuit -> verification report."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import synth_poly
from .circuit import Circuit, cancel_adjacent_cnots, count_gates
from .potential import PotentialGrid
from .sim import circuit_diagonal
from .synth_hadamard import Ordering, cnot_count_bound, synthesize_exact
from .walsh import analyze

DIAGONAL_TOL = 1e-10


@dataclass
class Encoding:
    method: str
    circuit: Circuit
    report: dict
    fit: synth_poly.FitResult | None = None


def encode_hadamard(grid: PotentialGrid, t: float = 1.0, ordering="natural", cancel: bool = False) -> Encoding:
    spectrum = analyze(grid.values)
    circuit = synthesize_exact(spectrum, t, ordering)
    if cancel:
        circuit = cancel_adjacent_cnots(circuit)
    counts = count_gates(circuit)
    diag = circuit_diagonal(circuit).entries
    err = float(np.max(np.abs(diag - np.exp(-1j * grid.values * t))))
    n = grid.n
    report = {
        "method": "hadamard",
        "n": n,
        "t": t,
        "ordering": Ordering(ordering).value,
        "cancelled": cancel,
        "counts": counts.to_dict(),
        "formulas": {"rz_expected": 2**n - 1, "cnot_bound": cnot_count_bound(n)},
        "diagonal_max_error": err,
        "verified": err < DIAGONAL_TOL,
    }
    return Encoding("hadamard", circuit, report)


def encode_poly(
    grid: PotentialGrid,
    order: int,
    t: float = 1.0,
    ccp: int = 0,
    ccp_select: str = "prefix",
) -> Encoding:
    """Order-``order`` phase-gate fit; ``ccp > 0`` adds that many 3-qubit
    subsets on top of a full second-order system."""
    n = grid.n
    if order > n:
        raise synth_poly.IncidenceError(f"order {order} exceeds n={n}")
    if order > synth_poly.MAX_GATE_ORDER:
        raise synth_poly.UnsupportedOrderError(
            f"order {order} is unsupported: phase gates stop at {synth_poly.MAX_GATE_ORDER} qubits"
        )
    subsets = None
    if ccp:
        if order != 2:
            raise synth_poly.IncidenceError("partial CCPhase selection extends a second-order fit (use --order 2)")
        subsets = synth_poly.select_higher_order(n, 2, ccp, grid, t, ccp_select)
    sys, fit, circuit = synth_poly.fit_poly(grid, order, t, subsets)
    diag = circuit_diagonal(circuit).entries
    # the circuit must realize exactly the fitted phases A @ xi
    synth_err = float(np.max(np.abs(diag - np.exp(1j * (sys.matrix @ fit.xi)))))
    target_err = float(np.max(np.abs(diag - np.exp(-1j * grid.values * t))))
    counts = count_gates(circuit)
    report = {
        "method": "poly",
        "n": n,
        "t": t,
        "order": sys.r,
        "ccp": ccp,
        "ccp_select": ccp_select if ccp else None,
        "counts": counts.to_dict(),
        "formulas": {
            "parameters_K": synth_poly.parameter_count(n, order) if not ccp else sys.K,
            "gate_complexity": synth_poly.gate_complexity(n, order) if not ccp else sys.K - 1,
        },
        "residual_norm": fit.residual_norm,
        "max_point_error": float(np.max(fit.per_point_error)),
        "fit": fit.to_dict(),
        "diagonal_vs_fit_max_error": synth_err,
        "diagonal_vs_target_max_error": target_err,
        "verified": synth_err < DIAGONAL_TOL,
    }
    return Encoding("poly", circuit, report, fit)


def encode(grid: PotentialGrid, method: str, t: float = 1.0, order: int = 2, ordering="natural",
           cancel: bool = False, ccp: int = 0, ccp_select: str = "prefix") -> Encoding:
    if method == "hadamard":
        return encode_hadamard(grid, t, ordering, cancel)
    if method == "poly":
        return encode_poly(grid, order, t, ccp, ccp_select)
    raise ValueError(f"unknown method {method!r}")


def gatecount_row(n: int) -> dict:
    """Structural gate counts at ``n`` qubits for both methods, plus the closed forms."""
    rng = np.random.default_rng(n)
    values = rng.uniform(0.5, 1.5, 2**n)
    spectrum = analyze(values)
    had = count_gates(synthesize_exact(spectrum, 1.0, Ordering.NATURAL, skip_zero=False))
    gray = count_gates(cancel_adjacent_cnots(synthesize_exact(spectrum, 1.0, Ordering.GRAY, skip_zero=False)))
    sys = synth_poly.build_incidence(n, 2)
    fit = synth_poly.FitResult(sys.subsets, np.zeros(sys.K), 0.0, np.zeros(2**n), 1.0, sys.K)
    poly = count_gates(synth_poly.synthesize_poly(fit, sys))
    closed_had = (2**n - 1) + cnot_count_bound(n)
    closed_poly = synth_poly.gate_complexity(n, 2)
    return {
        "n": n,
        "hadamard_total": had.physical,
        "poly_r2_total": poly.physical,
        "hadamard_rz": had.rz,
        "hadamard_cnot": had.cnot,
        "hadamard_gray_cancelled_total": gray.physical,
        "poly_r2_phase": poly.phase,
        "poly_r2_cphase": poly.cphase,
        "hadamard_closed_form": closed_had,
        "poly_r2_closed_form": closed_poly,
    }
