"""Approximate encoding with phase gates on qubit subsets of size <= r.

A gate on subset ``S`` adds its angle to every basis state whose qubits in
``S`` are all 1.  Collecting these incidences gives a 0/1 matrix ``A`` and
the angles ``xi`` are the least-squares solution of ``A xi = -t v``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np
import scipy.linalg

from .circuit import CCPhase, CPhase, Circuit, GlobalPhase, Phase
from .potential import PotentialGrid


class IncidenceError(ValueError):
    pass


class RankDeficientError(IncidenceError):
    pass


class UnsupportedOrderError(IncidenceError):
    pass


MAX_GATE_ORDER = 3


def canonical_subsets(n: int, r: int) -> list[tuple]:
    """``()`` first, then all subsets of each size up to ``r``, lexicographic."""
    out = []
    for size in range(r + 1):
        out.extend(combinations(range(n), size))
    return out


def subset_mask(s) -> int:
    m = 0
    for q in s:
        m |= 1 << q
    return m


@dataclass(frozen=True)
class IncidenceSystem:
    n: int
    r: int
    subsets: tuple
    matrix: np.ndarray = field(repr=False)
    # row_order[i] is the basis index whose equation sits in row i
    row_order: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.row_order is None:
            object.__setattr__(self, "row_order", np.arange(2**self.n))

    @property
    def K(self) -> int:
        return len(self.subsets)

    def rhs(self, grid: PotentialGrid, t: float) -> np.ndarray:
        return -float(t) * np.asarray(grid.values, dtype=float)[self.row_order]


def _incidence_matrix(n: int, subsets) -> np.ndarray:
    k = np.arange(2**n)[:, None]
    masks = np.array([subset_mask(s) for s in subsets])[None, :]
    return ((k & masks) == masks).astype(float)


def build_incidence(n: int, r: int, selected_subsets=None) -> IncidenceSystem:
    if not 0 <= r <= n:
        raise IncidenceError(f"order r={r} must satisfy 0 <= r <= n={n}")
    if selected_subsets is None:
        subsets = canonical_subsets(n, r)
    else:
        subsets = [tuple(sorted(int(q) for q in s)) for s in selected_subsets]
        if len(set(subsets)) != len(subsets):
            raise IncidenceError("duplicate subsets in selection")
        for s in subsets:
            if len(set(s)) != len(s):
                raise IncidenceError(f"subset {s} repeats a qubit")
            if any(not 0 <= q < n for q in s):
                raise IncidenceError(f"subset {s} has a qubit index outside 0..{n - 1}")
        if () not in subsets:
            raise IncidenceError("selected subsets must include the empty set")
        subsets.sort(key=lambda s: (len(s), s))
        r = max(len(s) for s in subsets)
    return IncidenceSystem(n=n, r=r, subsets=tuple(subsets), matrix=_incidence_matrix(n, subsets))


def parameter_count(n: int, r: int) -> int:
    return sum(comb(n, i) for i in range(r + 1))


def gate_complexity(n: int, r: int) -> int:
    """Phase-gate count for order ``r``, global phase excluded."""
    if not 0 <= r <= n:
        raise IncidenceError(f"order r={r} must satisfy 0 <= r <= n={n}")
    return sum(comb(n, i) for i in range(1, r + 1))


@dataclass(frozen=True)
class FitResult:
    subsets: tuple
    xi: np.ndarray = field(repr=False)
    residual_norm: float
    per_point_error: np.ndarray = field(repr=False)
    target_scale: float
    rank: int

    def to_dict(self) -> dict:
        return {
            "subsets": [list(s) for s in self.subsets],
            "xi": [float(v) for v in self.xi],
            "residual_norm": float(self.residual_norm),
            "per_point_error": [float(v) for v in self.per_point_error],
            "max_point_error": float(np.max(self.per_point_error)),
            "t": self.target_scale,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _fit_result(sys: IncidenceSystem, xi, b, t, rank) -> FitResult:
    resid = sys.matrix @ xi - b
    err = np.empty_like(resid)
    err[sys.row_order] = np.abs(resid)
    return FitResult(
        subsets=sys.subsets,
        xi=np.asarray(xi, dtype=float),
        residual_norm=float(np.linalg.norm(resid)),
        per_point_error=err,
        target_scale=float(t),
        rank=rank,
    )


def solve_least_squares(sys: IncidenceSystem, grid: PotentialGrid, t: float = 1.0, rcond: float = 1e-10) -> FitResult:
    """Least-squares angles by column-pivoted QR.

    Raises :class:`RankDeficientError` if the selected columns are dependent.
    """
    if grid.n != sys.n:
        raise IncidenceError(f"grid has n={grid.n}, system has n={sys.n}")
    A = sys.matrix
    b = sys.rhs(grid, t)
    Q, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > rcond * diag[0])) if diag.size else 0
    if rank < sys.K:
        raise RankDeficientError(f"incidence matrix has rank {rank} < {sys.K} columns")
    z = scipy.linalg.solve_triangular(R, Q.T @ b)
    xi = np.empty(sys.K)
    xi[piv] = z
    return _fit_result(sys, xi, b, t, rank)


def triangular_reorder(sys: IncidenceSystem) -> IncidenceSystem:
    """Permute rows so the leading ``K x K`` block is lower-triangular.

    The equation of basis index ``mask(S)`` is moved to the row of column ``S``;
    the remaining equations follow in ascending basis order.
    """
    lead = [subset_mask(s) for s in sys.subsets]
    lead_set = set(lead)
    rest = [k for k in range(2**sys.n) if k not in lead_set]
    order = np.array(lead + rest)
    current = np.asarray(sys.row_order)
    inv = np.empty_like(current)
    inv[current] = np.arange(current.size)
    local = inv[order]
    return IncidenceSystem(
        n=sys.n,
        r=sys.r,
        subsets=sys.subsets,
        matrix=sys.matrix[local],
        row_order=current[local],
    )


def solve_triangular_path(sys: IncidenceSystem, grid: PotentialGrid, t: float = 1.0) -> FitResult:
    """Fit the ``K`` lead lattice values exactly by forward substitution.

    The other ``2**n - K`` values are left unconstrained; at ``r = n`` this
    coincides with the least-squares solution.
    """
    tri = triangular_reorder(sys)
    b = tri.rhs(grid, t)
    L = tri.matrix[: tri.K]
    xi = scipy.linalg.solve_triangular(L, b[: tri.K], lower=True, unit_diagonal=True)
    return _fit_result(tri, xi, b, t, tri.K)


def synthesize_poly(fit: FitResult, sys: IncidenceSystem) -> Circuit:
    """Phase / CPhase / CCPhase circuit with diagonal phases ``A @ xi``."""
    if tuple(sys.subsets) != tuple(fit.subsets):
        raise IncidenceError("fit was produced from a different subset list")
    subsets, n = sys.subsets, sys.n
    gates = []
    for s, angle in zip(subsets, fit.xi):
        angle = float(angle)
        if len(s) == 0:
            gates.append(GlobalPhase(angle))
        elif len(s) == 1:
            gates.append(Phase(s[0], angle))
        elif len(s) == 2:
            gates.append(CPhase(s[0], s[1], angle))
        elif len(s) == 3:
            gates.append(CCPhase(s[0], s[1], s[2], angle))
        else:
            raise UnsupportedOrderError(
                f"subset {s} needs a {len(s)}-qubit phase gate; at most {MAX_GATE_ORDER} supported"
            )
    return Circuit(n, tuple(gates))


def select_higher_order(
    n: int,
    base_order: int,
    extra: int,
    grid: PotentialGrid | None = None,
    t: float = 1.0,
    strategy: str = "prefix",
) -> list[tuple]:
    """All subsets up to ``base_order`` plus ``extra`` subsets of size ``base_order + 1``.

    ``prefix`` takes the lexicographically first ones; ``greedy`` repeatedly
    adds the candidate giving the lowest residual on ``grid``.
    """
    chosen = canonical_subsets(n, base_order)
    candidates = list(combinations(range(n), base_order + 1))
    if not 0 <= extra <= len(candidates):
        raise IncidenceError(f"can add between 0 and {len(candidates)} subsets, got {extra}")
    if strategy == "prefix":
        return chosen + candidates[:extra]
    if strategy != "greedy":
        raise IncidenceError(f"unknown selection strategy {strategy!r}")
    if grid is None:
        raise IncidenceError("greedy selection needs a grid")
    for _ in range(extra):
        best = min(
            candidates,
            key=lambda s: solve_least_squares(build_incidence(n, 0, chosen + [s]), grid, t).residual_norm,
        )
        chosen.append(best)
        candidates.remove(best)
    return chosen


def fit_poly(grid: PotentialGrid, r: int, t: float = 1.0, subsets=None):
    """Build, solve and synthesize in one call; returns ``(system, fit, circuit)``."""
    sys = build_incidence(grid.n, r, subsets)
    if sys.r > MAX_GATE_ORDER:
        raise UnsupportedOrderError(
            f"order {sys.r} needs {sys.r}-qubit phase gates; at most {MAX_GATE_ORDER} supported"
        )
    fit = solve_least_squares(sys, grid, t)
    return sys, fit, synthesize_poly(fit, sys)
