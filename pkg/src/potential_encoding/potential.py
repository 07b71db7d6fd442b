"""Analytic 1-D potential models and their samples on a 2^n-point lattice.

Lattice point ``k`` sits at ``x_min + k * dx`` with ``dx = (x_max - x_min) / 2**n``;
the right endpoint ``x_max`` is never sampled.  Energies are in atomic units.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np


class PotentialDomainError(ValueError):
    """Raised when a model or grid cannot produce finite power-of-two samples."""


def is_power_of_two(m: int) -> bool:
    return m >= 1 and (m & (m - 1)) == 0


def qubits_for_length(length: int) -> int:
    """Return ``n`` with ``2**n == length``; reject anything else."""
    if not is_power_of_two(length) or length < 2:
        raise PotentialDomainError(
            f"length must be a power of two (>= 2), got {length}"
        )
    return length.bit_length() - 1


@dataclass(frozen=True)
class RittnerExp:
    """Repulsive exponential wall ``a1 * exp(-a2 * (x - r1))``."""

    a1: float
    a2: float
    r1: float

    def __post_init__(self):
        if not self.a2 > 0:
            raise PotentialDomainError(f"a2 must be positive, got {self.a2}")

    def __call__(self, x):
        return self.a1 * np.exp(-self.a2 * (np.asarray(x, dtype=float) - self.r1))


@dataclass(frozen=True)
class ShiftedExp:
    """``exp(1 - x)``."""

    def __call__(self, x):
        return np.exp(1.0 - np.asarray(x, dtype=float))


@dataclass(frozen=True)
class DecayExp:
    """``exp(-(x - 1))``."""

    def __call__(self, x):
        return np.exp(-(np.asarray(x, dtype=float) - 1.0))


@dataclass(frozen=True)
class Tabulated:
    """Explicit lattice values; the length fixes the qubit count."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        qubits_for_length(len(vals))
        if not all(math.isfinite(v) for v in vals):
            raise PotentialDomainError("tabulated values must be finite")


PotentialModel = Union[RittnerExp, ShiftedExp, DecayExp, Tabulated]

#: NaI covalent curve parameters (atomic units).
NAI = RittnerExp(a1=0.0299, a2=2.163, r1=5.102)


@dataclass(frozen=True)
class PotentialGrid:
    n: int
    x_min: float
    x_max: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.n < 1:
            raise PotentialDomainError(f"n must be >= 1, got {self.n}")
        if vals.shape != (2**self.n,):
            raise PotentialDomainError(
                f"expected {2**self.n} values for n={self.n}, got {vals.shape}"
            )
        if not self.x_max > self.x_min:
            raise PotentialDomainError("x_max must exceed x_min")
        bad = np.flatnonzero(~np.isfinite(vals))
        if bad.size:
            raise PotentialDomainError(f"non-finite potential at k={int(bad[0])}")

    @property
    def size(self) -> int:
        return 2**self.n

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / 2**self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.size) * self.dx

    # -- serialization -------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "x_min": self.x_min,
                "x_max": self.x_max,
                "values": [float(v) for v in self.values],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PotentialGrid":
        d = json.loads(text)
        values = d["values"]
        n = qubits_for_length(len(values))
        if "n" in d and int(d["n"]) != n:
            raise PotentialDomainError(
                f"declared n={d['n']} does not match {len(values)} values"
            )
        return cls(n=n, x_min=float(d["x_min"]), x_max=float(d["x_max"]), values=values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "value"])
        for xk, vk in zip(self.x, self.values):
            w.writerow([repr(float(xk)), repr(float(vk))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PotentialGrid":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or not {"x", "value"} <= set(rows[0]):
            raise PotentialDomainError("CSV must have an 'x,value' header and rows")
        xs = np.array([float(r["x"]) for r in rows])
        vs = np.array([float(r["value"]) for r in rows])
        n = qubits_for_length(len(vs))
        dx = xs[1] - xs[0]
        if not dx > 0 or not np.allclose(np.diff(xs), dx, rtol=1e-9, atol=1e-12):
            raise PotentialDomainError("x column must be uniformly increasing")
        return cls(n=n, x_min=float(xs[0]), x_max=float(xs[0] + len(xs) * dx), values=vs)


def load_grid(path) -> PotentialGrid:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return PotentialGrid.from_json(text)
    return PotentialGrid.from_csv(text)


def sample_model(model: PotentialModel, n: int, x_min: float = 0.0, x_max: float = 10.0) -> PotentialGrid:
    """Sample ``model`` at the ``2**n`` left-endpoint lattice points of ``[x_min, x_max)``."""
    if n < 1:
        raise PotentialDomainError(f"n must be >= 1, got {n}")
    if not x_max > x_min:
        raise PotentialDomainError(f"need x_max > x_min, got [{x_min}, {x_max}]")
    if isinstance(model, Tabulated):
        if len(model.values) != 2**n:
            raise PotentialDomainError(
                f"tabulated model has {len(model.values)} values, n={n} needs {2**n}"
            )
        values = np.array(model.values)
    else:
        dx = (x_max - x_min) / 2**n
        with np.errstate(over="ignore", invalid="ignore"):
            values = np.asarray(model(x_min + np.arange(2**n) * dx), dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise PotentialDomainError(f"model evaluation is not finite at k={int(bad[0])}")
    return PotentialGrid(n=n, x_min=float(x_min), x_max=float(x_max), values=values)


def state_index_label(k: int, n: int) -> str:
    """Bitstring label of basis state ``k``; the leftmost character is the most significant qubit."""
    if not 0 <= k < 2**n:
        raise IndexError(f"basis index {k} out of range for {n} qubits")
    return format(k, f"0{n}b")
