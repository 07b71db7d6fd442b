"""Recover lattice energies from a diagonal unitary and score them against a reference."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .potential import PotentialGrid
from .sim import DiagonalUnitary


class ReconstructionError(ValueError):
    pass


@dataclass(frozen=True)
class Reconstruction:
    values: np.ndarray = field(repr=False)
    t: float
    wrap_flags: np.ndarray = field(repr=False)
    max_abs_error: float | None = None
    rmse: float | None = None
    reference: PotentialGrid | None = field(default=None, repr=False)

    def to_csv(self) -> str:
        if self.reference is None:
            raise ReconstructionError("a reference grid is needed for the report table")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "v_ref", "v_rec", "abs_err", "wrapped"])
        for xk, vr, vk, f in zip(self.reference.x, self.reference.values, self.values, self.wrap_flags):
            w.writerow([repr(float(xk)), repr(float(vr)), repr(float(vk)), repr(abs(float(vk - vr))), int(f)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "t": self.t,
            "max_abs_error": self.max_abs_error,
            "rmse": self.rmse,
            "wrapped_points": int(np.sum(self.wrap_flags)),
        }


def principal_phase(entries) -> np.ndarray:
    """``arg`` mapped to ``(-pi, pi]``."""
    ph = np.angle(np.asarray(entries, dtype=complex))
    return np.where(ph <= -np.pi, np.pi, ph)


def wrap_flags_from_phase(phase: np.ndarray) -> np.ndarray:
    """Flag the later point of every adjacent pair whose phases jump by more than pi."""
    flags = np.zeros(phase.shape, dtype=bool)
    flags[1:] = np.abs(np.diff(phase)) > np.pi
    return flags


def reconstruct_potential(d: DiagonalUnitary, t: float, reference: PotentialGrid | None = None) -> Reconstruction:
    """``v_k = -arg(d_k) / t`` on the principal branch.

    Values are never unwrapped; points are only flagged.  With a ``reference``
    the flags also mark every point where ``|v_ref * t|`` leaves ``(-pi, pi)``
    and the error fields are filled in.
    """
    if t == 0:
        raise ReconstructionError("t must be non-zero")
    phase = principal_phase(d.entries)
    values = -phase / t
    flags = wrap_flags_from_phase(phase)
    max_err = rmse = None
    if reference is not None:
        if reference.size != values.size:
            raise ReconstructionError(f"reference has {reference.size} points, diagonal has {values.size}")
        flags = flags | (np.abs(reference.values * t) >= np.pi)
        max_err, rmse = compare(reference, values)
    return Reconstruction(values=values, t=float(t), wrap_flags=flags, max_abs_error=max_err, rmse=rmse, reference=reference)


def compare(reference: PotentialGrid, recovered, allow_offset: bool = False) -> tuple[float, float]:
    """``(max_abs_error, rmse)``; ``allow_offset`` first removes the mean difference,
    for diagonals whose global phase was discarded."""
    ref = np.asarray(reference.values if isinstance(reference, PotentialGrid) else reference, dtype=float)
    rec = np.asarray(recovered, dtype=float)
    if ref.shape != rec.shape:
        raise ReconstructionError(f"length mismatch: {ref.size} vs {rec.size}")
    diff = rec - ref
    if allow_offset:
        diff = diff - diff.mean()
    return float(np.max(np.abs(diff))), float(np.sqrt(np.mean(diff**2)))


def reconstruction_json(rec: Reconstruction) -> str:
    d = rec.summary()
    d["values"] = [float(v) for v in rec.values]
    d["wrap_flags"] = [bool(f) for f in rec.wrap_flags]
    return json.dumps(d, indent=2)
