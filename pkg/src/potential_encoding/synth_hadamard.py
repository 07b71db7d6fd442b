"""Exact synthesis of ``e^{-iVt}`` from the Walsh spectrum.

Each non-identity Z-string ``B_j`` becomes ``exp(-i θ_j B_j)`` with
``θ_j = c_j t``: a CNOT fan-in accumulating the parity of the string's
qubits onto its highest qubit, ``Rz(2θ_j)`` there, and a fan-out undoing
the parity. The identity string only contributes ``GlobalPhase(-θ_0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb

from .circuit import CNOT, Circuit, GlobalPhase, Rz
from .walsh import WalshSpectrum


class Ordering(str, Enum):
    NATURAL = "natural"
    GRAY = "gray"


@dataclass(frozen=True)
class PauliZString:
    mask: int
    n: int

    def __post_init__(self):
        if not 0 <= self.mask < 2**self.n:
            raise IndexError(f"Z-mask {self.mask} out of range for {self.n} qubits")

    @property
    def qubits(self) -> tuple:
        return tuple(q for q in range(self.n) if self.mask >> q & 1)

    @property
    def weight(self) -> int:
        return bin(self.mask).count("1")

    def factors(self) -> list[str]:
        """Tensor factors written most significant qubit first."""
        return ["Z" if self.mask >> q & 1 else "I" for q in reversed(range(self.n))]

    def __str__(self):
        return "⊗".join(self.factors())

    @property
    def label(self) -> str:
        return "".join(self.factors())


def mask_to_string(mask: int, n: int) -> PauliZString:
    return PauliZString(mask, n)


def mask_order(n: int, ordering: Ordering | str = Ordering.NATURAL) -> list[int]:
    """Non-zero Z-masks in emission order."""
    ordering = Ordering(ordering)
    if ordering is Ordering.NATURAL:
        return list(range(1, 2**n))
    return [i ^ (i >> 1) for i in range(1, 2**n)]


def cnot_count_bound(n: int) -> int:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return sum(comb(n, r) * 2 * (r - 1) for r in range(2, n + 1))


def _controls(mask: int) -> tuple[int, list[int]]:
    qs = [q for q in range(mask.bit_length()) if mask >> q & 1]
    return qs[-1], qs[:-1]


def synthesize_exact(
    spectrum: WalshSpectrum,
    t: float = 1.0,
    ordering: Ordering | str = Ordering.NATURAL,
    skip_zero: bool = True,
) -> Circuit:
    """Circuit whose diagonal is ``e^{-i v_k t}``.

    Masks with an exactly zero coefficient are skipped when ``skip_zero``.
    Within a run of masks sharing the same top qubit, the fan-out of one
    string ends with, and the next fan-in starts with, their shared controls,
    so :func:`~potential_encoding.circuit.cancel_adjacent_cnots` can remove
    those pairs afterwards. The CNOT count before cancellation is always ``2(w-1)``
    per weight-``w`` string.
    """
    n = spectrum.n
    c = spectrum.coeffs
    t = float(t)
    gates: list = [GlobalPhase(-float(c[0]) * t)]

    masks = [m for m in mask_order(n, ordering) if not (skip_zero and c[m] == 0.0)]
    plan = [_controls(m) for m in masks]

    for i, (m, (top, ctrls)) in enumerate(zip(masks, plan)):
        prev_shared = set()
        if i > 0 and plan[i - 1][0] == top:
            prev_shared = set(ctrls) & set(plan[i - 1][1])
        next_shared = set()
        if i + 1 < len(plan) and plan[i + 1][0] == top:
            next_shared = set(ctrls) & set(plan[i + 1][1])

        fan_in = sorted(prev_shared) + sorted(set(ctrls) - prev_shared)
        fan_out = sorted(set(ctrls) - next_shared) + sorted(next_shared, reverse=True)

        gates.extend(CNOT(q, top) for q in fan_in)
        gates.append(Rz(top, 2.0 * float(c[m]) * t))
        gates.extend(CNOT(q, top) for q in fan_out)

    return Circuit(n, tuple(gates))
