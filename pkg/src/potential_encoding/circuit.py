"""Gate-level circuit IR, gate tallies, CNOT pair cancellation and OpenQASM 2.0 export.

Qubit 0 is the least significant qubit: bit ``b`` of a basis index is the
state of qubit ``b``.  ``Rz(q, theta)`` is ``diag(e^{-i theta/2}, e^{+i theta/2})``
and ``GlobalPhase(phi)`` multiplies the whole register by ``e^{i phi}``.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, fields
from typing import Iterable, Union


@dataclass(frozen=True)
class GlobalPhase:
    phi: float
    name = "global_phase"

    @property
    def qubits(self) -> tuple:
        return ()


@dataclass(frozen=True)
class Rz:
    q: int
    theta: float
    name = "rz"

    @property
    def qubits(self) -> tuple:
        return (self.q,)


@dataclass(frozen=True)
class CNOT:
    control: int
    target: int
    name = "cnot"

    @property
    def qubits(self) -> tuple:
        return (self.control, self.target)


@dataclass(frozen=True)
class Phase:
    q: int
    theta: float
    name = "phase"

    @property
    def qubits(self) -> tuple:
        return (self.q,)


@dataclass(frozen=True)
class CPhase:
    a: int
    b: int
    theta: float
    name = "cphase"

    @property
    def qubits(self) -> tuple:
        return (self.a, self.b)


@dataclass(frozen=True)
class CCPhase:
    a: int
    b: int
    c: int
    theta: float
    name = "ccphase"

    @property
    def qubits(self) -> tuple:
        return (self.a, self.b, self.c)


Gate = Union[GlobalPhase, Rz, CNOT, Phase, CPhase, CCPhase]

GATE_TYPES = {cls.name: cls for cls in (GlobalPhase, Rz, CNOT, Phase, CPhase, CCPhase)}


def gate_angle(g: Gate) -> float | None:
    if isinstance(g, GlobalPhase):
        return g.phi
    if isinstance(g, CNOT):
        return None
    return g.theta


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple = ()

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        if self.n < 1:
            raise CircuitError(f"circuit needs at least one qubit, got n={self.n}")
        for i, g in enumerate(gates):
            if type(g) not in GATE_TYPES.values():
                raise CircuitError(f"gate {i}: unknown gate {g!r}")
            qs = g.qubits
            if len(set(qs)) != len(qs):
                raise CircuitError(f"gate {i}: repeated qubit in {g}")
            if any(not 0 <= q < self.n for q in qs):
                raise CircuitError(f"gate {i}: qubit index out of range for n={self.n} in {g}")
            angle = gate_angle(g)
            if angle is not None and not math.isfinite(angle):
                raise CircuitError(f"gate {i}: non-finite angle in {g}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.n != self.n:
            raise CircuitError("cannot concatenate circuits of different width")
        return Circuit(self.n, self.gates + other.gates)

    @property
    def global_phase(self) -> float:
        return math.fsum(g.phi for g in self.gates if isinstance(g, GlobalPhase))

    # -- JSON ----------------------------------------------------------------

    def to_dict(self) -> dict:
        out = []
        for g in self.gates:
            d = {"op": g.name}
            for f in fields(g):
                d[f.name] = getattr(g, f.name)
            out.append(d)
        return {"n": self.n, "gates": out}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "Circuit":
        gates = []
        for item in d["gates"]:
            item = dict(item)
            op = item.pop("op")
            if op not in GATE_TYPES:
                raise CircuitError(f"unknown gate op {op!r}")
            gates.append(GATE_TYPES[op](**item))
        return cls(int(d["n"]), tuple(gates))

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class GateCounts:
    global_phase: int = 0
    rz: int = 0
    cnot: int = 0
    phase: int = 0
    cphase: int = 0
    ccphase: int = 0

    @property
    def total(self) -> int:
        return self.global_phase + self.rz + self.cnot + self.phase + self.cphase + self.ccphase

    @property
    def physical(self) -> int:
        """Gate count with global-phase markers excluded."""
        return self.total - self.global_phase

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["total"] = self.total
        d["physical"] = self.physical
        return d


def count_gates(c: Circuit) -> GateCounts:
    tally = Counter(g.name for g in c.gates)
    return GateCounts(**{name: tally.get(name, 0) for name in GATE_TYPES})


def cancel_adjacent_cnots(c: Circuit) -> Circuit:
    """Delete pairs of identical CNOTs with no gate touching their qubits in between.

    Runs a single stack pass, which also removes pairs exposed by earlier
    deletions (``CX(a,t) CX(b,t) CX(b,t) CX(a,t)`` collapses completely).
    """
    kept: list = []
    # per-qubit stack of indices into `kept`; the top is the last live gate on that qubit
    history: dict = {q: [] for q in range(c.n)}

    for g in c.gates:
        if isinstance(g, CNOT):
            ctl, tgt = g.control, g.target
            hc = history[ctl]
            ht = history[tgt]
            if hc and ht and hc[-1] == ht[-1]:
                j = hc[-1]
                prev = kept[j]
                if isinstance(prev, CNOT) and prev.control == ctl and prev.target == tgt:
                    kept[j] = None
                    hc.pop()
                    ht.pop()
                    continue
        j = len(kept)
        kept.append(g)
        for q in g.qubits:
            history[q].append(j)
    return Circuit(c.n, tuple(g for g in kept if g is not None))


# -- OpenQASM ----------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def qasm_lines_for(g: Gate) -> list[str]:
    if isinstance(g, GlobalPhase):
        return [f"// global_phase {_fmt(g.phi)}"]
    if isinstance(g, Rz):
        return [f"rz({_fmt(g.theta)}) q[{g.q}];"]
    if isinstance(g, CNOT):
        return [f"cx q[{g.control}],q[{g.target}];"]
    if isinstance(g, Phase):
        return [f"p({_fmt(g.theta)}) q[{g.q}];"]
    if isinstance(g, CPhase):
        return [f"cp({_fmt(g.theta)}) q[{g.a}],q[{g.b}];"]
    if isinstance(g, CCPhase):
        half = g.theta / 2
        a, b, c = g.a, g.b, g.c
        return [
            f"cp({_fmt(half)}) q[{b}],q[{c}];",
            f"cx q[{a}],q[{b}];",
            f"cp({_fmt(-half)}) q[{b}],q[{c}];",
            f"cx q[{a}],q[{b}];",
            f"cp({_fmt(half)}) q[{a}],q[{c}];",
        ]
    raise CircuitError(f"cannot export {g!r}")


def export_qasm(c: Circuit) -> str:
    """OpenQASM 2.0 text; global phase survives only as ``// global_phase`` comments
    and the ``// meta`` JSON line."""
    meta = {"n": c.n, "global_phase": c.global_phase, "counts": count_gates(c).to_dict()}
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"// meta {json.dumps(meta, sort_keys=True)}",
        f"qreg q[{c.n}];",
    ]
    for g in c.gates:
        lines.extend(qasm_lines_for(g))
    return "\n".join(lines) + "\n"


def concat(circuits: Iterable[Circuit]) -> Circuit:
    circuits = list(circuits)
    if not circuits:
        raise CircuitError("nothing to concatenate")
    out = circuits[0]
    for c in circuits[1:]:
        out = out + c
    return out
