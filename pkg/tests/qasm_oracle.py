"""Minimal OpenQASM 2.0 interpreter over dense Kronecker-product matrices.

Deliberately shares no code with ``potential_encoding.sim``: it only knows
``rz``, ``cx``, ``p`` and ``cp`` and builds each gate as a full matrix.
"""

import re

import numpy as np

I2 = np.eye(2)
P0 = np.diag([1.0, 0.0])
P1 = np.diag([0.0, 1.0])
X = np.array([[0, 1], [1, 0]], dtype=complex)


def _embed(ops: dict, n: int) -> np.ndarray:
    # qubit 0 is the rightmost tensor factor
    out = np.array([[1.0 + 0j]])
    for q in reversed(range(n)):
        out = np.kron(out, ops.get(q, I2))
    return out


def _controlled(ctrl: int, target_op: dict, n: int) -> np.ndarray:
    return _embed({ctrl: P0}, n) + _embed({ctrl: P1, **target_op}, n)


def run_qasm(text: str) -> tuple[np.ndarray, float]:
    """Return ``(unitary, recorded_global_phase)``."""
    n = None
    U = None
    phase = 0.0
    for raw in text.splitlines():
        line = raw.strip()
        m = re.match(r"// global_phase (\S+)", line)
        if m:
            phase += float(m.group(1))
            continue
        if not line or line.startswith("//") or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        m = re.match(r"qreg q\[(\d+)\];", line)
        if m:
            n = int(m.group(1))
            U = np.eye(2**n, dtype=complex)
            continue
        m = re.match(r"(\w+)(?:\(([^)]*)\))?\s+(.*);", line)
        name, arg, operands = m.group(1), m.group(2), m.group(3)
        qs = [int(x) for x in re.findall(r"q\[(\d+)\]", operands)]
        theta = float(arg) if arg is not None else None
        if name == "rz":
            G = _embed({qs[0]: np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])}, n)
        elif name == "p":
            G = _embed({qs[0]: np.diag([1, np.exp(1j * theta)])}, n)
        elif name == "cx":
            G = _controlled(qs[0], {qs[1]: X}, n)
        elif name == "cp":
            G = _controlled(qs[0], {qs[1]: np.diag([1, np.exp(1j * theta)])}, n)
        else:
            raise ValueError(f"unsupported instruction {line!r}")
        U = G @ U
    return U, phase
