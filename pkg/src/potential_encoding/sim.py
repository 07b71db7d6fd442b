"""Dense state-vector simulation of the circuit IR.

Amplitude arrays are indexed by basis state on axis 0 (bit ``b`` of the
index is qubit ``b``); extra trailing axes are carried along, so a whole
batch of states, or the identity matrix, can be pushed through a circuit in
one pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .circuit import CCPhase, CNOT, CPhase, Circuit, Gate, GlobalPhase, Phase, Rz
from .potential import qubits_for_length, state_index_label


class SimulationError(ValueError):
    pass


class NonDiagonalCircuitError(SimulationError):
    def __init__(self, k: int, leaked: float):
        super().__init__(f"circuit is not diagonal: basis state {k} leaks amplitude {leaked:.3g}")
        self.k = k
        self.leaked = leaked


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.amplitudes, dtype=complex).copy()
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)
        if a.ndim != 1:
            raise SimulationError("state amplitudes must be a 1-D array")
        qubits_for_length(a.size)
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > 1e-12:
            raise SimulationError(f"state is not normalized (norm={norm!r})")

    @property
    def n(self) -> int:
        return self.amplitudes.size.bit_length() - 1

    @property
    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    @classmethod
    def basis(cls, k: int, n: int) -> "StateVector":
        a = np.zeros(2**n, dtype=complex)
        a[k] = 1.0
        return cls(a)

    @classmethod
    def zero(cls, n: int) -> "StateVector":
        return cls.basis(0, n)

    @classmethod
    def uniform(cls, n: int) -> "StateVector":
        return cls(np.full(2**n, 2 ** (-n / 2), dtype=complex))

    @classmethod
    def from_unnormalized(cls, a) -> "StateVector":
        a = np.asarray(a, dtype=complex)
        return cls(a / np.linalg.norm(a))


@dataclass(frozen=True)
class DiagonalUnitary:
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex).copy()
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        qubits_for_length(e.size)
        dev = np.max(np.abs(np.abs(e) - 1.0))
        if dev > 1e-10:
            raise SimulationError(f"diagonal entries are not unit modulus (max deviation {dev:.3g})")

    @property
    def n(self) -> int:
        return self.entries.size.bit_length() - 1

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "real": [float(z.real) for z in self.entries], "imag": [float(z.imag) for z in self.entries]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "DiagonalUnitary":
        d = json.loads(text)
        return cls(np.array(d["real"]) + 1j * np.array(d["imag"]))

    def to_csv(self) -> str:
        rows = ["k,state,real,imag,phase"]
        for k, z in enumerate(self.entries):
            rows.append(f"{k},{state_index_label(k, self.n)},{float(z.real)!r},{float(z.imag)!r},{float(np.angle(z))!r}")
        return "\n".join(rows) + "\n"


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing probability after each 1-, 2- and 3-qubit gate."""

    p1: float = 0.0
    p2: float = 0.0
    p3: float = 0.0
    seed: int | None = 0

    def __post_init__(self):
        for name in ("p1", "p2", "p3"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise SimulationError(f"{name} must lie in [0, 1], got {p}")

    def probability(self, arity: int) -> float:
        return {1: self.p1, 2: self.p2, 3: self.p3}.get(arity, 0.0)


@dataclass(frozen=True)
class ShotResult:
    counts: dict
    shots: int

    def to_dict(self) -> dict:
        return {"shots": self.shots, "counts": dict(self.counts)}


@dataclass(frozen=True)
class SwapTestResult:
    estimate: float
    stderr: float
    shots: int
    zeros: int
    p0: float

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "stderr": self.stderr,
            "shots": self.shots,
            "ancilla_zero_counts": self.zeros,
            "p0_exact": self.p0,
        }


@dataclass(frozen=True)
class NoisyFidelity:
    mean: float
    stderr: float
    trajectories: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "trajectories": self.trajectories}


# -- gate kernels --------------------------------------------------------------


@lru_cache(maxsize=None)
def _indices(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    idx.setflags(write=False)
    return idx


def _bit(n: int, q: int) -> np.ndarray:
    return (_indices(n) >> q) & 1


def _check_qubits(g: Gate, n: int):
    if any(not 0 <= q < n for q in g.qubits):
        raise SimulationError(f"{g} addresses a qubit outside 0..{n - 1}")


def gate_phases(g: Gate, n: int) -> np.ndarray | None:
    """Diagonal of ``g`` as a length-``2**n`` vector, or ``None`` for a CNOT."""
    if isinstance(g, GlobalPhase):
        return np.full(2**n, np.exp(1j * g.phi))
    if isinstance(g, Rz):
        return np.exp(1j * (g.theta / 2) * (2 * _bit(n, g.q) - 1))
    if isinstance(g, Phase):
        return np.exp(1j * g.theta * _bit(n, g.q))
    if isinstance(g, CPhase):
        return np.exp(1j * g.theta * (_bit(n, g.a) & _bit(n, g.b)))
    if isinstance(g, CCPhase):
        return np.exp(1j * g.theta * (_bit(n, g.a) & _bit(n, g.b) & _bit(n, g.c)))
    if isinstance(g, CNOT):
        return None
    raise SimulationError(f"unsupported gate {g!r}")


def cnot_permutation(control: int, target: int, n: int) -> np.ndarray:
    idx = _indices(n)
    return idx ^ (((idx >> control) & 1) << target)


def _apply(amps: np.ndarray, g: Gate, n: int) -> np.ndarray:
    _check_qubits(g, n)
    ph = gate_phases(g, n)
    if ph is None:
        return amps[cnot_permutation(g.control, g.target, n)]
    if amps.ndim > 1:
        ph = ph.reshape((-1,) + (1,) * (amps.ndim - 1))
    return amps * ph


def _apply_pauli(amps: np.ndarray, qubits, code: int, n: int) -> np.ndarray:
    """Apply the Pauli string encoded base-4 in ``code`` (0=I, 1=X, 2=Y, 3=Z per qubit)."""
    idx = _indices(n)
    flip = 0
    z_mask = 0
    y_mask = 0
    for q in qubits:
        p = code & 3
        code >>= 2
        if p in (1, 2):
            flip |= 1 << q
        if p in (2, 3):
            z_mask |= 1 << q
        if p == 2:
            y_mask |= 1 << q
    # P = i^{#Y} X^flip Z^z ; (P psi)[k] = i^{#Y} (-1)^{popcount(z & (k^flip))} psi[k^flip]
    src = idx ^ flip
    par = np.zeros_like(idx)
    m = src & z_mask
    while np.any(m):
        par ^= m & 1
        m = m >> 1
    factor = (1j ** bin(y_mask).count("1")) * (1 - 2 * par)
    if amps.ndim > 1:
        factor = factor.reshape((-1,) + (1,) * (amps.ndim - 1))
    return amps[src] * factor


# -- public operations -----------------------------------------------------------


def apply_gate(state: StateVector, g: Gate) -> StateVector:
    return StateVector(_apply(state.amplitudes, g, state.n))


def evolve(state: StateVector, c: Circuit) -> StateVector:
    if state.n != c.n:
        raise SimulationError(f"state has {state.n} qubits, circuit has {c.n}")
    a = state.amplitudes
    for g in c.gates:
        a = _apply(a, g, c.n)
    return StateVector(a)


def unitary(c: Circuit) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix of ``c`` (column ``k`` is ``c|k>``)."""
    a = np.eye(2**c.n, dtype=complex)
    for g in c.gates:
        a = _apply(a, g, c.n)
    return a


def _diagonal_dense(c: Circuit, tol: float) -> np.ndarray:
    U = unitary(c)
    d = np.diag(U).copy()
    off = np.abs(U - np.diag(d))
    leak = off.max(axis=0)
    bad = np.flatnonzero(leak > tol)
    if bad.size:
        raise NonDiagonalCircuitError(int(bad[0]), float(leak[bad[0]]))
    return d


def _diagonal_tracked(c: Circuit, tol: float) -> np.ndarray:
    # every gate in the IR is a permutation times a diagonal: follow each basis state
    n = c.n
    where = _indices(n).copy()
    phase = np.ones(2**n, dtype=complex)
    for g in c.gates:
        _check_qubits(g, n)
        ph = gate_phases(g, n)
        if ph is None:
            where = where ^ (((where >> g.control) & 1) << g.target)
        else:
            phase = phase * ph[where]
    bad = np.flatnonzero(where != _indices(n))
    if bad.size:
        raise NonDiagonalCircuitError(int(bad[0]), 1.0)
    return phase


def circuit_diagonal(c: Circuit, tol: float = 1e-10, method: str = "track") -> DiagonalUnitary:
    """Diagonal of ``c`` including its global phase.

    ``method="dense"`` applies the circuit to every basis state and checks the
    full matrix; ``"track"`` follows basis states through CNOT permutations
    and is exact for this IR.
    """
    if method == "dense":
        d = _diagonal_dense(c, tol)
    elif method == "track":
        d = _diagonal_tracked(c, tol)
    else:
        raise ValueError(f"unknown method {method!r}")
    return DiagonalUnitary(d)


def fidelity_exact(a: StateVector, b: StateVector) -> float:
    if a.n != b.n:
        raise SimulationError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def swap_test_p0(a: StateVector, b: StateVector) -> float:
    """Ancilla ``|0>`` probability of the swap-test circuit on ``|0>|a>|b>``."""
    if a.n != b.n:
        raise SimulationError(f"dimension mismatch: {a.n} vs {b.n} qubits")
    # joint register as a matrix M[i, j] = a_i b_j; CSWAP on the ancilla-1 branch transposes it
    M = np.outer(a.amplitudes, b.amplitudes)
    branch0 = (M + M.T) / 2
    return float(min(1.0, np.sum(np.abs(branch0) ** 2)))


def swap_test(a: StateVector, b: StateVector, shots: int = 10000, seed=None) -> SwapTestResult:
    """Estimate ``|<a|b>|^2`` as ``2 P(0) - 1`` from ``shots`` ancilla readouts."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    p0 = swap_test_p0(a, b)
    rng = np.random.default_rng(seed)
    zeros = int(rng.binomial(shots, p0))
    p_hat = zeros / shots
    return SwapTestResult(
        estimate=2.0 * p_hat - 1.0,
        stderr=2.0 * float(np.sqrt(p_hat * (1.0 - p_hat) / shots)),
        shots=shots,
        zeros=zeros,
        p0=p0,
    )


def sample_counts(state: StateVector, shots: int, seed=None) -> ShotResult:
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    p = state.probabilities
    p = p / p.sum()
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(shots, p)
    counts = {state_index_label(k, state.n): int(m) for k, m in enumerate(draws) if m}
    return ShotResult(counts=counts, shots=shots)


def evolve_noisy(
    state: StateVector,
    c: Circuit,
    noise: NoiseModel,
    trajectories: int = 1000,
) -> NoisyFidelity:
    """Monte-Carlo mean fidelity against the noiseless output.

    After each gate, with probability ``p_arity`` a uniformly chosen
    non-identity Pauli string acts on that gate's qubits.
    """
    if trajectories < 1:
        raise SimulationError("trajectories must be >= 1")
    if state.n != c.n:
        raise SimulationError(f"state has {state.n} qubits, circuit has {c.n}")
    n = c.n
    ideal = evolve(state, c).amplitudes
    rng = np.random.default_rng(noise.seed)
    batch = np.repeat(state.amplitudes[:, None], trajectories, axis=1)
    for g in c.gates:
        batch = _apply(batch, g, n)
        k = len(g.qubits)
        p = noise.probability(k)
        if p <= 0.0:
            continue
        hit = rng.random(trajectories) < p
        codes = rng.integers(1, 4**k, size=trajectories)
        for code in np.unique(codes[hit]):
            cols = np.flatnonzero(hit & (codes == code))
            batch[:, cols] = _apply_pauli(batch[:, cols], g.qubits, int(code), n)
    fids = np.abs(ideal.conj() @ batch) ** 2
    se = float(fids.std(ddof=1) / np.sqrt(trajectories)) if trajectories > 1 else 0.0
    return NoisyFidelity(mean=float(fids.mean()), stderr=se, trajectories=trajectories)
