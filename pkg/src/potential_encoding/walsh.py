"""Walsh-Hadamard analysis and synthesis of lattice functions.

Coefficients are indexed by Z-mask in natural binary order and carry the
``1/2**n`` factor, so that ``f_k = sum_j c_j * (-1)**popcount(j & k)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .potential import PotentialDomainError, qubits_for_length


def basis_vector(j: int, n: int) -> np.ndarray:
    """``±1`` Walsh function for Z-mask ``j``: entry ``k`` is ``(-1)**popcount(j & k)``."""
    if not 0 <= j < 2**n:
        raise IndexError(f"Z-mask {j} out of range for {n} qubits")
    k = np.arange(2**n)
    parity = np.zeros(2**n, dtype=np.int64)
    m = j & k
    while np.any(m):
        parity ^= m & 1
        m >>= 1
    return 1 - 2 * parity.astype(float)


def fwht(f) -> np.ndarray:
    """Unnormalized in-order fast Walsh-Hadamard butterfly, ``O(N log N)``.

    Applying it twice returns ``N * f``.
    """
    a = np.array(f, dtype=float)
    size = a.shape[0]
    qubits_for_length(size)
    h = 1
    while h < size:
        # pair up entries whose indices differ only in the bit of weight h
        blocks = a.reshape(-1, 2, h)
        lo = blocks[:, 0, :].copy()
        hi = blocks[:, 1, :]
        blocks[:, 0, :] += hi
        blocks[:, 1, :] = lo - hi
        h *= 2
    return a


@dataclass(frozen=True)
class WalshSpectrum:
    n: int
    coeffs: np.ndarray = field(repr=False)
    normalization: str = "mean"

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if self.normalization != "mean":
            raise ValueError(f"unsupported normalization {self.normalization!r}")
        if c.shape != (2**self.n,):
            raise ValueError(f"expected {2**self.n} coefficients, got {c.shape}")

    def to_json(self) -> str:
        return json.dumps(
            {"n": self.n, "normalization": self.normalization, "coeffs": [float(v) for v in self.coeffs]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "WalshSpectrum":
        d = json.loads(text)
        return cls(n=int(d["n"]), coeffs=d["coeffs"], normalization=d.get("normalization", "mean"))


def analyze(f) -> WalshSpectrum:
    values = np.asarray(f, dtype=float)
    if values.ndim != 1:
        raise PotentialDomainError("expected a 1-D vector")
    n = qubits_for_length(values.shape[0])
    if not np.all(np.isfinite(values)):
        raise PotentialDomainError("entries must be finite")
    return WalshSpectrum(n=n, coeffs=fwht(values) / values.shape[0])


def synthesize(spectrum: WalshSpectrum) -> np.ndarray:
    return fwht(spectrum.coeffs)
