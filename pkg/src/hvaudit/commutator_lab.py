"""Finite-dimensional check that observables built from one Hermitian S commute.

If position and momentum were both functions of a single Hermitian operator,
``Z = c(S)`` and ``P = d(S)``, they would commute: ``c(S)`` and ``d(S)`` share
the eigenbasis of ``S``.  Truncated position and momentum do not commute, so no
such S exists.

Truncation caveat: on the first ``n`` oscillator levels ``[Z, P] / i`` equals the
identity except in its last diagonal entry, which is ``1 - n`` (the trace of a
finite commutator must vanish).  The profile reports this entry instead of
hiding it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "HermitianMatrix",
    "ScalarFunction",
    "FUNCTIONS",
    "polynomial",
    "apply_function",
    "commutator",
    "lemma_check",
    "lemma_bound",
    "random_hermitian",
    "truncated_position_momentum",
    "zp_commutator_profile",
    "CommutatorProfile",
]

HERMITIAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.allclose(a, a.conj().T, rtol=0.0, atol=HERMITIAN_TOL):
            raise ValueError("matrix not Hermitian")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ScalarFunction:
    """A real function applied elementwise to eigenvalues."""

    name: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.fn(x)


def polynomial(coeffs: Sequence[float], name: str | None = None) -> ScalarFunction:
    """Polynomial with coefficients in increasing degree order."""
    coeffs = tuple(float(c) for c in coeffs)
    label = name or "poly(" + ", ".join(f"{c:g}" for c in coeffs) + ")"
    return ScalarFunction(label, lambda x: np.polynomial.polynomial.polyval(x, coeffs))


FUNCTIONS = {
    "identity": ScalarFunction("identity", lambda x: x),
    "square": polynomial([0, 0, 1], "square"),
    "cube": polynomial([0, 0, 0, 1], "cube"),
    "quartic": polynomial([1, -2, 0.5, 0, 0.25], "quartic"),
    "sqrt": ScalarFunction("sqrt", np.sqrt),
    "exp": ScalarFunction("exp", np.exp),
    "sin": ScalarFunction("sin", np.sin),
    "cos": ScalarFunction("cos", np.cos),
}


def _as_array(m) -> np.ndarray:
    return m.entries if isinstance(m, HermitianMatrix) else np.asarray(m)


def apply_function(s: HermitianMatrix, f: ScalarFunction) -> HermitianMatrix:
    """f(S) = V f(Lambda) V^dagger from the eigendecomposition of S."""
    if not isinstance(s, HermitianMatrix):
        s = HermitianMatrix(s)
    w, v = np.linalg.eigh(s.entries)
    with np.errstate(invalid="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise ValueError(f"{f.name} is not defined on the spectrum")
    out = (v * fw) @ v.conj().T
    # exact symmetrization; round-off asymmetry is O(eps * ||f(S)||)
    return HermitianMatrix(0.5 * (out + out.conj().T))


def commutator(a, b) -> np.ndarray:
    a, b = _as_array(a), _as_array(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def _scale(m: HermitianMatrix) -> float:
    return max(1.0, float(np.linalg.norm(m.entries, 2)))


def lemma_bound(s: HermitianMatrix, c: ScalarFunction, d: ScalarFunction) -> float:
    """Tolerance 1e-8 * dim * max(1, ||c(S)||) * max(1, ||d(S)||), spectral norms."""
    return 1e-8 * s.dim * _scale(apply_function(s, c)) * _scale(apply_function(s, d))


def lemma_check(s: HermitianMatrix, c: ScalarFunction, d: ScalarFunction) -> float:
    """Frobenius norm of [c(S), d(S)]."""
    return float(np.linalg.norm(commutator(apply_function(s, c), apply_function(s, d)), "fro"))


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0) -> HermitianMatrix:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (a + a.conj().T) * scale / math.sqrt(dim)
    return HermitianMatrix(h)


def truncated_position_momentum(n: int) -> tuple[HermitianMatrix, HermitianMatrix]:
    """Z = (a + a^dagger)/sqrt(2), P = i(a^dagger - a)/sqrt(2) on n oscillator levels."""
    if n < 2:
        raise ValueError("dimension must be at least 2")
    a = np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)
    ad = a.conj().T
    return HermitianMatrix((a + ad) / math.sqrt(2)), HermitianMatrix(1j * (ad - a) / math.sqrt(2))


@dataclass(frozen=True)
class CommutatorProfile:
    n: int
    diagonal: tuple[float, ...]
    max_offdiagonal: float
    max_imag: float
    trace: float
    frobenius: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "diagonal": list(self.diagonal),
            "max_offdiagonal": self.max_offdiagonal,
            "max_imag": self.max_imag,
            "trace": self.trace,
            "frobenius": self.frobenius,
        }


def zp_commutator_profile(n: int) -> CommutatorProfile:
    """Diagonal of [Z, P] / i on n levels: (1, ..., 1, 1 - n)."""
    z, p = truncated_position_momentum(n)
    c = commutator(z, p) / 1j
    off = c - np.diag(np.diag(c))
    return CommutatorProfile(
        n=n,
        diagonal=tuple(float(x) for x in np.diag(c).real),
        max_offdiagonal=float(np.abs(off).max()) if n > 1 else 0.0,
        max_imag=float(np.abs(np.diag(c).imag).max()),
        trace=float(np.trace(c).real),
        frobenius=float(np.linalg.norm(c, "fro")),
    )
