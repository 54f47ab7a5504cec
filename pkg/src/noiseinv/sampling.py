"""Seeded input-state ensembles.

Every sample ``k`` draws from its own Philox4x64-10 substream, keyed by the
ensemble seed with the counter's top word set to ``k``. Raw 64-bit outputs
become uniforms on ``(0, 1)`` via ``((x >> 11) + 0.5) * 2**-53`` and complex
Gaussians via Box-Muller, ``sqrt(-2 ln u1) * exp(2 pi i u2)``. The stream
therefore depends only on ``(kind, n, count, seed)`` and the sample index,
and any consumer can regenerate sample ``k`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .channel import StateOperator

GENERATOR = "philox4x64-10/box-muller/v1"
ENSEMBLES = ("haar", "signed", "physical")
_ALIASES = {"haarpure": "haar", "haar_pure": "haar", "signedmixture": "signed",
            "signed_mixture": "signed", "physicalmixture": "physical",
            "physical_mixture": "physical"}
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    count: int
    seed: int = 0

    def __post_init__(self):
        kind = _ALIASES.get(self.kind.lower(), self.kind.lower())
        if kind not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.kind!r}; expected one of {ENSEMBLES}")
        if int(self.count) < 1:
            raise ValueError("ensemble count must be at least 1")
        if int(self.n) < 1:
            raise ValueError("ensemble needs at least one qubit")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "seed", int(self.seed) & _MASK64)

    @property
    def d(self) -> int:
        return 2**self.n


def _uniforms(seed: int, index: int, size: int) -> np.ndarray:
    bg = np.random.Philox(key=seed, counter=[0, 0, 0, index])
    raw = bg.random_raw(size)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _gaussian_ket(u: np.ndarray) -> np.ndarray:
    u1, u2 = u[0::2], u[1::2]
    return np.sqrt(-2.0 * np.log(u1)) * np.exp(2j * np.pi * u2)


def haar_ket(d: int, seed: int, index: int) -> np.ndarray:
    psi = _gaussian_ket(_uniforms(seed, index, 2 * d))
    return psi / np.linalg.norm(psi)


def _mixture(spec: EnsembleSpec, index: int):
    d = spec.d
    u = _uniforms(spec.seed, index, 4 * d + 1)
    a = _gaussian_ket(u[: 2 * d])
    b = _gaussian_ket(u[2 * d : 4 * d])
    a = a / np.linalg.norm(a)
    b = b - np.vdot(a, b) * a
    b = b / np.linalg.norm(b)
    lo = -1.0 if spec.kind == "signed" else 0.0
    lam1 = lo + (1.0 - lo) * u[4 * d]
    lam2 = 1.0 - lam1
    rho = lam1 * np.outer(a, a.conj()) + lam2 * np.outer(b, b.conj())
    return rho, (lam1, lam2), (a, b)


def sample_matrix(spec: EnsembleSpec, index: int) -> np.ndarray:
    """Density matrix of sample ``index`` (no validation)."""
    if spec.kind == "haar":
        psi = haar_ket(spec.d, spec.seed, index)
        return np.outer(psi, psi.conj())
    return _mixture(spec, index)[0]


def sample_batch(spec: EnsembleSpec, start: int = 0, stop: int | None = None) -> np.ndarray:
    """Stack of sample matrices ``start <= k < stop``, shape ``(m, d, d)``."""
    stop = spec.count if stop is None else min(stop, spec.count)
    d = spec.d
    out = np.empty((max(stop - start, 0), d, d), dtype=complex)
    for row, k in enumerate(range(start, stop)):
        out[row] = sample_matrix(spec, k)
    return out


def mixture_parts(spec: EnsembleSpec, index: int):
    """``(lambda1, lambda2), (psi1, psi2)`` behind a mixture sample."""
    if spec.kind == "haar":
        raise ValueError("haar samples are not mixtures")
    _, lam, kets = _mixture(spec, index)
    return lam, kets


def haar_pure(spec: EnsembleSpec) -> Iterator[StateOperator]:
    if spec.kind != "haar":
        raise ValueError("haar_pure needs a haar ensemble spec")
    dims = (2,) * spec.n
    for k in range(spec.count):
        yield StateOperator(sample_matrix(spec, k), dims)


def two_state_mixture(spec: EnsembleSpec) -> Iterator[StateOperator]:
    """``lambda1 |psi1><psi1| + lambda2 |psi2><psi2|`` with orthonormal kets.

    ``lambda1`` is uniform on ``[-1, 1]`` (signed) or ``[0, 1]`` (physical) and
    ``lambda2 = 1 - lambda1``.
    """
    if spec.kind == "haar":
        raise ValueError("two_state_mixture needs a signed or physical ensemble spec")
    dims = (2,) * spec.n
    for k in range(spec.count):
        yield StateOperator(sample_matrix(spec, k), dims)


def ensemble(spec: EnsembleSpec) -> Iterator[StateOperator]:
    return haar_pure(spec) if spec.kind == "haar" else two_state_mixture(spec)


def random_unitary(d: int, seed: int, index: int = 0) -> np.ndarray:
    """Haar unitary via QR of a complex Gaussian matrix with phase fix."""
    z = _gaussian_ket(_uniforms(seed, index, 2 * d * d)).reshape(d, d)
    q, r = np.linalg.qr(z)
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph
