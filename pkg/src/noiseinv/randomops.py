"""Random operators for property checks (numpy ``Generator`` driven)."""

from __future__ import annotations

import numpy as np

from . import channel as ch
from .linalg import dagger


def ginibre(d: int, rng: np.random.Generator, cols: int | None = None) -> np.ndarray:
    cols = d if cols is None else cols
    return rng.normal(size=(d, cols)) + 1j * rng.normal(size=(d, cols))


def unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(d, rng))
    ph = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * ph


def hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(d, rng)
    return (g + dagger(g)) / 2


def unit_trace_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian, trace one, generally indefinite."""
    h = hermitian(d, rng)
    return h - (np.trace(h) - 1) * np.eye(d) / d


def density(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    g = ginibre(d, rng, rank)
    rho = g @ dagger(g)
    return rho / np.trace(rho)


def pure(d: int, rng: np.random.Generator) -> np.ndarray:
    psi = ginibre(d, rng, 1)[:, 0]
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def kraus(d: int, rng: np.random.Generator, k: int = 3) -> list[np.ndarray]:
    """Random CPTP Kraus set from an isometry ``d -> k d``."""
    v, _ = np.linalg.qr(ginibre(k * d, rng, d))
    return [v[i * d:(i + 1) * d, :] for i in range(k)]


def cptp(dims, rng: np.random.Generator, k: int = 3) -> ch.ChoiOperator:
    d = int(np.prod(dims))
    return ch.choi_from_kraus(kraus(d, rng, k), tuple(dims))
