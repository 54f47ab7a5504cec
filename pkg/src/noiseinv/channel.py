"""Choi-operator representation of linear maps on a finite system.

Index convention: the Choi matrix acts on ``sigma (input) x tau (output)``
with the input factor most significant, and

    <i_sigma k_tau| L |j_sigma l_tau> = <k| T(|i><j|) |l>.

With that ordering the action of a map is a literal partial trace,
``T(rho) = Tr_sigma[(rho^T x I_tau) L]``.

The transfer matrix (superoperator) uses row-major vectorization,
``vec(rho)[i * d + j] = rho[i, j]``, so a unitary channel ``U . U^dag`` has
transfer matrix ``kron(U, conj(U))``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .linalg import ATOL, DimensionError, dagger


class ChannelError(ValueError):
    """Inconsistent channel data (bad Kraus set, non-unitary term, ...)."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ChoiOperator:
    """A linear map on a ``d``-dimensional system stored as its Choi matrix.

    ``dims`` is the factorization of the physical system (for example
    ``(2, 2)`` for two qubits). The same factorization applies to the input
    and output halves.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        m = linalg.as_square(self.matrix)
        if m.ndim != 2:
            raise DimensionError("Choi matrix must be a single matrix")
        dims = tuple(int(x) for x in self.dims)
        d = int(np.prod(dims))
        if m.shape[0] != d * d:
            raise DimensionError(f"Choi matrix of shape {m.shape} does not match dims {dims}")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return int(np.prod(self.dims))

    @property
    def tensor(self) -> np.ndarray:
        """Matrix reshaped to ``[i, k, j, l]`` (input row, output row, input col, output col)."""
        d = self.d
        return self.matrix.reshape(d, d, d, d)

    def __call__(self, rho):
        return apply(self, rho)


@dataclass(frozen=True)
class StateOperator:
    """Hermitian unit-trace operator; ``physical`` records positivity.

    Non-positive inputs are allowed on purpose (signed mixtures); only the
    flag tells them apart.
    """

    matrix: np.ndarray
    dims: tuple[int, ...]
    physical: bool = field(default=None)
    atol: float = field(default=ATOL, repr=False, compare=False)

    def __post_init__(self):
        m = linalg.as_square(self.matrix)
        if m.ndim != 2:
            raise DimensionError("state must be a single matrix")
        dims = linalg.check_dims(self.dims, m.shape[0])
        if not linalg.is_hermitian(m, self.atol):
            raise ValueError("state operator must be Hermitian")
        if abs(np.trace(m) - 1.0) > self.atol:
            raise ValueError(f"state operator must have unit trace, got {np.trace(m).real:.12g}")
        psd = bool(linalg.hermitian_eigenvalues(m, atol=self.atol)[0] >= -self.atol)
        if self.physical is None:
            object.__setattr__(self, "physical", psd)
        elif self.physical and not psd:
            raise ValueError("state flagged physical but has negative eigenvalues")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int] | None = None) -> "StateOperator":
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        dims = dims or _qubit_dims(psi.size)
        return cls(np.outer(psi, psi.conj()), dims)


def _qubit_dims(d: int) -> tuple[int, ...]:
    n = int(round(np.log2(d)))
    if 2**n == d and n > 0:
        return (2,) * n
    return (d,)


@dataclass(frozen=True)
class KrausChannel:
    """Operator-sum form ``T(rho) = sum_i E_i rho E_i^dag``."""

    ops: tuple
    dims: tuple[int, ...] | None = None
    atol: float = field(default=ATOL, repr=False, compare=False)

    def __post_init__(self):
        ops = [linalg.as_square(e) for e in self.ops]
        if not ops:
            raise ChannelError("Kraus channel needs at least one operator")
        d = ops[0].shape[0]
        if any(e.shape != (d, d) for e in ops):
            raise ChannelError("Kraus operators have inconsistent dimensions")
        total = sum(dagger(e) @ e for e in ops)
        if np.max(np.abs(total - np.eye(d))) > self.atol:
            raise ChannelError("Kraus operators violate completeness sum E^dag E = I")
        dims = linalg.check_dims(self.dims or _qubit_dims(d), d)
        object.__setattr__(self, "ops", tuple(_frozen(e) for e in ops))
        object.__setattr__(self, "dims", dims)


@dataclass(frozen=True)
class MixedUnitaryDecomposition:
    """Signed combination ``N(rho) = sum_i q_i U_i rho U_i^dag``."""

    weights: tuple
    unitaries: tuple
    dims: tuple[int, ...] | None = None
    atol: float = field(default=ATOL, repr=False, compare=False)

    def __post_init__(self):
        q = np.asarray(self.weights, dtype=float).ravel()
        us = [linalg.as_square(u) for u in self.unitaries]
        if len(us) != q.size or not us:
            raise ChannelError("need one weight per unitary")
        d = us[0].shape[0]
        for u in us:
            if u.shape != (d, d) or not linalg.is_unitary(u, self.atol):
                raise ChannelError("decomposition term is not a unitary of common dimension")
        if abs(q.sum() - 1.0) > self.atol:
            raise ChannelError(f"weights sum to {q.sum():.12g}, not 1")
        dims = linalg.check_dims(self.dims or _qubit_dims(d), d)
        object.__setattr__(self, "weights", tuple(float(x) for x in q))
        object.__setattr__(self, "unitaries", tuple(_frozen(u) for u in us))
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return self.unitaries[0].shape[0]

    @property
    def is_orthogonal(self) -> bool:
        """``Tr[U_i^dag U_j] = d delta_ij`` within tolerance."""
        u = np.stack(self.unitaries)
        gram = np.einsum("aji,bjk->abik", u.conj(), u).trace(axis1=2, axis2=3)
        return bool(np.all(np.abs(gram - self.d * np.eye(len(u))) <= self.atol * self.d))

    def conjugated(self, left, right) -> "MixedUnitaryDecomposition":
        """Decomposition of ``U o N o V``, i.e. terms ``U U_i V``."""
        left = np.asarray(left, dtype=complex)
        right = np.asarray(right, dtype=complex)
        return MixedUnitaryDecomposition(
            self.weights, tuple(left @ u @ right for u in self.unitaries), self.dims, self.atol
        )

    def tensor(self, other: "MixedUnitaryDecomposition") -> "MixedUnitaryDecomposition":
        weights, unitaries = [], []
        for qa, ua in zip(self.weights, self.unitaries):
            for qb, ub in zip(other.weights, other.unitaries):
                weights.append(qa * qb)
                unitaries.append(np.kron(ua, ub))
        return MixedUnitaryDecomposition(
            tuple(weights), tuple(unitaries), self.dims + other.dims, max(self.atol, other.atol)
        )


# --- construction -----------------------------------------------------------


def choi_from_kraus(k: KrausChannel | Sequence, dims: Sequence[int] | None = None) -> ChoiOperator:
    if not isinstance(k, KrausChannel):
        k = KrausChannel(tuple(k), tuple(dims) if dims else None)
    d = k.ops[0].shape[0]
    lam = np.zeros((d, d, d, d), dtype=complex)
    for e in k.ops:
        # L[i, k, j, l] = sum E[k, i] conj(E[l, j])
        lam += np.einsum("ki,lj->ikjl", e, e.conj())
    return ChoiOperator(lam.reshape(d * d, d * d), k.dims)


def choi_from_unitary(u, dims: Sequence[int] | None = None) -> ChoiOperator:
    u = linalg.as_square(u)
    if not linalg.is_unitary(u):
        raise ChannelError("choi_from_unitary needs a unitary matrix")
    return choi_from_kraus(KrausChannel((u,), tuple(dims) if dims else None))


def choi_from_mixed_unitary(m: MixedUnitaryDecomposition) -> ChoiOperator:
    d = m.d
    lam = np.zeros((d, d, d, d), dtype=complex)
    for q, u in zip(m.weights, m.unitaries):
        lam += q * np.einsum("ki,lj->ikjl", u, u.conj())
    return ChoiOperator(lam.reshape(d * d, d * d), m.dims)


def choi_from_terms(terms: Iterable[tuple[float, ChoiOperator]]) -> ChoiOperator:
    """Weighted sum ``sum_i q_i T_i`` of maps on a common system."""
    terms = list(terms)
    if not terms:
        raise ChannelError("empty term list")
    dims = terms[0][1].dims
    total = np.zeros_like(terms[0][1].matrix)
    for q, c in terms:
        if c.dims != dims:
            raise DimensionError("terms act on different systems")
        total = total + q * c.matrix
    return ChoiOperator(total, dims)


def identity_channel(dims: Sequence[int] | int) -> ChoiOperator:
    if isinstance(dims, (int, np.integer)):
        dims = _qubit_dims(int(dims))
    d = int(np.prod(dims))
    return choi_from_kraus(KrausChannel((np.eye(d),), tuple(dims)))


def completely_depolarizing(dims: Sequence[int]) -> ChoiOperator:
    """Map sending every state to ``I/d``; Choi matrix ``I/d``."""
    d = int(np.prod(dims))
    return ChoiOperator(np.eye(d * d) / d, tuple(dims))


# --- action -----------------------------------------------------------------


def apply_matrix(c: ChoiOperator, rho) -> np.ndarray:
    """Raw matrix action of ``c`` on an operator or a stack of operators."""
    rho = linalg.as_square(rho)
    if rho.shape[-1] != c.d:
        raise DimensionError(f"operator dim {rho.shape[-1]} does not match channel dim {c.d}")
    return np.einsum("...ij,ikjl->...kl", rho, c.tensor)


def apply(c: ChoiOperator, s) -> StateOperator:
    """``Tr_sigma[(rho^T x I) L]`` with the physical flag recomputed."""
    if isinstance(s, StateOperator):
        mat, dims = s.matrix, s.dims
    else:
        mat = linalg.as_square(s)
        dims = c.dims
    if mat.shape[0] != c.d:
        raise DimensionError(f"state dim {mat.shape[0]} does not match channel dim {c.d}")
    out = apply_matrix(c, mat)
    return StateOperator(out, dims)


def reshuffle(c: ChoiOperator) -> np.ndarray:
    """Transfer matrix ``S[(k, l), (i, j)] = L[(i, k), (j, l)]``."""
    d = c.d
    return np.ascontiguousarray(c.tensor.transpose(1, 3, 0, 2)).reshape(d * d, d * d)


def from_transfer_matrix(s, dims: Sequence[int]) -> ChoiOperator:
    """Inverse of :func:`reshuffle`."""
    s = linalg.as_square(s)
    d = int(np.prod(dims))
    if s.shape[0] != d * d:
        raise DimensionError("transfer matrix does not match dims")
    lam = s.reshape(d, d, d, d).transpose(2, 0, 3, 1)
    return ChoiOperator(lam.reshape(d * d, d * d), tuple(dims))


def _same_system(a: ChoiOperator, b: ChoiOperator):
    if a.d != b.d:
        raise DimensionError(f"maps act on dimensions {a.d} and {b.d}")


def compose(a: ChoiOperator, b: ChoiOperator) -> ChoiOperator:
    """Map ``a o b`` (``b`` first)."""
    _same_system(a, b)
    return from_transfer_matrix(reshuffle(a) @ reshuffle(b), a.dims)


def tensor(a: ChoiOperator, b: ChoiOperator) -> ChoiOperator:
    """Choi matrix of ``a x b`` with both input factors ahead of both outputs."""
    da, db = a.d, b.d
    t = np.einsum("ikjl,mnpq->imknjplq", a.tensor, b.tensor)
    d = da * db
    return ChoiOperator(t.reshape(d * d, d * d), a.dims + b.dims)


def inverse(c: ChoiOperator, max_condition: float = linalg.MAX_CONDITION) -> ChoiOperator:
    """Inverse map via the transfer matrix.

    Raises
    ------
    SingularMatrixError
        If the transfer matrix is singular or its condition number exceeds
        ``max_condition``.
    """
    return from_transfer_matrix(linalg.invert(reshuffle(c), max_condition), c.dims)


# --- predicates -------------------------------------------------------------


def is_hp(c: ChoiOperator, atol: float = ATOL) -> bool:
    return linalg.is_hermitian(c.matrix, atol)


def is_tp(c: ChoiOperator, atol: float = ATOL) -> bool:
    red = linalg.partial_trace(c.matrix, (c.d, c.d), keep=[0])
    return bool(np.max(np.abs(red - np.eye(c.d))) <= atol)


def is_cp(c: ChoiOperator, atol: float = ATOL) -> bool:
    if not is_hp(c, atol):
        return False
    return bool(linalg.hermitian_eigenvalues(c.matrix, atol=atol)[0] >= -atol)


def is_cptp(c: ChoiOperator, atol: float = ATOL) -> bool:
    return is_tp(c, atol) and is_cp(c, atol)


def choi_distance(a: ChoiOperator, b: ChoiOperator) -> float:
    """Frobenius distance between Choi matrices."""
    _same_system(a, b)
    return float(np.linalg.norm(a.matrix - b.matrix))


# --- bipartite structure ----------------------------------------------------


def split_dims(dims: Sequence[int], cut: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a factorization into ``A = dims[:cut]`` and ``B = dims[cut:]``."""
    dims = tuple(dims)
    if not 0 < cut < len(dims):
        raise DimensionError(f"cut {cut} does not split {len(dims)} subsystems into two parts")
    return dims[:cut], dims[cut:]


def _bipartite(dims: Sequence[int], cut: int | None) -> tuple[int, int]:
    if cut is None:
        if len(dims) < 2:
            raise DimensionError("map has no bipartite factorization")
        cut = len(dims) // 2
    a, b = split_dims(dims, cut)
    return int(np.prod(a)), int(np.prod(b))


def map_partial_transpose(c: ChoiOperator, cut: int | None = None) -> ChoiOperator:
    """Partial transpose of the Choi matrix on the B factor of input and output.

    ``cut`` separates subsystem A (first ``cut`` factors) from B; the default
    is the half cut.
    """
    da, db = _bipartite(c.dims, cut)
    m = linalg.partial_transpose(c.matrix, (da, db, da, db), which=[1, 3])
    return ChoiOperator(m, c.dims)


# --- serialization ----------------------------------------------------------

JSON_LAYOUT = "choi/v1"


def to_json_dict(c: ChoiOperator) -> dict:
    """``{"layout", "d", "factorization", "entries"}`` with row-major ``[re, im]`` pairs."""
    return {
        "layout": JSON_LAYOUT,
        "d": c.d,
        "factorization": list(c.dims),
        "entries": [[float(z.real), float(z.imag)] for z in c.matrix.ravel()],
    }


def from_json_dict(obj: dict) -> ChoiOperator:
    try:
        d = int(obj["d"])
        dims = tuple(int(x) for x in obj.get("factorization") or (d,))
        raw = np.asarray(obj["entries"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ChannelError(f"malformed Choi JSON: {exc}") from exc
    if raw.shape != (d**4, 2):
        raise ChannelError(f"expected {d**4} [re, im] pairs, got array of shape {raw.shape}")
    if int(np.prod(dims)) != d:
        raise ChannelError(f"factorization {dims} does not multiply to d={d}")
    m = (raw[:, 0] + 1j * raw[:, 1]).reshape(d * d, d * d)
    return ChoiOperator(m, dims)


def save_json(c: ChoiOperator, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_json_dict(c), fh)


def load_json(path) -> ChoiOperator:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChannelError(f"malformed Choi JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ChannelError("Choi JSON must be an object")
    return from_json_dict(obj)


# --- reference states -------------------------------------------------------


def max_entangled_state(n: int) -> StateOperator:
    """Half-cut maximally entangled state of ``n`` qubits.

    Qubit ``k`` is paired with qubit ``n - 1 - k`` in a ``|00> + |11>`` Bell pair,
    so the ket is ``sum |i_1 ... i_{n/2} i_{n/2} ... i_1>`` up to normalization.
    """
    if n < 2 or n % 2:
        raise ValueError("maximally entangled state needs an even number of qubits")
    h = n // 2
    psi = np.zeros(2**n, dtype=complex)
    for idx in range(2**h):
        bits = [(idx >> (h - 1 - k)) & 1 for k in range(h)]
        full = bits + bits[::-1]
        pos = int("".join(map(str, full)), 2)
        psi[pos] = 1.0
    return StateOperator.from_ket(psi, (2,) * n)
