"""Scalar functionals of states and maps. All logarithms are base 2 (bits)."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import channel as ch
from . import linalg
from .channel import ChoiOperator, MixedUnitaryDecomposition, StateOperator
from .linalg import ATOL
from .noise import pauli_labels, pauli_string


class DecompositionError(ValueError):
    """A supplied decomposition is unusable for the requested quantity."""


def _matrix(s) -> np.ndarray:
    return s.matrix if isinstance(s, StateOperator) else linalg.as_square(s)


def _qubits(d: int) -> int:
    n = int(round(math.log2(d)))
    if 2**n != d:
        raise ValueError(f"Pauli-string basis needs a qubit system, got dimension {d}")
    return n


@dataclass(frozen=True)
class BlochVector:
    """Expectations ``r_a = Tr[rho O_a]`` of the non-identity Pauli strings.

    ``labels[i]`` is the index tuple of ``O_i``; ``Tr[O_a O_b] = d delta_ab``,
    so ``rho = (I + sum r_a O_a) / d``.
    """

    coefficients: np.ndarray
    labels: tuple

    @property
    def d(self) -> int:
        return 2 ** len(self.labels[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def to_matrix(self) -> np.ndarray:
        d = self.d
        out = np.eye(d, dtype=complex)
        for r, lab in zip(self.coefficients, self.labels):
            out = out + r * pauli_string(lab)
        return out / d


def purity(s) -> float | np.ndarray:
    """``Tr[rho^2]``; accepts a stack of operators."""
    m = _matrix(s)
    out = np.einsum("...ij,...ji->...", m, m).real
    return float(out) if out.ndim == 0 else out


def bloch_vector(s) -> BlochVector:
    m = _matrix(s)
    n = _qubits(m.shape[-1])
    labels = tuple(pauli_labels(n)[1:])
    ops = np.stack([pauli_string(lab) for lab in labels])
    r = np.einsum("ij,aji->a", m, ops).real
    return BlochVector(r, labels)


def _cut_dims(dims: Sequence[int], cut: int | None) -> tuple[int, int]:
    if cut is None:
        cut = len(dims) // 2
    a, b = ch.split_dims(dims, cut)
    return int(np.prod(a)), int(np.prod(b))


def log_negativity(s, cut: int | None = None, dims: Sequence[int] | None = None):
    """``log2 || rho^{T_B} ||_1`` across ``A = dims[:cut]``, ``B = dims[cut:]``.

    Works on a single state or a stack of operators (pass ``dims`` then).
    """
    if isinstance(s, StateOperator):
        m, dims = s.matrix, s.dims
    else:
        m = linalg.as_square(s)
        dims = dims or ch._qubit_dims(m.shape[-1])
    da, db = _cut_dims(dims, cut)
    pt = linalg.partial_transpose(m, (da, db), 1)
    out = np.log2(linalg.trace_norm(pt))
    return float(out) if np.ndim(out) == 0 else out


def mu_from_weights(q) -> float:
    """``log2 sqrt(sum q_i^2)``."""
    q = np.asarray(q, dtype=float).ravel()
    if q.size == 0:
        raise ValueError("empty weight list")
    return 0.5 * math.log2(float(np.sum(q * q)))


def nu_orthogonal(c: ChoiOperator, dec: MixedUnitaryDecomposition, atol: float = ATOL) -> float:
    """Exact implementability for an orthogonal mixed-unitary map.

    Returns ``log2 sum |q_i|`` after checking that ``dec`` reproduces ``c`` and
    that the result agrees with ``log2(||L||_1 / d)``.
    """
    if not dec.is_orthogonal:
        raise DecompositionError("decomposition is not orthogonal; use nu_bounds instead")
    if ch.choi_distance(ch.choi_from_mixed_unitary(dec), c) > atol * c.d:
        raise DecompositionError("decomposition does not reproduce the map")
    via_weights = math.log2(sum(abs(q) for q in dec.weights))
    via_norm = math.log2(linalg.trace_norm(c.matrix) / c.d)
    if abs(via_weights - via_norm) > atol:
        raise DecompositionError(
            f"weight sum ({via_weights:.12g}) and trace norm ({via_norm:.12g}) disagree"
        )
    return via_weights


@dataclass(frozen=True)
class ImplementabilityBounds:
    """Bounds on ``nu`` (bits) from the trace norm and extreme Choi eigenvalues.

    ``lower_*`` bound ``nu`` from below, ``upper_*`` from above. The
    eigenvalue bounds are floored at zero, since every trace-preserving map
    has ``nu >= 0``.
    """

    lower_trace: float
    upper_trace: float
    lower_max_eig: float
    lower_min_eig: float
    upper_min_eig: float
    lambda_min: float
    lambda_max: float

    @property
    def lower(self) -> float:
        return max(self.lower_trace, self.lower_max_eig, self.lower_min_eig)

    @property
    def upper(self) -> float:
        return min(self.upper_trace, self.upper_min_eig)

    def contains(self, value: float, atol: float = ATOL) -> bool:
        return self.lower - atol <= value <= self.upper + atol

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _log2_floor(x: float, atol: float = ATOL) -> float:
    return math.log2(x) if x > 1.0 + atol else 0.0


def nu_bounds(c: ChoiOperator, atol: float = ATOL) -> ImplementabilityBounds:
    if not ch.is_hp(c, atol):
        raise linalg.NotHermitianError("implementability bounds need a Hermitian-preserving map")
    d = c.d
    w = linalg.hermitian_eigenvalues(c.matrix, atol=atol)
    tn = float(np.sum(np.abs(w)))
    lmin, lmax = float(w[0]), float(w[-1])
    return ImplementabilityBounds(
        lower_trace=_log2_floor(tn / d),
        upper_trace=_log2_floor(tn),
        lower_max_eig=_log2_floor(2 * lmax / d - 1),
        lower_min_eig=_log2_floor(1 - 2 * lmin / d),
        # CP maps (lambda_min >= 0) are their own one-term decomposition
        upper_min_eig=_log2_floor(1 - 2 * (lmin if lmin < -atol else 0.0) * d),
        lambda_min=lmin,
        lambda_max=lmax,
    )


def eta_upper(
    terms: Sequence[tuple[float, ChoiOperator, ChoiOperator]],
    target: ChoiOperator | None = None,
    atol: float = ATOL,
) -> float:
    """Upper bound ``log2 sum |q_i|`` on the product-channel implementability.

    ``terms`` is ``[(q_i, T_i^A, T_i^B), ...]`` with CPTP factors. When
    ``target`` is given the decomposition must reproduce it.
    """
    terms = list(terms)
    if not terms:
        raise DecompositionError("empty decomposition")
    for _, ta, tb in terms:
        if not (ch.is_cptp(ta, atol) and ch.is_cptp(tb, atol)):
            raise DecompositionError("every factor must be CPTP")
    if target is not None:
        built = ch.choi_from_terms((q, ch.tensor(ta, tb)) for q, ta, tb in terms)
        if ch.choi_distance(built, target) > atol * target.d:
            raise DecompositionError("decomposition does not reproduce the target map")
    return math.log2(sum(abs(q) for q, _, _ in terms))


@dataclass(frozen=True)
class SeparabilityVerdict:
    """Result of the product-decomposition necessary condition.

    ``witness`` is ``(side, i, j, k, l)`` for the worst block, where ``side``
    names the traced-out output half (``"A"`` or ``"B"``); ``violation`` is the
    Frobenius norm of that reduced block.
    """

    passes: bool
    violation: float
    witness: tuple | None

    def __bool__(self):
        return self.passes


def separability_necessary(
    c: ChoiOperator, cut: int | None = None, atol: float = ATOL
) -> SeparabilityVerdict:
    """Necessary condition for ``c = sum_m q_m T_m^A x T_m^B``.

    Writing ``L = sum |i><j|_A x |k><l|_B x O_ijkl`` over the input indices,
    a product decomposition forces ``Tr_A[O_ijkl] = 0`` for ``i != j`` and
    ``Tr_B[O_ijkl] = 0`` for ``k != l``.
    """
    da, db = _cut_dims(c.dims, cut)
    # axes: iA, kB (input rows), xA, yB (output rows), jA, lB, uA, vB (cols)
    t = c.matrix.reshape(da, db, da, db, da, db, da, db)
    # Tr_A over output: contract x with u -> [i, k, y, j, l, v]
    tra = np.einsum("ikxyjlxv->ikyjlv", t)
    # Tr_B over output -> [i, k, x, j, l, u]
    trb = np.einsum("ikxyjluy->ikxjlu", t)
    worst, where = 0.0, None
    for i in range(da):
        for j in range(da):
            for k in range(db):
                for l in range(db):
                    if i != j:
                        v = float(np.linalg.norm(tra[i, k, :, j, l, :]))
                        if v > worst:
                            worst, where = v, ("A", i, j, k, l)
                    if k != l:
                        v = float(np.linalg.norm(trb[i, k, :, j, l, :]))
                        if v > worst:
                            worst, where = v, ("B", i, j, k, l)
    ok = worst <= atol
    return SeparabilityVerdict(ok, worst, None if ok else where)
