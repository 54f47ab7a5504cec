"""Parametric multiqubit noise families and their analytic inverses.

Four families are supported:

``pauli``
    ``(1 - e) rho + e P rho P`` for a fixed Pauli string ``P`` (axes in x/y/z).
``depolarizing``
    ``(1 - e) rho + e I / 2^n``.
``dephasing``
    ``(1 - e) rho + e / 2^n sum_{Z strings} Z rho Z``.
``amplitude_damping``
    Tensor product of single-qubit amplitude damping with Kraus operators
    ``|0><0| + sqrt(1 - e)|1><1|`` and ``sqrt(e)|0><1|``.

The first three have orthogonal mixed-unitary inverses, so ``nu`` follows
from the trace norm of the inverse Choi matrix. Amplitude damping is handled
through a per-qubit signed decomposition into product channels (see
:func:`amplitude_damping_inverse_terms`).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from . import channel as ch
from .channel import ChoiOperator, MixedUnitaryDecomposition

KINDS = ("pauli", "depolarizing", "dephasing", "amplitude_damping")
_AXIS_NAMES = {"x": 1, "y": 2, "z": 3, "1": 1, "2": 2, "3": 3}

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

DEFAULT_EPSILONS = tuple(round(0.01 * k, 2) for k in range(1, 31))


def pauli_string(indices) -> np.ndarray:
    """Kronecker product of ``PAULI[a]`` over ``indices`` (0 = identity)."""
    return reduce(np.kron, (PAULI[int(a)] for a in indices))


def pauli_labels(n: int, alphabet=(0, 1, 2, 3)):
    """All index tuples of length ``n`` in lexicographic order."""
    return list(itertools.product(alphabet, repeat=n))


class NoiseRangeError(ValueError):
    """Error rate outside ``[0, eps_max)``."""


@dataclass(frozen=True)
class NoiseFamily:
    """Descriptor ``{kind, n, epsilon}`` (plus Pauli axes for ``pauli``)."""

    kind: str
    n: int
    epsilon: float = 0.0
    axes: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {KINDS}")
        if int(self.n) < 1:
            raise ValueError("noise needs at least one qubit")
        object.__setattr__(self, "n", int(self.n))
        if self.kind == "pauli":
            axes = self.axes if self.axes is not None else (3,) * self.n
            axes = tuple(_AXIS_NAMES[str(a).lower()] for a in axes)
            if len(axes) != self.n:
                raise ValueError(f"pauli noise on {self.n} qubits needs {self.n} axes, got {axes}")
            object.__setattr__(self, "axes", axes)
        elif self.axes is not None:
            raise ValueError("axes only apply to pauli noise")
        eps = float(self.epsilon)
        if not 0.0 <= eps < self.eps_max:
            raise NoiseRangeError(
                f"epsilon={eps} outside [0, {self.eps_max}) for {self.kind} noise"
            )
        object.__setattr__(self, "epsilon", eps)

    @property
    def eps_max(self) -> float:
        return 0.5 if self.kind == "pauli" else 1.0

    @property
    def d(self) -> int:
        return 2**self.n

    @property
    def dims(self) -> tuple[int, ...]:
        return (2,) * self.n

    def with_epsilon(self, epsilon: float) -> "NoiseFamily":
        return NoiseFamily(self.kind, self.n, epsilon, self.axes)

    @property
    def label(self) -> str:
        if self.kind == "pauli":
            return "pauli:" + "".join("ixyz"[a] for a in self.axes)
        return self.kind

    @classmethod
    def parse(cls, text: str, n: int, epsilon: float = 0.0) -> "NoiseFamily":
        """Build from ``"depolarizing"``, ``"dephasing"``, ``"amplitude_damping"``
        or ``"pauli[:axes]"`` (e.g. ``"pauli:zz"``)."""
        kind, _, axes = text.strip().lower().partition(":")
        kind = {"ad": "amplitude_damping", "amplitude-damping": "amplitude_damping",
                "depol": "depolarizing", "phase-flip": "pauli"}.get(kind, kind)
        if kind == "pauli":
            return cls(kind, n, epsilon, tuple(axes) if axes else None)
        if axes:
            raise ValueError(f"{kind} noise takes no axes")
        return cls(kind, n, epsilon)


# --- decompositions ---------------------------------------------------------


def _unitary_terms(f: NoiseFamily, inverse: bool) -> tuple[list[float], list[tuple[int, ...]]]:
    e, n = f.epsilon, f.n
    if f.kind == "pauli":
        if inverse:
            q = [(1 - e) / (1 - 2 * e), -e / (1 - 2 * e)]
        else:
            q = [1 - e, e]
        return q, [(0,) * n, f.axes]
    if f.kind == "depolarizing":
        labels = pauli_labels(n)
        m = 4**n
    elif f.kind == "dephasing":
        labels = pauli_labels(n, (0, 3))
        m = 2**n
    else:
        raise ValueError("amplitude damping has no mixed-unitary decomposition")
    if inverse:
        rest = -e / ((1 - e) * m)
        first = 1 / (1 - e) + rest
    else:
        rest = e / m
        first = 1 - e + rest
    return [first] + [rest] * (m - 1), labels


def channel_decomposition(f: NoiseFamily) -> MixedUnitaryDecomposition:
    """Orthogonal mixed-unitary form of the noise itself (not amplitude damping)."""
    q, labels = _unitary_terms(f, inverse=False)
    return MixedUnitaryDecomposition(tuple(q), tuple(pauli_string(a) for a in labels), f.dims)


def inverse_decomposition(f: NoiseFamily) -> MixedUnitaryDecomposition:
    """Signed orthogonal mixed-unitary form of the inverse (not amplitude damping)."""
    q, labels = _unitary_terms(f, inverse=True)
    return MixedUnitaryDecomposition(tuple(q), tuple(pauli_string(a) for a in labels), f.dims)


def inverse_pauli_labels(f: NoiseFamily) -> list[tuple[int, ...]]:
    return _unitary_terms(f, inverse=True)[1]


def amplitude_damping_kraus(epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    e0 = np.array([[1, 0], [0, math.sqrt(1 - epsilon)]], dtype=complex)
    e1 = np.array([[0, math.sqrt(epsilon)], [0, 0]], dtype=complex)
    return e0, e1


def reset_channel() -> ChoiOperator:
    """Single-qubit reset to ``|0>``."""
    k0 = np.array([[1, 0], [0, 0]], dtype=complex)
    k1 = np.array([[0, 1], [0, 0]], dtype=complex)
    return ch.choi_from_kraus([k0, k1], (2,))


def phase_damping_channel(coherence: float) -> ChoiOperator:
    """Single-qubit map keeping populations and scaling coherences by ``coherence``."""
    a = math.sqrt((1 + coherence) / 2)
    b = math.sqrt((1 - coherence) / 2)
    return ch.choi_from_kraus([a * PAULI[0], b * PAULI[3]], (2,))


def amplitude_damping_inverse_terms(epsilon: float) -> list[tuple[float, ChoiOperator]]:
    """Single-qubit inverse as ``q_+ T_+ + q_- T_-`` with CPTP ``T_+-``.

    ``T_+`` is phase damping with coherence ``sqrt(1 - e)``, ``T_-`` is reset to
    ``|0>``; ``q_+ = 1 / (1 - e)`` and ``q_- = -e / (1 - e)``, so the absolute
    weights sum to ``(1 + e) / (1 - e)``.
    """
    qp = 1.0 / (1.0 - epsilon)
    qm = -epsilon / (1.0 - epsilon)
    return [(qp, phase_damping_channel(math.sqrt(1.0 - epsilon))), (qm, reset_channel())]


def product_inverse_terms(f: NoiseFamily, cut: int | None = None):
    """Inverse as ``[(q, T_A, T_B), ...]`` with CPTP factors across ``cut``.

    Every family decomposes site by site, so each term factorizes over any cut.
    """
    cut = f.n // 2 if cut is None else cut
    if not 0 < cut < f.n:
        raise ValueError(f"cut {cut} does not split {f.n} qubits")
    out = []
    if f.kind == "amplitude_damping":
        single = amplitude_damping_inverse_terms(f.epsilon)
        for combo in itertools.product(single, repeat=f.n):
            q = math.prod(t[0] for t in combo)
            ta = reduce(ch.tensor, (t[1] for t in combo[:cut]))
            tb = reduce(ch.tensor, (t[1] for t in combo[cut:]))
            out.append((q, ta, tb))
        return out
    q, labels = _unitary_terms(f, inverse=True)
    for w, lab in zip(q, labels):
        ta = ch.choi_from_unitary(pauli_string(lab[:cut]), (2,) * cut)
        tb = ch.choi_from_unitary(pauli_string(lab[cut:]), (2,) * (f.n - cut))
        out.append((w, ta, tb))
    return out


def inverse_weights(f: NoiseFamily) -> np.ndarray:
    """Signed quasi-probability weights of the analytic inverse decomposition."""
    if f.kind == "amplitude_damping":
        qp = 1.0 / (1.0 - f.epsilon)
        qm = -f.epsilon / (1.0 - f.epsilon)
        return np.array([math.prod(c) for c in itertools.product((qp, qm), repeat=f.n)])
    return np.array(_unitary_terms(f, inverse=True)[0])


# --- channels ---------------------------------------------------------------


def build_channel(f: NoiseFamily) -> ChoiOperator:
    """CPTP Choi operator of the noise."""
    if f.kind == "amplitude_damping":
        single = ch.choi_from_kraus(amplitude_damping_kraus(f.epsilon), (2,))
        return reduce(ch.tensor, [single] * f.n)
    return ch.choi_from_mixed_unitary(channel_decomposition(f))


def build_inverse(f: NoiseFamily) -> ChoiOperator:
    """Choi operator of the inverse map (HPTP, not CP for ``epsilon > 0``).

    Mixed-unitary families use their closed-form signed decompositions;
    amplitude damping is inverted numerically through the transfer matrix.
    """
    if f.kind == "amplitude_damping":
        return ch.inverse(build_channel(f))
    return ch.choi_from_mixed_unitary(inverse_decomposition(f))


# --- closed forms -----------------------------------------------------------


def nu_inverse(f: NoiseFamily) -> float:
    """Physical implementability of the inverse, in bits."""
    e, n = f.epsilon, f.n
    if f.kind == "pauli":
        return math.log2(1 / (1 - 2 * e))
    if f.kind == "depolarizing":
        return math.log2((1 + (1 - 2 / 4**n) * e) / (1 - e))
    if f.kind == "dephasing":
        return math.log2((1 + (1 - 2 / 2**n) * e) / (1 - e))
    return n * math.log2((1 + e) / (1 - e))


def mu_inverse(f: NoiseFamily) -> float:
    """Root-mean-square estimator ``log2 sqrt(sum q_i^2)`` of the inverse weights."""
    e, n = f.epsilon, f.n
    if f.kind == "pauli":
        return 0.5 * math.log2(((1 - e) ** 2 + e**2) / (1 - 2 * e) ** 2)
    if f.kind in ("depolarizing", "dephasing"):
        m = 4**n if f.kind == "depolarizing" else 2**n
        rest = e / ((1 - e) * m)
        first = 1 / (1 - e) - rest
        return 0.5 * math.log2(first**2 + (m - 1) * rest**2)
    return 0.5 * n * math.log2((1 + e**2) / (1 - e) ** 2)


def max_entangled_delta(f: NoiseFamily) -> float:
    """Change of log-negativity of the half-cut maximally entangled state.

    Pauli strings that act identically on each mirrored pair of qubits
    (``alpha_k == alpha_{n-1-k}``) leave the state invariant. For two qubits
    with mismatched axes the output is a two-term Bell-diagonal mixture, giving
    ``log2(1 - e)``.
    """
    n, e = f.n, f.epsilon
    if n % 2:
        raise ValueError("maximally entangled benchmark needs an even number of qubits")
    ds = 2 ** (n // 2)
    if f.kind == "pauli":
        if all(f.axes[k] == f.axes[n - 1 - k] for k in range(n // 2)):
            return 0.0
        if n == 2:
            return math.log2(1 - e)
        raise NotImplementedError("closed form only for mirror-symmetric Pauli strings when n > 2")
    if f.kind == "depolarizing":
        return math.log2(1 - (1 - 1 / ds**2) * e)
    if f.kind == "dephasing":
        return math.log2(1 - (1 - 1 / ds) * e)
    return (n / 2) * math.log2(1 - e + e**2 / 2)
