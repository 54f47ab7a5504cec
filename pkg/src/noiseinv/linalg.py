"""Dense complex linear algebra on small operators.

Everything here accepts either a single ``(D, D)`` matrix or a stack of them
with shape ``(..., D, D)``; stacks are processed in one vectorized pass. Tensor
factor 0 is the most significant index, so for dims ``(2, 2)`` the basis order
is ``|00>, |01>, |10>, |11>``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-9
EIG_TOL = 1e-12
MAX_CONDITION = 1e12
MAX_SWEEPS = 60


class DimensionError(ValueError):
    """Matrix shape disagrees with a declared factorization."""


class NotHermitianError(ValueError):
    """A Hermitian-only routine received a non-Hermitian matrix."""


class SingularMatrixError(np.linalg.LinAlgError):
    """Matrix is singular or too badly conditioned to invert."""

    def __init__(self, condition: float, limit: float):
        self.condition = condition
        self.limit = limit
        super().__init__(f"condition number {condition:.3e} exceeds limit {limit:.1e}")


def as_square(m) -> np.ndarray:
    """Return ``m`` as a complex array whose last two axes are square."""
    a = np.asarray(m, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise DimensionError(f"expected square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m, atol: float = ATOL) -> bool:
    a = as_square(m)
    return bool(np.all(np.abs(a - dagger(a)) <= atol))


def is_unitary(m, atol: float = ATOL) -> bool:
    a = as_square(m)
    eye = np.eye(a.shape[-1])
    return bool(np.all(np.abs(dagger(a) @ a - eye) <= atol))


def is_psd(m, atol: float = ATOL) -> bool:
    """Hermitian with smallest eigenvalue no lower than ``-atol``."""
    if not is_hermitian(m, atol):
        return False
    return bool(np.all(hermitian_eigenvalues(m, atol=atol)[..., 0] >= -atol))


def check_dims(dims: Sequence[int], dim: int) -> tuple[int, ...]:
    """Validate a factorization against a matrix dimension."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"invalid subsystem dims {dims}")
    if int(np.prod(dims)) != dim:
        raise DimensionError(f"subsystem dims {dims} do not multiply to {dim}")
    return dims


def tensor_product(a, b, *more) -> np.ndarray:
    out = np.kron(as_square(a), as_square(b))
    for m in more:
        out = np.kron(out, as_square(m))
    return out


def _subsystems(which, n: int) -> list[int]:
    if isinstance(which, (int, np.integer)):
        which = [which]
    idx = sorted({int(w) for w in which})
    for w in idx:
        if not 0 <= w < n:
            raise IndexError(f"subsystem index {w} out of range for {n} subsystems")
    return idx


def partial_trace(m, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems stay in their original order.
    """
    a = as_square(m)
    dims = check_dims(dims, a.shape[-1])
    n = len(dims)
    keep = _subsystems(keep, n)
    batch = a.shape[:-2]
    nb = len(batch)
    t = a.reshape(batch + dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    bl = "".join(letters[26 + i] for i in range(nb)) if nb else ""
    rows = list(letters[:n])
    cols = [rows[i] if i not in keep else letters[n + i] for i in range(n)]
    out = bl + "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    res = np.einsum(f"{bl}{''.join(rows)}{''.join(cols)}->{out}", t)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    return res.reshape(batch + (dk, dk))


def partial_transpose(m, dims: Sequence[int], which) -> np.ndarray:
    """Transpose the row/column indices of the selected subsystems."""
    a = as_square(m)
    dims = check_dims(dims, a.shape[-1])
    n = len(dims)
    which = _subsystems(which, n)
    batch = a.shape[:-2]
    nb = len(batch)
    t = a.reshape(batch + dims + dims)
    perm = list(range(nb + 2 * n))
    for w in which:
        perm[nb + w], perm[nb + n + w] = perm[nb + n + w], perm[nb + w]
    return np.transpose(t, perm).reshape(a.shape)


def _offdiag_norm(a: np.ndarray) -> np.ndarray:
    d = a.shape[-1]
    mask = ~np.eye(d, dtype=bool)
    return np.sqrt(np.sum(np.abs(a[..., mask]) ** 2, axis=-1))


def jacobi_eigh(m, tol: float = EIG_TOL, max_sweeps: int = MAX_SWEEPS):
    """Cyclic Jacobi diagonalization of Hermitian matrices.

    Each ``(p, q)`` rotation first removes the phase of ``a[p, q]`` and then
    applies the real symmetric Jacobi rotation, vectorized over the batch.
    Sweeps stop once the off-diagonal Frobenius norm is below
    ``tol * max(1, ||a||_F)``.

    Returns
    -------
    w : ndarray
        Eigenvalues in ascending order, shape ``(..., D)``.
    v : ndarray
        Unitary matrices whose columns are the matching eigenvectors.
    """
    a = as_square(m)
    batch = a.shape[:-2]
    d = a.shape[-1]
    a = a.reshape((-1, d, d)).copy()
    a = 0.5 * (a + dagger(a))
    v = np.broadcast_to(np.eye(d, dtype=complex), a.shape).copy()
    scale = np.maximum(1.0, np.linalg.norm(a, axis=(-2, -1)))

    for _ in range(max_sweeps):
        if np.all(_offdiag_norm(a) <= tol * scale):
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[:, p, q]
                g = np.abs(apq)
                active = g > 1e-300
                if not np.any(active):
                    continue
                phase = np.where(active, apq / np.where(active, g, 1.0), 1.0)
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                gs = np.where(active, g, 1.0)
                theta = (aqq - app) / (2.0 * gs)
                t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(theta == 0.0, 1.0, t)
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # columns: G = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                ph = np.conj(phase)
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                new_p = c[:, None] * colp - (s * ph)[:, None] * colq
                new_q = s[:, None] * colp + (c * ph)[:, None] * colq
                a[:, :, p] = new_p
                a[:, :, q] = new_q
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                new_rp = c[:, None] * rowp - (s * phase)[:, None] * rowq
                new_rq = s[:, None] * rowp + (c * phase)[:, None] * rowq
                a[:, p, :] = new_rp
                a[:, q, :] = new_rq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                vp = v[:, :, p].copy()
                vq = v[:, :, q]
                new_vp = c[:, None] * vp - (s * ph)[:, None] * vq
                new_vq = s[:, None] * vp + (c * ph)[:, None] * vq
                v[:, :, p] = new_vp
                v[:, :, q] = new_vq
    else:
        if not np.all(_offdiag_norm(a) <= tol * scale):
            raise np.linalg.LinAlgError("Jacobi sweeps did not converge")

    w = np.diagonal(a, axis1=-2, axis2=-1).real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    v = np.take_along_axis(v, order[:, None, :], axis=-1)
    return w.reshape(batch + (d,)), v.reshape(batch + (d, d))


def hermitian_eigenvalues(m, atol: float = ATOL, tol: float = EIG_TOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (or stack)."""
    a = as_square(m)
    if not is_hermitian(a, atol):
        raise NotHermitianError("hermitian_eigenvalues requires a Hermitian matrix")
    return jacobi_eigh(a, tol=tol)[0]


def trace_norm(m, atol: float = ATOL) -> np.ndarray | float:
    """Sum of absolute eigenvalues of a Hermitian matrix (or stack)."""
    a = as_square(m)
    if not is_hermitian(a, atol):
        raise NotHermitianError("trace_norm is only implemented for Hermitian input")
    out = np.sum(np.abs(jacobi_eigh(a)[0]), axis=-1)
    return float(out) if out.ndim == 0 else out


def invert(m, max_condition: float = MAX_CONDITION) -> np.ndarray:
    a = as_square(m)
    if a.ndim != 2:
        raise DimensionError("invert takes a single matrix")
    cond = float(np.linalg.cond(a))
    if not np.isfinite(cond) or cond > max_condition:
        raise SingularMatrixError(cond, max_condition)
    return np.linalg.inv(a)
