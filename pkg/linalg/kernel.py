"""
Dense complex matrix kernel.

Matrices are plain ``numpy`` arrays of ``complex128``; the first variable of a
context is the leftmost (most significant) tensor factor.
"""
from __future__ import annotations

import math
from functools import reduce
from typing import Iterable, Protocol, Sequence

import numpy as np
import numpy.typing as npt
from django.conf import settings

from .exceptions import DimensionMismatch, NotHermitian, NotSquare

CMatrix = npt.NDArray[np.complex128]

# Kraus operators below this max-norm are dropped.
NEGLIGIBLE = 1e-14


class HasDims(Protocol):
    @property
    def dims(self) -> tuple[int, ...]: ...


def default_tol(tol: float | None = None) -> float:
    if tol is not None:
        return tol
    return settings.QHL_TOL


def as_cmatrix(a) -> CMatrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise DimensionMismatch(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise DimensionMismatch("matrix entries must be finite")
    return m


def frozen(a) -> CMatrix:
    m = np.array(as_cmatrix(a), copy=True)
    m.setflags(write=False)
    return m


def max_norm(a) -> float:
    return float(np.max(np.abs(a))) if np.size(a) else 0.0


def identity(dim: int) -> CMatrix:
    return np.eye(dim, dtype=np.complex128)


def ket(index: int, dim: int = 2) -> CMatrix:
    if not 0 <= index < dim:
        raise DimensionMismatch(f"basis index {index} outside dimension {dim}")
    v = np.zeros((dim, 1), dtype=np.complex128)
    v[index, 0] = 1.0
    return v


def outer(i: int, j: int, dim: int = 2) -> CMatrix:
    """|i><j| on a ``dim``-dimensional space."""
    return ket(i, dim) @ dagger(ket(j, dim))


def kron(a, b) -> CMatrix:
    return np.kron(as_cmatrix(a), as_cmatrix(b))


def kron_all(factors: Iterable) -> CMatrix:
    factors = list(factors)
    if not factors:
        return identity(1)
    return reduce(kron, factors)


def dagger(a) -> CMatrix:
    return as_cmatrix(a).conj().T


def require_square(a, name: str = "matrix") -> CMatrix:
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"{name} must be square, got {m.shape[0]}x{m.shape[1]}")
    return m


def is_hermitian(a, tol: float | None = None) -> bool:
    m = as_cmatrix(a)
    if m.shape[0] != m.shape[1]:
        return False
    return max_norm(m - m.conj().T) <= default_tol(tol) * max(1.0, max_norm(m))


def require_hermitian(a, tol: float | None = None, name: str = "matrix") -> CMatrix:
    m = require_square(a, name)
    if not is_hermitian(m, tol):
        raise NotHermitian(f"{name} is not Hermitian (deviation {max_norm(m - m.conj().T):.3e})")
    return m


def hermitian_part(a) -> CMatrix:
    m = as_cmatrix(a)
    return (m + m.conj().T) / 2


def eig_hermitian(a, tol: float | None = None) -> list[float]:
    """Eigenvalues of a Hermitian matrix, ascending."""
    m = require_hermitian(a, tol)
    return [float(x) for x in np.linalg.eigvalsh(hermitian_part(m))]


def min_eigenpair(a, tol: float | None = None) -> tuple[float, CMatrix]:
    m = require_hermitian(a, tol)
    values, vectors = np.linalg.eigh(hermitian_part(m))
    return float(values[0]), vectors[:, [0]]


def psd_threshold(a, tol: float | None = None) -> float:
    return -default_tol(tol) * max(1.0, max_norm(a))


def is_psd(a, tol: float | None = None) -> bool:
    m = require_hermitian(a, tol)
    return eig_hermitian(m, tol)[0] >= psd_threshold(m, tol)


def loewner_leq(p, q, tol: float | None = None) -> bool:
    """``p ⊑ q`` in the Löwner order: ``q - p`` is positive semidefinite within ``tol``."""
    p = require_hermitian(p, tol, "left operand")
    q = require_hermitian(q, tol, "right operand")
    if p.shape != q.shape:
        raise DimensionMismatch(f"cannot compare {p.shape[0]}-dim and {q.shape[0]}-dim operators")
    return is_psd(q - p, tol)


def is_unitary(u, tol: float | None = None) -> bool:
    u = require_square(u, "gate")
    return max_norm(dagger(u) @ u - identity(u.shape[0])) <= default_tol(tol)


def expectation(p, rho) -> float:
    """Degree of truth ``Re tr(p rho)``."""
    p, rho = as_cmatrix(p), as_cmatrix(rho)
    if p.shape[1] != rho.shape[0] or p.shape[0] != rho.shape[1]:
        raise DimensionMismatch(f"cannot pair {p.shape} with {rho.shape}")
    return float(np.real(np.trace(p @ rho)))


def context_dims(ctx: Sequence[int] | HasDims) -> tuple[int, ...]:
    dims = ctx.dims if hasattr(ctx, "dims") else ctx
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise DimensionMismatch(f"context dimensions must be positive, got {dims}")
    return dims


def embed_at(op, positions: Sequence[int], ctx: Sequence[int] | HasDims) -> CMatrix:
    """
    Lift ``op`` acting on the variables at ``positions`` (in that order) to the whole context.

    Equivalent to ``P (op ⊗ I) P^T`` where ``P`` moves the selected variables to the
    leading tensor factors.
    """
    dims = context_dims(ctx)
    op = require_square(op, "operator")
    positions = list(positions)
    if len(set(positions)) != len(positions):
        raise DimensionMismatch(f"duplicate positions {positions}")
    for p in positions:
        if not 0 <= p < len(dims):
            raise DimensionMismatch(f"position {p} outside a context of {len(dims)} variables")
    selected = math.prod(dims[p] for p in positions)
    if op.shape[0] != selected:
        raise DimensionMismatch(
            f"operator of dimension {op.shape[0]} does not fit variables of total dimension {selected}")

    rest = [a for a in range(len(dims)) if a not in positions]
    order = positions + rest
    full = kron(op, identity(math.prod(dims[a] for a in rest)))
    n = len(dims)
    if order == list(range(n)):
        return full
    shape = [dims[a] for a in order]
    axes = [order.index(a) for a in range(n)]
    total = math.prod(dims)
    return full.reshape(shape + shape).transpose(axes + [n + a for a in axes]).reshape(total, total)


def embed_factor(op, position: int, ctx: Sequence[int] | HasDims) -> CMatrix:
    """``I ⊗ op ⊗ I`` with ``op`` on one factor; ``op`` may be rectangular."""
    dims = context_dims(ctx)
    if not 0 <= position < len(dims):
        raise DimensionMismatch(f"position {position} outside a context of {len(dims)} variables")
    op = as_cmatrix(op)
    if op.shape[1] != dims[position]:
        raise DimensionMismatch(f"operator input {op.shape[1]} does not match dimension {dims[position]}")
    before = identity(math.prod(dims[:position]))
    after = identity(math.prod(dims[position + 1:]))
    return kron_all([before, op, after])


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(dim: int, seed) -> CMatrix:
    if dim < 1:
        raise DimensionMismatch("dimension must be at least 1")
    rng = _rng(seed)
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)


def random_unitary_matrix(dim: int, seed) -> CMatrix:
    q, r = np.linalg.qr(ginibre(dim, seed))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density_matrix(dim: int, seed) -> CMatrix:
    g = ginibre(dim, seed)
    rho = g @ dagger(g)
    return hermitian_part(rho / np.trace(rho).real)
