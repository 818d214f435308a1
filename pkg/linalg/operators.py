"""States, predicates and Kraus maps: validated, immutable wrappers around ``CMatrix``."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from django.conf import settings

from . import kernel
from .exceptions import DimensionMismatch, InvalidKrausMap, InvalidPredicate, InvalidState
from .kernel import CMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Partial density operator: Hermitian, PSD, trace in [0, 1]."""
    mat: CMatrix
    tol: float = field(default_factory=lambda: settings.QHL_TOL)

    def __post_init__(self):
        mat = kernel.frozen(self.mat)
        object.__setattr__(self, "mat", mat)
        if mat.shape[0] != mat.shape[1]:
            raise InvalidState(f"state must be square, got {mat.shape[0]}x{mat.shape[1]}")
        if not kernel.is_hermitian(mat, self.tol):
            raise InvalidState("state is not Hermitian")
        low = kernel.eig_hermitian(mat, self.tol)[0]
        if low < kernel.psd_threshold(mat, self.tol):
            raise InvalidState(f"state is not positive semidefinite (eigenvalue {low:.3e})")
        trace = self.trace
        if not -self.tol <= trace <= 1 + self.tol:
            raise InvalidState(f"state trace {trace:.6g} outside [0, 1]")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    @classmethod
    def pure(cls, vector, tol: float | None = None) -> DensityMatrix:
        v = kernel.as_cmatrix(vector)
        return cls(v @ kernel.dagger(v), kernel.default_tol(tol))

    @classmethod
    def basis(cls, index: int, dim: int, tol: float | None = None) -> DensityMatrix:
        return cls.pure(kernel.ket(index, dim), tol)

    @classmethod
    def maximally_mixed(cls, dim: int, tol: float | None = None) -> DensityMatrix:
        return cls(kernel.identity(dim) / dim, kernel.default_tol(tol))

    def scaled(self, factor: float) -> DensityMatrix:
        return DensityMatrix(self.mat * factor, self.tol)

    def __add__(self, other: DensityMatrix) -> DensityMatrix:
        return DensityMatrix(self.mat + other.mat, max(self.tol, other.tol))


@dataclass(frozen=True, eq=False)
class QuantumPredicate:
    """Hermitian ``P`` with ``0 ⊑ P ⊑ I``."""
    mat: CMatrix
    tol: float = field(default_factory=lambda: settings.QHL_TOL)

    def __post_init__(self):
        mat = kernel.frozen(self.mat)
        object.__setattr__(self, "mat", mat)
        if mat.shape[0] != mat.shape[1]:
            raise InvalidPredicate(f"predicate must be square, got {mat.shape[0]}x{mat.shape[1]}")
        if not kernel.is_hermitian(mat, self.tol):
            raise InvalidPredicate("predicate is not Hermitian")
        values = kernel.eig_hermitian(mat, self.tol)
        slack = self.tol * max(1.0, kernel.max_norm(mat))
        if values[0] < -slack or values[-1] > 1 + slack:
            raise InvalidPredicate(
                f"predicate eigenvalues [{values[0]:.6g}, {values[-1]:.6g}] leave [0, 1]")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, dim: int, tol: float | None = None) -> QuantumPredicate:
        return cls(kernel.identity(dim), kernel.default_tol(tol))

    @classmethod
    def zero(cls, dim: int, tol: float | None = None) -> QuantumPredicate:
        return cls(np.zeros((dim, dim), dtype=np.complex128), kernel.default_tol(tol))

    @classmethod
    def projector(cls, vector, tol: float | None = None) -> QuantumPredicate:
        v = kernel.as_cmatrix(vector)
        v = v / np.linalg.norm(v)
        return cls(v @ kernel.dagger(v), kernel.default_tol(tol))

    @classmethod
    def clamped(cls, mat, tol: float | None = None) -> tuple[QuantumPredicate, float]:
        """
        Symmetrize and clip eigenvalues into [0, 1].

        Returns the predicate and the largest eigenvalue correction applied.
        """
        herm = kernel.hermitian_part(mat)
        values, vectors = np.linalg.eigh(herm)
        clipped = np.clip(values, 0.0, 1.0)
        clamp = float(np.max(np.abs(values - clipped))) if values.size else 0.0
        rebuilt = (vectors * clipped) @ kernel.dagger(vectors) if clamp > 0 else herm
        if clamp > kernel.default_tol(tol):
            logger.info("predicate clamped into [0, I] by %.3e", clamp)
        return cls(rebuilt, kernel.default_tol(tol)), clamp

    def expectation(self, rho: DensityMatrix) -> float:
        return kernel.expectation(self.mat, rho.mat)

    def leq(self, other: QuantumPredicate, tol: float | None = None) -> bool:
        return kernel.loewner_leq(self.mat, other.mat, kernel.default_tol(tol))


@dataclass(frozen=True, eq=False)
class KrausMap:
    """
    Completely positive trace-non-increasing map ``rho -> sum E rho E^dagger``.

    Operators share one shape ``(rows, cols)``; rows may differ from cols when the map
    allocates or discards variables. ``truncation_error`` bounds the trace mass a loop
    truncation left out of the map.
    """
    ops: tuple[CMatrix, ...]
    tol: float = field(default_factory=lambda: settings.QHL_TOL)
    truncation_error: float = 0.0

    def __post_init__(self):
        ops = tuple(kernel.frozen(op) for op in self.ops)
        if not ops:
            raise InvalidKrausMap("a Kraus map needs at least one operator")
        shape = ops[0].shape
        for op in ops:
            if op.shape != shape:
                raise InvalidKrausMap(f"operator shapes differ: {shape} and {op.shape}")
        object.__setattr__(self, "ops", ops)
        excess = kernel.identity(shape[1]) - self.completeness()
        if not kernel.is_psd(excess, self.tol):
            raise InvalidKrausMap("sum of E^dagger E exceeds the identity")

    @classmethod
    def build(cls, ops: Iterable, tol: float | None = None, truncation_error: float = 0.0,
              limit: int | None = None) -> KrausMap:
        """Prune negligible operators and compress long lists before validating."""
        ops = [kernel.as_cmatrix(op) for op in ops]
        if not ops:
            raise InvalidKrausMap("a Kraus map needs at least one operator")
        shape = ops[0].shape
        kept = [op for op in ops if kernel.max_norm(op) >= kernel.NEGLIGIBLE]
        if not kept:
            kept = [np.zeros(shape, dtype=np.complex128)]
        limit = settings.QHL_KRAUS_LIMIT if limit is None else limit
        if len(kept) > min(limit, shape[0] * shape[1]):
            kept = compress(kept)
        return cls(tuple(kept), kernel.default_tol(tol), truncation_error)

    @classmethod
    def identity(cls, dim: int, tol: float | None = None) -> KrausMap:
        return cls((kernel.identity(dim),), kernel.default_tol(tol))

    @property
    def rows(self) -> int:
        return self.ops[0].shape[0]

    @property
    def cols(self) -> int:
        return self.ops[0].shape[1]

    def __len__(self):
        return len(self.ops)

    def stacked(self) -> np.ndarray:
        return np.stack(self.ops)

    def completeness(self) -> CMatrix:
        e = self.stacked()
        return np.einsum("kji,kjl->il", e.conj(), e)

    def is_admissible(self, tol: float | None = None) -> bool:
        return kernel.max_norm(self.completeness() - kernel.identity(self.cols)) <= kernel.default_tol(
            tol if tol is not None else self.tol)

    def apply(self, rho) -> CMatrix:
        rho = kernel.as_cmatrix(rho)
        if rho.shape != (self.cols, self.cols):
            raise DimensionMismatch(f"map expects a {self.cols}-dim state, got {rho.shape[0]}")
        e = self.stacked()
        return np.einsum("kij,jl,kml->im", e, rho, e.conj())

    def adjoint_apply(self, q) -> CMatrix:
        """Heisenberg picture: ``sum E^dagger Q E``."""
        q = kernel.as_cmatrix(q)
        if q.shape != (self.rows, self.rows):
            raise DimensionMismatch(f"map produces a {self.rows}-dim space, got a {q.shape[0]}-dim operator")
        e = self.stacked()
        return np.einsum("kji,jl,klm->im", e.conj(), q, e)

    def then(self, other: KrausMap) -> KrausMap:
        """Sequential composition: ``self`` first, ``other`` second."""
        if other.cols != self.rows:
            raise DimensionMismatch(f"cannot feed a {self.rows}-dim output into a {other.cols}-dim input")
        products = np.einsum("aij,bjk->abik", other.stacked(), self.stacked())
        return KrausMap.build(products.reshape(-1, other.rows, self.cols), max(self.tol, other.tol),
                              self.truncation_error + other.truncation_error)

    def plus(self, other: KrausMap) -> KrausMap:
        """Sum of two maps on disjoint branches."""
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("summed maps must share their shape")
        return KrausMap.build(self.ops + other.ops, max(self.tol, other.tol),
                              self.truncation_error + other.truncation_error)

    def with_truncation(self, error: float) -> KrausMap:
        return KrausMap(self.ops, self.tol, error)


def compress(ops: Sequence[CMatrix]) -> list[CMatrix]:
    """Minimal Kraus form from the eigen-decomposition of the Choi matrix."""
    rows, cols = ops[0].shape
    vecs = np.stack([op.reshape(-1) for op in ops], axis=1)
    choi = vecs @ vecs.conj().T
    values, vectors = np.linalg.eigh(kernel.hermitian_part(choi))
    cutoff = kernel.NEGLIGIBLE * max(1.0, float(values[-1]))
    kept = [np.sqrt(w) * vectors[:, i].reshape(rows, cols) for i, w in enumerate(values) if w > cutoff]
    logger.debug("compressed %d Kraus operators to %d", len(ops), len(kept))
    return kept or [np.zeros((rows, cols), dtype=np.complex128)]


def apply_kraus(k: KrausMap, rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(k.apply(rho.mat), rho.tol)


def random_density(dim: int, seed) -> DensityMatrix:
    return DensityMatrix(kernel.random_density_matrix(dim, seed))


def random_unitary(dim: int, seed) -> CMatrix:
    return kernel.random_unitary_matrix(dim, seed)


def random_predicate(dim: int, seed) -> QuantumPredicate:
    """``U diag(λ) U^dagger`` with eigenvalues drawn uniformly from [0, 1]."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    u = kernel.random_unitary_matrix(dim, rng)
    values = rng.uniform(0.0, 1.0, size=dim)
    return QuantumPredicate(kernel.hermitian_part((u * values) @ kernel.dagger(u)))
