"""Semantic validity of Hoare triples, decided by one Löwner comparison."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from lang import ast
from lang.ast import VarContext
from lang.tables import Tables
from linalg import kernel
from linalg.exceptions import DimensionMismatch
from linalg.operators import DensityMatrix, QuantumPredicate
from semantics.options import EvalOptions, resolve

from .exceptions import FixpointNotConverged
from .transformers import weakest


class Correctness(str, Enum):
    TOTAL = 'total'
    PARTIAL = 'partial'

    @classmethod
    def parse(cls, value) -> Correctness:
        aliases = {'tot': cls.TOTAL, 'par': cls.PARTIAL}
        if isinstance(value, str) and value in aliases:
            return aliases[value]
        return cls(value)


class Outcome(str, Enum):
    VALID = 'valid'
    INVALID = 'invalid'
    INCONCLUSIVE = 'inconclusive'


@dataclass(frozen=True)
class HoareTriple:
    ctx: VarContext
    command: ast.Command
    pre: QuantumPredicate
    post: QuantumPredicate
    mode: Correctness = Correctness.TOTAL
    tables: Tables = field(default_factory=Tables.builtins)

    def __post_init__(self):
        object.__setattr__(self, 'mode', Correctness.parse(self.mode))
        if self.pre.dim != self.ctx.total_dim:
            raise DimensionMismatch(
                f"precondition has dimension {self.pre.dim}, the program starts in {self.ctx.total_dim}")


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    mode: Correctness
    residual: float = 0.0
    min_eigenvalue: float | None = None
    clamp: float = 0.0
    witness: DensityMatrix | None = None
    transformed: QuantumPredicate | None = None

    @property
    def valid(self) -> bool:
        return self.outcome is Outcome.VALID


def check_triple(triple: HoareTriple, opts: EvalOptions | None = None) -> Verdict:
    """
    ``pre ⊑ wp(c, post)`` (total) or ``pre ⊑ wlp(c, post)`` (partial).

    An invalid triple carries a witness state ``v v^dagger`` built from the eigenvector of
    the most negative eigenvalue of ``transformer - pre``; on it ``tr(pre rho)`` exceeds
    what the program guarantees.
    """
    opts = resolve(opts)
    try:
        result = weakest(triple.ctx, triple.command, triple.post, opts, triple.tables,
                         liberal=triple.mode is Correctness.PARTIAL)
    except FixpointNotConverged as exc:
        return Verdict(Outcome.INCONCLUSIVE, triple.mode, residual=exc.residual)
    gap = result.predicate.mat - triple.pre.mat
    lowest, vector = kernel.min_eigenpair(gap, opts.tol)
    if kernel.loewner_leq(triple.pre.mat, result.predicate.mat, opts.tol):
        return Verdict(Outcome.VALID, triple.mode, 0.0, lowest, result.clamp, None, result.predicate)
    witness = DensityMatrix.pure(vector, opts.tol)
    return Verdict(Outcome.INVALID, triple.mode, -lowest, lowest, result.clamp, witness, result.predicate)
