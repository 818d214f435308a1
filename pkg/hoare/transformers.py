"""
Weakest (liberal) precondition transformers.

Primitive commands transform through the adjoint of their Kraus maps; sequences,
branches and loops are handled structurally. Loop predicates are Kleene iterates:
the least fixpoint from 0 for ``wp`` and the greatest fixpoint from I for ``wlp``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from lang import ast
from lang.ast import VarContext, output_context
from lang.tables import Tables
from linalg import kernel
from linalg.exceptions import DimensionMismatch
from linalg.kernel import CMatrix
from linalg.operators import QuantumPredicate
from semantics.denotational import checked_tables
from semantics.options import EvalOptions, resolve
from semantics.primitives import BRANCHING, branch_operators, branches, primitive_ops

from .exceptions import FixpointNotConverged

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Transformed:
    """A computed precondition and the eigenvalue correction clamping applied to it."""
    predicate: QuantumPredicate
    clamp: float = 0.0
    iterations: int = 0


def _adjoint(ops, post: CMatrix) -> CMatrix:
    return sum(kernel.dagger(op) @ post @ op for op in ops)


class Transformer:
    def __init__(self, opts: EvalOptions, tables: Tables, liberal: bool):
        self.opts = opts
        self.tables = tables
        self.liberal = liberal
        self.iterations = 0

    def transform(self, command: ast.Command, ctx: VarContext, post: CMatrix) -> CMatrix:
        match command:
            case ast.Skip():
                return post
            case ast.Seq(first=first, second=second):
                middle = self.transform(second, output_context(first, ctx), post)
                return self.transform(first, ctx, middle)
            case ast.While():
                return self.loop(command, ctx, post)
            case _ if isinstance(command, BRANCHING):
                ops = branch_operators(command, ctx, self.tables)
                return sum(kernel.dagger(op) @ self.transform(arm, ctx, post) @ op
                           for op, arm in zip(ops, branches(command), strict=True))
        ops, _ = primitive_ops(command, ctx, self.tables)
        return _adjoint(ops, post)

    def loop(self, command: ast.While, ctx: VarContext, post: CMatrix) -> CMatrix:
        exit_op, stay_op = branch_operators(command, ctx, self.tables)
        leave = kernel.dagger(exit_op) @ post @ exit_op
        dim = ctx.total_dim
        current = kernel.identity(dim) if self.liberal else np.zeros((dim, dim), dtype=np.complex128)
        residual = float('inf')
        for iteration in range(1, self.opts.fix_max_iters + 1):
            following = leave + kernel.dagger(stay_op) @ self.transform(command.body, ctx, current) @ stay_op
            residual = kernel.max_norm(following - current)
            current = following
            if residual < self.opts.fix_eps:
                self.iterations += iteration
                return kernel.hermitian_part(current)
        logger.warning("fixpoint iteration stopped after %d steps, residual %.3e", self.opts.fix_max_iters, residual)
        raise FixpointNotConverged(residual, self.opts.fix_max_iters)


def weakest(ctx: VarContext, command: ast.Command, post: QuantumPredicate, opts: EvalOptions | None = None,
            tables: Tables | None = None, liberal: bool = False) -> Transformed:
    """Precondition with its clamp magnitude; ``liberal`` selects partial correctness."""
    opts = resolve(opts)
    tables = checked_tables(ctx, command, tables)
    out = output_context(command, ctx)
    if post.dim != out.total_dim:
        raise DimensionMismatch(f"postcondition has dimension {post.dim}, the program ends in {out.total_dim}")
    transformer = Transformer(opts, tables, liberal)
    matrix = transformer.transform(command, ctx, post.mat)
    predicate, clamp = QuantumPredicate.clamped(matrix, opts.tol)
    return Transformed(predicate, clamp, transformer.iterations)


def wp(ctx: VarContext, command: ast.Command, post: QuantumPredicate, opts: EvalOptions | None = None,
       tables: Tables | None = None) -> QuantumPredicate:
    return weakest(ctx, command, post, opts, tables).predicate


def wlp(ctx: VarContext, command: ast.Command, post: QuantumPredicate, opts: EvalOptions | None = None,
        tables: Tables | None = None) -> QuantumPredicate:
    return weakest(ctx, command, post, opts, tables, liberal=True).predicate
