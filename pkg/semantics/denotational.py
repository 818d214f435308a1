"""
Denotational semantics.

``denote`` builds the Kraus map of a program compositionally; ``evaluate`` pushes a
state through the program directly, or through ``denote`` in exact-kraus mode.
Measurement branches are never renormalized: probability lives in the trace.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from lang import ast
from lang.ast import VarContext, infer_dialect
from lang.tables import Tables
from lang.typing import typecheck
from linalg import kernel
from linalg.exceptions import DimensionMismatch
from linalg.kernel import CMatrix
from linalg.operators import DensityMatrix, KrausMap, apply_kraus

from .exceptions import TruncationNotConverged, ZeroTraceState
from .options import EvalOptions, Mode, resolve
from .primitives import BRANCHING, branch_operators, branches, primitive_ops

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Evaluation:
    state: DensityMatrix
    ctx: VarContext
    truncation_error: float = 0.0


@dataclass(frozen=True)
class TerminationEstimate:
    probability: float
    truncation_error: float = 0.0
    evaluation: Evaluation | None = field(default=None, compare=False, repr=False)


def agreed(outs: list[VarContext]) -> VarContext:
    """The common output context of all branches of a command."""
    for other in outs[1:]:
        if other != outs[0]:
            raise DimensionMismatch(f"branches end in different contexts: {outs[0].names} and {other.names}")
    return outs[0]


class Denoter:
    def __init__(self, opts: EvalOptions, tables: Tables):
        self.opts = opts
        self.tables = tables

    def single(self, op: CMatrix) -> KrausMap:
        return KrausMap((op,), self.opts.tol)

    def denote(self, command: ast.Command, ctx: VarContext) -> tuple[KrausMap, VarContext]:
        match command:
            case ast.Skip():
                return KrausMap.identity(ctx.total_dim, self.opts.tol), ctx
            case ast.Seq(first=first, second=second):
                head, middle = self.denote(first, ctx)
                tail, out = self.denote(second, middle)
                return head.then(tail), out
            case ast.While():
                return self.loop(command, ctx), ctx
            case _ if isinstance(command, BRANCHING):
                total, outs = None, []
                for op, arm in zip(branch_operators(command, ctx, self.tables), branches(command), strict=True):
                    inner, out = self.denote(arm, ctx)
                    outs.append(out)
                    part = self.single(op).then(inner)
                    total = part if total is None else total.plus(part)
                return total, agreed(outs)
        ops, out = primitive_ops(command, ctx, self.tables)
        return KrausMap.build(ops, self.opts.tol), out

    def loop(self, command: ast.While, ctx: VarContext) -> KrausMap:
        """``sum_n exit . (body . stay)^n``, cut once the in-loop mass of the maximally mixed state vanishes."""
        exit_op, stay_op = branch_operators(command, ctx, self.tables)
        body, body_ctx = self.denote(command.body, ctx)
        agreed([ctx, body_ctx])
        dim = ctx.total_dim
        leave = self.single(exit_op)
        again = self.single(stay_op).then(body)
        mixed = DensityMatrix.maximally_mixed(dim).mat
        inside = KrausMap.identity(dim, self.opts.tol)
        total = None
        for iteration in range(1, self.opts.loop_max_iters + 1):
            part = inside.then(leave)
            total = part if total is None else total.plus(part)
            inside = inside.then(again)
            current = inside.apply(mixed)
            mass = float(np.trace(current).real)
            if mass < self.opts.loop_mass_eps:
                return total
        residual = dim * mass
        if self.opts.mode is Mode.EXACT_KRAUS:
            raise TruncationNotConverged(residual, self.opts.loop_max_iters)
        logger.warning("loop truncated after %d iterations, residual mass %.3e", self.opts.loop_max_iters, residual)
        return total.with_truncation(total.truncation_error + residual)


class Evaluator:
    """State-level evaluation; accumulates the mass left behind by truncated loops."""

    def __init__(self, opts: EvalOptions, tables: Tables):
        self.opts = opts
        self.tables = tables
        self.truncation_error = 0.0

    def run(self, command: ast.Command, ctx: VarContext, rho: CMatrix) -> tuple[CMatrix, VarContext]:
        match command:
            case ast.Skip():
                return rho, ctx
            case ast.Seq(first=first, second=second):
                middle, mid_ctx = self.run(first, ctx, rho)
                return self.run(second, mid_ctx, middle)
            case ast.While():
                return self.loop(command, ctx, rho), ctx
            case _ if isinstance(command, BRANCHING):
                total, outs = None, []
                for op, arm in zip(branch_operators(command, ctx, self.tables), branches(command), strict=True):
                    part, out = self.run(arm, ctx, op @ rho @ kernel.dagger(op))
                    outs.append(out)
                    total = part if total is None else total + part
                return total, agreed(outs)
        ops, out = primitive_ops(command, ctx, self.tables)
        return sum(op @ rho @ kernel.dagger(op) for op in ops), out

    def loop(self, command: ast.While, ctx: VarContext, rho: CMatrix) -> CMatrix:
        exit_op, stay_op = branch_operators(command, ctx, self.tables)
        result = np.zeros_like(rho)
        inside = rho
        for iteration in range(1, self.opts.loop_max_iters + 1):
            result = result + exit_op @ inside @ kernel.dagger(exit_op)
            entered = stay_op @ inside @ kernel.dagger(stay_op)
            following, body_ctx = self.run(command.body, ctx, entered)
            agreed([ctx, body_ctx])
            mass = float(np.trace(following).real)
            if mass < self.opts.loop_mass_eps:
                return result
            inside = following
        logger.warning("loop truncated after %d iterations, residual mass %.3e", self.opts.loop_max_iters, mass)
        self.truncation_error += mass
        return result


def checked_tables(ctx: VarContext, command: ast.Command, tables: Tables | None) -> Tables:
    tables = tables or Tables.builtins()
    typecheck(ctx, command, infer_dialect(ctx, command), tables)
    return tables


def denote(ctx: VarContext, command: ast.Command, opts: EvalOptions | None = None,
           tables: Tables | None = None) -> KrausMap:
    """Kraus map of ``command`` from the space of ``ctx`` to the space of its output context."""
    tables = checked_tables(ctx, command, tables)
    return Denoter(resolve(opts), tables).denote(command, ctx)[0]


def evaluate(ctx: VarContext, command: ast.Command, rho: DensityMatrix, opts: EvalOptions | None = None,
             tables: Tables | None = None) -> Evaluation:
    opts = resolve(opts)
    tables = checked_tables(ctx, command, tables)
    if rho.dim != ctx.total_dim:
        raise DimensionMismatch(f"state has dimension {rho.dim}, the program expects {ctx.total_dim}")
    if opts.mode is Mode.EXACT_KRAUS:
        denoter = Denoter(opts, tables)
        kraus, out = denoter.denote(command, ctx)
        return Evaluation(apply_kraus(kraus, rho), out, kraus.truncation_error)
    evaluator = Evaluator(opts, tables)
    final, out = evaluator.run(command, ctx, rho.mat)
    return Evaluation(DensityMatrix(kernel.hermitian_part(final), rho.tol), out, evaluator.truncation_error)


def termination_probability(ctx: VarContext, command: ast.Command, rho: DensityMatrix,
                            opts: EvalOptions | None = None, tables: Tables | None = None) -> TerminationEstimate:
    """``tr(eval(c, rho)) / tr(rho)`` with the truncation bound scaled the same way."""
    if rho.trace <= kernel.NEGLIGIBLE:
        raise ZeroTraceState("termination probability needs a state with positive trace")
    result = evaluate(ctx, command, rho, opts, tables)
    probability = min(1.0, max(0.0, result.state.trace / rho.trace))
    return TerminationEstimate(probability, result.truncation_error / rho.trace, result)
