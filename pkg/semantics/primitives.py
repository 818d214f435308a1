"""Kraus operators of the primitive commands and the projections that drive branching."""
from __future__ import annotations

import math

from lang import ast
from lang.ast import Kind, Var, VarContext
from lang.tables import Tables
from linalg import kernel
from linalg.kernel import CMatrix


def primitive_ops(command: ast.Command, ctx: VarContext, tables: Tables) -> tuple[list[CMatrix], VarContext]:
    """Kraus operators of a non-branching command and the context it leaves behind."""
    match command:
        case ast.InitZero(var=name):
            return _reset(ctx, name, 0), ctx
        case ast.AssignBit(var=name, value=value):
            return _reset(ctx, name, value), ctx
        case ast.ApplyU(vars=names, gate=gate):
            targets = [ctx.require(n).dim for n in names]
            matrix = tables.gates.resolve(gate, math.prod(targets))
            return [kernel.embed_at(matrix, ctx.positions(names), ctx)], ctx
        case ast.NewBit(var=name) | ast.NewQbit(var=name):
            kind = Kind.BIT if isinstance(command, ast.NewBit) else Kind.QBIT
            allocate = kernel.kron(kernel.ket(0, 2), kernel.identity(ctx.total_dim))
            return [allocate], ctx.prepend(Var(name, kind))
        case ast.Discard(var=name):
            position, dim = ctx.index(name), ctx.require(name).dim
            ops = [kernel.embed_factor(kernel.dagger(kernel.ket(k, dim)), position, ctx) for k in range(dim)]
            return ops, ctx.remove(name)
    raise TypeError(f"{type(command).__name__} is not a primitive command")


def _reset(ctx: VarContext, name: str, value: int) -> list[CMatrix]:
    """``{|value><n| : n < d}`` on the variable ``name``."""
    position, dim = ctx.index(name), ctx.require(name).dim
    return [kernel.embed_factor(kernel.outer(value, n, dim), position, ctx) for n in range(dim)]


def branch_operators(command: ast.Command, ctx: VarContext, tables: Tables) -> list[CMatrix]:
    """
    Embedded measurement operators of a branching command, in branch order.

    For loops the first operator exits and the second re-enters the body; for
    ``if`` and ``measure ... then`` the first selects ``then`` (outcome 0).
    """
    match command:
        case ast.MeasureCase(meas=meas, vars=names) | ast.While(meas=meas, vars=names):
            positions = ctx.positions(names)
            ops = tables.measurements.resolve(meas, math.prod(ctx.require(n).dim for n in names))
            return [kernel.embed_at(op, positions, ctx) for op in ops]
        case ast.IfBit(var=name) | ast.MeasureIf(var=name):
            position = ctx.index(name)
            return [kernel.embed_factor(kernel.outer(m, m, 2), position, ctx) for m in (0, 1)]
    raise TypeError(f"{type(command).__name__} does not branch")


def branches(command: ast.Command) -> tuple[ast.Command, ...]:
    match command:
        case ast.MeasureCase(branches=arms):
            return arms
        case ast.IfBit(then=then, orelse=orelse) | ast.MeasureIf(then=then, orelse=orelse):
            return then, orelse
    raise TypeError(f"{type(command).__name__} has no branches")


BRANCHING = (ast.MeasureCase, ast.IfBit, ast.MeasureIf)
