"""
Static checking of variable discipline for both dialects.

The checker threads the typing context through the program: ``new`` prepends, ``discard``
removes, and every branching construct must leave the same context on all branches.
Issues are collected rather than raised one at a time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import ast
from .ast import Dialect, Kind, Var, VarContext
from .exceptions import TypeCheckError, TypeIssue, UnknownGate, UnknownMeasurement
from .tables import Tables


@dataclass(frozen=True)
class TypedProgram:
    ctx: VarContext
    out_ctx: VarContext
    command: ast.Command
    dialect: Dialect


class Checker:
    def __init__(self, dialect: Dialect, tables: Tables):
        self.dialect = dialect
        self.tables = tables
        self.issues: list[TypeIssue] = []
        self.discarded: set[str] = set()

    def report(self, kind: str, message: str, command: ast.Command):
        line, column = command.pos if command.pos else (None, None)
        self.issues.append(TypeIssue(kind, message, line, column))

    def lookup(self, name: str, ctx: VarContext, command: ast.Command) -> Var | None:
        var = ctx.get(name)
        if var is None:
            if name in self.discarded:
                self.report('use-after-discard', f"'{name}' is used after it was discarded", command)
            else:
                self.report('unknown-variable', f"'{name}' is not in scope", command)
        return var

    def lookup_all(self, names, ctx, command) -> list[Var] | None:
        if len(set(names)) != len(names):
            self.report('arity-mismatch', f"variables {', '.join(names)} are not distinct", command)
            return None
        found = [self.lookup(name, ctx, command) for name in names]
        return None if None in found else found

    def agree(self, outs: list[VarContext], command: ast.Command) -> VarContext:
        for other in outs[1:]:
            if other != outs[0]:
                self.report('context-mismatch',
                            f"branches end in different contexts: [{_show(outs[0])}] and [{_show(other)}]",
                            command)
                break
        return outs[0]

    def check(self, command: ast.Command, ctx: VarContext) -> VarContext:
        if self.dialect is Dialect.YING and isinstance(command, ast.QPL_ONLY):
            self.report('dialect', f"{type(command).__name__} is not part of the ying-core language", command)
        match command:
            case ast.Skip():
                return ctx
            case ast.Seq(first=first, second=second):
                return self.check(second, self.check(first, ctx))
            case ast.InitZero(var=name):
                self.lookup(name, ctx, command)
                return ctx
            case ast.ApplyU(vars=names, gate=gate):
                targets = self.lookup_all(names, ctx, command)
                if targets is None:
                    return ctx
                bits = [v.name for v in targets if not v.kind.is_quantum]
                if bits:
                    self.report('kind-mismatch', f"gate targets must be quantum, {', '.join(bits)} is a bit", command)
                    return ctx
                dim = math.prod(v.dim for v in targets)
                try:
                    matrix = self.tables.gates.resolve(gate, dim)
                except UnknownGate as exc:
                    self.report('unknown-gate', exc.message, command)
                    return ctx
                if matrix.shape[0] != dim:
                    self.report('arity-mismatch',
                                f"gate '{gate}' acts on dimension {matrix.shape[0]}, targets have {dim}", command)
                return ctx
            case ast.MeasureCase(meas=meas, vars=names, branches=branches):
                outcomes = self.outcomes(meas, names, ctx, command)
                if outcomes is not None and outcomes != len(branches):
                    self.report('arity-mismatch',
                                f"measurement '{meas}' has {outcomes} outcomes, {len(branches)} cases given", command)
                return self.agree([self.check(branch, ctx) for branch in branches], command)
            case ast.While(meas=meas, vars=names, body=body):
                outcomes = self.outcomes(meas, names, ctx, command)
                if outcomes is not None and outcomes != 2:
                    self.report('arity-mismatch', f"loop guard '{meas}' must have 2 outcomes, has {outcomes}", command)
                self.agree([ctx, self.check(body, ctx)], command)
                return ctx
            case ast.NewBit(var=name) | ast.NewQbit(var=name):
                if name in ctx:
                    self.report('context-mismatch', f"'{name}' is already in scope", command)
                    return ctx
                self.discarded.discard(name)
                kind = Kind.BIT if isinstance(command, ast.NewBit) else Kind.QBIT
                return ctx.prepend(Var(name, kind))
            case ast.Discard(var=name):
                if self.lookup(name, ctx, command) is None:
                    return ctx
                self.discarded.add(name)
                return ctx.remove(name)
            case ast.AssignBit(var=name):
                var = self.lookup(name, ctx, command)
                if var is not None and var.kind is not Kind.BIT:
                    self.report('kind-mismatch', f"only bits can be assigned, '{name}' is a {var.kind.value}", command)
                return ctx
            case ast.IfBit(var=name, then=then, orelse=orelse):
                var = self.lookup(name, ctx, command)
                if var is not None and var.kind is not Kind.BIT:
                    self.report('kind-mismatch', f"'if' needs a bit guard, '{name}' is a {var.kind.value}", command)
                return self.agree([self.check(then, ctx), self.check(orelse, ctx)], command)
            case ast.MeasureIf(var=name, then=then, orelse=orelse):
                var = self.lookup(name, ctx, command)
                if var is not None and var.kind is not Kind.QBIT:
                    self.report('kind-mismatch', f"'measure' needs a qbit, '{name}' is a {var.kind.value}", command)
                return self.agree([self.check(then, ctx), self.check(orelse, ctx)], command)
        raise TypeError(f"unknown command {type(command).__name__}")

    def outcomes(self, meas: str, names, ctx: VarContext, command: ast.Command) -> int | None:
        targets = self.lookup_all(names, ctx, command)
        if targets is None:
            return None
        dim = math.prod(v.dim for v in targets)
        try:
            ops = self.tables.measurements.resolve(meas, dim)
        except UnknownMeasurement as exc:
            self.report('unknown-measurement', exc.message, command)
            return None
        if ops[0].shape[0] != dim:
            self.report('arity-mismatch',
                        f"measurement '{meas}' acts on dimension {ops[0].shape[0]}, targets have {dim}", command)
            return None
        return len(ops)


def _show(ctx: VarContext) -> str:
    return ", ".join(str(v) for v in ctx)


def typecheck(ctx: VarContext, command: ast.Command, dialect: Dialect | str = Dialect.YING,
              tables: Tables | None = None) -> TypedProgram:
    """Check ``command`` under ``ctx``; raises ``TypeCheckError`` listing every issue found."""
    dialect = Dialect(dialect)
    checker = Checker(dialect, tables or Tables.builtins())
    if dialect is Dialect.YING:
        for var in ctx:
            if var.kind is Kind.BIT:
                checker.issues.append(TypeIssue('dialect', f"bit variable '{var.name}' is not part of ying-core"))
    out_ctx = checker.check(command, ctx)
    if checker.issues:
        raise TypeCheckError(checker.issues)
    return TypedProgram(ctx, out_ctx, command, dialect)
