"""
Small-step semantics over configurations ``<command, state>``.

A configuration whose residual is ``skip`` is terminal. The rewrite ``skip; c -> c``
leaves the state alone and is folded into the transition that exposed it, so every
counted transition changes the state.
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
from linalg.operators import DensityMatrix

from .primitives import BRANCHING, branch_operators, branches, primitive_ops

logger = logging.getLogger(__name__)

# Paths whose trace falls below this are dropped.
PRUNE_TRACE = 1e-12


@dataclass(frozen=True, eq=False)
class Config:
    residual: ast.Command
    state: CMatrix
    ctx: VarContext

    @property
    def done(self) -> bool:
        return isinstance(self.residual, ast.Skip)

    @property
    def trace(self) -> float:
        return float(np.trace(self.state).real)


def settle(command: ast.Command) -> ast.Command:
    """Drop leading ``skip`` from a sequence."""
    while isinstance(command, ast.Seq) and isinstance(command.first, ast.Skip):
        command = command.second
    return command


def _conjugate(op: CMatrix, rho: CMatrix) -> CMatrix:
    return op @ rho @ kernel.dagger(op)


def step(cfg: Config, tables: Tables | None = None) -> list[Config]:
    """Successor configurations; empty for a terminal one."""
    tables = tables or Tables.builtins()
    command, rho, ctx = cfg.residual, cfg.state, cfg.ctx
    match command:
        case ast.Skip():
            return []
        case ast.Seq(first=ast.Skip(), second=second):
            return [Config(second, rho, ctx)]
        case ast.Seq(first=first, second=second):
            return [Config(second if nxt.done else ast.Seq(nxt.residual, second), nxt.state, nxt.ctx)
                    for nxt in step(Config(first, rho, ctx), tables)]
        case ast.While(body=body):
            exit_op, stay_op = branch_operators(command, ctx, tables)
            return [Config(ast.Skip(), _conjugate(exit_op, rho), ctx),
                    Config(ast.Seq(body, command), _conjugate(stay_op, rho), ctx)]
        case _ if isinstance(command, BRANCHING):
            return [Config(arm, _conjugate(op, rho), ctx)
                    for op, arm in zip(branch_operators(command, ctx, tables), branches(command), strict=True)]
    ops, out = primitive_ops(command, ctx, tables)
    return [Config(ast.Skip(), sum(_conjugate(op, rho) for op in ops), out)]


@dataclass(frozen=True)
class OperationalRun:
    terminals: list[DensityMatrix] = field(default_factory=list)
    unexplored_mass: float = 0.0
    max_depth_reached: int = 0

    @property
    def path_count(self) -> int:
        return len(self.terminals)

    @property
    def deterministic(self) -> bool:
        """Every computation finished inside the depth cap: a finite sum."""
        return self.unexplored_mass == 0.0

    def total(self, dim: int) -> CMatrix:
        result = np.zeros((dim, dim), dtype=np.complex128)
        for state in self.terminals:
            result = result + state.mat
        return result


def run_operational(ctx: VarContext, command: ast.Command, rho: DensityMatrix, depth_cap: int = 64,
                    tables: Tables | None = None) -> OperationalRun:
    """Breadth-first expansion of every computation from ``<command, rho>`` up to ``depth_cap`` transitions."""
    tables = tables or Tables.builtins()
    typecheck(ctx, command, infer_dialect(ctx, command), tables)
    if rho.dim != ctx.total_dim:
        raise DimensionMismatch(f"state has dimension {rho.dim}, the program expects {ctx.total_dim}")
    start = Config(settle(command), rho.mat, ctx)
    if start.done:
        return OperationalRun([rho])
    frontier = [start]
    terminals = []
    depth = 0
    while frontier and depth < depth_cap:
        depth += 1
        following = []
        for cfg in frontier:
            for nxt in step(cfg, tables):
                nxt = Config(settle(nxt.residual), nxt.state, nxt.ctx)
                if nxt.trace < PRUNE_TRACE:
                    continue
                if nxt.done:
                    terminals.append(DensityMatrix(kernel.hermitian_part(nxt.state), rho.tol))
                else:
                    following.append(nxt)
        frontier = following
    unexplored = sum(cfg.trace for cfg in frontier)
    if frontier:
        logger.debug("operational run stopped at depth %d with %d open paths", depth, len(frontier))
    return OperationalRun(terminals, float(unexplored), depth)
