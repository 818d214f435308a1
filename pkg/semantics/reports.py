from __future__ import annotations

from dataclasses import dataclass

from lang.tables import Tables
from lang.typing import TypedProgram
from linalg.operators import DensityMatrix

from .denotational import termination_probability
from .operational import run_operational
from .options import EvalOptions

DEFAULT_DEPTH = 64


@dataclass(frozen=True)
class RunReport:
    final_state: DensityMatrix
    trace: float
    termination_probability: float
    truncation_error: float
    path_count: int
    unexplored_mass: float
    deterministic: bool


def run_program(program: TypedProgram, rho: DensityMatrix, opts: EvalOptions | None = None,
                tables: Tables | None = None, depth: int = DEFAULT_DEPTH) -> RunReport:
    """Evaluate ``program`` on ``rho`` and count its computations operationally."""
    estimate = termination_probability(program.ctx, program.command, rho, opts, tables)
    result = estimate.evaluation
    paths = run_operational(program.ctx, program.command, rho, depth, tables)
    return RunReport(
        final_state=result.state,
        trace=result.state.trace,
        termination_probability=estimate.probability,
        truncation_error=result.truncation_error,
        path_count=paths.path_count,
        unexplored_mass=paths.unexplored_mass,
        deterministic=paths.deterministic,
    )
