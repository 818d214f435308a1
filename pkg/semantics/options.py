from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum

from django.conf import settings

from .exceptions import InvalidOptions


class Mode(str, Enum):
    TRUNCATED = 'truncated'
    EXACT_KRAUS = 'exact-kraus'


@dataclass(frozen=True)
class EvalOptions:
    """Loop and fixpoint controls shared by evaluation and the predicate transformers."""
    loop_max_iters: int = 1000
    loop_mass_eps: float = 1e-9
    mode: Mode = Mode.TRUNCATED
    fix_eps: float = 1e-9
    fix_max_iters: int = 10000
    tol: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, 'mode', Mode(self.mode))
        for name in ('loop_max_iters', 'loop_mass_eps', 'fix_eps', 'fix_max_iters', 'tol'):
            if not getattr(self, name) > 0:
                raise InvalidOptions(f"{name} must be positive, got {getattr(self, name)}")

    @classmethod
    def from_settings(cls, **overrides) -> EvalOptions:
        unknown = set(overrides) - {f.name for f in fields(cls)}
        if unknown:
            raise InvalidOptions(f"unknown options: {', '.join(sorted(unknown))}")
        values = {
            'loop_max_iters': settings.QHL_LOOP_MAX_ITERS,
            'loop_mass_eps': settings.QHL_LOOP_MASS_EPS,
            'fix_eps': settings.QHL_FIX_EPS,
            'fix_max_iters': settings.QHL_FIX_MAX_ITERS,
            'tol': settings.QHL_TOL,
        }
        values.update({name: value for name, value in overrides.items() if value is not None})
        return cls(**values)

    def but(self, **changes) -> EvalOptions:
        return replace(self, **changes)


def resolve(opts: EvalOptions | None) -> EvalOptions:
    return opts if opts is not None else EvalOptions.from_settings()
