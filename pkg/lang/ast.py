"""Abstract syntax shared by the Ying core language and the QPL dialect."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from django.conf import settings

from .exceptions import DuplicateDeclaration


class Kind(str, Enum):
    BIT = 'bit'
    QBIT = 'qbit'
    QUNIT = 'qunit'

    @property
    def is_quantum(self):
        return self is not Kind.BIT


class Dialect(str, Enum):
    YING = 'ying-core'
    QPL = 'qpl'


@dataclass(frozen=True)
class Var:
    name: str
    kind: Kind
    dim: int = 2

    def __post_init__(self):
        if self.kind is Kind.QUNIT and self.dim < 2:
            raise ValueError(f"qunit '{self.name}' needs dimension at least 2")
        if self.kind is not Kind.QUNIT and self.dim != 2:
            raise ValueError(f"{self.kind.value} '{self.name}' is two-dimensional")

    def __str__(self):
        if self.kind is Kind.QUNIT:
            return f"{self.name}: qunit[{self.dim}]"
        return f"{self.name}: {self.kind.value}"


@dataclass(frozen=True)
class VarContext:
    """Ordered typing context; the first variable is the leftmost tensor factor."""
    vars: tuple[Var, ...] = ()

    def __post_init__(self):
        names = [v.name for v in self.vars]
        for name in names:
            if names.count(name) > 1:
                raise DuplicateDeclaration(f"variable '{name}' declared twice")

    @classmethod
    def of(cls, *decls: tuple) -> VarContext:
        """``VarContext.of(("q", "qbit"), ("n", "qunit", 4))``"""
        result = []
        for name, kind, *rest in decls:
            kind = Kind(kind)
            if rest:
                dim = rest[0]
            else:
                dim = settings.QHL_QUNIT_DIM if kind is Kind.QUNIT else 2
            result.append(Var(name, kind, dim))
        return cls(tuple(result))

    def __iter__(self) -> Iterator[Var]:
        return iter(self.vars)

    def __len__(self):
        return len(self.vars)

    def __contains__(self, name):
        return any(v.name == name for v in self.vars)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.vars)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(v.dim for v in self.vars)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def index(self, name: str) -> int:
        if name not in self.names:
            raise KeyError(f"'{name}' is not in scope")
        return self.names.index(name)

    def get(self, name: str) -> Var | None:
        return next((v for v in self.vars if v.name == name), None)

    def require(self, name: str) -> Var:
        return self.vars[self.index(name)]

    def positions(self, names) -> list[int]:
        return [self.index(n) for n in names]

    def prepend(self, var: Var) -> VarContext:
        return VarContext((var,) + self.vars)

    def remove(self, name: str) -> VarContext:
        return VarContext(tuple(v for v in self.vars if v.name != name))


@dataclass(frozen=True)
class Command:
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Skip(Command):
    pass


@dataclass(frozen=True)
class Seq(Command):
    first: Command
    second: Command


@dataclass(frozen=True)
class InitZero(Command):
    var: str


@dataclass(frozen=True)
class ApplyU(Command):
    vars: tuple[str, ...]
    gate: str


@dataclass(frozen=True)
class MeasureCase(Command):
    meas: str
    vars: tuple[str, ...]
    branches: tuple[Command, ...]


@dataclass(frozen=True)
class While(Command):
    meas: str
    vars: tuple[str, ...]
    body: Command


@dataclass(frozen=True)
class NewBit(Command):
    var: str


@dataclass(frozen=True)
class NewQbit(Command):
    var: str


@dataclass(frozen=True)
class Discard(Command):
    var: str


@dataclass(frozen=True)
class AssignBit(Command):
    var: str
    value: int


@dataclass(frozen=True)
class IfBit(Command):
    var: str
    then: Command
    orelse: Command


@dataclass(frozen=True)
class MeasureIf(Command):
    var: str
    then: Command
    orelse: Command


QPL_ONLY = (NewBit, NewQbit, Discard, AssignBit, IfBit, MeasureIf)


def seq(*commands: Command) -> Command:
    """Right-leaning spine ``c1; (c2; (...))``; ``skip`` for no commands."""
    if not commands:
        return Skip()
    result = commands[-1]
    for command in reversed(commands[:-1]):
        result = Seq(command, result)
    return result


def flatten(command: Command) -> list[Command]:
    if isinstance(command, Seq):
        return flatten(command.first) + flatten(command.second)
    return [command]


def normalize(command: Command) -> Command:
    """Re-associate every sequence to the right, recursively."""
    match command:
        case Seq():
            return seq(*(normalize(c) for c in flatten(command)))
        case MeasureCase(meas=meas, vars=vs, branches=branches):
            return MeasureCase(meas, vs, tuple(normalize(b) for b in branches), pos=command.pos)
        case While(meas=meas, vars=vs, body=body):
            return While(meas, vs, normalize(body), pos=command.pos)
        case IfBit(var=v, then=t, orelse=e):
            return IfBit(v, normalize(t), normalize(e), pos=command.pos)
        case MeasureIf(var=v, then=t, orelse=e):
            return MeasureIf(v, normalize(t), normalize(e), pos=command.pos)
    return command


def is_loop_free(command: Command) -> bool:
    match command:
        case While():
            return False
        case Seq(first=a, second=b) | IfBit(then=a, orelse=b) | MeasureIf(then=a, orelse=b):
            return is_loop_free(a) and is_loop_free(b)
        case MeasureCase(branches=branches):
            return all(is_loop_free(b) for b in branches)
    return True


def statement_count(command: Command) -> int:
    return len(flatten(command))


def walk(command: Command) -> Iterator[Command]:
    yield command
    match command:
        case Seq(first=a, second=b) | IfBit(then=a, orelse=b) | MeasureIf(then=a, orelse=b):
            yield from walk(a)
            yield from walk(b)
        case MeasureCase(branches=branches):
            for branch in branches:
                yield from walk(branch)
        case While(body=body):
            yield from walk(body)


def infer_dialect(ctx: VarContext, command: Command) -> Dialect:
    """The smallest dialect containing every construct and declaration of the program."""
    if any(not v.kind.is_quantum for v in ctx) or any(isinstance(c, QPL_ONLY) for c in walk(command)):
        return Dialect.QPL
    return Dialect.YING


def output_context(command: Command, ctx: VarContext) -> VarContext:
    """Context left by ``command``; assumes the program typechecks."""
    match command:
        case Seq(first=first, second=second):
            return output_context(second, output_context(first, ctx))
        case NewBit(var=name):
            return ctx.prepend(Var(name, Kind.BIT))
        case NewQbit(var=name):
            return ctx.prepend(Var(name, Kind.QBIT))
        case Discard(var=name):
            return ctx.remove(name)
        case MeasureCase(branches=branches):
            return output_context(branches[0], ctx)
        case IfBit(then=then) | MeasureIf(then=then):
            return output_context(then, ctx)
    return ctx
