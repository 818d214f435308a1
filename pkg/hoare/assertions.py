"""
Probability assertions over computational-basis outcomes.

    assertion  := comparison ('and' comparison)*
    comparison := term ('+' term)* ('=' | '<=' | '>=') number
    term       := 'Pr' '(' ident '=' int ('&' ident '=' int)* ')'

The probability of a conjunction is ``tr(Π rho)`` for the embedded product of basis
projectors; it is not renormalized by ``tr(rho)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from lang.ast import VarContext
from lang.exceptions import LexicalError
from lang.lexer import Token, tokenize
from linalg import kernel
from linalg.operators import DensityMatrix

from .exceptions import AssertionFormatError, UnknownVariable

COMPARATORS = frozenset({'=', '<=', '>='})


@dataclass(frozen=True)
class Event:
    """Conjunction ``x1 = v1 & x2 = v2 ...``."""
    outcomes: tuple[tuple[str, int], ...]

    def __str__(self):
        return "Pr(" + " & ".join(f"{name} = {value}" for name, value in self.outcomes) + ")"


@dataclass(frozen=True)
class Comparison:
    terms: tuple[Event, ...]
    op: str
    bound: float

    def __str__(self):
        return f"{' + '.join(str(t) for t in self.terms)} {self.op} {self.bound:g}"

    def decide(self, value: float, tol: float) -> bool:
        if self.op == '=':
            return abs(value - self.bound) <= tol
        if self.op == '<=':
            return value <= self.bound + tol
        return value >= self.bound - tol


@dataclass(frozen=True)
class ProbAssertion:
    comparisons: tuple[Comparison, ...]

    def __str__(self):
        return " and ".join(str(c) for c in self.comparisons)

    @classmethod
    def parse(cls, text: str) -> ProbAssertion:
        return _AssertionParser(text).assertion()

    def variables(self) -> set[str]:
        return {name for c in self.comparisons for t in c.terms for name, _ in t.outcomes}


@dataclass(frozen=True)
class AssertionResult:
    holds: bool
    probabilities: tuple[float, ...]

    @property
    def probability(self) -> float:
        return self.probabilities[0]


class _AssertionParser:
    def __init__(self, text: str):
        self.text = text
        try:
            self.tokens = tokenize(text)
        except LexicalError as exc:
            raise AssertionFormatError(f"{exc.message} in assertion {text!r}") from exc
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def take(self, kinds=(), text=None) -> Token:
        token = self.peek()
        if token.kind == 'EOF' or (kinds and token.kind not in kinds) or (text and token.text != text):
            wanted = repr(text) if text else " or ".join(kinds)
            raise AssertionFormatError(f"expected {wanted} in assertion {self.text!r}, found {token.text or 'end'}")
        self.index += 1
        return token

    def at(self, text) -> bool:
        token = self.peek()
        return token.text == text and token.kind in ('IDENT', 'PUNCT', 'COMPARE')

    def assertion(self) -> ProbAssertion:
        comparisons = [self.comparison()]
        while self.at('and'):
            self.take()
            comparisons.append(self.comparison())
        if self.peek().kind != 'EOF':
            raise AssertionFormatError(f"unexpected {self.peek().text!r} in assertion {self.text!r}")
        return ProbAssertion(tuple(comparisons))

    def comparison(self) -> Comparison:
        terms = [self.term()]
        while self.at('+'):
            self.take()
            terms.append(self.term())
        op = self.take(('PUNCT', 'COMPARE')).text
        if op not in COMPARATORS:
            raise AssertionFormatError(f"expected '=', '<=' or '>=' in assertion {self.text!r}, found {op!r}")
        bound = float(self.take(('INT', 'REAL')).text)
        if not math.isfinite(bound):
            raise AssertionFormatError("assertion bounds must be finite")
        return Comparison(tuple(terms), op, bound)

    def term(self) -> Event:
        self.take(('IDENT',), 'Pr')
        self.take(('PUNCT',), '(')
        outcomes = [self.outcome()]
        while self.at('&'):
            self.take()
            outcomes.append(self.outcome())
        self.take(('PUNCT',), ')')
        return Event(tuple(outcomes))

    def outcome(self) -> tuple[str, int]:
        name = self.take(('IDENT',)).text
        self.take(('PUNCT',), '=')
        value = self.take(('INT', 'REAL'))
        if value.kind != 'INT':
            raise AssertionFormatError(f"outcome of '{name}' must be a non-negative integer, got {value.text}")
        return name, int(value.text)


def event_projector(event: Event, ctx: VarContext) -> kernel.CMatrix:
    """Embedded projector onto the outcomes of ``event``; zero for contradictory conjunctions."""
    wanted: dict[str, int] = {}
    for name, value in event.outcomes:
        var = ctx.get(name)
        if var is None:
            raise UnknownVariable(f"assertion mentions '{name}', which is not in scope")
        if not 0 <= value < var.dim:
            raise AssertionFormatError(f"'{name}' has no outcome {value} (dimension {var.dim})")
        if wanted.setdefault(name, value) != value:
            return np.zeros((ctx.total_dim, ctx.total_dim), dtype=np.complex128)
    names = list(wanted)
    factor = kernel.kron_all(kernel.outer(wanted[n], wanted[n], ctx.get(n).dim) for n in names)
    return kernel.embed_at(factor, ctx.positions(names), ctx)


def eval_assertion(assertion: ProbAssertion | str, ctx: VarContext, rho: DensityMatrix,
                   tol: float | None = None) -> AssertionResult:
    if isinstance(assertion, str):
        assertion = ProbAssertion.parse(assertion)
    tol = kernel.default_tol(tol)
    holds, probabilities = True, []
    for comparison in assertion.comparisons:
        value = sum(kernel.expectation(event_projector(term, ctx), rho.mat) for term in comparison.terms)
        probabilities.append(float(value))
        holds = holds and comparison.decide(value, tol)
    return AssertionResult(holds, tuple(probabilities))
