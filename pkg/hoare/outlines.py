"""
Proof outlines for the partial-correctness rules Skip, AsgnB, AsgnN, Unit, Seq, Measure,
While and Cons.

Every step concludes a triple ``{pre} command {post}``. Axiom steps must state exactly
the precondition their schema computes; Cons weakens through the Löwner order. The
conclusion of the last step must be the outline's goal.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from lang import ast
from lang.ast import Dialect, Kind, VarContext
from lang.exceptions import LangError, TypeCheckError
from lang.parser import parse, parse_statement
from lang.tables import Tables
from lang.typing import typecheck
from linalg import kernel
from linalg.exceptions import QuantumVerificationError
from linalg.exchange import load_library, read_document
from linalg.kernel import CMatrix
from linalg.operators import QuantumPredicate
from semantics.options import EvalOptions, resolve
from semantics.primitives import branch_operators, primitive_ops

from .exceptions import OutlineShapeError
from .serializers import OutlineDocumentSerializer

logger = logging.getLogger(__name__)


class Rule(str, Enum):
    SKIP = 'Skip'
    ASGN_B = 'AsgnB'
    ASGN_N = 'AsgnN'
    UNIT = 'Unit'
    SEQ = 'Seq'
    MEASURE = 'Measure'
    WHILE = 'While'
    CONS = 'Cons'


@dataclass(frozen=True)
class OutlineStep:
    id: str
    rule: Rule
    command: ast.Command | None = None
    pre: QuantumPredicate | None = None
    post: QuantumPredicate | None = None
    premises: tuple[str, ...] = ()
    invariant: QuantumPredicate | None = None

    def __post_init__(self):
        object.__setattr__(self, 'rule', Rule(self.rule))
        object.__setattr__(self, 'premises', tuple(self.premises))


@dataclass(frozen=True)
class Conclusion:
    pre: CMatrix
    command: ast.Command
    post: CMatrix


@dataclass(frozen=True)
class ProofOutline:
    ctx: VarContext
    program: ast.Command
    pre: QuantumPredicate
    post: QuantumPredicate
    steps: tuple[OutlineStep, ...] = ()
    tables: Tables = field(default_factory=Tables.builtins)


@dataclass(frozen=True)
class StepVerdict:
    id: str
    rule: Rule
    valid: bool
    message: str = ""


@dataclass(frozen=True)
class OutlineVerdict:
    valid: bool
    steps: tuple[StepVerdict, ...]
    message: str = ""
    conclusion: Conclusion | None = None


class OutlineChecker:
    def __init__(self, outline: ProofOutline, opts: EvalOptions):
        self.outline = outline
        self.ctx = outline.ctx
        self.tables = outline.tables
        self.tol = opts.tol
        self.concluded: dict[str, Conclusion] = {}

    def same(self, a: CMatrix, b: CMatrix) -> bool:
        scale = max(1.0, kernel.max_norm(a), kernel.max_norm(b))
        return a.shape == b.shape and kernel.max_norm(a - b) <= self.tol * scale

    def premises(self, step: OutlineStep, count: int | None = None) -> list[Conclusion]:
        if count is not None and len(step.premises) != count:
            raise OutlineShapeError(step.id, f"rule {step.rule.value} takes {count} premise(s), "
                                             f"{len(step.premises)} given")
        found = []
        for ref in step.premises:
            if ref not in self.concluded:
                raise OutlineShapeError(step.id, f"premise '{ref}' is not an earlier step")
            found.append(self.concluded[ref])
        return found

    def command(self, step: OutlineStep, *kinds) -> ast.Command:
        if step.command is None:
            raise OutlineShapeError(step.id, f"rule {step.rule.value} needs a command")
        if kinds and not isinstance(step.command, kinds):
            raise OutlineShapeError(step.id, f"rule {step.rule.value} does not apply to "
                                             f"{type(step.command).__name__}")
        return step.command

    def needs(self, step: OutlineStep, name: str) -> CMatrix:
        value = getattr(step, name)
        if value is None:
            raise OutlineShapeError(step.id, f"rule {step.rule.value} needs '{name}'")
        return value.mat

    def stated(self, step: OutlineStep, computed: CMatrix, problems: list[str]) -> CMatrix:
        """The step's precondition, checked against the one its rule computes."""
        if step.pre is None:
            return computed
        if not self.same(step.pre.mat, computed):
            deviation = kernel.max_norm(step.pre.mat - computed)
            problems.append(f"precondition differs from the rule's precondition by {deviation:.3e}")
        return step.pre.mat

    def matches(self, step: OutlineStep, command: ast.Command, problems: list[str]):
        if step.command is not None and ast.normalize(step.command) != ast.normalize(command):
            problems.append("command differs from the one its premises prove")

    def check(self, step: OutlineStep) -> tuple[Conclusion, list[str]]:
        problems: list[str] = []
        if step.command is not None:
            try:
                typecheck(self.ctx, step.command, Dialect.YING, self.tables)
            except TypeCheckError as exc:
                raise OutlineShapeError(step.id, str(exc)) from exc
        handler = getattr(self, f"rule_{step.rule.name.lower()}")
        conclusion = handler(step, problems)
        return conclusion, problems

    def rule_skip(self, step, problems):
        command = step.command or ast.Skip()
        if not isinstance(command, ast.Skip):
            raise OutlineShapeError(step.id, "rule Skip only concludes skip")
        post = self.needs(step, 'post')
        return Conclusion(self.stated(step, post, problems), command, post)

    def axiom(self, step, problems):
        post = self.needs(step, 'post')
        ops, _ = primitive_ops(step.command, self.ctx, self.tables)
        computed = sum(kernel.dagger(op) @ post @ op for op in ops)
        return Conclusion(self.stated(step, computed, problems), step.command, post)

    def rule_asgn_b(self, step, problems):
        command = self.command(step, ast.InitZero)
        if self.ctx.get(command.var).kind is Kind.QUNIT:
            raise OutlineShapeError(step.id, f"'{command.var}' is a qunit; use AsgnN")
        return self.axiom(step, problems)

    def rule_asgn_n(self, step, problems):
        command = self.command(step, ast.InitZero)
        if self.ctx.get(command.var).kind is not Kind.QUNIT:
            raise OutlineShapeError(step.id, f"'{command.var}' is not a qunit; use AsgnB")
        return self.axiom(step, problems)

    def rule_unit(self, step, problems):
        self.command(step, ast.ApplyU)
        return self.axiom(step, problems)

    def rule_seq(self, step, problems):
        first, second = self.premises(step, 2)
        if not self.same(first.post, second.pre):
            problems.append("midpoints do not chain: the first postcondition differs from the second precondition")
        command = ast.Seq(first.command, second.command)
        self.matches(step, command, problems)
        pre = first.pre
        if step.pre is not None and not self.same(step.pre.mat, pre):
            problems.append("precondition differs from the first premise's")
        if step.post is not None and not self.same(step.post.mat, second.post):
            problems.append("postcondition differs from the second premise's")
        return Conclusion(pre, command, second.post)

    def rule_measure(self, step, problems):
        command = self.command(step, ast.MeasureCase)
        arms = self.premises(step, len(command.branches))
        post = arms[0].post
        for m, (arm, branch) in enumerate(zip(arms, command.branches)):
            if ast.normalize(arm.command) != ast.normalize(branch):
                problems.append(f"premise for outcome {m} proves a different command")
            if not self.same(arm.post, post):
                problems.append(f"premise for outcome {m} has a different postcondition")
        if step.post is not None and not self.same(step.post.mat, post):
            problems.append("postcondition differs from the premises'")
        ops = branch_operators(command, self.ctx, self.tables)
        computed = sum(kernel.dagger(op) @ arm.pre @ op for op, arm in zip(ops, arms))
        return Conclusion(self.stated(step, computed, problems), command, post)

    def rule_while(self, step, problems):
        command = self.command(step, ast.While)
        invariant = self.needs(step, 'invariant')
        post = self.needs(step, 'post')
        (body,) = self.premises(step, 1)
        exit_op, stay_op = branch_operators(command, self.ctx, self.tables)
        split = kernel.dagger(exit_op) @ post @ exit_op + kernel.dagger(stay_op) @ invariant @ stay_op
        if ast.normalize(body.command) != ast.normalize(command.body):
            problems.append("premise proves a different loop body")
        if not self.same(body.pre, invariant):
            problems.append("premise precondition is not the invariant")
        if not self.same(body.post, split):
            problems.append("premise postcondition is not the split M0^dagger P M0 + M1^dagger Q M1")
        return Conclusion(self.stated(step, split, problems), command, post)

    def rule_cons(self, step, problems):
        (inner,) = self.premises(step, 1)
        pre = self.needs(step, 'pre')
        post = self.needs(step, 'post')
        self.matches(step, inner.command, problems)
        if not kernel.loewner_leq(pre, inner.pre, self.tol):
            problems.append("precondition is not below the premise's precondition")
        if not kernel.loewner_leq(inner.post, post, self.tol):
            problems.append("premise postcondition is not below the postcondition")
        return Conclusion(pre, inner.command, post)

    def run(self) -> OutlineVerdict:
        verdicts = []
        last = None
        for step in self.outline.steps:
            if step.id in self.concluded:
                raise OutlineShapeError(step.id, "step id used twice")
            last, problems = self.check(step)
            self.concluded[step.id] = last
            verdicts.append(StepVerdict(step.id, step.rule, not problems, "; ".join(problems)))
        if last is None:
            last = Conclusion(self.outline.post.mat, ast.Skip(), self.outline.post.mat)
        goal = []
        if ast.normalize(last.command) != ast.normalize(self.outline.program):
            goal.append("the outline does not prove the program")
        if not self.same(last.pre, self.outline.pre.mat):
            goal.append("the outline's precondition is not the goal's")
        if not self.same(last.post, self.outline.post.mat):
            goal.append("the outline's postcondition is not the goal's")
        valid = not goal and all(v.valid for v in verdicts)
        return OutlineVerdict(valid, tuple(verdicts), "; ".join(goal), last)


def check_outline(outline: ProofOutline, opts: EvalOptions | None = None) -> OutlineVerdict:
    verdict = OutlineChecker(outline, resolve(opts)).run()
    logger.debug("outline checked: %s", "valid" if verdict.valid else "invalid")
    return verdict


def build_outline(document: dict, program_text: str, library: dict, tables: Tables) -> ProofOutline:
    """Assemble an outline from a validated document whose predicates name matrices in ``library``."""
    ctx, program = parse(program_text)
    typecheck(ctx, program, Dialect.YING, tables)
    matrices = library.get('matrices', {})

    def predicate(name, where):
        if name is None:
            return None
        if name not in matrices:
            raise OutlineShapeError(where, f"no matrix named '{name}'")
        try:
            return QuantumPredicate(matrices[name])
        except QuantumVerificationError as exc:
            raise OutlineShapeError(where, f"matrix '{name}': {exc}") from exc

    steps = []
    for raw in document.get('steps', []):
        command = None
        if raw.get('command') is not None:
            try:
                command = parse_statement(raw['command'], ctx)
            except LangError as exc:
                raise OutlineShapeError(raw['id'], f"command: {exc}") from exc
        steps.append(OutlineStep(
            id=raw['id'],
            rule=raw['rule'],
            command=command,
            pre=predicate(raw.get('pre'), raw['id']),
            post=predicate(raw.get('post'), raw['id']),
            premises=tuple(raw.get('premises', ())),
            invariant=predicate(raw.get('invariant'), raw['id']),
        ))
    return ProofOutline(ctx, program, predicate(document['pre'], None), predicate(document['post'], None),
                        tuple(steps), tables)


def load_outline(path) -> ProofOutline:
    """Read an outline document; its program, gate and matrix paths are relative to the document."""
    path = Path(path)
    data = read_document(path)
    serializer = OutlineDocumentSerializer(data=data)
    if not serializer.is_valid():
        raise OutlineShapeError(None, f"{path}: {serializer.errors}")
    document = serializer.validated_data
    base = path.parent
    program_path = base / document['program']
    try:
        program_text = program_path.read_text()
    except OSError as exc:
        raise OutlineShapeError(None, f"cannot read program {program_path}: {exc.strerror}") from exc
    tables = Tables.builtins()
    if document.get('gates'):
        tables = tables.extended(load_library(base / document['gates']))
    library = load_library(base / document['matrices']) if document.get('matrices') else {}
    return build_outline(document, program_text, library, tables)

