"""
Deutsch–Jozsa: oracle matrices, the program in both dialects, its proof outline and
the runs that classify an oracle.

Inputs are ``q1 .. qk`` (``q1`` most significant) and the ancilla is ``qe``, the last
tensor factor. Oracle tables are indexed by the input read as a binary number.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from django.conf import settings

from hoare.assertions import Comparison, Event, ProbAssertion, eval_assertion
from hoare.outlines import OutlineStep, ProofOutline, Rule
from lang import ast
from lang.ast import Dialect, Kind, Var, VarContext
from lang.tables import HADAMARD, Tables
from linalg import kernel
from linalg.kernel import CMatrix
from linalg.operators import DensityMatrix, QuantumPredicate
from semantics.denotational import evaluate
from semantics.options import EvalOptions
from semantics.primitives import primitive_ops

from .exceptions import InvalidOracle

logger = logging.getLogger(__name__)

ORACLE_GATE = 'Uf'
ANCILLA = 'qe'


class OracleClass(str, Enum):
    CONSTANT = 'constant'
    BALANCED = 'balanced'
    OTHER = 'other'


@dataclass(frozen=True)
class BooleanOracle:
    k: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise InvalidOracle("an oracle needs at least one input bit")
        if len(self.table) != 2 ** self.k:
            raise InvalidOracle(f"a {self.k}-bit oracle needs {2 ** self.k} table entries, got {len(self.table)}")
        if any(value not in (0, 1) for value in self.table):
            raise InvalidOracle("oracle values must be 0 or 1")

    @classmethod
    def parse(cls, text: str, k: int | None = None) -> BooleanOracle:
        """``constant0``, ``constant1`` or ``balanced:<bits>`` with ``2^k`` bits."""
        text = text.strip()
        if text in ('constant0', 'constant1'):
            if k is None:
                raise InvalidOracle(f"'{text}' needs the number of input bits")
            return cls(k, (int(text[-1]),) * 2 ** k)
        kind, _, bits = text.partition(':')
        if kind != 'balanced' or not bits or set(bits) - {'0', '1'}:
            raise InvalidOracle(f"cannot read oracle '{text}'; use constant0, constant1 or balanced:<bits>")
        width = len(bits).bit_length() - 1
        if 2 ** width != len(bits):
            raise InvalidOracle(f"oracle table length {len(bits)} is not a power of two")
        if k is not None and width != k:
            raise InvalidOracle(f"oracle table has {len(bits)} entries, {2 ** k} expected for k = {k}")
        oracle = cls(width, tuple(int(b) for b in bits))
        if oracle.kind is not OracleClass.BALANCED:
            raise InvalidOracle(f"'{text}' is not balanced")
        return oracle

    @property
    def kind(self) -> OracleClass:
        ones = sum(self.table)
        if ones in (0, len(self.table)):
            return OracleClass.CONSTANT
        if 2 * ones == len(self.table):
            return OracleClass.BALANCED
        return OracleClass.OTHER

    def __call__(self, x: int) -> int:
        return self.table[x]

    def __str__(self):
        if self.kind is OracleClass.CONSTANT:
            return f"constant{self.table[0]}"
        return "balanced:" + "".join(str(b) for b in self.table)


def all_oracles(k: int):
    """Both constant oracles, then every balanced one."""
    size = 2 ** k
    yield BooleanOracle(k, (0,) * size)
    yield BooleanOracle(k, (1,) * size)
    for ones in itertools.combinations(range(size), size // 2):
        yield BooleanOracle(k, tuple(int(x in ones) for x in range(size)))


def _require_k(k: int):
    if not 1 <= k <= settings.QHL_DJ_MAX_K:
        raise InvalidOracle(f"k must lie in 1..{settings.QHL_DJ_MAX_K}, got {k}")


def _usable(f: BooleanOracle):
    _require_k(f.k)
    if f.kind is OracleClass.OTHER:
        raise InvalidOracle(f"oracle {f} is neither constant nor balanced")


def build_hadamard(k: int) -> CMatrix:
    if k < 1:
        raise InvalidOracle("the expanded Hadamard needs k >= 1")
    return kernel.kron_all([HADAMARD] * k)


def build_uf(f: BooleanOracle) -> CMatrix:
    """Permutation ``|x>|b> -> |x>|b xor f(x)>``."""
    dim = 2 ** (f.k + 1)
    uf = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(2 ** f.k):
        for b in (0, 1):
            uf[2 * x + (b ^ f(x)), 2 * x + b] = 1.0
    return uf


def dj_tables(f: BooleanOracle) -> Tables:
    return Tables.builtins().extended({'matrices': {ORACLE_GATE: build_uf(f)}})


def inputs(k: int) -> list[str]:
    return [f"q{i}" for i in range(1, k + 1)]


def dj_program(f: BooleanOracle, dialect: Dialect | str = Dialect.YING) -> tuple[VarContext, ast.Command]:
    _usable(f)
    dialect = Dialect(dialect)
    qs = inputs(f.k)
    register = (*qs, ANCILLA)
    core = [
        ast.ApplyU((ANCILLA,), 'N'),
        ast.ApplyU(register, f"H{f.k + 1}"),
        ast.ApplyU(register, ORACLE_GATE),
        ast.ApplyU(tuple(qs), f"H{f.k}"),
    ]
    if dialect is Dialect.YING:
        ctx = VarContext(tuple(Var(name, Kind.QBIT) for name in register))
        return ctx, ast.seq(*(ast.InitZero(name) for name in register), *core)
    bits = [f"b{i}" for i in range(1, f.k + 1)]
    readout = [ast.MeasureIf(q, ast.AssignBit(b, 0), ast.AssignBit(b, 1)) for q, b in zip(qs, bits)]
    return VarContext(), ast.seq(
        *(ast.NewQbit(name) for name in reversed(register)),
        *core,
        ast.Discard(ANCILLA),
        *(ast.NewBit(b) for b in reversed(bits)),
        *readout,
    )


def dj_target(k: int) -> CMatrix:
    """``|0..0><0..0| (x) I_2``: all weight on the inputs reading zero."""
    return kernel.kron(kernel.outer(0, 0, 2 ** k), kernel.identity(2))


def dj_intermediate_predicate(k: int) -> CMatrix:
    """``(H_k (x) I_2)^dagger T (H_k (x) I_2)``, the precondition of the final Hadamard."""
    _require_k(k)
    lift = kernel.kron(build_hadamard(k), kernel.identity(2))
    return kernel.dagger(lift) @ dj_target(k) @ lift


@dataclass(frozen=True)
class DJReport:
    oracle: str
    k: int
    p00: float
    classification: OracleClass
    expected: OracleClass

    @property
    def correct(self) -> bool:
        return self.classification is self.expected


def _zero_inputs(names) -> ProbAssertion:
    return ProbAssertion((Comparison((Event(tuple((n, 0) for n in names)),), '>=', 0.5),))


def _report(f: BooleanOracle, p00: float) -> DJReport:
    classification = OracleClass.CONSTANT if p00 > 0.5 else OracleClass.BALANCED
    logger.debug("oracle %s: p00 = %.12f, %s", f, p00, classification.value)
    return DJReport(str(f), f.k, p00, classification, f.kind)


def dj_verify(f: BooleanOracle, opts: EvalOptions | None = None) -> DJReport:
    """Run the ying-core form from ``|0..0>`` and read the probability that every input is 0."""
    ctx, program = dj_program(f, Dialect.YING)
    rho = DensityMatrix.basis(0, ctx.total_dim)
    final = evaluate(ctx, program, rho, opts, dj_tables(f))
    result = eval_assertion(_zero_inputs(inputs(f.k)), final.ctx, final.state)
    return _report(f, result.probability)


def dj_qpl_verify(f: BooleanOracle, opts: EvalOptions | None = None) -> DJReport:
    """Run the QPL form from the empty context and read ``Pr(b1 = 0 & ... & bk = 0)``."""
    ctx, program = dj_program(f, Dialect.QPL)
    final = evaluate(ctx, program, DensityMatrix(np.ones((1, 1))), opts, dj_tables(f))
    bits = [f"b{i}" for i in range(1, f.k + 1)]
    result = eval_assertion(_zero_inputs(bits), final.ctx, final.state)
    return _report(f, result.probability)


def dj_outline(f: BooleanOracle) -> ProofOutline:
    """
    Partial-correctness outline of ``{P} program {T}`` for the ying-core form.

    One axiom step per statement, annotated backwards from ``T``; the statements are
    then chained right to left with Seq, and a final Cons states the goal ``P``: the
    identity for a constant oracle and zero for a balanced one.
    """
    ctx, program = dj_program(f, Dialect.YING)
    tables = dj_tables(f)
    statements = ast.flatten(program)
    post = dj_target(f.k)
    axioms = []
    for index in reversed(range(len(statements))):
        command = statements[index]
        ops, _ = primitive_ops(command, ctx, tables)
        pre = kernel.hermitian_part(sum(kernel.dagger(op) @ post @ op for op in ops))
        rule = Rule.ASGN_B if isinstance(command, ast.InitZero) else Rule.UNIT
        axioms.append(OutlineStep(f"s{index + 1}", rule, command, QuantumPredicate(pre), QuantumPredicate(post)))
        post = pre
    steps = list(reversed(axioms))
    chained = steps[-1].id
    for index in reversed(range(len(statements) - 1)):
        step = OutlineStep(f"seq{index + 1}", Rule.SEQ, premises=(steps[index].id, chained))
        steps.append(step)
        chained = step.id
    dim = ctx.total_dim
    goal = QuantumPredicate.identity(dim) if f.kind is OracleClass.CONSTANT else QuantumPredicate.zero(dim)
    steps.append(OutlineStep("cons", Rule.CONS, pre=goal, post=QuantumPredicate(dj_target(f.k)),
                             premises=(chained,)))
    return ProofOutline(ctx, program, goal, QuantumPredicate(dj_target(f.k)), tuple(steps), tables)


def expected_p00(f: BooleanOracle) -> float:
    """``|2^-k sum_x (-1)^f(x)|^2``."""
    total = sum((-1) ** f(x) for x in range(2 ** f.k))
    return math.pow(total / 2 ** f.k, 2)
