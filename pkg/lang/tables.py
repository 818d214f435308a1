"""Gate and measurement tables. Tables are explicit values, never module globals that mutate."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np
from django.conf import settings

from linalg import kernel
from linalg.exchange import load_library
from linalg.kernel import CMatrix

from .exceptions import TableError, UnknownGate, UnknownMeasurement

HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PHASE = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
CNOT = np.array([[1, 0, 0, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1],
                 [0, 0, 1, 0]], dtype=np.complex128)

BUILTIN_GATES = {
    'H': HADAMARD,
    'X': PAULI_X,
    'N': PAULI_X,
    'Y': PAULI_Y,
    'Z': PAULI_Z,
    'S': PHASE,
    'CNOT': CNOT,
}

# I is dimension-polymorphic; Hk is the k-fold tensor power of H.
IDENTITY_GATE = 'I'
EXPANDED_HADAMARD = re.compile(r"H([1-9][0-9]*)$")

STANDARD_MEASUREMENT = 'std'


def expanded_hadamard(k: int) -> CMatrix:
    return kernel.kron_all([HADAMARD] * k)


def computational_basis(dim: int) -> list[CMatrix]:
    return [kernel.outer(i, i, dim) for i in range(dim)]


def _readonly(mapping):
    return MappingProxyType({name: kernel.frozen(m) for name, m in mapping.items()})


@dataclass(frozen=True)
class GateTable:
    gates: Mapping[str, CMatrix] = field(default_factory=lambda: _readonly(BUILTIN_GATES))

    @classmethod
    def builtins(cls) -> GateTable:
        return cls()

    def with_gates(self, gates: Mapping, tol: float | None = None) -> GateTable:
        tol = kernel.default_tol(tol)
        for name, matrix in gates.items():
            if name == IDENTITY_GATE or EXPANDED_HADAMARD.match(name):
                raise TableError(f"gate name '{name}' is reserved")
            if not kernel.is_unitary(matrix, tol):
                raise TableError(f"gate '{name}' is not unitary within {tol:g}")
        return GateTable(_readonly({**self.gates, **gates}))

    def names(self) -> list[str]:
        return sorted([IDENTITY_GATE, *self.gates])

    def __contains__(self, name):
        return name == IDENTITY_GATE or name in self.gates or self._expanded_arity(name) is not None

    def _expanded_arity(self, name):
        match = EXPANDED_HADAMARD.match(name)
        if match and int(match.group(1)) <= settings.QHL_DJ_MAX_K + 1:
            return int(match.group(1))
        return None

    def resolve(self, name: str, dim: int) -> CMatrix:
        """Matrix of ``name``; ``dim`` only fixes the size of the polymorphic identity."""
        if name == IDENTITY_GATE:
            return kernel.identity(dim)
        if name in self.gates:
            return self.gates[name]
        k = self._expanded_arity(name)
        if k is not None:
            return expanded_hadamard(k)
        raise UnknownGate(f"unknown gate '{name}'")


@dataclass(frozen=True)
class MeasTable:
    measurements: Mapping[str, tuple[CMatrix, ...]] = field(default_factory=lambda: MappingProxyType({}))

    @classmethod
    def builtins(cls) -> MeasTable:
        return cls()

    def with_measurements(self, measurements: Mapping, tol: float | None = None) -> MeasTable:
        tol = kernel.default_tol(tol)
        checked = {}
        for name, ops in measurements.items():
            if name == STANDARD_MEASUREMENT:
                raise TableError(f"measurement name '{name}' is reserved")
            ops = tuple(kernel.frozen(op) for op in ops)
            dim = ops[0].shape[1]
            if any(op.shape != (dim, dim) for op in ops):
                raise TableError(f"measurement '{name}' needs square operators of one dimension")
            total = sum(kernel.dagger(op) @ op for op in ops)
            if kernel.max_norm(total - kernel.identity(dim)) > tol:
                raise TableError(f"measurement '{name}' is not complete within {tol:g}")
            checked[name] = ops
        return MeasTable(MappingProxyType({**self.measurements, **checked}))

    def names(self) -> list[str]:
        return sorted([STANDARD_MEASUREMENT, *self.measurements])

    def __contains__(self, name):
        return name == STANDARD_MEASUREMENT or name in self.measurements

    def resolve(self, name: str, dim: int) -> list[CMatrix]:
        if name == STANDARD_MEASUREMENT:
            return computational_basis(dim)
        if name in self.measurements:
            return list(self.measurements[name])
        raise UnknownMeasurement(f"unknown measurement '{name}'")


@dataclass(frozen=True)
class Tables:
    gates: GateTable = field(default_factory=GateTable)
    measurements: MeasTable = field(default_factory=MeasTable)

    @classmethod
    def builtins(cls) -> Tables:
        return cls()

    @classmethod
    def from_library(cls, library: Mapping, tol: float | None = None) -> Tables:
        return cls().extended(library, tol)

    def extended(self, library: Mapping, tol: float | None = None) -> Tables:
        return Tables(self.gates.with_gates(library.get('matrices', {}), tol),
                      self.measurements.with_measurements(library.get('measurements', {}), tol))


def load_tables(*paths, tol: float | None = None) -> Tables:
    """Built-ins extended with every sidecar document in ``paths``."""
    tables = Tables.builtins()
    for path in paths:
        tables = tables.extended(load_library(path), tol)
    return tables
