"""Reading exchange documents (JSON text) from disk."""
import json
from pathlib import Path

from .exceptions import MatrixFormatError
from .serializers import MatrixLibrarySerializer, MatrixSerializer


def _reject_constant(token):
    raise MatrixFormatError(f"non-finite literal {token} is not allowed")


def read_document(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def parse_matrix(data, source: str = "matrix"):
    serializer = MatrixSerializer(data=data)
    if not serializer.is_valid():
        raise MatrixFormatError(f"{source}: {_flatten(serializer.errors)}")
    return serializer.validated_data


def load_matrix(path):
    return parse_matrix(read_document(path), str(path))


def parse_library(data, source: str = "library") -> dict:
    serializer = MatrixLibrarySerializer(data=data)
    if not serializer.is_valid():
        raise MatrixFormatError(f"{source}: {_flatten(serializer.errors)}")
    return {
        'matrices': dict(serializer.validated_data['matrices']),
        'measurements': {name: list(ops) for name, ops in serializer.validated_data['measurements'].items()},
    }


def load_library(path) -> dict:
    return parse_library(read_document(path), str(path))


def _flatten(errors) -> str:
    if isinstance(errors, dict):
        return "; ".join(f"{key}: {_flatten(value)}" for key, value in errors.items())
    if isinstance(errors, list):
        return ", ".join(_flatten(e) for e in errors)
    return str(errors)
