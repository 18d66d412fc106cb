from __future__ import annotations

from .base import UnitarySource
from .builtin import FourierSource, HadamardSource
from .file_source import FileSource, read_matrix_file

from photodistill.errors import InvalidInputError


def get_unitary_source(name: str | None = None, path: str | None = None) -> UnitarySource:
    name = (name or "fourier").lower()
    if name == "fourier":
        return FourierSource()
    if name == "hadamard":
        return HadamardSource()
    if name == "file":
        if not path:
            raise InvalidInputError("unitary source 'file' needs a matrix file path")
        return FileSource(path)
    raise InvalidInputError(f"unknown unitary source {name!r} (fourier, hadamard, file)")
