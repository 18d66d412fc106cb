from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from photodistill.errors import InvalidInputError
from photodistill.optics.matrices import ComplexMatrix
from photodistill.schemas import MatrixPayload
from photodistill.unitary.base import UnitarySource


def _parse_complex(cell: str) -> complex:
    text = cell.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(text)
    except ValueError as e:
        raise InvalidInputError(f"not a complex number: {cell!r}") from e


def read_matrix_file(path: str | Path) -> np.ndarray:
    """JSON ``{"real": [[...]], "imag": [[...]]}`` or CSV of complex literals (``0.5-0.2j``)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read matrix file {p}: {e}") from e
    if p.suffix.lower() == ".json":
        try:
            return MatrixPayload(**json.loads(text)).to_array()
        except (json.JSONDecodeError, TypeError, ValueError) as e:
            raise InvalidInputError(f"bad matrix JSON {p}: {e}") from e
    rows = [r for r in csv.reader(ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#"))]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise InvalidInputError(f"matrix file {p} is not a rectangular grid")
    return np.array([[_parse_complex(c) for c in r] for r in rows], dtype=complex)


class FileSource(UnitarySource):
    name = "file"

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def matrix(self, n: int) -> ComplexMatrix:
        a = read_matrix_file(self.path)
        if a.shape != (n, n):
            raise InvalidInputError(f"{self.path} holds a {a.shape} matrix, expected {n}x{n}")
        return ComplexMatrix.labelled(a)
