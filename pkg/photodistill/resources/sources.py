from __future__ import annotations

import csv
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, field_validator

from photodistill.errors import InvalidInputError

DATA_DIR = Path(__file__).resolve().parent.parent / "data"
SOURCES_FILE = DATA_DIR / "sources.csv"


class SourceEntry(BaseModel):
    label: str
    year: int
    type: Literal["probabilistic", "deterministic"]
    eps_indist: float
    provenance: str = ""

    @field_validator("eps_indist")
    @classmethod
    def _eps(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError(f"eps_indist={v} outside (0, 1)")
        return v


def load_sources_csv(path: str | Path) -> list[SourceEntry]:
    """Rows ``label,year,type,eps_indist[,provenance]``; lines starting with # are skipped."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read source table {p}: {e}") from e
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    rows = list(csv.DictReader(lines))
    if not rows:
        raise InvalidInputError(f"source table {p} has no rows")
    try:
        return [SourceEntry(**{k.strip(): (v or "").strip() for k, v in row.items() if k}) for row in rows]
    except ValueError as e:
        raise InvalidInputError(f"bad source table {p}: {e}") from e


def default_sources() -> list[SourceEntry]:
    return load_sources_csv(SOURCES_FILE)


def get_source(label: str, sources: list[SourceEntry] | None = None) -> SourceEntry:
    for s in sources or default_sources():
        if s.label.lower() == label.lower():
            return s
    raise InvalidInputError(f"unknown source {label!r}")
