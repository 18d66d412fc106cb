from __future__ import annotations

import csv
import hashlib
import json
import logging
from pathlib import Path

from photodistill.errors import InvalidInputError
from photodistill.extraction.correlators import (
    CorrelatorSamples,
    Protocol,
    SampleStats,
    correlator_from_counts,
)
from photodistill.schemas import LossSpec
from photodistill.tomography.decompose import CountMatrix

logger = logging.getLogger(__name__)

COUNT_COLUMNS = {"n3", "n4", "n34", "nt", "n12", "n123", "n124", "n1234"}


def _safe_read_text(path: str | Path) -> str:
    p = Path(path)
    try:
        return p.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read {p}: {e}") from e


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    try:
        with open(path, "rb") as f:
            for chunk in iter(lambda: f.read(1 << 16), b""):
                h.update(chunk)
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e}") from e
    return "sha256:" + h.hexdigest()


def _split_header(text: str) -> tuple[dict[str, str], list[str]]:
    """``# key=value`` comment lines become metadata; other comments are dropped."""
    meta: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            key, sep, value = s.lstrip("#").strip().partition("=")
            if sep and key.strip() and " " not in key.strip():
                meta[key.strip()] = value.strip()
            continue
        body.append(s)
    return meta, body


def read_count_csv(path: str | Path) -> tuple[CountMatrix, dict[str, str]]:
    """Count grid with a ``# s_norm=<int>`` header; row i = input mode i."""
    meta, body = _split_header(_safe_read_text(path))
    if "s_norm" not in meta:
        raise InvalidInputError(f"{path}: missing '# s_norm=<integer>' header")
    try:
        s_norm = int(float(meta["s_norm"]))
        counts = [[int(float(x)) for x in row] for row in csv.reader(body)]
        duration = float(meta["duration_s"]) if "duration_s" in meta else None
        return CountMatrix(counts=counts, s_norm=s_norm, duration_s=duration), meta
    except ValueError as e:
        raise InvalidInputError(f"{path}: {e}") from e


def read_correlator_csv(path: str | Path, trigger_scale: float = 1.0):
    """Correlator data in one of three layouts, told apart by the header.

    - ``timestamp,protocol,value``: per-run correlator values.
    - ``protocol,samples,mean,sd,se``: per-protocol statistics.
    - ``timestamp,protocol,<count columns>``: per-run raw counts, turned into
      correlator values here.

    Returns ``CorrelatorSamples`` for the per-run layouts, otherwise a dict of
    ``SampleStats`` by protocol.
    """
    _, body = _split_header(_safe_read_text(path))
    rows = list(csv.DictReader(body))
    if not rows:
        raise InvalidInputError(f"{path}: no correlator rows")
    columns = {c.strip() for c in rows[0].keys() if c}

    try:
        if {"protocol", "mean", "sd", "se"} <= columns:
            return {
                Protocol(row["protocol"].strip()): SampleStats(
                    n=int(row["samples"]), mean=float(row["mean"]), sd=float(row["sd"]), se=float(row["se"])
                )
                for row in rows
            }
        values: dict[Protocol, list[float]] = {}
        raw: dict[Protocol, list[dict[str, float]]] = {}
        if {"protocol", "value"} <= columns:
            for row in rows:
                values.setdefault(Protocol(row["protocol"].strip()), []).append(float(row["value"]))
        elif "protocol" in columns and columns & COUNT_COLUMNS:
            for row in rows:
                protocol = Protocol(row["protocol"].strip())
                counts = {k: float(row[k]) for k in COUNT_COLUMNS if row.get(k) not in (None, "")}
                raw.setdefault(protocol, []).append(counts)
                values.setdefault(protocol, []).append(correlator_from_counts(protocol, counts, trigger_scale))
        else:
            raise InvalidInputError(f"{path}: unrecognised correlator columns {sorted(columns)}")
    except InvalidInputError:
        raise
    except (KeyError, ValueError) as e:
        raise InvalidInputError(f"{path}: {e}") from e
    logger.debug("read %d correlator rows from %s", len(rows), path)
    return CorrelatorSamples(values=values, raw_counts=raw)


def read_loss_file(path: str | Path) -> LossSpec:
    try:
        return LossSpec(**json.loads(_safe_read_text(path)))
    except (json.JSONDecodeError, TypeError, ValueError) as e:
        raise InvalidInputError(f"{path}: {e}") from e
