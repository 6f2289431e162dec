"""Plain-text vertex/facet files and the JSON class summary."""

from __future__ import annotations

import json
import re
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Iterable

import numpy as np

from bellpoly.scenario import Inequality, Scenario
from bellpoly.symmetry import Orbit, is_positivity_class

HEADER = "scenario:"


@contextmanager
def _open_out(path):
    if path is None or str(path) == "-":
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _write_rows(fh: IO[str], scenario: Scenario, rows: Iterable, chunk: int) -> int:
    fh.write(f"{HEADER} {scenario}\n")
    count = 0
    buf = []
    for row in rows:
        buf.append(" ".join(str(int(x)) for x in row))
        count += 1
        if len(buf) >= chunk:
            fh.write("\n".join(buf) + "\n")
            buf.clear()
    if buf:
        fh.write("\n".join(buf) + "\n")
    return count


def write_vertices(path, scenario: Scenario, vertices) -> int:
    with _open_out(path) as fh:
        return _write_rows(fh, scenario, np.asarray(vertices).tolist(), chunk=1 << 16)


def write_facets(path, scenario: Scenario, facets, stream_threshold: int = 10_000) -> int:
    """Write facets sorted lexicographically.

    Lists longer than ``stream_threshold`` are flushed in blocks of that
    many lines instead of being joined into one string.
    """
    rows = sorted(tuple(int(x) for x in f) for f in facets)
    with _open_out(path) as fh:
        return _write_rows(fh, scenario, rows, chunk=max(1, stream_threshold))


def _read_rows(path) -> tuple[Scenario, list[tuple[int, ...]]]:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith(HEADER):
        raise ValueError(f"{path}: missing '{HEADER} ...' header")
    scenario = Scenario.parse(lines[0][len(HEADER):])
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        row = tuple(int(tok) for tok in line.split())
        if len(row) != scenario.size:
            raise ValueError(f"{path}:{lineno}: expected {scenario.size} integers, got {len(row)}")
        rows.append(row)
    return scenario, rows


def read_vertices(path) -> tuple[Scenario, np.ndarray]:
    scenario, rows = _read_rows(path)
    return scenario, np.array(rows, dtype=np.int64)


def read_facets(path) -> tuple[Scenario, list[Inequality]]:
    return _read_rows(path)


def class_summary(orbits: list[Orbit], scenario: Scenario) -> list[dict]:
    """Orbit records sorted by (size, representative)."""
    records = [
        {
            "representative": list(o.representative),
            "size": o.size,
            "stabilizer_order": o.stabilizer_order,
            "is_positivity": is_positivity_class(o, scenario),
        }
        for o in orbits
    ]
    return sorted(records, key=lambda r: (r["size"], r["representative"]))


_FLAT_ARRAY = re.compile(r"\[\s*([^\[\]{}]*?)\s*\]")


def dumps(payload) -> str:
    """Indented JSON with arrays of scalars kept on one line."""
    text = json.dumps(payload, indent=2)
    return _FLAT_ARRAY.sub(lambda m: "[" + " ".join(m.group(1).split()) + "]", text)


def write_json(path, payload) -> None:
    with _open_out(path) as fh:
        fh.write(dumps(payload) + "\n")


def parse_inequality(text: str) -> tuple[Scenario, Inequality]:
    """Inline JSON tensor, e.g. ``[[2,0,0],[0,-1,-1],[0,-1,1]]``, for a two-site scenario."""
    data = np.asarray(json.loads(text))
    if data.ndim != 2 or min(data.shape) < 2:
        raise ValueError("inline inequality must be a 2-d tensor with at least 2 rows and columns")
    if not np.all(data == np.round(data)):
        raise ValueError("inequality coefficients must be integers")
    scenario = Scenario(tuple(k - 1 for k in data.shape))
    return scenario, tuple(int(x) for x in data.ravel())
