"""Domain types and file formats for pointwise sets, pair sets and joint distributions.

File formats (all are inventions of this package, there is no upstream standard):

* point CSV: header ``y,c,a``; one row per test instance.
* pair CSV: header ``a_i,a_j,y_ij,c_ij`` (judgment form) or
  ``a_i,a_j,y_ij,s_i,s_j`` (score form, ``c_ij = sgn(s_i - s_j)``).
* distribution JSON: ``{"name": ..., "cells": {"c=1,y=1,a=1": 0.22, ...}}``
  with all eight ``(c, y, a)`` cells present.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import re
from dataclasses import dataclass, field
from typing import IO, Iterator, Literal

import numpy as np

Mode = Literal["binary", "continuous"]
GroupPair = tuple[int, int]

GROUP_PAIRS: tuple[GroupPair, ...] = ((0, 0), (0, 1), (1, 0), (1, 1))

# Canonical cell order for every 8-vector in the package: index = 4*c + 2*y + a.
CELLS: tuple[tuple[int, int, int], ...] = tuple(itertools.product((0, 1), repeat=3))

SUM_TOLERANCE = 1e-9

POINT_HEADER = ("y", "c", "a")
PAIR_HEADER = ("a_i", "a_j", "y_ij", "c_ij")
PAIR_SCORE_HEADER = ("a_i", "a_j", "y_ij", "s_i", "s_j")


class FormatError(ValueError):
    """Malformed input file. ``row`` is the 1-based data row, when known."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message if row is None else f"row {row}: {message}")


class DistributionError(ValueError):
    pass


def cell_index(c: int, y: int, a: int) -> int:
    return 4 * c + 2 * y + a


def reverse_pair(gp: GroupPair) -> GroupPair:
    return (gp[1], gp[0])


@dataclass(frozen=True)
class LabeledPoint:
    y: float
    c: float
    a: int


def _only(arr: np.ndarray, values) -> bool:
    ok = np.zeros(arr.shape, dtype=bool)
    for v in values:
        ok |= arr == v
    return bool(ok.all())


def _readonly(x, dtype) -> np.ndarray:
    arr = np.array(x, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointSet:
    """Column-stored test set S. Arrays are read-only after construction."""

    y: np.ndarray
    c: np.ndarray
    a: np.ndarray
    mode: Mode = "binary"

    def __post_init__(self):
        dtype = np.int64 if self.mode == "binary" else np.float64
        if self.mode not in ("binary", "continuous"):
            raise ValueError(f"unknown mode {self.mode!r}")
        y, c, a = (np.asarray(v) for v in (self.y, self.c, self.a))
        if not (y.shape == c.shape == a.shape) or y.ndim != 1:
            raise ValueError("y, c, a must be 1-d arrays of equal length")
        if not _only(a, (0, 1)):
            raise ValueError("group attribute must be 0 or 1")
        if self.mode == "binary":
            if not _only(y, (0, 1)):
                raise ValueError("binary mode requires y in {0, 1}")
            if not _only(c, (0, 1)):
                raise ValueError("binary mode requires c in {0, 1}")
        elif not (np.isfinite(y).all() and np.isfinite(c).all()):
            raise ValueError("labels and predictions must be finite")
        object.__setattr__(self, "y", _readonly(y, dtype))
        object.__setattr__(self, "c", _readonly(c, dtype))
        object.__setattr__(self, "a", _readonly(a, np.int64))

    @classmethod
    def from_points(cls, points, mode: Mode = "binary") -> "PointSet":
        points = list(points)
        return cls(
            y=[p.y for p in points], c=[p.c for p in points], a=[p.a for p in points], mode=mode
        )

    def __len__(self) -> int:
        return len(self.y)

    def __iter__(self) -> Iterator[LabeledPoint]:
        for y, c, a in zip(self.y.tolist(), self.c.tolist(), self.a.tolist()):
            yield LabeledPoint(y, c, a)

    @property
    def points(self) -> list[LabeledPoint]:
        return list(self)

    def cell_counts(self) -> np.ndarray:
        """Counts of the eight (c, y, a) cells in canonical order. Binary mode only."""
        if self.mode != "binary":
            raise ValueError("cell counts are defined for binary point sets only")
        return np.bincount(4 * self.c + 2 * self.y + self.a, minlength=8)

    def take(self, idx) -> "PointSet":
        return PointSet(self.y[idx], self.c[idx], self.a[idx], self.mode)


@dataclass(frozen=True)
class JudgedPair:
    a_i: int
    a_j: int
    y_ij: int
    c_ij: int


@dataclass(frozen=True, eq=False)
class PairSet:
    """Comparative judgment test set S_p with the count of discarded truth ties."""

    a_i: np.ndarray
    a_j: np.ndarray
    y_ij: np.ndarray
    c_ij: np.ndarray
    discarded_ties: int = 0

    def __post_init__(self):
        cols = [np.asarray(v) for v in (self.a_i, self.a_j, self.y_ij, self.c_ij)]
        if len({col.shape for col in cols}) != 1 or cols[0].ndim != 1:
            raise ValueError("pair columns must be 1-d arrays of equal length")
        a_i, a_j, y_ij, c_ij = cols
        if not (_only(a_i, (0, 1)) and _only(a_j, (0, 1))):
            raise ValueError("group attributes must be 0 or 1")
        if not _only(y_ij, (-1, 1)):
            raise ValueError("y_ij must be -1 or +1")
        if not _only(c_ij, (-1, 0, 1)):
            raise ValueError("c_ij must be -1, 0 or +1")
        if self.discarded_ties < 0:
            raise ValueError("discarded_ties must be non-negative")
        for name, col in zip(("a_i", "a_j", "y_ij", "c_ij"), cols):
            object.__setattr__(self, name, _readonly(col, np.int64))
        object.__setattr__(self, "discarded_ties", int(self.discarded_ties))

    @classmethod
    def from_pairs(cls, pairs, discarded_ties: int = 0) -> "PairSet":
        pairs = list(pairs)
        return cls(
            [p.a_i for p in pairs],
            [p.a_j for p in pairs],
            [p.y_ij for p in pairs],
            [p.c_ij for p in pairs],
            discarded_ties,
        )

    def __len__(self) -> int:
        return len(self.y_ij)

    def __iter__(self) -> Iterator[JudgedPair]:
        cols = (self.a_i.tolist(), self.a_j.tolist(), self.y_ij.tolist(), self.c_ij.tolist())
        for row in zip(*cols):
            yield JudgedPair(*row)

    @property
    def pairs(self) -> list[JudgedPair]:
        return list(self)

    def reversed(self) -> "PairSet":
        """The same judgments stated in the opposite orientation."""
        return PairSet(self.a_j, self.a_i, -self.y_ij, -self.c_ij, self.discarded_ties)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probability table over (C, Y, A); ``p`` follows the canonical cell order."""

    p: np.ndarray
    name: str = ""
    _checked: bool = field(default=True, repr=False)

    def __post_init__(self):
        p = np.array(self.p, dtype=np.float64)
        if p.shape != (8,):
            raise DistributionError("a joint distribution has exactly 8 cells")
        if self._checked:
            if not np.isfinite(p).all() or (p < 0).any():
                raise DistributionError("cell probabilities must be finite and non-negative")
            total = p.sum()
            if abs(total - 1.0) > SUM_TOLERANCE:
                raise DistributionError(f"cells sum to {total!r}, not 1")
            marg = p[:4] + p[4:]  # index 2*y + a
            for y, a in itertools.product((0, 1), repeat=2):
                if marg[2 * y + a] <= 0:
                    raise DistributionError(f"P(Y={y}, A={a}) must be positive")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def from_cells(cls, cells: dict[tuple[int, int, int], float], name: str = "") -> "JointDistribution":
        missing = [k for k in CELLS if k not in cells]
        if missing:
            raise DistributionError(f"missing cells {missing}")
        return cls(np.array([cells[k] for k in CELLS]), name)

    @classmethod
    def unchecked(cls, p, name: str = "") -> "JointDistribution":
        """Skip validation. Meant for tests that need degenerate tables."""
        return cls(p, name, _checked=False)

    def cell(self, c: int, y: int, a: int) -> float:
        return float(self.p[cell_index(c, y, a)])

    @property
    def cells(self) -> dict[tuple[int, int, int], float]:
        return {k: float(v) for k, v in zip(CELLS, self.p)}

    def marginal(self, y: int, a: int) -> float:
        """P(Y=y, A=a)."""
        return self.cell(0, y, a) + self.cell(1, y, a)


def _reference(name, v111, v011, v101, v001, v110, v010, v100, v000):
    return JointDistribution.from_cells(
        {
            (1, 1, 1): v111, (0, 1, 1): v011, (1, 0, 1): v101, (0, 0, 1): v001,
            (1, 1, 0): v110, (0, 1, 0): v010, (1, 0, 0): v100, (0, 0, 0): v000,
        },
        name,
    )


# The four simulated classifiers. f_theta0 satisfies separation, the rest violate it.
REFERENCE_DISTRIBUTIONS: dict[str, JointDistribution] = {
    "f_theta0": _reference("f_theta0", 0.220, 0.055, 0.090, 0.135, 0.180, 0.045, 0.110, 0.165),
    "f_theta1": _reference("f_theta1", 0.220, 0.055, 0.081, 0.144, 0.180, 0.045, 0.121, 0.154),
    "f_theta2": _reference("f_theta2", 0.231, 0.044, 0.081, 0.144, 0.171, 0.054, 0.121, 0.154),
    "f_theta3": _reference("f_theta3", 0.230, 0.045, 0.105, 0.120, 0.200, 0.025, 0.100, 0.175),
}


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------


def _as_text(source) -> str:
    if isinstance(source, str):
        return source
    return source.read()


def _read_rows(source, name: str) -> tuple[list[str], list[tuple[int, list[str]]]]:
    text = _as_text(source)
    if not text.strip():
        raise FormatError(f"empty file: no {name} header")
    reader = csv.reader(io.StringIO(text))
    header = [h.strip() for h in next(reader)]
    rows = [(i, r) for i, r in enumerate(reader, start=1) if any(cell.strip() for cell in r)]
    return header, rows


def _number(cell: str, row: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise FormatError(f"non-numeric {column} value {cell!r}", row) from None
    if not math.isfinite(value):
        raise FormatError(f"non-finite {column} value {cell!r}", row)
    return value


def _binary(value: float, row: int, column: str, allowed=(0, 1)) -> int:
    if value not in allowed:
        label = {"c": "prediction", "y": "label", "a": "group"}.get(column, column)
        raise FormatError(f"non-binary {label} {value:g}", row)
    return int(value)


def load_point_set(source: str | IO[str], mode: Mode = "binary") -> PointSet:
    """Parse a ``y,c,a`` CSV (text or open stream) into a validated PointSet."""
    header, rows = _read_rows(source, "y,c,a")
    if tuple(header) != POINT_HEADER:
        raise FormatError(f"expected header y,c,a, got {','.join(header)}")
    if not rows:
        raise FormatError("empty file: header without data rows")
    ys, cs, as_ = [], [], []
    for i, r in rows:
        if len(r) != 3:
            raise FormatError(f"expected 3 cells, got {len(r)}", i)
        y, c, a = (_number(cell, i, col) for cell, col in zip(r, POINT_HEADER))
        if a not in (0, 1):
            raise FormatError(f"unknown group value {a:g}", i)
        if mode == "binary":
            y, c = _binary(y, i, "y"), _binary(c, i, "c")
        ys.append(y)
        cs.append(c)
        as_.append(int(a))
    return PointSet(ys, cs, as_, mode)


def load_pair_set(source: str | IO[str]) -> PairSet:
    """Parse a pair CSV in judgment or score form.

    Rows with ``y_ij = 0`` are rejected: a pair file holds decided judgments only.
    """
    header, rows = _read_rows(source, "pair")
    if tuple(header) == PAIR_HEADER:
        score_form = False
    elif tuple(header) == PAIR_SCORE_HEADER:
        score_form = True
    else:
        raise FormatError(
            f"expected header {','.join(PAIR_HEADER)} or {','.join(PAIR_SCORE_HEADER)}, "
            f"got {','.join(header)}"
        )
    if not rows:
        raise FormatError("empty file: header without data rows")
    width = len(header)
    out = []
    for i, r in rows:
        if len(r) != width:
            raise FormatError(f"expected {width} cells, got {len(r)}", i)
        vals = [_number(cell, i, col) for cell, col in zip(r, header)]
        a_i, a_j = (_binary(v, i, col) for v, col in zip(vals[:2], ("a_i", "a_j")))
        if vals[2] == 0:
            raise FormatError("y_ij = 0 not allowed (tied judgments are not stored)", i)
        y_ij = _binary(vals[2], i, "y_ij", allowed=(-1, 1))
        if score_form:
            c_ij = int(np.sign(vals[3] - vals[4]))
        else:
            c_ij = _binary(vals[3], i, "c_ij", allowed=(-1, 0, 1))
        out.append(JudgedPair(a_i, a_j, y_ij, c_ij))
    return PairSet.from_pairs(out)


_CELL_KEY = re.compile(r"^\s*c\s*=\s*([01])\s*,\s*y\s*=\s*([01])\s*,\s*a\s*=\s*([01])\s*$")


def load_distribution(source: str | IO[str]) -> JointDistribution:
    text = _as_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise FormatError(f"distribution file is not valid JSON: {err}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), dict):
        raise FormatError('distribution file needs a "cells" object')
    cells: dict[tuple[int, int, int], float] = {}
    for key, value in doc["cells"].items():
        m = _CELL_KEY.match(key)
        if not m:
            raise FormatError(f"bad cell key {key!r}; expected 'c=<0|1>,y=<0|1>,a=<0|1>'")
        k = tuple(int(g) for g in m.groups())
        if k in cells:
            raise FormatError(f"duplicate cell {key!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError(f"cell {key!r} is not a number")
        cells[k] = float(value)
    return JointDistribution.from_cells(cells, name=str(doc.get("name", "")))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _fmt(v) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def dump_point_set(s: PointSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POINT_HEADER)
    for p in s:
        w.writerow([_fmt(p.y), _fmt(p.c), p.a])
    return buf.getvalue()


def dump_pair_set(sp: PairSet) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PAIR_HEADER)
    for p in sp:
        w.writerow([p.a_i, p.a_j, p.y_ij, p.c_ij])
    return buf.getvalue()


def dump_distribution(d: JointDistribution) -> str:
    # same row order as the reference table: a, then y, then c, all descending
    order = sorted(CELLS, key=lambda k: (k[2], k[1], k[0]), reverse=True)
    cells = {f"c={c},y={y},a={a}": d.cell(c, y, a) for c, y, a in order}
    return json.dumps({"name": d.name, "cells": cells}, indent=2) + "\n"
