"""Compatibility mappings built from tabular data.

A record's observable value is mapped to the set of target values that
co-occur with it anywhere in the table; relative frequencies of these sets
give a mass function. :class:`GammaEstimator` exposes the same construction
through the scikit-learn estimator API.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .combination import dempster_combine
from .errors import (
    EmptyDataset,
    FormatError,
    FrameMismatch,
    NoSurvivors,
    RowMismatch,
    TotalConflict,
    UnknownAttribute,
)
from .frame import Frame, MassFunction, Subset


@dataclass(frozen=True)
class DatasetTable:
    """Rectangular table of string-valued records.

    Row indices used throughout this module are 1-based.
    """

    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if len(set(self.columns)) != len(self.columns):
            raise FormatError("duplicate column names")
        for i, row in enumerate(self.rows, 1):
            if len(row) != len(self.columns):
                raise FormatError(f"row {i} has {len(row)} cells, expected {len(self.columns)}")
            if any(cell is None or cell == "" for cell in row):
                raise FormatError(f"row {i} has a missing value")

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> list[str]:
        try:
            j = self.columns.index(name)
        except ValueError:
            raise UnknownAttribute(f"no attribute named {name!r}") from None
        return [row[j] for row in self.rows]

    def value(self, row_index: int, name: str) -> str:
        return self.column(name)[row_index - 1]

    @classmethod
    def from_csv(cls, source: str | Path | io.TextIOBase) -> DatasetTable:
        if isinstance(source, (str, Path)):
            with open(source, newline="", encoding="utf-8") as fh:
                return cls.from_csv(fh)
        reader = csv.reader(source)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("CSV input is empty") from None
        rows = [r for r in reader if r]
        return cls(tuple(h.strip() for h in header), tuple(tuple(c.strip() for c in r) for r in rows))

    @classmethod
    def from_csv_text(cls, text: str) -> DatasetTable:
        return cls.from_csv(io.StringIO(text))


@dataclass(frozen=True)
class GammaMapping:
    observable: str
    target: str
    target_domain: Frame
    mapping: Mapping[str, Subset]
    per_row: Mapping[int, Subset] = field(repr=False)

    @property
    def rows(self) -> tuple[int, ...]:
        return tuple(self.per_row)


def build_gamma(
    data: DatasetTable, observable: str, target: str, domain: Frame | None = None
) -> GammaMapping:
    """Map each observable value to the target values seen with it.

    The target frame defaults to the distinct target values in order of
    first appearance.
    """
    obs = data.column(observable)
    tgt = data.column(target)
    if not data.rows:
        raise EmptyDataset("dataset has no rows")
    if domain is None:
        domain = Frame(dict.fromkeys(tgt))
    mapping: dict[str, Subset] = {}
    for a, d in zip(obs, tgt):
        single = domain.singleton(d)
        mapping[a] = mapping[a] | single if a in mapping else single
    per_row = {i: mapping[a] for i, a in enumerate(obs, 1)}
    return GammaMapping(observable, target, domain, mapping, per_row)


def bpa_from_gamma(g: GammaMapping) -> MassFunction:
    """Relative frequency of each compatibility set over the mapped rows."""
    counts = Counter(g.per_row.values())
    n = len(g.per_row)
    return MassFunction(g.target_domain, [(s, Fraction(c, n)) for s, c in counts.items()])


def condition_gamma(g: GammaMapping, on: Subset) -> tuple[GammaMapping, tuple[int, ...]]:
    """Keep rows whose set meets ``on`` and intersect their sets with it."""
    if on.frame != g.target_domain:
        raise FrameMismatch(f"{on!r} is not on the target frame")
    if not on:
        raise NoSurvivors("conditioning on the empty set discards every row")
    per_row = {i: s & on for i, s in g.per_row.items() if not s.isdisjoint(on)}
    if not per_row:
        raise NoSurvivors(f"every row conflicts with {on!r}")
    mapping = {a: s & on for a, s in g.mapping.items() if not s.isdisjoint(on)}
    return GammaMapping(g.observable, g.target, g.target_domain, mapping, per_row), tuple(per_row)


def audit_honesty(g: GammaMapping, data: DatasetTable) -> list[int]:
    """Rows whose recorded target value lies outside their mapped set."""
    truth = data.column(g.target)
    bad = []
    for i, s in g.per_row.items():
        if not 1 <= i <= len(truth):
            raise RowMismatch(f"row {i} does not exist in the dataset")
        if truth[i - 1] not in s:
            bad.append(i)
    return bad


def intersect_gammas(g1: GammaMapping, g2: GammaMapping) -> GammaMapping:
    """Pointwise intersection; rows with an empty intersection are dropped."""
    if g1.target_domain != g2.target_domain:
        raise FrameMismatch("mappings predict different target frames")
    if set(g1.per_row) != set(g2.per_row):
        raise RowMismatch("mappings are defined on different rows")
    per_row = {i: g1.per_row[i] & g2.per_row[i] for i in g1.per_row}
    per_row = {i: s for i, s in per_row.items() if s}
    mapping = {f"{g1.observable}={i}": s for i, s in per_row.items()}
    return GammaMapping(f"{g1.observable}&{g2.observable}", g1.target, g1.target_domain, mapping, per_row)


@dataclass(frozen=True)
class IndependenceReport:
    joint: dict[tuple[Subset, Subset], Fraction]
    marginal1: dict[Subset, Fraction]
    marginal2: dict[Subset, Fraction]
    independent: bool
    vacuous1: bool
    vacuous2: bool
    combined_equals_intersection: bool
    # independent => at least one side vacuous
    claim_holds: bool


def independence_report(g1: GammaMapping, g2: GammaMapping) -> IndependenceReport:
    if set(g1.per_row) != set(g2.per_row):
        raise RowMismatch("mappings are defined on different rows")
    if g1.target_domain != g2.target_domain:
        raise FrameMismatch("mappings predict different target frames")
    n = len(g1.per_row)
    pairs = Counter((g1.per_row[i], g2.per_row[i]) for i in g1.per_row)
    joint = {k: Fraction(c, n) for k, c in pairs.items()}
    marg1 = {k: Fraction(c, n) for k, c in Counter(g1.per_row.values()).items()}
    marg2 = {k: Fraction(c, n) for k, c in Counter(g2.per_row.values()).items()}
    independent = all(joint.get((a, b), 0) == pa * pb for a, pa in marg1.items() for b, pb in marg2.items())
    m1, m2 = bpa_from_gamma(g1), bpa_from_gamma(g2)
    try:
        combined = dempster_combine(m1, m2).combined
        inter = intersect_gammas(g1, g2)
        equal = bool(inter.per_row) and bpa_from_gamma(inter) == combined
    except TotalConflict:
        equal = False
    v1, v2 = m1.is_vacuous, m2.is_vacuous
    return IndependenceReport(
        joint, marg1, marg2, independent, v1, v2, equal, claim_holds=not independent or v1 or v2
    )


class GammaEstimator(TransformerMixin, BaseEstimator):
    """Learn a compatibility mapping from (observable, target) samples.

    ``fit(X, y)`` takes a single observable column ``X`` and the target
    values ``y``. ``transform`` returns the 0/1 indicator matrix of each
    sample's compatibility set over ``classes_``; ``predict_sets`` returns
    the sets themselves and ``mass_`` holds the empirical mass function of
    the training rows.

    Parameters
    ----------
    domain : sequence, optional
        Target frame to use; defaults to the target values in order of
        first appearance.
    """

    def __init__(self, domain: Sequence[Any] | None = None):
        self.domain = domain

    def _column(self, X) -> list:
        arr = np.asarray(X, dtype=object)
        if arr.ndim == 2:
            if arr.shape[1] != 1:
                raise ValueError(f"expected a single observable column, got {arr.shape[1]}")
            arr = arr[:, 0]
        elif arr.ndim != 1:
            raise ValueError(f"expected 1-d or single-column 2-d input, got {arr.ndim} dimensions")
        return [str(v) for v in arr]

    def fit(self, X, y):
        obs = self._column(X)
        tgt = [str(v) for v in np.asarray(y, dtype=object).ravel()]
        if len(obs) != len(tgt):
            raise ValueError(f"X has {len(obs)} samples but y has {len(tgt)}")
        if not obs:
            raise EmptyDataset("cannot fit on zero samples")
        data = DatasetTable(("X", "y"), tuple(zip(obs, tgt)))
        domain = Frame(self.domain) if self.domain is not None else None
        self.gamma_ = build_gamma(data, "X", "y", domain)
        self.classes_ = np.array(self.gamma_.target_domain.elements, dtype=object)
        self.mass_ = bpa_from_gamma(self.gamma_)
        self.n_features_in_ = 1
        return self

    def predict_sets(self, X) -> list[Subset]:
        check_is_fitted(self, "gamma_")
        mapping = self.gamma_.mapping
        out = []
        for v in self._column(X):
            if v not in mapping:
                raise ValueError(f"observable value {v!r} was not seen during fit")
            out.append(mapping[v])
        return out

    def transform(self, X) -> np.ndarray:
        sets = self.predict_sets(X)
        n = len(self.classes_)
        return np.array([[s.bits >> i & 1 for i in range(n)] for s in sets], dtype=np.int8).reshape(len(sets), n)
