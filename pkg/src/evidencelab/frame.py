"""Frames of discernment, bitmask subsets and exact mass functions.

A :class:`Frame` fixes an order on its elements; element ``i`` is bit ``i``
of every :class:`Subset` built on it. All masses are
:class:`fractions.Fraction` values, so belief, plausibility and commonality
are reproduced exactly.
"""

from __future__ import annotations

import itertools
import json
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping

from .errors import (
    CapacityError,
    EmptyFocal,
    FormatError,
    FrameMismatch,
    NegativeBelief,
    NegativeMass,
    NotNormalized,
)

MAX_FRAME_SIZE = 24

STRICT = "strict"
GENERALIZED = "generalized"
MODES = (STRICT, GENERALIZED)


class Frame:
    """A finite ordered set of distinct elements.

    Elements are hashable identifiers, usually strings; product frames use
    tuples of strings.
    """

    __slots__ = ("elements", "_index", "_hash")

    def __init__(self, elements: Iterable[Any]):
        elements = tuple(elements)
        if not elements:
            raise ValueError("a frame needs at least one element")
        if len(elements) > MAX_FRAME_SIZE:
            raise CapacityError(f"frame has {len(elements)} elements, limit is {MAX_FRAME_SIZE}")
        index = {e: i for i, e in enumerate(elements)}
        if len(index) != len(elements):
            raise ValueError("frame elements must be distinct")
        self.elements = elements
        self._index = index
        self._hash = hash(elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.elements)

    def __contains__(self, element) -> bool:
        return element in self._index

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, Frame) and self.elements == other.elements

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Frame({list(self.elements)!r})"

    def index(self, element) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise KeyError(f"{element!r} is not an element of {self!r}") from None

    @property
    def full_mask(self) -> int:
        return (1 << len(self.elements)) - 1

    def subset(self, elements: Iterable[Any] = ()) -> Subset:
        bits = 0
        for e in elements:
            bits |= 1 << self.index(e)
        return Subset(self, bits)

    def from_bits(self, bits: int) -> Subset:
        return Subset(self, bits)

    def singleton(self, element) -> Subset:
        return Subset(self, 1 << self.index(element))

    @property
    def full(self) -> Subset:
        return Subset(self, self.full_mask)

    @property
    def empty(self) -> Subset:
        return Subset(self, 0)

    def singletons(self) -> list[Subset]:
        return [Subset(self, 1 << i) for i in range(len(self.elements))]

    def subsets(self, nonempty: bool = False) -> Iterator[Subset]:
        """All subsets ordered by cardinality, then by element positions."""
        n = len(self.elements)
        for k in range(1 if nonempty else 0, n + 1):
            for combo in itertools.combinations(range(n), k):
                yield Subset(self, sum(1 << i for i in combo))


def product_frame(*frames: Frame) -> Frame:
    """Frame whose elements are the tuples of the Cartesian product."""
    return Frame(itertools.product(*(f.elements for f in frames)))


class Subset:
    """A subset of a frame, stored as a characteristic bit vector."""

    __slots__ = ("frame", "bits")

    def __init__(self, frame: Frame, bits: int):
        if bits < 0 or bits > frame.full_mask:
            raise ValueError(f"bit vector {bits:#x} out of range for {frame!r}")
        self.frame = frame
        self.bits = bits

    def _same_frame(self, other: Subset) -> None:
        if not isinstance(other, Subset):
            raise TypeError(f"expected Subset, got {type(other).__name__}")
        if other.frame != self.frame:
            raise FrameMismatch("subsets live on different frames")

    def __eq__(self, other) -> bool:
        return isinstance(other, Subset) and self.bits == other.bits and self.frame == other.frame

    def __hash__(self) -> int:
        return hash((self.frame, self.bits))

    def __and__(self, other: Subset) -> Subset:
        self._same_frame(other)
        return Subset(self.frame, self.bits & other.bits)

    def __or__(self, other: Subset) -> Subset:
        self._same_frame(other)
        return Subset(self.frame, self.bits | other.bits)

    def __sub__(self, other: Subset) -> Subset:
        self._same_frame(other)
        return Subset(self.frame, self.bits & ~other.bits)

    def __invert__(self) -> Subset:
        return Subset(self.frame, self.frame.full_mask & ~self.bits)

    def __le__(self, other: Subset) -> bool:
        self._same_frame(other)
        return self.bits & ~other.bits == 0

    def __ge__(self, other: Subset) -> bool:
        return other <= self

    def __lt__(self, other: Subset) -> bool:
        return self <= other and self.bits != other.bits

    def __gt__(self, other: Subset) -> bool:
        return other < self

    def __bool__(self) -> bool:
        return self.bits != 0

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __iter__(self) -> Iterator[Any]:
        bits = self.bits
        for i, e in enumerate(self.frame.elements):
            if bits >> i & 1:
                yield e

    def __contains__(self, element) -> bool:
        return element in self.frame and bool(self.bits >> self.frame.index(element) & 1)

    def isdisjoint(self, other: Subset) -> bool:
        self._same_frame(other)
        return self.bits & other.bits == 0

    @property
    def elements(self) -> list[Any]:
        return list(self)

    def sort_key(self) -> tuple:
        return (len(self), [i for i in range(len(self.frame)) if self.bits >> i & 1])

    def __repr__(self) -> str:
        return "{" + ",".join(_element_label(e) for e in self) + "}"


def _element_label(e) -> str:
    if isinstance(e, tuple):
        return "(" + ",".join(_element_label(x) for x in e) + ")"
    return str(e)


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, decimal strings and ``"n/d"`` strings.

    Floats are rejected: they would smuggle binary rounding into exact
    computations.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not masses")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"not a rational number: {value!r}") from None
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def rational_str(value: Fraction) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int = 4) -> str:
    """Round for display only; never fed back into computation."""
    value = Fraction(value)
    d = Decimal(value.numerator) / Decimal(value.denominator) if value.denominator != 1 else Decimal(value.numerator)
    return str(d.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_UP))


class MassFunction:
    """A validated basic probability assignment over a frame.

    Only nonzero masses are stored. Instances are immutable; use
    :func:`make_mass` or the class constructor, which validates.
    """

    __slots__ = ("frame", "focals", "mode")

    def __init__(self, frame: Frame, assignments, mode: str = STRICT):
        if mode not in MODES:
            raise ValueError(f"unknown validation mode {mode!r}")
        if isinstance(assignments, Mapping):
            assignments = assignments.items()
        acc: dict[int, Fraction] = {}
        for subset, mass in assignments:
            if not isinstance(subset, Subset):
                raise TypeError(f"expected Subset, got {type(subset).__name__}")
            if subset.frame != frame:
                raise FrameMismatch(f"subset {subset!r} is not on {frame!r}")
            acc[subset.bits] = acc.get(subset.bits, Fraction(0)) + as_fraction(mass)
        _validate(frame, acc, mode)
        ordered = sorted(
            ((Subset(frame, b), v) for b, v in acc.items() if v != 0), key=lambda kv: kv[0].sort_key()
        )
        self.frame = frame
        self.focals = MappingProxyType(dict(ordered))
        self.mode = mode

    @classmethod
    def vacuous(cls, frame: Frame) -> MassFunction:
        return cls(frame, [(frame.full, 1)])

    def mass(self, subset: Subset) -> Fraction:
        self._check(subset)
        return self.focals.get(subset, Fraction(0))

    __getitem__ = mass

    def _check(self, subset: Subset) -> None:
        if not isinstance(subset, Subset):
            raise TypeError(f"expected Subset, got {type(subset).__name__}")
        if subset.frame != self.frame:
            raise FrameMismatch(f"subset {subset!r} is not on {self.frame!r}")

    def belief(self, subset: Subset) -> Fraction:
        self._check(subset)
        outside = ~subset.bits
        return sum((v for f, v in self.focals.items() if f.bits & outside == 0), Fraction(0))

    def plausibility(self, subset: Subset) -> Fraction:
        self._check(subset)
        return 1 - self.belief(~subset)

    def commonality(self, subset: Subset) -> Fraction:
        self._check(subset)
        bits = subset.bits
        return sum((v for f, v in self.focals.items() if f.bits & bits == bits), Fraction(0))

    @property
    def is_vacuous(self) -> bool:
        return len(self.focals) == 1 and self.frame.full in self.focals

    def __eq__(self, other) -> bool:
        return isinstance(other, MassFunction) and self.frame == other.frame and dict(self.focals) == dict(other.focals)

    def __hash__(self) -> int:
        return hash((self.frame, frozenset(self.focals.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{s!r}: {v}" for s, v in self.focals.items())
        return f"MassFunction({{{body}}})"

    def to_dict(self) -> dict:
        return {
            "frame": [_jsonable(e) for e in self.frame.elements],
            "focals": [{"set": [_jsonable(e) for e in s], "mass": rational_str(v)} for s, v in self.focals.items()],
            "mode": self.mode,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping) -> MassFunction:
        try:
            frame = Frame(_element(e) for e in data["frame"])
            mode = data.get("mode", STRICT)
            pairs = [(frame.subset(_element(e) for e in f["set"]), as_fraction(f["mass"])) for f in data["focals"]]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed mass function JSON: {exc}") from None
        return cls(frame, pairs, mode)

    @classmethod
    def from_json(cls, text: str) -> MassFunction:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


def _jsonable(e):
    return list(map(_jsonable, e)) if isinstance(e, tuple) else e


def _element(e):
    return tuple(map(_element, e)) if isinstance(e, list) else e


def _validate(frame: Frame, masses: dict[int, Fraction], mode: str) -> None:
    if masses.get(0, 0) != 0:
        raise EmptyFocal(f"mass on the empty set is {masses[0]}")
    if mode == STRICT:
        negative = [b for b, v in masses.items() if v < 0]
        if negative:
            raise NegativeMass(f"negative mass on {Subset(frame, negative[0])!r}")
        total = sum(masses.values(), Fraction(0))
        if total != 1:
            raise NotNormalized(f"masses sum to {total}, not 1")
        return
    total = sum((abs(v) for v in masses.values()), Fraction(0))
    if total != 1:
        raise NotNormalized(f"absolute masses sum to {total}, not 1")
    if any(v < 0 for v in masses.values()):
        # nonnegativity of every superset sum, taken over all 2^n subsets
        q = commonality_vector(frame, masses)
        for bits, value in enumerate(q):
            if value < 0:
                raise NegativeBelief(f"sum of masses over supersets of {Subset(frame, bits)!r} is {value}")


def commonality_vector(frame: Frame, masses: Mapping[int, Fraction]) -> list[Fraction]:
    """Superset sums for every bitmask, by the fast zeta transform."""
    n = len(frame)
    q = [Fraction(0)] * (1 << n)
    for b, v in masses.items():
        q[b] += v
    for i in range(n):
        bit = 1 << i
        for b in range(1 << n):
            if not b & bit:
                q[b] += q[b | bit]
    return q


def belief_vector(frame: Frame, masses: Mapping[int, Fraction]) -> list[Fraction]:
    """Subset sums for every bitmask, by the fast zeta transform."""
    n = len(frame)
    bel = [Fraction(0)] * (1 << n)
    for b, v in masses.items():
        bel[b] += v
    for i in range(n):
        bit = 1 << i
        for b in range(1 << n):
            if b & bit:
                bel[b] += bel[b ^ bit]
    return bel


def make_mass(frame: Frame, assignments, mode: str = STRICT) -> MassFunction:
    """Validate and build a mass function; duplicate subsets are summed."""
    return MassFunction(frame, assignments, mode)


def belief(m: MassFunction, subset: Subset) -> Fraction:
    return m.belief(subset)


def plausibility(m: MassFunction, subset: Subset) -> Fraction:
    return m.plausibility(subset)


def commonality(m: MassFunction, subset: Subset) -> Fraction:
    return m.commonality(subset)
