"""Dempster's rule, conditioning, vacuous extension and Moebius inversion."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import (
    CapacityError,
    EmptyLabel,
    EvidenceError,
    FrameMismatch,
    NotABeliefFunction,
    NotAProductExtension,
    TotalConflict,
    UnsupportedMode,
)
from .frame import STRICT, Frame, MassFunction, Subset, rational_str

MAX_MOBIUS_FRAME = 16


@dataclass(frozen=True)
class CombinationResult:
    """Outcome of Dempster's rule.

    ``conflict_mass`` is the product mass that fell on the empty set before
    normalization and ``normalization_constant`` is ``1 / (1 - conflict)``.
    """

    combined: MassFunction
    conflict_mass: Fraction
    normalization_constant: Fraction

    def to_dict(self) -> dict:
        d = self.combined.to_dict()
        d["conflict"] = rational_str(self.conflict_mass)
        d["c"] = rational_str(self.normalization_constant)
        return d

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _require_strict(*masses: MassFunction) -> None:
    for m in masses:
        if m.mode != STRICT:
            raise UnsupportedMode("Dempster's rule is only defined here for strict (nonnegative) masses")


def dempster_combine(m1: MassFunction, m2: MassFunction) -> CombinationResult:
    if m1.frame != m2.frame:
        raise FrameMismatch("cannot combine mass functions on different frames")
    _require_strict(m1, m2)
    acc: dict[int, Fraction] = {}
    conflict = Fraction(0)
    for b, vb in m1.focals.items():
        for c, vc in m2.focals.items():
            inter = b.bits & c.bits
            if inter:
                acc[inter] = acc.get(inter, Fraction(0)) + vb * vc
            else:
                conflict += vb * vc
    if conflict == 1:
        raise TotalConflict(conflict)
    k = 1 / (1 - conflict)
    frame = m1.frame
    combined = MassFunction(frame, [(Subset(frame, b), v * k) for b, v in acc.items()])
    return CombinationResult(combined, conflict, k)


def simple_support(frame: Frame, label: Subset) -> MassFunction:
    if label.frame != frame:
        raise FrameMismatch(f"{label!r} is not on {frame!r}")
    if not label:
        raise EmptyLabel("a simple support function needs a nonempty focal set")
    return MassFunction(frame, [(label, 1)])


def condition(m: MassFunction, on: Subset) -> CombinationResult:
    """Dempster conditioning: combine with the simple support on ``on``."""
    return dempster_combine(m, simple_support(m.frame, on))


def _product_axis(source: Frame, target: Frame, axis: int | None) -> int:
    elements = target.elements
    if not all(isinstance(e, tuple) for e in elements):
        raise NotAProductExtension(f"{target!r} is not a product frame")
    arity = {len(e) for e in elements}
    if len(arity) != 1:
        raise NotAProductExtension("product frame elements have mixed arity")
    (arity,) = arity
    wanted = set(source.elements)
    axes = [i for i in range(arity) if {e[i] for e in elements} == wanted]
    if axis is not None:
        if axis not in axes:
            raise NotAProductExtension(f"coordinate {axis} of {target!r} does not range over {source!r}")
        return axis
    if len(axes) != 1:
        raise NotAProductExtension(
            f"{len(axes)} coordinates of the target range over the source frame; pass axis explicitly"
        )
    return axes[0]


def vacuous_extension(m: MassFunction, target: Frame, axis: int | None = None) -> MassFunction:
    """Map every focal set to its cylinder in ``target``, keeping masses.

    ``target`` must be a product frame with one coordinate ranging exactly
    over ``m.frame``; ``axis`` selects it when more than one does.
    """
    axis = _product_axis(m.frame, target, axis)
    source = m.frame
    # bits of the cylinder over each source element
    cylinder = [0] * len(source)
    for j, e in enumerate(target.elements):
        cylinder[source.index(e[axis])] |= 1 << j
    pairs = []
    for focal, v in m.focals.items():
        bits = 0
        for i in range(len(source)):
            if focal.bits >> i & 1:
                bits |= cylinder[i]
        pairs.append((Subset(target, bits), v))
    return MassFunction(target, pairs, m.mode)


def cylinder(subset: Subset, target: Frame, axis: int | None = None) -> Subset:
    axis = _product_axis(subset.frame, target, axis)
    return target.subset(e for e in target.elements if e[axis] in subset)


def mass_from_belief(frame: Frame, bel_values: Mapping[Subset, Fraction], mode: str = STRICT) -> MassFunction:
    """Recover masses from a belief table by Moebius inversion.

    Raises :class:`NotABeliefFunction` when the inverted assignment fails
    validation, so this doubles as a check that an arbitrary table of lower
    probabilities is a belief function.
    """
    n = len(frame)
    if n > MAX_MOBIUS_FRAME:
        raise CapacityError(f"Moebius inversion is limited to {MAX_MOBIUS_FRAME} elements, frame has {n}")
    size = 1 << n
    table: list[Fraction | None] = [None] * size
    for s, v in bel_values.items():
        if s.frame != frame:
            raise FrameMismatch(f"{s!r} is not on {frame!r}")
        table[s.bits] = Fraction(v)
    missing = [b for b in range(size) if table[b] is None]
    if missing:
        raise NotABeliefFunction(f"belief value missing for {Subset(frame, missing[0])!r} and {len(missing) - 1} more")
    m = list(table)
    for i in range(n):
        bit = 1 << i
        for b in range(size):
            if b & bit:
                m[b] -= m[b ^ bit]
    try:
        return MassFunction(frame, [(Subset(frame, b), v) for b, v in enumerate(m) if v != 0 or b == 0], mode)
    except EvidenceError as exc:
        raise NotABeliefFunction(str(exc)) from exc
