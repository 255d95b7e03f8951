"""Weighted populations with set-valued attributes, labelings and labeling processes.

Every object carries a nonempty true value ``V`` (a subset of the frame).
The measurement method answers ``M(obj, A) = A & V != {}``; a labeling ``l``
restricts it to ``M_l(obj, A) = M(obj, A & l(obj))``. Objects with an empty
label are outside the population. Population-level mass, belief and
plausibility are weighted relative frequencies over the labelled objects.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .combination import CombinationResult, condition, dempster_combine
from .errors import (
    CapacityExceeded,
    DiscardedObject,
    EmptyLabel,
    EmptyPopulation,
    FormatError,
    FrameMismatch,
    InadmissibleLabel,
    InvalidProcess,
    TotalConflict,
    UnknownObject,
)
from .frame import Frame, MassFunction, Subset, as_fraction, belief_vector, rational_str

MAX_EXACT_OUTCOMES = 10**6
MC_BLOCK = 1024


@dataclass(frozen=True)
class PopObject:
    id: str
    value: Subset
    weight: Fraction = Fraction(1)


class PopulationSpec:
    """An immutable weighted population over a frame.

    Weights are positive rationals and need not sum to one.
    """

    def __init__(self, frame: Frame, objects: Iterable[PopObject | tuple]):
        objs = []
        for o in objects:
            if not isinstance(o, PopObject):
                o = PopObject(*o)
            o = PopObject(str(o.id), o.value, as_fraction(o.weight))
            if o.value.frame != frame:
                raise FrameMismatch(f"object {o.id!r} has a value on another frame")
            if not o.value:
                raise ValueError(f"object {o.id!r} has an empty true value")
            if o.weight <= 0:
                raise ValueError(f"object {o.id!r} has nonpositive weight {o.weight}")
            objs.append(o)
        ids = [o.id for o in objs]
        if len(set(ids)) != len(ids):
            raise ValueError("object ids must be distinct")
        self.frame = frame
        self.objects = tuple(objs)
        self._by_id = {o.id: o for o in objs}

    def __len__(self) -> int:
        return len(self.objects)

    def __iter__(self):
        return iter(self.objects)

    def __repr__(self) -> str:
        return f"PopulationSpec({len(self.objects)} objects over {self.frame!r})"

    def get(self, obj_id) -> PopObject:
        try:
            return self._by_id[str(obj_id)]
        except KeyError:
            raise UnknownObject(f"no object with id {obj_id!r}") from None

    @classmethod
    def from_values(cls, frame: Frame, values: Iterable[Iterable], weights: Iterable | None = None):
        """Objects named ``"1"``, ``"2"``, ... with the given true values."""
        values = list(values)
        weights = [1] * len(values) if weights is None else list(weights)
        return cls(frame, [PopObject(str(i), frame.subset(v), as_fraction(w)) for i, (v, w) in enumerate(zip(values, weights), 1)])

    def to_dict(self) -> dict:
        return {
            "frame": list(self.frame.elements),
            "objects": [{"id": o.id, "value": list(o.value), "weight": rational_str(o.weight)} for o in self.objects],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> PopulationSpec:
        try:
            frame = Frame(data["frame"])
            objects = [
                PopObject(str(o["id"]), frame.subset(o["value"]), as_fraction(o.get("weight", "1")))
                for o in data["objects"]
            ]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed population JSON: {exc}") from None
        try:
            return cls(frame, objects)
        except ValueError as exc:
            raise FormatError(str(exc)) from None


@dataclass(frozen=True)
class Labeling:
    """Per-object labels; an empty label means the object is discarded."""

    labels: Mapping[str, Subset]

    @classmethod
    def unlabeled(cls, pop: PopulationSpec) -> Labeling:
        return cls({o.id: pop.frame.full for o in pop})

    def __getitem__(self, obj_id) -> Subset:
        return self.labels[str(obj_id)]

    def survivors(self) -> list[str]:
        return [i for i, s in self.labels.items() if s]


def check_labeling(pop: PopulationSpec, l: Labeling) -> None:
    """Raise unless ``l`` labels exactly ``pop``'s objects admissibly."""
    if set(l.labels) != {o.id for o in pop}:
        raise InadmissibleLabel("labeling does not cover exactly the population's objects")
    for o in pop:
        label = l.labels[o.id]
        if label.frame != pop.frame:
            raise FrameMismatch(f"label of {o.id!r} is on another frame")
        if label and label.isdisjoint(o.value):
            raise InadmissibleLabel(f"label {label!r} of {o.id!r} is disjoint from its value")


def measure(pop: PopulationSpec, obj_id, subset: Subset) -> bool:
    o = pop.get(obj_id)
    if subset.frame != pop.frame:
        raise FrameMismatch(f"{subset!r} is not on the population frame")
    return not subset.isdisjoint(o.value)


def modified_measure(pop: PopulationSpec, l: Labeling, obj_id, subset: Subset) -> bool:
    pop.get(obj_id)
    label = l[obj_id]
    if not label:
        raise DiscardedObject(f"object {obj_id!r} is not in the population under this labeling")
    return measure(pop, obj_id, subset & label)


def _modified_value(pop: PopulationSpec, l: Labeling, o: PopObject) -> Subset:
    """Set of elements whose singleton test under ``M_l`` comes out true."""
    return pop.frame.subset(
        e for e, single in zip(pop.frame, pop.frame.singletons()) if modified_measure(pop, l, o.id, single)
    )


def _surviving(pop: PopulationSpec, l: Labeling) -> tuple[list[PopObject], Fraction]:
    check_labeling(pop, l)
    alive = [o for o in pop if l[o.id]]
    total = sum((o.weight for o in alive), Fraction(0))
    if total == 0:
        raise EmptyPopulation("no object survives the labeling")
    return alive, total


def pop_mass(pop: PopulationSpec, l: Labeling) -> MassFunction:
    alive, total = _surviving(pop, l)
    acc: dict[Subset, Fraction] = {}
    for o in alive:
        v = _modified_value(pop, l, o)
        acc[v] = acc.get(v, Fraction(0)) + o.weight
    return MassFunction(pop.frame, [(s, w / total) for s, w in acc.items()])


def pop_belief(pop: PopulationSpec, l: Labeling, subset: Subset) -> Fraction:
    """Weighted share of objects for which the test on the complement fails."""
    alive, total = _surviving(pop, l)
    rest = ~subset
    return sum((o.weight for o in alive if not modified_measure(pop, l, o.id, rest)), Fraction(0)) / total


def pop_plausibility(pop: PopulationSpec, l: Labeling, subset: Subset) -> Fraction:
    alive, total = _surviving(pop, l)
    return sum((o.weight for o in alive if modified_measure(pop, l, o.id, subset)), Fraction(0)) / total


def apply_simple_process(pop: PopulationSpec, l: Labeling, label: Subset) -> Labeling:
    """Discard objects failing the test on ``label``; intersect the rest."""
    if label.frame != pop.frame:
        raise FrameMismatch(f"{label!r} is not on the population frame")
    if not label:
        raise EmptyLabel("labeling process needs a nonempty label")
    check_labeling(pop, l)
    new = {}
    for o in pop:
        current = l[o.id]
        new[o.id] = current & label if current and modified_measure(pop, l, o.id, label) else pop.frame.empty
    return Labeling(new)


@dataclass(frozen=True)
class Theorem8Report:
    processed: MassFunction
    dempster: CombinationResult
    equal: bool
    belief_checked: bool

    def to_dict(self) -> dict:
        return {
            "processed": self.processed.to_dict(),
            "dempster": self.dempster.to_dict(),
            "equal": self.equal,
            "belief_checked": self.belief_checked,
        }


def verify_theorem8(pop: PopulationSpec, l: Labeling, label: Subset, belief_check_limit: int = 10) -> Theorem8Report:
    """Compare the population after a simple labeling process with Dempster conditioning.

    When the frame has at most ``belief_check_limit`` elements the
    definitional population belief is also compared on every subset.
    """
    new = apply_simple_process(pop, l, label)
    processed = pop_mass(pop, new)
    try:
        predicted = condition(pop_mass(pop, l), label)
    except TotalConflict:
        raise EmptyPopulation("Dempster combination is in total conflict") from None
    equal = processed == predicted.combined
    checked = len(pop.frame) <= belief_check_limit
    if checked and equal:
        equal = all(pop_belief(pop, new, a) == predicted.combined.belief(a) for a in pop.frame.subsets())
    return Theorem8Report(processed, predicted, equal, checked)


class LabelingProcessSpec:
    """Candidate labels with their selection probabilities."""

    def __init__(self, labels: Iterable[Subset], probabilities: Iterable):
        labels = tuple(labels)
        try:
            probs = tuple(as_fraction(p) for p in probabilities)
        except (TypeError, FormatError) as exc:
            raise InvalidProcess(str(exc)) from None
        if not labels:
            raise InvalidProcess("a labeling process needs at least one label")
        if len(probs) != len(labels):
            raise InvalidProcess("one probability per label is required")
        frames = {s.frame for s in labels}
        if len(frames) != 1:
            raise InvalidProcess("labels are on different frames")
        if any(not s for s in labels):
            raise InvalidProcess("labels must be nonempty")
        if len(set(labels)) != len(labels):
            raise InvalidProcess("labels must be distinct")
        if any(p <= 0 for p in probs):
            raise InvalidProcess("selection probabilities must be positive")
        if sum(probs) != 1:
            raise InvalidProcess(f"selection probabilities sum to {sum(probs)}, not 1")
        self.frame = labels[0].frame
        self.labels = labels
        self.probabilities = probs

    @classmethod
    def simple(cls, label: Subset) -> LabelingProcessSpec:
        return cls([label], [1])

    def __len__(self) -> int:
        return len(self.labels)

    def to_dict(self) -> dict:
        return {"labels": [{"set": list(s), "p": rational_str(p)} for s, p in zip(self.labels, self.probabilities)]}

    @classmethod
    def from_dict(cls, data: Mapping, frame: Frame) -> LabelingProcessSpec:
        try:
            entries = data["labels"]
            labels = [frame.subset(e["set"]) for e in entries]
            probs = [e["p"] for e in entries]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed process JSON: {exc}") from None
        return cls(labels, probs)


def process_mass(proc: LabelingProcessSpec) -> MassFunction:
    """Selection probabilities viewed as a mass function on the labels."""
    return MassFunction(proc.frame, list(zip(proc.labels, proc.probabilities)))


def _outcome_codes(pop: PopulationSpec, l: Labeling, proc: LabelingProcessSpec):
    """Per surviving object, the resulting modified value (bitmask) under each label; 0 = discarded."""
    if proc.frame != pop.frame:
        raise FrameMismatch("process labels are on another frame")
    check_labeling(pop, l)
    rows = []
    for o in pop:
        label = l[o.id]
        if not label:
            continue
        base = label.bits & o.value.bits
        rows.append((o.weight, tuple(base & s.bits for s in proc.labels)))
    return rows


def distributional_mass(pop: PopulationSpec, l: Labeling, proc: LabelingProcessSpec) -> MassFunction:
    """Infinite-population reading: each object's weight splits across labels in selection proportions."""
    acc: dict[int, Fraction] = {}
    total = Fraction(0)
    for w, codes in _outcome_codes(pop, l, proc):
        for code, p in zip(codes, proc.probabilities):
            if code:
                acc[code] = acc.get(code, Fraction(0)) + w * p
                total += w * p
    if total == 0:
        raise EmptyPopulation("every object is discarded under every label")
    return MassFunction(pop.frame, [(Subset(pop.frame, b), v / total) for b, v in acc.items()])


def _compositions(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, k - 1):
            yield (first,) + rest


def _exact_expectation(rows, probs: tuple[Fraction, ...], nbits: int):
    """Distribution of the post-process population, enumerated exactly.

    Objects sharing weight and outcome codes are exchangeable, so each such
    group contributes multinomially; states merge when their weighted
    focal tallies coincide.
    """
    groups = Counter(rows)
    states: dict[tuple, Fraction] = {(): Fraction(1)}
    k = len(probs)
    for (w, codes), size in groups.items():
        spread = []
        for counts in _compositions(size, k):
            coef = math.factorial(size)
            p = Fraction(1)
            for c, pj in zip(counts, probs):
                coef //= math.factorial(c)
                p *= pj**c
            tally: dict[int, Fraction] = {}
            for c, code in zip(counts, codes):
                if c and code:
                    tally[code] = tally.get(code, Fraction(0)) + w * c
            spread.append((tally, coef * p))
        merged: dict[tuple, Fraction] = {}
        for state, ps in states.items():
            for tally, pt in spread:
                if tally:
                    acc = dict(state)
                    for code, v in tally.items():
                        acc[code] = acc.get(code, Fraction(0)) + v
                    key = tuple(sorted(acc.items()))
                else:
                    key = state
                merged[key] = merged.get(key, Fraction(0)) + ps * pt
        states = merged
    expected = [Fraction(0)] * (1 << nbits)
    empty = Fraction(0)
    for state, p in states.items():
        total = sum(v for _, v in state)
        if not state:
            empty += p
            continue
        for code, v in state:
            expected[code] += p * v / total
    if empty == 1:
        return None, empty
    scale = 1 / (1 - empty)
    return [v * scale for v in expected], empty


@dataclass
class GeneralProcessReport:
    """Expected post-process belief against the Dempster prediction.

    Vectors are indexed by subset bitmask over ``frame``. ``expected_belief``
    is the expectation conditional on a nonempty resulting population;
    ``empty_probability`` is the probability that every object is discarded.
    """

    frame: Frame
    mode: str
    dempster_belief: list[Fraction] | None
    distributional_belief: list[Fraction]
    distributional_equal: bool
    empty_probability: Fraction | None = None
    expected_belief: list[Fraction] | None = None
    deviation: list[Fraction] | None = None
    mc_mean: list[float] | None = None
    mc_stderr: list[float] | None = None
    mc_trials: int | None = None
    mc_empty_trials: int | None = None
    seed: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def max_deviation(self):
        if self.deviation is not None:
            return max(self.deviation)
        if self.mc_mean is not None and self.dempster_belief is not None:
            return max(abs(a - float(b)) for a, b in zip(self.mc_mean, self.dempster_belief))
        return None

    def subsets(self) -> list[Subset]:
        return [Subset(self.frame, b) for b in range(1 << len(self.frame))]

    def to_dict(self) -> dict:
        def rats(v):
            return None if v is None else [rational_str(x) for x in v]

        out = {
            "frame": list(self.frame.elements),
            "mode": self.mode,
            "subsets": [list(s) for s in self.subsets()],
            "dempster_belief": rats(self.dempster_belief),
            "distributional_belief": rats(self.distributional_belief),
            "distributional_equal": self.distributional_equal,
        }
        if self.mode == "exact":
            out.update(
                expected_belief=rats(self.expected_belief),
                deviation=rats(self.deviation),
                max_deviation=None if self.deviation is None else rational_str(max(self.deviation)),
                empty_probability=rational_str(self.empty_probability),
            )
        else:
            out.update(
                mc_mean=self.mc_mean,
                mc_stderr=self.mc_stderr,
                trials=self.mc_trials,
                empty_trials=self.mc_empty_trials,
                seed=self.seed,
            )
        out["notes"] = list(self.notes)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def to_table(self, digits: int = 4) -> str:
        from .frame import format_decimal

        def fmt(v):
            if v is None:
                return "-"
            return f"{v:.{digits}f}" if isinstance(v, float) else format_decimal(v, digits)

        header = ["subset", "dempster", "distributional"]
        if self.mode == "exact":
            header += ["expected", "|deviation|"]
        else:
            header += ["mc mean", "stderr"]
        lines = []
        for b, s in enumerate(self.subsets()):
            row = [repr(s), fmt(self.dempster_belief[b] if self.dempster_belief else None), fmt(self.distributional_belief[b])]
            if self.mode == "exact":
                row += [fmt(self.expected_belief[b] if self.expected_belief else None), fmt(self.deviation[b] if self.deviation else None)]
            else:
                row += [fmt(self.mc_mean[b] if self.mc_mean else None), fmt(self.mc_stderr[b] if self.mc_stderr else None)]
            lines.append(row)
        widths = [max(len(r[i]) for r in [header] + lines) for i in range(len(header))]
        text = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
        text += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in lines]
        if self.mode == "exact" and self.empty_probability is not None:
            text.append(f"probability of an empty population: {self.empty_probability} ({fmt(self.empty_probability)})")
        if self.mode != "exact":
            text.append(f"trials: {self.mc_trials}, empty populations: {self.mc_empty_trials}, seed: {self.seed}")
        text.append(f"distributional limit equals Dempster prediction: {self.distributional_equal}")
        text.extend(self.notes)
        return "\n".join(text)


def _monte_carlo(rows, probs, nbits: int, trials: int, seed: int):
    """Sample per-object labels; trial t uses row ``t % MC_BLOCK`` of block ``t // MC_BLOCK``."""
    n = len(rows)
    nsub = 1 << nbits
    weights = np.array([float(w) for w, _ in rows])
    codes = np.array([c for _, c in rows], dtype=np.int64).reshape(n, len(probs))
    cum = np.cumsum([float(p) for p in probs])
    subsets = np.arange(nsub, dtype=np.int64)
    total_sum = np.zeros(nsub)
    total_sq = np.zeros(nsub)
    valid = 0
    empty = 0
    for block in range(0, (trials + MC_BLOCK - 1) // MC_BLOCK):
        rng = np.random.default_rng([seed, block])
        u = rng.random((MC_BLOCK, n))
        size = min(MC_BLOCK, trials - block * MC_BLOCK)
        u = u[:size]
        choice = np.minimum(np.searchsorted(cum, u, side="right"), len(probs) - 1)
        got = codes[np.arange(n)[None, :], choice]  # (size, n)
        alive = got != 0
        tot = (alive * weights).sum(axis=1)
        ok = tot > 0
        empty += int((~ok).sum())
        got, alive, tot = got[ok], alive[ok], tot[ok]
        valid += len(tot)
        # contained[a, t, i]: object i's value lies inside subset a
        contained = ((got[None, :, :] & ~subsets[:, None, None]) == 0) & alive[None, :, :]
        bel = (contained * weights).sum(axis=2) / tot[None, :]
        total_sum += bel.sum(axis=1)
        total_sq += (bel**2).sum(axis=1)
    if valid == 0:
        return None, None, empty
    mean = total_sum / valid
    var = np.maximum(total_sq / valid - mean**2, 0.0) * (valid / max(valid - 1, 1))
    stderr = np.sqrt(var / valid)
    return mean.tolist(), stderr.tolist(), empty


def apply_general_process(
    pop: PopulationSpec,
    l: Labeling,
    proc: LabelingProcessSpec,
    mode: str = "exact",
    trials: int = 100_000,
    seed: int = 0,
) -> GeneralProcessReport:
    """Run a randomized labeling process and compare with Dempster's rule.

    ``mode="exact"`` enumerates every per-object label assignment (at most
    ``MAX_EXACT_OUTCOMES``); ``mode="monte_carlo"`` samples ``trials``
    assignments from a generator seeded by ``seed``.
    """
    if mode in ("mc", "monte_carlo"):
        mode = "monte_carlo"
    elif mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    rows = _outcome_codes(pop, l, proc)
    nbits = len(pop.frame)
    try:
        dempster = dempster_combine(pop_mass(pop, l), process_mass(proc)).combined
        dempster_bel = belief_vector(pop.frame, {s.bits: v for s, v in dempster.focals.items()})
    except (TotalConflict, EmptyPopulation):
        dempster, dempster_bel = None, None
    dist = distributional_mass(pop, l, proc)
    dist_bel = belief_vector(pop.frame, {s.bits: v for s, v in dist.focals.items()})
    report = GeneralProcessReport(
        frame=pop.frame,
        mode=mode,
        dempster_belief=dempster_bel,
        distributional_belief=dist_bel,
        distributional_equal=dempster is not None and dist == dempster,
    )
    if mode == "exact":
        k = len(proc)
        if k ** len(rows) > MAX_EXACT_OUTCOMES:
            raise CapacityExceeded(
                f"{k}^{len(rows)} label assignments exceed {MAX_EXACT_OUTCOMES}; use monte_carlo mode"
            )
        expected_mass, empty = _exact_expectation(rows, proc.probabilities, nbits)
        report.empty_probability = empty
        if expected_mass is not None:
            report.expected_belief = belief_vector(pop.frame, dict(enumerate(expected_mass)))
            if dempster_bel is not None:
                report.deviation = [abs(a - b) for a, b in zip(report.expected_belief, dempster_bel)]
        if empty:
            report.notes.append("expected belief is conditional on a nonempty resulting population")
    else:
        if trials <= 0:
            raise ValueError("trials must be positive")
        mean, stderr, empty = _monte_carlo(rows, proc.probabilities, nbits, trials, seed)
        report.mc_mean, report.mc_stderr = mean, stderr
        report.mc_trials, report.mc_empty_trials, report.seed = trials, empty, seed
    return report


def random_population(rng, frame: Frame, n_objects: int, max_weight: int = 5) -> PopulationSpec:
    """Random population for property checks; ``rng`` is a ``random.Random``."""
    full = frame.full_mask
    objs = [
        PopObject(str(i), Subset(frame, rng.randint(1, full)), Fraction(rng.randint(1, max_weight), rng.randint(1, 3)))
        for i in range(1, n_objects + 1)
    ]
    return PopulationSpec(frame, objs)


def random_labeling(rng, pop: PopulationSpec, discard_rate: float = 0.2) -> Labeling:
    """Random admissible labeling: each label meets the object's value, or is empty."""
    full = pop.frame.full_mask
    labels = {}
    for o in pop:
        if rng.random() < discard_rate:
            labels[o.id] = pop.frame.empty
            continue
        while True:
            bits = rng.randint(1, full)
            if bits & o.value.bits:
                break
        labels[o.id] = Subset(pop.frame, bits)
    return Labeling(labels)


def random_process(rng, frame: Frame, max_labels: int = 3) -> LabelingProcessSpec:
    full = frame.full_mask
    k = rng.randint(1, min(max_labels, full))
    labels = rng.sample(range(1, full + 1), k)
    raw = [rng.randint(1, 9) for _ in labels]
    total = sum(raw)
    return LabelingProcessSpec([Subset(frame, b) for b in labels], [Fraction(r, total) for r in raw])


__all__ = [
    "PopObject",
    "PopulationSpec",
    "Labeling",
    "LabelingProcessSpec",
    "GeneralProcessReport",
    "Theorem8Report",
    "measure",
    "modified_measure",
    "pop_mass",
    "pop_belief",
    "pop_plausibility",
    "apply_simple_process",
    "verify_theorem8",
    "process_mass",
    "distributional_mass",
    "apply_general_process",
    "check_labeling",
    "random_population",
    "random_labeling",
    "random_process",
]

