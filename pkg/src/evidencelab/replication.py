"""Scripted reproductions of the worked numeric examples.

Each ``replicate_*`` function rebuilds one example from scratch and returns
a :class:`ReplicationRecord` holding the computed values next to the
published ones. Published decimals are compared exactly when they are
exact decimals (0.4 is 2/5), against a pinned rational when the example's
own arithmetic forces it (0.33 from 0.25/0.75 is 1/3), and otherwise at
printed precision.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Any

from .combination import condition, cylinder, dempster_combine, vacuous_extension
from .errors import InvalidParams
from .frame import Frame, MassFunction, format_decimal, product_frame, rational_str
from .gamma import DatasetTable, audit_honesty, bpa_from_gamma, build_gamma, condition_gamma

MATCH = "match"
MISMATCH = "mismatch"
AMBIGUOUS = "paper_value_ambiguous"

EXACT = "exact"
PINNED = "exact (rational pinned by the example's arithmetic)"
PRINTED = "printed precision"
INFO = "informational"

TABLE1_CSV = """No,A,D
1,a1,d1
2,a2,d2
3,a2,d3
4,a3,d3
5,a4,d1
"""


def table1() -> DatasetTable:
    return DatasetTable.from_csv_text(TABLE1_CSV)


def table2() -> DatasetTable:
    """Table 1 repeated under four values of an attribute B unrelated to D."""
    base = table1().rows
    rows = []
    for j in range(1, 5):
        for _, a, d in base:
            rows.append((str(len(rows) + 1), a, f"b{j}", d))
    return DatasetTable(("No", "A", "B", "D"), tuple(rows))


@dataclass
class ReplicationItem:
    label: str
    computed: Any
    published: Any
    comparison: str
    verdict: str

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "computed": _plain(self.computed),
            "computed_decimal": format_decimal(self.computed, 6) if isinstance(self.computed, Fraction) else None,
            "published": _plain(self.published),
            "comparison": self.comparison,
            "verdict": self.verdict,
        }


def _plain(v):
    if isinstance(v, Fraction):
        return rational_str(v)
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    return v


@dataclass
class ReplicationRecord:
    name: str
    items: list[ReplicationItem] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {i.verdict for i in self.items}
        if MISMATCH in verdicts:
            return MISMATCH
        if AMBIGUOUS in verdicts:
            return AMBIGUOUS
        return MATCH

    @property
    def computed(self) -> dict[str, Any]:
        return {i.label: i.computed for i in self.items}

    def item(self, label: str) -> ReplicationItem:
        for i in self.items:
            if i.label == label:
                return i
        raise KeyError(label)

    def exact(self, label, computed, published) -> None:
        published = Fraction(published) if isinstance(published, (str, int)) else published
        self.items.append(ReplicationItem(label, computed, published, EXACT, MATCH if computed == published else MISMATCH))

    def pinned(self, label, computed, pinned: Fraction, printed: str) -> None:
        ok = computed == pinned and format_decimal(computed, _places(printed)) == printed
        self.items.append(ReplicationItem(label, computed, {"pinned": pinned, "printed": printed}, PINNED, MATCH if ok else MISMATCH))

    def printed(self, label, computed, printed: str) -> None:
        ok = format_decimal(computed, _places(printed)) == printed
        self.items.append(ReplicationItem(label, computed, printed, PRINTED, MATCH if ok else MISMATCH))

    def check(self, label, computed, expected, comparison: str = EXACT) -> None:
        self.items.append(ReplicationItem(label, computed, expected, comparison, MATCH if computed == expected else MISMATCH))

    def info(self, label, computed, published=None, verdict: str = AMBIGUOUS) -> None:
        self.items.append(ReplicationItem(label, computed, published, INFO, verdict))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict,
            "items": [i.to_dict() for i in self.items],
            "notes": list(self.notes),
        }

    def summary_lines(self, digits: int = 4) -> list[str]:
        lines = [f"[{self.verdict}] {self.name}"]
        for i in self.items:
            shown = format_decimal(i.computed, digits) if isinstance(i.computed, Fraction) else _plain(i.computed)
            exact = f" = {rational_str(i.computed)}" if isinstance(i.computed, Fraction) else ""
            lines.append(f"  {i.verdict:<22} {i.label}: {shown}{exact} (published: {_plain(i.published)})")
        lines.extend(f"  note: {n}" for n in self.notes)
        return lines


def _places(printed: str) -> int:
    return len(Decimal(printed).as_tuple().digits) if "." not in printed else len(printed.split(".")[1])


# the published m/Bel/Pl table, keyed by subset
TABLE1_PUBLISHED = {
    ("d1",): ("0.4", "0.4", "0.4"),
    ("d2",): ("0", "0", "0.4"),
    ("d3",): ("0.2", "0.2", "0.6"),
    ("d1", "d2"): ("0", "0.4", "0.8"),
    ("d1", "d3"): ("0", "0.6", "1"),
    ("d2", "d3"): ("0.4", "0.6", "0.6"),
    ("d1", "d2", "d3"): ("0", "1", "1"),
}


def table1_mass() -> MassFunction:
    return bpa_from_gamma(build_gamma(table1(), "A", "D"))


def replicate_table1() -> ReplicationRecord:
    rec = ReplicationRecord("table1")
    m = table1_mass()
    frame = m.frame
    for elems, (pm, pb, pp) in TABLE1_PUBLISHED.items():
        s = frame.subset(elems)
        rec.exact(f"m({s!r})", m.mass(s), pm)
        rec.exact(f"Bel({s!r})", m.belief(s), pb)
        rec.exact(f"Pl({s!r})", m.plausibility(s), pp)
    return rec


def replicate_conditioning() -> ReplicationRecord:
    rec = ReplicationRecord("conditioning")
    data = table1()
    g = build_gamma(data, "A", "D")
    on = g.target_domain.subset(["d1", "d2"])
    restricted, survivors = condition_gamma(g, on)
    by_counting = bpa_from_gamma(restricted)
    by_dempster = condition(bpa_from_gamma(g), on)
    d1, d2 = g.target_domain.singleton("d1"), g.target_domain.singleton("d2")
    rec.check("surviving rows", list(survivors), [1, 2, 3, 5])
    rec.check(
        "restricted sets of surviving rows",
        [repr(restricted.per_row[i]) for i in survivors],
        ["{d1}", "{d2}", "{d2}", "{d1}"],
    )
    rec.check("restricted-table mass equals Dempster conditioning", by_counting == by_dempster.combined, True)
    rec.check(f"m'({d1!r})", by_counting.mass(d1), Fraction(1, 2), "derived by survivor counting")
    rec.check(f"m'({d2!r})", by_counting.mass(d2), Fraction(1, 2), "derived by survivor counting")
    rec.check("conflict mass", by_dempster.conflict_mass, Fraction(1, 5), "derived by survivor counting")
    rec.check("rows whose restricted set excludes the recorded value", audit_honesty(restricted, data), [3])
    again = condition(by_dempster.combined, on).combined
    rec.check("conditioning again is a fixed point", again == by_dempster.combined, True)
    return rec


def implication_frame() -> Frame:
    return Frame([("P", "Q"), ("P", "~Q"), ("~P", "Q"), ("~P", "~Q")])


def implication_masses() -> tuple[MassFunction, MassFunction]:
    f = implication_frame()
    implies = f.subset([("P", "Q"), ("~P", "Q"), ("~P", "~Q")])
    m1 = MassFunction(f, [(implies, Fraction(1, 2)), (~implies, Fraction(1, 2))])
    p = f.subset([("P", "Q"), ("P", "~Q")])
    m2 = MassFunction(f, [(p, Fraction(1, 2)), (~p, Fraction(1, 2))])
    return m1, m2


def replicate_implication() -> ReplicationRecord:
    rec = ReplicationRecord("implication")
    f = implication_frame()
    m1, m2 = implication_masses()
    res = dempster_combine(m1, m2)
    m = res.combined
    for elems in ([("P", "Q")], [("P", "~Q")], [("~P", "Q"), ("~P", "~Q")]):
        s = f.subset(elems)
        rec.pinned(f"m12({s!r})", m.mass(s), Fraction(1, 3), "0.33")
    rec.check("number of focal sets", len(m.focals), 3)
    rec.check("total mass", sum(m.focals.values()), Fraction(1))
    rec.check("conflict mass before normalization", res.conflict_mass, Fraction(1, 4), "derived by enumerating focal pairs")
    return rec


WEAPON = Frame(["gun", "knife"])
FATE = Frame(["rescue", "let die"])


def killer_masses() -> dict[str, MassFunction]:
    """The weapon belief, the two conditional beliefs and their combination.

    A conditional statement "fate | weapon" is encoded as the set
    ``not weapon or fate`` of the product frame.
    """
    p_gun = Fraction(1, 5)
    weapon = MassFunction(
        WEAPON,
        [
            (WEAPON.subset(["gun"]), p_gun**3),
            (WEAPON.subset(["knife"]), (1 - p_gun) ** 3),
            (WEAPON.full, 1 - p_gun**3 - (1 - p_gun) ** 3),
        ],
    )
    joint = product_frame(WEAPON, FATE)

    def given(fate: str, weapon_: str):
        return joint.subset(e for e in joint if e[0] != weapon_ or e[1] == fate)

    p_rescue = Fraction(1, 5)
    bel1 = MassFunction(
        joint,
        [
            (given("rescue", "gun"), p_rescue**3),
            (given("let die", "gun"), (1 - p_rescue) ** 3),
            (joint.full, 1 - p_rescue**3 - (1 - p_rescue) ** 3),
        ],
    )
    bel2 = MassFunction(joint, [(given("let die", "knife"), 1)])
    return {"weapon": weapon, "bel1": bel1, "bel2": bel2, "m12": dempster_combine(bel1, bel2).combined}


def replicate_killer() -> ReplicationRecord:
    rec = ReplicationRecord("killer")
    ms = killer_masses()
    weapon, m12 = ms["weapon"], ms["m12"]
    joint = m12.frame
    rec.exact("Bel(gun)", weapon.belief(WEAPON.subset(["gun"])), "0.008")
    rec.exact("Bel(knife)", weapon.belief(WEAPON.subset(["knife"])), "0.512")
    rec.exact("Bel({gun,knife})", weapon.belief(WEAPON.full), 1)
    published = [
        ([("gun", "let die"), ("knife", "let die"), ("gun", "rescue")], "0.480"),
        ([("gun", "rescue"), ("knife", "let die")], "0.008"),
        ([("knife", "let die"), ("gun", "let die")], "0.512"),
    ]
    for elems, value in published:
        s = joint.subset(elems)
        rec.exact(f"m12({s!r})", m12.mass(s), value)
    rec.check("m12 has exactly the three published focal sets", len(m12.focals), 3)

    extended = vacuous_extension(weapon, joint, axis=0)
    final = dempster_combine(extended, m12)
    target = joint.subset([("gun", "let die")])
    gun_cyl = cylinder(WEAPON.subset(["gun"]), joint, axis=0)
    published_final = Fraction("0.008") * Fraction("0.992")
    # mass of focal sets inside the gun cylinder that still admit (gun, let die)
    within_gun = sum((v for s, v in final.combined.focals.items() if s <= gun_cyl and target <= s), Fraction(0))
    rec.info(
        "final combination: full mass function",
        {repr(s): v for s, v in final.combined.focals.items()},
        "m + m12(gun, let die) = 0.008*0.480 + 0.008*0.512 = 0.008*0.992",
    )
    rec.info("final: conflict mass", final.conflict_mass, None)
    rec.info("final: m({(gun,let die)})", final.combined.mass(target), published_final)
    rec.info("final: Bel({(gun,let die)})", final.combined.belief(target), published_final)
    rec.info("final: Pl({(gun,let die)})", final.combined.plausibility(target), published_final)
    rec.info(
        "final: mass on gun-cylinder focal sets containing (gun,let die)",
        within_gun,
        published_final,
        verdict=AMBIGUOUS,
    )
    rec.info(
        "final: Bel({(gun,let die)}) against the pessimistic bound 0.008*0.512",
        final.combined.belief(target),
        Fraction("0.008") * Fraction("0.512"),
        verdict=AMBIGUOUS,
    )
    rec.notes.append(
        "the published final line does not name a standard quantity; vacuous extension of the weapon belief "
        f"followed by Dempster's rule gives m({{(gun,let die)}}) = {final.combined.mass(target)}, while "
        f"0.008*0.992 = {published_final} equals the mass of gun-cylinder focal sets containing (gun,let die) "
        f"({within_gun}), i.e. m({{(gun,let die),(gun,rescue)}}) + m({{(gun,let die)}})"
    )
    return rec


@dataclass(frozen=True)
class RoughSetParams:
    """Class prior ``p1, p2`` and each expert's indication rates per class.

    ``e1_d1, e3_d1`` are expert 1's rates of indicating {d1} and {d1,d2}
    among d1 objects; ``e2_d2, e3_d2`` its rates of indicating {d2} and
    {d1,d2} among d2 objects. ``f*`` are the same for expert 2.
    """

    p1: Fraction
    p2: Fraction
    e1_d1: Fraction
    e3_d1: Fraction
    e2_d2: Fraction
    e3_d2: Fraction
    f1_d1: Fraction
    f3_d1: Fraction
    f2_d2: Fraction
    f3_d2: Fraction

    def __post_init__(self):
        for name, v in self.__dict__.items():
            v = Fraction(v)
            object.__setattr__(self, name, v)
            if not 0 <= v <= 1:
                raise InvalidParams(f"{name} = {v} is outside [0, 1]")
        for a, b in (("p1", "p2"), ("e1_d1", "e3_d1"), ("e2_d2", "e3_d2"), ("f1_d1", "f3_d1"), ("f2_d2", "f3_d2")):
            if getattr(self, a) + getattr(self, b) != 1:
                raise InvalidParams(f"{a} + {b} must equal 1")

    @classmethod
    def from_free(cls, p1, e1_d1, e2_d2, f1_d1, f2_d2) -> RoughSetParams:
        p1, e1_d1, e2_d2, f1_d1, f2_d2 = map(Fraction, (p1, e1_d1, e2_d2, f1_d1, f2_d2))
        return cls(p1, 1 - p1, e1_d1, 1 - e1_d1, e2_d2, 1 - e2_d2, f1_d1, 1 - f1_d1, f2_d2, 1 - f2_d2)

    @classmethod
    def random(cls, rng: random.Random, denominator: int = 997) -> RoughSetParams:
        """Interior draw: every free parameter strictly inside (0, 1)."""
        draws = [Fraction(rng.randint(1, denominator - 1), denominator) for _ in range(5)]
        return cls.from_free(*draws)


ROUGH_FRAME = Frame(["d1", "d2"])


def rough_expert_masses(q: RoughSetParams) -> tuple[MassFunction, MassFunction]:
    d1, d2, both = ROUGH_FRAME.subset(["d1"]), ROUGH_FRAME.subset(["d2"]), ROUGH_FRAME.full
    m1 = MassFunction(ROUGH_FRAME, [(d1, q.e1_d1 * q.p1), (d2, q.e2_d2 * q.p2), (both, q.e3_d1 * q.p1 + q.e3_d2 * q.p2)])
    m2 = MassFunction(ROUGH_FRAME, [(d1, q.f1_d1 * q.p1), (d2, q.f2_d2 * q.p2), (both, q.f3_d1 * q.p1 + q.f3_d2 * q.p2)])
    return m1, m2


def rough_joint_mass(q: RoughSetParams) -> tuple[Fraction, Fraction, Fraction]:
    """Masses of {d1}, {d2}, {d1,d2} when the experts are independent given D."""
    p1, p2 = q.p1, q.p2
    md1 = q.e1_d1 * q.f1_d1 * p1 + q.e1_d1 * q.f3_d1 * p1 + q.e3_d1 * q.f1_d1 * p1
    md2 = q.e2_d2 * q.f2_d2 * p2 + q.e2_d2 * q.f3_d2 * p2 + q.e3_d2 * q.f2_d2 * p2
    mboth = q.e3_d1 * q.f3_d1 * p1 + q.e3_d2 * q.f3_d2 * p2
    return md1, md2, mboth


def rough_dempster_polynomial(q: RoughSetParams) -> tuple[Fraction, Fraction, Fraction]:
    """Closed-form Dempster combination of the two experts, term by term as published."""
    p1, p2 = q.p1, q.p2
    e1, e3, e2b, e3b = q.e1_d1, q.e3_d1, q.e2_d2, q.e3_d2
    f1, f3, f2b, f3b = q.f1_d1, q.f3_d1, q.f2_d2, q.f3_d2
    d1 = e1 * f1 * p1**2 + e1 * f3 * p1**2 + e1 * f3b * p1 * p2 + e3 * f1 * p1**2 + e3b * f1 * p1 * p2
    d2 = e2b * f2b * p2**2 + e2b * f3 * p1 * p2 + e2b * f3b * p2**2 + e3 * f2b * p1 * p2 + e3b * f2b * p2**2
    both = e3 * f3 * p1**2 + e3b * f3b * p2**2 + e3 * f3b * p1 * p2 + e3b * f3 * p1 * p2
    c = 1 / (d1 + d2 + both)
    return c * d1, c * d2, c * both


def rough_boundary(q: RoughSetParams) -> str | None:
    """Name the degenerate family ``q`` belongs to, if any."""
    if q.p1 in (0, 1):
        return "degenerate class prior"
    if q.e3_d1 == q.e3_d2 == q.f3_d1 == q.f3_d2 == 0:
        return "deterministic experts"
    return None


def rough_set_compare(q: RoughSetParams) -> ReplicationRecord:
    rec = ReplicationRecord("roughset")
    subsets = [ROUGH_FRAME.subset(["d1"]), ROUGH_FRAME.subset(["d2"]), ROUGH_FRAME.full]
    m1, m2 = rough_expert_masses(q)
    joint = rough_joint_mass(q)
    poly = rough_dempster_polynomial(q)
    generic = dempster_combine(m1, m2).combined
    generic_vals = tuple(generic.mass(s) for s in subsets)
    rec.info("m1", [m1.mass(s) for s in subsets], None, verdict=MATCH)
    rec.info("m2", [m2.mass(s) for s in subsets], None, verdict=MATCH)
    rec.info("m12 (conditionally independent experts)", list(joint), None, verdict=MATCH)
    rec.info("m1 (+) m2", list(generic_vals), None, verdict=MATCH)
    rec.check("published Dempster polynomial equals generic combination", poly == generic_vals, True)
    equal = tuple(joint) == generic_vals
    boundary = rough_boundary(q)
    rec.info("m12 equals m1 (+) m2", equal, None, verdict=MATCH)
    rec.info("boundary family", boundary, None, verdict=MATCH)
    if equal and boundary is None:
        rec.check("equality only on an identified boundary", False, True)
        rec.notes.append("m12 equals m1 (+) m2 for parameters outside the identified boundary families")
    return rec


def replicate_roughset(draws: int = 50, seed: int = 20240101) -> ReplicationRecord:
    """Worked all-halves case plus ``draws`` seeded interior parameter draws."""
    rec = ReplicationRecord("roughset")
    half = RoughSetParams.from_free(*[Fraction(1, 2)] * 5)
    m1, _ = rough_expert_masses(half)
    rec.check("all-halves: m1", [m1.mass(s) for s in m1.focals], [Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)])
    rec.check("all-halves: m12", list(rough_joint_mass(half)), [Fraction(3, 8), Fraction(3, 8), Fraction(1, 4)])
    rec.check("all-halves: m1 (+) m2", list(rough_dempster_polynomial(half)), [Fraction(5, 14), Fraction(5, 14), Fraction(2, 7)])
    rng = random.Random(seed)
    poly_ok = 0
    unequal = 0
    off_boundary_equal = []
    for _ in range(draws):
        q = RoughSetParams.random(rng)
        sub = rough_set_compare(q)
        if sub.item("published Dempster polynomial equals generic combination").computed:
            poly_ok += 1
        if sub.item("m12 equals m1 (+) m2").computed:
            if rough_boundary(q) is None:
                off_boundary_equal.append(q)
        else:
            unequal += 1
    rec.check(f"published polynomial equals generic combination ({draws} draws)", poly_ok, draws)
    rec.check(f"draws where m12 differs from m1 (+) m2 ({draws} interior draws)", unequal, draws)
    rec.check("draws with equality outside the boundary families", len(off_boundary_equal), 0)
    rec.notes.append(f"seed {seed}; boundary families: degenerate class prior (p1 in {{0,1}}), deterministic experts")
    return rec


REPLICATIONS = {
    "table1": replicate_table1,
    "conditioning": replicate_conditioning,
    "killer": replicate_killer,
    "implication": replicate_implication,
    "roughset": replicate_roughset,
}


def run(name: str = "all") -> list[ReplicationRecord]:
    if name == "all":
        return [f() for f in REPLICATIONS.values()]
    if name not in REPLICATIONS:
        raise KeyError(f"unknown replication {name!r}; choose from {', '.join(REPLICATIONS)} or all")
    return [REPLICATIONS[name]()]


def records_to_json(records: list[ReplicationRecord], **kwargs) -> str:
    return json.dumps([r.to_dict() for r in records], **kwargs)


def failed(records: list[ReplicationRecord]) -> bool:
    """True iff some record has a mismatch against an unambiguous value."""
    return any(r.verdict == MISMATCH for r in records)
