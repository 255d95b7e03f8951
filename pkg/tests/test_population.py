import itertools
import json
import random
from fractions import Fraction

import pytest

from evidencelab import Frame, MassFunction, condition, dempster_combine, simple_support
from evidencelab.errors import (
    CapacityExceeded,
    DiscardedObject,
    EmptyLabel,
    EmptyPopulation,
    FormatError,
    InadmissibleLabel,
    InvalidProcess,
    UnknownObject,
)
from evidencelab.population import (
    Labeling,
    LabelingProcessSpec,
    PopulationSpec,
    apply_general_process,
    apply_simple_process,
    distributional_mass,
    measure,
    modified_measure,
    pop_belief,
    pop_mass,
    pop_plausibility,
    process_mass,
    random_labeling,
    random_population,
    random_process,
    verify_theorem8,
)

D = Frame(["d1", "d2", "d3"])


def table1_population():
    return PopulationSpec.from_values(D, [["d1"], ["d2", "d3"], ["d2", "d3"], ["d3"], ["d1"]])


def naive_expected_belief(pop, l, proc):
    """Enumerate every per-object label choice one by one."""
    alive = [o for o in pop if l[o.id]]
    acc = {a: Fraction(0) for a in pop.frame.subsets()}
    nonempty = Fraction(0)
    for choice in itertools.product(range(len(proc)), repeat=len(alive)):
        p = Fraction(1)
        for c in choice:
            p *= proc.probabilities[c]
        labels = {o.id: pop.frame.empty for o in pop}
        for o, c in zip(alive, choice):
            inter = l[o.id] & proc.labels[c]
            labels[o.id] = inter if not inter.isdisjoint(o.value) else pop.frame.empty
        new = Labeling(labels)
        try:
            bels = {a: pop_belief(pop, new, a) for a in pop.frame.subsets()}
        except EmptyPopulation:
            continue
        nonempty += p
        for a in acc:
            acc[a] += p * bels[a]
    return {a: v / nonempty for a, v in acc.items()}, 1 - nonempty


def fixtures(seed, count, max_frame=4, max_objects=10):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        frame = Frame([f"x{i}" for i in range(rng.randint(1, max_frame))])
        pop = random_population(rng, frame, rng.randint(1, max_objects))
        l = random_labeling(rng, pop)
        if l.survivors():
            out.append((rng, pop, l))
    return out


class TestPopulationSpec:
    def test_from_values(self):
        pop = table1_population()
        assert len(pop) == 5 and pop.get("2").value == D.subset(["d2", "d3"])
        with pytest.raises(UnknownObject):
            pop.get("9")

    def test_round_trip(self):
        pop = PopulationSpec.from_values(D, [["d1"], ["d3"]], weights=[Fraction(1, 3), 2])
        again = PopulationSpec.from_dict(json.loads(json.dumps(pop.to_dict())))
        assert again.to_dict() == pop.to_dict()

    def test_malformed(self):
        with pytest.raises(FormatError):
            PopulationSpec.from_dict({"frame": ["a"]})

    def test_empty_value_rejected(self):
        with pytest.raises(ValueError):
            PopulationSpec.from_values(D, [[]])


class TestMeasure:
    def test_examples(self):
        pop = table1_population()
        assert measure(pop, "2", D.subset(["d2"]))
        assert not measure(pop, "2", D.subset(["d1"]))
        assert not measure(pop, "1", D.empty)

    def test_axioms_on_random_objects(self):
        for rng, pop, _ in fixtures(1, 40):
            subs = list(pop.frame.subsets())
            for o in pop:
                assert measure(pop, o.id, pop.frame.full)
                for a in subs:
                    got = measure(pop, o.id, a)
                    assert got == any(measure(pop, o.id, s) for s in a.frame.singletons() if s <= a)
                    for b in subs:
                        if a <= b and got:
                            assert measure(pop, o.id, b)

    def test_modified(self):
        pop = table1_population()
        l = Labeling({"1": D.full, "2": D.subset(["d2"]), "3": D.full, "4": D.full, "5": D.empty})
        assert modified_measure(pop, l, "2", D.subset(["d2", "d3"]))
        assert not modified_measure(pop, l, "2", D.subset(["d3"]))
        with pytest.raises(DiscardedObject):
            modified_measure(pop, l, "5", D.full)


class TestPopMass:
    def test_table1(self, table1_mass):
        pop = table1_population()
        assert pop_mass(pop, Labeling.unlabeled(pop)) == table1_mass

    def test_label_narrows_value(self):
        pop = PopulationSpec.from_values(D, [["d1", "d2"]])
        l = Labeling({"1": D.subset(["d2", "d3"])})
        assert dict(pop_mass(pop, l).focals) == {D.subset(["d2"]): 1}

    def test_belief_plausibility_examples(self):
        pop = table1_population()
        l = Labeling.unlabeled(pop)
        assert pop_belief(pop, l, D.subset(["d1", "d3"])) == Fraction(3, 5)
        assert pop_plausibility(pop, l, D.subset(["d2"])) == Fraction(2, 5)

    def test_weights(self):
        pop = PopulationSpec.from_values(D, [["d1"], ["d2"]], weights=[3, 1])
        assert pop_mass(pop, Labeling.unlabeled(pop)).mass(D.subset(["d1"])) == Fraction(3, 4)

    def test_inadmissible(self):
        pop = table1_population()
        with pytest.raises(InadmissibleLabel):
            pop_mass(pop, Labeling({"1": D.subset(["d2"]), "2": D.full, "3": D.full, "4": D.full, "5": D.full}))
        with pytest.raises(InadmissibleLabel):
            pop_mass(pop, Labeling({"1": D.full}))

    def test_empty_population(self):
        pop = table1_population()
        with pytest.raises(EmptyPopulation):
            pop_mass(pop, Labeling({o.id: D.empty for o in pop}))

    def test_belief_plausibility_consistency_on_random_fixtures(self):
        for _, pop, l in fixtures(2, 200):
            m = pop_mass(pop, l)
            full = pop.frame.full
            for a in pop.frame.subsets():
                bel = pop_belief(pop, l, a)
                assert bel == sum((v for b, v in m.focals.items() if b <= a), Fraction(0))
                assert pop_plausibility(pop, l, a) == 1 - pop_belief(pop, l, full - a)
                assert bel == m.belief(a)


class TestSimpleProcess:
    def test_table1(self):
        pop = table1_population()
        label = D.subset(["d1", "d2"])
        new = apply_simple_process(pop, Labeling.unlabeled(pop), label)
        assert new.survivors() == ["1", "2", "3", "5"]
        assert all(new[i] == label for i in new.survivors())

    def test_full_frame(self):
        pop = table1_population()
        l = Labeling.unlabeled(pop)
        assert apply_simple_process(pop, l, D.full) == l

    def test_all_discarded(self):
        pop = PopulationSpec.from_values(Frame(["a", "b", "c"]), [["a"], ["b"]])
        new = apply_simple_process(pop, Labeling.unlabeled(pop), pop.frame.subset(["c"]))
        assert new.survivors() == []

    def test_empty_label(self):
        pop = table1_population()
        with pytest.raises(EmptyLabel):
            apply_simple_process(pop, Labeling.unlabeled(pop), D.empty)

    def test_idempotent(self):
        for rng, pop, l in fixtures(3, 60):
            label = pop.frame.from_bits(rng.randint(1, pop.frame.full_mask))
            once = apply_simple_process(pop, l, label)
            assert apply_simple_process(pop, once, label) == once


class TestSimpleProcessMatchesConditioning:
    def test_table1(self):
        pop = table1_population()
        rep = verify_theorem8(pop, Labeling.unlabeled(pop), D.subset(["d1", "d2"]))
        assert rep.equal and rep.belief_checked
        assert dict(rep.processed.focals) == {D.subset(["d1"]): Fraction(1, 2), D.subset(["d2"]): Fraction(1, 2)}

    def test_full_frame(self):
        pop = table1_population()
        assert verify_theorem8(pop, Labeling.unlabeled(pop), D.full).equal

    def test_no_survivors(self):
        pop = PopulationSpec.from_values(Frame(["a", "b"]), [["a"]])
        with pytest.raises(EmptyPopulation):
            verify_theorem8(pop, Labeling.unlabeled(pop), pop.frame.subset(["b"]))

    def test_random(self):
        checked = 0
        for rng, pop, l in fixtures(4, 300):
            label = pop.frame.from_bits(rng.randint(1, pop.frame.full_mask))
            if not apply_simple_process(pop, l, label).survivors():
                continue
            rep = verify_theorem8(pop, l, label)
            assert rep.equal
            # independent oracle: the definitional belief after processing
            new = apply_simple_process(pop, l, label)
            expected = condition(pop_mass(pop, l), label).combined
            assert all(pop_belief(pop, new, a) == expected.belief(a) for a in pop.frame.subsets())
            checked += 1
            if checked == 100:
                break
        assert checked == 100


class TestProcessSpec:
    def test_process_mass_is_valid(self):
        rng = random.Random(9)
        for _ in range(100):
            frame = Frame(range(rng.randint(1, 4)))
            proc = random_process(rng, frame)
            m = process_mass(proc)
            assert isinstance(m, MassFunction) and sum(m.focals.values()) == 1

    @pytest.mark.parametrize(
        "labels, probs",
        [
            ([], []),
            ([D.full], [Fraction(1, 2)]),
            ([D.full, D.subset(["d1"])], [1, 0]),
            ([D.full, D.full], [Fraction(1, 2), Fraction(1, 2)]),
            ([D.empty], [1]),
            ([D.full], [0.5]),
        ],
    )
    def test_invalid(self, labels, probs):
        with pytest.raises(InvalidProcess):
            LabelingProcessSpec(labels, probs)

    def test_round_trip(self):
        proc = LabelingProcessSpec([D.subset(["d1", "d2"]), D.subset(["d3"])], ["1/2", "1/2"])
        again = LabelingProcessSpec.from_dict(json.loads(json.dumps(proc.to_dict())), D)
        assert again.labels == proc.labels and again.probabilities == proc.probabilities


class TestGeneralProcess:
    proc = LabelingProcessSpec([D.subset(["d1", "d2"]), D.subset(["d3"])], [Fraction(1, 2), Fraction(1, 2)])

    def test_single_label_reduces_to_simple(self):
        pop = table1_population()
        l = Labeling.unlabeled(pop)
        label = D.subset(["d1", "d2"])
        rep = apply_general_process(pop, l, LabelingProcessSpec.simple(label))
        t8 = verify_theorem8(pop, l, label)
        assert rep.empty_probability == 0
        assert rep.expected_belief == [t8.processed.belief(a) for a in rep.subsets()]
        assert rep.max_deviation == 0 and rep.distributional_equal

    def test_table1_exact_against_naive(self):
        pop = table1_population()
        l = Labeling.unlabeled(pop)
        rep = apply_general_process(pop, l, self.proc)
        expected, empty = naive_expected_belief(pop, l, self.proc)
        assert rep.empty_probability == empty
        assert rep.expected_belief == [expected[a] for a in rep.subsets()]
        dempster = dempster_combine(pop_mass(pop, l), process_mass(self.proc)).combined
        assert rep.dempster_belief == [dempster.belief(a) for a in rep.subsets()]
        assert rep.deviation == [abs(expected[a] - dempster.belief(a)) for a in rep.subsets()]
        assert rep.distributional_equal

    def test_random_exact_against_naive(self):
        for rng, pop, l in fixtures(5, 40, max_frame=3, max_objects=6):
            proc = random_process(rng, pop.frame)
            try:
                expected, empty = naive_expected_belief(pop, l, proc)
            except ZeroDivisionError:
                with pytest.raises(EmptyPopulation):
                    apply_general_process(pop, l, proc)
                continue
            rep = apply_general_process(pop, l, proc)
            assert rep.empty_probability == empty
            assert rep.expected_belief == [expected[a] for a in rep.subsets()]

    def test_distributional_equals_dempster(self):
        checked = 0
        for rng, pop, l in fixtures(6, 150):
            proc = random_process(rng, pop.frame)
            try:
                dempster = dempster_combine(pop_mass(pop, l), process_mass(proc)).combined
            except Exception:
                continue
            assert distributional_mass(pop, l, proc) == dempster
            checked += 1
        assert checked >= 100

    def test_monte_carlo_within_three_se(self):
        pop = table1_population()
        l = Labeling.unlabeled(pop)
        exact = apply_general_process(pop, l, self.proc)
        mc = apply_general_process(pop, l, self.proc, mode="mc", trials=100_000, seed=7)
        for e, mean, se in zip(exact.expected_belief, mc.mc_mean, mc.mc_stderr):
            assert abs(mean - float(e)) <= 3 * se + 1e-12

    def test_monte_carlo_deterministic(self):
        pop = table1_population()
        l = Labeling.unlabeled(pop)
        a = apply_general_process(pop, l, self.proc, mode="mc", trials=3000, seed=1)
        b = apply_general_process(pop, l, self.proc, mode="monte_carlo", trials=3000, seed=1)
        assert a.to_json() == b.to_json()

    def test_capacity(self):
        pop = PopulationSpec.from_values(D, [["d1", "d2", "d3"]] * 21)
        with pytest.raises(CapacityExceeded):
            apply_general_process(pop, Labeling.unlabeled(pop), self.proc)
        rep = apply_general_process(pop, Labeling.unlabeled(pop), self.proc, mode="mc", trials=500)
        assert rep.mc_trials == 500

    def test_report_rendering(self):
        pop = table1_population()
        rep = apply_general_process(pop, Labeling.unlabeled(pop), self.proc)
        data = json.loads(rep.to_json())
        assert data["mode"] == "exact" and len(data["expected_belief"]) == 8
        assert "probability of an empty population" in rep.to_table()

    def test_simple_support_process_mass(self):
        assert process_mass(LabelingProcessSpec.simple(D.subset(["d3"]))) == simple_support(D, D.subset(["d3"]))
