"""Hypothesis strategies and seeded generators shared by the test modules."""

import random
from fractions import Fraction

from hypothesis import strategies as st

from evidencelab import Frame, MassFunction, Subset


def frame_of(n):
    return Frame([f"x{i}" for i in range(n)])


@st.composite
def masses(draw, min_size=1, max_size=5, frame=None):
    if frame is None:
        frame = frame_of(draw(st.integers(min_size, max_size)))
    full = frame.full_mask
    focals = draw(st.lists(st.integers(1, full), min_size=1, max_size=min(6, full), unique=True))
    weights = draw(st.lists(st.integers(1, 20), min_size=len(focals), max_size=len(focals)))
    total = sum(weights)
    return MassFunction(frame, [(Subset(frame, b), Fraction(w, total)) for b, w in zip(focals, weights)])


@st.composite
def mass_pairs(draw, max_size=5):
    frame = frame_of(draw(st.integers(1, max_size)))
    return draw(masses(frame=frame)), draw(masses(frame=frame))


def random_mass(rng: random.Random, frame: Frame, max_focals: int = 6) -> MassFunction:
    full = frame.full_mask
    k = rng.randint(1, min(max_focals, full))
    focals = rng.sample(range(1, full + 1), k)
    weights = [rng.randint(1, 20) for _ in focals]
    total = sum(weights)
    return MassFunction(frame, [(Subset(frame, b), Fraction(w, total)) for b, w in zip(focals, weights)])


@st.composite
def mass_triples(draw, max_size=5):
    frame = frame_of(draw(st.integers(1, max_size)))
    return tuple(draw(masses(frame=frame)) for _ in range(3))
