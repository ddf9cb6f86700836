"""Shared helpers for the test suite.

Random sweeps are seed-indexed and deterministic: the instance shape
(applicant/project/supervisor counts) is drawn from the seed, then the
instance itself comes from the library generator with that same seed.
"""

import random
from fractions import Fraction

import pytest

from cutoffmatch.model import generate_random
from cutoffmatch.oracle import SmtiInstance
from cutoffmatch.stability import Matching


def M(*pairs):
    """Shorthand matching constructor."""
    return Matching(frozenset(pairs))


def pair_sets(matchings):
    """Canonical, comparable form of a collection of matchings."""
    return sorted(sorted(m.pairs) for m in matchings)


def random_instance(seed, max_applicants=8, max_projects=8, max_supervisors=4,
                    density="7/10", budget_range=(0, 3)):
    rng = random.Random(seed)
    n_a = rng.randint(2, max_applicants)
    n_p = rng.randint(2, max_projects)
    n_s = rng.randint(1, max_supervisors)
    return generate_random(seed, n_a, n_p, n_s,
                           pref_density=Fraction(density),
                           budget_range=budget_range)


def sweep(count, start=0, **shape):
    for seed in range(start, start + count):
        yield seed, random_instance(seed, **shape)


def random_matching(instance, rng):
    """A uniform-ish valid matching: each applicant picks one of her
    acceptable projects or stays unmatched, respecting capacities."""
    counts = {p: 0 for p in instance.projects}
    pairs = []
    for a in instance.applicants:
        options = [None] + [
            p for p in instance.applicant_prefs[a]
            if instance.score(a, p) is not None
            and counts[p] < instance.capacities[p]
        ]
        p = rng.choice(options)
        if p is not None:
            counts[p] += 1
            pairs.append((a, p))
    return Matching(frozenset(pairs))


def random_smti(seed, max_men=3, max_ties=1, balanced=False):
    """A restricted SMTI instance: men strict, each woman strict or holding
    a single tie of exactly two men.

    ``balanced`` forces equal numbers of men and women, the shape the
    strong-stability reduction is defined for (completeness is trivially
    impossible otherwise)."""
    rng = random.Random(seed)
    n_men = rng.randint(1, max_men)
    men = tuple(f"m{i}" for i in range(1, n_men + 1))
    n_women = n_men if balanced else rng.randint(1, 3)
    women = [f"w{j}" for j in range(1, n_women + 1)]

    accept = {}
    for w in women:
        size = rng.randint(1, n_men)
        accept[w] = rng.sample(men, size)
    # make sure every man lists someone
    for m in men:
        if not any(m in accept[w] for w in women):
            accept[rng.choice(women)].append(m)

    women_strict, women_tie = {}, {}
    ties = 0
    for w in women:
        ms = accept[w]
        if len(ms) == 2 and ties < max_ties and rng.random() < Fraction(1, 2):
            women_tie[w] = tuple(ms)
            ties += 1
        else:
            rng.shuffle(ms)
            women_strict[w] = tuple(ms)

    men_prefs = {}
    for m in men:
        listed = [w for w in women if m in accept[w]]
        rng.shuffle(listed)
        men_prefs[m] = tuple(listed)
    return SmtiInstance(men=men, men_prefs=men_prefs,
                        women_strict=women_strict, women_tie=women_tie)


@pytest.fixture
def rng():
    return random.Random(20240817)
