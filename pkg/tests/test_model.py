"""Instance data model: validation, serialization, scores, fixtures,
the regional-quota embedding, and the random generator."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import random_instance

from cutoffmatch.model import (
    GADGET_NAMES,
    ValidationError,
    embed_reg,
    format_rational,
    gadget,
    generate_random,
    make_instance,
    parse_rational,
    validate_instance,
)


# -- rationals -----------------------------------------------------------

def test_parse_rational_fraction_and_decimal_strings():
    assert parse_rational("7/10") == Fraction(7, 10)
    assert parse_rational("0.7") == Fraction(7, 10)
    assert parse_rational("2") == Fraction(2)
    assert parse_rational(3) == Fraction(3)


def test_parse_rational_rejects_floats():
    with pytest.raises(ValueError):
        parse_rational(0.7)


def test_format_rational():
    assert format_rational(Fraction(7, 10)) == "7/10"
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"


@given(st.fractions(max_denominator=10**6))
def test_rational_round_trip(x):
    assert parse_rational(format_rational(x)) == x


# -- validation ----------------------------------------------------------

def _raw_ok():
    return {
        "applicants": ["a1", "a2"],
        "projects": [
            {"id": "p1", "capacity": 1, "prefs": ["a1", "a2"]},
            {"id": "p2", "capacity": 1, "prefs": ["a2", "a1"]},
        ],
        "supervisors": [
            {"id": "s1", "budget": "7/10", "projects": ["p1", "p2"]},
            {"id": "s2", "budget": "1/2", "projects": ["p2"]},
        ],
        "applicant_prefs": {"a1": ["p2", "p1"], "a2": ["p1", "p2"]},
    }


def test_validate_accepts_example_shaped_input():
    inst = validate_instance(_raw_ok())
    assert inst == gadget("example1")


def _rules_of(exc):
    return {rule for _, rule, _ in exc.value.violations}


def test_validate_flags_dangling_ids():
    raw = _raw_ok()
    raw["applicant_prefs"]["a1"] = ["p9"]
    with pytest.raises(ValidationError) as exc:
        validate_instance(raw)
    assert "dangling-id" in _rules_of(exc)


def test_validate_flags_duplicates_and_bad_numbers():
    raw = _raw_ok()
    raw["applicants"] = ["a1", "a1", "a2"]
    raw["projects"][0]["capacity"] = -1
    raw["projects"][1]["prefs"] = ["a1", "a1"]
    raw["supervisors"][0]["budget"] = "-1/2"
    raw["supervisors"][1]["budget"] = "not a number"
    with pytest.raises(ValidationError) as exc:
        validate_instance(raw)
    rules = _rules_of(exc)
    assert {"duplicate-id", "negative-capacity", "duplicate-preference",
            "negative-budget", "bad-budget"} <= rules


def test_validate_collects_every_violation_at_once():
    raw = _raw_ok()
    raw["applicants"] = ["a1", "a1", "a2"]
    raw["supervisors"][0]["projects"] = ["p1", "p9"]
    with pytest.raises(ValidationError) as exc:
        validate_instance(raw)
    assert len(exc.value.violations) >= 2


def test_serialization_round_trip():
    inst = gadget("example3_cycle")
    again = validate_instance(__import__("json").loads(inst.to_json()))
    assert again == inst


# -- scores and lookups --------------------------------------------------

def test_scores_follow_rank():
    inst = gadget("example4_distinct")  # 3 applicants
    assert inst.score("a2", "p1") == 3  # first on p1's list
    assert inst.score("a1", "p1") == 2
    assert inst.score("a2", "p3") is None  # not listed
    assert inst.max_cutoff() == 4


def test_prefers_and_project_prefers():
    inst = gadget("example4_distinct")
    assert inst.prefers("a1", "p1", "p2")
    assert not inst.prefers("a1", "p2", "p1")
    assert inst.prefers("a1", "p3", None)          # anything beats unmatched
    assert not inst.prefers("a2", "p3", None)      # unacceptable project
    assert inst.project_prefers("p1", "a2", "a1")
    assert not inst.project_prefers("p1", "a1", "a2")


def test_acceptable_pairs_applicant_major_in_pref_order():
    inst = gadget("thm7_item1")
    assert inst.acceptable_pairs() == [("a1", "p2"), ("a1", "p1"), ("a2", "p2")]


# -- fixtures ------------------------------------------------------------

def test_gadget_names_cover_the_fixture_set():
    assert set(GADGET_NAMES) == {
        "example1", "example2_unsolvable", "example3_cycle",
        "example4_distinct", "thm7_item1", "thm7_item3", "thm7_item4",
    }


def test_gadget_example1_data():
    inst = gadget("example1")
    assert inst.budgets == {"s1": Fraction(7, 10), "s2": Fraction(1, 2)}
    assert inst.supervised == {"s1": ("p1", "p2"), "s2": ("p2",)}
    assert inst.applicant_prefs == {"a1": ("p2", "p1"), "a2": ("p1", "p2")}
    assert inst.project_prefs == {"p1": ("a1", "a2"), "p2": ("a2", "a1")}


def test_gadget_unknown_name():
    with pytest.raises(KeyError):
        gadget("no_such_fixture")


# -- regional-quota embedding --------------------------------------------

def test_embed_reg_regions_become_supervisors():
    inst = embed_reg(
        regions={"north": ["h1", "h2"], "south": ["h3"]},
        region_quotas={"north": 2, "south": 1},
        residents=["r1", "r2", "r3"],
        resident_prefs={"r1": ["h1", "h3"], "r2": ["h2"], "r3": ["h3", "h1"]},
        hospital_prefs={"h1": ["r1", "r3"], "h2": ["r2"], "h3": ["r3", "r1"]},
        hospital_capacities={"h1": 1, "h2": 1, "h3": 1},
    )
    assert inst.supervisors == ("north", "south")
    assert inst.budgets == {"north": Fraction(2), "south": Fraction(1)}
    assert inst.supervised == {"north": ("h1", "h2"), "south": ("h3",)}
    assert inst.capacities == {"h1": 1, "h2": 1, "h3": 1}


def test_embed_reg_rejects_overlapping_regions():
    with pytest.raises(ValueError):
        embed_reg(
            regions={"x": ["h1"], "y": ["h1"]},
            region_quotas={"x": 1, "y": 1},
            residents=["r1"],
            resident_prefs={"r1": ["h1"]},
            hospital_prefs={"h1": ["r1"]},
            hospital_capacities={"h1": 1},
        )


# -- random generator ----------------------------------------------------

def test_generate_random_deterministic():
    a = generate_random(7, 6, 4, 3, pref_density="7/10", budget_range=(0, 3))
    b = generate_random(7, 6, 4, 3, pref_density="7/10", budget_range=(0, 3))
    assert a == b
    c = generate_random(8, 6, 4, 3, pref_density="7/10", budget_range=(0, 3))
    assert a != c


def test_generate_random_well_formed():
    for seed in range(25):
        inst = random_instance(seed)
        # self-inverting serialization doubles as a structural check
        assert validate_instance(__import__("json").loads(inst.to_json())) == inst
        for a in inst.applicants:
            for p in inst.applicant_prefs[a]:
                assert inst.score(a, p) is not None  # mutual acceptability
        for p in inst.projects:
            assert 1 <= len(inst.supervisors_of(p)) <= 3
            assert inst.capacities[p] >= 1
        for q in inst.budgets.values():
            assert 0 <= q <= 3
            assert q.denominator in (1, 2, 4, 5, 10, 20, 25, 50, 100)


def test_make_instance_matches_validate():
    built = make_instance(
        applicants=["a1", "a2"],
        applicant_prefs={"a1": ["p2", "p1"], "a2": ["p1", "p2"]},
        project_prefs={"p1": ["a1", "a2"], "p2": ["a2", "a1"]},
        capacities={"p1": 1, "p2": 1},
        supervised={"s1": ["p1", "p2"], "s2": ["p2"]},
        budgets={"s1": "7/10", "s2": "1/2"},
    )
    assert built == gadget("example1")
