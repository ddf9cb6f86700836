"""Leximin-egalitarian funding allocation relative to normative targets.

Given a feasible matching, repeatedly minimize the largest ratio of
funded amount to target over the pairs not yet pinned, then pin exactly
the pairs that cannot go below the optimum (detected by an auxiliary LP
whose optimum is exactly zero).  The resulting sorted ratio vector is the
lexicographic minimum over all feasible funding allocations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from cutoffmatch.flow import verify_allocation
from cutoffmatch.lp import OPTIMAL, LinearProgram, solve_lp
from cutoffmatch.model import Instance, format_rational
from cutoffmatch.stability import Matching, matching_feasible

Pair = tuple[str, str]


@dataclass(frozen=True)
class TargetProfile:
    """Target share t_{s,p} > 0 per supervisor-project pair.

    Strict mode additionally requires each project's targets to sum to 1;
    lenient mode allows any positive targets (ratios stay well defined).
    """

    targets: Mapping[Pair, Fraction]

    def validate(self, instance: Instance, strict: bool = True) -> None:
        for (s, p), t in self.targets.items():
            if t <= 0:
                raise ValueError(f"target for ({s}, {p}) must be positive, got {t}")
            if p not in instance.supervised[s]:
                raise ValueError(f"({s}, {p}): supervisor does not supervise project")
        if strict:
            for p in instance.projects:
                ss = instance.supervisors_of(p)
                if not ss:
                    continue
                total = sum((self.targets[(s, p)] for s in ss), Fraction(0))
                if total != 1:
                    raise ValueError(
                        f"targets for project {p} sum to {total}, expected 1 (strict mode)"
                    )


@dataclass
class AllocationResult:
    allocation: dict[Pair, Fraction]
    ratios: list[Fraction]                  # weakly decreasing
    fixed_round: dict[Pair, int]            # while-iteration that pinned each pair
    fixed_value: dict[Pair, Fraction]       # the pinned ratio
    lp_solves: int
    rounds: int

    def to_json_dict(self, targets: TargetProfile) -> dict:
        pairs = []
        for (s, p), x in sorted(self.allocation.items()):
            t = targets.targets[(s, p)]
            pairs.append({
                "supervisor": s,
                "project": p,
                "x": format_rational(x),
                "target": format_rational(t),
                "ratio": format_rational(x / t),
                "round_fixed": self.fixed_round[(s, p)],
            })
        return {"pairs": pairs}

    def to_json(self, targets: TargetProfile) -> str:
        return json.dumps(self.to_json_dict(targets), indent=2) + "\n"


def default_targets(instance: Instance, matching: Matching) -> TargetProfile:
    """Equal split: t = 1/|S_p| for every supervisor of each project.

    Rejects a project that has matched applicants but no supervisor (it
    could never be funded, so the matching cannot be feasible anyway).
    """
    counts = matching.counts(instance)
    targets: dict[Pair, Fraction] = {}
    for p in instance.projects:
        ss = instance.supervisors_of(p)
        if not ss:
            if counts[p] > 0:
                raise ValueError(f"project {p} has matched applicants but no supervisor")
            continue
        share = Fraction(1, len(ss))
        for s in ss:
            targets[(s, p)] = share
    return TargetProfile(targets)


def matched_count_targets(instance: Instance, matching: Matching) -> TargetProfile:
    """Targets |M(p)|/|S_p| (lenient mode only: sums exceed 1 when
    |M(p)| > 1, and pairs for unmatched projects get no target)."""
    counts = matching.counts(instance)
    targets: dict[Pair, Fraction] = {}
    for p in instance.projects:
        ss = instance.supervisors_of(p)
        if not ss or counts[p] == 0:
            continue
        for s in ss:
            targets[(s, p)] = Fraction(counts[p], len(ss))
    return TargetProfile(targets)


def _feasibility_lp(
    instance: Instance, counts: Mapping[str, int], pairs: list[Pair],
) -> tuple[LinearProgram, dict[Pair, str]]:
    lp = LinearProgram(maximize=False)
    names: dict[Pair, str] = {}
    for s, p in pairs:
        names[(s, p)] = lp.add_variable(f"x_{s}_{p}", Fraction(0))
    for p in instance.projects:
        coeffs = {names[(s, p)]: 1 for s in instance.supervisors_of(p) if (s, p) in names}
        if coeffs or counts.get(p, 0):
            lp.add_constraint(coeffs, "=", counts.get(p, 0))
    for s in instance.supervisors:
        coeffs = {names[(s, p)]: 1 for p in instance.supervised[s] if (s, p) in names}
        if coeffs:
            lp.add_constraint(coeffs, "<=", instance.budgets[s])
    return lp, names


def egalitarian_allocation(
    instance: Instance, matching: Matching, targets: TargetProfile | None = None,
    strict: bool = True,
) -> AllocationResult:
    """Run the iterated minimax allocation for a feasible matching.

    Each while-iteration pins at least one pair, so there are at most |T|
    iterations and at most |T|^2 + |T| LP solves in total.
    """
    if not matching_feasible(instance, matching):
        raise ValueError("matching is not feasible; no funding allocation exists")
    if targets is None:
        targets = default_targets(instance, matching)
    targets.validate(instance, strict=strict)

    counts = matching.counts(instance)
    pairs = sorted(targets.targets)
    lp_solves = 0
    fixed_value: dict[Pair, Fraction] = {}
    fixed_round: dict[Pair, int] = {}
    rounds = 0
    allocation: dict[Pair, Fraction] = {sp: Fraction(0) for sp in pairs}

    while len(fixed_value) < len(pairs):
        rounds += 1
        free = [sp for sp in pairs if sp not in fixed_value]

        lp, names = _feasibility_lp(instance, counts, pairs)
        lam = lp.add_variable("lam", Fraction(0), objective=1)
        for sp in free:
            t = targets.targets[sp]
            lp.add_constraint({names[sp]: Fraction(1, 1) / t, lam: -1}, "<=", 0)
        for sp, val in fixed_value.items():
            t = targets.targets[sp]
            lp.add_constraint({names[sp]: Fraction(1, 1) / t}, "=", val)
        sol = solve_lp(lp)
        lp_solves += 1
        if sol.status != OPTIMAL:
            raise RuntimeError(f"minimax LP unexpectedly {sol.status}")
        lam_star = sol[lam]

        newly_tight = []
        for target_pair in free:
            lp2, names2 = _feasibility_lp(instance, counts, pairs)
            eps = lp2.add_variable("eps", Fraction(0), objective=1)
            lp2.maximize = True
            for sp in free:
                t = targets.targets[sp]
                if sp == target_pair:
                    lp2.add_constraint({names2[sp]: Fraction(1, 1) / t, eps: 1}, "<=", lam_star)
                else:
                    lp2.add_constraint({names2[sp]: Fraction(1, 1) / t}, "<=", lam_star)
            for sp, val in fixed_value.items():
                t = targets.targets[sp]
                lp2.add_constraint({names2[sp]: Fraction(1, 1) / t}, "=", val)
            sol2 = solve_lp(lp2)
            lp_solves += 1
            if sol2.status != OPTIMAL:
                raise RuntimeError(f"auxiliary LP unexpectedly {sol2.status}")
            if sol2.objective == 0:
                newly_tight.append(target_pair)
        if not newly_tight:
            raise RuntimeError("no pair became tight; minimax reasoning violated")
        for sp in newly_tight:
            fixed_value[sp] = lam_star
            fixed_round[sp] = rounds
        for sp in pairs:
            allocation[sp] = sol[names[sp]]

    # a pair pinned in the final round already sits exactly at its pinned
    # ratio in that round's minimax solution (its auxiliary slack was zero)
    ratios = sorted(
        (allocation[sp] / targets.targets[sp] for sp in pairs), reverse=True
    )
    assert verify_allocation(instance, counts, allocation)
    return AllocationResult(allocation, ratios, fixed_round, fixed_value, lp_solves, rounds)


def verify_leximin(
    instance: Instance, matching: Matching, targets: TargetProfile,
    allocation: Mapping[Pair, Fraction],
) -> bool:
    """Independent check that an allocation's sorted ratio vector is the
    lexicographic minimum.

    Re-derives the optimal vector prefix by prefix (minimax re-solve with
    previously pinned values) and compares multisets at every stage.
    """
    counts = matching.counts(instance)
    if not verify_allocation(instance, counts, allocation):
        return False
    pairs = sorted(targets.targets)
    if set(allocation) != set(pairs):
        return False
    candidate = sorted(
        (allocation[sp] / targets.targets[sp] for sp in pairs), reverse=True
    )

    fixed_value: dict[Pair, Fraction] = {}
    remaining = list(candidate)
    while len(fixed_value) < len(pairs):
        free = [sp for sp in pairs if sp not in fixed_value]
        lp, names = _feasibility_lp(instance, counts, pairs)
        lam = lp.add_variable("lam", Fraction(0), objective=1)
        for sp in free:
            t = targets.targets[sp]
            lp.add_constraint({names[sp]: Fraction(1, 1) / t, lam: -1}, "<=", 0)
        for sp, val in fixed_value.items():
            t = targets.targets[sp]
            lp.add_constraint({names[sp]: Fraction(1, 1) / t}, "=", val)
        sol = solve_lp(lp)
        if sol.status != OPTIMAL:
            return False
        lam_star = sol[lam]
        if not remaining or remaining[0] != lam_star:
            return False
        tight = []
        for target_pair in free:
            lp2, names2 = _feasibility_lp(instance, counts, pairs)
            eps = lp2.add_variable("eps", Fraction(0), objective=1)
            lp2.maximize = True
            for sp in free:
                t = targets.targets[sp]
                if sp == target_pair:
                    lp2.add_constraint({names2[sp]: Fraction(1, 1) / t, eps: 1}, "<=", lam_star)
                else:
                    lp2.add_constraint({names2[sp]: Fraction(1, 1) / t}, "<=", lam_star)
            for sp, val in fixed_value.items():
                t = targets.targets[sp]
                lp2.add_constraint({names2[sp]: Fraction(1, 1) / t}, "=", val)
            sol2 = solve_lp(lp2)
            if sol2.status != OPTIMAL:
                return False
            if sol2.objective == 0:
                tight.append(target_pair)
        if not tight:
            return False
        for sp in tight:
            fixed_value[sp] = lam_star
            if not remaining or remaining[0] != lam_star:
                return False
            remaining.pop(0)
    return not remaining
