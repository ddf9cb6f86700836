"""Matchings, cutoff vectors, and the stability hierarchy.

Three nested stability notions sit above fairness: weak, cutoff, and
strong.  All of them start from the same blocking-pair definition and
differ in which blocking pairs are tolerated:

* weak: adding the blocking applicant on top of the current matching
  (keeping her old contract) would break budget feasibility;
* cutoff: moving her would break feasibility, or some better-ranked rival
  who also wants the project cannot be moved in either, or the project is
  full;
* strong: moving her (dropping her old contract) would break feasibility.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from cutoffmatch.flow import SipFeasibility
from cutoffmatch.model import Instance

LEVELS = ("infeasible", "unfair", "fair", "weak", "cutoff", "strong")


@dataclass(frozen=True)
class Matching:
    """A set of (applicant, project) pairs."""

    pairs: frozenset[tuple[str, str]]

    @classmethod
    def of(cls, pairs: Iterable[tuple[str, str]]) -> "Matching":
        return cls(frozenset(pairs))

    def project_of(self, applicant: str) -> str | None:
        for a, p in self.pairs:
            if a == applicant:
                return p
        return None

    def applicants_at(self, project: str) -> frozenset[str]:
        return frozenset(a for a, p in self.pairs if p == project)

    def counts(self, instance: Instance) -> dict[str, int]:
        counts = {p: 0 for p in instance.projects}
        for _, p in self.pairs:
            counts[p] += 1
        return counts

    def is_valid(self, instance: Instance) -> bool:
        """Per-applicant uniqueness, mutual acceptability, capacities."""
        seen = set()
        for a, p in self.pairs:
            if a in seen:
                return False
            seen.add(a)
            if a not in instance._scores.get(p, {}):
                return False
            if p not in instance._applicant_rank.get(a, {}):
                return False
        for p, c in self.counts(instance).items():
            if c > instance.capacities[p]:
                return False
        return True

    def sorted_pairs(self, instance: Instance) -> list[tuple[str, str]]:
        order = {a: i for i, a in enumerate(instance.applicants)}
        return sorted(self.pairs, key=lambda ap: order.get(ap[0], len(order)))

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class CutoffVector:
    """Per-project integer cutoffs in [0, |A|+1]."""

    cutoffs: Mapping[str, int]

    def __getitem__(self, project: str) -> int:
        return self.cutoffs[project]

    def decremented(self, project: str) -> "CutoffVector":
        d = dict(self.cutoffs)
        d[project] -= 1
        return CutoffVector(d)

    def in_range(self, instance: Instance) -> bool:
        return all(0 <= self.cutoffs[p] <= instance.max_cutoff() for p in instance.projects)


@dataclass
class StabilityVerdict:
    """Classification of a matching plus the pairs blocking the next level."""

    level: str
    witnesses: list[dict] = field(default_factory=list)

    def at_least(self, level: str) -> bool:
        return LEVELS.index(self.level) >= LEVELS.index(level)

    def to_json_dict(self) -> dict:
        return {"level": self.level, "witnesses": self.witnesses}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"


# -- feasibility of matching edits (count-vector semantics) ---------------


def matching_feasible(instance: Instance, matching: Matching,
                      feas: SipFeasibility | None = None) -> bool:
    feas = feas or SipFeasibility(instance)
    return matching.is_valid(instance) and feas(matching.counts(instance))


def augment_feasible(instance: Instance, matching: Matching, applicant: str,
                     project: str, feas: SipFeasibility) -> bool:
    """Feasibility of M + (a,p) with a keeping her old contract.

    The applicant may briefly hold two contracts, so only the count vector
    and the target project's capacity/acceptability matter.
    """
    if not instance.mutually_acceptable(applicant, project):
        return False
    counts = matching.counts(instance)
    if counts[project] + 1 > instance.capacities[project]:
        return False
    counts[project] += 1
    return feas(counts)


def swap_feasible(instance: Instance, matching: Matching, applicant: str,
                  project: str, feas: SipFeasibility) -> bool:
    """Feasibility of (M + (a,p)) - (a, M(a)): a moves to p."""
    old = matching.project_of(applicant)
    pairs = set(matching.pairs)
    if old is not None:
        pairs.discard((applicant, old))
    pairs.add((applicant, project))
    moved = Matching(frozenset(pairs))
    return matching_feasible(instance, moved, feas)


# -- blocking pairs and fairness -----------------------------------------


def blocking_pairs(instance: Instance, matching: Matching) -> list[tuple[str, str]]:
    """All blocking pairs, applicant-major then by the applicant's preference."""
    out = []
    for a in instance.applicants:
        current = matching.project_of(a)
        for p in instance.applicant_prefs[a]:
            if not instance.prefers(a, p, current):
                break  # prefs are scanned best-first; rest are worse
            if (a, p) in matching.pairs:
                continue
            assigned = matching.applicants_at(p)
            under_capacity = (
                len(assigned) < instance.capacities[p]
                and instance.score(a, p) is not None
            )
            outranks_someone = any(
                instance.project_prefers(p, a, b) for b in assigned
            )
            if under_capacity or outranks_someone:
                out.append((a, p))
    return out


def is_fair(instance: Instance, matching: Matching) -> tuple[bool, list[tuple[str, str]]]:
    """No justified envy: nobody prefers a project that admitted someone it
    ranks below her.  Returns (fair, envy witnesses)."""
    witnesses = []
    for a in instance.applicants:
        current = matching.project_of(a)
        for p in instance.applicant_prefs[a]:
            if not instance.prefers(a, p, current):
                break
            if any(instance.project_prefers(p, a, b) for b in matching.applicants_at(p)):
                witnesses.append((a, p))
    return not witnesses, witnesses


# -- cutoffs --------------------------------------------------------------


def induce(instance: Instance, cutoffs: CutoffVector) -> Matching:
    """The matching induced by cutoffs: each applicant takes her best
    project where her score reaches the cutoff.

    The result is *unchecked*: it may violate capacities or feasibility;
    callers validate separately.
    """
    pairs = []
    for a in instance.applicants:
        for p in instance.applicant_prefs[a]:
            z = instance.score(a, p)
            if z is not None and z >= cutoffs[p]:
                pairs.append((a, p))
                break
    return Matching(frozenset(pairs))


def cutoffs_for(instance: Instance, matching: Matching) -> CutoffVector:
    """Canonical cutoffs inducing a fair matching: per project, the score of
    the lowest-ranked admitted applicant, or |A|+1 for empty projects."""
    fair, witnesses = is_fair(instance, matching)
    if not fair:
        raise ValueError(f"matching is unfair (no cutoffs induce it): {witnesses}")
    cut = {}
    for p in instance.projects:
        assigned = matching.applicants_at(p)
        if assigned:
            cut[p] = min(instance.score(a, p) for a in assigned)
        else:
            cut[p] = instance.max_cutoff()
    return CutoffVector(cut)


def is_unconstrained(instance: Instance, matching: Matching, project: str,
                     feas: SipFeasibility | None = None) -> bool:
    """True iff any one additional (mutually acceptable) applicant could
    join the project without breaking validity or feasibility."""
    feas = feas or SipFeasibility(instance)
    candidates = [
        a for a in instance.project_prefs[project]
        if project in instance._applicant_rank[a] and (a, project) not in matching.pairs
    ]
    return all(augment_feasible(instance, matching, a, project, feas) for a in candidates)


# -- classification -------------------------------------------------------


def check_stability(instance: Instance, matching: Matching,
                    feas: SipFeasibility | None = None) -> StabilityVerdict:
    """Classify a matching at the highest stability level it satisfies.

    Levels: infeasible < unfair < fair < weak < cutoff < strong.  The
    "fair" level covers matchings that are feasible and envy-free but
    wasteful (some blocking pair could simply be added).  Witnesses name
    the blocking pairs that break the next level up.
    """
    feas = feas or SipFeasibility(instance)
    if not matching_feasible(instance, matching, feas):
        return StabilityVerdict("infeasible")
    fair, envy = is_fair(instance, matching)
    if not fair:
        return StabilityVerdict(
            "unfair",
            [{"applicant": a, "project": p, "reason": "justified-envy"} for a, p in envy],
        )

    blockers = blocking_pairs(instance, matching)

    def tolerated_weak(a: str, p: str) -> bool:
        all_preferred = all(
            instance.project_prefers(p, b, a) for b in matching.applicants_at(p)
        )
        return all_preferred and not augment_feasible(instance, matching, a, p, feas)

    def tolerated_cutoff(a: str, p: str) -> bool:
        if len(matching.applicants_at(p)) >= instance.capacities[p]:
            return True
        if not swap_feasible(instance, matching, a, p, feas):
            return True
        # a better-ranked rival outside M(p) who also wants p and cannot move
        for b in instance.project_prefs[p]:
            if b == a or not instance.project_prefers(p, b, a):
                continue
            if (b, p) in matching.pairs:
                continue
            if instance.prefers(b, p, matching.project_of(b)) and not swap_feasible(
                instance, matching, b, p, feas
            ):
                return True
        return False

    def tolerated_strong(a: str, p: str) -> bool:
        all_preferred = all(
            instance.project_prefers(p, b, a) for b in matching.applicants_at(p)
        )
        return all_preferred and not swap_feasible(instance, matching, a, p, feas)

    weak_breakers = [bp for bp in blockers if not tolerated_weak(*bp)]
    if weak_breakers:
        return StabilityVerdict(
            "fair",
            [{"applicant": a, "project": p, "reason": "weakly-wasteful"}
             for a, p in weak_breakers],
        )
    cutoff_breakers = [bp for bp in blockers if not tolerated_cutoff(*bp)]
    if cutoff_breakers:
        return StabilityVerdict(
            "weak",
            [{"applicant": a, "project": p, "reason": "cutoff-wasteful"}
             for a, p in cutoff_breakers],
        )
    strong_breakers = [bp for bp in blockers if not tolerated_strong(*bp)]
    if strong_breakers:
        return StabilityVerdict(
            "cutoff",
            [{"applicant": a, "project": p, "reason": "strongly-wasteful"}
             for a, p in strong_breakers],
        )
    return StabilityVerdict("strong")


def pareto_dominates(instance: Instance, m1: Matching, m2: Matching) -> bool:
    """True iff every applicant weakly prefers her m1 project (unmatched is
    worst) and at least one strictly prefers it."""
    strict = False
    for a in instance.applicants:
        p1, p2 = m1.project_of(a), m2.project_of(a)
        if p1 == p2:
            continue
        if p1 is None:
            return False  # lost her match
        if not instance.prefers(a, p1, p2):
            return False
        strict = True
    return strict
