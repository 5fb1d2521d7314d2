"""Negotiation domains, bids, and additive utility profiles.

A domain is an ordered list of discrete issues; a bid assigns one value to
every issue.  Party preferences are additive-linear: a normalized weight per
issue and a [0, 1] evaluation per value, giving ``u(bid) = sum(w_i * e_i(v_i))``
in [0, 1].  Everything here is an immutable value type, so all operations are
referentially transparent and safe under arbitrary concurrency.

The enumeration order of a bid space (lexicographic over issue order) is the
global tie-break index used by every deterministic argmin/argmax downstream.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import (
    DomainMismatchError,
    InvalidBidError,
    InvalidDomainError,
    InvalidNeedsError,
    InvalidProfileError,
)

WEIGHT_SUM_TOL = 1e-9
EVAL_MAX_TOL = 1e-9

PARTIES = ("H", "P")


@dataclass(frozen=True)
class Issue:
    """A named negotiation issue with an ordered list of discrete values."""

    name: str
    values: tuple[str, ...]

    @classmethod
    def create(cls, name: str, values: Sequence[str]) -> "Issue":
        issue = cls(name=str(name), values=tuple(str(v) for v in values))
        problems = validate_issue(issue)
        if problems:
            raise InvalidDomainError("; ".join(problems))
        return issue


@dataclass(frozen=True)
class Domain:
    """An ordered collection of issues; its bid space is their product."""

    name: str
    issues: tuple[Issue, ...]

    @classmethod
    def create(cls, name: str, issues: Sequence[Issue]) -> "Domain":
        domain = cls(name=str(name), issues=tuple(issues))
        problems = validate_domain(domain)
        if problems:
            raise InvalidDomainError("; ".join(problems))
        return domain

    def issue_index(self, issue_name: str) -> int:
        for i, issue in enumerate(self.issues):
            if issue.name == issue_name:
                return i
        raise InvalidBidError(f"unknown issue {issue_name!r} in domain {self.name!r}")

    def size(self) -> int:
        return math.prod(len(issue.values) for issue in self.issues)

    def bid_index(self, bid: "Bid") -> int:
        """Position of `bid` in the lexicographic enumeration of the space."""
        ensure_valid_bid(self, bid)
        index = 0
        for issue, value in zip(self.issues, bid.values):
            index = index * len(issue.values) + issue.values.index(value)
        return index

    def bid_from_mapping(self, assignment: Mapping[str, str]) -> "Bid":
        values = []
        for issue in self.issues:
            if issue.name not in assignment:
                raise InvalidBidError(f"missing value for issue {issue.name!r}")
            values.append(str(assignment[issue.name]))
        extra = set(assignment) - {issue.name for issue in self.issues}
        if extra:
            raise InvalidBidError(f"unknown issues in bid: {sorted(extra)}")
        bid = Bid(values=tuple(values))
        ensure_valid_bid(self, bid)
        return bid

    def bid_to_mapping(self, bid: "Bid") -> dict[str, str]:
        return {issue.name: value for issue, value in zip(self.issues, bid.values)}


@dataclass(frozen=True)
class Bid:
    """A complete assignment: one value per domain issue, in issue order."""

    values: tuple[str, ...]


def validate_issue(issue: Issue) -> list[str]:
    problems = []
    if not issue.name:
        problems.append("issue name empty")
    if len(issue.values) < 1:
        problems.append(f"issue {issue.name!r} has no values")
    if len(set(issue.values)) != len(issue.values):
        problems.append(f"issue {issue.name!r} has duplicate values")
    return problems


def validate_domain(domain: Domain) -> list[str]:
    problems = []
    if len(domain.issues) < 1:
        problems.append(f"domain {domain.name!r} has no issues")
    names = [issue.name for issue in domain.issues]
    if len(set(names)) != len(names):
        problems.append(f"domain {domain.name!r} has duplicate issue names")
    for issue in domain.issues:
        problems.extend(validate_issue(issue))
    return problems


def ensure_valid_bid(domain: Domain, bid: Bid) -> None:
    if len(bid.values) != len(domain.issues):
        raise InvalidBidError(
            f"bid has {len(bid.values)} values for {len(domain.issues)} issues"
        )
    for issue, value in zip(domain.issues, bid.values):
        if value not in issue.values:
            raise InvalidBidError(
                f"value {value!r} not in issue {issue.name!r} values {list(issue.values)}"
            )


def enumerate_bids(domain: Domain) -> list[Bid]:
    """Full bid space as the Cartesian product in lexicographic issue order.

    The returned ordering is deterministic and is the global tie-break index.
    """
    problems = validate_domain(domain)
    if problems:
        raise InvalidDomainError("; ".join(problems))
    return [
        Bid(values=combo)
        for combo in itertools.product(*(issue.values for issue in domain.issues))
    ]


@dataclass(frozen=True)
class AdditiveUtilityProfile:
    """Normalized additive preferences of one party over a domain.

    weights: one nonnegative weight per issue, summing to 1.
    evaluations: per issue, a value -> [0, 1] map attaining 1.0 somewhere.
    """

    domain: Domain
    weights: tuple[float, ...]
    evaluations: tuple[Mapping[str, float], ...]

    @classmethod
    def create(
        cls,
        domain: Domain,
        weights: Sequence[float],
        evaluations: Sequence[Mapping[str, float]],
    ) -> "AdditiveUtilityProfile":
        profile = cls(
            domain=domain,
            weights=tuple(float(w) for w in weights),
            evaluations=tuple(dict(e) for e in evaluations),
        )
        violations = validate_profile(profile)
        if violations:
            raise InvalidProfileError(violations)
        return profile


def validate_profile(profile: AdditiveUtilityProfile) -> list[str]:
    """Invariant check as data: returns one message per violation, empty if valid."""
    violations: list[str] = []
    issues = profile.domain.issues
    if len(profile.weights) != len(issues):
        violations.append(
            f"weights: {len(profile.weights)} entries for {len(issues)} issues"
        )
        return violations
    if len(profile.evaluations) != len(issues):
        violations.append(
            f"evaluations: {len(profile.evaluations)} entries for {len(issues)} issues"
        )
        return violations
    for issue, weight in zip(issues, profile.weights):
        if weight < 0:
            violations.append(f"weight[{issue.name}] = {weight} < 0")
    total = sum(profile.weights)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        violations.append(f"weights sum {total} != 1")
    for issue, evals in zip(issues, profile.evaluations):
        for value in issue.values:
            if value not in evals:
                violations.append(f"evaluation[{issue.name}][{value}] missing")
                continue
            e = evals[value]
            if not (0.0 <= e <= 1.0):
                violations.append(
                    f"evaluation[{issue.name}][{value}] = {e} out of [0,1]"
                )
        extra = set(evals) - set(issue.values)
        if extra:
            violations.append(
                f"evaluation[{issue.name}] has unknown values {sorted(extra)}"
            )
        known = [evals[v] for v in issue.values if v in evals]
        if known and max(known) < 1.0 - EVAL_MAX_TOL:
            violations.append(
                f"evaluation[{issue.name}] max {max(known)} < 1.0 (not normalized)"
            )
    return violations


def utility(profile: AdditiveUtilityProfile, bid: Bid) -> float:
    """Additive utility of `bid` under `profile`, clamped to [0, 1]."""
    ensure_valid_bid(profile.domain, bid)
    total = 0.0
    for weight, evals, value in zip(profile.weights, profile.evaluations, bid.values):
        try:
            total += weight * evals[value]
        except KeyError:
            raise InvalidBidError(f"no evaluation for value {value!r}") from None
    return min(1.0, max(0.0, total))


def same_domain(a: AdditiveUtilityProfile, b: AdditiveUtilityProfile) -> bool:
    return a.domain == b.domain


@dataclass(frozen=True)
class UtilityPoint:
    """A bid's image in the normalized two-party utility space.

    `index` is the bid's position in the enumerated space, used as the global
    deterministic tie-break; synthetic points (grids, anchors) may leave both
    `bid` and `index` unset.
    """

    u_h: float
    u_p: float
    bid: Bid | None = None
    index: int | None = None

    def coords(self) -> tuple[float, float]:
        return (self.u_h, self.u_p)


ORIGIN = UtilityPoint(0.0, 0.0)
UTOPIAN = UtilityPoint(1.0, 1.0)


def utility_point(
    bid: Bid,
    profile_h: AdditiveUtilityProfile,
    profile_p: AdditiveUtilityProfile,
    index: int | None = None,
) -> UtilityPoint:
    """Joint utility point of `bid` under both parties' profiles."""
    if not same_domain(profile_h, profile_p):
        raise DomainMismatchError(
            f"profiles disagree on domain: {profile_h.domain.name!r} vs {profile_p.domain.name!r}"
        )
    return UtilityPoint(
        u_h=utility(profile_h, bid),
        u_p=utility(profile_p, bid),
        bid=bid,
        index=index if index is not None else profile_h.domain.bid_index(bid),
    )


def space_points(
    domain: Domain,
    profile_h: AdditiveUtilityProfile,
    profile_p: AdditiveUtilityProfile,
) -> list[UtilityPoint]:
    """Utility points of the whole bid space, in enumeration (tie-break) order."""
    return [
        utility_point(bid, profile_h, profile_p, index=i)
        for i, bid in enumerate(enumerate_bids(domain))
    ]


@dataclass(frozen=True)
class NeedsProfile:
    """Per-party positive needs summing to 1; optional positive investments."""

    needs: tuple[float, float]
    investments: tuple[float, float] | None = None

    @classmethod
    def create(
        cls,
        needs: Sequence[float],
        investments: Sequence[float] | None = None,
    ) -> "NeedsProfile":
        needs_t = tuple(float(n) for n in needs)
        inv_t = tuple(float(i) for i in investments) if investments is not None else None
        if len(needs_t) != 2:
            raise InvalidNeedsError("needs must list exactly two parties")
        if any(n <= 0 for n in needs_t):
            raise InvalidNeedsError(f"needs must be strictly positive, got {needs_t}")
        if abs(sum(needs_t) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidNeedsError(f"needs sum {sum(needs_t)} != 1")
        if inv_t is not None:
            if len(inv_t) != 2:
                raise InvalidNeedsError("investments must list exactly two parties")
            if any(i <= 0 for i in inv_t):
                raise InvalidNeedsError(
                    f"investments must be strictly positive, got {inv_t}"
                )
        return cls(needs=needs_t, investments=inv_t)


@dataclass(frozen=True)
class ProfileDelta:
    """Per-party additions for a new issue: its weight plus value evaluations.

    Existing issue weights are rescaled by (1 - weight) so the profile stays
    normalized; evaluations must cover every new value.
    """

    weight: float
    evaluations: Mapping[str, float]


def extend_domain(
    domain: Domain,
    new_issue: Issue,
    profiles: Mapping[str, AdditiveUtilityProfile],
    deltas: Mapping[str, ProfileDelta],
) -> tuple[Domain, dict[str, AdditiveUtilityProfile]]:
    """Enlarge the bid space with `new_issue`, updating each party's profile.

    Every old bid embeds into the new space once per new value (the new issue
    is appended last, so old bids are prefixes).  Updated profiles are fully
    re-validated; a delta that breaks normalization raises InvalidProfileError.
    """
    problems = validate_domain(domain) + validate_issue(new_issue)
    if problems:
        raise InvalidDomainError("; ".join(problems))
    if any(issue.name == new_issue.name for issue in domain.issues):
        raise InvalidDomainError(
            f"issue name {new_issue.name!r} already used in domain {domain.name!r}"
        )
    missing = set(profiles) - set(deltas)
    if missing:
        raise InvalidProfileError(
            [f"no delta supplied for party {party!r}" for party in sorted(missing)]
        )

    new_domain = Domain(name=domain.name, issues=domain.issues + (new_issue,))
    updated: dict[str, AdditiveUtilityProfile] = {}
    for party, profile in profiles.items():
        delta = deltas[party]
        for value in new_issue.values:
            if value not in delta.evaluations:
                raise InvalidProfileError(
                    [f"delta for {party!r} misses evaluation of {value!r}"]
                )
        scale = 1.0 - delta.weight
        weights = tuple(w * scale for w in profile.weights) + (delta.weight,)
        evaluations = profile.evaluations + (dict(delta.evaluations),)
        updated[party] = AdditiveUtilityProfile.create(new_domain, weights, evaluations)
    return new_domain, updated


def embed_bid(bid: Bid, value: str) -> Bid:
    """Old-space bid extended with a value for the appended issue."""
    return Bid(values=bid.values + (value,))


# --- JSON wire formats -------------------------------------------------------
# domain  = {name, issues: [{name, values: [...]}]}
# profile = {domain, weights: {issue: number}, evaluations: {issue: {value: number}}}


def domain_to_json(domain: Domain) -> dict:
    return {
        "name": domain.name,
        "issues": [
            {"name": issue.name, "values": list(issue.values)}
            for issue in domain.issues
        ],
    }


def domain_from_json(data: Mapping) -> Domain:
    try:
        issues = [
            Issue.create(item["name"], item["values"]) for item in data["issues"]
        ]
        return Domain.create(data["name"], issues)
    except (KeyError, TypeError) as exc:
        raise InvalidDomainError(f"malformed domain document: {exc}") from exc


def profile_to_json(profile: AdditiveUtilityProfile) -> dict:
    return {
        "domain": profile.domain.name,
        "weights": {
            issue.name: weight
            for issue, weight in zip(profile.domain.issues, profile.weights)
        },
        "evaluations": {
            issue.name: dict(evals)
            for issue, evals in zip(profile.domain.issues, profile.evaluations)
        },
    }


def profile_from_json(data: Mapping, domain: Domain) -> AdditiveUtilityProfile:
    try:
        if data["domain"] != domain.name:
            raise InvalidProfileError(
                [f"profile domain {data['domain']!r} != {domain.name!r}"]
            )
        weights = [data["weights"][issue.name] for issue in domain.issues]
        evaluations = [
            {str(k): float(v) for k, v in data["evaluations"][issue.name].items()}
            for issue in domain.issues
        ]
    except (KeyError, TypeError) as exc:
        raise InvalidProfileError([f"malformed profile document: {exc}"]) from exc
    return AdditiveUtilityProfile.create(domain, weights, evaluations)


def needs_to_json(needs: NeedsProfile) -> dict:
    data: dict = {"needs": {"H": needs.needs[0], "P": needs.needs[1]}}
    if needs.investments is not None:
        data["investments"] = {"H": needs.investments[0], "P": needs.investments[1]}
    return data


def needs_from_json(data: Mapping) -> NeedsProfile:
    try:
        needs = (data["needs"]["H"], data["needs"]["P"])
        investments = None
        if data.get("investments") is not None:
            investments = (data["investments"]["H"], data["investments"]["P"])
    except (KeyError, TypeError) as exc:
        raise InvalidNeedsError(f"malformed needs document: {exc}") from exc
    return NeedsProfile.create(needs, investments)
