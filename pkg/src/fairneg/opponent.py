"""Frequency-based estimation of the counterpart's preference profile.

Classic heuristic: issue weights follow how rarely the opponent moves an
issue's value between consecutive bids (stable issue = important issue), and
value evaluations follow how often each value appears, max-normalized so the
estimate is itself a valid normalized profile.
"""

from __future__ import annotations

from scipy.stats import spearmanr

from .domain import (
    AdditiveUtilityProfile,
    Bid,
    Domain,
    Issue,
    ensure_valid_bid,
    enumerate_bids,
    utility,
)
from .errors import DomainMismatchError, ZeroObservationsError


class FrequencyModel:
    """Per-issue value counts and stability scores over observed opponent bids.

    One model per session, mutated only by that session's executor.
    """

    def __init__(self, domain: Domain):
        self.domain = domain
        self.observations = 0
        self._counts: list[dict[str, int]] = [
            {value: 0 for value in issue.values} for issue in domain.issues
        ]
        self._pairs = 0
        self._unchanged: list[int] = [0] * len(domain.issues)
        self._last: Bid | None = None

    def observe(self, bid: Bid) -> "FrequencyModel":
        ensure_valid_bid(self.domain, bid)
        for slot, value in zip(self._counts, bid.values):
            slot[value] += 1
        if self._last is not None:
            self._pairs += 1
            for i, (old, new) in enumerate(zip(self._last.values, bid.values)):
                if old == new:
                    self._unchanged[i] += 1
        self._last = bid
        self.observations += 1
        return self

    def stability(self) -> tuple[float, ...]:
        """Per issue: fraction of consecutive bid pairs that kept its value.

        Zero when no pairs have been seen yet; the weight estimate then falls
        back to uniform.
        """
        if self._pairs == 0:
            return tuple(0.0 for _ in self._counts)
        return tuple(u / self._pairs for u in self._unchanged)

    def value_counts(self) -> list[dict[str, int]]:
        return [dict(slot) for slot in self._counts]

    def extend(self, issue: Issue) -> None:
        """Track a newly added issue; it starts with no observations."""
        self.domain = Domain(name=self.domain.name, issues=self.domain.issues + (issue,))
        self._counts.append({value: 0 for value in issue.values})
        self._unchanged.append(0)
        # an old-space bid cannot pair with a new-space one; pair history stays
        self._last = None

    def to_json(self) -> dict:
        stability = self.stability()
        return {
            "observations": self.observations,
            "counts": {
                issue.name: dict(slot)
                for issue, slot in zip(self.domain.issues, self._counts)
            },
            "stability": {
                issue.name: s for issue, s in zip(self.domain.issues, stability)
            },
        }


class PerfectModel:
    """Stand-in model that already knows the counterpart's true profile."""

    def __init__(self, profile: AdditiveUtilityProfile):
        self.domain = profile.domain
        self.profile = profile
        self.observations = 1

    def observe(self, bid: Bid) -> "PerfectModel":
        return self

    def to_json(self) -> dict:
        return {"observations": self.observations, "perfect": True}


def observe_bid(model: FrequencyModel, bid: Bid) -> FrequencyModel:
    """Fold one observed opponent bid into the model."""
    return model.observe(bid)


def estimated_profile(model) -> AdditiveUtilityProfile:
    """Current profile estimate; requires at least one observation.

    Weights are stability scores renormalized (uniform when all zero), value
    evaluations are relative frequencies max-normalized to 1.0.  An issue with
    no observations yet (added mid-session) gets all-1.0 evaluations.
    """
    if isinstance(model, PerfectModel):
        return model.profile
    if model.observations == 0:
        raise ZeroObservationsError("no opponent bids observed yet")
    stability = model.stability()
    total = sum(stability)
    if total <= 0:
        weights = [1.0 / len(stability)] * len(stability)
    else:
        weights = [s / total for s in stability]
    evaluations = []
    for slot in model._counts:
        top = max(slot.values())
        if top == 0:
            evaluations.append({value: 1.0 for value in slot})
        else:
            evaluations.append({value: count / top for value, count in slot.items()})
    return AdditiveUtilityProfile.create(model.domain, weights, evaluations)


def optimistic_profile(domain: Domain) -> AdditiveUtilityProfile:
    """Zero-knowledge estimate: uniform weights, every value evaluated 1.0.

    Used before the first opponent bid arrives; every bid then scores 1.0,
    the optimistic initialization customary for frequency models.
    """
    n = len(domain.issues)
    return AdditiveUtilityProfile.create(
        domain,
        [1.0 / n] * n,
        [{value: 1.0 for value in issue.values} for issue in domain.issues],
    )


def estimate_or_optimistic(model, domain: Domain) -> AdditiveUtilityProfile:
    try:
        return estimated_profile(model)
    except ZeroObservationsError:
        return optimistic_profile(domain)


def estimation_quality(
    estimated: AdditiveUtilityProfile, truth: AdditiveUtilityProfile
) -> float:
    """Spearman rank correlation of the two profiles over the full bid space."""
    if estimated.domain != truth.domain:
        raise DomainMismatchError(
            f"profiles disagree on domain: {estimated.domain.name!r} vs {truth.domain.name!r}"
        )
    bids = enumerate_bids(truth.domain)
    us = [utility(estimated, b) for b in bids]
    vs = [utility(truth, b) for b in bids]
    rho = spearmanr(us, vs).correlation
    return float(rho)
