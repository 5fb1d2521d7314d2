"""Monitor-analyze-plan-execute loop over the fairness knowledge base.

The knowledge base pairs the active fairness principle with append-only
judgment records and background parameters (contestation timing, mismatch
thresholds, the power-relations flag).  Monitoring produces one report per
offer; analysis runs four aberration detectors over those reports; planning
maps each aberration to candidate changes (always including no-change); every
human decision — approvals, rejections, and explicit no-changes alike — lands
in an append-only change log carrying the resulting configuration digest, so
the final configuration is reproducible from the log alone.
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .analytics import (
    DIAGONAL,
    FairnessPrinciple,
    balanced_needs_line,
    distance_to_ray,
    fairness_deviation,
    line_of_equal_opportunity,
    needs_transform,
    nearest_member_distance,
    principle_from_json,
    principle_to_json,
)
from .domain import (
    Issue,
    NeedsProfile,
    ProfileDelta,
    UtilityPoint,
    domain_to_json,
    extend_domain,
    needs_from_json,
    needs_to_json,
    profile_to_json,
    space_points,
    utility,
)
from .errors import (
    DecisionStateError,
    EmptyTranscriptError,
    InvalidPrincipleError,
)
from .opponent import estimate_or_optimistic
from .protocol import OFFER, Outcome, SessionSettings, SessionState, StrategySpec

ABERRATION_KINDS = (
    "principle-mismatch",
    "trend-divergence",
    "deadline-fairness",
    "power-asymmetry",
)

PROPOSAL_KINDS = (
    "switch-principle",
    "apply-needs-transform",
    "extend-domain",
    "change-strategy",
    "no-change",
)


@dataclass
class BackgroundConfig:
    """Background-theory parameters steering the analyze step.

    timing_fraction: contestations about the projected agreement only fire
    this late into the session (complaining about early bids is unhelpful).
    mismatch_count_k / mismatch_margin: how many clearly-favorable offers the
    counterpart must implicitly reject, and what margin counts as favorable.
    power_index_enabled: report the reservation gap as an informational
    power-relations indicator.
    """

    timing_fraction: float = 0.7
    mismatch_count_k: int = 2
    mismatch_margin: float = 0.15
    power_index_enabled: bool = False
    leo_resolution: int = 101

    def validate(self) -> list[str]:
        problems = []
        if not (0.0 <= self.timing_fraction <= 1.0):
            problems.append(f"timing_fraction {self.timing_fraction} out of [0,1]")
        if self.mismatch_count_k < 1:
            problems.append(f"mismatch_count_k {self.mismatch_count_k} < 1")
        if not (0.0 < self.mismatch_margin < 1.0):
            problems.append(f"mismatch_margin {self.mismatch_margin} out of (0,1)")
        if self.leo_resolution < 2:
            problems.append(f"leo_resolution {self.leo_resolution} < 2")
        return problems

    def to_json(self) -> dict:
        return {
            "timing_fraction": self.timing_fraction,
            "mismatch_count_k": self.mismatch_count_k,
            "mismatch_margin": self.mismatch_margin,
            "power_index_enabled": self.power_index_enabled,
            "leo_resolution": self.leo_resolution,
        }

    @classmethod
    def from_json(cls, data: Mapping | None) -> "BackgroundConfig":
        data = data or {}
        return cls(
            timing_fraction=float(data.get("timing_fraction", 0.7)),
            mismatch_count_k=int(data.get("mismatch_count_k", 2)),
            mismatch_margin=float(data.get("mismatch_margin", 0.15)),
            power_index_enabled=bool(data.get("power_index_enabled", False)),
            leo_resolution=int(data.get("leo_resolution", 101)),
        )


@dataclass(frozen=True)
class JudgmentRecord:
    """A labeled outcome: what the humans involved deemed (un)acceptable."""

    point: UtilityPoint | None
    label: str  # acceptable | contested
    rationale: str
    principle_kind: str

    def to_json(self) -> dict:
        return {
            "point": None
            if self.point is None
            else {"u_H": self.point.u_h, "u_P": self.point.u_p},
            "bid": None
            if self.point is None or self.point.bid is None
            else list(self.point.bid.values),
            "label": self.label,
            "rationale": self.rationale,
            "principle": self.principle_kind,
        }


@dataclass
class KnowledgeBase:
    """Shared knowledge: one active principle, append-only judgments, and
    background parameters; plus the transformed-view flag set by an approved
    needs transform."""

    principle: FairnessPrinciple
    background: BackgroundConfig = field(default_factory=BackgroundConfig)
    judgments: list[JudgmentRecord] = field(default_factory=list)
    transformed_view: bool = False
    transform_needs: NeedsProfile | None = None

    def effective_needs(self) -> NeedsProfile | None:
        if self.principle.needs is not None:
            return self.principle.needs
        return self.transform_needs


@dataclass(frozen=True)
class MonitorReport:
    """Fairness snapshot of one offer, in the active reporting frame."""

    entry_index: int
    round: int
    party: str
    bid_values: tuple[str, ...]
    u_h: float
    u_p_est: float
    deviation: float
    distance_leo: float
    distance_lbn: float
    config_digest: str

    def to_json(self) -> dict:
        return {
            "entry_index": self.entry_index,
            "round": self.round,
            "party": self.party,
            "bid": list(self.bid_values),
            "u_H": self.u_h,
            "u_P_est": self.u_p_est,
            "deviation": self.deviation,
            "distance_leo": self.distance_leo,
            "distance_lbn": self.distance_lbn,
            "config_digest": self.config_digest,
        }


@dataclass(frozen=True)
class Explanation:
    """Structured record backing an aberration: metric, observation, threshold."""

    metric: str
    observed: Any
    threshold: Any

    def to_json(self) -> dict:
        return {"metric": self.metric, "observed": self.observed, "threshold": self.threshold}


@dataclass(frozen=True)
class Aberration:
    """A detector finding; evidence indexes resolve into the transcript."""

    kind: str
    evidence: tuple[int, ...]
    explanation: Explanation
    informational: bool = False

    def key(self) -> tuple:
        return (self.kind, self.evidence)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "evidence": list(self.evidence),
            "explanation": self.explanation.to_json(),
            "informational": self.informational,
        }


@dataclass
class Proposal:
    """A candidate change awaiting a logged human decision."""

    id: str
    kind: str
    payload: dict
    aberration: Aberration
    status: str = "pending"  # pending -> approved | rejected
    executed: bool = False

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "payload": self.payload,
            "aberration": self.aberration.to_json(),
            "status": self.status,
        }


@dataclass(frozen=True)
class ChangeLogEntry:
    """One audit-trail line: the decision, its rationale, who made it, and the
    configuration digest that resulted."""

    timestamp: int
    proposal_id: str
    kind: str
    payload: dict
    decision: str  # approve | reject
    rationale: str
    decided_by: str
    config_digest: str

    def to_json(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "proposal_id": self.proposal_id,
            "kind": self.kind,
            "payload": self.payload,
            "decision": self.decision,
            "rationale": self.rationale,
            "decided_by": self.decided_by,
            "config_digest": self.config_digest,
        }


# --- configuration digest ----------------------------------------------------


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def config_digest(settings: SessionSettings, kb: KnowledgeBase) -> str:
    """Digest of everything an approved change can alter."""
    payload = {
        "domain": domain_to_json(settings.domain),
        "profile_H": profile_to_json(settings.profile_h),
        "true_profile_P": None
        if settings.true_profile_p is None
        else profile_to_json(settings.true_profile_p),
        "reservation": {"H": settings.reservation_h, "P": settings.reservation_p},
        "deadline_rounds": settings.deadline_rounds,
        "seed": settings.seed,
        "strategies": {
            "H": settings.strategy_h.to_json(),
            "P": settings.strategy_p.to_json(),
        },
        "principle": principle_to_json(kb.principle),
        "background": kb.background.to_json(),
        "transformed_view": kb.transformed_view,
        "transform_needs": None
        if kb.transform_needs is None
        else needs_to_json(kb.transform_needs),
    }
    return sha256_hex(canonical_json(payload))


def apply_change(settings: SessionSettings, kb: KnowledgeBase, kind: str, payload: Mapping) -> None:
    """The pure configuration transition behind execute (and change-log replay)."""
    if kind == "no-change":
        return
    if kind == "switch-principle":
        principle = principle_from_json(payload["principle"])
        kb.principle = principle
        return
    if kind == "apply-needs-transform":
        needs = None
        if payload.get("needs"):
            needs = needs_from_json(payload["needs"])
        elif kb.principle.needs is not None:
            needs = kb.principle.needs
        if needs is None:
            raise InvalidPrincipleError("needs transform requires a needs profile")
        kb.transformed_view = True
        kb.transform_needs = needs
        return
    if kind == "extend-domain":
        issue = Issue.create(payload["issue"]["name"], payload["issue"]["values"])
        deltas = {
            party: ProfileDelta(
                weight=float(d["weight"]),
                evaluations={str(k): float(v) for k, v in d["evaluations"].items()},
            )
            for party, d in payload["deltas"].items()
        }
        profiles = {"H": settings.profile_h}
        if settings.true_profile_p is not None:
            profiles["P"] = settings.true_profile_p
        new_domain, updated = extend_domain(settings.domain, issue, profiles, deltas)
        settings.domain = new_domain
        settings.profile_h = updated["H"]
        if "P" in updated:
            settings.true_profile_p = updated["P"]
        return
    if kind == "change-strategy":
        party = payload.get("party", "H")
        spec = StrategySpec.from_json(payload["strategy"])
        if party == "H":
            settings.strategy_h = spec
        else:
            settings.strategy_p = spec
        return
    raise DecisionStateError(f"unknown change kind {kind!r}")


# --- monitor -----------------------------------------------------------------


def _report_frame(kb: KnowledgeBase):
    """Needs and target ray for the current reporting frame."""
    needs = kb.effective_needs()
    if kb.transformed_view:
        return needs, DIAGONAL
    if needs is not None:
        return needs, balanced_needs_line(needs)
    return None, DIAGONAL


def _frame_point(point: UtilityPoint, kb: KnowledgeBase) -> UtilityPoint:
    if kb.transformed_view and kb.effective_needs() is not None:
        return needs_transform(point, kb.effective_needs())
    return point


def _frame_deviation(point: UtilityPoint, kb: KnowledgeBase, lbn) -> float:
    if kb.principle.kind == "need":
        # in the transformed frame the balanced-needs ray is the diagonal
        return distance_to_ray(point, lbn)
    return fairness_deviation(point, kb.principle)


def monitor_step(state: SessionState, kb: KnowledgeBase, model) -> MonitorReport:
    """Fairness report for the latest offer, using the opponent-model estimate.

    Before the first opponent observation the estimate is optimistic (every
    bid scores 1.0 for the counterpart).
    """
    offers = state.offers()
    if not offers:
        raise EmptyTranscriptError("no offer to monitor yet")
    entry = offers[-1]
    entry_index = state.entries.index(entry)

    settings = state.settings
    est = estimate_or_optimistic(model, settings.domain)
    point = UtilityPoint(
        u_h=utility(settings.profile_h, entry.bid),
        u_p=utility(est, entry.bid),
        bid=entry.bid,
        index=settings.domain.bid_index(entry.bid),
    )
    needs, lbn = _report_frame(kb)
    framed = _frame_point(point, kb)

    points = space_points(settings.domain, settings.profile_h, est)
    if kb.transformed_view and needs is not None:
        points = [needs_transform(p, needs) for p in points]
    leo = line_of_equal_opportunity(points, kb.background.leo_resolution)

    return MonitorReport(
        entry_index=entry_index,
        round=entry.round,
        party=entry.party,
        bid_values=entry.bid.values,
        u_h=point.u_h,
        u_p_est=point.u_p,
        deviation=_frame_deviation(framed, kb, lbn),
        distance_leo=nearest_member_distance(framed, leo),
        distance_lbn=distance_to_ray(framed, lbn),
        config_digest=config_digest(settings, kb),
    )


# --- analyze -----------------------------------------------------------------


def _implicit_rejections(state: SessionState) -> list[tuple[int, int]]:
    """(rejected H-offer index, rejecting P-offer index) pairs, in order."""
    pairs = []
    entries = state.entries
    for i, entry in enumerate(entries):
        if entry.party != "H" or entry.action != OFFER:
            continue
        if i + 1 < len(entries) and entries[i + 1].party == "P" and entries[i + 1].action == OFFER:
            pairs.append((i, i + 1))
    return pairs


def analyze(
    reports: Sequence[MonitorReport], state: SessionState, kb: KnowledgeBase
) -> list[Aberration]:
    """Run the four aberration detectors; pure in (reports, state, kb).

    1. principle-mismatch: the counterpart implicitly rejected at least k
       offers that clearly favoured them (u_P_est - u_H >= margin).
    2. trend-divergence: the last three offers' deviations strictly increase.
    3. deadline-fairness: past the timing fraction, the projected agreement
       (the standing offer) still deviates more than the margin.
    4. power-asymmetry (optional): the reservation gap exceeds the margin;
       informational only.
    """
    background = kb.background
    found: list[Aberration] = []
    by_entry = {r.entry_index: r for r in reports}

    qualifying: list[int] = []
    for offer_idx, reject_idx in _implicit_rejections(state):
        report = by_entry.get(offer_idx)
        if report is None:
            continue
        if report.u_p_est - report.u_h >= background.mismatch_margin:
            qualifying.append(reject_idx)
    if len(qualifying) >= background.mismatch_count_k:
        found.append(
            Aberration(
                kind="principle-mismatch",
                evidence=tuple(qualifying),
                explanation=Explanation(
                    metric="qualifying_implicit_rejections",
                    observed=len(qualifying),
                    threshold=background.mismatch_count_k,
                ),
            )
        )

    if len(reports) >= 3:
        d1, d2, d3 = (r.deviation for r in reports[-3:])
        if d1 < d2 < d3:
            found.append(
                Aberration(
                    kind="trend-divergence",
                    evidence=tuple(r.entry_index for r in reports[-3:]),
                    explanation=Explanation(
                        metric="deviation_trend",
                        observed=[d1, d2, d3],
                        threshold="strictly-increasing",
                    ),
                )
            )

    if reports:
        latest = reports[-1]
        progress = state.round / state.settings.deadline_rounds
        if progress >= background.timing_fraction and latest.deviation > background.mismatch_margin:
            found.append(
                Aberration(
                    kind="deadline-fairness",
                    evidence=(latest.entry_index,),
                    explanation=Explanation(
                        metric="projected_agreement_deviation",
                        observed=latest.deviation,
                        threshold=background.mismatch_margin,
                    ),
                )
            )

    if background.power_index_enabled and state.entries:
        gap = abs(state.settings.reservation_h - state.settings.reservation_p)
        if gap > background.mismatch_margin:
            found.append(
                Aberration(
                    kind="power-asymmetry",
                    evidence=(len(state.entries) - 1,),
                    explanation=Explanation(
                        metric="reservation_gap",
                        observed=gap,
                        threshold=background.mismatch_margin,
                    ),
                    informational=True,
                )
            )

    return found


# --- plan --------------------------------------------------------------------


_PLAN_TABLE = {
    "principle-mismatch": ("switch-principle", "extend-domain", "no-change"),
    "trend-divergence": ("change-strategy", "no-change"),
    "deadline-fairness": ("change-strategy", "switch-principle", "no-change"),
    "power-asymmetry": ("apply-needs-transform", "no-change"),
}


def _default_payload(kind: str, kb: KnowledgeBase) -> dict:
    if kind == "switch-principle":
        return {"principle": {"kind": "equality"}}
    if kind == "change-strategy":
        return {"party": "H", "strategy": {"kind": "conceder", "params": {"e": 2.0}}}
    if kind == "apply-needs-transform":
        needs = kb.effective_needs()
        return {"needs": needs_to_json(needs)} if needs is not None else {}
    return {}


def plan(aberration: Aberration, kb: KnowledgeBase) -> list[Proposal]:
    """Candidate changes for an aberration; no-change is always on the table."""
    kinds = _PLAN_TABLE[aberration.kind]
    return [
        Proposal(
            id=str(uuid.uuid4()),
            kind=kind,
            payload=_default_payload(kind, kb),
            aberration=aberration,
        )
        for kind in kinds
    ]


# --- decide / execute --------------------------------------------------------


def execute(proposal: Proposal, runtime) -> None:
    """Apply an approved proposal to the live session and knowledge base.

    The runtime re-derives anything cached from the configuration (bid space,
    strategies, opponent-model issue slots) and subsequent monitor reports
    carry the new configuration digest.
    """
    if proposal.status != "approved":
        raise DecisionStateError(
            f"cannot execute proposal in status {proposal.status!r}"
        )
    if proposal.executed:
        raise DecisionStateError("proposal already executed")
    apply_change(runtime.state.settings, runtime.kb, proposal.kind, proposal.payload)
    proposal.executed = True
    runtime.after_change(proposal.kind)


def decide(
    proposal: Proposal,
    human_decision: str,
    rationale: str,
    runtime,
    decided_by: str = "human",
    payload_override: Mapping | None = None,
) -> ChangeLogEntry:
    """Record a human decision; approvals of actionable changes execute
    immediately (the runtime serializes decisions between rounds).

    Every decision is logged, including rejections and approved no-changes.
    """
    if proposal.status != "pending":
        raise DecisionStateError(f"proposal already {proposal.status}")
    if human_decision not in ("approve", "reject"):
        raise DecisionStateError(f"unknown decision {human_decision!r}")
    if not rationale:
        raise DecisionStateError("a decision requires a rationale")

    if human_decision == "approve":
        if payload_override:
            proposal.payload = {**proposal.payload, **dict(payload_override)}
        proposal.status = "approved"
        if proposal.kind != "no-change":
            try:
                execute(proposal, runtime)
            except Exception:
                proposal.status = "pending"  # decision did not take effect
                raise
    else:
        proposal.status = "rejected"

    entry = ChangeLogEntry(
        timestamp=runtime.state.next_timestamp(),
        proposal_id=proposal.id,
        kind=proposal.kind,
        payload=dict(proposal.payload),
        decision=human_decision,
        rationale=rationale,
        decided_by=decided_by,
        config_digest=config_digest(runtime.state.settings, runtime.kb),
    )
    runtime.record_changelog(entry)
    return entry


def replay_changelog(
    settings: SessionSettings, kb: KnowledgeBase, entries: Sequence[Mapping]
) -> str:
    """Re-apply the approved changes of a log to fresh initial state and
    return the resulting digest (the audit reproducibility check)."""
    for entry in entries:
        if entry["decision"] == "approve":
            apply_change(settings, kb, entry["kind"], entry["payload"])
    return config_digest(settings, kb)


def record_judgment(
    kb: KnowledgeBase, outcome: Outcome, label: str, rationale: str
) -> KnowledgeBase:
    """Append a labeled judgment of a terminal outcome to the knowledge base.

    Judgments are precedent for future human reflection; they are surfaced in
    reports but never drive automated inference.
    """
    if label not in ("acceptable", "contested"):
        raise DecisionStateError(f"unknown judgment label {label!r}")
    kb.judgments.append(
        JudgmentRecord(
            point=outcome.point,
            label=label,
            rationale=rationale,
            principle_kind=kb.principle.kind,
        )
    )
    return kb
