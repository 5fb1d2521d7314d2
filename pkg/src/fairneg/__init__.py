"""Negotiation support with fairness analytics and reflective human control.

The package is organized as a small library:

- domain: issues, bids, additive utility profiles, the normalized utility space.
- analytics: Pareto frontier, egalitarian point, equal-opportunity and
  balanced-needs geometry, per-principle fairness deviations.
- protocol: bilateral alternating-offers sessions with deadlines,
  reservations, and builtin time-dependent strategies.
- opponent: frequency-based estimation of the counterpart's preferences.
- reflection: the monitor/analyze/plan/execute loop over the fairness
  knowledge base, with contestations and the append-only change log.
- runner: session orchestration, persistence, headless runs, replay.
- service / cli: the HTTP + event-stream API and the command line.
"""

from .analytics import (
    FairnessPrinciple,
    Frontier,
    RayDescriptor,
    balanced_needs_bids,
    balanced_needs_line,
    egalitarian_point,
    fairness_deviation,
    kalai_smorodinsky_point,
    line_of_equal_opportunity,
    needs_transform,
    pareto_frontier,
)
from .domain import (
    AdditiveUtilityProfile,
    Bid,
    Domain,
    Issue,
    NeedsProfile,
    ProfileDelta,
    UtilityPoint,
    enumerate_bids,
    extend_domain,
    utility,
    utility_point,
    validate_profile,
)
from .opponent import FrequencyModel, PerfectModel, estimated_profile, estimation_quality, observe_bid
from .protocol import (
    Action,
    Outcome,
    SessionConfig,
    SessionState,
    StrategySpec,
    acceptance_decision,
    create_session,
    legal_actions,
    select_bid_near_target,
    session_outcome,
    submit_action,
    time_dependent_target,
)
from .reflection import (
    Aberration,
    BackgroundConfig,
    ChangeLogEntry,
    KnowledgeBase,
    MonitorReport,
    Proposal,
    analyze,
    decide,
    execute,
    monitor_step,
    plan,
    record_judgment,
)
from .runner import SessionRuntime, replay, run_headless

__version__ = "0.1.0"

__all__ = [
    "AdditiveUtilityProfile",
    "Aberration",
    "Action",
    "BackgroundConfig",
    "Bid",
    "ChangeLogEntry",
    "Domain",
    "FairnessPrinciple",
    "FrequencyModel",
    "Frontier",
    "Issue",
    "KnowledgeBase",
    "MonitorReport",
    "NeedsProfile",
    "Outcome",
    "PerfectModel",
    "ProfileDelta",
    "Proposal",
    "RayDescriptor",
    "SessionConfig",
    "SessionRuntime",
    "SessionState",
    "StrategySpec",
    "UtilityPoint",
    "acceptance_decision",
    "analyze",
    "balanced_needs_bids",
    "balanced_needs_line",
    "create_session",
    "decide",
    "egalitarian_point",
    "enumerate_bids",
    "estimated_profile",
    "estimation_quality",
    "execute",
    "extend_domain",
    "fairness_deviation",
    "kalai_smorodinsky_point",
    "legal_actions",
    "line_of_equal_opportunity",
    "monitor_step",
    "needs_transform",
    "observe_bid",
    "pareto_frontier",
    "plan",
    "record_judgment",
    "replay",
    "run_headless",
    "select_bid_near_target",
    "session_outcome",
    "submit_action",
    "time_dependent_target",
    "utility",
    "utility_point",
    "validate_profile",
]
