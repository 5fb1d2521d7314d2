"""Bilateral alternating-offers protocol with round deadlines and reservations.

A session starts with H to move.  Each offer consumes one round and flips the
turn; a counter-offer implicitly rejects the standing offer (the transcript
still exposes those rejections to the analyze step).  Accepting binds the
standing offer; reaching the round deadline without agreement fails the
session.  Every event lands in an append-only transcript with a logical
timestamp, so a seeded session replays bit-exactly.

Each SessionState is owned by exactly one executor; independent sessions may
run in parallel.  All mutation flows through submit_action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Mapping, Sequence

from .domain import (
    AdditiveUtilityProfile,
    Bid,
    Domain,
    UtilityPoint,
    ensure_valid_bid,
    enumerate_bids,
    utility,
    utility_point,
    validate_domain,
    validate_profile,
)
from .errors import (
    ConfigError,
    IllegalAcceptError,
    InvalidBidError,
    NoFeasibleBidError,
    NonTerminalSessionError,
    NoStandingOfferError,
    OutOfTurnError,
    ProtocolError,
    TerminalStateError,
)

if TYPE_CHECKING:
    from .analytics import FairnessPrinciple
    from .reflection import BackgroundConfig

PARTIES = ("H", "P")

OFFER = "offer"
ACCEPT = "accept"
END = "end"

BUILTIN_STRATEGIES = ("boulware", "conceder", "linear", "time-dependent", "scripted")


def other_party(party: str) -> str:
    return "P" if party == "H" else "H"


@dataclass(frozen=True)
class Action:
    """One protocol move: offer a bid, accept the standing offer, or end."""

    kind: str
    bid: Bid | None = None

    @classmethod
    def offer(cls, bid: Bid) -> "Action":
        return cls(kind=OFFER, bid=bid)

    @classmethod
    def accept(cls) -> "Action":
        return cls(kind=ACCEPT)

    @classmethod
    def end(cls) -> "Action":
        return cls(kind=END)


@dataclass(frozen=True)
class StrategySpec:
    """Declarative strategy assignment: human or a named builtin with params."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    def is_builtin(self) -> bool:
        return self.kind != "human"

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_json(cls, data: Mapping) -> "StrategySpec":
        return cls(kind=data["kind"], params=dict(data.get("params", {})))


@dataclass
class SessionSettings:
    """The mutable, digest-relevant session configuration.

    Domain, profiles and strategies can change mid-session through approved
    reflective changes; everything that can change is concentrated here.
    """

    domain: Domain
    profile_h: AdditiveUtilityProfile
    true_profile_p: AdditiveUtilityProfile | None
    reservation_h: float
    reservation_p: float
    deadline_rounds: int
    seed: int
    strategy_h: StrategySpec
    strategy_p: StrategySpec

    def profile_of(self, party: str) -> AdditiveUtilityProfile | None:
        return self.profile_h if party == "H" else self.true_profile_p

    def reservation_of(self, party: str) -> float:
        return self.reservation_h if party == "H" else self.reservation_p

    def strategy_of(self, party: str) -> StrategySpec:
        return self.strategy_h if party == "H" else self.strategy_p


@dataclass(frozen=True)
class SessionConfig:
    """Validated construction input for a session."""

    domain: Domain
    profile_h: AdditiveUtilityProfile
    true_profile_p: AdditiveUtilityProfile | None
    reservation_h: float
    reservation_p: float
    deadline_rounds: int
    seed: int
    active_principle: "FairnessPrinciple"
    strategy_h: StrategySpec
    strategy_p: StrategySpec
    background: "BackgroundConfig | None" = None
    decision_policy: Sequence[Mapping[str, Any]] | None = None


@dataclass
class TranscriptEntry:
    """One logged protocol event; utilities are annotated by the executor."""

    round: int
    party: str
    action: str
    bid: Bid | None
    u_h: float | None
    u_p_est: float | None
    timestamp: int


@dataclass
class StandingOffer:
    party: str
    bid: Bid


@dataclass
class SessionState:
    """Protocol state: round counter, turn, transcript, and terminal status."""

    settings: SessionSettings
    round: int = 0
    turn: str = "H"
    entries: list[TranscriptEntry] = field(default_factory=list)
    status: str = "open"  # open | agreed | failed
    agreed_bid: Bid | None = None
    standing: StandingOffer | None = None
    clock: int = 0

    def next_timestamp(self) -> int:
        stamp = self.clock
        self.clock += 1
        return stamp

    def offers(self) -> list[TranscriptEntry]:
        return [e for e in self.entries if e.action == OFFER]


@dataclass(frozen=True)
class Outcome:
    """Terminal result: an agreement with its utility point, or no agreement."""

    result: str  # "agreement" | "no-agreement"
    bid: Bid | None
    point: UtilityPoint | None
    rounds_used: int


def validate_config(config: SessionConfig) -> list[str]:
    problems = list(validate_domain(config.domain))
    problems += [f"profile_H: {v}" for v in validate_profile(config.profile_h)]
    if config.profile_h.domain != config.domain:
        problems.append("profile_H domain differs from session domain")
    if config.true_profile_p is not None:
        problems += [f"true_profile_P: {v}" for v in validate_profile(config.true_profile_p)]
        if config.true_profile_p.domain != config.domain:
            problems.append("true_profile_P domain differs from session domain")
    for party, r in (("H", config.reservation_h), ("P", config.reservation_p)):
        if not (0.0 <= r <= 1.0):
            problems.append(f"reservation[{party}] = {r} out of [0,1]")
    if config.deadline_rounds < 1:
        problems.append(f"deadline_rounds = {config.deadline_rounds} < 1")
    problems += [f"active_principle: {v}" for v in config.active_principle.validate()]
    for party, spec in (("H", config.strategy_h), ("P", config.strategy_p)):
        if spec.kind != "human" and spec.kind not in BUILTIN_STRATEGIES:
            problems.append(f"strategy[{party}] unknown kind {spec.kind!r}")
        if party == "P" and spec.is_builtin() and config.true_profile_p is None:
            problems.append("strategy[P] is builtin but true_profile_P is missing")
    return problems


def create_session(config: SessionConfig) -> SessionState:
    """Fresh session: round 0, H to move, empty transcript, status open."""
    problems = validate_config(config)
    if problems:
        raise ConfigError(problems)
    settings = SessionSettings(
        domain=config.domain,
        profile_h=config.profile_h,
        true_profile_p=config.true_profile_p,
        reservation_h=config.reservation_h,
        reservation_p=config.reservation_p,
        deadline_rounds=config.deadline_rounds,
        seed=config.seed,
        strategy_h=config.strategy_h,
        strategy_p=config.strategy_p,
    )
    return SessionState(settings=settings)


def _accept_allowed(state: SessionState, party: str) -> tuple[bool, str]:
    if state.standing is None or state.standing.party == party:
        return False, "no standing offer from the counterpart"
    profile = state.settings.profile_of(party)
    if profile is not None:
        u = utility(profile, state.standing.bid)
        reservation = state.settings.reservation_of(party)
        if u < reservation:
            return False, (
                f"standing offer utility {u:.4f} below {party} reservation {reservation}"
            )
    return True, ""


def submit_action(state: SessionState, party: str, action: Action) -> TranscriptEntry:
    """Apply one move, append its transcript entry, and return the entry.

    Offers flip the turn and consume a round; the offer that exhausts the
    deadline fails the session immediately after being logged.
    """
    if party not in PARTIES:
        raise ProtocolError(f"unknown party {party!r}")
    if state.status != "open":
        raise TerminalStateError(f"session already {state.status}")
    if party != state.turn:
        raise OutOfTurnError(f"it is {state.turn}'s turn, not {party}'s")

    if action.kind == OFFER:
        if action.bid is None:
            raise InvalidBidError("offer carries no bid")
        ensure_valid_bid(state.settings.domain, action.bid)
        entry = TranscriptEntry(
            round=state.round,
            party=party,
            action=OFFER,
            bid=action.bid,
            u_h=None,
            u_p_est=None,
            timestamp=state.next_timestamp(),
        )
        state.entries.append(entry)
        state.standing = StandingOffer(party=party, bid=action.bid)
        state.round += 1
        state.turn = other_party(party)
        if state.round >= state.settings.deadline_rounds:
            state.status = "failed"
        return entry

    if action.kind == ACCEPT:
        allowed, reason = _accept_allowed(state, party)
        if not allowed:
            if state.standing is None or state.standing.party == party:
                raise NoStandingOfferError(reason)
            raise IllegalAcceptError(reason)
        entry = TranscriptEntry(
            round=state.round,
            party=party,
            action=ACCEPT,
            bid=state.standing.bid,
            u_h=None,
            u_p_est=None,
            timestamp=state.next_timestamp(),
        )
        state.entries.append(entry)
        state.agreed_bid = state.standing.bid
        state.status = "agreed"
        return entry

    if action.kind == END:
        entry = TranscriptEntry(
            round=state.round,
            party=party,
            action=END,
            bid=None,
            u_h=None,
            u_p_est=None,
            timestamp=state.next_timestamp(),
        )
        state.entries.append(entry)
        state.status = "failed"
        return entry

    raise ProtocolError(f"unknown action kind {action.kind!r}")


def legal_actions(state: SessionState, party: str) -> set[str]:
    """Exactly the action kinds submit_action would admit for `party` now."""
    if state.status != "open" or party != state.turn:
        return set()
    kinds = {OFFER, END}
    allowed, _ = _accept_allowed(state, party)
    if allowed:
        kinds.add(ACCEPT)
    return kinds


def session_outcome(state: SessionState) -> Outcome:
    """Terminal outcome; utilities use the true profiles when both are known."""
    if state.status == "open":
        raise NonTerminalSessionError("session still open")
    if state.status == "failed" or state.agreed_bid is None:
        return Outcome(result="no-agreement", bid=None, point=None, rounds_used=state.round)
    point = None
    if state.settings.true_profile_p is not None:
        point = utility_point(
            state.agreed_bid, state.settings.profile_h, state.settings.true_profile_p
        )
    return Outcome(
        result="agreement", bid=state.agreed_bid, point=point, rounds_used=state.round
    )


# --- bidding building blocks -------------------------------------------------


def time_dependent_target(t: float, e: float, u_min: float, u_max: float) -> float:
    """Target own-utility at normalized time t for concession exponent e.

    u_min + (u_max - u_min) * (1 - t**(1/e)): e < 1 concedes late (boulware),
    e > 1 concedes early (conceder), e = 1 is linear.
    """
    if u_min > u_max:
        raise ProtocolError(f"u_min {u_min} > u_max {u_max}")
    if e <= 0:
        raise ProtocolError(f"concession exponent must be positive, got {e}")
    t = min(1.0, max(0.0, t))
    return u_min + (u_max - u_min) * (1.0 - t ** (1.0 / e))


def select_bid_near_target(
    space: Sequence[Bid],
    profile: AdditiveUtilityProfile,
    target: float,
    reservation: float = 0.0,
) -> Bid:
    """Bid whose own-utility is closest to `target` among bids meeting the
    reservation; ties go to the lower bid index."""
    if not space:
        raise NoFeasibleBidError("empty bid space")
    best = None
    best_key = None
    for i, bid in enumerate(space):
        u = utility(profile, bid)
        if u < reservation:
            continue
        key = (abs(u - target), i)
        if best_key is None or key < best_key:
            best, best_key = bid, key
    if best is None:
        raise NoFeasibleBidError(f"no bid reaches reservation {reservation}")
    return best


def acceptance_decision(
    state: SessionState,
    party: str,
    *,
    profile: AdditiveUtilityProfile,
    planned_bid: Bid,
    reservation: float,
) -> bool:
    """Accept iff the standing offer is at least as good as one's own plan and
    the reservation."""
    if state.standing is None or state.standing.party == party:
        raise NoStandingOfferError("no standing offer from the counterpart")
    u_standing = utility(profile, state.standing.bid)
    u_planned = utility(profile, planned_bid)
    return u_standing >= max(u_planned, reservation)


# --- builtin strategies ------------------------------------------------------


class TimeDependentStrategy:
    """Offer near a time-decaying target; accept when the standing offer beats
    the plan.

    Normalized time is round / deadline.  The target sweeps from the best
    achievable own-utility down to the reservation unless params override
    u_max / u_min.
    """

    def __init__(self, party: str, e: float, params: Mapping[str, Any] | None = None):
        params = params or {}
        self.party = party
        self.e = float(params.get("e", e))
        self.u_max = params.get("u_max")
        self.u_min = params.get("u_min")

    def act(self, state: SessionState) -> Action:
        settings = state.settings
        profile = settings.profile_of(self.party)
        if profile is None:
            raise ConfigError([f"builtin strategy for {self.party} has no profile"])
        reservation = settings.reservation_of(self.party)
        space = enumerate_bids(settings.domain)
        utilities = [utility(profile, b) for b in space]
        u_max = self.u_max if self.u_max is not None else max(utilities)
        u_min = self.u_min if self.u_min is not None else max(reservation, min(utilities))
        u_min = min(u_min, u_max)
        t = state.round / settings.deadline_rounds
        target = time_dependent_target(t, self.e, u_min, u_max)
        planned = select_bid_near_target(space, profile, target, reservation)
        if state.standing is not None and state.standing.party != self.party:
            if acceptance_decision(
                state, self.party, profile=profile, planned_bid=planned,
                reservation=reservation,
            ):
                return Action.accept()
        return Action.offer(planned)


class ScriptedStrategy:
    """Plays a fixed bid list; accepts when the standing offer is whitelisted.

    The play head is derived from the party's own offer count in the
    transcript, so a replayed or re-created session scripts identically.
    """

    def __init__(self, party: str, params: Mapping[str, Any]):
        self.party = party
        self.bids = list(params.get("bids", []))
        self.accept_bids = [dict(b) for b in params.get("accept_bids", [])]

    def act(self, state: SessionState) -> Action:
        settings = state.settings
        if state.standing is not None and state.standing.party != self.party:
            standing_map = settings.domain.bid_to_mapping(state.standing.bid)
            if any(standing_map == accept for accept in self.accept_bids):
                return Action.accept()
        own_offers = sum(
            1 for e in state.entries if e.party == self.party and e.action == OFFER
        )
        if own_offers >= len(self.bids):
            return Action.end()
        return Action.offer(settings.domain.bid_from_mapping(self.bids[own_offers]))


def make_strategy(spec: StrategySpec, party: str):
    """Instantiate a builtin strategy; returns None for human assignments."""
    if spec.kind == "human":
        return None
    if spec.kind == "boulware":
        return TimeDependentStrategy(party, e=0.2, params=spec.params)
    if spec.kind == "conceder":
        return TimeDependentStrategy(party, e=2.0, params=spec.params)
    if spec.kind == "linear":
        return TimeDependentStrategy(party, e=1.0, params=spec.params)
    if spec.kind == "time-dependent":
        return TimeDependentStrategy(party, e=1.0, params=spec.params)
    if spec.kind == "scripted":
        return ScriptedStrategy(party, spec.params)
    raise ConfigError([f"unknown strategy kind {spec.kind!r}"])
