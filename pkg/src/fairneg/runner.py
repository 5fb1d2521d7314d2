"""Session orchestration: strategies, the reflective loop, persistence, replay.

A SessionRuntime owns one session end to end: it drives builtin strategies,
runs the reflective loop after every transcript event, lets a scripted policy
stand in for the human in headless mode, appends the transcript and change log
to disk, and produces the analytics report and its digest.  Replaying a
persisted session through the same machinery reproduces the digest bit-exactly.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

from .analytics import (
    build_report,
    principle_from_json,
    principle_to_json,
)
from .domain import (
    domain_from_json,
    domain_to_json,
    profile_from_json,
    profile_to_json,
    space_points,
)
from .errors import ConfigError, FairnegError, ReplayError
from .opponent import FrequencyModel, estimate_or_optimistic
from .protocol import (
    ACCEPT,
    END,
    OFFER,
    Action,
    Outcome,
    SessionConfig,
    SessionState,
    StrategySpec,
    TranscriptEntry,
    create_session,
    make_strategy,
    session_outcome,
    submit_action,
    utility,
)
from .reflection import (
    Aberration,
    BackgroundConfig,
    ChangeLogEntry,
    KnowledgeBase,
    MonitorReport,
    Proposal,
    analyze,
    canonical_json,
    config_digest,
    decide,
    monitor_step,
    plan,
    replay_changelog,
    sha256_hex,
)

MAX_AUTO_STEPS = 10_000


class DecisionPolicy:
    """Scripted stand-in for the human: first matching rule decides a proposal.

    Rules: {"kind": <proposal kind or "*">, "decision": approve|reject,
    "rationale": str, "payload": {...}?, "once": bool?}.
    """

    def __init__(self, rules: Sequence[Mapping[str, Any]]):
        self.rules = [dict(r) for r in rules]
        self._used: set[int] = set()

    def match(self, proposal: Proposal) -> dict | None:
        for i, rule in enumerate(self.rules):
            if rule.get("once") and i in self._used:
                continue
            if rule["kind"] in (proposal.kind, "*"):
                self._used.add(i)
                return rule
        return None


@dataclass
class TranscriptSink:
    path: Path | None
    lines: list[str] = field(default_factory=list)

    def write(self, record: Mapping) -> None:
        line = json.dumps(record)
        self.lines.append(line)
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")


class SessionRuntime:
    """Everything a live session needs, wired together."""

    def __init__(
        self,
        config: SessionConfig,
        out_dir: Path | None = None,
        event_listener=None,
    ):
        self.config = config
        self.state = create_session(config)
        self.kb = KnowledgeBase(
            principle=config.active_principle,
            background=config.background or BackgroundConfig(),
        )
        problems = self.kb.background.validate()
        if problems:
            raise ConfigError(problems)
        self.model = FrequencyModel(config.domain)
        self.reports: list[MonitorReport] = []
        self.aberrations: list[Aberration] = []
        self._raised: set[tuple] = set()
        self.proposals: dict[str, Proposal] = {}
        self.changelog: list[ChangeLogEntry] = []
        self.policy = (
            DecisionPolicy(config.decision_policy) if config.decision_policy else None
        )
        self.initial_digest = config_digest(self.state.settings, self.kb)
        self._strategies = {
            "H": make_strategy(config.strategy_h, "H"),
            "P": make_strategy(config.strategy_p, "P"),
        }
        self._event_listener = event_listener
        self.out_dir = out_dir
        self._transcript = TranscriptSink(None)
        self._changelog_path: Path | None = None
        if out_dir is not None:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / "config.json").write_text(
                json.dumps(config_to_json(config), indent=2) + "\n", encoding="utf-8"
            )
            self._transcript = TranscriptSink(out_dir / "transcript.jsonl")
            self._changelog_path = out_dir / "changelog.jsonl"
            self._transcript.path.touch()
            self._changelog_path.touch()

    # -- event plumbing --------------------------------------------------

    def _emit(self, kind: str, payload: Mapping) -> None:
        if self._event_listener is not None:
            self._event_listener(kind, payload)

    def record_changelog(self, entry: ChangeLogEntry) -> None:
        self.changelog.append(entry)
        if self._changelog_path is not None:
            with open(self._changelog_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(entry.to_json()) + "\n")
        self._emit("decision", entry.to_json())

    def after_change(self, kind: str) -> None:
        """Re-derive session caches after an executed configuration change."""
        if kind == "extend-domain":
            # a standing offer from the old space cannot be accepted any more
            self.state.standing = None
            new_issue = self.state.settings.domain.issues[-1]
            self.model.extend(new_issue)
        if kind == "change-strategy":
            self._strategies = {
                "H": make_strategy(self.state.settings.strategy_h, "H"),
                "P": make_strategy(self.state.settings.strategy_p, "P"),
            }

    # -- acting ------------------------------------------------------------

    def submit(self, party: str, action: Action) -> TranscriptEntry:
        """One protocol event plus its monitor/analyze/plan/decide follow-up."""
        entry = submit_action(self.state, party, action)
        if entry.action == OFFER and party == "P":
            self.model.observe(entry.bid)
        self._annotate(entry)
        self._transcript.write(transcript_record(self.state, entry))
        self._emit("transcript_entry", transcript_record(self.state, entry))
        if entry.action == OFFER:
            self._reflect()
        return entry

    def _annotate(self, entry: TranscriptEntry) -> None:
        if entry.bid is None:
            return
        settings = self.state.settings
        est = estimate_or_optimistic(self.model, settings.domain)
        entry.u_h = utility(settings.profile_h, entry.bid)
        entry.u_p_est = utility(est, entry.bid)

    def _reflect(self) -> None:
        report = monitor_step(self.state, self.kb, self.model)
        self.reports.append(report)
        self._emit("monitor_report", report.to_json())
        for aberration in analyze(self.reports, self.state, self.kb):
            if aberration.key() in self._raised:
                continue
            self._raised.add(aberration.key())
            self.aberrations.append(aberration)
            self._emit("aberration", aberration.to_json())
            for proposal in plan(aberration, self.kb):
                self.proposals[proposal.id] = proposal
                self._emit("proposal", proposal.to_json())
        if self.policy is not None:
            self._apply_policy()

    def _apply_policy(self) -> None:
        for proposal in list(self.proposals.values()):
            if proposal.status != "pending":
                continue
            rule = self.policy.match(proposal)
            if rule is None:
                continue
            decide(
                proposal,
                rule["decision"],
                rule.get("rationale", "scripted decision"),
                self,
                decided_by="scripted-policy",
                payload_override=rule.get("payload"),
            )

    def handle_decision(
        self,
        proposal_id: str,
        decision: str,
        rationale: str,
        payload: Mapping | None = None,
        decided_by: str = "human",
    ) -> ChangeLogEntry:
        proposal = self.proposals.get(proposal_id)
        if proposal is None:
            raise FairnegError(f"unknown proposal {proposal_id!r}")
        return decide(
            proposal, decision, rationale, self,
            decided_by=decided_by, payload_override=payload,
        )

    def pending_proposals(self) -> list[Proposal]:
        return [p for p in self.proposals.values() if p.status == "pending"]

    def current_strategy(self, party: str):
        return self._strategies[party]

    def run_builtin_turns(self) -> None:
        """Advance the session while it is a builtin strategy's move."""
        steps = 0
        while self.state.status == "open":
            strategy = self._strategies[self.state.turn]
            if strategy is None:
                return
            steps += 1
            if steps > MAX_AUTO_STEPS:
                raise FairnegError("builtin strategies failed to terminate")
            self.submit(self.state.turn, strategy.act(self.state))

    def run_to_completion(self) -> Outcome:
        self.run_builtin_turns()
        if self.state.status == "open":
            raise ConfigError(["both parties must be builtin strategies to run headless"])
        return self.outcome()

    # -- reporting ---------------------------------------------------------

    def outcome(self) -> Outcome:
        return session_outcome(self.state)

    def _analysis_profile_p(self):
        settings = self.state.settings
        if settings.true_profile_p is not None:
            return settings.true_profile_p
        return estimate_or_optimistic(self.model, settings.domain)

    def analytics(self, transformed: bool | None = None) -> dict:
        """Current fairness-analytics report over the live bid space."""
        settings = self.state.settings
        points = space_points(settings.domain, settings.profile_h, self._analysis_profile_p())
        view_transformed = self.kb.transformed_view if transformed is None else transformed
        report = build_report(
            points,
            self.kb.principle,
            resolution=self.kb.background.leo_resolution,
            transformed=view_transformed and self.kb.effective_needs() is not None,
            transform_needs=self.kb.effective_needs(),
            bid_mapping=settings.domain.bid_to_mapping,
        )
        report["opponent_estimate"] = self.model.to_json()
        report["judgments"] = [j.to_json() for j in self.kb.judgments]
        report["config_digest"] = config_digest(settings, self.kb)
        return report

    def analytics_digest(self) -> str:
        """Digest over everything the loop computed; replay must reproduce it."""
        outcome = None
        if self.state.status != "open":
            outcome = outcome_to_json(self.outcome())
        payload = {
            "reports": [r.to_json() for r in self.reports],
            "aberrations": [a.to_json() for a in self.aberrations],
            "final": self.analytics(),
            "outcome": outcome,
        }
        return sha256_hex(canonical_json(payload))

    def summary(self) -> dict:
        analytics = self.analytics()
        outcome = None
        if self.state.status != "open":
            outcome = outcome_to_json(self.outcome())
        return {
            "status": self.state.status,
            "rounds_used": self.state.round,
            "outcome": outcome,
            "egalitarian_point": analytics["egalitarian_point"],
            "aberrations": [a.to_json() for a in self.aberrations],
            "changelog_entries": len(self.changelog),
            "analytics_digest": self.analytics_digest(),
            "final_config_digest": config_digest(self.state.settings, self.kb),
        }

    def finalize(self) -> dict:
        summary = self.summary()
        if self.out_dir is not None:
            (self.out_dir / "analytics.json").write_text(
                json.dumps(self.analytics(), indent=2) + "\n", encoding="utf-8"
            )
            (self.out_dir / "summary.json").write_text(
                json.dumps(summary, indent=2) + "\n", encoding="utf-8"
            )
        return summary

    def audit_changelog(self) -> str:
        """Replay the change log over the initial configuration; returns the
        reproduced digest (must equal the live final digest)."""
        fresh = SessionRuntime(self.config)
        return replay_changelog(
            fresh.state.settings, fresh.kb, [e.to_json() for e in self.changelog]
        )


# --- wire formats --------------------------------------------------------


def transcript_record(state: SessionState, entry: TranscriptEntry) -> dict:
    """One transcript line; field order is stable for replay hashing."""
    record: dict = {"round": entry.round, "party": entry.party, "action": entry.action}
    if entry.bid is not None:
        record["bid"] = state.settings.domain.bid_to_mapping(entry.bid)
        record["u_H"] = entry.u_h
        record["u_P_est"] = entry.u_p_est
    record["timestamp"] = entry.timestamp
    return record


def outcome_to_json(outcome: Outcome) -> dict:
    return {
        "result": outcome.result,
        "bid": None if outcome.bid is None else list(outcome.bid.values),
        "point": None
        if outcome.point is None
        else {"u_H": outcome.point.u_h, "u_P": outcome.point.u_p},
        "rounds_used": outcome.rounds_used,
    }


def config_to_json(config: SessionConfig) -> dict:
    data: dict = {
        "domain": domain_to_json(config.domain),
        "profile_H": profile_to_json(config.profile_h),
        "true_profile_P": None
        if config.true_profile_p is None
        else profile_to_json(config.true_profile_p),
        "reservation": {"H": config.reservation_h, "P": config.reservation_p},
        "deadline_rounds": config.deadline_rounds,
        "seed": config.seed,
        "active_principle": principle_to_json(config.active_principle),
        "strategies": {
            "H": config.strategy_h.to_json(),
            "P": config.strategy_p.to_json(),
        },
        "background": (config.background or BackgroundConfig()).to_json(),
    }
    if config.decision_policy:
        data["decision_policy"] = [dict(r) for r in config.decision_policy]
    return data


def config_from_json(data: Mapping) -> SessionConfig:
    try:
        domain = domain_from_json(data["domain"])
        profile_h = profile_from_json(data["profile_H"], domain)
        true_profile_p = None
        if data.get("true_profile_P") is not None:
            true_profile_p = profile_from_json(data["true_profile_P"], domain)
        reservation = data.get("reservation", {})
        principle = principle_from_json(data["active_principle"])
        strategies = data.get("strategies", {})
        return SessionConfig(
            domain=domain,
            profile_h=profile_h,
            true_profile_p=true_profile_p,
            reservation_h=float(reservation.get("H", 0.0)),
            reservation_p=float(reservation.get("P", 0.0)),
            deadline_rounds=int(data.get("deadline_rounds", 1)),
            seed=int(data.get("seed", 0)),
            active_principle=principle,
            strategy_h=StrategySpec.from_json(strategies.get("H", {"kind": "human"})),
            strategy_p=StrategySpec.from_json(strategies.get("P", {"kind": "human"})),
            background=BackgroundConfig.from_json(data.get("background")),
            decision_policy=data.get("decision_policy"),
        )
    except KeyError as exc:
        raise ConfigError([f"missing config field: {exc.args[0]}"]) from exc


def load_config(path: Path, seed: int | None = None) -> SessionConfig:
    """Parse a config file; JSON syntax errors carry line diagnostics."""
    text = path.read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            [f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"]
        ) from exc
    config = config_from_json(data)
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    return config


def run_headless(
    config_path: Path, seed: int | None = None, out_dir: Path | None = None
) -> dict:
    """Run a fully scripted/builtin session to termination and persist it."""
    config = load_config(config_path, seed=seed)
    for party, spec in (("H", config.strategy_h), ("P", config.strategy_p)):
        if not spec.is_builtin():
            raise ConfigError([f"headless run requires a builtin strategy for {party}"])
    runtime = SessionRuntime(config, out_dir=out_dir)
    runtime.run_to_completion()
    return runtime.finalize()


def replay(transcript_path: Path) -> SessionRuntime:
    """Rebuild a session from its transcript (plus sibling config/changelog).

    Actions are re-driven through the protocol engine and approved changes are
    re-applied at their logged positions, so every monitor report, aberration,
    and the analytics digest are recomputed exactly as in the live run.
    """
    transcript_path = Path(transcript_path)
    config_path = transcript_path.parent / "config.json"
    if not config_path.exists():
        raise ReplayError(f"no config.json beside {transcript_path}")
    config = load_config(config_path)

    # (timestamp, line_no, party, action kind, bid mapping or None)
    actions: list[tuple[int, int, str, str, Mapping | None]] = []
    with open(transcript_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ReplayError(f"malformed transcript entry: {exc.msg}", line_no) from exc
            try:
                party = record["party"]
                kind = record["action"]
                timestamp = record["timestamp"]
            except KeyError as exc:
                raise ReplayError(f"missing field {exc.args[0]!r}", line_no) from exc
            if kind == OFFER and "bid" not in record:
                raise ReplayError("offer entry without bid", line_no)
            if kind not in (OFFER, ACCEPT, END):
                raise ReplayError(f"unknown action {kind!r}", line_no)
            actions.append((timestamp, line_no, party, kind, record.get("bid")))

    changes: list[tuple[int, Mapping]] = []
    changelog_path = transcript_path.parent / "changelog.jsonl"
    if changelog_path.exists():
        with open(changelog_path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ReplayError(
                        f"malformed changelog entry: {exc.msg}", line_no
                    ) from exc
                changes.append((entry["timestamp"], entry))

    runtime = SessionRuntime(config)
    runtime.policy = None  # decisions come from the log, not a live policy

    events: list[tuple[int, int, Any]] = []
    for timestamp, line_no, party, kind, bid_map in actions:
        events.append((timestamp, 0, (line_no, party, kind, bid_map)))
    for timestamp, entry in changes:
        events.append((timestamp, 1, entry))
    events.sort(key=lambda item: item[0])

    for _, event_kind, payload in events:
        if event_kind == 0:
            line_no, party, kind, bid_map = payload
            try:
                if kind == OFFER:
                    bid = runtime.state.settings.domain.bid_from_mapping(bid_map)
                    action = Action.offer(bid)
                elif kind == ACCEPT:
                    action = Action.accept()
                else:
                    action = Action.end()
                runtime.submit(party, action)
            except FairnegError as exc:
                raise ReplayError(str(exc), line_no) from exc
        else:
            entry = payload
            if entry["decision"] == "approve" and entry["kind"] != "no-change":
                from .reflection import apply_change

                apply_change(
                    runtime.state.settings, runtime.kb, entry["kind"], entry["payload"]
                )
                runtime.after_change(entry["kind"])
            runtime.state.next_timestamp()  # keep the logical clock aligned
            runtime.changelog.append(ChangeLogEntry(**entry))
    return runtime
