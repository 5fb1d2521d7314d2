# A complete automated session: a stubborn boulware buyer against a conceding
# seller, with the monitoring loop recording fairness per offer, then a replay
# from the persisted transcript proving the run is reproducible bit for bit.

import tempfile
from pathlib import Path

from fairneg import (
    AdditiveUtilityProfile,
    Domain,
    FairnessPrinciple,
    Issue,
    SessionConfig,
    SessionRuntime,
    StrategySpec,
    replay,
)

domain = Domain.create(
    "laptop-sale",
    [
        Issue.create("price", ["low", "mid", "high"]),
        Issue.create("delivery", ["slow", "fast"]),
    ],
)
profile_h = AdditiveUtilityProfile.create(
    domain, [0.7, 0.3],
    [{"low": 1.0, "mid": 0.5, "high": 0.0}, {"slow": 0.0, "fast": 1.0}],
)
profile_p = AdditiveUtilityProfile.create(
    domain, [0.6, 0.4],
    [{"low": 0.0, "mid": 0.5, "high": 1.0}, {"slow": 1.0, "fast": 0.0}],
)

config = SessionConfig(
    domain=domain,
    profile_h=profile_h,
    true_profile_p=profile_p,
    reservation_h=0.1,
    reservation_p=0.1,
    deadline_rounds=12,
    seed=42,
    active_principle=FairnessPrinciple.create("equality"),
    strategy_h=StrategySpec(kind="boulware"),   # concedes late
    strategy_p=StrategySpec(kind="conceder"),   # concedes early
)

out = Path(tempfile.mkdtemp()) / "session"
runtime = SessionRuntime(config, out_dir=out)
outcome = runtime.run_to_completion()

print("transcript:")
for entry in runtime.state.entries:
    bid = domain.bid_to_mapping(entry.bid) if entry.bid else "-"
    print(f"  r{entry.round} {entry.party} {entry.action:6s} {bid} "
          f"u_H={entry.u_h if entry.u_h is not None else '-'}")

print("\noutcome:", outcome.result, outcome.point.coords() if outcome.point else "")
print("monitored offers:", len(runtime.reports))
print("last offer equality deviation:", round(runtime.reports[-1].deviation, 3))

live_digest = runtime.analytics_digest()
replayed = replay(out / "transcript.jsonl")
print("\nlive analytics digest:    ", live_digest[:24], "...")
print("replayed analytics digest:", replayed.analytics_digest()[:24], "...")
assert replayed.analytics_digest() == live_digest
print("replay reproduces the live analytics exactly")
