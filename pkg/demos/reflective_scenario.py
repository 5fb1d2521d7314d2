# The full reflective-control story in one scripted session.
#
# H negotiates under the needs principle, believing P deserves the larger
# share, and keeps offering bids that clearly favour P.  P, who actually cares
# about equality, keeps countering.  The analyze step spots the pattern
# (a principle mismatch), raises a contestation with transcript evidence, and
# the human repairs the negotiation by enlarging the domain with a side job
# for P: the balanced-needs deals, re-bid with the side job done, land on the
# new space's line of equal opportunity and P accepts.  Every decision —
# including the rejected alternatives — is in the append-only change log.

from fairneg import (
    AdditiveUtilityProfile,
    Domain,
    FairnessPrinciple,
    Issue,
    NeedsProfile,
    SessionConfig,
    SessionRuntime,
    StrategySpec,
    balanced_needs_bids,
    line_of_equal_opportunity,
)
from fairneg.analytics import nearest_member_distance
from fairneg.domain import embed_bid, space_points, utility_point

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
needs = NeedsProfile.create([0.25, 0.75])  # P is in much greater need

side_job = {
    "issue": {"name": "sidejob", "values": ["none", "done"]},
    "deltas": {
        "H": {"weight": 0.5, "evaluations": {"none": 0.0, "done": 1.0}},
        "P": {"weight": 0.0, "evaluations": {"none": 0.0, "done": 1.0}},
    },
}

config = SessionConfig(
    domain=domain,
    profile_h=profile_h,
    true_profile_p=profile_p,
    reservation_h=0.0,
    reservation_p=0.1,
    deadline_rounds=20,
    seed=7,
    active_principle=FairnessPrinciple.create("need", needs=needs),
    strategy_h=StrategySpec(kind="scripted", params={
        "bids": [
            {"price": "high", "delivery": "slow"},
            {"price": "high", "delivery": "slow"},
            {"price": "high", "delivery": "fast", "sidejob": "done"},
        ],
    }),
    strategy_p=StrategySpec(kind="scripted", params={
        "bids": [
            {"price": "high", "delivery": "fast"},
            {"price": "high", "delivery": "fast"},
        ],
        "accept_bids": [{"price": "high", "delivery": "fast", "sidejob": "done"}],
    }),
    decision_policy=[
        {"kind": "extend-domain", "decision": "approve",
         "rationale": "repair the negotiation by adding the side job",
         "payload": side_job},
        {"kind": "*", "decision": "reject", "rationale": "keep the current setup"},
    ],
)

runtime = SessionRuntime(config)
outcome = runtime.run_to_completion()

print("aberrations raised:")
for aberration in runtime.aberrations:
    print(f"  {aberration.kind}: evidence at transcript entries {list(aberration.evidence)}")
    print(f"    {aberration.explanation.metric} = {aberration.explanation.observed}"
          f" (threshold {aberration.explanation.threshold})")

print("\nchange log (every decision, with rationale):")
for entry in runtime.changelog:
    print(f"  [{entry.decided_by}] {entry.decision} {entry.kind}: {entry.rationale}")

print("\nchange-log replay reproduces final config digest:",
      runtime.audit_changelog() == entry.config_digest)

settings = runtime.state.settings
print("\nbid space grew from 6 to", len(space_points(
    settings.domain, settings.profile_h, settings.true_profile_p)), "bids")

green_before = balanced_needs_bids(space_points(domain, profile_h, profile_p), needs)
new_points = space_points(settings.domain, settings.profile_h, settings.true_profile_p)
leo_after = line_of_equal_opportunity(new_points)
print("\nbalanced-needs deals, re-bid with the side job done:")
for green in green_before:
    shifted = utility_point(embed_bid(green.bid, "done"),
                            settings.profile_h, settings.true_profile_p)
    print(f"  ({green.u_h:.2f}, {green.u_p:.2f}) -> ({shifted.u_h:.3f}, {shifted.u_p:.2f})"
          f"  distance to new equal-opportunity set:"
          f" {nearest_member_distance(shifted, leo_after):.3f}")

print("\noutcome:", outcome.result, outcome.point.coords() if outcome.point else "")
