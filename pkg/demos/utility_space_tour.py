# Tour of the core value types: a discrete negotiation domain, additive
# utility profiles for the two parties, and the normalized utility space the
# rest of the library works in.

from fairneg import (
    AdditiveUtilityProfile,
    Domain,
    Issue,
    enumerate_bids,
    utility,
    utility_point,
    validate_profile,
)

# A tiny two-issue domain: the buyer H wants a low price and fast delivery,
# the seller P wants the opposite.
domain = Domain.create(
    "laptop-sale",
    [
        Issue.create("price", ["low", "mid", "high"]),
        Issue.create("delivery", ["slow", "fast"]),
    ],
)

profile_h = AdditiveUtilityProfile.create(
    domain,
    weights=[0.7, 0.3],
    evaluations=[{"low": 1.0, "mid": 0.5, "high": 0.0}, {"slow": 0.0, "fast": 1.0}],
)
profile_p = AdditiveUtilityProfile.create(
    domain,
    weights=[0.6, 0.4],
    evaluations=[{"low": 0.0, "mid": 0.5, "high": 1.0}, {"slow": 1.0, "fast": 0.0}],
)

print("profile H violations:", validate_profile(profile_h) or "none")

bids = enumerate_bids(domain)
print(f"\nbid space has {len(bids)} bids (lexicographic order is the tie-break index):")
for i, bid in enumerate(bids):
    point = utility_point(bid, profile_h, profile_p)
    print(f"  [{i}] {domain.bid_to_mapping(bid)}  ->  u_H={point.u_h:.2f}  u_P={point.u_p:.2f}")

best_for_h = max(bids, key=lambda b: utility(profile_h, b))
print("\nH's favourite bid:", domain.bid_to_mapping(best_for_h))

# Utilities are additive: weight times evaluation, summed per issue.
bid = domain.bid_from_mapping({"price": "mid", "delivery": "slow"})
print(
    "check (mid, slow) for H:",
    f"0.7*0.5 + 0.3*0.0 = {utility(profile_h, bid):.2f}",
)
