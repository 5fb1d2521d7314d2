# The fairness geometry over a bid space: Pareto frontier, egalitarian point,
# line of equal opportunity, balanced-needs ray, and the needs transform.
# Saves a scatter of the whole construction to fairness_geometry.png.

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from fairneg import (
    AdditiveUtilityProfile,
    Domain,
    FairnessPrinciple,
    Issue,
    NeedsProfile,
    balanced_needs_bids,
    balanced_needs_line,
    egalitarian_point,
    fairness_deviation,
    kalai_smorodinsky_point,
    line_of_equal_opportunity,
    needs_transform,
    pareto_frontier,
)
from fairneg.domain import space_points

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

points = space_points(domain, profile_h, profile_p)
frontier = pareto_frontier(points)
ep = egalitarian_point(frontier)
leo = line_of_equal_opportunity(points)
ks = kalai_smorodinsky_point(points)

print("Pareto frontier:", [(p.u_h, p.u_p) for p in frontier.points])
print("egalitarian point (max-min utility):", ep.coords())
print("kalai-smorodinsky comparison point:", ks.coords())
print("line of equal opportunity members:", [(p.u_h, p.u_p) for p in leo])

# Suppose P is in much greater need than H: outcomes should favour P 3:1.
needs = NeedsProfile.create([0.25, 0.75])
ray = balanced_needs_line(needs)
green = balanced_needs_bids(points, needs)
print("\nbalanced-needs ray direction:", ray.direction)
print("balanced-needs bids:", [(p.u_h, p.u_p) for p in green])

principle = FairnessPrinciple.create("need", needs=needs)
print("\nper-bid deviation from the needs principle:")
for p in points:
    print(f"  {domain.bid_to_mapping(p.bid)}: {fairness_deviation(p, principle):.3f}")

# The needs transform rescales the axes so the balanced-needs ray becomes the
# diagonal; strategies tuned for equal utility then aim for balanced needs.
print("\nafter the needs transform the balanced bids hug the diagonal:")
for p in green:
    image = needs_transform(p, needs)
    print(f"  ({p.u_h:.2f}, {p.u_p:.2f}) -> ({image.u_h:.2f}, {image.u_p:.2f})")

fig, ax = plt.subplots(figsize=(6, 6))
ax.scatter([p.u_h for p in points], [p.u_p for p in points], c="gray", label="bids")
fx = [p.u_h for p in frontier.points]
fy = [p.u_p for p in frontier.points]
ax.plot(fx, fy, "k-", lw=1, label="pareto frontier")
ax.plot([0, 1], [0, 1], "b:", label="diagonal (equal utility)")
t = min(1 / ray.direction[0], 1 / ray.direction[1])
ax.plot([0, t * ray.direction[0]], [0, t * ray.direction[1]], "g--", label="balanced needs")
ax.scatter([p.u_h for p in leo], [p.u_p for p in leo], c="blue", marker="s",
           label="equal-opportunity bids")
ax.scatter([p.u_h for p in green], [p.u_p for p in green], c="green", marker="^",
           label="balanced-needs bids")
ax.scatter([ep.u_h], [ep.u_p], c="red", marker="*", s=200, label="egalitarian point")
ax.set_xlabel("u_H")
ax.set_ylabel("u_P")
ax.legend(loc="upper right", fontsize=8)
fig.savefig("fairness_geometry.png", dpi=120)
print("\nwrote fairness_geometry.png")
