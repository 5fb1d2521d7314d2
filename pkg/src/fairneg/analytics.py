"""Bargaining solutions and fairness geometry over the normalized utility space.

Works on lists of UtilityPoint in [0, 1] x [0, 1].  Provides the Pareto
frontier, the egalitarian point (argmax of the minimum party utility over the
frontier), the line of equal opportunity (bids nearest the equal-utility
diagonal), the balanced-needs ray u_H/u_P = n_H/n_P and its nearest-bid set,
the needs transform that maps that ray onto the diagonal, per-principle
fairness deviations, and a Kalai-Smorodinsky comparison point.

All argmin/argmax ties resolve by the lower bid tie-break index, so every
operation is deterministic.  Functions are pure; parallel callers are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .domain import NeedsProfile, UtilityPoint
from .errors import EmptyInputError, InvalidPrincipleError

DEFAULT_RESOLUTION = 101

PRINCIPLE_KINDS = ("equity", "equality", "need")


@dataclass(frozen=True)
class Frontier:
    """Pareto-optimal subset of a point set, ordered by descending u_h."""

    points: tuple[UtilityPoint, ...]


@dataclass(frozen=True)
class RayDescriptor:
    """A ray from the origin with a unit direction of positive components."""

    direction: tuple[float, float]
    label: str

    @classmethod
    def create(cls, direction: Sequence[float], label: str) -> "RayDescriptor":
        dx, dy = float(direction[0]), float(direction[1])
        if dx <= 0 or dy <= 0:
            raise InvalidPrincipleError(
                f"ray direction components must be positive, got ({dx}, {dy})"
            )
        norm = math.hypot(dx, dy)
        return cls(direction=(dx / norm, dy / norm), label=label)


DIAGONAL = RayDescriptor(direction=(math.sqrt(0.5), math.sqrt(0.5)), label="diagonal")


@dataclass(frozen=True)
class FairnessPrinciple:
    """An outcome-fairness principle: equity, equality, or need.

    equity requires per-party investments (directly or via needs.investments);
    need requires a NeedsProfile; equality carries no parameters.
    """

    kind: str
    needs: NeedsProfile | None = None
    investments: tuple[float, float] | None = None

    def validate(self) -> list[str]:
        problems = []
        if self.kind not in PRINCIPLE_KINDS:
            problems.append(f"unknown principle kind {self.kind!r}")
        if self.kind == "need" and self.needs is None:
            problems.append("need principle requires a needs profile")
        if self.kind == "equity" and self.effective_investments() is None:
            problems.append("equity principle requires investments")
        return problems

    def effective_investments(self) -> tuple[float, float] | None:
        if self.investments is not None:
            return self.investments
        if self.needs is not None:
            return self.needs.investments
        return None

    @classmethod
    def create(
        cls,
        kind: str,
        needs: NeedsProfile | None = None,
        investments: Sequence[float] | None = None,
    ) -> "FairnessPrinciple":
        principle = cls(
            kind=kind,
            needs=needs,
            investments=tuple(float(i) for i in investments)
            if investments is not None
            else None,
        )
        problems = principle.validate()
        if problems:
            raise InvalidPrincipleError("; ".join(problems))
        return principle


def principle_to_json(principle: FairnessPrinciple) -> dict:
    data: dict = {"kind": principle.kind}
    if principle.needs is not None:
        from .domain import needs_to_json

        data["needs"] = needs_to_json(principle.needs)
    if principle.investments is not None:
        data["investments"] = {
            "H": principle.investments[0],
            "P": principle.investments[1],
        }
    return data


def principle_from_json(data) -> FairnessPrinciple:
    from .domain import needs_from_json

    needs = needs_from_json(data["needs"]) if data.get("needs") else None
    investments = None
    if data.get("investments"):
        investments = (data["investments"]["H"], data["investments"]["P"])
    return FairnessPrinciple.create(data["kind"], needs=needs, investments=investments)


def _tiebreak(point: UtilityPoint, position: int) -> int:
    return point.index if point.index is not None else position


def pareto_frontier(points: Sequence[UtilityPoint]) -> Frontier:
    """Non-dominated subset under (u_h, u_p) maximization.

    Dominance is weak in both coordinates and strict in at least one, so
    coordinate duplicates never dominate each other and are all retained.
    Single sorted sweep; the O(n^2) pairwise check lives in the tests as the
    independent oracle.
    """
    if not points:
        raise EmptyInputError("pareto_frontier needs at least one point")
    order = sorted(
        range(len(points)),
        key=lambda i: (-points[i].u_h, -points[i].u_p, _tiebreak(points[i], i)),
    )
    kept: list[int] = []
    best_y_strictly_right = -math.inf  # max u_p among points with strictly larger u_h
    pos = 0
    while pos < len(order):
        # group of equal u_h
        end = pos
        x = points[order[pos]].u_h
        while end < len(order) and points[order[end]].u_h == x:
            end += 1
        group = order[pos:end]
        group_best_y = max(points[i].u_p for i in group)
        for i in group:
            y = points[i].u_p
            if y == group_best_y and y > best_y_strictly_right:
                kept.append(i)
        best_y_strictly_right = max(best_y_strictly_right, group_best_y)
        pos = end
    kept.sort(key=lambda i: (-points[i].u_h, _tiebreak(points[i], i)))
    return Frontier(points=tuple(points[i] for i in kept))


def egalitarian_point(frontier: Frontier) -> UtilityPoint:
    """Frontier point with the highest minimum party utility.

    Ties break toward the larger coordinate sum, then the lower bid index, so
    the result prefers efficiency and is reproducible.
    """
    if not frontier.points:
        raise EmptyInputError("egalitarian_point needs a nonempty frontier")
    best = None
    best_key = None
    for pos, point in enumerate(frontier.points):
        key = (min(point.u_h, point.u_p), point.u_h + point.u_p, -_tiebreak(point, pos))
        if best_key is None or key > best_key:
            best, best_key = point, key
    return best


def _as_arrays(points: Sequence[UtilityPoint]) -> tuple[np.ndarray, np.ndarray]:
    coords = np.array([(p.u_h, p.u_p) for p in points], dtype=float)
    ties = np.array([_tiebreak(p, i) for i, p in enumerate(points)], dtype=int)
    return coords, ties


def _nearest_per_anchor(
    points: Sequence[UtilityPoint], anchors: np.ndarray
) -> list[UtilityPoint]:
    """Deduplicated nearest point per anchor; exact ties go to the lower index."""
    coords, ties = _as_arrays(points)
    order = np.argsort(ties, kind="stable")
    coords = coords[order]
    d2 = (coords[None, :, 0] - anchors[:, None, 0]) ** 2 + (
        coords[None, :, 1] - anchors[:, None, 1]
    ) ** 2
    winners = np.argmin(d2, axis=1)  # first occurrence = lowest tie-break index
    seen: set[int] = set()
    members: list[UtilityPoint] = []
    for w in winners:
        original = int(order[w])
        if original not in seen:
            seen.add(original)
            members.append(points[original])
    members.sort(key=lambda p: _tiebreak(p, 0))
    return members


def line_of_equal_opportunity(
    points: Sequence[UtilityPoint], resolution: int = DEFAULT_RESOLUTION
) -> list[UtilityPoint]:
    """Bids nearest the equal-utility diagonal, sampled along it.

    The diagonal is sampled at `resolution` equally spaced anchors (t, t),
    t = 0 .. 1; each anchor contributes its Euclidean-nearest point and the
    union is deduplicated.  For a space densely filling the square this set
    hugs the diagonal itself.
    """
    if not points:
        raise EmptyInputError("line_of_equal_opportunity needs at least one point")
    if resolution < 2:
        raise EmptyInputError(f"resolution must be >= 2, got {resolution}")
    t = np.linspace(0.0, 1.0, resolution)
    anchors = np.stack([t, t], axis=1)
    return _nearest_per_anchor(points, anchors)


def balanced_needs_line(needs: NeedsProfile) -> RayDescriptor:
    """Ray of outcomes proportional to needs: on it, u_H / u_P = n_H / n_P.

    Equal needs give back the diagonal.
    """
    return RayDescriptor.create(needs.needs, label="balanced-needs")


def balanced_needs_bids(
    points: Sequence[UtilityPoint],
    needs: NeedsProfile,
    resolution: int = DEFAULT_RESOLUTION,
) -> list[UtilityPoint]:
    """Bids nearest the balanced-needs ray, sampled along its unit-square span."""
    if not points:
        raise EmptyInputError("balanced_needs_bids needs at least one point")
    if resolution < 2:
        raise EmptyInputError(f"resolution must be >= 2, got {resolution}")
    ray = balanced_needs_line(needs)
    dx, dy = ray.direction
    t_max = min(1.0 / dx, 1.0 / dy)
    t = np.linspace(0.0, t_max, resolution)
    anchors = np.stack([t * dx, t * dy], axis=1)
    return _nearest_per_anchor(points, anchors)


def needs_transform(point: UtilityPoint, needs: NeedsProfile) -> UtilityPoint:
    """Per-axis scaling u'_p = u_p * n_min / n_p, sending the balanced-needs
    ray onto the diagonal.

    Positive scaling keeps the image inside the unit square and preserves each
    party's ranking of bids, so strategies stay meaningful in the transformed
    view.  Equal needs make this the identity.
    """
    n_h, n_p = needs.needs
    n_min = min(n_h, n_p)
    return UtilityPoint(
        u_h=point.u_h * (n_min / n_h),
        u_p=point.u_p * (n_min / n_p),
        bid=point.bid,
        index=point.index,
    )


def distance_to_ray(point: UtilityPoint, ray: RayDescriptor) -> float:
    """Perpendicular Euclidean distance from a unit-square point to the ray.

    With positive direction components and nonnegative coordinates, the
    projection parameter is nonnegative, so this equals the line distance.
    """
    dx, dy = ray.direction
    return abs(point.u_h * dy - point.u_p * dx)


def fairness_deviation(point: UtilityPoint, principle: FairnessPrinciple) -> float:
    """How far an outcome sits from the active principle's target line.

    equality: |u_H - u_P|; need: perpendicular distance to the balanced-needs
    ray; equity: investment-normalized ratio difference
    |u_H/I_H - u_P/I_P| / max(1/I_H, 1/I_P).  Zero exactly on the target line;
    lower is fairer.
    """
    problems = principle.validate()
    if problems:
        raise InvalidPrincipleError("; ".join(problems))
    if principle.kind == "equality":
        return abs(point.u_h - point.u_p)
    if principle.kind == "need":
        return distance_to_ray(point, balanced_needs_line(principle.needs))
    investments = principle.effective_investments()
    i_h, i_p = investments
    return abs(point.u_h / i_h - point.u_p / i_p) / max(1.0 / i_h, 1.0 / i_p)


def kalai_smorodinsky_point(points: Sequence[UtilityPoint]) -> UtilityPoint:
    """Frontier point nearest the origin->(max u_H, max u_P) ray.

    Provided as a comparison metric alongside the egalitarian point; it is not
    used by any fairness principle.
    """
    if not points:
        raise EmptyInputError("kalai_smorodinsky_point needs at least one point")
    max_h = max(p.u_h for p in points)
    max_p = max(p.u_p for p in points)
    if max_h <= 0 or max_p <= 0:
        ray = DIAGONAL
    else:
        ray = RayDescriptor.create((max_h, max_p), label="ks-ray")
    frontier = pareto_frontier(points)
    best = None
    best_key = None
    for pos, point in enumerate(frontier.points):
        key = (distance_to_ray(point, ray), _tiebreak(point, pos))
        if best_key is None or key < best_key:
            best, best_key = point, key
    return best


def nearest_member_distance(
    point: UtilityPoint, members: Iterable[UtilityPoint]
) -> float:
    """Distance from a point to the closest member of a point set."""
    best = math.inf
    for m in members:
        best = min(best, math.hypot(point.u_h - m.u_h, point.u_p - m.u_p))
    if best is math.inf:
        raise EmptyInputError("nearest_member_distance needs a nonempty member set")
    return best


# --- report assembly ---------------------------------------------------------


def point_to_json(point: UtilityPoint, bid_mapping=None) -> dict:
    data: dict = {"u_H": point.u_h, "u_P": point.u_p}
    data["bid"] = bid_mapping(point.bid) if (bid_mapping and point.bid) else None
    data["index"] = point.index
    return data


def build_report(
    points: Sequence[UtilityPoint],
    principle: FairnessPrinciple,
    resolution: int = DEFAULT_RESOLUTION,
    transformed: bool = False,
    transform_needs: NeedsProfile | None = None,
    bid_mapping=None,
) -> dict:
    """Full fairness-analytics report over a bid space.

    When `transformed` is set, every coordinate is first passed through the
    needs transform and the balanced-needs ray becomes the diagonal, so the
    need deviation is reported against the diagonal in the transformed frame.
    """
    if transformed and transform_needs is None:
        transform_needs = principle.needs
    if transformed and transform_needs is None:
        raise InvalidPrincipleError("transformed view requires a needs profile")
    view = (
        [needs_transform(p, transform_needs) for p in points] if transformed else list(points)
    )

    needs = principle.needs if principle.kind == "need" else None
    if needs is not None:
        lbn = DIAGONAL if transformed else balanced_needs_line(needs)
    else:
        lbn = DIAGONAL

    def deviation(p: UtilityPoint) -> float:
        if principle.kind == "need":
            return distance_to_ray(p, lbn)
        return fairness_deviation(p, principle)

    frontier = pareto_frontier(view)
    ep = egalitarian_point(frontier)
    leo = line_of_equal_opportunity(view, resolution)
    ks = kalai_smorodinsky_point(view)
    if needs is not None and not transformed:
        lbn_points = balanced_needs_bids(view, needs, resolution)
    else:
        # in the transformed frame (or without needs) the balanced set is the
        # near-diagonal set, which LEO already captures
        lbn_points = leo

    def pj(p: UtilityPoint) -> dict:
        return point_to_json(p, bid_mapping)

    return {
        "points": [pj(p) for p in view],
        "frontier": [pj(p) for p in frontier.points],
        "egalitarian_point": pj(ep),
        "leo": [pj(p) for p in leo],
        "lbn_direction": {"direction": list(lbn.direction), "label": lbn.label},
        "lbn_points": [pj(p) for p in lbn_points],
        "ks_point": pj(ks),
        "per_bid_deviations": [
            {**pj(p), "deviation": deviation(p)} for p in view
        ],
        "principle": principle_to_json(principle),
        "transformed_view": transformed,
        "resolution": resolution,
    }
