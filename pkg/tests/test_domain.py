from __future__ import annotations

import random

import pytest

from fairneg.domain import (
    AdditiveUtilityProfile,
    Bid,
    Domain,
    Issue,
    NeedsProfile,
    ProfileDelta,
    domain_from_json,
    domain_to_json,
    embed_bid,
    enumerate_bids,
    extend_domain,
    profile_from_json,
    profile_to_json,
    utility,
    utility_point,
    validate_profile,
)
from fairneg.errors import (
    DomainMismatchError,
    InvalidBidError,
    InvalidDomainError,
    InvalidNeedsError,
    InvalidProfileError,
)

from oracles import random_domain, random_profile


class TestEnumerateBids:
    def test_w1_enumeration(self, w1_domain):
        bids = enumerate_bids(w1_domain)
        assert len(bids) == 6
        assert bids[0].values == ("low", "slow")
        assert bids[-1].values == ("high", "fast")

    def test_singleton(self):
        dom = Domain.create("one", [Issue.create("x", ["a"])])
        assert enumerate_bids(dom) == [Bid(values=("a",))]

    def test_product_of_cardinalities(self):
        dom = Domain.create(
            "abc",
            [
                Issue.create("a", ["1", "2"]),
                Issue.create("b", ["1", "2", "3"]),
                Issue.create("c", ["1", "2"]),
            ],
        )
        assert len(enumerate_bids(dom)) == 12

    def test_zero_issue_domain_rejected(self):
        bare = Domain(name="empty", issues=())
        with pytest.raises(InvalidDomainError):
            enumerate_bids(bare)

    def test_cardinality_matches_product_on_random_domains(self):
        rng = random.Random(1234)
        for _ in range(50):
            dom = random_domain(rng)
            expected = 1
            for issue in dom.issues:
                expected *= len(issue.values)
            assert len(enumerate_bids(dom)) == expected

    def test_ordering_is_stable(self):
        rng = random.Random(99)
        dom = random_domain(rng)
        assert enumerate_bids(dom) == enumerate_bids(dom)

    def test_bid_index_matches_enumeration(self):
        rng = random.Random(5)
        dom = random_domain(rng)
        for i, bid in enumerate(enumerate_bids(dom)):
            assert dom.bid_index(bid) == i


class TestUtility:
    def test_w1_h_low_slow(self, w1_profile_h, w1_domain):
        assert utility(w1_profile_h, w1_domain.bid_from_mapping(
            {"price": "low", "delivery": "slow"}
        )) == pytest.approx(0.7)

    def test_w1_p_high_slow(self, w1_profile_p, w1_domain):
        assert utility(w1_profile_p, w1_domain.bid_from_mapping(
            {"price": "high", "delivery": "slow"}
        )) == pytest.approx(1.0)

    def test_all_zero_evaluations(self):
        dom = Domain.create("z", [Issue.create("x", ["a", "b"])])
        profile = AdditiveUtilityProfile.create(dom, [1.0], [{"a": 0.0, "b": 1.0}])
        assert utility(profile, Bid(values=("a",))) == 0.0

    def test_domain_mismatch(self, w1_profile_h):
        other = Domain.create("other", [Issue.create("q", ["x"])])
        with pytest.raises(InvalidBidError):
            utility(w1_profile_h, Bid(values=("x",)))
        with pytest.raises(DomainMismatchError):
            utility_point(
                Bid(values=("x",)),
                w1_profile_h,
                AdditiveUtilityProfile.create(other, [1.0], [{"x": 1.0}]),
            )

    def test_bounds_on_random_profiles(self):
        rng = random.Random(31)
        for _ in range(30):
            dom = random_domain(rng, max_issues=4, max_values=4)
            profile = random_profile(rng, dom)
            for bid in enumerate_bids(dom):
                u = utility(profile, bid)
                assert 0.0 <= u <= 1.0

    def test_monotone_in_single_evaluation(self):
        rng = random.Random(77)
        for _ in range(20):
            dom = random_domain(rng, max_issues=3, max_values=3)
            profile = random_profile(rng, dom)
            bids = enumerate_bids(dom)
            bid = bids[rng.randrange(len(bids))]
            issue_pos = rng.randrange(len(dom.issues))
            value = bid.values[issue_pos]
            evals = [dict(e) for e in profile.evaluations]
            before = utility(profile, bid)
            evals[issue_pos][value] = min(1.0, evals[issue_pos][value] + 0.3)
            # keep normalization by construction: raising never breaks max=1
            raised = AdditiveUtilityProfile(
                domain=dom, weights=profile.weights, evaluations=tuple(evals)
            )
            assert utility(raised, bid) >= before - 1e-12

    def test_max_utility_requires_top_value_everywhere(self):
        rng = random.Random(13)
        for _ in range(20):
            dom = random_domain(rng, max_issues=3, max_values=3)
            profile = random_profile(rng, dom)
            best = max(utility(profile, b) for b in enumerate_bids(dom))
            tops = all(
                any(abs(e - 1.0) < 1e-12 for e in evals.values())
                for evals in profile.evaluations
            )
            assert tops  # construction guarantees a 1.0 per issue
            # the max equals 1 iff some bid hits the 1.0 value on every issue
            hits_everywhere = any(
                all(
                    abs(profile.evaluations[i][v] - 1.0) < 1e-12
                    for i, v in enumerate(bid.values)
                )
                for bid in enumerate_bids(dom)
            )
            assert (abs(best - 1.0) < 1e-9) == hits_everywhere


class TestValidateProfile:
    def test_w1_profile_is_clean(self, w1_profile_h):
        assert validate_profile(w1_profile_h) == []

    def test_weight_sum_violation(self, w1_domain):
        bad = AdditiveUtilityProfile(
            domain=w1_domain,
            weights=(0.5, 0.6),
            evaluations=(
                {"low": 1.0, "mid": 0.5, "high": 0.0},
                {"slow": 0.0, "fast": 1.0},
            ),
        )
        violations = validate_profile(bad)
        assert any("sum" in v and "1.1" in v for v in violations)

    def test_evaluation_out_of_range(self, w1_domain):
        bad = AdditiveUtilityProfile(
            domain=w1_domain,
            weights=(0.7, 0.3),
            evaluations=(
                {"low": 1.2, "mid": 0.5, "high": 0.0},
                {"slow": 0.0, "fast": 1.0},
            ),
        )
        violations = validate_profile(bad)
        assert any("out of [0,1]" in v for v in violations)

    def test_missing_normalization(self, w1_domain):
        bad = AdditiveUtilityProfile(
            domain=w1_domain,
            weights=(0.7, 0.3),
            evaluations=(
                {"low": 0.9, "mid": 0.5, "high": 0.0},
                {"slow": 0.0, "fast": 1.0},
            ),
        )
        assert any("not normalized" in v for v in validate_profile(bad))

    def test_create_rejects_invalid(self, w1_domain):
        with pytest.raises(InvalidProfileError):
            AdditiveUtilityProfile.create(
                w1_domain,
                [0.5, 0.6],
                [{"low": 1.0, "mid": 0.5, "high": 0.0}, {"slow": 0.0, "fast": 1.0}],
            )


class TestUtilityPoint:
    def test_w1_mid_slow(self, w1_domain, w1_profile_h, w1_profile_p):
        point = utility_point(
            w1_domain.bid_from_mapping({"price": "mid", "delivery": "slow"}),
            w1_profile_h,
            w1_profile_p,
        )
        assert point.coords() == pytest.approx((0.35, 0.70))
        assert point.index == 2

    def test_w1_low_fast(self, w1_domain, w1_profile_h, w1_profile_p):
        point = utility_point(
            w1_domain.bid_from_mapping({"price": "low", "delivery": "fast"}),
            w1_profile_h,
            w1_profile_p,
        )
        assert point.coords() == (1.0, 0.0)

    def test_identical_profiles_sit_on_diagonal(self, w1_domain, w1_profile_h):
        for bid in enumerate_bids(w1_domain):
            point = utility_point(bid, w1_profile_h, w1_profile_h)
            assert point.u_h == point.u_p


class TestNeedsProfile:
    def test_valid(self):
        needs = NeedsProfile.create([0.25, 0.75], investments=[2.0, 1.0])
        assert needs.needs == (0.25, 0.75)

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidNeedsError):
            NeedsProfile.create([0.0, 1.0])

    def test_rejects_bad_sum(self):
        with pytest.raises(InvalidNeedsError):
            NeedsProfile.create([0.3, 0.75])


class TestExtendDomain:
    def test_side_job_doubles_space(self, w1_domain, w1_profile_h, w1_profile_p):
        new_domain, updated = extend_domain(
            w1_domain,
            Issue.create("sidejob", ["none", "done"]),
            {"H": w1_profile_h, "P": w1_profile_p},
            {
                "H": ProfileDelta(weight=0.5, evaluations={"none": 0.0, "done": 1.0}),
                "P": ProfileDelta(weight=0.0, evaluations={"none": 0.0, "done": 1.0}),
            },
        )
        assert len(enumerate_bids(new_domain)) == 12
        assert validate_profile(updated["H"]) == []
        assert validate_profile(updated["P"]) == []

    def test_old_bids_embed(self, w1_domain, w1_profile_h, w1_profile_p):
        new_domain, _ = extend_domain(
            w1_domain,
            Issue.create("sidejob", ["none", "done"]),
            {"H": w1_profile_h},
            {"H": ProfileDelta(weight=0.5, evaluations={"none": 0.0, "done": 1.0})},
        )
        new_bids = set(enumerate_bids(new_domain))
        for bid in enumerate_bids(w1_domain):
            for value in ("none", "done"):
                assert embed_bid(bid, value) in new_bids

    def test_delta_out_of_range_rejected(self, w1_domain, w1_profile_h):
        with pytest.raises(InvalidProfileError):
            extend_domain(
                w1_domain,
                Issue.create("sidejob", ["none", "done"]),
                {"H": w1_profile_h},
                {"H": ProfileDelta(weight=0.5, evaluations={"none": 0.0, "done": 1.2})},
            )

    def test_name_collision_rejected(self, w1_domain, w1_profile_h):
        with pytest.raises(InvalidDomainError):
            extend_domain(
                w1_domain,
                Issue.create("price", ["none"]),
                {"H": w1_profile_h},
                {"H": ProfileDelta(weight=0.1, evaluations={"none": 1.0})},
            )


class TestJsonRoundTrip:
    def test_domain(self, w1_domain):
        assert domain_from_json(domain_to_json(w1_domain)) == w1_domain

    def test_profile(self, w1_domain, w1_profile_h):
        data = profile_to_json(w1_profile_h)
        assert data["domain"] == "w1"
        assert data["weights"]["price"] == 0.7
        assert profile_from_json(data, w1_domain) == w1_profile_h
