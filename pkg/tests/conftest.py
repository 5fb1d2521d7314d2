from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairneg.analytics import FairnessPrinciple
from fairneg.domain import (
    AdditiveUtilityProfile,
    Domain,
    Issue,
    NeedsProfile,
)
from fairneg.protocol import SessionConfig, StrategySpec
from fairneg.reflection import BackgroundConfig


@pytest.fixture
def w1_domain() -> Domain:
    return Domain.create(
        "w1",
        [
            Issue.create("price", ["low", "mid", "high"]),
            Issue.create("delivery", ["slow", "fast"]),
        ],
    )


@pytest.fixture
def w1_profile_h(w1_domain) -> AdditiveUtilityProfile:
    return AdditiveUtilityProfile.create(
        w1_domain,
        [0.7, 0.3],
        [{"low": 1.0, "mid": 0.5, "high": 0.0}, {"slow": 0.0, "fast": 1.0}],
    )


@pytest.fixture
def w1_profile_p(w1_domain) -> AdditiveUtilityProfile:
    return AdditiveUtilityProfile.create(
        w1_domain,
        [0.6, 0.4],
        [{"low": 0.0, "mid": 0.5, "high": 1.0}, {"slow": 1.0, "fast": 0.0}],
    )


@pytest.fixture
def scenario_needs() -> NeedsProfile:
    # H is the less needy party; outcomes should favor P three to one
    return NeedsProfile.create([0.25, 0.75])


SIDE_JOB_PAYLOAD = {
    "issue": {"name": "sidejob", "values": ["none", "done"]},
    "deltas": {
        "H": {"weight": 0.5, "evaluations": {"none": 0.0, "done": 1.0}},
        "P": {"weight": 0.0, "evaluations": {"none": 0.0, "done": 1.0}},
    },
}


def scenario_config(w1_domain, w1_profile_h, w1_profile_p, needs) -> SessionConfig:
    """Scripted session: H keeps offering a bid that clearly favours P, the
    equality-minded P keeps countering, and the scripted human approves
    enlarging the domain with the side job once the mismatch is contested."""
    return SessionConfig(
        domain=w1_domain,
        profile_h=w1_profile_h,
        true_profile_p=w1_profile_p,
        reservation_h=0.0,
        reservation_p=0.1,
        deadline_rounds=20,
        seed=7,
        active_principle=FairnessPrinciple.create("need", needs=needs),
        strategy_h=StrategySpec(
            kind="scripted",
            params={
                "bids": [
                    {"price": "high", "delivery": "slow"},
                    {"price": "high", "delivery": "slow"},
                    {"price": "high", "delivery": "fast", "sidejob": "done"},
                ]
            },
        ),
        strategy_p=StrategySpec(
            kind="scripted",
            params={
                "bids": [
                    {"price": "high", "delivery": "fast"},
                    {"price": "high", "delivery": "fast"},
                ],
                "accept_bids": [
                    {"price": "high", "delivery": "fast", "sidejob": "done"}
                ],
            },
        ),
        background=BackgroundConfig(),
        decision_policy=[
            {
                "kind": "extend-domain",
                "decision": "approve",
                "rationale": "repair the negotiation by adding the side job",
                "payload": SIDE_JOB_PAYLOAD,
            },
            {"kind": "*", "decision": "reject", "rationale": "keep the current setup"},
        ],
    )


@pytest.fixture
def w1_scenario_config(w1_domain, w1_profile_h, w1_profile_p, scenario_needs):
    return scenario_config(w1_domain, w1_profile_h, w1_profile_p, scenario_needs)
