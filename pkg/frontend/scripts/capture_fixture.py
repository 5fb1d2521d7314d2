"""Regenerate tests/fixtures/w1_session.json from the real service.

Drives the scripted contestation session over the actual HTTP app up to the
point where the principle-mismatch proposals are pending, then captures the
full GET /sessions/{id} payload. Run from the frontend/ directory with the
backend installed:

    python scripts/capture_fixture.py
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from fairneg.analytics import FairnessPrinciple
from fairneg.domain import AdditiveUtilityProfile, Domain, Issue, NeedsProfile
from fairneg.protocol import SessionConfig, StrategySpec
from fairneg.runner import config_to_json
from fairneg.service import create_app


def main() -> None:
    domain = Domain.create(
        "w1",
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
        reservation_h=0.0,
        reservation_p=0.1,
        deadline_rounds=20,
        seed=7,
        active_principle=FairnessPrinciple.create(
            "need", needs=NeedsProfile.create([0.25, 0.75])
        ),
        strategy_h=StrategySpec(kind="human"),
        strategy_p=StrategySpec(
            kind="scripted",
            params={
                "bids": [
                    {"price": "high", "delivery": "fast"},
                    {"price": "high", "delivery": "fast"},
                ]
            },
        ),
    )

    client = TestClient(create_app(Path(tempfile.mkdtemp())))
    session_id = client.post("/sessions", json=config_to_json(config)).json()["id"]
    for _ in range(2):
        response = client.post(
            f"/sessions/{session_id}/actions",
            json={
                "party": "H",
                "action": {"kind": "offer", "bid": {"price": "high", "delivery": "slow"}},
            },
        )
        response.raise_for_status()
    state = client.get(f"/sessions/{session_id}").json()
    assert state["pending_proposals"], "expected a pending contestation"

    out = Path(__file__).parent.parent / "tests" / "fixtures" / "w1_session.json"
    out.write_text(json.dumps(state, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(state['pending_proposals'])} pending proposals)")


if __name__ == "__main__":
    main()
