"""HTTP API: campaign lifecycle, conflict detection, traces, images, recovery."""
from __future__ import annotations

import hashlib

import pytest
from fastapi.testclient import TestClient

from expopt.campaign import export_trace, init_campaign
from expopt.server import create_app

from util import answer_comparisons, seeds_for, small_config

OFF_TARGET_BODY = {"median_length": 120.0, "median_diameter": 2.4}


def _client(tmp_path) -> TestClient:
    return TestClient(create_app(state_dir=tmp_path / "state"))


def _create_payload(campaign_id: str = "camp1", seed_count: int = 3, budget: int = 5) -> dict:
    config = small_config(seed_count=seed_count, budget=budget)
    return {
        "id": campaign_id,
        "config": config.to_dict(),
        "seed_observations": [
            {"point": list(p.coords), "measurement": m.to_dict()}
            for p, m in seeds_for(config)
        ],
    }


def _resolve_pending(client: TestClient, campaign_id: str) -> dict:
    summary = client.get(f"/campaigns/{campaign_id}").json()
    while summary["status"] == "awaiting_comparisons":
        pair = summary["pending_comparisons"][0]
        current, prior = pair["current_index"], pair["prior_index"]
        outcome = "current_better" if (current + prior) % 2 == 0 else "prior_better"
        response = client.post(
            f"/campaigns/{campaign_id}/comparisons",
            json={"prior_index": prior, "outcome": outcome},
        )
        assert response.status_code == 200
        summary = response.json()
    return summary


def _one_iteration(client: TestClient, campaign_id: str, body: dict = OFF_TARGET_BODY) -> dict:
    rec = client.post(f"/campaigns/{campaign_id}/recommendation").json()["recommendation"]
    result = client.post(
        f"/campaigns/{campaign_id}/results",
        json={"point": rec["point"], **body, "image_refs": []},
    )
    assert result.status_code == 200
    return _resolve_pending(client, campaign_id)


# lifecycle


def test_create_campaign_summary_shape(tmp_path) -> None:
    client = _client(tmp_path)
    response = client.post("/campaigns", json=_create_payload())
    assert response.status_code == 201
    summary = response.json()
    assert summary["id"] == "camp1"
    assert summary["status"] == "awaiting_comparisons"
    assert summary["iteration"] == 3
    assert summary["iterations_done"] == 0
    assert summary["seed_count"] == 3
    assert summary["best_found"] is not None
    pair = summary["pending_comparisons"][0]
    assert pair["current"]["batch"] == "seed"
    assert set(pair["prior"]["point_named"]) == {"a", "b", "c"}
    assert summary["links"]["trace"] == "/campaigns/camp1/trace"


def test_create_generates_id_when_missing(tmp_path) -> None:
    client = _client(tmp_path)
    payload = _create_payload()
    del payload["id"]
    summary = client.post("/campaigns", json=payload).json()
    assert len(summary["id"]) == 12


def test_duplicate_id_conflicts(tmp_path) -> None:
    client = _client(tmp_path)
    assert client.post("/campaigns", json=_create_payload()).status_code == 201
    assert client.post("/campaigns", json=_create_payload()).status_code == 409


def test_listing_and_missing_campaign(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("one"))
    client.post("/campaigns", json=_create_payload("two"))
    listed = client.get("/campaigns").json()["campaigns"]
    assert [c["id"] for c in listed] == ["one", "two"]
    assert all("status" in c and "best_found" in c for c in listed)
    assert client.get("/campaigns/nowhere").status_code == 404


# the loop over HTTP


def test_http_loop_matches_in_process_campaign(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("twin", budget=3))
    _resolve_pending(client, "twin")
    summary = _one_iteration(client, "twin")
    while summary["status"] == "ready":
        summary = _one_iteration(client, "twin")

    config = small_config(seed_count=3, budget=3)
    state = answer_comparisons(init_campaign(config, seeds_for(config)))
    from expopt.campaign import next_recommendation, submit_result
    from expopt.scoring import Measurement

    while state.status == "ready":
        state, rec = next_recommendation(state)
        state = submit_result(state, rec.point, Measurement(**OFF_TARGET_BODY))
        state = answer_comparisons(state)

    table = export_trace(state)
    via_http = client.get("/campaigns/twin/trace").json()
    assert via_http["columns"] == list(table.columns)
    assert via_http["rows"] == [list(r) for r in table.rows]
    assert summary["status"] == state.status


def test_recommendation_repeat_is_flagged_and_not_logged(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("rep"))
    _resolve_pending(client, "rep")
    first = client.post("/campaigns/rep/recommendation").json()
    assert first["recommendation_repeated"] is False

    log = tmp_path / "state" / "rep.jsonl"
    lines_before = log.read_text().count("\n")
    second = client.post("/campaigns/rep/recommendation").json()
    assert second["recommendation_repeated"] is True
    assert second["recommendation"] == first["recommendation"]
    assert log.read_text().count("\n") == lines_before


def test_stale_expected_iteration_conflicts(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("stale"))
    _resolve_pending(client, "stale")
    rec = client.post("/campaigns/stale/recommendation").json()["recommendation"]

    response = client.post(
        "/campaigns/stale/results",
        json={"point": rec["point"], **OFF_TARGET_BODY, "expected_iteration": 2},
    )
    assert response.status_code == 409
    # the campaign still accepts the correctly tagged submission
    ok = client.post(
        "/campaigns/stale/results",
        json={"point": rec["point"], **OFF_TARGET_BODY, "expected_iteration": 3},
    )
    assert ok.status_code == 200


def test_protocol_violations_conflict(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("proto"))
    # comparisons still pending
    assert client.post("/campaigns/proto/recommendation").status_code == 409
    # no recommendation outstanding
    _resolve_pending(client, "proto")
    response = client.post(
        "/campaigns/proto/results", json={"point": [0.0, 10.0, 5.0], **OFF_TARGET_BODY}
    )
    assert response.status_code == 409


def test_bad_values_are_rejected(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("vals"))
    pair = client.get("/campaigns/vals").json()["pending_comparisons"][0]
    bad_outcome = client.post(
        "/campaigns/vals/comparisons",
        json={"prior_index": pair["prior_index"], "outcome": "way_better"},
    )
    assert bad_outcome.status_code == 400

    _resolve_pending(client, "vals")
    rec = client.post("/campaigns/vals/recommendation").json()["recommendation"]
    negative = client.post(
        "/campaigns/vals/results",
        json={"point": rec["point"], "median_length": -5.0, "median_diameter": 1.0},
    )
    assert negative.status_code == 400


def test_comparison_against_unscheduled_prior_conflicts(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("pri"))
    response = client.post(
        "/campaigns/pri/comparisons", json={"prior_index": 99, "outcome": "current_better"}
    )
    assert response.status_code == 409


# trace rendering


def test_trace_csv_negotiation(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("csv"))
    _resolve_pending(client, "csv")
    _one_iteration(client, "csv")

    as_json = client.get("/campaigns/csv/trace").json()
    as_csv = client.get("/campaigns/csv/trace", headers={"accept": "text/csv"})
    assert as_csv.headers["content-type"].startswith("text/csv")
    lines = as_csv.text.splitlines()
    assert lines[0].split(",") == as_json["columns"]
    assert len(lines) == 1 + len(as_json["rows"])


# images


def test_image_upload_round_trip(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("img"))
    blob = b"\x89PNG synthetic bytes"
    created = client.post("/campaigns/img/images", content=blob)
    assert created.status_code == 201
    ref = created.json()["ref"]
    assert ref == hashlib.sha256(blob).hexdigest()[:16]

    again = client.post("/campaigns/img/images", content=blob)
    assert again.json()["ref"] == ref  # content addressed

    fetched = client.get(f"/campaigns/img/images/{ref}")
    assert fetched.status_code == 200
    assert fetched.content == blob

    assert client.post("/campaigns/img/images", content=b"").status_code == 400
    assert client.get("/campaigns/img/images/" + "z" * 200).status_code == 400
    assert client.get("/campaigns/img/images/0123456789abcdef").status_code == 404


def test_result_can_carry_image_refs(tmp_path) -> None:
    client = _client(tmp_path)
    client.post("/campaigns", json=_create_payload("withimg"))
    _resolve_pending(client, "withimg")
    ref = client.post("/campaigns/withimg/images", content=b"micrograph").json()["ref"]
    rec = client.post("/campaigns/withimg/recommendation").json()["recommendation"]
    summary = client.post(
        "/campaigns/withimg/results",
        json={"point": rec["point"], **OFF_TARGET_BODY, "image_refs": [ref]},
    ).json()
    pair = summary["pending_comparisons"][0]
    assert pair["current"]["image_refs"] == [ref]


# durability


def test_restart_recovers_state(tmp_path) -> None:
    state_dir = tmp_path / "state"
    first = TestClient(create_app(state_dir=state_dir))
    first.post("/campaigns", json=_create_payload("durable", budget=4))
    _resolve_pending(first, "durable")
    _one_iteration(first, "durable")
    before_summary = first.get("/campaigns/durable").json()
    before_trace = first.get("/campaigns/durable/trace", headers={"accept": "text/csv"}).text

    second = TestClient(create_app(state_dir=state_dir))
    assert second.get("/campaigns/durable").json() == before_summary
    after_trace = second.get("/campaigns/durable/trace", headers={"accept": "text/csv"}).text
    assert after_trace == before_trace

    # and the recovered campaign keeps evolving the same way
    _one_iteration(second, "durable")


def test_corrupt_log_reported_not_fatal(tmp_path) -> None:
    state_dir = tmp_path / "state"
    client = TestClient(create_app(state_dir=state_dir))
    client.post("/campaigns", json=_create_payload("good"))
    (state_dir / "mangled.jsonl").write_text("not json at all\n{\n")

    listed = client.get("/campaigns").json()["campaigns"]
    by_id = {c["id"]: c for c in listed}
    assert "error" in by_id["mangled"]
    assert by_id["good"]["status"] == "awaiting_comparisons"
    assert client.get("/campaigns/mangled").status_code == 500
