"""Durable campaign storage: one append-only JSONL file per campaign.

Every mutation is appended and fsynced before it is acknowledged; a full
state snapshot is interleaved every few events so recovery replays only a
short tail. Replay re-executes the logged operations, which are
deterministic, so the recovered state matches the lost one exactly.

A torn final line (a crash mid-write) is discarded on load: that mutation
was never acknowledged. Corruption anywhere earlier is refused loudly.
"""
from __future__ import annotations

import json
import os
import re
from pathlib import Path
from typing import Optional

from .campaign import (
    CampaignConfig,
    CampaignState,
    init_campaign,
    next_recommendation,
    submit_comparison,
    submit_result,
)
from .scoring import Measurement
from .space import DesignPoint

SNAPSHOT_EVERY = 10

_ID_PATTERN = re.compile(r"^[A-Za-z0-9_-]{1,64}$")


class StoreCorruptError(RuntimeError):
    """A campaign log contains an unreadable record before its final line."""


def _check_id(campaign_id: str) -> str:
    if not _ID_PATTERN.match(campaign_id):
        raise ValueError(f"invalid campaign id {campaign_id!r}")
    return campaign_id


def apply_event(state: Optional[CampaignState], event: dict) -> CampaignState:
    """Re-execute one logged mutation against the running state."""
    kind = event["kind"]
    if kind == "snapshot":
        return CampaignState.from_dict(event["state"])
    if kind == "init":
        config = CampaignConfig.from_dict(event["config"])
        seeds = [
            (DesignPoint(p), Measurement.from_dict(m)) for p, m in event["seeds"]
        ]
        return init_campaign(config, seeds)
    if state is None:
        raise StoreCorruptError(f"event {kind!r} precedes campaign initialization")
    if kind == "recommend":
        new_state, _ = next_recommendation(state)
        return new_state
    if kind == "result":
        return submit_result(
            state,
            DesignPoint(event["point"]),
            Measurement.from_dict(event["measurement"]),
            tuple(event["image_refs"]),
        )
    if kind == "comparison":
        return submit_comparison(state, int(event["prior"]), event["outcome"])
    raise StoreCorruptError(f"unknown event kind {kind!r}")


class CampaignStore:
    """Filesystem-backed event log keyed by campaign id."""

    def __init__(self, directory: str | os.PathLike):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._since_snapshot: dict[str, int] = {}

    def path(self, campaign_id: str) -> Path:
        return self.directory / f"{_check_id(campaign_id)}.jsonl"

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.directory.glob("*.jsonl"))

    def exists(self, campaign_id: str) -> bool:
        return self.path(campaign_id).exists()

    def _append_line(self, campaign_id: str, record: dict) -> None:
        line = json.dumps(record, separators=(",", ":")) + "\n"
        with open(self.path(campaign_id), "ab") as fh:
            fh.write(line.encode("utf-8"))
            fh.flush()
            os.fsync(fh.fileno())

    def append(self, campaign_id: str, event: dict, state: CampaignState) -> None:
        """Durably record one mutation, snapshotting periodically.

        `state` is the post-mutation state; it is written whenever the
        snapshot cadence comes due.
        """
        self._append_line(campaign_id, event)
        count = self._since_snapshot.get(campaign_id, 0) + 1
        if count >= SNAPSHOT_EVERY:
            self._append_line(campaign_id, {"kind": "snapshot", "state": state.to_dict()})
            count = 0
        self._since_snapshot[campaign_id] = count

    def load(self, campaign_id: str) -> CampaignState:
        """Rebuild state from the last snapshot plus the event tail."""
        path = self.path(campaign_id)
        raw = path.read_bytes()
        if not raw:
            raise StoreCorruptError(f"campaign log {path} is empty")
        lines = raw.split(b"\n")
        # a complete log ends with a newline, so the final split element is
        # empty; anything else is a torn, unacknowledged write to discard
        lines = lines[:-1]

        events: list[dict] = []
        for i, line in enumerate(lines):
            try:
                events.append(json.loads(line.decode("utf-8")))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                if i == len(lines) - 1:
                    # torn final write whose persisted prefix included the
                    # newline; the mutation was never acknowledged
                    break
                raise StoreCorruptError(f"{path} line {i + 1}: {exc}") from exc
        if not events:
            raise StoreCorruptError(f"campaign log {path} has no readable events")

        start = 0
        for i, event in enumerate(events):
            if event.get("kind") == "snapshot":
                start = i
        state: Optional[CampaignState] = None
        replayed = 0
        for event in events[start:]:
            try:
                state = apply_event(state, event)
            except StoreCorruptError:
                raise
            except Exception as exc:
                raise StoreCorruptError(f"{path}: replay failed: {exc}") from exc
            if event.get("kind") != "snapshot":
                replayed += 1
        if state is None:
            raise StoreCorruptError(f"campaign log {path} has no usable state")
        self._since_snapshot[campaign_id] = replayed if start > 0 else replayed % SNAPSHOT_EVERY
        return state
