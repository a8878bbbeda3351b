"""Shared test setup: every trace produced anywhere in the suite is audited
for a non-increasing BFV column at the moment it is created."""
from __future__ import annotations

import expopt.bench
import expopt.campaign
import expopt.cli
import expopt.server
import expopt.simulator
from expopt.trace import TraceTable

AUDITED_TRACES: list[tuple[str, tuple[float, ...]]] = []


def _audit(table: TraceTable, origin: str) -> TraceTable:
    if "BFV" in table.columns:
        bfv = tuple(float(v) for v in table.column("BFV"))
        AUDITED_TRACES.append((origin, bfv))
        for earlier, later in zip(bfv, bfv[1:]):
            assert later <= earlier, f"BFV increased in a {origin} trace: {bfv}"
    return table


_export_trace = expopt.campaign.export_trace
_random_baseline = expopt.simulator.random_baseline_campaign


def _audited_export(state):
    return _audit(_export_trace(state), "campaign")


def _audited_baseline(*args, **kwargs):
    return _audit(_random_baseline(*args, **kwargs), "baseline")


# trace producers were imported by name into these modules, so patch each
expopt.campaign.export_trace = _audited_export
expopt.bench.export_trace = _audited_export
expopt.cli.export_trace = _audited_export
expopt.server.export_trace = _audited_export
expopt.simulator.random_baseline_campaign = _audited_baseline
expopt.bench.random_baseline_campaign = _audited_baseline


def pytest_terminal_summary(terminalreporter):
    terminalreporter.write_line(
        f"trace auditor: {len(AUDITED_TRACES)} traces checked, "
        "BFV non-increasing in every one"
    )
