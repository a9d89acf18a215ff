"""Run reports, the disaggregation-overhead metric, and table emission."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

POINTS_CSV_HEADER = "endpoints,latencyScale,ipc,overheadPct,seed"
SUMMARY_CSV_HEADER = "endpoints,latencyScale,meanIpc,overheadPct"


def overhead(ipc_baseline: float, ipc_disagg: float) -> float:
    """Throughput lost to disaggregation, in percent of the baseline."""
    if ipc_baseline <= 0:
        raise ValueError(f"baseline IPC must be positive, got {ipc_baseline}")
    if ipc_disagg < 0:
        raise ValueError(f"disaggregated IPC must be >= 0, got {ipc_disagg}")
    return (ipc_baseline - ipc_disagg) / ipc_baseline * 100.0


@dataclass(frozen=True)
class SimReport:
    """Outcome of one run: counters, IPC, per-module statistics.

    ``per_module`` maps module name to meanOccupancy / maxOccupancy /
    busyFraction / meanWait / accepted / rejected.  ``in_flight`` is zero
    after a drained run.  ``config_fingerprint`` hashes the fully resolved
    configuration so golden reports catch silent default drift.
    """

    cycles: int
    injected: int
    retired: int
    in_flight: int
    ipc: float
    per_module: dict = field(default_factory=dict)
    seed: int = 0
    config_fingerprint: str = ""

    def to_dict(self) -> dict:
        return {
            "cycles": self.cycles,
            "injected": self.injected,
            "retired": self.retired,
            "inFlight": self.in_flight,
            "ipc": self.ipc,
            "perModule": self.per_module,
            "seed": self.seed,
            "configFingerprint": self.config_fingerprint,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "SimReport":
        return cls(cycles=d["cycles"], injected=d["injected"], retired=d["retired"],
                   in_flight=d["inFlight"], ipc=d["ipc"], per_module=d["perModule"],
                   seed=d["seed"], config_fingerprint=d["configFingerprint"])

    @classmethod
    def from_json(cls, text: str) -> "SimReport":
        return cls.from_dict(json.loads(text))


def build_report(engine) -> SimReport:
    """Assemble the report for a finished engine."""
    cycles = engine.clock
    return SimReport(
        cycles=cycles,
        injected=engine.injected,
        retired=engine.retired,
        in_flight=engine.in_flight,
        ipc=engine.retired / cycles if cycles else 0.0,
        per_module=module_stats(engine),
        seed=engine.seed,
        config_fingerprint=engine.config_fingerprint,
    )


def module_stats(engine) -> dict:
    """Per-module statistics map, in module construction order."""
    return {m.spec.name: m.stats(engine.clock) for m in engine.modules}


# -- tabular emission ---------------------------------------------------
#
# Formatting is pinned so identical inputs produce byte-identical files:
# IPC with 6 decimals, percentages with 2 (matching the published tables),
# rows in grid order.  ``overhead_pct`` may be None when no baseline ran.

def format_point_row(endpoints: int, latency_scale: float, ipc: float,
                     overhead_pct: float | None, seed: int) -> str:
    oh = "" if overhead_pct is None else f"{overhead_pct:.2f}"
    return f"{endpoints},{latency_scale:g},{ipc:.6f},{oh},{seed}"

def format_summary_row(endpoints: int, latency_scale: float, mean_ipc: float,
                       overhead_pct: float | None) -> str:
    oh = "" if overhead_pct is None else f"{overhead_pct:.2f}"
    return f"{endpoints},{latency_scale:g},{mean_ipc:.6f},{oh}"


def write_points_csv(path, rows) -> None:
    """rows: iterable of (endpoints, latency_scale, ipc, overhead_pct, seed)."""
    lines = [POINTS_CSV_HEADER]
    lines.extend(format_point_row(*row) for row in rows)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_summary_csv(path, rows) -> None:
    """rows: iterable of (endpoints, latency_scale, mean_ipc, overhead_pct)."""
    lines = [SUMMARY_CSV_HEADER]
    lines.extend(format_summary_row(*row) for row in rows)
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
