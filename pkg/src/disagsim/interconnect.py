"""Remote-memory path: stage latencies, endpoint bandwidth, pipeline build.

A remote request leaves the compute brick (CB) through address translation,
the on-chip network and the physical-layer transceivers, crosses the
optical circuit switch to a memory brick (MB), is served by DDR4, and
returns the same way.  Stages that are traversed four times per request
(two on each brick) carry ``accesses_per_request = 4`` and ``side = Both``;
single-traversal stages name their brick.

Stage timings are latencies, not throughput limits, so every stage becomes
a one-server module with service time 1 and the rest of its (scaled,
cycle-converted) latency as post-service delay.  The only bandwidth-limited
resource is the endpoint pool: serialising one cache line over one
endpoint takes ``endpoint_service_cycles``, and the pool has one server per
endpoint.  Request and response directions get separate pools (full-duplex
ports).

Rounding rule, pinned for golden tests: nanoseconds convert to cycles with
round-half-up, applied per stage instance, never on the sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .queueing import QueueSpec

SIDES = ("CB", "MB", "Both")


@dataclass(frozen=True)
class RemoteStage:
    """One hardware stage on the remote-memory round trip."""

    name: str
    latency_ns: float
    accesses_per_request: int
    side: str

    def __post_init__(self):
        if self.latency_ns <= 0:
            raise ValueError(f"{self.name}: latency_ns must be > 0")
        if self.side not in SIDES:
            raise ValueError(f"{self.name}: side must be one of {SIDES}, got {self.side!r}")
        if self.side == "Both" and self.accesses_per_request != 4:
            raise ValueError(f"{self.name}: a Both-side stage is traversed 4 times per request")
        if self.side != "Both" and self.accesses_per_request != 1:
            raise ValueError(f"{self.name}: a single-side stage is traversed once per request")


# Measured latencies of the prototype remote-memory path.
DEFAULT_REMOTE_STAGES = (
    RemoteStage("fpga_addr_transl", 72.0, 1, "CB"),
    RemoteStage("ingress_egress", 6.25, 4, "Both"),
    RemoteStage("network_on_chip", 22.4, 4, "Both"),
    RemoteStage("pcs_pma", 251.0, 4, "Both"),
    RemoteStage("ddr4", 62.5, 1, "MB"),
)


@dataclass(frozen=True)
class InterconnectConfig:
    """Remote path composition plus the endpoint bandwidth model."""

    stages: tuple[RemoteStage, ...] = DEFAULT_REMOTE_STAGES
    num_endpoints: int = 1
    endpoint_gbps: float = 16.0
    cache_line_bytes: int = 64
    latency_scale: float = 1.0
    stage_queue_capacity: int = 4096
    endpoint_queue_capacity: int = 4096

    def __post_init__(self):
        if not self.stages:
            raise ValueError("interconnect needs at least one stage")
        if self.num_endpoints < 1:
            raise ValueError(f"num_endpoints must be >= 1, got {self.num_endpoints}")
        if self.endpoint_gbps <= 0:
            raise ValueError(f"endpoint_gbps must be > 0, got {self.endpoint_gbps}")
        if self.cache_line_bytes < 1:
            raise ValueError(f"cache_line_bytes must be >= 1, got {self.cache_line_bytes}")
        if self.latency_scale <= 0:
            raise ValueError(f"latency_scale must be > 0, got {self.latency_scale}")
        if self.stage_queue_capacity < 1 or self.endpoint_queue_capacity < 1:
            raise ValueError("queue capacities must be >= 1")


def ns_to_cycles(ns: float, clock_ghz: float) -> int:
    """Convert nanoseconds to whole cycles, round half up."""
    if ns <= 0 or clock_ghz <= 0:
        raise ValueError(f"need positive ns and clock, got {ns} ns at {clock_ghz} GHz")
    return math.floor(ns * clock_ghz + 0.5)


def remote_path_latency_ns(ic: InterconnectConfig) -> float:
    """Contention-free round-trip nanoseconds of one remote request."""
    return ic.latency_scale * sum(s.latency_ns * s.accesses_per_request for s in ic.stages)


def endpoint_service_cycles(ic: InterconnectConfig, clock_ghz: float) -> int:
    """Cycles to serialise one cache line over a single endpoint."""
    ns = ic.cache_line_bytes * 8 / ic.endpoint_gbps  # Gbps == bits per ns
    return ns_to_cycles(ns, clock_ghz)


def _stage_spec(name: str, stage: RemoteStage, ic: InterconnectConfig,
                clock_ghz: float) -> QueueSpec:
    cycles = ns_to_cycles(stage.latency_ns * ic.latency_scale, clock_ghz)
    if cycles < 1:
        cycles = 1  # a stage can never be cheaper than its one service cycle
    return QueueSpec(name=name, capacity=ic.stage_queue_capacity,
                     service_time=1, delay=cycles - 1, servers=1)


def build_remote_pipeline(ic: InterconnectConfig, clock_ghz: float) -> list[QueueSpec]:
    """Module chain a remote-memory token traverses, in traversal order.

    Both-side stages contribute one instance per brick per direction (four
    total); CB-only stages sit on the outbound leg, MB-only stages at the
    turnaround.  The endpoint pool appears once per direction.  The
    contention-free transit of the chain equals the per-stage converted
    sum of ``remote_path_latency_ns`` plus two endpoint service times.
    """
    cb_only = [s for s in ic.stages if s.side == "CB"]
    mb_only = [s for s in ic.stages if s.side == "MB"]
    shared = [s for s in ic.stages if s.side == "Both"]

    ep = endpoint_service_cycles(ic, clock_ghz)
    def endpoint_spec(direction: str) -> QueueSpec:
        return QueueSpec(name=f"remote.endpoint.{direction}",
                         capacity=ic.endpoint_queue_capacity,
                         service_time=ep, delay=0, servers=ic.num_endpoints)

    chain: list[QueueSpec] = []
    for s in cb_only:
        chain.append(_stage_spec(f"remote.cb.{s.name}", s, ic, clock_ghz))
    for s in shared:
        chain.append(_stage_spec(f"remote.cb.{s.name}.req", s, ic, clock_ghz))
    chain.append(endpoint_spec("req"))
    for s in reversed(shared):
        chain.append(_stage_spec(f"remote.mb.{s.name}.req", s, ic, clock_ghz))
    for s in mb_only:
        chain.append(_stage_spec(f"remote.mb.{s.name}", s, ic, clock_ghz))
    for s in shared:
        chain.append(_stage_spec(f"remote.mb.{s.name}.rsp", s, ic, clock_ghz))
    chain.append(endpoint_spec("rsp"))
    for s in reversed(shared):
        chain.append(_stage_spec(f"remote.cb.{s.name}.rsp", s, ic, clock_ghz))
    return chain
