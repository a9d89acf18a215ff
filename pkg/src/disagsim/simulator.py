"""Wires a platform and a workload profile into a runnable engine."""

from __future__ import annotations

import hashlib
import json
from dataclasses import replace

from .config import PlatformConfig
from .engine import DEFAULT_DEADLOCK_WINDOW, Engine
from .interconnect import build_remote_pipeline
from .microarch import InstructionSource, IssueUnit
from .queueing import QueueModule, QueueSpec
from .workload import WorkloadProfile


def config_fingerprint(platform: PlatformConfig, profile: WorkloadProfile) -> str:
    """Content hash of the fully resolved configuration."""
    resolved = {"platform": platform.resolved_dict(), "profile": profile.to_dict()}
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def build_engine(platform: PlatformConfig, profile: WorkloadProfile, seed: int,
                 deadlock_window: int = DEFAULT_DEADLOCK_WINDOW,
                 audit_every: int = 256) -> Engine:
    """Construct the compute brick, the remote pipeline, and the frontend.

    Module graph: ALU pools, the cache levels and local memory each feed
    the sink directly (a token visits only the module that serves it); the
    remote pipeline is a chain ending at the sink.  Branches execute on the
    integer ALU pool.  Nops never enter a module.
    """
    p = platform
    modules = [
        QueueModule(QueueSpec("int_alu", p.int_alu.queue_capacity,
                              p.int_alu.service_time, 0, p.int_alu.count)),
        QueueModule(QueueSpec("fp_alu", p.fp_alu.queue_capacity,
                              p.fp_alu.service_time, 0, p.fp_alu.count)),
        QueueModule(QueueSpec("l1", p.l1.queue_capacity, p.l1.service_time, p.l1.delay)),
        QueueModule(QueueSpec("l2", p.l2.queue_capacity, p.l2.service_time, p.l2.delay)),
        QueueModule(QueueSpec("l3", p.l3.queue_capacity, p.l3.service_time, p.l3.delay)),
        QueueModule(QueueSpec("local_mem", p.local_memory.queue_capacity,
                              p.local_memory.service_time, p.local_memory.delay)),
    ]
    remote = [QueueModule(s) for s in build_remote_pipeline(p.interconnect, p.clock_ghz)]
    for a, b in zip(remote, remote[1:]):
        a.downstream = b
    modules.extend(remote)

    by_name = {m.spec.name: m for m in modules}
    entries = {
        "IntALU": by_name["int_alu"],
        "FPALU": by_name["fp_alu"],
        "Branch": by_name["int_alu"],
        "Nop": None,
        "L1": by_name["l1"],
        "L2": by_name["l2"],
        "L3": by_name["l3"],
        "LocalMem": by_name["local_mem"],
        "RemoteMem": remote[0],
    }

    engine = Engine(modules, frontend=None, seed=seed,
                    config_fingerprint=config_fingerprint(platform, profile),
                    deadlock_window=deadlock_window, audit_every=audit_every)
    source = InstructionSource(profile, engine.rng)
    engine.frontend = IssueUnit(source, entries, p.issue_width, p.branch_flush_penalty)
    return engine


def simulate(platform: PlatformConfig, profile: WorkloadProfile, seed: int,
             max_instructions: int | None = None, max_cycles: int | None = None,
             deadlock_window: int = DEFAULT_DEADLOCK_WINDOW):
    """One full run: build, simulate to the stop condition, drain, report."""
    engine = build_engine(platform, profile, seed, deadlock_window=deadlock_window)
    return engine.run(max_instructions=max_instructions, max_cycles=max_cycles)


def baseline_profile(profile: WorkloadProfile) -> WorkloadProfile:
    """The same workload with the remote path disabled."""
    return replace(profile, remote_fraction=0.0)
