"""Endpoint/latency sweep harness with deterministic grid ordering.

A sweep runs the disaggregated simulation over the cartesian grid
endpoints x latency scales x seeds (endpoints outermost, seeds innermost)
and, when ``baseline`` is set, one remote-free run per seed on the
unmodified platform.  Points may execute in a process pool; results are
merged in grid order, never completion order, so output files are byte
identical regardless of the job count.  Overhead is always computed
against the mean baseline IPC.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .metrics import overhead
from .simulator import baseline_profile, simulate

JOBS_ENV_VAR = "DISAGSIM_JOBS"

# baseline rows use endpoint count 0: the remote path is never exercised
BASELINE_ENDPOINTS = 0


@dataclass(frozen=True)
class SweepSpec:
    endpoints: tuple[int, ...]
    latency_scales: tuple[float, ...]
    seeds: tuple[int, ...]
    max_instructions: int = 1_000_000
    baseline: bool = True

    def __post_init__(self):
        if not self.endpoints or not self.latency_scales or not self.seeds:
            raise ValueError("endpoints, latency_scales and seeds must be non-empty")
        if any(e < 1 for e in self.endpoints):
            raise ValueError(f"endpoint counts must be >= 1, got {self.endpoints}")
        if any(s <= 0 for s in self.latency_scales):
            raise ValueError(f"latency scales must be > 0, got {self.latency_scales}")
        if self.max_instructions < 1:
            raise ValueError("max_instructions must be >= 1")


@dataclass(frozen=True)
class SweepPoint:
    endpoints: int
    latency_scale: float
    seed: int
    ipc: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    baselines: tuple[SweepPoint, ...]

    @property
    def baseline_mean_ipc(self) -> float | None:
        if not self.baselines:
            return None
        return sum(p.ipc for p in self.baselines) / len(self.baselines)

    def point_rows(self) -> list[tuple]:
        """(endpoints, latencyScale, ipc, overheadPct, seed) in grid order."""
        base = self.baseline_mean_ipc
        rows = []
        for p in self.baselines + self.points:
            oh = None if base is None else overhead(base, p.ipc)
            rows.append((p.endpoints, p.latency_scale, p.ipc, oh, p.seed))
        return rows

    def summary_rows(self) -> list[tuple]:
        """(endpoints, latencyScale, meanIpc, overheadPct), means over seeds."""
        base = self.baseline_mean_ipc
        groups: dict[tuple, list[float]] = {}
        for p in self.points:
            groups.setdefault((p.endpoints, p.latency_scale), []).append(p.ipc)
        rows = []
        if base is not None:
            rows.append((BASELINE_ENDPOINTS, self.baselines[0].latency_scale, base,
                         overhead(base, base)))
        for (e, s), ipcs in groups.items():
            mean = sum(ipcs) / len(ipcs)
            rows.append((e, s, mean, None if base is None else overhead(base, mean)))
        return rows

    def format_summary_table(self) -> str:
        lines = [f"{'endpoints':>9}  {'latencyScale':>12}  {'meanIpc':>10}  {'overheadPct':>11}"]
        for e, s, ipc, oh in self.summary_rows():
            label = "baseline" if e == BASELINE_ENDPOINTS else str(e)
            oh_s = "-" if oh is None else f"{oh:.2f}"
            lines.append(f"{label:>9}  {s:>12g}  {ipc:>10.6f}  {oh_s:>11}")
        return "\n".join(lines)


def _run_point(args):
    platform, profile, seed, max_instructions = args
    report = simulate(platform, profile, seed=seed, max_instructions=max_instructions)
    return report.ipc


def default_jobs() -> int:
    env = os.environ.get(JOBS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"{JOBS_ENV_VAR} must be an integer, got {env!r}")
    return 1


def run_sweep(platform, profile, spec: SweepSpec, jobs: int | None = None) -> SweepResult:
    """Run every grid point (and baselines) and collect IPCs in grid order."""
    if jobs is None:
        jobs = default_jobs()

    tasks = []
    if spec.baseline:
        base_prof = baseline_profile(profile)
        for seed in spec.seeds:
            tasks.append((platform, base_prof, seed, spec.max_instructions))
    for endpoints in spec.endpoints:
        for scale in spec.latency_scales:
            point_platform = platform.with_interconnect(
                num_endpoints=endpoints, latency_scale=scale)
            for seed in spec.seeds:
                tasks.append((point_platform, profile, seed, spec.max_instructions))

    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            ipcs = list(pool.map(_run_point, tasks))
    else:
        ipcs = [_run_point(t) for t in tasks]

    n_base = len(spec.seeds) if spec.baseline else 0
    baselines = tuple(
        SweepPoint(BASELINE_ENDPOINTS, platform.interconnect.latency_scale, seed, ipc)
        for seed, ipc in zip(spec.seeds, ipcs[:n_base]))
    points = []
    i = n_base
    for endpoints in spec.endpoints:
        for scale in spec.latency_scales:
            for seed in spec.seeds:
                points.append(SweepPoint(endpoints, scale, seed, ipcs[i]))
                i += 1
    return SweepResult(points=tuple(points), baselines=baselines)
