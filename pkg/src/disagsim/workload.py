"""Workload profiles: the statistical inputs driving instruction generation.

A profile is plain data: the instruction mix, the cache-hit cascade, the
remote fraction, the dependency model and the branch-mispredict rate.  The
on-disk form is a strict JSON document (unknown keys are errors, mix
probabilities must sum to 1) so experiment configs stay self-describing
and diff-able.  The bundled profiles are synthetic: they are shaped like a
profiled analytics workload but every number is a stand-in chosen so the
baseline calibrator can reach its target IPC, see docs/README.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from importlib import resources

from .config import ConfigError
from .microarch import KINDS

MIX_SUM_TOLERANCE = 1e-9

_PROFILE_FIELDS = {
    "name", "mix", "l1_hit", "l2_hit", "l3_hit", "remote_fraction",
    "dep_prob", "dep_window", "branch_miss_prob",
}


@dataclass(frozen=True)
class WorkloadProfile:
    name: str
    mix: dict
    l1_hit: float = 0.0
    l2_hit: float = 0.0
    l3_hit: float = 0.0
    remote_fraction: float = 0.0
    dep_prob: float = 0.0
    dep_window: int = 8
    branch_miss_prob: float = 0.0

    def __post_init__(self):
        for kind in self.mix:
            if kind not in KINDS:
                raise ConfigError(f"unknown instruction kind in mix: {kind!r}")
        for kind, p in self.mix.items():
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"mix[{kind}] out of [0, 1]: {p}")
        total = sum(self.mix.values())
        if abs(total - 1.0) > MIX_SUM_TOLERANCE:
            raise ConfigError(f"mix probabilities must sum to 1, got {total!r}")
        for fld in ("l1_hit", "l2_hit", "l3_hit", "remote_fraction",
                    "dep_prob", "branch_miss_prob"):
            v = getattr(self, fld)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{fld} out of [0, 1]: {v}")
        if self.dep_window < 1:
            raise ConfigError(f"dep_window must be >= 1, got {self.dep_window}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mix"] = {k: self.mix[k] for k in KINDS if k in self.mix}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def profile_from_dict(d: dict) -> WorkloadProfile:
    if not isinstance(d, dict):
        raise ConfigError("profile document must be a JSON object")
    unknown = set(d) - _PROFILE_FIELDS
    if unknown:
        raise ConfigError(f"unknown profile key: {sorted(unknown)[0]!r}")
    if "mix" not in d:
        raise ConfigError("profile is missing the required key 'mix'")
    d = dict(d)
    d.setdefault("name", "unnamed")
    return WorkloadProfile(**d)


def loads_profile(text: str) -> WorkloadProfile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"profile is not valid JSON: {exc}") from exc
    return profile_from_dict(doc)


def load_profile(path) -> WorkloadProfile:
    with open(path) as fh:
        return loads_profile(fh.read())


def save_profile(profile: WorkloadProfile, path) -> None:
    with open(path, "w") as fh:
        fh.write(profile.to_json())


def bundled_profile(name: str) -> WorkloadProfile:
    """Load a profile shipped with the package ('alu-only', 'fermin-like')."""
    fname = name.replace("-", "_") + ".json"
    ref = resources.files("disagsim") / "profiles" / fname
    if not ref.is_file():
        raise ConfigError(f"no bundled profile named {name!r}")
    return loads_profile(ref.read_text())


# -- baseline calibration ------------------------------------------------

class CalibrationError(ValueError):
    """Target IPC is outside what the dependency knob can reach."""

    def __init__(self, message: str, ipc_min: float | None = None,
                 ipc_max: float | None = None):
        super().__init__(message)
        self.ipc_min = ipc_min
        self.ipc_max = ipc_max


@dataclass(frozen=True)
class CalibrationResult:
    profile: WorkloadProfile
    achieved_ipc: float
    iterations: int
    converged: bool


CALIBRATION_SEEDS = (11, 12, 13, 14, 15)


def calibrate_baseline(profile: WorkloadProfile, platform, target_ipc: float,
                       tol: float = 0.045, max_iter: int = 30,
                       instructions: int = 80_000,
                       seeds: tuple = CALIBRATION_SEEDS) -> CalibrationResult:
    """Bisect ``dep_prob`` until the non-disaggregated IPC hits the target.

    The remote fraction is forced to zero for every calibration run, and
    each candidate is scored by its mean IPC over a fixed seed set to damp
    sampling noise.  Only ``dep_prob`` differs between the input and the
    returned profile.  More dependencies mean a slower pipeline, which is
    the monotonicity the bisection relies on; it is checked up front.
    """
    from .simulator import simulate  # deferred, simulator imports this module

    if not 0.0 < target_ipc <= platform.issue_width:
        raise CalibrationError(
            f"target IPC must be in (0, issue width {platform.issue_width}], got {target_ipc}")

    def mean_ipc(dep_prob: float) -> float:
        probe = replace(profile, dep_prob=dep_prob, remote_fraction=0.0)
        total = 0.0
        for seed in seeds:
            total += simulate(platform, probe, seed=seed,
                              max_instructions=instructions).ipc
        return total / len(seeds)

    def within(ipc: float) -> bool:
        return abs(ipc - target_ipc) / target_ipc <= tol

    start_ipc = mean_ipc(profile.dep_prob)
    if within(start_ipc):
        return CalibrationResult(profile, start_ipc, 0, True)

    ipc_max = mean_ipc(0.0)
    ipc_min = mean_ipc(1.0)
    if ipc_max < ipc_min * 0.99:
        raise CalibrationError(
            f"IPC is not non-increasing in dep_prob ({ipc_max:.4f} at 0 vs {ipc_min:.4f} at 1)")
    if target_ipc > ipc_max:
        if within(ipc_max):
            return CalibrationResult(replace(profile, dep_prob=0.0), ipc_max, 0, True)
        raise CalibrationError(
            f"target IPC {target_ipc} above reachable range [{ipc_min:.4f}, {ipc_max:.4f}]",
            ipc_min=ipc_min, ipc_max=ipc_max)
    if target_ipc < ipc_min:
        if within(ipc_min):
            return CalibrationResult(replace(profile, dep_prob=1.0), ipc_min, 0, True)
        raise CalibrationError(
            f"target IPC {target_ipc} below reachable range [{ipc_min:.4f}, {ipc_max:.4f}]",
            ipc_min=ipc_min, ipc_max=ipc_max)

    lo, hi = 0.0, 1.0  # IPC(lo) >= target >= IPC(hi)
    best_d, best_ipc = 0.0, ipc_max
    if abs(ipc_min - target_ipc) < abs(best_ipc - target_ipc):
        best_d, best_ipc = 1.0, ipc_min
    for iteration in range(1, max_iter + 1):
        mid = (lo + hi) / 2.0
        ipc = mean_ipc(mid)
        if abs(ipc - target_ipc) < abs(best_ipc - target_ipc):
            best_d, best_ipc = mid, ipc
        if within(ipc):
            return CalibrationResult(replace(profile, dep_prob=mid), ipc, iteration, True)
        if ipc > target_ipc:
            lo = mid
        else:
            hi = mid
    return CalibrationResult(replace(profile, dep_prob=best_d), best_ipc, max_iter, False)
