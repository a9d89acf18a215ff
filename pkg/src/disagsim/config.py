"""Platform configuration: clock, issue resources, memory hierarchy, fabric.

Platforms load from strict JSON documents.  Unknown keys are rejected so a
config never silently carries a typo; missing keys fall back to the
defaults below, which describe the simulated Xeon-class compute brick.
``resolved_dict`` expands every default, and that expanded form is what
gets fingerprinted into reports.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from importlib import resources

from .interconnect import DEFAULT_REMOTE_STAGES, InterconnectConfig, RemoteStage


class ConfigError(ValueError):
    """A configuration document failed schema validation."""


@dataclass(frozen=True)
class AluPool:
    count: int
    service_time: int
    queue_capacity: int = 32

    def __post_init__(self):
        if self.count < 1 or self.service_time < 1 or self.queue_capacity < 1:
            raise ConfigError(f"ALU pool fields must be >= 1, got {self}")


@dataclass(frozen=True)
class MemoryStage:
    service_time: int
    delay: int
    queue_capacity: int = 32

    def __post_init__(self):
        if self.service_time < 1:
            raise ConfigError(f"memory stage service_time must be >= 1, got {self.service_time}")
        if self.delay < 0 or self.queue_capacity < 1:
            raise ConfigError(f"bad memory stage fields: {self}")

    @property
    def transit_time(self) -> int:
        return self.service_time + self.delay


@dataclass(frozen=True)
class PlatformConfig:
    """A compute brick plus its remote-memory interconnect.

    Cache and local-memory timings default to values representative of the
    simulated processor generation; none of the published-table arithmetic
    depends on them and all are overridable.
    """

    name: str = "xeon-e5-2630-2.3ghz"
    clock_ghz: float = 2.3
    issue_width: int = 4
    int_alu: AluPool = AluPool(count=3, service_time=1)
    fp_alu: AluPool = AluPool(count=2, service_time=2)
    branch_flush_penalty: int = 15
    l1: MemoryStage = MemoryStage(service_time=1, delay=3)
    l2: MemoryStage = MemoryStage(service_time=2, delay=10)
    l3: MemoryStage = MemoryStage(service_time=4, delay=26)
    local_memory: MemoryStage = MemoryStage(service_time=8, delay=130)
    interconnect: InterconnectConfig = field(default_factory=InterconnectConfig)

    def __post_init__(self):
        if self.clock_ghz <= 0:
            raise ConfigError(f"clock_ghz must be > 0, got {self.clock_ghz}")
        if self.issue_width < 1:
            raise ConfigError(f"issue_width must be >= 1, got {self.issue_width}")
        if self.branch_flush_penalty < 0:
            raise ConfigError(f"branch_flush_penalty must be >= 0, got {self.branch_flush_penalty}")
        lvls = [self.l1.transit_time, self.l2.transit_time, self.l3.transit_time]
        if not (lvls[0] < lvls[1] < lvls[2]):
            raise ConfigError(f"cache levels must have strictly increasing transit times, got {lvls}")

    def with_interconnect(self, **changes) -> "PlatformConfig":
        return replace(self, interconnect=replace(self.interconnect, **changes))

    def resolved_dict(self) -> dict:
        d = asdict(self)
        d["interconnect"]["stages"] = [asdict(s) for s in self.interconnect.stages]
        return d


_TOP_KEYS = {"name", "clock_ghz", "issue_width", "int_alu", "fp_alu",
             "branch_flush_penalty", "l1", "l2", "l3", "local_memory",
             "interconnect"}
_IC_KEYS = {"stages", "num_endpoints", "endpoint_gbps", "cache_line_bytes",
            "latency_scale", "stage_queue_capacity", "endpoint_queue_capacity"}
_STAGE_KEYS = {"name", "latency_ns", "accesses_per_request", "side"}


def _check_keys(d: dict, allowed: set, where: str) -> None:
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be a JSON object")
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"unknown key in {where}: {sorted(unknown)[0]!r}")


def platform_from_dict(doc: dict) -> PlatformConfig:
    _check_keys(doc, _TOP_KEYS, "platform")
    kwargs = {}
    for key in ("name", "clock_ghz", "issue_width", "branch_flush_penalty"):
        if key in doc:
            kwargs[key] = doc[key]
    for key in ("int_alu", "fp_alu"):
        if key in doc:
            _check_keys(doc[key], {"count", "service_time", "queue_capacity"}, key)
            kwargs[key] = AluPool(**doc[key])
    for key in ("l1", "l2", "l3", "local_memory"):
        if key in doc:
            _check_keys(doc[key], {"service_time", "delay", "queue_capacity"}, key)
            kwargs[key] = MemoryStage(**doc[key])
    if "interconnect" in doc:
        ic = dict(doc["interconnect"])
        _check_keys(ic, _IC_KEYS, "interconnect")
        if "stages" in ic:
            stages = []
            for s in ic["stages"]:
                _check_keys(s, _STAGE_KEYS, "interconnect stage")
                stages.append(RemoteStage(**s))
            ic["stages"] = tuple(stages)
        try:
            kwargs["interconnect"] = InterconnectConfig(**ic)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    try:
        return PlatformConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def loads_platform(text: str) -> PlatformConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"platform is not valid JSON: {exc}") from exc
    return platform_from_dict(doc)


def load_platform(path) -> PlatformConfig:
    with open(path) as fh:
        return loads_platform(fh.read())


def bundled_platform(name: str = "xeon-e5-2630") -> PlatformConfig:
    fname = name.replace("-", "_") + ".json"
    ref = resources.files("disagsim") / "platforms" / fname
    if not ref.is_file():
        raise ConfigError(f"no bundled platform named {name!r}")
    return loads_platform(ref.read_text())
