"""Cycle-driven queue-model simulator for disaggregated-memory platforms.

Profile-driven instruction streams flow through queue/server/delay modules
representing a compute brick, an optical interconnect path and a remote
memory brick; runs report IPC and the throughput overhead of serving part
of the memory traffic remotely.
"""

from .config import AluPool, ConfigError, MemoryStage, PlatformConfig, \
    bundled_platform, load_platform, loads_platform
from .engine import DeadlockError, Engine, SimulationFault
from .interconnect import DEFAULT_REMOTE_STAGES, InterconnectConfig, RemoteStage, \
    build_remote_pipeline, endpoint_service_cycles, ns_to_cycles, remote_path_latency_ns
from .metrics import SimReport, overhead
from .microarch import KINDS, MEM_TARGETS, InstructionSource, IssueUnit, sample_mem_target
from .queueing import Instruction, QueueModule, QueueSpec
from .simulator import baseline_profile, build_engine, config_fingerprint, simulate
from .sweep import SweepPoint, SweepResult, SweepSpec, run_sweep
from .workload import CalibrationError, CalibrationResult, WorkloadProfile, \
    bundled_profile, calibrate_baseline, load_profile, loads_profile, save_profile

__version__ = "0.1.0"
