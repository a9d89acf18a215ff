"""Cycle-driven engine hosting a graph of queue modules.

Each simulated cycle has two phases:

1. every module holding tokens is ticked, in fixed reverse-topological
   order (closest to the sink first).  A token delivered by an upstream
   module therefore lands in a downstream queue that has already been
   ticked this cycle, and a server freed this cycle can start that token
   with no dead cycle in between.  Tokens leaving a terminal module retire.
2. the frontend gets a chance to inject up to its issue width of new
   tokens, bounded by the remaining instruction budget.

Because injection runs after the tick phase, a token retiring at cycle
``c`` can unblock a dependent instruction issued at the same cycle ``c``.

The engine is deterministic: one seeded ``random.Random`` instance drives
every probabilistic decision, module order is fixed at construction, and
no iteration order depends on hashing.  A single engine is single-threaded
and single-use; run independent engines for independent experiments.
"""

from __future__ import annotations

import random

from . import metrics
from .queueing import Instruction, QueueModule

DEFAULT_DEADLOCK_WINDOW = 1_000_000


class SimulationFault(RuntimeError):
    """An internal consistency check failed; the engine is buggy."""


class DeadlockError(RuntimeError):
    """No token retired for a whole deadlock window."""

    def __init__(self, message: str, module: str | None = None):
        super().__init__(message)
        self.module = module


class Engine:
    """Hosts the module graph, the clock, and the global counters.

    ``frontend`` must provide ``issue(engine, cycle, budget)`` which calls
    :meth:`inject` / :meth:`inject_instant`, and ``on_retire(token, cycle)``.
    ``modules`` are given in upstream-to-downstream construction order with
    ``downstream`` links already wired; tick order is the reverse.
    """

    def __init__(self, modules, frontend, seed: int,
                 config_fingerprint: str = "",
                 deadlock_window: int = DEFAULT_DEADLOCK_WINDOW,
                 audit_every: int = 256):
        names = [m.spec.name for m in modules]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate module names: {names}")
        self.modules = list(modules)
        self.by_name = {m.spec.name: m for m in self.modules}
        self._tick_order = list(reversed(self.modules))
        self.frontend = frontend
        self.seed = seed
        self.rng = random.Random(seed)
        self.config_fingerprint = config_fingerprint
        self.deadlock_window = deadlock_window
        self.audit_every = audit_every
        self.clock = 0
        self.injected = 0
        self.retired = 0
        self.in_flight = 0
        self.last_retire_cycle = 0

    # -- token lifecycle -------------------------------------------------

    def inject(self, token: Instruction, module: QueueModule, cycle: int) -> bool:
        """Offer a fresh token to its entry module; count it if accepted."""
        if not module.offer(token, cycle):
            return False
        token.inject_cycle = cycle
        self.injected += 1
        self.in_flight += 1
        return True

    def inject_instant(self, token: Instruction, cycle: int) -> None:
        """Inject a token that retires the same cycle (no module visit)."""
        token.inject_cycle = cycle
        self.injected += 1
        self.in_flight += 1
        self._retire(token, cycle)

    def _retire(self, token: Instruction, cycle: int) -> None:
        if token.retire_cycle is not None:
            raise SimulationFault(f"token {token.id} retired twice")
        token.retire_cycle = cycle
        token.accumulated_latency = cycle - token.inject_cycle
        self.retired += 1
        self.in_flight -= 1
        self.last_retire_cycle = cycle
        self.frontend.on_retire(token, cycle)

    # -- cycle loop ------------------------------------------------------

    def step(self, budget: int = 0) -> None:
        """Advance the whole system by exactly one cycle."""
        cycle = self.clock + 1
        self.clock = cycle
        for module in self._tick_order:
            if module._count:
                out = module.tick(cycle)
                if out:
                    nxt = module.downstream
                    if nxt is None:
                        for tok in out:
                            self._retire(tok, cycle)
                    else:
                        done = 0
                        for tok in out:
                            if nxt.offer(tok, cycle):
                                done += 1
                            else:
                                break
                        if done < len(out):
                            module.requeue(out[done:])
        if budget > 0:
            self.frontend.issue(self, cycle, budget)
        if self.audit_every and cycle % self.audit_every == 0:
            self.audit_conservation()

    def audit_conservation(self) -> None:
        """Physically recount in-flight tokens against the counters."""
        physical = sum(m._count for m in self.modules)
        if physical != self.in_flight or self.injected != self.retired + self.in_flight:
            raise SimulationFault(
                f"conservation violated at cycle {self.clock}: injected={self.injected} "
                f"retired={self.retired} in_flight={self.in_flight} physical={physical}")

    def run(self, max_instructions: int | None = None,
            max_cycles: int | None = None) -> "metrics.SimReport":
        """Simulate to the stop condition, drain, and report.

        Exactly one stop condition must be given and it must be positive.
        Drain cycles are included in the cycle count, so IPC reflects the
        full cost of long-latency tokens still in flight at the stop point.
        """
        if (max_instructions is None) == (max_cycles is None):
            raise ValueError("give exactly one of max_instructions / max_cycles")
        limit = max_instructions if max_instructions is not None else max_cycles
        if limit <= 0:
            raise ValueError("stop condition must be positive")

        window = self.deadlock_window
        while True:
            if max_instructions is not None:
                budget = max_instructions - self.injected
            else:
                budget = limit - self.clock
            if budget <= 0 and self.in_flight == 0:
                break
            self.step(budget)
            if self.in_flight and self.clock - self.last_retire_cycle > window:
                raise DeadlockError(
                    f"no retirement for {window} cycles at cycle {self.clock}; "
                    f"most congested module: {self._busiest_module()}",
                    module=self._busiest_module())
            if not self.in_flight and budget > 0 and \
                    self.clock - max(self.last_retire_cycle, 0) > window and not self.injected:
                raise DeadlockError(
                    f"no injection for {window} cycles; frontend starved", module=None)

        self.audit_conservation()
        for m in self.modules:
            m.finalize(self.clock)
        return metrics.build_report(self)

    def _busiest_module(self) -> str:
        best = max(self.modules, key=lambda m: m._count)
        return best.spec.name
