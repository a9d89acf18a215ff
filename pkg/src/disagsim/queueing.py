"""Bounded queue + server pool + fixed delay: the basic building block.

Every simulated component (ALU pool, cache level, interconnect stage,
memory controller) is an instance of :class:`QueueModule`, configured by a
:class:`QueueSpec`.  A module is a bounded FIFO feeding ``servers``
identical servers; each server processes one token every ``service_time``
cycles, and a completed token is handed downstream ``delay`` cycles after
its service ends.  ``delay`` adds latency without consuming queue slots or
server throughput; ``capacity`` bounds only the waiting line, so a full
queue pushes back on the producer instead of dropping tokens.

Timing convention (pinned, the whole test suite depends on it):

* ``offer(tok, c)`` places the token in the waiting line during cycle ``c``.
* A token starts service at ``max(accept cycle, cycle its server frees)``,
  even though the bookkeeping happens on the next ``tick``.  An uncontended
  token offered at cycle ``c`` is therefore delivered at exactly
  ``c + service_time + delay``.
* ``tick(c)`` must be called once per cycle while the module holds tokens.
  It returns the tokens whose service and delay both elapsed by cycle ``c``.

Tokens returned by ``tick`` that a caller fails to pass downstream must be
handed back via ``requeue``; they are re-emitted ahead of everything else
on the next tick and block new admissions until they leave.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


@dataclass(frozen=True)
class QueueSpec:
    """Static parameters of one queue/server/delay module."""

    name: str
    capacity: int
    service_time: int
    delay: int = 0
    servers: int = 1

    def __post_init__(self):
        if not self.name:
            raise ValueError("module name must be non-empty")
        if self.capacity < 1:
            raise ValueError(f"{self.name}: capacity must be >= 1, got {self.capacity}")
        if self.service_time < 1:
            raise ValueError(f"{self.name}: service_time must be >= 1, got {self.service_time}")
        if self.delay < 0:
            raise ValueError(f"{self.name}: delay must be >= 0, got {self.delay}")
        if self.servers < 1:
            raise ValueError(f"{self.name}: servers must be >= 1, got {self.servers}")

    @property
    def transit_time(self) -> int:
        """Uncontended cycles from acceptance to downstream delivery."""
        return self.service_time + self.delay


@dataclass(slots=True)
class Instruction:
    """One message flowing through the module graph.

    ``deps`` may only reference ids smaller than ``id``.  ``retire_cycle``
    and ``accumulated_latency`` are filled in when the token leaves the
    system; ``accumulated_latency`` is retire minus inject.
    """

    id: int
    kind: str
    mem_target: str | None = None
    deps: tuple[int, ...] = ()
    inject_cycle: int | None = None
    retire_cycle: int | None = None
    accumulated_latency: int | None = None
    mispredict: bool = False


class QueueModule:
    """Runtime state of one queue/server/delay module.

    Single-use: build, drive for one run, read statistics.  Statistics are
    kept as running integrals so per-cycle cost stays O(state changes).
    Occupancy covers the waiting line, the servers and the delay stage;
    tokens stuck in the retry buffer after a downstream rejection are
    excluded from occupancy but still counted by ``token_count``.
    """

    __slots__ = (
        "spec", "downstream", "_waiting", "_service", "_delay_line", "_retry",
        "_free_at", "_count", "accepted", "rejected", "_served", "_wait_sum",
        "_occ_val", "_occ_int", "_occ_last", "_occ_max", "_capacity",
        "_service_time", "_delay", "_servers",
    )

    def __init__(self, spec: QueueSpec):
        self.spec = spec
        self.downstream: QueueModule | None = None
        self._waiting: deque = deque()        # (token, accept_cycle)
        self._service: deque = deque()        # (completion_cycle, token)
        self._delay_line: deque = deque()     # (release_cycle, token)
        self._retry: deque = deque()          # tokens rejected downstream
        self._free_at = deque([0] * spec.servers)
        self._count = 0
        # cached spec fields, attribute lookups add up in the cycle loop
        self._capacity = spec.capacity
        self._service_time = spec.service_time
        self._delay = spec.delay
        self._servers = spec.servers
        self.accepted = 0
        self.rejected = 0
        self._served = 0
        self._wait_sum = 0
        self._occ_val = 0
        self._occ_int = 0
        self._occ_last = 0
        self._occ_max = 0

    @property
    def token_count(self) -> int:
        """Tokens anywhere inside the module, retry buffer included."""
        return self._count

    def offer(self, token, cycle: int) -> bool:
        """Try to append ``token`` to the waiting line during ``cycle``.

        Returns False when the line is full; the caller keeps the token and
        retries on a later cycle.  Rejection is backpressure, not loss.
        """
        if len(self._waiting) >= self._capacity:
            self.rejected += 1
            return False
        self._waiting.append((token, cycle))
        self.accepted += 1
        self._count += 1
        occ = self._occ_val
        self._occ_int += occ * (cycle - self._occ_last)
        self._occ_last = cycle
        occ += 1
        self._occ_val = occ
        if occ > self._occ_max:
            self._occ_max = occ
        return True

    def tick(self, cycle: int):
        """Advance one cycle; return tokens leaving the module, or None.

        Order within a tick: emit the retry buffer, release the delay
        stage, complete service, then admit from the waiting line into the
        freed servers.  Admissions are suppressed while a previous tick's
        output is still awaiting downstream acceptance.
        """
        out = None
        stalled = False
        if self._retry:
            out = list(self._retry)
            self._retry.clear()
            stalled = True

        dl = self._delay_line
        sv = self._service
        w = self._waiting
        delay = self._delay
        st = self._service_time
        servers = self._servers
        free = self._free_at
        departed = 0
        # a service that ends this cycle frees a server that may start (and,
        # for service_time 1, even finish) another token this same cycle, so
        # iterate release/complete/admit to a fixed point
        while True:
            while dl and dl[0][0] <= cycle:
                tok = dl.popleft()[1]
                if out is None:
                    out = [tok]
                else:
                    out.append(tok)
                departed += 1
            while sv and sv[0][0] <= cycle:
                done_cycle, tok = sv.popleft()
                free.append(done_cycle)
                if delay:
                    dl.append((done_cycle + delay, tok))
                else:
                    if out is None:
                        out = [tok]
                    else:
                        out.append(tok)
                    departed += 1
            if stalled or not w or len(sv) >= servers:
                break
            while w and len(sv) < servers:
                tok, acc = w.popleft()
                f = free.popleft()
                entry = f if f > acc else acc
                sv.append((entry + st, tok))
                self._wait_sum += entry - acc
                self._served += 1
            if sv[0][0] > cycle and (not dl or dl[0][0] > cycle):
                break

        if departed:
            self._occ_int += self._occ_val * (cycle - self._occ_last)
            self._occ_last = cycle
            self._occ_val -= departed
            self._count -= departed
        if stalled:
            self._count -= len(out) - departed
        return out

    def requeue(self, tokens) -> None:
        """Take back tokens a downstream module refused; FIFO preserved."""
        self._retry.extend(tokens)
        self._count += len(tokens)

    def finalize(self, cycle: int) -> None:
        """Close the occupancy integral at the end of a run."""
        self._occ_int += self._occ_val * (cycle - self._occ_last)
        self._occ_last = cycle

    def stats(self, total_cycles: int) -> dict:
        """Aggregate statistics over ``total_cycles`` simulated cycles.

        ``busyFraction`` charges each served token exactly ``service_time``
        busy cycles, which is exact for drained runs.
        """
        if total_cycles <= 0:
            total_cycles = 1
        busy = self._served * self._service_time
        return {
            "meanOccupancy": self._occ_int / total_cycles,
            "maxOccupancy": self._occ_max,
            "busyFraction": busy / (total_cycles * self._servers),
            "meanWait": self._wait_sum / self._served if self._served else 0.0,
            "accepted": self.accepted,
            "rejected": self.rejected,
        }
