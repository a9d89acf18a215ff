"""Shared builders and synthetic traffic sources for the test suite."""

import pytest

from disagsim import PlatformConfig, WorkloadProfile
from disagsim.queueing import Instruction


def make_profile(**kw):
    kw.setdefault("name", "test")
    kw.setdefault("mix", {"IntALU": 1.0})
    return WorkloadProfile(**kw)


def make_platform(**kw):
    return PlatformConfig(**kw)


class PacedSource:
    """Injects one token into a fixed module every ``period`` cycles."""

    def __init__(self, module, period=1, kind="IntALU"):
        self.module = module
        self.period = period
        self.kind = kind
        self.next_id = 0
        self.pending = None

    def issue(self, engine, cycle, budget):
        if self.pending is None:
            if cycle % self.period != 0:
                return
            self.pending = Instruction(id=self.next_id, kind=self.kind)
            self.next_id += 1
        if engine.inject(self.pending, self.module, cycle):
            self.pending = None

    def on_retire(self, token, cycle):
        pass


class BernoulliSource:
    """Injects a token with probability ``rate`` each cycle; keeps latencies."""

    def __init__(self, module, rate):
        self.module = module
        self.rate = rate
        self.next_id = 0
        self.pending = None
        self.latencies = []

    def issue(self, engine, cycle, budget):
        if self.pending is None:
            if engine.rng.random() >= self.rate:
                return
            self.pending = Instruction(id=self.next_id, kind="IntALU")
            self.next_id += 1
        if engine.inject(self.pending, self.module, cycle):
            self.pending = None

    def on_retire(self, token, cycle):
        self.latencies.append(token.accumulated_latency)


class BurstSource:
    """Injects a fixed batch of tokens at cycle 1, then goes quiet."""

    def __init__(self, module, count, per_cycle=None):
        self.module = module
        self.remaining = count
        self.per_cycle = per_cycle
        self.next_id = 0
        self.retired_ids = []

    def issue(self, engine, cycle, budget):
        quota = self.remaining if self.per_cycle is None else min(self.per_cycle, self.remaining)
        for _ in range(quota):
            tok = Instruction(id=self.next_id, kind="IntALU")
            if not engine.inject(tok, self.module, cycle):
                return
            self.next_id += 1
            self.remaining -= 1

    def on_retire(self, token, cycle):
        self.retired_ids.append(token.id)


@pytest.fixture
def platform():
    return make_platform()
