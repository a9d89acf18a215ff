"""Engine behaviour: stepping, counters, stop conditions, failure guards."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from disagsim.engine import DeadlockError, Engine, SimulationFault
from disagsim.queueing import Instruction, QueueModule, QueueSpec

from conftest import BernoulliSource, BurstSource, PacedSource


def chain_engine(specs, source_cls=PacedSource, seed=1, **source_kw):
    modules = [QueueModule(s) for s in specs]
    for a, b in zip(modules, modules[1:]):
        a.downstream = b
    src = source_cls(modules[0], **source_kw)
    return Engine(modules, src, seed=seed), src


class TestStep:
    def test_clock_advances_without_work(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 1)])
        for _ in range(10):
            eng.step(0)
        assert eng.clock == 10
        assert eng.injected == eng.retired == eng.in_flight == 0

    def test_single_token_drains(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 1)], source_cls=BurstSource, count=1)
        eng.step(1)
        while eng.in_flight:
            eng.step(0)
        assert (eng.injected, eng.retired, eng.in_flight) == (1, 1, 0)

    def test_duplicate_module_names_rejected(self):
        mods = [QueueModule(QueueSpec("m", 4, 1)), QueueModule(QueueSpec("m", 4, 1))]
        with pytest.raises(ValueError):
            Engine(mods, None, seed=1)

    def test_double_retire_is_a_fault(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 1)])
        t = Instruction(id=0, kind="IntALU")
        eng.inject_instant(t, 1)
        with pytest.raises(SimulationFault):
            eng._retire(t, 2)


class TestRun:
    def test_ideal_pipeline_ipc_near_one(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 1)], period=1)
        report = eng.run(max_instructions=1000)
        assert report.ipc == pytest.approx(1.0, abs=0.01)
        assert report.in_flight == 0

    def test_supply_limited_ipc_half(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 1)], period=2)
        report = eng.run(max_instructions=1000)
        assert report.ipc == pytest.approx(0.5, abs=0.01)

    def test_max_cycles_stop_counts_drain(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 5, delay=20)], period=50)
        report = eng.run(max_cycles=60)
        # token injected at cycle 50 is still in flight at 60; drain is counted
        assert report.cycles == 75
        assert report.in_flight == 0

    def test_exactly_one_stop_condition(self):
        eng, _ = chain_engine([QueueSpec("sink", 4, 1)])
        with pytest.raises(ValueError):
            eng.run()
        with pytest.raises(ValueError):
            eng.run(max_instructions=1, max_cycles=1)
        with pytest.raises(ValueError):
            eng.run(max_instructions=0)

    def test_chain_latency_through_engine(self):
        specs = [QueueSpec("a", 4, 3, delay=5), QueueSpec("b", 4, 2, delay=1)]
        eng, src = chain_engine(specs, source_cls=BurstSource, count=1)
        report = eng.run(max_instructions=1)
        assert report.cycles == 1 + (3 + 5) + (2 + 1)  # injected at cycle 1

    def test_deadlock_guard_names_module(self):
        specs = [QueueSpec("stuck", 4, 10**9)]
        modules = [QueueModule(s) for s in specs]
        src = BurstSource(modules[0], count=1)
        eng = Engine(modules, src, seed=1, deadlock_window=500)
        with pytest.raises(DeadlockError) as err:
            eng.run(max_instructions=1)
        assert "stuck" in str(err.value)
        assert err.value.module == "stuck"


class TestDeterminism:
    def build(self, seed):
        return chain_engine(
            [QueueSpec("q", 8, 2, delay=3)], source_cls=BernoulliSource,
            seed=seed, rate=0.3)

    def test_same_seed_identical_reports(self):
        r1 = self.build(7)[0].run(max_instructions=2000)
        r2 = self.build(7)[0].run(max_instructions=2000)
        assert r1.to_json() == r2.to_json()

    def test_different_seed_differs(self):
        r1 = self.build(7)[0].run(max_instructions=2000)
        r2 = self.build(8)[0].run(max_instructions=2000)
        assert r1.cycles != r2.cycles or r1.to_json() != r2.to_json()


@given(
    rate=st.floats(0.05, 0.9),
    service_time=st.integers(1, 3),
    delay=st.integers(0, 5),
    capacity=st.integers(1, 6),
    seed=st.integers(0, 2**32),
)
@settings(max_examples=40, deadline=None)
def test_conservation_fuzz(rate, service_time, delay, capacity, seed):
    """injected == retired + in-flight at every cycle, for any config."""
    modules = [QueueModule(QueueSpec("q", capacity, service_time, delay))]
    src = BernoulliSource(modules[0], rate)
    eng = Engine(modules, src, seed=seed, audit_every=1)
    report = eng.run(max_instructions=500)
    assert report.injected == report.retired == 500
    assert report.in_flight == 0


def test_littles_law_single_queue():
    """Mean occupancy tracks arrival rate x mean transit time."""
    spec = QueueSpec("q", capacity=10**6, service_time=2)
    modules = [QueueModule(spec)]
    src = BernoulliSource(modules[0], rate=0.25)
    eng = Engine(modules, src, seed=3)
    report = eng.run(max_cycles=100_000)
    lam = report.retired / report.cycles
    mean_transit = sum(src.latencies) / len(src.latencies)
    occupancy = report.per_module["q"]["meanOccupancy"]
    assert occupancy == pytest.approx(lam * mean_transit, rel=0.05)
    assert report.per_module["q"]["busyFraction"] == pytest.approx(0.5, abs=0.02)
