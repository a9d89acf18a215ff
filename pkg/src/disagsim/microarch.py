"""Compute-brick front end: statistical instruction supply and in-order issue.

Instructions are not executed semantically.  Each one is a token whose
kind, memory target, dependency and branch-mispredict outcome are sampled
from a workload profile, and whose cost is paid by travelling through the
queue modules of the platform.  A token visits exactly one service chain:
ALU kinds visit their ALU pool, memory kinds visit the single module named
by their resolved target (the hit-probability cascade already folds the
cost of probing the faster levels into those probabilities), and remote
targets traverse the interconnect pipeline.

Issue is in-order: a token whose dependency has not retired blocks itself
and everything younger, and a token refused by a full entry queue retries
next cycle.  Mispredicted branches block issue for ``branch_flush_penalty``
cycles starting the cycle they finish executing.  Nops retire at issue.

Sampling draws per instruction happen in a fixed order (kind, memory
cascade, mispredict, dependency gate, dependency pick) from the engine's
single generator, which is what makes runs bit-reproducible.
"""

from __future__ import annotations

from .queueing import Instruction

KINDS = ("IntALU", "FPALU", "Branch", "Load", "Store", "Nop")
MEMORY_KINDS = ("Load", "Store")
MEM_TARGETS = ("L1", "L2", "L3", "LocalMem", "RemoteMem")


def sample_mem_target(profile, rng) -> str:
    """Resolve where a memory instruction is served.

    Hit cascade: L1 with ``l1_hit``; on a miss, L2 with ``l2_hit``; then L3
    with ``l3_hit``; a full miss goes remote with ``remote_fraction`` and
    to local memory otherwise.
    """
    if rng.random() < profile.l1_hit:
        return "L1"
    if rng.random() < profile.l2_hit:
        return "L2"
    if rng.random() < profile.l3_hit:
        return "L3"
    if rng.random() < profile.remote_fraction:
        return "RemoteMem"
    return "LocalMem"


class InstructionSource:
    """Generates the instruction stream, one token per call, in id order."""

    def __init__(self, profile, rng):
        self.profile = profile
        self.rng = rng
        self.next_id = 0
        acc = 0.0
        self._cum = []
        for kind in KINDS:
            p = profile.mix.get(kind, 0.0)
            if p > 0.0:
                acc += p
                self._cum.append((acc, kind))
        self._cum[-1] = (1.0, self._cum[-1][1])  # guard the float tail

    def generate(self) -> Instruction:
        rng = self.rng
        profile = self.profile
        token_id = self.next_id
        self.next_id = token_id + 1

        r = rng.random()
        for edge, kind in self._cum:
            if r < edge:
                break

        mem_target = None
        mispredict = False
        if kind == "Load" or kind == "Store":
            mem_target = sample_mem_target(profile, rng)
        elif kind == "Branch":
            mispredict = rng.random() < profile.branch_miss_prob

        deps = ()
        if token_id and rng.random() < profile.dep_prob:
            lo = token_id - profile.dep_window
            deps = (rng.randrange(lo if lo > 0 else 0, token_id),)

        return Instruction(id=token_id, kind=kind, mem_target=mem_target,
                           deps=deps, mispredict=mispredict)


class IssueUnit:
    """In-order issue stage; the engine's frontend.

    ``entries`` maps every instruction kind and memory target to its entry
    module (None means retire at issue).  The unit keeps the set of issued
    but unretired token ids for dependency checks; since issue is in-order,
    any dependency of the token at the head is either in that set or
    already retired.
    """

    def __init__(self, source: InstructionSource, entries: dict,
                 issue_width: int, branch_flush_penalty: int):
        if issue_width < 1:
            raise ValueError(f"issue width must be >= 1, got {issue_width}")
        self.source = source
        self.entries = entries
        self.issue_width = issue_width
        self.branch_flush_penalty = branch_flush_penalty
        self.pending: Instruction | None = None
        self.unretired: set[int] = set()
        self.resume_cycle = 0
        self.stall_cycles = 0  # cycles fully blocked by a dependency

    def issue(self, engine, cycle: int, budget: int) -> None:
        if cycle < self.resume_cycle:
            return
        quota = self.issue_width
        if budget < quota:
            quota = budget
        unretired = self.unretired
        entries = self.entries
        n = 0
        while n < quota:
            tok = self.pending
            if tok is None:
                tok = self.source.generate()
            else:
                self.pending = None
            blocked = False
            for d in tok.deps:
                if d in unretired:
                    blocked = True
                    break
            if blocked:
                self.pending = tok
                if n == 0:
                    self.stall_cycles += 1
                return
            key = tok.mem_target if tok.mem_target is not None else tok.kind
            entry = entries[key]
            if entry is None:
                engine.inject_instant(tok, cycle)
                n += 1
                continue
            if engine.inject(tok, entry, cycle):
                unretired.add(tok.id)
                n += 1
            else:
                self.pending = tok
                return

    def on_retire(self, token: Instruction, cycle: int) -> None:
        self.unretired.discard(token.id)
        if token.mispredict:
            resume = cycle + self.branch_flush_penalty
            if resume > self.resume_cycle:
                self.resume_cycle = resume
