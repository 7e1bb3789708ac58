"""Concepts over the naturals, observation streams, and generator conversion.

A concept is a subset of the naturals denoted by a DSL program.  It is only
ever manifest through observations (x, y); the full membership set can be
materialized on a finite prefix but never in total.  Two concepts with the
same extension are indistinguishable, and at desk scale equality is only
checkable on a prefix.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .kernels import eval_tape_batch


class StreamExhausted(Exception):
    """One-sided stream of an (apparently) finite concept ran dry.

    Detection is budgeted: the stream scans at most `search_budget` naturals
    past the last emission before giving up, since membership emptiness
    beyond a point is not decidable in general.
    """


class BudgetExceeded(Exception):
    """A generator scan hit its step budget before finding the next member."""


@dataclass(frozen=True)
class Observation:
    """A datum with an optional binary label (None on unlabeled streams)."""

    x: int
    y: int | None = None


def extension_bits(program: dsl.Program, xs: np.ndarray) -> np.ndarray:
    """Exact membership bits of `program` over an int64 input vector.

    Fast path through the tape kernel; lanes that saturated are re-evaluated
    with exact Python integers, so the result is always exact.
    """
    ops, args = dsl.compile_tape(program)
    bits, poison = eval_tape_batch(ops, args, xs)
    if poison.any():
        bits = bits.copy()
        for i in np.nonzero(poison)[0]:
            bits[i] = dsl.eval_program(program, int(xs[i]))
    return bits


class Concept:
    """A program together with a cached membership prefix."""

    def __init__(self, encoding: dsl.Program):
        self.encoding = encoding
        self._prefix = np.zeros(0, dtype=np.uint8)

    def contains(self, n: int) -> bool:
        return dsl.eval_program(self.encoding, n) == 1

    def prefix(self, upto: int) -> np.ndarray:
        """Membership bits on 0..upto-1 (cached, grows monotonically)."""
        if upto > self._prefix.shape[0]:
            xs = np.arange(self._prefix.shape[0], upto, dtype=np.int64)
            self._prefix = np.concatenate(
                [self._prefix, extension_bits(self.encoding, xs)]
            )
        return self._prefix[:upto]

    def extension_equal_on_prefix(self, other: "Concept", upto: int) -> bool:
        return np.array_equal(self.prefix(upto), other.prefix(upto))

    def __repr__(self):
        return f"Concept({self.encoding.render()})"


COMPLETE = "complete"
POSITIVE_ONLY = "positive-only"


@dataclass
class ObservationStream:
    """Deterministic observation source for one concept.

    complete mode emits ((0, y0), (1, y1), ...) in canonical increasing
    order, eventually covering every natural.  positive-only mode emits the
    members in increasing order starting from the smallest strictly positive
    one, labels implied 1.  Single-owner mutable cursor.
    """

    concept: Concept
    mode: str = COMPLETE
    cursor: int = 0
    search_budget: int = 10**6
    _last_positive: int = field(default=0, repr=False)

    def __post_init__(self):
        if self.mode not in (COMPLETE, POSITIVE_ONLY):
            raise ValueError(f"unknown stream mode {self.mode!r}")

    def next(self) -> Observation:
        if self.mode == COMPLETE:
            x = self.cursor
            self.cursor += 1
            return Observation(x, dsl.eval_program(self.concept.encoding, x))
        # positive-only: scan upward from the last emission
        start = self._last_positive + 1
        for x in range(start, start + self.search_budget):
            if self.concept.contains(x):
                self._last_positive = x
                self.cursor += 1
                return Observation(x, 1)
        raise StreamExhausted(
            f"no member in ({start - 1}, {start + self.search_budget})"
        )

    def take(self, n: int) -> list[Observation]:
        return [self.next() for _ in range(n)]

    def __iter__(self):
        while True:
            yield self.next()


def observations_to_csv(observations) -> str:
    """`x,y` rows; empty y column for unlabeled observations."""
    buf = io.StringIO()
    buf.write("x,y\n")
    for obs in observations:
        y = "" if obs.y is None else str(obs.y)
        buf.write(f"{obs.x},{y}\n")
    return buf.getvalue()


def observations_to_jsonl(observations) -> str:
    lines = []
    for obs in observations:
        lines.append(json.dumps({"x": obs.x, "y": obs.y}, sort_keys=True))
    return "\n".join(lines) + "\n"


class MemberGenerator:
    """Lists the members of a concept in increasing order starting at 0.

    Built from the membership test alone: scan candidates upward, emit those
    the program accepts.  Eventually lists every member; on a finite concept
    the scan past the last member never returns, so each call takes a step
    budget and raises BudgetExceeded when it runs out.
    """

    def __init__(self, program: dsl.Program, step_budget: int = 10**6):
        self.program = program
        self.step_budget = step_budget
        self._next_candidate = 0

    def __call__(self, step_budget: int | None = None) -> int:
        budget = self.step_budget if step_budget is None else step_budget
        start = self._next_candidate
        for x in range(start, start + budget):
            if dsl.eval_program(self.program, x) == 1:
                self._next_candidate = x + 1
                return x
        self._next_candidate = start + budget
        raise BudgetExceeded(
            f"no member found in [{start}, {start + budget})"
        )


def discriminator_to_generator(
    program: dsl.Program, step_budget: int = 10**6
) -> MemberGenerator:
    """Turn a membership test into a procedure that lists all members."""
    return MemberGenerator(program, step_budget)
