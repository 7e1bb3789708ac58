"""Guess-by-enumeration learning at desk scale.

The learner always holds the first enumerated program compatible with every
observation so far.  Index advances rescan the enumeration from the current
guess; a global tape arena caches compiled programs so repeated runs share
the work.  Convergence is reported through a finite-window surrogate: the
guess has not changed for `window` steps.  That is all any finite harness
can certify.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .concepts import COMPLETE, Concept, Observation, ObservationStream
from .kernels import scan_first_compatible


class EnumerationCapError(Exception):
    """Index search exceeded the configured cap.

    Signals that the target concept (or an equivalent) lies outside the
    searched enumeration prefix.
    """


class TapeArena:
    """Compiled tapes for enumeration prefix 0..count-1, grown lazily."""

    def __init__(self):
        self.count = 0
        self._ops = np.zeros(0, dtype=np.uint8)
        self._args = np.zeros(0, dtype=np.int8)
        self._starts = np.zeros(1, dtype=np.int64)
        self._programs: list[dsl.Program] = []

    def ensure(self, count: int) -> None:
        if count <= self.count:
            return
        new_ops = []
        new_args = []
        for i in range(self.count, count):
            p = dsl.enumerate_program(i)
            self._programs.append(p)
            ops, args = dsl.compile_tape(p)
            new_ops.append(ops)
            new_args.append(args)
        self._ops = np.concatenate([self._ops] + new_ops)
        self._args = np.concatenate([self._args] + new_args)
        lengths = np.array([o.shape[0] for o in new_ops], dtype=np.int64)
        self._starts = np.concatenate(
            [self._starts, self._starts[-1] + np.cumsum(lengths)]
        )
        self.count = count

    def program(self, i: int) -> dsl.Program:
        self.ensure(i + 1)
        return self._programs[i]

    def slices(self, lo: int, hi: int):
        """(ops_flat, args_flat, starts) views for candidates lo..hi-1."""
        self.ensure(hi)
        s = self._starts[lo:hi + 1]
        return (
            self._ops[s[0]:s[-1]],
            self._args[s[0]:s[-1]],
            s - s[0],
        )


_ARENA = TapeArena()


def shared_arena() -> TapeArena:
    return _ARENA


@dataclass
class LearnerState:
    """Single-owner state of one enumeration learner.

    `index` is the minimal enumeration index compatible with `history`;
    `checks` counts candidate-observation compatibility evaluations;
    `last_change` is the step (1-based history length) at which the index
    last moved.
    """

    index: int = 0
    history: list[Observation] = field(default_factory=list)
    checks: int = 0
    last_change: int = 0
    cap: int = 10**6
    _xs: np.ndarray = field(default_factory=lambda: np.zeros(64, dtype=np.int64), repr=False)
    _ys: np.ndarray = field(default_factory=lambda: np.zeros(64, dtype=np.uint8), repr=False)

    @property
    def step(self) -> int:
        return len(self.history)

    def packed_history(self):
        n = len(self.history)
        return self._xs[:n], self._ys[:n]

    def current_program(self) -> dsl.Program:
        return _ARENA.program(self.index)


def _append_packed(state: LearnerState, obs: Observation) -> None:
    n = len(state.history)
    if n >= state._xs.shape[0]:
        grow = max(64, state._xs.shape[0])
        state._xs = np.concatenate([state._xs, np.zeros(grow, dtype=np.int64)])
        state._ys = np.concatenate([state._ys, np.zeros(grow, dtype=np.uint8)])
    state._xs[n] = obs.x
    state._ys[n] = obs.y
    state.history.append(obs)


def _advance(state: LearnerState) -> None:
    """Move index to the next candidate compatible with the full history."""
    xs, ys = state.packed_history()
    lo = state.index + 1
    block = 4096
    while lo <= state.cap:
        hi = min(lo + block, state.cap + 1)
        ops_flat, args_flat, starts = _ARENA.slices(lo, hi)
        rel, status, evals = scan_first_compatible(
            ops_flat, args_flat, starts, xs, ys
        )
        state.checks += int(evals)
        if status == 0:
            state.index = lo + int(rel)
            state.last_change = state.step
            return
        if status == 1:
            # saturated lane: resolve this one candidate exactly
            cand = lo + int(rel)
            program = _ARENA.program(cand)
            ok = True
            for i in range(xs.shape[0]):
                state.checks += 1
                if dsl.eval_program(program, int(xs[i])) != int(ys[i]):
                    ok = False
                    break
            if ok:
                state.index = cand
                state.last_change = state.step
                return
            lo = cand + 1
            continue
        lo = hi
        block = min(block * 2, 1 << 16)
    raise EnumerationCapError(
        f"no compatible program with index <= {state.cap}"
    )


def gold_step(state: LearnerState, obs: Observation) -> LearnerState:
    """Fold one labeled observation into the learner.

    If the current guess already explains it, only the history grows;
    otherwise the index advances to the next compatible candidate.
    Mutates and returns `state` (single-owner semantics).
    """
    if obs.y is None:
        raise ValueError("the enumeration learner needs labeled observations")
    _append_packed(state, obs)
    state.checks += 1
    if dsl.eval_program(_ARENA.program(state.index), obs.x) != obs.y:
        _advance(state)
    return state


def has_converged(state: LearnerState, window: int) -> int:
    """1 iff the guess index has not changed in the last `window` steps.

    A finite-window surrogate: a limit claim is never certifiable at any
    finite step, only falsifiable later.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    return 1 if state.step - state.last_change >= window else 0


@dataclass
class GoldRun:
    """Record of one learning run (CLI- and JSON-friendly)."""

    target_source: str
    mode: str
    steps: int
    trajectory: list[tuple[int, int]]  # (step, new index) change points
    final_index: int
    convergence_step: int              # step of the last index change
    converged: int                     # window test at the end of the run
    window: int
    checks: int

    def guess_at(self, step: int) -> int:
        idx = 0
        for s, i in self.trajectory:
            if s <= step:
                idx = i
            else:
                break
        return idx

    def to_dict(self):
        return {
            "target": self.target_source,
            "mode": self.mode,
            "steps": self.steps,
            "trajectory": [[s, i] for s, i in self.trajectory],
            "final_index": self.final_index,
            "convergence_step": self.convergence_step,
            "converged": self.converged,
            "window": self.window,
            "compatibility_checks": self.checks,
        }


def run_gold(
    target: dsl.Program,
    mode: str = COMPLETE,
    steps: int = 10**4,
    window: int = 10**3,
    cap: int = 10**6,
    stop_when_converged: bool = True,
) -> GoldRun:
    """Feed `steps` observations of `target` to a fresh learner.

    In complete mode the stream is the canonical labeled order; in
    positive-only mode it is the increasing positives with label 1.
    Stops early once the window test passes (unless disabled).
    """
    stream = ObservationStream(Concept(target), mode=mode)
    state = LearnerState(cap=cap)
    trajectory = [(0, 0)]
    for t in range(1, steps + 1):
        obs = stream.next()
        before = state.index
        gold_step(state, obs)
        if state.index != before:
            trajectory.append((t, state.index))
        if stop_when_converged and t >= window and has_converged(state, window):
            break
    return GoldRun(
        target_source=target.render(),
        mode=mode,
        steps=state.step,
        trajectory=trajectory,
        final_index=state.index,
        convergence_step=state.last_change,
        converged=has_converged(state, min(window, max(state.step, 1))),
        window=window,
        checks=state.checks,
    )


def one_sided_run(k: int, steps: int, cap: int = 10**6) -> list[int]:
    """Guess trajectory when only positives of multiples-of-k are shown.

    Returns the guessed index after each of the `steps` observations.  The
    all-accepting program sits at index 0, before any multiples-of-k
    encoding, so positives alone never force the guess off it.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    state = LearnerState(cap=cap)
    guesses = []
    for t in range(1, steps + 1):
        gold_step(state, Observation(k * t, 1))
        guesses.append(state.index)
    return guesses


def is_sufficiently_exciting(
    dataset, concept: Concept, n_check: int = 10**5, cap: int = 10**6
) -> int:
    """1 iff the dataset drives a fresh learner to the right concept.

    "Right" means extension-equal to `concept` on 0..n_check-1; the caller
    must already know the concept, which is exactly why this check cannot
    be run in the field.
    """
    state = LearnerState(cap=cap)
    try:
        for obs in dataset:
            gold_step(state, obs)
    except EnumerationCapError:
        return 0
    guess = Concept(_ARENA.program(state.index))
    return 1 if guess.extension_equal_on_prefix(concept, n_check) else 0
