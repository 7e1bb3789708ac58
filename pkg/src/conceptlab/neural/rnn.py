"""A three-number recurrent update that decides parity by counting down.

State (counter, flag, stop) starts at (n, 0, 0) and steps through

    (counter, flag, stop) <- (counter - 1, 1 - flag, 1 - sign(counter))

with sign(0) = 0, so the stop tag fires one step after the counter reaches
zero.  The run takes exactly n + 1 updates and the terminal flag is 1 iff n
is even.  No feed-forward map of the input can do this for all n; the loop
can, because it runs as long as the input demands.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..kernels import parity_sweep


@dataclass(frozen=True)
class ParityTrace:
    parity_flag: int        # 1 iff n is even
    steps: int              # exactly n + 1
    final_state: tuple      # (counter, flag, stop) at termination


def _sign(v: int) -> int:
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


def rnn_parity_trace(n: int) -> ParityTrace:
    """Run the recursion to termination and keep the bookkeeping."""
    if n < 0:
        raise ValueError("n must be a natural number")
    counter, flag, stop = n, 0, 0
    steps = 0
    while stop != 1:
        counter, flag, stop = counter - 1, 1 - flag, 1 - _sign(counter)
        steps += 1
    return ParityTrace(flag, steps, (counter, flag, stop))


def rnn_parity(n: int) -> int:
    """1 iff n is even, computed by the recurrent countdown."""
    return rnn_parity_trace(n).parity_flag


def rnn_parity_sweep(n_max: int):
    """Terminal flags and step counts for every n in 0..n_max.

    Runs on the kernel backend; the per-n unroll semantics are identical to
    rnn_parity_trace.
    """
    return parity_sweep(n_max)
