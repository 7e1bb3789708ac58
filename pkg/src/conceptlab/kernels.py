"""Hot numeric kernels with twin numba/numpy implementations.

Every public function dispatches on the active backend (see backend.py) and
both implementations are exported for direct comparison in tests and
benchmarks.  All integer arithmetic saturates at CAP = 2**61 and flags the
affected lane as "poisoned"; callers re-evaluate poisoned lanes with exact
Python integers.  This keeps the fast paths exact: a result is either
definitely correct or explicitly marked untrusted.
"""

from __future__ import annotations

import numpy as np

from .backend import using_numba

CAP = np.int64(1) << np.int64(61)

# opcode values duplicated from dsl.py to keep this module import-light
_OP_X = 0
_OP_CONST = 1
_OP_ADD = 2
_OP_SUB = 3
_OP_MUL = 4
_OP_MOD = 5
_OP_EQ = 6
_OP_LE = 7
_OP_NOT = 8
_OP_AND = 9
_OP_OR = 10


# ------------------------------------------------------- numpy: tape eval

def eval_tape_batch_numpy(ops, args, xs):
    """Evaluate one opcode tape over a vector of inputs.

    Returns (bits uint8, poison uint8); poisoned lanes saturated somewhere
    and their bit must not be trusted.
    """
    n = xs.shape[0]
    depth = int(ops.shape[0]) + 1
    stack = np.empty((depth, n), dtype=np.int64)
    pst = np.empty((depth, n), dtype=bool)
    cap = np.int64(CAP)
    sp = -1
    for k in range(ops.shape[0]):
        op = int(ops[k])
        if op == _OP_X:
            sp += 1
            stack[sp] = xs
            pst[sp] = False
        elif op == _OP_CONST:
            sp += 1
            stack[sp] = int(args[k])
            pst[sp] = False
        elif op == _OP_NOT:
            stack[sp] = 1 - stack[sp]
        else:
            b = stack[sp]
            pb = pst[sp]
            sp -= 1
            a = stack[sp]
            pa = pst[sp]
            p = pa | pb
            if op == _OP_ADD:
                r = a + b  # both <= CAP = 2**61, no int64 overflow
                over = r > cap
                r = np.where(over, cap, r)
                p = p | over
            elif op == _OP_SUB:
                r = np.maximum(a - b, 0)
            elif op == _OP_MUL:
                bb = np.where(b == 0, np.int64(1), b)
                over = (b != 0) & (a > cap // bb)
                r = np.where(over, cap, a * np.where(over, np.int64(0), b))
                p = p | over
            elif op == _OP_MOD:
                bb = np.where(b == 0, np.int64(1), b)
                r = np.where(b == 0, a, a % bb)
            elif op == _OP_EQ:
                r = (a == b).astype(np.int64)
            elif op == _OP_LE:
                r = (a <= b).astype(np.int64)
            elif op == _OP_AND:
                r = a & b
            else:  # _OP_OR
                r = a | b
            stack[sp] = r
            pst[sp] = p
    return stack[0].astype(np.uint8), pst[0].astype(np.uint8)


def scan_first_compatible_numpy(ops_flat, args_flat, starts, xs, ys):
    """First tape (by index) compatible with every (x, y) pair.

    Returns (idx, status, evals): status 0 = found, 1 = poisoned lane hit at
    idx (caller must resolve exactly), 2 = none found.  evals counts
    candidate-observation evaluations performed.
    """
    count = starts.shape[0] - 1
    evals = 0
    n = xs.shape[0]
    # check observations in chunks so early mismatches stay cheap
    chunks = []
    lo = 0
    step = 16
    while lo < n:
        hi = min(n, lo + step)
        chunks.append((lo, hi))
        lo = hi
        step *= 4
    for c in range(count):
        ops = ops_flat[starts[c]:starts[c + 1]]
        args = args_flat[starts[c]:starts[c + 1]]
        ok = True
        for lo, hi in chunks:
            bits, poison = eval_tape_batch_numpy(ops, args, xs[lo:hi])
            evals += hi - lo
            if poison.any():
                return c, 1, evals
            if not np.array_equal(bits, ys[lo:hi]):
                ok = False
                break
        if ok:
            return c, 0, evals
    return count, 2, evals


# -------------------------------------------------------- numpy: raycast

def raycast_numpy(ox, oy, dxs, dys, segs):
    """Nearest ray/segment hit per ray.

    segs is float64 (S, 4) rows (x0, y0, x1, y1).  Returns
    (t float64[P], seg int64[P], s float64[P]); seg = -1 means no hit.
    Ties in distance resolve to the lowest segment index.
    """
    P = dxs.shape[0]
    if segs.shape[0] == 0:
        return (
            np.full(P, np.inf),
            np.full(P, -1, dtype=np.int64),
            np.zeros(P),
        )
    x0 = segs[:, 0]
    y0 = segs[:, 1]
    ex = segs[:, 2] - x0
    ey = segs[:, 3] - y0
    dx = dxs[:, None]
    dy = dys[:, None]
    wx = x0[None, :] - ox
    wy = y0[None, :] - oy
    det = ex[None, :] * dy - ey[None, :] * dx
    ok = np.abs(det) > 1e-15
    det_safe = np.where(ok, det, 1.0)
    t = (ex[None, :] * wy - ey[None, :] * wx) / det_safe
    s = (dx * wy - dy * wx) / det_safe
    valid = ok & (t > 1e-9) & (s >= 0.0) & (s <= 1.0)
    t = np.where(valid, t, np.inf)
    idx = np.argmin(t, axis=1)
    rows = np.arange(P)
    t_best = t[rows, idx]
    hit = np.isfinite(t_best)
    return (
        t_best,
        np.where(hit, idx, -1).astype(np.int64),
        np.where(hit, s[rows, idx], 0.0),
    )


# --------------------------------------------------- numpy: parity sweep

def parity_sweep_numpy(n_max):
    """Unroll the counter/flag/stop recursion for every n in 0..n_max.

    Returns (flags uint8, steps int64) where flags[n] is the terminal
    parity flag and steps[n] the number of updates until the stop tag
    fired.  Lanes are simulated in cache-sized blocks; total work is
    sum(n + 1), which is what an honest unroll costs.
    """
    flags = np.empty(n_max + 1, dtype=np.uint8)
    steps = np.empty(n_max + 1, dtype=np.int64)
    block = 1 << 15
    for lo in range(0, n_max + 1, block):
        hi = min(n_max + 1, lo + block)
        nn = np.arange(lo, hi, dtype=np.int32)
        a = np.zeros(hi - lo, dtype=np.uint8)
        alive0 = 0  # lanes are sorted by n; lane i dies before lane i+1
        t = 0
        while alive0 < hi - lo:
            view = nn[alive0:]
            stop = view == 0  # stop tag fires where the counter hit zero
            a[alive0:] ^= 1
            view -= 1
            t += 1
            ndone = int(np.count_nonzero(stop))
            if ndone:
                done_idx = np.nonzero(stop)[0] + alive0
                flags[lo + done_idx] = a[done_idx]
                steps[lo + done_idx] = t
                # verify the retire order instead of assuming it
                if not np.array_equal(
                    done_idx, np.arange(alive0, alive0 + ndone)
                ):
                    raise AssertionError("lane retirement out of order")
                alive0 += ndone
    return flags, steps


# ------------------------------------------------------------ numba twins

_NUMBA_READY = False
eval_tape_batch_numba = None
scan_first_compatible_numba = None
raycast_numba = None
parity_sweep_numba = None


def _build_numba():
    global _NUMBA_READY, eval_tape_batch_numba, scan_first_compatible_numba
    global raycast_numba, parity_sweep_numba
    if _NUMBA_READY:
        return
    from numba import njit

    cap = np.int64(CAP)

    @njit(cache=True)
    def _eval_tape_batch(ops, args, xs):
        n = xs.shape[0]
        out = np.empty(n, dtype=np.uint8)
        poison = np.zeros(n, dtype=np.uint8)
        depth = ops.shape[0] + 1
        stack = np.empty(depth, dtype=np.int64)
        pst = np.empty(depth, dtype=np.uint8)
        for i in range(n):
            x = xs[i]
            sp = -1
            for k in range(ops.shape[0]):
                op = ops[k]
                if op == 0:  # x
                    sp += 1
                    stack[sp] = x
                    pst[sp] = 0
                elif op == 1:  # const
                    sp += 1
                    stack[sp] = args[k]
                    pst[sp] = 0
                elif op == 8:  # not
                    stack[sp] = 1 - stack[sp]
                else:
                    b = stack[sp]
                    pb = pst[sp]
                    sp -= 1
                    a = stack[sp]
                    p = pst[sp] | pb
                    r = np.int64(0)
                    if op == 2:  # add
                        r = a + b
                        if r > cap:
                            r = cap
                            p = 1
                    elif op == 3:  # sub
                        r = a - b
                        if r < 0:
                            r = 0
                    elif op == 4:  # mul
                        if b != 0 and a > cap // b:
                            r = cap
                            p = 1
                        else:
                            r = a * b
                    elif op == 5:  # mod
                        r = a if b == 0 else a % b
                    elif op == 6:  # eq
                        r = 1 if a == b else 0
                    elif op == 7:  # le
                        r = 1 if a <= b else 0
                    elif op == 9:  # and
                        r = a & b
                    else:  # or
                        r = a | b
                    stack[sp] = r
                    pst[sp] = p
            out[i] = np.uint8(stack[0])
            poison[i] = pst[0]
        return out, poison

    @njit(cache=True)
    def _scan_first_compatible(ops_flat, args_flat, starts, xs, ys):
        count = starts.shape[0] - 1
        evals = 0
        maxlen = 0
        for c in range(count):
            ln = starts[c + 1] - starts[c]
            if ln > maxlen:
                maxlen = ln
        stack = np.empty(maxlen + 1, dtype=np.int64)
        pst = np.empty(maxlen + 1, dtype=np.uint8)
        for c in range(count):
            lo = starts[c]
            hi = starts[c + 1]
            ok = True
            for t in range(xs.shape[0]):
                x = xs[t]
                evals += 1
                sp = -1
                for k in range(lo, hi):
                    op = ops_flat[k]
                    if op == 0:
                        sp += 1
                        stack[sp] = x
                        pst[sp] = 0
                    elif op == 1:
                        sp += 1
                        stack[sp] = args_flat[k]
                        pst[sp] = 0
                    elif op == 8:
                        stack[sp] = 1 - stack[sp]
                    else:
                        b = stack[sp]
                        pb = pst[sp]
                        sp -= 1
                        a = stack[sp]
                        p = pst[sp] | pb
                        r = np.int64(0)
                        if op == 2:
                            r = a + b
                            if r > cap:
                                r = cap
                                p = 1
                        elif op == 3:
                            r = a - b
                            if r < 0:
                                r = 0
                        elif op == 4:
                            if b != 0 and a > cap // b:
                                r = cap
                                p = 1
                            else:
                                r = a * b
                        elif op == 5:
                            r = a if b == 0 else a % b
                        elif op == 6:
                            r = 1 if a == b else 0
                        elif op == 7:
                            r = 1 if a <= b else 0
                        elif op == 9:
                            r = a & b
                        else:
                            r = a | b
                        stack[sp] = r
                        pst[sp] = p
                if pst[0] != 0:
                    return c, 1, evals
                if stack[0] != ys[t]:
                    ok = False
                    break
            if ok:
                return c, 0, evals
        return count, 2, evals

    @njit(cache=True)
    def _raycast(ox, oy, dxs, dys, segs):
        P = dxs.shape[0]
        S = segs.shape[0]
        t_best = np.full(P, np.inf)
        idx_best = np.full(P, -1, dtype=np.int64)
        s_best = np.zeros(P)
        for j in range(P):
            dx = dxs[j]
            dy = dys[j]
            bt = np.inf
            bi = np.int64(-1)
            bs = 0.0
            for k in range(S):
                x0 = segs[k, 0]
                y0 = segs[k, 1]
                ex = segs[k, 2] - x0
                ey = segs[k, 3] - y0
                wx = x0 - ox
                wy = y0 - oy
                det = ex * dy - ey * dx
                if abs(det) > 1e-15:
                    t = (ex * wy - ey * wx) / det
                    s = (dx * wy - dy * wx) / det
                    if t > 1e-9 and 0.0 <= s <= 1.0 and t < bt:
                        bt = t
                        bi = k
                        bs = s
            t_best[j] = bt
            idx_best[j] = bi
            s_best[j] = bs
        return t_best, idx_best, s_best

    @njit(cache=True)
    def _parity_sweep(n_max):
        flags = np.empty(n_max + 1, dtype=np.uint8)
        steps = np.empty(n_max + 1, dtype=np.int64)
        for n in range(n_max + 1):
            nn = n
            a = 0
            e = 0
            t = 0
            while e != 1:
                if nn > 0:
                    e = 0
                elif nn == 0:
                    e = 1
                else:
                    e = 2
                a = 1 - a
                nn -= 1
                t += 1
            flags[n] = a
            steps[n] = t
        return flags, steps

    eval_tape_batch_numba = _eval_tape_batch
    scan_first_compatible_numba = _scan_first_compatible
    raycast_numba = _raycast
    parity_sweep_numba = _parity_sweep
    _NUMBA_READY = True


# ------------------------------------------------------------ dispatchers

def eval_tape_batch(ops, args, xs):
    if using_numba():
        _build_numba()
        return eval_tape_batch_numba(ops, args, xs)
    return eval_tape_batch_numpy(ops, args, xs)


def scan_first_compatible(ops_flat, args_flat, starts, xs, ys):
    if using_numba():
        _build_numba()
        return scan_first_compatible_numba(ops_flat, args_flat, starts, xs, ys)
    return scan_first_compatible_numpy(ops_flat, args_flat, starts, xs, ys)


def raycast(ox, oy, dxs, dys, segs):
    if using_numba():
        _build_numba()
        return raycast_numba(ox, oy, dxs, dys, segs)
    return raycast_numpy(ox, oy, dxs, dys, segs)


def parity_sweep(n_max):
    if using_numba():
        _build_numba()
        return parity_sweep_numba(n_max)
    return parity_sweep_numpy(n_max)
