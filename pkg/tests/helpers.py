"""Independent reference implementations used as test oracles.

Everything here is deliberately written against the same specifications but
with different code paths than the package: a dict-dispatch interpreter, a
generate-all-trees enumerator, and a sort-based ray caster.  When a test
compares package output to these, agreement is evidence, not tautology.
"""

import numpy as np

# ---------------------------------------------------------------- naive eval

def _mod(a, b):
    return a if b == 0 else a % b


_EXPR_FNS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: max(a - b, 0),
    "mul": lambda a, b: a * b,
    "mod": _mod,
}


def naive_eval(root, n, counter=None):
    """Reference interpreter over AST tuples; optionally counts node visits."""

    def expr(node):
        if counter is not None:
            counter[0] += 1
        kind = node[0]
        if kind == "x":
            return n
        if kind == "const":
            return node[1]
        return _EXPR_FNS[kind](expr(node[1]), expr(node[2]))

    def pred(node):
        if counter is not None:
            counter[0] += 1
        kind = node[0]
        if kind == "eq":
            return int(expr(node[1]) == expr(node[2]))
        if kind == "le":
            return int(expr(node[1]) <= expr(node[2]))
        if kind == "not":
            return 1 - pred(node[1])
        left = pred(node[1])
        right = pred(node[2])
        return left & right if kind == "and" else left | right

    return pred(root)


# ------------------------------------------------- brute-force AST generation

_LEAVES = [("x",), ("const", 0), ("const", 1), ("const", 2)]


def gen_exprs(size):
    """All expression ASTs with exactly `size` nodes, any order."""
    if size == 1:
        return list(_LEAVES)
    out = []
    for op in ("add", "sub", "mul", "mod"):
        for a in range(1, size - 1):
            for left in gen_exprs(a):
                for right in gen_exprs(size - 1 - a):
                    out.append((op, left, right))
    return out


def gen_preds(size):
    """All predicate ASTs with exactly `size` nodes, any order."""
    out = []
    for cmp_op in ("eq", "le"):
        for a in range(1, size - 1):
            for left in gen_exprs(a):
                for right in gen_exprs(size - 1 - a):
                    out.append((cmp_op, left, right))
    if size >= 4:
        for inner in gen_preds(size - 1):
            out.append(("not", inner))
    for junct in ("and", "or"):
        for a in range(1, size - 1):
            for left in gen_preds(a):
                for right in gen_preds(size - 1 - a):
                    out.append((junct, left, right))
    return out


# ------------------------------------------------------- reference ray caster

def brute_raycast(ox, oy, dxs, dys, segments):
    """Intersect every segment per ray, sort hits by (t, index), keep first.

    `segments` is a list of ((x0, y0), (x1, y1)) pairs.  Same validity rules
    as the production kernel: t > 1e-9, s in [0, 1], |det| > 1e-15.
    """
    t_out = np.full(len(dxs), np.inf)
    idx_out = np.full(len(dxs), -1, dtype=np.int64)
    s_out = np.zeros(len(dxs))
    for j, (dx, dy) in enumerate(zip(dxs, dys)):
        hits = []
        for k, ((x0, y0), (x1, y1)) in enumerate(segments):
            ex = x1 - x0
            ey = y1 - y0
            wx = x0 - ox
            wy = y0 - oy
            det = ex * dy - ey * dx
            if abs(det) <= 1e-15:
                continue
            t = (ex * wy - ey * wx) / det
            s = (dx * wy - dy * wx) / det
            if t > 1e-9 and 0.0 <= s <= 1.0:
                hits.append((t, k, s))
        if hits:
            hits.sort(key=lambda h: (h[0], h[1]))
            t_out[j], idx_out[j], s_out[j] = hits[0]
    return t_out, idx_out, s_out
