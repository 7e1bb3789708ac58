"""A total mini-language over the naturals.

Programs are predicates built from {eq, le, not, and, or} over arithmetic
expressions {x, 0, 1, 2, add, sub, mul, mod}.  Every program terminates on
every natural input because the grammar has no recursion and the two partial
arithmetic operations are patched into total ones:

    sub(a, b) = max(a - b, 0)        (truncated subtraction)
    mod(a, 0) = a

Concrete syntax is parenthesized prefix form with the root marked `pred`,
e.g. ``(pred (eq (mod x 2) 0))`` accepts exactly the even numbers.

The module also provides a canonical enumeration of all programs: primary
key is node count of the predicate tree, secondary key is lexicographic on
node kinds then children (kind order as listed above, smaller sizes first
when children differ in size).  ``enumerate_program`` and ``program_index``
are mutually inverse bijections between naturals and programs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# AST nodes are nested tuples:
#   expressions: ("x",) | ("const", v) | ("add"|"sub"|"mul"|"mod", l, r)
#   predicates:  ("eq"|"le", l, r) | ("not", p) | ("and"|"or", p, q)

EXPR_LEAVES = (("x",), ("const", 0), ("const", 1), ("const", 2))
EXPR_OPS = ("add", "sub", "mul", "mod")
PRED_CMP = ("eq", "le")
PRED_KINDS = ("eq", "le", "not", "and", "or")

CONST_VALUES = (0, 1, 2)


class DslError(ValueError):
    """Base class for problems with program text or structure."""


class DslSyntaxError(DslError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class DslArityError(DslError):
    pass


class DslUnknownSymbolError(DslError):
    pass


def node_size(node) -> int:
    k = node[0]
    if k == "x" or k == "const":
        return 1
    if k == "not":
        return 1 + node_size(node[1])
    return 1 + node_size(node[1]) + node_size(node[2])


@dataclass(frozen=True)
class Program:
    """An immutable predicate over the naturals.

    ``size`` counts AST nodes of the predicate tree (the `pred` wrapper is
    syntax, not a node).
    """

    root: tuple

    def __post_init__(self):
        _check_pred(self.root)

    @property
    def size(self) -> int:
        return node_size(self.root)

    def __call__(self, n: int) -> int:
        return eval_program(self, n)

    def render(self) -> str:
        return f"(pred {_render(self.root)})"

    def __str__(self) -> str:
        return self.render()


def _check_expr(node):
    k = node[0]
    if k == "x":
        if len(node) != 1:
            raise DslArityError("x takes no arguments")
        return
    if k == "const":
        if len(node) != 2 or node[1] not in CONST_VALUES:
            raise DslUnknownSymbolError(f"bad constant {node!r}; allowed: 0, 1, 2")
        return
    if k in EXPR_OPS:
        if len(node) != 3:
            raise DslArityError(f"{k} takes exactly 2 arguments")
        _check_expr(node[1])
        _check_expr(node[2])
        return
    raise DslUnknownSymbolError(f"unknown expression kind {k!r}")


def _check_pred(node):
    k = node[0]
    if k in PRED_CMP:
        if len(node) != 3:
            raise DslArityError(f"{k} takes exactly 2 arguments")
        _check_expr(node[1])
        _check_expr(node[2])
    elif k == "not":
        if len(node) != 2:
            raise DslArityError("not takes exactly 1 argument")
        _check_pred(node[1])
    elif k in ("and", "or"):
        if len(node) != 3:
            raise DslArityError(f"{k} takes exactly 2 arguments")
        _check_pred(node[1])
        _check_pred(node[2])
    else:
        raise DslUnknownSymbolError(f"unknown predicate kind {k!r}")


def _render(node) -> str:
    k = node[0]
    if k == "x":
        return "x"
    if k == "const":
        return str(node[1])
    args = " ".join(_render(c) for c in node[1:])
    return f"({k} {args})"


# ----------------------------------------------------------------- parsing

def _tokenize(text: str):
    """Yield (token, byte_offset) pairs; tokens are '(', ')' or atoms."""
    tokens = []
    i = 0
    data = text
    n = len(data)
    while i < n:
        c = data[i]
        if c in " \t\r\n":
            i += 1
        elif c == "(" or c == ")":
            tokens.append((c, i))
            i += 1
        else:
            j = i
            while j < n and data[j] not in " \t\r\n()":
                j += 1
            tokens.append((data[i:j], i))
            i = j
    return tokens


class _Atom:
    __slots__ = ("token", "offset")

    def __init__(self, token, offset):
        self.token = token
        self.offset = offset


class _List:
    __slots__ = ("items", "offset")

    def __init__(self, items, offset):
        self.items = items
        self.offset = offset

    def head(self):
        if not self.items or not isinstance(self.items[0], _Atom):
            raise DslSyntaxError("form must start with an operator", self.offset)
        return self.items[0].token


def parse(text: str) -> Program:
    """Parse DSL source into a Program.

    Raises DslSyntaxError (with byte offset), DslArityError, or
    DslUnknownSymbolError.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise DslSyntaxError("empty input", 0)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else (None, len(text))

    def advance():
        tok = peek()
        pos[0] += 1
        return tok

    def parse_form():
        tok, off = advance()
        if tok is None:
            raise DslSyntaxError("unexpected end of input", off)
        if tok == "(":
            items = []
            while True:
                nxt, noff = peek()
                if nxt is None:
                    raise DslSyntaxError("unclosed '('", noff)
                if nxt == ")":
                    advance()
                    return _List(items, off)
                items.append(parse_form())
        if tok == ")":
            raise DslSyntaxError("unexpected ')'", off)
        return _Atom(tok, off)

    form = parse_form()
    extra, off_extra = peek()
    if extra is not None:
        raise DslSyntaxError("trailing input after program", off_extra)

    if not isinstance(form, _List) or not form.items:
        raise DslSyntaxError("program must be a (pred ...) form", 0)
    if form.head() != "pred":
        raise DslSyntaxError("program must start with (pred ...)", form.offset)
    if len(form.items) != 2:
        raise DslArityError("pred takes exactly 1 argument")
    return Program(_form_to_pred(form.items[1]))


def _form_to_expr(form):
    if isinstance(form, _Atom):
        tok = form.token
        if tok == "x":
            return ("x",)
        if tok in ("0", "1", "2"):
            return ("const", int(tok))
        if tok.isdigit():
            raise DslUnknownSymbolError(
                f"constant {tok} out of range (allowed: 0, 1, 2)"
            )
        raise DslUnknownSymbolError(f"unknown symbol {tok!r}")
    head = form.head()
    if head in EXPR_OPS:
        if len(form.items) != 3:
            raise DslArityError(f"{head} takes exactly 2 arguments")
        return (head, _form_to_expr(form.items[1]), _form_to_expr(form.items[2]))
    raise DslUnknownSymbolError(f"unknown expression operator {head!r}")


def _form_to_pred(form):
    if isinstance(form, _Atom):
        raise DslSyntaxError(
            f"expected a predicate form, got atom {form.token!r}", form.offset
        )
    head = form.head()
    if head in PRED_CMP:
        if len(form.items) != 3:
            raise DslArityError(f"{head} takes exactly 2 arguments")
        return (head, _form_to_expr(form.items[1]), _form_to_expr(form.items[2]))
    if head == "not":
        if len(form.items) != 2:
            raise DslArityError("not takes exactly 1 argument")
        return ("not", _form_to_pred(form.items[1]))
    if head in ("and", "or"):
        if len(form.items) != 3:
            raise DslArityError(f"{head} takes exactly 2 arguments")
        return (head, _form_to_pred(form.items[1]), _form_to_pred(form.items[2]))
    raise DslUnknownSymbolError(f"unknown predicate operator {head!r}")


# -------------------------------------------------------------- evaluation

def _eval_expr(node, n: int) -> int:
    k = node[0]
    if k == "x":
        return n
    if k == "const":
        return node[1]
    a = _eval_expr(node[1], n)
    b = _eval_expr(node[2], n)
    if k == "add":
        return a + b
    if k == "sub":
        return a - b if a > b else 0
    if k == "mul":
        return a * b
    return a % b if b else a  # mod


def _eval_pred(node, n: int) -> int:
    k = node[0]
    if k == "eq":
        return 1 if _eval_expr(node[1], n) == _eval_expr(node[2], n) else 0
    if k == "le":
        return 1 if _eval_expr(node[1], n) <= _eval_expr(node[2], n) else 0
    if k == "not":
        return 1 - _eval_pred(node[1], n)
    a = _eval_pred(node[1], n)
    if k == "and":
        return a & _eval_pred(node[2], n)
    return a | _eval_pred(node[2], n)


def eval_program(p: Program, n: int) -> int:
    """Exact evaluation with Python integers (never overflows)."""
    if n < 0:
        raise ValueError("inputs are naturals")
    return _eval_pred(p.root, n)


# ------------------------------------------------------------- enumeration

@lru_cache(maxsize=None)
def count_exprs(size: int) -> int:
    """Number of expression ASTs with exactly `size` nodes."""
    if size < 1:
        return 0
    if size == 1:
        return len(EXPR_LEAVES)
    total = 0
    for a in range(1, size - 1):
        total += count_exprs(a) * count_exprs(size - 1 - a)
    return len(EXPR_OPS) * total


@lru_cache(maxsize=None)
def count_preds(size: int) -> int:
    """Number of predicate ASTs with exactly `size` nodes."""
    if size < 3:
        return 0
    epairs = sum(
        count_exprs(a) * count_exprs(size - 1 - a) for a in range(1, size - 1)
    )
    ppairs = sum(
        count_preds(a) * count_preds(size - 1 - a) for a in range(1, size - 1)
    )
    return len(PRED_CMP) * epairs + count_preds(size - 1) + 2 * ppairs


def _unrank_pair(k, total_size, count_fn, unrank_fn):
    """Unrank a (left, right) pair with size(left)+size(right)=total_size."""
    for a in range(1, total_size):
        b = total_size - a
        block = count_fn(a) * count_fn(b)
        if k < block:
            right_count = count_fn(b)
            return unrank_fn(a, k // right_count), unrank_fn(b, k % right_count)
        k -= block
    raise AssertionError("pair index out of range")


def _rank_pair(left, right, count_fn, rank_fn):
    a = node_size(left)
    b = node_size(right)
    k = 0
    for aa in range(1, a):
        k += count_fn(aa) * count_fn(a + b - aa)
    return k + rank_fn(left) * count_fn(b) + rank_fn(right)


def _unrank_expr(size: int, k: int):
    if size == 1:
        return EXPR_LEAVES[k]
    pair_total = sum(
        count_exprs(a) * count_exprs(size - 1 - a) for a in range(1, size - 1)
    )
    op = EXPR_OPS[k // pair_total]
    l, r = _unrank_pair(k % pair_total, size - 1, count_exprs, _unrank_expr)
    return (op, l, r)


def _rank_expr(node) -> int:
    if node_size(node) == 1:
        return EXPR_LEAVES.index(node)
    size = node_size(node)
    pair_total = sum(
        count_exprs(a) * count_exprs(size - 1 - a) for a in range(1, size - 1)
    )
    op_idx = EXPR_OPS.index(node[0])
    return op_idx * pair_total + _rank_pair(
        node[1], node[2], count_exprs, _rank_expr
    )


def _unrank_pred(size: int, k: int):
    epair_total = sum(
        count_exprs(a) * count_exprs(size - 1 - a) for a in range(1, size - 1)
    )
    for cmp in PRED_CMP:
        if k < epair_total:
            l, r = _unrank_pair(k, size - 1, count_exprs, _unrank_expr)
            return (cmp, l, r)
        k -= epair_total
    if k < count_preds(size - 1):
        return ("not", _unrank_pred(size - 1, k))
    k -= count_preds(size - 1)
    ppair_total = sum(
        count_preds(a) * count_preds(size - 1 - a) for a in range(1, size - 1)
    )
    for junct in ("and", "or"):
        if k < ppair_total:
            l, r = _unrank_pair(k, size - 1, count_preds, _unrank_pred)
            return (junct, l, r)
        k -= ppair_total
    raise AssertionError("predicate index out of range")


def _rank_pred(node) -> int:
    size = node_size(node)
    kind = node[0]
    epair_total = sum(
        count_exprs(a) * count_exprs(size - 1 - a) for a in range(1, size - 1)
    )
    k = 0
    if kind in PRED_CMP:
        k = PRED_CMP.index(kind) * epair_total
        return k + _rank_pair(node[1], node[2], count_exprs, _rank_expr)
    k = 2 * epair_total
    if kind == "not":
        return k + _rank_pred(node[1])
    k += count_preds(size - 1)
    ppair_total = sum(
        count_preds(a) * count_preds(size - 1 - a) for a in range(1, size - 1)
    )
    if kind == "or":
        k += ppair_total
    return k + _rank_pair(node[1], node[2], count_preds, _rank_pred)


def enumerate_program(i: int) -> Program:
    """The i-th program in the canonical order (i >= 0)."""
    if i < 0:
        raise ValueError("index must be >= 0")
    size = 3
    k = i
    while True:
        block = count_preds(size)
        if k < block:
            return Program(_unrank_pred(size, k))
        k -= block
        size += 1
        if size > 200:
            raise ValueError("index too large")


def program_index(p: Program) -> int:
    """Inverse of enumerate_program."""
    size = p.size
    base = sum(count_preds(s) for s in range(3, size))
    return base + _rank_pred(p.root)


# -------------------------------------------------------- tape compilation

# Opcodes for the stack-machine form used by the batch evaluators.
OP_X = 0
OP_CONST = 1
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_MOD = 5
OP_EQ = 6
OP_LE = 7
OP_NOT = 8
OP_AND = 9
OP_OR = 10

_OPCODE = {
    "add": OP_ADD,
    "sub": OP_SUB,
    "mul": OP_MUL,
    "mod": OP_MOD,
    "eq": OP_EQ,
    "le": OP_LE,
    "not": OP_NOT,
    "and": OP_AND,
    "or": OP_OR,
}


def compile_tape(p: Program):
    """Postorder opcode tape for the batch evaluators.

    Returns (ops, args) as uint8/int8 arrays of equal length (= p.size).
    """
    ops = []
    args = []

    def walk(node):
        k = node[0]
        if k == "x":
            ops.append(OP_X)
            args.append(0)
        elif k == "const":
            ops.append(OP_CONST)
            args.append(node[1])
        elif k == "not":
            walk(node[1])
            ops.append(OP_NOT)
            args.append(0)
        else:
            walk(node[1])
            walk(node[2])
            ops.append(_OPCODE[k])
            args.append(0)

    walk(p.root)
    return np.array(ops, dtype=np.uint8), np.array(args, dtype=np.int8)


# Canonical named programs used throughout tests and docs.
EVEN_SOURCE = "(pred (eq (mod x 2) 0))"
ACCEPT_ALL_SOURCE = "(pred (eq x x))"


def multiples_of(k: int) -> Program:
    """A program accepting exactly the multiples of k (k >= 1).

    Constants above 2 are spelled with add, e.g. 5 = (add 2 (add 1 2)).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1:
        return parse(ACCEPT_ALL_SOURCE)

    def const_expr(v: int):
        if v <= 2:
            return ("const", v)
        if v <= 4:
            return ("add", ("const", 2), const_expr(v - 2))
        return ("add", const_expr(2), const_expr(v - 2))

    return Program(("eq", ("mod", ("x",), const_expr(k)), ("const", 0)))
