import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conceptlab import dsl
from helpers import gen_preds, naive_eval

EVEN = dsl.parse("(pred (eq (mod x 2) 0))")


# ----------------------------------------------------------------- parsing

def test_parse_even_examples():
    assert EVEN(4) == 1
    assert EVEN(7) == 0


def test_parse_tautology_accepts_everything():
    p = dsl.parse("(pred (le 0 0))")
    assert all(p(n) == 1 for n in range(50))


def test_parse_singleton_two():
    p = dsl.parse("(pred (eq x (add 1 1)))")
    assert [n for n in range(50) if p(n) == 1] == [2]


def test_render_is_canonical():
    p = dsl.parse("(pred   (eq ( mod x 2 )   0))")
    assert p.render() == "(pred (eq (mod x 2) 0))"


def test_parse_render_round_trip_enumerated():
    for i in range(0, 3000, 7):
        p = dsl.enumerate_program(i)
        assert dsl.parse(p.render()).root == p.root


@settings(max_examples=200, deadline=None)
@given(st.integers(min_value=0, max_value=10**5))
def test_parse_render_round_trip_random_index(i):
    p = dsl.enumerate_program(i)
    assert dsl.parse(p.render()).root == p.root


def test_syntax_error_reports_byte_offset():
    with pytest.raises(dsl.DslSyntaxError) as err:
        dsl.parse("(pred (eq x x)")
    assert err.value.offset == 14  # end of input

    with pytest.raises(dsl.DslSyntaxError) as err:
        dsl.parse("(pred (eq x x)) junk")
    assert err.value.offset == 16


def test_arity_error():
    with pytest.raises(dsl.DslArityError):
        dsl.parse("(pred (eq x))")
    with pytest.raises(dsl.DslArityError):
        dsl.parse("(pred (not (eq x x) (eq x x)))")


def test_unknown_symbol_error():
    with pytest.raises(dsl.DslUnknownSymbolError):
        dsl.parse("(pred (eq y 0))")
    with pytest.raises(dsl.DslUnknownSymbolError):
        dsl.parse("(pred (eq x 3))")
    with pytest.raises(dsl.DslUnknownSymbolError):
        dsl.parse("(pred (xor (eq x x) (eq x x)))")


# -------------------------------------------------------------- evaluation

def test_eval_multiples_of_three_against_arithmetic():
    # constants above 2 are spelled with add, so 3 is (add 1 2)
    p = dsl.parse("(pred (eq (mod x (add 1 2)) 0))")
    assert p(12) == 1
    for n in range(101):
        assert p(n) == (1 if n % 3 == 0 else 0)


def test_totality_conventions():
    # mod by zero returns the left operand
    p = dsl.parse("(pred (eq (mod x 0) x))")
    assert all(p(n) == 1 for n in range(20))
    # truncated subtraction never goes negative
    q = dsl.parse("(pred (eq (sub 1 2) 0))")
    assert q(0) == 1


def test_eval_agrees_with_reference_size_le_5():
    # every program of size <= 5, every input 0..256
    count = sum(dsl.count_preds(s) for s in range(3, 6))
    assert count == 1120
    for i in range(count):
        p = dsl.enumerate_program(i)
        assert p.size <= 5
        for n in range(257):
            assert dsl.eval_program(p, n) == naive_eval(p.root, n), (i, n)


def test_step_bound():
    # interpreter work is one visit per node: size(p) visits, far inside the
    # size * (bitlen + 2)^2 budget
    rng = np.random.default_rng(3)
    for _ in range(100_000):
        p = dsl.enumerate_program(int(rng.integers(0, 10**4)))
        n = int(rng.integers(0, 10**6))
        counter = [0]
        naive_eval(p.root, n, counter)
        bound = p.size * (n.bit_length() + 2) ** 2
        assert counter[0] == p.size
        assert counter[0] <= bound


# ------------------------------------------------------------- enumeration

def test_enumerate_zero_is_smallest():
    assert dsl.enumerate_program(0).render() == "(pred (eq x x))"


def test_enumeration_counts_match_brute_force():
    for size in range(3, 8):
        assert dsl.count_preds(size) == len(gen_preds(size))


def test_enumeration_complete_and_duplicate_free_to_size_7():
    # independent recursive generation of everything with size <= 7
    expected = set()
    for size in range(3, 8):
        expected.update(gen_preds(size))
    k = len(expected)
    assert k == sum(dsl.count_preds(s) for s in range(3, 8))
    seen = set()
    for i in range(k):
        p = dsl.enumerate_program(i)
        assert p.root not in seen, f"duplicate at index {i}"
        seen.add(p.root)
    assert seen == expected


def test_enumeration_injective_first_10k():
    seen = set()
    for i in range(10**4):
        root = dsl.enumerate_program(i).root
        assert root not in seen
        seen.add(root)


def test_enumeration_ordered_by_size():
    sizes = [dsl.enumerate_program(i).size for i in range(0, 5000, 13)]
    assert sizes == sorted(sizes)


def test_rank_unrank_inverse():
    for i in list(range(200)) + [2175, 2176, 46239, 46240, 94400, 250000]:
        assert dsl.program_index(dsl.enumerate_program(i)) == i


def test_first_index_matching_even_numbers():
    # scan the enumeration with the reference interpreter until some program
    # matches evenness on 0..1000 exactly
    target = [1 if n % 2 == 0 else 0 for n in range(1001)]
    found = None
    for i in range(10**4):
        root = dsl.enumerate_program(i).root
        if all(naive_eval(root, n) == target[n] for n in range(1001)):
            found = i
            break
    assert found == 179  # (pred (eq 0 (mod x 2))) comes before (eq (mod x 2) 0)
    assert dsl.enumerate_program(179).render() == "(pred (eq 0 (mod x 2)))"


def test_multiples_of_builder():
    for k in (1, 2, 3, 5, 7):
        p = dsl.multiples_of(k)
        for n in range(200):
            assert p(n) == (1 if n % k == 0 else 0)


def test_program_size_counts_nodes():
    assert dsl.parse("(pred (eq x x))").size == 3
    assert EVEN.size == 5
    assert dsl.parse("(pred (not (eq x x)))").size == 4
