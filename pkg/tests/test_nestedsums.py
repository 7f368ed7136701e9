import itertools
from fractions import Fraction as F
from random import Random

import pytest

from mhscalc.errors import GuardExceeded
from mhscalc.kernel import gen_binomial, multinomial
from mhscalc.nestedsums import (
    NestedSumSpec,
    RecurrenceEvaluator,
    c_direct,
    c_recursive,
    c_rule,
    chain_count,
    direct_summand_count,
    enumerate_chains,
    kt_value,
    random_rational,
    random_shift,
    random_shift_configuration,
    random_spec,
    two_index_value,
    verify_difference_formula,
    verify_duality,
    verify_recurrence,
    verify_shift_identity,
)


def c_by_literal_product(spec, n):
    """The defining sum, written as the plain cross-product over chain tuples."""
    total = F(0)
    chains_per_slot = [list(enumerate_chains(ni, spec.p)) for ni in n]
    for combo in itertools.product(*chains_per_slot):
        numerator = F(1)
        for i, chain in enumerate(combo):
            nu = tuple(chain[j] - chain[j + 1] for j in range(spec.p - 1)) + (chain[-1],)
            numerator *= multinomial(n[i], nu)
            for j in range(spec.p):
                numerator *= spec.xblocks[i][j] ** nu[j]
        denominator = F(1)
        for j in range(spec.p - 1):
            col_m = sum(chain[j] for chain in combo)
            col_v = sum(chain[j] - chain[j + 1] for chain in combo)
            linear = col_m + spec.tparams[j]
            denominator *= gen_binomial(linear - 1, col_v) * linear
        total += numerator / denominator
    return total


# --- spec construction -------------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError):
        NestedSumSpec(((F(1), F(2)), (F(3),)), (F(1),))  # ragged blocks
    with pytest.raises(ValueError):
        NestedSumSpec(((F(1), F(2)),), ())  # missing shift
    with pytest.raises(ValueError):
        NestedSumSpec(((F(1),),), (F(1),))  # extra shift at depth 1
    for bad in (0, -1, -2, F(-7)):
        with pytest.raises(ValueError):
            NestedSumSpec(((F(1), F(2)),), (F(bad),))
    # negative non-integers are valid shifts
    NestedSumSpec(((F(1), F(2)),), (F(-3, 2),))


def test_spec_parse_and_text():
    spec = NestedSumSpec.parse("1/2,1/3;0,1", "2")
    assert spec.r == 2 and spec.p == 2
    assert spec.xblocks == ((F(1, 2), F(1, 3)), (F(0), F(1)))
    assert spec.tparams == (F(2),)
    assert spec.text() == "x=1/2,1/3;0,1 t=2"
    depth1 = NestedSumSpec.parse("5;-2/3")
    assert depth1.p == 1 and depth1.text() == "x=5;-2/3"


def test_reduce_depth():
    spec = NestedSumSpec(((F(1), F(2)),), (F(1, 2),))
    reduced = spec.reduce_depth()
    assert reduced.xblocks == ((F(2),),)
    assert reduced.tparams == ()
    deep = NestedSumSpec(
        (tuple(map(F, (1, 2, 3))), tuple(map(F, (4, 5, 6)))), (F(1), F(2))
    )
    assert deep.reduce_depth().p == 2
    assert len(deep.reduce_depth().tparams) == 1
    again = deep.reduce_depth().reduce_depth()
    assert again.p == 1
    with pytest.raises(ValueError):
        again.reduce_depth()


def test_one_minus():
    spec = NestedSumSpec(((F(0), F(1)),), (F(1),))
    assert spec.one_minus().xblocks == ((F(1), F(0)),)
    spec2 = NestedSumSpec(((F(1, 3), F(1, 2)),), (F(2),))
    assert spec2.one_minus().xblocks == ((F(2, 3), F(1, 2)),)
    assert spec2.one_minus().one_minus() == spec2


# --- chain enumeration --------------------------------------------------------


def test_enumerate_chains_small():
    assert list(enumerate_chains(1, 2)) == [(1, 1), (1, 0)]
    for p in (1, 2, 4):
        assert list(enumerate_chains(0, p)) == [(0,) * p]
    chains = list(enumerate_chains(2, 3))
    assert chains == [
        (2, 2, 2),
        (2, 2, 1),
        (2, 2, 0),
        (2, 1, 1),
        (2, 1, 0),
        (2, 0, 0),
    ]
    assert len(chains) == chain_count(2, 3) == 6


def test_enumerate_chains_order_and_count():
    for n, p in [(3, 2), (2, 4), (5, 3)]:
        chains = list(enumerate_chains(n, p))
        assert chains == sorted(chains, reverse=True)
        assert len(set(chains)) == len(chains) == chain_count(n, p)
        assert all(c[0] == n for c in chains)
        assert all(all(a >= b for a, b in zip(c, c[1:])) for c in chains)


def test_enumerate_chains_guard():
    with pytest.raises(GuardExceeded):
        list(enumerate_chains(100, 5, chain_guard=1000))


# --- direct evaluation ---------------------------------------------------------


def test_depth_one_is_monomial():
    spec = NestedSumSpec(((F(2),), (F(3),)), ())
    assert c_direct(spec, (2, 1)) == 12


def test_depth_two_at_origin_is_inverse_shift():
    spec = NestedSumSpec(((F(5), F(7)),), (F(1, 2),))
    assert c_direct(spec, (0,)) == 2


def test_depth_two_first_value():
    # c(1) = x1/(t(t+1)) + x2/(t+1)
    x1, x2, t = F(1), F(1), F(1)
    spec = NestedSumSpec(((x1, x2),), (t,))
    assert c_direct(spec, (1,)) == 1
    x1, x2, t = F(1, 2), F(1, 3), F(2)
    spec = NestedSumSpec(((x1, x2),), (t,))
    assert c_direct(spec, (1,)) == x1 / (t * (t + 1)) + x2 / (t + 1) == F(7, 36)


def test_direct_matches_literal_product():
    rng = Random(11)
    for _ in range(25):
        spec = random_spec(rng, 3, 3)
        n = tuple(rng.randint(0, 3) for _ in range(spec.r))
        assert c_direct(spec, n) == c_by_literal_product(spec, n)


def test_direct_guard_and_count():
    spec = NestedSumSpec(((F(1), F(2), F(3)),), (F(1), F(1)))
    assert direct_summand_count(spec, (40,)) == 861  # C(42, 2)
    with pytest.raises(GuardExceeded):
        c_direct(spec, (40,), summand_guard=800)


def test_direct_index_validation():
    spec = NestedSumSpec(((F(1),), (F(2),)), ())
    with pytest.raises(ValueError):
        c_direct(spec, (1,))
    with pytest.raises(ValueError):
        c_direct(spec, (1, -1))


# --- single-slot and two-slot normalizations -----------------------------------


def test_kt_small_values():
    assert kt_value((F(2), F(4)), 1) == 3  # (x1 + x2) / 2
    for x in [(F(1),), (F(1, 2), F(1, 3)), (F(0), F(1), F(2))]:
        assert kt_value(x, 0) == 1
    for n in range(5):
        assert kt_value((F(-2, 3),), n) == F(-2, 3) ** n


def test_kt_reduces_to_direct():
    rng = Random(12)
    for _ in range(20):
        p = rng.randint(1, 4)
        x = tuple(random_rational(rng) for _ in range(p))
        spec = NestedSumSpec((x,), (F(1),) * (p - 1))
        for n in range(5):
            assert kt_value(x, n) == c_direct(spec, (n,))


def test_two_index_small_values():
    x, y = (F(3),), (F(-2),)
    for n in range(3):
        for k in range(3):
            assert two_index_value(x, y, n, k) == F(3) ** n * F(-2) ** k
    x, y = (F(1, 2), F(5)), (F(7), F(-1, 3))
    assert two_index_value(x, y, 0, 0) == 1
    assert two_index_value(x, y, 1, 0) == (x[0] + x[1]) / 2


def test_two_index_reduces_to_direct():
    rng = Random(13)
    for _ in range(15):
        p = rng.randint(1, 3)
        x = tuple(random_rational(rng) for _ in range(p))
        y = tuple(random_rational(rng) for _ in range(p))
        spec = NestedSumSpec((x, y), (F(1),) * (p - 1))
        n, k = rng.randint(0, 4), rng.randint(0, 4)
        assert two_index_value(x, y, n, k) == c_direct(spec, (n, k))


# --- recurrence -----------------------------------------------------------------


def test_recurrence_depth_two_identity():
    # (1 + t) c(1) - x1 c(0) = x2
    x1, x2, t = F(2, 3), F(-1, 5), F(3, 2)
    spec = NestedSumSpec(((x1, x2),), (t,))
    assert (1 + t) * c_recursive(spec, (1,)) - x1 * c_recursive(spec, (0,)) == x2


def test_recurrence_depth_one_is_monomial():
    spec = NestedSumSpec(((F(2, 5),), (F(-3),)), ())
    for n in itertools.product(range(4), repeat=2):
        assert c_recursive(spec, n) == F(2, 5) ** n[0] * F(-3) ** n[1]


def test_recurrence_matches_direct():
    rng = Random(14)
    for _ in range(20):
        spec = random_spec(rng, 3, 3)
        n = tuple(rng.randint(0, 4) for _ in range(spec.r))
        assert c_recursive(spec, n) == c_direct(spec, n)


def test_recurrence_evaluator_memo_reuse():
    spec = NestedSumSpec(((F(1, 2), F(1, 3), F(1, 5)),), (F(1), F(1)))
    evaluator = RecurrenceEvaluator(spec)
    evaluator.value((6,))
    entries = evaluator.memo_entries
    assert entries == 3 * 7  # three depth levels over 0..6
    evaluator.value((4,))  # inside the filled box: no growth
    assert evaluator.memo_entries == entries


def test_verify_recurrence_report():
    spec = NestedSumSpec.parse("1/2,1/3;0,1", "2")
    report = verify_recurrence(spec, (3, 3))
    assert report.ok and len(report.comparisons) == 9


# --- identity verifiers ----------------------------------------------------------


def test_duality_depth_two_frozen_value():
    # both sides at n=1 equal ((1-x1) + t(1-x2)) / (t(1+t)) = 11/36
    spec = NestedSumSpec(((F(1, 2), F(1, 3)),), (F(2),))
    report = verify_duality(spec, (2,))
    assert report.ok
    at_one = report.comparisons[1]
    assert at_one.index == (1,)
    assert at_one.lhs == at_one.rhs == F(11, 36)


def test_duality_depth_one_is_complement_power():
    spec = NestedSumSpec(((F(2, 7),), (F(-1, 3),)), ())
    report = verify_duality(spec, (3, 3))
    assert report.ok
    rule = c_rule(spec.one_minus())
    for comp in report.comparisons:
        assert comp.rhs == rule(comp.index)


def test_duality_self_dual_at_one_half():
    spec = NestedSumSpec(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2))), (F(5, 3),))
    report = verify_duality(spec, (3, 3))
    assert report.ok
    # one_minus fixes the spec, so the transform reproduces c itself
    rule = c_rule(spec)
    for comp in report.comparisons:
        assert comp.lhs == rule(comp.index)


def test_duality_with_negative_noninteger_shift():
    spec = NestedSumSpec(((F(1, 2), F(2)), (F(-1), F(1, 3))), (F(-3, 2),))
    assert verify_duality(spec, (3, 3)).ok


def test_difference_formula_zero_order_slice():
    spec = NestedSumSpec.parse("0,1", "1")
    report = verify_difference_formula(spec, (3,), (1,))
    assert report.ok
    for comp in report.comparisons:
        n, k = comp.index
        if k == 0:
            assert comp.lhs == c_direct(spec, (n,))


def test_difference_formula_origin_slice_is_duality():
    spec = NestedSumSpec.parse("1/2,-1/3", "3/4")
    diff = verify_difference_formula(spec, (1,), (4,))
    dual = verify_duality(spec, (4,))
    assert diff.ok and dual.ok
    diff_at_origin = {
        comp.index[1]: comp.lhs for comp in diff.comparisons if comp.index[0] == 0
    }
    for comp in dual.comparisons:
        assert diff_at_origin[comp.index[0]] == comp.lhs


def test_difference_formula_explicit_instance():
    report = verify_difference_formula(
        NestedSumSpec(((F(0), F(1)),), (F(1),)), (2,), (2,)
    )
    assert report.ok and len(report.comparisons) == 4


def test_shift_identity_two_slot_product():
    x = F(1, 3)
    spec = NestedSumSpec(((x,), (1 - x,)), ())
    report = verify_shift_identity(spec, (1, 2), 1, (3, 3))
    assert report.ok
    rule = c_rule(spec)
    assert rule((1, 1)) == F(2, 9)
    at_11 = next(c for c in report.comparisons if c.index == (1, 1))
    assert at_11.lhs == at_11.rhs == F(2, 9)


def test_shift_identity_single_slot_constant_block():
    gamma = F(3, 4)
    spec = NestedSumSpec(((gamma, gamma),), (F(2, 3),))
    report = verify_shift_identity(spec, (1,), gamma, (4,))
    assert report.ok
    rule = c_rule(spec)
    for n in range(4):
        assert rule((n + 1,)) == gamma * rule((n,))


def test_shift_identity_on_doubled_spec():
    spec = NestedSumSpec(((F(1, 2), F(-2)), (F(1, 5), F(3))), (F(7, 5),))
    double = spec.doubled()
    for i in range(1, spec.r + 1):
        report = verify_shift_identity(double, (i, spec.r + i), 1, (2, 2, 2, 2))
        assert report.ok


def test_shift_identity_rejects_bad_hypothesis():
    spec = NestedSumSpec(((F(1), F(0)), (F(1), F(1))), (F(1),))
    # column sums are (2, 1): not constant, so no gamma satisfies the hypothesis
    with pytest.raises(ValueError):
        verify_shift_identity(spec, (1, 2), 2, (2, 2))
    with pytest.raises(ValueError):
        verify_shift_identity(spec, (1, 1), 2, (2, 2))
    with pytest.raises(ValueError):
        verify_shift_identity(spec, (0, 1), 2, (2, 2))


def test_duality_reduces_to_single_slot_duality():
    # at r=1 and unit shifts the duality is the classical single-slot one:
    # the transform of kt sums equals kt at complemented parameters
    rng = Random(17)
    for _ in range(5):
        p = rng.randint(1, 3)
        x = tuple(random_rational(rng) for _ in range(p))
        spec = NestedSumSpec((x,), (F(1),) * (p - 1))
        report = verify_duality(spec, (4,))
        assert report.ok
        complement = tuple(1 - v for v in x)
        for comp in report.comparisons:
            assert comp.rhs == kt_value(complement, comp.index[0])


def test_random_shift_configuration_satisfies_hypothesis():
    rng = Random(15)
    for _ in range(20):
        spec, subset, constant = random_shift_configuration(rng, 3, 3)
        for j in range(spec.p):
            assert sum(spec.xblocks[i - 1][j] for i in subset) == constant


def test_random_shift_never_nonpositive_integer():
    rng = Random(16)
    for _ in range(200):
        t = random_shift(rng)
        assert not (t.denominator == 1 and t.numerator <= 0)


def test_report_serializations():
    spec = NestedSumSpec.parse("1/2,1/3", "2")
    report = verify_duality(spec, (2,))
    payload = __import__("json").loads(report.to_json())
    assert payload["ok"] is True
    assert payload["identity"] == "c-duality"
    first = payload["comparisons"][0]
    assert set(first) == {"identity", "spec", "index", "lhs", "rhs", "equal"}
    assert first["lhs"] == "1/2"
    csv_lines = report.to_csv().splitlines()
    assert csv_lines[0] == "identity,spec,index,lhs,rhs,equal"
    assert len(csv_lines) == 1 + len(report.comparisons)
