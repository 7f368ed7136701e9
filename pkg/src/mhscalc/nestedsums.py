"""Parametric nested sums over tuples of weakly decreasing chains.

The central object is the r-slot, depth-p sum

    c[x_1; ...; x_r | t_1..t_{p-1}](n_1, ..., n_r)
      = sum over chains n_i = m_{i1} >= ... >= m_{ip} >= 0 (one per slot)
        of   prod_i M(n_i; v_i1..v_ip) x_i1^{v_i1} ... x_ip^{v_ip}
           / prod_{j<p} [ C(m_1j+...+m_rj + t_j - 1, v_1j+...+v_rj)
                          * (m_1j+...+m_rj + t_j) ]

with v_ij = m_ij - m_i,j+1 (v_ip = m_ip), M a multinomial coefficient, and
C the generalized binomial.  The t_j must avoid {0, -1, -2, ...}: the linear
factor is then never zero, and every generalized-binomial factor is either
positive or a non-integer rational, hence nonzero.

Two independent evaluation routes are provided:

* `c_direct` enumerates the chain tuples of the defining sum (grouping
  summands that share a denominator, which is an exact regrouping);
* `c_recursive` runs the depth-reduction recurrence

      c(n) = [ sum_k x_{k1} n_k c(n - e_k) + c_reduced(n) ] / (|n| + t_1)

  with a write-once memo per depth level, turning the exponential chain
  count into O(p * prod(n_i + 1) * r) rational operations.

The single-slot sums `kt_value` and the two-slot sums `two_index_value`
have their own classical coefficient normalizations; both must (and are
verified to) coincide with `c_direct` at t = 1.

Verifiers at the bottom check, point by point on finite boxes, the duality
(nabla c[x;t] = c[1-x;t]), the difference formula (iterated differences of
c are again c at doubled parameters), and the shift identity for parameter
blocks summing to a constant vector.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Iterator, Sequence

from .errors import GuardExceeded
from .kernel import binomial, gen_binomial, multinomial, format_rational, parse_rational
from .multiseq import SequenceRule, iterated_delta, nabla
from .report import Comparison, VerificationReport

Index = tuple[int, ...]

DEFAULT_SUMMAND_GUARD = 10**7


def _is_nonpositive_integer(value: Fraction) -> bool:
    return value.denominator == 1 and value.numerator <= 0


@dataclass(frozen=True)
class NestedSumSpec:
    """Parameter bundle: r blocks of p rationals plus p-1 shift parameters."""

    xblocks: tuple[tuple[Fraction, ...], ...]
    tparams: tuple[Fraction, ...]

    def __post_init__(self):
        xblocks = tuple(tuple(Fraction(x) for x in block) for block in self.xblocks)
        tparams = tuple(Fraction(t) for t in self.tparams)
        object.__setattr__(self, "xblocks", xblocks)
        object.__setattr__(self, "tparams", tparams)
        if not xblocks:
            raise ValueError("need at least one parameter block")
        p = len(xblocks[0])
        if p < 1:
            raise ValueError("blocks must be nonempty")
        if any(len(block) != p for block in xblocks):
            raise ValueError(f"all blocks must have equal length, got {self.xblocks}")
        if len(tparams) != p - 1:
            raise ValueError(f"need {p - 1} shift parameters for depth {p}, got {len(tparams)}")
        for t in tparams:
            if _is_nonpositive_integer(t):
                raise ValueError(f"shift parameter {t} is a nonpositive integer")

    @property
    def r(self) -> int:
        return len(self.xblocks)

    @property
    def p(self) -> int:
        return len(self.xblocks[0])

    def reduce_depth(self) -> "NestedSumSpec":
        """Drop the first component of every block and the first shift parameter."""
        if self.p < 2:
            raise ValueError("cannot reduce a depth-1 spec")
        return NestedSumSpec(
            tuple(block[1:] for block in self.xblocks),
            self.tparams[1:],
        )

    def one_minus(self) -> "NestedSumSpec":
        """Replace every x by 1 - x; shift parameters unchanged."""
        return NestedSumSpec(
            tuple(tuple(1 - x for x in block) for block in self.xblocks),
            self.tparams,
        )

    def doubled(self) -> "NestedSumSpec":
        """Blocks followed by their 1-x images; 2r slots, same shifts."""
        return NestedSumSpec(
            self.xblocks + self.one_minus().xblocks,
            self.tparams,
        )

    @classmethod
    def parse(cls, xtext: str, ttext: str = "") -> "NestedSumSpec":
        """Parse the CLI grammar: blocks "1/2,1/3;0,1", shifts "2"."""
        xblocks = tuple(
            tuple(parse_rational(item) for item in block.split(","))
            for block in xtext.split(";")
        )
        ttext = ttext.strip()
        tparams = tuple(parse_rational(item) for item in ttext.split(",")) if ttext else ()
        return cls(xblocks, tparams)

    def text(self) -> str:
        xtext = ";".join(",".join(format_rational(x) for x in block) for block in self.xblocks)
        ttext = ",".join(format_rational(t) for t in self.tparams)
        return f"x={xtext} t={ttext}" if ttext else f"x={xtext}"


def enumerate_chains(
    n: int, p: int, chain_guard: int | None = None
) -> Iterator[Index]:
    """All chains n = m_1 >= ... >= m_p >= 0, lexicographically descending.

    Exactly C(n+p-1, p-1) chains are produced.
    """
    if n < 0 or p < 1:
        raise ValueError(f"need natural n and positive p, got ({n}, {p})")
    if chain_guard is not None:
        count = chain_count(n, p)
        if count > chain_guard:
            raise GuardExceeded("chain count", count, chain_guard)

    def tails(bound: int, length: int) -> Iterator[Index]:
        if length == 0:
            yield ()
            return
        for head in range(bound, -1, -1):
            for rest in tails(head, length - 1):
                yield (head,) + rest

    for tail in tails(n, p - 1):
        yield (n,) + tail


def chain_count(n: int, p: int) -> int:
    return binomial(n + p - 1, p - 1)


def direct_summand_count(spec: NestedSumSpec, n: Sequence[int]) -> int:
    """Chain tuples the defining sum runs over at index n."""
    return math.prod(chain_count(ni, spec.p) for ni in n)


def _check_index(spec: NestedSumSpec, n: Sequence[int]) -> Index:
    n = tuple(n)
    if len(n) != spec.r:
        raise ValueError(f"index {n} has arity {len(n)}, spec has {spec.r} slots")
    if any(ni < 0 for ni in n):
        raise ValueError(f"index {n} has negative entries")
    return n


def _block_chain_data(
    block: tuple[Fraction, ...], n: int
) -> list[tuple[Index, Index, Fraction]]:
    """Per chain of one slot: (m-vector, v-vector, multinomial * prod x^v)."""
    p = len(block)
    powers = [[Fraction(1)] for _ in range(p)]
    for j in range(p):
        for _ in range(n):
            powers[j].append(powers[j][-1] * block[j])
    data = []
    for chain in enumerate_chains(n, p):
        nu = tuple(chain[j] - chain[j + 1] for j in range(p - 1)) + (chain[-1],)
        weight = Fraction(multinomial(n, nu))
        for j in range(p):
            weight *= powers[j][nu[j]]
        data.append((chain, nu, weight))
    return data


def c_direct(
    spec: NestedSumSpec,
    n: Sequence[int],
    summand_guard: int = DEFAULT_SUMMAND_GUARD,
) -> Fraction:
    """Evaluate the defining sum by chain enumeration.

    Summands sharing the per-column sums (sum_i m_ij, sum_i v_ij) share a
    denominator, so their numerators are accumulated first and each group is
    divided once.  The set of summands is the defining one; only the order
    of exact rational operations differs.
    """
    n = _check_index(spec, n)
    count = direct_summand_count(spec, n)
    if count > summand_guard:
        raise GuardExceeded("direct summand count", count, summand_guard)
    p = spec.p

    # key: per-column (sum of m_ij, sum of v_ij) for j < p, accumulated over slots
    empty: Index = (0,) * (2 * (p - 1))
    groups: dict[Index, Fraction] = {empty: Fraction(1)}
    for i, block in enumerate(spec.xblocks):
        chains = _block_chain_data(block, n[i])
        merged: dict[Index, Fraction] = {}
        for key, partial in groups.items():
            for chain, nu, weight in chains:
                new_key = tuple(
                    key[2 * j + s] + (chain[j] if s == 0 else nu[j])
                    for j in range(p - 1)
                    for s in (0, 1)
                )
                contribution = partial * weight
                if new_key in merged:
                    merged[new_key] += contribution
                else:
                    merged[new_key] = contribution
        groups = merged

    total = Fraction(0)
    for key, numerator in groups.items():
        denominator = Fraction(1)
        for j in range(p - 1):
            col_m, col_v = key[2 * j], key[2 * j + 1]
            linear = col_m + spec.tparams[j]
            denominator *= gen_binomial(linear - 1, col_v) * linear
        assert denominator != 0, "zero denominator despite shift-parameter invariant"
        total += numerator / denominator
    return total


class RecurrenceEvaluator:
    """Depth-reduction evaluation of c with a write-once memo per level.

    Level 0 is the full spec; level l drops the first l components of every
    block.  Values are filled bottom-up over the box below the requested
    index, so the memo is populated exactly once per (level, index).
    """

    def __init__(self, spec: NestedSumSpec):
        levels = [spec]
        while levels[-1].p > 1:
            levels.append(levels[-1].reduce_depth())
        self._levels = levels
        self._memo: dict[tuple[int, Index], Fraction] = {}
        self.spec = spec

    @property
    def memo_entries(self) -> int:
        return len(self._memo)

    def value(self, n: Sequence[int]) -> Fraction:
        n = _check_index(self.spec, n)
        key = (0, n)
        if key not in self._memo:
            self._fill(n)
        return self._memo[key]

    def _fill(self, corner: Index) -> None:
        memo = self._memo
        r = self.spec.r
        box = list(itertools.product(*(range(c + 1) for c in corner)))
        depth1 = self._levels[-1]
        base_level = len(self._levels) - 1
        powers = [
            [Fraction(1)] for _ in range(r)
        ]
        for i in range(r):
            for _ in range(corner[i]):
                powers[i].append(powers[i][-1] * depth1.xblocks[i][0])
        for m in box:
            key = (base_level, m)
            if key not in memo:
                value = Fraction(1)
                for i in range(r):
                    value *= powers[i][m[i]]
                memo[key] = value
        for level in range(base_level - 1, -1, -1):
            lspec = self._levels[level]
            t1 = lspec.tparams[0]
            x1 = [block[0] for block in lspec.xblocks]
            for m in box:
                key = (level, m)
                if key in memo:
                    continue
                total = memo[(level + 1, m)]
                for k in range(r):
                    if m[k]:
                        below = m[:k] + (m[k] - 1,) + m[k + 1:]
                        total += x1[k] * m[k] * memo[(level, below)]
                memo[key] = total / (sum(m) + t1)


def c_recursive(spec: NestedSumSpec, n: Sequence[int]) -> Fraction:
    """One-shot recurrence evaluation; reuse a RecurrenceEvaluator for sweeps."""
    return RecurrenceEvaluator(spec).value(n)


def c_rule(
    spec: NestedSumSpec,
    method: str = "direct",
    summand_guard: int = DEFAULT_SUMMAND_GUARD,
) -> SequenceRule:
    """c as a memoized arity-r sequence rule, backed by the chosen evaluator."""
    if method == "direct":
        return SequenceRule(spec.r, lambda idx: c_direct(spec, idx, summand_guard))
    if method == "recursive":
        evaluator = RecurrenceEvaluator(spec)
        return SequenceRule(spec.r, evaluator.value)
    raise ValueError(f"unknown method {method!r}")


def kt_value(
    x: Sequence[Fraction | int],
    n: int,
    chain_guard: int = DEFAULT_SUMMAND_GUARD,
) -> Fraction:
    """Single-slot parametric sum with harmonic denominators.

    sum over chains n = m_1 >= ... >= m_p >= 0 of
    x_1^{m_1-m_2} ... x_{p-1}^{m_{p-1}-m_p} x_p^{m_p} / ((m_1+1)...(m_{p-1}+1)).

    Coincides with c_direct at r = 1 and all shifts equal to 1; the direct
    formula here keeps that a genuine cross-check.
    """
    x = tuple(Fraction(v) for v in x)
    p = len(x)
    if p < 1:
        raise ValueError("need at least one parameter")
    if n < 0:
        raise ValueError(f"n must be a natural, got {n}")
    total = Fraction(0)
    for chain in enumerate_chains(n, p, chain_guard):
        term = Fraction(1)
        for j in range(p - 1):
            term *= x[j] ** (chain[j] - chain[j + 1])
        term *= x[-1] ** chain[-1]
        denom = 1
        for j in range(p - 1):
            denom *= chain[j] + 1
        total += term / denom
    return total


def two_index_value(
    x: Sequence[Fraction | int],
    y: Sequence[Fraction | int],
    n: int,
    k: int,
    chain_guard: int = DEFAULT_SUMMAND_GUARD,
) -> Fraction:
    """Two-slot sum with the inverse-binomial coefficient normalization.

    The coefficient is
        C(n+k, n)^{-1} * prod_{j<p} C(v_j + w_j, v_j) * C(m_p + l_p, m_p)
    over chain pairs (m, l), with denominators (m_j + l_j + 1) for j < p.
    Coincides with c_direct at r = 2 and shifts equal to 1, which is exactly
    the requirement pinning the general coefficient.
    """
    x = tuple(Fraction(v) for v in x)
    y = tuple(Fraction(v) for v in y)
    if len(x) != len(y):
        raise ValueError("parameter vectors must share a depth")
    p = len(x)
    if n < 0 or k < 0:
        raise ValueError(f"indices must be naturals, got ({n}, {k})")
    if chain_count(n, p) * chain_count(k, p) > chain_guard:
        raise GuardExceeded(
            "chain-pair count", chain_count(n, p) * chain_count(k, p), chain_guard
        )
    lead = Fraction(1, binomial(n + k, n))
    total = Fraction(0)
    for m in enumerate_chains(n, p):
        nu = tuple(m[j] - m[j + 1] for j in range(p - 1)) + (m[-1],)
        xterm = Fraction(1)
        for j in range(p):
            xterm *= x[j] ** nu[j]
        for l in enumerate_chains(k, p):
            kappa = tuple(l[j] - l[j + 1] for j in range(p - 1)) + (l[-1],)
            coeff = binomial(m[-1] + l[-1], m[-1])
            for j in range(p - 1):
                coeff *= binomial(nu[j] + kappa[j], nu[j])
            term = lead * coeff * xterm
            for j in range(p):
                term *= y[j] ** kappa[j]
            denom = 1
            for j in range(p - 1):
                denom *= m[j] + l[j] + 1
            total += term / denom
    return total


# --- identity verifiers ----------------------------------------------------

C_DUALITY_STATEMENT = (
    "sum_{0<=k<=n} (-1)^{|k|} prod_i C(n_i,k_i) c[x|t](k) = c[1-x|t](n)"
)
DIFFERENCE_STATEMENT = "(delta_1^{k_1}...delta_r^{k_r} c[x|t])(n) = c[x,1-x|t](n,k)"
SHIFT_STATEMENT = (
    "sum_{i in S} c[x|t](n+e_i) = gamma * c[x|t](n)  when sum_{i in S} x_i = (gamma,...,gamma)"
)
RECURRENCE_STATEMENT = "depth-reduction recurrence equals direct chain enumeration"


def _box(extents: Sequence[int]) -> Iterator[Index]:
    if any(extent < 1 for extent in extents):
        raise ValueError(f"box extents must be >= 1, got {tuple(extents)}")
    return itertools.product(*(range(extent) for extent in extents))


def verify_duality(
    spec: NestedSumSpec,
    box: Sequence[int],
    summand_guard: int = DEFAULT_SUMMAND_GUARD,
) -> VerificationReport:
    """Check nabla c[x|t] = c[1-x|t] pointwise on the box."""
    box = tuple(box)
    if len(box) != spec.r:
        raise ValueError(f"box {box} does not match {spec.r} slots")
    rule = c_rule(spec, "direct", summand_guard)
    transformed = nabla(rule)
    dual = spec.one_minus()
    label = spec.text()
    report = VerificationReport("c-duality", C_DUALITY_STATEMENT, [])
    for n in _box(box):
        report.comparisons.append(
            Comparison(
                identity="c-duality",
                spec=label,
                index=n,
                lhs=transformed(n),
                rhs=c_direct(dual, n, summand_guard),
            )
        )
    return report


def verify_difference_formula(
    spec: NestedSumSpec,
    nbox: Sequence[int],
    kbox: Sequence[int],
    summand_guard: int = DEFAULT_SUMMAND_GUARD,
) -> VerificationReport:
    """Check that iterated differences of c are c at doubled parameters.

    LHS runs the alternating-sum formula for iterated differences over
    direct c values; RHS enumerates the 2r-slot doubled spec at (n, k).
    """
    nbox, kbox = tuple(nbox), tuple(kbox)
    if len(nbox) != spec.r or len(kbox) != spec.r:
        raise ValueError(f"boxes {nbox}, {kbox} must match {spec.r} slots")
    rule = c_rule(spec, "direct", summand_guard)
    double = spec.doubled()
    label = spec.text()
    report = VerificationReport("difference-formula", DIFFERENCE_STATEMENT, [])
    for n in _box(nbox):
        for k in _box(kbox):
            report.comparisons.append(
                Comparison(
                    identity="difference-formula",
                    spec=label,
                    index=n + k,
                    lhs=iterated_delta(rule, k, n),
                    rhs=c_direct(double, n + k, summand_guard),
                )
            )
    return report


def verify_shift_identity(
    spec: NestedSumSpec,
    subset: Sequence[int],
    constant: Fraction | int,
    box: Sequence[int],
    summand_guard: int = DEFAULT_SUMMAND_GUARD,
) -> VerificationReport:
    """Check sum_{i in subset} c(n+e_i) = constant * c(n) on the box.

    `subset` holds distinct 1-based slot numbers whose blocks must sum to
    the constant vector (the identity's hypothesis, enforced here).
    """
    box = tuple(box)
    if len(box) != spec.r:
        raise ValueError(f"box {box} does not match {spec.r} slots")
    subset = tuple(subset)
    constant = Fraction(constant)
    if len(set(subset)) != len(subset):
        raise ValueError(f"subset {subset} has repeated slots")
    if any(not 1 <= i <= spec.r for i in subset):
        raise ValueError(f"subset {subset} outside slots 1..{spec.r}")
    for j in range(spec.p):
        column = sum(spec.xblocks[i - 1][j] for i in subset)
        if column != constant:
            raise ValueError(
                f"hypothesis violated: component {j + 1} of the subset sum is "
                f"{format_rational(column)}, expected {format_rational(constant)}"
            )
    rule = c_rule(spec, "direct", summand_guard)
    label = f"{spec.text()} S={subset} gamma={format_rational(constant)}"
    report = VerificationReport("shift", SHIFT_STATEMENT, [])
    for n in _box(box):
        lhs = Fraction(0)
        for i in subset:
            shifted = n[: i - 1] + (n[i - 1] + 1,) + n[i:]
            lhs += rule(shifted)
        report.comparisons.append(
            Comparison(
                identity="shift",
                spec=label,
                index=n,
                lhs=lhs,
                rhs=constant * rule(n),
            )
        )
    return report


def verify_recurrence(
    spec: NestedSumSpec,
    box: Sequence[int],
    summand_guard: int = DEFAULT_SUMMAND_GUARD,
) -> VerificationReport:
    """Check c_recursive = c_direct pointwise on the box."""
    box = tuple(box)
    if len(box) != spec.r:
        raise ValueError(f"box {box} does not match {spec.r} slots")
    evaluator = RecurrenceEvaluator(spec)
    label = spec.text()
    report = VerificationReport("recurrence", RECURRENCE_STATEMENT, [])
    for n in _box(box):
        report.comparisons.append(
            Comparison(
                identity="recurrence",
                spec=label,
                index=n,
                lhs=evaluator.value(n),
                rhs=c_direct(spec, n, summand_guard),
            )
        )
    return report


# --- seeded random parameter grids ------------------------------------------

def random_rational(rng: Random, bound: int = 9) -> Fraction:
    """Small rational with |numerator| and denominator bounded by `bound`."""
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_shift(rng: Random, bound: int = 9) -> Fraction:
    """Small rational outside {0, -1, -2, ...}; negative non-integers allowed."""
    while True:
        t = random_rational(rng, bound)
        if not _is_nonpositive_integer(t):
            return t


def random_spec(
    rng: Random,
    max_r: int,
    max_p: int,
    bound: int = 9,
) -> NestedSumSpec:
    r = rng.randint(1, max_r)
    p = rng.randint(1, max_p)
    xblocks = tuple(
        tuple(random_rational(rng, bound) for _ in range(p)) for _ in range(r)
    )
    tparams = tuple(random_shift(rng, bound) for _ in range(p - 1))
    return NestedSumSpec(xblocks, tparams)


def random_shift_configuration(
    rng: Random,
    max_r: int,
    max_p: int,
    bound: int = 9,
) -> tuple[NestedSumSpec, tuple[int, ...], Fraction]:
    """Spec plus subset and constant satisfying the shift hypothesis.

    The final subset slot is solved for, so the subset sums to the constant
    vector by construction.
    """
    r = rng.randint(2, max(2, max_r))
    p = rng.randint(1, max_p)
    q = rng.randint(2, r)
    subset = tuple(sorted(rng.sample(range(1, r + 1), q)))
    constant = random_rational(rng, bound)
    blocks: list[tuple[Fraction, ...]] = [
        tuple(random_rational(rng, bound) for _ in range(p)) for _ in range(r)
    ]
    last = subset[-1]
    solved = tuple(
        constant - sum(blocks[i - 1][j] for i in subset[:-1])
        for j in range(p)
    )
    blocks[last - 1] = solved
    tparams = tuple(random_shift(rng, bound) for _ in range(p - 1))
    return NestedSumSpec(tuple(blocks), tparams), subset, constant
