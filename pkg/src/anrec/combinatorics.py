"""Cyclotomic tuple constants and their combinatorial identities.

The basic quantity is

    C(a_1, ..., a_r) = sum over 1 <= j_1 < ... < j_r <= h-1 of
                       prod_s eta^(-j_s a_s) / (1 - eta^(j_s)),

an order-dependent sum over strictly increasing index tuples (empty tuple
gives 1, and the value is 0 once r > h - 1).  SymC symmetrises C over the
distinct permutations of a multiset, and the bracket constant C[...] removes
one copy of each distinct value:

    C[b] = 1,   C[a_0, ..., a_r] = sum over distinct values v of
                                   SymC(tuple minus one copy of v).

The verifiers in this module machine-check three identities satisfied by
these constants: the removal rule for trailing top-index entries, and two
generating-function identities in an auxiliary variable Y.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, permutations

from .exactnum import CycScalar, Rat
from .reporting import CheckReport
from .rootsys import RootData
from .series import YPoly


def _factor_table(rd: RootData) -> list[list[CycScalar]]:
    # cfac[j][a] = eta^(-j a) / (1 - eta^j) for 1 <= j <= h-1, 1 <= a <= h-1
    if rd._cfac is None:
        table: list[list[CycScalar]] = [[]]
        for j in range(1, rd.h):
            inv = (rd.ctx.one - rd.eta(j)).inv()
            table.append([rd.ctx.zero] + [rd.eta(-j * a) * inv for a in range(1, rd.h)])
        rd._cfac = table
    return rd._cfac


def c_const(rd: RootData, tup: tuple[int, ...]) -> CycScalar:
    """The ordered tuple constant C(a_1, ..., a_r)."""
    tup = tuple(tup)
    got = rd._cc.get(tup)
    if got is not None:
        return got
    for a in tup:
        if not 1 <= a <= rd.h - 1:
            raise ValueError(f"tuple entry {a} out of range 1..{rd.h - 1}")
    r = len(tup)
    if r == 0:
        value = rd.ctx.one
    elif r > rd.h - 1:
        value = rd.ctx.zero  # no strictly increasing index tuples exist
    else:
        fac = _factor_table(rd)
        acc = rd.ctx.zero
        for js in combinations(range(1, rd.h), r):
            prod = fac[js[0]][tup[0]]
            for s in range(1, r):
                prod = prod * fac[js[s]][tup[s]]
            acc = acc + prod
        value = acc
    rd._cc[tup] = value
    return value


def _distinct_permutations(tup: tuple[int, ...]):
    # small tuples only; dedupe through a set of seen arrangements
    seen = set()
    for p in permutations(tup):
        if p not in seen:
            seen.add(p)
            yield p


def sym_c(rd: RootData, tup: tuple[int, ...]) -> CycScalar:
    """Symmetrised constant: the sum of C over distinct arrangements.

    Equals the 1/|Aut|-normalised sum over the full symmetric group.
    """
    key = tuple(sorted(tup))
    got = rd._sym.get(key)
    if got is not None:
        return got
    if len(key) > rd.h - 1:
        value = rd.ctx.zero
    else:
        acc = rd.ctx.zero
        for p in _distinct_permutations(key):
            acc = acc + c_const(rd, p)
        value = acc
    rd._sym[key] = value
    return value


def c_bracket(rd: RootData, tup: tuple[int, ...]) -> CycScalar:
    """The bracket constant over a weakly increasing tuple."""
    tup = tuple(tup)
    if any(tup[i] > tup[i + 1] for i in range(len(tup) - 1)):
        raise ValueError("bracket tuple must be weakly increasing")
    if not tup:
        raise ValueError("bracket tuple must be non-empty")
    for a in tup:
        if not 1 <= a <= rd.N:
            raise ValueError(f"entry {a} out of range 1..{rd.N}")
    got = rd._cb.get(tup)
    if got is not None:
        return got
    if len(tup) > rd.h:
        value = rd.ctx.zero
    elif len(tup) == 1:
        value = rd.ctx.one
    else:
        acc = rd.ctx.zero
        for v in sorted(set(tup)):
            rest = list(tup)
            rest.remove(v)
            acc = acc + sym_c(rd, tuple(rest))
        value = acc
    rd._cb[tup] = value
    return value


# ---------------------------------------------------------------------------
# Identity verifiers.  Each evaluates both sides exactly and reports.
# ---------------------------------------------------------------------------

def verify_remove_n(rd: RootData, b: tuple[int, ...], m: int) -> CheckReport:
    """Removal rule for m trailing copies of the top index N:

        C[b..., N^m] = (-1)^m * binom(sum(b) mod h, m) * C[b...]
    """
    b = tuple(b)
    if any(not 1 <= x <= rd.N - 1 for x in b):
        raise ValueError("entries must lie in 1..N-1")
    lhs = c_bracket(rd, tuple(sorted(b)) + (rd.N,) * m)
    res = sum(b) % rd.h
    coeff = Fraction((-1) ** m) * math.comb(res, m) if m <= res else Fraction(0)
    rhs = c_bracket(rd, tuple(sorted(b))) * coeff
    return CheckReport(
        claim=f"remove-top-index h={rd.h} b={list(b)} m={m}",
        passed=lhs == rhs, lhs=lhs.to_json(), rhs=rhs.to_json())


def _geometric_y(rd: RootData) -> YPoly:
    # (1 - Y^h) / (1 - Y) = 1 + Y + ... + Y^(h-1)
    return YPoly(rd.ctx, [rd.ctx.one] * rd.h)


def _one_minus_y(rd: RootData) -> YPoly:
    return YPoly(rd.ctx, [rd.ctx.one, -rd.ctx.one])


def _compositions(total: int, parts: int, minimum: int = 0):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def verify_symc_generating(rd: RootData, a: tuple[int, ...],
                           ycap: int | None = None) -> CheckReport:
    """Generating identity for SymC with trailing top-index entries:

        |Aut(a)| * sum_m SymC(a..., N^m) (1-Y)^m
          = (1+Y+...+Y^(h-1))/h * sum over k >= 0 and ordered distinct
            index sequences I of length r in 1..N of
            prod_j eta^(-i_j (a_j - k_j)) * Y^(k_1+...+k_r).

    The right side sums ordered index sequences, which counts each matching
    of repeated entries of ``a`` once per arrangement, hence the |Aut(a)|
    multiplicity on the left.  The left side is a polynomial (SymC dies once
    the tuple outgrows h-1); the right side is compared as a truncated
    Y-series up to ``ycap``, whose default exceeds the left side's degree,
    certifying the degree bound too.
    """
    a = tuple(a)
    r = len(a)
    if r < 1 or any(not 1 <= x <= rd.N - 1 for x in a):
        raise ValueError("entries must lie in 1..N-1, tuple non-empty")
    if ycap is None:
        ycap = r + rd.h + 2

    aut = 1
    for v in set(a):
        aut *= math.factorial(a.count(v))
    lhs = YPoly.zero(rd.ctx)
    shrink = _one_minus_y(rd)
    pw = YPoly.constant(rd.ctx, rd.ctx.one)
    for m in range(0, rd.h - r):  # SymC vanishes for total length > h-1
        lhs = lhs + pw.scale(sym_c(rd, tuple(sorted(a)) + (rd.N,) * m) * aut)
        pw = pw * shrink

    # sum over k-tuples factorises per slot into the geometric series
    # sum_k eta^(i k) Y^k, so each ordered index sequence costs one
    # truncated convolution instead of a composition scan
    coeffs = [rd.ctx.zero] * (ycap + 1)
    for iseq in permutations(range(1, rd.N + 1), r):
        pref = rd.ctx.one
        series = [rd.ctx.one] + [rd.ctx.zero] * ycap
        for ij, aj in zip(iseq, a):
            pref = pref * rd.eta(-ij * aj)
            geom = [rd.eta(ij * k) for k in range(ycap + 1)]
            new = [rd.ctx.zero] * (ycap + 1)
            for s1, c1 in enumerate(series):
                if c1.is_zero():
                    continue
                for s2 in range(ycap + 1 - s1):
                    new[s1 + s2] = new[s1 + s2] + c1 * geom[s2]
            series = new
        for s in range(ycap + 1):
            coeffs[s] = coeffs[s] + pref * series[s]
    rhs = (_geometric_y(rd) * YPoly(rd.ctx, coeffs)).truncate(ycap)
    rhs = rhs.scale(Fraction(1, rd.h))

    lhs_t = lhs.truncate(ycap)
    return CheckReport(
        claim=f"symc-generating h={rd.h} a={list(a)} ycap={ycap}",
        passed=lhs_t == rhs, lhs=lhs_t.to_json(), rhs=rhs.to_json())


def verify_cbracket_generating(rd: RootData, a: tuple[int, ...]) -> CheckReport:
    """Generating identity for the bracket constant:

        sum_m C[a..., N^m] (1-Y)^m = Y^(sum(a) mod h) * C[a...]
    """
    a = tuple(a)
    if not a or any(not 1 <= x <= rd.N - 1 for x in a):
        raise ValueError("entries must lie in 1..N-1, tuple non-empty")
    lhs = YPoly.zero(rd.ctx)
    shrink = _one_minus_y(rd)
    pw = YPoly.constant(rd.ctx, rd.ctx.one)
    for m in range(0, rd.h - len(a) + 1):  # bracket dies past length h
        lhs = lhs + pw.scale(c_bracket(rd, tuple(sorted(a)) + (rd.N,) * m))
        pw = pw * shrink
    rhs = YPoly.y_power(rd.ctx, sum(a) % rd.h,
                        c_bracket(rd, tuple(sorted(a))))
    return CheckReport(
        claim=f"cbracket-generating h={rd.h} a={list(a)}",
        passed=lhs == rhs, lhs=lhs.to_json(), rhs=rhs.to_json())
