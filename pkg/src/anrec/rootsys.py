"""Type-A root system data at the origin of the deformation space.

The rank-N lattice comes with two bases: the vanishing-cycle coordinates
chi_1, ..., chi_h (h = N + 1, linearly dependent through sum(chi) = 0) and
the gamma-basis gamma_1, ..., gamma_N with chi_i = sum_a eta^(-i*a) gamma_a.
States of the symmetric algebra are stored in the gamma-basis, which avoids
quotienting by the chi-relation; chi-expansion is a conversion only.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, combinations_with_replacement

from .exactnum import CycContext, CycScalar, Rat, cyc_context

HVector = tuple  # gamma-coefficients, index a-1 for a = 1..N


class RootData:
    """Rank, Coxeter number h = N + 1, cyclotomic context, and caches."""

    __slots__ = ("N", "h", "ctx", "_cc", "_sym", "_cb", "_kernel", "_cfac")

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("rank must be >= 1")
        self.N = N
        self.h = N + 1
        self.ctx = cyc_context(self.h)
        self._cc: dict = {}      # c_const cache
        self._sym: dict = {}     # sym_c cache
        self._cb: dict = {}      # c_bracket cache
        self._kernel: dict = {}  # recursion kernel scalar cache
        self._cfac: list | None = None

    def eta(self, k: int) -> CycScalar:
        return self.ctx.eta_pow(k)

    def __repr__(self) -> str:
        return f"RootData(N={self.N})"


def chi(rd: RootData, i: int) -> HVector:
    """The vanishing-cycle coordinate chi_i in gamma-coefficients."""
    if not 1 <= i <= rd.h:
        raise ValueError(f"chi index {i} out of range 1..{rd.h}")
    return tuple(rd.eta(-i * a) for a in range(1, rd.N + 1))


def pairing(rd: RootData, u: HVector, v: HVector) -> CycScalar:
    """Invariant bilinear form, extended from (chi_i|chi_j) = -1/h + delta_ij.

    On the gamma-basis the Gram matrix is (gamma_a|gamma_b) = delta_{a+b,h}/h.
    """
    if len(u) != rd.N or len(v) != rd.N:
        raise ValueError("vectors must have gamma-length N")
    acc = rd.ctx.zero
    for a in range(1, rd.N + 1):
        b = rd.h - a
        acc = acc + u[a - 1] * v[b - 1]
    return acc * Fraction(1, rd.h)


class SymState:
    """Element of the symmetric algebra on the gamma-basis.

    Keys are weakly increasing tuples of gamma-indices; values are nonzero
    cyclotomic coefficients.
    """

    __slots__ = ("rd", "terms")

    def __init__(self, rd: RootData, terms: dict[tuple[int, ...], CycScalar] | None = None):
        self.rd = rd
        self.terms = {k: v for k, v in (terms or {}).items() if not v.is_zero()}

    def add_term(self, key: tuple[int, ...], c: CycScalar) -> None:
        acc = self.terms.get(key)
        c = c if acc is None else acc + c
        if c.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = c

    def scale(self, c) -> "SymState":
        out = SymState(self.rd)
        for k, v in self.terms.items():
            out.add_term(k, v * c)
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymState):
            return NotImplemented
        return self.rd.h == other.rd.h and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*g{''.join(str(a) for a in k)}"
                          for k, c in sorted(self.terms.items()))

    def to_json(self) -> dict:
        return {"h": self.rd.h,
                "terms": [{"gammas": list(k), "coeff": c.to_json()}
                          for k, c in sorted(self.terms.items())]}


def elem_sym_state(rd: RootData, r: int) -> SymState:
    """The degree-r elementary symmetric polynomial in chi_1..chi_h,
    expanded into gamma-monomials.
    """
    if not 1 <= r <= rd.h:
        raise ValueError(f"r = {r} out of range 1..{rd.h}")
    out = SymState(rd)
    for subset in combinations(range(1, rd.h + 1), r):
        # multiply the chi_i factors one by one, tracking sorted multisets
        acc: dict[tuple[int, ...], CycScalar] = {(): rd.ctx.one}
        for i in subset:
            new: dict[tuple[int, ...], CycScalar] = {}
            for key, c in acc.items():
                for b in range(1, rd.N + 1):
                    k2 = tuple(sorted(key + (b,)))
                    c2 = c * rd.eta(-i * b)
                    prev = new.get(k2)
                    c2 = c2 if prev is None else prev + c2
                    if c2.is_zero():
                        new.pop(k2, None)
                    else:
                        new[k2] = c2
            acc = new
        for key, c in acc.items():
            out.add_term(key, c)
    return out


def cbracket_state(rd: RootData, r: int) -> SymState:
    """The bracket-coefficient expansion of the same state.

    Sums h * C[b_1..b_r] gamma_{b_1}...gamma_{b_r} over weakly increasing
    tuples with sum(b) = 0 mod h.  The factor h is the lattice-averaging
    constant that relates gamma-monomial sums to chi-monomial sums; with it
    the result coincides exactly with :func:`elem_sym_state`.
    """
    if not 2 <= r <= rd.h:
        raise ValueError(f"r = {r} out of range 2..{rd.h}")
    from .combinatorics import c_bracket

    out = SymState(rd)
    for tup in combinations_with_replacement(range(1, rd.N + 1), r):
        if sum(tup) % rd.h:
            continue
        out.add_term(tup, c_bracket(rd, tup) * rd.h)
    return out


def vandermonde_coeff(rd: RootData, indices: tuple[int, ...]) -> CycScalar:
    """sum_s eta^(i_s (r-1)) / prod_{t != s} (eta^(i_s) - eta^(i_t)).

    The cofactor expansion of a Vandermonde determinant in the roots of
    unity; the value is 1 for every strictly increasing index tuple.
    """
    if len(set(indices)) != len(indices):
        raise ValueError("indices must be distinct")
    r = len(indices)
    acc = rd.ctx.zero
    for s in range(r):
        denom = rd.ctx.one
        for t in range(r):
            if t != s:
                denom = denom * (rd.eta(indices[s]) - rd.eta(indices[t]))
        acc = acc + rd.eta(indices[s] * (r - 1)) * denom.inv()
    return acc
