"""Genus-zero residue recursion: the one-point tables p_{m,a} and their potential.

The recursion determines p_{m,a} degree slice by degree slice: every
right-hand-side term is a product of at least two field factors, each of
degree >= 1, so a degree-d slice only consumes strictly lower slices.  The
potential is integrated back from the table with an exactness check on the
mixed partials, and the primary potential is stamped with associativity
(WDVV) and Euler-homogeneity reports.

All intermediate arithmetic happens in Q(eta); each finished slice is
demoted to Q, which fails loudly if any eta-part survives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct

from .combinatorics import c_const
from .exactnum import Rat, rat_str
from .reporting import CheckReport
from .rootsys import RootData
from .series import LambdaSeries, SparsePoly, Var


def norm_factor(h: int, m: int, a: int) -> int:
    """The slot normalisation -a + (m+1)h relating p_{m,a} to a derivative."""
    return -a + (m + 1) * h


class WellFoundednessError(RuntimeError):
    """A degree slice tried to consume a slice of the same or higher degree."""


@dataclass(frozen=True)
class Profile:
    """Input window: which descendant slots are switched on.

    ``m_in`` is the highest active level; every active slot carries its own
    variable unless ``overrides`` maps it elsewhere.  Overrides must either
    vanish or have zero constant term; constant specialisations would break
    the degree bookkeeping the solver relies on.
    """

    N: int
    m_in: int = 0
    D: int = 6
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        for v, poly in self.overrides.items():
            if not poly.is_zero() and () in poly.terms:
                raise ValueError(f"override for {v} has a constant term")

    def vars(self) -> list[Var]:
        return [Var(m, a) for m in range(self.m_in + 1)
                for a in range(1, self.N + 1)]

    def assignment(self, v: Var) -> SparsePoly:
        if v.m > self.m_in:
            return SparsePoly.zero()
        got = self.overrides.get(v)
        return got if got is not None else SparsePoly.variable(v)

    def identity_vars(self) -> list[Var]:
        return [v for v in self.vars() if v not in self.overrides]


def primary_profile(N: int, D: int) -> Profile:
    """Level-zero window: t_a = x_{0,a} active, all higher levels off."""
    return Profile(N=N, m_in=0, D=D)


def split_n_a0(h: int, a: int, tup: tuple[int, ...]) -> tuple[int, int]:
    """Euclidean split -(a + r + sum(tup)) = n*h + a0 with 0 <= a0 < h."""
    s = -(a + len(tup) + sum(tup))
    a0 = s % h
    return (s - a0) // h, a0


def phi0(rd: RootData, profile: Profile, ptable: dict, a: int,
         tail_max: int | None = None, deg_cap: int | None = None) -> LambdaSeries:
    """The genus-zero field: input slots at lambda^m, table tails at lambda^(-m-1).

    Only tail levels up to ``tail_max`` are materialised; callers pick the
    bound from the residue they are about to extract.
    """
    if tail_max is None:
        tail_max = max((v.m for v in ptable), default=-1)
    getter = _table_getter(ptable)
    return _phi0(rd, profile, getter, a, tail_max, deg_cap)


def _table_getter(ptable: dict):
    def get(m: int, b: int, d: int) -> SparsePoly:
        poly = ptable.get(Var(m, b))
        return poly.homo_part(d) if poly is not None else SparsePoly.zero()
    return get


def _phi0(rd: RootData, profile: Profile, get_slice, a: int,
          tail_max: int, deg_cap: int | None) -> LambdaSeries:
    terms: dict[int, SparsePoly] = {}
    for k in range(profile.m_in + 1):
        poly = profile.assignment(Var(k, a))
        if deg_cap is not None:
            poly = poly.up_to_degree(deg_cap)
        if not poly.is_zero():
            terms[k * rd.h] = poly
    for mp in range(tail_max + 1):
        acc = SparsePoly.zero()
        top = deg_cap if deg_cap is not None else profile.D
        for d in range(2, top + 1):
            acc = acc + get_slice(mp, rd.h - a, d)
        if not acc.is_zero():
            terms[-(mp + 1) * rd.h] = acc
    return LambdaSeries(rd.h, None, terms)


class G0Solver:
    """Memoised slice-by-slice solver for the genus-zero recursion.

    With ``frozen_table`` the solver stops recursing and reads every slice
    from the supplied table instead, which is how a finished table is
    re-checked against the recursion's right side.
    """

    def __init__(self, rd: RootData, profile: Profile, frozen_table: dict | None = None):
        if rd.N != profile.N:
            raise ValueError("profile rank does not match root data")
        self.rd = rd
        self.profile = profile
        self._frozen = _table_getter(frozen_table) if frozen_table is not None else None
        self._slices: dict[tuple[int, int, int], SparsePoly] = {}
        self._stack: set[tuple[int, int, int]] = set()
        self._products: dict = {}

    # -- the recursion -------------------------------------------------------

    def p_slice(self, m: int, a: int, d: int) -> SparsePoly:
        """Degree-d homogeneous slice of p_{m,a}, over Q."""
        if d < 2:
            return SparsePoly.zero()
        if self._frozen is not None:
            return self._frozen(m, a, d)
        key = (m, a, d)
        got = self._slices.get(key)
        if got is not None:
            return got
        if key in self._stack:
            raise WellFoundednessError(f"slice {key} depends on itself")
        self._stack.add(key)
        try:
            value = self._rhs(m, a, d)
        finally:
            self._stack.discard(key)
        self._slices[key] = value
        return value

    def _rhs(self, m: int, a: int, d: int) -> SparsePoly:
        rd = self.rd
        h = rd.h
        acc = SparsePoly.zero(rd.ctx)
        for r in range(1, h):
            for tup in iproduct(range(1, h), repeat=r):
                n, a0 = split_n_a0(h, a, tup)
                if a0 == 0:
                    continue
                coeff = c_const(rd, tup)
                if coeff.is_zero():
                    continue
                # one tail at level m' needs -(m'+1)h >= -(m+n+2)h - r*m_in*h
                tail_max = m + n + 1 + r * self.profile.m_in
                prod = self._slot_product((a0,) + tup, tail_max, d - r, d)
                # residue of (product * lambda^(m+n+1))
                part = prod.coefficient(-(m + n + 2) * h).homo_part(d)
                if part.is_zero():
                    continue
                acc = acc + part.lift(rd.ctx).scale(coeff)
        return (-acc).demote()

    def _slot_product(self, slots: tuple[int, ...], tail_max: int,
                      factor_cap: int, prod_cap: int) -> LambdaSeries:
        key = (tuple(sorted(slots)), tail_max, factor_cap, prod_cap)
        got = self._products.get(key)
        if got is not None:
            return got
        factors = [self._phi(a, tail_max, factor_cap) for a in key[0]]
        prod = factors[0]
        for f in factors[1:]:
            prod = prod.mul_capped(f, prod_cap)
        self._products[key] = prod
        return prod

    def _phi(self, a: int, tail_max: int, deg_cap: int) -> LambdaSeries:
        return _phi0(self.rd, self.profile, self.p_slice, a, tail_max, deg_cap)

    # -- outputs ---------------------------------------------------------------

    def p_poly(self, m: int, a: int) -> SparsePoly:
        acc = SparsePoly.zero()
        for d in range(2, self.profile.D + 1):
            acc = acc + self.p_slice(m, a, d)
        return acc

    def integrate(self) -> SparsePoly:
        """Assemble the potential from its Euler decomposition.

        Homogeneous of degree d: F_d = (1/d) sum_v x_v dF/dx_v.  Valid
        because every tracked slot carries its own variable.
        """
        h = self.rd.h
        acc = SparsePoly.zero()
        for d in range(3, self.profile.D + 1):
            part = SparsePoly.zero()
            for v in self.profile.identity_vars():
                sl = self.p_slice(v.m, v.a, d - 1)
                if not sl.is_zero():
                    part = part + (SparsePoly.variable(v) * sl).scale(
                        Fraction(1, norm_factor(h, v.m, v.a)))
            acc = acc + part.scale(Fraction(1, d))
        return acc

    def exactness_report(self) -> CheckReport:
        """Mixed partials of the table must agree across all tracked pairs."""
        h = self.rd.h
        vs = self.profile.identity_vars()
        for i, v in enumerate(vs):
            pv = self.p_poly(v.m, v.a).scale(Fraction(1, norm_factor(h, v.m, v.a)))
            for w in vs[i + 1:]:
                pw = self.p_poly(w.m, w.a).scale(Fraction(1, norm_factor(h, w.m, w.a)))
                left = pv.diff(w).up_to_degree(self.profile.D - 2)
                right = pw.diff(v).up_to_degree(self.profile.D - 2)
                if left != right:
                    return CheckReport(
                        claim="mixed-partials", passed=False,
                        witness={"pair": [list(v), list(w)]},
                        lhs=left.to_json(), rhs=right.to_json())
        return CheckReport(claim="mixed-partials", passed=True)


@dataclass
class PotentialG0:
    """Solved genus-zero data: potential, table, and verification stamps."""

    rd: RootData
    profile: Profile
    F: SparsePoly
    ptable: dict
    checks: dict

    def to_json(self) -> dict:
        return {
            "n": self.rd.N,
            "h": self.rd.h,
            "genus": 0,
            "degree": self.profile.D,
            "m_in": self.profile.m_in,
            "f": self.F.to_json(),
            "p": {f"{v.m},{v.a}": poly.to_json()
                  for v, poly in sorted(self.ptable.items())},
            "checks": {name: rep.to_json() for name, rep in self.checks.items()},
        }


def rhs_residue(rd: RootData, profile: Profile, ptable: dict,
                m: int, a: int, d: int) -> SparsePoly:
    """Degree-d slice of the recursion's right side, read from a finished table.

    Requires the table to be complete for degrees below d; coefficients are
    demoted to Q and a surviving eta-part raises.
    """
    solver = G0Solver(rd, profile, frozen_table=ptable)
    return solver._rhs(m, a, d)


def solve(rd: RootData, profile: Profile, m_out: int = 0) -> PotentialG0:
    """Run the recursion up to the profile's degree cap and integrate."""
    solver = G0Solver(rd, profile)
    ptable: dict[Var, SparsePoly] = {}
    for m in range(max(m_out, profile.m_in) + 1):
        for a in range(1, rd.N + 1):
            ptable[Var(m, a)] = solver.p_poly(m, a)
    F = solver.integrate()
    checks = {"exactness": solver.exactness_report()}
    if not checks["exactness"].passed:
        raise WellFoundednessError("mixed partials disagree; table is inconsistent")
    if profile.m_in == 0 and not profile.overrides:
        checks["wdvv"] = wdvv_check(rd.N, F, profile.D)
        checks["euler"] = euler_check(rd.N, F)
    return PotentialG0(rd=rd, profile=profile, F=F, ptable=ptable, checks=checks)


# ---------------------------------------------------------------------------
# Structural checks on primary potentials.
# ---------------------------------------------------------------------------

def wdvv_check(N: int, F: SparsePoly, complete_to: int) -> CheckReport:
    """Associativity of the multiplication defined by third derivatives.

    Indices are raised with the flat pairing g_{ab} = delta_{a+b,N+1}; both
    sides are compared exactly through degree ``complete_to - 3``, which is
    the range the truncated potential determines.
    """
    h = N + 1
    dmax = complete_to - 3
    third: dict[tuple[int, int, int], SparsePoly] = {}

    def t3(a: int, b: int, c: int) -> SparsePoly:
        key = tuple(sorted((a, b, c)))
        got = third.get(key)
        if got is None:
            got = F.diff(Var(0, key[0])).diff(Var(0, key[1])).diff(Var(0, key[2]))
            third[key] = got
        return got

    for a in range(1, N + 1):
        for b in range(1, N + 1):
            for c in range(b + 1, N + 1):
                for d in range(1, N + 1):
                    lhs = SparsePoly.zero()
                    rhs = SparsePoly.zero()
                    for e in range(1, N + 1):
                        f = h - e  # dual index under the flat pairing
                        lhs = lhs + t3(a, b, e) * t3(f, c, d)
                        rhs = rhs + t3(a, c, e) * t3(f, b, d)
                    diff = (lhs - rhs).up_to_degree(dmax)
                    if not diff.is_zero():
                        return CheckReport(
                            claim=f"wdvv N={N}", passed=False,
                            witness={"indices": [a, b, c, d]},
                            lhs=lhs.up_to_degree(dmax).to_json(),
                            rhs=rhs.up_to_degree(dmax).to_json())
    return CheckReport(claim=f"wdvv N={N}", passed=True)


def euler_weight(h: int, v: Var) -> Rat:
    """Weight (a+1)/h of a primary variable."""
    if v.m != 0:
        raise ValueError("Euler weights are defined on the primary window")
    return Fraction(v.a + 1, h)


def euler_check(N: int, F: SparsePoly) -> CheckReport:
    """Weighted homogeneity: every monomial has total weight 2 + 2/h."""
    h = N + 1
    target = Fraction(2 * h + 2, h)
    bad = []
    for mono in sorted(F.terms):
        w = sum((euler_weight(h, v) * e for v, e in mono), Fraction(0))
        if w != target:
            bad.append({"monomial": [[list(v), e] for v, e in mono],
                        "weight": rat_str(w)})
    return CheckReport(claim=f"euler N={N} target={rat_str(target)}",
                       passed=not bad, witness=bad or None)
