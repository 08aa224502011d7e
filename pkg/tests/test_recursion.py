"""Higher-genus engine: fields, propagators, correlators, residuals, kernels."""

from fractions import Fraction

import pytest

from kdv_oracle import free_energy_coefficient, psi_correlator

from anrec.genus0 import Profile, solve
from anrec.recursion import (
    ConsistencyError,
    DescendantSolver,
    dilaton_shift,
    gamma_propagator,
    kernel_denominator,
    kernel_monomials,
    kernel_numerator,
    propagator,
    rebuilt_kernel_scalar,
    solve_recursion,
    recursion_kernel_scalar,
    w_residual,
    wick_operator,
    x_field,
)
from anrec.rootsys import RootData, chi, pairing
from anrec.series import SparsePoly, Var


def x(m, a):
    return SparsePoly.variable(Var(m, a))


# -- fields and propagators ---------------------------------------------------

def test_x_field_h2():
    rd = RootData(1)
    terms = x_field(rd, 1)
    assert len(terms) == 1
    assert terms[0].coeff == -rd.ctx.one and terms[0].qshift == -1
    terms2 = x_field(rd, 2)
    assert terms2[0].coeff == rd.ctx.one


def test_x_field_label_sum_vanishes():
    rd = RootData(3)
    for a_idx in range(rd.N):
        total = rd.ctx.zero
        for j in range(1, rd.h + 1):
            total = total + x_field(rd, j)[a_idx].coeff
        assert total.is_zero()


def test_x_field_top_label_unit_weights():
    rd = RootData(3)
    assert all(t.coeff == rd.ctx.one for t in x_field(rd, 4))


def test_field_symbol_modes():
    from anrec.recursion import FieldSymbol
    f = FieldSymbol(4, 1)
    assert f.x_mode(2) == (8, Var(2, 1))
    q, factor, target = f.d_mode(1)
    assert (q, factor, target) == (-8, 5, Var(1, 3))


def test_propagator_values():
    rd = RootData(1)
    assert propagator(rd, 1, 2).value == rd.ctx.from_rat(Fraction(-1, 4))
    rd4 = RootData(3)
    assert propagator(rd4, 1, 3).value == rd4.ctx.from_rat(Fraction(-1, 4))
    for (i, j) in [(1, 2), (2, 4), (1, 4)]:
        assert propagator(rd4, i, j).value == propagator(rd4, j, i).value
    with pytest.raises(ValueError):
        propagator(rd4, 2, 2)


def test_gamma_propagator_expands_to_label_propagator():
    # bilinear expansion over chi = sum eta^(-ia) gamma_a matches the
    # closed-form label propagator
    for N in (1, 2, 3, 4):
        rd = RootData(N)
        for i in range(1, rd.h + 1):
            for j in range(1, rd.h + 1):
                if i == j:
                    continue
                acc = rd.ctx.zero
                for a in range(1, rd.N + 1):
                    for b in range(1, rd.N + 1):
                        q = gamma_propagator(rd, a, b)
                        if not q.is_zero():
                            acc = acc + rd.eta(-i * a - j * b) * q
                assert acc == propagator(rd, i, j).value


def _pair_count(r: int) -> int:
    # telephone numbers: involutions of r labels
    import math
    total = 0
    for s in range(r // 2 + 1):
        total += math.factorial(r) // (math.factorial(s) * 2 ** s
                                       * math.factorial(r - 2 * s))
    return total


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_wick_term_counts(r):
    rd = RootData(5)
    op = wick_operator(rd, tuple(range(1, r + 1)))
    assert len(op.terms) == _pair_count(r)
    # terms partition into pairing sizes
    assert sum(1 for pairs, rest in op.terms if not pairs) == 1
    if r >= 2:
        assert sum(1 for pairs, _ in op.terms if len(pairs) == 1) \
            == r * (r - 1) // 2


def test_wick_operator_rejects_repeats():
    rd = RootData(3)
    with pytest.raises(ValueError):
        wick_operator(rd, (1, 1, 2))


# -- correlators ---------------------------------------------------------------

def test_omega_two_fields_genus0_is_input_square():
    # at degree <= 2 only the input parts of both fields survive
    rd = RootData(1)
    s = DescendantSolver(rd, m_in=0)
    om = s.omega((1, 2), 0, 2)
    assert list(om.terms) == [-2]
    assert om.coefficient(-2) == (x(0, 1) * x(0, 1)).scale(-1)


def test_omega_propagator_enters_one_genus_up():
    rd = RootData(1)
    s = DescendantSolver(rd, m_in=0)
    om1 = s.omega((1, 2), 1, 0)
    # the pure pairing term sits at lambda^(-2), genus one, degree zero
    assert om1.coefficient(-4) == SparsePoly.constant(Fraction(-1, 4))


def test_omega_cross_checks_against_genus0_engine():
    # field product structure: - lambda^(-1) (t + sum p_m lambda^(-m-1))^2
    rd = RootData(1)
    s = DescendantSolver(rd, m_in=0)
    om = s.omega((1, 2), 0, 4)
    pot = solve(rd, Profile(N=1, m_in=0, D=5), m_out=3)
    t = x(0, 1)
    p = {m: pot.ptable[Var(m, 1)] for m in range(4)}
    # coefficient at lambda^(-1): 2 t p_0
    assert om.coefficient(-4) == (t * p[0]).scale(-2)
    # coefficient at lambda^(-2): 2 t p_1 + p_0^2
    assert om.coefficient(-6) == ((t * p[1]).scale(2) + p[0] * p[0]).scale(-1)


def test_w_slices_match_genus0_engine():
    from anrec.genus0 import norm_factor
    for N in (1, 2, 3):
        rd = RootData(N)
        s = DescendantSolver(rd, m_in=0)
        pot = solve(rd, Profile(N=N, m_in=0, D=5), m_out=2)
        for (m, a) in [(0, 1), (1, 1), (2, min(2, N))]:
            for d in (2, 3, 4):
                got = s.w_slice(0, (Var(m, a),), d).scale(
                    Fraction(norm_factor(rd.h, m, a)))
                assert got == pot.ptable[Var(m, a)].homo_part(d)


def test_w_slice_mixed_partial_symmetry():
    rd = RootData(2)
    s = DescendantSolver(rd, m_in=1)
    v, w = Var(0, 1), Var(1, 2)
    for d in (1, 2, 3):
        assert s.w_slice(0, (v,), d + 1).diff(w) == s.w_slice(0, (w,), d + 1).diff(v)
    # derivative of a one-point slice in a tracked direction equals the
    # two-point slice
    got = s.w_slice(0, (v, w), 2)
    assert got == s.w_slice(0, (v,), 3).diff(w)


def test_genus1_anchor_one_twentyfourth():
    rd = RootData(1)
    s = DescendantSolver(rd, m_in=0)
    assert s.w_slice(1, (Var(1, 1),), 0) == SparsePoly.constant(Fraction(1, 24))


def test_solve_matches_direct_engine_and_a1_cubic():
    table = solve_recursion(RootData(1), 0, 5, m_in=0)
    assert table.potentials[0] == (x(0, 1) ** 3).scale(Fraction(1, 6))
    # cross_check=True already compared engines; exercise N = 2, 3 too
    for N in (2, 3):
        solve_recursion(RootData(N), 0, 5, m_in=0)


def test_a1_descendant_free_energies_match_oracle():
    table = solve_recursion(RootData(1), 1, 5, m_in=2)
    f0, f1 = table.potentials[0], table.potentials[1]
    # genus zero through degree 5, all monomials in levels <= 2
    for mono, coeff in f0.terms.items():
        exps = {v.m: e for v, e in mono}
        assert coeff == free_energy_coefficient(0, exps), mono
    # and the oracle finds nothing the engine missed
    assert f0.coefficient(((Var(0, 1), 3),)) == Fraction(1, 6)
    assert f0.coefficient(((Var(0, 1), 4), (Var(2, 1), 1))) == Fraction(1, 8)
    # genus one through degree 3
    expected = {
        ((Var(1, 1), 1),): Fraction(1, 24),
        ((Var(1, 1), 2),): Fraction(1, 48),
        ((Var(0, 1), 1), (Var(2, 1), 1)): Fraction(1, 8),
        ((Var(1, 1), 3),): Fraction(1, 72),
        ((Var(0, 1), 1), (Var(1, 1), 1), (Var(2, 1), 1)): Fraction(1, 4),
    }
    assert f1.terms == expected
    for mono, coeff in expected.items():
        exps = {v.m: e for v, e in mono}
        assert free_energy_coefficient(1, exps) == coeff


def test_oracle_sanity():
    assert psi_correlator(0, (0, 0, 0)) == 1
    assert psi_correlator(0, (0, 0, 0, 1)) == 1
    assert psi_correlator(1, (1,)) == Fraction(1, 24)
    assert psi_correlator(1, (0, 2)) == Fraction(1, 24)
    assert psi_correlator(1, (1, 1)) == Fraction(1, 24)
    assert psi_correlator(1, (0, 1, 2)) == Fraction(1, 12)
    assert psi_correlator(1, (1, 1, 1)) == Fraction(1, 12)


# -- constraint residuals --------------------------------------------------------

@pytest.fixture(scope="module")
def a2_table():
    return solve_recursion(RootData(2), 1, 6, m_in=1)


def test_residuals_vanish_a2(a2_table):
    for a in (1, 2):
        for m in (0, 1, 2):
            res = w_residual(a2_table, a, m, cap=3, genus_cap=1)
            assert set(res) == {0, 1}
            assert all(p.is_zero() for p in res.values()), (a, m)


def test_residual_gamma_route_agrees(a2_table):
    for a in (1, 2):
        res = w_residual(a2_table, a, 0, cap=3, genus_cap=1, basis="gamma")
        assert all(p.is_zero() for p in res.values())


def test_residual_negative_control():
    table = solve_recursion(RootData(2), 0, 5, m_in=0)
    delta = (x(0, 1) * x(0, 2)).scale(Fraction(1, 7))
    table.solver.perturb(0, (Var(0, 2),), 2, delta)
    res = w_residual(table, 2, 0, cap=3, genus_cap=0)
    assert not all(p.is_zero() for p in res.values())


def test_residual_report_shape(a2_table):
    from anrec.recursion import wconstraint_report
    rep = wconstraint_report(a2_table, 1, 0, 3)
    assert rep["pass"] and rep["residual_terms"] == []
    assert rep["N"] == 2 and rep["cap"] == 3


# -- dilaton shift and kernels ------------------------------------------------------

def test_dilaton_shift_round_trip():
    p = (x(0, 2) + x(0, 1) * x(0, 2)).scale(Fraction(3, 2)) + x(0, 2) ** 3
    shifted = dilaton_shift(p, N=2)
    assert shifted != p
    assert dilaton_shift(shifted, N=2, inverse=True) == p
    # slots other than the top one are untouched
    q = x(0, 1) * x(1, 2)
    assert dilaton_shift(q, N=2) == q


def test_kernel_monomials():
    rd = RootData(3)
    num, den = kernel_monomials(rd, 0, rd.N)
    assert num.qexp == rd.h * 1 - rd.N and num.coeff == rd.ctx.one
    assert den.qexp == 1  # one (h*lambda)^(1/h) per denominator factor
    assert kernel_denominator(rd, 1, 3).coeff == rd.eta(1) - rd.eta(3)
    n2 = kernel_numerator(rd, 1, 2)
    assert n2.coeff == rd.ctx.from_rat(Fraction(1, (4 - 2) * (8 - 2)))
    assert n2.qexp == 8 - 2


def test_kernel_rebuild_matches_recursion_kernel():
    rd = RootData(3)
    for (m, a) in [(0, 1), (1, 2), (2, 3)]:
        expect_ratio = Fraction(rd.h)
        for l in range(1, m + 2):
            expect_ratio /= l * rd.h - a
        for (i, js) in [(1, (2,)), (2, (3, 4)), (4, (1, 2, 3)), (3, (1,))]:
            rb, qb = rebuilt_kernel_scalar(rd, m, a, i, js)
            th, qt = recursion_kernel_scalar(rd, m, a, i, js)
            assert qb == qt
            assert rb == th * expect_ratio


def test_table_json(a2_table):
    data = a2_table.to_json()
    assert data["n"] == 2 and "1" in data["potentials"]
    assert any("constant term undetermined" in note for note in data["notes"])


def test_genus2_classical_values():
    # one- and two-point psi-class intersection numbers at genus two,
    # scaled by the level factors (2k-1)!! of the variable dictionary:
    # <tau4> = 1/1152, <tau5 tau0> = 1/1152, <tau4 tau1> = 1/384,
    # <tau3 tau2> = 29/5760
    s = DescendantSolver(RootData(1), m_in=0)
    assert s.w_slice(2, (Var(4, 1),), 0) == SparsePoly.constant(Fraction(35, 384))
    assert s.w_slice(2, (Var(0, 1), Var(5, 1)), 0) \
        == SparsePoly.constant(Fraction(105, 128))
    assert s.w_slice(2, (Var(1, 1), Var(4, 1)), 0) \
        == SparsePoly.constant(Fraction(35, 128))
    assert s.w_slice(2, (Var(2, 1), Var(3, 1)), 0) \
        == SparsePoly.constant(Fraction(29, 128))


def _corr(s, ks):
    # correlator extracted from a constant multi-derivative slice, undoing
    # the (2k-1)!! variable dictionary
    from kdv_oracle import double_factorial_odd
    dirs = tuple(Var(k, 1) for k in ks)
    poly = s.w_slice(2, dirs, 0)
    val = poly.coefficient(())
    for k in ks:
        val /= double_factorial_odd(k)
    return val


def test_genus2_string_and_dilaton_axioms():
    s = DescendantSolver(RootData(1), m_in=0)
    # string: <tau_0 tau_3 tau_3> = 2 <tau_2 tau_3>
    assert _corr(s, (0, 3, 3)) == 2 * _corr(s, (2, 3))
    # string: <tau_0 tau_2 tau_4> = <tau_1 tau_4> + <tau_2 tau_3>
    assert _corr(s, (0, 2, 4)) == _corr(s, (1, 4)) + _corr(s, (2, 3))
    # dilaton: <tau_1 X> = (2g - 2 + n) <X> at g = 2
    assert _corr(s, (1, 2, 3)) == 4 * _corr(s, (2, 3))
    assert _corr(s, (1, 4)) == 3 * _corr(s, (4,))
    # genus-2 window in tau_0, tau_1 alone is empty by dimension count
    table = solve_recursion(RootData(1), 2, 8, m_in=1)
    assert table.potentials[2].is_zero()


def test_residuals_vanish_a3():
    table = solve_recursion(RootData(3), 1, 5, m_in=0)
    for a in (1, 2, 3):  # states of degree 4, 3, 2
        res = w_residual(table, a, 0, cap=3, genus_cap=1)
        assert all(p.is_zero() for p in res.values()), a


def test_genus2_residuals_vanish():
    table = solve_recursion(RootData(1), 2, 8, m_in=1)
    for m in (0, 1, 2):
        res = w_residual(table, 1, m, cap=2, genus_cap=2)
        assert all(p.is_zero() for p in res.values()), m


def test_omega_wrapper(a2_table):
    from anrec.recursion import omega
    val = omega(a2_table, (1, 2), 0, 2)
    assert val.g == 0 and val.labels == (1, 2)
    assert not val.value.is_zero()


def test_mixed_basis_pairing_rejected():
    rd = RootData(2)
    s = DescendantSolver(rd)
    with pytest.raises(ConsistencyError):
        s._pair_value(("chi", 1), ("gamma", 1))
