import json
import random
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from qsystems.liedata import algebra, kr_matrices
from qsystems.qsolve import (QSystemSpec, SolutionFamily, SolverError, check_convergence_property,
                             check_inversion_property, check_residual, noncanonical_chain_family,
                             power_combination, solve_general, solve_specialized, solve_standard,
                             tridiagonal_chain_spec)
from qsystems.report import FAIL, PASS
from qsystems.series import TruncatedSeries

from oracles import lambert_newton, newton_standard, signed_catalan


def w_series(sol, coeffs, var=1):
    v = sol.variables
    pos = v.index(var)
    terms = {}
    for k, c in enumerate(coeffs):
        e = [0] * len(v)
        e[pos] = k
        terms[tuple(e)] = c
    return sol.one().like(terms)


def chain_closed_form(sol, L):
    """``Q_i = prod_j (1 - w_j)**(-min(i, j))`` in the family's ring."""
    one = sol.one()
    out = {}
    for i in range(1, L + 1):
        q = one
        for j in range(1, L + 1):
            q = q * (one - one.like({tuple(int(k == j - 1) for k in range(L)): 1})).pow(-min(i, j))
        out[i] = q
    return out


# -- solve_standard ------------------------------------------------------------

def test_zero_matrix_single():
    sol = solve_standard(QSystemSpec.standard([[0]]), 6)
    assert sol[1] == w_series(sol, [1, -1])


def test_lambert_signed_catalan():
    sol = solve_standard(QSystemSpec.standard([[2]]), 8)
    assert [sol[1].coefficient((k,)) for k in range(9)] == lambert_newton(8)
    assert [sol[1].coefficient((k,)) for k in range(9)] == [signed_catalan(k) for k in range(9)]


def test_zero_matrix_any_size():
    sol = solve_standard(QSystemSpec.standard([[0] * 3] * 3), 5)
    for i in range(1, 4):
        e = tuple(int(k == i - 1) for k in range(3))
        assert sol[i].terms == {(0, 0, 0): 1, e: -1}


def test_standard_rejects_nonidentity_D():
    with pytest.raises(SolverError):
        solve_standard(QSystemSpec.finite([[2]], [[0]]), 4)


# -- solve_general -------------------------------------------------------------

def test_general_with_identity_equals_standard():
    G = [[1, -1], [Fraction(1, 2), 2]]
    assert solve_general(QSystemSpec.finite([[1, 0], [0, 1]], G), 6).members == \
        solve_standard(QSystemSpec.standard(G), 6).members


def test_square_root_solution():
    sol = solve_general(QSystemSpec.finite([[2]], [[0]]), 6)
    assert sol[1] == w_series(sol, [1, -1]).pow(Fraction(1, 2))
    assert sol[1] * sol[1] == w_series(sol, [1, -1])


def test_singular_D_rejected():
    with pytest.raises(SolverError):
        QSystemSpec.finite([[1, 2], [2, 4]], [[0, 0], [0, 0]])


def test_chain_canonical_closed_form():
    L = 4
    sol = solve_general(tridiagonal_chain_spec(L), 6)
    closed = chain_closed_form(sol, L)
    for i in range(1, L + 1):
        assert sol[i] == closed[i]


def test_chain_closed_form_fed_back_passes_residual():
    L = 4
    spec = tridiagonal_chain_spec(L)
    sol = solve_general(spec, 6)
    closed = SolutionFamily(spec, chain_closed_form(sol, L), "w", sol.monomials)
    assert check_residual(closed).status == PASS


# -- solve_specialized ---------------------------------------------------------

def a1_closed(sol, m):
    return sol.one().like({(k,): 1 for k in range(m + 1)})


def test_a1_specialized_characters():
    spec = kr_matrices(algebra("A", 1), 6)
    sol = solve_specialized(spec, 1, 6)
    for m in range(1, 7):
        assert sol[(1, m)] == a1_closed(sol, m)
    # Q_m^2 - Q_{m-1} Q_{m+1} = y^m
    for m in range(1, 6):
        lhs = sol[(1, m)] ** 2 - sol[(1, m - 1)] * sol[(1, m + 1)]
        assert lhs == sol.one().like({(m,): 1})


def test_specialized_level_zero_is_one():
    sol = solve_specialized(kr_matrices(algebra("A", 2), 4), 2, 4)
    assert sol[(1, 0)] == sol.one()


def test_specialized_cutoff_zero():
    sol = solve_specialized(kr_matrices(algebra("B", 2), 3), 2, 0)
    assert all(q == q.one_like() for q in sol.members.values())


def test_specialized_rejects_small_window():
    with pytest.raises(SolverError):
        solve_specialized(kr_matrices(algebra("A", 1), 3), 1, 5)


def test_specialized_direct_matches_specialize():
    for alg in (algebra("A", 2), algebra("B", 2)):
        spec = kr_matrices(alg, 4)
        direct = solve_specialized(spec, alg.n, 4)
        via_w = solve_specialized(spec, alg.n, 4, method="specialize")
        assert direct.members == via_w.members


# -- power_combination ---------------------------------------------------------

def test_power_combination_basics():
    sol = solve_specialized(kr_matrices(algebra("A", 1), 4), 1, 4)
    assert power_combination(sol, {}) == sol.one()
    assert power_combination(sol, {(1, 2): 1}) == sol[(1, 2)]
    assert power_combination(sol, {(1, 1): 2}) == sol.one().like({(0,): 1, (1,): 2, (2,): 1})
    with pytest.raises(SolverError):
        power_combination(sol, {(2, 1): 1})


# -- check_residual ------------------------------------------------------------

def test_residual_passes_on_solution():
    sol = solve_standard(QSystemSpec.standard([[1, -1], [2, 0]]), 6)
    assert check_residual(sol).status == PASS


def test_residual_detects_injected_fault():
    spec = QSystemSpec.standard([[1, -1], [2, 0]])
    sol = solve_standard(spec, 6)
    q = sol[1]
    e = (2, 1)
    bad = dict(q.terms)
    bad[e] = bad.get(e, 0) + 1
    broken = SolutionFamily(spec, {1: q.like(bad), 2: sol[2]}, "w", sol.monomials)
    check = check_residual(broken)
    assert check.status == FAIL
    assert sum(check.witness.exponent.values()) == 3


# -- convergence and inversion -------------------------------------------------

def test_convergence_a1_canonical():
    sol = solve_specialized(kr_matrices(algebra("A", 1), 6), 1, 6)
    assert check_convergence_property(sol, 3).status == PASS


def test_convergence_noncanonical_fails():
    fam = noncanonical_chain_family(6, 6, specialized=True)
    assert check_residual(fam).status == PASS
    assert check_convergence_property(fam, 3).status == FAIL


def test_convergence_l0():
    sol = solve_specialized(kr_matrices(algebra("A", 2), 3), 2, 3)
    assert check_convergence_property(sol, 0).status == PASS


def test_convergence_needs_range():
    sol = solve_specialized(kr_matrices(algebra("A", 1), 3), 1, 3)
    with pytest.raises(SolverError):
        check_convergence_property(sol, 3)


def test_inversion_canonical_chain():
    sol = solve_general(tridiagonal_chain_spec(5), 5)
    assert check_inversion_property(sol, 4).status == PASS


def test_inversion_rejects_noncanonical_first_member():
    base = noncanonical_chain_family(5, 5)
    one = base.one()
    q1 = (one - one.like({(1, 0, 0, 0, 0): 1})).pow(-2)
    fam = noncanonical_chain_family(5, 5, q1=q1)
    assert check_residual(fam).status == PASS
    assert check_inversion_property(fam, 4).status == FAIL


def test_inversion_finite_system_passes():
    sol = solve_general(QSystemSpec.finite([[2, 1], [0, 1]], [[1, 0], [0, 1]]), 4)
    assert check_inversion_property(sol, 2).status == PASS


def test_inversion_canonical_kr_window():
    sol = solve_specialized(kr_matrices(algebra("A", 2), 4), 2, 4)
    assert check_inversion_property(sol, 3).status == PASS


def test_inversion_rejects_other_D():
    spec2 = QSystemSpec.truncated("infinite-truncated", [1, 2], [[-2, 1], [1, -3]],
                                  [[-1, -1], [-1, -2]], [[0, 0], [0, 0]], [[0, 0], [0, 0]])
    sol2 = solve_general(spec2, 3)
    with pytest.raises(SolverError):
        check_inversion_property(sol2, 1)


# -- system validation and JSON --------------------------------------------------

def test_spec_json_round_trip():
    spec = QSystemSpec.finite([[2, Fraction(1, 3)], [0, 1]], [[1, -1], [0, 2]])
    data = json.loads(json.dumps(spec.to_json()))
    assert QSystemSpec.from_json(data) == spec
    win = tridiagonal_chain_spec(3)
    assert QSystemSpec.from_json(json.loads(json.dumps(win.to_json()))) == win


def test_spec_rejects_bad_inverse():
    with pytest.raises(SolverError):
        QSystemSpec("finite-general", (1,), ((Fraction(2),),), ((Fraction(1),),),
                    ((Fraction(0),),), ((Fraction(0),),), (1,), (1,))


def test_solution_json_is_a_map():
    sol = solve_standard(QSystemSpec.standard([[1]]), 3)
    data = sol.to_json()
    assert set(data) == {"1"}
    assert TruncatedSeries.from_json(data["1"]) == sol[1]


# -- invariants ----------------------------------------------------------------

small = st.fractions(min_value=-2, max_value=2, max_denominator=2)


@st.composite
def matrices(draw, n=None):
    n = n or draw(st.integers(1, 3))
    return [[draw(small) for _ in range(n)] for _ in range(n)]


@settings(max_examples=10, deadline=None)
@given(matrices())
def test_fixed_point_matches_newton_oracle(G):
    cutoff = 8 if len(G) == 1 else 6 if len(G) == 2 else 5
    sol = solve_standard(QSystemSpec.standard(G), cutoff)
    oracle = newton_standard(G, cutoff)
    for r in range(len(G)):
        assert sol[r + 1].terms == oracle[r]


def test_fixed_point_matches_newton_oracle_cutoff_8():
    rng = random.Random(11)
    for n in (1, 2, 3):
        G = [[Fraction(rng.randint(-4, 4), rng.choice([1, 2])) for _ in range(n)] for _ in range(n)]
        sol = solve_standard(QSystemSpec.standard(G), 8)
        oracle = newton_standard(G, 8)
        for r in range(n):
            assert sol[r + 1].terms == oracle[r]


nonzero = st.sampled_from([Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 2), Fraction(3, 2)])


@st.composite
def invertible(draw):
    n = draw(st.integers(1, 3))
    D = [[draw(nonzero) if i == j else draw(small) for j in range(n)] for i in range(n)]
    G = [[draw(small) for _ in range(n)] for _ in range(n)]
    try:
        return QSystemSpec.finite(D, G)
    except SolverError:
        assume(False)


@settings(max_examples=10, deadline=None)
@given(invertible())
def test_general_is_power_of_standard(spec):
    cutoff = 5
    sol = solve_general(spec, cutoff)
    std = solve_standard(QSystemSpec.standard(spec.G_prime), cutoff)
    for r, i in enumerate(spec.indices):
        expected = sol.one()
        for c, j in enumerate(spec.indices):
            expected = expected * std[j].pow(spec.D_inv[r][c])
        assert sol[i] == expected
    assert check_residual(sol).status == PASS


@settings(max_examples=10, deadline=None)
@given(invertible(), st.integers(1, 3))
def test_projection_compatibility(spec, extra):
    d = 4
    small_sol = solve_general(spec, d)
    big_sol = solve_general(spec, d + extra)
    for i in spec.indices:
        assert big_sol[i].truncate(d) == small_sol[i]


@pytest.mark.parametrize("name,n", [("A", 2), ("B", 2), ("C", 2), ("D", 3)])
def test_canonical_specialized_residual_and_convergence(name, n):
    alg = algebra(name, n)
    sol = solve_specialized(kr_matrices(alg, 6), n, 6)
    assert check_residual(sol).status == PASS
    assert check_convergence_property(sol, 3).status == PASS
