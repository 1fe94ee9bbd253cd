from fractions import Fraction as F

import pytest

from paramlp.errors import InvalidBasisError, ParamLpError, SizeGuardError, VerificationError
from paramlp.services import simplex
from paramlp.services.generators import gen_klee_minty, gen_random_bounded, klee_minty_start
from paramlp.services.lp import KktVerdict, Violation, validate_standard_form
from paramlp.services.simplex import (
    BLAND,
    DANTZIG,
    INFEASIBLE,
    OPTIMAL,
    PARAMETRIC,
    UNBOUNDED,
    Basis,
    brute_force_optimum,
    check_ray,
    iteration_limit,
    phase1,
    reduced_costs,
    solve,
    trace_document,
)


def test_bland_solves_t1(t1_lp):
    solution = solve(t1_lp, BLAND)
    assert solution.status == OPTIMAL
    assert solution.x == (0, 0, 3)
    assert solution.objective == 0
    assert solution.verified
    assert solution.basis == Basis((2,))
    assert solution.trace.pivots == 2
    assert solution.trace.phase1_steps == 1


def test_dantzig_takes_the_steepest_column(t1_lp):
    solution = solve(t1_lp, DANTZIG)
    assert solution.objective == 0
    assert solution.trace.pivots == 1


def test_trace_document_records_pivots(t1_lp):
    doc = trace_document(solve(t1_lp, BLAND).trace)
    assert doc.rule == "bland"
    assert [(s.enter, s.leave, s.objective) for s in doc.steps] == [(1, 0, 3), (2, 1, 0)]


def test_phase1_finds_a_vertex(t1_lp):
    result = phase1(t1_lp)
    assert result.feasible
    assert result.basis == Basis((0,))
    assert result.x == (3, 0, 0)


def test_phase1_on_the_identity(exact):
    lp = validate_standard_form([[1, 0], [0, 1]], [1, 1], [1, 1], arith=exact)
    result = phase1(lp)
    assert result.feasible
    assert sorted(result.basis.basic) == [0, 1]
    assert result.x == (1, 1)


def test_zero_cost_needs_no_phase2_pivots(exact):
    lp = validate_standard_form([[1, 1, 1]], [3], [0, 0, 0], arith=exact)
    solution = solve(lp)
    assert solution.status == OPTIMAL
    assert solution.trace.pivots == 0
    assert solution.objective == 0


def test_infeasible_lp(exact):
    lp = validate_standard_form([[1, 1]], [-1], [1, 1], arith=exact)
    solution = solve(lp)
    assert solution.status == INFEASIBLE
    assert solution.objective is None
    assert brute_force_optimum(lp).status == INFEASIBLE


def test_unbounded_lp_returns_a_ray(exact):
    lp = validate_standard_form([[1, -1]], [1], [0, -1], arith=exact)
    solution = solve(lp)
    assert solution.status == UNBOUNDED
    assert solution.ray == (1, 1)
    assert check_ray(lp, solution.ray)
    assert brute_force_optimum(lp).status == UNBOUNDED


def test_unbounded_from_a_degenerate_start(exact):
    lp = validate_standard_form([[1, -1]], [0], [-1, 0], arith=exact)
    solution = solve(lp)
    assert solution.status == UNBOUNDED
    assert solution.ray == (1, 1)


def test_start_basis_is_checked(t1_lp, exact):
    with pytest.raises(InvalidBasisError):
        solve(t1_lp, BLAND, Basis((0, 1)))
    with pytest.raises(InvalidBasisError):
        solve(t1_lp, BLAND, Basis((5,)))
    with pytest.raises(InvalidBasisError):
        Basis((1, 1))

    lp = validate_standard_form([[1, -1]], [1], [1, 1], arith=exact)
    with pytest.raises(InvalidBasisError):
        solve(lp, BLAND, Basis((1,)))


def test_start_basis_skips_phase1(t1_lp):
    solution = solve(t1_lp, BLAND, Basis((1,)))
    assert solution.trace.phase1_steps == 0
    assert solution.trace.pivots == 1
    assert solution.x == (0, 0, 3)


def test_unknown_rule_is_rejected(t1_lp):
    with pytest.raises(ParamLpError):
        solve(t1_lp, PARAMETRIC)


def test_reduced_costs_at_a_basis(t1_lp):
    w, y = reduced_costs(t1_lp, Basis((0,)))
    assert w == (2,)
    assert y == (0, -1, -2)


def test_reduced_costs_at_the_optimal_basis(t1_lp):
    w, y = reduced_costs(t1_lp, Basis((2,)))
    assert w == (0,)
    assert y == (2, 1, 0)


def test_iteration_limit():
    assert iteration_limit(3) == 80


def test_float_mode_solve(t1_lp, floating):
    solution = solve(t1_lp.to_mode(floating), BLAND)
    assert solution.status == OPTIMAL
    assert solution.objective == pytest.approx(0.0, abs=1e-9)
    assert solution.x == pytest.approx((0.0, 0.0, 3.0))
    assert solution.verified


def _failing_kkt(lp, cert):
    return KktVerdict(ok=False, violations=(Violation("complementarity", "forced"),))


def test_exact_optimum_failing_kkt_raises(t1_lp, monkeypatch):
    monkeypatch.setattr(simplex, "kkt_check", _failing_kkt)
    with pytest.raises(VerificationError):
        solve(t1_lp, BLAND)


def test_float_optimum_failing_kkt_is_flagged(t1_lp, floating, monkeypatch):
    monkeypatch.setattr(simplex, "kkt_check", _failing_kkt)
    solution = solve(t1_lp.to_mode(floating), BLAND)
    assert solution.status == OPTIMAL
    assert not solution.verified


# ── Klee–Minty ──


def test_klee_minty_d2_structure():
    lp = gen_klee_minty(2)
    assert lp.A == ((1, 0, 1, 0), (20, 1, 0, 1))
    assert lp.b == (1, 100)
    assert lp.c == (-10, -1, 0, 0)


@pytest.mark.parametrize("D", [2, 3, 4, 5])
def test_dantzig_visits_every_klee_minty_vertex(D):
    solution = solve(gen_klee_minty(D), DANTZIG, klee_minty_start(D))
    assert solution.status == OPTIMAL
    assert solution.trace.pivots == 2**D - 1
    assert solution.objective == -(100 ** (D - 1))
    assert solution.verified


@pytest.mark.slow
@pytest.mark.parametrize("D", [6, 7, 8])
def test_dantzig_klee_minty_larger_cubes(D):
    solution = solve(gen_klee_minty(D), DANTZIG, klee_minty_start(D))
    assert solution.trace.pivots == 2**D - 1


# ── Brute force ──


def test_brute_force_t1(t1_lp):
    result = brute_force_optimum(t1_lp)
    assert result.status == OPTIMAL
    assert result.value == 0
    assert result.vertices == ((0, 0, 3),)


def test_brute_force_lists_every_optimal_vertex(exact):
    lp = validate_standard_form([[1, 1, 1]], [3], [0, 0, 0], arith=exact)
    result = brute_force_optimum(lp)
    assert result.value == 0
    assert result.vertices == ((0, 0, 3), (0, 3, 0), (3, 0, 0))


@pytest.mark.parametrize("shape", [(2, 5, 42), (1, 3, 7), (3, 6, 11), (2, 8, 5)])
def test_bland_and_dantzig_agree_with_brute_force(shape):
    lp = gen_random_bounded(*shape)
    reference = brute_force_optimum(lp)
    for rule in (BLAND, DANTZIG):
        solution = solve(lp, rule)
        assert solution.status == reference.status == OPTIMAL
        assert solution.objective == reference.value
        assert solution.verified


def test_brute_force_size_guard(exact):
    lp = validate_standard_form([[1] * 25], [1], [0] * 25, arith=exact)
    with pytest.raises(SizeGuardError):
        brute_force_optimum(lp)


def test_objective_is_exact_rational(exact):
    lp = validate_standard_form([[3, 1, 0], [0, 1, 3]], [1, 1], [1, 1, 1], arith=exact)
    solution = solve(lp)
    assert solution.status == OPTIMAL
    assert solution.objective == brute_force_optimum(lp).value
    assert isinstance(solution.objective, F)
