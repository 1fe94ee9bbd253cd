from fractions import Fraction as F

import pytest

from paramlp.errors import (
    AssumptionViolatedError,
    InternalInconsistencyError,
    NoParametricDirectionError,
    OutsideProjectionError,
    UnsupportedDimensionError,
    ZeroRowError,
)
from paramlp.services import parametric
from paramlp.services.arith import INF
from paramlp.services.generators import fixture, gen_random_pair
from paramlp.services.lp import parametric_kkt_check
from paramlp.services.oracle import grid_oracle, oracle_agrees, oracle_window
from paramlp.services.parametric import (
    DUAL,
    PRIMAL,
    Interval,
    _Image,
    count_bound_check,
    parametric_certificate,
    phi,
    psi,
    ratio_test_single_row,
    sweep,
    theta_interval,
)


# ── Intervals ──


def test_interval_infinite_ends_are_open():
    interval = Interval.closed(-INF, 1)
    assert not interval.lo_closed
    assert interval.hi_closed
    assert str(interval) == "(-inf, 1]"
    assert interval.contains(-(10**9))
    assert interval.contains(1)
    assert not interval.contains(F(3, 2))


def test_interval_open_excludes_ends():
    interval = Interval.open(F(-1), F(1, 2))
    assert not interval.contains(F(-1))
    assert interval.contains(F(0))
    assert str(interval) == "(-1, 1/2)"
    assert interval.closure() == Interval.closed(F(-1), F(1, 2))


def test_interval_rejects_reversed_ends():
    with pytest.raises(ValueError):
        Interval.closed(1, 0)


# ── Θ, Φ and Ψ on the T1 fixture ──


def test_theta_intervals(t1_pair):
    assert theta_interval(t1_pair, PRIMAL) == Interval.closed(F(-1), F(1, 2))
    assert theta_interval(t1_pair, DUAL) == Interval(-INF, INF, False, False)


def test_theta_float_mode(floating):
    pair = fixture("T1", floating)
    theta = theta_interval(pair, PRIMAL)
    assert theta.lo == pytest.approx(-(6**0.5))
    assert theta.hi == pytest.approx(6**0.5 / 2)


@pytest.mark.parametrize(
    "u, expected",
    [
        ("-1/3", Interval.closed(F(-1), F(1, 2))),
        (-1, Interval.point(F(1, 2))),
        (1, Interval.point(F(-1))),
        (0, Interval.point(F(-1))),
    ],
)
def test_phi(t1_pair, u, expected):
    assert phi(t1_pair, u) == expected


@pytest.mark.parametrize(
    "v, expected",
    [
        (0, Interval.point(F(-1, 3))),
        ("1/2", Interval(-INF, F(-1, 3), False, True)),
        (-1, Interval(F(-1, 3), INF, True, False)),
    ],
)
def test_psi(t1_pair, v, expected):
    assert psi(t1_pair, v) == expected


def test_psi_outside_theta(t1_pair):
    with pytest.raises(OutsideProjectionError):
        psi(t1_pair, 1)


def test_phi_is_antitone(t1_pair):
    left, mid, right = phi(t1_pair, -1), phi(t1_pair, "-1/3"), phi(t1_pair, 1)
    assert left.lo >= mid.hi
    assert mid.lo >= right.hi


@pytest.mark.parametrize("v", [-1, "-1/2", 0, "1/4", "1/2"])
def test_phi_psi_biconditional(t1_pair, v):
    image = psi(t1_pair, v)
    for u in (image.lo, image.hi):
        if image.contains(u):
            assert phi(t1_pair, u).contains(F(v))


# ── Certificates ──


def test_parametric_certificate(t1_pair):
    cert = parametric_certificate(t1_pair, "-1/3", 0)
    assert cert.x_bar == (0, 2, 1)
    assert cert.y_bar == (1, 0, 0)
    assert parametric_kkt_check(t1_pair, cert).ok


def test_parametric_certificate_needs_matching_pair(t1_pair):
    with pytest.raises(OutsideProjectionError):
        parametric_certificate(t1_pair, 0, 0)


# ── Sweep ──


def test_primal_sweep(t1_pair):
    decomposition = sweep(t1_pair, PRIMAL)
    assert decomposition.transition_points == (F(-1), F(1, 2))
    assert decomposition.intervals == (Interval.open(F(-1), F(1, 2)),)
    assert decomposition.images == (F(-1, 3),)
    assert decomposition.hops == 1
    assert not decomposition.hop_bound_exceeded
    assert decomposition.witnesses[0].image == Interval(F(-1, 3), INF, True, False)
    assert decomposition.witnesses[1].image == Interval(-INF, F(-1, 3), False, True)


def test_dual_sweep(t1_pair):
    decomposition = sweep(t1_pair, DUAL)
    assert decomposition.transition_points == (F(-1, 3),)
    assert decomposition.intervals == (
        Interval.open(-INF, F(-1, 3)),
        Interval.open(F(-1, 3), INF),
    )
    assert decomposition.images == (F(1, 2), F(-1))
    assert decomposition.hops == 2
    assert decomposition.witnesses[0].image == Interval.closed(F(-1), F(1, 2))


def test_sweep_on_a_singleton_theta(make_pair):
    pair = make_pair([[1, 1, 1]], [0], [2, 1, 0], [0, 0, 0], [[1, -1, 0]])
    decomposition = sweep(pair, PRIMAL)
    assert decomposition.theta == Interval.point(F(0))
    assert decomposition.transition_points == (F(0),)
    assert decomposition.intervals == ()


def test_sweep_refuses_assumption_violated_pairs(make_pair):
    pair = make_pair([[1, 1, 1]], [3], [-1, 1, 0], [1, 1, 1], [[1, -1, 0]])
    with pytest.raises(AssumptionViolatedError):
        sweep(pair, PRIMAL)


def test_no_parametric_direction(make_pair):
    pair = make_pair([[1, 1, 1]], [3], [2, 1, 0], [1, 1, 1], [[1, -1, 0], [1, 1, -2]])
    assert pair.r == 0
    with pytest.raises(NoParametricDirectionError):
        theta_interval(pair, PRIMAL)


def test_multi_parameter_pairs_are_unsupported(make_pair):
    pair = make_pair([[1, 1, 1, 1]], [4], [1, 1, 1, 1], [1, 1, 1, 1], [])
    assert pair.r == 3
    with pytest.raises(UnsupportedDimensionError):
        sweep(pair, PRIMAL)


@pytest.mark.parametrize("n, seed", [(4, 1), (4, 2), (5, 3), (5, 4), (6, 5)])
def test_random_pair_sweeps_tile_theta(n, seed):
    pair = gen_random_pair(n, seed)
    for side in (PRIMAL, DUAL):
        decomposition = sweep(pair, side)
        points, intervals = len(decomposition.transition_points), len(decomposition.intervals)
        assert abs(points - intervals) <= 1
        assert count_bound_check(pair, decomposition).n == n


# ── Ratio test and count bound ──


def test_ratio_test_single_row():
    assert ratio_test_single_row([1, -1, 0], 1).J == frozenset({0})
    assert ratio_test_single_row([1, -1, 0], -1).J == frozenset({1})
    assert ratio_test_single_row([1, -1, 0], 0).J == frozenset()
    with pytest.raises(ZeroRowError):
        ratio_test_single_row([0, 0, 0], 1)


def test_count_bound_check(t1_pair):
    result = count_bound_check(t1_pair, sweep(t1_pair, PRIMAL))
    assert result.holds
    assert (result.transition_points, result.intervals) == (2, 1)
    assert result.j_size == 1
    assert result.j_discrepancy


# ── Float oracle ──


@pytest.mark.slow
def test_grid_oracle_matches_the_exact_sweep(t1_pair):
    decomposition = sweep(t1_pair, PRIMAL)
    oracle = grid_oracle(t1_pair, points=200, window=oracle_window(decomposition))
    assert oracle.breakpoints == pytest.approx((-1.0, 0.5), abs=1e-6)
    assert oracle_agrees(decomposition, oracle)


def test_oracle_covers_the_primal_side_only(t1_pair):
    decomposition = sweep(t1_pair, DUAL)
    with pytest.raises(ValueError):
        oracle_agrees(decomposition, None)


# ── Random pairs ──


@pytest.fixture(scope="module", params=range(1, 11))
def swept_pair(request):
    seed = request.param
    pair = gen_random_pair(3 + seed % 8, seed)
    return pair, sweep(pair, PRIMAL), sweep(pair, DUAL)


def _samples(decomposition):
    """Transition points plus a few points inside every invariancy interval."""
    points = set(decomposition.transition_points)
    for interval in decomposition.intervals:
        if interval.lo_finite and interval.hi_finite:
            width = interval.hi - interval.lo
            points.update(interval.lo + width * F(k, 4) for k in (1, 2, 3))
        elif interval.lo_finite:
            points.update((interval.lo + 1, interval.lo + 5))
        elif interval.hi_finite:
            points.update((interval.hi - 1, interval.hi - 5))
        else:
            points.update((F(-1), F(0), F(1)))
    return sorted(points)


def _inside(interval):
    if interval.lo_finite and interval.hi_finite:
        return (interval.lo + interval.hi) / 2
    if interval.lo_finite:
        return interval.lo + 1
    if interval.hi_finite:
        return interval.hi - 1
    return F(0)


def test_random_pair_biconditional_on_a_grid(swept_pair):
    pair, primal, dual = swept_pair
    vs, us = _samples(primal), _samples(dual)
    phis = {u: phi(pair, u) for u in us}
    psis = {v: psi(pair, v) for v in vs}
    for u in us:
        for v in vs:
            assert phis[u].contains(v) == psis[v].contains(u), (u, v)


def test_random_pair_images_stay_in_theta(swept_pair):
    pair, primal, dual = swept_pair
    for u in _samples(dual):
        image = phi(pair, u)
        lo_ok = not image.lo_finite or primal.theta.contains(image.lo)
        hi_ok = not image.hi_finite or primal.theta.contains(image.hi)
        assert lo_ok and hi_ok
    for v in _samples(primal):
        image = psi(pair, v)
        lo_ok = not image.lo_finite or dual.theta.contains(image.lo)
        hi_ok = not image.hi_finite or dual.theta.contains(image.hi)
        assert lo_ok and hi_ok


def test_random_pair_endpoint_images_are_unbounded(swept_pair):
    pair, primal, dual = swept_pair
    if primal.theta.lo_finite:
        assert not psi(pair, primal.theta.lo).hi_finite
    if primal.theta.hi_finite:
        assert not psi(pair, primal.theta.hi).lo_finite
    if dual.theta.lo_finite:
        assert not phi(pair, dual.theta.lo).hi_finite
    if dual.theta.hi_finite:
        assert not phi(pair, dual.theta.hi).lo_finite


def test_random_pair_images_map_back_to_their_interval(swept_pair):
    pair, primal, dual = swept_pair
    for interval, image in zip(primal.intervals, primal.images):
        assert phi(pair, image) == interval.closure()
    for interval, image in zip(dual.intervals, dual.images):
        assert psi(pair, image) == interval.closure()


def test_random_pair_certificates_pass_the_kkt_check(swept_pair):
    pair, primal, _ = swept_pair
    for interval, image in zip(primal.intervals, primal.images):
        cert = parametric_certificate(pair, image, _inside(interval))
        assert parametric_kkt_check(pair, cert).ok


def test_random_pair_points_and_intervals_swap_sides(swept_pair):
    _, primal, dual = swept_pair
    assert list(dual.transition_points) == sorted(primal.images)
    assert list(primal.transition_points) == sorted(dual.images)
    assert len(dual.transition_points) == len(primal.intervals)
    assert len(primal.transition_points) == len(dual.intervals)


def test_t1_points_and_intervals_swap_sides(t1_pair):
    primal, dual = sweep(t1_pair, PRIMAL), sweep(t1_pair, DUAL)
    assert (len(primal.transition_points), len(primal.intervals)) == (2, 1)
    assert (len(dual.transition_points), len(dual.intervals)) == (1, 2)
    assert dual.transition_points == primal.images
    assert primal.transition_points == tuple(sorted(dual.images))


@pytest.mark.slow
@pytest.mark.parametrize("seed", [1, 2, 3, 4])
def test_grid_oracle_matches_random_pair_sweeps(seed):
    pair = gen_random_pair(3 + seed % 8, seed)
    decomposition = sweep(pair, PRIMAL)
    oracle = grid_oracle(pair, window=oracle_window(decomposition))
    assert oracle_agrees(decomposition, oracle)


def test_seed_with_singleton_images_on_both_sides_is_inconsistent(t1_pair, monkeypatch):
    # Θ_D is the whole line, so the dual sweep seeds at 0 where Φ(0) = {-1}
    monkeypatch.setattr(parametric, "_psi", lambda pair, v: _Image(Interval.point(F(0)), (), F(0)))
    with pytest.raises(InternalInconsistencyError):
        sweep(t1_pair, DUAL)
