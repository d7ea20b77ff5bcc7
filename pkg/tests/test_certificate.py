import math

import numpy as np
import pytest

from zbuscert import (
    CertificateUndefinedError,
    ConditionCoefficients,
    SolveConfig,
    ThreeNodeParams,
    certify,
    certify_system,
    compute_coefficients,
    compute_quantities,
    condition_values,
    conditions_hold,
    index_loads,
    membership_in_ball,
    random_small_network,
    solve,
    solve_region,
    three_node,
)
from zbuscert.solver import LambdaChoice


def coefficients_for(case):
    _, system, idx = case
    return compute_coefficients(compute_quantities(system, idx))


def synthetic(**kwargs):
    base = dict(a1=0.0, a2=0.0, A_Y=0.0, A_D=0.0, B_Y=0.0, B_D=0.0,
                C_Y=0.0, C_D=0.0, D_Y=0.0, D_D=0.0)
    base.update(kwargs)
    return ConditionCoefficients(**base)


def test_two_node_quantities(two_node_case):
    _, system, idx = two_node_case(-0.5)
    q = compute_quantities(system, idx)
    assert abs(q.w_min - 0.5) <= 1e-12
    assert q.lambda_max == 1.0
    assert math.isinf(q.rho_min)
    assert q.s_delta.size == 0 and q.z_delta.shape == (3, 0)


def test_two_node_closed_form_coefficients(two_node_case):
    # With the identity scaling, impedance identity, and the half-slack
    # no-load profile, every coefficient collapses to a hand value.
    for s_l in (-0.01, -0.1, -0.5):
        coeffs = coefficients_for(two_node_case(s_l))
        assert abs(coeffs.a1 - 2.0) <= 1e-12
        assert coeffs.a2 == 0.0
        assert abs(coeffs.A_Y - 2 * abs(s_l)) <= 1e-12
        assert abs(coeffs.B_Y - 0.5) <= 1e-12
        assert abs(coeffs.C_Y - 4 * abs(s_l)) <= 1e-12
        assert abs(coeffs.D_Y - 1.0) <= 1e-12
        assert coeffs.A_D == coeffs.B_D == coeffs.C_D == coeffs.D_D == 0.0


def test_diag_w_scaling_centers_at_ones(two_node_case):
    _, system, idx = two_node_case(-0.1)
    q = compute_quantities(system, idx, LambdaChoice(mode="diag_w"))
    assert np.array_equal(q.lam, system.w)
    assert np.abs(system.w / q.lam - 1.0).max() == 0.0


@pytest.mark.parametrize("theta", [0.05, 0.10])
def test_three_node_power_coefficient(theta, three_node_case):
    coeffs = coefficients_for(three_node_case(theta))
    assert abs(coeffs.A_Y - 2.359 * theta) <= 0.002 * theta
    assert abs(coeffs.C_Y - coeffs.A_Y) <= 1e-12
    assert coeffs.B_Y == coeffs.D_Y == 0.0
    assert abs(coeffs.a1 - 1.0) <= 1e-9


def test_condition_arithmetic_reproduces_rational_forms():
    coeffs = synthetic(a1=1.0, A_Y=0.11795, C_Y=0.11795)
    values = condition_values(coeffs, 0.5)
    assert abs(values.c1 - 0.5) <= 1e-15
    assert math.isinf(values.c2)
    assert abs(values.c3_slack - (0.5 - 0.11795 / 0.5)) <= 1e-12
    assert abs(values.c4_value - 0.11795 / 0.25) <= 1e-12


def test_condition_limit_toward_zero_radius():
    coeffs = synthetic(a1=1.0, A_Y=0.2, A_D=0.1, a2=0.5, B_Y=0.05, B_D=0.01)
    values = condition_values(coeffs, 1e-12)
    assert values.c3_slack == pytest.approx(-(0.2 + 0.1 + 0.05 + 0.01), abs=1e-9)


def test_violated_margins_report_without_raising():
    coeffs = synthetic(a1=2.0, A_Y=0.1, C_Y=0.1)
    values = condition_values(coeffs, 0.75)
    assert values.c1 < 0
    assert values.c3_slack == -math.inf
    assert values.c4_value == math.inf
    assert not conditions_hold(coeffs, 0.75)


@pytest.mark.parametrize("s_l", [-0.01, -0.1, -0.5])
def test_two_node_certificate_is_infeasible(s_l, two_node_case):
    _, system, idx = two_node_case(s_l)
    result = certify_system(system, idx)
    assert not result.feasible
    assert result.r_min is None and result.r_max is None
    assert result.intervals == [] and result.alpha_curve == []


def test_three_node_interval_against_closed_forms(three_node_case):
    # Independent oracle: with a single power coefficient q = A_Y = C_Y and
    # a unit line-to-neutral margin slope, the self-mapping condition holds
    # on the root interval of R^2 - R + q and the contraction condition
    # additionally caps the radius at 1 - sqrt(q).
    _, system, idx = three_node_case(0.08)
    result = certify_system(system, idx)
    assert result.feasible
    q = result.coefficients.A_Y
    lower = (1 - math.sqrt(1 - 4 * q)) / 2
    upper = min((1 + math.sqrt(1 - 4 * q)) / 2, 1 - math.sqrt(result.coefficients.C_Y))
    assert abs(result.r_min - lower) <= 1e-6
    assert abs(result.r_max - upper) <= 1e-6
    # the paper-rounded slope 9.4360 = 4 * 2.3590 reproduces the lower
    # endpoint to 1e-4
    assert abs(result.r_min - (1 - math.sqrt(1 - 9.4360 * 0.08)) / 2) <= 1e-4
    assert result.alpha_at_rmin < 1.0
    assert len(result.intervals) == 1


def test_three_node_threshold_bisection(three_node_case):
    def feasible(theta):
        _, system, idx = three_node_case(theta)
        return certify_system(system, idx, curve_samples=2).feasible

    lo, hi = 0.09, 0.12
    assert feasible(lo) and not feasible(hi)
    while hi - lo > 1e-6:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    threshold = 0.5 * (lo + hi)
    coeffs = coefficients_for(three_node_case(0.08))
    expected = 0.08 / (4.0 * coeffs.A_Y)  # single-coefficient double root
    assert abs(threshold - expected) <= 1e-5


def test_three_node_interval_pinches_near_threshold(three_node_case):
    _, system, idx = three_node_case(0.1059)
    result = certify_system(system, idx)
    assert result.feasible
    assert result.r_max - result.r_min <= 0.02
    assert abs(result.r_min - 0.5) <= 0.02


@pytest.mark.parametrize("theta", [0.12, 1.0])
def test_three_node_infeasible_above_threshold(theta, three_node_case):
    _, system, idx = three_node_case(theta)
    assert not certify_system(system, idx).feasible


def test_unloaded_network_is_feasible_everywhere():
    from zbuscert import DeltaZip, WyeZip, assemble_system

    feeder = random_small_network(3, node_count=2)
    system = assemble_system(feeder.network, WyeZip(), DeltaZip(), feeder.v_slack)
    idx = index_loads(feeder.network, WyeZip(), DeltaZip())
    result = certify_system(system, idx)
    assert result.feasible
    assert result.r_min <= 1e-8
    assert result.alpha_at_rmin == 0.0
    cap = 1.0 / result.coefficients.a1
    assert abs(result.r_max - cap) <= 1e-6


@pytest.mark.parametrize("seed", [1, 9, 23, 40])
def test_endpoint_consistency(seed):
    feeder = random_small_network(seed, node_count=3, delta_fraction=[0, 0.5, 1.0][seed % 3])
    result = certify(feeder.network, feeder.wye, feeder.delta, v_slack=feeder.v_slack)
    assert result.feasible
    coeffs = result.coefficients
    assert conditions_hold(coeffs, result.r_min + 1e-8)
    assert conditions_hold(coeffs, result.r_max - 1e-8)
    if result.r_min - 1e-6 > 0:
        assert not conditions_hold(coeffs, result.r_min - 1e-6)
    assert not conditions_hold(coeffs, result.r_max + 1e-6)


def test_alpha_curve_is_nondecreasing(three_node_case):
    _, system, idx = three_node_case(0.08)
    result = certify_system(system, idx, curve_samples=64)
    alphas = [alpha for _, alpha in result.alpha_curve]
    assert len(alphas) == 64
    assert all(b >= a - 1e-12 for a, b in zip(alphas, alphas[1:]))
    assert result.alpha_at_rmin == alphas[0]


def test_delta_free_results_ignore_the_rho_sentinel(two_node_case):
    _, system, idx = two_node_case(-0.1)
    q = compute_quantities(system, idx)
    coeffs_inf = compute_coefficients(q)
    q.rho_min = 1.0
    coeffs_one = compute_coefficients(q)
    assert coeffs_inf == coeffs_one
    assert solve_region(coeffs_inf).feasible == solve_region(coeffs_one).feasible


def test_scaling_one_coefficient_family_doubles_with_loads(two_node_case):
    _, system, idx = two_node_case(-0.1)
    q = compute_quantities(system, idx)
    before = compute_coefficients(q)
    q.s_wye = 2.0 * q.s_wye
    after = compute_coefficients(q)
    assert after.A_Y == 2.0 * before.A_Y
    assert after.C_Y == 2.0 * before.C_Y
    assert after.B_Y == before.B_Y and after.D_Y == before.D_Y


def test_unpaired_delta_column_is_zero():
    feeder = random_small_network(2, node_count=2, delta_fraction=1.0)
    two_phase = [n for n in feeder.network.non_slack if len(n.phases) == 2]
    if not two_phase:
        pytest.skip("seed produced no two-phase delta node")
    from zbuscert import assemble_system

    system = assemble_system(feeder.network, feeder.wye, feeder.delta, feeder.v_slack)
    idx = index_loads(feeder.network, feeder.wye, feeder.delta)
    q = compute_quantities(system, idx)
    imap = feeder.network.index_map
    unpaired = [k for k in imap.delta if idx.partner[k] is None]
    assert unpaired
    for k in unpaired:
        assert np.all(q.z_delta[:, imap.delta_order[k]] == 0)


def test_vanishing_no_load_voltage_is_rejected(two_node_case):
    _, system, idx = two_node_case(-0.1)
    system.w = system.w.copy()
    system.w[1] = 0.0
    with pytest.raises(CertificateUndefinedError):
        compute_quantities(system, idx)


def test_vanishing_line_to_line_reference_is_rejected():
    feeder = random_small_network(7, node_count=3, delta_fraction=1.0)
    from zbuscert import assemble_system

    system = assemble_system(feeder.network, feeder.wye, feeder.delta, feeder.v_slack)
    idx = index_loads(feeder.network, feeder.wye, feeder.delta)
    loaded = [k for k in feeder.network.index_map.delta if idx.s[k] != 0 or idx.i[k] != 0]
    assert loaded
    node_id = feeder.network.index_map.node_of(loaded[0])
    sl = feeder.network.node_slice(node_id)
    system.w = system.w.copy()
    system.w[sl] = 1.0 + 0.5j  # equal entries collapse every pair difference
    with pytest.raises(CertificateUndefinedError):
        compute_quantities(system, idx)


@pytest.mark.parametrize("seed", [5, 31])
def test_certified_networks_have_unique_attractor(seed, rng):
    # Light version of the theorem suite: several starts inside the largest
    # certified ball land on one solution and stay inside the ball.
    feeder = random_small_network(seed, node_count=3, delta_fraction=0.5)
    from zbuscert import assemble_system

    system = assemble_system(feeder.network, feeder.wye, feeder.delta, feeder.v_slack)
    idx = index_loads(feeder.network, feeder.wye, feeder.delta)
    result = certify_system(system, idx)
    assert result.feasible
    radius = min(0.999 * result.r_max, result.r_max - 1e-8)
    solutions = []
    for _ in range(5):
        offset = radius * rng.random(system.size) * np.exp(2j * np.pi * rng.random(system.size))
        trace = solve(system, feeder.wye, feeder.delta,
                      SolveConfig(init="custom", init_vector=system.w + offset))
        assert trace.status == "converged"
        assert all(
            membership_in_ball(it, system, LambdaChoice(), result.r_max)
            for it in trace.iterates
        )
        solutions.append(trace.solution)
    for other in solutions[1:]:
        assert np.abs(other - solutions[0]).max() <= 1e-7
