"""End-to-end checks of the Python bindings.

Small budgets throughout: these guard the glue (argument passing, layout,
determinism), not the numerics, which the C++ suites own.
"""

import math

import pytest

import cavnet as cn


def network(phi1=0.0, phi2=0.0, dt=1e-3):
    p = cn.NetworkParams()
    p.phi1 = phi1
    p.phi2 = phi2
    p.dt = dt
    return p


def feedback(on_d1_b2=1.0, on_d2_b1=2.0):
    f = cn.FeedbackConfig()
    f.on_d1_b2 = on_d1_b2
    f.on_d2_b1 = on_d2_b1
    return f


def test_vacuum_without_feedback_never_clicks():
    init = cn.ModeAmplitudes(0.0, 0.0, cn.Basis.Cavity)
    rec = cn.simulate_trajectory(init, network(), cn.FeedbackConfig(), 1.0, 42)
    assert rec.counts_d1[-1] == 0
    assert rec.counts_d2[-1] == 0
    assert rec.grid[0] == 0.0
    assert rec.grid[-1] == pytest.approx(1.0)
    assert not rec.aborted


def test_same_seed_reproduces_the_record():
    init = cn.ModeAmplitudes(1.0, 1.0)
    a = cn.simulate_trajectory(init, network(), feedback(), 2.0, 7)
    b = cn.simulate_trajectory(init, network(), feedback(), 2.0, 7)
    assert a.counts_d1 == b.counts_d1
    assert a.counts_d2 == b.counts_d2
    assert a.population_d2 == b.population_d2


def test_two_step_record_probabilities_sum_to_one():
    init = cn.ModeAmplitudes(1.0, 1.0)
    p = network(phi1=0.3, dt=0.5)
    fb = feedback()
    total = 0.0
    dtotal = 0.0
    for e0 in range(4):
        for e1 in range(4):
            prob, dprob = cn.string_probability_with_derivative(
                [e0, e1], init, p, fb)
            assert prob >= 0.0
            total += prob
            dtotal += dprob
    assert total == pytest.approx(1.0, abs=1e-12)
    assert dtotal == pytest.approx(0.0, abs=1e-12)


def test_event_codes_are_validated():
    init = cn.ModeAmplitudes(1.0, 1.0)
    with pytest.raises(ValueError):
        cn.string_probability_with_derivative([4], init, network(), feedback())


def test_single_interval_carries_no_information():
    init = cn.ModeAmplitudes(1.0, 1.0)
    f1 = cn.fisher_information(init, network(phi1=math.pi / 10), feedback(), 1)
    assert abs(f1) <= 1e-12


def test_feedback_builds_information_and_memory():
    init = cn.ModeAmplitudes(1.0, 1.0)
    p = network(phi1=math.pi / 10, dt=0.5)
    r = cn.fisher_scaling(init, p, feedback(), 5)
    assert r.n_values == [1, 2, 3, 4, 5]
    assert abs(r.fisher[0]) <= 1e-12
    assert r.fisher[-1] > 0.0
    assert all(y >= x - 1e-15 for x, y in zip(r.fisher, r.fisher[1:]))
    assert cn.markov_gap(init, p, feedback(), 3) > 1e-12
    assert cn.markov_gap(init, p, cn.FeedbackConfig(), 3) <= 1e-12


def test_signal_scan_layout_and_bounds():
    init = cn.ModeAmplitudes(1.0, 1.0)
    grid = [-1.0, 0.0, 1.0]
    times = [0.5, 1.0]
    obs = [cn.Observable.P_d1, cn.Observable.P_d1_minus_P_d2]
    curve = cn.signal_scan(init, network(), feedback(), grid, times, obs,
                           5, 50, 1234)
    assert len(curve.points) == len(grid) * len(times) * len(obs)
    assert curve.n_traj == 50
    assert curve.master_seed == 1234
    for s in curve.points:
        lo = -1.0 if s.observable == cn.Observable.P_d1_minus_P_d2 else 0.0
        assert lo <= s.value <= 1.0
        assert s.stderr >= 0.0


def test_phase_independent_start_flags_zero_gradient():
    # A cavity-basis start reaches the detectors through the phi2 coupler
    # only, and without feedback nothing ever passes through phi1, so the
    # shared-seed finite difference over phi1 vanishes identically.
    init = cn.ModeAmplitudes(1.0, 1.0, cn.Basis.Cavity)
    res = cn.phase_uncertainty(init, network(), cn.FeedbackConfig(), 0.3,
                               0.05, [0.5], 3, 40, 2, 99)
    assert res.phi_star == 0.3
    assert len(res.points) == 3
    for pt in res.points:
        assert pt.gradient == 0.0
        assert pt.zero_gradient
