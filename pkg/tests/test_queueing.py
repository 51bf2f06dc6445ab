import math

import numpy as np
import pytest
from scipy.optimize import brentq

from hapvec.errors import NoConvergence, NotSingleServer, UnstableQueue, ZeroArrivalRate
from hapvec.queueing import (
    QueueSpec,
    TailParams,
    compute_decay_root,
    cumulative_probability,
    md1_exact_waiting,
    mean_queue_length,
    mean_waiting_time,
    poisson_weights,
    root_residual,
    select_truncation,
    solve_state_distribution,
    state_probability,
    stationary_distribution,
    waiting_time,
)


def spec_for(G, c, D=1.0):
    return QueueSpec(G / D, D, c)


@pytest.mark.parametrize("G,c", [(0.5, 1), (0.9, 1), (3.0, 5), (13.5, 15), (0.2, 15)])
def test_decay_root_matches_bracketing_solver(G, c):
    tau = compute_decay_root(spec_for(G, c))
    h = lambda z: c * math.log(z) - G * (z - 1.0)
    ref = brentq(h, 1.0 + 1e-9 * (c - G), 1e4, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    assert tau > 1
    assert tau == pytest.approx(ref, rel=1e-12)
    assert root_residual(tau, spec_for(G, c)) < 1e-12


def test_decay_root_md1_half_load():
    # root of z = exp(0.5 (z - 1)) above 1
    assert compute_decay_root(spec_for(0.5, 1)) == pytest.approx(3.51286241725, rel=1e-10)


def test_decay_root_rejects_unstable():
    with pytest.raises(UnstableQueue):
        compute_decay_root(spec_for(1.0, 1))


def test_poisson_weights_sum_and_large_mean():
    w = poisson_weights(40.0, 200)
    assert w.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.isfinite(w))


@pytest.mark.parametrize("G,c", [(0.3, 1), (0.9, 1), (2.5, 5), (13.5, 15)])
def test_state_distribution_matches_embedded_chain(G, c, chain_oracle):
    dist = stationary_distribution(spec_for(G, c))
    ref = chain_oracle(G, c)
    ours = np.array([state_probability(dist, j) for j in range(80)])
    assert np.max(np.abs(ours - ref[:80])) < 1e-9
    assert dist.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_md1_closed_form_low_states():
    rho = 0.6
    dist = stationary_distribution(spec_for(rho, 1))
    p0 = 1 - rho
    assert state_probability(dist, 0) == pytest.approx(p0, abs=1e-12)
    assert state_probability(dist, 1) == pytest.approx(p0 * (math.exp(rho) - 1), abs=1e-12)


@pytest.mark.parametrize("G", [0.1, 0.5, 0.9, 0.99])
def test_md1_waiting_time_pollaczek_khinchine(G):
    spec = spec_for(G, 1, D=0.075)
    assert waiting_time(spec) == pytest.approx(md1_exact_waiting(spec), rel=1e-6)


def test_truncation_is_at_least_c_plus_four():
    for G, c in [(0.2, 1), (10.0, 15)]:
        assert select_truncation(spec_for(G, c)) >= c + 4


def test_negative_or_tiny_truncation_rejected():
    spec = spec_for(0.5, 5)
    with pytest.raises(ValueError):
        solve_state_distribution(spec, TailParams(compute_decay_root(spec), 3))


def test_cumulative_uses_tail_beyond_truncation():
    dist = stationary_distribution(spec_for(0.95, 1))
    M = dist.M
    brute = sum(state_probability(dist, j) for j in range(M + 50))
    assert cumulative_probability(dist, M + 50) == pytest.approx(brute, abs=1e-14)
    assert cumulative_probability(dist, 0) == 0.0


def test_zero_arrival_rate_conventions():
    spec = QueueSpec(0.0, 0.02, 15)
    dist = stationary_distribution(spec)
    assert state_probability(dist, 0) == 1.0
    assert mean_queue_length(dist) == 0.0
    assert waiting_time(spec) == 0.0
    with pytest.raises(ZeroArrivalRate):
        mean_waiting_time(dist)


def test_md1_exact_requires_single_server():
    with pytest.raises(NotSingleServer):
        md1_exact_waiting(spec_for(0.5, 2))


def test_distribution_is_read_only():
    dist = stationary_distribution(spec_for(0.5, 1))
    with pytest.raises(ValueError):
        dist.probs[0] = 1.0


def test_truncation_cap_raises():
    with pytest.raises(NoConvergence):
        select_truncation(spec_for(0.999, 1), rel_tol=1e-15, max_states=32)


@pytest.mark.parametrize("bad", [dict(arrival_rate=-1, service_time=1),
                                 dict(arrival_rate=1, service_time=0),
                                 dict(arrival_rate=1, service_time=1, servers=0)])
def test_queue_spec_validation(bad):
    with pytest.raises(ValueError):
        QueueSpec(**bad)
