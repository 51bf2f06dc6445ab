import numpy as np
import pytest

from hapvec._kernels import BACKENDS, HAVE_NUMBA, run_mdc
from hapvec.config import ScenarioConfig
from hapvec.des import (
    SimConfig,
    batch_means_se,
    dispersion_index,
    hap_arrival_times,
    simulate_mdc,
    simulate_system,
)
from hapvec.errors import UnstableQueue
from hapvec.queueing import QueueSpec, md1_exact_waiting, stationary_distribution, waiting_time

backends = [b for b in BACKENDS if b != "numba" or HAVE_NUMBA]


def test_hand_traced_single_server():
    arr = np.array([0.0, 0.5, 0.6, 3.0, 3.0])
    for b in backends:
        w, seen, aq, asys = run_mdc(arr, 1.0, 1, 0.0, 5.0, backend=b)
        np.testing.assert_allclose(w, [0.0, 0.5, 1.4, 0.0, 1.0])
        # frame 2 departs at t = 3 together with the arrivals, which see it
        np.testing.assert_array_equal(seen, [0, 1, 2, 1, 2])
        assert aq == pytest.approx(0.5 + 1.4 + 1.0)
        assert asys == pytest.approx(aq + 5.0)


def test_tied_arrival_and_departure_sees_departing_frame():
    # departure at t = 1 and arrival at t = 1: the arrival is processed first
    arr = np.array([0.0, 1.0])
    for b in backends:
        _, seen, _, _ = run_mdc(arr, 1.0, 1, backend=b)
        assert list(seen) == [0, 1]


def test_multi_server_waits():
    arr = np.array([0.0, 0.1, 0.2, 0.3])
    for b in backends:
        w, seen, _, _ = run_mdc(arr, 1.0, 2, backend=b)
        np.testing.assert_allclose(w, [0.0, 0.0, 0.8, 0.8])
        np.testing.assert_array_equal(seen, [0, 1, 2, 3])


@pytest.mark.parametrize("c,G", [(1, 0.8), (5, 4.0), (15, 12.0)])
def test_backends_agree(c, G):
    rng = np.random.default_rng(7)
    arr = np.cumsum(rng.exponential(1.0 / G, 20_000))
    ref = run_mdc(arr, 1.0, c, 100.0, arr[-1], backend="python")
    for b in backends:
        out = run_mdc(arr, 1.0, c, 100.0, arr[-1], backend=b)
        np.testing.assert_allclose(out[0], ref[0], atol=1e-9)
        np.testing.assert_array_equal(out[1], ref[1])
        assert out[2] == pytest.approx(ref[2], rel=1e-9)


def test_unknown_backend():
    with pytest.raises(ValueError):
        run_mdc(np.array([0.0]), 1.0, 1, backend="fortran")


def test_same_seed_same_stats():
    spec = QueueSpec(0.7, 1.0, 1)
    a = simulate_mdc(spec, 50_000, seed=11)
    b = simulate_mdc(spec, 50_000, seed=11)
    c = simulate_mdc(spec, 50_000, seed=12)
    assert a.mean_latency == b.mean_latency
    assert a.mean_latency != c.mean_latency


def test_md1_wait_and_littles_law():
    spec = QueueSpec(0.8, 1.0, 1)
    st = simulate_mdc(spec, 1_000_000, seed=3)
    q = st["queue"]
    exact = md1_exact_waiting(spec)
    assert abs(q.mean_wait - exact) < 4 * q.mean_wait_se + 0.01 * exact
    # L_q = lambda W on the sample path
    assert q.time_avg_queue == pytest.approx(q.arrival_rate * q.mean_wait, rel=0.01)


def test_arrival_histogram_close_to_analysis():
    spec = QueueSpec(9.0, 1.0, 15)
    st = simulate_mdc(spec, 500_000, seed=5)
    sim = st["queue"].state_probs
    dist = stationary_distribution(spec)
    n = max(sim.size, dist.M + 1)
    p = np.array([dist.probs[j] if j <= dist.M else 0.0 for j in range(n)])
    s = np.pad(sim, (0, n - sim.size))
    assert 0.5 * np.abs(p - s).sum() < 0.01


def test_unstable_queue_refused():
    with pytest.raises(UnstableQueue):
        simulate_mdc(QueueSpec(1.0, 1.0, 1), 10_000, seed=0)


def test_sim_config_validation():
    with pytest.raises(ValueError):
        SimConfig(ScenarioConfig(), 0.5, frame_budget=100)
    with pytest.raises(ValueError):
        SimConfig(ScenarioConfig(), 0.5, warmup_fraction=0.6)


def test_system_paths_and_latency():
    cfg = ScenarioConfig()
    st = simulate_system(SimConfig(cfg, 0.5, 200_000, seed=1), keep_trace=True)
    assert set(st.paths) == {"gv", "hap"}
    assert st.frames == st.trace.gen_time.size
    frac = st.paths["hap"].frames / st.frames
    assert frac == pytest.approx(0.5, abs=0.01)
    assert np.all(np.diff(st.trace.gen_time) >= 0)
    assert st["gv"].mean_wait == pytest.approx(waiting_time(QueueSpec(5.0, 0.075, 1)), rel=0.05)


def test_endpoints_have_single_path():
    cfg = ScenarioConfig()
    assert set(simulate_system(SimConfig(cfg, 0.0, 20_000)).paths) == {"gv"}
    cfg5 = cfg.with_param("C_HAP", 5000e9)
    assert set(simulate_system(SimConfig(cfg5, 1.0, 20_000)).paths) == {"hap"}


def test_thinned_superposition_is_poisson():
    sim = SimConfig(ScenarioConfig(), 0.4, 400_000, seed=2)
    t = hap_arrival_times(sim)
    assert dispersion_index(t, 0.05) == pytest.approx(1.0, abs=0.05)


def test_batch_means_se_iid():
    x = np.random.default_rng(0).normal(size=32_000)
    assert batch_means_se(x) == pytest.approx(1 / np.sqrt(32_000), rel=0.35)
