import numpy as np
import pytest

from loopcast.errors import ConfigError, UsageError
from loopcast.oracle import (default_horizon, detection_cumulative,
                             exact_enumerate, mc_estimate, simulate_cascade)

from conftest import make_net, PATH3_EDGES


def test_simulate_cascade_deterministic_path(path3):
    trace = simulate_cascade(path3, [0], rng=np.random.default_rng(0))
    assert trace.infection_time[0] == 0
    assert trace.infection_time[1] == 1
    assert trace.infection_time[2] == 2


def test_simulate_cascade_vaccination_blocks(path3):
    trace = simulate_cascade(path3, [0], vaccinated=[1],
                             rng=np.random.default_rng(0))
    assert 2 not in trace.infection_time
    with pytest.raises(UsageError):
        simulate_cascade(path3, [0], vaccinated=[0])


def test_exact_triangle_marginals(triangle):
    est = exact_enumerate(triangle, seeds=[0], horizon=5)
    assert est.marginals[0] == pytest.approx(1.0)
    assert est.marginals[1] == pytest.approx(0.625)
    assert est.marginals[2] == pytest.approx(0.625)
    assert est.expected_size == pytest.approx(2.25)


def test_exact_per_time_marginals(triangle):
    est = exact_enumerate(triangle, seeds=[0], horizon=3)
    # by t=1 node 1 is infected iff the direct edge fired
    assert est.marginals_t[0, 1] == pytest.approx(1.0)
    assert est.marginals_t[1, 1] == pytest.approx(0.5)
    assert est.marginals_t[2, 1] == pytest.approx(0.5)
    assert est.marginals_t[2, 2] == pytest.approx(0.625)
    assert np.all(np.diff(est.marginals_t, axis=1) >= -1e-15)


def test_exact_seed_probs_independent_mixture():
    net = make_net(2, [(0, 1)], 0.5)
    est = exact_enumerate(net, seed_probs=[0.5, 0.0], horizon=3)
    # node 1: seeded never; infected iff 0 seeded and edge fires
    assert est.marginals[0] == pytest.approx(0.5)
    assert est.marginals[1] == pytest.approx(0.25)


def test_exact_detection_distribution(path3):
    est = exact_enumerate(path3, seeds=[0], sentinels=[2], horizon=4)
    # p=1 path: the sentinel is reached at exactly t=2
    assert est.detection[2] == pytest.approx(1.0)
    assert est.detection[:2] == pytest.approx([0.0, 0.0])
    assert detection_cumulative(est)[-1] == pytest.approx(1.0)


def test_exact_input_validation(triangle):
    with pytest.raises(UsageError):
        exact_enumerate(triangle)
    with pytest.raises(UsageError):
        exact_enumerate(triangle, seeds=[0], seed_probs=[1, 0, 0])


def test_mc_agrees_with_exact(triangle):
    est = mc_estimate(triangle, seeds=[0], n_sims=200_000, seed=3)
    ref = exact_enumerate(triangle, seeds=[0], horizon=default_horizon(triangle))
    assert est.marginals == pytest.approx(ref.marginals, abs=0.005)
    assert est.expected_size == pytest.approx(ref.expected_size, abs=0.01)
    assert est.std_err.max() < 0.005


def test_mc_uniform_seed_mode(triangle):
    est = mc_estimate(triangle, uniform_seed_over=[0, 1, 2], n_sims=100_000,
                      seed=4)
    # symmetric graph: every node has the same marginal
    assert est.marginals.std() < 0.01
    assert est.marginals.mean() == pytest.approx(0.75, abs=0.01)


def test_mc_sentinel_detection(path3):
    est = mc_estimate(path3, seeds=[0], sentinels=[2], n_sims=1000, seed=5)
    assert est.detection[2] == pytest.approx(1.0)


def test_mc_input_validation(triangle):
    with pytest.raises(UsageError):
        mc_estimate(triangle, seeds=[0], uniform_seed_over=[1])
    with pytest.raises(ConfigError):
        mc_estimate(triangle, seeds=[0], n_sims=0)


def test_mc_reproducible(triangle):
    a = mc_estimate(triangle, seeds=[0], n_sims=500, seed=9)
    b = mc_estimate(triangle, seeds=[0], n_sims=500, seed=9)
    assert np.array_equal(a.marginals, b.marginals)


def test_exact_horizon_truncation():
    # chain longer than the requested horizon: final marginal still uses
    # full propagation, per-time arrays stop at the horizon
    net = make_net(4, [(0, 1), (1, 2), (2, 3)], 1.0)
    est = exact_enumerate(net, seeds=[0], horizon=1)
    assert est.marginals_t.shape == (4, 2)
    assert est.marginals_t[3, 1] == pytest.approx(0.0)
    assert est.marginals[3] == pytest.approx(1.0)
