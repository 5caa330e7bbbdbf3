import math

import numpy as np
import pytest

import fracrd


def test_mittag_leffler_reduces_to_exp():
    z = np.linspace(-5.0, 5.0, 11)
    assert np.allclose(fracrd.mittag_leffler(1.0, z), np.exp(z), rtol=1e-12)
    assert fracrd.mittag_leffler2(0.5, 0.5, 0.0) == pytest.approx(1.0 / math.gamma(0.5))


def test_relaxation_run_decays():
    g = fracrd.Grid(1, 2.0, 33)
    p = fracrd.SimParams()
    p.mu = 0.5
    p.t_end = 0.2
    p.store_stride = 50
    J = fracrd.Kernel(g, fracrd.KernelShape.box, 0.25, 0.1, 0.1)
    t = fracrd.run(g, fracrd.gaussian(g, 0.1, 0.6), p, J)
    assert t.status == "completed"
    assert t.sup_norm[-1] < t.sup_norm[0]
    assert t.fields[-1].shape == (33,)


def test_errors_map_to_python():
    g = fracrd.Grid(1, 1.0, 17)
    p = fracrd.SimParams()
    p.gamma = 0.5
    J = fracrd.Kernel(g, fracrd.KernelShape.box, 0.25, 0.1, 0.1)
    with pytest.raises(fracrd.ParameterError):
        fracrd.run(g, np.zeros(17), p, J)
    with pytest.raises(fracrd.ConfigError):
        fracrd.parse_config("mode = run\n")


def test_config_round_trip_and_roots():
    c = fracrd.parse_config("mode = run\nn = 33\nL = 2\ndt = 1e-3\nt_end = 0.1\nmu = 0.25\n")
    assert fracrd.parse_config(c.echo()) == c
    assert c.sim.mu == 0.25
    r = fracrd.steady_roots(8.0, 1.0, 1.0)
    assert 8.0 * r.a * r.a * (1.0 - r.a) == pytest.approx(r.a)


def test_criterion_one():
    r = fracrd.run_criterion(1)
    assert r.passed, r.detail
    assert len(fracrd.criterion_names()) == 12
