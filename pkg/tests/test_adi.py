import numpy as np
import pytest

from adiwave.adi import AdiConfig, fixed_point, time_step_size
from adiwave.errors import ConfigError, NonFinite


@pytest.mark.parametrize("kwargs", [
    {"cfl": 0},
    {"eps": 0},
    {"k_max": 4, "min_iters_before_check": 6},
    {"min_iters_before_check": 0},
    {"coupling": "gauss"},
    {"intermediate_bc": "exact"},
    {"edge_velocity": "free"},
])
def test_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        AdiConfig(**kwargs)


def test_config_defaults():
    cfg = AdiConfig()
    assert (cfg.k_max, cfg.min_iters_before_check, cfg.coupling) == (8, 6, "seidel")
    assert cfg.edges_prescribed("prescribed") and not cfg.edges_prescribed("computed")
    assert AdiConfig(edge_velocity="computed").edges_prescribed("prescribed") is False


def test_time_step():
    assert time_step_size(16, 0.91) == pytest.approx(0.056875)
    assert time_step_size(16, 0.81) == pytest.approx(0.050625)


def _linear_problem(a, b):
    """Scalar-matrix coupling p = A - a v, v = B - b p, solved by iteration."""
    p_full = np.zeros((3, 3))
    p_in = p_full[1:-1, 1:-1]
    vel = np.zeros((1, 1))
    A, B = np.array([[1.0]]), np.array([[2.0]])
    exact_p = (A - a * B) / (1 - a * b)
    return p_full, p_in, vel, (lambda v: A - a * v), (lambda: B - b * p_full[1:-1, 1:-1]), exact_p


def test_fixed_point_converges_and_stops():
    p_full, p_in, vel, up, uv, exact = _linear_problem(0.3, 0.5)
    res = fixed_point(p_in, vel, up, uv, AdiConfig(k_max=50, eps=1e-14), 1e-14)
    assert res.converged and 6 <= res.iters < 50
    assert p_full[1, 1] == pytest.approx(exact[0, 0], rel=1e-13)


def test_loose_eps_stops_at_min_iters():
    _, p_in, vel, up, uv, _ = _linear_problem(0.3, 0.5)
    res = fixed_point(p_in, vel, up, uv, AdiConfig(eps=1e300), 1e300)
    assert res.iters == 6 and res.converged


def test_k_max_caps_iterations():
    _, p_in, vel, up, uv, _ = _linear_problem(0.9, 1.0)
    res = fixed_point(p_in, vel, up, uv, AdiConfig(), 1e-300)
    assert res.iters == 8 and not res.converged


def test_jacobi_needs_more_iterations():
    counts = {}
    for mode in ("seidel", "jacobi"):
        _, p_in, vel, up, uv, _ = _linear_problem(0.5, 0.5)
        cfg = AdiConfig(k_max=200, eps=1e-12, coupling=mode)
        counts[mode] = fixed_point(p_in, vel, up, uv, cfg, 1e-12).iters
    assert counts["seidel"] < counts["jacobi"]


def test_record_residuals_history():
    _, p_in, vel, up, uv, _ = _linear_problem(0.3, 0.5)
    res = fixed_point(p_in, vel, up, uv, AdiConfig(record_residuals=True, eps=1e300), 1e300)
    assert len(res.history) == 6
    assert all(b < a for a, b in zip(res.history, res.history[1:]))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergent_iteration_raises():
    _, p_in, vel, up, uv, _ = _linear_problem(1e200, 1e200)
    with pytest.raises(NonFinite):
        fixed_point(p_in, vel, up, uv, AdiConfig(k_max=8), 1e-9)
