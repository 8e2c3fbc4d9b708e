import numpy as np
import pytest

from gpfr.errors import ConfigurationError, UsageError
from gpfr.nn import Adam, RMSprop, make_optimizer


def test_adam_first_step_has_lr_magnitude_and_descent_sign():
    for g0 in (3.0, -0.01, 250.0):
        w = np.array([1.0])
        opt = Adam([w], lr=1e-3)
        opt.step([np.array([g0])])
        update = w[0] - 1.0
        assert np.sign(update) == -np.sign(g0)
        assert abs(update) == pytest.approx(1e-3, rel=1e-4)


def test_zero_gradients_leave_parameters_unchanged():
    w = np.array([0.5, -0.5])
    for opt in (Adam([w], lr=0.1), RMSprop([w], lr=0.1)):
        before = w.copy()
        for _ in range(10):
            opt.step([np.zeros(2)])
        np.testing.assert_array_equal(w, before)


def test_adam_descends_quadratic_to_near_zero():
    # scalar oracle: 100 steps on f(w)=w^2 from w=1 at lr 0.1 ends at |w|~0.003
    w = np.array([1.0])
    opt = Adam([w], lr=0.1)
    for _ in range(100):
        opt.step([2.0 * w])
    assert abs(w[0]) < 0.05


def test_rmsprop_descends_quadratic():
    w = np.array([1.0])
    opt = RMSprop([w], lr=0.1)
    for _ in range(100):
        opt.step([2.0 * w])
    assert abs(w[0]) < 0.05


def test_accumulators_mirror_parameter_shapes_and_counter_increases():
    a, b = np.zeros((3, 4)), np.zeros(7)
    opt = Adam([a, b])
    assert opt.m[0].shape == (3, 4) and opt.v[1].shape == (7,)
    assert opt.t == 0
    opt.step([np.ones((3, 4)), np.ones(7)])
    opt.step([np.ones((3, 4)), np.ones(7)])
    assert opt.t == 2


def test_shape_mismatch_rejected():
    opt = Adam([np.zeros(3)])
    with pytest.raises(ConfigurationError):
        opt.step([np.zeros(4)])
    with pytest.raises(UsageError):
        opt.step([np.zeros(3), np.zeros(3)])


def test_factory():
    w = [np.zeros(2)]
    assert isinstance(make_optimizer("adam", w, 1e-3), Adam)
    assert isinstance(make_optimizer("rmsprop", w, 1e-3), RMSprop)
    with pytest.raises(UsageError):
        make_optimizer("sgd", w, 1e-3)
