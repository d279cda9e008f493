import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "code"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def d1(func, t, h=1e-3):
    """6th-order central difference of the first derivative"""
    return (-func(t - 3 * h) + 9 * func(t - 2 * h) - 45 * func(t - h)
            + 45 * func(t + h) - 9 * func(t + 2 * h) + func(t + 3 * h)) / (60 * h)


def d2(func, x, h=1e-3):
    """6th-order central difference of the second derivative"""
    return (2 * func(x - 3 * h) - 27 * func(x - 2 * h) + 270 * func(x - h) - 490 * func(x)
            + 270 * func(x + h) - 27 * func(x + 2 * h) + 2 * func(x + 3 * h)) / (180 * h ** 2)
