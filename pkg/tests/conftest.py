"""Shared fixtures: grids and kernels are expensive, so they are built
once per session and memoized by their parameter key."""

import warnings

import pytest

from spslater.grid import make_grid
from spslater.riesz import build_kernel

_GRIDS = {}
_KERNELS = {}


def get_grid(N, R_max, M, gamma=2.0):
    key = (N, R_max, M, gamma)
    if key not in _GRIDS:
        _GRIDS[key] = make_grid(N, R_max=R_max, M=M, gamma=gamma)
    return _GRIDS[key]


def get_kernel(N, alpha, R_max, M, gamma=2.0):
    key = (N, alpha, R_max, M, gamma)
    if key not in _KERNELS:
        _KERNELS[key] = build_kernel(get_grid(N, R_max, M, gamma), alpha)
    return _KERNELS[key]


@pytest.fixture(autouse=True)
def _silence_truncation_warnings():
    # dilation-transport inits legitimately push mass outside R_max;
    # the warning is part of the contract but noise in the test logs
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        yield
