"""Shared fixtures and the group catalogue used by the verification suites."""

import numpy as np
import pytest

from heatsym import groups
from heatsym.invariance import DEFAULT_EPS_GRID as EPS_GRID


def full_catalogue():
    """Representative instances of every supported group shape.

    Moebius-type entries carry an x_guard; samplers must respect it.
    """
    return [
        groups.Tt(),
        groups.Td(),
        groups.Tx(),
        groups.Tk(-1.5),
        groups.Tk(-2.0),
        groups.Tkp(1.0, 0.0),
        groups.Tkp(-4.0 / 3.0, -1.0 / 3.0),
        groups.Tke(1.0),
        groups.Te(),
        groups.Tc(),
        groups.linear_combination_group(1.0, 0.0, 0.0),
        groups.linear_combination_group(0.8, 0.0, 0.4),
        groups.linear_combination_group(0.5, 0.3, 0.0),
        groups.linear_combination_group(0.5, 0.2, 0.3, k=1.0),
        groups.linear_combination_group(0.5, 0.4, -1.0, k=1.0),
        groups.linear_combination_group(0.7, 0.3, 0.0, k=1.0),
        groups.linear_combination_group(0.3, 0.0, 0.2, l4=0.15, k=-4.0 / 3.0),
        groups.linear_combination_group(0.0, 0.0, 0.0, l4=0.0, k=-4.0 / 3.0),
    ]


def sample_points(rng, n, g):
    """Random (t, x, u) points inside the sampling box, respecting x guards
    for the largest parameter magnitude used by the suites (|eps| <= 2)."""
    pts = []
    while len(pts) < n:
        t = rng.uniform(0.1, 10.0)
        x = rng.uniform(0.0, 10.0)
        u = rng.uniform(0.2, 10.0)
        if all(g.point_ok(e, x) for e in (-2.0, 2.0)):
            pts.append((t, x, u))
    return pts


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
