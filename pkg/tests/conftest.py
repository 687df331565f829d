"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from linkcert import DistanceMatrix


def line_metric(positions) -> DistanceMatrix:
    """Distance matrix of points on the real line (exact |p_i - p_j|)."""
    pts = np.asarray(positions, dtype=float).reshape(-1, 1)
    n = len(pts)
    M = np.abs(pts - pts.T)
    return DistanceMatrix.from_full(M)


@pytest.fixture
def line4() -> DistanceMatrix:
    """Two tight pairs on a line: 0, 1 | 10, 11."""
    return line_metric([0.0, 1.0, 10.0, 11.0])
