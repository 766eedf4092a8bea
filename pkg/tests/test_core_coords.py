import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affordance_forge.core.coords import (
    GRID,
    CoordinateBoundsError,
    NormalizedCoord,
    PixelPoint,
    denormalize_point,
    normalize_point,
)


class TestNormalizePoint:
    def test_midpoint(self):
        n = normalize_point(PixelPoint(320.0, 240.0), 640, 480)
        assert (n.nx, n.ny) == (500, 500)

    def test_origin(self):
        assert normalize_point(PixelPoint(0.0, 0.0), 640, 480) == NormalizedCoord(0, 0)
        assert normalize_point(PixelPoint(0.0, 0.0), 11, 7) == NormalizedCoord(0, 0)

    def test_near_edge(self):
        # floor(639/640*1000) = floor(998.4375) = 998
        # floor(479/480*1000) = floor(997.9166...) = 997
        n = normalize_point(PixelPoint(639.0, 479.0), 640, 480)
        assert (n.nx, n.ny) == (998, 997)

    def test_out_of_bounds_rejected(self):
        with pytest.raises(CoordinateBoundsError):
            normalize_point(PixelPoint(640.0, 100.0), 640, 480)
        with pytest.raises(CoordinateBoundsError):
            normalize_point(PixelPoint(-0.001, 100.0), 640, 480)

    def test_bad_dims(self):
        with pytest.raises(ValueError):
            normalize_point(PixelPoint(0.0, 0.0), 0, 480)

    def test_clamped_at_extremes(self):
        # A point a hair below the width can floor-round up to GRID; the clamp
        # keeps the result in range.
        w = 640
        p = PixelPoint(np.nextafter(float(w), 0.0), 0.0)
        n = normalize_point(p, w, 480)
        assert n.nx == GRID - 1


class TestDenormalizePoint:
    def test_bin_center(self):
        p = denormalize_point(NormalizedCoord(500, 500), 640, 480)
        assert p.x == pytest.approx(320.32, abs=1e-12)
        assert p.y == pytest.approx(240.24, abs=1e-12)

    def test_first_bin(self):
        p = denormalize_point(NormalizedCoord(0, 0), 1000, 1000)
        assert (p.x, p.y) == (0.5, 0.5)

    def test_result_in_bounds(self):
        for n in (0, 1, 499, 998, 999):
            p = denormalize_point(NormalizedCoord(n, n), 640, 480)
            assert p.in_bounds(640, 480)


class TestRoundTrip:
    @given(
        nx=st.integers(0, GRID - 1),
        ny=st.integers(0, GRID - 1),
        width=st.integers(1, 4096),
        height=st.integers(1, 4096),
    )
    @settings(max_examples=300)
    def test_normalize_after_denormalize_is_identity(self, nx, ny, width, height):
        n = NormalizedCoord(nx, ny)
        p = denormalize_point(n, width, height)
        assert normalize_point(p, width, height) == n

    def test_full_grid_at_fixture_dims(self):
        # Exhaustive per-axis check at 640x480: the axes are independent, so
        # covering all 1000 values per axis covers the full 10^6 grid.
        w, h = 640, 480
        ns = np.arange(GRID)
        for dim in (w, h):
            back = np.floor((ns + 0.5) / GRID * dim / dim * GRID).astype(int)
            np.clip(back, 0, GRID - 1, out=back)
            assert (back == ns).all()


class TestPixelPoint:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            PixelPoint(math.nan, 0.0)
        with pytest.raises(ValueError):
            PixelPoint(0.0, math.inf)

    def test_normalized_coord_range(self):
        with pytest.raises(ValueError):
            NormalizedCoord(1000, 0)
        with pytest.raises(ValueError):
            NormalizedCoord(0, -1)
