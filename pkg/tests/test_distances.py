"""Distance matrices, blending, and the Gaussian kernel."""

import numpy as np
import pytest

from cwreg.distances import (
    DistanceSpec,
    attribute_distances,
    blend_distances,
    gaussian_weights,
    geographic_distances,
    training_scale,
)
from cwreg.errors import DimensionError, ParameterError

from conftest import brute_force_distance_matrix


class TestGeographicDistances:
    def test_matches_coordinate_loop_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            A = rng.uniform(-50, 50, size=(rng.integers(1, 12), 2))
            B = rng.uniform(-50, 50, size=(rng.integers(1, 12), 2))
            got = geographic_distances(A, B)
            np.testing.assert_allclose(got, brute_force_distance_matrix(A, B),
                                       rtol=0, atol=1e-12)

    def test_345_triangle(self):
        D = geographic_distances([[0.0, 0.0]], [[3.0, 4.0]])
        assert D.shape == (1, 1)
        assert D[0, 0] == pytest.approx(5.0, abs=1e-15)

    def test_self_distance_zero_diagonal(self):
        rng = np.random.default_rng(9)
        A = rng.uniform(0, 100, size=(25, 2))
        D = geographic_distances(A, A)
        np.testing.assert_allclose(np.diag(D), 0.0, atol=1e-9)
        np.testing.assert_allclose(D, D.T, atol=1e-9)

    def test_rejects_wrong_coordinate_width(self):
        with pytest.raises(DimensionError):
            geographic_distances([[0.0, 0.0, 0.0]], [[1.0, 1.0, 1.0]])


class TestAttributeDistances:
    def test_matches_loop_oracle_any_width(self):
        rng = np.random.default_rng(4)
        for p in (1, 2, 5):
            A = rng.normal(size=(8, p))
            B = rng.normal(size=(6, p))
            got = attribute_distances(A, B)
            np.testing.assert_allclose(got, brute_force_distance_matrix(A, B),
                                       rtol=0, atol=1e-12)

    def test_zero_columns_gives_zero_matrix(self):
        # No attributes selected: every pair is at distance 0.
        D = attribute_distances(np.empty((4, 0)), np.empty((3, 0)))
        assert D.shape == (4, 3)
        assert np.all(D == 0.0)

    def test_rejects_mismatched_widths(self):
        with pytest.raises(DimensionError):
            attribute_distances(np.zeros((3, 2)), np.zeros((3, 3)))


class TestDistanceSpec:
    def test_rejects_r_outside_unit_interval(self):
        for bad in (-0.01, 1.01, np.nan):
            with pytest.raises(ParameterError):
                DistanceSpec(r=bad, attribute_columns=("x1",))

    def test_requires_attribute_columns_when_blending(self):
        with pytest.raises(ParameterError):
            DistanceSpec(r=0.5, attribute_columns=())

    def test_pure_geographic_needs_no_columns(self):
        spec = DistanceSpec(r=1.0)
        assert spec.attribute_columns == ()

    def test_rejects_unknown_normalization(self):
        with pytest.raises(ParameterError):
            DistanceSpec(r=1.0, normalization="minmax")


class TestBlendDistances:
    def setup_method(self):
        rng = np.random.default_rng(7)
        self.geo = np.abs(rng.normal(size=(10, 10)))
        self.attr = np.abs(rng.normal(size=(10, 10)))

    def test_convex_combination(self):
        # d = r * d_geo + (1 - r) * d_attr, entrywise.
        for r in (0.0, 0.25, 0.5, 0.8, 1.0):
            spec = DistanceSpec(r=r, attribute_columns=("x1",))
            got = blend_distances(self.geo, self.attr, spec)
            np.testing.assert_allclose(got, r * self.geo + (1 - r) * self.attr,
                                       atol=1e-15)

    def test_endpoints_are_exact_copies(self):
        pure_geo = blend_distances(self.geo, self.attr, DistanceSpec(r=1.0))
        np.testing.assert_array_equal(pure_geo, self.geo)
        pure_attr = blend_distances(
            self.geo, self.attr, DistanceSpec(r=0.0, attribute_columns=("x1",)))
        np.testing.assert_array_equal(pure_attr, self.attr)

    def test_monotone_between_endpoints(self):
        # Each blended entry lies between the two source entries.
        spec = DistanceSpec(r=0.37, attribute_columns=("x1",))
        got = blend_distances(self.geo, self.attr, spec)
        lo = np.minimum(self.geo, self.attr)
        hi = np.maximum(self.geo, self.attr)
        assert np.all(got >= lo - 1e-12)
        assert np.all(got <= hi + 1e-12)

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DimensionError):
            blend_distances(self.geo, self.attr[:5],
                            DistanceSpec(r=0.5, attribute_columns=("x1",)))


class TestGaussianWeights:
    def test_reference_values(self):
        # exp(-(d/h)^2) at d=h and d=2h; no factor 2 in the exponent.
        w = gaussian_weights(np.array([[1.0, 2.0]]), 1.0)
        assert w[0, 0] == pytest.approx(0.36787944117144233, abs=1e-16)
        assert w[0, 1] == pytest.approx(0.018315638888734179, abs=1e-16)

    def test_zero_distance_weight_one(self):
        assert gaussian_weights(np.zeros((3, 3)), 5.0).min() == 1.0

    def test_strictly_decreasing_in_distance(self):
        d = np.linspace(0, 10, 200)
        w = gaussian_weights(d, 2.5)
        assert np.all(np.diff(w) < 0)

    def test_scale_invariance(self):
        # Scaling d and h together leaves the weights unchanged.
        rng = np.random.default_rng(12)
        d = np.abs(rng.normal(size=50))
        for c in (0.1, 3.0, 1e4):
            np.testing.assert_allclose(gaussian_weights(d, 1.7),
                                       gaussian_weights(c * d, c * 1.7),
                                       rtol=1e-12)

    def test_bandwidth_must_be_positive(self):
        for bad in (0.0, -1.0, np.nan, np.inf):
            with pytest.raises(ParameterError):
                gaussian_weights(np.ones((2, 2)), bad)

    def test_negative_distances_rejected(self):
        with pytest.raises(ParameterError):
            gaussian_weights(np.array([-0.5]), 1.0)


class TestTrainingScale:
    def test_max_entry(self):
        D = np.array([[0.0, 2.0], [2.0, 0.0]])
        assert training_scale(D) == 2.0

    def test_degenerate_all_zero_scale_is_one(self):
        # Avoids a 0/0 when every pairwise distance is zero.
        assert training_scale(np.zeros((4, 4))) == 1.0

    def test_scaled_matrix_has_unit_max(self):
        rng = np.random.default_rng(21)
        D = np.abs(rng.normal(size=(15, 15))) * 37.0
        assert (D / training_scale(D)).max() == pytest.approx(1.0)
