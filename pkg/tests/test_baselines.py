import numpy as np
import pytest

from fusedge.baselines import (
    BaselineMethod,
    BaselineParams,
    agdd_only,
    agdd_only_esm,
    color_canny,
    color_canny_esm,
    color_sobel,
    sobel_magnitude,
)
from fusedge.esm import EdgeStrengthMap, color_gradient, normalize_strength
from fusedge.imaging import ColorSpace, PlanarImage
from fusedge.kernels import direction_bank
from fusedge.refine import ThresholdParams, nonmax_suppress

from oracles import sobel_loops


class TestColorSobel:
    def test_constant_image_empty_map(self):
        img = PlanarImage(np.full((8, 8, 3), 0.5), ColorSpace.XYZ)
        assert color_sobel(img, ThresholdParams()).count == 0

    def test_step_edge_line_response(self, step_xyz):
        mag = sobel_magnitude(step_xyz)
        row = mag[8]
        assert row.argmax() in (7, 8)
        assert row[7] > 10 * row[2]

    def test_magnitude_matches_stencil_oracle(self, rng):
        img = PlanarImage(rng.random((8, 8, 3)), ColorSpace.XYZ)
        expected = sum(sobel_loops(img.plane(c)) for c in range(3))
        np.testing.assert_allclose(sobel_magnitude(img), expected, atol=1e-10)

    def test_binarizes_at_high_quantile(self, step_xyz):
        edges = color_sobel(step_xyz, ThresholdParams(high_quantile=0.5))
        assert edges.count > 0
        assert edges.mask[:, 7:9].any()

    def test_wrong_space(self, rng):
        with pytest.raises(ValueError):
            color_sobel(PlanarImage(rng.random((4, 4, 3)), ColorSpace.RGB), ThresholdParams())

    def test_deterministic(self, rng):
        img = PlanarImage(rng.random((12, 12, 3)), ColorSpace.XYZ)
        a = color_sobel(img, ThresholdParams())
        b = color_sobel(img, ThresholdParams())
        assert np.array_equal(a.mask, b.mask)


class TestColorCanny:
    def test_constant_image_empty_map(self):
        img = PlanarImage(np.full((10, 10, 3), 0.4), ColorSpace.XYZ)
        assert color_canny(img, 1.0, ThresholdParams()).count == 0

    def test_clean_step_yields_thin_line(self, step_xyz):
        edges = color_canny(step_xyz, 1.0, ThresholdParams())
        rows_with_edges = edges.mask.any(axis=1)
        assert rows_with_edges.all()
        widths = edges.mask.sum(axis=1)
        assert (widths <= 2).all()  # suppression leaves at most the tied pair

    def test_equals_pipeline_gradient_stage(self, random_xyz):
        # the smoothing lives inside the derivative kernels, so the canny
        # front end must agree field-by-field with the fused chain's
        # gradient stage at the same scale
        sigma = 1.3
        direct = color_gradient(random_xyz, sigma)
        expected = nonmax_suppress(
            EdgeStrengthMap(normalize_strength(direct.strength), direct.orientation)
        )
        actual = color_canny_esm(random_xyz, sigma)
        np.testing.assert_array_equal(actual.strength, expected.strength)
        np.testing.assert_array_equal(actual.orientation, expected.orientation)

    def test_deterministic(self, rng):
        img = PlanarImage(rng.random((12, 12, 3)), ColorSpace.XYZ)
        a = color_canny(img, 1.0, ThresholdParams())
        b = color_canny(img, 1.0, ThresholdParams())
        assert np.array_equal(a.mask, b.mask)


class TestAgddOnly:
    def test_detects_step_edge(self, step_xyz):
        bank = direction_bank(8)
        edges = agdd_only(step_xyz, 1.0, 2.0, 2.0, bank, ThresholdParams())
        assert edges.count > 0
        assert edges.mask[:, 6:10].any(axis=1).all()

    def test_esm_is_normalized(self, step_xyz):
        esm = agdd_only_esm(step_xyz, 1.0, 2.0, 2.0, direction_bank(4))
        assert esm.strength.max() == 1.0

    def test_params_validation(self):
        with pytest.raises(ValueError):
            BaselineParams(method=BaselineMethod.COLOR_CANNY, sigma=0.0)
