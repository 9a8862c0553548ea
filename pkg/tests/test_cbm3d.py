import numpy as np
import pytest

from fusedge.cbm3d import (
    BlockGroup,
    Cbm3dParams,
    aggregate,
    block_match,
    cbm3d_denoise,
    dct_matrix,
    gather_patches,
    haar_matrix,
    hard_threshold_group,
    inverse_transform_group,
    plan_groups,
    reference_grid,
    transform_group,
)
from fusedge.colorspace import xyz_to_yuv
from fusedge.imaging import ColorSpace, NoiseParams, PlanarImage, add_gaussian_noise
from fusedge.metrics import psnr_mse

from oracles import dct_2d_direct, exhaustive_block_match


class TestTransforms:
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_dct_orthonormal(self, n):
        d = dct_matrix(n)
        np.testing.assert_allclose(d @ d.T, np.eye(n), atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
    def test_haar_orthonormal(self, n):
        h = haar_matrix(n)
        np.testing.assert_allclose(h @ h.T, np.eye(n), atol=1e-12)

    def test_haar_requires_power_of_two(self):
        with pytest.raises(ValueError):
            haar_matrix(6)

    def test_haar_first_row_is_scaling_vector(self):
        h = haar_matrix(8)
        np.testing.assert_allclose(h[0], np.full(8, 1 / np.sqrt(8)), atol=1e-12)

    def test_single_block_spectrum_matches_direct_oracle(self):
        patch = np.array([[1.0, 0.0], [0.0, 0.0]])
        coeffs = transform_group(patch[np.newaxis])
        expected = dct_2d_direct(patch)  # one-block Haar is the identity
        np.testing.assert_allclose(coeffs[0], expected, atol=1e-9)

    def test_energy_conserved(self, rng):
        patches = rng.standard_normal((8, 4, 4))
        coeffs = transform_group(patches)
        assert np.sum(coeffs**2) == pytest.approx(np.sum(patches**2), abs=1e-6)

    def test_round_trip(self, rng):
        patches = rng.standard_normal((4, 8, 8))
        np.testing.assert_allclose(
            inverse_transform_group(transform_group(patches)), patches, atol=1e-12
        )


class TestBlockMatch:
    def test_params_validation(self):
        with pytest.raises(ValueError):
            Cbm3dParams(max_group=12)
        with pytest.raises(ValueError):
            Cbm3dParams(block_size=1)
        with pytest.raises(ValueError):
            Cbm3dParams(sigma=-0.1)

    def test_flat_image_group(self):
        p = Cbm3dParams(block_size=4, search_radius=6, max_group=16)
        plane = np.full((24, 24), 0.5)
        group = block_match(plane, (10, 10), p)
        assert group.size == 16
        assert group.reference == 0
        assert tuple(group.coords[0]) == (10, 10)
        # remaining members are the earliest window blocks in row-major order
        expected = []
        for r in range(4, 17):
            for c in range(4, 17):
                if (r, c) != (10, 10):
                    expected.append((r, c))
                if len(expected) == 15:
                    break
            if len(expected) == 15:
                break
        assert [tuple(x) for x in group.coords[1:]] == expected

    def test_two_member_constructed_case(self):
        # adjacent linspace blocks differ by MSE ~5e-5, the planted duplicate
        # by exactly 0; the threshold separates the two
        p = Cbm3dParams(block_size=2, search_radius=8, max_group=8, match_threshold=1e-6)
        plane = np.linspace(0, 1, 12 * 12).reshape(12, 12)
        plane[8:10, 8:10] = plane[2:4, 2:4]
        group = block_match(plane, (2, 2), p)
        assert group.size == 2
        assert [tuple(c) for c in group.coords] == [(2, 2), (8, 8)]

    def test_matches_exhaustive_oracle(self, rng):
        p = Cbm3dParams(block_size=8, search_radius=19, max_group=16)
        for _ in range(5):
            plane = rng.random((32, 32))
            ref = (int(rng.integers(0, 25)), int(rng.integers(0, 25)))
            group = block_match(plane, ref, p)
            expected = exhaustive_block_match(plane, ref, p)
            assert [tuple(c) for c in group.coords] == expected

    def test_group_size_is_power_of_two(self, rng):
        p = Cbm3dParams(block_size=4, search_radius=5, max_group=16)
        plane = rng.random((20, 20))
        for ref in reference_grid(20, 20, p):
            size = block_match(plane, ref, p).size
            assert size & (size - 1) == 0

    def test_determinism(self, rng):
        p = Cbm3dParams(block_size=4, search_radius=8)
        plane = rng.random((24, 24))
        a = block_match(plane, (6, 6), p)
        b = block_match(plane, (6, 6), p)
        assert np.array_equal(a.coords, b.coords)

    def test_out_of_bounds_reference(self):
        with pytest.raises(ValueError):
            block_match(np.zeros((8, 8)), (5, 5), Cbm3dParams(block_size=4))


class TestReferenceGrid:
    def test_covers_every_pixel(self):
        p = Cbm3dParams(block_size=8, step=3)
        covered = np.zeros((20, 27), dtype=bool)
        for r, c in reference_grid(20, 27, p):
            covered[r : r + 8, c : c + 8] = True
        assert covered.all()

    def test_flush_positions_present(self):
        p = Cbm3dParams(block_size=8, step=3)
        grid = reference_grid(20, 20, p)
        assert (12, 12) in grid  # 20 - 8 appended on both axes


class TestHardThreshold:
    def test_zero_sigma_identity(self, rng):
        p = Cbm3dParams(sigma=0.0)
        group = BlockGroup(
            coords=np.array([[0, 0], [4, 4]]), patches=rng.random((2, 8, 8)), reference=0
        )
        filtered, weight = hard_threshold_group(group, p)
        np.testing.assert_allclose(filtered.patches, group.patches, atol=1e-6)
        assert weight == 1.0 / (2 * 64)

    def test_constant_group_preserved_by_dc_exemption(self):
        p = Cbm3dParams(sigma=10.0)  # absurd threshold: everything but DC dies
        group = BlockGroup(
            coords=np.array([[0, 0], [2, 2], [4, 4], [6, 6]]),
            patches=np.full((4, 4, 4), 0.37),
            reference=0,
        )
        filtered, weight = hard_threshold_group(group, p)
        np.testing.assert_allclose(filtered.patches, 0.37, atol=1e-12)
        assert weight == 1.0

    def test_thresholding_is_contraction(self, rng):
        p = Cbm3dParams(sigma=0.15)
        group = BlockGroup(
            coords=np.array([[0, 0], [3, 3]]), patches=rng.random((2, 4, 4)), reference=0
        )
        before = transform_group(group.patches)
        filtered, _ = hard_threshold_group(group, p)
        after = transform_group(filtered.patches)
        assert (np.abs(after) <= np.abs(before) + 1e-9).all()

    def test_weight_counts_survivors(self, rng):
        p = Cbm3dParams(sigma=0.15, hard_lambda=2.7)
        group = BlockGroup(
            coords=np.array([[0, 0], [3, 3]]), patches=rng.random((2, 4, 4)), reference=0
        )
        coeffs = transform_group(group.patches)
        mask = np.abs(coeffs) >= p.hard_lambda * p.sigma
        mask[0, 0, 0] = True
        _, weight = hard_threshold_group(group, p)
        assert weight == 1.0 / max(1, int(mask.sum()))


class TestAggregate:
    def test_single_constant_group(self):
        base = np.zeros((12, 12))
        group = BlockGroup(coords=np.array([[2, 2]]), patches=np.full((1, 4, 4), 0.8), reference=0)
        out = aggregate([(group, 1.0)], base)
        np.testing.assert_array_equal(out[2:6, 2:6], 0.8)
        assert out[0, 0] == 0.0

    def test_two_overlapping_blocks_average(self):
        base = np.zeros((8, 8))
        g1 = BlockGroup(coords=np.array([[0, 0]]), patches=np.full((1, 4, 4), 0.2), reference=0)
        g2 = BlockGroup(coords=np.array([[0, 2]]), patches=np.full((1, 4, 4), 0.6), reference=0)
        out = aggregate([(g1, 1.0), (g2, 1.0)], base)
        np.testing.assert_allclose(out[0:4, 2:4], 0.4, atol=1e-12)

    def test_uncovered_pixels_copy_base(self, rng):
        base = rng.random((10, 10))
        group = BlockGroup(coords=np.array([[0, 0]]), patches=np.zeros((1, 4, 4)), reference=0)
        out = aggregate([(group, 0.5)], base)
        np.testing.assert_array_equal(out[5:, 5:], base[5:, 5:])

    def test_matches_naive_accumulator(self, rng):
        base = rng.random((16, 16))
        groups = []
        for _ in range(5):
            coords = rng.integers(0, 12, size=(4, 2))
            groups.append(
                (BlockGroup(coords=coords, patches=rng.random((4, 4, 4)), reference=0),
                 float(rng.random()) + 0.1)
            )
        out = aggregate(groups, base)
        num = np.zeros_like(base)
        den = np.zeros_like(base)
        for group, weight in groups:
            for (r, c), patch in zip(group.coords, group.patches):
                num[r : r + 4, c : c + 4] += weight * patch
                den[r : r + 4, c : c + 4] += weight
        expected = np.where(den > 0, num / np.where(den > 0, den, 1.0), base)
        np.testing.assert_allclose(out, expected, atol=1e-9)

    def test_block_outside_bounds_rejected(self):
        group = BlockGroup(coords=np.array([[7, 7]]), patches=np.zeros((1, 4, 4)), reference=0)
        with pytest.raises(ValueError):
            aggregate([(group, 1.0)], np.zeros((8, 8)))


class TestDenoise:
    def make_two_tone(self, seed=42):
        data = np.full((64, 64, 3), 0.25)
        data[:, 32:, :] = 0.75
        clean = PlanarImage(data, ColorSpace.XYZ)
        noisy = add_gaussian_noise(clean, NoiseParams(variance=0.01, seed=seed))
        return clean, noisy

    def test_zero_sigma_is_identity(self, rng):
        img = PlanarImage(rng.random((24, 24, 3)), ColorSpace.XYZ)
        out = cbm3d_denoise(img, Cbm3dParams(sigma=0.0))
        assert np.abs(out.data - img.data).max() < 1e-5

    def test_psnr_improves_on_piecewise_constant(self):
        clean, noisy = self.make_two_tone()
        denoised = cbm3d_denoise(noisy, Cbm3dParams(sigma=0.1))
        psnr_noisy, _ = psnr_mse(noisy, clean)
        psnr_denoised, _ = psnr_mse(denoised, clean)
        assert psnr_denoised >= psnr_noisy + 5.0

    def test_variance_reduction_on_flat_regions(self):
        clean, noisy = self.make_two_tone()
        denoised = cbm3d_denoise(noisy, Cbm3dParams(sigma=0.1))
        residual = denoised.data - clean.data
        for region in (residual[4:-4, 4:28, :], residual[4:-4, 36:-4, :]):
            assert region.var() <= 0.1 * 0.01

    def test_wrong_space_rejected(self, rng):
        img = PlanarImage(rng.random((16, 16, 3)), ColorSpace.RGB)
        with pytest.raises(ValueError):
            cbm3d_denoise(img, Cbm3dParams(sigma=0.1))

    def test_image_smaller_than_block_rejected(self):
        img = PlanarImage(np.zeros((4, 4, 3)), ColorSpace.XYZ)
        with pytest.raises(ValueError):
            cbm3d_denoise(img, Cbm3dParams(block_size=8, sigma=0.1))

    def test_matching_ignores_chrominance(self, rng):
        base = rng.random((32, 32, 3)) * 0.5 + 0.25
        img = PlanarImage(base, ColorSpace.XYZ)
        # shift X up and Z down by the same amount: luminance (the channel
        # mean) is untouched while both chrominance planes move
        delta = 0.05 * rng.random((32, 32))
        perturbed_data = base.copy()
        perturbed_data[:, :, 0] += delta
        perturbed_data[:, :, 2] -= delta
        perturbed = PlanarImage(perturbed_data, ColorSpace.XYZ)
        p = Cbm3dParams(block_size=8, step=5, search_radius=6, sigma=0.05)
        lum_a = xyz_to_yuv(img).plane(0)
        lum_b = xyz_to_yuv(perturbed).plane(0)
        np.testing.assert_allclose(lum_a, lum_b, atol=1e-12)
        groups_a = plan_groups(lum_a, p)
        groups_b = plan_groups(lum_b, p)
        assert len(groups_a) == len(groups_b)
        for ga, gb in zip(groups_a, groups_b):
            assert np.array_equal(ga.coords, gb.coords)

    def test_grouping_determinism(self, rng):
        plane = rng.random((32, 32))
        p = Cbm3dParams(block_size=8, step=4, search_radius=8)
        a = plan_groups(plane, p)
        b = plan_groups(plane, p)
        for ga, gb in zip(a, b):
            assert np.array_equal(ga.coords, gb.coords)

    def test_gather_patches_uses_same_coords(self, rng):
        plane = rng.random((16, 16))
        other = rng.random((16, 16))
        p = Cbm3dParams(block_size=4, search_radius=4)
        group = block_match(plane, (4, 4), p)
        regathered = gather_patches(other, group)
        assert np.array_equal(regathered.coords, group.coords)
        r, c = regathered.coords[0]
        np.testing.assert_array_equal(regathered.patches[0], other[r : r + 4, c : c + 4])
