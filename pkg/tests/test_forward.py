import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specbayes import NoiseKind, NoiseModel, Role, Spectrum, WavelengthGrid, render_observations, render_pixel
from specbayes.errors import GridMismatch, RoleConflict, SpectralError

from conftest import make_set

G2 = WavelengthGrid(400.0, 10.0, 2)


def spec(values, role, grid=G2):
    return Spectrum(grid, values, role)


class TestRenderPixel:
    def test_sum_of_ones(self):
        ones = [1.0, 1.0]
        assert render_pixel(spec(ones, Role.ILLUMINATION), spec(ones, Role.REFLECTANCE),
                            spec(ones, Role.SENSITIVITY)) == 2.0

    def test_disjoint_support(self):
        assert render_pixel(spec([1, 0], Role.ILLUMINATION), spec([0, 1], Role.REFLECTANCE),
                            spec([1, 1], Role.SENSITIVITY)) == 0.0

    def test_hand_evaluation(self):
        # 2*0.5*3 + 0*1*7
        assert render_pixel(spec([2, 0], Role.ILLUMINATION), spec([0.5, 1], Role.REFLECTANCE),
                            spec([3, 7], Role.SENSITIVITY)) == pytest.approx(3.0, rel=1e-15)

    def test_grid_mismatch(self):
        other = WavelengthGrid(410.0, 10.0, 2)
        with pytest.raises(GridMismatch):
            render_pixel(spec([1, 1], Role.ILLUMINATION), spec([1, 1], Role.REFLECTANCE, other),
                         spec([1, 1], Role.SENSITIVITY))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.0, 5.0), st.integers(0, 2))
    def test_trilinear(self, s, which):
        rng = np.random.default_rng(3)
        grid = WavelengthGrid(400.0, 10.0, 6)
        roles = list(Role)
        vecs = [rng.uniform(size=6) for _ in range(3)]
        base = render_pixel(*[Spectrum(grid, v, r) for v, r in zip(vecs, roles)])
        vecs[which] = vecs[which] * s
        scaled = render_pixel(*[Spectrum(grid, v, r, bounded=False) for v, r in zip(vecs, roles)])
        assert scaled == pytest.approx(s * base, rel=1e-12, abs=1e-15)


class TestRenderObservations:
    def test_singleton_all_ones(self):
        g = WavelengthGrid(400.0, 10.0, 5)
        E, R, C = (make_set([np.ones(5)], r, g) for r in Role)
        obs = render_observations(E, R, C)
        assert obs.extents == (1, 1, 1)
        assert obs.values[0, 0, 0] == 5.0

    def test_scaling_illumination_doubles(self, scene):
        a = render_observations(scene.illumination, scene.reflectance, scene.sensitivity)
        b = render_observations(scene.illumination.scaled(2.0), scene.reflectance, scene.sensitivity)
        np.testing.assert_allclose(b.values, 2 * a.values, rtol=1e-14)

    def test_bundled_scene_shape_and_channel_order(self, scene):
        obs = render_observations(scene.illumination, scene.reflectance, scene.sensitivity)
        assert obs.extents == (1, 24, 3)
        order = np.argsort(obs.values[0].sum(axis=0))
        # pull the white patch (index 18) halfway toward the neutral patches
        R = scene.reflectance
        members = list(R)
        members[18] = members[18].scaled(0.5)
        from specbayes import SpectrumSet
        dimmer = render_observations(scene.illumination, SpectrumSet(members), scene.sensitivity)
        np.testing.assert_array_equal(np.argsort(dimmer.values[0].sum(axis=0)), order)

    def test_values_match_render_pixel(self, rng):
        g = WavelengthGrid(400.0, 10.0, 7)
        E = make_set(rng.uniform(size=(2, 7)), Role.ILLUMINATION, g)
        R = make_set(rng.uniform(size=(3, 7)), Role.REFLECTANCE, g)
        C = make_set(rng.uniform(size=(2, 7)), Role.SENSITIVITY, g)
        obs = render_observations(E, R, C)
        for i, j, k in np.ndindex(*obs.extents):
            assert obs.values[i, j, k] == pytest.approx(render_pixel(E[i], R[j], C[k]), rel=1e-13)

    def test_permutation_equivariant(self, scene):
        perm = np.random.default_rng(5).permutation(24)
        from specbayes import SpectrumSet
        R = SpectrumSet([scene.reflectance[p] for p in perm])
        a = render_observations(scene.illumination, scene.reflectance, scene.sensitivity)
        b = render_observations(scene.illumination, R, scene.sensitivity)
        np.testing.assert_array_equal(b.values, a.values[:, perm, :])

    def test_role_order_enforced(self, scene):
        with pytest.raises(RoleConflict):
            render_observations(scene.reflectance, scene.illumination, scene.sensitivity)

    def test_same_seed_bit_identical(self, scene):
        n = NoiseModel.gaussian(0.01, seed=7)
        a = render_observations(scene.illumination, scene.reflectance, scene.sensitivity, n)
        b = render_observations(scene.illumination, scene.reflectance, scene.sensitivity, n)
        assert np.array_equal(a.values, b.values)
        c = render_observations(scene.illumination, scene.reflectance, scene.sensitivity,
                                NoiseModel.gaussian(0.01, seed=8))
        assert not np.array_equal(a.values, c.values)

    def test_noise_is_not_clipped(self):
        g = WavelengthGrid(400.0, 10.0, 2)
        E, R, C = (make_set([[0.0, 0.0]], r, g) for r in Role)
        obs = render_observations(E, R, C, NoiseModel.gaussian(1.0, seed=0))
        assert obs.values[0, 0, 0] != 0.0


class TestNoiseModel:
    def test_negative_sigma(self):
        with pytest.raises(SpectralError):
            NoiseModel(NoiseKind.ADDITIVE_GAUSSIAN, -0.1)

    def test_none_ignores_sigma(self):
        n = NoiseModel(NoiseKind.NONE, 0.5, 3)
        assert n.is_noiseless
        np.testing.assert_array_equal(n.draw((2, 2, 2)), 0.0)

    def test_order_independent(self):
        n = NoiseModel.gaussian(0.01, seed=11)
        full = n.draw((2, 4, 3))
        for idx in [(1, 3, 2), (0, 0, 0), (1, 0, 1)]:
            assert full[idx] == n.sample(*idx)

    def test_prefix_stable(self):
        # a bigger tensor shares the noise of the overlapping indices
        n = NoiseModel.gaussian(0.01, seed=4)
        np.testing.assert_array_equal(n.draw((1, 5, 3))[:, :3, :2], n.draw((1, 3, 2)))

    def test_precision(self):
        assert NoiseModel.gaussian(0.01).precision() == pytest.approx(1e4)
        assert NoiseModel().precision() == 1e4
