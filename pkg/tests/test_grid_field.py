"""Grids, transforms, reality, Parseval, and field persistence."""

import numpy as np
import pytest

from shearlab.core import (Grid, from_function, inverse_transform, load_field,
                           parseval_defect, reality_defect, save_field,
                           transform, zero_field)


class TestGrid:
    def test_power_of_two_required(self):
        with pytest.raises(ValueError):
            Grid.periodic(24, 32)
        with pytest.raises(ValueError):
            Grid.periodic(32, 24)
        with pytest.raises(ValueError):
            Grid.periodic(4, 32)

    def test_channel_ordering(self):
        with pytest.raises(ValueError):
            Grid.channel(32, 32, a=2.0, b=1.0)

    def test_channel_excludes_zero(self):
        assert Grid.channel(32, 32, a=1.0, b=2.0).channel_excludes_zero
        assert Grid.channel(32, 32, a=-2.0, b=-1.0).channel_excludes_zero
        assert not Grid.channel(32, 32, a=-1.0, b=1.0).channel_excludes_zero

    def test_wavenumbers_integer_on_default_period(self, box):
        assert np.allclose(box.k, np.round(box.k))
        assert box.deta == pytest.approx(1.0)

    def test_channel_nodes_interior(self, channel):
        y = channel.y
        assert y[0] > channel.a and y[-1] < channel.b
        assert np.allclose(np.diff(y), channel.dy)

    def test_description_roundtrip(self, box, channel):
        for g in (box, channel):
            assert Grid.from_description(g.describe()) == g


class TestTransforms:
    def test_constant_field_mean_mode(self, box):
        u = transform(box, np.ones((box.nx, box.ny)))
        assert u.coeffs[0, 0] == pytest.approx(1.0)
        off = u.coeffs.copy()
        off[0, 0] = 0.0
        assert np.max(np.abs(off)) < 1e-14

    def test_sin_x_coefficients(self, box):
        u = from_function(box, lambda X, Y: np.sin(X))
        assert u.coeffs[1, 0] == pytest.approx(-0.5j, abs=1e-14)
        assert u.coeffs[-1, 0] == pytest.approx(0.5j, abs=1e-14)

    def test_roundtrip_white_noise(self, box, rng):
        samples = rng.normal(size=(box.nx, box.ny))
        back = inverse_transform(transform(box, samples)).real
        assert np.max(np.abs(back - samples)) < 1e-12

    def test_reality_invariant(self, box, channel, rng):
        for g in (box, channel):
            u = transform(g, rng.normal(size=(g.nx, g.ny)))
            assert reality_defect(u) < 1e-13

    def test_parseval(self, box, channel, rng):
        for g in (box, channel):
            u = transform(g, rng.normal(size=(g.nx, g.ny)))
            assert parseval_defect(u) < 1e-12

    def test_rejects_bad_input(self, box):
        with pytest.raises(ValueError):
            transform(box, np.ones((3, 3)))
        bad = np.ones((box.nx, box.ny))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            transform(box, bad)


class TestSerialization:
    def test_roundtrip(self, tmp_path, channel, rng):
        u = transform(channel, rng.normal(size=(channel.nx, channel.ny)))
        u.frame, u.frame_time = "lagrangian", 2.5
        path = tmp_path / "field.bin"
        save_field(u, path)
        v = load_field(path)
        assert v.grid == u.grid
        assert v.frame == "lagrangian" and v.frame_time == 2.5
        assert np.array_equal(v.coeffs, u.coeffs)

    def test_sidecar_schema_checked(self, tmp_path, box):
        path = tmp_path / "f.bin"
        save_field(zero_field(box), path)
        sidecar = path.with_suffix(".bin.json")
        sidecar.write_text(sidecar.read_text().replace(
            "shearlab-field-v1", "other"))
        with pytest.raises(ValueError):
            load_field(path)
