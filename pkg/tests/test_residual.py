"""Gain/gamma residual math: scalar cases, round trips, and state machine."""

import numpy as np
import pytest

from gainmap import (
    ColorSpace,
    DomainError,
    ImageBuffer,
    MetadataError,
    Primaries,
    ResidualKind,
    ResidualMap,
    ShapeError,
    StateError,
    Transfer,
    compute_gain,
    compute_gamma,
    denormalize_residual,
    normalize_residual,
    reconstruct,
)
from gainmap.residual import ResidualMetadata

SPACE = ColorSpace(Primaries.BT2020, Transfer.PQ)


def _img(values):
    arr = np.asarray(values, dtype=np.float32)
    if arr.ndim == 0:
        arr = np.full((3, 2, 2), float(arr), dtype=np.float32)
    return ImageBuffer.from_planar(arr, SPACE)


def _random_pair(seed, lo=0.1, hi=0.8, shape=(3, 64, 64)):
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    h = _img(rng.uniform(lo, hi, shape).astype(np.float32))
    s = _img(rng.uniform(lo, hi, shape).astype(np.float32))
    return h, s


class TestComputeGain:
    def test_identity_pair(self):
        h = _img(0.37)
        r = compute_gain(h, h, epsilon=1 / 64)
        np.testing.assert_allclose(r.map.data, 1.0, atol=1e-7)
        assert r.kind == ResidualKind.GAIN
        assert not r.normalized

    def test_scalar_extremes(self):
        eps = 1 / 64
        r = compute_gain(_img(1.0), _img(0.0), epsilon=eps)
        np.testing.assert_allclose(r.map.data, (1 + eps) / eps, rtol=1e-6)
        np.testing.assert_allclose(float(r.map.data[0, 0, 0]), 65.0, rtol=1e-6)
        r = compute_gain(_img(0.0), _img(1.0), epsilon=eps)
        np.testing.assert_allclose(r.map.data, eps / (1 + eps), rtol=1e-6)
        np.testing.assert_allclose(float(r.map.data[0, 0, 0]), 0.015385, rtol=1e-4)

    def test_shape_mismatch(self):
        a = _img(np.zeros((3, 2, 2), np.float32))
        b = _img(np.zeros((3, 2, 3), np.float32))
        with pytest.raises(ShapeError):
            compute_gain(a, b)

    def test_bad_epsilon(self):
        with pytest.raises(DomainError):
            compute_gain(_img(0.5), _img(0.5), epsilon=0.0)
        with pytest.raises(DomainError):
            compute_gain(_img(0.5), _img(0.5), epsilon=-1.0)

    def test_monotone_in_hdr_value(self):
        s = _img(0.3)
        low = compute_gain(_img(0.4), s).map.data
        high = compute_gain(_img(0.5), s).map.data
        assert np.all(high > low)


class TestComputeGamma:
    def test_identity_pair(self):
        h = _img(0.37)
        r = compute_gamma(h, h, epsilon=1 / 64)
        np.testing.assert_allclose(r.map.data, 1.0, atol=1e-7)
        assert r.kind == ResidualKind.GAMMA

    def test_log_ratio_cases(self):
        eps = 1e-9
        r = compute_gamma(_img(0.0625), _img(0.25), epsilon=eps)
        np.testing.assert_allclose(r.map.data, 2.0, rtol=1e-6)
        r = compute_gamma(_img(0.5), _img(0.25), epsilon=eps)
        np.testing.assert_allclose(r.map.data, 0.5, rtol=1e-6)

    def test_clamped_to_range(self):
        r = compute_gamma(_img(1e-6), _img(0.999999), epsilon=1e-9)
        assert np.all(r.map.data >= 1 / 16 - 1e-9)
        assert np.all(r.map.data <= 16 + 1e-9)


class TestNormalize:
    def test_three_point_channel(self):
        data = np.ones((3, 1, 3), np.float32)
        data[:, 0, 0], data[:, 0, 1], data[:, 0, 2] = 0.5, 1.0, 2.0
        raw = ResidualMap(
            map=ImageBuffer.from_planar(data, ColorSpace(Primaries.BT2020, Transfer.LINEAR)),
            kind=ResidualKind.GAIN,
            meta=ResidualMetadata(
                epsilon=1 / 64,
                log2_min=np.zeros(3, np.float64),
                log2_max=np.zeros(3, np.float64),
                kind=ResidualKind.GAIN,
                degenerate=np.zeros(3, bool),
            ),
            normalized=False,
        )
        norm = normalize_residual(raw)
        np.testing.assert_allclose(norm.map.data[:, 0, :], [[0.0, 0.5, 1.0]] * 3, atol=1e-7)
        np.testing.assert_allclose(norm.meta.log2_min, -1.0, atol=1e-7)
        np.testing.assert_allclose(norm.meta.log2_max, 1.0, atol=1e-7)
        assert not norm.meta.degenerate.any()

    def test_max_value_hits_one(self):
        h, s = _random_pair(5)
        norm = normalize_residual(compute_gain(h, s))
        assert norm.map.data.max() == pytest.approx(1.0, abs=1e-6)
        assert norm.map.data.min() == pytest.approx(0.0, abs=1e-6)

    def test_constant_channel_degenerate(self):
        h = _img(0.4)
        norm = normalize_residual(compute_gain(h, h))
        assert norm.meta.degenerate.all()
        np.testing.assert_allclose(norm.map.data, 0.5, atol=1e-7)
        np.testing.assert_allclose(norm.meta.log2_min, 0.0, atol=1e-6)
        np.testing.assert_allclose(norm.meta.log2_max, norm.meta.log2_min, atol=1e-12)

    def test_non_positive_rejected(self):
        data = np.full((3, 2, 2), 0.5, np.float32)
        data[0, 0, 0] = 0.0
        raw = ResidualMap(
            map=ImageBuffer.from_planar(data, ColorSpace(Primaries.BT2020, Transfer.LINEAR)),
            kind=ResidualKind.GAIN,
            meta=ResidualMetadata(
                epsilon=1 / 64,
                log2_min=np.zeros(3, np.float64),
                log2_max=np.zeros(3, np.float64),
                kind=ResidualKind.GAIN,
                degenerate=np.zeros(3, bool),
            ),
            normalized=False,
        )
        with pytest.raises(DomainError):
            normalize_residual(raw)

    def test_double_normalize_rejected(self):
        h, s = _random_pair(6)
        norm = normalize_residual(compute_gain(h, s))
        with pytest.raises(StateError):
            normalize_residual(norm)


class TestDenormalize:
    def test_endpoints_exact(self):
        h, s = _random_pair(8)
        raw = compute_gain(h, s)
        norm = normalize_residual(raw)
        lo_idx = np.unravel_index(np.argmin(norm.map.data[0]), norm.map.data[0].shape)
        hi_idx = np.unravel_index(np.argmax(norm.map.data[0]), norm.map.data[0].shape)
        back = denormalize_residual(norm)
        assert float(back.map.data[0][lo_idx]) == pytest.approx(
            2.0 ** norm.meta.log2_min[0], rel=1e-6
        )
        assert float(back.map.data[0][hi_idx]) == pytest.approx(
            2.0 ** norm.meta.log2_max[0], rel=1e-6
        )

    def test_midpoint_symmetric_bounds(self):
        data = np.full((3, 2, 2), 0.5, np.float32)
        norm = ResidualMap(
            map=ImageBuffer.from_planar(data, ColorSpace(Primaries.BT2020, Transfer.LINEAR)),
            kind=ResidualKind.GAIN,
            meta=ResidualMetadata(
                epsilon=1 / 64,
                log2_min=np.full(3, -1.0),
                log2_max=np.full(3, 1.0),
                kind=ResidualKind.GAIN,
                degenerate=np.zeros(3, bool),
            ),
            normalized=True,
        )
        back = denormalize_residual(norm)
        np.testing.assert_allclose(back.map.data, 1.0, atol=1e-7)

    def test_round_trip_relative(self):
        h, s = _random_pair(9)
        raw = compute_gain(h, s)
        back = denormalize_residual(normalize_residual(raw))
        np.testing.assert_allclose(
            back.map.data, raw.map.data, rtol=1e-5
        )

    def test_raw_input_rejected(self):
        h, s = _random_pair(10)
        with pytest.raises(StateError):
            denormalize_residual(compute_gain(h, s))


class TestReconstruct:
    def test_unit_residual_is_identity(self):
        h, s = _random_pair(11)
        for kind, compute in (
            (ResidualKind.GAIN, compute_gain),
            (ResidualKind.GAMMA, compute_gamma),
        ):
            r = compute(s, s)
            out = reconstruct(s, r)
            np.testing.assert_allclose(out.data, s.data, atol=1e-6)

    def test_gamma_scalar_case(self):
        eps = 1e-9
        r = compute_gamma(_img(0.0625), _img(0.25), epsilon=eps)
        out = reconstruct(_img(0.25), r)
        np.testing.assert_allclose(out.data, 0.0625, rtol=1e-6)

    def test_normalized_input_rejected(self):
        h, s = _random_pair(12)
        norm = normalize_residual(compute_gain(h, s))
        with pytest.raises(StateError):
            reconstruct(s, norm)


class TestRoundTrips:
    def test_gain_lossless(self):
        for seed in range(5):
            h, s = _random_pair(100 + seed, lo=0.0, hi=1.0)
            out = reconstruct(s, compute_gain(h, s))
            np.testing.assert_allclose(out.data, h.data, atol=1e-5)

    def test_gamma_lossless_inside_clamp(self):
        for seed in range(5):
            h, s = _random_pair(200 + seed, lo=0.1, hi=0.8)
            out = reconstruct(s, compute_gamma(h, s))
            np.testing.assert_allclose(out.data, h.data, atol=1e-5)

    def test_kind_symmetry(self):
        h, s = _random_pair(300, lo=0.1, hi=0.8)
        via_gain = reconstruct(s, compute_gain(h, s))
        via_gamma = reconstruct(s, compute_gamma(h, s))
        np.testing.assert_allclose(via_gain.data, via_gamma.data, atol=1e-4)

    def test_full_normalize_cycle(self):
        h, s = _random_pair(400, lo=0.1, hi=0.8)
        for compute in (compute_gain, compute_gamma):
            raw = compute(h, s)
            cycled = denormalize_residual(normalize_residual(raw))
            out = reconstruct(s, cycled)
            np.testing.assert_allclose(out.data, h.data, atol=1e-4)


class TestMetadata:
    def test_kind_agreement_enforced(self):
        h, s = _random_pair(13)
        r = compute_gain(h, s)
        with pytest.raises(MetadataError):
            ResidualMap(map=r.map, kind=ResidualKind.GAMMA, meta=r.meta, normalized=False)

    def test_validate_bounds(self):
        with pytest.raises(MetadataError):
            ResidualMetadata(
                epsilon=1 / 64,
                log2_min=np.array([1.0, 0.0, 0.0]),
                log2_max=np.array([0.0, 0.0, 0.0]),
                kind=ResidualKind.GAIN,
                degenerate=np.zeros(3, bool),
            ).validate()
        with pytest.raises(MetadataError):
            ResidualMetadata(
                epsilon=-0.5,
                log2_min=np.zeros(3),
                log2_max=np.zeros(3),
                kind=ResidualKind.GAIN,
                degenerate=np.zeros(3, bool),
            ).validate()
