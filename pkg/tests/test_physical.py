import numpy as np
import pytest

from conceptlab.physical import (
    AudioScene,
    BandwidthError,
    Contrast,
    FourierSource,
    Marker,
    Pose,
    Scene2D,
    Segment,
    mix,
    render,
    single_segment_scene,
)
from helpers import brute_raycast

FRONT = Pose(0.0, 0.0, np.pi / 2.0, 1.0, 32)


def test_facing_segment_reads_quantized_albedo():
    scene = single_segment_scene((-3.0, 3.0), (3.0, 3.0), 0.5)
    img = render(scene, FRONT)
    assert np.all(img.levels == 128)  # round(0.5 * 255)
    assert np.allclose(img.prequant, 0.5)


def test_background_reads_zero():
    scene = single_segment_scene((10.0, 10.0), (11.0, 10.0), 0.9)
    img = render(scene, FRONT)
    assert np.all(img.levels == 0)
    assert np.all(img.prequant == 0.0)


def test_occlusion_keeps_the_nearer_segment():
    scene = Scene2D(
        (
            (Segment((-3.0, 2.0), (3.0, 2.0), 0.2),),
            (Segment((-3.0, 4.0), (3.0, 4.0), 0.9),),
        )
    )
    img = render(scene, FRONT)
    assert np.allclose(img.prequant, 0.2)


def test_render_matches_brute_force_oracle():
    rng = np.random.default_rng(21)
    for trial in range(50):
        n = int(rng.integers(1, 7))
        segs = []
        for _ in range(n):
            p0 = (float(rng.uniform(-4, 4)), float(rng.uniform(1, 6)))
            p1 = (float(rng.uniform(-4, 4)), float(rng.uniform(1, 6)))
            if p0 == p1:
                continue
            segs.append(Segment(p0, p1, float(rng.uniform(0, 1))))
        if not segs:
            continue
        scene = Scene2D(tuple((s,) for s in segs))
        pose = Pose(
            float(rng.uniform(-1, 1)),
            float(rng.uniform(-1, 0)),
            float(np.pi / 2 + rng.uniform(-0.4, 0.4)),
            1.2,
            48,
        )
        img = render(scene, pose)
        angles = pose.ray_angles()
        t, idx, s = brute_raycast(
            pose.x, pose.y, np.cos(angles), np.sin(angles),
            [(sg.p0, sg.p1) for sg in segs],
        )
        expect = np.zeros(48)
        hit = idx >= 0
        expect[hit] = [segs[int(k)].albedo for k in idx[hit]]
        assert np.array_equal(img.prequant, expect)


def test_occlusion_monotonicity():
    scene = single_segment_scene((-3.0, 4.0), (3.0, 4.0), 0.9)
    before = render(scene, FRONT).prequant
    blocker = Segment((-0.5, 2.0), (0.5, 2.0), 0.3)
    blocked = Scene2D(scene.objects + ((blocker,),))
    after = render(blocked, FRONT).prequant
    changed = after != before
    assert changed.any()
    assert np.allclose(after[changed], 0.3)
    assert np.array_equal(after[~changed], before[~changed])


def test_marker_subinterval_changes_albedo_only_inside():
    seg = Segment((-2.0, 3.0), (2.0, 3.0), 0.5, Marker(0.45, 0.55, 0.9))
    scene = Scene2D(((seg,),))
    img = render(scene, FRONT)
    assert set(np.round(np.unique(img.prequant), 6)) == {0.5, 0.9}


def test_contrast_preserves_order():
    rng = np.random.default_rng(5)
    for _ in range(200):
        a, b = sorted(rng.uniform(0.0, 1.0, size=2))
        c = Contrast(float(rng.uniform(0.1, 3.0)), float(rng.uniform(0.2, 4.0)))
        va, vb = c.apply(np.array([a, b]))
        assert va <= vb


def test_noise_requires_rng_and_is_seed_deterministic():
    scene = single_segment_scene((-3.0, 3.0), (3.0, 3.0), 0.5)
    with pytest.raises(ValueError):
        render(scene, FRONT, noise_sigma=0.1)
    a = render(scene, FRONT, noise_sigma=0.1, rng=42)
    b = render(scene, FRONT, noise_sigma=0.1, rng=42)
    assert np.array_equal(a.prequant, b.prequant)
    assert np.array_equal(a.levels, b.levels)


def test_quantization_levels():
    scene = single_segment_scene((-3.0, 3.0), (3.0, 3.0), 1.0)
    img16 = render(scene, FRONT, n_levels=16)
    assert np.all(img16.levels == 15)


def test_scene_json_round_trip():
    seg = Segment((-2.0, 3.0), (2.0, 3.5), 0.5, Marker(0.4, 0.6, 0.9))
    scene = Scene2D(((seg, Segment((2.0, 3.5), (3.0, 3.0), 0.7)),))
    clone = Scene2D.from_json(scene.to_json())
    assert clone == scene
    img_a = render(scene, FRONT)
    img_b = render(clone, FRONT)
    assert np.array_equal(img_a.prequant, img_b.prequant)


def test_pose_validation():
    with pytest.raises(ValueError):
        Pose(0, 0, 0, fov=4.0)
    with pytest.raises(ValueError):
        Pose(0, 0, 0, fov=1.0, pixels=0)


# -------------------------------------------------------------------- audio

def test_single_sine_identity():
    src = FourierSource(5.0, (1.0,), (0.0,))
    scene = AudioScene((src,), sample_rate=1000.0, window=1000)
    got = mix(scene)
    t = np.arange(1000) / 1000.0
    assert np.max(np.abs(got - np.sin(2 * np.pi * 5.0 * t))) < 1e-12


def test_superposition_identity_bit_exact():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        s0 = FourierSource(
            float(rng.uniform(20, 200)),
            tuple(rng.uniform(0.2, 1.0, 2)),
            tuple(rng.uniform(0, 6.28, 2)),
        )
        u = FourierSource(
            float(rng.uniform(20, 200)),
            tuple(rng.uniform(0.2, 1.0, 3)),
            tuple(rng.uniform(0, 6.28, 3)),
        )
        scene = AudioScene((s0,), sample_rate=8000.0, window=512,
                           noise_sigma=0.01)
        active = mix(scene, active_source=u, rng=seed)
        passive = mix(scene.with_extra_source(u), rng=seed)
        assert np.array_equal(active, passive)


def test_zero_sources_zero_noise_is_silence():
    scene = AudioScene((), sample_rate=8000.0, window=64)
    assert np.array_equal(mix(scene), np.zeros(64))


def test_linearity_at_zero_noise():
    a = FourierSource(50.0, (1.0,), (0.3,))
    b = FourierSource(120.0, (0.7, 0.2), (0.0, 1.0))
    both = AudioScene((a, b), sample_rate=8000.0, window=256)
    only_a = AudioScene((a,), sample_rate=8000.0, window=256)
    only_b = AudioScene((b,), sample_rate=8000.0, window=256)
    assert np.array_equal(mix(both), mix(only_a) + mix(only_b))


def test_bandwidth_violation_rejected():
    src = FourierSource(3000.0, (1.0, 1.0), (0.0, 0.0))  # 6 kHz > Nyquist
    with pytest.raises(BandwidthError):
        AudioScene((src,), sample_rate=8000.0, window=64)
    scene = AudioScene((), sample_rate=8000.0, window=64)
    with pytest.raises(BandwidthError):
        mix(scene, active_source=src)


def test_time_warp_scales_frequency_and_bandwidth():
    src = FourierSource(5.0, (1.0,), (0.0,))
    scene = AudioScene((src,), warp_a=2.0, sample_rate=1000.0, window=1000)
    got = mix(scene)
    t = np.arange(1000) / 1000.0
    assert np.max(np.abs(got - np.sin(2 * np.pi * 10.0 * t))) < 1e-12
    fast = FourierSource(300.0, (1.0,), (0.0,))
    with pytest.raises(BandwidthError):
        AudioScene((fast,), warp_a=2.0, sample_rate=1000.0, window=64)


def test_audio_json_round_trip():
    src = FourierSource(50.0, (1.0, 0.5), (0.1, 0.2))
    scene = AudioScene((src,), gain=2.0, warp_a=1.5, warp_b=0.1,
                       sample_rate=4000.0, window=128, noise_sigma=0.05)
    clone = AudioScene.from_json(scene.to_json())
    assert clone == scene


def test_mix_determinism_with_noise():
    scene = AudioScene(
        (FourierSource(50.0, (1.0,), (0.0,)),),
        sample_rate=8000.0, window=128, noise_sigma=0.2,
    )
    assert np.array_equal(mix(scene, rng=7), mix(scene, rng=7))
