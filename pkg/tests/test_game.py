import json

import numpy as np
import pytest

from conceptlab.experiments import occluded_scene_pair, simple_audio_scene
from conceptlab.game import (
    ACOUSTIC,
    VISUAL,
    AcousticAdditiveSpoofer,
    PerfectModelSpoofer,
    PhysicalProver,
    ReplayLagSpoofer,
    VerifierConfig,
    detection_statistics,
    run_game,
    statistics_csv,
    verify_physical_vs_physical,
)
from conceptlab.physical import FourierSource, mix, render

SCENE, SCENE_B, FRONT, CANDIDATES = occluded_scene_pair(100)


def active_visual(rounds=200, sigma=0.0, threshold=0.0):
    return VerifierConfig(
        modality=VISUAL,
        authority="active",
        policy="random",
        threshold=threshold,
        max_rounds=rounds,
        noise_sigma=sigma,
    )


def passive_visual(rounds=1000):
    return VerifierConfig(
        modality=VISUAL,
        authority="passive",
        policy="fixed",
        fixed_pose=FRONT,
        max_rounds=rounds,
    )


def test_active_catches_replay_spoofer_quickly():
    t = run_game(active_visual(), ReplayLagSpoofer(), SCENE, seed=0)
    assert t.detected
    assert t.detection_round <= 200


def test_passive_never_catches_a_preseeded_replay():
    pre = [(FRONT, render(SCENE, FRONT).prequant)]
    t = run_game(passive_visual(), ReplayLagSpoofer(pre), SCENE, seed=1)
    assert not t.detected
    assert len(t.rounds) == 1000
    assert max(r.mismatch for r in t.rounds) == 0.0


def test_replay_answers_repeated_challenges_after_one_round():
    # scripted verifier alternating two poses: the spoofer fails each pose
    # the first time it appears and echoes it perfectly afterwards
    other = CANDIDATES[1]
    config = VerifierConfig(
        modality=VISUAL,
        authority="active",
        policy="scripted",
        script=(FRONT, other),
        threshold=0.0,
        max_rounds=10,
    )
    spoof = ReplayLagSpoofer()
    t = run_game(config, spoof, SCENE, seed=3)
    assert t.detection_round == 1  # never seen the first pose
    # afterwards it has learned it: replay the same game with the memory kept
    t2 = run_game(config, spoof, SCENE, seed=3)
    assert t2.detection_round == 2  # first pose fine now, second is novel
    t3 = run_game(config, spoof, SCENE, seed=3)
    assert not t3.detected or t3.detection_round > 2


def test_lag_exploitation_on_revealing_pose():
    """A fresh view that exposes occluded content always trips the spoofer."""
    reveal = CANDIDATES[1]
    pre = [(FRONT, render(SCENE, FRONT).prequant)]
    config = VerifierConfig(
        modality=VISUAL,
        authority="active",
        policy="scripted",
        script=(FRONT, reveal),
        threshold=0.0,
        max_rounds=4,
    )
    t = run_game(config, ReplayLagSpoofer(pre), SCENE, seed=4)
    assert t.detection_round == 2


def test_perfect_model_spoofer_is_never_detected():
    t = run_game(active_visual(), PerfectModelSpoofer(SCENE), SCENE, seed=5)
    assert not t.detected
    assert max(r.mismatch for r in t.rounds) == 0.0


def test_genuine_prover_zero_noise_never_falsified():
    t = verify_physical_vs_physical(active_visual(rounds=100), SCENE, seed=6)
    assert not t.detected
    assert max(r.mismatch for r in t.rounds) == 0.0


def test_genuine_prover_with_noise_rarely_false_alarms():
    # threshold = 6 sigma / sqrt(T); per-pixel tail mass ~ 2e-9
    sigma = 0.05
    config = active_visual(rounds=50, sigma=sigma, threshold=6 * sigma)
    alarms = 0
    for seed in range(50):
        t = verify_physical_vs_physical(config, SCENE, seed=seed)
        alarms += t.detected
    assert alarms == 0


def test_acoustic_additive_spoofer_never_detected():
    scene = simple_audio_scene(7)
    config = VerifierConfig(
        modality=ACOUSTIC, authority="active", policy="random", max_rounds=300
    )
    t = run_game(config, AcousticAdditiveSpoofer(scene), scene, seed=7)
    assert not t.detected
    assert max(r.mismatch for r in t.rounds) == 0.0


def test_active_acoustic_equals_passive_with_merged_source():
    scene = simple_audio_scene(8)
    config = VerifierConfig(
        modality=ACOUSTIC, authority="active", policy="random", max_rounds=50
    )
    t = run_game(config, PhysicalProver(scene), scene, seed=8)
    for record in t.rounds:
        kind = record.challenge_key[0]
        assert kind == "emit"
        emitted = FourierSource(
            record.challenge_key[1],
            record.challenge_key[2],
            record.challenge_key[3],
        )
        passive = mix(scene.with_extra_source(emitted))
        assert np.array_equal(record.response, passive)


def test_no_rounds_after_falsification():
    t = run_game(active_visual(), ReplayLagSpoofer(), SCENE, seed=9)
    assert t.detected
    assert len(t.rounds) == t.detection_round
    verdicts = [r.verdict for r in t.rounds]
    assert verdicts[-1] == "falsified"
    assert all(v == "consistent" for v in verdicts[:-1])


def test_modality_scene_mismatch_rejected():
    with pytest.raises(ValueError):
        run_game(active_visual(), ReplayLagSpoofer(), simple_audio_scene(1), 0)
    config = VerifierConfig(
        modality=ACOUSTIC, authority="active", policy="random", max_rounds=5
    )
    with pytest.raises(ValueError):
        run_game(config, ReplayLagSpoofer(), SCENE, 0)


def test_passive_config_requires_predetermined_sequence():
    with pytest.raises(ValueError):
        VerifierConfig(modality=VISUAL, authority="passive", policy="random")


def test_transcript_jsonl_and_stats():
    t1 = run_game(active_visual(), ReplayLagSpoofer(), SCENE, seed=10)
    t2 = run_game(active_visual(), PerfectModelSpoofer(SCENE), SCENE, seed=11)
    lines = t1.to_jsonl().strip().splitlines()
    assert len(lines) == len(t1.rounds)
    doc = json.loads(lines[-1])
    assert doc["verdict"] == "falsified"
    stats = detection_statistics([t1, t2])
    assert stats["games"] == 2
    assert stats["detections"] == 1
    assert stats["detection_rate"] == 0.5
    csv = statistics_csv(stats)
    assert csv.count("\n") == 2


def test_determinism_same_seed_same_transcript():
    a = run_game(active_visual(), ReplayLagSpoofer(), SCENE, seed=12)
    b = run_game(active_visual(), ReplayLagSpoofer(), SCENE, seed=12)
    assert a.to_jsonl() == b.to_jsonl()


def test_mimicry_of_a_nearly_identical_scene():
    # the prover is a genuine physical article, but of the wrong scene: it
    # differs from the verifier's model only behind the occluder
    mimic = PhysicalProver(SCENE_B)
    t = run_game(active_visual(rounds=500), mimic, SCENE, seed=21)
    assert t.detected  # some novel pose eventually looks behind the occluder
    passive = run_game(passive_visual(rounds=1000), mimic, SCENE, seed=22)
    assert not passive.detected  # the front pose never sees the difference
