"""Challenge-response verification games.

A verifier holds a physical model of an enrolled scene and repeatedly
challenges a prover; each response is compared against the model's own
prediction under the sensing mismatch rule.  The verdict moves at most once,
from consistent to falsified, and the game stops there: verification never
terminates in the positive direction, it only survives.

Provers:
  PhysicalProver          the genuine article (renders/mixes the true scene)
  ReplayLagSpoofer        eavesdrops; can copy the genuine response to any
                          challenge it has seen, one round late, and answers
                          fresh challenges with its latest stale copy
  PerfectModelSpoofer     owns a perfect copy of the scene model; included
                          deliberately: identical output means identical
                          observations, and no verifier can tell the
                          difference -- detection claims are about
                          information, not magic
  AcousticAdditiveSpoofer controls one additive source and knows the passive
                          sources exactly; superposition lets it answer any
                          emission challenge perfectly
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .physical.audio import AudioScene, FourierSource, mix
from .physical.render import Contrast, render
from .physical.scenes import Pose, Scene2D

VISUAL = "visual"
ACOUSTIC = "acoustic"


@dataclass
class VerifierConfig:
    modality: str = VISUAL
    authority: str = "active"          # passive | active
    policy: str = "random"             # fixed | scripted | planner | random
    threshold: float = 0.0
    max_rounds: int = 200
    fixed_pose: Pose | None = None
    script: tuple = ()                 # poses (visual) or sources (acoustic)
    noise_sigma: float = 0.0
    frames_per_round: int = 1
    contrast: Contrast = field(default_factory=Contrast)
    # random visual challenges: look at `lookat` from a ring of radius
    # `orbit_radius`, angles drawn continuously (almost surely novel)
    lookat: tuple = (0.0, 2.0)
    orbit_radius: float = 2.0
    fov: float = 1.0
    pixels: int = 64
    # random acoustic challenges
    emit_fundamental_range: tuple = (20.0, 400.0)
    emit_harmonics: int = 3

    def __post_init__(self):
        if self.modality not in (VISUAL, ACOUSTIC):
            raise ValueError(f"unknown modality {self.modality!r}")
        if self.authority not in ("passive", "active"):
            raise ValueError(f"unknown authority {self.authority!r}")
        if self.authority == "passive" and self.policy not in ("fixed", "scripted"):
            raise ValueError("a passive verifier issues a pre-determined sequence")


def random_pose(rng, config: VerifierConfig) -> Pose:
    ang = rng.uniform(0.0, 2.0 * math.pi)
    cx, cy = config.lookat
    px = cx + config.orbit_radius * math.cos(ang)
    py = cy + config.orbit_radius * math.sin(ang)
    heading = math.atan2(cy - py, cx - px)
    return Pose(px, py, heading, config.fov, config.pixels)


def random_emission(rng, config: VerifierConfig) -> FourierSource:
    f0 = rng.uniform(*config.emit_fundamental_range)
    m = config.emit_harmonics
    amps = tuple(rng.uniform(0.2, 1.0, size=m))
    phases = tuple(rng.uniform(0.0, 2.0 * math.pi, size=m))
    return FourierSource(f0, amps, phases)


def _challenge_key(challenge) -> tuple:
    if isinstance(challenge, Pose):
        return ("pose",) + challenge.key()
    if challenge is None:
        return ("wait",)
    return (
        "emit",
        challenge.fundamental_hz,
        tuple(challenge.amplitudes),
        tuple(challenge.phases),
    )


# ---------------------------------------------------------------- provers

class PhysicalProver:
    """The genuine physical article."""

    kind = "physical"

    def __init__(self, scene):
        self.scene = scene

    def respond(self, challenge, config: VerifierConfig, rng):
        return _genuine_response(self.scene, challenge, config, rng)

    def observe(self, challenge, genuine_clean):
        pass


class PerfectModelSpoofer:
    """Holds a bit-perfect model of the scene; indistinguishable by design."""

    kind = "perfect"

    def __init__(self, scene):
        self.scene = scene

    def respond(self, challenge, config: VerifierConfig, rng):
        return _genuine_response(self.scene, challenge, config, rng)

    def observe(self, challenge, genuine_clean):
        pass


class ReplayLagSpoofer:
    """Replays genuine responses it has already seen; one round behind.

    After every round it learns the genuine clean response to that round's
    challenge (eavesdropping), so a repeated challenge is answered exactly.
    A never-seen challenge gets its most recently learned response (zeros
    before anything was seen), which is wrong whenever the new view reveals
    content absent from the views it knows.
    """

    kind = "replay"

    def __init__(self, preseeded=None):
        self.memory: dict = {}
        self.last_clean = None
        if preseeded:
            for challenge, clean in preseeded:
                self.memory[_challenge_key(challenge)] = np.asarray(clean)
                self.last_clean = np.asarray(clean)

    def respond(self, challenge, config: VerifierConfig, rng):
        key = _challenge_key(challenge)
        if key in self.memory:
            clean = self.memory[key]
        elif self.last_clean is not None:
            clean = self.last_clean
        else:
            clean = _zero_response(challenge, config)
        if clean is None:
            return None
        return _sense(clean, config, rng)

    def observe(self, challenge, genuine_clean):
        self.memory[_challenge_key(challenge)] = genuine_clean
        self.last_clean = genuine_clean


class AcousticAdditiveSpoofer:
    """Knows the passive sources exactly and synthesizes any emission mix."""

    kind = "acoustic-additive"

    def __init__(self, scene: AudioScene):
        self.scene = scene

    def respond(self, challenge, config: VerifierConfig, rng):
        emitted = challenge if isinstance(challenge, FourierSource) else None
        clean = mix(self.scene, active_source=emitted)
        return _sense(clean, config, rng)

    def observe(self, challenge, genuine_clean):
        pass


def _genuine_response(scene, challenge, config: VerifierConfig, rng):
    clean = _clean_prediction(scene, challenge, config)
    return _sense(clean, config, rng)


def _clean_prediction(scene, challenge, config: VerifierConfig):
    if config.modality == VISUAL:
        return render(scene, challenge, config.contrast).prequant
    emitted = challenge if isinstance(challenge, FourierSource) else None
    return mix(scene, active_source=emitted)


def _sense(clean, config: VerifierConfig, rng):
    """Sensor-side acquisition: seeded Gaussian noise on top of the signal."""
    if config.noise_sigma <= 0.0:
        return np.asarray(clean, dtype=np.float64)
    frames = clean + rng.normal(
        0.0, config.noise_sigma, size=(config.frames_per_round, len(clean))
    )
    return frames.mean(axis=0)


def _zero_response(challenge, config: VerifierConfig):
    if config.modality == VISUAL:
        pixels = challenge.pixels if isinstance(challenge, Pose) else config.pixels
        return np.zeros(pixels)
    return None  # filled by caller context; acoustic zero is window-sized


# -------------------------------------------------------------- transcript

@dataclass
class RoundRecord:
    challenge_key: tuple
    mismatch: float
    verdict: str               # consistent | falsified
    response: np.ndarray
    prediction: np.ndarray

    def to_dict(self):
        return {
            "challenge": list(map(_jsonable, self.challenge_key)),
            "mismatch": self.mismatch,
            "verdict": self.verdict,
            "response": [float(v) for v in self.response],
            "prediction": [float(v) for v in self.prediction],
        }


def _jsonable(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


@dataclass
class GameTranscript:
    prover_kind: str
    modality: str
    authority: str
    seed: int
    rounds: list[RoundRecord]
    detection_round: int | None    # 1-based round of falsification

    @property
    def detected(self) -> bool:
        return self.detection_round is not None

    def to_jsonl(self) -> str:
        lines = []
        for i, r in enumerate(self.rounds, start=1):
            doc = {"round": i, **r.to_dict()}
            lines.append(json.dumps(doc, sort_keys=True))
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        return {
            "prover": self.prover_kind,
            "modality": self.modality,
            "authority": self.authority,
            "seed": self.seed,
            "rounds": len(self.rounds),
            "detection_round": self.detection_round,
        }


# -------------------------------------------------------------- main loop

def _issue_challenge(t, config: VerifierConfig, rng):
    if config.modality == VISUAL:
        if config.policy == "fixed":
            if config.fixed_pose is None:
                raise ValueError("fixed policy needs fixed_pose")
            return config.fixed_pose
        if config.policy == "scripted":
            return config.script[t % len(config.script)]
        if config.policy == "random":
            return random_pose(rng, config)
        raise ValueError(f"policy {config.policy!r} not valid here")
    # acoustic: passive verifiers just listen
    if config.authority == "passive" or config.policy == "fixed":
        return None
    if config.policy == "scripted":
        return config.script[t % len(config.script)]
    return random_emission(rng, config)


def run_game(
    config: VerifierConfig, prover, scene, seed: int
) -> GameTranscript:
    """Play until falsification or max_rounds.

    The verifier's model of the enrolled article is `scene` itself; its
    prediction each round is the clean render/mix under the issued
    challenge.  Mismatch is the max absolute deviation; above
    config.threshold the prover is falsified and the game ends.
    """
    if config.modality == VISUAL and not isinstance(scene, Scene2D):
        raise ValueError("visual games need a Scene2D")
    if config.modality == ACOUSTIC and not isinstance(scene, AudioScene):
        raise ValueError("acoustic games need an AudioScene")
    root = np.random.SeedSequence(seed)
    challenge_rng = np.random.default_rng(root.spawn(1)[0])
    sensor_rng = np.random.default_rng(root.spawn(1)[0])
    rounds: list[RoundRecord] = []
    detection = None
    for t in range(config.max_rounds):
        challenge = _issue_challenge(t, config, challenge_rng)
        prediction = _clean_prediction(scene, challenge, config)
        response = prover.respond(challenge, config, sensor_rng)
        if response is None:
            response = np.zeros_like(prediction)
        mismatch = float(np.max(np.abs(response - prediction))) if len(
            prediction
        ) else 0.0
        falsified = mismatch > config.threshold
        rounds.append(
            RoundRecord(
                challenge_key=_challenge_key(challenge),
                mismatch=mismatch,
                verdict="falsified" if falsified else "consistent",
                response=np.asarray(response),
                prediction=np.asarray(prediction),
            )
        )
        # one-round lag: the spoofer eavesdrops the genuine article afterwards
        prover.observe(challenge, prediction)
        if falsified:
            detection = t + 1
            break
    return GameTranscript(
        prover_kind=prover.kind,
        modality=config.modality,
        authority=config.authority,
        seed=seed,
        rounds=rounds,
        detection_round=detection,
    )


def verify_physical_vs_physical(
    config: VerifierConfig, scene, seed: int
) -> GameTranscript:
    """Null-hypothesis control arm: the prover is the genuine article."""
    return run_game(config, PhysicalProver(scene), scene, seed)


def detection_statistics(transcripts) -> dict:
    """Detection rate and latency quantiles over a batch of transcripts."""
    transcripts = list(transcripts)
    if not transcripts:
        raise ValueError("need at least one transcript")
    taus = [t.detection_round for t in transcripts if t.detected]
    mismatches = np.concatenate(
        [[r.mismatch for r in t.rounds] for t in transcripts]
    )
    out = {
        "games": len(transcripts),
        "detections": len(taus),
        "detection_rate": len(taus) / len(transcripts),
        "mismatch_mean": float(np.mean(mismatches)),
        "mismatch_max": float(np.max(mismatches)),
    }
    if taus:
        taus_arr = np.array(sorted(taus), dtype=np.float64)
        out["tau_median"] = float(np.median(taus_arr))
        out["tau_p90"] = float(np.quantile(taus_arr, 0.9))
        out["tau_max"] = int(taus_arr[-1])
    else:
        out["tau_median"] = None
        out["tau_p90"] = None
        out["tau_max"] = None
    return out


def statistics_csv(stats: dict) -> str:
    cols = sorted(stats)
    head = ",".join(cols)
    row = ",".join("" if stats[c] is None else str(stats[c]) for c in cols)
    return f"{head}\n{row}\n"
