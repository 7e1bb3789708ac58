"""Active-sensor procedures.

Noise mitigation by temporal averaging of registered frames, one-bit
decoding with a randomized threshold, occlusion-busting orbit poses, and
greedy minimax view planning over a finite hypothesis set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .physical.render import Contrast, render
from .physical.scenes import Pose, Scene2D


def average_frames(frames, registered: bool):
    """Per-pixel mean and empirical variance of the mean over T frames.

    Frames must be pre-quantization vectors of one static scene from one
    pose (registered = True); averaging unregistered frames mixes scene
    content and is refused.  With one frame the variance estimate is NaN.
    """
    if not registered:
        raise ValueError("frames must be registered (same pose, same scene)")
    stack = np.asarray(frames, dtype=np.float64)
    if stack.ndim != 2 or stack.shape[0] < 1:
        raise ValueError("need a (T, pixels) stack with T >= 1")
    mean = stack.mean(axis=0)
    t = stack.shape[0]
    if t == 1:
        var_of_mean = np.full(stack.shape[1], np.nan)
    else:
        var_of_mean = stack.var(axis=0, ddof=1) / t
    return mean, var_of_mean


def stochastic_resonance(value: float, n_samples: int, rng) -> float:
    """Estimate a level in [0, 1] through a one-bit sensor.

    Each reading compares the value against a fresh uniform threshold in
    (0, 1]; the mean of the bits is unbiased with variance v(1-v)/n.  The
    open-at-zero threshold makes the boundary cases exact: value 0 never
    trips the comparator, value 1 always does.
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    thresholds = 1.0 - rng.random(n_samples)  # uniform on (0, 1]
    return float(np.mean(value >= thresholds))


def orbit_policy(
    center,
    radius: float,
    steps: int,
    fov: float = 1.0,
    pixels: int = 64,
) -> list[Pose]:
    """Poses on a circle around a hinted region, all looking at its center.

    Angles are uniform; with enough steps any finite segment not coincident
    with an occluder is seen unobstructed from at least one of them.
    """
    if steps < 2:
        raise ValueError("need at least two poses")
    if radius <= 0:
        raise ValueError("radius must be positive")
    cx, cy = center
    poses = []
    for i in range(steps):
        ang = 2.0 * math.pi * i / steps
        px = cx + radius * math.cos(ang)
        py = cy + radius * math.sin(ang)
        poses.append(Pose(px, py, ang + math.pi, fov, pixels))
    return poses


@dataclass
class ControlAction:
    """One step of sensor control: pose change, emission, threshold, or wait."""

    kind: str                      # set-pose | emit-acoustic | set-threshold | wait
    pose: Pose | None = None
    source: object = None          # FourierSource for emit-acoustic
    threshold: float | None = None

    def __post_init__(self):
        if self.kind == "set-pose":
            if self.pose is None:
                raise ValueError("set-pose needs a pose")
        elif self.kind == "emit-acoustic":
            if self.source is None:
                raise ValueError("emit-acoustic needs a source")
        elif self.kind == "set-threshold":
            if self.threshold is None or not 0.0 <= self.threshold <= 1.0:
                raise ValueError("threshold must be in [0, 1]")
        elif self.kind != "wait":
            raise ValueError(f"unknown control kind {self.kind!r}")


class HypothesisSet:
    """Candidate scenes still consistent with everything observed so far."""

    def __init__(self, scenes: dict):
        self.scenes = dict(scenes)
        self.mismatch = {k: 0.0 for k in self.scenes}

    def live_ids(self) -> list:
        return sorted(self.scenes)

    def eliminate(self, observed_mean, pose, threshold, contrast=Contrast()):
        """Drop hypotheses whose noiseless prediction misses the observation.

        The per-pixel rule is |observation - prediction| > threshold.  At
        sigma 0 and threshold 0 this is exact comparison, which can never
        eliminate the true scene.
        """
        removed = []
        for key in self.live_ids():
            pred = render(self.scenes[key], pose, contrast).prequant
            score = float(np.max(np.abs(observed_mean - pred)))
            self.mismatch[key] = score
            if score > threshold:
                removed.append(key)
                del self.scenes[key]
        return removed


@dataclass
class PlanResult:
    pose: Pose
    pose_index: int
    worst_cluster: int
    non_exciting: bool


def plan_next_view(
    hyps: HypothesisSet,
    candidate_poses,
    threshold: float = 0.0,
    contrast: Contrast = Contrast(),
) -> PlanResult:
    """Greedy minimax splitting over candidate poses.

    For each pose, cluster the live hypotheses by their noiseless renders
    (same cluster iff within `threshold` per pixel) and score the pose by
    its largest cluster.  The lowest-index pose with the smallest score
    wins.  If no pose separates anything, the first candidate is returned
    flagged non-exciting: the data this sensor can produce cannot force the
    answer.
    """
    ids = hyps.live_ids()
    if len(ids) < 2:
        raise ValueError("planning needs at least two live hypotheses")
    if not candidate_poses:
        raise ValueError("need at least one candidate pose")
    best = None
    for pi, pose in enumerate(candidate_poses):
        renders = [
            render(hyps.scenes[k], pose, contrast).prequant for k in ids
        ]
        clusters: list[list[int]] = []
        for r_idx, r in enumerate(renders):
            for cluster in clusters:
                rep = renders[cluster[0]]
                if float(np.max(np.abs(r - rep))) <= threshold:
                    cluster.append(r_idx)
                    break
            else:
                clusters.append([r_idx])
        worst = max(len(c) for c in clusters)
        if best is None or worst < best.worst_cluster:
            best = PlanResult(pose, pi, worst, False)
    if best.worst_cluster == len(ids):
        return PlanResult(candidate_poses[0], 0, best.worst_cluster, True)
    return best


@dataclass
class EliminationRound:
    pose_index: int
    removed: list
    live_after: int


@dataclass
class EliminationRun:
    rounds: list[EliminationRound]
    live: list
    identified: bool
    non_exciting: bool = False

    def to_dict(self):
        return {
            "rounds": [
                {
                    "pose_index": r.pose_index,
                    "removed": list(r.removed),
                    "live_after": r.live_after,
                }
                for r in self.rounds
            ],
            "live": list(self.live),
            "identified": self.identified,
            "non_exciting": self.non_exciting,
        }


def run_elimination(
    true_scene: Scene2D,
    hypotheses: dict,
    candidate_poses,
    planner: str = "planner",
    threshold: float = 0.0,
    noise_sigma: float = 0.0,
    frames_per_round: int = 1,
    rng=None,
    max_rounds: int | None = None,
    contrast: Contrast = Contrast(),
) -> EliminationRun:
    """Plan-observe-eliminate loop until one hypothesis remains.

    planner 'planner' picks minimax-split poses; 'passive' replays
    candidate_poses[0] forever; 'orbit' cycles through the candidates in
    order.  Observations come from the true scene with optional sensor
    noise averaged over frames_per_round registered frames.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    hyps = HypothesisSet(hypotheses)
    rounds = []
    limit = max_rounds if max_rounds is not None else len(candidate_poses)
    non_exciting = False
    for rnd in range(limit):
        if len(hyps.scenes) <= 1:
            break
        if planner == "planner":
            plan = plan_next_view(hyps, candidate_poses, threshold, contrast)
            if plan.non_exciting:
                non_exciting = True
                break
            pose, pose_index = plan.pose, plan.pose_index
        elif planner == "passive":
            pose, pose_index = candidate_poses[0], 0
        elif planner == "orbit":
            pose_index = rnd % len(candidate_poses)
            pose = candidate_poses[pose_index]
        else:
            raise ValueError(f"unknown planner {planner!r}")
        frames = [
            render(true_scene, pose, contrast, noise_sigma, rng).prequant
            for _ in range(frames_per_round)
        ]
        mean, _ = average_frames(frames, registered=True)
        removed = hyps.eliminate(mean, pose, threshold, contrast)
        rounds.append(EliminationRound(pose_index, removed, len(hyps.scenes)))
    return EliminationRun(
        rounds=rounds,
        live=hyps.live_ids(),
        identified=len(hyps.scenes) == 1,
        non_exciting=non_exciting,
    )
