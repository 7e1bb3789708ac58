"""Command-line entry point.

Every experiment is fully determined by its arguments (seed included), and
identical invocations produce byte-identical artifacts.  Output files are
written atomically (temp file + rename).  Failures print a machine-readable
JSON error record to stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import dsl
from .concepts import (
    COMPLETE,
    POSITIVE_ONLY,
    Concept,
    ObservationStream,
    observations_to_csv,
    observations_to_jsonl,
)
from .experiments import (
    occluded_scene_pair,
    parity_memorization,
    simple_audio_scene,
)
from .game import (
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
)
from .learners import one_sided_run, run_gold
from .neural.nets import FeedForwardNet
from .neural.pwl import exact_pwl, falsify_parity
from .neural.rnn import rnn_parity_sweep, rnn_parity_trace
from .physical.audio import AudioScene, FourierSource, mix
from .physical.render import Contrast, render
from .physical.scenes import Pose, Scene2D
from .sensing import run_elimination


def _out_path(arg: str | None, default_name: str) -> Path:
    if arg:
        return Path(arg)
    base = Path(os.environ.get("CONCEPTLAB_OUT_DIR", "."))
    return base / default_name


def _write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, doc) -> None:
    _write_atomic(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _parse_pose(text: str) -> Pose:
    parts = [p for p in text.split(",") if p]
    if len(parts) != 5:
        raise ValueError("pose must be x,y,heading,fov,pixels")
    return Pose(
        float(parts[0]), float(parts[1]), float(parts[2]),
        float(parts[3]), int(parts[4]),
    )


# ------------------------------------------------------------- subcommands

def cmd_enumerate(args) -> int:
    rows = []
    for i in range(args.start, args.start + args.count):
        p = dsl.enumerate_program(i)
        rows.append({"index": i, "size": p.size, "source": p.render()})
        print(f"{i}\t{p.render()}")
    if args.out:
        _write_json(Path(args.out), rows)
    return 0


def _resolve_target(text: str) -> dsl.Program:
    if text.lstrip().startswith("("):
        return dsl.parse(text)
    return dsl.enumerate_program(int(text))


def cmd_gold_learn(args) -> int:
    target = _resolve_target(args.target)
    mode = COMPLETE if args.mode == "complete" else POSITIVE_ONLY
    run = run_gold(
        target, mode=mode, steps=args.steps, window=args.window, cap=args.cap
    )
    doc = run.to_dict()
    path = _out_path(args.out, "gold-run.json")
    _write_json(path, doc)
    if args.dump_stream:
        stream = ObservationStream(Concept(target), mode=mode)
        observed = stream.take(run.steps)
        dump = Path(args.dump_stream)
        if dump.suffix == ".jsonl":
            _write_atomic(dump, observations_to_jsonl(observed))
        else:
            _write_atomic(dump, observations_to_csv(observed))
    print(
        f"gold-learn: final index {run.final_index}, "
        f"last change at step {run.convergence_step}, "
        f"{run.checks} compatibility checks -> {path}"
    )
    return 0


def cmd_one_sided(args) -> int:
    guesses = one_sided_run(args.k, args.steps, cap=args.cap)
    doc = {
        "k": args.k,
        "steps": args.steps,
        "guesses": guesses,
        "distinct_guesses": sorted(set(guesses)),
    }
    path = _out_path(args.out, f"one-sided-k{args.k}.json")
    _write_json(path, doc)
    print(
        f"one-sided: k={args.k}, final guess {guesses[-1]}, "
        f"{len(set(guesses))} distinct guesses -> {path}"
    )
    return 0


def cmd_parity_train(args) -> int:
    run = parity_memorization(args.seed)
    out_dir = Path(args.out) if args.out else _out_path(None, "parity-train")
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_atomic(out_dir / "net.json", run.net.to_json())
    _write_atomic(out_dir / "ledger.csv", run.ledger.to_csv())
    _write_json(
        out_dir / "summary.json",
        {
            "seed": args.seed,
            "train_accuracy": run.train_accuracy,
            "ood_accuracy": run.ood_accuracy,
            "epochs_used": run.epochs_used,
        },
    )
    print(
        f"parity-train: seed {args.seed} train acc {run.train_accuracy:.4f} "
        f"out-of-domain acc {run.ood_accuracy:.4f} -> {out_dir}/"
    )
    return 0


def cmd_falsify_ffn(args) -> int:
    net = FeedForwardNet.from_json(Path(args.net).read_text())
    n = falsify_parity(net)
    predicted_even = bool(net.forward(float(n))[0] >= 0.0)
    doc = {
        "counterexample": n,
        "predicted_even": predicted_even,
        "actually_even": n % 2 == 0,
        "verified": predicted_even != (n % 2 == 0),
        "pieces": exact_pwl(net).piece_count,
    }
    if args.out:
        _write_json(Path(args.out), doc)
    print(
        f"falsify-ffn: n={n} predicted "
        f"{'even' if predicted_even else 'odd'}, actually "
        f"{'even' if n % 2 == 0 else 'odd'} (verified: {doc['verified']})"
    )
    return 0


def cmd_rnn_parity(args) -> int:
    if args.check_upto is not None:
        flags, steps = rnn_parity_sweep(args.check_upto)
        ns = np.arange(args.check_upto + 1)
        ok = bool(
            np.all(flags == (ns % 2 == 0)) and np.all(steps == ns + 1)
        )
        print(
            f"rnn-parity: checked n <= {args.check_upto}; "
            f"{'all correct, all n+1 steps' if ok else 'MISMATCH FOUND'}"
        )
        return 0 if ok else 1
    trace = rnn_parity_trace(args.n)
    print(
        f"rnn-parity: n={args.n} -> {'even' if trace.parity_flag else 'odd'} "
        f"in {trace.steps} steps, final state {trace.final_state}"
    )
    return 0


def cmd_render(args) -> int:
    scene = Scene2D.from_json(Path(args.scene).read_text())
    pose = _parse_pose(args.pose)
    img = render(
        scene,
        pose,
        Contrast(args.gain, args.gamma),
        args.sigma,
        np.random.default_rng(args.seed) if args.sigma > 0 else None,
        args.levels,
    )
    path = _out_path(args.out, "render.csv")
    if str(path).endswith(".bin"):
        path.parent.mkdir(parents=True, exist_ok=True)
        img.prequant.astype("<f8").tofile(path)
    else:
        lines = ["pixel,level,prequant"]
        for i, (lv, pq) in enumerate(zip(img.levels, img.prequant)):
            lines.append(f"{i},{int(lv)},{pq:.17g}")
        _write_atomic(path, "\n".join(lines) + "\n")
    print(f"render: {pose.pixels} pixels -> {path}")
    return 0


def cmd_mix(args) -> int:
    scene = AudioScene.from_json(Path(args.scene).read_text())
    active = None
    if args.active:
        active = FourierSource.from_dict(json.loads(Path(args.active).read_text()))
    samples = mix(
        scene,
        active,
        np.random.default_rng(args.seed) if scene.noise_sigma > 0 else None,
    )
    path = _out_path(args.out, "mix.csv")
    if str(path).endswith(".bin"):
        path.parent.mkdir(parents=True, exist_ok=True)
        samples.astype("<f8").tofile(path)
    else:
        _write_atomic(
            path,
            "sample\n" + "\n".join(f"{v:.17g}" for v in samples) + "\n",
        )
    print(f"mix: {samples.shape[0]} samples -> {path}")
    return 0


def cmd_sense(args) -> int:
    if args.hypotheses:
        docs = json.loads(Path(args.hypotheses).read_text())
        hypotheses = {
            d["id"]: Scene2D.from_json(json.dumps(d["scene"])) for d in docs
        }
        true_scene = Scene2D.from_json(Path(args.scene).read_text())
        _, _, front, candidates = occluded_scene_pair(args.seed)
    else:
        scene_a, scene_b, front, candidates = occluded_scene_pair(args.seed)
        hypotheses = {"a": scene_a, "b": scene_b}
        true_scene = scene_a
    run = run_elimination(
        true_scene,
        hypotheses,
        candidates,
        planner=args.policy,
        threshold=args.threshold,
        noise_sigma=args.sigma,
        rng=np.random.default_rng(args.seed),
        max_rounds=args.rounds,
    )
    path = _out_path(args.out, "sense-run.json")
    _write_json(path, run.to_dict())
    print(
        f"sense: policy={args.policy} identified={run.identified} "
        f"live={run.live} rounds={len(run.rounds)} -> {path}"
    )
    return 0


def _build_prover(name, scene, seed, config):
    if name == "physical":
        return PhysicalProver(scene)
    if name == "perfect":
        return PerfectModelSpoofer(scene)
    if name == "replay":
        pre = []
        if config.policy == "fixed" and config.fixed_pose is not None:
            clean = render(scene, config.fixed_pose, config.contrast).prequant
            pre.append((config.fixed_pose, clean))
        return ReplayLagSpoofer(pre)
    if name == "acoustic-additive":
        return AcousticAdditiveSpoofer(scene)
    raise ValueError(f"unknown prover {name!r}")


def cmd_game(args) -> int:
    visual = args.modality == "visual"
    if args.scene:
        text = Path(args.scene).read_text()
        scene = Scene2D.from_json(text) if visual else AudioScene.from_json(text)
    else:
        scene = (
            occluded_scene_pair(args.seed)[0]
            if visual
            else simple_audio_scene(args.seed)
        )
    fixed_pose = Pose(0.0, 0.0, np.pi / 2.0, 1.0, 64) if visual else None
    config = VerifierConfig(
        modality=VISUAL if visual else ACOUSTIC,
        authority=args.authority,
        policy="random" if args.authority == "active" else "fixed",
        threshold=args.threshold,
        max_rounds=args.rounds,
        fixed_pose=fixed_pose,
        noise_sigma=args.sigma,
    )
    out_dir = Path(args.out) if args.out else _out_path(None, "game-out")
    out_dir.mkdir(parents=True, exist_ok=True)
    transcripts = []
    for trial in range(args.trials):
        seed = args.seed + trial
        prover = _build_prover(args.prover, scene, seed, config)
        t = run_game(config, prover, scene, seed)
        transcripts.append(t)
        _write_atomic(out_dir / f"transcript-{seed}.jsonl", t.to_jsonl())
    stats = detection_statistics(transcripts)
    _write_atomic(out_dir / "summary.csv", statistics_csv(stats))
    print(
        f"game: {args.trials} trial(s), detection rate "
        f"{stats['detection_rate']:.2f}, median tau {stats['tau_median']} "
        f"-> {out_dir}/"
    )
    return 0


def cmd_stats(args) -> int:
    import glob

    taus = []
    games = 0
    for pattern in args.inputs:
        for fname in sorted(glob.glob(pattern)):
            games += 1
            tau = None
            with open(fname) as fh:
                for line in fh:
                    doc = json.loads(line)
                    if doc["verdict"] == "falsified":
                        tau = doc["round"]
            if tau is not None:
                taus.append(tau)
    if games == 0:
        raise ValueError("no transcript files matched")
    stats = {
        "games": games,
        "detections": len(taus),
        "detection_rate": len(taus) / games,
        "tau_median": float(np.median(taus)) if taus else None,
    }
    path = _out_path(args.out, "stats.csv")
    _write_atomic(path, statistics_csv(stats))
    print(f"stats: {games} games, rate {stats['detection_rate']:.2f} -> {path}")
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="conceptlab",
        description="Concept learning, active sensing, and verification games",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="print programs from the canonical order")
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("gold-learn", help="run the enumeration learner on a target")
    p.add_argument("--target", required=True, help="DSL source or enumeration index")
    p.add_argument("--mode", choices=["complete", "one-sided"], default="complete")
    p.add_argument("--steps", type=int, default=10**4)
    p.add_argument("--window", type=int, default=10**3)
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--out")
    p.add_argument("--dump-stream", dest="dump_stream",
                   help="also write the observed stream (.csv or .jsonl)")
    p.set_defaults(fn=cmd_gold_learn)

    p = sub.add_parser("one-sided", help="positives-only run on multiples of k")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--steps", type=int, default=10**4)
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_one_sided)

    p = sub.add_parser("parity-train", help="memorize parity of 0..255")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_parity_train)

    p = sub.add_parser("falsify-ffn", help="find a parity counterexample for a net")
    p.add_argument("--net", required=True, help="net JSON file")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_falsify_ffn)

    p = sub.add_parser("rnn-parity", help="run the recurrent parity countdown")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--check-upto", type=int, default=None)
    p.set_defaults(fn=cmd_rnn_parity)

    p = sub.add_parser("render", help="render a scene from a pose")
    p.add_argument("--scene", required=True)
    p.add_argument("--pose", required=True, help="x,y,heading,fov,pixels")
    p.add_argument("--gain", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--levels", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("mix", help="mix an acoustic scene")
    p.add_argument("--scene", required=True)
    p.add_argument("--active", help="JSON file with an actively emitted source")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_mix)

    p = sub.add_parser("sense", help="hypothesis elimination on a scene family")
    p.add_argument("--scene", help="true scene JSON (default: generated pair)")
    p.add_argument("--hypotheses", help="JSON list of {id, scene} candidates")
    p.add_argument("--policy", choices=["passive", "orbit", "planner"],
                   default="planner")
    p.add_argument("--rounds", type=int, default=None)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_sense)

    p = sub.add_parser("game", help="challenge-response verification games")
    p.add_argument("--modality", choices=["visual", "acoustic"], default="visual")
    p.add_argument("--authority", choices=["passive", "active"], default="active")
    p.add_argument(
        "--prover",
        choices=["physical", "replay", "perfect", "acoustic-additive"],
        default="replay",
    )
    p.add_argument("--rounds", type=int, default=200)
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scene", help="scene JSON (default: generated)")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_game)

    p = sub.add_parser("stats", help="summarize game transcripts")
    p.add_argument("inputs", nargs="+", help="transcript JSONL globs")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_stats)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # machine-readable failure record
        record = {
            "error": type(exc).__name__,
            "message": str(exc),
            "command": args.command,
        }
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
