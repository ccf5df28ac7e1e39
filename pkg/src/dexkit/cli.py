"""Command-line entry point for the teleoperation and curation pipeline.

Exit codes: 0 success, 1 usage error, 2 data/contract error.  The rig
configuration comes from ``--rig``, the ``DEXKIT_RIG`` environment
variable, or the built-in defaults, in that order of precedence.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from pathlib import Path

from .errors import DexkitError
from .rig import RigConfig, default_rig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage problems; the contract here is 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="dexkit", description=__doc__.splitlines()[0])
    parser.add_argument("--rig", help="rig config JSON (overrides DEXKIT_RIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the teleop simulator and protocol server")
    p.add_argument("--port", type=int, default=7447)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--tick-hz", type=float, default=30.0)
    p.add_argument("--record", help="dataset root; episodes are written when gated on")
    p.add_argument("--seed", type=int, default=0, help="placement prompt seed")
    p.add_argument("--ui-dir", help="static UI bundle to serve over HTTP")
    p.add_argument("--dataset", help="dataset root exposed at /data/ over HTTP")

    p = sub.add_parser("simulate", help="headless seeded session producing a dataset")
    p.add_argument("--out", required=True, help="dataset root to create")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--episodes", type=int, default=3)
    p.add_argument("--seconds", type=float, default=2.0, help="demo length per episode")
    p.add_argument("--profile", default="unscrew",
                   choices=("unscrew", "open-close", "hold"))
    p.add_argument("--tick-hz", type=float, default=30.0)

    p = sub.add_parser("retarget", help="map a hand_frame ndjson stream to joint targets")
    p.add_argument("--frames", required=True, help="input ndjson of hand_frame messages")
    p.add_argument("--out", required=True, help="output ndjson of joint targets")

    p = sub.add_parser("curate", help="score dataset demos and write curation_report.json")
    p.add_argument("--dataset", required=True)
    p.add_argument("--features-top", help="external feature CSV for the top camera")
    p.add_argument("--features-wrist", help="external feature CSV for the wrist camera")
    p.add_argument("--min-samples", type=int, default=1)
    p.add_argument("--min-cluster-size", type=int, default=2)

    p = sub.add_parser("filter", help="write a retained-episode manifest for a percentile")
    p.add_argument("--dataset", required=True)
    p.add_argument("--percentile", type=float, required=True)
    p.add_argument("--out", help="output manifest path (default manifest_p<P>.json)")

    p = sub.add_parser("sample", help="build policy-training samples from episodes")
    p.add_argument("--dataset", required=True)
    p.add_argument("--manifest", help="episode manifest (default <dataset>/manifest.json)")
    p.add_argument("--out", help="output path (default <dataset>/samples.jsonl)")
    p.add_argument("--obs-steps", type=int, default=3)
    p.add_argument("--action-horizon", type=int, default=8)
    p.add_argument("--prediction-horizon", type=int, default=16)
    p.add_argument("--mask", default="top,wrist,effort,position",
                   help="comma-separated observation modalities")

    p = sub.add_parser("report", help="print a human-readable dataset summary")
    p.add_argument("--dataset", required=True)
    return parser


def _load_rig(args) -> RigConfig:
    path = args.rig or os.environ.get("DEXKIT_RIG")
    if path:
        return RigConfig.load(path)
    return default_rig()


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        rig = _load_rig(args)
        handler = {
            "serve": _cmd_serve,
            "simulate": _cmd_simulate,
            "retarget": _cmd_retarget,
            "curate": _cmd_curate,
            "filter": _cmd_filter,
            "sample": _cmd_sample,
            "report": _cmd_report,
        }[args.command]
        return handler(args, rig)
    except (DexkitError, OSError, ValueError) as exc:
        print(f"dexkit {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


def main() -> None:
    raise SystemExit(run())


# -- subcommands ---------------------------------------------------------

def _cmd_serve(args, rig) -> int:
    from .server import TeleopServer

    async def _run():
        server = TeleopServer(
            rig=rig, port=args.port, host=args.host, tick_hz=args.tick_hz,
            record_root=args.record, seed=args.seed,
            ui_dir=args.ui_dir, dataset_dir=args.dataset,
        )
        await server.start()
        print(f"teleop: tcp on {args.host}:{server.port}, "
              f"http/ws on {args.host}:{server.http_port}", flush=True)
        try:
            await asyncio.Event().wait()
        finally:
            await server.stop()

    try:
        asyncio.run(_run())
    except KeyboardInterrupt:
        pass
    return EXIT_OK


def _cmd_simulate(args, rig) -> int:
    from .sim import simulate_dataset

    result = simulate_dataset(
        args.out, seed=args.seed, episodes=args.episodes, seconds=args.seconds,
        profile=args.profile, tick_hz=args.tick_hz, rig=rig,
    )
    print(f"simulate: {len(result.episode_dirs)} episodes, "
          f"{result.ticks} ticks -> {result.root}")
    return EXIT_OK


def _cmd_retarget(args, rig) -> int:
    from . import skeleton
    from .protocol import HandFrameMsg, decode_message
    from .retargeting import retarget_frame

    q = (0.0,) * skeleton.NUM_JOINTS
    warm: dict = {}
    count = 0
    with open(args.frames) as src, open(args.out, "w") as dst:
        for line in src:
            if not line.strip():
                continue
            msg = decode_message(line)
            if not isinstance(msg, HandFrameMsg) or msg.hand != "right":
                continue
            result, cmd = retarget_frame(msg.frame, q, rig, warm_starts=warm)
            q = tuple(qi + di for qi, di in zip(q, cmd.dq))
            dst.write(json.dumps({
                "t": msg.frame.t,
                "q_target": list(result.q_target),
                "dq": list(cmd.dq),
                "converged": result.all_converged,
            }) + "\n")
            count += 1
    print(f"retarget: {count} frames -> {args.out}")
    return EXIT_OK


def _cmd_curate(args, rig) -> int:
    from .curation import REPORT_NAME, score_dataset

    report = score_dataset(
        args.dataset,
        min_samples=args.min_samples,
        min_cluster_size=args.min_cluster_size,
        features_top=args.features_top,
        features_wrist=args.features_wrist,
    )
    out = Path(args.dataset) / REPORT_NAME
    report.save(out)
    worst = report.ranking[0] if report.ranking else "-"
    print(f"curate: {len(report.demos)} demos scored, highest outlier {worst} -> {out}")
    return EXIT_OK


def _cmd_filter(args, rig) -> int:
    from .curation import REPORT_NAME, CurationReport, filter_percentile

    report = CurationReport.load(Path(args.dataset) / REPORT_NAME)
    retained, removed = filter_percentile(report, args.percentile)
    out = Path(args.out) if args.out else (
        Path(args.dataset) / f"manifest_p{int(args.percentile)}.json"
    )
    out.write_text(json.dumps({"episodes": retained}, indent=2) + "\n")
    print(f"filter: retained {len(retained)}, removed {len(removed)} -> {out}")
    return EXIT_OK


def _cmd_sample(args, rig) -> int:
    from .recorder import load_episode
    from .sampler import SampleSpec, build_samples, save_samples

    root = Path(args.dataset)
    manifest_path = Path(args.manifest) if args.manifest else root / "manifest.json"
    episodes = json.loads(manifest_path.read_text())["episodes"]
    spec = SampleSpec(
        obs_steps=args.obs_steps,
        action_horizon=args.action_horizon,
        prediction_horizon=args.prediction_horizon,
        mask=frozenset(m.strip() for m in args.mask.split(",") if m.strip()),
    )
    samples = []
    for name in sorted(episodes):
        samples.extend(build_samples(load_episode(root / name), spec))
    out = Path(args.out) if args.out else root / "samples.jsonl"
    save_samples(samples, out)
    print(f"sample: {len(samples)} samples from {len(episodes)} episodes -> {out}")
    return EXIT_OK


def _cmd_report(args, rig) -> int:
    from .curation import REPORT_NAME, CurationReport, load_manifest
    from .recorder import load_episode

    root = Path(args.dataset)
    names = load_manifest(root)
    print(f"dataset {root}: {len(names)} episodes")
    total_frames = 0
    for name in names:
        ep = load_episode(root / name)
        total_frames += len(ep.frames)
        print(f"  {ep.episode_id}: {len(ep.frames)} frames, "
              f"{ep.duration():.2f}s, prompt center "
              f"({ep.prompt.center[0]:+.3f}, {ep.prompt.center[1]:+.3f})")
    print(f"  total frames: {total_frames}")
    report_path = root / REPORT_NAME
    if report_path.exists():
        report = CurationReport.load(report_path)
        print("  outlier ranking (worst first):")
        by_id = {d.demo_id: d for d in report.demos}
        for demo_id in report.ranking:
            print(f"    {demo_id}: {by_id[demo_id].outlier_score:.4f}")
        for p, ids in sorted(report.percentiles.items(), reverse=True):
            print(f"  retained p{p}: {len(ids)}")
    return EXIT_OK


if __name__ == "__main__":
    main()
