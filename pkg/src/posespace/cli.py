"""Command-line entry points.

Subcommands: synth-data, train, eval, embed-music, serve, replay.
Set POSESPACE_LOG=debug|info|... for diagnostic verbosity.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import os
import sys
import time

import numpy as np

from . import musicspace as ms
from .engine import EngineConfig, Session
from .errors import PosespaceError
from .geometry import read_stream
from .nets import Checkpoint, GestureClass
from .server import PoseSpaceServer
from .synth import SynthParams, synth_catalog, synth_dataset
from .training import (TrainConfig, evaluate, load_clips, make_windows, save_clips,
                       train_joint)

log = logging.getLogger("posespace.cli")


def _parse_listen(value: str) -> tuple[str, int]:
    host, _, port = value.rpartition(":")
    if not host or not port.isdigit():
        raise argparse.ArgumentTypeError(f"--listen expects host:port, got {value!r}")
    return host, int(port)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posespace")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-data", help="generate a labeled synthetic gesture dataset")
    p.add_argument("--classes", default="all",
                   help="comma-separated class numbers 1-6, or 'all'")
    p.add_argument("--clips", type=int, default=10, help="clips per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=45, help="frames per clip")
    p.add_argument("--jitter", type=float, default=0.003)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="train the joint autoencoder + classifier")
    p.add_argument("--data", required=True)
    p.add_argument("--frames", type=int, choices=(1, 2, 8), default=2)
    p.add_argument("--mode", choices=("concat", "point-set"), default="concat")
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lam", type=float, default=1.0, help="classification loss weight")
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--split", type=float, default=0.82)
    p.add_argument("--out", required=True, help="checkpoint path")
    p.add_argument("--history", help="optional per-epoch history JSON")

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--split", type=float, default=0.82,
                   help="evaluate on the held-out fraction using the checkpoint seed")
    p.add_argument("--full", action="store_true", help="evaluate on all windows")

    p = sub.add_parser("embed-music", help="build the 2D music space from a catalog")
    p.add_argument("--catalog", required=True)
    p.add_argument("--import", dest="import_xy", help="precomputed track_id,x,y file")
    p.add_argument("--out", required=True)

    p = sub.add_parser("serve", help="run the live session service")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--listen", type=_parse_listen, default=("127.0.0.1", 7878))

    p = sub.add_parser("replay", help="replay a landmark stream through the engine")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--space", required=True)
    p.add_argument("--stream", required=True)
    p.add_argument("--speed", type=float, default=0.0,
                   help="playback speed multiplier; 0 = as fast as possible")
    p.add_argument("--events", required=True, help="output event log (NDJSON)")
    return parser


def cmd_synth_data(args: argparse.Namespace) -> int:
    params = SynthParams(seed=args.seed, frames_per_clip=args.frames,
                         jitter_sigma=args.jitter)
    if args.classes == "all":
        wanted = list(GestureClass)
    else:
        wanted = [GestureClass(int(c)) for c in args.classes.split(",")]
    clips = [c for c in synth_dataset(args.clips, params) if c.label in wanted]
    save_clips(args.out, clips)
    log.info("wrote %d clips to %s", len(clips), args.out)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = TrainConfig(frames_per_window=args.frames, mode=args.mode,
                         lam=args.lam, batch_size=args.batch_size,
                         epochs=args.epochs, seed=args.seed,
                         split_fraction=args.split)
    clips = load_clips(args.data)
    dataset = make_windows(clips, config.frames_per_window)
    t0 = time.perf_counter()
    result = train_joint(dataset, config)
    result.checkpoint.save(args.out)
    if args.history:
        with open(args.history, "w") as fh:
            json.dump([vars(h) for h in result.history], fh, indent=2)
    last = result.history[-1]
    log.info("trained %d epochs in %.1f s; final loss %.4f, test precision %.1f%%",
             config.epochs, time.perf_counter() - t0, last.train_loss,
             last.test_precision)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    ckpt = Checkpoint.load(args.ckpt)
    clips = load_clips(args.data)
    dataset = make_windows(clips, ckpt.autoencoder.n_frames)
    if not args.full:
        from .training import split_by_clip
        _, dataset = split_by_clip(dataset, args.split, ckpt.seed)
    report = evaluate(ckpt, dataset)
    report.save(args.report)
    log.info("precision %.1f%%, mAP %.1f%%, latency p95 %.2f ms",
             report.overall_precision, report.map_pct, report.latency_p95_ms)
    return 0


def cmd_embed_music(args: argparse.Namespace) -> int:
    profiles = ms.load_catalog(args.catalog)
    if args.import_xy:
        coords = ms.import_embedding(args.import_xy, profiles)
        source = "imported"
    else:
        coords = ms.pca2(profiles)
        source = "pca"
    space = ms.build_space(coords, profiles, embedding_source=source)
    ms.save_space(args.out, space)
    log.info("embedded %d tracks (%s), %d centers", len(profiles), source,
             len(space.centers))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    ckpt = Checkpoint.load(args.ckpt)
    space = ms.load_space(args.space)
    host, port = args.listen
    server = PoseSpaceServer(ckpt, space)
    try:
        asyncio.run(server.serve_forever(host, port))
    except KeyboardInterrupt:
        pass
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    ckpt = Checkpoint.load(args.ckpt)
    space = ms.load_space(args.space)
    session = Session(ckpt, space, EngineConfig())
    count = 0
    with open(args.stream) as stream, open(args.events, "w") as out:
        prev_t = None
        for frame in read_stream(stream):
            if args.speed > 0 and prev_t is not None:
                time.sleep(max(0.0, (frame.timestamp - prev_t) / args.speed))
            prev_t = frame.timestamp
            for event in session.push_frame(frame):
                out.write(json.dumps(event.to_record()))
                out.write("\n")
                count += 1
    log.info("replay produced %d events -> %s", count, args.events)
    return 0


_COMMANDS = {
    "synth-data": cmd_synth_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "embed-music": cmd_embed_music,
    "serve": cmd_serve,
    "replay": cmd_replay,
}


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("POSESPACE_LOG", "info").upper()
    logging.basicConfig(level=getattr(logging, level, logging.INFO),
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: no such file: {exc.filename}", file=sys.stderr)
        return 2
    except PosespaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
