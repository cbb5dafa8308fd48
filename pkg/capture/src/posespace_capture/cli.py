"""Command-line capture tool.

Records landmarks from a camera backend and writes the stream either to an
NDJSON file or directly to a running service socket as frame messages.
"""

from __future__ import annotations

import argparse
import json
import logging
import socket
import sys
import time

from .backend import BackendError, SyntheticBackend, mediapipe_backend
from .capture import BoundedWriter, CaptureConfig, CaptureStats, capture_stream

log = logging.getLogger("posespace_capture.cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="posespace-capture", description=__doc__)
    parser.add_argument("--camera", type=int, default=0)
    parser.add_argument("--fps", type=float, default=30.0)
    parser.add_argument("--source", default=None, help="source id in emitted records")
    parser.add_argument("--backend", choices=("mediapipe", "synthetic"),
                        default="mediapipe")
    parser.add_argument("--seconds", type=float, default=0.0,
                        help="stop after this many seconds; 0 = until interrupted")
    dest = parser.add_mutually_exclusive_group(required=True)
    dest.add_argument("--out", help="output NDJSON stream file")
    dest.add_argument("--send", help="service address host:port")
    return parser


def _synthetic_demo_backend() -> SyntheticBackend:
    # A short canned clip so the tool runs end to end with no camera.
    import numpy as np
    from posespace.synth import SynthParams, synth_gesture
    from posespace.nets import GestureClass
    clip = synth_gesture(GestureClass.PINCH, SynthParams(seed=0),
                         np.random.default_rng(0))
    return SyntheticBackend([f.points for f in clip.frames])


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    config = CaptureConfig(camera_index=args.camera, fps=args.fps,
                           source_id=args.source or f"camera-{args.camera}")
    backend = (_synthetic_demo_backend() if args.backend == "synthetic"
               else mediapipe_backend(config.camera_index))
    try:
        backend.open()
    except BackendError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    stats = CaptureStats()
    deadline = time.monotonic() + args.seconds if args.seconds > 0 else None
    try:
        if args.out:
            with open(args.out, "w") as fh:
                _run(config, backend, stats, deadline,
                     lambda rec: fh.write(json.dumps(rec) + "\n"))
        else:
            host, _, port = args.send.rpartition(":")
            with socket.create_connection((host, int(port))) as sock:
                writer = BoundedWriter(
                    lambda rec: sock.sendall(
                        (json.dumps({"type": "frame", **rec}) + "\n").encode()))
                _run(config, backend, stats, deadline, writer.push, writer.drain)
                log.info("dropped %d queued records", writer.dropped)
    except KeyboardInterrupt:
        pass
    finally:
        backend.close()
    log.info("emitted %d records (%d no-hand, %d skipped, %d duplicate-t)",
             stats.emitted, stats.no_hand, stats.skipped, stats.duplicates)
    return 0


def _run(config, backend, stats, deadline, write, flush=lambda: None) -> None:
    next_frame = time.monotonic()
    for record in capture_stream(config, backend, stats=stats):
        write(record)
        flush()
        if deadline is not None and time.monotonic() >= deadline:
            break
        if getattr(backend, "exhausted", False):
            break
        next_frame += config.frame_interval
        delay = next_frame - time.monotonic()
        if delay > 0:
            time.sleep(delay)


if __name__ == "__main__":
    sys.exit(main())
