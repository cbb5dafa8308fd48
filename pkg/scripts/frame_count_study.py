"""Sweep the window length N over several seeds and report test precision.

Usage: python3 scripts/frame_count_study.py [--seeds 0 1 2] [--epochs 25]
"""

import argparse

import numpy as np

from posespace.synth import SynthParams, synth_dataset
from posespace.training import TrainConfig, evaluate, make_windows, train_joint


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--frames", type=int, nargs="+", default=[1, 2, 8])
    parser.add_argument("--clips", type=int, default=10, help="clips per class")
    parser.add_argument("--epochs", type=int, default=25)
    args = parser.parse_args()

    print(f"{'N':>3} {'seed':>5} {'precision':>10} {'mAP':>7} {'p95 ms':>7}")
    for n in args.frames:
        precisions = []
        for seed in args.seeds:
            clips = synth_dataset(args.clips, SynthParams(seed=seed))
            ds = make_windows(clips, n)
            cfg = TrainConfig(frames_per_window=n, epochs=args.epochs, seed=seed)
            result = train_joint(ds, cfg)
            rep = evaluate(result.checkpoint, result.test_set)
            precisions.append(rep.overall_precision)
            print(f"{n:>3} {seed:>5} {rep.overall_precision:>9.1f}% "
                  f"{rep.map_pct:>6.1f}% {rep.latency_p95_ms:>7.2f}")
        print(f"{n:>3}  mean {np.mean(precisions):>9.1f}%")


if __name__ == "__main__":
    main()
