"""Compare latent-space class separation with and without the classifier loss.

Trains the same model twice per seed (lambda = 0 vs lambda = 1) and reports
the silhouette score of the held-out latents.

Usage: python3 scripts/joint_benefit_study.py [--seeds 0 1 2]
"""

import argparse

import numpy as np

from posespace.nets import encode
from posespace.synth import SynthParams, synth_dataset
from posespace.training import (TrainConfig, make_windows, silhouette,
                                train_joint)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    parser.add_argument("--clips", type=int, default=10)
    parser.add_argument("--epochs", type=int, default=25)
    args = parser.parse_args()

    print(f"{'seed':>5} {'lambda':>7} {'silhouette':>11}")
    means = {}
    for lam in (0.0, 1.0):
        scores = []
        for seed in args.seeds:
            clips = synth_dataset(args.clips, SynthParams(seed=seed))
            ds = make_windows(clips, 2)
            cfg = TrainConfig(frames_per_window=2, lam=lam,
                              epochs=args.epochs, seed=seed)
            result = train_joint(ds, cfg)
            z = encode(result.checkpoint.autoencoder,
                       result.test_set.inputs("concat"))
            score = silhouette(z, result.test_set.labels())
            scores.append(score)
            print(f"{seed:>5} {lam:>7.1f} {score:>11.3f}")
        means[lam] = float(np.mean(scores))
    print(f"mean: lambda=0 {means[0.0]:.3f}, lambda=1 {means[1.0]:.3f}")


if __name__ == "__main__":
    main()
