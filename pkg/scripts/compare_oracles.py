#!/usr/bin/env python3
"""Compare the spectral filter with the particle and Kalman references.

Runs the cubic sensor against a bootstrap particle filter and the linear
model against the exact Kalman filter, printing RMSE side by side.

Usage: python scripts/compare_oracles.py [--particles N] [--seed N]
"""

import argparse

from yauyau import (
    execute,
    get_preset,
    kalman_oracle_for_model,
    particle_oracle,
    rmse,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--particles", type=int, default=5000)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    cfg = get_preset("cubic1d", seed=args.seed)
    res = execute(cfg)
    pf = particle_oracle(
        cfg.model(), res.paths.observations, res.tg, args.particles,
        seed=cfg.seed, init_mean=cfg.x0_vector(), init_sigma=cfg.init_sigma,
    )
    truth = res.filter_result.truth_coarse
    print("cubic sensor (seed %d):" % cfg.seed)
    print(f"  spectral filter rmse:  {res.rmse:.4f}")
    print(f"  particle filter rmse:  {rmse(pf, truth):.4f}  ({args.particles} particles)")
    print(f"  zero estimator rmse:   {res.zero_rmse:.4f}")

    cfg = get_preset("linear1d", seed=args.seed)
    res = execute(cfg)
    kf = kalman_oracle_for_model(
        cfg.model(), res.paths.observations, res.tg,
        x0_mean=cfg.x0_vector(), p0=[[cfg.init_sigma ** 2]],
    )
    truth = res.filter_result.truth_coarse
    print("linear model (seed %d):" % cfg.seed)
    print(f"  spectral filter rmse:  {res.rmse:.4f}")
    print(f"  kalman filter rmse:    {rmse(kf, truth):.4f}")
    print(f"  filter-vs-kalman rmse: {rmse(res.filter_result.estimates, kf):.5f}")


if __name__ == "__main__":
    main()
